//! Closed-form linear flows and the half-return arcs they induce between the
//! two branches of the switching line.
//!
//! Everything here works on one matrix at a time. An "arc" starts on the
//! right branch at (1, rho) and runs (forward or backward) until the orbit
//! first meets the open left branch {y = 0, x < 0}. Scale invariance of
//! linear flows makes that single arc the whole story: the hit coordinate of
//! any other starting point is proportional to it.

use crate::model::{Matrix2, Point2};
use std::f64::consts::PI;

/// Spiral parameters of a companion focus: eigenvalues lambda +/- i mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusFlowParams {
    pub lambda: f64,
    pub mu: f64,
}

/// Flow of the companion focus [[2 lambda, -(lambda^2 + mu^2)], [1, 0]]
/// through `p` after time `t`, written out so the trigonometric structure is
/// visible to tests.
pub fn focus_flow(params: FocusFlowParams, p: Point2, t: f64) -> Point2 {
    let FocusFlowParams { lambda, mu } = params;
    let e = (lambda * t).exp();
    let (sin, cos) = (mu * t).sin_cos();
    let x = e * (p.x * cos + (lambda * p.x - (lambda * lambda + mu * mu) * p.y) * sin / mu);
    let y = e * (p.y * cos + (p.x - lambda * p.y) * sin / mu);
    Point2::new(x, y)
}

/// Flow of the companion node with eigenvalues r1 != r2; the invariant
/// directions are (r1, 1) and (r2, 1).
pub fn node_flow(r1: f64, r2: f64, p: Point2, t: f64) -> Point2 {
    let gap = r1 - r2;
    let c1 = (p.x - r2 * p.y) / gap;
    let c2 = (r1 * p.y - p.x) / gap;
    let e1 = (r1 * t).exp();
    let e2 = (r2 * t).exp();
    Point2::new(c1 * e1 * r1 + c2 * e2 * r2, c1 * e1 + c2 * e2)
}

/// Flow of the companion matrix with a double eigenvalue r, whose exponential
/// collapses to e^{rt}(I + t(M - rI)).
pub fn improper_flow(r: f64, p: Point2, t: f64) -> Point2 {
    let e = (r * t).exp();
    Point2::new(
        e * (p.x + t * r * (p.x - r * p.y)),
        e * (p.y + t * (p.x - r * p.y)),
    )
}

/// Generalized (cosh, sinh(w)/w) pair for w^2 = nu2 * t^2 of either sign, so
/// one formula covers spiral, node and the degenerate double-root case.
fn stretch(nu2: f64, t: f64) -> (f64, f64) {
    let z = nu2 * t * t;
    if z.abs() < 1e-30 {
        (1.0 + z / 2.0, t * (1.0 + z / 6.0))
    } else if nu2 > 0.0 {
        let nu = nu2.sqrt();
        ((nu * t).cosh(), (nu * t).sinh() / nu)
    } else {
        let mu = (-nu2).sqrt();
        ((mu * t).cos(), (mu * t).sin() / mu)
    }
}

/// exp(t m), exact up to rounding for every real 2x2 matrix.
pub(crate) fn exp_at(m: Matrix2, t: f64) -> Matrix2 {
    let half_tr = m.trace() / 2.0;
    let nu2 = half_tr * half_tr - m.det();
    let (c, s) = stretch(nu2, t);
    let e = (half_tr * t).exp();
    Matrix2::new(
        e * (c + s * (m.m11 - half_tr)),
        e * s * m.m12,
        e * s * m.m21,
        e * (c + s * (m.m22 - half_tr)),
    )
}

/// Direction of travel along an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcDirection {
    Forward,
    Backward,
}

/// Time for a companion focus arc from (1, rho) to the left branch:
///
///   t = (dir * atan(mu rho / (lambda rho - 1)) + pi) / mu
///
/// with dir = +1 forward, -1 backward. At rho = 0 this is exactly pi / mu.
/// The denominator lambda rho - 1 stays below -1 for Hurwitz lambda, so the
/// expression is well defined for every rho >= 0.
pub fn crossing_time(lambda: f64, mu: f64, rho: f64, dir: ArcDirection) -> f64 {
    let ratio = (mu * rho / (lambda * rho - 1.0)).atan();
    let signed = match dir {
        ArcDirection::Forward => ratio,
        ArcDirection::Backward => -ratio,
    };
    (signed + PI) / mu
}

/// Limit of [`crossing_time`] as rho grows without bound:
/// (dir * atan(mu / lambda) + pi) / mu.
pub fn crossing_time_limit(lambda: f64, mu: f64, dir: ArcDirection) -> f64 {
    let ratio = (mu / lambda).atan();
    let signed = match dir {
        ArcDirection::Forward => ratio,
        ArcDirection::Backward => -ratio,
    };
    (signed + PI) / mu
}

/// Amplitude factor picked up between (1, rho) and the left-branch hit of a
/// companion focus, the exponential contraction aside:
/// sqrt((1 - lambda rho)^2 + (mu rho)^2). The hit coordinate itself is
/// -exp(lambda t) * amplitude (forward) or -exp(-lambda t) * amplitude
/// (backward).
pub fn branch_amplitude(lambda: f64, mu: f64, rho: f64) -> f64 {
    (1.0 - lambda * rho).hypot(mu * rho)
}

/// Endpoint of an arc: elapsed (unsigned) time and the x coordinate of the
/// left-branch hit, always negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcHit {
    pub elapsed: f64,
    pub x: f64,
}

fn flow_point(m: Matrix2, p0: Point2, t: f64) -> Point2 {
    exp_at(m, t).apply(p0)
}

/// A couple of Newton corrections on y(t) = 0; the derivative is read off the
/// field itself, so this cleans up root rounding without any extra formulas.
fn polish(m: Matrix2, p0: Point2, mut t: f64) -> ArcHit {
    for _ in 0..2 {
        let p = flow_point(m, p0, t);
        let dy = m.m21 * p.x + m.m22 * p.y;
        if p.y == 0.0 || dy == 0.0 {
            break;
        }
        let step = p.y / dy;
        if !(step.abs() < 0.1 * t.abs()) {
            break;
        }
        t -= step;
    }
    let p = flow_point(m, p0, t);
    ArcHit { elapsed: t, x: p.x }
}

// The engine guard is much tighter than the classification band in
// `spectral`: labels should be stable to read, arcs should be as exact as the
// arithmetic allows. Between the two guards the N1/N2 formulas agree to more
// digits than any downstream tolerance asks for.
const ENGINE_DISC_GUARD: f64 = 1e-12;

fn spiral_hit(m: Matrix2, p0: Point2, yd0: f64) -> Option<f64> {
    let lambda = m.trace() / 2.0;
    let mu = (4.0 * m.det() - m.trace() * m.trace()).sqrt() / 2.0;
    let g = (yd0 - lambda * p0.y) / mu;
    let phase = p0.y.atan2(g);
    let t_guard = 1e-9 * PI / mu;
    // Zeros of y sit at t = (k pi - phase) / mu and the sign of x alternates
    // between consecutive ones, so the first zero past the guard with x < 0
    // is at k = 1 or 2; the extra iterations are slack for rounding at the
    // guard itself.
    for k in 1..=4 {
        let t = (k as f64 * PI - phase) / mu;
        if t <= t_guard {
            continue;
        }
        if flow_point(m, p0, t).x < 0.0 {
            return Some(t);
        }
    }
    None
}

fn node_hit(m: Matrix2, p0: Point2, yd0: f64) -> Option<f64> {
    let root = (m.trace() * m.trace() - 4.0 * m.det()).sqrt();
    let r1 = (m.trace() + root) / 2.0;
    let r2 = (m.trace() - root) / 2.0;
    // y(t) = b1 e^{r1 t} + b2 e^{r2 t} from y(0), ydot(0); at most one zero.
    let b1 = (yd0 - r2 * p0.y) / (r1 - r2);
    let b2 = (r1 * p0.y - yd0) / (r1 - r2);
    if b1 == 0.0 || b2 == 0.0 {
        return None;
    }
    let q = -b2 / b1;
    if q <= 0.0 {
        return None;
    }
    let t = q.ln() / (r1 - r2);
    let t_guard = 1e-9 / r1.abs().max(r2.abs());
    if t <= t_guard {
        return None;
    }
    if flow_point(m, p0, t).x < 0.0 {
        Some(t)
    } else {
        None
    }
}

fn double_root_hit(m: Matrix2, p0: Point2, yd0: f64) -> Option<f64> {
    let r = m.trace() / 2.0;
    // y(t) = e^{rt} (y0 + c t): a single zero if c != 0.
    let c = yd0 - r * p0.y;
    if c == 0.0 {
        return None;
    }
    let t = -p0.y / c;
    let t_guard = 1e-9 / r.abs().max(f64::MIN_POSITIVE);
    if t <= t_guard {
        return None;
    }
    if flow_point(m, p0, t).x < 0.0 {
        Some(t)
    } else {
        None
    }
}

/// First meeting of the orbit of `m` through `p0` with the open left branch,
/// in the flow's own time direction. `None` means the orbit never gets
/// there: for a Hurwitz field that is exactly the absorbed case, where the
/// orbit slides into the origin along an invariant ray without completing
/// the turn.
fn first_left_hit(m: Matrix2, p0: Point2) -> Option<ArcHit> {
    let yd0 = m.m21 * p0.x + m.m22 * p0.y;
    let tr = m.trace();
    let disc = tr * tr - 4.0 * m.det();
    let guard = ENGINE_DISC_GUARD * (tr * tr).max(1.0);
    let candidate = if disc < -guard {
        spiral_hit(m, p0, yd0)
    } else if disc > guard {
        node_hit(m, p0, yd0)
    } else {
        double_root_hit(m, p0, yd0)
    };
    candidate
        .map(|t| polish(m, p0, t))
        .filter(|hit| hit.x < 0.0)
}

/// Forward arc of `m` from the right-branch entry (1, rho) to the left
/// branch.
pub fn half_return_forward(m: Matrix2, rho: f64) -> Option<ArcHit> {
    first_left_hit(m, Point2::new(1.0, rho))
}

/// Backward arc: same endpoint sought along the reversed flow. The returned
/// time is the unsigned duration.
pub fn half_return_backward(m: Matrix2, rho: f64) -> Option<ArcHit> {
    first_left_hit(m.scale(-1.0), Point2::new(1.0, rho))
}

/// The two arc endpoints that determine the whole return dynamics: u_star is
/// the forward hit, w_star the backward one, both negative x coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnCoefficients {
    pub u_star: f64,
    pub forward_time: f64,
    pub w_star: f64,
    pub backward_time: f64,
}

/// Compose the forward arc of `forward` with the backward arc of `backward`.
/// `None` when either side absorbs its orbits before the left branch.
pub fn return_coefficients(
    forward: Matrix2,
    backward: Matrix2,
    rho: f64,
) -> Option<ReturnCoefficients> {
    let f = half_return_forward(forward, rho)?;
    let b = half_return_backward(backward, rho)?;
    Some(ReturnCoefficients {
        u_star: f.x,
        forward_time: f.elapsed,
        w_star: b.x,
        backward_time: b.elapsed,
    })
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn hurwitz() -> impl Strategy<Value = Matrix2> {
        (
            -4.0f64..-0.2,
            0.1f64..6.0,
            -3.0f64..3.0,
            prop::sample::select(vec![-1.0f64, 1.0]),
            0.2f64..3.0,
        )
            .prop_map(|(tr, det, m11, sign, m21_mag)| {
                let m21 = sign * m21_mag;
                let m22 = tr - m11;
                let m12 = (m11 * m22 - det) / m21;
                Matrix2::new(m11, m12, m21, m22)
            })
    }

    proptest! {
        #[test]
        fn exponential_group_law(m in hurwitz(), t in -3.0f64..3.0, s in -3.0f64..3.0) {
            let lhs = exp_at(m, t).mul(exp_at(m, s));
            let rhs = exp_at(m, t + s);
            let scale = lhs.max_norm().max(rhs.max_norm()).max(1.0);
            prop_assert!(lhs.sub(rhs).max_norm() <= 1e-11 * scale);
        }

        #[test]
        fn exponential_inverse(m in hurwitz(), t in -3.0f64..3.0) {
            let round = exp_at(m, t).mul(exp_at(m, -t));
            prop_assert!(round.sub(Matrix2::identity()).max_norm() <= 1e-11);
        }

        // Arc endpoints really sit on the left branch and the flow carries
        // the entry to them (forward) or them to the entry (backward).
        #[test]
        fn arcs_end_on_left_branch(m in hurwitz(), rho in 0.0f64..5.0) {
            let entry = Point2::new(1.0, rho);
            if let Some(hit) = half_return_forward(m, rho) {
                prop_assert!(hit.x < 0.0);
                prop_assert!(hit.elapsed > 0.0);
                let p = exp_at(m, hit.elapsed).apply(entry);
                prop_assert!((p.x - hit.x).abs() <= 1e-9 * hit.x.abs().max(1.0));
                prop_assert!(p.y.abs() <= 1e-9 * p.norm().max(1.0));
            }
            if let Some(hit) = half_return_backward(m, rho) {
                prop_assert!(hit.x < 0.0);
                prop_assert!(hit.elapsed > 0.0);
                let p = exp_at(m, -hit.elapsed).apply(entry);
                prop_assert!((p.x - hit.x).abs() <= 1e-9 * hit.x.abs().max(1.0));
                prop_assert!(p.y.abs() <= 1e-9 * p.norm().max(1.0));
            }
        }

        // A spiral side always completes both arcs.
        #[test]
        fn spirals_never_absorb(tr in -3.0f64..-0.1, bump in 0.05f64..4.0,
                                m11 in -2.0f64..2.0, m21 in 0.2f64..2.0,
                                rho in 0.0f64..5.0) {
            let det = tr * tr / 4.0 + bump;
            let m22 = tr - m11;
            let m12 = (m11 * m22 - det) / m21;
            let m = Matrix2::new(m11, m12, m21, m22);
            prop_assert!(half_return_forward(m, rho).is_some());
            prop_assert!(half_return_backward(m, rho).is_some());
        }
    }
}
