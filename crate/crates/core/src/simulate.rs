//! Event-driven integration of the hybrid flow. The analysis module decides
//! systems in closed form; this one replays the dynamics step by step so the
//! two can be checked against each other.
//!
//! Events are located by sign changes of the line offset along sampled
//! states, then sharpened by bisection. Sampling at a fixed fraction of the
//! field's rotation or decay timescale makes a double crossing inside one
//! sample interval impossible for transversal systems.

use crate::flow::exp_at;
use crate::model::{Branch, HybridSystemSpec, LinePoint, Matrix2, Point2, Side, SwitchingLine};
use crate::normal_form::{crossing_check, CrossingReport};
use thiserror::Error;

/// How individual arcs are advanced in time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Integrator {
    /// Matrix exponential of the active field: exact up to rounding.
    #[default]
    ClosedForm,
    /// Adaptive Dormand-Prince 5(4). Exists so the event logic can be
    /// validated against an integrator that never sees the flow formulas.
    Rk45 { abs_tol: f64, rel_tol: f64 },
}

impl Integrator {
    /// Runge-Kutta backend at its default tolerances.
    pub fn rk45() -> Integrator {
        Integrator::Rk45 { abs_tol: 1e-12, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Total simulated time across all arcs.
    pub t_max: f64,
    /// Jump budget; hitting it usually means a chattering or periodic orbit.
    pub max_jumps: usize,
    /// Norm below which the orbit is declared converged.
    pub converge_norm: f64,
    /// Norm above which the orbit is declared divergent.
    pub diverge_norm: f64,
    /// Absolute offset tolerance for locating line crossings.
    pub event_tol: f64,
    pub integrator: Integrator,
    /// Record per-sample trajectory points, not only events.
    pub record: bool,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            t_max: 1e3,
            max_jumps: 10_000,
            converge_norm: 1e-8,
            diverge_norm: 1e9,
            event_tol: 1e-12,
            integrator: Integrator::ClosedForm,
            record: false,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("system is not of crossing type, simulation would slide: {0}")]
    NotCrossing(CrossingReport),
    #[error("orbit on the {side} arc settled to the origin instead of returning to the line")]
    NoReturn { side: Side },
    #[error("orbit escaped past the divergence threshold after time {elapsed}")]
    Escaped { elapsed: f64 },
    #[error("time budget ran out before the arc reached the line")]
    OutOfTime,
    #[error("arc landed at the corner of the line (x = {x}), loop coordinates are undefined there")]
    CornerHit { x: f64 },
    #[error("loop evaluations need a positive right-branch coordinate, got {x}")]
    BadAmplitude { x: f64 },
}

/// Result of advancing one arc inside a single side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    /// Reached the switching line.
    Hit { elapsed: f64, point: Point2 },
    /// Norm fell below the convergence threshold.
    Settled { elapsed: f64, point: Point2 },
    /// Norm rose above the divergence threshold.
    Escaped { elapsed: f64, point: Point2 },
    /// Time budget exhausted inside the region.
    Exhausted { elapsed: f64, point: Point2 },
}

/// One recorded line crossing, after the jump has been applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEvent {
    /// Absolute time of the crossing.
    pub t: f64,
    /// Region the orbit arrived from.
    pub side_from: Side,
    /// Where the orbit met the line.
    pub hit: LinePoint,
    /// Where the jump put it.
    pub jumped: LinePoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Index of the arc this sample belongs to; arcs are separated by jumps.
    pub arc: usize,
    pub side: Side,
    pub t: f64,
    pub point: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Diverged,
    MaxTime,
    MaxJumps,
    /// The orbit met the corner point of the line, where the jump is pinned.
    ReachedOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: Point2,
    /// Populated only when `SimConfig::record` is set.
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<SimEvent>,
    pub termination: Termination,
    pub end_point: Point2,
    pub end_time: f64,
}

/// Fraction of the field timescale used as the sampling cadence. Transversal
/// crossings are at least half a timescale apart, so 24 samples per
/// timescale cannot straddle two of them.
const SAMPLES_PER_TIMESCALE: f64 = 24.0;

/// Characteristic time of the linear field: half the rotation period for
/// spirals, the fast decay constant for nodes.
fn timescale(m: Matrix2) -> f64 {
    let tr = m.trace();
    let disc = tr * tr - 4.0 * m.det();
    if disc < 0.0 {
        let mu = (-disc).sqrt() / 2.0;
        std::f64::consts::PI / mu
    } else {
        let fast = (tr.abs() + disc.sqrt()) / 2.0;
        1.0 / fast.max(1e-12)
    }
}

/// One Dormand-Prince 5(4) attempt from `p` with step `h`: returns the fifth
/// order advance and the embedded error estimate.
fn dp54_step(m: Matrix2, p: Point2, h: f64) -> (Point2, f64) {
    let f = |q: Point2| m.apply(q);
    let k1 = f(p);
    let k2 = f(p.add(k1.scale(h * (1.0 / 5.0))));
    let k3 = f(p.add(k1.scale(h * (3.0 / 40.0))).add(k2.scale(h * (9.0 / 40.0))));
    let k4 = f(p
        .add(k1.scale(h * (44.0 / 45.0)))
        .add(k2.scale(h * (-56.0 / 15.0)))
        .add(k3.scale(h * (32.0 / 9.0))));
    let k5 = f(p
        .add(k1.scale(h * (19372.0 / 6561.0)))
        .add(k2.scale(h * (-25360.0 / 2187.0)))
        .add(k3.scale(h * (64448.0 / 6561.0)))
        .add(k4.scale(h * (-212.0 / 729.0))));
    let k6 = f(p
        .add(k1.scale(h * (9017.0 / 3168.0)))
        .add(k2.scale(h * (-355.0 / 33.0)))
        .add(k3.scale(h * (46732.0 / 5247.0)))
        .add(k4.scale(h * (49.0 / 176.0)))
        .add(k5.scale(h * (-5103.0 / 18656.0))));
    let fifth = p
        .add(k1.scale(h * (35.0 / 384.0)))
        .add(k3.scale(h * (500.0 / 1113.0)))
        .add(k4.scale(h * (125.0 / 192.0)))
        .add(k5.scale(h * (-2187.0 / 6784.0)))
        .add(k6.scale(h * (11.0 / 84.0)));
    let k7 = f(fifth);
    // Difference of the fifth and embedded fourth order weights.
    let err = k1
        .scale(35.0 / 384.0 - 5179.0 / 57600.0)
        .add(k3.scale(500.0 / 1113.0 - 7571.0 / 16695.0))
        .add(k4.scale(125.0 / 192.0 - 393.0 / 640.0))
        .add(k5.scale(-2187.0 / 6784.0 + 92097.0 / 339200.0))
        .add(k6.scale(11.0 / 84.0 - 187.0 / 2100.0))
        .add(k7.scale(-1.0 / 40.0))
        .scale(h);
    (fifth, err.norm())
}

/// Integrate exactly `span` units of time from `p` with adaptive steps.
fn rk45_span(m: Matrix2, p: Point2, span: f64, abs_tol: f64, rel_tol: f64) -> Point2 {
    if span == 0.0 {
        return p;
    }
    let mut t = 0.0;
    let mut state = p;
    let mut h = (span / 8.0).min(0.05 * timescale(m)).max(span * 1e-12);
    for _ in 0..1_000_000 {
        if t >= span {
            break;
        }
        h = h.min(span - t);
        let (next, err) = dp54_step(m, state, h);
        let scale = abs_tol + rel_tol * state.norm().max(next.norm());
        let ratio = err / scale;
        if ratio <= 1.0 {
            t += h;
            state = next;
            let grow = if ratio > 0.0 { 0.9 * ratio.powf(-0.2) } else { 5.0 };
            h *= grow.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    state
}

/// Advance the arc governed by `m` from `start`, which lies in (or on the
/// boundary of) the region with offset sign `side_sign`, until the offset
/// changes sign, the norm thresholds trip, or `budget` time passes. `sink`
/// sees every accepted sample as (elapsed, point).
fn advance(
    m: Matrix2,
    start: Point2,
    line: SwitchingLine,
    side_sign: f64,
    cfg: &SimConfig,
    budget: f64,
    sink: &mut dyn FnMut(f64, Point2),
) -> StepOutcome {
    let eval = |p: Point2, span: f64| -> Point2 {
        match cfg.integrator {
            Integrator::ClosedForm => exp_at(m, span).apply(p),
            Integrator::Rk45 { abs_tol, rel_tol } => rk45_span(m, p, span, abs_tol, rel_tol),
        }
    };
    let dt = timescale(m) / SAMPLES_PER_TIMESCALE;
    // The whole-sample advance is by far the hottest call; precompute it.
    let e_dt = match cfg.integrator {
        Integrator::ClosedForm => Some(exp_at(m, dt)),
        Integrator::Rk45 { .. } => None,
    };
    let mut t = 0.0;
    let mut p = start;
    loop {
        if p.norm() <= cfg.converge_norm {
            return StepOutcome::Settled { elapsed: t, point: p };
        }
        if p.norm() >= cfg.diverge_norm {
            return StepOutcome::Escaped { elapsed: t, point: p };
        }
        if t >= budget {
            return StepOutcome::Exhausted { elapsed: t, point: p };
        }
        let span = dt.min(budget - t);
        let p_next = match e_dt {
            Some(e) if span == dt => e.apply(p),
            _ => eval(p, span),
        };
        let h_next = line.offset(p_next);
        if h_next * side_sign < 0.0 || h_next == 0.0 {
            // Crossed inside (t, t + span]: bisect the span.
            let (t_hit, p_hit) = bisect_crossing(&eval, line, side_sign, p, span, cfg);
            let hit = StepOutcome::Hit { elapsed: t + t_hit, point: p_hit };
            sink(t + t_hit, p_hit);
            return hit;
        }
        t += span;
        p = p_next;
        sink(t, p);
    }
}

/// Inside `[0, span]` from `p_lo` the offset starts on `side_sign` and ends
/// across the line; shrink the bracket until the endpoint offset is within
/// tolerance or the bracket reaches rounding width.
fn bisect_crossing(
    eval: &dyn Fn(Point2, f64) -> Point2,
    line: SwitchingLine,
    side_sign: f64,
    p_lo: Point2,
    span: f64,
    cfg: &SimConfig,
) -> (f64, Point2) {
    let mut lo = 0.0f64;
    let mut hi = span;
    let mut p_hi = eval(p_lo, hi);
    for _ in 0..80 {
        let h_hi = line.offset(p_hi);
        if h_hi.abs() <= cfg.event_tol * (1.0 + p_hi.norm()) || (hi - lo) <= f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let p_mid = eval(p_lo, mid);
        if line.offset(p_mid) * side_sign > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            p_hi = p_mid;
        }
    }
    (hi, p_hi)
}

/// Flow `start` under the field of `side` alone until the orbit meets the
/// line or a norm/time threshold trips. No jump is applied at the hit;
/// `start` may sit on the line itself (the arc then leaves into `side`).
pub fn step_to_sigma(
    spec: &HybridSystemSpec,
    side: Side,
    start: Point2,
    cfg: &SimConfig,
) -> StepOutcome {
    let m = spec.field(side).matrix();
    advance(m, start, spec.line, side.sign(), cfg, cfg.t_max, &mut |_, _| {})
}

fn snap_to_branch(p: Point2, cfg: &SimConfig) -> LinePoint {
    if p.x.abs() <= cfg.event_tol {
        LinePoint::origin()
    } else if p.x < 0.0 {
        LinePoint::left(p.x).expect("negative coordinate fits the left branch")
    } else {
        LinePoint::right(p.x).expect("positive coordinate fits the right branch")
    }
}

/// Simulate the full hybrid orbit from `start`: alternate arcs and jumps
/// until a termination condition is met.
pub fn run(
    spec: &HybridSystemSpec,
    start: Point2,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    let report = crossing_check(spec);
    if !report.is_crossing() {
        return Err(SimError::NotCrossing(report));
    }
    let line = spec.line;
    let mut samples = Vec::new();
    let mut events = Vec::new();
    let mut t = 0.0;
    let mut p = start;
    let mut arc = 0usize;

    let finish = |termination, p: Point2, t: f64, samples, events| {
        Ok(Trajectory { start, samples, events, termination, end_point: p, end_time: t })
    };

    if p.norm() <= cfg.converge_norm {
        return finish(Termination::Converged, p, t, samples, events);
    }
    // Starting on the line is allowed: the orbit flows first, no initial
    // jump. Both fields push to the same side there, so probing with the
    // plus field is enough.
    let mut side = match line.side_of(p) {
        Some(s) => s,
        None => {
            let push = spec.field(Side::Plus).apply(p).dot(line.gradient(p));
            if push > 0.0 {
                Side::Plus
            } else {
                Side::Minus
            }
        }
    };

    loop {
        if t >= cfg.t_max {
            return finish(Termination::MaxTime, p, t, samples, events);
        }
        if events.len() >= cfg.max_jumps {
            return finish(Termination::MaxJumps, p, t, samples, events);
        }
        if cfg.record {
            samples.push(TrajectorySample { arc, side, t, point: p });
        }
        let m = spec.field(side).matrix();
        let record = cfg.record;
        let t_base = t;
        let mut sink = |dt: f64, q: Point2| {
            if record {
                samples.push(TrajectorySample { arc, side, t: t_base + dt, point: q });
            }
        };
        match advance(m, p, line, side.sign(), cfg, cfg.t_max - t, &mut sink) {
            StepOutcome::Settled { elapsed, point } => {
                return finish(Termination::Converged, point, t + elapsed, samples, events);
            }
            StepOutcome::Escaped { elapsed, point } => {
                return finish(Termination::Diverged, point, t + elapsed, samples, events);
            }
            StepOutcome::Exhausted { elapsed, point } => {
                return finish(Termination::MaxTime, point, t + elapsed, samples, events);
            }
            StepOutcome::Hit { elapsed, point } => {
                t += elapsed;
                let hit = snap_to_branch(point, cfg);
                if hit.branch() == Branch::Origin {
                    return finish(Termination::ReachedOrigin, Point2::new(0.0, 0.0), t, samples, events);
                }
                let jumped = spec.jump.apply(hit);
                p = jumped.embed(line);
                events.push(SimEvent { t, side_from: side, hit, jumped });
                side = side.other();
                arc += 1;
            }
        }
    }
}

/// Forward side of the loop: the field that carries orbits from the right
/// branch to the left one.
fn forward_side(report: &CrossingReport) -> Side {
    if report.is_counterclockwise() {
        Side::Plus
    } else {
        Side::Minus
    }
}

fn arc_landing(
    m: Matrix2,
    from: Point2,
    line: SwitchingLine,
    side: Side,
    cfg: &SimConfig,
) -> Result<Point2, SimError> {
    match advance(m, from, line, side.sign(), cfg, cfg.t_max, &mut |_, _| {}) {
        StepOutcome::Hit { point, .. } => Ok(point),
        StepOutcome::Settled { .. } => Err(SimError::NoReturn { side }),
        StepOutcome::Escaped { elapsed, .. } => Err(SimError::Escaped { elapsed }),
        StepOutcome::Exhausted { .. } => Err(SimError::OutOfTime),
    }
}

/// Full return map measured by integration: start on the right branch at
/// coordinate `x`, follow the forward arc, jump, follow the other arc, jump,
/// and report the right-branch coordinate where the orbit lands.
pub fn empirical_return_map(
    spec: &HybridSystemSpec,
    x: f64,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    let report = crossing_check(spec);
    if !report.is_crossing() {
        return Err(SimError::NotCrossing(report));
    }
    if !(x > 0.0) {
        return Err(SimError::BadAmplitude { x });
    }
    let line = spec.line;
    let fwd = forward_side(&report);
    let p0 = LinePoint::right(x).expect("validated positive").embed(line);
    let u = arc_landing(spec.field(fwd).matrix(), p0, line, fwd, cfg)?;
    if u.x >= 0.0 {
        return Err(SimError::CornerHit { x: u.x });
    }
    let landed = spec.jump.apply(LinePoint::left(u.x).expect("negative coordinate"));
    let bwd = fwd.other();
    let w = arc_landing(spec.field(bwd).matrix(), landed.embed(line), line, bwd, cfg)?;
    if w.x <= 0.0 {
        return Err(SimError::CornerHit { x: w.x });
    }
    Ok(spec.jump.apply(LinePoint::right(w.x).expect("positive coordinate")).coord())
}

/// Displacement measured by integration, parametrized like the analytic one
/// by the post-jump right-branch coordinate `x`: the forward arc runs from
/// `x` itself, the backward arc runs in reversed time from the pre-jump
/// coordinate of `x`, and the gap is measured on the left branch.
pub fn empirical_displacement(
    spec: &HybridSystemSpec,
    x: f64,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    let report = crossing_check(spec);
    if !report.is_crossing() {
        return Err(SimError::NotCrossing(report));
    }
    if !(x > 0.0) {
        return Err(SimError::BadAmplitude { x });
    }
    let line = spec.line;
    let fwd = forward_side(&report);
    let p0 = LinePoint::right(x).expect("validated positive").embed(line);
    let u = arc_landing(spec.field(fwd).matrix(), p0, line, fwd, cfg)?;
    if u.x >= 0.0 {
        return Err(SimError::CornerHit { x: u.x });
    }
    let y_plus = spec.jump.apply(LinePoint::left(u.x).expect("negative coordinate")).coord();

    // Backward arc: reverse time on the other side's field, starting from
    // the point whose jump image is x.
    let bwd = fwd.other();
    let v = spec.jump.invert(LinePoint::right(x).expect("validated positive"));
    let reversed = spec.field(bwd).matrix().scale(-1.0);
    let w = arc_landing(reversed, v.embed(line), line, bwd, cfg)?;
    if w.x >= 0.0 {
        return Err(SimError::CornerHit { x: w.x });
    }
    Ok(w.x - y_plus)
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::model::{HurwitzMatrix, JumpMap};
    use proptest::prelude::*;

    fn spiral() -> impl Strategy<Value = Matrix2> {
        (-3.0f64..-0.2, 0.1f64..4.0, -2.0f64..2.0, 0.2f64..2.0).prop_map(
            |(tr, bump, m11, m21)| {
                let det = tr * tr / 4.0 + bump;
                let m22 = tr - m11;
                let m12 = (m11 * m22 - det) / m21;
                Matrix2::new(m11, m12, m21, m22)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Every event lies on the line and jumps preserve the branch.
        #[test]
        fn events_stay_on_the_line(bp in spiral(), bm in spiral(), rho in 0.0f64..3.0) {
            let spec = HybridSystemSpec::new(
                HurwitzMatrix::new(bp, Side::Plus).unwrap(),
                HurwitzMatrix::new(bm, Side::Minus).unwrap(),
                SwitchingLine::new(rho).unwrap(),
                JumpMap::identity(),
            );
            let cfg = SimConfig { t_max: 60.0, ..SimConfig::default() };
            let traj = match run(&spec, Point2::new(1.0, 1.0 + rho), &cfg) {
                Ok(t) => t,
                Err(SimError::NotCrossing(_)) => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            };
            for ev in &traj.events {
                let p = ev.hit.embed(spec.line);
                prop_assert!(spec.line.offset(p).abs() <= 1e-9 * (1.0 + p.norm()));
                prop_assert_eq!(ev.jumped.branch(), ev.hit.branch());
            }
        }
    }
}
