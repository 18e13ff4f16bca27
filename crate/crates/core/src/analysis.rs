//! The decision procedure. Orientation picks which field carries orbits from
//! the right branch to the left one; the two arc endpoints and the jump
//! parameters then collapse the whole return dynamics into a difference of
//! two power functions, whose sign pattern is the verdict.

use crate::flow::{half_return_backward, half_return_forward, ArcDirection, ReturnCoefficients};
use crate::model::{HybridSystemSpec, Side};
use crate::normal_form::{normalize, NormalFormError, NormalFormSystem};
use crate::spectral::{classify, SpectralData};

/// Sense of rotation of the hybrid orbits around the origin. Fixed by the
/// sign of the transversality value eta on the right branch: positive means
/// orbits cross it upward, into the plus region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// Exponents within this relative distance are treated as equal, so that a
/// jump like r = 3, s = 1/3 lands in the single-power regime its author meant
/// instead of producing a phantom cycle at astronomical amplitude from the
/// rounding of 1/s.
pub const EXPONENT_MATCH_TOL: f64 = 1e-9;

/// Relative gap between the jump gain and the arc gain below which the system
/// is declared a center.
pub const CENTER_MATCH_TOL: f64 = 1e-12;

/// Relative gap below which a verdict, while still strict, deserves a
/// warning: the system is within plausible data error of a center.
pub const NEAR_CENTER_WARN: f64 = 1e-6;

/// The displacement at the left branch between the backward and forward
/// post-jump images of a candidate loop through right-branch coordinate x:
///
///   delta(x) = forward_coeff * x^forward_exp - backward_coeff * x^backward_exp
///
/// Negative values pull the loop inward, positive push it outward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    /// a * |u_star|^r
    pub forward_coeff: f64,
    /// r
    pub forward_exp: f64,
    /// |w_star| * b^(-1/s)
    pub backward_coeff: f64,
    /// 1/s
    pub backward_exp: f64,
}

impl DisplacementParams {
    /// Left-branch coordinate of the jumped forward half return from the
    /// right-branch coordinate x: always negative.
    pub fn forward_landing(&self, x: f64) -> f64 {
        -self.forward_coeff * x.powf(self.forward_exp)
    }

    /// Left-branch coordinate of the backward half return of the pre-jump
    /// point over x: always negative.
    pub fn backward_landing(&self, x: f64) -> f64 {
        -self.backward_coeff * x.powf(self.backward_exp)
    }
}

/// delta(x) = backward_landing(x) - forward_landing(x).
pub fn displacement(params: &DisplacementParams, x: f64) -> f64 {
    params.forward_coeff * x.powf(params.forward_exp)
        - params.backward_coeff * x.powf(params.backward_exp)
}

pub fn displacement_derivative(params: &DisplacementParams, x: f64) -> f64 {
    params.forward_coeff * params.forward_exp * x.powf(params.forward_exp - 1.0)
        - params.backward_coeff * params.backward_exp * x.powf(params.backward_exp - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStability {
    Stable,
    Unstable,
}

/// Location and hyperbolicity data of the unique closed orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleInfo {
    /// Right-branch coordinate (post-jump) of the cycle.
    pub x0: f64,
    /// Slope of the displacement at x0; its sign is the stability.
    pub derivative: f64,
    pub stability: CycleStability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictCase {
    /// Globally asymptotically stable origin, decided by the loop comparison.
    Gas,
    /// Globally asymptotically stable because one side absorbs its orbits
    /// along an invariant ray before they can complete a turn.
    GasNodeCase,
    /// Every nontrivial orbit spirals outward without bound.
    GloballyUnstable,
    /// Every loop closes: a continuum of periodic orbits.
    GlobalCenter,
    /// Exactly one closed orbit, hyperbolic.
    LimitCycle,
}

impl VerdictCase {
    /// Stable textual form used by the command line output.
    pub fn label(self) -> &'static str {
        match self {
            VerdictCase::Gas => "GAS",
            VerdictCase::GasNodeCase => "GAS_NodeCase",
            VerdictCase::GloballyUnstable => "GloballyUnstable",
            VerdictCase::GlobalCenter => "GlobalCenter",
            VerdictCase::LimitCycle => "LimitCycle",
        }
    }
}

impl std::fmt::Display for VerdictCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub case: VerdictCase,
    /// Present exactly when `case` is `LimitCycle`.
    pub cycle: Option<CycleInfo>,
}

/// Which arc failed to reach the left branch when one side absorbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsorbedArc {
    pub side: Side,
    pub direction: ArcDirection,
}

/// Everything the loop comparison is built from, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopData {
    pub coefficients: ReturnCoefficients,
    pub displacement: DisplacementParams,
    /// Jump gain a * b^(1/s).
    pub k: f64,
    /// Arc gain |w_star| / |u_star|^r.
    pub c_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemAnalysis {
    pub normal_form: NormalFormSystem,
    pub orientation: Orientation,
    /// Side whose field carries orbits from the right branch to the left.
    pub forward_side: Side,
    pub spectral_plus: SpectralData,
    pub spectral_minus: SpectralData,
    /// `None` exactly when an arc absorbs, recorded in `absorbed`.
    pub loop_data: Option<LoopData>,
    pub absorbed: Option<AbsorbedArc>,
    pub verdict: StabilityVerdict,
}

impl SystemAnalysis {
    pub fn spec(&self) -> &HybridSystemSpec {
        &self.normal_form.spec
    }

    pub fn spectral(&self, side: Side) -> &SpectralData {
        match side {
            Side::Plus => &self.spectral_plus,
            Side::Minus => &self.spectral_minus,
        }
    }

    /// True when the strict verdict stands but the gains are so close that
    /// measurement error could flip it through the center case.
    pub fn near_center(&self) -> bool {
        match (&self.loop_data, self.verdict.case) {
            (Some(data), VerdictCase::Gas | VerdictCase::GloballyUnstable) => {
                (data.k - data.c_star).abs() <= NEAR_CENTER_WARN * data.k.max(data.c_star)
            }
            _ => false,
        }
    }
}

fn loop_verdict(data: &LoopData) -> StabilityVerdict {
    let d = &data.displacement;
    let r = d.forward_exp;
    let s_inv = d.backward_exp;
    let exp_tol = EXPONENT_MATCH_TOL * r.max(s_inv).max(1.0);
    if (r - s_inv).abs() <= exp_tol {
        // Single power: the sign of delta never changes. K / C_star equals
        // forward_coeff / backward_coeff, so compare the coefficients.
        let scale = d.forward_coeff.max(d.backward_coeff);
        let case = if (d.forward_coeff - d.backward_coeff).abs() <= CENTER_MATCH_TOL * scale {
            VerdictCase::GlobalCenter
        } else if d.forward_coeff < d.backward_coeff {
            VerdictCase::Gas
        } else {
            VerdictCase::GloballyUnstable
        };
        return StabilityVerdict { case, cycle: None };
    }
    // Two distinct powers cross exactly once on x > 0: a unique hyperbolic
    // cycle. Work in log space; the amplitude can be far outside the range
    // where the powers themselves are representable.
    let ln_x0 = (d.backward_coeff.ln() - d.forward_coeff.ln()) / (r - s_inv);
    let x0 = ln_x0.exp();
    let ln_m = d.forward_coeff.ln() + r * ln_x0;
    let derivative = (r - s_inv) * (ln_m - ln_x0).exp();
    let stability = if r > s_inv {
        CycleStability::Unstable
    } else {
        CycleStability::Stable
    };
    StabilityVerdict {
        case: VerdictCase::LimitCycle,
        cycle: Some(CycleInfo { x0, derivative, stability }),
    }
}

/// Decide the global dynamics of `spec`.
///
/// The only failure mode is a system that is not of crossing type; every
/// crossing system gets a verdict.
pub fn classify_system(spec: &HybridSystemSpec) -> Result<SystemAnalysis, NormalFormError> {
    let normal_form = normalize(spec)?;
    let orientation = if normal_form.report.is_counterclockwise() {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    };
    let forward_side = match orientation {
        Orientation::Counterclockwise => Side::Plus,
        Orientation::Clockwise => Side::Minus,
    };
    let backward_side = forward_side.other();
    let spectral_plus = classify(normal_form.sigma_plus, normal_form.delta_plus)
        .expect("plus field is Hurwitz by construction");
    let spectral_minus = classify(normal_form.sigma_minus, normal_form.delta_minus)
        .expect("minus field is Hurwitz by construction");

    let rho = spec.rho();
    let forward_hit = half_return_forward(spec.field(forward_side).matrix(), rho);
    let backward_hit = half_return_backward(spec.field(backward_side).matrix(), rho);

    let (loop_data, absorbed, verdict) = match (forward_hit, backward_hit) {
        (Some(f), Some(b)) => {
            let jump = spec.jump;
            let s_inv = 1.0 / jump.s;
            let coefficients = ReturnCoefficients {
                u_star: f.x,
                forward_time: f.elapsed,
                w_star: b.x,
                backward_time: b.elapsed,
            };
            let displacement = DisplacementParams {
                forward_coeff: jump.a * f.x.abs().powf(jump.r),
                forward_exp: jump.r,
                backward_coeff: b.x.abs() * jump.b.powf(-s_inv),
                backward_exp: s_inv,
            };
            let data = LoopData {
                coefficients,
                displacement,
                k: jump.a * jump.b.powf(s_inv),
                c_star: b.x.abs() / f.x.abs().powf(jump.r),
            };
            let verdict = loop_verdict(&data);
            (Some(data), None, verdict)
        }
        (None, _) => (
            None,
            Some(AbsorbedArc { side: forward_side, direction: ArcDirection::Forward }),
            StabilityVerdict { case: VerdictCase::GasNodeCase, cycle: None },
        ),
        (_, None) => (
            None,
            Some(AbsorbedArc { side: backward_side, direction: ArcDirection::Backward }),
            StabilityVerdict { case: VerdictCase::GasNodeCase, cycle: None },
        ),
    };

    Ok(SystemAnalysis {
        normal_form,
        orientation,
        forward_side,
        spectral_plus,
        spectral_minus,
        loop_data,
        absorbed,
        verdict,
    })
}

/// Exponential-free part of the arc gain for a pair of companion spirals:
/// amplitude of the backward arc over the r-th power of the forward one.
pub fn amplitude_ratio(
    lambda_plus: f64,
    mu_plus: f64,
    lambda_minus: f64,
    mu_minus: f64,
    rho: f64,
    r: f64,
) -> f64 {
    crate::flow::branch_amplitude(lambda_minus, mu_minus, rho)
        / crate::flow::branch_amplitude(lambda_plus, mu_plus, rho).powf(r)
}

/// Limit of [`amplitude_ratio`] as rho grows without bound: 0 for r > 1,
/// infinite for r < 1, and the ratio of the eigenvalue moduli at r = 1.
pub fn rho_infinity_ratio(
    lambda_plus: f64,
    mu_plus: f64,
    lambda_minus: f64,
    mu_minus: f64,
    r: f64,
) -> f64 {
    if r > 1.0 {
        0.0
    } else if r < 1.0 {
        f64::INFINITY
    } else {
        ((lambda_minus * lambda_minus + mu_minus * mu_minus)
            / (lambda_plus * lambda_plus + mu_plus * mu_plus))
            .sqrt()
    }
}
