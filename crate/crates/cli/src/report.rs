//! The JSON verdict printed by `classify`. Field values are plain doubles
//! serialized at full round-trip precision, so the report is both the human
//! summary and a machine-readable record of the analysis.

use serde::{Deserialize, Serialize};

use crossjump_core::{
    ArcDirection, CrossingReport, CycleStability, Orientation, Side, SpectralData, SpectralKind,
    SystemAnalysis, VerdictCase,
};

/// Eigenstructure of one side in companion coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    /// Trace of the field.
    pub sigma: f64,
    /// Minus the determinant.
    pub delta: f64,
    /// "focus", "node" or "improper-node".
    pub kind: String,
    /// (lambda, mu) for a focus, (r1, r2) for a node, (r, r) when improper.
    pub eigen: [f64; 2],
}

/// Transversality numbers behind the crossing decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingDiagnostics {
    pub b21_plus: f64,
    pub b21_minus: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
}

/// The two gains whose comparison decides the verdict, with the half-return
/// data they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    /// Jump gain a * b^(1/s).
    pub k: f64,
    /// Arc gain |w_star| / |u_star|^r.
    pub c_star: f64,
    /// Forward displacement power (the jump exponent r).
    pub r: f64,
    /// Backward displacement power 1/s.
    pub s_inv: f64,
    /// Left-branch landing of the forward arc from (1, rho).
    pub u_star: f64,
    /// Left-branch landing of the backward arc over the unit right point.
    pub w_star: f64,
    pub forward_time: f64,
    pub backward_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    /// Right-branch coordinate of the closed orbit.
    pub x0: f64,
    /// Displacement slope at x0; sign gives the stability.
    pub delta_prime: f64,
    /// "stable" or "unstable".
    pub stability: String,
}

/// Present when one side swallows its arc instead of returning to the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbedReport {
    /// "plus" or "minus".
    pub side: String,
    /// "forward" or "backward".
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    /// GAS, GAS_NodeCase, GloballyUnstable, GlobalCenter or LimitCycle.
    pub verdict: String,
    pub rho: f64,
    /// "counterclockwise" or "clockwise".
    pub orientation: String,
    /// Side carrying orbits from the right branch to the left.
    pub forward_side: String,
    pub crossing: CrossingDiagnostics,
    pub plus: SideReport,
    pub minus: SideReport,
    /// Absent exactly when a side absorbs (see `absorbed`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorbed: Option<AbsorbedReport>,
    /// Strict verdict, but within plausible data error of a center.
    pub near_center: bool,
}

pub fn side_name(side: Side) -> &'static str {
    match side {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

fn side_report(data: &SpectralData) -> SideReport {
    let (kind, eigen) = match data.kind {
        SpectralKind::Focus { lambda, mu } => ("focus", [lambda, mu]),
        SpectralKind::Node { r1, r2 } => ("node", [r1, r2]),
        SpectralKind::ImproperNode { r } => ("improper-node", [r, r]),
    };
    SideReport { sigma: data.sigma, delta: data.delta, kind: kind.to_string(), eigen }
}

fn diagnostics(report: &CrossingReport) -> CrossingDiagnostics {
    CrossingDiagnostics {
        b21_plus: report.b21_plus,
        b21_minus: report.b21_minus,
        eta_plus: report.eta_plus,
        eta_minus: report.eta_minus,
    }
}

impl VerdictReport {
    pub fn new(analysis: &SystemAnalysis) -> VerdictReport {
        let gains = analysis.loop_data.map(|data| GainReport {
            k: data.k,
            c_star: data.c_star,
            r: data.displacement.forward_exp,
            s_inv: data.displacement.backward_exp,
            u_star: data.coefficients.u_star,
            w_star: data.coefficients.w_star,
            forward_time: data.coefficients.forward_time,
            backward_time: data.coefficients.backward_time,
        });
        let cycle = analysis.verdict.cycle.map(|c| CycleReport {
            x0: c.x0,
            delta_prime: c.derivative,
            stability: match c.stability {
                CycleStability::Stable => "stable",
                CycleStability::Unstable => "unstable",
            }
            .to_string(),
        });
        let absorbed = analysis.absorbed.map(|arc| AbsorbedReport {
            side: side_name(arc.side).to_string(),
            direction: match arc.direction {
                ArcDirection::Forward => "forward",
                ArcDirection::Backward => "backward",
            }
            .to_string(),
        });
        VerdictReport {
            verdict: analysis.verdict.case.label().to_string(),
            rho: analysis.spec().rho(),
            orientation: match analysis.orientation {
                Orientation::Counterclockwise => "counterclockwise",
                Orientation::Clockwise => "clockwise",
            }
            .to_string(),
            forward_side: side_name(analysis.forward_side).to_string(),
            crossing: diagnostics(&analysis.normal_form.report),
            plus: side_report(&analysis.spectral_plus),
            minus: side_report(&analysis.spectral_minus),
            gains,
            cycle,
            absorbed,
            near_center: analysis.near_center(),
        }
    }

    pub fn is_cycle(&self) -> bool {
        self.verdict == VerdictCase::LimitCycle.label()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict report serializes")
    }
}
