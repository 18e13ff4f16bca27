//! The on-disk system description. One TOML document per system: the two
//! matrices row-major, the line slope, the jump block, and optional
//! simulation overrides. Field names are part of the contract.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crossjump_core::{
    HurwitzMatrix, HybridSystemSpec, Integrator, JumpMap, Matrix2, Side, SimConfig, SpecError,
    SwitchingLine,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    /// Row-major: B_plus = [[b11, b12], [b21, b22]].
    #[serde(rename = "B_plus")]
    pub b_plus: [[f64; 2]; 2],
    #[serde(rename = "B_minus")]
    pub b_minus: [[f64; 2]; 2],
    pub rho: f64,
    pub jump: JumpSection,
    pub sim: Option<SimSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSection {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub s: f64,
}

/// Overrides for the simulation knobs; anything absent keeps its default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub t_max: Option<f64>,
    pub max_jumps: Option<usize>,
    pub converge_norm: Option<f64>,
    pub diverge_norm: Option<f64>,
    pub event_tol: Option<f64>,
    pub integrator: Option<IntegratorChoice>,
    /// Only read when integrator = "rk45".
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorChoice {
    ClosedForm,
    Rk45,
}

/// Read and deserialize a spec file. Unreadable and unparseable files get
/// different exit codes, hence the two error paths.
pub fn load(path: &Path) -> Result<SpecFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Unreadable { path: path.into(), source })?;
    parse(&text).map_err(|message| CliError::Parse { path: path.into(), message })
}

/// Deserialize without touching the filesystem.
pub fn parse(text: &str) -> Result<SpecFile, String> {
    toml::from_str(text).map_err(|err| err.to_string())
}

impl SpecFile {
    /// Validate the raw numbers into a system. Hypothesis failures are
    /// named so scripts can tell a typo from a genuinely rejected system.
    pub fn build(&self) -> Result<HybridSystemSpec, CliError> {
        let plus = HurwitzMatrix::new(matrix(self.b_plus), Side::Plus).map_err(invalid)?;
        let minus = HurwitzMatrix::new(matrix(self.b_minus), Side::Minus).map_err(invalid)?;
        let line = SwitchingLine::new(self.rho).map_err(invalid)?;
        let jump =
            JumpMap::new(self.jump.a, self.jump.b, self.jump.r, self.jump.s).map_err(invalid)?;
        Ok(HybridSystemSpec::new(plus, minus, line, jump))
    }

    /// Simulation config with the file's overrides applied.
    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::default();
        let Some(sim) = self.sim else { return cfg };
        if let Some(v) = sim.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = sim.max_jumps {
            cfg.max_jumps = v;
        }
        if let Some(v) = sim.converge_norm {
            cfg.converge_norm = v;
        }
        if let Some(v) = sim.diverge_norm {
            cfg.diverge_norm = v;
        }
        if let Some(v) = sim.event_tol {
            cfg.event_tol = v;
        }
        if let Some(choice) = sim.integrator {
            cfg.integrator = match choice {
                IntegratorChoice::ClosedForm => Integrator::ClosedForm,
                // Defaults mirror Integrator::rk45().
                IntegratorChoice::Rk45 => Integrator::Rk45 {
                    abs_tol: sim.abs_tol.unwrap_or(1e-12),
                    rel_tol: sim.rel_tol.unwrap_or(1e-10),
                },
            };
        }
        cfg
    }
}

fn matrix(rows: [[f64; 2]; 2]) -> Matrix2 {
    Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

fn invalid(err: SpecError) -> CliError {
    let message = match err {
        // The wording scripts grep for; the original message carries the
        // numbers.
        SpecError::NonHurwitz { .. } => {
            format!("H1 violated: trace >= 0 or det <= 0 ({err})")
        }
        other => other.to_string(),
    };
    CliError::Invalid(message)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
B_plus = [[-2.0, -2.0], [1.0, 0.0]]
B_minus = [[-2.0, -2.0], [1.0, 0.0]]
rho = 0.0

[jump]
a = 1.0
b = 1.0
r = 3.0
s = 3.0
";

    #[test]
    fn minimal_file_builds() {
        let file = parse(MINIMAL).unwrap();
        assert_eq!(file.b_plus[1], [1.0, 0.0]);
        assert!(file.sim.is_none());
        let spec = file.build().unwrap();
        assert_eq!(spec.rho(), 0.0);
        assert_eq!(spec.jump.r, 3.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\nextra = 1.0\n");
        let err = parse(&text).unwrap_err();
        assert!(err.contains("extra"), "{err}");
    }

    #[test]
    fn missing_jump_block_is_a_parse_error() {
        let headless: String =
            MINIMAL.lines().take_while(|l| !l.starts_with("[jump]")).collect::<Vec<_>>().join("\n");
        let err = parse(&headless).unwrap_err();
        assert!(err.contains("jump"), "{err}");
    }

    #[test]
    fn sim_overrides_apply() {
        let text = format!(
            "{MINIMAL}\n[sim]\nt_max = 40.0\nintegrator = \"rk45\"\nabs_tol = 1e-9\n"
        );
        let cfg = parse(&text).unwrap().sim_config();
        assert_eq!(cfg.t_max, 40.0);
        assert_eq!(cfg.integrator, Integrator::Rk45 { abs_tol: 1e-9, rel_tol: 1e-10 });
        // Untouched knobs keep their defaults.
        assert_eq!(cfg.max_jumps, SimConfig::default().max_jumps);
    }

    #[test]
    fn saddle_is_named_as_h1_violation() {
        let text = MINIMAL.replace("B_plus = [[-2.0, -2.0], [1.0, 0.0]]", "B_plus = [[1.0, 0.0], [0.0, -1.0]]");
        let err = parse(&text).unwrap().build().unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let message = err.to_string();
        assert!(message.contains("H1 violated: trace >= 0 or det <= 0"), "{message}");
    }
}
