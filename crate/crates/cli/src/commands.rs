//! One function per subcommand. Each returns the data it wrote so the
//! integration tests can check files against memory instead of re-deriving
//! everything from text.

use std::fs;
use std::path::Path;

use clap::ValueEnum;

use crossjump_core::{
    classify_system, displacement, displacement_derivative, run, NormalFormError, Point2,
    SystemAnalysis, Termination, Trajectory,
};

use crate::portrait::{self, Scene};
use crate::report::{side_name, VerdictReport};
use crate::spec_file::{self, SpecFile};
use crate::CliError;

fn analyze(file: &SpecFile) -> Result<SystemAnalysis, CliError> {
    let spec = file.build()?;
    classify_system(&spec).map_err(|err| match err {
        NormalFormError::NotCrossing(report) => CliError::NotCrossing(report),
        // Unreachable through classify_system (a tangency already fails the
        // crossing check), kept as a runtime failure for safety.
        other => CliError::Runtime(other.to_string()),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|err| CliError::Runtime(format!("cannot write {}: {err}", path.display())))
}

pub fn classify(spec_path: &Path) -> Result<VerdictReport, CliError> {
    let file = spec_file::load(spec_path)?;
    let analysis = analyze(&file)?;
    if analysis.near_center() {
        log::warn!(
            "gains K and C_star agree to better than one part in 1e6; \
             the strict verdict is numerically fragile"
        );
    }
    Ok(VerdictReport::new(&analysis))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementRow {
    pub x: f64,
    pub delta: f64,
    pub delta_prime: f64,
}

/// Tabulate the displacement map on a log-spaced grid, endpoints included.
pub fn displacement_table(
    spec_path: &Path,
    x_min: f64,
    x_max: f64,
    samples: usize,
    out: &Path,
) -> Result<Vec<DisplacementRow>, CliError> {
    if !(x_min > 0.0 && x_min < x_max && x_max.is_finite()) {
        return Err(CliError::Invalid(format!(
            "displacement grid needs 0 < x-min < x-max, got [{x_min}, {x_max}]"
        )));
    }
    if samples < 2 {
        return Err(CliError::Invalid(format!("displacement needs samples >= 2, got {samples}")));
    }
    let file = spec_file::load(spec_path)?;
    let analysis = analyze(&file)?;
    let Some(data) = analysis.loop_data else {
        let arc = analysis.absorbed.expect("loop data is only missing when an arc absorbs");
        return Err(CliError::Runtime(format!(
            "displacement is undefined: the {} {} arc falls into the origin \
             and never returns to the line (verdict {})",
            side_name(arc.side),
            match arc.direction {
                crossjump_core::ArcDirection::Forward => "forward",
                crossjump_core::ArcDirection::Backward => "backward",
            },
            analysis.verdict.case.label(),
        )));
    };

    let (lo, hi) = (x_min.ln(), x_max.ln());
    let rows: Vec<DisplacementRow> = (0..samples)
        .map(|i| {
            // Exact endpoints; interior points interpolated in log space.
            let x = if i == 0 {
                x_min
            } else if i == samples - 1 {
                x_max
            } else {
                (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp()
            };
            DisplacementRow {
                x,
                delta: displacement(&data.displacement, x),
                delta_prime: displacement_derivative(&data.displacement, x),
            }
        })
        .collect();

    let mut csv = String::from("x,delta,delta_prime\n");
    for row in &rows {
        csv.push_str(&format!("{},{},{}\n", row.x, row.delta, row.delta_prime));
    }
    write_file(out, &csv)?;
    log::info!("wrote {} displacement rows to {}", rows.len(), out.display());
    Ok(rows)
}

pub fn termination_label(termination: Termination) -> &'static str {
    match termination {
        Termination::Converged => "Converged",
        Termination::Diverged => "Diverged",
        Termination::MaxTime => "MaxTime",
        Termination::MaxJumps => "MaxJumps",
        Termination::ReachedOrigin => "ReachedOrigin",
    }
}

/// Integrate one orbit and write the trajectory and event tables.
pub fn simulate(
    spec_path: &Path,
    start: Point2,
    t_max: Option<f64>,
    max_jumps: Option<usize>,
    out: &Path,
    events_out: &Path,
) -> Result<Trajectory, CliError> {
    let file = spec_file::load(spec_path)?;
    let spec = file.build()?;
    let mut cfg = file.sim_config();
    cfg.record = true;
    if let Some(v) = t_max {
        cfg.t_max = v;
    }
    if let Some(v) = max_jumps {
        cfg.max_jumps = v;
    }
    let trajectory = run(&spec, start, &cfg).map_err(|err| match err {
        crossjump_core::SimError::NotCrossing(report) => CliError::NotCrossing(report),
        other => CliError::Runtime(other.to_string()),
    })?;

    let mut csv = String::from("arc_index,side,t,x,y\n");
    for sample in &trajectory.samples {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            sample.arc,
            side_name(sample.side),
            sample.t,
            sample.point.x,
            sample.point.y
        ));
    }
    write_file(out, &csv)?;

    let mut events = String::from("event_index,t,hit_x,hit_branch,jump_x\n");
    for (i, event) in trajectory.events.iter().enumerate() {
        events.push_str(&format!(
            "{},{},{},{},{}\n",
            i,
            event.t,
            event.hit.coord(),
            event.hit.branch().label(),
            event.jumped.coord()
        ));
    }
    write_file(events_out, &events)?;
    log::info!(
        "{} samples, {} jumps, ended at t = {}",
        trajectory.samples.len(),
        trajectory.events.len(),
        trajectory.end_time
    );
    Ok(trajectory)
}

/// Render the phase portrait. Orbits come from the given seeds; the cycle,
/// when the verdict has one, is re-simulated for exactly one hybrid period.
pub fn portrait(
    spec_path: &Path,
    out: &Path,
    seeds: &[Point2],
    window: Option<[f64; 4]>,
) -> Result<(), CliError> {
    if let Some([x_min, x_max, y_min, y_max]) = window {
        if !(x_min < x_max && y_min < y_max) {
            return Err(CliError::Invalid(format!(
                "window needs x_min < x_max and y_min < y_max, got {x_min},{x_max},{y_min},{y_max}"
            )));
        }
    }
    let file = spec_file::load(spec_path)?;
    let spec = file.build()?;
    let analysis = analyze(&file)?;
    let report = VerdictReport::new(&analysis);

    let mut cfg = file.sim_config();
    cfg.record = true;
    // Figure budgets, unless the file pins them: enough to show the
    // qualitative behavior without megabytes of polyline.
    let sim = file.sim.unwrap_or_default();
    if sim.t_max.is_none() {
        cfg.t_max = 250.0;
    }
    if sim.max_jumps.is_none() {
        cfg.max_jumps = 40;
    }

    let mut scene = Scene::new(spec.rho(), portrait::annotation(&report));
    for &seed in seeds {
        scene.add_anchor(seed);
        match run(&spec, seed, &cfg) {
            Ok(trajectory) => scene.add_trajectory(&trajectory, &spec.line),
            // A broken orbit should not sink the whole figure; note it and
            // draw the rest.
            Err(err) => log::warn!("orbit from ({}, {}) failed: {err}", seed.x, seed.y),
        }
    }

    if let Some(cycle) = &report.cycle {
        let mut one_period = cfg.clone();
        one_period.max_jumps = 2;
        one_period.t_max = 1e4;
        let start = Point2::new(cycle.x0, spec.rho() * cycle.x0);
        match run(&spec, start, &one_period) {
            Ok(trajectory) => scene.set_cycle(&trajectory, &spec.line),
            Err(err) => log::warn!("could not trace the cycle for the figure: {err}"),
        }
    }

    if let Some([x_min, x_max, y_min, y_max]) = window {
        scene.fix_window(x_min, x_max, y_min, y_max);
    }
    write_file(out, &scene.render())?;
    log::info!("wrote portrait to {}", out.display());
    Ok(())
}

/// Which spec entry a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Rho,
    A,
    B,
    R,
    S,
}

impl SweepParam {
    fn apply(self, file: &SpecFile, value: f64) -> SpecFile {
        let mut varied = *file;
        match self {
            SweepParam::Rho => varied.rho = value,
            SweepParam::A => varied.jump.a = value,
            SweepParam::B => varied.jump.b = value,
            SweepParam::R => varied.jump.r = value,
            SweepParam::S => varied.jump.s = value,
        }
        varied
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Verdict label, or "invalid" when the value breaks the system.
    pub verdict: String,
    pub x0: Option<f64>,
    pub k: Option<f64>,
    pub c_star: Option<f64>,
}

/// Re-classify along a linear grid in one parameter. Values that violate
/// positivity or the crossing condition become `invalid` rows, not errors:
/// sweeps are meant to cross such boundaries.
pub fn sweep(
    spec_path: &Path,
    param: SweepParam,
    min: f64,
    max: f64,
    samples: usize,
    out: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    if samples == 0 || !(min <= max) || !min.is_finite() || !max.is_finite() {
        return Err(CliError::Invalid(format!(
            "sweep grid needs min <= max (finite) and samples >= 1, got [{min}, {max}] x {samples}"
        )));
    }
    let file = spec_file::load(spec_path)?;
    let rows: Vec<SweepRow> = (0..samples)
        .map(|i| {
            let value = if samples == 1 {
                min
            } else if i == samples - 1 {
                max
            } else {
                min + (max - min) * i as f64 / (samples - 1) as f64
            };
            let varied = param.apply(&file, value);
            match analyze(&varied) {
                Ok(analysis) => SweepRow {
                    value,
                    verdict: analysis.verdict.case.label().to_string(),
                    x0: analysis.verdict.cycle.map(|c| c.x0),
                    k: analysis.loop_data.map(|d| d.k),
                    c_star: analysis.loop_data.map(|d| d.c_star),
                },
                Err(_) => SweepRow {
                    value,
                    verdict: "invalid".to_string(),
                    x0: None,
                    k: None,
                    c_star: None,
                },
            }
        })
        .collect();

    let mut csv = String::from("param_value,verdict,x0,k,c_star\n");
    for row in &rows {
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.value,
            row.verdict,
            cell(row.x0),
            cell(row.k),
            cell(row.c_star)
        ));
    }
    write_file(out, &csv)?;
    log::info!("wrote {} sweep rows to {}", rows.len(), out.display());
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_param_replaces_the_right_field() {
        let file = spec_file::parse(
            "B_plus = [[-2.0, -2.0], [1.0, 0.0]]\n\
             B_minus = [[-2.0, -2.0], [1.0, 0.0]]\n\
             rho = 0.0\n\n[jump]\na = 1.0\nb = 1.0\nr = 3.0\ns = 3.0\n",
        )
        .unwrap();
        assert_eq!(SweepParam::Rho.apply(&file, 2.5).rho, 2.5);
        assert_eq!(SweepParam::A.apply(&file, 0.5).jump.a, 0.5);
        assert_eq!(SweepParam::S.apply(&file, 4.0).jump.s, 4.0);
        // The original is untouched.
        assert_eq!(file.jump.a, 1.0);
    }
}
