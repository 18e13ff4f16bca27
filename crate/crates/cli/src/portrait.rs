//! Standalone SVG phase portraits: the broken switching line, orbits colored
//! by side, jump events as paired markers, and the closed orbit highlighted
//! when the verdict has one. No external assets, so the file is archival.

use std::fmt::Write as _;

use crossjump_core::{Point2, Side, SwitchingLine, Trajectory};

use crate::report::VerdictReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 44.0;
/// Cap per polyline; beyond this the figure gains bytes, not information.
const MAX_POINTS: usize = 1500;

const PLUS_COLOR: &str = "#2c7fb8";
const MINUS_COLOR: &str = "#d95f02";
const LINE_COLOR: &str = "#222222";
const CYCLE_COLOR: &str = "#6a3d9a";

fn side_color(side: Side) -> &'static str {
    match side {
        Side::Plus => PLUS_COLOR,
        Side::Minus => MINUS_COLOR,
    }
}

/// One jump: where the orbit hit the line, where the jump put it, and the
/// side the orbit arrived from.
struct JumpMark {
    hit: Point2,
    jumped: Point2,
    from: Side,
}

pub struct Scene {
    rho: f64,
    annotation: String,
    /// Points the frame must show: the seeds. Orbit samples do not steer
    /// the frame (a diverging orbit would zoom everything else away);
    /// whatever leaves it is clipped.
    anchors: Vec<Point2>,
    arcs: Vec<(Side, Vec<Point2>)>,
    jumps: Vec<JumpMark>,
    cycle: Option<Vec<Point2>>,
    window: Option<[f64; 4]>,
}

/// Single-line figure caption for a verdict.
pub fn annotation(report: &VerdictReport) -> String {
    let mut text = format!("verdict: {}", report.verdict);
    if let Some(cycle) = &report.cycle {
        let _ = write!(text, " ({} cycle through x0 = {:.6})", cycle.stability, cycle.x0);
    }
    if report.near_center {
        text.push_str(" [within 1e-6 of a center]");
    }
    let _ = write!(text, "  |  rho = {}", report.rho);
    text
}

fn thin(points: &mut Vec<Point2>) {
    if points.len() <= MAX_POINTS {
        return;
    }
    let stride = points.len().div_ceil(MAX_POINTS);
    let last = *points.last().expect("nonempty by the length check");
    let mut kept: Vec<Point2> = points.iter().copied().step_by(stride).collect();
    if kept.last() != Some(&last) {
        kept.push(last);
    }
    *points = kept;
}

/// Per-arc polylines and jump marks of one recorded run. Sides alternate, so
/// grouping samples by side recovers the arcs; arc i ends at event i, whose
/// exact hit point closes the polyline (samples stop one cadence short).
fn split(
    trajectory: &Trajectory,
    line: &SwitchingLine,
) -> (Vec<(Side, Vec<Point2>)>, Vec<JumpMark>) {
    let mut arcs: Vec<(Side, Vec<Point2>)> = Vec::new();
    for sample in &trajectory.samples {
        match arcs.last_mut() {
            Some((side, points)) if *side == sample.side => points.push(sample.point),
            _ => arcs.push((sample.side, vec![sample.point])),
        }
    }
    let mut marks = Vec::new();
    for (i, event) in trajectory.events.iter().enumerate() {
        let hit = event.hit.embed(*line);
        let jumped = event.jumped.embed(*line);
        if let Some((_, points)) = arcs.get_mut(i) {
            points.push(hit);
        }
        marks.push(JumpMark { hit, jumped, from: event.side_from });
    }
    // A run that stopped mid-arc (converged, diverged, out of time) still
    // has a meaningful final state; close the last polyline with it.
    if arcs.len() > trajectory.events.len() {
        if let Some((_, points)) = arcs.last_mut() {
            points.push(trajectory.end_point);
        }
    }
    (arcs, marks)
}

impl Scene {
    pub fn new(rho: f64, annotation: String) -> Scene {
        Scene {
            rho,
            annotation,
            anchors: Vec::new(),
            arcs: Vec::new(),
            jumps: Vec::new(),
            cycle: None,
            window: None,
        }
    }

    /// Make the auto-fitted frame include this point.
    pub fn add_anchor(&mut self, p: Point2) {
        self.anchors.push(p);
    }

    pub fn add_trajectory(&mut self, trajectory: &Trajectory, line: &SwitchingLine) {
        let (mut arcs, marks) = split(trajectory, line);
        for (_, points) in &mut arcs {
            thin(points);
        }
        self.arcs.extend(arcs);
        self.jumps.extend(marks);
    }

    /// The closed orbit, from a one-period recording. Jumps move points
    /// along the (straight) branches, so flattening the arcs in time order
    /// draws the true hybrid cycle, jump segments included.
    pub fn set_cycle(&mut self, trajectory: &Trajectory, line: &SwitchingLine) {
        let (arcs, _) = split(trajectory, line);
        let mut points: Vec<Point2> = arcs.into_iter().flat_map(|(_, pts)| pts).collect();
        points.push(trajectory.end_point);
        thin(&mut points);
        self.cycle = Some(points);
    }

    pub fn fix_window(&mut self, x_min: f64, x_max: f64, y_min: f64, y_max: f64) {
        self.window = Some([x_min, x_max, y_min, y_max]);
    }

    /// Frame around the origin, the seeds, and the cycle. Orbits themselves
    /// are excluded on purpose: one diverging orbit would otherwise shrink
    /// the rest of the figure to a dot.
    fn auto_window(&self) -> [f64; 4] {
        let mut pts: Vec<Point2> = vec![Point2::new(0.0, 0.0)];
        pts.extend_from_slice(&self.anchors);
        if let Some(cycle) = &self.cycle {
            pts.extend_from_slice(cycle);
        }
        let (mut x_min, mut x_max, mut y_min, mut y_max) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in &pts {
            x_min = x_min.min(p.x);
            x_max = x_max.max(p.x);
            y_min = y_min.min(p.y);
            y_max = y_max.max(p.y);
        }
        // Keep the frame sane when there is nothing but the line to show.
        if x_max - x_min < 1e-9 {
            (x_min, x_max) = (-1.0, 1.0);
        }
        if y_max - y_min < 1e-9 {
            (y_min, y_max) = (-1.0, 1.0);
        }
        let (px, py) = (0.1 * (x_max - x_min), 0.1 * (y_max - y_min));
        [x_min - px, x_max + px, y_min - py, y_max + py]
    }

    pub fn render(&self) -> String {
        let [x_min, x_max, y_min, y_max] = self.window.unwrap_or_else(|| self.auto_window());
        let (dw, dh) = (x_max - x_min, y_max - y_min);
        // Fit into the canvas preserving aspect, centered.
        let scale = ((WIDTH - 2.0 * MARGIN) / dw).min((HEIGHT - 2.0 * MARGIN) / dh);
        let (cx, cy) = ((x_min + x_max) / 2.0, (y_min + y_max) / 2.0);
        let map = |p: Point2| -> (f64, f64) {
            let sx = WIDTH / 2.0 + (p.x - cx) * scale;
            let sy = HEIGHT / 2.0 - (p.y - cy) * scale;
            // Everything past this margin is clipped anyway; clamping stops
            // runaway orbits from printing mile-long coordinates.
            (sx.clamp(-1500.0, WIDTH + 1500.0), sy.clamp(-1500.0, HEIGHT + 1500.0))
        };
        let pair = |p: Point2| -> String {
            let (sx, sy) = map(p);
            format!("{sx:.2},{sy:.2}")
        };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
        let _ = writeln!(
            svg,
            "  <clipPath id=\"plot\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" \
             height=\"{}\"/></clipPath>",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        let _ = writeln!(
            svg,
            "  <text x=\"12\" y=\"24\" font-family=\"monospace\" font-size=\"13\" \
             fill=\"#111111\">{}</text>",
            escape(&self.annotation)
        );
        let _ = writeln!(svg, "  <g clip-path=\"url(#plot)\">");

        // The switching line: straight left branch, sloped right branch.
        let left_end = Point2::new(x_min.min(0.0), 0.0);
        let corner = Point2::new(0.0, 0.0);
        let right_x = if self.rho > 0.0 { x_max.max(0.0).min(y_max / self.rho) } else { x_max.max(0.0) };
        let right_end = Point2::new(right_x, self.rho * right_x);
        let _ = writeln!(
            svg,
            "    <polyline points=\"{} {} {}\" fill=\"none\" stroke=\"{LINE_COLOR}\" \
             stroke-width=\"1.6\"/>",
            pair(left_end),
            pair(corner),
            pair(right_end)
        );

        for (side, points) in &self.arcs {
            if points.len() < 2 {
                continue;
            }
            let path: Vec<String> = points.iter().map(|&p| pair(p)).collect();
            let _ = writeln!(
                svg,
                "    <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.1\" \
                 stroke-opacity=\"0.9\"/>",
                path.join(" "),
                side_color(*side)
            );
        }

        for mark in &self.jumps {
            let (hx, hy) = map(mark.hit);
            let (jx, jy) = map(mark.jumped);
            let from = side_color(mark.from);
            let to = side_color(mark.from.other());
            let _ = writeln!(
                svg,
                "    <line x1=\"{hx:.2}\" y1=\"{hy:.2}\" x2=\"{jx:.2}\" y2=\"{jy:.2}\" \
                 stroke=\"#888888\" stroke-width=\"0.8\" stroke-dasharray=\"2 3\"/>"
            );
            let _ = writeln!(
                svg,
                "    <circle cx=\"{hx:.2}\" cy=\"{hy:.2}\" r=\"2.0\" fill=\"{from}\"/>"
            );
            let _ = writeln!(
                svg,
                "    <circle cx=\"{jx:.2}\" cy=\"{jy:.2}\" r=\"3.0\" fill=\"none\" \
                 stroke=\"{to}\" stroke-width=\"1.0\"/>"
            );
        }

        if let Some(cycle) = &self.cycle {
            let path: Vec<String> = cycle.iter().map(|&p| pair(p)).collect();
            let _ = writeln!(
                svg,
                "    <polyline class=\"cycle\" points=\"{}\" fill=\"none\" \
                 stroke=\"{CYCLE_COLOR}\" stroke-width=\"2.4\"/>",
                path.join(" ")
            );
        }

        // Origin marker: the corner of the line and the only equilibrium.
        let (ox, oy) = map(corner);
        let _ = writeln!(svg, "    <circle cx=\"{ox:.2}\" cy=\"{oy:.2}\" r=\"2.6\" fill=\"#111111\"/>");
        let _ = writeln!(svg, "  </g>");
        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
