//! Shared fixtures for the benchmark targets.

use crossjump_core::{HurwitzMatrix, HybridSystemSpec, JumpMap, Matrix2, Side, SwitchingLine};

fn build(bp: Matrix2, bm: Matrix2, rho: f64, jump: JumpMap) -> HybridSystemSpec {
    HybridSystemSpec::new(
        HurwitzMatrix::new(bp, Side::Plus).expect("fixture matrix is Hurwitz"),
        HurwitzMatrix::new(bm, Side::Minus).expect("fixture matrix is Hurwitz"),
        SwitchingLine::new(rho).expect("fixture slope is valid"),
        jump,
    )
}

/// Double focus with a cubic jump: the system with the unstable cycle at
/// x0 = e^(3 pi / 2). Exercises the full cycle-locating path.
pub fn reference_spec() -> HybridSystemSpec {
    let b = Matrix2::new(-2.0, -2.0, 1.0, 0.0);
    build(b, b, 0.0, JumpMap::new(1.0, 1.0, 3.0, 3.0).unwrap())
}

/// Focus against a node on a sloped line: the absorbing configuration,
/// decided without any loop data.
pub fn node_spec() -> HybridSystemSpec {
    build(
        Matrix2::new(-2.0, -2.0, 1.0, 0.0),
        Matrix2::new(-1.5, 0.5, 1.0, -2.5),
        0.4,
        JumpMap::new(1.0, 1.0, 1.0, 1.0).unwrap(),
    )
}

/// Asymmetric foci with a linear jump of gain `a`; the verdict flips with
/// `rho`, which makes it the sweep workload.
pub fn linear_gain_spec(a: f64, rho: f64) -> HybridSystemSpec {
    build(
        Matrix2::new(-2.0, -2.0, 1.0, 0.0),
        Matrix2::new(-0.4, -1.0, 1.0, 0.0),
        rho,
        JumpMap::new(a, 1.0, 1.0, 1.0).unwrap(),
    )
}
