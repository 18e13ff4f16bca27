//! Core data types: the switching line, branch-tagged points on it, the
//! power-law jump, and validated Hurwitz matrices.

use thiserror::Error;

/// Validation failures raised while building a system description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("line slope must be >= 0, got {rho}")]
    NegativeSlope { rho: f64 },
    #[error("jump parameter {name} must be > 0, got {value}")]
    NonPositiveJump { name: &'static str, value: f64 },
    #[error("B{side} is not Hurwitz: trace = {trace}, det = {det} (need trace < 0 and det > 0)")]
    NonHurwitz { side: Side, trace: f64, det: f64 },
    #[error("point {coord} is not on the {branch:?} branch")]
    OffBranch { branch: Branch, coord: f64 },
    #[error("spectral data requires sigma < 0 and delta < 0, got sigma = {sigma}, delta = {delta}")]
    BadSpectralInput { sigma: f64, delta: f64 },
}

/// Which linear field governs a point: `Plus` where the line offset is
/// positive, `Minus` where it is negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Point2 {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(k * self.x, k * self.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A plain 2x2 real matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Matrix2 {
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Matrix2 {
        Matrix2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Matrix2 {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn trace(self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(self, p: Point2) -> Point2 {
        Point2::new(self.m11 * p.x + self.m12 * p.y, self.m21 * p.x + self.m22 * p.y)
    }

    pub fn mul(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }

    pub fn inverse(self) -> Option<Matrix2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Matrix2::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }

    pub fn sub(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }

    pub fn scale(self, k: f64) -> Matrix2 {
        Matrix2::new(k * self.m11, k * self.m12, k * self.m21, k * self.m22)
    }

    /// Largest absolute entry; the norm used by the conjugation checks.
    pub fn max_norm(self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    pub fn is_finite(self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }
}

/// The broken switching line: the left branch {x <= 0, y = 0} joined at the
/// origin to the right branch {x >= 0, y = rho * x}, rho >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingLine {
    rho: f64,
}

impl SwitchingLine {
    pub fn new(rho: f64) -> Result<SwitchingLine, SpecError> {
        if !rho.is_finite() {
            return Err(SpecError::NonFinite { name: "rho", value: rho });
        }
        if rho < 0.0 {
            return Err(SpecError::NegativeSlope { rho });
        }
        Ok(SwitchingLine { rho })
    }

    pub fn rho(self) -> f64 {
        self.rho
    }

    /// Signed offset from the line: y on the left half-plane, y - rho*x on the
    /// right. Continuous, and zero exactly on the line.
    pub fn offset(self, p: Point2) -> f64 {
        if p.x <= 0.0 {
            p.y
        } else {
            p.y - self.rho * p.x
        }
    }

    /// Gradient of [`offset`](Self::offset) at a point of the line itself
    /// (away from the corner): (0, 1) on the left branch, (-rho, 1) on the
    /// right.
    pub fn gradient(self, p: Point2) -> Point2 {
        if p.x <= 0.0 {
            Point2::new(0.0, 1.0)
        } else {
            Point2::new(-self.rho, 1.0)
        }
    }

    /// Which side of the line a point lies on; `None` on the line itself.
    pub fn side_of(self, p: Point2) -> Option<Side> {
        let h = self.offset(p);
        if h > 0.0 {
            Some(Side::Plus)
        } else if h < 0.0 {
            Some(Side::Minus)
        } else {
            None
        }
    }
}

/// Branch tag for a point of the switching line. The corner is its own
/// variant so downstream code never has to guess which branch formula owns
/// coordinate zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// {x <= 0, y = 0}, parametrized by x.
    Left,
    /// {x >= 0, y = rho * x}, parametrized by x.
    Right,
    Origin,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Left => "left",
            Branch::Right => "right",
            Branch::Origin => "origin",
        }
    }
}

/// A point of the switching line, stored as branch tag plus the x coordinate
/// along that branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    branch: Branch,
    coord: f64,
}

impl LinePoint {
    pub fn new(branch: Branch, coord: f64) -> Result<LinePoint, SpecError> {
        if !coord.is_finite() {
            return Err(SpecError::NonFinite { name: "coord", value: coord });
        }
        let ok = match branch {
            Branch::Left => coord <= 0.0,
            Branch::Right => coord >= 0.0,
            Branch::Origin => coord == 0.0,
        };
        if !ok {
            return Err(SpecError::OffBranch { branch, coord });
        }
        Ok(LinePoint { branch, coord })
    }

    pub fn left(x: f64) -> Result<LinePoint, SpecError> {
        LinePoint::new(Branch::Left, x)
    }

    pub fn right(x: f64) -> Result<LinePoint, SpecError> {
        LinePoint::new(Branch::Right, x)
    }

    pub fn origin() -> LinePoint {
        LinePoint { branch: Branch::Origin, coord: 0.0 }
    }

    pub fn branch(self) -> Branch {
        self.branch
    }

    pub fn coord(self) -> f64 {
        self.coord
    }

    /// The planar point this tag+coordinate pair names.
    pub fn embed(self, line: SwitchingLine) -> Point2 {
        match self.branch {
            Branch::Left | Branch::Origin => Point2::new(self.coord, 0.0),
            Branch::Right => Point2::new(self.coord, line.rho() * self.coord),
        }
    }
}

/// The power-law jump applied at each crossing of the switching line.
///
/// On the left branch: x -> -a * |x|^r. On the right branch: x -> b * x^s.
/// The origin is fixed. All four parameters are strictly positive, so both
/// branch maps are strictly monotone bijections of their branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMap {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub s: f64,
}

impl JumpMap {
    pub fn new(a: f64, b: f64, r: f64, s: f64) -> Result<JumpMap, SpecError> {
        for (name, value) in [("a", a), ("b", b), ("r", r), ("s", s)] {
            if !value.is_finite() {
                return Err(SpecError::NonFinite { name: "jump parameter", value });
            }
            if value <= 0.0 {
                return Err(SpecError::NonPositiveJump { name, value });
            }
        }
        Ok(JumpMap { a, b, r, s })
    }

    pub fn identity() -> JumpMap {
        JumpMap { a: 1.0, b: 1.0, r: 1.0, s: 1.0 }
    }

    pub fn is_identity(self) -> bool {
        self.a == 1.0 && self.b == 1.0 && self.r == 1.0 && self.s == 1.0
    }

    /// Apply the jump. Keeps each point on its own branch.
    pub fn apply(self, p: LinePoint) -> LinePoint {
        match p.branch() {
            Branch::Left => {
                let image = -self.a * p.coord().abs().powf(self.r);
                LinePoint { branch: Branch::Left, coord: image }
            }
            Branch::Right => {
                let image = self.b * p.coord().powf(self.s);
                LinePoint { branch: Branch::Right, coord: image }
            }
            Branch::Origin => p,
        }
    }

    /// Inverse of [`apply`](Self::apply) on each branch.
    pub fn invert(self, p: LinePoint) -> LinePoint {
        match p.branch() {
            Branch::Left => {
                let pre = -(p.coord().abs() / self.a).powf(1.0 / self.r);
                LinePoint { branch: Branch::Left, coord: pre }
            }
            Branch::Right => {
                let pre = (p.coord() / self.b).powf(1.0 / self.s);
                LinePoint { branch: Branch::Right, coord: pre }
            }
            Branch::Origin => p,
        }
    }
}

/// A 2x2 matrix checked to be Hurwitz (trace < 0, det > 0) at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzMatrix {
    m: Matrix2,
}

impl HurwitzMatrix {
    pub fn new(m: Matrix2, side: Side) -> Result<HurwitzMatrix, SpecError> {
        if !m.is_finite() {
            return Err(SpecError::NonFinite { name: "matrix entry", value: f64::NAN });
        }
        if !(m.trace() < 0.0) || !(m.det() > 0.0) {
            return Err(SpecError::NonHurwitz { side, trace: m.trace(), det: m.det() });
        }
        Ok(HurwitzMatrix { m })
    }

    pub fn from_rows(row1: [f64; 2], row2: [f64; 2], side: Side) -> Result<HurwitzMatrix, SpecError> {
        HurwitzMatrix::new(Matrix2::new(row1[0], row1[1], row2[0], row2[1]), side)
    }

    /// Companion matrix [[sigma, delta], [1, 0]]; Hurwitz iff sigma < 0 and
    /// delta < 0.
    pub fn companion(sigma: f64, delta: f64, side: Side) -> Result<HurwitzMatrix, SpecError> {
        HurwitzMatrix::new(Matrix2::new(sigma, delta, 1.0, 0.0), side)
    }

    pub fn matrix(self) -> Matrix2 {
        self.m
    }

    pub fn trace(self) -> f64 {
        self.m.trace()
    }

    pub fn det(self) -> f64 {
        self.m.det()
    }

    pub fn apply(self, p: Point2) -> Point2 {
        self.m.apply(p)
    }
}

/// Full description of one hybrid system: the two fields, the line, the jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridSystemSpec {
    pub b_plus: HurwitzMatrix,
    pub b_minus: HurwitzMatrix,
    pub line: SwitchingLine,
    pub jump: JumpMap,
}

impl HybridSystemSpec {
    pub fn new(
        b_plus: HurwitzMatrix,
        b_minus: HurwitzMatrix,
        line: SwitchingLine,
        jump: JumpMap,
    ) -> HybridSystemSpec {
        HybridSystemSpec { b_plus, b_minus, line, jump }
    }

    pub fn field(&self, side: Side) -> HurwitzMatrix {
        match side {
            Side::Plus => self.b_plus,
            Side::Minus => self.b_minus,
        }
    }

    pub fn rho(&self) -> f64 {
        self.line.rho()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn left(x: f64) -> LinePoint {
        LinePoint::left(x).unwrap()
    }

    fn right(x: f64) -> LinePoint {
        LinePoint::right(x).unwrap()
    }

    #[test]
    fn offset_on_each_branch() {
        let line = SwitchingLine::new(1.0).unwrap();
        assert_eq!(line.offset(Point2::new(-2.0, 0.0)), 0.0);
        assert_eq!(line.offset(Point2::new(2.0, 1.0)), -1.0);
        assert_eq!(line.offset(Point2::new(2.0, 2.0)), 0.0);
        assert_eq!(line.offset(Point2::new(-3.0, 0.5)), 0.5);
        // Continuity across x = 0: both pieces give y there.
        assert_eq!(line.offset(Point2::new(0.0, 0.7)), 0.7);
    }

    #[test]
    fn gradient_matches_branch() {
        let line = SwitchingLine::new(2.0).unwrap();
        assert_eq!(line.gradient(Point2::new(-1.0, 0.0)), Point2::new(0.0, 1.0));
        assert_eq!(line.gradient(Point2::new(1.0, 2.0)), Point2::new(-2.0, 1.0));
    }

    #[test]
    fn line_rejects_bad_slope() {
        assert!(matches!(SwitchingLine::new(-0.1), Err(SpecError::NegativeSlope { .. })));
        assert!(matches!(SwitchingLine::new(f64::NAN), Err(SpecError::NonFinite { .. })));
    }

    #[test]
    fn line_points_validate_branch_sign() {
        assert!(LinePoint::left(1.0).is_err());
        assert!(LinePoint::right(-1.0).is_err());
        assert!(LinePoint::left(0.0).is_ok());
        assert!(LinePoint::right(0.0).is_ok());
    }

    #[test]
    fn embed_uses_branch_formula() {
        let line = SwitchingLine::new(0.5).unwrap();
        assert_eq!(left(-2.0).embed(line), Point2::new(-2.0, 0.0));
        assert_eq!(right(2.0).embed(line), Point2::new(2.0, 1.0));
        assert_eq!(LinePoint::origin().embed(line), Point2::new(0.0, 0.0));
    }

    #[test]
    fn jump_cubes_left_coordinate() {
        let jump = JumpMap::new(1.0, 1.0, 3.0, 1.0).unwrap();
        let image = jump.apply(left(-2.0));
        assert_eq!(image.branch(), Branch::Left);
        assert_eq!(image.coord(), -8.0);
    }

    #[test]
    fn jump_scales_right_coordinate() {
        let jump = JumpMap::new(1.0, 2.0, 1.0, 2.0).unwrap();
        let image = jump.apply(right(2.0));
        assert_eq!(image.branch(), Branch::Right);
        assert_eq!(image.coord(), 8.0);
    }

    #[test]
    fn jump_fixes_origin() {
        let jump = JumpMap::new(3.0, 0.5, 2.0, 0.25).unwrap();
        assert_eq!(jump.apply(LinePoint::origin()), LinePoint::origin());
        assert_eq!(jump.invert(LinePoint::origin()), LinePoint::origin());
    }

    #[test]
    fn invert_undoes_apply() {
        let jump = JumpMap::new(2.0, 0.5, 3.0, 0.7).unwrap();
        for p in [left(-0.3), left(-5.0), right(0.2), right(4.0)] {
            let round = jump.invert(jump.apply(p));
            assert_eq!(round.branch(), p.branch());
            assert!((round.coord() - p.coord()).abs() <= 1e-12 * p.coord().abs().max(1.0));
        }
    }

    #[test]
    fn identity_exactly_when_all_parameters_one() {
        assert!(JumpMap::identity().is_identity());
        assert!(!JumpMap::new(1.0, 1.0, 1.0, 1.0 + 1e-15).unwrap().is_identity());
        assert!(!JumpMap::new(2.0, 1.0, 1.0, 1.0).unwrap().is_identity());
    }

    #[test]
    fn jump_rejects_nonpositive_parameters() {
        assert!(JumpMap::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(JumpMap::new(1.0, -2.0, 1.0, 1.0).is_err());
        assert!(JumpMap::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(JumpMap::new(1.0, 1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn hurwitz_check_rejects_bad_matrices() {
        // trace = 0
        assert!(HurwitzMatrix::from_rows([0.0, 1.0], [-1.0, 0.0], Side::Plus).is_err());
        // det < 0 (saddle)
        assert!(HurwitzMatrix::from_rows([-1.0, 0.0], [0.0, 1.0], Side::Plus).is_err());
        // good focus
        assert!(HurwitzMatrix::from_rows([-1.0, 1.0], [-2.0, -1.0], Side::Plus).is_ok());
    }

    #[test]
    fn matrix_inverse_round_trips() {
        let m = Matrix2::new(1.0, 2.0, 3.0, 4.0);
        let inv = m.inverse().unwrap();
        let id = m.mul(inv);
        assert!(id.sub(Matrix2::identity()).max_norm() < 1e-14);
        assert!(Matrix2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn jump_strategy() -> impl Strategy<Value = JumpMap> {
        (0.1f64..10.0, 0.1f64..10.0, 0.25f64..4.0, 0.25f64..4.0)
            .prop_map(|(a, b, r, s)| JumpMap::new(a, b, r, s).unwrap())
    }

    proptest! {
        // Round trip through apply/invert stays on the branch and returns the
        // coordinate to 1e-12 relative.
        #[test]
        fn jump_round_trip(jump in jump_strategy(), mag in 1e-3f64..1e3, flip in any::<bool>()) {
            let p = if flip {
                LinePoint::left(-mag).unwrap()
            } else {
                LinePoint::right(mag).unwrap()
            };
            let round = jump.invert(jump.apply(p));
            prop_assert_eq!(round.branch(), p.branch());
            prop_assert!((round.coord() - p.coord()).abs() <= 1e-12 * mag.max(1.0));
            let round2 = jump.apply(jump.invert(p));
            prop_assert_eq!(round2.branch(), p.branch());
            prop_assert!((round2.coord() - p.coord()).abs() <= 1e-12 * mag.max(1.0));
        }

        // Both branch maps are strictly monotone in the coordinate.
        #[test]
        fn jump_is_monotone(jump in jump_strategy(), lo in 1e-3f64..1e3, gap in 1e-3f64..10.0) {
            let hi = lo + gap;
            let l = jump.apply(LinePoint::right(lo).unwrap()).coord();
            let h = jump.apply(LinePoint::right(hi).unwrap()).coord();
            prop_assert!(l < h);
            // Left branch: more negative input stays more negative.
            let l2 = jump.apply(LinePoint::left(-lo).unwrap()).coord();
            let h2 = jump.apply(LinePoint::left(-hi).unwrap()).coord();
            prop_assert!(h2 < l2);
        }

        #[test]
        fn offset_zero_exactly_on_line(rho in 0.0f64..10.0, x in -1e3f64..1e3) {
            let line = SwitchingLine::new(rho).unwrap();
            let p = if x <= 0.0 {
                Point2::new(x, 0.0)
            } else {
                Point2::new(x, rho * x)
            };
            prop_assert_eq!(line.offset(p), 0.0);
        }
    }
}
