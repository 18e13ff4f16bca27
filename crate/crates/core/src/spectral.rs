//! Eigenvalue classification of a companion field and the sector decomposition
//! its invariant rays cut out of a half-plane.

use crate::model::{Point2, SpecError};

/// Relative guard around a vanishing discriminant. Classification labels use
/// a fairly wide band so that reported kinds are stable under small input
/// perturbations; exact arc computations elsewhere use their own, tighter
/// guard.
fn disc_tolerance(sigma: f64) -> f64 {
    1e-9 * (sigma * sigma).max(1.0)
}

/// Eigenstructure of the companion matrix [[sigma, delta], [1, 0]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralKind {
    /// Two distinct real eigenvalues r1 > r2 (both negative here); the
    /// invariant rays have directions (r1, 1) and (r2, 1).
    Node { r1: f64, r2: f64 },
    /// A double real eigenvalue with a single invariant ray along (r, 1).
    ImproperNode { r: f64 },
    /// Complex pair lambda +/- i mu, mu > 0; no invariant rays.
    Focus { lambda: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub sigma: f64,
    pub delta: f64,
    /// sigma^2 + 4 delta, the discriminant of x^2 - sigma x - delta.
    pub disc: f64,
    pub kind: SpectralKind,
}

/// Classify the companion field with trace `sigma` and -det `delta`. Both
/// must be negative: that is exactly the Hurwitz condition in these
/// coordinates.
pub fn classify(sigma: f64, delta: f64) -> Result<SpectralData, SpecError> {
    if !(sigma < 0.0 && delta < 0.0) || !sigma.is_finite() || !delta.is_finite() {
        return Err(SpecError::BadSpectralInput { sigma, delta });
    }
    let disc = sigma * sigma + 4.0 * delta;
    let tol = disc_tolerance(sigma);
    let kind = if disc > tol {
        let root = disc.sqrt();
        SpectralKind::Node {
            r1: (sigma + root) / 2.0,
            r2: (sigma - root) / 2.0,
        }
    } else if disc < -tol {
        SpectralKind::Focus {
            lambda: sigma / 2.0,
            mu: (-disc).sqrt() / 2.0,
        }
    } else {
        SpectralKind::ImproperNode { r: sigma / 2.0 }
    };
    Ok(SpectralData { sigma, delta, disc, kind })
}

/// Position of a point relative to the invariant rays of a companion field.
///
/// For a node the plane splits along the lines {x = r1 y} (slow) and
/// {x = r2 y} (fast): `Sector1` is {x > r1 y}, `Sector2` sits between the
/// lines, `Sector3` is {x < r2 y}. An improper node has a single line
/// {x = r y}, splitting into `Sector1` ({x > r y}) and `Sector3`; a focus has
/// no invariant line at all and the whole plane is one region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Sector1,
    SlowRay,
    Sector2,
    FastRay,
    Sector3,
    EigenRay,
    Whole,
}

fn ray_side(p: Point2, slope: f64) -> std::cmp::Ordering {
    // Compares x with slope * y, with a relative dead band that maps to the
    // ray label itself.
    let lhs = p.x;
    let rhs = slope * p.y;
    let tol = 1e-12 * lhs.abs().max(rhs.abs()).max(1.0);
    if lhs - rhs > tol {
        std::cmp::Ordering::Greater
    } else if rhs - lhs > tol {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Which region of the given field's sector decomposition `p` falls in.
///
/// The decomposition is stated for the field's own upper half-plane; callers
/// classifying a point governed by the lower field should pass the centrally
/// reflected point (-x, -y), since the sectors are symmetric through the
/// origin while the half-plane of interest is not.
pub fn region_of(data: &SpectralData, p: Point2) -> Region {
    use std::cmp::Ordering::*;
    // Sectors are double cones: reflect into the upper half-plane so the
    // half-plane ray tests below see a canonical representative. Points on
    // the x-axis keep their sign; the axis tests are already symmetric-free
    // there (x > 0 lands in sector 1, x < 0 in sector 3).
    let q = if p.y < 0.0 { p.scale(-1.0) } else { p };
    match data.kind {
        SpectralKind::Focus { .. } => Region::Whole,
        SpectralKind::ImproperNode { r } => match ray_side(q, r) {
            Greater => Region::Sector1,
            Equal => Region::EigenRay,
            Less => Region::Sector3,
        },
        SpectralKind::Node { r1, r2 } => match ray_side(q, r1) {
            Greater => Region::Sector1,
            Equal => Region::SlowRay,
            Less => match ray_side(q, r2) {
                Greater => Region::Sector2,
                Equal => Region::FastRay,
                Less => Region::Sector3,
            },
        },
    }
}

/// What a single-field orbit started in a region of the upper half-plane does
/// before leaving that half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fate {
    /// Approaches the origin without meeting the switching line at positive
    /// time. Orbits in `Sector1` still meet the line backward; orbits between
    /// the rays never meet it in either direction.
    ConvergesToOrigin,
    /// Meets the switching line at a finite positive time.
    HitsLineForward,
    /// Spiral orbit: meets the line at finite time both forward and backward.
    HitsLineBothWays,
}

pub fn predicted_fate(region: Region) -> Fate {
    match region {
        Region::Sector1 | Region::SlowRay | Region::Sector2 | Region::FastRay | Region::EigenRay => {
            Fate::ConvergesToOrigin
        }
        Region::Sector3 => Fate::HitsLineForward,
        Region::Whole => Fate::HitsLineBothWays,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hurwitz_input() {
        assert!(classify(0.0, -1.0).is_err());
        assert!(classify(-1.0, 0.0).is_err());
        assert!(classify(1.0, -1.0).is_err());
        assert!(classify(f64::NAN, -1.0).is_err());
    }

    #[test]
    fn focus_parameters() {
        // sigma = -2, delta = -2: disc = 4 - 8 = -4, lambda = -1, mu = 1.
        let data = classify(-2.0, -2.0).unwrap();
        assert_eq!(data.disc, -4.0);
        match data.kind {
            SpectralKind::Focus { lambda, mu } => {
                assert_eq!(lambda, -1.0);
                assert_eq!(mu, 1.0);
            }
            other => panic!("expected focus, got {other:?}"),
        }
    }

    #[test]
    fn node_orders_eigenvalues() {
        // sigma = -3, delta = -2: roots -1 and -2.
        let data = classify(-3.0, -2.0).unwrap();
        match data.kind {
            SpectralKind::Node { r1, r2 } => {
                assert!((r1 + 1.0).abs() < 1e-12);
                assert!((r2 + 2.0).abs() < 1e-12);
                assert!(r1 > r2);
            }
            other => panic!("expected node, got {other:?}"),
        }
    }

    #[test]
    fn double_root_snaps_to_improper_node() {
        // sigma = -2, delta = -1: disc = 0 exactly.
        let data = classify(-2.0, -1.0).unwrap();
        match data.kind {
            SpectralKind::ImproperNode { r } => assert_eq!(r, -1.0),
            other => panic!("expected improper node, got {other:?}"),
        }
        // Tiny perturbations inside the band keep the label.
        let nudged = classify(-2.0, -1.0 - 1e-12).unwrap();
        assert!(matches!(nudged.kind, SpectralKind::ImproperNode { .. }));
    }

    #[test]
    fn node_sectors_partition_upper_half_plane() {
        let data = classify(-3.0, -2.0).unwrap();
        // Eigenlines x = -y and x = -2y. In the upper half-plane y = 1:
        // sector 1 right of x = -1, sector 2 between -2 and -1, sector 3 left
        // of -2.
        assert_eq!(region_of(&data, Point2::new(2.0, 1.0)), Region::Sector1);
        assert_eq!(region_of(&data, Point2::new(-1.0, 1.0)), Region::SlowRay);
        assert_eq!(region_of(&data, Point2::new(-1.5, 1.0)), Region::Sector2);
        assert_eq!(region_of(&data, Point2::new(-2.0, 1.0)), Region::FastRay);
        assert_eq!(region_of(&data, Point2::new(-5.0, 1.0)), Region::Sector3);
        // The negative x-axis belongs to sector 3: those orbits must cross it.
        assert_eq!(region_of(&data, Point2::new(-1.0, 0.0)), Region::Sector3);
        // The positive x-axis sits in sector 1.
        assert_eq!(region_of(&data, Point2::new(1.0, 0.0)), Region::Sector1);
    }

    #[test]
    fn fates_follow_regions() {
        assert_eq!(predicted_fate(Region::Sector1), Fate::ConvergesToOrigin);
        assert_eq!(predicted_fate(Region::Sector2), Fate::ConvergesToOrigin);
        assert_eq!(predicted_fate(Region::Sector3), Fate::HitsLineForward);
        assert_eq!(predicted_fate(Region::Whole), Fate::HitsLineBothWays);
    }

    #[test]
    fn improper_node_has_single_ray() {
        let data = classify(-2.0, -1.0).unwrap();
        assert_eq!(region_of(&data, Point2::new(0.0, 1.0)), Region::Sector1);
        assert_eq!(region_of(&data, Point2::new(-1.0, 1.0)), Region::EigenRay);
        assert_eq!(region_of(&data, Point2::new(-3.0, 1.0)), Region::Sector3);
    }
}
