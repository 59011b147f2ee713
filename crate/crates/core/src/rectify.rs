//! Ellipse-to-circle rectification and radius-based scoring.
//!
//! [`ellipse_to_circle`] is the affine stretch along the minor axis. It
//! makes the outer boundary circular but leaves the foreshortening of a
//! tilted face in place, so ring centers drift away from the outer center.
//! [`RectifiedTarget::projective`] first moves the polar line of the target
//! center (the vanishing line of the face plane when the outer boundary is
//! the image of a circle) to infinity, which puts the outer conic's center
//! at the target center, then applies the affine stretch.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::ellipse::{Ellipse, EllipseError};
use crate::target::{RingConfig, TargetModel};
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RectifyError {
    #[error("point maps to infinity")]
    AtInfinity,
    #[error("transform is singular")]
    Singular,
    #[error("target has no rings")]
    NoRings,
    #[error("ring configuration: {0}")]
    BadRings(String),
    #[error(transparent)]
    Ellipse(#[from] EllipseError),
}

/// A 3×3 matrix acting on homogeneous points `(x, y, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTransform {
    pub m: Matrix3<f64>,
}

impl PlanarTransform {
    pub fn new(m: Matrix3<f64>) -> Result<Self, RectifyError> {
        if !(m.determinant().abs() > 1e-12) {
            return Err(RectifyError::Singular);
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            m: Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0),
        }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            m: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Self {
            m: Matrix3::new(sx, 0.0, 0.0, 0.0, sy, 0.0, 0.0, 0.0, 1.0),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn then_after(&self, other: &PlanarTransform) -> PlanarTransform {
        PlanarTransform {
            m: self.m * other.m,
        }
    }

    pub fn inverse(&self) -> Result<PlanarTransform, RectifyError> {
        self.m
            .try_inverse()
            .map(|m| PlanarTransform { m })
            .ok_or(RectifyError::Singular)
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn from_rows(r: [[f64; 3]; 3]) -> Result<Self, RectifyError> {
        Self::new(Matrix3::new(
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
        ))
    }
}

/// Homogeneous multiply and dehomogenize.
pub fn apply_transform(t: &PlanarTransform, p: Point) -> Result<Point, RectifyError> {
    let v = t.m * Vector3::new(p.0, p.1, 1.0);
    if v.z.abs() < 1e-12 {
        return Err(RectifyError::AtInfinity);
    }
    Ok((v.x / v.z, v.y / v.z))
}

/// Affine map fixing the center and the major-axis endpoints and stretching
/// the minor axis by `a/b`, so that `e` lands on the circle of radius `a`.
pub fn ellipse_to_circle(e: &Ellipse) -> PlanarTransform {
    let to_origin = PlanarTransform::translation(-e.cx, -e.cy);
    let back = PlanarTransform::translation(e.cx, e.cy);
    let stretch = PlanarTransform::scale(1.0, e.a / e.b);
    back.then_after(&PlanarTransform::rotation(e.theta))
        .then_after(&stretch)
        .then_after(&PlanarTransform::rotation(-e.theta))
        .then_after(&to_origin)
}

/// Transform taking `outer` to a circle centered on `center`, together with
/// that circle's radius. `center` must lie inside `outer`.
pub fn center_rectification(
    outer: &Ellipse,
    center: Point,
) -> Result<(PlanarTransform, f64), RectifyError> {
    let to_center = PlanarTransform::translation(center.0, center.1);
    let q = outer.conic_matrix();
    // Conic in coordinates centered on `center`.
    let qc = to_center.m.transpose() * q * to_center.m;
    let w = qc[(2, 2)];
    if !(w < 0.0) {
        return Err(RectifyError::BadRings(
            "center lies outside the outer ring".into(),
        ));
    }
    // Polar line of the origin, scaled so it evaluates to 1 there.
    let (l1, l2) = (qc[(2, 0)] / w, qc[(2, 1)] / w);
    let h = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, l1, l2, 1.0);
    let h_inv = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, -l1, -l2, 1.0);
    let q2 = h_inv.transpose() * qc * h_inv;
    let e = Ellipse::from_conic([
        q2[(0, 0)],
        2.0 * q2[(0, 1)],
        q2[(1, 1)],
        2.0 * q2[(0, 2)],
        2.0 * q2[(1, 2)],
        q2[(2, 2)],
    ])?;
    // `e` is centered on the origin up to rounding; pin it there.
    let e = Ellipse {
        cx: 0.0,
        cy: 0.0,
        ..e
    };
    let stretch = ellipse_to_circle(&e);
    let full = to_center
        .then_after(&stretch)
        .then_after(&PlanarTransform { m: h })
        .then_after(&PlanarTransform::translation(-center.0, -center.1));
    Ok((PlanarTransform::new(full.m)?, e.a))
}

/// A target reduced to a transform, a center and concentric ring radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RectifiedTarget {
    pub transform: PlanarTransform,
    pub center: Point,
    /// Strictly increasing (innermost first).
    pub radii: Vec<f64>,
    /// Parallel to `radii`.
    pub values: Vec<u32>,
}

/// Innermost-first radii and values, scaled so the detected outer ring has
/// `outer_radius`.
fn scaled_rings(
    target: &TargetModel,
    rings: &RingConfig,
    outer_radius: f64,
) -> Result<(Vec<f64>, Vec<u32>), RectifyError> {
    rings.validate().map_err(RectifyError::BadRings)?;
    let outer = target.rings.first().ok_or(RectifyError::NoRings)?;
    let k = rings
        .values
        .iter()
        .position(|&v| v == outer.score)
        .ok_or_else(|| {
            RectifyError::BadRings(format!("score {} not in ring config", outer.score))
        })?;
    let unit = outer_radius / rings.radii_ratios[k];
    let radii = rings.radii_ratios.iter().rev().map(|r| r * unit).collect();
    let values = rings.values.iter().rev().copied().collect();
    Ok((radii, values))
}

impl RectifiedTarget {
    /// Affine rectification of the outermost ring, measured from its center.
    pub fn affine(target: &TargetModel, rings: &RingConfig) -> Result<Self, RectifyError> {
        let outer = target.rings.first().ok_or(RectifyError::NoRings)?.boundary;
        let (radii, values) = scaled_rings(target, rings, outer.a)?;
        Ok(Self {
            transform: ellipse_to_circle(&outer),
            center: outer.center(),
            radii,
            values,
        })
    }

    /// Projective rectification about the target's hint center.
    pub fn projective(target: &TargetModel, rings: &RingConfig) -> Result<Self, RectifyError> {
        let outer = target.rings.first().ok_or(RectifyError::NoRings)?.boundary;
        let (transform, radius) = center_rectification(&outer, target.center)?;
        let (radii, values) = scaled_rings(target, rings, radius)?;
        Ok(Self {
            transform,
            center: apply_transform(&transform, target.center)?,
            radii,
            values,
        })
    }
}

/// Maps `p` through the transform and buckets its distance from the center
/// by ring radius, boundaries going to the inner ring; 0 beyond the last.
pub fn score_point_rectified(target: &RectifiedTarget, p: Point) -> u32 {
    let Ok(q) = apply_transform(&target.transform, p) else {
        return 0;
    };
    let d = (q.0 - target.center.0).hypot(q.1 - target.center.1);
    target
        .radii
        .iter()
        .position(|&r| d <= r)
        .map_or(0, |i| target.values[i])
}
