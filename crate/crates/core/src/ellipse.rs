//! Ellipse geometry: direct least-squares fitting, containment,
//! rasterization and axis growth.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::BitMask;
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipseError {
    #[error("ellipse fit needs at least 5 points, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate point set: {0}")]
    Degenerate(&'static str),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Ellipse with center, semi-axes `a >= b > 0` and major-axis rotation
/// `theta ∈ [0, π)` measured from +x toward +y (clockwise on screen).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly π.
    if t >= PI {
        0.0
    } else {
        t
    }
}

impl Ellipse {
    /// Builds an ellipse from any two positive semi-axes, swapping them (and
    /// rotating by π/2) when needed so that `a >= b`.
    pub fn new(center: Point, semi_1: f64, semi_2: f64, theta: f64) -> Result<Self, EllipseError> {
        if !(semi_1 > 0.0 && semi_2 > 0.0) || !semi_1.is_finite() || !semi_2.is_finite() {
            return Err(EllipseError::BadParameter(format!(
                "semi-axes must be positive and finite, got {semi_1}, {semi_2}"
            )));
        }
        let (a, b, theta) = if semi_1 >= semi_2 {
            (semi_1, semi_2, theta)
        } else {
            (semi_2, semi_1, theta + PI / 2.0)
        };
        Ok(Self {
            cx: center.0,
            cy: center.1,
            a,
            b,
            theta: normalize_angle(theta),
        })
    }

    pub fn circle(center: Point, r: f64) -> Self {
        Self::new(center, r, r, 0.0).expect("positive radius")
    }

    pub fn center(&self) -> Point {
        (self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        PI * self.a * self.b
    }

    /// Normalized radial coordinate: `< 1` inside, `1` on the boundary.
    pub fn level(&self, p: Point) -> f64 {
        let (dx, dy) = (p.0 - self.cx, p.1 - self.cy);
        let (s, c) = self.theta.sin_cos();
        let u = (dx * c + dy * s) / self.a;
        let v = (-dx * s + dy * c) / self.b;
        u * u + v * v
    }

    /// Axis-aligned half extents of the bounding box.
    pub fn half_extents(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (
            ((self.a * c).powi(2) + (self.b * s).powi(2)).sqrt(),
            ((self.a * s).powi(2) + (self.b * c).powi(2)).sqrt(),
        )
    }

    /// Coefficients `[A, B, C, D, E, F]` of `Ax² + Bxy + Cy² + Dx + Ey + F = 0`,
    /// scaled so that points inside evaluate negative.
    pub fn conic(&self) -> [f64; 6] {
        let (s, c) = self.theta.sin_cos();
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let aa = c * c / a2 + s * s / b2;
        let bb = 2.0 * c * s * (1.0 / a2 - 1.0 / b2);
        let cc = s * s / a2 + c * c / b2;
        let (x0, y0) = (self.cx, self.cy);
        let dd = -2.0 * aa * x0 - bb * y0;
        let ee = -bb * x0 - 2.0 * cc * y0;
        let ff = aa * x0 * x0 + bb * x0 * y0 + cc * y0 * y0 - 1.0;
        [aa, bb, cc, dd, ee, ff]
    }

    /// Symmetric 3×3 matrix `Q` with `pᵀ Q p = 0` on the boundary
    /// (homogeneous `p = (x, y, 1)`).
    pub fn conic_matrix(&self) -> Matrix3<f64> {
        let [a, b, c, d, e, f] = self.conic();
        Matrix3::new(
            a,
            b / 2.0,
            d / 2.0,
            b / 2.0,
            c,
            e / 2.0,
            d / 2.0,
            e / 2.0,
            f,
        )
    }

    /// Converts general conic coefficients to geometric form. Fails unless
    /// the conic is a real ellipse.
    pub fn from_conic(coeffs: [f64; 6]) -> Result<Self, EllipseError> {
        let [mut a, mut b, mut c, mut d, mut e, mut f] = coeffs;
        let disc = b * b - 4.0 * a * c;
        if !(disc < 0.0) {
            return Err(EllipseError::Degenerate("conic is not an ellipse"));
        }
        if a < 0.0 {
            for v in [&mut a, &mut b, &mut c, &mut d, &mut e, &mut f] {
                *v = -*v;
            }
        }
        let x0 = (2.0 * c * d - b * e) / disc;
        let y0 = (2.0 * a * e - b * d) / disc;
        let f0 = a * x0 * x0 + b * x0 * y0 + c * y0 * y0 + d * x0 + e * y0 + f;
        if !(f0 < 0.0) {
            return Err(EllipseError::Degenerate("imaginary or point ellipse"));
        }
        let mean = (a + c) / 2.0;
        let rad = (((a - c) / 2.0).powi(2) + (b / 2.0).powi(2)).sqrt();
        let (lo, hi) = (mean - rad, mean + rad);
        if !(lo > 0.0) {
            return Err(EllipseError::Degenerate("non-positive conic eigenvalue"));
        }
        // Direction of the eigenvector for `hi` is the minor axis.
        let minor_dir = 0.5 * b.atan2(a - c);
        let semi_major = (-f0 / lo).sqrt();
        let semi_minor = (-f0 / hi).sqrt();
        if !semi_major.is_finite() || !semi_minor.is_finite() {
            return Err(EllipseError::Degenerate("non-finite axes"));
        }
        Self::new((x0, y0), semi_major, semi_minor, minor_dir + PI / 2.0)
    }
}

/// Direct least-squares ellipse fit with the constraint `4AC − B² = 1`,
/// solved through the reduced 3×3 eigenproblem. Points are centered and
/// scaled to unit RMS radius before solving.
pub fn fit_ellipse(points: &[Point]) -> Result<Ellipse, EllipseError> {
    let n = points.len();
    if n < 5 {
        return Err(EllipseError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let rms = (points
        .iter()
        .map(|p| (p.0 - mx).powi(2) + (p.1 - my).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    if !(rms > 0.0) || !rms.is_finite() {
        return Err(EllipseError::Degenerate("all points coincide"));
    }

    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for p in points {
        let (u, v) = ((p.0 - mx) / rms, (p.1 - my) / rms);
        let quad = Vector3::new(u * u, u * v, v * v);
        let lin = Vector3::new(u, v, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }
    // S3 is singular exactly when the points are collinear.
    let s3_inv = s3
        .try_inverse()
        .filter(|_| s3.determinant().abs() > 1e-12 * nf.powi(3))
        .ok_or(EllipseError::Degenerate("collinear points"))?;
    let t = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * t;
    // Premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]].
    let m = Matrix3::from_rows(&[reduced.row(2) / 2.0, -reduced.row(1), reduced.row(0) / 2.0]);

    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in m.complex_eigenvalues().iter() {
        if lambda.im.abs() > 1e-9 * (1.0 + lambda.re.abs()) {
            continue;
        }
        let shifted = m - Matrix3::identity() * lambda.re;
        let svd = shifted.svd(false, true);
        let Some(v_t) = svd.v_t else { continue };
        let (idx, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
                );
        let v: Vector3<f64> = v_t.row(idx).transpose();
        let constraint = 4.0 * v[0] * v[2] - v[1] * v[1];
        if constraint > 0.0 {
            let cost = (v.transpose() * reduced * v)[0] / constraint;
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, v));
            }
        }
    }
    let (_, quad) = best.ok_or(EllipseError::Degenerate("no elliptical solution"))?;
    let lin = t * quad;
    let local = Ellipse::from_conic([quad[0], quad[1], quad[2], lin[0], lin[1], lin[2]])?;
    Ellipse::new(
        (mx + rms * local.cx, my + rms * local.cy),
        rms * local.a,
        rms * local.b,
        local.theta,
    )
}

/// Inclusive containment; points on the boundary are inside.
pub fn point_in_ellipse(e: &Ellipse, p: Point) -> bool {
    // Tolerance absorbs rounding for points constructed exactly on the curve.
    e.level(p) <= 1.0 + 1e-12
}

/// Rasterizes `e`, sampling each pixel at its center.
pub fn ellipse_mask(e: &Ellipse, width: usize, height: usize) -> BitMask {
    let mut mask = BitMask::new(width, height);
    let (hx, hy) = e.half_extents();
    let x0 = ((e.cx - hx - 1.0).floor().max(0.0)) as usize;
    let y0 = ((e.cy - hy - 1.0).floor().max(0.0)) as usize;
    let x1 = (e.cx + hx + 1.0).ceil().min(width as f64);
    let y1 = (e.cy + hy + 1.0).ceil().min(height as f64);
    if x1 <= 0.0 || y1 <= 0.0 {
        return mask;
    }
    let (x1, y1) = (x1 as usize, y1 as usize);
    for y in y0..y1 {
        for x in x0..x1 {
            if point_in_ellipse(e, (x as f64 + 0.5, y as f64 + 0.5)) {
                mask.set(x, y, true);
            }
        }
    }
    mask
}

/// Grows the full width and height by `d` pixels each (semi-axes by `d/2`).
pub fn expand(e: &Ellipse, d: f64) -> Result<Ellipse, EllipseError> {
    let (a, b) = (e.a + d / 2.0, e.b + d / 2.0);
    if !(b > 0.0) {
        return Err(EllipseError::BadParameter(format!(
            "expanding by {d} leaves a non-positive semi-axis"
        )));
    }
    Ok(Ellipse { a, b, ..*e })
}

/// Endpoints of the major axis and of the minor axis.
pub fn axis_endpoints(e: &Ellipse) -> ([Point; 2], [Point; 2]) {
    let (s, c) = e.theta.sin_cos();
    let major = [
        (e.cx + e.a * c, e.cy + e.a * s),
        (e.cx - e.a * c, e.cy - e.a * s),
    ];
    let minor = [
        (e.cx - e.b * s, e.cy + e.b * c),
        (e.cx + e.b * s, e.cy - e.b * c),
    ];
    (major, minor)
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Samples the boundary parametrically.
    pub fn sample(e: &Ellipse, ts: impl IntoIterator<Item = f64>) -> Vec<Point> {
        let (s, c) = e.theta.sin_cos();
        ts.into_iter()
            .map(|t| {
                let (u, v) = (e.a * t.cos(), e.b * t.sin());
                (e.cx + u * c - v * s, e.cy + u * s + v * c)
            })
            .collect()
    }

    pub fn even(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| k as f64 / n as f64 * std::f64::consts::TAU)
    }
}
