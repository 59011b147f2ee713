//! Synthetic target faces and arrows with analytic ground truth.
//!
//! Geometry is defined on the target plane in pixel units at the
//! fronto-parallel scale, with the face centered at `TargetSpec::center`.
//! A non-zero `tilt` rotates the plane about the horizontal axis through the
//! center and views it with a pinhole camera placed `3 × outer_radius` away;
//! the focal length equals that distance, so `tilt = 0` is the identity.
//!
//! Noise is reproducible: the per-frame seed initializes a ChaCha8 stream
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), consumed as pairs of 53-bit
//! uniforms `u = (next_u64 >> 11) · 2⁻⁵³`. Each pair feeds a Box–Muller
//! transform `√(−2 ln(1−u₁))·(cos 2πu₂, sin 2πu₂)` and the two normals are
//! used in order for consecutive channel values in raster order (R, G, B per
//! pixel). Values are `round(v + offset + σ·z)` clamped to `[0, 255]`.
//! Transcendentals come from `libm` so output does not depend on the
//! platform math library.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{luma, Rgb, RgbImage};
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("object does not fit in the {width}x{height} frame")]
    OutOfFrame { width: usize, height: usize },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [20, 20, 20];
pub const BLUE: Rgb = [90, 170, 240];
pub const RED: Rgb = [200, 20, 20];
pub const YELLOW: Rgb = [250, 220, 40];
pub const DARK_LINE: Rgb = [30, 30, 30];
pub const LIGHT_LINE: Rgb = [235, 235, 235];
pub const SHAFT_GREEN: Rgb = [0, 255, 0];

fn default_line_width() -> f64 {
    4.0
}

/// A painted target face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub center: Point,
    pub outer_radius: f64,
    /// Strictly increasing, last element 1.0 (innermost ring first).
    pub ring_radii_ratios: Vec<f64>,
    /// Annulus colors, parallel to `ring_radii_ratios`.
    pub ring_colors: Vec<Rgb>,
    #[serde(default = "default_background")]
    pub background: Rgb,
    #[serde(default)]
    pub tilt: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    /// Width of the painted divider between equally colored neighbors.
    #[serde(default = "default_line_width")]
    pub line_width: f64,
}

fn default_background() -> Rgb {
    WHITE
}

impl TargetSpec {
    /// Ten equally spaced rings colored white, white, black, black, blue,
    /// blue, red, red, yellow, yellow from the outside in.
    pub fn standard(center: Point, outer_radius: f64) -> Self {
        let outside_in = [
            WHITE, WHITE, BLACK, BLACK, BLUE, BLUE, RED, RED, YELLOW, YELLOW,
        ];
        Self {
            center,
            outer_radius,
            ring_radii_ratios: (1..=10).map(|k| k as f64 / 10.0).collect(),
            ring_colors: outside_in.iter().rev().copied().collect(),
            background: WHITE,
            tilt: 0.0,
            noise_sigma: 0.0,
            line_width: default_line_width(),
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let r = &self.ring_radii_ratios;
        if r.is_empty() || r.len() != self.ring_colors.len() {
            return Err(SynthError::InvalidSpec(
                "ratios and colors must be non-empty and parallel".into(),
            ));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) || !(r[0] > 0.0) || r[r.len() - 1] != 1.0 {
            return Err(SynthError::InvalidSpec(
                "ratios must increase strictly in (0, 1] and end at 1.0".into(),
            ));
        }
        if !(self.outer_radius > 0.0) || !(self.tilt.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(SynthError::InvalidSpec("bad radius or tilt".into()));
        }
        if !(self.noise_sigma >= 0.0) || !(self.line_width >= 0.0) {
            return Err(SynthError::InvalidSpec(
                "negative noise or line width".into(),
            ));
        }
        Ok(())
    }

    pub fn warp(&self) -> PlaneWarp {
        PlaneWarp {
            center: self.center,
            tilt: self.tilt,
            distance: 3.0 * self.outer_radius,
        }
    }

    /// Boundary radii in pixels, innermost first.
    pub fn boundary_radii(&self) -> Vec<f64> {
        self.ring_radii_ratios
            .iter()
            .map(|r| r * self.outer_radius)
            .collect()
    }

    /// Distance from a plane point to the nearest ring boundary.
    pub fn boundary_distance(&self, tip: Point) -> f64 {
        let d = dist(tip, self.center);
        self.boundary_radii()
            .iter()
            .map(|r| (d - r).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn needs_line(&self, i: usize) -> bool {
        let outer = self
            .ring_colors
            .get(i + 1)
            .copied()
            .unwrap_or(self.background);
        self.ring_colors[i] == outer
    }

    /// Color of the plane point at distance `r` from the center, or `None`
    /// outside the painted face.
    fn face_color(&self, q: Point) -> Option<Rgb> {
        let (u, v) = (q.0 - self.center.0, q.1 - self.center.1);
        let r = u.hypot(v);
        let half = self.line_width / 2.0;
        if r > self.outer_radius + half {
            return None;
        }
        let inner_radius = self.ring_radii_ratios[0] * self.outer_radius;
        let arm = 0.25 * inner_radius / std::f64::consts::SQRT_2;
        if u.abs() <= arm && v.abs() <= arm {
            let to_diag = ((u - v).abs()).min((u + v).abs()) / std::f64::consts::SQRT_2;
            if to_diag <= 1.0 {
                return Some(DARK_LINE);
            }
        }
        for (i, ratio) in self.ring_radii_ratios.iter().enumerate() {
            if self.needs_line(i) && (r - ratio * self.outer_radius).abs() <= half {
                let base = self.ring_colors[i];
                return Some(if luma(base[0], base[1], base[2]) > 128 {
                    DARK_LINE
                } else {
                    LIGHT_LINE
                });
            }
        }
        let idx = self
            .ring_radii_ratios
            .iter()
            .position(|ratio| r <= ratio * self.outer_radius)?;
        Some(self.ring_colors[idx])
    }
}

/// An arrow shaft lying on the target plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSpec {
    /// Center of the shaft's near end, in target-plane coordinates.
    pub true_tip: Point,
    /// Shaft direction from the tip, radians from straight down (+y);
    /// `π` points straight up.
    pub shaft_angle: f64,
    pub shaft_length: f64,
    pub shaft_width: f64,
    pub shaft_color: Rgb,
}

impl ShotSpec {
    pub fn new(true_tip: Point, shaft_angle: f64) -> Self {
        Self {
            true_tip,
            shaft_angle,
            shaft_length: 60.0,
            shaft_width: 3.0,
            shaft_color: SHAFT_GREEN,
        }
    }

    pub fn direction(&self) -> (f64, f64) {
        let (s, c) = self.shaft_angle.sin_cos();
        (s, c)
    }

    fn contains(&self, q: Point) -> bool {
        let (dx, dy) = self.direction();
        let (rx, ry) = (q.0 - self.true_tip.0, q.1 - self.true_tip.1);
        let along = rx * dx + ry * dy;
        let across = rx * dy - ry * dx;
        (0.0..=self.shaft_length).contains(&along) && across.abs() <= self.shaft_width / 2.0
    }

    fn corners(&self) -> [Point; 4] {
        let (dx, dy) = self.direction();
        let (nx, ny) = (dy, -dx);
        let h = self.shaft_width / 2.0;
        let (tx, ty) = self.true_tip;
        let (ex, ey) = (tx + dx * self.shaft_length, ty + dy * self.shaft_length);
        [
            (tx + nx * h, ty + ny * h),
            (tx - nx * h, ty - ny * h),
            (ex + nx * h, ey + ny * h),
            (ex - nx * h, ey - ny * h),
        ]
    }
}

/// Perspective view of the target plane tilted about its horizontal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWarp {
    pub center: Point,
    pub tilt: f64,
    pub distance: f64,
}

impl PlaneWarp {
    /// Plane point to image point.
    pub fn forward(&self, q: Point) -> Point {
        let (s, c) = self.tilt.sin_cos();
        let (u, v) = (q.0 - self.center.0, q.1 - self.center.1);
        let depth = self.distance + v * s;
        (
            self.center.0 + self.distance * u / depth,
            self.center.1 + self.distance * v * c / depth,
        )
    }

    /// Image point to plane point; `None` at or beyond the horizon.
    pub fn inverse(&self, p: Point) -> Option<Point> {
        let (s, c) = self.tilt.sin_cos();
        let (x, y) = (p.0 - self.center.0, p.1 - self.center.1);
        let den = self.distance * c - y * s;
        if den <= 1e-9 {
            return None;
        }
        let v = y * self.distance / den;
        let u = x * (self.distance + v * s) / self.distance;
        Some((self.center.0 + u, self.center.1 + v))
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Pixel bounding box `[x0, x1) × [y0, y1)` of warped plane points, padded
/// by `pad` and clipped to the frame. `None` when nothing is visible.
fn pixel_bbox(
    points: &[Point],
    pad: f64,
    w: usize,
    h: usize,
) -> Option<(usize, usize, usize, usize)> {
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        x0 = x0.min(p.0);
        y0 = y0.min(p.1);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    let (x0, y0) = ((x0 - pad).floor().max(0.0), (y0 - pad).floor().max(0.0));
    let (x1, y1) = (
        (x1 + pad).ceil().min(w as f64),
        (y1 + pad).ceil().min(h as f64),
    );
    if x0 >= x1 || y0 >= y1 {
        return None;
    }
    Some((x0 as usize, y0 as usize, x1 as usize, y1 as usize))
}

fn outline(spec: &TargetSpec, radius: f64) -> Vec<Point> {
    let warp = spec.warp();
    (0..256)
        .map(|k| {
            let t = k as f64 / 256.0 * std::f64::consts::TAU;
            warp.forward((
                spec.center.0 + radius * t.cos(),
                spec.center.1 + radius * t.sin(),
            ))
        })
        .collect()
}

/// Paints the face onto `image` without noise. Pixels outside the face are
/// left untouched, so several faces can share one canvas.
pub fn paint_target(image: &mut RgbImage, spec: &TargetSpec) -> Result<(), SynthError> {
    spec.validate()?;
    let (w, h) = (image.width(), image.height());
    let extent = spec.outer_radius + spec.line_width / 2.0;
    let ring = outline(spec, extent);
    let fits = ring
        .iter()
        .all(|p| p.0 >= 0.0 && p.1 >= 0.0 && p.0 <= w as f64 && p.1 <= h as f64);
    if !fits {
        return Err(SynthError::OutOfFrame {
            width: w,
            height: h,
        });
    }
    let (x0, y0, x1, y1) = pixel_bbox(&ring, 2.0, w, h).ok_or(SynthError::OutOfFrame {
        width: w,
        height: h,
    })?;
    let warp = spec.warp();
    for y in y0..y1 {
        for x in x0..x1 {
            let Some(q) = warp.inverse((x as f64 + 0.5, y as f64 + 0.5)) else {
                continue;
            };
            if let Some(color) = spec.face_color(q) {
                image.put(x, y, color);
            }
        }
    }
    Ok(())
}

/// Background, face and seeded noise (`spec.noise_sigma`).
pub fn render_target(
    spec: &TargetSpec,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<RgbImage, SynthError> {
    let mut image = RgbImage::filled(width, height, spec.background);
    paint_target(&mut image, spec)?;
    Ok(add_noise(&image, spec.noise_sigma, 0, seed))
}

/// Draws the shaft as a rectangle on the (warped) target plane.
pub fn render_shot(
    image: &RgbImage,
    spec: &TargetSpec,
    shot: &ShotSpec,
) -> Result<RgbImage, SynthError> {
    if !(shot.shaft_width >= 1.0 && shot.shaft_length >= 1.0) {
        return Err(SynthError::InvalidSpec(
            "shaft width and length must be >= 1".into(),
        ));
    }
    let (w, h) = (image.width(), image.height());
    let warp = spec.warp();
    let corners: Vec<Point> = shot.corners().iter().map(|&c| warp.forward(c)).collect();
    let (x0, y0, x1, y1) = pixel_bbox(&corners, 2.0, w, h).ok_or(SynthError::OutOfFrame {
        width: w,
        height: h,
    })?;
    let mut out = image.clone();
    let mut drawn = false;
    for y in y0..y1 {
        for x in x0..x1 {
            let Some(q) = warp.inverse((x as f64 + 0.5, y as f64 + 0.5)) else {
                continue;
            };
            if shot.contains(q) {
                out.put(x, y, shot.shaft_color);
                drawn = true;
            }
        }
    }
    if !drawn {
        return Err(SynthError::OutOfFrame {
            width: w,
            height: h,
        });
    }
    Ok(out)
}

/// Analytic score: the value of the smallest ring whose radius reaches the
/// tip (boundary counts inward), 0 outside the face. `ring_values` is
/// parallel to `spec.ring_radii_ratios`.
pub fn true_score(spec: &TargetSpec, tip: Point, ring_values: &[u32]) -> u32 {
    assert_eq!(
        ring_values.len(),
        spec.ring_radii_ratios.len(),
        "one value per ring"
    );
    let d = dist(tip, spec.center);
    spec.ring_radii_ratios
        .iter()
        .position(|r| d <= r * spec.outer_radius)
        .map_or(0, |i| ring_values[i])
}

/// Reproducible Gaussian noise source (ChaCha8 + Box–Muller).
pub struct NoiseSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NoiseSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }
}

/// Adds a uniform brightness `offset` and Gaussian noise of deviation
/// `sigma` to every channel. With `sigma = 0` and `offset = 0` the image is
/// returned unchanged.
pub fn add_noise(image: &RgbImage, sigma: f64, offset: i32, seed: u64) -> RgbImage {
    if sigma <= 0.0 && offset == 0 {
        return image.clone();
    }
    let mut src = NoiseSource::new(seed);
    let data = image
        .as_raw()
        .iter()
        .map(|&v| {
            let z = if sigma > 0.0 {
                sigma * src.normal()
            } else {
                0.0
            };
            (v as f64 + offset as f64 + z).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    RgbImage::from_raw(image.width(), image.height(), data).expect("dimensions preserved")
}
