//! Target and ring detection in a calibration frame.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ellipse::{ellipse_mask, expand, fit_ellipse, Ellipse, EllipseError};
use crate::imgproc::{
    bilateral_smooth, canny, default_bilateral_radius, gray_open, trace_contours, ImgprocError,
    StructuringElement,
};
use crate::raster::{to_gray, BitMask, RgbImage};
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TargetError {
    #[error("no target found near hint {hint_index}")]
    NoTargetFound { hint_index: usize },
    #[error("too few rings near hint {hint_index}")]
    TooFewRings { hint_index: usize },
    #[error("hint {hint_index} at ({x}, {y}) is outside the image")]
    BadHint { hint_index: usize, x: f64, y: f64 },
    #[error("no hints given")]
    NoHints,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Imgproc(#[from] ImgprocError),
    #[error(transparent)]
    Ellipse(#[from] EllipseError),
}

/// Ring point values and nominal radii, outermost first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    /// Strictly increasing from the outermost ring inward.
    pub values: Vec<u32>,
    /// Radius of each ring relative to the outermost, parallel to `values`.
    pub radii_ratios: Vec<f64>,
}

impl Default for RingConfig {
    fn default() -> Self {
        Self {
            values: (1..=10).collect(),
            radii_ratios: (1..=10).rev().map(|k| k as f64 / 10.0).collect(),
        }
    }
}

impl RingConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.values.is_empty() || self.values.len() != self.radii_ratios.len() {
            return Err("ring values and radii_ratios must be non-empty and parallel".into());
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err("ring values must strictly increase inward".into());
        }
        let r = &self.radii_ratios;
        if r.windows(2).any(|w| !(w[0] > w[1])) || !(r[r.len() - 1] > 0.0) || r[0] != 1.0 {
            return Err("radii_ratios must decrease strictly from 1.0 and stay positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionParams {
    pub canny_low: f64,
    pub canny_high: f64,
    pub sigma_space: f64,
    pub sigma_range: f64,
    pub center_gate: f64,
    pub mask_expand: f64,
    pub min_ring_fraction: f64,
    pub ring_merge_tol: f64,
    pub rings: RingConfig,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            canny_low: 50.0,
            canny_high: 150.0,
            sigma_space: 3.0,
            sigma_range: 25.0,
            center_gate: 100.0,
            mask_expand: 50.0,
            min_ring_fraction: 0.05,
            ring_merge_tol: 6.0,
            rings: RingConfig::default(),
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<(), TargetError> {
        let nonneg = [
            self.canny_low,
            self.canny_high,
            self.center_gate,
            self.mask_expand,
            self.min_ring_fraction,
            self.ring_merge_tol,
        ];
        if nonneg.iter().any(|v| !(*v >= 0.0)) {
            return Err(TargetError::BadParams(
                "pixel parameters must be >= 0".into(),
            ));
        }
        if self.canny_low > self.canny_high {
            return Err(TargetError::BadParams(
                "canny_low must not exceed canny_high".into(),
            ));
        }
        if !(self.sigma_space > 0.0 && self.sigma_range > 0.0) {
            return Err(TargetError::BadParams(
                "bilateral sigmas must be > 0".into(),
            ));
        }
        self.rings.validate().map_err(TargetError::BadParams)
    }
}

/// The user-supplied centers for one camera, one per target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationHint {
    pub camera_id: String,
    pub target_centers: Vec<Point>,
}

impl CalibrationHint {
    pub fn validate(&self, width: usize, height: usize) -> Result<(), TargetError> {
        if self.target_centers.is_empty() {
            return Err(TargetError::NoHints);
        }
        for (i, &(x, y)) in self.target_centers.iter().enumerate() {
            if !(x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64) {
                return Err(TargetError::BadHint {
                    hint_index: i,
                    x,
                    y,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingModel {
    pub boundary: Ellipse,
    pub score: u32,
}

/// A detected target: hint center, expanded outer mask and rings ordered by
/// decreasing area (outermost first).
#[derive(Debug, Clone, PartialEq)]
pub struct TargetModel {
    pub center: Point,
    pub outer: Ellipse,
    pub outer_mask: BitMask,
    pub rings: Vec<RingModel>,
}

impl TargetModel {
    /// Rebuilds a model from stored geometry; the outer mask is the
    /// rasterized `expand(rings[0], mask_expand)`.
    pub fn from_rings(
        center: Point,
        rings: Vec<RingModel>,
        mask_expand: f64,
        width: usize,
        height: usize,
    ) -> Result<Self, TargetError> {
        let largest = rings
            .first()
            .ok_or(TargetError::TooFewRings { hint_index: 0 })?;
        let outer = expand(&largest.boundary, mask_expand)?;
        Ok(Self {
            center,
            outer,
            outer_mask: ellipse_mask(&outer, width, height),
            rings,
        })
    }

    pub fn width(&self) -> usize {
        self.outer_mask.width()
    }

    pub fn height(&self) -> usize {
        self.outer_mask.height()
    }

    /// Rasterized interior of ring `i`.
    pub fn ring_mask(&self, i: usize) -> BitMask {
        ellipse_mask(&self.rings[i].boundary, self.width(), self.height())
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Ellipses fitted to every edge contour of the frame.
pub fn candidate_ellipses(
    image: &RgbImage,
    params: &DetectionParams,
) -> Result<Vec<Ellipse>, TargetError> {
    params.validate()?;
    let gray = to_gray(image);
    let smooth = bilateral_smooth(
        &gray,
        params.sigma_space,
        params.sigma_range,
        default_bilateral_radius(params.sigma_space),
    )?;
    // Noise removal as a 3×3 grayscale opening ahead of the edge detector; a
    // binary opening of the one-pixel-wide edge map would erase it.
    let cleaned = gray_open(&smooth, &StructuringElement::square(3));
    let edges = canny(&cleaned, params.canny_low, params.canny_high)?;
    Ok(trace_contours(&edges)
        .iter()
        .filter_map(|c| fit_ellipse(&c.centers()).ok())
        .filter(|e| e.a.is_finite() && e.b.is_finite())
        .collect())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Per-parameter median of a cluster. Angles are unwrapped against the first
/// member so that θ near 0 and near π average correctly.
fn representative(members: &[Ellipse]) -> Ellipse {
    use std::f64::consts::PI;
    let t0 = members[0].theta;
    let theta = median(
        members
            .iter()
            .map(|e| {
                let mut t = e.theta;
                while t - t0 > PI / 2.0 {
                    t -= PI;
                }
                while t0 - t > PI / 2.0 {
                    t += PI;
                }
                t
            })
            .collect(),
    );
    let e = Ellipse {
        cx: median(members.iter().map(|e| e.cx).collect()),
        cy: median(members.iter().map(|e| e.cy).collect()),
        a: median(members.iter().map(|e| e.a).collect()),
        b: median(members.iter().map(|e| e.b).collect()),
        theta,
    };
    Ellipse::new(e.center(), e.a, e.b, e.theta).unwrap_or(e)
}

/// Groups ellipses whose semi-majors chain within `tol` of each other.
fn cluster(mut ellipses: Vec<Ellipse>, tol: f64) -> Vec<Ellipse> {
    ellipses.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
    let mut out = Vec::new();
    let mut group: Vec<Ellipse> = Vec::new();
    for e in ellipses {
        if let Some(last) = group.last() {
            if e.a - last.a > tol {
                out.push(representative(&group));
                group.clear();
            }
        }
        group.push(e);
    }
    if !group.is_empty() {
        out.push(representative(&group));
    }
    out
}

/// Matches rings (outermost first) to configured values by radius ratio
/// against the outermost ring. When several rings match the same configured
/// ring the closest one is kept.
fn assign_values(rings: &[Ellipse], config: &RingConfig) -> Vec<RingModel> {
    let outer = (rings[0].a * rings[0].b).sqrt();
    let mut best: Vec<Option<(f64, Ellipse)>> = vec![None; config.values.len()];
    for e in rings {
        let ratio = (e.a * e.b).sqrt() / outer;
        let (idx, err) = config
            .radii_ratios
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (ratio - r).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty ring config");
        if best[idx].is_none_or(|(e0, _)| err < e0) {
            best[idx] = Some((err, *e));
        }
    }
    best.iter()
        .zip(&config.values)
        .filter_map(|(slot, &score)| slot.map(|(_, boundary)| RingModel { boundary, score }))
        .collect()
}

fn build_model(
    candidates: &[Ellipse],
    hint: Point,
    hint_index: usize,
    params: &DetectionParams,
    width: usize,
    height: usize,
) -> Result<TargetModel, TargetError> {
    if candidates.is_empty() {
        return Err(TargetError::NoTargetFound { hint_index });
    }
    let largest_b = candidates.iter().map(|e| e.b).fold(0.0, f64::max);
    let sized: Vec<Ellipse> = candidates
        .iter()
        .copied()
        .filter(|e| e.b >= params.min_ring_fraction * largest_b)
        .collect();
    let mut rings = cluster(sized, params.ring_merge_tol);
    rings.sort_by(|x, y| y.area().total_cmp(&x.area()));
    if rings.is_empty() {
        return Err(TargetError::TooFewRings { hint_index });
    }
    let rings = assign_values(&rings, &params.rings);
    TargetModel::from_rings(hint, rings, params.mask_expand, width, height).map_err(|e| match e {
        TargetError::TooFewRings { .. } => TargetError::TooFewRings { hint_index },
        other => other,
    })
}

/// Detects one target per hint. Every candidate ellipse is claimed by the
/// nearest hint, and only if its center lies within the center gate.
pub fn detect_all_targets(
    image: &RgbImage,
    hints: &CalibrationHint,
    params: &DetectionParams,
) -> Result<Vec<TargetModel>, TargetError> {
    let (w, h) = (image.width(), image.height());
    hints.validate(w, h)?;
    let candidates = candidate_ellipses(image, params)?;
    let mut claimed: Vec<Vec<Ellipse>> = vec![Vec::new(); hints.target_centers.len()];
    for e in candidates {
        let nearest = hints
            .target_centers
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, dist(e.center(), c)))
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        if let Some((i, d)) = nearest {
            if d <= params.center_gate {
                claimed[i].push(e);
            }
        }
    }
    hints
        .target_centers
        .iter()
        .enumerate()
        .map(|(i, &c)| build_model(&claimed[i], c, i, params, w, h))
        .collect()
}

/// Detects the target around a single hint.
pub fn detect_target(
    image: &RgbImage,
    hint: Point,
    params: &DetectionParams,
) -> Result<TargetModel, TargetError> {
    let hints = CalibrationHint {
        camera_id: String::new(),
        target_centers: vec![hint],
    };
    Ok(detect_all_targets(image, &hints, params)?.remove(0))
}
