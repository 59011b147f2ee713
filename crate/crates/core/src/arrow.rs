//! Arrow extraction by consecutive-frame differencing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgproc::{connected_components, open, Component, ImgprocError, StructuringElement};
use crate::raster::{abs_diff_rgb, threshold, RasterError, RgbImage};
use crate::target::TargetModel;
use crate::Point;

/// Frame height at which `arrow_se_height` applies unscaled.
pub const REFERENCE_HEIGHT: usize = 960;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrowError {
    #[error("no arrow detected")]
    NoArrowDetected,
    #[error("ambiguous detection: components of {largest} and {second} px")]
    AmbiguousDetection { largest: usize, second: usize },
    #[error("empty blob")]
    EmptyBlob,
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Imgproc(#[from] ImgprocError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArrowParams {
    /// Channel-sum difference must exceed this to count as change.
    pub diff_threshold: u16,
    /// Vertical structuring element height at 960 rows.
    pub arrow_se_height: usize,
}

impl Default for ArrowParams {
    fn default() -> Self {
        Self {
            diff_threshold: 40,
            arrow_se_height: 15,
        }
    }
}

impl ArrowParams {
    /// Element height for a frame of `height` rows: proportional, rounded,
    /// then bumped to the next odd number.
    pub fn se_height_for(&self, height: usize) -> usize {
        let scaled = (self.arrow_se_height as f64 * height as f64 / REFERENCE_HEIGHT as f64).round()
            as usize;
        let scaled = scaled.max(1);
        if scaled.is_multiple_of(2) {
            scaled + 1
        } else {
            scaled
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrowDetection {
    pub blob: Component,
    /// Blob pixel nearest the target center.
    pub tip: (usize, usize),
    /// Largest difference value under the blob.
    pub diff_peak: u16,
}

impl ArrowDetection {
    /// The tip as a continuous point (pixel center).
    pub fn tip_point(&self) -> Point {
        (self.tip.0 as f64 + 0.5, self.tip.1 as f64 + 0.5)
    }
}

fn sq_dist(p: (usize, usize), c: Point) -> f64 {
    let (dx, dy) = (p.0 as f64 + 0.5 - c.0, p.1 as f64 + 0.5 - c.1);
    dx * dx + dy * dy
}

/// The blob pixel minimizing (distance from its center to `center`, y, x).
pub fn tip_point(blob: &Component, center: Point) -> Result<(usize, usize), ArrowError> {
    blob.pixels
        .iter()
        .copied()
        .min_by(|&p, &q| {
            sq_dist(p, center)
                .total_cmp(&sq_dist(q, center))
                .then(p.1.cmp(&q.1))
                .then(p.0.cmp(&q.0))
        })
        .ok_or(ArrowError::EmptyBlob)
}

/// Difference, threshold, outer-mask intersection, vertical opening, largest
/// component, tip.
pub fn detect_arrow(
    prev: &RgbImage,
    curr: &RgbImage,
    target: &TargetModel,
    params: &ArrowParams,
) -> Result<ArrowDetection, ArrowError> {
    let diff = abs_diff_rgb(prev, curr)?;
    let changed = threshold(&diff, params.diff_threshold).and(&target.outer_mask)?;
    let se = StructuringElement::vertical(params.se_height_for(curr.height()))?;
    let opened = open(&changed, &se);
    let mut components = connected_components(&opened);
    // Stable: equal areas keep raster order of their first pixel.
    components.sort_by_key(|c| std::cmp::Reverse(c.area()));
    let mut iter = components.into_iter();
    let blob = iter.next().ok_or(ArrowError::NoArrowDetected)?;
    if let Some(second) = iter.next() {
        if second.area() * 10 >= blob.area() * 9 {
            return Err(ArrowError::AmbiguousDetection {
                largest: blob.area(),
                second: second.area(),
            });
        }
    }
    let tip = tip_point(&blob, target.center)?;
    let diff_peak = blob
        .pixels
        .iter()
        .map(|&(x, y)| diff.get(x, y))
        .max()
        .unwrap_or(0);
    Ok(ArrowDetection {
        blob,
        tip,
        diff_peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{render_shot, render_target, ShotSpec, TargetSpec, BLACK};
    use crate::target::{detect_target, DetectionParams};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn scene() -> &'static (TargetSpec, RgbImage, TargetModel) {
        static SCENE: OnceLock<(TargetSpec, RgbImage, TargetModel)> = OnceLock::new();
        SCENE.get_or_init(|| {
            let spec = TargetSpec::standard((640.0, 480.0), 400.0);
            let img = render_target(&spec, 1280, 960, 0).unwrap();
            let model = detect_target(&img, spec.center, &DetectionParams::default()).unwrap();
            (spec, img, model)
        })
    }

    fn blob_of(pixels: Vec<(usize, usize)>) -> Component {
        Component {
            bbox: (0, 0, 0, 0),
            pixels,
        }
    }

    #[test]
    fn se_scaling() {
        let p = ArrowParams::default();
        assert_eq!(p.se_height_for(960), 15);
        assert_eq!(p.se_height_for(480), 9); // 7.5 rounds to 8, then odd
        assert_eq!(p.se_height_for(1920), 31);
        assert_eq!(p.se_height_for(10), 1);
    }

    #[test]
    fn tip_rules() {
        assert_eq!(
            tip_point(&blob_of(vec![(4, 7)]), (0.0, 0.0)).unwrap(),
            (4, 7)
        );
        assert_eq!(
            tip_point(&blob_of(vec![]), (0.0, 0.0)),
            Err(ArrowError::EmptyBlob)
        );
        let bar: Vec<_> = (20..40).map(|y| (10, y)).collect();
        assert_eq!(tip_point(&blob_of(bar), (10.5, 5.0)).unwrap(), (10, 20));
        // Equidistant pixels: smaller y wins.
        assert_eq!(
            tip_point(&blob_of(vec![(5, 6), (6, 5)]), (5.5, 5.5)).unwrap(),
            (6, 5)
        );
    }

    proptest! {
        #[test]
        fn tip_matches_exhaustive_scan(
            pixels in proptest::collection::vec((0usize..60, 0usize..60), 1..80),
            cx in 0.0f64..60.0,
            cy in 0.0f64..60.0,
        ) {
            let got = tip_point(&blob_of(pixels.clone()), (cx, cy)).unwrap();
            let mut best = pixels[0];
            for &p in &pixels {
                let (dp, db) = (sq_dist(p, (cx, cy)), sq_dist(best, (cx, cy)));
                if dp < db || (dp == db && (p.1, p.0) < (best.1, best.0)) {
                    best = p;
                }
            }
            prop_assert_eq!(got, best);
        }
    }

    #[test]
    fn identical_frames_have_no_arrow() {
        let (_, img, model) = scene();
        assert_eq!(
            detect_arrow(img, img, model, &ArrowParams::default()),
            Err(ArrowError::NoArrowDetected)
        );
    }

    #[test]
    fn speckles_are_removed() {
        let (_, img, model) = scene();
        let mut noisy = img.clone();
        for k in 0..40 {
            let (x, y) = (400 + 13 * k, 300 + 7 * k);
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                noisy.put(x + dx, y + dy, [0, 255, 0]);
            }
        }
        assert_eq!(
            detect_arrow(img, &noisy, model, &ArrowParams::default()),
            Err(ArrowError::NoArrowDetected)
        );
    }

    #[test]
    fn dark_vertical_bar_tip() {
        let (spec, img, model) = scene();
        let mut shot = ShotSpec::new((700.0, 560.0), 0.0);
        shot.shaft_color = BLACK;
        let after = render_shot(img, spec, &shot).unwrap();
        let det = detect_arrow(img, &after, model, &ArrowParams::default()).unwrap();
        let tip = det.tip_point();
        assert!(dist(tip, shot.true_tip) <= 2.0, "tip {tip:?}");
        assert!(det.blob.pixels.contains(&det.tip));
    }

    fn dist(a: Point, b: Point) -> f64 {
        (a.0 - b.0).hypot(a.1 - b.1)
    }

    #[test]
    fn shots_around_the_face() {
        let (spec, img, model) = scene();
        for (k, (tx, ty, angle)) in [
            (640.0, 480.0, 0.0),
            (800.0, 700.0, 0.05),
            (450.0, 300.0, std::f64::consts::PI - 0.08),
            (900.0, 350.0, std::f64::consts::PI + 0.1),
            (560.0, 820.0, -0.04),
        ]
        .into_iter()
        .enumerate()
        {
            let shot = ShotSpec::new((tx, ty), angle);
            let after = render_shot(img, spec, &shot).unwrap();
            let det = detect_arrow(img, &after, model, &ArrowParams::default()).unwrap();
            assert!(
                dist(det.tip_point(), shot.true_tip) <= 2.0,
                "shot {k}: {:?}",
                det.tip
            );
            // Swapping frames gives the same blob.
            let swapped = detect_arrow(&after, img, model, &ArrowParams::default()).unwrap();
            assert_eq!(swapped, det);
            assert!(det
                .blob
                .pixels
                .iter()
                .all(|&(x, y)| model.outer_mask.get(x, y)));
        }
    }

    #[test]
    fn threshold_monotonicity() {
        let (spec, img, model) = scene();
        let shot = ShotSpec::new((600.0, 650.0), 0.03);
        let noisy_spec = TargetSpec {
            noise_sigma: 8.0,
            ..spec.clone()
        };
        let before = render_target(&noisy_spec, 1280, 960, 11).unwrap();
        let after = crate::synth::add_noise(&render_shot(img, spec, &shot).unwrap(), 8.0, 0, 12);
        let mut last = usize::MAX;
        for t in [60u16, 100, 150, 200, 300, 400] {
            let p = ArrowParams {
                diff_threshold: t,
                ..Default::default()
            };
            let area = detect_arrow(&before, &after, model, &p).map_or(0, |d| d.blob.area());
            assert!(area <= last, "threshold {t}: {area} > {last}");
            last = area;
        }
    }

    #[test]
    fn ambiguous_pair() {
        let (_, img, model) = scene();
        let mut two = img.clone();
        for y in 500..560 {
            for x in [500usize, 501, 502, 780, 781, 782] {
                two.put(x, y, [0, 255, 0]);
            }
        }
        assert!(matches!(
            detect_arrow(img, &two, model, &ArrowParams::default()),
            Err(ArrowError::AmbiguousDetection { .. })
        ));
    }

    #[test]
    fn outside_outer_mask_is_ignored() {
        let (_, img, model) = scene();
        let mut m = img.clone();
        for y in 10..80 {
            for x in 10..13 {
                m.put(x, y, [0, 255, 0]);
            }
        }
        assert!(!model.outer_mask.get(11, 40));
        assert_eq!(
            detect_arrow(img, &m, model, &ArrowParams::default()),
            Err(ArrowError::NoArrowDetected)
        );
    }
}
