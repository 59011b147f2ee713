//! Archery target scoring from raw pixels.
//!
//! The pipeline locates each target face in a calibration frame (edge
//! detection, contour tracing and ellipse fitting around a user-supplied
//! center), extracts each new arrow by differencing consecutive frames and
//! opening the change mask with a tall vertical structuring element, and
//! scores the arrow point nearest the target center by innermost-ring
//! containment.
//!
//! * [`raster`] – image containers, PPM I/O, frame differencing.
//! * [`imgproc`] – smoothing, Canny edges, morphology, components, contours.
//! * [`ellipse`] – direct least-squares fitting and ellipse rasterization.
//! * [`target`] – target and ring detection.
//! * [`arrow`] – arrow extraction and scoring point.
//! * [`scoring`] – ring lookup, camera fusion, sessions and rankings.
//! * [`rectify`] – ellipse-to-circle rectification and radius-based scoring.
//! * [`synth`] – synthetic target/arrow renderer with analytic ground truth.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrow;
pub mod ellipse;
pub mod imgproc;
pub mod raster;
pub mod rectify;
pub mod scoring;
pub mod synth;
pub mod target;

pub use arrow::{detect_arrow, tip_point, ArrowDetection, ArrowError, ArrowParams};
pub use ellipse::{fit_ellipse, point_in_ellipse, Ellipse, EllipseError};
pub use imgproc::{Component, Contour};
pub use raster::{load_ppm, save_ppm, BitMask, GrayImage, RasterError, Rgb, RgbImage};
pub use rectify::{
    apply_transform, ellipse_to_circle, score_point_rectified, PlanarTransform, RectifiedTarget,
};
pub use scoring::{
    fuse, ranking, record_shot, score_arrow, score_point, CameraScore, ScoreError, ScoreRecord,
    Session, ShotFragment,
};
pub use synth::{render_shot, render_target, true_score, ShotSpec, SynthError, TargetSpec};
pub use target::{
    detect_all_targets, detect_target, CalibrationHint, DetectionParams, RingConfig, RingModel,
    TargetError, TargetModel,
};

/// A point in continuous image coordinates (pixels, y down).
pub type Point = (f64, f64);
