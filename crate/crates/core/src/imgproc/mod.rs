//! Classic image-processing kernels used by target and arrow detection.

mod canny;
mod components;
mod filter;
mod gradient;
mod morphology;

pub use canny::{canny, canny_with_sigma, DEFAULT_CANNY_SIGMA};
pub use components::{connected_components, trace_contours, Component, Contour};
pub use filter::{
    bilateral_smooth, default_bilateral_radius, gaussian_blur, gray_close, gray_open,
};
pub use gradient::{sobel_gradient, Gradient};
pub use morphology::{close, dilate, erode, open, StructuringElement};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImgprocError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("image too small: {width}x{height}, need at least {min}x{min}")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
}

/// Reflect-101 border index (`dcb|abcd|cba`), valid for any offset.
#[inline]
pub(crate) fn reflect(i: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as i64;
    let period = 2 * (n - 1);
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - m;
    }
    m as usize
}
