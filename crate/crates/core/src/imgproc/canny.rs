use std::collections::VecDeque;

use super::{gaussian_blur, sobel_gradient, Gradient, ImgprocError};
use crate::raster::{BitMask, GrayImage};

pub const DEFAULT_CANNY_SIGMA: f64 = 1.4;

// tan(22.5°) and tan(67.5°): the bin boundaries of the direction quantizer.
const TAN_22_5: f64 = 0.414_213_562_373_095_1;
const TAN_67_5: f64 = 2.414_213_562_373_095;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bin {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Bin {
    /// Quantizes the gradient direction folded into `[0°, 180°)`. A value
    /// exactly on a boundary goes to the lower bin.
    fn of(gx: i32, gy: i32) -> Self {
        let (ax, ay) = ((gx as f64).abs(), (gy as f64).abs());
        if gy == 0 {
            return Bin::Deg0;
        }
        // Same signs put the folded angle in (0°, 90°).
        let same = (gx >= 0) == (gy >= 0);
        if ay < ax * TAN_22_5 || (same && ay == ax * TAN_22_5) {
            return Bin::Deg0;
        }
        if ay > ax * TAN_67_5 {
            Bin::Deg90
        } else if same {
            Bin::Deg45
        } else if ay == ax * TAN_67_5 {
            // 112.5° lands between 90° and 135°; lower bin wins.
            Bin::Deg90
        } else {
            Bin::Deg135
        }
    }

    /// Unit step along the gradient (y grows downward).
    fn step(self) -> (i64, i64) {
        match self {
            Bin::Deg0 => (1, 0),
            Bin::Deg45 => (1, 1),
            Bin::Deg90 => (0, 1),
            Bin::Deg135 => (-1, 1),
        }
    }
}

fn magnitude_at(g: &Gradient, x: i64, y: i64) -> f64 {
    if x < 0 || y < 0 || x >= g.width as i64 || y >= g.height as i64 {
        0.0
    } else {
        g.magnitude[y as usize * g.width + x as usize]
    }
}

/// Keeps pixels whose magnitude is not strictly exceeded by either neighbor
/// along the quantized gradient direction.
pub(crate) fn non_maximum_suppression(g: &Gradient) -> Vec<bool> {
    let mut keep = vec![false; g.width * g.height];
    for y in 0..g.height {
        for x in 0..g.width {
            let i = g.index(x, y);
            let m = g.magnitude[i];
            if m <= 0.0 {
                continue;
            }
            let (dx, dy) = Bin::of(g.gx[i], g.gy[i]).step();
            let (xi, yi) = (x as i64, y as i64);
            let a = magnitude_at(g, xi + dx, yi + dy);
            let b = magnitude_at(g, xi - dx, yi - dy);
            keep[i] = m >= a && m >= b;
        }
    }
    keep
}

/// Canny edge detector with the default pre-smoothing sigma.
pub fn canny(image: &GrayImage, low: f64, high: f64) -> Result<BitMask, ImgprocError> {
    canny_with_sigma(image, low, high, DEFAULT_CANNY_SIGMA)
}

/// Gaussian blur, Sobel, non-maximum suppression over 4 direction bins, then
/// hysteresis: magnitudes above `high` seed edges and magnitudes in
/// `(low, high]` survive only when 8-connected to a seed.
pub fn canny_with_sigma(
    image: &GrayImage,
    low: f64,
    high: f64,
    sigma: f64,
) -> Result<BitMask, ImgprocError> {
    if !(low >= 0.0) || !(high >= low) {
        return Err(ImgprocError::BadParameter(format!(
            "canny thresholds need 0 <= low <= high, got low={low} high={high}"
        )));
    }
    let blurred = gaussian_blur(image, sigma)?;
    let g = sobel_gradient(&blurred)?;
    let nms = non_maximum_suppression(&g);
    let (w, h) = (g.width, g.height);

    let mut edge = vec![false; w * h];
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if nms[i] && g.magnitude[i] > high {
            edge[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edge[j] && nms[j] && g.magnitude[j] > low {
                    edge[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(BitMask::from_fn(w, h, |x, y| edge[y * w + x]))
}
