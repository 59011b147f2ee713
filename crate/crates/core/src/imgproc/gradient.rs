use super::{reflect, ImgprocError};
use crate::raster::GrayImage;

/// Sobel response fields, row-major like the source image.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<i32>,
    pub gy: Vec<i32>,
    pub magnitude: Vec<f64>,
    /// `atan2(gy, gx)` in radians.
    pub direction: Vec<f64>,
}

impl Gradient {
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }
}

/// 3×3 Sobel operator with reflect-101 borders.
pub fn sobel_gradient(image: &GrayImage) -> Result<Gradient, ImgprocError> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(ImgprocError::TooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    let px = |x: i64, y: i64| image.get(reflect(x, w), reflect(y, h)) as i32;
    let n = w * h;
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let (a, b, c) = (px(x - 1, y - 1), px(x, y - 1), px(x + 1, y - 1));
            let (d, f) = (px(x - 1, y), px(x + 1, y));
            let (g, hh, i) = (px(x - 1, y + 1), px(x, y + 1), px(x + 1, y + 1));
            gx.push((c + 2 * f + i) - (a + 2 * d + g));
            gy.push((g + 2 * hh + i) - (a + 2 * b + c));
        }
    }
    let magnitude = gx
        .iter()
        .zip(&gy)
        .map(|(&u, &v)| ((u as f64).powi(2) + (v as f64).powi(2)).sqrt())
        .collect();
    let direction = gx
        .iter()
        .zip(&gy)
        .map(|(&u, &v)| libm::atan2(v as f64, u as f64))
        .collect();
    Ok(Gradient {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn too_small() {
        assert!(matches!(
            sobel_gradient(&GrayImage::new(2, 5)),
            Err(ImgprocError::TooSmall { .. })
        ));
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = sobel_gradient(&GrayImage::filled(8, 6, 77)).unwrap();
        assert!(g.magnitude.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn vertical_step_is_horizontal_gradient() {
        let (w, h) = (10, 7);
        let img = GrayImage::from_raw(
            w,
            h,
            (0..w * h)
                .map(|i| if i % w < 5 { 10 } else { 90 })
                .collect(),
        )
        .unwrap();
        let g = sobel_gradient(&img).unwrap();
        for y in 0..h {
            for x in [4, 5] {
                let i = g.index(x, y);
                assert_eq!(g.gy[i], 0);
                assert_eq!(g.gx[i], 4 * 80);
                let d = g.direction[i];
                assert!(d.abs() < 1e-12 || (d.abs() - PI).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_ramp_is_constant_in_interior() {
        let (w, h) = (12, 9);
        let img = GrayImage::from_raw(
            w,
            h,
            (0..w * h)
                .map(|i| (3 * (i % w) + 5 * (i / w)) as u8)
                .collect(),
        )
        .unwrap();
        let g = sobel_gradient(&img).unwrap();
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let i = g.index(x, y);
                assert_eq!((g.gx[i], g.gy[i]), (8 * 3, 8 * 5));
            }
        }
    }

    #[test]
    fn matches_finite_differences_on_smooth_ramp() {
        // Oracle: central differences of the analytic surface, scaled by the
        // Sobel gain of 8.
        let (w, h) = (30, 24);
        let f = |x: f64, y: f64| 20.0 + 3.0 * x + 4.0 * y + 0.04 * x * x;
        let img = GrayImage::from_raw(
            w,
            h,
            (0..w * h)
                .map(|i| f((i % w) as f64, (i / w) as f64).round() as u8)
                .collect(),
        )
        .unwrap();
        let g = sobel_gradient(&img).unwrap();
        for y in 2..h - 2 {
            for x in 2..w - 2 {
                let (xf, yf) = (x as f64, y as f64);
                let dx = (f(xf + 1.0, yf) - f(xf - 1.0, yf)) / 2.0 * 8.0;
                let dy = (f(xf, yf + 1.0) - f(xf, yf - 1.0)) / 2.0 * 8.0;
                let want = (dx * dx + dy * dy).sqrt();
                let got = g.magnitude[g.index(x, y)];
                assert!(
                    (got - want).abs() <= 0.1 * want,
                    "({x},{y}) {got} vs {want}"
                );
            }
        }
    }
}
