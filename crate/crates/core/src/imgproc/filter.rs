use super::{reflect, ImgprocError, StructuringElement};
use crate::raster::GrayImage;

fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let two_s2 = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (-(radius as i64)..=radius as i64)
        .map(|k| libm::exp(-((k * k) as f64) / two_s2))
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

fn round_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Separable Gaussian blur with kernel radius `ceil(3σ)` and reflect-101
/// borders. Intermediate sums stay in `f64`; only the output is rounded.
pub fn gaussian_blur(image: &GrayImage, sigma: f64) -> Result<GrayImage, ImgprocError> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(ImgprocError::BadParameter(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let kernel = gaussian_kernel(sigma, radius);
    let (w, h) = (image.width(), image.height());
    let src = image.as_raw();

    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kw) in kernel.iter().enumerate() {
                let xi = reflect(x as i64 + k as i64 - radius as i64, w);
                acc += kw * row[xi] as f64;
            }
            horiz[y * w + x] = acc;
        }
    }

    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kw) in kernel.iter().enumerate() {
                let yi = reflect(y as i64 + k as i64 - radius as i64, h);
                acc += kw * horiz[yi * w + x];
            }
            out[y * w + x] = round_u8(acc);
        }
    }
    Ok(GrayImage::from_raw(w, h, out).expect("dimensions preserved"))
}

/// Window radius that covers at least 95% of the spatial kernel mass.
pub fn default_bilateral_radius(sigma_space: f64) -> usize {
    (2.0 * sigma_space).ceil() as usize
}

/// Edge-preserving smoothing: each output pixel is the normalized sum over a
/// `(2r+1)²` window weighted by `exp(−d²/2σs²)·exp(−ΔI²/2σr²)`.
pub fn bilateral_smooth(
    image: &GrayImage,
    sigma_space: f64,
    sigma_range: f64,
    radius: usize,
) -> Result<GrayImage, ImgprocError> {
    if !(sigma_space > 0.0) || !(sigma_range > 0.0) {
        return Err(ImgprocError::BadParameter(format!(
            "bilateral sigmas must be > 0, got space={sigma_space} range={sigma_range}"
        )));
    }
    let (w, h) = (image.width(), image.height());
    let r = radius as i64;
    let side = 2 * radius + 1;
    let mut spatial = Vec::with_capacity(side * side);
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as f64;
            spatial.push(libm::exp(-d2 / (2.0 * sigma_space * sigma_space)));
        }
    }
    let range: Vec<f64> = (0..256)
        .map(|d| {
            let d = d as f64;
            libm::exp(-d * d / (2.0 * sigma_range * sigma_range))
        })
        .collect();

    let src = image.as_raw();
    let mut out = vec![0u8; w * h];
    // Precomputed reflected column offsets keep the inner loop branch-free.
    let cols: Vec<Vec<usize>> = (0..w)
        .map(|x| (-r..=r).map(|dx| reflect(x as i64 + dx, w)).collect())
        .collect();
    for y in 0..h {
        let rows: Vec<usize> = (-r..=r).map(|dy| reflect(y as i64 + dy, h) * w).collect();
        for x in 0..w {
            let center = src[y * w + x] as i32;
            let mut num = 0.0;
            let mut den = 0.0;
            let mut k = 0;
            for &row in &rows {
                for &col in &cols[x] {
                    let v = src[row + col] as i32;
                    let wt = spatial[k] * range[(v - center).unsigned_abs() as usize];
                    num += wt * v as f64;
                    den += wt;
                    k += 1;
                }
            }
            out[y * w + x] = round_u8(num / den);
        }
    }
    Ok(GrayImage::from_raw(w, h, out).expect("dimensions preserved"))
}

/// Running min/max along one axis; out-of-bounds samples are skipped.
fn extremum_1d(
    src: &[u8],
    w: usize,
    h: usize,
    half: usize,
    vertical: bool,
    take_min: bool,
) -> Vec<u8> {
    let mut out = vec![0u8; w * h];
    let pick = |a: u8, b: u8| if take_min { a.min(b) } else { a.max(b) };
    for y in 0..h {
        for x in 0..w {
            let (pos, len) = if vertical { (y, h) } else { (x, w) };
            let lo = pos.saturating_sub(half);
            let hi = (pos + half).min(len - 1);
            let mut acc = if take_min { u8::MAX } else { u8::MIN };
            for p in lo..=hi {
                let v = if vertical {
                    src[p * w + x]
                } else {
                    src[y * w + p]
                };
                acc = pick(acc, v);
            }
            out[y * w + x] = acc;
        }
    }
    out
}

fn gray_extremum(image: &GrayImage, se: &StructuringElement, take_min: bool) -> GrayImage {
    let (w, h) = (image.width(), image.height());
    let pass = extremum_1d(image.as_raw(), w, h, se.half_width(), false, take_min);
    let out = extremum_1d(&pass, w, h, se.half_height(), true, take_min);
    GrayImage::from_raw(w, h, out).expect("dimensions preserved")
}

/// Grayscale opening (min filter then max filter over a rectangular element).
/// Removes bright details narrower than the element.
pub fn gray_open(image: &GrayImage, se: &StructuringElement) -> GrayImage {
    gray_extremum(&gray_extremum(image, se, true), se, false)
}

/// Grayscale closing (max filter then min filter). Removes dark details
/// narrower than the element.
pub fn gray_close(image: &GrayImage, se: &StructuringElement) -> GrayImage {
    gray_extremum(&gray_extremum(image, se, false), se, true)
}
