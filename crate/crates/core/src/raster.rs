//! Pixel containers, PPM (P6) I/O and the channelwise differencing primitive.
//!
//! All images are row-major with the origin at the top-left pixel, x growing
//! rightward and y downward. Pixel `(x, y)` covers the unit square
//! `[x, x+1) × [y, y+1)`; its center sits at `(x + 0.5, y + 0.5)`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RasterError {
    #[error("not a binary PPM (expected P6 magic)")]
    BadMagic,
    #[error("malformed PPM header: {0}")]
    BadHeader(String),
    #[error("truncated pixel data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("image dimensions must be at least 1x1")]
    Empty,
}

pub type Rgb = [u8; 3];

/// 8-bit RGB image, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&color);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(RasterError::Truncated {
                expected,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, px: Rgb) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&px);
    }

    pub fn same_dims<T: Dims>(&self, other: &T) -> Result<(), RasterError> {
        check_dims(self.width, self.height, other.dims())
    }
}

/// 8-bit single-channel image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        if data.len() != width * height {
            return Err(RasterError::Truncated {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }
}

/// Per-pixel channel-sum absolute differences, each in `0..=765`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffImage {
    width: usize,
    height: usize,
    values: Vec<u16>,
}

impl DiffImage {
    pub fn from_raw(width: usize, height: usize, values: Vec<u16>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        if values.len() != width * height {
            return Err(RasterError::Truncated {
                expected: width * height,
                found: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values: values.into_iter().map(|v| v.min(765)).collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }
}

/// Binary raster; `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BitMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, false)
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as clear.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> BitMask {
        BitMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn and(&self, other: &BitMask) -> Result<BitMask, RasterError> {
        check_dims(self.width, self.height, other.dims())?;
        Ok(BitMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    /// Iterator over the coordinates of set bits in raster order.
    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }
}

pub trait Dims {
    fn dims(&self) -> (usize, usize);
}

macro_rules! impl_dims {
    ($($t:ty),*) => {
        $(impl Dims for $t {
            fn dims(&self) -> (usize, usize) {
                (self.width, self.height)
            }
        })*
    };
}
impl_dims!(RgbImage, GrayImage, DiffImage, BitMask);

fn check_dims(w: usize, h: usize, other: (usize, usize)) -> Result<(), RasterError> {
    if (w, h) != other {
        return Err(RasterError::DimensionMismatch(w, h, other.0, other.1));
    }
    Ok(())
}

/// Parses a binary P6 pixmap with maxval 255. Header comments (`#` to end of
/// line) are accepted.
pub fn load_ppm(bytes: &[u8]) -> Result<RgbImage, RasterError> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(RasterError::BadMagic);
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        skip_whitespace_and_comments(bytes, &mut pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(RasterError::BadHeader(format!(
                "missing or non-numeric {name}"
            )));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        fields[i] = text
            .parse()
            .map_err(|_| RasterError::BadHeader(format!("{name} out of range")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(RasterError::BadHeader(format!(
            "maxval {maxval}, only 255 supported"
        )));
    }
    if width == 0 || height == 0 {
        return Err(RasterError::BadHeader("zero dimension".into()));
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        Some(_) => return Err(RasterError::BadHeader("junk after maxval".into())),
        None => {
            return Err(RasterError::Truncated {
                expected: width * height * 3,
                found: 0,
            })
        }
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| RasterError::BadHeader("dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(RasterError::Truncated {
            expected,
            found: data.len(),
        });
    }
    RgbImage::from_raw(width, height, data[..expected].to_vec())
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        if bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        } else if bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

/// Encodes as `P6\n<w> <h>\n255\n` followed by the raw RGB bytes.
pub fn save_ppm(image: &RgbImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", image.width, image.height);
    let mut out = Vec::with_capacity(header.len() + image.data.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&image.data);
    out
}

/// ITU-R 601 luma, rounded half away from zero.
pub fn to_gray(image: &RgbImage) -> GrayImage {
    let data = image
        .data
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    GrayImage {
        width: image.width,
        height: image.height,
        data,
    }
}

#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    // Integer form of 0.299R + 0.587G + 0.114B with round-half-up; exact
    // because the weights are multiples of 1/1000.
    let scaled = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((scaled + 500) / 1000).min(255) as u8
}

/// `|ΔR| + |ΔG| + |ΔB|` per pixel.
pub fn abs_diff_rgb(a: &RgbImage, b: &RgbImage) -> Result<DiffImage, RasterError> {
    a.same_dims(b)?;
    let values = a
        .data
        .chunks_exact(3)
        .zip(b.data.chunks_exact(3))
        .map(|(p, q)| {
            p.iter()
                .zip(q)
                .map(|(&u, &v)| (u as i16 - v as i16).unsigned_abs())
                .sum::<u16>()
        })
        .collect();
    Ok(DiffImage {
        width: a.width,
        height: a.height,
        values,
    })
}

/// Sets a bit wherever the difference strictly exceeds `t`.
pub fn threshold(diff: &DiffImage, t: u16) -> BitMask {
    BitMask {
        width: diff.width,
        height: diff.height,
        bits: diff.values.iter().map(|&v| v > t).collect(),
    }
}

/// Keeps pixels under set bits and replaces the rest with `fill`.
pub fn apply_mask(image: &RgbImage, mask: &BitMask, fill: Rgb) -> Result<RgbImage, RasterError> {
    image.same_dims(mask)?;
    let mut out = image.clone();
    for (px, &keep) in out.data.chunks_exact_mut(3).zip(&mask.bits) {
        if !keep {
            px.copy_from_slice(&fill);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_image() -> impl Strategy<Value = RgbImage> {
        (1usize..9, 1usize..9).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h * 3)
                .prop_map(move |d| RgbImage::from_raw(w, h, d).unwrap())
        })
    }

    #[test]
    fn load_single_pixel() {
        let mut bytes = b"P6 1 1 255\n".to_vec();
        bytes.extend_from_slice(&[7, 8, 9]);
        let img = load_ppm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.get(0, 0), [7, 8, 9]);
    }

    #[test]
    fn load_rejects_other_formats() {
        assert_eq!(load_ppm(b"P5 1 1 255\n\0"), Err(RasterError::BadMagic));
        assert!(matches!(
            load_ppm(b"P6 x 1 255\n"),
            Err(RasterError::BadHeader(_))
        ));
        assert!(matches!(
            load_ppm(b"P6 1 1 65535\n\0\0\0"),
            Err(RasterError::BadHeader(_))
        ));
        assert_eq!(
            load_ppm(b"P6 2 1 255\n\x01\x02\x03"),
            Err(RasterError::Truncated {
                expected: 6,
                found: 3
            })
        );
    }

    #[test]
    fn load_skips_header_comments() {
        let mut bytes = b"P6\n# made by hand\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(load_ppm(&bytes).unwrap().get(0, 0), [1, 2, 3]);
    }

    #[test]
    fn save_layout() {
        let one = RgbImage::new(1, 1);
        let bytes = save_ppm(&one);
        assert_eq!(bytes.len(), 11 + 3);
        assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");

        let mut two = RgbImage::new(2, 2);
        two.put(1, 0, [1, 1, 1]);
        two.put(0, 1, [2, 2, 2]);
        let bytes = save_ppm(&two);
        assert_eq!(&bytes[11..], &[0, 0, 0, 1, 1, 1, 2, 2, 2, 0, 0, 0]);
    }

    #[test]
    fn gray_weights() {
        let img = |c: Rgb| RgbImage::filled(1, 1, c);
        assert_eq!(to_gray(&img([255, 255, 255])).get(0, 0), 255);
        assert_eq!(to_gray(&img([0, 0, 0])).get(0, 0), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(to_gray(&img([255, 0, 0])).get(0, 0), 76);
        assert_eq!(to_gray(&img([0, 255, 0])).get(0, 0), 150);
        assert_eq!(to_gray(&img([0, 0, 255])).get(0, 0), 29);
    }

    #[test]
    fn diff_examples() {
        let a = RgbImage::filled(1, 1, [10, 20, 30]);
        let b = RgbImage::filled(1, 1, [13, 18, 30]);
        assert_eq!(abs_diff_rgb(&a, &b).unwrap().get(0, 0), 5);
        assert_eq!(abs_diff_rgb(&a, &a).unwrap().get(0, 0), 0);
        let w = RgbImage::filled(1, 1, [255; 3]);
        let k = RgbImage::filled(1, 1, [0; 3]);
        assert_eq!(abs_diff_rgb(&w, &k).unwrap().get(0, 0), 765);
        assert!(matches!(
            abs_diff_rgb(&a, &RgbImage::new(2, 1)),
            Err(RasterError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn threshold_is_strict() {
        let zero = DiffImage::from_raw(2, 2, vec![0; 4]).unwrap();
        assert!(threshold(&zero, 0).is_empty());
        let d = DiffImage::from_raw(2, 1, vec![40, 41]).unwrap();
        let m = threshold(&d, 40);
        assert!(!m.get(0, 0));
        assert!(m.get(1, 0));
        let full = DiffImage::from_raw(1, 1, vec![765]).unwrap();
        assert!(threshold(&full, 765).is_empty());
    }

    #[test]
    fn mask_application() {
        let img = RgbImage::from_raw(2, 2, (0..12).collect()).unwrap();
        assert_eq!(
            apply_mask(&img, &BitMask::filled(2, 2, true), [9; 3]).unwrap(),
            img
        );
        let black = apply_mask(&img, &BitMask::new(2, 2), [0; 3]).unwrap();
        assert_eq!(black, RgbImage::new(2, 2));
        assert!(apply_mask(&img, &BitMask::new(3, 2), [0; 3]).is_err());
    }

    #[test]
    fn checkerboard_mask_matches_direct_loop() {
        let w = 7;
        let h = 5;
        let img = RgbImage::from_raw(w, h, (0..w * h * 3).map(|i| (i * 37 % 256) as u8).collect())
            .unwrap();
        let mask = BitMask::from_fn(w, h, |x, y| (x + y) % 2 == 0);
        let out = apply_mask(&img, &mask, [1, 2, 3]).unwrap();
        for y in 0..h {
            for x in 0..w {
                let want = if (x + y) % 2 == 0 {
                    img.get(x, y)
                } else {
                    [1, 2, 3]
                };
                assert_eq!(out.get(x, y), want);
            }
        }
    }

    proptest! {
        #[test]
        fn ppm_round_trip(img in arb_image()) {
            prop_assert_eq!(load_ppm(&save_ppm(&img)).unwrap(), img);
        }

        #[test]
        fn diff_symmetric_and_reflexive(a in arb_image(), seed in any::<u64>()) {
            let b = RgbImage::from_raw(
                a.width(),
                a.height(),
                a.as_raw().iter().enumerate()
                    .map(|(i, v)| v.wrapping_add((seed >> (i % 56)) as u8))
                    .collect(),
            ).unwrap();
            prop_assert_eq!(abs_diff_rgb(&a, &b).unwrap(), abs_diff_rgb(&b, &a).unwrap());
            prop_assert!(abs_diff_rgb(&a, &a).unwrap().values().iter().all(|&v| v == 0));
        }

        #[test]
        fn threshold_count_and_monotone(
            values in proptest::collection::vec(0u16..=765, 1..200),
            t1 in 0u16..=765,
            t2 in 0u16..=765,
        ) {
            let n = values.len();
            let diff = DiffImage::from_raw(n, 1, values.clone()).unwrap();
            let brute = values.iter().filter(|&&v| v > t1).count();
            prop_assert_eq!(threshold(&diff, t1).count(), brute);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(threshold(&diff, hi).is_subset_of(&threshold(&diff, lo)));
        }
    }
}
