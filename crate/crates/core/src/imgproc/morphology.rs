//! Binary morphology with rectangular structuring elements.
//!
//! Pixels outside the image read as clear. Rectangles are separable, so
//! erosion and dilation run as a horizontal pass followed by a vertical pass
//! using running counts; the result equals the direct definition.

use crate::raster::BitMask;

use super::ImgprocError;

/// Rectangular structuring element anchored at its center pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    width: usize,
    height: usize,
}

impl StructuringElement {
    pub fn new(width: usize, height: usize) -> Result<Self, ImgprocError> {
        if width == 0 || height == 0 || width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(ImgprocError::BadParameter(format!(
                "structuring element must have odd positive sides, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn square(side: usize) -> Self {
        Self::new(side, side).expect("odd side")
    }

    /// A `1 × height` vertical bar.
    pub fn vertical(height: usize) -> Result<Self, ImgprocError> {
        Self::new(1, height)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn half_width(&self) -> usize {
        self.width / 2
    }

    pub fn half_height(&self) -> usize {
        self.height / 2
    }

    /// Offsets relative to the anchor, row-major.
    pub fn offsets(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (hw, hh) = (self.half_width() as i64, self.half_height() as i64);
        (-hh..=hh).flat_map(move |dy| (-hw..=hw).map(move |dx| (dx, dy)))
    }
}

/// One separable pass. With `all = true` a bit survives only when every
/// in-window position is in bounds and set; otherwise when any is set.
fn pass(src: &[bool], w: usize, h: usize, half: usize, vertical: bool, all: bool) -> Vec<bool> {
    let mut out = vec![false; w * h];
    if half == 0 {
        out.copy_from_slice(src);
        return out;
    }
    let (lines, len) = if vertical { (w, h) } else { (h, w) };
    let at = |line: usize, pos: usize| {
        if vertical {
            pos * w + line
        } else {
            line * w + pos
        }
    };
    let span = 2 * half + 1;
    for line in 0..lines {
        // Count of set pixels in the window [pos-half, pos+half] ∩ [0, len).
        let mut count = 0usize;
        for p in 0..half.min(len) {
            count += src[at(line, p)] as usize;
        }
        for pos in 0..len {
            let enter = pos + half;
            if enter < len {
                count += src[at(line, enter)] as usize;
            }
            if pos > half {
                count -= src[at(line, pos - half - 1)] as usize;
            }
            out[at(line, pos)] = if all { count == span } else { count > 0 };
        }
    }
    out
}

fn apply(mask: &BitMask, se: &StructuringElement, all: bool) -> BitMask {
    let (w, h) = (mask.width(), mask.height());
    let horiz = pass(mask.bits(), w, h, se.half_width(), false, all);
    let bits = pass(&horiz, w, h, se.half_height(), true, all);
    BitMask::from_fn(w, h, |x, y| bits[y * w + x])
}

/// Bit set iff every element offset lands on a set, in-bounds pixel.
pub fn erode(mask: &BitMask, se: &StructuringElement) -> BitMask {
    apply(mask, se, true)
}

/// Bit set iff any element offset lands on a set pixel.
pub fn dilate(mask: &BitMask, se: &StructuringElement) -> BitMask {
    apply(mask, se, false)
}

/// Erosion followed by dilation; removes foreground thinner than `se`.
pub fn open(mask: &BitMask, se: &StructuringElement) -> BitMask {
    dilate(&erode(mask, se), se)
}

/// Dilation followed by erosion.
pub fn close(mask: &BitMask, se: &StructuringElement) -> BitMask {
    erode(&dilate(mask, se), se)
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn block(w: usize, h: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> BitMask {
        BitMask::from_fn(w, h, |x, y| {
            (x0..x0 + bw).contains(&x) && (y0..y0 + bh).contains(&y)
        })
    }

    #[test]
    fn element_validation() {
        assert!(StructuringElement::new(2, 3).is_err());
        assert!(StructuringElement::new(0, 1).is_err());
        assert!(StructuringElement::vertical(15).is_ok());
    }

    #[test]
    fn erode_block_to_center() {
        let m = block(7, 7, 2, 2, 3, 3);
        let e = erode(&m, &StructuringElement::square(3));
        assert_eq!(e.iter_set().collect::<Vec<_>>(), vec![(3, 3)]);
        assert!(erode(&BitMask::new(5, 5), &StructuringElement::square(3)).is_empty());
    }

    #[test]
    fn border_reads_clear() {
        let full = BitMask::filled(5, 4, true);
        let e = erode(&full, &StructuringElement::square(3));
        assert_eq!(e.count(), 3 * 2);
        assert_eq!(dilate(&full, &StructuringElement::square(3)), full);
    }

    #[test]
    fn dilate_point_with_vertical_bar() {
        let mut m = BitMask::new(5, 11);
        m.set(2, 5, true);
        let d = dilate(&m, &StructuringElement::vertical(5).unwrap());
        assert_eq!(
            d.iter_set().collect::<Vec<_>>(),
            (3..=7).map(|y| (2, y)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn opening_drops_speckle_keeps_bar() {
        let se = StructuringElement::vertical(9).unwrap();
        let speck = block(12, 12, 4, 4, 2, 2);
        assert!(open(&speck, &se).is_empty());
        let bar = block(20, 60, 7, 10, 3, 40);
        assert_eq!(open(&bar, &se), bar);
    }

    fn arb_mask() -> impl Strategy<Value = BitMask> {
        (1usize..14, 1usize..14).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<bool>(), w * h)
                .prop_map(move |bits| BitMask::from_fn(w, h, |x, y| bits[y * w + x]))
        })
    }

    fn arb_se() -> impl Strategy<Value = StructuringElement> {
        (0usize..3, 0usize..4)
            .prop_map(|(a, b)| StructuringElement::new(2 * a + 1, 2 * b + 1).unwrap())
    }

    proptest! {
        #[test]
        fn separable_matches_direct_definition(m in arb_mask(), se in arb_se()) {
            prop_assert_eq!(erode(&m, &se), oracle::erode(&m, &se));
            prop_assert_eq!(dilate(&m, &se), oracle::dilate(&m, &se));
        }

        #[test]
        fn dilation_never_shrinks(m in arb_mask(), se in arb_se()) {
            prop_assert!(dilate(&m, &se).count() >= m.count());
        }
    }
}
