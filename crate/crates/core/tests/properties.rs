use proptest::prelude::*;
use ringscore_core::imgproc::{close, dilate, erode, open, StructuringElement};
use ringscore_core::{
    detect_arrow, true_score, ArrowError, ArrowParams, BitMask, Ellipse, RgbImage, RingModel,
    TargetModel, TargetSpec,
};

fn mask_strategy() -> impl Strategy<Value = BitMask> {
    (4usize..24, 4usize..24).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<bool>(), w * h)
            .prop_map(move |bits| BitMask::from_fn(w, h, |x, y| bits[y * w + x]))
    })
}

fn se_strategy() -> impl Strategy<Value = StructuringElement> {
    (0usize..3, 0usize..4)
        .prop_map(|(hw, hh)| StructuringElement::new(2 * hw + 1, 2 * hh + 1).unwrap())
}

fn union(a: &BitMask, b: &BitMask) -> BitMask {
    BitMask::from_fn(a.width(), a.height(), |x, y| a.get(x, y) || b.get(x, y))
}

proptest! {
    #[test]
    fn morphology_algebra(a in mask_strategy(), seed in any::<u64>(), se in se_strategy()) {
        let extra = BitMask::from_fn(a.width(), a.height(), |x, y| {
            (seed.rotate_left((x * 7 + y * 13) as u32 % 64) & 1) == 1
        });
        let b = union(&a, &extra);
        prop_assert!(erode(&a, &se).is_subset_of(&a));
        prop_assert!(a.is_subset_of(&dilate(&a, &se)));
        prop_assert!(erode(&a, &se).is_subset_of(&erode(&b, &se)));
        prop_assert!(dilate(&a, &se).is_subset_of(&dilate(&b, &se)));
        let o = open(&a, &se);
        prop_assert!(o.is_subset_of(&a));
        prop_assert_eq!(open(&o, &se), o);
        let c = close(&a, &se);
        prop_assert_eq!(close(&c, &se), c);
    }

    #[test]
    fn true_score_is_radially_monotone(r1 in 0.0f64..500.0, r2 in 0.0f64..500.0, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let spec = TargetSpec::standard((640.0, 480.0), 400.0);
        let values: Vec<u32> = (1..=10).rev().collect();
        let (near, far) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let p = |r: f64, t: f64| (640.0 + r * t.cos(), 480.0 + r * t.sin());
        prop_assert!(true_score(&spec, p(near, t1), &values) >= true_score(&spec, p(far, t2), &values));
    }
}

const W: usize = 320;
const H: usize = 256;

fn small_target() -> TargetModel {
    let rings = [100.0, 70.0, 40.0]
        .iter()
        .enumerate()
        .map(|(i, &r)| RingModel {
            boundary: Ellipse::circle((160.0, 128.0), r),
            score: i as u32 + 1,
        })
        .collect();
    TargetModel::from_rings((160.0, 128.0), rings, 50.0, W, H).unwrap()
}

/// White frame with dark vertical bars of varying shade; (x, y, len, shade).
fn frame_with(bars: &[(usize, usize, usize, u8)]) -> RgbImage {
    let mut img = RgbImage::filled(W, H, [255, 255, 255]);
    for &(x, y, len, shade) in bars {
        for yy in y..(y + len).min(H) {
            for xx in x..(x + 3).min(W) {
                img.put(xx, yy, [shade, shade, shade]);
            }
        }
    }
    img
}

fn bars() -> impl Strategy<Value = Vec<(usize, usize, usize, u8)>> {
    prop::collection::vec((40usize..280, 20usize..230, 3usize..40, 0u8..250), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn arrow_blob_properties(old in bars(), new in bars(), t1 in 0u16..300, dt in 0u16..300) {
        let target = small_target();
        let prev = frame_with(&old);
        let curr = frame_with(&[old.clone(), new].concat());
        let low = ArrowParams { diff_threshold: t1, ..Default::default() };
        let high = ArrowParams { diff_threshold: t1 + dt, ..Default::default() };
        let forward = detect_arrow(&prev, &curr, &target, &low);
        let backward = detect_arrow(&curr, &prev, &target, &low);
        match (&forward, &backward) {
            (Ok(f), Ok(b)) => {
                prop_assert_eq!(&f.blob.pixels, &b.blob.pixels);
                prop_assert_eq!(f.tip, b.tip);
                prop_assert!(f.blob.pixels.iter().all(|&(x, y)| target.outer_mask.get(x, y)));
            }
            (Err(f), Err(b)) => prop_assert_eq!(f.to_string(), b.to_string()),
            _ => prop_assert!(false, "swap changed the outcome"),
        }
        match (forward, detect_arrow(&prev, &curr, &target, &high)) {
            (Ok(f), Ok(h)) => prop_assert!(h.blob.area() <= f.blob.area()),
            (Err(ArrowError::NoArrowDetected), Ok(_)) => prop_assert!(false, "higher threshold found more"),
            _ => {}
        }
    }
}
