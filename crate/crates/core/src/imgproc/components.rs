//! 8-connected component labeling and Moore-neighbor boundary tracing.

use std::collections::{HashSet, VecDeque};

use crate::raster::BitMask;

/// A maximal 8-connected set of foreground pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Pixel coordinates in raster order.
    pub pixels: Vec<(usize, usize)>,
    /// `(min_x, min_y, max_x, max_y)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// The pixel with the smallest y, then smallest x.
    pub fn first(&self) -> (usize, usize) {
        self.pixels[0]
    }
}

/// Ordered boundary pixels of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<(usize, usize)>,
}

impl Contour {
    /// Points at pixel centers, ready for geometric fitting.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|&(x, y)| (x as f64 + 0.5, y as f64 + 0.5))
            .collect()
    }
}

const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Labels components and returns, alongside them, a per-pixel label map
/// (`usize::MAX` for background).
fn label(mask: &BitMask) -> (Vec<Component>, Vec<usize>) {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![usize::MAX; w * h];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.get(x, y) || labels[i] != usize::MAX {
                continue;
            }
            let id = out.len();
            labels[i] = id;
            queue.push_back((x, y));
            let mut pixels = Vec::new();
            while let Some((cx, cy)) = queue.pop_front() {
                pixels.push((cx, cy));
                for (dx, dy) in NEIGHBORS_8 {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if mask.get_signed(nx, ny) {
                        let j = ny as usize * w + nx as usize;
                        if labels[j] == usize::MAX {
                            labels[j] = id;
                            queue.push_back((nx as usize, ny as usize));
                        }
                    }
                }
            }
            pixels.sort_unstable_by_key(|&(px, py)| (py, px));
            let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
            for &(px, py) in &pixels {
                x0 = x0.min(px);
                y0 = y0.min(py);
                x1 = x1.max(px);
                y1 = y1.max(py);
            }
            out.push(Component {
                pixels,
                bbox: (x0, y0, x1, y1),
            });
        }
    }
    (out, labels)
}

/// Maximal 8-connected components, ordered by their `(min-y, min-x)` pixel.
pub fn connected_components(mask: &BitMask) -> Vec<Component> {
    label(mask).0
}

// Clockwise on screen (y down), starting west.
const MOORE: [(i64, i64); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

fn moore_index(dx: i64, dy: i64) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("offset is an 8-neighbor")
}

/// Traces the outer boundary of one component clockwise from `start`, which
/// must be the component's first pixel in raster order.
fn trace_one(start: (usize, usize), inside: impl Fn(i64, i64) -> bool) -> Contour {
    let s = (start.0 as i64, start.1 as i64);
    let mut points = vec![start];
    let initial = (s, 0usize);
    let mut seen: HashSet<((i64, i64), usize)> = HashSet::new();
    seen.insert(initial);
    let (mut cur, mut back) = initial;
    loop {
        let mut next = None;
        for k in 1..=8 {
            let idx = (back + k) % 8;
            let (dx, dy) = MOORE[idx];
            let cand = (cur.0 + dx, cur.1 + dy);
            if inside(cand.0, cand.1) {
                let (bx, by) = MOORE[(idx + 7) % 8];
                let bpix = (cur.0 + bx, cur.1 + by);
                next = Some((cand, moore_index(bpix.0 - cand.0, bpix.1 - cand.1)));
                break;
            }
        }
        let Some(state) = next else {
            // Isolated pixel.
            break;
        };
        // Jacob's criterion (re-entering the start the same way), generalized
        // to any repeated (pixel, backtrack) state so thin shapes terminate.
        if state == initial || !seen.insert(state) {
            break;
        }
        (cur, back) = state;
        points.push((cur.0 as usize, cur.1 as usize));
    }
    if points.len() > 1 && points.last() == Some(&start) {
        points.pop();
    }
    Contour { points }
}

/// One outer boundary per 8-connected component (Moore tracing, clockwise,
/// starting at the component's `(min-y, min-x)` pixel), in component order.
pub fn trace_contours(mask: &BitMask) -> Vec<Contour> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let (components, labels) = label(mask);
    components
        .iter()
        .enumerate()
        .map(|(id, comp)| {
            let inside = |x: i64, y: i64| {
                x >= 0 && y >= 0 && x < w && y < h && labels[(y * w + x) as usize] == id
            };
            trace_one(comp.first(), inside)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_rows(rows: &[&str]) -> BitMask {
        let h = rows.len();
        let w = rows[0].len();
        BitMask::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    fn flood_fill_oracle(mask: &BitMask) -> Vec<usize> {
        // Recursive-style DFS with an explicit stack; returns sorted areas.
        let (w, h) = (mask.width(), mask.height());
        let mut seen = vec![false; w * h];
        let mut areas = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !mask.get(x, y) || seen[y * w + x] {
                    continue;
                }
                let mut stack = vec![(x as i64, y as i64)];
                seen[y * w + x] = true;
                let mut area = 0;
                while let Some((cx, cy)) = stack.pop() {
                    area += 1;
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            let (nx, ny) = (cx + dx, cy + dy);
                            if mask.get_signed(nx, ny) && !seen[ny as usize * w + nx as usize] {
                                seen[ny as usize * w + nx as usize] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
                areas.push(area);
            }
        }
        areas.sort_unstable();
        areas
    }

    #[test]
    fn empty_and_diagonal() {
        assert!(connected_components(&BitMask::new(4, 4)).is_empty());
        let m = from_rows(&["#..", ".#.", "..."]);
        let cc = connected_components(&m);
        assert_eq!(cc.len(), 1);
        assert_eq!(cc[0].area(), 2);
        assert_eq!(cc[0].bbox, (0, 0, 1, 1));
    }

    #[test]
    fn ordering_by_first_pixel() {
        let m = from_rows(&["....#", "##...", "....."]);
        let cc = connected_components(&m);
        assert_eq!(cc.len(), 2);
        assert_eq!(cc[0].first(), (4, 0));
        assert_eq!(cc[1].first(), (0, 1));
    }

    #[test]
    fn single_pixel_contour() {
        let m = from_rows(&["...", ".#.", "..."]);
        let c = trace_contours(&m);
        assert_eq!(
            c,
            vec![Contour {
                points: vec![(1, 1)]
            }]
        );
    }

    #[test]
    fn block_contour_is_eight_point_ring() {
        let m = from_rows(&[".....", ".###.", ".###.", ".###.", "....."]);
        let c = trace_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(
            c[0].points,
            vec![
                (1, 1),
                (2, 1),
                (3, 1),
                (3, 2),
                (3, 3),
                (2, 3),
                (1, 3),
                (1, 2)
            ]
        );
    }

    #[test]
    fn thin_ring_traced_completely() {
        let m = from_rows(&[
            "........", "..####..", ".#....#.", ".#....#.", "..####..", "........",
        ]);
        let c = &trace_contours(&m)[0];
        assert_eq!(c.points.len(), 12);
        let unique: HashSet<_> = c.points.iter().collect();
        assert_eq!(unique.len(), 12);
    }

    #[test]
    fn line_contour_walks_both_sides() {
        let m = from_rows(&["....", ".###", "...."]);
        let c = &trace_contours(&m)[0];
        assert_eq!(c.points, vec![(1, 1), (2, 1), (3, 1), (2, 1)]);
    }

    fn arb_mask() -> impl Strategy<Value = BitMask> {
        (1usize..16, 1usize..16, 0.1f64..0.8).prop_flat_map(|(w, h, p)| {
            proptest::collection::vec(proptest::bool::weighted(p), w * h)
                .prop_map(move |bits| BitMask::from_fn(w, h, |x, y| bits[y * w + x]))
        })
    }

    proptest! {
        #[test]
        fn components_match_flood_fill(m in arb_mask()) {
            let cc = connected_components(&m);
            let mut areas: Vec<usize> = cc.iter().map(|c| c.area()).collect();
            areas.sort_unstable();
            prop_assert_eq!(areas, flood_fill_oracle(&m));
            // Disjoint cover of the foreground.
            let mut all: Vec<_> = cc.iter().flat_map(|c| c.pixels.iter().copied()).collect();
            all.sort_unstable_by_key(|&(x, y)| (y, x));
            let n = all.len();
            all.dedup();
            prop_assert_eq!(all.len(), n);
            prop_assert_eq!(n, m.count());
        }

        #[test]
        fn contour_points_are_boundary_pixels(m in arb_mask()) {
            let contours = trace_contours(&m);
            prop_assert_eq!(contours.len(), connected_components(&m).len());
            for c in &contours {
                for w in c.points.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    prop_assert!((a.0 as i64 - b.0 as i64).abs() <= 1 && (a.1 as i64 - b.1 as i64).abs() <= 1);
                }
                for &(x, y) in &c.points {
                    prop_assert!(m.get(x, y));
                    let (xi, yi) = (x as i64, y as i64);
                    let on_border = x == 0 || y == 0 || x + 1 == m.width() || y + 1 == m.height();
                    let clear_4 = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                        .iter()
                        .any(|&(dx, dy)| !m.get_signed(xi + dx, yi + dy));
                    prop_assert!(on_border || clear_4);
                }
            }
        }
    }
}
