use std::collections::{HashMap, VecDeque};

use log::warn;

use super::{Point, Polygon};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Keep only the largest 4-connected foreground component.
///
/// Returns the filtered mask and the number of components found. Ties go to
/// the component whose first pixel comes first in row-major order.
pub fn largest_component(m: &BinaryMask) -> (BinaryMask, usize) {
    let (w, h) = (m.width(), m.height());
    let mut label = vec![usize::MAX; w * h];
    let mut sizes: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !m.bits()[start] || label[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        label[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if m.bits()[j] && label[j] == usize::MAX {
                    label[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        sizes.push(size);
    }
    let Some(best) = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
    else {
        return (m.clone(), 0);
    };
    let bits = label.iter().map(|&l| l == best).collect();
    (
        BinaryMask::from_bits(w, h, bits).expect("same dimensions"),
        sizes.len(),
    )
}

// Half-pixel lattice coordinates: a point (x, y) is stored as (2x, 2y).
type Key = (i64, i64);

fn key_to_point(k: Key) -> Point {
    Point::new(k.0 as f64 / 2.0, k.1 as f64 / 2.0)
}

/// Outer outline of the largest foreground component, traced by marching
/// squares at iso-level 0.5.
///
/// Diagonal-only contacts are resolved as separate corners, matching
/// 4-connectivity. Collinear vertices are dropped.
pub fn extract_contour(m: &BinaryMask) -> Result<Polygon> {
    if m.is_empty() {
        return Err(Error::NoForeground);
    }
    let (comp, n_components) = largest_component(m);
    if n_components > 1 {
        warn!("mask has {n_components} components; using the largest");
    }
    let (w, h) = (m.width() as i64, m.height() as i64);
    let at = |x: i64, y: i64| comp.get_signed(x, y);

    let mut next: HashMap<Key, Key> = HashMap::new();
    for cy in -1..h {
        for cx in -1..w {
            let a = at(cx, cy);
            let b = at(cx + 1, cy);
            let c = at(cx + 1, cy + 1);
            let d = at(cx, cy + 1);
            let (x2, y2) = (2 * cx, 2 * cy);
            let top = (x2 + 1, y2);
            let right = (x2 + 2, y2 + 1);
            let bottom = (x2 + 1, y2 + 2);
            let left = (x2, y2 + 1);
            let ca = (x2, y2);
            let cb = (x2 + 2, y2);
            let cc = (x2 + 2, y2 + 2);
            let cd = (x2, y2 + 2);
            // Each segment is paired with a corner on its cut-off side and
            // that corner's state; orientation follows from it.
            let segs: &[(Key, Key, Key, bool)] = match (a, b, c, d) {
                (false, false, false, false) | (true, true, true, true) => &[],
                (true, false, true, false) => &[(left, top, ca, true), (right, bottom, cc, true)],
                (false, true, false, true) => &[(top, right, cb, true), (bottom, left, cd, true)],
                _ => {
                    let n = [a, b, c, d].iter().filter(|&&v| v).count();
                    let seg = match (a, b, c, d) {
                        (true, false, false, false) | (false, true, true, true) => {
                            (left, top, ca, a)
                        }
                        (false, true, false, false) | (true, false, true, true) => {
                            (top, right, cb, b)
                        }
                        (false, false, true, false) | (true, true, false, true) => {
                            (right, bottom, cc, c)
                        }
                        (false, false, false, true) | (true, true, true, false) => {
                            (bottom, left, cd, d)
                        }
                        (true, true, false, false) | (false, false, true, true) => {
                            (left, right, ca, a)
                        }
                        (false, true, true, false) | (true, false, false, true) => {
                            (top, bottom, cb, b)
                        }
                        _ => unreachable!("saddles handled above"),
                    };
                    debug_assert!(n == 1 || n == 2 || n == 3);
                    next_insert(&mut next, seg);
                    continue;
                }
            };
            for &s in segs {
                next_insert(&mut next, s);
            }
        }
    }

    // Walk every loop; keep the one with the largest positive area.
    let mut starts: Vec<Key> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut visited: HashMap<Key, bool> = HashMap::new();
    let mut best: Option<(f64, Vec<Point>)> = None;
    for s in starts {
        if visited.contains_key(&s) {
            continue;
        }
        let mut ring = Vec::new();
        let mut k = s;
        loop {
            visited.insert(k, true);
            ring.push(k);
            k = next[&k];
            if k == s {
                break;
            }
        }
        let pts = simplify_collinear(&ring);
        if pts.len() < 3 {
            continue;
        }
        let area = 0.5
            * (0..pts.len())
                .map(|i| pts[i].cross(pts[(i + 1) % pts.len()]))
                .sum::<f64>();
        if area > 0.0 && best.as_ref().is_none_or(|(a, _)| area > *a) {
            best = Some((area, pts));
        }
    }
    let (_, pts) = best.ok_or(Error::NoForeground)?;
    Polygon::new(pts)
}

fn next_insert(next: &mut HashMap<Key, Key>, (p, q, corner, corner_fg): (Key, Key, Key, bool)) {
    // Foreground must lie on the left of p -> q (positive cross product).
    let d = (q.0 - p.0, q.1 - p.1);
    let r = (corner.0 - p.0, corner.1 - p.1);
    let cross = d.0 * r.1 - d.1 * r.0;
    let (from, to) = if (cross > 0) == corner_fg {
        (p, q)
    } else {
        (q, p)
    };
    let prev = next.insert(from, to);
    debug_assert!(prev.is_none(), "non-manifold contour at {from:?}");
}

fn simplify_collinear(ring: &[Key]) -> Vec<Point> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = ring[(i + n - 1) % n];
        let b = ring[i];
        let c = ring[(i + 1) % n];
        let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
        if cross != 0 {
            out.push(key_to_point(b));
        }
    }
    out
}

/// Points along the outline: every vertex, plus evenly spaced points on each
/// edge so that consecutive samples are at most `spacing` apart.
pub fn boundary_samples(p: &Polygon, spacing: f64) -> Result<Vec<Point>> {
    if !(spacing > 0.0) {
        return Err(Error::invalid("sample spacing must be positive"));
    }
    let mut out = Vec::new();
    for (a, b) in p.edges() {
        out.push(a);
        let len = a.dist(b);
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for k in 1..pieces {
            let t = k as f64 / pieces as f64;
            out.push(a + (b - a) * t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(w: usize, h: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            (x0..x0 + bw).contains(&x) && (y0..y0 + bh).contains(&y)
        })
    }

    #[test]
    fn empty_mask_has_no_foreground() {
        assert!(matches!(
            extract_contour(&BinaryMask::new(5, 5)),
            Err(Error::NoForeground)
        ));
    }

    #[test]
    fn filled_square_outline() {
        let m = block(10, 10, 0, 0, 10, 10);
        let p = extract_contour(&m).unwrap();
        // chamfered square: 100 minus four corner triangles of area 1/8
        assert_eq!(p.area(), 99.5);
        assert_eq!(p.vertices().len(), 8);
    }

    #[test]
    fn single_pixel_is_a_diamond() {
        let m = block(3, 3, 1, 1, 1, 1);
        let p = extract_contour(&m).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.area(), 0.5);
    }

    #[test]
    fn diagonal_pixels_are_separate_components() {
        let mut m = BinaryMask::new(6, 6);
        for (x, y) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3)] {
            m.set(x, y, true);
        }
        let (comp, n) = largest_component(&m);
        assert_eq!(n, 2);
        assert_eq!(comp.count(), 4);
        let p = extract_contour(&m).unwrap();
        assert!(!p.contains(Point::new(3.0, 3.0)));
        assert!(p.contains(Point::new(1.5, 1.5)));
    }

    #[test]
    fn notch_with_diagonal_contact_stays_simple() {
        // (2,2) and (3,3) touch only diagonally but belong to one component
        let m = BinaryMask::from_fn(8, 8, |x, y| {
            (1..=6).contains(&x)
                && (1..=6).contains(&y)
                && !(x == 3 && y == 2)
                && !(x == 2 && y == 3)
                || (x == 3 && y == 3)
        });
        let p = extract_contour(&m).unwrap();
        assert!(p.area() > 0.0);
        for (x, y) in m.foreground() {
            if largest_component(&m).0.get(x, y) {
                assert!(p.contains(Point::new(x as f64, y as f64)), "({x},{y})");
            }
        }
    }

    #[test]
    fn samples_include_vertices_and_respect_spacing() {
        let sq = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(8.0, 0.0),
            Point::new(8.0, 8.0),
            Point::new(0.0, 8.0),
        ])
        .unwrap();
        let s = boundary_samples(&sq, 2.0).unwrap();
        assert!(s.len() >= 16);
        for v in sq.vertices() {
            assert!(s.contains(v));
        }
        assert!(s.iter().all(|p| sq.boundary_distance(*p) < 1e-12));
        let coarse = boundary_samples(&sq, 100.0).unwrap();
        assert_eq!(coarse, sq.vertices().to_vec());
        assert!(boundary_samples(&sq, 0.0).is_err());
    }
}
