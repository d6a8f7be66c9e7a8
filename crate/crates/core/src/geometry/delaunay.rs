//! Bowyer-Watson Delaunay triangulation with exact orientation and
//! in-circle predicates.

use std::collections::HashMap;

use robust::Coord;

use super::Point;

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Delaunay triangulation of a point set.
///
/// Duplicate input points are collapsed. Triangles are stored
/// counter-clockwise (positive orientation in `(x, y)` algebra) and index
/// into [`Triangulation::points`].
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// For each input point, its index in `points`.
    input_map: Vec<usize>,
}

impl Triangulation {
    pub fn new(input: &[Point]) -> Self {
        let mut points: Vec<Point> = Vec::with_capacity(input.len() + 3);
        let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
        let mut input_map = Vec::with_capacity(input.len());
        for &p in input {
            let key = (p.x.to_bits(), p.y.to_bits());
            let idx = *seen.entry(key).or_insert_with(|| {
                points.push(p);
                points.len() - 1
            });
            input_map.push(idx);
        }
        let n = points.len();
        if n < 3 {
            return Self {
                points,
                triangles: Vec::new(),
                input_map,
            };
        }

        // Super-triangle far outside the bounding box.
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in &points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let c = (lo + hi) * 0.5;
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1.0) * 1e5;
        points.push(Point::new(c.x - 2.0 * span, c.y - span));
        points.push(Point::new(c.x + 2.0 * span, c.y - span));
        points.push(Point::new(c.x, c.y + 2.0 * span));

        let mut tris: Vec<[usize; 3]> = vec![orient_ccw(&points, [n, n + 1, n + 2])];
        let mut boundary: HashMap<(usize, usize), (usize, usize, u32)> = HashMap::new();
        for i in 0..n {
            let p = coord(points[i]);
            boundary.clear();
            let mut keep = Vec::with_capacity(tris.len() + 2);
            for t in tris.drain(..) {
                let [a, b, cc] = t.map(|k| coord(points[k]));
                if robust::incircle(a, b, cc, p) > 0.0 {
                    for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                        let key = (u.min(v), u.max(v));
                        boundary
                            .entry(key)
                            .and_modify(|e| e.2 += 1)
                            .or_insert((u, v, 1));
                    }
                } else {
                    keep.push(t);
                }
            }
            let mut cavity: Vec<(usize, usize)> = boundary
                .values()
                .filter(|e| e.2 == 1)
                .map(|e| (e.0, e.1))
                .collect();
            cavity.sort_unstable();
            keep.extend(cavity.into_iter().map(|(u, v)| [u, v, i]));
            tris = keep;
        }
        tris.retain(|t| t.iter().all(|&k| k < n));
        points.truncate(n);
        Self {
            points,
            triangles: tris,
            input_map,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Index into [`Triangulation::points`] of the `i`-th input point.
    pub fn input_index(&self, i: usize) -> usize {
        self.input_map[i]
    }

    /// Circumcentre and circumradius of triangle `t`.
    pub fn circumcircle(&self, t: usize) -> (Point, f64) {
        let [a, b, c] = self.triangles[t].map(|k| self.points[k]);
        circumcircle(a, b, c)
    }

    /// Pairs of triangles sharing an edge, with the shared edge's endpoints.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = Vec::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for (u, v) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (u.min(v), u.max(v));
                if let Some(other) = owner.remove(&key) {
                    pairs.push((other, ti, key.0, key.1));
                } else {
                    owner.insert(key, ti);
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }
}

fn orient_ccw(points: &[Point], t: [usize; 3]) -> [usize; 3] {
    let [a, b, c] = t.map(|k| coord(points[k]));
    if robust::orient2d(a, b, c) > 0.0 {
        t
    } else {
        [t[0], t[2], t[1]]
    }
}

pub(crate) fn circumcircle(a: Point, b: Point, c: Point) -> (Point, f64) {
    // Relative to `a` for precision.
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    let bb = b.dot(b);
    let cc = c.dot(c);
    let ux = (c.y * bb - b.y * cc) / d;
    let uy = (b.x * cc - c.x * bb) / d;
    let center = Point::new(ux, uy);
    (a + center, center.norm())
}
