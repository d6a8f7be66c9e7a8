//! Planar geometry on segmentation masks.
//!
//! The medial skeleton is built from the Voronoi diagram of points sampled
//! densely along the mask outline: Voronoi edges that stay inside the outline
//! approximate the medial axis. The longest leaf-to-leaf path through the
//! pruned skeleton, smoothed, is the centerline.
//!
//! Coordinates are continuous pixel units with `x` to the right and `y`
//! down; pixel `(i, j)` has its centre at `(i, j)`.

mod contour;
mod delaunay;
mod moments;
mod skeleton;

pub use contour::{boundary_samples, extract_contour, largest_component};
pub use delaunay::Triangulation;
pub use moments::{mask_centroid, principal_axis, split_at_centroid};
pub use skeleton::{
    centerline, medial_skeleton, prune_spurs, smooth_polyline, write_points_csv, SkeletonGraph,
    SkeletonParams,
};

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Lexicographic `(x, y)` comparison, used for deterministic tie-breaks.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Unit direction plus anchor point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Point,
    pub direction: Point,
}

impl Line {
    /// Perpendicular distance from `p` to the line.
    pub fn distance(&self, p: Point) -> f64 {
        self.direction.cross(p - self.point).abs()
    }
}

/// Simple closed polygon with positive shoelace area.
///
/// With `y` pointing down, positive shoelace area means the outline appears
/// clockwise on screen; the interior is on the left of every edge in the
/// usual `(x, y)` algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon, reversing the vertex order if needed so the signed
    /// area is positive.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 vertices"));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::invalid("polygon vertices must be finite"));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::invalid("polygon has zero area"));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Even-odd containment; points on the outline count as outside.
    pub fn contains(&self, p: Point) -> bool {
        if self.boundary_distance(p) <= 1e-9 {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let t = (p.y - a.y) / (b.y - a.y);
                if p.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Euclidean distance from `p` to the nearest point of the outline.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Ordered point chain with its cached length.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    arc_length: f64,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("polyline needs at least 2 points"));
        }
        let arc_length = points.windows(2).map(|w| w[0].dist(w[1])).sum();
        Ok(Self { points, arc_length })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn scaled_length(&self, factor: f64) -> f64 {
        self.arc_length * factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> Polygon {
        Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(side, 0.0),
            Point::new(side, side),
            Point::new(0.0, side),
        ])
        .unwrap()
    }

    #[test]
    fn orientation_is_normalised() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 4.0),
            Point::new(4.0, 4.0),
            Point::new(4.0, 0.0),
        ])
        .unwrap();
        assert_eq!(p.area(), 16.0);
    }

    #[test]
    fn containment_excludes_boundary() {
        let sq = square(4.0);
        assert!(sq.contains(Point::new(2.0, 2.0)));
        assert!(!sq.contains(Point::new(4.0, 2.0)));
        assert!(!sq.contains(Point::new(5.0, 2.0)));
        assert_eq!(sq.boundary_distance(Point::new(1.0, 2.0)), 1.0);
    }

    #[test]
    fn degenerate_polygons_rejected() {
        assert!(Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).is_err());
        let collinear = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        assert!(Polygon::new(collinear).is_err());
    }

    #[test]
    fn polyline_length() {
        let pl = Polyline::new(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(3.0, 10.0),
        ])
        .unwrap();
        assert_eq!(pl.arc_length(), 11.0);
        assert!(Polyline::new(vec![Point::new(0.0, 0.0)]).is_err());
    }
}
