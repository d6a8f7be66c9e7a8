use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::raster::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    /// Rectangle rotated counter-clockwise on screen by `angle_deg`.
    Rectangle {
        width: f64,
        height: f64,
        angle_deg: f64,
    },
    Disk {
        radius: f64,
    },
    /// Ring sector symmetric about the upward direction.
    AnnulusSector {
        r_inner: f64,
        r_outer: f64,
        angle_deg: f64,
    },
    /// Two straight arms of equal length meeting at `bend_deg` in a round
    /// joint, opening downward. The left arm is the "wall" arm, the right arm
    /// the "canal" arm. `bend_deg = 180` is a straight band.
    BentBand {
        arm_length: f64,
        thickness: f64,
        bend_deg: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub shape: ShapeKind,
    pub raster_width: usize,
    pub raster_height: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Length of the longest medial-axis path, pixels.
    pub cl_true: f64,
    /// Constructed angle, where the shape defines one.
    pub aca_true: Option<f64>,
    pub spec: ShapeSpec,
}

const MARGIN: f64 = 2.0;

impl ShapeSpec {
    pub fn new(shape: ShapeKind, raster_width: usize, raster_height: usize) -> Self {
        Self {
            shape,
            raster_width,
            raster_height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive")))
            }
        };
        match self.shape {
            ShapeKind::Rectangle {
                width,
                height,
                angle_deg,
            } => {
                positive(width, "width")?;
                positive(height, "height")?;
                if !angle_deg.is_finite() {
                    return Err(Error::invalid("angle must be finite"));
                }
            }
            ShapeKind::Disk { radius } => positive(radius, "radius")?,
            ShapeKind::AnnulusSector {
                r_inner,
                r_outer,
                angle_deg,
            } => {
                positive(r_inner, "inner radius")?;
                positive(r_outer - r_inner, "ring thickness")?;
                if !(angle_deg > 0.0 && angle_deg < 360.0) {
                    return Err(Error::invalid("sector angle must be in (0, 360)"));
                }
                let (_, phi_j) = annulus_end_geometry(r_inner, r_outer);
                if angle_deg.to_radians() <= 2.0 * phi_j {
                    return Err(Error::invalid("sector too short for its thickness"));
                }
            }
            ShapeKind::BentBand {
                arm_length,
                thickness,
                bend_deg,
            } => {
                positive(arm_length, "arm length")?;
                positive(thickness, "thickness")?;
                if !(10.0..=180.0).contains(&bend_deg) {
                    return Err(Error::invalid("bend angle must be in [10, 180]"));
                }
            }
        }
        let (lo, hi) = self.local_bbox();
        if hi.x - lo.x + 2.0 * MARGIN > self.raster_width as f64
            || hi.y - lo.y + 2.0 * MARGIN > self.raster_height as f64
        {
            return Err(Error::invalid("shape exceeds raster"));
        }
        Ok(())
    }

    fn local_bbox(&self) -> (Point, Point) {
        let pts = self.outline_points();
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Points whose bounding box is the shape's bounding box.
    fn outline_points(&self) -> Vec<Point> {
        match self.shape {
            ShapeKind::Rectangle {
                width,
                height,
                angle_deg,
            } => {
                let (u, n) = rect_frame(angle_deg);
                [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                    .iter()
                    .map(|&(a, b)| u * (a * width / 2.0) + n * (b * height / 2.0))
                    .collect()
            }
            ShapeKind::Disk { radius } => {
                vec![Point::new(-radius, -radius), Point::new(radius, radius)]
            }
            ShapeKind::AnnulusSector {
                r_inner,
                r_outer,
                angle_deg,
            } => {
                let half = angle_deg.to_radians() / 2.0;
                let steps = 720;
                let mut pts = Vec::new();
                for k in 0..=steps {
                    let psi = -half + 2.0 * half * k as f64 / steps as f64;
                    for r in [r_inner, r_outer] {
                        pts.push(Point::new(r * psi.sin(), -r * psi.cos()));
                    }
                }
                pts
            }
            ShapeKind::BentBand {
                arm_length,
                thickness,
                bend_deg,
            } => {
                let (uw, uc) = band_arms(bend_deg);
                let mut pts = Vec::new();
                for u in [uw, uc] {
                    let n = Point::new(-u.y, u.x);
                    for s in [0.0, arm_length] {
                        for side in [-1.0, 1.0] {
                            pts.push(u * s + n * (side * thickness / 2.0));
                        }
                    }
                }
                let r = thickness / 2.0;
                pts.push(Point::new(-r, -r));
                pts.push(Point::new(r, r));
                pts
            }
        }
    }

    fn contains_local(&self, p: Point) -> bool {
        const EPS: f64 = 1e-9;
        match self.shape {
            ShapeKind::Rectangle {
                width,
                height,
                angle_deg,
            } => {
                let (u, n) = rect_frame(angle_deg);
                p.dot(u).abs() <= width / 2.0 + EPS && p.dot(n).abs() <= height / 2.0 + EPS
            }
            ShapeKind::Disk { radius } => p.norm() <= radius + EPS,
            ShapeKind::AnnulusSector {
                r_inner,
                r_outer,
                angle_deg,
            } => {
                let rho = p.norm();
                let psi = p.x.atan2(-p.y);
                rho >= r_inner - EPS
                    && rho <= r_outer + EPS
                    && psi.abs() <= angle_deg.to_radians() / 2.0 + EPS
            }
            ShapeKind::BentBand {
                arm_length,
                thickness,
                bend_deg,
            } => {
                let half = thickness / 2.0;
                if p.norm() <= half + EPS {
                    return true;
                }
                let (uw, uc) = band_arms(bend_deg);
                [uw, uc].iter().any(|&u| {
                    let s = p.dot(u);
                    s >= -EPS && s <= arm_length + EPS && u.cross(p).abs() <= half + EPS
                })
            }
        }
    }

    /// Analytic length of the longest medial-axis path.
    pub fn cl_true(&self) -> f64 {
        match self.shape {
            ShapeKind::Rectangle { width, height, .. } => {
                let (long, short) = (width.max(height), width.min(height));
                long - short + short * SQRT_2
            }
            ShapeKind::Disk { .. } => 0.0,
            ShapeKind::AnnulusSector {
                r_inner,
                r_outer,
                angle_deg,
            } => annulus_medial_length(r_inner, r_outer, angle_deg.to_radians()),
            ShapeKind::BentBand {
                arm_length,
                thickness,
                ..
            } => 2.0 * arm_length - thickness + thickness * SQRT_2,
        }
    }

    pub fn aca_true(&self) -> Option<f64> {
        match self.shape {
            ShapeKind::Rectangle { .. } => Some(180.0),
            ShapeKind::BentBand { bend_deg, .. } => Some(bend_deg),
            ShapeKind::Disk { .. } | ShapeKind::AnnulusSector { .. } => None,
        }
    }
}

fn rect_frame(angle_deg: f64) -> (Point, Point) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    // counter-clockwise on screen with y down
    (Point::new(c, -s), Point::new(s, c))
}

/// Unit directions of the wall (left) and canal (right) arms from the joint.
pub(crate) fn band_arms(bend_deg: f64) -> (Point, Point) {
    let alpha = (180.0 - bend_deg).to_radians() / 2.0;
    let (s, c) = alpha.sin_cos();
    (Point::new(-c, s), Point::new(c, s))
}

/// Mid-radius and the angular offset from each end of the sector to the
/// junction where the medial arc meets the two end-corner branches.
fn annulus_end_geometry(r_inner: f64, r_outer: f64) -> (f64, f64) {
    let rm = 0.5 * (r_inner + r_outer);
    let half_t = 0.5 * (r_outer - r_inner);
    (rm, (half_t / rm).asin())
}

/// Longest medial path of a ring sector: the mid-radius arc between the two
/// end junctions plus, at each end, the longer of the two branches into the
/// end corners.
///
/// Near an end (the radial segment along angle 0) the inner-corner branch is
/// the locus equidistant from the inner circle and the end line,
/// `rho = r_inner / (1 - sin phi)`; the outer one is
/// `rho = r_outer / (1 + sin phi)`. Both run from `phi = 0` to the junction
/// at `sin phi = (t / 2) / r_mid`. Their lengths are integrated numerically.
pub fn annulus_medial_length(r_inner: f64, r_outer: f64, angle: f64) -> f64 {
    let (rm, phi_j) = annulus_end_geometry(r_inner, r_outer);
    let inner = polar_curve_length(
        |phi| r_inner / (1.0 - phi.sin()),
        |phi| r_inner * phi.cos() / (1.0 - phi.sin()).powi(2),
        phi_j,
    );
    let outer = polar_curve_length(
        |phi| r_outer / (1.0 + phi.sin()),
        |phi| -r_outer * phi.cos() / (1.0 + phi.sin()).powi(2),
        phi_j,
    );
    rm * (angle - 2.0 * phi_j) + 2.0 * inner.max(outer)
}

fn polar_curve_length(rho: impl Fn(f64) -> f64, drho: impl Fn(f64) -> f64, end: f64) -> f64 {
    // composite Simpson
    let n = 2000;
    let h = end / n as f64;
    let f = |phi: f64| rho(phi).hypot(drho(phi));
    let mut acc = f(0.0) + f(end);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Pixel-centre rasterisation: a pixel is set iff its centre lies in the
/// shape. The shape's bounding box is centred in the raster.
pub fn rasterize(spec: &ShapeSpec) -> Result<(BinaryMask, GroundTruth)> {
    spec.validate()?;
    let (lo, hi) = spec.local_bbox();
    let w = spec.raster_width;
    let h = spec.raster_height;
    // first pixel column/row covered, so that an axis-aligned box of integer
    // size covers exactly that many pixels
    let x0 = ((w as f64 - (hi.x - lo.x)) / 2.0).floor();
    let y0 = ((h as f64 - (hi.y - lo.y)) / 2.0).floor();
    let origin = Point::new(x0 - lo.x - 0.5, y0 - lo.y - 0.5);
    let mask = BinaryMask::from_fn(w, h, |x, y| {
        spec.contains_local(Point::new(x as f64, y as f64) - origin)
    });
    Ok((
        mask,
        GroundTruth {
            cl_true: spec.cl_true(),
            aca_true: spec.aca_true(),
            spec: *spec,
        },
    ))
}

/// Shapes shipped as the geometry oracle suite. Every shape is at least
/// 8 px thick and 100 px long.
pub fn oracle_suite() -> Vec<(String, ShapeSpec)> {
    let mut out = Vec::new();
    let raster = 256;
    for (w, h, angle) in [
        (100.0, 20.0, 0.0),
        (160.0, 24.0, 0.0),
        (140.0, 16.0, 0.0),
        (120.0, 30.0, 0.0),
        (100.0, 20.0, 30.0),
    ] {
        let name = if angle == 0.0 {
            format!("rect_{w}x{h}")
        } else {
            format!("rect_{w}x{h}_rot{angle}")
        };
        out.push((
            name,
            ShapeSpec::new(
                ShapeKind::Rectangle {
                    width: w,
                    height: h,
                    angle_deg: angle,
                },
                raster,
                raster,
            ),
        ));
    }
    for (r1, r2, angle) in [(40.0, 60.0, 90.0), (46.0, 54.0, 180.0), (60.0, 76.0, 120.0)] {
        out.push((
            format!("annulus_{r1}_{r2}_{angle}"),
            ShapeSpec::new(
                ShapeKind::AnnulusSector {
                    r_inner: r1,
                    r_outer: r2,
                    angle_deg: angle,
                },
                raster,
                raster,
            ),
        ));
    }
    for bend in [90.0, 105.0, 120.0, 135.0, 150.0, 165.0] {
        out.push((
            format!("band_{bend}"),
            ShapeSpec::new(
                ShapeKind::BentBand {
                    arm_length: 80.0,
                    thickness: 16.0,
                    bend_deg: bend,
                },
                raster,
                raster,
            ),
        ));
    }
    out
}
