//! Cervical length (CL) and anterior cervical angle (ACA) from a cervix mask.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    centerline, mask_centroid, medial_skeleton, principal_axis, prune_spurs, smooth_polyline,
    split_at_centroid, Line, Point, Polyline, SkeletonParams,
};
use crate::raster::{io::read_mask, BinaryMask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trimester {
    I,
    II,
}

impl fmt::Display for Trimester {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trimester::I => "I",
            Trimester::II => "II",
        })
    }
}

impl FromStr for Trimester {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" | "T1" => Ok(Trimester::I),
            "II" | "2" | "T2" => Ok(Trimester::II),
            other => Err(Error::invalid(format!("unknown trimester {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Px,
    Mm,
}

impl fmt::Display for LengthUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthUnit::Px => "px",
            LengthUnit::Mm => "mm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerRecord {
    pub subject_id: String,
    pub trimester: Trimester,
    pub cl: f64,
    pub cl_units: LengthUnit,
    /// Degrees in (0, 180].
    pub aca: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnteriorSide {
    #[default]
    Top,
    Bottom,
    Left,
    Right,
}

impl FromStr for AnteriorSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "top" => Ok(Self::Top),
            "bottom" => Ok(Self::Bottom),
            "left" => Ok(Self::Left),
            "right" => Ok(Self::Right),
            other => Err(Error::invalid(format!("unknown anterior side {other:?}"))),
        }
    }
}

/// Which end of the principal axis is the internal os.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProximalEnd {
    #[default]
    MinAxis,
    MaxAxis,
}

impl FromStr for ProximalEnd {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min_axis" | "min" => Ok(Self::MinAxis),
            "max_axis" | "max" => Ok(Self::MaxAxis),
            other => Err(Error::invalid(format!("unknown proximal end {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnteriorConvention {
    pub anterior_side: AnteriorSide,
    pub proximal_end: ProximalEnd,
}

impl AnteriorConvention {
    /// Convention for the vertically mirrored image.
    pub fn flipped_vertical(self) -> Self {
        let anterior_side = match self.anterior_side {
            AnteriorSide::Top => AnteriorSide::Bottom,
            AnteriorSide::Bottom => AnteriorSide::Top,
            s => s,
        };
        Self {
            anterior_side,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClParams {
    pub skeleton: SkeletonParams,
    /// Spur pruning length as a fraction of the largest inscribed radius.
    pub prune_frac: f64,
    pub smooth_window: usize,
}

impl Default for ClParams {
    fn default() -> Self {
        Self {
            skeleton: SkeletonParams::default(),
            prune_frac: 0.6,
            smooth_window: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcaParams {
    pub window_frac: f64,
}

impl Default for AcaParams {
    fn default() -> Self {
        Self { window_frac: 0.4 }
    }
}

/// Smoothed centerline of the mask, in pixel coordinates.
pub fn mask_centerline(m: &BinaryMask, params: &ClParams) -> Result<Polyline> {
    let g = medial_skeleton(m, params.skeleton)?;
    let g = prune_spurs(&g, params.prune_frac * g.max_radius());
    let cl = centerline(&g)?;
    smooth_polyline(&cl, params.smooth_window)
}

pub fn estimate_cl(m: &BinaryMask, pixel_spacing: Option<f64>) -> Result<Length> {
    estimate_cl_with(m, pixel_spacing, &ClParams::default())
}

pub fn estimate_cl_with(
    m: &BinaryMask,
    pixel_spacing: Option<f64>,
    params: &ClParams,
) -> Result<Length> {
    if let Some(s) = pixel_spacing {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid("pixel spacing must be positive"));
        }
    }
    let len = mask_centerline(m, params)?.arc_length();
    Ok(match pixel_spacing {
        Some(s) => Length {
            value: len * s,
            unit: LengthUnit::Mm,
        },
        None => Length {
            value: len,
            unit: LengthUnit::Px,
        },
    })
}

/// Principal axis oriented from the proximal end toward the distal end.
fn distal_direction(m: &BinaryMask, conv: AnteriorConvention) -> Result<Point> {
    let axis = principal_axis(m)?;
    Ok(match conv.proximal_end {
        ProximalEnd::MinAxis => axis,
        ProximalEnd::MaxAxis => axis * -1.0,
    })
}

/// Outermost foreground pixel on the anterior side of every column (top or
/// bottom) or row (left or right).
fn anterior_boundary(m: &BinaryMask, side: AnteriorSide) -> Vec<Point> {
    let (w, h) = (m.width(), m.height());
    let mut out = Vec::new();
    match side {
        AnteriorSide::Top | AnteriorSide::Bottom => {
            for x in 0..w {
                let mut ys = (0..h).filter(|&y| m.get(x, y));
                let y = if side == AnteriorSide::Top {
                    ys.next()
                } else {
                    ys.next_back()
                };
                if let Some(y) = y {
                    out.push(Point::new(x as f64, y as f64));
                }
            }
        }
        AnteriorSide::Left | AnteriorSide::Right => {
            for y in 0..h {
                let mut xs = (0..w).filter(|&x| m.get(x, y));
                let x = if side == AnteriorSide::Left {
                    xs.next()
                } else {
                    xs.next_back()
                };
                if let Some(x) = x {
                    out.push(Point::new(x as f64, y as f64));
                }
            }
        }
    }
    out
}

/// Total-least-squares line through `pts`.
fn tls_line(pts: &[Point]) -> Option<Line> {
    let n = pts.len() as f64;
    let c = pts.iter().fold(Point::default(), |a, &p| a + p) * (1.0 / n);
    let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
    for p in pts {
        let d = *p - c;
        xx += d.x * d.x;
        xy += d.x * d.y;
        yy += d.y * d.y;
    }
    let half_gap = ((xx - yy) * 0.5).hypot(xy);
    let lambda = 0.5 * (xx + yy) + half_gap;
    let v1 = Point::new(lambda - yy, xy);
    let v2 = Point::new(xy, lambda - xx);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    if !(v.norm() > 0.0) {
        return None;
    }
    Some(Line {
        point: c,
        direction: v * (1.0 / v.norm()),
    })
}

const MIN_WALL_PIXELS: usize = 5;
const WALL_INLIER_PX: f64 = 2.0;
const WALL_REFITS: usize = 3;

/// Line along the anterior wall near the proximal end.
///
/// Boundary pixels on the anterior side whose principal-axis coordinate lies
/// within `window_frac` of the mask's extent from the proximal end are fitted
/// by total least squares, then refitted on the pixels within 2 px of the
/// previous line. The direction points away from the proximal end.
pub fn fit_anterior_wall(
    m: &BinaryMask,
    conv: AnteriorConvention,
    window_frac: f64,
) -> Result<Line> {
    if !(window_frac > 0.0 && window_frac <= 1.0) {
        return Err(Error::invalid("window fraction must be in (0, 1]"));
    }
    let distal = distal_direction(m, conv)?;
    let c = mask_centroid(m)?;
    let proj = |p: Point| (p - c).dot(distal);
    let (lo, hi) = m
        .foreground()
        .map(|(x, y)| proj(Point::new(x as f64, y as f64)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| {
            (a.min(t), b.max(t))
        });
    let limit = lo + window_frac * (hi - lo);
    let mut pts: Vec<Point> = anterior_boundary(m, conv.anterior_side)
        .into_iter()
        .filter(|&p| proj(p) <= limit + 1e-9)
        .collect();
    if pts.len() < MIN_WALL_PIXELS {
        return Err(Error::WallWindowTooSmall);
    }
    let mut line = tls_line(&pts).ok_or(Error::WallWindowTooSmall)?;
    for _ in 0..WALL_REFITS {
        let inliers: Vec<Point> = pts
            .iter()
            .copied()
            .filter(|&p| line.distance(p) <= WALL_INLIER_PX)
            .collect();
        if inliers.len() < MIN_WALL_PIXELS || inliers.len() == pts.len() {
            break;
        }
        pts = inliers;
        match tls_line(&pts) {
            Some(l) => line = l,
            None => break,
        }
    }
    if line.direction.dot(distal) < 0.0 {
        line.direction = line.direction * -1.0;
    }
    Ok(line)
}

/// Centroids of the regions kept by three successive centroid splits.
///
/// Each split cuts the current region through its centroid perpendicular to
/// its principal axis and keeps the distal half. The axis is oriented to
/// agree with the previous step's direction, starting from the whole mask's
/// proximal-to-distal direction.
pub fn centroid_chain(m: &BinaryMask, conv: AnteriorConvention) -> Result<[Point; 3]> {
    let too_small = |e: Error| match e {
        Error::DegenerateAxis | Error::DegenerateSplit | Error::NoForeground => {
            Error::TooSmallForSplits
        }
        other => other,
    };
    let mut dir = distal_direction(m, conv).map_err(too_small)?;
    let mut region = m.clone();
    let mut out = [Point::default(); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        if i > 0 {
            // an isotropic piece has no axis of its own; keep the last one
            match principal_axis(&region) {
                Ok(axis) => {
                    dir = if axis.dot(dir) < 0.0 {
                        axis * -1.0
                    } else {
                        axis
                    }
                }
                Err(Error::DegenerateAxis) if region.count() >= 2 => {}
                Err(e) => return Err(too_small(e)),
            }
        }
        let (_, ahead) = split_at_centroid(&region, dir).map_err(too_small)?;
        region = ahead;
        *slot = mask_centroid(&region)?;
    }
    Ok(out)
}

pub fn estimate_aca(m: &BinaryMask, conv: AnteriorConvention) -> Result<f64> {
    estimate_aca_with(m, conv, &AcaParams::default())
}

/// Angle at the wall/canal junction between the anterior wall (followed back
/// toward the proximal end) and the canal direction `c2 -> c3`. A straight
/// shape gives 180.
pub fn estimate_aca_with(
    m: &BinaryMask,
    conv: AnteriorConvention,
    params: &AcaParams,
) -> Result<f64> {
    let [_, c2, c3] = centroid_chain(m, conv)?;
    let wall = fit_anterior_wall(m, conv, params.window_frac)?;
    let canal = c3 - c2;
    let cos = (wall.direction.dot(canal) / canal.norm()).clamp(-1.0, 1.0);
    let aca = 180.0 - cos.acos().to_degrees();
    if aca <= 0.0 {
        return Err(Error::Undefined);
    }
    Ok(aca)
}

/// Subject id and trimester from a mask file name: a trailing `_t1`/`_t2`
/// (or `_I`/`_II`) selects the trimester, otherwise trimester I.
pub fn parse_mask_name(path: &Path) -> (String, Trimester) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if let Some((id, tag)) = stem.rsplit_once('_') {
        if let Ok(t) = tag.parse::<Trimester>() {
            if !id.is_empty() {
                return (id.to_string(), t);
            }
        }
    }
    (stem, Trimester::I)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MarkerParams {
    pub cl: ClParams,
    pub aca: AcaParams,
    pub conv: AnteriorConvention,
    pub pixel_spacing: Option<f64>,
}

pub fn markers_for_mask(
    m: &BinaryMask,
    path: &Path,
    params: &MarkerParams,
) -> Result<MarkerRecord> {
    let (subject_id, trimester) = parse_mask_name(path);
    let cl = estimate_cl_with(m, params.pixel_spacing, &params.cl)?;
    let aca = estimate_aca_with(m, params.conv, &params.aca)?;
    Ok(MarkerRecord {
        subject_id,
        trimester,
        cl: cl.value,
        cl_units: cl.unit,
        aca,
    })
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub records: Vec<MarkerRecord>,
    pub failures: Vec<(PathBuf, Error)>,
}

/// Markers for every mask file, in input order. Per-file failures are
/// collected; the batch fails only when every file fails.
pub fn extract_markers_batch(paths: &[PathBuf], params: &MarkerParams) -> Result<BatchOutcome> {
    let results: Vec<Result<MarkerRecord>> = paths
        .iter()
        .map(|p| read_mask(p).and_then(|m| markers_for_mask(&m, p, params)))
        .collect();
    collect_batch(paths, results)
}

/// Split per-file results into records and failures, keeping input order.
pub fn collect_batch(
    paths: &[PathBuf],
    results: Vec<Result<MarkerRecord>>,
) -> Result<BatchOutcome> {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (p, r) in paths.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                warn!("{}: {e}", p.display());
                failures.push((p.clone(), e));
            }
        }
    }
    if !paths.is_empty() && records.is_empty() {
        return Err(Error::AllFailed(failures.len()));
    }
    Ok(BatchOutcome { records, failures })
}

pub const MARKER_CSV_HEADER: &str = "subject_id,trimester,cl,cl_units,aca_deg";

pub fn write_markers_csv<W: Write>(records: &[MarkerRecord], mut out: W) -> Result<()> {
    writeln!(out, "{MARKER_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{:.4},{},{:.4}",
            r.subject_id, r.trimester, r.cl, r.cl_units, r.aca
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{rasterize, ShapeKind, ShapeSpec};

    fn rect(w: f64, h: f64, angle: f64) -> BinaryMask {
        rasterize(&ShapeSpec::new(
            ShapeKind::Rectangle {
                width: w,
                height: h,
                angle_deg: angle,
            },
            256,
            256,
        ))
        .unwrap()
        .0
    }

    fn band(bend: f64) -> BinaryMask {
        rasterize(&ShapeSpec::new(
            ShapeKind::BentBand {
                arm_length: 80.0,
                thickness: 16.0,
                bend_deg: bend,
            },
            256,
            256,
        ))
        .unwrap()
        .0
    }

    #[test]
    fn rectangle_cl() {
        let m = rect(100.0, 20.0, 0.0);
        let px = estimate_cl(&m, None).unwrap();
        assert_eq!(px.unit, LengthUnit::Px);
        assert!((px.value - 108.28).abs() / 108.28 < 0.03, "{}", px.value);
        let mm = estimate_cl(&m, Some(0.1)).unwrap();
        assert_eq!(mm.unit, LengthUnit::Mm);
        assert!((mm.value - 10.828).abs() / 10.828 < 0.03);
        assert!(estimate_cl(&m, Some(0.0)).is_err());
    }

    #[test]
    fn straight_band_is_180() {
        let a = estimate_aca(&rect(160.0, 24.0, 0.0), AnteriorConvention::default()).unwrap();
        assert!((a - 180.0).abs() < 2.0, "{a}");
    }

    #[test]
    fn bent_band_angle_and_mirror() {
        let m = band(120.0);
        let conv = AnteriorConvention::default();
        let a = estimate_aca(&m, conv).unwrap();
        assert!((a - 120.0).abs() < 3.0, "{a}");
        let b = estimate_aca(&m.flip_vertical(), conv.flipped_vertical()).unwrap();
        assert!((a - b).abs() < 0.5, "{a} vs {b}");
    }

    #[test]
    fn wall_of_flat_rectangle() {
        let m = rect(100.0, 20.0, 0.0);
        let top = m.foreground().map(|(_, y)| y).min().unwrap() as f64;
        let l = fit_anterior_wall(&m, AnteriorConvention::default(), 0.4).unwrap();
        assert!((l.direction.x - 1.0).abs() < 1e-9 && l.direction.y.abs() < 1e-9);
        assert!((l.point.y - top).abs() < 1.0);
    }

    #[test]
    fn wall_of_rotated_rectangle() {
        let m = rect(120.0, 24.0, 15.0);
        let l = fit_anterior_wall(&m, AnteriorConvention::default(), 0.4).unwrap();
        // top edge direction on screen for a counter-clockwise rotation
        let expect = Point::new(15f64.to_radians().cos(), -15f64.to_radians().sin());
        let ang = l.direction.dot(expect).clamp(-1.0, 1.0).acos().to_degrees();
        assert!(ang < 2.0, "{ang}");
    }

    #[test]
    fn tiny_window_fails() {
        let m = rect(100.0, 20.0, 0.0);
        assert!(matches!(
            fit_anterior_wall(&m, AnteriorConvention::default(), 0.01),
            Err(Error::WallWindowTooSmall)
        ));
        assert!(fit_anterior_wall(&m, AnteriorConvention::default(), 0.0).is_err());
    }

    #[test]
    fn tiny_shape_cannot_split() {
        let m = BinaryMask::from_fn(10, 10, |x, y| (2..6).contains(&x) && y == 4);
        assert!(matches!(
            centroid_chain(&m, AnteriorConvention::default()),
            Err(Error::TooSmallForSplits)
        ));
    }

    #[test]
    fn mask_names() {
        assert_eq!(
            parse_mask_name(Path::new("a/p07_t2.png")),
            ("p07".into(), Trimester::II)
        );
        assert_eq!(
            parse_mask_name(Path::new("p07_I.png")),
            ("p07".into(), Trimester::I)
        );
        assert_eq!(
            parse_mask_name(Path::new("rect_100x20.png")),
            ("rect_100x20".into(), Trimester::I)
        );
    }

    #[test]
    fn csv_format() {
        let r = MarkerRecord {
            subject_id: "s1".into(),
            trimester: Trimester::II,
            cl: 108.3,
            cl_units: LengthUnit::Px,
            aca: 120.0,
        };
        let mut buf = Vec::new();
        write_markers_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "subject_id,trimester,cl,cl_units,aca_deg\ns1,II,108.3000,px,120.0000\n"
        );
    }
}
