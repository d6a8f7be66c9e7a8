use super::Point;
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Mean of foreground pixel centres.
pub fn mask_centroid(m: &BinaryMask) -> Result<Point> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for (x, y) in m.foreground() {
        sx += x as f64;
        sy += y as f64;
        n += 1;
    }
    if n == 0 {
        return Err(Error::NoForeground);
    }
    Ok(Point::new(sx / n as f64, sy / n as f64))
}

/// Central second moments `(cxx, cxy, cyy)` of the foreground, per pixel.
fn covariance(m: &BinaryMask, c: Point) -> (f64, f64, f64, usize) {
    let (mut xx, mut xy, mut yy, mut n) = (0.0, 0.0, 0.0, 0usize);
    for (x, y) in m.foreground() {
        let dx = x as f64 - c.x;
        let dy = y as f64 - c.y;
        xx += dx * dx;
        xy += dx * dy;
        yy += dy * dy;
        n += 1;
    }
    let nf = n as f64;
    (xx / nf, xy / nf, yy / nf, n)
}

/// Dominant eigenvector of the foreground coordinate covariance.
///
/// The sign is fixed so that `x >= 0`, and `y > 0` when `x == 0`.
pub fn principal_axis(m: &BinaryMask) -> Result<Point> {
    let c = mask_centroid(m)?;
    let (a, b, d, n) = covariance(m, c);
    if n < 2 {
        return Err(Error::DegenerateAxis);
    }
    let half_gap = ((a - d) * 0.5).hypot(b);
    let trace = a + d;
    if trace <= 0.0 || half_gap <= 1e-9 * trace {
        return Err(Error::DegenerateAxis);
    }
    let lambda = 0.5 * trace + half_gap;
    // (lambda - d, b) and (b, lambda - a) are both eigenvectors; take the
    // better-conditioned one.
    let v1 = Point::new(lambda - d, b);
    let v2 = Point::new(b, lambda - a);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let mut v = v * (1.0 / v.norm());
    if v.x < 0.0 || (v.x == 0.0 && v.y < 0.0) {
        v = v * -1.0;
    }
    // normalise signed zero
    Ok(Point::new(v.x + 0.0, v.y + 0.0))
}

/// Split the foreground by the line through the centroid perpendicular to
/// `axis`.
///
/// Returns `(behind, ahead)`: pixels whose signed projection onto `axis`
/// (relative to the centroid) is negative, and the rest. Pixels within
/// `1e-9` of the line count as ahead.
pub fn split_at_centroid(m: &BinaryMask, axis: Point) -> Result<(BinaryMask, BinaryMask)> {
    if !((axis.norm() - 1.0).abs() < 1e-6) {
        return Err(Error::invalid("split axis must be a unit vector"));
    }
    let c = mask_centroid(m)?;
    let mut behind = BinaryMask::new(m.width(), m.height());
    let mut ahead = BinaryMask::new(m.width(), m.height());
    for (x, y) in m.foreground() {
        let d = (Point::new(x as f64, y as f64) - c).dot(axis);
        if d > -1e-9 {
            ahead.set(x, y, true);
        } else {
            behind.set(x, y, true);
        }
    }
    if behind.is_empty() || ahead.is_empty() {
        return Err(Error::DegenerateSplit);
    }
    Ok((behind, ahead))
}
