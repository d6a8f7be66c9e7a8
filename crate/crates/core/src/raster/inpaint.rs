use super::{BinaryMask, RgbImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InpaintParams {
    pub max_iters: usize,
    /// Convergence threshold on the largest per-channel update, in intensity units.
    pub tol: f64,
}

impl Default for InpaintParams {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            tol: 0.5,
        }
    }
}

/// Fill the `hole` pixels of `img` by 4-neighbour diffusion.
///
/// Each sweep visits hole pixels in row-major order and replaces them with the
/// mean of their neighbours that are either outside the hole or already
/// filled (Gauss-Seidel). Sweeps stop once every hole pixel has a value and
/// the largest update falls below `tol`, or after `max_iters` sweeps.
pub fn inpaint(img: &RgbImage, hole: &BinaryMask, params: InpaintParams) -> Result<RgbImage> {
    let (w, h) = (img.width(), img.height());
    if hole.width() != w || hole.height() != h {
        return Err(Error::DimensionMismatch(format!(
            "hole is {}x{}, image is {w}x{h}",
            hole.width(),
            hole.height()
        )));
    }
    let hole_idx: Vec<usize> = (0..w * h).filter(|&i| hole.bits()[i]).collect();
    if hole_idx.is_empty() {
        return Ok(img.clone());
    }
    if hole_idx.len() == w * h {
        return Err(Error::NothingKnown);
    }

    let mut values: Vec<[f64; 3]> = img.pixels().iter().map(|p| p.map(|c| c as f64)).collect();
    let mut filled: Vec<bool> = hole.bits().iter().map(|&b| !b).collect();

    for _ in 0..params.max_iters {
        let mut max_change = 0.0f64;
        let mut pending = false;
        for &i in &hole_idx {
            let (x, y) = (i % w, i / w);
            let mut sum = [0.0; 3];
            let mut n = 0usize;
            let mut take = |j: usize| {
                if filled[j] {
                    for c in 0..3 {
                        sum[c] += values[j][c];
                    }
                    n += 1;
                }
            };
            if x > 0 {
                take(i - 1);
            }
            if x + 1 < w {
                take(i + 1);
            }
            if y > 0 {
                take(i - w);
            }
            if y + 1 < h {
                take(i + w);
            }
            if n == 0 {
                pending = true;
                continue;
            }
            let next = sum.map(|s| s / n as f64);
            if filled[i] {
                for c in 0..3 {
                    max_change = max_change.max((next[c] - values[i][c]).abs());
                }
            } else {
                filled[i] = true;
                max_change = f64::INFINITY;
            }
            values[i] = next;
        }
        if !pending && max_change < params.tol {
            break;
        }
    }

    let pixels = values
        .iter()
        .zip(img.pixels())
        .zip(hole.bits())
        .map(|((v, orig), &in_hole)| {
            if in_hole {
                v.map(|c| c.round().clamp(0.0, 255.0) as u8)
            } else {
                *orig
            }
        })
        .collect();
    RgbImage::new(w, h, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_hole(w: usize, h: usize, x0: usize, y0: usize, size: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            (x0..x0 + size).contains(&x) && (y0..y0 + size).contains(&y)
        })
    }

    #[test]
    fn empty_hole_is_identity() {
        let img = RgbImage::from_fn(6, 5, |x, y| [x as u8 * 10, y as u8 * 20, 7]).unwrap();
        let out = inpaint(&img, &BinaryMask::new(6, 5), InpaintParams::default()).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn uniform_image_stays_uniform() {
        let img = RgbImage::filled(12, 9, [40, 200, 90]).unwrap();
        let out = inpaint(&img, &block_hole(12, 9, 2, 2, 5), InpaintParams::default()).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn full_hole_errors() {
        let img = RgbImage::filled(3, 3, [1, 2, 3]).unwrap();
        let hole = BinaryMask::from_fn(3, 3, |_, _| true);
        assert!(matches!(
            inpaint(&img, &hole, InpaintParams::default()),
            Err(Error::NothingKnown)
        ));
    }

    #[test]
    fn mismatched_hole_errors() {
        let img = RgbImage::filled(3, 3, [1, 2, 3]).unwrap();
        assert!(inpaint(&img, &BinaryMask::new(4, 3), InpaintParams::default()).is_err());
    }

    #[test]
    fn hole_touching_border_still_fills() {
        let img = RgbImage::filled(8, 8, [100, 100, 100]).unwrap();
        let out = inpaint(&img, &block_hole(8, 8, 0, 0, 4), InpaintParams::default()).unwrap();
        assert_eq!(out, img);
    }
}
