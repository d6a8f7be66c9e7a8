use super::RgbImage;
use crate::error::{Error, Result};

fn sample_bilinear(img: &RgbImage, sx: f64, sy: f64) -> [f64; 3] {
    let (w, h) = (img.width(), img.height());
    let sx = sx.clamp(0.0, (w - 1) as f64);
    let sy = sy.clamp(0.0, (h - 1) as f64);
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let (p00, p10, p01, p11) = (
        img.get(x0, y0),
        img.get(x1, y0),
        img.get(x0, y1),
        img.get(x1, y1),
    );
    let mut out = [0.0; 3];
    for c in 0..3 {
        let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
        let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
        out[c] = top * (1.0 - fy) + bottom * fy;
    }
    out
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Bilinear resize with pixel-centre alignment; edge samples are clamped.
pub fn resize_bilinear(img: &RgbImage, width: usize, height: usize) -> Result<RgbImage> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("target size must be at least 1x1"));
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let scale_x = img.width() as f64 / width as f64;
    let scale_y = img.height() as f64 / height as f64;
    RgbImage::from_fn(width, height, |x, y| {
        let sx = (x as f64 + 0.5) * scale_x - 0.5;
        let sy = (y as f64 + 0.5) * scale_y - 0.5;
        sample_bilinear(img, sx, sy).map(to_u8)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentParams {
    /// Rotation about the image centre, degrees.
    pub angle_deg: f64,
    /// Additive brightness offset.
    pub brightness: f64,
    /// Multiplicative contrast gain around mid-gray (128).
    pub contrast: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        Self {
            angle_deg: 0.0,
            brightness: 0.0,
            contrast: 1.0,
        }
    }
}

/// Rotate (bilinear, zero fill) then apply `clamp(gain * (v - 128) + 128 + offset)`.
pub fn augment(img: &RgbImage, params: AugmentParams) -> Result<RgbImage> {
    if !(params.contrast > 0.0) {
        return Err(Error::invalid("contrast gain must be positive"));
    }
    let rotated = if params.angle_deg == 0.0 {
        img.clone()
    } else {
        rotate(img, params.angle_deg)?
    };
    let adjust = |v: u8| to_u8(params.contrast * (v as f64 - 128.0) + 128.0 + params.brightness);
    let pixels = rotated.pixels().iter().map(|p| p.map(adjust)).collect();
    RgbImage::new(img.width(), img.height(), pixels)
}

fn rotate(img: &RgbImage, angle_deg: f64) -> Result<RgbImage> {
    let (w, h) = (img.width(), img.height());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let max_x = (w - 1) as f64;
    let max_y = (h - 1) as f64;
    RgbImage::from_fn(w, h, |x, y| {
        // inverse map: destination -> source
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        let sx = cos * dx + sin * dy + cx;
        let sy = -sin * dx + cos * dy + cy;
        let eps = 1e-9;
        if sx < -eps || sy < -eps || sx > max_x + eps || sy > max_y + eps {
            [0, 0, 0]
        } else {
            sample_bilinear(img, sx, sy).map(to_u8)
        }
    })
}
