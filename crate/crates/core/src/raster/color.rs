use super::{BinaryMask, RgbImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    /// Hue in degrees, `[0, 360)`.
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Closed box in HSV space. Hue wraps around when `h_lo > h_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvRange {
    pub h_lo: f64,
    pub h_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl HsvRange {
    pub fn new(h_lo: f64, h_hi: f64, s_lo: f64, s_hi: f64, v_lo: f64, v_hi: f64) -> Result<Self> {
        let r = Self {
            h_lo,
            h_hi,
            s_lo,
            s_hi,
            v_lo,
            v_hi,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let hue_ok = |h: f64| (0.0..=360.0).contains(&h);
        let unit_ok = |v: f64| (0.0..=1.0).contains(&v);
        if !hue_ok(self.h_lo) || !hue_ok(self.h_hi) {
            return Err(Error::invalid("hue bounds must lie in [0, 360]"));
        }
        if ![self.s_lo, self.s_hi, self.v_lo, self.v_hi]
            .into_iter()
            .all(unit_ok)
        {
            return Err(Error::invalid("saturation/value bounds must lie in [0, 1]"));
        }
        if self.s_lo > self.s_hi || self.v_lo > self.v_hi {
            return Err(Error::invalid("lower bound exceeds upper bound"));
        }
        Ok(())
    }

    pub fn contains(&self, p: HsvPixel) -> bool {
        let hue_in = if self.h_lo <= self.h_hi {
            p.h >= self.h_lo && p.h <= self.h_hi
        } else {
            p.h >= self.h_lo || p.h <= self.h_hi
        };
        hue_in && p.s >= self.s_lo && p.s <= self.s_hi && p.v >= self.v_lo && p.v <= self.v_hi
    }

    /// Default annotation bands: saturated, bright yellow through cyan.
    pub fn default_annotation_ranges() -> Vec<HsvRange> {
        vec![
            // yellow
            HsvRange::new(40.0, 75.0, 0.5, 1.0, 0.5, 1.0).unwrap(),
            // green
            HsvRange::new(75.0, 150.0, 0.5, 1.0, 0.5, 1.0).unwrap(),
            // cyan
            HsvRange::new(150.0, 200.0, 0.5, 1.0, 0.5, 1.0).unwrap(),
        ]
    }
}

/// Hexcone RGB to HSV. Achromatic pixels get `h = 0, s = 0`.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> HsvPixel {
    let [r, g, b] = rgb.map(|c| c as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta == 0.0 {
        return HsvPixel {
            h: 0.0,
            s: 0.0,
            v: max,
        };
    }
    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h >= 360.0 {
        h -= 360.0;
    }
    HsvPixel {
        h,
        s: delta / max,
        v: max,
    }
}

pub fn mask_by_hsv_ranges(img: &RgbImage, ranges: &[HsvRange]) -> Result<BinaryMask> {
    if ranges.is_empty() {
        return Err(Error::NoRanges);
    }
    let bits = img
        .pixels()
        .iter()
        .map(|&p| {
            let hsv = rgb_to_hsv(p);
            ranges.iter().any(|r| r.contains(hsv))
        })
        .collect();
    BinaryMask::from_bits(img.width(), img.height(), bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn primaries_and_gray() {
        let red = rgb_to_hsv([255, 0, 0]);
        assert_eq!((red.h, red.s, red.v), (0.0, 1.0, 1.0));
        let green = rgb_to_hsv([0, 255, 0]);
        assert_eq!((green.h, green.s, green.v), (120.0, 1.0, 1.0));
        let gray = rgb_to_hsv([128, 128, 128]);
        assert_eq!((gray.h, gray.s), (0.0, 0.0));
        assert_abs_diff_eq!(gray.v, 128.0 / 255.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gray.v, 0.502, epsilon = 1e-3);
    }

    #[test]
    fn blue_and_magenta_hues() {
        assert_eq!(rgb_to_hsv([0, 0, 255]).h, 240.0);
        assert_eq!(rgb_to_hsv([255, 0, 255]).h, 300.0);
        // hue just below 360 must not wrap to 360
        let h = rgb_to_hsv([255, 0, 1]).h;
        assert!(h > 359.0 && h < 360.0, "{h}");
    }

    #[test]
    fn empty_range_list_errors() {
        let img = RgbImage::filled(2, 2, [0, 0, 0]).unwrap();
        assert!(matches!(
            mask_by_hsv_ranges(&img, &[]),
            Err(Error::NoRanges)
        ));
    }

    #[test]
    fn gray_image_never_matches_saturated_range() {
        let img = RgbImage::filled(5, 4, [90, 90, 90]).unwrap();
        let m = mask_by_hsv_ranges(&img, &HsvRange::default_annotation_ranges()).unwrap();
        assert!(m.is_empty());
        assert_eq!((m.width(), m.height()), (5, 4));
    }

    #[test]
    fn centre_colour_fills_mask() {
        let range = HsvRange::new(100.0, 140.0, 0.6, 1.0, 0.6, 1.0).unwrap();
        let img = RgbImage::filled(3, 3, [0, 255, 0]).unwrap();
        assert_eq!(mask_by_hsv_ranges(&img, &[range]).unwrap().count(), 9);
    }

    #[test]
    fn red_gray_pair() {
        let red_range = HsvRange::new(340.0, 20.0, 0.5, 1.0, 0.5, 1.0).unwrap();
        let img = RgbImage::new(2, 1, vec![[255, 0, 0], [128, 128, 128]]).unwrap();
        let m = mask_by_hsv_ranges(&img, &[red_range]).unwrap();
        assert_eq!(m.bits(), &[true, false]);
    }

    #[test]
    fn hue_wraparound() {
        let r = HsvRange::new(350.0, 10.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(r.contains(HsvPixel {
            h: 355.0,
            s: 0.5,
            v: 0.5
        }));
        assert!(r.contains(HsvPixel {
            h: 5.0,
            s: 0.5,
            v: 0.5
        }));
        assert!(!r.contains(HsvPixel {
            h: 180.0,
            s: 0.5,
            v: 0.5
        }));
    }

    #[test]
    fn invalid_ranges_rejected() {
        assert!(HsvRange::new(0.0, 10.0, 0.8, 0.2, 0.0, 1.0).is_err());
        assert!(HsvRange::new(0.0, 400.0, 0.0, 1.0, 0.0, 1.0).is_err());
    }
}
