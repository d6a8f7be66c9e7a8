//! File I/O for frames, masks and HSV range configs.
//!
//! Masks are stored as 8-bit grayscale PNG or binary PGM, 0 for background
//! and 255 for foreground. On read, anything at or above 128 counts as
//! foreground.

use std::fs;
use std::path::Path;

use image::{GrayImage, ImageFormat, Luma, Rgb};

use super::{BinaryMask, HsvRange, RgbImage};
use crate::error::{Error, Result};

pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path)?.to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0).collect();
    RgbImage::new(w as usize, h as usize, pixels)
}

pub fn write_rgb(img: &RgbImage, path: &Path) -> Result<()> {
    let mut out = image::RgbImage::new(img.width() as u32, img.height() as u32);
    for (dst, src) in out.pixels_mut().zip(img.pixels()) {
        *dst = Rgb(*src);
    }
    out.save_with_format(path, ImageFormat::Png)?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = image::open(path)?.to_luma8();
    let (w, h) = img.dimensions();
    let bits = img.pixels().map(|p| p.0[0] >= 128).collect();
    BinaryMask::from_bits(w as usize, h as usize, bits)
}

/// Writes PGM when the extension is `pgm`, PNG otherwise.
pub fn write_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    let mut out = GrayImage::new(mask.width() as u32, mask.height() as u32);
    for (dst, &bit) in out.pixels_mut().zip(mask.bits()) {
        *dst = Luma([if bit { 255 } else { 0 }]);
    }
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let format = if is_pgm {
        ImageFormat::Pnm
    } else {
        ImageFormat::Png
    };
    out.save_with_format(path, format)?;
    Ok(())
}

/// Parse a range config: one `h_lo h_hi s_lo s_hi v_lo v_hi` per line.
/// Blank lines and `#` comments are ignored.
pub fn parse_hsv_ranges(text: &str, origin: &Path) -> Result<Vec<HsvRange>> {
    let mut ranges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(e.to_string()))?;
        let [h_lo, h_hi, s_lo, s_hi, v_lo, v_hi] = nums[..] else {
            return Err(parse_err(format!(
                "expected 6 numbers, found {}",
                nums.len()
            )));
        };
        let range = HsvRange::new(h_lo, h_hi, s_lo, s_hi, v_lo, v_hi)
            .map_err(|e| parse_err(e.to_string()))?;
        ranges.push(range);
    }
    if ranges.is_empty() {
        return Err(Error::NoRanges);
    }
    Ok(ranges)
}

pub fn load_hsv_ranges(path: &Path) -> Result<Vec<HsvRange>> {
    parse_hsv_ranges(&fs::read_to_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_with_comments() {
        let text = "# annotation colours\n40 75 0.5 1 0.5 1\n\n350 10 0.5 1 0.3 1 # red, wraps\n";
        let r = parse_hsv_ranges(text, Path::new("x")).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].h_lo, 350.0);
    }

    #[test]
    fn rejects_short_line() {
        let err = parse_hsv_ranges("1 2 3\n", Path::new("cfg")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_config_has_no_ranges() {
        assert!(matches!(
            parse_hsv_ranges("# nothing\n", Path::new("cfg")),
            Err(Error::NoRanges)
        ));
    }

    #[test]
    fn mask_roundtrip_png_and_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let m = BinaryMask::from_fn(9, 4, |x, y| (x + y) % 3 == 0);
        for name in ["m.png", "m.pgm"] {
            let p = dir.path().join(name);
            write_mask(&m, &p).unwrap();
            assert_eq!(read_mask(&p).unwrap(), m);
        }
    }

    #[test]
    fn rgb_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let img = RgbImage::from_fn(5, 3, |x, y| [x as u8, y as u8, 200]).unwrap();
        let p = dir.path().join("a.png");
        write_rgb(&img, &p).unwrap();
        assert_eq!(read_rgb(&p).unwrap(), img);
    }

    #[test]
    fn corrupt_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.png");
        fs::write(&p, b"not a png").unwrap();
        assert!(read_mask(&p).is_err());
        assert!(read_rgb(&p).is_err());
    }
}
