use super::BinaryMask;

/// Binary dilation by a `(2r+1) x (2r+1)` square, clipped at the borders.
///
/// A square element is separable, so this runs as a horizontal pass followed
/// by a vertical one.
pub fn dilate(m: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return m.clone();
    }
    let (w, h) = (m.width(), m.height());
    let horizontal = BinaryMask::from_fn(w, h, |x, y| {
        let lo = x.saturating_sub(radius);
        let hi = (x + radius).min(w - 1);
        (lo..=hi).any(|xx| m.get(xx, y))
    });
    BinaryMask::from_fn(w, h, |x, y| {
        let lo = y.saturating_sub(radius);
        let hi = (y + radius).min(h - 1);
        (lo..=hi).any(|yy| horizontal.get(x, yy))
    })
}
