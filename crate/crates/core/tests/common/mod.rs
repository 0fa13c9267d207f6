#![allow(dead_code)]

use rand::Rng;
use wzc_core::dwt::Band;
use wzc_core::{CoefficientPyramid, SubbandLayout, Wavelet};

/// Random layout with both sides at most `max_side`.
pub fn random_layout<R: Rng>(rng: &mut R, max_side: usize) -> SubbandLayout {
    let max_levels = max_side.trailing_zeros().min(5) as usize;
    let levels = rng.gen_range(1..=max_levels);
    let unit = 1 << levels;
    let w = unit * rng.gen_range(1..=max_side / unit);
    let h = unit * rng.gen_range(1..=max_side / unit);
    SubbandLayout::new(w, h, levels).unwrap()
}

/// Integer coefficients shaped like a natural-image pyramid: large in LL,
/// decaying toward fine detail bands, with many exact zeros.
pub fn random_pyramid<R: Rng>(rng: &mut R, max_side: usize) -> CoefficientPyramid {
    let layout = random_layout(rng, max_side);
    let mut p = CoefficientPyramid::zeros(layout, Wavelet::Haar);
    let top = rng.gen_range(4.0..2000.0f64);
    let sparsity = rng.gen_range(0.0..0.8);
    for (band, level, rect) in layout.bands() {
        let scale = match band {
            Band::LL => top,
            _ => top / 2f64.powi((layout.levels() - level + 1) as i32 + 1),
        };
        for (r, c) in rect.positions() {
            if band != Band::LL && rng.gen_bool(sparsity) {
                continue;
            }
            let mag = -scale * rng.gen_range(1e-6..1.0f64).ln() / 3.0;
            let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            p.set(r, c, (sign * mag).round());
        }
    }
    p
}

/// Loops sufficient to code every plane down to 0.
pub fn full_loops(p: &CoefficientPyramid) -> u32 {
    wzc_core::zerotree::initial_bitplane(p).map_or(1, |n| n + 1)
}
