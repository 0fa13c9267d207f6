//! Separable multi-level 2-D discrete wavelet transform.
//!
//! Coefficients are kept in the usual in-place (Mallat) arrangement: after
//! `L` levels the top-left `W/2^L x H/2^L` block holds the approximation band
//! and every level `l` contributes three detail quadrants of size
//! `W/2^l x H/2^l`:
//!
//! ```text
//! +----+----+---------+
//! | LL | LH |         |
//! +----+----+   LH    |
//! | HL | HH |         |
//! +----+----+---------+
//! |         |         |
//! |   HL    |   HH    |
//! |         |         |
//! +---------+---------+
//! ```
//!
//! `LH` is the top-right quadrant (horizontal high-pass), `HL` bottom-left,
//! `HH` bottom-right. Level 1 is the finest.

use std::f64::consts::SQRT_2;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavelet {
    Haar,
    Cdf97,
}

impl Wavelet {
    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Cdf97 => "cdf97",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DwtError {
    #[error("signal length {0} must be even and at least 2")]
    BadLength(usize),
    #[error("approximation/detail length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{width}x{height} is not divisible by 2^{levels}")]
    NotDivisible { width: usize, height: usize, levels: usize },
    #[error("decomposition needs at least one level")]
    ZeroLevels,
    #[error("matrix holds {found} values, {width}x{height} needs {}", width * height)]
    Shape { width: usize, height: usize, found: usize },
}

// CDF 9/7 lifting coefficients.
const ALPHA: f64 = -1.586_134_342;
const BETA: f64 = -0.052_980_118_54;
const GAMMA: f64 = 0.882_911_076_2;
const DELTA: f64 = 0.443_506_852_2;
const K: f64 = 1.149_604_398;

/// Mirror-extended predict/update step: `target[i] += w * (src[i - shift] + src[i - shift + 1])`
/// with whole-sample symmetric extension at both ends.
fn lift(target: &mut [f64], src: &[f64], w: f64, predict: bool) {
    let h = src.len();
    for i in 0..h {
        let (a, b) = if predict {
            // odd sample 2i+1 sees even neighbours 2i and 2i+2 (mirrored past the end)
            (src[i], src[(i + 1).min(h - 1)])
        } else {
            // even sample 2i sees odd neighbours 2i-1 (mirrored at the start) and 2i+1
            (src[i.saturating_sub(1)], src[i])
        };
        target[i] += w * (a + b);
    }
}

fn analyze(s: &mut [f64], d: &mut [f64], wavelet: Wavelet) {
    match wavelet {
        Wavelet::Haar => {
            for (a, b) in s.iter_mut().zip(d.iter_mut()) {
                let (x0, x1) = (*a, *b);
                *a = (x0 + x1) / SQRT_2;
                *b = (x0 - x1) / SQRT_2;
            }
        }
        Wavelet::Cdf97 => {
            lift(d, s, ALPHA, true);
            lift(s, d, BETA, false);
            lift(d, s, GAMMA, true);
            lift(s, d, DELTA, false);
            s.iter_mut().for_each(|v| *v *= K);
            d.iter_mut().for_each(|v| *v /= K);
        }
    }
}

fn synthesize(s: &mut [f64], d: &mut [f64], wavelet: Wavelet) {
    match wavelet {
        Wavelet::Haar => {
            for (a, b) in s.iter_mut().zip(d.iter_mut()) {
                let (lo, hi) = (*a, *b);
                *a = (lo + hi) / SQRT_2;
                *b = (lo - hi) / SQRT_2;
            }
        }
        Wavelet::Cdf97 => {
            s.iter_mut().for_each(|v| *v /= K);
            d.iter_mut().for_each(|v| *v *= K);
            lift(s, d, -DELTA, false);
            lift(d, s, -GAMMA, true);
            lift(s, d, -BETA, false);
            lift(d, s, -ALPHA, true);
        }
    }
}

/// One analysis step: splits `signal` into approximation and detail halves.
pub fn forward_1d(signal: &[f64], wavelet: Wavelet) -> Result<(Vec<f64>, Vec<f64>), DwtError> {
    if signal.len() < 2 || signal.len() % 2 != 0 {
        return Err(DwtError::BadLength(signal.len()));
    }
    let mut s: Vec<f64> = signal.iter().step_by(2).copied().collect();
    let mut d: Vec<f64> = signal.iter().skip(1).step_by(2).copied().collect();
    analyze(&mut s, &mut d, wavelet);
    Ok((s, d))
}

/// Exact inverse of [`forward_1d`].
pub fn inverse_1d(approx: &[f64], detail: &[f64], wavelet: Wavelet) -> Result<Vec<f64>, DwtError> {
    if approx.len() != detail.len() {
        return Err(DwtError::LengthMismatch(approx.len(), detail.len()));
    }
    let mut s = approx.to_vec();
    let mut d = detail.to_vec();
    if !s.is_empty() {
        synthesize(&mut s, &mut d, wavelet);
    }
    Ok(s.into_iter().zip(d).flat_map(|(a, b)| [a, b]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    LL,
    LH,
    HL,
    HH,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.row && row < self.row + self.height && col >= self.col && col < self.col + self.width
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    /// Row-major positions inside the rectangle.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.row..self.row + self.height).flat_map(move |r| (self.col..self.col + self.width).map(move |c| (r, c)))
    }
}

/// Geometry of an `L`-level pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubbandLayout {
    width: usize,
    height: usize,
    levels: usize,
}

impl SubbandLayout {
    pub fn new(width: usize, height: usize, levels: usize) -> Result<Self, DwtError> {
        if levels == 0 {
            return Err(DwtError::ZeroLevels);
        }
        let step = 1usize.checked_shl(levels as u32).unwrap_or(0);
        if width == 0 || height == 0 || step == 0 || width % step != 0 || height % step != 0 {
            return Err(DwtError::NotDivisible { width, height, levels });
        }
        Ok(Self { width, height, levels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Region of `band` at `level`; `None` for `LL` below the top level or
    /// for levels outside `1..=L`.
    pub fn subband_rect(&self, band: Band, level: usize) -> Option<Rect> {
        if level == 0 || level > self.levels {
            return None;
        }
        let (h, w) = (self.height >> level, self.width >> level);
        let (row, col) = match band {
            Band::LL if level == self.levels => (0, 0),
            Band::LL => return None,
            Band::LH => (0, w),
            Band::HL => (h, 0),
            Band::HH => (h, w),
        };
        Some(Rect {
            row,
            col,
            height: h,
            width: w,
        })
    }

    /// Every band of the pyramid, coarse to fine: `LL_L`, then `LH, HL, HH`
    /// for levels `L` down to 1.
    pub fn bands(&self) -> Vec<(Band, usize, Rect)> {
        let mut out = vec![(Band::LL, self.levels, self.subband_rect(Band::LL, self.levels).unwrap())];
        for level in (1..=self.levels).rev() {
            for band in [Band::LH, Band::HL, Band::HH] {
                out.push((band, level, self.subband_rect(band, level).unwrap()));
            }
        }
        out
    }
}

/// Wavelet coefficients of one channel in the in-place subband layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    layout: SubbandLayout,
    wavelet: Wavelet,
    coeffs: Vec<f64>,
}

impl CoefficientPyramid {
    pub fn from_coeffs(layout: SubbandLayout, wavelet: Wavelet, coeffs: Vec<f64>) -> Result<Self, DwtError> {
        if coeffs.len() != layout.len() {
            return Err(DwtError::Shape {
                width: layout.width,
                height: layout.height,
                found: coeffs.len(),
            });
        }
        Ok(Self {
            layout,
            wavelet,
            coeffs,
        })
    }

    pub fn zeros(layout: SubbandLayout, wavelet: Wavelet) -> Self {
        Self {
            layout,
            wavelet,
            coeffs: vec![0.0; layout.len()],
        }
    }

    pub fn layout(&self) -> SubbandLayout {
        self.layout
    }

    pub fn wavelet(&self) -> Wavelet {
        self.wavelet
    }

    pub fn width(&self) -> usize {
        self.layout.width
    }

    pub fn height(&self) -> usize {
        self.layout.height
    }

    pub fn levels(&self) -> usize {
        self.layout.levels
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.coeffs[row * self.layout.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.coeffs[row * self.layout.width + col] = v;
    }

    /// Rounds every coefficient to the nearest integer, ties away from zero.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c = c.round());
        out
    }
}

/// Transforms the top-left `w x h` region one level, rows first.
fn forward_level(data: &mut [f64], stride: usize, w: usize, h: usize, wavelet: Wavelet) {
    let mut s = vec![0.0; w.max(h) / 2];
    let mut d = vec![0.0; w.max(h) / 2];
    for r in 0..h {
        let row = &mut data[r * stride..r * stride + w];
        let half = w / 2;
        for k in 0..half {
            s[k] = row[2 * k];
            d[k] = row[2 * k + 1];
        }
        analyze(&mut s[..half], &mut d[..half], wavelet);
        row[..half].copy_from_slice(&s[..half]);
        row[half..].copy_from_slice(&d[..half]);
    }
    let half = h / 2;
    for c in 0..w {
        for k in 0..half {
            s[k] = data[2 * k * stride + c];
            d[k] = data[(2 * k + 1) * stride + c];
        }
        analyze(&mut s[..half], &mut d[..half], wavelet);
        for k in 0..half {
            data[k * stride + c] = s[k];
            data[(half + k) * stride + c] = d[k];
        }
    }
}

fn inverse_level(data: &mut [f64], stride: usize, w: usize, h: usize, wavelet: Wavelet) {
    let mut s = vec![0.0; w.max(h) / 2];
    let mut d = vec![0.0; w.max(h) / 2];
    let half = h / 2;
    for c in 0..w {
        for k in 0..half {
            s[k] = data[k * stride + c];
            d[k] = data[(half + k) * stride + c];
        }
        synthesize(&mut s[..half], &mut d[..half], wavelet);
        for k in 0..half {
            data[2 * k * stride + c] = s[k];
            data[(2 * k + 1) * stride + c] = d[k];
        }
    }
    let half = w / 2;
    for r in 0..h {
        let row = &mut data[r * stride..r * stride + w];
        s[..half].copy_from_slice(&row[..half]);
        d[..half].copy_from_slice(&row[half..]);
        synthesize(&mut s[..half], &mut d[..half], wavelet);
        for k in 0..half {
            row[2 * k] = s[k];
            row[2 * k + 1] = d[k];
        }
    }
}

/// `levels`-deep decomposition of a row-major `width x height` channel.
pub fn forward_dwt_2d(
    channel: &[f64],
    width: usize,
    height: usize,
    levels: usize,
    wavelet: Wavelet,
) -> Result<CoefficientPyramid, DwtError> {
    let layout = SubbandLayout::new(width, height, levels)?;
    let mut p = CoefficientPyramid::from_coeffs(layout, wavelet, channel.to_vec())?;
    for level in 0..levels {
        forward_level(&mut p.coeffs, width, width >> level, height >> level, wavelet);
    }
    Ok(p)
}

/// Reconstructs the row-major channel from a pyramid.
pub fn inverse_dwt_2d(p: &CoefficientPyramid) -> Vec<f64> {
    let (width, height) = (p.width(), p.height());
    let mut data = p.coeffs.clone();
    for level in (0..p.levels()).rev() {
        inverse_level(&mut data, width, width >> level, height >> level, p.wavelet);
    }
    data
}
