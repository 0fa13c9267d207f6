//! Distortion and rate measurements.

use std::fmt;

use thiserror::Error;

use crate::pixmap::Pixmap;

pub const PEAK: f64 = 255.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("image geometry differs: {0}x{1}x{2} vs {3}x{4}x{5}")]
    DimensionMismatch(usize, usize, usize, usize, usize, usize),
    #[error("sample count differs: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("mean squared error must be non-negative, got {0}")]
    NegativeMse(f64),
    #[error("byte counts must be positive (original {original}, compressed {compressed})")]
    ZeroBytes { original: usize, compressed: usize },
}

/// Peak signal-to-noise ratio in dB; infinite for identical images.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Psnr(pub f64);

impl Psnr {
    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Mean of squared differences over every sample of every channel.
pub fn mse(a: &Pixmap, b: &Pixmap) -> Result<f64, MetricsError> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(MetricsError::DimensionMismatch(
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels(),
        ));
    }
    let sum: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.samples().len() as f64)
}

/// MSE between two real-valued sequences (e.g. coefficient arrays).
pub fn mse_f64(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64)
}

/// `10 * log10(255^2 / mse)`.
pub fn psnr(mse: f64) -> Result<Psnr, MetricsError> {
    if mse.is_nan() || mse < 0.0 {
        return Err(MetricsError::NegativeMse(mse));
    }
    if mse == 0.0 {
        return Ok(Psnr(f64::INFINITY));
    }
    Ok(Psnr(10.0 * (PEAK * PEAK / mse).log10()))
}

/// Pixel geometry used to express the rate in bits per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    /// Compressed size as a percentage of the original (smaller is better).
    pub cr_percent: f64,
    /// `8 * compressed_bytes / (width * height * channels)`, when geometry is known.
    pub bpp: Option<f64>,
}

pub fn compression_ratio(
    original_bytes: usize,
    compressed_bytes: usize,
    geometry: Option<Geometry>,
) -> Result<Rate, MetricsError> {
    if original_bytes == 0 || compressed_bytes == 0 {
        return Err(MetricsError::ZeroBytes {
            original: original_bytes,
            compressed: compressed_bytes,
        });
    }
    let bpp = geometry.map(|g| 8.0 * compressed_bytes as f64 / g.channels as f64 / (g.width * g.height) as f64);
    Ok(Rate {
        cr_percent: 100.0 * compressed_bytes as f64 / original_bytes as f64,
        bpp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr: Psnr,
    pub cr_percent: f64,
    pub bpp: f64,
    pub original_bytes: usize,
    pub compressed_bytes: usize,
}

impl QualityReport {
    pub fn measure(
        original: &Pixmap,
        decoded: &Pixmap,
        original_bytes: usize,
        compressed_bytes: usize,
    ) -> Result<Self, MetricsError> {
        let mse = mse(original, decoded)?;
        let geometry = Geometry {
            width: original.width(),
            height: original.height(),
            channels: original.channels(),
        };
        let rate = compression_ratio(original_bytes, compressed_bytes, Some(geometry))?;
        Ok(Self {
            mse,
            psnr: psnr(mse)?,
            cr_percent: rate.cr_percent,
            bpp: rate.bpp.expect("geometry supplied"),
            original_bytes,
            compressed_bytes,
        })
    }

    pub fn size_kb(&self) -> f64 {
        self.compressed_bytes as f64 / 1024.0
    }
}
