use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bitstream::Codec;
use crate::dwt::Wavelet;
use crate::metrics::QualityReport;
use crate::pipeline::{compress, decompress, EncodeOptions};
use crate::pixmap::{write_pixmap, Pixmap};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub codecs: Vec<Codec>,
    /// Decomposition depths to visit.
    pub levels: Vec<u8>,
    /// Coding passes, held fixed across levels.
    pub loops: u8,
    pub wavelet: Wavelet,
    pub color_transform: bool,
    /// Run cells on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            codecs: vec![Codec::Spiht, Codec::Stw],
            levels: (1..=8).collect(),
            loops: 10,
            wavelet: Wavelet::Cdf97,
            color_transform: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub codec: Codec,
    pub level: u8,
    /// Measurements, or why the cell could not run.
    pub result: Result<QualityReport, String>,
    pub wall: Duration,
}

/// One row per requested (codec, level) cell, ordered by codec then level.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn rows_for(&self, codec: Codec) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.codec == codec)
    }
}

fn run_cell(image: &Pixmap, original_bytes: usize, opts: &EncodeOptions) -> Result<QualityReport, Error> {
    let bytes = compress(image, opts)?;
    let decoded = decompress(&bytes)?;
    Ok(QualityReport::measure(
        image,
        &decoded.image,
        original_bytes,
        bytes.len(),
    )?)
}

/// Encodes and decodes `image` once per (codec, level) cell and measures
/// each reconstruction. A failing cell is recorded and the rest still run.
pub fn run_sweep(image: &Pixmap, cfg: &SweepConfig) -> ReportTable {
    let original_bytes = write_pixmap(image, true)
        .map(|b| b.len())
        .unwrap_or(image.samples().len());
    let cells: Vec<(Codec, u8)> = cfg
        .codecs
        .iter()
        .flat_map(|&c| cfg.levels.iter().map(move |&l| (c, l)))
        .collect();
    let work = |&(codec, level): &(Codec, u8)| {
        let opts = EncodeOptions {
            codec,
            wavelet: cfg.wavelet,
            levels: level,
            loops: cfg.loops,
            color_transform: cfg.color_transform,
        };
        let start = Instant::now();
        let result = run_cell(image, original_bytes, &opts).map_err(|e| e.to_string());
        ReportRow {
            codec,
            level,
            result,
            wall: start.elapsed(),
        }
    };
    let rows = if cfg.parallel {
        cells.par_iter().map(work).collect()
    } else {
        cells.iter().map(work).collect()
    };
    ReportTable { rows }
}
