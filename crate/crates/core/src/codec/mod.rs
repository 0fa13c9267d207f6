//! Bit-plane zerotree coders.
//!
//! Both coders are written once, generic over [`CoderIo`]: the encoder side
//! answers each significance question from the coefficients and writes the
//! answer, the decoder side reads the answer from the stream and updates its
//! reconstruction. Control flow is therefore shared and the decoder consumes
//! exactly the bits the encoder produced.
//!
//! Coefficients are rounded to integers (half away from zero) before coding.

pub mod spiht;
pub mod stw;

use crate::bitstream::{BitBuf, BitReader, BitWriter, Codec, Truncated};
use crate::dwt::{CoefficientPyramid, SubbandLayout, Wavelet};
use crate::zerotree::{max_bitplane, BitplaneSchedule, OrientationTrees, SubtreeMax, ZerotreeError};

pub use spiht::{spiht_decode, spiht_encode};
pub use stw::{stw_decode, stw_encode, stw_skipped_nodes, StwState};

/// Output of an encoder for one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedChannel {
    /// Initial bit plane, `None` when nothing is significant.
    pub n0: Option<u32>,
    pub bits: BitBuf,
    /// Bit offset at the end of each completed pass.
    pub pass_ends: Vec<usize>,
}

impl EncodedChannel {
    fn empty() -> Self {
        Self {
            n0: None,
            bits: BitBuf::default(),
            pass_ends: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedChannel {
    pub pyramid: CoefficientPyramid,
    /// The stream ran out before the schedule finished.
    pub truncated: bool,
    pub bits_consumed: usize,
    pub passes_completed: usize,
}

/// Decoder-side knowledge about one coefficient: its sign and the half-open
/// magnitude interval `[low, high)` it is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReconstructionCell {
    negative: bool,
    low: u64,
    high: u64,
}

impl ReconstructionCell {
    fn significant(n: u32, negative: bool) -> Self {
        Self {
            negative,
            low: 1 << n,
            high: 2 << n,
        }
    }

    pub fn is_significant(&self) -> bool {
        self.high > 0
    }

    fn refine(&mut self, upper: bool) {
        let mid = (self.low + self.high) / 2;
        if upper {
            self.low = mid;
        } else {
            self.high = mid;
        }
    }

    /// Midpoint of the interval. A unit-width interval pins an integer
    /// magnitude exactly, so its lower bound is returned instead.
    pub fn value(&self) -> f64 {
        if !self.is_significant() {
            return 0.0;
        }
        let mag = if self.high - self.low <= 1 {
            self.low as f64
        } else {
            (self.low + self.high) as f64 / 2.0
        };
        if self.negative {
            -mag
        } else {
            mag
        }
    }
}

/// Integer-rounded coefficients in sign/magnitude form.
pub(crate) struct IntegerCoefficients {
    magnitude: Vec<u64>,
    negative: Vec<bool>,
}

impl IntegerCoefficients {
    pub(crate) fn new(p: &CoefficientPyramid) -> Self {
        let rounded: Vec<f64> = p.coeffs().iter().map(|c| c.round()).collect();
        Self {
            magnitude: rounded.iter().map(|c| c.abs().min(u64::MAX as f64) as u64).collect(),
            negative: rounded.iter().map(|c| *c < 0.0).collect(),
        }
    }

    pub(crate) fn n0(&self) -> Option<u32> {
        max_bitplane(self.magnitude.iter().map(|&m| m as f64))
    }
}

/// One side of a coder: answers (encoder) or learns (decoder) each
/// significance, sign and refinement fact.
pub(crate) trait CoderIo {
    fn pixel(&mut self, idx: usize, n: u32) -> Result<bool, Truncated>;
    fn descendants(&mut self, idx: usize, n: u32) -> Result<bool, Truncated>;
    fn grand_descendants(&mut self, idx: usize, n: u32) -> Result<bool, Truncated>;
    /// Follows a positive `pixel` answer: conveys the sign and records the
    /// coefficient as significant at plane `n`.
    fn sign(&mut self, idx: usize, n: u32) -> Result<(), Truncated>;
    fn refine(&mut self, idx: usize, n: u32) -> Result<(), Truncated>;
    fn pass_done(&mut self);
}

pub(crate) struct EncoderIo<'a> {
    coeffs: &'a IntegerCoefficients,
    table: SubtreeMax,
    out: BitWriter,
    pass_ends: Vec<usize>,
}

impl<'a> EncoderIo<'a> {
    pub(crate) fn new(trees: &OrientationTrees, coeffs: &'a IntegerCoefficients) -> Self {
        let mags: Vec<f64> = coeffs.magnitude.iter().map(|&m| m as f64).collect();
        Self {
            coeffs,
            table: SubtreeMax::new(trees, &mags),
            out: BitWriter::new(),
            pass_ends: Vec::new(),
        }
    }

    fn emit(&mut self, bit: bool) -> Result<bool, Truncated> {
        self.out.write_bit(bit);
        Ok(bit)
    }

    pub(crate) fn finish(self, n0: u32) -> EncodedChannel {
        EncodedChannel {
            n0: Some(n0),
            bits: self.out.finish(),
            pass_ends: self.pass_ends,
        }
    }
}

impl CoderIo for EncoderIo<'_> {
    fn pixel(&mut self, idx: usize, n: u32) -> Result<bool, Truncated> {
        let bit = self.coeffs.magnitude[idx] >> n != 0;
        self.emit(bit)
    }

    fn descendants(&mut self, idx: usize, n: u32) -> Result<bool, Truncated> {
        let bit = self.table.descendants_significant(idx, n);
        self.emit(bit)
    }

    fn grand_descendants(&mut self, idx: usize, n: u32) -> Result<bool, Truncated> {
        let bit = self.table.grand_descendants_significant(idx, n);
        self.emit(bit)
    }

    fn sign(&mut self, idx: usize, _n: u32) -> Result<(), Truncated> {
        self.out.write_bit(self.coeffs.negative[idx]);
        Ok(())
    }

    fn refine(&mut self, idx: usize, n: u32) -> Result<(), Truncated> {
        self.out.write_bit(self.coeffs.magnitude[idx] >> n & 1 == 1);
        Ok(())
    }

    fn pass_done(&mut self) {
        self.pass_ends.push(self.out.len());
    }
}

pub(crate) struct DecoderIo<'a> {
    input: BitReader<'a>,
    cells: Vec<ReconstructionCell>,
    passes: usize,
}

impl<'a> DecoderIo<'a> {
    pub(crate) fn new(bits: &'a BitBuf, len: usize) -> Self {
        Self {
            input: bits.reader(),
            cells: vec![ReconstructionCell::default(); len],
            passes: 0,
        }
    }

    pub(crate) fn finish(self, layout: SubbandLayout, wavelet: Wavelet, truncated: bool) -> DecodedChannel {
        let coeffs = self.cells.iter().map(ReconstructionCell::value).collect();
        DecodedChannel {
            pyramid: CoefficientPyramid::from_coeffs(layout, wavelet, coeffs).expect("sized from layout"),
            truncated,
            bits_consumed: self.input.position(),
            passes_completed: self.passes,
        }
    }
}

impl CoderIo for DecoderIo<'_> {
    fn pixel(&mut self, _idx: usize, _n: u32) -> Result<bool, Truncated> {
        self.input.read_bit()
    }

    fn descendants(&mut self, _idx: usize, _n: u32) -> Result<bool, Truncated> {
        self.input.read_bit()
    }

    fn grand_descendants(&mut self, _idx: usize, _n: u32) -> Result<bool, Truncated> {
        self.input.read_bit()
    }

    fn sign(&mut self, idx: usize, n: u32) -> Result<(), Truncated> {
        let negative = self.input.read_bit()?;
        self.cells[idx] = ReconstructionCell::significant(n, negative);
        Ok(())
    }

    fn refine(&mut self, idx: usize, _n: u32) -> Result<(), Truncated> {
        let bit = self.input.read_bit()?;
        self.cells[idx].refine(bit);
        Ok(())
    }

    fn pass_done(&mut self) {
        self.passes += 1;
    }
}

/// Shared encode driver: rounds, finds `n0`, runs `pass_loop` over the encoder side.
pub(crate) fn encode_with(
    p: &CoefficientPyramid,
    loops: u32,
    run: impl FnOnce(&mut EncoderIo<'_>, &OrientationTrees, BitplaneSchedule) -> Result<(), Truncated>,
) -> Result<EncodedChannel, ZerotreeError> {
    if loops == 0 {
        return Err(ZerotreeError::ZeroLoops);
    }
    let coeffs = IntegerCoefficients::new(p);
    let Some(n0) = coeffs.n0() else {
        return Ok(EncodedChannel::empty());
    };
    let trees = OrientationTrees::new(p.layout());
    let schedule = BitplaneSchedule::new(n0, loops)?;
    let mut io = EncoderIo::new(&trees, &coeffs);
    run(&mut io, &trees, schedule).expect("encoder never runs out of bits");
    Ok(io.finish(n0))
}

pub(crate) fn decode_with(
    bits: &BitBuf,
    n0: Option<u32>,
    loops: u32,
    layout: SubbandLayout,
    wavelet: Wavelet,
    run: impl FnOnce(&mut DecoderIo<'_>, &OrientationTrees, BitplaneSchedule) -> Result<(), Truncated>,
) -> Result<DecodedChannel, ZerotreeError> {
    let mut io = DecoderIo::new(bits, layout.len());
    let Some(n0) = n0 else {
        return Ok(io.finish(layout, wavelet, false));
    };
    let trees = OrientationTrees::new(layout);
    let schedule = BitplaneSchedule::new(n0, loops)?;
    let truncated = run(&mut io, &trees, schedule).is_err();
    Ok(io.finish(layout, wavelet, truncated))
}

pub fn encode_channel(codec: Codec, p: &CoefficientPyramid, loops: u32) -> Result<EncodedChannel, ZerotreeError> {
    match codec {
        Codec::Spiht => spiht_encode(p, loops),
        Codec::Stw => stw_encode(p, loops),
    }
}

pub fn decode_channel(
    codec: Codec,
    bits: &BitBuf,
    n0: Option<u32>,
    loops: u32,
    layout: SubbandLayout,
    wavelet: Wavelet,
) -> Result<DecodedChannel, ZerotreeError> {
    match codec {
        Codec::Spiht => spiht_decode(bits, n0, loops, layout, wavelet),
        Codec::Stw => stw_decode(bits, n0, loops, layout, wavelet),
    }
}
