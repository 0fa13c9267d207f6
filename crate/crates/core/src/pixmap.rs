//! Netpbm (PGM/PPM) reading and writing, plus the RGB <-> YCbCr transform
//! applied before per-channel coding.
//!
//! Only 8-bit images (`maxval` 255) are accepted. Both the ASCII (`P2`/`P3`)
//! and raw (`P5`/`P6`) variants are parsed; `#` comments may appear anywhere
//! in the header.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    Gray,
    Rgb,
    YCbCr,
}

impl ColorSpace {
    pub fn channels(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            ColorSpace::Rgb | ColorSpace::YCbCr => 3,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PixmapError {
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: &'static str },
    #[error("unsupported maxval {maxval} at byte {offset} (only 255 is supported)")]
    UnsupportedMaxval { offset: usize, maxval: u32 },
    #[error("zero image dimension at byte {offset}")]
    ZeroDimension { offset: usize },
    #[error("truncated sample data at byte {offset}: expected {expected} samples, got {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid ASCII sample at byte {offset}")]
    BadSample { offset: usize },
    #[error("sample buffer holds {found} values, {expected} required for the geometry")]
    SampleCount { expected: usize, found: usize },
    #[error("expected {expected:?} colour space, got {found:?}")]
    WrongColorSpace { expected: ColorSpace, found: ColorSpace },
}

/// An 8-bit image with interleaved channels, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    width: usize,
    height: usize,
    colorspace: ColorSpace,
    samples: Vec<u8>,
}

impl Pixmap {
    pub fn new(width: usize, height: usize, colorspace: ColorSpace, samples: Vec<u8>) -> Result<Self, PixmapError> {
        if width == 0 || height == 0 {
            return Err(PixmapError::ZeroDimension { offset: 0 });
        }
        let expected = width * height * colorspace.channels();
        if samples.len() != expected {
            return Err(PixmapError::SampleCount {
                expected,
                found: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            colorspace,
            samples,
        })
    }

    /// A constant image; every sample set to `value`.
    pub fn filled(width: usize, height: usize, colorspace: ColorSpace, value: u8) -> Self {
        let n = width * height * colorspace.channels();
        Self::new(width, height, colorspace, vec![value; n]).expect("consistent geometry")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.colorspace.channels()
    }

    pub fn colorspace(&self) -> ColorSpace {
        self.colorspace
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// De-interleaves channel `c` into a `width * height` plane of reals.
    pub fn channel_plane(&self, c: usize) -> Vec<f64> {
        let nc = self.channels();
        self.samples.iter().skip(c).step_by(nc).map(|&s| f64::from(s)).collect()
    }

    /// Interleaves planes back into a pixmap, rounding half-up and clamping
    /// to `[0, 255]`.
    pub fn from_planes(
        width: usize,
        height: usize,
        colorspace: ColorSpace,
        planes: &[Vec<f64>],
    ) -> Result<Self, PixmapError> {
        let nc = colorspace.channels();
        if planes.len() != nc || planes.iter().any(|p| p.len() != width * height) {
            return Err(PixmapError::SampleCount {
                expected: width * height * nc,
                found: planes.iter().map(Vec::len).sum(),
            });
        }
        let mut samples = Vec::with_capacity(width * height * nc);
        for i in 0..width * height {
            for plane in planes {
                samples.push(round_clamp(plane[i]));
            }
        }
        Self::new(width, height, colorspace, samples)
    }
}

/// Round half-up, then clamp into the 8-bit range.
pub fn round_clamp(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<(usize, u32), PixmapError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or(PixmapError::MalformedHeader {
                    offset: start,
                    reason: "numeric field overflows",
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PixmapError::MalformedHeader {
                offset: start,
                reason: what,
            });
        }
        Ok((start, value))
    }
}

/// Parses a PGM or PPM image.
pub fn read_pixmap(bytes: &[u8]) -> Result<Pixmap, PixmapError> {
    let (colorspace, binary) = match bytes.get(..2) {
        Some(b"P2") => (ColorSpace::Gray, false),
        Some(b"P5") => (ColorSpace::Gray, true),
        Some(b"P3") => (ColorSpace::Rgb, false),
        Some(b"P6") => (ColorSpace::Rgb, true),
        _ => {
            return Err(PixmapError::MalformedHeader {
                offset: 0,
                reason: "expected magic P2, P3, P5 or P6",
            })
        }
    };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => {
            return Err(PixmapError::MalformedHeader {
                offset: 2,
                reason: "expected whitespace after magic",
            })
        }
    }
    let (w_off, width) = cur.number("expected width")?;
    let (h_off, height) = cur.number("expected height")?;
    if width == 0 {
        return Err(PixmapError::ZeroDimension { offset: w_off });
    }
    if height == 0 {
        return Err(PixmapError::ZeroDimension { offset: h_off });
    }
    let (m_off, maxval) = cur.number("expected maxval")?;
    if maxval != 255 {
        return Err(PixmapError::UnsupportedMaxval { offset: m_off, maxval });
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width * height * colorspace.channels();

    let samples = if binary {
        // Exactly one whitespace byte separates the header from raster data.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(PixmapError::MalformedHeader {
                    offset: cur.pos,
                    reason: "expected single whitespace before raster",
                })
            }
        }
        let data = &bytes[cur.pos..];
        if data.len() < expected {
            return Err(PixmapError::Truncated {
                offset: bytes.len(),
                expected,
                found: data.len(),
            });
        }
        data[..expected].to_vec()
    } else {
        let mut samples = Vec::with_capacity(expected);
        for _ in 0..expected {
            cur.skip_whitespace_and_comments();
            if cur.pos >= bytes.len() {
                return Err(PixmapError::Truncated {
                    offset: cur.pos,
                    expected,
                    found: samples.len(),
                });
            }
            let (off, v) = cur
                .number("expected sample")
                .map_err(|_| PixmapError::BadSample { offset: cur.pos })?;
            if v > 255 {
                return Err(PixmapError::BadSample { offset: off });
            }
            samples.push(v as u8);
        }
        samples
    };
    Pixmap::new(width, height, colorspace, samples)
}

/// Serializes to PGM/PPM. `binary` selects `P5`/`P6` over `P2`/`P3`.
pub fn write_pixmap(p: &Pixmap, binary: bool) -> Result<Vec<u8>, PixmapError> {
    let magic = match (p.colorspace, binary) {
        (ColorSpace::Gray, true) => "P5",
        (ColorSpace::Gray, false) => "P2",
        (ColorSpace::Rgb, true) => "P6",
        (ColorSpace::Rgb, false) => "P3",
        (ColorSpace::YCbCr, _) => {
            return Err(PixmapError::WrongColorSpace {
                expected: ColorSpace::Rgb,
                found: ColorSpace::YCbCr,
            })
        }
    };
    let mut out = format!("{magic}\n{} {}\n255\n", p.width, p.height).into_bytes();
    if binary {
        out.extend_from_slice(&p.samples);
    } else {
        let per_row = p.width * p.channels();
        for row in p.samples.chunks(per_row) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

fn map_pixels(
    p: &Pixmap,
    from: ColorSpace,
    to: ColorSpace,
    f: impl Fn(f64, f64, f64) -> [f64; 3],
) -> Result<Pixmap, PixmapError> {
    if p.colorspace != from {
        return Err(PixmapError::WrongColorSpace {
            expected: from,
            found: p.colorspace,
        });
    }
    let samples = p
        .samples
        .chunks_exact(3)
        .flat_map(|px| f(f64::from(px[0]), f64::from(px[1]), f64::from(px[2])).map(round_clamp))
        .collect();
    Pixmap::new(p.width, p.height, to, samples)
}

/// Full-range BT.601 (JFIF) forward transform.
pub fn rgb_to_ycbcr(p: &Pixmap) -> Result<Pixmap, PixmapError> {
    map_pixels(p, ColorSpace::Rgb, ColorSpace::YCbCr, |r, g, b| {
        [
            0.299 * r + 0.587 * g + 0.114 * b,
            128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b,
            128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b,
        ]
    })
}

pub fn ycbcr_to_rgb(p: &Pixmap) -> Result<Pixmap, PixmapError> {
    map_pixels(p, ColorSpace::YCbCr, ColorSpace::Rgb, |y, cb, cr| {
        let (cb, cr) = (cb - 128.0, cr - 128.0);
        [y + 1.402 * cr, y - 0.344136 * cb - 0.714136 * cr, y + 1.772 * cb]
    })
}
