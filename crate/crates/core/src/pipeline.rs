//! Image-level compression: colour transform, per-channel wavelet transform
//! and zerotree coding, framed in a `WZC1` container.

use crate::bitstream::{
    parse_container_partial, serialize_container, BitBuf, ChannelEntry, Codec, ContainerHeader, EMPTY_N0,
};
use crate::codec::{decode_channel, encode_channel};
use crate::dwt::{forward_dwt_2d, inverse_dwt_2d, SubbandLayout, Wavelet};
use crate::pixmap::{rgb_to_ycbcr, ycbcr_to_rgb, ColorSpace, Pixmap};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub codec: Codec,
    pub wavelet: Wavelet,
    pub levels: u8,
    pub loops: u8,
    /// Convert RGB input to YCbCr before coding. Ignored for gray images.
    pub color_transform: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            codec: Codec::Spiht,
            wavelet: Wavelet::Cdf97,
            levels: 4,
            loops: 10,
            color_transform: true,
        }
    }
}

/// Compresses `image` into container bytes.
pub fn compress(image: &Pixmap, opts: &EncodeOptions) -> Result<Vec<u8>, Error> {
    let (width, height) = (image.width(), image.height());
    let dims = (u16::try_from(width), u16::try_from(height));
    let (Ok(w16), Ok(h16)) = dims else {
        return Err(Error::TooLarge { width, height });
    };
    let layout = SubbandLayout::new(width, height, usize::from(opts.levels))?;
    let color_transform = opts.color_transform && image.colorspace() == ColorSpace::Rgb;
    let source = match image.colorspace() {
        ColorSpace::Rgb if color_transform => rgb_to_ycbcr(image)?,
        ColorSpace::YCbCr => return Err(Error::YCbCrInput),
        _ => image.clone(),
    };

    let mut entries = Vec::with_capacity(source.channels());
    let mut payloads = Vec::with_capacity(source.channels());
    for c in 0..source.channels() {
        let plane = source.channel_plane(c);
        let pyramid = forward_dwt_2d(&plane, layout.width(), layout.height(), layout.levels(), opts.wavelet)?;
        let coded = encode_channel(opts.codec, &pyramid, u32::from(opts.loops))?;
        let n0 = match coded.n0 {
            None => None,
            Some(n) => Some(
                u8::try_from(n)
                    .ok()
                    .filter(|&b| b != EMPTY_N0)
                    .ok_or(Error::PlaneOverflow)?,
            ),
        };
        let bit_len = u32::try_from(coded.bits.len()).map_err(|_| Error::PayloadOverflow)?;
        entries.push(ChannelEntry { n0, bit_len });
        payloads.push(coded.bits.into_bytes());
    }

    let header = ContainerHeader {
        codec: opts.codec,
        wavelet: opts.wavelet,
        color_transform,
        levels: opts.levels,
        loops: opts.loops,
        width: w16,
        height: h16,
        channels: entries,
    };
    Ok(serialize_container(&header, &payloads)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decompressed {
    pub header: ContainerHeader,
    pub image: Pixmap,
    /// Some channel ran out of bits; `image` is a best-effort reconstruction.
    pub truncated: bool,
}

/// Decodes container bytes. A short payload section still yields an image,
/// with `truncated` set.
pub fn decompress(bytes: &[u8]) -> Result<Decompressed, Error> {
    let partial = parse_container_partial(bytes)?;
    let h = &partial.header;
    let (width, height) = (usize::from(h.width), usize::from(h.height));
    let layout = SubbandLayout::new(width, height, usize::from(h.levels))?;

    let mut truncated = partial.truncated;
    let mut planes = Vec::with_capacity(h.channels.len());
    for (entry, payload) in h.channels.iter().zip(partial.payloads) {
        let available = payload.len() * 8;
        let bits = BitBuf::from_bytes(payload, (entry.bit_len as usize).min(available));
        let decoded = decode_channel(
            h.codec,
            &bits,
            entry.n0.map(u32::from),
            u32::from(h.loops),
            layout,
            h.wavelet,
        )?;
        truncated |= decoded.truncated;
        planes.push(inverse_dwt_2d(&decoded.pyramid));
    }

    let colorspace = match (planes.len(), h.color_transform) {
        (1, _) => ColorSpace::Gray,
        (_, true) => ColorSpace::YCbCr,
        _ => ColorSpace::Rgb,
    };
    let mut image = Pixmap::from_planes(width, height, colorspace, &planes)?;
    if colorspace == ColorSpace::YCbCr {
        image = ycbcr_to_rgb(&image)?;
    }
    Ok(Decompressed {
        header: partial.header,
        image,
        truncated,
    })
}
