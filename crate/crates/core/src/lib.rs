//! Embedded wavelet image coding with SPIHT and STW.
//!
//! The pipeline is: optional RGB -> YCbCr transform ([`pixmap`]), a
//! multi-level 2-D wavelet transform per channel ([`dwt`]), bit-plane
//! zerotree coding ([`codec`], built on the tree geometry in [`zerotree`]),
//! and framing in the `WZC1` container ([`bitstream`]). [`metrics`] measures
//! the result and [`bench`] runs level sweeps over whole images.
//!
//! ```
//! use wzc_core::{compress, decompress, Codec, ColorSpace, EncodeOptions, Pixmap};
//!
//! let image = Pixmap::filled(16, 16, ColorSpace::Rgb, 200);
//! let opts = EncodeOptions { codec: Codec::Stw, levels: 2, ..Default::default() };
//! let bytes = compress(&image, &opts).unwrap();
//! let out = decompress(&bytes).unwrap();
//! assert_eq!(out.image.width(), 16);
//! ```

pub mod bench;
pub mod bitstream;
pub mod codec;
pub mod dwt;
pub mod metrics;
pub mod pipeline;
pub mod pixmap;
pub mod zerotree;

use thiserror::Error;

pub use bitstream::{Codec, ContainerError, ContainerHeader};
pub use codec::{DecodedChannel, EncodedChannel};
pub use dwt::{CoefficientPyramid, DwtError, SubbandLayout, Wavelet};
pub use metrics::{MetricsError, Psnr, QualityReport};
pub use pipeline::{compress, decompress, Decompressed, EncodeOptions};
pub use pixmap::{read_pixmap, write_pixmap, ColorSpace, Pixmap, PixmapError};
pub use zerotree::{NodeIndex, ZerotreeError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pixmap(#[from] PixmapError),
    #[error(transparent)]
    Dwt(#[from] DwtError),
    #[error(transparent)]
    Zerotree(#[from] ZerotreeError),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("image {width}x{height} exceeds the 65535-pixel container limit")]
    TooLarge { width: usize, height: usize },
    #[error("input must be RGB or gray, not YCbCr")]
    YCbCrInput,
    #[error("initial bit plane does not fit the container")]
    PlaneOverflow,
    #[error("channel payload exceeds 2^32 bits")]
    PayloadOverflow,
}
