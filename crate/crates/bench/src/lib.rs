//! Inputs shared by the criterion benchmarks.

use wzc_core::{read_pixmap, Pixmap};

const ASTRONAUT: &[u8] = include_bytes!("../../../data/astronaut256.ppm");

/// The bundled 256x256 colour test image.
pub fn astronaut() -> Pixmap {
    read_pixmap(ASTRONAUT).expect("bundled image parses")
}

/// Luma-like single plane of the test image, as reals.
pub fn astronaut_plane() -> Vec<f64> {
    astronaut().channel_plane(1)
}
