//! Bitstreams pinned in `tests/fixtures`. Set `WZC_BLESS=1` to rewrite them
//! after an intentional format change.

use std::fs;
use std::path::PathBuf;

use wzc_core::codec::encode_channel;
use wzc_core::{
    compress, decompress, Codec, CoefficientPyramid, ColorSpace, EncodeOptions, Pixmap, SubbandLayout, Wavelet,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn check(name: &str, actual: &[u8]) {
    let path = fixture(name);
    if std::env::var("WZC_BLESS").as_deref() == Ok("1") {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from the committed fixture");
}

fn bit_string(codec: Codec, p: &CoefficientPyramid, loops: u32) -> String {
    let e = encode_channel(codec, p, loops).unwrap();
    let mut s: String = e
        .bits
        .to_bools()
        .into_iter()
        .map(|b| if b { '1' } else { '0' })
        .collect();
    s.push('\n');
    s
}

fn sparse(w: usize, h: usize, levels: usize, values: &[(usize, usize, f64)]) -> CoefficientPyramid {
    let mut p = CoefficientPyramid::zeros(SubbandLayout::new(w, h, levels).unwrap(), Wavelet::Haar);
    for &(r, c, v) in values {
        p.set(r, c, v);
    }
    p
}

fn test_image() -> Pixmap {
    let (w, h) = (32, 32);
    let samples = (0..w * h * 3)
        .map(|i| {
            let (p, c) = (i / 3, i % 3);
            let (x, y) = (p % w, p / w);
            ((x * 7 + y * 5 + c * 60 + (x * y) % 23) % 256) as u8
        })
        .collect();
    Pixmap::new(w, h, ColorSpace::Rgb, samples).unwrap()
}

#[test]
fn two_by_two_traces() {
    let p = sparse(2, 2, 1, &[(0, 0, 10.0)]);
    for codec in [Codec::Spiht, Codec::Stw] {
        assert_eq!(bit_string(codec, &p, 1), "10000\n");
        assert_eq!(bit_string(codec, &p, 4), "10000000000010000\n");
    }
}

#[test]
fn coefficient_bitstreams() {
    let p = sparse(8, 8, 2, &[(0, 4, -9.0)]);
    check("spiht_8x8_single.bits", bit_string(Codec::Spiht, &p, 4).as_bytes());
    check("stw_8x8_single.bits", bit_string(Codec::Stw, &p, 4).as_bytes());

    let p = sparse(
        16,
        8,
        3,
        &[
            (0, 0, 117.0),
            (0, 1, -40.0),
            (1, 0, 23.0),
            (0, 3, 9.0),
            (5, 5, -6.0),
            (7, 15, 3.0),
            (2, 9, 1.0),
        ],
    );
    check("spiht_16x8_mixed.bits", bit_string(Codec::Spiht, &p, 7).as_bytes());
    check("stw_16x8_mixed.bits", bit_string(Codec::Stw, &p, 7).as_bytes());
}

#[test]
fn container_files() {
    let img = test_image();
    for (codec, name) in [(Codec::Spiht, "image32_spiht.wzc"), (Codec::Stw, "image32_stw.wzc")] {
        let opts = EncodeOptions {
            codec,
            levels: 3,
            loops: 8,
            ..Default::default()
        };
        let bytes = compress(&img, &opts).unwrap();
        assert_eq!(compress(&img, &opts).unwrap(), bytes);
        check(name, &bytes);
        let out = decompress(&bytes).unwrap();
        assert!(!out.truncated);
    }
}

#[test]
fn committed_containers_still_decode() {
    let img = test_image();
    for name in ["image32_spiht.wzc", "image32_stw.wzc"] {
        let bytes = fs::read(fixture(name)).unwrap();
        let out = decompress(&bytes).unwrap();
        assert_eq!((out.image.width(), out.image.height()), (32, 32));
        let m = wzc_core::metrics::mse(&img, &out.image).unwrap();
        assert!(m < 200.0, "{name}: mse {m}");
    }
}
