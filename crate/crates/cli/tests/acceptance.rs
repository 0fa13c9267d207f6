//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wzc_core::codec::{decode_channel, encode_channel, stw_skipped_nodes};
use wzc_core::dwt::{forward_dwt_2d, inverse_dwt_2d, Band};
use wzc_core::metrics::mse_f64;
use wzc_core::pixmap::write_pixmap;
use wzc_core::zerotree::{initial_bitplane, OrientationTrees, SubtreeMax};
use wzc_core::{
    compress, decompress, read_pixmap, Codec, CoefficientPyramid, ColorSpace, EncodeOptions, NodeIndex, Pixmap,
    SubbandLayout, Wavelet,
};

const CODECS: [Codec; 2] = [Codec::Spiht, Codec::Stw];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn seed(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5EED_0000 + criterion)
}

fn wzc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wzc"))
        .args(args)
        .output()
        .expect("spawn wzc")
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {:.2?}, limit {limit:?}", took));
    }
    Ok(took)
}

fn random_layout(rng: &mut ChaCha8Rng, max_side: usize) -> SubbandLayout {
    let max_levels = max_side.trailing_zeros().min(5) as usize;
    let levels = rng.gen_range(1..=max_levels);
    let unit = 1 << levels;
    let w = unit * rng.gen_range(1..=max_side / unit);
    let h = unit * rng.gen_range(1..=max_side / unit);
    SubbandLayout::new(w, h, levels).unwrap()
}

/// Integer pyramid with natural-image-like decay from LL to fine detail.
fn random_pyramid(rng: &mut ChaCha8Rng, max_side: usize) -> CoefficientPyramid {
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

fn full_loops(p: &CoefficientPyramid) -> u32 {
    initial_bitplane(p).map_or(1, |n| n + 1)
}

fn bit_string(codec: Codec, p: &CoefficientPyramid, loops: u32) -> String {
    let e = encode_channel(codec, p, loops).unwrap();
    e.bits
        .to_bools()
        .into_iter()
        .map(|b| if b { '1' } else { '0' })
        .collect()
}

fn sparse(w: usize, h: usize, levels: usize, values: &[(usize, usize, f64)]) -> CoefficientPyramid {
    let mut p = CoefficientPyramid::zeros(SubbandLayout::new(w, h, levels).unwrap(), Wavelet::Haar);
    for &(r, c, v) in values {
        p.set(r, c, v);
    }
    p
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// 1. Table arithmetic via `wzc verify-paper`.
fn table_arithmetic() -> Outcome {
    // (MSE, PSNR) pairs as printed; PSNR recomputed here independently.
    const ROWS: [(f64, f64); 16] = [
        (4.387, 41.71),
        (7.445, 39.41),
        (16.98, 35.83),
        (38.62, 32.26),
        (96.5, 28.29),
        (223.8, 24.63),
        (449.5, 21.6),
        (868.6, 18.74),
        (0.9114, 48.53),
        (3.35, 42.88),
        (9.983, 38.14),
        (27.64, 33.72),
        (76.21, 29.31),
        (191.5, 25.31),
        (401.3, 22.1),
        (806.2, 19.07),
    ];
    for (mse, printed) in ROWS {
        let db = 10.0 * (65025.0 / mse).log10();
        ensure!((db - printed).abs() <= 0.01, "oracle: {mse} -> {db:.4} vs {printed}");
    }

    let start = Instant::now();
    let out = wzc(&["verify-paper"]);
    let took = within(Duration::from_secs(1), start)?;
    ensure!(out.status.success(), "verify-paper exited with {}", out.status);
    let text = String::from_utf8_lossy(&out.stdout);
    let row_passes = text
        .lines()
        .filter(|l| l.starts_with("PASS") && l.contains(" PSNR from MSE "))
        .count();
    ensure!(row_passes == 16, "{row_passes} of 16 row checks passed");
    for label in [
        "SPIHT mean MSE",
        "SPIHT mean PSNR",
        "SPIHT mean CR",
        "STW mean MSE",
        "STW mean PSNR",
        "STW mean CR",
    ] {
        ensure!(
            text.lines().any(|l| l.starts_with(&format!("PASS {label}:"))),
            "missing PASS for {label}"
        );
    }
    ensure!(text.contains("FLAG STW averages swapped"), "swap not flagged");
    ensure!(text.contains("22 checks, 0 failed"), "summary line missing");
    Ok(format!("16 rows, 6 averages, swap flagged in {took:.2?}"))
}

// 2. Transform inverts and Haar preserves energy.
fn dwt_reconstruction() -> Outcome {
    let mut rng = seed(2);
    let start = Instant::now();
    let (mut worst, mut worst_energy) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let x: Vec<f64> = (0..64 * 64).map(|_| rng.gen_range(-300.0..300.0)).collect();
        let ex: f64 = x.iter().map(|v| v * v).sum();
        for wavelet in [Wavelet::Haar, Wavelet::Cdf97] {
            for levels in 1..=6 {
                let p = forward_dwt_2d(&x, 64, 64, levels, wavelet).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs_diff(&x, &inverse_dwt_2d(&p)));
                if wavelet == Wavelet::Haar {
                    let ec: f64 = p.coeffs().iter().map(|v| v * v).sum();
                    worst_energy = worst_energy.max(((ec - ex) / ex).abs());
                }
            }
        }
    }
    let took = within(Duration::from_secs(10), start)?;
    ensure!(worst <= 1e-8, "max reconstruction error {worst:e}");
    ensure!(worst_energy <= 1e-9, "Haar relative energy error {worst_energy:e}");
    Ok(format!(
        "max error {worst:.1e}, Haar energy {worst_energy:.1e}, {took:.2?}"
    ))
}

// 3. Lossless coding of integer pyramids; near-lossless images through the CLI.
fn codec_exactness() -> Outcome {
    let mut rng = seed(3);
    let start = Instant::now();
    for i in 0..100 {
        let p = random_pyramid(&mut rng, 64);
        let loops = full_loops(&p);
        for codec in CODECS {
            let e = encode_channel(codec, &p, loops).unwrap();
            let d = decode_channel(codec, &e.bits, e.n0, loops, p.layout(), p.wavelet()).unwrap();
            let err = max_abs_diff(p.coeffs(), d.pyramid.coeffs());
            ensure!(err < 1.0, "{codec:?} pyramid {i}: |c - c'| = {err}");
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut worst = 0i16;
    for i in 0..12 {
        let cs = if i % 2 == 0 { ColorSpace::Rgb } else { ColorSpace::Gray };
        let (w, h) = (64, 32 + 32 * (i % 2));
        let samples = (0..w * h * cs.channels()).map(|_| rng.gen()).collect();
        let img = Pixmap::new(w, h, cs, samples).unwrap();
        let (src, wzc_path, dst) = (
            dir.path().join("in.pnm"),
            dir.path().join("x.wzc"),
            dir.path().join("out.pnm"),
        );
        std::fs::write(&src, write_pixmap(&img, true).unwrap()).unwrap();
        let levels = (1 + i % 5).to_string();
        let codec = if i % 3 == 0 { "stw" } else { "spiht" };
        let args = [
            "compress",
            src.to_str().unwrap(),
            wzc_path.to_str().unwrap(),
            "--codec",
            codec,
            "--wavelet",
            "haar",
            "--no-ycc",
            "--levels",
            &levels,
            "--loops",
            "40",
        ];
        let out = wzc(&args);
        ensure!(
            out.status.success(),
            "compress: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let out = wzc(&["decompress", wzc_path.to_str().unwrap(), dst.to_str().unwrap()]);
        ensure!(
            out.status.success(),
            "decompress: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let back = read_pixmap(&std::fs::read(&dst).unwrap()).map_err(|e| e.to_string())?;
        ensure!(back.colorspace() == cs, "colour space changed");
        for (&a, &b) in img.samples().iter().zip(back.samples()) {
            worst = worst.max((i16::from(a) - i16::from(b)).abs());
        }
    }
    let took = within(Duration::from_secs(30), start)?;
    ensure!(worst <= 1, "end-to-end pixel deviation {worst}");
    Ok(format!(
        "200 pyramid decodes exact, 12 CLI roundtrips within {worst}, {took:.2?}"
    ))
}

// 4. Mirror, determinism and pinned bitstreams.
fn mirror_and_golden() -> Outcome {
    let mut rng = seed(4);
    for i in 0..200 {
        let p = random_pyramid(&mut rng, 32);
        let loops = rng.gen_range(1..=full_loops(&p) + 2);
        for codec in CODECS {
            let e = encode_channel(codec, &p, loops).unwrap();
            ensure!(
                encode_channel(codec, &p, loops).unwrap() == e,
                "{codec:?} pyramid {i}: not deterministic"
            );
            let d = decode_channel(codec, &e.bits, e.n0, loops, p.layout(), p.wavelet()).unwrap();
            ensure!(
                !d.truncated && d.bits_consumed == e.bits.len(),
                "{codec:?} pyramid {i}: decoder read {} of {} bits",
                d.bits_consumed,
                e.bits.len()
            );
        }
    }

    let two = sparse(2, 2, 1, &[(0, 0, 10.0)]);
    let four = sparse(4, 4, 2, &[(3, 3, 5.0)]);
    for codec in CODECS {
        ensure!(bit_string(codec, &two, 1) == "10000", "{codec:?} 2x2 loops 1");
        ensure!(
            bit_string(codec, &two, 4) == "10000000000010000",
            "{codec:?} 2x2 loops 4"
        );
    }
    ensure!(bit_string(Codec::Spiht, &four, 1) == "000000100010", "SPIHT 4x4 trace");
    ensure!(bit_string(Codec::Stw, &four, 1) == "000000100010", "STW 4x4 trace");

    let fixtures = repo_root().join("crates/core/tests/fixtures");
    let read = |name: &str| std::fs::read(fixtures.join(name)).map_err(|e| format!("{name}: {e}"));
    let single = sparse(8, 8, 2, &[(0, 4, -9.0)]);
    let mixed = sparse(
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
    let cases = [
        ("spiht_8x8_single.bits", Codec::Spiht, &single, 4),
        ("stw_8x8_single.bits", Codec::Stw, &single, 4),
        ("spiht_16x8_mixed.bits", Codec::Spiht, &mixed, 7),
        ("stw_16x8_mixed.bits", Codec::Stw, &mixed, 7),
    ];
    for (name, codec, p, loops) in cases {
        let expected = read(name)?;
        ensure!(
            format!("{}\n", bit_string(codec, p, loops)).as_bytes() == expected,
            "{name} changed"
        );
    }

    let img = read_pixmap(&std::fs::read(repo_root().join("data/astronaut256.ppm")).unwrap()).unwrap();
    let opts = EncodeOptions {
        codec: Codec::Stw,
        ..Default::default()
    };
    ensure!(
        compress(&img, &opts).unwrap() == compress(&img, &opts).unwrap(),
        "container not deterministic"
    );
    for name in ["image32_spiht.wzc", "image32_stw.wzc"] {
        let bytes = read(name)?;
        let out = decompress(&bytes).map_err(|e| format!("{name}: {e}"))?;
        let opts = EncodeOptions {
            codec: out.header.codec,
            wavelet: out.header.wavelet,
            levels: out.header.levels,
            loops: out.header.loops,
            color_transform: out.header.color_transform,
        };
        let img32 = golden_image();
        ensure!(compress(&img32, &opts).unwrap() == bytes, "{name} changed");
    }
    Ok("400 mirrored decodes, hand traces and 6 committed fixtures unchanged".into())
}

fn golden_image() -> Pixmap {
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

// 5. Distortion never rises from one pass boundary to the next.
fn embeddedness() -> Outcome {
    let mut rng = seed(5);
    let mut boundaries = 0;
    for i in 0..20 {
        let p = random_pyramid(&mut rng, 64);
        let loops = full_loops(&p);
        for codec in CODECS {
            let e = encode_channel(codec, &p, loops).unwrap();
            let mut prev = mse_f64(p.coeffs(), &vec![0.0; p.coeffs().len()]).unwrap();
            for (k, &end) in e.pass_ends.iter().enumerate() {
                let d = decode_channel(codec, &e.bits.prefix(end), e.n0, loops, p.layout(), p.wavelet()).unwrap();
                let m = mse_f64(p.coeffs(), d.pyramid.coeffs()).unwrap();
                ensure!(
                    m <= prev,
                    "{codec:?} pyramid {i} ({}x{}, {} levels): MSE {prev} -> {m} after pass {}",
                    p.width(),
                    p.height(),
                    p.layout().levels(),
                    k + 1
                );
                prev = m;
                boundaries += 1;
            }
        }
    }
    Ok(format!("{boundaries} pass boundaries non-increasing"))
}

fn brute_descendants(trees: &OrientationTrees, p: &CoefficientPyramid, m: NodeIndex, n: u32) -> bool {
    trees
        .offspring(m)
        .unwrap()
        .into_iter()
        .any(|o| p.get(o.row, o.col).abs() >= f64::from(1u32 << n) || brute_descendants(trees, p, o, n))
}

// 6. Cached significance, STW skipping and SPIHT/STW agreement.
fn oracle_equivalence() -> Outcome {
    let mut rng = seed(6);
    let mut skipped_total = 0usize;
    for i in 0..1000 {
        let p = random_pyramid(&mut rng, 32);
        let trees = OrientationTrees::new(p.layout());
        let table = SubtreeMax::for_pyramid(&trees, &p);
        let loops = full_loops(&p);
        for m in trees.scan_order() {
            for n in 0..=loops {
                let expect = brute_descendants(&trees, &p, m, n);
                ensure!(
                    table.descendants_significant(trees.index(m), n) == expect,
                    "pyramid {i}: cached significance wrong at {m:?}, plane {n}"
                );
            }
        }
        for (n, skipped) in stw_skipped_nodes(&p, loops).unwrap() {
            skipped_total += skipped.len();
            for m in skipped {
                ensure!(
                    p.get(m.row, m.col).abs() < f64::from(1u32 << n),
                    "pyramid {i}: STW skipped significant {m:?} at plane {n}"
                );
            }
        }
        let a = encode_channel(Codec::Spiht, &p, loops).unwrap();
        let b = encode_channel(Codec::Stw, &p, loops).unwrap();
        ensure!(
            a.pass_ends.len() == b.pass_ends.len(),
            "pyramid {i}: pass counts differ"
        );
        for (k, (&ea, &eb)) in a.pass_ends.iter().zip(&b.pass_ends).enumerate() {
            let da = decode_channel(Codec::Spiht, &a.bits.prefix(ea), a.n0, loops, p.layout(), p.wavelet()).unwrap();
            let db = decode_channel(Codec::Stw, &b.bits.prefix(eb), b.n0, loops, p.layout(), p.wavelet()).unwrap();
            ensure!(
                da.pyramid == db.pyramid,
                "pyramid {i}: decodes differ after pass {}",
                k + 1
            );
        }
    }
    Ok(format!(
        "1000 pyramids, {skipped_total} skipped nodes all insignificant"
    ))
}

// 7. Size falls and distortion rises with decomposition depth.
fn trend() -> Outcome {
    let mut notes = Vec::new();
    for image in ["astronaut256.ppm", "chelsea256.ppm"] {
        let path = repo_root().join("data").join(image);
        let start = Instant::now();
        let out = wzc(&[
            "bench",
            path.to_str().unwrap(),
            "--loops",
            "10",
            "--levels",
            "1..8",
            "--format",
            "csv",
        ]);
        let took = within(Duration::from_secs(60), start)?;
        ensure!(out.status.success(), "bench: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8_lossy(&out.stdout);
        let mut lines = text.lines();
        ensure!(
            lines.next() == Some("codec,level,mse,psnr,cr,size_kb,bytes,note"),
            "unexpected header"
        );
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        ensure!(rows.len() == 16, "{} rows", rows.len());
        for codec in ["SPIHT", "STW"] {
            let cells: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == codec).collect();
            let levels: Vec<&str> = cells.iter().map(|r| r[1].as_str()).collect();
            ensure!(
                levels == ["1", "2", "3", "4", "5", "6", "7", "8"],
                "{codec} levels {levels:?}"
            );
            let mse: Vec<f64> = cells.iter().map(|r| r[2].parse().unwrap()).collect();
            let size: Vec<f64> = cells.iter().map(|r| r[6].parse().unwrap()).collect();
            let mse_inv = mse.windows(2).filter(|w| w[1] < w[0]).count();
            let size_inv = size.windows(2).filter(|w| w[1] > w[0]).count();
            ensure!(mse_inv <= 1, "{image} {codec}: MSE {mse:?}");
            ensure!(size_inv <= 1, "{image} {codec}: bytes {size:?}");
            notes.push(format!("{image} {codec} inversions mse {mse_inv} size {size_inv}"));
        }
        notes.push(format!("{image} {took:.2?}"));
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("reference table arithmetic", table_arithmetic),
        ("DWT perfect reconstruction", dwt_reconstruction),
        ("codec exactness", codec_exactness),
        ("mirror, determinism, golden bitstreams", mirror_and_golden),
        ("embeddedness", embeddedness),
        ("oracle equivalence", oracle_equivalence),
        ("trend reproduction", trend),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
