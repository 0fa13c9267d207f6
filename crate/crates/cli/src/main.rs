use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wzc_core::bench::{self, Format, SweepConfig};
use wzc_core::bitstream::parse_container_partial;
use wzc_core::metrics::{mse, psnr};
use wzc_core::{compress, decompress, read_pixmap, write_pixmap, Codec, EncodeOptions, Wavelet};

#[derive(Parser)]
#[command(name = "wzc", version, about = "Embedded wavelet image codec (SPIHT / STW)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a PPM/PGM image into a WZC1 container.
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        coding: CodingArgs,
        #[arg(long, default_value_t = 4)]
        levels: u8,
    },
    /// Decode a WZC1 container to PPM (colour) or PGM (gray).
    Decompress { input: PathBuf, output: PathBuf },
    /// Print the header of a WZC1 container.
    Info { input: PathBuf },
    /// Compare two images of the same geometry.
    Metrics { a: PathBuf, b: PathBuf },
    /// Sweep decomposition levels and report distortion and size.
    Bench {
        image: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "spiht,stw")]
        codecs: Vec<CodecArg>,
        /// Range such as `1..8` (inclusive) or a list such as `1,2,4`.
        #[arg(long, default_value = "1..8")]
        levels: String,
        #[arg(long, default_value_t = 10)]
        loops: u8,
        #[arg(long, value_enum, default_value_t = WaveletArg::Cdf97)]
        wavelet: WaveletArg,
        #[arg(long)]
        no_ycc: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
        /// Append per-cell wall time (makes output non-deterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Check the arithmetic of the stored reference tables.
    VerifyPaper {
        /// Also print the stored tables as markdown.
        #[arg(long)]
        tables: bool,
    },
}

#[derive(Args)]
struct CodingArgs {
    #[arg(long, value_enum, default_value_t = CodecArg::Spiht)]
    codec: CodecArg,
    #[arg(long, default_value_t = 10)]
    loops: u8,
    #[arg(long, value_enum, default_value_t = WaveletArg::Cdf97)]
    wavelet: WaveletArg,
    /// Code RGB channels directly instead of converting to YCbCr.
    #[arg(long)]
    no_ycc: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecArg {
    Spiht,
    Stw,
}

impl From<CodecArg> for Codec {
    fn from(c: CodecArg) -> Self {
        match c {
            CodecArg::Spiht => Codec::Spiht,
            CodecArg::Stw => Codec::Stw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveletArg {
    Cdf97,
    Haar,
}

impl From<WaveletArg> for Wavelet {
    fn from(w: WaveletArg) -> Self {
        match w {
            WaveletArg::Cdf97 => Wavelet::Cdf97,
            WaveletArg::Haar => Wavelet::Haar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
}

/// Failure that should still exit nonzero after useful output was written.
#[derive(Debug)]
struct Degraded(String);

impl std::fmt::Display for Degraded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Degraded {}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn parse_levels(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u8, u8) = (
            a.trim().parse().with_context(|| format!("bad level range {s:?}"))?,
            b.trim().parse().with_context(|| format!("bad level range {s:?}"))?,
        );
        if a > b {
            bail!("empty level range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u8>().with_context(|| format!("bad level {t:?}")))
        .collect()
}

/// Shortest decimal rendering with at most four fractional digits.
fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compress {
            input,
            output,
            coding,
            levels,
        } => {
            let image = read_pixmap(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            let opts = EncodeOptions {
                codec: coding.codec.into(),
                wavelet: coding.wavelet.into(),
                levels,
                loops: coding.loops,
                color_transform: !coding.no_ycc,
            };
            let bytes = compress(&image, &opts).with_context(|| format!("compressing {}", input.display()))?;
            write(&output, &bytes)?;
            let bpp = 8.0 * bytes.len() as f64 / (image.width() * image.height() * image.channels()) as f64;
            println!("{} bytes, {:.4} bpp", bytes.len(), bpp);
        }
        Command::Decompress { input, output } => {
            let out = decompress(&read(&input)?).with_context(|| format!("decoding {}", input.display()))?;
            write(&output, &write_pixmap(&out.image, true)?)?;
            if out.truncated {
                return Err(Degraded(format!(
                    "TRUNCATED: {} ended early; wrote best-effort image to {}",
                    input.display(),
                    output.display()
                ))
                .into());
            }
        }
        Command::Info { input } => {
            let bytes = read(&input)?;
            let p = parse_container_partial(&bytes).with_context(|| format!("parsing {}", input.display()))?;
            let h = &p.header;
            println!("codec {}", h.codec.name());
            println!("wavelet {}", h.wavelet.name());
            println!("size {}x{}", h.width, h.height);
            println!("levels {}", h.levels);
            println!("loops {}", h.loops);
            println!("color transform {}", if h.color_transform { "ycbcr" } else { "none" });
            for (i, c) in h.channels.iter().enumerate() {
                let n0 = c.n0.map_or_else(|| "empty".to_string(), |n| n.to_string());
                println!("channel {i}: n0 {n0}, {} bits", c.bit_len);
            }
            println!("total {} bytes", bytes.len());
            if p.truncated {
                return Err(Degraded(format!(
                    "TRUNCATED: {} is shorter than its header declares",
                    input.display()
                ))
                .into());
            }
        }
        Command::Metrics { a, b } => {
            let x = read_pixmap(&read(&a)?).with_context(|| format!("parsing {}", a.display()))?;
            let y = read_pixmap(&read(&b)?).with_context(|| format!("parsing {}", b.display()))?;
            let m = mse(&x, &y)?;
            println!("MSE {}, PSNR {:.2}", short(m), psnr(m)?);
        }
        Command::Bench {
            image,
            codecs,
            levels,
            loops,
            wavelet,
            no_ycc,
            format,
            timing,
        } => {
            let img = read_pixmap(&read(&image)?).with_context(|| format!("parsing {}", image.display()))?;
            let cfg = SweepConfig {
                codecs: codecs.into_iter().map(Codec::from).collect(),
                levels: parse_levels(&levels)?,
                loops,
                wavelet: wavelet.into(),
                color_transform: !no_ycc,
                parallel: std::env::var("WZC_NO_PARALLEL").map_or(true, |v| v != "1"),
            };
            let table = bench::run_sweep(&img, &cfg);
            let format = match format {
                FormatArg::Markdown => Format::Markdown,
                FormatArg::Csv => Format::Csv,
            };
            print!("{}", bench::emit_report(&table, format, timing));
            let failed = table.rows.iter().filter(|r| r.result.is_err()).count();
            if failed > 0 {
                return Err(Degraded(format!("{failed} of {} cells failed", table.rows.len())).into());
            }
        }
        Command::VerifyPaper { tables } => {
            if tables {
                println!("{}", bench::emit_fixture_markdown(&bench::PAPER_TABLES));
            }
            let report = bench::verify_paper_tables(&bench::PAPER_TABLES);
            println!("{report}");
            if !report.all_passed() {
                bail!("table verification failed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
                || matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand)
            {
                e.exit();
            }
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Degraded>() => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
