use std::fmt::Write as _;

use crate::bitstream::Codec;

use super::paper::{PaperRow, PaperTableFixture};
use super::sweep::{ReportRow, ReportTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

const CSV_HEADER: [&str; 8] = ["codec", "level", "mse", "psnr", "cr", "size_kb", "bytes", "note"];

fn cells(row: &ReportRow) -> [String; 8] {
    let (codec, level) = (row.codec.name().to_string(), row.level.to_string());
    match &row.result {
        Ok(q) => [
            codec,
            level,
            format!("{:.4}", q.mse),
            format!("{:.2}", q.psnr),
            format!("{:.2}", q.cr_percent),
            format!("{:.2}", q.size_kb()),
            q.compressed_bytes.to_string(),
            String::new(),
        ],
        Err(e) => [
            codec,
            level,
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            e.clone(),
        ],
    }
}

/// Renders a sweep as markdown (one table per codec) or RFC 4180 CSV.
/// With `timing`, a wall-clock column in milliseconds is appended; leave it
/// off for byte-stable output.
pub fn emit_report(table: &ReportTable, format: Format, timing: bool) -> String {
    match format {
        Format::Csv => emit_csv(table, timing),
        Format::Markdown => emit_markdown(table, timing),
    }
}

fn emit_csv(table: &ReportTable, timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if timing {
        header.push("wall_ms");
    }
    w.write_record(&header).expect("write to Vec");
    for row in &table.rows {
        let mut rec = cells(row).to_vec();
        if timing {
            rec.push(format!("{:.1}", row.wall.as_secs_f64() * 1e3));
        }
        w.write_record(&rec).expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush to Vec")).expect("csv output is utf-8")
}

fn emit_markdown(table: &ReportTable, timing: bool) -> String {
    let mut out = String::new();
    let mut codecs: Vec<Codec> = Vec::new();
    for r in &table.rows {
        if !codecs.contains(&r.codec) {
            codecs.push(r.codec);
        }
    }
    for (i, codec) in codecs.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "### {}\n", codec.name());
        out.push_str("| Level | MSE | PSNR | CR | Size (KB) |");
        out.push_str(if timing { " Time (ms) |\n" } else { "\n" });
        out.push_str("|---|---|---|---|---|");
        out.push_str(if timing { "---|\n" } else { "\n" });
        for row in table.rows_for(codec) {
            let c = cells(row);
            let time = if timing {
                format!(" {:.1} |", row.wall.as_secs_f64() * 1e3)
            } else {
                String::new()
            };
            if row.result.is_ok() {
                let _ = writeln!(out, "| {} | {} | {} | {} | {} |{time}", c[1], c[2], c[3], c[4], c[5]);
            } else {
                let _ = writeln!(out, "| {} | error: {} | | | |{time}", c[1], c[7]);
            }
        }
    }
    out
}

/// Renders the stored reference tables in the same markdown shape as a sweep.
pub fn emit_fixture_markdown(f: &PaperTableFixture) -> String {
    let mut out = String::new();
    let table = |out: &mut String, name: &str, rows: &[PaperRow]| {
        let _ = writeln!(out, "### {name}\n");
        out.push_str("| Level | MSE | PSNR | CR | Size (KB) |\n|---|---|---|---|---|\n");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.level, r.mse, r.psnr, r.cr, r.size_kb
            );
        }
    };
    table(&mut out, "SPIHT", &f.spiht);
    out.push('\n');
    table(&mut out, "STW", &f.stw);
    out
}
