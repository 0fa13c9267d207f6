//! Level sweeps, report formatting and the stored reference tables.

pub mod paper;
pub mod report;
pub mod sweep;

pub use paper::{verify_paper_tables, VerificationReport, PAPER_TABLES};
pub use report::{emit_fixture_markdown, emit_report, Format};
pub use sweep::{run_sweep, ReportRow, ReportTable, SweepConfig};
