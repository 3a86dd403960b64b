//! Experiment documents, result archives and report emission.

mod archive;
mod config;
mod report;

pub use archive::{read_archive, run_file_name, write_archive, Archive, Manifest, RunEntry, TOOL_VERSION};
pub use config::{
    parse_config, parse_document, serialize_config, Experiment, ExperimentFile, DEFAULT_WINDOW,
};
pub use report::{
    curve_rows, emit_curves, emit_stats_report, emit_summary, format_mean_sd, render_stats, render_summary,
    summarize, CellStats, SummaryTable,
};
