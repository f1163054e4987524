//! Report emission and pipeline orchestration.

pub mod load;
pub mod pipeline;
pub mod score;
pub mod sigmatrix;
pub mod table;

pub use load::load_report_table;
pub use pipeline::{run_pipeline, with_threads, Analysis, FileDigest, PipelineArtifacts, RunOptions, MANIFEST_FILE};
pub use score::{expected_length, score_command, NativeScores, LENGTH_METRIC, NATIVE_VARIANT, ROUGE_METRICS};
pub use sigmatrix::{emit_sig_matrix, load_sig_matrix_csv, sig_table, SigFormat};
pub use table::{fmt4, Cell, Kind, ReportTable};
