//! Matrix loading, benchmark orchestration and reporting for `spca`.

pub mod bench;
pub mod error;
pub mod io;
pub mod report;

pub use bench::{run_bench, BenchConfig, DatasetSource};
pub use error::{BenchError, Result};
pub use report::{chan_gap, Algorithm, BenchRecord, ReportFormat};
