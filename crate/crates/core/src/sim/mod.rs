//! Monte Carlo link simulation: configuration, frame loop, training driver
//! and CSV output.

mod config;
mod csv;
mod runner;
mod train;

pub use config::{DecoderKind, SimConfig};
pub use csv::{emit_csv, parse_csv, strip_timestamp, write_csv, CsvRow, CSV_HEADER, TIMESTAMP_KEY};
pub use runner::{code_sigma, random_frame, run_point, run_sweep, CurvePoint, Simulator};
pub use train::{train_qlbp, train_qlbp_driver, TrainReport, LOG_EVERY};
