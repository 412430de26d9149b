//! File formats and run configuration.

mod config;
mod fold;
mod hmt;
mod table;

pub use config::{load_run_config, PathsConfig, RunConfig};
pub use fold::{load_fold_spec, participant_of, FoldId, FoldSpec};
pub use hmt::{decode_hmt, encode_hmt, load_heatmaps, read_hmt, save_heatmaps, write_hmt, HMT_EXTENSION};
pub use table::{
    load_landmark_table, read_landmark_table, save_landmark_table, write_landmark_table,
    LANDMARK_TABLE_HEADER,
};
