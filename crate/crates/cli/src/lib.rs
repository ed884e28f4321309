//! Library side of the `prefprop` command-line tool: run orchestration,
//! verification checks, demo emitters and the reproducibility manifest.

pub mod demo;
pub mod manifest;
pub mod run;
pub mod verify;

/// Exit codes: success / analysis failure / configuration error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
