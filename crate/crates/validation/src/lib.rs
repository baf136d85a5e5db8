//! Shared plumbing for the acceptance suite in `tests/acceptance.rs`.
//!
//! Each criterion prints one `criterion N: PASS|FAIL ...` line before its
//! assertion. The line goes to the stderr handle directly, which the test
//! harness does not capture, so it shows up in a plain `cargo test` run.

use std::io::Write;
use std::path::PathBuf;

pub use minimax_cli::core;

/// Repository-level `configs/` directory.
pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Prints the verdict line for criterion `id` and panics on failure.
pub fn verdict(id: u32, title: &str, pass: bool, detail: impl AsRef<str>) {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2}: {status} {title}: {}\n", detail.as_ref());
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {id} ({title}) failed: {}", detail.as_ref());
}
