//! Acceptance checks live in `tests/acceptance.rs`; run them with
//! `cargo test -p rmcount-validation --test acceptance`.

use std::io::Write;

/// Writes one `PASS`/`FAIL` line straight to stderr, bypassing the test
/// harness's output capture, and returns `pass`.
pub fn report(criterion: u32, pass: bool, detail: &str) -> bool {
    let line = format!("criterion {criterion:>2}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    pass
}

/// Same, for checks that are reported but never gate.
pub fn inform(criterion: u32, status: &str, detail: &str) {
    let line = format!("criterion {criterion:>2}: {status} {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}
