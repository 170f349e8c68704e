//! Acceptance checks for `boxdelta`. The checks live in `tests/acceptance.rs`
//! and run last in a workspace test run, printing one PASS/FAIL line each.
