//! Long-running acceptance checks; see `tests/acceptance.rs`.
