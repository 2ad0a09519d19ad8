//! End-to-end acceptance checks for `cubasquare`. The checks live in
//! `tests/acceptance.rs` and print one PASS/FAIL line per criterion.
