//! Shared fixtures for the benchmarks.

use spantopos::{Object, Topos};

/// The two-element fork presheaf on the Sierpinski index.
pub fn fork(t: &Topos) -> Object {
    t.presheaf(&[1, 2], &[("u", vec![0, 0])]).expect("fork presheaf")
}
