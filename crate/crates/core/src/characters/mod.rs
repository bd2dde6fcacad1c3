//! Exact Dirichlet characters and sequences with bounded partial sums.

mod character;
mod group;
mod sequence;

pub use character::{enumerate_characters, make_character, DirichletCharacter, RootOfUnity};
pub use group::{euler_phi, factorize, CyclicFactor, UnitGroup};
pub use sequence::{BoundedSequence, PeriodicTable, Provenance};

use num_complex::Complex64;

use crate::error::Result;

pub fn unit_group(q: u64) -> Result<UnitGroup> {
    UnitGroup::new(q)
}

/// sum_{n <= t} a(n) for t >= 0.
pub fn partial_sum(seq: &BoundedSequence, t: f64) -> Complex64 {
    seq.partial_sum(t)
}

/// The certified bound alpha on the partial sums of `seq`.
pub fn partial_sum_bound(seq: &BoundedSequence) -> Result<f64> {
    seq.partial_sum_bound()
}
