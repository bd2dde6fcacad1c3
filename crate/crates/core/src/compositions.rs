//! The constrained compositions indexing the terms of the integral kernel.
//!
//! For rank r these are the vectors k = (k_1, ..., k_r) with
//! k_1 + ... + k_r = r, k_1 + ... + k_i <= i and 0 <= k_i <= i, weighted by
//! C(1, k_1) * prod_{i >= 2} C(i - k_1 - ... - k_{i-1}, k_i).

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{arg_err, Result};

pub const MAX_RANK: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionTerm {
    pub k: Vec<u32>,
    pub coeff: u64,
}

/// C(n, j) with the convention C(n, j) = 0 for j < 0 or j > n.
pub fn binomial(n: i64, j: i64) -> u64 {
    if j < 0 || n < 0 || j > n {
        return 0;
    }
    let j = j.min(n - j) as u64;
    let n = n as u64;
    // exact: each partial product is itself a binomial coefficient
    (0..j).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn check_constraints(k: &[u32]) -> Result<()> {
    let r = k.len();
    if r == 0 {
        return arg_err("composition must be non-empty");
    }
    let mut prefix = 0u32;
    for (idx, &ki) in k.iter().enumerate() {
        let i = idx as u32 + 1;
        if ki > i {
            return arg_err(format!("k_{i} = {ki} exceeds {i}"));
        }
        prefix += ki;
        if prefix > i {
            return arg_err(format!("k_1 + ... + k_{i} = {prefix} exceeds {i}"));
        }
    }
    if prefix as usize != r {
        return arg_err(format!("entries sum to {prefix}, expected {r}"));
    }
    Ok(())
}

/// The binomial-product coefficient of a constrained composition.
pub fn coefficient(k: &[u32]) -> Result<u64> {
    check_constraints(k)?;
    Ok(coefficient_unchecked(k))
}

pub(crate) fn coefficient_unchecked(k: &[u32]) -> u64 {
    let mut prefix = 0i64;
    let mut c = 1u64;
    for (idx, &ki) in k.iter().enumerate() {
        let top = if idx == 0 { 1 } else { idx as i64 + 1 - prefix };
        c *= binomial(top, ki as i64);
        prefix += ki as i64;
    }
    c
}

fn generate(r: usize, pos: usize, prefix: u32, k: &mut Vec<u32>, out: &mut Vec<CompositionTerm>) {
    if pos == r {
        if prefix as usize == r {
            let coeff = coefficient_unchecked(k);
            out.push(CompositionTerm {
                k: k.clone(),
                coeff,
            });
        }
        return;
    }
    let i = pos as u32 + 1;
    // prefix <= i - 1 here, so i - prefix is both the prefix cap and <= i
    for ki in (0..=i - prefix).rev() {
        k.push(ki);
        generate(r, pos + 1, prefix + ki, k, out);
        k.pop();
    }
}

fn build(r: usize) -> Vec<CompositionTerm> {
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    generate(r, 0, 0, &mut Vec::with_capacity(r), &mut out);
    out
}

static MEMO: OnceLock<Vec<Vec<CompositionTerm>>> = OnceLock::new();

/// All constrained compositions of rank r in decreasing lexicographic order.
pub fn enumerate_compositions(r: usize) -> Result<&'static [CompositionTerm]> {
    if r == 0 || r > MAX_RANK {
        return arg_err(format!("rank must be in 1..={MAX_RANK}, got {r}"));
    }
    let memo = MEMO.get_or_init(|| (0..=MAX_RANK).map(build).collect());
    Ok(&memo[r])
}
