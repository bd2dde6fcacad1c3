//! The integrand kernel, region predicates and the derivative identity
//! linking the kernels of consecutive ranks.
//!
//! With x_i = n0 + t_1 + ... + t_i the rank-r kernel is
//!
//! ```text
//! K(t) = sum_k coeff(k) prod_i (s_i)_{k_i} x_i^{-(s_i + k_i)}
//! ```
//!
//! summed over [`enumerate_compositions`]. Bases are always >= 1, so complex
//! powers use the real logarithm of the base.

use num_complex::Complex64;
use serde::Serialize;

use crate::compositions::{enumerate_compositions, CompositionTerm};
use crate::error::{arg_err, Result};

/// The argument vector (s_1, ..., s_r) together with the shift n0.
#[derive(Debug, Clone, PartialEq)]
pub struct SPoint {
    s: Vec<Complex64>,
    n0: u64,
}

impl SPoint {
    pub fn new(s: Vec<Complex64>, n0: u64) -> Result<Self> {
        if s.is_empty() {
            return arg_err("s must have at least one coordinate");
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return arg_err("s must be finite");
        }
        Ok(Self { s, n0 })
    }

    /// Real arguments, n0 = 0.
    pub fn real(sigma: &[f64]) -> Result<Self> {
        Self::new(sigma.iter().map(|&x| Complex64::new(x, 0.0)).collect(), 0)
    }

    pub fn with_n0(mut self, n0: u64) -> Self {
        self.n0 = n0;
        self
    }

    pub fn r(&self) -> usize {
        self.s.len()
    }

    pub fn s(&self) -> &[Complex64] {
        &self.s
    }

    pub fn sigma(&self) -> Vec<f64> {
        self.s.iter().map(|z| z.re).collect()
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn conj(&self) -> Self {
        Self {
            s: self.s.iter().map(Complex64::conj).collect(),
            n0: self.n0,
        }
    }

    /// sigma_i + ... + sigma_r for i = 1..=r (index i-1).
    pub fn suffix_sigma(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.r()];
        let mut acc = 0.0;
        for i in (0..self.r()).rev() {
            acc += self.s[i].re;
            out[i] = acc;
        }
        out
    }
}

/// Rising factorial (s)_k = s (s+1) ... (s+k-1), (s)_0 = 1.
pub fn pochhammer(s: Complex64, k: u32) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (s + j as f64))
}

/// Every suffix sum sigma_r + ... + sigma_{r-i} is positive.
pub fn in_domain_d(p: &SPoint) -> bool {
    p.suffix_sigma().iter().all(|&v| v > 0.0)
}

/// Every suffix sum over the last i+1 coordinates exceeds i+1.
pub fn in_domain_d0(p: &SPoint) -> bool {
    let r = p.r();
    p.suffix_sigma()
        .iter()
        .enumerate()
        .all(|(idx, &v)| v > (r - idx) as f64)
}

/// x^w for a real base x > 0.
#[inline]
pub fn real_base_pow(x: f64, w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        Complex64::new(x.powf(w.re), 0.0)
    } else {
        (w * x.ln()).exp()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelTerm {
    pub k: Vec<u32>,
    pub coeff: u64,
    /// coeff * prod_i (s_i)_{k_i} x_i^{-(s_i+k_i)}
    pub value: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct KernelValue {
    pub value: Complex64,
    pub terms: Option<Vec<KernelTerm>>,
}

fn prefix_points(t: &[f64], n0: u64) -> Result<Vec<f64>> {
    if let Some(bad) = t.iter().find(|&&ti| !(ti >= 1.0)) {
        return arg_err(format!("kernel is defined for t_i >= 1, got {bad}"));
    }
    let mut acc = n0 as f64;
    Ok(t.iter()
        .map(|&ti| {
            acc += ti;
            acc
        })
        .collect())
}

fn check_rank(t: &[f64], p: &SPoint) -> Result<()> {
    if t.len() != p.r() {
        return arg_err(format!("t has {} coordinates, s has {}", t.len(), p.r()));
    }
    Ok(())
}

fn term_value(term: &CompositionTerm, x: &[f64], s: &[Complex64]) -> Complex64 {
    let mut v = Complex64::new(term.coeff as f64, 0.0);
    for ((&k, &xi), &si) in term.k.iter().zip(x).zip(s) {
        v *= pochhammer(si, k) * real_base_pow(xi, -(si + k as f64));
    }
    v
}

/// Evaluate the kernel at t (all t_i >= 1).
pub fn kernel_eval(t: &[f64], p: &SPoint, comps: &[CompositionTerm]) -> Result<KernelValue> {
    kernel_eval_inner(t, p, comps, false)
}

/// As [`kernel_eval`], keeping the per-composition breakdown.
pub fn kernel_eval_explained(
    t: &[f64],
    p: &SPoint,
    comps: &[CompositionTerm],
) -> Result<KernelValue> {
    kernel_eval_inner(t, p, comps, true)
}

fn kernel_eval_inner(
    t: &[f64],
    p: &SPoint,
    comps: &[CompositionTerm],
    explain: bool,
) -> Result<KernelValue> {
    check_rank(t, p)?;
    if let Some(c) = comps.iter().find(|c| c.k.len() != p.r()) {
        return arg_err(format!("composition {:?} has the wrong rank", c.k));
    }
    let x = prefix_points(t, p.n0())?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = explain.then(Vec::new);
    for c in comps {
        let v = term_value(c, &x, p.s());
        value += v;
        if let Some(terms) = terms.as_mut() {
            terms.push(KernelTerm {
                k: c.k.clone(),
                coeff: c.coeff,
                value: [v.re, v.im],
            });
        }
    }
    Ok(KernelValue { value, terms })
}

/// The kernel with the s-dependent constants folded in, for repeated
/// evaluation at many nodes.
#[derive(Debug, Clone)]
pub struct PreparedKernel {
    r: usize,
    /// (k, coeff * prod (s_i)_{k_i}) per composition.
    terms: Vec<(Vec<i32>, Complex64)>,
    neg_s: Vec<Complex64>,
}

impl PreparedKernel {
    pub fn new(p: &SPoint) -> Result<Self> {
        let comps = enumerate_compositions(p.r())?;
        let terms = comps
            .iter()
            .map(|c| {
                let w = c
                    .k
                    .iter()
                    .zip(p.s())
                    .fold(Complex64::new(c.coeff as f64, 0.0), |acc, (&k, &s)| {
                        acc * pochhammer(s, k)
                    });
                (c.k.iter().map(|&k| -(k as i32)).collect(), w)
            })
            .collect();
        Ok(Self {
            r: p.r(),
            terms,
            neg_s: p.s().iter().map(|z| -z).collect(),
        })
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// x_i^{-s_i}.
    #[inline]
    pub fn power(&self, i: usize, x: f64) -> Complex64 {
        real_base_pow(x, self.neg_s[i])
    }

    /// Kernel at prefix points `x` given the precomputed product
    /// prod_i x_i^{-s_i}.
    #[inline]
    pub fn eval_with_powers(&self, x: &[f64], power_product: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (neg_k, w) in &self.terms {
            let mut real = 1.0;
            for (&e, &xi) in neg_k.iter().zip(x) {
                if e != 0 {
                    real *= xi.powi(e);
                }
            }
            acc += w * real;
        }
        acc * power_product
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let prod = x
            .iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (i, &xi)| acc * self.power(i, xi));
        self.eval_with_powers(x, prod)
    }
}

/// sum over the rank-(r-1) family, indexed k_2..k_r, of
/// coeff(k) * x_1^{-s_1} * prod_{i>=2} (s_i)_{k_i} x_i^{-(s_i+k_i)}.
///
/// The left side of the identity is minus its t_1-derivative.
pub fn lemma1_potential(t: &[f64], p: &SPoint) -> Result<Complex64> {
    let r = p.r();
    if r < 2 {
        return arg_err("needs r >= 2");
    }
    check_rank(t, p)?;
    let x = prefix_points(t, p.n0())?;
    let s = p.s();
    let lead = real_base_pow(x[0], -s[0]);
    let sum: Complex64 = enumerate_compositions(r - 1)?
        .iter()
        .map(|c| term_value(c, &x[1..], &s[1..]))
        .sum();
    Ok(lead * sum)
}

/// Left side: minus the t_1-derivative of [`lemma1_potential`], expanded
/// analytically term by term.
pub fn lemma1_lhs(t: &[f64], p: &SPoint) -> Result<Complex64> {
    let r = p.r();
    if r < 3 {
        return arg_err(format!("the identity is stated for r >= 3, got r = {r}"));
    }
    check_rank(t, p)?;
    let x = prefix_points(t, p.n0())?;
    let s = p.s();
    // P_i(k) = (s_i)_k / x_i^{s_i + k}
    let factor = |i: usize, k: u32| pochhammer(s[i], k) * real_base_pow(x[i], -(s[i] + k as f64));
    let x1_pow = real_base_pow(x[0], -s[0]);
    let x1_pow_shift = s[0] * real_base_pow(x[0], -(s[0] + 1.0));

    let mut total = Complex64::new(0.0, 0.0);
    for c in enumerate_compositions(r - 1)? {
        // c.k[j] is k_{j+2}
        let p_vals: Vec<Complex64> = c
            .k
            .iter()
            .enumerate()
            .map(|(j, &k)| factor(j + 1, k))
            .collect();
        let prod_all: Complex64 = p_vals.iter().product();
        let mut shifted = Complex64::new(0.0, 0.0);
        for h in 0..p_vals.len() {
            let others: Complex64 = p_vals
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != h)
                .map(|(_, v)| v)
                .product();
            shifted += factor(h + 1, c.k[h] + 1) * others;
        }
        // d/dt1 of x1^{-s1} prod P_i = -s1 x1^{-s1-1} prod P - x1^{-s1} sum_h P_h(k_h+1) prod_{i != h} P_i
        let derivative = -x1_pow_shift * prod_all - x1_pow * shifted;
        total -= derivative * c.coeff as f64;
    }
    Ok(total)
}

/// Right side: the rank-r kernel itself.
pub fn lemma1_rhs(t: &[f64], p: &SPoint) -> Result<Complex64> {
    if p.r() < 3 {
        return arg_err(format!("the identity is stated for r >= 3, got r = {}", p.r()));
    }
    Ok(kernel_eval(t, p, enumerate_compositions(p.r())?)?.value)
}
