//! Certified bounds on the part of the integral outside a truncation box.

use crate::compositions::enumerate_compositions;
use crate::error::{arg_err, MdlError, Result};
use crate::kernel::{in_domain_d, pochhammer, SPoint};

fn check(p: &SPoint, alphas: &[f64]) -> Result<()> {
    if alphas.len() != p.r() {
        return arg_err(format!("expected {} partial-sum bounds, got {}", p.r(), alphas.len()));
    }
    if alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return arg_err("partial-sum bounds must be finite and non-negative");
    }
    if !in_domain_d(p) {
        return Err(MdlError::Region(
            "s lies outside the proven region D (some suffix sum of Re s is <= 0)".into(),
        ));
    }
    Ok(())
}

/// The closed-form estimate
///
/// ```text
/// (prod alpha_i) sum_k coeff(k) prod_i |(s_i)_{k_i}| / (sigma_i + ... + sigma_r) * (n0 + T)^{-(sigma_1 + ... + sigma_r)}
/// ```
///
/// It bounds the integral over {t_1 >= T} (all other axes free). For r = 1
/// that is the whole complement of [1, T).
pub fn tail_bound(p: &SPoint, alphas: &[f64], t: f64) -> Result<f64> {
    check(p, alphas)?;
    if !(t >= 1.0) {
        return arg_err(format!("cutoff must be >= 1, got {t}"));
    }
    let suffix = p.suffix_sigma();
    let denom: f64 = suffix.iter().product();
    let comps = enumerate_compositions(p.r())?;
    let amp: f64 = comps
        .iter()
        .map(|c| {
            c.coeff as f64
                * c.k
                    .iter()
                    .zip(p.s())
                    .map(|(&k, &s)| pochhammer(s, k).norm())
                    .product::<f64>()
        })
        .sum();
    let alpha: f64 = alphas.iter().product();
    Ok(alpha * amp / denom * (p.n0() as f64 + t).powf(-suffix[0]))
}

/// int_a^b (n0 + t)^{-q} dt with b = infinity allowed when q > 1.
fn power_integral(n0: f64, q: f64, a: f64, b: f64) -> f64 {
    if b.is_infinite() {
        return (n0 + a).powf(1.0 - q) / (q - 1.0);
    }
    if (q - 1.0).abs() < 1e-12 {
        return ((n0 + b) / (n0 + a)).ln();
    }
    ((n0 + a).powf(1.0 - q) - (n0 + b).powf(1.0 - q)) / (q - 1.0)
}

/// Bound for one monomial prod_i x_i^{-e_i} over the region where axes
/// before `j` lie in [1, T_i), axis `j` is in [T_j, inf) and later axes are free.
fn monomial_region_bound(n0: f64, e: &[f64], cutoffs: &[f64], j: usize) -> f64 {
    let r = e.len();
    let mut coef = 1.0;
    let mut carried = 0.0;
    for i in (0..r).rev() {
        let q = e[i] + carried;
        if i == 0 {
            let (a, b) = if j == 0 {
                (cutoffs[0], f64::INFINITY)
            } else {
                (1.0, cutoffs[0])
            };
            return coef * power_integral(n0, q, a, b);
        }
        // x_{i-1} = n0 + t_1 + ... + t_{i-1} >= n0 + i
        let x_min = n0 + i as f64;
        if i > j {
            debug_assert!(q > 1.0);
            coef /= q - 1.0;
            carried = q - 1.0;
        } else if i == j {
            coef *= (x_min + cutoffs[i]).powf(1.0 - q) / (q - 1.0);
            carried = 0.0;
        } else {
            let x_max = n0 + cutoffs[..i].iter().sum::<f64>();
            if q > 1.0 + 1e-9 {
                coef /= q - 1.0;
                carried = q - 1.0;
            } else if q < 1.0 - 1e-9 {
                coef *= (x_max + cutoffs[i]).powf(1.0 - q) / (1.0 - q);
                carried = 0.0;
            } else {
                coef *= cutoffs[i].ln() * (x_max + cutoffs[i]).powf(1.0 - q).max(1.0);
                carried = 0.0;
            }
        }
    }
    unreachable!()
}

/// Rigorous bound on the integral over the complement of the box
/// prod_i [1, T_i), covering every way of leaving the box.
///
/// The complement is split into the disjoint pieces where axis j is the first
/// to exceed its cutoff; each kernel monomial is then integrated from the
/// innermost axis outward using |S_i| <= alpha_i.
pub fn box_tail_bound(p: &SPoint, alphas: &[f64], cutoffs: &[f64]) -> Result<f64> {
    check(p, alphas)?;
    if cutoffs.len() != p.r() {
        return arg_err(format!("expected {} cutoffs, got {}", p.r(), cutoffs.len()));
    }
    if cutoffs.iter().any(|&t| !(t >= 1.0 && t.is_finite())) {
        return arg_err("cutoffs must be finite and >= 1");
    }
    let n0 = p.n0() as f64;
    let sigma = p.sigma();
    let comps = enumerate_compositions(p.r())?;
    let mut total = 0.0;
    for c in comps {
        let amp: f64 = c.coeff as f64
            * c.k
                .iter()
                .zip(p.s())
                .map(|(&k, &s)| pochhammer(s, k).norm())
                .product::<f64>();
        if amp == 0.0 {
            continue;
        }
        let e: Vec<f64> = c.k.iter().zip(&sigma).map(|(&k, &s)| s + k as f64).collect();
        for j in 0..p.r() {
            total += amp * monomial_region_bound(n0, &e, cutoffs, j);
        }
    }
    Ok(alphas.iter().product::<f64>() * total)
}
