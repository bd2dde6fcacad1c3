#![allow(dead_code)]

use mdl_core::characters::{make_character, BoundedSequence};
use mdl_core::compositions::CompositionTerm;
use num_complex::Complex64;

pub fn chi(q: u64, e: &[u64]) -> BoundedSequence {
    BoundedSequence::from_character(&make_character(q, e).unwrap())
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// sigma_r + ... + sigma_{r-i} > 0 for every i, written out directly.
pub fn naive_in_d(sigma: &[f64]) -> bool {
    let r = sigma.len();
    (0..r).all(|i| {
        let mut acc = 0.0;
        for j in (r - 1 - i)..r {
            acc += sigma[j];
        }
        acc > 0.0
    })
}

/// sigma_r + ... + sigma_{r-i} > i + 1 for every i.
pub fn naive_in_d0(sigma: &[f64]) -> bool {
    let r = sigma.len();
    (0..r).all(|i| {
        let mut acc = 0.0;
        for j in (r - 1 - i)..r {
            acc += sigma[j];
        }
        acc > (i + 1) as f64
    })
}

fn choose(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for j in 0..k {
        num *= (n - j) as u128;
        den *= (j + 1) as u128;
    }
    (num / den) as u64
}

/// Filter the whole box prod_i {0..=i} by the constraints.
pub fn brute_force_compositions(r: usize) -> Vec<CompositionTerm> {
    let mut out = Vec::new();
    let mut k = vec![0u32; r];
    loop {
        let mut ok = k.iter().map(|&x| x as usize).sum::<usize>() == r;
        let mut prefix = 0;
        for (i, &ki) in k.iter().enumerate() {
            prefix += ki as usize;
            if prefix > i + 1 {
                ok = false;
            }
        }
        if ok {
            let mut coeff = choose(1, k[0] as i64);
            let mut prefix = k[0] as i64;
            for i in 1..r {
                coeff *= choose(i as i64 + 1 - prefix, k[i] as i64);
                prefix += k[i] as i64;
            }
            out.push(CompositionTerm { k: k.clone(), coeff });
        }
        // odometer, digit i ranges over 0..=i+1
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            if (k[i] as usize) < i + 1 {
                k[i] += 1;
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}
