//! Structure of the unit group (Z/qZ)^* as a product of cyclic factors.
//!
//! Generator convention: for every odd prime power p^k the smallest primitive
//! root mod p^k; for 4 the residue 3; for 2^k with k >= 3 the pair (-1, 5).
//! Each local generator is lifted to mod q by CRT (congruent to 1 modulo the
//! other prime-power factors). Factors are listed by increasing prime.

use crate::error::{arg_err, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFactor {
    /// Generator as a residue mod q.
    pub generator: u64,
    pub order: u64,
    /// The prime-power modulus this factor comes from.
    pub prime_power: u64,
}

#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    factors: Vec<CyclicFactor>,
    /// `dlog[n]` is the exponent vector of the unit n mod q (empty for non-units).
    dlog: Vec<Option<Vec<u64>>>,
    totient: u64,
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorisation by trial division as (p, k) pairs, p increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

fn smallest_primitive_root(modulus: u64, phi: u64) -> u64 {
    let prime_divisors: Vec<u64> = factorize(phi).into_iter().map(|(p, _)| p).collect();
    (2..modulus)
        .find(|&g| {
            gcd(g, modulus) == 1
                && prime_divisors
                    .iter()
                    .all(|&l| pow_mod(g, phi / l, modulus) != 1)
        })
        .expect("odd prime powers are cyclic")
}

/// Solve x = a (mod m1), x = 1 (mod m2) for coprime m1, m2, returning x mod m1*m2.
fn crt_lift(a: u64, m1: u64, m2: u64) -> u64 {
    if m2 == 1 {
        return a % m1;
    }
    // x = 1 + m2 * y with m2*y = a - 1 (mod m1)
    let inv = mod_inverse(m2 % m1, m1);
    let y = mul_mod((a % m1 + m1 - 1) % m1, inv, m1);
    (1 + m2 * y) % (m1 * m2)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return arg_err("modulus must be >= 1");
        }
        let mut factors = Vec::new();
        for (p, k) in factorize(q) {
            let pk = p.pow(k);
            let rest = q / pk;
            if p == 2 {
                match k {
                    1 => {}
                    2 => factors.push(CyclicFactor {
                        generator: crt_lift(3, 4, rest),
                        order: 2,
                        prime_power: 4,
                    }),
                    _ => {
                        factors.push(CyclicFactor {
                            generator: crt_lift(pk - 1, pk, rest),
                            order: 2,
                            prime_power: pk,
                        });
                        factors.push(CyclicFactor {
                            generator: crt_lift(5, pk, rest),
                            order: pk / 4,
                            prime_power: pk,
                        });
                    }
                }
            } else {
                let phi = pk / p * (p - 1);
                let g = smallest_primitive_root(pk, phi);
                factors.push(CyclicFactor {
                    generator: crt_lift(g, pk, rest),
                    order: phi,
                    prime_power: pk,
                });
            }
        }

        let totient = euler_phi(q);
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; q as usize];
        let mut exps = vec![0u64; factors.len()];
        loop {
            let n = factors
                .iter()
                .zip(&exps)
                .fold(1 % q, |acc, (f, &e)| mul_mod(acc, pow_mod(f.generator, e, q), q));
            debug_assert!(dlog[n as usize].is_none(), "exponent vectors must be unique");
            dlog[n as usize] = Some(exps.clone());
            if !next_exponents(&mut exps, &factors) {
                break;
            }
        }
        Ok(Self {
            modulus: q,
            factors,
            dlog,
            totient,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.factors
    }

    pub fn orders(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order).collect()
    }

    pub fn generators(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.generator).collect()
    }

    pub fn totient(&self) -> u64 {
        self.totient
    }

    /// Exponent vector of n with respect to the generators, or `None` if
    /// gcd(n, q) > 1.
    pub fn discrete_log(&self, n: u64) -> Option<&[u64]> {
        self.dlog[(n % self.modulus) as usize].as_deref()
    }

    /// Exponent of the group (lcm of the cyclic orders).
    pub fn exponent(&self) -> u64 {
        self.factors
            .iter()
            .fold(1, |acc, f| acc / gcd(acc, f.order) * f.order)
    }
}

/// Odometer increment over the box of exponent vectors; false when exhausted.
pub(crate) fn next_exponents(exps: &mut [u64], factors: &[CyclicFactor]) -> bool {
    for (e, f) in exps.iter_mut().zip(factors).rev() {
        *e += 1;
        if *e < f.order {
            return true;
        }
        *e = 0;
    }
    false
}
