use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use super::group::{gcd, next_exponents, UnitGroup};
use crate::error::{arg_err, Result};

/// The root of unity e^{2 pi i num/den}, kept as a reduced fraction in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn mul(self, other: Self) -> Self {
        let den = self.den / gcd(self.den, other.den) * other.den;
        Self::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }

    pub fn conj(self) -> Self {
        Self::new(self.den - self.num, self.den)
    }

    /// Floating value; quarter turns are returned exactly.
    pub fn to_complex(self) -> Complex64 {
        if (4 * self.num).is_multiple_of(self.den) {
            return match 4 * self.num / self.den {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        let (s, c) = (TAU * self.num as f64 / self.den as f64).sin_cos();
        Complex64::new(c, s)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e(2pi i {}/{})", self.num, self.den)
    }
}

/// A Dirichlet character mod q, addressed by its exponent vector on the
/// generators of [`UnitGroup`]: chi(g_j) = e^{2 pi i e_j / d_j}.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    exponents: Vec<u64>,
    values: Vec<Option<RootOfUnity>>,
    complex_values: Vec<Complex64>,
    /// prefix[j] = sum_{n=1}^{j} chi(n) for j = 0..=q.
    prefix: Vec<Complex64>,
    principal: bool,
    totient: u64,
}

impl DirichletCharacter {
    pub fn new(group: &UnitGroup, exponents: &[u64]) -> Result<Self> {
        let orders = group.orders();
        if exponents.len() != orders.len() {
            return arg_err(format!(
                "modulus {} needs {} exponent(s), got {}",
                group.modulus(),
                orders.len(),
                exponents.len()
            ));
        }
        if let Some((e, d)) = exponents.iter().zip(&orders).find(|(e, d)| e >= d) {
            return arg_err(format!("exponent {e} out of range 0..{d}"));
        }
        let q = group.modulus();
        let lcm = group.exponent();
        let values: Vec<Option<RootOfUnity>> = (0..q)
            .map(|n| {
                group.discrete_log(n).map(|logs| {
                    let num = logs
                        .iter()
                        .zip(exponents)
                        .zip(&orders)
                        .map(|((&l, &e), &d)| (l * e % d) * (lcm / d))
                        .sum::<u64>();
                    RootOfUnity::new(num, lcm)
                })
            })
            .collect();
        let complex_values: Vec<Complex64> = values
            .iter()
            .map(|v| v.map_or(Complex64::new(0.0, 0.0), RootOfUnity::to_complex))
            .collect();
        let mut prefix = Vec::with_capacity(q as usize + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for n in 1..=q {
            acc += complex_values[(n % q) as usize];
            prefix.push(acc);
        }
        let principal = exponents.iter().all(|&e| e == 0);
        if !principal {
            // the full period sums to zero exactly; pin it to remove rounding
            prefix[q as usize] = Complex64::new(0.0, 0.0);
        }
        Ok(Self {
            modulus: q,
            exponents: exponents.to_vec(),
            values,
            complex_values,
            prefix,
            principal,
            totient: group.totient(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// Exact value: `None` when gcd(n, q) > 1.
    pub fn value_exact(&self, n: u64) -> Option<RootOfUnity> {
        self.values[(n % self.modulus) as usize]
    }

    pub fn value(&self, n: u64) -> Complex64 {
        self.complex_values[(n % self.modulus) as usize]
    }

    /// Values indexed by residue n mod q.
    pub fn complex_values(&self) -> &[Complex64] {
        &self.complex_values
    }

    /// sum_{n <= t} chi(n); integer t includes n = t.
    pub fn partial_sum(&self, t: f64) -> Complex64 {
        if t < 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = t.floor() as u64;
        let q = self.modulus;
        let head = self.prefix[(m % q) as usize];
        if self.principal {
            head + Complex64::new(((m / q) * self.totient) as f64, 0.0)
        } else {
            head
        }
    }

    pub fn prefix_sums(&self) -> &[Complex64] {
        &self.prefix
    }

    pub fn conj(&self) -> Self {
        let group = UnitGroup::new(self.modulus).expect("modulus already validated");
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(group.orders())
            .map(|(&e, d)| (d - e) % d)
            .collect();
        Self::new(&group, &exps).expect("conjugate exponents are in range")
    }

    /// Label understood by the command line, e.g. `char:5:1`.
    pub fn label(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        if exps.is_empty() {
            format!("char:{}", self.modulus)
        } else {
            format!("char:{}:{}", self.modulus, exps.join(","))
        }
    }
}

/// Build the character with the given exponent vector mod q.
pub fn make_character(q: u64, exponents: &[u64]) -> Result<DirichletCharacter> {
    let group = UnitGroup::new(q)?;
    DirichletCharacter::new(&group, exponents)
}

/// All phi(q) characters mod q, exponent vectors in lexicographic order
/// (the principal character first).
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = UnitGroup::new(q)?;
    let mut exps = vec![0u64; group.factors().len()];
    let mut out = Vec::with_capacity(group.totient() as usize);
    loop {
        out.push(DirichletCharacter::new(&group, &exps)?);
        if !next_exponents(&mut exps, group.factors()) {
            break;
        }
    }
    Ok(out)
}
