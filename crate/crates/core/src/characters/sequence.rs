//! Coefficient sequences a(n) with bounded partial sums.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use super::character::DirichletCharacter;
use crate::error::{arg_err, MdlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Character,
    Alternating,
    PeriodicTable,
    Custom,
}

/// One period of a periodic sequence.
#[derive(Debug, Clone)]
pub struct PeriodicTable {
    /// `values[n % p]` is a(n).
    values: Vec<Complex64>,
    /// `prefix[j]` is S(j) = a(1) + ... + a(j) for j = 0..p.
    prefix: Vec<Complex64>,
    period_sum: Complex64,
}

impl PeriodicTable {
    fn from_residue_values(values: Vec<Complex64>) -> Self {
        let p = values.len();
        let mut prefix = Vec::with_capacity(p);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for n in 1..p {
            acc += values[n];
            prefix.push(acc);
        }
        let period_sum = acc + values[0];
        Self {
            values,
            prefix,
            period_sum,
        }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.values.len() as u64) as usize]
    }

    /// S(m) for integer m >= 0.
    pub fn partial_sum_at(&self, m: u64) -> Complex64 {
        let p = self.values.len() as u64;
        let head = self.prefix[(m % p) as usize];
        if self.period_sum == Complex64::new(0.0, 0.0) {
            head
        } else {
            head + self.period_sum * (m / p) as f64
        }
    }

    pub fn period_sum(&self) -> Complex64 {
        self.period_sum
    }

    /// S(0), ..., S(p-1): the step heights of S on [j, j+1).
    pub fn prefix(&self) -> &[Complex64] {
        &self.prefix
    }

    fn max_prefix_norm(&self) -> f64 {
        self.prefix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

type Rule = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Periodic(PeriodicTable),
    Rule(Rule),
}

/// An arithmetic function a(n), n >= 1, together with a certified bound
/// alpha on |sum_{m <= t} a(m)|.
#[derive(Clone)]
pub struct BoundedSequence {
    repr: Repr,
    bound: Option<f64>,
    provenance: Provenance,
    label: String,
    character: Option<Arc<DirichletCharacter>>,
}

impl fmt::Debug for BoundedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedSequence")
            .field("label", &self.label)
            .field("provenance", &self.provenance)
            .field("bound", &self.bound)
            .field("period", &self.period())
            .finish()
    }
}

#[derive(Deserialize)]
struct PeriodicFile {
    period: usize,
    values: Vec<[f64; 2]>,
}

/// Relative tolerance for the zero period-sum check of loaded tables.
const ZERO_SUM_TOL: f64 = 1e-12;

impl BoundedSequence {
    /// Character as a coefficient sequence. Principal characters are accepted
    /// but carry no partial-sum bound.
    pub fn from_character(chi: &DirichletCharacter) -> Self {
        let q = chi.modulus() as usize;
        let mut table = PeriodicTable::from_residue_values(chi.complex_values()[..q].to_vec());
        if !chi.is_principal() {
            table.period_sum = Complex64::new(0.0, 0.0);
        }
        Self {
            repr: Repr::Periodic(table),
            bound: (!chi.is_principal()).then_some(chi.modulus() as f64),
            provenance: Provenance::Character,
            label: chi.label(),
            character: Some(Arc::new(chi.clone())),
        }
    }

    /// a(n) = (-1)^{n-1}.
    pub fn alternating() -> Self {
        let table = PeriodicTable::from_residue_values(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        Self {
            repr: Repr::Periodic(table),
            bound: Some(1.0),
            provenance: Provenance::Alternating,
            label: "alt".to_string(),
            character: None,
        }
    }

    /// Periodic sequence from one period `a(1), ..., a(p)`. The period sum
    /// must vanish; alpha is the largest prefix magnitude.
    pub fn periodic(one_period: &[Complex64], label: impl Into<String>) -> Result<Self> {
        let p = one_period.len();
        if p == 0 {
            return arg_err("periodic sequence needs at least one value");
        }
        // reorder so that index n % p holds a(n)
        let mut by_residue = vec![Complex64::new(0.0, 0.0); p];
        for (i, v) in one_period.iter().enumerate() {
            by_residue[(i + 1) % p] = *v;
        }
        let sum: Complex64 = one_period.iter().sum();
        let scale: f64 = one_period.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
        if sum.norm() > ZERO_SUM_TOL * scale {
            return Err(MdlError::Format(format!(
                "period sum must vanish, got {} {:+}i",
                sum.re, sum.im
            )));
        }
        let mut table = PeriodicTable::from_residue_values(by_residue);
        table.period_sum = Complex64::new(0.0, 0.0);
        let alpha = table.max_prefix_norm();
        Ok(Self {
            repr: Repr::Periodic(table),
            bound: Some(alpha.max(f64::MIN_POSITIVE)),
            provenance: Provenance::PeriodicTable,
            label: label.into(),
            character: None,
        })
    }

    /// Parse `{"period": p, "values": [[re, im], ...]}`.
    pub fn from_json_str(text: &str, label: impl Into<String>) -> Result<Self> {
        let file: PeriodicFile =
            serde_json::from_str(text).map_err(|e| MdlError::Format(e.to_string()))?;
        if file.values.len() != file.period {
            return Err(MdlError::Format(format!(
                "period is {} but {} values were given",
                file.period,
                file.values.len()
            )));
        }
        let vals: Vec<Complex64> = file
            .values
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::periodic(&vals, label)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text, format!("file:{}", path.display()))
    }

    /// Arbitrary rule with a caller-certified partial-sum bound.
    pub fn custom<F>(label: impl Into<String>, rule: F, alpha: f64) -> Result<Self>
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return arg_err("certified bound must be positive and finite");
        }
        Ok(Self {
            repr: Repr::Rule(Arc::new(rule)),
            bound: Some(alpha),
            provenance: Provenance::Custom,
            label: label.into(),
            character: None,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn character(&self) -> Option<&DirichletCharacter> {
        self.character.as_deref()
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match &self.repr {
            Repr::Periodic(t) => t.value(n),
            Repr::Rule(f) => f(n),
        }
    }

    /// sum_{n <= t} a(n); integer t includes n = t.
    pub fn partial_sum(&self, t: f64) -> Complex64 {
        if t < 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = t.floor() as u64;
        match &self.repr {
            Repr::Periodic(table) => table.partial_sum_at(m),
            Repr::Rule(f) => (1..=m).map(|n| f(n)).sum(),
        }
    }

    /// The certified alpha.
    pub fn partial_sum_bound(&self) -> Result<f64> {
        self.bound.ok_or_else(|| {
            MdlError::Region(format!(
                "{}: unbounded partial sums (principal character); \
                 the integral representation does not apply",
                self.label
            ))
        })
    }

    pub fn is_bounded(&self) -> bool {
        self.bound.is_some()
    }

    pub fn period(&self) -> Option<usize> {
        match &self.repr {
            Repr::Periodic(t) => Some(t.period()),
            Repr::Rule(_) => None,
        }
    }

    pub fn periodic_table(&self) -> Option<&PeriodicTable> {
        match &self.repr {
            Repr::Periodic(t) => Some(t),
            Repr::Rule(_) => None,
        }
    }

    /// Upper bound on |a(n)| for every n.
    pub fn max_abs_value(&self) -> f64 {
        match (&self.repr, self.bound) {
            (Repr::Periodic(t), _) => t.values.iter().map(|z| z.norm()).fold(0.0, f64::max),
            // |a(n)| = |S(n) - S(n-1)| <= 2 alpha
            (Repr::Rule(_), Some(alpha)) => 2.0 * alpha,
            (Repr::Rule(_), None) => f64::INFINITY,
        }
    }

    /// Mean of the step function S over one period, for zero-sum periodic
    /// sequences.
    pub fn mean_partial_sum(&self) -> Option<Complex64> {
        let t = self.periodic_table()?;
        if t.period_sum != Complex64::new(0.0, 0.0) {
            return None;
        }
        Some(t.prefix.iter().sum::<Complex64>() / t.period() as f64)
    }

    /// Pointwise complex conjugate sequence.
    pub fn conj(&self) -> Self {
        if let Some(chi) = &self.character {
            return Self::from_character(&chi.conj());
        }
        let repr = match &self.repr {
            Repr::Periodic(t) => {
                let mut c = t.clone();
                c.values.iter_mut().for_each(|z| *z = z.conj());
                c.prefix.iter_mut().for_each(|z| *z = z.conj());
                c.period_sum = c.period_sum.conj();
                Repr::Periodic(c)
            }
            Repr::Rule(f) => {
                let f = Arc::clone(f);
                Repr::Rule(Arc::new(move |n| f(n).conj()))
            }
        };
        Self {
            repr,
            bound: self.bound,
            provenance: self.provenance,
            label: format!("conj({})", self.label),
            character: None,
        }
    }
}
