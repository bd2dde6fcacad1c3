//! Repeated zero-mean antiderivatives of the partial-sum step function of a
//! zero-sum periodic sequence.
//!
//! With S the step function (S(t) = S(floor t)) and mu its mean over one
//! period, R_0 = S - mu and R_d is the unique p-periodic antiderivative of
//! R_{d-1} with zero mean. Integration by parts against any smooth g gives
//!
//! ```text
//! int_A^B (S - mu) g = sum_{d >= 0} (-1)^d [R_{d+1} g^{(d)}]_A^B
//! ```
//!
//! which is exact for polynomial g and an asymptotic expansion otherwise.

use num_complex::Complex64;

use crate::characters::PeriodicTable;

#[derive(Debug, Clone)]
pub(crate) struct PeriodicAntiderivatives {
    period: usize,
    mean: Complex64,
    /// `values[d][m]` = R_d(m) for m in 0..p (index 0 unused).
    values: Vec<Vec<Complex64>>,
    /// `sup[d]` >= sup |R_d|.
    sup: Vec<f64>,
}

impl PeriodicAntiderivatives {
    /// `None` when the period sum is not zero (S is then not periodic).
    pub fn new(table: &PeriodicTable, max_degree: usize) -> Option<Self> {
        if table.period_sum().norm() > 1e-12 * (1.0 + table.prefix().iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            return None;
        }
        let p = table.period();
        let steps = table.prefix();
        let mean = steps.iter().sum::<Complex64>() / p as f64;
        let mut pieces: Vec<Vec<Complex64>> = steps.iter().map(|&s| vec![s - mean]).collect();
        let mut sup = vec![pieces.iter().map(|c| c[0].norm()).fold(0.0, f64::max)];
        let mut values = vec![Vec::new()];
        for _ in 1..=max_degree {
            let mut next = Vec::with_capacity(p);
            let mut at_int = Vec::with_capacity(p);
            let mut v = Complex64::new(0.0, 0.0);
            let mut total = Complex64::new(0.0, 0.0);
            for piece in &pieces {
                let mut poly = Vec::with_capacity(piece.len() + 1);
                poly.push(v);
                let mut inc = Complex64::new(0.0, 0.0);
                for (e, &c) in piece.iter().enumerate() {
                    let term = c / (e + 1) as f64;
                    poly.push(term);
                    inc += term;
                }
                // integral of the new piece over its unit interval
                total += poly.iter().enumerate().map(|(e, &c)| c / (e + 1) as f64).sum::<Complex64>();
                at_int.push(v);
                v += inc;
                next.push(poly);
            }
            let shift = total / p as f64;
            for (poly, val) in next.iter_mut().zip(at_int.iter_mut()) {
                poly[0] -= shift;
                *val -= shift;
            }
            sup.push(
                next.iter()
                    .map(|poly| poly.iter().map(|c| c.norm()).sum::<f64>())
                    .fold(0.0, f64::max),
            );
            values.push(at_int);
            pieces = next;
        }
        Some(Self {
            period: p,
            mean,
            values,
            sup,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    /// Mean of S over a period.
    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// R_d at the integer m (d >= 1).
    #[inline]
    pub fn at(&self, d: usize, m: u64) -> Complex64 {
        self.values[d][(m % self.period as u64) as usize]
    }

    pub fn sup(&self, d: usize) -> f64 {
        self.sup[d]
    }
}
