//! One-dimensional product-integration rules for int_1^T S(t) f(t) dt.
//!
//! The axis is cut into blocks with integer endpoints, so S is a step function
//! with jumps only at block-interior integers. On each block f is replaced by
//! its degree G-1 interpolant at the Gauss nodes and integrated exactly
//! against S, which gives complex weights W_k = w_k sum_j (2j+1)/2 P_j(u_k) M_j
//! with moments M_j = int_block S(t) P_j(u(t)) dt.
//!
//! Moments are computed cell by cell on short blocks and in closed form on
//! long blocks of zero-sum periodic sequences (see [`PeriodicAntiderivatives`]).

use num_complex::Complex64;
use serde::Serialize;

use super::gauss::{legendre_values, GaussLegendre};
use crate::characters::BoundedSequence;
use crate::periodic::PeriodicAntiderivatives;

/// How [1, T) is cut into integration blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellLayout {
    /// Unit cells [m, m+1): plain tensor Gauss-Legendre per cell.
    Unit,
    /// Dyadic blocks [2^i, 2^(i+1)) with product-integration weights.
    Dyadic,
}

pub(crate) fn blocks(layout: CellLayout, cutoff: u64) -> Vec<(u64, u64)> {
    match layout {
        CellLayout::Unit => (1..cutoff).map(|m| (m, m + 1)).collect(),
        CellLayout::Dyadic => {
            let mut out = Vec::new();
            let mut a = 1u64;
            while a < cutoff {
                let b = a.saturating_mul(2).min(cutoff);
                out.push((a, b));
                a = b;
            }
            out
        }
    }
}

/// Number of blocks along an axis.
pub(crate) fn block_count(layout: CellLayout, cutoff: u64) -> u64 {
    match layout {
        CellLayout::Unit => cutoff.saturating_sub(1),
        CellLayout::Dyadic => {
            if cutoff <= 1 {
                0
            } else {
                64 - (cutoff - 1).leading_zeros() as u64
            }
        }
    }
}

/// Whether a block of length `len` uses closed-form moments.
#[inline]
pub(crate) fn uses_periodic_moments(period: usize, nodes: usize, len: u64) -> bool {
    len as f64 >= (period * nodes * nodes) as f64
}

/// Cells summed one by one when building the rules for one axis.
pub(crate) fn direct_work(
    seq: &BoundedSequence,
    periodic: bool,
    layout: CellLayout,
    cutoff: u64,
    nodes: usize,
) -> u64 {
    blocks(layout, cutoff)
        .iter()
        .map(|&(a, b)| {
            let len = b - a;
            match seq.period() {
                Some(p) if periodic && uses_periodic_moments(p, nodes, len) => 0,
                _ if len == 1 => 0,
                _ => len,
            }
        })
        .sum()
}

#[derive(Debug, Clone)]
pub(crate) struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
}

/// Sequential access to S(m) that also works for rule-defined sequences.
struct StepCursor<'a> {
    seq: &'a BoundedSequence,
    m: u64,
    value: Complex64,
}

impl<'a> StepCursor<'a> {
    fn new(seq: &'a BoundedSequence) -> Self {
        Self {
            seq,
            m: 0,
            value: Complex64::new(0.0, 0.0),
        }
    }

    /// S(m) for non-decreasing m.
    fn at(&mut self, m: u64) -> Complex64 {
        if let Some(t) = self.seq.periodic_table() {
            return t.partial_sum_at(m);
        }
        debug_assert!(m >= self.m);
        while self.m < m {
            self.m += 1;
            self.value += self.seq.value(self.m);
        }
        self.value
    }
}

/// Q_j(u) = int_{-1}^u P_j, from P_0..=P_{g}; Q_0 = u + 1.
fn antiderivatives(p: &[f64], u: f64, out: &mut [f64]) {
    out[0] = u + 1.0;
    for j in 1..out.len() {
        out[j] = (p[j + 1] - p[j - 1]) / (2 * j + 1) as f64;
    }
}

fn direct_moments(cursor: &mut StepCursor, a: u64, b: u64, g: usize, out: &mut [Complex64]) {
    let len = (b - a) as f64;
    let h = len / 2.0;
    let mid = (a + b) as f64 / 2.0;
    let mut p = vec![0.0; g + 1];
    let mut q_lo = vec![0.0; g];
    let mut q_hi = vec![0.0; g];
    out.iter_mut().for_each(|m| *m = Complex64::new(0.0, 0.0));
    legendre_values(-1.0, &mut p);
    antiderivatives(&p, -1.0, &mut q_lo);
    for m in a..b {
        let u = (((m + 1) as f64) - mid) / h;
        legendre_values(u, &mut p);
        antiderivatives(&p, u, &mut q_hi);
        let s = cursor.at(m);
        if s != Complex64::new(0.0, 0.0) {
            for j in 0..g {
                out[j] += s * (q_hi[j] - q_lo[j]);
            }
        }
        std::mem::swap(&mut q_lo, &mut q_hi);
    }
    out.iter_mut().for_each(|m| *m *= h);
}

fn periodic_moments(anti: &PeriodicAntiderivatives, a: u64, b: u64, g: usize, out: &mut [Complex64]) {
    let h = (b - a) as f64 / 2.0;
    for (j, slot) in out.iter_mut().enumerate().take(g) {
        let mut acc = if j == 0 {
            anti.mean() * (b - a) as f64
        } else {
            Complex64::new(0.0, 0.0)
        };
        // D = P_j^{(d)}(1) h^{-d}; the value at -1 carries (-1)^{j+d}
        let mut deriv = 1.0;
        for d in 0..=j {
            if d > 0 {
                deriv *= ((j + d) * (j - d + 1)) as f64 / (2 * d) as f64 / h;
            }
            let sign_d = if d % 2 == 0 { 1.0 } else { -1.0 };
            let sign_lo = if (j + d) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign_d * deriv * (anti.at(d + 1, b) - sign_lo * anti.at(d + 1, a));
        }
        *slot = acc;
    }
}

/// Build the complex-weighted rule for one axis.
pub(crate) fn axis_rule(
    seq: &BoundedSequence,
    anti: Option<&PeriodicAntiderivatives>,
    layout: CellLayout,
    cutoff: u64,
    gl: &GaussLegendre,
) -> AxisRule {
    let g = gl.nodes.len();
    let mut cursor = StepCursor::new(seq);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut moments = vec![Complex64::new(0.0, 0.0); g];
    let mut pk = vec![0.0; g];
    let legendre_at_nodes: Vec<Vec<f64>> = gl
        .nodes
        .iter()
        .map(|&u| {
            legendre_values(u, &mut pk);
            pk.clone()
        })
        .collect();
    for (a, b) in blocks(layout, cutoff) {
        let h = (b - a) as f64 / 2.0;
        let mid = (a + b) as f64 / 2.0;
        if b - a == 1 {
            let s = cursor.at(a);
            for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(mid + h * u);
                weights.push(s * (w * h));
            }
            continue;
        }
        match anti {
            Some(an) if an.max_degree() >= g && uses_periodic_moments(an.period(), g, b - a) => {
                periodic_moments(an, a, b, g, &mut moments)
            }
            _ => direct_moments(&mut cursor, a, b, g, &mut moments),
        }
        for (k, (&u, &w)) in gl.nodes.iter().zip(&gl.weights).enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, m) in moments.iter().enumerate() {
                acc += m * ((2 * j + 1) as f64 / 2.0 * legendre_at_nodes[k][j]);
            }
            nodes.push(mid + h * u);
            weights.push(acc * w);
        }
    }
    AxisRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::make_character;
    use crate::integrator::gauss::gauss_legendre;

    #[test]
    fn dyadic_blocks_cover_axis() {
        assert_eq!(blocks(CellLayout::Dyadic, 8), vec![(1, 2), (2, 4), (4, 8)]);
        assert_eq!(blocks(CellLayout::Dyadic, 10), vec![(1, 2), (2, 4), (4, 8), (8, 10)]);
        assert_eq!(block_count(CellLayout::Dyadic, 8), 3);
        assert_eq!(block_count(CellLayout::Dyadic, 10), 4);
        assert_eq!(block_count(CellLayout::Unit, 10), 9);
        assert_eq!(blocks(CellLayout::Unit, 3), vec![(1, 2), (2, 3)]);
    }

    fn step_integral(seq: &BoundedSequence, cutoff: u64, f: impl Fn(f64) -> f64) -> Complex64 {
        // exact for polynomials via a high-order rule on each unit cell
        let gl = gauss_legendre(12);
        (1..cutoff)
            .map(|m| {
                let s = seq.partial_sum(m as f64);
                let cell: f64 = gl
                    .nodes
                    .iter()
                    .zip(&gl.weights)
                    .map(|(&u, &w)| 0.5 * w * f(m as f64 + 0.5 + 0.5 * u))
                    .sum();
                s * cell
            })
            .sum()
    }

    #[test]
    fn periodic_and_direct_moments_agree() {
        let seq = BoundedSequence::from_character(&make_character(5, &[1]).unwrap());
        let anti = PeriodicAntiderivatives::new(seq.periodic_table().unwrap(), 20).unwrap();
        let g = 12;
        let mut direct = vec![Complex64::new(0.0, 0.0); g];
        let mut closed = direct.clone();
        let (a, b) = (37u64, 1061u64);
        let mut cursor = StepCursor::new(&seq);
        direct_moments(&mut cursor, a, b, g, &mut direct);
        periodic_moments(&anti, a, b, g, &mut closed);
        for j in 0..g {
            assert!((direct[j] - closed[j]).norm() < 1e-9 * (b - a) as f64, "j={j}");
        }
    }

    #[test]
    fn rule_is_exact_for_low_degree_polynomials_per_block() {
        let seq = BoundedSequence::alternating();
        let anti = PeriodicAntiderivatives::new(seq.periodic_table().unwrap(), 9).unwrap();
        let gl = gauss_legendre(8);
        // a quadratic is exact on every block regardless of layout
        let f = |t: f64| 0.25 * t * t - 3.0 * t + 1.0;
        let exact = step_integral(&seq, 64, f);
        for layout in [CellLayout::Unit, CellLayout::Dyadic] {
            for a in [None, Some(&anti)] {
                let rule = axis_rule(&seq, a, layout, 64, &gl);
                let approx: Complex64 = rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| w * f(t)).sum();
                assert!((approx - exact).norm() < 1e-9, "{layout:?}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn rule_sequences_use_running_sums() {
        let seq = BoundedSequence::custom("alt-rule", |n| Complex64::new(if n % 2 == 1 { 1.0 } else { -1.0 }, 0.0), 1.0)
            .unwrap();
        let gl = gauss_legendre(6);
        let f = |t: f64| 1.0 / (t * t);
        let rule = axis_rule(&seq, None, CellLayout::Dyadic, 32, &gl);
        let approx: Complex64 = rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| w * f(t)).sum();
        let exact = step_integral(&seq, 32, f);
        assert!((approx - exact).norm() < 1e-6);
    }
}
