//! Series-based evaluators, independent of the integral representation.
//!
//! * [`evaluate_direct`]: nested truncated sums (n_r innermost) with a
//!   certified tail from an Euler-Zagier-type majorant; needs absolute
//!   convergence (the region D0).
//! * [`evaluate_iterated_abel`]: for r <= 2 and periodic sequences in the
//!   conditional region D. The inner series is summed exactly up to a period
//!   multiple and its remainder resummed by repeated partial summation; the
//!   outer series is averaged over period-aligned horizons.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{BoundedSequence, PeriodicTable};
use crate::error::{arg_err, BestEffort, MdlError, Result};
use crate::integrator::{EvaluationResult, Method, Plan};
use crate::kernel::{in_domain_d, in_domain_d0, pochhammer, SPoint};
use crate::periodic::PeriodicAntiderivatives;
use crate::sum::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationMode {
    Direct,
    IteratedAbel,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummationReport {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    /// Direct: the largest horizon used at each level. Iterated-Abel: the
    /// outer horizon followed by the inner exact-summation length.
    pub horizons: Vec<u64>,
    /// Certified bound on the neglected terms (direct mode).
    pub tail_bound: Option<f64>,
    /// Difference between successive averaged horizons plus the inner
    /// remainder bound (iterated-Abel mode).
    pub spread: Option<f64>,
    pub mode: SummationMode,
    /// Number of innermost terms summed.
    pub terms: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

impl SummationReport {
    pub fn error_estimate(&self) -> f64 {
        self.tail_bound.or(self.spread).unwrap_or(0.0)
    }

    pub fn to_evaluation(&self, p: &SPoint) -> EvaluationResult {
        EvaluationResult {
            value: self.value,
            error_estimate: self.error_estimate(),
            method: match self.mode {
                SummationMode::Direct => Method::Direct,
                SummationMode::IteratedAbel => Method::IteratedAbel,
            },
            plan: Plan::Horizons {
                horizons: self.horizons.clone(),
            },
            in_d: in_domain_d(p),
            in_d0: in_domain_d0(p),
            wall_time: self.wall_time,
        }
    }
}

/// x^{-s} with fast paths for integer and real s.
#[derive(Debug, Clone, Copy)]
enum NegPow {
    Int(i32),
    Real(f64),
    Complex(Complex64),
}

impl NegPow {
    fn new(s: Complex64) -> Self {
        if s.im == 0.0 {
            if s.re.fract() == 0.0 && s.re.abs() <= 64.0 {
                NegPow::Int(-(s.re as i32))
            } else {
                NegPow::Real(-s.re)
            }
        } else {
            NegPow::Complex(-s)
        }
    }

    #[inline]
    fn eval(self, x: f64) -> Complex64 {
        match self {
            NegPow::Int(e) => Complex64::new(x.powi(e), 0.0),
            NegPow::Real(e) => Complex64::new(x.powf(e), 0.0),
            NegPow::Complex(w) => (w * x.ln()).exp(),
        }
    }
}

fn check_sequences(seqs: &[BoundedSequence], p: &SPoint, max_rank: usize, what: &'static str) -> Result<()> {
    if p.r() > max_rank {
        return Err(MdlError::UnsupportedRank(p.r(), what));
    }
    if seqs.len() != p.r() {
        return arg_err(format!("expected {} sequences, got {}", p.r(), seqs.len()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// direct summation

#[derive(Debug, Clone)]
pub struct DirectOptions {
    /// Ceiling on the number of innermost terms.
    pub max_terms: u64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { max_terms: 2_000_000_000 }
    }
}

/// Loop order for [`direct_box_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummationOrder {
    /// n_r innermost.
    InnermostLast,
    /// n_1 innermost.
    InnermostFirst,
}

/// Per-level constants of the majorant
/// |sum_{n > N} a_j(n) (y+n)^{-s_j} I_{j+1}(y+n)| <= c_j (y+N)^{1-e_j}.
struct Majorant {
    /// e_j = sigma_j + ... + sigma_r - (r - j), all > 1 in D0.
    e: Vec<f64>,
    c: Vec<f64>,
}

impl Majorant {
    fn new(seqs: &[BoundedSequence], p: &SPoint) -> Self {
        let r = p.r();
        let suffix = p.suffix_sigma();
        let e: Vec<f64> = (0..r).map(|j| suffix[j] - (r - 1 - j) as f64).collect();
        let mut c = vec![0.0; r];
        let mut inner = 1.0;
        for j in (0..r).rev() {
            c[j] = seqs[j].max_abs_value() * inner / (e[j] - 1.0);
            inner = c[j];
        }
        Self { e, c }
    }

    /// Bound on the terms beyond N at level j with prefix y (y + N >= 1).
    fn tail(&self, j: usize, y: f64, n: u64) -> f64 {
        self.c[j] * (y + n as f64).powf(1.0 - self.e[j])
    }

    /// Horizon where a term's majorant drops to lambda / w.
    fn horizon(&self, j: usize, y: f64, w: f64, lambda: f64) -> u64 {
        let edge = (w * self.c[j] * (self.e[j] - 1.0) / lambda).powf(1.0 / self.e[j]);
        let n = (edge - y).ceil();
        let min = if y >= 1.0 { 0.0 } else { 1.0 };
        if n.is_nan() || n < min {
            min as u64
        } else if n > 1e18 {
            u64::MAX / 4
        } else {
            n as u64
        }
    }
}

#[derive(Clone, Copy)]
enum Horizons<'a> {
    Adaptive(f64),
    Fixed(&'a [u64]),
}

struct Direct<'a> {
    seqs: &'a [BoundedSequence],
    pows: Vec<NegPow>,
    maj: Majorant,
    n0: f64,
}

#[derive(Default, Clone, Copy)]
struct Walk {
    value: Complex64,
    bound: f64,
    terms: u64,
}

impl Direct<'_> {
    fn level_horizon(&self, h: Horizons, j: usize, y: f64, w: f64) -> u64 {
        match h {
            Horizons::Adaptive(lambda) => self.maj.horizon(j, y, w, lambda),
            Horizons::Fixed(ns) => ns[j],
        }
    }

    /// Walk level j at prefix y = n0 + n_1 + ... + n_{j-1} with prefix weight
    /// w = prod |a_l(n_l)| x_l^{-sigma_l}. With `sum == false` only the tail
    /// bound and the term count are accumulated.
    fn walk(&self, h: Horizons, j: usize, y: f64, w: f64, sum: bool, stats: &mut [u64]) -> Walk {
        let r = self.seqs.len();
        let n_max = self.level_horizon(h, j, y, w);
        stats[j] = stats[j].max(n_max);
        let mut out = Walk {
            bound: if y + n_max as f64 >= 1.0 {
                w * self.maj.tail(j, y, n_max)
            } else {
                f64::INFINITY
            },
            ..Default::default()
        };
        if j + 1 == r {
            out.terms = n_max;
            if sum {
                let mut total = Complex64::new(0.0, 0.0);
                let mut chunk = Complex64::new(0.0, 0.0);
                for n in 1..=n_max {
                    let a = self.seqs[j].value(n);
                    if a != Complex64::new(0.0, 0.0) {
                        chunk += a * self.pows[j].eval(y + n as f64);
                    }
                    if n % 1024 == 0 {
                        total += chunk;
                        chunk = Complex64::new(0.0, 0.0);
                    }
                }
                out.value = total + chunk;
            }
            return out;
        }
        for n in 1..=n_max {
            let a = self.seqs[j].value(n);
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = y + n as f64;
            let pw = self.pows[j].eval(x);
            let inner = self.walk(h, j + 1, x, w * a.norm() * pw.norm(), sum, stats);
            out.value += a * pw * inner.value;
            out.bound += inner.bound;
            out.terms += inner.terms;
        }
        out
    }

    /// Top level split into ordered chunks for deterministic parallel sums.
    fn run(&self, h: Horizons, sum: bool) -> (Walk, Vec<u64>) {
        let r = self.seqs.len();
        let mut stats = vec![0u64; r];
        let n_max = self.level_horizon(h, 0, self.n0, 1.0);
        stats[0] = n_max;
        let top_tail = if self.n0 + n_max as f64 >= 1.0 {
            self.maj.tail(0, self.n0, n_max)
        } else {
            f64::INFINITY
        };
        if r == 1 && !sum {
            return (
                Walk {
                    value: Complex64::new(0.0, 0.0),
                    bound: top_tail,
                    terms: n_max,
                },
                stats,
            );
        }
        let chunk = if r == 1 { 1 << 16 } else { 64 };
        let starts: Vec<u64> = (0..n_max.div_ceil(chunk)).map(|c| 1 + c * chunk).collect();
        let parts: Vec<(Walk, Vec<u64>)> = starts
            .par_iter()
            .map(|&lo| {
                let hi = (lo + chunk - 1).min(n_max);
                let mut st = vec![0u64; r];
                let mut acc = Walk::default();
                for n in lo..=hi {
                    let a = self.seqs[0].value(n);
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let x = self.n0 + n as f64;
                    let pw = self.pows[0].eval(x);
                    if r == 1 {
                        acc.value += a * pw;
                        acc.terms += 1;
                        continue;
                    }
                    let inner = self.walk(h, 1, x, a.norm() * pw.norm(), sum, &mut st);
                    acc.value += a * pw * inner.value;
                    acc.bound += inner.bound;
                    acc.terms += inner.terms;
                }
                (acc, st)
            })
            .collect();
        let values: Vec<Complex64> = parts.iter().map(|(w, _)| w.value).collect();
        let mut total = Walk {
            value: pairwise_sum(&values),
            bound: top_tail,
            terms: 0,
        };
        for (w, st) in &parts {
            total.bound += w.bound;
            total.terms += w.terms;
            for (a, b) in stats.iter_mut().zip(st) {
                *a = (*a).max(*b);
            }
        }
        if r == 1 {
            total.terms = n_max;
        }
        (total, stats)
    }
}

fn direct_setup<'a>(seqs: &'a [BoundedSequence], p: &SPoint) -> Result<Direct<'a>> {
    check_sequences(seqs, p, 3, "direct summation handles r <= 3")?;
    if !in_domain_d0(p) {
        return Err(MdlError::Region(
            "direct summation needs absolute convergence: s lies outside D0".into(),
        ));
    }
    Ok(Direct {
        seqs,
        pows: p.s().iter().map(|&s| NegPow::new(s)).collect(),
        maj: Majorant::new(seqs, p),
        n0: p.n0() as f64,
    })
}

pub fn evaluate_direct(seqs: &[BoundedSequence], p: &SPoint, tol: f64) -> Result<SummationReport> {
    evaluate_direct_with(seqs, p, tol, &DirectOptions::default())
}

/// Nested summation with horizons chosen where each term's majorant falls
/// below a common threshold; the threshold is lowered until the accumulated
/// certified tail is <= tol.
pub fn evaluate_direct_with(
    seqs: &[BoundedSequence],
    p: &SPoint,
    tol: f64,
    opts: &DirectOptions,
) -> Result<SummationReport> {
    let start = Instant::now();
    if !(tol > 0.0 && tol.is_finite()) {
        return arg_err(format!("tolerance must be positive, got {tol}"));
    }
    let d = direct_setup(seqs, p)?;
    let mut lambda = tol;
    let mut planned = None;
    for _ in 0..200 {
        let (w, _) = d.run(Horizons::Adaptive(lambda), false);
        if w.terms > opts.max_terms {
            return Err(MdlError::Budget {
                message: format!(
                    "direct summation needs more than {} terms for tol {tol:.1e}",
                    opts.max_terms
                ),
                best: None,
            });
        }
        if w.bound <= tol {
            planned = Some(lambda);
            break;
        }
        lambda /= 4.0;
    }
    let lambda = planned.ok_or_else(|| MdlError::Budget {
        message: "could not meet the tolerance with the majorant tail".into(),
        best: None,
    })?;
    let (w, horizons) = d.run(Horizons::Adaptive(lambda), true);
    Ok(SummationReport {
        value: w.value,
        horizons,
        tail_bound: Some(w.bound),
        spread: None,
        mode: SummationMode::Direct,
        terms: w.terms,
        wall_time: start.elapsed(),
    })
}

/// Sum over the box n_i <= N_i in the given loop order, with the certified
/// bound on everything outside the box.
pub fn direct_box_sum(
    seqs: &[BoundedSequence],
    p: &SPoint,
    horizons: &[u64],
    order: SummationOrder,
) -> Result<(Complex64, f64)> {
    let d = direct_setup(seqs, p)?;
    let r = p.r();
    if horizons.len() != r || horizons.contains(&0) {
        return arg_err(format!("expected {r} positive horizons"));
    }
    let (nested, _) = d.run(Horizons::Fixed(horizons), order == SummationOrder::InnermostLast);
    if order == SummationOrder::InnermostLast {
        return Ok((nested.value, nested.bound));
    }
    // odometer with n_1 varying fastest
    let mut idx = vec![1u64; r];
    let mut total = Complex64::new(0.0, 0.0);
    let mut row = Complex64::new(0.0, 0.0);
    'outer: loop {
        let mut term = Complex64::new(1.0, 0.0);
        let mut x = d.n0;
        for j in 0..r {
            x += idx[j] as f64;
            term *= seqs[j].value(idx[j]) * d.pows[j].eval(x);
        }
        row += term;
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] <= horizons[j] {
                break;
            }
            idx[j] = 1;
            if j == 0 {
                total += row;
                row = Complex64::new(0.0, 0.0);
            }
            j += 1;
            if j == r {
                break 'outer;
            }
        }
    }
    Ok((total + row, nested.bound))
}

// ---------------------------------------------------------------------------
// iterated Abel summation

#[derive(Debug, Clone)]
pub struct AbelOptions {
    /// Largest outer horizon tried.
    pub max_horizon: u64,
}

impl Default for AbelOptions {
    fn default() -> Self {
        Self { max_horizon: 1 << 24 }
    }
}

/// Number of partial-summation steps in the inner remainder expansion.
const EXPANSION_ORDER: usize = 6;

/// sum_{m >= 1} a(m) (c + m)^{-s} for a zero-sum periodic a and Re s > 0.
struct ShiftedSeries<'a> {
    table: &'a PeriodicTable,
    anti: PeriodicAntiderivatives,
    s: Complex64,
    pow: NegPow,
    /// |s (s+1)_D| sup|R_D| / (sigma + D)
    remainder_const: f64,
    /// (s)_{d+1} = s (s+1)_d for d < D
    coeffs: Vec<Complex64>,
}

impl<'a> ShiftedSeries<'a> {
    fn new(seq: &'a BoundedSequence, s: Complex64) -> Result<Self> {
        let table = seq.periodic_table().ok_or_else(|| {
            MdlError::Argument(format!(
                "{}: iterated-Abel evaluation needs a periodic sequence",
                seq.label()
            ))
        })?;
        let anti = PeriodicAntiderivatives::new(table, EXPANSION_ORDER).ok_or_else(|| {
            MdlError::Region(format!(
                "{}: unbounded partial sums (non-zero period sum)",
                seq.label()
            ))
        })?;
        let d = EXPANSION_ORDER;
        let remainder_const =
            anti.sup(d) * pochhammer(s, d as u32 + 1).norm() / (s.re + d as f64);
        let coeffs = (0..d).map(|k| pochhammer(s, k as u32 + 1)).collect();
        Ok(Self {
            table,
            anti,
            s,
            pow: NegPow::new(s),
            remainder_const,
            coeffs,
        })
    }

    fn period(&self) -> u64 {
        self.table.period() as u64
    }

    /// Remainder sum_{m > M} a(m) (c+m)^{-s} for M a period multiple, and a
    /// bound on the error of the returned value.
    fn remainder(&self, c: f64, m: u64) -> (Complex64, f64) {
        let base = c + m as f64;
        let mut v = self.anti.mean() * self.pow.eval(base);
        let mut scale = self.pow.eval(base) / base;
        for (d, coeff) in self.coeffs.iter().enumerate() {
            v -= self.anti.at(d + 1, m) * coeff * scale;
            scale /= base;
        }
        let err = self.remainder_const * base.powf(-self.s.re - EXPANSION_ORDER as f64);
        (v, err)
    }

    fn exact_len(&self, c: f64, target: f64) -> u64 {
        let p = self.period();
        let mut m = p * (8 * EXPANSION_ORDER as u64);
        while self.remainder(c, m).1 > target && m < (1 << 40) {
            m *= 2;
        }
        m
    }

    /// sum_{m >= 1} a(m) (c + m)^{-s} with the exact part summed to M.
    fn full(&self, c: f64, m: u64) -> (Complex64, f64) {
        let head: Complex64 = (1..=m)
            .map(|k| self.table.value(k) * self.pow.eval(c + k as f64))
            .sum();
        let (tail, err) = self.remainder(c, m);
        (head + tail, err)
    }

    /// G(n) = sum_{m >= 1} a(m) (c + n + m)^{-s} for n = 0..=count, by
    /// backward recurrence from exactly summed top values. Returns the values
    /// and a bound on the error of each.
    fn shifted_values(&self, c: f64, count: u64, target: f64) -> (Vec<Complex64>, f64, u64) {
        let p = self.period();
        let top = count + 1;
        let m = self.exact_len(c + top as f64, target);
        let mut g = vec![Complex64::new(0.0, 0.0); (top + p) as usize];
        let mut err = 0.0f64;
        for n in top..top + p {
            let (v, e) = self.full(c + n as f64, m);
            g[n as usize] = v;
            err = err.max(e);
        }
        // f(k) = (c + k)^{-s}
        let f: Vec<Complex64> = (0..top + p)
            .map(|k| if c + k as f64 > 0.0 { self.pow.eval(c + k as f64) } else { Complex64::new(0.0, 0.0) })
            .collect();
        for n in (0..top).rev() {
            let mut acc = g[(n + p) as usize];
            for j in 1..=p {
                acc += self.table.value(j) * f[(n + j) as usize];
            }
            g[n as usize] = acc;
        }
        g.truncate((count + 1) as usize);
        (g, err, m)
    }
}

pub fn evaluate_iterated_abel(seqs: &[BoundedSequence], p: &SPoint, tol: f64) -> Result<SummationReport> {
    evaluate_iterated_abel_with(seqs, p, tol, &AbelOptions::default())
}

pub fn evaluate_iterated_abel_with(
    seqs: &[BoundedSequence],
    p: &SPoint,
    tol: f64,
    opts: &AbelOptions,
) -> Result<SummationReport> {
    let start = Instant::now();
    if !(tol > 0.0 && tol.is_finite()) {
        return arg_err(format!("tolerance must be positive, got {tol}"));
    }
    check_sequences(seqs, p, 2, "iterated-Abel summation handles r <= 2")?;
    if !in_domain_d(p) {
        return Err(MdlError::Region(
            "s lies outside the proven region D (some suffix sum of Re s is <= 0)".into(),
        ));
    }
    for s in seqs {
        s.partial_sum_bound()?;
    }
    let c = p.n0() as f64;
    let inner = ShiftedSeries::new(&seqs[p.r() - 1], p.s()[p.r() - 1])?;

    if p.r() == 1 {
        let m = inner.exact_len(c, tol / 4.0);
        let (value, err) = inner.full(c, m);
        return Ok(SummationReport {
            value,
            horizons: vec![m],
            tail_bound: None,
            spread: Some(err),
            mode: SummationMode::IteratedAbel,
            terms: m,
            wall_time: start.elapsed(),
        });
    }

    let outer = &seqs[0];
    let table1 = outer.periodic_table().ok_or_else(|| {
        MdlError::Argument(format!(
            "{}: iterated-Abel evaluation needs a periodic sequence",
            outer.label()
        ))
    })?;
    let p1 = table1.period() as u64;
    let mu1 = outer.mean_partial_sum().unwrap_or_default();
    let pow1 = NegPow::new(p.s()[0]);
    let amax1 = outer.max_abs_value();

    // averaged, boundary-corrected outer partial sums at horizon x
    let averaged = |x: u64| -> (Complex64, f64, u64) {
        let count = x + p1 + 1;
        // inner error times sum |a_1(n) (c+n)^{-s_1}| must stay below tol/4
        let weight: f64 = (1..=count).map(|n| amax1 * (c + n as f64).powf(-p.s()[0].re)).sum();
        let (g, g_err, m) = inner.shifted_values(c, count, tol / 4.0 / weight.max(1.0));
        let b = |n: u64| pow1.eval(c + n as f64) * g[n as usize];
        let terms: Vec<Complex64> = (1..=x + p1).map(|n| table1.value(n) * b(n)).collect();
        let mut partial = pairwise_sum(&terms[..(x - 1) as usize]);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..p1 {
            let h = x + j;
            partial += terms[(h - 1) as usize];
            acc += partial + (mu1 - table1.partial_sum_at(h)) * b(h + 1);
        }
        (acc / p1 as f64, g_err * weight, m)
    };

    let mut x = p1 * 64;
    let (mut prev, _, _) = averaged(x);
    loop {
        x *= 2;
        let (cur, inner_err, m) = averaged(x);
        let spread = (cur - prev).norm() + inner_err;
        if (cur - prev).norm() <= tol / 2.0 {
            return Ok(SummationReport {
                value: cur,
                horizons: vec![x, m],
                tail_bound: None,
                spread: Some(spread),
                mode: SummationMode::IteratedAbel,
                terms: x,
                wall_time: start.elapsed(),
            });
        }
        if 2 * x > opts.max_horizon {
            return Err(MdlError::Budget {
                message: format!(
                    "outer averages still differ by {:.3e} at horizon {x}",
                    (cur - prev).norm()
                ),
                best: Some(BestEffort {
                    value: cur,
                    error_estimate: spread,
                }),
            });
        }
        prev = cur;
    }
}

/// Outer partial sums sum_{n_1 <= x} for x = 1..=X, the inner series (r = 2)
/// summed to convergence.
pub fn partial_sum_trajectory(seqs: &[BoundedSequence], p: &SPoint, x_max: u64) -> Result<Vec<Complex64>> {
    check_sequences(seqs, p, 2, "trajectories are available for r <= 2")?;
    let c = p.n0() as f64;
    let pow1 = NegPow::new(p.s()[0]);
    let g: Vec<Complex64> = if p.r() == 2 {
        if p.s()[1].re <= 0.0 {
            return Err(MdlError::Region(
                "the inner series needs Re s_2 > 0".into(),
            ));
        }
        let inner = ShiftedSeries::new(&seqs[1], p.s()[1])?;
        inner.shifted_values(c, x_max, 1e-15).0
    } else {
        vec![Complex64::new(1.0, 0.0); (x_max + 1) as usize]
    };
    let mut out = Vec::with_capacity(x_max as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=x_max {
        let a = seqs[0].value(n);
        if a != Complex64::new(0.0, 0.0) {
            acc += a * pow1.eval(c + n as f64) * g[n as usize];
        }
        out.push(acc);
    }
    Ok(out)
}
