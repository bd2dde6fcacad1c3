mod common;

use mdl_core::characters::BoundedSequence;
use mdl_core::integrator::{
    box_tail_bound, evaluate_integral, evaluate_integral_with, integrate_cells, tail_bound, CellLayout,
    IntegralOptions, Plan, TruncationPlan,
};
use mdl_core::kernel::SPoint;
use mdl_core::oracle::{evaluate_direct, evaluate_iterated_abel};
use mdl_core::MdlError;
use num_complex::Complex64;

use common::{c, chi};

fn plan_of(res: &mdl_core::EvaluationResult) -> TruncationPlan {
    match &res.plan {
        Plan::Truncation(t) => t.clone(),
        other => panic!("unexpected plan {other:?}"),
    }
}

#[test]
fn agrees_with_direct_summation_on_absolute_region() {
    let mut points = Vec::new();
    for s in [2.0, 2.5, 3.0, 3.5, 4.0] {
        for q in [3u64, 4, 5] {
            points.push((vec![c(s, 0.0)], vec![chi(q, &[1])], 0u64));
        }
    }
    for (s1, s2) in [(2.0, 2.0), (2.5, 2.5), (3.0, 2.0), (2.2, 2.4)] {
        points.push((vec![c(s1, 0.0), c(s2, 0.0)], vec![chi(4, &[1]), chi(3, &[1])], 0));
    }
    points.push((vec![c(2.5, 1.0), c(2.5, -0.5)], vec![chi(5, &[1]), chi(4, &[1])], 1));
    points.push((vec![c(2.5, 3.0)], vec![chi(7, &[2])], 2));
    assert!(points.len() >= 20);
    for (s, seqs, n0) in points {
        let p = SPoint::new(s.clone(), n0).unwrap();
        let a = evaluate_integral(&seqs, &p, 1e-7).unwrap();
        let b = evaluate_direct(&seqs, &p, 1e-5).unwrap();
        let gap = (a.value - b.value).norm();
        assert!(gap <= a.error_estimate + b.error_estimate() + 1e-12, "s={s:?}: gap {gap:.2e}");
    }
}

#[test]
fn node_doubling_stays_within_estimate() {
    let seqs = [chi(4, &[1]), chi(3, &[1])];
    let p = SPoint::real(&[0.5, 0.7]).unwrap();
    let res = evaluate_integral(&seqs, &p, 1e-6).unwrap();
    let plan = plan_of(&res);
    let mut doubled = plan.clone();
    doubled.nodes *= 2;
    let fine = integrate_cells(&seqs, &p, &doubled).unwrap();
    let base = integrate_cells(&seqs, &p, &plan).unwrap();
    assert_eq!(base, res.value);
    assert!((fine - base).norm() <= plan.quadrature_error.max(1e-13));
}

#[test]
fn raising_cutoff_changes_less_than_tail_bound() {
    let seqs = [chi(4, &[1])];
    let p = SPoint::real(&[0.8]).unwrap();
    let alphas = [4.0];
    for t in [64u64, 1024, 1 << 16] {
        let plan = TruncationPlan::new(vec![t], 24, CellLayout::Dyadic);
        let a = integrate_cells(&seqs, &p, &plan).unwrap();
        let plan = TruncationPlan::new(vec![t * 64], 24, CellLayout::Dyadic);
        let b = integrate_cells(&seqs, &p, &plan).unwrap();
        let bound = tail_bound(&p, &alphas, t as f64).unwrap();
        assert!((a - b).norm() <= bound, "T={t}");
    }
    // rank two: the box-complement bound covers every escape direction
    let seqs = [chi(4, &[1]), chi(3, &[1])];
    let p = SPoint::real(&[0.5, 0.7]).unwrap();
    let reference = evaluate_iterated_abel(&seqs, &p, 1e-10).unwrap().value;
    for t in [32u64, 512, 8192] {
        let plan = TruncationPlan::new(vec![t, t], 24, CellLayout::Dyadic);
        let a = integrate_cells(&seqs, &p, &plan).unwrap();
        let bound = box_tail_bound(&p, &[4.0, 3.0], &[t as f64, t as f64]).unwrap();
        assert!((a - reference).norm() <= bound, "T={t}");
    }
}

#[test]
fn shifted_series_match_oracle() {
    for m in [0u64, 1, 5] {
        let p = SPoint::real(&[0.8]).unwrap().with_n0(m);
        let seqs = [chi(4, &[1])];
        let a = evaluate_integral(&seqs, &p, 1e-9).unwrap();
        let b = evaluate_iterated_abel(&seqs, &p, 1e-11).unwrap();
        assert!((a.value - b.value).norm() <= 1e-9, "n0={m}");
    }
}

#[test]
fn conjugation_symmetry() {
    let chi5 = chi(5, &[1]);
    let p = SPoint::new(vec![c(0.6, 2.0), c(0.9, -1.0)], 0).unwrap();
    let seqs = [chi5.clone(), chi(4, &[1])];
    let a = evaluate_integral(&seqs, &p, 1e-7).unwrap();
    let conj_seqs = [chi5.conj(), chi(4, &[1]).conj()];
    let b = evaluate_integral(&conj_seqs, &p.conj(), 1e-7).unwrap();
    assert!((a.value.conj() - b.value).norm() <= 1e-12, "{} vs {}", a.value, b.value);
}

#[test]
fn reductions_are_bit_stable() {
    let seqs = [chi(4, &[1]), chi(3, &[1])];
    let p = SPoint::real(&[-0.3, 1.2]).unwrap();
    let a = evaluate_integral(&seqs, &p, 1e-6).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| evaluate_integral(&seqs, &p, 1e-6).unwrap());
    assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
    assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
}

#[test]
fn rank_three_against_direct() {
    let seqs = [chi(4, &[1]), chi(3, &[1]), chi(4, &[1])];
    let p = SPoint::real(&[2.0, 2.0, 2.0]).unwrap();
    let a = evaluate_integral(&seqs, &p, 1e-5).unwrap();
    let b = evaluate_direct(&seqs, &p, 1e-5).unwrap();
    assert!((a.value - b.value).norm() <= a.error_estimate + b.error_estimate());
}

#[test]
fn custom_rule_sequence() {
    // the alternating sequence given as a rule rather than a table
    let rule = BoundedSequence::custom(
        "alt-rule",
        |n| Complex64::new(if n % 2 == 1 { 1.0 } else { -1.0 }, 0.0),
        1.0,
    )
    .unwrap();
    let p = SPoint::real(&[1.5]).unwrap();
    let opts = IntegralOptions::default();
    let a = evaluate_integral_with(&[rule], &p, 1e-6, &opts).unwrap();
    let b = evaluate_integral(&[BoundedSequence::alternating()], &p, 1e-6).unwrap();
    assert!((a.value - b.value).norm() <= 2e-6);
}

#[test]
fn budget_and_region_errors() {
    let seqs = [chi(4, &[1]), chi(4, &[1])];
    let p = SPoint::real(&[0.5, -0.2]).unwrap();
    assert!(matches!(evaluate_integral(&seqs, &p, 1e-4), Err(MdlError::Region(_))));
    let p = SPoint::real(&[0.5, 0.7]).unwrap();
    let opts = IntegralOptions {
        max_cells: 100,
        layout: CellLayout::Unit,
        ..Default::default()
    };
    match evaluate_integral_with(&seqs, &p, 1e-6, &opts) {
        Err(MdlError::Budget { best: Some(b), .. }) => assert!(b.error_estimate > 1e-6),
        other => panic!("expected budget error, got {other:?}"),
    }
}
