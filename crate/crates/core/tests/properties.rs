mod common;

use mdl_core::characters::{enumerate_characters, make_character, BoundedSequence, UnitGroup};
use mdl_core::compositions::{coefficient, enumerate_compositions};
use mdl_core::kernel::{
    in_domain_d, in_domain_d0, kernel_eval, pochhammer, PreparedKernel, SPoint,
};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{brute_force_compositions, c, naive_in_d, naive_in_d0};

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..4.0f64, -5.0..5.0f64).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nonprincipal_partial_sums_bounded_by_modulus(q in 3u64..=100, pick in any::<prop::sample::Index>(), t in 0.0..5000.0f64) {
        let chars: Vec<_> = enumerate_characters(q).unwrap().into_iter().filter(|c| !c.is_principal()).collect();
        prop_assume!(!chars.is_empty());
        let chi = pick.get(&chars);
        let seq = BoundedSequence::from_character(chi);
        prop_assert!(seq.partial_sum(t).norm() <= q as f64 + 1e-9);
        prop_assert_eq!(seq.partial_sum_bound().unwrap(), q as f64);
        // partial sum by brute force
        let brute: Complex64 = (1..=t.floor() as u64).map(|n| chi.value(n)).sum();
        prop_assert!((brute - seq.partial_sum(t)).norm() < 1e-9);
    }

    #[test]
    fn characters_are_completely_multiplicative(q in 1u64..=100, pick in any::<prop::sample::Index>(), m in 1u64..10_000, n in 1u64..10_000) {
        let chars = enumerate_characters(q).unwrap();
        let chi = pick.get(&chars);
        let lhs = chi.value(m * n);
        let rhs = chi.value(m) * chi.value(n);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert_eq!(chi.value(m), chi.value(m + q));
        let exact = chi.value_exact(m).map(|z| z.to_complex()).unwrap_or_default();
        prop_assert!((exact - chi.value(m)).norm() < 1e-15);
    }

    #[test]
    fn discrete_log_reconstructs_unit(q in 2u64..=500, n in 1u64..10_000) {
        let g = UnitGroup::new(q).unwrap();
        match g.discrete_log(n) {
            Some(exps) => {
                let mut acc = 1 % q;
                for (f, &e) in g.factors().iter().zip(exps) {
                    for _ in 0..e {
                        acc = acc * f.generator % q;
                    }
                }
                prop_assert_eq!(acc, n % q);
            }
            None => prop_assert!(common_gcd(n, q) != 1),
        }
    }

    #[test]
    fn region_predicates_match_definition(sigma in prop::collection::vec(-3.0..4.0f64, 1..8)) {
        let p = SPoint::real(&sigma).unwrap();
        prop_assert_eq!(in_domain_d(&p), naive_in_d(&sigma));
        prop_assert_eq!(in_domain_d0(&p), naive_in_d0(&sigma));
        // D0 is contained in D
        prop_assert!(!in_domain_d0(&p) || in_domain_d(&p));
    }

    #[test]
    fn pochhammer_recurrence(s in complex(), k in 0u32..12) {
        let lhs = pochhammer(s, k + 1);
        let rhs = pochhammer(s, k) * (s + k as f64);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn rank_two_kernel_closed_form(s1 in complex(), s2 in complex(), t1 in 1.0..50.0f64, t2 in 1.0..50.0f64, n0 in 0u64..10) {
        let p = SPoint::new(vec![s1, s2], n0).unwrap();
        let k = kernel_eval(&[t1, t2], &p, enumerate_compositions(2).unwrap()).unwrap().value;
        let x1 = n0 as f64 + t1;
        let x2 = x1 + t2;
        let pw = |x: f64, w: Complex64| (w * x.ln()).exp();
        let expected = s1 * s2 * pw(x1, -(s1 + 1.0)) * pw(x2, -(s2 + 1.0))
            + s2 * (s2 + 1.0) * pw(x1, -s1) * pw(x2, -(s2 + 2.0));
        prop_assert!((k - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        let prepared = PreparedKernel::new(&p).unwrap().eval(&[x1, x2]);
        prop_assert!((prepared - k).norm() <= 1e-12 * (1.0 + k.norm()));
    }

    #[test]
    fn kernel_conjugation(s in prop::collection::vec(complex(), 1..=4), t in prop::collection::vec(1.0..20.0f64, 4)) {
        let r = s.len();
        let p = SPoint::new(s, 2).unwrap();
        let comps = enumerate_compositions(r).unwrap();
        let a = kernel_eval(&t[..r], &p, comps).unwrap().value;
        let b = kernel_eval(&t[..r], &p.conj(), comps).unwrap().value;
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn composition_constraints_hold(r in 1usize..=10) {
        for term in enumerate_compositions(r).unwrap() {
            let mut prefix = 0;
            for (i, &k) in term.k.iter().enumerate() {
                prefix += k as usize;
                prop_assert!(k as usize <= i + 1 && prefix <= i + 1);
            }
            prop_assert_eq!(prefix, r);
            prop_assert_eq!(coefficient(&term.k).unwrap(), term.coeff);
        }
    }

    #[test]
    fn conjugate_sequence_has_conjugate_partial_sums(q in 3u64..=60, pick in any::<prop::sample::Index>(), t in 0.0..600.0f64) {
        let chars = enumerate_characters(q).unwrap();
        let chi = pick.get(&chars);
        let seq = BoundedSequence::from_character(chi);
        prop_assert!((seq.conj().partial_sum(t) - seq.partial_sum(t).conj()).norm() < 1e-9);
    }
}

fn common_gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { common_gcd(b, a % b) }
}

#[test]
fn enumerator_matches_brute_force_up_to_eight() {
    for r in 1..=8 {
        let mut got = enumerate_compositions(r).unwrap().to_vec();
        let mut want = brute_force_compositions(r);
        got.sort_by(|a, b| a.k.cmp(&b.k));
        want.sort_by(|a, b| a.k.cmp(&b.k));
        assert_eq!(got, want, "r={r}");
    }
}

#[test]
fn enumeration_order_is_decreasing_lexicographic() {
    for r in 1..=8 {
        let terms = enumerate_compositions(r).unwrap();
        for w in terms.windows(2) {
            assert!(w[0].k > w[1].k, "r={r}");
        }
    }
}

#[test]
fn quartic_character_label_roundtrip() {
    let chi = make_character(5, &[1]).unwrap();
    assert_eq!(chi.label(), "char:5:1");
    assert!((chi.value(2) - c(0.0, 1.0)).norm() < 1e-15);
}
