mod common;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use qcube::generators::{generate, FamilySpec, Kind};
use qcube::influence::{conditional_expectation, derivative, fourier_weights};
use qcube::io::{from_json, to_json, Format};
use qcube::laws::{check_law, Law, LawParams, Verdict};
use qcube::norms::schatten_norm;
use qcube::{pauli_matrix, CMatrix, PauliIndex, QubitSet};

fn kind() -> impl Strategy<Value = Kind> {
    prop::sample::select(Kind::ALL.to_vec())
}

fn assert_pass(law: Law, a: &qcube::QOperator, params: LawParams) -> Result<(), TestCaseError> {
    let r = check_law(law, a, &params).unwrap();
    prop_assert!(r.verdict == Verdict::Pass, "{law}: {r:?}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 100,
        rng_seed: RngSeed::Fixed(0x9c0be),
        ..ProptestConfig::default()
    })]

    #[test]
    fn parseval(n in 1usize..=5, seed in any::<u64>()) {
        let a = hermitian(n, seed);
        let by_coeff: f64 = a.spectrum().iter().map(|c| c.norm_sqr()).sum();
        let by_degree = fourier_weights(&a).total();
        prop_assert!(rel_err(a.norm2_sq_matrix(), by_coeff) <= 1e-10);
        prop_assert!(rel_err(by_degree, by_coeff) <= 1e-10);
    }

    #[test]
    fn schatten_monotone_in_p(n in 1usize..=4, seed in any::<u64>()) {
        // Normalized norms grow with p; the unnormalized ones, dim^{1/p} times
        // larger, shrink.
        let a = hermitian(n, seed);
        let dim = (1u32 << n) as f64;
        let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| schatten_norm(&a, p).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12));
        }
        let raw: Vec<f64> = ps.iter().zip(&norms).map(|(p, x)| dim.powf(1.0 / p) * x).collect();
        for w in raw.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn derivative_algebra(n in 2usize..=4, seed in any::<u64>(), i in 0usize..4, j in 0usize..4) {
        let (i, j) = (i % n, j % n);
        let a = hermitian(n, seed);
        let dj = derivative(&a, j).unwrap();
        let djj = derivative(&dj, j).unwrap();
        prop_assert_eq!(djj.spectrum(), dj.spectrum());
        let ij = derivative(&dj, i).unwrap();
        let ji = derivative(&derivative(&a, i).unwrap(), j).unwrap();
        prop_assert_eq!(ij.spectrum(), ji.spectrum());
    }

    #[test]
    fn conditional_expectations_compose(n in 1usize..=4, seed in any::<u64>(), m1 in any::<u32>(), m2 in any::<u32>()) {
        let full = (1u32 << n) - 1;
        let (s1, s2) = (QubitSet::from_mask(m1 & full), QubitSet::from_mask(m2 & full));
        let a = hermitian(n, seed);
        let twice = conditional_expectation(&conditional_expectation(&a, s1).unwrap(), s2).unwrap();
        let once = conditional_expectation(&a, s1.union(s2)).unwrap();
        prop_assert_eq!(twice.spectrum(), once.spectrum());
    }

    #[test]
    fn influence_chain_on_unitaries(n in 1usize..=5, seed in any::<u64>(), p in prop::sample::select(vec![1.0, 1.5])) {
        let a = generate(&FamilySpec::new(Kind::RandomHermitianUnitary, n, seed)).unwrap();
        let r = check_law(Law::InfluenceChain, &a, &LawParams { p: Some(p), ..Default::default() }).unwrap();
        prop_assert!(r.slack >= -1e-10, "{r:?}");
    }

    #[test]
    fn inter_and_g_bounds(n in 1usize..=5, seed in any::<u64>(), mask in 1u32..32) {
        let a = contraction(n, seed);
        let subset: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let params = LawParams { subset: Some(subset), ..Default::default() };
        assert_pass(Law::Inter, &a, params.clone())?;
        assert_pass(Law::GBounds, &a, params.clone())?;
        assert_pass(Law::GBounds, &a, LawParams { p: Some(1.5), ..params })?;
    }

    #[test]
    fn contraction_of_noise(n in 1usize..=4, seed in any::<u64>()) {
        let a = hermitian(n, seed);
        for p in [1.0, 2.0, f64::INFINITY] {
            for delta in [0.3, 0.7] {
                assert_pass(Law::Contract, &a, LawParams { p: Some(p), delta: Some(delta), ..Default::default() })?;
            }
        }
    }

    #[test]
    fn hypercontractivity(n in 1usize..=4, seed in any::<u64>()) {
        let a = hermitian(n, seed);
        for t in [0.1, 0.5, 1.0, 2.0] {
            let r = check_law(Law::Hyper, &a, &LawParams { t: Some(t), ..Default::default() }).unwrap();
            prop_assert!(r.slack >= -1e-10, "{r:?}");
        }
    }

    #[test]
    fn log_sobolev(n in 1usize..=4, seed in any::<u64>()) {
        let a = contraction(n, seed);
        assert_pass(Law::Logsob, &a, LawParams::default())?;
        for p in [1.0, 1.5] {
            assert_pass(Law::LogsobLower, &a, LawParams { p: Some(p), ..Default::default() })?;
        }
    }

    #[test]
    fn degree_bound(n in 1usize..=4, cap in 1usize..=4, seed in any::<u64>()) {
        let mut spec = FamilySpec::new(Kind::RandomLowDegree, n, seed);
        spec.extra.degree = Some(cap);
        let a = generate(&spec).unwrap();
        prop_assert!(a.degree(1e-12) <= cap.min(n));
        for q in [2.0, 4.0, 6.0] {
            assert_pass(Law::Degree, &a, LawParams { q: Some(q), ..Default::default() })?;
        }
    }

    #[test]
    fn keylemma_all_links(n in 1usize..=5, seed in any::<u64>()) {
        assert_pass(Law::Keylemma, &contraction(n, seed), LawParams::default())?;
    }

    #[test]
    fn poincare_on_every_family(k in kind(), n in 1usize..=5, seed in any::<u64>()) {
        let a = generate(&FamilySpec::new(k, n, seed)).unwrap();
        assert_pass(Law::Poincare, &a, LawParams::default())?;
    }

    #[test]
    fn boolean_generators(k in kind(), n in 1usize..=5, seed in any::<u64>()) {
        prop_assume!(k.is_boolean());
        let a = generate(&FamilySpec::new(k, n, seed)).unwrap();
        prop_assert!(a.boolean_deviation() <= 1e-10);
        prop_assert!((a.operator_norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn file_roundtrip(k in kind(), n in 1usize..=4, seed in any::<u64>()) {
        let a = generate(&FamilySpec::new(k, n, seed)).unwrap();
        let back = from_json(&to_json(&a, Format::Pauli)).unwrap();
        prop_assert_eq!(back.spectrum(), a.spectrum());
        let back = from_json(&to_json(&a, Format::Matrix)).unwrap();
        prop_assert!(back.max_coeff_diff(&a) <= 1e-12);
    }
}

#[test]
fn pauli_matrices_square_to_identity() {
    for n in 1..=3 {
        let id = CMatrix::identity(1 << n);
        for s in 0..1usize << (2 * n) {
            let p = pauli_matrix(PauliIndex::new(n, s).unwrap());
            assert!(p.matmul(&p).max_abs_diff(&id) < 1e-15);
        }
    }
}
