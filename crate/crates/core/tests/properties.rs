//! Property-based invariants of the pairing, the operator forms and the verifiers.

use illposed::adversarial::{build_gramian, orthonormal_basis, worst_function, BasisFamily};
use illposed::ensemble;
use illposed::grid::{make_grid, Interval};
use illposed::integral::{gram_matrix, quadratic_form, transform_norm_sq, OperatorKind};
use illposed::norms::{h1_seminorm, inner_product, l2_norm};
use illposed::stability::{verify_lemma2, verify_lemma3};
use illposed::FunctionRep;
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_len)
}

fn interval() -> impl Strategy<Value = Interval> {
    (-3.0f64..3.0, 0.1f64..4.0).prop_map(|(a, len)| Interval::new(a, a + len).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cauchy_schwarz(d in interval(), c1 in coeffs(8), c2 in coeffs(8)) {
        let g = make_grid(d, 32).unwrap();
        let f = FunctionRep::sine(d, c1);
        let h = FunctionRep::legendre(d, c2);
        let ip = inner_product(&f, &h, &g).unwrap();
        prop_assert!(ip.abs() <= l2_norm(&f, &g).unwrap() * l2_norm(&h, &g).unwrap() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn pairing_is_bilinear_and_symmetric(d in interval(), c1 in coeffs(6), c2 in coeffs(6), c3 in coeffs(6), s in -3.0f64..3.0) {
        let g = make_grid(d, 32).unwrap();
        let (f, h, k) = (FunctionRep::legendre(d, c1), FunctionRep::legendre(d, c2), FunctionRep::cosine(d, c3));
        let combo = FunctionRep::linear_combination(&[s, 1.0], &[f.clone(), h.clone()]).unwrap();
        let lhs = inner_product(&combo, &k, &g).unwrap();
        let rhs = s * inner_product(&f, &k, &g).unwrap() + inner_product(&h, &k, &g).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        let (fk, kf) = (inner_product(&f, &k, &g).unwrap(), inner_product(&k, &f, &g).unwrap());
        let scale = l2_norm(&f, &g).unwrap() * l2_norm(&k, &g).unwrap();
        prop_assert!((fk - kf).abs() <= 1e-14 * scale.max(1e-300));
    }

    #[test]
    fn legendre_parseval(d in interval(), c in coeffs(12)) {
        let g = make_grid(d, 32).unwrap();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let f = FunctionRep::legendre(d, c);
        prop_assert!((l2_norm(&f, &g).unwrap() - norm).abs() < 1e-12 * (1.0 + norm));
    }

    #[test]
    fn sine_derivative_norm_is_spectral(d in interval(), c in coeffs(8)) {
        // ‖f'‖² = Σ (kπ/L)² c_k² L/2 for a mapped sine series.
        let g = make_grid(d, 48).unwrap();
        let l = d.length();
        let expect = c.iter().enumerate().map(|(i, v)| ((i + 1) as f64 * std::f64::consts::PI / l * v).powi(2) * l / 2.0).sum::<f64>().sqrt();
        let got = h1_seminorm(&FunctionRep::sine(d, c), &g).unwrap();
        prop_assert!((got - expect).abs() < 1e-11 * (1.0 + expect));
    }

    #[test]
    fn gauss_rule_is_exact_to_its_degree(n in 1usize..40, d in interval()) {
        let g = make_grid(d, n).unwrap();
        let deg = 2 * n - 1;
        let got = g.integrate_fn(|x| x.powi(deg as i32));
        let expect = (d.b.powi(deg as i32 + 1) - d.a.powi(deg as i32 + 1)) / (deg + 1) as f64;
        let scale = d.a.abs().max(d.b.abs()).powi(deg as i32 + 1) / (deg + 1) as f64;
        prop_assert!((got - expect).abs() <= 1e-12 * scale.max(expect.abs()) * (deg as f64), "deg {} got {} expect {}", deg, got, expect);
    }

    #[test]
    fn sign_changing_functions_obey_the_sup_bound(d in interval(), c in coeffs(10), t in 0.0f64..1.0) {
        let g = FunctionRep::legendre(d, c.clone());
        let x0 = d.a + t * d.length();
        let mut c = c;
        c[0] -= g.eval(x0).unwrap() * d.length().sqrt();
        let rec = verify_lemma2(&FunctionRep::legendre(d, c), &make_grid(d, 64).unwrap()).unwrap();
        prop_assert!(rec.pass);
    }

    #[test]
    fn nonnegative_functions_obey_the_integral_bound(d in interval(), c in coeffs(6), c2 in 0.05f64..8.0, shift in 0.0f64..1.0) {
        let g = FunctionRep::legendre(d, c);
        let f = FunctionRep::sample(d, 40, |x| g.eval(x).unwrap().powi(2) + shift);
        let grid = make_grid(d, 64).unwrap();
        let rec = verify_lemma3(&f, &grid, c2).unwrap();
        prop_assert!(rec.pass, "{:?}", rec);
        prop_assert_eq!(rec.pass, verify_lemma3(&f.scaled(17.0), &grid, c2).unwrap().pass);
    }
}

#[test]
fn quadratic_form_matches_transform_route() {
    let ab = Interval::new(1.0, 2.0).unwrap();
    let kind = OperatorKind::laplace(ab).unwrap();
    let m = gram_matrix(&kind, &make_grid(ab, 128).unwrap()).unwrap();
    let mut rng = ensemble::stream(7, 1);
    for _ in 0..20 {
        let f = ensemble::sine_series(&mut rng, ab, 6);
        let a = quadratic_form(&m, &f).unwrap();
        let b = transform_norm_sq(&kind, &f, 256).unwrap();
        assert!((a - b).abs() < 1e-9 * b.max(1e-12), "{a:e} vs {b:e}");
    }
}

#[test]
fn gramian_minimum_matches_direct_evaluation() {
    let ab = Interval::new(1.0, 2.0).unwrap();
    let kind = OperatorKind::laplace(ab).unwrap();
    let grid = make_grid(ab, 256).unwrap();
    for family in [BasisFamily::Sine, BasisFamily::Legendre] {
        let rep = build_gramian(&kind, &orthonormal_basis(family, ab, 4), &grid).unwrap();
        let f = worst_function(&rep).unwrap();
        let direct = transform_norm_sq(&kind, &f, 256).unwrap() / l2_norm(&f, &grid).unwrap().powi(2);
        assert!((direct / rep.min_eigenvalue - 1.0).abs() < 1e-6, "{family:?}: {direct:e} vs {:e}", rep.min_eigenvalue);
    }
}

#[test]
fn ensembles_are_reproducible() {
    let ab = Interval::new(1.0, 2.0).unwrap();
    let draw = |seed| {
        let mut rng = ensemble::stream(seed, 3);
        (0..10).map(|_| ensemble::sine_series(&mut rng, ab, 8)).collect::<Vec<_>>()
    };
    assert_eq!(draw(ensemble::DEFAULT_SEED), draw(ensemble::DEFAULT_SEED));
    assert_ne!(draw(ensemble::DEFAULT_SEED), draw(1));
}
