//! Spectral routes against reference values computed independently at 70-digit precision
//! (Nyström for the Laplace kernel, Legendre–Galerkin plus Bessel-series transforms for
//! the sinc kernel).

use illposed::diffop::{assemble_bertero_grunbaum, assemble_prolate, DiffOpSpec};
use illposed::grid::{make_grid, Interval};
use illposed::integral::{gram_matrix, OperatorKind};
use illposed::spectral::{
    commutation_residual,    diff_spectrum, fit_decay, growth_check, integral_spectrum, match_eigenfunctions, DecayKind, DecayModel,
    SpectrumRoute,
};

const LAPLACE_MU: [f64; 20] = [
    0.34317880265064,
    0.00336814017527516,
    2.64457190809503e-5,
    2.002265171874e-7,
    1.49724369901736e-9,
    1.11323978362906e-11,
    8.25175971837958e-14,
    6.10519340585152e-16,
    4.51160013602079e-18,
    3.33122891037196e-20,
    2.45823251916114e-22,
    1.81322866774118e-24,
    1.33702214808694e-26,
    9.85627722718484e-29,
    7.26438071137191e-31,
    5.35319174751564e-33,
    3.94428699921524e-35,
    2.90586706899016e-37,
    2.14063371708101e-39,
    1.57679273073074e-41,
];

const FOURIER_MU: [f64; 20] = [
    3.59763743126,
    0.394529211157,
    0.00777531193456,
    5.78114438095e-5,
    2.33604340892e-7,
    5.96364558309e-10,
    1.05027940124e-12,
    1.35368030348e-15,
    1.33249013172e-18,
    1.03460273766e-21,
    6.49900781078e-25,
    3.37094128955e-28,
    1.46820644443e-31,
    5.44594039776e-35,
    1.74104629001e-38,
    4.84704608887e-42,
    1.18568327908e-45,
    2.56864921728e-49,
    4.96263168657e-53,
    8.60375447476e-57,
];

fn ab() -> Interval {
    Interval::new(1.0, 2.0).unwrap()
}

#[test]
fn laplace_rayleigh_route_matches_reference() {
    let dec = integral_spectrum(&OperatorKind::laplace(ab()).unwrap(), 256, 128).unwrap();
    assert_eq!(dec.route, SpectrumRoute::Rayleigh);
    for (n, (mu, truth)) in dec.eigenvalues.iter().zip(LAPLACE_MU).enumerate().take(dec.usable()) {
        let tol = if n < 11 { 1e-6 } else { 1e-2 };
        eprintln!("{} {mu:e} {truth:e} {:e}", n + 1, mu / truth - 1.0);
        assert!((mu / truth - 1.0).abs() < tol, "mode {}: {mu:e} vs {truth:e}", n + 1);
    }
    assert!(dec.usable() >= 12, "usable {}", dec.usable());
}

#[test]
fn laplace_dense_route_agrees_above_its_floor() {
    let kind = OperatorKind::laplace(ab()).unwrap();
    let m = gram_matrix(&kind, &make_grid(ab(), 256).unwrap()).unwrap();
    let dec = illposed::spectral::eig_sym(&m.entries, illposed::spectral::SpectrumOrder::DescendingIntegral).unwrap();
    // A backward-stable dense solve is accurate to a few ulps of μ_1, not relative to μ_n.
    for n in 0..dec.usable() {
        assert!((dec.eigenvalues[n] - LAPLACE_MU[n]).abs() < 1e-14 * LAPLACE_MU[0], "mode {}", n + 1);
    }
    assert!(dec.usable() < 8);
}

#[test]
fn fourier_refined_route_matches_reference() {
    let dec = integral_spectrum(&OperatorKind::fourier(), 256, 128).unwrap();
    assert_eq!(dec.route, SpectrumRoute::Refined);
    for (n, (mu, truth)) in dec.eigenvalues.iter().zip(FOURIER_MU).enumerate() {
        eprintln!("{} {mu:e} {truth:e} {:e}", n + 1, mu / truth - 1.0);
        assert!((mu / truth - 1.0).abs() < 1e-9, "mode {}: {mu:e} vs {truth:e}", n + 1);
    }
}

#[test]
fn laplace_decay_is_exponential() {
    let dec = integral_spectrum(&OperatorKind::laplace(ab()).unwrap(), 256, 128).unwrap();
    let fit = fit_decay(&dec, DecayKind::Exp, (2, 25)).unwrap();
    eprintln!("{fit:?}");
    assert!(fit.r_squared >= 0.99);
    assert!(matches!(fit.model, DecayModel::ExpDecay { c2, .. } if c2 > 0.0));
}

#[test]
fn fourier_decay_is_superexponential() {
    let dec = integral_spectrum(&OperatorKind::fourier(), 256, 128).unwrap();
    let slope = |w| match fit_decay(&dec, DecayKind::SuperExp, w).unwrap().model {
        DecayModel::SuperExp { slope, .. } => slope,
        _ => unreachable!(),
    };
    let (s1, s2) = (slope((4, 12)), slope((8, 16)));
    eprintln!("{s1} {s2}");
    assert!(s1 < 0.0 && s2 < 0.0);
    assert!((s1 - s2).abs() <= 0.15 * s1.abs().max(s2.abs()));
}

#[test]
fn eigenfunctions_coincide() {
    for (kind, diff) in [
        (OperatorKind::laplace(ab()).unwrap(), assemble_bertero_grunbaum(ab(), 128).unwrap()),
        (OperatorKind::fourier(), assemble_prolate(128).unwrap()),
    ] {
        let m = gram_matrix(&kind, &make_grid(kind.input_domain(), 256).unwrap()).unwrap();
        let report = match_eigenfunctions(&m, &diff, 10).unwrap();
        eprintln!("{kind}: comm {:e} max {:e}", report.commutation_residual, report.max_relative_residual());
        assert!(report.max_relative_residual() <= 1e-6);
        assert!(report.commutation_residual <= 1e-8);
        assert!(report.rayleigh_decreasing());
    }
}

#[test]
fn mismatched_pair_does_not_commute() {
    let kind = OperatorKind::laplace(ab()).unwrap();
    let m = gram_matrix(&kind, &make_grid(ab(), 256).unwrap()).unwrap();
    let prolate = assemble_prolate(64).unwrap();
    let mismatched = commutation_residual(&m, &prolate).unwrap();
    let matched = commutation_residual(&m, &assemble_bertero_grunbaum(ab(), 64).unwrap()).unwrap();
    // The Frobenius normalization shrinks every residual like N^{-5/2}; what separates
    // the pairs is the gap between them.
    assert!(mismatched > 1e6 * matched, "{mismatched:e} vs {matched:e}");
    // Eigenfunction matching itself insists on a shared domain.
    assert!(match_eigenfunctions(&m, &prolate, 4).is_err());
}

#[test]
fn growth_is_quadratic_and_stable() {
    for spec in [DiffOpSpec::BerteroGrunbaum { ab: ab() }, DiffOpSpec::Prolate] {
        let g1 = growth_check(&diff_spectrum(&spec, 128).unwrap()).unwrap();
        let g2 = growth_check(&diff_spectrum(&spec, 256).unwrap()).unwrap();
        eprintln!("{}: {g1} {g2}", spec.name());
        assert!(g1 > 0.0 && (g1 - g2).abs() <= 0.02 * g1);
    }
}
