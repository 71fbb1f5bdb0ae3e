//! Fit the stability constants on eigenfunction sweeps and test random ensembles
//! against the relaxed bounds.

use illposed::ensemble::{self, DEFAULT_SEED};
use illposed::integral::OperatorKind;
use illposed::stability::{adjoint_domain, eigenfunction_sweep, fit_constants, verify_theorem, FitForm, Sizes};
use illposed::{FunctionRep, Interval};

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    let sizes = Sizes::default();
    let count = 500;

    let cases: Vec<(OperatorKind, FitForm, Box<dyn Fn(&mut ensemble::EnsembleRng) -> FunctionRep>)> = vec![
        (OperatorKind::laplace(ab)?, FitForm::Exponential, Box::new(move |r| ensemble::sine_series(r, ab, 8))),
        (
            OperatorKind::laplace_adjoint(ab)?,
            FitForm::Exponential,
            Box::new(move |r| ensemble::poly_exp(r, adjoint_domain(&ab).unwrap())),
        ),
        (OperatorKind::fourier(), FitForm::PowerOfRatio, Box::new(|r| ensemble::legendre_series(r, Interval::symmetric(), 12, 0.0))),
    ];

    for (suite, (kind, form, draw)) in cases.into_iter().enumerate() {
        let sweep = eigenfunction_sweep(&kind, sizes, 12)?;
        let fit = fit_constants(&sweep, form, format!("{kind} eigenfunctions 1..12"))?;
        println!("{kind}: {form:?} fit c1 = {:.4e}, c2 = {:.4}, r^2 = {:.5}", fit.c1, fit.c2, fit.r_squared);
        if kind == OperatorKind::fourier() {
            let alt = fit_constants(&sweep, FitForm::Exponential, "")?;
            println!("  exponential form on the same sweep: r^2 = {:.5}", alt.r_squared);
        }
        for p in &sweep {
            println!("  n={:2} ratio={:9.4} lhs={:.6e}", p.n, p.h1_ratio, p.lhs);
        }
        println!("  residuals {:?}", fit.residuals.iter().map(|r| format!("{r:+.3}")).collect::<Vec<_>>());
        let mut rng = ensemble::stream(DEFAULT_SEED, 100 + suite as u64);
        let members: Vec<FunctionRep> = (0..count).map(|_| draw(&mut rng)).collect();
        let report = verify_theorem(&kind, &fit, &members, sizes.grid);
        let worst = report.records.iter().map(|r| r.lhs / r.rhs).fold(f64::INFINITY, f64::min);
        println!(
            "  {count} random members: {} violations, {} errors, smallest lhs/rhs = {worst:.3e}",
            report.violations,
            report.errors.len()
        );
    }
    Ok(())
}
