//! The worst-conditioned function in a finite basis and how fast that minimum shrinks
//! as the basis grows.

use illposed::adversarial::{build_gramian, orthonormal_basis, subspace_decay, worst_function, BasisFamily};
use illposed::grid::make_grid;
use illposed::integral::OperatorKind;
use illposed::Interval;

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    let kind = OperatorKind::laplace(ab)?;
    let grid = make_grid(ab, 256)?;

    let report = build_gramian(&kind, &orthonormal_basis(BasisFamily::Sine, ab, 6), &grid)?;
    let f = worst_function(&report)?;
    println!("six sines: min ‖Lf‖²/‖f‖² = {:.4e}, resolved: {}", report.min_eigenvalue, report.resolved());
    let coeffs: Vec<String> = report.minimizer_coefficients.iter().map(|c| format!("{c:+.4}")).collect();
    println!("  minimizer coefficients [{}]", coeffs.join(", "));
    for x in [1.0, 1.25, 1.5, 1.75, 2.0] {
        println!("  f({x}) = {:+.5}", f.eval(x)?);
    }

    let decay = subspace_decay(&kind, BasisFamily::Sine, 2..=12, 256)?;
    for p in &decay.points {
        println!("  n = {:<2} min eig {:.3e}{}", p.n, p.min_eigenvalue, if p.resolved { "" } else { "  (below rounding)" });
    }
    println!("  ln(min eig) ≈ {:.3} + {:.3} n over {:?}", decay.fit.intercept, decay.fit.slope, decay.fitted_sizes);
    Ok(())
}
