//! Each integral operator shares its eigenvectors with a differential operator: the
//! differential modes are eigenvectors of the kernel matrix to rounding level.

use illposed::diffop::{assemble, DiffOpSpec};
use illposed::grid::make_grid;
use illposed::integral::{gram_matrix, OperatorKind};
use illposed::spectral::match_eigenfunctions;
use illposed::Interval;

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    let pairs = [
        (OperatorKind::laplace(ab)?, DiffOpSpec::BerteroGrunbaum { ab }, 128, 12),
        (OperatorKind::fourier(), DiffOpSpec::Prolate, 128, 12),
        (OperatorKind::laplace_adjoint(ab)?, DiffOpSpec::parse("fourth:proof", ab)?, 16, 4),
        (OperatorKind::laplace_adjoint(ab)?, DiffOpSpec::parse("fourth:lemma", ab)?, 16, 4),
    ];
    for (kind, spec, n, m) in pairs {
        let k = gram_matrix(&kind, &make_grid(kind.input_domain(), 256)?)?;
        let report = match_eigenfunctions(&k, &assemble(&spec, n)?, m)?;
        // Past the matrix's rounding floor the Rayleigh values stop being ordered.
        let ordered = report.modes.windows(2).take_while(|w| w[1].rayleigh < w[0].rayleigh).count() + 1;
        println!(
            "{kind} with {}: max relative residual {:.2e}, commutation {:.2e}, Rayleigh values decrease through mode {ordered} of {m} (last {:.1e})",
            report.diff,
            report.max_relative_residual(),
            report.commutation_residual,
            report.modes[ordered - 1].rayleigh
        );
    }
    Ok(())
}
