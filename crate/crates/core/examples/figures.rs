//! Recompute the ratio ‖Tf‖²/‖f‖² for the three published example functions.

use illposed::adversarial::{reproduce_figure, FigureId, FigureSpec};

fn main() -> illposed::Result<()> {
    for id in [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3] {
        let result = reproduce_figure(&FigureSpec::builtin(id)?)?;
        println!(
            "{:?} {:<20} ratio {:.3e} (claimed {:.0e}, band [{:.1e}, {:.1e}]) {}",
            id,
            result.operator,
            result.computed_ratio,
            result.claimed_ratio,
            result.band.0,
            result.band.1,
            if result.pass { "pass" } else { "FAIL" }
        );
        let d = &result.diagnostics;
        println!(
            "      best ratio in this basis {:.3e}, alignment with its minimizer {:.6}, minimizer {:?}",
            d.basis_min_ratio, d.alignment, d.minimizer
        );
    }
    Ok(())
}
