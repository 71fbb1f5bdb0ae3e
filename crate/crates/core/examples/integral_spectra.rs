//! Singular-value decay of the truncated transforms and the fitted decay laws.

use illposed::integral::OperatorKind;
use illposed::spectral::{fit_decay, integral_spectrum, DecayKind, DEFAULT_WINDOW};
use illposed::Interval;

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    for (kind, decay) in [(OperatorKind::laplace(ab)?, DecayKind::Exp), (OperatorKind::fourier(), DecayKind::SuperExp)] {
        let dec = integral_spectrum(&kind, 256, 128)?;
        println!("{kind} ({:?} route, {} usable modes above {:.0e})", dec.route, dec.usable(), dec.floor());
        for (n, mu) in dec.eigenvalues.iter().take(dec.usable().min(16)).enumerate() {
            println!("  μ_{:<2} = {mu:.6e}", n + 1);
        }
        let fit = fit_decay(&dec, decay, DEFAULT_WINDOW)?;
        println!("  {:?} over modes {:?}: r² = {:.7}", fit.model, fit.n_range, fit.r_squared);
    }
    Ok(())
}
