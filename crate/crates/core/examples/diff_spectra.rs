//! Spectra of the commuting differential operators, with their converged-mode counts.

use illposed::diffop::{converged_modes, DiffOpSpec};
use illposed::spectral::{diff_spectrum, growth_check};
use illposed::Interval;

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    let cases = [
        (DiffOpSpec::BerteroGrunbaum { ab }, 128),
        (DiffOpSpec::Prolate, 128),
        (DiffOpSpec::parse("fourth:proof", ab)?, 16),
        (DiffOpSpec::parse("fourth:lemma", ab)?, 16),
    ];
    for (spec, n) in cases {
        let dec = diff_spectrum(&spec, n)?;
        let first: Vec<String> = dec.eigenvalues.iter().take(6).map(|l| format!("{l:.6}")).collect();
        println!("{:<13} N = {n:<3} converged {:>3}  λ: {}", spec.name(), converged_modes(&spec, n)?, first.join(", "));
        if spec.orientation() > 0.0 {
            println!("{:<13} min λ_n / n² = {:.7}", "", growth_check(&dec)?);
        }
    }
    Ok(())
}
