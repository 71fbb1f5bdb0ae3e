//! The three auxiliary inequalities on concrete functions.

use illposed::diffop::{assemble_bertero_grunbaum, DiffOpSpec};
use illposed::grid::make_grid;
use illposed::spectral::{diff_spectrum, eigenfunction};
use illposed::stability::{lemma1_constants, lemma3_c1, verify_lemma1, verify_lemma2, verify_lemma3};
use illposed::{FunctionRep, Interval};

fn main() -> illposed::Result<()> {
    let ab = Interval::new(1.0, 2.0)?;
    let grid = make_grid(ab, 128)?;

    // A function with a zero in [a,b] is bounded by √(b−a) ‖f'‖.
    let f = FunctionRep::sample(ab, 16, |x| (x - 1.3) * (2.5 - x));
    let r = verify_lemma2(&f, &grid)?;
    println!("sup-norm bound: sup |f| = {:.5} ≤ {:.5}: {}", r.sup_norm, r.bound, r.pass);

    // Nonnegative f: ∫f ≥ c1 exp(−c2 ‖f'‖/‖f‖) ‖f‖, with c1 determined by c2 and the interval.
    let g = FunctionRep::sample(ab, 16, |x| (x - 1.5).powi(2));
    for c2 in [0.5, 2.0, 8.0] {
        let r = verify_lemma3(&g, &grid, c2)?;
        println!("integral bound c2 = {c2}: c1 = {:.5} (from a, b: {:.5}), lhs {:.5e} ≥ rhs {:.5e}: {}", r.c1, lemma3_c1(c2, ab.a, ab.b)?, r.lhs, r.rhs, r.pass);
    }

    // Low-frequency mass in the differential eigenbasis.
    let op = assemble_bertero_grunbaum(ab, 128)?;
    let dec = diff_spectrum(&DiffOpSpec::BerteroGrunbaum { ab }, 128)?;
    let sample: Vec<FunctionRep> = (1..=dec.converged).map(|n| eigenfunction(&dec, ab, n)).collect();
    let k = lemma1_constants(&op, &dec, &sample)?;
    println!("low-frequency constants: growth {:.5}, Dirichlet {:.3}, c = {:.4}", k.growth, k.dirichlet, k.c);
    for h in [FunctionRep::sine(ab, vec![1.0, 0.0, 0.4]), FunctionRep::sample(ab, 12, |x| (x * 9.0).cos() * x)] {
        let r = verify_lemma1(&h, &op, &dec, k.c)?;
        println!("  mass {:.6} in the first {} modes (threshold {}): {}", r.low_freq_mass, r.summed_to, r.threshold_index, r.pass);
    }
    Ok(())
}
