//! Pairings and norms of a few closed-form functions, next to their exact values.

use illposed::grid::make_grid;
use illposed::norms::{h1_seminorm, inner_product, l2_norm, oscillation_ratio, weighted_norm};
use illposed::{FunctionRep, Interval};

fn main() -> illposed::Result<()> {
    let pi = std::f64::consts::PI;
    let unit = Interval::new(0.0, 1.0)?;
    let grid = make_grid(unit, 64)?;

    let s3 = FunctionRep::sine(unit, vec![0.0, 0.0, 1.0]);
    println!("sin(3πx) on [0,1]: ‖f‖ = {:.15} (exact {:.15})", l2_norm(&s3, &grid)?, 0.5f64.sqrt());
    println!("                   ‖f'‖ = {:.12} (exact {:.12})", h1_seminorm(&s3, &grid)?, 3.0 * pi / 2f64.sqrt());
    println!("                   ‖f'‖/‖f‖ = {:.12} (exact 3π)", oscillation_ratio(&s3, &grid)?);

    let s1 = FunctionRep::sine(unit, vec![1.0]);
    println!("⟨sin πx, sin 3πx⟩ = {:.2e}", inner_product(&s1, &s3, &grid)?);

    let x2 = FunctionRep::sample(unit, 8, |x| x * x);
    println!("x² on [0,1]: ‖f‖ = {:.15} (exact {:.15})", l2_norm(&x2, &grid)?, 0.2f64.sqrt());
    // ‖x · f'‖ = ‖2x²‖ = 2/√5.
    println!("             ‖x f'‖ = {:.15} (exact {:.15})", weighted_norm(&x2, &grid, 1, 1)?, 2.0 / 5f64.sqrt());
    Ok(())
}
