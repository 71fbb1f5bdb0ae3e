//! Discrete L² pairings and the Sobolev-type norms built on them.

use crate::error::{invalid, Result};
use crate::function::FunctionRep;
use crate::grid::{Interval, QuadGrid};
use crate::special::neumaier_sum;

fn same_interval(x: &Interval, y: &Interval) -> bool {
    let tol = 1e-12 * (x.length() + x.a.abs() + x.b.abs());
    (x.a - y.a).abs() <= tol && (x.b - y.b).abs() <= tol
}

fn check_domain(f: &FunctionRep, grid: &QuadGrid) -> Result<()> {
    if !same_interval(&f.domain(), &grid.span()) {
        return invalid(format!(
            "function lives on [{}, {}] but the grid spans [{}, {}]",
            f.domain().a,
            f.domain().b,
            grid.span().a,
            grid.span().b
        ));
    }
    Ok(())
}

/// Values of `f^{(order)}` at the grid nodes, after checking the domain.
pub fn sample_on(f: &FunctionRep, grid: &QuadGrid, order: usize) -> Result<Vec<f64>> {
    check_domain(f, grid)?;
    f.eval_many(&grid.nodes, order)
}

pub fn inner_product(f: &FunctionRep, g: &FunctionRep, grid: &QuadGrid) -> Result<f64> {
    if !same_interval(&f.domain(), &g.domain()) {
        return invalid("inner product of functions on different domains");
    }
    let fv = sample_on(f, grid, 0)?;
    let gv = sample_on(g, grid, 0)?;
    Ok(neumaier_sum(grid.weights.iter().zip(fv.iter().zip(&gv)).map(|(w, (a, b))| w * a * b)))
}

fn norm_of_samples(grid: &QuadGrid, values: impl Iterator<Item = f64>) -> f64 {
    neumaier_sum(grid.weights.iter().zip(values).map(|(w, v)| w * v * v)).max(0.0).sqrt()
}

pub fn l2_norm(f: &FunctionRep, grid: &QuadGrid) -> Result<f64> {
    weighted_norm(f, grid, 0, 0)
}

/// `‖f'‖`, through the exact derivative of series representations.
pub fn h1_seminorm(f: &FunctionRep, grid: &QuadGrid) -> Result<f64> {
    weighted_norm(f, grid, 0, 1)
}

/// `‖x^p f^{(k)}‖` with `p ∈ {0, 1}` and `k ≤ 2`.
pub fn weighted_norm(f: &FunctionRep, grid: &QuadGrid, weight_power: u32, derivative_order: usize) -> Result<f64> {
    if weight_power > 1 {
        return invalid(format!("weight power {weight_power} is not 0 or 1"));
    }
    let v = sample_on(f, grid, derivative_order)?;
    Ok(norm_of_samples(
        grid,
        grid.nodes.iter().zip(v).map(|(x, v)| if weight_power == 1 { x * v } else { v }),
    ))
}

/// `‖f'‖ / ‖f‖`, the oscillation ratio that drives the stability estimates.
pub fn oscillation_ratio(f: &FunctionRep, grid: &QuadGrid) -> Result<f64> {
    let n = l2_norm(f, grid)?;
    if n == 0.0 {
        return invalid("oscillation ratio of the zero function");
    }
    Ok(h1_seminorm(f, grid)? / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, HalfLineDomain};
    use std::f64::consts::PI;

    fn unit_grid(n: usize) -> QuadGrid {
        make_grid(Interval::unit(), n).unwrap()
    }

    #[test]
    fn trig_pairings_on_unit_interval() {
        let g = unit_grid(16);
        let one = FunctionRep::constant(Interval::unit(), 1.0);
        let s = FunctionRep::sine(Interval::unit(), vec![1.0]);
        let c = FunctionRep::cosine(Interval::unit(), vec![1.0]);
        assert!((inner_product(&one, &one, &g).unwrap() - 1.0).abs() < 1e-14);
        assert!(inner_product(&s, &c, &g).unwrap().abs() < 1e-12);
        assert!((inner_product(&s, &s, &g).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn norms_of_simple_functions() {
        let g = unit_grid(16);
        let one = FunctionRep::constant(Interval::unit(), 1.0);
        assert!((l2_norm(&one, &g).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(h1_seminorm(&one, &g).unwrap(), 0.0);
        let s = FunctionRep::sine(Interval::unit(), vec![1.0]);
        assert!((l2_norm(&s, &g).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((h1_seminorm(&s, &g).unwrap() - PI * 0.5f64.sqrt()).abs() < 1e-12);
        let z = FunctionRep::zero(Interval::unit());
        assert_eq!(l2_norm(&z, &g).unwrap(), 0.0);
        assert_eq!(h1_seminorm(&z, &g).unwrap(), 0.0);
    }

    #[test]
    fn sine_seminorm_equals_norm_of_cosine_derivative() {
        let d = Interval::new(1.0, 2.0).unwrap();
        let g = make_grid(d, 64).unwrap();
        let f = FunctionRep::sine(d, vec![0.3, -0.2, 0.9, 0.1, 0.05]);
        let df = f.derivative().unwrap();
        assert!(matches!(df, FunctionRep::CosineSeries { .. }));
        let a = h1_seminorm(&f, &g).unwrap();
        let b = l2_norm(&df, &g).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn half_line_weighted_norms_of_exponential() {
        let half = HalfLineDomain::new(40.0, 8).unwrap();
        let g = make_grid(half, 256).unwrap();
        let f = FunctionRep::PolyExp { domain: half.as_interval(), coefficients: vec![1.0], rate: 1.0 };
        assert!((weighted_norm(&f, &g, 0, 0).unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((weighted_norm(&f, &g, 1, 1).unwrap() - 0.5).abs() < 1e-6);
        let z = FunctionRep::PolyExp { domain: half.as_interval(), coefficients: vec![0.0], rate: 1.0 };
        assert_eq!(weighted_norm(&z, &g, 1, 2).unwrap(), 0.0);
        assert!(weighted_norm(&f, &g, 0, 3).is_err());
        assert!(weighted_norm(&f, &g, 2, 0).is_err());
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let g = unit_grid(8);
        let f = FunctionRep::sine(Interval::new(1.0, 2.0).unwrap(), vec![1.0]);
        let h = FunctionRep::sine(Interval::unit(), vec![1.0]);
        assert!(l2_norm(&f, &g).is_err());
        assert!(inner_product(&f, &h, &g).is_err());
    }
}
