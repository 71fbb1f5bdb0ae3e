//! Thin helpers over nalgebra: sorted symmetric eigensolves, singular values, line fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// `‖M − Mᵀ‖_F / ‖M‖_F` (zero for the zero matrix).
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / norm
}

/// Flip each column so its largest-magnitude entry is positive.
pub fn normalize_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let pivot = col.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
}

/// Eigenpairs of a symmetric matrix, sorted ascending or descending, with the sign convention applied.
pub fn eig_sym_sorted(m: &DMatrix<f64>, ascending: bool, tolerance: f64) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if !m.is_square() {
        return invalid("eigendecomposition of a non-square matrix");
    }
    let defect = symmetry_defect(m);
    if defect > tolerance {
        return invalid(format!("matrix asymmetry {defect:.3e} exceeds {tolerance:.1e}"));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    if !ascending {
        order.reverse();
    }
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    normalize_signs(&mut vectors);
    Ok((values, vectors))
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm_sym(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Right singular vector of the smallest singular value, with the sign convention applied.
pub fn smallest_right_singular(a: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty matrix");
    let mut v = DMatrix::from_fn(v_t.ncols(), 1, |r, _| v_t[(idx, r)]);
    normalize_signs(&mut v);
    (sigma, v.column(0).into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return invalid("a line fit needs at least two paired points");
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("line fit with a degenerate abscissa");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = eig_sym_sorted(&m, true, 1e-12).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!(vecs.column(1).iter().all(|&x| x > 0.0));
        let (desc, _) = eig_sym_sorted(&m, false, 1e-12).unwrap();
        assert_eq!(desc[0], vals[1]);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(eig_sym_sorted(&m, true, 1e-10).is_err());
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (1..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-13 && (fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smallest_singular_pair() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1e-3, 0.0, 0.0]);
        let (s, v) = smallest_right_singular(&a);
        assert!((s - 1e-3).abs() < 1e-15);
        assert!((v[1] - 1.0).abs() < 1e-14);
        assert_eq!(singular_values(&a), vec![1.0, 1e-3]);
    }
}
