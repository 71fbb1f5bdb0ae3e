//! Worst-case ("nearly invisible") functions from the smallest eigenpair of a Gramian,
//! and reproduction of the published example functions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::function::FunctionRep;
use crate::grid::{make_grid, HalfLineDomain, Interval, QuadGrid};
use crate::integral::{fourier_transform, laplace_forward, quadratic_form, gram_matrix, transform_norm_sq, OperatorKind};
use crate::linalg::{fit_line, singular_values, smallest_right_singular, LineFit};
use crate::norms::{inner_product, l2_norm, sample_on};
use crate::special::neumaier_sum;

const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;
/// Singular values below this fraction of the largest are indistinguishable from rounding.
pub const SINGULAR_FLOOR: f64 = 1e-14;
const FOURIER_XI_NODES: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    Sine,
    Cosine,
    Legendre,
}

impl std::str::FromStr for BasisFamily {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(BasisFamily::Sine),
            "cosine" => Ok(BasisFamily::Cosine),
            "legendre" => Ok(BasisFamily::Legendre),
            other => invalid(format!("unknown basis family `{other}` (sine, cosine, legendre)")),
        }
    }
}

/// `n` functions orthonormal on `domain`: `√(2/L) sin(kπ(x−a)/L)`, the cosine analogue
/// (both for `k = 1..n`), or normalized Legendre polynomials.
pub fn orthonormal_basis(family: BasisFamily, domain: Interval, n: usize) -> Vec<FunctionRep> {
    let scale = (2.0 / domain.length()).sqrt();
    (0..n)
        .map(|k| match family {
            BasisFamily::Sine => {
                FunctionRep::SineSeries { domain, coefficients: vec![scale], first_mode: k + 1, raw: false }
            }
            BasisFamily::Cosine => {
                FunctionRep::CosineSeries { domain, coefficients: vec![scale], first_mode: k + 1, raw: false }
            }
            BasisFamily::Legendre => {
                let mut c = vec![0.0; k + 1];
                c[k] = 1.0;
                FunctionRep::legendre(domain, c)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisDescriptor {
    pub family: String,
    pub size: usize,
    pub domain: Interval,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramianReport {
    pub operator: String,
    pub basis_descriptor: BasisDescriptor,
    #[serde(skip)]
    pub basis: Vec<FunctionRep>,
    #[serde(serialize_with = "serialize_matrix")]
    pub gramian: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub minimizer_coefficients: Vec<f64>,
    /// `σ_min / σ_max` of the transfer matrix; below [`SINGULAR_FLOOR`] the minimum is
    /// rounding noise rather than a property of the operator.
    pub condition_ratio: f64,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

impl GramianReport {
    pub fn resolved(&self) -> bool {
        self.condition_ratio >= SINGULAR_FLOOR
    }
}

/// Columns `T φ_k` sampled with square-root weights, so that `BᵀB` is the Gramian.
fn transfer_matrix(kind: &OperatorKind, basis: &[FunctionRep], grid: &QuadGrid) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let columns: Vec<Vec<f64>> = match kind {
        OperatorKind::HilbertTruncated { j, .. } => {
            let out = make_grid(*j, 2 * n)?;
            let sw = out.sqrt_weights();
            basis
                .iter()
                .map(|phi| {
                    let wf: Vec<f64> = sample_on(phi, grid, 0)?.iter().zip(&grid.weights).map(|(v, w)| v * w).collect();
                    Ok(out
                        .nodes
                        .iter()
                        .zip(&sw)
                        .map(|(&y, s)| s * neumaier_sum(grid.nodes.iter().zip(&wf).map(|(x, wf)| wf / (y - x))) / PI)
                        .collect())
                })
                .collect::<Result<_>>()?
        }
        OperatorKind::LaplaceTt { ab } => {
            let half = make_grid(HalfLineDomain::for_laplace(ab)?, n)?;
            let sw = half.sqrt_weights();
            basis
                .iter()
                .map(|phi| Ok(laplace_forward(phi, *ab, &half.nodes)?.iter().zip(&sw).map(|(v, s)| v * s).collect()))
                .collect::<Result<_>>()?
        }
        OperatorKind::LaplaceAdjointTt { ab, .. } => {
            let out = make_grid(*ab, n)?;
            let sw = out.sqrt_weights();
            basis
                .iter()
                .map(|phi| {
                    let wf: Vec<f64> = sample_on(phi, grid, 0)?.iter().zip(&grid.weights).map(|(v, w)| v * w).collect();
                    Ok(out
                        .nodes
                        .iter()
                        .zip(&sw)
                        .map(|(&t, s)| s * neumaier_sum(grid.nodes.iter().zip(&wf).map(|(x, wf)| (-t * x).exp() * wf)))
                        .collect())
                })
                .collect::<Result<_>>()?
        }
        OperatorKind::FourierTt { sym } => {
            let xi = make_grid(*sym, FOURIER_XI_NODES)?;
            let sw = xi.sqrt_weights();
            basis
                .iter()
                .map(|phi| {
                    let mut col = Vec::with_capacity(2 * xi.len());
                    let mut imag = Vec::with_capacity(xi.len());
                    for (x, s) in xi.nodes.iter().zip(&sw) {
                        let (re, im) = fourier_transform(phi, *x, n)?;
                        col.push(s * re);
                        imag.push(s * im);
                    }
                    col.extend(imag);
                    Ok(col)
                })
                .collect::<Result<_>>()?
        }
    };
    let rows = columns.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, basis.len(), |r, c| columns[c][r]))
}

pub fn build_gramian(kind: &OperatorKind, basis: &[FunctionRep], grid: &QuadGrid) -> Result<GramianReport> {
    if basis.is_empty() {
        return invalid("empty basis");
    }
    for (i, fi) in basis.iter().enumerate() {
        for (j, fj) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            let g = inner_product(fi, fj, grid)?;
            if (g - target).abs() > ORTHONORMALITY_TOLERANCE {
                return invalid(format!("basis is not orthonormal on the grid: ⟨φ{i}, φ{j}⟩ = {g:.3e}"));
            }
        }
    }
    let b = transfer_matrix(kind, basis, grid)?;
    let gramian = b.transpose() * &b;
    let (_, minimizer) = smallest_right_singular(&b);
    let image = &b * &minimizer;
    let min_eigenvalue = neumaier_sum(image.iter().map(|v| v * v));
    let sv = singular_values(&b);
    let condition_ratio = sv.last().copied().unwrap_or(0.0) / sv[0];
    Ok(GramianReport {
        operator: kind.to_string(),
        basis_descriptor: BasisDescriptor {
            family: basis[0].kind_name().to_string(),
            size: basis.len(),
            domain: basis[0].domain(),
        },
        basis: basis.to_vec(),
        gramian,
        min_eigenvalue,
        minimizer_coefficients: minimizer.iter().copied().collect(),
        condition_ratio,
    })
}

/// `Σ a_k φ_k` for the Gramian minimizer `a`.
pub fn worst_function(report: &GramianReport) -> Result<FunctionRep> {
    FunctionRep::linear_combination(&report.minimizer_coefficients, &report.basis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

impl FigureId {
    pub fn from_number(id: u32) -> Result<Self> {
        match id {
            1 => Ok(FigureId::Fig1),
            2 => Ok(FigureId::Fig2),
            3 => Ok(FigureId::Fig3),
            other => invalid(format!("unknown figure id {other} (1, 2 or 3)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureSpec {
    pub figure_id: FigureId,
    pub coefficients: Vec<f64>,
    /// The printed function, in raw `x` exactly as plotted.
    pub function: FunctionRep,
    pub domain: Interval,
    pub operator: OperatorKind,
    pub claimed_ratio: f64,
    /// Accepted band for the computed ratio.
    pub band: (f64, f64),
}

impl FigureSpec {
    pub fn builtin(id: FigureId) -> Result<Self> {
        let (coefficients, first_mode, cosine, domain, operator, claimed_ratio, band) = match id {
            FigureId::Fig1 => (
                vec![-0.15269, 0.4830, 0.3084, 0.80509],
                2,
                false,
                Interval::unit(),
                OperatorKind::hilbert(Interval::unit(), Interval::new(2.0, 3.0)?)?,
                1e-7,
                (1e-7 / 30.0, 30e-7),
            ),
            FigureId::Fig2 => {
                let ab = Interval::new(1.0, 2.0)?;
                (vec![-0.0707, -0.421, 0.2137, 0.8783], 1, false, ab, OperatorKind::laplace(ab)?, 1e-8, (1e-8 / 30.0, 30e-8))
            }
            FigureId::Fig3 => (
                vec![0.00055, 0.0824, 0.6196, 0.7805],
                1,
                true,
                Interval::symmetric(),
                OperatorKind::fourier(),
                1e-18,
                (1e-20, 1e-16),
            ),
        };
        let function = if cosine {
            FunctionRep::CosineSeries { domain, coefficients: coefficients.clone(), first_mode, raw: true }
        } else {
            FunctionRep::SineSeries { domain, coefficients: coefficients.clone(), first_mode, raw: true }
        };
        Ok(FigureSpec { figure_id: id, coefficients, function, domain, operator, claimed_ratio, band })
    }

    /// The printed basis functions one at a time, scaled to unit norm.
    fn unit_basis(&self, grid: &QuadGrid) -> Result<Vec<FunctionRep>> {
        let (first, raw) = match &self.function {
            FunctionRep::SineSeries { first_mode, raw, .. } | FunctionRep::CosineSeries { first_mode, raw, .. } => {
                (*first_mode, *raw)
            }
            _ => unreachable!("figures are trigonometric"),
        };
        (0..self.coefficients.len())
            .map(|k| {
                let phi = match self.function {
                    FunctionRep::SineSeries { .. } => {
                        FunctionRep::SineSeries { domain: self.domain, coefficients: vec![1.0], first_mode: first + k, raw }
                    }
                    _ => FunctionRep::CosineSeries { domain: self.domain, coefficients: vec![1.0], first_mode: first + k, raw },
                };
                Ok(phi.scaled(1.0 / l2_norm(&phi, grid)?))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureDiagnostics {
    /// Smallest Gramian eigenvalue over the printed basis: the best ratio any
    /// coefficients could reach.
    pub basis_min_ratio: f64,
    pub minimizer: Vec<f64>,
    /// `|cos ∠(printed coefficients, minimizer)|`.
    pub alignment: f64,
    /// The ratio of the same function via `fᵀ M f` on the operator matrix.
    pub matrix_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureResult {
    pub figure: FigureId,
    pub operator: String,
    pub computed_ratio: f64,
    pub claimed_ratio: f64,
    pub band: (f64, f64),
    pub pass: bool,
    pub diagnostics: FigureDiagnostics,
}

pub const FIGURE_GRID: usize = 256;

pub fn reproduce_figure(spec: &FigureSpec) -> Result<FigureResult> {
    let grid = make_grid(spec.domain, FIGURE_GRID)?;
    let norm_sq = l2_norm(&spec.function, &grid)?.powi(2);
    let computed_ratio = transform_norm_sq(&spec.operator, &spec.function, FIGURE_GRID)? / norm_sq;
    let m = gram_matrix(&spec.operator, &grid)?;
    let matrix_ratio = quadratic_form(&m, &spec.function)? / norm_sq;
    let report = build_gramian(&spec.operator, &spec.unit_basis(&grid)?, &grid)?;
    let printed_norm = spec.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    let alignment = spec
        .coefficients
        .iter()
        .zip(&report.minimizer_coefficients)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs()
        / printed_norm;
    Ok(FigureResult {
        figure: spec.figure_id,
        operator: spec.operator.to_string(),
        computed_ratio,
        claimed_ratio: spec.claimed_ratio,
        band: spec.band,
        pass: spec.band.0 <= computed_ratio && computed_ratio <= spec.band.1,
        diagnostics: FigureDiagnostics {
            basis_min_ratio: report.min_eigenvalue,
            minimizer: report.minimizer_coefficients,
            alignment,
            matrix_ratio,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspacePoint {
    pub n: usize,
    pub min_eigenvalue: f64,
    pub condition_ratio: f64,
    pub resolved: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceDecay {
    pub operator: String,
    pub family: BasisFamily,
    pub points: Vec<SubspacePoint>,
    /// Fit of `ln(min eig)` against `n` over the resolved points.
    pub fit: LineFit,
    pub fitted_sizes: Vec<usize>,
}

const MIN_SUBSPACE_POINTS: usize = 5;

/// Smallest Gramian eigenvalue over nested bases of sizes `sizes`, with an affine fit of
/// its logarithm over the sizes where it is resolved in double precision.
pub fn subspace_decay(
    kind: &OperatorKind,
    family: BasisFamily,
    sizes: std::ops::RangeInclusive<usize>,
    grid_size: usize,
) -> Result<SubspaceDecay> {
    let domain = kind.input_domain().span();
    let grid = make_grid(kind.input_domain(), grid_size)?;
    let points: Vec<SubspacePoint> = sizes
        .map(|n| {
            let report = build_gramian(kind, &orthonormal_basis(family, domain, n), &grid)?;
            Ok(SubspacePoint {
                n,
                min_eigenvalue: report.min_eigenvalue,
                condition_ratio: report.condition_ratio,
                resolved: report.resolved(),
            })
        })
        .collect::<Result<_>>()?;
    let used: Vec<&SubspacePoint> = points.iter().filter(|p| p.resolved).collect();
    if used.len() < MIN_SUBSPACE_POINTS {
        return Err(crate::error::Error::InsufficientData(format!(
            "{} resolved subspace sizes; need {MIN_SUBSPACE_POINTS}",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.min_eigenvalue.ln()).collect();
    Ok(SubspaceDecay {
        operator: kind.to_string(),
        family,
        fitted_sizes: used.iter().map(|p| p.n).collect(),
        fit: fit_line(&xs, &ys)?,
        points,
    })
}
