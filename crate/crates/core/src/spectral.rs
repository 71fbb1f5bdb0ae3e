//! Spectra of the integral compositions, their coincidence with the commuting
//! differential operators, and decay/growth laws.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diffop::{assemble, assemble_bertero_grunbaum, assemble_prolate, converged_modes, prolate_entries, DiffOpSpec, GalerkinOperator, TrialBasis};
use crate::error::{invalid, Error, Result};
use crate::function::{legendre_series_eval, FunctionRep};
use crate::grid::{make_grid, Interval};
use crate::integral::{gram_matrix, transform_norm_sq, OperatorKind, OperatorMatrix};
use crate::linalg::{eig_sym_sorted, fit_line, normalize_signs, spectral_norm_sym};

/// Eigenvalues below `DENSE_FLOOR · μ_1` from a dense solve are rounding noise.
pub const DENSE_FLOOR: f64 = 1e-14;
/// Relative floor of `‖L u_n‖²` with double-precision commuting eigenvectors: an
/// eigenvector error of `ε` in the `u_1` direction contributes `ε² μ_1`, so values
/// below about `1e-26 μ_1` lose more than three digits.
pub const RAYLEIGH_FLOOR: f64 = 1e-26;
/// The refined prolate route keeps relative accuracy down to the underflow range.
pub const REFINED_FLOOR: f64 = 1e-280;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumOrder {
    AscendingDiff,
    DescendingIntegral,
}

/// How the eigenvalues were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumRoute {
    /// Dense symmetric eigensolve of the matrix itself.
    Dense,
    /// `‖T u_n‖²` for the commuting operator's eigenvectors `u_n`, by transform-then-integrate.
    Rayleigh,
    /// Prolate eigenvectors with relatively accurate tails; `μ_n` from the eigen-identity at 0.
    Refined,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors (grid or trial-space coordinates).
    pub eigenvectors: DMatrix<f64>,
    pub order: SpectrumOrder,
    pub source: String,
    pub route: SpectrumRoute,
    /// Leading modes whose values are trustworthy.
    pub converged: usize,
}

impl SpectralDecomposition {
    pub fn floor(&self) -> f64 {
        match self.route {
            SpectrumRoute::Dense => DENSE_FLOOR,
            SpectrumRoute::Rayleigh => RAYLEIGH_FLOOR,
            SpectrumRoute::Refined => REFINED_FLOOR,
        }
    }

    /// Leading converged modes above the route floor (integral spectra only).
    pub fn usable(&self) -> usize {
        let top = self.eigenvalues.first().copied().unwrap_or(0.0);
        self.eigenvalues
            .iter()
            .take(self.converged)
            .take_while(|&&mu| mu > self.floor() * top)
            .count()
    }

    /// CSV with columns `n,eigenvalue` over the usable modes.
    pub fn to_csv(&self) -> String {
        let count = match self.order {
            SpectrumOrder::DescendingIntegral => self.usable(),
            SpectrumOrder::AscendingDiff => self.converged,
        };
        let mut out = String::from("n,eigenvalue\n");
        for (i, v) in self.eigenvalues.iter().take(count).enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, crate::report::fmt_f64(*v)));
        }
        out
    }
}

pub fn eig_sym(m: &DMatrix<f64>, order: SpectrumOrder) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = eig_sym_sorted(m, order == SpectrumOrder::AscendingDiff, 1e-10)?;
    Ok(SpectralDecomposition {
        converged: eigenvalues.len(),
        eigenvalues,
        eigenvectors,
        order,
        source: "matrix".into(),
        route: SpectrumRoute::Dense,
    })
}

/// Spectrum of a differential operator restricted to its converged modes.
pub fn diff_spectrum(spec: &DiffOpSpec, n: usize) -> Result<SpectralDecomposition> {
    let op = assemble(spec, n)?;
    let (eigenvalues, eigenvectors) = op.spectrum()?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        order: SpectrumOrder::AscendingDiff,
        source: format!("{} N={n}", spec.name()),
        route: SpectrumRoute::Dense,
        converged: converged_modes(spec, n)?,
    })
}

/// Spectrum of `T*T` by the most accurate route available for the operator.
///
/// `grid_size` is the quadrature resolution; `trial_size` the commuting-operator size.
pub fn integral_spectrum(kind: &OperatorKind, grid_size: usize, trial_size: usize) -> Result<SpectralDecomposition> {
    match kind {
        OperatorKind::LaplaceTt { ab } => laplace_rayleigh_spectrum(*ab, grid_size, trial_size),
        OperatorKind::FourierTt { .. } => prolate_refined_spectrum(trial_size),
        _ => {
            let m = gram_matrix(kind, &make_grid(kind.input_domain(), grid_size)?)?;
            let mut dec = eig_sym(&m.entries, SpectrumOrder::DescendingIntegral)?;
            dec.source = format!("{kind} n={grid_size}");
            Ok(dec)
        }
    }
}

fn laplace_rayleigh_spectrum(ab: Interval, grid_size: usize, trial_size: usize) -> Result<SpectralDecomposition> {
    let kind = OperatorKind::laplace(ab)?;
    let op = assemble_bertero_grunbaum(ab, trial_size)?;
    let converged = converged_modes(&op.spec, trial_size)?;
    let (_, vectors) = op.spectrum()?;
    let eigenvalues = (0..converged)
        .map(|k| {
            let u = op.basis.function(vectors.column(k).as_slice());
            transform_norm_sq(&kind, &u, grid_size)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: vectors.columns(0, converged).into_owned(),
        order: SpectrumOrder::DescendingIntegral,
        source: format!("{kind} via bg N={trial_size} n={grid_size}"),
        route: SpectrumRoute::Rayleigh,
        converged,
    })
}

/// Eigenvectors of one parity block of the prolate matrix (tridiagonal with diagonal
/// `d` and coupling `e`), built from ratio recurrences run inward from both ends so
/// that exponentially small coefficients keep their relative accuracy.
fn refined_block_vector(d: &[f64], e: &[f64], chi: f64, peak: usize) -> Vec<f64> {
    let m = d.len();
    let mut c = vec![0.0; m];
    c[peak] = 1.0;
    // Below the peak: r_j = c_j / c_{j+1}.
    let mut r = vec![0.0; peak];
    for j in 0..peak {
        let prev = if j == 0 { 0.0 } else { e[j - 1] * r[j - 1] };
        r[j] = -e[j] / (d[j] - chi + prev);
    }
    for j in (0..peak).rev() {
        c[j] = r[j] * c[j + 1];
    }
    // Above the peak: s_j = c_j / c_{j-1}.
    let mut s = vec![0.0; m];
    for j in (peak + 1..m).rev() {
        let next = if j + 1 < m { e[j] * s[j + 1] } else { 0.0 };
        s[j] = -e[j - 1] / (d[j] - chi + next);
    }
    for j in peak + 1..m {
        c[j] = s[j] * c[j - 1];
    }
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    c.iter().map(|v| v / norm).collect()
}

fn prolate_refined_spectrum(trial_size: usize) -> Result<SpectralDecomposition> {
    let op = assemble_prolate(trial_size)?;
    let converged = converged_modes(&op.spec, trial_size)?;
    let sym = Interval::symmetric();
    let mut values = Vec::with_capacity(trial_size);
    let mut vectors = DMatrix::zeros(trial_size, trial_size);
    let mut chis = Vec::with_capacity(trial_size);
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..trial_size).step_by(2).collect();
        let (d, e): (Vec<f64>, Vec<f64>) = idx.iter().map(|&k| prolate_entries(k)).unzip();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            if i == j {
                d[i]
            } else if j == i + 1 {
                e[i]
            } else if i == j + 1 {
                e[j]
            } else {
                0.0
            }
        });
        let (block_vals, block_vecs) = eig_sym_sorted(&block, true, 1e-14)?;
        for (j, &chi) in block_vals.iter().enumerate() {
            let peak = block_vecs.column(j).iamax();
            let coeffs = refined_block_vector(&d, &e, chi, peak);
            chis.push((chi, parity, idx.clone(), coeffs));
        }
    }
    chis.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (mode, (_, parity, idx, coeffs)) in chis.into_iter().enumerate() {
        let mut full = vec![0.0; trial_size];
        for (k, c) in idx.iter().zip(&coeffs) {
            full[*k] = *c;
        }
        // F_T u = λ u: compare the lowest Taylor coefficient at ξ = 0 on both sides.
        let mu = if parity == 0 {
            let u0 = legendre_series_eval(sym, &full, 0.0, 0);
            2.0 * full[0] * full[0] / (u0 * u0)
        } else {
            let du0 = legendre_series_eval(sym, &full, 0.0, 1);
            2.0 / 3.0 * full[1] * full[1] / (du0 * du0)
        };
        values.push(mu);
        for (k, c) in full.iter().enumerate() {
            vectors[(k, mode)] = *c;
        }
    }
    normalize_signs(&mut vectors);
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
        order: SpectrumOrder::DescendingIntegral,
        source: format!("fourier via prolate N={trial_size}"),
        route: SpectrumRoute::Refined,
        converged,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeMatch {
    pub n: usize,
    pub lambda: f64,
    pub rayleigh: f64,
    pub residual: f64,
    /// `residual / ‖M‖₂`.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub integral: String,
    pub diff: String,
    pub modes: Vec<ModeMatch>,
    pub commutation_residual: f64,
    pub converged_modes: usize,
}

impl MatchReport {
    pub fn max_relative_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.relative_residual).fold(0.0, f64::max)
    }

    /// Whether the Rayleigh values decrease strictly along the diff-ordered modes.
    pub fn rayleigh_decreasing(&self) -> bool {
        self.modes.windows(2).all(|w| w[1].rayleigh < w[0].rayleigh)
    }
}

fn same_span(basis: &TrialBasis, integral: &OperatorMatrix) -> bool {
    let (d, g) = (basis.domain(), integral.grid.span());
    (d.a - g.a).abs() <= 1e-12 * (1.0 + d.a.abs()) && (d.b - g.b).abs() <= 1e-12 * (1.0 + d.b.abs())
}

/// Trial basis sampled on the integral grid with `√w` folded in.
fn trial_on_grid(integral: &OperatorMatrix, basis: &TrialBasis) -> Result<DMatrix<f64>> {
    if !same_span(basis, integral) {
        let (d, g) = (basis.domain(), integral.grid.span());
        return invalid(format!("trial space on [{}, {}] but the operator grid spans [{}, {}]", d.a, d.b, g.a, g.b));
    }
    let [mut q, _, _] = basis.tables(&integral.grid.nodes);
    for (i, mut row) in q.row_iter_mut().enumerate() {
        row *= integral.grid.weights[i].sqrt();
    }
    Ok(q)
}

/// `‖KS − SK‖_F / (‖K‖_F ‖S‖_F)` with `K` projected into the trial space.
///
/// A Legendre trial space on another interval is compared in shared coefficient
/// coordinates (its basis pulled back to the operator's interval), which is what a
/// negative control between unrelated operators needs.
pub fn commutation_residual(integral: &OperatorMatrix, diff: &GalerkinOperator) -> Result<f64> {
    let basis = match diff.basis {
        TrialBasis::Legendre { size, .. } if !same_span(&diff.basis, integral) => {
            TrialBasis::Legendre { domain: integral.grid.span(), size }
        }
        other => other,
    };
    let q = trial_on_grid(integral, &basis)?;
    let k = q.transpose() * &integral.entries * &q;
    let s = &diff.stiffness;
    Ok((&k * s - s * &k).norm() / (k.norm() * s.norm()))
}

pub fn match_eigenfunctions(integral: &OperatorMatrix, diff: &GalerkinOperator, m: usize) -> Result<MatchReport> {
    let converged = converged_modes(&diff.spec, diff.size())?;
    if m > converged {
        return Err(Error::Range(format!("{m} modes requested but only {converged} are converged")));
    }
    let q = trial_on_grid(integral, &diff.basis)?;
    let (lambdas, vectors) = diff.spectrum()?;
    let norm = spectral_norm_sym(&integral.entries);
    let modes = (0..m)
        .map(|j| {
            let u: DVector<f64> = &q * vectors.column(j);
            let mu_vec = &integral.entries * &u;
            let rayleigh = u.dot(&mu_vec) / u.dot(&u);
            let residual = (mu_vec - &u * rayleigh).norm() / u.norm();
            ModeMatch { n: j + 1, lambda: lambdas[j], rayleigh, residual, relative_residual: residual / norm }
        })
        .collect();
    Ok(MatchReport {
        integral: integral.kind.to_string(),
        diff: diff.spec.name().to_string(),
        modes,
        commutation_residual: commutation_residual(integral, diff)?,
        converged_modes: converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DecayModel {
    /// `μ_n ≈ c1 e^{−c2 n}`.
    ExpDecay { c1: f64, c2: f64 },
    /// `log μ_n ≈ intercept + slope · n log n`.
    SuperExp { slope: f64, intercept: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    Exp,
    SuperExp,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub r_squared: f64,
    /// Modes actually used (1-based, inclusive).
    pub n_range: (usize, usize),
    pub requested: (usize, usize),
}

pub const DEFAULT_WINDOW: (usize, usize) = (2, 25);
const MIN_FIT_MODES: usize = 8;

/// Least-squares decay law over the usable modes inside `window` (1-based, inclusive).
pub fn fit_decay(dec: &SpectralDecomposition, kind: DecayKind, window: (usize, usize)) -> Result<DecayFit> {
    if dec.order != SpectrumOrder::DescendingIntegral {
        return invalid("decay fits need an integral-operator spectrum");
    }
    let last = window.1.min(dec.usable());
    if last < window.0 || last + 1 - window.0 < MIN_FIT_MODES {
        return Err(Error::InsufficientData(format!(
            "{} usable modes in [{}, {}]; need {MIN_FIT_MODES}",
            (last + 1).saturating_sub(window.0),
            window.0,
            window.1
        )));
    }
    let ns: Vec<f64> = (window.0..=last).map(|n| n as f64).collect();
    let logs: Vec<f64> = (window.0..=last).map(|n| dec.eigenvalues[n - 1].ln()).collect();
    let (model, r_squared) = match kind {
        DecayKind::Exp => {
            let fit = fit_line(&ns, &logs)?;
            (DecayModel::ExpDecay { c1: fit.intercept.exp(), c2: -fit.slope }, fit.r_squared)
        }
        DecayKind::SuperExp => {
            let xs: Vec<f64> = ns.iter().map(|n| n * n.ln()).collect();
            let fit = fit_line(&xs, &logs)?;
            (DecayModel::SuperExp { slope: fit.slope, intercept: fit.intercept }, fit.r_squared)
        }
    };
    Ok(DecayFit { model, r_squared, n_range: (window.0, last), requested: window })
}

/// `min_n λ_n / n²` over the converged modes of an ascending spectrum.
pub fn growth_check(dec: &SpectralDecomposition) -> Result<f64> {
    if dec.order != SpectrumOrder::AscendingDiff {
        return invalid("growth check needs an ascending differential spectrum");
    }
    growth_ratio(&dec.eigenvalues[..dec.converged.min(dec.eigenvalues.len())])
}

pub fn growth_ratio(lambdas: &[f64]) -> Result<f64> {
    if lambdas.is_empty() {
        return Err(Error::InsufficientData("no converged modes".into()));
    }
    Ok(lambdas.iter().enumerate().map(|(i, l)| l / ((i + 1) * (i + 1)) as f64).fold(f64::INFINITY, f64::min))
}

/// Coefficients `⟨f, u_n⟩` of a trial-space function against a trial-space eigenbasis.
pub fn expansion(dec: &SpectralDecomposition, coefficients: &[f64]) -> Vec<f64> {
    let c = DVector::from_column_slice(coefficients);
    (dec.eigenvectors.transpose() * c).iter().copied().collect()
}

/// Convenience: the Legendre eigenfunction `u_n` (1-based) of a trial-space decomposition.
pub fn eigenfunction(dec: &SpectralDecomposition, domain: Interval, n: usize) -> FunctionRep {
    FunctionRep::legendre(domain, dec.eigenvectors.column(n - 1).iter().copied().collect())
}
