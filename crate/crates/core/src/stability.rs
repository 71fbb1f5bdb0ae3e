//! Executable checks of the stability inequalities and the lemmas behind them.
//!
//! Each verifier evaluates both sides of an inequality for a concrete function and
//! reports whether it holds. The existential constants of the theorems are fitted on
//! eigenfunction sweeps and then relaxed before ensembles are tested against them.

use rayon::prelude::*;
use serde::Serialize;

use crate::diffop::GalerkinOperator;
use crate::error::{invalid, Error, Result};
use crate::function::FunctionRep;
use crate::grid::{make_grid, GridDomain, HalfLineDomain, Interval, QuadGrid};
use crate::integral::{transform_norm_sq, OperatorKind};
use crate::linalg::fit_line;
use crate::norms::{h1_seminorm, l2_norm, weighted_norm};
use crate::spectral::{expansion, growth_check, integral_spectrum, SpectralDecomposition};

/// Relative tolerance deciding sign changes and nonnegativity.
pub const SIGN_TOLERANCE: f64 = 1e-12;
/// Prefactor and rate relaxation applied to fitted constants before ensemble checks.
pub const PREFACTOR_RELAXATION: f64 = 0.5;
pub const RATE_RELAXATION: f64 = 2.0;

fn refined_sample(f: &FunctionRep, grid: &QuadGrid) -> Result<Vec<f64>> {
    let span = grid.span();
    let m = 4 * grid.len().max(1);
    let xs: Vec<f64> = (0..=m).map(|i| span.a + span.length() * i as f64 / m as f64).collect();
    f.eval_many(&xs, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Record {
    pub sup_norm: f64,
    pub bound: f64,
    pub applicable: bool,
    pub pass: bool,
}

/// `sup|f| ≤ √(b−a) ‖f_x‖` for functions that change sign.
pub fn verify_lemma2(f: &FunctionRep, grid: &QuadGrid) -> Result<Lemma2Record> {
    let values = refined_sample(f, grid)?;
    let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = SIGN_TOLERANCE * sup_norm;
    let applicable = values.iter().any(|&v| v > tol) && values.iter().any(|&v| v < -tol);
    let bound = grid.span().length().sqrt() * h1_seminorm(f, grid)?;
    Ok(Lemma2Record { sup_norm, bound, applicable, pass: !applicable || sup_norm <= bound })
}

/// The constructive prefactor for nonnegative functions on an interval of length `b − a`.
///
/// `c1² = min(min_x h(x), (b−a)/4)` with `h(x) = exp(c2 / (2√x √(b−a))) x / 2`, the
/// minimum taken numerically on a log grid over `x ∈ [1e-8, b−a]`.
pub fn lemma3_c1(c2: f64, a: f64, b: f64) -> Result<f64> {
    if !(c2 > 0.0) || !(b > a) {
        return invalid(format!("lemma constant needs c2 > 0 and a < b, got c2 = {c2}, [{a}, {b}]"));
    }
    let len = b - a;
    let h = |x: f64| (c2 / (2.0 * x.sqrt() * len.sqrt())).exp() * x / 2.0;
    let (lo, hi) = (1e-8f64.min(len).ln(), len.ln());
    let steps = 4000;
    let mut best = f64::INFINITY;
    let mut best_i: usize = 0;
    for i in 0..=steps {
        let v = h((lo + (hi - lo) * i as f64 / steps as f64).exp());
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section polish inside the bracketing log cells.
    let at = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;
    let (mut l, mut r) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(steps)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = r - g * (r - l);
        let m2 = l + g * (r - l);
        if h(m1.exp()) < h(m2.exp()) {
            r = m2;
        } else {
            l = m1;
        }
    }
    best = best.min(h((0.5 * (l + r)).exp()));
    Ok(best.min(len / 4.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma3Record {
    pub lhs: f64,
    pub rhs: f64,
    pub c1: f64,
    pub pass: bool,
}

/// `∫f ≥ c1 exp(−c2 ‖f_x‖/‖f‖) ‖f‖` for nonnegative `f`.
pub fn verify_lemma3(f: &FunctionRep, grid: &QuadGrid, c2: f64) -> Result<Lemma3Record> {
    let values = refined_sample(f, grid)?;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(v) = values.iter().find(|&&v| v < -SIGN_TOLERANCE * peak) {
        return invalid(format!("function takes the negative value {v:.3e}"));
    }
    let span = grid.span();
    let c1 = lemma3_c1(c2, span.a, span.b)?;
    let lhs = grid.integrate(&f.eval_many(&grid.nodes, 0)?);
    let norm = l2_norm(f, grid)?;
    if norm == 0.0 {
        return Ok(Lemma3Record { lhs, rhs: 0.0, c1, pass: true });
    }
    let rhs = c1 * (-c2 * h1_seminorm(f, grid)? / norm).exp() * norm;
    Ok(Lemma3Record { lhs, rhs, c1, pass: lhs >= rhs })
}

/// Constants measured for the low-frequency lemma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Constants {
    /// `min λ_n / n²` over converged modes.
    pub growth: f64,
    /// `max ⟨Df, f⟩ / ‖f_x‖²` over the measured sample.
    pub dirichlet: f64,
    /// `√(2 dirichlet / growth)`.
    pub c: f64,
}

pub fn lemma1_constants(op: &GalerkinOperator, dec: &SpectralDecomposition, sample: &[FunctionRep]) -> Result<Lemma1Constants> {
    let growth = growth_check(dec)?;
    let grid = op.basis.quadrature()?;
    let ratios = sample
        .par_iter()
        .map(|f| {
            let d = crate::diffop::dirichlet_form(op, f)?;
            let fx = h1_seminorm(f, &grid)?;
            if fx == 0.0 {
                return Err(Error::InvalidArgument("sample function with vanishing derivative".into()));
            }
            Ok(d.abs() / (fx * fx))
        })
        .collect::<Result<Vec<_>>>()?;
    let dirichlet = ratios.into_iter().fold(0.0f64, f64::max);
    if !(growth > 0.0) || !(dirichlet > 0.0) {
        return Err(Error::InsufficientData("lemma constants are not positive".into()));
    }
    Ok(Lemma1Constants { growth, dirichlet, c: (2.0 * dirichlet / growth).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Record {
    pub low_freq_mass: f64,
    pub threshold_index: usize,
    /// Index actually summed to: the threshold capped at the converged count.
    pub summed_to: usize,
    pub h1_ratio: f64,
    pub pass: bool,
}

/// Partial Parseval mass `Σ_{n ≤ ⌊c ‖f_x‖/‖f‖⌋} ⟨f, u_n⟩²` of the normalized `f`.
///
/// A threshold past the converged modes is capped; the mass over the capped range is a
/// lower bound, so a capped sum of at least one half still decides the check.
pub fn verify_lemma1(f: &FunctionRep, op: &GalerkinOperator, dec: &SpectralDecomposition, c: f64) -> Result<Lemma1Record> {
    let coeffs = op.basis.project(f)?;
    let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return invalid("the low-frequency check needs a nonzero function");
    }
    let unit: Vec<f64> = coeffs.iter().map(|v| v / norm).collect();
    let h1_ratio = h1_seminorm(&op.basis.function(&unit), &op.basis.quadrature()?)?;
    let threshold_index = (c * h1_ratio).floor() as usize;
    let summed_to = threshold_index.min(dec.converged);
    let a = expansion(dec, &unit);
    let low_freq_mass: f64 = a.iter().take(summed_to).map(|v| v * v).sum();
    let pass = low_freq_mass >= 0.5;
    if !pass && summed_to < threshold_index {
        return Err(Error::InsufficientData(format!(
            "threshold {threshold_index} exceeds the {} converged modes and the capped mass {low_freq_mass:.3} is below 1/2",
            dec.converged
        )));
    }
    Ok(Lemma1Record { low_freq_mass, threshold_index, summed_to, h1_ratio, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// `c1 exp(−c2 r)`.
    Exponential,
    /// `c1 (c2 r)^{−c2 r}`.
    PowerOfRatio,
}

impl FitForm {
    pub fn rhs(self, c1: f64, c2: f64, r: f64) -> f64 {
        match self {
            FitForm::Exponential => c1 * (-c2 * r).exp(),
            FitForm::PowerOfRatio => {
                let z = c2 * r;
                if z <= 0.0 {
                    c1
                } else {
                    c1 * (-z * z.ln()).exp()
                }
            }
        }
    }
}

/// One eigenfunction of a sweep: its oscillation measure and the normalized left side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub h1_ratio: f64,
    pub lhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityFit {
    pub c1: f64,
    pub c2: f64,
    pub form: FitForm,
    pub r_squared: f64,
    /// `log lhs_n − log model_n` per sweep point.
    pub residuals: Vec<f64>,
    pub ensemble_descriptor: String,
}

impl StabilityFit {
    pub fn relaxed(&self) -> (f64, f64) {
        (self.c1 * PREFACTOR_RELAXATION, self.c2 * RATE_RELAXATION)
    }

    pub fn residual_sign_changes(&self, from: usize, to: usize) -> usize {
        let r = &self.residuals[(from - 1).min(self.residuals.len())..to.min(self.residuals.len())];
        r.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }
}

/// Resolution of the quadratures used by sweeps and ensemble checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub grid: usize,
    pub trial: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes { grid: 256, trial: 128 }
    }
}

/// The quantity each theorem bounds, per unit `‖f‖`: `‖Tf‖/‖f‖` for the Laplace pair and
/// `∫|f̂|²/‖f‖²` for the Fourier composition.
pub fn normalized_lhs(kind: &OperatorKind, f: &FunctionRep, n: usize) -> Result<f64> {
    let grid = input_grid(kind, n)?;
    let norm = l2_norm(f, &grid)?;
    if norm == 0.0 {
        return invalid("stability ratios need a nonzero function");
    }
    let t = transform_norm_sq(kind, f, n)?.max(0.0);
    Ok(match kind {
        OperatorKind::FourierTt { .. } => t / (norm * norm),
        _ => t.sqrt() / norm,
    })
}

/// `‖f_x‖/‖f‖`, or for the adjoint `(‖x f''‖ + ‖x f'‖ + ‖x f‖ + ‖f‖)/‖f‖`.
pub fn oscillation_measure(kind: &OperatorKind, f: &FunctionRep, n: usize) -> Result<f64> {
    let grid = input_grid(kind, n)?;
    let norm = l2_norm(f, &grid)?;
    if norm == 0.0 {
        return invalid("stability ratios need a nonzero function");
    }
    match kind {
        OperatorKind::LaplaceAdjointTt { .. } => {
            let sum = weighted_norm(f, &grid, 1, 2)? + weighted_norm(f, &grid, 1, 1)? + weighted_norm(f, &grid, 1, 0)? + norm;
            Ok(sum / norm)
        }
        _ => Ok(h1_seminorm(f, &grid)? / norm),
    }
}

fn input_grid(kind: &OperatorKind, n: usize) -> Result<QuadGrid> {
    match kind.input_domain() {
        GridDomain::Interval(i) => make_grid(i, n),
        GridDomain::HalfLine(h) => make_grid(h, n),
    }
}

/// Eigenfunction sweep for the first `m` usable modes.
///
/// Laplace and Fourier use the commuting eigenvectors `u_n` with `μ_n` from the spectral
/// routes. The adjoint uses `v_n = L u_n / √μ_n`, which satisfies `‖L* v_n‖ = √μ_n`.
pub fn eigenfunction_sweep(kind: &OperatorKind, sizes: Sizes, m: usize) -> Result<Vec<SweepPoint>> {
    let (spectral_kind, input) = match kind {
        OperatorKind::LaplaceTt { ab } => (*kind, *ab),
        OperatorKind::LaplaceAdjointTt { ab, .. } => (OperatorKind::laplace(*ab)?, *ab),
        OperatorKind::FourierTt { sym } => (*kind, *sym),
        OperatorKind::HilbertTruncated { .. } => {
            return Err(Error::UnsupportedKind("no commuting operator is available for the truncated Hilbert transform".into()))
        }
    };
    let dec = integral_spectrum(&spectral_kind, sizes.grid, sizes.trial)?;
    if dec.usable() < m {
        return Err(Error::InsufficientData(format!("{m} modes requested, {} usable", dec.usable())));
    }
    (1..=m)
        .into_par_iter()
        .map(|n| {
            let coeffs: Vec<f64> = dec.eigenvectors.column(n - 1).iter().copied().collect();
            let mu = dec.eigenvalues[n - 1];
            let (f, lhs) = match kind {
                OperatorKind::LaplaceAdjointTt { half, .. } => (
                    FunctionRep::LaplaceImage { domain: half.as_interval(), source: input, coefficients: coeffs, scale: 1.0 / mu.sqrt() },
                    mu.sqrt(),
                ),
                OperatorKind::FourierTt { .. } => (FunctionRep::legendre(input, coeffs), mu),
                _ => (FunctionRep::legendre(input, coeffs), mu.sqrt()),
            };
            Ok(SweepPoint { n, h1_ratio: oscillation_measure(kind, &f, sizes.grid)?, lhs })
        })
        .collect()
}

/// Fit `log lhs` against the oscillation measure in the requested form.
pub fn fit_constants(points: &[SweepPoint], form: FitForm, descriptor: impl Into<String>) -> Result<StabilityFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("{} sweep points, need at least 3", points.len())));
    }
    if points.iter().any(|p| !(p.lhs > 0.0) || !(p.h1_ratio >= 0.0)) {
        return invalid("sweep points need positive left sides and nonnegative ratios");
    }
    let x: Vec<f64> = points.iter().map(|p| p.h1_ratio).collect();
    let y: Vec<f64> = points.iter().map(|p| p.lhs.ln()).collect();
    let (log_c1, c2) = match form {
        FitForm::Exponential => {
            let line = fit_line(&x, &y)?;
            (line.intercept, -line.slope)
        }
        FitForm::PowerOfRatio => power_fit(&x, &y),
    };
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(&xi, &yi)| yi - form.rhs(log_c1.exp(), c2, xi).ln()).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    if !(c2 > 0.0) {
        return Err(Error::InsufficientData(format!("fitted decay rate {c2:.3e} is not positive")));
    }
    Ok(StabilityFit { c1: log_c1.exp(), c2, form, r_squared, residuals, ensemble_descriptor: descriptor.into() })
}

/// Least squares for `y = log c1 − z ln z`, `z = c2 x`: the intercept is explicit for
/// fixed `c2`, which is found by a log-grid scan and golden-section polish.
fn power_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sse_at = |c2: f64| {
        let t: Vec<f64> = x.iter().zip(y).map(|(&xi, &yi)| yi + zlnz(c2 * xi)).collect();
        let m = t.iter().sum::<f64>() / t.len() as f64;
        (t.iter().map(|v| (v - m).powi(2)).sum::<f64>(), m)
    };
    let (lo, hi, steps) = (1e-4f64.ln(), 1e3f64.ln(), 2000);
    let at = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;
    let best_i = (0..=steps)
        .min_by(|&i, &j| sse_at(at(i).exp()).0.total_cmp(&sse_at(at(j).exp()).0))
        .unwrap_or(0);
    let (mut l, mut r) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(steps)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let m1 = r - g * (r - l);
        let m2 = l + g * (r - l);
        if sse_at(m1.exp()).0 < sse_at(m2.exp()).0 {
            r = m2;
        } else {
            l = m1;
        }
    }
    let c2 = (0.5 * (l + r)).exp();
    (sse_at(c2).1, c2)
}

fn zlnz(z: f64) -> f64 {
    if z > 0.0 {
        z * z.ln()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRecord {
    pub id: usize,
    pub operator: OperatorKind,
    pub lhs: f64,
    pub h1_ratio: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordError {
    pub id: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub operator: OperatorKind,
    pub fit: StabilityFit,
    pub relaxed_c1: f64,
    pub relaxed_c2: f64,
    pub records: Vec<StabilityRecord>,
    pub errors: Vec<RecordError>,
    pub violations: usize,
}

impl TheoremReport {
    pub fn clean(&self) -> bool {
        self.violations == 0 && self.errors.is_empty()
    }
}

/// Both sides of the stability inequality for every ensemble member, with relaxed constants.
///
/// A member that cannot be evaluated becomes an error entry; the rest still run.
pub fn verify_theorem(kind: &OperatorKind, fit: &StabilityFit, ensemble: &[FunctionRep], n: usize) -> TheoremReport {
    let (c1, c2) = fit.relaxed();
    let outcomes: Vec<std::result::Result<StabilityRecord, RecordError>> = ensemble
        .par_iter()
        .enumerate()
        .map(|(id, f)| {
            let eval = || -> Result<StabilityRecord> {
                let lhs = normalized_lhs(kind, f, n)?;
                let h1_ratio = oscillation_measure(kind, f, n)?;
                let rhs = fit.form.rhs(c1, c2, h1_ratio);
                Ok(StabilityRecord { id, operator: *kind, lhs, h1_ratio, rhs, satisfied: lhs >= rhs })
            };
            eval().map_err(|e| RecordError { id, message: e.to_string() })
        })
        .collect();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(e) => errors.push(e),
        }
    }
    let violations = records.iter().filter(|r| !r.satisfied).count();
    TheoremReport { operator: *kind, fit: fit.clone(), relaxed_c1: c1, relaxed_c2: c2, records, errors, violations }
}

/// Truncated half line used for adjoint ensembles on `[a, b]`.
pub fn adjoint_domain(ab: &Interval) -> Result<Interval> {
    Ok(HalfLineDomain::for_laplace(ab)?.as_interval())
}
