//! Galerkin discretizations of the differential operators that commute with the
//! truncated integral operators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::FunctionRep;
use crate::grid::{make_grid, GridDomain, HalfLineDomain, Interval, QuadGrid, MAX_GRID};
use crate::linalg::eig_sym_sorted;
use crate::special::{laguerre_function_table, legendre_table};

pub const MAX_TRIAL: usize = 512;
const PROJECTION_TOLERANCE: f64 = 1e-8;
const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourthOrderVariant {
    /// `−(t²f'')'' + (a²+b²)(t²f')' + (2a² − a²b²t²) f`, signs as printed with the operator.
    AsLemma,
    /// The positive form `∫t²f''² + (a²+b²)∫t²f'² + ∫(a²b²t² + 2a²)f²`.
    AsProofBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DiffOpSpec {
    /// `−((t²−a²)(b²−t²) f')' + 2(t²−a²) f` on `[a, b]`.
    BerteroGrunbaum { ab: Interval },
    FourthOrderHalfLine { ab: Interval, half: HalfLineDomain, variant: FourthOrderVariant },
    /// `−((1−x²) f')' + x² f` on `[-1, 1]`.
    Prolate,
}

impl DiffOpSpec {
    /// Parses the CLI names `bg`, `fourth:lemma`, `fourth:proof`, `prolate`.
    pub fn parse(name: &str, ab: Interval) -> Result<Self> {
        let fourth = |variant| -> Result<Self> {
            Ok(DiffOpSpec::FourthOrderHalfLine { ab, half: HalfLineDomain::for_laplace(&ab)?, variant })
        };
        match name.trim() {
            "bg" => Ok(DiffOpSpec::BerteroGrunbaum { ab }),
            "fourth:lemma" => fourth(FourthOrderVariant::AsLemma),
            "fourth:proof" => fourth(FourthOrderVariant::AsProofBound),
            "prolate" => Ok(DiffOpSpec::Prolate),
            other => invalid(format!("unknown differential operator `{other}` (bg, fourth:lemma, fourth:proof, prolate)")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DiffOpSpec::BerteroGrunbaum { .. } => "bg",
            DiffOpSpec::FourthOrderHalfLine { variant: FourthOrderVariant::AsLemma, .. } => "fourth:lemma",
            DiffOpSpec::FourthOrderHalfLine { variant: FourthOrderVariant::AsProofBound, .. } => "fourth:proof",
            DiffOpSpec::Prolate => "prolate",
        }
    }

    pub fn domain(&self) -> GridDomain {
        match self {
            DiffOpSpec::BerteroGrunbaum { ab } => (*ab).into(),
            DiffOpSpec::FourthOrderHalfLine { half, .. } => (*half).into(),
            DiffOpSpec::Prolate => Interval::symmetric().into(),
        }
    }

    /// `+1` when low modes have the smallest eigenvalues, `−1` when the printed signs
    /// make the spectrum negative.
    pub fn orientation(&self) -> f64 {
        match self {
            DiffOpSpec::FourthOrderHalfLine { variant: FourthOrderVariant::AsLemma, .. } => -1.0,
            _ => 1.0,
        }
    }
}

/// An orthonormal trial space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TrialBasis {
    /// Legendre polynomials orthonormal on `domain`.
    Legendre { domain: Interval, size: usize },
    /// Laguerre functions `√(2σ) L_k(2σt) e^{-σt}` on the truncated half line.
    Laguerre { half: HalfLineDomain, sigma: f64, size: usize },
}

impl TrialBasis {
    pub fn size(&self) -> usize {
        match self {
            TrialBasis::Legendre { size, .. } | TrialBasis::Laguerre { size, .. } => *size,
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            TrialBasis::Legendre { domain, .. } => *domain,
            TrialBasis::Laguerre { half, .. } => half.as_interval(),
        }
    }

    /// `[Φ, Φ', Φ'']` with `Φ[(q, k)] = φ_k(x_q)`.
    pub fn tables(&self, xs: &[f64]) -> [DMatrix<f64>; 3] {
        let n = self.size();
        let mut out = [DMatrix::zeros(xs.len(), n), DMatrix::zeros(xs.len(), n), DMatrix::zeros(xs.len(), n)];
        for (q, &x) in xs.iter().enumerate() {
            let rows = match self {
                TrialBasis::Legendre { domain, .. } => {
                    let len = domain.length();
                    let chain = 2.0 / len;
                    let [p, dp, ddp] = legendre_table(n, domain.to_reference(x));
                    let scale: Vec<f64> = (0..n).map(|k| ((2 * k + 1) as f64 / len).sqrt()).collect();
                    [
                        (0..n).map(|k| scale[k] * p[k]).collect::<Vec<_>>(),
                        (0..n).map(|k| scale[k] * chain * dp[k]).collect(),
                        (0..n).map(|k| scale[k] * chain * chain * ddp[k]).collect(),
                    ]
                }
                TrialBasis::Laguerre { sigma, .. } => laguerre_function_table(n, *sigma, x),
            };
            for (d, row) in rows.iter().enumerate() {
                for k in 0..n {
                    out[d][(q, k)] = row[k];
                }
            }
        }
        out
    }

    /// The trial function with the given coefficients.
    pub fn function(&self, coefficients: &[f64]) -> FunctionRep {
        match self {
            TrialBasis::Legendre { domain, .. } => FunctionRep::legendre(*domain, coefficients.to_vec()),
            TrialBasis::Laguerre { half, sigma, .. } => FunctionRep::LaguerreSeries {
                domain: half.as_interval(),
                coefficients: coefficients.to_vec(),
                sigma: *sigma,
            },
        }
    }

    /// A quadrature grid fine enough to integrate products of trial functions.
    pub fn quadrature(&self) -> Result<QuadGrid> {
        match self {
            TrialBasis::Legendre { domain, size } => make_grid(*domain, size + 32),
            TrialBasis::Laguerre { half, size, .. } => make_grid(*half, (8 * size + 128).min(MAX_GRID)),
        }
    }

    /// Coefficients of `f` in the trial space, rejecting functions that lie outside it.
    pub fn project(&self, f: &FunctionRep) -> Result<Vec<f64>> {
        let n = self.size();
        match (self, f) {
            (TrialBasis::Legendre { domain, .. }, FunctionRep::LegendreSeries { domain: d, coefficients })
                if d == domain =>
            {
                if coefficients[n.min(coefficients.len())..].iter().any(|c| *c != 0.0) {
                    return Err(Error::Representation(format!(
                        "Legendre series of length {} exceeds the trial size {n}",
                        coefficients.len()
                    )));
                }
                let mut c = coefficients.clone();
                c.resize(n, 0.0);
                return Ok(c);
            }
            (
                TrialBasis::Laguerre { sigma, .. },
                FunctionRep::LaguerreSeries { sigma: s, coefficients, .. },
            ) if s == sigma && coefficients.len() <= n => {
                let mut c = coefficients.clone();
                c.resize(n, 0.0);
                return Ok(c);
            }
            _ => {}
        }
        if f.domain() != self.domain() {
            return invalid("function and trial space live on different domains");
        }
        let grid = self.quadrature()?;
        let values = f.eval_many(&grid.nodes, 0)?;
        let [phi, _, _] = self.tables(&grid.nodes);
        let coefficients: Vec<f64> = (0..n)
            .map(|k| (0..grid.len()).map(|q| grid.weights[q] * phi[(q, k)] * values[q]).sum())
            .collect();
        let norm = grid.integrate(&values.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
        let residual: Vec<f64> = (0..grid.len())
            .map(|q| {
                let r = values[q] - (0..n).map(|k| phi[(q, k)] * coefficients[k]).sum::<f64>();
                r * r
            })
            .collect();
        let residual = grid.integrate(&residual).sqrt();
        if residual > PROJECTION_TOLERANCE * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::Representation(format!(
                "projection residual {:.2e} exceeds {PROJECTION_TOLERANCE:.0e} of the norm",
                residual / norm
            )));
        }
        Ok(coefficients)
    }
}

/// Stiffness matrix of a differential operator in an orthonormal trial space (mass = I).
#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    pub stiffness: DMatrix<f64>,
    pub basis: TrialBasis,
    pub spec: DiffOpSpec,
}

fn check_size(n: usize) -> Result<()> {
    if n < 4 {
        return invalid(format!("trial size {n} is below 4"));
    }
    if n > 2 * MAX_TRIAL {
        return invalid(format!("trial size {n} exceeds {}", 2 * MAX_TRIAL));
    }
    Ok(())
}

/// `Φ_aᵀ diag(w·c) Φ_b`.
fn weighted_product(a: &DMatrix<f64>, b: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut scaled = b.clone();
    for (q, mut row) in scaled.row_iter_mut().enumerate() {
        row *= w[q];
    }
    a.transpose() * scaled
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

pub fn assemble_bertero_grunbaum(ab: Interval, n: usize) -> Result<GalerkinOperator> {
    check_size(n)?;
    if ab.a <= 0.0 {
        return invalid(format!("the Bertero–Grünbaum operator needs a > 0, got {}", ab.a));
    }
    let basis = TrialBasis::Legendre { domain: ab, size: n };
    let grid = make_grid(ab, n + 8)?;
    let [phi, dphi, _] = basis.tables(&grid.nodes);
    let (a2, b2) = (ab.a * ab.a, ab.b * ab.b);
    let wq: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(t, w)| w * (t * t - a2) * (b2 - t * t)).collect();
    let wp: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(t, w)| w * 2.0 * (t * t - a2)).collect();
    let stiffness = symmetrize(weighted_product(&dphi, &dphi, &wq) + weighted_product(&phi, &phi, &wp));
    Ok(GalerkinOperator { stiffness, basis, spec: DiffOpSpec::BerteroGrunbaum { ab } })
}

/// Entries of the prolate operator with unit bandwidth in the orthonormal Legendre basis:
/// diagonal `k(k+1) + ⟨x² p̄_k, p̄_k⟩` and the `(k, k+2)` coupling `⟨x² p̄_k, p̄_{k+2}⟩`.
pub fn prolate_entries(k: usize) -> (f64, f64) {
    let kf = k as f64;
    let diag = kf * (kf + 1.0) + (2.0 * kf * kf + 2.0 * kf - 1.0) / ((2.0 * kf - 1.0) * (2.0 * kf + 3.0));
    let off = (kf + 1.0) * (kf + 2.0) / ((2.0 * kf + 3.0) * ((2.0 * kf + 1.0) * (2.0 * kf + 5.0)).sqrt());
    (diag, off)
}

pub fn assemble_prolate(n: usize) -> Result<GalerkinOperator> {
    check_size(n)?;
    let mut stiffness = DMatrix::zeros(n, n);
    for k in 0..n {
        let (d, e) = prolate_entries(k);
        stiffness[(k, k)] = d;
        if k + 2 < n {
            stiffness[(k, k + 2)] = e;
            stiffness[(k + 2, k)] = e;
        }
    }
    Ok(GalerkinOperator {
        stiffness,
        basis: TrialBasis::Legendre { domain: Interval::symmetric(), size: n },
        spec: DiffOpSpec::Prolate,
    })
}

pub fn assemble_fourth_order(
    ab: Interval,
    half: HalfLineDomain,
    n: usize,
    variant: FourthOrderVariant,
) -> Result<GalerkinOperator> {
    check_size(n)?;
    if ab.a <= 0.0 {
        return invalid(format!("the fourth-order operator needs a > 0, got {}", ab.a));
    }
    let basis = TrialBasis::Laguerre { half, sigma: 0.5 * (ab.a + ab.b), size: n };
    let grid = basis.quadrature()?;
    let [phi, dphi, ddphi] = basis.tables(&grid.nodes);
    let gram = weighted_product(&phi, &phi, &grid.weights);
    let defect = (&gram - DMatrix::<f64>::identity(n, n)).amax();
    if defect > ORTHONORMALITY_TOLERANCE {
        return Err(Error::Representation(format!(
            "Laguerre trial functions are not resolved on [0, {}] (orthonormality defect {defect:.1e}); lower N",
            half.s_max
        )));
    }
    let (a2, b2) = (ab.a * ab.a, ab.b * ab.b);
    let t2w: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(t, w)| w * t * t).collect();
    let second = weighted_product(&ddphi, &ddphi, &t2w);
    let first = weighted_product(&dphi, &dphi, &t2w);
    let (sign, potential): (f64, Box<dyn Fn(f64) -> f64>) = match variant {
        FourthOrderVariant::AsLemma => (-1.0, Box::new(move |t: f64| 2.0 * a2 - a2 * b2 * t * t)),
        FourthOrderVariant::AsProofBound => (1.0, Box::new(move |t: f64| a2 * b2 * t * t + 2.0 * a2)),
    };
    let wp: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(t, w)| w * potential(*t)).collect();
    let stiffness = symmetrize((second + first * (a2 + b2)) * sign + weighted_product(&phi, &phi, &wp));
    Ok(GalerkinOperator { stiffness, basis, spec: DiffOpSpec::FourthOrderHalfLine { ab, half, variant } })
}

pub fn assemble(spec: &DiffOpSpec, n: usize) -> Result<GalerkinOperator> {
    match spec {
        DiffOpSpec::BerteroGrunbaum { ab } => assemble_bertero_grunbaum(*ab, n),
        DiffOpSpec::FourthOrderHalfLine { ab, half, variant } => assemble_fourth_order(*ab, *half, n, *variant),
        DiffOpSpec::Prolate => assemble_prolate(n),
    }
}

impl GalerkinOperator {
    pub fn size(&self) -> usize {
        self.basis.size()
    }

    /// Eigenpairs ordered from the lowest mode up (by `orientation · λ`).
    pub fn spectrum(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        eig_sym_sorted(&self.stiffness, self.spec.orientation() > 0.0, 1e-12)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# diff={} N={}\n", self.spec.name(), self.size());
        for row in self.stiffness.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| crate::report::fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `cᵀ S c` for the trial-space coefficients `c` of `f`.
pub fn dirichlet_form(op: &GalerkinOperator, f: &FunctionRep) -> Result<f64> {
    let c = nalgebra::DVector::from_vec(op.basis.project(f)?);
    Ok((c.transpose() * &op.stiffness * &c)[(0, 0)])
}

/// Number of leading modes (at most `n/4`) whose eigenvalues at trial sizes `n` and `2n`
/// agree to `1e-8` relative.
///
/// Laguerre spaces stop resolving on the truncated half line beyond a few dozen
/// functions; there the refinement is the largest resolved size below `2n`.
pub fn converged_modes(spec: &DiffOpSpec, n: usize) -> Result<usize> {
    let (coarse, _) = assemble(spec, n)?.spectrum()?;
    let fine = match spec {
        DiffOpSpec::FourthOrderHalfLine { .. } => (n + 1..=2 * n)
            .rev()
            .find_map(|m| assemble(spec, m).ok())
            .ok_or_else(|| Error::Representation(format!("no resolved Laguerre space larger than N = {n} to refine against")))?,
        _ => assemble(spec, 2 * n)?,
    };
    let (fine, _) = fine.spectrum()?;
    Ok(count_agreeing(&coarse, &fine, n / 4))
}

pub(crate) fn count_agreeing(coarse: &[f64], fine: &[f64], cap: usize) -> usize {
    coarse
        .iter()
        .zip(fine)
        .take(cap)
        .take_while(|(c, f)| (*c - *f).abs() <= 1e-8 * f.abs())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetry_defect;
    use crate::norms::{h1_seminorm, l2_norm};

    fn ab() -> Interval {
        Interval::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn bertero_grunbaum_constant_and_definiteness() {
        let op = assemble_bertero_grunbaum(ab(), 24).unwrap();
        assert!(symmetry_defect(&op.stiffness) <= 1e-12);
        let one = FunctionRep::constant(ab(), 1.0);
        assert!((dirichlet_form(&op, &one).unwrap() - 8.0 / 3.0).abs() < 1e-12);
        let (vals, _) = op.spectrum().unwrap();
        assert!(vals[0] > 0.0);
        assert!(assemble_bertero_grunbaum(Interval::new(0.0, 2.0).unwrap(), 8).is_err());
        assert!(assemble_bertero_grunbaum(ab(), 3).is_err());
    }

    #[test]
    fn bertero_grunbaum_low_eigenvalues() {
        // Values from a 70-digit Legendre–Galerkin reference.
        let truth = [2.49509341, 19.4735049, 53.42920651, 104.36294572];
        let (vals, _) = assemble_bertero_grunbaum(ab(), 48).unwrap().spectrum().unwrap();
        for (v, t) in vals.iter().zip(truth) {
            assert!((v - t).abs() < 1e-7 * t, "{v} vs {t}");
        }
    }

    #[test]
    fn prolate_matches_quadrature_assembly() {
        let n = 12;
        let op = assemble_prolate(n).unwrap();
        let d = Interval::symmetric();
        let grid = make_grid(d, n + 8).unwrap();
        let [phi, dphi, _] = op.basis.tables(&grid.nodes);
        let wq: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(x, w)| w * (1.0 - x * x)).collect();
        let wp: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(x, w)| w * x * x).collect();
        let s = weighted_product(&dphi, &dphi, &wq) + weighted_product(&phi, &phi, &wp);
        assert!((&s - &op.stiffness).amax() < 1e-11);
        let c = FunctionRep::constant(d, 0.5f64.sqrt());
        assert!((dirichlet_form(&op, &c).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn prolate_spectrum_near_legendre_and_parity() {
        let truth = [0.319000055146893, 2.59308457997714, 6.53347180052380, 12.5144621450941, 20.5082743625709];
        let op = assemble_prolate(64).unwrap();
        let (vals, vecs) = op.spectrum().unwrap();
        for (v, t) in vals.iter().zip(truth) {
            assert!((v - t).abs() < 1e-12 * t.max(1.0));
        }
        for n in 6..30 {
            let legendre = ((n - 1) * n) as f64;
            assert!((vals[n - 1] - legendre).abs() <= 0.05 * legendre);
        }
        for m in 0..10 {
            let wrong_parity: f64 = (0..64).filter(|k| k % 2 != m % 2).map(|k| vecs[(k, m)].abs()).sum();
            assert!(wrong_parity < 1e-10, "mode {m}");
        }
    }

    #[test]
    fn fourth_order_proof_form_on_exponential() {
        let op = assemble_fourth_order(ab(), HalfLineDomain::for_laplace(&ab()).unwrap(), 16, FourthOrderVariant::AsProofBound)
            .unwrap();
        assert!(symmetry_defect(&op.stiffness) <= 1e-12);
        let (vals, _) = op.spectrum().unwrap();
        assert!(vals[0] > 0.0);
        // Γ integrals: ∫t²e^{-2t}(1 + 5) + ∫(4t² + 2)e^{-2t} = 7/2.
        let f = FunctionRep::PolyExp { domain: Interval::new(0.0, 40.0).unwrap(), coefficients: vec![1.0], rate: 1.0 };
        assert!((dirichlet_form(&op, &f).unwrap() - 3.5).abs() < 1e-4);
        let wide = FunctionRep::PolyExp { domain: Interval::new(0.0, 40.0).unwrap(), coefficients: vec![1.0], rate: 0.05 };
        assert!(matches!(dirichlet_form(&op, &wide), Err(Error::Representation(_))));
    }

    #[test]
    fn fourth_order_lemma_form_is_negative() {
        let op = assemble_fourth_order(ab(), HalfLineDomain::for_laplace(&ab()).unwrap(), 16, FourthOrderVariant::AsLemma)
            .unwrap();
        let (vals, _) = op.spectrum().unwrap();
        // Ordered from the lowest mode: the largest (least negative) eigenvalue comes first.
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn under_resolved_laguerre_space_rejected() {
        let half = HalfLineDomain::new(5.0, 8).unwrap();
        assert!(assemble_fourth_order(ab(), half, 64, FourthOrderVariant::AsProofBound).is_err());
    }

    #[test]
    fn dirichlet_upper_bound_from_integration_by_parts() {
        let op = assemble_bertero_grunbaum(ab(), 16).unwrap();
        let grid = make_grid(ab(), 64).unwrap();
        for seed in 0..20u64 {
            let c: Vec<f64> = (0..10).map(|k| (((seed * 31 + k * 17) % 23) as f64 - 11.0) / 7.0).collect();
            let f = FunctionRep::legendre(ab(), c);
            let lhs = dirichlet_form(&op, &f).unwrap();
            let (nf, nd) = (l2_norm(&f, &grid).unwrap(), h1_seminorm(&f, &grid).unwrap());
            assert!(lhs <= 9.0 * nd * nd + 6.0 * nf * nf + 1e-9);
        }
    }

    #[test]
    fn bertero_grunbaum_converged_modes() {
        let k = converged_modes(&DiffOpSpec::BerteroGrunbaum { ab: ab() }, 64).unwrap();
        assert_eq!(k, 16);
    }

    #[test]
    fn cli_names_round_trip() {
        for name in ["bg", "fourth:lemma", "fourth:proof", "prolate"] {
            assert_eq!(DiffOpSpec::parse(name, ab()).unwrap().name(), name);
        }
        assert!(DiffOpSpec::parse("heat", ab()).is_err());
    }
}
