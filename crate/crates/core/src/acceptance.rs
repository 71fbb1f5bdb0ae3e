//! The acceptance suite: every criterion evaluated at default sizes with its runtime.
//!
//! Shared by the `report-all` subcommand and the `acceptance` test target, so both print
//! the same verdicts.

use std::time::Instant;

use serde::Serialize;

use crate::adversarial::{reproduce_figure, subspace_decay, BasisFamily, FigureId, FigureSpec};
use crate::diffop::{assemble, assemble_bertero_grunbaum, assemble_prolate, DiffOpSpec};
use crate::ensemble::{self, EnsembleRng};
use crate::error::Result;
use crate::function::{chebyshev_points, FunctionRep};
use crate::grid::{make_grid, Interval};
use crate::integral::{gram_matrix, OperatorKind};
use crate::report::LinePlot;
use crate::spectral::{diff_spectrum, fit_decay, growth_check, integral_spectrum, match_eigenfunctions, DecayKind, DecayModel, DEFAULT_WINDOW};
use crate::stability::{
    adjoint_domain, eigenfunction_sweep, fit_constants, lemma1_constants, verify_lemma1, verify_lemma2, verify_lemma3,
    verify_theorem, FitForm, Sizes, SweepPoint,
};

pub const TOTAL_BUDGET_SECONDS: f64 = 60.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub sizes: Sizes,
    pub m: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig { seed: ensemble::DEFAULT_SEED, sizes: Sizes::default(), m: 12 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub pass: bool,
    /// Wall-clock time; left out of JSON so reports stay byte-identical across runs.
    #[serde(skip)]
    pub seconds: f64,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>3}] {} ({:.2} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub config: AcceptanceConfig,
    pub criteria: Vec<CriterionResult>,
    #[serde(skip)]
    pub total_seconds: f64,
    #[serde(skip)]
    pub plots: Vec<(String, LinePlot)>,
}

impl AcceptanceReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.criteria.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

struct Runner {
    config: AcceptanceConfig,
    criteria: Vec<CriterionResult>,
    plots: Vec<(String, LinePlot)>,
    laplace_sweep: Option<Vec<SweepPoint>>,
}

impl Runner {
    /// Run one criterion; `budget` adds a wall-clock limit to its verdict.
    fn run(&mut self, id: &str, title: &str, budget: Option<f64>, f: impl FnOnce(&mut Runner) -> Result<Outcome>) {
        let start = Instant::now();
        let result = f(self);
        let seconds = start.elapsed().as_secs_f64();
        let (mut pass, mut detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = budget {
            if seconds >= limit {
                pass = false;
                detail.push_str(&format!("; runtime {seconds:.2} s exceeds {limit} s"));
            }
        }
        self.criteria.push(CriterionResult { id: id.into(), title: title.into(), pass, seconds, detail });
    }

    fn rng(&self, suite: u64) -> EnsembleRng {
        ensemble::stream(self.config.seed, suite)
    }
}

fn ab() -> Interval {
    Interval::new(1.0, 2.0).expect("valid interval")
}

fn figure(id: FigureId) -> Result<Outcome> {
    let r = reproduce_figure(&FigureSpec::builtin(id)?)?;
    outcome(
        r.pass,
        format!(
            "ratio {:.3e} vs band [{:.2e}, {:.2e}]; best ratio in the printed basis {:.3e}",
            r.computed_ratio, r.band.0, r.band.1, r.diagnostics.basis_min_ratio
        ),
    )
}

pub fn run_all(config: AcceptanceConfig) -> AcceptanceReport {
    let start = Instant::now();
    let mut r = Runner { config, criteria: Vec::new(), plots: Vec::new(), laplace_sweep: None };
    let Sizes { grid: n, trial: big_n } = config.sizes;

    r.run("1", "Figure 2 ratio under the truncated Laplace transform", Some(1.0), |_| figure(FigureId::Fig2));
    r.run("2", "Figure 1 ratio under the truncated Hilbert transform", Some(1.0), |_| figure(FigureId::Fig1));
    r.run("3", "Figure 3 ratio under the truncated Fourier transform", Some(2.0), |_| figure(FigureId::Fig3));

    r.run("4", "eigenfunction coincidence for both commuting pairs", None, |_| {
        let mut pass = true;
        let mut parts = Vec::new();
        for (kind, diff) in [
            (OperatorKind::laplace(ab())?, assemble_bertero_grunbaum(ab(), big_n)?),
            (OperatorKind::fourier(), assemble_prolate(big_n)?),
        ] {
            let m = gram_matrix(&kind, &make_grid(kind.input_domain(), n)?)?;
            let rep = match_eigenfunctions(&m, &diff, 10)?;
            let ok = rep.max_relative_residual() <= 1e-6 && rep.commutation_residual <= 1e-8;
            pass &= ok;
            parts.push(format!(
                "{kind}: max residual {:.2e}, commutation {:.2e}",
                rep.max_relative_residual(),
                rep.commutation_residual
            ));
        }
        outcome(pass, parts.join("; "))
    });

    r.run("5", "exponential decay of the Laplace singular values", Some(5.0), |r| {
        let dec = integral_spectrum(&OperatorKind::laplace(ab())?, n, big_n)?;
        let fit = fit_decay(&dec, DecayKind::Exp, DEFAULT_WINDOW)?;
        r.plots.push(("laplace_spectrum.svg".into(), spectrum_plot("LaplaceTT a=1, b=2", &dec.eigenvalues[..dec.usable()])));
        let c2 = match fit.model {
            DecayModel::ExpDecay { c2, .. } => c2,
            _ => f64::NAN,
        };
        outcome(
            fit.r_squared >= 0.99 && c2 > 0.0,
            format!("r2 {:.7} over n in [{}, {}] (requested [{}, {}]), c2 {c2:.4}", fit.r_squared, fit.n_range.0, fit.n_range.1, fit.requested.0, fit.requested.1),
        )
    });

    r.run("6", "superexponential decay of the Fourier spectrum", None, |r| {
        let dec = integral_spectrum(&OperatorKind::fourier(), n, big_n)?;
        let slope = |w| -> Result<f64> {
            match fit_decay(&dec, DecayKind::SuperExp, w)?.model {
                DecayModel::SuperExp { slope, .. } => Ok(slope),
                _ => Ok(f64::NAN),
            }
        };
        let (s1, s2) = (slope((4, 12))?, slope((8, 16))?);
        let mu = &dec.eigenvalues[..dec.usable()];
        let increasing = mu.windows(3).all(|w| w[1] / w[2] > w[0] / w[1]);
        r.plots.push(("fourier_spectrum.svg".into(), spectrum_plot("FourierTT", mu)));
        let stable = (s1 - s2).abs() <= 0.15 * s1.abs().max(s2.abs());
        outcome(
            s1 < 0.0 && s2 < 0.0 && stable && increasing,
            format!("slopes {s1:.4} on [4,12] and {s2:.4} on [8,16]; mu_n/mu_(n+1) increasing over {} modes: {increasing}", mu.len()),
        )
    });

    r.run("7", "quadratic eigenvalue growth of the differential operators", None, |_| {
        let mut pass = true;
        let mut parts = Vec::new();
        for spec in [DiffOpSpec::BerteroGrunbaum { ab: ab() }, DiffOpSpec::Prolate] {
            let g1 = growth_check(&diff_spectrum(&spec, big_n)?)?;
            let g2 = growth_check(&diff_spectrum(&spec, 2 * big_n)?)?;
            pass &= g1 > 0.0 && (g1 - g2).abs() <= 0.02 * g1;
            parts.push(format!("{}: {g1:.7} -> {g2:.7}", spec.name()));
        }
        outcome(pass, parts.join("; "))
    });

    r.run("8", "Gramian subspace decay for the Hilbert configuration", None, |_| {
        let kind = OperatorKind::hilbert(Interval::unit(), Interval::new(2.0, 3.0)?)?;
        let d = subspace_decay(&kind, BasisFamily::Sine, 3..=12, n)?;
        outcome(
            d.fit.slope < 0.0 && d.fit.r_squared >= 0.97,
            format!("slope {:.4}, r2 {:.5} over resolved sizes {:?}", d.fit.slope, d.fit.r_squared, d.fitted_sizes),
        )
    });

    r.run("9", "low oscillation implies low frequency (200 functions)", None, |r| {
        let spec = DiffOpSpec::BerteroGrunbaum { ab: ab() };
        let op = assemble(&spec, big_n)?;
        let dec = diff_spectrum(&spec, big_n)?;
        let mut rng = r.rng(9);
        let sample: Vec<FunctionRep> = (0..200)
            .map(|_| {
                let len = ensemble::count(&mut rng, 2, 16);
                FunctionRep::legendre(ab(), ensemble::coefficients(&mut rng, len, 1.0))
            })
            .collect();
        let k = lemma1_constants(&op, &dec, &sample)?;
        let records = sample.iter().map(|f| verify_lemma1(f, &op, &dec, k.c)).collect::<Result<Vec<_>>>()?;
        let failures = records.iter().filter(|x| !x.pass).count();
        let min_mass = records.iter().map(|x| x.low_freq_mass).fold(f64::INFINITY, f64::min);
        let capped = records.iter().filter(|x| x.summed_to < x.threshold_index).count();
        outcome(
            failures == 0,
            format!(
                "{failures} violations; c = {:.3} from growth {:.4} and Dirichlet constant {:.4}; smallest mass {min_mass:.4}; {capped} thresholds capped at {} converged modes",
                k.c, k.growth, k.dirichlet, dec.converged
            ),
        )
    });

    r.run("10", "sup-norm and integral lemmas (1000 functions each)", None, |r| {
        let mut rng = r.rng(10);
        let mut sign_failures = 0;
        let mut applicable = 0;
        for _ in 0..1000 {
            let d = ensemble::interval(&mut rng);
            let len = ensemble::count(&mut rng, 2, 10);
            let mut c = ensemble::coefficients(&mut rng, len, 0.5);
            let g = FunctionRep::legendre(d, c.clone());
            let x0 = ensemble::uniform(&mut rng, d.a, d.b);
            c[0] -= g.eval(x0)? * d.length().sqrt();
            let rec = verify_lemma2(&FunctionRep::legendre(d, c), &make_grid(d, 64)?)?;
            applicable += rec.applicable as usize;
            sign_failures += !rec.pass as usize;
        }
        let mut rng = r.rng(11);
        let mut int_failures = 0;
        let mut tightest = f64::INFINITY;
        for _ in 0..1000 {
            let d = ensemble::interval(&mut rng);
            let g = ensemble::legendre_series(&mut rng, d, 10, 0.5);
            let delta = ensemble::uniform(&mut rng, 0.0, 0.5);
            let c2 = ensemble::uniform(&mut rng, 0.1, 5.0);
            let samples = chebyshev_points(d, 48).iter().map(|&x| Ok(g.eval(x)?.powi(2) + delta)).collect::<Result<Vec<_>>>()?;
            let rec = verify_lemma3(&FunctionRep::GridSamples { domain: d, samples }, &make_grid(d, 64)?, c2)?;
            int_failures += !rec.pass as usize;
            tightest = tightest.min(rec.lhs / rec.rhs);
        }
        outcome(
            sign_failures == 0 && int_failures == 0,
            format!(
                "sup-norm lemma: {sign_failures} violations ({applicable} sign-changing); integral lemma: {int_failures} violations, smallest lhs/rhs {tightest:.3}"
            ),
        )
    });

    r.run("11", "stability theorems on random ensembles (500 each) and the Fourier fit form", None, |r| {
        let laplace = OperatorKind::laplace(ab())?;
        let adjoint = OperatorKind::laplace_adjoint(ab())?;
        let fourier = OperatorKind::fourier();
        let half = adjoint_domain(&ab())?;
        let mut parts = Vec::new();
        let mut clean = true;
        let mut fourier_r2 = (f64::NAN, f64::NAN);
        for (suite, kind, form) in
            [(111, laplace, FitForm::Exponential), (112, adjoint, FitForm::Exponential), (113, fourier, FitForm::PowerOfRatio)]
        {
            let sweep = eigenfunction_sweep(&kind, config.sizes, config.m)?;
            let fit = fit_constants(&sweep, form, format!("{kind} eigenfunctions 1..{}", config.m))?;
            if kind == fourier {
                fourier_r2 = (fit.r_squared, fit_constants(&sweep, FitForm::Exponential, "")?.r_squared);
            }
            if kind == laplace {
                r.laplace_sweep = Some(sweep.clone());
            }
            let mut rng = r.rng(suite);
            let members: Vec<FunctionRep> = (0..500)
                .map(|_| match kind {
                    OperatorKind::LaplaceTt { .. } => ensemble::sine_series(&mut rng, ab(), 8),
                    OperatorKind::LaplaceAdjointTt { .. } => ensemble::poly_exp(&mut rng, half),
                    _ => ensemble::legendre_series(&mut rng, Interval::symmetric(), 12, 0.0),
                })
                .collect();
            let rep = verify_theorem(&kind, &fit, &members, n);
            let own = verify_theorem(&kind, &fit, &sweep_functions(&kind, config)?, n);
            clean &= rep.clean() && own.clean();
            parts.push(format!(
                "{kind}: c1 {:.3e}, c2 {:.4}, r2 {:.4}, {} violations, {} errors, {} on its own eigenfunctions",
                fit.c1,
                fit.c2,
                fit.r_squared,
                rep.violations,
                rep.errors.len(),
                own.violations
            ));
        }
        let form_ok = fourier_r2.0 > fourier_r2.1;
        parts.push(format!("Fourier r2: power-of-ratio {:.5} vs exponential {:.5}", fourier_r2.0, fourier_r2.1));
        outcome(clean && form_ok, parts.join("; "))
    });

    r.run("12", "sharpness: residual sign changes of the Laplace fit", None, |r| {
        let sweep = match r.laplace_sweep.take() {
            Some(s) => s,
            None => eigenfunction_sweep(&OperatorKind::laplace(ab())?, config.sizes, config.m)?,
        };
        let fit = fit_constants(&sweep, FitForm::Exponential, "laplace eigenfunctions")?;
        let changes = fit.residual_sign_changes(2, 12);
        let signs: String = fit.residuals[1..12.min(fit.residuals.len())].iter().map(|v| if *v >= 0.0 { '+' } else { '-' }).collect();
        outcome(changes >= 3, format!("{changes} sign changes over n in [2, 12] (pattern {signs})"))
    });

    let total = start.elapsed().as_secs_f64();
    r.criteria.push(CriterionResult {
        id: "T".into(),
        title: "total runtime".into(),
        pass: total <= TOTAL_BUDGET_SECONDS,
        seconds: total,
        detail: format!("budget {TOTAL_BUDGET_SECONDS} s"),
    });
    AcceptanceReport { config, criteria: r.criteria, total_seconds: total, plots: r.plots }
}

/// The sweep eigenfunctions themselves, as ensemble members.
fn sweep_functions(kind: &OperatorKind, config: AcceptanceConfig) -> Result<Vec<FunctionRep>> {
    let spectral_kind = match kind {
        OperatorKind::LaplaceAdjointTt { ab, .. } => OperatorKind::laplace(*ab)?,
        k => *k,
    };
    let dec = integral_spectrum(&spectral_kind, config.sizes.grid, config.sizes.trial)?;
    let domain = spectral_kind.input_domain().span();
    Ok((0..config.m)
        .map(|k| {
            let c: Vec<f64> = dec.eigenvectors.column(k).iter().copied().collect();
            match kind {
                OperatorKind::LaplaceAdjointTt { half, .. } => FunctionRep::LaplaceImage {
                    domain: half.as_interval(),
                    source: domain,
                    coefficients: c,
                    scale: 1.0 / dec.eigenvalues[k].sqrt(),
                },
                _ => FunctionRep::legendre(domain, c),
            }
        })
        .collect())
}

fn spectrum_plot(title: &str, mu: &[f64]) -> LinePlot {
    LinePlot {
        title: title.into(),
        x_label: "n".into(),
        y_label: "mu_n".into(),
        log_y: true,
        series: vec![("mu_n".into(), mu.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect())],
    }
}
