//! The `illposed` command line.
//!
//! Exit status: 0 when every requested check passes, 2 when a check fails, 1 on usage
//! or assembly errors. `ILLPOSED_OUT_DIR`, when set, overrides `--out-dir`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::acceptance::{run_all, AcceptanceConfig};
use crate::adversarial::{build_gramian, orthonormal_basis, reproduce_figure, worst_function, BasisFamily, FigureId, FigureSpec};
use crate::diffop::{assemble, DiffOpSpec, FourthOrderVariant, MAX_TRIAL};
use crate::ensemble::{self, DEFAULT_SEED};
use crate::error::{invalid, Error, Result};
use crate::function::FunctionRep;
use crate::grid::{make_grid, Interval, MAX_GRID};
use crate::integral::{gram_matrix, OperatorKind};
use crate::report::{self, LinePlot};
use crate::spectral::{diff_spectrum, integral_spectrum, match_eigenfunctions, MatchReport};
use crate::stability::{adjoint_domain, eigenfunction_sweep, fit_constants, verify_theorem, FitForm, Sizes};

pub const OUT_DIR_ENV: &str = "ILLPOSED_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "illposed", version, about = "Truncated transforms, commuting operators and stability checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory for CSV, JSON and SVG artifacts.
    #[arg(long, global = true, default_value = "illposed-out")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    /// `laplace[:a=..,b=..]`, `laplace-adjoint[:a=..,b=..]`, `fourier`, `hilbert[:I=lo,hi:J=lo,hi]`.
    #[arg(long, default_value = "laplace")]
    pub op: String,
    /// Left end of `[a, b]` when `--op` leaves it out.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SizeArgs {
    /// Quadrature size.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Galerkin trial size.
    #[arg(long = "N", default_value_t = 128)]
    pub big_n: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of an integral composition, or of a differential operator with `--diff`.
    Spectrum {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        /// `bg`, `fourth:lemma`, `fourth:proof` or `prolate`.
        #[arg(long)]
        diff: Option<String>,
    },
    /// Eigenfunction coincidence between an integral composition and its commuting operator.
    Match {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, default_value_t = 12)]
        m: usize,
        /// Commuting operator; chosen from the operator when omitted.
        #[arg(long)]
        diff: Option<String>,
    },
    /// Worst-case unit-norm function in a finite basis.
    Adversarial {
        #[command(flatten)]
        op: OperatorArgs,
        /// `sine`, `cosine` or `legendre`.
        #[arg(long, default_value = "sine")]
        basis: String,
        /// Basis size.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Quadrature size.
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Recompute the ratio of a published example function.
    Figures {
        #[arg(long)]
        id: u32,
    },
    /// Fit stability constants on eigenfunctions and test a random ensemble.
    Verify {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, default_value_t = 12)]
        m: usize,
        /// Ensemble size.
        #[arg(long, default_value_t = 500)]
        count: usize,
    },
    /// Every acceptance criterion, with artifacts.
    ReportAll {
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, default_value_t = 12)]
        m: usize,
    },
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| cli.out_dir.clone())
}

fn operator(args: &OperatorArgs) -> Result<OperatorKind> {
    OperatorKind::parse_with_default(&args.op, Interval::new(args.a, args.b)?)
}

fn check_sizes(s: &SizeArgs) -> Result<Sizes> {
    if s.n == 0 || s.n > MAX_GRID {
        return invalid(format!("--n must lie in 1..={MAX_GRID}"));
    }
    if s.big_n == 0 || s.big_n > MAX_TRIAL {
        return invalid(format!("--N must lie in 1..={MAX_TRIAL}"));
    }
    Ok(Sizes { grid: s.n, trial: s.big_n })
}

fn slug(kind: &OperatorKind) -> String {
    kind.to_string().replace([':', ',', '='], "_")
}

fn emit<T: Serialize>(dir: &Path, name: &str, kind: &str, body: &T) -> Result<()> {
    let json = report::to_json(kind, body)?;
    report::write_artifact(dir, name, &json)?;
    print!("{json}");
    Ok(())
}

/// The commuting partner of each integral composition.
fn default_diff(kind: &OperatorKind) -> Result<Vec<DiffOpSpec>> {
    Ok(match kind {
        OperatorKind::LaplaceTt { ab } => vec![DiffOpSpec::BerteroGrunbaum { ab: *ab }],
        OperatorKind::LaplaceAdjointTt { ab, half } => [FourthOrderVariant::AsLemma, FourthOrderVariant::AsProofBound]
            .into_iter()
            .map(|variant| DiffOpSpec::FourthOrderHalfLine { ab: *ab, half: *half, variant })
            .collect(),
        OperatorKind::FourierTt { .. } => vec![DiffOpSpec::Prolate],
        OperatorKind::HilbertTruncated { .. } => {
            return Err(Error::UnsupportedKind("no commuting operator for the truncated Hilbert transform; pass --diff".into()))
        }
    })
}

fn diff_ab(kind: &OperatorKind, args: &OperatorArgs) -> Result<Interval> {
    match kind {
        OperatorKind::LaplaceTt { ab } | OperatorKind::LaplaceAdjointTt { ab, .. } => Ok(*ab),
        _ => Interval::new(args.a, args.b),
    }
}

#[derive(Serialize)]
struct MatchOutput<'a> {
    chosen: &'a str,
    candidates: Vec<(String, f64)>,
    max_relative_residual: f64,
    pass: bool,
    report: &'a MatchReport,
}

pub fn run(cli: &Cli) -> Result<bool> {
    let dir = out_dir(cli);
    match &cli.command {
        Command::Spectrum { op, sizes, diff } => {
            let sizes = check_sizes(sizes)?;
            let (dec, name) = match diff {
                Some(d) => {
                    let spec = DiffOpSpec::parse(d, Interval::new(op.a, op.b)?)?;
                    (diff_spectrum(&spec, sizes.trial)?, spec.name().replace(':', "_"))
                }
                None => {
                    let kind = operator(op)?;
                    (integral_spectrum(&kind, sizes.grid, sizes.trial)?, slug(&kind))
                }
            };
            let csv = dec.to_csv();
            report::write_artifact(&dir, &format!("spectrum_{name}.csv"), &csv)?;
            let shown = csv.lines().count().saturating_sub(1);
            let plot = LinePlot {
                title: dec.source.clone(),
                x_label: "n".into(),
                y_label: "eigenvalue".into(),
                log_y: diff.is_none(),
                series: vec![("eigenvalue".into(), dec.eigenvalues.iter().take(shown).enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect())],
            };
            report::write_artifact(&dir, &format!("spectrum_{name}.svg"), &plot.to_svg())?;
            print!("{csv}");
            let v = &dec.eigenvalues[..shown];
            Ok(match diff {
                None => v.iter().all(|&x| x > 0.0) && v.windows(2).all(|w| w[0] > w[1]),
                Some(_) => v.iter().all(|x| x.is_finite()) && !v.is_empty(),
            })
        }
        Command::Match { op, sizes, m, diff } => {
            let sizes = check_sizes(sizes)?;
            let kind = operator(op)?;
            let specs = match diff {
                Some(d) => vec![DiffOpSpec::parse(d, diff_ab(&kind, op)?)?],
                None => default_diff(&kind)?,
            };
            let m_integral = gram_matrix(&kind, &make_grid(kind.input_domain(), sizes.grid)?)?;
            let mut reports = specs
                .iter()
                .map(|s| match_eigenfunctions(&m_integral, &assemble(s, sizes.trial)?, *m))
                .collect::<Result<Vec<_>>>()?;
            let candidates = reports.iter().map(|r| (r.diff.clone(), r.commutation_residual)).collect();
            reports.sort_by(|x, y| x.commutation_residual.total_cmp(&y.commutation_residual));
            let best = &reports[0];
            let max = best.max_relative_residual();
            let pass = max <= 1e-6 && best.commutation_residual <= 1e-8;
            let out = MatchOutput { chosen: &best.diff, candidates, max_relative_residual: max, pass, report: best };
            emit(&dir, &format!("match_{}.json", slug(&kind)), "match", &out)?;
            Ok(pass)
        }
        Command::Adversarial { op, basis, n, grid } => {
            if *n == 0 || *n > MAX_TRIAL {
                return invalid(format!("basis size must lie in 1..={MAX_TRIAL}"));
            }
            let kind = operator(op)?;
            let family: BasisFamily = basis.parse()?;
            let g = make_grid(kind.input_domain(), *grid)?;
            let rep = build_gramian(&kind, &orthonormal_basis(family, kind.input_domain().span(), *n), &g)?;
            let worst = worst_function(&rep)?;
            let d = worst.domain();
            let xs: Vec<f64> = (0..512).map(|i| d.a + d.length() * i as f64 / 511.0).collect();
            let ys = worst.eval_many(&xs, 0)?;
            let name = format!("adversarial_{}_{}_{n}", slug(&kind), basis);
            report::write_artifact(&dir, &format!("{name}.csv"), &report::csv(&["x", "f"], xs.iter().zip(&ys).map(|(x, y)| vec![*x, *y])))?;
            let plot = LinePlot {
                title: format!("worst function, {kind}, {basis} basis of size {n}"),
                x_label: "x".into(),
                y_label: "f".into(),
                log_y: false,
                series: vec![("f".into(), xs.iter().copied().zip(ys.iter().copied()).collect())],
            };
            report::write_artifact(&dir, &format!("{name}.svg"), &plot.to_svg())?;
            emit(&dir, &format!("{name}.json"), "adversarial", &rep)?;
            Ok(true)
        }
        Command::Figures { id } => {
            let spec = FigureSpec::builtin(FigureId::from_number(*id)?)?;
            let result = reproduce_figure(&spec)?;
            emit(&dir, &format!("figure_{id}.json"), "figure", &result)?;
            Ok(result.pass)
        }
        Command::Verify { op, sizes, m, count } => {
            let sizes = check_sizes(sizes)?;
            let kind = operator(op)?;
            let form = match kind {
                OperatorKind::FourierTt { .. } => FitForm::PowerOfRatio,
                _ => FitForm::Exponential,
            };
            let sweep = eigenfunction_sweep(&kind, sizes, *m)?;
            let fit = fit_constants(&sweep, form, format!("{kind} eigenfunctions 1..{m}"))?;
            let mut rng = ensemble::stream(cli.seed, 0xE5);
            let members: Vec<FunctionRep> = (0..*count)
                .map(|_| -> Result<FunctionRep> {
                    Ok(match kind {
                        OperatorKind::LaplaceTt { ab } => ensemble::sine_series(&mut rng, ab, 8),
                        OperatorKind::LaplaceAdjointTt { ab, .. } => ensemble::poly_exp(&mut rng, adjoint_domain(&ab)?),
                        _ => ensemble::legendre_series(&mut rng, Interval::symmetric(), 12, 0.0),
                    })
                })
                .collect::<Result<_>>()?;
            let rep = verify_theorem(&kind, &fit, &members, sizes.grid);
            let pairs = report::csv(&["h1_ratio", "log_lhs"], rep.records.iter().map(|r| vec![r.h1_ratio, r.lhs.ln()]));
            report::write_artifact(&dir, &format!("verify_{}.csv", slug(&kind)), &pairs)?;
            emit(&dir, &format!("verify_{}.json", slug(&kind)), "verify", &rep)?;
            Ok(rep.clean())
        }
        Command::ReportAll { sizes, m } => {
            let sizes = check_sizes(sizes)?;
            let rep = run_all(AcceptanceConfig { seed: cli.seed, sizes, m: *m });
            let mut text = String::new();
            for c in &rep.criteria {
                println!("{}", c.line());
                text.push_str(&c.line());
                text.push('\n');
            }
            for (name, plot) in &rep.plots {
                report::write_artifact(&dir, name, &plot.to_svg())?;
            }
            report::write_artifact(&dir, "acceptance.txt", &text)?;
            report::write_artifact(&dir, "acceptance.json", &report::to_json("acceptance", &rep)?)?;
            Ok(rep.all_pass())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let mut full = vec!["illposed", "--out-dir", dir.to_str().unwrap()];
        full.extend_from_slice(args);
        main_with_args(full)
    }

    #[test]
    fn usage_errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["spectrum", "--op", "gauss"]), 1);
        assert_eq!(run_in(dir.path(), &["frobnicate"]), 1);
        assert_eq!(run_in(dir.path(), &["spectrum", "--n", "4096"]), 1);
        assert_eq!(run_in(dir.path(), &["figures", "--id", "7"]), 1);
    }

    #[test]
    fn figure_two_passes_and_one_fails() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["figures", "--id", "2"]), 0);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("figure_2.json")).unwrap()).unwrap();
        assert_eq!(json["schema"], report::SCHEMA);
        assert_eq!(json["pass"], true);
        assert_eq!(run_in(dir.path(), &["figures", "--id", "1"]), 2);
    }

    #[test]
    fn spectrum_is_positive_and_decreasing_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["spectrum", "--op", "laplace:a=1,b=2", "--n", "128", "--N", "64"]), 0);
        let path = dir.path().join("spectrum_laplace_a_1_b_2.csv");
        let first = std::fs::read(&path).unwrap();
        assert_eq!(run_in(dir.path(), &["spectrum", "--op", "laplace:a=1,b=2", "--n", "128", "--N", "64"]), 0);
        assert_eq!(first, std::fs::read(&path).unwrap());
        assert!(dir.path().join("spectrum_laplace_a_1_b_2.svg").exists());
    }

    #[test]
    fn adversarial_writes_512_samples() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["adversarial", "--op", "hilbert", "--basis", "sine", "--n", "4", "--grid", "64"]), 0);
        let csv = std::fs::read_to_string(dir.path().join("adversarial_hilbert_I_0_1_J_2_3_sine_4.csv")).unwrap();
        assert_eq!(csv.lines().count(), 513);
    }
}
