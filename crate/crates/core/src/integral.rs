//! Truncated integral operators and their self-adjoint compositions on quadrature grids.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::FunctionRep;
use crate::grid::{make_grid, GridDomain, HalfLineDomain, Interval, QuadGrid, MAX_GRID};
use crate::norms::sample_on;
use crate::special::{neumaier_sum, sinc, spherical_bessel_small};

/// Below this fraction of `‖f‖²` the matrix quadratic form is dominated by rounding.
pub const CANCELLATION_FLOOR: f64 = 1e-12;

const FOURIER_XI_NODES: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `χ_J H(χ_I f)` with `H f(y) = (1/π)∫ f(x)/(y−x) dx`.
    HilbertTruncated { i: Interval, j: Interval },
    /// `L*L` on `L²[a,b]`, kernel `1/(t+s)`.
    LaplaceTt { ab: Interval },
    /// `L L*` on the truncated half line.
    LaplaceAdjointTt { ab: Interval, half: HalfLineDomain },
    /// `F_T* F_T` on `[-1,1]`, kernel `2 sin(x−y)/(x−y)`.
    FourierTt { sym: Interval },
}

impl OperatorKind {
    pub fn hilbert(i: Interval, j: Interval) -> Result<Self> {
        if i.overlaps(&j) {
            return invalid("the truncated Hilbert transform needs disjoint intervals");
        }
        Ok(OperatorKind::HilbertTruncated { i, j })
    }

    pub fn laplace(ab: Interval) -> Result<Self> {
        positive_interval(&ab)?;
        Ok(OperatorKind::LaplaceTt { ab })
    }

    pub fn laplace_adjoint(ab: Interval) -> Result<Self> {
        positive_interval(&ab)?;
        Ok(OperatorKind::LaplaceAdjointTt { ab, half: HalfLineDomain::for_laplace(&ab)? })
    }

    pub fn fourier() -> Self {
        OperatorKind::FourierTt { sym: Interval::symmetric() }
    }

    /// Domain on which the composition acts.
    pub fn input_domain(&self) -> GridDomain {
        match self {
            OperatorKind::HilbertTruncated { i, .. } => (*i).into(),
            OperatorKind::LaplaceTt { ab } => (*ab).into(),
            OperatorKind::LaplaceAdjointTt { half, .. } => (*half).into(),
            OperatorKind::FourierTt { sym } => (*sym).into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            OperatorKind::HilbertTruncated { i, j } => OperatorKind::hilbert(*i, *j).map(|_| ()),
            OperatorKind::LaplaceTt { ab } | OperatorKind::LaplaceAdjointTt { ab, .. } => positive_interval(ab),
            OperatorKind::FourierTt { sym } => {
                if *sym != Interval::symmetric() {
                    return invalid("the Fourier composition is only supported on [-1, 1]");
                }
                Ok(())
            }
        }
    }

    /// Parses a CLI operator string; bare `laplace` / `laplace-adjoint` take `default_ab`.
    pub fn parse_with_default(s: &str, default_ab: Interval) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let kind = match head {
            "fourier" if rest.is_empty() => OperatorKind::fourier(),
            "hilbert" => {
                let mut i = Interval::unit();
                let mut j = Interval::new(2.0, 3.0)?;
                for part in &rest {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| Error::UnsupportedKind(format!("malformed segment `{part}` in `{s}`")))?;
                    let pair = parse_pair(value, s)?;
                    match key {
                        "I" => i = Interval::new(pair.0, pair.1)?,
                        "J" => j = Interval::new(pair.0, pair.1)?,
                        _ => return Err(Error::UnsupportedKind(format!("unknown key `{key}` in `{s}`"))),
                    }
                }
                OperatorKind::hilbert(i, j)?
            }
            "laplace" | "laplace-adjoint" => {
                let ab = match rest.as_slice() {
                    [] => default_ab,
                    [params] => {
                        let (mut a, mut b) = (default_ab.a, default_ab.b);
                        for kv in params.split(',') {
                            let (key, value) = kv
                                .split_once('=')
                                .ok_or_else(|| Error::UnsupportedKind(format!("malformed parameter in `{s}`")))?;
                            let value: f64 = value
                                .parse()
                                .map_err(|_| Error::UnsupportedKind(format!("bad number `{value}` in `{s}`")))?;
                            match key {
                                "a" => a = value,
                                "b" => b = value,
                                _ => return Err(Error::UnsupportedKind(format!("unknown key `{key}` in `{s}`"))),
                            }
                        }
                        Interval::new(a, b)?
                    }
                    _ => return Err(Error::UnsupportedKind(s.to_string())),
                };
                if head == "laplace" {
                    OperatorKind::laplace(ab)?
                } else {
                    OperatorKind::laplace_adjoint(ab)?
                }
            }
            _ => return Err(Error::UnsupportedKind(s.to_string())),
        };
        Ok(kind)
    }
}

fn parse_pair(value: &str, whole: &str) -> Result<(f64, f64)> {
    let bad = || Error::UnsupportedKind(format!("expected `lo,hi` in `{whole}`"));
    let (lo, hi) = value.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn positive_interval(ab: &Interval) -> Result<()> {
    if ab.a <= 0.0 {
        return invalid(format!("Laplace operators need 0 < a, got a = {}", ab.a));
    }
    Ok(())
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::parse_with_default(s, Interval::new(1.0, 2.0)?)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::HilbertTruncated { i, j } => write!(f, "hilbert:I={},{}:J={},{}", i.a, i.b, j.a, j.b),
            OperatorKind::LaplaceTt { ab } => write!(f, "laplace:a={},b={}", ab.a, ab.b),
            OperatorKind::LaplaceAdjointTt { ab, .. } => write!(f, "laplace-adjoint:a={},b={}", ab.a, ab.b),
            OperatorKind::FourierTt { .. } => write!(f, "fourier"),
        }
    }
}

/// `(e^{-au} − e^{-bu}) / u`, switching to its Taylor series near `u = 0`.
pub fn adjoint_laplace_kernel(a: f64, b: f64, u: f64) -> f64 {
    if u.abs() < 1e-3 {
        // Σ_k (−u)^k (b^{k+1} − a^{k+1}) / (k+1)!
        let mut total = 0.0;
        let (mut ak, mut bk, mut uk, mut fact) = (a, b, 1.0, 1.0);
        for k in 0..8 {
            total += uk * (bk - ak) / fact;
            ak *= a;
            bk *= b;
            uk *= -u;
            fact *= (k + 2) as f64;
        }
        total
    } else {
        ((-a * u).exp() - (-b * u).exp()) / u
    }
}

pub fn kernel_value(kind: &OperatorKind, x: f64, y: f64) -> Result<f64> {
    match kind {
        OperatorKind::HilbertTruncated { .. } => Err(Error::UnsupportedKind(
            "the truncated Hilbert composition has no closed pointwise kernel; use gram_matrix".into(),
        )),
        OperatorKind::LaplaceTt { .. } => Ok(1.0 / (x + y)),
        OperatorKind::LaplaceAdjointTt { ab, .. } => Ok(adjoint_laplace_kernel(ab.a, ab.b, x + y)),
        OperatorKind::FourierTt { .. } => Ok(2.0 * sinc(x - y)),
    }
}

/// A dense symmetric discretization `W^{1/2} K W^{1/2}` of a `T*T` composition.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
    pub grid: QuadGrid,
    pub kind: OperatorKind,
    pub symmetrized: bool,
}

fn check_grid(kind: &OperatorKind, grid: &QuadGrid) -> Result<()> {
    let want = kind.input_domain().span();
    let got = grid.span();
    let tol = 1e-12 * (1.0 + want.a.abs() + want.b.abs());
    if (want.a - got.a).abs() > tol || (want.b - got.b).abs() > tol {
        return invalid(format!(
            "grid spans [{}, {}] but {kind} acts on [{}, {}]",
            got.a, got.b, want.a, want.b
        ));
    }
    if grid.len() > MAX_GRID {
        return invalid(format!("grid size {} exceeds {MAX_GRID}", grid.len()));
    }
    Ok(())
}

/// Weighted Hilbert transfer matrix from the input grid on `I` to a 2× output grid on `J`.
fn hilbert_transfer(i_grid: &QuadGrid, j: Interval) -> Result<DMatrix<f64>> {
    let out = make_grid(j, 2 * i_grid.len())?;
    let sw_in = i_grid.sqrt_weights();
    let sw_out = out.sqrt_weights();
    Ok(DMatrix::from_fn(out.len(), i_grid.len(), |r, c| {
        sw_out[r] * sw_in[c] / (PI * (out.nodes[r] - i_grid.nodes[c]))
    }))
}

pub fn gram_matrix(kind: &OperatorKind, grid: &QuadGrid) -> Result<OperatorMatrix> {
    kind.validate()?;
    check_grid(kind, grid)?;
    let n = grid.len();
    let entries = match kind {
        OperatorKind::HilbertTruncated { j, .. } => {
            let a = hilbert_transfer(grid, *j)?;
            let m = a.transpose() * &a;
            (&m + m.transpose()) * 0.5
        }
        _ => {
            let sw = grid.sqrt_weights();
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|r| {
                    (0..n)
                        .map(|c| {
                            let (x, y) = if r <= c { (r, c) } else { (c, r) };
                            sw[x] * sw[y] * kernel_value(kind, grid.nodes[x], grid.nodes[y]).expect("pointwise kernel")
                        })
                        .collect()
                })
                .collect();
            DMatrix::from_fn(n, n, |r, c| rows[r][c])
        }
    };
    Ok(OperatorMatrix { entries, grid: grid.clone(), kind: *kind, symmetrized: true })
}

impl OperatorMatrix {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Row-major CSV with a comment header naming the operator and grid size.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# kind={} n={}\n", self.kind, self.len());
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| crate::report::fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `‖T f‖²` through `f^T M f`, falling back to the transform route when that form is
/// within rounding of zero.
pub fn quadratic_form(m: &OperatorMatrix, f: &FunctionRep) -> Result<f64> {
    let values = sample_on(f, &m.grid, 0)?;
    let v: Vec<f64> = values.iter().zip(m.grid.sqrt_weights()).map(|(f, s)| f * s).collect();
    let norm_sq = neumaier_sum(v.iter().map(|x| x * x));
    if norm_sq == 0.0 {
        return Ok(0.0);
    }
    let plain = neumaier_sum((0..v.len()).map(|r| {
        v[r] * neumaier_sum(m.entries.row(r).iter().zip(&v).map(|(k, x)| k * x))
    }));
    if plain < CANCELLATION_FLOOR * norm_sq {
        return transform_norm_sq(&m.kind, f, m.len());
    }
    Ok(plain)
}

/// `(L f)(s) = ∫_a^b e^{-st} f(t) dt` at each `s ≥ 0`.
pub fn laplace_forward(f: &FunctionRep, ab: Interval, s_values: &[f64]) -> Result<Vec<f64>> {
    if let Some(s) = s_values.iter().find(|s| !(**s >= 0.0)) {
        return invalid(format!("Laplace transform evaluated at s = {s}"));
    }
    let grid = make_grid(ab, (2 * f.payload().len() + 48).max(64))?;
    let wf: Vec<f64> = sample_on(f, &grid, 0)?.iter().zip(&grid.weights).map(|(v, w)| v * w).collect();
    Ok(s_values
        .iter()
        .map(|&s| neumaier_sum(grid.nodes.iter().zip(&wf).map(|(t, wf)| (-s * t).exp() * wf)))
        .collect())
}

/// `‖T f‖²` by evaluating `T f` pointwise and integrating its square.
///
/// `n` sets the quadrature resolution of both sides.
pub fn transform_norm_sq(kind: &OperatorKind, f: &FunctionRep, n: usize) -> Result<f64> {
    kind.validate()?;
    match kind {
        OperatorKind::HilbertTruncated { i, j } => {
            let gi = make_grid(*i, n)?;
            let gj = make_grid(*j, 2 * n)?;
            let wf: Vec<f64> = sample_on(f, &gi, 0)?.iter().zip(&gi.weights).map(|(v, w)| v * w).collect();
            let hf: Vec<f64> = gj
                .nodes
                .iter()
                .map(|&y| neumaier_sum(gi.nodes.iter().zip(&wf).map(|(x, wf)| wf / (y - x))) / PI)
                .collect();
            Ok(gj.integrate(&hf.iter().map(|v| v * v).collect::<Vec<_>>()))
        }
        OperatorKind::LaplaceTt { ab } => {
            let half = make_grid(HalfLineDomain::for_laplace(ab)?, n)?;
            let lf = laplace_forward(f, *ab, &half.nodes)?;
            Ok(half.integrate(&lf.iter().map(|v| v * v).collect::<Vec<_>>()))
        }
        OperatorKind::LaplaceAdjointTt { ab, half } => {
            let gs = make_grid(*half, n)?;
            let gt = make_grid(*ab, n)?;
            let wf: Vec<f64> = sample_on(f, &gs, 0)?.iter().zip(&gs.weights).map(|(v, w)| v * w).collect();
            let lf: Vec<f64> = gt
                .nodes
                .iter()
                .map(|&t| neumaier_sum(gs.nodes.iter().zip(&wf).map(|(s, wf)| (-s * t).exp() * wf)))
                .collect();
            Ok(gt.integrate(&lf.iter().map(|v| v * v).collect::<Vec<_>>()))
        }
        OperatorKind::FourierTt { sym } => {
            if f.domain() != *sym {
                return invalid("the Fourier composition acts on functions on [-1, 1]");
            }
            let xi = make_grid(*sym, FOURIER_XI_NODES)?;
            let mut mags = Vec::with_capacity(xi.len());
            for &x in &xi.nodes {
                let (re, im) = fourier_transform(f, x, n)?;
                mags.push(re * re + im * im);
            }
            Ok(xi.integrate(&mags))
        }
    }
}

/// `∫ f(x) e^{iξx} dx` over the domain of `f`, as `(re, im)`.
///
/// Trigonometric and Legendre series are transformed term by term in closed form and
/// summed with compensation, so tiny transforms of large coefficient vectors keep
/// their relative accuracy.
pub fn fourier_transform(f: &FunctionRep, xi: f64, n: usize) -> Result<(f64, f64)> {
    let d = f.domain();
    match f {
        FunctionRep::SineSeries { coefficients, first_mode, raw, .. }
        | FunctionRep::CosineSeries { coefficients, first_mode, raw, .. } => {
            let is_sine = matches!(f, FunctionRep::SineSeries { .. });
            let (shift, len) = if *raw { (0.0, 1.0) } else { (d.a, d.length()) };
            let mut re = Vec::with_capacity(2 * coefficients.len());
            let mut im = Vec::with_capacity(2 * coefficients.len());
            for (idx, &c) in coefficients.iter().enumerate() {
                let w = (first_mode + idx) as f64 * PI / len;
                // cos(w x + θ) with θ = −w·shift (−π/2 more for sine).
                let theta = -w * shift - if is_sine { PI / 2.0 } else { 0.0 };
                for (sign, freq) in [(1.0, w + xi), (-1.0, xi - w)] {
                    // ½ e^{±iθ} ∫_{a}^{b} e^{i freq x} dx
                    let (seg_re, seg_im) = exp_integral(d, freq);
                    let (ct, st) = (theta.cos(), sign * theta.sin());
                    re.push(0.5 * c * (ct * seg_re - st * seg_im));
                    im.push(0.5 * c * (ct * seg_im + st * seg_re));
                }
            }
            Ok((neumaier_sum(re), neumaier_sum(im)))
        }
        FunctionRep::LegendreSeries { coefficients, .. } => {
            // p̄_k(x) = √((2k+1)/L) P_k(u); ∫_{-1}^{1} P_k(u) e^{iκu} du = 2 i^k j_k(κ).
            let half = d.half_width();
            let kappa = xi * half;
            let j = spherical_bessel_small(coefficients.len(), kappa);
            let (pc, ps) = ((xi * d.midpoint()).cos(), (xi * d.midpoint()).sin());
            let mut re = Vec::new();
            let mut im = Vec::new();
            for (k, &c) in coefficients.iter().enumerate() {
                let mag = c * ((2 * k + 1) as f64 / d.length()).sqrt() * half * 2.0 * j[k];
                let (r, i) = match k % 4 {
                    0 => (mag, 0.0),
                    1 => (0.0, mag),
                    2 => (-mag, 0.0),
                    _ => (0.0, -mag),
                };
                re.push(r * pc - i * ps);
                im.push(r * ps + i * pc);
            }
            Ok((neumaier_sum(re), neumaier_sum(im)))
        }
        _ => {
            let grid = make_grid(d, n.max(2 * f.payload().len() + 32))?;
            let v = sample_on(f, &grid, 0)?;
            let re = neumaier_sum(grid.nodes.iter().zip(&grid.weights).zip(&v).map(|((x, w), v)| w * v * (xi * x).cos()));
            let im = neumaier_sum(grid.nodes.iter().zip(&grid.weights).zip(&v).map(|((x, w), v)| w * v * (xi * x).sin()));
            Ok((re, im))
        }
    }
}

/// `∫_a^b e^{iκx} dx = L e^{iκm} sinc(κL/2)`.
fn exp_integral(d: Interval, kappa: f64) -> (f64, f64) {
    let amp = d.length() * sinc(kappa * d.half_width());
    let phase = kappa * d.midpoint();
    (amp * phase.cos(), amp * phase.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_sym_sorted;

    fn ab() -> Interval {
        Interval::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn parses_cli_strings() {
        let h: OperatorKind = "hilbert:I=0,1:J=2,3".parse().unwrap();
        assert_eq!(h, OperatorKind::HilbertTruncated { i: Interval::unit(), j: Interval::new(2.0, 3.0).unwrap() });
        let l: OperatorKind = "laplace:a=1,b=2".parse().unwrap();
        assert_eq!(l, OperatorKind::LaplaceTt { ab: ab() });
        assert!(matches!("laplace-adjoint:a=1,b=2".parse().unwrap(), OperatorKind::LaplaceAdjointTt { .. }));
        assert_eq!("fourier".parse::<OperatorKind>().unwrap(), OperatorKind::fourier());
        for s in ["fourier:c=2", "heat", "laplace:a=0,b=2", "hilbert:I=0,1:J=0.5,2", "laplace:a=x"] {
            assert!(s.parse::<OperatorKind>().is_err(), "{s}");
        }
        for k in [h, l, OperatorKind::fourier()] {
            assert_eq!(k.to_string().parse::<OperatorKind>().unwrap(), k);
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_value(&OperatorKind::fourier(), 0.3, 0.3).unwrap(), 2.0);
        assert_eq!(kernel_value(&OperatorKind::laplace(ab()).unwrap(), 1.0, 1.0).unwrap(), 0.5);
        let adj = OperatorKind::laplace_adjoint(ab()).unwrap();
        assert!((kernel_value(&adj, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // Branches agree across the switch.
        let lo = adjoint_laplace_kernel(1.0, 2.0, 0.999_999e-3);
        let hi = adjoint_laplace_kernel(1.0, 2.0, 1.000_001e-3);
        assert!((lo - hi).abs() < 1e-8);
        let direct = ((-0.5e-3f64).exp() - (-1e-3f64).exp()) / 0.5e-3;
        assert!((adjoint_laplace_kernel(1.0, 2.0, 0.5e-3) - direct).abs() < 1e-11);
        let h = OperatorKind::hilbert(Interval::unit(), Interval::new(2.0, 3.0).unwrap()).unwrap();
        assert!(matches!(kernel_value(&h, 0.5, 2.5), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn laplace_forward_of_constant() {
        let one = FunctionRep::constant(ab(), 1.0);
        let v = laplace_forward(&one, ab(), &[0.0, 1.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!((v[1] - ((-1.0f64).exp() - (-2.0f64).exp())).abs() < 1e-10);
        assert!(laplace_forward(&one, ab(), &[-1.0]).is_err());
        let z = FunctionRep::zero(ab());
        assert!(laplace_forward(&z, ab(), &[0.0, 3.0]).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn laplace_gram_quadratic_form_on_constant() {
        // ∫₁²∫₁² dt ds/(t+s) = 10 ln 2 − 6 ln 3; 30-digit quadrature gives the same.
        let exact = 10.0 * 2f64.ln() - 6.0 * 3f64.ln();
        assert!((exact - 0.339_798_073_590_794_9).abs() < 1e-15);
        let kind = OperatorKind::laplace(ab()).unwrap();
        let m = gram_matrix(&kind, &make_grid(ab(), 64).unwrap()).unwrap();
        let q = quadratic_form(&m, &FunctionRep::constant(ab(), 1.0)).unwrap();
        assert!((q - exact).abs() < 1e-8);
    }

    #[test]
    fn matrices_are_symmetric_psd() {
        let kinds = [
            OperatorKind::laplace(ab()).unwrap(),
            OperatorKind::laplace_adjoint(ab()).unwrap(),
            OperatorKind::fourier(),
            OperatorKind::hilbert(Interval::unit(), Interval::new(2.0, 3.0).unwrap()).unwrap(),
        ];
        for kind in kinds {
            let grid = make_grid(kind.input_domain(), 48).unwrap();
            let m = gram_matrix(&kind, &grid).unwrap();
            let (vals, _) = eig_sym_sorted(&m.entries, true, 1e-13).unwrap();
            assert!(vals[0] >= -1e-10 * vals.last().unwrap(), "{kind}: {}", vals[0]);
            if let OperatorKind::FourierTt { .. } = kind {
                for i in 0..grid.len() {
                    assert!((m.entries[(i, i)] - 2.0 * grid.weights[i]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn grid_domain_mismatch() {
        let kind = OperatorKind::laplace(ab()).unwrap();
        assert!(gram_matrix(&kind, &make_grid(Interval::unit(), 8).unwrap()).is_err());
    }

    #[test]
    fn fourier_transform_routes_agree() {
        let sym = Interval::symmetric();
        let fs = [
            FunctionRep::cosine(sym, vec![0.3, -0.7, 0.2]),
            FunctionRep::CosineSeries { domain: sym, coefficients: vec![0.1, 0.5, -0.4], first_mode: 1, raw: true },
            FunctionRep::SineSeries { domain: sym, coefficients: vec![0.2, 0.3], first_mode: 2, raw: true },
            FunctionRep::legendre(sym, vec![0.5, -0.2, 0.8, 0.1]),
        ];
        for f in &fs {
            let samples = FunctionRep::sample(sym, 40, |x| f.eval(x).unwrap());
            for &xi in &[-0.9, 0.0, 0.4] {
                let a = fourier_transform(f, xi, 128).unwrap();
                let b = fourier_transform(&samples, xi, 128).unwrap();
                assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12, "{f:?} at {xi}");
            }
        }
    }

    #[test]
    fn transform_norms_match_matrix_forms() {
        let cases = [
            (OperatorKind::laplace(ab()).unwrap(), FunctionRep::sine(ab(), vec![0.4, 1.0, -0.3])),
            (OperatorKind::fourier(), FunctionRep::legendre(Interval::symmetric(), vec![0.2, 1.0, -0.5])),
            (
                OperatorKind::hilbert(Interval::unit(), Interval::new(2.0, 3.0).unwrap()).unwrap(),
                FunctionRep::sine(Interval::unit(), vec![1.0, 0.5]),
            ),
            (
                OperatorKind::laplace_adjoint(ab()).unwrap(),
                FunctionRep::PolyExp { domain: Interval::new(0.0, 40.0).unwrap(), coefficients: vec![1.0, -1.0], rate: 1.5 },
            ),
        ];
        for (kind, f) in cases {
            let m = gram_matrix(&kind, &make_grid(kind.input_domain(), 128).unwrap()).unwrap();
            let q = quadratic_form(&m, &f).unwrap();
            let t = transform_norm_sq(&kind, &f, 128).unwrap();
            assert!((q - t).abs() <= 1e-6 * q, "{kind}: {q} vs {t}");
        }
    }
}
