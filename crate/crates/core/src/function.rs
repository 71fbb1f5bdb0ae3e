//! Function representations with exact (or spectral) derivatives.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{gauss_legendre, Interval};
use crate::special::{laguerre_function_table, legendre_table, neumaier_sum};

fn one() -> usize {
    1
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// A real function on a bounded interval.
///
/// Series kinds evaluate and differentiate analytically. `GridSamples` holds values at
/// Chebyshev–Lobatto points (ascending) and differentiates through barycentric
/// interpolation. Half-line functions use the interval `[0, s_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionRep {
    GridSamples {
        domain: Interval,
        samples: Vec<f64>,
    },
    /// `Σ c_i sin(k π y)`, `k = first_mode + i`, with `y = (x - a)/(b - a)`, or `y = x` when `raw`.
    SineSeries {
        domain: Interval,
        coefficients: Vec<f64>,
        #[serde(default = "one")]
        first_mode: usize,
        #[serde(default, skip_serializing_if = "is_false")]
        raw: bool,
    },
    /// Cosine analogue of [`FunctionRep::SineSeries`].
    CosineSeries {
        domain: Interval,
        coefficients: Vec<f64>,
        #[serde(default = "one")]
        first_mode: usize,
        #[serde(default, skip_serializing_if = "is_false")]
        raw: bool,
    },
    /// Expansion in Legendre polynomials orthonormal on `domain`.
    LegendreSeries {
        domain: Interval,
        coefficients: Vec<f64>,
    },
    /// `Σ c_k √(2σ) L_k(2σx) e^{-σx}`: Laguerre functions, orthonormal on the half line.
    LaguerreSeries {
        domain: Interval,
        coefficients: Vec<f64>,
        sigma: f64,
    },
    /// `p(x) e^{-rate x}` with `p` in the monomial basis.
    PolyExp {
        domain: Interval,
        coefficients: Vec<f64>,
        rate: f64,
    },
    /// `scale · ∫_source e^{-x t} v(t) dt` where `v` is an orthonormal Legendre series on `source`.
    LaplaceImage {
        domain: Interval,
        source: Interval,
        coefficients: Vec<f64>,
        scale: f64,
    },
}

impl FunctionRep {
    pub fn sine(domain: Interval, coefficients: Vec<f64>) -> Self {
        FunctionRep::SineSeries { domain, coefficients, first_mode: 1, raw: false }
    }

    pub fn cosine(domain: Interval, coefficients: Vec<f64>) -> Self {
        FunctionRep::CosineSeries { domain, coefficients, first_mode: 1, raw: false }
    }

    pub fn legendre(domain: Interval, coefficients: Vec<f64>) -> Self {
        FunctionRep::LegendreSeries { domain, coefficients }
    }

    pub fn constant(domain: Interval, value: f64) -> Self {
        FunctionRep::legendre(domain, vec![value * domain.length().sqrt()])
    }

    pub fn zero(domain: Interval) -> Self {
        FunctionRep::legendre(domain, vec![0.0])
    }

    /// Samples `f` at `n` Chebyshev–Lobatto points of `domain`.
    pub fn sample(domain: Interval, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let samples = chebyshev_points(domain, n).into_iter().map(f).collect();
        FunctionRep::GridSamples { domain, samples }
    }

    pub fn domain(&self) -> Interval {
        match self {
            FunctionRep::GridSamples { domain, .. }
            | FunctionRep::SineSeries { domain, .. }
            | FunctionRep::CosineSeries { domain, .. }
            | FunctionRep::LegendreSeries { domain, .. }
            | FunctionRep::LaguerreSeries { domain, .. }
            | FunctionRep::PolyExp { domain, .. }
            | FunctionRep::LaplaceImage { domain, .. } => *domain,
        }
    }

    pub fn payload(&self) -> &[f64] {
        match self {
            FunctionRep::GridSamples { samples, .. } => samples,
            FunctionRep::SineSeries { coefficients, .. }
            | FunctionRep::CosineSeries { coefficients, .. }
            | FunctionRep::LegendreSeries { coefficients, .. }
            | FunctionRep::LaguerreSeries { coefficients, .. }
            | FunctionRep::PolyExp { coefficients, .. }
            | FunctionRep::LaplaceImage { coefficients, .. } => coefficients,
        }
    }

    fn payload_mut(&mut self) -> &mut Vec<f64> {
        match self {
            FunctionRep::GridSamples { samples, .. } => samples,
            FunctionRep::SineSeries { coefficients, .. }
            | FunctionRep::CosineSeries { coefficients, .. }
            | FunctionRep::LegendreSeries { coefficients, .. }
            | FunctionRep::LaguerreSeries { coefficients, .. }
            | FunctionRep::PolyExp { coefficients, .. }
            | FunctionRep::LaplaceImage { coefficients, .. } => coefficients,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FunctionRep::GridSamples { .. } => "grid_samples",
            FunctionRep::SineSeries { .. } => "sine_series",
            FunctionRep::CosineSeries { .. } => "cosine_series",
            FunctionRep::LegendreSeries { .. } => "legendre_series",
            FunctionRep::LaguerreSeries { .. } => "laguerre_series",
            FunctionRep::PolyExp { .. } => "poly_exp",
            FunctionRep::LaplaceImage { .. } => "laplace_image",
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            FunctionRep::LaplaceImage { scale, .. } => *scale *= factor,
            other => other.payload_mut().iter_mut().for_each(|c| *c *= factor),
        }
        out
    }

    fn check_payload(&self) -> Result<()> {
        if self.payload().is_empty() {
            return invalid(format!("{} has an empty payload", self.kind_name()));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_many(&[x], 0)?[0])
    }

    /// Values of the `order`-th derivative (`order ≤ 2`) at every point of `xs`.
    pub fn eval_many(&self, xs: &[f64], order: usize) -> Result<Vec<f64>> {
        self.check_payload()?;
        if order > 2 {
            return invalid(format!("derivative order {order} exceeds 2"));
        }
        match self {
            FunctionRep::GridSamples { domain, samples } => {
                let mut s = samples.clone();
                for _ in 0..order {
                    s = chebyshev_differentiate(*domain, &s);
                }
                Ok(xs.iter().map(|&x| barycentric_eval(*domain, &s, x)).collect())
            }
            FunctionRep::SineSeries { domain, coefficients, first_mode, raw }
            | FunctionRep::CosineSeries { domain, coefficients, first_mode, raw } => {
                let cosine = matches!(self, FunctionRep::CosineSeries { .. });
                let (shift, len) = if *raw { (0.0, 1.0) } else { (domain.a, domain.length()) };
                Ok(xs
                    .iter()
                    .map(|&x| {
                        neumaier_sum(coefficients.iter().enumerate().map(|(i, c)| {
                            let w = (first_mode + i) as f64 * PI / len;
                            let phase = w * (x - shift);
                            // d/dx sin = w cos, d²/dx² sin = -w² sin; same pattern for cos.
                            let v = match (cosine, order) {
                                (false, 0) => phase.sin(),
                                (false, 1) => w * phase.cos(),
                                (false, _) => -w * w * phase.sin(),
                                (true, 0) => phase.cos(),
                                (true, 1) => -w * phase.sin(),
                                (true, _) => -w * w * phase.cos(),
                            };
                            c * v
                        }))
                    })
                    .collect())
            }
            FunctionRep::LegendreSeries { domain, coefficients } => Ok(xs
                .iter()
                .map(|&x| legendre_series_eval(*domain, coefficients, x, order))
                .collect()),
            FunctionRep::LaguerreSeries { coefficients, sigma, .. } => Ok(xs
                .iter()
                .map(|&x| {
                    let table = laguerre_function_table(coefficients.len(), *sigma, x);
                    neumaier_sum(coefficients.iter().zip(&table[order]).map(|(c, v)| c * v))
                })
                .collect()),
            FunctionRep::PolyExp { coefficients, rate, .. } => Ok(xs
                .iter()
                .map(|&x| {
                    let (p, dp, ddp) = horner3(coefficients, x);
                    let e = (-rate * x).exp();
                    match order {
                        0 => p * e,
                        1 => (dp - rate * p) * e,
                        _ => (ddp - 2.0 * rate * dp + rate * rate * p) * e,
                    }
                })
                .collect()),
            FunctionRep::LaplaceImage { source, coefficients, scale, .. } => {
                let n_inner = (2 * coefficients.len() + 48).max(64);
                let (u, w) = gauss_legendre(n_inner);
                let t: Vec<f64> = u.iter().map(|&u| source.from_reference(u)).collect();
                let v: Vec<f64> = t
                    .iter()
                    .zip(&w)
                    .map(|(&t, &w)| w * source.half_width() * legendre_series_eval(*source, coefficients, t, 0))
                    .collect();
                Ok(xs
                    .iter()
                    .map(|&s| {
                        scale
                            * neumaier_sum(
                                t.iter().zip(&v).map(|(&t, &v)| (-t).powi(order as i32) * (-s * t).exp() * v),
                            )
                    })
                    .collect())
            }
        }
    }

    /// The exact derivative, in the closed family where one exists.
    pub fn derivative(&self) -> Result<FunctionRep> {
        self.check_payload()?;
        Ok(match self {
            FunctionRep::GridSamples { domain, samples } => FunctionRep::GridSamples {
                domain: *domain,
                samples: chebyshev_differentiate(*domain, samples),
            },
            FunctionRep::SineSeries { domain, coefficients, first_mode, raw } => {
                let len = if *raw { 1.0 } else { domain.length() };
                FunctionRep::CosineSeries {
                    domain: *domain,
                    coefficients: coefficients
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c * (first_mode + i) as f64 * PI / len)
                        .collect(),
                    first_mode: *first_mode,
                    raw: *raw,
                }
            }
            FunctionRep::CosineSeries { domain, coefficients, first_mode, raw } => {
                let len = if *raw { 1.0 } else { domain.length() };
                FunctionRep::SineSeries {
                    domain: *domain,
                    coefficients: coefficients
                        .iter()
                        .enumerate()
                        .map(|(i, c)| -c * (first_mode + i) as f64 * PI / len)
                        .collect(),
                    first_mode: *first_mode,
                    raw: *raw,
                }
            }
            FunctionRep::LegendreSeries { domain, coefficients } => {
                let n = coefficients.len();
                let len = domain.length();
                let mut out = vec![0.0; n.saturating_sub(1).max(1)];
                for (k, &c) in coefficients.iter().enumerate() {
                    let mut j = k as isize - 1;
                    while j >= 0 {
                        let ju = j as usize;
                        out[ju] += c * 2.0 / len * (((2 * k + 1) * (2 * ju + 1)) as f64).sqrt();
                        j -= 2;
                    }
                }
                FunctionRep::LegendreSeries { domain: *domain, coefficients: out }
            }
            FunctionRep::LaguerreSeries { domain, coefficients, sigma } => {
                // ℓ_k' = −σ ℓ_k − 2σ Σ_{j<k} ℓ_j
                let mut out = vec![0.0; coefficients.len()];
                let mut tail = 0.0;
                for j in (0..coefficients.len()).rev() {
                    out[j] = -sigma * coefficients[j] - 2.0 * sigma * tail;
                    tail += coefficients[j];
                }
                FunctionRep::LaguerreSeries { domain: *domain, coefficients: out, sigma: *sigma }
            }
            FunctionRep::PolyExp { domain, coefficients, rate } => {
                let n = coefficients.len();
                let mut out = vec![0.0; n];
                for (k, &c) in coefficients.iter().enumerate() {
                    out[k] -= rate * c;
                    if k > 0 {
                        out[k - 1] += k as f64 * c;
                    }
                }
                FunctionRep::PolyExp { domain: *domain, coefficients: out, rate: *rate }
            }
            FunctionRep::LaplaceImage { .. } => {
                return Err(Error::Representation(
                    "derivatives of a Laplace image are evaluated pointwise only".into(),
                ))
            }
        })
    }

    /// `Σ a_k φ_k` for a basis of same-family series on a common domain.
    pub fn linear_combination(coefficients: &[f64], basis: &[FunctionRep]) -> Result<FunctionRep> {
        if coefficients.len() != basis.len() || basis.is_empty() {
            return invalid("coefficient and basis lengths differ or are empty");
        }
        let mut acc: Option<FunctionRep> = None;
        for (&a, phi) in coefficients.iter().zip(basis) {
            let term = phi.scaled(a);
            acc = Some(match acc {
                None => term,
                Some(prev) => add_same_family(&prev, &term)?,
            });
        }
        Ok(acc.expect("non-empty basis"))
    }
}

fn add_same_family(f: &FunctionRep, g: &FunctionRep) -> Result<FunctionRep> {
    use FunctionRep::*;
    let mismatch = || Error::InvalidArgument(format!("cannot add {} and {}", f.kind_name(), g.kind_name()));
    if f.domain() != g.domain() {
        return Err(mismatch());
    }
    match (f, g) {
        (
            SineSeries { domain, coefficients: c1, first_mode: m1, raw: r1 },
            SineSeries { coefficients: c2, first_mode: m2, raw: r2, .. },
        ) if r1 == r2 => {
            let (first, coeffs) = add_offset(c1, *m1, c2, *m2);
            Ok(SineSeries { domain: *domain, coefficients: coeffs, first_mode: first, raw: *r1 })
        }
        (
            CosineSeries { domain, coefficients: c1, first_mode: m1, raw: r1 },
            CosineSeries { coefficients: c2, first_mode: m2, raw: r2, .. },
        ) if r1 == r2 => {
            let (first, coeffs) = add_offset(c1, *m1, c2, *m2);
            Ok(CosineSeries { domain: *domain, coefficients: coeffs, first_mode: first, raw: *r1 })
        }
        (LegendreSeries { domain, coefficients: c1 }, LegendreSeries { coefficients: c2, .. }) => {
            let (_, coeffs) = add_offset(c1, 0, c2, 0);
            Ok(LegendreSeries { domain: *domain, coefficients: coeffs })
        }
        (
            LaguerreSeries { domain, coefficients: c1, sigma: s1 },
            LaguerreSeries { coefficients: c2, sigma: s2, .. },
        ) if s1 == s2 => {
            let (_, coeffs) = add_offset(c1, 0, c2, 0);
            Ok(LaguerreSeries { domain: *domain, coefficients: coeffs, sigma: *s1 })
        }
        (PolyExp { domain, coefficients: c1, rate: r1 }, PolyExp { coefficients: c2, rate: r2, .. })
            if r1 == r2 =>
        {
            let (_, coeffs) = add_offset(c1, 0, c2, 0);
            Ok(PolyExp { domain: *domain, coefficients: coeffs, rate: *r1 })
        }
        (
            LaplaceImage { domain, source, coefficients: c1, scale: s1 },
            LaplaceImage { source: src2, coefficients: c2, scale: s2, .. },
        ) if source == src2 => {
            let a: Vec<f64> = c1.iter().map(|c| c * s1).collect();
            let b: Vec<f64> = c2.iter().map(|c| c * s2).collect();
            let (_, coeffs) = add_offset(&a, 0, &b, 0);
            Ok(LaplaceImage { domain: *domain, source: *source, coefficients: coeffs, scale: 1.0 })
        }
        (GridSamples { domain, samples: s1 }, GridSamples { samples: s2, .. }) if s1.len() == s2.len() => {
            Ok(GridSamples { domain: *domain, samples: s1.iter().zip(s2).map(|(a, b)| a + b).collect() })
        }
        _ => Err(mismatch()),
    }
}

fn add_offset(c1: &[f64], m1: usize, c2: &[f64], m2: usize) -> (usize, Vec<f64>) {
    let first = m1.min(m2);
    let last = (m1 + c1.len()).max(m2 + c2.len());
    let mut out = vec![0.0; last - first];
    for (i, c) in c1.iter().enumerate() {
        out[m1 + i - first] += c;
    }
    for (i, c) in c2.iter().enumerate() {
        out[m2 + i - first] += c;
    }
    (first, out)
}

fn horner3(c: &[f64], x: f64) -> (f64, f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut ddp = 0.0;
    for &ck in c.iter().rev() {
        ddp = ddp * x + 2.0 * dp;
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp, ddp)
}

/// Value of the `order`-th derivative of an orthonormal Legendre series on `domain`.
pub fn legendre_series_eval(domain: Interval, coefficients: &[f64], x: f64, order: usize) -> f64 {
    let n = coefficients.len();
    let tables = legendre_table(n, domain.to_reference(x));
    let chain = (2.0 / domain.length()).powi(order as i32);
    let len = domain.length();
    neumaier_sum(
        coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((2 * k + 1) as f64 / len).sqrt() * tables[order.min(2)][k] * chain),
    )
}

/// Chebyshev–Lobatto points of `domain` in ascending order.
pub fn chebyshev_points(domain: Interval, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![domain.midpoint()];
    }
    (0..n)
        .map(|j| domain.from_reference(-(PI * j as f64 / (n - 1) as f64).cos()))
        .collect()
}

fn barycentric_weight(j: usize, n: usize) -> f64 {
    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
    if j == 0 || j == n - 1 {
        0.5 * s
    } else {
        s
    }
}

fn barycentric_eval(domain: Interval, samples: &[f64], x: f64) -> f64 {
    let n = samples.len();
    if n == 1 {
        return samples[0];
    }
    let pts = chebyshev_points(domain, n);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let d = x - pts[j];
        if d == 0.0 {
            return samples[j];
        }
        let w = barycentric_weight(j, n) / d;
        num += w * samples[j];
        den += w;
    }
    num / den
}

fn chebyshev_differentiate(domain: Interval, samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n == 1 {
        return vec![0.0];
    }
    let pts = chebyshev_points(domain, n);
    let mut out = vec![0.0; n];
    for i in 0..n {
        let wi = barycentric_weight(i, n);
        let mut acc = Vec::with_capacity(n);
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = barycentric_weight(j, n) / wi / (pts[i] - pts[j]);
            diag -= dij;
            acc.push(dij * samples[j]);
        }
        acc.push(diag * samples[i]);
        out[i] = neumaier_sum(acc);
    }
    out
}
