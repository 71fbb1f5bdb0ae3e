//! Domains and Gauss–Legendre quadrature grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest grid accepted by dense operator assembly.
pub const MAX_GRID: usize = 1024;

/// A bounded interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return invalid(format!("degenerate interval [{a}, {b}]"));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn symmetric() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Affine map from `[-1, 1]` onto this interval.
    pub fn from_reference(&self, u: f64) -> f64 {
        self.midpoint() + self.half_width() * u
    }

    pub fn to_reference(&self, x: f64) -> f64 {
        (x - self.midpoint()) / self.half_width()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.a < other.b && other.a < self.b
    }
}

/// The half line `[0, ∞)` truncated at `s_max` and split into graded panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineDomain {
    pub s_max: f64,
    pub panel_count: usize,
}

impl HalfLineDomain {
    pub fn new(s_max: f64, panel_count: usize) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return invalid(format!("half-line truncation must be positive, got {s_max}"));
        }
        if panel_count == 0 {
            return invalid("half-line domain needs at least one panel");
        }
        Ok(Self { s_max, panel_count })
    }

    /// Default truncation for a Laplace pair on `[a, b]`: `40 / a` with 8 panels.
    pub fn for_laplace(ab: &Interval) -> Result<Self> {
        if ab.a <= 0.0 {
            return invalid(format!("Laplace interval needs a > 0, got a = {}", ab.a));
        }
        Self::new(40.0 / ab.a, 8)
    }

    pub fn as_interval(&self) -> Interval {
        Interval { a: 0.0, b: self.s_max }
    }

    /// Panel edges, geometrically graded toward 0 with ratio 1/2.
    pub fn panel_edges(&self) -> Vec<f64> {
        let p = self.panel_count;
        let mut edges = Vec::with_capacity(p + 1);
        edges.push(0.0);
        for i in 1..=p {
            edges.push(self.s_max * 0.5f64.powi((p - i) as i32));
        }
        edges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridDomain {
    Interval(Interval),
    HalfLine(HalfLineDomain),
}

impl GridDomain {
    /// The bounded interval the nodes live in.
    pub fn span(&self) -> Interval {
        match self {
            GridDomain::Interval(i) => *i,
            GridDomain::HalfLine(h) => h.as_interval(),
        }
    }
}

impl From<Interval> for GridDomain {
    fn from(i: Interval) -> Self {
        GridDomain::Interval(i)
    }
}

impl From<HalfLineDomain> for GridDomain {
    fn from(h: HalfLineDomain) -> Self {
        GridDomain::HalfLine(h)
    }
}

/// Quadrature nodes and weights; the discrete stand-in for the L² pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: GridDomain,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span(&self) -> Interval {
        self.domain.span()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        crate::special::neumaier_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        crate::special::neumaier_sum(self.nodes.iter().zip(&self.weights).map(|(&x, w)| w * f(x)))
    }

    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        // Tricomi initial guess for the (i+1)-th largest root.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre grid on an interval, or composite graded panels on a half line.
///
/// For a half line `n` is the total node count, split evenly (rounded up) across panels.
pub fn make_grid(domain: impl Into<GridDomain>, n: usize) -> Result<QuadGrid> {
    let domain = domain.into();
    if n == 0 {
        return invalid("grid size must be positive");
    }
    match domain {
        GridDomain::Interval(iv) => {
            Interval::new(iv.a, iv.b)?;
            let (u, w) = gauss_legendre(n);
            let h = iv.half_width();
            Ok(QuadGrid {
                nodes: u.iter().map(|&u| iv.from_reference(u)).collect(),
                weights: w.iter().map(|w| w * h).collect(),
                domain,
            })
        }
        GridDomain::HalfLine(hl) => {
            HalfLineDomain::new(hl.s_max, hl.panel_count)?;
            let per_panel = n.div_ceil(hl.panel_count);
            let (u, w) = gauss_legendre(per_panel);
            let edges = hl.panel_edges();
            let mut nodes = Vec::with_capacity(per_panel * hl.panel_count);
            let mut weights = Vec::with_capacity(per_panel * hl.panel_count);
            for pair in edges.windows(2) {
                let panel = Interval { a: pair[0], b: pair[1] };
                for (&ui, &wi) in u.iter().zip(&w) {
                    nodes.push(panel.from_reference(ui));
                    weights.push(wi * panel.half_width());
                }
            }
            Ok(QuadGrid { nodes, weights, domain })
        }
    }
}
