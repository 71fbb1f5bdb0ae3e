//! Special functions and summation helpers shared by the operator modules.

/// Neumaier (improved Kahan) compensated sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `sin(x) / x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Values, first and second derivatives of the Legendre polynomials `P_0..P_{n-1}` at `u`.
pub fn legendre_table(n: usize, u: f64) -> [Vec<f64>; 3] {
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut ddp = vec![0.0; n];
    if n == 0 {
        return [p, dp, ddp];
    }
    p[0] = 1.0;
    if n > 1 {
        p[1] = u;
        dp[1] = 1.0;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * u * p[k] - kf * p[k - 1]) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same again for P''.
        dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
        ddp[k + 1] = ddp[k - 1] + (2.0 * kf + 1.0) * dp[k];
    }
    [p, dp, ddp]
}

/// Laguerre functions `√(2σ) L_k(2σt) e^{-σt}` (orthonormal on `[0, ∞)`) and their
/// first two derivatives in `t`, for `k < n`.
pub fn laguerre_function_table(n: usize, sigma: f64, t: f64) -> [Vec<f64>; 3] {
    let x = 2.0 * sigma * t;
    let mut l = vec![0.0; n];
    let mut dl = vec![0.0; n];
    let mut ddl = vec![0.0; n];
    if n > 0 {
        l[0] = 1.0;
    }
    if n > 1 {
        l[1] = 1.0 - x;
        dl[1] = -1.0;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let c = 2.0 * kf + 1.0 - x;
        l[k + 1] = (c * l[k] - kf * l[k - 1]) / (kf + 1.0);
        dl[k + 1] = (c * dl[k] - l[k] - kf * dl[k - 1]) / (kf + 1.0);
        ddl[k + 1] = (c * ddl[k] - 2.0 * dl[k] - kf * ddl[k - 1]) / (kf + 1.0);
    }
    let e = (2.0 * sigma).sqrt() * (-sigma * t).exp();
    let s = 2.0 * sigma;
    let mut v = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for k in 0..n {
        // d/dt [L(2σt) e^{-σt}] = (s L' - σ L) e^{-σt}
        v[k] = e * l[k];
        d1[k] = e * (s * dl[k] - sigma * l[k]);
        d2[k] = e * (s * s * ddl[k] - 2.0 * sigma * s * dl[k] + sigma * sigma * l[k]);
    }
    [v, d1, d2]
}

/// Spherical Bessel functions `j_0..j_{n-1}` at `x`, by power series.
///
/// Intended for `|x| ≲ 2`, where every term is accurate to full relative precision
/// even when `j_k(x)` is far below the unit roundoff.
pub fn spherical_bessel_small(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let half_x2 = -0.5 * x * x;
    let mut prefactor = 1.0; // x^k / (2k+1)!!
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            prefactor *= x / (2.0 * k as f64 + 1.0);
        }
        if prefactor == 0.0 {
            break;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= half_x2 / (m as f64 * (2.0 * (k + m) as f64 + 1.0));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        *slot = prefactor * sum;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn legendre_table_matches_closed_forms() {
        let u = 0.3;
        let [p, dp, ddp] = legendre_table(5, u);
        assert!((p[2] - 0.5 * (3.0 * u * u - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * u.powi(3) - 3.0 * u)).abs() < 1e-15);
        assert!((dp[3] - 0.5 * (15.0 * u * u - 3.0)).abs() < 1e-14);
        assert!((ddp[3] - 15.0 * u).abs() < 1e-14);
        assert!((ddp[4] - (105.0 * u * u - 15.0) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn spherical_bessel_low_orders() {
        for &x in &[0.2, 0.7, 1.0] {
            let j = spherical_bessel_small(3, x);
            let j0 = x.sin() / x;
            let j1 = x.sin() / (x * x) - x.cos() / x;
            let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
            assert!((j[0] - j0).abs() < 1e-15);
            assert!((j[1] - j1).abs() < 1e-12 * j1.abs().max(1e-3));
            assert!((j[2] - j2).abs() < 1e-9 * j2.abs().max(1e-9));
        }
        // The closed forms cancel badly for tiny x; use the leading Taylor terms there.
        let x: f64 = 1e-3;
        let j = spherical_bessel_small(3, x);
        assert!((j[1] / (x / 3.0 - x.powi(3) / 30.0) - 1.0).abs() < 1e-14);
        assert!((j[2] / (x * x / 15.0 - x.powi(4) / 210.0) - 1.0).abs() < 1e-14);
        // j_k(x) ~ x^k / (2k+1)!! far below the roundoff.
        let j = spherical_bessel_small(31, 0.5);
        let mut df = 1.0;
        for i in (1..=61).step_by(2) {
            df *= i as f64;
        }
        assert!((j[30] / (0.5f64.powi(30) / df) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn laguerre_functions_orthonormal() {
        let g = crate::grid::make_grid(crate::grid::HalfLineDomain::new(60.0, 8).unwrap(), 512).unwrap();
        let n = 12;
        let tables: Vec<_> = g.nodes.iter().map(|&t| laguerre_function_table(n, 1.5, t)).collect();
        for i in 0..n {
            for j in 0..n {
                let ip = g.integrate(&tables.iter().map(|tb| tb[0][i] * tb[0][j]).collect::<Vec<_>>());
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12, "{i} {j} {ip}");
            }
        }
    }

    #[test]
    fn laguerre_derivatives_match_finite_differences() {
        let h = 1e-5;
        let t = 0.8;
        let [_, d1, d2] = laguerre_function_table(6, 1.2, t);
        let p = laguerre_function_table(6, 1.2, t + h);
        let m = laguerre_function_table(6, 1.2, t - h);
        let c = laguerre_function_table(6, 1.2, t);
        for k in 0..6 {
            let fd1 = (p[0][k] - m[0][k]) / (2.0 * h);
            let fd2 = (p[0][k] - 2.0 * c[0][k] + m[0][k]) / (h * h);
            assert!((fd1 - d1[k]).abs() < 1e-8);
            assert!((fd2 - d2[k]).abs() < 1e-4);
        }
    }
}
