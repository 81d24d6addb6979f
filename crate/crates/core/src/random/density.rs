//! Limiting eigenvalue densities of `rho^(M)` for random states, their CDFs,
//! and the constants of the small-c entropy expansion.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fock::binomial;

/// Mean, width and Marčenko-Pastur edges of the nonzero block of `rho^(M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticCurve {
    pub mu: f64,
    pub sigma: f64,
    pub c: f64,
    pub xi_minus: f64,
    pub xi_plus: f64,
}

impl AnalyticCurve {
    pub fn new(mu: f64, c: f64) -> Self {
        let s = 1.0 / c.sqrt();
        Self {
            mu,
            sigma: mu * c.sqrt(),
            c,
            xi_minus: (1.0 - s).powi(2),
            xi_plus: (1.0 + s).powi(2),
        }
    }

    /// Support `[mu c xi_-, mu c xi_+]` of the rescaled law.
    pub fn support(&self) -> (f64, f64) {
        (
            self.mu * self.c * self.xi_minus,
            self.mu * self.c * self.xi_plus,
        )
    }
}

/// The cut `min(M, N - M)`, for which `c <= 1`.
pub fn effective_cut(n: usize, m: usize) -> usize {
    m.min(n - m)
}

fn check_cut(d: usize, n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n || n > d {
        return Err(invalid(format!(
            "need 1 <= M <= N - 1 and N <= D, got (D, N, M) = ({d}, {n}, {m})"
        )));
    }
    Ok(())
}

/// `mu = C(N,M)/C(D,M')`, `c = C(D,M')/C(D,N-M')` with `M' = min(M, N-M)`.
pub fn predicted_moments(d: usize, n: usize, m: usize) -> Result<AnalyticCurve> {
    check_cut(d, n, m)?;
    let mp = effective_cut(n, m);
    let mu = binomial(n, mp) as f64 / binomial(d, mp) as f64;
    let c = binomial(d, mp) as f64 / binomial(d, n - mp) as f64;
    Ok(AnalyticCurve::new(mu, c))
}

/// Leading-order mean entropy: `S_max - C(N,M) c / 2`, which at `c = 1`
/// is `S_max - C(N,M) / 2`.
pub fn mean_entropy_prediction(d: usize, n: usize, m: usize) -> Result<f64> {
    check_cut(d, n, m)?;
    if 2 * m > n {
        return Err(invalid(format!(
            "prediction needs M <= N/2, got M = {m}, N = {n}"
        )));
    }
    let curve = predicted_moments(d, n, m)?;
    Ok(crate::dm::max_entropy(d, n, m) - binomial(n, m) as f64 * curve.c / 2.0)
}

/// `(1/2 pi y) sqrt((y - xi_-)(xi_+ - y))` on `[xi_-, xi_+]`.
pub fn mp_density(y: f64, c: f64) -> f64 {
    let curve = AnalyticCurve::new(1.0, c);
    if y <= curve.xi_minus || y >= curve.xi_plus || y <= 0.0 {
        return 0.0;
    }
    ((y - curve.xi_minus) * (curve.xi_plus - y)).sqrt() / (2.0 * PI * y)
}

/// Marčenko-Pastur law rescaled to mean `mu` and width `mu sqrt(c)`.
pub fn twl_density_with(z: f64, mu: f64, c: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    // P(z) dz = P_MP(y) dy with y = z / (mu c)
    mp_density(z / (mu * c), c) / (mu * c)
}

pub fn twl_density(z: f64, d: usize, n: usize, m: usize) -> Result<f64> {
    let curve = predicted_moments(d, n, m)?;
    Ok(twl_density_with(z, curve.mu, curve.c))
}

pub fn semicircle_density(z: f64, mu: f64, sigma: f64) -> f64 {
    let r2 = 4.0 * sigma * sigma - (z - mu).powi(2);
    if r2 <= 0.0 {
        return 0.0;
    }
    r2.sqrt() / (2.0 * PI * sigma * sigma)
}

pub fn c1_density(z: f64, mu: f64) -> f64 {
    if z <= 0.0 || z >= 4.0 * mu {
        return 0.0;
    }
    (z * (4.0 * mu - z)).sqrt() / (2.0 * PI * mu * z)
}

pub fn semicircle_cdf(z: f64, mu: f64, sigma: f64) -> f64 {
    let u = (z - mu) / (2.0 * sigma);
    if u <= -1.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI
}

/// Tabulated CDF of the rescaled Marčenko-Pastur law.
///
/// With `y = xi_- + (xi_+ - xi_-) sin^2 t` the integrand in `t` is
/// `(xi_+ - xi_-)^2 sin^2(2t) / (4 pi y)`, smooth on `[0, pi/2]`, so a
/// composite Simpson table is accurate to well below 1e-9.
#[derive(Clone, Debug)]
pub struct TwlCdf {
    curve: AnalyticCurve,
    table: Vec<f64>,
}

const CDF_CELLS: usize = 4096;

impl TwlCdf {
    pub fn new(mu: f64, c: f64) -> Self {
        let curve = AnalyticCurve::new(mu, c);
        let (a, b) = (curve.xi_minus, curve.xi_plus);
        let g = |t: f64| {
            let s = t.sin();
            let y = a + (b - a) * s * s;
            if y <= 0.0 {
                // t = 0 with xi_- = 0 (c = 1): the limit of the expression below
                return (b - a) / PI * t.cos().powi(2);
            }
            (b - a).powi(2) * (2.0 * t).sin().powi(2) / (4.0 * PI * y)
        };
        let h = PI / 2.0 / CDF_CELLS as f64;
        let mut table = Vec::with_capacity(CDF_CELLS + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 0..CDF_CELLS {
            let t0 = i as f64 * h;
            acc += h / 6.0 * (g(t0) + 4.0 * g(t0 + h / 2.0) + g(t0 + h));
            table.push(acc);
        }
        Self { curve, table }
    }

    /// Total mass of the table, 1 up to discretisation error.
    pub fn total(&self) -> f64 {
        self.table[CDF_CELLS]
    }

    pub fn eval(&self, z: f64) -> f64 {
        let (lo, hi) = self.curve.support();
        if z <= lo {
            return 0.0;
        }
        if z >= hi {
            return 1.0;
        }
        let t = ((z - lo) / (hi - lo)).sqrt().asin();
        let pos = t / (PI / 2.0) * CDF_CELLS as f64;
        let i = (pos.floor() as usize).min(CDF_CELLS - 1);
        let f = pos - i as f64;
        (self.table[i] * (1.0 - f) + self.table[i + 1] * f) / self.total()
    }
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |worst, (i, &x)| {
        let f = cdf(x);
        worst
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs())
    })
}

/// Absolute-error target for the quadratures below.
pub const QUAD_TOL: f64 = 1e-10;

/// `int_a^b f` by double-exponential quadrature.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > tol.max(1e-7) {
        return Err(Error::NumericalFailure(format!(
            "quadrature did not converge (estimate {:e})",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// Scaled `c = 1` law on `[0, 1]`: `(4 / 2 pi x) sqrt(x (1 - x))`.
pub fn unit_c1_density(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    2.0 * (x * (1.0 - x)).sqrt() / (PI * x)
}

/// `int_0^1 f` after `x = sin^2 t`, which removes `x^(-1/2)` and
/// `(1-x)^(-1/2)` endpoint behaviour.
pub fn integrate_unit(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    integrate(
        |t: f64| {
            let x = t.sin().powi(2);
            if x <= 0.0 || x >= 1.0 {
                return 0.0;
            }
            f(x) * (2.0 * t).sin()
        },
        0.0,
        PI / 2.0,
        tol,
    )
}

/// `a_1 = (1/4) <x>` under [`unit_c1_density`]; equals 1/16.
pub fn compute_a1() -> Result<f64> {
    Ok(integrate_unit(|x| x * unit_c1_density(x), QUAD_TOL)? / 4.0)
}

/// `a_2 = (1/4) <x ln x>` under [`unit_c1_density`], about -0.055393.
pub fn compute_a2() -> Result<f64> {
    Ok(integrate_unit(|x| x * x.ln() * unit_c1_density(x), QUAD_TOL)? / 4.0)
}
