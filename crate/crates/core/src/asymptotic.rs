//! Limiting densities, log-domain evaluation for large `m`, Chebyshev
//! lower bounds and the witness-threshold constants.

use std::f64::consts::{E, LN_2};

use serde::{Deserialize, Serialize};
use statrs::function::factorial;

use crate::error::{Error, Result};
use crate::exact::{self, check_args};

/// Scalar parameters of the large-`m` regime.
///
/// `eta` only describes how closely the fixed-point count tracks `theta * m`.
/// Every computation here takes the exact count `f`, so `eta` is carried for
/// validation and reporting but never changes a computed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParams {
    pub theta: f64,
    pub eta: f64,
    pub delta: f64,
    pub dlt: f64,
    pub mu: f64,
}

impl Default for AsymptoticParams {
    fn default() -> Self {
        AsymptoticParams {
            theta: 0.0,
            eta: 0.0,
            delta: 0.25,
            dlt: 0.1,
            mu: 0.01,
        }
    }
}

impl AsymptoticParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::range(format!("theta = {} is outside [0, 1]", self.theta)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::range(format!("eta = {} is outside [0, 1)", self.eta)));
        }
        if [self.delta, self.dlt, self.mu].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::range("delta, dlt and mu must be positive"));
        }
        if 2.0 * self.delta + self.eta >= 1.0 {
            return Err(Error::range(format!(
                "2 * delta + eta = {} must be below 1",
                2.0 * self.delta + self.eta
            )));
        }
        Ok(())
    }

    /// Window `m^(-delta)`.
    pub fn window(&self, m: usize) -> f64 {
        (m as f64).powf(-self.delta)
    }
}

/// Limiting density of elements occurring exactly `k` times:
/// `(1 - theta) / (e k!)`, plus `theta / (e^(1/2) 2^(k/2) (k/2)!)` for even `k`.
pub fn main_term(k: usize, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::range(format!("theta = {theta} is outside [0, 1]")));
    }
    let mut v = (1.0 - theta) * (-1.0 - factorial::ln_factorial(k as u64)).exp();
    if k.is_multiple_of(2) {
        let j = (k / 2) as u64;
        v += theta * (-0.5 - j as f64 * LN_2 - factorial::ln_factorial(j)).exp();
    }
    Ok(v)
}

/// `ln C(n, k)`, or `None` when the binomial vanishes.
pub fn ln_binomial(n: i64, k: i64) -> Option<f64> {
    if n < 0 || k < 0 || k > n {
        return None;
    }
    let short = k.min(n - k);
    if short <= 64 {
        Some(
            (0..short)
                .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
                .sum(),
        )
    } else {
        Some(factorial::ln_binomial(n as u64, k as u64))
    }
}

/// `coef * prod C(n_i, k_i) * e^ln_rest * (1 - deficit/m)^exp`, evaluated as a
/// single exponential of a summed logarithm.
fn scaled(coef: f64, binomials: &[(i64, i64)], ln_rest: f64, m: i64, deficit: i64, exp: i64) -> f64 {
    if coef == 0.0 {
        return 0.0;
    }
    let mut ln = coef.ln() + ln_rest;
    for &(n, k) in binomials {
        match ln_binomial(n, k) {
            Some(b) => ln += b,
            None => return 0.0,
        }
    }
    if exp != 0 {
        debug_assert!(exp > 0 && deficit <= m);
        if deficit >= m {
            return 0.0;
        }
        ln += exp as f64 * (-(deficit as f64) / m as f64).ln_1p();
    }
    ln.exp()
}

/// Floating-point `A(k, m)` via logarithms; stable for `m` in the millions.
pub fn average_log(m: usize, f: usize, k: usize) -> Result<f64> {
    check_args(m, f, k)?;
    let (m, f, k) = (m as i64, f as i64, k as i64);
    let h = m / 2;
    let mf = m as f64;
    let ln_2_over_m = (2.0 / mf).ln();
    let mut a = scaled((m - f) as f64 / mf, &[(h, k)], k as f64 * ln_2_over_m, m, 2, h - k);
    if k % 2 == 0 {
        let j = k / 2;
        a += scaled(f as f64 / mf, &[(h, j)], -(j as f64) * mf.ln(), m, 1, h - j);
    }
    Ok(a)
}

/// Floating-point `S2(k, m) / m^(m/2 + 2)`.
pub fn s2_normalized_log(m: usize, f: usize, k: usize) -> Result<f64> {
    let a = average_log(m, f, k)?;
    let (m, f, k) = (m as i64, f as i64, k as i64);
    let h = m / 2;
    let mf = m as f64;
    let m2 = mf * mf;
    let free = (m - f) as f64;
    let ln_2_over_m = (2.0 / mf).ln();

    let mut s = a / mf;
    s += scaled(free / m2, &[(h, k)], k as f64 * ln_2_over_m, m, 2, h - k);
    s += scaled(
        free * (free - 2.0) / m2,
        &[(h, k), (h - k, k)],
        2.0 * k as f64 * ln_2_over_m,
        m,
        4,
        h - 2 * k,
    );
    if k % 2 == 0 {
        let j = k / 2;
        s += scaled(
            2.0 * f as f64 * free / m2,
            &[(h, j), (h - j, k)],
            k as f64 * LN_2 - 3.0 * j as f64 * mf.ln(),
            m,
            3,
            h - 3 * j,
        );
        s += scaled(
            (f * (f - 1)) as f64 / m2,
            &[(h, j), (h - j, j)],
            -(k as f64) * mf.ln(),
            m,
            2,
            h - k,
        );
    }
    Ok(s)
}

/// Log-domain counterpart of [`exact::second_moment_about`].
pub fn second_moment_log(m: usize, f: usize, k: usize, center: f64) -> Result<f64> {
    if !center.is_finite() {
        return Err(Error::range("center must be finite"));
    }
    let a = average_log(m, f, k)?;
    let var = (s2_normalized_log(m, f, k)? - a * a).max(0.0);
    Ok(var + (a - center) * (a - center))
}

/// Chooses between the exact and the log-domain second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChebyshevConfig {
    /// Largest `m` evaluated with exact rationals.
    pub exact_max_m: usize,
}

impl Default for ChebyshevConfig {
    fn default() -> Self {
        ChebyshevConfig { exact_max_m: 64 }
    }
}

impl ChebyshevConfig {
    pub fn second_moment(&self, m: usize, f: usize, k: usize, center: f64) -> Result<f64> {
        if m <= self.exact_max_m {
            exact::second_moment_about(m, f, k, center)
        } else {
            second_moment_log(m, f, k, center)
        }
    }

    /// Lower bound on the fraction of vectors with `|m_k/m - main_term| < dlt`.
    pub fn bound(&self, m: usize, f: usize, k: usize, dlt: f64) -> Result<f64> {
        if !(dlt.is_finite() && dlt > 0.0) {
            return Err(Error::range(format!("window {dlt} must be positive and finite")));
        }
        check_args(m, f, k)?;
        let center = main_term(k, f as f64 / m as f64)?;
        let moment = self.second_moment(m, f, k, center)?;
        Ok((1.0 - moment / (dlt * dlt)).max(0.0))
    }
}

/// `max(0, 1 - M(k, m) / dlt^2)` with the default switchover.
pub fn chebyshev_bound(m: usize, f: usize, k: usize, dlt: f64) -> Result<f64> {
    ChebyshevConfig::default().bound(m, f, k, dlt)
}

/// `E(k) = e^-1 * sum_{j <= k} 1/j!`, the Poisson(1) distribution function.
pub fn e_cumulative(k: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term /= j as f64;
        sum += term;
    }
    (sum / E).min(1.0)
}

/// Size fraction above which a witness pair with occurrence caps `(r, s)` is
/// forced: `(3 - (1 - mu)(E(r) + E(s))) / 2`.
pub fn threshold_c(r: usize, s: usize, mu: f64) -> Result<f64> {
    if r + s == 0 {
        return Err(Error::range("r + s must be at least 1"));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::range(format!("mu = {mu} is outside (0, 1)")));
    }
    Ok((3.0 - (1.0 - mu) * (e_cumulative(r) + e_cumulative(s))) / 2.0)
}

/// `1/2 + 1/e`, the exact density at which a present pair `y, phi(y)` becomes unavoidable.
pub fn theorem3_threshold() -> f64 {
    0.5 + 1.0 / E
}
