//! Exact rational values of the occurrence average and second moment.
//!
//! With `h = m / 2` and `f` fixed points, the sum of `m_k(x)` over all
//! `m^h` symmetric vectors is
//!
//! ```text
//! (m - f) C(h, k) 2^k (m - 2)^(h - k)  +  [k even] f C(h, k/2) (m - 1)^(h - k/2)
//! ```
//!
//! and the sum of `m_k(x)^2` adds to that diagonal the off-diagonal pair counts
//!
//! ```text
//! pair   (m - f)              C(h, k) 2^k                        (m - 2)^(h - k)
//! free   (m - f)(m - f - 2)   C(h, k) 2^k C(h - k, k) 2^k        (m - 4)^(h - 2k)
//! mixed  2 f (m - f)          C(h, k/2) C(h - k/2, k) 2^k        (m - 3)^(h - 3k/2)   [k even]
//! fixed  f (f - 1)            C(h, k/2) C(h - k/2, k/2)          (m - 2)^(h - k)      [k even]
//! ```
//!
//! Each term is zero as soon as one of its binomials vanishes, which keeps
//! negative exponents and negative bases out of reach. `0^0 = 1`. The same
//! expressions hold at `k = 0`, where the index sets are empty.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::check_shape;

/// An exact rational that serializes as `{"num": "<decimal>", "den": "<decimal>"}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RationalRepr::deserialize(d)?;
        let num: BigInt = repr.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = repr.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

impl Rational {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Average, normalized second moment and variance of `m_k / m` over all symmetric vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactStats {
    pub a: Rational,
    pub s2_normalized: Rational,
    pub variance: Rational,
}

pub(crate) fn check_args(m: usize, f: usize, k: usize) -> Result<()> {
    check_shape(m, f)?;
    if k > m {
        return Err(Error::range(format!("k = {k} exceeds m = {m}")));
    }
    Ok(())
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn power(base: i64, exp: i64) -> BigInt {
    debug_assert!(exp >= 0, "negative exponent must sit behind a zero binomial");
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `coef * prod(binomials) * base^exp`, short-circuiting on a zero factor
/// before the power is touched.
fn term(coef: i64, binomials: &[(i64, i64)], scale: &BigInt, base: i64, exp: i64) -> BigInt {
    if coef == 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::from(coef) * scale;
    for &(n, k) in binomials {
        let b = binomial(n, k);
        if b.is_zero() {
            return BigInt::zero();
        }
        acc *= b;
    }
    acc * power(base, exp)
}

/// `sum over x of m_k(x)`.
pub fn sum_mk_exact(m: usize, f: usize, k: usize) -> Result<BigInt> {
    check_args(m, f, k)?;
    let (m, f, k) = (m as i64, f as i64, k as i64);
    let h = m / 2;
    let pow2k = BigInt::one() << k as usize;
    let mut total = term(m - f, &[(h, k)], &pow2k, m - 2, h - k);
    if k.is_even() {
        total += term(f, &[(h, k / 2)], &BigInt::one(), m - 1, h - k / 2);
    }
    Ok(total)
}

/// Exact `A(k, m)`: the mean of `m_k(x) / m` over all symmetric vectors.
pub fn average_exact(m: usize, f: usize, k: usize) -> Result<BigRational> {
    let sum = sum_mk_exact(m, f, k)?;
    Ok(BigRational::new(sum, vector_count(m) * BigInt::from(m)))
}

/// `m^(m/2)`, the number of symmetric vectors.
pub fn vector_count(m: usize) -> BigInt {
    num_traits::pow(BigInt::from(m), m / 2)
}

/// Exact `S2(k, m)`: the sum of `m_k(x)^2` over all symmetric vectors.
pub fn s2_exact(m: usize, f: usize, k: usize) -> Result<BigInt> {
    let diagonal = sum_mk_exact(m, f, k)?;
    let (m, f, k) = (m as i64, f as i64, k as i64);
    let h = m / 2;
    let free = m - f;
    let pow2k = BigInt::one() << k as usize;
    let pow4k = BigInt::one() << (2 * k) as usize;

    let mut total = diagonal;
    total += term(free, &[(h, k)], &pow2k, m - 2, h - k);
    total += term(free * (free - 2), &[(h, k), (h - k, k)], &pow4k, m - 4, h - 2 * k);
    if k.is_even() {
        let half_k = k / 2;
        total += term(2 * f * free, &[(h, half_k), (h - half_k, k)], &pow2k, m - 3, h - 3 * half_k);
        total += term(
            f * (f - 1),
            &[(h, half_k), (h - half_k, half_k)],
            &BigInt::one(),
            m - 2,
            h - k,
        );
    }
    Ok(total)
}

/// `S2(k, m) / m^(m/2 + 2)`, the mean of `(m_k(x) / m)^2`.
pub fn s2_normalized_exact(m: usize, f: usize, k: usize) -> Result<BigRational> {
    let s2 = s2_exact(m, f, k)?;
    let den = vector_count(m) * BigInt::from(m) * BigInt::from(m);
    Ok(BigRational::new(s2, den))
}

/// Variance of `m_k / m` about its exact mean.
pub fn variance_exact(m: usize, f: usize, k: usize) -> Result<BigRational> {
    let a = average_exact(m, f, k)?;
    let s2n = s2_normalized_exact(m, f, k)?;
    let var = s2n - &a * &a;
    debug_assert!(!var.is_negative());
    Ok(var)
}

pub fn exact_stats(m: usize, f: usize, k: usize) -> Result<ExactStats> {
    let a = average_exact(m, f, k)?;
    let s2n = s2_normalized_exact(m, f, k)?;
    let variance = &s2n - &a * &a;
    Ok(ExactStats {
        a: a.into(),
        s2_normalized: s2n.into(),
        variance: variance.into(),
    })
}

/// Mean squared deviation of `m_k / m` from `center`: `Var + (A - center)^2`.
///
/// With `center = main_term(k, f / m)` this is the second moment about the
/// limiting density.
pub fn second_moment_about(m: usize, f: usize, k: usize, center: f64) -> Result<f64> {
    if !center.is_finite() {
        return Err(Error::range("center must be finite"));
    }
    let a = average_exact(m, f, k)?;
    let var = variance_exact(m, f, k)?;
    let a = a.to_f64().unwrap_or(f64::NAN);
    let var = var.to_f64().unwrap_or(f64::NAN);
    Ok(var + (a - center) * (a - center))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn average_examples() {
        assert_eq!(average_exact(2, 0, 1).unwrap(), q(1, 1));
        assert_eq!(average_exact(4, 0, 1).unwrap(), q(1, 2));
        assert_eq!(average_exact(2, 2, 0).unwrap(), q(1, 2));
        assert_eq!(average_exact(4, 0, 0).unwrap(), q(1, 4));
    }

    #[test]
    fn s2_examples() {
        assert_eq!(s2_exact(4, 0, 1).unwrap(), BigInt::from(128));
        assert_eq!(s2_exact(2, 0, 1).unwrap(), BigInt::from(8));
        assert_eq!(s2_exact(2, 2, 0).unwrap(), BigInt::from(2));
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_exact(4, 0, 1).unwrap(), q(1, 4));
        assert!(variance_exact(2, 0, 1).unwrap().is_zero());
        assert!(variance_exact(2, 2, 0).unwrap().is_zero());
    }

    #[test]
    fn second_moment_examples() {
        assert!((second_moment_about(4, 0, 1, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((second_moment_about(4, 0, 1, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let e_inv = (-1.0f64).exp();
        let v = second_moment_about(2, 0, 1, e_inv).unwrap();
        assert!((v - (1.0 - e_inv).powi(2)).abs() < 1e-15);
        assert!((v - 0.39958).abs() < 1e-5);
        assert!(second_moment_about(2, 0, 1, f64::NAN).is_err());
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(average_exact(4, 1, 0), Err(Error::ParityMismatch { .. })));
        assert!(matches!(average_exact(4, 0, 5), Err(Error::Range(_))));
        assert!(matches!(s2_exact(5, 1, 0), Err(Error::OddSize { .. })));
        assert!(matches!(variance_exact(4, 6, 0), Err(Error::Range(_))));
    }

    #[test]
    fn identity_has_no_odd_support() {
        for m in (2..=20).step_by(2) {
            for k in (1..=m).step_by(2) {
                assert!(average_exact(m, m, k).unwrap().is_zero(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn rational_json_shape() {
        let r = Rational(q(-3, 4));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":"-3","den":"4"}"#);
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Rational>(r#"{"num":"1","den":"0"}"#).is_err());
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert!(binomial(3, 4).is_zero());
        assert!(binomial(-1, 0).is_zero());
        assert!(binomial(3, -1).is_zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }
}
