//! Occurrence statistics of `n! mod p` and the inversion involution on `(Z/p)*`.
//!
//! Residue class `c` in `1..p` is element id `c - 1`, so the universe has
//! `m = p - 1` elements. The factorial sequence is not claimed to be
//! symmetric under inversion; [`poisson_comparison`] only sets its empirical
//! profile beside the model's limiting densities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::asymptotic::main_term;
use crate::error::{Error, Result};
use crate::model::{Involution, OccurrenceProfile};

/// Largest supported modulus, the Mersenne prime `2^61 - 1`.
pub const MAX_MODULUS: u64 = (1 << 61) - 1;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if p < 3 {
        return Err(Error::range(format!("p = {p} must be at least 3")));
    }
    if p > MAX_MODULUS {
        return Err(Error::range(format!("p = {p} exceeds 2^61 - 1")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime { p });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorialProfile {
    pub p: u64,
    /// `n! mod p` for `n = 1..p-1`.
    pub residues: Vec<u64>,
    /// Occurrence profile over the `p - 1` nonzero classes.
    pub profile: OccurrenceProfile,
    pub distinct_count: u64,
    /// `(p - 1)! == p - 1 (mod p)`.
    pub wilson_holds: bool,
}

impl FactorialProfile {
    pub fn m(&self) -> usize {
        self.residues.len()
    }
}

pub fn factorial_profile(p: u64) -> Result<FactorialProfile> {
    check_prime(p)?;
    let m = (p - 1) as usize;
    let mut residues = Vec::with_capacity(m);
    let mut acc = 1u64;
    for n in 1..p {
        acc = mul_mod(acc, n, p);
        residues.push(acc);
    }
    let mut counts = vec![0u32; m];
    for &r in &residues {
        counts[(r - 1) as usize] += 1;
    }
    let profile = OccurrenceProfile::from_element_counts(&counts);
    let distinct_count = m as u64 - profile.absent();
    let wilson_holds = residues.last() == Some(&(p - 1));
    Ok(FactorialProfile {
        p,
        residues,
        profile,
        distinct_count,
        wilson_holds,
    })
}

/// `x -> x^-1 (mod p)` on ids `0..p-1` (id `i` is class `i + 1`).
pub fn inverse_involution(p: u64) -> Result<Involution> {
    check_prime(p)?;
    let m = (p - 1) as usize;
    let map = (1..p).map(|c| (pow_mod(c, p - 2, p) - 1) as usize).collect();
    Involution::validate(m, map)
}

/// `floor(0.9 * sqrt(2p))`, a loose floor under the number of distinct factorials.
pub fn distinct_floor(p: u64) -> u64 {
    (0.9 * (2.0 * p as f64).sqrt()).floor() as u64
}

/// Logs a warning when the distinct-count floor is violated. Returns whether it held.
pub fn soft_check_distinct(profile: &FactorialProfile) -> bool {
    let floor = distinct_floor(profile.p);
    let ok = profile.distinct_count >= floor;
    if !ok {
        log::warn!(
            "p = {}: {} distinct factorials, below the expected floor {}",
            profile.p,
            profile.distinct_count,
            floor
        );
    }
    ok
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub k: usize,
    pub m_k: u64,
    pub empirical_ratio: f64,
    pub model_ratio: f64,
    pub abs_gap: f64,
}

/// Empirical `m_k / (p - 1)` next to `main_term(k, 2 / (p - 1))`, for
/// `k <= k_max` (clipped to `p - 1`). A juxtaposition, not a test.
pub fn poisson_comparison(profile: &FactorialProfile, k_max: usize) -> Vec<PoissonRow> {
    let m = profile.m();
    let theta = 2.0 / m as f64;
    (0..=k_max.min(m))
        .map(|k| {
            let m_k = profile.profile.get(k);
            let empirical_ratio = m_k as f64 / m as f64;
            let model_ratio = main_term(k, theta.min(1.0)).expect("theta in range");
            PoissonRow {
                k,
                m_k,
                empirical_ratio,
                model_ratio,
                abs_gap: (empirical_ratio - model_ratio).abs(),
            }
        })
        .collect()
}

/// One row per `k`, then a summary row with the distinct count and Wilson check.
pub fn write_csv<W: Write>(profile: &FactorialProfile, rows: &[PoissonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "row",
        "p",
        "k",
        "m_k",
        "empirical_ratio",
        "model_ratio",
        "abs_gap",
        "distinct_count",
        "wilson_holds",
    ])?;
    for r in rows {
        w.write_record([
            "k".to_string(),
            profile.p.to_string(),
            r.k.to_string(),
            r.m_k.to_string(),
            r.empirical_ratio.to_string(),
            r.model_ratio.to_string(),
            r.abs_gap.to_string(),
            String::new(),
            String::new(),
        ])?;
    }
    w.write_record([
        "summary".to_string(),
        profile.p.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        profile.distinct_count.to_string(),
        profile.wilson_holds.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}
