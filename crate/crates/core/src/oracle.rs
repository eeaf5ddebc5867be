//! Exhaustive enumeration of all symmetric vectors for small `m`.
//!
//! This module only counts. It shares no code with [`crate::exact`], so the
//! closed forms can be checked against it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{expand_unchecked, Involution, SymmetricVector};

/// Default cap on the number of vectors an enumeration may visit.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;

/// `m^(m/2)` if it fits in a `u64`.
fn count_vectors(m: usize) -> Option<u64> {
    (m as u64).checked_pow((m / 2) as u32)
}

fn check_limit(m: usize, limit: u64) -> Result<u64> {
    match count_vectors(m) {
        Some(n) if n <= limit => Ok(n),
        Some(n) => Err(Error::TooLarge {
            count: n.to_string(),
            limit,
        }),
        None => Err(Error::TooLarge {
            count: format!("{m}^{}", m / 2),
            limit,
        }),
    }
}

/// Iterator over every vector symmetric under `psi`, in lexicographic order of
/// the free half.
pub struct VectorIter<'a> {
    psi: &'a Involution,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for VectorIter<'_> {
    type Item = SymmetricVector;

    fn next(&mut self) -> Option<SymmetricVector> {
        if self.done {
            return None;
        }
        let out = expand_unchecked(&self.digits, self.psi);
        self.done = !advance(&mut self.digits, self.psi.m());
        Some(out)
    }
}

/// Mixed-radix increment, last digit fastest. Returns false on wrap-around.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn enumerate_vectors(psi: &Involution) -> Result<VectorIter<'_>> {
    enumerate_vectors_with_limit(psi, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_vectors_with_limit(psi: &Involution, limit: u64) -> Result<VectorIter<'_>> {
    check_limit(psi.m(), limit)?;
    Ok(VectorIter {
        psi,
        digits: vec![0; psi.half()],
        done: false,
    })
}

/// Raw integer sums of `m_k` and `m_k^2` over all symmetric vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub m: usize,
    pub f: usize,
    #[serde(with = "decimal")]
    pub total_vectors: u128,
    pub per_k: Vec<OracleRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub k: usize,
    #[serde(with = "decimal")]
    pub sum_mk: u128,
    #[serde(with = "decimal")]
    pub sum_mk_sq: u128,
}

impl OracleReport {
    pub fn row(&self, k: usize) -> Option<&OracleRow> {
        self.per_k.get(k)
    }

    /// Checks `sum_k sum_mk = m * N` and `sum_k k * sum_mk = m * N`; only
    /// meaningful when the report covers every `k` up to `m`.
    pub fn check_totals(&self) -> bool {
        let n = self.total_vectors * self.m as u128;
        let count: u128 = self.per_k.iter().map(|r| r.sum_mk).sum();
        let mass: u128 = self.per_k.iter().map(|r| r.k as u128 * r.sum_mk).sum();
        count == n && mass == n
    }
}

mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone)]
struct Tally {
    sums: Vec<u128>,
    squares: Vec<u128>,
}

impl Tally {
    fn new(len: usize) -> Self {
        Tally {
            sums: vec![0; len],
            squares: vec![0; len],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.sums.iter_mut().zip(other.sums) {
            *a += b;
        }
        for (a, b) in self.squares.iter_mut().zip(other.squares) {
            *a += b;
        }
        self
    }
}

/// Tally of every vector whose free half starts with `first`.
fn tally_prefix(psi: &Involution, first: usize, k_max: usize) -> Tally {
    let m = psi.m();
    let h = psi.half();
    let mut tally = Tally::new(k_max + 1);
    let mut digits = vec![0usize; h];
    digits[0] = first;
    let mut element_counts = vec![0u32; m];
    let mut profile = vec![0u64; m + 1];
    loop {
        element_counts.iter_mut().for_each(|c| *c = 0);
        for &v in &digits {
            element_counts[v] += 1;
            element_counts[psi.apply(v)] += 1;
        }
        profile.iter_mut().for_each(|c| *c = 0);
        for &c in &element_counts {
            profile[c as usize] += 1;
        }
        for (k, &mk) in profile[..=k_max].iter().enumerate() {
            let mk = mk as u128;
            tally.sums[k] += mk;
            tally.squares[k] += mk * mk;
        }
        if !advance(&mut digits[1..], m) {
            break;
        }
    }
    tally
}

pub fn oracle_report(psi: &Involution, k_max: usize) -> Result<OracleReport> {
    oracle_report_with_limit(psi, k_max, DEFAULT_ENUMERATION_LIMIT)
}

/// Enumerates all of `X_psi`, partitioned by the first free component.
/// `k_max` is clipped to `m`.
pub fn oracle_report_with_limit(psi: &Involution, k_max: usize, limit: u64) -> Result<OracleReport> {
    let total = check_limit(psi.m(), limit)?;
    let k_max = k_max.min(psi.m());
    let tally = (0..psi.m())
        .into_par_iter()
        .map(|first| tally_prefix(psi, first, k_max))
        .reduce(|| Tally::new(k_max + 1), Tally::merge);
    let per_k = (0..=k_max)
        .map(|k| OracleRow {
            k,
            sum_mk: tally.sums[k],
            sum_mk_sq: tally.squares[k],
        })
        .collect();
    Ok(OracleReport {
        m: psi.m(),
        f: psi.fixed_count(),
        total_vectors: total as u128,
        per_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::occurrence_profile;

    #[test]
    fn enumerate_examples() {
        let swap = Involution::validate(2, vec![1, 0]).unwrap();
        let all: Vec<_> = enumerate_vectors(&swap).unwrap().map(|x| x.entries().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1], vec![1, 0]]);

        let id = Involution::identity(2).unwrap();
        let all: Vec<_> = enumerate_vectors(&id).unwrap().map(|x| x.entries().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 0], vec![1, 1]]);

        let psi = Involution::canonical(4, 0).unwrap();
        let all: Vec<_> = enumerate_vectors(&psi).unwrap().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].entries(), &[0, 0, 1, 1]);
    }

    #[test]
    fn report_examples() {
        let psi = Involution::canonical(4, 0).unwrap();
        let r = oracle_report(&psi, 1).unwrap();
        assert_eq!((r.per_k[1].sum_mk, r.per_k[1].sum_mk_sq), (32, 128));

        let id = Involution::identity(2).unwrap();
        let r = oracle_report(&id, 0).unwrap();
        assert_eq!((r.per_k[0].sum_mk, r.per_k[0].sum_mk_sq), (2, 2));

        let swap = Involution::validate(2, vec![1, 0]).unwrap();
        let r = oracle_report(&swap, 1).unwrap();
        assert_eq!((r.per_k[1].sum_mk, r.per_k[1].sum_mk_sq), (4, 8));
    }

    #[test]
    fn report_agrees_with_iterator() {
        let psi = Involution::canonical(6, 2).unwrap();
        let report = oracle_report(&psi, 6).unwrap();
        let mut sums = [0u128; 7];
        let mut squares = [0u128; 7];
        for x in enumerate_vectors(&psi).unwrap() {
            let p = occurrence_profile(&x);
            for k in 0..=6 {
                sums[k] += p.get(k) as u128;
                squares[k] += (p.get(k) * p.get(k)) as u128;
            }
        }
        for k in 0..=6 {
            assert_eq!(report.per_k[k].sum_mk, sums[k]);
            assert_eq!(report.per_k[k].sum_mk_sq, squares[k]);
        }
        assert!(report.check_totals());
    }

    #[test]
    fn too_large() {
        let psi = Involution::canonical(20, 0).unwrap();
        assert!(matches!(enumerate_vectors(&psi), Err(Error::TooLarge { .. })));
        assert!(matches!(oracle_report(&psi, 1), Err(Error::TooLarge { .. })));
        let psi = Involution::canonical(4, 0).unwrap();
        assert!(enumerate_vectors_with_limit(&psi, 15).is_err());
        assert!(enumerate_vectors_with_limit(&psi, 16).is_ok());
    }

    #[test]
    fn report_json_uses_decimal_strings() {
        let psi = Involution::canonical(4, 0).unwrap();
        let r = oracle_report(&psi, 1).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""total_vectors":"16""#));
        assert!(s.contains(r#""sum_mk_sq":"128""#));
        let back: OracleReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
