//! Element universe, involutions, mirror-symmetric vectors and occurrence counts.
//!
//! Elements are the integers `0..m`. A vector `x` of length `m` is
//! symmetric under an involution `psi` when `x[m - 1 - j] == psi(x[j])` for
//! every `j`, so it is fully determined by its first `m / 2` entries (the
//! free half). The 0-based mirror `m - 1 - j` corresponds to the 1-based
//! `m + 1 - j`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A self-inverse permutation of `0..m` with `m` even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Involution {
    map: Vec<usize>,
    fixed_count: usize,
}

/// On-disk form of an involution: `{"m": <int>, "map": [<int>...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvolutionFile {
    pub m: usize,
    pub map: Vec<usize>,
}

impl Involution {
    /// Validates `map` as an involution on `0..m`.
    pub fn validate(m: usize, map: Vec<usize>) -> Result<Self> {
        if m % 2 == 1 {
            return Err(Error::OddSize { m });
        }
        if m < 2 {
            return Err(Error::range(format!("m must be at least 2, got {m}")));
        }
        if map.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: map.len(),
            });
        }
        let mut seen = vec![false; m];
        for (index, &value) in map.iter().enumerate() {
            if value >= m || seen[value] {
                return Err(Error::NotPermutation { index, value });
            }
            seen[value] = true;
        }
        for (index, &image) in map.iter().enumerate() {
            let back = map[image];
            if back != index {
                return Err(Error::NotSelfInverse { index, image, back });
            }
        }
        let fixed_count = map.iter().enumerate().filter(|(i, &v)| *i == v).count();
        Ok(Involution { map, fixed_count })
    }

    /// Fixes `0..f` and swaps the consecutive pairs `(f, f+1), (f+2, f+3), ...`.
    pub fn canonical(m: usize, f: usize) -> Result<Self> {
        check_shape(m, f)?;
        let mut map: Vec<usize> = (0..m).collect();
        for i in (f..m).step_by(2) {
            map.swap(i, i + 1);
        }
        Ok(Involution {
            map,
            fixed_count: f,
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::canonical(m, m)
    }

    pub fn m(&self) -> usize {
        self.map.len()
    }

    pub fn half(&self) -> usize {
        self.map.len() / 2
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed_count
    }

    /// Fixed-point density `f / m`.
    pub fn theta(&self) -> f64 {
        self.fixed_count as f64 / self.m() as f64
    }

    #[inline]
    pub fn apply(&self, y: usize) -> usize {
        self.map[y]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_fixed(&self, y: usize) -> bool {
        self.map[y] == y
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: InvolutionFile = serde_json::from_str(s)?;
        Self::validate(file.m, file.map)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = InvolutionFile {
            m: self.m(),
            map: self.map.clone(),
        };
        serde_json::to_string(&file).expect("involution serializes")
    }
}

/// Checks the `(m, f)` shape shared by every formula: `m` even and at least 2,
/// `f <= m`, `m - f` even.
pub fn check_shape(m: usize, f: usize) -> Result<()> {
    if m % 2 == 1 {
        return Err(Error::OddSize { m });
    }
    if m < 2 {
        return Err(Error::range(format!("m must be at least 2, got {m}")));
    }
    if f > m {
        return Err(Error::range(format!("f = {f} exceeds m = {m}")));
    }
    if (m - f) % 2 == 1 {
        return Err(Error::ParityMismatch { m, f });
    }
    Ok(())
}

/// The first `m / 2` components of a symmetric vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeHalf {
    values: Vec<usize>,
}

impl FreeHalf {
    pub fn new(values: Vec<usize>, m: usize) -> Result<Self> {
        if values.len() != m / 2 {
            return Err(Error::LengthMismatch {
                expected: m / 2,
                found: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= m) {
            return Err(Error::range(format!("free-half entry {bad} is not below m = {m}")));
        }
        Ok(FreeHalf { values })
    }

    pub(crate) fn from_raw(values: Vec<usize>) -> Self {
        FreeHalf { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// A length-`m` vector satisfying `entries[m - 1 - j] == psi(entries[j])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetricVector {
    entries: Vec<usize>,
}

impl SymmetricVector {
    /// Validates `entries` against `psi`.
    pub fn new(entries: Vec<usize>, psi: &Involution) -> Result<Self> {
        let m = psi.m();
        if entries.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                found: entries.len(),
            });
        }
        for (j, &v) in entries.iter().enumerate() {
            if v >= m {
                return Err(Error::range(format!("entry {j} = {v} is not below m = {m}")));
            }
            if entries[m - 1 - j] != psi.apply(v) {
                return Err(Error::range(format!(
                    "mirror constraint fails at position {j}: psi({v}) = {} but entry {} = {}",
                    psi.apply(v),
                    m - 1 - j,
                    entries[m - 1 - j]
                )));
            }
        }
        Ok(SymmetricVector { entries })
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn free_half(&self) -> FreeHalf {
        FreeHalf::from_raw(self.entries[..self.m() / 2].to_vec())
    }

    /// Number of occurrences of each element `0..m`.
    pub fn element_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.m()];
        for &v in &self.entries {
            counts[v] += 1;
        }
        counts
    }

    /// Presence mask of the components.
    pub fn components(&self) -> Vec<bool> {
        let mut present = vec![false; self.m()];
        for &v in &self.entries {
            present[v] = true;
        }
        present
    }
}

/// Builds the symmetric vector generated by `half` under `psi`.
pub fn expand(half: &FreeHalf, psi: &Involution) -> Result<SymmetricVector> {
    let m = psi.m();
    if half.values.len() != m / 2 {
        return Err(Error::LengthMismatch {
            expected: m / 2,
            found: half.values.len(),
        });
    }
    if let Some(&bad) = half.values.iter().find(|&&v| v >= m) {
        return Err(Error::range(format!("free-half entry {bad} is not below m = {m}")));
    }
    Ok(expand_unchecked(&half.values, psi))
}

pub(crate) fn expand_unchecked(half: &[usize], psi: &Involution) -> SymmetricVector {
    let m = psi.m();
    let mut entries = vec![0usize; m];
    for (j, &v) in half.iter().enumerate() {
        entries[j] = v;
        entries[m - 1 - j] = psi.apply(v);
    }
    SymmetricVector { entries }
}

/// Histogram `counts[k] = m_k(x)`: how many elements occur exactly `k` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceProfile {
    counts: Vec<u64>,
}

impl OccurrenceProfile {
    /// Profile of a multiset of occurrence counts over a universe of `counts.len()` elements.
    pub fn from_element_counts(element_counts: &[u32]) -> Self {
        let n = element_counts.len();
        let mut counts = vec![0u64; n + 1];
        for &c in element_counts {
            counts[c as usize] += 1;
        }
        OccurrenceProfile { counts }
    }

    /// `m_k`, or zero past the end.
    pub fn get(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn universe_size(&self) -> usize {
        self.counts.len() - 1
    }

    /// Elements that never occur.
    pub fn absent(&self) -> u64 {
        self.get(0)
    }
}

pub fn occurrence_profile(x: &SymmetricVector) -> OccurrenceProfile {
    OccurrenceProfile::from_element_counts(&x.element_counts())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert_eq!(Involution::validate(2, vec![0, 1]).unwrap().fixed_count(), 2);
        assert_eq!(Involution::validate(2, vec![1, 0]).unwrap().fixed_count(), 0);
        assert_eq!(Involution::validate(4, vec![1, 0, 2, 3]).unwrap().fixed_count(), 2);
        assert!(matches!(
            Involution::validate(4, vec![1, 2, 3, 0]),
            Err(Error::NotSelfInverse { index: 0, .. })
        ));
    }

    #[test]
    fn validate_errors() {
        assert!(matches!(Involution::validate(3, vec![0, 1, 2]), Err(Error::OddSize { m: 3 })));
        assert!(matches!(
            Involution::validate(4, vec![0, 0, 2, 3]),
            Err(Error::NotPermutation { index: 1, value: 0 })
        ));
        assert!(matches!(
            Involution::validate(2, vec![0, 5]),
            Err(Error::NotPermutation { index: 1, value: 5 })
        ));
        assert!(matches!(
            Involution::validate(4, vec![0, 1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(Involution::validate(0, vec![]).is_err());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(Involution::canonical(4, 0).unwrap().as_slice(), &[1, 0, 3, 2]);
        assert_eq!(Involution::canonical(4, 4).unwrap().as_slice(), &[0, 1, 2, 3]);
        assert_eq!(Involution::canonical(6, 2).unwrap().as_slice(), &[0, 1, 3, 2, 5, 4]);
        assert!(matches!(Involution::canonical(6, 1), Err(Error::ParityMismatch { .. })));
        assert!(matches!(Involution::canonical(4, 6), Err(Error::Range(_))));
    }

    #[test]
    fn canonical_validates() {
        for m in (2..=20).step_by(2) {
            for f in (0..=m).step_by(2) {
                let psi = Involution::canonical(m, f).unwrap();
                let again = Involution::validate(m, psi.as_slice().to_vec()).unwrap();
                assert_eq!(again, psi);
            }
        }
    }

    #[test]
    fn expand_examples() {
        let psi = Involution::canonical(4, 0).unwrap();
        let x = expand(&FreeHalf::new(vec![0, 0], 4).unwrap(), &psi).unwrap();
        assert_eq!(x.entries(), &[0, 0, 1, 1]);
        let x = expand(&FreeHalf::new(vec![0, 2], 4).unwrap(), &psi).unwrap();
        assert_eq!(x.entries(), &[0, 2, 3, 1]);
        let id = Involution::identity(2).unwrap();
        let x = expand(&FreeHalf::new(vec![0], 2).unwrap(), &id).unwrap();
        assert_eq!(x.entries(), &[0, 0]);
    }

    #[test]
    fn expand_length_mismatch() {
        let psi = Involution::canonical(4, 0).unwrap();
        let half = FreeHalf::from_raw(vec![0]);
        assert!(matches!(expand(&half, &psi), Err(Error::LengthMismatch { expected: 2, found: 1 })));
        assert!(FreeHalf::new(vec![0, 4], 4).is_err());
    }

    #[test]
    fn profile_examples() {
        let psi = Involution::canonical(4, 0).unwrap();
        let x = SymmetricVector::new(vec![0, 2, 3, 1], &psi).unwrap();
        let p = occurrence_profile(&x);
        assert_eq!((p.get(0), p.get(1)), (0, 4));
        let x = SymmetricVector::new(vec![0, 0, 1, 1], &psi).unwrap();
        let p = occurrence_profile(&x);
        assert_eq!((p.get(0), p.get(2)), (2, 2));
        let id = Involution::identity(2).unwrap();
        let p = occurrence_profile(&SymmetricVector::new(vec![0, 0], &id).unwrap());
        assert_eq!(p.counts(), &[1, 0, 1]);
    }

    #[test]
    fn symmetric_vector_rejects_broken_mirror() {
        let psi = Involution::canonical(4, 0).unwrap();
        assert!(SymmetricVector::new(vec![0, 0, 0, 1], &psi).is_err());
    }

    #[test]
    fn involution_json() {
        let psi = Involution::from_json_str(r#"{"m": 4, "map": [1, 0, 3, 2]}"#).unwrap();
        assert_eq!(psi.fixed_count(), 0);
        assert_eq!(Involution::from_json_str(&psi.to_json_string()).unwrap(), psi);
        assert!(Involution::from_json_str(r#"{"m": 4, "map": [1, 2, 3, 0]}"#).is_err());
    }
}
