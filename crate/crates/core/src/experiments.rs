//! Witness searches, the exceptional-set band test, the adversarial
//! construction that shows the `1/2 + 1/e` density is sharp, and seeded
//! drivers that run them over sampled vectors.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::threshold_c;
use crate::error::{Error, Result};
use crate::model::{occurrence_profile, Involution, SymmetricVector};
use crate::montecarlo::{mix_seed, trial_vector, with_jobs};

/// A permutation of `0..m`, not necessarily an involution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Bijection {
    map: Vec<usize>,
}

impl Bijection {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let m = map.len();
        let mut seen = vec![false; m];
        for (index, &value) in map.iter().enumerate() {
            if value >= m || seen[value] {
                return Err(Error::NotBijection { index, value });
            }
            seen[value] = true;
        }
        Ok(Bijection { map })
    }

    pub fn identity(m: usize) -> Self {
        Bijection {
            map: (0..m).collect(),
        }
    }

    /// Uniform random permutation, reproducible from `seed`.
    pub fn random(m: usize, seed: u64) -> Self {
        let mut map: Vec<usize> = (0..m).collect();
        map.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Bijection { map }
    }

    /// Maps the ids of `source` (in increasing order) onto the smallest ids
    /// outside `avoid`, as many as fit, then completes the permutation by
    /// matching the leftover domain to the leftover codomain in increasing
    /// order.
    pub fn avoiding(m: usize, source: &[bool], avoid: &[bool]) -> Self {
        let mut map = vec![usize::MAX; m];
        let mut used = vec![false; m];
        let mut targets = (0..m).filter(|&y| !avoid[y]);
        for y in (0..m).filter(|&y| source[y]) {
            match targets.next() {
                Some(t) => {
                    map[y] = t;
                    used[t] = true;
                }
                None => break,
            }
        }
        let mut rest = (0..m).filter(|&t| !used[t]);
        for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = rest.next().expect("domain and codomain leftovers have equal size");
        }
        Bijection { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, y: usize) -> usize {
        self.map[y]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

impl TryFrom<Vec<usize>> for Bijection {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Bijection::new(map)
    }
}

impl From<Bijection> for Vec<usize> {
    fn from(b: Bijection) -> Self {
        b.map
    }
}

/// Membership of `m_k / m` in the band `((1 - mu) / (e k!), (1 + mu) / (e k!))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub actual: f64,
    pub inside: bool,
}

/// A pair `u, v = phi(u)` in `b` with `occ(u) <= r` and `occ(v) <= s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub u: usize,
    pub v: usize,
    pub occ_u: u32,
    pub occ_v: u32,
    pub u_present: bool,
    pub v_present: bool,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::range(format!("mu = {mu} is outside (0, 1)")))
    }
}

/// Band checks for `k = 0..=k_cap`. The vector is exceptional iff some check
/// has `inside == false`. Bands are centered on the fixed-point-free density.
pub fn in_exceptional_set(x: &SymmetricVector, k_cap: usize, mu: f64) -> Result<Vec<BandCheck>> {
    check_mu(mu)?;
    let profile = occurrence_profile(x);
    let m = x.m() as f64;
    let mut poisson = (-1.0f64).exp();
    let mut checks = Vec::with_capacity(k_cap + 1);
    for k in 0..=k_cap {
        if k > 0 {
            poisson /= k as f64;
        }
        let lower = (1.0 - mu) * poisson;
        let upper = (1.0 + mu) * poisson;
        let actual = profile.get(k) as f64 / m;
        checks.push(BandCheck {
            k,
            lower,
            upper,
            actual,
            inside: lower < actual && actual < upper,
        });
    }
    Ok(checks)
}

pub fn is_exceptional(checks: &[BandCheck]) -> bool {
    checks.iter().any(|c| !c.inside)
}

/// Builds the membership mask of `b`, rejecting ids outside `0..m`.
pub fn id_mask(m: usize, b: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; m];
    for &y in b {
        if y >= m {
            return Err(Error::range(format!("element id {y} is not below m = {m}")));
        }
        mask[y] = true;
    }
    Ok(mask)
}

fn check_phi(x: &SymmetricVector, phi: &Bijection) -> Result<()> {
    if phi.len() != x.m() {
        return Err(Error::LengthMismatch {
            expected: x.m(),
            found: phi.len(),
        });
    }
    Ok(())
}

/// Smallest `u` in `b` with `occ(u) <= r`, `phi(u)` in `b` and
/// `occ(phi(u)) <= s`. Absent elements count with zero occurrences.
pub fn find_witness_thm2(
    x: &SymmetricVector,
    b: &[usize],
    phi: &Bijection,
    r: u32,
    s: u32,
) -> Result<Option<WitnessPair>> {
    check_phi(x, phi)?;
    let in_b = id_mask(x.m(), b)?;
    Ok(witness_thm2_masked(&x.element_counts(), &in_b, phi, r, s))
}

fn witness_thm2_masked(counts: &[u32], in_b: &[bool], phi: &Bijection, r: u32, s: u32) -> Option<WitnessPair> {
    (0..counts.len())
        .filter(|&u| in_b[u] && counts[u] <= r)
        .map(|u| (u, phi.apply(u)))
        .find(|&(_, v)| in_b[v] && counts[v] <= s)
        .map(|(u, v)| WitnessPair {
            u,
            v,
            occ_u: counts[u],
            occ_v: counts[v],
            u_present: counts[u] > 0,
            v_present: counts[v] > 0,
        })
}

/// Smallest `y` in `b` with `y` and `phi(y)` both components of `x` and
/// `phi(y)` in `b`.
pub fn find_witness_thm3(x: &SymmetricVector, b: &[usize], phi: &Bijection) -> Result<Option<usize>> {
    check_phi(x, phi)?;
    let in_b = id_mask(x.m(), b)?;
    Ok(witness_thm3_masked(&x.components(), &in_b, phi))
}

fn witness_thm3_masked(present: &[bool], in_b: &[bool], phi: &Bijection) -> Option<usize> {
    (0..present.len()).find(|&y| {
        let z = phi.apply(y);
        in_b[y] && present[y] && in_b[z] && present[z]
    })
}

/// Output of [`adversarial_construction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarialConstruction {
    /// Sorted ids of the chosen set.
    pub b: Vec<usize>,
    pub phi: Bijection,
    /// `|b ∩ components(x)|`.
    pub b_cap_components: usize,
    /// False when `b ∩ components(x)` is too large to be mapped off itself;
    /// `phi` is then the identity.
    pub succeeded: bool,
}

/// `ceil(fraction * m)`, tolerant of the rounding in `fraction * m`.
pub fn set_size(fraction: f64, m: usize) -> usize {
    let raw = fraction * m as f64;
    ((raw - 1e-9 * raw.max(1.0)).ceil().max(0.0) as usize).min(m)
}

/// Chooses `b` as every unrepresented id plus the smallest represented ids up
/// to `ceil(fraction * m)` elements, and, when possible, a bijection sending
/// `b ∩ components(x)` entirely outside itself, which leaves no present pair
/// `y, phi(y)` inside `b`.
pub fn adversarial_construction(x: &SymmetricVector, fraction: f64) -> Result<AdversarialConstruction> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::range(format!("fraction = {fraction} is outside (0, 1)")));
    }
    let m = x.m();
    let present = x.components();
    let size = set_size(fraction, m);
    let unrepresented = present.iter().filter(|p| !**p).count();
    if size < unrepresented {
        return Err(Error::TooSmall {
            requested: size,
            unrepresented,
        });
    }
    let mut in_b: Vec<bool> = present.iter().map(|p| !p).collect();
    let mut chosen = vec![false; m];
    for y in (0..m).filter(|&y| present[y]).take(size - unrepresented) {
        in_b[y] = true;
        chosen[y] = true;
    }
    let cap = size - unrepresented;
    let b = (0..m).filter(|&y| in_b[y]).collect();
    let succeeded = 2 * cap <= m;
    let phi = if succeeded {
        Bijection::avoiding(m, &chosen, &chosen)
    } else {
        Bijection::identity(m)
    };
    Ok(AdversarialConstruction {
        b,
        phi,
        b_cap_components: cap,
        succeeded,
    })
}

/// Settings for the present-pair density experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub m: usize,
    pub f: usize,
    pub fraction: f64,
    pub vectors: u64,
    pub seed: u64,
    pub mu: f64,
    pub random_phis: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            m: 2000,
            f: 0,
            fraction: 0.87,
            vectors: 100,
            seed: 1,
            mu: 0.003,
            random_phis: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub trial: u64,
    pub absent: u64,
    pub band_inside: bool,
    pub b_size: usize,
    pub b_cap_components: usize,
    pub construction_succeeded: bool,
    /// Witness under the constructed bijection.
    pub adversarial_witness: bool,
    /// Witness under the greedy bijection that maps `b ∩ components` off itself as far as possible.
    pub greedy_witness: bool,
    pub random_phi_witnesses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub config: ThresholdConfig,
    pub threshold: f64,
    pub band_passing: u64,
    /// Cases among band-passing vectors, counting every tested bijection.
    pub cases: u64,
    pub witnessed: u64,
    pub rows: Vec<ThresholdRow>,
}

/// Samples `vectors` vectors, builds the adversarial set at `fraction` for
/// each, and tests the constructed, greedy and `random_phis` random bijections.
pub fn threshold_experiment(config: &ThresholdConfig, jobs: Option<usize>) -> Result<ThresholdReport> {
    check_mu(config.mu)?;
    let psi = Involution::canonical(config.m, config.f)?;
    let rows = with_jobs(jobs, || {
        (0..config.vectors)
            .into_par_iter()
            .map(|t| threshold_row(&psi, config, t))
            .collect::<Result<Vec<_>>>()
    })??;
    let passing: Vec<&ThresholdRow> = rows.iter().filter(|r| r.band_inside).collect();
    let per_vector = 2 + config.random_phis as u64;
    let witnessed = passing
        .iter()
        .map(|r| r.adversarial_witness as u64 + r.greedy_witness as u64 + r.random_phi_witnesses as u64)
        .sum();
    Ok(ThresholdReport {
        config: config.clone(),
        threshold: crate::asymptotic::theorem3_threshold(),
        band_passing: passing.len() as u64,
        cases: passing.len() as u64 * per_vector,
        witnessed,
        rows,
    })
}

fn threshold_row(psi: &Involution, config: &ThresholdConfig, t: u64) -> Result<ThresholdRow> {
    let x = trial_vector(psi, config.seed, t);
    let m = x.m();
    let band = in_exceptional_set(&x, 0, config.mu)?;
    let construction = adversarial_construction(&x, config.fraction)?;
    let present = x.components();
    let in_b = id_mask(m, &construction.b)?;
    let cap: Vec<bool> = (0..m).map(|y| in_b[y] && present[y]).collect();
    let greedy = Bijection::avoiding(m, &cap, &cap);
    let trial_seed = mix_seed(config.seed, t);
    let random_phi_witnesses = (0..config.random_phis as u64)
        .filter(|&j| {
            let phi = Bijection::random(m, mix_seed(trial_seed, j));
            witness_thm3_masked(&present, &in_b, &phi).is_some()
        })
        .count();
    Ok(ThresholdRow {
        trial: t,
        absent: occurrence_profile(&x).absent(),
        band_inside: !is_exceptional(&band),
        b_size: construction.b.len(),
        b_cap_components: construction.b_cap_components,
        construction_succeeded: construction.succeeded,
        adversarial_witness: witness_thm3_masked(&present, &in_b, &construction.phi).is_some(),
        greedy_witness: witness_thm3_masked(&present, &in_b, &greedy).is_some(),
        random_phi_witnesses,
    })
}

/// Settings for the occurrence-capped witness experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    pub m: usize,
    pub f: usize,
    pub r: u32,
    pub s: u32,
    pub mu: f64,
    /// Number of band-passing vectors to test.
    pub vectors: u64,
    /// Upper bound on sampled vectors while looking for band-passing ones.
    pub max_samples: u64,
    pub seed: u64,
    pub random_phis: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            m: 2000,
            f: 0,
            r: 1,
            s: 1,
            mu: 0.01,
            vectors: 50,
            max_samples: 200_000,
            seed: 1,
            random_phis: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub trial: u64,
    pub b_size: usize,
    /// Bijections tested against the random set and the adversarial set.
    pub cases: usize,
    pub witnessed: usize,
    /// Witness for the random set under the first random bijection.
    pub example: Option<WitnessPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub config: WitnessConfig,
    pub c: f64,
    pub b_size: usize,
    pub sampled: u64,
    pub band_passing: u64,
    pub cases: u64,
    pub witnessed: u64,
    pub rows: Vec<WitnessRow>,
}

/// Finds `vectors` samples outside the exceptional set for `K = max(r, s)`,
/// then tests sets of size `ceil(c m) + 1` (one random, one adversarial)
/// against random bijections and one bijection that maps `b ∩ T_r` away from
/// `b ∩ T_s` as far as possible.
pub fn witness_experiment(config: &WitnessConfig, jobs: Option<usize>) -> Result<WitnessReport> {
    check_mu(config.mu)?;
    let psi = Involution::canonical(config.m, config.f)?;
    let m = config.m;
    let c = threshold_c(config.r as usize, config.s as usize, config.mu)?;
    let b_size = (set_size(c, m) + 1).min(m);
    let k_cap = config.r.max(config.s) as usize;

    let passing = with_jobs(jobs, || -> Result<Vec<u64>> {
        let mut found = Vec::new();
        let batch = 1024u64;
        let mut start = 0u64;
        while (found.len() as u64) < config.vectors && start < config.max_samples {
            let end = (start + batch).min(config.max_samples);
            let flags = (start..end)
                .into_par_iter()
                .map(|t| {
                    let x = trial_vector(&psi, config.seed, t);
                    in_exceptional_set(&x, k_cap, config.mu).map(|ch| !is_exceptional(&ch))
                })
                .collect::<Result<Vec<bool>>>()?;
            found.extend((start..end).zip(flags).filter(|(_, ok)| *ok).map(|(t, _)| t));
            start = end;
        }
        found.truncate(config.vectors as usize);
        Ok(found)
    })??;
    let sampled = passing.last().map_or(config.max_samples, |&t| t + 1);

    let rows = with_jobs(jobs, || {
        passing
            .par_iter()
            .map(|&t| witness_row(&psi, config, t, b_size))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(WitnessReport {
        config: config.clone(),
        c,
        b_size,
        sampled,
        band_passing: rows.len() as u64,
        cases: rows.iter().map(|r| r.cases as u64).sum(),
        witnessed: rows.iter().map(|r| r.witnessed as u64).sum(),
        rows,
    })
}

fn witness_row(psi: &Involution, config: &WitnessConfig, t: u64, b_size: usize) -> Result<WitnessRow> {
    let x = trial_vector(psi, config.seed, t);
    let m = x.m();
    let counts = x.element_counts();
    let trial_seed = mix_seed(config.seed, t);

    let mut random_b: Vec<usize> = (0..m).collect();
    random_b.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(trial_seed, u64::MAX)));
    random_b.truncate(b_size);
    let adversarial_b = adversarial_construction(&x, b_size as f64 / m as f64)?.b;

    let mut cases = 0;
    let mut witnessed = 0;
    let mut example = None;
    for b in [&random_b, &adversarial_b] {
        let in_b = id_mask(m, b)?;
        let low_r: Vec<bool> = (0..m).map(|y| in_b[y] && counts[y] <= config.r).collect();
        let low_s: Vec<bool> = (0..m).map(|y| in_b[y] && counts[y] <= config.s).collect();
        let mut phis = vec![Bijection::avoiding(m, &low_r, &low_s)];
        phis.extend((0..config.random_phis as u64).map(|j| Bijection::random(m, mix_seed(trial_seed, j))));
        for phi in &phis {
            let w = witness_thm2_masked(&counts, &in_b, phi, config.r, config.s);
            cases += 1;
            if let Some(w) = w {
                witnessed += 1;
                example.get_or_insert(w);
            }
        }
    }
    Ok(WitnessRow {
        trial: t,
        b_size,
        cases,
        witnessed,
        example,
    })
}
