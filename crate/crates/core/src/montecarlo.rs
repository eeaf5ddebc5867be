//! Uniform sampling of symmetric vectors and empirical occurrence statistics.
//!
//! Trial `t` of a run seeded with `seed` draws its vector from a ChaCha8
//! generator seeded with [`mix_seed`]`(seed, t)`. Workers share no generator
//! state and aggregate exact integer tallies, so a summary depends only on
//! its inputs and never on the number of threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::main_term;
use crate::error::{Error, Result};
use crate::model::{expand_unchecked, occurrence_profile, Involution, SymmetricVector};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const CHUNK: u64 = 256;

/// Output number `trial` of a SplitMix64 generator started at state `seed`:
/// the state `seed + (trial + 1) * 0x9E3779B97F4A7C15` pushed through the
/// SplitMix64 finalizer.
pub fn mix_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw from the vectors symmetric under `psi`: the free half is
/// `m / 2` independent uniform element ids.
pub fn sample_vector(psi: &Involution, trial_seed: u64) -> SymmetricVector {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let m = psi.m();
    let half: Vec<usize> = (0..psi.half()).map(|_| rng.random_range(0..m)).collect();
    expand_unchecked(&half, psi)
}

/// Vector of trial `trial` in a run seeded with `seed`.
pub fn trial_vector(psi: &Involution, seed: u64, trial: u64) -> SymmetricVector {
    sample_vector(psi, mix_seed(seed, trial))
}

/// Default window `m^(-1/4)`.
pub fn default_window(m: usize) -> f64 {
    (m as f64).powf(-0.25)
}

/// Runs `op` on a dedicated pool of `jobs` threads, or the global pool for `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, op: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(op()),
        Some(0) => Err(Error::range("jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(op))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub m: usize,
    pub fixed_count: usize,
    pub trials: u64,
    pub seed: u64,
    pub window: f64,
    pub per_k: Vec<SampleRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub k: usize,
    /// Sample mean of `m_k / m`.
    pub mean_ratio: f64,
    /// Unbiased sample variance of `m_k / m`; zero for a single trial.
    pub sample_variance: f64,
    pub std_error: f64,
    /// Fraction of trials with `|m_k / m - main_term| < window`.
    pub within_window_fraction: f64,
    pub main_term: f64,
}

impl SampleSummary {
    pub fn row(&self, k: usize) -> Option<&SampleRow> {
        self.per_k.get(k)
    }

    /// One CSV row per `k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "m",
            "fixed_count",
            "trials",
            "seed",
            "window",
            "k",
            "mean_ratio",
            "sample_variance",
            "std_error",
            "within_window_fraction",
            "main_term",
        ])?;
        for r in &self.per_k {
            w.write_record([
                self.m.to_string(),
                self.fixed_count.to_string(),
                self.trials.to_string(),
                self.seed.to_string(),
                self.window.to_string(),
                r.k.to_string(),
                r.mean_ratio.to_string(),
                r.sample_variance.to_string(),
                r.std_error.to_string(),
                r.within_window_fraction.to_string(),
                r.main_term.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone)]
struct Tally {
    sums: Vec<u64>,
    squares: Vec<u128>,
    hits: Vec<u64>,
}

impl Tally {
    fn new(len: usize) -> Self {
        Tally {
            sums: vec![0; len],
            squares: vec![0; len],
            hits: vec![0; len],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.sums.iter_mut().zip(other.sums).for_each(|(a, b)| *a += b);
        self.squares.iter_mut().zip(other.squares).for_each(|(a, b)| *a += b);
        self.hits.iter_mut().zip(other.hits).for_each(|(a, b)| *a += b);
        self
    }
}

pub fn estimate(psi: &Involution, k_max: usize, trials: u64, seed: u64, window: f64) -> Result<SampleSummary> {
    estimate_with_jobs(psi, k_max, trials, seed, window, None)
}

/// Samples `trials` vectors and summarizes `m_k / m` for `k <= k_max`
/// (clipped to `m`).
pub fn estimate_with_jobs(
    psi: &Involution,
    k_max: usize,
    trials: u64,
    seed: u64,
    window: f64,
    jobs: Option<usize>,
) -> Result<SampleSummary> {
    if trials == 0 {
        return Err(Error::range("trials must be at least 1"));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::range(format!("window {window} must be positive and finite")));
    }
    let m = psi.m();
    let k_max = k_max.min(m);
    let theta = psi.theta();
    let centers = (0..=k_max)
        .map(|k| main_term(k, theta))
        .collect::<Result<Vec<_>>>()?;
    let mf = m as f64;

    let chunks = trials.div_ceil(CHUNK);
    let tally = with_jobs(jobs, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut tally = Tally::new(k_max + 1);
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let profile = occurrence_profile(&trial_vector(psi, seed, t));
                    for (k, center) in centers.iter().enumerate() {
                        let mk = profile.get(k);
                        tally.sums[k] += mk;
                        tally.squares[k] += (mk as u128) * (mk as u128);
                        if (mk as f64 / mf - center).abs() < window {
                            tally.hits[k] += 1;
                        }
                    }
                }
                tally
            })
            .reduce(|| Tally::new(k_max + 1), Tally::merge)
    })?;

    let n = trials as f64;
    let per_k = (0..=k_max)
        .map(|k| {
            let sum = tally.sums[k] as u128;
            let mean_ratio = sum as f64 / (n * mf);
            // n * sum(x^2) - (sum x)^2 is exact in integers.
            let spread = trials as u128 * tally.squares[k] - sum * sum;
            let sample_variance = if trials > 1 {
                spread as f64 / (n * (n - 1.0) * mf * mf)
            } else {
                0.0
            };
            SampleRow {
                k,
                mean_ratio,
                sample_variance,
                std_error: (sample_variance / n).sqrt(),
                within_window_fraction: tally.hits[k] as f64 / n,
                main_term: centers[k],
            }
        })
        .collect();

    Ok(SampleSummary {
        m,
        fixed_count: psi.fixed_count(),
        trials,
        seed,
        window,
        per_k,
    })
}
