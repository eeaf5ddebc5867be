//! Command-line surface: argument parsing, `--config` merging, report
//! building and JSON/CSV rendering.
//!
//! Exit status is 0 on success, 1 for invalid input (bad flags, bad config,
//! violated preconditions) and 2 for I/O or internal failures.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotic::{average_log, main_term, ChebyshevConfig};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::experiments::{self, ThresholdConfig, ThresholdReport, WitnessConfig, WitnessReport};
use crate::model::Involution;
use crate::montecarlo::{self, SampleSummary};
use crate::numtheory::{self, PoissonRow};
use crate::oracle::{self, OracleReport};

/// Version stamped into every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable supplying the default for `--jobs`.
pub const JOBS_ENV: &str = "INVOLUTION_OCC_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Exact,
    Oracle,
    Sample,
    Concentration,
    Threshold,
    Witness,
    Factorial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Every parameter any command accepts. Loaded from `--config` and then
/// overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub m: Option<usize>,
    pub f: Option<usize>,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window: Option<f64>,
    pub mu: Option<f64>,
    pub fraction: Option<f64>,
    pub r: Option<u32>,
    pub s: Option<u32>,
    pub p: Option<u64>,
    pub random_phis: Option<usize>,
    pub involution: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub jobs: Option<usize>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl RunConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `other` replace ours.
    pub fn overlay(&mut self, other: &RunConfig) {
        overlay!(
            self,
            other,
            command,
            m,
            f,
            k,
            k_max,
            trials,
            seed,
            window,
            mu,
            fraction,
            r,
            s,
            p,
            random_phis,
            involution,
            output_format,
            output_path,
            jobs
        );
    }

    fn require<T: Copy>(value: Option<T>, flag: &str) -> Result<T> {
        value.ok_or_else(|| Error::Config(format!("missing required parameter --{flag}")))
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("randomized commands require an explicit --seed".into()))
    }

    fn involution(&self) -> Result<Involution> {
        match &self.involution {
            Some(path) => {
                let psi = Involution::read_json(path)?;
                if let Some(m) = self.m {
                    if m != psi.m() {
                        return Err(Error::Config(format!(
                            "--m {m} disagrees with the involution file (m = {})",
                            psi.m()
                        )));
                    }
                }
                Ok(psi)
            }
            None => Involution::canonical(Self::require(self.m, "m")?, self.f.unwrap_or(0)),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "involution-occ",
    version,
    about = "Occurrence statistics of involution-symmetric sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    /// JSON file with default parameters; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Report format (default csv for factorial, json otherwise)
    #[arg(long, global = true, value_enum, alias = "format")]
    pub output_format: Option<OutputFormat>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output_path: Option<PathBuf>,

    /// Worker threads for sample, concentration, threshold and witness; output does not depend on it
    #[arg(long, global = true, env = JOBS_ENV)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Exact rational average, second moment and variance of m_k / m
    Exact(ExactArgs),
    /// Brute-force sums of m_k and m_k^2 over every symmetric vector
    Oracle(OracleArgs),
    /// Monte Carlo estimate of m_k / m statistics
    Sample(SampleArgs),
    /// Empirical window fractions against Chebyshev lower bounds
    Concentration(ConcentrationArgs),
    /// Present-pair witnesses around the 1/2 + 1/e density threshold
    Threshold(ThresholdArgs),
    /// Occurrence-capped witness pairs above the c(r, s, mu) density
    Witness(WitnessArgs),
    /// Occurrence profile of n! mod p against the model densities
    Factorial(FactorialArgs),
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Universe size (even)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points of the involution
    #[arg(long)]
    pub f: Option<usize>,
    /// Occurrence count; all k in 0..=m when omitted
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Universe size (even)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points of the canonical involution
    #[arg(long)]
    pub f: Option<usize>,
    /// Largest k reported (default m)
    #[arg(long)]
    pub k_max: Option<usize>,
    /// JSON involution file {"m": .., "map": [..]} used instead of the canonical one
    #[arg(long, value_name = "PATH")]
    pub involution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Universe size (even)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points of the canonical involution
    #[arg(long)]
    pub f: Option<usize>,
    /// Largest k reported (default min(m, 10))
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Number of sampled vectors (default 1000)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window around the limiting density (default m^(-1/4))
    #[arg(long)]
    pub window: Option<f64>,
    /// JSON involution file used instead of the canonical one
    #[arg(long, value_name = "PATH")]
    pub involution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConcentrationArgs {
    /// Universe size (even)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points of the canonical involution
    #[arg(long)]
    pub f: Option<usize>,
    /// Largest k checked (default 2)
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Number of sampled vectors (default 1000)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window around the limiting density (default m^(-1/4))
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Universe size (even, default 2000)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points (default 0)
    #[arg(long)]
    pub f: Option<usize>,
    /// Size of the adversarial set as a fraction of m (default 0.87)
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Number of sampled vectors (default 100)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative band half-width for m_0 (default 0.003)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Random bijections tested per vector (default 100)
    #[arg(long)]
    pub random_phis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Universe size (even, default 2000)
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of fixed points (default 0)
    #[arg(long)]
    pub f: Option<usize>,
    /// Occurrence cap for u (default 1)
    #[arg(long)]
    pub r: Option<u32>,
    /// Occurrence cap for v = phi(u) (default 1)
    #[arg(long)]
    pub s: Option<u32>,
    /// Relative band half-width (default 0.01)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Number of band-passing vectors to test (default 50)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random bijections tested per set (default 20)
    #[arg(long)]
    pub random_phis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FactorialArgs {
    /// Prime modulus
    #[arg(long)]
    pub p: Option<u64>,
    /// Largest k reported (default 10, clipped to p - 1)
    #[arg(long)]
    pub k_max: Option<usize>,
}

impl Cli {
    /// Flags as a config layer.
    pub fn to_config(&self) -> RunConfig {
        let mut c = RunConfig {
            output_format: self.output_format,
            output_path: self.output_path.clone(),
            jobs: self.jobs,
            ..Default::default()
        };
        match &self.command {
            Sub::Exact(a) => {
                c.command = Some(Command::Exact);
                (c.m, c.f, c.k) = (a.m, a.f, a.k);
            }
            Sub::Oracle(a) => {
                c.command = Some(Command::Oracle);
                (c.m, c.f, c.k_max, c.involution) = (a.m, a.f, a.k_max, a.involution.clone());
            }
            Sub::Sample(a) => {
                c.command = Some(Command::Sample);
                (c.m, c.f, c.k_max, c.trials, c.seed, c.window) =
                    (a.m, a.f, a.k_max, a.trials, a.seed, a.window);
                c.involution = a.involution.clone();
            }
            Sub::Concentration(a) => {
                c.command = Some(Command::Concentration);
                (c.m, c.f, c.k_max, c.trials, c.seed, c.window) =
                    (a.m, a.f, a.k_max, a.trials, a.seed, a.window);
            }
            Sub::Threshold(a) => {
                c.command = Some(Command::Threshold);
                (c.m, c.f, c.fraction, c.trials, c.seed, c.mu, c.random_phis) =
                    (a.m, a.f, a.fraction, a.trials, a.seed, a.mu, a.random_phis);
            }
            Sub::Witness(a) => {
                c.command = Some(Command::Witness);
                (c.m, c.f, c.r, c.s, c.mu, c.trials, c.seed, c.random_phis) =
                    (a.m, a.f, a.r, a.s, a.mu, a.trials, a.seed, a.random_phis);
            }
            Sub::Factorial(a) => {
                c.command = Some(Command::Factorial);
                (c.p, c.k_max) = (a.p, a.k_max);
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub k: usize,
    /// Rationals are `"num/den"` in lowest terms.
    pub a: String,
    /// Sum of m_k(x)^2 over all vectors, as a decimal string.
    pub s2: String,
    pub s2_normalized: String,
    pub var: String,
    pub a_approx: f64,
    pub var_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub schema_version: u32,
    pub m: usize,
    pub f: usize,
    pub rows: Vec<ExactRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutput {
    pub schema_version: u32,
    pub involution: Vec<usize>,
    pub report: OracleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutput {
    pub schema_version: u32,
    pub summary: SampleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub k: usize,
    /// Exact average for m <= 64, log-domain otherwise.
    pub average: f64,
    pub main_term: f64,
    pub second_moment: f64,
    pub chebyshev_bound: f64,
    pub within_window_fraction: f64,
    pub mean_ratio: f64,
    pub std_error: f64,
    pub z_score: f64,
    /// within_window_fraction >= chebyshev_bound - 0.01
    pub bound_holds: bool,
    /// |z_score| <= 5
    pub mean_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationOutput {
    pub schema_version: u32,
    pub m: usize,
    pub f: usize,
    pub trials: u64,
    pub seed: u64,
    pub window: f64,
    pub rows: Vec<ConcentrationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutput {
    pub schema_version: u32,
    pub report: ThresholdReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessOutput {
    pub schema_version: u32,
    pub report: WitnessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorialOutput {
    pub schema_version: u32,
    pub p: u64,
    pub distinct_count: u64,
    pub distinct_floor: u64,
    pub wilson_holds: bool,
    /// The model rows juxtapose data with a heuristic prediction; nothing is asserted.
    pub note: String,
    pub rows: Vec<PoissonRow>,
}

/// A command's report. Serialized with a leading `"command"` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Exact(ExactReport),
    Oracle(OracleOutput),
    Sample(SampleOutput),
    Concentration(ConcentrationOutput),
    Threshold(ThresholdOutput),
    Witness(WitnessOutput),
    Factorial(FactorialOutput),
}

/// Tolerances for the concentration command's verdict columns.
pub const CHEBYSHEV_SLACK: f64 = 0.01;
pub const MAX_Z: f64 = 5.0;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let command = cfg
        .command
        .ok_or_else(|| Error::Config("no command given".into()))?;
    let jobs = cfg.jobs;
    match command {
        Command::Exact => {
            let m = RunConfig::require(cfg.m, "m")?;
            let f = cfg.f.unwrap_or(0);
            let ks: Vec<usize> = match cfg.k {
                Some(k) => vec![k],
                None => (0..=m).collect(),
            };
            let rows = ks
                .into_iter()
                .map(|k| {
                    let stats = exact::exact_stats(m, f, k)?;
                    Ok(ExactRow {
                        k,
                        s2: exact::s2_exact(m, f, k)?.to_string(),
                        a_approx: stats.a.to_f64(),
                        var_approx: stats.variance.to_f64(),
                        a: stats.a.to_string(),
                        s2_normalized: stats.s2_normalized.to_string(),
                        var: stats.variance.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::Exact(ExactReport {
                schema_version: SCHEMA_VERSION,
                m,
                f,
                rows,
            }))
        }
        Command::Oracle => {
            let psi = cfg.involution()?;
            let report = oracle::oracle_report(&psi, cfg.k_max.unwrap_or(psi.m()))?;
            Ok(Report::Oracle(OracleOutput {
                schema_version: SCHEMA_VERSION,
                involution: psi.as_slice().to_vec(),
                report,
            }))
        }
        Command::Sample => {
            let psi = cfg.involution()?;
            let seed = cfg.seed()?;
            let window = cfg.window.unwrap_or_else(|| montecarlo::default_window(psi.m()));
            let summary = montecarlo::estimate_with_jobs(
                &psi,
                cfg.k_max.unwrap_or(psi.m().min(10)),
                cfg.trials.unwrap_or(1000),
                seed,
                window,
                jobs,
            )?;
            Ok(Report::Sample(SampleOutput {
                schema_version: SCHEMA_VERSION,
                summary,
            }))
        }
        Command::Concentration => concentration(cfg).map(Report::Concentration),
        Command::Threshold => {
            let defaults = ThresholdConfig::default();
            let config = ThresholdConfig {
                m: cfg.m.unwrap_or(defaults.m),
                f: cfg.f.unwrap_or(defaults.f),
                fraction: cfg.fraction.unwrap_or(defaults.fraction),
                vectors: cfg.trials.unwrap_or(defaults.vectors),
                seed: cfg.seed()?,
                mu: cfg.mu.unwrap_or(defaults.mu),
                random_phis: cfg.random_phis.unwrap_or(defaults.random_phis),
            };
            let report = experiments::threshold_experiment(&config, jobs)?;
            Ok(Report::Threshold(ThresholdOutput {
                schema_version: SCHEMA_VERSION,
                report,
            }))
        }
        Command::Witness => {
            let defaults = WitnessConfig::default();
            let config = WitnessConfig {
                m: cfg.m.unwrap_or(defaults.m),
                f: cfg.f.unwrap_or(defaults.f),
                r: cfg.r.unwrap_or(defaults.r),
                s: cfg.s.unwrap_or(defaults.s),
                mu: cfg.mu.unwrap_or(defaults.mu),
                vectors: cfg.trials.unwrap_or(defaults.vectors),
                seed: cfg.seed()?,
                random_phis: cfg.random_phis.unwrap_or(defaults.random_phis),
                ..defaults
            };
            let report = experiments::witness_experiment(&config, jobs)?;
            Ok(Report::Witness(WitnessOutput {
                schema_version: SCHEMA_VERSION,
                report,
            }))
        }
        Command::Factorial => {
            let p = RunConfig::require(cfg.p, "p")?;
            let profile = numtheory::factorial_profile(p)?;
            numtheory::soft_check_distinct(&profile);
            let rows = numtheory::poisson_comparison(&profile, cfg.k_max.unwrap_or(10));
            Ok(Report::Factorial(FactorialOutput {
                schema_version: SCHEMA_VERSION,
                p,
                distinct_count: profile.distinct_count,
                distinct_floor: numtheory::distinct_floor(p),
                wilson_holds: profile.wilson_holds,
                note: "heuristic comparison: factorials mod p are not symmetric vectors".into(),
                rows,
            }))
        }
    }
}

fn concentration(cfg: &RunConfig) -> Result<ConcentrationOutput> {
    let m = RunConfig::require(cfg.m, "m")?;
    let f = cfg.f.unwrap_or(0);
    let psi = Involution::canonical(m, f)?;
    let seed = cfg.seed()?;
    let trials = cfg.trials.unwrap_or(1000);
    let window = cfg.window.unwrap_or_else(|| montecarlo::default_window(m));
    let k_max = cfg.k_max.unwrap_or(2).min(m);
    let summary = montecarlo::estimate_with_jobs(&psi, k_max, trials, seed, window, cfg.jobs)?;
    let cheb = ChebyshevConfig::default();
    let theta = f as f64 / m as f64;
    let rows = summary
        .per_k
        .iter()
        .map(|row| {
            let k = row.k;
            let average = if m <= cheb.exact_max_m {
                exact::average_exact(m, f, k).map(|a| Rational(a).to_f64())?
            } else {
                average_log(m, f, k)?
            };
            let center = main_term(k, theta)?;
            let bound = cheb.bound(m, f, k, window)?;
            let z_score = if row.std_error > 0.0 {
                (row.mean_ratio - average) / row.std_error
            } else if row.mean_ratio == average {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(ConcentrationRow {
                k,
                average,
                main_term: center,
                second_moment: cheb.second_moment(m, f, k, center)?,
                chebyshev_bound: bound,
                within_window_fraction: row.within_window_fraction,
                mean_ratio: row.mean_ratio,
                std_error: row.std_error,
                z_score,
                bound_holds: row.within_window_fraction >= bound - CHEBYSHEV_SLACK,
                mean_consistent: z_score.abs() <= MAX_Z,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcentrationOutput {
        schema_version: SCHEMA_VERSION,
        m,
        f,
        trials,
        seed,
        window,
        rows,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(report: &Report) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match report {
        Report::Exact(r) => csv_rows(
            &mut buf,
            &["m", "f", "k", "a", "s2", "var", "a_approx", "var_approx"],
            r.rows.iter().map(|row| {
                vec![
                    r.m.to_string(),
                    r.f.to_string(),
                    row.k.to_string(),
                    row.a.clone(),
                    row.s2.clone(),
                    row.var.clone(),
                    row.a_approx.to_string(),
                    row.var_approx.to_string(),
                ]
            }),
        )?,
        Report::Oracle(o) => csv_rows(
            &mut buf,
            &["m", "f", "total_vectors", "k", "sum_mk", "sum_mk_sq"],
            o.report.per_k.iter().map(|row| {
                vec![
                    o.report.m.to_string(),
                    o.report.f.to_string(),
                    o.report.total_vectors.to_string(),
                    row.k.to_string(),
                    row.sum_mk.to_string(),
                    row.sum_mk_sq.to_string(),
                ]
            }),
        )?,
        Report::Sample(s) => s.summary.write_csv(&mut buf)?,
        Report::Concentration(c) => csv_rows(
            &mut buf,
            &[
                "m",
                "f",
                "k",
                "average",
                "main_term",
                "second_moment",
                "chebyshev_bound",
                "within_window_fraction",
                "mean_ratio",
                "std_error",
                "z_score",
                "bound_holds",
                "mean_consistent",
            ],
            c.rows.iter().map(|row| {
                vec![
                    c.m.to_string(),
                    c.f.to_string(),
                    row.k.to_string(),
                    row.average.to_string(),
                    row.main_term.to_string(),
                    row.second_moment.to_string(),
                    row.chebyshev_bound.to_string(),
                    row.within_window_fraction.to_string(),
                    row.mean_ratio.to_string(),
                    row.std_error.to_string(),
                    row.z_score.to_string(),
                    row.bound_holds.to_string(),
                    row.mean_consistent.to_string(),
                ]
            }),
        )?,
        Report::Threshold(t) => csv_rows(
            &mut buf,
            &[
                "trial",
                "absent",
                "band_inside",
                "b_size",
                "b_cap_components",
                "construction_succeeded",
                "adversarial_witness",
                "greedy_witness",
                "random_phi_witnesses",
            ],
            t.report.rows.iter().map(|row| {
                vec![
                    row.trial.to_string(),
                    row.absent.to_string(),
                    row.band_inside.to_string(),
                    row.b_size.to_string(),
                    row.b_cap_components.to_string(),
                    row.construction_succeeded.to_string(),
                    row.adversarial_witness.to_string(),
                    row.greedy_witness.to_string(),
                    row.random_phi_witnesses.to_string(),
                ]
            }),
        )?,
        Report::Witness(w) => csv_rows(
            &mut buf,
            &["trial", "b_size", "cases", "witnessed", "u", "v", "occ_u", "occ_v"],
            w.report.rows.iter().map(|row| {
                let opt = |f: fn(&experiments::WitnessPair) -> String| row.example.as_ref().map(f).unwrap_or_default();
                vec![
                    row.trial.to_string(),
                    row.b_size.to_string(),
                    row.cases.to_string(),
                    row.witnessed.to_string(),
                    opt(|w| w.u.to_string()),
                    opt(|w| w.v.to_string()),
                    opt(|w| w.occ_u.to_string()),
                    opt(|w| w.occ_v.to_string()),
                ]
            }),
        )?,
        Report::Factorial(fo) => {
            let profile = numtheory::factorial_profile(fo.p)?;
            numtheory::write_csv(&profile, &fo.rows, &mut buf)?;
        }
    }
    Ok(buf)
}

pub fn render(report: &Report, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => Ok(to_json(report)?.into_bytes()),
        OutputFormat::Csv => to_csv(report),
    }
}

/// CSV for `factorial`, JSON for everything else.
pub fn default_format(command: Option<Command>) -> OutputFormat {
    match command {
        Some(Command::Factorial) => OutputFormat::Csv,
        _ => OutputFormat::Json,
    }
}

/// Parses `args`, runs the command and writes the report to `--output-path`
/// or `stdout`. Diagnostics go to `stderr`. Returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    let flags = cli.to_config();
    cfg.overlay(&flags);
    // The subcommand always wins over a command named in the file.
    cfg.command = flags.command;
    let report = run(&cfg)?;
    let format = cfg.output_format.unwrap_or(default_format(flags.command));
    let bytes = render(&report, format)?;
    match &cfg.output_path {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(
            std::iter::once("involution-occ").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exact_example() {
        let (code, out, _) = run_args(&["exact", "--m", "4", "--f", "0", "--k", "1"]);
        assert_eq!(code, 0);
        let report: Report = serde_json::from_str(&out).unwrap();
        let Report::Exact(r) = report else { panic!("wrong report") };
        assert_eq!(r.rows[0].a.to_string(), "1/2");
        assert_eq!(r.rows[0].s2, "128");
        assert_eq!(r.rows[0].var.to_string(), "1/4");
        assert!(out.contains("\"schema_version\": 1"));
    }

    #[test]
    fn unknown_flag_is_validation_error() {
        let (code, _, err) = run_args(&["exact", "--m", "4", "--bogus", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("--bogus"));
        let (code, _, _) = run_args(&["exact", "--m", "4", "--trials", "3"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn precondition_failures_exit_one() {
        assert_eq!(run_args(&["exact", "--m", "5"]).0, 1);
        assert_eq!(run_args(&["exact"]).0, 1);
        assert_eq!(run_args(&["factorial", "--p", "4"]).0, 1);
        let (code, _, err) = run_args(&["sample", "--m", "4"]);
        assert_eq!(code, 1);
        assert!(err.contains("--seed"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["sample", "--help"]);
        assert_eq!(code, 0);
        for flag in ["--m", "--f", "--k-max", "--trials", "--seed", "--window", "--jobs", "--config"] {
            assert!(out.contains(flag), "{flag} missing from help");
        }
    }

    #[test]
    fn config_overlay() {
        let mut base = RunConfig {
            m: Some(4),
            f: Some(2),
            seed: Some(3),
            ..Default::default()
        };
        base.overlay(&RunConfig {
            f: Some(0),
            ..Default::default()
        });
        assert_eq!((base.m, base.f, base.seed), (Some(4), Some(0), Some(3)));
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"m": 4, "bogus": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"command": "sample", "m": 4, "output_format": "csv"}"#).unwrap();
        assert_eq!(c.command, Some(Command::Sample));
        assert_eq!(c.output_format, Some(OutputFormat::Csv));
    }
}
