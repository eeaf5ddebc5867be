//! Occurrence statistics for vectors that are symmetric under an involution.
//!
//! A vector `x` of even length `m` over the ids `0..m` is symmetric under an
//! involution `psi` when `x[m - 1 - j] == psi(x[j])`. For such vectors this
//! crate computes the number `m_k(x)` of ids occurring exactly `k` times:
//! exact averages and second moments ([`exact`]), log-domain asymptotics
//! ([`asymptotic`]), brute-force enumeration ([`oracle`]), Monte Carlo
//! estimates ([`montecarlo`]), set-and-bijection witness experiments
//! ([`experiments`]) and factorials modulo a prime ([`numtheory`]).

pub mod asymptotic;
pub mod cli;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod numtheory;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{expand, occurrence_profile, FreeHalf, Involution, OccurrenceProfile, SymmetricVector};
