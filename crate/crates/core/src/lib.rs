//! Ergodic achievable rates of a single-cell massive MIMO downlink in which
//! users are paired into (center, edge) groups, comparing orthogonal access
//! (Scheme-O), shared-pilot NOMA with superposition coding and SIC
//! (Scheme-N), and `K`-user multiuser beamforming.
//!
//! The pipeline runs uplink training ([`channel`]), MMSE estimation and
//! downlink gain estimation ([`estimation`]), MRT beamforming and rate
//! evaluation ([`rates`]), and grid-search power control ([`region`]).
//! [`experiment`] wires it to TOML configs and CSV/JSON output.
//!
//! Monte-Carlo results are reproducible: every random stream is keyed by
//! `(seed, trial, role, index)` and reductions run in fixed chunk order, so
//! the number of worker threads never changes a result.

pub mod channel;
pub mod estimation;
pub mod experiment;
pub mod rates;
pub mod region;
pub mod scenario;

pub use rates::{rate_dl_pilot, rate_no_csir, rate_perfect_csir, RateError, RatePoint};
pub use region::{constrained_sum_rate, pareto_hull, power_grid, sweep_rate_region, GridSpec, RateRegion};
pub use scenario::{McConfig, PowerControl, PrelogMode, Regime, Scenario, Scheme};
