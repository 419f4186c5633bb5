//! System parameters, power control and the pilot-overhead (prelog) bookkeeping.
//!
//! A [`Scenario`] is geometry free: large-scale fading enters as linear gains,
//! one pair `(beta_g[k], beta_h[k])` per group. Group `k` pairs the `k`-th
//! cell-center user with the `k`-th cell-edge user.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Orthogonal access: center users in a fraction `eta` of the resources,
    /// edge users in the remaining `1 - eta`.
    #[serde(rename = "O", alias = "o")]
    Orthogonal,
    /// Shared-pilot NOMA: one pilot and one beam per (center, edge) group.
    #[serde(rename = "N", alias = "n")]
    Noma,
    /// Reference scheme: all `K` users served at once with `K` orthogonal
    /// uplink pilots and no downlink pilots.
    #[serde(rename = "baseline", alias = "baseline_K")]
    Baseline,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Orthogonal => "O",
            Scheme::Noma => "N",
            Scheme::Baseline => "baseline",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// What the users know about their effective downlink gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Users know their instantaneous gains (benchmark).
    PerfectCsir,
    /// Users only know channel statistics.
    NoCsir,
    /// Users estimate their gains from beamformed downlink pilots.
    DlPilot,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::PerfectCsir, Regime::NoCsir, Regime::DlPilot];

    pub fn label(self) -> &'static str {
        match self {
            Regime::PerfectCsir => "perfect_csir",
            Regime::NoCsir => "no_csir",
            Regime::DlPilot => "dl_pilot",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrelogMode {
    #[default]
    Apply,
    Omit,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("antenna count M must be positive")]
    NoAntennas,
    #[error("user count K = {0} must be a positive even integer")]
    KOdd(usize),
    #[error("{pilots} pilots (K/2) do not fit in a coherence interval of T = {t} symbols")]
    PilotsExceedCoherence { pilots: usize, t: usize },
    #[error("{field}[{index}] = {value} must be strictly positive and finite")]
    NonPositive {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("beta_g has {beta_g} entries and beta_h has {beta_h}; both need K/2 = {groups}")]
    LengthMismatch {
        beta_g: usize,
        beta_h: usize,
        groups: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error("{constraint} power sum {total} exceeds 1 by {excess}")]
    SumPowerExceeded {
        constraint: &'static str,
        total: f64,
        excess: f64,
    },
    #[error("{field}[{index}] = {value} outside [0, 1]")]
    AlphaOutOfRange {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{field}[{index}] = {value} must be nonnegative and finite")]
    NegativeGamma {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("time share eta = {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("{field} has {len} entries, expected K/2 = {groups}")]
    LengthMismatch {
        field: &'static str,
        len: usize,
        groups: usize,
    },
}

/// Slack allowed on the power sums so that float splits such as 0.3 + 0.7 pass.
const POWER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "M", alias = "m")]
    pub m: usize,
    #[serde(rename = "K", alias = "k")]
    pub k: usize,
    #[serde(rename = "T", alias = "t")]
    pub t: usize,
    pub beta_g: Vec<f64>,
    pub beta_h: Vec<f64>,
    pub p_u: f64,
    pub p_d: f64,
    #[serde(default)]
    pub noise_free_ul: bool,
    #[serde(default)]
    pub prelog_mode: PrelogMode,
}

impl Scenario {
    /// A symmetric scenario: every group shares `(beta_g, beta_h)`.
    pub fn symmetric(m: usize, k: usize, t: usize, beta_g: f64, beta_h: f64, p_u: f64, p_d: f64) -> Self {
        let groups = k / 2;
        Self {
            m,
            k,
            t,
            beta_g: vec![beta_g; groups],
            beta_h: vec![beta_h; groups],
            p_u,
            p_d,
            noise_free_ul: false,
            prelog_mode: PrelogMode::Apply,
        }
    }

    pub fn with_noise_free_ul(mut self, on: bool) -> Self {
        self.noise_free_ul = on;
        self
    }

    pub fn with_prelog(mut self, mode: PrelogMode) -> Self {
        self.prelog_mode = mode;
        self
    }

    /// Number of groups (and of orthogonal pilots), `K/2`.
    pub fn groups(&self) -> usize {
        self.k / 2
    }

    /// Large-scale gain of user `u`, where users `0..K/2` are the cell-center
    /// users and `K/2..K` the cell-edge users.
    pub fn beta(&self, user: usize) -> f64 {
        let g = self.groups();
        if user < g {
            self.beta_g[user]
        } else {
            self.beta_h[user - g]
        }
    }
}

/// Checks every scenario invariant, returning the scenario unchanged on success.
pub fn validate_scenario(raw: Scenario) -> Result<Scenario, ScenarioError> {
    if raw.m == 0 {
        return Err(ScenarioError::NoAntennas);
    }
    if raw.k == 0 || !raw.k.is_multiple_of(2) {
        return Err(ScenarioError::KOdd(raw.k));
    }
    let groups = raw.k / 2;
    if groups > raw.t {
        return Err(ScenarioError::PilotsExceedCoherence { pilots: groups, t: raw.t });
    }
    if raw.beta_g.len() != groups || raw.beta_h.len() != groups {
        return Err(ScenarioError::LengthMismatch {
            beta_g: raw.beta_g.len(),
            beta_h: raw.beta_h.len(),
            groups,
        });
    }
    let positive = |field: &'static str, values: &[f64]| -> Result<(), ScenarioError> {
        match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            Some(index) => Err(ScenarioError::NonPositive { field, index, value: values[index] }),
            None => Ok(()),
        }
    };
    positive("beta_g", &raw.beta_g)?;
    positive("beta_h", &raw.beta_h)?;
    positive("p_u", &[raw.p_u])?;
    positive("p_d", &[raw.p_d])?;
    Ok(raw)
}

/// Pilot and data power control for one operating point.
///
/// `alpha_*` scale the uplink pilots, `gamma_*` split the downlink power and
/// `eta` is the Scheme-O time share of the center users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerControl {
    pub alpha_g: Vec<f64>,
    pub alpha_h: Vec<f64>,
    pub gamma_g: Vec<f64>,
    pub gamma_h: Vec<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_eta() -> f64 {
    0.5
}

impl PowerControl {
    /// Same allocation in every group.
    pub fn uniform(groups: usize, alpha_g: f64, alpha_h: f64, gamma_g: f64, gamma_h: f64, eta: f64) -> Self {
        Self {
            alpha_g: vec![alpha_g; groups],
            alpha_h: vec![alpha_h; groups],
            gamma_g: vec![gamma_g; groups],
            gamma_h: vec![gamma_h; groups],
            eta,
        }
    }

    /// Full pilot power and an equal split of the total downlink power.
    pub fn equal_split(groups: usize) -> Self {
        let share = 1.0 / (2 * groups) as f64;
        Self::uniform(groups, 1.0, 1.0, share, share, 0.5)
    }

    /// Pilot weight of user `u` (center users first, then edge users).
    pub fn alpha(&self, user: usize) -> f64 {
        let g = self.alpha_g.len();
        if user < g {
            self.alpha_g[user]
        } else {
            self.alpha_h[user - g]
        }
    }

    /// Data weight of user `u` (center users first, then edge users).
    pub fn gamma(&self, user: usize) -> f64 {
        let g = self.gamma_g.len();
        if user < g {
            self.gamma_g[user]
        } else {
            self.gamma_h[user - g]
        }
    }

    /// True when both power controls drive the uplink pilots identically.
    pub fn same_pilots(&self, other: &PowerControl) -> bool {
        self.alpha_g == other.alpha_g && self.alpha_h == other.alpha_h
    }
}

/// Checks the power-control ranges and the scheme's power constraints.
pub fn validate_power(pc: PowerControl, sc: &Scenario, scheme: Scheme) -> Result<PowerControl, PowerError> {
    let groups = sc.groups();
    for (field, v) in [
        ("alpha_g", &pc.alpha_g),
        ("alpha_h", &pc.alpha_h),
        ("gamma_g", &pc.gamma_g),
        ("gamma_h", &pc.gamma_h),
    ] {
        if v.len() != groups {
            return Err(PowerError::LengthMismatch { field, len: v.len(), groups });
        }
    }
    for (field, v) in [("alpha_g", &pc.alpha_g), ("alpha_h", &pc.alpha_h)] {
        if let Some(index) = v.iter().position(|a| !(0.0..=1.0).contains(a)) {
            return Err(PowerError::AlphaOutOfRange { field, index, value: v[index] });
        }
    }
    for (field, v) in [("gamma_g", &pc.gamma_g), ("gamma_h", &pc.gamma_h)] {
        if let Some(index) = v.iter().position(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(PowerError::NegativeGamma { field, index, value: v[index] });
        }
    }
    if !(0.0..=1.0).contains(&pc.eta) {
        return Err(PowerError::EtaOutOfRange(pc.eta));
    }
    let sum_g: f64 = pc.gamma_g.iter().sum();
    let sum_h: f64 = pc.gamma_h.iter().sum();
    let check = |constraint: &'static str, total: f64| {
        if total > 1.0 + POWER_SLACK {
            Err(PowerError::SumPowerExceeded { constraint, total, excess: total - 1.0 })
        } else {
            Ok(())
        }
    };
    match scheme {
        Scheme::Noma | Scheme::Baseline => check("joint", sum_g + sum_h)?,
        Scheme::Orthogonal => {
            check("center slot", sum_g)?;
            check("edge slot", sum_h)?;
        }
    }
    Ok(pc)
}

/// Fraction of each coherence interval left for data.
///
/// Without downlink pilots `K/2` uplink pilot symbols are spent; with them
/// (and in the perfect-CSIR benchmark, whose gains they would provide) `K`
/// symbols. The reference scheme always spends `K` uplink symbols. The
/// Scheme-O time share is applied by the rate evaluators, not here.
pub fn prelog_factor(sc: &Scenario, regime: Regime, scheme: Scheme) -> f64 {
    if sc.prelog_mode == PrelogMode::Omit {
        return 1.0;
    }
    let k = sc.k as f64;
    let t = sc.t as f64;
    let overhead = match (scheme, regime) {
        (Scheme::Baseline, _) => k / t,
        (_, Regime::NoCsir) => k / (2.0 * t),
        (_, Regime::PerfectCsir | Regime::DlPilot) => k / t,
    };
    (1.0 - overhead).max(0.0)
}

/// Monte-Carlo run parameters.
///
/// Trials are processed in blocks of `chunk` and the block sums combined in
/// block order, so results do not depend on the number of worker threads.
/// With `antithetic` set, trials come in runs of four sharing one base draw
/// with sign-flipped channel and noise components (see `channel`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub trials: u64,
    pub base_seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk: u64,
    #[serde(default)]
    pub antithetic: bool,
}

fn default_chunk() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("chunk must be at least 1")]
    ZeroChunk,
    #[error("trial {trial} out of range for {trials} trials")]
    TrialOutOfRange { trial: u64, trials: u64 },
}

impl McConfig {
    pub fn new(trials: u64, base_seed: u64) -> Self {
        Self { trials, base_seed, chunk: default_chunk(), antithetic: false }
    }

    pub fn with_chunk(mut self, chunk: u64) -> Self {
        self.chunk = chunk;
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn validate(self) -> Result<Self, McError> {
        if self.trials == 0 {
            return Err(McError::NoTrials);
        }
        if self.chunk == 0 {
            return Err(McError::ZeroChunk);
        }
        Ok(self)
    }

    pub fn chunks(&self) -> u64 {
        self.trials.div_ceil(self.chunk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> Scenario {
        Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0)
    }

    #[test]
    fn accepts_small_antenna_setup() {
        assert!(validate_scenario(fig3()).is_ok());
    }

    #[test]
    fn rejects_odd_user_count() {
        let mut sc = fig3();
        sc.k = 3;
        assert_eq!(validate_scenario(sc), Err(ScenarioError::KOdd(3)));
    }

    #[test]
    fn rejects_pilots_beyond_coherence() {
        let sc = Scenario::symmetric(10, 4, 1, 100.0, 1.0, 1.0, 1.0);
        assert_eq!(
            validate_scenario(sc),
            Err(ScenarioError::PilotsExceedCoherence { pilots: 2, t: 1 })
        );
    }

    #[test]
    fn rejects_nonpositive_gain_and_power() {
        let mut sc = fig3();
        sc.beta_h[0] = 0.0;
        assert!(matches!(
            validate_scenario(sc),
            Err(ScenarioError::NonPositive { field: "beta_h", .. })
        ));
        let mut sc = fig3();
        sc.p_d = -1.0;
        assert!(matches!(
            validate_scenario(sc),
            Err(ScenarioError::NonPositive { field: "p_d", .. })
        ));
    }

    #[test]
    fn rejects_length_mismatch() {
        let mut sc = fig3();
        sc.beta_h.push(1.0);
        assert!(matches!(validate_scenario(sc), Err(ScenarioError::LengthMismatch { .. })));
    }

    #[test]
    fn noma_power_constraint_is_joint() {
        let sc = fig3();
        let ok = PowerControl::uniform(1, 1.0, 1.0, 0.5, 0.5, 0.5);
        assert!(validate_power(ok, &sc, Scheme::Noma).is_ok());
        let bad = PowerControl::uniform(1, 1.0, 1.0, 0.7, 0.5, 0.5);
        match validate_power(bad, &sc, Scheme::Noma) {
            Err(PowerError::SumPowerExceeded { constraint, excess, .. }) => {
                assert_eq!(constraint, "joint");
                assert!((excess - 0.2).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orthogonal_constraints_are_per_slot() {
        let sc = fig3();
        let full = PowerControl::uniform(1, 1.0, 1.0, 1.0, 1.0, 0.5);
        assert!(validate_power(full.clone(), &sc, Scheme::Orthogonal).is_ok());
        assert!(validate_power(full, &sc, Scheme::Noma).is_err());
        let over = PowerControl::uniform(1, 1.0, 1.0, 1.0, 1.1, 0.5);
        assert!(matches!(
            validate_power(over, &sc, Scheme::Orthogonal),
            Err(PowerError::SumPowerExceeded { constraint: "edge slot", .. })
        ));
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        let sc = fig3();
        let pc = PowerControl::uniform(1, 1.2, 1.0, 0.5, 0.5, 0.5);
        assert!(matches!(
            validate_power(pc, &sc, Scheme::Noma),
            Err(PowerError::AlphaOutOfRange { field: "alpha_g", .. })
        ));
    }

    #[test]
    fn prelog_values() {
        let sc = fig3();
        assert!((prelog_factor(&sc, Regime::NoCsir, Scheme::Noma) - 0.995).abs() < 1e-15);
        assert!((prelog_factor(&sc, Regime::DlPilot, Scheme::Noma) - 0.99).abs() < 1e-15);
        assert!((prelog_factor(&sc, Regime::PerfectCsir, Scheme::Orthogonal) - 0.99).abs() < 1e-15);
        assert!((prelog_factor(&sc, Regime::NoCsir, Scheme::Baseline) - 0.99).abs() < 1e-15);
        let omit = sc.with_prelog(PrelogMode::Omit);
        for regime in Regime::ALL {
            assert_eq!(prelog_factor(&omit, regime, Scheme::Noma), 1.0);
        }
    }

    #[test]
    fn prelog_monotone_in_k_and_t() {
        for regime in Regime::ALL {
            let mut last = f64::INFINITY;
            for k in [2, 4, 8, 16] {
                let p = prelog_factor(&Scenario::symmetric(10, k, 50, 10.0, 1.0, 1.0, 1.0), regime, Scheme::Noma);
                assert!(p <= last);
                last = p;
            }
            let mut last = 0.0;
            for t in [8, 20, 200, 2000] {
                let p = prelog_factor(&Scenario::symmetric(10, 4, t, 10.0, 1.0, 1.0, 1.0), regime, Scheme::Noma);
                assert!(p >= last);
                last = p;
            }
        }
    }

    #[test]
    fn noma_acceptance_implies_orthogonal_when_each_slot_fits() {
        let sc = Scenario::symmetric(10, 4, 50, 10.0, 1.0, 1.0, 1.0);
        let pc = PowerControl::uniform(2, 1.0, 1.0, 0.3, 0.2, 0.5);
        assert!(validate_power(pc.clone(), &sc, Scheme::Noma).is_ok());
        assert!(validate_power(pc, &sc, Scheme::Orthogonal).is_ok());
    }

    #[test]
    fn mc_config_validation() {
        assert_eq!(McConfig::new(0, 1).validate(), Err(McError::NoTrials));
        assert_eq!(McConfig::new(10, 1).with_chunk(0).validate(), Err(McError::ZeroChunk));
        assert_eq!(McConfig::new(10, 1).with_chunk(3).chunks(), 4);
    }
}
