//! TOML experiment configuration.
//!
//! ```toml
//! [scenario]
//! M = 10
//! K = 2
//! T = 200
//! beta_g = 100.0      # one value for every group, or a list
//! beta_h = 1.0
//! p_u = 1.0
//! p_d = 1.0
//!
//! [mc]
//! trials = 10000
//! base_seed = 1
//!
//! [grid]
//! preset = "fine"     # "default" | "fine" | "sum_rate"; explicit lists override
//!
//! [experiment]
//! command = "region"
//! regimes = ["no_csir", "perfect_csir"]
//! ```

use serde::{Deserialize, Serialize};

use crate::region::{uniform_levels, GammaGrid, GridSpec};
use crate::scenario::{McConfig, PowerControl, PrelogMode, Regime, Scenario, Scheme};

use super::Command;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn expand(&self, groups: usize) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v; groups],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    fn first(&self) -> f64 {
        match self {
            OneOrMany::One(v) => *v,
            OneOrMany::Many(v) => v.first().copied().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "M", alias = "m")]
    pub m: usize,
    #[serde(rename = "K", alias = "k")]
    pub k: usize,
    #[serde(rename = "T", alias = "t")]
    pub t: usize,
    pub beta_g: OneOrMany,
    pub beta_h: OneOrMany,
    #[serde(default = "one")]
    pub p_u: f64,
    #[serde(default = "one")]
    pub p_d: f64,
    #[serde(default)]
    pub noise_free_ul: bool,
    #[serde(default)]
    pub prelog_mode: PrelogMode,
}

fn one() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn scenario(&self) -> Scenario {
        let groups = self.k / 2;
        Scenario {
            m: self.m,
            k: self.k,
            t: self.t,
            beta_g: self.beta_g.expand(groups),
            beta_h: self.beta_h.expand(groups),
            p_u: self.p_u,
            p_d: self.p_d,
            noise_free_ul: self.noise_free_ul,
            prelog_mode: self.prelog_mode,
        }
    }

    /// Symmetric copy with a different antenna count, user count or center
    /// gain, as used by the sweeps.
    pub fn variant(&self, m: usize, k: usize, beta_g: f64) -> Scenario {
        Scenario {
            m,
            k,
            beta_g: vec![beta_g; k / 2],
            beta_h: vec![self.beta_h.first(); k / 2],
            ..self.scenario()
        }
    }

    pub fn beta_g_first(&self) -> f64 {
        self.beta_g.first()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    Default,
    Fine,
    SumRate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub preset: Option<GridPreset>,
    pub alpha_g: Option<Vec<f64>>,
    pub alpha_h: Option<Vec<f64>>,
    /// Number of uniform levels of the center share of each group's power.
    pub split_levels: Option<usize>,
    pub gamma_g: Option<Vec<f64>>,
    pub gamma_h: Option<Vec<f64>>,
    pub eta: Option<Vec<f64>>,
}

impl GridConfig {
    pub fn spec(&self, fallback: GridPreset) -> GridSpec {
        let mut spec = match self.preset.unwrap_or(fallback) {
            GridPreset::Default => GridSpec::region_default(),
            GridPreset::Fine => GridSpec::region_fine(),
            GridPreset::SumRate => GridSpec::sum_rate_default(),
        };
        if let Some(v) = &self.alpha_g {
            spec.alpha_g = v.clone();
        }
        if let Some(v) = &self.alpha_h {
            spec.alpha_h = v.clone();
        }
        if let Some(n) = self.split_levels {
            spec.gamma = GammaGrid::Split(uniform_levels(n));
        }
        if let (Some(g), Some(h)) = (&self.gamma_g, &self.gamma_h) {
            spec.gamma = GammaGrid::Explicit { gamma_g: g.clone(), gamma_h: h.clone() };
        }
        if let Some(v) = &self.eta {
            spec.eta = v.clone();
        }
        spec
    }
}

/// Operating point for `validate`, shared by all groups. Missing data powers
/// default to an equal split of the full budget.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    pub alpha_g: Option<f64>,
    pub alpha_h: Option<f64>,
    pub gamma_g: Option<f64>,
    pub gamma_h: Option<f64>,
    pub eta: Option<f64>,
}

impl PowerConfig {
    /// Scheme-N power control; Scheme-O and the reference scheme use full
    /// pilot power and the full per-slot budget.
    pub fn power(&self, sc: &Scenario, scheme: Scheme) -> PowerControl {
        let groups = sc.groups().max(1);
        let half = 0.5 / groups as f64;
        let full = 1.0 / groups as f64;
        let eta = self.eta.unwrap_or(0.5);
        match scheme {
            Scheme::Noma => PowerControl::uniform(
                groups,
                self.alpha_g.unwrap_or(1.0),
                self.alpha_h.unwrap_or(1.0),
                self.gamma_g.unwrap_or(half),
                self.gamma_h.unwrap_or(half),
                eta,
            ),
            Scheme::Orthogonal => PowerControl::uniform(groups, 1.0, 1.0, full, full, eta),
            Scheme::Baseline => PowerControl::uniform(groups, 1.0, 1.0, half, half, eta),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    /// Regimes swept by `region`.
    pub regimes: Option<Vec<Regime>>,
    /// Schemes swept by `region`.
    pub schemes: Option<Vec<Scheme>>,
    /// Regime of the sum-rate sweeps.
    pub regime: Option<Regime>,
    /// Sweep values: antennas, center gain, or number of users.
    pub values: Option<Vec<f64>>,
}

fn default_mc() -> McConfig {
    McConfig::new(10_000, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    #[serde(default = "default_mc")]
    pub mc: McConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub power: PowerConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [scenario]
        M = 10
        K = 4
        T = 200
        beta_g = 100.0
        beta_h = [1.0, 2.0]
    "#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = Config::from_toml(MINIMAL).unwrap();
        let sc = c.scenario.scenario();
        assert_eq!(sc.beta_g, vec![100.0, 100.0]);
        assert_eq!(sc.beta_h, vec![1.0, 2.0]);
        assert_eq!(sc.p_u, 1.0);
        assert_eq!(c.mc, McConfig::new(10_000, 1));
        assert_eq!(c.grid.spec(GridPreset::Default), GridSpec::region_default());
    }

    #[test]
    fn grid_overrides() {
        let text = format!("{MINIMAL}\n[grid]\npreset = \"fine\"\nsplit_levels = 3\neta = [0.5]\n");
        let spec = Config::from_toml(&text).unwrap().grid.spec(GridPreset::Default);
        assert_eq!(spec.alpha_g, GridSpec::region_fine().alpha_g);
        assert_eq!(spec.gamma, GammaGrid::Split(vec![0.0, 0.5, 1.0]));
        assert_eq!(spec.eta, vec![0.5]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml(&format!("{MINIMAL}\n[mc]\ntrials = 5\nbase_seed = 1\nbogus = 2\n")).is_err());
        assert!(Config::from_toml("[scenario]\nM = 1\n").is_err());
    }

    #[test]
    fn variant_resizes_groups() {
        let c = Config::from_toml(MINIMAL).unwrap();
        let sc = c.scenario.variant(100, 8, 50.0);
        assert_eq!(sc.beta_g, vec![50.0; 4]);
        assert_eq!(sc.beta_h, vec![1.0; 4]);
        assert_eq!(sc.t, 200);
    }
}
