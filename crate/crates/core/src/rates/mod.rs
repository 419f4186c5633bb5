//! Ergodic achievable rates for every (scheme, CSI regime) pair.
//!
//! | regime         | evaluator             | method                         |
//! |----------------|-----------------------|--------------------------------|
//! | perfect CSIR   | [`rate_perfect_csir`] | Monte Carlo of `log2(1+SINR)`  |
//! | no CSIR        | [`rate_no_csir`]      | closed form (hardening bound)  |
//! | DL pilots      | [`rate_dl_pilot`]     | Monte Carlo moments, then SINR |
//!
//! [`hardening_oracle_moments`] rebuilds the no-CSIR SINR terms from
//! simulated realizations and is the independent check on the closed forms.

mod beams;
mod closed_form;
mod dl_pilot;
mod engine;
mod oracle;
mod perfect;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use beams::{build_mrt_beams, Beams};
pub use closed_form::{no_csir_decodability_margin, no_csir_terms, rate_no_csir, SinrTerms};
pub use dl_pilot::{dl_pilot_moments, rate_dl_pilot, rate_dl_pilot_batch, GainMoments};
pub use oracle::{hardening_oracle_moments, HardeningMoments};
pub use perfect::{rate_perfect_csir, rate_perfect_csir_batch};

use crate::estimation::EstimationError;
use crate::scenario::{
    prelog_factor, validate_power, validate_scenario, McConfig, McError, PowerControl, PowerError, Regime, Scenario,
    ScenarioError, Scheme,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("non-finite {quantity} = {value} in trial {trial}")]
    Divergence { trial: u64, quantity: &'static str, value: f64 },
    #[error("group {group}: the center user cannot decode the edge user's data (margin {margin} b/s/Hz)")]
    DecodabilityViolated { group: usize, margin: f64 },
    #[error("{rejected} of {samples} downlink gain estimates fell below the floor")]
    DegenerateEstimate { rejected: u64, samples: u64 },
    #[error("scheme {scheme} has no {regime} evaluator")]
    UnsupportedScheme { scheme: Scheme, regime: Regime },
    #[error("batched power controls must share the same pilot weights")]
    MixedPilots,
}

/// Per-user ergodic rates in b/s/Hz for one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub scheme: Scheme,
    pub regime: Regime,
    pub power: PowerControl,
    pub rates_g: Vec<f64>,
    pub rates_h: Vec<f64>,
    /// Monte-Carlo standard errors; `None` for closed forms.
    pub stderr_g: Option<Vec<f64>>,
    pub stderr_h: Option<Vec<f64>>,
    /// Downlink gain samples discarded by the near-zero-estimate guard.
    #[serde(default)]
    pub rejected_samples: u64,
}

impl RatePoint {
    pub fn sum_center(&self) -> f64 {
        self.rates_g.iter().sum()
    }

    pub fn sum_edge(&self) -> f64 {
        self.rates_h.iter().sum()
    }

    pub fn sum_rate(&self) -> f64 {
        self.sum_center() + self.sum_edge()
    }

    fn scale(mut self, center: f64, edge: f64) -> Self {
        self.rates_g.iter_mut().for_each(|r| *r *= center);
        self.rates_h.iter_mut().for_each(|r| *r *= edge);
        if let Some(se) = self.stderr_g.as_mut() {
            se.iter_mut().for_each(|r| *r *= center);
        }
        if let Some(se) = self.stderr_h.as_mut() {
            se.iter_mut().for_each(|r| *r *= edge);
        }
        self
    }
}

/// Applies the pilot-overhead prelog and, for Scheme-O, the time shares
/// `eta` (center) and `1 - eta` (edge) to raw per-slot rates.
pub fn effective_rate(raw: RatePoint, sc: &Scenario, regime: Regime, scheme: Scheme) -> RatePoint {
    let prelog = prelog_factor(sc, regime, scheme);
    let (center, edge) = match scheme {
        Scheme::Orthogonal => (raw.power.eta, 1.0 - raw.power.eta),
        Scheme::Noma | Scheme::Baseline => (1.0, 1.0),
    };
    raw.scale(prelog * center, prelog * edge)
}

/// Decodability margin per group: rate of the edge user's data at the
/// center user minus its rate at the edge user. Nonnegative means the
/// center user can run SIC.
pub fn noma_decodability_margin(
    sc: &Scenario,
    pc: &PowerControl,
    regime: Regime,
    mc: &McConfig,
) -> Result<Vec<f64>, RateError> {
    match regime {
        Regime::NoCsir => {
            check_inputs(sc, pc, Scheme::Noma, None)?;
            Ok(no_csir_decodability_margin(sc, pc))
        }
        Regime::PerfectCsir => perfect::decodability_margin(sc, pc, mc),
        Regime::DlPilot => dl_pilot::decodability_margin(sc, pc, mc),
    }
}

pub(crate) fn check_inputs(
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    mc: Option<&McConfig>,
) -> Result<(), RateError> {
    validate_scenario(sc.clone())?;
    validate_power(pc.clone(), sc, scheme)?;
    if let Some(mc) = mc {
        mc.validate()?;
    }
    Ok(())
}

/// Users served in the same slot as user `u`, as beam indices, and the
/// power on each of those beams.
pub(crate) fn slot_beams(sc: &Scenario, scheme: Scheme, user: usize) -> std::ops::Range<usize> {
    let groups = sc.groups();
    match scheme {
        Scheme::Noma => 0..groups,
        Scheme::Baseline => 0..sc.k,
        Scheme::Orthogonal if user < groups => 0..groups,
        Scheme::Orthogonal => groups..sc.k,
    }
}

/// Total data power carried by beam `j`.
pub(crate) fn beam_power(pc: &PowerControl, scheme: Scheme, beam: usize) -> f64 {
    match scheme {
        Scheme::Noma => pc.gamma_g[beam] + pc.gamma_h[beam],
        Scheme::Orthogonal | Scheme::Baseline => pc.gamma(beam),
    }
}
