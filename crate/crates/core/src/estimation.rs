//! Uplink MMSE channel estimates, estimation-quality factors and the users'
//! LMMSE estimates of their beamformed downlink gains.
//!
//! For this model every MMSE estimate is a real scalar multiple of the
//! processed pilot, so only the scalar is computed here.

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{
    complex_gaussian_vec, dot, own_pilot, pilot_members, pilot_power, ChannelDraw, CVec, ProcessedPilots, StreamRole,
};
use crate::rates::Beams;
use crate::scenario::{McConfig, PowerControl, Scenario, Scheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimationError {
    #[error("pilots were processed for scheme {found}, estimator asked for {expected}")]
    SchemeMismatch { expected: Scheme, found: Scheme },
    #[error("{kind:?} estimates only exist for Scheme-N")]
    KindNeedsNoma { kind: EstimateKind },
}

/// Which channel an estimate targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// Scheme-N combined channel `w_k = sqrt(a_g b_g) g_k + sqrt(a_h b_h) h_k`.
    Combined,
    /// Scheme-N estimate of the center user's channel `g_k`.
    Center,
    /// Scheme-N estimate of the edge user's channel `h_k`.
    Edge,
    /// One estimate per user from its own orthogonal pilot.
    PerUser,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UlEstimates {
    pub scheme: Scheme,
    pub kind: EstimateKind,
    /// `vectors[j] = scales[j] * ybar[j]`.
    pub vectors: Vec<CVec>,
    pub scales: Vec<f64>,
    /// Per-antenna pilot power `E[||ybar_j||^2] / M`.
    pub pilot_power: Vec<f64>,
}

impl UlEstimates {
    /// Analytic `E[||estimate_j||^2]`.
    pub fn expected_norm_sqr(&self, j: usize) -> f64 {
        let m = self.vectors[j].len() as f64;
        self.scales[j] * self.scales[j] * self.pilot_power[j] * m
    }
}

/// MMSE scaling applied to pilot `j` for the requested estimate.
pub fn mmse_scale(sc: &Scenario, pc: &PowerControl, scheme: Scheme, pilot: usize, kind: EstimateKind) -> f64 {
    let d = pilot_power(sc, pc, scheme, pilot);
    if d == 0.0 {
        return 0.0;
    }
    let members = pilot_members(sc, pc, scheme, pilot);
    let numerator = match kind {
        EstimateKind::PerUser => members[0].1.sqrt(),
        EstimateKind::Center => members[0].1.sqrt(),
        EstimateKind::Edge => members[1].1.sqrt(),
        // E[w ybar^H] per antenna: sqrt(p_u) (alpha_g beta_g + alpha_h beta_h)
        EstimateKind::Combined => sc.p_u.sqrt() * (pc.alpha_g[pilot] * sc.beta_g[pilot] + pc.alpha_h[pilot] * sc.beta_h[pilot]),
    };
    numerator / d
}

/// The scheme's estimates: the combined channel for Scheme-N, per-user
/// channels otherwise.
pub fn mmse_ul_estimates(
    proc: &ProcessedPilots,
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
) -> Result<UlEstimates, EstimationError> {
    let kind = match scheme {
        Scheme::Noma => EstimateKind::Combined,
        Scheme::Orthogonal | Scheme::Baseline => EstimateKind::PerUser,
    };
    mmse_ul_estimates_as(proc, sc, pc, scheme, kind)
}

pub fn mmse_ul_estimates_as(
    proc: &ProcessedPilots,
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    kind: EstimateKind,
) -> Result<UlEstimates, EstimationError> {
    if proc.scheme != scheme {
        return Err(EstimationError::SchemeMismatch { expected: scheme, found: proc.scheme });
    }
    let is_noma_kind = kind != EstimateKind::PerUser;
    if is_noma_kind != (scheme == Scheme::Noma) {
        return Err(EstimationError::KindNeedsNoma { kind });
    }
    let pilots = proc.ybar.len();
    let scales: Vec<f64> = (0..pilots).map(|j| mmse_scale(sc, pc, scheme, j, kind)).collect();
    let vectors = proc
        .ybar
        .iter()
        .zip(&scales)
        .map(|(y, s)| y.iter().map(|v| v * *s).collect())
        .collect();
    Ok(UlEstimates {
        scheme,
        kind,
        vectors,
        scales,
        pilot_power: (0..pilots).map(|j| pilot_power(sc, pc, scheme, j)).collect(),
    })
}

/// Fraction of each user's channel energy captured by the estimate its beam
/// is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityFactors {
    pub scheme: Scheme,
    pub lambda_g: Vec<f64>,
    pub lambda_h: Vec<f64>,
}

impl QualityFactors {
    /// Quality factor of user `u` (center users first).
    pub fn user(&self, u: usize) -> f64 {
        let g = self.lambda_g.len();
        if u < g {
            self.lambda_g[u]
        } else {
            self.lambda_h[u - g]
        }
    }
}

/// `lambda = p_u alpha beta / (sum of pilot powers sharing the pilot + 1)`,
/// dropping the `+ 1` in noise-free mode. Scheme-O and the reference scheme
/// ignore `alpha`.
pub fn estimation_quality(sc: &Scenario, pc: &PowerControl, scheme: Scheme) -> QualityFactors {
    let groups = sc.groups();
    let lambda = |user: usize| {
        let pilot = own_pilot(sc, scheme, user);
        let d = pilot_power(sc, pc, scheme, pilot);
        if d == 0.0 {
            return 0.0;
        }
        let received = pilot_members(sc, pc, scheme, pilot)
            .into_iter()
            .find(|(u, _)| *u == user)
            .map(|(_, p)| p)
            .unwrap_or(0.0);
        received / d
    };
    QualityFactors {
        scheme,
        lambda_g: (0..groups).map(lambda).collect(),
        lambda_h: (groups..2 * groups).map(lambda).collect(),
    }
}

/// A user's estimate of its effective downlink gain `f = u^T a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlGainEstimate {
    pub f: Complex64,
    pub fhat: Complex64,
    pub prior_mean: f64,
    pub prior_var: f64,
}

/// LMMSE estimate of `f` from `y = amplitude * f + n`, `n ~ CN(0, 1)`.
pub fn lmmse_gain_estimate(y: Complex64, amplitude: f64, prior_mean: f64, prior_var: f64) -> Complex64 {
    let weight = amplitude * prior_var / (amplitude * amplitude * prior_var + 1.0);
    prior_mean + (y - amplitude * prior_mean) * weight
}

/// Simulates one beamformed downlink pilot per beam and returns every
/// user's gain estimate, indexed like the users (center users first).
///
/// Scheme-N sends one pilot per group along the shared beam; each user of
/// the group observes it through its own channel and noise.
pub fn dl_gain_estimate(
    sc: &Scenario,
    lambda: &QualityFactors,
    beams: &Beams,
    draw: &ChannelDraw,
    mc: &McConfig,
) -> Vec<DlGainEstimate> {
    (0..sc.k)
        .map(|u| {
            let beam = &beams.vectors[own_pilot(sc, beams.scheme, u)];
            let f = dot(draw.user(u), beam);
            let amplitude = (sc.p_d * sc.beta(u)).sqrt();
            let noise = complex_gaussian_vec(mc, draw.trial, StreamRole::DlPilotNoise, u as u32, 1)[0];
            let y = f * amplitude + noise;
            let prior_mean = (sc.m as f64 * lambda.user(u)).sqrt();
            DlGainEstimate { f, fhat: lmmse_gain_estimate(y, amplitude, prior_mean, 1.0), prior_mean, prior_var: 1.0 }
        })
        .collect()
}
