//! Closed-form rates without downlink CSI.
//!
//! Users decode against the mean of their effective gain. Every variant has
//! the form `p_d lambda beta gamma M / (coherent + p_d beta + 1)`, where only
//! the Scheme-N edge user sees a coherent term (the center user's data on the
//! shared beam); the center user removes it by SIC. The `p_d beta + 1` floor
//! is the exact non-coherent variance when the full power budget is used.

use super::{check_inputs, effective_rate, RateError, RatePoint};
use crate::estimation::estimation_quality;
use crate::scenario::{PowerControl, Regime, Scenario, Scheme};

/// Margin below which decodability is considered violated.
const DECODABILITY_SLACK: f64 = 1e-12;

/// SINR of one data stream split into its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTerms {
    pub signal: f64,
    pub coherent: f64,
    pub noncoherent: f64,
}

impl SinrTerms {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.coherent + self.noncoherent)
    }

    pub fn rate(&self) -> f64 {
        (1.0 + self.sinr()).log2()
    }
}

/// Per-user SINR terms, center users first.
pub fn no_csir_terms(sc: &Scenario, pc: &PowerControl, scheme: Scheme) -> Vec<SinrTerms> {
    let lambda = estimation_quality(sc, pc, scheme);
    let m = sc.m as f64;
    let groups = sc.groups();
    (0..sc.k)
        .map(|u| {
            let beta = sc.beta(u);
            let array = sc.p_d * lambda.user(u) * beta * m;
            let coherent = match scheme {
                Scheme::Noma if u >= groups => array * pc.gamma_g[u - groups],
                _ => 0.0,
            };
            SinrTerms { signal: array * pc.gamma(u), coherent, noncoherent: sc.p_d * beta + 1.0 }
        })
        .collect()
}

/// SINR terms of the edge user's stream as seen by the center user of the
/// same group, before SIC.
fn decoding_terms(sc: &Scenario, pc: &PowerControl, group: usize) -> SinrTerms {
    let lambda = estimation_quality(sc, pc, Scheme::Noma);
    let array = sc.p_d * lambda.lambda_g[group] * sc.beta_g[group] * sc.m as f64;
    SinrTerms {
        signal: array * pc.gamma_h[group],
        coherent: array * pc.gamma_g[group],
        noncoherent: sc.p_d * sc.beta_g[group] + 1.0,
    }
}

/// Scheme-N decodability margin per group, in b/s/Hz before prelog.
pub fn no_csir_decodability_margin(sc: &Scenario, pc: &PowerControl) -> Vec<f64> {
    let terms = no_csir_terms(sc, pc, Scheme::Noma);
    let groups = sc.groups();
    (0..groups)
        .map(|k| decoding_terms(sc, pc, k).rate() - terms[groups + k].rate())
        .collect()
}

/// Closed-form no-CSIR rates with the prelog applied.
///
/// Scheme-N requires the center user of every group that receives data to
/// decode its partner's stream; a violation is an error rather than a
/// silently reduced rate.
pub fn rate_no_csir(sc: &Scenario, pc: &PowerControl, scheme: Scheme) -> Result<RatePoint, RateError> {
    check_inputs(sc, pc, scheme, None)?;
    let groups = sc.groups();
    if scheme == Scheme::Noma {
        for (group, margin) in no_csir_decodability_margin(sc, pc).into_iter().enumerate() {
            let needs_sic = pc.gamma_g[group] > 0.0 && pc.gamma_h[group] > 0.0;
            if needs_sic && margin < -DECODABILITY_SLACK {
                return Err(RateError::DecodabilityViolated { group, margin });
            }
        }
    }
    let rates: Vec<f64> = no_csir_terms(sc, pc, scheme).iter().map(SinrTerms::rate).collect();
    let raw = RatePoint {
        scheme,
        regime: Regime::NoCsir,
        power: pc.clone(),
        rates_g: rates[..groups].to_vec(),
        rates_h: rates[groups..].to_vec(),
        stderr_g: None,
        stderr_h: None,
        rejected_samples: 0,
    };
    Ok(effective_rate(raw, sc, Regime::NoCsir, scheme))
}
