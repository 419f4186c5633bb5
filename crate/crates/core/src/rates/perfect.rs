//! Ergodic rates with perfect knowledge of the effective downlink gains.

use super::engine::{chunked, finite, reduce_moments, Moment, TrialSimulator};
use super::{beam_power, check_inputs, effective_rate, slot_beams, RateError, RatePoint};
use crate::scenario::{McConfig, PowerControl, Regime, Scenario, Scheme};
use num_complex::Complex64;

/// Instantaneous SINRs for one trial: per user (center users first), then
/// per group the SINR of the edge user's stream at the center user
/// (Scheme-N only).
pub(crate) fn perfect_sinrs(
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    gains: &[Vec<Complex64>],
) -> (Vec<f64>, Vec<f64>) {
    let groups = sc.groups();
    let g = |u: usize, j: usize| gains[u][j].norm_sqr();
    match scheme {
        Scheme::Noma => {
            let others = |u: usize, k: usize| -> f64 {
                (0..groups).filter(|&j| j != k).map(|j| beam_power(pc, scheme, j) * g(u, j)).sum()
            };
            let mut users = vec![0.0; sc.k];
            let mut decode = vec![0.0; groups];
            for k in 0..groups {
                let (bg, bh) = (sc.p_d * sc.beta_g[k], sc.p_d * sc.beta_h[k]);
                let e = groups + k;
                let center_interf = others(k, k);
                users[k] = bg * pc.gamma_g[k] * g(k, k) / (bg * center_interf + 1.0);
                users[e] = bh * pc.gamma_h[k] * g(e, k) / (bh * (others(e, k) + pc.gamma_g[k] * g(e, k)) + 1.0);
                decode[k] = bg * pc.gamma_h[k] * g(k, k) / (bg * (center_interf + pc.gamma_g[k] * g(k, k)) + 1.0);
            }
            (users, decode)
        }
        Scheme::Orthogonal | Scheme::Baseline => {
            let users = (0..sc.k)
                .map(|u| {
                    let b = sc.p_d * sc.beta(u);
                    let interf: f64 = slot_beams(sc, scheme, u).filter(|&j| j != u).map(|j| pc.gamma(j) * g(u, j)).sum();
                    b * pc.gamma(u) * g(u, u) / (b * interf + 1.0)
                })
                .collect();
            (users, Vec::new())
        }
    }
}

/// Per power control: mean and standard error of `log2(1 + SINR)` for every
/// user, followed by the SIC decoding rates (Scheme-N).
fn raw_rate_moments(
    sc: &Scenario,
    pcs: &[PowerControl],
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Vec<Vec<(f64, f64)>>, RateError> {
    let Some(first) = pcs.first() else {
        return Ok(Vec::new());
    };
    check_inputs(sc, first, scheme, Some(mc))?;
    for pc in pcs {
        check_inputs(sc, pc, scheme, None)?;
        if !pc.same_pilots(first) {
            return Err(RateError::MixedPilots);
        }
    }
    let stats = sc.k + if scheme == Scheme::Noma { sc.groups() } else { 0 };
    let sim = TrialSimulator::new(sc, first, scheme, mc, false);
    let chunks = chunked(
        mc,
        || vec![vec![Moment::default(); stats]; pcs.len()],
        |acc, trial| {
            let sample = sim.run(trial)?;
            for (pc, moments) in pcs.iter().zip(acc.iter_mut()) {
                let (users, decode) = perfect_sinrs(sc, pc, scheme, &sample.gains);
                for (m, s) in moments.iter_mut().zip(users.iter().chain(&decode)) {
                    m.push(finite(trial, "perfect-CSIR rate", (1.0 + s).log2())?);
                }
            }
            Ok(())
        },
    )?;
    Ok((0..pcs.len())
        .map(|p| {
            let per_chunk: Vec<Vec<Moment>> = chunks.iter().map(|c| c[p].clone()).collect();
            reduce_moments(&per_chunk)
        })
        .collect())
}

fn assemble(sc: &Scenario, pc: &PowerControl, scheme: Scheme, stats: &[(f64, f64)]) -> RatePoint {
    let groups = sc.groups();
    let mut rates_h: Vec<(f64, f64)> = stats[groups..sc.k].to_vec();
    if scheme == Scheme::Noma {
        for k in 0..groups {
            let decode = stats[sc.k + k];
            if pc.gamma_g[k] > 0.0 && decode.0 < rates_h[k].0 {
                rates_h[k] = decode;
            }
        }
    }
    let raw = RatePoint {
        scheme,
        regime: Regime::PerfectCsir,
        power: pc.clone(),
        rates_g: stats[..groups].iter().map(|s| s.0).collect(),
        rates_h: rates_h.iter().map(|s| s.0).collect(),
        stderr_g: Some(stats[..groups].iter().map(|s| s.1).collect()),
        stderr_h: Some(rates_h.iter().map(|s| s.1).collect()),
        rejected_samples: 0,
    };
    effective_rate(raw, sc, Regime::PerfectCsir, scheme)
}

/// Monte-Carlo ergodic rates with perfect downlink CSI.
///
/// Under Scheme-N the edge user's rate is capped by the rate at which the
/// center user decodes it for SIC, whenever the center user carries data.
pub fn rate_perfect_csir(
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<RatePoint, RateError> {
    Ok(rate_perfect_csir_batch(sc, std::slice::from_ref(pc), scheme, mc)?.remove(0))
}

/// Evaluates several power controls on the same trials. All of them must
/// share the uplink pilot weights, since those shape the beams.
pub fn rate_perfect_csir_batch(
    sc: &Scenario,
    pcs: &[PowerControl],
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Vec<RatePoint>, RateError> {
    let stats = raw_rate_moments(sc, pcs, scheme, mc)?;
    Ok(pcs.iter().zip(&stats).map(|(pc, s)| assemble(sc, pc, scheme, s)).collect())
}

pub(crate) fn decodability_margin(sc: &Scenario, pc: &PowerControl, mc: &McConfig) -> Result<Vec<f64>, RateError> {
    let stats = raw_rate_moments(sc, std::slice::from_ref(pc), Scheme::Noma, mc)?.remove(0);
    let groups = sc.groups();
    Ok((0..groups).map(|k| stats[sc.k + k].0 - stats[groups + k].0).collect())
}
