//! Simulation-based reconstruction of the no-CSIR SINR terms.
//!
//! Nothing here uses the closed forms: every term is a sample moment of the
//! simulated effective gains `X_j = sqrt(beta) u^T a_j`.

use num_complex::Complex64;

use super::engine::{chunked, reduce_moments, Moment, TrialSimulator};
use super::{beam_power, check_inputs, slot_beams, RateError};
use crate::channel::{own_pilot, pilot_count};
use crate::scenario::{McConfig, PowerControl, Scenario, Scheme};

/// Sample SINR terms for one user of the use-and-forget bound.
#[derive(Debug, Clone, PartialEq)]
pub struct HardeningMoments {
    pub user: usize,
    /// `E[f]` and `Var[f]` of the unscaled gain `f = u^T a_own`.
    pub mean_gain: Complex64,
    pub gain_var: f64,
    pub signal_power: f64,
    /// Partner's data on the shared beam (Scheme-N edge users only).
    pub coherent_self_interference: f64,
    /// Both streams' beam-gain fluctuation around the mean.
    pub gain_variance: f64,
    pub other_group_interference: f64,
    pub noise_power: f64,
}

impl HardeningMoments {
    pub fn noncoherent(&self) -> f64 {
        self.gain_variance + self.other_group_interference + self.noise_power
    }

    pub fn sinr(&self) -> f64 {
        self.signal_power / (self.coherent_self_interference + self.noncoherent())
    }
}

/// Runs the full training chain for `mc.trials` trials and returns the sample
/// SINR terms per user, center users first.
pub fn hardening_oracle_moments(
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Vec<HardeningMoments>, RateError> {
    check_inputs(sc, pc, scheme, Some(mc))?;
    let beams = pilot_count(sc, scheme);
    let sim = TrialSimulator::new(sc, pc, scheme, mc, false);
    // Per user: Re X, Im X, |X|^2, then |X_j|^2 for every beam.
    let chunks = chunked(
        mc,
        || vec![vec![Moment::default(); 3 + beams]; sc.k],
        |acc, trial| {
            let sample = sim.run(trial)?;
            for (u, m) in acc.iter_mut().enumerate() {
                let amp = sc.beta(u).sqrt();
                let x = sample.gains[u][own_pilot(sc, scheme, u)] * amp;
                m[0].push(x.re);
                m[1].push(x.im);
                m[2].push(x.norm_sqr());
                for j in 0..beams {
                    m[3 + j].push((sample.gains[u][j] * amp).norm_sqr());
                }
            }
            Ok(())
        },
    )?;
    let groups = sc.groups();
    Ok((0..sc.k)
        .map(|u| {
            let per_chunk: Vec<Vec<Moment>> = chunks.iter().map(|c| c[u].clone()).collect();
            let s = reduce_moments(&per_chunk);
            let mean = Complex64::new(s[0].0, s[1].0);
            let var = (s[2].0 - mean.norm_sqr()).max(0.0);
            let own = own_pilot(sc, scheme, u);
            let other: f64 = slot_beams(sc, scheme, u)
                .filter(|&j| j != own)
                .map(|j| beam_power(pc, scheme, j) * s[3 + j].0)
                .sum();
            let (signal_share, coherent_share) = match scheme {
                Scheme::Noma if u >= groups => (pc.gamma_h[u - groups], pc.gamma_g[u - groups]),
                Scheme::Noma => (pc.gamma_g[u], 0.0),
                Scheme::Orthogonal | Scheme::Baseline => (pc.gamma(u), 0.0),
            };
            let amp2 = sc.beta(u);
            HardeningMoments {
                user: u,
                mean_gain: mean / amp2.sqrt(),
                gain_var: var / amp2,
                signal_power: sc.p_d * signal_share * mean.norm_sqr(),
                coherent_self_interference: sc.p_d * coherent_share * mean.norm_sqr(),
                gain_variance: sc.p_d * beam_power(pc, scheme, own) * var,
                other_group_interference: sc.p_d * other,
                noise_power: 1.0,
            }
        })
        .collect())
}
