//! Small-scale fading draws and post-correlation uplink pilot observations.
//!
//! The pilot matrix never appears: correlating with its rows maps i.i.d.
//! CN(0, 1) noise to i.i.d. CN(0, 1) noise, so the processed pilots `ybar`
//! are simulated directly.
//!
//! Every random quantity comes from its own ChaCha8 stream keyed by
//! `(base_seed, trial, role, index)`, so any trial can be regenerated in
//! isolation and the schedule of workers never affects the numbers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scenario::{McConfig, McError, PowerControl, Scenario, Scheme};

pub type CVec = Vec<Complex64>;

/// Source of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    ChannelG,
    ChannelH,
    UlNoise,
    DlNoise,
    DlPilotNoise,
}

impl StreamRole {
    fn id(self) -> u32 {
        match self {
            StreamRole::ChannelG => 1,
            StreamRole::ChannelH => 2,
            StreamRole::UlNoise => 3,
            StreamRole::DlNoise => 4,
            StreamRole::DlPilotNoise => 5,
        }
    }

    /// Sign applied to this role in antithetic pattern `p` (0..4). Across the
    /// four patterns every pairwise product of the channel-G, channel-H and
    /// uplink-noise signs averages to zero.
    fn antithetic_sign(self, pattern: u64) -> f64 {
        const SIGNS: [[f64; 4]; 4] = [
            // G,    H,    UL,   DL pilot
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0, 1.0],
            [-1.0, -1.0, 1.0, -1.0],
        ];
        let column = match self {
            StreamRole::ChannelG => 0,
            StreamRole::ChannelH => 1,
            StreamRole::UlNoise => 2,
            StreamRole::DlPilotNoise => 3,
            StreamRole::DlNoise => return 1.0,
        };
        SIGNS[pattern as usize][column]
    }
}

/// Deterministic RNG for one `(trial, role, index)` stream.
pub fn stream_rng(base_seed: u64, trial: u64, role: StreamRole, index: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&base_seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..20].copy_from_slice(&role.id().to_le_bytes());
    key[20..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// `len` i.i.d. CN(0, 1) samples for the given stream, honoring the
/// antithetic pattern of `trial` when enabled.
pub fn complex_gaussian_vec(mc: &McConfig, trial: u64, role: StreamRole, index: u32, len: usize) -> CVec {
    let (base, sign) = if mc.antithetic {
        (trial / 4, role.antithetic_sign(trial % 4))
    } else {
        (trial, 1.0)
    };
    let mut rng = stream_rng(mc.base_seed, base, role, index);
    let scale = sign * std::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// One realization of the small-scale fading.
///
/// `g[k]` is the cell-center user of group `k`, `h[k]` the cell-edge user;
/// each is a length-`M` vector of unit-variance circular Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub g: Vec<CVec>,
    pub h: Vec<CVec>,
    pub trial: u64,
}

impl ChannelDraw {
    /// Small-scale channel of user `u` (center users first).
    pub fn user(&self, u: usize) -> &CVec {
        let groups = self.g.len();
        if u < groups {
            &self.g[u]
        } else {
            &self.h[u - groups]
        }
    }
}

pub fn draw_small_scale(sc: &Scenario, mc: &McConfig, trial: u64) -> Result<ChannelDraw, McError> {
    if trial >= mc.trials {
        return Err(McError::TrialOutOfRange { trial, trials: mc.trials });
    }
    let groups = sc.groups();
    let column = |role, k| complex_gaussian_vec(mc, trial, role, k as u32, sc.m);
    Ok(ChannelDraw {
        g: (0..groups).map(|k| column(StreamRole::ChannelG, k)).collect(),
        h: (0..groups).map(|k| column(StreamRole::ChannelH, k)).collect(),
        trial,
    })
}

/// Processed uplink pilots, one vector per orthogonal pilot.
///
/// Scheme-N holds `K/2` vectors, one per group. Scheme-O and the reference
/// scheme hold `K` vectors: the center users' pilots first, then the edge
/// users'.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedPilots {
    pub scheme: Scheme,
    pub ybar: Vec<CVec>,
}

/// Number of uplink pilots a scheme observes.
pub fn pilot_count(sc: &Scenario, scheme: Scheme) -> usize {
    match scheme {
        Scheme::Noma => sc.groups(),
        Scheme::Orthogonal | Scheme::Baseline => sc.k,
    }
}

/// Users whose pilot signals are superimposed on pilot `j`, with their
/// received pilot power `p_u * alpha * beta`.
pub fn pilot_members(sc: &Scenario, pc: &PowerControl, scheme: Scheme, pilot: usize) -> Vec<(usize, f64)> {
    let groups = sc.groups();
    match scheme {
        Scheme::Noma => vec![
            (pilot, sc.p_u * pc.alpha_g[pilot] * sc.beta_g[pilot]),
            (groups + pilot, sc.p_u * pc.alpha_h[pilot] * sc.beta_h[pilot]),
        ],
        Scheme::Orthogonal | Scheme::Baseline => vec![(pilot, sc.p_u * sc.beta(pilot))],
    }
}

/// Per-antenna power of the processed pilot, `E[||ybar_j||^2] / M`.
pub fn pilot_power(sc: &Scenario, pc: &PowerControl, scheme: Scheme, pilot: usize) -> f64 {
    let signal: f64 = pilot_members(sc, pc, scheme, pilot).iter().map(|(_, p)| p).sum();
    if sc.noise_free_ul {
        signal
    } else {
        signal + 1.0
    }
}

/// Index of the pilot (and beam) that serves user `u`.
pub fn own_pilot(sc: &Scenario, scheme: Scheme, user: usize) -> usize {
    match scheme {
        Scheme::Noma => user % sc.groups(),
        Scheme::Orthogonal | Scheme::Baseline => user,
    }
}

pub fn processed_ul_pilots(
    draw: &ChannelDraw,
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    mc: &McConfig,
) -> ProcessedPilots {
    let ybar = (0..pilot_count(sc, scheme))
        .map(|j| {
            let mut y = if sc.noise_free_ul {
                vec![Complex64::new(0.0, 0.0); sc.m]
            } else {
                complex_gaussian_vec(mc, draw.trial, StreamRole::UlNoise, j as u32, sc.m)
            };
            for (user, power) in pilot_members(sc, pc, scheme, j) {
                if power > 0.0 {
                    let amp = power.sqrt();
                    for (yi, xi) in y.iter_mut().zip(draw.user(user)) {
                        *yi += xi * amp;
                    }
                }
            }
            y
        })
        .collect();
    ProcessedPilots { scheme, ybar }
}

/// Unconjugated inner product `x^T y`.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults(m: usize) -> Scenario {
        Scenario::symmetric(m, 2, 200, 100.0, 1.0, 1.0, 1.0)
    }

    #[test]
    fn draws_are_reproducible_and_shaped() {
        let sc = defaults(10);
        let mc = McConfig::new(10, 7);
        let a = draw_small_scale(&sc, &mc, 3).unwrap();
        let b = draw_small_scale(&sc, &mc, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.g.len(), 1);
        assert_eq!(a.g[0].len(), 10);
        assert_eq!(a.h[0].len(), 10);
        assert_ne!(a.g[0], a.h[0]);
        assert_ne!(a, draw_small_scale(&sc, &mc, 4).unwrap());
    }

    #[test]
    fn trial_out_of_range() {
        let sc = defaults(10);
        let mc = McConfig::new(10, 7);
        assert_eq!(
            draw_small_scale(&sc, &mc, 10),
            Err(McError::TrialOutOfRange { trial: 10, trials: 10 })
        );
    }

    #[test]
    fn unit_second_moment() {
        // 10^6 complex entries
        let sc = defaults(100);
        let mc = McConfig::new(5000, 11);
        let mut sum = 0.0;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut n = 0.0;
        for t in 0..mc.trials {
            let d = draw_small_scale(&sc, &mc, t).unwrap();
            for v in d.g.iter().chain(&d.h) {
                sum += norm_sqr(v);
                mean += v.iter().sum::<Complex64>();
                n += v.len() as f64;
            }
        }
        assert!((sum / n - 1.0).abs() < 0.005, "{}", sum / n);
        assert!((mean / n).norm() < 0.005);
    }

    #[test]
    fn degenerate_pilot_share_returns_edge_channel() {
        let sc = defaults(10).with_noise_free_ul(true);
        let mc = McConfig::new(4, 1);
        let pc = PowerControl::uniform(1, 0.0, 1.0, 0.5, 0.5, 0.5);
        let d = draw_small_scale(&sc, &mc, 2).unwrap();
        let p = processed_ul_pilots(&d, &sc, &pc, Scheme::Noma, &mc);
        assert_eq!(p.ybar.len(), 1);
        assert_eq!(p.ybar[0], d.h[0]);
    }

    #[test]
    fn noise_free_orthogonal_pilot_is_scaled_channel() {
        let sc = defaults(10).with_noise_free_ul(true);
        let mc = McConfig::new(4, 1);
        let pc = PowerControl::equal_split(1);
        let d = draw_small_scale(&sc, &mc, 0).unwrap();
        let p = processed_ul_pilots(&d, &sc, &pc, Scheme::Orthogonal, &mc);
        assert_eq!(p.ybar.len(), 2);
        for (y, g) in p.ybar[0].iter().zip(&d.g[0]) {
            assert!((y - g * 10.0).norm() < 1e-12);
        }
    }

    #[test]
    fn noma_pilot_power_matches_model() {
        let sc = defaults(10);
        let mc = McConfig::new(100_000, 5);
        let pc = PowerControl::equal_split(1);
        let mut acc = 0.0;
        for t in 0..mc.trials {
            let d = draw_small_scale(&sc, &mc, t).unwrap();
            acc += norm_sqr(&processed_ul_pilots(&d, &sc, &pc, Scheme::Noma, &mc).ybar[0]);
        }
        let per_antenna = acc / (mc.trials as f64 * sc.m as f64);
        assert!((per_antenna / 102.0 - 1.0).abs() < 0.01, "{per_antenna}");
        assert_eq!(pilot_power(&sc, &pc, Scheme::Noma, 0), 102.0);
    }

    #[test]
    fn distinct_groups_are_uncorrelated() {
        let sc = Scenario::symmetric(8, 4, 200, 100.0, 1.0, 1.0, 1.0);
        let mc = McConfig::new(20_000, 9);
        let pc = PowerControl::equal_split(2);
        let mut cross = Complex64::new(0.0, 0.0);
        for t in 0..mc.trials {
            let d = draw_small_scale(&sc, &mc, t).unwrap();
            let p = processed_ul_pilots(&d, &sc, &pc, Scheme::Noma, &mc);
            cross += p.ybar[0].iter().zip(&p.ybar[1]).map(|(a, b)| a * b.conj()).sum::<Complex64>();
        }
        // normalize by sqrt(E|y0|^2 E|y1|^2) per antenna-sample
        let normalized = cross.norm() / (mc.trials as f64 * sc.m as f64 * 102.0);
        assert!(normalized < 0.01, "{normalized}");
    }

    #[test]
    fn antithetic_patterns_flip_signs_of_one_base_draw() {
        let sc = defaults(4);
        let mc = McConfig::new(8, 3).with_antithetic(true);
        let d0 = draw_small_scale(&sc, &mc, 4).unwrap();
        let d1 = draw_small_scale(&sc, &mc, 5).unwrap();
        let d2 = draw_small_scale(&sc, &mc, 6).unwrap();
        assert_eq!(d0.g, d1.g);
        assert_eq!(d0.h[0].iter().map(|v| -v).collect::<CVec>(), d1.h[0]);
        assert_eq!(d0.g[0].iter().map(|v| -v).collect::<CVec>(), d2.g[0]);
        assert_ne!(d0.g, draw_small_scale(&sc, &mc, 3).unwrap().g);
    }
}
