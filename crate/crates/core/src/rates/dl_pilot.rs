//! Rates when each beam carries a downlink pilot and users decode with an
//! LMMSE estimate of their effective gain.
//!
//! The SINR is built from moments of the ratio `f / f_hat` and of the
//! residual interference seen through `1 / |f_hat|^2`. These moments depend
//! only on the pilot weights, so a whole grid of data powers is evaluated on
//! one pass over the trials.

use num_complex::Complex64;

use super::engine::{batch_stderr, chunked, reduce_moments, Moment, TrialSimulator};
use super::{beam_power, check_inputs, effective_rate, slot_beams, RateError, RatePoint};
use crate::channel::{own_pilot, pilot_count};
use crate::scenario::{McConfig, PowerControl, Regime, Scenario, Scheme};

/// Estimates below this fraction of their prior mean are discarded.
const ESTIMATE_FLOOR: f64 = 1e-9;
/// Largest tolerated fraction of discarded estimates.
const MAX_REJECTED: f64 = 0.01;

const RATIO_RE: usize = 0;
const RATIO_IM: usize = 1;
const RATIO_SQ: usize = 2;
const INV_POWER: usize = 3;
const GAIN_RE: usize = 4;
const GAIN_IM: usize = 5;
const GAIN_SQ: usize = 6;
const INTERF: usize = 7;

/// Sample moments for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMoments {
    pub user: usize,
    /// `E[f / f_hat]`.
    pub mean_ratio: Complex64,
    /// `E[|f / f_hat|^2]`.
    pub ratio_second: f64,
    /// `E[1 / |f_hat|^2]`. Formally log-divergent, so sample values creep up
    /// slowly with the number of trials.
    pub inv_power: f64,
    /// `E[f]` and `E[|f|^2]` of the true effective gain.
    pub mean_gain: Complex64,
    pub gain_second: f64,
    /// `E[|u^T a_j|^2 / |f_hat|^2]` per beam `j`; zero for the own beam and
    /// for beams outside the user's slot.
    pub interference: Vec<f64>,
    pub samples: u64,
    pub rejected: u64,
}

impl GainMoments {
    pub fn ratio_var(&self) -> f64 {
        (self.ratio_second - self.mean_ratio.norm_sqr()).max(0.0)
    }

    pub fn gain_var(&self) -> f64 {
        (self.gain_second - self.mean_gain.norm_sqr()).max(0.0)
    }

    fn from_moments(user: usize, m: &[(f64, f64)], samples: u64, rejected: u64) -> Self {
        Self {
            user,
            mean_ratio: Complex64::new(m[RATIO_RE].0, m[RATIO_IM].0),
            ratio_second: m[RATIO_SQ].0,
            inv_power: m[INV_POWER].0,
            mean_gain: Complex64::new(m[GAIN_RE].0, m[GAIN_IM].0),
            gain_second: m[GAIN_SQ].0,
            interference: m[INTERF..].iter().map(|s| s.0).collect(),
            samples,
            rejected,
        }
    }
}

type ChunkAcc = (Vec<Vec<Moment>>, Vec<u64>);

fn run_chunks(sc: &Scenario, pc: &PowerControl, scheme: Scheme, mc: &McConfig) -> Result<Vec<ChunkAcc>, RateError> {
    if scheme == Scheme::Baseline {
        return Err(RateError::UnsupportedScheme { scheme, regime: Regime::DlPilot });
    }
    check_inputs(sc, pc, scheme, Some(mc))?;
    let beams = pilot_count(sc, scheme);
    let sim = TrialSimulator::new(sc, pc, scheme, mc, true);
    let floors: Vec<f64> =
        (0..sc.k).map(|u| ESTIMATE_FLOOR * (sc.m as f64 * sim.lambda().user(u)).sqrt()).collect();
    chunked(
        mc,
        || (vec![vec![Moment::default(); INTERF + beams]; sc.k], vec![0; sc.k]),
        |(acc, rejected), trial| {
            let sample = sim.run(trial)?;
            let dl = sample.dl.as_ref().expect("simulator built with downlink pilots");
            for (u, est) in dl.iter().enumerate() {
                let m = &mut acc[u];
                m[GAIN_RE].push(est.f.re);
                m[GAIN_IM].push(est.f.im);
                m[GAIN_SQ].push(est.f.norm_sqr());
                let power = est.fhat.norm_sqr();
                if power.sqrt().partial_cmp(&floors[u]).is_none_or(|o| o.is_lt()) || power == 0.0 {
                    rejected[u] += 1;
                    continue;
                }
                let r = est.f / est.fhat;
                m[RATIO_RE].push(r.re);
                m[RATIO_IM].push(r.im);
                m[RATIO_SQ].push(r.norm_sqr());
                m[INV_POWER].push(1.0 / power);
                let own = own_pilot(sc, scheme, u);
                for j in 0..beams {
                    let v = if j != own && slot_beams(sc, scheme, u).contains(&j) {
                        sample.gains[u][j].norm_sqr() / power
                    } else {
                        0.0
                    };
                    m[INTERF + j].push(v);
                }
            }
            Ok(())
        },
    )
}

fn moments_of(chunks: &[ChunkAcc], mc: &McConfig, users: usize) -> Vec<GainMoments> {
    (0..users)
        .map(|u| {
            let per_chunk: Vec<Vec<Moment>> = chunks.iter().map(|c| c.0[u].clone()).collect();
            let rejected = chunks.iter().map(|c| c.1[u]).sum();
            GainMoments::from_moments(u, &reduce_moments(&per_chunk), mc.trials, rejected)
        })
        .collect()
}

/// Monte-Carlo moments per user, center users first.
pub fn dl_pilot_moments(
    sc: &Scenario,
    pc: &PowerControl,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Vec<GainMoments>, RateError> {
    let chunks = run_chunks(sc, pc, scheme, mc)?;
    Ok(moments_of(&chunks, mc, sc.k))
}

/// SINR per user plus, under Scheme-N, the SINR of each edge stream at its
/// center user.
fn dl_sinrs(sc: &Scenario, pc: &PowerControl, scheme: Scheme, gm: &[GainMoments]) -> (Vec<f64>, Vec<f64>) {
    let groups = sc.groups();
    let interference = |u: usize| -> f64 {
        let b = sc.p_d * sc.beta(u);
        b * gm[u].interference.iter().enumerate().map(|(j, v)| beam_power(pc, scheme, j) * v).sum::<f64>()
    };
    let mut users = vec![0.0; sc.k];
    let mut decode = Vec::new();
    for (u, m) in gm.iter().enumerate() {
        let b = sc.p_d * sc.beta(u);
        let e2 = m.mean_ratio.norm_sqr();
        let base = interference(u) + m.inv_power;
        users[u] = match scheme {
            Scheme::Noma if u >= groups => {
                let (gg, gh) = (pc.gamma_g[u - groups], pc.gamma_h[u - groups]);
                b * gh * e2 / (b * gh * m.ratio_var() + b * gg * e2 + base)
            }
            _ => b * pc.gamma(u) * e2 / (b * m.ratio_var() + base),
        };
        if scheme == Scheme::Noma && u < groups {
            let (gg, gh) = (pc.gamma_g[u], pc.gamma_h[u]);
            decode.push(b * gh * e2 / (b * m.ratio_var() + b * gg * e2 + base));
        }
    }
    (users, decode)
}

fn raw_rates(sc: &Scenario, pc: &PowerControl, scheme: Scheme, gm: &[GainMoments]) -> Vec<f64> {
    let groups = sc.groups();
    let (users, decode) = dl_sinrs(sc, pc, scheme, gm);
    let mut rates: Vec<f64> = users.iter().map(|s| (1.0 + s).log2()).collect();
    for (k, d) in decode.iter().enumerate() {
        if pc.gamma_g[k] > 0.0 {
            rates[groups + k] = rates[groups + k].min((1.0 + d).log2());
        }
    }
    rates
}

/// Ergodic rates with downlink pilots.
pub fn rate_dl_pilot(sc: &Scenario, pc: &PowerControl, scheme: Scheme, mc: &McConfig) -> Result<RatePoint, RateError> {
    Ok(rate_dl_pilot_batch(sc, std::slice::from_ref(pc), scheme, mc)?.remove(0))
}

/// Evaluates several data-power allocations sharing the same pilot weights
/// on one set of trials. Standard errors are batch means over chunks.
pub fn rate_dl_pilot_batch(
    sc: &Scenario,
    pcs: &[PowerControl],
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Vec<RatePoint>, RateError> {
    let Some(first) = pcs.first() else {
        return Ok(Vec::new());
    };
    for pc in pcs {
        check_inputs(sc, pc, scheme, None)?;
        if !pc.same_pilots(first) {
            return Err(RateError::MixedPilots);
        }
    }
    let chunks = run_chunks(sc, first, scheme, mc)?;
    let gm = moments_of(&chunks, mc, sc.k);
    let rejected: u64 = gm.iter().map(|m| m.rejected).sum();
    let samples = mc.trials * sc.k as u64;
    if rejected as f64 > MAX_REJECTED * samples as f64 {
        return Err(RateError::DegenerateEstimate { rejected, samples });
    }
    let per_chunk: Vec<Vec<GainMoments>> = if chunks.len() > 1 {
        chunks.iter().map(|c| moments_of(std::slice::from_ref(c), mc, sc.k)).collect()
    } else {
        Vec::new()
    };
    let groups = sc.groups();
    Ok(pcs
        .iter()
        .map(|pc| {
            let rates = raw_rates(sc, pc, scheme, &gm);
            let stderr: Option<Vec<f64>> = (!per_chunk.is_empty()).then(|| {
                let chunk_rates: Vec<Vec<f64>> = per_chunk.iter().map(|c| raw_rates(sc, pc, scheme, c)).collect();
                (0..sc.k)
                    .map(|u| batch_stderr(&chunk_rates.iter().map(|r| r[u]).collect::<Vec<_>>()))
                    .collect()
            });
            let raw = RatePoint {
                scheme,
                regime: Regime::DlPilot,
                power: pc.clone(),
                rates_g: rates[..groups].to_vec(),
                rates_h: rates[groups..].to_vec(),
                stderr_g: stderr.as_ref().map(|s| s[..groups].to_vec()),
                stderr_h: stderr.as_ref().map(|s| s[groups..].to_vec()),
                rejected_samples: rejected,
            };
            effective_rate(raw, sc, Regime::DlPilot, scheme)
        })
        .collect())
}

pub(crate) fn decodability_margin(sc: &Scenario, pc: &PowerControl, mc: &McConfig) -> Result<Vec<f64>, RateError> {
    let gm = dl_pilot_moments(sc, pc, Scheme::Noma, mc)?;
    let groups = sc.groups();
    let (users, decode) = dl_sinrs(sc, pc, Scheme::Noma, &gm);
    Ok((0..groups).map(|k| (1.0 + decode[k]).log2() - (1.0 + users[groups + k]).log2()).collect())
}
