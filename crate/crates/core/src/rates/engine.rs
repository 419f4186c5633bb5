//! Shared Monte-Carlo machinery: per-trial simulation of the whole training
//! and beamforming chain, and the chunked deterministic reduction.

use num_complex::Complex64;
use rayon::prelude::*;

use super::beams::build_mrt_beams;
use super::RateError;
use crate::channel::{dot, draw_small_scale, processed_ul_pilots};
use crate::estimation::{dl_gain_estimate, estimation_quality, mmse_ul_estimates, DlGainEstimate, QualityFactors};
use crate::scenario::{McConfig, PowerControl, Scenario, Scheme};

/// Everything a rate evaluator needs from one trial.
pub(crate) struct TrialSample {
    /// `gains[u][j] = u^T a_j` for user `u` and beam `j`.
    pub gains: Vec<Vec<Complex64>>,
    pub dl: Option<Vec<DlGainEstimate>>,
}

pub(crate) struct TrialSimulator<'a> {
    sc: &'a Scenario,
    pilots: &'a PowerControl,
    scheme: Scheme,
    mc: &'a McConfig,
    lambda: QualityFactors,
    with_dl: bool,
}

impl<'a> TrialSimulator<'a> {
    pub fn new(sc: &'a Scenario, pilots: &'a PowerControl, scheme: Scheme, mc: &'a McConfig, with_dl: bool) -> Self {
        Self { sc, pilots, scheme, mc, lambda: estimation_quality(sc, pilots, scheme), with_dl }
    }

    pub fn lambda(&self) -> &QualityFactors {
        &self.lambda
    }

    pub fn run(&self, trial: u64) -> Result<TrialSample, RateError> {
        let draw = draw_small_scale(self.sc, self.mc, trial)?;
        let pilots = processed_ul_pilots(&draw, self.sc, self.pilots, self.scheme, self.mc);
        let est = mmse_ul_estimates(&pilots, self.sc, self.pilots, self.scheme)?;
        let beams = build_mrt_beams(&est);
        let gains = (0..self.sc.k)
            .map(|u| beams.vectors.iter().map(|a| dot(draw.user(u), a)).collect())
            .collect();
        let dl = self
            .with_dl
            .then(|| dl_gain_estimate(self.sc, &self.lambda, &beams, &draw, self.mc));
        Ok(TrialSample { gains, dl })
    }
}

/// Runs `step` over every trial, one fresh accumulator per chunk of
/// `mc.chunk` consecutive trials. Chunks may run on any worker; the returned
/// vector is in chunk order, so any in-order fold of it is reproducible.
pub(crate) fn chunked<A, I, S>(mc: &McConfig, init: I, step: S) -> Result<Vec<A>, RateError>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, u64) -> Result<(), RateError> + Sync,
{
    let chunks: Vec<Result<A, RateError>> = (0..mc.chunks())
        .into_par_iter()
        .map(|c| {
            let start = c * mc.chunk;
            let end = (start + mc.chunk).min(mc.trials);
            let mut acc = init();
            for trial in start..end {
                step(&mut acc, trial)?;
            }
            Ok(acc)
        })
        .collect();
    chunks.into_iter().collect()
}

pub(crate) fn finite(trial: u64, quantity: &'static str, value: f64) -> Result<f64, RateError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(RateError::Divergence { trial, quantity, value })
    }
}

/// Running sum and sum of squares of a scalar.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moment {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moment {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moment) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Standard error of the mean, treating samples as independent.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Standard error of a statistic from its per-chunk values (batch means).
pub(crate) fn batch_stderr(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Mean and standard error of every statistic, given one `Vec<Moment>` per
/// chunk in chunk order. The error uses batch means across chunks, which
/// stays valid when trials within a chunk are correlated (antithetic draws);
/// with a single chunk it falls back to the i.i.d. estimate.
pub(crate) fn reduce_moments(chunks: &[Vec<Moment>]) -> Vec<(f64, f64)> {
    let Some(first) = chunks.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|s| {
            let mut total = Moment::default();
            for c in chunks {
                total.merge(&c[s]);
            }
            let se = if chunks.len() < 2 {
                total.stderr()
            } else {
                let means: Vec<f64> = chunks.iter().map(|c| c[s].mean()).collect();
                batch_stderr(&means)
            };
            (total.mean(), se)
        })
        .collect()
}
