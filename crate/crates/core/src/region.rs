//! Grid-search power control: rate regions, their Pareto hulls, and the
//! edge-rate-constrained sum rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rates::{rate_dl_pilot_batch, rate_no_csir, rate_perfect_csir_batch, RateError, RatePoint};
use crate::scenario::{validate_power, McConfig, PowerControl, Regime, Scenario, Scheme};

/// Tolerance on the edge-rate constraint.
pub const TARGET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("power grid is empty after applying the power constraints")]
    EmptyGrid,
    #[error("grid point {index}: {source}")]
    Evaluator { index: usize, source: RateError },
    #[error("scheme {scheme}: no grid point meets the edge-rate target (closest shortfall {shortfall} b/s/Hz)")]
    Infeasible { scheme: Scheme, shortfall: f64 },
}

/// Data power levels per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaGrid {
    /// Share `s` of the group budget `2/K` goes to the center user and
    /// `1 - s` to the edge user, so every point uses full power.
    Split(Vec<f64>),
    /// Independent levels for center and edge; combinations over budget are
    /// dropped.
    Explicit { gamma_g: Vec<f64>, gamma_h: Vec<f64> },
}

/// Levels for each free power-control parameter. All groups share one
/// allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alpha_g: Vec<f64>,
    pub alpha_h: Vec<f64>,
    pub gamma: GammaGrid,
    /// Scheme-O time shares.
    pub eta: Vec<f64>,
}

/// `n` evenly spaced values covering `[0, 1]`, computed as `i / (n - 1)`.
pub fn uniform_levels(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn log_levels(low: f64, high: f64, n: usize) -> Vec<f64> {
    let (a, b) = (low.log10(), high.log10());
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

impl GridSpec {
    /// 21 levels of `alpha_g` and of the power split, full edge pilot power.
    pub fn region_default() -> Self {
        Self {
            alpha_g: uniform_levels(21),
            alpha_h: vec![1.0],
            gamma: GammaGrid::Split(uniform_levels(21)),
            eta: uniform_levels(21),
        }
    }

    /// Like [`GridSpec::region_default`] but also containing `alpha_h = 0`,
    /// so the orthogonal extremes are grid points.
    pub fn region_with_reduction_points() -> Self {
        Self { alpha_h: vec![0.0, 1.0], ..Self::region_default() }
    }

    /// Region grid resolving small center pilot weights: `alpha_g` is 0 plus
    /// 33 log-spaced levels from 1e-4 to 1, `alpha_h` is 0 or 1, and the
    /// split has 41 levels. With a strong center user the best NOMA points
    /// have `alpha_g` well below the first nonzero uniform level.
    pub fn region_fine() -> Self {
        let mut alpha_g = vec![0.0];
        alpha_g.extend(log_levels(1e-4, 1.0, 33));
        Self { alpha_g, alpha_h: vec![0.0, 1.0], gamma: GammaGrid::Split(uniform_levels(41)), eta: uniform_levels(21) }
    }

    /// Grid for the constrained sum rate. The optimum sits at very small
    /// center pilot weights, so `alpha_g` is log-spaced down to 1e-3.
    pub fn sum_rate_default() -> Self {
        let mut alpha_g = vec![0.0];
        alpha_g.extend(log_levels(1e-3, 1.0, 20));
        Self { alpha_g, alpha_h: vec![1.0], gamma: GammaGrid::Split(uniform_levels(41)), eta: uniform_levels(21) }
    }

    fn gamma_pairs(&self, groups: usize) -> Vec<(f64, f64)> {
        let budget = 1.0 / groups as f64;
        match &self.gamma {
            GammaGrid::Split(levels) => levels.iter().map(|s| (s * budget, (1.0 - s) * budget)).collect(),
            GammaGrid::Explicit { gamma_g, gamma_h } => {
                gamma_g.iter().flat_map(|&g| gamma_h.iter().map(move |&h| (g, h))).collect()
            }
        }
    }
}

/// Every grid point that satisfies the scheme's power constraints, in a
/// fixed order.
///
/// Scheme-N sweeps the pilot weights and data powers. Scheme-O always uses
/// full pilot and data power and sweeps the time share. The reference scheme
/// uses full pilot power and sweeps the data powers.
pub fn power_grid(spec: &GridSpec, sc: &Scenario, scheme: Scheme) -> Result<Vec<PowerControl>, RegionError> {
    let groups = sc.groups();
    let full = 1.0 / groups as f64;
    let candidates: Vec<PowerControl> = match scheme {
        Scheme::Noma => {
            let pairs = spec.gamma_pairs(groups);
            spec.alpha_g
                .iter()
                .flat_map(|&ag| spec.alpha_h.iter().map(move |&ah| (ag, ah)))
                .flat_map(|(ag, ah)| {
                    pairs.iter().map(move |&(gg, gh)| PowerControl::uniform(groups, ag, ah, gg, gh, 0.5))
                })
                .collect()
        }
        Scheme::Orthogonal => {
            spec.eta.iter().map(|&eta| PowerControl::uniform(groups, 1.0, 1.0, full, full, eta)).collect()
        }
        Scheme::Baseline => spec
            .gamma_pairs(groups)
            .into_iter()
            .map(|(gg, gh)| PowerControl::uniform(groups, 1.0, 1.0, gg, gh, 0.5))
            .collect(),
    };
    let grid: Vec<PowerControl> = candidates.into_iter().filter_map(|pc| validate_power(pc, sc, scheme).ok()).collect();
    if grid.is_empty() {
        return Err(RegionError::EmptyGrid);
    }
    Ok(grid)
}

/// Evaluates every grid point. Points where SIC is infeasible come back as
/// `None`; any other failure aborts with the offending index.
///
/// The reference scheme is defined without downlink CSI and is always
/// evaluated in closed form.
fn evaluate_grid(
    sc: &Scenario,
    regime: Regime,
    scheme: Scheme,
    grid: &[PowerControl],
    mc: &McConfig,
) -> Result<Vec<Option<RatePoint>>, RegionError> {
    let regime = if scheme == Scheme::Baseline { Regime::NoCsir } else { regime };
    if regime == Regime::NoCsir {
        return grid
            .par_iter()
            .enumerate()
            .map(|(index, pc)| match rate_no_csir(sc, pc, scheme) {
                Ok(p) => Ok(Some(p)),
                Err(RateError::DecodabilityViolated { .. }) => Ok(None),
                Err(source) => Err(RegionError::Evaluator { index, source }),
            })
            .collect();
    }
    // Monte-Carlo regimes: one pass over the trials per distinct pilot weight.
    let mut batches: Vec<Vec<usize>> = Vec::new();
    for (i, pc) in grid.iter().enumerate() {
        match batches.iter_mut().find(|b| grid[b[0]].same_pilots(pc)) {
            Some(b) => b.push(i),
            None => batches.push(vec![i]),
        }
    }
    let mut out = vec![None; grid.len()];
    for batch in batches {
        let pcs: Vec<PowerControl> = batch.iter().map(|&i| grid[i].clone()).collect();
        let points = match regime {
            Regime::PerfectCsir => rate_perfect_csir_batch(sc, &pcs, scheme, mc),
            _ => rate_dl_pilot_batch(sc, &pcs, scheme, mc),
        }
        .map_err(|source| RegionError::Evaluator { index: batch[0], source })?;
        for (i, p) in batch.into_iter().zip(points) {
            out[i] = Some(p);
        }
    }
    Ok(out)
}

/// Swept rate pairs and their hull. With more than one group the pair is
/// (sum of edge rates, sum of center rates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub scheme: Scheme,
    pub regime: Regime,
    pub points: Vec<RatePoint>,
    pub hull: Vec<(f64, f64)>,
    /// Grid points dropped because the center users could not run SIC.
    pub skipped: usize,
}

impl RateRegion {
    /// `(R_edge, R_center)` for every evaluated point.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.sum_edge(), p.sum_center())).collect()
    }

    /// Hull center rate at a given edge rate; see [`hull_center_rate`].
    pub fn center_rate_at(&self, edge: f64) -> Option<f64> {
        hull_center_rate(&self.hull, edge)
    }

    pub fn max_edge_rate(&self) -> f64 {
        self.hull.iter().map(|p| p.0).fold(0.0, f64::max)
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Upper-right convex hull of `(x, y)` pairs, from `(0, max y)` to
/// `(max x, 0)`. The result is concave and nonincreasing in `y`; collinear
/// points are dropped.
pub fn pareto_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.is_empty() {
        return Vec::new();
    }
    let max_x = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let max_y = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.push((0.0, max_y));
    pts.push((max_x, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup();
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // Anything left of the start or below the end is not on the Pareto part.
    if let Some(end) = hull.iter().position(|&p| p == (max_x, 0.0)) {
        hull.truncate(end + 1);
    }
    hull
}

/// Linear interpolation of the hull; `None` beyond its edge-rate range.
pub fn hull_center_rate(hull: &[(f64, f64)], edge: f64) -> Option<f64> {
    let last = hull.last()?;
    if edge < 0.0 || edge > last.0 {
        return None;
    }
    hull.windows(2)
        .find(|w| edge >= w[0].0 && edge <= w[1].0)
        .map(|w| {
            if w[1].0 == w[0].0 {
                w[0].1.max(w[1].1)
            } else {
                w[0].1 + (w[1].1 - w[0].1) * (edge - w[0].0) / (w[1].0 - w[0].0)
            }
        })
        .or(Some(last.1))
}

/// Evaluates the whole grid on common random numbers and takes the hull.
pub fn sweep_rate_region(
    sc: &Scenario,
    regime: Regime,
    scheme: Scheme,
    spec: &GridSpec,
    mc: &McConfig,
) -> Result<RateRegion, RegionError> {
    let grid = power_grid(spec, sc, scheme)?;
    let evaluated = evaluate_grid(sc, regime, scheme, &grid, mc)?;
    let skipped = evaluated.iter().filter(|p| p.is_none()).count();
    let points: Vec<RatePoint> = evaluated.into_iter().flatten().collect();
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.sum_edge(), p.sum_center())).collect();
    let hull = pareto_hull(&pairs);
    let regime = if scheme == Scheme::Baseline { Regime::NoCsir } else { regime };
    Ok(RateRegion { scheme, regime, points, hull, skipped })
}

/// Best grid point of one scheme under the edge-rate constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeOptimum {
    pub scheme: Scheme,
    /// `None` when no point meets the target.
    pub best: Option<RatePoint>,
    /// Smallest amount by which any point misses the target; `<= 0` when
    /// feasible.
    pub shortfall: f64,
}

impl SchemeOptimum {
    pub fn feasible(&self) -> bool {
        self.best.is_some()
    }

    pub fn sum_rate(&self) -> Option<f64> {
        self.best.as_ref().map(RatePoint::sum_rate)
    }

    pub fn into_result(self) -> Result<RatePoint, RegionError> {
        let (scheme, shortfall) = (self.scheme, self.shortfall);
        self.best.ok_or(RegionError::Infeasible { scheme, shortfall })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedSumRate {
    pub regime: Regime,
    /// Scheme-O edge rate per group at `eta = 0.5` and full power.
    pub target: Vec<f64>,
    /// Scheme-N, Scheme-O, reference scheme.
    pub optima: Vec<SchemeOptimum>,
}

impl ConstrainedSumRate {
    pub fn optimum(&self, scheme: Scheme) -> &SchemeOptimum {
        self.optima.iter().find(|o| o.scheme == scheme).expect("all schemes evaluated")
    }

    pub fn target_edge_rate(&self) -> f64 {
        self.target.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn shortfall(point: &RatePoint, target: &[f64]) -> f64 {
    point.rates_h.iter().zip(target).map(|(r, t)| t - r).fold(f64::NEG_INFINITY, f64::max)
}

/// Maximizes the sum rate of each scheme over its grid, subject to every
/// edge user getting at least its Scheme-O rate at `eta = 0.5`.
///
/// The target is computed through the same evaluator and trials as the grid,
/// so the Scheme-O grid point at `eta = 0.5` meets it exactly.
pub fn constrained_sum_rate(
    sc: &Scenario,
    regime: Regime,
    spec: &GridSpec,
    mc: &McConfig,
) -> Result<ConstrainedSumRate, RegionError> {
    let full = 1.0 / sc.groups() as f64;
    let reference = PowerControl::uniform(sc.groups(), 1.0, 1.0, full, full, 0.5);
    let target = evaluate_grid(sc, regime, Scheme::Orthogonal, std::slice::from_ref(&reference), mc)?
        .remove(0)
        .expect("Scheme-O needs no SIC")
        .rates_h;
    let optima = [Scheme::Noma, Scheme::Orthogonal, Scheme::Baseline]
        .into_iter()
        .map(|scheme| {
            let grid = power_grid(spec, sc, scheme)?;
            let points = evaluate_grid(sc, regime, scheme, &grid, mc)?;
            let mut best: Option<RatePoint> = None;
            let mut closest = f64::INFINITY;
            for p in points.into_iter().flatten() {
                let miss = shortfall(&p, &target);
                closest = closest.min(miss);
                if miss <= TARGET_SLACK && best.as_ref().is_none_or(|b| p.sum_rate() > b.sum_rate()) {
                    best = Some(p);
                }
            }
            Ok(SchemeOptimum { scheme, best, shortfall: closest })
        })
        .collect::<Result<Vec<_>, RegionError>>()?;
    Ok(ConstrainedSumRate { regime, target, optima })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::PrelogMode;

    #[test]
    fn hull_of_two_extremes_is_their_segment() {
        assert_eq!(pareto_hull(&[(1.0, 0.0), (0.0, 1.0)]), vec![(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn hull_drops_dominated_mixture() {
        assert_eq!(pareto_hull(&[(1.0, 0.0), (0.0, 1.0), (0.4, 0.4)]), vec![(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn hull_keeps_outward_point() {
        assert_eq!(
            pareto_hull(&[(1.0, 0.0), (0.0, 1.0), (0.8, 0.8)]),
            vec![(0.0, 1.0), (0.8, 0.8), (1.0, 0.0)]
        );
    }

    #[test]
    fn hull_adds_axis_endpoints() {
        assert_eq!(pareto_hull(&[(2.0, 3.0)]), vec![(0.0, 3.0), (2.0, 3.0), (2.0, 0.0)]);
    }

    #[test]
    fn hull_interpolation() {
        let hull = vec![(0.0, 2.0), (1.0, 1.0), (2.0, 0.0)];
        assert_eq!(hull_center_rate(&hull, 0.5), Some(1.5));
        assert_eq!(hull_center_rate(&hull, 2.0), Some(0.0));
        assert_eq!(hull_center_rate(&hull, 2.5), None);
    }

    #[test]
    fn grid_counts() {
        let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0);
        assert_eq!(power_grid(&GridSpec::region_default(), &sc, Scheme::Noma).unwrap().len(), 441);
        assert_eq!(power_grid(&GridSpec::region_default(), &sc, Scheme::Orthogonal).unwrap().len(), 21);
        let five = uniform_levels(5);
        let spec = GridSpec {
            alpha_g: five.clone(),
            alpha_h: five.clone(),
            gamma: GammaGrid::Explicit { gamma_g: five.clone(), gamma_h: five.clone() },
            eta: five,
        };
        // Only gamma_g + gamma_h <= 1 survives: 15 of 25 pairs.
        assert_eq!(power_grid(&spec, &sc, Scheme::Noma).unwrap().len(), 5 * 5 * 15);
    }

    #[test]
    fn over_budget_grid_is_empty() {
        let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0);
        let spec = GridSpec {
            gamma: GammaGrid::Explicit { gamma_g: vec![0.8], gamma_h: vec![0.7] },
            ..GridSpec::region_default()
        };
        assert_eq!(power_grid(&spec, &sc, Scheme::Noma), Err(RegionError::EmptyGrid));
    }

    #[test]
    fn orthogonal_region_is_time_sharing_segment() {
        let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0).with_prelog(PrelogMode::Omit);
        let r = sweep_rate_region(&sc, Regime::NoCsir, Scheme::Orthogonal, &GridSpec::region_default(), &McConfig::new(1, 0))
            .unwrap();
        // Interior points are collinear up to rounding.
        let (first, last) = (r.hull[0], *r.hull.last().unwrap());
        assert_eq!(first.0, 0.0);
        assert_eq!(last.1, 0.0);
        for p in &r.hull {
            assert!((p.0 / last.0 + p.1 / first.1 - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn orthogonal_meets_its_own_target() {
        let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0);
        let res = constrained_sum_rate(&sc, Regime::NoCsir, &GridSpec::region_default(), &McConfig::new(1, 0)).unwrap();
        let o = res.optimum(Scheme::Orthogonal);
        assert!(o.feasible());
        assert!(o.shortfall <= 0.0);
        let at_half = rate_no_csir(&sc, &PowerControl::uniform(1, 1.0, 1.0, 1.0, 1.0, 0.5), Scheme::Orthogonal).unwrap();
        assert_eq!(res.target, at_half.rates_h);
        assert!(o.sum_rate().unwrap() >= at_half.sum_rate());
    }

    #[test]
    fn dl_pilot_region_uses_one_batch_per_pilot_weight() {
        let sc = Scenario::symmetric(6, 2, 200, 100.0, 1.0, 1.0, 1.0);
        let spec = GridSpec {
            alpha_g: vec![0.1, 0.5],
            alpha_h: vec![1.0],
            gamma: GammaGrid::Split(uniform_levels(3)),
            eta: uniform_levels(3),
        };
        let mc = McConfig::new(300, 1);
        let r = sweep_rate_region(&sc, Regime::DlPilot, Scheme::Noma, &spec, &mc).unwrap();
        assert_eq!(r.points.len(), 6);
        let single = crate::rates::rate_dl_pilot(&sc, &r.points[4].power, Scheme::Noma, &mc).unwrap();
        assert_eq!(r.points[4], single);
    }
}
