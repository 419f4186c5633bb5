use approx::assert_relative_eq;
use proptest::prelude::*;

use noma_mimo::rates::{no_csir_decodability_margin, no_csir_terms};
use noma_mimo::region::{hull_center_rate, uniform_levels, GammaGrid};
use noma_mimo::scenario::prelog_factor;
use noma_mimo::{
    constrained_sum_rate, pareto_hull, power_grid, rate_no_csir, sweep_rate_region, GridSpec, McConfig, PowerControl,
    PrelogMode, Regime, Scenario, Scheme,
};

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64), 1..60)
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (1usize..64, 1usize..4, 0.5..200.0f64, 0.1..5.0f64, 0.1..10.0f64, 0.1..10.0f64).prop_map(
        |(m, groups, bg, bh, pu, pd)| Scenario::symmetric(m, 2 * groups, 200, bg, bh, pu, pd),
    )
}

proptest! {
    #[test]
    fn hull_is_concave_nonincreasing_and_dominates(points in cloud()) {
        let hull = pareto_hull(&points);
        let max_x = points.iter().map(|p| p.0).fold(0.0, f64::max);
        let max_y = points.iter().map(|p| p.1).fold(0.0, f64::max);
        prop_assert_eq!(hull[0], (0.0, max_y));
        prop_assert_eq!(*hull.last().unwrap(), (max_x, 0.0));
        for w in hull.windows(2) {
            prop_assert!(w[1].0 >= w[0].0);
            prop_assert!(w[1].1 <= w[0].1);
        }
        for w in hull.windows(3) {
            prop_assert!(cross(w[0], w[1], w[2]) < 0.0);
        }
        for p in &points {
            let y = hull_center_rate(&hull, p.0).unwrap();
            prop_assert!(p.1 <= y + 1e-9 * (1.0 + y));
        }
    }

    #[test]
    fn hull_vertices_come_from_the_cloud(points in cloud()) {
        let hull = pareto_hull(&points);
        for v in &hull[1..hull.len() - 1] {
            prop_assert!(points.contains(v));
        }
    }

    #[test]
    fn grid_points_respect_power_constraints(sc in scenario(), n in 1usize..6) {
        let levels = uniform_levels(n);
        let spec = GridSpec {
            alpha_g: levels.clone(),
            alpha_h: levels.clone(),
            gamma: GammaGrid::Explicit { gamma_g: levels.clone(), gamma_h: levels.clone() },
            eta: levels,
        };
        let groups = sc.groups() as f64;
        if let Ok(grid) = power_grid(&spec, &sc, Scheme::Noma) {
            prop_assert!(grid.len() <= n * n * n * n);
            for pc in grid {
                prop_assert!(groups * (pc.gamma_g[0] + pc.gamma_h[0]) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_reduction_identity(sc in scenario(), share in 0.0..1.0f64) {
        let groups = sc.groups() as f64;
        let noma = PowerControl::uniform(sc.groups(), 1.0, 0.0, share / groups, 0.0, 1.0);
        let orth = PowerControl::uniform(sc.groups(), 1.0, 1.0, share / groups, 1.0 / groups, 1.0);
        let n = rate_no_csir(&sc, &noma, Scheme::Noma).unwrap();
        let o = rate_no_csir(&sc, &orth, Scheme::Orthogonal).unwrap();
        prop_assert_eq!(n.rates_g, o.rates_g);
    }

    #[test]
    fn edge_floor_does_not_depend_on_antennas(sc in scenario(), split in 0.0..1.0f64, m2 in 1usize..512) {
        let g = sc.groups();
        let pc = PowerControl::uniform(g, 1.0, 1.0, split / g as f64, (1.0 - split) / g as f64, 0.5);
        let a = no_csir_terms(&sc, &pc, Scheme::Noma);
        let b = no_csir_terms(&Scenario { m: m2, ..sc.clone() }, &pc, Scheme::Noma);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.noncoherent, y.noncoherent);
        }
        assert_relative_eq!(a[g].noncoherent, sc.p_d * sc.beta_h[0] + 1.0);
    }

    #[test]
    fn margin_sign_decides_closed_form_errors(sc in scenario(), ag in 0.0..1.0f64, split in 0.01..0.99f64) {
        let g = sc.groups();
        let pc = PowerControl::uniform(g, ag, 1.0, split / g as f64, (1.0 - split) / g as f64, 0.5);
        let margin = no_csir_decodability_margin(&sc, &pc)[0];
        let r = rate_no_csir(&sc, &pc, Scheme::Noma);
        prop_assert_eq!(r.is_ok(), margin >= -1e-12);
    }

    #[test]
    fn prelog_in_unit_interval_and_ordered(sc in scenario()) {
        for regime in Regime::ALL {
            for scheme in [Scheme::Noma, Scheme::Orthogonal, Scheme::Baseline] {
                let p = prelog_factor(&sc, regime, scheme);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
        prop_assert!(prelog_factor(&sc, Regime::NoCsir, Scheme::Noma) >= prelog_factor(&sc, Regime::DlPilot, Scheme::Noma));
        let omit = sc.clone().with_prelog(PrelogMode::Omit);
        prop_assert_eq!(prelog_factor(&omit, Regime::DlPilot, Scheme::Baseline), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orthogonal_region_inside_noma_region(bg in 2.0..200.0f64, m in 2usize..64) {
        let sc = Scenario::symmetric(m, 2, 200, bg, 1.0, 1.0, 1.0).with_prelog(PrelogMode::Omit);
        let mc = McConfig::new(1, 0);
        let spec = GridSpec::region_with_reduction_points();
        let n = sweep_rate_region(&sc, Regime::NoCsir, Scheme::Noma, &spec, &mc).unwrap();
        let o = sweep_rate_region(&sc, Regime::NoCsir, Scheme::Orthogonal, &spec, &mc).unwrap();
        for (x, y) in o.pairs() {
            let cap = n.center_rate_at(x.min(n.max_edge_rate())).unwrap();
            prop_assert!(y <= cap + 1e-9, "O point ({x}, {y}) above N hull {cap}");
        }
    }

    #[test]
    fn refining_the_grid_never_lowers_the_optimum(bg in 20.0..200.0f64, m in 4usize..64, keep in 2usize..11) {
        let sc = Scenario::symmetric(m, 2, 200, bg, 1.0, 1.0, 1.0);
        let mc = McConfig::new(1, 0);
        let fine = GridSpec::sum_rate_default();
        let coarse = GridSpec { alpha_g: fine.alpha_g.iter().step_by(keep).copied().collect(), ..fine.clone() };
        let a = constrained_sum_rate(&sc, Regime::NoCsir, &coarse, &mc).unwrap();
        let b = constrained_sum_rate(&sc, Regime::NoCsir, &fine, &mc).unwrap();
        for scheme in [Scheme::Noma, Scheme::Orthogonal, Scheme::Baseline] {
            if let Some(x) = a.optimum(scheme).sum_rate() {
                prop_assert!(b.optimum(scheme).sum_rate().unwrap() >= x);
            }
        }
    }
}
