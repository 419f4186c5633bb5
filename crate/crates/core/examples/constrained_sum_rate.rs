//! Sum rate under the edge-rate constraint, with downlink pilots, as the
//! number of antennas and the number of users vary.
//!
//! ```text
//! cargo run --release --example constrained_sum_rate
//! ```

use noma_mimo::region::{constrained_sum_rate, GridSpec};
use noma_mimo::scenario::{McConfig, Regime, Scenario, Scheme};

fn report(label: &str, sc: &Scenario, mc: &McConfig) {
    let res = constrained_sum_rate(sc, Regime::DlPilot, &GridSpec::sum_rate_default(), mc).expect("sweep");
    print!("{label:<12} target {:.3}", res.target_edge_rate());
    for scheme in [Scheme::Noma, Scheme::Orthogonal, Scheme::Baseline] {
        let o = res.optimum(scheme);
        match &o.best {
            Some(p) => print!("  {scheme}: {:.3} (alpha_g {:.4})", p.sum_rate(), p.power.alpha_g[0]),
            None => print!("  {scheme}: infeasible by {:.3}", o.shortfall),
        }
    }
    println!();
}

fn main() {
    let mc = McConfig::new(20_000, 7);
    for m in [20, 50, 100] {
        report(&format!("M = {m}"), &Scenario::symmetric(m, 2, 200, 100.0, 1.0, 1.0, 1.0), &mc);
    }
    for k in [4, 8] {
        report(&format!("K = {k}"), &Scenario::symmetric(100, k, 200, 100.0, 1.0, 1.0, 1.0), &mc);
    }
}
