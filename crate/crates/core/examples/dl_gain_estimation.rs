//! Downlink pilot moments: the true effective gain has mean sqrt(M lambda)
//! and unit variance, and its LMMSE estimate sets the achievable rate.
//!
//! ```text
//! cargo run --release --example dl_gain_estimation
//! ```

use noma_mimo::estimation::estimation_quality;
use noma_mimo::rates::dl_pilot_moments;
use noma_mimo::{rate_dl_pilot, McConfig, PowerControl, Scenario, Scheme};

fn main() {
    let mc = McConfig::new(50_000, 5).with_antithetic(true);
    let pc = PowerControl::uniform(1, 0.03, 1.0, 0.2, 0.8, 0.5);
    for m in [10, 100] {
        let sc = Scenario::symmetric(m, 2, 200, 100.0, 1.0, 1.0, 1.0);
        let q = estimation_quality(&sc, &pc, Scheme::Noma);
        let gm = dl_pilot_moments(&sc, &pc, Scheme::Noma, &mc).unwrap();
        println!("M = {m}");
        for g in &gm {
            let lambda = q.user(g.user);
            println!(
                "  user {}: E[f] {:.4} (sqrt(M lambda) = {:.4}), Var[f] {:.4}, E[f/f_hat] {:.4}, E[1/|f_hat|^2] {:.4}",
                g.user,
                g.mean_gain.re,
                (m as f64 * lambda).sqrt(),
                g.gain_var(),
                g.mean_ratio.re,
                g.inv_power
            );
        }
        let r = rate_dl_pilot(&sc, &pc, Scheme::Noma, &mc).unwrap();
        println!("  rates: center {:.4}, edge {:.4} b/s/Hz", r.rates_g[0], r.rates_h[0]);
    }
}
