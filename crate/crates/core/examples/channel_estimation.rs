//! Uplink training for one trial: processed pilots, MMSE estimates, and the
//! estimation quality of every user under each scheme.
//!
//! ```text
//! cargo run --example channel_estimation
//! ```

use noma_mimo::channel::{draw_small_scale, norm_sqr, processed_ul_pilots};
use noma_mimo::estimation::{estimation_quality, mmse_ul_estimates};
use noma_mimo::{McConfig, PowerControl, Scenario, Scheme};

fn main() {
    let sc = Scenario::symmetric(16, 4, 200, 100.0, 1.0, 1.0, 1.0);
    let mc = McConfig::new(1, 42);
    let draw = draw_small_scale(&sc, &mc, 0).unwrap();

    for (scheme, pc) in [
        (Scheme::Noma, PowerControl::uniform(2, 0.05, 1.0, 0.25, 0.25, 0.5)),
        (Scheme::Orthogonal, PowerControl::uniform(2, 1.0, 1.0, 0.5, 0.5, 0.5)),
    ] {
        let pilots = processed_ul_pilots(&draw, &sc, &pc, scheme, &mc);
        let est = mmse_ul_estimates(&pilots, &sc, &pc, scheme).unwrap();
        let q = estimation_quality(&sc, &pc, scheme);
        println!("Scheme-{scheme}: {} pilots", pilots.ybar.len());
        for (j, v) in est.vectors.iter().enumerate() {
            println!(
                "  pilot {j}: ||estimate||^2 = {:8.3} (expected {:8.3})",
                norm_sqr(v),
                est.expected_norm_sqr(j)
            );
        }
        println!("  lambda center {:?}, edge {:?}", q.lambda_g, q.lambda_h);
    }
}
