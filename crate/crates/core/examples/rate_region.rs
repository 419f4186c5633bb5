//! Two-user rate regions with perfect downlink CSI, with and without uplink
//! noise, for Scheme-N and Scheme-O.
//!
//! ```text
//! cargo run --release --example rate_region
//! ```

use noma_mimo::region::{sweep_rate_region, GridSpec};
use noma_mimo::scenario::{McConfig, PrelogMode, Regime, Scenario, Scheme};

fn main() {
    let mc = McConfig::new(20_000, 1);
    let spec = GridSpec::region_fine();
    for noise_free in [true, false] {
        let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0)
            .with_noise_free_ul(noise_free)
            .with_prelog(PrelogMode::Omit);
        println!("noise-free uplink: {noise_free}");
        for scheme in [Scheme::Noma, Scheme::Orthogonal] {
            let region = sweep_rate_region(&sc, Regime::PerfectCsir, scheme, &spec, &mc).expect("sweep");
            let at = region.center_rate_at(2.5).map_or("-".to_string(), |r| format!("{r:.3}"));
            println!(
                "  {scheme:>8}: max edge {:.3}, max center {:.3}, center at edge 2.5: {at}",
                region.max_edge_rate(),
                region.hull[0].1
            );
            for (x, y) in &region.hull {
                println!("    {x:8.4} {y:8.4}");
            }
        }
    }
}
