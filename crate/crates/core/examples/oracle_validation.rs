//! Rebuilds the no-CSIR SINR terms from simulated beamformed gains and
//! compares them with the closed forms.
//!
//! ```text
//! cargo run --release --example oracle_validation
//! ```

use noma_mimo::rates::{hardening_oracle_moments, no_csir_terms};
use noma_mimo::{McConfig, PowerControl, Scenario, Scheme};

fn main() {
    let mc = McConfig::new(200_000, 3).with_antithetic(true);
    for m in [10, 100] {
        let sc = Scenario::symmetric(m, 2, 200, 100.0, 1.0, 1.0, 1.0);
        let pc = PowerControl::equal_split(1);
        let oracle = hardening_oracle_moments(&sc, &pc, Scheme::Noma, &mc).unwrap();
        let closed = no_csir_terms(&sc, &pc, Scheme::Noma);
        println!("M = {m}");
        for (o, c) in oracle.iter().zip(&closed) {
            println!(
                "  user {}: signal {:.4} / {:.4}, coherent {:.4} / {:.4}, non-coherent {:.4} / {:.4}",
                o.user,
                o.signal_power,
                c.signal,
                o.coherent_self_interference,
                c.coherent,
                o.noncoherent(),
                c.noncoherent
            );
        }
    }
}
