//! Closed-form rates without downlink CSI at a few operating points, with
//! each SINR split into its signal, coherent and non-coherent parts.
//!
//! ```text
//! cargo run --example closed_forms
//! ```

use noma_mimo::rates::{no_csir_decodability_margin, no_csir_terms};
use noma_mimo::{rate_no_csir, PowerControl, PrelogMode, Scenario, Scheme};

fn main() {
    let sc = Scenario::symmetric(100, 2, 200, 100.0, 1.0, 1.0, 1.0);
    let pc = PowerControl::uniform(1, 1.0, 1.0, 0.5, 0.5, 0.5);

    let r = rate_no_csir(&sc, &pc, Scheme::Noma).unwrap();
    println!("Scheme-N, M = 100: center {:.4}, edge {:.4} b/s/Hz", r.rates_g[0], r.rates_h[0]);
    for (u, t) in no_csir_terms(&sc, &pc, Scheme::Noma).iter().enumerate() {
        println!(
            "  user {u}: signal {:.4}, coherent {:.4}, non-coherent {:.4}, SINR {:.4}",
            t.signal,
            t.coherent,
            t.noncoherent,
            t.sinr()
        );
    }
    println!("  SIC margin {:.4} b/s/Hz", no_csir_decodability_margin(&sc, &pc)[0]);

    let sc = Scenario::symmetric(10, 2, 200, 100.0, 1.0, 1.0, 1.0).with_prelog(PrelogMode::Omit);
    let full = PowerControl::uniform(1, 1.0, 1.0, 1.0, 1.0, 0.5);
    let o = rate_no_csir(&sc, &full, Scheme::Orthogonal).unwrap();
    println!("Scheme-O, M = 10, eta = 0.5: center {:.4}, edge {:.4} b/s/Hz", o.rates_g[0], o.rates_h[0]);

    // A center user with no pilot power cannot decode its partner.
    let blind = PowerControl::uniform(1, 0.0, 1.0, 0.5, 0.5, 0.5);
    match rate_no_csir(&sc, &blind, Scheme::Noma) {
        Ok(_) => println!("unexpectedly decodable"),
        Err(e) => println!("alpha_g = 0: {e}"),
    }
}
