//! Runs an experiment from a TOML config, exactly as the `noma-sim` binary
//! does, and prints the files it wrote.
//!
//! ```text
//! cargo run --example run_config -- crates/core/examples/configs/region_no_csir.toml out
//! ```

use std::path::PathBuf;

use noma_mimo::experiment::{run_experiment, ExperimentSpec, Overrides};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/region_no_csir.toml")
    });
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("noma-sim-example"));
    let spec = ExperimentSpec::load(&config, out, Vec::new(), &Overrides::default()).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    });
    match run_experiment(&spec) {
        Ok((_, files)) => files.iter().for_each(|f| println!("{}", f.display())),
        Err(e) => {
            eprintln!("{}", e.report());
            std::process::exit(e.exit_code());
        }
    }
}
