use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentError, ExperimentResult, ExperimentSpec};
use crate::region::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Plot,
}

pub const REGION_HEADER: [&str; 5] = ["R_edge", "R_center", "scheme", "regime", "is_hull_vertex"];
pub const SWEEP_HEADER: [&str; 5] = ["x_value", "scheme", "sum_rate", "target_edge_rate", "feasible"];
pub const VALIDATE_HEADER: [&str; 8] =
    ["check", "scheme", "user", "oracle", "expected", "rel_error", "tolerance", "pass"];

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| ExperimentError::Io { path: path.into(), source: e.into() })?;
    let fail = |e: csv::Error| ExperimentError::Io { path: path.into(), source: e.into() };
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.flush().map_err(io(path))
}

fn write_dat(path: &Path, columns: (&str, &str), rows: &[(f64, f64)]) -> Result<(), ExperimentError> {
    let mut text = format!("# {} {}\n", columns.0, columns.1);
    for (x, y) in rows {
        text.push_str(&format!("{x} {y}\n"));
    }
    fs::write(path, text).map_err(io(path))
}

fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    command: &'static str,
    seed: u64,
    trials: u64,
    chunk: u64,
    antithetic: bool,
    scenario: &'a super::ScenarioConfig,
    grid: Option<GridSpec>,
    power: &'a super::PowerConfig,
    experiment: &'a super::ExperimentConfig,
    result: &'a ExperimentResult,
}

/// Writes the requested formats to the output directory and returns the
/// files written, in a fixed order.
pub fn emit_outputs(spec: &ExperimentSpec, result: &ExperimentResult) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(&spec.out).map_err(io(&spec.out))?;
    let stem = spec.command.stem();
    let mut files = Vec::new();
    for format in &spec.formats {
        match format {
            Format::Csv => match result {
                ExperimentResult::Region(regions) => {
                    for r in regions {
                        let path = spec.out.join(format!("{stem}_{}_{}.csv", r.regime.label(), r.scheme));
                        let tag = |(x, y): (f64, f64), hull: bool| {
                            vec![num(x), num(y), r.scheme.to_string(), r.regime.label().to_string(), hull.to_string()]
                        };
                        let mut rows: Vec<Vec<String>> = r.pairs().into_iter().map(|p| tag(p, false)).collect();
                        rows.extend(r.hull.iter().map(|&p| tag(p, true)));
                        write_csv(&path, &REGION_HEADER, &rows)?;
                        files.push(path);
                    }
                }
                ExperimentResult::Sweep(rows) => {
                    let path = spec.out.join(format!("{stem}.csv"));
                    let rows: Vec<Vec<String>> = rows
                        .iter()
                        .map(|r| {
                            vec![
                                num(r.x_value),
                                r.scheme.to_string(),
                                r.sum_rate.map(num).unwrap_or_default(),
                                num(r.target_edge_rate),
                                r.feasible.to_string(),
                            ]
                        })
                        .collect();
                    write_csv(&path, &SWEEP_HEADER, &rows)?;
                    files.push(path);
                }
                ExperimentResult::Validate(checks) => {
                    let path = spec.out.join(format!("{stem}.csv"));
                    let rows: Vec<Vec<String>> = checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.check.clone(),
                                c.scheme.to_string(),
                                c.user.to_string(),
                                num(c.oracle),
                                num(c.expected),
                                num(c.rel_error),
                                num(c.tolerance),
                                c.pass.to_string(),
                            ]
                        })
                        .collect();
                    write_csv(&path, &VALIDATE_HEADER, &rows)?;
                    files.push(path);
                }
            },
            Format::Json => {
                let path = spec.out.join(format!("{stem}.json"));
                let meta = Metadata {
                    version: env!("CARGO_PKG_VERSION"),
                    command: spec.command.label(),
                    seed: spec.config.mc.base_seed,
                    trials: spec.config.mc.trials,
                    chunk: spec.config.mc.chunk,
                    antithetic: spec.config.mc.antithetic,
                    scenario: &spec.config.scenario,
                    grid: spec.grid(),
                    power: &spec.config.power,
                    experiment: &spec.config.experiment,
                    result,
                };
                let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
                text.push('\n');
                fs::write(&path, text).map_err(io(&path))?;
                files.push(path);
            }
            Format::Plot => match result {
                ExperimentResult::Region(regions) => {
                    for r in regions {
                        let base = format!("{stem}_{}_{}", r.regime.label(), r.scheme);
                        let points = spec.out.join(format!("{base}_points.dat"));
                        write_dat(&points, ("R_edge", "R_center"), &r.pairs())?;
                        let hull = spec.out.join(format!("{base}_hull.dat"));
                        write_dat(&hull, ("R_edge", "R_center"), &r.hull)?;
                        files.extend([points, hull]);
                    }
                }
                ExperimentResult::Sweep(rows) => {
                    let mut schemes = Vec::new();
                    for r in rows {
                        if !schemes.contains(&r.scheme) {
                            schemes.push(r.scheme);
                        }
                    }
                    for scheme in schemes {
                        let path = spec.out.join(format!("{stem}_{scheme}.dat"));
                        let curve: Vec<(f64, f64)> = rows
                            .iter()
                            .filter(|r| r.scheme == scheme)
                            .filter_map(|r| r.sum_rate.map(|s| (r.x_value, s)))
                            .collect();
                        write_dat(&path, ("x_value", "sum_rate"), &curve)?;
                        files.push(path);
                    }
                }
                ExperimentResult::Validate(_) => {}
            },
        }
    }
    Ok(files)
}
