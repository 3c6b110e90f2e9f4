use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::experiments::config::ScenarioConfig;
use crate::experiments::runner::RunOutput;

pub const FORMAT_VERSION: u32 = 1;
pub const POPULATIONS_FILE: &str = "populations.csv";
pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const REPORT_FILE: &str = "report.json";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    config: &'a ScenarioConfig,
    scenario_hash: &'a str,
    dt: f64,
    seeds: &'a [u64],
    tool_version: &'static str,
    format_version: u32,
    files: [&'static str; 3],
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn populations_csv(out: &RunOutput) -> String {
    let stride = out.config.output.population_stride;
    let mut s = String::from("t,n,P\n");
    for (i, (t, p)) in out.times.iter().zip(&out.populations).enumerate() {
        if i % stride != 0 {
            continue;
        }
        let t = fmt(*t);
        for (n, x) in p.iter().enumerate() {
            writeln!(s, "{t},{n},{}", fmt(*x)).expect("write to string");
        }
    }
    s
}

pub fn observables_csv(out: &RunOutput) -> String {
    let mut s = String::from("t,fidelity,sigma_idx,deltaE,participation\n");
    for r in &out.observables {
        writeln!(
            s,
            "{},{},{},{},{}",
            fmt(r.t),
            fmt(r.fidelity),
            fmt(r.sigma_idx),
            fmt(r.delta_e),
            fmt(r.participation)
        )
        .expect("write to string");
    }
    s
}

/// Writes the four bundle files into `dir`, creating it if needed, and returns their paths.
pub fn write_bundle(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let meta = Metadata {
        config: &out.config,
        scenario_hash: &out.report.scenario_hash,
        dt: out.report.dt,
        seeds: &out.report.seeds,
        tool_version: env!("CARGO_PKG_VERSION"),
        format_version: FORMAT_VERSION,
        files: [POPULATIONS_FILE, OBSERVABLES_FILE, REPORT_FILE],
    };
    let files = [
        (POPULATIONS_FILE, populations_csv(out).into_bytes()),
        (OBSERVABLES_FILE, observables_csv(out).into_bytes()),
        (REPORT_FILE, pretty(&out.report)?),
        (METADATA_FILE, pretty(&meta)?),
    ];
    let mut paths = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let p = dir.join(name);
        write_atomic(&p, &bytes)?;
        paths.push(p);
    }
    Ok(paths)
}

fn pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}
