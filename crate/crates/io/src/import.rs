//! Measured pull-test results as CSV: `generation,trial1_in,trial2_in,...`.
//!
//! Any number of trial columns is accepted; blank cells are skipped.

use std::path::Path;

use anyhow::{bail, Context, Result};
use mechsynth_core::surrogate::Measurement;

pub fn parse_measurements<R: std::io::Read>(reader: R) -> Result<Vec<Measurement>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().context("reading header")?.clone();
    if headers.get(0) != Some("generation") || headers.len() < 2 {
        bail!("header must be `generation,trial1_in,...`, found `{}`", headers.iter().collect::<Vec<_>>().join(","));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.with_context(|| format!("line {line}"))?;
        let generation: u32 = rec[0].parse().with_context(|| format!("line {line}: bad generation `{}`", &rec[0]))?;
        let trials_in = rec
            .iter()
            .skip(1)
            .filter(|c| !c.is_empty())
            .map(|c| c.parse::<f64>().with_context(|| format!("line {line}: bad distance `{c}`")))
            .collect::<Result<Vec<_>>>()?;
        if trials_in.is_empty() {
            bail!("line {line}: no trial distances");
        }
        rows.push(Measurement { generation, trials_in });
    }
    Ok(rows)
}

pub fn load_measurements(path: &Path) -> Result<Vec<Measurement>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_measurements(file).with_context(|| format!("reading {}", path.display()))
}
