//! CSV output.
//!
//! Every file starts with [`CSV_HEADER`] and carries one row per generation,
//! ascending. Reals are written in scientific notation with 17 significant
//! digits; standard deviations use the population formula (divisor `R`).
//! The combined file prefixes each row with the config's slug in a `config`
//! column.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::harness::AggregateTrace;

pub const CSV_HEADER: &str = "generation,beta,q,best_so_far_mean,best_so_far_std,pop_mean_energy_mean,pop_mean_energy_std,selection_entropy_mean";

const RUN_TRACE_HEADER: &str =
    "generation,beta,q,best_energy,mean_energy,best_so_far,selection_entropy";

/// Formats a real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_rows(out: &mut String, agg: &AggregateTrace, prefix: Option<&str>) {
    for r in &agg.records {
        if let Some(p) = prefix {
            out.push_str(p);
            out.push(',');
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.generation,
            real(r.beta),
            real(r.q),
            real(r.best_so_far_mean),
            real(r.best_so_far_std),
            real(r.pop_mean_energy_mean),
            real(r.pop_mean_energy_std),
            real(r.selection_entropy_mean),
        );
    }
}

/// CSV text for one aggregate.
pub fn aggregate_csv(agg: &AggregateTrace) -> String {
    let mut out = String::with_capacity(160 * (agg.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    push_rows(&mut out, agg, None);
    out
}

/// CSV text for all aggregates, tagged by config slug.
pub fn combined_csv(aggs: &[AggregateTrace]) -> String {
    let mut out = format!("config,{CSV_HEADER}\n");
    for agg in aggs {
        push_rows(&mut out, agg, Some(&agg.entry.slug()));
    }
    out
}

/// CSV text for a single run's trace (used for byte-level trace comparison).
pub fn run_trace_csv(trace: &RunTrace) -> String {
    let mut out = format!("{RUN_TRACE_HEADER}\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.generation,
            real(r.beta),
            real(r.q),
            real(r.best_energy),
            real(r.mean_energy),
            real(r.best_so_far),
            real(r.selection_entropy),
        );
    }
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `<objective>_<slug>.csv` per config and `<objective>_combined.csv`
/// into `dir`, creating it if needed. Returns the written paths.
pub fn write_csv(aggs: &[AggregateTrace], dir: &Path) -> Result<Vec<PathBuf>> {
    let first = aggs
        .first()
        .ok_or_else(|| Error::usage("nothing to write: no aggregates"))?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let objective = first.entry.engine.objective;
    let mut written = Vec::with_capacity(aggs.len() + 1);
    for agg in aggs {
        let name = format!("{objective}_{}.csv", agg.entry.slug());
        written.push(write_file(dir.join(name), &aggregate_csv(agg))?);
    }
    written.push(write_file(
        dir.join(format!("{objective}_combined.csv")),
        &combined_csv(aggs),
    )?);
    Ok(written)
}
