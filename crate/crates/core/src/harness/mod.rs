//! Replicate experiments: seeded runs per engine config, aggregated per
//! generation, written out as CSV tables and SVG convergence plots.

pub mod cli;
pub mod csv;
pub mod svg;

use std::path::PathBuf;

use crate::engine::{run, EngineConfig, RunTrace, Scheme};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::parallel::{map_collect, Execution};

pub use self::csv::{run_trace_csv, write_csv, CSV_HEADER};
pub use self::svg::{render_convergence_plot, write_convergence_plot};

/// One engine configuration taking part in a comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigEntry {
    pub engine: EngineConfig,
}

impl ConfigEntry {
    pub fn new(engine: EngineConfig) -> Self {
        Self { engine }
    }

    /// Human-readable legend label, e.g. `tsallis (q0 = 1.5)`.
    pub fn label(&self) -> String {
        match self.q0() {
            Some(q0) if self.engine.schedule.constant_q => format!("tsallis (q = {q0}, constant)"),
            Some(q0) => format!("tsallis (q0 = {q0})"),
            None => self.engine.scheme.to_string(),
        }
    }

    /// File-name fragment, e.g. `tsallis_q0-1.5`.
    pub fn slug(&self) -> String {
        match self.q0() {
            Some(q0) if self.engine.schedule.constant_q => format!("tsallis_q-{q0}_constant"),
            Some(q0) => format!("tsallis_q0-{q0}"),
            None => self.engine.scheme.to_string(),
        }
    }

    pub fn q0(&self) -> Option<f64> {
        (self.engine.scheme == Scheme::Tsallis).then_some(self.engine.schedule.q0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub configs: Vec<ConfigEntry>,
    /// Replicate runs per config.
    pub runs: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub plot: bool,
    /// Scheduling of replicate runs; never affects results.
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(configs: Vec<ConfigEntry>, runs: usize, master_seed: u64) -> Self {
        Self {
            configs,
            runs,
            master_seed,
            out_dir: PathBuf::from("results"),
            plot: false,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::usage("runs per config must be at least 1"));
        }
        let first = self
            .configs
            .first()
            .ok_or_else(|| Error::usage("experiment has no engine configs"))?;
        for (i, entry) in self.configs.iter().enumerate() {
            let e = &entry.engine;
            e.validate()
                .map_err(|err| Error::usage(format!("config {i}: {err}")))?;
            let f = &first.engine;
            if e.objective != f.objective
                || e.pop_size != f.pop_size
                || e.generations() != f.generations()
            {
                return Err(Error::usage(format!(
                    "config {i} differs from config 0 in objective, population size or generations"
                )));
            }
        }
        Ok(())
    }

    pub fn objective(&self) -> Option<Objective> {
        self.configs.first().map(|c| c.engine.objective)
    }
}

/// Seed of replicate `run` of config `config`.
///
/// `(config << 32) | run` is offset by the master seed and passed through the
/// SplitMix64 finalizer, a bijection on `u64`, so distinct pairs below `2^32`
/// never share a seed.
pub fn derive_run_seed(master: u64, config: usize, run: usize) -> u64 {
    let mut z = master.wrapping_add(((config as u64) << 32) | (run as u64 & 0xffff_ffff));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cross-run statistics for one generation.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRecord {
    pub generation: usize,
    pub beta: f64,
    pub q: f64,
    pub best_so_far_mean: f64,
    pub best_so_far_std: f64,
    pub pop_mean_energy_mean: f64,
    pub pop_mean_energy_std: f64,
    pub selection_entropy_mean: f64,
}

/// Per-generation aggregate of all replicate runs of one config.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateTrace {
    pub entry: ConfigEntry,
    pub runs: usize,
    pub records: Vec<AggregateRecord>,
}

impl AggregateTrace {
    pub fn label(&self) -> String {
        self.entry.label()
    }

    pub fn final_best_so_far_mean(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.best_so_far_mean)
    }
}

/// Mean and population standard deviation (divisor `R`), summed in order.
/// The mean is clamped into `[min, max]` of the samples to absorb rounding.
fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum, lo, hi) = xs.clone().fold(
        (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY),
        |(n, s, lo, hi), x| (n + 1, s + x, lo.min(x), hi.max(x)),
    );
    let mean = (sum / n as f64).clamp(lo, hi);
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Aggregates equally long traces of one config.
pub fn aggregate(entry: &ConfigEntry, traces: &[RunTrace]) -> Result<AggregateTrace> {
    let first = traces
        .first()
        .ok_or_else(|| Error::usage("cannot aggregate zero runs"))?;
    let len = first.records.len();
    if traces.iter().any(|t| t.records.len() != len) {
        return Err(Error::usage("traces differ in length"));
    }
    let records = (0..len)
        .map(|g| {
            let (best_so_far_mean, best_so_far_std) =
                mean_std(traces.iter().map(|t| t.records[g].best_so_far));
            let (pop_mean_energy_mean, pop_mean_energy_std) =
                mean_std(traces.iter().map(|t| t.records[g].mean_energy));
            let (selection_entropy_mean, _) =
                mean_std(traces.iter().map(|t| t.records[g].selection_entropy));
            let head = &first.records[g];
            AggregateRecord {
                generation: head.generation,
                beta: head.beta,
                q: head.q,
                best_so_far_mean,
                best_so_far_std,
                pop_mean_energy_mean,
                pop_mean_energy_std,
                selection_entropy_mean,
            }
        })
        .collect();
    Ok(AggregateTrace {
        entry: entry.clone(),
        runs: traces.len(),
        records,
    })
}

/// Runs every config `cfg.runs` times and returns the raw traces, indexed
/// `[config][run]`.
pub fn run_replicates(cfg: &ExperimentConfig) -> Result<Vec<Vec<RunTrace>>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.configs.len())
        .flat_map(|i| (0..cfg.runs).map(move |j| (i, j)))
        .collect();
    let results = map_collect(&jobs, cfg.execution, |&(i, j)| {
        let mut engine = cfg.configs[i].engine.clone();
        engine.seed = derive_run_seed(cfg.master_seed, i, j);
        if cfg.execution.is_parallel() {
            // replicates already saturate the pool
            engine.execution = Execution::Sequential;
        }
        run(&engine).map_err(|e| Error::Run {
            config: i,
            run: j,
            source: Box::new(e),
        })
    });
    let mut grouped: Vec<Vec<RunTrace>> = vec![Vec::with_capacity(cfg.runs); cfg.configs.len()];
    for ((i, _), r) in jobs.into_iter().zip(results) {
        grouped[i].push(r?);
    }
    Ok(grouped)
}

/// Runs all replicates and aggregates them per config, in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<AggregateTrace>> {
    run_replicates(cfg)?
        .iter()
        .zip(&cfg.configs)
        .map(|(traces, entry)| aggregate(entry, traces))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn tiny(scheme: Scheme) -> ConfigEntry {
        let mut e = EngineConfig::new(Objective::Rastrigin, scheme);
        e.pop_size = 20;
        e.schedule.horizon = 8;
        e.schedule.q0 = 2.0;
        ConfigEntry::new(e)
    }

    #[test]
    fn seeds_are_collision_free() {
        let mut seen = HashSet::new();
        for i in 0..20 {
            for j in 0..500 {
                assert!(seen.insert(derive_run_seed(7, i, j)));
            }
        }
    }

    #[test]
    fn single_run_aggregate_equals_trace() {
        let cfg = ExperimentConfig::new(vec![tiny(Scheme::Tsallis)], 1, 3);
        let traces = run_replicates(&cfg).unwrap();
        let agg = run_experiment(&cfg).unwrap();
        assert_eq!(agg.len(), 1);
        for (a, r) in agg[0].records.iter().zip(&traces[0][0].records) {
            assert_eq!(a.best_so_far_mean, r.best_so_far);
            assert_eq!(a.pop_mean_energy_mean, r.mean_energy);
            assert_eq!(a.best_so_far_std, 0.0);
            assert_eq!(a.pop_mean_energy_std, 0.0);
        }
    }

    #[test]
    fn aggregate_mean_lies_within_run_range() {
        let cfg = ExperimentConfig::new(
            vec![tiny(Scheme::Tsallis), tiny(Scheme::Proportionate)],
            7,
            11,
        );
        let traces = run_replicates(&cfg).unwrap();
        let aggs = run_experiment(&cfg).unwrap();
        for (agg, runs) in aggs.iter().zip(&traces) {
            assert_eq!(agg.runs, 7);
            for (g, rec) in agg.records.iter().enumerate() {
                let vals: Vec<f64> = runs.iter().map(|t| t.records[g].best_so_far).collect();
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                assert!(lo <= rec.best_so_far_mean && rec.best_so_far_mean <= hi);
            }
        }
    }

    #[test]
    fn replicate_scheduling_is_deterministic() {
        let mut cfg = ExperimentConfig::new(vec![tiny(Scheme::Boltzmann)], 4, 5);
        let par = run_experiment(&cfg).unwrap();
        cfg.execution = Execution::Sequential;
        assert_eq!(run_experiment(&cfg).unwrap(), par);
    }

    #[test]
    fn mean_clamps_rounding() {
        let (m, s) = mean_std([0.1, 0.1, 0.1].into_iter());
        assert_eq!(m, 0.1);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn validation_rejects_mismatched_configs() {
        let mut other = tiny(Scheme::Boltzmann);
        other.engine.pop_size = 30;
        let cfg = ExperimentConfig::new(vec![tiny(Scheme::Tsallis), other], 2, 0);
        assert!(run_experiment(&cfg).is_err());
        assert!(run_experiment(&ExperimentConfig::new(vec![], 2, 0)).is_err());
        assert!(run_experiment(&ExperimentConfig::new(vec![tiny(Scheme::Tsallis)], 0, 0)).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(tiny(Scheme::Tsallis).label(), "tsallis (q0 = 2)");
        assert_eq!(tiny(Scheme::Tsallis).slug(), "tsallis_q0-2");
        assert_eq!(tiny(Scheme::Boltzmann).label(), "boltzmann");
        assert_eq!(tiny(Scheme::Proportionate).q0(), None);
    }
}
