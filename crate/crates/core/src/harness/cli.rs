//! Command-line front end.
//!
//! Values come from, in decreasing precedence: command-line flags, an
//! optional `--config` file of `key = value` lines (keys are the flag names
//! without leading dashes), and the built-in defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{CommandFactory, Parser};

use crate::engine::{EngineConfig, Scheme};
use crate::error::Error;
use crate::harness::{
    run_experiment, write_convergence_plot, write_csv, ConfigEntry, ExperimentConfig,
};
use crate::objectives::Objective;
use crate::parallel::Execution;

pub const DEFAULT_SEED: u64 = 20_041_029;

/// Run seeded evolutionary-algorithm experiments comparing proportionate,
/// Boltzmann and Tsallis selection on the Ackley, Rastrigin and Griewangk
/// benchmarks. Writes per-generation CSV tables (and optionally an SVG plot).
#[derive(Debug, Parser)]
#[command(name = "tsallis-ea", version)]
pub struct Args {
    /// Benchmark function: ackley | rastrigin | griewangk (required)
    #[arg(long)]
    pub function: Option<String>,
    /// Selection scheme: proportionate | boltzmann | tsallis
    #[arg(long)]
    pub selection: Option<String>,
    /// Comma-separated selection schemes to compare, e.g. tsallis,boltzmann,proportionate
    #[arg(long)]
    pub compare: Option<String>,
    /// Initial non-extensive index for tsallis (required with tsallis); a
    /// comma-separated list runs one tsallis config per value
    #[arg(long)]
    pub q0: Option<String>,
    /// Keep q fixed at q0 instead of decaying it linearly to 1
    #[arg(long)]
    pub constant_q: bool,
    /// Initial inverse temperature of the Cauchy schedule [default: 200]
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Exponent of the Cauchy schedule, > 1 [default: 1.01]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Population size [default: 350]
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Generations per run [default: 100]
    #[arg(long)]
    pub generations: Option<usize>,
    /// Replicate runs per config [default: 20]
    #[arg(long)]
    pub runs: Option<usize>,
    /// Number of variables [default: 15]
    #[arg(long)]
    pub vars: Option<usize>,
    /// Bits per variable [default: 5]
    #[arg(long)]
    pub bits: Option<u32>,
    /// Uniform crossover probability per pair [default: 0.8]
    #[arg(long)]
    pub pc: Option<f64>,
    /// Per-bit mutation probability [default: 0.02]
    #[arg(long)]
    pub pbit: Option<f64>,
    /// Use raw energies in the Tsallis weights instead of shifting by the population minimum
    #[arg(long)]
    pub no_energy_shift: bool,
    /// Master seed [default: 20041029]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: results]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG convergence plot
    #[arg(long)]
    pub plot: bool,
    /// Run replicates on one thread
    #[arg(long)]
    pub sequential: bool,
    /// Config file of `key = value` lines using the flag names without dashes
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Why the command line could not produce an experiment.
#[derive(Debug)]
pub enum CliError {
    /// Parse failures, `--help` and `--version` as reported by clap.
    Clap(clap::Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
        }
    }

    fn usage(msg: impl fmt::Display) -> Self {
        CliError::Usage(format!("error: {msg}\n\n{}", help_text()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{}", e.render()),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<clap::Error> for CliError {
    fn from(e: clap::Error) -> Self {
        CliError::Clap(e)
    }
}

pub fn help_text() -> String {
    Args::command().render_help().to_string()
}

const FILE_KEYS: &[&str] = &[
    "function",
    "selection",
    "compare",
    "q0",
    "constant-q",
    "beta0",
    "alpha",
    "pop-size",
    "generations",
    "runs",
    "vars",
    "bits",
    "pc",
    "pbit",
    "no-energy-shift",
    "seed",
    "out",
    "plot",
    "sequential",
];

/// Parses a `key = value` config file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let key = key.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key {key:?}", n + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct FileValues(BTreeMap<String, String>);

impl FileValues {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>().map_err(|_| {
                    CliError::usage(format!("config file: invalid value {v:?} for {key}"))
                })
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }
}

fn load_config_file(path: &Path) -> Result<FileValues, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_file(&text)
        .map(FileValues)
        .map_err(|e| CliError::usage(format!("config file {}: {e}", path.display())))
}

fn parse_list<T: FromStr>(what: &str, s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .map(|item| {
            item.parse::<T>()
                .map_err(|_| CliError::usage(format!("invalid {what} {item:?}")))
        })
        .collect()
}

fn usage_err(e: Error) -> CliError {
    match e {
        Error::Usage(msg) => CliError::usage(msg),
        other => CliError::usage(other),
    }
}

/// Builds an experiment from command-line arguments (including the program
/// name in position 0).
pub fn parse_cli<I, T>(argv: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        return Err(CliError::Usage(help_text()));
    }
    let args = Args::try_parse_from(argv)?;
    let file = match &args.config {
        Some(path) => load_config_file(path)?,
        None => FileValues(BTreeMap::new()),
    };
    build(args, file)
}

fn build(args: Args, file: FileValues) -> Result<ExperimentConfig, CliError> {
    let function = args
        .function
        .or_else(|| file.string("function"))
        .ok_or_else(|| CliError::usage("--function is required"))?;
    let objective: Objective = function.parse().map_err(usage_err)?;

    let (selection, compare) = if args.selection.is_some() || args.compare.is_some() {
        (args.selection, args.compare)
    } else {
        (file.string("selection"), file.string("compare"))
    };
    let schemes: Vec<Scheme> = match (selection, compare) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "give either --selection or --compare, not both",
            ))
        }
        (Some(s), None) => vec![s.trim().parse().map_err(usage_err)?],
        (None, Some(list)) => {
            let schemes: Vec<Scheme> = list
                .split(',')
                .map(|s| s.trim().parse().map_err(usage_err))
                .collect::<Result<_, _>>()?;
            for (k, s) in schemes.iter().enumerate() {
                if schemes[..k].contains(s) {
                    return Err(CliError::usage(format!("--compare lists {s} twice")));
                }
            }
            schemes
        }
        (None, None) => {
            return Err(CliError::usage(
                "one of --selection or --compare is required",
            ))
        }
    };
    let has_tsallis = schemes.contains(&Scheme::Tsallis);

    let q0s: Option<Vec<f64>> = match args.q0.or_else(|| file.string("q0")) {
        Some(s) => Some(parse_list("q0", &s)?),
        None => None,
    };
    let constant_q = args.constant_q || file.flag("constant-q")?;
    match (&q0s, has_tsallis) {
        (None, true) => return Err(CliError::usage("--q0 is required with tsallis selection")),
        (Some(_), false) => return Err(CliError::usage("--q0 only applies to tsallis selection")),
        _ => {}
    }
    if constant_q && !has_tsallis {
        return Err(CliError::usage(
            "--constant-q only applies to tsallis selection",
        ));
    }

    let mut base = EngineConfig::new(objective, Scheme::Boltzmann);
    let vars = args.vars.or(file.get("vars")?).unwrap_or(15);
    let bits = args.bits.or(file.get("bits")?).unwrap_or(5);
    base.space = objective.search_space(vars, bits).map_err(usage_err)?;
    base.pop_size = args
        .pop_size
        .or(file.get("pop-size")?)
        .unwrap_or(base.pop_size);
    base.schedule.horizon = args
        .generations
        .or(file.get("generations")?)
        .unwrap_or(base.schedule.horizon);
    base.schedule.beta0 = args
        .beta0
        .or(file.get("beta0")?)
        .unwrap_or(base.schedule.beta0);
    base.schedule.alpha = args
        .alpha
        .or(file.get("alpha")?)
        .unwrap_or(base.schedule.alpha);
    base.schedule.constant_q = constant_q;
    base.variation.p_crossover = args
        .pc
        .or(file.get("pc")?)
        .unwrap_or(base.variation.p_crossover);
    base.variation.p_bit_mutation = args
        .pbit
        .or(file.get("pbit")?)
        .unwrap_or(base.variation.p_bit_mutation);
    base.energy_shift = !(args.no_energy_shift || file.flag("no-energy-shift")?);

    let mut configs = Vec::new();
    for scheme in schemes {
        let mut engine = base.clone();
        engine.scheme = scheme;
        if scheme == Scheme::Tsallis {
            for &q0 in q0s.as_deref().unwrap_or_default() {
                let mut e = engine.clone();
                e.schedule.q0 = q0;
                configs.push(ConfigEntry::new(e));
            }
        } else {
            configs.push(ConfigEntry::new(engine));
        }
    }

    let runs = args.runs.or(file.get("runs")?).unwrap_or(20);
    let seed = args.seed.or(file.get("seed")?).unwrap_or(DEFAULT_SEED);
    let mut cfg = ExperimentConfig::new(configs, runs, seed);
    cfg.out_dir = args
        .out
        .or(file.get::<PathBuf>("out")?)
        .unwrap_or_else(|| PathBuf::from("results"));
    cfg.plot = args.plot || file.flag("plot")?;
    if args.sequential || file.flag("sequential")? {
        cfg.execution = Execution::Sequential;
    }
    cfg.validate().map_err(usage_err)?;
    Ok(cfg)
}

/// Runs the experiment and writes its outputs. Returns the written paths.
pub fn execute(cfg: &ExperimentConfig) -> crate::Result<Vec<PathBuf>> {
    let aggs = run_experiment(cfg)?;
    let mut written = write_csv(&aggs, &cfg.out_dir)?;
    if cfg.plot {
        let objective = cfg.objective().expect("validated experiment has configs");
        let path = cfg.out_dir.join(format!("{objective}_convergence.svg"));
        write_convergence_plot(&aggs, &path)?;
        written.push(path);
    }
    for agg in &aggs {
        println!(
            "{:<32} final mean best-so-far {:.6}",
            agg.label(),
            agg.final_best_so_far_mean()
        );
    }
    Ok(written)
}

/// Entry point shared by the binary: exit 0 on success, 2 on usage errors,
/// 1 on runtime errors.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_cli(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                print!("{e}");
            } else {
                eprint!("{e}");
            }
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cfg) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<ExperimentConfig, CliError> {
        parse_cli(std::iter::once("tsallis-ea").chain(args.split_whitespace()))
    }

    #[test]
    fn tsallis_on_ackley() {
        let cfg = parse("--function ackley --selection tsallis --q0 1.5").unwrap();
        assert_eq!(cfg.configs.len(), 1);
        let e = &cfg.configs[0].engine;
        assert_eq!(e.objective, Objective::Ackley);
        assert_eq!(e.space.bounds(), (-30.0, 30.0));
        assert_eq!(e.scheme, Scheme::Tsallis);
        assert_eq!(e.schedule.q0, 1.5);
        assert_eq!(e.pop_size, 350);
        assert_eq!(e.generations(), 100);
        assert_eq!(cfg.runs, 20);
        assert_eq!(cfg.master_seed, DEFAULT_SEED);
        assert!(e.energy_shift);
    }

    #[test]
    fn empty_args_print_usage_with_status_2() {
        let err = parse("").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--function"));
        assert!(err.to_string().contains("[default: 350]"));
    }

    #[test]
    fn usage_errors() {
        for bad in [
            "--function ackley --selection boltzmann --q0 2",
            "--function ackley --selection tsallis",
            "--function ackley --selection tsallis --q0 abc",
            "--function ackley --selection tsallis --q0 1.5 --beta0 x",
            "--function ackley --selection tsallis --q0 1.5 --bogus",
            "--function sphere --selection boltzmann",
            "--selection boltzmann",
            "--function ackley",
            "--function ackley --selection boltzmann --compare tsallis",
            "--function ackley --compare boltzmann,boltzmann",
            "--function ackley --selection boltzmann --constant-q",
            "--function ackley --selection boltzmann --runs 0",
            "--function ackley --selection boltzmann --pop-size 1",
            "--function ackley --selection boltzmann --alpha 1",
            "--function ackley --selection boltzmann --pbit 2",
        ] {
            let err = parse(bad).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(parse("--help").unwrap_err().exit_code(), 0);
    }

    #[test]
    fn compare_expands_q0_list() {
        let cfg = parse("--function rastrigin --compare tsallis,boltzmann,proportionate --q0 2,3 --runs 3 --seed 9 --no-energy-shift --plot")
            .unwrap();
        let labels: Vec<String> = cfg.configs.iter().map(|c| c.label()).collect();
        assert_eq!(
            labels,
            [
                "tsallis (q0 = 2)",
                "tsallis (q0 = 3)",
                "boltzmann",
                "proportionate"
            ]
        );
        assert!(cfg.configs.iter().all(|c| !c.engine.energy_shift));
        assert_eq!((cfg.runs, cfg.master_seed, cfg.plot), (3, 9, true));
    }

    #[test]
    fn config_file_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        fs::write(
            &path,
            "# experiment\nfunction = griewangk\nselection = tsallis\nq0 = 1.01\nruns = 4\npop-size = 60\nconstant-q = true\n",
        )
        .unwrap();
        let cfg = parse(&format!("--config {} --runs 2", path.display())).unwrap();
        assert_eq!(cfg.runs, 2);
        let e = &cfg.configs[0].engine;
        assert_eq!(e.objective, Objective::Griewangk);
        assert_eq!(e.pop_size, 60);
        assert_eq!(e.schedule.q0, 1.01);
        assert!(e.schedule.constant_q);

        let cfg = parse(&format!(
            "--config {} --selection boltzmann --q0 1.01",
            path.display()
        ));
        assert!(
            cfg.is_err(),
            "q0 from either source conflicts with boltzmann"
        );
    }

    #[test]
    fn config_file_errors() {
        assert!(parse_config_file("function ackley").is_err());
        assert!(parse_config_file("colour = red").is_err());
        let m = parse_config_file("pop_size = 10 # trailing\n\n").unwrap();
        assert_eq!(m["pop-size"], "10");
        assert_eq!(
            parse("--config /nonexistent/file --function ackley")
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
