//! The generational loop: evaluate, select, vary, advance schedules.
//!
//! # Random streams
//!
//! A run is driven by a single `u64` seed. Every random draw comes from a
//! ChaCha8 generator seeded with that value and switched to a stream id
//! `(purpose << 32) | generation`, where purpose is 0 for initialization,
//! 1 for selection and 2 for variation. Two runs that compute the same
//! selection weights therefore consume identical draws, whatever scheme
//! produced those weights.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genome::{decode_genome, random_genome, Genome, SearchSpace};
use crate::objectives::{evaluate_population, Objective};
use crate::parallel::Execution;
use crate::schedules::{cauchy_beta, ScheduleConfig};
use crate::selection::{
    boltzmann_weights, proportionate_weights, sample_population, tsallis_weights_with_shift,
    SelectionWeights,
};
use crate::variation::{vary_population, VariationConfig};

const STREAM_INIT: u64 = 0;
const STREAM_SELECTION: u64 = 1;
const STREAM_VARIATION: u64 = 2;

/// Generator for one `(purpose, generation)` pair of a run.
pub fn stream_rng(seed: u64, purpose: u64, generation: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 32) | generation as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Proportionate,
    Boltzmann,
    Tsallis,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Tsallis, Scheme::Boltzmann, Scheme::Proportionate];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proportionate => "proportionate",
            Scheme::Boltzmann => "boltzmann",
            Scheme::Tsallis => "tsallis",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                Error::usage(format!(
                    "unknown selection {s:?} (expected proportionate, boltzmann or tsallis)"
                ))
            })
    }
}

/// Everything that determines a single run.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub objective: Objective,
    pub space: SearchSpace,
    pub pop_size: usize,
    pub scheme: Scheme,
    /// β and q schedules; `schedule.horizon` is the number of generations.
    pub schedule: ScheduleConfig,
    pub variation: VariationConfig,
    /// Subtract the population minimum energy before Tsallis weighting.
    pub energy_shift: bool,
    pub seed: u64,
    /// Scheduling of population evaluation; never affects results.
    pub execution: Execution,
}

impl EngineConfig {
    /// Default experiment setup: 15 variables at 5 bits, n = 350, T = 100,
    /// β₀ = 200, α = 1.01, crossover 0.8, bit mutation 0.02.
    pub fn new(objective: Objective, scheme: Scheme) -> Self {
        Self {
            objective,
            space: objective
                .search_space(15, 5)
                .expect("built-in bounds are valid"),
            pop_size: 350,
            scheme,
            schedule: ScheduleConfig::default(),
            variation: VariationConfig::default(),
            energy_shift: true,
            seed: 0,
            execution: Execution::default(),
        }
    }

    pub fn generations(&self) -> usize {
        self.schedule.horizon
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::usage(format!(
                "population size must be at least 2, got {}",
                self.pop_size
            )));
        }
        if self.space.bounds() != self.objective.bounds() {
            return Err(Error::usage(format!(
                "search bounds {:?} do not match {} bounds {:?}",
                self.space.bounds(),
                self.objective,
                self.objective.bounds()
            )));
        }
        self.schedule.validate()?;
        self.variation.validate()
    }

    /// q used for selection at generation index `t` (always 1 outside Tsallis).
    pub fn q_at(&self, t: usize) -> Result<f64> {
        match self.scheme {
            Scheme::Tsallis => self.schedule.q_at(t),
            _ => Ok(1.0),
        }
    }

    fn weights(&self, energies: &[f64], beta: f64, q: f64) -> Result<SelectionWeights> {
        match self.scheme {
            Scheme::Proportionate => proportionate_weights(energies),
            Scheme::Boltzmann => boltzmann_weights(energies, beta),
            Scheme::Tsallis => tsallis_weights_with_shift(energies, beta, q, self.energy_shift),
        }
    }
}

/// Statistics for one generation of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    /// 1-based generation number.
    pub generation: usize,
    pub beta: f64,
    pub q: f64,
    pub best_energy: f64,
    pub mean_energy: f64,
    pub best_so_far: f64,
    /// `S_q` of the selection distribution at this generation's q.
    pub selection_entropy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub records: Vec<GenerationRecord>,
    pub best_genome: Genome,
    pub best_point: Vec<f64>,
}

impl RunTrace {
    pub fn best_so_far(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.best_so_far)
    }
}

/// Mutable state of a run between generations.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineState {
    /// Number of completed generations.
    pub t: usize,
    pub population: Vec<Genome>,
    /// β for the next selection (`β_{t+1}`).
    pub beta: f64,
    /// q for the next selection (`q_t`).
    pub q: f64,
    pub best_so_far: f64,
    pub best_genome: Option<Genome>,
    seed: u64,
}

impl EngineState {
    pub fn init(cfg: &EngineConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream_rng(cfg.seed, STREAM_INIT, 0);
        let population = (0..cfg.pop_size)
            .map(|_| random_genome(&mut rng, &cfg.space))
            .collect();
        Ok(Self {
            t: 0,
            population,
            beta: cauchy_beta(1, &cfg.schedule)?,
            q: cfg.q_at(0)?,
            best_so_far: f64::INFINITY,
            best_genome: None,
            seed: cfg.seed,
        })
    }

    pub fn is_done(&self, cfg: &EngineConfig) -> bool {
        self.t >= cfg.generations()
    }

    /// Runs one generation. On error the state is left untouched.
    pub fn step(&mut self, cfg: &EngineConfig) -> Result<GenerationRecord> {
        self.try_step(cfg).map_err(|e| Error::Generation {
            generation: self.t + 1,
            source: Box::new(e),
        })
    }

    fn try_step(&mut self, cfg: &EngineConfig) -> Result<GenerationRecord> {
        if self.is_done(cfg) {
            return Err(Error::usage(format!(
                "run already completed {} generations",
                self.t
            )));
        }
        let energies =
            evaluate_population(&self.population, cfg.objective, &cfg.space, cfg.execution)?;
        let (best_idx, best_energy) =
            energies
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (k, e)| if e < acc.1 { (k, e) } else { acc },
                );
        let mean_energy = energies.iter().sum::<f64>() / energies.len() as f64;

        let weights = cfg.weights(&energies, self.beta, self.q)?;
        let selection_entropy = weights.entropy(self.q)?;

        let mut rng = stream_rng(self.seed, STREAM_SELECTION, self.t);
        let selected = sample_population(&self.population, &weights, cfg.pop_size, &mut rng)?;
        let mut rng = stream_rng(self.seed, STREAM_VARIATION, self.t);
        let next = vary_population(selected, &cfg.variation, &mut rng)?;

        let t_next = self.t + 1;
        let beta_next = cauchy_beta(t_next + 1, &cfg.schedule)?;
        let q_next = if t_next < cfg.generations() {
            cfg.q_at(t_next)?
        } else {
            self.q
        };

        let record = GenerationRecord {
            generation: t_next,
            beta: self.beta,
            q: self.q,
            best_energy,
            mean_energy,
            best_so_far: self.best_so_far.min(best_energy),
            selection_entropy,
        };
        if best_energy < self.best_so_far {
            self.best_so_far = best_energy;
            self.best_genome = Some(self.population[best_idx].clone());
        }
        self.population = next;
        self.beta = beta_next;
        self.q = q_next;
        self.t = t_next;
        Ok(record)
    }
}

/// Runs `init` followed by `T` generations.
pub fn run(cfg: &EngineConfig) -> Result<RunTrace> {
    let mut state = EngineState::init(cfg)?;
    let mut records = Vec::with_capacity(cfg.generations());
    while !state.is_done(cfg) {
        records.push(state.step(cfg)?);
    }
    let best_genome = state
        .best_genome
        .expect("at least one generation was evaluated");
    let best_point = decode_genome(&best_genome, &cfg.space)?;
    Ok(RunTrace {
        records,
        best_genome,
        best_point,
    })
}
