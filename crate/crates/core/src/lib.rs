//! Generalized evolutionary algorithm with Tsallis selection.
//!
//! A binary-genome genetic algorithm whose selection step weighs individuals
//! by the Tsallis generalized canonical distribution, alongside Boltzmann and
//! proportionate selection baselines. The [`harness`] module runs seeded
//! replicate experiments and writes CSV tables and SVG convergence plots.

pub mod engine;
pub mod error;
pub mod genome;
pub mod harness;
pub mod objectives;
pub mod parallel;
pub mod schedules;
pub mod selection;
pub mod variation;

pub use engine::{run, EngineConfig, EngineState, GenerationRecord, RunTrace, Scheme};
pub use error::{Error, Result};
pub use genome::{decode_genome, decode_variable, random_genome, Genome, SearchSpace};
pub use objectives::{ackley, evaluate_population, griewangk, rastrigin, Objective};
pub use parallel::Execution;
pub use schedules::{cauchy_beta, linear_q, ScheduleConfig};
pub use selection::{
    boltzmann_weights, proportionate_weights, sample_population, tsallis_entropy, tsallis_weights,
    tsallis_weights_with_shift, SelectionWeights, WeightScheme,
};
pub use variation::{mutate, uniform_crossover, vary_population, VariationConfig};
