//! Benchmark energy functions, each with a global minimum of 0 at the origin.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::genome::{decode_genome, Genome, SearchSpace};
use crate::parallel::{map_collect, Execution};

const RASTRIGIN_A: f64 = 10.0;

fn check_nonempty(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        Err(Error::usage("objective evaluated on an empty vector"))
    } else {
        Ok(())
    }
}

/// Ackley's function.
///
/// Evaluated as `(20 - 20 a) + (e - b)` where `a` and `b` are the two
/// exponentials; both brackets are nonnegative, so the result never dips
/// below zero through rounding.
pub fn ackley(x: &[f64]) -> Result<f64> {
    check_nonempty(x)?;
    let l = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / l;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / l;
    let a = (-0.2 * sq.sqrt()).exp();
    let b = cs.exp();
    Ok((20.0 - 20.0 * a) + (1f64.exp() - b))
}

/// Rastrigin's function with `A = 10`, summed as `Σ (x² + A(1 - cos 2πx))`.
pub fn rastrigin(x: &[f64]) -> Result<f64> {
    check_nonempty(x)?;
    Ok(x.iter()
        .map(|v| v * v + RASTRIGIN_A * (1.0 - (2.0 * PI * v).cos()))
        .sum())
}

/// Griewangk's function; the product index is 1-based.
pub fn griewangk(x: &[f64]) -> Result<f64> {
    check_nonempty(x)?;
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product::<f64>();
    Ok(sum + (1.0 - prod))
}

/// The registered benchmark objectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    Ackley,
    Rastrigin,
    Griewangk,
}

impl Objective {
    pub const ALL: [Objective; 3] = [
        Objective::Ackley,
        Objective::Rastrigin,
        Objective::Griewangk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Ackley => "ackley",
            Objective::Rastrigin => "rastrigin",
            Objective::Griewangk => "griewangk",
        }
    }

    /// Per-variable box for this function; not user-overridable.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Objective::Ackley => (-30.0, 30.0),
            Objective::Rastrigin => (-5.12, 5.12),
            Objective::Griewangk => (-600.0, 600.0),
        }
    }

    pub fn search_space(self, vars: usize, bits_per_var: u32) -> Result<SearchSpace> {
        let (lo, hi) = self.bounds();
        SearchSpace::new(vars, bits_per_var, lo, hi)
    }

    pub fn evaluate(self, x: &[f64]) -> Result<f64> {
        match self {
            Objective::Ackley => ackley(x),
            Objective::Rastrigin => rastrigin(x),
            Objective::Griewangk => griewangk(x),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| {
                Error::usage(format!(
                    "unknown function {s:?} (expected ackley, rastrigin or griewangk)"
                ))
            })
    }
}

/// Decodes and evaluates every genome, preserving population order.
pub fn evaluate_population(
    population: &[Genome],
    objective: Objective,
    space: &SearchSpace,
    exec: Execution,
) -> Result<Vec<f64>> {
    map_collect(population, exec, |g| {
        decode_genome(g, space).and_then(|x| objective.evaluate(&x))
    })
    .into_iter()
    .collect()
}
