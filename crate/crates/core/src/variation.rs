//! Uniform crossover and per-bit mutation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationConfig {
    /// Probability that a mating pair undergoes uniform crossover.
    pub p_crossover: f64,
    /// Independent flip probability of each bit.
    pub p_bit_mutation: f64,
}

impl Default for VariationConfig {
    fn default() -> Self {
        Self {
            p_crossover: 0.8,
            p_bit_mutation: 0.02,
        }
    }
}

impl VariationConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("crossover probability", self.p_crossover)?;
        check_probability("bit mutation probability", self.p_bit_mutation)
    }
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::usage(format!("{what} must lie in [0, 1], got {p}")))
    }
}

/// Crossover with an explicit mask: where `mask` is set the children swap bits.
pub fn crossover_with_mask(a: &Genome, b: &Genome, mask: &[bool]) -> Result<(Genome, Genome)> {
    if a.len() != b.len() || a.len() != mask.len() {
        return Err(Error::usage(format!(
            "crossover length mismatch: {} / {} / mask {}",
            a.len(),
            b.len(),
            mask.len()
        )));
    }
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    for ((x, y), &m) in c1.bits_mut().iter_mut().zip(c2.bits_mut()).zip(mask) {
        if m {
            std::mem::swap(x, y);
        }
    }
    Ok((c1, c2))
}

/// Uniform crossover with a fair random mask, one draw per locus.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rng: &mut R,
) -> Result<(Genome, Genome)> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "crossover length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mask: Vec<bool> = (0..a.len()).map(|_| rng.random::<bool>()).collect();
    crossover_with_mask(a, b, &mask)
}

/// Flips each bit independently with probability `p_bit`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, p_bit: f64, rng: &mut R) -> Result<Genome> {
    let mut out = genome.clone();
    mutate_in_place(&mut out, p_bit, rng)?;
    Ok(out)
}

fn mutate_in_place<R: Rng + ?Sized>(genome: &mut Genome, p_bit: f64, rng: &mut R) -> Result<()> {
    check_probability("bit mutation probability", p_bit)?;
    for bit in genome.bits_mut() {
        if rng.random_bool(p_bit) {
            *bit = !*bit;
        }
    }
    Ok(())
}

/// Shuffle, pair neighbours, cross each pair with probability `p_crossover`,
/// then mutate every individual. An odd last individual skips crossover.
pub fn vary_population<R: Rng + ?Sized>(
    population: Vec<Genome>,
    cfg: &VariationConfig,
    rng: &mut R,
) -> Result<Vec<Genome>> {
    cfg.validate()?;
    let mut pop = population;
    pop.shuffle(rng);
    for pair in pop.chunks_exact_mut(2) {
        if rng.random_bool(cfg.p_crossover) {
            let (c1, c2) = uniform_crossover(&pair[0], &pair[1], rng)?;
            pair[0] = c1;
            pair[1] = c2;
        }
    }
    for g in &mut pop {
        mutate_in_place(g, cfg.p_bit_mutation, rng)?;
    }
    Ok(pop)
}
