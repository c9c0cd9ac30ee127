//! Fixed-length binary genomes and their decoding to bounded real vectors.
//!
//! Each variable occupies a contiguous field of `bits_per_var` bits read
//! big-endian; the integer word is mapped linearly onto `[lo, hi]` so that the
//! all-zero word decodes to `lo` and the all-one word to `hi`.

use rand::Rng;

use crate::error::{Error, Result};

/// Box-constrained search space `[lo, hi]^vars` sampled on a `2^bits_per_var` grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchSpace {
    vars: usize,
    bits_per_var: u32,
    lo: f64,
    hi: f64,
}

impl SearchSpace {
    pub fn new(vars: usize, bits_per_var: u32, lo: f64, hi: f64) -> Result<Self> {
        if vars == 0 {
            return Err(Error::usage("search space needs at least one variable"));
        }
        if bits_per_var == 0 || bits_per_var > 52 {
            return Err(Error::usage(format!(
                "bits per variable must be in 1..=52, got {bits_per_var}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::usage(format!("invalid bounds [{lo}, {hi}]")));
        }
        Ok(Self {
            vars,
            bits_per_var,
            lo,
            hi,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn bits_per_var(&self) -> u32 {
        self.bits_per_var
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Total genome length in bits.
    pub fn genome_len(&self) -> usize {
        self.vars * self.bits_per_var as usize
    }
}

/// A bitstring genotype. Length is fixed at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Genome {
    bits: Vec<bool>,
}

impl Genome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Builds a genome from `0`/`1` digits; any other value is rejected.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        digits
            .iter()
            .map(|&d| match d {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::usage(format!(
                    "genome digit must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            bits: vec![true; len],
        }
    }

    /// Concatenates `vars` copies of `word` written big-endian in `bits` bits.
    pub fn repeat_word(word: u64, bits: u32, vars: usize) -> Self {
        let field: Vec<bool> = (0..bits).rev().map(|k| (word >> k) & 1 == 1).collect();
        Self {
            bits: field
                .iter()
                .copied()
                .cycle()
                .take(field.len() * vars)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Genome) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Maps an unsigned `bits`-bit word linearly onto `[lo, hi]`.
pub fn decode_variable(word: u64, bits: u32, lo: f64, hi: f64) -> Result<f64> {
    if bits == 0 || bits > 52 {
        return Err(Error::usage(format!(
            "bit count must be in 1..=52, got {bits}"
        )));
    }
    let max = (1u64 << bits) - 1;
    if word > max {
        return Err(Error::usage(format!(
            "word {word} does not fit in {bits} bits"
        )));
    }
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::usage(format!("invalid bounds [{lo}, {hi}]")));
    }
    if word == max {
        return Ok(hi);
    }
    Ok(lo + (hi - lo) * (word as f64 / max as f64))
}

/// Decodes a genome into one real value per variable.
pub fn decode_genome(genome: &Genome, space: &SearchSpace) -> Result<Vec<f64>> {
    if genome.len() != space.genome_len() {
        return Err(Error::usage(format!(
            "genome has {} bits, search space expects {}",
            genome.len(),
            space.genome_len()
        )));
    }
    let width = space.bits_per_var as usize;
    genome
        .bits
        .chunks_exact(width)
        .map(|field| {
            let word = field.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            decode_variable(word, space.bits_per_var, space.lo, space.hi)
        })
        .collect()
}

/// Draws a uniformly random genome: one fair bit per locus, in locus order.
pub fn random_genome<R: Rng + ?Sized>(rng: &mut R, space: &SearchSpace) -> Genome {
    Genome {
        bits: (0..space.genome_len())
            .map(|_| rng.random::<bool>())
            .collect(),
    }
}
