//! Selection probabilities and roulette-wheel sampling.
//!
//! Three schemes are provided: proportionate (inverse energy), Boltzmann
//! (`exp(-βE)`) and Tsallis (`[1 - (1-q)βE]^(1/(1-q))`). Every weight vector
//! is normalized so that its entries sum to one.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;

/// `|q - 1|` below this routes Tsallis weights to the exponential branch.
pub const Q_ONE_TOLERANCE: f64 = 1e-9;

/// Regularizer keeping inverse-energy weights finite at `E = 0`.
pub const PROPORTIONATE_EPSILON: f64 = 1e-12;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Which scheme produced a weight vector, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    Proportionate,
    Boltzmann { beta: f64 },
    Tsallis { beta: f64, q: f64 },
}

/// A normalized probability vector over a population.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionWeights {
    probs: Vec<f64>,
    scheme: WeightScheme,
}

impl SelectionWeights {
    fn normalize(weights: Vec<f64>, energies: &[f64], scheme: WeightScheme) -> Self {
        let total: f64 = weights.iter().sum();
        let probs = if total > 0.0 && total.is_finite() {
            weights.into_iter().map(|w| w / total).collect()
        } else {
            point_mass_on_minimum(energies)
        };
        Self { probs, scheme }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Tsallis entropy `S_q` of this distribution.
    pub fn entropy(&self, q: f64) -> Result<f64> {
        tsallis_entropy(&self.probs, q)
    }
}

/// Uniform split over the minimum-energy individuals.
fn point_mass_on_minimum(energies: &[f64]) -> Vec<f64> {
    let min = min_energy(energies);
    let ties = energies.iter().filter(|&&e| e == min).count() as f64;
    energies
        .iter()
        .map(|&e| if e == min { 1.0 / ties } else { 0.0 })
        .collect()
}

fn min_energy(energies: &[f64]) -> f64 {
    energies.iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_energies(energies: &[f64]) -> Result<()> {
    if energies.is_empty() {
        return Err(Error::usage("selection needs at least one energy"));
    }
    if let Some((k, e)) = energies.iter().enumerate().find(|(_, e)| !e.is_finite()) {
        return Err(Error::usage(format!("energy {k} is not finite ({e})")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )))
    }
}

fn boltzmann_factors(energies: &[f64], beta: f64) -> Vec<f64> {
    let min = min_energy(energies);
    energies
        .iter()
        .map(|&e| (-beta * (e - min)).exp())
        .collect()
}

/// Boltzmann selection probabilities `exp(-βE_k) / Σ_j exp(-βE_j)`.
///
/// Energies are shifted by their minimum first; the common factor cancels.
pub fn boltzmann_weights(energies: &[f64], beta: f64) -> Result<SelectionWeights> {
    check_energies(energies)?;
    check_beta(beta)?;
    let w = boltzmann_factors(energies, beta);
    Ok(SelectionWeights::normalize(
        w,
        energies,
        WeightScheme::Boltzmann { beta },
    ))
}

/// Tsallis selection probabilities with the population-minimum energy shift.
pub fn tsallis_weights(energies: &[f64], beta: f64, q: f64) -> Result<SelectionWeights> {
    tsallis_weights_with_shift(energies, beta, q, true)
}

/// Tsallis selection probabilities, optionally without the energy shift.
///
/// Weights are `[1 - (1-q)βE_k]^(1/(1-q))` on positive brackets and zero
/// otherwise. For `|q - 1| < 1e-9` the exponential limit is used instead (that
/// branch is shift-invariant, so `shift` has no effect there). If every weight
/// vanishes the mass goes to the minimum-energy individuals.
pub fn tsallis_weights_with_shift(
    energies: &[f64],
    beta: f64,
    q: f64,
    shift: bool,
) -> Result<SelectionWeights> {
    check_energies(energies)?;
    check_beta(beta)?;
    if !q.is_finite() {
        return Err(Error::usage(format!(
            "non-extensive index must be finite, got {q}"
        )));
    }
    let scheme = WeightScheme::Tsallis { beta, q };
    if (q - 1.0).abs() < Q_ONE_TOLERANCE {
        let w = boltzmann_factors(energies, beta);
        return Ok(SelectionWeights::normalize(w, energies, scheme));
    }
    let offset = if shift { min_energy(energies) } else { 0.0 };
    let one_minus_q = 1.0 - q;
    let w = energies
        .iter()
        .map(|&e| {
            let x = -one_minus_q * beta * (e - offset);
            // bracket = 1 + x
            if x > -1.0 {
                (x.ln_1p() / one_minus_q).exp()
            } else {
                0.0
            }
        })
        .collect();
    Ok(SelectionWeights::normalize(w, energies, scheme))
}

/// Proportionate selection: weights `1 / (E_k + ε)`.
pub fn proportionate_weights(energies: &[f64]) -> Result<SelectionWeights> {
    check_energies(energies)?;
    if let Some((k, e)) = energies.iter().enumerate().find(|(_, &e)| e < 0.0) {
        return Err(Error::usage(format!(
            "proportionate selection needs nonnegative energies, energy {k} is {e}"
        )));
    }
    let w = energies
        .iter()
        .map(|&e| 1.0 / (e + PROPORTIONATE_EPSILON))
        .collect();
    Ok(SelectionWeights::normalize(
        w,
        energies,
        WeightScheme::Proportionate,
    ))
}

/// Draws `n` indices i.i.d. from the categorical distribution `weights`.
pub fn sample_indices<R: Rng + ?Sized>(
    weights: &SelectionWeights,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(weights.probs())
        .map_err(|e| Error::usage(format!("invalid selection weights: {e}")))?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

/// Roulette-wheel selection with replacement: `n` independent draws from
/// `population` according to `weights`.
pub fn sample_population<R: Rng + ?Sized>(
    population: &[Genome],
    weights: &SelectionWeights,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Genome>> {
    if population.len() != weights.len() {
        return Err(Error::usage(format!(
            "population has {} individuals but weights cover {}",
            population.len(),
            weights.len()
        )));
    }
    if n == 0 {
        return Err(Error::usage("must select at least one individual"));
    }
    Ok(sample_indices(weights, n, rng)?
        .into_iter()
        .map(|k| population[k].clone())
        .collect())
}

/// Tsallis entropy `(1 - Σ p_k^q) / (q - 1)`, or Shannon entropy near `q = 1`.
///
/// Zero-probability entries are outside the support and contribute nothing.
pub fn tsallis_entropy(probs: &[f64], q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::usage(format!(
            "non-extensive index must be finite, got {q}"
        )));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::usage("probabilities must be finite and nonnegative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::usage(format!("probabilities sum to {total}, not 1")));
    }
    let support = probs.iter().copied().filter(|&p| p > 0.0);
    if (q - 1.0).abs() < Q_ONE_TOLERANCE {
        return Ok(-support.map(|p| p * p.ln()).sum::<f64>());
    }
    let s: f64 = support.map(|p| p.powf(q)).sum();
    Ok((1.0 - s) / (q - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_probs(w: &SelectionWeights, expected: &[f64], tol: f64) {
        assert_eq!(w.len(), expected.len());
        for (a, b) in w.probs().iter().zip(expected) {
            assert!((a - b).abs() <= tol, "{:?} vs {:?}", w.probs(), expected);
        }
    }

    #[test]
    fn boltzmann_examples() {
        assert_probs(
            &boltzmann_weights(&[0.0, 1.0], 0.0).unwrap(),
            &[0.5, 0.5],
            1e-15,
        );
        assert_probs(
            &boltzmann_weights(&[0.0, 1.0], 2f64.ln()).unwrap(),
            &[2.0 / 3.0, 1.0 / 3.0],
            1e-12,
        );
        assert_probs(&boltzmann_weights(&[5.0], 17.0).unwrap(), &[1.0], 0.0);
    }

    #[test]
    fn tsallis_examples() {
        assert_probs(
            &tsallis_weights(&[0.0, 1.0], 1.0, 2.0).unwrap(),
            &[2.0 / 3.0, 1.0 / 3.0],
            1e-12,
        );
        assert_probs(
            &tsallis_weights(&[0.0, 3.0], 1.0, 0.5).unwrap(),
            &[1.0, 0.0],
            0.0,
        );
        let e = std::f64::consts::E;
        let w = tsallis_weights(&[0.0, 1.0], 1.0, 1.0).unwrap();
        assert_probs(&w, &[e / (e + 1.0), 1.0 / (e + 1.0)], 1e-12);
        assert_eq!(
            w.probs(),
            boltzmann_weights(&[0.0, 1.0], 1.0).unwrap().probs()
        );
    }

    #[test]
    fn tsallis_without_shift_cutoff_falls_back_to_minimum() {
        // brackets 1 - 0.5·10·E are negative for every E here
        let w = tsallis_weights_with_shift(&[4.0, 3.0, 3.0, 5.0], 10.0, 0.5, false).unwrap();
        assert_probs(&w, &[0.0, 0.5, 0.5, 0.0], 0.0);
    }

    #[test]
    fn tsallis_shift_changes_power_branch() {
        let shifted = tsallis_weights(&[10.0, 11.0], 1.0, 2.0).unwrap();
        let raw = tsallis_weights_with_shift(&[10.0, 11.0], 1.0, 2.0, false).unwrap();
        assert_probs(&shifted, &[2.0 / 3.0, 1.0 / 3.0], 1e-12);
        // 1/11 : 1/12
        assert_probs(&raw, &[12.0 / 23.0, 11.0 / 23.0], 1e-12);
    }

    #[test]
    fn proportionate_examples() {
        assert_probs(
            &proportionate_weights(&[1.0, 1.0]).unwrap(),
            &[0.5, 0.5],
            1e-15,
        );
        assert_probs(
            &proportionate_weights(&[1.0, 3.0]).unwrap(),
            &[0.75, 0.25],
            1e-12,
        );
        assert!(proportionate_weights(&[0.0, 1.0]).unwrap().probs()[0] >= 1.0 - 2e-12);
        assert!(proportionate_weights(&[1.0, -0.5]).is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(boltzmann_weights(&[], 1.0).is_err());
        assert!(boltzmann_weights(&[1.0, f64::NAN], 1.0).is_err());
        assert!(boltzmann_weights(&[1.0], -1.0).is_err());
        assert!(tsallis_weights(&[], 1.0, 2.0).is_err());
        assert!(tsallis_weights(&[1.0], 1.0, f64::INFINITY).is_err());
        assert!(tsallis_weights(&[f64::INFINITY], 1.0, 2.0).is_err());
        assert!(proportionate_weights(&[]).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(tsallis_entropy(&[1.0, 0.0], 2.0).unwrap(), 0.0);
        assert_eq!(tsallis_entropy(&[1.0, 0.0], 0.3).unwrap(), 0.0);
        assert_eq!(tsallis_entropy(&[1.0, 0.0], 1.0).unwrap(), 0.0);
        assert!((tsallis_entropy(&[0.5, 0.5], 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((tsallis_entropy(&[0.5, 0.5], 1.0).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(tsallis_entropy(&[0.5, 0.6], 2.0).is_err());
        assert!(tsallis_entropy(&[1.5, -0.5], 2.0).is_err());
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let pop: Vec<Genome> = (0..4)
            .map(|k| Genome::from_bits(vec![k % 2 == 0, k > 1]))
            .collect();
        let w = tsallis_weights(&[0.0, 3.0, 4.0, 5.0], 1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sel = sample_population(&pop, &w, 50, &mut rng).unwrap();
        assert!(sel.iter().all(|g| *g == pop[0]));

        let u = boltzmann_weights(&[1.0; 4], 1.0).unwrap();
        let a = sample_population(&pop, &u, 100, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_population(&pop, &u, 100, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_rejects_mismatch() {
        let pop = vec![Genome::zeros(2); 3];
        let w = boltzmann_weights(&[1.0, 2.0], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_population(&pop, &w, 3, &mut rng).is_err());
        let w3 = boltzmann_weights(&[1.0, 2.0, 3.0], 1.0).unwrap();
        assert!(sample_population(&pop, &w3, 0, &mut rng).is_err());
    }

    #[test]
    fn uniform_sampling_counts() {
        let w = boltzmann_weights(&[2.0; 4], 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 4];
        for k in sample_indices(&w, 40_000, &mut rng).unwrap() {
            counts[k] += 1;
        }
        for c in counts {
            assert!((c as i64 - 10_000).abs() <= 300, "{counts:?}");
        }
    }

    // Tsallis tails decay like (βΔE)^(-1/(q-1)), so the bound needs q near 1.
    #[test]
    fn low_temperature_dominance() {
        let e = [3.0, 1.0, 1.5, 2.0, 7.0];
        for w in [
            boltzmann_weights(&e, 1e6).unwrap(),
            tsallis_weights(&e, 1e6, 1.5).unwrap(),
            tsallis_weights(&e, 1e6, 1.2).unwrap(),
        ] {
            assert!(w.probs()[1] >= 1.0 - 1e-6, "{:?}", w.probs());
        }
    }

    fn energies() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..100.0, 1..40)
    }

    proptest! {
        #[test]
        fn all_schemes_normalize(e in energies(), beta in 0.0f64..300.0, q in -1.0f64..4.0) {
            for w in [
                boltzmann_weights(&e, beta).unwrap(),
                tsallis_weights(&e, beta, q).unwrap(),
                tsallis_weights_with_shift(&e, beta, q, false).unwrap(),
                proportionate_weights(&e).unwrap(),
            ] {
                prop_assert!(w.probs().iter().all(|&p| p >= 0.0));
                prop_assert!((w.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn lower_energy_never_less_likely(e in energies(), beta in 0.0f64..10.0, q in 0.0f64..4.0) {
            for w in [
                boltzmann_weights(&e, beta).unwrap(),
                tsallis_weights(&e, beta, q).unwrap(),
                proportionate_weights(&e).unwrap(),
            ] {
                for j in 0..e.len() {
                    for k in 0..e.len() {
                        if e[j] < e[k] {
                            prop_assert!(w.probs()[j] >= w.probs()[k]);
                        }
                    }
                }
            }
        }

        #[test]
        fn boltzmann_is_shift_invariant(e in energies(), beta in 0.0f64..5.0, c in -50.0f64..50.0) {
            let shifted: Vec<f64> = e.iter().map(|x| x + c).collect();
            let a = boltzmann_weights(&e, beta).unwrap();
            let b = boltzmann_weights(&shifted, beta).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn entropy_nonnegative_and_maximal_at_uniform(raw in proptest::collection::vec(0.01f64..1.0, 2..20), q in 0.1f64..4.0) {
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let n = p.len() as f64;
            let uniform = vec![1.0 / n; p.len()];
            let s = tsallis_entropy(&p, q).unwrap();
            prop_assert!(s >= -1e-12);
            prop_assert!(s <= tsallis_entropy(&uniform, q).unwrap() + 1e-12);
        }
    }
}
