//! Monte-Carlo validation of the PAC guarantees: the compression-scheme
//! learning rule, exact error on finite spaces, and seeded experiments
//! comparing empirical failure rates against the tail bounds.
//!
//! Randomness comes from SplitMix64 — state advances by the golden-ratio
//! increment 0x9E3779B97F4A7C15 and each output is finalized with the
//! xor-shift/multiply mix below. Trial t of an experiment with seed s
//! uses a fresh generator seeded with mix64(s XOR (t+1)*0x9E3779B97F4A7C15),
//! so trials are independent of scheduling and the whole report is
//! reproducible from the seed alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bits;
use crate::bounds::{tail_bound, TailSizes};
use crate::compress::{CompressionScheme, SchemeKey, SchemeKind};
use crate::corespace::{ConceptSpace, LabelledSample};
use crate::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64: tiny, fast, and exactly specified so alternate
/// implementations can reproduce the streams.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Seed for trial `trial` of an experiment: deterministic, distinct per
/// trial, and independent of execution order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix64(seed ^ trial.wrapping_add(1).wrapping_mul(GOLDEN))
}

/// A probability distribution over the domain points.
#[derive(Clone, Debug)]
pub struct Distribution {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParam("distribution has no weights".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParam(
                "distribution weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParam(format!(
                "distribution weights sum to {total}, expected 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Distribution {
            weights,
            cumulative,
        })
    }

    pub fn uniform(n: usize) -> Self {
        let w = 1.0 / n as f64;
        Distribution::new(vec![w; n]).expect("uniform weights are valid")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> usize {
        let u = rng.next_f64();
        self.cumulative.partition_point(|&c| c <= u).min(self.len() - 1)
    }
}

/// Probability mass of the symmetric difference between hypothesis and
/// target.
pub fn true_error(dist: &Distribution, hypothesis: u64, target: u64) -> f64 {
    let mut diff = hypothesis ^ target;
    let mut err = 0.0;
    while diff != 0 {
        let i = diff.trailing_zeros() as usize;
        err += dist.weights[i];
        diff &= diff - 1;
    }
    err
}

/// The learning rule induced by a scheme: scan key shapes inside the
/// sample support by (size, point set, copy) and return the first
/// hypothesis that agrees with the sample everywhere; missing keys act
/// as the all-zero hypothesis. Unrealizable samples fall through to the
/// all-zero hypothesis.
fn learn_mask(scheme: &CompressionScheme, support: u64, labels: u64) -> u64 {
    for sigma in crate::bits::subsets_within(support, scheme.size()) {
        let ncopies = scheme.copies()[sigma.count_ones() as usize];
        for copy in 1..=ncopies {
            let key = match scheme.kind() {
                SchemeKind::Unlabelled => SchemeKey::unlabelled(sigma, copy),
                SchemeKind::Labelled => SchemeKey::labelled(sigma, labels & sigma, copy),
            };
            let hyp = scheme.hypothesis(&key);
            if hyp & support == labels {
                return hyp;
            }
        }
    }
    0
}

/// Public wrapper over `learn_mask` taking a named sample.
pub fn learn(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    sample: &LabelledSample,
) -> Result<Bits> {
    if scheme.domain_len() != space.point_count() {
        return Err(Error::DomainMismatch(format!(
            "scheme is over {} points, space has {}",
            scheme.domain_len(),
            space.point_count()
        )));
    }
    let resolved = sample.resolve(space)?;
    let hyp = learn_mask(scheme, resolved.support, resolved.labels);
    Ok(Bits::from_mask(hyp, space.point_count()))
}

/// Outcome of a Monte-Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub failures: u64,
    pub empirical_rate: f64,
    pub theoretical_bound: f64,
    pub seed: u64,
    pub m: u64,
    pub epsilon: f64,
}

fn scheme_tail_sizes(scheme: &CompressionScheme) -> TailSizes {
    TailSizes::Copies(scheme.copies().to_vec())
}

fn validate_experiment(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    target: usize,
    dist: &Distribution,
    trials: u64,
) -> Result<u64> {
    if scheme.domain_len() != space.point_count() {
        return Err(Error::DomainMismatch(format!(
            "scheme is over {} points, space has {}",
            scheme.domain_len(),
            space.point_count()
        )));
    }
    if dist.len() != space.point_count() {
        return Err(Error::DomainMismatch(format!(
            "distribution has {} weights, space has {} points",
            dist.len(),
            space.point_count()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParam("need at least one trial".into()));
    }
    let masks = space.concept_masks()?;
    masks
        .get(target)
        .copied()
        .ok_or_else(|| Error::OutOfRange(format!("target concept index {target}")))
}

fn draw_support(dist: &Distribution, m: u64, rng: &mut SplitMix64) -> u64 {
    let mut support = 0u64;
    for _ in 0..m {
        support |= 1u64 << dist.sample(rng);
    }
    support
}

/// Draws i.i.d. samples of size m labelled by the target, learns, and
/// counts trials whose hypothesis errs more than epsilon. The bound
/// reported alongside is the tail sum at the scheme's copy profile.
#[allow(clippy::too_many_arguments)]
pub fn pac_experiment(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    target: usize,
    dist: &Distribution,
    m: u64,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    let target_mask = validate_experiment(space, scheme, target, dist, trials)?;
    let theoretical_bound = tail_bound(m, &scheme_tail_sizes(scheme), epsilon)?;
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = SplitMix64::new(trial_seed(seed, t));
            let support = draw_support(dist, m, &mut rng);
            let hyp = learn_mask(scheme, support, target_mask & support);
            true_error(dist, hyp, target_mask) > epsilon
        })
        .count() as u64;
    Ok(TrialReport {
        trials,
        failures,
        empirical_rate: failures as f64 / trials as f64,
        theoretical_bound,
        seed,
        m,
        epsilon,
    })
}

/// Counts how often a drawn sample admits any key whose hypothesis both
/// errs more than epsilon and agrees with the target on every sampled
/// point — the event the tail sum bounds from above.
#[allow(clippy::too_many_arguments)]
pub fn event321_experiment(
    space: &ConceptSpace,
    scheme: &CompressionScheme,
    target: usize,
    dist: &Distribution,
    m: u64,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    let target_mask = validate_experiment(space, scheme, target, dist, trials)?;
    if (m as usize) < scheme.size() {
        return Err(Error::InvalidParam(format!(
            "sample size {m} is below the scheme size {}",
            scheme.size()
        )));
    }
    let theoretical_bound = tail_bound(m, &scheme_tail_sizes(scheme), epsilon)?;
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = SplitMix64::new(trial_seed(seed, t));
            let support = draw_support(dist, m, &mut rng);
            let labels = target_mask & support;
            crate::bits::subsets_within(support, scheme.size())
                .into_iter()
                .any(|sigma| {
                    let ncopies = scheme.copies()[sigma.count_ones() as usize];
                    (1..=ncopies).any(|copy| {
                        let key = match scheme.kind() {
                            SchemeKind::Unlabelled => SchemeKey::unlabelled(sigma, copy),
                            SchemeKind::Labelled => {
                                SchemeKey::labelled(sigma, labels & sigma, copy)
                            }
                        };
                        let hyp = scheme.hypothesis(&key);
                        hyp & support == labels && true_error(dist, hyp, target_mask) > epsilon
                    })
                })
        })
        .count() as u64;
    Ok(TrialReport {
        trials,
        failures,
        empirical_rate: failures as f64 / trials as f64,
        theoretical_bound,
        seed,
        m,
        epsilon,
    })
}
