//! Moser–Tardos resampling over independent random variables, plus the
//! symmetric and weighted Local Lemma conditions as numeric diagnostics.
//!
//! A [`VariableSpace`] describes independent variables that can be drawn one
//! at a time. A [`BadEvent`] is a predicate over the current assignment that
//! reads only the variables in its scope. [`resample_until_clear`] samples
//! everything once and then, while some event holds, redraws the scope of the
//! lowest-indexed violated event.

use std::collections::BTreeSet;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LllError {
    #[error("event {event}: weight must lie in [0, 1)")]
    WeightOutOfRange { event: usize },
    #[error("event {event}: dependency {dependency} does not exist")]
    UnknownDependency { event: usize, dependency: usize },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("event {event} reads variable {variable}, but the space has {len} variables")]
    ScopeOutOfRange { event: usize, variable: usize, len: usize },
    #[error("round budget must be at least 1")]
    ZeroRounds,
}

/// A family of independent random variables.
pub trait VariableSpace {
    type Value: Clone;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn draw<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Self::Value;
}

/// Independent Bernoulli trials with per-trial success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSpace {
    probs: Vec<f64>,
}

impl BernoulliSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self, LllError> {
        if let Some(&p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(LllError::ProbabilityOutOfRange(p));
        }
        Ok(Self { probs })
    }

    pub fn uniform(len: usize, p: f64) -> Result<Self, LllError> {
        Self::new(vec![p; len])
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probs[index]
    }
}

impl VariableSpace for BernoulliSpace {
    type Value = bool;

    fn len(&self) -> usize {
        self.probs.len()
    }

    fn draw<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> bool {
        rng.gen_bool(self.probs[index])
    }
}

/// Independent uniform choices; variable `i` takes a value in `0..sizes[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformChoiceSpace {
    sizes: Vec<usize>,
}

impl UniformChoiceSpace {
    /// Every size must be positive.
    pub fn new(sizes: Vec<usize>) -> Self {
        assert!(sizes.iter().all(|&s| s > 0), "uniform choice over an empty range");
        Self { sizes }
    }
}

impl VariableSpace for UniformChoiceSpace {
    type Value = usize;

    fn len(&self) -> usize {
        self.sizes.len()
    }

    fn draw<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> usize {
        rng.gen_range(0..self.sizes[index])
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws every variable once, in index order.
pub fn sample<S: VariableSpace, R: Rng + ?Sized>(space: &S, rng: &mut R) -> Vec<S::Value> {
    (0..space.len()).map(|i| space.draw(i, rng)).collect()
}

/// Draws every variable once from a fresh generator seeded with `seed`.
pub fn sample_seeded<S: VariableSpace>(space: &S, seed: u64) -> Vec<S::Value> {
    sample(space, &mut rng_from_seed(seed))
}

type Predicate<'a, V> = Box<dyn Fn(&[V]) -> bool + 'a>;

pub struct BadEvent<'a, V> {
    pub label: String,
    pub scope: Vec<usize>,
    predicate: Predicate<'a, V>,
}

impl<'a, V> BadEvent<'a, V> {
    /// `predicate` must depend only on the variables listed in `scope`.
    pub fn new(label: impl Into<String>, scope: Vec<usize>, predicate: impl Fn(&[V]) -> bool + 'a) -> Self {
        Self { label: label.into(), scope, predicate: Box::new(predicate) }
    }

    pub fn holds(&self, assignment: &[V]) -> bool {
        (self.predicate)(assignment)
    }
}

impl<V> std::fmt::Debug for BadEvent<'_, V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BadEvent").field("label", &self.label).field("scope", &self.scope).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResampleStats {
    pub resamples: usize,
    /// How many times each event was selected for resampling.
    pub violations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResampleOutcome<V> {
    /// No event holds on `assignment`.
    Clear { assignment: Vec<V>, stats: ResampleStats },
    /// The round budget ran out while `pending` (an event index) still held.
    Exhausted { pending: usize, stats: ResampleStats },
}

impl<V> ResampleOutcome<V> {
    pub fn stats(&self) -> &ResampleStats {
        match self {
            ResampleOutcome::Clear { stats, .. } | ResampleOutcome::Exhausted { stats, .. } => stats,
        }
    }

    pub fn is_clear(&self) -> bool {
        matches!(self, ResampleOutcome::Clear { .. })
    }
}

/// Moser–Tardos loop with deterministic lowest-index event selection.
///
/// At most `max_rounds` resamples are performed. Only events whose scope
/// meets a resampled variable are re-evaluated between rounds; on success
/// every predicate is evaluated once more before returning.
pub fn resample_until_clear<S: VariableSpace, R: Rng + ?Sized>(
    space: &S,
    events: &[BadEvent<'_, S::Value>],
    max_rounds: usize,
    rng: &mut R,
) -> Result<ResampleOutcome<S::Value>, LllError> {
    if max_rounds == 0 {
        return Err(LllError::ZeroRounds);
    }
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); space.len()];
    for (i, event) in events.iter().enumerate() {
        for &x in &event.scope {
            if x >= space.len() {
                return Err(LllError::ScopeOutOfRange { event: i, variable: x, len: space.len() });
            }
            readers[x].push(i);
        }
    }
    let mut assignment = sample(space, rng);
    let mut violated: BTreeSet<usize> = (0..events.len()).filter(|&i| events[i].holds(&assignment)).collect();
    let mut stats = ResampleStats { resamples: 0, violations: vec![0; events.len()] };
    let mut touched = Vec::new();
    loop {
        let Some(&first) = violated.first() else {
            if let Some(i) = events.iter().position(|e| e.holds(&assignment)) {
                // Only reachable if a predicate reads outside its scope.
                violated.insert(i);
                continue;
            }
            return Ok(ResampleOutcome::Clear { assignment, stats });
        };
        if stats.resamples == max_rounds {
            return Ok(ResampleOutcome::Exhausted { pending: first, stats });
        }
        stats.resamples += 1;
        stats.violations[first] += 1;
        for &x in &events[first].scope {
            assignment[x] = space.draw(x, rng);
        }
        touched.clear();
        touched.extend(events[first].scope.iter().flat_map(|&x| readers[x].iter().copied()));
        touched.sort_unstable();
        touched.dedup();
        for &i in &touched {
            if events[i].holds(&assignment) {
                violated.insert(i);
            } else {
                violated.remove(&i);
            }
        }
    }
}

/// Symmetric Local Lemma condition `4 p d <= 1`.
pub fn check_symmetric_lll<F: Float>(p: F, d: F) -> bool {
    let four = F::from(4.0).unwrap();
    four * p * d <= F::one()
}

/// An event with a probability bound, a weight and its dependency set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEvent<F> {
    pub probability: F,
    pub weight: F,
    pub dependencies: Vec<usize>,
}

/// Checks `P(A) <= x_A * prod_{B in D_A} (1 - x_B)` for each event.
pub fn check_general_lll<F: Float>(events: &[WeightedEvent<F>]) -> Result<Vec<bool>, LllError> {
    for (i, e) in events.iter().enumerate() {
        if !(e.weight >= F::zero() && e.weight < F::one()) {
            return Err(LllError::WeightOutOfRange { event: i });
        }
        if let Some(&d) = e.dependencies.iter().find(|&&d| d >= events.len()) {
            return Err(LllError::UnknownDependency { event: i, dependency: d });
        }
    }
    Ok(events
        .iter()
        .map(|e| {
            // Sum of logs keeps long products of factors near 1 accurate.
            let log_rhs = e
                .dependencies
                .iter()
                .fold(e.weight.ln(), |acc, &d| acc + (-events[d].weight).ln_1p());
            e.probability <= log_rhs.exp()
        })
        .collect())
}
