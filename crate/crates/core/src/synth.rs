//! Synthetic tests: per-item sampling of an ensemble with independent or
//! deliberately correlated errors.
//!
//! Sampling uses floating point; the exact rational machinery is reserved
//! for statistics and evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact;
use crate::model::{ByTrueLabelCounts, DecisionPattern, DecisionRecord, EvaluationPoint, Label, Slot};

/// Prevalence of `a` and per-classifier `[π_a, π_b]` for any number of classifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub p_a: f64,
    pub accuracies: Vec<[f64; 2]>,
}

impl Ensemble {
    pub fn new(p_a: f64, accuracies: Vec<[f64; 2]>) -> Result<Self> {
        let ensemble = Ensemble { p_a, accuracies };
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(ensemble.p_a) || !ensemble.accuracies.iter().flatten().all(|x| unit(*x)) {
            return Err(Error::Config(format!("ensemble parameters outside [0,1]: {ensemble:?}")));
        }
        Ok(ensemble)
    }

    pub fn from_point(point: &EvaluationPoint) -> Result<Self> {
        let f = |slot: Slot, label: Label| exact::to_f64(point.accuracy(slot, label));
        Ensemble::new(
            exact::to_f64(&point.p_a),
            Slot::ALL.iter().map(|s| [f(*s, Label::A), f(*s, Label::B)]).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.accuracies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accuracies.is_empty()
    }
}

/// Shared-draw coupling between two classifiers.
///
/// For each item, with probability `|rho[ℓ]|` (ℓ the true label) the second
/// classifier reuses the first one's uniform correctness variate (or its
/// antithetic `1 − U` when `rho` is negative) instead of drawing its own.
/// Marginal accuracies are unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub first: usize,
    pub second: usize,
    /// Mixture weight per true label, `a` then `b`, in `[-1, 1]`.
    pub rho: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CorrelationSpec {
    pub couplings: Vec<Coupling>,
}

impl CorrelationSpec {
    pub fn independent() -> Self {
        CorrelationSpec::default()
    }

    /// The same mixture weight on both labels for every listed pair.
    pub fn shared(pairs: &[(usize, usize)], rho: f64) -> Result<Self> {
        let couplings = pairs.iter().map(|&(first, second)| Coupling { first, second, rho: [rho; 2] }).collect();
        let spec = CorrelationSpec { couplings };
        spec.check_weights()?;
        Ok(spec)
    }

    /// Mixture weights that produce target pair correlations `Γ` in the
    /// large-sample limit.
    ///
    /// With a shared variate, `Γ = ρ·(min(π_1, π_2) − π_1π_2)`; with an
    /// antithetic one, `Γ = ρ·(π_1π_2 − max(0, π_1 + π_2 − 1))`. Targets
    /// beyond those bounds, or beyond the covariance limit 1/4, are rejected.
    pub fn from_targets(ensemble: &Ensemble, targets: &[((usize, usize), Label, f64)]) -> Result<Self> {
        let mut couplings: Vec<Coupling> = Vec::new();
        for &((first, second), label, gamma) in targets {
            check_pair(ensemble.len(), first, second)?;
            if gamma.abs() > 0.25 {
                return Err(Error::Config(format!("target correlation {gamma} exceeds 1/4")));
            }
            let p1 = ensemble.accuracies[first][label as usize];
            let p2 = ensemble.accuracies[second][label as usize];
            let bound = if gamma >= 0.0 { p1.min(p2) - p1 * p2 } else { p1 * p2 - (p1 + p2 - 1.0).max(0.0) };
            let rho = if gamma == 0.0 {
                0.0
            } else if bound <= 0.0 {
                f64::INFINITY
            } else {
                gamma.signum() * gamma.abs() / bound
            };
            if rho.abs() > 1.0 {
                return Err(Error::Config(format!(
                    "target correlation {gamma} for pair ({first},{second}) label {label} is not achievable (bound {bound:.4})"
                )));
            }
            match couplings.iter_mut().find(|c| c.first == first && c.second == second) {
                Some(c) => c.rho[label as usize] = rho,
                None => {
                    let mut weights = [0.0; 2];
                    weights[label as usize] = rho;
                    couplings.push(Coupling { first, second, rho: weights });
                }
            }
        }
        Ok(CorrelationSpec { couplings })
    }

    fn check_weights(&self) -> Result<()> {
        for c in &self.couplings {
            if c.rho.iter().any(|r| !(-1.0..=1.0).contains(r)) {
                return Err(Error::Config(format!("mixture weight {:?} outside [-1, 1]", c.rho)));
            }
        }
        Ok(())
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.check_weights()?;
        for c in &self.couplings {
            check_pair(n, c.first, c.second)?;
        }
        Ok(())
    }
}

fn check_pair(n: usize, first: usize, second: usize) -> Result<()> {
    if first == second || first >= n || second >= n {
        return Err(Error::Config(format!("invalid classifier pair ({first},{second}) for {n} classifiers")));
    }
    Ok(())
}

/// Draw `q` items and hand each `(true label, decisions)` to `sink`.
/// Bit-reproducible for a given seed.
pub fn sample_items(
    ensemble: &Ensemble,
    q: u64,
    correlation: &CorrelationSpec,
    seed: u64,
    mut sink: impl FnMut(Label, &[Label]),
) -> Result<()> {
    correlation.validate(ensemble.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ensemble.len();
    let mut variates = vec![0.0f64; n];
    let mut decisions = vec![Label::A; n];
    for _ in 0..q {
        let truth = if rng.random::<f64>() < ensemble.p_a { Label::A } else { Label::B };
        let t = truth as usize;
        for u in variates.iter_mut() {
            *u = rng.random::<f64>();
        }
        for c in &correlation.couplings {
            let rho = c.rho[t];
            if rho != 0.0 && rng.random::<f64>() < rho.abs() {
                let shared = variates[c.first];
                variates[c.second] = if rho > 0.0 { shared } else { 1.0 - shared };
            }
        }
        for (idx, decision) in decisions.iter_mut().enumerate() {
            let correct = variates[idx] < ensemble.accuracies[idx][t];
            *decision = if correct { truth } else { truth.other() };
        }
        sink(truth, &decisions);
    }
    Ok(())
}

/// Per-item records with the given classifier ids and truth attached.
pub fn sample_records(
    ensemble: &Ensemble,
    ids: &[String],
    q: u64,
    correlation: &CorrelationSpec,
    seed: u64,
) -> Result<Vec<DecisionRecord>> {
    if ids.len() != ensemble.len() {
        return Err(Error::Config(format!("{} ids for {} classifiers", ids.len(), ensemble.len())));
    }
    let mut records = Vec::with_capacity(q as usize);
    sample_items(ensemble, q, correlation, seed, |truth, decisions| {
        records.push(DecisionRecord {
            item_id: format!("item{:06}", records.len()),
            decisions: ids.iter().cloned().zip(decisions.iter().copied()).collect(),
            true_label: Some(truth),
        });
    })?;
    Ok(records)
}

fn sample_trio(ensemble: &Ensemble, q: u64, correlation: &CorrelationSpec, seed: u64) -> Result<ByTrueLabelCounts> {
    let mut cells = [[0u64; 8]; 2];
    sample_items(ensemble, q, correlation, seed, |truth, d| {
        let p = DecisionPattern([d[0], d[1], d[2]]);
        cells[truth as usize][p.index()] += 1;
    })?;
    Ok(ByTrueLabelCounts::from_integers(cells[0], cells[1]))
}

/// Ground truth of an error-independent trio on a test of `q` items.
pub fn sample_independent(point: &EvaluationPoint, q: u64, seed: u64) -> Result<ByTrueLabelCounts> {
    sample_trio(&Ensemble::from_point(point)?, q, &CorrelationSpec::independent(), seed)
}

/// Ground truth of a trio whose errors are coupled per `spec` (slot indices 0..3).
pub fn sample_correlated(point: &EvaluationPoint, q: u64, spec: &CorrelationSpec, seed: u64) -> Result<ByTrueLabelCounts> {
    sample_trio(&Ensemble::from_point(point)?, q, spec, seed)
}
