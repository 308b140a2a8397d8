//! Ground-truth sample statistics of a test: prevalences, per-label
//! accuracies and per-label error correlations of the classifiers.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::model::{ByTrueLabelCounts, DecisionPattern, EvaluationEstimate, Label, OptRational, Pair, Slot};

/// Prevalence and label accuracies measured against the answer key. A label
/// with no items leaves its accuracies undefined.
pub fn ground_truth_evaluation(gt: &ByTrueLabelCounts) -> Result<EvaluationEstimate> {
    let total = gt.total();
    if total.is_zero() {
        return Err(Error::EmptyTest);
    }
    let p_a = gt.label_total(Label::A) / &total;
    let acc = Slot::ALL.map(|slot| Label::ALL.map(|label| OptRational(label_accuracy(gt, slot, label))));
    Ok(EvaluationEstimate { p_a, acc })
}

fn label_accuracy(gt: &ByTrueLabelCounts, slot: Slot, label: Label) -> Option<Rational> {
    let q_label = gt.label_total(label);
    if q_label.is_zero() {
        return None;
    }
    let correct: Rational = DecisionPattern::ALL
        .iter()
        .filter(|p| p.label(slot) == label)
        .map(|p| gt.get(label, *p))
        .sum();
    Some(correct / q_label)
}

/// Average over true-`label` items of the product of centred correctness
/// indicators of `slots`.
fn centred_moment(gt: &ByTrueLabelCounts, slots: &[Slot], label: Label) -> Option<Rational> {
    let q_label = gt.label_total(label);
    if q_label.is_zero() {
        return None;
    }
    let acc: Vec<Rational> = slots.iter().map(|s| label_accuracy(gt, *s, label).expect("non-empty label")).collect();
    let sum: Rational = DecisionPattern::ALL
        .iter()
        .map(|p| {
            let n = gt.get(label, *p);
            slots.iter().zip(&acc).fold(n.clone(), |prod, (slot, pi)| {
                let correct = if p.label(*slot) == label { Rational::from_integer(1.into()) } else { Rational::zero() };
                prod * (correct - pi)
            })
        })
        .sum();
    Some(sum / q_label)
}

/// Pair error correlation on true-`label` items; `None` if no such items.
pub fn error_correlation_pair(gt: &ByTrueLabelCounts, pair: Pair, label: Label) -> Option<Rational> {
    let (x, y) = pair.slots();
    centred_moment(gt, &[x, y], label)
}

/// Three-way error correlation on true-`label` items.
pub fn error_correlation_trio(gt: &ByTrueLabelCounts, label: Label) -> Option<Rational> {
    centred_moment(gt, &Slot::ALL, label)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub pair: Pair,
    pub label: Label,
    pub value: OptRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pairs: Vec<PairCorrelation>,
    /// Three-way correlation per label, `a` then `b`.
    pub trio: [OptRational; 2],
}

impl CorrelationReport {
    pub fn measure(gt: &ByTrueLabelCounts) -> CorrelationReport {
        let pairs = Pair::ALL
            .iter()
            .flat_map(|pair| {
                Label::ALL.map(|label| PairCorrelation {
                    pair: *pair,
                    label,
                    value: OptRational(error_correlation_pair(gt, *pair, label)),
                })
            })
            .collect();
        let trio = Label::ALL.map(|label| OptRational(error_correlation_trio(gt, label)));
        CorrelationReport { pairs, trio }
    }

    /// Largest absolute pair correlation.
    pub fn max_abs_pair(&self) -> f64 {
        self.pairs
            .iter()
            .filter_map(|c| c.value.0.as_ref())
            .map(|x| exact::to_f64(&x.abs()))
            .fold(0.0, f64::max)
    }
}
