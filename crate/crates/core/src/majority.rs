//! Majority voting: the group decision rule and the evaluation obtained by
//! treating the majority decisions as an answer key.

use num_traits::Zero;

use crate::exact::Rational;
use crate::model::{
    count, ByTrueLabelCounts, DecisionPattern, EvaluationEstimate, Label, OptRational, PatternCounts,
    PatternFrequencies, Slot,
};

pub fn mv_decide(pattern: DecisionPattern) -> Label {
    pattern.majority()
}

/// Majority-imputed evaluation. Always rational; accuracies on a label that
/// is never the majority are undefined.
pub fn mv_evaluate(freqs: &PatternFrequencies) -> EvaluationEstimate {
    let mass = |label: Label| -> Rational {
        freqs.iter().filter(|(p, _)| mv_decide(*p) == label).map(|(_, f)| f).sum()
    };
    let masses = Label::ALL.map(mass);
    let acc = Slot::ALL.map(|slot| {
        Label::ALL.map(|label| {
            let total = &masses[label as usize];
            if total.is_zero() {
                return OptRational(None);
            }
            let agreeing: Rational = freqs
                .iter()
                .filter(|(p, _)| mv_decide(*p) == label && p.label(slot) == label)
                .map(|(_, f)| f)
                .sum();
            OptRational(Some(agreeing / total))
        })
    });
    let [p_a, _] = masses;
    EvaluationEstimate { p_a, acc }
}

/// The partition majority voting implies: every item of a pattern carries
/// the majority label.
pub fn mv_partition(counts: &PatternCounts) -> ByTrueLabelCounts {
    let mut out = ByTrueLabelCounts::default();
    for (p, n) in counts.iter() {
        out.set(mv_decide(p), p, count(n));
        out.set(mv_decide(p).other(), p, Rational::zero());
    }
    out
}
