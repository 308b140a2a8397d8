//! The generating polynomials: pattern frequencies of an error-independent
//! trio as a function of its evaluation point.

use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::model::{
    count, ByTrueLabelCounts, DecisionPattern, EvaluationPoint, Label, PatternFrequencies, Slot,
};

/// Probability that a true-`truth` item produces `pattern`, without the prevalence factor.
fn conditional(point: &EvaluationPoint, pattern: DecisionPattern, truth: Label) -> Rational {
    Slot::ALL.iter().fold(Rational::one(), |acc, slot| {
        let pi = point.accuracy(*slot, truth);
        if pattern.label(*slot) == truth {
            acc * pi
        } else {
            acc * (Rational::one() - pi)
        }
    })
}

/// By-label terms `p_ℓ · Π(π or 1−π)` for every pattern, evaluated without a
/// domain check. Out-of-range points still yield well-defined polynomials.
pub fn generating_terms(point: &EvaluationPoint) -> [[Rational; 8]; 2] {
    Label::ALL.map(|truth| {
        let prevalence = point.prevalence(truth);
        DecisionPattern::ALL.map(|p| &prevalence * conditional(point, p, truth))
    })
}

/// The eight generating polynomials evaluated at `point`, no domain check.
pub fn generating_polynomials(point: &EvaluationPoint) -> [Rational; 8] {
    let [a, b] = generating_terms(point);
    std::array::from_fn(|i| &a[i] + &b[i])
}

pub fn pattern_frequencies(point: &EvaluationPoint) -> Result<PatternFrequencies> {
    check_domain(point)?;
    Ok(PatternFrequencies::from_array_unchecked(generating_polynomials(point)))
}

/// Expected counts by true label on a test of size `q`.
pub fn expected_partition(point: &EvaluationPoint, q: u64) -> Result<ByTrueLabelCounts> {
    check_domain(point)?;
    if q == 0 {
        return Err(Error::EmptyTest);
    }
    let q = count(q);
    let [a, b] = generating_terms(point);
    Ok(ByTrueLabelCounts::new(a.map(|x| x * &q), b.map(|x| x * &q)))
}

/// `p_a ↔ p_b`, `π_a → 1 − π_b`, `π_b → 1 − π_a`: the conjugate point with
/// identical observable frequencies.
pub fn swap_transform(point: &EvaluationPoint) -> EvaluationPoint {
    let one = Rational::one();
    EvaluationPoint {
        p_a: point.p_b(),
        acc: point.acc.clone().map(|[pa, pb]| [&one - pb, &one - pa]),
    }
}

fn check_domain(point: &EvaluationPoint) -> Result<()> {
    if point.is_valid() {
        Ok(())
    } else {
        Err(Error::Domain(point.to_string()))
    }
}
