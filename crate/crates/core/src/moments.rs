//! Observable moments of a trio's decisions: per-classifier frequency of
//! voting `b`, pairwise covariances and the three-way central moment.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational};
use crate::model::{DecisionPattern, Label, Pair, PatternFrequencies, Slot};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrioMoments {
    /// Marginal frequency of voting `b`, indexed by slot.
    pub f_b: [SerRational; 3],
    /// Pair covariances indexed by [`Pair`] (ij, ik, jk).
    pub delta_pair: [SerRational; 3],
    pub delta_trio: SerRational,
}

/// Rational that serializes as `num/den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SerRational(#[serde(with = "exact::serde_rational")] pub Rational);

impl TrioMoments {
    pub fn from_frequencies(freqs: &PatternFrequencies) -> TrioMoments {
        let f_b = Slot::ALL.map(|s| SerRational(marginal_b(freqs, s)));
        let delta_pair = Pair::ALL.map(|p| SerRational(delta_pair(freqs, p)));
        TrioMoments { f_b, delta_pair, delta_trio: SerRational(delta_trio(freqs)) }
    }

    pub fn f_b(&self, slot: Slot) -> &Rational {
        &self.f_b[slot.index()].0
    }

    pub fn delta(&self, pair: Pair) -> &Rational {
        &self.delta_pair[pair.index()].0
    }

    pub fn delta_trio(&self) -> &Rational {
        &self.delta_trio.0
    }

    /// `Δij·Δik·Δjk`.
    pub fn pair_product(&self) -> Rational {
        self.delta(Pair::IJ) * self.delta(Pair::IK) * self.delta(Pair::JK)
    }
}

/// Frequency with which the classifier in `slot` voted `b`.
pub fn marginal_b(freqs: &PatternFrequencies, slot: Slot) -> Rational {
    marginal(freqs, slot, Label::B)
}

pub fn marginal(freqs: &PatternFrequencies, slot: Slot, label: Label) -> Rational {
    freqs.iter().filter(|(p, _)| p.label(slot) == label).map(|(_, f)| f).sum()
}

/// Joint `bb` frequency of the pair minus the product of its marginals.
pub fn delta_pair(freqs: &PatternFrequencies, pair: Pair) -> Rational {
    let (x, y) = pair.slots();
    let joint: Rational = freqs
        .iter()
        .filter(|(p, _)| p.label(x) == Label::B && p.label(y) == Label::B)
        .map(|(_, f)| f)
        .sum();
    joint - marginal_b(freqs, x) * marginal_b(freqs, y)
}

/// Third central moment of the three `b`-vote indicators:
/// `f_bbb − (f_bi f_bj f_bk + f_bi Δjk + f_bj Δik + f_bk Δij)`.
pub fn delta_trio(freqs: &PatternFrequencies) -> Rational {
    let [fi, fj, fk] = Slot::ALL.map(|s| marginal_b(freqs, s));
    let bbb = freqs.get(DecisionPattern([Label::B; 3]));
    bbb - (&fi * &fj * &fk
        + &fi * delta_pair(freqs, Pair::JK)
        + &fj * delta_pair(freqs, Pair::IK)
        + &fk * delta_pair(freqs, Pair::IJ))
}

/// Marginal frequency of voting `a` (complement of [`marginal_b`]).
pub fn marginal_a(freqs: &PatternFrequencies, slot: Slot) -> Rational {
    Rational::one() - marginal_b(freqs, slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::model::{frequencies, PatternCounts};
    use crate::testdata::TABLE_OBSERVED;
    use num_traits::{Signed, Zero};

    fn survey() -> PatternFrequencies {
        frequencies(&PatternCounts::new(TABLE_OBSERVED)).unwrap()
    }

    #[test]
    fn table_marginal() {
        let f = survey();
        assert_eq!(marginal_b(&f, Slot::I), rat(1813 + 3534 + 3607 + 8208, 20000));
        assert_eq!(marginal_b(&f, Slot::I), rat(17162, 20000));
        assert_eq!(marginal_b(&f, Slot::J), rat(13459, 20000));
        for s in Slot::ALL {
            assert_eq!(marginal_b(&f, s) + marginal_a(&f, s), int(1));
        }
    }

    #[test]
    fn table_pair_delta() {
        let f = survey();
        let expected = rat(11742, 20000) - rat(17162, 20000) * rat(13459, 20000);
        let got = delta_pair(&f, Pair::IJ);
        assert_eq!(got, expected);
        assert!((exact::to_f64(&got) - 0.00963).abs() < 5e-5);
    }

    #[test]
    fn table_trio_delta_negative() {
        let d = delta_trio(&survey());
        assert!(d.is_negative());
        assert!((exact::to_f64(&d) + 0.00367).abs() < 5e-5);
    }

    #[test]
    fn all_bbb_marginals_are_one() {
        let f = frequencies(&PatternCounts::new([0, 0, 0, 0, 0, 0, 0, 3])).unwrap();
        for s in Slot::ALL {
            assert_eq!(marginal_b(&f, s), int(1));
        }
        assert!(delta_pair(&f, Pair::IJ).is_zero());
        assert!(delta_trio(&f).is_zero());
    }

    #[test]
    fn perfect_balanced_classifiers() {
        // aaa and bbb each half the test.
        let f = frequencies(&PatternCounts::new([1, 0, 0, 0, 0, 0, 0, 1])).unwrap();
        let m = TrioMoments::from_frequencies(&f);
        for p in Pair::ALL {
            assert_eq!(m.delta(p), &rat(1, 4));
        }
        assert!(m.delta_trio().is_zero());
    }

    #[test]
    fn constant_classifier_is_computed() {
        // Classifier k always votes a.
        let f = frequencies(&PatternCounts::new([3, 0, 2, 1, 4, 0, 0, 0])).unwrap();
        let m = TrioMoments::from_frequencies(&f);
        assert!(m.f_b(Slot::K).is_zero());
        assert!(m.delta(Pair::IK).is_zero());
        assert!(m.delta(Pair::JK).is_zero());
        assert!(m.delta_trio().is_zero());
    }

    #[test]
    fn moments_json_round_trip() {
        let m = TrioMoments::from_frequencies(&survey());
        let text = serde_json::to_string(&m).unwrap();
        let back: TrioMoments = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
