//! Domain types shared across the crate: labels, decision patterns, counts,
//! frequencies, by-true-label partitions and evaluation points.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

/// Binary label alphabet, ordered `A < B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    A,
    B,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::A, Label::B];

    pub fn other(self) -> Label {
        match self {
            Label::A => Label::B,
            Label::B => Label::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Label::A => 'a',
            Label::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Label> {
        match c {
            'a' => Some(Label::A),
            'b' => Some(Label::B),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Position of a classifier within an ordered trio `(i, j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    I,
    J,
    K,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::I, Slot::J, Slot::K];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::I => "i",
            Slot::J => "j",
            Slot::K => "k",
        }
    }
}

/// Unordered pair of trio slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pair {
    IJ,
    IK,
    JK,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::IJ, Pair::IK, Pair::JK];

    pub fn new(x: Slot, y: Slot) -> Option<Pair> {
        match (x.min(y), x.max(y)) {
            (Slot::I, Slot::J) => Some(Pair::IJ),
            (Slot::I, Slot::K) => Some(Pair::IK),
            (Slot::J, Slot::K) => Some(Pair::JK),
            _ => None,
        }
    }

    pub fn slots(self) -> (Slot, Slot) {
        match self {
            Pair::IJ => (Slot::I, Slot::J),
            Pair::IK => (Slot::I, Slot::K),
            Pair::JK => (Slot::J, Slot::K),
        }
    }

    /// The pair that does not contain `slot`.
    pub fn opposite(slot: Slot) -> Pair {
        match slot {
            Slot::I => Pair::JK,
            Slot::J => Pair::IK,
            Slot::K => Pair::IJ,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// The labels a trio assigned to one item, in slot order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecisionPattern(pub [Label; 3]);

use Label::{A, B};

impl DecisionPattern {
    /// Canonical enumeration order: aaa, aab, aba, baa, bba, bab, abb, bbb.
    pub const ALL: [DecisionPattern; 8] = [
        DecisionPattern([A, A, A]),
        DecisionPattern([A, A, B]),
        DecisionPattern([A, B, A]),
        DecisionPattern([B, A, A]),
        DecisionPattern([B, B, A]),
        DecisionPattern([B, A, B]),
        DecisionPattern([A, B, B]),
        DecisionPattern([B, B, B]),
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|p| *p == self).expect("all 8 patterns enumerated")
    }

    pub fn label(self, slot: Slot) -> Label {
        self.0[slot.index()]
    }

    pub fn key(self) -> String {
        self.0.iter().map(|l| l.as_char()).collect()
    }

    pub fn parse(key: &str) -> Option<DecisionPattern> {
        let labels: Vec<Label> = key.chars().map(Label::from_char).collect::<Option<_>>()?;
        <[Label; 3]>::try_from(labels).ok().map(DecisionPattern)
    }

    /// Majority label; three binary votes always have one.
    pub fn majority(self) -> Label {
        let bs = self.0.iter().filter(|l| **l == B).count();
        if bs >= 2 {
            B
        } else {
            A
        }
    }
}

impl fmt::Display for DecisionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Observed joint-decision counts of a trio, indexed in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PatternCounts {
    counts: [u64; 8],
}

impl PatternCounts {
    pub fn new(counts: [u64; 8]) -> Self {
        PatternCounts { counts }
    }

    pub fn from_map<'a>(map: impl IntoIterator<Item = (&'a DecisionPattern, &'a u64)>) -> Self {
        let mut counts = [0u64; 8];
        for (p, n) in map {
            counts[p.index()] += n;
        }
        PatternCounts { counts }
    }

    pub fn get(&self, pattern: DecisionPattern) -> u64 {
        self.counts[pattern.index()]
    }

    pub fn as_array(&self) -> &[u64; 8] {
        &self.counts
    }

    /// Test size.
    pub fn q(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DecisionPattern, u64)> + '_ {
        DecisionPattern::ALL.iter().map(move |p| (*p, self.counts[p.index()]))
    }

    /// Counts scaled by a positive integer.
    pub fn scaled(&self, factor: u64) -> PatternCounts {
        PatternCounts { counts: self.counts.map(|n| n * factor) }
    }

    /// Reorder the trio: slot `s` of the result is slot `order[s]` of `self`.
    pub fn permuted(&self, order: [Slot; 3]) -> PatternCounts {
        let mut counts = [0u64; 8];
        for p in DecisionPattern::ALL {
            let moved = DecisionPattern(order.map(|s| p.label(s)));
            counts[moved.index()] += self.get(p);
        }
        PatternCounts { counts }
    }
}

impl Serialize for PatternCounts {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, u64> = self.iter().map(|(p, n)| (p.key(), n)).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PatternCounts {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, u64>::deserialize(d)?;
        let mut counts = [0u64; 8];
        for (key, n) in map {
            let p = DecisionPattern::parse(&key)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid trio pattern {key:?}")))?;
            counts[p.index()] = n;
        }
        Ok(PatternCounts { counts })
    }
}

/// Exact relative frequencies of the eight patterns; they sum to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternFrequencies {
    freqs: [Rational; 8],
}

impl PatternFrequencies {
    /// Frequencies must be non-negative and sum to one.
    pub fn new(freqs: [Rational; 8]) -> Result<Self> {
        let total: Rational = freqs.iter().sum();
        if freqs.iter().any(|f| f.is_negative()) || !total.is_one() {
            return Err(Error::Domain(format!("pattern frequencies must be non-negative and sum to 1, got sum {total}")));
        }
        Ok(PatternFrequencies { freqs })
    }

    /// Wraps eight rationals that are already known to be non-negative and
    /// sum to one.
    pub(crate) fn from_array_unchecked(freqs: [Rational; 8]) -> Self {
        PatternFrequencies { freqs }
    }

    pub fn get(&self, pattern: DecisionPattern) -> &Rational {
        &self.freqs[pattern.index()]
    }

    pub fn as_array(&self) -> &[Rational; 8] {
        &self.freqs
    }

    pub fn iter(&self) -> impl Iterator<Item = (DecisionPattern, &Rational)> + '_ {
        DecisionPattern::ALL.iter().map(move |p| (*p, &self.freqs[p.index()]))
    }

    pub fn sum(&self) -> Rational {
        self.freqs.iter().sum()
    }

    /// Same reordering as [`PatternCounts::permuted`].
    pub fn permuted(&self, order: [Slot; 3]) -> PatternFrequencies {
        let mut freqs: [Rational; 8] = Default::default();
        for p in DecisionPattern::ALL {
            let moved = DecisionPattern(order.map(|s| p.label(s)));
            freqs[moved.index()] += self.get(p);
        }
        PatternFrequencies { freqs }
    }
}

/// `n / q` for every pattern.
pub fn frequencies(counts: &PatternCounts) -> Result<PatternFrequencies> {
    let q = counts.q();
    if q == 0 {
        return Err(Error::EmptyTest);
    }
    let q = BigInt::from(q);
    let freqs = counts.as_array().map(|n| Rational::new(BigInt::from(n), q.clone()));
    Ok(PatternFrequencies { freqs })
}

/// Pattern counts split by true label. Ground truth holds non-negative
/// integers; model estimates may hold arbitrary rationals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ByTrueLabelCounts {
    cells: [[Rational; 8]; 2],
}

impl ByTrueLabelCounts {
    pub fn new(a: [Rational; 8], b: [Rational; 8]) -> Self {
        ByTrueLabelCounts { cells: [a, b] }
    }

    pub fn from_integers(a: [u64; 8], b: [u64; 8]) -> Self {
        let conv = |xs: [u64; 8]| xs.map(|n| Rational::from_integer(BigInt::from(n)));
        ByTrueLabelCounts { cells: [conv(a), conv(b)] }
    }

    pub fn get(&self, label: Label, pattern: DecisionPattern) -> &Rational {
        &self.cells[label.index()][pattern.index()]
    }

    pub fn set(&mut self, label: Label, pattern: DecisionPattern, value: Rational) {
        self.cells[label.index()][pattern.index()] = value;
    }

    pub fn add(&mut self, label: Label, pattern: DecisionPattern, value: &Rational) {
        self.cells[label.index()][pattern.index()] += value;
    }

    pub fn label_cells(&self, label: Label) -> &[Rational; 8] {
        &self.cells[label.index()]
    }

    /// `Q_label`: number (or estimated mass) of items with this true label.
    pub fn label_total(&self, label: Label) -> Rational {
        self.cells[label.index()].iter().sum()
    }

    pub fn total(&self) -> Rational {
        self.label_total(A) + self.label_total(B)
    }

    /// Per-pattern sums over both labels.
    pub fn pattern_totals(&self) -> [Rational; 8] {
        std::array::from_fn(|i| &self.cells[0][i] + &self.cells[1][i])
    }

    pub fn is_ground_truth(&self) -> bool {
        self.cells.iter().flatten().all(|x| x.is_integer() && !x.is_negative())
    }

    /// Integer cells, if this is ground truth.
    pub fn integer_cells(&self) -> Result<[[u64; 8]; 2]> {
        let mut out = [[0u64; 8]; 2];
        for label in Label::ALL {
            for p in DecisionPattern::ALL {
                let x = self.get(label, p);
                if !x.is_integer() || x.is_negative() {
                    return Err(Error::NotGroundTruth(format!(
                        "cell ({p}|{label}) = {}",
                        exact::format(x)
                    )));
                }
                out[label.index()][p.index()] = u64::try_from(x.to_integer())
                    .map_err(|_| Error::NotGroundTruth(format!("cell ({p}|{label}) too large")))?;
            }
        }
        Ok(out)
    }

    /// Same reordering as [`PatternCounts::permuted`].
    pub fn permuted(&self, order: [Slot; 3]) -> ByTrueLabelCounts {
        let mut out = ByTrueLabelCounts::default();
        for label in Label::ALL {
            for p in DecisionPattern::ALL {
                let moved = DecisionPattern(order.map(|s| p.label(s)));
                out.add(label, moved, self.get(label, p));
            }
        }
        out
    }
}

impl Serialize for ByTrueLabelCounts {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<Label, BTreeMap<String, String>> = Label::ALL
            .iter()
            .map(|label| {
                let cells = DecisionPattern::ALL
                    .iter()
                    .map(|p| (p.key(), exact::format(self.get(*label, *p))))
                    .collect();
                (*label, cells)
            })
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ByTrueLabelCounts {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = BTreeMap::<Label, BTreeMap<String, String>>::deserialize(d)?;
        let mut out = ByTrueLabelCounts::default();
        for (label, cells) in map {
            for (key, text) in cells {
                let p = DecisionPattern::parse(&key)
                    .ok_or_else(|| D::Error::custom(format!("invalid trio pattern {key:?}")))?;
                let x = exact::parse(&text).ok_or_else(|| D::Error::custom(format!("invalid rational {text:?}")))?;
                out.set(label, p, x);
            }
        }
        Ok(out)
    }
}

/// Collapse ground truth onto observed pattern counts.
pub fn project(by_label: &ByTrueLabelCounts) -> Result<PatternCounts> {
    let cells = by_label.integer_cells()?;
    Ok(PatternCounts::new(std::array::from_fn(|i| cells[0][i] + cells[1][i])))
}

/// Prevalence of label `a` plus per-classifier per-label accuracies.
///
/// Points produced by the solver may lie outside the unit cube; validity is
/// checked where it matters (the forward map) rather than at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvaluationPoint {
    pub p_a: Rational,
    /// `acc[slot][label]`.
    pub acc: [[Rational; 2]; 3],
}

impl EvaluationPoint {
    pub fn new(p_a: Rational, acc: [[Rational; 2]; 3]) -> Self {
        EvaluationPoint { p_a, acc }
    }

    /// Same accuracies `(π_a, π_b)` for all three classifiers.
    pub fn uniform(p_a: Rational, pi_a: Rational, pi_b: Rational) -> Self {
        EvaluationPoint { p_a, acc: std::array::from_fn(|_| [pi_a.clone(), pi_b.clone()]) }
    }

    pub fn p_b(&self) -> Rational {
        Rational::one() - &self.p_a
    }

    pub fn prevalence(&self, label: Label) -> Rational {
        match label {
            A => self.p_a.clone(),
            B => self.p_b(),
        }
    }

    pub fn accuracy(&self, slot: Slot, label: Label) -> &Rational {
        &self.acc[slot.index()][label.index()]
    }

    /// The seven coordinates in `(p_a, π_ia, π_ib, π_ja, π_jb, π_ka, π_kb)` order.
    pub fn coordinates(&self) -> [&Rational; 7] {
        [
            &self.p_a,
            &self.acc[0][0],
            &self.acc[0][1],
            &self.acc[1][0],
            &self.acc[1][1],
            &self.acc[2][0],
            &self.acc[2][1],
        ]
    }

    pub fn is_valid(&self) -> bool {
        self.coordinates().iter().all(|x| exact::in_unit_interval(x))
    }

    /// Coordinates clamped into `[0, 1]`, and whether anything moved.
    pub fn clamped(&self) -> (EvaluationPoint, bool) {
        let clamp = |x: &Rational| -> Rational {
            if x.is_negative() {
                Rational::zero()
            } else if x > &Rational::one() {
                Rational::one()
            } else {
                x.clone()
            }
        };
        let out = EvaluationPoint {
            p_a: clamp(&self.p_a),
            acc: self.acc.clone().map(|pair| pair.map(|x| clamp(&x))),
        };
        let moved = out != *self;
        (out, moved)
    }

    /// Count of accuracies strictly better than a coin flip.
    pub fn better_than_random(&self) -> usize {
        let half = exact::half();
        self.acc.iter().flatten().filter(|x| **x > half).count()
    }

    /// Reorder slots like [`PatternCounts::permuted`].
    pub fn permuted(&self, order: [Slot; 3]) -> EvaluationPoint {
        EvaluationPoint { p_a: self.p_a.clone(), acc: order.map(|s| self.acc[s.index()].clone()) }
    }
}

impl fmt::Display for EvaluationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p_a={:.6}", exact::to_f64(&self.p_a))?;
        for slot in Slot::ALL {
            write!(
                f,
                " {}:({:.6},{:.6})",
                slot.name(),
                exact::to_f64(self.accuracy(slot, A)),
                exact::to_f64(self.accuracy(slot, B))
            )?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    #[serde(with = "exact::serde_rational")]
    p_a: Rational,
    accuracy: BTreeMap<Slot, LabelPair>,
    #[serde(default, skip_deserializing)]
    decimal: Option<DecimalRepr>,
}

#[derive(Serialize, Deserialize)]
struct LabelPair {
    #[serde(with = "exact::serde_rational")]
    a: Rational,
    #[serde(with = "exact::serde_rational")]
    b: Rational,
}

#[derive(Serialize, Deserialize)]
struct DecimalRepr {
    p_a: f64,
    accuracy: BTreeMap<Slot, [f64; 2]>,
}

impl Serialize for EvaluationPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let accuracy = Slot::ALL
            .iter()
            .map(|slot| {
                let [a, b] = self.acc[slot.index()].clone();
                (*slot, LabelPair { a, b })
            })
            .collect();
        let decimal = DecimalRepr {
            p_a: exact::to_f64(&self.p_a),
            accuracy: Slot::ALL
                .iter()
                .map(|slot| (*slot, self.acc[slot.index()].clone().map(|x| exact::to_f64(&x))))
                .collect(),
        };
        PointRepr { p_a: self.p_a.clone(), accuracy, decimal: Some(decimal) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EvaluationPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut repr = PointRepr::deserialize(d)?;
        let mut acc: [[Rational; 2]; 3] = Default::default();
        for slot in Slot::ALL {
            let pair = repr
                .accuracy
                .remove(&slot)
                .ok_or_else(|| serde::de::Error::custom(format!("missing accuracy for {}", slot.name())))?;
            acc[slot.index()] = [pair.a, pair.b];
        }
        Ok(EvaluationPoint { p_a: repr.p_a, acc })
    }
}

/// An evaluation in which some accuracies may be undefined: a label that
/// never occurs (ground truth) or is never the majority (majority voting).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationEstimate {
    #[serde(with = "exact::serde_rational")]
    pub p_a: Rational,
    /// `acc[slot][label]`; `None` when the label's mass is zero.
    pub acc: [[OptRational; 2]; 3],
}

/// Serde-friendly optional rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptRational(#[serde(with = "exact::serde_opt_rational")] pub Option<Rational>);

impl EvaluationEstimate {
    pub fn accuracy(&self, slot: Slot, label: Label) -> Option<&Rational> {
        self.acc[slot.index()][label.index()].0.as_ref()
    }

    pub fn is_complete(&self) -> bool {
        self.acc.iter().flatten().all(|x| x.0.is_some())
    }

    /// The full point when every accuracy is defined.
    pub fn to_point(&self) -> Option<EvaluationPoint> {
        let mut acc: [[Rational; 2]; 3] = Default::default();
        for slot in Slot::ALL {
            for label in Label::ALL {
                acc[slot.index()][label.index()] = self.accuracy(slot, label)?.clone();
            }
        }
        Some(EvaluationPoint { p_a: self.p_a.clone(), acc })
    }

    /// Undefined accuracies replaced by zero.
    pub fn zero_filled(&self) -> EvaluationPoint {
        EvaluationPoint {
            p_a: self.p_a.clone(),
            acc: self.acc.clone().map(|pair| pair.map(|x| x.0.unwrap_or_else(Rational::zero))),
        }
    }
}

/// One classified item: every ensemble member's label and, optionally, the truth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub item_id: String,
    pub decisions: BTreeMap<String, Label>,
    pub true_label: Option<Label>,
}

/// Tally of a trio over a set of records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregate {
    pub counts: PatternCounts,
    /// Present iff every record carries a true label.
    pub by_label: Option<ByTrueLabelCounts>,
}

/// Count the decision patterns of `trio` over `records`.
pub fn aggregate<'a>(
    records: impl IntoIterator<Item = &'a DecisionRecord>,
    trio: &[String; 3],
) -> Result<Aggregate> {
    let mut counts = [0u64; 8];
    let mut by_label = [[0u64; 8]; 2];
    let mut all_labelled = true;
    for record in records {
        let mut labels = [A; 3];
        for (slot, id) in trio.iter().enumerate() {
            labels[slot] = *record.decisions.get(id).ok_or_else(|| Error::MissingDecision {
                item_id: record.item_id.clone(),
                classifier: id.clone(),
            })?;
        }
        let idx = DecisionPattern(labels).index();
        counts[idx] += 1;
        match record.true_label {
            Some(truth) => by_label[truth.index()][idx] += 1,
            None => all_labelled = false,
        }
    }
    let counts = PatternCounts::new(counts);
    let by_label = (all_labelled && counts.q() > 0)
        .then(|| ByTrueLabelCounts::from_integers(by_label[0], by_label[1]));
    Ok(Aggregate { counts, by_label })
}

/// Integer-valued rational helper.
pub(crate) fn count(n: u64) -> BigRational {
    Rational::from_integer(BigInt::from(n))
}
