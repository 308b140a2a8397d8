//! Algebraic evaluation: invert the generating polynomials of an
//! error-independent trio.
//!
//! The prevalence of label `a` solves a quadratic whose coefficients are
//! built from the observable moments; each accuracy then follows from a
//! linear equation in the chosen prevalence. Both roots are always carried
//! through, and the nature of the roots is reported as an [`AlarmStatus`]:
//! for error-independent classifiers on a finite test the roots must be
//! rational and inside the unit interval, so anything else signals that the
//! independence assumption failed. A rational result is consistent with
//! independence but does not prove it.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, half, int, Rational};
use crate::forward::generating_polynomials;
use crate::model::{
    frequencies, DecisionPattern, EvaluationPoint, Label, Pair, PatternCounts, PatternFrequencies,
    Slot,
};
use crate::moments::{SerRational, TrioMoments};

pub const DEFAULT_PRECISION: u32 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlarmKind {
    CleanRational,
    IrrationalReal,
    Complex,
    OutOfRange,
    Degenerate,
}

impl AlarmKind {
    pub fn exit_code(self) -> i32 {
        match self {
            AlarmKind::CleanRational => 0,
            AlarmKind::IrrationalReal => 10,
            AlarmKind::Complex => 11,
            AlarmKind::OutOfRange => 12,
            AlarmKind::Degenerate => 13,
        }
    }

    /// True for the three kinds that signal correlated errors.
    pub fn is_independence_alarm(self) -> bool {
        matches!(self, AlarmKind::IrrationalReal | AlarmKind::Complex | AlarmKind::OutOfRange)
    }

    pub fn name(self) -> &'static str {
        match self {
            AlarmKind::CleanRational => "clean_rational",
            AlarmKind::IrrationalReal => "irrational_real",
            AlarmKind::Complex => "complex",
            AlarmKind::OutOfRange => "out_of_range",
            AlarmKind::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for AlarmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlarmStatus {
    pub kind: AlarmKind,
    pub detail: String,
}

impl AlarmStatus {
    fn new(kind: AlarmKind, detail: impl Into<String>) -> Self {
        AlarmStatus { kind, detail: detail.into() }
    }
}

/// `a·p² + b·p + c = 0` for the prevalence of label `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic {
    #[serde(with = "exact::serde_rational")]
    pub a: Rational,
    #[serde(with = "exact::serde_rational")]
    pub b: Rational,
    #[serde(with = "exact::serde_rational")]
    pub c: Rational,
}

impl Quadratic {
    pub fn discriminant(&self) -> Rational {
        &self.b * &self.b - int(4) * &self.a * &self.c
    }
}

/// `a = Δijk² + 4ΔijΔikΔjk`, `b = −a`, `c = ΔijΔikΔjk`.
pub fn prevalence_quadratic(m: &TrioMoments) -> Quadratic {
    let product = m.pair_product();
    let a = m.delta_trio() * m.delta_trio() + int(4) * &product;
    Quadratic { b: -a.clone(), a, c: product }
}

/// Roots of the prevalence quadratic, low root first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrevalenceRoots {
    Rational {
        #[serde(with = "exact::serde_rational")]
        low: Rational,
        #[serde(with = "exact::serde_rational")]
        high: Rational,
    },
    /// Rational approximations of irrational roots.
    Irrational {
        #[serde(with = "exact::serde_rational")]
        low: Rational,
        #[serde(with = "exact::serde_rational")]
        high: Rational,
    },
    /// `re ± i·im`, approximated.
    Complex {
        #[serde(with = "exact::serde_rational")]
        re: Rational,
        #[serde(with = "exact::serde_rational")]
        im: Rational,
    },
}

/// Solve the prevalence quadratic and classify its roots.
///
/// A vanishing leading coefficient is degenerate. Otherwise the status is
/// complex for a negative discriminant, irrational when the discriminant is
/// not the square of a rational, and clean (pending the range check on the
/// full candidates) when it is.
pub fn solve_prevalence(q: &Quadratic, precision: u32) -> (Option<PrevalenceRoots>, AlarmStatus) {
    if q.a.is_zero() {
        return (
            None,
            AlarmStatus::new(AlarmKind::Degenerate, "leading coefficient of the prevalence quadratic vanishes"),
        );
    }
    let disc = q.discriminant();
    let two_a = int(2) * &q.a;
    let centre = -&q.b / &two_a;
    if disc.is_negative() {
        let im = exact::round_significant(&(exact::sqrt_approx(&-disc, precision + 10) / two_a.abs()), precision);
        let roots = PrevalenceRoots::Complex { re: centre, im };
        return (Some(roots), AlarmStatus::new(AlarmKind::Complex, "negative discriminant: complex prevalence roots"));
    }
    match exact::exact_sqrt(&disc) {
        Some(root) => {
            let offset = root / two_a.abs();
            let roots = PrevalenceRoots::Rational { low: &centre - &offset, high: &centre + &offset };
            (
                Some(roots),
                AlarmStatus::new(
                    AlarmKind::CleanRational,
                    "rational prevalence roots: consistent with error independence, not proof of it",
                ),
            )
        }
        None => {
            let offset = exact::sqrt_approx(&disc, precision + 10) / two_a.abs();
            let low = exact::round_significant(&(&centre - &offset), precision);
            let high = exact::round_significant(&(&centre + &offset), precision);
            (
                Some(PrevalenceRoots::Irrational { low, high }),
                AlarmStatus::new(
                    AlarmKind::IrrationalReal,
                    "discriminant is not a rational square: irrational prevalence roots, classifiers are error-correlated",
                ),
            )
        }
    }
}

/// `0 = constant + slope·p_a + coefficient·π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccuracyEquation {
    pub constant: Rational,
    pub slope: Rational,
    pub coefficient: Rational,
}

impl AccuracyEquation {
    pub fn solve(&self, p_a: &Rational) -> Option<Rational> {
        if self.coefficient.is_zero() {
            return None;
        }
        Some(-(&self.constant + &self.slope * p_a) / &self.coefficient)
    }
}

/// Linear equation tying the accuracy of `slot` on `label` to the prevalence.
///
/// The classifier-`i` equations are written out; `j` and `k` follow by
/// relabelling, with the "opposite" pair being the one that excludes the
/// classifier.
pub fn accuracy_equation(m: &TrioMoments, slot: Slot, label: Label) -> AccuracyEquation {
    let dt = m.delta_trio();
    let opposite = m.delta(Pair::opposite(slot));
    let product = m.pair_product();
    let f_b = m.f_b(slot);
    let lead = dt * dt + int(4) * &product;
    match label {
        Label::A => AccuracyEquation {
            constant: dt * (dt - opposite * (Rational::one() - f_b)) + int(2) * &product,
            slope: -lead,
            coefficient: opposite * dt,
        },
        Label::B => AccuracyEquation {
            constant: f_b * opposite * dt - int(2) * &product,
            slope: lead,
            coefficient: -(opposite * dt),
        },
    }
}

/// The six accuracies implied by a chosen prevalence.
pub fn accuracies_given_prevalence(m: &TrioMoments, p_a: &Rational) -> std::result::Result<[[Rational; 2]; 3], AlarmStatus> {
    if let Some(reason) = vanishing_divisor(m) {
        return Err(AlarmStatus::new(AlarmKind::Degenerate, reason));
    }
    let mut acc: [[Rational; 2]; 3] = Default::default();
    for slot in Slot::ALL {
        for label in Label::ALL {
            acc[slot.index()][label.index()] = accuracy_equation(m, slot, label)
                .solve(p_a)
                .expect("divisors checked above");
        }
    }
    Ok(acc)
}

fn vanishing_divisor(m: &TrioMoments) -> Option<String> {
    let zero_pairs: Vec<&str> = Pair::ALL
        .iter()
        .filter(|p| m.delta(**p).is_zero())
        .map(|p| match p {
            Pair::IJ => "Δij",
            Pair::IK => "Δik",
            Pair::JK => "Δjk",
        })
        .collect();
    if !zero_pairs.is_empty() {
        return Some(format!("pair covariance {} vanishes", zero_pairs.join(", ")));
    }
    if m.delta_trio().is_zero() {
        return Some("three-way moment Δijk vanishes".into());
    }
    None
}

/// How to pick the reported candidate out of the two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionPolicy {
    /// Most accuracies strictly above 1/2; ties go to the prevalence closest to
    /// the majority-vote estimate, then to the smaller prevalence.
    #[default]
    BetterThanRandom,
    LowPrevalence,
    Index(usize),
}

impl FromStr for SelectionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "better-than-random" => Ok(SelectionPolicy::BetterThanRandom),
            "low-prevalence" => Ok(SelectionPolicy::LowPrevalence),
            other => match other.strip_prefix("index:").and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n < 2 => Ok(SelectionPolicy::Index(n)),
                _ => Err(Error::Config(format!(
                    "unknown policy {other:?} (expected better-than-random, low-prevalence, index:0 or index:1)"
                ))),
            },
        }
    }
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionPolicy::BetterThanRandom => f.write_str("better-than-random"),
            SelectionPolicy::LowPrevalence => f.write_str("low-prevalence"),
            SelectionPolicy::Index(n) => write!(f, "index:{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub policy: SelectionPolicy,
    /// Significant digits kept for irrational approximations.
    pub precision: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { policy: SelectionPolicy::default(), precision: DEFAULT_PRECISION }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// Real parts for complex solutions.
    pub point: EvaluationPoint,
    /// Imaginary parts, present only for complex solutions.
    pub imaginary: Option<EvaluationPoint>,
    /// Exact solution, as opposed to a decimal approximation.
    pub exact: bool,
    pub in_range: bool,
    /// Largest absolute gap between the generating polynomials at `point`
    /// and the observed frequencies. Zero for exact solutions.
    #[serde(with = "exact::serde_rational")]
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeSolution {
    pub moments: TrioMoments,
    pub quadratic: Quadratic,
    pub roots: Option<PrevalenceRoots>,
    /// Zero or two candidates, lower prevalence first.
    pub candidates: Vec<Candidate>,
    pub selected: Option<usize>,
    pub selection_ambiguous: bool,
    pub alarm: AlarmStatus,
    /// Majority-vote prevalence used for tie-breaking.
    pub mv_prevalence: SerRational,
}

impl AeSolution {
    pub fn selected_candidate(&self) -> Option<&Candidate> {
        self.selected.map(|i| &self.candidates[i])
    }

    pub fn selected_point(&self) -> Option<&EvaluationPoint> {
        self.selected_candidate().map(|c| &c.point)
    }
}

pub fn evaluate(counts: &PatternCounts, options: &SolverOptions) -> Result<AeSolution> {
    let freqs = frequencies(counts)?;
    Ok(evaluate_frequencies(&freqs, options))
}

pub fn evaluate_frequencies(freqs: &PatternFrequencies, options: &SolverOptions) -> AeSolution {
    let moments = TrioMoments::from_frequencies(freqs);
    let quadratic = prevalence_quadratic(&moments);
    let mv_prevalence: Rational = DecisionPattern::ALL
        .iter()
        .filter(|p| p.majority() == Label::A)
        .map(|p| freqs.get(*p))
        .sum();

    let (roots, mut alarm, candidates) = solve_candidates(freqs, &moments, &quadratic, options.precision);

    if alarm.kind == AlarmKind::CleanRational && candidates.iter().any(|c| !c.in_range) {
        alarm = AlarmStatus::new(
            AlarmKind::OutOfRange,
            "rational roots but a candidate lies outside [0,1]^7: classifiers are error-correlated",
        );
    } else if alarm.kind == AlarmKind::IrrationalReal && candidates.iter().any(|c| !c.in_range) {
        alarm.detail.push_str("; candidates also fall outside [0,1]^7");
    }
    if candidates.iter().any(|c| c.exact && !c.residual.is_zero()) {
        alarm = AlarmStatus::new(AlarmKind::Degenerate, "exact candidate failed the forward-map substitution check");
    }

    let (selected, selection_ambiguous) = select(&candidates, options.policy, &mv_prevalence);
    AeSolution {
        moments,
        quadratic,
        roots,
        candidates,
        selected,
        selection_ambiguous,
        alarm,
        mv_prevalence: SerRational(mv_prevalence),
    }
}

fn solve_candidates(
    freqs: &PatternFrequencies,
    m: &TrioMoments,
    quadratic: &Quadratic,
    precision: u32,
) -> (Option<PrevalenceRoots>, AlarmStatus, Vec<Candidate>) {
    if let Some(reason) = vanishing_divisor(m) {
        if Pair::ALL.iter().all(|p| !m.delta(*p).is_zero()) {
            // Only the three-way moment vanishes: p_a = 1/2 is a double root.
            let roots = PrevalenceRoots::Rational { low: half(), high: half() };
            let (candidates, note) = half_prevalence_candidates(freqs, m, precision);
            let detail = format!("{reason}; {note}");
            return (Some(roots), AlarmStatus::new(AlarmKind::Degenerate, detail), candidates);
        }
        return (None, AlarmStatus::new(AlarmKind::Degenerate, reason), Vec::new());
    }

    let (roots, alarm) = solve_prevalence(quadratic, precision);
    let candidates = match &roots {
        None => Vec::new(),
        Some(PrevalenceRoots::Rational { low, high }) => [low, high]
            .into_iter()
            .map(|p| real_candidate(freqs, m, p, true, precision))
            .collect(),
        Some(PrevalenceRoots::Irrational { low, high }) => [low, high]
            .into_iter()
            .map(|p| real_candidate(freqs, m, p, false, precision))
            .collect(),
        Some(PrevalenceRoots::Complex { re, im }) => {
            [im.clone(), -im.clone()].into_iter().map(|im| complex_candidate(m, re, &im)).collect()
        }
    };
    (roots, alarm, candidates)
}

fn real_candidate(freqs: &PatternFrequencies, m: &TrioMoments, p_a: &Rational, exact: bool, precision: u32) -> Candidate {
    let mut acc = accuracies_given_prevalence(m, p_a).expect("non-degenerate moments");
    if !exact {
        acc = acc.map(|pair| pair.map(|x| exact::round_significant(&x, precision)));
    }
    let point = EvaluationPoint::new(p_a.clone(), acc);
    build_candidate(freqs, point, exact)
}

fn build_candidate(freqs: &PatternFrequencies, point: EvaluationPoint, exact: bool) -> Candidate {
    let model = generating_polynomials(&point);
    let residual = model
        .iter()
        .zip(freqs.as_array())
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Candidate { in_range: point.is_valid(), point, imaginary: None, exact, residual }
}

/// Accuracies are linear in the prevalence, so a complex root maps to
/// complex accuracies with real part at `re` and imaginary part scaled by
/// the slope.
fn complex_candidate(m: &TrioMoments, re: &Rational, im: &Rational) -> Candidate {
    let mut real: [[Rational; 2]; 3] = Default::default();
    let mut imag: [[Rational; 2]; 3] = Default::default();
    for slot in Slot::ALL {
        for label in Label::ALL {
            let eq = accuracy_equation(m, slot, label);
            real[slot.index()][label.index()] = eq.solve(re).expect("non-degenerate moments");
            imag[slot.index()][label.index()] = -(&eq.slope * im) / &eq.coefficient;
        }
    }
    Candidate {
        point: EvaluationPoint::new(re.clone(), real),
        imaginary: Some(EvaluationPoint::new(im.clone(), imag)),
        exact: false,
        in_range: false,
        residual: Rational::zero(),
    }
}

/// With `Δijk = 0` and all pair covariances non-zero, the only consistent
/// prevalence is 1/2. Then `Δij = u_i·u_j / 4` with `u = π_a + π_b − 1`, so
/// `u_c = ±2·sqrt(ΔijΔikΔjk) / Δ_opposite(c)`, and
/// `π_a = 1 − f_b + u/2`, `π_b = f_b + u/2`.
fn half_prevalence_candidates(freqs: &PatternFrequencies, m: &TrioMoments, precision: u32) -> (Vec<Candidate>, String) {
    let product = m.pair_product();
    if !product.is_positive() {
        return (Vec::new(), "no real accuracies at p_a = 1/2 (pair covariance product is negative)".into());
    }
    let (root, exact) = match exact::exact_sqrt(&product) {
        Some(r) => (r, true),
        None => (exact::sqrt_approx(&product, precision + 10), false),
    };
    let candidates = [Rational::one(), -Rational::one()]
        .into_iter()
        .map(|sign| {
            let acc = Slot::ALL.map(|slot| {
                let u = &sign * int(2) * &root / m.delta(Pair::opposite(slot));
                let f_b = m.f_b(slot);
                let pa = Rational::one() - f_b + &u / int(2);
                let pb = f_b + &u / int(2);
                if exact {
                    [pa, pb]
                } else {
                    [exact::round_significant(&pa, precision), exact::round_significant(&pb, precision)]
                }
            });
            build_candidate(freqs, EvaluationPoint::new(half(), acc), exact)
        })
        .collect();
    (candidates, "reporting the p_a = 1/2 branch checked against the forward map".into())
}

fn select(candidates: &[Candidate], policy: SelectionPolicy, mv_prevalence: &Rational) -> (Option<usize>, bool) {
    if candidates.is_empty() {
        return (None, false);
    }
    match policy {
        SelectionPolicy::Index(n) => (Some(n.min(candidates.len() - 1)), false),
        SelectionPolicy::LowPrevalence => {
            let tied = candidates.len() > 1 && candidates[0].point.p_a == candidates[1].point.p_a;
            (Some(0), tied)
        }
        SelectionPolicy::BetterThanRandom => {
            let score = |c: &Candidate| c.point.better_than_random();
            let distance = |c: &Candidate| (&c.point.p_a - mv_prevalence).abs();
            let mut best = 0;
            let mut ambiguous = false;
            for (i, c) in candidates.iter().enumerate().skip(1) {
                let current = &candidates[best];
                match score(c).cmp(&score(current)) {
                    std::cmp::Ordering::Greater => {
                        best = i;
                        ambiguous = false;
                    }
                    std::cmp::Ordering::Less => {}
                    std::cmp::Ordering::Equal => match distance(c).cmp(&distance(current)) {
                        std::cmp::Ordering::Less => {
                            best = i;
                            ambiguous = false;
                        }
                        std::cmp::Ordering::Greater => {}
                        // Candidates are sorted by prevalence, so keep the earlier one.
                        std::cmp::Ordering::Equal => ambiguous = true,
                    },
                }
            }
            (Some(best), ambiguous)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::forward::{pattern_frequencies, swap_transform};
    use crate::testdata::TABLE_OBSERVED;

    fn table_solution() -> AeSolution {
        evaluate(&PatternCounts::new(TABLE_OBSERVED), &SolverOptions::default()).unwrap()
    }

    fn round_trip_point() -> EvaluationPoint {
        EvaluationPoint::new(
            rat(3, 10),
            [[rat(7, 10), rat(8, 10)], [rat(6, 10), rat(7, 10)], [rat(8, 10), rat(9, 10)]],
        )
    }

    #[test]
    fn symmetric_quadratic() {
        let f = pattern_frequencies(&EvaluationPoint::uniform(half(), int(1), int(1))).unwrap();
        let q = prevalence_quadratic(&TrioMoments::from_frequencies(&f));
        assert_eq!(q.a, rat(1, 16));
        assert_eq!(q.b, rat(-1, 16));
        assert_eq!(q.c, rat(1, 64));
        let (roots, alarm) = solve_prevalence(&q, 50);
        assert_eq!(roots, Some(PrevalenceRoots::Rational { low: half(), high: half() }));
        assert_eq!(alarm.kind, AlarmKind::CleanRational);
    }

    #[test]
    fn quadratic_identities_on_survey_data() {
        let s = table_solution();
        let q = &s.quadratic;
        assert_eq!(q.b, -q.a.clone());
        assert_eq!(&q.a - int(4) * &q.c, s.moments.delta_trio() * s.moments.delta_trio());
        // Leading coefficient and constant of the survey quadratic.
        assert_eq!(q.a, rat(3190087950361, 160_000_000_000_000_000));
        assert_eq!(
            q.c,
            exact::parse("1612380721606215379/1000000000000000000000000").unwrap()
        );
    }

    #[test]
    fn survey_data_roots_and_alarm() {
        let s = table_solution();
        assert_eq!(s.alarm.kind, AlarmKind::IrrationalReal);
        match s.roots.as_ref().unwrap() {
            PrevalenceRoots::Irrational { low, high } => {
                assert!((exact::to_f64(low) - 0.0887452501).abs() < 1e-9);
                assert!((exact::to_f64(high) - 0.9112547499).abs() < 1e-9);
                assert!((low + high - int(1)).abs() < rat(1, 1_000_000_000_000));
            }
            other => panic!("unexpected roots {other:?}"),
        }
        assert_eq!(s.selected, Some(0));
        assert!(!s.selection_ambiguous);
        let chosen = s.selected_point().unwrap();
        assert!((exact::to_f64(&chosen.p_a) - 1776.0 / 20000.0).abs() < 1e-4);
        // Approximate solutions still reproduce the observations closely.
        for c in &s.candidates {
            assert!(c.residual < rat(1, 1_000_000_000_000_000_000));
        }
    }

    #[test]
    fn round_trip_exact() {
        let point = round_trip_point();
        let freqs = pattern_frequencies(&point).unwrap();
        let s = evaluate_frequencies(&freqs, &SolverOptions::default());
        assert_eq!(s.alarm.kind, AlarmKind::CleanRational);
        assert_eq!(s.roots, Some(PrevalenceRoots::Rational { low: rat(3, 10), high: rat(7, 10) }));
        assert_eq!(s.candidates[0].point, point);
        assert_eq!(s.candidates[1].point, swap_transform(&point));
        assert_eq!(s.selected_point(), Some(&point));
        let acc = accuracies_given_prevalence(&s.moments, &rat(3, 10)).unwrap();
        assert_eq!(acc, point.acc);
    }

    #[test]
    fn perfect_symmetric_case_is_degenerate() {
        let point = EvaluationPoint::uniform(half(), int(1), int(1));
        let freqs = pattern_frequencies(&point).unwrap();
        let s = evaluate_frequencies(&freqs, &SolverOptions::default());
        assert_eq!(s.alarm.kind, AlarmKind::Degenerate);
        assert!(s.alarm.detail.contains("Δijk"));
        assert_eq!(s.selected_point(), Some(&point));
        assert!(s.candidates.iter().all(|c| c.exact && c.residual.is_zero()));
        let m = &s.moments;
        assert!(accuracies_given_prevalence(m, &half()).is_err());
    }

    #[test]
    fn half_prevalence_with_rational_root() {
        let point = EvaluationPoint::new(
            half(),
            [[rat(9, 10), rat(7, 10)], [rat(3, 5), rat(4, 5)], [rat(7, 10), rat(9, 10)]],
        );
        let freqs = pattern_frequencies(&point).unwrap();
        let s = evaluate_frequencies(&freqs, &SolverOptions::default());
        assert_eq!(s.alarm.kind, AlarmKind::Degenerate);
        let found = s.candidates.iter().any(|c| c.point == point);
        let exact = s.candidates.iter().all(|c| c.exact);
        // The root may or may not be rational; either way the point must be
        // reproduced by the forward map.
        if exact {
            assert!(found);
        }
        assert!(s.candidates.iter().all(|c| c.residual < rat(1, 1_000_000_000)));
    }

    #[test]
    fn constant_classifier_is_degenerate() {
        let counts = PatternCounts::new([3, 0, 2, 1, 4, 0, 0, 0]);
        let s = evaluate(&counts, &SolverOptions::default()).unwrap();
        assert_eq!(s.alarm.kind, AlarmKind::Degenerate);
        assert!(s.alarm.detail.contains("Δik"));
        assert!(s.candidates.is_empty());
        assert_eq!(s.selected, None);
    }

    #[test]
    fn empty_counts_error() {
        assert!(matches!(
            evaluate(&PatternCounts::default(), &SolverOptions::default()),
            Err(Error::EmptyTest)
        ));
    }

    #[test]
    fn complex_roots_reported() {
        // Two pairs positively related, one negatively: the pair product is
        // negative and large enough to flip the sign of the leading coefficient.
        let counts = PatternCounts::new([30, 0, 0, 20, 0, 0, 20, 30]);
        let s = evaluate(&counts, &SolverOptions::default()).unwrap();
        let q = &s.quadratic;
        if q.a.is_negative() {
            assert_eq!(s.alarm.kind, AlarmKind::Complex);
            assert_eq!(s.candidates.len(), 2);
            assert!(s.candidates.iter().all(|c| c.imaginary.is_some()));
        } else {
            assert_ne!(s.alarm.kind, AlarmKind::CleanRational);
        }
    }

    #[test]
    fn out_of_range_rational() {
        // Out-of-range evaluation points still define exact frequencies when
        // the polynomials happen to stay non-negative; build one by hand.
        let point = EvaluationPoint::new(
            rat(3, 10),
            [[rat(11, 10), rat(8, 10)], [rat(6, 10), rat(7, 10)], [rat(8, 10), rat(9, 10)]],
        );
        let poly = generating_polynomials(&point);
        if poly.iter().all(|x| !x.is_negative()) {
            let freqs = PatternFrequencies::from_array_unchecked(poly);
            let s = evaluate_frequencies(&freqs, &SolverOptions::default());
            assert_eq!(s.alarm.kind, AlarmKind::OutOfRange);
            assert!(s.candidates.iter().any(|c| c.point == point));
        }
    }

    #[test]
    fn policies() {
        let point = round_trip_point();
        let freqs = pattern_frequencies(&point).unwrap();
        let low = evaluate_frequencies(&freqs, &SolverOptions { policy: SelectionPolicy::LowPrevalence, precision: 50 });
        assert_eq!(low.selected, Some(0));
        let idx = evaluate_frequencies(&freqs, &SolverOptions { policy: SelectionPolicy::Index(1), precision: 50 });
        assert_eq!(idx.selected_point(), Some(&swap_transform(&point)));
        assert_eq!("index:1".parse::<SelectionPolicy>().unwrap(), SelectionPolicy::Index(1));
        assert_eq!("low-prevalence".parse::<SelectionPolicy>().unwrap(), SelectionPolicy::LowPrevalence);
        assert!("index:2".parse::<SelectionPolicy>().is_err());
        assert!("median".parse::<SelectionPolicy>().is_err());
    }

    #[test]
    fn better_than_random_prefers_competent_point() {
        // A high-prevalence point with good classifiers: the conjugate has
        // low prevalence and bad classifiers.
        let point = EvaluationPoint::new(
            rat(4, 5),
            [[rat(3, 4), rat(2, 3)], [rat(7, 10), rat(3, 5)], [rat(9, 10), rat(4, 5)]],
        );
        let freqs = pattern_frequencies(&point).unwrap();
        let s = evaluate_frequencies(&freqs, &SolverOptions::default());
        assert_eq!(s.selected, Some(1));
        assert_eq!(s.selected_point(), Some(&point));
    }

    #[test]
    fn solution_json_round_trip() {
        let s = table_solution();
        let text = serde_json::to_string(&s).unwrap();
        let back: AeSolution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
