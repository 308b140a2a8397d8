//! By-true-label partition estimates, group labeling decisions, error
//! accounting against ground truth, and comparison of the three ways of
//! partitioning (ground truth, algebraic evaluation, majority voting).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::forward::expected_partition;
use crate::majority::{mv_decide, mv_evaluate, mv_partition};
use crate::model::{
    frequencies, project, ByTrueLabelCounts, DecisionPattern, EvaluationEstimate, EvaluationPoint,
    Label, OptRational, PatternCounts, Slot,
};
use crate::solver::{evaluate, AeSolution, AlarmStatus, SolverOptions};
use crate::stats::{ground_truth_evaluation, CorrelationReport};

/// Model partition of the observed counts at an evaluation point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionEstimate {
    pub partition: ByTrueLabelCounts,
    pub observed: PatternCounts,
    /// The point had coordinates outside `[0, 1]` that were clamped first.
    pub clamped: bool,
}

/// Expected by-label counts of a test of the observed size at `point`.
/// Out-of-range coordinates are clamped and flagged.
pub fn estimate_partition(point: &EvaluationPoint, counts: &PatternCounts) -> Result<PartitionEstimate> {
    let (point, clamped) = point.clamped();
    let partition = expected_partition(&point, counts.q())?;
    Ok(PartitionEstimate { partition, observed: counts.clone(), clamped })
}

/// Label with the larger partition mass; ties go to the majority vote.
pub fn decide(partition: &ByTrueLabelCounts, pattern: DecisionPattern) -> Label {
    let a = partition.get(Label::A, pattern);
    let b = partition.get(Label::B, pattern);
    match a.cmp(b) {
        std::cmp::Ordering::Greater => Label::A,
        std::cmp::Ordering::Less => Label::B,
        std::cmp::Ordering::Equal => mv_decide(pattern),
    }
}

/// Errors a decision rule makes against a partition, split by the majority
/// label of the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCount {
    pub total: u64,
    pub majority_a_rows: u64,
    pub majority_b_rows: u64,
}

/// Sum over patterns of the ground-truth count of the label not chosen.
pub fn count_errors(decider: impl Fn(DecisionPattern) -> Label, ground_truth: &ByTrueLabelCounts) -> Result<ErrorCount> {
    let cells = ground_truth.integer_cells()?;
    let mut out = ErrorCount { total: 0, majority_a_rows: 0, majority_b_rows: 0 };
    for p in DecisionPattern::ALL {
        let wrong = cells[decider(p).other() as usize][p.index()];
        out.total += wrong;
        match p.majority() {
            Label::A => out.majority_a_rows += wrong,
            Label::B => out.majority_b_rows += wrong,
        }
    }
    Ok(out)
}

/// A method's own estimate of its labeling errors: the mass it places on the
/// label it does not choose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatedErrors {
    #[serde(with = "exact::serde_rational")]
    pub total: Rational,
    #[serde(with = "exact::serde_rational")]
    pub majority_a_rows: Rational,
    #[serde(with = "exact::serde_rational")]
    pub majority_b_rows: Rational,
}

pub fn estimated_errors(partition: &ByTrueLabelCounts) -> EstimatedErrors {
    let mut out = EstimatedErrors {
        total: Rational::zero(),
        majority_a_rows: Rational::zero(),
        majority_b_rows: Rational::zero(),
    };
    for p in DecisionPattern::ALL {
        let wrong = partition.get(decide(partition, p).other(), p);
        out.total += wrong;
        match p.majority() {
            Label::A => out.majority_a_rows += wrong,
            Label::B => out.majority_b_rows += wrong,
        }
    }
    out
}

/// Integer display of a partition: round half away from zero, then move
/// any discrepancy with the observed count onto the larger cell of the row.
pub fn rounded_partition(partition: &ByTrueLabelCounts, observed: &PatternCounts) -> [[i64; 2]; 8] {
    DecisionPattern::ALL.map(|p| {
        let a = exact::round_half_away(partition.get(Label::A, p));
        let b = exact::round_half_away(partition.get(Label::B, p));
        let gap = BigInt::from(observed.get(p)) - (&a + &b);
        let (a, b) = if a >= b { (a + gap, b) } else { (a, b + gap) };
        [a.to_i64().unwrap_or(i64::MAX), b.to_i64().unwrap_or(i64::MAX)]
    })
}

/// All `C(N, 3)` trios of the ids, ids sorted lexicographically.
pub fn enumerate_trios(classifier_ids: &[String]) -> Result<Vec<[String; 3]>> {
    let ids: Vec<&String> = classifier_ids.iter().sorted().dedup().collect();
    if ids.len() < 3 {
        return Err(Error::Config(format!("need at least 3 distinct classifiers, got {}", ids.len())));
    }
    Ok(ids
        .into_iter()
        .combinations(3)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ae,
    Mv,
    Gt,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ae" => Ok(Method::Ae),
            "mv" => Ok(Method::Mv),
            "gt" => Ok(Method::Gt),
            other => Err(Error::Config(format!("unknown method {other:?} (expected ae, mv or gt)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ae => "ae",
            Method::Mv => "mv",
            Method::Gt => "gt",
        })
    }
}

/// `|estimate − truth|` per coordinate; undefined where either side is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub p_a: OptRational,
    pub acc: [[OptRational; 2]; 3],
}

impl Deviation {
    pub fn between(estimate: &EvaluationEstimate, truth: &EvaluationEstimate) -> Deviation {
        let acc = Slot::ALL.map(|slot| {
            Label::ALL.map(|label| {
                OptRational(match (estimate.accuracy(slot, label), truth.accuracy(slot, label)) {
                    (Some(x), Some(y)) => Some((x - y).abs()),
                    _ => None,
                })
            })
        });
        Deviation { p_a: OptRational(Some((&estimate.p_a - &truth.p_a).abs())), acc }
    }

    /// Mean absolute error over the defined accuracies.
    pub fn mean_accuracy_error(&self) -> Option<f64> {
        let defined: Vec<f64> = self.acc.iter().flatten().filter_map(|x| x.0.as_ref()).map(exact::to_f64).collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodErrors {
    pub gt: ErrorCount,
    pub ae: Option<ErrorCount>,
    pub mv: ErrorCount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthComparison {
    pub partition: ByTrueLabelCounts,
    pub evaluation: EvaluationEstimate,
    pub errors: MethodErrors,
    pub ae_deviation: Option<Deviation>,
    pub mv_deviation: Deviation,
    pub correlations: CorrelationReport,
}

/// Everything known about one trio: the algebraic solution, the
/// majority-vote baseline and, when available, the ground truth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub trio: Option<[String; 3]>,
    pub observed: PatternCounts,
    pub alarm: AlarmStatus,
    pub ae: AeSolution,
    pub ae_partition: Option<PartitionEstimate>,
    pub ae_estimated_errors: Option<EstimatedErrors>,
    pub mv_evaluation: EvaluationEstimate,
    pub mv_partition: ByTrueLabelCounts,
    pub truth: Option<TruthComparison>,
}

impl ComparisonReport {
    pub fn ae_point(&self) -> Option<&EvaluationPoint> {
        self.ae.selected_point()
    }

    /// The partition a method decides with.
    pub fn partition(&self, method: Method) -> Option<&ByTrueLabelCounts> {
        match method {
            Method::Ae => self.ae_partition.as_ref().map(|p| &p.partition),
            Method::Mv => Some(&self.mv_partition),
            Method::Gt => self.truth.as_ref().map(|t| &t.partition),
        }
    }
}

/// Evaluate a trio from observed counts, comparing with ground truth when given.
pub fn evaluate_trio(
    counts: &PatternCounts,
    ground_truth: Option<&ByTrueLabelCounts>,
    options: &SolverOptions,
) -> Result<ComparisonReport> {
    let ae = evaluate(counts, options)?;
    let ae_partition = ae.selected_point().map(|p| estimate_partition(p, counts)).transpose()?;
    let ae_estimated_errors = ae_partition.as_ref().map(|p| estimated_errors(&p.partition));
    let mv_evaluation = mv_evaluate(&frequencies(counts)?);
    let mv_partition = mv_partition(counts);

    let truth = match ground_truth {
        None => None,
        Some(gt) => {
            if &project(gt)? != counts {
                return Err(Error::NotGroundTruth("by-label counts do not project onto the observed counts".into()));
            }
            let evaluation = ground_truth_evaluation(gt)?;
            let errors = MethodErrors {
                gt: count_errors(|p| decide(gt, p), gt)?,
                ae: ae_partition.as_ref().map(|est| count_errors(|p| decide(&est.partition, p), gt)).transpose()?,
                mv: count_errors(mv_decide, gt)?,
            };
            let ae_deviation = ae.selected_point().map(|p| Deviation::between(&estimate_from_point(p), &evaluation));
            let mv_deviation = Deviation::between(&mv_evaluation, &evaluation);
            Some(TruthComparison {
                partition: gt.clone(),
                evaluation,
                errors,
                ae_deviation,
                mv_deviation,
                correlations: CorrelationReport::measure(gt),
            })
        }
    };

    Ok(ComparisonReport {
        trio: None,
        observed: counts.clone(),
        alarm: ae.alarm.clone(),
        ae,
        ae_partition,
        ae_estimated_errors,
        mv_evaluation,
        mv_partition,
        truth,
    })
}

/// Full comparison of AE and MV against integer ground truth.
pub fn compare_methods(ground_truth: &ByTrueLabelCounts, options: &SolverOptions) -> Result<ComparisonReport> {
    let counts = project(ground_truth)?;
    evaluate_trio(&counts, Some(ground_truth), options)
}

fn estimate_from_point(point: &EvaluationPoint) -> EvaluationEstimate {
    EvaluationEstimate {
        p_a: point.p_a.clone(),
        acc: point.acc.clone().map(|pair| pair.map(|x| OptRational(Some(x)))),
    }
}

/// Extension beyond per-trio reporting: mean AE accuracy of each classifier
/// over every trio it appears in, as `[π_a, π_b]`.
pub fn mean_accuracy_by_classifier(reports: &[ComparisonReport]) -> BTreeMap<String, [f64; 2]> {
    let mut sums: BTreeMap<String, ([f64; 2], usize)> = BTreeMap::new();
    for report in reports {
        let (Some(trio), Some(point)) = (&report.trio, report.ae_point()) else { continue };
        for slot in Slot::ALL {
            let entry = sums.entry(trio[slot.index()].clone()).or_insert(([0.0; 2], 0));
            for label in Label::ALL {
                entry.0[label as usize] += exact::to_f64(point.accuracy(slot, label));
            }
            entry.1 += 1;
        }
    }
    sums.into_iter().map(|(id, (s, n))| (id, s.map(|x| x / n as f64))).collect()
}
