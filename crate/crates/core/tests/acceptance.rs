//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its verdict line whether it passes or not; exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use algeval::decision::{count_errors, decide, estimate_partition, rounded_partition, Deviation};
use algeval::exact::{self, int, rat, Rational};
use algeval::forward::{expected_partition, pattern_frequencies, swap_transform};
use algeval::majority::{mv_decide, mv_evaluate, mv_partition};
use algeval::moments::TrioMoments;
use algeval::solver::{evaluate, evaluate_frequencies, AlarmKind, PrevalenceRoots};
use algeval::stats::ground_truth_evaluation;
use algeval::synth::{sample_correlated, sample_independent, sample_records, CorrelationSpec, Ensemble};
use algeval::{
    aggregate, frequencies, project, ByTrueLabelCounts, DecisionPattern, EvaluationEstimate, EvaluationPoint, Label,
    PatternCounts, SolverOptions,
};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const OBSERVED: [u64; 8] = [568, 553, 649, 1813, 3534, 3607, 1068, 8208];
const ACTUAL_A: [u64; 8] = [424, 168, 283, 415, 252, 194, 129, 135];
const ACTUAL_B: [u64; 8] = [144, 385, 366, 1398, 3282, 3413, 939, 8073];
const PUBLISHED_AE: [(i64, i64); 8] =
    [(399, 169), (133, 420), (253, 396), (416, 1397), (264, 3270), (139, 3468), (84, 984), (88, 8120)];

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn timed(n: u32, limit: Duration, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = body();
    let elapsed = start.elapsed();
    let within = elapsed < limit;
    let ok = v.ok && within;
    println!(
        "criterion {n}: {} ({}; {:.2?} of {:?} allowed{})",
        if ok { "PASS" } else { "FAIL" },
        v.detail,
        elapsed,
        limit,
        if within { "" } else { ", too slow" }
    );
    ok
}

// ---------------------------------------------------------------------------

fn survey_golden() -> Verdict {
    let counts = PatternCounts::new(OBSERVED);
    let solution = evaluate(&counts, &SolverOptions::default()).unwrap();
    let Some(point) = solution.selected_point() else { return verdict(false, "no candidate selected") };
    let est = estimate_partition(point, &counts).unwrap();
    let rounded = rounded_partition(&est.partition, &counts);
    let cells_ok = rounded
        .iter()
        .zip(PUBLISHED_AE)
        .all(|(row, (a, b))| (row[0] - a).abs() <= 1 && (row[1] - b).abs() <= 1);
    let p = exact::to_f64(&point.p_a);
    let (low, high) = match &solution.roots {
        Some(PrevalenceRoots::Irrational { low, high } | PrevalenceRoots::Rational { low, high }) => {
            (exact::to_f64(low), exact::to_f64(high))
        }
        _ => return verdict(false, "expected real prevalence roots"),
    };
    let other = solution.candidates.iter().enumerate().find(|(i, _)| Some(*i) != solution.selected);
    let conjugate_ok = other.is_some_and(|(_, c)| (exact::to_f64(&c.point.p_a) - 0.9112).abs() < 5e-4);
    let ok = cells_ok && (p - 0.0888).abs() < 5e-4 && (high - 0.9112).abs() < 5e-4 && conjugate_ok;
    verdict(
        ok,
        format!(
            "AE cells within ±1: {cells_ok}; selected p_a {p:.10}, roots {low:.10}/{high:.10}, alarm {}",
            solution.alarm.kind
        ),
    )
}

fn survey_majority() -> Verdict {
    let gt = ByTrueLabelCounts::from_integers(ACTUAL_A, ACTUAL_B);
    let counts = PatternCounts::new(OBSERVED);
    let mv = mv_partition(&counts);
    let mv_ok = DecisionPattern::ALL.iter().all(|p| {
        let n = int(counts.get(*p) as i64);
        let (maj, min) = (mv.get(p.majority(), *p), mv.get(p.majority().other(), *p));
        *maj == n && min.is_zero()
    });
    let mv_err = count_errors(mv_decide, &gt).unwrap();
    let gt_err = count_errors(|p| decide(&gt, p), &gt).unwrap();
    let ok = mv_ok
        && (mv_err.total, mv_err.majority_a_rows, mv_err.majority_b_rows) == (3003, 2293, 710)
        && (gt_err.total, gt_err.majority_a_rows, gt_err.majority_b_rows) == (1720, 1010, 710);
    verdict(
        ok,
        format!(
            "MV partition exact: {mv_ok}; MV errors {} + {} = {}; GT errors {} + {} = {}",
            mv_err.majority_a_rows,
            mv_err.majority_b_rows,
            mv_err.total,
            gt_err.majority_a_rows,
            gt_err.majority_b_rows,
            gt_err.total
        ),
    )
}

fn random_unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let d: i64 = rng.random_range(10..=97);
    let n = rng.random_range((d + 9) / 10..=(9 * d) / 10);
    rat(n, d)
}

fn random_point(rng: &mut ChaCha8Rng) -> EvaluationPoint {
    let p_a = random_unit_rational(rng);
    let acc = [(); 3].map(|_| [random_unit_rational(rng), random_unit_rational(rng)]);
    EvaluationPoint::new(p_a, acc)
}

struct RoundTrip {
    runs: usize,
    failures: Vec<String>,
    square_discriminants: usize,
}

/// Exact frequencies of random rational points must solve back to the point.
fn round_trips(target: usize) -> RoundTrip {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut points = Vec::new();
    while points.len() < target {
        let point = random_point(&mut rng);
        let m = TrioMoments::from_frequencies(&pattern_frequencies(&point).unwrap());
        // Coin-flip classifiers (π_a + π_b = 1) or p_a = 1/2 zero the moments.
        if m.pair_product().is_zero() || m.delta_trio().is_zero() {
            continue;
        }
        points.push(point);
    }
    let results: Vec<(Option<String>, bool)> = points
        .par_iter()
        .map(|point| {
            let freqs = pattern_frequencies(point).unwrap();
            let solution = evaluate_frequencies(&freqs, &SolverOptions::default());
            let square = exact::exact_sqrt(&solution.quadratic.discriminant()).is_some();
            let fail = |why: &str| Some(format!("{point}: {why}"));
            let problem = if solution.alarm.kind != AlarmKind::CleanRational {
                fail(&format!("alarm {}", solution.alarm.kind))
            } else if !solution.candidates.iter().any(|c| &c.point == point) {
                fail("generating point not among candidates")
            } else if solution.candidates.len() != 2
                || swap_transform(&solution.candidates[0].point) != solution.candidates[1].point
            {
                fail("candidates are not swap conjugates")
            } else {
                None
            };
            (problem, square)
        })
        .collect();
    RoundTrip {
        runs: results.len(),
        square_discriminants: results.iter().filter(|r| r.1).count(),
        failures: results.into_iter().filter_map(|r| r.0).collect(),
    }
}

fn criterion_round_trip(rt: &RoundTrip) -> Verdict {
    let detail = match rt.failures.first() {
        None => format!("{} exact round trips, all clean_rational with conjugate candidates", rt.runs),
        Some(first) => format!("{} of {} failed, first: {first}", rt.failures.len(), rt.runs),
    };
    verdict(rt.failures.is_empty() && rt.runs >= 500, detail)
}

fn criterion_alarm(rt: &RoundTrip) -> Verdict {
    const TRIALS: u64 = 1000;
    let outcomes: Vec<AlarmKind> = (0..TRIALS)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + trial);
            let p_a = rng.random_range(0.1..0.9);
            let acc = [(); 3].map(|_| [rng.random_range(0.55..0.9), rng.random_range(0.55..0.9)]);
            let point = EvaluationPoint::new(
                exact::round_significant(&float(p_a), 6),
                acc.map(|pair| pair.map(|x| exact::round_significant(&float(x), 6))),
            );
            let rho = rng.random_range(0.2..=0.8);
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let pair = pairs[rng.random_range(0..3)];
            let spec = CorrelationSpec::shared(&[pair], rho).unwrap();
            let gt = sample_correlated(&point, 20_000, &spec, trial).unwrap();
            evaluate(&project(&gt).unwrap(), &SolverOptions::default()).unwrap().alarm.kind
        })
        .collect();
    let fired = outcomes.iter().filter(|k| k.is_independence_alarm()).count();
    let rate = fired as f64 / TRIALS as f64;
    let all_square = rt.square_discriminants == rt.runs;
    verdict(
        all_square && rate >= 0.9,
        format!(
            "square discriminant in {}/{} exact runs; alarm in {fired}/{TRIALS} correlated trials ({:.1}%)",
            rt.square_discriminants,
            rt.runs,
            100.0 * rate
        ),
    )
}

fn float(x: f64) -> Rational {
    Rational::from_float(x).expect("finite")
}

fn criterion_mv_oracle() -> Verdict {
    const DATASETS: u64 = 120;
    let ids: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let trio: [String; 3] = ["x", "y", "z"].map(String::from);
    let mismatches: Vec<u64> = (0..DATASETS)
        .into_par_iter()
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ensemble = Ensemble::new(
                rng.random_range(0.05..0.95),
                (0..3).map(|_| [rng.random_range(0.3..1.0), rng.random_range(0.3..1.0)]).collect(),
            )
            .unwrap();
            let q = rng.random_range(1..3000);
            let records = sample_records(&ensemble, &ids, q, &CorrelationSpec::independent(), seed).unwrap();

            // Per-item grading against the majority key.
            let mut key_count = [0i64; 2];
            let mut agree = [[0i64; 2]; 3];
            for r in &records {
                let votes = ids.iter().filter(|id| r.decisions[*id] == Label::A).count();
                let key = if votes >= 2 { Label::A } else { Label::B };
                key_count[key.index()] += 1;
                for (c, id) in ids.iter().enumerate() {
                    if r.decisions[id] == key {
                        agree[c][key.index()] += 1;
                    }
                }
            }
            let brute = EvaluationEstimate {
                p_a: rat(key_count[0], q as i64),
                acc: agree.map(|row| {
                    [0, 1].map(|l| algeval::model::OptRational((key_count[l] > 0).then(|| rat(row[l], key_count[l]))))
                }),
            };
            let counts = aggregate(&records, &trio).unwrap().counts;
            mv_evaluate(&frequencies(&counts).unwrap()) != brute
        })
        .collect();
    verdict(
        mismatches.is_empty(),
        format!("{} of {DATASETS} per-item datasets differ from brute-force grading", mismatches.len()),
    )
}

/// Heterogeneous accuracies in [0.45, 0.93]; majority voting is not the
/// optimal decision rule at skewed prevalence.
const DECISION_ACCURACIES: [[f64; 2]; 3] = [[0.55, 0.92], [0.92, 0.55], [0.65, 0.80]];
const DECISION_PREVALENCES: [f64; 4] = [0.1, 0.4, 0.6, 0.9];
const DECISION_SEEDS: u64 = 200;

struct DecisionTrial {
    errors: [u64; 3],
    ae_mae: Option<f64>,
    mv_mae: Option<f64>,
}

fn decision_trials(p_a: f64) -> Vec<DecisionTrial> {
    let point = EvaluationPoint::new(float(p_a), DECISION_ACCURACIES.map(|pair| pair.map(float)));
    (0..DECISION_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let gt = sample_independent(&point, 20_000, seed).unwrap();
            let counts = project(&gt).unwrap();
            let solution = evaluate(&counts, &SolverOptions::default()).unwrap();
            let truth = ground_truth_evaluation(&gt).unwrap();
            let gt_errors = count_errors(|p| decide(&gt, p), &gt).unwrap().total;
            let mv_errors = count_errors(mv_decide, &gt).unwrap().total;
            let (ae_errors, ae_mae) = match solution.selected_point() {
                Some(point) => {
                    let part = estimate_partition(point, &counts).unwrap().partition;
                    let estimate = EvaluationEstimate {
                        p_a: point.p_a.clone(),
                        acc: point.acc.clone().map(|pair| pair.map(|x| algeval::model::OptRational(Some(x)))),
                    };
                    (
                        count_errors(|p| decide(&part, p), &gt).unwrap().total,
                        Deviation::between(&estimate, &truth).mean_accuracy_error(),
                    )
                }
                None => (mv_errors, None),
            };
            let mv = mv_evaluate(&frequencies(&counts).unwrap());
            DecisionTrial {
                errors: [gt_errors, ae_errors, mv_errors],
                ae_mae,
                mv_mae: Deviation::between(&mv, &truth).mean_accuracy_error(),
            }
        })
        .collect()
}

fn median(mut xs: Vec<u64>) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0
    }
}

fn criterion_decisions(runs: &[(f64, Vec<DecisionTrial>)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p_a, trials) in runs {
        let med = [0, 1, 2].map(|m| median(trials.iter().map(|t| t.errors[m]).collect()));
        let ordered = med[0] <= med[1] && med[1] <= med[2];
        let ratio = med[1] / med[2];
        let ratio_ok = *p_a != 0.1 || ratio < 0.8;
        ok &= ordered && ratio_ok;
        parts.push(format!("p_a {p_a}: GT {} AE {} MV {} (AE/MV {ratio:.3})", med[0], med[1], med[2]));
    }
    verdict(ok, format!("median errors over {DECISION_SEEDS} seeds: {}", parts.join("; ")))
}

fn criterion_accuracy(runs: &[(f64, Vec<DecisionTrial>)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p_a, trials) in runs.iter().filter(|(p, _)| *p == 0.1 || *p == 0.9) {
        let wins = trials
            .iter()
            .filter(|t| match (t.ae_mae, t.mv_mae) {
                (Some(ae), Some(mv)) => ae < mv,
                (Some(_), None) => true,
                _ => false,
            })
            .count();
        let share = wins as f64 / trials.len() as f64;
        let mean = |f: fn(&DecisionTrial) -> Option<f64>| {
            let v: Vec<f64> = trials.iter().filter_map(f).collect();
            v.iter().sum::<f64>() / v.len().max(1) as f64
        };
        ok &= share >= 0.95;
        parts.push(format!(
            "p_a {p_a}: AE better in {wins}/{} (mean MAE AE {:.4}, MV {:.4})",
            trials.len(),
            mean(|t| t.ae_mae),
            mean(|t| t.mv_mae)
        ));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for _ in 0..200 {
        let point = random_point(&mut rng);
        let freqs = pattern_frequencies(&point).unwrap();
        if freqs.sum() != Rational::one() {
            return verdict(false, format!("frequencies of {point} sum to {}", freqs.sum()));
        }
        let q: u64 = rng.random_range(1..100_000);
        let part = expected_partition(&point, q).unwrap();
        if part.total() != int(q as i64) || part.label_total(Label::A) != &point.p_a * int(q as i64) {
            return verdict(false, format!("expected partition of {point} does not conserve q = {q}"));
        }

        // Integer counts: scaled copies have identical moments; every
        // partition repairs onto the observed counts.
        let counts = PatternCounts::new([(); 8].map(|_| rng.random_range(0..5000u64)));
        if counts.q() == 0 {
            continue;
        }
        let base = TrioMoments::from_frequencies(&frequencies(&counts).unwrap());
        let k = rng.random_range(2..50u64);
        if TrioMoments::from_frequencies(&frequencies(&counts.scaled(k)).unwrap()) != base {
            return verdict(false, format!("moments change when {counts:?} is scaled by {k}"));
        }
        if project(&mv_partition(&counts)).unwrap() != counts {
            return verdict(false, "MV partition does not project onto observed counts");
        }
        let solution = evaluate(&counts, &SolverOptions::default()).unwrap();
        if let Some(p) = solution.selected_point() {
            let est = estimate_partition(p, &counts).unwrap();
            let rounded = rounded_partition(&est.partition, &counts);
            if DecisionPattern::ALL.iter().any(|pat| rounded[pat.index()].iter().sum::<i64>() != counts.get(*pat) as i64) {
                return verdict(false, "rounded AE partition rows do not sum to observed counts");
            }
            if est.partition.total() != int(counts.q() as i64) && !est.clamped {
                return verdict(false, "AE partition does not conserve q");
            }
        }
        // Exact model counts (tenths, q = 10^7): the AE partition projects
        // onto the observed counts with no rounding at all.
        let tenth = |rng: &mut ChaCha8Rng| rat(rng.random_range(1..=9), 10);
        let model = EvaluationPoint::new(tenth(&mut rng), [(); 3].map(|_| [tenth(&mut rng), tenth(&mut rng)]));
        let m = TrioMoments::from_frequencies(&pattern_frequencies(&model).unwrap());
        if !m.pair_product().is_zero() && !m.delta_trio().is_zero() {
            let exact_counts = project(&expected_partition(&model, 10_000_000).unwrap()).unwrap();
            let solution = evaluate(&exact_counts, &SolverOptions::default()).unwrap();
            let Some(p) = solution.selected_point() else { return verdict(false, format!("{model}: nothing selected")) };
            let est = estimate_partition(p, &exact_counts).unwrap();
            if project(&est.partition).unwrap() != exact_counts {
                return verdict(false, format!("{model}: AE partition does not reproduce the counts"));
            }
        }
        checked += 1;
    }
    verdict(true, format!("{checked} random cases: Σf = 1, partitions conserve counts, moments scale-invariant"))
}

fn main() {
    let mut all = true;
    all &= timed(1, Duration::from_secs(1), survey_golden);
    all &= timed(2, Duration::from_secs(1), survey_majority);

    let mut rt = None;
    all &= timed(3, Duration::from_secs(30), || {
        let r = round_trips(500);
        let v = criterion_round_trip(&r);
        rt = Some(r);
        v
    });
    let rt = rt.expect("criterion 3 ran");
    all &= timed(4, Duration::from_secs(120), || criterion_alarm(&rt));
    all &= timed(5, Duration::from_secs(30), criterion_mv_oracle);

    let mut runs = Vec::new();
    all &= timed(6, Duration::from_secs(300), || {
        runs = DECISION_PREVALENCES.iter().map(|&p| (p, decision_trials(p))).collect();
        criterion_decisions(&runs)
    });
    all &= timed(7, Duration::from_secs(300), || criterion_accuracy(&runs));
    all &= timed(8, Duration::from_secs(5), criterion_conservation);

    if !all {
        std::process::exit(1);
    }
}
