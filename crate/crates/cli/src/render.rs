//! Plain-text tables for terminal output.

use std::fmt::Write;

use algeval::decision::{rounded_partition, ErrorCount};
use algeval::exact::{self, Rational};
use algeval::solver::PrevalenceRoots;
use algeval::{ByTrueLabelCounts, ComparisonReport, DecisionPattern, EvaluationEstimate, EvaluationPoint, Label, Pair, Slot};

fn dec(x: &Rational) -> String {
    format!("{:.4}", exact::to_f64(x))
}

fn opt(x: Option<&Rational>) -> String {
    x.map(dec).unwrap_or_else(|| "undef".into())
}

fn point_row(out: &mut String, name: &str, p_a: &Rational, acc: impl Fn(Slot, Label) -> String) {
    let _ = write!(out, "  {name:<18}{:>8}", dec(p_a));
    for slot in Slot::ALL {
        for label in Label::ALL {
            let _ = write!(out, "{:>8}", acc(slot, label));
        }
    }
    out.push('\n');
}

fn estimate_row(out: &mut String, name: &str, e: &EvaluationEstimate) {
    point_row(out, name, &e.p_a, |s, l| opt(e.accuracy(s, l)));
}

fn candidate_row(out: &mut String, name: &str, p: &EvaluationPoint) {
    point_row(out, name, &p.p_a, |s, l| dec(p.accuracy(s, l)));
}

fn roots_line(roots: &Option<PrevalenceRoots>) -> String {
    match roots {
        None => "none".into(),
        Some(PrevalenceRoots::Rational { low, high }) => {
            format!("{} and {} (rational: {} and {})", dec(low), dec(high), exact::format(low), exact::format(high))
        }
        Some(PrevalenceRoots::Irrational { low, high }) => format!(
            "{:.10} and {:.10} (irrational)",
            exact::to_f64(low),
            exact::to_f64(high)
        ),
        Some(PrevalenceRoots::Complex { re, im }) => {
            format!("{:.10} ± {:.10}i (complex)", exact::to_f64(re), exact::to_f64(im))
        }
    }
}

fn errors(e: &ErrorCount) -> String {
    format!("{} + {} = {}", e.majority_a_rows, e.majority_b_rows, e.total)
}

fn integer_rows(part: &ByTrueLabelCounts) -> [[String; 2]; 8] {
    DecisionPattern::ALL.map(|p| Label::ALL.map(|l| exact::round_half_away(part.get(l, p)).to_string()))
}

pub fn trio_names(trio: &Option<[String; 3]>) -> String {
    match trio {
        Some(t) => t.join(", "),
        None => "i, j, k".into(),
    }
}

/// The full evaluation block for one trio.
pub fn comparison(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== trio ({})  q = {} ==", trio_names(&report.trio), report.observed.q());
    let _ = writeln!(
        out,
        "alarm: {} (exit {}): {}",
        report.alarm.kind,
        report.alarm.kind.exit_code(),
        report.alarm.detail
    );
    let _ = writeln!(out, "prevalence roots: {}", roots_line(&report.ae.roots));
    out.push('\n');

    let _ = write!(out, "  {:<18}{:>8}", "estimate", "p_a");
    for slot in Slot::ALL {
        for label in Label::ALL {
            let _ = write!(out, "{:>8}", format!("{}:{}", slot.name(), label));
        }
    }
    out.push('\n');
    for (idx, c) in report.ae.candidates.iter().enumerate() {
        let mut name = format!("AE #{idx}");
        if report.ae.selected == Some(idx) {
            name.push_str(" selected");
        }
        if c.imaginary.is_some() {
            name.push_str(" (re)");
        }
        candidate_row(&mut out, &name, &c.point);
    }
    estimate_row(&mut out, "MV", &report.mv_evaluation);
    if let Some(truth) = &report.truth {
        estimate_row(&mut out, "GT", &truth.evaluation);
    }
    if report.ae.selection_ambiguous {
        out.push_str("  (selection ambiguous under the policy)\n");
    }
    out.push('\n');

    let gt = report.truth.as_ref().map(|t| integer_rows(&t.partition));
    let ae = report.ae_partition.as_ref().map(|p| rounded_partition(&p.partition, &report.observed));
    let mv = integer_rows(&report.mv_partition);
    let _ = write!(out, "  {:<10}{:>9}", "pattern", "observed");
    if gt.is_some() {
        let _ = write!(out, " |{:>7}{:>7}", "GT a", "GT b");
    }
    if ae.is_some() {
        let _ = write!(out, " |{:>7}{:>7}", "AE a", "AE b");
    }
    let _ = writeln!(out, " |{:>7}{:>7}", "MV a", "MV b");
    for p in DecisionPattern::ALL {
        let i = p.index();
        let _ = write!(out, "  {:<10}{:>9}", p.key(), report.observed.get(p));
        if let Some(gt) = &gt {
            let _ = write!(out, " |{:>7}{:>7}", gt[i][0], gt[i][1]);
        }
        if let Some(ae) = &ae {
            let _ = write!(out, " |{:>7}{:>7}", ae[i][0], ae[i][1]);
        }
        let _ = writeln!(out, " |{:>7}{:>7}", mv[i][0], mv[i][1]);
    }
    if report.ae_partition.as_ref().is_some_and(|p| p.clamped) {
        out.push_str("  (AE accuracies clamped to [0, 1] before partitioning)\n");
    }
    out.push('\n');

    if let Some(est) = &report.ae_estimated_errors {
        let _ = writeln!(
            out,
            "AE estimate of its labeling errors (majority a + majority b): {:.1} + {:.1}",
            exact::to_f64(&est.majority_a_rows),
            exact::to_f64(&est.majority_b_rows)
        );
    }
    if let Some(truth) = &report.truth {
        let e = &truth.errors;
        let _ = writeln!(out, "labeling errors (majority a + majority b):");
        let _ = writeln!(out, "  GT {}", errors(&e.gt));
        if let Some(ae) = &e.ae {
            let _ = writeln!(out, "  AE {}", errors(ae));
        }
        let _ = writeln!(out, "  MV {}", errors(&e.mv));
        let mae = |d: Option<f64>| d.map(|x| format!("{x:.4}")).unwrap_or_else(|| "undef".into());
        let _ = writeln!(
            out,
            "mean |accuracy error|: AE {}  MV {}",
            mae(truth.ae_deviation.as_ref().and_then(|d| d.mean_accuracy_error())),
            mae(truth.mv_deviation.mean_accuracy_error())
        );
        let _ = write!(out, "pair error correlations (a / b):");
        for pair in Pair::ALL {
            let (x, y) = pair.slots();
            let values: Vec<String> = Label::ALL
                .iter()
                .map(|label| {
                    let c = truth.correlations.pairs.iter().find(|c| c.pair == pair && c.label == *label);
                    opt(c.and_then(|c| c.value.0.as_ref()))
                })
                .collect();
            let _ = write!(out, "  {}{}: {}", x.name(), y.name(), values.join(" / "));
        }
        out.push('\n');
    }
    out
}
