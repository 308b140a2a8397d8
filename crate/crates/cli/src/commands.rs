use std::collections::BTreeMap;
use std::io::Write;

use algeval::decision::{
    count_errors, decide as decide_label, evaluate_trio, mean_accuracy_by_classifier, ErrorCount, EstimatedErrors,
    MethodErrors,
};
use algeval::majority::mv_decide;
use algeval::solver::SolverOptions;
use algeval::{AlarmStatus, ComparisonReport, DecisionPattern, Label, Method};
use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::input::{load, trios, Loaded};
use crate::output::{write_atomic, write_json};
use crate::{render, DecideArgs, EvaluateArgs, SolverArgs};

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions { policy: self.policy, precision: self.precision }
    }
}

/// Machine-readable output of `evaluate`.
#[derive(Serialize, Deserialize)]
pub struct EvaluateReport {
    pub source: String,
    pub policy: String,
    pub precision: u32,
    pub classifiers: Vec<String>,
    pub exit_code: u8,
    pub trios: Vec<ComparisonReport>,
    /// Extension for more than three classifiers: mean AE `[π_a, π_b]` of
    /// each classifier over the trios containing it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_accuracy_by_classifier: Option<BTreeMap<String, [f64; 2]>>,
}

fn exit_code<'a>(alarms: impl IntoIterator<Item = &'a AlarmStatus>) -> u8 {
    alarms.into_iter().map(|a| a.kind.exit_code() as u8).max().unwrap_or(0)
}

fn reports(loaded: &Loaded, options: &SolverOptions) -> Result<Vec<ComparisonReport>> {
    trios(&loaded.sketch)?
        .into_par_iter()
        .map(|trio| {
            let (counts, gt) = loaded.sketch.trio_counts(&trio)?;
            let mut report = evaluate_trio(&counts, gt.as_ref(), options)?;
            report.trio = Some(trio);
            Ok(report)
        })
        .collect()
}

pub fn evaluate(args: &EvaluateArgs) -> Result<u8> {
    let loaded = load(&args.input, args.format)?;
    let trios = reports(&loaded, &args.solver.options())?;
    let code = exit_code(trios.iter().map(|r| &r.alarm));
    let report = EvaluateReport {
        source: args.input.display().to_string(),
        policy: args.solver.policy.to_string(),
        precision: args.solver.precision,
        classifiers: loaded.sketch.classifiers.clone(),
        exit_code: code,
        mean_accuracy_by_classifier: (trios.len() > 1).then(|| mean_accuracy_by_classifier(&trios)),
        trios,
    };
    if let Some(dir) = &args.output_dir {
        write_json(dir, "report.json", &report)?;
    }
    if args.json {
        say!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for trio in &report.trios {
            say!("{}", render::comparison(trio));
        }
        if let Some(means) = &report.mean_accuracy_by_classifier {
            say!("mean AE accuracy per classifier over its trios (extension):");
            for (id, [a, b]) in means {
                say!("  {id:<12} π_a {a:.4}  π_b {b:.4}");
            }
        }
    }
    Ok(code)
}

/// Group decisions of one trio.
#[derive(Serialize, Deserialize)]
pub struct TrioDecisions {
    pub trio: [String; 3],
    pub method: Method,
    pub alarm: AlarmStatus,
    /// Why majority voting stood in for AE, when it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    /// Pattern key in trio order → assigned label.
    pub decisions: BTreeMap<String, Label>,
    /// Errors of the chosen method, when truth is known.
    pub errors: Option<ErrorCount>,
    /// All methods' errors, when truth is known.
    pub comparison: Option<MethodErrors>,
    pub estimated_errors: Option<EstimatedErrors>,
}

#[derive(Serialize, Deserialize)]
pub struct DecideReport {
    pub source: String,
    pub method: Method,
    pub exit_code: u8,
    pub trios: Vec<TrioDecisions>,
}

fn trio_decisions(report: ComparisonReport, method: Method) -> Result<TrioDecisions> {
    let trio = report.trio.clone().expect("trio set");
    let (table, fallback): ([Label; 8], Option<String>) = match report.partition(method) {
        Some(part) => (DecisionPattern::ALL.map(|p| decide_label(part, p)), None),
        None if method == Method::Gt => bail!("method gt needs true labels, and the input for trio {trio:?} has none"),
        None => (
            DecisionPattern::ALL.map(mv_decide),
            Some(format!("no AE point ({}); majority vote used", report.alarm.kind)),
        ),
    };
    let errors = report
        .truth
        .as_ref()
        .map(|t| count_errors(|p| table[p.index()], &t.partition))
        .transpose()?;
    let estimated_errors = match method {
        Method::Ae if fallback.is_none() => report.ae_estimated_errors.clone(),
        _ => None,
    };
    Ok(TrioDecisions {
        trio,
        method,
        alarm: report.alarm,
        fallback,
        decisions: DecisionPattern::ALL.iter().map(|p| (p.key(), table[p.index()])).collect(),
        errors,
        comparison: report.truth.map(|t| t.errors),
        estimated_errors,
    })
}

pub fn decide(args: &DecideArgs) -> Result<u8> {
    let loaded = load(&args.input, args.format)?;
    if args.method == Method::Gt && !loaded.sketch.has_truth() {
        bail!("method gt needs true labels for every item; {} has none", args.input.display());
    }
    let blocks: Vec<TrioDecisions> = reports(&loaded, &args.solver.options())?
        .into_iter()
        .map(|r| trio_decisions(r, args.method))
        .collect::<Result<_>>()?;
    // Only AE decisions depend on the independence assumption.
    let code = match args.method {
        Method::Ae => exit_code(blocks.iter().map(|b| &b.alarm)),
        _ => 0,
    };
    let report = DecideReport {
        source: args.input.display().to_string(),
        method: args.method,
        exit_code: code,
        trios: blocks,
    };

    if let Some(records) = &loaded.records {
        write_atomic(&args.output_dir, "labels.csv", |w| write_labels(w, &report.trios, records))?;
    }
    write_json(&args.output_dir, "decisions.json", &report)?;

    if args.json {
        say!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(code);
    }
    for block in &report.trios {
        say!("== trio ({}) method {} ==", block.trio.join(", "), block.method);
        say!("alarm: {} (exit {})", block.alarm.kind, block.alarm.kind.exit_code());
        if let Some(reason) = &block.fallback {
            say!("note: {reason}");
        }
        let row: Vec<String> = block.decisions.iter().map(|(k, l)| format!("{k}→{l}")).collect();
        say!("decisions: {}", row.join("  "));
        if let Some(e) = &block.errors {
            say!("labeling errors: {} + {} = {} (majority a + majority b)", e.majority_a_rows, e.majority_b_rows, e.total);
        }
        if let Some(c) = &block.comparison {
            let ae = c.ae.as_ref().map(|e| e.total.to_string()).unwrap_or_else(|| "n/a".into());
            say!("errors by method: GT {}  AE {}  MV {}", c.gt.total, ae, c.mv.total);
        }
        if let Some(est) = &block.estimated_errors {
            say!(
                "AE estimate of its errors: {:.1}",
                algeval::exact::to_f64(&est.total)
            );
        }
        say!();
    }
    if loaded.records.is_some() {
        say!("labels written to {}", args.output_dir.join("labels.csv").display());
    }
    Ok(code)
}

fn write_labels(w: &mut dyn Write, blocks: &[TrioDecisions], records: &[algeval::DecisionRecord]) -> Result<()> {
    let has_truth = records.iter().all(|r| r.true_label.is_some());
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec!["item_id".to_string()];
    header.extend(blocks.iter().map(|b| b.trio.join("+")));
    if has_truth {
        header.push("true_label".into());
    }
    csv.write_record(&header)?;
    for r in records {
        let mut row = vec![r.item_id.clone()];
        for b in blocks {
            let key: String = b.trio.iter().map(|id| r.decisions[id].as_char()).collect();
            row.push(b.decisions[&key].to_string());
        }
        if has_truth {
            row.push(r.true_label.expect("checked").to_string());
        }
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}
