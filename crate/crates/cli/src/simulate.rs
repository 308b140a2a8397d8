use std::collections::BTreeMap;

use algeval::exact::{self, Rational};
use algeval::sketch::{write_records, Sketch};
use algeval::stats::{error_correlation_pair, ground_truth_evaluation};
use algeval::synth::{sample_items, CorrelationSpec, Coupling, Ensemble};
use algeval::{DecisionRecord, Label, Pair};
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{write_atomic, write_json};
use crate::SimulateArgs;

/// Ground truth of a 20,000-item survey labeling run at prevalence 1/10.
const DEFAULT_POINT: &str = "1/10,0.502,0.898,0.6,0.7,0.687,0.712";

pub fn parse_point(spec: &str) -> Result<Ensemble> {
    let values: Vec<Rational> = spec
        .split(',')
        .map(|v| exact::parse(v).ok_or_else(|| anyhow!("--point: {v:?} is not a number")))
        .collect::<Result<_>>()?;
    let f: Vec<f64> = values.iter().map(exact::to_f64).collect();
    let accuracies = match f.len() {
        3 => vec![[f[1], f[2]]; 3],
        n if n >= 7 && n % 2 == 1 => f[1..].chunks(2).map(|c| [c[0], c[1]]).collect(),
        n => bail!("--point needs p_a,π_a,π_b or p_a followed by π_a,π_b for 3 or more classifiers; got {n} values"),
    };
    Ok(Ensemble::new(f[0], accuracies)?)
}

/// `R`, `X:Y=R` or `X:Y=Ra/Rb` with 1-based classifier numbers.
pub fn parse_rho(specs: &[String]) -> Result<CorrelationSpec> {
    let weight = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| anyhow!("--rho: {s:?} is not a number"))
    };
    let mut couplings = Vec::new();
    for spec in specs {
        let (pair, weights) = match spec.split_once('=') {
            Some((pair, w)) => {
                let (x, y) = pair.split_once(':').ok_or_else(|| anyhow!("--rho: expected X:Y=R, got {spec:?}"))?;
                let idx = |s: &str| -> Result<usize> {
                    match s.trim().parse::<usize>() {
                        Ok(n) if n >= 1 => Ok(n - 1),
                        _ => bail!("--rho: classifier numbers start at 1, got {s:?}"),
                    }
                };
                ((idx(x)?, idx(y)?), w)
            }
            None => ((0, 1), spec.as_str()),
        };
        let rho = match weights.split_once('/') {
            Some((a, b)) => [weight(a)?, weight(b)?],
            None => [weight(weights)?; 2],
        };
        couplings.push(Coupling { first: pair.0, second: pair.1, rho });
    }
    Ok(CorrelationSpec { couplings })
}

#[derive(Serialize, Deserialize)]
pub struct PairSummary {
    pub classifiers: [String; 2],
    /// Mean measured correlation over trials, `a` then `b`.
    pub mean: [Option<f64>; 2],
}

/// `(x, y, Γ_a, Γ_b)` for one classifier pair.
type PairGamma = (String, String, Option<f64>, Option<f64>);

#[derive(Serialize, Deserialize)]
pub struct TrialSummary {
    pub file: String,
    pub seed: u64,
    pub p_a: f64,
    /// `[x, y, Γ_a, Γ_b]` per classifier pair.
    pub pair_correlations: Vec<PairGamma>,
}

#[derive(Serialize, Deserialize)]
pub struct SimulationSummary {
    pub q: u64,
    pub classifiers: Vec<String>,
    pub p_a: f64,
    pub accuracies: Vec<[f64; 2]>,
    pub trials: Vec<TrialSummary>,
    pub pairs: Vec<PairSummary>,
}

fn sample_sketch(ensemble: &Ensemble, ids: &[String], q: u64, spec: &CorrelationSpec, seed: u64, keep: bool)
    -> Result<(Sketch, Option<Vec<DecisionRecord>>)> {
    let mut by_label: [BTreeMap<String, u64>; 2] = Default::default();
    let mut records = keep.then(Vec::new);
    sample_items(ensemble, q, spec, seed, |truth, decisions| {
        let key: String = decisions.iter().map(|l| l.as_char()).collect();
        if let Some(records) = records.as_mut() {
            records.push(DecisionRecord {
                item_id: format!("item{:06}", records.len()),
                decisions: ids.iter().cloned().zip(decisions.iter().copied()).collect(),
                true_label: Some(truth),
            });
        }
        *by_label[truth.index()].entry(key).or_default() += 1;
    })?;
    let mut patterns = by_label[0].clone();
    for (k, v) in &by_label[1] {
        *patterns.entry(k.clone()).or_default() += v;
    }
    let sketch = Sketch {
        classifiers: ids.to_vec(),
        labels: ["a".into(), "b".into()],
        patterns,
        by_true_label: Some(by_label),
    };
    Ok((sketch, records))
}

/// Measured pair correlations, each pair marginalized with the first other classifier.
fn pair_correlations(sketch: &Sketch) -> Result<Vec<PairGamma>> {
    let ids = &sketch.classifiers;
    let mut out = Vec::new();
    for x in 0..ids.len() {
        for y in x + 1..ids.len() {
            let z = (0..ids.len()).find(|z| *z != x && *z != y).expect("three classifiers");
            let (_, gt) = sketch.trio_counts(&[ids[x].clone(), ids[y].clone(), ids[z].clone()])?;
            let gt = gt.expect("simulated truth");
            let g = |label| error_correlation_pair(&gt, Pair::IJ, label).map(|v| exact::to_f64(&v));
            out.push((ids[x].clone(), ids[y].clone(), g(Label::A), g(Label::B)));
        }
    }
    Ok(out)
}

pub fn run(args: &SimulateArgs) -> Result<u8> {
    let ensemble = parse_point(args.point.as_deref().unwrap_or(DEFAULT_POINT))?;
    let spec = parse_rho(&args.rho)?;
    spec.validate(ensemble.len())?;
    if args.q == 0 || args.trials == 0 {
        bail!("--q and --trials must be positive");
    }
    let ids: Vec<String> = (1..=ensemble.len()).map(|i| i.to_string()).collect();
    let width = (args.trials - 1).to_string().len().max(4);

    let trials: Vec<TrialSummary> = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            let seed = args.seed.wrapping_add(t);
            let (sketch, records) = sample_sketch(&ensemble, &ids, args.q, &spec, seed, args.records)?;
            let file = format!("sketch-{t:0width$}.json");
            write_atomic(&args.output_dir, &file, |w| Ok(w.write_all(sketch.to_json().as_bytes())?))
                .with_context(|| format!("writing {file}"))?;
            if let Some(records) = &records {
                let name = format!("records-{t:0width$}.csv");
                write_atomic(&args.output_dir, &name, |w| Ok(write_records(w, &ids, records)?))?;
            }
            let (_, gt) = sketch.trio_counts(&[ids[0].clone(), ids[1].clone(), ids[2].clone()])?;
            let p_a = exact::to_f64(&ground_truth_evaluation(&gt.expect("simulated truth"))?.p_a);
            Ok(TrialSummary { file, seed, p_a, pair_correlations: pair_correlations(&sketch)? })
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<PairSummary> = (0..trials[0].pair_correlations.len())
        .map(|idx| {
            let (x, y, _, _) = &trials[0].pair_correlations[idx];
            let mean = |pick: fn(&PairGamma) -> Option<f64>| {
                let v: Vec<f64> = trials.iter().filter_map(|t| pick(&t.pair_correlations[idx])).collect();
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            };
            PairSummary { classifiers: [x.clone(), y.clone()], mean: [mean(|c| c.2), mean(|c| c.3)] }
        })
        .collect();
    let summary = SimulationSummary {
        q: args.q,
        classifiers: ids,
        p_a: ensemble.p_a,
        accuracies: ensemble.accuracies.clone(),
        trials,
        pairs,
    };
    write_json(&args.output_dir, "simulation.json", &summary)?;

    if args.json {
        say!("{}", serde_json::to_string_pretty(&summary)?);
        return Ok(0);
    }
    say!(
        "wrote {} sketch file(s) of {} items to {}",
        summary.trials.len(),
        summary.q,
        args.output_dir.display()
    );
    let mean_p: f64 = summary.trials.iter().map(|t| t.p_a).sum::<f64>() / summary.trials.len() as f64;
    say!("mean sampled p_a {mean_p:.4} (target {:.4})", summary.p_a);
    say!("mean measured pair error correlations:");
    say!("  {:<8}{:>10}{:>10}", "pair", "Γ_a", "Γ_b");
    let show = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "undef".into());
    for p in &summary.pairs {
        say!("  {:<8}{:>10}{:>10}", p.classifiers.join(","), show(p.mean[0]), show(p.mean[1]));
    }
    Ok(0)
}
