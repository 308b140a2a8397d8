//! On-disk formats: JSON sketches of ensemble decision counts and CSV files
//! of per-item decisions.
//!
//! A sketch covers `N ≥ 3` classifiers. Pattern keys concatenate one label
//! character per classifier in the order of `"classifiers"`:
//!
//! ```json
//! {"q": 20000, "labels": ["a", "b"], "classifiers": ["i", "j", "k"],
//!  "by_true_label": {"a": {"aaa": 424, ...}, "b": {"aaa": 144, ...}}}
//! ```
//!
//! The counts-only variant replaces `"by_true_label"` with a top-level
//! `"patterns": {"aaa": 568, ...}`. Missing keys count as zero.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde_json::{json, Map, Value};

use crate::decision::enumerate_trios;
use crate::error::{Error, Result};
use crate::model::{project, ByTrueLabelCounts, DecisionPattern, DecisionRecord, Label, PatternCounts};

/// Counts of N-classifier decision patterns, keyed by `a`/`b` strings of
/// length N, optionally split by true label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sketch {
    pub classifiers: Vec<String>,
    /// Printed label names, mapped in order to `a` and `b`.
    pub labels: [String; 2],
    pub patterns: BTreeMap<String, u64>,
    pub by_true_label: Option<[BTreeMap<String, u64>; 2]>,
}

impl Sketch {
    pub fn q(&self) -> u64 {
        self.patterns.values().sum()
    }

    pub fn has_truth(&self) -> bool {
        self.by_true_label.is_some()
    }

    /// Trio sketch from observed counts.
    pub fn from_counts(trio: &[String; 3], counts: &PatternCounts) -> Sketch {
        Sketch {
            classifiers: trio.to_vec(),
            labels: default_labels(),
            patterns: counts.iter().map(|(p, n)| (p.key(), n)).collect(),
            by_true_label: None,
        }
    }

    /// Trio sketch from integer ground truth.
    pub fn from_ground_truth(trio: &[String; 3], gt: &ByTrueLabelCounts) -> Result<Sketch> {
        let cells = gt.integer_cells()?;
        let counts = project(gt)?;
        let by_label = Label::ALL.map(|l| {
            DecisionPattern::ALL.iter().map(|p| (p.key(), cells[l.index()][p.index()])).collect()
        });
        Ok(Sketch { by_true_label: Some(by_label), ..Sketch::from_counts(trio, &counts) })
    }

    /// Tally per-item records over `classifiers`. Truth is kept only when
    /// every record has it.
    pub fn from_records(records: &[DecisionRecord], classifiers: &[String]) -> Result<Sketch> {
        let mut patterns = BTreeMap::new();
        let mut by_label: [BTreeMap<String, u64>; 2] = Default::default();
        let mut all_labelled = true;
        for record in records {
            let mut key = String::with_capacity(classifiers.len());
            for id in classifiers {
                let label = record.decisions.get(id).ok_or_else(|| Error::MissingDecision {
                    item_id: record.item_id.clone(),
                    classifier: id.clone(),
                })?;
                key.push(label.as_char());
            }
            match record.true_label {
                Some(truth) => *by_label[truth.index()].entry(key.clone()).or_default() += 1,
                None => all_labelled = false,
            }
            *patterns.entry(key).or_default() += 1;
        }
        Ok(Sketch {
            classifiers: classifiers.to_vec(),
            labels: default_labels(),
            patterns,
            by_true_label: (all_labelled && !records.is_empty()).then_some(by_label),
        })
    }

    /// Drop the truth, keeping observed counts.
    pub fn without_truth(&self) -> Sketch {
        Sketch { by_true_label: None, ..self.clone() }
    }

    pub fn trios(&self) -> Result<Vec<[String; 3]>> {
        enumerate_trios(&self.classifiers)
    }

    /// Marginalize onto `trio`, in the given classifier order.
    pub fn trio_counts(&self, trio: &[String; 3]) -> Result<(PatternCounts, Option<ByTrueLabelCounts>)> {
        let positions = trio.each_ref().map(|id| self.classifiers.iter().position(|c| c == id));
        let positions = match positions {
            [Some(x), Some(y), Some(z)] if x != y && y != z && x != z => [x, y, z],
            _ => return Err(Error::Config(format!("trio {trio:?} is not three distinct classifiers of {:?}", self.classifiers))),
        };
        let marginal = |map: &BTreeMap<String, u64>| -> [u64; 8] {
            let mut out = [0u64; 8];
            for (key, n) in map {
                let chars: Vec<char> = key.chars().collect();
                let labels = positions.map(|p| Label::from_char(chars[p]).expect("validated key"));
                out[DecisionPattern(labels).index()] += n;
            }
            out
        };
        let counts = PatternCounts::new(marginal(&self.patterns));
        let gt = self
            .by_true_label
            .as_ref()
            .map(|[a, b]| ByTrueLabelCounts::from_integers(marginal(a), marginal(b)));
        Ok((counts, gt))
    }

    pub fn parse(text: &str, source: &str) -> Result<Sketch> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: format!("{source}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Sketch::from_value(&value).map_err(|e| match e {
            Error::Schema(msg) => Error::Schema(format!("{source}: {msg}\n{}", schema_dump(&value))),
            other => other,
        })
    }

    pub fn read_from(mut reader: impl Read, source: &str) -> Result<Sketch> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Sketch::parse(&text, source)
    }

    fn from_value(value: &Value) -> Result<Sketch> {
        let obj = value.as_object().ok_or_else(|| schema("top level is not a JSON object"))?;
        let classifiers: Vec<String> = match obj.get("classifiers") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(schema("classifier ids must be strings or numbers")),
                })
                .collect::<Result<_>>()?,
            Some(_) => return Err(schema("\"classifiers\" must be an array")),
            None => return Err(schema("missing \"classifiers\"")),
        };
        if classifiers.len() < 3 {
            return Err(schema(&format!("need at least 3 classifiers, got {}", classifiers.len())));
        }
        let mut seen = classifiers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != classifiers.len() {
            return Err(schema("duplicate classifier ids"));
        }
        let labels = match obj.get("labels") {
            None => default_labels(),
            Some(Value::Array(items)) => match items.as_slice() {
                [Value::String(x), Value::String(y)] if x != y && x.chars().count() == 1 && y.chars().count() == 1 => {
                    [x.clone(), y.clone()]
                }
                _ => return Err(schema("\"labels\" must be two distinct single-character strings")),
            },
            Some(_) => return Err(schema("\"labels\" must be an array")),
        };
        let translate = LabelMap::new(&labels);
        let n = classifiers.len();

        let (patterns, by_true_label) = match (obj.get("by_true_label"), obj.get("patterns")) {
            (Some(by), None) => {
                let by = by.as_object().ok_or_else(|| schema("\"by_true_label\" must be an object"))?;
                let mut split: [BTreeMap<String, u64>; 2] = Default::default();
                for (name, table) in by {
                    let label = translate
                        .label(name)
                        .ok_or_else(|| schema(&format!("unknown true label {name:?} in \"by_true_label\"")))?;
                    split[label.index()] = pattern_table(table, n, &translate, &format!("by_true_label.{name}"))?;
                }
                let mut patterns = split[0].clone();
                for (k, v) in &split[1] {
                    *patterns.entry(k.clone()).or_default() += v;
                }
                (patterns, Some(split))
            }
            (None, Some(table)) => (pattern_table(table, n, &translate, "patterns")?, None),
            (Some(_), Some(_)) => return Err(schema("both \"by_true_label\" and \"patterns\" present")),
            (None, None) => return Err(schema("expected \"by_true_label\" or \"patterns\"")),
        };
        let sketch = Sketch { classifiers, labels, patterns, by_true_label };
        if let Some(q) = obj.get("q") {
            let q = q.as_u64().ok_or_else(|| schema("\"q\" must be a non-negative integer"))?;
            if q != sketch.q() {
                return Err(schema(&format!("\"q\" is {q} but the counts sum to {}", sketch.q())));
            }
        }
        Ok(sketch)
    }

    pub fn to_value(&self) -> Value {
        let translate = LabelMap::new(&self.labels);
        let n = self.classifiers.len();
        let table = |map: &BTreeMap<String, u64>| -> Value {
            let mut out = Map::new();
            let keys: Vec<String> = if n <= 10 {
                all_keys(n)
            } else {
                map.keys().cloned().collect()
            };
            for key in keys {
                out.insert(translate.render(&key), json!(map.get(&key).copied().unwrap_or(0)));
            }
            Value::Object(out)
        };
        let mut obj = Map::new();
        obj.insert("q".into(), json!(self.q()));
        obj.insert("labels".into(), json!(self.labels));
        obj.insert("classifiers".into(), json!(self.classifiers));
        match &self.by_true_label {
            Some(split) => {
                let mut by = Map::new();
                for label in Label::ALL {
                    by.insert(self.labels[label.index()].clone(), table(&split[label.index()]));
                }
                obj.insert("by_true_label".into(), Value::Object(by));
            }
            None => {
                obj.insert("patterns".into(), table(&self.patterns));
            }
        }
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("sketch serializes") + "\n"
    }
}

fn default_labels() -> [String; 2] {
    ["a".to_string(), "b".to_string()]
}

fn schema(msg: &str) -> Error {
    Error::Schema(msg.to_string())
}

/// Keys of length `n` in lexicographic order.
fn all_keys(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 0 { 'a' } else { 'b' }).collect())
        .collect()
}

/// Printed label characters ↔ internal labels.
struct LabelMap {
    chars: [char; 2],
    names: [String; 2],
}

impl LabelMap {
    fn new(labels: &[String; 2]) -> LabelMap {
        let first = |s: &String| s.chars().next().expect("non-empty label");
        LabelMap { chars: [first(&labels[0]), first(&labels[1])], names: labels.clone() }
    }

    fn label(&self, name: &str) -> Option<Label> {
        Label::ALL.into_iter().find(|l| self.names[l.index()] == name)
    }

    /// Printed key → internal `a`/`b` key.
    fn canonical(&self, key: &str) -> Option<String> {
        key.chars()
            .map(|c| Label::ALL.into_iter().find(|l| self.chars[l.index()] == c).map(Label::as_char))
            .collect()
    }

    fn render(&self, key: &str) -> String {
        key.chars()
            .map(|c| self.chars[Label::from_char(c).expect("canonical key").index()])
            .collect()
    }
}

fn pattern_table(value: &Value, n: usize, labels: &LabelMap, path: &str) -> Result<BTreeMap<String, u64>> {
    let obj = value.as_object().ok_or_else(|| schema(&format!("{path} must be an object of pattern counts")))?;
    let mut out = BTreeMap::new();
    for (key, count) in obj {
        if key.chars().count() != n {
            return Err(schema(&format!("{path}: pattern {key:?} has length {}, expected {n}", key.chars().count())));
        }
        let canonical = labels
            .canonical(key)
            .ok_or_else(|| schema(&format!("{path}: pattern {key:?} uses a character outside the labels")))?;
        let count = count
            .as_u64()
            .ok_or_else(|| schema(&format!("{path}.{key}: count must be a non-negative integer")))?;
        if count > 0 {
            out.insert(canonical, count);
        }
    }
    Ok(out)
}

/// Compact outline of a JSON document for schema error messages.
fn schema_dump(value: &Value) -> String {
    fn walk(value: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match value {
            Value::Object(map) => {
                for (i, (k, v)) in map.iter().enumerate() {
                    if i == 12 {
                        out.push_str(&format!("{pad}... ({} keys)\n", map.len()));
                        break;
                    }
                    out.push_str(&format!("{pad}{k:?}: {}\n", kind(v)));
                    if indent < 3 {
                        walk(v, indent + 1, out);
                    }
                }
            }
            Value::Array(items) => {
                if let Some(first) = items.first() {
                    out.push_str(&format!("{pad}[0]: {}\n", kind(first)));
                }
            }
            _ => {}
        }
    }
    fn kind(v: &Value) -> String {
        match v {
            Value::Null => "null".into(),
            Value::Bool(_) => "bool".into(),
            Value::Number(n) => format!("number {n}"),
            Value::String(s) => format!("string {s:?}"),
            Value::Array(a) => format!("array[{}]", a.len()),
            Value::Object(o) => format!("object{{{}}}", o.len()),
        }
    }
    let mut out = String::from("document outline:\n");
    walk(value, 1, &mut out);
    out
}

/// Read per-item decisions: header `item_id,<classifier ids...>[,true_label]`.
/// Returns the classifier ids in header order and the records.
pub fn read_records(reader: impl Read, source: &str) -> Result<(Vec<String>, Vec<DecisionRecord>)> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, message: String| Error::Parse { context: format!("{source}:{line}"), message };
    let header = csv.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns.first() != Some(&"item_id") {
        return Err(Error::Schema(format!("{source}: first column must be item_id, header is {columns:?}")));
    }
    let has_truth = columns.last() == Some(&"true_label");
    let ids: Vec<String> =
        columns[1..columns.len() - usize::from(has_truth)].iter().map(|s| s.to_string()).collect();
    if ids.len() < 3 {
        return Err(Error::Schema(format!("{source}: need at least 3 classifier columns, header is {columns:?}")));
    }
    let label = |text: &str, line: u64, what: &str| -> Result<Label> {
        let mut chars = text.chars();
        match (chars.next().and_then(Label::from_char), chars.next()) {
            (Some(l), None) => Ok(l),
            _ => Err(parse_err(line, format!("{what}: expected label a or b, found {text:?}"))),
        }
    };
    let mut records = Vec::new();
    for row in csv.records() {
        let row = row.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let item_id = row[0].to_string();
        let mut decisions = BTreeMap::new();
        for (idx, id) in ids.iter().enumerate() {
            decisions.insert(id.clone(), label(&row[idx + 1], line, id)?);
        }
        let true_label = match has_truth {
            true if row[ids.len() + 1].is_empty() => None,
            true => Some(label(&row[ids.len() + 1], line, "true_label")?),
            false => None,
        };
        records.push(DecisionRecord { item_id, decisions, true_label });
    }
    Ok((ids, records))
}

pub fn write_records(writer: impl Write, ids: &[String], records: &[DecisionRecord]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let has_truth = records.iter().any(|r| r.true_label.is_some());
    let mut header = vec!["item_id".to_string()];
    header.extend(ids.iter().cloned());
    if has_truth {
        header.push("true_label".into());
    }
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    csv.write_record(&header).map_err(io)?;
    for r in records {
        let mut row = vec![r.item_id.clone()];
        for id in ids {
            let label = r.decisions.get(id).ok_or_else(|| Error::MissingDecision {
                item_id: r.item_id.clone(),
                classifier: id.clone(),
            })?;
            row.push(label.to_string());
        }
        if has_truth {
            row.push(r.true_label.map(|l| l.to_string()).unwrap_or_default());
        }
        csv.write_record(&row).map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}
