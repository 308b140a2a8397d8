use std::fs::File;
use std::path::Path;

use algeval::sketch::{read_records, Sketch};
use algeval::DecisionRecord;
use anyhow::{Context, Result};

use crate::Format;

/// A loaded input: the sketch, plus the items when the file had them.
pub struct Loaded {
    pub sketch: Sketch,
    pub records: Option<Vec<DecisionRecord>>,
}

pub fn load(path: &Path, format: Option<Format>) -> Result<Loaded> {
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Records,
        _ => Format::Sketch,
    });
    let source = path.display().to_string();
    let file = File::open(path).with_context(|| format!("cannot open {source}"))?;
    Ok(match format {
        Format::Sketch => Loaded { sketch: Sketch::read_from(file, &source)?, records: None },
        Format::Counts => Loaded { sketch: Sketch::read_from(file, &source)?.without_truth(), records: None },
        Format::Records => {
            let (ids, records) = read_records(file, &source)?;
            Loaded { sketch: Sketch::from_records(&records, &ids)?, records: Some(records) }
        }
    })
}

/// Trios to report: the file order for exactly three classifiers, otherwise
/// every combination of the sorted ids.
pub fn trios(sketch: &Sketch) -> Result<Vec<[String; 3]>> {
    match sketch.classifiers.as_slice() {
        [x, y, z] => Ok(vec![[x.clone(), y.clone(), z.clone()]]),
        _ => Ok(sketch.trios()?),
    }
}
