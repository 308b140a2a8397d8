use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Write-then-rename so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    contents(&mut tmp)?;
    tmp.flush()?;
    let target = dir.join(name);
    tmp.persist(&target).with_context(|| format!("cannot write {}", target.display()))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    write_atomic(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

/// Print a line, tolerating a closed pipe (e.g. `| head`).
pub fn say(args: std::fmt::Arguments<'_>) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|_| out.write_all(b"\n")) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}
