//! Trace CSV files: `iteration,value` for scalar chains, `iteration,value_1..value_d`
//! otherwise.

use std::io::Write;
use std::path::Path;

use imcmc_core::samplers::Trace;

use crate::error::{HarnessError, Result};

/// Columns read back from a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub iterations: Vec<u64>,
    pub names: Vec<String>,
    /// One series per value column.
    pub columns: Vec<Vec<f64>>,
}

pub fn value_names(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["value".to_string()]
    } else {
        (1..=dim).map(|j| format!("value_{j}")).collect()
    }
}

/// Writes every `thin`-th retained sample; iterations count the whole run from 1, burn-in
/// included.
pub fn write_trace_csv(out: &mut (impl Write + ?Sized), trace: &Trace, burn_in: usize, thin: usize) -> std::io::Result<()> {
    let thin = thin.max(1);
    writeln!(out, "iteration,{}", value_names(trace.dim).join(","))?;
    for t in (0..trace.len()).step_by(thin) {
        write!(out, "{}", burn_in + t + 1)?;
        for v in trace.sample(t) {
            // Debug formatting is the shortest representation that round-trips.
            write!(out, ",{v:?}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes to `path` through a temporary sibling that is renamed into place.
pub fn write_atomically(path: &Path, contents: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| HarnessError::config(format!("{} is not a file path", path.display())))?;
    let tmp = parent.join(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        contents(&mut w)?;
        w.flush()?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(HarnessError::io(path, e));
    }
    std::fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<TraceTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| HarnessError::parse(path, 1, e.to_string()))?
        .clone();
    if header.len() < 2 || header[0].trim() != "iteration" {
        return Err(HarnessError::parse(path, 1, "expected header iteration,value..."));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let mut table = TraceTable {
        iterations: Vec::new(),
        columns: vec![Vec::new(); names.len()],
        names,
    };
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            HarnessError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let it = record[0]
            .trim()
            .parse()
            .map_err(|_| HarnessError::parse(path, line, format!("bad iteration {:?}", &record[0])))?;
        table.iterations.push(it);
        for (j, col) in table.columns.iter_mut().enumerate() {
            let raw = record[j + 1].trim();
            let v: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| HarnessError::parse(path, line, format!("{} is not a finite number: {raw:?}", table.names[j])))?;
            col.push(v);
        }
    }
    Ok(table)
}
