//! CSV and JSON writers. Floats always carry 17 significant digits.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use qwork_core::workdist::{Atom, AtomicDistribution};
use serde::Serialize;

use crate::error::{CliError, Result};

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.join(name))
}

/// `# key = value` comments, a header row, then the rows.
pub fn write_csv(path: &Path, comments: &[(String, String)], header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (k, v) in comments {
        writeln!(out, "# {k} = {v}").map_err(|e| CliError::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, format!("{text}\n")).map_err(|e| CliError::io(path, e))?;
    Ok(text)
}

/// Reads an atoms CSV written by `workdist`, taking β from its
/// `# beta = ...` comment.
pub fn read_atoms(path: &Path) -> Result<AtomicDistribution> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut beta = None;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let Some(comment) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = comment.split_once('=') {
            if k.trim() == "beta" {
                beta = Some(v.trim().parse::<f64>().map_err(|_| {
                    CliError::Config(format!("{}: bad beta comment `{}`", path.display(), v.trim()))
                })?);
            }
        }
    }
    let beta = beta.ok_or_else(|| CliError::Config(format!("{}: no `# beta = ` comment", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut atoms = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: bad atom row {:?}", path.display(), rec)))
        };
        atoms.push(Atom { w: field(0)?, p: field(1)? });
    }
    Ok(AtomicDistribution::new(atoms, beta))
}
