//! Deterministic artifact persistence: an eigenvalue CSV, a JSON summary,
//! and a stable configuration hash.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::spectrum::Provenance;

use super::campaign::EigenRow;

/// FNV-1a over the canonical JSON encoding; stable across runs and
/// sensitive to any field change. Execution-environment fields (`workers`,
/// `out_dir`) are excluded so the hash identifies the experiment, not the
/// machine it ran on.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let mut json = serde_json::to_value(value).expect("config serialization cannot fail");
    if let serde_json::Value::Object(map) = &mut json {
        map.remove("workers");
        map.remove("out_dir");
    }
    let bytes = serde_json::to_vec(&json).expect("config serialization cannot fail");
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// `records.csv` with the fixed column set
/// `replicate,index,eigenvalue,provenance`, rows sorted by replicate then
/// index.
pub fn write_records_csv(path: &Path, rows: &[EigenRow]) -> Result<()> {
    let mut sorted: Vec<&EigenRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.replicate, provenance_rank(a.provenance), a.index).cmp(&(
            b.replicate,
            provenance_rank(b.provenance),
            b.index,
        ))
    });
    let mut out = Vec::with_capacity(rows.len() * 32 + 64);
    out.extend_from_slice(b"replicate,index,eigenvalue,provenance\n");
    for row in sorted {
        writeln!(
            out,
            "{},{},{:?},{}",
            row.replicate, row.index, row.value, row.provenance
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}

fn provenance_rank(p: Provenance) -> u8 {
    match p {
        Provenance::Perturbed => 0,
        Provenance::Null => 1,
        Provenance::OneSide => 2,
    }
}

/// Pretty JSON with a trailing newline; byte-identical for identical input.
pub fn write_summary_json<T: Serialize>(path: &Path, summary: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(summary).expect("summary serialization cannot fail");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
