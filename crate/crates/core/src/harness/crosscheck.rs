use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fields::{fields_for_conductor, Conductor, ConductorStream};
use crate::norms::rank_record;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct ReferenceRow {
    pub conductor: u64,
    pub field_index: u64,
    pub rk3_class_group: u32,
}

/// A conductor whose reference ranks differ from the computed ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub conductor: u64,
    /// Sorted `rk₃(Cl_K) − (r − 1)` from the table.
    pub expected_s: Vec<i64>,
    /// Sorted `s` from the divisor algorithm; empty for inadmissible conductors.
    pub computed_s: Vec<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub rows_checked: u64,
    pub conductors_checked: u64,
    pub mismatches: Vec<Mismatch>,
    /// Admissible conductors `≤ max_conductor` absent from the table.
    pub missing_conductors: Vec<u64>,
}

impl CrosscheckReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.missing_conductors.is_empty()
    }
}

fn read_table(path: &Path, max_conductor: u64) -> Result<BTreeMap<u64, Vec<u32>>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => HarnessError::io(path, io),
            other => HarnessError::ParseError { line: 1, message: format!("{other:?}") },
        })?;
    let header_ok = reader
        .headers()
        .map(|h| h.iter().collect::<Vec<_>>() == ["conductor", "field_index", "rk3_class_group"])
        .unwrap_or(false);
    if !header_ok {
        return Err(HarnessError::ParseError {
            line: 1,
            message: "expected header conductor,field_index,rk3_class_group".into(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut table: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for result in reader.deserialize::<ReferenceRow>() {
        let row = result.map_err(|e| HarnessError::ParseError {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if row.conductor > max_conductor {
            continue;
        }
        if !seen.insert((row.conductor, row.field_index)) {
            return Err(HarnessError::AmbiguousMatch { conductor: row.conductor, field_index: row.field_index });
        }
        table.entry(row.conductor).or_default().push(row.rk3_class_group);
    }
    Ok(table)
}

/// Compare `s` against a reference table of class group 3-ranks, as
/// multisets per conductor.
pub fn crosscheck(table_path: &Path, max_conductor: u64) -> Result<CrosscheckReport, HarnessError> {
    let table = read_table(table_path, max_conductor)?;
    let mut report = CrosscheckReport::default();
    for (&conductor, ranks) in &table {
        report.rows_checked += ranks.len() as u64;
        report.conductors_checked += 1;
        let (r, computed_s) = match Conductor::new(conductor) {
            Ok(c) => {
                let mut s = fields_for_conductor(&c)
                    .iter()
                    .map(|f| rank_record(f).map(|rec| i64::from(rec.s)))
                    .collect::<Result<Vec<_>, _>>()?;
                s.sort_unstable();
                (c.r() as i64, s)
            }
            Err(_) => (1, Vec::new()),
        };
        let mut expected_s: Vec<i64> = ranks.iter().map(|&rk| i64::from(rk) - (r - 1)).collect();
        expected_s.sort_unstable();
        if expected_s != computed_s {
            report.mismatches.push(Mismatch { conductor, expected_s, computed_s });
        }
    }
    report.missing_conductors = ConductorStream::new(1, max_conductor)
        .map(|c| c.value())
        .filter(|c| !table.contains_key(c))
        .collect();
    Ok(report)
}
