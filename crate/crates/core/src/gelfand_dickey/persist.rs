//! JSON persistence for [`GdTable`] and [`PklTable`].
//!
//! Loading validates the schema version and the defining relations of every
//! entry (`δR_{n+1} = R_n`, `∂x T_n = u1·R_n`, `∂x P = R_k·∂x R_l`), so a
//! damaged cache is rejected instead of producing wrong answers.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GdEntry, GdTable, PklTable, NORMALIZATION};
use crate::diffpoly::DiffPoly;

pub const GD_SCHEMA_VERSION: u32 = 1;
pub const PKL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("malformed table: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("schema version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("inconsistent table: {0}")]
    Inconsistent(String),
}

#[derive(Serialize, Deserialize)]
struct GdEntryJson {
    n: usize,
    #[serde(rename = "R")]
    r: DiffPoly,
    #[serde(rename = "T")]
    t: DiffPoly,
}

#[derive(Serialize, Deserialize)]
struct GdTableJson {
    schema_version: u32,
    max_n: usize,
    normalization: String,
    entries: Vec<GdEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct PklEntryJson {
    k: usize,
    l: usize,
    #[serde(rename = "P")]
    p: DiffPoly,
}

#[derive(Serialize, Deserialize)]
struct PklTableJson {
    schema_version: u32,
    entries: Vec<PklEntryJson>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

fn check_version(s: &str, expected: u32) -> Result<(), PersistError> {
    let probe: VersionProbe = serde_json::from_str(s)?;
    if probe.schema_version != expected {
        return Err(PersistError::Version {
            found: probe.schema_version,
            expected,
        });
    }
    Ok(())
}

impl GdTable {
    pub fn to_json(&self) -> String {
        let doc = GdTableJson {
            schema_version: GD_SCHEMA_VERSION,
            max_n: self.max_n(),
            normalization: NORMALIZATION.to_string(),
            entries: self
                .entries()
                .iter()
                .map(|e| GdEntryJson {
                    n: e.n,
                    r: e.r.clone(),
                    t: e.t.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<GdTable, PersistError> {
        check_version(s, GD_SCHEMA_VERSION)?;
        let doc: GdTableJson = serde_json::from_str(s)?;
        if doc.normalization != NORMALIZATION {
            return Err(PersistError::Inconsistent(format!(
                "normalization `{}`",
                doc.normalization
            )));
        }
        let entries: Vec<GdEntry> = doc
            .entries
            .into_iter()
            .map(|e| GdEntry {
                n: e.n,
                r: e.r,
                t: e.t,
            })
            .collect();
        let table = GdTable::from_entries(entries)
            .ok_or_else(|| PersistError::Inconsistent("entries not contiguous from 0".into()))?;
        if table.max_n() != doc.max_n {
            return Err(PersistError::Inconsistent(format!(
                "max_n {} but {} entries",
                doc.max_n,
                table.max_n() + 1
            )));
        }
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<(), PersistError> {
        let bad = |what: String| Err(PersistError::Inconsistent(what));
        if self.r(0) != &DiffPoly::one() || self.t(0) != &DiffPoly::u(0) {
            return bad("R_0 / T_0".into());
        }
        for e in self.entries() {
            if e.t.dx() != &DiffPoly::u(1) * &e.r {
                return bad(format!("dx T_{} != u1 R_{}", e.n, e.n));
            }
            if !e.t.constant_term().is_zero() {
                return bad(format!("T_{} has a constant term", e.n));
            }
            if e.n >= 1 {
                if e.r.var_delta() != *self.r(e.n - 1) {
                    return bad(format!("delta R_{} != R_{}", e.n, e.n - 1));
                }
                if !e.r.constant_term().is_zero() {
                    return bad(format!("R_{} has a constant term", e.n));
                }
            }
        }
        Ok(())
    }
}

impl PklTable {
    pub fn to_json(&self) -> String {
        let doc = PklTableJson {
            schema_version: PKL_SCHEMA_VERSION,
            entries: self
                .entries
                .iter()
                .map(|(&(k, l), p)| PklEntryJson { k, l, p: p.clone() })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    /// Parses and validates against `table`, extending it if needed.
    pub fn from_json(s: &str, table: &mut GdTable) -> Result<PklTable, PersistError> {
        check_version(s, PKL_SCHEMA_VERSION)?;
        let doc: PklTableJson = serde_json::from_str(s)?;
        let mut out = PklTable::default();
        for e in doc.entries {
            table
                .extend_to(e.k.max(e.l))
                .map_err(|err| PersistError::Inconsistent(err.to_string()))?;
            if e.p.dx() != table.r(e.k) * &table.r(e.l).dx() {
                return Err(PersistError::Inconsistent(format!(
                    "dx P_{},{} mismatch",
                    e.k, e.l
                )));
            }
            out.entries.insert((e.k, e.l), e.p);
        }
        Ok(out)
    }
}
