//! Gelfand-Dickey polynomials `R_n` and their potentials `T_n`.
//!
//! `R_{n+1}` is obtained from the Lenard recursion
//!
//! ```text
//! ∂x R_{n+1} = (u1·R_n + 2u·∂x R_n + λ²/4 ∂x³ R_n) / (2n+1)
//! ```
//!
//! by exact formal integration, with the integration constant fixed by
//! requiring a zero constant term for `n ≥ 1`. `T_n` is the zero-constant
//! antiderivative of `u1·R_n`.

mod action;
mod persist;
mod verify;

use std::collections::BTreeMap;

use crate::diffpoly::{DiffPoly, DiffPolyError};
use crate::rational::{frac, int};

pub use action::{euler_lagrange_check, lagrangian_expansion, ActionDensity, TimeLinear};
pub use persist::{PersistError, GD_SCHEMA_VERSION, PKL_SCHEMA_VERSION};
pub use verify::{random_suites, verify_identities, IdentityFamily};

/// Largest `n` computed without an explicit override; term counts grow
/// combinatorially beyond this.
pub const COST_GUARD_MAX_N: usize = 20;

pub const NORMALIZATION: &str = "zero constant term, R_0 = 1";

/// Which form of the Lenard recursion produces `R_{n+1}` from `R_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LenardForm {
    /// Integrate `u1·R + 2u·∂x R + λ²/4 ∂x³ R` as a whole.
    Derivative,
    /// `(u + λ²/4 ∂x²) R + ∂x⁻¹(u·∂x R)`.
    SplitU,
    /// `(2u + λ²/4 ∂x²) R − ∂x⁻¹(u1·R)`.
    SplitUx,
}

/// One Lenard step: `R_{n+1}` from `R_n`.
pub fn lenard_step(r_n: &DiffPoly, n: usize, form: LenardForm) -> Result<DiffPoly, DiffPolyError> {
    let u = DiffPoly::u(0);
    let u1 = DiffPoly::u(1);
    let quarter_l2 = |p: &DiffPoly| p.shift_genus(1).scale(&frac(1, 4));
    let raw = match form {
        LenardForm::Derivative => {
            let rhs =
                &(&(&u1 * r_n) + &(&u * &r_n.dx()).scale(&int(2))) + &quarter_l2(&r_n.dx_n(3));
            rhs.antiderivative()?
        }
        LenardForm::SplitU => {
            let local = &(&u * r_n) + &quarter_l2(&r_n.dx_n(2));
            &local + &(&u * &r_n.dx()).antiderivative()?
        }
        LenardForm::SplitUx => {
            let local = &(&u * r_n).scale(&int(2)) + &quarter_l2(&r_n.dx_n(2));
            &local - &(&u1 * r_n).antiderivative()?
        }
    };
    Ok(raw.scale(&frac(1, 2 * n as i64 + 1)))
}

/// `T_n`: the zero-constant antiderivative of `u1·R_n`.
pub fn potential_t(r_n: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    (&DiffPoly::u(1) * r_n).antiderivative()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdEntry {
    pub n: usize,
    pub r: DiffPoly,
    pub t: DiffPoly,
}

/// Cached `(R_n, T_n)` for `n = 0..=max_n`. Entries are always contiguous
/// from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdTable {
    entries: Vec<GdEntry>,
}

impl Default for GdTable {
    fn default() -> Self {
        GdTable::new()
    }
}

impl GdTable {
    /// The table holding only `R_0 = 1`, `T_0 = u`.
    pub fn new() -> Self {
        GdTable {
            entries: vec![GdEntry {
                n: 0,
                r: DiffPoly::one(),
                t: DiffPoly::u(0),
            }],
        }
    }

    pub fn with_max_n(max_n: usize) -> Result<Self, DiffPolyError> {
        let mut t = GdTable::new();
        t.extend_to(max_n)?;
        Ok(t)
    }

    pub fn max_n(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn extend_to(&mut self, max_n: usize) -> Result<(), DiffPolyError> {
        while self.max_n() < max_n {
            let n = self.max_n();
            let r = lenard_step(&self.entries[n].r, n, LenardForm::Derivative)?;
            let t = potential_t(&r)?;
            self.entries.push(GdEntry { n: n + 1, r, t });
        }
        Ok(())
    }

    pub fn entries(&self) -> &[GdEntry] {
        &self.entries
    }

    pub fn r(&self, n: usize) -> &DiffPoly {
        &self.entries[n].r
    }

    pub fn t(&self, n: usize) -> &DiffPoly {
        &self.entries[n].t
    }

    pub fn get(&self, n: usize) -> Option<&GdEntry> {
        self.entries.get(n)
    }

    /// Drops entries above `max_n`.
    pub fn truncate(&mut self, max_n: usize) {
        self.entries.truncate(max_n + 1);
    }

    pub(crate) fn from_entries(entries: Vec<GdEntry>) -> Option<Self> {
        let contiguous = entries.iter().enumerate().all(|(i, e)| e.n == i);
        (!entries.is_empty() && contiguous).then_some(GdTable { entries })
    }
}

pub fn lenard_r(n: usize) -> Result<DiffPoly, DiffPolyError> {
    Ok(GdTable::with_max_n(n)?.r(n).clone())
}

pub fn compute_t(n: usize) -> Result<DiffPoly, DiffPolyError> {
    Ok(GdTable::with_max_n(n)?.t(n).clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PklEntry {
    pub k: usize,
    pub l: usize,
    pub p: DiffPoly,
}

/// `P_{k,l}` with `∂x P_{k,l} = R_k · ∂x R_l` and zero constant term.
pub fn compute_pkl(table: &mut GdTable, k: usize, l: usize) -> Result<PklEntry, DiffPolyError> {
    table.extend_to(k.max(l))?;
    let p = (table.r(k) * &table.r(l).dx()).antiderivative()?;
    Ok(PklEntry { k, l, p })
}

/// Cache of computed `P_{k,l}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PklTable {
    pub entries: BTreeMap<(usize, usize), DiffPoly>,
}

impl PklTable {
    pub fn get_or_compute(
        &mut self,
        table: &mut GdTable,
        k: usize,
        l: usize,
    ) -> Result<PklEntry, DiffPolyError> {
        if let Some(p) = self.entries.get(&(k, l)) {
            return Ok(PklEntry { k, l, p: p.clone() });
        }
        let entry = compute_pkl(table, k, l)?;
        self.entries.insert((k, l), entry.p.clone());
        Ok(entry)
    }
}
