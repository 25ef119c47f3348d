//! Truncated multivariate power series in the times `t_k`, graded by genus.
//!
//! A series carries a *validity region*: coefficient `(g, α)` is known
//! exactly iff `g ≤ max_genus` and `|α| + slack·g ≤ budget`. With
//! `slack = 0` this is the box `|α| ≤ D`, `g ≤ G`. The string-equation
//! solver uses `slack = 2`, because every genus step of a Gelfand-Dickey
//! polynomial comes with two `t0`-derivatives; in that grading
//! substitution into `R_n` and `T_n` loses nothing.
//!
//! Order loss per operation: `d/dt_k` lowers the budget by one; products
//! take the smaller budget; [`substitute`] lowers it by
//! `max(0, k − slack·g)` over the monomials `λ^{2g} ... u_k ...` it sees.

mod oracle;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffpoly::DiffPoly;
use crate::rational::{self, int, Rational};

pub use oracle::{
    check_kdv, check_puncture, correlator_label, intersection_coefficient, landau_ginzburg_solve,
    reconstruct_df, solve_string, FreeEnergyPart, StringSolution,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("coefficient (g={genus}, exp={exp:?}) lies outside the truncation")]
    OutOfTruncation { genus: u32, exp: Vec<u32> },
    #[error("variable t{0} is not a variable of this series")]
    UnknownVariable(usize),
    #[error("series have different variables or gradings")]
    Incompatible,
    #[error("{0}")]
    Malformed(String),
}

pub type Key = (u32, Vec<u32>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: Vec<usize>,
    budget: u32,
    max_genus: u32,
    slack: u32,
    coeffs: BTreeMap<Key, Rational>,
}

/// First coefficient where two series disagree inside their common region.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub genus: u32,
    pub exp: Vec<u32>,
    pub left: Rational,
    pub right: Rational,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "g={} exp={:?}: {} vs {}",
            self.genus, self.exp, self.left, self.right
        )
    }
}

impl TruncatedSeries {
    /// Zero series valid for `|α| ≤ max_degree + slack·(max_genus − g)`.
    pub fn zero(vars: &[usize], max_degree: u32, max_genus: u32, slack: u32) -> Self {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        TruncatedSeries {
            vars,
            budget: max_degree + slack * max_genus,
            max_genus,
            slack,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant_like(&self, c: Rational) -> Self {
        let mut s = self.empty_like();
        s.insert(0, vec![0; self.vars.len()], c);
        s
    }

    /// The time `t_k` as a series.
    pub fn var_like(&self, k: usize) -> Result<Self, SeriesError> {
        let i = self.var_index(k)?;
        let mut exp = vec![0; self.vars.len()];
        exp[i] = 1;
        let mut s = self.empty_like();
        s.insert(0, exp, Rational::one());
        Ok(s)
    }

    fn empty_like(&self) -> Self {
        TruncatedSeries {
            coeffs: BTreeMap::new(),
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            budget: self.budget,
            max_genus: self.max_genus,
            slack: self.slack,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn max_genus(&self) -> u32 {
        self.max_genus
    }

    pub fn slack(&self) -> u32 {
        self.slack
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// The box degree `D`: every genus is valid at least through `|α| ≤ D`.
    pub fn max_degree(&self) -> u32 {
        self.budget.saturating_sub(self.slack * self.max_genus)
    }

    /// Degree through which genus `g` is known.
    pub fn degree_for_genus(&self, g: u32) -> Option<u32> {
        (g <= self.max_genus)
            .then(|| self.budget.checked_sub(self.slack * g))
            .flatten()
    }

    pub fn var_index(&self, k: usize) -> Result<usize, SeriesError> {
        self.vars
            .iter()
            .position(|&v| v == k)
            .ok_or(SeriesError::UnknownVariable(k))
    }

    pub fn in_range(&self, genus: u32, exp: &[u32]) -> bool {
        genus <= self.max_genus && exp.iter().sum::<u32>() + self.slack * genus <= self.budget
    }

    pub(crate) fn insert(&mut self, genus: u32, exp: Vec<u32>, c: Rational) {
        if c.is_zero() || !self.in_range(genus, &exp) {
            return;
        }
        match self.coeffs.entry((genus, exp)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, genus: u32, exp: &[u32]) -> Result<Rational, SeriesError> {
        if exp.len() != self.vars.len() || !self.in_range(genus, exp) {
            return Err(SeriesError::OutOfTruncation {
                genus,
                exp: exp.to_vec(),
            });
        }
        Ok(self
            .coeffs
            .get(&(genus, exp.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Key, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars != other.vars || self.slack != other.slack {
            return Err(SeriesError::Incompatible);
        }
        Ok(())
    }

    fn meet_shape(&self, other: &Self) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            budget: self.budget.min(other.budget),
            max_genus: self.max_genus.min(other.max_genus),
            slack: self.slack,
            coeffs: BTreeMap::new(),
        }
    }

    fn retruncate(mut self) -> Self {
        let (b, g, s) = (self.budget, self.max_genus, self.slack);
        self.coeffs
            .retain(|(genus, exp), _| *genus <= g && exp.iter().sum::<u32>() + s * genus <= b);
        self
    }

    /// Lowers the validity region to the given budget/genus (never raises).
    pub fn truncate(&self, budget: u32, max_genus: u32) -> Self {
        let mut out = self.clone();
        out.budget = out.budget.min(budget);
        out.max_genus = out.max_genus.min(max_genus);
        out.retruncate()
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.meet_shape(other);
        for ((g, e), c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.insert(*g, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone_shape();
        if !c.is_zero() {
            out.coeffs = self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let mut out = self.meet_shape(other);
        let weighted = |g: u32, e: &[u32]| e.iter().sum::<u32>() + out.slack * g;
        let right: Vec<(u32, &Vec<u32>, &Rational, u32)> = other
            .coeffs
            .iter()
            .map(|((g, e), c)| (*g, e, c, weighted(*g, e)))
            .collect();
        let mut acc: BTreeMap<Key, Rational> = BTreeMap::new();
        for ((ga, ea), ca) in &self.coeffs {
            let wa = weighted(*ga, ea);
            if wa > out.budget {
                continue;
            }
            for &(gb, eb, cb, wb) in &right {
                let g = ga + gb;
                if wa + wb > out.budget || g > out.max_genus {
                    continue;
                }
                let exp: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                *acc.entry((g, exp)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.coeffs = acc;
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, SeriesError> {
        let mut acc = self.constant_like(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplies by `t_k`; the region is unchanged.
    pub fn mul_var(&self, k: usize) -> Result<Self, SeriesError> {
        let i = self.var_index(k)?;
        let mut out = self.clone_shape();
        for ((g, e), c) in &self.coeffs {
            let mut e = e.clone();
            e[i] += 1;
            out.insert(*g, e, c.clone());
        }
        Ok(out)
    }

    /// `∂/∂t_k`; the budget drops by one.
    pub fn d(&self, k: usize) -> Result<Self, SeriesError> {
        let i = self.var_index(k)?;
        let mut out = self.clone_shape();
        out.budget = self.budget.saturating_sub(1);
        for ((g, e), c) in &self.coeffs {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.insert(*g, e2, c * int(e[i] as i64));
        }
        Ok(out)
    }

    /// Multiplies by `λ^{2h}`; coefficients pushed past `max_genus` or the
    /// budget are dropped.
    pub fn shift_genus(&self, h: u32) -> Self {
        let mut out = self.clone_shape();
        for ((g, e), c) in &self.coeffs {
            out.insert(g + h, e.clone(), c.clone());
        }
        out
    }

    /// Components of genus ≤ `g` only, same region otherwise.
    pub fn genus_le(&self, g: u32) -> Self {
        self.truncate(self.budget, g)
    }

    /// The genus-`g` coefficient series `u_g`, relabelled as a genus-0 box
    /// series valid through the degree known for that genus.
    pub fn genus_component(&self, g: u32) -> Option<Self> {
        let degree = self.degree_for_genus(g)?;
        let mut out = TruncatedSeries::zero(&self.vars, degree, 0, 0);
        for ((gg, e), c) in &self.coeffs {
            if *gg == g {
                out.insert(0, e.clone(), c.clone());
            }
        }
        Some(out)
    }

    /// `1/(1 − x)` for `x` with zero constant term (geometric series).
    pub fn one_minus_inverse(x: &Self) -> Result<Self, SeriesError> {
        if x.coeffs
            .keys()
            .any(|(g, e)| *g == 0 && e.iter().all(|&v| v == 0))
        {
            return Err(SeriesError::Malformed(
                "geometric series needs zero constant term".into(),
            ));
        }
        let one = x.constant_like(Rational::one());
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..=x.budget {
            power = power.mul(x)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// First disagreement inside the common validity region.
    pub fn first_mismatch(&self, other: &Self) -> Result<Option<Mismatch>, SeriesError> {
        self.check_compatible(other)?;
        let shape = self.meet_shape(other);
        let keys: std::collections::BTreeSet<&Key> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        for (g, e) in keys {
            if !shape.in_range(*g, e) {
                continue;
            }
            let a = self
                .coeffs
                .get(&(*g, e.clone()))
                .cloned()
                .unwrap_or_else(Rational::zero);
            let b = other
                .coeffs
                .get(&(*g, e.clone()))
                .cloned()
                .unwrap_or_else(Rational::zero);
            if a != b {
                return Ok(Some(Mismatch {
                    genus: *g,
                    exp: e.clone(),
                    left: a,
                    right: b,
                }));
            }
        }
        Ok(None)
    }

    /// The box `|α| ≤ max_degree`, `g ≤ max_genus` with `slack = 0`.
    pub fn to_box(&self, max_degree: u32, max_genus: u32) -> Self {
        let max_genus = max_genus.min(self.max_genus);
        let max_degree = (0..=max_genus)
            .filter_map(|g| self.degree_for_genus(g))
            .min()
            .unwrap_or(0)
            .min(max_degree);
        let mut out = TruncatedSeries::zero(&self.vars, max_degree, max_genus, 0);
        for ((g, e), c) in &self.coeffs {
            out.insert(*g, e.clone(), c.clone());
        }
        out
    }

    /// Evaluates `t_k ↦ 0` for every `k ≠ 0`, keeping `t0`.
    pub fn restrict_to_t0(&self) -> BTreeMap<(u32, u32), Rational> {
        let i0 = self.var_index(0).ok();
        self.coeffs
            .iter()
            .filter(|((_, e), _)| e.iter().enumerate().all(|(i, &v)| Some(i) == i0 || v == 0))
            .map(|((g, e), c)| ((*g, i0.map_or(0, |i| e[i])), c.clone()))
            .collect()
    }
}

/// Evaluates a differential polynomial on a series: `u_k ↦ ∂^k u/∂t0^k`
/// and `λ^{2g}` ↦ genus shift by `g`. Monomials whose genus exceeds the
/// series' `max_genus` are dropped with a warning.
pub fn substitute(p: &DiffPoly, u: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    u.var_index(0)?;
    let mut derivs = vec![u.clone()];
    for k in 1..=p.max_order().unwrap_or(0) {
        let next = derivs[k - 1].d(0)?;
        derivs.push(next);
    }
    let mut powers: BTreeMap<(usize, u32), TruncatedSeries> = BTreeMap::new();
    let mut acc: BTreeMap<Key, Rational> = BTreeMap::new();
    let mut budget = u.budget;
    let mut overflow = false;
    for (m, c) in p.terms() {
        if m.genus > u.max_genus {
            overflow = true;
            continue;
        }
        let mut prod = u.constant_like(c.clone());
        for (k, e) in m.jet.factors() {
            if let Entry::Vacant(slot) = powers.entry((k, e)) {
                slot.insert(derivs[k].pow(e)?);
            }
            prod = prod.mul(&powers[&(k, e)])?;
        }
        budget = budget.min((prod.budget + u.slack * m.genus).min(u.budget));
        for ((g, e), c) in prod.coeffs {
            *acc.entry((g + m.genus, e)).or_insert_with(Rational::zero) += c;
        }
    }
    if overflow {
        log::debug!("substitution dropped terms of genus above {}", u.max_genus);
    }
    let mut out = u.clone_shape();
    out.budget = budget;
    for ((g, e), c) in acc {
        out.insert(g, e, c);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    g: u32,
    exp: Vec<u32>,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    vars: Vec<String>,
    max_degree: u32,
    max_genus: u32,
    coeffs: Vec<CoeffJson>,
}

impl TruncatedSeries {
    /// JSON of the box view `|α| ≤ max_degree()`, `g ≤ max_genus()`:
    /// `{"vars":["t0","t2"],"max_degree":6,"max_genus":2,"coeffs":[{"g":1,"exp":[0,2],"c":"1/12"}]}`.
    pub fn to_json(&self) -> String {
        let boxed = self.to_box(self.max_degree(), self.max_genus);
        let doc = SeriesJson {
            vars: boxed.vars.iter().map(|k| format!("t{k}")).collect(),
            max_degree: boxed.max_degree(),
            max_genus: boxed.max_genus,
            coeffs: boxed
                .coeffs
                .iter()
                .map(|((g, e), c)| CoeffJson {
                    g: *g,
                    exp: e.clone(),
                    c: c.to_string(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("series serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SeriesError> {
        let doc: SeriesJson =
            serde_json::from_str(s).map_err(|e| SeriesError::Malformed(e.to_string()))?;
        let vars = doc
            .vars
            .iter()
            .map(|v| v.strip_prefix('t').and_then(|k| k.parse().ok()))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| SeriesError::Malformed("variable names must be t<k>".into()))?;
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != vars {
            return Err(SeriesError::Malformed(
                "variables must be distinct and increasing".into(),
            ));
        }
        let mut out = TruncatedSeries::zero(&vars, doc.max_degree, doc.max_genus, 0);
        for c in doc.coeffs {
            let value = rational::parse(&c.c)
                .ok_or_else(|| SeriesError::Malformed(format!("coefficient `{}`", c.c)))?;
            if c.exp.len() != vars.len() || !out.in_range(c.g, &c.exp) {
                return Err(SeriesError::OutOfTruncation {
                    genus: c.g,
                    exp: c.exp,
                });
            }
            out.insert(c.g, c.exp, value);
        }
        Ok(out)
    }

    fn monomial_text(&self, exp: &[u32]) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(exp)
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| {
                if e == 1 {
                    format!("t{k}")
                } else {
                    format!("t{k}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for TruncatedSeries {
    /// One line per genus: `g=1 [deg<=6]: 1/12*t2^2 + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in 0..=self.max_genus {
            let degree = self.degree_for_genus(g).unwrap_or(0);
            let terms: Vec<String> = self
                .coeffs
                .iter()
                .filter(|((gg, _), _)| *gg == g)
                .map(|((_, e), c)| {
                    let m = self.monomial_text(e);
                    if m.is_empty() {
                        c.to_string()
                    } else {
                        format!("{c}*{m}")
                    }
                })
                .collect();
            let body = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            };
            writeln!(f, "g={g} [deg<={degree}]: {}", body.replace("+ -", "- "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn t0_t2() -> TruncatedSeries {
        TruncatedSeries::zero(&[0, 2], 4, 1, 0)
    }

    #[test]
    fn products_truncate_by_degree_and_genus() {
        let s = t0_t2();
        let x = s
            .var_like(0)
            .unwrap()
            .add(&s.var_like(2).unwrap().shift_genus(1))
            .unwrap();
        let sq = x.pow(2).unwrap();
        assert_eq!(sq.coeff(0, &[2, 0]).unwrap(), int(1));
        assert_eq!(sq.coeff(1, &[1, 1]).unwrap(), int(2));
        // genus 2 is outside the region
        assert!(sq.coeffs().all(|((g, _), _)| *g <= 1));
        let high = x.pow(5).unwrap();
        assert!(high.is_zero());
    }

    #[test]
    fn derivative_lowers_budget() {
        let s = t0_t2();
        let x = s.var_like(0).unwrap().pow(3).unwrap();
        let d = x.d(0).unwrap();
        assert_eq!(d.budget(), 3);
        assert_eq!(d.coeff(0, &[2, 0]).unwrap(), int(3));
        assert!(d.coeff(0, &[4, 0]).is_err());
    }

    #[test]
    fn substitute_examples() {
        let s = TruncatedSeries::zero(&[0], 5, 1, 2);
        let t0 = s.var_like(0).unwrap();
        assert_eq!(substitute(&DiffPoly::u(0), &t0).unwrap(), t0);
        let r2: DiffPoly = "1/2*u0^2 + 1/12*L^2*u2".parse().unwrap();
        let got = substitute(&r2, &t0).unwrap();
        assert_eq!(got, t0.pow(2).unwrap().scale(&frac(1, 2)));
        // slack 2 absorbs the two derivatives of the genus-one term
        assert_eq!(got.budget(), t0.budget());
    }

    #[test]
    fn substitute_box_loses_derivative_orders() {
        let s = TruncatedSeries::zero(&[0], 5, 1, 0);
        let t0 = s.var_like(0).unwrap();
        let p: DiffPoly = "1*u0*u3".parse().unwrap();
        assert_eq!(substitute(&p, &t0).unwrap().budget(), 2);
    }

    #[test]
    fn substitute_drops_excess_genus() {
        let s = TruncatedSeries::zero(&[0], 3, 0, 0);
        let t0 = s.var_like(0).unwrap();
        let p: DiffPoly = "1*u0 + 1*L^2*u0".parse().unwrap();
        assert_eq!(substitute(&p, &t0).unwrap(), t0);
    }

    #[test]
    fn geometric_inverse() {
        let s = TruncatedSeries::zero(&[0], 5, 0, 0);
        let x = s.var_like(0).unwrap();
        let inv = TruncatedSeries::one_minus_inverse(&x).unwrap();
        for k in 0..=5 {
            assert_eq!(inv.coeff(0, &[k]).unwrap(), int(1));
        }
        assert!(TruncatedSeries::one_minus_inverse(&s.constant_like(int(1))).is_err());
    }

    #[test]
    fn json_shape_and_round_trip() {
        let s = TruncatedSeries::zero(&[0, 2], 6, 2, 0);
        let mut s2 = s.clone();
        s2.insert(1, vec![0, 2], frac(1, 12));
        let json = s2.to_json();
        assert_eq!(
            json,
            r#"{"vars":["t0","t2"],"max_degree":6,"max_genus":2,"coeffs":[{"g":1,"exp":[0,2],"c":"1/12"}]}"#
        );
        assert_eq!(TruncatedSeries::from_json(&json).unwrap(), s2);
        assert!(TruncatedSeries::from_json(
            r#"{"vars":["x"],"max_degree":1,"max_genus":0,"coeffs":[]}"#
        )
        .is_err());
        assert!(TruncatedSeries::from_json(
            r#"{"vars":["t0"],"max_degree":1,"max_genus":0,"coeffs":[{"g":0,"exp":[3],"c":"1"}]}"#
        )
        .is_err());
    }

    #[test]
    fn incompatible_series_are_rejected() {
        let a = TruncatedSeries::zero(&[0, 2], 3, 0, 0);
        let b = TruncatedSeries::zero(&[0, 1], 3, 0, 0);
        assert_eq!(a.add(&b), Err(SeriesError::Incompatible));
        assert_eq!(a.var_like(1), Err(SeriesError::UnknownVariable(1)));
    }
}
