//! The graded algebra of differential polynomials.
//!
//! Elements are finite sums of monomials `c · λ^{2g} · u0^{e0} u1^{e1} ...`
//! where `uk` stands for the k-th x-derivative of `u`. Only even powers of
//! `λ` are representable: a monomial stores the genus `g` instead.
//!
//! Degree of a monomial is `Σ e_k`, weight is `Σ k·e_k`. The total
//! derivative preserves degree and genus and raises weight by one, so every
//! linear question about `dx` splits into finite [`Slot`]s.

mod antiderivative;
mod format;
pub mod random;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{int, Rational};

pub use antiderivative::candidate_jets;
pub use format::{JsonPoly, JsonTerm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffPolyError {
    /// The input has no antiderivative in the algebra. `obstruction` is its
    /// variational derivative (or the input's constant term when that is
    /// what blocks integration).
    #[error("not a total derivative: {poly} (obstruction: {obstruction})")]
    NotATotalDerivative {
        poly: DiffPoly,
        obstruction: DiffPoly,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exponent vector `(e0, e1, ...)` with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Jet(Vec<u32>);

impl Jet {
    pub fn one() -> Self {
        Jet(Vec::new())
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Jet(exps)
    }

    /// The single variable `u_k`.
    pub fn var(k: usize) -> Self {
        let mut exps = vec![0; k + 1];
        exps[k] = 1;
        Jet(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, k: usize) -> u32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().enumerate().map(|(k, e)| k as u32 * e).sum()
    }

    /// Highest derivative order present, `None` for the constant monomial.
    pub fn max_order(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Nonzero `(k, e_k)` pairs.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied().enumerate().filter(|&(_, e)| e > 0)
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.0.len().max(other.0.len());
        let exps = (0..n)
            .map(|k| self.exponent(k) + other.exponent(k))
            .collect();
        Jet(exps)
    }

    /// Multiplies by `u_k^delta` where `delta` may be negative; the caller
    /// guarantees the result has no negative exponent.
    pub(crate) fn bump(&self, k: usize, delta: i32) -> Jet {
        let mut exps = self.0.clone();
        if exps.len() <= k {
            exps.resize(k + 1, 0);
        }
        exps[k] = (exps[k] as i64 + delta as i64) as u32;
        Jet::from_exponents(exps)
    }
}

impl Ord for Jet {
    /// Graded: higher degree first, then lexicographic with `u0` most
    /// significant (larger exponent first).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Jet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A monomial key `λ^{2 genus} · jet`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub genus: u32,
    pub jet: Jet,
}

impl Monomial {
    pub fn new(genus: u32, jet: Jet) -> Self {
        Monomial { genus, jet }
    }

    pub fn slot(&self) -> Slot {
        Slot {
            genus: self.genus,
            degree: self.jet.degree(),
            weight: self.jet.weight(),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genus
            .cmp(&other.genus)
            .then_with(|| self.jet.cmp(&other.jet))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A homogeneous component: genus, degree and weight of a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub genus: u32,
    pub degree: u32,
    pub weight: u32,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(g={}, deg={}, wt={})",
            self.genus, self.degree, self.weight
        )
    }
}

/// A differential polynomial with exact rational coefficients, stored in
/// canonical form: distinct monomials, no zero coefficients, ordered by
/// genus and then graded-lex on jets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, 0, Jet::one())
    }

    /// The jet variable `u_k`.
    pub fn u(k: usize) -> Self {
        DiffPoly::term(Rational::one(), 0, Jet::var(k))
    }

    pub fn term(coeff: Rational, genus: u32, jet: Jet) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::new(genus, jet), coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::new(0, Jet::one()))
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by `λ^{2h}`.
    pub fn shift_genus(&self, h: u32) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.genus + h, m.jet.clone()), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        (0..e).fold(DiffPoly::one(), |acc, _| &acc * self)
    }

    pub fn max_genus(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.genus).max()
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.jet.max_order()).max()
    }

    /// The `λ^{2g}` coefficient `p^{(g)}`, returned at genus 0.
    pub fn genus_part(&self, g: u32) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.genus == g)
                .map(|(m, c)| (Monomial::new(0, m.jet.clone()), c.clone()))
                .collect(),
        }
    }

    /// Keeps only the monomials of the given genus (genus label preserved).
    pub fn restrict_genus(&self, g: u32) -> DiffPoly {
        self.filter(|m| m.genus == g)
    }

    pub fn filter<F: Fn(&Monomial) -> bool>(&self, keep: F) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The total derivative `Σ_k u_{k+1} ∂/∂u_k`.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (k, e) in m.jet.factors() {
                let jet = m.jet.bump(k, -1).bump(k + 1, 1);
                out.add_term(Monomial::new(m.genus, jet), c * int(e as i64));
            }
        }
        out
    }

    pub fn dx_n(&self, n: usize) -> DiffPoly {
        (0..n).fold(self.clone(), |acc, _| acc.dx())
    }

    /// Formal partial derivative `∂/∂u_k`.
    pub fn pd(&self, k: usize) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.jet.exponent(k);
            if e > 0 {
                out.add_term(Monomial::new(m.genus, m.jet.bump(k, -1)), c * int(e as i64));
            }
        }
        out
    }

    /// The variational derivative `δ = Σ_k (-1)^k ∂_x^k ∂/∂u_k`.
    pub fn var_delta(&self) -> DiffPoly {
        let Some(top) = self.max_order() else {
            return DiffPoly::zero();
        };
        let mut out = DiffPoly::zero();
        for k in 0..=top {
            let term = self.pd(k).dx_n(k);
            if k % 2 == 0 {
                out += &term;
            } else {
                out -= &term;
            }
        }
        out
    }

    /// `(1 - λ ∂/∂λ)`: the `λ^{2g}` component is multiplied by `1 - 2g`.
    pub fn euler_lambda(&self) -> DiffPoly {
        self.map_genus_scalar(|g| int(1 - 2 * g as i64))
    }

    /// `½ λ ∂/∂λ`: the `λ^{2g}` component is multiplied by `g`.
    pub fn half_lambda_dlambda(&self) -> DiffPoly {
        self.map_genus_scalar(|g| int(g as i64))
    }

    fn map_genus_scalar<F: Fn(u32) -> Rational>(&self, f: F) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * f(m.genus));
        }
        out
    }

    /// Homogeneous slots occupied by the polynomial.
    pub fn grading(&self) -> BTreeSet<Slot> {
        self.terms.keys().map(Monomial::slot).collect()
    }

    /// Splits into homogeneous `(genus, degree, weight)` components.
    pub fn by_slot(&self) -> BTreeMap<Slot, DiffPoly> {
        let mut out: BTreeMap<Slot, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.slot())
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The degree-`n` homogeneous part (any genus).
    pub fn degree_part(&self, n: u32) -> DiffPoly {
        self.filter(|m| m.jet.degree() == n)
    }

    /// Formal antiderivative with zero constant term; see
    /// [`antiderivative`](self::antiderivative) for the algorithm.
    pub fn antiderivative(&self) -> Result<DiffPoly, DiffPolyError> {
        antiderivative::antiderivative(self)
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &'a DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &'a DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &'a DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl<'a> SubAssign<&'a DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &'a DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &'a DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(
                    Monomial::new(ma.genus + mb.genus, ma.jet.mul(&mb.jet)),
                    ca * cb,
                );
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn p(s: &str) -> DiffPoly {
        s.parse().unwrap()
    }

    #[test]
    fn dx_examples() {
        assert_eq!(DiffPoly::u(0).dx(), DiffPoly::u(1));
        assert_eq!(p("1/2*u0^2").dx(), p("1*u0*u1"));
        assert_eq!(p("1/2*u0^2 + 1/12*L^2*u2").dx(), p("1*u0*u1 + 1/12*L^2*u3"));
        assert!(DiffPoly::one().dx().is_zero());
    }

    #[test]
    fn pd_examples() {
        let uu = p("1*u0*u1");
        assert_eq!(uu.pd(0), DiffPoly::u(1));
        assert_eq!(uu.pd(1), DiffPoly::u(0));
        assert_eq!(p("1*L^2*u2^2").pd(2), p("2*L^2*u2"));
        assert!(uu.pd(5).is_zero());
    }

    #[test]
    fn var_delta_examples() {
        assert_eq!(p("1/2*u0^2").var_delta(), DiffPoly::u(0));
        assert_eq!(p("1*u1^2").var_delta(), p("-2*u2"));
        assert!(DiffPoly::one().var_delta().is_zero());
        assert_eq!(DiffPoly::u(0).var_delta(), DiffPoly::one());
    }

    #[test]
    fn euler_lambda_examples() {
        assert_eq!(p("1*u0^2").euler_lambda(), p("1*u0^2"));
        assert_eq!(
            p("1/2*u0^2 + 1/12*L^2*u2").euler_lambda(),
            p("1/2*u0^2 - 1/12*L^2*u2")
        );
        assert_eq!(p("1*L^4*u4").euler_lambda(), p("-3*L^4*u4"));
    }

    #[test]
    fn grading_examples() {
        let slots = |v: &[(u32, u32, u32)]| -> BTreeSet<Slot> {
            v.iter()
                .map(|&(genus, degree, weight)| Slot {
                    genus,
                    degree,
                    weight,
                })
                .collect()
        };
        assert_eq!(
            p("1/2*u0^2 + 1/12*L^2*u2").grading(),
            slots(&[(0, 2, 0), (1, 1, 2)])
        );
        assert_eq!(DiffPoly::one().grading(), slots(&[(0, 0, 0)]));
        let r3 = p("1/6*u0^3 + 1/12*L^2*u0*u2 + 1/24*L^2*u1^2 + 1/240*L^4*u4");
        assert_eq!(r3.grading(), slots(&[(0, 3, 0), (1, 2, 2), (2, 1, 4)]));
    }

    #[test]
    fn canonical_order_is_genus_major() {
        let q = p("1/12*L^2*u2 + 1/2*u0^2");
        let keys: Vec<u32> = q.terms().map(|(m, _)| m.genus).collect();
        assert_eq!(keys, vec![0, 1]);
        // Within a degree, u0 is the most significant variable.
        let q = p("1*u1^2 + 1*u0*u2");
        let first = q.terms().next().unwrap().0;
        assert_eq!(first.jet, Jet::from_exponents(vec![1, 0, 1]));
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = p("1/2*u0^2 + 1*u1");
        let b = p("1/2*u0^2");
        assert_eq!(&a - &b, DiffPoly::u(1));
        assert!((&a - &a).is_zero());
        assert_eq!(a.scale(&frac(0, 1)), DiffPoly::zero());
    }

    #[test]
    fn genus_part_and_shift() {
        let r2 = p("1/2*u0^2 + 1/12*L^2*u2");
        assert_eq!(r2.genus_part(1), p("1/12*u2"));
        assert_eq!(r2.genus_part(1).shift_genus(1), p("1/12*L^2*u2"));
        assert_eq!(r2.max_genus(), Some(1));
        assert_eq!(r2.max_order(), Some(2));
    }
}
