//! Certifying formal antiderivative.
//!
//! `dx` maps the finite slot `(g, d, w-1)` into `(g, d, w)`. For each slot of
//! the input we enumerate the candidate monomials one weight lower, bring the
//! images `dx(b)` into echelon form and top-reduce the target against them.
//! A nonzero remainder is a proof that no antiderivative exists.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{DiffPoly, DiffPolyError, Jet, Monomial, Slot};
use crate::rational::Rational;

type SparseVec = BTreeMap<Jet, Rational>;

/// All jets of the given degree and weight, i.e. multisets of `degree`
/// derivative orders summing to `weight`.
pub fn candidate_jets(degree: u32, weight: u32) -> Vec<Jet> {
    fn go(
        remaining_deg: u32,
        remaining_wt: u32,
        min_order: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<Jet>,
    ) {
        if remaining_deg == 0 {
            if remaining_wt == 0 {
                out.push(Jet::from_exponents(exps.clone()));
            }
            return;
        }
        // Orders are chosen non-decreasing; each remaining factor costs at
        // least `min_order` weight.
        let mut order = min_order;
        while order * remaining_deg <= remaining_wt {
            let k = order as usize;
            if exps.len() <= k {
                exps.resize(k + 1, 0);
            }
            exps[k] += 1;
            go(remaining_deg - 1, remaining_wt - order, order, exps, out);
            exps[k] -= 1;
            order += 1;
        }
    }
    let mut out = Vec::new();
    go(degree, weight, 0, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn dx_jet(jet: &Jet) -> SparseVec {
    let mut out = SparseVec::new();
    for (k, e) in jet.factors() {
        let image = jet.bump(k, -1).bump(k + 1, 1);
        *out.entry(image).or_insert_with(Rational::zero) += Rational::from_integer(e.into());
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn axpy(target: &mut SparseVec, factor: &Rational, source: &SparseVec) {
    for (k, v) in source {
        let entry = target.entry(k.clone()).or_insert_with(Rational::zero);
        *entry -= factor * v;
        if entry.is_zero() {
            target.remove(k);
        }
    }
}

/// Echelon basis of `dx(span(candidates))` keyed by leading jet, each row
/// normalised to leading coefficient 1 and carrying its preimage.
struct Echelon {
    rows: BTreeMap<Jet, (SparseVec, SparseVec)>,
}

impl Echelon {
    fn build(candidates: &[Jet]) -> Self {
        let mut rows: BTreeMap<Jet, (SparseVec, SparseVec)> = BTreeMap::new();
        for b in candidates {
            let mut image = dx_jet(b);
            let mut pre: SparseVec = [(b.clone(), Rational::one())].into_iter().collect();
            while let Some((lead, lead_c)) =
                image.last_key_value().map(|(k, v)| (k.clone(), v.clone()))
            {
                match rows.get(&lead) {
                    Some((row, row_pre)) => {
                        axpy(&mut image, &lead_c, row);
                        axpy(&mut pre, &lead_c, row_pre);
                    }
                    None => {
                        let inv = lead_c.recip();
                        image.values_mut().for_each(|v| *v *= &inv);
                        pre.values_mut().for_each(|v| *v *= &inv);
                        rows.insert(lead, (image, pre));
                        break;
                    }
                }
            }
        }
        Echelon { rows }
    }

    /// Returns the preimage of `target`, or `None` when it is not in the span.
    fn solve(&self, mut target: SparseVec) -> Option<SparseVec> {
        let mut solution = SparseVec::new();
        while let Some((lead, lead_c)) =
            target.last_key_value().map(|(k, v)| (k.clone(), v.clone()))
        {
            let (row, row_pre) = self.rows.get(&lead)?;
            axpy(&mut target, &lead_c, row);
            axpy(&mut solution, &-lead_c, row_pre);
        }
        Some(solution)
    }
}

pub(super) fn antiderivative(p: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    let fail = || {
        let delta = p.var_delta();
        let obstruction = if delta.is_zero() {
            DiffPoly::constant(p.constant_term())
        } else {
            delta
        };
        DiffPolyError::NotATotalDerivative {
            poly: p.clone(),
            obstruction,
        }
    };
    let mut out = DiffPoly::zero();
    for (slot, part) in p.by_slot() {
        let Slot {
            genus,
            degree,
            weight,
        } = slot;
        if weight == 0 {
            return Err(fail());
        }
        let candidates = candidate_jets(degree, weight - 1);
        let echelon = Echelon::build(&candidates);
        let target: SparseVec = part
            .terms()
            .map(|(m, c)| (m.jet.clone(), c.clone()))
            .collect();
        let solution = echelon.solve(target).ok_or_else(fail)?;
        for (jet, c) in solution {
            out.add_term(Monomial::new(genus, jet), c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> DiffPoly {
        s.parse().unwrap()
    }

    #[test]
    fn candidate_counts_match_partitions() {
        // Jets of degree d and weight w are partitions of w into at most d parts.
        assert_eq!(candidate_jets(1, 5).len(), 1);
        assert_eq!(candidate_jets(2, 4).len(), 3); // u0u4, u1u3, u2^2
        assert_eq!(candidate_jets(3, 4).len(), 4); // 4, 3+1, 2+2, 2+1+1
        assert_eq!(candidate_jets(0, 0), vec![Jet::one()]);
        assert!(candidate_jets(0, 1).is_empty());
        for j in candidate_jets(3, 6) {
            assert_eq!((j.degree(), j.weight()), (3, 6));
        }
    }

    #[test]
    fn integrates_simple_derivatives() {
        assert_eq!(DiffPoly::u(1).antiderivative().unwrap(), DiffPoly::u(0));
        assert_eq!(p("1*u0*u1").antiderivative().unwrap(), p("1/2*u0^2"));
        assert_eq!(p("1*L^2*u3").antiderivative().unwrap(), p("1*L^2*u2"));
        assert!(DiffPoly::zero().antiderivative().unwrap().is_zero());
    }

    #[test]
    fn t2_from_u1_r2() {
        let r2 = p("1/2*u0^2 + 1/12*L^2*u2");
        let t2 = (&DiffPoly::u(1) * &r2).antiderivative().unwrap();
        assert_eq!(t2, p("1/6*u0^3 + 1/24*L^2*u1^2"));
    }

    #[test]
    fn rejects_non_derivatives() {
        let err = DiffPoly::u(0).antiderivative().unwrap_err();
        let DiffPolyError::NotATotalDerivative { obstruction, .. } = err else {
            panic!()
        };
        assert_eq!(obstruction, DiffPoly::one());

        // u1^2 has weight 2 but δ(u1^2) = -2u2 ≠ 0.
        assert!(p("1*u1^2").antiderivative().is_err());
        // A constant is never a total derivative.
        assert!(DiffPoly::one().antiderivative().is_err());
        // Mixed: one slot fine, one slot obstructed.
        assert!(p("1*u1 + 1*u0*u2").antiderivative().is_err());
    }
}
