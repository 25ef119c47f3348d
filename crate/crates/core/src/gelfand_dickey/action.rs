//! The mean-field action density `Σ_n (t_n − δ_{n1}) T_n` with formal times.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::GdTable;
use crate::diffpoly::{DiffPoly, DiffPolyError};
use crate::rational::{int, Rational};
use crate::report::{Check, Report};

/// `constant + Σ_n t_n · by_time[n]` with `t_n` formal scalars.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimeLinear {
    pub constant: DiffPoly,
    pub by_time: BTreeMap<usize, DiffPoly>,
}

impl TimeLinear {
    fn add_scaled(&mut self, time: Option<usize>, p: &DiffPoly) {
        match time {
            None => self.constant += p,
            Some(n) => {
                let slot = self.by_time.entry(n).or_default();
                *slot += p;
                if slot.is_zero() {
                    self.by_time.remove(&n);
                }
            }
        }
    }

    /// Applies a linear operator on `A` coefficient-wise.
    pub fn map<F: Fn(&DiffPoly) -> DiffPoly>(&self, f: F) -> TimeLinear {
        TimeLinear {
            constant: f(&self.constant),
            by_time: self
                .by_time
                .iter()
                .map(|(&n, p)| (n, f(p)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }

    pub fn var_delta(&self) -> TimeLinear {
        self.map(DiffPoly::var_delta)
    }

    pub fn restrict_genus(&self, g: u32) -> TimeLinear {
        self.map(|p| p.restrict_genus(g))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.by_time.is_empty()
    }

    pub fn sub(&self, other: &TimeLinear) -> TimeLinear {
        let mut out = self.clone();
        out.add_scaled(None, &-&other.constant);
        for (&n, p) in &other.by_time {
            out.add_scaled(Some(n), &-p);
        }
        out
    }

    pub fn genera(&self) -> BTreeSet<u32> {
        std::iter::once(&self.constant)
            .chain(self.by_time.values())
            .flat_map(|p| p.terms().map(|(m, _)| m.genus))
            .collect()
    }
}

impl std::fmt::Display for TimeLinear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .by_time
            .iter()
            .map(|(n, p)| format!("t{n}*({p})"))
            .collect();
        if !self.constant.is_zero() {
            parts.push(format!("({})", self.constant));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `L = Σ_{n ≤ max_n} (t_n + shift_n) · T_n` where `shift_n = −δ_{n1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDensity {
    pub max_n: usize,
    pub shifts: BTreeMap<usize, Rational>,
    pub blocks: BTreeMap<usize, DiffPoly>,
}

pub fn lagrangian_expansion(
    table: &mut GdTable,
    max_n: usize,
) -> Result<ActionDensity, DiffPolyError> {
    // The −T₁ term is always present, even for max_n = 0.
    let top = max_n.max(1);
    table.extend_to(top)?;
    let shifts = (0..=top)
        .map(|n| {
            (
                n,
                if n == 1 {
                    -Rational::one()
                } else {
                    Rational::zero()
                },
            )
        })
        .collect();
    let blocks = (0..=top).map(|n| (n, table.t(n).clone())).collect();
    Ok(ActionDensity {
        max_n,
        shifts,
        blocks,
    })
}

impl ActionDensity {
    /// The density with `t_n` kept formal.
    pub fn density(&self) -> TimeLinear {
        let mut out = TimeLinear::default();
        for (&n, block) in &self.blocks {
            out.add_scaled(Some(n), block);
            let shift = &self.shifts[&n];
            if !shift.is_zero() {
                out.add_scaled(None, &block.scale(shift));
            }
        }
        out
    }

    /// `L₀`: the `λ⁰` part of the density.
    pub fn genus_zero(&self) -> TimeLinear {
        self.density().restrict_genus(0)
    }

    /// The density with every `t_n = 0`.
    pub fn at_zero_times(&self) -> DiffPoly {
        self.density().constant
    }

    fn multiplier_text(&self, n: usize) -> String {
        let shift = &self.shifts[&n];
        if shift.is_zero() {
            format!("t{n}")
        } else if shift.is_one() || *shift == -Rational::one() {
            let sign = if *shift > Rational::zero() { '+' } else { '-' };
            format!("(t{n} {sign} 1)")
        } else {
            format!("(t{n} + {shift})")
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("L =");
        for (i, (&n, block)) in self.blocks.iter().enumerate() {
            let sep = if i == 0 { " " } else { "\n  + " };
            write!(out, "{sep}{}*({block})", self.multiplier_text(n)).unwrap();
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::from("L = ");
        for (i, (&n, block)) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push_str(" \\\\\n  & + ");
            }
            let shift = &self.shifts[&n];
            let mult = if shift.is_zero() {
                format!("t_{{{n}}}")
            } else {
                format!(
                    "(t_{{{n}}} {} {})",
                    if *shift > Rational::zero() { '+' } else { '-' },
                    crate::rational::to_latex(&shift.abs())
                )
            };
            write!(out, "{mult} \\left({}\\right)", block.to_latex()).unwrap();
        }
        out
    }
}

/// Checks, per genus `g ≤ max_g`, that `δ` of the action density equals
/// `Σ_n (t_n − δ_{n1}) (1 − 2g) λ^{2g} R_n^{(g)}`, and that this is a
/// nonzero multiple of the genus-`g` component of the string equation
/// `Σ_n (t_n − δ_{n1}) R_n`.
pub fn euler_lagrange_check(table: &mut GdTable, max_n: usize, max_g: u32) -> Report {
    let mut report = Report::default();
    let action = match lagrangian_expansion(table, max_n) {
        Ok(a) => a,
        Err(e) => {
            report.push(Check::fail("action construction", e.to_string()));
            return report;
        }
    };
    let el = action.density().var_delta();
    let mut string_side = TimeLinear::default();
    for (&n, shift) in &action.shifts {
        let r = table.r(n);
        string_side.add_scaled(Some(n), r);
        if !shift.is_zero() {
            string_side.add_scaled(None, &r.scale(shift));
        }
    }
    let expected = string_side.map(DiffPoly::euler_lambda);
    for g in 0..=max_g {
        let name = format!("Euler-Lagrange genus {g} (n <= {max_n})");
        let diff = el.restrict_genus(g).sub(&expected.restrict_genus(g));
        let factor = int(1 - 2 * g as i64);
        let scaled = string_side.restrict_genus(g).map(|p| p.scale(&factor));
        let proportional = scaled == expected.restrict_genus(g) && !factor.is_zero();
        if diff.is_zero() && proportional {
            report.push(Check::pass(
                name,
                format!("delta S^({g}) = {factor} * string^({g})"),
            ));
        } else {
            report.push(Check::fail(name, format!("residual {diff}")));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block() {
        let mut table = GdTable::new();
        let a = lagrangian_expansion(&mut table, 1).unwrap();
        assert_eq!(a.to_text(), "L = t0*(1*u0)\n  + (t1 - 1)*(1/2*u0^2)");
        assert_eq!(a.at_zero_times(), "-1/2*u0^2".parse().unwrap());
    }

    #[test]
    fn genus_zero_part_is_power_series() {
        let mut table = GdTable::new();
        let a = lagrangian_expansion(&mut table, 6).unwrap();
        let l0 = a.genus_zero();
        for n in 0..=6u32 {
            let expected = DiffPoly::u(0)
                .pow(n + 1)
                .scale(&Rational::new(1.into(), crate::rational::factorial(n + 1)));
            assert_eq!(l0.by_time[&(n as usize)], expected);
        }
        assert_eq!(l0.constant, "-1/2*u0^2".parse().unwrap());
    }

    #[test]
    fn euler_lagrange_passes() {
        let mut table = GdTable::new();
        let r = euler_lagrange_check(&mut table, 4, 2);
        assert!(r.all_passed(), "{r}");
        assert_eq!(r.checks.len(), 3);
    }

    #[test]
    fn euler_lagrange_flow_one() {
        let mut table = GdTable::new();
        let a = lagrangian_expansion(&mut table, 1).unwrap();
        let el = a.density().var_delta();
        assert_eq!(el.by_time[&1], DiffPoly::u(0));
        assert_eq!(el.constant, -DiffPoly::u(0));
    }

    #[test]
    fn latex_has_shifted_multiplier() {
        let mut table = GdTable::new();
        let a = lagrangian_expansion(&mut table, 2).unwrap();
        let tex = a.to_latex();
        assert!(tex.starts_with("L = t_{0} \\left(u\\right)"), "{tex}");
        assert!(
            tex.contains("(t_{1} - 1) \\left(\\frac{1}{2} u^2\\right)"),
            "{tex}"
        );
    }
}
