//! Brute-force solution of the string equation `u = x + Σ_k t_k R_k[u]` and
//! the checks built on it.

use num_traits::{One, Zero};

use super::{substitute, SeriesError, TruncatedSeries};
use crate::gelfand_dickey::GdTable;
use crate::rational::{factorial, Rational};
use crate::report::Check;

/// Degree bonus per genus step: `R_n^{(g)}` carries exactly `2g`
/// derivatives, so `|α| + 2g` is the grading in which the string equation is
/// contracting.
const SLACK: u32 = 2;

#[derive(Clone, Debug)]
pub struct StringSolution {
    /// Valid for `|α| + 2g ≤ max_degree + 2·max_genus`, in particular on the
    /// box `|α| ≤ max_degree`, `g ≤ max_genus`.
    pub u: TruncatedSeries,
    pub active: Vec<usize>,
    pub max_degree: u32,
    pub max_genus: u32,
    pub iterations: usize,
    /// First iteration after which the iterate stopped changing.
    pub stable_after: usize,
}

impl StringSolution {
    pub fn vars(&self) -> &[usize] {
        self.u.vars()
    }

    /// The solution on the box `|α| ≤ max_degree`, `g ≤ max_genus`.
    pub fn boxed(&self) -> TruncatedSeries {
        self.u.to_box(self.max_degree, self.max_genus)
    }
}

fn normalize_active(active: &[usize]) -> Vec<usize> {
    let mut a: Vec<usize> = active.iter().copied().filter(|&k| k != 0).collect();
    a.sort_unstable();
    a.dedup();
    a
}

/// One application of `u ↦ t0 + Σ_{k ∈ active} t_k R_k[u]`.
fn string_map(
    table: &GdTable,
    active: &[usize],
    u: &TruncatedSeries,
) -> Result<TruncatedSeries, SeriesError> {
    let mut next = u.var_like(0)?;
    for &k in active {
        let term = substitute(table.r(k), u)?.mul_var(k)?;
        next = next.add(&term)?;
    }
    Ok(next.truncate(u.budget(), u.max_genus()))
}

/// Solves the string equation over the times `{t0} ∪ active` by fixed-point
/// iteration from `u = t0`. Each pass fixes one more weighted degree
/// `|α| + 2g`, so `max_degree + 2·max_genus + 1` passes reach the fixed point.
pub fn solve_string(
    table: &mut GdTable,
    active: &[usize],
    max_degree: u32,
    max_genus: u32,
) -> Result<StringSolution, SeriesError> {
    let active = normalize_active(active);
    if let Some(&top) = active.last() {
        table
            .extend_to(top + 1)
            .map_err(|e| SeriesError::Malformed(e.to_string()))?;
    }
    let mut vars = vec![0];
    vars.extend(&active);
    let shape = TruncatedSeries::zero(&vars, max_degree, max_genus, SLACK);
    let mut u = shape.var_like(0)?;
    let iterations = shape.budget() as usize + 1;
    let mut stable_after = 0;
    for i in 1..=iterations {
        let next = string_map(table, &active, &u)?;
        if next == u && stable_after == 0 {
            stable_after = i - 1;
        }
        u = next;
    }
    if stable_after == 0 {
        stable_after = iterations;
    }
    Ok(StringSolution {
        u,
        active,
        max_degree,
        max_genus,
        iterations,
        stable_after,
    })
}

impl StringSolution {
    /// Applies the string map once more; a converged solution is unchanged.
    pub fn residual_check(&self, table: &GdTable) -> Result<Check, SeriesError> {
        let next = string_map(table, &self.active, &self.u)?;
        Ok(match next.first_mismatch(&self.u)? {
            None => Check::pass(
                "string equation fixed point",
                format!("stable after {} passes", self.stable_after),
            ),
            Some(m) => Check::fail("string equation fixed point", m.to_string()),
        })
    }
}

fn compare(
    name: String,
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
) -> Result<Check, SeriesError> {
    Ok(match lhs.first_mismatch(rhs)? {
        None => Check::pass(
            name,
            format!(
                "agree for |alpha| + 2g <= {}",
                lhs.budget().min(rhs.budget())
            ),
        ),
        Some(m) => Check::fail(name, format!("first difference at {m}")),
    })
}

/// `∂u/∂t_n = ∂_{t0} R_{n+1}[u]` within the truncation (one order is lost
/// to differentiation).
pub fn check_kdv(
    table: &mut GdTable,
    sol: &StringSolution,
    n: usize,
) -> Result<Check, SeriesError> {
    table
        .extend_to(n + 1)
        .map_err(|e| SeriesError::Malformed(e.to_string()))?;
    let lhs = sol.u.d(n)?;
    let rhs = substitute(table.r(n + 1), &sol.u)?.d(0)?;
    compare(format!("KdV flow t{n}"), &lhs, &rhs)
}

/// The differentiated puncture equation `∂u/∂t0 = 1 + Σ_k t_k ∂u/∂t_{k−1}`.
/// When `t_{k−1}` is not a variable of the solution, `∂u/∂t_{k−1}` at
/// `t_{k−1} = 0` is supplied by the KdV flow `∂_{t0} R_k[u]`.
pub fn check_puncture(table: &mut GdTable, sol: &StringSolution) -> Result<Check, SeriesError> {
    let lhs = sol.u.d(0)?;
    let mut rhs = lhs.constant_like(Rational::one());
    for &k in &sol.active {
        let flow = if sol.vars().contains(&(k - 1)) {
            sol.u.d(k - 1)?
        } else {
            table
                .extend_to(k)
                .map_err(|e| SeriesError::Malformed(e.to_string()))?;
            substitute(table.r(k), &sol.u)?.d(0)?
        };
        rhs = rhs.add(&flow.mul_var(k)?)?;
    }
    compare("puncture equation".to_string(), &lhs, &rhs)
}

/// `λ²·∂F/∂t0 = Σ_n (t_n − δ_{n1}) T_n[u]`, up to the opaque `F|_{t0=0}`.
#[derive(Clone, Debug)]
pub struct FreeEnergyPart {
    pub df_dt0: TruncatedSeries,
}

impl FreeEnergyPart {
    /// The derivative form of the free-energy reconstruction:
    /// `∂/∂t0 Σ_n (t_n − δ_{n1}) T_n[u] = u`.
    pub fn check(&self, sol: &StringSolution) -> Result<Check, SeriesError> {
        compare(
            "free energy: d/dt0 sum (t_n - delta_n1) T_n[u] = u".to_string(),
            &self.df_dt0.d(0)?,
            &sol.u,
        )
    }
}

pub fn reconstruct_df(
    table: &mut GdTable,
    sol: &StringSolution,
) -> Result<FreeEnergyPart, SeriesError> {
    let top = sol.active.last().copied().unwrap_or(0).max(1);
    table
        .extend_to(top)
        .map_err(|e| SeriesError::Malformed(e.to_string()))?;
    let mut total = substitute(table.t(0), &sol.u)?.mul_var(0)?;
    total = total.sub(&substitute(table.t(1), &sol.u)?)?;
    for &k in &sol.active {
        total = total.add(&substitute(table.t(k), &sol.u)?.mul_var(k)?)?;
    }
    Ok(FreeEnergyPart { df_dt0: total })
}

/// Genus-zero fixed point `u0 = t0 + Σ_k t_k u0^k / k!`, iterated
/// `max_degree + 1` times on the box `|α| ≤ max_degree`.
pub fn landau_ginzburg_solve(
    active: &[usize],
    max_degree: u32,
) -> Result<TruncatedSeries, SeriesError> {
    let active = normalize_active(active);
    let mut vars = vec![0];
    vars.extend(&active);
    let shape = TruncatedSeries::zero(&vars, max_degree, 0, 0);
    let mut u = shape.var_like(0)?;
    for _ in 0..=max_degree {
        let mut next = shape.var_like(0)?;
        for &k in &active {
            let inv_fact = Rational::new(1.into(), factorial(k as u32));
            next = next.add(&u.pow(k as u32)?.scale(&inv_fact).mul_var(k)?)?;
        }
        u = next;
    }
    Ok(u)
}

/// The correlator `⟨τ0² Π τ_a^{α_a}⟩_g = α! · [t^α] u_g`, where `alpha` is
/// aligned with the solution's variables.
pub fn intersection_coefficient(
    sol: &StringSolution,
    genus: u32,
    alpha: &[u32],
) -> Result<Rational, SeriesError> {
    let c = sol.u.coeff(genus, alpha)?;
    let weight = alpha
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, &a| acc * factorial(a));
    if c.is_zero() {
        return Ok(c);
    }
    Ok(c * Rational::from_integer(weight))
}

/// `⟨τ0^2 τ2^2⟩_1`-style label for a coefficient of `u`.
pub fn correlator_label(vars: &[usize], genus: u32, alpha: &[u32]) -> String {
    let mut counts: std::collections::BTreeMap<usize, u32> = std::collections::BTreeMap::new();
    counts.insert(0, 2);
    for (&k, &a) in vars.iter().zip(alpha) {
        *counts.entry(k).or_insert(0) += a;
    }
    let inner: Vec<String> = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| {
            if c == 1 {
                format!("τ{k}")
            } else {
                format!("τ{k}^{c}")
            }
        })
        .collect();
    format!("⟨{}⟩_{genus}", inner.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn empty_active_set_gives_t0() {
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[], 5, 2).unwrap();
        assert_eq!(sol.u, sol.u.var_like(0).unwrap());
        assert_eq!(
            landau_ginzburg_solve(&[], 5).unwrap(),
            TruncatedSeries::zero(&[0], 5, 0, 0).var_like(0).unwrap()
        );
    }

    #[test]
    fn linear_flow_is_geometric() {
        // u = t0 + t1 u  ⇒  u = t0 / (1 - t1)
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[1], 6, 0).unwrap();
        for j in 0..6 {
            assert_eq!(sol.u.coeff(0, &[1, j]).unwrap(), int(1));
        }
        assert_eq!(sol.u.coeff(0, &[2, 1]).unwrap(), int(0));
        let lg = landau_ginzburg_solve(&[1], 6).unwrap();
        assert_eq!(lg, sol.boxed());
    }

    #[test]
    fn genus_zero_slice_is_landau_ginzburg() {
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[1, 2, 3], 5, 1).unwrap();
        let lg = landau_ginzburg_solve(&[1, 2, 3], 5).unwrap();
        assert_eq!(sol.boxed().to_box(5, 0), lg);
    }

    #[test]
    fn fixed_point_is_stable() {
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[2], 6, 2).unwrap();
        assert!(sol.stable_after <= sol.iterations);
        assert!(sol.residual_check(&table).unwrap().passed);
    }

    #[test]
    fn kdv_and_puncture() {
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[1, 2], 5, 1).unwrap();
        for n in [0, 1, 2] {
            let c = check_kdv(&mut table, &sol, n).unwrap();
            assert!(c.passed, "{c}");
        }
        let c = check_puncture(&mut table, &sol).unwrap();
        assert!(c.passed, "{c}");
        let sol = solve_string(&mut table, &[2], 6, 2).unwrap();
        assert!(check_puncture(&mut table, &sol).unwrap().passed);
        assert!(check_kdv(&mut table, &sol, 2).unwrap().passed);
    }

    #[test]
    fn kdv_detects_a_wrong_solution() {
        let mut table = GdTable::new();
        let mut sol = solve_string(&mut table, &[2], 5, 1).unwrap();
        sol.u.insert(1, vec![1, 3], frac(1, 7));
        assert!(!check_kdv(&mut table, &sol, 2).unwrap().passed);
        assert!(!check_puncture(&mut table, &sol).unwrap().passed);
    }

    #[test]
    fn free_energy_derivative() {
        let mut table = GdTable::new();
        for (active, g) in [
            (vec![], 0),
            (vec![2], 0),
            (vec![2], 1),
            (vec![1, 2], 1),
            (vec![3], 2),
        ] {
            let sol = solve_string(&mut table, &active, 6, g).unwrap();
            let df = reconstruct_df(&mut table, &sol).unwrap();
            let c = df.check(&sol).unwrap();
            assert!(c.passed, "{active:?} g={g}: {c}");
        }
        // all times zero: t0·T0 − T1 = t0² − t0²/2
        let sol = solve_string(&mut table, &[], 4, 0).unwrap();
        let df = reconstruct_df(&mut table, &sol).unwrap();
        assert_eq!(df.df_dt0.coeff(0, &[2]).unwrap(), frac(1, 2));
    }

    #[test]
    fn correlators_from_the_oracle() {
        let mut table = GdTable::new();
        let sol = solve_string(&mut table, &[2], 6, 1).unwrap();
        assert_eq!(intersection_coefficient(&sol, 0, &[1, 0]).unwrap(), int(1));
        assert_eq!(
            intersection_coefficient(&sol, 1, &[0, 2]).unwrap(),
            frac(1, 6)
        );
        assert!(intersection_coefficient(&sol, 3, &[0, 0]).is_err());
        assert_eq!(correlator_label(sol.vars(), 1, &[0, 2]), "⟨τ0^2 τ2^2⟩_1");
        assert_eq!(correlator_label(sol.vars(), 0, &[1, 0]), "⟨τ0^3⟩_0");
    }
}
