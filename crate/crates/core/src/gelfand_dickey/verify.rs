//! Exact verifiers for the variational identities of `R_n` and `T_n`, and
//! seeded randomized suites for the operator identities on `A`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::GdTable;
use crate::diffpoly::random::{random_homogeneous, random_poly, RandomBounds};
use crate::diffpoly::DiffPoly;
use crate::rational::{factorial, int, Rational};
use crate::report::{Check, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityFamily {
    /// `δR_{n+1} = R_n`
    DeltaR,
    /// `δ(u R_n) = (n+1) R_n − ½λ∂_λ R_n`
    DeltaUR,
    /// `δT_n = (1 − λ∂_λ) R_n`
    DeltaT,
    /// `R_n^{(g)} ∈ A_{n−g}` with weight `2g`
    Grading,
    /// `R_n^{(0)} = uⁿ/n!`
    GenusZero,
}

impl IdentityFamily {
    pub const ALL: [IdentityFamily; 5] = [
        IdentityFamily::DeltaR,
        IdentityFamily::DeltaUR,
        IdentityFamily::DeltaT,
        IdentityFamily::Grading,
        IdentityFamily::GenusZero,
    ];

    pub fn label(self) -> &'static str {
        match self {
            IdentityFamily::DeltaR => "(a) delta R[n+1] = R[n]",
            IdentityFamily::DeltaUR => "(b) delta(u R[n]) = (n+1) R[n] - 1/2 L dL R[n]",
            IdentityFamily::DeltaT => "(c) delta T[n] = (1 - L dL) R[n]",
            IdentityFamily::Grading => "(d) R[n]^(g) in A[n-g], weight 2g",
            IdentityFamily::GenusZero => "(e) R[n]^(0) = u^n/n!",
        }
    }

    pub fn check_name(self, n: usize) -> String {
        format!("{} @ n={n}", self.label())
    }
}

fn equality(name: String, lhs: &DiffPoly, rhs: &DiffPoly) -> Check {
    if lhs == rhs {
        Check::pass(name, "")
    } else {
        Check::fail(name, format!("difference = {}", lhs - rhs))
    }
}

fn check_family(table: &GdTable, family: IdentityFamily, n: usize) -> Check {
    let name = family.check_name(n);
    let r = table.r(n);
    match family {
        IdentityFamily::DeltaR => equality(name, &table.r(n + 1).var_delta(), r),
        IdentityFamily::DeltaUR => {
            let lhs = (&DiffPoly::u(0) * r).var_delta();
            let rhs = &r.scale(&int(n as i64 + 1)) - &r.half_lambda_dlambda();
            equality(name, &lhs, &rhs)
        }
        IdentityFamily::DeltaT => equality(name, &table.t(n).var_delta(), &r.euler_lambda()),
        IdentityFamily::Grading => {
            let bad: Vec<String> = r
                .grading()
                .into_iter()
                .filter(|s| s.degree as i64 != n as i64 - s.genus as i64 || s.weight != 2 * s.genus)
                .map(|s| s.to_string())
                .collect();
            if bad.is_empty() {
                Check::pass(name, "")
            } else {
                Check::fail(name, format!("unexpected slots {}", bad.join(", ")))
            }
        }
        IdentityFamily::GenusZero => {
            let expected = DiffPoly::u(0)
                .pow(n as u32)
                .scale(&Rational::new(1.into(), factorial(n as u32)));
            equality(name, &r.genus_part(0), &expected)
        }
    }
}

/// Checks all five identity families for `n = 0..=max_n`. Extends the
/// table as needed; a failure to extend is reported, not raised.
pub fn verify_identities(table: &mut GdTable, max_n: usize) -> Report {
    let mut report = Report::default();
    if let Err(e) = table.extend_to(max_n + 1) {
        report.push(Check::fail("table construction", e.to_string()));
        return report;
    }
    let table = &*table;
    let checks: Vec<Vec<Check>> = (0..=max_n)
        .into_par_iter()
        .map(|n| {
            IdentityFamily::ALL
                .iter()
                .map(|&f| check_family(table, f, n))
                .collect()
        })
        .collect();
    // Group by family, then n, independent of completion order.
    for idx in 0..IdentityFamily::ALL.len() {
        for row in &checks {
            report.push(row[idx].clone());
        }
    }
    report
}

/// Randomized operator identities on `A`, each over `cases` seeded inputs:
/// `δ∘∂x = 0`, `δ(u1·δf) = 0`, `δ(u·δf) = n·δf` for `f ∈ A_n` (n ≤ 6),
/// the commutator `[∂/∂u_k, ∂x] = ∂/∂u_{k−1}`, and exactness of
/// `antiderivative` as a decision procedure.
pub fn random_suites(seed: u64, cases: usize) -> Report {
    let bounds = RandomBounds::default();
    let mut report = Report::default();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<DiffPoly> = (0..cases).map(|_| random_poly(&mut rng, &bounds)).collect();

    let count = |name: &str, failures: Vec<String>| {
        if failures.is_empty() {
            Check::pass(name, format!("{cases} cases, seed {seed}"))
        } else {
            Check::fail(
                name,
                format!(
                    "{} of {cases} failed (seed {seed}); first: {}",
                    failures.len(),
                    failures[0]
                ),
            )
        }
    };

    let fails: Vec<String> = inputs
        .iter()
        .filter(|q| !q.dx().var_delta().is_zero())
        .map(|q| q.to_string())
        .collect();
    report.push(count("random: delta(dx q) = 0", fails));

    let fails: Vec<String> = inputs
        .iter()
        .filter(|f| !(&DiffPoly::u(1) * &f.var_delta()).var_delta().is_zero())
        .map(|f| f.to_string())
        .collect();
    report.push(count("random: delta(u1 delta f) = 0", fails));

    let mut fails = Vec::new();
    for i in 0..cases {
        let n = (i % 7) as u32;
        let f = random_homogeneous(&mut rng, n, &bounds);
        let df = f.var_delta();
        if (&DiffPoly::u(0) * &df).var_delta() != df.scale(&int(n as i64)) {
            fails.push(format!("n={n}: {f}"));
        }
    }
    report.push(count("random: delta(u delta f) = n delta f", fails));

    let mut fails = Vec::new();
    for q in &inputs {
        for k in 0..=bounds.max_order + 1 {
            let lhs = &q.dx().pd(k) - &q.pd(k).dx();
            let rhs = if k == 0 {
                DiffPoly::zero()
            } else {
                q.pd(k - 1)
            };
            if lhs != rhs {
                fails.push(format!("k={k}: {q}"));
            }
        }
    }
    report.push(count("random: [d/du_k, dx] = d/du_(k-1)", fails));

    let mut fails = Vec::new();
    for q in &inputs {
        // Constants (at any genus) are the kernel of dx.
        let q0 = q.filter(|m| !m.jet.is_one());
        match q0.dx().antiderivative() {
            Ok(back) if back == q0 => {}
            Ok(back) => fails.push(format!("recovered {back} from {q0}")),
            Err(e) => fails.push(e.to_string()),
        }
        let obstructed = q0.var_delta();
        if !obstructed.is_zero() && q0.antiderivative().is_ok() {
            fails.push(format!("integrated {q0} although delta = {obstructed}"));
        }
    }
    report.push(count("random: antiderivative decides exactness", fails));

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_through_six() {
        let mut table = GdTable::new();
        let report = verify_identities(&mut table, 6);
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.checks.len(), 5 * 7);
    }

    #[test]
    fn delta_t2_hand_value() {
        let table = GdTable::with_max_n(3).unwrap();
        let expected: DiffPoly = "1/2*u0^2 - 1/12*L^2*u2".parse().unwrap();
        assert_eq!(table.t(2).var_delta(), expected);
        assert_eq!(table.r(1).var_delta(), DiffPoly::one());
    }

    #[test]
    fn corrupted_table_is_reported() {
        let mut table = GdTable::with_max_n(4).unwrap();
        let mut entries = table.entries().to_vec();
        entries[2].r = &entries[2].r + &DiffPoly::u(0).pow(2);
        table = GdTable::from_entries(entries).unwrap();
        let report = verify_identities(&mut table, 3);
        assert!(!report.all_passed());
        assert!(
            !report
                .find(&IdentityFamily::DeltaR.check_name(1))
                .unwrap()
                .passed
        );
    }

    #[test]
    fn random_suites_pass() {
        let report = random_suites(20240601, 100);
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.checks.len(), 5);
    }
}
