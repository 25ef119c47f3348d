//! The `(t0, t2)` restriction of the string equation: closed forms for the
//! genus components `u_g`, the `c_g` and `a_n` recursions, float
//! diagnostics of their growth and divergence certificates for the genus
//! series.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gelfand_dickey::GdTable;
use crate::rational::{binomial, factorial, frac, int, ln_bigint, Rational};
use crate::report::Check;
use crate::series::{landau_ginzburg_solve, substitute, SeriesError, TruncatedSeries};

const VARS: [usize; 2] = [0, 2];

/// The recursion `c_g = ½ Σ_{g1=1}^{g−1} c_{g1} c_{g−g1} + (5g−4)(5g−6)/12 · c_{g−1}`
/// with `c_0 = −1`, for `g = 0..=max_g`.
pub fn c_sequence(max_g: u32) -> Vec<Rational> {
    let mut c = vec![int(-1)];
    for g in 1..=max_g as i64 {
        let mut acc = Rational::zero();
        for g1 in 1..g {
            acc += &c[g1 as usize] * &c[(g - g1) as usize];
        }
        acc /= int(2);
        acc += frac((5 * g - 4) * (5 * g - 6), 12) * &c[(g - 1) as usize];
        c.push(acc);
    }
    c
}

fn power_text(p: &Rational) -> String {
    if p.is_integer() {
        p.to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

/// `u_g = c_g t2^{3g−1} (1 − 2 t0 t2)^{−(5g−1)/2} + δ_{g0} / t2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusClosedForm {
    pub g: u32,
    pub c: Rational,
    pub t2_power: i64,
    pub s_power: Rational,
    pub extra_inverse_t2: bool,
}

pub fn closed_form_ug(g: u32) -> GenusClosedForm {
    GenusClosedForm::with_coefficient(g, c_sequence(g).pop().expect("nonempty"))
}

impl GenusClosedForm {
    fn with_coefficient(g: u32, c: Rational) -> Self {
        GenusClosedForm {
            g,
            c,
            t2_power: 3 * g as i64 - 1,
            s_power: frac(-(5 * g as i64 - 1), 2),
            extra_inverse_t2: g == 0,
        }
    }

    /// Coefficient of `t0^j t2^{3g−1+j}`: `c_g · binom(s_power, j) · (−2)^j`.
    /// At genus 0 the `j = 0` term cancels against `1/t2`.
    pub fn coefficient(&self, j: u32) -> Rational {
        if self.extra_inverse_t2 && j == 0 {
            return Rational::zero();
        }
        let sign_pow = num_traits::pow(int(-2), j as usize);
        &self.c * binomial(&self.s_power, j) * sign_pow
    }

    /// Total `t`-degree of the `t0^j` term.
    pub fn degree_of(&self, j: u32) -> i64 {
        self.t2_power + 2 * j as i64
    }

    /// Inserts the expansion into `out` at genus `genus`, restricted to the
    /// region of `out`.
    fn expand_into(&self, out: &mut TruncatedSeries, genus: u32) {
        for j in 0.. {
            let deg = self.degree_of(j);
            if deg < 0 {
                continue;
            }
            let exp = vec![j, (self.t2_power + j as i64) as u32];
            if !out.in_range(genus, &exp) {
                break;
            }
            out.insert(genus, exp, self.coefficient(j));
        }
    }

    /// The expansion about `t0 = 0` through total degree `max_degree`, as a
    /// genus-0 series in `(t0, t2)`.
    pub fn expand(&self, max_degree: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(&VARS, max_degree, 0, 0);
        self.expand_into(&mut out, 0);
        out
    }

    pub fn to_text(&self) -> String {
        if self.extra_inverse_t2 {
            return format!("(1-(1-2*t0*t2)^({}))/t2", power_text(&self.s_power));
        }
        format!(
            "{}*t2^{}*(1-2*t0*t2)^({})",
            self.c,
            self.t2_power,
            power_text(&self.s_power)
        )
    }

    pub fn to_latex(&self) -> String {
        if self.extra_inverse_t2 {
            return format!(
                "\\frac{{1-(1-2t_0t_2)^{{{}}}}}{{t_2}}",
                power_text(&self.s_power)
            );
        }
        let t2 = if self.t2_power == 1 {
            "t_2".to_string()
        } else {
            format!("t_2^{}", self.t2_power)
        };
        format!(
            "{} {t2} (1-2t_0t_2)^{{{}}}",
            crate::rational::to_latex(&self.c),
            power_text(&self.s_power)
        )
    }
}

/// `Σ_{g ≤ max_genus} λ^{2g} u_g` from the closed forms, on the region
/// `|α| + slack·g ≤ max_degree + slack·max_genus`.
pub fn closed_form_series(max_degree: u32, max_genus: u32, slack: u32) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(&VARS, max_degree, max_genus, slack);
    let cs = c_sequence(max_genus);
    for (g, c) in cs.into_iter().enumerate() {
        GenusClosedForm::with_coefficient(g as u32, c).expand_into(&mut out, g as u32);
    }
    out
}

/// `u_g` to total degree `max_degree` from the resolvent form
/// `u_g = t2/(1 − t2 u0) · (½ Σ_{g1=1}^{g−1} u_{g1} u_{g−g1} + (1/12) ∂²u_{g−1}/∂t0²)`,
/// with `u0` from the genus-zero fixed point. Independent of the closed forms.
pub fn ug_by_recursion(g: u32, max_degree: u32) -> Result<TruncatedSeries, SeriesError> {
    let top = max_degree + 2 * g;
    let u0 = landau_ginzburg_solve(&[2], top)?;
    let prefactor = TruncatedSeries::one_minus_inverse(&u0.mul_var(2)?)?.mul_var(2)?;
    let mut us = vec![u0];
    for h in 1..=g {
        let budget = max_degree + 2 * (g - h);
        let mut inner = us[h as usize - 1].d(0)?.d(0)?.scale(&frac(1, 12));
        let mut pairs = TruncatedSeries::zero(&VARS, budget, 0, 0);
        for g1 in 1..h {
            pairs = pairs.add(&us[g1 as usize].mul(&us[(h - g1) as usize])?)?;
        }
        inner = inner.add(&pairs.scale(&frac(1, 2)))?;
        us.push(prefactor.mul(&inner)?.truncate(budget, 0));
    }
    Ok(us.pop().expect("nonempty").truncate(max_degree, 0))
}

/// Substitutes the closed forms into `u = t0 + t2 R_2[u]` and compares
/// order by order in `λ` for `g ≤ max_genus` and degree `≤ max_degree`.
pub fn string_balance_check(
    table: &mut GdTable,
    max_genus: u32,
    max_degree: u32,
) -> Result<Check, SeriesError> {
    table
        .extend_to(2)
        .map_err(|e| SeriesError::Malformed(e.to_string()))?;
    let u = closed_form_series(max_degree, max_genus, 2);
    let rhs = u
        .var_like(0)?
        .add(&substitute(table.r(2), &u)?.mul_var(2)?)?;
    let name = format!(
        "closed forms satisfy u = t0 + t2 R2[u] (g <= {max_genus}, degree <= {max_degree})"
    );
    Ok(match rhs.first_mismatch(&u)? {
        None => Check::pass(name, ""),
        Some(m) => Check::fail(name, format!("first difference at {m}")),
    })
}

/// `a_0 = −1/2` and the integers `a_n`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ASequence {
    pub a0: Rational,
    positive: Vec<BigInt>,
}

impl ASequence {
    pub fn n_max(&self) -> u32 {
        self.positive.len() as u32
    }

    /// `a_n` for `n ≥ 1`.
    pub fn integer(&self, n: u32) -> &BigInt {
        &self.positive[n as usize - 1]
    }

    pub fn get(&self, n: u32) -> Rational {
        if n == 0 {
            self.a0.clone()
        } else {
            Rational::from_integer(self.integer(n).clone())
        }
    }

    /// `c_g = 2 a_g / 24^g`.
    pub fn c(&self, g: u32) -> Rational {
        self.get(g) * int(2) / Rational::from_integer(num_traits::pow(BigInt::from(24), g as usize))
    }

    /// OEIS b-file lines `n a_n`, `n ≥ 1`.
    pub fn to_bfile(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.positive.iter().enumerate() {
            writeln!(out, "{} {a}", i + 1).unwrap();
        }
        out
    }
}

pub fn a_sequence(n_max: u32) -> ASequence {
    let a0 = frac(-1, 2);
    let mut positive: Vec<BigInt> = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max as usize {
        // The only non-integral input is a_0, used once at n = 1.
        let linear = BigInt::from(2 * (5 * n as i64 - 4) * (5 * n as i64 - 6));
        let mut acc = if n == 1 {
            let v = Rational::from_integer(linear) * &a0;
            assert!(v.is_integer());
            v.to_integer()
        } else {
            linear * &positive[n - 2]
        };
        for k in 1..n {
            acc += &positive[k - 1] * &positive[n - k - 1];
        }
        positive.push(acc);
    }
    ASequence { a0, positive }
}

/// `5√15 / (2π²)`
pub fn beta() -> f64 {
    5.0 * 15f64.sqrt() / (2.0 * std::f64::consts::PI.powi(2))
}

/// `25 / (12 e²)`
pub fn root_target() -> f64 {
    25.0 / (12.0 * std::f64::consts::E.powi(2))
}

/// Float diagnostics of `a_n`, all derived from logarithms of exact
/// integers: `r_n = a_n / (50^{n−1} ((n−1)!)²)` and `ρ_n = c_n^{1/n} / n²`.
#[derive(Clone, Debug)]
pub struct AsymptoticsReport {
    pub n_max: u32,
    /// `ratios[n − 1] = r_n`
    pub ratios: Vec<f64>,
    /// `root_ratios[n − 1] = ρ_n`
    pub root_ratios: Vec<f64>,
    pub beta: f64,
    pub target: f64,
}

pub fn asymptotics(n_max: u32) -> AsymptoticsReport {
    let seq = a_sequence(n_max);
    let ln50 = 50f64.ln();
    let ln24 = 24f64.ln();
    let mut ratios = Vec::with_capacity(n_max as usize);
    let mut root_ratios = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let ln_a = ln_bigint(seq.integer(n));
        let ln_fact = ln_bigint(&factorial(n - 1));
        ratios.push((ln_a - (n - 1) as f64 * ln50 - 2.0 * ln_fact).exp());
        let ln_c = 2f64.ln() + ln_a - n as f64 * ln24;
        root_ratios.push((ln_c / n as f64).exp() / (n as f64).powi(2));
    }
    AsymptoticsReport {
        n_max,
        ratios,
        root_ratios,
        beta: beta(),
        target: root_target(),
    }
}

impl AsymptoticsReport {
    pub fn r(&self, n: u32) -> f64 {
        self.ratios[n as usize - 1]
    }

    pub fn rho(&self, n: u32) -> f64 {
        self.root_ratios[n as usize - 1]
    }

    /// `r_{n+1} / r_n`
    pub fn step(&self, n: u32) -> f64 {
        self.r(n + 1) / self.r(n)
    }

    /// `|r_{n+1}/r_n − 1|` is strictly decreasing for `n` in `from..=to`.
    pub fn step_decreasing(&self, from: u32, to: u32) -> bool {
        (from..to).all(|n| (self.step(n + 1) - 1.0).abs() < (self.step(n) - 1.0).abs())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,r_n,rho_n\n");
        for n in 1..=self.n_max {
            writeln!(out, "{n},{:e},{:e}", self.r(n), self.rho(n)).unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let n = self.n_max;
        let mut out = String::new();
        writeln!(out, "beta = {:.9}", self.beta).unwrap();
        writeln!(out, "25/(12e^2) = {:.9}", self.target).unwrap();
        writeln!(
            out,
            "r_{n} = {:.12} (r/beta - 1 = {:.3e})",
            self.r(n),
            self.r(n) / self.beta - 1.0
        )
        .unwrap();
        if n >= 2 {
            writeln!(
                out,
                "r_{n}/r_{} - 1 = {:.3e}",
                n - 1,
                self.step(n - 1) - 1.0
            )
            .unwrap();
        }
        writeln!(
            out,
            "rho_{n} = {:.9} (rho/target = {:.6})",
            self.rho(n),
            self.rho(n) / self.target
        )
        .unwrap();
        out
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DivergenceError {
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("evaluation point needs t2 != 0 and 0 <= 2 t0 t2 < 1")]
    BadPoint,
    #[error("no witness with n <= {n_max}; raise n_max")]
    InsufficientDepth { n_max: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMethod {
    /// Compared against the exact `a_n`.
    Exact,
    /// Compared against `a_m Π_{k=m+1}^{n} 2(5k−4)(5k−6) ≤ a_n`, valid
    /// because every convolution term is positive.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceWitness {
    pub n: u32,
    pub method: WitnessMethod,
    pub radius: Rational,
    pub point: (Rational, Rational),
    /// `log10` of the certified lower bound for `|u_n| R^{2n}`.
    pub log10_term: f64,
}

/// Exact `a_n` are used up to this index; beyond it the product bound.
pub const EXACT_DEPTH: u32 = 200;

/// Finds `n ≤ n_max` with `|u_n(t0, t2)| R^{2n} > 1`. For `0 ≤ 2 t0 t2 < 1`
/// the factor `(1 − 2t0t2)^{−(5n−1)/2}` is at least one, so it suffices that
/// `2 a_n |t2|^{3n−1} R^{2n} > 24^n`, checked in exact integer arithmetic.
pub fn divergence_certificate(
    radius: &Rational,
    n_max: u32,
    point: (&Rational, &Rational),
) -> Result<DivergenceWitness, DivergenceError> {
    if !radius.is_positive() {
        return Err(DivergenceError::NonPositiveRadius);
    }
    let (t0, t2) = point;
    let s_gap = t0 * t2 * int(2);
    if t2.is_zero() || s_gap.is_negative() || s_gap >= Rational::one() {
        return Err(DivergenceError::BadPoint);
    }
    let t2 = t2.abs();
    let r2 = radius * radius;
    let t2_cubed = &t2 * &t2 * &t2;
    // step factor per unit n: t2³ R² / 24, starting from |t2|^{−1}
    let step = &t2_cubed * &r2 / int(24);
    let mut scale = Rational::one() / &t2;

    let exact = a_sequence(n_max.min(EXACT_DEPTH));
    let mut bound = BigInt::zero();
    for n in 1..=n_max {
        scale *= &step;
        let (a, method) = if n <= exact.n_max() {
            bound = exact.integer(n).clone();
            (&bound, WitnessMethod::Exact)
        } else {
            let k = n as i64;
            bound *= BigInt::from(2 * (5 * k - 4) * (5 * k - 6));
            (&bound, WitnessMethod::LowerBound)
        };
        // 2 a_n · scale > 1  ⇔  2 a_n · numer > denom
        let lhs = a * scale.numer() * 2;
        if &lhs > scale.denom() {
            let log10_term = (ln_bigint(&lhs) - ln_bigint(scale.denom())) / std::f64::consts::LN_10;
            return Ok(DivergenceWitness {
                n,
                method,
                radius: radius.clone(),
                point: (point.0.clone(), point.1.clone()),
                log10_term,
            });
        }
    }
    Err(DivergenceError::InsufficientDepth { n_max })
}

impl DivergenceWitness {
    pub fn to_text(&self) -> String {
        format!(
            "radius {} at (t0,t2) = ({},{}): |u_{n}| R^{{2n}} > 1 with n = {n} ({:?}; log10 term >= {:.3})",
            self.radius,
            self.point.0,
            self.point.1,
            self.method,
            self.log10_term,
            n = self.n
        )
    }
}

/// `ln |c_g|` without forming the rational, for large `g`.
pub fn ln_c(seq: &ASequence, g: u32) -> f64 {
    2f64.ln() + ln_bigint(seq.integer(g)) - g as f64 * 24f64.ln()
}
