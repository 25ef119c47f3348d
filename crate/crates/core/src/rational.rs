//! Exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p`, `-p`, `p/q` (and tolerates `+p`).
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Parses a positive real given as a rational (`1/1000`), a decimal
/// (`0.001`) or scientific notation (`1e-3`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.contains('/') {
        return parse(s);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    let digits = format!("{ip}{fp}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut value = Rational::from_integer(digits.parse().ok()?);
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Natural logarithm of a positive big integer, accurate to f64 precision
/// for arbitrarily large inputs.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |q|` for a nonzero rational.
pub fn ln_abs(q: &Rational) -> f64 {
    ln_bigint(&q.numer().abs()) - ln_bigint(q.denom())
}

/// Generalised binomial coefficient `binom(a, j)` for rational `a`.
pub fn binomial(a: &Rational, j: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..j {
        acc *= a - int(i as i64);
        acc /= int(i as i64 + 1);
    }
    acc
}

/// LaTeX rendering of a rational coefficient: `\frac{p}{q}` or an integer.
pub fn to_latex(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let sign = if q.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/2"), Some(frac(1, 2)));
        assert_eq!(parse("-6/4"), Some(frac(-3, 2)));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn parse_decimal_forms() {
        assert_eq!(parse_decimal("1e-3"), Some(frac(1, 1000)));
        assert_eq!(parse_decimal("0.001"), Some(frac(1, 1000)));
        assert_eq!(parse_decimal("1/1000"), Some(frac(1, 1000)));
        assert_eq!(parse_decimal("2.5E1"), Some(int(25)));
        assert_eq!(parse_decimal("1"), Some(int(1)));
        assert_eq!(parse_decimal("abc"), None);
    }

    #[test]
    fn binomial_half() {
        // (1/2 choose 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(binomial(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(binomial(&int(5), 2), int(10));
        assert_eq!(binomial(&int(-2), 3), int(-4));
    }

    #[test]
    fn ln_of_huge_integer() {
        let big = num_traits::pow(BigInt::from(10), 5000);
        let expected = 5000.0 * std::f64::consts::LN_10;
        assert!((ln_bigint(&big) - expected).abs() / expected < 1e-14);
        assert!((ln_bigint(&BigInt::from(1000)) - 1000f64.ln()).abs() < 1e-15);
    }
}
