//! Text, JSON and LaTeX forms of [`DiffPoly`].
//!
//! Text: `c*L^2g*u0^e0*u1^e1*...` joined by ` + ` / ` - `, e.g.
//! `1/2*u0^2 + 1/12*L^2*u2`. The coefficient is always printed, `L^2g` is
//! omitted at genus 0, and exponent 1 is omitted.
//!
//! JSON: `{"terms":[{"coeff":"1/2","genus":0,"jet":{"0":2}}, ...]}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{DiffPoly, DiffPolyError, Jet, Monomial};
use crate::rational::{self, Rational};

fn write_factors(out: &mut String, genus: u32, jet: &Jet) {
    if genus > 0 {
        out.push_str(&format!("*L^{}", 2 * genus));
    }
    for (k, e) in jet.factors() {
        if e == 1 {
            out.push_str(&format!("*u{k}"));
        } else {
            out.push_str(&format!("*u{k}^{e}"));
        }
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&c.abs().to_string());
            write_factors(&mut out, m.genus, &m.jet);
        }
        f.write_str(&out)
    }
}

fn parse_monomial(src: &str) -> Result<(Monomial, Rational), DiffPolyError> {
    let err = |msg: &str| DiffPolyError::Parse(format!("{msg} in term `{src}`"));
    let mut coeff = Rational::one();
    let mut genus = 0u32;
    let mut exps: Vec<u32> = Vec::new();
    for factor in src.split('*').map(str::trim) {
        if factor.is_empty() {
            return Err(err("empty factor"));
        }
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (
                b.trim(),
                Some(e.trim().parse::<u32>().map_err(|_| err("bad exponent"))?),
            ),
            None => (factor, None),
        };
        if base == "L" {
            let e = exp.unwrap_or(1);
            if e % 2 != 0 {
                return Err(err("odd power of L"));
            }
            genus += e / 2;
        } else if let Some(k) = base.strip_prefix('u') {
            let k: usize = k.parse().map_err(|_| err("bad jet index"))?;
            if exps.len() <= k {
                exps.resize(k + 1, 0);
            }
            exps[k] += exp.unwrap_or(1);
        } else {
            let c = rational::parse(base).ok_or_else(|| err("bad coefficient"))?;
            if exp.is_some() {
                return Err(err("exponent on coefficient"));
            }
            coeff *= c;
        }
    }
    Ok((Monomial::new(genus, Jet::from_exponents(exps)), coeff))
}

impl FromStr for DiffPoly {
    type Err = DiffPolyError;

    /// Parses the text form. Whitespace is insignificant; terms are split on
    /// top-level `+` / `-` (a `-` directly after `/` or `^` is not a split).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(DiffPolyError::Parse("empty input".into()));
        }
        if s == "0" {
            return Ok(DiffPoly::zero());
        }
        let mut out = DiffPoly::zero();
        let mut start = 0;
        let mut sign = Rational::one();
        let bytes = s.as_bytes();
        let mut flush = |from: usize, to: usize, sign: &Rational| -> Result<(), DiffPolyError> {
            let (m, c) = parse_monomial(&s[from..to])?;
            out.add_term(m, c * sign);
            Ok(())
        };
        let mut i = 0;
        if matches!(bytes.first(), Some(b'-') | Some(b'+')) {
            if bytes[0] == b'-' {
                sign = -sign;
            }
            start = 1;
            i = 1;
        }
        while i < bytes.len() {
            let b = bytes[i];
            if (b == b'+' || b == b'-') && i > start && !matches!(bytes[i - 1], b'/' | b'^' | b'*')
            {
                flush(start, i, &sign)?;
                sign = if b == b'-' {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                start = i + 1;
            }
            i += 1;
        }
        if start >= bytes.len() {
            return Err(DiffPolyError::Parse("trailing operator".into()));
        }
        flush(start, bytes.len(), &sign)?;
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonTerm {
    pub coeff: String,
    pub genus: u32,
    pub jet: BTreeMap<u32, u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonPoly {
    pub terms: Vec<JsonTerm>,
}

impl From<&DiffPoly> for JsonPoly {
    fn from(p: &DiffPoly) -> Self {
        JsonPoly {
            terms: p
                .terms()
                .map(|(m, c)| JsonTerm {
                    coeff: c.to_string(),
                    genus: m.genus,
                    jet: m.jet.factors().map(|(k, e)| (k as u32, e)).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&JsonPoly> for DiffPoly {
    type Error = DiffPolyError;

    fn try_from(j: &JsonPoly) -> Result<Self, Self::Error> {
        let mut out = DiffPoly::zero();
        for t in &j.terms {
            let c = rational::parse(&t.coeff)
                .ok_or_else(|| DiffPolyError::Parse(format!("bad coefficient `{}`", t.coeff)))?;
            let mut exps = Vec::new();
            for (&k, &e) in &t.jet {
                let k = k as usize;
                if exps.len() <= k {
                    exps.resize(k + 1, 0);
                }
                exps[k] += e;
            }
            out.add_term(Monomial::new(t.genus, Jet::from_exponents(exps)), c);
        }
        Ok(out)
    }
}

impl Serialize for DiffPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        JsonPoly::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = JsonPoly::deserialize(d)?;
        DiffPoly::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl DiffPoly {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("DiffPoly serializes")
    }

    pub fn from_json(s: &str) -> Result<DiffPoly, DiffPolyError> {
        serde_json::from_str(s).map_err(|e| DiffPolyError::Parse(e.to_string()))
    }

    /// LaTeX in `u, u_x, u_{2x}` notation with `λ` as `\lambda`, e.g.
    /// `\frac{1}{6} u^3 + \frac{1}{24} u_x^2 \lambda^2`.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (k, e) in m.jet.factors() {
                let base = match k {
                    0 => "u".to_string(),
                    1 => "u_x".to_string(),
                    k => format!("u_{{{k}x}}"),
                };
                factors.push(latex_power(&base, e));
            }
            if m.genus > 0 {
                factors.push(latex_power("\\lambda", 2 * m.genus));
            }
            if factors.is_empty() || !abs.is_one() {
                factors.insert(0, rational::to_latex(&abs));
            }
            out.push_str(&factors.join(" "));
        }
        out
    }
}

fn latex_power(base: &str, e: u32) -> String {
    match e {
        1 => base.to_string(),
        e if e < 10 => format!("{base}^{e}"),
        e => format!("{base}^{{{e}}}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn text_format_is_exact() {
        let r2 = DiffPoly::u(0).pow(2).scale(&frac(1, 2))
            + DiffPoly::u(2).shift_genus(1).scale(&frac(1, 12));
        assert_eq!(r2.to_string(), "1/2*u0^2 + 1/12*L^2*u2");
        assert_eq!(DiffPoly::zero().to_string(), "0");
        assert_eq!(DiffPoly::one().to_string(), "1");
        let neg: DiffPoly = "-1/2*u0^2 - 3*L^4*u1*u3".parse().unwrap();
        assert_eq!(neg.to_string(), "-1/2*u0^2 - 3*L^4*u1*u3");
    }

    #[test]
    fn parser_accepts_loose_spacing_and_merges() {
        let a: DiffPoly = " 1/2 * u0 ^ 2+1/12*L^2*u2 ".parse().unwrap();
        let b: DiffPoly = "1/12*u2*L^2 + 1/4*u0^2 + 1/4*u0*u0".parse().unwrap();
        assert_eq!(a, b);
        let c: DiffPoly = "u0 - u0".parse().unwrap();
        assert!(c.is_zero());
        assert!("1*L^3*u0".parse::<DiffPoly>().is_err());
        assert!("1*u0 +".parse::<DiffPoly>().is_err());
        assert!("1*v0".parse::<DiffPoly>().is_err());
    }

    #[test]
    fn json_format_is_exact() {
        let r2: DiffPoly = "1/2*u0^2 + 1/12*L^2*u2".parse().unwrap();
        assert_eq!(
            r2.to_json(),
            r#"{"terms":[{"coeff":"1/2","genus":0,"jet":{"0":2}},{"coeff":"1/12","genus":1,"jet":{"2":1}}]}"#
        );
        assert_eq!(DiffPoly::from_json(&r2.to_json()).unwrap(), r2);
        assert!(DiffPoly::from_json(r#"{"terms":[{"coeff":"x","genus":0,"jet":{}}]}"#).is_err());
    }

    #[test]
    fn latex_uses_subscript_derivatives() {
        let t2: DiffPoly = "1/6*u0^3 + 1/24*L^2*u1^2".parse().unwrap();
        assert_eq!(
            t2.to_latex(),
            "\\frac{1}{6} u^3 + \\frac{1}{24} u_x^2 \\lambda^2"
        );
        let t: DiffPoly = "1*u0 - 1/480*L^4*u2^2".parse().unwrap();
        assert_eq!(t.to_latex(), "u - \\frac{1}{480} u_{2x}^2 \\lambda^4");
        assert_eq!(DiffPoly::one().to_latex(), "1");
    }
}
