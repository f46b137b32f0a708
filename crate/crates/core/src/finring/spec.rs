use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::{FinRing, RingError};

/// A ring expression: `zmod 12`, `product (zmod 2) (zmod 3)`,
/// `polyquot (zmod 2) x^2+x+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    Zmod(usize),
    Product(Box<RingSpec>, Box<RingSpec>),
    /// Base modulus and monic modulus polynomial, constant term first.
    PolyQuot(usize, Vec<usize>),
}

impl RingSpec {
    pub fn build(&self) -> Result<FinRing, RingError> {
        match self {
            RingSpec::Zmod(n) => FinRing::zmod(*n),
            RingSpec::Product(a, b) => FinRing::product(&a.build()?, &b.build()?),
            RingSpec::PolyQuot(p, f) => FinRing::polyquot(*p, f),
        }
    }

    /// Parses a ring expression. A leading `ring` keyword is allowed.
    pub fn parse(text: &str) -> Result<RingSpec, RingError> {
        let t = text.trim();
        let t = t.strip_prefix("ring ").map(str::trim).unwrap_or(t);
        let (spec, rest) = parse_spec(t)?;
        if !rest.trim().is_empty() {
            return Err(RingError::Parse(format!("trailing input `{}`", rest.trim())));
        }
        Ok(spec)
    }
}

impl core::fmt::Display for RingSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RingSpec::Zmod(n) => write!(f, "zmod {n}"),
            RingSpec::Product(a, b) => write!(f, "product ({a}) ({b})"),
            RingSpec::PolyQuot(p, m) => {
                let mut coeffs = m.clone();
                coeffs.iter_mut().for_each(|c| *c %= (*p).max(1));
                write!(f, "polyquot (zmod {p}) {}", super::poly_label(&coeffs))
            }
        }
    }
}

fn parse_spec(t: &str) -> Result<(RingSpec, &str), RingError> {
    let t = t.trim_start();
    if let Some(rest) = t.strip_prefix("zmod") {
        let rest = rest.trim_start();
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let n = rest[..end].parse().map_err(|_| RingError::Parse(format!("expected modulus in `{t}`")))?;
        Ok((RingSpec::Zmod(n), &rest[end..]))
    } else if let Some(rest) = t.strip_prefix("product") {
        let (a, rest) = parenthesized(rest)?;
        let (b, rest) = parenthesized(rest)?;
        Ok((RingSpec::Product(Box::new(a), Box::new(b)), rest))
    } else if let Some(rest) = t.strip_prefix("polyquot") {
        let (base, rest) = parenthesized(rest)?;
        let p = match base {
            RingSpec::Zmod(p) => p,
            _ => return Err(RingError::Parse("polyquot needs a zmod base".to_string())),
        };
        let rest = rest.trim_start();
        let end = rest.find(|c: char| c.is_whitespace() || c == ')').unwrap_or(rest.len());
        let poly = parse_polynomial(&rest[..end])?;
        Ok((RingSpec::PolyQuot(p, poly), &rest[end..]))
    } else {
        Err(RingError::Parse(format!("unknown ring expression `{t}`")))
    }
}

fn parenthesized(t: &str) -> Result<(RingSpec, &str), RingError> {
    let t = t.trim_start();
    let inner = t.strip_prefix('(').ok_or_else(|| RingError::Parse(format!("expected `(` at `{t}`")))?;
    let mut depth = 1;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    let (spec, rest) = parse_spec(&inner[..i])?;
                    if !rest.trim().is_empty() {
                        return Err(RingError::Parse(format!("trailing input `{}`", rest.trim())));
                    }
                    return Ok((spec, &inner[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(RingError::Parse("unbalanced parentheses".to_string()))
}

/// Parses a polynomial in `x` such as `x^2+x+1` or `x^3+2*x`. Coefficients
/// are returned constant term first.
pub fn parse_polynomial(text: &str) -> Result<Vec<usize>, RingError> {
    let mut coeffs: Vec<usize> = vec![];
    let bad = || RingError::Parse(format!("cannot parse polynomial `{text}`"));
    for term in text.split('+').map(str::trim) {
        if term.is_empty() {
            return Err(bad());
        }
        let (coef, deg) = match term.find('x') {
            None => (term.parse::<usize>().map_err(|_| bad())?, 0),
            Some(i) => {
                let c = term[..i].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse().map_err(|_| bad())? };
                let d = match term[i + 1..].strip_prefix('^') {
                    Some(d) => d.parse().map_err(|_| bad())?,
                    None if term[i + 1..].is_empty() => 1,
                    None => return Err(bad()),
                };
                (c, d)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += coef;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(RingSpec::parse("ring zmod 12"), Ok(RingSpec::Zmod(12)));
        assert_eq!(
            RingSpec::parse("product (zmod 2) (zmod 3)"),
            Ok(RingSpec::Product(Box::new(RingSpec::Zmod(2)), Box::new(RingSpec::Zmod(3))))
        );
        assert_eq!(RingSpec::parse("polyquot (zmod 2) x^2+x+1"), Ok(RingSpec::PolyQuot(2, vec![1, 1, 1])));
        assert!(RingSpec::parse("zmod").is_err());
        assert!(RingSpec::parse("field 4").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["zmod 12", "product (zmod 2) (product (zmod 2) (zmod 3))", "polyquot (zmod 2) x^2+x+1"] {
            let spec = RingSpec::parse(s).unwrap();
            assert_eq!(RingSpec::parse(&spec.to_string()), Ok(spec));
        }
    }
}
