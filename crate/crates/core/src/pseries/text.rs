//! Text and JSON forms of series and field elements.
//!
//! Series are sums of terms such as `x^2 + (g+1)*x^5 + 2*x^7`. A term is a
//! product of factors: integers, the generator `g` (optionally `g^k`),
//! parenthesised field expressions, and at most one power of `x`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Series;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};

/// JSON shape `{"terms": [[n, "coeff"], ...], "trunc": N}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub terms: Vec<(usize, String)>,
    pub trunc: usize,
}

impl SeriesJson {
    pub fn from_series(f: &Series) -> Self {
        SeriesJson {
            terms: f.terms().map(|(n, c)| (n, c.to_string())).collect(),
            trunc: f.trunc(),
        }
    }

    pub fn to_series(&self, ctx: &Field) -> Result<Series> {
        let mut seen = BTreeMap::new();
        for (n, text) in &self.terms {
            if seen.insert(*n, parse_elem(text, ctx)?).is_some() {
                return Err(Error::DuplicateExponent(*n));
            }
        }
        Series::from_terms(ctx, seen, self.trunc)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a Field,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, ctx: &'a Field) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            ctx,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().or_else(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn exponent(&mut self) -> Result<u64> {
        if self.eat(b'^') {
            self.number()
        } else {
            Ok(1)
        }
    }

    fn literal(&mut self) -> Result<FieldElem> {
        let start = self.pos;
        let n = self.number()?;
        if n >= self.ctx.p() as u64 {
            self.pos = start;
            return Err(Error::OutsideField(format!(
                "integer {n} at {start} is not a residue mod {}",
                self.ctx.p()
            )));
        }
        Ok(self.ctx.from_u64(n))
    }

    fn generator(&mut self) -> Result<FieldElem> {
        let at = self.pos;
        self.pos += 1;
        if self.ctx.deg() == 1 {
            return Err(Error::UnknownSymbol {
                pos: at,
                symbol: 'g',
            });
        }
        let k = self.exponent()?;
        Ok(self.ctx.generator().pow(k as u128))
    }

    /// Field-valued expression without `x`.
    fn field_expr(&mut self) -> Result<FieldElem> {
        let mut acc = self.field_term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.field_term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.field_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn field_term(&mut self) -> Result<FieldElem> {
        let mut acc = self.field_atom()?;
        while self.eat(b'*') {
            acc = &acc * &self.field_atom()?;
        }
        Ok(acc)
    }

    fn field_atom(&mut self) -> Result<FieldElem> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.field_atom()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.field_expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                let k = self.exponent()?;
                Ok(v.pow(k as u128))
            }
            Some(b'g') => self.generator(),
            Some(c) if c.is_ascii_digit() => self.literal(),
            Some(c) if c.is_ascii_alphabetic() => Err(Error::UnknownSymbol {
                pos: self.pos,
                symbol: c as char,
            }),
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }

    /// One term of a series: a product of field atoms and at most one power
    /// of `x`. Returns `(exponent, coefficient)`.
    fn series_term(&mut self) -> Result<(usize, FieldElem)> {
        let mut coeff = self.ctx.one();
        let mut exp: Option<usize> = None;
        loop {
            if self.peek() == Some(b'x') {
                if exp.is_some() {
                    return self.err("more than one power of x in a term");
                }
                self.pos += 1;
                exp = Some(self.exponent()? as usize);
            } else {
                coeff = &coeff * &self.field_atom()?;
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((exp.unwrap_or(0), coeff))
    }

    fn series_terms(&mut self) -> Result<BTreeMap<usize, FieldElem>> {
        let mut out = BTreeMap::new();
        let mut negate = self.eat(b'-');
        loop {
            let (n, mut c) = self.series_term()?;
            if negate {
                c = c.neg();
            }
            if out.insert(n, c).is_some() {
                return Err(Error::DuplicateExponent(n));
            }
            if self.eat(b'+') {
                negate = false;
            } else if self.eat(b'-') {
                negate = true;
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(out)
    }
}

/// Parses a field element such as `g^2+1` or `(g+1)*2`.
pub fn parse_elem(text: &str, ctx: &Field) -> Result<FieldElem> {
    let mut p = Parser::new(text, ctx);
    let v = p.field_expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses the terms of a series, rejecting repeated exponents. Zero
/// coefficients are kept out of the result.
pub fn parse_terms(text: &str, ctx: &Field) -> Result<BTreeMap<usize, FieldElem>> {
    let mut terms = Parser::new(text, ctx).series_terms()?;
    terms.retain(|_, c| !c.is_zero());
    Ok(terms)
}

/// Parses a series. Without an explicit `trunc` the precision is the
/// largest exponent written (at least 1), i.e. the input is a polynomial.
pub fn parse_series(text: &str, ctx: &Field, trunc: Option<usize>) -> Result<Series> {
    let terms = Parser::new(text, ctx).series_terms()?;
    let max = terms.keys().next_back().copied().unwrap_or(0).max(1);
    Series::from_terms(ctx, terms, trunc.unwrap_or(max))
}

fn format_coeff(c: &FieldElem) -> String {
    let s = c.to_string();
    if s == "g" || s.bytes().all(|b| b.is_ascii_digit()) {
        s
    } else {
        format!("({s})")
    }
}

/// Inverse of [`parse_series`] on the stored terms (precision is not
/// printed).
pub fn format_series(f: &Series) -> String {
    let parts: Vec<String> = f
        .terms()
        .map(|(n, c)| {
            let mono = match n {
                0 => None,
                1 => Some("x".to_string()),
                _ => Some(format!("x^{n}")),
            };
            match (mono, c.is_one()) {
                (None, _) => format_coeff(c),
                (Some(m), true) => m,
                (Some(m), false) => format!("{}*{m}", format_coeff(c)),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldCtx;

    #[test]
    fn parse_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let f = parse_series("x^2 + x^5", &f2, None).unwrap();
        assert_eq!((f.support(), f.trunc()), (vec![2, 5], 5));

        let f4 = FieldCtx::new(2, 2).unwrap();
        let f = parse_series("(g+1)*x^3", &f4, None).unwrap();
        assert_eq!(f.coeff(3), &f4.generator() + &f4.one());

        assert_eq!(
            parse_series("x^2 + x^2", &f2, None).unwrap_err(),
            Error::DuplicateExponent(2)
        );
    }

    #[test]
    fn parse_errors() {
        let f2 = FieldCtx::prime(2).unwrap();
        assert!(matches!(
            parse_series("x^2 + y", &f2, None),
            Err(Error::UnknownSymbol { symbol: 'y', .. })
        ));
        assert!(matches!(
            parse_series("g*x", &f2, None),
            Err(Error::UnknownSymbol { symbol: 'g', .. })
        ));
        assert!(matches!(
            parse_series("2*x", &f2, None),
            Err(Error::OutsideField(_))
        ));
        assert!(matches!(
            parse_series("x^2 +", &f2, None),
            Err(Error::Parse { pos: 5, .. })
        ));
        assert!(matches!(
            parse_series("x^2 x", &f2, None),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn format_round_trip() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        let g = f9.generator();
        let f = Series::from_terms(
            &f9,
            [
                (0, &g + &f9.one()),
                (1, f9.one()),
                (2, f9.from_u64(2)),
                (4, g.clone()),
                (6, &g * &f9.from_u64(2)),
            ],
            8,
        )
        .unwrap();
        let text = format_series(&f);
        assert_eq!(text, "(g+1) + x + 2*x^2 + g*x^4 + (2*g)*x^6");
        assert_eq!(parse_series(&text, &f9, Some(8)).unwrap(), f);
        assert_eq!(format_series(&Series::zero(&f9, 3)), "0");
    }

    #[test]
    fn negation_and_products() {
        let f5 = FieldCtx::prime(5).unwrap();
        let f = parse_series("-x^2 + 2*3*x^3 - (1+1)*x", &f5, None).unwrap();
        assert_eq!(f.coeff(2), f5.from_u64(4));
        assert_eq!(f.coeff(3), f5.from_u64(1));
        assert_eq!(f.coeff(1), f5.from_u64(3));
    }

    #[test]
    fn json_round_trip() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let f = parse_series("x^2 + (g+1)*x^5", &f4, Some(9)).unwrap();
        let js = SeriesJson::from_series(&f);
        let text = serde_json::to_string(&js).unwrap();
        assert_eq!(text, r#"{"terms":[[2,"1"],[5,"g+1"]],"trunc":9}"#);
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_series(&f4).unwrap(), f);
    }
}
