//! Text format for ideals.
//!
//! ```text
//! ideal  := gen (separator gen)*        separator := newline | ";"
//! gen    := sum
//! sum    := ["+"|"-"] term (("+"|"-") term)*
//! term   := coeff ["*"]? factor ("*"? factor)*  |  factor ("*"? factor)*  |  coeff
//! factor := var ("^" posint)?
//! coeff  := posint | posint "/" posint
//! var    := letter (letter | digit | "_")*
//! ```
//!
//! Whitespace is insignificant except that a newline separates generators;
//! `#` starts a comment running to the end of the line. Adjacent factors
//! multiply implicitly (`2x`, `x^2 y`). Variables are taken in declaration
//! order when a list is supplied, otherwise in first-appearance order.

use crate::poly::{Ideal, Monomial, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::One;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Sep,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                chars.next();
                out.push(Spanned { tok: Tok::Sep, line: tl, col: tc });
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            ';' | '+' | '-' | '*' | '/' | '^' => {
                chars.next();
                col += 1;
                let tok = match c {
                    ';' => Tok::Sep,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    _ => Tok::Caret,
                };
                out.push(Spanned { tok, line: tl, col: tc });
            }
            _ if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Int(s), line: tl, col: tc });
            }
            _ if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: tl, col: tc });
            }
            _ => {
                return Err(ParseError::new(tl, tc, format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

/// Parses an ideal. With `declared_vars` the variable universe and its order
/// are fixed up front and unknown names are rejected; otherwise variables are
/// numbered in order of first appearance across the whole input.
pub fn parse_ideal(text: &str, declared_vars: Option<&[String]>) -> Result<Ideal, ParseError> {
    let tokens = lex(text)?;
    let segments: Vec<&[Spanned]> = tokens
        .split(|s| s.tok == Tok::Sep)
        .filter(|seg| !seg.is_empty())
        .collect();
    if segments.is_empty() {
        return Err(ParseError::new(1, 1, "empty input: an ideal needs at least one generator"));
    }

    let vars: Vec<String> = match declared_vars {
        Some(list) => list.to_vec(),
        None => {
            let mut seen = Vec::new();
            for sp in &tokens {
                if let Tok::Ident(name) = &sp.tok {
                    if !seen.contains(name) {
                        seen.push(name.clone());
                    }
                }
            }
            seen
        }
    };
    let lookup = |name: &str, line: usize, col: usize| -> Result<usize, ParseError> {
        vars.iter().position(|v| v == name).ok_or_else(|| {
            ParseError::new(line, col, format!("unknown variable `{name}`"))
        })
    };

    let mut generators = Vec::with_capacity(segments.len());
    for seg in &segments {
        let poly = parse_sum(seg, vars.len(), &lookup)?;
        if poly.is_zero() {
            let first = &seg[0];
            return Err(ParseError::new(
                first.line,
                first.col,
                "generator is the zero polynomial",
            ));
        }
        generators.push(poly);
    }
    Ok(Ideal::new(vars, generators))
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn end_pos(&self) -> (usize, usize) {
        self.toks
            .last()
            .map(|s| (s.line, s.col + 1))
            .unwrap_or((1, 1))
    }
}

fn parse_sum<F>(seg: &[Spanned], ambient: usize, lookup: &F) -> Result<Polynomial, ParseError>
where
    F: Fn(&str, usize, usize) -> Result<usize, ParseError>,
{
    let mut cur = Cursor { toks: seg, pos: 0 };
    let mut acc = Polynomial::zero(ambient);
    let mut negate = false;
    if let Some(sp) = cur.peek() {
        match sp.tok {
            Tok::Plus => {
                cur.next();
            }
            Tok::Minus => {
                cur.next();
                negate = true;
            }
            _ => {}
        }
    }
    loop {
        let term = parse_term(&mut cur, ambient, lookup)?;
        acc = if negate { &acc - &term } else { &acc + &term };
        match cur.peek() {
            None => break,
            Some(sp) => match sp.tok {
                Tok::Plus => {
                    cur.next();
                    negate = false;
                }
                Tok::Minus => {
                    cur.next();
                    negate = true;
                }
                _ => {
                    return Err(ParseError::new(
                        sp.line,
                        sp.col,
                        "expected `+`, `-`, or end of generator",
                    ));
                }
            },
        }
    }
    Ok(acc)
}

fn parse_term<F>(cur: &mut Cursor, ambient: usize, lookup: &F) -> Result<Polynomial, ParseError>
where
    F: Fn(&str, usize, usize) -> Result<usize, ParseError>,
{
    let (mut coeff, mut saw_any) = (Rational::one(), false);

    if let Some(sp) = cur.peek() {
        if let Tok::Int(digits) = &sp.tok {
            let num: BigInt = digits.parse().expect("digits");
            cur.next();
            saw_any = true;
            let den = if matches!(cur.peek().map(|s| &s.tok), Some(Tok::Slash)) {
                let slash = cur.next().unwrap();
                match cur.next() {
                    Some(Spanned { tok: Tok::Int(d), line, col }) => {
                        let den: BigInt = d.parse().expect("digits");
                        if den == BigInt::from(0) {
                            return Err(ParseError::new(*line, *col, "zero denominator"));
                        }
                        den
                    }
                    _ => {
                        return Err(ParseError::new(
                            slash.line,
                            slash.col + 1,
                            "expected a positive integer denominator after `/`",
                        ));
                    }
                }
            } else {
                BigInt::one()
            };
            coeff = Rational::new(num, den);
        }
    }

    let mut exponents = vec![0u32; ambient];
    loop {
        let explicit_star = matches!(cur.peek().map(|s| &s.tok), Some(Tok::Star));
        if explicit_star {
            cur.next();
        }
        match cur.peek() {
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                let idx = lookup(name, *line, *col)?;
                cur.next();
                let mut exp = 1u32;
                if matches!(cur.peek().map(|s| &s.tok), Some(Tok::Caret)) {
                    let caret = cur.next().unwrap();
                    match cur.next() {
                        Some(Spanned { tok: Tok::Int(d), line, col }) => {
                            exp = d.parse().map_err(|_| {
                                ParseError::new(*line, *col, "exponent out of range")
                            })?;
                            if exp == 0 {
                                return Err(ParseError::new(
                                    *line,
                                    *col,
                                    "exponent must be a positive integer",
                                ));
                            }
                        }
                        _ => {
                            return Err(ParseError::new(
                                caret.line,
                                caret.col + 1,
                                "expected a positive integer exponent after `^`",
                            ));
                        }
                    }
                }
                exponents[idx] = exponents[idx]
                    .checked_add(exp)
                    .ok_or_else(|| ParseError::new(0, 0, "exponent overflow"))?;
                saw_any = true;
            }
            Some(sp) if explicit_star => {
                return Err(ParseError::new(sp.line, sp.col, "expected a variable after `*`"));
            }
            _ if explicit_star => {
                let (line, col) = cur.end_pos();
                return Err(ParseError::new(line, col, "expected a variable after `*`"));
            }
            _ => break,
        }
    }

    if !saw_any {
        let (line, col) = cur
            .peek()
            .map(|s| (s.line, s.col))
            .unwrap_or_else(|| cur.end_pos());
        return Err(ParseError::new(line, col, "expected a term"));
    }
    Ok(Polynomial::from_terms(
        ambient,
        [(coeff, Monomial::new(exponents))],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_cusp_generator() {
        let ideal = parse_ideal("u^2 - v^3", None).unwrap();
        assert_eq!(ideal.ambient_dim(), 2);
        assert_eq!(ideal.vars(), &["u".to_string(), "v".to_string()]);
        assert_eq!(ideal.generators().len(), 1);
        assert_eq!(ideal.render(), "u^2 - v^3");
    }

    #[test]
    fn parses_two_generators() {
        let ideal = parse_ideal("x^2; y^3", None).unwrap();
        assert_eq!(ideal.ambient_dim(), 2);
        assert_eq!(ideal.generators().len(), 2);
        assert_eq!(ideal.render(), "x^2; y^3");
    }

    #[test]
    fn rejects_zero_generator() {
        let err = parse_ideal("x - x", None).unwrap_err();
        assert!(err.message.contains("zero polynomial"), "{err}");
        assert_eq!((err.line, err.col), (1, 1));
    }

    #[test]
    fn newline_separates_generators_and_comments_are_ignored() {
        let ideal = parse_ideal("# a curve\nx^2 # square\ny^3\n\n", None).unwrap();
        assert_eq!(ideal.generators().len(), 2);
    }

    #[test]
    fn rational_coefficients_and_implicit_multiplication() {
        let ideal = parse_ideal("3/2x^2*y - 2*x + 1", None).unwrap();
        assert_eq!(ideal.render(), "1 - 2*x + 3/2*x^2*y");
    }

    #[test]
    fn declared_vars_fix_order_and_reject_unknown_names() {
        let vars = vec!["v".to_string(), "u".to_string()];
        let ideal = parse_ideal("u^2 - v^3", Some(&vars)).unwrap();
        assert_eq!(ideal.vars(), &["v".to_string(), "u".to_string()]);

        let err = parse_ideal("u + w", Some(&vars)).unwrap_err();
        assert!(err.message.contains("unknown variable `w`"));
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn error_positions_point_at_the_offender() {
        let err = parse_ideal("x +", None).unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_ideal("x ^ y", None).unwrap_err();
        assert!(err.message.contains("exponent"));
        let err = parse_ideal("x\ny $ z", None).unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
    }

    #[test]
    fn roundtrip_parse_render() {
        for text in [
            "u^2 - v^3",
            "x^2; y^3",
            "1 - 2*x + 3/2*x^2*y",
            "a + b + c; a*b*c; a^7 - 5/3*b",
        ] {
            let ideal = parse_ideal(text, None).unwrap();
            let again = parse_ideal(&ideal.render(), None).unwrap();
            assert_eq!(ideal, again, "{text}");
        }
    }
}
