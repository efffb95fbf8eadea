//! Text front end for operators: a small recursive-descent parser and the
//! canonical renderer.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (["*"] unary)*
//! unary    := ("-" | "+") unary | power
//! power    := atom ["^" ["-" | "+"] integer]
//! atom     := literal | "g" | "x" | "p" | "(" expr ")" | "{" expr "," expr "}"
//! literal  := digits ["." digits] ["/" digits] ["i"]
//! ```
//!
//! `{A, B}` is the anticommutator `AB + BA`. The imaginary unit only exists
//! as a literal suffix (`1i`, `2/3i`). Factors may be written side by side
//! (`(1i)g x p`) since that is the canonical rendering.

use std::cmp::Reverse;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::coeff::{format_rational, Coefficient, ComplexRational};
use crate::opalg::{anticommutator, normal_order_product, Monomial, OperatorPolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical { found: char },
    ZeroDenominator,
    Syntax { found: String, expected: Vec<&'static str> },
    NonIntegerExponent,
    NegativePPower,
    NonInvertibleBase,
}

/// A rejected input, with the byte offset where the problem was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Lexical { found } => write!(f, "unexpected character '{found}' at byte {}", self.offset),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator in literal at byte {}", self.offset),
            ParseErrorKind::Syntax { found, expected } => {
                write!(f, "unexpected {found} at byte {}, expected {}", self.offset, expected.join(" or "))
            }
            ParseErrorKind::NonIntegerExponent => write!(f, "exponent at byte {} is not an integer", self.offset),
            ParseErrorKind::NegativePPower => {
                write!(f, "negative power of an operator containing p at byte {}", self.offset)
            }
            ParseErrorKind::NonInvertibleBase => write!(
                f,
                "negative power at byte {} needs a single x monomial with a constant coefficient",
                self.offset
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(ComplexRational),
    Ident(char),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(c) => format!("literal '{c}'"),
            Tok::Ident(c) => format!("'{c}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self, Tok::Num(_) | Tok::Ident(_) | Tok::LParen | Tok::LBrace)
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let digits = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    while pos < bytes.len() {
        let b = bytes[pos];
        let start = pos;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'0'..=b'9' => {
                let int_end = digits(pos);
                let mut end = int_end;
                let mut value: BigRational = BigRational::from_integer(text[pos..int_end].parse::<BigInt>().expect("digits"));
                if end < bytes.len() && bytes[end] == b'.' && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit() {
                    let frac_end = digits(end + 1);
                    let frac = &text[end + 1..frac_end];
                    let scale = BigInt::from(10u32).pow(frac.len() as u32);
                    value += BigRational::new(frac.parse::<BigInt>().expect("digits"), scale);
                    end = frac_end;
                }
                if end < bytes.len() && bytes[end] == b'/' && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit() {
                    let den_end = digits(end + 1);
                    let den: BigInt = text[end + 1..den_end].parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError { kind: ParseErrorKind::ZeroDenominator, offset: end + 1 });
                    }
                    value /= BigRational::from_integer(den);
                    end = den_end;
                }
                let c = if end < bytes.len() && bytes[end] == b'i' {
                    end += 1;
                    ComplexRational::new(BigRational::zero(), value)
                } else {
                    ComplexRational::real(value)
                };
                pos = end;
                out.push((Tok::Num(c), start));
                continue;
            }
            b'g' | b'x' | b'p' => Tok::Ident(b as char),
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            _ => {
                let found = text[pos..].chars().next().unwrap_or('?');
                return Err(ParseError { kind: ParseErrorKind::Lexical { found }, offset: pos });
            }
        };
        pos += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax { found: self.peek().describe(), expected: expected.to_vec() },
            offset: self.offset(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(&[name]))
        }
    }

    fn expr(&mut self) -> Result<OperatorPolynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorPolynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
            } else if !self.peek().starts_atom() {
                return Ok(acc);
            }
            let rhs = self.unary()?;
            acc = normal_order_product(&acc, &rhs);
        }
    }

    fn unary(&mut self) -> Result<OperatorPolynomial, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<OperatorPolynomial, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_offset = self.offset();
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let (tok, at) = self.bump();
        let Tok::Num(value) = tok else {
            self.pos -= 1;
            return Err(self.syntax(&["integer exponent"]));
        };
        if !value.is_real() || !value.re.is_integer() {
            return Err(ParseError { kind: ParseErrorKind::NonIntegerExponent, offset: at });
        }
        let n = value
            .re
            .to_integer()
            .to_u32()
            .ok_or(ParseError { kind: ParseErrorKind::NonIntegerExponent, offset: at })?;
        if !negative {
            return Ok(base.pow(n));
        }
        invert_power(&base, n).map_err(|kind| ParseError { kind, offset: exp_offset })
    }

    fn atom(&mut self) -> Result<OperatorPolynomial, ParseError> {
        match self.peek().clone() {
            Tok::Num(c) => {
                self.bump();
                Ok(OperatorPolynomial::scalar(c))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name {
                    'g' => OperatorPolynomial::g(),
                    'x' => OperatorPolynomial::x(),
                    _ => OperatorPolynomial::p(),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::LBrace => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.expr()?;
                self.expect(Tok::RBrace, "'}'")?;
                Ok(anticommutator(&a, &b))
            }
            _ => Err(self.syntax(&["literal", "'g'", "'x'", "'p'", "'('", "'{'"])),
        }
    }
}

/// `base^-n`, defined only for `c x^a` with a non-zero, `g`-free `c`.
fn invert_power(base: &OperatorPolynomial, n: u32) -> Result<OperatorPolynomial, ParseErrorKind> {
    if base.max_ppow() > 0 {
        return Err(ParseErrorKind::NegativePPower);
    }
    let mut terms = base.iter();
    let (Some((m, c)), None) = (terms.next(), terms.next()) else {
        return Err(ParseErrorKind::NonInvertibleBase);
    };
    let inv = c
        .as_constant()
        .and_then(|c| c.inverse())
        .ok_or(ParseErrorKind::NonInvertibleBase)?;
    Ok(OperatorPolynomial::term(
        Monomial::new(-m.xpow * n as i32, 0),
        Coefficient::constant(inv.pow(n)),
    ))
}

/// Parses an operator expression into canonical normal-ordered form.
pub fn parse(text: &str) -> Result<OperatorPolynomial, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let out = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.syntax(&["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(out)
}

fn scalar_text(c: &ComplexRational) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) if c.re.is_integer() => format_rational(&c.re),
        (_, true) => format!("({})", format_rational(&c.re)),
        _ => format!("({c})"),
    }
}

fn factor_text(name: &str, power: i64) -> Option<String> {
    match power {
        0 => None,
        1 => Some(name.to_string()),
        k => Some(format!("{name}^{k}")),
    }
}

/// Canonical text: terms ordered by descending `p` power, then descending `x`
/// power, then descending `g` power; the sign of each coefficient is pulled
/// out to the joining operator.
pub fn format(a: &OperatorPolynomial) -> String {
    let mut entries: Vec<(Monomial, u32, &ComplexRational)> = a
        .iter()
        .flat_map(|(m, c)| c.iter().map(move |(k, v)| (*m, k, v)))
        .collect();
    if entries.is_empty() {
        return "0".to_string();
    }
    entries.sort_by_key(|(m, k, _)| (Reverse(m.ppow), Reverse(m.xpow), Reverse(*k)));

    let mut out = String::new();
    for (idx, (m, k, value)) in entries.into_iter().enumerate() {
        let negative = value.is_negative();
        let magnitude = if negative { -value } else { value.clone() };
        let factors: Vec<String> = [
            factor_text("g", k as i64),
            factor_text("x", m.xpow as i64),
            factor_text("p", m.ppow as i64),
        ]
        .into_iter()
        .flatten()
        .collect();

        let mut body = String::new();
        if !magnitude.is_one() || factors.is_empty() {
            body.push_str(&scalar_text(&magnitude));
        }
        let starts_with_paren = body.ends_with(')');
        for (j, f) in factors.iter().enumerate() {
            if !(body.is_empty() || (j == 0 && starts_with_paren)) {
                body.push(' ');
            }
            body.push_str(f);
        }

        match (idx, negative) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}

/// One row of the term table emitted by the `parse` subcommand.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TermRow {
    pub xpow: i32,
    pub ppow: u32,
    pub gpow: u32,
    pub re: String,
    pub im: String,
}

pub fn term_table(a: &OperatorPolynomial) -> Vec<TermRow> {
    let mut rows: Vec<TermRow> = a
        .iter()
        .flat_map(|(m, c)| {
            c.iter().map(move |(k, v)| TermRow {
                xpow: m.xpow,
                ppow: m.ppow,
                gpow: k,
                re: format_rational(&v.re),
                im: format_rational(&v.im),
            })
        })
        .collect();
    rows.sort_by_key(|r| (Reverse(r.ppow), Reverse(r.xpow), Reverse(r.gpow)));
    rows
}

#[allow(dead_code)]
fn is_unit(r: &BigRational) -> bool {
    r.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{build_class_hamiltonian, Variant};

    #[test]
    fn class_member_inputs() {
        assert_eq!(parse("p^2 + 1i*g*x^2*p").unwrap(), build_class_hamiltonian(2, Variant::Plain));
        assert_eq!(parse("x*p - p*x").unwrap(), OperatorPolynomial::scalar(ComplexRational::i()));
        let anti = parse("{x,p}").unwrap();
        let want = &OperatorPolynomial::monomial(1, 1).scale_scalar(&ComplexRational::from_integer(2))
            - &OperatorPolynomial::scalar(ComplexRational::i());
        assert_eq!(anti, want);
    }

    #[test]
    fn literals() {
        let neg = parse("-2/3i").unwrap();
        assert_eq!(
            neg,
            OperatorPolynomial::scalar(ComplexRational::new(BigRational::zero(), BigRational::new((-2).into(), 3.into())))
        );
        assert_eq!(parse("0.25*x").unwrap(), parse("1/4*x").unwrap());
        assert_eq!(parse("x^-2 * x^2").unwrap(), OperatorPolynomial::identity());
        assert_eq!(parse("(2*x)^-1").unwrap(), parse("1/2*x^-1").unwrap());
    }

    #[test]
    fn format_examples() {
        assert_eq!(format(&OperatorPolynomial::scalar(ComplexRational::i())), "(1i)");
        assert_eq!(format(&build_class_hamiltonian(1, Variant::Plain)), "p^2 + (1i)g x p");
        assert_eq!(format(&OperatorPolynomial::zero()), "0");
        assert_eq!(format(&parse("p^2 + 1/4*g^2*x^4 - g*x").unwrap()), "p^2 + (1/4)g^2 x^4 - g x");
        assert_eq!(format(&parse("-p^2 + 2*x - 1").unwrap()), "-p^2 + 2 x - 1");
        assert_eq!(format(&parse("(1 - 3/4i)*x^-3*p").unwrap()), "(1 - 3/4i)x^-3 p");
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("x + $").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(matches!(e.kind, ParseErrorKind::Lexical { found: '$' }));

        let e = parse("x + i").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Lexical { found: 'i' }));

        let e = parse("x^1/2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(e.offset, 2);

        let e = parse("p^-1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NegativePPower);

        let e = parse("(x + 1)^-1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonInvertibleBase);

        let e = parse("x * (p + 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
        assert_eq!(e.offset, 10);

        let e = parse("{x p}").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));

        let e = parse("x ^ 1.5").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);

        let e = parse("").unwrap_err();
        assert_eq!(e.offset, 0);
    }
}
