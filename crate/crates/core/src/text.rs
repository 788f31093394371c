//! Text format for polynomials, maps and differential forms.
//!
//! Variables come in two families, `x1..xn` (source) and `y1..yn`
//! (target); differentials are `dx1`, `dy2`, .... Numbers are integers, and
//! `p/q` is ordinary division by a constant. `^` is a power when its right
//! side is an integer literal and a wedge when both sides are forms.
//! A coefficient may be juxtaposed with what follows it, so `3/2 x1` and
//! `x1 dx1` both parse.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::forms::DifferentialForm;
use crate::poly::{Monomial, Polynomial, Rational, TermOrder};

/// Which variable family an expression is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Source,
    Target,
}

impl Family {
    pub fn prefix(self) -> char {
        match self {
            Family::Source => 'x',
            Family::Target => 'y',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownVariable,
    /// Form/function mismatch, such as adding a 1-form to a function.
    Type,
    /// Division by a non-constant or by zero, negative or huge exponents.
    Arithmetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Diff(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(kind: ParseErrorKind, line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { kind, line, column, message: message.into() }
}

fn tokenize(text: &str, nvars: usize, prefix: char) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let n: BigInt = s.parse().expect("digits");
            out.push(Token { tok: Tok::Num(n), line: tl, column: tc });
            continue;
        }
        if c.is_alphabetic() {
            // a name is letters followed by digits; `x1x2` splits into two names
            let start = i;
            while i < chars.len() && chars[i].is_alphabetic() {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = classify(&name, nvars, prefix)
                .ok_or_else(|| err(ParseErrorKind::UnknownVariable, tl, tc, format!("unknown variable `{name}`")))?;
            out.push(Token { tok, line: tl, column: tc });
            continue;
        }
        return Err(err(ParseErrorKind::Syntax, tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

fn classify(name: &str, nvars: usize, prefix: char) -> Option<Tok> {
    let (is_diff, rest) = match name.strip_prefix('d') {
        Some(r) if r.starts_with(prefix) => (true, r),
        _ => (false, name),
    };
    let digits = rest.strip_prefix(prefix)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: usize = digits.parse().ok()?;
    if idx == 0 || idx > nvars {
        return None;
    }
    Some(if is_diff { Tok::Diff(idx - 1) } else { Tok::Var(idx - 1) })
}

#[derive(Debug, Clone)]
enum Value {
    Poly(Polynomial),
    Form(DifferentialForm),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, kind: ParseErrorKind, at: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(err(kind, at.line, at.column, message))
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.term()?;
        loop {
            let op = self.peek().clone();
            let negate = match op.tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            self.next();
            let rhs = self.term()?;
            let rhs = if negate { neg(rhs) } else { rhs };
            acc = self.add(acc, rhs, &op)?;
        }
    }

    fn starts_atom(tok: &Tok) -> bool {
        matches!(tok, Tok::Num(_) | Tok::Var(_) | Tok::Diff(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let op = self.peek().clone();
            match op.tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs, &op)?;
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = self.div(acc, rhs, &op)?;
                }
                ref t if Self::starts_atom(t) => {
                    let rhs = self.power()?;
                    acc = self.mul(acc, rhs, &op)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Value, ParseError> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(neg(self.unary()?))
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let mut base = self.atom()?;
        while self.peek().tok == Tok::Caret {
            let op = self.next();
            let rhs_tok = self.peek().clone();
            let rhs = self.atom()?;
            base = match (base, rhs) {
                (Value::Poly(p), Value::Poly(e)) => {
                    let Tok::Num(n) = &rhs_tok.tok else {
                        return self.fail(ParseErrorKind::Arithmetic, &rhs_tok, "exponent must be an integer literal");
                    };
                    let Some(e32) = n.to_u32() else {
                        return self.fail(ParseErrorKind::Arithmetic, &rhs_tok, "exponent out of range");
                    };
                    debug_assert!(e.is_constant());
                    match p.pow(e32) {
                        Ok(v) => Value::Poly(v),
                        Err(e) => return self.fail(ParseErrorKind::Arithmetic, &op, e.to_string()),
                    }
                }
                (Value::Form(a), Value::Form(b)) => Value::Form(a.wedge(&b).expect("same dimension")),
                _ => return self.fail(ParseErrorKind::Type, &op, "`^` needs an integer exponent or two forms"),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        let t = self.next();
        let n = self.nvars;
        match t.tok {
            Tok::Num(v) => Ok(Value::Poly(Polynomial::constant(n, Rational::from_integer(v)))),
            Tok::Var(i) => Ok(Value::Poly(Polynomial::var(n, i))),
            Tok::Diff(i) => Ok(Value::Form(DifferentialForm::differential(n, i))),
            Tok::LParen => {
                let v = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return self.fail(ParseErrorKind::Syntax, &close, "expected `)`");
                }
                Ok(v)
            }
            Tok::End => self.fail(ParseErrorKind::Syntax, &t, "unexpected end of input"),
            _ => self.fail(ParseErrorKind::Syntax, &t, "expected a number, variable, differential or `(`"),
        }
    }

    fn add(&self, a: Value, b: Value, at: &Token) -> Result<Value, ParseError> {
        match (a, b) {
            (Value::Poly(p), Value::Poly(q)) => Ok(Value::Poly(&p + &q)),
            (Value::Form(f), Value::Form(g)) => match f.add(&g) {
                Ok(v) => Ok(Value::Form(v)),
                Err(_) => self.fail(ParseErrorKind::Type, at, "cannot add forms of different degree"),
            },
            (Value::Poly(p), Value::Form(f)) | (Value::Form(f), Value::Poly(p)) if p.is_zero() => Ok(Value::Form(f)),
            _ => self.fail(ParseErrorKind::Type, at, "cannot add a function and a form"),
        }
    }

    fn mul(&self, a: Value, b: Value, at: &Token) -> Result<Value, ParseError> {
        match (a, b) {
            (Value::Poly(p), Value::Poly(q)) => Ok(Value::Poly(&p * &q)),
            (Value::Poly(p), Value::Form(f)) | (Value::Form(f), Value::Poly(p)) => Ok(Value::Form(f.scale(&p))),
            (Value::Form(_), Value::Form(_)) => self.fail(ParseErrorKind::Type, at, "use `^` to wedge forms"),
        }
    }

    fn div(&self, a: Value, b: Value, at: &Token) -> Result<Value, ParseError> {
        let Value::Poly(d) = b else {
            return self.fail(ParseErrorKind::Type, at, "cannot divide by a form");
        };
        if !d.is_nonzero_constant() {
            return self.fail(ParseErrorKind::Arithmetic, at, "division only by a nonzero constant");
        }
        let inv = Rational::one() / d.constant_term();
        Ok(match a {
            Value::Poly(p) => Value::Poly(p.scale(&inv)),
            Value::Form(f) => Value::Form(f.scale(&Polynomial::constant(self.nvars, inv))),
        })
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Poly(p) => Value::Poly(-p),
        Value::Form(f) => Value::Form(f.neg()),
    }
}

fn parse_values(text: &str, nvars: usize, prefix: char) -> Result<Vec<(Value, Token)>, ParseError> {
    let tokens = tokenize(text, nvars, prefix)?;
    let mut parser = Parser { tokens, pos: 0, nvars };
    let mut out = Vec::new();
    loop {
        let start = parser.peek().clone();
        out.push((parser.expr()?, start));
        let t = parser.next();
        match t.tok {
            Tok::Comma => continue,
            Tok::End => return Ok(out),
            _ => return parser.fail(ParseErrorKind::Syntax, &t, "unexpected token"),
        }
    }
}

fn single(text: &str, nvars: usize, prefix: char) -> Result<(Value, Token), ParseError> {
    let mut values = parse_values(text, nvars, prefix)?;
    if values.len() != 1 {
        let at = &values[1].1;
        return Err(err(ParseErrorKind::Syntax, at.line, at.column, "expected a single expression"));
    }
    Ok(values.pop().expect("one value"))
}

fn expect_poly((v, at): (Value, Token)) -> Result<Polynomial, ParseError> {
    match v {
        Value::Poly(p) => Ok(p),
        Value::Form(_) => Err(err(ParseErrorKind::Type, at.line, at.column, "expected a polynomial, found a form")),
    }
}

/// Parses a polynomial in variables `<prefix>1..<prefix><nvars>`.
pub fn parse_polynomial_in(text: &str, nvars: usize, prefix: char) -> Result<Polynomial, ParseError> {
    expect_poly(single(text, nvars, prefix)?)
}

pub fn parse_polynomial(text: &str, nvars: usize, family: Family) -> Result<Polynomial, ParseError> {
    parse_polynomial_in(text, nvars, family.prefix())
}

/// Parses a comma-separated list of polynomials, such as the components of a map.
pub fn parse_polynomial_list(text: &str, nvars: usize, family: Family) -> Result<Vec<Polynomial>, ParseError> {
    parse_values(text, nvars, family.prefix())?.into_iter().map(expect_poly).collect()
}

/// Parses a differential form; a bare polynomial is read as a 0-form.
pub fn parse_form_in(text: &str, nvars: usize, prefix: char) -> Result<DifferentialForm, ParseError> {
    Ok(match single(text, nvars, prefix)?.0 {
        Value::Form(f) => f,
        Value::Poly(p) => DifferentialForm::function(p),
    })
}

pub fn parse_form(text: &str, nvars: usize, family: Family) -> Result<DifferentialForm, ParseError> {
    parse_form_in(text, nvars, family.prefix())
}

fn write_rational(out: &mut String, c: &Rational) {
    if c.denom().is_one() {
        let _ = write!(out, "{}", c.numer());
    } else {
        let _ = write!(out, "{}/{}", c.numer(), c.denom());
    }
}

fn write_monomial(out: &mut String, m: &Monomial, prefix: char) {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        let _ = write!(out, "{prefix}{}", i + 1);
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

/// Writes `|c| * m` (without sign).
fn write_term(out: &mut String, m: &Monomial, c: &Rational, prefix: char) {
    let a = c.abs();
    if m.is_one() {
        write_rational(out, &a);
        return;
    }
    if !a.is_one() {
        write_rational(out, &a);
        out.push('*');
    }
    write_monomial(out, m, prefix);
}

/// Canonical rendering: terms in descending grevlex order, e.g.
/// `3/2*x1^2*x2 - x2 + 1`.
pub fn format_polynomial(p: &Polynomial, prefix: char) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let order = TermOrder::grevlex(p.nvars());
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| order.cmp(b.0, a.0));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        write_term(&mut out, m, c, prefix);
    }
    out
}

/// Renders a form as `x1 dx1 - x2 dx2`, `(x1 + x2) dx1`, `dx1^dx2`.
pub fn format_form(f: &DifferentialForm, prefix: char) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    if f.degree() == 0 {
        return format_polynomial(&f.coefficient(&[]), prefix);
    }
    let mut out = String::new();
    for (k, (idx, c)) in f.terms().enumerate() {
        let wedge = idx.iter().map(|i| format!("d{prefix}{}", i + 1)).collect::<Vec<_>>().join("^");
        let single_term = c.len() == 1;
        let negative = single_term && c.terms().next().is_some_and(|(_, v)| v.is_negative());
        if k > 0 {
            out.push_str(if negative { " - " } else { " + " });
        } else if negative {
            out.push('-');
        }
        if single_term {
            let (m, v) = c.terms().next().expect("one term");
            if !(m.is_one() && v.abs().is_one()) {
                write_term(&mut out, m, v, prefix);
                out.push(' ');
            }
        } else {
            let _ = write!(out, "({}) ", format_polynomial(c, prefix));
        }
        out.push_str(&wedge);
    }
    out
}

pub fn format_polynomial_list(ps: &[Polynomial], prefix: char) -> String {
    ps.iter().map(|p| format_polynomial(p, prefix)).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    #[test]
    fn parses_documented_examples() {
        let cusp = parse_polynomial("x1^2 - x2^3", 2, Family::Source).unwrap();
        assert_eq!(cusp.len(), 2);
        let q = parse_polynomial("y1*y2 + 3/2*y1^2", 2, Family::Target).unwrap();
        assert_eq!(q.coefficient(&Monomial::from_exponents(vec![2, 0])), ratio(3, 2));
        let e = parse_polynomial("x1 + z9", 2, Family::Source).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownVariable);
        assert_eq!((e.line, e.column), (1, 6));
    }

    #[test]
    fn out_of_range_and_wrong_family_are_unknown() {
        assert_eq!(parse_polynomial("x3", 2, Family::Source).unwrap_err().kind, ParseErrorKind::UnknownVariable);
        assert_eq!(parse_polynomial("y1", 2, Family::Source).unwrap_err().kind, ParseErrorKind::UnknownVariable);
    }

    #[test]
    fn precedence_and_juxtaposition() {
        let a = parse_polynomial_in("2x1^2 - -x2*3", 2, 'x').unwrap();
        let b = parse_polynomial_in("2*(x1^2) + 3*x2", 2, 'x').unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_polynomial_in("(x1 + x2)^2", 2, 'x').unwrap(), parse_polynomial_in("x1^2 + 2*x1*x2 + x2^2", 2, 'x').unwrap());
        assert_eq!(parse_polynomial_in("x1x2", 2, 'x').unwrap(), parse_polynomial_in("x1*x2", 2, 'x').unwrap());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_polynomial_in("x1 +\n  * x2", 2, 'x').unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ParseErrorKind::Syntax, 2, 3));
        assert_eq!(parse_polynomial_in("(x1", 2, 'x').unwrap_err().kind, ParseErrorKind::Syntax);
        assert_eq!(parse_polynomial_in("x1 / x2", 2, 'x').unwrap_err().kind, ParseErrorKind::Arithmetic);
        assert_eq!(parse_polynomial_in("x1 / 0", 2, 'x').unwrap_err().kind, ParseErrorKind::Arithmetic);
        assert_eq!(parse_polynomial_in("x1 # 2", 2, 'x').unwrap_err().kind, ParseErrorKind::Syntax);
        assert_eq!(parse_polynomial_in("dx1", 2, 'x').unwrap_err().kind, ParseErrorKind::Type);
    }

    #[test]
    fn printing() {
        let p = parse_polynomial_in("1 - x2 + 3/2*x1^2*x2", 2, 'x').unwrap();
        assert_eq!(format_polynomial(&p, 'x'), "3/2*x1^2*x2 - x2 + 1");
        assert_eq!(format_polynomial(&Polynomial::zero(2), 'y'), "0");
        assert_eq!(format_polynomial(&Polynomial::constant(2, rat(-3)), 'y'), "-3");
        let f = parse_form_in("x1 dx1 - x2 dx2", 2, 'x').unwrap();
        assert_eq!(format_form(&f, 'x'), "x1 dx1 - x2 dx2");
        let g = parse_form_in("(x1 + x2) dx1 - dx2", 2, 'x').unwrap();
        assert_eq!(format_form(&g, 'x'), "(x1 + x2) dx1 - dx2");
        let w = parse_form_in("-1/2 dy1^dy2", 2, 'y').unwrap();
        assert_eq!(format_form(&w, 'y'), "-1/2 dy1^dy2");
    }

    #[test]
    fn lists() {
        let g = parse_polynomial_list("x1^2 - x2^2, x2", 2, Family::Source).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(format_polynomial_list(&g, 'x'), "x1^2 - x2^2, x2");
    }

    #[test]
    fn round_trip() {
        for s in ["x1^2 - x2^3", "-x1 + 7/3", "2*x1*x2^4 - 5/7*x2 - 1", "0"] {
            let p = parse_polynomial_in(s, 2, 'x').unwrap();
            assert_eq!(parse_polynomial_in(&format_polynomial(&p, 'x'), 2, 'x').unwrap(), p);
        }
        for s in ["x1 dx1 - x2 dx2", "(x1 - x2^2) dx1^dx3 + 4 dx2^dx3", "-dx3"] {
            let f = parse_form_in(s, 3, 'x').unwrap();
            assert_eq!(parse_form_in(&format_form(&f, 'x'), 3, 'x').unwrap(), f);
        }
    }
}
