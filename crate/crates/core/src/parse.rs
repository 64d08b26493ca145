//! Text parsing for scalars and for sparse linear combinations of
//! generators (`L[..]`, `G[..]`, `c`, `v[..]`, `w[..]`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{Field, FieldKind, Scalar, ScalarError};

/// A basis symbol appearing in element or vector text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gen {
    L(Scalar),
    G(Scalar),
    C,
    V(Scalar),
    W(Scalar),
}

impl Gen {
    pub fn symbol(&self) -> &'static str {
        match self {
            Gen::L(_) => "L",
            Gen::G(_) => "G",
            Gen::C => "c",
            Gen::V(_) => "v",
            Gen::W(_) => "w",
        }
    }
}

pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    pub fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    pub fn error(&self, msg: &str) -> ScalarError {
        ScalarError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ScalarError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            None
        } else {
            Some(self.src[start..self.pos].parse().expect("ascii digits"))
        }
    }

    /// `int ('/' posint)?`, unsigned.
    fn rational(&mut self) -> Result<Option<BigRational>, ScalarError> {
        let Some(n) = self.digits() else {
            return Ok(None);
        };
        if self.eat('/') {
            let at = self.pos;
            let d = self
                .digits()
                .ok_or_else(|| self.error("expected denominator"))?;
            if d.is_zero() {
                return Err(ScalarError::Parse {
                    pos: at,
                    msg: "zero denominator".into(),
                });
            }
            Ok(Some(BigRational::new(n, d)))
        } else {
            Ok(Some(BigRational::from_integer(n)))
        }
    }

    fn peek_is(&mut self, c: char) -> bool {
        self.skip_ws();
        self.peek() == Some(c)
    }

    /// `'t' ('^' int)?` returning the exponent; caller has checked the `t`.
    fn tpow(&mut self, field: &Field) -> Result<usize, ScalarError> {
        if field.kind() == FieldKind::Rational {
            return Err(self.error("'t' is undefined in the rational field"));
        }
        self.texp()
    }

    fn texp(&mut self) -> Result<usize, ScalarError> {
        self.expect('t')?;
        if self.eat('^') {
            let e = self.digits().ok_or_else(|| self.error("expected exponent"))?;
            usize::try_from(e).map_err(|_| self.error("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn monomial(&mut self, field: &Field, coeff: BigRational, power: usize) -> Scalar {
        let mut poly = vec![BigRational::zero(); power + 1];
        poly[power] = coeff;
        field.from_poly(poly)
    }

    /// One term of the scalar grammar.
    fn scalar_term(&mut self, field: &Field) -> Result<Scalar, ScalarError> {
        self.skip_ws();
        if self.peek_is('t') {
            let k = self.tpow(field)?;
            return Ok(self.monomial(field, BigRational::one(), k));
        }
        let q = self
            .rational()?
            .ok_or_else(|| self.error("expected number or 't'"))?;
        let save = self.pos;
        if self.eat('*') {
            if self.peek_is('t') {
                let k = self.tpow(field)?;
                return Ok(self.monomial(field, q, k));
            }
            // '*' belongs to an enclosing product
            self.pos = save;
        }
        Ok(field.from_rational(q))
    }

    /// Full scalar: optional sign, then terms joined by `+`/`-`.
    pub fn scalar(&mut self, field: &Field) -> Result<Scalar, ScalarError> {
        let neg = self.eat('-');
        let first = self.scalar_term(field)?;
        let mut acc = if neg { -first } else { first };
        loop {
            let save = self.pos;
            if self.eat('+') {
                acc = acc + self.scalar_term(field)?;
            } else if self.eat('-') {
                acc = acc - self.scalar_term(field)?;
            } else {
                self.pos = save;
                break;
            }
        }
        Ok(acc)
    }

    fn bracketed(&mut self, field: &Field) -> Result<Scalar, ScalarError> {
        self.expect('[')?;
        let s = self.scalar(field)?;
        self.expect(']')?;
        Ok(s)
    }

    fn factor(&mut self, field: &Field, gen: &mut Option<Gen>) -> Result<Scalar, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        let set = |g: Gen, gen: &mut Option<Gen>, at: usize| {
            if gen.is_some() {
                Err(ScalarError::Parse {
                    pos: at,
                    msg: "more than one generator in a term".into(),
                })
            } else {
                *gen = Some(g);
                Ok(field.one())
            }
        };
        match self.peek() {
            Some('(') => {
                self.bump();
                let s = self.scalar(field)?;
                self.expect(')')?;
                Ok(s)
            }
            Some('t') => {
                let k = self.tpow(field)?;
                Ok(self.monomial(field, BigRational::one(), k))
            }
            Some(c @ ('L' | 'G' | 'v' | 'w')) => {
                self.bump();
                let idx = self.bracketed(field)?;
                let g = match c {
                    'L' => Gen::L(idx),
                    'G' => Gen::G(idx),
                    'v' => Gen::V(idx),
                    _ => Gen::W(idx),
                };
                set(g, gen, start)
            }
            Some('c') => {
                self.bump();
                set(Gen::C, gen, start)
            }
            Some(d) if d.is_ascii_digit() => Ok(field.from_rational(self.rational()?.unwrap())),
            _ => Err(self.error("expected a coefficient or generator")),
        }
    }

    /// Sum of signed products; each product holds exactly one generator.
    pub fn combination(&mut self, field: &Field) -> Result<Vec<(Scalar, Gen)>, ScalarError> {
        let mut out = Vec::new();
        self.skip_ws();
        // A lone `0` is the empty combination.
        let save = self.pos;
        if self.eat('0') {
            self.skip_ws();
            if self.at_end() {
                return Ok(out);
            }
        }
        self.pos = save;
        let mut sign_neg = self.eat('-');
        loop {
            let term_start = {
                self.skip_ws();
                self.pos
            };
            let mut gen = None;
            let mut coeff = self.factor(field, &mut gen)?;
            while self.eat('*') {
                coeff = coeff * self.factor(field, &mut gen)?;
            }
            let g = gen.ok_or(ScalarError::Parse {
                pos: term_start,
                msg: "term has no generator".into(),
            })?;
            out.push((if sign_neg { -coeff } else { coeff }, g));
            if self.eat('+') {
                sign_neg = false;
            } else if self.eat('-') {
                sign_neg = true;
            } else {
                break;
            }
        }
        self.skip_ws();
        if !self.at_end() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(out)
    }
}

/// Ascending coefficients of a polynomial in `t` written with the scalar
/// grammar, e.g. `t^2 - 2`.
pub fn parse_polynomial(text: &str) -> Result<Vec<BigRational>, ScalarError> {
    let mut c = Cursor::new(text);
    let mut poly: Vec<BigRational> = Vec::new();
    let mut neg = c.eat('-');
    loop {
        let (q, k) = if c.peek_is('t') {
            (BigRational::one(), c.texp()?)
        } else {
            let q = c.rational()?.ok_or_else(|| c.error("expected number or 't'"))?;
            if c.eat('*') {
                (q, c.texp()?)
            } else {
                (q, 0)
            }
        };
        if poly.len() <= k {
            poly.resize(k + 1, BigRational::zero());
        }
        poly[k] += if neg { -q } else { q };
        if c.eat('+') {
            neg = false;
        } else if c.eat('-') {
            neg = true;
        } else {
            break;
        }
    }
    c.skip_ws();
    if !c.at_end() {
        return Err(c.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses a linear combination such as `3/16*L[0] + L[1] - (1 + t)*c`.
pub fn parse_combination(field: &Field, text: &str) -> Result<Vec<(Scalar, Gen)>, ScalarError> {
    Cursor::new(text).combination(field)
}

/// Coefficient prefix for canonical term printing: `""`, `"-"`, `"3/8*"`, `"(1 + t)*"`.
/// Returns `(negative, text)` so callers can join with ` + ` / ` - `.
pub(crate) fn coefficient_prefix(c: &Scalar) -> (bool, String) {
    if c.is_monomial() {
        let neg = c.is_negative_monomial();
        let mag = if neg { -c } else { c.clone() };
        if mag.is_one() {
            (neg, String::new())
        } else {
            (neg, format!("{mag}*"))
        }
    } else {
        (false, format!("({c})*"))
    }
}

/// Joins `(coefficient, symbol)` pairs in the canonical layout.
pub(crate) fn format_terms<'a>(terms: impl IntoIterator<Item = (&'a Scalar, String)>) -> String {
    let mut out = String::new();
    for (c, sym) in terms {
        let (neg, pre) = coefficient_prefix(c);
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&pre);
        out.push_str(&sym);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
