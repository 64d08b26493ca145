//! Exact arithmetic in the ground field: the rationals or a simple
//! extension `Q(t)` given by a monic squarefree minimal polynomial.
//!
//! Elements are stored as coordinate vectors in the power basis
//! `1, t, ..., t^(d-1)`. The generator is always written `t` in text.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::parse::Cursor;
use crate::qpoly;

/// Errors raised by field construction and scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("minimal polynomial must have degree at least 1")]
    ZeroDegree,
    #[error("minimal polynomial is not monic")]
    NotMonic,
    #[error("minimal polynomial is not squarefree (shares factor {factor} with its derivative)")]
    NotSquarefree { factor: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible: minimal polynomial is reducible, factor {factor}")]
    NotInvertible { factor: String },
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Extension,
}

/// Declarative description of a field, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub kind: FieldKind,
    /// Ascending coefficients of the minimal polynomial; unused for `Rational`.
    pub minpoly: Vec<BigRational>,
}

impl FieldSpec {
    pub fn rational() -> Self {
        FieldSpec {
            kind: FieldKind::Rational,
            minpoly: vec![],
        }
    }

    pub fn extension(minpoly: Vec<BigRational>) -> Self {
        FieldSpec {
            kind: FieldKind::Extension,
            minpoly,
        }
    }

    /// Convenience constructor from small integer coefficients (ascending).
    pub fn extension_from_ints(coeffs: &[i64]) -> Self {
        Self::extension(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldData {
    kind: FieldKind,
    /// Monic, ascending, length `degree + 1`.
    minpoly: Vec<BigRational>,
    degree: usize,
}

/// A validated field handle. Cheap to clone; shared read-only.
#[derive(Debug, Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Field, ScalarError> {
        match spec.kind {
            FieldKind::Rational => Ok(Field(Arc::new(FieldData {
                kind: FieldKind::Rational,
                minpoly: vec![BigRational::zero(), BigRational::one()],
                degree: 1,
            }))),
            FieldKind::Extension => {
                let p = qpoly::trim(spec.minpoly);
                if p.len() < 2 {
                    return Err(ScalarError::ZeroDegree);
                }
                if !p.last().unwrap().is_one() {
                    return Err(ScalarError::NotMonic);
                }
                let g = qpoly::gcd(&p, &qpoly::derivative(&p));
                if g.len() > 1 {
                    return Err(ScalarError::NotSquarefree {
                        factor: qpoly::format(&g),
                    });
                }
                let degree = p.len() - 1;
                Ok(Field(Arc::new(FieldData {
                    kind: FieldKind::Extension,
                    minpoly: p,
                    degree,
                })))
            }
        }
    }

    pub fn rational() -> Field {
        Field::new(FieldSpec::rational()).expect("rational field")
    }

    /// `Q(t)` with `t^2 = 2`.
    pub fn sqrt2() -> Field {
        Field::new(FieldSpec::extension_from_ints(&[-2, 0, 1])).expect("Q(sqrt 2)")
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn minpoly(&self) -> &[BigRational] {
        &self.0.minpoly
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Scalar {
        self.from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(&self, q: BigRational) -> Scalar {
        let mut s = self.zero();
        s.coeffs[0] = q;
        s
    }

    /// The generator `t`. Panics on the rational field.
    pub fn gen(&self) -> Scalar {
        assert!(
            self.kind() == FieldKind::Extension,
            "rational field has no generator"
        );
        self.from_poly(vec![BigRational::zero(), BigRational::one()])
    }

    /// Reduces an arbitrary polynomial in `t` modulo the minimal polynomial.
    pub fn from_poly(&self, poly: Vec<BigRational>) -> Scalar {
        let mut coeffs = qpoly::rem(&qpoly::trim(poly), &self.0.minpoly);
        coeffs.resize(self.degree(), BigRational::zero());
        Scalar {
            field: self.clone(),
            coeffs,
        }
    }

    /// Builds a scalar from its coordinates; extra coordinates are rejected.
    pub fn from_coords(&self, coords: Vec<BigRational>) -> Scalar {
        assert!(coords.len() <= self.degree(), "too many coordinates");
        let mut coeffs = coords;
        coeffs.resize(self.degree(), BigRational::zero());
        Scalar {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        let mut cur = Cursor::new(text);
        let s = cur.scalar(self)?;
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        Ok(s)
    }
}

/// An exact element of a [`Field`].
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    coeffs: Vec<BigRational>,
}

impl Scalar {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the scalar lies in the prime field `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// `Some(n)` when the scalar is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    fn check_field(&self, other: &Scalar) {
        assert!(
            self.field == other.field,
            "scalars from different fields combined"
        );
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.field.degree() == 1 {
            return Ok(self.field.from_rational(self.coeffs[0].recip()));
        }
        let a = qpoly::trim(self.coeffs.clone());
        let (g, s) = qpoly::inverse_mod(&a, self.field.minpoly());
        if g.len() > 1 {
            return Err(ScalarError::NotInvertible {
                factor: qpoly::format(&g),
            });
        }
        Ok(self.field.from_poly(s))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.check_field(rhs);
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: &BigInt) -> Result<Scalar, ScalarError> {
        let base = if exp.is_negative() {
            self.inv()?
        } else {
            self.clone()
        };
        let mut e = exp.abs();
        let mut acc = self.field.one();
        let mut sq = base;
        let two = BigInt::from(2);
        while !e.is_zero() {
            if (&e % &two).is_one() {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e /= &two;
        }
        Ok(acc)
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Number of nonzero coordinates.
    fn support_len(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// True when the canonical text has a single term with a leading minus.
    pub(crate) fn is_negative_monomial(&self) -> bool {
        self.support_len() == 1 && self.coeffs.iter().any(|c| c.is_negative())
    }

    /// True when the canonical text is a single term (no binary `+`/`-`).
    pub(crate) fn is_monomial(&self) -> bool {
        self.support_len() <= 1
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Storage order only (coordinate-lexicographic); not a field ordering.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_field(rhs);
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check_field(rhs);
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_field(rhs);
        if self.field.degree() == 1 {
            return self.field.from_rational(&self.coeffs[0] * &rhs.coeffs[0]);
        }
        self.field.from_poly(qpoly::mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn format_power(k: usize) -> String {
    match k {
        1 => "t".to_string(),
        _ => format!("t^{k}"),
    }
}

/// Canonical text: ascending powers, lowest terms, ` + ` / ` - ` separators.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            let body = if k == 0 {
                format_rational(&mag)
            } else if mag.is_one() {
                format_power(k)
            } else {
                format!("{}*{}", format_rational(&mag), format_power(k))
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { '-' } else { '+' })?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}
