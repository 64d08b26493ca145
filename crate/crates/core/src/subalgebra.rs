//! Finite-dimensional subalgebras of the centerless quotient `Vir[M]/Fc`:
//! nilpotent `exp(α ad L_{-x})` conjugation, the two-dimensional pairs it
//! produces, and bracket closure with a dimension cap.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::linalg::{SparseVec, SpanSolver};
use crate::scalar::Scalar;
use crate::vir::{bracket, AlgebraElement, AlgebraError};
use crate::Lattice;

pub const DEFAULT_CLOSURE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubalgebraError {
    #[error("subalgebra computations run in the centerless quotient")]
    ModeError,
    #[error("degree {0} is not in Z_{{>=0}}*x or -x; exp(ad L_{{-x}}) would not terminate")]
    NotNilpotentChain(String),
    #[error("lowering degree must be nonzero")]
    ZeroDegree,
    #[error("pair certificate failed: [X, Y] = {bracket}, expected {expected}")]
    CertificateFailed { bracket: String, expected: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `exp(α ad L_{-x}) target`, an exact finite sum.
///
/// `ad L_{-x}` sends `L_{mx}` to `(m+1)x L_{(m-1)x}` and kills `L_{-x}`, so
/// the series stops once every term has been pushed down to degree `-x`.
pub fn exp_ad_lowering(
    alpha: &Scalar,
    x: &Scalar,
    target: &AlgebraElement,
) -> Result<AlgebraElement, SubalgebraError> {
    if !target.is_centerless() {
        return Err(SubalgebraError::ModeError);
    }
    if x.is_zero() {
        return Err(SubalgebraError::ZeroDegree);
    }
    let lat = target.lattice();
    let xinv = x.inv().map_err(AlgebraError::from)?;
    for d in target.lterms().keys() {
        let m = (d * &xinv).as_integer();
        if !m.is_some_and(|m| m >= -BigInt::one()) {
            return Err(SubalgebraError::NotNilpotentChain(d.to_string()));
        }
    }
    let lower = AlgebraElement::l(lat, &-x, true)?;
    let mut sum = target.clone();
    let mut term = target.clone();
    let mut k = 1i64;
    while !term.is_zero() {
        let step = &*alpha * &lat.field().from_ratio(1, k);
        term = bracket(&lower, &term)?.scale(&step);
        sum = sum.add(&term)?;
        k += 1;
    }
    Ok(sum)
}

/// `X = exp(α ad L_{-x}) L_0`, `Y = exp(α ad L_{-x}) L_{nx}` with `[X, Y] = nx·Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoDimPair {
    pub x: AlgebraElement,
    pub y: AlgebraElement,
    pub eigen: Scalar,
}

pub fn two_dim_pair(
    lattice: &Lattice,
    x: &Scalar,
    alpha: &Scalar,
    n: u32,
) -> Result<TwoDimPair, SubalgebraError> {
    if x.is_zero() {
        return Err(SubalgebraError::ZeroDegree);
    }
    let f = lattice.field();
    let nx = &f.from_int(n.into()) * x;
    let l0 = AlgebraElement::l(lattice, &f.zero(), true)?;
    let lnx = AlgebraElement::l(lattice, &nx, true)?;
    let xe = exp_ad_lowering(alpha, x, &l0)?;
    let ye = exp_ad_lowering(alpha, x, &lnx)?;
    let br = bracket(&xe, &ye)?;
    let expected = ye.scale(&nx);
    if br != expected {
        return Err(SubalgebraError::CertificateFailed {
            bracket: br.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(TwoDimPair {
        x: xe,
        y: ye,
        eigen: nx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStatus {
    Closed,
    CapExceeded,
}

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub basis: Vec<AlgebraElement>,
    pub dim: usize,
    pub status: ClosureStatus,
}

/// Coordinates of an element in the `{L_μ, c}` basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Coord {
    L(Scalar),
    C,
}

pub(crate) fn sparse(x: &AlgebraElement) -> SparseVec<Coord> {
    let mut v: SparseVec<Coord> = x
        .lterms()
        .iter()
        .map(|(mu, a)| (Coord::L(mu.clone()), a.clone()))
        .collect();
    if !x.ccoeff().is_zero() {
        v.insert(Coord::C, x.ccoeff().clone());
    }
    v
}

/// Bracket closure of `gens`; stops with `CapExceeded` once the span
/// exceeds `cap` dimensions.
pub fn closure(gens: &[AlgebraElement], cap: usize) -> Result<ClosureReport, SubalgebraError> {
    let Some(first) = gens.first() else {
        return Ok(ClosureReport {
            basis: vec![],
            dim: 0,
            status: ClosureStatus::Closed,
        });
    };
    if gens.iter().any(|g| !g.is_centerless()) {
        return Err(SubalgebraError::ModeError);
    }
    let mut solver = SpanSolver::new(first.lattice().field());
    let mut basis: Vec<AlgebraElement> = Vec::new();
    for g in gens {
        if solver.insert(sparse(g)) {
            basis.push(g.clone());
        }
    }
    // Pairs (i, j) with i < j, visited in order of the larger index.
    let mut j = 1;
    while j < basis.len() {
        for i in 0..j {
            if basis.len() > cap {
                return Ok(ClosureReport {
                    dim: basis.len(),
                    basis,
                    status: ClosureStatus::CapExceeded,
                });
            }
            let b = bracket(&basis[i], &basis[j])?;
            if solver.insert(sparse(&b)) {
                basis.push(b);
            }
        }
        j += 1;
    }
    let status = if basis.len() > cap {
        ClosureStatus::CapExceeded
    } else {
        ClosureStatus::Closed
    };
    Ok(ClosureReport {
        dim: basis.len(),
        basis,
        status,
    })
}

/// Exact coordinates of `x` over `basis`, or `None` when `x` is outside the span.
pub fn span_membership(x: &AlgebraElement, basis: &[AlgebraElement]) -> Option<Vec<Scalar>> {
    let f = x.lattice().field();
    let mut solver = SpanSolver::new(f);
    for b in basis {
        solver.insert(sparse(b));
    }
    solver.solve(sparse(x))
}

/// Degrees that are non-negative integer multiples of `x`, for callers that
/// need to pre-check [`exp_ad_lowering`] inputs.
pub fn chain_index(x: &Scalar, d: &Scalar) -> Option<BigInt> {
    let m = (d * &x.inv().ok()?).as_integer()?;
    (!m.is_negative() || m == -BigInt::one()).then_some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn z() -> (Field, Lattice) {
        let q = Field::rational();
        (q.clone(), Lattice::integers(&q))
    }

    fn el(m: &Lattice, s: &str) -> AlgebraElement {
        AlgebraElement::parse(m, true, s).unwrap()
    }

    #[test]
    fn exp_ad_on_l1() {
        let (q, m) = z();
        let a = q.from_ratio(2, 7);
        let got = exp_ad_lowering(&a, &q.one(), &el(&m, "L[1]")).unwrap();
        // L_1 + 2αL_0 + α²L_{-1}
        assert_eq!(got, el(&m, "L[1] + 4/7*L[0] + 4/49*L[-1]"));
    }

    #[test]
    fn exp_ad_on_l2() {
        let (q, m) = z();
        let got = exp_ad_lowering(&q.one(), &q.one(), &el(&m, "L[2]")).unwrap();
        assert_eq!(got, el(&m, "L[2] + 3*L[1] + 3*L[0] + L[-1]"));
        let same = exp_ad_lowering(&q.zero(), &q.one(), &el(&m, "L[2]")).unwrap();
        assert_eq!(same, el(&m, "L[2]"));
    }

    #[test]
    fn exp_ad_rejects_bad_input() {
        let (q, m) = z();
        assert!(matches!(
            exp_ad_lowering(&q.one(), &q.one(), &el(&m, "L[-2]")),
            Err(SubalgebraError::NotNilpotentChain(_))
        ));
        assert!(matches!(
            exp_ad_lowering(&q.one(), &q.from_int(2), &el(&m, "L[1]")),
            Err(SubalgebraError::NotNilpotentChain(_))
        ));
        let centered = AlgebraElement::parse(&m, false, "L[1]").unwrap();
        assert_eq!(
            exp_ad_lowering(&q.one(), &q.one(), &centered).unwrap_err(),
            SubalgebraError::ModeError
        );
    }

    #[test]
    fn pair_examples() {
        let (q, m) = z();
        let p = two_dim_pair(&m, &q.from_int(2), &q.one(), 1).unwrap();
        assert_eq!(p.x, el(&m, "L[0] + 2*L[-2]"));
        assert_eq!(p.y, el(&m, "L[2] + 4*L[0] + 4*L[-2]"));
        assert_eq!(p.eigen, q.from_int(2));
        let p = two_dim_pair(&m, &q.one(), &q.one(), 2).unwrap();
        assert_eq!(p.y, el(&m, "L[2] + 3*L[1] + 3*L[0] + L[-1]"));
        let a = q.from_ratio(-5, 3);
        let p = two_dim_pair(&m, &q.one(), &a, 1).unwrap();
        assert_eq!(p.x, el(&m, "L[0] - 5/3*L[-1]"));
        assert_eq!(p.y, el(&m, "L[1] - 10/3*L[0] + 25/9*L[-1]"));
        assert_eq!(two_dim_pair(&m, &q.zero(), &a, 1).unwrap_err(), SubalgebraError::ZeroDegree);
    }

    #[test]
    fn closure_examples() {
        let (_, m) = z();
        let r = closure(&[el(&m, "L[-1]"), el(&m, "L[0]"), el(&m, "L[1]")], 12).unwrap();
        assert_eq!((r.status, r.dim), (ClosureStatus::Closed, 3));
        let r = closure(&[el(&m, "L[1]"), el(&m, "L[2]")], 10).unwrap();
        assert_eq!(r.status, ClosureStatus::CapExceeded);
        assert!(r.dim > 10);
        let r = closure(&[el(&m, "L[1]"), el(&m, "2*L[1]")], 12).unwrap();
        assert_eq!((r.status, r.dim), (ClosureStatus::Closed, 1));
    }

    #[test]
    fn span_membership_examples() {
        let (q, m) = z();
        assert!(span_membership(&el(&m, "L[0]"), &[el(&m, "L[1]")]).is_none());
        assert_eq!(
            span_membership(&AlgebraElement::zero(&m, true), &[el(&m, "L[1]"), el(&m, "L[2]")]),
            Some(vec![q.zero(), q.zero()])
        );
    }

    #[test]
    fn chain_index_values() {
        let q = Field::rational();
        assert_eq!(chain_index(&q.from_int(2), &q.from_int(6)), Some(BigInt::from(3)));
        assert_eq!(chain_index(&q.from_int(2), &q.from_int(-2)), Some(BigInt::from(-1)));
        assert_eq!(chain_index(&q.from_int(2), &q.from_int(-4)), None);
    }
}
