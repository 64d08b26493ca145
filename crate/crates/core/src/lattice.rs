//! Finitely generated additive subgroups `M` of the ground field, their
//! cosets, the scaler set `S(M) = {a : aM = M}`, and characters `M -> F*`.
//!
//! A lattice is stored through the Hermite normal form of the integer
//! matrix obtained by clearing denominators of the generators' rational
//! coordinates. The HNF is canonical, so two lattices are equal exactly
//! when their reduced bases agree.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Field, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice needs at least one generator")]
    EmptyGenerators,
    #[error("lattice generators must be nonzero")]
    ZeroGenerator,
    #[error("{0} is not a member of the lattice")]
    NotMember(String),
    #[error("scaler must be nonzero")]
    ZeroScaler,
    #[error("character values must be nonzero")]
    ZeroCharacterValue,
    #[error("expected {expected} character values, got {got}")]
    CharacterArity { expected: usize, got: usize },
    #[error("coset offset {0} does not satisfy 2*offset in M")]
    NotDoubling(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Integer Hermite normal form (row style) of `rows`; zero rows dropped.
///
/// Output rows are in echelon form with strictly increasing pivot columns,
/// positive pivots, and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut r = 0;
    for col in 0..ncols {
        // Euclid down the column until at most one nonzero entry remains at or below r.
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][col].is_zero()
                    && best.is_none_or(|b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            rows.swap(r, p);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                for j in col..ncols {
                    let t = &q * &rows[r][j];
                    rows[i][j] -= t;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r >= rows.len() || rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = rows[i][col].div_floor(&rows[r][col]);
            if !q.is_zero() {
                for j in col..ncols {
                    let t = &q * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

#[derive(Debug, PartialEq, Eq)]
struct LatticeData {
    field: Field,
    generators: Vec<Scalar>,
    /// HNF rows of the denominator-cleared coordinate matrix.
    hnf: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    /// Common denominator: `zbasis[i] = hnf[i] / denom`.
    denom: BigInt,
    zbasis: Vec<Scalar>,
}

/// A finitely generated subgroup of the field. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Lattice(Arc<LatticeData>);

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field && self.0.zbasis == other.0.zbasis)
    }
}
impl Eq for Lattice {}

/// Integer coordinates in the reduced basis.
pub type IntCoords = Vec<BigInt>;

fn lcm_denoms<'a>(it: impl Iterator<Item = &'a BigRational>) -> BigInt {
    it.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

impl Lattice {
    pub fn new(field: &Field, generators: Vec<Scalar>) -> Result<Lattice, LatticeError> {
        if generators.is_empty() {
            return Err(LatticeError::EmptyGenerators);
        }
        if generators.iter().any(Scalar::is_zero) {
            return Err(LatticeError::ZeroGenerator);
        }
        let d = field.degree();
        let denom = lcm_denoms(generators.iter().flat_map(|g| g.coords().iter()));
        let rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                g.coords()
                    .iter()
                    .map(|c| (c * BigRational::from_integer(denom.clone())).to_integer())
                    .collect()
            })
            .collect();
        let hnf = hermite_normal_form(rows, d);
        let pivots = hnf
            .iter()
            .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        let zbasis = hnf
            .iter()
            .map(|row| {
                field.from_coords(
                    row.iter()
                        .map(|x| BigRational::new(x.clone(), denom.clone()))
                        .collect(),
                )
            })
            .collect();
        Ok(Lattice(Arc::new(LatticeData {
            field: field.clone(),
            generators,
            hnf,
            pivots,
            denom,
            zbasis,
        })))
    }

    /// The lattice `Z` inside the rational field (or any field).
    pub fn integers(field: &Field) -> Lattice {
        Lattice::new(field, vec![field.one()]).expect("Z")
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn generators(&self) -> &[Scalar] {
        &self.0.generators
    }

    pub fn zbasis(&self) -> &[Scalar] {
        &self.0.zbasis
    }

    pub fn rank(&self) -> usize {
        self.0.zbasis.len()
    }

    /// Scaled coordinates `x * denom` as rationals.
    fn scaled(&self, x: &Scalar) -> Vec<BigRational> {
        let dq = BigRational::from_integer(self.0.denom.clone());
        x.coords().iter().map(|c| c * &dq).collect()
    }

    /// Integer coordinates of `x` in the reduced basis, or `None` if `x ∉ M`.
    pub fn coords(&self, x: &Scalar) -> Option<IntCoords> {
        let mut v = self.scaled(x);
        let mut out = Vec::with_capacity(self.rank());
        for (row, &p) in self.0.hnf.iter().zip(&self.0.pivots) {
            let k = &v[p] / BigRational::from_integer(row[p].clone());
            if !k.is_integer() {
                return None;
            }
            let k = k.to_integer();
            for (j, r) in row.iter().enumerate().skip(p) {
                v[j] -= BigRational::from_integer(&k * r);
            }
            out.push(k);
        }
        if v.iter().all(Zero::is_zero) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.coords(x).is_some()
    }

    pub fn require(&self, x: &Scalar) -> Result<IntCoords, LatticeError> {
        self.coords(x)
            .ok_or_else(|| LatticeError::NotMember(x.to_string()))
    }

    /// The element with the given integer coordinates.
    pub fn element(&self, coords: &[BigInt]) -> Scalar {
        let f = self.field();
        coords
            .iter()
            .zip(self.zbasis())
            .fold(f.zero(), |acc, (k, b)| {
                acc + b.scale(&BigRational::from_integer(k.clone()))
            })
    }

    /// Canonical representative of the coset `x + M`: pivot coordinates
    /// are reduced into `[0, pivot)`.
    pub fn reduce(&self, x: &Scalar) -> Scalar {
        let mut v = self.scaled(x);
        for (row, &p) in self.0.hnf.iter().zip(&self.0.pivots) {
            let k = (&v[p] / BigRational::from_integer(row[p].clone())).floor();
            let k = k.to_integer();
            if k.is_zero() {
                continue;
            }
            for (j, r) in row.iter().enumerate().skip(p) {
                v[j] -= BigRational::from_integer(&k * r);
            }
        }
        let dq = BigRational::from_integer(self.0.denom.clone());
        self.field()
            .from_coords(v.into_iter().map(|c| c / &dq).collect())
    }

    /// Whether every element of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.zbasis().iter().all(|b| self.contains(b))
    }

    /// Membership test for the scaler set: `a*M = M`.
    pub fn is_scaler(&self, a: &Scalar) -> Result<bool, LatticeError> {
        if a.is_zero() {
            return Err(LatticeError::ZeroScaler);
        }
        let inv = a.inv()?;
        Ok(self
            .zbasis()
            .iter()
            .all(|b| self.contains(&(a * b)) && self.contains(&(&inv * b))))
    }

    /// Points with every coordinate in `-radius..=radius`, in lexicographic
    /// coordinate order.
    pub fn window(&self, radius: i64) -> Vec<Scalar> {
        let r = self.rank();
        let mut out = Vec::new();
        let mut idx = vec![-radius; r];
        loop {
            let coords: Vec<BigInt> = idx.iter().map(|&i| BigInt::from(i)).collect();
            out.push(self.element(&coords));
            let mut k = r;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < radius {
                    idx[k] += 1;
                    for x in idx.iter_mut().skip(k + 1) {
                        *x = -radius;
                    }
                    break;
                }
            }
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.zbasis().iter().map(|b| format!("Z*({b})")).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Rank of the subgroup generated by `elements` (zeros ignored).
pub fn span_rank(field: &Field, elements: &[Scalar]) -> usize {
    let gens: Vec<Scalar> = elements.iter().filter(|x| !x.is_zero()).cloned().collect();
    if gens.is_empty() {
        return 0;
    }
    Lattice::new(field, gens).map(|l| l.rank()).unwrap_or(0)
}

/// A coset `offset + M`, used as the index set of odd generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    lattice: Lattice,
    offset: Scalar,
}

impl Coset {
    /// Builds `offset + M` with the offset reduced to its canonical
    /// representative. Requires `2*offset ∈ M`.
    pub fn new(lattice: &Lattice, offset: &Scalar) -> Result<Coset, LatticeError> {
        let two = lattice.field().from_int(2);
        if !lattice.contains(&(&two * offset)) {
            return Err(LatticeError::NotDoubling(offset.to_string()));
        }
        Ok(Coset {
            lattice: lattice.clone(),
            offset: lattice.reduce(offset),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn offset(&self) -> &Scalar {
        &self.offset
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.lattice.contains(&(x - &self.offset))
    }

    /// Coordinates of `x - offset`.
    pub fn coords(&self, x: &Scalar) -> Option<IntCoords> {
        self.lattice.coords(&(x - &self.offset))
    }

    pub fn window(&self, radius: i64) -> Vec<Scalar> {
        self.lattice
            .window(radius)
            .into_iter()
            .map(|m| &m + &self.offset)
            .collect()
    }
}

/// A character `χ : M -> F*`, given by its values on the reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitHom {
    lattice: Lattice,
    values: Vec<Scalar>,
}

impl UnitHom {
    pub fn new(lattice: &Lattice, values: Vec<Scalar>) -> Result<UnitHom, LatticeError> {
        if values.len() != lattice.rank() {
            return Err(LatticeError::CharacterArity {
                expected: lattice.rank(),
                got: values.len(),
            });
        }
        if values.iter().any(Scalar::is_zero) {
            return Err(LatticeError::ZeroCharacterValue);
        }
        Ok(UnitHom {
            lattice: lattice.clone(),
            values,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn eval(&self, x: &Scalar) -> Result<Scalar, LatticeError> {
        let k = self.lattice.require(x)?;
        let mut acc = self.lattice.field().one();
        for (v, e) in self.values.iter().zip(&k) {
            acc = acc * v.pow(e)?;
        }
        Ok(acc)
    }

    /// `x ↦ χ(a x)`, again a character when `a` is a scaler.
    pub fn precompose_scale(&self, a: &Scalar) -> Result<UnitHom, LatticeError> {
        let values = self
            .lattice
            .zbasis()
            .iter()
            .map(|b| self.eval(&(a * b)))
            .collect::<Result<_, _>>()?;
        UnitHom::new(&self.lattice, values)
    }
}
