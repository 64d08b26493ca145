//! Elements of the generalized Virasoro algebra `Vir[M]` with basis
//! `{L_μ, c}` and of its centerless quotient, together with the bracket
//!
//! ```text
//! [L_μ, L_ν] = (ν - μ) L_{μ+ν} + (μ³ - μ)/12 · δ_{μ+ν,0} c,   c central,
//! ```
//!
//! the `M`-grading and the two families of automorphisms.

use std::collections::BTreeMap;
use std::fmt;

use crate::lattice::{Lattice, LatticeError, UnitHom};
use crate::parse::{format_terms, parse_combination, Gen};
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("elements live over different lattices")]
    LatticeMismatch,
    #[error("cannot combine centered and centerless elements")]
    ModeMismatch,
    #[error("{0} is not a scaler of the lattice (aM != M)")]
    NotAScaler(String),
    #[error("generator {0} is not allowed here")]
    BadGenerator(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A finite combination `Σ a_μ L_μ + k c` in `Vir[M]` or `Vir[M]/Fc`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    lattice: Lattice,
    lterms: BTreeMap<Scalar, Scalar>,
    ccoeff: Scalar,
    centerless: bool,
}

impl AlgebraElement {
    pub fn zero(lattice: &Lattice, centerless: bool) -> Self {
        AlgebraElement {
            lattice: lattice.clone(),
            lterms: BTreeMap::new(),
            ccoeff: lattice.field().zero(),
            centerless,
        }
    }

    /// `L_μ`.
    pub fn l(lattice: &Lattice, mu: &Scalar, centerless: bool) -> Result<Self, AlgebraError> {
        let mut x = Self::zero(lattice, centerless);
        x.add_l(mu, lattice.field().one())?;
        Ok(x)
    }

    /// The central element (zero in centerless mode).
    pub fn c(lattice: &Lattice, centerless: bool) -> Self {
        let mut x = Self::zero(lattice, centerless);
        if !centerless {
            x.ccoeff = lattice.field().one();
        }
        x
    }

    pub fn from_terms(
        lattice: &Lattice,
        centerless: bool,
        terms: Vec<(Scalar, Gen)>,
    ) -> Result<Self, AlgebraError> {
        let mut x = Self::zero(lattice, centerless);
        for (a, g) in terms {
            match g {
                Gen::L(mu) => x.add_l(&mu, a)?,
                Gen::C => x.add_c(a),
                other => return Err(AlgebraError::BadGenerator(other.symbol())),
            }
        }
        Ok(x)
    }

    pub fn parse(lattice: &Lattice, centerless: bool, text: &str) -> Result<Self, AlgebraError> {
        let terms = parse_combination(lattice.field(), text)?;
        Self::from_terms(lattice, centerless, terms)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn is_centerless(&self) -> bool {
        self.centerless
    }

    pub fn lterms(&self) -> &BTreeMap<Scalar, Scalar> {
        &self.lterms
    }

    pub fn ccoeff(&self) -> &Scalar {
        &self.ccoeff
    }

    pub fn coeff(&self, mu: &Scalar) -> Scalar {
        self.lterms
            .get(mu)
            .cloned()
            .unwrap_or_else(|| self.lattice.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.lterms.is_empty() && self.ccoeff.is_zero()
    }

    /// Degrees with nonzero `L` coefficient.
    pub fn support(&self) -> Vec<Scalar> {
        self.lterms.keys().cloned().collect()
    }

    pub fn add_l(&mut self, mu: &Scalar, a: Scalar) -> Result<(), AlgebraError> {
        self.lattice.require(mu)?;
        add_into(&mut self.lterms, mu, a);
        Ok(())
    }

    /// Adds `a·c`; ignored in centerless mode.
    pub fn add_c(&mut self, a: Scalar) {
        if !self.centerless {
            self.ccoeff = &self.ccoeff + &a;
        }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.lattice != other.lattice {
            return Err(AlgebraError::LatticeMismatch);
        }
        if self.centerless != other.centerless {
            return Err(AlgebraError::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (mu, a) in &other.lterms {
            add_into(&mut out.lterms, mu, a.clone());
        }
        out.ccoeff = &out.ccoeff + &other.ccoeff;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.scale(&-&self.lattice.field().one()))
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut out = Self::zero(&self.lattice, self.centerless);
        if k.is_zero() {
            return out;
        }
        out.lterms = self
            .lterms
            .iter()
            .map(|(mu, a)| (mu.clone(), a * k))
            .collect();
        out.ccoeff = &self.ccoeff * k;
        out
    }

    /// Image in the centerless quotient.
    pub fn to_centerless(&self) -> Self {
        AlgebraElement {
            lattice: self.lattice.clone(),
            lterms: self.lterms.clone(),
            ccoeff: self.lattice.field().zero(),
            centerless: true,
        }
    }

    /// Degrees in canonical print order: lexicographic in reduced-basis
    /// integer coordinates.
    pub fn sorted_degrees(&self) -> Vec<Scalar> {
        let mut ds: Vec<_> = self
            .lterms
            .keys()
            .map(|mu| (self.lattice.coords(mu).expect("degree in M"), mu.clone()))
            .collect();
        ds.sort();
        ds.into_iter().map(|(_, mu)| mu).collect()
    }
}

pub(crate) fn add_into(map: &mut BTreeMap<Scalar, Scalar>, key: &Scalar, a: Scalar) {
    if a.is_zero() {
        return;
    }
    match map.get_mut(key) {
        Some(v) => {
            *v = &*v + &a;
            if v.is_zero() {
                map.remove(key);
            }
        }
        None => {
            map.insert(key.clone(), a);
        }
    }
}

/// The central term `(μ³ - μ)/12` of `[L_μ, L_{-μ}]`.
pub fn virasoro_cocycle(mu: &Scalar) -> Scalar {
    let f = mu.field();
    let cube = &(mu * mu) * mu;
    &(&cube - mu) * &f.from_ratio(1, 12)
}

/// Lie bracket, bilinear extension of the defining relations.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    x.check(y)?;
    let mut out = AlgebraElement::zero(&x.lattice, x.centerless);
    for (mu, a) in &x.lterms {
        for (nu, b) in &y.lterms {
            let ab = a * b;
            let deg = mu + nu;
            add_into(&mut out.lterms, &deg, &ab * &(nu - mu));
            if !x.centerless && deg.is_zero() {
                out.ccoeff = &out.ccoeff + &(&ab * &virasoro_cocycle(mu));
            }
        }
    }
    Ok(out)
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`; zero in a Lie algebra.
pub fn jacobi_residual(
    x: &AlgebraElement,
    y: &AlgebraElement,
    z: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    let a = bracket(x, &bracket(y, z)?)?;
    let b = bracket(y, &bracket(z, x)?)?;
    let c = bracket(z, &bracket(x, y)?)?;
    a.add(&b)?.add(&c)
}

/// Homogeneous components, in canonical degree order; `c` sits in degree 0.
pub fn grading_decompose(x: &AlgebraElement) -> Vec<(Scalar, AlgebraElement)> {
    let field = x.lattice.field();
    let mut out = Vec::new();
    let zero = field.zero();
    let mut degrees = x.sorted_degrees();
    if !x.ccoeff.is_zero() && !x.lterms.contains_key(&zero) {
        degrees.push(zero.clone());
        degrees.sort_by_key(|d| x.lattice.coords(d).expect("degree in M"));
    }
    for d in degrees {
        let mut part = AlgebraElement::zero(&x.lattice, x.centerless);
        if let Some(a) = x.lterms.get(&d) {
            part.lterms.insert(d.clone(), a.clone());
        }
        if d.is_zero() {
            part.ccoeff = x.ccoeff.clone();
        }
        out.push((d, part));
    }
    out
}

/// The automorphisms `φ_χ` and `φ'_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Automorphism {
    /// `L_x ↦ χ(x) L_x`, `c ↦ c`.
    Character(UnitHom),
    /// `L_x ↦ a⁻¹ L_{ax}`, `c ↦ a⁻¹ c` for a scaler `a`.
    ///
    /// With the `(μ³ - μ)/12` cocycle this preserves brackets on the
    /// centerless quotient for every scaler, but on the centered algebra
    /// only when `a² = 1`; see [`Automorphism::ScaleShifted`].
    Scale(Scalar),
    /// `L_x ↦ a⁻¹ L_{ax}` for `x ≠ 0`, `L_0 ↦ a⁻¹ L_0 + (a⁻¹ - a)/24 · c`,
    /// `c ↦ a c`. Agrees with `Scale` when `a = ±1` or on the quotient,
    /// and is a bracket homomorphism of the centered algebra for every scaler.
    ScaleShifted(Scalar),
}

pub fn apply_automorphism(
    phi: &Automorphism,
    x: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    let lat = &x.lattice;
    let mut out = AlgebraElement::zero(lat, x.centerless);
    match phi {
        Automorphism::Character(chi) => {
            if chi.lattice() != lat {
                return Err(AlgebraError::LatticeMismatch);
            }
            for (mu, a) in &x.lterms {
                add_into(&mut out.lterms, mu, a * &chi.eval(mu)?);
            }
            out.ccoeff = x.ccoeff.clone();
        }
        Automorphism::Scale(a) | Automorphism::ScaleShifted(a) => {
            if !lat.is_scaler(a)? {
                return Err(AlgebraError::NotAScaler(a.to_string()));
            }
            let inv = a.inv()?;
            for (mu, k) in &x.lterms {
                out.add_l(&(a * mu), k * &inv)?;
            }
            if matches!(phi, Automorphism::Scale(_)) {
                out.add_c(&x.ccoeff * &inv);
            } else {
                out.add_c(&x.ccoeff * a);
                let zero = lat.field().zero();
                if let Some(k0) = x.lterms.get(&zero) {
                    let shift = &(&inv - a) * &lat.field().from_ratio(1, 24);
                    out.add_c(k0 * &shift);
                }
            }
        }
    }
    Ok(out)
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degrees = self.sorted_degrees();
        let mut terms: Vec<(&Scalar, String)> = degrees
            .iter()
            .map(|d| (&self.lterms[d], format!("L[{d}]")))
            .collect();
        if !self.ccoeff.is_zero() {
            terms.push((&self.ccoeff, "c".to_string()));
        }
        write!(f, "{}", format_terms(terms))
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn z() -> (Field, Lattice) {
        let q = Field::rational();
        let z = Lattice::integers(&q);
        (q, z)
    }

    fn zs2() -> (Field, Lattice) {
        let f = Field::sqrt2();
        let m = Lattice::new(&f, vec![f.one(), f.gen()]).unwrap();
        (f, m)
    }

    fn el(m: &Lattice, centerless: bool, s: &str) -> AlgebraElement {
        AlgebraElement::parse(m, centerless, s).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let (_, m) = z();
        assert_eq!(bracket(&el(&m, false, "L[1]"), &el(&m, false, "L[2]")).unwrap(), el(&m, false, "L[3]"));
        // (-2-2) L_0 + (8-2)/12 c
        assert_eq!(
            bracket(&el(&m, false, "L[2]"), &el(&m, false, "L[-2]")).unwrap(),
            el(&m, false, "-4*L[0] + 1/2*c")
        );
        assert_eq!(
            bracket(&el(&m, true, "L[2]"), &el(&m, true, "L[-2]")).unwrap(),
            el(&m, true, "-4*L[0]")
        );
        let (_, m2) = zs2();
        assert_eq!(
            bracket(&el(&m2, false, "L[t]"), &el(&m2, false, "L[1]")).unwrap(),
            el(&m2, false, "(1 - t)*L[1 + t]")
        );
    }

    #[test]
    fn mismatches_rejected() {
        let (_, m) = z();
        let (_, m2) = zs2();
        assert_eq!(
            bracket(&el(&m, false, "L[1]"), &el(&m, true, "L[1]")).unwrap_err(),
            AlgebraError::ModeMismatch
        );
        assert_eq!(
            bracket(&el(&m, false, "L[1]"), &el(&m2, false, "L[1]")).unwrap_err(),
            AlgebraError::LatticeMismatch
        );
        assert!(matches!(
            AlgebraElement::parse(&m, false, "L[1/2]"),
            Err(AlgebraError::Lattice(LatticeError::NotMember(_)))
        ));
    }

    #[test]
    fn jacobi_examples() {
        let (_, m) = z();
        for (a, b, c) in [("L[1]", "L[-1]", "L[0]"), ("L[2]", "L[-2]", "L[0]"), ("L[3] + c", "L[3] + c", "L[-5]")] {
            let r = jacobi_residual(&el(&m, false, a), &el(&m, false, b), &el(&m, false, c)).unwrap();
            assert!(r.is_zero(), "{a} {b} {c}: {r}");
        }
    }

    #[test]
    fn grading_examples() {
        let (_, m) = z();
        let parts = grading_decompose(&el(&m, false, "3*L[1] + 2*L[0] + c"));
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, el(&m, false, "2*L[0] + c"));
        assert_eq!(parts[1].1, el(&m, false, "3*L[1]"));
        assert!(grading_decompose(&AlgebraElement::zero(&m, false)).is_empty());
        let (_, m2) = zs2();
        assert_eq!(grading_decompose(&el(&m2, false, "L[t] + L[1]")).len(), 2);
        let only_c = grading_decompose(&el(&m, false, "5*c"));
        assert_eq!(only_c.len(), 1);
        assert!(only_c[0].0.is_zero());
    }

    #[test]
    fn automorphism_examples() {
        let (q, m) = z();
        let chi = UnitHom::new(&m, vec![q.from_int(2)]).unwrap();
        assert_eq!(
            apply_automorphism(&Automorphism::Character(chi), &el(&m, false, "L[3] + c")).unwrap(),
            el(&m, false, "8*L[3] + c")
        );
        assert_eq!(
            apply_automorphism(&Automorphism::Scale(q.from_int(-1)), &el(&m, false, "L[1]")).unwrap(),
            el(&m, false, "-L[-1]")
        );
        assert!(matches!(
            apply_automorphism(&Automorphism::Scale(q.from_int(2)), &el(&m, false, "L[1]")),
            Err(AlgebraError::NotAScaler(_))
        ));
        let (f, m2) = zs2();
        let a = f.parse("1 + t").unwrap();
        assert_eq!(
            apply_automorphism(&Automorphism::Scale(a), &el(&m2, false, "L[1]")).unwrap(),
            el(&m2, false, "(-1 + t)*L[1 + t]")
        );
    }

    /// The literal `c ↦ a⁻¹c` rule breaks on `[L_1, L_{-1}] = -2 L_0` for
    /// `a = 1 + t`, while the shifted form holds.
    #[test]
    fn literal_scale_fails_on_centered_algebra() {
        let (f, m) = zs2();
        let a = f.parse("1 + t").unwrap();
        let x = el(&m, false, "L[1]");
        let y = el(&m, false, "L[-1]");
        for (phi, ok) in [
            (Automorphism::Scale(a.clone()), false),
            (Automorphism::ScaleShifted(a), true),
        ] {
            let lhs = apply_automorphism(&phi, &bracket(&x, &y).unwrap()).unwrap();
            let rhs = bracket(
                &apply_automorphism(&phi, &x).unwrap(),
                &apply_automorphism(&phi, &y).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs == rhs, ok, "{phi:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn display_is_canonical() {
        let (_, m) = z();
        let x = el(&m, false, "L[2] + c - 3/8*L[-1] + L[0]");
        assert_eq!(x.to_string(), "-3/8*L[-1] + L[0] + L[2] + c");
        assert_eq!(AlgebraElement::zero(&m, false).to_string(), "0");
        let (_, m2) = zs2();
        assert_eq!(el(&m2, false, "(1 - t)*L[1 + t] - L[t]").to_string(), "-L[t] + (1 - t)*L[1 + t]");
    }
}
