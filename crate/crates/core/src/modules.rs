//! Modules of the intermediate series over `Vir[M]`.
//!
//! All families have basis `{v_ν}` indexed by `ν ∈ M` (or a subset), with
//! `v_ν` of weight `offset + ν` and `c` acting as zero:
//!
//! | family        | `L_μ v_ν`                                               |
//! |---------------|---------------------------------------------------------|
//! | `A_{a,b}`     | `(a + ν + μb) v_{μ+ν}`                                  |
//! | `A_a`         | `(ν + μ) v_{μ+ν}` for `ν ≠ 0`, `L_μ v_0 = μ(μ+a) v_μ`    |
//! | `B_a`         | `ν v_{μ+ν}` for `ν ≠ -μ`, `L_μ v_{-μ} = -μ(μ+a) v_0`     |
//! | `A'_{a,b}`    | as `A_{a,b}` with `v_{-a}` removed (`a ∈ M`, `b ∈ {0,1}`) |
//! | trivial line  | `F v_0`, everything acts as zero                        |
//! | `A'_{0,0} ⊕ F v_0` | `ν v_{μ+ν}` for `ν ≠ 0 ≠ μ+ν`, otherwise zero      |
//!
//! `A_a` and `B_a` have weight offset 0. Vectors are stored by their
//! `M`-index `ν`, not by weight.

use std::collections::BTreeMap;
use std::fmt;

use crate::diagonal::{solve_diagonal, Constraint, DiagonalFailure};
use crate::lattice::{Lattice, LatticeError};
use crate::parse::{format_terms, parse_combination, Gen};
use crate::scalar::{Scalar, ScalarError};
use crate::vir::{add_into, bracket, AlgebraElement, AlgebraError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("module and algebra element live over different lattices")]
    LatticeMismatch,
    #[error("vector belongs to a different module")]
    FamilyMismatch,
    #[error("index {0} is not in the support of the module")]
    WeightNotInSupport(String),
    #[error("A'_{{a,b}} needs a in M and b in {{0, 1}} (got a={a}, b={b})")]
    NotReducible { a: String, b: String },
    #[error("restriction target is not a sublattice of M")]
    NotASublattice,
    #[error("restriction of the trivial line away from weight 0 is the zero module")]
    EmptyRestriction,
    #[error("generator {0} is not allowed in a module vector")]
    BadGenerator(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Aab,
    Aa,
    Ba,
    AabPrime,
    TrivialLine,
    PrimePlusLine,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Aab => "Aab",
            FamilyKind::Aa => "Aa",
            FamilyKind::Ba => "Ba",
            FamilyKind::AabPrime => "Aprime",
            FamilyKind::TrivialLine => "Line",
            FamilyKind::PrimePlusLine => "PrimeLine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleFamily {
    kind: FamilyKind,
    lattice: Lattice,
    a: Scalar,
    b: Scalar,
}

impl ModuleFamily {
    pub fn aab(lattice: &Lattice, a: Scalar, b: Scalar) -> Self {
        ModuleFamily {
            kind: FamilyKind::Aab,
            lattice: lattice.clone(),
            a,
            b,
        }
    }

    pub fn aa(lattice: &Lattice, a: Scalar) -> Self {
        ModuleFamily {
            kind: FamilyKind::Aa,
            lattice: lattice.clone(),
            a,
            b: lattice.field().zero(),
        }
    }

    pub fn ba(lattice: &Lattice, a: Scalar) -> Self {
        ModuleFamily {
            kind: FamilyKind::Ba,
            lattice: lattice.clone(),
            a,
            b: lattice.field().zero(),
        }
    }

    /// The nontrivial simple subquotient `A'_{a,b}`; requires the
    /// reducibility criterion `a ∈ M`, `b ∈ {0, 1}`.
    pub fn aab_prime(lattice: &Lattice, a: Scalar, b: Scalar) -> Result<Self, ModuleError> {
        if !lattice.contains(&a) || !(b.is_zero() || b.is_one()) {
            return Err(ModuleError::NotReducible {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        Ok(ModuleFamily {
            kind: FamilyKind::AabPrime,
            lattice: lattice.clone(),
            a,
            b,
        })
    }

    pub fn trivial_line(lattice: &Lattice) -> Self {
        let z = lattice.field().zero();
        ModuleFamily {
            kind: FamilyKind::TrivialLine,
            lattice: lattice.clone(),
            a: z.clone(),
            b: z,
        }
    }

    /// `A'_{0,0} ⊕ F v_0`.
    pub fn prime_plus_line(lattice: &Lattice) -> Self {
        let z = lattice.field().zero();
        ModuleFamily {
            kind: FamilyKind::PrimePlusLine,
            lattice: lattice.clone(),
            a: z.clone(),
            b: z,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    /// Weight of `v_0`; the weight of `v_ν` is `offset + ν`.
    pub fn offset(&self) -> Scalar {
        match self.kind {
            FamilyKind::Aab | FamilyKind::AabPrime => self.a.clone(),
            _ => self.lattice.field().zero(),
        }
    }

    pub fn weight(&self, index: &Scalar) -> Scalar {
        &self.offset() + index
    }

    pub fn in_support(&self, index: &Scalar) -> bool {
        match self.kind {
            FamilyKind::TrivialLine => index.is_zero(),
            FamilyKind::AabPrime => !(index + &self.a).is_zero(),
            _ => true,
        }
    }

    /// Coefficient of `v_{μ+ν}` in `L_μ v_ν`.
    pub fn coefficient(&self, mu: &Scalar, nu: &Scalar) -> Result<Scalar, ModuleError> {
        if !self.in_support(nu) {
            return Err(ModuleError::WeightNotInSupport(nu.to_string()));
        }
        let f = self.lattice.field();
        let target = mu + nu;
        Ok(match self.kind {
            FamilyKind::Aab => &(&self.a + nu) + &(mu * &self.b),
            FamilyKind::Aa => {
                if nu.is_zero() {
                    mu * &(mu + &self.a)
                } else {
                    nu + mu
                }
            }
            FamilyKind::Ba => {
                if target.is_zero() {
                    -&(mu * &(mu + &self.a))
                } else {
                    nu.clone()
                }
            }
            FamilyKind::AabPrime => {
                if self.in_support(&target) {
                    &(&self.a + nu) + &(mu * &self.b)
                } else {
                    f.zero()
                }
            }
            FamilyKind::TrivialLine => f.zero(),
            FamilyKind::PrimePlusLine => {
                if nu.is_zero() || target.is_zero() {
                    f.zero()
                } else {
                    nu.clone()
                }
            }
        })
    }

    pub fn basis_vector(&self, index: &Scalar) -> Result<ModuleVector, ModuleError> {
        let mut v = ModuleVector::zero(self);
        v.add_term(index, self.lattice.field().one())?;
        Ok(v)
    }

    pub fn parse_vector(&self, text: &str) -> Result<ModuleVector, ModuleError> {
        let mut v = ModuleVector::zero(self);
        for (a, g) in parse_combination(self.lattice.field(), text)? {
            match g {
                Gen::V(idx) => v.add_term(&idx, a)?,
                other => return Err(ModuleError::BadGenerator(other.symbol())),
            }
        }
        Ok(v)
    }
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Aab | FamilyKind::AabPrime => {
                write!(f, "{} a={} b={}", self.kind.name(), self.a, self.b)
            }
            FamilyKind::Aa | FamilyKind::Ba => write!(f, "{} a={}", self.kind.name(), self.a),
            _ => write!(f, "{}", self.kind.name()),
        }
    }
}

/// A finite combination `Σ k_ν v_ν` in a module.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleVector {
    family: ModuleFamily,
    terms: BTreeMap<Scalar, Scalar>,
}

impl ModuleVector {
    pub fn zero(family: &ModuleFamily) -> Self {
        ModuleVector {
            family: family.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn family(&self) -> &ModuleFamily {
        &self.family
    }

    pub fn terms(&self) -> &BTreeMap<Scalar, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, index: &Scalar, k: Scalar) -> Result<(), ModuleError> {
        self.family.lattice.require(index)?;
        if !self.family.in_support(index) {
            return Err(ModuleError::WeightNotInSupport(index.to_string()));
        }
        add_into(&mut self.terms, index, k);
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ModuleError> {
        if self.family != other.family {
            return Err(ModuleError::FamilyMismatch);
        }
        let mut out = self.clone();
        for (i, k) in &other.terms {
            add_into(&mut out.terms, i, k.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut out = ModuleVector::zero(&self.family);
        if !k.is_zero() {
            out.terms = self.terms.iter().map(|(i, a)| (i.clone(), a * k)).collect();
        }
        out
    }

    pub fn coeff(&self, index: &Scalar) -> Scalar {
        self.terms
            .get(index)
            .cloned()
            .unwrap_or_else(|| self.family.lattice.field().zero())
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lat = &self.family.lattice;
        let mut idx: Vec<_> = self
            .terms
            .keys()
            .map(|i| (lat.coords(i).expect("index in M"), i))
            .collect();
        idx.sort();
        write!(
            f,
            "{}",
            format_terms(idx.into_iter().map(|(_, i)| (&self.terms[i], format!("v[{i}]"))))
        )
    }
}

impl fmt::Debug for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleVector({self})")
    }
}

/// Action of an algebra element on a module vector; `c` acts as zero.
pub fn act(
    fam: &ModuleFamily,
    x: &AlgebraElement,
    v: &ModuleVector,
) -> Result<ModuleVector, ModuleError> {
    if x.lattice() != &fam.lattice {
        return Err(ModuleError::LatticeMismatch);
    }
    if &v.family != fam {
        return Err(ModuleError::FamilyMismatch);
    }
    let mut out = ModuleVector::zero(fam);
    for (mu, a) in x.lterms() {
        for (nu, k) in &v.terms {
            let coeff = fam.coefficient(mu, nu)?;
            if !coeff.is_zero() {
                add_into(&mut out.terms, &(mu + nu), &(a * k) * &coeff);
            }
        }
    }
    Ok(out)
}

/// `[x,y]·v - x·(y·v) + y·(x·v)`; zero for a module.
pub fn axiom_residual(
    fam: &ModuleFamily,
    x: &AlgebraElement,
    y: &AlgebraElement,
    v: &ModuleVector,
) -> Result<ModuleVector, ModuleError> {
    let lhs = act(fam, &bracket(x, y)?, v)?;
    let xy = act(fam, x, &act(fam, y, v)?)?;
    let yx = act(fam, y, &act(fam, x, v)?)?;
    let minus = fam.lattice.field().from_int(-1);
    lhs.add(&xy.scale(&minus))?.add(&yx)
}

/// A weight submodule described by its support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Submodule {
    /// `F v_i`.
    Line(Scalar),
    /// `span{v_ν : ν ≠ i}`.
    AllBut(Scalar),
}

impl Submodule {
    pub fn contains_index(&self, index: &Scalar) -> bool {
        match self {
            Submodule::Line(i) => i == index,
            Submodule::AllBut(i) => i != index,
        }
    }
}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Submodule::Line(i) => write!(f, "F*v[{i}]"),
            Submodule::AllBut(i) => write!(f, "span{{v[nu] : nu != {i}}}"),
        }
    }
}

/// Proper nonzero weight submodules; empty when the module is irreducible.
///
/// `A_{a,b}` is reducible exactly when `a ∈ M` and `b ∈ {0, 1}`, with the
/// special vector `v_{-a}` spanning a trivial submodule (`b = 0`) or being
/// the trivial quotient (`b = 1`).
pub fn substructure(fam: &ModuleFamily) -> Vec<Submodule> {
    let lat = &fam.lattice;
    let zero = lat.field().zero();
    match fam.kind {
        FamilyKind::Aab if lat.contains(&fam.a) => {
            let special = -&fam.a;
            if fam.b.is_zero() {
                vec![Submodule::Line(special)]
            } else if fam.b.is_one() {
                vec![Submodule::AllBut(special)]
            } else {
                vec![]
            }
        }
        FamilyKind::Aa => vec![Submodule::AllBut(zero)],
        FamilyKind::Ba => vec![Submodule::Line(zero)],
        FamilyKind::PrimePlusLine => vec![Submodule::Line(zero.clone()), Submodule::AllBut(zero)],
        _ => vec![],
    }
}

/// The nontrivial simple subquotient, as an `A'`-family (or the module
/// itself when irreducible).
pub fn simple_subquotient(fam: &ModuleFamily) -> ModuleFamily {
    let lat = &fam.lattice;
    let f = lat.field();
    match fam.kind {
        FamilyKind::Aab if !substructure(fam).is_empty() => {
            ModuleFamily::aab_prime(lat, fam.a.clone(), fam.b.clone()).expect("reducible")
        }
        FamilyKind::Aa => ModuleFamily::aab_prime(lat, f.zero(), f.one()).expect("A'_{0,1}"),
        FamilyKind::Ba | FamilyKind::PrimePlusLine => {
            ModuleFamily::aab_prime(lat, f.zero(), f.zero()).expect("A'_{0,0}")
        }
        _ => fam.clone(),
    }
}

/// Closed form recognised in a solved diagonal map, up to the factor `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedForm {
    /// `d_ν = k`.
    Constant(Scalar),
    /// `d_ν = k (offset + ν)`.
    Weight(Scalar),
    /// `d_ν = k / (offset + ν)`.
    InverseWeight(Scalar),
    Tabulated,
}

/// `v_ν ↦ d_ν v'_{ν + shift}` on the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalMap {
    pub shift: Scalar,
    pub entries: BTreeMap<Scalar, Scalar>,
    pub closed_form: ClosedForm,
}

/// Why two modules are not isomorphic on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonIsoCertificate {
    LatticeMismatch,
    /// Weight offsets differ by an element outside `M`.
    WeightMismatch { src_offset: Scalar, dst_offset: Scalar },
    /// `index` is a basis vector on exactly one side.
    SupportMismatch { index: Scalar },
    /// `L_μ v_ν` vanishes on one side only, forcing `d = 0`.
    Singular { mu: Scalar, nu: Scalar, src_coeff: Scalar, dst_coeff: Scalar },
    /// Two constraints demand different ratios.
    Inconsistent {
        violated: (Scalar, Scalar),
        via: Option<(Scalar, Scalar)>,
    },
}

impl fmt::Display for NonIsoCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonIsoCertificate::LatticeMismatch => write!(f, "different lattices"),
            NonIsoCertificate::WeightMismatch { src_offset, dst_offset } => {
                write!(f, "weight offsets {src_offset} and {dst_offset} differ outside M")
            }
            NonIsoCertificate::SupportMismatch { index } => {
                write!(f, "support differs at index {index}")
            }
            NonIsoCertificate::Singular { mu, nu, src_coeff, dst_coeff } => write!(
                f,
                "L[{mu}] v[{nu}]: coefficients {src_coeff} vs {dst_coeff} force a zero entry"
            ),
            NonIsoCertificate::Inconsistent { violated, via } => {
                write!(f, "constraint (mu={}, nu={}) contradicts", violated.0, violated.1)?;
                match via {
                    Some((m, n)) => write!(f, " constraint (mu={m}, nu={n})"),
                    None => write!(f, " the base normalization"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoResult {
    Map(DiagonalMap),
    NotIsomorphic(NonIsoCertificate),
}

fn detect_closed_form(src: &ModuleFamily, entries: &BTreeMap<Scalar, Scalar>) -> ClosedForm {
    let Some((_, first)) = entries.iter().next() else {
        return ClosedForm::Tabulated;
    };
    if entries.values().all(|d| d == first) {
        return ClosedForm::Constant(first.clone());
    }
    let weights: Option<Vec<(Scalar, &Scalar)>> = entries
        .iter()
        .map(|(i, d)| {
            let w = src.weight(i);
            (!w.is_zero()).then_some((w, d))
        })
        .collect();
    let Some(weights) = weights else {
        return ClosedForm::Tabulated;
    };
    let (w0, d0) = &weights[0];
    let k = *d0 * &w0.inv().expect("nonzero weight");
    if weights.iter().all(|(w, d)| &(&k * w) == *d) {
        return ClosedForm::Weight(k);
    }
    let k = *d0 * w0;
    if weights.iter().all(|(w, d)| &(*d * w) == &k) {
        return ClosedForm::InverseWeight(k);
    }
    ClosedForm::Tabulated
}

/// Searches for a weight-preserving diagonal isomorphism `src -> dst`,
/// checking equivariance for every `L_μ` with `μ` a difference of window
/// indices. A negative answer always carries an explicit certificate.
pub fn intertwiner(src: &ModuleFamily, dst: &ModuleFamily, window: &[Scalar]) -> IsoResult {
    if src.lattice != dst.lattice {
        return IsoResult::NotIsomorphic(NonIsoCertificate::LatticeMismatch);
    }
    let lat = &src.lattice;
    let shift = &src.offset() - &dst.offset();
    if !lat.contains(&shift) {
        return IsoResult::NotIsomorphic(NonIsoCertificate::WeightMismatch {
            src_offset: src.offset(),
            dst_offset: dst.offset(),
        });
    }
    let mut keys = Vec::new();
    for nu in window {
        let (s, d) = (src.in_support(nu), dst.in_support(&(nu + &shift)));
        if s != d {
            return IsoResult::NotIsomorphic(NonIsoCertificate::SupportMismatch { index: nu.clone() });
        }
        if s {
            keys.push(nu.clone());
        }
    }
    let mut constraints = Vec::new();
    for nu in &keys {
        for nu2 in &keys {
            let mu = nu2 - nu;
            let fs = src.coefficient(&mu, nu).expect("in support");
            let fd = dst.coefficient(&mu, &(nu + &shift)).expect("in support");
            constraints.push(Constraint::new(nu.clone(), nu2.clone(), fs, fd));
        }
    }
    let pair = |c: &Constraint<Scalar>| (&c.dst - &c.src, c.src.clone());
    match solve_diagonal(lat.field(), &keys, &constraints) {
        Ok(entries) => {
            let closed_form = detect_closed_form(src, &entries);
            IsoResult::Map(DiagonalMap {
                shift,
                entries,
                closed_form,
            })
        }
        Err(DiagonalFailure::Singular(c)) => IsoResult::NotIsomorphic(NonIsoCertificate::Singular {
            mu: &c.dst - &c.src,
            nu: c.src.clone(),
            src_coeff: c.lhs.clone(),
            dst_coeff: c.rhs.clone(),
        }),
        Err(DiagonalFailure::Inconsistent { violated, via }) => {
            IsoResult::NotIsomorphic(NonIsoCertificate::Inconsistent {
                violated: pair(&violated),
                via: via.as_ref().map(pair),
            })
        }
    }
}

/// Checks `d ∘ L_μ = L_μ ∘ d` for every window pair, independently of the solver.
pub fn verify_intertwiner(
    src: &ModuleFamily,
    dst: &ModuleFamily,
    map: &DiagonalMap,
) -> Result<bool, ModuleError> {
    for (nu, d) in &map.entries {
        if d.is_zero() {
            return Ok(false);
        }
        for (nu2, d2) in &map.entries {
            let mu = nu2 - nu;
            let x = AlgebraElement::l(&src.lattice, &mu, true)?;
            let image = act(src, &x, &src.basis_vector(nu)?)?;
            let lhs = image.coeff(nu2).clone() * d2;
            let dst_v = dst.basis_vector(&(nu + &map.shift))?;
            let rhs = act(dst, &x, &dst_v)?.coeff(&(nu2 + &map.shift)) * d.clone();
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `V(x_0, M_0) = ⊕_{z ∈ M_0} V_{offset + x_0 + z}` as a module over `sub`.
pub fn restrict(
    fam: &ModuleFamily,
    sub: &Lattice,
    x0: &Scalar,
) -> Result<ModuleFamily, ModuleError> {
    let lat = &fam.lattice;
    if lat.field() != sub.field() || !lat.contains_lattice(sub) {
        return Err(ModuleError::NotASublattice);
    }
    lat.require(x0)?;
    let base_in_sub = sub.contains(x0);
    Ok(match fam.kind {
        FamilyKind::Aab => ModuleFamily::aab(sub, &fam.a + x0, fam.b.clone()),
        FamilyKind::AabPrime => {
            let a = &fam.a + x0;
            if sub.contains(&a) {
                ModuleFamily::aab_prime(sub, a, fam.b.clone())?
            } else {
                ModuleFamily::aab(sub, a, fam.b.clone())
            }
        }
        FamilyKind::Aa if base_in_sub => ModuleFamily::aa(sub, fam.a.clone()),
        FamilyKind::Aa => ModuleFamily::aab(sub, x0.clone(), lat.field().one()),
        FamilyKind::Ba if base_in_sub => ModuleFamily::ba(sub, fam.a.clone()),
        FamilyKind::Ba | FamilyKind::PrimePlusLine if !base_in_sub => {
            ModuleFamily::aab(sub, x0.clone(), lat.field().zero())
        }
        FamilyKind::PrimePlusLine => ModuleFamily::prime_plus_line(sub),
        FamilyKind::TrivialLine if base_in_sub => ModuleFamily::trivial_line(sub),
        FamilyKind::TrivialLine => return Err(ModuleError::EmptyRestriction),
        FamilyKind::Ba => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn z() -> (Field, Lattice) {
        let q = Field::rational();
        (q.clone(), Lattice::integers(&q))
    }

    fn l(m: &Lattice, mu: i64) -> AlgebraElement {
        AlgebraElement::l(m, &m.field().from_int(mu), false).unwrap()
    }

    #[test]
    fn action_examples() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 2), q.from_int(2));
        let v = act(&fam, &l(&m, 1), &fam.basis_vector(&q.zero()).unwrap()).unwrap();
        assert_eq!(v, fam.parse_vector("5/2*v[1]").unwrap());

        let fam = ModuleFamily::aa(&m, q.from_int(2));
        let v = act(&fam, &l(&m, 3), &fam.basis_vector(&q.zero()).unwrap()).unwrap();
        assert_eq!(v, fam.parse_vector("15*v[3]").unwrap());

        let fam = ModuleFamily::ba(&m, q.from_int(1));
        let v = act(&fam, &l(&m, 2), &fam.basis_vector(&q.from_int(-2)).unwrap()).unwrap();
        assert_eq!(v, fam.parse_vector("-6*v[0]").unwrap());
    }

    #[test]
    fn central_element_acts_as_zero() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 3), q.from_int(5));
        let c = AlgebraElement::c(&m, false);
        let v = fam.parse_vector("v[0] + 2*v[3]").unwrap();
        assert!(act(&fam, &c, &v).unwrap().is_zero());
        assert!(axiom_residual(&fam, &c, &l(&m, 2), &v).unwrap().is_zero());
    }

    #[test]
    fn axiom_residual_examples() {
        let (q, m) = z();
        let fam = ModuleFamily::aa(&m, q.from_int(7));
        let v0 = fam.basis_vector(&q.zero()).unwrap();
        assert!(axiom_residual(&fam, &l(&m, 1), &l(&m, -1), &v0).unwrap().is_zero());
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 3), q.from_int(5));
        assert!(axiom_residual(&fam, &l(&m, 1), &l(&m, 2), &v0_of(&fam)).unwrap().is_zero());
    }

    fn v0_of(fam: &ModuleFamily) -> ModuleVector {
        fam.basis_vector(&fam.lattice().field().zero()).unwrap()
    }

    #[test]
    fn prime_excludes_special_index() {
        let (q, m) = z();
        let fam = ModuleFamily::aab_prime(&m, q.zero(), q.zero()).unwrap();
        assert!(matches!(
            fam.basis_vector(&q.zero()),
            Err(ModuleError::WeightNotInSupport(_))
        ));
        // L_1 v_{-1} lands on the removed vector.
        let v = act(&fam, &l(&m, 1), &fam.basis_vector(&q.from_int(-1)).unwrap()).unwrap();
        assert!(v.is_zero());
        assert!(matches!(
            ModuleFamily::aab_prime(&m, q.from_ratio(1, 2), q.zero()),
            Err(ModuleError::NotReducible { .. })
        ));
    }

    #[test]
    fn substructure_examples() {
        let (q, m) = z();
        assert_eq!(
            substructure(&ModuleFamily::aab(&m, q.zero(), q.zero())),
            vec![Submodule::Line(q.zero())]
        );
        assert!(substructure(&ModuleFamily::aab(&m, q.from_ratio(1, 2), q.zero())).is_empty());
        assert_eq!(
            substructure(&ModuleFamily::aa(&m, q.from_int(4))),
            vec![Submodule::AllBut(q.zero())]
        );
        assert_eq!(
            substructure(&ModuleFamily::aab(&m, q.from_int(2), q.one())),
            vec![Submodule::AllBut(q.from_int(-2))]
        );
    }

    #[test]
    fn intertwiner_reindexing_and_linear() {
        let (q, m) = z();
        let w = m.window(4);
        let a = q.from_ratio(1, 3);
        let src = ModuleFamily::aab(&m, a.clone(), q.from_int(5));
        let dst = ModuleFamily::aab(&m, &a - &q.from_int(2), q.from_int(5));
        match intertwiner(&src, &dst, &w) {
            IsoResult::Map(map) => {
                assert_eq!(map.shift, q.from_int(2));
                assert_eq!(map.closed_form, ClosedForm::Constant(q.one()));
                assert!(verify_intertwiner(&src, &dst, &map).unwrap());
            }
            r => panic!("{r:?}"),
        }
        let src = ModuleFamily::aab(&m, a.clone(), q.zero());
        let dst = ModuleFamily::aab(&m, a.clone(), q.one());
        match intertwiner(&src, &dst, &w) {
            IsoResult::Map(map) => {
                assert!(matches!(map.closed_form, ClosedForm::Weight(_)));
                assert!(verify_intertwiner(&src, &dst, &map).unwrap());
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn intertwiner_negative_cases() {
        let (q, m) = z();
        let w = m.window(2);
        let r = intertwiner(
            &ModuleFamily::aab(&m, q.zero(), q.from_int(2)),
            &ModuleFamily::aab(&m, q.zero(), q.from_int(3)),
            &w,
        );
        assert!(matches!(
            r,
            IsoResult::NotIsomorphic(
                NonIsoCertificate::Inconsistent { .. } | NonIsoCertificate::Singular { .. }
            )
        ));
        let r = intertwiner(
            &ModuleFamily::aab(&m, q.from_ratio(1, 2), q.zero()),
            &ModuleFamily::ba(&m, q.zero()),
            &w,
        );
        assert!(matches!(r, IsoResult::NotIsomorphic(NonIsoCertificate::WeightMismatch { .. })));
    }

    #[test]
    fn restriction_examples() {
        let (q, m) = z();
        let two = Lattice::new(&q, vec![q.from_int(2)]).unwrap();
        let a = q.from_ratio(1, 3);
        assert_eq!(
            restrict(&ModuleFamily::aab(&m, a.clone(), q.from_int(5)), &two, &q.one()).unwrap(),
            ModuleFamily::aab(&two, &a + &q.one(), q.from_int(5))
        );
        assert_eq!(
            restrict(&ModuleFamily::ba(&m, a.clone()), &two, &q.zero()).unwrap(),
            ModuleFamily::ba(&two, a.clone())
        );
        let three = Lattice::new(&q, vec![q.from_int(3)]).unwrap();
        assert_eq!(
            restrict(&ModuleFamily::prime_plus_line(&m), &three, &q.zero()).unwrap(),
            ModuleFamily::prime_plus_line(&three)
        );
        let half = Lattice::new(&q, vec![q.from_ratio(1, 2)]).unwrap();
        assert_eq!(
            restrict(&ModuleFamily::aa(&m, a), &half, &q.zero()).unwrap_err(),
            ModuleError::NotASublattice
        );
    }
}
