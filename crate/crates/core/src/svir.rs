//! Generalized super-Virasoro algebras `SVir[M, α]` spanned by `L_μ`
//! (`μ ∈ M`), `G_ν` (`ν ∈ α + M`) and `c`, with `2α ∈ M`.
//!
//! Both variants share `[L_μ, G_ν] = (ν + μb) G_{μ+ν}`:
//!
//! | variant | `b`    | `[G_ν, G_λ]`                                   |
//! |---------|--------|------------------------------------------------|
//! | `Ns`    | `-1/2` | `2 L_{ν+λ} - (1/3)(ν² - 1/4) δ_{ν+λ,0} c`       |
//! | `Tilde` | `1/2`  | `δ_{ν+λ,0} c`                                  |

use std::collections::BTreeMap;
use std::fmt;

use crate::lattice::{Coset, Lattice, LatticeError};
use crate::parse::{format_terms, parse_combination, Gen};
use crate::scalar::{Scalar, ScalarError};
use crate::vir::{add_into, virasoro_cocycle, AlgebraElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SvirError {
    #[error("super elements belong to different variants")]
    VariantMismatch,
    #[error("super elements use different lattices or cosets")]
    CosetMismatch,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("super modules are defined over the NS variant")]
    ParityMismatch,
    #[error("index {0} is not on the expected coset")]
    WeightError(String),
    #[error("window needs index {0}, which lies outside the data")]
    WindowNotClosed(String),
    #[error("generator {0} is not allowed here")]
    BadGenerator(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Ns,
    Tilde,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Ns => "ns",
            Variant::Tilde => "tilde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// `SVir[M, α]` or `S̃Vir[M, α]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperAlgebra {
    coset: Coset,
    variant: Variant,
}

impl SuperAlgebra {
    pub fn new(lattice: &Lattice, alpha: &Scalar, variant: Variant) -> Result<Self, SvirError> {
        Ok(SuperAlgebra {
            coset: Coset::new(lattice, alpha)?,
            variant,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        self.coset.lattice()
    }

    pub fn coset(&self) -> &Coset {
        &self.coset
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The `b` in `[L_μ, G_ν] = (ν + μb) G_{μ+ν}`.
    pub fn b(&self) -> Scalar {
        let f = self.lattice().field();
        match self.variant {
            Variant::Ns => f.from_ratio(-1, 2),
            Variant::Tilde => f.from_ratio(1, 2),
        }
    }

    /// Structure constants `(x_{ν,λ}, y_ν)` of `[G_ν, G_λ] = x L_{ν+λ} + δ y c`.
    pub fn odd_constants(&self, nu: &Scalar) -> (Scalar, Scalar) {
        let f = self.lattice().field();
        match self.variant {
            Variant::Ns => (f.from_int(2), ns_central(nu)),
            Variant::Tilde => (f.zero(), f.one()),
        }
    }
}

impl fmt::Display for SuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {} coset {}", self.variant.name(), self.lattice(), self.coset.offset())
    }
}

/// `-(1/3)(ν² - 1/4)`.
pub fn ns_central(nu: &Scalar) -> Scalar {
    let f = nu.field();
    &(&(nu * nu) - &f.from_ratio(1, 4)) * &f.from_ratio(-1, 3)
}

/// `Σ a_μ L_μ + Σ g_ν G_ν + k c`.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperElement {
    alg: SuperAlgebra,
    lterms: BTreeMap<Scalar, Scalar>,
    gterms: BTreeMap<Scalar, Scalar>,
    ccoeff: Scalar,
}

impl SuperElement {
    pub fn zero(alg: &SuperAlgebra) -> Self {
        SuperElement {
            alg: alg.clone(),
            lterms: BTreeMap::new(),
            gterms: BTreeMap::new(),
            ccoeff: alg.lattice().field().zero(),
        }
    }

    pub fn l(alg: &SuperAlgebra, mu: &Scalar) -> Result<Self, SvirError> {
        let mut x = Self::zero(alg);
        x.add_l(mu, alg.lattice().field().one())?;
        Ok(x)
    }

    pub fn g(alg: &SuperAlgebra, nu: &Scalar) -> Result<Self, SvirError> {
        let mut x = Self::zero(alg);
        x.add_g(nu, alg.lattice().field().one())?;
        Ok(x)
    }

    pub fn c(alg: &SuperAlgebra) -> Self {
        let mut x = Self::zero(alg);
        x.ccoeff = alg.lattice().field().one();
        x
    }

    pub fn parse(alg: &SuperAlgebra, text: &str) -> Result<Self, SvirError> {
        let mut x = Self::zero(alg);
        for (a, g) in parse_combination(alg.lattice().field(), text)? {
            match g {
                Gen::L(mu) => x.add_l(&mu, a)?,
                Gen::G(nu) => x.add_g(&nu, a)?,
                Gen::C => x.ccoeff = &x.ccoeff + &a,
                other => return Err(SvirError::BadGenerator(other.symbol())),
            }
        }
        Ok(x)
    }

    /// Embeds an element of the centered `Vir[M]`.
    pub fn from_even(alg: &SuperAlgebra, x: &AlgebraElement) -> Result<Self, SvirError> {
        if x.lattice() != alg.lattice() {
            return Err(SvirError::CosetMismatch);
        }
        let mut out = Self::zero(alg);
        out.lterms = x.lterms().clone();
        out.ccoeff = x.ccoeff().clone();
        Ok(out)
    }

    /// The even part as an element of the centered `Vir[M]`.
    pub fn even_part(&self) -> AlgebraElement {
        let lat = self.alg.lattice();
        let mut x = AlgebraElement::zero(lat, false);
        for (mu, a) in &self.lterms {
            x.add_l(mu, a.clone()).expect("degree in M");
        }
        x.add_c(self.ccoeff.clone());
        x
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.alg
    }

    pub fn lterms(&self) -> &BTreeMap<Scalar, Scalar> {
        &self.lterms
    }

    pub fn gterms(&self) -> &BTreeMap<Scalar, Scalar> {
        &self.gterms
    }

    pub fn ccoeff(&self) -> &Scalar {
        &self.ccoeff
    }

    pub fn is_zero(&self) -> bool {
        self.lterms.is_empty() && self.gterms.is_empty() && self.ccoeff.is_zero()
    }

    /// `None` for mixed elements; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let even = !self.lterms.is_empty() || !self.ccoeff.is_zero();
        match (even, self.gterms.is_empty()) {
            (true, false) => None,
            (false, false) => Some(Parity::Odd),
            _ => Some(Parity::Even),
        }
    }

    pub fn add_l(&mut self, mu: &Scalar, a: Scalar) -> Result<(), SvirError> {
        self.alg.lattice().require(mu)?;
        add_into(&mut self.lterms, mu, a);
        Ok(())
    }

    pub fn add_g(&mut self, nu: &Scalar, a: Scalar) -> Result<(), SvirError> {
        if !self.alg.coset.contains(nu) {
            return Err(SvirError::WeightError(nu.to_string()));
        }
        add_into(&mut self.gterms, nu, a);
        Ok(())
    }

    fn check(&self, other: &Self) -> Result<(), SvirError> {
        if self.alg.variant != other.alg.variant {
            return Err(SvirError::VariantMismatch);
        }
        if self.alg.coset != other.alg.coset {
            return Err(SvirError::CosetMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SvirError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, a) in &other.lterms {
            add_into(&mut out.lterms, k, a.clone());
        }
        for (k, a) in &other.gterms {
            add_into(&mut out.gterms, k, a.clone());
        }
        out.ccoeff = &out.ccoeff + &other.ccoeff;
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return Self::zero(&self.alg);
        }
        SuperElement {
            alg: self.alg.clone(),
            lterms: self.lterms.iter().map(|(d, a)| (d.clone(), a * k)).collect(),
            gterms: self.gterms.iter().map(|(d, a)| (d.clone(), a * k)).collect(),
            ccoeff: &self.ccoeff * k,
        }
    }
}

impl fmt::Display for SuperElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lat = self.alg.lattice();
        let coset = &self.alg.coset;
        let mut ls: Vec<_> = self.lterms.keys().map(|d| (lat.coords(d).expect("in M"), d)).collect();
        ls.sort();
        let mut gs: Vec<_> = self.gterms.keys().map(|d| (coset.coords(d).expect("in coset"), d)).collect();
        gs.sort();
        let mut terms: Vec<(&Scalar, String)> = ls
            .into_iter()
            .map(|(_, d)| (&self.lterms[d], format!("L[{d}]")))
            .collect();
        terms.extend(gs.into_iter().map(|(_, d)| (&self.gterms[d], format!("G[{d}]"))));
        if !self.ccoeff.is_zero() {
            terms.push((&self.ccoeff, "c".to_string()));
        }
        write!(f, "{}", format_terms(terms))
    }
}

impl fmt::Debug for SuperElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperElement({self})")
    }
}

/// Super bracket, bilinear extension of the defining relations.
pub fn sbracket(x: &SuperElement, y: &SuperElement) -> Result<SuperElement, SvirError> {
    x.check(y)?;
    let alg = &x.alg;
    let b = alg.b();
    let mut out = SuperElement::zero(alg);
    for (mu, a) in &x.lterms {
        for (nu, k) in &y.lterms {
            let ak = a * k;
            let deg = mu + nu;
            add_into(&mut out.lterms, &deg, &ak * &(nu - mu));
            if deg.is_zero() {
                out.ccoeff = &out.ccoeff + &(&ak * &virasoro_cocycle(mu));
            }
        }
        for (nu, k) in &y.gterms {
            add_into(&mut out.gterms, &(mu + nu), &(a * k) * &(nu + &(mu * &b)));
        }
    }
    for (nu, a) in &x.gterms {
        for (mu, k) in &y.lterms {
            add_into(&mut out.gterms, &(mu + nu), -&(&(a * k) * &(nu + &(mu * &b))));
        }
        for (lam, k) in &y.gterms {
            let ak = a * k;
            let (xc, yc) = alg.odd_constants(nu);
            let deg = nu + lam;
            add_into(&mut out.lterms, &deg, &ak * &xc);
            if deg.is_zero() {
                out.ccoeff = &out.ccoeff + &(&ak * &yc);
            }
        }
    }
    Ok(out)
}

fn koszul(p: Parity, q: Parity, field: &crate::Field) -> Scalar {
    if p.bit() & q.bit() == 1 {
        field.from_int(-1)
    } else {
        field.one()
    }
}

/// `(-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]]`.
pub fn super_jacobi_residual(
    x: &SuperElement,
    y: &SuperElement,
    z: &SuperElement,
) -> Result<SuperElement, SvirError> {
    let (px, py, pz) = (
        x.parity().ok_or(SvirError::NotHomogeneous)?,
        y.parity().ok_or(SvirError::NotHomogeneous)?,
        z.parity().ok_or(SvirError::NotHomogeneous)?,
    );
    let f = x.alg.lattice().field();
    let a = sbracket(x, &sbracket(y, z)?)?.scale(&koszul(px, pz, f));
    let b = sbracket(y, &sbracket(z, x)?)?.scale(&koszul(py, px, f));
    let c = sbracket(z, &sbracket(x, y)?)?.scale(&koszul(pz, py, f));
    a.add(&b)?.add(&c)
}

/// Candidate structure constants for an odd extension:
/// `[L_μ, G_ν] = (ν + μb) G_{μ+ν}`, `[G_μ, G_ν] = x_{μ,ν} L_{μ+ν} + δ_{μ+ν,0} y_μ c`,
/// tabulated on a finite set of coset points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionData {
    pub coset: Coset,
    pub b: Scalar,
    pub xtable: BTreeMap<(Scalar, Scalar), Scalar>,
    pub ytable: BTreeMap<Scalar, Scalar>,
}

impl ExtensionData {
    /// The normalized data of `alg` on the coset window of the given radius.
    pub fn canonical(alg: &SuperAlgebra, radius: i64) -> Self {
        let pts = alg.coset.window(radius);
        let mut xtable = BTreeMap::new();
        let mut ytable = BTreeMap::new();
        for mu in &pts {
            let (x, y) = alg.odd_constants(mu);
            ytable.insert(mu.clone(), y);
            for nu in &pts {
                xtable.insert((mu.clone(), nu.clone()), x.clone());
            }
        }
        ExtensionData {
            coset: alg.coset.clone(),
            b: alg.b(),
            xtable,
            ytable,
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = &Scalar> {
        self.ytable.keys()
    }

    fn x(&self, mu: &Scalar, nu: &Scalar) -> Result<&Scalar, SvirError> {
        self.xtable
            .get(&(mu.clone(), nu.clone()))
            .ok_or_else(|| SvirError::WindowNotClosed(format!("x[{mu}, {nu}]")))
    }

    fn y(&self, mu: &Scalar) -> Result<&Scalar, SvirError> {
        self.ytable
            .get(mu)
            .ok_or_else(|| SvirError::WindowNotClosed(format!("y[{mu}]")))
    }
}

/// The identities checked by [`extension_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    /// `ad L_λ` applied to the `L` part of `[G_μ, G_ν]`.
    LAction,
    /// `ad L_λ` applied to the central part, `λ + μ + ν = 0`.
    LCentral,
    /// `ad G_λ` applied to `[G_μ, G_ν]`.
    GAction,
    /// `3μ(1 + 2b) x_{μ,μ} = 0`.
    GDiagonal,
    /// `μ(1 - 2b)(y_{-μ} + y_μ) = 0`, when `x_{μ,μ} = 0`.
    CentralParity,
    /// `μ y_μ = -(1/12) μ(4μ² - 1)`, when `b = -1/2` and `x_{μ,μ} = 2`.
    CentralNormalized,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::LAction => "l-action",
            Identity::LCentral => "l-central",
            Identity::GAction => "g-action",
            Identity::GDiagonal => "g-diagonal",
            Identity::CentralParity => "central-parity",
            Identity::CentralNormalized => "central-normalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub identity: Identity,
    /// `(λ, μ, ν)` for the three-index identities, `(μ)` otherwise.
    pub indices: Vec<Scalar>,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "{} at ({}): lhs {} != rhs {}",
            self.identity.name(),
            idx.join(", "),
            self.lhs,
            self.rhs
        )
    }
}

/// Evaluates every instance of the extension identities with `μ, ν` (and
/// `λ` for the odd ones) in `window` and even `λ` in `lambdas`. Every index
/// reached must be tabulated in `data`.
pub fn extension_check(
    data: &ExtensionData,
    window: &[Scalar],
    lambdas: &[Scalar],
) -> Result<Vec<Violation>, SvirError> {
    let lat = data.coset.lattice();
    let f = lat.field();
    for p in window {
        if !data.coset.contains(p) {
            return Err(SvirError::WeightError(p.to_string()));
        }
    }
    for l in lambdas {
        lat.require(l)?;
    }
    let b = &data.b;
    let mut out = Vec::new();
    let mut record = |identity, indices: Vec<Scalar>, lhs: Scalar, rhs: Scalar| {
        if lhs != rhs {
            out.push(Violation { identity, indices, lhs, rhs });
        }
    };
    let twelfth = f.from_ratio(1, 12);
    for mu in window {
        for nu in window {
            for lam in lambdas {
                let lhs = &(&(mu + &(lam * b)) * data.x(&(mu + lam), nu)?)
                    + &(&(nu + &(lam * b)) * data.x(mu, &(nu + lam))?);
                let rhs = &(&(mu + nu) - lam) * data.x(mu, nu)?;
                record(Identity::LAction, vec![lam.clone(), mu.clone(), nu.clone()], lhs, rhs);
            }
            let lam = -&(mu + nu);
            let lhs = &(&(mu + &(&lam * b)) * data.y(&(mu + &lam))?)
                + &(&(nu + &(&lam * b)) * data.y(mu)?);
            let rhs = &(&(&(&(&lam * &lam) * &lam) - &lam) * &twelfth) * data.x(mu, nu)?;
            record(Identity::LCentral, vec![lam, mu.clone(), nu.clone()], lhs, rhs);
            for lam in window {
                let lhs = -&(&(lam + &(&(mu + nu) * b)) * data.x(mu, nu)?);
                let rhs = &(&(nu + &(&(lam + mu) * b)) * data.x(lam, mu)?)
                    + &(&(mu + &(&(lam + nu) * b)) * data.x(lam, nu)?);
                record(Identity::GAction, vec![lam.clone(), mu.clone(), nu.clone()], lhs, rhs);
            }
        }
    }
    let one = f.one();
    let two = f.from_int(2);
    let half = f.from_ratio(-1, 2);
    for mu in window {
        let xmm = data.x(mu, mu)?;
        let lhs = &(&f.from_int(3) * mu) * &(&(&one + &(&two * b)) * xmm);
        record(Identity::GDiagonal, vec![mu.clone()], lhs, f.zero());
        if xmm.is_zero() {
            let lhs = &(mu * &(&one - &(&two * b))) * &(data.y(&-mu)? + data.y(mu)?);
            record(Identity::CentralParity, vec![mu.clone()], lhs, f.zero());
        }
        if b == &half && xmm == &two {
            let lhs = mu * data.y(mu)?;
            let rhs = &(&(mu * &(&(&f.from_int(4) * &(mu * mu)) - &one)) * &twelfth) * &f.from_int(-1);
            record(Identity::CentralNormalized, vec![mu.clone()], lhs, rhs);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuperKind {
    SAab,
    SAa,
    SBa,
}

impl SuperKind {
    pub fn name(self) -> &'static str {
        match self {
            SuperKind::SAab => "SAab",
            SuperKind::SAa => "SAa",
            SuperKind::SBa => "SBa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    V,
    W,
}

/// The intermediate-series modules `SA_{a,b}(M, α)`, `SA_a(M, α)` and
/// `SB_a(M, α)` over the NS variant; `c` acts as zero.
///
/// `SA` families have `v_μ` for `μ ∈ M` and `w_ν` for `ν ∈ α + M`; `SB_a`
/// swaps the two index sets. In `SA_{a,b}` the weight of `v_μ` is `a + μ`.
///
/// For `SB_a` the action reads `L_λ v_ν = (ν + λ/2) v_{λ+ν}`,
/// `L_λ w_{-λ} = -λ(λ+a) w_0` and `G_η v_ν = w_{η+ν}` for `ν ≠ -η`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperFamily {
    kind: SuperKind,
    alg: SuperAlgebra,
    a: Scalar,
    b: Scalar,
}

impl SuperFamily {
    pub fn new(kind: SuperKind, alg: &SuperAlgebra, a: Scalar, b: Scalar) -> Result<Self, SvirError> {
        if alg.variant != Variant::Ns {
            return Err(SvirError::ParityMismatch);
        }
        let b = match kind {
            SuperKind::SAab => b,
            _ => alg.lattice().field().zero(),
        };
        Ok(SuperFamily {
            kind,
            alg: alg.clone(),
            a,
            b,
        })
    }

    pub fn kind(&self) -> SuperKind {
        self.kind
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.alg
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn in_sector(&self, sector: Sector, index: &Scalar) -> bool {
        let on_lattice = matches!(
            (self.kind, sector),
            (SuperKind::SBa, Sector::W) | (SuperKind::SAab | SuperKind::SAa, Sector::V)
        );
        if on_lattice {
            self.alg.lattice().contains(index)
        } else {
            self.alg.coset.contains(index)
        }
    }

    /// Coefficient of the image of the basis vector `(sector, index)` under
    /// `L_λ` (`odd = false`) or `G_λ` (`odd = true`). The image has index
    /// `λ + index`, in the same sector for `L` and the other one for `G`.
    pub fn coefficient(
        &self,
        odd: bool,
        lam: &Scalar,
        sector: Sector,
        index: &Scalar,
    ) -> Result<Scalar, SvirError> {
        if !self.in_sector(sector, index) {
            return Err(SvirError::WeightError(index.to_string()));
        }
        let f = self.alg.lattice().field();
        let half = f.from_ratio(1, 2);
        let two = f.from_int(2);
        let a = &self.a;
        let target = lam + index;
        Ok(match (self.kind, odd, sector) {
            (SuperKind::SAab, false, Sector::V) => &(a + index) + &(lam * &self.b),
            (SuperKind::SAab, false, Sector::W) => &(a + index) + &(lam * &(&self.b - &half)),
            (SuperKind::SAab, true, Sector::V) => f.one(),
            (SuperKind::SAab, true, Sector::W) => {
                &(a + index) + &(&(&two * lam) * &(&self.b - &half))
            }
            (SuperKind::SAa, false, Sector::V) if index.is_zero() => lam * &(lam + a),
            (SuperKind::SAa, false, Sector::V) => target,
            (SuperKind::SAa, false, Sector::W) => index + &(lam * &half),
            (SuperKind::SAa, true, Sector::V) if index.is_zero() => &(&two * lam) + a,
            (SuperKind::SAa, true, Sector::V) => f.one(),
            (SuperKind::SAa, true, Sector::W) => target,
            (SuperKind::SBa, false, Sector::V) => index + &(lam * &half),
            (SuperKind::SBa, false, Sector::W) if target.is_zero() => -&(lam * &(lam + a)),
            (SuperKind::SBa, false, Sector::W) => index.clone(),
            (SuperKind::SBa, true, Sector::V) if target.is_zero() => &(&two * lam) + a,
            (SuperKind::SBa, true, Sector::V) => f.one(),
            (SuperKind::SBa, true, Sector::W) => index.clone(),
        })
    }

    /// Sector of the image of `(sector, index)` under an element of the
    /// given parity.
    pub fn image_sector(odd: bool, sector: Sector) -> Sector {
        match (odd, sector) {
            (false, s) => s,
            (true, Sector::V) => Sector::W,
            (true, Sector::W) => Sector::V,
        }
    }

    pub fn basis_vector(&self, sector: Sector, index: &Scalar) -> Result<SuperModuleVector, SvirError> {
        let mut v = SuperModuleVector::zero(self);
        v.add_term(sector, index, self.alg.lattice().field().one())?;
        Ok(v)
    }

    pub fn parse_vector(&self, text: &str) -> Result<SuperModuleVector, SvirError> {
        let mut v = SuperModuleVector::zero(self);
        for (k, g) in parse_combination(self.alg.lattice().field(), text)? {
            match g {
                Gen::V(i) => v.add_term(Sector::V, &i, k)?,
                Gen::W(i) => v.add_term(Sector::W, &i, k)?,
                other => return Err(SvirError::BadGenerator(other.symbol())),
            }
        }
        Ok(v)
    }
}

impl fmt::Display for SuperFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SuperKind::SAab => write!(f, "SAab a={} b={}", self.a, self.b),
            k => write!(f, "{} a={}", k.name(), self.a),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SuperModuleVector {
    family: SuperFamily,
    terms: BTreeMap<(Sector, Scalar), Scalar>,
}

impl SuperModuleVector {
    pub fn zero(family: &SuperFamily) -> Self {
        SuperModuleVector {
            family: family.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Sector, Scalar), Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sector: Sector, index: &Scalar) -> Scalar {
        self.terms
            .get(&(sector, index.clone()))
            .cloned()
            .unwrap_or_else(|| self.family.alg.lattice().field().zero())
    }

    pub fn add_term(&mut self, sector: Sector, index: &Scalar, k: Scalar) -> Result<(), SvirError> {
        if !self.family.in_sector(sector, index) {
            return Err(SvirError::WeightError(index.to_string()));
        }
        self.add_unchecked(sector, index.clone(), k);
        Ok(())
    }

    fn add_unchecked(&mut self, sector: Sector, index: Scalar, k: Scalar) {
        if k.is_zero() {
            return;
        }
        let key = (sector, index);
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e = &*e + &k;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, k);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SvirError> {
        if self.family != other.family {
            return Err(SvirError::CosetMismatch);
        }
        let mut out = self.clone();
        for ((s, i), k) in &other.terms {
            out.add_unchecked(*s, i.clone(), k.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut out = SuperModuleVector::zero(&self.family);
        for ((s, i), a) in &self.terms {
            out.add_unchecked(*s, i.clone(), a * k);
        }
        out
    }
}

impl fmt::Display for SuperModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = &self.family.alg;
        let mut keys: Vec<_> = self
            .terms
            .keys()
            .map(|(s, i)| {
                let c = alg.lattice().coords(i).or_else(|| alg.coset.coords(i)).expect("index");
                ((*s, c), (s, i))
            })
            .collect();
        keys.sort();
        let terms = keys.into_iter().map(|(_, (s, i))| {
            let name = match s {
                Sector::V => "v",
                Sector::W => "w",
            };
            (&self.terms[&(*s, i.clone())], format!("{name}[{i}]"))
        });
        write!(f, "{}", format_terms(terms))
    }
}

impl fmt::Debug for SuperModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperModuleVector({self})")
    }
}

/// Action of a super element on a module vector.
pub fn sact(
    fam: &SuperFamily,
    x: &SuperElement,
    v: &SuperModuleVector,
) -> Result<SuperModuleVector, SvirError> {
    if x.alg != fam.alg {
        return Err(SvirError::CosetMismatch);
    }
    if &v.family != fam {
        return Err(SvirError::CosetMismatch);
    }
    let mut out = SuperModuleVector::zero(fam);
    for (odd, terms) in [(false, &x.lterms), (true, &x.gterms)] {
        for (lam, a) in terms {
            for ((s, i), k) in &v.terms {
                let coeff = fam.coefficient(odd, lam, *s, i)?;
                let sector = SuperFamily::image_sector(odd, *s);
                out.add_unchecked(sector, lam + i, &(a * k) * &coeff);
            }
        }
    }
    Ok(out)
}

/// `[x,y]v - x(yv) + (-1)^{|x||y|} y(xv)`; zero for a module.
pub fn saxiom_residual(
    fam: &SuperFamily,
    x: &SuperElement,
    y: &SuperElement,
    v: &SuperModuleVector,
) -> Result<SuperModuleVector, SvirError> {
    let px = x.parity().ok_or(SvirError::NotHomogeneous)?;
    let py = y.parity().ok_or(SvirError::NotHomogeneous)?;
    let f = fam.alg.lattice().field();
    let lhs = sact(fam, &sbracket(x, y)?, v)?;
    let xy = sact(fam, x, &sact(fam, y, v)?)?;
    let yx = sact(fam, y, &sact(fam, x, v)?)?;
    lhs.add(&xy.scale(&f.from_int(-1)))?.add(&yx.scale(&koszul(px, py, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn ns() -> SuperAlgebra {
        let q = Field::rational();
        SuperAlgebra::new(&Lattice::integers(&q), &q.from_ratio(1, 2), Variant::Ns).unwrap()
    }

    fn tilde() -> SuperAlgebra {
        let q = Field::rational();
        SuperAlgebra::new(&Lattice::integers(&q), &q.from_ratio(1, 2), Variant::Tilde).unwrap()
    }

    fn el(alg: &SuperAlgebra, s: &str) -> SuperElement {
        SuperElement::parse(alg, s).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let s = ns();
        assert_eq!(sbracket(&el(&s, "G[1/2]"), &el(&s, "G[-1/2]")).unwrap(), el(&s, "2*L[0]"));
        assert_eq!(
            sbracket(&el(&s, "G[3/2]"), &el(&s, "G[-3/2]")).unwrap(),
            el(&s, "2*L[0] - 2/3*c")
        );
        let t = tilde();
        assert_eq!(sbracket(&el(&t, "G[1/2]"), &el(&t, "G[-1/2]")).unwrap(), el(&t, "c"));
        // [L_1, G_{1/2}] = (1/2 - 1/2) G_{3/2} in NS, (1/2 + 1/2) G_{3/2} in Tilde.
        assert!(sbracket(&el(&s, "L[1]"), &el(&s, "G[1/2]")).unwrap().is_zero());
        assert_eq!(sbracket(&el(&t, "L[1]"), &el(&t, "G[1/2]")).unwrap(), el(&t, "G[3/2]"));
    }

    #[test]
    fn rejects_mismatch_and_bad_index() {
        let q = Field::rational();
        let z = Lattice::integers(&q);
        assert!(matches!(
            SuperAlgebra::new(&z, &q.from_ratio(1, 3), Variant::Ns),
            Err(SvirError::Lattice(LatticeError::NotDoubling(_)))
        ));
        assert_eq!(
            sbracket(&el(&ns(), "L[1]"), &el(&tilde(), "L[1]")).unwrap_err(),
            SvirError::VariantMismatch
        );
        assert!(matches!(SuperElement::parse(&ns(), "G[1]"), Err(SvirError::WeightError(_))));
    }

    #[test]
    fn jacobi_examples() {
        let s = ns();
        for (a, b, c) in [("G[1/2]", "G[1/2]", "G[-1/2]"), ("L[1]", "G[1/2]", "G[-3/2]")] {
            let r = super_jacobi_residual(&el(&s, a), &el(&s, b), &el(&s, c)).unwrap();
            assert!(r.is_zero(), "{a} {b} {c}: {r}");
        }
        let t = tilde();
        let r = super_jacobi_residual(&el(&t, "L[1]"), &el(&t, "L[2]"), &el(&t, "G[1/2]")).unwrap();
        assert!(r.is_zero());
        assert_eq!(
            super_jacobi_residual(&el(&s, "L[1] + G[1/2]"), &el(&s, "L[0]"), &el(&s, "L[0]"))
                .unwrap_err(),
            SvirError::NotHomogeneous
        );
    }

    #[test]
    fn even_part_round_trip() {
        let s = ns();
        let x = el(&s, "L[2] + 3*c");
        assert_eq!(SuperElement::from_even(&s, &x.even_part()).unwrap(), x);
    }

    #[test]
    fn canonical_data_pass() {
        for alg in [ns(), tilde()] {
            let data = ExtensionData::canonical(&alg, 8);
            let window = alg.coset().window(4);
            let lambdas = alg.lattice().window(4);
            assert_eq!(extension_check(&data, &window, &lambdas).unwrap(), vec![]);
        }
    }

    #[test]
    fn perturbed_central_term_is_caught() {
        let alg = ns();
        let q = alg.lattice().field().clone();
        let mut data = ExtensionData::canonical(&alg, 8);
        data.ytable.insert(q.from_ratio(1, 2), q.one());
        let v = extension_check(&data, &alg.coset().window(4), &alg.lattice().window(4)).unwrap();
        assert!(v.iter().any(|v| v.identity == Identity::LCentral));
    }

    #[test]
    fn small_data_is_not_closed() {
        let alg = ns();
        let data = ExtensionData::canonical(&alg, 2);
        assert!(matches!(
            extension_check(&data, &alg.coset().window(2), &alg.lattice().window(2)),
            Err(SvirError::WindowNotClosed(_))
        ));
    }

    #[test]
    fn sact_examples() {
        let s = ns();
        let q = s.lattice().field().clone();
        let fam = SuperFamily::new(SuperKind::SAab, &s, q.zero(), q.from_ratio(1, 2)).unwrap();
        let w = fam.parse_vector("w[5/2]").unwrap();
        assert_eq!(sact(&fam, &el(&s, "G[1/2]"), &w).unwrap(), fam.parse_vector("5/2*v[3]").unwrap());
        let v = fam.parse_vector("v[2]").unwrap();
        assert_eq!(sact(&fam, &el(&s, "G[-3/2]"), &v).unwrap(), fam.parse_vector("w[1/2]").unwrap());
        let fam = SuperFamily::new(SuperKind::SAa, &s, q.from_int(3), q.zero()).unwrap();
        let v0 = fam.parse_vector("v[0]").unwrap();
        assert_eq!(sact(&fam, &el(&s, "G[1/2]"), &v0).unwrap(), fam.parse_vector("4*w[1/2]").unwrap());
        assert!(sact(&fam, &el(&s, "c"), &v0).unwrap().is_zero());
    }

    #[test]
    fn axiom_on_special_weights() {
        let s = ns();
        let q = s.lattice().field().clone();
        let a = q.from_ratio(2, 7);
        let sb = SuperFamily::new(SuperKind::SBa, &s, a.clone(), q.zero()).unwrap();
        let sa = SuperFamily::new(SuperKind::SAa, &s, a.clone(), q.zero()).unwrap();
        let sab = SuperFamily::new(SuperKind::SAab, &s, a, q.from_ratio(3, 5)).unwrap();
        let gens = ["L[1]", "L[-2]", "L[0]", "G[1/2]", "G[-1/2]", "G[3/2]", "c"];
        for fam in [&sb, &sa, &sab] {
            let vecs: Vec<SuperModuleVector> = match fam.kind() {
                SuperKind::SBa => ["v[1/2]", "v[-1/2]", "v[-3/2]", "w[0]", "w[1]", "w[-1]", "w[2]"],
                _ => ["v[0]", "v[1]", "v[-1]", "v[2]", "w[1/2]", "w[-1/2]", "w[3/2]"],
            }
            .iter()
            .map(|t| fam.parse_vector(t).unwrap())
            .collect();
            for x in gens {
                for y in gens {
                    for v in &vecs {
                        let r = saxiom_residual(fam, &el(&s, x), &el(&s, y), v).unwrap();
                        assert!(r.is_zero(), "{fam}: {x}, {y}, {v:?}: {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn modules_need_ns() {
        let t = tilde();
        let q = t.lattice().field().clone();
        assert_eq!(
            SuperFamily::new(SuperKind::SAa, &t, q.zero(), q.zero()).unwrap_err(),
            SvirError::ParityMismatch
        );
    }
}
