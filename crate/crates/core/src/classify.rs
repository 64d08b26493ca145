//! Matching explicit structure-constant tables against the
//! intermediate-series families.
//!
//! A table lists coefficients `L_μ u = f·u'` (and `G_η u = f·u'` for super
//! tables) on a finite set of basis vectors. Candidates are tried in a fixed
//! order; for each one the free parameter is recovered, a diagonal gauge is
//! fitted so that the rescaled table equals the candidate's closed form, and
//! every entry is verified exactly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::diagonal::{solve_diagonal, Constraint, DiagonalFailure};
use crate::lattice::{Lattice, LatticeError};
use crate::modules::{FamilyKind, ModuleFamily};
use crate::scalar::{Scalar, ScalarError};
use crate::svir::{Sector, SuperAlgebra, SuperFamily, SuperKind, SvirError, Variant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("table needs at least two probe degrees and three basis vectors")]
    WindowTooSmall,
    #[error("probe shifts do not connect the window")]
    DisconnectedWindow,
    #[error("missing entry for degree {degree} on index {index}")]
    IncompleteTable { degree: String, index: String },
    #[error("all entries share one probe degree")]
    DegenerateSystem,
    #[error("entry (mu={mu}, nu={nu}, f={value}) contradicts the fitted parameters")]
    Inconsistent { mu: String, nu: String, value: String },
    #[error("index {0} is not on the expected coset")]
    BadIndex(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Svir(#[from] SvirError),
}

/// A basis vector: sector (`V` for plain tables) and index.
pub type BasisKey = (Sector, Scalar);

/// `L_degree` (or `G_degree` when `odd`) applied to `(sector, index)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryKey {
    pub odd: bool,
    pub degree: Scalar,
    pub sector: Sector,
    pub index: Scalar,
}

impl EntryKey {
    pub fn plain(degree: Scalar, index: Scalar) -> Self {
        EntryKey {
            odd: false,
            degree,
            sector: Sector::V,
            index,
        }
    }

    pub fn src(&self) -> BasisKey {
        (self.sector, self.index.clone())
    }

    pub fn dst(&self) -> BasisKey {
        (SuperFamily::image_sector(self.odd, self.sector), &self.degree + &self.index)
    }
}

impl fmt::Display for EntryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.odd { "G" } else { "L" };
        let s = match self.sector {
            Sector::V => "v",
            Sector::W => "w",
        };
        write!(f, "{op}[{}] {s}[{}]", self.degree, self.index)
    }
}

/// Coefficients `f` with `op_degree u_src = f u_dst`. Plain tables use
/// only even entries on sector `V`; super tables carry the coset offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTable {
    pub lattice: Lattice,
    /// Weight of `v_0`.
    pub offset: Scalar,
    /// `α` of the odd generators, for super tables.
    pub alpha: Option<Scalar>,
    pub entries: BTreeMap<EntryKey, Scalar>,
}

impl ActionTable {
    pub fn new(lattice: &Lattice, offset: Scalar) -> Self {
        ActionTable {
            lattice: lattice.clone(),
            offset,
            alpha: None,
            entries: BTreeMap::new(),
        }
    }

    pub fn new_super(lattice: &Lattice, offset: Scalar, alpha: Scalar) -> Self {
        ActionTable {
            alpha: Some(alpha),
            ..Self::new(lattice, offset)
        }
    }

    pub fn is_super(&self) -> bool {
        self.alpha.is_some()
    }

    pub fn insert(&mut self, key: EntryKey, value: Scalar) {
        self.entries.insert(key, value);
    }

    pub fn basis(&self) -> BTreeSet<BasisKey> {
        self.entries.keys().flat_map(|e| [e.src(), e.dst()]).collect()
    }

    fn probes(&self) -> BTreeSet<&Scalar> {
        self.entries.keys().filter(|e| !e.odd).map(|e| &e.degree).collect()
    }

    fn shifted(&self, shift: &Scalar) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(e, v)| {
                let mut e = e.clone();
                e.index = &e.index + shift;
                (e, v.clone())
            })
            .collect();
        ActionTable {
            lattice: self.lattice.clone(),
            offset: &self.offset - shift,
            alpha: self.alpha.clone(),
            entries,
        }
    }
}

/// Rescales `u ↦ g(u) u`: each coefficient becomes `f · g(src) / g(dst)`.
/// Missing gauge values count as 1.
pub fn apply_gauge(table: &ActionTable, gauge: &BTreeMap<BasisKey, Scalar>) -> ActionTable {
    let f = table.lattice.field();
    let get = |k: &BasisKey| gauge.get(k).cloned().unwrap_or_else(|| f.one());
    let mut out = table.clone();
    for (e, v) in out.entries.iter_mut() {
        let ratio = &get(&e.src()) * &get(&e.dst()).inv().expect("nonzero gauge");
        *v = &*v * &ratio;
    }
    out
}

/// The table of the same module in the basis `s(u)·u`.
pub fn scramble(table: &ActionTable, s: &BTreeMap<BasisKey, Scalar>) -> ActionTable {
    let inv = s
        .iter()
        .map(|(k, v)| (k.clone(), v.inv().expect("nonzero gauge")))
        .collect();
    apply_gauge(table, &inv)
}

/// Table of `fam` on `window ∩ support` for the given probe degrees.
pub fn generate(fam: &ModuleFamily, window: &[Scalar], probes: &[Scalar]) -> ActionTable {
    let basis: BTreeSet<&Scalar> = window.iter().filter(|i| fam.in_support(i)).collect();
    let mut table = ActionTable::new(fam.lattice(), fam.offset());
    for nu in &basis {
        for mu in probes {
            if basis.contains(&(mu + *nu)) {
                let f = fam.coefficient(mu, nu).expect("in support");
                table.insert(EntryKey::plain(mu.clone(), (*nu).clone()), f);
            }
        }
    }
    table
}

/// Super table of `fam` on windows of the given radius around each index
/// set, with even probes `probes` and odd probes `odd_probes`.
pub fn generate_super(
    fam: &SuperFamily,
    radius: i64,
    probes: &[Scalar],
    odd_probes: &[Scalar],
) -> ActionTable {
    let alg = fam.algebra();
    let (vs, ws) = match fam.kind() {
        SuperKind::SBa => (alg.coset().window(radius), alg.lattice().window(radius)),
        _ => (alg.lattice().window(radius), alg.coset().window(radius)),
    };
    let basis: BTreeSet<BasisKey> = vs
        .into_iter()
        .map(|i| (Sector::V, i))
        .chain(ws.into_iter().map(|i| (Sector::W, i)))
        .collect();
    let offset = match fam.kind() {
        SuperKind::SAab => fam.a().clone(),
        _ => alg.lattice().field().zero(),
    };
    let mut table = ActionTable::new_super(alg.lattice(), offset, alg.coset().offset().clone());
    for (s, i) in &basis {
        for (odd, degs) in [(false, probes), (true, odd_probes)] {
            for d in degs {
                let e = EntryKey {
                    odd,
                    degree: d.clone(),
                    sector: *s,
                    index: i.clone(),
                };
                if basis.contains(&e.dst()) {
                    let f = fam.coefficient(odd, d, *s, i).expect("in sector");
                    table.insert(e, f);
                }
            }
        }
    }
    table
}

/// Exact solve of `f = a + ν + μb` from the first two entries with distinct
/// `μ`, then verification of the rest.
pub fn fit_parameters(
    entries: &[(Scalar, Scalar, Scalar)],
) -> Result<(Scalar, Scalar), ClassifyError> {
    let Some((m1, n1, f1)) = entries.first() else {
        return Err(ClassifyError::DegenerateSystem);
    };
    let Some((m2, n2, f2)) = entries.iter().find(|(m, _, _)| m != m1) else {
        return Err(ClassifyError::DegenerateSystem);
    };
    let r1 = f1 - n1;
    let r2 = f2 - n2;
    let b = &(&r1 - &r2) * &(m1 - m2).inv()?;
    let a = &r1 - &(m1 * &b);
    for (m, n, f) in entries {
        if &(&(&a + n) + &(m * &b)) != f {
            return Err(ClassifyError::Inconsistent {
                mu: m.to_string(),
                nu: n.to_string(),
                value: f.to_string(),
            });
        }
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    Aab,
    Aa,
    Ba,
    PrimePlusLine,
    AabPrime,
    SAab,
    SAa,
    SBa,
}

impl CandidateKind {
    pub const PLAIN: [CandidateKind; 5] = [
        CandidateKind::Aab,
        CandidateKind::Aa,
        CandidateKind::Ba,
        CandidateKind::PrimePlusLine,
        CandidateKind::AabPrime,
    ];
    pub const SUPER: [CandidateKind; 3] = [CandidateKind::SAab, CandidateKind::SAa, CandidateKind::SBa];

    pub fn name(self) -> &'static str {
        match self {
            CandidateKind::Aab => "Aab",
            CandidateKind::Aa => "Aa",
            CandidateKind::Ba => "Ba",
            CandidateKind::PrimePlusLine => "PrimeLine",
            CandidateKind::AabPrime => "Aprime",
            CandidateKind::SAab => "SAab",
            CandidateKind::SAa => "SAa",
            CandidateKind::SBa => "SBa",
        }
    }

    fn is_super(self) -> bool {
        matches!(self, CandidateKind::SAab | CandidateKind::SAa | CandidateKind::SBa)
    }

    fn full_support(self) -> bool {
        !matches!(self, CandidateKind::AabPrime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Plain(ModuleFamily),
    Super(SuperFamily),
    NoMatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Plain(m) => write!(f, "{m}"),
            Verdict::Super(m) => write!(f, "{m}"),
            Verdict::NoMatch => write!(f, "NoMatch"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// `g` with `apply_gauge(table, g)` equal to the verdict's table, keyed
    /// by the indices of the input table.
    pub gauge: BTreeMap<BasisKey, Scalar>,
    /// Why each earlier candidate was rejected.
    pub rejections: Vec<(CandidateKind, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Model {
    Plain(ModuleFamily),
    Super(SuperFamily),
}

impl Model {
    fn supports(&self, (s, i): &BasisKey) -> bool {
        match self {
            Model::Plain(m) => *s == Sector::V && m.lattice().contains(i) && m.in_support(i),
            Model::Super(m) => m.in_sector(*s, i),
        }
    }

    fn coefficient(&self, e: &EntryKey) -> Scalar {
        match self {
            Model::Plain(m) => m.coefficient(&e.degree, &e.index).expect("supported"),
            Model::Super(m) => m
                .coefficient(e.odd, &e.degree, e.sector, &e.index)
                .expect("supported"),
        }
    }

    fn verdict(self) -> Verdict {
        match self {
            Model::Plain(m) => Verdict::Plain(m),
            Model::Super(m) => Verdict::Super(m),
        }
    }
}

/// Normalized table plus what is needed to build candidates.
struct Context<'a> {
    table: &'a ActionTable,
    shift: Scalar,
    offset_in_m: bool,
    alg: Option<SuperAlgebra>,
}

impl Context<'_> {
    fn build(&self, kind: CandidateKind, p: &Scalar) -> Option<Model> {
        let t = self.table;
        let lat = &t.lattice;
        let f = lat.field();
        let needs_zero = !matches!(kind, CandidateKind::Aab | CandidateKind::SAab);
        if needs_zero && !self.offset_in_m {
            return None;
        }
        let a = t.offset.clone();
        Some(match kind {
            CandidateKind::Aab => Model::Plain(ModuleFamily::aab(lat, a, p.clone())),
            CandidateKind::Aa => Model::Plain(ModuleFamily::aa(lat, p.clone())),
            CandidateKind::Ba => Model::Plain(ModuleFamily::ba(lat, p.clone())),
            CandidateKind::PrimePlusLine => Model::Plain(ModuleFamily::prime_plus_line(lat)),
            CandidateKind::AabPrime => Model::Plain(ModuleFamily::aab_prime(lat, f.zero(), p.clone()).ok()?),
            CandidateKind::SAab => Model::Super(
                SuperFamily::new(SuperKind::SAab, self.alg.as_ref()?, a, p.clone()).ok()?,
            ),
            CandidateKind::SAa => Model::Super(
                SuperFamily::new(SuperKind::SAa, self.alg.as_ref()?, p.clone(), f.zero()).ok()?,
            ),
            CandidateKind::SBa => Model::Super(
                SuperFamily::new(SuperKind::SBa, self.alg.as_ref()?, p.clone(), f.zero()).ok()?,
            ),
        })
    }

    fn has_parameter(kind: CandidateKind) -> bool {
        !matches!(kind, CandidateKind::PrimePlusLine | CandidateKind::AabPrime)
    }

    /// Parameter read off the table as if the gauge were trivial.
    fn raw_parameter(&self, kind: CandidateKind) -> Option<Scalar> {
        let t = self.table;
        let find = |sector: Sector, special: &dyn Fn(&EntryKey) -> bool| {
            t.entries
                .iter()
                .find(|(e, _)| !e.odd && e.sector == sector && !e.degree.is_zero() && special(e))
                .map(|(e, v)| (e.degree.clone(), v.clone()))
        };
        match kind {
            CandidateKind::Aab | CandidateKind::SAab => {
                let rows: Vec<_> = t
                    .entries
                    .iter()
                    .filter(|(e, _)| !e.odd && e.sector == Sector::V)
                    .map(|(e, v)| (e.degree.clone(), e.index.clone(), v.clone()))
                    .collect();
                let (a, b) = fit_parameters(&rows).ok()?;
                (a == t.offset).then_some(b)
            }
            CandidateKind::Aa | CandidateKind::SAa => {
                let (mu, v) = find(Sector::V, &|e| e.index.is_zero())?;
                Some(&(&v * &mu.inv().ok()?) - &mu)
            }
            CandidateKind::Ba => {
                let (mu, v) = find(Sector::V, &|e| e.dst().1.is_zero())?;
                Some(-&(&(&v * &mu.inv().ok()?) + &mu))
            }
            CandidateKind::SBa => {
                let (mu, v) = find(Sector::W, &|e| e.dst().1.is_zero())?;
                Some(-&(&(&v * &mu.inv().ok()?) + &mu))
            }
            _ => None,
        }
    }

    /// Candidate parameters in trial order. Isomorphic members of a family
    /// (`b ∈ {0, 1}` for `A'` and for `A_{a,b}` with `a ∉ M`) are
    /// resolved towards `b = 0`, so the verdict does not depend on the gauge.
    fn proposals(&self, kind: CandidateKind) -> Vec<Scalar> {
        let f = self.table.lattice.field();
        if kind == CandidateKind::AabPrime {
            return vec![f.zero(), f.one()];
        }
        if !Self::has_parameter(kind) {
            return vec![f.zero()];
        }
        match self.cycle_gcd(kind) {
            CycleGcd::Root(p) => vec![p],
            CycleGcd::Free => {
                let mut out: Vec<Scalar> = self.raw_parameter(kind).into_iter().collect();
                out.push(f.zero());
                out.dedup();
                out
            }
            CycleGcd::Many(poly) => {
                let mut out: Vec<Scalar> = [f.zero(), f.one()]
                    .into_iter()
                    .filter(|p| poly_eval(&poly, p).is_zero())
                    .collect();
                out.extend(self.raw_parameter(kind).filter(|p| poly_eval(&poly, p).is_zero()));
                out.dedup();
                out
            }
            CycleGcd::Impossible => vec![],
        }
    }

    /// Gauge-invariant constraints on the parameter: propagate `g` as a
    /// rational function of `p` along a spanning tree of nonzero entries and
    /// collect the remaining entries as polynomial equations.
    fn cycle_gcd(&self, kind: CandidateKind) -> CycleGcd {
        let f = self.table.lattice.field();
        let (Some(m0), Some(m1)) = (self.build(kind, &f.zero()), self.build(kind, &f.one())) else {
            return CycleGcd::Impossible;
        };
        let basis = self.table.basis();
        if !basis.iter().all(|k| m0.supports(k)) {
            return CycleGcd::Impossible;
        }
        let affine: BTreeMap<&EntryKey, Poly> = self
            .table
            .entries
            .keys()
            .map(|e| {
                let c0 = m0.coefficient(e);
                let c1 = m1.coefficient(e);
                (e, poly_trim(vec![c0.clone(), &c1 - &c0]))
            })
            .collect();
        let mut adj: BTreeMap<&BasisKey, Vec<&EntryKey>> = BTreeMap::new();
        let srcs: Vec<(EntryKey, BasisKey, BasisKey)> = self
            .table
            .entries
            .keys()
            .map(|e| (e.clone(), e.src(), e.dst()))
            .collect();
        for (e, s, d) in &srcs {
            if !self.table.entries[e].is_zero() {
                adj.entry(s).or_default().push(e);
                adj.entry(d).or_default().push(e);
            }
        }
        let mut value: BTreeMap<&BasisKey, (Poly, Poly)> = BTreeMap::new();
        for root in &basis {
            if value.contains_key(root) {
                continue;
            }
            value.insert(root, (vec![f.one()], vec![f.one()]));
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let (nu, du) = value[u].clone();
                for e in adj.get(u).map(Vec::as_slice).unwrap_or(&[]) {
                    let t = &self.table.entries[*e];
                    let m = &affine[*e];
                    let (s, d) = (&srcs_lookup(&srcs, e).1, &srcs_lookup(&srcs, e).2);
                    if s == u && !value.contains_key(d) {
                        if m.is_empty() {
                            return CycleGcd::Impossible;
                        }
                        value.insert(d, (poly_scale(&nu, t), poly_mul(&du, m)));
                        queue.push_back(d);
                    } else if d == u && !value.contains_key(s) {
                        value.insert(s, (poly_mul(&nu, m), poly_scale(&du, t)));
                        queue.push_back(s);
                    }
                }
            }
        }
        let mut g: Poly = vec![];
        for (e, s, d) in &srcs {
            let t = &self.table.entries[e];
            let m = &affine[e];
            let eq = if t.is_zero() {
                m.clone()
            } else {
                let (ns, ds) = &value[s];
                let (nd, dd) = &value[d];
                poly_sub(&poly_mul(&poly_mul(m, nd), ds), &poly_scale(&poly_mul(ns, dd), t))
            };
            g = poly_gcd(&g, &eq);
            match g.len() {
                1 => return CycleGcd::Impossible,
                2 => break,
                _ => {}
            }
        }
        match g.len() {
            0 => CycleGcd::Free,
            2 => CycleGcd::Root(-&(&g[0] * &g[1].inv().expect("monic"))),
            _ => CycleGcd::Many(g),
        }
    }
}

fn srcs_lookup<'a>(
    srcs: &'a [(EntryKey, BasisKey, BasisKey)],
    e: &EntryKey,
) -> &'a (EntryKey, BasisKey, BasisKey) {
    let i = srcs.binary_search_by(|(k, _, _)| k.cmp(e)).expect("entry present");
    &srcs[i]
}

enum CycleGcd {
    Root(Scalar),
    Free,
    Many(Poly),
    Impossible,
}

/// Polynomials over the base field, ascending coefficients, no trailing zeros.
type Poly = Vec<Scalar>;

fn poly_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_scale(p: &Poly, k: &Scalar) -> Poly {
    poly_trim(p.iter().map(|c| c * k).collect())
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    if p.is_empty() || q.is_empty() {
        return vec![];
    }
    let f = p[0].field();
    let mut out = vec![f.zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] = &out[i + j] + &(a * b);
        }
    }
    poly_trim(out)
}

fn poly_sub(p: &Poly, q: &Poly) -> Poly {
    let n = p.len().max(q.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (p.get(i), q.get(i)) {
            (Some(a), Some(b)) => a - b,
            (Some(a), None) => a.clone(),
            (None, Some(b)) => -b,
            (None, None) => unreachable!(),
        });
    }
    poly_trim(out)
}

fn poly_rem(p: &Poly, q: &Poly) -> Poly {
    let mut r = p.clone();
    let lead = q.last().expect("nonzero divisor").inv().expect("nonzero");
    while r.len() >= q.len() {
        let k = r.last().expect("nonempty") * &lead;
        let off = r.len() - q.len();
        for (i, c) in q.iter().enumerate() {
            r[off + i] = &r[off + i] - &(&k * c);
        }
        r = poly_trim(r);
    }
    r
}

/// Monic gcd; the zero polynomial is the identity.
fn poly_gcd(p: &Poly, q: &Poly) -> Poly {
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    match a.last() {
        Some(l) => {
            let inv = l.inv().expect("nonzero");
            poly_scale(&a, &inv)
        }
        None => a,
    }
}

fn poly_eval(p: &Poly, x: &Scalar) -> Scalar {
    let f = x.field();
    p.iter().rev().fold(f.zero(), |acc, c| &(&acc * x) + c)
}

fn validate(table: &ActionTable) -> Result<(), ClassifyError> {
    let lat = &table.lattice;
    let alpha = table.alpha.as_ref();
    let on_some_coset = |i: &Scalar| {
        lat.contains(i) || alpha.is_some_and(|a| lat.contains(&(i - a)))
    };
    for e in table.entries.keys() {
        if !on_some_coset(&e.index) {
            return Err(ClassifyError::BadIndex(e.index.to_string()));
        }
        let ok = if e.odd {
            alpha.is_some_and(|a| lat.contains(&(&e.degree - a)))
        } else {
            lat.contains(&e.degree)
        };
        if !ok {
            return Err(ClassifyError::BadIndex(e.degree.to_string()));
        }
    }
    let basis = table.basis();
    let probes = table.probes();
    let sources: BTreeSet<BasisKey> = table.entries.keys().map(EntryKey::src).collect();
    if probes.len() < 2 || sources.len() < 3 {
        return Err(ClassifyError::WindowTooSmall);
    }
    let degrees: BTreeSet<(bool, &Scalar)> = table.entries.keys().map(|e| (e.odd, &e.degree)).collect();
    for (s, i) in &sources {
        for (odd, d) in &degrees {
            let e = EntryKey {
                odd: *odd,
                degree: (*d).clone(),
                sector: *s,
                index: i.clone(),
            };
            if basis.contains(&e.dst()) && !table.entries.contains_key(&e) {
                return Err(ClassifyError::IncompleteTable {
                    degree: d.to_string(),
                    index: i.to_string(),
                });
            }
        }
    }
    // Connectivity of the probe-shift graph, ignoring coefficient values.
    let keys: Vec<&BasisKey> = basis.iter().collect();
    let pos: BTreeMap<&BasisKey, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in table.entries.keys() {
        let (a, b) = (find(&mut parent, pos[&e.src()]), find(&mut parent, pos[&e.dst()]));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    if (0..keys.len()).any(|i| find(&mut parent, i) != root) {
        return Err(ClassifyError::DisconnectedWindow);
    }
    Ok(())
}

/// A plain-table index missing from the basis while a probe reaches it from
/// both sides.
fn has_hole(table: &ActionTable) -> bool {
    let basis = table.basis();
    let v: BTreeSet<&Scalar> = basis.iter().filter(|(s, _)| *s == Sector::V).map(|(_, i)| i).collect();
    for mu in table.probes() {
        for i in &v {
            let h = *i + mu;
            if !v.contains(&h) && v.contains(&(&h + mu)) {
                return true;
            }
        }
    }
    false
}

fn normalize(table: &ActionTable) -> Result<(ActionTable, Scalar, Option<SuperAlgebra>), ClassifyError> {
    let lat = &table.lattice;
    let reduced = lat.reduce(&table.offset);
    let shift = &table.offset - &reduced;
    let norm = table.shifted(&shift);
    let alg = match &table.alpha {
        Some(a) => Some(SuperAlgebra::new(lat, a, Variant::Ns)?),
        None => None,
    };
    Ok((norm, shift, alg))
}

/// Fits one candidate family; `Ok(None)` when it does not match.
pub fn match_candidate(
    table: &ActionTable,
    kind: CandidateKind,
) -> Result<Option<(Verdict, BTreeMap<BasisKey, Scalar>)>, ClassifyError> {
    validate(table)?;
    let (norm, shift, alg) = normalize(table)?;
    let ctx = Context {
        offset_in_m: norm.offset.is_zero(),
        table: &norm,
        shift,
        alg,
    };
    Ok(fit_candidate(&ctx, kind).ok().map(|(v, g)| (v, unshift(&ctx, g))))
}

fn unshift(ctx: &Context, gauge: BTreeMap<BasisKey, Scalar>) -> BTreeMap<BasisKey, Scalar> {
    gauge
        .into_iter()
        .map(|((s, i), g)| ((s, &i - &ctx.shift), g))
        .collect()
}

fn fit_candidate(
    ctx: &Context,
    kind: CandidateKind,
) -> Result<(Verdict, BTreeMap<BasisKey, Scalar>), String> {
    let table = ctx.table;
    if kind.is_super() != table.is_super() {
        return Err("table kind differs".into());
    }
    if kind.full_support() && !table.is_super() && has_hole(table) {
        return Err("window has a hole".into());
    }
    let f = table.lattice.field();
    let basis: Vec<BasisKey> = table.basis().into_iter().collect();
    let mut last = String::from("no parameter fits");
    for p in ctx.proposals(kind) {
        let Some(model) = ctx.build(kind, &p) else {
            last = "parameters outside the family".into();
            continue;
        };
        if let Some(k) = basis.iter().find(|k| !model.supports(k)) {
            last = format!("basis vector {} outside support", k.1);
            continue;
        }
        let coeffs: Vec<(&EntryKey, Scalar)> =
            table.entries.keys().map(|e| (e, model.coefficient(e))).collect();
        if coeffs.iter().all(|(e, m)| &table.entries[*e] == m) {
            let ones = basis.iter().map(|k| (k.clone(), f.one())).collect();
            return Ok((model.verdict(), ones));
        }
        let constraints: Vec<Constraint<BasisKey>> = coeffs
            .iter()
            .map(|(e, m)| Constraint::new(e.src(), e.dst(), m.clone(), table.entries[*e].clone()))
            .collect();
        match solve_diagonal(f, &basis, &constraints) {
            Ok(g) => return Ok((model.verdict(), g)),
            Err(DiagonalFailure::Singular(c)) | Err(DiagonalFailure::Inconsistent { violated: c, .. }) => {
                last = format!(
                    "entry at index {} to {}: table {} vs family {}",
                    c.src.1, c.dst.1, c.rhs, c.lhs
                );
            }
        }
    }
    Err(last)
}

/// Runs the candidates in order and returns the first match.
pub fn classify(table: &ActionTable) -> Result<Classification, ClassifyError> {
    validate(table)?;
    let (norm, shift, alg) = normalize(table)?;
    let ctx = Context {
        offset_in_m: norm.offset.is_zero(),
        table: &norm,
        shift,
        alg,
    };
    let kinds: &[CandidateKind] = if table.is_super() {
        &CandidateKind::SUPER
    } else {
        &CandidateKind::PLAIN
    };
    let mut rejections = Vec::new();
    for &kind in kinds {
        match fit_candidate(&ctx, kind) {
            Ok((verdict, gauge)) => {
                return Ok(Classification {
                    verdict,
                    gauge: unshift(&ctx, gauge),
                    rejections,
                })
            }
            Err(why) => rejections.push((kind, why)),
        }
    }
    Ok(Classification {
        verdict: Verdict::NoMatch,
        gauge: BTreeMap::new(),
        rejections,
    })
}

/// The representative reported by [`classify`]: `a` reduced modulo `M`,
/// and `b = 0` wherever `b = 0` and `b = 1` give isomorphic modules.
pub fn canonical(fam: &ModuleFamily) -> ModuleFamily {
    let lat = fam.lattice();
    let f = lat.field();
    match fam.kind() {
        FamilyKind::Aab => {
            let a = lat.reduce(fam.a());
            let b = if fam.b().is_one() && !lat.contains(&a) {
                f.zero()
            } else {
                fam.b().clone()
            };
            ModuleFamily::aab(lat, a, b)
        }
        FamilyKind::AabPrime => ModuleFamily::aab_prime(lat, f.zero(), f.zero()).expect("0 in M"),
        _ => fam.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn z() -> (Field, Lattice) {
        let q = Field::rational();
        (q.clone(), Lattice::integers(&q))
    }

    fn probes(q: &Field) -> Vec<Scalar> {
        vec![q.one(), q.from_int(2)]
    }

    fn plain(v: &Verdict) -> &ModuleFamily {
        match v {
            Verdict::Plain(m) => m,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fit_examples() {
        let q = Field::rational();
        let rows = vec![
            (q.one(), q.zero(), q.from_ratio(11, 2)),
            (q.from_int(2), q.zero(), q.from_ratio(21, 2)),
        ];
        assert_eq!(fit_parameters(&rows).unwrap(), (q.from_ratio(1, 2), q.from_int(5)));
        let rows = vec![(q.one(), q.zero(), q.one()), (q.one(), q.one(), q.from_int(2))];
        assert_eq!(fit_parameters(&rows).unwrap_err(), ClassifyError::DegenerateSystem);
        // Interior of B_a looks like A_{0,0}.
        let rows = vec![
            (q.one(), q.one(), q.one()),
            (q.from_int(2), q.one(), q.one()),
            (q.one(), q.from_int(3), q.from_int(3)),
        ];
        assert_eq!(fit_parameters(&rows).unwrap(), (q.zero(), q.zero()));
    }

    #[test]
    fn round_trip_aab() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 3), q.from_int(5));
        let t = generate(&fam, &m.window(3), &probes(&q));
        let r = classify(&t).unwrap();
        assert_eq!(plain(&r.verdict), &fam);
        assert!(r.gauge.values().all(|g| g.is_one()));
    }

    #[test]
    fn scrambled_aab_recovers_gauge() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 3), q.from_int(5));
        let t = generate(&fam, &m.window(3), &probes(&q));
        let s: BTreeMap<BasisKey, Scalar> = t
            .basis()
            .into_iter()
            .map(|k| {
                let v = &(&k.1 * &k.1) + &q.one();
                (k, v)
            })
            .collect();
        let r = classify(&scramble(&t, &s)).unwrap();
        assert_eq!(plain(&r.verdict), &fam);
        let k0 = s.keys().next().unwrap();
        let ratio = &r.gauge[k0] * &s[k0].inv().unwrap();
        for (k, v) in &s {
            assert_eq!(&r.gauge[k], &(v * &ratio));
        }
    }

    #[test]
    fn round_trip_special_families() {
        let (q, m) = z();
        let w = m.window(3);
        for fam in [
            ModuleFamily::aa(&m, q.from_int(2)),
            ModuleFamily::ba(&m, q.from_ratio(-1, 3)),
            ModuleFamily::prime_plus_line(&m),
            ModuleFamily::aab_prime(&m, q.zero(), q.zero()).unwrap(),
            ModuleFamily::aab_prime(&m, q.zero(), q.one()).unwrap(),
        ] {
            let t = generate(&fam, &w, &probes(&q));
            let r = classify(&t).unwrap();
            assert_eq!(plain(&r.verdict), &canonical(&fam), "{:?}", r.rejections);
            let s = t
                .basis()
                .into_iter()
                .map(|k| {
                    let v = &(&k.1 * &q.from_int(3)) + &q.from_int(11);
                    (k, v)
                })
                .collect();
            let r = classify(&scramble(&t, &s)).unwrap();
            assert_eq!(plain(&r.verdict), &canonical(&fam), "{:?}", r.rejections);
        }
    }

    #[test]
    fn rank_two_round_trip() {
        let q = Field::sqrt2();
        let m = Lattice::new(&q, vec![q.one(), q.gen()]).unwrap();
        let fam = ModuleFamily::aab(&m, q.parse("1/3 + 1/5*t").unwrap(), q.parse("2 - t").unwrap());
        let t = generate(&fam, &m.window(3), &[q.one(), q.gen()]);
        let s = t
            .basis()
            .into_iter()
            .map(|k| {
                let v = &(&k.1 * &k.1) + &q.from_int(7);
                (k, v)
            })
            .collect();
        let r = classify(&scramble(&t, &s)).unwrap();
        assert_eq!(plain(&r.verdict), &fam);
        let fam = ModuleFamily::ba(&m, q.parse("t").unwrap());
        let t = generate(&fam, &m.window(3), &[q.one(), q.gen()]);
        assert_eq!(plain(&classify(&t).unwrap().verdict), &fam);
    }

    #[test]
    fn isomorphic_parameters_resolve_to_zero() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 2), q.one());
        let t = generate(&fam, &m.window(3), &probes(&q));
        let r = classify(&t).unwrap();
        assert_eq!(plain(&r.verdict), &ModuleFamily::aab(&m, q.from_ratio(1, 2), q.zero()));
    }

    #[test]
    fn offset_is_reduced() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(7, 3), q.from_ratio(2, 5));
        let r = classify(&generate(&fam, &m.window(3), &probes(&q))).unwrap();
        assert_eq!(plain(&r.verdict), &canonical(&fam));
        assert_eq!(canonical(&fam).a(), &q.from_ratio(1, 3));
    }

    #[test]
    fn generic_aab_excludes_other_kinds() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.from_ratio(1, 3), q.from_int(5));
        let t = generate(&fam, &m.window(3), &probes(&q));
        for kind in [CandidateKind::Aa, CandidateKind::Ba, CandidateKind::AabPrime] {
            assert_eq!(match_candidate(&t, kind).unwrap(), None);
        }
    }

    #[test]
    fn table_errors() {
        let (q, m) = z();
        let fam = ModuleFamily::aab(&m, q.zero(), q.from_int(3));
        let t = generate(&fam, &m.window(3), &[q.one()]);
        assert_eq!(classify(&t).unwrap_err(), ClassifyError::WindowTooSmall);
        let t = generate(&fam, &m.window(3), &[q.from_int(2), q.from_int(4)]);
        assert_eq!(classify(&t).unwrap_err(), ClassifyError::DisconnectedWindow);
        let mut t = generate(&fam, &m.window(3), &probes(&q));
        t.entries.remove(&EntryKey::plain(q.one(), q.zero()));
        assert!(matches!(classify(&t).unwrap_err(), ClassifyError::IncompleteTable { .. }));
    }

    #[test]
    fn super_round_trip() {
        let (q, m) = z();
        let alg = SuperAlgebra::new(&m, &q.from_ratio(1, 2), Variant::Ns).unwrap();
        let odd = vec![q.from_ratio(1, 2), q.from_ratio(-3, 2)];
        for fam in [
            SuperFamily::new(SuperKind::SAab, &alg, q.from_ratio(1, 3), q.from_ratio(2, 7)).unwrap(),
            SuperFamily::new(SuperKind::SAa, &alg, q.from_int(3), q.zero()).unwrap(),
            SuperFamily::new(SuperKind::SBa, &alg, q.from_ratio(-2, 5), q.zero()).unwrap(),
        ] {
            let t = generate_super(&fam, 3, &probes(&q), &odd);
            let r = classify(&t).unwrap();
            assert_eq!(r.verdict, Verdict::Super(fam.clone()), "{:?}", r.rejections);
            let s: BTreeMap<BasisKey, Scalar> = t
                .basis()
                .into_iter()
                .map(|k| {
                    let v = &(&k.1 * &k.1) + &q.from_int(2);
                    (k, v)
                })
                .collect();
            let r = classify(&scramble(&t, &s)).unwrap();
            assert_eq!(r.verdict, Verdict::Super(fam), "{:?}", r.rejections);
        }
    }
}
