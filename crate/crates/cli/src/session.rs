//! Session files: one declaration or command per line, `#` starts a comment.
//!
//! Declarations are resolved while parsing, so a parsed [`Session`] holds
//! ready-to-run commands with exact values.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use vir_core::classify::ActionTable;
use vir_core::lattice::{Coset, Lattice};
use vir_core::modules::{ModuleFamily, ModuleVector};
use vir_core::parse::{parse_combination, parse_polynomial, Gen};
use vir_core::scalar::{Field, FieldSpec, Scalar, ScalarError};
use vir_core::svir::{SuperAlgebra, SuperElement, SuperFamily, SuperKind, SuperModuleVector, Variant};
use vir_core::vir::AlgebraElement;

use crate::table::parse_table;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("line {line}, column {col}: expected {expected}")]
    Parse { line: usize, col: usize, expected: String },
    #[error("line {line}: undefined name `{name}`")]
    UndefinedName { line: usize, name: String },
    #[error("line {line}: `{name}` is already defined")]
    RedefinedName { line: usize, name: String },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
}

impl SessionError {
    pub fn line(&self) -> usize {
        match self {
            SessionError::Parse { line, .. }
            | SessionError::UndefinedName { line, .. }
            | SessionError::RedefinedName { line, .. }
            | SessionError::Invalid { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Module {
    Plain(ModuleFamily),
    Super(SuperFamily),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Bracket(AlgebraElement, AlgebraElement),
    Jacobi(AlgebraElement, AlgebraElement, AlgebraElement),
    JacobiSweep { lattice: Lattice, centerless: bool, samples: usize, seed: u64 },
    Span { target: AlgebraElement, basis: Vec<AlgebraElement> },
    Expad { alpha: Scalar, x: Scalar, elem: AlgebraElement },
    Pair2 { lattice: Lattice, x: Scalar, alpha: Scalar, n: u32 },
    Closure { cap: usize, gens: Vec<AlgebraElement> },
    Act(ModuleFamily, AlgebraElement, ModuleVector),
    SAct(SuperFamily, SuperElement, SuperModuleVector),
    Iso { src: ModuleFamily, dst: ModuleFamily, radius: i64 },
    Restrict { module: ModuleFamily, sub: Lattice, offset: Scalar },
    Substructure(ModuleFamily),
    Sbracket(SuperElement, SuperElement),
    Extcheck { alg: SuperAlgebra, radius: i64, perturb: Option<Scalar> },
    Classify(ActionTable),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Declaration,
    Command(Command),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub line: usize,
    pub text: String,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub statements: Vec<Statement>,
}

impl Session {
    pub fn commands(&self) -> impl Iterator<Item = (&Statement, &Command)> {
        self.statements.iter().filter_map(|s| match &s.kind {
            StatementKind::Command(c) => Some((s, c)),
            StatementKind::Declaration => None,
        })
    }
}

/// Parses a session; relative table paths resolve against `base_dir`.
pub fn parse_session(text: &str, base_dir: &Path) -> Result<Session, SessionError> {
    let mut env = Env::new(base_dir);
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut line = Line::new(i + 1, raw);
        if line.is_blank() {
            continue;
        }
        let kind = env.statement(&mut line)?;
        statements.push(Statement {
            line: i + 1,
            text: line.content().trim().to_string(),
            kind,
        });
    }
    Ok(Session { statements })
}

/// A cursor over one source line with comments removed.
pub(crate) struct Line<'a> {
    no: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Line<'a> {
    pub(crate) fn new(no: usize, raw: &'a str) -> Self {
        let text = raw.split('#').next().unwrap_or("");
        Line { no, text, pos: 0 }
    }

    pub(crate) fn no(&self) -> usize {
        self.no
    }

    pub(crate) fn content(&self) -> &'a str {
        self.text
    }

    pub(crate) fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }

    fn col(&self, pos: usize) -> usize {
        self.text[..pos.min(self.text.len())].chars().count() + 1
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    pub(crate) fn peek_word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        (end > 0).then(|| &rest[..end])
    }

    pub(crate) fn word(&mut self, what: &str) -> Result<(usize, &'a str), SessionError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_word() {
            Some(w) => {
                self.pos += w.len();
                Ok((start, w))
            }
            None => Err(self.error_at(start, what)),
        }
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<(), SessionError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_word() {
            Some(w) if w == kw => {
                self.pos += w.len();
                Ok(())
            }
            _ => Err(self.error_at(start, &format!("`{kw}`"))),
        }
    }

    /// The remainder of the line, trimmed; an error when empty.
    pub(crate) fn rest(&mut self, what: &str) -> Result<(usize, &'a str), SessionError> {
        self.skip_ws();
        let start = self.pos;
        let r = self.text[start..].trim_end();
        if r.is_empty() {
            return Err(self.error_at(start, what));
        }
        self.pos = self.text.len();
        Ok((start, r))
    }

    pub(crate) fn end(&mut self) -> Result<(), SessionError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error_at(self.pos, "end of line"))
        }
    }

    pub(crate) fn error_at(&self, pos: usize, expected: &str) -> SessionError {
        SessionError::Parse {
            line: self.no,
            col: self.col(pos),
            expected: expected.to_string(),
        }
    }

    pub(crate) fn invalid(&self, msg: impl ToString) -> SessionError {
        SessionError::Invalid {
            line: self.no,
            msg: msg.to_string(),
        }
    }

    /// Maps a scalar-grammar error at offset `pos` inside `text` (which
    /// starts at `start`) to a located parse error.
    pub(crate) fn scalar_error(&self, start: usize, e: ScalarError, what: &str) -> SessionError {
        match e {
            ScalarError::Parse { pos, msg } => self.error_at(start + pos, &format!("{what} ({msg})")),
            other => self.invalid(other),
        }
    }

    /// `key=value` groups: a value runs until the next `key=` token or one
    /// of `stops`. Returns the groups and leaves the cursor at the stop word.
    pub(crate) fn options(
        &mut self,
        stops: &[&str],
    ) -> Result<Vec<(String, usize, String)>, SessionError> {
        let mut out: Vec<(String, usize, String)> = Vec::new();
        loop {
            let Some(w) = self.peek_word() else { break };
            if stops.contains(&w) {
                break;
            }
            let start = self.pos;
            self.pos += w.len();
            match w.split_once('=') {
                Some((k, v)) if is_ident(k) => {
                    out.push((k.to_string(), start + k.len() + 1, v.to_string()));
                }
                _ => match out.last_mut() {
                    Some(last) => {
                        last.2.push(' ');
                        last.2.push_str(w);
                    }
                    None => return Err(self.error_at(start, "`key=value`")),
                },
            }
        }
        Ok(out)
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn option<'o>(opts: &'o [(String, usize, String)], key: &str) -> Option<&'o (String, usize, String)> {
    opts.iter().find(|o| o.0 == key)
}

const RESERVED: [&str; 2] = ["c", "t"];

/// Declared names and values.
pub(crate) struct Env {
    base_dir: PathBuf,
    field: Field,
    field_declared: bool,
    declared_any: bool,
    names: BTreeSet<String>,
    lattices: BTreeMap<String, Lattice>,
    cosets: BTreeMap<String, Coset>,
    current_lattice: Option<Lattice>,
    centerless: bool,
    elems: BTreeMap<String, AlgebraElement>,
    salgs: BTreeMap<String, SuperAlgebra>,
    current_salg: Option<SuperAlgebra>,
    selems: BTreeMap<String, SuperElement>,
    modules: BTreeMap<String, Module>,
    tables: BTreeMap<String, ActionTable>,
}

impl Env {
    pub(crate) fn new(base_dir: &Path) -> Self {
        Env {
            base_dir: base_dir.to_path_buf(),
            field: Field::rational(),
            field_declared: false,
            declared_any: false,
            names: BTreeSet::new(),
            lattices: BTreeMap::new(),
            cosets: BTreeMap::new(),
            current_lattice: None,
            centerless: true,
            elems: BTreeMap::new(),
            salgs: BTreeMap::new(),
            current_salg: None,
            selems: BTreeMap::new(),
            modules: BTreeMap::new(),
            tables: BTreeMap::new(),
        }
    }

    fn statement(&mut self, line: &mut Line) -> Result<StatementKind, SessionError> {
        let (start, kw) = line.word("a declaration or command")?;
        let decl = match kw {
            "field" => self.field_decl(line).map(|_| ()),
            "lattice" => self.lattice_decl(line),
            "coset" => self.coset_decl(line),
            "mode" => self.mode_decl(line),
            "elem" => self.elem_decl(line),
            "salg" => self.salg_decl(line),
            "selem" => self.selem_decl(line),
            "module" => self.module_decl(line),
            "table" => self.table_decl(line),
            _ => return self.command(kw, start, line).map(StatementKind::Command),
        };
        decl?;
        self.declared_any = true;
        Ok(StatementKind::Declaration)
    }

    fn define(&mut self, line: &Line, start: usize, name: &str) -> Result<(), SessionError> {
        if !is_ident(name) || RESERVED.contains(&name) {
            return Err(line.error_at(start, "a name"));
        }
        if !self.names.insert(name.to_string()) {
            return Err(SessionError::RedefinedName {
                line: line.no(),
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn undefined(line: &Line, name: &str) -> SessionError {
        SessionError::UndefinedName {
            line: line.no(),
            name: name.to_string(),
        }
    }

    /// `field Q` or `field Q(t) minpoly <polynomial in t>`.
    pub(crate) fn field_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        if self.field_declared {
            return Err(SessionError::RedefinedName {
                line: line.no(),
                name: "field".into(),
            });
        }
        if self.declared_any {
            return Err(line.invalid("the field must be declared before anything else"));
        }
        let (start, name) = line.word("`Q` or `Q(t)`")?;
        self.field = match name {
            "Q" => Field::rational(),
            "Q(t)" => {
                line.keyword("minpoly")?;
                let (ps, text) = line.rest("a polynomial in t")?;
                let poly = parse_polynomial(text)
                    .map_err(|e| line.scalar_error(ps, e, "a polynomial in t"))?;
                Field::new(FieldSpec::extension(poly)).map_err(|e| line.invalid(e))?
            }
            _ => return Err(line.error_at(start, "`Q` or `Q(t)`")),
        };
        line.end()?;
        self.field_declared = true;
        Ok(())
    }

    pub(crate) fn scalar(&self, line: &Line, start: usize, text: &str) -> Result<Scalar, SessionError> {
        self.field
            .parse(text)
            .map_err(|e| line.scalar_error(start, e, "a scalar"))
    }

    fn scalar_word(&self, line: &mut Line, what: &str) -> Result<Scalar, SessionError> {
        let (start, w) = line.word(what)?;
        self.scalar(line, start, w)
    }

    fn int_word<T: std::str::FromStr>(&self, line: &mut Line, what: &str) -> Result<T, SessionError> {
        let (start, w) = line.word(what)?;
        w.parse().map_err(|_| line.error_at(start, what))
    }

    /// `lattice <name> gens <scalar>, <scalar>, ...`
    pub(crate) fn lattice_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("a lattice name")?;
        line.keyword("gens")?;
        let (gs, text) = line.rest("generators")?;
        let mut gens = Vec::new();
        let mut offset = 0;
        for part in text.split(',') {
            let lead = part.len() - part.trim_start().len();
            if part.trim().is_empty() {
                return Err(line.error_at(gs + offset + lead, "a scalar"));
            }
            gens.push(self.scalar(line, gs + offset + lead, part.trim())?);
            offset += part.len() + 1;
        }
        let lat = Lattice::new(&self.field, gens).map_err(|e| line.invalid(e))?;
        self.define(line, ns, name)?;
        self.lattices.insert(name.to_string(), lat.clone());
        self.current_lattice = Some(lat);
        Ok(())
    }

    pub(crate) fn lattice(&self, line: &Line, name: &str) -> Result<Lattice, SessionError> {
        if let Some(l) = self.lattices.get(name) {
            return Ok(l.clone());
        }
        if name == "Z" {
            return Ok(Lattice::integers(&self.field));
        }
        Err(Self::undefined(line, name))
    }

    fn current_lattice(&self) -> Lattice {
        self.current_lattice
            .clone()
            .unwrap_or_else(|| Lattice::integers(&self.field))
    }

    /// `coset <name> <lattice> + <scalar>`
    fn coset_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("a coset name")?;
        let (_, lname) = line.word("a lattice name")?;
        let lat = self.lattice(line, lname)?;
        line.keyword("+")?;
        let (os, text) = line.rest("a scalar")?;
        let off = self.scalar(line, os, text)?;
        let coset = Coset::new(&lat, &off).map_err(|e| line.invalid(e))?;
        self.define(line, ns, name)?;
        self.cosets.insert(name.to_string(), coset);
        Ok(())
    }

    /// `mode centered` or `mode centerless`; applies to later elements.
    fn mode_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (start, w) = line.word("`centered` or `centerless`")?;
        self.centerless = match w {
            "centered" => false,
            "centerless" => true,
            _ => return Err(line.error_at(start, "`centered` or `centerless`")),
        };
        line.end()
    }

    fn combination(&self, line: &Line, start: usize, text: &str) -> Result<Vec<(Scalar, Gen)>, SessionError> {
        parse_combination(&self.field, text).map_err(|e| line.scalar_error(start, e, "a linear combination"))
    }

    /// An element expression: a combination of `L[..]` and `c`, or `[A,B]`
    /// for the bracket of two named or inline elements.
    fn elem_expr(&self, line: &Line, start: usize, text: &str, lat: &Lattice) -> Result<AlgebraElement, SessionError> {
        if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let Some((a, b)) = inner.split_once(',') else {
                return Err(line.error_at(start + 1, "`[A, B]`"));
            };
            let a_start = start + 1 + (a.len() - a.trim_start().len());
            let b_start = start + 2 + a.len() + (b.len() - b.trim_start().len());
            let x = self.elem_arg(line, a_start, a.trim(), lat)?;
            let y = self.elem_arg(line, b_start, b.trim(), lat)?;
            return vir_core::vir::bracket(&x, &y).map_err(|e| line.invalid(e));
        }
        let terms = self.combination(line, start, text)?;
        AlgebraElement::from_terms(lat, self.centerless, terms).map_err(|e| line.invalid(e))
    }

    /// A named element or an inline expression.
    fn elem_arg(&self, line: &Line, start: usize, tok: &str, lat: &Lattice) -> Result<AlgebraElement, SessionError> {
        if is_ident(tok) && tok != "c" {
            return self.elems.get(tok).cloned().ok_or_else(|| Self::undefined(line, tok));
        }
        self.elem_expr(line, start, tok, lat)
    }

    fn elem_word(&self, line: &mut Line) -> Result<AlgebraElement, SessionError> {
        let (start, w) = line.word("an element")?;
        self.elem_arg(line, start, w, &self.current_lattice())
    }

    /// `elem <name> [over <lattice>] = <expr>`
    fn elem_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("an element name")?;
        let lat = if line.peek_word() == Some("over") {
            line.keyword("over")?;
            let (_, l) = line.word("a lattice name")?;
            self.lattice(line, l)?
        } else {
            self.current_lattice()
        };
        line.keyword("=")?;
        let (es, text) = line.rest("an element")?;
        let x = self.elem_expr(line, es, text, &lat)?;
        self.define(line, ns, name)?;
        self.elems.insert(name.to_string(), x);
        Ok(())
    }

    fn variant(line: &Line, start: usize, v: &str) -> Result<Variant, SessionError> {
        match v {
            "ns" => Ok(Variant::Ns),
            "tilde" => Ok(Variant::Tilde),
            _ => Err(line.error_at(start, "`ns` or `tilde`")),
        }
    }

    /// `salg <name> variant=<tilde|ns> over <lattice> coset <scalar>`
    fn salg_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("a superalgebra name")?;
        let opts = line.options(&["over"])?;
        let Some((_, vs, v)) = option(&opts, "variant") else {
            return Err(line.error_at(ns + name.len(), "`variant=`"));
        };
        let variant = Self::variant(line, *vs, v)?;
        line.keyword("over")?;
        let (_, lname) = line.word("a lattice name")?;
        let lat = self.lattice(line, lname)?;
        line.keyword("coset")?;
        let (as_, text) = line.rest("a scalar")?;
        let alpha = self.scalar(line, as_, text)?;
        let alg = SuperAlgebra::new(&lat, &alpha, variant).map_err(|e| line.invalid(e))?;
        self.define(line, ns, name)?;
        self.salgs.insert(name.to_string(), alg.clone());
        self.current_salg = Some(alg);
        Ok(())
    }

    fn current_salg(&self, line: &Line) -> Result<SuperAlgebra, SessionError> {
        self.current_salg
            .clone()
            .ok_or_else(|| line.invalid("no superalgebra declared"))
    }

    fn selem_expr(&self, line: &Line, start: usize, text: &str, alg: &SuperAlgebra) -> Result<SuperElement, SessionError> {
        self.combination(line, start, text)?;
        SuperElement::parse(alg, text).map_err(|e| line.invalid(e))
    }

    fn selem_arg(&self, line: &Line, start: usize, tok: &str, alg: &SuperAlgebra) -> Result<SuperElement, SessionError> {
        if is_ident(tok) && tok != "c" {
            return self.selems.get(tok).cloned().ok_or_else(|| Self::undefined(line, tok));
        }
        self.selem_expr(line, start, tok, alg)
    }

    /// `selem <name> [over <salg>] = <expr>`
    fn selem_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("an element name")?;
        let alg = if line.peek_word() == Some("over") {
            line.keyword("over")?;
            let (_, s) = line.word("a superalgebra name")?;
            self.salgs.get(s).cloned().ok_or_else(|| Self::undefined(line, s))?
        } else {
            self.current_salg(line)?
        };
        line.keyword("=")?;
        let (es, text) = line.rest("an element")?;
        let x = self.selem_expr(line, es, text, &alg)?;
        self.define(line, ns, name)?;
        self.selems.insert(name.to_string(), x);
        Ok(())
    }

    /// `module <name> <family> [a=..] [b=..] [over <lattice|salg>]`
    fn module_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        const FAMILIES: &str = "a family (Aab, Aa, Ba, Aprime, Line, PrimeLine, SAab, SAa, SBa)";
        let (ns, name) = line.word("a module name")?;
        let (ks, kind) = line.word(FAMILIES)?;
        let opts = line.options(&["over"])?;
        let over = if line.peek_word() == Some("over") {
            line.keyword("over")?;
            Some(line.word("a lattice or superalgebra name")?.1)
        } else {
            None
        };
        line.end()?;
        let param = |key: &str| -> Result<Scalar, SessionError> {
            match option(&opts, key) {
                Some((_, vs, v)) => self.scalar(line, *vs, v),
                None => Err(line.invalid(format!("{kind} needs `{key}=`"))),
            }
        };
        let superkind = match kind {
            "SAab" => Some(SuperKind::SAab),
            "SAa" => Some(SuperKind::SAa),
            "SBa" => Some(SuperKind::SBa),
            _ => None,
        };
        let module = if let Some(sk) = superkind {
            let alg = match over {
                Some(s) => self.salgs.get(s).cloned().ok_or_else(|| Self::undefined(line, s))?,
                None => self.current_salg(line)?,
            };
            let b = if sk == SuperKind::SAab { param("b")? } else { self.field.zero() };
            Module::Super(SuperFamily::new(sk, &alg, param("a")?, b).map_err(|e| line.invalid(e))?)
        } else {
            let lat = match over {
                Some(l) => self.lattice(line, l)?,
                None => self.current_lattice(),
            };
            Module::Plain(match kind {
                "Aab" => ModuleFamily::aab(&lat, param("a")?, param("b")?),
                "Aa" => ModuleFamily::aa(&lat, param("a")?),
                "Ba" => ModuleFamily::ba(&lat, param("a")?),
                "Aprime" => {
                    ModuleFamily::aab_prime(&lat, param("a")?, param("b")?).map_err(|e| line.invalid(e))?
                }
                "Line" => ModuleFamily::trivial_line(&lat),
                "PrimeLine" => ModuleFamily::prime_plus_line(&lat),
                _ => return Err(line.error_at(ks, FAMILIES)),
            })
        };
        self.define(line, ns, name)?;
        self.modules.insert(name.to_string(), module);
        Ok(())
    }

    fn load_table(&self, line: &Line, path: &str) -> Result<ActionTable, SessionError> {
        let text = std::fs::read_to_string(self.base_dir.join(path))
            .map_err(|e| line.invalid(format!("cannot read {path}: {e}")))?;
        parse_table(&text).map_err(|e| line.invalid(format!("{path}: {e}")))
    }

    /// `table <name> = <path>`
    fn table_decl(&mut self, line: &mut Line) -> Result<(), SessionError> {
        let (ns, name) = line.word("a table name")?;
        line.keyword("=")?;
        let (_, path) = line.rest("a file path")?;
        let t = self.load_table(line, path)?;
        self.define(line, ns, name)?;
        self.tables.insert(name.to_string(), t);
        Ok(())
    }

    fn module(&self, line: &mut Line) -> Result<Module, SessionError> {
        let (_, name) = line.word("a module name")?;
        self.modules.get(name).cloned().ok_or_else(|| Self::undefined(line, name))
    }

    fn plain_module(&self, line: &mut Line) -> Result<ModuleFamily, SessionError> {
        match self.module(line)? {
            Module::Plain(m) => Ok(m),
            Module::Super(_) => Err(line.invalid("expected a Vir module, found a super module")),
        }
    }

    fn int_option(line: &Line, opts: &[(String, usize, String)], key: &str) -> Result<i64, SessionError> {
        match option(opts, key) {
            Some((_, vs, v)) => v.parse().map_err(|_| line.error_at(*vs, "an integer")),
            None => Err(line.invalid(format!("missing `{key}=`"))),
        }
    }

    fn command(&mut self, kw: &str, start: usize, line: &mut Line) -> Result<Command, SessionError> {
        let cmd = match kw {
            "bracket" => Command::Bracket(self.elem_word(line)?, self.elem_word(line)?),
            "jacobi" if line.peek_word().is_some_and(|w| w.starts_with("--")) => {
                let mut samples = None;
                let mut seed = None;
                while let Some(flag) = line.peek_word() {
                    match flag {
                        "--samples" => {
                            line.word("--samples")?;
                            samples = Some(self.int_word::<usize>(line, "a sample count")?);
                        }
                        "--seed" => {
                            line.word("--seed")?;
                            seed = Some(self.int_word::<u64>(line, "a seed")?);
                        }
                        _ => break,
                    }
                }
                let lattice = if line.peek_word() == Some("over") {
                    line.keyword("over")?;
                    let (_, l) = line.word("a lattice name")?;
                    self.lattice(line, l)?
                } else {
                    self.current_lattice()
                };
                let (Some(samples), Some(seed)) = (samples, seed) else {
                    return Err(line.invalid("jacobi sweeps need both --samples and --seed"));
                };
                Command::JacobiSweep {
                    lattice,
                    centerless: self.centerless,
                    samples,
                    seed,
                }
            }
            "jacobi" => Command::Jacobi(self.elem_word(line)?, self.elem_word(line)?, self.elem_word(line)?),
            "span" => {
                let target = self.elem_word(line)?;
                let mut basis = vec![self.elem_word(line)?];
                while !line.at_end() {
                    basis.push(self.elem_word(line)?);
                }
                Command::Span { target, basis }
            }
            "expad" => {
                let alpha = self.scalar_word(line, "a scalar alpha")?;
                let x = self.scalar_word(line, "a degree x")?;
                let (es, text) = line.rest("an element")?;
                let elem = self.elem_arg(line, es, text, &self.current_lattice())?;
                Command::Expad { alpha, x, elem }
            }
            "pair2" => {
                let x = self.scalar_word(line, "a degree x")?;
                let alpha = self.scalar_word(line, "a scalar alpha")?;
                let n = self.int_word::<u32>(line, "a positive integer n")?;
                Command::Pair2 {
                    lattice: self.current_lattice(),
                    x,
                    alpha,
                    n,
                }
            }
            "closure" => {
                let (cs, w) = line.word("`cap=<k>`")?;
                let cap = w
                    .strip_prefix("cap=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| line.error_at(cs, "`cap=<k>`"))?;
                let mut gens = vec![self.elem_word(line)?];
                while !line.at_end() {
                    gens.push(self.elem_word(line)?);
                }
                Command::Closure { cap, gens }
            }
            "act" => match self.module(line)? {
                Module::Plain(m) => {
                    let (xs, xt) = line.word("an element")?;
                    let x = self.elem_arg(line, xs, xt, m.lattice())?;
                    let (vs, vt) = line.rest("a vector")?;
                    self.combination(line, vs, vt)?;
                    let v = m.parse_vector(vt).map_err(|e| line.invalid(e))?;
                    Command::Act(m, x, v)
                }
                Module::Super(m) => {
                    let (xs, xt) = line.word("an element")?;
                    let x = self.selem_arg(line, xs, xt, m.algebra())?;
                    let (vs, vt) = line.rest("a vector")?;
                    self.combination(line, vs, vt)?;
                    let v = m.parse_vector(vt).map_err(|e| line.invalid(e))?;
                    Command::SAct(m, x, v)
                }
            },
            "iso" => {
                let src = self.plain_module(line)?;
                let dst = self.plain_module(line)?;
                let opts = line.options(&[])?;
                let radius = Self::int_option(line, &opts, "window")?;
                if radius < 1 {
                    return Err(line.invalid("window must be positive"));
                }
                Command::Iso { src, dst, radius }
            }
            "restrict" => {
                let module = self.plain_module(line)?;
                let (_, l) = line.word("a sublattice name")?;
                let sub = self.lattice(line, l)?;
                let opts = line.options(&[])?;
                let offset = match option(&opts, "offset") {
                    Some((_, vs, v)) => self.scalar(line, *vs, v)?,
                    None => return Err(line.invalid("missing `offset=`")),
                };
                Command::Restrict { module, sub, offset }
            }
            "substructure" => Command::Substructure(self.plain_module(line)?),
            "sbracket" => {
                let alg = self.current_salg(line)?;
                let (xs, xt) = line.word("an element")?;
                let x = self.selem_arg(line, xs, xt, &alg)?;
                let (ys, yt) = line.word("an element")?;
                let y = self.selem_arg(line, ys, yt, &alg)?;
                Command::Sbracket(x, y)
            }
            "extcheck" => {
                let base = self.current_salg(line)?;
                let opts = line.options(&[])?;
                let variant = match option(&opts, "variant") {
                    Some((_, vs, v)) => Self::variant(line, *vs, v)?,
                    None => base.variant(),
                };
                let radius = Self::int_option(line, &opts, "window")?;
                if radius < 1 {
                    return Err(line.invalid("window must be positive"));
                }
                let perturb = match option(&opts, "perturb") {
                    Some((_, vs, v)) => Some(self.scalar(line, *vs, v)?),
                    None => None,
                };
                let alg = SuperAlgebra::new(base.lattice(), base.coset().offset(), variant)
                    .map_err(|e| line.invalid(e))?;
                Command::Extcheck { alg, radius, perturb }
            }
            "classify" => {
                let (_, arg) = line.rest("a table name or file")?;
                match self.tables.get(arg) {
                    Some(t) => Command::Classify(t.clone()),
                    None => Command::Classify(self.load_table(line, arg)?),
                }
            }
            _ => return Err(line.error_at(start, "a declaration or command")),
        };
        line.end()?;
        Ok(cmd)
    }
}
