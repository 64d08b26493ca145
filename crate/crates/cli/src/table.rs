//! Table files: optional `field` and `lattice` declarations, the header
//! `table over <lattice> offset <scalar> [alpha <scalar>]`, then one row per
//! coefficient. Indices are positions in `M` (or `α + M`); the weight of
//! `v[ν]` is `offset + ν`.
//!
//! ```text
//! f <mu> <nu> <value>                     L_mu v[nu] = value v[mu + nu]
//! f L <mu> v|w <nu> <value>               super tables, even generator
//! f G <mu> v|w <nu> <value>               super tables, odd generator
//! ```
//!
//! Degrees and indices are single words (`1+t`, not `1 + t`); the value
//! takes the rest of the line.

use std::fmt::Write as _;
use std::path::Path;

use vir_core::classify::{ActionTable, EntryKey};
use vir_core::scalar::{FieldKind, Scalar};
use vir_core::svir::Sector;

use crate::session::{Env, Line, SessionError};

pub fn parse_table(text: &str) -> Result<ActionTable, SessionError> {
    let mut env = Env::new(Path::new("."));
    let mut table: Option<ActionTable> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let mut line = Line::new(i + 1, raw);
        last = i + 1;
        if line.is_blank() {
            continue;
        }
        let (start, kw) = line.word("`field`, `lattice`, `table` or `f`")?;
        match (kw, &mut table) {
            ("field", None) => env.field_decl(&mut line)?,
            ("lattice", None) => env.lattice_decl(&mut line)?,
            ("table", None) => {
                line.keyword("over")?;
                let (_, lname) = line.word("a lattice name")?;
                let lat = env.lattice(&line, lname)?;
                line.keyword("offset")?;
                let offset = scalar_word(&env, &mut line, "an offset")?;
                table = Some(if line.peek_word() == Some("alpha") {
                    line.keyword("alpha")?;
                    let alpha = scalar_word(&env, &mut line, "a coset offset")?;
                    ActionTable::new_super(&lat, offset, alpha)
                } else {
                    ActionTable::new(&lat, offset)
                });
                line.end()?;
            }
            ("f", Some(t)) => {
                let (key, value) = row(&env, &mut line, t.is_super())?;
                if t.entries.contains_key(&key) {
                    return Err(line.invalid(format!("duplicate entry {key}")));
                }
                t.insert(key, value);
            }
            ("f", None) => return Err(line.invalid("row before the `table` header")),
            _ => return Err(line.error_at(start, "`field`, `lattice`, `table` or `f`")),
        }
    }
    table.ok_or_else(|| SessionError::Invalid {
        line: last,
        msg: "missing `table over <lattice> offset <scalar>` header".into(),
    })
}

fn scalar_word(env: &Env, line: &mut Line, what: &str) -> Result<Scalar, SessionError> {
    let (start, w) = line.word(what)?;
    env.scalar(line, start, w)
}

fn row(env: &Env, line: &mut Line, is_super: bool) -> Result<(EntryKey, Scalar), SessionError> {
    let mut odd = false;
    let mut sector = Sector::V;
    if is_super {
        let (s, op) = line.word("`L` or `G`")?;
        odd = match op {
            "L" => false,
            "G" => true,
            _ => return Err(line.error_at(s, "`L` or `G`")),
        };
    }
    let degree = scalar_word(env, line, "a degree")?;
    if is_super {
        let (s, sec) = line.word("`v` or `w`")?;
        sector = match sec {
            "v" => Sector::V,
            "w" => Sector::W,
            _ => return Err(line.error_at(s, "`v` or `w`")),
        };
    }
    let index = scalar_word(env, line, "an index")?;
    let (vs, vt) = line.rest("a value")?;
    let value = env.scalar(line, vs, vt)?;
    Ok((EntryKey { odd, degree, sector, index }, value))
}

fn compact(s: &Scalar) -> String {
    s.to_string().replace(' ', "")
}

/// Renders a table in the format read by [`parse_table`].
pub fn format_table(table: &ActionTable) -> String {
    let mut out = String::new();
    let lat = &table.lattice;
    let f = lat.field();
    if f.kind() == FieldKind::Extension {
        writeln!(out, "field Q(t) minpoly {}", format_poly(f.minpoly())).unwrap();
    }
    let gens: Vec<String> = lat.zbasis().iter().map(|g| g.to_string()).collect();
    writeln!(out, "lattice M gens {}", gens.join(", ")).unwrap();
    write!(out, "table over M offset {}", compact(&table.offset)).unwrap();
    if let Some(a) = &table.alpha {
        write!(out, " alpha {}", compact(a)).unwrap();
    }
    out.push('\n');
    for (e, v) in &table.entries {
        if table.is_super() {
            let op = if e.odd { "G" } else { "L" };
            let sec = match e.sector {
                Sector::V => "v",
                Sector::W => "w",
            };
            writeln!(out, "f {op} {} {sec} {} {v}", compact(&e.degree), compact(&e.index)).unwrap();
        } else {
            writeln!(out, "f {} {} {v}", compact(&e.degree), compact(&e.index)).unwrap();
        }
    }
    out
}

/// `t^2 - 2` style, descending powers.
fn format_poly<T: std::fmt::Display>(coeffs: &[T]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        let c = c.to_string();
        if c == "0" {
            continue;
        }
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, c),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let power = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{k}"),
        };
        match (mag.as_str(), k) {
            (m, 0) => out.push_str(m),
            ("1", _) => out.push_str(&power),
            (m, _) => write!(out, "{m}*{power}").unwrap(),
        }
    }
    out
}
