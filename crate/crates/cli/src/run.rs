//! Executes parsed sessions and renders canonical output.

use std::fmt::Write as _;

use vir_core::classify::{classify, ActionTable, Verdict};
use vir_core::modules::{
    act, intertwiner, restrict, substructure, verify_intertwiner, ClosedForm, IsoResult,
};
use vir_core::sample::Sampler;
use vir_core::scalar::Scalar;
use vir_core::subalgebra::{closure, exp_ad_lowering, span_membership, two_dim_pair, ClosureStatus};
use vir_core::svir::{extension_check, sact, sbracket, ExtensionData, Sector};
use vir_core::lattice::span_rank;
use vir_core::vir::{bracket, jacobi_residual};

use crate::session::{Command, Session};

/// Rendered output; `ok` is false when a command reported a violation, a
/// `NoMatch` verdict, or a runtime error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub text: String,
    pub ok: bool,
}

/// Result lines of one command and whether it reported a violation.
struct Block {
    lines: Vec<String>,
    violation: bool,
}

impl Block {
    fn new() -> Self {
        Block { lines: Vec::new(), violation: false }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

pub fn run_session(session: &Session) -> RunOutput {
    let mut text = String::new();
    let mut ok = true;
    for (stmt, cmd) in session.commands() {
        writeln!(text, "> {}", stmt.text).unwrap();
        match execute(cmd) {
            Ok(block) => {
                ok &= !block.violation;
                for l in block.lines {
                    writeln!(text, "{l}").unwrap();
                }
            }
            Err(msg) => {
                ok = false;
                writeln!(text, "error: line {}: {msg}", stmt.line).unwrap();
            }
        }
    }
    RunOutput { text, ok }
}

/// Scalars printed as factors: parenthesized unless a single monomial.
fn factor(s: &Scalar) -> String {
    let t = s.to_string();
    if t.contains(' ') {
        format!("({t})")
    } else {
        t
    }
}

/// A coefficient prefix: empty for 1, `-` for -1, otherwise `k*`.
fn prefix(s: &Scalar) -> String {
    match factor(s).as_str() {
        "1" => String::new(),
        "-1" => "-".into(),
        t => format!("{t}*"),
    }
}

fn execute(cmd: &Command) -> Result<Block, String> {
    let mut b = Block::new();
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match cmd {
        Command::Bracket(x, y) => b.line(bracket(x, y).map_err(|e| err(&e))?.to_string()),
        Command::Jacobi(x, y, z) => {
            let r = jacobi_residual(x, y, z).map_err(|e| err(&e))?;
            b.violation = !r.is_zero();
            b.line(format!("residual: {r}"));
        }
        Command::JacobiSweep { lattice, centerless, samples, seed } => {
            let mut s = Sampler::new(*seed);
            let mut bad = None;
            for i in 0..*samples {
                let x = s.element(lattice, *centerless, 3);
                let y = s.element(lattice, *centerless, 3);
                let z = s.element(lattice, *centerless, 3);
                let r = jacobi_residual(&x, &y, &z).map_err(|e| err(&e))?;
                if !r.is_zero() && bad.is_none() {
                    bad = Some(format!("sample {i}: residual {r} on ({x}, {y}, {z})"));
                }
            }
            b.line(format!("samples: {samples}"));
            match bad {
                None => b.line("residual: 0"),
                Some(m) => {
                    b.violation = true;
                    b.line(format!("violation: {m}"));
                }
            }
        }
        Command::Span { target, basis } => match span_membership(target, basis) {
            Some(c) => {
                let parts: Vec<String> = c.iter().map(|k| k.to_string()).collect();
                b.line(format!("in-span: ({})", parts.join(", ")));
            }
            None => b.line("in-span: no"),
        },
        Command::Expad { alpha, x, elem } => {
            b.line(exp_ad_lowering(alpha, x, elem).map_err(|e| err(&e))?.to_string())
        }
        Command::Pair2 { lattice, x, alpha, n } => {
            let p = two_dim_pair(lattice, x, alpha, *n).map_err(|e| err(&e))?;
            b.line(format!("X = {}", p.x));
            b.line(format!("Y = {}", p.y));
            b.line(format!("[X, Y] = {}Y", prefix(&p.eigen)));
        }
        Command::Closure { cap, gens } => {
            let r = closure(gens, *cap).map_err(|e| err(&e))?;
            let status = match r.status {
                ClosureStatus::Closed => "Closed",
                ClosureStatus::CapExceeded => "CapExceeded",
            };
            b.line(format!("status: {status}"));
            b.line(format!("dim: {}", r.dim));
            for (i, e) in r.basis.iter().enumerate() {
                b.line(format!("  b{} = {e}", i + 1));
            }
            if r.status == ClosureStatus::Closed {
                let mut degrees: Vec<Scalar> =
                    r.basis.iter().flat_map(|e| e.lterms().keys().cloned()).collect();
                degrees.sort();
                degrees.dedup();
                let f = gens[0].lattice().field();
                b.line(format!("support rank: {}", span_rank(f, &degrees)));
            }
        }
        Command::Act(m, x, v) => b.line(act(m, x, v).map_err(|e| err(&e))?.to_string()),
        Command::SAct(m, x, v) => b.line(sact(m, x, v).map_err(|e| err(&e))?.to_string()),
        Command::Iso { src, dst, radius } => {
            let window = src.lattice().window(*radius);
            match intertwiner(src, dst, &window) {
                IsoResult::Map(map) => {
                    let verified = verify_intertwiner(src, dst, &map).map_err(|e| err(&e))?;
                    b.violation = !verified;
                    b.line("isomorphic: yes");
                    b.line(format!("shift: {}", map.shift));
                    let off = src.offset();
                    let weight = if off.is_zero() { "nu".to_string() } else { format!("({off} + nu)") };
                    match &map.closed_form {
                        ClosedForm::Constant(k) => b.line(format!("map: v[nu] -> {}v'[nu + shift]", prefix(k))),
                        ClosedForm::Weight(k) => {
                            b.line(format!("map: v[nu] -> {}{weight}*v'[nu + shift]", prefix(k)))
                        }
                        ClosedForm::InverseWeight(k) => {
                            let k = factor(k);
                            let k = if k.contains('/') && !k.starts_with('(') { format!("({k})") } else { k };
                            b.line(format!("map: v[nu] -> {k}/{weight}*v'[nu + shift]"))
                        }
                        ClosedForm::Tabulated => {
                            b.line("map: tabulated");
                            for (nu, d) in &map.entries {
                                b.line(format!("  v[{nu}] -> {}v'[{}]", prefix(d), nu + &map.shift));
                            }
                        }
                    }
                    b.line(format!("verified: {} on {} basis vectors", if verified { "yes" } else { "no" }, map.entries.len()));
                }
                IsoResult::NotIsomorphic(c) => {
                    b.line("isomorphic: no");
                    b.line(format!("certificate: {c}"));
                }
            }
        }
        Command::Restrict { module, sub, offset } => {
            b.line(format!("restricted: {}", restrict(module, sub, offset).map_err(|e| err(&e))?))
        }
        Command::Substructure(m) => {
            let subs = substructure(m);
            if subs.is_empty() {
                b.line("submodules: none");
            } else {
                b.line(format!("submodules: {}", subs.len()));
                for s in subs {
                    b.line(format!("  {s}"));
                }
            }
        }
        Command::Sbracket(x, y) => b.line(sbracket(x, y).map_err(|e| err(&e))?.to_string()),
        Command::Extcheck { alg, radius, perturb } => {
            let mut data = ExtensionData::canonical(alg, 2 * radius);
            if let Some(p) = perturb {
                let f = alg.lattice().field();
                let y = data
                    .ytable
                    .get_mut(p)
                    .ok_or_else(|| format!("perturbation point {p} is outside the data"))?;
                *y = &*y + &f.one();
                b.line(format!("perturbed: y[{p}] + 1"));
            }
            let window = alg.coset().window(*radius);
            let lambdas = alg.lattice().window(*radius);
            let v = extension_check(&data, &window, &lambdas).map_err(|e| err(&e))?;
            b.line(format!(
                "checked: {} on {} coset points, {} even degrees",
                alg.variant().name(),
                window.len(),
                lambdas.len()
            ));
            b.line(format!("violations: {}", v.len()));
            for x in v.iter().take(5) {
                b.line(format!("  {x}"));
            }
            if v.len() > 5 {
                b.line(format!("  ... {} more", v.len() - 5));
            }
            b.violation = !v.is_empty();
        }
        Command::Classify(t) => {
            let (lines, matched) = classify_lines(t)?;
            b.lines = lines;
            b.violation = !matched;
        }
    }
    Ok(b)
}

/// The `classify` report: verdict, then the gauge (or the rejections when
/// nothing matched).
pub fn classify_lines(table: &ActionTable) -> Result<(Vec<String>, bool), String> {
    let r = classify(table).map_err(|e| e.to_string())?;
    let mut out = vec![format!("verdict: {}", r.verdict)];
    if r.verdict == Verdict::NoMatch {
        for (k, why) in &r.rejections {
            out.push(format!("  {}: {why}", k.name()));
        }
        return Ok((out, false));
    }
    if r.gauge.values().all(|g| g.is_one()) {
        out.push("gauge: identity".into());
    } else {
        out.push("gauge:".into());
        for ((sector, i), g) in &r.gauge {
            let s = match sector {
                Sector::V => "v",
                Sector::W => "w",
            };
            out.push(format!("  {s}[{i}] -> {g}"));
        }
    }
    Ok((out, true))
}
