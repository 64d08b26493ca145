//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};

use vir_core::lattice::{span_rank, Lattice};
use vir_core::modules::{intertwiner, IsoResult, ModuleFamily, NonIsoCertificate};
use vir_core::scalar::Scalar;
use vir_core::subalgebra::{closure, span_membership, two_dim_pair, ClosureStatus, DEFAULT_CLOSURE_CAP};
use vir_core::suites::{integers, run_suite, z_sqrt2, SuiteReport};
use vir_core::vir::{bracket, AlgebraElement};

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn from_checks(failures: Vec<String>, checks: usize) -> Self {
        Outcome {
            pass: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("{checks} checks")
            } else {
                let first = failures[0].split(" on (").next().unwrap_or_default();
                format!("{} of {checks} checks failed; first: {first}", failures.len())
            },
        }
    }
}

fn suite(name: &str, samples: usize) -> SuiteReport {
    run_suite(name, SEED, samples).expect("known suite")
}

fn suite_outcome(r: SuiteReport) -> Outcome {
    let mut o = Outcome::from_checks(r.failures.clone(), r.checks);
    o.detail = format!("suite {} seed={} samples={}: {}", r.suite, r.seed, r.samples, o.detail);
    for n in r.notes.iter().filter(|n| n.contains("not preserved")) {
        o.detail.push_str(&format!("; {n}"));
    }
    o
}

fn l(lat: &Lattice, mu: &Scalar) -> AlgebraElement {
    AlgebraElement::l(lat, mu, true).unwrap()
}

fn elem(lat: &Lattice, terms: &[(&str, &str)]) -> AlgebraElement {
    let f = lat.field();
    let mut x = AlgebraElement::zero(lat, true);
    for (k, mu) in terms {
        x.add_l(&f.parse(mu).unwrap(), f.parse(k).unwrap()).unwrap();
    }
    x
}

fn criterion1() -> Outcome {
    suite_outcome(suite("lie", 500))
}

/// [X, Y] expanded term by term:
///   [3/16 L0, 1/16 L-1]  = -3/256 L-1     [3/16 L0, 1/256 L-2] = -3/2048 L-2
///   [L1, 3/16 L0]        = -3/16 L1       [L1, 1/16 L-1]       = -1/8 L0
///   [L1, 1/256 L-2]      = -3/256 L-1     [L2, 3/16 L0]        = -3/8 L2
///   [L2, 1/16 L-1]       = -3/16 L1       [L2, 1/256 L-2]      = -1/64 L0
fn criterion2() -> Outcome {
    let lat = integers();
    let f = lat.field().clone();
    let x = elem(&lat, &[("3/16", "0"), ("1", "1"), ("1", "2")]);
    let y = elem(&lat, &[("3/16", "0"), ("1/16", "-1"), ("1/256", "-2")]);
    let hand = elem(
        &lat,
        &[("-3/2048", "-2"), ("-3/128", "-1"), ("-9/64", "0"), ("-3/8", "1"), ("-3/8", "2")],
    );
    let k = f.from_ratio(-3, 8);
    let combo = x.scale(&k).add(&y.scale(&k)).unwrap();
    let got = bracket(&x, &y).unwrap();
    let span = span_membership(&got, &[x.clone(), y.clone()]);
    let mut failures = Vec::new();
    if got != hand {
        failures.push(format!("[X,Y] = {got}, hand expansion {hand}"));
    }
    if got != combo {
        failures.push(format!("[X,Y] = {got} differs from -3/8 X - 3/8 Y = {combo}"));
    }
    if span != Some(vec![k.clone(), k]) {
        failures.push(format!("span coordinates {span:?}"));
    }
    let mut o = Outcome::from_checks(failures, 3);
    if o.pass {
        o.detail = format!("[X, Y] = {got} = -3/8*X - 3/8*Y");
    }
    o
}

/// `exp(α ad L_{-x}) L_{nx}` by repeated brackets.
fn conjugate(lat: &Lattice, alpha: &Scalar, x: &Scalar, target: AlgebraElement) -> AlgebraElement {
    let f = lat.field();
    let lower = l(lat, &-x);
    let mut term = target;
    let mut sum = term.clone();
    let mut k = 1i64;
    while !term.is_zero() {
        term = bracket(&lower, &term).unwrap().scale(&alpha.checked_div(&f.from_int(k)).unwrap());
        sum = sum.add(&term).unwrap();
        k += 1;
    }
    sum
}

fn criterion3() -> Outcome {
    let lat = z_sqrt2();
    let f = lat.field().clone();
    let mut failures = Vec::new();
    let mut checks = 0;
    for xs in ["1", "2", "t", "1 + t"] {
        for al in ["1", "1/2", "-2", "t"] {
            for n in 1..=3u32 {
                let (x, alpha) = (f.parse(xs).unwrap(), f.parse(al).unwrap());
                let tag = format!("(x={xs}, alpha={al}, n={n})");
                let p = match two_dim_pair(&lat, &x, &alpha, n) {
                    Ok(p) => p,
                    Err(e) => {
                        failures.push(format!("{tag}: {e}"));
                        continue;
                    }
                };
                let nx = &f.from_int(n as i64) * &x;
                let big_x = l(&lat, &f.zero()).add(&l(&lat, &-&x).scale(&(&alpha * &x))).unwrap();
                let big_y = conjugate(&lat, &alpha, &x, l(&lat, &nx));
                checks += 4;
                if p.x != big_x || p.y != big_y {
                    failures.push(format!("{tag}: pair ({}, {}) vs ({big_x}, {big_y})", p.x, p.y));
                }
                if bracket(&big_x, &big_y).unwrap() != big_y.scale(&nx) {
                    failures.push(format!("{tag}: [X, Y] != nx*Y"));
                }
                let r = closure(&[big_x, big_y], DEFAULT_CLOSURE_CAP).unwrap();
                if r.status != ClosureStatus::Closed || r.dim != 2 {
                    failures.push(format!("{tag}: closure {:?} dim {}", r.status, r.dim));
                }
                if p.eigen != nx {
                    failures.push(format!("{tag}: eigenvalue {}", p.eigen));
                }
            }
        }
    }
    // The unconjugated X = L_0 + alpha L_{-x} at (2, 1, 1).
    let q = integers();
    let g = q.field().clone();
    let literal = l(&q, &g.zero()).add(&l(&q, &g.from_int(-2))).unwrap();
    let y = conjugate(&q, &g.one(), &g.from_int(2), l(&q, &g.from_int(2)));
    let br = bracket(&literal, &y).unwrap();
    checks += 1;
    if span_membership(&br, &[literal.clone(), y.clone()]).is_some() {
        failures.push(format!("literal X = {literal}: [X, Y] = {br} lies in span{{X, Y}}"));
    }
    let mut o = Outcome::from_checks(failures, checks);
    if o.pass {
        o.detail = format!("48 grid pairs verified; literal X = {literal} gives [X, Y] = {br}, outside span{{X, Y}}");
    }
    o
}

fn criterion4() -> Outcome {
    let lat = z_sqrt2();
    let f = lat.field().clone();
    let mut failures = Vec::new();
    let mut checks = 0;
    for ns in ["1", "2", "t"] {
        let n = f.parse(ns).unwrap();
        let r = closure(&[l(&lat, &-&n), l(&lat, &f.zero()), l(&lat, &n)], DEFAULT_CLOSURE_CAP).unwrap();
        checks += 1;
        if r.status != ClosureStatus::Closed || r.dim != 3 {
            failures.push(format!("n={ns}: {:?} dim {}", r.status, r.dim));
        }
    }
    let mut dim2 = 0;
    for xs in ["1", "2", "t", "1 + t"] {
        for al in ["1", "1/2", "-2", "t"] {
            for n in 1..=3 {
                let p = two_dim_pair(&lat, &f.parse(xs).unwrap(), &f.parse(al).unwrap(), n).unwrap();
                let r = closure(&[p.x, p.y], DEFAULT_CLOSURE_CAP).unwrap();
                if r.status == ClosureStatus::Closed && r.dim == 2 {
                    dim2 += 1;
                    checks += 1;
                    let supp: Vec<Scalar> = r.basis.iter().flat_map(|e| e.support()).collect();
                    if span_rank(&f, &supp) != 1 {
                        failures.push(format!("x={xs} alpha={al} n={n}: support rank {}", span_rank(&f, &supp)));
                    }
                }
            }
        }
    }
    let r = suite("closure", 100);
    checks += r.checks;
    failures.extend(r.failures);
    let mut o = Outcome::from_checks(failures, checks);
    if o.pass {
        o.detail = format!("3 sl2 closures of dim 3; {dim2} grid closures of dim 2 with rank-1 support; closure suite seed={SEED} samples=100");
    }
    o
}

fn criterion5() -> Outcome {
    suite_outcome(suite("automorphism", 200))
}

fn criterion6() -> Outcome {
    suite_outcome(suite("modules", 500))
}

fn criterion7() -> Outcome {
    let r = suite("isomorphisms", 5);
    let mut failures = r.failures.clone();
    let q = integers();
    let f = q.field().clone();
    let win = q.window(4);
    let a02 = ModuleFamily::aab(&q, f.zero(), f.from_int(2));
    let a03 = ModuleFamily::aab(&q, f.zero(), f.from_int(3));
    match intertwiner(&a02, &a03, &win) {
        IsoResult::NotIsomorphic(
            NonIsoCertificate::Inconsistent { .. } | NonIsoCertificate::Singular { .. },
        ) => {}
        other => failures.push(format!("A(0,2) vs A(0,3): {other:?}")),
    }
    let a = ModuleFamily::aab(&q, f.from_ratio(1, 2), f.zero());
    match intertwiner(&a, &ModuleFamily::ba(&q, f.zero()), &win) {
        IsoResult::NotIsomorphic(NonIsoCertificate::WeightMismatch { .. }) => {}
        other => failures.push(format!("A(1/2,0) vs B(0): {other:?}")),
    }
    let mut o = Outcome::from_checks(failures, r.checks + 2);
    o.detail = format!("suite isomorphisms seed={SEED} samples=5, windows of 9 points: {}", o.detail);
    o
}

fn criterion8() -> Outcome {
    suite_outcome(suite("super", 500))
}

fn criterion9() -> Outcome {
    suite_outcome(suite("classifier", 50))
}

fn criterion10() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".vir"))
        .collect();
    names.sort();
    let run = |name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_vir")).args(["run", name]).current_dir(&dir).output().unwrap();
        String::from_utf8(out.stdout).unwrap()
    };
    let mut failures = Vec::new();
    let mut sources = String::new();
    for name in &names {
        sources.push_str(&std::fs::read_to_string(dir.join(name)).unwrap());
        let expected = std::fs::read_to_string(dir.join(name.replace(".vir", ".out"))).unwrap_or_default();
        let (first, second) = (run(name), run(name));
        if first != expected {
            failures.push(format!("{name}: output differs from golden file"));
        }
        if first != second {
            failures.push(format!("{name}: two runs differ"));
        }
    }
    if names.len() < 10 {
        failures.push(format!("only {} session files", names.len()));
    }
    let commands = [
        "bracket", "jacobi", "expad", "pair2", "closure", "act", "iso", "restrict", "sbracket", "extcheck",
        "classify",
    ];
    for cmd in commands {
        if !sources.lines().any(|line| line.starts_with(&format!("{cmd} "))) {
            failures.push(format!("no session uses `{cmd}`"));
        }
    }
    let mut o = Outcome::from_checks(failures, 2 * names.len() + commands.len() + 1);
    if o.pass {
        o.detail = format!("{} session files byte-exact and repeatable", names.len());
    }
    o
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
    ];
    let mut all = true;
    for (n, check) in criteria {
        let o = check();
        all &= o.pass;
        println!("criterion {n}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
