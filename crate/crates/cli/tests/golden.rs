//! Byte-exact golden outputs of `vir run` and `vir classify`.

use std::path::{Path, PathBuf};
use std::process::Command;

const SESSIONS: [(&str, i32); 16] = [
    ("01_example", 0),
    ("02_jacobi", 0),
    ("03_sqrt2", 0),
    ("04_lowering", 0),
    ("05_closure", 0),
    ("06_modules", 0),
    ("07_iso", 0),
    ("08_restrict", 0),
    ("09_super", 0),
    ("10_extcheck", 1),
    ("11_classify", 1),
    ("12_undefined", 2),
    ("13_redefined", 2),
    ("14_parse_error", 2),
    ("15_t_over_q", 2),
    ("16_runtime_error", 1),
];

const TABLES: [(&str, i32); 2] = [("rank2_scrambled", 0), ("nomatch", 1)];

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn vir(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_vir"))
        .args(args)
        .current_dir(dir())
        .output()
        .expect("vir runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn expected(name: &str) -> String {
    std::fs::read_to_string(dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn sessions_match_golden_output() {
    let mut failed = Vec::new();
    for (name, code) in SESSIONS {
        let (text, status) = vir(&["run", &format!("{name}.vir")]);
        if text != expected(&format!("{name}.out")) || status != code {
            failed.push(format!("{name} (exit {status})\n{text}"));
        }
    }
    assert!(failed.is_empty(), "mismatched sessions:\n{}", failed.join("\n"));
}

#[test]
fn table_classification_matches_golden_output() {
    for (name, code) in TABLES {
        let (text, status) = vir(&["classify", &format!("{name}.tbl")]);
        assert_eq!(text, expected(&format!("{name}.classify.out")), "{name}");
        assert_eq!(status, code, "{name}");
    }
}

#[test]
fn repeated_runs_are_identical() {
    for (name, _) in SESSIONS {
        let file = format!("{name}.vir");
        assert_eq!(vir(&["run", &file]), vir(&["run", &file]), "{name}");
    }
}

#[test]
fn sessions_cover_every_command() {
    let all: String = SESSIONS.iter().map(|(n, _)| expected(&format!("{n}.vir"))).collect();
    for cmd in [
        "bracket", "jacobi", "span", "expad", "pair2", "closure", "act", "iso", "restrict",
        "substructure", "sbracket", "extcheck", "classify",
    ] {
        assert!(all.lines().any(|l| l.starts_with(&format!("{cmd} "))), "{cmd} not covered");
    }
}
