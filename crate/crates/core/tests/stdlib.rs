use std::path::PathBuf;
use std::process::Command;

use dlogic::kernel::{Options, Theory, Verdict};
use dlogic::stdlib::{load_builtin, load_dir, Manifest};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../stdlib")
}

#[test]
fn directory_matches_bundled_copy() {
    let base = Theory::new(Options::default());
    let a = load_builtin(&base).unwrap();
    let b = load_dir(&base, &dir()).unwrap();
    assert_eq!(a.order(), b.order());
    assert_eq!(a.theorems().len(), b.theorems().len());
}

#[test]
fn manifest_lists_every_file() {
    let m = Manifest::builtin();
    let names: Vec<&str> = m.entries.iter().map(|e| e.path.as_str()).collect();
    assert_eq!(
        names,
        [
            "logic.dlog",
            "zfc.dlog",
            "relfun.dlog",
            "rel_oo.dlog",
            "groups.dlog"
        ]
    );
    for e in &m.entries {
        assert!(dir().join(&e.path).exists(), "{}", e.path);
    }
}

#[test]
fn overloads_get_distinct_internal_names() {
    let th = load_builtin(&Theory::new(Options::default())).unwrap();
    let v = th.vocabulary();
    assert_eq!(v.candidates("{").len(), 4);
    assert!(v
        .candidates("equivalent")
        .iter()
        .any(|s| &*s.internal == "equivalent#2"));
}

#[test]
fn opaque_application_needs_its_own_step() {
    let th = load_builtin(&Theory::new(Options::default())).unwrap();
    let by_taut = "Theorem T1 := d(P, z) == P proof 1. d(P, z) == P by taut; qed;";
    let (reports, r) = th.load_source(by_taut, "t");
    assert!(r.is_err());
    assert_eq!(reports[0].verdict, Verdict::Failed);
    let by_unfold =
        "Theorem T2 := d(P, z) == P proof 1. P == P by taut; 2. d(P, z) == P by unfold(1); qed;";
    let (reports, r) = th.load_source(by_unfold, "t");
    assert!(r.is_ok());
    assert_eq!(reports[0].verdict, Verdict::Proved);
}

#[test]
fn stdlib_flag_beats_environment() {
    let empty = std::env::temp_dir().join(format!("dlogic-empty-{}", std::process::id()));
    std::fs::create_dir_all(&empty).unwrap();
    std::fs::write(empty.join("manifest"), "").unwrap();
    let file = empty.join("uses.dlog");
    std::fs::write(&file, "Axiom X := a in b;").unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dlogic"))
            .env("DLOGIC_STDLIB", &empty)
            .args(args)
            .arg(&file)
            .output()
            .unwrap()
            .status
            .code()
    };
    // the empty directory has no `in`
    assert_eq!(run(&["check"]), Some(2));
    assert_eq!(
        run(&["--stdlib", dir().to_str().unwrap(), "check"]),
        Some(0)
    );
}
