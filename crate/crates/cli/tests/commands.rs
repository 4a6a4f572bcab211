use std::path::{Path, PathBuf};
use std::process::Command;

use folkengine_cli::corpus_dir::{load_dir, ENV_VAR};
use folkengine_cli::text::{print_document, Document, Item, Workspace};
use folkengine_cli::{interval_document, run};
use folkengine_core::corpus::default_corpus;
use folkengine_core::fincat::Functor;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn folk(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let argv = std::iter::once("folkengine").chain(args.iter().copied());
    let code = run(argv, &mut o, &mut e);
    Out { code, stdout: String::from_utf8(o).unwrap(), stderr: String::from_utf8(e).unwrap() }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const P: &str = "functor p : I -> 1\nobject 0 -> *\nobject 1 -> *\narrow f -> id_*\narrow f_inv -> id_*\n";
const I0: &str = "functor i0 : 1 -> I\nobject * -> 0\n";

#[test]
fn cofib_of_the_interval_contraction_fails_with_a_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.fun", P);
    let out = folk(&["cofib", s(&p)]);
    assert_eq!(out.code, 1, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("witness: objects 0 and 1 of I both go to *"), "{}", out.stdout);
    let i0 = write(&dir, "i0.fun", I0);
    assert_eq!(folk(&["cofib", s(&i0)]).code, 0);
    assert_eq!(folk(&["cofib", "--normally-cloven", s(&i0)]).code, 0);
}

#[test]
fn interval_verify_passes() {
    let out = folk(&["interval", "verify"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.ends_with("29 of 29 checks passed\n"), "{}", out.stdout);
}

#[test]
fn interval_verify_reads_a_structure_and_reports_failures() {
    let dir = TempDir::new().unwrap();
    let dumped = dir.path().join("interval.txt");
    assert_eq!(folk(&["interval", "dump", "-o", s(&dumped)]).code, 0);
    assert_eq!(folk(&["interval", "verify", s(&dumped)]).code, 0);

    let mut doc = interval_document();
    for item in &mut doc.items {
        if let Item::Functor(n, f) = item {
            if n == "v" {
                *f = Functor::identity(&f.dom);
            }
        }
    }
    let bad = write(&dir, "bad.txt", &print_document(&doc));
    let out = folk(&["interval", "verify", s(&bad)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("FAIL  involution: v i0 = i1\n      witness:"), "{}", out.stdout);
}

#[test]
fn fibration_verdicts() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.fun", P);
    assert_eq!(folk(&["fib", s(&p)]).code, 0);
    assert_eq!(folk(&["fib", "--normally-cloven", s(&p)]).code, 0);
    let i0 = write(&dir, "i0.fun", I0);
    let out = folk(&["fib", s(&i0)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("witness: iso f out of the image of * has no lift"), "{}", out.stdout);
}

#[test]
fn equivalence_certificates_parse_back() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.fun", P);
    let out = folk(&["equiv", s(&p)]);
    assert_eq!(out.code, 0);
    let cert = out.stdout.split_once('\n').unwrap().1;
    let cert = write(&dir, "cert.txt", cert);
    assert_eq!(folk(&["check", s(&cert)]).code, 0);
    let two = write(&dir, "u.fun", "functor u : 1 -> 2\nobject * -> 0\n");
    let out = folk(&["equiv", s(&two)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("witness:"), "{}", out.stdout);
}

#[test]
fn factorizations_are_written_and_reload() {
    let dir = TempDir::new().unwrap();
    let k = write(&dir, "k.fun", "functor k : 2 -> 2xI\nobject 0 -> (0,0)\nobject 1 -> (1,1)\narrow u -> (u,f)\n");
    for mode in ["cyl", "cocyl", "cof-tfib", "tcof-fib"] {
        let out_dir = dir.path().join(mode);
        let out = folk(&["factor", "--mode", mode, s(&k), "-o", s(&out_dir)]);
        assert_eq!(out.code, 0, "{mode}: {}{}", out.stdout, out.stderr);
        let mut ws = Workspace::with_categories(&default_corpus().categories);
        let read = |ws: &mut Workspace, f: &str| ws.load(&std::fs::read_to_string(out_dir.join(f)).unwrap()).unwrap();
        let f = ws.load(&std::fs::read_to_string(&k).unwrap()).unwrap().functor("k").unwrap().clone();
        read(&mut ws, "mid.cat");
        let j = read(&mut ws, "j.fun").functor("j").unwrap().clone();
        let g = read(&mut ws, "g.fun").functor("g").unwrap().clone();
        assert_eq!(g.after(&j), f, "{mode}");
        // certificates parse against the same definitions
        read(&mut ws, "certificates.txt");
    }
}

const SQUARE: &str = "\
functor a : 1 -> I
object * -> 0
functor j : 1 -> I
object * -> 0
functor p : I -> 1
object 0 -> *
object 1 -> *
arrow f -> id_*
arrow f_inv -> id_*
square Q
top a
left j
right p
bottom p
";

#[test]
fn lift_writes_a_filler() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "q.sq", SQUARE);
    let l = dir.path().join("l.fun");
    let out = folk(&["lift", s(&sq), "-o", s(&l)]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let mut ws = Workspace::with_categories(&default_corpus().categories);
    let doc = ws.load(SQUARE).unwrap();
    let l = ws.load(&std::fs::read_to_string(&l).unwrap()).unwrap().functor("l").unwrap().clone();
    doc.last_square().unwrap().1.filled_by(&l).unwrap();
}

#[test]
fn lift_without_a_formula_fails() {
    // D2 -> 2 is a cofibration and 2 -> 1 a fibration, neither an equivalence
    let dir = TempDir::new().unwrap();
    let text = "functor t : D2 -> 2\nobject 0 -> 0\nobject 1 -> 1\n\
                functor q : 2 -> 1\nobject 0 -> *\nobject 1 -> *\narrow u -> id_*\n\
                square Q\ntop t\nleft t\nright q\nbottom q\n";
    let sq = write(&dir, "q.sq", text);
    let l = dir.path().join("l.fun");
    let out = folk(&["lift", s(&sq), "-o", s(&l)]);
    assert_eq!(out.code, 1, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("no lifting formula applies"), "{}", out.stdout);
    assert!(out.stdout.contains("left equivalence no"), "{}", out.stdout);
    assert!(!l.exists());
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(folk(&["frobnicate"]).code, 2);
    assert_eq!(folk(&["axioms", "--variant", "C"]).code, 2);
    assert_eq!(folk(&["fib", s(&dir.path().join("missing.fun"))]).code, 2);
    let bad = write(&dir, "bad.fun", "functor p : I -> 1\nobject 0 -> *\n");
    let out = folk(&["fib", s(&bad)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bad.fun:1: object 1 has no image"), "{}", out.stderr);
    let dangling = write(&dir, "d.fun", "functor p : I -> Nowhere\n");
    assert_eq!(folk(&["check", s(&dangling)]).code, 2);
    assert_eq!(folk(&["--help"]).code, 0);
}

#[test]
fn check_reports_invalid_definitions_as_failures() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "p.fun", P);
    let out = folk(&["check", s(&good)]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "ok    functor p\n"));
    let bad = write(&dir, "bad.fun", "functor bad : 2 -> I\nobject 0 -> 0\nobject 1 -> 1\narrow u -> f_inv\n");
    let out = folk(&["check", s(&good), s(&bad)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("FAIL  ") && out.stdout.contains("arrow u"), "{}", out.stdout);
    let out = folk(&["functor", "check", s(&bad)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("witness:") && out.stdout.contains("arrow u"), "{}", out.stdout);
    assert_eq!(folk(&["functor", "check", s(&good)]).code, 0);
}

#[test]
fn includes_resolve_names_across_files() {
    let dir = TempDir::new().unwrap();
    let cat = write(&dir, "c.cat", "category Loop\nobject x\narrow e : x -> x\ne . e = e\n");
    let f = write(&dir, "f.fun", "functor f : Loop -> 1\nobject x -> *\narrow e -> id_*\n");
    assert_eq!(folk(&["functor", "check", s(&f)]).code, 2);
    assert_eq!(folk(&["--include", s(&cat), "functor", "check", s(&f)]).code, 0);
    assert_eq!(folk(&["functor", "check", s(&f), "--include", s(&cat)]).code, 0);
}

#[test]
fn shipped_corpora_match_the_builtin_one() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let builtin = default_corpus();
    let loaded = load_dir(&root.join("default")).unwrap();
    assert_eq!(loaded.name, "default");
    assert!(!loaded.broken_cleavage);
    assert_eq!(loaded.categories.len(), builtin.categories.len());
    for (a, b) in loaded.categories.iter().zip(&builtin.categories) {
        assert_eq!((a.name(), &**a), (b.name(), &**b));
    }
    let corpus = loaded.build();
    assert_eq!(corpus.functors, builtin.functors);
    let faulty = load_dir(&root.join("faulty")).unwrap();
    assert!(faulty.broken_cleavage);
    assert_eq!(faulty.build().functors.len(), 161);
    let doc = Document { items: builtin.categories.iter().map(|c| Item::Category(c.clone())).collect() };
    assert_eq!(std::fs::read_to_string(root.join("default/categories.cat")).unwrap(), print_document(&doc));
}

#[test]
fn corpus_directory_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    write(&dir, "cats.cat", "category Loop\nobject x\narrow e : x -> x\ne . e = e\n");
    write(&dir, "manifest", "corpus tiny\ncategories cats.cat\nbase Loop\n");
    let f = write(&dir, "f.fun", "functor f : Loop -> Loop\nobject x -> x\narrow e -> e\n");
    let bin = env!("CARGO_BIN_EXE_folkengine");
    let with = Command::new(bin).args(["functor", "check", s(&f)]).env(ENV_VAR, dir.path()).output().unwrap();
    assert_eq!(with.status.code(), Some(0), "{}", String::from_utf8_lossy(&with.stderr));
    let without = Command::new(bin).args(["functor", "check", s(&f)]).env_remove(ENV_VAR).output().unwrap();
    assert_eq!(without.status.code(), Some(2));
    let broken = Command::new(bin).args(["interval", "verify"]).env(ENV_VAR, dir.path().join("nowhere")).output().unwrap();
    assert_eq!(broken.status.code(), Some(2));
}

#[test]
fn axioms_report_lands_in_the_file() {
    // the full run is exercised by the acceptance target; here a tiny corpus
    let dir = TempDir::new().unwrap();
    write(&dir, "cats.cat", "category 1\nobject *\n\ncategory 2\nobject 0\nobject 1\narrow u : 0 -> 1\n");
    write(&dir, "manifest", "corpus tiny\ncategories cats.cat\nbase 1 2\n");
    let report = dir.path().join("report.txt");
    let out = folk(&["axioms", "--variant", "A", "--corpus", s(dir.path()), "--report", s(&report)]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert_eq!(std::fs::read_to_string(&report).unwrap(), out.stdout);
    assert!(out.stdout.contains("falsification harness, not a proof"));
    assert!(out.stdout.contains("result: PASS (7/7 conditions)"), "{}", out.stdout);
}
