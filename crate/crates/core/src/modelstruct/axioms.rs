//! Verifier for the seven model-structure conditions over a corpus.
//!
//! Class membership is decided by the searches of `fibcof` and by
//! [`find_equivalence`]; lifts and factorizations come from the formulas of
//! the parent module and are then checked exactly. A brute-force filler search
//! runs alongside every lift.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::{cyclic2, interval, terminal, Corpus};
use crate::fibcof::{
    brute_force_filler, check_cleavage, check_cof_cleavage, is_cofibration, is_isofibration, retract_diagrams,
    Chooser, Cleavage, CofCleavage, CofibrationWitness,
};
use crate::fincat::{equivalence_oracle, same_cat, FinCat, Functor};
use crate::homotopy::{
    find_equivalence, retract_transfer, two_of_three, EquivalenceCertificate, KnownSides, SdrCertificate, Triangle,
};

use super::{
    chep_lift_with, cofibration_witness, dual_chep_lift_with, factor_composite, lift_against_sdr, lift_sdr_against,
    lifting_problems, path_space_sdr, sdr_of_m, trivial_cofibration_sdr, trivial_fibration_sdr, LiftProblem, Mode,
    ModelError, PathSpaceSdr,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// equivalences, normally cloven fibrations, cofibrations
    A,
    /// equivalences, fibrations, normally cloven cofibrations
    B,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "A" | "a" => Some(Variant::A),
            "B" | "b" => Some(Variant::B),
            _ => None,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Variant::A => "W = equivalences, F = normally cloven fibrations, C = cofibrations",
            Variant::B => "W = equivalences, F = fibrations, C = normally cloven cofibrations",
        }
    }
}

/// Bounds on the enumerations.
#[derive(Clone, Debug)]
pub struct Limits {
    /// squares per (left, right) pair
    pub squares_per_pair: usize,
    /// functors tried per source in the cleavage condition suites
    pub cleavage_cap: usize,
    /// largest arrow count of a functor's source and target in the retract search
    pub retract_arrows: usize,
    /// `cleavage_cap` used when judging the outputs of a factorization, whose middle objects are large
    pub factor_cleavage_cap: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { squares_per_pair: 3, cleavage_cap: 6, retract_arrows: 8, factor_cleavage_cap: 2 }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionLine {
    pub label: &'static str,
    pub name: &'static str,
    pub checked: usize,
    pub failure: Option<String>,
}

impl ConditionLine {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub variant: Variant,
    pub corpus: String,
    pub n_categories: usize,
    pub n_functors: usize,
    pub lines: Vec<ConditionLine>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed())
    }

    pub fn line(&self, label: &str) -> Option<&ConditionLine> {
        self.lines.iter().find(|l| l.label == label)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let v = match self.variant {
            Variant::A => "A",
            Variant::B => "B",
        };
        let _ = writeln!(s, "model structure conditions, variant {v}: {}", self.variant.describe());
        let _ = writeln!(s, "corpus: {} ({} categories, {} functors)", self.corpus, self.n_categories, self.n_functors);
        let _ = writeln!(s, "NOTE: the conditions quantify over all functors between all finite categories.");
        let _ = writeln!(s, "NOTE: this run checks them on the corpus only; it is a falsification harness, not a proof.");
        for l in &self.lines {
            let verdict = if l.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<6}{:<44}{verdict}  ({} checked)", l.label, l.name, l.checked);
            if let Some(w) = &l.failure {
                for (k, part) in w.lines().enumerate() {
                    let lead = if k == 0 { "witness: " } else { "         " };
                    let _ = writeln!(s, "      {lead}{part}");
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let passed = self.lines.iter().filter(|l| l.passed()).count();
        let _ = writeln!(s, "result: {} ({passed}/{} conditions)", if self.passed() { "PASS" } else { "FAIL" }, self.lines.len());
        s
    }
}

/// Class verdicts for one functor.
struct Classes {
    eq: Option<EquivalenceCertificate>,
    cof: bool,
    fib: bool,
}

#[derive(Clone)]
struct Judge {
    variant: Variant,
    limits: Limits,
    fib_family: Vec<Arc<FinCat>>,
    cof_family: Vec<Arc<FinCat>>,
}

impl Judge {
    fn cof(&self, j: &Functor) -> bool {
        match self.variant {
            Variant::A => is_cofibration(j).is_some(),
            Variant::B => self.nc_cof(j),
        }
    }

    fn nc_cof(&self, j: &Functor) -> bool {
        match CofCleavage::search(j) {
            Some(cl) => cl.check_criterion().is_ok() && check_cof_cleavage(&cl, &self.cof_family, self.limits.cleavage_cap).is_ok(),
            None => false,
        }
    }

    fn fib(&self, f: &Functor) -> bool {
        match self.variant {
            Variant::A => self.nc_fib(f),
            Variant::B => is_isofibration(f),
        }
    }

    fn nc_fib(&self, f: &Functor) -> bool {
        match Cleavage::canonical(f) {
            Ok(cl) => check_cleavage(&cl, &self.fib_family, self.limits.cleavage_cap).is_ok(),
            Err(_) => false,
        }
    }

    fn classes(&self, f: &Functor) -> Classes {
        Classes { eq: find_equivalence(f), cof: self.cof(f), fib: self.fib(f) }
    }
}

fn first_failure(items: Vec<Result<(), String>>) -> (usize, Option<String>) {
    let n = items.len();
    (n, items.into_iter().find_map(|r| r.err()))
}

fn describe_square(p: &LiftProblem) -> String {
    let sq = &p.square;
    format!("j  = {:?}\nf  = {:?}\ng0 = {:?}\ng1 = {:?}", sq.left, sq.right, sq.top, sq.bottom)
}

pub fn verify_model_axioms(corpus: &Corpus, variant: Variant) -> AxiomReport {
    verify_model_axioms_with(corpus, variant, &Limits::default())
}

pub fn verify_model_axioms_with(corpus: &Corpus, variant: Variant, limits: &Limits) -> AxiomReport {
    let judge = Judge {
        variant,
        limits: limits.clone(),
        fib_family: vec![terminal(), interval()],
        cof_family: vec![terminal(), interval(), cyclic2()],
    };
    let chooser = if corpus.broken_cleavage { Chooser::BrokenGreatest } else { Chooser::Canonical };
    let fs = &corpus.functors;
    let classes: Vec<Classes> = fs.par_iter().map(|f| judge.classes(f)).collect();

    let mut lines = vec![two_out_of_three(fs, &classes)];
    lines.push(retract_line("(ii)", "retracts of C and of C ∩ W", fs, &classes, limits, |c| c.cof, |j| judge.cof(j)));
    lines.push(retract_line("(iii)", "retracts of F and of F ∩ W", fs, &classes, limits, |c| c.fib, |f| judge.fib(f)));
    lines.push(lifting_line(true, variant, fs, &classes, limits, chooser));
    lines.push(lifting_line(false, variant, fs, &classes, limits, chooser));
    lines.push(factor_line("(vi)", "factor as C then F ∩ W", Mode::CofThenTfib, fs, &judge));
    lines.push(factor_line("(vii)", "factor as C ∩ W then F", Mode::TcofThenFib, fs, &judge));

    let mut notes = Vec::new();
    if corpus.broken_cleavage {
        notes.push("fault injected: fibrations are lifted with a cleavage that does not lift identities to identities".into());
    }
    let other = Judge { variant: if variant == Variant::A { Variant::B } else { Variant::A }, ..judge };
    let same_c = fs.par_iter().zip(&classes).all(|(f, c)| other.cof(f) == c.cof);
    let same_f = fs.par_iter().zip(&classes).all(|(f, c)| other.fib(f) == c.fib);
    notes.push(format!(
        "classes of the two variants on this corpus: cofibrations {}, fibrations {}",
        if same_c { "coincide" } else { "differ" },
        if same_f { "coincide" } else { "differ" }
    ));
    AxiomReport {
        variant,
        corpus: corpus.name.clone(),
        n_categories: corpus.categories.len(),
        n_functors: fs.len(),
        lines,
        notes,
    }
}

fn two_out_of_three(fs: &[Functor], classes: &[Classes]) -> ConditionLine {
    let items: Vec<Result<(), String>> = fs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, f0)| {
            let mut out = Vec::new();
            for (b, f1) in fs.iter().enumerate().filter(|(_, f1)| same_cat(&f1.dom, &f0.cod)) {
                let f2 = f1.after(f0);
                let c2 = find_equivalence(&f2);
                let (c0, c1) = (classes[a].eq.as_ref(), classes[b].eq.as_ref());
                let tri = Triangle { f0: f0.clone(), f1: f1.clone(), f2: f2.clone() };
                let (known, third) = match (c0, c1, c2.as_ref()) {
                    (Some(x), Some(y), _) => (KnownSides::First(x, y), &f2),
                    (_, Some(y), Some(z)) => (KnownSides::Last(y, z), f0),
                    (Some(x), _, Some(z)) => (KnownSides::Outer(x, z), f1),
                    _ => continue,
                };
                let r = two_of_three(&tri, known)
                    .map_err(|e| e.to_string())
                    .and_then(|_| equivalence_oracle(third))
                    .map_err(|e| format!("f0 = {f0:?}\nf1 = {f1:?}\n{e}"));
                out.push(r);
            }
            out
        })
        .collect();
    let (checked, failure) = first_failure(items);
    ConditionLine { label: "(i)", name: "two out of three for W", checked, failure }
}

fn retract_line(
    label: &'static str,
    name: &'static str,
    fs: &[Functor],
    classes: &[Classes],
    limits: &Limits,
    in_class: impl Fn(&Classes) -> bool + Sync,
    decide: impl Fn(&Functor) -> bool + Sync,
) -> ConditionLine {
    let small = |f: &Functor| f.dom.n_arr() <= limits.retract_arrows && f.cod.n_arr() <= limits.retract_arrows;
    let items: Vec<Result<(), String>> = fs
        .par_iter()
        .enumerate()
        .filter(|(k, f)| in_class(&classes[*k]) && small(f))
        .flat_map_iter(|(k, f)| {
            let mut out = Vec::new();
            for fp in fs.iter().filter(|fp| small(fp) && *fp != f) {
                for d in retract_diagrams(fp, f, 1) {
                    let mut r = if decide(fp) { Ok(()) } else { Err(format!("f' = {fp:?} is a retract of f = {f:?} but not in the class")) };
                    if r.is_ok() {
                        if let Some(cert) = &classes[k].eq {
                            r = retract_transfer(cert, &d)
                                .map(|_| ())
                                .map_err(|e| format!("f' = {fp:?}, f = {f:?}: equivalence does not transfer: {e}"));
                        }
                    }
                    out.push(r);
                }
            }
            out
        })
        .collect();
    let (checked, failure) = first_failure(items);
    ConditionLine { label, name, checked, failure }
}

#[derive(Default)]
struct LeftData {
    sdr: Option<SdrCertificate>,
    cleavage: Option<CofCleavage>,
    witness: Option<CofibrationWitness>,
    sdr_m: Option<SdrCertificate>,
}

#[derive(Default)]
struct RightData {
    cleavage: Option<Cleavage>,
    sdr: Option<SdrCertificate>,
    path_space: Option<PathSpaceSdr>,
}

fn prepare_left(j: &Functor, c: &Classes, trivial_left: bool, variant: Variant) -> Result<LeftData, ModelError> {
    let mut d = LeftData::default();
    if trivial_left {
        d.sdr = Some(trivial_cofibration_sdr(c.eq.as_ref().expect("trivial"))?);
    }
    match (trivial_left, variant) {
        (false, Variant::A) => {
            let w = cofibration_witness(j)?;
            d.sdr_m = Some(sdr_of_m(&w)?);
            d.witness = Some(w);
        }
        (_, Variant::B) => {
            d.cleavage = Some(CofCleavage::search(j).ok_or_else(|| ModelError::Hypothesis("no criterion lift".into()))?);
        }
        _ => {}
    }
    Ok(d)
}

fn prepare_right(f: &Functor, c: &Classes, trivial_left: bool, variant: Variant, chooser: Chooser) -> Result<RightData, ModelError> {
    let mut d = RightData::default();
    let cleavage = Cleavage::with_chooser(f, chooser)?;
    if !trivial_left {
        d.sdr = Some(trivial_fibration_sdr(c.eq.as_ref().expect("trivial"), chooser)?);
    }
    if trivial_left && variant == Variant::B {
        d.path_space = Some(path_space_sdr(&cleavage)?);
    }
    d.cleavage = Some(cleavage);
    Ok(d)
}

fn solve(p: &LiftProblem, l: &LeftData, r: &RightData, trivial_left: bool, variant: Variant) -> Result<(), ModelError> {
    let need = |what: &str| ModelError::Hypothesis(format!("missing {what}"));
    let sol = match (trivial_left, variant) {
        (true, Variant::A) => lift_against_sdr(p, r.cleavage.as_ref().ok_or(need("cleavage"))?, l.sdr.as_ref().ok_or(need("sdr"))?)?,
        (true, Variant::B) => dual_chep_lift_with(
            p,
            l.cleavage.as_ref().ok_or(need("cofibration cleavage"))?,
            l.sdr.as_ref().ok_or(need("sdr"))?,
            r.path_space.as_ref().ok_or(need("path space"))?,
        )?,
        (false, Variant::A) => chep_lift_with(
            p,
            l.witness.as_ref().ok_or(need("witness"))?,
            l.sdr_m.as_ref().ok_or(need("sdr of m"))?,
            r.cleavage.as_ref().ok_or(need("cleavage"))?,
            r.sdr.as_ref().ok_or(need("sdr"))?,
        )?,
        (false, Variant::B) => lift_sdr_against(p, l.cleavage.as_ref().ok_or(need("cofibration cleavage"))?, r.sdr.as_ref().ok_or(need("sdr"))?)?,
    };
    p.check(&sol)
}

/// `trivial_left`: condition (iv), trivial cofibrations against fibrations;
/// otherwise (v), cofibrations against trivial fibrations.
fn lifting_line(
    trivial_left: bool,
    variant: Variant,
    fs: &[Functor],
    classes: &[Classes],
    limits: &Limits,
    chooser: Chooser,
) -> ConditionLine {
    let lefts: Vec<usize> = (0..fs.len()).filter(|&k| classes[k].cof && (!trivial_left || classes[k].eq.is_some())).collect();
    let rights: Vec<usize> = (0..fs.len()).filter(|&k| classes[k].fib && (trivial_left || classes[k].eq.is_some())).collect();
    let left_data: Vec<Result<LeftData, ModelError>> =
        lefts.par_iter().map(|&a| prepare_left(&fs[a], &classes[a], trivial_left, variant)).collect();
    let right_data: Vec<Result<RightData, ModelError>> =
        rights.par_iter().map(|&b| prepare_right(&fs[b], &classes[b], trivial_left, variant, chooser)).collect();
    let items: Vec<Result<(), String>> = lefts
        .par_iter()
        .zip(&left_data)
        .flat_map_iter(|(&a, ld)| {
            let j = &fs[a];
            let mut out: Vec<Result<(), String>> = Vec::new();
            for (&b, rd) in rights.iter().zip(&right_data) {
                let f = &fs[b];
                for p in lifting_problems(j, f, limits.squares_per_pair) {
                    let r = match brute_force_filler(&p.square) {
                        None => Err(format!("{}\nno filler exists at all", describe_square(&p))),
                        Some(_) => match (ld, rd) {
                            (Ok(l), Ok(r)) => solve(&p, l, r, trivial_left, variant),
                            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                        }
                        .map_err(|e| format!("{}\nformula lift: {e}", describe_square(&p))),
                    };
                    out.push(r);
                }
            }
            out
        })
        .collect();
    let (checked, failure) = first_failure(items);
    let (label, name) = if trivial_left { ("(iv)", "C ∩ W lifts against F") } else { ("(v)", "C lifts against F ∩ W") };
    ConditionLine { label, name, checked, failure }
}

fn factor_line(label: &'static str, name: &'static str, mode: Mode, fs: &[Functor], judge: &Judge) -> ConditionLine {
    let limits = Limits { cleavage_cap: judge.limits.factor_cleavage_cap, ..judge.limits.clone() };
    let judge = &Judge { limits, ..judge.clone() };
    let items: Vec<Result<(), String>> = fs
        .par_iter()
        .map(|f| {
            let fac = factor_composite(f, mode).map_err(|e| format!("f = {f:?}: {e}"))?;
            fac.check().map_err(|e| format!("f = {f:?}: {e}"))?;
            let (j_weq, g_weq) = match mode {
                Mode::CofThenTfib => (false, true),
                _ => (true, false),
            };
            let mut bad = Vec::new();
            if !judge.cof(&fac.j) {
                bad.push("j is not in C");
            }
            if j_weq && equivalence_oracle(&fac.j).is_err() {
                bad.push("j is not in W");
            }
            if !judge.fib(&fac.g) {
                bad.push("g is not in F");
            }
            if g_weq && equivalence_oracle(&fac.g).is_err() {
                bad.push("g is not in W");
            }
            if bad.is_empty() {
                Ok(())
            } else {
                Err(format!("f = {f:?}: {}", bad.join(", ")))
            }
        })
        .collect();
    let (checked, failure) = first_failure(items);
    ConditionLine { label, name, checked, failure }
}
