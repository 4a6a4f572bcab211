use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use folkengine_core::corpus::{cyclic2, interval, terminal, Corpus};
use folkengine_core::fibcof::{
    brute_force_filler, is_cofibration, is_normally_cloven_cofibration, is_normally_cloven_fibration,
    isofibration_witness, Chooser, Cleavage,
};
use folkengine_core::fincat::{equivalence_oracle, same_cat, FinCat, Functor};
use folkengine_core::homotopy::{find_equivalence, Homotopy};
use folkengine_core::interval::verify::verify_interval;
use folkengine_core::interval::{cyl, standard, IntervalStructure};
use folkengine_core::modelstruct::axioms::{verify_model_axioms, Variant};
use folkengine_core::modelstruct::{
    chep_lift, cofibration_witness, factor_composite, lift_against_sdr, trivial_cofibration_sdr,
    trivial_fibration_sdr, Certificate, Factorization, Leg, LiftProblem, Mode,
};

use crate::corpus_dir::{load_default, load_dir, CorpusSource};
use crate::text::{print_document, print_functor, print_homotopy, DiagKind, Diagnostic, Document, Item, Workspace};
use crate::{Cli, Command, FactorMode, FunctorAction, IntervalAction, VariantArg};

/// Requirement arrows for the cylinder form of the subdivision pushout.
const REQUIREMENT_ARROWS: usize = 4;

struct Session {
    corpus: CorpusSource,
    ws: Workspace,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn located(path: &Path, d: &Diagnostic) -> String {
    format!("{}:{}: {}", path.display(), d.line, d.message)
}

impl Session {
    fn open(cli: &Cli) -> Result<Session> {
        let corpus = load_default()?;
        let mut s = Session { ws: corpus.workspace(), corpus };
        for inc in &cli.include {
            s.load(inc)?;
        }
        Ok(s)
    }

    fn try_load(&mut self, path: &Path) -> Result<std::result::Result<Document, Diagnostic>> {
        Ok(self.ws.load(&read(path)?))
    }

    fn load(&mut self, path: &Path) -> Result<Document> {
        self.try_load(path)?.map_err(|d| anyhow!(located(path, &d)))
    }

    /// The named functor, or the last functor of `doc`.
    fn subject(&self, doc: &Document, name: &Option<String>, path: &Path) -> Result<(String, Functor)> {
        match name {
            Some(n) => {
                let f = doc.functor(n).or_else(|| self.ws.functor(n)).ok_or_else(|| anyhow!("no functor named {n}"))?;
                Ok((n.clone(), f.clone()))
            }
            None => doc
                .last_functor()
                .map(|(n, f)| (n.to_string(), f.clone()))
                .ok_or_else(|| anyhow!("{} defines no functor", path.display())),
        }
    }
}

fn family(source: &CorpusSource) -> Vec<Arc<FinCat>> {
    Corpus::new(source.name.clone(), source.categories.clone(), Vec::new()).test_family()
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Check { files } => check(cli, files, out),
        Command::Interval { action: IntervalAction::Verify { file } } => interval_verify(cli, file.as_deref(), out),
        Command::Interval { action: IntervalAction::Dump { out: path } } => {
            let text = print_document(&interval_document());
            match path {
                Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(true)
        }
        Command::Functor { action: FunctorAction::Check { file, name } } => functor_check(cli, file, name, out),
        Command::Equiv { file, name } => equiv(cli, file, name, out),
        Command::Fib { file, name, normally_cloven } => fib(cli, file, name, *normally_cloven, out),
        Command::Cofib { file, name, normally_cloven } => cofib(cli, file, name, *normally_cloven, out),
        Command::Factor { mode, file, name, out: dir } => factor(cli, *mode, file, name, dir, out),
        Command::Lift { file, name, out: path } => lift(cli, file, name, path, out),
        Command::Axioms { variant, corpus, report } => axioms(*variant, corpus.as_deref(), report.as_deref(), out),
    }
}

fn check(cli: &Cli, files: &[std::path::PathBuf], out: &mut dyn Write) -> Result<bool> {
    if files.is_empty() {
        bail!("check needs at least one file");
    }
    let mut s = Session::open(cli)?;
    let mut ok = true;
    for path in files {
        match s.try_load(path)? {
            Ok(doc) => {
                for item in &doc.items {
                    writeln!(out, "ok    {} {}", item.kind(), item.name())?;
                }
            }
            Err(d) if d.kind == DiagKind::Invalid => {
                writeln!(out, "FAIL  {}", located(path, &d))?;
                ok = false;
            }
            Err(d) => bail!(located(path, &d)),
        }
    }
    Ok(ok)
}

fn functor_check(cli: &Cli, file: &Path, name: &Option<String>, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    match s.try_load(file)? {
        Ok(doc) => {
            let (n, f) = s.subject(&doc, name, file)?;
            writeln!(out, "functor {n} : {} -> {} is a functor", f.dom.name(), f.cod.name())?;
            Ok(true)
        }
        Err(d) if d.kind == DiagKind::Invalid => {
            writeln!(out, "not a functor\nwitness: {}", located(file, &d))?;
            Ok(false)
        }
        Err(d) => bail!(located(file, &d)),
    }
}

// ---------------------------------------------------------------------------
// Interval

/// The standard interval structure as a document, derived functors included.
pub fn interval_document() -> Document {
    let st = standard();
    let d = st.derive().expect("the standard interval derives");
    let mut items = vec![
        Item::Category(st.one.clone()),
        Item::Category(st.i.clone()),
        Item::Category(st.s.clone()),
        Item::Category(st.ii.clone()),
        Item::Category(d.is.clone()),
    ];
    let functors = [
        ("i0", &st.i0),
        ("i1", &st.i1),
        ("p", &st.p),
        ("v", &st.v),
        ("r0", &st.r0),
        ("r1", &st.r1),
        ("s", &st.s_map),
        ("gamma_ul", &st.gamma_ul),
        ("gamma_lr", &st.gamma_lr),
        ("gamma_ur", &st.gamma_ur),
        ("q_l", &d.q_l),
        ("q_r", &d.q_r),
        ("w", &d.w),
        ("p_bar", &d.p_bar),
        ("x", &d.x),
    ];
    items.extend(functors.into_iter().map(|(n, f)| Item::Functor(n.into(), f.clone())));
    Document { items }
}

/// Read an interval structure from the functor items of a document.
pub fn interval_from_document(doc: &Document) -> Result<IntervalStructure> {
    let get = |n: &str| doc.functor(n).cloned().ok_or_else(|| anyhow!("the interval file defines no functor {n}"));
    let (i0, i1, p, v) = (get("i0")?, get("i1")?, get("p")?, get("v")?);
    let (r0, r1, s_map) = (get("r0")?, get("r1")?, get("s")?);
    let (gamma_ul, gamma_lr, gamma_ur) = (get("gamma_ul")?, get("gamma_lr")?, get("gamma_ur")?);
    let (one, i, s, ii) = (i0.dom.clone(), i0.cod.clone(), r0.cod.clone(), gamma_ul.dom.clone());
    match ii.product_parts() {
        Some((a, b)) if same_cat(a, &i) && same_cat(b, &i) => {}
        _ => bail!("the domain {} of gamma_ul must be declared as the product {} x {}", ii.name(), i.name(), i.name()),
    }
    let shapes = [
        ("i0", &i0, &one, &i),
        ("i1", &i1, &one, &i),
        ("p", &p, &i, &one),
        ("v", &v, &i, &i),
        ("r0", &r0, &i, &s),
        ("r1", &r1, &i, &s),
        ("s", &s_map, &i, &s),
        ("gamma_ul", &gamma_ul, &ii, &i),
        ("gamma_lr", &gamma_lr, &ii, &i),
        ("gamma_ur", &gamma_ur, &ii, &i),
    ];
    for (n, f, d, c) in shapes {
        if !same_cat(&f.dom, d) || !same_cat(&f.cod, c) {
            bail!("{n} must go from {} to {}", d.name(), c.name());
        }
    }
    Ok(IntervalStructure { one, i, s, i0, i1, p, v, r0, r1, s_map, ii, gamma_ul, gamma_lr, gamma_ur })
}

fn interval_verify(cli: &Cli, file: Option<&Path>, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let custom;
    let st = match file {
        Some(path) => {
            let doc = s.load(path)?;
            custom = interval_from_document(&doc)?;
            &custom
        }
        None => standard(),
    };
    let report = verify_interval(st, &family(&s.corpus), REQUIREMENT_ARROWS);
    write!(out, "{report}")?;
    Ok(report.passed())
}

// ---------------------------------------------------------------------------
// Classes

fn equiv(cli: &Cli, file: &Path, name: &Option<String>, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let doc = s.load(file)?;
    let (n, f) = s.subject(&doc, name, file)?;
    match find_equivalence(&f) {
        Some(cert) => {
            cert.check().map_err(|e| anyhow!("internal: certificate fails its own check: {e}"))?;
            writeln!(out, "{n} is an equivalence")?;
            writeln!(out, "# inverse and the two homotopies")?;
            write!(out, "{}", print_functor(&format!("{n}_inv"), &cert.f_inv))?;
            write!(out, "\n{}", print_homotopy(&format!("{n}_left"), &cert.h_left))?;
            write!(out, "\n{}", print_homotopy(&format!("{n}_right"), &cert.h_right))?;
            Ok(true)
        }
        None => {
            let why = equivalence_oracle(&f).err().unwrap_or_else(|| "no homotopy inverse found".into());
            writeln!(out, "{n} is not an equivalence\nwitness: {why}")?;
            Ok(false)
        }
    }
}

fn fib(cli: &Cli, file: &Path, name: &Option<String>, normally_cloven: bool, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let doc = s.load(file)?;
    let (n, f) = s.subject(&doc, name, file)?;
    let verdict = if normally_cloven {
        is_normally_cloven_fibration(&f, &[terminal(), interval()]).map(|_| ()).map_err(|e| e.to_string())
    } else {
        isofibration_witness(&f)
    };
    let what = if normally_cloven { "normally cloven fibration" } else { "fibration" };
    match &verdict {
        Ok(()) => writeln!(out, "{n} is a {what}")?,
        Err(w) => writeln!(out, "{n} is not a {what}\nwitness: {w}")?,
    }
    Ok(verdict.is_ok())
}

fn collapsed_objects(j: &Functor) -> Option<String> {
    let (a0, a1) = (&j.dom, &j.cod);
    for x in a0.objects() {
        for y in a0.objects().filter(|&y| y > x) {
            if j.on_obj(x) == j.on_obj(y) {
                let img = a1.obj_name(j.on_obj(x));
                return Some(format!("objects {} and {} of {} both go to {img}", a0.obj_name(x), a0.obj_name(y), a0.name()));
            }
        }
    }
    None
}

fn cofib(cli: &Cli, file: &Path, name: &Option<String>, normally_cloven: bool, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let doc = s.load(file)?;
    let (n, j) = s.subject(&doc, name, file)?;
    let verdict = if normally_cloven {
        is_normally_cloven_cofibration(&j, &[terminal(), interval(), cyclic2()]).map(|_| ()).map_err(|e| e.to_string())
    } else {
        match is_cofibration(&j) {
            Some(w) => w.check().map_err(|e| e.to_string()),
            None => Err(collapsed_objects(&j).unwrap_or_else(|| "no retraction Cyl(a1) -> M_j exists".into())),
        }
    };
    let what = if normally_cloven { "normally cloven cofibration" } else { "cofibration" };
    match &verdict {
        Ok(()) => writeln!(out, "{n} is a {what}")?,
        Err(w) => writeln!(out, "{n} is not a {what}\nwitness: {w}")?,
    }
    Ok(verdict.is_ok())
}

// ---------------------------------------------------------------------------
// Factorizations

fn mode_of(m: FactorMode) -> Mode {
    match m {
        FactorMode::Cyl => Mode::MappingCyl,
        FactorMode::Cocyl => Mode::MappingCocyl,
        FactorMode::CofTfib => Mode::CofThenTfib,
        FactorMode::TcofFib => Mode::TcofThenFib,
    }
}

/// Moves functors and homotopies onto the renamed middle category, so their
/// text refers to it by its new name. Anything touching a category outside
/// `known` cannot be printed.
struct Renamer {
    mid: Arc<FinCat>,
    known: Vec<Arc<FinCat>>,
}

impl Renamer {
    fn cat(&self, c: &Arc<FinCat>) -> Option<Arc<FinCat>> {
        if same_cat(c, &self.mid) {
            return Some(self.mid.clone());
        }
        self.known.iter().find(|k| Arc::ptr_eq(k, c) || (k.name() == c.name() && ***k == **c)).cloned()
    }

    fn functor(&self, f: &Functor) -> Option<Functor> {
        Some(f.with_dom(&self.cat(&f.dom)?).with_cod(&self.cat(&f.cod)?))
    }

    fn homotopy(&self, h: &Homotopy) -> Option<Homotopy> {
        let a0 = self.cat(h.source())?;
        let carrier = h.carrier.with_dom(&cyl(&a0)).with_cod(&self.cat(h.target())?);
        Homotopy::from_carrier(carrier).ok()
    }
}

fn certificate_text(fac: &Factorization, rn: &Renamer) -> String {
    let mut text = String::from("# certificates, each checked before writing\n");
    for (k, (leg, cert)) in fac.certificates.iter().enumerate() {
        let leg_name = match leg {
            Leg::J => "j",
            Leg::G => "g",
        };
        let tag = format!("c{}", k + 1);
        text.push_str(&format!("\n# {tag}: {} for {leg_name}\n", cert.kind()));
        let mut items: Vec<String> = Vec::new();
        let mut printable = true;
        let mut functor = |n: &str, f: &Functor, items: &mut Vec<String>| match rn.functor(f) {
            Some(f) => items.push(print_functor(&format!("{tag}_{n}"), &f)),
            None => printable = false,
        };
        match cert {
            Certificate::Sdr(s) => {
                functor("section", &s.j, &mut items);
                functor("retraction", &s.r, &mut items);
                match rn.homotopy(&s.h) {
                    Some(h) => items.push(print_homotopy(&format!("{tag}_deformation"), &h)),
                    None => printable = false,
                }
                items.insert(0, format!("# {:?} strong deformation retraction\n", s.kind).to_lowercase());
            }
            Certificate::Equivalence(e) => {
                functor("inverse", &e.f_inv, &mut items);
                for (n, h) in [("left", &e.h_left), ("right", &e.h_right)] {
                    match rn.homotopy(h) {
                        Some(h) => items.push(print_homotopy(&format!("{tag}_{n}"), &h)),
                        None => printable = false,
                    }
                }
            }
            Certificate::Cleavage(c) => {
                items.push(format!("# lift chooser: {:?}\n", c.chooser));
            }
            Certificate::Cofibration(w) => {
                items.push(format!(
                    "# retraction Cyl({}) -> M_j, {} arrows to {} arrows\n",
                    w.j.cod.name(),
                    w.r.dom.n_arr(),
                    w.r.cod.n_arr()
                ));
            }
            Certificate::CofCleavage(c) => {
                items.push(format!("# criterion lift into M of j, {} arrows\n", c.l.cod.n_arr()));
            }
        }
        if !printable {
            items.push("# some parts live on intermediate categories and are not written\n".into());
        }
        text.push_str(&items.join("\n"));
    }
    text
}

fn factor(cli: &Cli, mode: FactorMode, file: &Path, name: &Option<String>, dir: &Path, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let doc = s.load(file)?;
    let (n, f) = s.subject(&doc, name, file)?;
    let mode = mode_of(mode);
    let fac = match factor_composite(&f, mode) {
        Ok(fac) => fac,
        Err(e) => {
            writeln!(out, "factorization of {n} failed\nwitness: {e}")?;
            return Ok(false);
        }
    };
    if let Err(e) = fac.check() {
        writeln!(out, "factorization of {n} does not check\nwitness: {e}")?;
        return Ok(false);
    }
    let mid = Arc::new(fac.mid.renamed("mid"));
    let rn = Renamer { mid: mid.clone(), known: vec![f.dom.clone(), f.cod.clone()] };
    let j = rn.functor(&fac.j).expect("j lands in mid");
    let g = rn.functor(&fac.g).expect("g leaves mid");
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |file: &str, text: String| {
        let p = dir.join(file);
        std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
    };
    write("mid.cat", print_document(&Document { items: vec![Item::Category(mid.clone())] }))?;
    write("j.fun", print_functor("j", &j))?;
    write("g.fun", print_functor("g", &g))?;
    write("certificates.txt", certificate_text(&fac, &rn))?;
    writeln!(
        out,
        "{n} = g . j through mid ({} objects, {} arrows), mode {}; {} certificates checked; written to {}",
        mid.n_obj(),
        mid.n_arr(),
        mode.name(),
        fac.certificates.len(),
        dir.display()
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// Lifts

fn lift(cli: &Cli, file: &Path, name: &Option<String>, path: &Path, out: &mut dyn Write) -> Result<bool> {
    let mut s = Session::open(cli)?;
    let doc = s.load(file)?;
    let (n, sq) = match name {
        Some(n) => doc
            .items
            .iter()
            .find_map(|i| match i {
                crate::text::Item::Square(m, q) if m == n => Some((m.clone(), q.clone())),
                _ => None,
            })
            .ok_or_else(|| anyhow!("no square named {n}"))?,
        None => doc.last_square().map(|(m, q)| (m.to_string(), q.clone())).ok_or_else(|| anyhow!("{} defines no square", file.display()))?,
    };
    let problem = LiftProblem::new(sq.clone()).map_err(|e| anyhow!("square {n}: {e}"))?;
    let (j, f) = (&sq.left, &sq.right);
    let w = cofibration_witness(j).ok();
    let cleavage = Cleavage::canonical(f).ok();
    let eq_j = find_equivalence(j);
    let eq_f = find_equivalence(f);
    let solution = match (&w, &cleavage) {
        (Some(_), Some(cl)) if eq_j.is_some() => {
            let sdr = trivial_cofibration_sdr(eq_j.as_ref().unwrap());
            Some(("trivial cofibration against fibration", sdr.and_then(|sdr| lift_against_sdr(&problem, cl, &sdr))))
        }
        (Some(w), Some(cl)) if eq_f.is_some() => {
            let sdr = trivial_fibration_sdr(eq_f.as_ref().unwrap(), Chooser::Canonical);
            Some(("cofibration against trivial fibration", sdr.and_then(|sdr| chep_lift(&problem, w, cl, &sdr))))
        }
        _ => None,
    };
    match solution {
        Some((case, Ok(sol))) => {
            let text = print_functor("l", &sol.l);
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "square {n}: {case}; lift fills both triangles; written to {}", path.display())?;
            Ok(true)
        }
        Some((case, Err(e))) => {
            writeln!(out, "square {n}: {case}; the construction failed\nwitness: {e}")?;
            Ok(false)
        }
        None => {
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            writeln!(out, "square {n}: no lifting formula applies")?;
            writeln!(
                out,
                "witness: left cofibration {}, left equivalence {}, right fibration {}, right equivalence {}",
                yes_no(w.is_some()),
                yes_no(eq_j.is_some()),
                yes_no(cleavage.is_some()),
                yes_no(eq_f.is_some())
            )?;
            let found = brute_force_filler(&sq).is_some();
            writeln!(out, "a filler {} by exhaustive search", if found { "exists" } else { "does not exist" })?;
            Ok(false)
        }
    }
}

// ---------------------------------------------------------------------------
// Axioms

fn axioms(variant: VariantArg, dir: Option<&Path>, report: Option<&Path>, out: &mut dyn Write) -> Result<bool> {
    let source = match dir {
        Some(d) => load_dir(d)?,
        None => load_default()?,
    };
    let variant = match variant {
        VariantArg::A => Variant::A,
        VariantArg::B => Variant::B,
    };
    let r = verify_model_axioms(&source.build(), variant);
    let text = r.render();
    out.write_all(text.as_bytes())?;
    if let Some(p) = report {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(r.passed())
}
