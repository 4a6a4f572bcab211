//! Acceptance run: one PASS/FAIL line per criterion, each against its time
//! budget. Exits nonzero when any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use folkengine_core::corpus::{cyclic2, default_corpus, interval, terminal, Corpus};
use folkengine_core::fibcof::{
    brute_force_filler, check_cleavage, check_cof_cleavage, cocylinder_side_fibration, cylinder_side_fibration,
    is_cofibration, is_isofibration, Chooser, Cleavage, CofCleavage,
};
use folkengine_core::fincat::{enumerate_functors, equivalence_oracle, injective_on_objects_oracle, Functor};
use folkengine_core::homotopy::{all_homotopies, find_equivalence, Homotopy};
use folkengine_core::interval::{adj, adj_inv, c_of, cocyl, cyl, e0_of, e1_of, i0_of, i1_of, p_of};
use folkengine_core::modelstruct::{
    chep_lift, cofibration_witness, dual_chep_lift, factor_composite, lift_against_sdr, lift_sdr_against,
    lifting_problems, search_sdr_retraction, search_sdr_section, trivial_cofibration_sdr, trivial_fibration_sdr,
    LiftProblem, LiftSolution, Mode, ModelError,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Outcome + 'a>);

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["folkengine"];
    argv.extend_from_slice(args);
    let code = folkengine_cli::run(argv, &mut out, &mut err);
    out.extend(err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn corpus_dir(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn interval_axioms() -> Outcome {
    let (code, text) = cli(&["interval", "verify"]);
    let summary = text.lines().last().unwrap_or("").to_string();
    if code == 0 {
        Ok(summary)
    } else {
        Err(format!("exit {code}\n{text}"))
    }
}

fn adjunction(c: &Corpus) -> Outcome {
    let mut sets = 0;
    let mut maps = 0;
    for a in &c.functor_base {
        for b in &c.functor_base {
            let from_cyl = enumerate_functors(&cyl(a), b);
            for h in &from_cyl {
                let k = adj(h);
                if &adj_inv(&k) != h {
                    return Err(format!("adj_inv adj h != h for h = {h:?}"));
                }
                if e0_of(b).after(&k) != h.after(&i0_of(a)) || e1_of(b).after(&k) != h.after(&i1_of(a)) {
                    return Err(format!("boundaries of adj h disagree for h = {h:?}"));
                }
            }
            let to_cocyl = enumerate_functors(a, &cocyl(b));
            if to_cocyl.len() != from_cyl.len() {
                return Err(format!("{} -> {}: {} maps out of the cylinder, {} into the co-cylinder", a.name(), b.name(), from_cyl.len(), to_cocyl.len()));
            }
            for k in &to_cocyl {
                if &adj(&adj_inv(k)) != k {
                    return Err(format!("adj adj_inv k != k for k = {k:?}"));
                }
            }
            for f in enumerate_functors(a, b) {
                if adj(&f.after(&p_of(a))) != c_of(b).after(&f) {
                    return Err(format!("adj(f p) != c f for f = {f:?}"));
                }
            }
            sets += 1;
            maps += from_cyl.len();
        }
    }
    Ok(format!("{sets} homotopy sets, {maps} homotopies"))
}

fn strictness(c: &Corpus) -> Outcome {
    let mut n = 0;
    for a in &c.functor_base {
        for b in &c.functor_base {
            for h in all_homotopies(a, b) {
                let id0 = Homotopy::identity(&h.f0);
                let id1 = Homotopy::identity(&h.f1);
                let bad = |what: &str| format!("{what} for {h:?}");
                if h.then(&id1).map_err(|e| e.to_string())? != h {
                    return Err(bad("h then id != h"));
                }
                if id0.then(&h).map_err(|e| e.to_string())? != h {
                    return Err(bad("id then h != h"));
                }
                if h.reverse().then(&h).map_err(|e| e.to_string())? != id1 {
                    return Err(bad("reverse h then h != id"));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} homotopies"))
}

fn oracle_agreement(c: &Corpus) -> Outcome {
    let mut disagreements = Vec::new();
    for f in &c.functors {
        let cert = find_equivalence(f);
        if cert.is_some() != equivalence_oracle(f).is_ok() {
            disagreements.push(format!("equivalence: {f:?}"));
        }
        if let Some(e) = cert.and_then(|c| c.check().err()) {
            disagreements.push(format!("equivalence certificate: {e}"));
        }
        if is_cofibration(f).is_some() != injective_on_objects_oracle(f) {
            disagreements.push(format!("cofibration: {f:?}"));
        }
        let iso = is_isofibration(f);
        if cylinder_side_fibration(f).is_ok() != iso || cocylinder_side_fibration(f).is_ok() != iso {
            disagreements.push(format!("fibration: {f:?}"));
        }
    }
    match disagreements.first() {
        None => Ok(format!("{} functors, 0 disagreements", c.functors.len())),
        Some(d) => Err(format!("{} disagreements, first: {d}", disagreements.len())),
    }
}

fn factorizations(c: &Corpus) -> Outcome {
    let mut n = 0;
    for f in &c.functors {
        for mode in Mode::ALL {
            let fac = factor_composite(f, mode).map_err(|e| format!("{} on {f:?}: {e}", mode.name()))?;
            if fac.g.after(&fac.j) != *f {
                return Err(format!("{}: g j != f for {f:?}", mode.name()));
            }
            fac.check().map_err(|e| format!("{} on {f:?}: {e}", mode.name()))?;
            n += 1;
        }
    }
    Ok(format!("{n} factorizations"))
}

/// Per-functor data for the lifting criterion.
struct Member {
    f: Functor,
    cof: bool,
    nc_cof: bool,
    fib: bool,
    nc_fib: bool,
    eq: bool,
}

fn members(c: &Corpus) -> Vec<Member> {
    let fib_family = [terminal(), interval()];
    let cof_family = [terminal(), interval(), cyclic2()];
    c.functors
        .iter()
        .map(|f| {
            let cof = injective_on_objects_oracle(f);
            let fib = is_isofibration(f);
            let nc_fib = fib && Cleavage::canonical(f).is_ok_and(|cl| check_cleavage(&cl, &fib_family, 6).is_ok());
            let nc_cof = cof
                && CofCleavage::search(f)
                    .is_some_and(|cl| cl.check_criterion().is_ok() && check_cof_cleavage(&cl, &cof_family, 6).is_ok());
            Member { f: f.clone(), cof, nc_cof, fib, nc_fib, eq: equivalence_oracle(f).is_ok() }
        })
        .collect()
}

fn formula_lifts(c: &Corpus) -> Outcome {
    let ms = members(c);
    let mut solved = 0;
    let mut pairs = 0;
    let mut confirm = |p: &LiftProblem, tag: &str, sols: Vec<Result<LiftSolution, ModelError>>| -> Result<(), String> {
        for s in sols {
            let s = s.map_err(|e| format!("{tag}: {e}\nj = {:?}\nf = {:?}", p.square.left, p.square.right))?;
            p.check(&s).map_err(|e| format!("{tag}: {e}"))?;
        }
        if brute_force_filler(&p.square).is_none() {
            return Err(format!("{tag}: no filler exists\nj = {:?}\nf = {:?}", p.square.left, p.square.right));
        }
        solved += 1;
        Ok(())
    };
    // trivial n.c. cofibration against fibration
    for j in ms.iter().filter(|m| m.nc_cof && m.eq) {
        let cert = find_equivalence(&j.f).ok_or("equivalence without a certificate")?;
        let sdr = trivial_cofibration_sdr(&cert).map_err(|e| e.to_string())?;
        let ext = CofCleavage::formula(&j.f).ok_or("cofibration without a cleavage")?;
        for f in ms.iter().filter(|m| m.fib) {
            let cl = Cleavage::canonical(&f.f).map_err(|e| e.to_string())?;
            pairs += 1;
            for p in lifting_problems(&j.f, &f.f, 3) {
                confirm(&p, "trivial cofibration / fibration", vec![lift_against_sdr(&p, &cl, &sdr), dual_chep_lift(&p, &ext, &sdr, &cl)])?;
            }
        }
    }
    // cofibration against trivial n.c. fibration
    for f in ms.iter().filter(|m| m.nc_fib && m.eq) {
        let cert = find_equivalence(&f.f).ok_or("equivalence without a certificate")?;
        let sdr = trivial_fibration_sdr(&cert, Chooser::Canonical).map_err(|e| e.to_string())?;
        let cl = Cleavage::canonical(&f.f).map_err(|e| e.to_string())?;
        for j in ms.iter().filter(|m| m.cof) {
            let w = cofibration_witness(&j.f).map_err(|e| e.to_string())?;
            let ext = CofCleavage::formula(&j.f).ok_or("cofibration without a cleavage")?;
            pairs += 1;
            for p in lifting_problems(&j.f, &f.f, 3) {
                confirm(&p, "cofibration / trivial fibration", vec![chep_lift(&p, &w, &cl, &sdr), lift_sdr_against(&p, &ext, &sdr)])?;
            }
        }
    }
    Ok(format!("{pairs} pairs, {solved} squares, 0 failures"))
}

fn sdr_characterizations(c: &Corpus) -> Outcome {
    let idx = |keep: &dyn Fn(&Functor) -> bool| -> BTreeSet<usize> {
        c.functors.iter().enumerate().filter(|(_, f)| keep(f)).map(|(k, _)| k).collect()
    };
    let is_eq = |f: &Functor| equivalence_oracle(f).is_ok();
    let tfib = idx(&|f| is_isofibration(f) && is_eq(f));
    let retractions = idx(&|f| search_sdr_retraction(f).is_some());
    let tcof = idx(&|f| injective_on_objects_oracle(f) && is_eq(f));
    let sections = idx(&|f| search_sdr_section(f).is_some());
    let mut errs = Vec::new();
    if tfib != retractions {
        let d: Vec<_> = tfib.symmetric_difference(&retractions).collect();
        errs.push(format!("trivial fibrations vs SDR retractions differ at {:?}", c.functors[*d[0]]));
    }
    if tcof != sections {
        let d: Vec<_> = tcof.symmetric_difference(&sections).collect();
        errs.push(format!("trivial cofibrations vs SDR sections differ at {:?}", c.functors[*d[0]]));
    }
    if errs.is_empty() {
        Ok(format!("{} trivial fibrations, {} trivial cofibrations", tfib.len(), tcof.len()))
    } else {
        Err(errs.join("\n"))
    }
}

fn model_axioms() -> Outcome {
    let (default, faulty) = (corpus_dir("default"), corpus_dir("faulty"));
    for v in ["A", "B"] {
        let (code, text) = cli(&["axioms", "--variant", v, "--corpus", &default]);
        if code != 0 {
            return Err(format!("variant {v} on the default corpus: exit {code}\n{text}"));
        }
    }
    let (code, text) = cli(&["axioms", "--variant", "A", "--corpus", &faulty]);
    let lifting = text.lines().skip_while(|l| !l.starts_with("(iv)")).take(2).collect::<Vec<_>>();
    let caught = code == 1
        && lifting.first().is_some_and(|l| l.contains("FAIL"))
        && lifting.get(1).is_some_and(|l| l.trim_start().starts_with("witness:"));
    if caught {
        Ok("A and B pass on default; faulty fails (iv) with a witness".into())
    } else {
        Err(format!("faulty corpus not caught (exit {code})\n{text}"))
    }
}

fn main() -> ExitCode {
    let corpus = default_corpus();
    let criteria: Vec<Criterion> = vec![
        ("interval axioms", 1, Box::new(interval_axioms)),
        ("adjunction", 5, Box::new(|| adjunction(&corpus))),
        ("homotopy strictness", 5, Box::new(|| strictness(&corpus))),
        ("oracle agreement", 30, Box::new(|| oracle_agreement(&corpus))),
        ("factorizations", 30, Box::new(|| factorizations(&corpus))),
        ("formula lifts", 60, Box::new(|| formula_lifts(&corpus))),
        ("trivial classes as SDRs", 30, Box::new(|| sdr_characterizations(&corpus))),
        ("model axioms", 60, Box::new(model_axioms)),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed();
        let over = took > Duration::from_secs(*budget);
        let verdict = if outcome.is_ok() && !over { "PASS" } else { "FAIL" };
        let detail = match &outcome {
            Ok(s) => s.clone(),
            Err(e) => e.clone(),
        };
        println!("{verdict} {} {name:<26} {:>7.2}s / {budget}s  {}", k + 1, took.as_secs_f64(), detail.lines().next().unwrap_or(""));
        if let Err(e) = &outcome {
            for l in e.lines().skip(1) {
                println!("       {l}");
            }
        }
        if over {
            println!("       over the time budget");
        }
        if verdict == "FAIL" {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
