use std::sync::Arc;

use folkengine_core::corpus::{cyclic2, default_corpus, discrete, interval, terminal, walking_arrow};
use folkengine_core::fibcof::{brute_force_filler, is_isofibration, Chooser, Cleavage, CofCleavage};
use folkengine_core::fincat::{enumerate_functors, equivalence_oracle, injective_on_objects_oracle, FinCat, Functor, FunctorSearch, Square};
use folkengine_core::homotopy::{find_equivalence, SdrKind};
use folkengine_core::interval::{i0_of, standard};
use folkengine_core::modelstruct::*;

fn small_functors() -> Vec<Functor> {
    let cats: Vec<Arc<FinCat>> = vec![terminal(), walking_arrow(), interval(), discrete(2), cyclic2()];
    let mut out = Vec::new();
    for a in &cats {
        for b in &cats {
            out.extend(enumerate_functors(a, b));
        }
    }
    out
}

#[test]
fn mapping_cylinder_of_identity_on_point() {
    let one = terminal();
    let fac = factor_mapping_cylinder(&Functor::identity(&one)).unwrap();
    fac.check().unwrap();
    assert_eq!(fac.mid.n_obj(), 2);
    assert_eq!(fac.mid.n_arr(), 4);
    assert!(fac.mid.is_groupoid());
    assert_eq!(fac.j.on_obj(0), fac.j.cod.find_obj("0:*").unwrap());
    let fac = factor_mapping_cocylinder(&Functor::identity(&one)).unwrap();
    fac.check().unwrap();
    assert_eq!(fac.mid.n_obj(), 1);
}

#[test]
fn every_mode_factors_every_small_functor() {
    for f in small_functors() {
        for mode in Mode::ALL {
            let fac = factor_composite(&f, mode).unwrap_or_else(|e| panic!("{mode:?} on {f:?}: {e}"));
            fac.check().unwrap_or_else(|e| panic!("{mode:?} on {f:?}: {e}"));
            match mode {
                Mode::MappingCyl | Mode::CofThenTfib => {
                    assert!(injective_on_objects_oracle(&fac.j));
                    assert!(is_isofibration(&fac.g));
                    assert!(equivalence_oracle(&fac.g).is_ok());
                }
                Mode::MappingCocyl | Mode::TcofThenFib => {
                    assert!(injective_on_objects_oracle(&fac.j));
                    assert!(equivalence_oracle(&fac.j).is_ok());
                    assert!(is_isofibration(&fac.g));
                }
            }
        }
    }
}

#[test]
fn sdr_of_m_for_point_into_interval() {
    let j = i0_of(&terminal());
    let w = cofibration_witness(&j).unwrap();
    let sdr = sdr_of_m(&w).unwrap();
    assert_eq!(sdr.h.f0, sdr.j.after(&sdr.r));
    let j = Functor::identity(&terminal());
    let sdr = sdr_of_m(&cofibration_witness(&j).unwrap()).unwrap();
    sdr.check().unwrap();
}

#[test]
fn dold_over_the_point_inverts_the_swap() {
    let i = interval();
    let one = terminal();
    let v = standard().v.clone();
    let cert = find_equivalence(&v).unwrap();
    let to_pt = Functor::constant(&i, &one, 0);
    let oe = dold_over(&to_pt, &to_pt, &cert, Chooser::Canonical).unwrap();
    oe.fg.is_over(&to_pt, &to_pt).unwrap();
    oe.gf.is_over(&to_pt, &to_pt).unwrap();
    assert_eq!(oe.fg.f0, v.after(&oe.g));
    assert_eq!(oe.gf.f0, oe.g.after(&v));
}

#[test]
fn trivial_classes_get_sdrs() {
    for f in small_functors() {
        let Some(cert) = find_equivalence(&f) else { continue };
        if is_isofibration(&f) {
            let sdr = trivial_fibration_sdr(&cert, Chooser::Canonical).unwrap_or_else(|e| panic!("{f:?}: {e}"));
            assert_eq!(sdr.kind, SdrKind::Over);
            assert!(search_sdr_retraction(&f).is_some());
        }
        if injective_on_objects_oracle(&f) {
            let sdr = trivial_cofibration_sdr(&cert).unwrap_or_else(|e| panic!("{f:?}: {e}"));
            assert_eq!(sdr.kind, SdrKind::Under);
            assert!(search_sdr_section(&f).is_some());
        }
    }
}

fn squares(j: &Functor, f: &Functor, cap: usize) -> Vec<Square> {
    let mut out = Vec::new();
    for g1 in enumerate_functors(&j.cod, &f.cod) {
        let s = FunctorSearch::new(&j.dom, &f.dom).restrict_objects({
            let (f, g1, j) = (f.clone(), g1.clone(), j.clone());
            move |a, x| f.on_obj(x) == g1.on_obj(j.on_obj(a))
        });
        for g0 in s.all() {
            let sq = Square { top: g0, left: j.clone(), right: f.clone(), bottom: g1.clone() };
            if sq.check().is_ok() {
                out.push(sq);
                if out.len() >= cap {
                    return out;
                }
            }
        }
    }
    out
}

#[test]
fn formula_lifts_fill_small_squares() {
    let fs = small_functors();
    for j in fs.iter().filter(|j| injective_on_objects_oracle(j)) {
        let w = cofibration_witness(j).unwrap();
        let cl = CofCleavage::formula(j).unwrap();
        let j_eq = find_equivalence(j);
        let j_sdr = j_eq.as_ref().map(|c| trivial_cofibration_sdr(c).unwrap());
        for f in fs.iter().filter(|f| is_isofibration(f)) {
            let fcl = Cleavage::canonical(f).unwrap();
            let f_eq = find_equivalence(f);
            let f_sdr = f_eq.as_ref().map(|c| trivial_fibration_sdr(c, Chooser::Canonical).unwrap());
            for sq in squares(j, f, 3) {
                let pb = LiftProblem::new(sq.clone()).unwrap();
                assert!(brute_force_filler(&sq).is_some() || (j_sdr.is_none() && f_sdr.is_none()));
                if let Some(s) = &j_sdr {
                    lift_against_sdr(&pb, &fcl, s).unwrap_or_else(|e| panic!("sdr {j:?} {f:?}: {e}"));
                    dual_chep_lift(&pb, &cl, s, &fcl).unwrap_or_else(|e| panic!("dual chep {j:?} {f:?}: {e}"));
                }
                if let Some(s) = &f_sdr {
                    chep_lift(&pb, &w, &fcl, s).unwrap_or_else(|e| panic!("chep {j:?} {f:?}: {e}"));
                    lift_sdr_against(&pb, &cl, s).unwrap_or_else(|e| panic!("dual {j:?} {f:?}: {e}"));
                }
            }
        }
    }
}

#[test]
fn sdr_retractions_lift_homotopies() {
    for f in small_functors().into_iter().take(60) {
        let fac = factor_mapping_cylinder(&f).unwrap();
        let Some(Certificate::Sdr(sdr)) = fac.certificate(Leg::G, "sdr") else { panic!() };
        let g = &fac.g;
        for a0 in [terminal(), interval()] {
            for top in enumerate_functors(&a0, &fac.mid).into_iter().take(4) {
                let start = g.after(&top);
                for h in folkengine_core::fibcof::homotopies_from(&start, 3) {
                    let sq = Square { top: top.clone(), left: i0_of(&a0), right: g.clone(), bottom: h.carrier.clone() };
                    let pb = LiftProblem::new(sq).unwrap();
                    let sol = sdr_is_fibration_lift(&pb, sdr).unwrap();
                    pb.check(&sol).unwrap();
                }
            }
        }
    }
}

#[test]
fn corpus_is_loaded() {
    assert!(!default_corpus().functors.is_empty());
}
