use folkengine_core::corpus::{self, default_corpus};
use folkengine_core::fibcof::*;
use folkengine_core::fincat::{injective_on_objects_oracle, Functor};
use folkengine_core::homotopy::Homotopy;

#[test]
fn cofibrations_are_the_injective_on_objects_functors() {
    let c = default_corpus();
    for j in &c.functors {
        let found = is_cofibration(j);
        assert_eq!(found.is_some(), injective_on_objects_oracle(j), "{j:?}");
        if let Some(w) = found {
            w.check().unwrap();
            let f = cofibration_witness_formula(j).unwrap();
            f.check().unwrap();
        }
    }
}

#[test]
fn three_fibration_tests_agree() {
    let c = default_corpus();
    for f in &c.functors {
        let iso = is_isofibration(f);
        assert_eq!(cylinder_side_fibration(f).is_ok(), iso, "{f:?}");
        assert_eq!(cocylinder_side_fibration(f).is_ok(), iso, "{f:?}");
    }
}

#[test]
fn canonical_cleavage_is_normal_and_broken_one_is_not() {
    let fam = vec![corpus::terminal(), corpus::interval()];
    let c = default_corpus();
    let mut broken_caught = false;
    for f in c.functors.iter().filter(|f| is_isofibration(f)) {
        let cl = Cleavage::canonical(f).unwrap();
        check_cleavage(&cl, &fam, 8).unwrap();
        let br = Cleavage::with_chooser(f, Chooser::BrokenGreatest).unwrap();
        if check_cleavage(&br, &fam, 8).is_err() {
            broken_caught = true;
        }
    }
    assert!(broken_caught);
}

#[test]
fn cofibration_cleavage_extends() {
    let fam = vec![corpus::terminal(), corpus::interval(), corpus::cyclic2()];
    let c = default_corpus();
    for j in c.functors.iter().filter(|j| injective_on_objects_oracle(j)).take(40) {
        let s = CofCleavage::search(j).expect("criterion lift");
        s.check_criterion().unwrap();
        let f = CofCleavage::formula(j).unwrap();
        f.check_criterion().unwrap();
        check_cof_cleavage(&f, &fam, 6).unwrap();
        let _ = Homotopy::identity(&Functor::identity(&j.cod));
    }
}
