use std::collections::HashSet;
use std::sync::Arc;

use folkengine_core::corpus::{cyclic2, default_corpus, discrete, groupoid2, interval, parallel_pair, terminal, walking_arrow};
use folkengine_core::fincat::*;
use proptest::prelude::*;

/// The thin category of a preorder given by its (reflexive, transitive) relation.
fn preorder(n: usize, le: &[Vec<bool>]) -> Arc<FinCat> {
    let mut b = CatBuilder::new("P");
    for x in 0..n {
        b.add_object(format!("{x}"));
    }
    let name = |x: usize, y: usize| if x == y { format!("id_{x}") } else { format!("a{x}{y}") };
    for x in 0..n {
        for y in 0..n {
            if x != y && le[x][y] {
                b.add_arrow(name(x, y), format!("{x}"), format!("{y}"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && le[x][y] && le[y][z] {
                    b.add_entry(name(y, z), name(x, y), name(x, z));
                }
            }
        }
    }
    Arc::new(b.build().expect("preorder"))
}

fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut le = vec![vec![false; n]; n];
    for x in 0..n {
        le[x][x] = true;
    }
    for &(x, y) in edges {
        le[x % n][y % n] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    le
}

/// Monotone maps, counted by trying every object assignment.
fn monotone_maps(n: usize, le: &[Vec<bool>], m: usize, le2: &[Vec<bool>]) -> usize {
    let total = m.pow(n as u32);
    (0..total)
        .filter(|&code| {
            let img: Vec<usize> = (0..n).map(|k| (code / m.pow(k as u32)) % m).collect();
            (0..n).all(|x| (0..n).all(|y| !le[x][y] || le2[img[x]][img[y]]))
        })
        .count()
}

fn edges() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..5).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..6)))
}

proptest! {
    #[test]
    fn functor_enumeration_counts_monotone_maps((n, e) in edges(), (m, e2) in edges()) {
        let (le, le2) = (closure(n, &e), closure(m, &e2));
        let (p, q) = (preorder(n, &le), preorder(m, &le2));
        prop_assert!(p.validate().is_ok());
        let fs = enumerate_functors(&p, &q);
        prop_assert_eq!(fs.len(), monotone_maps(n, &le, m, &le2));
        for f in &fs {
            prop_assert!(f.validate().is_ok());
        }
    }

    #[test]
    fn composition_is_associative_and_unital(pick in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let cats = [terminal(), walking_arrow(), interval(), cyclic2(), parallel_pair()];
        let c = |k: usize| &cats[pick[k].index(cats.len())];
        let f = enumerate_functors(c(0), c(1));
        let g = enumerate_functors(c(1), c(2));
        let h = enumerate_functors(c(2), c(0));
        if let (Some(f), Some(g), Some(h)) = (f.first(), g.last(), h.first()) {
            prop_assert_eq!(h.after(g).after(f), h.after(&g.after(f)));
            prop_assert_eq!(f.after(&Functor::identity(c(0))), f.clone());
            prop_assert_eq!(Functor::identity(c(1)).after(f), f.clone());
        }
    }
}

#[test]
fn builder_reports_the_missing_pair() {
    let err = CatBuilder::new("c")
        .object("0")
        .object("1")
        .arrow("f", "0", "1")
        .arrow("g", "1", "0")
        .entry("g", "f", "id_0")
        .build()
        .unwrap_err();
    assert_eq!(err.to_string(), "missing composition entry f . g");
}

#[test]
fn builder_rejects_non_associative_tables() {
    // (e∘e)∘e = x∘e = x but e∘(e∘e) = e∘x = e
    let err = CatBuilder::new("c")
        .object("*")
        .arrow("e", "*", "*")
        .arrow("x", "*", "*")
        .entry("e", "e", "x")
        .entry("e", "x", "e")
        .entry("x", "e", "x")
        .entry("x", "x", "x")
        .build();
    assert!(matches!(err, Err(BuildError::Laws(_))), "{err:?}");
}

#[test]
fn products_match_brute_force() {
    let cats = [terminal(), walking_arrow(), interval(), cyclic2(), discrete(2)];
    for a in &cats {
        for b in &cats {
            let p = product(a, b);
            assert!(p.validate().is_ok());
            assert_eq!(p.n_obj(), a.n_obj() * b.n_obj());
            assert_eq!(p.n_arr(), a.n_arr() * b.n_arr());
            // functors out of a test category into the product are pairs
            for t in [walking_arrow(), cyclic2()] {
                let into = enumerate_functors(&t, &p).len();
                assert_eq!(into, enumerate_functors(&t, a).len() * enumerate_functors(&t, b).len());
                for (f, g) in enumerate_functors(&t, a).iter().zip(enumerate_functors(&t, b)) {
                    let fg = pairing(f, &g, &p);
                    assert_eq!(&projection_left(&p).after(&fg), f);
                    assert_eq!(projection_right(&p).after(&fg), g);
                }
            }
        }
    }
}

#[test]
fn exponentials_match_brute_force() {
    let cats = [terminal(), walking_arrow(), interval(), cyclic2(), discrete(2)];
    for i in &cats {
        for b in &cats {
            let e = exponential_by(i, b);
            assert!(e.validate().is_ok());
            assert_eq!(e.n_obj(), enumerate_functors(i, b).len());
            // arrows of b^i = functors 2 → b^i that are not identities = functors i × 2 → b
            let two = walking_arrow();
            assert_eq!(enumerate_functors(&two, &e).len(), enumerate_functors(&product(i, &two), b).len());
        }
    }
}

#[test]
fn pullbacks_match_brute_force() {
    let cats = [terminal(), walking_arrow(), interval(), cyclic2()];
    for a in &cats {
        for b in &cats {
            for c in &cats {
                for f in enumerate_functors(a, c) {
                    for g in enumerate_functors(b, c) {
                        let p = pullback(&f, &g).unwrap();
                        assert!(p.validate().is_ok());
                        let objs = a.objects().flat_map(|x| b.objects().map(move |y| (x, y)));
                        let n = objs.filter(|&(x, y)| f.on_obj(x) == g.on_obj(y)).count();
                        assert_eq!(p.n_obj(), n);
                        let arrs = a.arrows().flat_map(|u| b.arrows().map(move |v| (u, v)));
                        let m = arrs.filter(|&(u, v)| f.on_arr(u) == g.on_arr(v)).count();
                        assert_eq!(p.n_arr(), m);
                        let (l, r) = pullback_projections(&p);
                        assert_eq!(f.after(&l), g.after(&r));
                    }
                }
            }
        }
    }
}

/// Equivalence by brute force: some `g` with `gf` and `fg` naturally isomorphic to identities.
fn brute_equivalence(f: &Functor) -> bool {
    let iso = |x: &Functor, y: &Functor| !enumerate_nat_trans(x, y, &|u| x.cod.is_iso(u)).is_empty();
    enumerate_functors(&f.cod, &f.dom)
        .iter()
        .any(|g| iso(&g.after(f), &Functor::identity(&f.dom)) && iso(&f.after(g), &Functor::identity(&f.cod)))
}

#[test]
fn equivalence_oracle_matches_inverse_search() {
    let cats = [terminal(), walking_arrow(), interval(), cyclic2(), discrete(2), groupoid2()];
    for a in &cats {
        for b in &cats {
            for f in enumerate_functors(a, b) {
                assert_eq!(equivalence_oracle(&f).is_ok(), brute_equivalence(&f), "{f:?}");
            }
        }
    }
}

#[test]
fn corpus_is_well_formed_and_deterministic() {
    let c = default_corpus();
    for cat in &c.categories {
        assert!(cat.validate().is_ok(), "{}", cat.name());
    }
    let names: HashSet<&str> = c.categories.iter().map(|c| c.name()).collect();
    assert_eq!(names.len(), c.categories.len());
    assert_eq!(c.functors.len(), 161);
    assert_eq!(default_corpus().functors, c.functors);
    assert_eq!(c.functors.iter().filter(|f| equivalence_oracle(f).is_ok()).count(), 26);
    assert_eq!(c.functors.iter().filter(|f| injective_on_objects_oracle(f)).count(), 77);
}
