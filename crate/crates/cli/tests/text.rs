use std::sync::Arc;

use folkengine_cli::text::{parse_document, print_document, DiagKind, Document, Item, Workspace};
use folkengine_cli::{interval_document, interval_from_document};
use folkengine_core::corpus::{default_corpus, interval, walking_arrow};
use folkengine_core::fincat::{enumerate_functors, enumerate_nat_trans, CatBuilder, FinCat, NatTrans};
use folkengine_core::homotopy::homotopies_between;
use folkengine_core::interval::standard;
use proptest::prelude::*;

fn corpus_ws() -> Workspace {
    Workspace::with_categories(&default_corpus().categories)
}

fn same_item(a: &Item, b: &Item) -> bool {
    match (a, b) {
        (Item::Category(x), Item::Category(y)) => x.name() == y.name() && **x == **y,
        (Item::Functor(m, f), Item::Functor(n, g)) => m == n && f == g,
        (Item::Nat(m, s), Item::Nat(n, t)) => m == n && s == t,
        (Item::Homotopy(m, h), Item::Homotopy(n, k)) => m == n && h == k,
        (Item::Square(m, p), Item::Square(n, q)) => m == n && p == q,
        _ => false,
    }
}

fn round_trips(doc: &Document, ws: &Workspace) -> Result<(), String> {
    let text = print_document(doc);
    let back = parse_document(&text, ws).map_err(|d| format!("{d}\n{text}"))?;
    if back.items.len() != doc.items.len() {
        return Err("item count differs".into());
    }
    for (a, b) in doc.items.iter().zip(&back.items) {
        if !same_item(a, b) {
            return Err(format!("{} {} differs after the round trip", a.kind(), a.name()));
        }
    }
    if print_document(&back) != text {
        return Err("printing is not stable".into());
    }
    Ok(())
}

#[test]
fn corpus_categories_round_trip() {
    let doc = Document { items: default_corpus().categories.iter().map(|c| Item::Category(c.clone())).collect() };
    round_trips(&doc, &Workspace::new()).unwrap();
}

#[test]
fn interval_dump_round_trips_to_an_equal_structure() {
    let text = print_document(&interval_document());
    let doc = parse_document(&text, &Workspace::new()).unwrap();
    let st = interval_from_document(&doc).unwrap();
    let reference = standard();
    for (a, b) in [(&st.one, &reference.one), (&st.i, &reference.i), (&st.s, &reference.s), (&st.ii, &reference.ii)] {
        assert_eq!(**a, **b);
        assert_eq!(a.name(), b.name());
    }
    let pairs = [
        (&st.i0, &reference.i0),
        (&st.i1, &reference.i1),
        (&st.p, &reference.p),
        (&st.v, &reference.v),
        (&st.r0, &reference.r0),
        (&st.r1, &reference.r1),
        (&st.s_map, &reference.s_map),
        (&st.gamma_ul, &reference.gamma_ul),
        (&st.gamma_lr, &reference.gamma_lr),
        (&st.gamma_ur, &reference.gamma_ur),
    ];
    for (a, b) in pairs {
        assert_eq!(a, b);
    }
    let (d, e) = (st.derive().unwrap(), reference.derive().unwrap());
    assert_eq!(d.x, e.x);
    assert_eq!(doc.functor("x").unwrap(), &e.x);
    assert_eq!(doc.functor("q_l").unwrap(), &e.q_l);
    round_trips(&interval_document(), &Workspace::new()).unwrap();
}

#[test]
fn missing_composition_entry_names_the_pair() {
    let text = "# two arrows that compose\ncategory C\nobject 0\nobject 1\nobject 2\narrow f : 0 -> 1\narrow g : 1 -> 2\n";
    let err = parse_document(text, &Workspace::new()).unwrap_err();
    assert_eq!(err.kind, DiagKind::Invalid);
    assert_eq!(err.line, 2);
    assert!(err.message.contains("missing composition entry g . f"), "{err}");
    let fixed = format!("{text}arrow h : 0 -> 2\ng . f = h\n");
    assert!(parse_document(&fixed, &Workspace::new()).is_ok());
}

#[test]
fn non_functor_is_rejected_with_the_witness_arrow() {
    // u goes to f_inv, whose endpoints are 1 -> 0, but objects go 0 -> 0, 1 -> 1
    let text = "functor bad : 2 -> I\nobject 0 -> 0\nobject 1 -> 1\narrow u -> f_inv\n";
    let err = parse_document(text, &corpus_ws()).unwrap_err();
    assert_eq!(err.kind, DiagKind::Invalid);
    assert_eq!(err.line, 1);
    assert!(err.message.contains("arrow u"), "{err}");

    // composition: z . z = id but the image f . f is not defined the same way
    let text = "category Two\nobject a\nobject b\narrow x : a -> b\narrow y : b -> a\ny . x = id_a\nx . y = id_b\n\
                functor g : Two -> 2\nobject a -> 0\nobject b -> 0\narrow x -> id_0\narrow y -> id_0\n\
                functor h : I -> Two\nobject 0 -> a\nobject 1 -> a\narrow f -> id_a\narrow f_inv -> id_a\n";
    assert!(parse_document(text, &corpus_ws()).is_ok());
}

#[test]
fn diagnostics_carry_line_numbers() {
    let ws = corpus_ws();
    let err = parse_document("functor F : 2 -> Nowhere\nobject 0 -> 0\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Dangling, 1));
    let err = parse_document("\n\nfunctor F : 2 -> 2\nobject 0 -> 0\nobject 7 -> 1\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Dangling, 5));
    let err = parse_document("functor F : 2 -> 2\nobject 0 -> 0\n", &ws).unwrap_err();
    assert!(err.message.contains("object 1 has no image"), "{err}");
    let err = parse_document("category C\nobject 0\narrow f 0 -> 0\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Syntax, 3));
    let err = parse_document("category C\nobject 0\narrow f : 0 -> 9\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Dangling, 3));
    let err = parse_document("object 0\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Syntax, 1));
    let err = parse_document("category C\nobject 0\narrow e : 0 -> 0\ne . e = e\ne . e = id_0\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Invalid, 5));
    let err = parse_document("category C\nobject 0\ncategory C\nobject 1\n", &ws).unwrap_err();
    assert_eq!((err.kind, err.line), (DiagKind::Syntax, 3));
}

#[test]
fn squares_must_commute() {
    let text = "functor a : 1 -> 2\nobject * -> 0\nfunctor b : 1 -> 2\nobject * -> 1\n\
                functor id1 : 1 -> 1\nobject * -> *\n\
                square Q\ntop a\nleft id1\nright a\nbottom b\n";
    // right leg a : 1 -> 2 does not even start at the codomain of top
    let err = parse_document(text, &corpus_ws()).unwrap_err();
    assert_eq!(err.kind, DiagKind::Invalid);
    let text = "functor a : 1 -> 2\nobject * -> 0\nfunctor b : 1 -> 2\nobject * -> 1\n\
                functor id1 : 1 -> 1\nobject * -> *\nfunctor id2 : 2 -> 2\nobject 0 -> 0\nobject 1 -> 1\narrow u -> u\n\
                square Q\ntop a\nleft id1\nright id2\nbottom b\n";
    let err = parse_document(text, &corpus_ws()).unwrap_err();
    assert!(err.message.contains("does not commute"), "{err}");
}

#[test]
fn homotopies_and_nats_round_trip() {
    let ws = corpus_ws();
    let (two, i) = (walking_arrow(), interval());
    let fs = enumerate_functors(&two, &i);
    let mut items = vec![Item::Functor("f".into(), fs[0].clone()), Item::Functor("g".into(), fs[3].clone())];
    let comps = enumerate_nat_trans(&fs[0], &fs[3], &|_| true);
    items.push(Item::Nat("t".into(), NatTrans { source: fs[0].clone(), target: fs[3].clone(), comps: comps[0].clone() }));
    for (k, h) in homotopies_between(&fs[0], &fs[3], &|_| true).into_iter().enumerate() {
        items.push(Item::Homotopy(format!("h{k}"), h));
    }
    round_trips(&Document { items }, &ws).unwrap();
}

/// A random thin category on `n` objects from a relation closed under
/// reflexivity and transitivity.
fn preorder(name: &str, n: usize, edges: &[(usize, usize)]) -> Arc<FinCat> {
    let mut le = vec![vec![false; n]; n];
    for (x, row) in le.iter_mut().enumerate() {
        row[x] = true;
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
    let arrow = |x: usize, y: usize| if x == y { format!("id_o{x}") } else { format!("a{x}_{y}") };
    let mut b = CatBuilder::new(name);
    for x in 0..n {
        b.add_object(format!("o{x}"));
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && le[x][y] {
                b.add_arrow(arrow(x, y), format!("o{x}"), format!("o{y}"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != y && y != z && le[x][y] && le[y][z] {
                    b.add_entry(arrow(y, z), arrow(x, y), arrow(x, z));
                }
            }
        }
    }
    Arc::new(b.build().unwrap())
}

fn relation() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..4).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..5)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn print_then_parse_is_the_identity((n, e) in relation(), (m, e2) in relation(), pick in any::<prop::sample::Index>()) {
        let a = preorder("A", n, &e);
        let b = preorder("B", m, &e2);
        let mut items = vec![Item::Category(a.clone()), Item::Category(b.clone())];
        let ab = folkengine_core::fincat::product(&a, &b);
        items.push(Item::Category(Arc::new(ab.renamed("AxB"))));
        let fs = enumerate_functors(&a, &b);
        let f = fs[pick.index(fs.len())].clone();
        items.push(Item::Functor("F".into(), f.clone()));
        let ws = Workspace::new();
        let mut doc = Document { items };
        prop_assert!(round_trips(&doc, &ws).is_ok(), "{:?}", round_trips(&doc, &ws));
        // homotopies out of a preorder are identities, so use the groupoid I
        let gs = enumerate_functors(&a, &interval());
        let g = &gs[pick.index(gs.len())];
        doc.items.push(Item::Functor("G".into(), g.clone()));
        for (k, h) in homotopies_between(g, g, &|_| true).into_iter().enumerate() {
            doc.items.push(Item::Homotopy(format!("H{k}"), h));
        }
        let ws = corpus_ws();
        prop_assert!(round_trips(&doc, &ws).is_ok(), "{:?}", round_trips(&doc, &ws));
    }
}
