//! Named small categories and the finite family over which universally
//! quantified statements are checked.

use std::sync::Arc;

use crate::fincat::{enumerate_functors, product, CatBuilder, FinCat, Functor};
use crate::interval::{indiscrete, standard};

pub fn terminal() -> Arc<FinCat> {
    standard().one.clone()
}

pub fn interval() -> Arc<FinCat> {
    standard().i.clone()
}

pub fn subdivision() -> Arc<FinCat> {
    standard().s.clone()
}

/// The walking arrow `0 → 1`.
pub fn walking_arrow() -> Arc<FinCat> {
    Arc::new(CatBuilder::new("2").object("0").object("1").arrow("u", "0", "1").build().expect("walking arrow"))
}

pub fn discrete(n: usize) -> Arc<FinCat> {
    let mut b = CatBuilder::new(format!("D{n}"));
    for k in 0..n {
        b.add_object(format!("{k}"));
    }
    Arc::new(b.build().expect("discrete"))
}

pub fn empty() -> Arc<FinCat> {
    discrete(0)
}

pub fn parallel_pair() -> Arc<FinCat> {
    Arc::new(
        CatBuilder::new("P")
            .object("0")
            .object("1")
            .arrow("a", "0", "1")
            .arrow("b", "0", "1")
            .build()
            .expect("parallel pair"),
    )
}

/// One object with a single involutive automorphism.
pub fn cyclic2() -> Arc<FinCat> {
    Arc::new(CatBuilder::new("BZ2").object("*").arrow("z", "*", "*").entry("z", "z", "id_*").build().expect("BZ2"))
}

/// Two isomorphic objects, each with automorphism group of order 2.
pub fn groupoid2() -> Arc<FinCat> {
    Arc::new(product(&interval(), &cyclic2()).renamed("G2"))
}

pub fn indiscrete_on(n: usize) -> Arc<FinCat> {
    let names: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Arc::new(indiscrete(&format!("K{n}"), &refs, |s, t| format!("k{s}{t}")))
}

/// A versioned family of categories and the functors among a bounded subset.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub name: String,
    pub categories: Vec<Arc<FinCat>>,
    /// categories whose mutual functors make up `functors`
    pub functor_base: Vec<Arc<FinCat>>,
    pub functors: Vec<Functor>,
    /// set when the corpus asks for the deliberately broken fibration cleavage
    pub broken_cleavage: bool,
}

impl Corpus {
    pub fn new(name: impl Into<String>, categories: Vec<Arc<FinCat>>, functor_base: Vec<Arc<FinCat>>) -> Corpus {
        let mut functors = Vec::new();
        for a in &functor_base {
            for b in &functor_base {
                functors.extend(enumerate_functors(a, b));
            }
        }
        Corpus { name: name.into(), categories, functor_base, functors, broken_cleavage: false }
    }

    pub fn find(&self, name: &str) -> Option<&Arc<FinCat>> {
        self.categories.iter().find(|c| c.name() == name)
    }

    /// Categories for the universal-property checks: the corpus plus the
    /// interval-related basics.
    pub fn test_family(&self) -> Vec<Arc<FinCat>> {
        let mut out = vec![terminal(), walking_arrow(), interval(), subdivision()];
        for c in &self.categories {
            if !out.iter().any(|d| **d == **c) {
                out.push(c.clone());
            }
        }
        out
    }
}

/// The default corpus: basic shapes, the groupoids with nontrivial
/// automorphisms, and a few products.
pub fn default_corpus() -> Corpus {
    let one = terminal();
    let two = walking_arrow();
    let i = interval();
    let s = subdivision();
    let d2 = discrete(2);
    let par = parallel_pair();
    let bz2 = cyclic2();
    let g2 = groupoid2();
    let two_i = product(&two, &i);
    let two_two = product(&two, &two);
    let d2_i = product(&d2, &i);
    let categories = vec![
        one.clone(),
        two.clone(),
        i.clone(),
        s,
        d2.clone(),
        par.clone(),
        bz2.clone(),
        g2.clone(),
        two_i,
        two_two,
        d2_i,
    ];
    let base = vec![one, two, i, d2, par, bz2, g2];
    Corpus::new("default", categories, base)
}

/// The default corpus with the broken fibration cleavage switched on.
pub fn faulty_corpus() -> Corpus {
    let mut c = default_corpus();
    c.name = "faulty".into();
    c.broken_cleavage = true;
    c
}
