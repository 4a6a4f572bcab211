//! Finite categories given by full composition tables, functors between them,
//! natural transformations, and the handful of limits the constructions use.
//!
//! Objects and arrows are dense `u32` indices into the owning category. Every
//! category carries a fixed total order on both, which is what makes functor
//! enumeration and every chooser downstream deterministic.

use std::collections::HashMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

pub type Obj = u32;
pub type Arr = u32;

pub(crate) const NONE: u32 = u32::MAX;

/// Composition table with one slot per composable pair. Row `g` holds
/// `g ∘ f` for the arrows `f` into `src(g)`, in arrow order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompTable {
    offset: Vec<usize>,
    pos: Vec<u32>,
    data: Vec<Arr>,
}

impl CompTable {
    /// All slots unset.
    pub fn new(arrows: &[ArrowRec], n_obj: usize) -> CompTable {
        let mut into = vec![0u32; n_obj];
        let mut pos = Vec::with_capacity(arrows.len());
        for a in arrows {
            let t = a.tgt as usize;
            pos.push(into.get(t).copied().unwrap_or(0));
            if t < n_obj {
                into[t] += 1;
            }
        }
        let mut offset = Vec::with_capacity(arrows.len() + 1);
        let mut total = 0usize;
        for a in arrows {
            offset.push(total);
            total += into.get(a.src as usize).copied().unwrap_or(0) as usize;
        }
        offset.push(total);
        CompTable { offset, pos, data: vec![NONE; total] }
    }

    /// Fill every composable pair from `comp(g, f)`.
    pub fn from_fn(arrows: &[ArrowRec], n_obj: usize, mut comp: impl FnMut(Arr, Arr) -> Arr) -> CompTable {
        let mut t = CompTable::new(arrows, n_obj);
        let mut into: Vec<Vec<Arr>> = vec![Vec::new(); n_obj];
        for (f, a) in arrows.iter().enumerate() {
            into[a.tgt as usize].push(f as Arr);
        }
        for (g, a) in arrows.iter().enumerate() {
            let base = t.offset[g];
            for (k, &f) in into[a.src as usize].iter().enumerate() {
                t.data[base + k] = comp(g as Arr, f);
            }
        }
        t
    }

    /// Caller guarantees `tgt(f) = src(g)`.
    fn slot(&self, g: Arr, f: Arr) -> usize {
        self.offset[g as usize] + self.pos[f as usize] as usize
    }

    pub fn set(&mut self, g: Arr, f: Arr, h: Arr) {
        let k = self.slot(g, f);
        self.data[k] = h;
    }

    fn get(&self, g: Arr, f: Arr) -> Arr {
        self.data[self.slot(g, f)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrowRec {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// How a category was produced. Only used to decode indices of derived
/// categories; equality of categories ignores it.
#[derive(Clone, Debug)]
pub enum Shape {
    Plain,
    Product {
        left: Arc<FinCat>,
        right: Arc<FinCat>,
    },
    Exponential(Arc<ExpData>),
    Pullback(Arc<PullbackData>),
    MappingCylinder(Arc<MapCylData>),
}

#[derive(Default, Debug, Clone)]
pub(crate) struct Derived {
    pub(crate) cyl: OnceLock<Arc<FinCat>>,
    pub(crate) sub: OnceLock<Arc<FinCat>>,
    pub(crate) cocyl: OnceLock<Arc<FinCat>>,
}

#[derive(Clone, Debug)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    arrows: Vec<ArrowRec>,
    identity: Vec<Arr>,
    comp: CompTable,
    hom: Vec<Vec<Arr>>,
    inverse: Vec<Arr>,
    shape: Shape,
    fingerprint: u64,
    pub(crate) derived: Derived,
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.objects == other.objects
            && self.arrows == other.arrows
            && self.identity == other.identity
            && self.comp == other.comp
    }
}

impl Eq for FinCat {}

/// Pointer equality first, structural equality otherwise.
pub fn same_cat(a: &Arc<FinCat>, b: &Arc<FinCat>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FinCat {
    /// Assemble a category from raw tables without checking the laws.
    /// Unset slots of `comp` stand for missing composites.
    pub fn from_tables(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<ArrowRec>,
        identity: Vec<Arr>,
        comp: CompTable,
        shape: Shape,
    ) -> FinCat {
        let n_obj = objects.len();
        let n_arr = arrows.len();
        assert_eq!(identity.len(), n_obj, "identity table size");
        assert_eq!(comp.offset.len(), n_arr + 1, "composition table size");
        let mut hom = vec![Vec::new(); n_obj * n_obj];
        for (a, rec) in arrows.iter().enumerate() {
            hom[rec.src as usize * n_obj + rec.tgt as usize].push(a as Arr);
        }
        let mut inverse = vec![NONE; n_arr];
        for (a, rec) in arrows.iter().enumerate() {
            if (rec.src as usize) >= n_obj || (rec.tgt as usize) >= n_obj {
                continue;
            }
            for &b in &hom[rec.tgt as usize * n_obj + rec.src as usize] {
                let ba = comp.get(b, a as Arr);
                let ab = comp.get(a as Arr, b);
                if ba == identity[rec.src as usize] && ab == identity[rec.tgt as usize] {
                    inverse[a] = b;
                    break;
                }
            }
        }
        let mut hasher = DefaultHasher::new();
        objects.hash(&mut hasher);
        arrows.hash(&mut hasher);
        identity.hash(&mut hasher);
        comp.hash(&mut hasher);
        FinCat {
            name: name.into(),
            objects,
            arrows,
            identity,
            comp,
            hom,
            inverse,
            shape,
            fingerprint: hasher.finish(),
            derived: Derived::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> FinCat {
        let mut c = self.clone();
        c.name = name.into();
        c.derived = Derived::default();
        c
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n_obj(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arr(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        0..self.objects.len() as Obj
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> + '_ {
        0..self.arrows.len() as Arr
    }

    pub fn obj_name(&self, x: Obj) -> &str {
        &self.objects[x as usize]
    }

    pub fn arr_name(&self, a: Arr) -> &str {
        &self.arrows[a as usize].name
    }

    pub fn obj_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow_recs(&self) -> &[ArrowRec] {
        &self.arrows
    }

    pub fn find_obj(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name).map(|i| i as Obj)
    }

    pub fn find_arr(&self, name: &str) -> Option<Arr> {
        self.arrows.iter().position(|a| a.name == name).map(|i| i as Arr)
    }

    pub fn src(&self, a: Arr) -> Obj {
        self.arrows[a as usize].src
    }

    pub fn tgt(&self, a: Arr) -> Obj {
        self.arrows[a as usize].tgt
    }

    pub fn id(&self, x: Obj) -> Arr {
        self.identity[x as usize]
    }

    pub fn is_identity(&self, a: Arr) -> bool {
        self.identity[self.src(a) as usize] == a
    }

    /// `g ∘ f`, or `None` when `tgt(f) != src(g)`.
    pub fn try_comp(&self, g: Arr, f: Arr) -> Option<Arr> {
        if self.arrows[g as usize].src != self.arrows[f as usize].tgt {
            return None;
        }
        let c = self.comp.get(g, f);
        (c != NONE).then_some(c)
    }

    /// `g ∘ f`; panics on a non-composable pair.
    pub fn comp(&self, g: Arr, f: Arr) -> Arr {
        match self.try_comp(g, f) {
            Some(c) => c,
            None => panic!(
                "{}: {} . {} is not composable",
                self.name,
                self.arr_name(g),
                self.arr_name(f)
            ),
        }
    }

    pub fn hom(&self, x: Obj, y: Obj) -> &[Arr] {
        &self.hom[x as usize * self.objects.len() + y as usize]
    }

    pub fn inverse(&self, a: Arr) -> Option<Arr> {
        let b = self.inverse[a as usize];
        (b != NONE).then_some(b)
    }

    pub fn is_iso(&self, a: Arr) -> bool {
        self.inverse[a as usize] != NONE
    }

    pub fn is_groupoid(&self) -> bool {
        self.inverse.iter().all(|&b| b != NONE)
    }

    /// Isomorphisms with the given source, in arrow order.
    pub fn isos_from(&self, x: Obj) -> impl Iterator<Item = Arr> + '_ {
        self.objects()
            .flat_map(move |y| self.hom(x, y).iter().copied())
            .filter(move |&a| self.is_iso(a))
    }

    /// Exhaustive check of every category law, with named witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n_obj = self.objects.len() as u32;
        let n = self.arrows.len();
        for (a, rec) in self.arrows.iter().enumerate() {
            if rec.src >= n_obj || rec.tgt >= n_obj {
                violations.push(Violation::new(
                    "arrow endpoints",
                    format!("arrow {} has an unknown endpoint", rec.name),
                ));
                return ValidationReport { violations };
            }
            let _ = a;
        }
        for x in self.objects() {
            let i = self.identity[x as usize];
            if i as usize >= n || self.src(i) != x || self.tgt(i) != x {
                violations.push(Violation::new(
                    "identity endpoints",
                    format!("identity of {} is not an endomorphism of it", self.obj_name(x)),
                ));
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        for g in self.arrows() {
            for f in self.objects().flat_map(|x| self.hom(x, self.src(g)).to_vec()) {
                let c = self.comp.get(g, f);
                if c == NONE {
                    violations.push(Violation::new(
                        "composition total",
                        format!("missing {} . {}", self.arr_name(g), self.arr_name(f)),
                    ));
                } else if c as usize >= n || self.src(c) != self.src(f) || self.tgt(c) != self.tgt(g) {
                    violations.push(Violation::new(
                        "composite endpoints",
                        format!("{} . {} has wrong endpoints", self.arr_name(g), self.arr_name(f)),
                    ));
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        for f in self.arrows() {
            if self.comp(f, self.id(self.src(f))) != f {
                violations.push(Violation::new(
                    "right unit",
                    format!("{} . id_{} = {}", self.arr_name(f), self.obj_name(self.src(f)), self.arr_name(self.comp(f, self.id(self.src(f))))),
                ));
            }
            if self.comp(self.id(self.tgt(f)), f) != f {
                violations.push(Violation::new(
                    "left unit",
                    format!("id_{} . {} = {}", self.obj_name(self.tgt(f)), self.arr_name(f), self.arr_name(self.comp(self.id(self.tgt(f)), f))),
                ));
            }
        }
        for f in self.arrows() {
            for g in self.objects().flat_map(|y| self.hom(self.tgt(f), y).to_vec()) {
                let gf = self.comp(g, f);
                for h in self.objects().flat_map(|z| self.hom(self.tgt(g), z).to_vec()) {
                    let lhs = self.comp(h, gf);
                    let rhs = self.comp(self.comp(h, g), f);
                    if lhs != rhs {
                        violations.push(Violation::new(
                            "associativity",
                            format!(
                                "({} . {}) . {} = {} but {} . ({} . {}) = {}",
                                self.arr_name(h), self.arr_name(g), self.arr_name(f), self.arr_name(rhs),
                                self.arr_name(h), self.arr_name(g), self.arr_name(f), self.arr_name(lhs)
                            ),
                        ));
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn product_parts(&self) -> Option<(&Arc<FinCat>, &Arc<FinCat>)> {
        match &self.shape {
            Shape::Product { left, right } => Some((left, right)),
            _ => None,
        }
    }
}

impl fmt::Display for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} objects, {} arrows)", self.name, self.n_obj(), self.n_arr())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub witness: String,
}

impl Violation {
    pub fn new(law: &'static str, witness: String) -> Violation {
        Violation { law, witness }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "all category laws hold");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.law, v.witness)?;
        }
        Ok(())
    }
}

/// Builds a category from objects, non-identity arrows and composition
/// entries. Identities are implicit and named `id_X`; every composable pair of
/// non-identity arrows needs an entry.
#[derive(Clone, Debug, Default)]
pub struct CatBuilder {
    name: String,
    objects: Vec<String>,
    arrows: Vec<(String, String, String)>,
    entries: Vec<(String, String, String)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate object {0}")]
    DuplicateObject(String),
    #[error("duplicate arrow {0}")]
    DuplicateArrow(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("{0} . {1} is not composable")]
    NotComposable(String, String),
    #[error("composite {g} . {f} = {h} has the wrong endpoints")]
    BadEndpoints { g: String, f: String, h: String },
    #[error("conflicting entries for {0} . {1}")]
    Conflict(String, String),
    #[error("missing composition entry {0} . {1}")]
    MissingEntry(String, String),
    #[error("category laws fail: {0}")]
    Laws(String),
}

impl CatBuilder {
    pub fn new(name: impl Into<String>) -> CatBuilder {
        CatBuilder { name: name.into(), ..Default::default() }
    }

    pub fn object(mut self, x: impl Into<String>) -> Self {
        self.objects.push(x.into());
        self
    }

    pub fn arrow(mut self, a: impl Into<String>, src: impl Into<String>, tgt: impl Into<String>) -> Self {
        self.arrows.push((a.into(), src.into(), tgt.into()));
        self
    }

    /// Record `g ∘ f = h`.
    pub fn entry(mut self, g: impl Into<String>, f: impl Into<String>, h: impl Into<String>) -> Self {
        self.entries.push((g.into(), f.into(), h.into()));
        self
    }

    pub fn add_object(&mut self, x: impl Into<String>) {
        self.objects.push(x.into());
    }

    pub fn add_arrow(&mut self, a: impl Into<String>, src: impl Into<String>, tgt: impl Into<String>) {
        self.arrows.push((a.into(), src.into(), tgt.into()));
    }

    pub fn add_entry(&mut self, g: impl Into<String>, f: impl Into<String>, h: impl Into<String>) {
        self.entries.push((g.into(), f.into(), h.into()));
    }

    pub fn build(&self) -> Result<FinCat, BuildError> {
        let mut obj_ix = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj_ix.insert(o.clone(), i as Obj).is_some() {
                return Err(BuildError::DuplicateObject(o.clone()));
            }
        }
        let mut arrows: Vec<ArrowRec> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| ArrowRec { name: format!("id_{o}"), src: i as Obj, tgt: i as Obj })
            .collect();
        for (a, s, t) in &self.arrows {
            let src = *obj_ix.get(s).ok_or_else(|| BuildError::UnknownObject(s.clone()))?;
            let tgt = *obj_ix.get(t).ok_or_else(|| BuildError::UnknownObject(t.clone()))?;
            arrows.push(ArrowRec { name: a.clone(), src, tgt });
        }
        let mut arr_ix = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if arr_ix.insert(a.name.clone(), i as Arr).is_some() {
                return Err(BuildError::DuplicateArrow(a.name.clone()));
            }
        }
        let identity: Vec<Arr> = (0..self.objects.len() as Arr).collect();
        let mut comp = CompTable::from_fn(&arrows, self.objects.len(), |g, f| {
            if identity[arrows[g as usize].src as usize] == g {
                f
            } else if identity[arrows[f as usize].tgt as usize] == f {
                g
            } else {
                NONE
            }
        });
        for (g, f, h) in &self.entries {
            let look = |x: &String| arr_ix.get(x).copied().ok_or_else(|| BuildError::UnknownArrow(x.clone()));
            let (gi, fi, hi) = (look(g)?, look(f)?, look(h)?);
            let (gr, fr, hr) = (&arrows[gi as usize], &arrows[fi as usize], &arrows[hi as usize]);
            if gr.src != fr.tgt {
                return Err(BuildError::NotComposable(g.clone(), f.clone()));
            }
            if hr.src != fr.src || hr.tgt != gr.tgt {
                return Err(BuildError::BadEndpoints { g: g.clone(), f: f.clone(), h: h.clone() });
            }
            let slot = comp.get(gi, fi);
            if slot != NONE && slot != hi {
                return Err(BuildError::Conflict(g.clone(), f.clone()));
            }
            comp.set(gi, fi, hi);
        }
        for (g, gr) in arrows.iter().enumerate() {
            for (f, fr) in arrows.iter().enumerate() {
                if gr.src == fr.tgt && comp.get(g as Arr, f as Arr) == NONE {
                    return Err(BuildError::MissingEntry(gr.name.clone(), fr.name.clone()));
                }
            }
        }
        let cat = FinCat::from_tables(self.name.clone(), self.objects.clone(), arrows, identity, comp, Shape::Plain);
        let report = cat.validate();
        if !report.is_ok() {
            return Err(BuildError::Laws(report.to_string().trim_end().to_string()));
        }
        Ok(cat)
    }
}

/// A functor, stored extensionally.
#[derive(Clone)]
pub struct Functor {
    pub dom: Arc<FinCat>,
    pub cod: Arc<FinCat>,
    pub obj: Vec<Obj>,
    pub arr: Vec<Arr>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj == other.obj && self.arr == other.arr && same_cat(&self.dom, &other.dom) && same_cat(&self.cod, &other.cod)
    }
}

impl Eq for Functor {}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor {} -> {} {{", self.dom.name(), self.cod.name())?;
        for x in self.dom.objects() {
            write!(f, " {}↦{}", self.dom.obj_name(x), self.cod.obj_name(self.obj[x as usize]))?;
        }
        write!(f, " |")?;
        for a in self.dom.arrows().filter(|&a| !self.dom.is_identity(a)) {
            write!(f, " {}↦{}", self.dom.arr_name(a), self.cod.arr_name(self.arr[a as usize]))?;
        }
        write!(f, " }}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("functor tables have the wrong size")]
    Shape,
    #[error("composition mismatch: {0} ∘ {1} -> {2} is not {3}")]
    Endpoint(String, String, String, String),
    #[error("arrow {arrow} is sent to {image}, whose endpoints do not match the object map")]
    ArrowEndpoints { arrow: String, image: String },
    #[error("identity of {obj} is sent to {image}, not an identity")]
    Identity { obj: String, image: String },
    #[error("composition not preserved: F({g} . {f}) = {lhs} but F({g}) . F({f}) = {rhs}")]
    Composition { g: String, f: String, lhs: String, rhs: String },
}

impl Functor {
    /// Unchecked constructor.
    pub fn new(dom: Arc<FinCat>, cod: Arc<FinCat>, obj: Vec<Obj>, arr: Vec<Arr>) -> Functor {
        Functor { dom, cod, obj, arr }
    }

    /// Derive the object map from where identities go.
    pub fn from_arrow_map(dom: Arc<FinCat>, cod: Arc<FinCat>, arr: Vec<Arr>) -> Functor {
        let obj = dom.objects().map(|x| cod.src(arr[dom.id(x) as usize])).collect();
        Functor { dom, cod, obj, arr }
    }

    pub fn identity(c: &Arc<FinCat>) -> Functor {
        Functor {
            dom: c.clone(),
            cod: c.clone(),
            obj: c.objects().collect(),
            arr: c.arrows().collect(),
        }
    }

    /// The functor constant at object `y`.
    pub fn constant(dom: &Arc<FinCat>, cod: &Arc<FinCat>, y: Obj) -> Functor {
        Functor {
            dom: dom.clone(),
            cod: cod.clone(),
            obj: vec![y; dom.n_obj()],
            arr: vec![cod.id(y); dom.n_arr()],
        }
    }

    pub fn on_obj(&self, x: Obj) -> Obj {
        self.obj[x as usize]
    }

    pub fn on_arr(&self, a: Arr) -> Arr {
        self.arr[a as usize]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Functor) -> Functor {
        assert!(
            same_cat(&first.cod, &self.dom),
            "composing {} -> {} after {} -> {}",
            self.dom.name(),
            self.cod.name(),
            first.dom.name(),
            first.cod.name()
        );
        Functor {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            obj: first.obj.iter().map(|&x| self.obj[x as usize]).collect(),
            arr: first.arr.iter().map(|&a| self.arr[a as usize]).collect(),
        }
    }

    pub fn try_after(&self, first: &Functor) -> Result<Functor, KernelError> {
        if !same_cat(&first.cod, &self.dom) {
            return Err(KernelError::EndpointMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.dom.name(),
                self.cod.name(),
                first.dom.name(),
                first.cod.name()
            )));
        }
        Ok(self.after(first))
    }

    /// Re-target to a structurally equal codomain (keeps shape metadata of `cod`).
    pub fn with_cod(&self, cod: &Arc<FinCat>) -> Functor {
        assert!(same_cat(&self.cod, cod));
        Functor { cod: cod.clone(), ..self.clone() }
    }

    pub fn with_dom(&self, dom: &Arc<FinCat>) -> Functor {
        assert!(same_cat(&self.dom, dom));
        Functor { dom: dom.clone(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), FunctorError> {
        let (d, c) = (&self.dom, &self.cod);
        if self.obj.len() != d.n_obj() || self.arr.len() != d.n_arr() {
            return Err(FunctorError::Shape);
        }
        if self.obj.iter().any(|&y| y as usize >= c.n_obj()) || self.arr.iter().any(|&b| b as usize >= c.n_arr()) {
            return Err(FunctorError::Shape);
        }
        for a in d.arrows() {
            let b = self.on_arr(a);
            if c.src(b) != self.on_obj(d.src(a)) || c.tgt(b) != self.on_obj(d.tgt(a)) {
                return Err(FunctorError::ArrowEndpoints { arrow: d.arr_name(a).into(), image: c.arr_name(b).into() });
            }
        }
        for x in d.objects() {
            let b = self.on_arr(d.id(x));
            if b != c.id(self.on_obj(x)) {
                return Err(FunctorError::Identity { obj: d.obj_name(x).into(), image: c.arr_name(b).into() });
            }
        }
        for f in d.arrows() {
            for y in d.objects() {
                for &g in d.hom(d.tgt(f), y) {
                    let lhs = self.on_arr(d.comp(g, f));
                    let rhs = c.comp(self.on_arr(g), self.on_arr(f));
                    if lhs != rhs {
                        return Err(FunctorError::Composition {
                            g: d.arr_name(g).into(),
                            f: d.arr_name(f).into(),
                            lhs: c.arr_name(lhs).into(),
                            rhs: c.arr_name(rhs).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// First domain arrow on which two parallel functors differ.
    pub fn first_difference(&self, other: &Functor) -> Option<Arr> {
        self.dom.arrows().find(|&a| self.arr[a as usize] != other.arr[a as usize])
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.cod.n_obj()];
        for &y in &self.obj {
            if std::mem::replace(&mut seen[y as usize], true) {
                return false;
            }
        }
        true
    }
}

/// Describe the first arrow where two functors differ, for witnesses.
pub fn difference_witness(f: &Functor, g: &Functor) -> String {
    if !same_cat(&f.dom, &g.dom) || !same_cat(&f.cod, &g.cod) {
        return format!(
            "endpoints differ: {} -> {} vs {} -> {}",
            f.dom.name(),
            f.cod.name(),
            g.dom.name(),
            g.cod.name()
        );
    }
    match f.first_difference(g) {
        None => "functors are equal".into(),
        Some(a) => format!(
            "on arrow {}: {} vs {}",
            f.dom.arr_name(a),
            f.cod.arr_name(f.on_arr(a)),
            f.cod.arr_name(g.on_arr(a))
        ),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("invalid functor: {0}")]
    Functor(#[from] FunctorError),
    #[error("induced map undefined: {0}")]
    Induce(String),
    #[error("not of product shape: {0}")]
    NotProduct(String),
}

/// A natural transformation `source ⇒ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    pub source: Functor,
    pub target: Functor,
    pub comps: Vec<Arr>,
}

impl NatTrans {
    pub fn validate(&self) -> Result<(), String> {
        let (s, t) = (&self.source, &self.target);
        if !same_cat(&s.dom, &t.dom) || !same_cat(&s.cod, &t.cod) {
            return Err("source and target functors are not parallel".into());
        }
        let (d, c) = (&s.dom, &s.cod);
        if self.comps.len() != d.n_obj() {
            return Err("wrong number of components".into());
        }
        for x in d.objects() {
            let a = self.comps[x as usize];
            if c.src(a) != s.on_obj(x) || c.tgt(a) != t.on_obj(x) {
                return Err(format!("component at {} has the wrong endpoints", d.obj_name(x)));
            }
        }
        for u in d.arrows() {
            let (x, y) = (d.src(u), d.tgt(u));
            let lhs = c.comp(self.comps[y as usize], s.on_arr(u));
            let rhs = c.comp(t.on_arr(u), self.comps[x as usize]);
            if lhs != rhs {
                return Err(format!("naturality fails at {}", d.arr_name(u)));
            }
        }
        Ok(())
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(|&a| self.source.cod.is_iso(a))
    }
}

/// Natural transformations `f ⇒ g` whose components pass `allow`, in
/// lexicographic order of components.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor, allow: &dyn Fn(Arr) -> bool) -> Vec<Vec<Arr>> {
    let d = &f.dom;
    let c = &f.cod;
    let n = d.n_obj();
    let cands: Vec<Vec<Arr>> = d
        .objects()
        .map(|x| c.hom(f.on_obj(x), g.on_obj(x)).iter().copied().filter(|&a| allow(a)).collect())
        .collect();
    let mut out = Vec::new();
    let mut comps = vec![NONE; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        d: &FinCat,
        c: &FinCat,
        f: &Functor,
        g: &Functor,
        cands: &[Vec<Arr>],
        comps: &mut Vec<Arr>,
        out: &mut Vec<Vec<Arr>>,
    ) {
        if k == comps.len() {
            out.push(comps.clone());
            return;
        }
        'cand: for &a in &cands[k] {
            comps[k] = a;
            let x = k as Obj;
            for y in 0..=x {
                for &u in d.hom(x, y).iter().chain(d.hom(y, x)) {
                    let (s, t) = (d.src(u), d.tgt(u));
                    if c.comp(comps[t as usize], f.on_arr(u)) != c.comp(g.on_arr(u), comps[s as usize]) {
                        continue 'cand;
                    }
                }
            }
            rec(k + 1, d, c, f, g, cands, comps, out);
        }
        comps[k] = NONE;
    }
    rec(0, d, c, f, g, &cands, &mut comps, &mut out);
    out
}

/// Lifting-problem square: `right ∘ top = bottom ∘ left`.
///
/// ```text
///   a0 --top--> a2
///   |           |
///  left       right
///   v           v
///   a1 -bottom> a3
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub top: Functor,
    pub left: Functor,
    pub right: Functor,
    pub bottom: Functor,
}

impl Square {
    pub fn check(&self) -> Result<(), String> {
        let ok = same_cat(&self.top.dom, &self.left.dom)
            && same_cat(&self.top.cod, &self.right.dom)
            && same_cat(&self.left.cod, &self.bottom.dom)
            && same_cat(&self.right.cod, &self.bottom.cod);
        if !ok {
            return Err("square endpoints do not match".into());
        }
        let a = self.right.after(&self.top);
        let b = self.bottom.after(&self.left);
        if a != b {
            return Err(format!("square does not commute: {}", difference_witness(&a, &b)));
        }
        Ok(())
    }

    /// Whether `l` is a diagonal filler.
    pub fn filled_by(&self, l: &Functor) -> Result<(), String> {
        if !same_cat(&l.dom, &self.left.cod) || !same_cat(&l.cod, &self.top.cod) {
            return Err("lift has the wrong endpoints".into());
        }
        let upper = l.after(&self.left);
        if upper != self.top {
            return Err(format!("upper triangle fails {}", difference_witness(&upper, &self.top)));
        }
        let lower = self.right.after(l);
        if lower != self.bottom {
            return Err(format!("lower triangle fails {}", difference_witness(&lower, &self.bottom)));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Functor search

/// Backtracking search over functors `dom → cod` with per-object candidate
/// lists and a per-arrow admissibility test. Objects are assigned in order;
/// an arrow is assigned as soon as both endpoints are, and composition is
/// checked the moment the last arrow of a triple is fixed.
pub struct FunctorSearch<'a> {
    dom: &'a Arc<FinCat>,
    cod: &'a Arc<FinCat>,
    obj_cands: Vec<Vec<Obj>>,
    forced: Vec<Arr>,
    arr_ok: Option<Box<dyn Fn(Arr, Arr) -> bool + 'a>>,
}

impl<'a> FunctorSearch<'a> {
    pub fn new(dom: &'a Arc<FinCat>, cod: &'a Arc<FinCat>) -> Self {
        FunctorSearch {
            dom,
            cod,
            obj_cands: vec![cod.objects().collect(); dom.n_obj()],
            forced: vec![NONE; dom.n_arr()],
            arr_ok: None,
        }
    }

    /// Require `F ∘ along = value`. `None` when the requirement is
    /// contradictory on its face (one object or arrow asked to go two places).
    pub fn force_along(mut self, along: &Functor, value: &Functor) -> Option<Self> {
        assert!(same_cat(&along.cod, self.dom) && same_cat(&value.cod, self.cod));
        for x in along.dom.objects() {
            let (d, v) = (along.on_obj(x) as usize, value.on_obj(x));
            if !self.obj_cands[d].contains(&v) {
                return None;
            }
            self.obj_cands[d] = vec![v];
        }
        for a in along.dom.arrows() {
            let (d, v) = (along.on_arr(a) as usize, value.on_arr(a));
            if self.forced[d] != NONE && self.forced[d] != v {
                return None;
            }
            self.forced[d] = v;
        }
        Some(self)
    }

    pub fn restrict_object(mut self, x: Obj, cands: Vec<Obj>) -> Self {
        let keep: Vec<Obj> = self.obj_cands[x as usize].iter().copied().filter(|y| cands.contains(y)).collect();
        self.obj_cands[x as usize] = keep;
        self
    }

    pub fn restrict_objects(mut self, f: impl Fn(Obj, Obj) -> bool) -> Self {
        for x in self.dom.objects() {
            self.obj_cands[x as usize].retain(|&y| f(x, y));
        }
        self
    }

    /// `ok(a, b)` decides whether domain arrow `a` may go to codomain arrow `b`.
    pub fn restrict_arrows(mut self, ok: impl Fn(Arr, Arr) -> bool + 'a) -> Self {
        self.arr_ok = Some(Box::new(ok));
        self
    }

    fn admits(&self, a: Arr, b: Arr) -> bool {
        let f = self.forced[a as usize];
        (f == NONE || f == b) && self.arr_ok.as_ref().is_none_or(|ok| ok(a, b))
    }

    pub fn for_each(&self, visit: &mut dyn FnMut(&Functor) -> ControlFlow<()>) {
        let d = self.dom;
        let c = self.cod;
        let n_obj = d.n_obj();
        // arrows that become assignable once object k is placed
        let mut ready: Vec<Vec<Arr>> = vec![Vec::new(); n_obj];
        for a in d.arrows() {
            if d.is_identity(a) {
                continue;
            }
            let k = d.src(a).max(d.tgt(a));
            ready[k as usize].push(a);
        }
        let mut st = SearchState {
            obj: vec![NONE; n_obj],
            arr: vec![NONE; d.n_arr()],
        };
        let _ = self.place_object(0, &ready, &mut st, visit, c);
    }

    fn place_object(
        &self,
        k: usize,
        ready: &[Vec<Arr>],
        st: &mut SearchState,
        visit: &mut dyn FnMut(&Functor) -> ControlFlow<()>,
        c: &Arc<FinCat>,
    ) -> ControlFlow<()> {
        let d = self.dom;
        if k == d.n_obj() {
            let f = Functor { dom: d.clone(), cod: c.clone(), obj: st.obj.clone(), arr: st.arr.clone() };
            return visit(&f);
        }
        for &y in &self.obj_cands[k] {
            let idx = d.id(k as Obj);
            if !self.admits(idx, c.id(y)) {
                continue;
            }
            st.obj[k] = y;
            st.arr[idx as usize] = c.id(y);
            if self.check_arrow(idx, st) {
                self.place_arrow(k, 0, ready, st, visit, c)?;
            }
            st.arr[idx as usize] = NONE;
            st.obj[k] = NONE;
        }
        ControlFlow::Continue(())
    }

    fn place_arrow(
        &self,
        k: usize,
        i: usize,
        ready: &[Vec<Arr>],
        st: &mut SearchState,
        visit: &mut dyn FnMut(&Functor) -> ControlFlow<()>,
        c: &Arc<FinCat>,
    ) -> ControlFlow<()> {
        if i == ready[k].len() {
            return self.place_object(k + 1, ready, st, visit, c);
        }
        let d = self.dom;
        let a = ready[k][i];
        let (s, t) = (st.obj[d.src(a) as usize], st.obj[d.tgt(a) as usize]);
        for &b in c.hom(s, t) {
            if !self.admits(a, b) {
                continue;
            }
            st.arr[a as usize] = b;
            if self.check_arrow(a, st) {
                self.place_arrow(k, i + 1, ready, st, visit, c)?;
            }
        }
        st.arr[a as usize] = NONE;
        ControlFlow::Continue(())
    }

    /// Check every composition triple containing `a` whose three arrows are assigned.
    fn check_arrow(&self, a: Arr, st: &SearchState) -> bool {
        let d = self.dom;
        let c = self.cod;
        let fa = st.arr[a as usize];
        // a ∘ f and g ∘ a
        for y in d.objects() {
            if st.obj[y as usize] == NONE {
                continue;
            }
            for &f in d.hom(y, d.src(a)) {
                let ff = st.arr[f as usize];
                if ff == NONE {
                    continue;
                }
                let h = st.arr[d.comp(a, f) as usize];
                if h != NONE && h != c.comp(fa, ff) {
                    return false;
                }
            }
            for &g in d.hom(d.tgt(a), y) {
                let fg = st.arr[g as usize];
                if fg == NONE {
                    continue;
                }
                let h = st.arr[d.comp(g, a) as usize];
                if h != NONE && h != c.comp(fg, fa) {
                    return false;
                }
            }
        }
        // a as a composite g ∘ f
        let (x, z) = (d.src(a), d.tgt(a));
        for y in d.objects() {
            if st.obj[y as usize] == NONE {
                continue;
            }
            for &f in d.hom(x, y) {
                let ff = st.arr[f as usize];
                if ff == NONE {
                    continue;
                }
                for &g in d.hom(y, z) {
                    let fg = st.arr[g as usize];
                    if fg == NONE || d.comp(g, f) != a {
                        continue;
                    }
                    if c.comp(fg, ff) != fa {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn first(&self) -> Option<Functor> {
        let mut out = None;
        self.for_each(&mut |f| {
            out = Some(f.clone());
            ControlFlow::Break(())
        });
        out
    }

    pub fn all(&self) -> Vec<Functor> {
        let mut out = Vec::new();
        self.for_each(&mut |f| {
            out.push(f.clone());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.for_each(&mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

struct SearchState {
    obj: Vec<Obj>,
    arr: Vec<Arr>,
}

/// Every functor `a → b`, in the deterministic search order.
pub fn enumerate_functors(a: &Arc<FinCat>, b: &Arc<FinCat>) -> Vec<Functor> {
    FunctorSearch::new(a, b).all()
}

// ---------------------------------------------------------------------------
// Induced maps out of colimits

/// The unique functor `p → t` agreeing with each `(leg into p, leg into t)`
/// pair, provided `p` is generated under composition by the images of the
/// legs. Inconsistent data or an ungenerated arrow is an error; the result is
/// validated before it is returned.
pub fn induce(p: &Arc<FinCat>, t: &Arc<FinCat>, legs: &[(&Functor, &Functor)]) -> Result<Functor, KernelError> {
    let mut arr = vec![NONE; p.n_arr()];
    let mut obj = vec![NONE; p.n_obj()];
    let mut queue = Vec::new();
    for (into_p, into_t) in legs {
        if !same_cat(&into_p.cod, p) || !same_cat(&into_t.cod, t) || !same_cat(&into_p.dom, &into_t.dom) {
            return Err(KernelError::Induce("leg endpoints do not match".into()));
        }
        for x in into_p.dom.objects() {
            let (px, tx) = (into_p.on_obj(x), into_t.on_obj(x));
            if obj[px as usize] == NONE {
                obj[px as usize] = tx;
            } else if obj[px as usize] != tx {
                return Err(KernelError::Induce(format!("object {} gets two images", p.obj_name(px))));
            }
        }
        for a in into_p.dom.arrows() {
            let (pa, ta) = (into_p.on_arr(a), into_t.on_arr(a));
            if arr[pa as usize] == NONE {
                arr[pa as usize] = ta;
                queue.push(pa);
            } else if arr[pa as usize] != ta {
                return Err(KernelError::Induce(format!("arrow {} gets two images", p.arr_name(pa))));
            }
        }
    }
    for x in p.objects() {
        if obj[x as usize] == NONE {
            return Err(KernelError::Induce(format!("object {} is not reached by any leg", p.obj_name(x))));
        }
        let i = p.id(x);
        if arr[i as usize] == NONE {
            arr[i as usize] = t.id(obj[x as usize]);
            queue.push(i);
        }
    }
    while let Some(a) = queue.pop() {
        let fa = arr[a as usize];
        let mut found = Vec::new();
        for y in p.objects() {
            for &f in p.hom(y, p.src(a)) {
                let ff = arr[f as usize];
                if ff != NONE {
                    found.push((p.comp(a, f), t.comp(fa, ff)));
                }
            }
            for &g in p.hom(p.tgt(a), y) {
                let fg = arr[g as usize];
                if fg != NONE {
                    found.push((p.comp(g, a), t.comp(fg, fa)));
                }
            }
        }
        for (c, val) in found {
            if arr[c as usize] == NONE {
                arr[c as usize] = val;
                queue.push(c);
            } else if arr[c as usize] != val {
                return Err(KernelError::Induce(format!("arrow {} gets two images", p.arr_name(c))));
            }
        }
    }
    if let Some(a) = p.arrows().find(|&a| arr[a as usize] == NONE) {
        return Err(KernelError::Induce(format!("arrow {} is not generated by the legs", p.arr_name(a))));
    }
    let f = Functor { dom: p.clone(), cod: t.clone(), obj, arr };
    f.validate()?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Products

/// Cartesian product. Object `(x, y)` has index `x * |obj b| + y`, arrow
/// `(f, g)` has index `f * |arr b| + g`.
pub fn product(a: &Arc<FinCat>, b: &Arc<FinCat>) -> Arc<FinCat> {
    let (nb, mb) = (b.n_obj(), b.n_arr());
    let objects = a
        .objects()
        .flat_map(|x| b.objects().map(move |y| (x, y)))
        .map(|(x, y)| format!("({},{})", a.obj_name(x), b.obj_name(y)))
        .collect();
    let arrows: Vec<ArrowRec> = a
        .arrows()
        .flat_map(|f| b.arrows().map(move |g| (f, g)))
        .map(|(f, g)| ArrowRec {
            name: format!("({},{})", a.arr_name(f), b.arr_name(g)),
            src: a.src(f) * nb as u32 + b.src(g),
            tgt: a.tgt(f) * nb as u32 + b.tgt(g),
        })
        .collect();
    let identity = a.objects().flat_map(|x| b.objects().map(move |y| a.id(x) * mb as u32 + b.id(y))).collect();
    let m = mb as u32;
    let comp = CompTable::from_fn(&arrows, a.n_obj() * nb, |l, r| {
        a.comp(l / m, r / m) * m + b.comp(l % m, r % m)
    });
    Arc::new(FinCat::from_tables(
        format!("{}x{}", a.name(), b.name()),
        objects,
        arrows,
        identity,
        comp,
        Shape::Product { left: a.clone(), right: b.clone() },
    ))
}

pub fn pair_obj(prod: &FinCat, x: Obj, y: Obj) -> Obj {
    let (_, b) = prod.product_parts().expect("product");
    x * b.n_obj() as u32 + y
}

pub fn pair_arr(prod: &FinCat, f: Arr, g: Arr) -> Arr {
    let (_, b) = prod.product_parts().expect("product");
    f * b.n_arr() as u32 + g
}

pub fn split_obj(prod: &FinCat, z: Obj) -> (Obj, Obj) {
    let (_, b) = prod.product_parts().expect("product");
    let n = b.n_obj() as u32;
    (z / n, z % n)
}

pub fn split_arr(prod: &FinCat, z: Arr) -> (Arr, Arr) {
    let (_, b) = prod.product_parts().expect("product");
    let n = b.n_arr() as u32;
    (z / n, z % n)
}

pub fn projection_left(prod: &Arc<FinCat>) -> Functor {
    let (a, _) = prod.product_parts().expect("product");
    Functor {
        dom: prod.clone(),
        cod: a.clone(),
        obj: prod.objects().map(|z| split_obj(prod, z).0).collect(),
        arr: prod.arrows().map(|z| split_arr(prod, z).0).collect(),
    }
}

pub fn projection_right(prod: &Arc<FinCat>) -> Functor {
    let (_, b) = prod.product_parts().expect("product");
    Functor {
        dom: prod.clone(),
        cod: b.clone(),
        obj: prod.objects().map(|z| split_obj(prod, z).1).collect(),
        arr: prod.arrows().map(|z| split_arr(prod, z).1).collect(),
    }
}

/// `⟨f, g⟩ : X → A × B`.
pub fn pairing(f: &Functor, g: &Functor, prod: &Arc<FinCat>) -> Functor {
    assert!(same_cat(&f.dom, &g.dom));
    Functor {
        dom: f.dom.clone(),
        cod: prod.clone(),
        obj: f.dom.objects().map(|x| pair_obj(prod, f.on_obj(x), g.on_obj(x))).collect(),
        arr: f.dom.arrows().map(|a| pair_arr(prod, f.on_arr(a), g.on_arr(a))).collect(),
    }
}

/// `f × g : A × B → C × D`.
pub fn product_map(f: &Functor, g: &Functor, dom: &Arc<FinCat>, cod: &Arc<FinCat>) -> Functor {
    Functor {
        dom: dom.clone(),
        cod: cod.clone(),
        obj: dom
            .objects()
            .map(|z| {
                let (x, y) = split_obj(dom, z);
                pair_obj(cod, f.on_obj(x), g.on_obj(y))
            })
            .collect(),
        arr: dom
            .arrows()
            .map(|z| {
                let (a, b) = split_arr(dom, z);
                pair_arr(cod, f.on_arr(a), g.on_arr(b))
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Exponentials

/// Data of `b^i`: objects are functors `i → b`, arrows natural transformations.
#[derive(Debug)]
pub struct ExpData {
    pub exponent: Arc<FinCat>,
    pub base: Arc<FinCat>,
    pub obj_maps: Vec<Functor>,
    pub comps: Vec<Vec<Arr>>,
    obj_index: HashMap<Vec<Arr>, Obj>,
    arr_index: HashMap<(Obj, Vec<Arr>), Arr>,
}

impl ExpData {
    pub fn object_of(&self, f: &Functor) -> Option<Obj> {
        self.obj_index.get(&f.arr).copied()
    }

    pub fn object_of_arrows(&self, arr: &[Arr]) -> Option<Obj> {
        self.obj_index.get(arr).copied()
    }

    pub fn arrow_of(&self, src: Obj, comps: &[Arr]) -> Option<Arr> {
        self.arr_index.get(&(src, comps.to_vec())).copied()
    }
}

pub fn exp_data(c: &FinCat) -> &Arc<ExpData> {
    match c.shape() {
        Shape::Exponential(d) => d,
        _ => panic!("{} is not an exponential", c.name()),
    }
}

/// The functor category `b^i`.
pub fn exponential_by(i: &Arc<FinCat>, b: &Arc<FinCat>) -> Arc<FinCat> {
    let functors = enumerate_functors(i, b);
    let obj_index: HashMap<Vec<Arr>, Obj> = functors.iter().enumerate().map(|(k, f)| (f.arr.clone(), k as Obj)).collect();
    let mut arrows = Vec::new();
    let mut comps_all: Vec<Vec<Arr>> = Vec::new();
    let mut identity = vec![NONE; functors.len()];
    let name_of = |f: &Functor| -> String {
        let parts: Vec<&str> = i.arrows().map(|a| b.arr_name(f.on_arr(a))).collect();
        format!("[{}]", parts.join(","))
    };
    let obj_names: Vec<String> = functors.iter().map(name_of).collect();
    for (s, f) in functors.iter().enumerate() {
        for (t, g) in functors.iter().enumerate() {
            for comps in enumerate_nat_trans(f, g, &|_| true) {
                let is_id = s == t && i.objects().all(|x| comps[x as usize] == b.id(f.on_obj(x)));
                if is_id {
                    identity[s] = arrows.len() as Arr;
                }
                let parts: Vec<&str> = comps.iter().map(|&a| b.arr_name(a)).collect();
                arrows.push(ArrowRec {
                    name: format!("<{}>:{}", parts.join(","), obj_names[s]),
                    src: s as Obj,
                    tgt: t as Obj,
                });
                comps_all.push(comps);
            }
        }
    }
    let arr_index: HashMap<(Obj, Vec<Arr>), Arr> =
        comps_all.iter().enumerate().map(|(k, cs)| ((arrows[k].src, cs.clone()), k as Arr)).collect();
    let comp = CompTable::from_fn(&arrows, functors.len(), |g, f| {
        let (g, f) = (g as usize, f as usize);
        let cs: Vec<Arr> = i.objects().map(|x| b.comp(comps_all[g][x as usize], comps_all[f][x as usize])).collect();
        arr_index[&(arrows[f].src, cs)]
    });
    let data = ExpData { exponent: i.clone(), base: b.clone(), obj_maps: functors, comps: comps_all, obj_index, arr_index };
    Arc::new(FinCat::from_tables(
        format!("{}^{}", b.name(), i.name()),
        obj_names,
        arrows,
        identity,
        comp,
        Shape::Exponential(Arc::new(data)),
    ))
}

/// Evaluation at an object of the exponent: `b^i → b`.
pub fn evaluation(exp: &Arc<FinCat>, at: Obj) -> Functor {
    let d = exp_data(exp);
    Functor {
        dom: exp.clone(),
        cod: d.base.clone(),
        obj: d.obj_maps.iter().map(|f| f.on_obj(at)).collect(),
        arr: d.comps.iter().map(|c| c[at as usize]).collect(),
    }
}

/// Postcomposition `f^i : a^i → b^i`.
pub fn exp_postcompose(f: &Functor, dom_exp: &Arc<FinCat>, cod_exp: &Arc<FinCat>) -> Functor {
    let dd = exp_data(dom_exp);
    let cd = exp_data(cod_exp);
    let obj: Vec<Obj> = dd.obj_maps.iter().map(|g| cd.object_of(&f.after(g)).expect("image functor")).collect();
    let arr = dom_exp
        .arrows()
        .map(|a| {
            let cs: Vec<Arr> = dd.comps[a as usize].iter().map(|&c| f.on_arr(c)).collect();
            cd.arrow_of(obj[dom_exp.src(a) as usize], &cs).expect("image transformation")
        })
        .collect();
    Functor { dom: dom_exp.clone(), cod: cod_exp.clone(), obj, arr }
}

// ---------------------------------------------------------------------------
// Pullbacks

#[derive(Debug)]
pub struct PullbackData {
    pub left: Functor,
    pub right: Functor,
    pub objs: Vec<(Obj, Obj)>,
    pub arrs: Vec<(Arr, Arr)>,
    obj_index: HashMap<(Obj, Obj), Obj>,
    arr_index: HashMap<(Arr, Arr), Arr>,
}

impl PullbackData {
    pub fn object_of(&self, x: Obj, y: Obj) -> Option<Obj> {
        self.obj_index.get(&(x, y)).copied()
    }

    pub fn arrow_of(&self, a: Arr, b: Arr) -> Option<Arr> {
        self.arr_index.get(&(a, b)).copied()
    }
}

pub fn pullback_data(c: &FinCat) -> &Arc<PullbackData> {
    match c.shape() {
        Shape::Pullback(d) => d,
        _ => panic!("{} is not a pullback", c.name()),
    }
}

/// Pullback of the cospan `a --left--> c <--right-- b`: compatible pairs.
pub fn pullback(left: &Functor, right: &Functor) -> Result<Arc<FinCat>, KernelError> {
    if !same_cat(&left.cod, &right.cod) {
        return Err(KernelError::EndpointMismatch("cospan legs have different codomains".into()));
    }
    let (a, b) = (&left.dom, &right.dom);
    let mut objs = Vec::new();
    for x in a.objects() {
        for y in b.objects() {
            if left.on_obj(x) == right.on_obj(y) {
                objs.push((x, y));
            }
        }
    }
    let obj_index: HashMap<(Obj, Obj), Obj> = objs.iter().enumerate().map(|(k, &p)| (p, k as Obj)).collect();
    let mut arrs = Vec::new();
    let mut recs = Vec::new();
    for f in a.arrows() {
        for g in b.arrows() {
            if left.on_arr(f) != right.on_arr(g) {
                continue;
            }
            let src = obj_index[&(a.src(f), b.src(g))];
            let tgt = obj_index[&(a.tgt(f), b.tgt(g))];
            recs.push(ArrowRec { name: format!("({},{})", a.arr_name(f), b.arr_name(g)), src, tgt });
            arrs.push((f, g));
        }
    }
    let arr_index: HashMap<(Arr, Arr), Arr> = arrs.iter().enumerate().map(|(k, &p)| (p, k as Arr)).collect();
    let identity = objs.iter().map(|&(x, y)| arr_index[&(a.id(x), b.id(y))]).collect();
    let comp = CompTable::from_fn(&recs, objs.len(), |gi, fi| {
        let ((g1, g2), (f1, f2)) = (arrs[gi as usize], arrs[fi as usize]);
        arr_index[&(a.comp(g1, f1), b.comp(g2, f2))]
    });
    let names = objs.iter().map(|&(x, y)| format!("({},{})", a.obj_name(x), b.obj_name(y))).collect();
    let data = PullbackData { left: left.clone(), right: right.clone(), objs, arrs, obj_index, arr_index };
    Ok(Arc::new(FinCat::from_tables(
        format!("{}x_{}{}", a.name(), left.cod.name(), b.name()),
        names,
        recs,
        identity,
        comp,
        Shape::Pullback(Arc::new(data)),
    )))
}

pub fn pullback_projections(p: &Arc<FinCat>) -> (Functor, Functor) {
    let d = pullback_data(p);
    let pr0 = Functor {
        dom: p.clone(),
        cod: d.left.dom.clone(),
        obj: d.objs.iter().map(|o| o.0).collect(),
        arr: d.arrs.iter().map(|a| a.0).collect(),
    };
    let pr1 = Functor {
        dom: p.clone(),
        cod: d.right.dom.clone(),
        obj: d.objs.iter().map(|o| o.1).collect(),
        arr: d.arrs.iter().map(|a| a.1).collect(),
    };
    (pr0, pr1)
}

/// The map into a pullback induced by two legs that agree on the base.
pub fn pullback_pair(p: &Arc<FinCat>, f: &Functor, g: &Functor) -> Result<Functor, KernelError> {
    let d = pullback_data(p);
    if !same_cat(&f.dom, &g.dom) {
        return Err(KernelError::EndpointMismatch("legs have different domains".into()));
    }
    let mut obj = Vec::with_capacity(f.dom.n_obj());
    for x in f.dom.objects() {
        obj.push(d.object_of(f.on_obj(x), g.on_obj(x)).ok_or_else(|| {
            KernelError::Induce(format!("legs disagree on object {}", f.dom.obj_name(x)))
        })?);
    }
    let mut arr = Vec::with_capacity(f.dom.n_arr());
    for a in f.dom.arrows() {
        arr.push(d.arrow_of(f.on_arr(a), g.on_arr(a)).ok_or_else(|| {
            KernelError::Induce(format!("legs disagree on arrow {}", f.dom.arr_name(a)))
        })?);
    }
    Ok(Functor { dom: f.dom.clone(), cod: p.clone(), obj, arr })
}

// ---------------------------------------------------------------------------
// Mapping cylinder data (the category itself is built in `interval`)

#[derive(Debug)]
pub struct MapCylData {
    pub f: Functor,
    /// object `k < |a0|` is the tagged copy of `a0`-object `k`; the rest are `a1`-objects
    pub n_top: usize,
    offsets: Vec<u32>,
    pos_in_hom: Vec<u32>,
}

impl MapCylData {
    pub(crate) fn new(f: Functor, n_top: usize, offsets: Vec<u32>, pos_in_hom: Vec<u32>) -> Self {
        MapCylData { f, n_top, offsets, pos_in_hom }
    }

    /// Underlying `a1`-object of an object of the mapping cylinder.
    pub fn under(&self, x: Obj) -> Obj {
        if (x as usize) < self.n_top {
            self.f.on_obj(x)
        } else {
            x - self.n_top as u32
        }
    }

    pub fn top(&self, a: Obj) -> Obj {
        a
    }

    pub fn bottom(&self, b: Obj) -> Obj {
        b + self.n_top as u32
    }

    /// The arrow `x → y` of the mapping cylinder sitting over `a1`-arrow `beta`.
    pub fn arrow(&self, n_obj: usize, x: Obj, y: Obj, beta: Arr) -> Arr {
        self.offsets[x as usize * n_obj + y as usize] + self.pos_in_hom[beta as usize]
    }
}

pub fn mapcyl_data(c: &FinCat) -> &Arc<MapCylData> {
    match c.shape() {
        Shape::MappingCylinder(d) => d,
        _ => panic!("{} is not a mapping cylinder", c.name()),
    }
}

// ---------------------------------------------------------------------------
// Oracles

/// Fully faithful and essentially surjective, with a witness on failure.
pub fn equivalence_oracle(f: &Functor) -> Result<(), String> {
    let (a, b) = (&f.dom, &f.cod);
    for x in a.objects() {
        for y in a.objects() {
            let src = a.hom(x, y);
            let tgt = b.hom(f.on_obj(x), f.on_obj(y));
            let mut hit = vec![false; tgt.len()];
            for &u in src {
                let pos = tgt.iter().position(|&v| v == f.on_arr(u)).expect("functor maps homs to homs");
                if std::mem::replace(&mut hit[pos], true) {
                    return Err(format!("not faithful on hom({}, {})", a.obj_name(x), a.obj_name(y)));
                }
            }
            if hit.iter().any(|h| !h) {
                return Err(format!("not full on hom({}, {})", a.obj_name(x), a.obj_name(y)));
            }
        }
    }
    for z in b.objects() {
        let reached = a.objects().any(|x| b.hom(f.on_obj(x), z).iter().any(|&u| b.is_iso(u)));
        if !reached {
            return Err(format!("object {} is not isomorphic to an image", b.obj_name(z)));
        }
    }
    Ok(())
}

pub fn injective_on_objects_oracle(j: &Functor) -> bool {
    j.is_injective_on_objects()
}

/// Checks that the commuting square `r0 ∘ k0 = r1 ∘ k1` is a pushout as seen
/// by `t`: restriction along `(r0, r1)` is a bijection from functors `P → t`
/// onto the pairs agreeing on `K`. Returns the number of such functors.
pub fn pushout_bijection(k0: &Functor, k1: &Functor, r0: &Functor, r1: &Functor, t: &Arc<FinCat>) -> Result<usize, String> {
    if r0.after(k0) != r1.after(k1) {
        return Err("the square does not commute".into());
    }
    let from_p = enumerate_functors(&r0.cod, t);
    let mut seen = std::collections::HashSet::new();
    for big in &from_p {
        if !seen.insert((big.after(r0).arr, big.after(r1).arr)) {
            return Err(format!("two functors {} -> {} restrict to the same pair", r0.cod.name(), t.name()));
        }
    }
    let mut on_k: HashMap<Vec<Arr>, usize> = HashMap::new();
    for g1 in enumerate_functors(&k1.cod, t) {
        *on_k.entry(g1.after(k1).arr).or_default() += 1;
    }
    let pairs: usize = enumerate_functors(&k0.cod, t).iter().map(|g0| on_k.get(&g0.after(k0).arr).copied().unwrap_or(0)).sum();
    if pairs != from_p.len() {
        return Err(format!("{} compatible pairs into {} but {} functors out of {}", pairs, t.name(), from_p.len(), r0.cod.name()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow2() -> Arc<FinCat> {
        Arc::new(CatBuilder::new("2").object("0").object("1").arrow("u", "0", "1").build().unwrap())
    }

    #[test]
    fn missing_entry_is_reported() {
        let err = CatBuilder::new("c")
            .object("x")
            .arrow("e", "x", "x")
            .build()
            .unwrap_err();
        assert_eq!(err, BuildError::MissingEntry("e".into(), "e".into()));
    }

    #[test]
    fn broken_table_fails_validation() {
        let c = CatBuilder::new("c").object("x").arrow("e", "x", "x").entry("e", "e", "e").build().unwrap();
        assert!(c.validate().is_ok());
        let err = CatBuilder::new("c")
            .object("0")
            .object("1")
            .arrow("f", "0", "1")
            .arrow("g", "1", "0")
            .entry("g", "f", "id_0")
            .entry("f", "g", "id_1")
            .build();
        assert!(err.is_ok());
    }

    #[test]
    fn product_sizes() {
        let two = arrow2();
        let p = product(&two, &two);
        assert_eq!(p.n_obj(), 4);
        assert_eq!(p.n_arr(), 9);
        assert!(p.validate().is_ok());
        assert!(projection_left(&p).validate().is_ok());
        assert!(projection_right(&p).validate().is_ok());
    }

    #[test]
    fn induce_rejects_inconsistent_legs() {
        let two = arrow2();
        let idf = Functor::identity(&two);
        let c0 = Functor::constant(&two, &two, 0);
        assert!(induce(&two, &two, &[(&idf, &idf), (&idf, &c0)]).is_err());
        assert_eq!(induce(&two, &two, &[(&idf, &idf)]).unwrap(), idf);
    }
}
