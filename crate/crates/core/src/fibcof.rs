//! Fibrations and cofibrations of finite categories, their cleavages, and the
//! decision procedures with their independent oracles.
//!
//! A functor `j` is a cofibration exactly when some `r : Cyl(a1) → M_j` has
//! `r ∘ Cyl(j) = d0` and `r ∘ i₀(a1) = d1`. Necessity: lift the square formed
//! by `d0`, `d1` against `m_j`. Sufficiency: a square `(G, H)` is filled by
//! `u ∘ r` with `u : M_j → X` the map induced by `H` and `G`. The search over
//! functors `Cyl(a1) → M_j` is therefore a complete decision procedure.

use std::ops::ControlFlow;
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{
    difference_witness, same_cat, FinCat, Functor, FunctorSearch, KernelError, Obj,
};
use crate::homotopy::{homotopies_between, Homotopy, HomotopyError, RetractDiagram};
use crate::interval::{
    cyl, cyl_map, i0_of, mapping_cocylinder, mapping_cylinder, MappingCylinder,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibCofError {
    #[error("not a fibration: {0}")]
    NotFibration(String),
    #[error("not a cofibration: {0}")]
    NotCofibration(String),
    #[error("not normally cloven: {0}")]
    NotNormallyCloven(String),
    #[error("lifting data malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Every isomorphism out of an image object lifts; on failure, the object and
/// the unliftable isomorphism.
pub fn isofibration_witness(f: &Functor) -> Result<(), String> {
    let (a1, a2) = (&f.dom, &f.cod);
    for x in a1.objects() {
        for beta in a2.isos_from(f.on_obj(x)) {
            if !a1.isos_from(x).any(|a| f.on_arr(a) == beta) {
                return Err(format!("iso {} out of the image of {} has no lift", a2.arr_name(beta), a1.obj_name(x)));
            }
        }
    }
    Ok(())
}

pub fn is_isofibration(f: &Functor) -> bool {
    isofibration_witness(f).is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chooser {
    /// identity over identities, otherwise the least lifting isomorphism
    Canonical,
    /// the greatest lifting isomorphism, with no identity rule; fills squares
    /// but breaks lifting of identities wherever an identity has a
    /// nontrivial lift
    BrokenGreatest,
}

/// A lift-chooser for a fibration `f : a1 → a2`.
#[derive(Clone, Debug)]
pub struct Cleavage {
    pub f: Functor,
    pub chooser: Chooser,
}

impl Cleavage {
    pub fn canonical(f: &Functor) -> Result<Cleavage, FibCofError> {
        isofibration_witness(f).map_err(FibCofError::NotFibration)?;
        Ok(Cleavage { f: f.clone(), chooser: Chooser::Canonical })
    }

    pub fn with_chooser(f: &Functor, chooser: Chooser) -> Result<Cleavage, FibCofError> {
        isofibration_witness(f).map_err(FibCofError::NotFibration)?;
        Ok(Cleavage { f: f.clone(), chooser })
    }

    /// The lift `L : Cyl(a0) → a1` with `L ∘ i₀ = g` and `f ∘ L = h`.
    pub fn lift(&self, g: &Functor, h: &Homotopy) -> Result<Homotopy, FibCofError> {
        let f = &self.f;
        let (a1, a2) = (&f.dom, &f.cod);
        if !same_cat(&g.cod, a1) || !same_cat(h.target(), a2) || !same_cat(&g.dom, h.source()) {
            return Err(FibCofError::Malformed("endpoints of the lifting problem".into()));
        }
        if f.after(g) != h.f0 {
            return Err(FibCofError::Malformed(format!("h does not start at f g: {}", difference_witness(&f.after(g), &h.f0))));
        }
        let a0 = g.dom.clone();
        let theta = h.components();
        let mut psi = Vec::with_capacity(a0.n_obj());
        for x in a0.objects() {
            let t = theta[x as usize];
            let gx = g.on_obj(x);
            let chosen = if self.chooser == Chooser::Canonical && a2.is_identity(t) {
                Some(a1.id(gx))
            } else {
                let mut cands = a1.isos_from(gx).filter(|&a| f.on_arr(a) == t);
                match self.chooser {
                    Chooser::Canonical => cands.next(),
                    Chooser::BrokenGreatest => cands.last(),
                }
            };
            psi.push(chosen.ok_or_else(|| {
                FibCofError::NotFibration(format!("no lift of {} at {}", a2.arr_name(t), a1.obj_name(gx)))
            })?);
        }
        let end_obj: Vec<Obj> = psi.iter().map(|&a| a1.tgt(a)).collect();
        let end_arr = a0
            .arrows()
            .map(|u| {
                let (x, y) = (a0.src(u), a0.tgt(u));
                let inv = a1.inverse(psi[x as usize]).expect("iso");
                a1.comp(psi[y as usize], a1.comp(g.on_arr(u), inv))
            })
            .collect();
        let end = Functor::new(a0.clone(), a1.clone(), end_obj, end_arr);
        Ok(Homotopy::from_components(g, &end, &psi)?)
    }
}

/// Exhaustive cylinder-side lifting test against `i₀(𝟙)`: for every object
/// over which an isomorphism starts, search all functors `𝕀 → a1` for a lift.
pub fn cylinder_side_fibration(f: &Functor) -> Result<(), String> {
    let one = crate::interval::standard().one.clone();
    let i = crate::interval::standard().i.clone();
    let (a1, a2) = (&f.dom, &f.cod);
    let ci = cyl(&one);
    for x in a1.objects() {
        let g = Functor::new(one.clone(), a1.clone(), vec![x], vec![a1.id(x)]);
        for beta in a2.isos_from(f.on_obj(x)) {
            let (x0, x1) = (f.on_obj(x), a2.tgt(beta));
            let inv = a2.inverse(beta).expect("iso");
            let h = Functor::new(i.clone(), a2.clone(), vec![x0, x1], vec![a2.id(x0), a2.id(x1), beta, inv]);
            // carrier Cyl(𝟙) → a2, identified with 𝕀 → a2 through the product order
            let h_cyl = Functor::new(ci.clone(), a2.clone(), h.obj.clone(), h.arr.clone());
            let found = FunctorSearch::new(&ci, a1)
                .force_along(&i0_of(&one), &g)
                .map(|s| {
                    let fh = h_cyl.clone();
                    let f2 = f.clone();
                    s.restrict_arrows(move |a, b| f2.on_arr(b) == fh.on_arr(a))
                })
                .and_then(|s| s.first());
            if found.is_none() {
                return Err(format!("no lift of {} starting at {}", a2.arr_name(beta), a1.obj_name(x)));
            }
        }
    }
    Ok(())
}

/// Co-cylinder-side test: the canonical `m' : a1^𝕀 → N_f` admits a section.
pub fn cocylinder_side_fibration(f: &Functor) -> Result<Functor, String> {
    let mc = mapping_cocylinder(f);
    let m = mc.canonical_m();
    let n = mc.n.clone();
    let path = m.dom.clone();
    let m2 = m.clone();
    let search = FunctorSearch::new(&n, &path)
        .restrict_objects(|x, y| m2.on_obj(y) == x)
        .restrict_arrows(move |a, b| m.on_arr(b) == a);
    search.first().ok_or_else(|| "no section of the path-lifting map".to_string())
}

/// Verdict for `fib`: iso-fibration, and with `normally_cloven` the canonical
/// cleavage additionally passes its condition suite over `family`.
pub fn is_normally_cloven_fibration(f: &Functor, family: &[Arc<FinCat>]) -> Result<Cleavage, FibCofError> {
    let cl = Cleavage::canonical(f)?;
    check_cleavage(&cl, family, 24).map_err(FibCofError::NotNormallyCloven)?;
    Ok(cl)
}

/// Homotopies starting at `f0`, all of them up to `cap`.
pub fn homotopies_from(f0: &Functor, cap: usize) -> Vec<Homotopy> {
    let mut out = Vec::new();
    let (a0, b) = (&f0.dom, &f0.cod);
    let ends = FunctorSearch::new(a0, b).all();
    for g in ends {
        for h in homotopies_between(f0, &g, &|_| true) {
            out.push(h);
            if out.len() >= cap {
                return out;
            }
        }
    }
    out
}

fn take_functors(a: &Arc<FinCat>, b: &Arc<FinCat>, cap: usize) -> Vec<Functor> {
    let mut out = Vec::new();
    FunctorSearch::new(a, b).for_each(&mut |f| {
        out.push(f.clone());
        if out.len() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Filler property, lifting of identities, and compatibility with
/// precomposition, over lifting problems with sources drawn from `family`.
pub fn check_cleavage(cl: &Cleavage, family: &[Arc<FinCat>], cap: usize) -> Result<(), String> {
    let f = &cl.f;
    let a1 = &f.dom;
    for a0 in family {
        for g in take_functors(a0, a1, cap) {
            let fg = f.after(&g);
            let id_lift = cl.lift(&g, &Homotopy::identity(&fg)).map_err(|e| e.to_string())?;
            if id_lift != Homotopy::identity(&g) {
                return Err(format!(
                    "lifting of identities fails for g = {:?}: {}",
                    g,
                    difference_witness(&id_lift.carrier, &Homotopy::identity(&g).carrier)
                ));
            }
            for h in homotopies_from(&fg, cap) {
                let l = cl.lift(&g, &h).map_err(|e| e.to_string())?;
                if l.f0 != g || f.after(&l.carrier) != h.carrier {
                    return Err(format!("lift does not fill the square for g = {g:?}"));
                }
                for a00 in family.iter().filter(|c| c.n_obj() <= 2) {
                    for g0 in take_functors(a00, a0, cap) {
                        let lhs = cl.lift(&g.after(&g0), &h.pre(&g0)).map_err(|e| e.to_string())?;
                        let rhs = l.pre(&g0);
                        if lhs != rhs {
                            return Err(format!(
                                "compatibility with precomposition fails along {g0:?}: {}",
                                difference_witness(&lhs.carrier, &rhs.carrier)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cofibrations

#[derive(Clone, Debug)]
pub struct CofibrationWitness {
    pub j: Functor,
    pub mc: MappingCylinder,
    /// `Cyl(a1) → M_j`
    pub r: Functor,
}

impl CofibrationWitness {
    pub fn check(&self) -> Result<(), FibCofError> {
        self.r.validate().map_err(KernelError::from)?;
        let a1 = &self.j.cod;
        let lhs = self.r.after(&cyl_map(&self.j));
        if lhs != self.mc.d0 {
            return Err(FibCofError::NotCofibration(format!("r Cyl(j) != d0: {}", difference_witness(&lhs, &self.mc.d0))));
        }
        let lhs = self.r.after(&i0_of(a1));
        if lhs != self.mc.d1 {
            return Err(FibCofError::NotCofibration(format!("r i0 != d1: {}", difference_witness(&lhs, &self.mc.d1))));
        }
        let rm = self.r.after(&self.mc.canonical_m());
        if rm != Functor::identity(&self.mc.m) {
            return Err(FibCofError::NotCofibration("r is not a retraction of m".into()));
        }
        Ok(())
    }

    /// Fill the square `(G, H)`: the extension `u ∘ r` with `u` induced by `H` and `G`.
    pub fn extend(&self, big_g: &Functor, big_h: &Homotopy) -> Result<Homotopy, FibCofError> {
        let u = self.mc.induced(&big_h.carrier, big_g)?;
        Ok(Homotopy::from_carrier(u.after(&self.r))?)
    }
}

/// Search `Cyl(a1) → M_j` for the retraction.
pub fn is_cofibration(j: &Functor) -> Option<CofibrationWitness> {
    let mc = mapping_cylinder(j);
    let a1 = &j.cod;
    let c1 = cyl(a1);
    let r = FunctorSearch::new(&c1, &mc.m)
        .force_along(&cyl_map(j), &mc.d0)?
        .force_along(&i0_of(a1), &mc.d1)?
        .first()?;
    Some(CofibrationWitness { j: j.clone(), mc, r })
}

/// The retraction written down directly for a functor injective on objects.
pub fn cofibration_witness_formula(j: &Functor) -> Option<CofibrationWitness> {
    if !j.is_injective_on_objects() {
        return None;
    }
    let mc = mapping_cylinder(j);
    let (a0, a1) = (&j.dom, &j.cod);
    let c1 = cyl(a1);
    let mut pre = vec![None; a1.n_obj()];
    for a in a0.objects() {
        pre[j.on_obj(a) as usize] = Some(a);
    }
    let place = |y: Obj, t: Obj| -> Obj {
        match (t, pre[y as usize]) {
            (1, Some(a)) => mc.top(a),
            _ => mc.bottom(y),
        }
    };
    let obj: Vec<Obj> = c1.objects().map(|z| {
        let (y, t) = crate::fincat::split_obj(&c1, z);
        place(y, t)
    }).collect();
    let arr = c1
        .arrows()
        .map(|z| {
            let (b, _) = crate::fincat::split_arr(&c1, z);
            mc.arrow_over(obj[c1.src(z) as usize], obj[c1.tgt(z) as usize], b)
        })
        .collect();
    let r = Functor::new(c1.clone(), mc.m.clone(), obj, arr);
    Some(CofibrationWitness { j: j.clone(), mc, r })
}

pub fn injective_on_objects(j: &Functor) -> bool {
    crate::fincat::injective_on_objects_oracle(j)
}

/// A normally cloven cofibration: the criterion lift `l : a1 → M_j` with
/// `l ∘ j = j'` and `g' ∘ l = id`, and the deformation of `M_j`.
#[derive(Clone, Debug)]
pub struct CofCleavage {
    pub j: Functor,
    pub mc: MappingCylinder,
    pub l: Functor,
    /// `Cyl(M_j) → M_j`, from `d1 ∘ g'` to the identity
    pub h: Functor,
}

impl CofCleavage {
    /// Search for the criterion lift.
    pub fn search(j: &Functor) -> Option<CofCleavage> {
        let mc = mapping_cylinder(j);
        let jp = mc.j();
        let g = mc.g();
        let a1 = &j.cod;
        let g2 = g.clone();
        let g3 = g.clone();
        let l = FunctorSearch::new(a1, &mc.m)
            .force_along(j, &jp)?
            .restrict_objects(move |b, x| g2.on_obj(x) == b)
            .restrict_arrows(move |b, x| g3.on_arr(x) == b)
            .first()?;
        let h = mc.sdr_carrier();
        Some(CofCleavage { j: j.clone(), mc, l, h })
    }

    /// `l(b) = d0(a, 1)` when `b = j(a)`, else `d1(b)`.
    pub fn formula(j: &Functor) -> Option<CofCleavage> {
        if !j.is_injective_on_objects() {
            return None;
        }
        let mc = mapping_cylinder(j);
        let (a0, a1) = (&j.dom, &j.cod);
        let mut pre = vec![None; a1.n_obj()];
        for a in a0.objects() {
            pre[j.on_obj(a) as usize] = Some(a);
        }
        let obj: Vec<Obj> = a1.objects().map(|b| pre[b as usize].map_or(mc.bottom(b), |a| mc.top(a))).collect();
        let arr = a1.arrows().map(|b| mc.arrow_over(obj[a1.src(b) as usize], obj[a1.tgt(b) as usize], b)).collect();
        let l = Functor::new(a1.clone(), mc.m.clone(), obj, arr);
        let h = mc.sdr_carrier();
        Some(CofCleavage { j: j.clone(), mc, l, h })
    }

    pub fn check_criterion(&self) -> Result<(), FibCofError> {
        let lj = self.l.after(&self.j);
        if lj != self.mc.j() {
            return Err(FibCofError::NotNormallyCloven(format!("l j != j': {}", difference_witness(&lj, &self.mc.j()))));
        }
        let gl = self.mc.g().after(&self.l);
        if gl != Functor::identity(&self.j.cod) {
            return Err(FibCofError::NotNormallyCloven("g' l is not the identity".into()));
        }
        Ok(())
    }

    /// `k(G, H) = u ∘ h ∘ Cyl(l)` with `u` induced by `H` on `d0` and `G` on `d1`;
    /// `k ∘ i₀ = G` and `k ∘ Cyl(j) = H`.
    pub fn extend(&self, big_g: &Functor, big_h: &Homotopy) -> Result<Homotopy, FibCofError> {
        if big_h.f0 != big_g.after(&self.j) {
            return Err(FibCofError::Malformed("H does not start at G j".into()));
        }
        let u = self.mc.induced(&big_h.carrier, big_g)?;
        Ok(Homotopy::from_carrier(u.after(&self.h).after(&cyl_map(&self.l)))?)
    }
}

/// Criterion lift exists, and the induced cleavage passes the extension,
/// identity and postcomposition conditions over targets drawn from `family`.
pub fn is_normally_cloven_cofibration(j: &Functor, family: &[Arc<FinCat>]) -> Result<CofCleavage, FibCofError> {
    let cl = CofCleavage::search(j).ok_or_else(|| FibCofError::NotCofibration("no criterion lift".into()))?;
    cl.check_criterion()?;
    check_cof_cleavage(&cl, family, 12).map_err(FibCofError::NotNormallyCloven)?;
    Ok(cl)
}

pub fn check_cof_cleavage(cl: &CofCleavage, family: &[Arc<FinCat>], cap: usize) -> Result<(), String> {
    let j = &cl.j;
    let a1 = &j.cod;
    for x in family {
        for big_g in take_functors(a1, x, cap) {
            let gj = big_g.after(j);
            let k_id = cl.extend(&big_g, &Homotopy::identity(&gj)).map_err(|e| e.to_string())?;
            if k_id != Homotopy::identity(&big_g) {
                return Err(format!("extension of identities fails for G = {big_g:?}"));
            }
            for big_h in homotopies_from(&gj, cap) {
                let k = cl.extend(&big_g, &big_h).map_err(|e| e.to_string())?;
                if k.f0 != big_g || k.carrier.after(&cyl_map(j)) != big_h.carrier {
                    return Err(format!("extension does not fill for G = {big_g:?}"));
                }
                for y in family.iter().filter(|c| c.n_obj() <= 2) {
                    for g2 in take_functors(x, y, cap) {
                        let lhs = cl.extend(&g2.after(&big_g), &big_h.post(&g2)).map_err(|e| e.to_string())?;
                        if lhs != k.post(&g2) {
                            return Err(format!("compatibility with postcomposition fails along {g2:?}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Brute-force search for an `l` with `l ∘ left = top` and `right ∘ l = bottom`.
pub fn brute_force_filler(sq: &crate::fincat::Square) -> Option<Functor> {
    let (a1, a2) = (&sq.left.cod, &sq.top.cod);
    let right = sq.right.clone();
    let bottom = sq.bottom.clone();
    let right2 = sq.right.clone();
    let bottom2 = sq.bottom.clone();
    FunctorSearch::new(a1, a2)
        .force_along(&sq.left, &sq.top)?
        .restrict_objects(move |b, x| right2.on_obj(x) == bottom2.on_obj(b))
        .restrict_arrows(move |b, x| right.on_arr(x) == bottom.on_arr(b))
        .first()
}

// ---------------------------------------------------------------------------
// Retract diagrams

/// Retract diagrams exhibiting `f_prime` as a retract of `f`, up to `cap`.
pub fn retract_diagrams(f_prime: &Functor, f: &Functor, cap: usize) -> Vec<RetractDiagram> {
    let mut out = Vec::new();
    let (s0, t0) = (&f_prime.dom, &f_prime.cod);
    let (s1, t1) = (&f.dom, &f.cod);
    let id_s0 = Functor::identity(s0);
    let id_t0 = Functor::identity(t0);
    FunctorSearch::new(s0, s1).for_each(&mut |g0| {
        let Some(search_r0) = FunctorSearch::new(s1, s0).force_along(g0, &id_s0) else {
            return ControlFlow::Continue(());
        };
        let r0s = search_r0.all();
        if r0s.is_empty() {
            return ControlFlow::Continue(());
        }
        let Some(search_g1) = FunctorSearch::new(t0, t1).force_along(f_prime, &f.after(g0)) else {
            return ControlFlow::Continue(());
        };
        for g1 in search_g1.all() {
            for r0 in &r0s {
                let Some(s) = FunctorSearch::new(t1, t0).force_along(&g1, &id_t0) else { continue };
                let Some(s) = s.force_along(f, &f_prime.after(r0)) else { continue };
                if let Some(r1) = s.first() {
                    out.push(RetractDiagram {
                        f: f.clone(),
                        f_prime: f_prime.clone(),
                        g0: g0.clone(),
                        r0: r0.clone(),
                        g1: g1.clone(),
                        r1,
                    });
                    if out.len() >= cap {
                        return ControlFlow::Break(());
                    }
                }
            }
        }
        ControlFlow::Continue(())
    });
    out
}

/// One named closure property with its verdict.
#[derive(Clone, Debug)]
pub struct ClosureLine {
    pub name: String,
    pub checked: usize,
    pub failure: Option<String>,
}

/// Closure of the classes under identities, composites and retracts over the corpus.
pub fn closure_checks(functors: &[Functor]) -> Vec<ClosureLine> {
    let mut lines = Vec::new();
    let mut line = |name: &str, items: Vec<Result<(), String>>| {
        let checked = items.len();
        let failure = items.into_iter().find_map(|r| r.err());
        lines.push(ClosureLine { name: name.into(), checked, failure });
    };
    let mut cats: Vec<Arc<FinCat>> = Vec::new();
    for f in functors {
        for c in [&f.dom, &f.cod] {
            if !cats.iter().any(|d| same_cat(d, c)) {
                cats.push(c.clone());
            }
        }
    }
    line(
        "identities are cofibrations",
        cats.iter().map(|c| is_cofibration(&Functor::identity(c)).map(|_| ()).ok_or(format!("id on {}", c.name()))).collect(),
    );
    line(
        "identities are fibrations",
        cats.iter().map(|c| isofibration_witness(&Functor::identity(c))).collect(),
    );
    let cofs: Vec<&Functor> = functors.iter().filter(|f| is_cofibration(f).is_some()).collect();
    let fibs: Vec<&Functor> = functors.iter().filter(|f| is_isofibration(f)).collect();
    let mut comp_cof = Vec::new();
    for j0 in &cofs {
        for j1 in cofs.iter().filter(|j1| same_cat(&j1.dom, &j0.cod)) {
            let c = j1.after(j0);
            comp_cof.push(is_cofibration(&c).map(|_| ()).ok_or(format!("{j1:?} after {j0:?}")));
        }
    }
    line("composites of cofibrations are cofibrations", comp_cof);
    let mut comp_fib = Vec::new();
    for f0 in &fibs {
        for f1 in fibs.iter().filter(|f1| same_cat(&f1.dom, &f0.cod)) {
            comp_fib.push(isofibration_witness(&f1.after(f0)));
        }
    }
    line("composites of fibrations are fibrations", comp_fib);
    let small: Vec<&Functor> = functors.iter().filter(|f| f.dom.n_arr() <= 4 && f.cod.n_arr() <= 4).collect();
    let mut ret_fib = Vec::new();
    let mut ret_cof = Vec::new();
    for fp in &small {
        for f in &small {
            for d in retract_diagrams(fp, f, 1) {
                if is_isofibration(&d.f) {
                    ret_fib.push(isofibration_witness(&d.f_prime).map_err(|e| format!("{fp:?}: {e}")));
                }
                if is_cofibration(&d.f).is_some() {
                    ret_cof.push(is_cofibration(&d.f_prime).map(|_| ()).ok_or(format!("{fp:?}")));
                }
            }
        }
    }
    line("retracts of fibrations are fibrations", ret_fib);
    line("retracts of cofibrations are cofibrations", ret_cof);
    lines
}
