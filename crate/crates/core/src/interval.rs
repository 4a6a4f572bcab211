//! The interval groupoid, the subdivision groupoid, their structure functors,
//! and everything they induce on an arbitrary finite category: cylinders,
//! co-cylinders, the adjunction transpose, mapping cylinders and mapping
//! co-cylinders.
//!
//! Coordinates: `Cyl(a) = a × 𝕀` with the cylinder coordinate last, so
//! `Cyl(Cyl(a))` has objects `((x, t), u)`. The connections act on `(t, u)`.

pub mod verify;

use std::sync::{Arc, OnceLock};

use crate::fincat::{
    evaluation, exp_data, exponential_by, induce, pair_arr, pair_obj, product, product_map, projection_left,
    projection_right, pullback, pullback_projections, split_arr, split_obj, ArrowRec, FinCat, Functor, KernelError,
    MapCylData, Obj, Shape, CompTable,
};

/// Indiscrete category on `names`; identities first, then `s → t` arrows in
/// lexicographic order of `(s, t)`.
pub fn indiscrete(name: &str, names: &[&str], arrow_name: impl Fn(usize, usize) -> String) -> FinCat {
    let n = names.len();
    let mut arrows: Vec<ArrowRec> =
        (0..n).map(|x| ArrowRec { name: format!("id_{}", names[x]), src: x as Obj, tgt: x as Obj }).collect();
    let mut index = vec![0u32; n * n];
    for x in 0..n {
        index[x * n + x] = x as u32;
    }
    for s in 0..n {
        for t in 0..n {
            if s != t {
                index[s * n + t] = arrows.len() as u32;
                arrows.push(ArrowRec { name: arrow_name(s, t), src: s as Obj, tgt: t as Obj });
            }
        }
    }
    let comp = CompTable::from_fn(&arrows, n, |g, f| index[arrows[f as usize].src as usize * n + arrows[g as usize].tgt as usize]);
    FinCat::from_tables(
        name,
        names.iter().map(|s| s.to_string()).collect(),
        arrows,
        (0..n as u32).collect(),
        comp,
        Shape::Plain,
    )
}

/// A functor into a thin category, determined by its object map.
pub fn thin_functor(dom: &Arc<FinCat>, cod: &Arc<FinCat>, obj: Vec<Obj>) -> Functor {
    let arr = dom
        .arrows()
        .map(|a| {
            let h = cod.hom(obj[dom.src(a) as usize], obj[dom.tgt(a) as usize]);
            assert_eq!(h.len(), 1, "codomain {} is not thin here", cod.name());
            h[0]
        })
        .collect();
    Functor::new(dom.clone(), cod.clone(), obj, arr)
}

#[derive(Clone, Debug)]
pub struct IntervalStructure {
    pub one: Arc<FinCat>,
    pub i: Arc<FinCat>,
    pub s: Arc<FinCat>,
    pub i0: Functor,
    pub i1: Functor,
    pub p: Functor,
    pub v: Functor,
    /// second half of the subdivision, `0 ↦ 1, 1 ↦ 2`
    pub r0: Functor,
    /// first half, `0 ↦ 0, 1 ↦ 1`
    pub r1: Functor,
    /// the long arrow, `0 ↦ 0, 1 ↦ 2`
    pub s_map: Functor,
    pub ii: Arc<FinCat>,
    pub gamma_ul: Functor,
    pub gamma_lr: Functor,
    pub gamma_ur: Functor,
}

/// Functors defined by universal properties of the subdivision pushouts.
#[derive(Clone, Debug)]
pub struct DerivedMaps {
    pub q_l: Functor,
    pub q_r: Functor,
    pub w: Functor,
    pub p_bar: Functor,
    pub is: Arc<FinCat>,
    pub x: Functor,
}

pub fn terminal() -> Arc<FinCat> {
    Arc::new(indiscrete("1", &["*"], |_, _| unreachable!()))
}

impl IntervalStructure {
    pub fn build() -> IntervalStructure {
        let one = terminal();
        let i = Arc::new(indiscrete("I", &["0", "1"], |s, _| if s == 0 { "f".into() } else { "f_inv".into() }));
        let s = Arc::new(indiscrete("S", &["0", "1", "2"], |a, b| format!("s{a}{b}")));
        let ii = product(&i, &i);
        let grid = |g: fn(u32, u32) -> u32| -> Functor {
            let obj = ii.objects().map(|z| {
                let (t, u) = split_obj(&ii, z);
                g(t, u)
            });
            thin_functor(&ii, &i, obj.collect())
        };
        IntervalStructure {
            i0: thin_functor(&one, &i, vec![0]),
            i1: thin_functor(&one, &i, vec![1]),
            p: thin_functor(&i, &one, vec![0, 0]),
            v: thin_functor(&i, &i, vec![1, 0]),
            r0: thin_functor(&i, &s, vec![1, 2]),
            r1: thin_functor(&i, &s, vec![0, 1]),
            s_map: thin_functor(&i, &s, vec![0, 2]),
            gamma_ul: grid(|t, u| t.max(u)),
            gamma_lr: grid(|t, u| t.min(u)),
            gamma_ur: grid(|t, u| t.min(1 - u)),
            one,
            i,
            s,
            ii,
        }
    }

    /// `I × I` with the second factor replaced by its image under `v`.
    pub fn id_times_v(&self) -> Functor {
        product_map(&Functor::identity(&self.i), &self.v, &self.ii, &self.ii)
    }

    pub fn derive(&self) -> Result<DerivedMaps, KernelError> {
        let id_i = Functor::identity(&self.i);
        let q_l = induce(&self.s, &self.i, &[(&self.r0, &id_i), (&self.r1, &self.i0.after(&self.p))])?;
        let q_r = induce(&self.s, &self.i, &[(&self.r0, &self.i1.after(&self.p)), (&self.r1, &id_i)])?;
        let w = induce(&self.s, &self.i, &[(&self.r0, &id_i), (&self.r1, &self.v)])?;
        let p_bar = induce(&self.s, &self.one, &[(&self.r0, &self.p), (&self.r1, &self.p)])?;
        let is = product(&self.i, &self.s);
        let ir0 = product_map(&id_i, &self.r0, &self.ii, &is);
        let ir1 = product_map(&id_i, &self.r1, &self.ii, &is);
        let x = induce(&is, &self.i, &[(&ir0, &self.gamma_lr), (&ir1, &self.gamma_ur)])?;
        Ok(DerivedMaps { q_l, q_r, w, p_bar, is, x })
    }
}

static STANDARD: OnceLock<IntervalStructure> = OnceLock::new();

/// The interval used by every construction in the crate.
pub fn standard() -> &'static IntervalStructure {
    STANDARD.get_or_init(IntervalStructure::build)
}

static STANDARD_DERIVED: OnceLock<DerivedMaps> = OnceLock::new();

pub fn standard_derived() -> &'static DerivedMaps {
    STANDARD_DERIVED.get_or_init(|| standard().derive().expect("standard interval derives"))
}

/// The arrow `s → t` of the interval.
pub fn iarr(s: Obj, t: Obj) -> u32 {
    standard().i.hom(s, t)[0]
}

// ---------------------------------------------------------------------------
// Cylinder side

pub fn cyl(a: &Arc<FinCat>) -> Arc<FinCat> {
    a.derived.cyl.get_or_init(|| product(a, &standard().i)).clone()
}

pub fn sub(a: &Arc<FinCat>) -> Arc<FinCat> {
    a.derived.sub.get_or_init(|| product(a, &standard().s)).clone()
}

fn section_at(a: &Arc<FinCat>, t: Obj) -> Functor {
    let c = cyl(a);
    let id_t = standard().i.id(t);
    Functor::new(
        a.clone(),
        c.clone(),
        a.objects().map(|x| pair_obj(&c, x, t)).collect(),
        a.arrows().map(|f| pair_arr(&c, f, id_t)).collect(),
    )
}

/// `i₀(a) : a → Cyl(a)`.
pub fn i0_of(a: &Arc<FinCat>) -> Functor {
    section_at(a, 0)
}

pub fn i1_of(a: &Arc<FinCat>) -> Functor {
    section_at(a, 1)
}

/// `p(a) : Cyl(a) → a`.
pub fn p_of(a: &Arc<FinCat>) -> Functor {
    projection_left(&cyl(a))
}

/// `Cyl(f)`.
pub fn cyl_map(f: &Functor) -> Functor {
    product_map(f, &Functor::identity(&standard().i), &cyl(&f.dom), &cyl(&f.cod))
}

/// `Cyl(a) → Cyl(a)` applying an endofunctor of the interval coordinate.
fn on_interval(a: &Arc<FinCat>, e: &Functor) -> Functor {
    let c = cyl(a);
    product_map(&Functor::identity(a), e, &c, &c)
}

pub fn v_of(a: &Arc<FinCat>) -> Functor {
    on_interval(a, &standard().v)
}

fn into_sub(a: &Arc<FinCat>, e: &Functor) -> Functor {
    product_map(&Functor::identity(a), e, &cyl(a), &sub(a))
}

pub fn r0_of(a: &Arc<FinCat>) -> Functor {
    into_sub(a, &standard().r0)
}

pub fn r1_of(a: &Arc<FinCat>) -> Functor {
    into_sub(a, &standard().r1)
}

pub fn s_of(a: &Arc<FinCat>) -> Functor {
    into_sub(a, &standard().s_map)
}

fn from_sub(a: &Arc<FinCat>, e: &Functor) -> Functor {
    product_map(&Functor::identity(a), e, &sub(a), &cyl(a))
}

pub fn q_l_of(a: &Arc<FinCat>) -> Functor {
    from_sub(a, &standard_derived().q_l)
}

pub fn q_r_of(a: &Arc<FinCat>) -> Functor {
    from_sub(a, &standard_derived().q_r)
}

pub fn w_of(a: &Arc<FinCat>) -> Functor {
    from_sub(a, &standard_derived().w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connection {
    UpperLeft,
    LowerRight,
    UpperRight,
}

impl Connection {
    pub fn functor(self) -> &'static Functor {
        let st = standard();
        match self {
            Connection::UpperLeft => &st.gamma_ul,
            Connection::LowerRight => &st.gamma_lr,
            Connection::UpperRight => &st.gamma_ur,
        }
    }
}

/// `Γ(a) : Cyl(Cyl(a)) → Cyl(a)`, `((x, t), u) ↦ (x, Γ(t, u))`.
pub fn gamma_of(a: &Arc<FinCat>, which: Connection) -> Functor {
    let c = cyl(a);
    let cc = cyl(&c);
    let st = standard();
    let g = which.functor();
    let obj = cc
        .objects()
        .map(|z| {
            let (xt, u) = split_obj(&cc, z);
            let (x, t) = split_obj(&c, xt);
            pair_obj(&c, x, g.on_obj(pair_obj(&st.ii, t, u)))
        })
        .collect();
    let arr = cc
        .arrows()
        .map(|z| {
            let (ft, u) = split_arr(&cc, z);
            let (f, t) = split_arr(&c, ft);
            pair_arr(&c, f, g.on_arr(pair_arr(&st.ii, t, u)))
        })
        .collect();
    Functor::new(cc, c, obj, arr)
}

// ---------------------------------------------------------------------------
// Co-cylinder side

pub fn cocyl(a: &Arc<FinCat>) -> Arc<FinCat> {
    a.derived.cocyl.get_or_init(|| exponential_by(&standard().i, a)).clone()
}

pub fn e0_of(a: &Arc<FinCat>) -> Functor {
    evaluation(&cocyl(a), 0)
}

pub fn e1_of(a: &Arc<FinCat>) -> Functor {
    evaluation(&cocyl(a), 1)
}

/// `c(a) : a → a^𝕀`, constant paths.
pub fn c_of(a: &Arc<FinCat>) -> Functor {
    adj(&p_of(a))
}

/// `co-Cyl(f)`.
pub fn cocyl_map(f: &Functor) -> Functor {
    crate::fincat::exp_postcompose(f, &cocyl(&f.dom), &cocyl(&f.cod))
}

/// Transpose `Cyl(a) → b` into `a → b^𝕀`.
pub fn adj(h: &Functor) -> Functor {
    let c = &h.dom;
    let Some((a, i)) = c.product_parts() else {
        panic!("adj: {} is not a cylinder", c.name());
    };
    assert!(**i == *standard().i, "adj: second factor is not the interval");
    let b = &h.cod;
    let e = cocyl(b);
    let d = exp_data(&e);
    let ii = &standard().i;
    let obj: Vec<Obj> = a
        .objects()
        .map(|x| {
            let arrows: Vec<u32> = ii.arrows().map(|tau| h.on_arr(pair_arr(c, a.id(x), tau))).collect();
            d.object_of_arrows(&arrows).expect("path functor")
        })
        .collect();
    let arr = a
        .arrows()
        .map(|f| {
            let comps: Vec<u32> = ii.objects().map(|t| h.on_arr(pair_arr(c, f, ii.id(t)))).collect();
            d.arrow_of(obj[a.src(f) as usize], &comps).expect("path transformation")
        })
        .collect();
    Functor::new(a.clone(), e, obj, arr)
}

pub fn try_adj(h: &Functor) -> Result<Functor, KernelError> {
    match h.dom.product_parts() {
        Some((_, i)) if **i == *standard().i => Ok(adj(h)),
        _ => Err(KernelError::NotProduct(h.dom.name().to_string())),
    }
}

/// Transpose `a → b^𝕀` back into `Cyl(a) → b`.
pub fn adj_inv(k: &Functor) -> Functor {
    let a = &k.dom;
    let d = exp_data(&k.cod);
    let b = &d.base;
    let c = cyl(a);
    let obj = c
        .objects()
        .map(|z| {
            let (x, t) = split_obj(&c, z);
            d.obj_maps[k.on_obj(x) as usize].on_obj(t)
        })
        .collect();
    let arr = c
        .arrows()
        .map(|z| {
            let (f, tau) = split_arr(&c, z);
            let ii = &standard().i;
            let t = ii.src(tau);
            let path = &d.obj_maps[k.on_obj(a.tgt(f)) as usize];
            b.comp(path.on_arr(tau), d.comps[k.on_arr(f) as usize][t as usize])
        })
        .collect();
    Functor::new(c, b.clone(), obj, arr)
}

/// `Cyl(a^𝕀) → a^𝕀`, `(φ, u) ↦ (t ↦ φ(γ(t, u)))`: the co-cylinder form of a
/// connection, precomposing paths with `γ`.
pub fn exp_connection(a: &Arc<FinCat>, which: Connection) -> Functor {
    let e = cocyl(a);
    let d = exp_data(&e);
    let c = cyl(&e);
    let st = standard();
    let ii = &st.i;
    let g = which.functor();
    let obj: Vec<Obj> = c
        .objects()
        .map(|z| {
            let (phi, u) = split_obj(&c, z);
            let path = &d.obj_maps[phi as usize];
            let arrows: Vec<u32> = ii
                .arrows()
                .map(|tau| path.on_arr(g.on_arr(pair_arr(&st.ii, tau, ii.id(u)))))
                .collect();
            d.object_of_arrows(&arrows).expect("reparametrised path")
        })
        .collect();
    let arr = c
        .arrows()
        .map(|z| {
            let (beta, sigma) = split_arr(&c, z);
            let u = ii.src(sigma);
            let tgt_path = &d.obj_maps[e.tgt(beta) as usize];
            let comps: Vec<u32> = ii
                .objects()
                .map(|t| {
                    let at = g.on_obj(pair_obj(&st.ii, t, u));
                    let bend = g.on_arr(pair_arr(&st.ii, ii.id(t), sigma));
                    a.comp(tgt_path.on_arr(bend), d.comps[beta as usize][at as usize])
                })
                .collect();
            d.arrow_of(obj[c.src(z) as usize], &comps).expect("reparametrised transformation")
        })
        .collect();
    Functor::new(c, e.clone(), obj, arr)
}

// ---------------------------------------------------------------------------
// Mapping cylinders and co-cylinders

#[derive(Clone, Debug)]
pub struct MappingCylinder {
    pub f: Functor,
    pub m: Arc<FinCat>,
    /// `Cyl(a0) → M`
    pub d0: Functor,
    /// `a1 → M`
    pub d1: Functor,
}

/// The pushout of `f` along `i₀(a0)`, by the closed-form hom formula.
/// Object `k < |a0|` stands for `d0(k, 1)`; object `|a0| + b` for `d1(b)`.
pub fn mapping_cylinder(f: &Functor) -> MappingCylinder {
    let (a0, a1) = (&f.dom, &f.cod);
    let n_top = a0.n_obj();
    let n = n_top + a1.n_obj();
    let under = |x: usize| -> Obj {
        if x < n_top {
            f.on_obj(x as Obj)
        } else {
            (x - n_top) as Obj
        }
    };
    let mut names = Vec::with_capacity(n);
    for x in a0.objects() {
        names.push(format!("0:{}", a0.obj_name(x)));
    }
    for y in a1.objects() {
        names.push(format!("1:{}", a1.obj_name(y)));
    }
    let mut pos_in_hom = vec![0u32; a1.n_arr()];
    for s in a1.objects() {
        for t in a1.objects() {
            for (k, &b) in a1.hom(s, t).iter().enumerate() {
                pos_in_hom[b as usize] = k as u32;
            }
        }
    }
    let mut offsets = vec![0u32; n * n];
    let mut arrows = Vec::new();
    let mut over = Vec::new();
    for x in 0..n {
        for y in 0..n {
            offsets[x * n + y] = arrows.len() as u32;
            for &b in a1.hom(under(x), under(y)) {
                arrows.push(ArrowRec {
                    name: format!("[{}|{}|{}]", names[x], a1.arr_name(b), names[y]),
                    src: x as Obj,
                    tgt: y as Obj,
                });
                over.push(b);
            }
        }
    }
    let lookup = |x: usize, y: usize, b: u32| offsets[x * n + y] + pos_in_hom[b as usize];
    let identity: Vec<u32> = (0..n).map(|x| lookup(x, x, a1.id(under(x)))).collect();
    let comp = CompTable::from_fn(&arrows, n, |g, fi| {
        let (x, z) = (arrows[fi as usize].src as usize, arrows[g as usize].tgt as usize);
        lookup(x, z, a1.comp(over[g as usize], over[fi as usize]))
    });
    let data = MapCylData::new(f.clone(), n_top, offsets.clone(), pos_in_hom.clone());
    let m = Arc::new(FinCat::from_tables(
        format!("M({})", f.dom.name().to_string() + "->" + f.cod.name()),
        names,
        arrows,
        identity,
        comp,
        Shape::MappingCylinder(Arc::new(data)),
    ));
    let c0 = cyl(a0);
    let place = |z: Obj| -> usize {
        let (a, t) = split_obj(&c0, z);
        if t == 1 {
            a as usize
        } else {
            n_top + f.on_obj(a) as usize
        }
    };
    let d0 = Functor::new(
        c0.clone(),
        m.clone(),
        c0.objects().map(|z| place(z) as Obj).collect(),
        c0.arrows()
            .map(|z| {
                let (alpha, _) = split_arr(&c0, z);
                lookup(place(c0.src(z)), place(c0.tgt(z)), f.on_arr(alpha))
            })
            .collect(),
    );
    let d1 = Functor::new(
        a1.clone(),
        m.clone(),
        a1.objects().map(|b| (n_top as u32) + b).collect(),
        a1.arrows().map(|b| lookup(n_top + a1.src(b) as usize, n_top + a1.tgt(b) as usize, b)).collect(),
    );
    MappingCylinder { f: f.clone(), m, d0, d1 }
}

impl MappingCylinder {
    /// `j = d0 ∘ i₁(a0)`.
    pub fn j(&self) -> Functor {
        self.d0.after(&i1_of(&self.f.dom))
    }

    /// `g : M → a1`, induced by `f ∘ p(a0)` and `id`.
    pub fn g(&self) -> Functor {
        let data = crate::fincat::mapcyl_data(&self.m);
        let m = &self.m;
        let a1 = &self.f.cod;
        let obj: Vec<Obj> = m.objects().map(|x| data.under(x)).collect();
        let arr = m
            .arrows()
            .map(|z| {
                let (x, y) = (m.src(z), m.tgt(z));
                let hom = a1.hom(obj[x as usize], obj[y as usize]);
                let base = m.hom(x, y)[0];
                hom[(z - base) as usize]
            })
            .collect();
        Functor::new(m.clone(), a1.clone(), obj, arr)
    }

    /// The canonical `m : M → Cyl(a1)` induced by `Cyl(f)` and `i₀(a1)`.
    pub fn canonical_m(&self) -> Functor {
        induce(&self.m, &cyl(&self.f.cod), &[(&self.d0, &cyl_map(&self.f)), (&self.d1, &i0_of(&self.f.cod))])
            .expect("canonical arrow out of the mapping cylinder")
    }

    /// The deformation `Cyl(M) → M` from `d1 ∘ g` to the identity, induced by
    /// `d0 ∘ Γ_lr(a0)` and `d1 ∘ p(a1)`.
    pub fn sdr_carrier(&self) -> Functor {
        let (a0, a1) = (&self.f.dom, &self.f.cod);
        let on_top = self.d0.after(&gamma_of(a0, Connection::LowerRight));
        let on_bottom = self.d1.after(&p_of(a1));
        induce(&cyl(&self.m), &self.m, &[(&cyl_map(&self.d0), &on_top), (&cyl_map(&self.d1), &on_bottom)])
            .expect("cylinder of a mapping cylinder is generated by its legs")
    }

    /// Arrow of `M` from `x` to `y` over the `a1`-arrow `b`.
    pub fn arrow_over(&self, x: Obj, y: Obj, b: u32) -> u32 {
        crate::fincat::mapcyl_data(&self.m).arrow(self.m.n_obj(), x, y, b)
    }

    pub fn top(&self, a: Obj) -> Obj {
        a
    }

    pub fn bottom(&self, b: Obj) -> Obj {
        self.f.dom.n_obj() as Obj + b
    }

    /// Map out of `M` determined by its two legs.
    pub fn induced(&self, on_d0: &Functor, on_d1: &Functor) -> Result<Functor, KernelError> {
        induce(&self.m, &on_d0.cod, &[(&self.d0, on_d0), (&self.d1, on_d1)])
    }
}

#[derive(Clone, Debug)]
pub struct MappingCocylinder {
    pub f: Functor,
    pub n: Arc<FinCat>,
    /// `N → a0`
    pub d0: Functor,
    /// `N → a1^𝕀`
    pub d1: Functor,
}

/// The pullback of `f` along `e₀(a1)`.
pub fn mapping_cocylinder(f: &Functor) -> MappingCocylinder {
    let e0 = e0_of(&f.cod);
    let n = pullback(f, &e0).expect("cospan over a1");
    let (d0, d1) = pullback_projections(&n);
    MappingCocylinder { f: f.clone(), n, d0, d1 }
}

impl MappingCocylinder {
    /// `j = (id, c(a1) ∘ f) : a0 → N`.
    pub fn j(&self) -> Functor {
        crate::fincat::pullback_pair(&self.n, &Functor::identity(&self.f.dom), &c_of(&self.f.cod).after(&self.f))
            .expect("j lands in the pullback")
    }

    /// `g = e₁(a1) ∘ d1`.
    pub fn g(&self) -> Functor {
        e1_of(&self.f.cod).after(&self.d1)
    }

    /// The canonical `m' : co-Cyl(a0) → N`, the pair `(e₀(a0), co-Cyl(f))`.
    pub fn canonical_m(&self) -> Functor {
        crate::fincat::pullback_pair(&self.n, &e0_of(&self.f.dom), &cocyl_map(&self.f)).expect("canonical arrow")
    }

    pub fn pair(&self, x: &Functor, path: &Functor) -> Result<Functor, KernelError> {
        crate::fincat::pullback_pair(&self.n, x, path)
    }
}

pub fn projection_interval(a: &Arc<FinCat>) -> Functor {
    projection_right(&cyl(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_shape() {
        let st = standard();
        let names: Vec<&str> = st.i.arrows().map(|a| st.i.arr_name(a)).collect();
        assert_eq!(names, ["id_0", "id_1", "f", "f_inv"]);
        assert_eq!(st.s.n_arr(), 9);
        assert!(st.i.validate().is_ok());
        assert!(st.s.validate().is_ok());
    }

    #[test]
    fn adj_round_trip_on_projection() {
        let st = standard();
        let h = p_of(&st.i);
        let k = adj(&h);
        assert_eq!(adj_inv(&k), h);
    }
}
