//! Homotopies as functors out of cylinders, and the algebra built on them.
//!
//! A homotopy `Cyl(a0) → a1` between functors into a category is the same as
//! a natural isomorphism between its two ends; [`Homotopy::components`] and
//! [`Homotopy::from_components`] move between the two views.

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{
    difference_witness, enumerate_nat_trans, same_cat, split_arr, split_obj, FinCat, Functor, FunctorSearch,
    KernelError, Obj,
};
use crate::interval::{
    adj, adj_inv, cyl, cyl_map, gamma_of, i0_of, i1_of, iarr, p_of, r0_of, r1_of, s_of, standard, sub, v_of,
    Connection,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("domain {0} is not a cylinder")]
    NotACylinder(String),
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("not a homotopy under the given maps: {0}")]
    NotUnder(String),
    #[error("not a homotopy over the given maps: {0}")]
    NotOver(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub carrier: Functor,
    pub f0: Functor,
    pub f1: Functor,
}

impl Homotopy {
    /// Wrap a functor `Cyl(a0) → a1`, computing its two boundaries.
    pub fn from_carrier(carrier: Functor) -> Result<Homotopy, HomotopyError> {
        let Some((a0, i)) = carrier.dom.product_parts() else {
            return Err(HomotopyError::NotACylinder(carrier.dom.name().into()));
        };
        if **i != *standard().i {
            return Err(HomotopyError::NotACylinder(carrier.dom.name().into()));
        }
        let a0 = a0.clone();
        let c = cyl(&a0);
        let carrier = carrier.with_dom(&c);
        let f0 = carrier.after(&i0_of(&a0));
        let f1 = carrier.after(&i1_of(&a0));
        Ok(Homotopy { carrier, f0, f1 })
    }

    pub fn source(&self) -> &Arc<FinCat> {
        &self.f0.dom
    }

    pub fn target(&self) -> &Arc<FinCat> {
        &self.f0.cod
    }

    /// Re-derive both boundaries from the carrier and compare.
    pub fn check(&self) -> Result<(), HomotopyError> {
        self.carrier.validate().map_err(KernelError::from)?;
        let a0 = self.source();
        let b0 = self.carrier.after(&i0_of(a0));
        let b1 = self.carrier.after(&i1_of(a0));
        if b0 != self.f0 {
            return Err(HomotopyError::Boundary(format!("start {}", difference_witness(&b0, &self.f0))));
        }
        if b1 != self.f1 {
            return Err(HomotopyError::Boundary(format!("end {}", difference_witness(&b1, &self.f1))));
        }
        Ok(())
    }

    /// `f ∘ p(a0)`.
    pub fn identity(f: &Functor) -> Homotopy {
        Homotopy { carrier: f.after(&p_of(&f.dom)), f0: f.clone(), f1: f.clone() }
    }

    /// `h ∘ v(a0)`.
    pub fn reverse(&self) -> Homotopy {
        Homotopy { carrier: self.carrier.after(&v_of(self.source())), f0: self.f1.clone(), f1: self.f0.clone() }
    }

    /// `self + k`: first `self`, then `k`. The carrier is `r ∘ s(a0)` with `r`
    /// out of the subdivided cylinder taking `self` on the first half and `k`
    /// on the second.
    pub fn then(&self, k: &Homotopy) -> Result<Homotopy, HomotopyError> {
        if self.f1 != k.f0 {
            return Err(HomotopyError::Boundary(format!(
                "end of the first is not the start of the second: {}",
                difference_witness(&self.f1, &k.f0)
            )));
        }
        let a0 = self.source();
        let sa = sub(a0);
        let r = crate::fincat::induce(&sa, self.target(), &[(&r0_of(a0), &k.carrier), (&r1_of(a0), &self.carrier)])?;
        Ok(Homotopy { carrier: r.after(&s_of(a0)), f0: self.f0.clone(), f1: k.f1.clone() })
    }

    /// `g ∘ h`.
    pub fn post(&self, g: &Functor) -> Homotopy {
        Homotopy { carrier: g.after(&self.carrier), f0: g.after(&self.f0), f1: g.after(&self.f1) }
    }

    /// `h ∘ Cyl(g)`.
    pub fn pre(&self, g: &Functor) -> Homotopy {
        Homotopy { carrier: self.carrier.after(&cyl_map(g)), f0: self.f0.after(g), f1: self.f1.after(g) }
    }

    /// `g1 ∘ h ∘ Cyl(g0)`.
    pub fn whisker(g1: &Functor, h: &Homotopy, g0: &Functor) -> Result<Homotopy, HomotopyError> {
        if !same_cat(&g1.dom, h.target()) || !same_cat(&g0.cod, h.source()) {
            return Err(HomotopyError::Invalid("whiskering maps are not composable".into()));
        }
        Ok(h.pre(g0).post(g1))
    }

    /// The co-cylinder form `a0 → a1^𝕀`.
    pub fn transpose(&self) -> Functor {
        adj(&self.carrier)
    }

    pub fn from_transpose(k: &Functor) -> Result<Homotopy, HomotopyError> {
        Homotopy::from_carrier(adj_inv(k))
    }

    /// `θ_x = h(id_x, 0 → 1)`, the natural isomorphism `f0 ⇒ f1`.
    pub fn components(&self) -> Vec<u32> {
        let a0 = self.source();
        let c = cyl(a0);
        let up = iarr(0, 1);
        a0.objects().map(|x| self.carrier.on_arr(crate::fincat::pair_arr(&c, a0.id(x), up))).collect()
    }

    /// The homotopy whose components are `theta`, a natural isomorphism `f ⇒ g`.
    pub fn from_components(f: &Functor, g: &Functor, theta: &[u32]) -> Result<Homotopy, HomotopyError> {
        let a0 = &f.dom;
        let b = &f.cod;
        let mut inv = Vec::with_capacity(theta.len());
        for (x, &t) in theta.iter().enumerate() {
            inv.push(b.inverse(t).ok_or_else(|| {
                HomotopyError::Invalid(format!("component at {} is not invertible", a0.obj_name(x as Obj)))
            })?);
        }
        let c = cyl(a0);
        let ii = &standard().i;
        let obj = c
            .objects()
            .map(|z| {
                let (x, t) = split_obj(&c, z);
                if t == 0 {
                    f.on_obj(x)
                } else {
                    g.on_obj(x)
                }
            })
            .collect();
        let arr = c
            .arrows()
            .map(|z| {
                let (alpha, tau) = split_arr(&c, z);
                let x = a0.src(alpha) as usize;
                let (s, t) = (ii.src(tau), ii.tgt(tau));
                let end = if t == 0 { f.on_arr(alpha) } else { g.on_arr(alpha) };
                match (s, t) {
                    (0, 1) => b.comp(end, theta[x]),
                    (1, 0) => b.comp(end, inv[x]),
                    _ => end,
                }
            })
            .collect();
        let h = Homotopy { carrier: Functor::new(c, b.clone(), obj, arr), f0: f.clone(), f1: g.clone() };
        h.check()?;
        Ok(h)
    }

    /// Under `a` along `j0 : a → a0` and `j1 : a → a1`: `h ∘ Cyl(j0) = j1 ∘ p(a)`.
    pub fn is_under(&self, j0: &Functor, j1: &Functor) -> Result<(), HomotopyError> {
        if !same_cat(&j0.cod, self.source()) || !same_cat(&j1.cod, self.target()) || !same_cat(&j0.dom, &j1.dom) {
            return Err(HomotopyError::Invalid("under-data endpoints do not match".into()));
        }
        let lhs = self.carrier.after(&cyl_map(j0));
        let rhs = j1.after(&p_of(&j0.dom));
        if lhs != rhs {
            return Err(HomotopyError::NotUnder(difference_witness(&lhs, &rhs)));
        }
        Ok(())
    }

    /// Over `a` along `j0 : a0 → a` and `j1 : a1 → a`: `j1 ∘ h = j0 ∘ p(a0)`.
    pub fn is_over(&self, j0: &Functor, j1: &Functor) -> Result<(), HomotopyError> {
        if !same_cat(&j0.dom, self.source()) || !same_cat(&j1.dom, self.target()) || !same_cat(&j0.cod, &j1.cod) {
            return Err(HomotopyError::Invalid("over-data endpoints do not match".into()));
        }
        let lhs = j1.after(&self.carrier);
        let rhs = j0.after(&p_of(self.source()));
        if lhs != rhs {
            return Err(HomotopyError::NotOver(difference_witness(&lhs, &rhs)));
        }
        Ok(())
    }

    pub fn connection_double(&self, which: Connection) -> DoubleHomotopy {
        DoubleHomotopy::from_carrier(self.carrier.after(&gamma_of(self.source(), which)))
    }
}

/// Every homotopy `Cyl(a0) → a1`, in enumeration order of carriers.
pub fn all_homotopies(a0: &Arc<FinCat>, a1: &Arc<FinCat>) -> Vec<Homotopy> {
    let c = cyl(a0);
    let found = FunctorSearch::new(&c, a1).all();
    found
        .into_iter()
        .map(|h| Homotopy::from_carrier(h).expect("cylinder domain"))
        .collect()
}

/// Homotopies from `f` to `g`, one per natural isomorphism, optionally with
/// components restricted by `allow`.
pub fn homotopies_between(f: &Functor, g: &Functor, allow: &dyn Fn(u32) -> bool) -> Vec<Homotopy> {
    let b = f.cod.clone();
    enumerate_nat_trans(f, g, &|a| b.is_iso(a) && allow(a))
        .into_iter()
        .map(|theta| Homotopy::from_components(f, g, &theta).expect("natural isomorphism"))
        .collect()
}

/// A functor `Cyl(Cyl(a0)) → a1` with its four boundary homotopies:
/// `h0` at `u = 0`, `h1` at `t = 1`, `h2` at `t = 0`, `h3` at `u = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleHomotopy {
    pub carrier: Functor,
    pub h0: Homotopy,
    pub h1: Homotopy,
    pub h2: Homotopy,
    pub h3: Homotopy,
}

impl DoubleHomotopy {
    pub fn from_carrier(carrier: Functor) -> DoubleHomotopy {
        let cc = carrier.dom.clone();
        let (c, _) = cc.product_parts().expect("double cylinder");
        let (a0, _) = c.product_parts().expect("double cylinder");
        let (a0, c) = (a0.clone(), c.clone());
        let edge = |f: Functor| Homotopy::from_carrier(carrier.after(&f)).expect("cylinder");
        DoubleHomotopy {
            h0: edge(i0_of(&c)),
            h1: edge(cyl_map(&i1_of(&a0))),
            h2: edge(cyl_map(&i0_of(&a0))),
            h3: edge(i1_of(&c)),
            carrier,
        }
    }

    /// Corners at `(t, u) = (0, 0), (1, 0), (0, 1), (1, 1)`.
    pub fn corners(&self) -> [Functor; 4] {
        [self.h0.f0.clone(), self.h0.f1.clone(), self.h3.f0.clone(), self.h3.f1.clone()]
    }

    pub fn check(&self) -> Result<(), HomotopyError> {
        let ok = self.h0.f0 == self.h2.f0 && self.h0.f1 == self.h1.f0 && self.h3.f0 == self.h2.f1 && self.h3.f1 == self.h1.f1;
        if !ok {
            return Err(HomotopyError::Boundary("boundary homotopies do not meet at the corners".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdrKind {
    /// `h ∘ Cyl(j) = j ∘ p(a0)`
    Under,
    /// `r ∘ h = r ∘ p(a1)`
    Over,
}

/// `r` retracts `j : a0 → a1`, and `h` runs from `j ∘ r` to the identity of `a1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdrCertificate {
    pub j: Functor,
    pub r: Functor,
    pub h: Homotopy,
    pub kind: SdrKind,
}

impl SdrCertificate {
    pub fn check(&self) -> Result<(), HomotopyError> {
        self.h.check()?;
        let rj = self.r.try_after(&self.j)?;
        if rj != Functor::identity(&self.j.dom) {
            return Err(HomotopyError::Invalid(format!("r is not a retraction of j: {}", difference_witness(&rj, &Functor::identity(&self.j.dom)))));
        }
        let jr = self.j.after(&self.r);
        if self.h.f0 != jr {
            return Err(HomotopyError::Boundary(format!("h does not start at j r: {}", difference_witness(&self.h.f0, &jr))));
        }
        let id1 = Functor::identity(&self.j.cod);
        if self.h.f1 != id1 {
            return Err(HomotopyError::Boundary(format!("h does not end at the identity: {}", difference_witness(&self.h.f1, &id1))));
        }
        match self.kind {
            SdrKind::Under => self.h.is_under(&self.j, &self.j),
            SdrKind::Over => self.h.is_over(&self.r, &self.r),
        }
    }
}

/// `h_left : f_inv ∘ f ≃ id(a0)` and `h_right : f ∘ f_inv ≃ id(a1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub f: Functor,
    pub f_inv: Functor,
    pub h_left: Homotopy,
    pub h_right: Homotopy,
}

impl EquivalenceCertificate {
    pub fn identity(a: &Arc<FinCat>) -> EquivalenceCertificate {
        let id = Functor::identity(a);
        EquivalenceCertificate { f: id.clone(), f_inv: id.clone(), h_left: Homotopy::identity(&id), h_right: Homotopy::identity(&id) }
    }

    pub fn check(&self) -> Result<(), HomotopyError> {
        self.h_left.check()?;
        self.h_right.check()?;
        let want = [
            (&self.h_left.f0, self.f_inv.try_after(&self.f)?, "left start"),
            (&self.h_left.f1, Functor::identity(&self.f.dom), "left end"),
            (&self.h_right.f0, self.f.try_after(&self.f_inv)?, "right start"),
            (&self.h_right.f1, Functor::identity(&self.f.cod), "right end"),
        ];
        for (got, expect, what) in want {
            if *got != expect {
                return Err(HomotopyError::Boundary(format!("{what}: {}", difference_witness(got, &expect))));
            }
        }
        Ok(())
    }
}

fn iso_nat(f: &Functor, g: &Functor) -> Option<Vec<u32>> {
    let b = f.cod.clone();
    enumerate_nat_trans(f, g, &|a| b.is_iso(a)).into_iter().next()
}

/// First homotopy inverse in enumeration order, with the first natural
/// isomorphisms found for both round trips.
pub fn find_equivalence(f: &Functor) -> Option<EquivalenceCertificate> {
    let (a0, a1) = (&f.dom, &f.cod);
    let id0 = Functor::identity(a0);
    let id1 = Functor::identity(a1);
    let mut out = None;
    FunctorSearch::new(a1, a0).for_each(&mut |g| {
        let gf = g.after(f);
        let Some(tl) = iso_nat(&gf, &id0) else { return std::ops::ControlFlow::Continue(()) };
        let fg = f.after(g);
        let Some(tr) = iso_nat(&fg, &id1) else { return std::ops::ControlFlow::Continue(()) };
        out = Some(EquivalenceCertificate {
            f: f.clone(),
            f_inv: g.clone(),
            h_left: Homotopy::from_components(&gf, &id0, &tl).expect("iso"),
            h_right: Homotopy::from_components(&fg, &id1, &tr).expect("iso"),
        });
        std::ops::ControlFlow::Break(())
    });
    out
}

/// `f2 = f1 ∘ f0`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub f0: Functor,
    pub f1: Functor,
    pub f2: Functor,
}

impl Triangle {
    pub fn check(&self) -> Result<(), HomotopyError> {
        let c = self.f1.try_after(&self.f0)?;
        if c != self.f2 {
            return Err(HomotopyError::Invalid(format!("triangle does not commute: {}", difference_witness(&c, &self.f2))));
        }
        Ok(())
    }
}

/// Which two sides of the triangle come with certificates.
pub enum KnownSides<'a> {
    /// certificates for `f0` and `f1`
    First(&'a EquivalenceCertificate, &'a EquivalenceCertificate),
    /// certificates for `f1` and `f2`
    Last(&'a EquivalenceCertificate, &'a EquivalenceCertificate),
    /// certificates for `f0` and `f2`
    Outer(&'a EquivalenceCertificate, &'a EquivalenceCertificate),
}

/// Certificate for the third side, by explicit homotopy algebra.
pub fn two_of_three(tri: &Triangle, known: KnownSides<'_>) -> Result<EquivalenceCertificate, HomotopyError> {
    tri.check()?;
    let cert = match known {
        KnownSides::First(c0, c1) => {
            let inv = c0.f_inv.after(&c1.f_inv);
            let left = c1.h_left.pre(&tri.f0).post(&c0.f_inv).then(&c0.h_left)?;
            let right = c0.h_right.pre(&c1.f_inv).post(&tri.f1).then(&c1.h_right)?;
            EquivalenceCertificate { f: tri.f2.clone(), f_inv: inv, h_left: left, h_right: right }
        }
        KnownSides::Last(c1, c2) => {
            let inv = c2.f_inv.after(&tri.f1);
            let round = tri.f0.after(&inv);
            let right = c1
                .h_left
                .reverse()
                .pre(&round)
                .then(&c2.h_right.pre(&tri.f1).post(&c1.f_inv))?
                .then(&c1.h_left)?;
            EquivalenceCertificate { f: tri.f0.clone(), f_inv: inv, h_left: c2.h_left.clone(), h_right: right }
        }
        KnownSides::Outer(c0, c2) => {
            let inv = tri.f0.after(&c2.f_inv);
            let round = inv.after(&tri.f1);
            let left = c0
                .h_right
                .reverse()
                .post(&round)
                .then(&c2.h_left.pre(&c0.f_inv).post(&tri.f0))?
                .then(&c0.h_right)?;
            EquivalenceCertificate { f: tri.f1.clone(), f_inv: inv, h_left: left, h_right: c2.h_right.clone() }
        }
    };
    cert.check()?;
    Ok(cert)
}

/// Given a certificate for `f` and `h : f ∘ g ≃ id`, certify `g` as a
/// homotopy inverse of `f`.
pub fn right_inverse_upgrade(
    cert: &EquivalenceCertificate,
    g: &Functor,
    h: &Homotopy,
) -> Result<EquivalenceCertificate, HomotopyError> {
    let l = h.reverse().post(&cert.f_inv).then(&cert.h_left.pre(g))?;
    let gf = cert.h_left.reverse().then(&l.pre(&cert.f))?.reverse();
    let out = EquivalenceCertificate { f: cert.f.clone(), f_inv: g.clone(), h_left: gf, h_right: h.clone() };
    out.check()?;
    Ok(out)
}

/// `f'` is a retract of `f` through `g0, r0` on sources and `g1, r1` on targets.
#[derive(Clone, Debug)]
pub struct RetractDiagram {
    pub f: Functor,
    pub f_prime: Functor,
    pub g0: Functor,
    pub r0: Functor,
    pub g1: Functor,
    pub r1: Functor,
}

impl RetractDiagram {
    pub fn check(&self) -> Result<(), HomotopyError> {
        let eqs = [
            (self.f.try_after(&self.g0)?, self.g1.try_after(&self.f_prime)?, "f g0 = g1 f'"),
            (self.f_prime.try_after(&self.r0)?, self.r1.try_after(&self.f)?, "f' r0 = r1 f"),
            (self.r0.try_after(&self.g0)?, Functor::identity(&self.f_prime.dom), "r0 g0 = id"),
            (self.r1.try_after(&self.g1)?, Functor::identity(&self.f_prime.cod), "r1 g1 = id"),
        ];
        for (a, b, what) in eqs {
            if a != b {
                return Err(HomotopyError::Invalid(format!("{what} fails {}", difference_witness(&a, &b))));
            }
        }
        Ok(())
    }
}

pub fn retract_transfer(cert: &EquivalenceCertificate, d: &RetractDiagram) -> Result<EquivalenceCertificate, HomotopyError> {
    d.check()?;
    let out = EquivalenceCertificate {
        f: d.f_prime.clone(),
        f_inv: d.r0.after(&cert.f_inv).after(&d.g1),
        h_left: cert.h_left.pre(&d.g0).post(&d.r0),
        h_right: cert.h_right.pre(&d.g1).post(&d.r1),
    };
    out.check()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_with_identities_is_strict() {
        let st = standard();
        let i = st.i.clone();
        let c = cyl(&i);
        let swap = crate::interval::thin_functor(&c, &i, c.objects().map(|z| split_obj(&c, z).1).collect());
        let h = Homotopy::from_carrier(swap).unwrap();
        assert_eq!(Homotopy::identity(&h.f0).then(&h).unwrap(), h);
        assert_eq!(h.then(&Homotopy::identity(&h.f1)).unwrap(), h);
        assert_eq!(h.reverse().then(&h).unwrap(), Homotopy::identity(&h.f1));
    }
}
