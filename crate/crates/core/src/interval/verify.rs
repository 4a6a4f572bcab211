//! The axiom suite of an interval structure, each axiom an exact functor
//! equality. Universal properties are checked as finite bijections against
//! a family of test categories.

use std::fmt;
use std::sync::Arc;

use super::IntervalStructure;
use crate::fincat::{difference_witness, pairing, product, product_map, projection_left, pushout_bijection, FinCat, Functor};

#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: String,
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct IntervalReport {
    pub checks: Vec<AxiomCheck>,
}

impl IntervalReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| c.failure.is_some())
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for IntervalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.failure {
                None => writeln!(f, "PASS  {}", c.name)?,
                Some(w) => writeln!(f, "FAIL  {}\n      witness: {}", c.name, w)?,
            }
        }
        let bad = self.failures().count();
        writeln!(f, "{} of {} checks passed", self.checks.len() - bad, self.checks.len())
    }
}

struct Suite {
    checks: Vec<AxiomCheck>,
}

impl Suite {
    fn eq(&mut self, name: &str, lhs: &Functor, rhs: &Functor) {
        let failure = if lhs == rhs { None } else { Some(difference_witness(lhs, rhs)) };
        self.checks.push(AxiomCheck { name: name.into(), failure });
    }

    fn result(&mut self, name: &str, r: Result<(), String>) {
        self.checks.push(AxiomCheck { name: name.into(), failure: r.err() });
    }
}

/// `e ⊗ I : I → I²`, `u ↦ (e, u)`.
fn left_slot(st: &IntervalStructure, e: &Functor) -> Functor {
    pairing(&e.after(&st.p), &Functor::identity(&st.i), &st.ii)
}

/// `I ⊗ e : I → I²`, `t ↦ (t, e)`.
fn right_slot(st: &IntervalStructure, e: &Functor) -> Functor {
    pairing(&Functor::identity(&st.i), &e.after(&st.p), &st.ii)
}

/// Runs every axiom on `st`. `family` supplies the test categories for the
/// subdivision pushout; the cylinder form of that pushout (`a × S`) is checked
/// for the members of `family` with at most `requirement_arrows` arrows.
pub fn verify_interval(st: &IntervalStructure, family: &[Arc<FinCat>], requirement_arrows: usize) -> IntervalReport {
    let mut t = Suite { checks: Vec::new() };
    let id1 = Functor::identity(&st.one);
    let id_i = Functor::identity(&st.i);
    let i0p = st.i0.after(&st.p);
    let i1p = st.i1.after(&st.p);

    t.eq("contraction: p i0 = id", &st.p.after(&st.i0), &id1);
    t.eq("contraction: p i1 = id", &st.p.after(&st.i1), &id1);

    t.eq("involution: v i0 = i1", &st.v.after(&st.i0), &st.i1);
    t.eq("involution: v i1 = i0", &st.v.after(&st.i1), &st.i0);
    t.eq("involution compatible with p: p v = p", &st.p.after(&st.v), &st.p);

    t.eq("subdivision square commutes: r0 i0 = r1 i1", &st.r0.after(&st.i0), &st.r1.after(&st.i1));
    t.eq("subdivision: s i0 = r1 i0", &st.s_map.after(&st.i0), &st.r1.after(&st.i0));
    t.eq("subdivision: s i1 = r0 i1", &st.s_map.after(&st.i1), &st.r0.after(&st.i1));
    let pushout = family.iter().try_for_each(|c| pushout_bijection(&st.i0, &st.i1, &st.r0, &st.r1, c).map(|_| ()));
    t.result("subdivision square is a pushout", pushout);
    let requirement = family.iter().filter(|a| a.n_arr() <= requirement_arrows).try_for_each(|a| {
        let ai = product(a, &st.i);
        let a_s = product(a, &st.s);
        let id_a = Functor::identity(a);
        let k0 = pairing(&id_a, &Functor::constant(a, &st.i, st.i0.on_obj(0)), &ai);
        let k1 = pairing(&id_a, &Functor::constant(a, &st.i, st.i1.on_obj(0)), &ai);
        let r0 = product_map(&id_a, &st.r0, &ai, &a_s);
        let r1 = product_map(&id_a, &st.r1, &ai, &a_s);
        family.iter().try_for_each(|c| pushout_bijection(&k0, &k1, &r0, &r1, c).map(|_| ()).map_err(|e| format!("a = {}: {e}", a.name())))
    });
    t.result("requirement: a × S is a pushout for every test a", requirement);

    t.eq("upper left connection: Γul (i0 ⊗ I) = id", &st.gamma_ul.after(&left_slot(st, &st.i0)), &id_i);
    t.eq("upper left connection: Γul (I ⊗ i0) = id", &st.gamma_ul.after(&right_slot(st, &st.i0)), &id_i);
    t.eq("upper left connection: Γul (i1 ⊗ I) = i1 p", &st.gamma_ul.after(&left_slot(st, &st.i1)), &i1p);
    t.eq("upper left connection: Γul (I ⊗ i1) = i1 p", &st.gamma_ul.after(&right_slot(st, &st.i1)), &i1p);

    t.eq("lower right connection: Γlr (i1 ⊗ I) = id", &st.gamma_lr.after(&left_slot(st, &st.i1)), &id_i);
    t.eq("lower right connection: Γlr (I ⊗ i1) = id", &st.gamma_lr.after(&right_slot(st, &st.i1)), &id_i);
    t.eq("lower right connection: Γlr (i0 ⊗ I) = i0 p", &st.gamma_lr.after(&left_slot(st, &st.i0)), &i0p);
    t.eq("lower right connection: Γlr (I ⊗ i0) = i0 p", &st.gamma_lr.after(&right_slot(st, &st.i0)), &i0p);
    let first = projection_left(&st.ii);
    t.eq("lower right connection compatible with p", &st.p.after(&st.gamma_lr), &st.p.after(&first));

    t.eq("upper right connection: Γur (I ⊗ i0) = id", &st.gamma_ur.after(&right_slot(st, &st.i0)), &id_i);
    t.eq("upper right connection: Γur (i1 ⊗ I) = v", &st.gamma_ur.after(&left_slot(st, &st.i1)), &st.v);
    t.eq("upper right connection: Γur (i0 ⊗ I) = i0 p", &st.gamma_ur.after(&left_slot(st, &st.i0)), &i0p);
    t.eq("upper right connection: Γur (I ⊗ i1) = i0 p", &st.gamma_ur.after(&right_slot(st, &st.i1)), &i0p);
    t.eq("upper right connection is Γlr (I ⊗ v)", &st.gamma_lr.after(&st.id_times_v()), &st.gamma_ur);

    match st.derive() {
        Ok(d) => {
            t.eq("subdivision compatible with p: p̄ s = p", &d.p_bar.after(&st.s_map), &st.p);
            let i_s = product_map(&id_i, &st.s_map, &st.ii, &d.is);
            t.eq("right connections compatible with subdivision: x (I ⊗ s) = I ⊗ p", &d.x.after(&i_s), &first);
            t.eq("strictness of left identities: q_l s = id", &d.q_l.after(&st.s_map), &id_i);
            t.eq("strictness of right identities: q_r s = id", &d.q_r.after(&st.s_map), &id_i);
            t.eq("strictness of left inverses: w s = i1 p", &d.w.after(&st.s_map), &i1p);
        }
        Err(e) => {
            for name in [
                "subdivision compatible with p: p̄ s = p",
                "right connections compatible with subdivision: x (I ⊗ s) = I ⊗ p",
                "strictness of left identities: q_l s = id",
                "strictness of right identities: q_r s = id",
                "strictness of left inverses: w s = i1 p",
            ] {
                t.result(name, Err(format!("the induced map does not exist: {e}")));
            }
        }
    }
    IntervalReport { checks: t.checks }
}
