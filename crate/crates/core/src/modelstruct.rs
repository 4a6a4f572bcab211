//! Factorizations, explicit lifts and fiberwise inverses.
//!
//! Everything here is built by formula out of the interval structure, the
//! cleavages of `fibcof` and the homotopy algebra. Searches appear only in
//! tests and in [`axioms`], as oracles.

pub mod axioms;

use std::sync::Arc;

use thiserror::Error;

use crate::fibcof::{
    cofibration_witness_formula, is_cofibration, isofibration_witness, Chooser, Cleavage, CofCleavage,
    CofibrationWitness, FibCofError,
};
use crate::fincat::{difference_witness, same_cat, FinCat, Functor, KernelError, Square};
use crate::homotopy::{
    two_of_three, DoubleHomotopy, EquivalenceCertificate, Homotopy, HomotopyError, KnownSides, SdrCertificate,
    SdrKind, Triangle,
};
use crate::interval::{
    adj, c_of, cocyl_map, cyl, cyl_map, e1_of, exp_connection, gamma_of, i0_of, i1_of, mapping_cocylinder,
    mapping_cylinder, p_of, r0_of, r1_of, s_of, sub, v_of, Connection, MappingCocylinder, MappingCylinder,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    FibCof(#[from] FibCofError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn expect_eq(what: &str, got: &Functor, want: &Functor) -> Result<(), ModelError> {
    if got != want {
        return Err(ModelError::Construction(format!("{what}: {}", difference_witness(got, want))));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Extension operators

/// Something that extends homotopies along `j`: given `G : a1 → x` and
/// `H : Cyl(a0) → x` starting at `G ∘ j`, a homotopy `K` with `K ∘ i₀ = G`
/// and `K ∘ Cyl(j) = H`.
pub trait Extension {
    fn along(&self) -> &Functor;
    fn extend(&self, big_g: &Functor, big_h: &Homotopy) -> Result<Homotopy, FibCofError>;
}

impl Extension for CofibrationWitness {
    fn along(&self) -> &Functor {
        &self.j
    }
    fn extend(&self, big_g: &Functor, big_h: &Homotopy) -> Result<Homotopy, FibCofError> {
        CofibrationWitness::extend(self, big_g, big_h)
    }
}

impl Extension for CofCleavage {
    fn along(&self) -> &Functor {
        &self.j
    }
    fn extend(&self, big_g: &Functor, big_h: &Homotopy) -> Result<Homotopy, FibCofError> {
        CofCleavage::extend(self, big_g, big_h)
    }
}

/// Cofibration witness for `j1 ∘ j0`: extend first along `j0`, then along `j1`,
/// applied to the universal square of the mapping cylinder.
pub fn compose_witnesses(w0: &dyn Extension, w1: &dyn Extension) -> Result<CofibrationWitness, ModelError> {
    let (j0, j1) = (w0.along(), w1.along());
    if !same_cat(&j0.cod, &j1.dom) {
        return Err(ModelError::Hypothesis("the two cofibrations are not composable".into()));
    }
    let j = j1.after(j0);
    let mc = mapping_cylinder(&j);
    let big_h = Homotopy::from_carrier(mc.d0.clone())?;
    let k0 = w0.extend(&mc.d1.after(j1), &big_h)?;
    let k = w1.extend(&mc.d1, &k0)?;
    let w = CofibrationWitness { j, mc, r: k.carrier };
    w.check()?;
    Ok(w)
}

/// A cofibration witness for a functor known to be a cofibration: the direct
/// formula when `j` is injective on objects, otherwise a search.
pub fn cofibration_witness(j: &Functor) -> Result<CofibrationWitness, ModelError> {
    let w = cofibration_witness_formula(j)
        .or_else(|| is_cofibration(j))
        .ok_or_else(|| ModelError::Hypothesis("not a cofibration".into()))?;
    w.check()?;
    Ok(w)
}

// ---------------------------------------------------------------------------
// Factorizations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    MappingCyl,
    MappingCocyl,
    CofThenTfib,
    TcofThenFib,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::MappingCyl, Mode::MappingCocyl, Mode::CofThenTfib, Mode::TcofThenFib];

    pub fn name(self) -> &'static str {
        match self {
            Mode::MappingCyl => "cyl",
            Mode::MappingCocyl => "cocyl",
            Mode::CofThenTfib => "cof-tfib",
            Mode::TcofThenFib => "tcof-fib",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    J,
    G,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Cofibration(CofibrationWitness),
    CofCleavage(CofCleavage),
    Cleavage(Cleavage),
    Sdr(SdrCertificate),
    Equivalence(EquivalenceCertificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Cofibration(_) => "cofibration",
            Certificate::CofCleavage(_) => "cofibration-cleavage",
            Certificate::Cleavage(_) => "cleavage",
            Certificate::Sdr(_) => "sdr",
            Certificate::Equivalence(_) => "equivalence",
        }
    }

    /// Validate the certificate on its own and as a certificate for `leg`.
    pub fn check_for(&self, leg: Leg, subject: &Functor) -> Result<(), ModelError> {
        let certified = match self {
            Certificate::Cofibration(w) => {
                w.check()?;
                &w.j
            }
            Certificate::CofCleavage(c) => {
                c.check_criterion()?;
                &c.j
            }
            Certificate::Cleavage(c) => {
                isofibration_witness(&c.f).map_err(FibCofError::NotFibration)?;
                &c.f
            }
            Certificate::Sdr(s) => {
                s.check()?;
                match leg {
                    Leg::J => &s.j,
                    Leg::G => &s.r,
                }
            }
            Certificate::Equivalence(e) => {
                e.check()?;
                &e.f
            }
        };
        expect_eq(&format!("{} certifies a different functor", self.kind()), certified, subject)
    }
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub mode: Mode,
    pub f: Functor,
    pub mid: Arc<FinCat>,
    pub j: Functor,
    pub g: Functor,
    pub certificates: Vec<(Leg, Certificate)>,
    /// the factorizations chained to build this one, in order
    pub steps: Vec<Factorization>,
}

impl Factorization {
    pub fn check(&self) -> Result<(), ModelError> {
        expect_eq("g j != f", &self.g.try_after(&self.j)?, &self.f)?;
        if !same_cat(&self.j.cod, &self.mid) {
            return Err(ModelError::Construction("j does not land in the middle category".into()));
        }
        for (leg, cert) in &self.certificates {
            let subject = match leg {
                Leg::J => &self.j,
                Leg::G => &self.g,
            };
            cert.check_for(*leg, subject)?;
        }
        for s in &self.steps {
            s.check()?;
        }
        Ok(())
    }

    pub fn certificate(&self, leg: Leg, kind: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|(l, c)| *l == leg && c.kind() == kind).map(|(_, c)| c)
    }

    fn equivalence(&self, leg: Leg) -> Option<&EquivalenceCertificate> {
        match self.certificate(leg, "equivalence") {
            Some(Certificate::Equivalence(e)) => Some(e),
            _ => None,
        }
    }
}

/// `j` and `r` of an SDR are homotopy inverse to each other.
pub fn sdr_equivalences(s: &SdrCertificate) -> (EquivalenceCertificate, EquivalenceCertificate) {
    let id0 = Homotopy::identity(&Functor::identity(&s.j.dom));
    let of_j = EquivalenceCertificate { f: s.j.clone(), f_inv: s.r.clone(), h_left: id0.clone(), h_right: s.h.clone() };
    let of_r = EquivalenceCertificate { f: s.r.clone(), f_inv: s.j.clone(), h_left: s.h.clone(), h_right: id0 };
    (of_j, of_r)
}

/// The criterion lift `l : a1 → M_j` for `j = d0 ∘ i₁` out of the mapping
/// cylinder of `f`, induced by `(d1_j ∘ d0_f) + d0_j` and `d1_j ∘ d1_f`.
pub fn mapping_cylinder_cleavage(mc: &MappingCylinder) -> Result<CofCleavage, ModelError> {
    let j = mc.j();
    let mcj = mapping_cylinder(&j);
    let first = Homotopy::from_carrier(mcj.d1.after(&mc.d0))?;
    let second = Homotopy::from_carrier(mcj.d0.clone())?;
    let on_d0 = first.then(&second)?;
    let l = mc.induced(&on_d0.carrier, &mcj.d1.after(&mc.d1))?;
    let h = mcj.sdr_carrier();
    let cl = CofCleavage { j, mc: mcj, l, h };
    cl.check_criterion()?;
    Ok(cl)
}

pub fn factor_mapping_cylinder(f: &Functor) -> Result<Factorization, ModelError> {
    let mc = mapping_cylinder(f);
    let (j, g) = (mc.j(), mc.g());
    let h = Homotopy::from_carrier(mc.sdr_carrier())?;
    let sdr = SdrCertificate { j: mc.d1.clone(), r: g.clone(), h, kind: SdrKind::Over };
    let (_, eq_g) = sdr_equivalences(&sdr);
    let cleavage = mapping_cylinder_cleavage(&mc)?;
    let fib = Cleavage::canonical(&g)?;
    Ok(Factorization {
        mode: Mode::MappingCyl,
        f: f.clone(),
        mid: mc.m.clone(),
        j,
        g,
        certificates: vec![
            (Leg::J, Certificate::CofCleavage(cleavage)),
            (Leg::G, Certificate::Sdr(sdr)),
            (Leg::G, Certificate::Equivalence(eq_g)),
            (Leg::G, Certificate::Cleavage(fib)),
        ],
        steps: Vec::new(),
    })
}

/// The deformation `j ∘ d0 ⇒ id(N)` under `a0`: paths are shrunk to their
/// start by the lower-right connection on `a1^𝕀`.
pub fn mapping_cocylinder_sdr(mc: &MappingCocylinder) -> Result<SdrCertificate, ModelError> {
    let a1 = &mc.f.cod;
    let n = &mc.n;
    let path = exp_connection(a1, Connection::LowerRight).after(&cyl_map(&mc.d1));
    let carrier = mc.pair(&mc.d0.after(&p_of(n)), &path)?;
    let sdr = SdrCertificate { j: mc.j(), r: mc.d0.clone(), h: Homotopy::from_carrier(carrier)?, kind: SdrKind::Under };
    sdr.check()?;
    Ok(sdr)
}

pub fn factor_mapping_cocylinder(f: &Functor) -> Result<Factorization, ModelError> {
    let mc = mapping_cocylinder(f);
    let (j, g) = (mc.j(), mc.g());
    let sdr = mapping_cocylinder_sdr(&mc)?;
    let (eq_j, _) = sdr_equivalences(&sdr);
    let cof = cofibration_witness(&j)?;
    let fib = Cleavage::canonical(&g)?;
    Ok(Factorization {
        mode: Mode::MappingCocyl,
        f: f.clone(),
        mid: mc.n.clone(),
        j,
        g,
        certificates: vec![
            (Leg::J, Certificate::Sdr(sdr)),
            (Leg::J, Certificate::Equivalence(eq_j)),
            (Leg::J, Certificate::Cofibration(cof)),
            (Leg::G, Certificate::Cleavage(fib)),
        ],
        steps: Vec::new(),
    })
}

pub fn factor_composite(f: &Functor, mode: Mode) -> Result<Factorization, ModelError> {
    match mode {
        Mode::MappingCyl => factor_mapping_cylinder(f),
        Mode::MappingCocyl => factor_mapping_cocylinder(f),
        Mode::CofThenTfib => {
            let first = factor_mapping_cylinder(f)?;
            let second = factor_mapping_cocylinder(&first.g)?;
            let j = second.j.after(&first.j);
            let g = second.g.clone();
            let cl = match first.certificate(Leg::J, "cofibration-cleavage") {
                Some(Certificate::CofCleavage(c)) => c.clone(),
                _ => return Err(ModelError::Construction("missing cylinder cleavage".into())),
            };
            let w2 = match second.certificate(Leg::J, "cofibration") {
                Some(Certificate::Cofibration(w)) => w.clone(),
                _ => return Err(ModelError::Construction("missing co-cylinder witness".into())),
            };
            let cof = compose_witnesses(&cl, &w2)?;
            // g' = g ∘ j'': certificates for j'' and g' give one for g
            let tri = Triangle { f0: second.j.clone(), f1: second.g.clone(), f2: first.g.clone() };
            let c0 = second.equivalence(Leg::J).expect("co-cylinder j certificate");
            let c2 = first.equivalence(Leg::G).expect("cylinder g certificate");
            let eq_g = two_of_three(&tri, KnownSides::Outer(c0, c2))?;
            let fib = Cleavage::canonical(&g)?;
            Ok(Factorization {
                mode,
                f: f.clone(),
                mid: second.mid.clone(),
                j,
                g,
                certificates: vec![
                    (Leg::J, Certificate::Cofibration(cof)),
                    (Leg::G, Certificate::Equivalence(eq_g)),
                    (Leg::G, Certificate::Cleavage(fib)),
                ],
                steps: vec![first, second],
            })
        }
        Mode::TcofThenFib => {
            let first = factor_mapping_cocylinder(f)?;
            let second = factor_mapping_cylinder(&first.j)?;
            let j = second.j.clone();
            let g = first.g.after(&second.g);
            let cl = match second.certificate(Leg::J, "cofibration-cleavage") {
                Some(Certificate::CofCleavage(c)) => c.clone(),
                _ => return Err(ModelError::Construction("missing cylinder cleavage".into())),
            };
            // j' = g'' ∘ j'': certificates for g'' and j' give one for j''
            let tri = Triangle { f0: second.j.clone(), f1: second.g.clone(), f2: first.j.clone() };
            let c1 = second.equivalence(Leg::G).expect("cylinder g certificate");
            let c2 = first.equivalence(Leg::J).expect("co-cylinder j certificate");
            let eq_j = two_of_three(&tri, KnownSides::Last(c1, c2))?;
            let fib = Cleavage::canonical(&g)?;
            Ok(Factorization {
                mode,
                f: f.clone(),
                mid: second.mid.clone(),
                j,
                g,
                certificates: vec![
                    (Leg::J, Certificate::CofCleavage(cl)),
                    (Leg::J, Certificate::Equivalence(eq_j)),
                    (Leg::G, Certificate::Cleavage(fib)),
                ],
                steps: vec![first, second],
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Lifts

/// `left` is `j`, `right` is `f`, `top` is `g0`, `bottom` is `g1`.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub square: Square,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSolution {
    pub l: Functor,
}

impl LiftProblem {
    pub fn new(square: Square) -> Result<LiftProblem, ModelError> {
        square.check().map_err(ModelError::Hypothesis)?;
        Ok(LiftProblem { square })
    }

    pub fn check(&self, sol: &LiftSolution) -> Result<(), ModelError> {
        self.square.filled_by(&sol.l).map_err(ModelError::Construction)
    }
}

fn checked(problem: &LiftProblem, l: Functor) -> Result<LiftSolution, ModelError> {
    let sol = LiftSolution { l };
    problem.check(&sol)?;
    Ok(sol)
}

/// `m_j : M_j → Cyl(a1)` is a section of a strong deformation retraction, with
/// `σ = (m ∘ r ∘ Γ_ur(a1)) + Γ_lr(a1)`.
pub fn sdr_of_m(w: &CofibrationWitness) -> Result<SdrCertificate, ModelError> {
    let a1 = &w.j.cod;
    let m = w.mc.canonical_m();
    let first = Homotopy::from_carrier(m.after(&w.r).after(&gamma_of(a1, Connection::UpperRight)))?;
    let second = Homotopy::from_carrier(gamma_of(a1, Connection::LowerRight))?;
    let sigma = first.then(&second)?;
    let sdr = SdrCertificate { j: m, r: w.r.clone(), h: sigma, kind: SdrKind::Under };
    sdr.check()?;
    Ok(sdr)
}

/// `j` a section of an SDR under its source, `f` with a cleavage:
/// `l = k ∘ i₁(a1)` with `k` the chosen lift of `g1 ∘ h` starting at `g0 ∘ r`.
pub fn lift_against_sdr(problem: &LiftProblem, cleavage: &Cleavage, sdr: &SdrCertificate) -> Result<LiftSolution, ModelError> {
    let sq = &problem.square;
    if sdr.j != sq.left || sdr.kind != SdrKind::Under {
        return Err(ModelError::Hypothesis("the SDR is not an under-SDR with section j".into()));
    }
    if cleavage.f != sq.right {
        return Err(ModelError::Hypothesis("the cleavage is not for f".into()));
    }
    let k = cleavage.lift(&sq.top.after(&sdr.r), &sdr.h.post(&sq.bottom))?;
    checked(problem, k.f1)
}

/// `j` with a cofibration cleavage, `f` a retraction with an over-SDR
/// `(j', h)`: `l = K(j' ∘ g1, h ∘ Cyl(g0)) ∘ i₁(a1)`.
pub fn lift_sdr_against(problem: &LiftProblem, ext: &dyn Extension, sdr: &SdrCertificate) -> Result<LiftSolution, ModelError> {
    let sq = &problem.square;
    if sdr.r != sq.right || sdr.kind != SdrKind::Over {
        return Err(ModelError::Hypothesis("the SDR is not an over-SDR retracted by f".into()));
    }
    if *ext.along() != sq.left {
        return Err(ModelError::Hypothesis("the extension operator is not for j".into()));
    }
    let k = ext.extend(&sdr.j.after(&sq.bottom), &sdr.h.pre(&sq.top))?;
    checked(problem, k.f1)
}

/// Covering homotopy extension: `j` a cofibration, `f` a trivial fibration
/// with cleavage and over-SDR `(j', h)`. The square `(u, f, m_j, g1 ∘ p)` is
/// solved against the SDR of `m_j`, and `x = L ∘ i₁(a1)`.
pub fn chep_lift(
    problem: &LiftProblem,
    w: &CofibrationWitness,
    cleavage: &Cleavage,
    sdr_f: &SdrCertificate,
) -> Result<LiftSolution, ModelError> {
    chep_lift_with(problem, w, &sdr_of_m(w)?, cleavage, sdr_f)
}

/// [`chep_lift`] with the SDR of `m_j` supplied.
pub fn chep_lift_with(
    problem: &LiftProblem,
    w: &CofibrationWitness,
    sdr_m: &SdrCertificate,
    cleavage: &Cleavage,
    sdr_f: &SdrCertificate,
) -> Result<LiftSolution, ModelError> {
    let sq = &problem.square;
    if w.j != sq.left {
        return Err(ModelError::Hypothesis("the cofibration witness is not for j".into()));
    }
    if sdr_f.r != sq.right || sdr_f.kind != SdrKind::Over {
        return Err(ModelError::Hypothesis("f is not given as an over-SDR".into()));
    }
    let a1 = &sq.left.cod;
    let u = w.mc.induced(&sdr_f.h.pre(&sq.top).carrier, &sdr_f.j.after(&sq.bottom))?;
    let inner = LiftProblem::new(Square {
        top: u,
        left: sdr_m.j.clone(),
        right: sq.right.clone(),
        bottom: sq.bottom.after(&p_of(a1)),
    })?;
    let big_l = lift_against_sdr(&inner, cleavage, sdr_m)?;
    checked(problem, big_l.l.after(&i1_of(a1)))
}

/// A section of `m' : a2^𝕀 → N_f`, lifting each path from its start with the
/// cleavage.
pub fn path_lifting(mc: &MappingCocylinder, cleavage: &Cleavage) -> Result<Functor, ModelError> {
    let n = &mc.n;
    let path = Homotopy::from_carrier(crate::interval::adj_inv(&mc.d1).with_dom(&cyl(n)))?;
    let k = cleavage.lift(&mc.d0, &path)?;
    let section = adj(&k.carrier);
    let m = mc.canonical_m();
    expect_eq("the path lifting is not a section of m'", &m.after(&section), &Functor::identity(n))?;
    Ok(section)
}

/// The mapping co-cylinder of a fibration `f` with `m' : a2^𝕀 → N_f`
/// retracting the path lifting over `N_f`, via
/// `(Γ_ur ∘ Cyl(s ∘ m')) + Γ_lr` on paths.
#[derive(Clone, Debug)]
pub struct PathSpaceSdr {
    pub mc: MappingCocylinder,
    pub sdr: SdrCertificate,
}

pub fn path_space_sdr(cleavage: &Cleavage) -> Result<PathSpaceSdr, ModelError> {
    let f = &cleavage.f;
    let a2 = &f.dom;
    let mc = mapping_cocylinder(f);
    let m = mc.canonical_m();
    let section = path_lifting(&mc, cleavage)?;
    let first = Homotopy::from_carrier(exp_connection(a2, Connection::UpperRight).after(&cyl_map(&section.after(&m))))?;
    let second = Homotopy::from_carrier(exp_connection(a2, Connection::LowerRight))?;
    let sigma = first.then(&second)?;
    let sdr = SdrCertificate { j: section, r: m, h: sigma, kind: SdrKind::Over };
    sdr.check()?;
    Ok(PathSpaceSdr { mc, sdr })
}

/// The dual of [`chep_lift`]: `j` a trivial cofibration with cleavage and
/// under-SDR `(r, h)`, `f` a fibration. The square `(c ∘ g0, m', j, u')` into
/// the mapping co-cylinder of `f` is solved against the SDR of `m'`, and the
/// lift is read off at the end of the path.
pub fn dual_chep_lift(
    problem: &LiftProblem,
    ext: &dyn Extension,
    sdr_j: &SdrCertificate,
    cleavage: &Cleavage,
) -> Result<LiftSolution, ModelError> {
    if cleavage.f != problem.square.right {
        return Err(ModelError::Hypothesis("the cleavage is not for f".into()));
    }
    dual_chep_lift_with(problem, ext, sdr_j, &path_space_sdr(cleavage)?)
}

/// [`dual_chep_lift`] with the path-space SDR of `f` supplied.
pub fn dual_chep_lift_with(
    problem: &LiftProblem,
    ext: &dyn Extension,
    sdr_j: &SdrCertificate,
    ps: &PathSpaceSdr,
) -> Result<LiftSolution, ModelError> {
    let sq = &problem.square;
    if sdr_j.j != sq.left || sdr_j.kind != SdrKind::Under {
        return Err(ModelError::Hypothesis("j is not given as an under-SDR section".into()));
    }
    if ps.mc.f != sq.right {
        return Err(ModelError::Hypothesis("the path-space data is not for f".into()));
    }
    let a2 = &sq.right.dom;
    let u = ps.mc.pair(&sq.top.after(&sdr_j.r), &cocyl_map(&sq.bottom).after(&adj(&sdr_j.h.carrier)))?;
    let inner = LiftProblem::new(Square { top: c_of(a2).after(&sq.top), left: sq.left.clone(), right: ps.sdr.r.clone(), bottom: u })?;
    let big_l = lift_sdr_against(&inner, ext, &ps.sdr)?;
    checked(problem, e1_of(a2).after(&big_l.l))
}

/// `f` retracts `j` with `h : j ∘ f ⇒ id` over the target of `f`. For the
/// homotopy-lifting problem with `left = i₀(a0)`, `top = g` and `bottom = k`,
/// the lift is `(h⁻¹ ∘ Cyl(g)) + (j ∘ k)`.
pub fn sdr_is_fibration_lift(problem: &LiftProblem, sdr: &SdrCertificate) -> Result<LiftSolution, ModelError> {
    let sq = &problem.square;
    if sdr.r != sq.right || sdr.kind != SdrKind::Over {
        return Err(ModelError::Hypothesis("f is not given as an over-SDR".into()));
    }
    let Some((a0, _)) = sq.left.cod.product_parts() else {
        return Err(ModelError::Hypothesis("left leg is not a cylinder inclusion".into()));
    };
    expect_eq("left leg is not i0", &sq.left, &i0_of(a0))?;
    let k = Homotopy::from_carrier(sq.bottom.clone())?;
    let l = sdr.h.reverse().pre(&sq.top).then(&k.post(&sdr.j))?;
    checked(problem, l.carrier)
}

// ---------------------------------------------------------------------------
// Fiberwise inverses

/// `g` with `j0 ∘ g = j1`, and homotopies over the base in both directions.
#[derive(Clone, Debug)]
pub struct OverEquivalence {
    pub f: Functor,
    pub g: Functor,
    /// `f ∘ g ⇒ id(a1)`
    pub fg: Homotopy,
    /// `g ∘ f ⇒ id(a0)`
    pub gf: Homotopy,
}

/// `f : a0 → a1` over `a` with `j1 ∘ f = j0`, fibrations `j0`, `j1`. One pass
/// produces a right inverse over `a`.
fn right_over_inverse(
    j0: &Functor,
    j1: &Functor,
    f: &Functor,
    f_inv: &Functor,
    h_right: &Homotopy,
    chooser: Chooser,
) -> Result<(Functor, Homotopy), ModelError> {
    let a1 = &f.cod;
    let c0 = Cleavage::with_chooser(j0, chooser)?;
    let c1 = Cleavage::with_chooser(j1, chooser)?;
    let k = c0.lift(f_inv, &h_right.post(j1))?;
    let g = k.f1.clone();
    expect_eq("j0 g != j1", &j0.after(&g), j1)?;
    let l = k.post(f).reverse().then(h_right)?;
    // τ: on S(a1) × 𝕀, the two halves j0 ∘ k and j1 ∘ h_right spread by Γ_ul
    let gul = gamma_of(a1, Connection::UpperLeft);
    let on_r0 = j1.after(&h_right.carrier).after(&gul);
    let on_r1 = j0.after(&k.carrier).after(&gul).after(&cyl_map(&v_of(a1)));
    let sa = cyl(&sub(a1));
    let u = crate::fincat::induce(&sa, &j1.cod, &[(&cyl_map(&r0_of(a1)), &on_r0), (&cyl_map(&r1_of(a1)), &on_r1)])?;
    let tau = Homotopy::from_carrier(u.after(&cyl_map(&s_of(a1))))?;
    let sigma = c1.lift(&l.carrier, &tau)?;
    let d = DoubleHomotopy::from_carrier(sigma.carrier);
    d.check()?;
    let over = d.h2.then(&d.h3)?.then(&d.h1.reverse())?;
    over.is_over(j1, j1)?;
    Ok((g, over))
}

/// Dold's theorem over `a`: from a homotopy inverse of `f` to one over `a`.
pub fn dold_over(
    j0: &Functor,
    j1: &Functor,
    cert: &EquivalenceCertificate,
    chooser: Chooser,
) -> Result<OverEquivalence, ModelError> {
    let f = &cert.f;
    if j1.try_after(f)? != *j0 {
        return Err(ModelError::Hypothesis("j1 f != j0".into()));
    }
    isofibration_witness(j0).map_err(ModelError::Hypothesis)?;
    isofibration_witness(j1).map_err(ModelError::Hypothesis)?;
    cert.check()?;
    let (g, fg) = right_over_inverse(j0, j1, f, &cert.f_inv, &cert.h_right, chooser)?;
    // g f ⇒ id without the base, then a right inverse g' of g over a
    let hg_left = left_to_right(cert, &g, &fg)?;
    let (g2, gg2) = right_over_inverse(j1, j0, &g, f, &hg_left, chooser)?;
    let gf = gg2
        .reverse()
        .post(&g.after(f))
        .then(&fg.pre(&g2).post(&g))?
        .then(&gg2)?;
    gf.is_over(j0, j0)?;
    let out = OverEquivalence { f: f.clone(), g, fg, gf };
    Ok(out)
}

/// From `f ∘ g ⇒ id` and a certificate for `f`, the homotopy `g ∘ f ⇒ id`.
fn left_to_right(cert: &EquivalenceCertificate, g: &Functor, fg: &Homotopy) -> Result<Homotopy, ModelError> {
    let up = crate::homotopy::right_inverse_upgrade(cert, g, fg)?;
    Ok(up.h_left)
}

/// From `g ∘ f ⇒ id` and a certificate for `f`, the homotopy `f ∘ g ⇒ id`.
fn right_to_left(cert: &EquivalenceCertificate, g: &Functor, gf: &Homotopy) -> Result<Homotopy, ModelError> {
    let f = &cert.f;
    let h = cert
        .h_right
        .reverse()
        .post(&f.after(g))
        .then(&gf.pre(&cert.f_inv).post(f))?
        .then(&cert.h_right)?;
    Ok(h)
}

/// The dual pass: `F : b0 → b1` under `a` with `F ∘ J0 = J1`, cofibrations
/// `J0`, `J1`. Produces `g` with `g ∘ J1 = J0` and `g ∘ F ⇒ id(b0)` under `a`.
fn left_under_inverse(
    w1: &dyn Extension,
    w_cyl0: &CofibrationWitness,
    big_j0: &Functor,
    big_f: &Functor,
    f_inv: &Functor,
    h_left: &Homotopy,
) -> Result<(Functor, Homotopy), ModelError> {
    let a = &big_j0.dom;
    let big_h = h_left.pre(big_j0);
    let k = w1.extend(f_inv, &big_h)?;
    let g = k.f1.clone();
    expect_eq("g J1 != J0", &g.after(w1.along()), big_j0)?;
    let l = k.pre(big_f).reverse().then(h_left)?;
    let gul = gamma_of(a, Connection::UpperLeft);
    let on_r0 = big_h.carrier.after(&gul);
    let on_r1 = big_h.carrier.after(&gul).after(&cyl_map(&v_of(a)));
    let sa = cyl(&sub(a));
    let u = crate::fincat::induce(&sa, &big_j0.cod, &[(&cyl_map(&r0_of(a)), &on_r0), (&cyl_map(&r1_of(a)), &on_r1)])?;
    let tau = Homotopy::from_carrier(u.after(&cyl_map(&s_of(a))))?;
    let sigma = w_cyl0.extend(&l.carrier, &tau)?;
    let d = DoubleHomotopy::from_carrier(sigma.carrier);
    d.check()?;
    let under = d.h2.then(&d.h3)?.then(&d.h1.reverse())?;
    under.is_under(big_j0, big_j0)?;
    Ok((g, under))
}

/// `g` with `g ∘ J1 = J0`, and homotopies under the base in both directions.
#[derive(Clone, Debug)]
pub struct UnderEquivalence {
    pub f: Functor,
    pub g: Functor,
    /// `g ∘ f ⇒ id(b0)`
    pub gf: Homotopy,
    /// `f ∘ g ⇒ id(b1)`
    pub fg: Homotopy,
}

/// Dold's theorem under `a`, the dual of [`dold_over`].
pub fn dold_under(big_j0: &Functor, big_j1: &Functor, cert: &EquivalenceCertificate) -> Result<UnderEquivalence, ModelError> {
    let big_f = &cert.f;
    if big_f.try_after(big_j0)? != *big_j1 {
        return Err(ModelError::Hypothesis("F J0 != J1".into()));
    }
    cert.check()?;
    let w0 = cofibration_witness(big_j0)?;
    let w1 = cofibration_witness(big_j1)?;
    let wc0 = cofibration_witness(&cyl_map(big_j0))?;
    let wc1 = cofibration_witness(&cyl_map(big_j1))?;
    let (g, gf) = left_under_inverse(&w1, &wc0, big_j0, big_f, &cert.f_inv, &cert.h_left)?;
    let fg_plain = right_to_left(cert, &g, &gf)?;
    let (g2, g2g) = left_under_inverse(&w0, &wc1, big_j1, &g, big_f, &fg_plain)?;
    let fg = g2g
        .reverse()
        .pre(&big_f.after(&g))
        .then(&gf.pre(&g).post(&g2))?
        .then(&g2g)?;
    fg.is_under(big_j1, big_j1)?;
    Ok(UnderEquivalence { f: big_f.clone(), g, gf, fg })
}

/// A fibration that is an equivalence retracts a section, with a homotopy
/// over its target.
pub fn trivial_fibration_sdr(cert: &EquivalenceCertificate, chooser: Chooser) -> Result<SdrCertificate, ModelError> {
    let f = &cert.f;
    let id1 = Functor::identity(&f.cod);
    let oe = dold_over(f, &id1, cert, chooser)?;
    let sdr = SdrCertificate { j: oe.g, r: f.clone(), h: oe.gf, kind: SdrKind::Over };
    sdr.check()?;
    Ok(sdr)
}

/// A cofibration that is an equivalence is a section of an SDR under its source.
pub fn trivial_cofibration_sdr(cert: &EquivalenceCertificate) -> Result<SdrCertificate, ModelError> {
    let j = &cert.f;
    let id0 = Functor::identity(&j.dom);
    let ue = dold_under(&id0, j, cert)?;
    let sdr = SdrCertificate { j: j.clone(), r: ue.g, h: ue.fg, kind: SdrKind::Under };
    sdr.check()?;
    Ok(sdr)
}

// ---------------------------------------------------------------------------
// Brute-force characterizations, for comparison with the constructions

/// Search for an SDR with retraction `f`: a section `j`, then a homotopy
/// `j f ⇒ id` over the target of `f`.
pub fn search_sdr_retraction(f: &Functor) -> Option<SdrCertificate> {
    let (a0, a1) = (&f.dom, &f.cod);
    let id1 = Functor::identity(a1);
    let id0 = Functor::identity(a0);
    let mut found = None;
    crate::fincat::FunctorSearch::new(a1, a0).for_each(&mut |j| {
        if f.after(j) != id1 {
            return std::ops::ControlFlow::Continue(());
        }
        let jf = j.after(f);
        let ok = |arr: u32| f.on_arr(arr) == a1.id(f.on_obj(a0.src(arr)));
        if let Some(h) = crate::homotopy::homotopies_between(&jf, &id0, &ok).into_iter().next() {
            found = Some(SdrCertificate { j: j.clone(), r: f.clone(), h, kind: SdrKind::Over });
            return std::ops::ControlFlow::Break(());
        }
        std::ops::ControlFlow::Continue(())
    });
    found
}

/// Search for an SDR with section `j`: a retraction `r`, then a homotopy
/// `j r ⇒ id` under the source of `j`.
pub fn search_sdr_section(j: &Functor) -> Option<SdrCertificate> {
    let (a0, a1) = (&j.dom, &j.cod);
    let id0 = Functor::identity(a0);
    let id1 = Functor::identity(a1);
    let search = crate::fincat::FunctorSearch::new(a1, a0).force_along(j, &id0)?;
    let mut found = None;
    search.for_each(&mut |r| {
        let jr = j.after(r);
        let mut image = vec![false; a1.n_obj()];
        for x in a0.objects() {
            image[j.on_obj(x) as usize] = true;
        }
        // components at image objects are forced to be identities
        let ok = |arr: u32| !(image[a1.src(arr) as usize] && image[a1.tgt(arr) as usize]) || a1.is_identity(arr);
        for h in crate::homotopy::homotopies_between(&jr, &id1, &ok) {
            if h.is_under(j, j).is_ok() {
                found = Some(SdrCertificate { j: j.clone(), r: r.clone(), h, kind: SdrKind::Under });
                return std::ops::ControlFlow::Break(());
            }
        }
        std::ops::ControlFlow::Continue(())
    });
    found
}

/// Commuting squares with left leg `j` and right leg `f`, in enumeration
/// order, at most `cap` of them.
pub fn lifting_problems(j: &Functor, f: &Functor, cap: usize) -> Vec<LiftProblem> {
    let mut out = Vec::new();
    for g1 in crate::fincat::enumerate_functors(&j.cod, &f.cod) {
        let fixed = g1.after(j);
        let (f2, fixed2) = (f.clone(), fixed.clone());
        let search = crate::fincat::FunctorSearch::new(&j.dom, &f.dom)
            .restrict_objects(move |a, x| f2.on_obj(x) == fixed2.on_obj(a))
            .restrict_arrows({
                let (f3, fixed3) = (f.clone(), fixed.clone());
                move |a, x| f3.on_arr(x) == fixed3.on_arr(a)
            });
        let mut stop = false;
        search.for_each(&mut |g0| {
            out.push(LiftProblem { square: Square { top: g0.clone(), left: j.clone(), right: f.clone(), bottom: g1.clone() } });
            if out.len() >= cap {
                stop = true;
                return std::ops::ControlFlow::Break(());
            }
            std::ops::ControlFlow::Continue(())
        });
        if stop {
            break;
        }
    }
    out
}
