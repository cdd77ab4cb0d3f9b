//! Isomorphisms, embedding sets X_{a,C}, tori and division tests for rank 1 and 2.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{make_rank2, Tca, TcaElem, TcaKind};
use crate::error::TcaError;
use crate::fields::classes::{all_square_roots, class_test, square_root, Subgroup, Verdict};
use crate::fields::{Composite, Elem, EtaleAlgebra, LElem, Scalar};

/// Enumeration budget for finite searches over L.
const MAX_ENUM: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoMode {
    /// Isomorphisms commuting with the action of L.
    LLinear,
    /// Isomorphisms commuting with E only (K may be conjugated).
    ELinear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoWitness {
    /// x ↦ μ·x between rank-1 algebras.
    Rank1(Elem),
    /// z ↦ y·z, or z ↦ y·z̄ when `conjugate`.
    Rank2 { y: LElem, conjugate: bool },
}

impl IsoWitness {
    pub fn apply(&self, c: &Tca, x: &TcaElem) -> TcaElem {
        match (self, x) {
            (IsoWitness::Rank1(mu), TcaElem::R1(z)) => TcaElem::R1(mu * z),
            (IsoWitness::Rank2 { y, conjugate }, TcaElem::R2(z)) => {
                let l = c.composite().expect("rank 2");
                let z = if *conjugate { l.conj(z) } else { z.clone() };
                TcaElem::R2(l.mul(y, &z))
            }
            _ => panic!("witness does not match the element"),
        }
    }
}

fn rank2_parts(c: &Tca) -> Result<(&Composite, &Elem, &Elem), TcaError> {
    match &c.kind {
        TcaKind::Rank2 { l, e, nu } => Ok((l, e, nu)),
        _ => Err(TcaError::InvariantMismatch(format!(
            "needs a rank-2 algebra, got rank {}",
            c.rank()
        ))),
    }
}

fn k_conj(l: &Composite, nu: &Elem) -> Elem {
    l.to_k(&l.conj(&l.from_k(nu))).expect("in K")
}

/// Elements x of L with N_{L/E}(x) = α, enumerated over F_q (about q³ of
/// them), or found by a box search of radius `bound` over Q.
pub(crate) fn norm_fiber(l: &Composite, alpha: &Elem, bound: u32) -> Result<Vec<LElem>, TcaError> {
    let e = l.e();
    let b = e.base();
    let mut out = vec![];
    let candidates: Vec<Elem> = if b.is_finite() {
        let n = (b.order().expect("finite") as u128).pow(3);
        if n > MAX_ENUM {
            return Err(TcaError::TooLarge(n));
        }
        e.elements().expect("finite")
    } else {
        let r = bound.min(3) as i64;
        let mut v = vec![];
        for c0 in -r..=r {
            for c1 in -r..=r {
                for c2 in -r..=r {
                    v.push(e.from_ints(&[c0, c1, c2]));
                }
            }
        }
        v
    };
    match l.d() {
        None => {
            for u in candidates.iter().filter(|u| u.is_unit()) {
                out.push(l.make(u.clone(), alpha * &u.inv().expect("unit")));
            }
        }
        Some(d) => {
            for v in &candidates {
                let t = alpha + &(v * v).scale(d);
                if b.is_finite() {
                    for u in all_square_roots(&t) {
                        out.push(l.make(u, v.clone()));
                    }
                } else if let Verdict::Yes(Some(u)) = square_root(&t, 1) {
                    out.push(l.make(-&u, v.clone()));
                    out.push(l.make(u, v.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// All x ∈ L with N_{L/E}(x) = α and N_{L/K}(x) = κ (exhaustive over F_q).
fn norm_pair_fiber(
    l: &Composite,
    alpha: &Elem,
    kappa: &Elem,
    bound: u32,
) -> Result<Vec<LElem>, TcaError> {
    Ok(norm_fiber(l, alpha, bound)?
        .into_iter()
        .filter(|x| l.norm_k(x) == *kappa)
        .collect())
}

/// Decides whether C ≅ C'. Over F_q the answer is exact; over Q a witness is
/// searched for within `bound` and the norm-group obstruction is applied.
pub fn iso_test(c1: &Tca, c2: &Tca, mode: IsoMode, bound: u32) -> Result<Verdict<IsoWitness>, TcaError> {
    if c1.e() != c2.e() || c1.rank() != c2.rank() {
        return Err(TcaError::InvariantMismatch("E or rank differ".into()));
    }
    match (&c1.kind, &c2.kind) {
        (TcaKind::Rank1 { a }, TcaKind::Rank1 { a: b }) => Ok(iso_rank1(a, b, bound)),
        (TcaKind::Rank2 { .. }, TcaKind::Rank2 { .. }) => iso_rank2(c1, c2, mode, bound),
        _ => Err(TcaError::InvariantMismatch(
            "isomorphism testing covers ranks 1 and 2".into(),
        )),
    }
}

fn iso_rank1(a: &Elem, b: &Elem, bound: u32) -> Verdict<IsoWitness> {
    let e = a.parent();
    let ratio = a * &b.inv().expect("unit");
    if let Some(units) = e.units() {
        // μ with μ^# = μ·a/b
        return match units
            .into_iter()
            .find(|mu| mu.sharp_unchecked() == mu * &ratio)
        {
            Some(mu) => Verdict::Yes(Some(IsoWitness::Rank1(mu))),
            None => Verdict::No("no mu with mu^#/mu = a/b".into()),
        };
    }
    match class_test(&ratio, Subgroup::BaseTimesSquares, None, bound) {
        Verdict::No(s) => Verdict::No(s),
        Verdict::Unknown => Verdict::Unknown,
        Verdict::Yes(w) => {
            // a/b = c·y² gives μ = N(y)·y^{-1}·c
            if let Some(crate::fields::ClassWitness::Scaled { c, root }) = w {
                let mu = root.inv().expect("unit").scale(&(&root.norm() * &c));
                if mu.sharp_unchecked() == &mu * &ratio {
                    return Verdict::Yes(Some(IsoWitness::Rank1(mu)));
                }
            }
            Verdict::Yes(None)
        }
    }
}

fn iso_rank2(c1: &Tca, c2: &Tca, mode: IsoMode, bound: u32) -> Result<Verdict<IsoWitness>, TcaError> {
    let (l, e1, nu1) = rank2_parts(c1)?;
    let (l2, e2, nu2) = rank2_parts(c2)?;
    if l.k() != l2.k() {
        return Err(TcaError::InvariantMismatch("K_C differs".into()));
    }
    let alpha = e1 * &e2.inv()?;
    let nu2inv = nu2.inv()?;
    let mut targets = vec![(nu1 * &nu2inv, false)];
    if mode == IsoMode::ELinear {
        targets.push((&k_conj(l, nu1) * &nu2inv, true));
    }
    let fiber = norm_fiber(l, &alpha, bound)?;
    for (kappa, conjugate) in &targets {
        if let Some(y) = fiber.iter().find(|x| l.norm_k(x) == *kappa) {
            return Ok(Verdict::Yes(Some(IsoWitness::Rank2 {
                y: y.clone(),
                conjugate: *conjugate,
            })));
        }
    }
    if c1.base().is_finite() {
        return Ok(Verdict::No("no y in L with the required norms".into()));
    }
    if let Verdict::No(s) = class_test(&alpha, Subgroup::NormGroup, Some(l.k()), bound) {
        return Ok(Verdict::No(format!("e/e' is not a norm from L: {}", s)));
    }
    Ok(Verdict::Unknown)
}

/// f(a) = C_{a^#, N(a)}.
pub fn f_map(a: &Elem, k: &EtaleAlgebra) -> Result<Tca, TcaError> {
    let n = a.norm();
    let nu = k.scalar(&n);
    make_rank2(k, &a.sharp()?, &nu)
}

/// X_{a,C} = {x ∈ L : N_{L/E}(x) = e⁻¹a^#, N_{L/K}(x) = N(a)ν⁻¹}.
pub fn x_set(a: &Elem, c: &Tca, bound: u32) -> Result<Vec<LElem>, TcaError> {
    let (l, e, nu) = rank2_parts(c)?;
    let alpha = &e.inv()? * &a.sharp()?;
    let kappa = nu.inv()?.scale(&a.norm());
    norm_pair_fiber(l, &alpha, &kappa, bound)
}

/// Whether x ∈ X_{a,C}.
pub fn in_x_set(a: &Elem, c: &Tca, x: &LElem) -> Result<bool, TcaError> {
    let (l, e, nu) = rank2_parts(c)?;
    let alpha = &e.inv()? * &a.sharp()?;
    let kappa = nu.inv()?.scale(&a.norm());
    Ok(l.norm_e(x) == alpha && l.norm_k(x) == kappa)
}

/// T_{E,K}(F) = {t ∈ L : N_{L/E}(t) = 1, N_{L/K}(t) = 1}.
pub fn torus(c: &Tca) -> Result<Vec<LElem>, TcaError> {
    let (l, _, _) = rank2_parts(c)?;
    norm_pair_fiber(l, &l.e().one(), &l.k().one(), 0)
}

/// z ↦ (x/x̄)·z̄.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub factor: LElem,
}

impl Involution {
    pub fn apply(&self, l: &Composite, z: &LElem) -> LElem {
        l.mul(&self.factor, &l.conj(z))
    }
}

pub fn stabilizer_involution(a: &Elem, c: &Tca, x: &LElem) -> Result<Involution, TcaError> {
    if !in_x_set(a, c, x)? {
        return Err(TcaError::NotInXSet);
    }
    let l = c.composite().expect("rank 2");
    let factor = l.mul(x, &l.inv(&l.conj(x))?);
    Ok(Involution { factor })
}

/// F-points of Aut_E(C) over a finite field.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub order: usize,
    pub identity_order: usize,
    /// Identity component: multiplication by these elements (rank 2) or
    /// by these units of E (rank 1).
    pub identity: Vec<TcaElem>,
    /// A representative of the other component, acting by z ↦ y·z̄.
    pub outer: Option<LElem>,
}

pub fn aut_group(c: &Tca) -> Result<AutGroup, TcaError> {
    if !c.base().is_finite() {
        return Err(TcaError::UnsupportedBase(
            "automorphism groups are enumerated over finite fields".into(),
        ));
    }
    match &c.kind {
        TcaKind::Rank1 { .. } => {
            let e = c.e();
            let ids: Vec<TcaElem> = e
                .units()
                .expect("finite")
                .into_iter()
                .filter(|mu| mu.sharp_unchecked() == *mu)
                .map(TcaElem::R1)
                .collect();
            Ok(AutGroup {
                order: ids.len(),
                identity_order: ids.len(),
                identity: ids,
                outer: None,
            })
        }
        TcaKind::Rank2 { l, nu, .. } => {
            let t = torus(c)?;
            let kappa = &k_conj(l, nu) * &nu.inv()?;
            let outer = norm_pair_fiber(l, &l.e().one(), &kappa, 0)?
                .into_iter()
                .next();
            let n = t.len();
            Ok(AutGroup {
                order: if outer.is_some() { 2 * n } else { n },
                identity_order: n,
                identity: t.into_iter().map(TcaElem::R2).collect(),
                outer,
            })
        }
        TcaKind::Matrix { .. } => Err(TcaError::UnsupportedBase(
            "rank-4 automorphisms are handled by the orbit check".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisionVerdict {
    Division(String),
    /// A nonzero (a, x) ∈ E ⊕ C with (a, x)^# = 0.
    NotDivision { a: Elem, x: TcaElem },
    Unknown,
}

/// (a, x)^# = (a^# - Q(x), β(x) - a·x).
pub fn springer_sharp(c: &Tca, a: &Elem, x: &TcaElem) -> (Elem, TcaElem) {
    let first = &a.sharp_unchecked() - &c.q(x);
    let bx = c.beta(x);
    let ax = c.scale(&-a, x);
    (first, c.add(&bx, &ax))
}

fn certify(c: &Tca, a: Elem, x: TcaElem) -> Option<DivisionVerdict> {
    let (s0, s1) = springer_sharp(c, &a, &x);
    let nonzero = !a.is_zero() || x != c.zero();
    (nonzero && s0.is_zero() && s1 == c.zero()).then_some(DivisionVerdict::NotDivision { a, x })
}

/// Certificate from y with ν/N_{L/K}(y) = c ∈ F^×: C ≅ C_{e', c} and
/// y' = c·e'^{-1} moves further to C_{e'', 1} with N(e'') = 1.
fn certificate_via(c: &Tca, y: &LElem) -> Option<DivisionVerdict> {
    let (l, e, nu) = rank2_parts(c).ok()?;
    let nk = l.norm_k(y);
    let s = (nu * &nk.inv().ok()?).as_scalar()?;
    let e1 = e * &l.norm_e(y).inv().ok()?;
    // second step inside E: y2 = s·e1⁻¹
    let y2 = e1.inv().ok()?.scale(&s);
    let e2 = &e1 * &(&y2 * &y2).inv().ok()?;
    let total = l.mul(&l.from_e(&y2), y);
    // image of (e2, e2^#) under the inverse of z ↦ total·z
    let x = l.mul(&l.inv(&total).ok()?, &l.from_e(&e2.sharp_unchecked()));
    certify(c, e2, TcaElem::R2(x))
}

/// Decides whether J = E ⊕ C is a division algebra.
pub fn division_test(c: &Tca, bound: u32, seed: u64) -> Result<DivisionVerdict, TcaError> {
    let (l, _, nu) = rank2_parts(c)?;
    let e = c.e();
    if !e.is_field() {
        for i in 0..e.num_factors() {
            let a = e.idempotent(i);
            if a.sharp_unchecked().is_zero() {
                if let Some(v) = certify(c, a, c.zero()) {
                    return Ok(v);
                }
            }
        }
    }
    if let Some(v) = certificate_via(c, &l.one()) {
        return Ok(v);
    }
    let b = c.base();
    if b.is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200_000 {
            let y = l.random_unit(&mut rng);
            let ratio = nu * &l.norm_k(&y).inv()?;
            if ratio.as_scalar().is_some() {
                if let Some(v) = certificate_via(c, &y) {
                    return Ok(v);
                }
            }
        }
        return Ok(DivisionVerdict::Unknown);
    }
    // over Q: small y with ν/N_{L/K}(y) ∈ F
    let r = bound.min(2) as i64;
    let mut coords = vec![-r; 6];
    loop {
        let y = l.make(e.from_ints(&coords[..3]), e.from_ints(&coords[3..]));
        if l.is_unit(&y) {
            let ratio = nu * &l.norm_k(&y).inv()?;
            if ratio.as_scalar().is_some() {
                if let Some(v) = certificate_via(c, &y) {
                    return Ok(v);
                }
            }
        }
        let mut j = 0;
        while j < 6 {
            coords[j] += 1;
            if coords[j] > r {
                coords[j] = -r;
                j += 1;
            } else {
                break;
            }
        }
        if j == 6 {
            break;
        }
    }
    if l.is_split() {
        // C ≅ C(λ) with λ = ν₂⁻¹, division iff λ is not a norm from E
        let lambda = nu.coords()[1].inv().expect("unit");
        if let Some(p) = super::rank4::inert_norm_obstruction(e, &lambda) {
            return Ok(DivisionVerdict::Division(format!(
                "lambda = {} has valuation prime to 3 at the inert prime {}",
                lambda, p
            )));
        }
    }
    Ok(DivisionVerdict::Unknown)
}

/// Scalar λ with C ≅ C(λ) for split K.
pub fn cyclic_parameter(c: &Tca) -> Option<Scalar> {
    let (l, _, nu) = rank2_parts(c).ok()?;
    l.is_split().then(|| nu.coords()[1].inv().expect("unit"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, quadratic_split, BaseField, CubicKind};
    use crate::tca::make_cyclic;

    fn shapes(b: BaseField) -> Vec<(EtaleAlgebra, EtaleAlgebra)> {
        let mut v = vec![];
        for kind in [CubicKind::Split, CubicKind::FTimesK, CubicKind::Field] {
            let e = EtaleAlgebra::finite_cubic(b, kind).unwrap();
            v.push((e.clone(), quadratic_split(b)));
            v.push((e, quadratic_field(b, &b.nonsquare().unwrap()).unwrap()));
        }
        v
    }

    #[test]
    fn identity_is_an_isomorphism() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let k = quadratic_split(b);
        let c = make_rank2(&k, &e.one(), &k.one()).unwrap();
        match iso_test(&c, &c, IsoMode::LLinear, 0).unwrap() {
            Verdict::Yes(Some(IsoWitness::Rank2 { y, conjugate: false })) => {
                assert_eq!(c.composite().unwrap().norm_e(&y), e.one())
            }
            v => panic!("{:?}", v),
        }
    }

    #[test]
    fn lang_collapse_f5() {
        let b = BaseField::finite(5).unwrap();
        for (e, k) in shapes(b) {
            let base = make_rank2(&k, &e.one(), &k.one()).unwrap();
            let kunits = k.units().unwrap();
            for ee in e.units().unwrap().iter().step_by(7) {
                for nu in kunits.iter().filter(|n| n.norm() == ee.norm()) {
                    let c = make_rank2(&k, ee, nu).unwrap();
                    let v = iso_test(&base, &c, IsoMode::LLinear, 0).unwrap();
                    let Verdict::Yes(Some(w)) = v else { panic!("not isomorphic") };
                    let mut rng = ChaCha8Rng::seed_from_u64(0);
                    let z = base.random(&mut rng);
                    assert_eq!(c.q(&w.apply(&base, &z)), base.q(&z));
                    assert_eq!(c.beta(&w.apply(&base, &z)), w.apply(&base, &base.beta(&z)));
                }
            }
        }
    }

    #[test]
    fn xset_contains_one_for_f_of_a() {
        let b = BaseField::finite(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (e, k) in shapes(b) {
            let a = e.random_unit(&mut rng);
            let c = f_map(&a, &k).unwrap();
            let l = c.composite().unwrap();
            let xs = x_set(&a, &c, 0).unwrap();
            assert!(xs.contains(&l.one()));
            assert_eq!(xs.len(), torus(&c).unwrap().len());
        }
    }

    #[test]
    fn involution_properties() {
        let b = BaseField::finite(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let k = quadratic_field(b, &b.nonsquare().unwrap()).unwrap();
        let a = e.random_unit(&mut rng);
        let c = f_map(&a, &k).unwrap();
        let l = c.composite().unwrap();
        let h1 = stabilizer_involution(&a, &c, &l.one()).unwrap();
        assert_eq!(h1.factor, l.one());
        let t = torus(&c).unwrap();
        for s in t.iter().take(20) {
            let h = stabilizer_involution(&a, &c, s).unwrap();
            let h2 = stabilizer_involution(&a, &c, s).unwrap();
            let z = l.random(&mut rng);
            assert_eq!(h.apply(l, &h2.apply(l, &z)), z);
            assert_eq!(h.factor, l.mul(s, s));
            let hz = TcaElem::R2(h.apply(l, &z));
            assert_eq!(c.q(&hz), c.q(&TcaElem::R2(z.clone())));
            assert_eq!(
                c.beta(&hz),
                TcaElem::R2(h.apply(l, c.beta(&TcaElem::R2(z)).as_l().unwrap()))
            );
        }
        assert!(stabilizer_involution(&a, &c, &l.zero()).is_err());
    }

    #[test]
    fn cyclic_one_automorphisms() {
        for q in [5u32, 7] {
            let b = BaseField::finite(q).unwrap();
            let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
            let c = make_cyclic(&e, &b.one()).unwrap();
            let g = aut_group(&c).unwrap();
            let q = q as usize;
            assert_eq!(g.order, 2 * (q * q + q + 1));
        }
    }

    #[test]
    fn division_certificates() {
        let b = BaseField::finite(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (e, k) in shapes(b) {
            let kunits = k.units().unwrap();
            for _ in 0..3 {
                let ee = e.random_unit(&mut rng);
                let nu = kunits.iter().find(|n| n.norm() == ee.norm()).unwrap();
                let c = make_rank2(&k, &ee, nu).unwrap();
                assert!(matches!(
                    division_test(&c, 2, 1).unwrap(),
                    DivisionVerdict::NotDivision { .. }
                ));
            }
        }
    }

    #[test]
    fn division_over_q_cyclic() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-1), q.int(-2), q.int(1), q.int(1)])
            .unwrap();
        let c = make_cyclic(&e, &q.int(2)).unwrap();
        assert!(matches!(
            division_test(&c, 1, 0).unwrap(),
            DivisionVerdict::Division(_)
        ));
        let c1 = make_cyclic(&e, &q.int(1)).unwrap();
        assert!(matches!(
            division_test(&c1, 1, 0).unwrap(),
            DivisionVerdict::NotDivision { .. }
        ));
    }
}
