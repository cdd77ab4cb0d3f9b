//! Twisted composition algebras of E-rank 1, 2 and 4.
//!
//! Rank 1 is E itself with Q(x) = a^#·x², β(x) = a·x^#. Rank 2 is carried by
//! L = E ⊗ K in the (e, ν) normal form. Rank 4 is M₂(E) with an order-3
//! automorphism σ of E: Q = det, β(x) = adj(x^σ)·adj(x^{σ²}). For E = F³ and σ
//! the cyclic shift this is the triple-of-matrices model.

mod iso;
mod rank4;

pub use iso::{
    aut_group, cyclic_parameter, division_test, f_map, in_x_set, iso_test, springer_sharp,
    stabilizer_involution, torus, x_set, AutGroup, DivisionVerdict, Involution, IsoMode,
    IsoWitness,
};
pub(crate) use iso::norm_fiber;
pub use rank4::{cyclic_embedding, inert_norm_obstruction, rank4_orbit_check, CyclicEmbedding, OrbitReport, OmegaReport};

use rand::Rng;

use crate::error::{FieldError, TcaError};
use crate::fields::composite::quadratic_d;
use crate::fields::{BaseField, Composite, Elem, EtaleAlgebra, LElem, Scalar};

/// Order-3 automorphism of E used by the matrix model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sigma {
    /// (a1, a2, a3) ↦ (a2, a3, a1) on E = F³.
    Shift,
    /// Field automorphism sending the generator X to the given element.
    Generator(Elem),
}

impl Sigma {
    pub fn apply(&self, x: &Elem) -> Elem {
        match self {
            Sigma::Shift => {
                let c = x.coords();
                x.parent()
                    .from_flat(vec![c[1].clone(), c[2].clone(), c[0].clone()])
                    .expect("rank 3")
            }
            Sigma::Generator(img) => x.apply_generator_map(img),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rank4Model {
    /// E = F³, C = M₂(F)³.
    Split,
    /// E a cyclic cubic field, C = M₂(E).
    Twisted,
    /// C(λ) = E ⊕ E with Q(x, y) = xy and β(x, y) = (λ⁻¹y^#, λx^#).
    Cyclic(Scalar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TcaKind {
    Rank1 { a: Elem },
    Rank2 { l: Composite, e: Elem, nu: Elem },
    Matrix { sigma: Sigma },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tca {
    e: EtaleAlgebra,
    kind: TcaKind,
}

/// 2×2 matrix over E, row-major.
pub type Mat2 = [Elem; 4];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TcaElem {
    R1(Elem),
    R2(LElem),
    R4(Box<Mat2>),
}

pub fn make_rank1(a: &Elem) -> Result<Tca, TcaError> {
    check_cubic(a.parent())?;
    if !a.is_unit() {
        a.inv()?;
    }
    Ok(Tca {
        e: a.parent().clone(),
        kind: TcaKind::Rank1 { a: a.clone() },
    })
}

pub fn make_rank2(k: &EtaleAlgebra, e: &Elem, nu: &Elem) -> Result<Tca, TcaError> {
    let ealg = e.parent();
    check_cubic(ealg)?;
    let l = Composite::new(ealg, k)?;
    e.inv()?;
    // ν is given in the caller's presentation of K; re-read it in L's K
    let nu = reexpress_k(k, l.k(), nu)?;
    nu.inv()?;
    if e.norm() != nu.norm() {
        return Err(TcaError::NormMismatch);
    }
    Ok(Tca {
        e: ealg.clone(),
        kind: TcaKind::Rank2 {
            l,
            e: e.clone(),
            nu,
        },
    })
}

/// C(λ) = C_{1,(λ,λ⁻¹)} with K split.
pub fn make_cyclic(e: &EtaleAlgebra, lambda: &Scalar) -> Result<Tca, TcaError> {
    let b = e.base();
    let inv = lambda
        .inv()
        .ok_or(TcaError::Field(FieldError::NotAUnit { factor: 0 }))?;
    let k = crate::fields::quadratic_split(b);
    let nu = k.from_flat(vec![lambda.clone(), inv])?;
    make_rank2(&k, &e.one(), &nu)
}

pub fn make_rank4(e: &EtaleAlgebra, model: &Rank4Model) -> Result<Tca, TcaError> {
    check_cubic(e)?;
    match model {
        Rank4Model::Cyclic(l) => make_cyclic(e, l),
        Rank4Model::Split => {
            if e.num_factors() != 3 {
                return Err(TcaError::UnsupportedBase(
                    "the split matrix model needs E = F^3".into(),
                ));
            }
            Ok(Tca {
                e: e.clone(),
                kind: TcaKind::Matrix { sigma: Sigma::Shift },
            })
        }
        Rank4Model::Twisted => {
            let sigma = cyclic_generator(e, 6)?;
            Ok(Tca {
                e: e.clone(),
                kind: TcaKind::Matrix { sigma },
            })
        }
    }
}

/// The order-3 automorphism of a cyclic cubic E: Frobenius over F_q, a
/// nontrivial root of the defining polynomial with small integer
/// coefficients over Q, the shift on F³.
pub fn cyclic_generator(e: &EtaleAlgebra, bound: i64) -> Result<Sigma, TcaError> {
    if e.num_factors() == 3 {
        return Ok(Sigma::Shift);
    }
    if !e.is_field() || e.rank() != 3 {
        return Err(TcaError::UnsupportedBase("E is not cyclic".into()));
    }
    let b = e.base();
    let x = e.generator();
    if let Some(q) = b.order() {
        return Ok(Sigma::Generator(x.pow(q as u128)));
    }
    let f = &e.factors()[0];
    let eval = |y: &Elem| {
        let mut acc = e.zero();
        for c in f.iter().rev() {
            acc = &(&acc * y) + &e.scalar(c);
        }
        acc
    };
    for c2 in -bound..=bound {
        for c1 in -bound..=bound {
            for c0 in -bound..=bound {
                if c2 == 0 && c1 == 1 && c0 == 0 {
                    continue;
                }
                let y = e.from_ints(&[c0, c1, c2]);
                if eval(&y).is_zero() {
                    return Ok(Sigma::Generator(y));
                }
            }
        }
    }
    Err(TcaError::UnsupportedBase(
        "no small Galois automorphism found; E may not be cyclic".into(),
    ))
}

fn check_cubic(e: &EtaleAlgebra) -> Result<(), TcaError> {
    if e.rank() != 3 {
        return Err(FieldError::WrongRank {
            expected: 3,
            found: e.rank(),
        }
        .into());
    }
    Ok(())
}

/// Moves an element of a quadratic algebra `from` into the normalized `to`.
fn reexpress_k(from: &EtaleAlgebra, to: &EtaleAlgebra, x: &Elem) -> Result<Elem, TcaError> {
    if x.parent() != from {
        return Err(FieldError::ParentMismatch.into());
    }
    if from == to {
        return Ok(x.clone());
    }
    let b = from.base();
    match (quadratic_d(from), quadratic_d(to)) {
        (None, None) => Ok(to.from_flat(x.coords().to_vec())?),
        (Some(_), Some(d2)) => {
            // F[X]/(X² + pX + c): X = -p/2 + √disc/2; disc = r² d2
            let f = &from.factors()[0];
            let p = &f[1];
            let disc = &(p * p) - &(&b.int(4) * &f[0]);
            let ratio = &disc * &d2.inv().expect("nonzero");
            let r = b
                .sqrt(&ratio)
                .ok_or_else(|| TcaError::InvariantMismatch("quadratic algebras differ".into()))?;
            let c = x.coords();
            let half = b.ratio(1, 2);
            // c0 + c1 X = (c0 - c1 p/2) + (c1 r/2)√d2
            let u = &c[0] - &(&(&c[1] * p) * &half);
            let v = &(&c[1] * &r) * &half;
            Ok(to.from_flat(vec![u, v])?)
        }
        _ => Err(TcaError::InvariantMismatch("quadratic algebras differ".into())),
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        &(&a[0] * &b[0]) + &(&a[1] * &b[2]),
        &(&a[0] * &b[1]) + &(&a[1] * &b[3]),
        &(&a[2] * &b[0]) + &(&a[3] * &b[2]),
        &(&a[2] * &b[1]) + &(&a[3] * &b[3]),
    ]
}

fn mat_adj(a: &Mat2) -> Mat2 {
    [a[3].clone(), -&a[1], -&a[2], a[0].clone()]
}

fn mat_det(a: &Mat2) -> Elem {
    &(&a[0] * &a[3]) - &(&a[1] * &a[2])
}

fn mat_map(a: &Mat2, f: impl Fn(&Elem) -> Elem) -> Mat2 {
    [f(&a[0]), f(&a[1]), f(&a[2]), f(&a[3])]
}

impl Tca {
    pub fn e(&self) -> &EtaleAlgebra {
        &self.e
    }
    pub fn kind(&self) -> &TcaKind {
        &self.kind
    }
    pub fn base(&self) -> BaseField {
        self.e.base()
    }

    /// Dimension of C over E.
    pub fn rank(&self) -> usize {
        match self.kind {
            TcaKind::Rank1 { .. } => 1,
            TcaKind::Rank2 { .. } => 2,
            TcaKind::Matrix { .. } => 4,
        }
    }

    pub fn composite(&self) -> Option<&Composite> {
        match &self.kind {
            TcaKind::Rank2 { l, .. } => Some(l),
            _ => None,
        }
    }

    /// (e, ν) for rank 2.
    pub fn params(&self) -> Option<(&Elem, &Elem)> {
        match &self.kind {
            TcaKind::Rank2 { e, nu, .. } => Some((e, nu)),
            _ => None,
        }
    }

    pub fn zero(&self) -> TcaElem {
        match &self.kind {
            TcaKind::Rank1 { .. } => TcaElem::R1(self.e.zero()),
            TcaKind::Rank2 { l, .. } => TcaElem::R2(l.zero()),
            TcaKind::Matrix { .. } => {
                let z = self.e.zero();
                TcaElem::R4(Box::new([z.clone(), z.clone(), z.clone(), z]))
            }
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> TcaElem {
        match &self.kind {
            TcaKind::Rank1 { .. } => TcaElem::R1(self.e.random(rng)),
            TcaKind::Rank2 { l, .. } => TcaElem::R2(l.random(rng)),
            TcaKind::Matrix { .. } => TcaElem::R4(Box::new([
                self.e.random(rng),
                self.e.random(rng),
                self.e.random(rng),
                self.e.random(rng),
            ])),
        }
    }

    pub fn add(&self, x: &TcaElem, y: &TcaElem) -> TcaElem {
        match (x, y) {
            (TcaElem::R1(a), TcaElem::R1(b)) => TcaElem::R1(a + b),
            (TcaElem::R2(a), TcaElem::R2(b)) => {
                TcaElem::R2(self.composite().expect("rank 2").add(a, b))
            }
            (TcaElem::R4(a), TcaElem::R4(b)) => TcaElem::R4(Box::new([
                &a[0] + &b[0],
                &a[1] + &b[1],
                &a[2] + &b[2],
                &a[3] + &b[3],
            ])),
            _ => panic!("mixed element kinds"),
        }
    }

    /// E-module action c·x.
    pub fn scale(&self, c: &Elem, x: &TcaElem) -> TcaElem {
        match x {
            TcaElem::R1(a) => TcaElem::R1(c * a),
            TcaElem::R2(a) => TcaElem::R2(self.composite().expect("rank 2").scale_e(c, a)),
            TcaElem::R4(a) => TcaElem::R4(Box::new(mat_map(a, |m| c * m))),
        }
    }

    pub fn q(&self, x: &TcaElem) -> Elem {
        match (&self.kind, x) {
            (TcaKind::Rank1 { a }, TcaElem::R1(y)) => &a.sharp_unchecked() * &(y * y),
            (TcaKind::Rank2 { l, e, .. }, TcaElem::R2(y)) => e * &l.norm_e(y),
            (TcaKind::Matrix { .. }, TcaElem::R4(m)) => mat_det(m),
            _ => panic!("element does not belong to this algebra"),
        }
    }

    pub fn beta(&self, x: &TcaElem) -> TcaElem {
        match (&self.kind, x) {
            (TcaKind::Rank1 { a }, TcaElem::R1(y)) => TcaElem::R1(a * &y.sharp_unchecked()),
            (TcaKind::Rank2 { l, e, nu }, TcaElem::R2(y)) => {
                let einv = l.from_e(&e.inv().expect("unit"));
                let nubar = l.conj(&l.from_k(nu));
                let t = l.mul(&l.sharp(&l.conj(y)), &einv);
                TcaElem::R2(l.mul(&t, &nubar))
            }
            (TcaKind::Matrix { sigma }, TcaElem::R4(m)) => {
                let s1 = mat_map(m, |z| sigma.apply(z));
                let s2 = mat_map(&s1, |z| sigma.apply(z));
                TcaElem::R4(Box::new(mat_mul(&mat_adj(&s1), &mat_adj(&s2))))
            }
            _ => panic!("element does not belong to this algebra"),
        }
    }

    /// Polar form b_Q(x, y) = Q(x+y) - Q(x) - Q(y).
    pub fn bq(&self, x: &TcaElem, y: &TcaElem) -> Elem {
        &(&self.q(&self.add(x, y)) - &self.q(x)) - &self.q(y)
    }

    /// N_C(x) = b_Q(x, β(x)), which must be a scalar.
    pub fn nc(&self, x: &TcaElem) -> Result<Scalar, TcaError> {
        let v = self.bq(x, &self.beta(x));
        v.as_scalar().ok_or_else(|| {
            TcaError::AxiomViolation(format!("b_Q(x, beta(x)) = {} is not in F", v))
        })
    }

    /// Checks β(c·x) = c^#β(x), Q(β(x)) = Q(x)^# and N_C(x) ∈ F.
    pub fn check_axioms(&self, c: &Elem, x: &TcaElem) -> Result<(), TcaError> {
        let lhs = self.beta(&self.scale(c, x));
        let rhs = self.scale(&c.sharp_unchecked(), &self.beta(x));
        if lhs != rhs {
            return Err(TcaError::AxiomViolation("beta(c x) != c^# beta(x)".into()));
        }
        if self.q(&self.beta(x)) != self.q(x).sharp_unchecked() {
            return Err(TcaError::AxiomViolation("Q(beta(x)) != Q(x)^#".into()));
        }
        self.nc(x)?;
        Ok(())
    }

    /// The rank-2 element embedding L-coordinates.
    pub fn elem2(&self, x: LElem) -> TcaElem {
        TcaElem::R2(x)
    }

    /// Matrix element from four entries.
    pub fn elem4(&self, m: Mat2) -> TcaElem {
        TcaElem::R4(Box::new(m))
    }

    /// The base point of the split or twisted model: diag(1, 0) in each slot.
    pub fn base_point(&self) -> Option<TcaElem> {
        match self.kind {
            TcaKind::Matrix { .. } => {
                let z = self.e.zero();
                Some(self.elem4([self.e.one(), z.clone(), z.clone(), z]))
            }
            _ => None,
        }
    }
}

impl TcaElem {
    pub fn as_l(&self) -> Option<&LElem> {
        match self {
            TcaElem::R2(x) => Some(x),
            _ => None,
        }
    }

    /// Coordinates as nested strings, E-coordinate blocks in order.
    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        match self {
            TcaElem::R1(a) => vec![a.per_factor()],
            TcaElem::R2(x) => vec![x.u.per_factor(), x.v.per_factor()],
            TcaElem::R4(m) => m.iter().map(|z| z.per_factor()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, quadratic_split, CubicKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank1_unit_case() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let c = make_rank1(&e.one()).unwrap();
        let x = e.from_ints(&[2, 3, 4]);
        assert_eq!(c.q(&TcaElem::R1(x.clone())), &x * &x);
        assert_eq!(c.beta(&TcaElem::R1(x.clone())), TcaElem::R1(x.sharp().unwrap()));
    }

    #[test]
    fn rank1_axioms_random_f7() {
        let b = BaseField::finite(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let c = make_rank1(&e.random_unit(&mut rng)).unwrap();
        for _ in 0..100 {
            let x = c.random(&mut rng);
            let y = e.random(&mut rng);
            c.check_axioms(&y, &x).unwrap();
        }
    }

    #[test]
    fn rank1_rejects_non_unit() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        assert!(make_rank1(&e.from_ints(&[1, 0, 2])).is_err());
    }

    #[test]
    fn rank2_norm_mismatch() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let k = quadratic_split(b);
        let r = make_rank2(&k, &e.from_ints(&[1, 1, 2]), &k.from_ints(&[1, 1]));
        assert_eq!(r.unwrap_err(), TcaError::NormMismatch);
    }

    #[test]
    fn split_rank2_quadratic_form_is_coordinatewise() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let k = quadratic_split(b);
        let c = make_rank2(&k, &e.one(), &k.one()).unwrap();
        let l = c.composite().unwrap();
        let x = l.make(e.from_ints(&[1, 2, 3]), e.from_ints(&[4, 5, 6]));
        assert_eq!(c.q(&TcaElem::R2(x)), e.from_ints(&[4, 10, 18]));
    }

    #[test]
    fn cyclic_norm_formula() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-2), q.int(0), q.int(0), q.int(1)])
            .unwrap();
        let lam = q.int(3);
        let c = make_cyclic(&e, &lam).unwrap();
        let l = c.composite().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (x, y) = (e.random(&mut rng), e.random(&mut rng));
            let n = c.nc(&TcaElem::R2(l.make(x.clone(), y.clone()))).unwrap();
            let expect = &(&lam * &x.norm()) + &(&lam.inv().unwrap() * &y.norm());
            assert_eq!(n, expect);
        }
    }

    #[test]
    fn split_rank4_axioms_f5() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let c = make_rank4(&e, &Rank4Model::Split).unwrap();
        assert_eq!(c.nc(&c.base_point().unwrap()).unwrap(), b.one());
        assert!(c.q(&c.base_point().unwrap()).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x = c.random(&mut rng);
            c.check_axioms(&e.random(&mut rng), &x).unwrap();
        }
    }

    #[test]
    fn twisted_rank4_axioms() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let c = make_rank4(&e, &Rank4Model::Twisted).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let x = c.random(&mut rng);
            c.check_axioms(&e.random(&mut rng), &x).unwrap();
        }
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-1), q.int(-2), q.int(1), q.int(1)])
            .unwrap();
        let c = make_rank4(&e, &Rank4Model::Twisted).unwrap();
        for _ in 0..10 {
            let x = c.random(&mut rng);
            c.check_axioms(&e.random(&mut rng), &x).unwrap();
        }
        let noncyclic =
            EtaleAlgebra::cubic_field(q, vec![q.int(-2), q.int(0), q.int(0), q.int(1)]).unwrap();
        assert!(make_rank4(&noncyclic, &Rank4Model::Twisted).is_err());
    }

    #[test]
    fn rank2_axioms_field_k_over_q() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::f_times_k(q, q.int(2)).unwrap();
        let k = quadratic_field(q, &q.int(-3)).unwrap();
        // N(e) = 1·(1 - 2·1) = -1 would need N_K(ν) = -1: impossible in Q(√-3), use e = 1
        let c = make_rank2(&k, &e.one(), &k.from_ints(&[1, 0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = c.random(&mut rng);
            c.check_axioms(&e.random(&mut rng), &x).unwrap();
        }
    }
}
