//! Étale algebras stored as a product of field extensions F[X]/(g_i).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poly::{self, Poly};
use super::scalar::{BaseDesc, BaseField, Scalar};
use crate::error::FieldError;

struct Data {
    base: BaseField,
    factors: Vec<Poly>,
    offsets: Vec<usize>,
    rank: usize,
}

/// Handle to an étale algebra; cheap to clone.
#[derive(Clone)]
pub struct EtaleAlgebra(Arc<Data>);

impl PartialEq for EtaleAlgebra {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.base == o.0.base && self.0.factors == o.0.factors)
    }
}
impl Eq for EtaleAlgebra {}

impl fmt::Debug for EtaleAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Etale({:?}; ", self.0.base)?;
        for (i, g) in self.0.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{:?}", g)?;
        }
        write!(f, ")")
    }
}

/// Shape of a cubic étale algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicKind {
    Split,
    FTimesK,
    Field,
}

/// JSON form `{base, factors}` with coefficients as exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDesc {
    pub base: BaseDesc,
    pub factors: Vec<Vec<String>>,
}

impl EtaleAlgebra {
    /// Builds from monic irreducible factor polynomials.
    pub fn new(base: BaseField, factors: Vec<Poly>) -> Result<Self, FieldError> {
        for g in &factors {
            if g.iter().any(|c| !base.contains(c)) {
                return Err(FieldError::ParentMismatch);
            }
            if g.len() < 2 || !g[g.len() - 1].is_one() {
                return Err(FieldError::NotMonic);
            }
            match poly::is_irreducible_small(&base, g) {
                Some(true) => {}
                Some(false) => return Err(FieldError::Reducible(format!("{:?}", g))),
                None => {
                    return Err(FieldError::Unsupported(
                        "factors of degree above 3".into(),
                    ))
                }
            }
        }
        Ok(Self::unchecked(base, factors))
    }

    fn unchecked(base: BaseField, factors: Vec<Poly>) -> Self {
        let mut offsets = vec![];
        let mut rank = 0;
        for g in &factors {
            offsets.push(rank);
            rank += g.len() - 1;
        }
        EtaleAlgebra(Arc::new(Data {
            base,
            factors,
            offsets,
            rank,
        }))
    }

    /// F^n.
    pub fn split(base: BaseField, n: usize) -> Self {
        let x = vec![base.zero(), base.one()];
        Self::unchecked(base, vec![x; n])
    }

    /// The base field viewed as a rank-1 algebra.
    pub fn base_algebra(base: BaseField) -> Self {
        Self::split(base, 1)
    }

    /// F[X]/(X^2 - d) for a non-square d.
    pub fn quadratic_field(base: BaseField, d: Scalar) -> Result<Self, FieldError> {
        Self::new(base, vec![vec![-d, base.zero(), base.one()]])
    }

    /// F × F[X]/(X^2 - d).
    pub fn f_times_k(base: BaseField, d: Scalar) -> Result<Self, FieldError> {
        let x = vec![base.zero(), base.one()];
        Self::new(base, vec![x, vec![-d, base.zero(), base.one()]])
    }

    /// F[X]/(f) for an irreducible monic cubic.
    pub fn cubic_field(base: BaseField, f: Poly) -> Result<Self, FieldError> {
        if f.len() != 4 {
            return Err(FieldError::WrongRank {
                expected: 3,
                found: f.len().saturating_sub(1),
            });
        }
        Self::new(base, vec![f])
    }

    /// The unique cubic field extension of a finite field, with the first
    /// irreducible polynomial X^3 + c in lexicographic search, else X^3 + aX + c.
    pub fn finite_cubic_field(base: BaseField) -> Result<Self, FieldError> {
        let elems = base
            .elements()
            .ok_or_else(|| FieldError::Unsupported("cubic field search over Q".into()))?;
        for a in &elems {
            for c in &elems {
                let f = vec![c.clone(), a.clone(), base.zero(), base.one()];
                if poly::is_irreducible_small(&base, &f) == Some(true) {
                    return Self::cubic_field(base, f);
                }
            }
        }
        Err(FieldError::Unsupported("no irreducible cubic found".into()))
    }

    /// Cubic algebra of the requested shape; over F_q the shapes are unique
    /// up to isomorphism.
    pub fn finite_cubic(base: BaseField, kind: CubicKind) -> Result<Self, FieldError> {
        match kind {
            CubicKind::Split => Ok(Self::split(base, 3)),
            CubicKind::FTimesK => {
                let n = base
                    .nonsquare()
                    .ok_or_else(|| FieldError::Unsupported("needs a finite field".into()))?;
                Self::f_times_k(base, n)
            }
            CubicKind::Field => Self::finite_cubic_field(base),
        }
    }

    pub fn base(&self) -> BaseField {
        self.0.base
    }
    pub fn rank(&self) -> usize {
        self.0.rank
    }
    pub fn factors(&self) -> &[Poly] {
        &self.0.factors
    }
    pub fn num_factors(&self) -> usize {
        self.0.factors.len()
    }
    pub fn factor_degree(&self, i: usize) -> usize {
        self.0.factors[i].len() - 1
    }
    pub fn offset(&self, i: usize) -> usize {
        self.0.offsets[i]
    }
    pub fn is_field(&self) -> bool {
        self.num_factors() == 1
    }

    pub fn cubic_kind(&self) -> Option<CubicKind> {
        if self.rank() != 3 {
            return None;
        }
        Some(match self.num_factors() {
            3 => CubicKind::Split,
            2 => CubicKind::FTimesK,
            _ => CubicKind::Field,
        })
    }

    pub fn zero(&self) -> Elem {
        Elem {
            alg: self.clone(),
            c: vec![self.base().zero(); self.rank()],
        }
    }

    pub fn scalar(&self, s: &Scalar) -> Elem {
        let mut c = vec![self.base().zero(); self.rank()];
        for &o in &self.0.offsets {
            c[o] = s.clone();
        }
        Elem {
            alg: self.clone(),
            c,
        }
    }

    pub fn one(&self) -> Elem {
        self.scalar(&self.base().one())
    }

    pub fn int(&self, n: i64) -> Elem {
        self.scalar(&self.base().int(n))
    }

    /// Element from flat coordinates (factor blocks concatenated).
    pub fn from_flat(&self, c: Vec<Scalar>) -> Result<Elem, FieldError> {
        if c.len() != self.rank() {
            return Err(FieldError::WrongRank {
                expected: self.rank(),
                found: c.len(),
            });
        }
        if c.iter().any(|s| !self.base().contains(s)) {
            return Err(FieldError::ParentMismatch);
        }
        Ok(Elem {
            alg: self.clone(),
            c,
        })
    }

    pub fn from_ints(&self, c: &[i64]) -> Elem {
        let b = self.base();
        self.from_flat(c.iter().map(|&n| b.int(n)).collect())
            .expect("coordinate count matches rank")
    }

    /// Element from one residue per factor.
    pub fn from_factors(&self, parts: Vec<Vec<Scalar>>) -> Result<Elem, FieldError> {
        if parts.len() != self.num_factors() {
            return Err(FieldError::Malformed("wrong number of factor residues".into()));
        }
        let mut c = Vec::with_capacity(self.rank());
        for (i, p) in parts.into_iter().enumerate() {
            let r = poly::rem_monic(&p, &self.0.factors[i]);
            let d = self.factor_degree(i);
            let mut r = r;
            r.resize(d, self.base().zero());
            c.extend(r);
        }
        self.from_flat(c)
    }

    /// The class of X in every factor.
    pub fn generator(&self) -> Elem {
        let parts = (0..self.num_factors())
            .map(|_| vec![self.base().zero(), self.base().one()])
            .collect();
        self.from_factors(parts).expect("well formed")
    }

    /// Idempotent of factor `i`.
    pub fn idempotent(&self, i: usize) -> Elem {
        let mut e = self.zero();
        e.c[self.offset(i)] = self.base().one();
        e
    }

    /// All elements (finite base only), in index order.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        let q = self.base().order()? as usize;
        let total = q.checked_pow(self.rank() as u32)?;
        if total > 50_000_000 {
            return None;
        }
        let base = self.base();
        let scalars = base.elements()?;
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut c = Vec::with_capacity(self.rank());
            for _ in 0..self.rank() {
                c.push(scalars[idx % q].clone());
                idx /= q;
            }
            out.push(Elem {
                alg: self.clone(),
                c,
            });
        }
        Some(out)
    }

    pub fn units(&self) -> Option<Vec<Elem>> {
        self.elements()
            .map(|v| v.into_iter().filter(|x| x.is_unit()).collect())
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        let b = self.base();
        Elem {
            alg: self.clone(),
            c: (0..self.rank()).map(|_| b.random(rng)).collect(),
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        loop {
            let x = self.random(rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    pub fn desc(&self) -> AlgebraDesc {
        AlgebraDesc {
            base: self.base().desc(),
            factors: self
                .0
                .factors
                .iter()
                .map(|g| g.iter().map(|c| c.to_string()).collect())
                .collect(),
        }
    }

    pub fn from_desc(d: &AlgebraDesc) -> Result<Self, FieldError> {
        let base = BaseField::from_desc(&d.base)?;
        let factors = d
            .factors
            .iter()
            .map(|g| g.iter().map(|s| base.parse(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(base, factors)
    }

    /// Element from per-factor strings.
    pub fn parse_elem(&self, parts: &[Vec<String>]) -> Result<Elem, FieldError> {
        let b = self.base();
        let parts = parts
            .iter()
            .map(|p| p.iter().map(|s| b.parse(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        self.from_factors(parts)
    }

    /// Multiplication matrix of `x` restricted to factor `i`; column j is x·X^j.
    pub fn mult_matrix(&self, x: &Elem, i: usize) -> Vec<Vec<Scalar>> {
        let d = self.factor_degree(i);
        let g = &self.0.factors[i];
        let xi = x.factor(i).to_vec();
        let mut cols = Vec::with_capacity(d);
        let mut cur = xi;
        for _ in 0..d {
            let mut c = poly::rem_monic(&cur, g);
            c.resize(d, self.base().zero());
            cols.push(c.clone());
            let mut shifted = vec![self.base().zero()];
            shifted.extend(c);
            cur = shifted;
        }
        (0..d)
            .map(|r| (0..d).map(|c| cols[c][r].clone()).collect())
            .collect()
    }
}

/// Element of an étale algebra, coordinates reduced in every factor.
#[derive(Clone)]
pub struct Elem {
    alg: EtaleAlgebra,
    c: Vec<Scalar>,
}

impl PartialEq for Elem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c && self.alg == o.alg
    }
}
impl Eq for Elem {}
impl Hash for Elem {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.c.hash(h)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.alg.num_factors() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = self.factor(i).iter().map(|c| c.to_string()).collect();
            write!(f, "{}", parts.join(","))?;
        }
        write!(f, ")")
    }
}

impl Elem {
    pub fn parent(&self) -> &EtaleAlgebra {
        &self.alg
    }
    pub fn coords(&self) -> &[Scalar] {
        &self.c
    }
    pub fn factor(&self, i: usize) -> &[Scalar] {
        let o = self.alg.offset(i);
        &self.c[o..o + self.alg.factor_degree(i)]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|s| s.is_zero())
    }

    pub fn factor_is_zero(&self, i: usize) -> bool {
        self.factor(i).iter().all(|s| s.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        (0..self.alg.num_factors()).all(|i| !self.factor_is_zero(i))
    }

    /// The scalar `s` if this element equals s·1.
    pub fn as_scalar(&self) -> Option<Scalar> {
        let s = self.c[0].clone();
        (*self == self.alg.scalar(&s)).then_some(s)
    }

    pub fn per_factor(&self) -> Vec<Vec<String>> {
        (0..self.alg.num_factors())
            .map(|i| self.factor(i).iter().map(|c| c.to_string()).collect())
            .collect()
    }

    fn check(&self, o: &Elem) -> Result<(), FieldError> {
        if self.alg == o.alg {
            Ok(())
        } else {
            Err(FieldError::ParentMismatch)
        }
    }

    pub fn try_add(&self, o: &Elem) -> Result<Elem, FieldError> {
        self.check(o)?;
        Ok(self + o)
    }
    pub fn try_sub(&self, o: &Elem) -> Result<Elem, FieldError> {
        self.check(o)?;
        Ok(self - o)
    }
    pub fn try_mul(&self, o: &Elem) -> Result<Elem, FieldError> {
        self.check(o)?;
        Ok(self * o)
    }
    pub fn try_div(&self, o: &Elem) -> Result<Elem, FieldError> {
        self.check(o)?;
        Ok(self * &o.inv()?)
    }

    pub fn scale(&self, s: &Scalar) -> Elem {
        Elem {
            alg: self.alg.clone(),
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn inv(&self) -> Result<Elem, FieldError> {
        let alg = &self.alg;
        let b = alg.base();
        let mut c = Vec::with_capacity(alg.rank());
        for i in 0..alg.num_factors() {
            let d = alg.factor_degree(i);
            if d == 1 {
                c.push(self.factor(i)[0].inv().ok_or(FieldError::NotAUnit { factor: i })?);
                continue;
            }
            let m = alg.mult_matrix(self, i);
            let mut rhs = vec![b.zero(); d];
            rhs[0] = b.one();
            let y = poly::solve(&b, &m, &rhs).ok_or(FieldError::NotAUnit { factor: i })?;
            c.extend(y);
        }
        Ok(Elem {
            alg: alg.clone(),
            c,
        })
    }

    pub fn pow(&self, mut e: u128) -> Elem {
        let mut r = self.alg.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }

    pub fn factor_trace(&self, i: usize) -> Scalar {
        let m = self.alg.mult_matrix(self, i);
        let mut t = self.alg.base().zero();
        for (k, row) in m.iter().enumerate() {
            t = &t + &row[k];
        }
        t
    }

    pub fn factor_norm(&self, i: usize) -> Scalar {
        if self.alg.factor_degree(i) == 1 {
            return self.factor(i)[0].clone();
        }
        poly::det(&self.alg.base(), &self.alg.mult_matrix(self, i))
    }

    /// Trace of the regular representation.
    pub fn trace(&self) -> Scalar {
        let mut t = self.alg.base().zero();
        for i in 0..self.alg.num_factors() {
            t = &t + &self.factor_trace(i);
        }
        t
    }

    /// Determinant of the regular representation.
    pub fn norm(&self) -> Scalar {
        let mut n = self.alg.base().one();
        for i in 0..self.alg.num_factors() {
            n = &n * &self.factor_norm(i);
        }
        n
    }

    pub fn trace_norm(&self) -> (Scalar, Scalar) {
        (self.trace(), self.norm())
    }

    /// Quadratic invariant S(x) = (T(x)^2 - T(x^2))/2.
    pub fn s2(&self) -> Scalar {
        let t = self.trace();
        let t2 = (self * self).trace();
        (&(&t * &t) - &t2).half()
    }

    /// Adjoint x^# = x^2 - T(x) x + S(x) for rank-3 algebras.
    pub fn sharp(&self) -> Result<Elem, FieldError> {
        if self.alg.rank() != 3 {
            return Err(FieldError::WrongRank {
                expected: 3,
                found: self.alg.rank(),
            });
        }
        Ok(self.sharp_unchecked())
    }

    pub(crate) fn sharp_unchecked(&self) -> Elem {
        let t = self.trace();
        let s = self.s2();
        &(&(self * self) - &self.scale(&t)) + &self.alg.scalar(&s)
    }

    /// x × y = (x+y)^# - x^# - y^#.
    pub fn cross(&self, o: &Elem) -> Result<Elem, FieldError> {
        self.check(o)?;
        let s = (self + o).sharp()?;
        Ok(&(&s - &self.sharp()?) - &o.sharp()?)
    }

    /// Applies a field automorphism given by the image of the generator X
    /// (field algebras only).
    pub fn apply_generator_map(&self, image: &Elem) -> Elem {
        let mut acc = self.alg.zero();
        let mut pw = self.alg.one();
        for c in self.factor(0) {
            acc = &acc + &pw.scale(c);
            pw = &pw * image;
        }
        acc
    }
}

impl<'a> Add<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn add(self, o: &'a Elem) -> Elem {
        debug_assert!(self.alg == o.alg);
        Elem {
            alg: self.alg.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn sub(self, o: &'a Elem) -> Elem {
        debug_assert!(self.alg == o.alg);
        Elem {
            alg: self.alg.clone(),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem {
            alg: self.alg.clone(),
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

impl<'a> Mul<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn mul(self, o: &'a Elem) -> Elem {
        debug_assert!(self.alg == o.alg);
        let alg = &self.alg;
        let b = alg.base();
        let mut c = Vec::with_capacity(alg.rank());
        for i in 0..alg.num_factors() {
            let d = alg.factor_degree(i);
            let (x, y) = (self.factor(i), o.factor(i));
            if d == 1 {
                c.push(&x[0] * &y[0]);
                continue;
            }
            let mut r = poly::rem_monic(&poly::mul(&b, x, y), &alg.0.factors[i]);
            r.resize(d, b.zero());
            c.extend(r);
        }
        Elem {
            alg: alg.clone(),
            c,
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: Elem) -> Elem {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: &'a Elem) -> Elem {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> BaseField {
        BaseField::Rationals
    }

    fn cube_root_two() -> EtaleAlgebra {
        let b = q();
        EtaleAlgebra::cubic_field(b, vec![b.int(-2), b.int(0), b.int(0), b.int(1)]).unwrap()
    }

    #[test]
    fn split_trace_norm_sharp() {
        let e = EtaleAlgebra::split(q(), 3);
        let x = e.from_ints(&[2, 3, 5]);
        assert_eq!(x.trace_norm(), (q().int(10), q().int(30)));
        assert_eq!(x.sharp().unwrap(), e.from_ints(&[15, 10, 6]));
        assert_eq!(e.one().trace_norm(), (q().int(3), q().int(1)));
        let c = e.from_ints(&[1, 0, 0]).cross(&e.from_ints(&[0, 1, 0])).unwrap();
        assert_eq!(c, e.from_ints(&[0, 0, 1]));
    }

    #[test]
    fn cube_root_two_relations() {
        let e = cube_root_two();
        let x = e.generator();
        assert_eq!(&x * &(&x * &x), e.int(2));
        assert_eq!(x.trace_norm(), (q().int(0), q().int(2)));
    }

    #[test]
    fn componentwise_product_f5() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        assert_eq!(&e.from_ints(&[1, 2, 3]) * &e.from_ints(&[2, 2, 2]), e.from_ints(&[2, 4, 1]));
    }

    #[test]
    fn non_unit_reports_factor() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        assert_eq!(
            e.from_ints(&[1, 0, 3]).inv(),
            Err(FieldError::NotAUnit { factor: 1 })
        );
    }

    #[test]
    fn reducible_factor_rejected() {
        let b = BaseField::finite(5).unwrap();
        // X^2 - 4 has roots
        assert!(EtaleAlgebra::quadratic_field(b, b.int(4)).is_err());
    }

    #[test]
    fn desc_roundtrip() {
        let e = cube_root_two();
        let d = e.desc();
        let s = serde_json::to_string(&d).unwrap();
        let back: AlgebraDesc = serde_json::from_str(&s).unwrap();
        assert_eq!(EtaleAlgebra::from_desc(&back).unwrap(), e);
    }
}
