//! Quadratic étale algebras K and the composite L = E ⊗ K, realized in
//! E-coordinates: pairs (u, v) read as u + v√d, or as (x1, x2) ∈ E × E when K splits.

use std::fmt;

use rand::Rng;

use super::etale::{CubicKind, Elem, EtaleAlgebra};
use super::poly;
use super::scalar::{BaseField, Scalar};
use crate::error::FieldError;

/// Split quadratic algebra F × F.
pub fn quadratic_split(base: BaseField) -> EtaleAlgebra {
    EtaleAlgebra::split(base, 2)
}

/// F(√d); `d` is replaced by its square class.
pub fn quadratic_field(base: BaseField, d: &Scalar) -> Result<EtaleAlgebra, FieldError> {
    if d.is_zero() {
        return Err(FieldError::Malformed("d = 0".into()));
    }
    if base.is_square(d) {
        return Err(FieldError::Reducible(format!("X^2 - {}", d)));
    }
    EtaleAlgebra::quadratic_field(base, base.square_class(d))
}

/// Square-class parameter of a quadratic algebra in normal form; `None` when split.
pub fn quadratic_d(k: &EtaleAlgebra) -> Option<Scalar> {
    if k.num_factors() == 2 {
        None
    } else {
        let g = &k.factors()[0];
        let b = k.base();
        // X^2 + c1 X + c0 has discriminant c1^2 - 4 c0
        let disc = &(&g[1] * &g[1]) - &(&b.int(4) * &g[0]);
        Some(b.square_class(&disc))
    }
}

/// Whether two quadratic algebras are isomorphic.
pub fn same_quadratic(a: &EtaleAlgebra, b: &EtaleAlgebra) -> bool {
    quadratic_d(a) == quadratic_d(b)
}

/// Rewrites a quadratic algebra in the normal form X^2 - d or F × F.
pub fn normalize_quadratic(k: &EtaleAlgebra) -> Result<EtaleAlgebra, FieldError> {
    if k.rank() != 2 {
        return Err(FieldError::WrongRank {
            expected: 2,
            found: k.rank(),
        });
    }
    match quadratic_d(k) {
        None => Ok(quadratic_split(k.base())),
        Some(d) => quadratic_field(k.base(), &d),
    }
}

/// Nontrivial automorphism of a quadratic algebra in normal form.
pub fn conj_k(x: &Elem) -> Elem {
    let k = x.parent();
    let c = x.coords();
    let flat = if k.num_factors() == 2 {
        vec![c[1].clone(), c[0].clone()]
    } else {
        vec![c[0].clone(), -&c[1]]
    };
    k.from_flat(flat).expect("rank 2")
}

/// The discriminant algebra K_E of a cubic étale algebra.
pub fn discriminant_class(e: &EtaleAlgebra) -> Result<EtaleAlgebra, FieldError> {
    let base = e.base();
    match e.cubic_kind() {
        None => Err(FieldError::WrongRank {
            expected: 3,
            found: e.rank(),
        }),
        Some(CubicKind::Split) => Ok(quadratic_split(base)),
        Some(CubicKind::FTimesK) => {
            let i = (0..2).find(|&i| e.factor_degree(i) == 2).expect("quadratic factor");
            let g = &e.factors()[i];
            let disc = poly::discriminant(&base, g).expect("degree 2");
            quadratic_field(base, &disc)
        }
        Some(CubicKind::Field) => {
            let disc = poly::discriminant(&base, &e.factors()[0]).expect("degree 3");
            if base.is_square(&disc) {
                Ok(quadratic_split(base))
            } else {
                quadratic_field(base, &disc)
            }
        }
    }
}

/// L = E ⊗ K.
#[derive(Clone, PartialEq, Eq)]
pub struct Composite {
    e: EtaleAlgebra,
    k: EtaleAlgebra,
    d: Option<Scalar>,
}

impl fmt::Debug for Composite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.d {
            None => write!(f, "{:?} x {:?}", self.e, self.e),
            Some(d) => write!(f, "{:?}[sqrt {}]", self.e, d),
        }
    }
}

/// Element of L. For K = F(√d) it is u + v√d; for split K it is (u, v) ∈ E × E.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LElem {
    pub u: Elem,
    pub v: Elem,
}

impl fmt::Debug for LElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} | {}]", self.u, self.v)
    }
}

impl Composite {
    pub fn new(e: &EtaleAlgebra, k: &EtaleAlgebra) -> Result<Self, FieldError> {
        if e.base() != k.base() {
            return Err(FieldError::ParentMismatch);
        }
        let k = normalize_quadratic(k)?;
        let d = (k.num_factors() == 1).then(|| -&k.factors()[0][0]);
        Ok(Composite {
            e: e.clone(),
            k,
            d,
        })
    }

    pub fn e(&self) -> &EtaleAlgebra {
        &self.e
    }
    pub fn k(&self) -> &EtaleAlgebra {
        &self.k
    }
    pub fn d(&self) -> Option<&Scalar> {
        self.d.as_ref()
    }
    pub fn is_split(&self) -> bool {
        self.d.is_none()
    }
    pub fn base(&self) -> BaseField {
        self.e.base()
    }

    pub fn make(&self, u: Elem, v: Elem) -> LElem {
        LElem { u, v }
    }

    pub fn zero(&self) -> LElem {
        LElem {
            u: self.e.zero(),
            v: self.e.zero(),
        }
    }

    pub fn one(&self) -> LElem {
        self.from_e(&self.e.one())
    }

    /// E ⊂ L.
    pub fn from_e(&self, x: &Elem) -> LElem {
        match self.d {
            None => LElem {
                u: x.clone(),
                v: x.clone(),
            },
            Some(_) => LElem {
                u: x.clone(),
                v: self.e.zero(),
            },
        }
    }

    /// K ⊂ L.
    pub fn from_k(&self, kappa: &Elem) -> LElem {
        let c = kappa.coords();
        LElem {
            u: self.e.scalar(&c[0]),
            v: self.e.scalar(&c[1]),
        }
    }

    /// Inverse of `from_k`, if the element lies in K.
    pub fn to_k(&self, x: &LElem) -> Option<Elem> {
        let a = x.u.as_scalar()?;
        let b = x.v.as_scalar()?;
        Some(self.k.from_flat(vec![a, b]).expect("rank 2"))
    }

    /// Inverse of `from_e`, if the element lies in E.
    pub fn to_e(&self, x: &LElem) -> Option<Elem> {
        match self.d {
            None => (x.u == x.v).then(|| x.u.clone()),
            Some(_) => x.v.is_zero().then(|| x.u.clone()),
        }
    }

    pub fn add(&self, x: &LElem, y: &LElem) -> LElem {
        LElem {
            u: &x.u + &y.u,
            v: &x.v + &y.v,
        }
    }

    pub fn sub(&self, x: &LElem, y: &LElem) -> LElem {
        LElem {
            u: &x.u - &y.u,
            v: &x.v - &y.v,
        }
    }

    pub fn neg(&self, x: &LElem) -> LElem {
        LElem {
            u: -&x.u,
            v: -&x.v,
        }
    }

    pub fn mul(&self, x: &LElem, y: &LElem) -> LElem {
        match &self.d {
            None => LElem {
                u: &x.u * &y.u,
                v: &x.v * &y.v,
            },
            Some(d) => LElem {
                u: &(&x.u * &y.u) + &(&x.v * &y.v).scale(d),
                v: &(&x.u * &y.v) + &(&x.v * &y.u),
            },
        }
    }

    /// Multiplication by an element of E.
    pub fn scale_e(&self, c: &Elem, x: &LElem) -> LElem {
        LElem {
            u: c * &x.u,
            v: c * &x.v,
        }
    }

    pub fn scale(&self, s: &Scalar, x: &LElem) -> LElem {
        LElem {
            u: x.u.scale(s),
            v: x.v.scale(s),
        }
    }

    /// Conjugation of K extended E-linearly.
    pub fn conj(&self, x: &LElem) -> LElem {
        match self.d {
            None => LElem {
                u: x.v.clone(),
                v: x.u.clone(),
            },
            Some(_) => LElem {
                u: x.u.clone(),
                v: -&x.v,
            },
        }
    }

    /// The adjoint of E extended K-linearly.
    pub fn sharp(&self, x: &LElem) -> LElem {
        match &self.d {
            None => LElem {
                u: x.u.sharp_unchecked(),
                v: x.v.sharp_unchecked(),
            },
            Some(d) => {
                let cross = &(&(&x.u + &x.v).sharp_unchecked() - &x.u.sharp_unchecked())
                    - &x.v.sharp_unchecked();
                LElem {
                    u: &x.u.sharp_unchecked() + &x.v.sharp_unchecked().scale(d),
                    v: cross,
                }
            }
        }
    }

    /// N_{L/E}(x) = x·x̄.
    pub fn norm_e(&self, x: &LElem) -> Elem {
        match &self.d {
            None => &x.u * &x.v,
            Some(d) => &(&x.u * &x.u) - &(&x.v * &x.v).scale(d),
        }
    }

    /// N_{L/K}(x) = x·x^#.
    pub fn norm_k(&self, x: &LElem) -> Elem {
        let n = self.mul(x, &self.sharp(x));
        self.to_k(&n).expect("x·x^# lies in K")
    }

    /// Tr_{L/E}(x) = x + x̄.
    pub fn trace_e(&self, x: &LElem) -> Elem {
        match self.d {
            None => &x.u + &x.v,
            Some(_) => &x.u + &x.u,
        }
    }

    pub fn is_unit(&self, x: &LElem) -> bool {
        self.norm_e(x).is_unit()
    }

    pub fn inv(&self, x: &LElem) -> Result<LElem, FieldError> {
        let n = self.norm_e(x).inv()?;
        Ok(self.scale_e(&n, &self.conj(x)))
    }

    pub fn is_zero(&self, x: &LElem) -> bool {
        x.u.is_zero() && x.v.is_zero()
    }

    /// Number of elements of L over a finite base.
    pub fn order(&self) -> Option<u128> {
        let q = self.base().order()? as u128;
        Some(q.pow(6))
    }

    /// Calls `f` on every element of L (finite base only).
    pub fn for_each<F: FnMut(LElem)>(&self, mut f: F) -> Result<(), FieldError> {
        let es = self
            .e
            .elements()
            .ok_or_else(|| FieldError::Unsupported("enumeration needs a finite base".into()))?;
        for u in &es {
            for v in &es {
                f(LElem {
                    u: u.clone(),
                    v: v.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> LElem {
        LElem {
            u: self.e.random(rng),
            v: self.e.random(rng),
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> LElem {
        loop {
            let x = self.random(rng);
            if self.is_unit(&x) {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn discriminant_algebras() {
        let q = BaseField::Rationals;
        let split = EtaleAlgebra::split(q, 3);
        assert!(quadratic_d(&discriminant_class(&split).unwrap()).is_none());
        let fk = EtaleAlgebra::f_times_k(q, q.int(5)).unwrap();
        assert_eq!(quadratic_d(&discriminant_class(&fk).unwrap()), Some(q.int(5)));
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-2), q.int(0), q.int(0), q.int(1)]).unwrap();
        assert_eq!(quadratic_d(&discriminant_class(&e).unwrap()), Some(q.int(-3)));
        // the cyclic cubic x^3 + x^2 - 2x - 1 has square discriminant 49
        let c = EtaleAlgebra::cubic_field(q, vec![q.int(-1), q.int(-2), q.int(1), q.int(1)]).unwrap();
        assert!(quadratic_d(&discriminant_class(&c).unwrap()).is_none());
    }

    #[test]
    fn norms_multiplicative_in_l() {
        let b = BaseField::finite(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [CubicKind::Split, CubicKind::FTimesK, CubicKind::Field] {
            let e = EtaleAlgebra::finite_cubic(b, kind).unwrap();
            for k in [quadratic_split(b), quadratic_field(b, &b.nonsquare().unwrap()).unwrap()] {
                let l = Composite::new(&e, &k).unwrap();
                for _ in 0..20 {
                    let x = l.random(&mut rng);
                    let y = l.random(&mut rng);
                    let xy = l.mul(&x, &y);
                    assert_eq!(l.norm_e(&xy), &l.norm_e(&x) * &l.norm_e(&y));
                    assert_eq!(l.norm_k(&xy), &l.norm_k(&x) * &l.norm_k(&y));
                    assert_eq!(l.mul(&x, &l.sharp(&x)), l.from_k(&l.norm_k(&x)));
                }
            }
        }
    }
}
