use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::finite::FqCtx;
use crate::error::FieldError;

/// Element of F_q tagged with its (interned) field.
#[derive(Clone, Copy)]
pub struct Fq {
    pub v: u32,
    pub ctx: &'static FqCtx,
}

impl PartialEq for Fq {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v && std::ptr::eq(self.ctx, o.ctx)
    }
}
impl Eq for Fq {}

/// A base-field scalar: an exact rational or an element of a finite field.
#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Q(BigRational),
    F(Fq),
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Scalar::Q(r) => {
                0u8.hash(h);
                r.hash(h)
            }
            Scalar::F(x) => {
                1u8.hash(h);
                x.v.hash(h)
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{}", r),
            Scalar::F(x) => write!(f, "{}", x.ctx.format(x.v)),
        }
    }
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::F(x) => x.v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::F(x) => x.v == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(r) if r.is_zero() => None,
            Scalar::Q(r) => Some(Scalar::Q(r.recip())),
            Scalar::F(x) => x.ctx.inv(x.v).map(|v| Scalar::F(Fq { v, ctx: x.ctx })),
        }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        match self {
            Scalar::Q(r) => Scalar::Q(num_traits::pow(r.clone(), e as usize)),
            Scalar::F(x) => Scalar::F(Fq {
                v: x.ctx.pow(x.v, e as u64),
                ctx: x.ctx,
            }),
        }
    }

    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Q(_) => Scalar::Q(BigRational::zero()),
            Scalar::F(x) => Scalar::F(Fq { v: 0, ctx: x.ctx }),
        }
    }

    pub fn one_like(&self) -> Scalar {
        match self {
            Scalar::Q(_) => Scalar::Q(BigRational::one()),
            Scalar::F(x) => Scalar::F(Fq { v: 1, ctx: x.ctx }),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            Scalar::F(_) => None,
        }
    }

    pub fn as_fq(&self) -> Option<Fq> {
        match self {
            Scalar::F(x) => Some(*x),
            Scalar::Q(_) => None,
        }
    }

    pub fn half(&self) -> Scalar {
        let two = self.one_like() + self.one_like();
        self * &two.inv().expect("characteristic is not 2")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $qop:tt, $fop:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a $qop b),
                    (Scalar::F(a), Scalar::F(b)) => {
                        debug_assert!(std::ptr::eq(a.ctx, b.ctx), "mixed finite fields");
                        Scalar::F(Fq { v: a.ctx.$fop(a.v, b.v), ctx: a.ctx })
                    }
                    _ => panic!("mixed rational and finite scalars"),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, +, add);
binop!(Sub, sub, -, sub);
binop!(Mul, mul, *, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::F(a) => Scalar::F(Fq {
                v: a.ctx.neg(a.v),
                ctx: a.ctx,
            }),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// The ground field: Q or a finite field of characteristic greater than 3.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    Rationals,
    Finite(&'static FqCtx),
}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rationals => write!(f, "Q"),
            BaseField::Finite(c) => write!(f, "F_{}", c.q()),
        }
    }
}

/// Serializable description of a base field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseDesc {
    Rationals,
    Finite {
        p: u32,
        k: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u32>>,
    },
}

impl BaseField {
    pub fn finite(q: u32) -> Result<BaseField, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::BadCharacteristic(q as u64))?;
        Ok(BaseField::Finite(FqCtx::get(p, k)?))
    }

    pub fn from_desc(d: &BaseDesc) -> Result<BaseField, FieldError> {
        match d {
            BaseDesc::Rationals => Ok(BaseField::Rationals),
            BaseDesc::Finite { p, k, modulus: None } => Ok(BaseField::Finite(FqCtx::get(*p, *k)?)),
            BaseDesc::Finite { p, k, modulus: Some(m) } => {
                if m.len() as u32 != k + 1 {
                    return Err(FieldError::Malformed("modulus degree differs from k".into()));
                }
                Ok(BaseField::Finite(FqCtx::with_modulus(*p, m.clone())?))
            }
        }
    }

    pub fn desc(&self) -> BaseDesc {
        match self {
            BaseField::Rationals => BaseDesc::Rationals,
            BaseField::Finite(c) => BaseDesc::Finite {
                p: c.p(),
                k: c.k(),
                modulus: if c.k() == 1 {
                    None
                } else {
                    Some(c.modulus().to_vec())
                },
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BaseField::Finite(_))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::Rationals => 0,
            BaseField::Finite(c) => c.p() as u64,
        }
    }

    /// Field order, `None` for Q.
    pub fn order(&self) -> Option<u64> {
        match self {
            BaseField::Rationals => None,
            BaseField::Finite(c) => Some(c.q() as u64),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        match self {
            BaseField::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            BaseField::Finite(c) => Scalar::F(Fq {
                v: c.from_i64(n),
                ctx: c,
            }),
        }
    }

    pub fn ratio(&self, n: i64, d: i64) -> Scalar {
        &self.int(n) * &self.int(d).inv().expect("zero denominator")
    }

    pub fn from_index(&self, v: u32) -> Scalar {
        match self {
            BaseField::Finite(c) => Scalar::F(Fq { v: v % c.q(), ctx: c }),
            BaseField::Rationals => self.int(v as i64),
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (BaseField::Rationals, Scalar::Q(_)) => true,
            (BaseField::Finite(c), Scalar::F(x)) => std::ptr::eq(*c, x.ctx),
            _ => false,
        }
    }

    /// All elements of a finite field in index order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            BaseField::Rationals => None,
            BaseField::Finite(c) => Some((0..c.q()).map(|v| Scalar::F(Fq { v, ctx: c })).collect()),
        }
    }

    pub fn units(&self) -> Option<Vec<Scalar>> {
        self.elements()
            .map(|v| v.into_iter().filter(|s| !s.is_zero()).collect())
    }

    /// Random element; over Q a small-height rational.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match self {
            BaseField::Rationals => {
                let n: i64 = rng.gen_range(-9..=9);
                let d: i64 = rng.gen_range(1..=4);
                self.ratio(n, d)
            }
            BaseField::Finite(c) => Scalar::F(Fq {
                v: rng.gen_range(0..c.q()),
                ctx: c,
            }),
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn is_square(&self, s: &Scalar) -> bool {
        self.sqrt(s).is_some()
    }

    pub fn sqrt(&self, s: &Scalar) -> Option<Scalar> {
        match s {
            Scalar::Q(r) => {
                if r.is_negative() {
                    return None;
                }
                let n = r.numer().sqrt();
                let d = r.denom().sqrt();
                if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                    Some(Scalar::Q(BigRational::new(n, d)))
                } else {
                    None
                }
            }
            Scalar::F(x) => x.ctx.sqrt(x.v).map(|v| Scalar::F(Fq { v, ctx: x.ctx })),
        }
    }

    /// A fixed non-square of a finite field.
    pub fn nonsquare(&self) -> Option<Scalar> {
        match self {
            BaseField::Finite(c) => Some(Scalar::F(Fq {
                v: c.generator(),
                ctx: c,
            })),
            BaseField::Rationals => None,
        }
    }

    /// Canonical representative of the square class of a unit: a squarefree
    /// integer over Q, and 1 or the fixed non-square over F_q.
    pub fn square_class(&self, s: &Scalar) -> Scalar {
        match s {
            Scalar::Q(r) => {
                let n = r.numer() * r.denom();
                Scalar::Q(BigRational::from_integer(squarefree_part(&n)))
            }
            Scalar::F(_) => {
                if self.is_square(s) {
                    self.one()
                } else {
                    self.nonsquare().expect("finite")
                }
            }
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, FieldError> {
        match self {
            BaseField::Rationals => parse_rational(s).map(Scalar::Q),
            BaseField::Finite(c) => {
                let t = s.trim();
                if let Some((a, b)) = t.split_once('/') {
                    let a = self.parse(a)?;
                    let b = self.parse(b)?;
                    let bi = b.inv().ok_or_else(|| FieldError::Parse(s.into()))?;
                    return Ok(&a * &bi);
                }
                Ok(Scalar::F(Fq {
                    v: c.parse(t)?,
                    ctx: c,
                }))
            }
        }
    }

    pub fn format(&self, s: &Scalar) -> String {
        s.to_string()
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let t = s.trim();
    let err = || FieldError::Parse(s.to_string());
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| err())?;
        let b: BigInt = b.trim().parse().map_err(|_| err())?;
        if b.is_zero() {
            return Err(err());
        }
        Ok(BigRational::new(a, b))
    } else {
        let a: BigInt = t.parse().map_err(|_| err())?;
        Ok(BigRational::from_integer(a))
    }
}

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Squarefree part of a nonzero integer, sign kept.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += 1;
        if d > BigInt::from(1_000_000) {
            break;
        }
    }
    out *= m;
    out * sign
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(r: &BigRational, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut v = 0;
    let mut n = r.numer().clone();
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    let mut d = r.denom().clone();
    while d.is_multiple_of(&p) {
        d /= &p;
        v -= 1;
    }
    v
}

/// Reduction of a rational modulo p; `None` when p divides the denominator.
pub fn reduce_mod(r: &BigRational, ctx: &'static FqCtx) -> Option<Scalar> {
    let p = BigInt::from(ctx.p());
    let d = (r.denom() % &p).to_i64()?;
    if d == 0 {
        return None;
    }
    let n = (r.numer() % &p).to_i64()?;
    let f = BaseField::Finite(ctx);
    Some(&f.int(n) * &f.int(d).inv()?)
}
