//! Membership tests for E^{×2}, F^×E^{×2} and N_{L/E}(L^×).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::composite::{quadratic_d, Composite, LElem};
use super::etale::{Elem, EtaleAlgebra};
use super::finite::{is_prime, FqCtx};
use super::poly;
use super::scalar::{reduce_mod, BaseField, Scalar};

/// Three-valued answer with an optional witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Yes(Option<W>),
    No(String),
    Unknown,
}

impl<W> Verdict<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Subgroup {
    Squares,
    BaseTimesSquares,
    NormGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassWitness {
    /// x = y^2
    Root(Elem),
    /// x = c·y^2
    Scaled { c: Scalar, root: Elem },
    /// x = N_{L/E}(y)
    Norm(LElem),
}

/// Tests membership of `x` in the chosen subgroup. `k` is required for
/// `NormGroup` (then L = E ⊗ k). Over Q, `bound` limits witness searches.
pub fn class_test(
    x: &Elem,
    sub: Subgroup,
    k: Option<&EtaleAlgebra>,
    bound: u32,
) -> Verdict<ClassWitness> {
    if !x.is_unit() {
        return Verdict::No("not a unit".into());
    }
    match sub {
        Subgroup::Squares => match square_root(x, bound) {
            Verdict::Yes(r) => Verdict::Yes(r.map(ClassWitness::Root)),
            Verdict::No(s) => Verdict::No(s),
            Verdict::Unknown => Verdict::Unknown,
        },
        Subgroup::BaseTimesSquares => base_times_squares(x, bound),
        Subgroup::NormGroup => match k {
            None => Verdict::No("no quadratic algebra supplied".into()),
            Some(k) => norm_group(x, k, bound),
        },
    }
}

/// The algebra F[X]/(g_i) of one factor, and projection/assembly helpers.
fn factor_algebra(e: &EtaleAlgebra, i: usize) -> EtaleAlgebra {
    EtaleAlgebra::new(e.base(), vec![e.factors()[i].clone()]).expect("factor is irreducible")
}

fn project(x: &Elem, fi: &EtaleAlgebra, i: usize) -> Elem {
    fi.from_flat(x.factor(i).to_vec()).expect("degree matches")
}

fn assemble(e: &EtaleAlgebra, parts: &[Elem]) -> Elem {
    let flat: Vec<Scalar> = parts.iter().flat_map(|p| p.coords().to_vec()).collect();
    e.from_flat(flat).expect("ranks match")
}

/// Square root in a finite field extension F_q[X]/(g) by Tonelli-Shanks.
fn finite_field_sqrt(x: &Elem, order: u128) -> Option<Elem> {
    let alg = x.parent();
    if x.is_zero() {
        return Some(x.clone());
    }
    if x.pow((order - 1) / 2) != alg.one() {
        return None;
    }
    let mut qq = order - 1;
    let mut s = 0;
    while qq % 2 == 0 {
        qq /= 2;
        s += 1;
    }
    // a non-residue: scan elements in index order
    let z = nonresidue(alg, order)?;
    let mut m = s;
    let mut c = z.pow(qq);
    let mut t = x.pow(qq);
    let mut r = x.pow(qq.div_ceil(2));
    let one = alg.one();
    while t != one {
        let mut i = 0;
        let mut t2 = t.clone();
        while t2 != one {
            t2 = &t2 * &t2;
            i += 1;
            if i == m {
                return None;
            }
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = &b * &b;
        }
        m = i;
        c = &b * &b;
        t = &t * &c;
        r = &r * &b;
    }
    Some(r)
}

fn nonresidue(alg: &EtaleAlgebra, order: u128) -> Option<Elem> {
    let b = alg.base();
    let q = b.order()? as u128;
    (1..order).find_map(|mut idx| {
        let mut c = Vec::with_capacity(alg.rank());
        for _ in 0..alg.rank() {
            c.push(b.from_index((idx % q) as u32));
            idx /= q;
        }
        let z = alg.from_flat(c).ok()?;
        (z.pow((order - 1) / 2) != alg.one()).then_some(z)
    })
}

/// Root in a number-field factor: norm and residue obstructions, then a
/// bounded search over y = (a_0 + a_1 X + ...)/den.
fn rational_factor_sqrt(x: &Elem, bound: u32) -> Verdict<Elem> {
    let alg = x.parent();
    let b = alg.base();
    if alg.rank() == 1 {
        return match b.sqrt(&x.coords()[0]) {
            Some(r) => Verdict::Yes(Some(alg.scalar(&r))),
            None => Verdict::No("not a rational square".into()),
        };
    }
    if !b.is_square(&x.norm()) {
        return Verdict::No("norm is not a square".into());
    }
    if let Some(p) = residue_obstruction(x, |ctx, v| !ctx.is_square(v)) {
        return Verdict::No(format!("non-square residue at a prime above {}", p));
    }
    let bnd = bound as i64;
    let d = alg.rank();
    for den in 1..=bnd {
        let den_s = b.int(den).inv().expect("nonzero");
        let mut idx = vec![-bnd; d];
        loop {
            let y = alg
                .from_flat(idx.iter().map(|&a| &b.int(a) * &den_s).collect())
                .expect("rank");
            if &y * &y == *x {
                return Verdict::Yes(Some(y));
            }
            let mut j = 0;
            while j < d {
                idx[j] += 1;
                if idx[j] > bnd {
                    idx[j] = -bnd;
                    j += 1;
                } else {
                    break;
                }
            }
            if j == d {
                break;
            }
        }
    }
    Verdict::Unknown
}

/// Finds a small prime p and a root r of the factor polynomial mod p such that
/// `bad(F_p, x(r))` holds, with x integral at p and the root simple.
fn residue_obstruction<P: Fn(&FqCtx, u32) -> bool>(x: &Elem, bad: P) -> Option<u64> {
    let alg = x.parent();
    let g = &alg.factors()[0];
    let disc = poly::discriminant(&alg.base(), g)?;
    for p in 5u64..400 {
        if !is_prime(p) {
            continue;
        }
        let ctx = FqCtx::get(p as u32, 1).ok()?;
        let fp = BaseField::Finite(ctx);
        let red = |s: &Scalar| reduce_mod(s.as_rational()?, ctx);
        let Some(gp) = g.iter().map(red).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let Some(xp) = x.coords().iter().map(red).collect::<Option<Vec<_>>>() else {
            continue;
        };
        match red(&disc) {
            Some(dd) if !dd.is_zero() => {}
            _ => continue,
        }
        for r in poly::roots(&fp, &gp) {
            let v = poly::eval(&xp, &r);
            if v.is_zero() {
                continue;
            }
            if bad(ctx, v.as_fq().expect("finite").v) {
                return Some(p);
            }
        }
    }
    None
}

/// y with y^2 = x, per factor.
pub fn square_root(x: &Elem, bound: u32) -> Verdict<Elem> {
    let e = x.parent();
    let b = e.base();
    let mut parts = vec![];
    for i in 0..e.num_factors() {
        let fi = factor_algebra(e, i);
        let xi = project(x, &fi, i);
        match b {
            BaseField::Finite(ctx) => {
                let order = (ctx.q() as u128).pow(fi.rank() as u32);
                match finite_field_sqrt(&xi, order) {
                    Some(r) => parts.push(r),
                    None => return Verdict::No(format!("non-square in factor {}", i)),
                }
            }
            BaseField::Rationals => match rational_factor_sqrt(&xi, bound) {
                Verdict::Yes(Some(r)) => parts.push(r),
                Verdict::No(s) => return Verdict::No(format!("factor {}: {}", i, s)),
                _ => return Verdict::Unknown,
            },
        }
    }
    let r = assemble(e, &parts);
    debug_assert!(&r * &r == *x);
    Verdict::Yes(Some(r))
}

/// Every y with y^2 = x over a finite base.
pub fn all_square_roots(x: &Elem) -> Vec<Elem> {
    let Verdict::Yes(Some(r)) = square_root(x, 0) else {
        return vec![];
    };
    let e = x.parent();
    let mut out = vec![r];
    for i in 0..e.num_factors() {
        if x.factor_is_zero(i) {
            continue;
        }
        let flip = &e.one() - &e.idempotent(i).scale(&e.base().int(2));
        let more: Vec<Elem> = out.iter().map(|y| y * &flip).collect();
        out.extend(more);
    }
    out
}

fn base_times_squares(x: &Elem, bound: u32) -> Verdict<ClassWitness> {
    let e = x.parent();
    let b = e.base();
    if e.rank() % 2 == 1 {
        // N(c y^2) = c^rank N(y)^2 pins c to the square class of N(x)
        let n = x.norm();
        let c = n.inv().expect("unit");
        return match square_root(&x.scale(&n), bound) {
            Verdict::Yes(Some(r)) => Verdict::Yes(Some(ClassWitness::Scaled { c, root: r })),
            Verdict::Yes(None) => Verdict::Yes(None),
            Verdict::No(s) => Verdict::No(s),
            Verdict::Unknown => Verdict::Unknown,
        };
    }
    let candidates: Vec<Scalar> = match b {
        BaseField::Finite(_) => vec![b.one(), b.nonsquare().expect("finite")],
        BaseField::Rationals => {
            let mut v = vec![];
            for n in 1..=(bound.max(2) as i64) {
                let sf = super::scalar::squarefree_part(&BigInt::from(n));
                if sf == BigInt::from(n) {
                    v.push(b.int(n));
                    v.push(b.int(-n));
                }
            }
            v
        }
    };
    let mut all_no = true;
    for c in &candidates {
        match square_root(&x.scale(&c.inv().expect("unit")), bound) {
            Verdict::Yes(Some(r)) => {
                return Verdict::Yes(Some(ClassWitness::Scaled {
                    c: c.clone(),
                    root: r,
                }))
            }
            Verdict::Yes(None) => return Verdict::Yes(None),
            Verdict::No(_) => {}
            Verdict::Unknown => all_no = false,
        }
    }
    if b.is_finite() && all_no {
        Verdict::No("no square class of F works".into())
    } else {
        Verdict::Unknown
    }
}

fn norm_group(x: &Elem, k: &EtaleAlgebra, bound: u32) -> Verdict<ClassWitness> {
    let e = x.parent();
    let l = match Composite::new(e, k) {
        Ok(l) => l,
        Err(err) => return Verdict::No(err.to_string()),
    };
    let Some(d) = l.d().cloned() else {
        let w = l.make(x.clone(), e.one());
        return Verdict::Yes(Some(ClassWitness::Norm(w)));
    };
    let b = e.base();
    let mut us = vec![];
    let mut vs = vec![];
    for i in 0..e.num_factors() {
        let fi = factor_algebra(e, i);
        let xi = project(x, &fi, i);
        match b {
            BaseField::Finite(ctx) => {
                let order = (ctx.q() as u128).pow(fi.rank() as u32);
                let mut found = None;
                for v in fi.elements().expect("finite") {
                    let t = &xi + &(&v * &v).scale(&d);
                    if let Some(u) = finite_field_sqrt(&t, order) {
                        found = Some((u, v));
                        break;
                    }
                }
                match found {
                    Some((u, v)) => {
                        us.push(u);
                        vs.push(v);
                    }
                    None => return Verdict::No(format!("not a norm in factor {}", i)),
                }
            }
            BaseField::Rationals => {
                let nx = xi.norm();
                let nd = d.as_rational().expect("rational");
                if !hilbert_all(nx.as_rational().expect("rational"), nd) {
                    return Verdict::No(format!(
                        "factor {}: norm down to F is not a norm from F(sqrt d)",
                        i
                    ));
                }
                match search_norm(&xi, &d, bound) {
                    Some((u, v)) => {
                        us.push(u);
                        vs.push(v);
                    }
                    None if fi.rank() == 1 => {
                        // Hasse-Minkowski: all local symbols trivial
                        return Verdict::Yes(None);
                    }
                    None => return Verdict::Unknown,
                }
            }
        }
    }
    let w = l.make(assemble(e, &us), assemble(e, &vs));
    debug_assert!(l.norm_e(&w) == *x);
    Verdict::Yes(Some(ClassWitness::Norm(w)))
}

fn search_norm(x: &Elem, d: &Scalar, bound: u32) -> Option<(Elem, Elem)> {
    let alg = x.parent();
    let b = alg.base();
    let bnd = bound.min(6) as i64;
    let dim = alg.rank();
    for den in 1..=bnd {
        let den_s = b.int(den).inv().expect("nonzero");
        let mut idx = vec![-bnd; dim];
        loop {
            let v = alg
                .from_flat(idx.iter().map(|&a| &b.int(a) * &den_s).collect())
                .expect("rank");
            let t = x + &(&v * &v).scale(d);
            if let Verdict::Yes(Some(u)) = rational_factor_sqrt(&t, 1) {
                return Some((u, v));
            }
            let mut j = 0;
            while j < dim {
                idx[j] += 1;
                if idx[j] > bnd {
                    idx[j] = -bnd;
                    j += 1;
                } else {
                    break;
                }
            }
            if j == dim {
                break;
            }
        }
    }
    None
}

fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    let e = (p - 1u32) / 2u32;
    let r = a.mod_floor(p).modpow(&e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

fn split_p(a: &BigRational, p: &BigInt) -> (i64, BigInt) {
    // a = p^v * u with u a p-unit, returned as the integer num*den
    let mut n = a.numer().clone();
    let mut d = a.denom().clone();
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    while d.is_multiple_of(p) {
        d /= p;
        v -= 1;
    }
    (v, n * d)
}

/// Hilbert symbol (a, b)_p over Q; `p = 0` is the real place.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, p: u64) -> i32 {
    if p == 0 {
        return if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        };
    }
    let pp = BigInt::from(p);
    let (alpha, u) = split_p(a, &pp);
    let (beta, v) = split_p(b, &pp);
    if p == 2 {
        let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_i64().expect("small");
        let (u8_, v8) = (m8(&u), m8(&v));
        let eps = |x: i64| ((x - 1) / 2) % 2;
        let omega = |x: i64| ((x * x - 1) / 8) % 2;
        let s = eps(u8_) * eps(v8) + alpha.rem_euclid(2) * omega(v8) + beta.rem_euclid(2) * omega(u8_);
        return if s % 2 == 0 { 1 } else { -1 };
    }
    let eps = ((p - 1) / 2) as i64 % 2;
    let mut r = if (alpha * beta * eps).rem_euclid(2) == 1 {
        -1
    } else {
        1
    };
    if beta.rem_euclid(2) == 1 {
        r *= legendre(&u, &pp);
    }
    if alpha.rem_euclid(2) == 1 {
        r *= legendre(&v, &pp);
    }
    r
}

fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut m = n.abs();
    let mut out = vec![];
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            out.push(d.to_u64().expect("small"));
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1;
    }
    if m > BigInt::one() {
        if let Some(x) = m.to_u64() {
            out.push(x);
        }
    }
    out
}

/// Whether a is a norm from Q(√d), by the product of local conditions.
pub fn hilbert_all(a: &BigRational, d: &BigRational) -> bool {
    let mut primes = vec![0u64, 2];
    for n in [a.numer(), a.denom(), d.numer(), d.denom()] {
        primes.extend(prime_divisors(n));
    }
    primes.sort_unstable();
    primes.dedup();
    primes.iter().all(|&p| hilbert_symbol(a, d, p) == 1)
}

/// The set {λ^#/λ : λ ∈ E^×} for a finite cubic algebra, as sorted coordinate lists.
pub fn sharp_quotients(e: &EtaleAlgebra) -> Option<Vec<Elem>> {
    let mut out: Vec<Elem> = e
        .units()?
        .into_iter()
        .map(|l| &l.sharp_unchecked() * &l.inv().expect("unit"))
        .collect();
    out.sort_by_key(|x| format!("{}", x));
    out.dedup();
    Some(out)
}

/// The set F^× · E^{×2} for a finite algebra.
pub fn base_times_squares_set(e: &EtaleAlgebra) -> Option<Vec<Elem>> {
    let units = e.units()?;
    let scalars = e.base().units()?;
    let mut out = vec![];
    for y in &units {
        let y2 = y * y;
        for c in &scalars {
            out.push(y2.scale(c));
        }
    }
    out.sort_by_key(|x| format!("{}", x));
    out.dedup();
    Some(out)
}

/// Whether a quadratic algebra has the given class; helper for callers that
/// hold K only as a description.
pub fn quadratic_param(k: &EtaleAlgebra) -> Option<Scalar> {
    quadratic_d(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::composite::quadratic_field;

    #[test]
    fn squares_over_f5() {
        let b = BaseField::finite(5).unwrap();
        let f = EtaleAlgebra::base_algebra(b);
        assert!(class_test(&f.int(4), Subgroup::Squares, None, 10).is_yes());
        assert!(class_test(&f.int(2), Subgroup::Squares, None, 10).is_no());
    }

    #[test]
    fn rational_square_quarter() {
        let q = BaseField::Rationals;
        let f = EtaleAlgebra::base_algebra(q);
        let x = f.scalar(&q.ratio(2, 8));
        match class_test(&x, Subgroup::Squares, None, 10) {
            Verdict::Yes(Some(ClassWitness::Root(r))) => assert_eq!(r, f.scalar(&q.ratio(1, 2))),
            v => panic!("{:?}", v),
        }
    }

    #[test]
    fn f5_cubed_example() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let x = &e.from_ints(&[1, 1, 4]) * &e.from_ints(&[4, 4, 1]).inv().unwrap();
        let set = base_times_squares_set(&e).unwrap();
        let expected = set.contains(&x);
        assert_eq!(class_test(&x, Subgroup::BaseTimesSquares, None, 10).is_yes(), expected);
    }

    #[test]
    fn cubic_field_square_obstructions() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-2), q.int(0), q.int(0), q.int(1)]).unwrap();
        let x = e.generator();
        assert!(class_test(&x, Subgroup::Squares, None, 3).is_no());
        let y = &e.from_ints(&[1, 1, 0]) * &e.from_ints(&[1, 1, 0]);
        assert!(class_test(&y, Subgroup::Squares, None, 3).is_yes());
    }

    #[test]
    fn hilbert_symbol_values() {
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), 2), -1);
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), 0), -1);
        assert_eq!(hilbert_symbol(&r(2), &r(3), 3), -1);
        assert!(hilbert_all(&r(5), &r(-1))); // 5 = 1 + 4
        assert!(!hilbert_all(&r(3), &r(-1)));
    }

    #[test]
    fn norm_group_finite_always() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::finite_cubic_field(b).unwrap();
        let k = quadratic_field(b, &b.nonsquare().unwrap()).unwrap();
        let x = e.generator();
        assert!(class_test(&x, Subgroup::NormGroup, Some(&k), 5).is_yes());
    }
}
