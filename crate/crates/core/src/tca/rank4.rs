//! Orbits of Aut_E(C_B) = GL₂(F³)^det / ΔF^× on the split rank-4 model over a
//! prime field, and embeddings of C(λ) into the twisted model.

use std::collections::{HashSet, VecDeque};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{make_cyclic, make_rank4, Mat2, Rank4Model, Sigma, Tca, TcaElem, TcaKind};
use crate::error::TcaError;
use crate::fields::classes::Verdict;
use crate::fields::finite::is_prime;
use crate::fields::scalar::{reduce_mod, valuation};
use crate::fields::{poly, BaseField, EtaleAlgebra, Scalar};

type M = [u32; 4];

#[derive(Clone, Copy)]
struct Fp(u32);

impl Fp {
    fn mul(&self, a: &M, b: &M) -> M {
        let p = self.0;
        [
            (a[0] * b[0] + a[1] * b[2]) % p,
            (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p,
            (a[2] * b[1] + a[3] * b[3]) % p,
        ]
    }
    fn det(&self, a: &M) -> u32 {
        let p = self.0;
        (a[0] * a[3] + p * p - a[1] * a[2] % p) % p
    }
    fn inv_scalar(&self, a: u32) -> u32 {
        let p = self.0;
        let mut r = 1;
        for _ in 0..p - 2 {
            r = r * a % p;
        }
        r
    }
    fn inv(&self, a: &M) -> M {
        let p = self.0;
        let d = self.inv_scalar(self.det(a));
        [
            a[3] * d % p,
            (p - a[1]) % p * d % p,
            (p - a[2]) % p * d % p,
            a[0] * d % p,
        ]
    }
    fn trace(&self, a: &M) -> u32 {
        (a[0] + a[3]) % self.0
    }
    fn all(&self) -> Vec<M> {
        let p = self.0;
        let mut v = Vec::with_capacity((p as usize).pow(4));
        for i in 0..p.pow(4) {
            v.push([i % p, i / p % p, i / (p * p) % p, i / (p * p * p)]);
        }
        v
    }
    fn code(&self, a: &M) -> u64 {
        let p = self.0 as u64;
        a[0] as u64 + p * (a[1] as u64 + p * (a[2] as u64 + p * a[3] as u64))
    }
    fn key(&self, x: &[M; 3]) -> u64 {
        let p4 = (self.0 as u64).pow(4);
        self.code(&x[0]) + p4 * (self.code(&x[1]) + p4 * self.code(&x[2]))
    }
    /// N_C = Tr(x₃x₂x₁).
    fn nc(&self, x: &[M; 3]) -> u32 {
        self.trace(&self.mul(&self.mul(&x[2], &x[1]), &x[0]))
    }
    /// g·(x₁, x₂, x₃) = (g₃x₁g₂⁻¹, g₁x₂g₃⁻¹, g₂x₃g₁⁻¹).
    fn act(&self, g: &[M; 3], ginv: &[M; 3], x: &[M; 3]) -> [M; 3] {
        [
            self.mul(&self.mul(&g[2], &x[0]), &ginv[1]),
            self.mul(&self.mul(&g[0], &x[1]), &ginv[2]),
            self.mul(&self.mul(&g[1], &x[2]), &ginv[0]),
        ]
    }
    fn primitive_root(&self) -> u32 {
        let p = self.0;
        (2..p)
            .find(|&g| {
                let mut x = 1;
                (1..p - 1).all(|_| {
                    x = x * g % p;
                    x != 1
                })
            })
            .unwrap_or(1)
    }
    /// Generators of GL₂(F³)^det: elementary matrices in each slot and a
    /// common diagonal matrix of primitive determinant.
    fn generators(&self) -> Vec<([M; 3], [M; 3])> {
        let id = [1, 0, 0, 1];
        let mut gens = vec![];
        for slot in 0..3 {
            for e in [[1, 1, 0, 1], [1, 0, 1, 1]] {
                let mut g = [id; 3];
                g[slot] = e;
                gens.push(g);
            }
        }
        let t = self.primitive_root();
        gens.push([[t, 0, 0, 1]; 3]);
        gens.into_iter()
            .map(|g| {
                let gi = [self.inv(&g[0]), self.inv(&g[1]), self.inv(&g[2])];
                (g, gi)
            })
            .collect()
    }
    fn orbit(&self, start: [M; 3]) -> usize {
        let gens = self.generators();
        let mut seen = HashSet::new();
        seen.insert(self.key(&start));
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (g, gi) in &gens {
                let y = self.act(g, gi, &x);
                if seen.insert(self.key(&y)) {
                    queue.push_back(y);
                }
            }
        }
        seen.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub f: [u32; 3],
    pub b: u32,
    pub size: usize,
    pub orbit_size: usize,
    pub single_orbit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub q: u32,
    /// |GL₂(F³)^det / ΔF^×|
    pub group_order: u64,
    pub stabilizer_order: u64,
    pub predicted_size: u64,
    pub set_size: u64,
    pub orbit_size: u64,
    pub omega: Vec<OmegaReport>,
    pub pass: bool,
}

/// Checks transitivity on {x : Q(x) = 0, N_C(x) = 1}, the stabilizer of the
/// base point, and that sampled Ω_Σ = {Q(x) = f, N_C(x) = b} are empty or one
/// orbit. Exhaustive; intended for q = 5 or 7.
pub fn rank4_orbit_check(c: &Tca, samples: usize, seed: u64) -> Result<OrbitReport, TcaError> {
    if !matches!(c.kind(), TcaKind::Matrix { sigma: Sigma::Shift }) {
        return Err(TcaError::UnsupportedBase(
            "orbit check runs on the split model E = F^3".into(),
        ));
    }
    let q = match c.base() {
        BaseField::Finite(ctx) if ctx.k() == 1 && ctx.q() <= 7 => ctx.q(),
        _ => {
            return Err(TcaError::UnsupportedBase(
                "orbit check needs a prime field of order at most 7".into(),
            ))
        }
    };
    let f = Fp(q);
    let all = f.all();
    let mut by_det: Vec<Vec<M>> = vec![vec![]; q as usize];
    for m in &all {
        by_det[f.det(m) as usize].push(*m);
    }
    let sl2 = by_det[1].len() as u64;
    let group_order = sl2.pow(3);
    let predicted_size = group_order / (q as u64 - 1);

    let omega_count = |fv: [u32; 3], b: u32| -> (usize, Option<[M; 3]>) {
        let mut n = 0;
        let mut first = None;
        for x1 in &by_det[fv[0] as usize] {
            for x2 in &by_det[fv[1] as usize] {
                let x21 = f.mul(x2, x1);
                for x3 in &by_det[fv[2] as usize] {
                    if f.trace(&f.mul(x3, &x21)) == b {
                        n += 1;
                        if first.is_none() {
                            first = Some([*x1, *x2, *x3]);
                        }
                    }
                }
            }
        }
        (n, first)
    };

    let set_size = omega_count([0, 0, 0], 1).0 as u64;
    let x0: [M; 3] = [[1, 0, 0, 0]; 3];
    debug_assert_eq!(f.nc(&x0), 1);
    let orbit_size = f.orbit(x0) as u64;

    // stabilizer of x₀ in GL₂(F³)^det, then modulo ΔF^×
    let mut stab = 0u64;
    let gl: Vec<M> = all.iter().filter(|m| f.det(m) != 0).copied().collect();
    for g1 in &gl {
        let d = f.det(g1) as usize;
        let g1i = f.inv(g1);
        for g2 in &by_det[d] {
            if f.mul(&f.mul(g2, &x0[2]), &g1i) != x0[2] {
                continue;
            }
            let g2i = f.inv(g2);
            for g3 in &by_det[d] {
                let g = [*g1, *g2, *g3];
                let gi = [g1i, g2i, f.inv(g3)];
                if f.act(&g, &gi, &x0) == x0 {
                    stab += 1;
                }
            }
        }
    }
    let stabilizer_order = stab / (q as u64 - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = vec![];
    while omega.len() < samples {
        let fv = [rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q)];
        let b = rng.gen_range(0..q);
        let nf = fv[0] * fv[1] % q * fv[2] % q;
        // Σ = (1, 0, -f, -b) is nondegenerate iff b² + 4N(-f) ≠ 0
        if (b * b + 4 * (q - nf)) % q == 0 {
            continue;
        }
        let (size, first) = omega_count(fv, b);
        let orbit = first.map(|x| f.orbit(x)).unwrap_or(0);
        omega.push(OmegaReport {
            f: fv,
            b,
            size,
            orbit_size: orbit,
            single_orbit: size == orbit,
        });
    }
    let pass = set_size == predicted_size
        && orbit_size == set_size
        && stabilizer_order == q as u64 - 1
        && omega.iter().all(|o| o.single_orbit);
    Ok(OrbitReport {
        q,
        group_order,
        stabilizer_order,
        predicted_size,
        set_size,
        orbit_size,
        omega,
        pass,
    })
}

/// A prime p inert in the cubic field E with v_p(λ) ≢ 0 mod 3, which shows
/// λ ∉ N_{E/Q}(E^×).
pub fn inert_norm_obstruction(e: &EtaleAlgebra, lambda: &Scalar) -> Option<u64> {
    let r = lambda.as_rational()?;
    if !e.is_field() || r.is_zero() {
        return None;
    }
    let g = &e.factors()[0];
    let disc = poly::discriminant(&e.base(), g)?;
    let mut primes = vec![];
    for n in [r.numer(), r.denom()] {
        let mut m = n.clone();
        if m < num_bigint::BigInt::zero() {
            m = -m;
        }
        let mut p = 2u64;
        while p < 100_000 && m > num_bigint::BigInt::from(1) {
            if (&m % p).is_zero() {
                primes.push(p);
                while (&m % p).is_zero() {
                    m /= p;
                }
            }
            p += 1;
        }
    }
    for p in primes {
        if p < 5 && p != 2 && p != 3 || !is_prime(p) || valuation(r, p).rem_euclid(3) == 0 {
            continue;
        }
        if p > 1 << 20 {
            continue;
        }
        let Ok(ctx) = crate::fields::finite::FqCtx::get(p as u32, 1) else {
            // characteristics 2 and 3 are excluded from table arithmetic
            if small_prime_inert(g, &disc, p) {
                return Some(p);
            }
            continue;
        };
        let red = |s: &Scalar| reduce_mod(s.as_rational()?, ctx);
        let (Some(gp), Some(dp)) = (g.iter().map(red).collect::<Option<Vec<_>>>(), red(&disc))
        else {
            continue;
        };
        if dp.is_zero() {
            continue;
        }
        if poly::roots(&BaseField::Finite(ctx), &gp).is_empty() {
            return Some(p);
        }
    }
    None
}

/// Inertness at p ∈ {2, 3} by direct root search of the integral cubic mod p.
fn small_prime_inert(g: &[Scalar], disc: &Scalar, p: u64) -> bool {
    let ints: Option<Vec<i64>> = g
        .iter()
        .map(|c| {
            let r = c.as_rational()?;
            if !r.is_integer() {
                return None;
            }
            num_traits::ToPrimitive::to_i64(r.numer())
        })
        .collect();
    let Some(ints) = ints else { return false };
    let Some(d) = disc.as_rational().filter(|d| d.is_integer()) else {
        return false;
    };
    if (d.numer() % p).is_zero() {
        return false;
    }
    let p = p as i64;
    (0..p).all(|x| {
        let mut acc = 0i64;
        for c in ints.iter().rev() {
            acc = (acc * x + c).rem_euclid(p);
        }
        acc != 0
    })
}

#[derive(Clone, Debug)]
pub struct CyclicEmbedding {
    pub lambda: Scalar,
    /// Image of (1, 0) ∈ C(λ) in M₂(E), when an embedding exists.
    pub verdict: Verdict<Mat2>,
}

/// Decides whether C(λ) embeds into the rank-4 model C_B^E of a cyclic (or
/// split) cubic E. Yes: x = diag(c, 0) with N(c) = λ. No: an inert prime
/// certifies λ is not a norm.
pub fn cyclic_embedding(e: &EtaleAlgebra, lambda: &Scalar, bound: u32) -> Result<CyclicEmbedding, TcaError> {
    let model = if e.num_factors() == 3 {
        Rank4Model::Split
    } else {
        Rank4Model::Twisted
    };
    let cb = make_rank4(e, &model)?;
    let cl = make_cyclic(e, lambda)?;
    let b = e.base();
    let mut found = None;
    if let Some(units) = e.units() {
        found = units.into_iter().find(|c| c.norm() == *lambda);
    } else {
        let r = bound as i64;
        'outer: for den in 1..=r.max(1) {
            let dinv = b.int(den).inv().expect("nonzero");
            for c0 in -r..=r {
                for c1 in -r..=r {
                    for c2 in -r..=r {
                        let c = e.from_ints(&[c0, c1, c2]).scale(&dinv);
                        if c.norm() == *lambda {
                            found = Some(c);
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let verdict = match found {
        Some(c) => {
            let z = e.zero();
            let x: Mat2 = [c, z.clone(), z.clone(), z];
            check_embedding(&cl, &cb, &x, lambda)?;
            Verdict::Yes(Some(x))
        }
        None => match inert_norm_obstruction(e, lambda) {
            Some(p) => Verdict::No(format!(
                "lambda has valuation prime to 3 at the inert prime {}",
                p
            )),
            None if b.is_finite() => Verdict::No("lambda is not a norm".into()),
            None => Verdict::Unknown,
        },
    };
    Ok(CyclicEmbedding {
        lambda: lambda.clone(),
        verdict,
    })
}

/// φ(u, v) = u·x + v·λ⁻¹β(x) must preserve Q and β.
fn check_embedding(cl: &Tca, cb: &Tca, x: &Mat2, lambda: &Scalar) -> Result<(), TcaError> {
    let xe = TcaElem::R4(Box::new(x.clone()));
    let y = cb.beta(&xe);
    let linv = lambda.inv().expect("unit");
    let l = cl.composite().expect("rank 2");
    let phi = |z: &TcaElem| -> TcaElem {
        let z = z.as_l().expect("rank 2");
        let a = cb.scale(&z.u, &xe);
        let b = cb.scale(&z.v.scale(&linv), &y);
        cb.add(&a, &b)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..8 {
        let z = TcaElem::R2(l.random(&mut rng));
        if cb.q(&phi(&z)) != cl.q(&z) || cb.beta(&phi(&z)) != phi(&cl.beta(&z)) {
            return Err(TcaError::AxiomViolation(
                "candidate map is not an embedding".into(),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::CubicKind;

    #[test]
    fn fast_engine_matches_generic_norm() {
        let f = Fp(5);
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let c = make_rank4(&e, &Rank4Model::Split).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let x: [M; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..5)));
            let m: Mat2 = std::array::from_fn(|k| {
                e.from_flat((0..3).map(|i| b.from_index(x[i][k])).collect()).unwrap()
            });
            let n = c.nc(&TcaElem::R4(Box::new(m))).unwrap();
            assert_eq!(n, b.from_index(f.nc(&x)));
        }
    }

    #[test]
    fn twisted_embedding_over_q() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::cubic_field(q, vec![q.int(-1), q.int(-2), q.int(1), q.int(1)])
            .unwrap();
        assert!(cyclic_embedding(&e, &q.int(2), 1).unwrap().verdict.is_no());
        assert!(cyclic_embedding(&e, &q.int(1), 1).unwrap().verdict.is_yes());
        // N(X) = 1 - ... : the generator has norm 1; N(2 + X) is a norm by construction
        let c = e.from_ints(&[2, 1, 0]);
        assert!(cyclic_embedding(&e, &c.norm(), 2).unwrap().verdict.is_yes());
    }

    #[test]
    fn orbit_check_q5() {
        let b = BaseField::finite(5).unwrap();
        let c = make_rank4(&EtaleAlgebra::split(b, 3), &Rank4Model::Split).unwrap();
        let r = rank4_orbit_check(&c, 3, 1).unwrap();
        assert_eq!(r.group_order, 1_728_000);
        assert_eq!(r.set_size, 432_000);
        assert_eq!(r.stabilizer_order, 4);
        assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn finite_fields_always_embed() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        for l in 1..7 {
            assert!(cyclic_embedding(&e, &b.int(l), 0).unwrap().verdict.is_yes());
        }
    }
}
