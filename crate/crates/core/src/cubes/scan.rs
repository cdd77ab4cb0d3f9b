//! Exhaustive orbit and stabilizer computations for E = F_p³, where cubes
//! are 2×2×2 tensors over F_p with entries indexed by bit j = axis j.

use crate::error::{CubeError, FieldError};
use crate::fields::{BaseField, EtaleAlgebra, Scalar};

use super::{from_tensor, to_tensor, Cube, MatF};

pub type T8 = [u32; 8];
pub type M = [u32; 4];

#[derive(Clone, Debug)]
pub struct SplitCubes {
    p: u32,
}

#[derive(Clone, Debug)]
pub struct Orbits {
    /// Orbit id of each encoded tensor.
    pub id: Vec<u32>,
    pub reps: Vec<T8>,
    pub sizes: Vec<u64>,
}

impl SplitCubes {
    /// Prime p with 5 ≤ p ≤ 7 (p⁸ tensors are enumerated).
    pub fn new(p: u32) -> Result<Self, CubeError> {
        if !(5..=7).contains(&p) || p == 6 {
            return Err(FieldError::Unsupported(format!("exhaustive cube scan needs p = 5 or 7, got {p}")).into());
        }
        Ok(SplitCubes { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn inv(&self, a: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p as u64;
            }
            b = b * b % self.p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn det(&self, m: &M) -> u32 {
        let p = self.p;
        (m[0] * m[3] % p + p * p - m[1] * m[2] % p) % p
    }

    fn contract(&self, m: &M, axis: usize, t: &T8) -> T8 {
        let p = self.p;
        let bit = 1 << axis;
        let mut out = [0u32; 8];
        for (idx, slot) in out.iter_mut().enumerate() {
            let i = (idx >> axis) & 1;
            let lo = idx & !bit;
            *slot = (m[2 * i] * t[lo] + m[2 * i + 1] * t[lo | bit]) % p;
        }
        out
    }

    /// det⁻¹ (g₁ ⊗ g₂ ⊗ g₃) T.
    pub fn act(&self, g: &[M; 3], t: &T8) -> T8 {
        let mut r = *t;
        for (axis, m) in g.iter().enumerate() {
            r = self.contract(m, axis, &r);
        }
        let d = self.inv(self.det(&g[0]));
        r.map(|x| x * d % self.p)
    }

    pub fn encode(&self, t: &T8) -> usize {
        t.iter().rev().fold(0usize, |acc, &x| acc * self.p as usize + x as usize)
    }

    pub fn decode(&self, mut n: usize) -> T8 {
        let mut t = [0u32; 8];
        for slot in t.iter_mut() {
            *slot = (n % self.p as usize) as u32;
            n /= self.p as usize;
        }
        t
    }

    /// Elementary matrices in each slot and diag(t, 1) in all slots, t primitive.
    pub fn generators(&self) -> Vec<[M; 3]> {
        let id = [1, 0, 0, 1];
        let mut gens = vec![];
        for slot in 0..3 {
            for m in [[1, 1, 0, 1], [1, 0, 1, 1]] {
                let mut g = [id; 3];
                g[slot] = m;
                gens.push(g);
            }
        }
        let t = (2..self.p)
            .find(|&t| (1..self.p - 1).all(|k| self.pow(t, k) != 1))
            .expect("primitive root");
        gens.push([[t, 0, 0, 1]; 3]);
        gens
    }

    fn pow(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(1u32, |acc, _| acc * a % self.p)
    }

    /// |GL₂(F_p³)^det| = (p - 1)·|SL₂(F_p)|³.
    pub fn group_order(&self) -> u64 {
        let p = self.p as u64;
        let sl = p * (p * p - 1);
        (p - 1) * sl * sl * sl
    }

    pub fn orbits(&self) -> Orbits {
        let n = (self.p as usize).pow(8);
        let gens = self.generators();
        let mut id = vec![u32::MAX; n];
        let mut reps = vec![];
        let mut sizes = vec![];
        let mut stack = vec![];
        for start in 0..n {
            if id[start] != u32::MAX {
                continue;
            }
            let oid = reps.len() as u32;
            reps.push(self.decode(start));
            id[start] = oid;
            stack.push(start);
            let mut size = 0u64;
            while let Some(x) = stack.pop() {
                size += 1;
                let t = self.decode(x);
                for g in &gens {
                    let y = self.encode(&self.act(g, &t));
                    if id[y] == u32::MAX {
                        id[y] = oid;
                        stack.push(y);
                    }
                }
            }
            sizes.push(size);
        }
        Orbits { id, reps, sizes }
    }

    fn matrices_by_det(&self) -> Vec<Vec<M>> {
        let p = self.p;
        let mut by = vec![vec![]; p as usize];
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let m = [a, b, c, d];
                        by[self.det(&m) as usize].push(m);
                    }
                }
            }
        }
        by
    }

    /// All g with g·T = T.
    pub fn stabilizer(&self, t: &T8) -> Vec<[M; 3]> {
        let by = self.matrices_by_det();
        let mut out = vec![];
        for (d, ms) in by.iter().enumerate().skip(1) {
            // (g₁ ⊗ g₂ ⊗ g₃)T = d·T
            let target = t.map(|x| x * d as u32 % self.p);
            for g1 in ms {
                let t1 = self.contract(g1, 0, t);
                for g2 in ms {
                    let t2 = self.contract(g2, 1, &t1);
                    for g3 in ms {
                        if self.contract(g3, 2, &t2) == target {
                            out.push([*g1, *g2, *g3]);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_cube(&self, e: &EtaleAlgebra, t: &T8) -> Cube {
        let b = e.base();
        from_tensor(e, &t.map(|x| b.from_index(x)))
    }

    pub fn from_cube(&self, c: &Cube) -> Result<T8, CubeError> {
        let t = to_tensor(c);
        let mut out = [0u32; 8];
        for (slot, s) in out.iter_mut().zip(t.iter()) {
            *slot = to_u32(s)?;
        }
        Ok(out)
    }

    pub fn mat_to_scalar(&self, b: BaseField, g: &[M; 3]) -> [MatF; 3] {
        g.map(|m| m.map(|x| b.from_index(x)))
    }
}

fn to_u32(s: &Scalar) -> Result<u32, CubeError> {
    s.as_fq()
        .map(|f| f.v)
        .ok_or_else(|| FieldError::Unsupported("expected a finite-field scalar".into()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubes::{act, degenerate_rank, split_action, GroupElem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fast_action_matches_generic() {
        let s = SplitCubes::new(5).unwrap();
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let t: T8 = std::array::from_fn(|_| rng.gen_range(0..5));
            let g = loop {
                let g: [M; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..5)));
                let d = s.det(&g[0]);
                if d != 0 && s.det(&g[1]) == d && s.det(&g[2]) == d {
                    break g;
                }
            };
            let c = s.to_cube(&e, &t);
            let gs = s.mat_to_scalar(b, &g);
            let want = split_action(&gs, &c).unwrap();
            assert_eq!(s.to_cube(&e, &s.act(&g, &t)), want);
            let ge = GroupElem::from_split(&e, &gs).unwrap();
            assert_eq!(act(&ge, &c).unwrap(), want);
        }
    }

    #[test]
    fn orbit_sizes_sum_and_ranks_are_invariant() {
        let s = SplitCubes::new(5).unwrap();
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let o = s.orbits();
        assert_eq!(o.sizes.iter().sum::<u64>(), 5u64.pow(8));
        for size in &o.sizes {
            assert_eq!(s.group_order() % size, 0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = o.id.len();
        let mut rank_of = vec![None; o.reps.len()];
        for _ in 0..3000 {
            let x = rng.gen_range(0..n);
            let r = degenerate_rank(&s.to_cube(&e, &s.decode(x))).unwrap().rank;
            let slot = &mut rank_of[o.id[x] as usize];
            assert!(slot.is_none() || *slot == Some(r));
            *slot = Some(r);
        }
    }

    fn e5() -> (BaseField, EtaleAlgebra) {
        let b = BaseField::finite(5).unwrap();
        (b, EtaleAlgebra::split(b, 3))
    }

    #[test]
    fn stabilizers_match_automorphisms_and_phs_formula() {
        use crate::cubes::{algebra_of_reduced, omega_set, stabilizer_correspondence_check, Rank2};
        let s = SplitCubes::new(5).unwrap();
        let (b, e) = e5();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tried = 0;
        while tried < 3 {
            let f = e.random_unit(&mut rng);
            let bb = b.random(&mut rng);
            let sigma = Cube::reduced(&f, &bb);
            if sigma.reduced_discriminant().unwrap().is_zero() {
                continue;
            }
            tried += 1;
            let alg = algebra_of_reduced(&sigma).unwrap();
            let omega = omega_set(&alg, &f, &bb).unwrap();
            assert!(omega.contains(&(e.one(), e.zero())));
            let stab = s.stabilizer(&s.from_cube(&sigma).unwrap());
            assert_eq!(stab.len(), omega.len());
            for g in stab.iter().take(40) {
                let ge = GroupElem::from_split(&e, &s.mat_to_scalar(b, g)).unwrap();
                let chk = stabilizer_correspondence_check(&ge, &sigma).unwrap();
                assert!(chk.stabilizes && chk.preserves);
                for v in omega.iter().take(6) {
                    let gv = alg.combo(&ge.p, v, &ge.q, &alg.beta(v));
                    assert!(omega.contains(&gv));
                }
            }
            for _ in 0..20 {
                let g: [M; 3] = loop {
                    let g: [M; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..5)));
                    let d = s.det(&g[0]);
                    if d != 0 && s.det(&g[1]) == d && s.det(&g[2]) == d {
                        break g;
                    }
                };
                let ge = GroupElem::from_split(&e, &s.mat_to_scalar(b, &g)).unwrap();
                let chk = stabilizer_correspondence_check(&ge, &sigma).unwrap();
                assert_eq!(chk.stabilizes, chk.preserves);
            }
        }
    }

    #[test]
    fn nondegenerate_orbits_match_isomorphism_classes() {
        use crate::cubes::{algebra_of_reduced, omega_set};
        let s = SplitCubes::new(5).unwrap();
        let (b, e) = e5();
        let o = s.orbits();
        let mut cubes = vec![];
        for f in [[1, 1, 1], [1, 2, 3], [2, 2, 1], [4, 1, 3]] {
            for bb in 0..5 {
                let c = Cube::reduced(&e.from_ints(&f), &b.int(bb));
                if !c.reduced_discriminant().unwrap().is_zero() {
                    cubes.push(c);
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for c1 in &cubes {
            let id1 = o.id[s.encode(&s.from_cube(c1).unwrap())];
            seen.insert(id1);
            for c2 in &cubes {
                let id2 = o.id[s.encode(&s.from_cube(c2).unwrap())];
                let alg2 = algebra_of_reduced(c2).unwrap();
                let iso = !omega_set(&alg2, &c1.f, &c1.b).unwrap().is_empty();
                assert_eq!(id1 == id2, iso, "{c1:?} {c2:?}");
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn degenerate_orbit_criteria() {
        use crate::cubes::{rank2_same_orbit, rank3_same_orbit};
        let s = SplitCubes::new(5).unwrap();
        let (b, e) = e5();
        let o = s.orbits();
        let id = |c: &Cube| o.id[s.encode(&s.from_cube(c).unwrap())];
        let units = e.units().unwrap();
        let mut z = Cube::zero(&e);
        z.f = e.one();
        for u in units.iter().step_by(7) {
            let mut c = Cube::zero(&e);
            c.f = u.clone();
            assert_eq!(degenerate_rank(&c).unwrap().rank, 3);
            assert_eq!(id(&c) == id(&z), rank3_same_orbit(u, &e.one(), 2).unwrap().is_yes());
        }
        let rank2 = |x: i64, pos: usize| {
            let mut c = Cube::reduced(&e.zero(), &b.zero());
            let mut v = [0; 3];
            v[pos] = x;
            c.f = e.from_ints(&v);
            c
        };
        for pos in 0..3 {
            for x in 1..5 {
                let c = rank2(x, pos);
                assert_eq!(degenerate_rank(&c).unwrap().rank, 2);
                let same = rank2_same_orbit(&c.f, &rank2(1, pos).f).unwrap();
                assert_eq!(id(&c) == id(&rank2(1, pos)), same);
            }
        }
    }

    #[test]
    fn stabilizer_of_rank3_normal_form() {
        let s = SplitCubes::new(5).unwrap();
        let (_, e) = e5();
        let mut c = Cube::zero(&e);
        c.f = e.one();
        let t = s.from_cube(&c).unwrap();
        let stab = s.stabilizer(&t);
        let o = s.orbits();
        let size = o.sizes[o.id[s.encode(&t)] as usize];
        assert_eq!(stab.len() as u64 * size, s.group_order());
    }
}
