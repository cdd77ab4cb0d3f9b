//! Rational geometry of the apartment: lattices, exponents, affine and finite Weyl groups.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::qz::{int, rat, Q};

pub type Vect = Vec<Q>;

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn axpy(a: &Q, x: &[Q], y: &[Q]) -> Vect {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

pub fn neg(x: &[Q]) -> Vect {
    x.iter().map(|v| -v).collect()
}

pub fn coroot(a: &[Q]) -> Vect {
    let n = dot(a, a);
    a.iter().map(|x| int(2) * x / &n).collect()
}

/// x - ⟨x, a^∨⟩ a.
pub fn reflect(x: &[Q], a: &[Q], av: &[Q]) -> Vect {
    axpy(&-dot(x, av), a, x)
}

pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// Solves a square system over Q.
pub fn solve(mut m: Vec<Vect>, mut rhs: Vect) -> Option<Vect> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for j in col..n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

/// A full-rank lattice X ⊂ A given by a Z-basis, with A = span(X).
#[derive(Clone, Debug)]
pub struct Lattice {
    pub basis: Vec<Vect>,
    gram: Vec<Vect>,
}

impl Lattice {
    pub fn new(basis: Vec<Vect>) -> Option<Self> {
        let gram: Vec<Vect> = basis
            .iter()
            .map(|a| basis.iter().map(|b| dot(a, b)).collect())
            .collect();
        // nonsingular Gram matrix
        solve(gram.clone(), vec![Q::zero(); basis.len()])?;
        Some(Lattice { basis, gram })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis[0].len()
    }

    /// The vector of span(X) with prescribed pairings against the basis.
    pub fn from_pairings(&self, vals: &[Q]) -> Vect {
        let c = solve(self.gram.clone(), vals.to_vec()).expect("nonsingular gram");
        let mut v = vec![Q::zero(); self.ambient()];
        for (ci, b) in c.iter().zip(&self.basis) {
            v = axpy(ci, b, &v);
        }
        v
    }

    pub fn pairings(&self, v: &[Q]) -> Vect {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// Canonical representative modulo X* (pairings in [0, 1)).
    pub fn reduce_dual(&self, t: &[Q]) -> Vect {
        let p: Vect = self.pairings(t).iter().map(frac).collect();
        self.from_pairings(&p)
    }

    pub fn in_dual(&self, t: &[Q]) -> bool {
        self.pairings(t).iter().all(|x| x.is_integer())
    }

    /// Nonnegative integer coordinates of ω in the basis, if any.
    pub fn dominant_coords(&self, w: &[Q]) -> Option<Vec<u32>> {
        let c = solve(self.gram.clone(), self.pairings(w))?;
        let back = c.iter().zip(&self.basis).fold(vec![Q::zero(); self.ambient()], |acc, (ci, b)| axpy(ci, b, &acc));
        if back != w {
            return None;
        }
        c.iter()
            .map(|x| {
                if x.is_integer() && !x.is_negative() {
                    x.to_integer().try_into().ok()
                } else {
                    None
                }
            })
            .collect()
    }
}

/// μ = re + (2πi/ln q)·tor, with tor reduced modulo X*.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub re: Vect,
    pub tor: Vect,
}

impl Exponent {
    pub fn new(re: Vect, tor: Vect, x: &Lattice) -> Self {
        Exponent { re, tor: x.reduce_dual(&tor) }
    }

    pub fn real(re: Vect, x: &Lattice) -> Self {
        let n = re.len();
        Exponent::new(re, vec![Q::zero(); n], x)
    }

    pub fn neg(&self, x: &Lattice) -> Self {
        Exponent::new(neg(&self.re), neg(&self.tor), x)
    }

    pub fn is_real(&self) -> bool {
        self.tor.iter().all(Zero::is_zero)
    }
}

pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn fmt_vec(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_vec(&self.re))?;
        if !self.is_real() {
            write!(f, " + 2πi/ln q·{}", fmt_vec(&self.tor))?;
        }
        Ok(())
    }
}

/// Affine Weyl group generated by s₀ (reflection in α₀ = k) and the simple reflections.
#[derive(Clone, Debug)]
pub struct AffineWeyl {
    /// α₀ (an affine wall α₀·x = k) followed by α₁..α_r.
    pub roots: Vec<Vect>,
    pub level: Q,
    /// Extra linear constraints cutting out A inside the ambient space.
    pub plane_normals: Vec<Vect>,
}

impl AffineWeyl {
    fn apply_gen(&self, i: usize, x: &[Q]) -> Vect {
        let a = &self.roots[i];
        let av = coroot(a);
        let k = if i == 0 { self.level.clone() } else { Q::zero() };
        axpy(&-(dot(x, a) - k), &av, x)
    }

    /// Positive on the fundamental alcove.
    fn wall(&self, i: usize, x: &[Q]) -> Q {
        if i == 0 {
            &self.level - dot(&self.roots[0], x)
        } else {
            dot(&self.roots[i], x)
        }
    }

    /// The image of x under s_{w₁} ⋯ s_{w_k}.
    pub fn apply_word(&self, word: &[usize], x: &[Q]) -> Vect {
        word.iter().rev().fold(x.to_vec(), |acc, &i| self.apply_gen(i, &acc))
    }

    /// A generic point of the fundamental alcove.
    pub fn interior_point(&self) -> Vect {
        let r = self.roots.len() - 1;
        let n = self.roots[0].len();
        let mut rows: Vec<Vect> = self.roots[1..].to_vec();
        let mut rhs: Vect = (0..r).map(|i| rat(1, 1000 + 37 * i as i64)).collect();
        for p in &self.plane_normals {
            rows.push(p.clone());
            rhs.push(Q::zero());
        }
        assert_eq!(rows.len(), n, "simple roots and plane normals must span");
        let x = solve(rows, rhs).expect("independent roots");
        debug_assert!((0..=r).all(|i| self.wall(i, &x).is_positive()));
        x
    }

    /// The reduced word of the translation by ω read off by walking back to the alcove.
    pub fn translation_word(&self, omega: &[Q]) -> Vec<usize> {
        let p = self.interior_point();
        let mut x: Vect = p.iter().zip(omega).map(|(a, b)| a + b).collect();
        let mut word = vec![];
        loop {
            let Some(i) = (0..self.roots.len()).find(|&i| self.wall(i, &x).is_negative()) else {
                break;
            };
            x = self.apply_gen(i, &x);
            word.push(i);
        }
        debug_assert_eq!(x, p);
        word
    }

    /// The word acts as translation by ω on the whole apartment.
    pub fn is_translation(&self, word: &[usize], omega: &[Q]) -> bool {
        let p = self.interior_point();
        let mut pts = vec![p.clone()];
        for i in 0..p.len() {
            let mut y = p.clone();
            y[i] += Q::one();
            pts.push(y);
        }
        pts.iter().all(|x| {
            let y = self.apply_word(word, x);
            y.iter().zip(x).zip(omega).all(|((a, b), c)| a - b == *c)
        })
    }
}

/// Finite Weyl group as explicit matrices (columns are images of the standard basis).
pub fn weyl_group(simple: &[Vect]) -> Vec<Vec<Vect>> {
    let n = simple[0].len();
    let id: Vec<Vect> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    let cor: Vec<Vect> = simple.iter().map(|a| coroot(a)).collect();
    let mut seen: HashSet<Vec<Vect>> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut frontier = vec![id];
    while let Some(w) = frontier.pop() {
        for (a, av) in simple.iter().zip(&cor) {
            let w2: Vec<Vect> = w.iter().map(|col| reflect(col, a, av)).collect();
            if seen.insert(w2.clone()) {
                out.push(w2.clone());
                frontier.push(w2);
            }
        }
    }
    out
}

pub fn weyl_apply(w: &[Vect], x: &[Q]) -> Vect {
    let n = x.len();
    let mut y = vec![Q::zero(); n];
    for (xi, col) in x.iter().zip(w) {
        y = axpy(xi, col, &y);
    }
    y
}

pub fn lcm_denominators(v: &[Q]) -> num_bigint::BigInt {
    v.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(xs: &[i64]) -> Vect {
        xs.iter().map(|&n| int(n)).collect()
    }

    fn g2() -> AffineWeyl {
        AffineWeyl { roots: vec![iv(&[1, 0, -1]), iv(&[1, -1, 0]), vec![rat(-1, 3), rat(2, 3), rat(-1, 3)]], level: int(1), plane_normals: vec![iv(&[1, 1, 1])] }
    }

    #[test]
    fn g2_weyl_group_has_twelve_elements() {
        assert_eq!(weyl_group(&[iv(&[1, -1, 0]), iv(&[-2, 1, 1])]).len(), 12);
        assert_eq!(weyl_group(&[iv(&[1, -1, 0]), iv(&[0, 1, -1]), iv(&[0, 0, 1])]).len(), 48);
    }

    #[test]
    fn translation_words_act_as_translations() {
        let w = g2();
        for om in [iv(&[1, 0, -1]), iv(&[1, 1, -2]), iv(&[2, 1, -3])] {
            let word = w.translation_word(&om);
            assert!(w.is_translation(&word, &om));
            assert!(!w.is_translation(&word, &neg(&om)));
        }
        assert!(w.translation_word(&iv(&[0, 0, 0])).is_empty());
    }

    #[test]
    fn reduce_dual_is_idempotent_and_shift_invariant() {
        let x = Lattice::new(vec![iv(&[1, 0, -1]), iv(&[1, 1, -2])]).unwrap();
        let t = vec![rat(-1, 3), rat(1, 3), int(0)];
        let r = x.reduce_dual(&t);
        assert_eq!(x.reduce_dual(&r), r);
        assert!(x.in_dual(&axpy(&int(-1), &t, &r)));
        assert_eq!(x.dominant_coords(&iv(&[2, 1, -3])), Some(vec![1, 1]));
        assert_eq!(x.dominant_coords(&iv(&[0, -1, 1])), None);
        assert!(Lattice::new(vec![iv(&[1, 0]), iv(&[2, 0])]).is_none());
    }

    #[test]
    fn reflection_is_an_involution() {
        let a = iv(&[-2, 1, 1]);
        let av = coroot(&a);
        let x = vec![rat(1, 2), int(3), rat(-7, 5)];
        assert_eq!(reflect(&reflect(&x, &a, &av), &a, &av), x);
        assert_eq!(reflect(&a, &a, &av), neg(&a));
    }
}
