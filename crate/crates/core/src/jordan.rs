//! The Springer algebra J = E ⊕ C with its cubic norm structure.

use serde::Serialize;

use crate::error::TcaError;
use crate::fields::{BaseField, Elem, Scalar};
use crate::tca::{division_test, springer_sharp, DivisionVerdict, Tca, TcaElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JElem {
    pub a: Elem,
    pub x: TcaElem,
}

/// J = E ⊕ C for a twisted composition algebra C.
#[derive(Clone, Debug)]
pub struct Springer {
    c: Tca,
}

impl Springer {
    pub fn new(c: Tca) -> Self {
        Springer { c }
    }

    pub fn tca(&self) -> &Tca {
        &self.c
    }

    pub fn zero(&self) -> JElem {
        JElem {
            a: self.c.e().zero(),
            x: self.c.zero(),
        }
    }

    pub fn one(&self) -> JElem {
        self.scalar(&self.c.base().one())
    }

    pub fn scalar(&self, s: &Scalar) -> JElem {
        JElem {
            a: self.c.e().scalar(s),
            x: self.c.zero(),
        }
    }

    pub fn from_e(&self, a: &Elem) -> JElem {
        JElem {
            a: a.clone(),
            x: self.c.zero(),
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> JElem {
        JElem {
            a: self.c.e().random(rng),
            x: self.c.random(rng),
        }
    }

    pub fn add(&self, z: &JElem, w: &JElem) -> JElem {
        JElem {
            a: &z.a + &w.a,
            x: self.c.add(&z.x, &w.x),
        }
    }

    pub fn scale(&self, s: &Scalar, z: &JElem) -> JElem {
        let e = self.c.e().scalar(s);
        JElem {
            a: z.a.scale(s),
            x: self.c.scale(&e, &z.x),
        }
    }

    pub fn sub(&self, z: &JElem, w: &JElem) -> JElem {
        let m = self.scale(&-self.c.base().one(), w);
        self.add(z, &m)
    }

    /// (a, x)^# = (a^# - Q(x), β(x) - a·x).
    pub fn sharp(&self, z: &JElem) -> JElem {
        let (a, x) = springer_sharp(&self.c, &z.a, &z.x);
        JElem { a, x }
    }

    /// N_J(a, x) = N_E(a) + N_C(x) - T_E(a·Q(x)).
    pub fn norm(&self, z: &JElem) -> Result<Scalar, TcaError> {
        let nc = self.c.nc(&z.x)?;
        let t = (&z.a * &self.c.q(&z.x)).trace();
        Ok(&(&z.a.norm() + &nc) - &t)
    }

    /// T_J(a, x) = T_E(a).
    pub fn trace(&self, z: &JElem) -> Scalar {
        z.a.trace()
    }

    /// z × w = (z + w)^# - z^# - w^#.
    pub fn cross(&self, z: &JElem, w: &JElem) -> JElem {
        let s = self.sharp(&self.add(z, w));
        self.sub(&self.sub(&s, &self.sharp(z)), &self.sharp(w))
    }

    /// z∘w = ½(z×w + T(z)w + T(w)z - T(z×w)·1).
    pub fn product(&self, z: &JElem, w: &JElem) -> JElem {
        let zw = self.cross(z, w);
        let t = self.trace(&zw);
        let mut r = self.add(&zw, &self.scale(&self.trace(z), w));
        r = self.add(&r, &self.scale(&self.trace(w), z));
        r = self.sub(&r, &self.scalar(&t));
        self.scale(&self.c.base().ratio(1, 2), &r)
    }

    pub fn rank(&self, z: &JElem) -> Result<u8, TcaError> {
        if *z == self.zero() {
            return Ok(0);
        }
        if self.sharp(z) == self.zero() {
            return Ok(1);
        }
        Ok(if self.norm(z)?.is_zero() { 2 } else { 3 })
    }

    /// c_α(e, v) = (α^#/α·e, α·v).
    pub fn similitude(&self, alpha: &Elem, z: &JElem) -> Result<JElem, TcaError> {
        let f = &alpha.sharp_unchecked() * &alpha.inv()?;
        Ok(JElem {
            a: &f * &z.a,
            x: self.c.scale(alpha, &z.x),
        })
    }

    /// Division test; a certificate is a rank-1 element.
    pub fn division_test(&self, bound: u32, seed: u64) -> Result<DivisionVerdict, TcaError> {
        division_test(&self.c, bound, seed)
    }
}

/// Report of the M₃(F) fixture with E = F³ on the diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub q: u32,
    pub samples: usize,
    pub q_unit_vector: Vec<String>,
    pub sharp_matches: bool,
    pub tensors_match: bool,
    pub product_matches: bool,
    pub norm_matches: bool,
    pub trace_matches: bool,
    pub orthogonal: bool,
    pub pass: bool,
}

type M3 = [[Scalar; 3]; 3];

fn m3_mul(f: &BaseField, x: &M3, y: &M3) -> M3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(f.zero(), |acc, k| &acc + &(&x[i][k] * &y[k][j]))
        })
    })
}

fn m3_adj(x: &M3) -> M3 {
    // adj(x)_{ij} = cofactor_{ji}
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let r: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let m = &(&x[r[0]][c[0]] * &x[r[1]][c[1]]) - &(&x[r[0]][c[1]] * &x[r[1]][c[0]]);
            if (i + j) % 2 == 0 {
                m
            } else {
                -m
            }
        })
    })
}

fn m3_det(x: &M3) -> Scalar {
    let adj = m3_adj(x);
    (0..3).fold(x[0][0].zero_like(), |acc, k| &acc + &(&x[0][k] * &adj[k][0]))
}

/// Runs the M₃ fixture over F_q on `samples` random elements.
pub fn springer_fixture_check(q: u32, samples: usize, seed: u64) -> Result<FixtureReport, TcaError> {
    use rand::SeedableRng;
    let b = BaseField::finite(q)?;
    let e = crate::fields::EtaleAlgebra::split(b, 3);
    let k = crate::fields::quadratic_split(b);
    let c = crate::tca::make_rank2(&k, &e.one(), &k.one())?;
    let l = c.composite().expect("rank 2").clone();
    let j = Springer::new(c.clone());

    // (a, ((x1,y1),(x2,y2),(x3,y3))) ↦ diag(a) + [[0,x3,y2],[y3,0,x1],[x2,y1,0]]
    let to_m3 = |z: &JElem| -> M3 {
        let a = z.a.coords();
        let xl = z.x.as_l().expect("rank 2");
        let (x, y) = (xl.u.coords(), xl.v.coords());
        [
            [a[0].clone(), x[2].clone(), y[1].clone()],
            [y[2].clone(), a[1].clone(), x[0].clone()],
            [x[1].clone(), y[0].clone(), a[2].clone()],
        ]
    };
    let from_m3 = |m: &M3| -> JElem {
        let a = e
            .from_flat(vec![m[0][0].clone(), m[1][1].clone(), m[2][2].clone()])
            .expect("rank 3");
        let u = e
            .from_flat(vec![m[1][2].clone(), m[2][0].clone(), m[0][1].clone()])
            .expect("rank 3");
        let v = e
            .from_flat(vec![m[2][1].clone(), m[0][2].clone(), m[1][0].clone()])
            .expect("rank 3");
        JElem {
            a,
            x: TcaElem::R2(l.make(u, v)),
        }
    };
    // the tensors written out in coordinates
    let q_formula = |x: &[Scalar], y: &[Scalar]| -> Vec<Scalar> {
        (0..3).map(|i| &x[i] * &y[i]).collect()
    };
    let beta_formula = |x: &[Scalar], y: &[Scalar]| -> (Vec<Scalar>, Vec<Scalar>) {
        (
            vec![&y[1] * &y[2], &y[2] * &y[0], &y[0] * &y[1]],
            vec![&x[1] * &x[2], &x[2] * &x[0], &x[0] * &x[1]],
        )
    };

    let ones = l.make(e.one(), e.one());
    let q_unit = c.q(&TcaElem::R2(ones));
    let q_unit_vector: Vec<String> = q_unit.coords().iter().map(|s| s.to_string()).collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut sharp_ok, mut tens_ok, mut prod_ok, mut norm_ok, mut tr_ok, mut orth_ok) =
        (true, true, true, true, true, true);
    let half = b.ratio(1, 2);
    for _ in 0..samples {
        let z = j.random(&mut rng);
        let w = j.random(&mut rng);
        let mz = to_m3(&z);
        let mw = to_m3(&w);
        sharp_ok &= from_m3(&m3_adj(&mz)) == j.sharp(&z);
        let xl = z.x.as_l().expect("rank 2");
        let (x, y) = (xl.u.coords(), xl.v.coords());
        let (bx, by) = beta_formula(x, y);
        let beta = c.beta(&z.x);
        let bl = beta.as_l().expect("rank 2");
        tens_ok &= c.q(&z.x).coords() == q_formula(x, y).as_slice()
            && bl.u.coords() == bx.as_slice()
            && bl.v.coords() == by.as_slice();
        let sym: M3 = {
            let p1 = m3_mul(&b, &mz, &mw);
            let p2 = m3_mul(&b, &mw, &mz);
            std::array::from_fn(|i| std::array::from_fn(|k| &(&p1[i][k] + &p2[i][k]) * &half))
        };
        prod_ok &= from_m3(&sym) == j.product(&z, &w);
        norm_ok &= m3_det(&mz) == j.norm(&z)?;
        tr_ok &= (&(&mz[0][0] + &mz[1][1]) + &mz[2][2]) == j.trace(&z);
        // E ⊥ C under T(y∘z)
        let ez = j.from_e(&z.a);
        let cw = JElem {
            a: e.zero(),
            x: w.x.clone(),
        };
        orth_ok &= j.trace(&j.product(&ez, &cw)).is_zero();
    }
    let unit_ok = q_unit == e.one();
    let pass = sharp_ok && tens_ok && prod_ok && norm_ok && tr_ok && orth_ok && unit_ok;
    Ok(FixtureReport {
        q,
        samples,
        q_unit_vector,
        sharp_matches: sharp_ok,
        tensors_match: tens_ok,
        product_matches: prod_ok,
        norm_matches: norm_ok,
        trace_matches: tr_ok,
        orthogonal: orth_ok,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, CubicKind, EtaleAlgebra};
    use crate::tca::make_rank2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_j(q: u32, seed: u64) -> Springer {
        let b = BaseField::finite(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let k = quadratic_field(b, &b.nonsquare().unwrap()).unwrap();
        let ee = e.random_unit(&mut rng);
        let nu = k.units().unwrap().into_iter().find(|n| n.norm() == ee.norm()).unwrap();
        Springer::new(make_rank2(&k, &ee, &nu).unwrap())
    }

    #[test]
    fn unit_and_pure_c_sharp() {
        let j = sample_j(7, 1);
        assert_eq!(j.sharp(&j.one()), j.one());
        assert_eq!(j.norm(&j.one()).unwrap(), BaseField::finite(7).unwrap().one());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = j.tca().random(&mut rng);
        let z = JElem {
            a: j.tca().e().zero(),
            x: x.clone(),
        };
        let s = j.sharp(&z);
        assert_eq!(s.a, -&j.tca().q(&x));
        assert_eq!(s.x, j.tca().beta(&x));
        assert_eq!(j.norm(&z).unwrap(), j.tca().nc(&x).unwrap());
    }

    #[test]
    fn adjoint_identities_f7() {
        let j = sample_j(7, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let z = j.random(&mut rng);
            let n = j.norm(&z).unwrap();
            assert_eq!(j.sharp(&j.sharp(&z)), j.scale(&n, &z));
            assert_eq!(j.product(&z, &j.sharp(&z)), j.scalar(&n));
            assert_eq!(j.product(&j.one(), &z), z);
        }
    }

    #[test]
    fn product_on_e_is_multiplication() {
        let j = sample_j(5, 5);
        let e = j.tca().e().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let (x, y) = (e.random(&mut rng), e.random(&mut rng));
            assert_eq!(j.product(&j.from_e(&x), &j.from_e(&y)), j.from_e(&(&x * &y)));
            assert_eq!(j.cross(&j.from_e(&x), &j.from_e(&y)), j.from_e(&x.cross(&y).unwrap()));
        }
    }

    #[test]
    fn similitude_factor() {
        let j = sample_j(5, 7);
        let e = j.tca().e().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let alpha = e.random_unit(&mut rng);
            let z = j.random(&mut rng);
            let lhs = j.norm(&j.similitude(&alpha, &z).unwrap()).unwrap();
            assert_eq!(lhs, &alpha.norm() * &j.norm(&z).unwrap());
        }
    }

    #[test]
    fn ranks() {
        let j = sample_j(5, 9);
        assert_eq!(j.rank(&j.zero()).unwrap(), 0);
        assert_eq!(j.rank(&j.one()).unwrap(), 3);
        if let DivisionVerdict::NotDivision { a, x } = j.division_test(1, 0).unwrap() {
            assert_eq!(j.rank(&JElem { a, x }).unwrap(), 1);
        } else {
            panic!("finite J is never division");
        }
    }

    #[test]
    fn m3_fixture_f5() {
        let r = springer_fixture_check(5, 200, 1).unwrap();
        assert_eq!(r.q_unit_vector, vec!["1", "1", "1"]);
        assert!(r.pass, "{:?}", r);
    }
}
