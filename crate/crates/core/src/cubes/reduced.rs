//! Rank-2 algebras attached to reduced cubes, the discriminant Δ and the
//! sets Ω_{C,f,b}.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Cube;
use crate::error::{CubeError, FieldError, TcaError};
use crate::fields::classes::all_square_roots;
use crate::fields::{Elem, EtaleAlgebra, Scalar};
use crate::tca::{norm_fiber, Tca, TcaElem, TcaKind};

/// Common interface of the rank-2 algebras handled here.
pub trait Rank2 {
    type V: Clone + PartialEq + std::fmt::Debug;

    fn e_alg(&self) -> &EtaleAlgebra;
    fn q(&self, v: &Self::V) -> Elem;
    fn beta(&self, v: &Self::V) -> Self::V;
    fn nc(&self, v: &Self::V) -> Result<Scalar, TcaError>;
    /// x·v + y·w.
    fn combo(&self, x: &Elem, v: &Self::V, y: &Elem, w: &Self::V) -> Self::V;
    /// Six F-coordinates.
    fn f_coords(&self, v: &Self::V) -> Vec<Scalar>;
    fn from_f_coords(&self, c: &[Scalar]) -> Self::V;
    /// {v : Q(v) = α}, finite bases only.
    fn q_fiber(&self, alpha: &Elem) -> Result<Vec<Self::V>, CubeError> {
        default_q_fiber(self, alpha)
    }
}

fn rank2_l(c: &Tca) -> Result<&crate::fields::Composite, CubeError> {
    match c.kind() {
        TcaKind::Rank2 { l, .. } => Ok(l),
        _ => Err(CubeError::Tca(TcaError::InvariantMismatch(format!(
            "needs rank 2, got rank {}",
            c.rank()
        )))),
    }
}

impl Rank2 for Tca {
    type V = TcaElem;

    fn e_alg(&self) -> &EtaleAlgebra {
        self.e()
    }
    fn q(&self, v: &TcaElem) -> Elem {
        Tca::q(self, v)
    }
    fn beta(&self, v: &TcaElem) -> TcaElem {
        Tca::beta(self, v)
    }
    fn nc(&self, v: &TcaElem) -> Result<Scalar, TcaError> {
        Tca::nc(self, v)
    }
    fn combo(&self, x: &Elem, v: &TcaElem, y: &Elem, w: &TcaElem) -> TcaElem {
        self.add(&self.scale(x, v), &self.scale(y, w))
    }
    fn f_coords(&self, v: &TcaElem) -> Vec<Scalar> {
        let z = v.as_l().expect("rank 2");
        z.u.coords().iter().chain(z.v.coords()).cloned().collect()
    }
    fn from_f_coords(&self, c: &[Scalar]) -> TcaElem {
        let l = self.composite().expect("rank 2");
        let e = self.e();
        self.elem2(l.make(
            e.from_flat(c[..3].to_vec()).expect("rank 3"),
            e.from_flat(c[3..].to_vec()).expect("rank 3"),
        ))
    }
    fn q_fiber(&self, alpha: &Elem) -> Result<Vec<TcaElem>, CubeError> {
        let l = rank2_l(self)?;
        let (e0, _) = self.params().expect("rank 2");
        let target = alpha * &e0.inv()?;
        if target.is_unit() {
            return Ok(norm_fiber(l, &target, 0)?.into_iter().map(|x| self.elem2(x)).collect());
        }
        let mut out = vec![];
        l.for_each(|x| {
            if l.norm_e(&x) == target {
                out.push(self.elem2(x));
            }
        })?;
        Ok(out)
    }
}

/// The algebra C_Σ on E² attached to a nondegenerate reduced cube (1, 0, f, b):
/// Q(x, y) = -f x² - b xy + f^# y²,
/// β(x, y) = (-b y^# - (f x) × y, x^# + f y^#).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedAlgebra {
    pub cube: Cube,
    fsharp: Elem,
}

pub fn algebra_of_reduced(c: &Cube) -> Result<ReducedAlgebra, CubeError> {
    if !c.is_reduced() {
        return Err(CubeError::NotReduced);
    }
    if c.reduced_discriminant()?.is_zero() {
        return Err(CubeError::Degenerate);
    }
    Ok(ReducedAlgebra {
        cube: c.clone(),
        fsharp: c.f.sharp_unchecked(),
    })
}

impl ReducedAlgebra {
    pub fn f(&self) -> &Elem {
        &self.cube.f
    }
    pub fn b(&self) -> &Scalar {
        &self.cube.b
    }
    pub fn bq(&self, v: &(Elem, Elem), w: &(Elem, Elem)) -> Elem {
        let s = (&v.0 + &w.0, &v.1 + &w.1);
        &(&self.q(&s) - &self.q(v)) - &self.q(w)
    }
}

impl Rank2 for ReducedAlgebra {
    type V = (Elem, Elem);

    fn e_alg(&self) -> &EtaleAlgebra {
        self.cube.algebra()
    }
    fn q(&self, v: &(Elem, Elem)) -> Elem {
        let (x, y) = v;
        let f = &self.cube.f;
        let t1 = -&(f * &(x * x));
        let t2 = (x * y).scale(&self.cube.b);
        let t3 = &self.fsharp * &(y * y);
        &(&t1 - &t2) + &t3
    }
    fn beta(&self, v: &(Elem, Elem)) -> (Elem, Elem) {
        let (x, y) = v;
        let f = &self.cube.f;
        let ys = y.sharp_unchecked();
        let c1 = &(-&ys.scale(&self.cube.b)) - &(f * x).cross(y).expect("rank 3");
        let c2 = &x.sharp_unchecked() + &(f * &ys);
        (c1, c2)
    }
    fn nc(&self, v: &(Elem, Elem)) -> Result<Scalar, TcaError> {
        let r = self.bq(v, &self.beta(v));
        r.as_scalar()
            .ok_or_else(|| TcaError::AxiomViolation(format!("b_Q(x, β(x)) = {r} is not in F")))
    }
    fn combo(&self, x: &Elem, v: &(Elem, Elem), y: &Elem, w: &(Elem, Elem)) -> (Elem, Elem) {
        (&(x * &v.0) + &(y * &w.0), &(x * &v.1) + &(y * &w.1))
    }
    fn f_coords(&self, v: &(Elem, Elem)) -> Vec<Scalar> {
        v.0.coords().iter().chain(v.1.coords()).cloned().collect()
    }
    fn from_f_coords(&self, c: &[Scalar]) -> (Elem, Elem) {
        let e = self.e_alg();
        (
            e.from_flat(c[..3].to_vec()).expect("rank 3"),
            e.from_flat(c[3..].to_vec()).expect("rank 3"),
        )
    }
    /// For each y, -f x² - b y x + f^# y² = α is a quadratic in x.
    fn q_fiber(&self, alpha: &Elem) -> Result<Vec<(Elem, Elem)>, CubeError> {
        let e = self.e_alg();
        let f = &self.cube.f;
        if !f.is_unit() {
            return default_q_fiber(self, alpha);
        }
        let finv = f.inv()?;
        let half_b = self.cube.b.half();
        let mut out = vec![];
        for y in e.elements().ok_or(CubeError::Field(FieldError::Unsupported("enumeration over Q".into())))? {
            let shift = &y.scale(&half_b) * &finv;
            let d = &(&shift * &shift) + &(&(&(&self.fsharp * &(&y * &y)) - alpha) * &finv);
            for r in all_square_roots(&d) {
                out.push((&r - &shift, y.clone()));
            }
        }
        Ok(out)
    }
}

fn default_q_fiber<A: Rank2 + ?Sized>(c: &A, alpha: &Elem) -> Result<Vec<A::V>, CubeError> {
    let elems = c
        .e_alg()
        .base()
        .elements()
        .ok_or(CubeError::Field(FieldError::Unsupported("enumeration over Q".into())))?;
    let mut out = vec![];
    let n = elems.len();
    let mut coords = vec![elems[0].clone(); 6];
    for idx in 0..n.pow(6) {
        let mut r = idx;
        for slot in coords.iter_mut() {
            *slot = elems[r % n].clone();
            r /= n;
        }
        let v = c.from_f_coords(&coords);
        if c.q(&v) == *alpha {
            out.push(v);
        }
    }
    Ok(out)
}

/// Δ(v) = N_C(v)² - 4N(Q(v)); nonzero iff {v, β(v)} is an E-basis of C.
pub fn delta<A: Rank2>(c: &A, v: &A::V) -> Result<Scalar, CubeError> {
    let n = c.nc(v)?;
    let base = c.e_alg().base();
    Ok(&(&n * &n) - &(&base.int(4) * &c.q(v).norm()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<V> {
    /// (1, 0, -Q(v), -N_C(v)).
    pub cube: Cube,
    pub v: V,
    pub beta_v: V,
}

pub fn reduce_at<A: Rank2>(c: &A, v: &A::V) -> Result<Reduction<A::V>, CubeError> {
    if delta(c, v)?.is_zero() {
        return Err(CubeError::Degenerate);
    }
    let n = c.nc(v)?;
    Ok(Reduction {
        cube: Cube::reduced(&-&c.q(v), &-&n),
        v: v.clone(),
        beta_v: c.beta(v),
    })
}

/// Searches for v with Δ(v) ≠ 0 and returns the reduced cube it defines.
pub fn reduce<A: Rank2>(c: &A, bound: u32, seed: u64) -> Result<Reduction<A::V>, CubeError> {
    let base = c.e_alg().base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = bound.max(1) as i64;
    for _ in 0..2000 {
        let coords: Vec<Scalar> = (0..6)
            .map(|_| {
                if base.is_finite() {
                    base.random(&mut rng)
                } else {
                    base.int(rng.gen_range(-r..=r))
                }
            })
            .collect();
        let v = c.from_f_coords(&coords);
        match reduce_at(c, &v) {
            Ok(red) => return Ok(red),
            Err(CubeError::Degenerate) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CubeError::SearchExhausted)
}

/// An F-basis of E² and all pairwise sums: a quadratic map on E² is
/// determined by its values here.
pub fn polarization_points(e: &EtaleAlgebra) -> Vec<(Elem, Elem)> {
    let base = e.base();
    let basis: Vec<(Elem, Elem)> = (0..6)
        .map(|i| {
            let mut c = vec![base.zero(); 6];
            c[i] = base.one();
            (
                e.from_flat(c[..3].to_vec()).expect("rank 3"),
                e.from_flat(c[3..].to_vec()).expect("rank 3"),
            )
        })
        .collect();
    let mut out = basis.clone();
    for i in 0..6 {
        for j in i + 1..6 {
            out.push((&basis[i].0 + &basis[j].0, &basis[i].1 + &basis[j].1));
        }
    }
    out
}

/// Checks that (x, y) ↦ x·v + y·β(v) carries (Q_Σ, β_Σ) to (Q_C, β_C).
pub fn round_trip_check<A: Rank2>(c: &A, red: &Reduction<A::V>) -> Result<bool, CubeError> {
    let alg = algebra_of_reduced(&red.cube)?;
    let phi = |p: &(Elem, Elem)| c.combo(&p.0, &red.v, &p.1, &red.beta_v);
    for p in polarization_points(c.e_alg()) {
        let z = phi(&p);
        if c.q(&z) != alg.q(&p) {
            return Ok(false);
        }
        if c.beta(&z) != phi(&alg.beta(&p)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ω_{C,f,b} = {v : Q(v) = -f, N_C(v) = -b}, for b² + 4N(f) ≠ 0 over F_q.
pub fn omega_set<A: Rank2>(c: &A, f: &Elem, b: &Scalar) -> Result<Vec<A::V>, CubeError> {
    if Cube::reduced(f, b).reduced_discriminant()?.is_zero() {
        return Err(CubeError::Degenerate);
    }
    let nb = -b;
    let mut out = vec![];
    for v in c.q_fiber(&-f)? {
        if c.nc(&v)? == nb {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{poly, quadratic_field, quadratic_split, BaseField, CubicKind};
    use crate::tca::{aut_group, make_rank2};

    fn det_oracle<A: Rank2>(c: &A, v: &A::V) -> Scalar {
        let e = c.e_alg();
        let base = e.base();
        let bv = c.beta(v);
        let mut rows = vec![];
        for w in [v, &bv] {
            for i in 0..3 {
                let mut u = vec![base.zero(); 3];
                u[i] = base.one();
                let ei = e.from_flat(u).unwrap();
                rows.push(c.f_coords(&c.combo(&ei, w, &e.zero(), w)));
            }
        }
        poly::det(&base, &rows)
    }

    #[test]
    fn delta_detects_bases_and_reduction_round_trips() {
        let b = BaseField::finite(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [CubicKind::Split, CubicKind::FTimesK, CubicKind::Field] {
            let e = EtaleAlgebra::finite_cubic(b, kind).unwrap();
            for k in [quadratic_split(b), quadratic_field(b, &b.nonsquare().unwrap()).unwrap()] {
                let kappa = k.random_unit(&mut rng);
                let n = crate::fields::composite::conj_k(&kappa);
                let c0 = (&kappa * &n).as_scalar().unwrap();
                let e0 = e.scalar(&c0);
                let nu = kappa.scale(&c0);
                let c = make_rank2(&k, &e0, &nu).unwrap();
                for _ in 0..30 {
                    let v = Tca::random(&c, &mut rng);
                    let d = delta(&c, &v).unwrap();
                    assert_eq!(d.is_zero(), det_oracle(&c, &v).is_zero());
                }
                let red = reduce(&c, 2, 5).unwrap();
                assert!(round_trip_check(&c, &red).unwrap());
            }
        }
    }

    #[test]
    fn reduced_cube_is_recovered_from_first_basis_vector() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let sigma = Cube::reduced(&e.from_ints(&[1, 2, 0]), &b.int(3));
        let alg = algebra_of_reduced(&sigma).unwrap();
        let v = (e.one(), e.zero());
        assert_eq!(alg.beta(&v), (e.zero(), e.one()));
        let red = reduce_at(&alg, &v).unwrap();
        assert_eq!(red.cube, sigma);
        assert!(round_trip_check(&alg, &red).unwrap());
    }

    #[test]
    fn reduced_algebra_satisfies_axioms() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut count = 0;
        while count < 200 {
            let sigma = Cube::reduced(&e.random(&mut rng), &b.random(&mut rng));
            if sigma.reduced_discriminant().unwrap().is_zero() {
                assert_eq!(algebra_of_reduced(&sigma).unwrap_err(), CubeError::Degenerate);
                continue;
            }
            count += 1;
            let alg = algebra_of_reduced(&sigma).unwrap();
            let x = (e.one(), e.zero());
            assert_eq!(alg.q(&x), -&sigma.f);
            assert_eq!(delta(&alg, &x).unwrap(), sigma.reduced_discriminant().unwrap());
            assert!(delta(&alg, &(e.zero(), e.zero())).unwrap().is_zero());
            let v = (e.random(&mut rng), e.random(&mut rng));
            let c = e.random(&mut rng);
            let bv = alg.beta(&v);
            assert_eq!(alg.q(&bv), alg.q(&v).sharp_unchecked());
            let cv = alg.combo(&c, &v, &e.zero(), &v);
            assert_eq!(alg.beta(&cv), alg.combo(&c.sharp_unchecked(), &bv, &e.zero(), &v));
            alg.nc(&v).unwrap();
        }
    }

    #[test]
    fn omega_sets_are_empty_or_torsors() {
        let b = BaseField::finite(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::FTimesK).unwrap();
        let k = quadratic_split(b);
        let c = make_rank2(&k, &e.one(), &k.one()).unwrap();
        let aut = aut_group(&c).unwrap().order;
        let mut sizes = std::collections::BTreeSet::new();
        for _ in 0..10 {
            let f = e.random_unit(&mut rng);
            let bb = b.random(&mut rng);
            if Cube::reduced(&f, &bb).reduced_discriminant().unwrap().is_zero() {
                continue;
            }
            let n = omega_set(&c, &f, &bb).unwrap().len();
            assert!(n == 0 || n == aut, "{n} vs {aut}");
            sizes.insert(n);
        }
        assert!(sizes.contains(&aut));
    }

    #[test]
    fn cyclic_model_reduction_uses_direct_norm() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let c = crate::tca::make_cyclic(&e, &b.one()).unwrap();
        let red = reduce(&c, 2, 1).unwrap();
        assert_eq!(red.cube.b, -&Tca::nc(&c, &red.v).unwrap());
        assert!(round_trip_check(&c, &red).unwrap());
    }
}
