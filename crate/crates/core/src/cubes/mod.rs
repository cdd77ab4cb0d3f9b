//! Twisted Bhargava cubes (a, e, f, b) ∈ F ⊕ E ⊕ E ⊕ F.
//!
//! For E = F³ a cube is a tensor T in F² ⊗ F² ⊗ F² with a = T₀₀₀, e_j the
//! entry with only axis j raised, f_j the entry with every axis but j raised,
//! and b = T₁₁₁. GL₂(E)^det acts by the tensor action twisted by det⁻¹; for a
//! general E the same action is written through E-invariant formulas for its
//! Bruhat generators.

mod reduced;
pub mod scan;

pub use reduced::{
    algebra_of_reduced, delta, omega_set, polarization_points, reduce, reduce_at,
    round_trip_check, Rank2, ReducedAlgebra, Reduction,
};

use serde::Serialize;

use crate::error::{CubeError, FieldError};
use crate::fields::classes::{class_test, Subgroup, Verdict};
use crate::fields::{BaseField, Elem, EtaleAlgebra, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    pub a: Scalar,
    pub e: Elem,
    pub f: Elem,
    pub b: Scalar,
}

/// 2×2 matrix over F, row-major.
pub type MatF = [Scalar; 4];

/// An element of GL₂(E)^det written as a matrix [[p, q], [r, s]] over E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElem {
    pub p: Elem,
    pub q: Elem,
    pub r: Elem,
    pub s: Elem,
}

impl Cube {
    pub fn new(a: Scalar, e: Elem, f: Elem, b: Scalar) -> Result<Self, CubeError> {
        if e.parent() != f.parent() {
            return Err(FieldError::ParentMismatch.into());
        }
        if e.parent().rank() != 3 {
            return Err(FieldError::WrongRank {
                expected: 3,
                found: e.parent().rank(),
            }
            .into());
        }
        Ok(Cube { a, e, f, b })
    }

    /// (1, 0, f, b).
    pub fn reduced(f: &Elem, b: &Scalar) -> Self {
        let alg = f.parent();
        Cube {
            a: alg.base().one(),
            e: alg.zero(),
            f: f.clone(),
            b: b.clone(),
        }
    }

    /// v_E = (1, 0, 0, -1).
    pub fn distinguished(e: &EtaleAlgebra) -> Self {
        let b = e.base();
        Cube {
            a: b.one(),
            e: e.zero(),
            f: e.zero(),
            b: -b.one(),
        }
    }

    pub fn zero(e: &EtaleAlgebra) -> Self {
        let b = e.base();
        Cube {
            a: b.zero(),
            e: e.zero(),
            f: e.zero(),
            b: b.zero(),
        }
    }

    pub fn algebra(&self) -> &EtaleAlgebra {
        self.e.parent()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.e.is_zero() && self.f.is_zero() && self.b.is_zero()
    }

    pub fn is_reduced(&self) -> bool {
        self.a.is_one() && self.e.is_zero()
    }

    /// b² + 4N(f) for a reduced cube.
    pub fn reduced_discriminant(&self) -> Result<Scalar, CubeError> {
        if !self.is_reduced() {
            return Err(CubeError::NotReduced);
        }
        let base = self.algebra().base();
        Ok(&(&self.b * &self.b) + &(&base.int(4) * &self.f.norm()))
    }

    pub fn scale(&self, c: &Scalar) -> Cube {
        Cube {
            a: &self.a * c,
            e: self.e.scale(c),
            f: self.f.scale(c),
            b: &self.b * c,
        }
    }

    /// Coordinates in the order (a, e₁, e₂, e₃, f₁, f₂, f₃, b).
    pub fn coords(&self) -> Vec<Scalar> {
        let mut v = vec![self.a.clone()];
        v.extend(self.e.coords().iter().cloned());
        v.extend(self.f.coords().iter().cloned());
        v.push(self.b.clone());
        v
    }

    pub fn from_coords(e: &EtaleAlgebra, c: &[Scalar]) -> Result<Cube, CubeError> {
        if c.len() != 8 {
            return Err(FieldError::Malformed(format!("a cube has 8 coordinates, got {}", c.len())).into());
        }
        Ok(Cube {
            a: c[0].clone(),
            e: e.from_flat(c[1..4].to_vec())?,
            f: e.from_flat(c[4..7].to_vec())?,
            b: c[7].clone(),
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords().iter().map(|s| s.to_string()).collect()
    }

    pub fn parse(e: &EtaleAlgebra, items: &[String]) -> Result<Cube, CubeError> {
        let b = e.base();
        let c = items
            .iter()
            .map(|s| b.parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        Cube::from_coords(e, &c)
    }
}

impl GroupElem {
    pub fn det(&self) -> Elem {
        &(&self.p * &self.s) - &(&self.q * &self.r)
    }

    pub fn identity(e: &EtaleAlgebra) -> Self {
        GroupElem {
            p: e.one(),
            q: e.zero(),
            r: e.zero(),
            s: e.one(),
        }
    }

    pub fn lower(s: &Elem) -> Self {
        let e = s.parent();
        GroupElem {
            p: e.one(),
            q: e.zero(),
            r: s.clone(),
            s: e.one(),
        }
    }

    pub fn upper(s: &Elem) -> Self {
        let e = s.parent();
        GroupElem {
            p: e.one(),
            q: s.clone(),
            r: e.zero(),
            s: e.one(),
        }
    }

    pub fn diag(t1: &Elem, t2: &Elem) -> Self {
        let e = t1.parent();
        GroupElem {
            p: t1.clone(),
            q: e.zero(),
            r: e.zero(),
            s: t2.clone(),
        }
    }

    pub fn w(e: &EtaleAlgebra) -> Self {
        GroupElem {
            p: e.zero(),
            q: e.one(),
            r: e.one(),
            s: e.zero(),
        }
    }

    pub fn mul(&self, o: &GroupElem) -> GroupElem {
        GroupElem {
            p: &(&self.p * &o.p) + &(&self.q * &o.r),
            q: &(&self.p * &o.q) + &(&self.q * &o.s),
            r: &(&self.r * &o.p) + &(&self.s * &o.r),
            s: &(&self.r * &o.q) + &(&self.s * &o.s),
        }
    }

    /// From three F-matrices (E = F³).
    pub fn from_split(e: &EtaleAlgebra, g: &[MatF; 3]) -> Result<Self, CubeError> {
        if e.num_factors() != 3 {
            return Err(CubeError::NeedsSplit);
        }
        let pick = |k: usize| e.from_flat((0..3).map(|j| g[j][k].clone()).collect());
        Ok(GroupElem {
            p: pick(0)?,
            q: pick(1)?,
            r: pick(2)?,
            s: pick(3)?,
        })
    }

    /// ᵗg⁻¹ applied to a column (x, y) ∈ E².
    pub fn transpose_inverse_apply(&self, x: &Elem, y: &Elem) -> Result<(Elem, Elem), CubeError> {
        let dinv = self.det().inv()?;
        Ok((
            &dinv * &(&(&self.s * x) - &(&self.r * y)),
            &dinv * &(&(&self.p * y) - &(&self.q * x)),
        ))
    }
}

fn det_scalar(g: &GroupElem) -> Result<Scalar, CubeError> {
    let d = g.det();
    match d.as_scalar() {
        Some(s) if !s.is_zero() => Ok(s),
        _ => Err(CubeError::DetMismatch),
    }
}

/// [[1, 0], [s, 1]]·Σ.
fn act_lower(s: &Elem, c: &Cube) -> Cube {
    let sh = s.sharp_unchecked();
    let e = &c.e + &s.scale(&c.a);
    let f = &(&c.f + &s.cross(&c.e).expect("rank 3")) + &sh.scale(&c.a);
    let b = &(&(&c.b + &(s * &c.f).trace()) + &(&sh * &c.e).trace()) + &(&s.norm() * &c.a);
    Cube {
        a: c.a.clone(),
        e,
        f,
        b,
    }
}

/// w·Σ = -(b, f, e, a).
fn act_w(c: &Cube) -> Cube {
    Cube {
        a: -&c.b,
        e: -&c.f,
        f: -&c.e,
        b: -&c.a,
    }
}

/// diag(t₁, t₂)·Σ with t₁t₂ = δ ∈ F^×.
fn act_diag(t1: &Elem, t2: &Elem, c: &Cube) -> Result<Cube, CubeError> {
    let d = det_scalar(&GroupElem::diag(t1, t2))?;
    let dinv = d.inv().expect("nonzero");
    Ok(Cube {
        a: &(&t1.norm() * &c.a) * &dinv,
        e: (&(&t1.sharp_unchecked() * t2) * &c.e).scale(&dinv),
        f: (&(t1 * &t2.sharp_unchecked()) * &c.f).scale(&dinv),
        b: &(&t2.norm() * &c.b) * &dinv,
    })
}

/// g·Σ for g ∈ GL₂(E)^det, through g = lower(r/p)·diag(p, δ/p)·upper(q/p)
/// after moving a unit into the corner.
pub fn act(g: &GroupElem, c: &Cube) -> Result<Cube, CubeError> {
    let d = det_scalar(g)?;
    let e = c.algebra();
    if g.p.is_unit() {
        let pinv = g.p.inv()?;
        let c1 = act_lower(&(&g.q * &pinv), &act_w(c));
        let c1 = act_w(&c1);
        let c2 = act_diag(&g.p, &pinv.scale(&d), &c1)?;
        return Ok(act_lower(&(&g.r * &pinv), &c2));
    }
    if g.q.is_unit() {
        // g = (g·w)·w
        let gw = g.mul(&GroupElem::w(e));
        return act(&gw, &act_w(c));
    }
    // left-multiply by an upper unipotent to make p a unit
    let b = e.base();
    for k in 0..3 {
        for t in 1..4 {
            let mut v = vec![b.zero(); 3];
            v[k] = b.int(t);
            let tt = e.from_flat(v)?;
            for tt in [tt.clone(), &e.one() + &tt] {
                let ug = GroupElem::upper(&tt).mul(g);
                if ug.p.is_unit() {
                    let c1 = act(&ug, c)?;
                    return act(&GroupElem::upper(&-&tt), &c1);
                }
            }
        }
    }
    Err(CubeError::DetMismatch)
}

/// The tensor action on F² ⊗ F² ⊗ F² twisted by det⁻¹ (E = F³).
pub fn split_action(g: &[MatF; 3], c: &Cube) -> Result<Cube, CubeError> {
    let e = c.algebra();
    if e.num_factors() != 3 {
        return Err(CubeError::NeedsSplit);
    }
    let det = |m: &MatF| &(&m[0] * &m[3]) - &(&m[1] * &m[2]);
    let d = det(&g[0]);
    if d.is_zero() || det(&g[1]) != d || det(&g[2]) != d {
        return Err(CubeError::DetMismatch);
    }
    let t = to_tensor(c);
    let mut out: [Scalar; 8] = std::array::from_fn(|_| e.base().zero());
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut acc = e.base().zero();
        for (jdx, tv) in t.iter().enumerate() {
            if tv.is_zero() {
                continue;
            }
            let mut w = tv.clone();
            for (axis, m) in g.iter().enumerate() {
                let i = (idx >> axis) & 1;
                let j = (jdx >> axis) & 1;
                w = &w * &m[2 * i + j];
            }
            acc = &acc + &w;
        }
        *slot = &acc * &d.inv().expect("nonzero");
    }
    Ok(from_tensor(e, &out))
}

/// Tensor entries indexed by bit j = index on axis j.
pub fn to_tensor(c: &Cube) -> [Scalar; 8] {
    let base = c.algebra().base();
    let mut t: [Scalar; 8] = std::array::from_fn(|_| base.zero());
    t[0] = c.a.clone();
    t[7] = c.b.clone();
    for j in 0..3 {
        t[1 << j] = c.e.coords()[j].clone();
        t[7 ^ (1 << j)] = c.f.coords()[j].clone();
    }
    t
}

pub fn from_tensor(e: &EtaleAlgebra, t: &[Scalar; 8]) -> Cube {
    Cube {
        a: t[0].clone(),
        e: e.from_flat((0..3).map(|j| t[1 << j].clone()).collect()).expect("rank 3"),
        f: e.from_flat((0..3).map(|j| t[7 ^ (1 << j)].clone()).collect()).expect("rank 3"),
        b: t[7].clone(),
    }
}

/// Whether g fixes Σ, and whether ᵗg⁻¹ preserves (Q_Σ, β_Σ); the two agree
/// for nondegenerate reduced Σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerCheck {
    pub stabilizes: bool,
    pub preserves: bool,
}

pub fn stabilizer_correspondence_check(g: &GroupElem, c: &Cube) -> Result<StabilizerCheck, CubeError> {
    let alg = algebra_of_reduced(c)?;
    let stabilizes = act(g, c)? == *c;
    let mut preserves = true;
    for (x, y) in polarization_points(c.algebra()) {
        let v = (x.clone(), y.clone());
        let (gx, gy) = g.transpose_inverse_apply(&x, &y)?;
        let gv = (gx, gy);
        if alg.q(&gv) != alg.q(&v) {
            preserves = false;
            break;
        }
        let bv = alg.beta(&v);
        let (bx, by) = g.transpose_inverse_apply(&bv.0, &bv.1)?;
        if alg.beta(&gv) != (bx, by) {
            preserves = false;
            break;
        }
    }
    Ok(StabilizerCheck {
        stabilizes,
        preserves,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: u8,
    /// An orbit representative: the reduced form when a ≠ 0 can be reached.
    pub normal_form: Cube,
    /// g with g·Σ = normal_form.
    pub transform: GroupElem,
}

/// Rank 0-4 of a cube, by moving it to a reduced form (1, 0, f, b) and
/// reading off Δ = b² + 4N(f), f and f^#.
pub fn degenerate_rank(c: &Cube) -> Result<RankReport, CubeError> {
    let e = c.algebra().clone();
    let base = e.base();
    if c.is_zero() {
        return Ok(RankReport {
            rank: 0,
            normal_form: c.clone(),
            transform: GroupElem::identity(&e),
        });
    }
    // make a ≠ 0
    let mut g = GroupElem::identity(&e);
    let mut cur = c.clone();
    if cur.a.is_zero() {
        let w = GroupElem::w(&e);
        let cw = act(&w, &cur)?;
        if !cw.a.is_zero() {
            g = w;
            cur = cw;
        } else {
            let mut found = false;
            'search: for s in small_elements(&e) {
                let u = GroupElem::upper(&s);
                let cu = act(&u, &cur)?;
                if !cu.a.is_zero() {
                    g = u;
                    cur = cu;
                    found = true;
                    break 'search;
                }
            }
            if !found {
                return Err(CubeError::Undecided);
            }
        }
    }
    // clear e, then scale a to 1
    let ainv = cur.a.inv().expect("nonzero");
    let l = GroupElem::lower(&(-&cur.e).scale(&ainv));
    cur = act(&l, &cur)?;
    g = l.mul(&g);
    let sc = GroupElem::diag(&e.scalar(&ainv), &e.scalar(&ainv));
    cur = act(&sc, &cur)?;
    g = sc.mul(&g);
    debug_assert!(cur.is_reduced());
    let disc = cur.reduced_discriminant()?;
    let rank = if !disc.is_zero() {
        4
    } else if cur.f.is_zero() && cur.b.is_zero() {
        1
    } else if cur.b.is_zero() && cur.f.sharp_unchecked().is_zero() {
        2
    } else {
        3
    };
    let _ = base;
    Ok(RankReport {
        rank,
        normal_form: cur,
        transform: g,
    })
}

fn small_elements(e: &EtaleAlgebra) -> Vec<Elem> {
    let b = e.base();
    let mut out = vec![];
    for c0 in 0..3i64 {
        for c1 in 0..3i64 {
            for c2 in 0..3i64 {
                if c0 + c1 + c2 > 0 {
                    out.push(e.from_flat(vec![b.int(c0), b.int(c1), b.int(c2)]).expect("rank 3"));
                }
            }
        }
    }
    out
}

/// (0, 0, e, 0) ~ (0, 0, f, 0) iff e/f ∈ F^×E^{×2}.
pub fn rank3_same_orbit(e: &Elem, f: &Elem, bound: u32) -> Result<Verdict<()>, CubeError> {
    let ratio = e * &f.inv()?;
    Ok(match class_test(&ratio, Subgroup::BaseTimesSquares, None, bound) {
        Verdict::Yes(_) => Verdict::Yes(None),
        Verdict::No(s) => Verdict::No(s),
        Verdict::Unknown => Verdict::Unknown,
    })
}

/// (1, 0, e, 0) ~ (1, 0, f, 0) (e^# = f^# = 0) iff e/f ∈ F^{×2}.
pub fn rank2_same_orbit(e: &Elem, f: &Elem) -> Result<bool, CubeError> {
    let base: BaseField = e.parent().base();
    // e and f are supported on the same single factor when comparable
    let i = (0..e.parent().num_factors()).find(|&i| !e.factor_is_zero(i));
    let j = (0..f.parent().num_factors()).find(|&i| !f.factor_is_zero(i));
    match (i, j) {
        (Some(i), Some(j)) if i == j => {
            let ei = e.factor(i);
            let fi = f.factor(i);
            if ei.len() != 1 {
                return Ok(false);
            }
            let r = &ei[0] * &fi[0].inv().ok_or(CubeError::Degenerate)?;
            Ok(base.is_square(&r))
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::CubicKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_gl_det(b: BaseField, rng: &mut ChaCha8Rng) -> [MatF; 3] {
        let q = b.order().unwrap() as u32;
        loop {
            let m0: MatF = std::array::from_fn(|_| b.from_index(rng.gen_range(0..q)));
            let d = &(&m0[0] * &m0[3]) - &(&m0[1] * &m0[2]);
            if d.is_zero() {
                continue;
            }
            let mut g = [m0.clone(), m0.clone(), m0];
            for slot in g.iter_mut().skip(1) {
                loop {
                    let m: MatF = std::array::from_fn(|_| b.from_index(rng.gen_range(0..q)));
                    if &(&m[0] * &m[3]) - &(&m[1] * &m[2]) == d {
                        *slot = m;
                        break;
                    }
                }
            }
            return g;
        }
    }

    #[test]
    fn bruhat_formulas_match_tensor_action() {
        let b = BaseField::finite(7).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = random_gl_det(b, &mut rng);
            let c = Cube {
                a: b.random(&mut rng),
                e: e.random(&mut rng),
                f: e.random(&mut rng),
                b: b.random(&mut rng),
            };
            let ge = GroupElem::from_split(&e, &g).unwrap();
            assert_eq!(act(&ge, &c).unwrap(), split_action(&g, &c).unwrap());
        }
    }

    #[test]
    fn action_is_a_group_action() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rand_g = |rng: &mut ChaCha8Rng| loop {
            let g = GroupElem {
                p: e.random(rng),
                q: e.random(rng),
                r: e.random(rng),
                s: e.random(rng),
            };
            if g.det().as_scalar().is_some_and(|d| !d.is_zero()) {
                return g;
            }
        };
        for _ in 0..50 {
            let (g, h) = (rand_g(&mut rng), rand_g(&mut rng));
            let c = Cube {
                a: b.random(&mut rng),
                e: e.random(&mut rng),
                f: e.random(&mut rng),
                b: b.random(&mut rng),
            };
            assert_eq!(act(&g.mul(&h), &c).unwrap(), act(&g, &act(&h, &c).unwrap()).unwrap());
        }
        assert_eq!(act(&GroupElem::identity(&e), &Cube::distinguished(&e)).unwrap(), Cube::distinguished(&e));
    }

    #[test]
    fn distinguished_cube_stabilizers() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        let v = Cube::distinguished(&e);
        for alpha in e.units().unwrap().into_iter().filter(|a| a.norm().is_one()) {
            let g = GroupElem::diag(&alpha, &alpha.inv().unwrap());
            assert_eq!(act(&g, &v).unwrap(), v);
        }
        assert_eq!(act(&GroupElem::w(&e), &v).unwrap(), v);
    }

    #[test]
    fn split_action_rejects_unequal_dets() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::split(b, 3);
        let id: MatF = [b.one(), b.zero(), b.zero(), b.one()];
        let two: MatF = [b.int(2), b.zero(), b.zero(), b.one()];
        let r = split_action(&[id.clone(), id, two], &Cube::distinguished(&e));
        assert_eq!(r.unwrap_err(), CubeError::DetMismatch);
    }

    #[test]
    fn ranks_of_normal_forms() {
        let q = BaseField::Rationals;
        let e = EtaleAlgebra::split(q, 3);
        let rank = |c: &Cube| degenerate_rank(c).unwrap().rank;
        assert_eq!(rank(&Cube::zero(&e)), 0);
        let mut c = Cube::zero(&e);
        c.f = e.from_ints(&[2, 3, 5]);
        assert_eq!(rank(&c), 3);
        let mut c2 = Cube::zero(&e);
        c2.a = q.one();
        c2.f = e.from_ints(&[1, 0, 0]);
        assert_eq!(rank(&c2), 2);
        c2.f = e.zero();
        assert_eq!(rank(&c2), 1);
        assert_eq!(rank(&Cube::reduced(&e.from_ints(&[1, 2, 3]), &q.int(1))), 4);
        let field = EtaleAlgebra::cubic_field(q, vec![q.int(-2), q.int(0), q.int(0), q.int(1)]).unwrap();
        let mut c3 = Cube::zero(&field);
        c3.f = field.from_ints(&[1, 1, 0]);
        assert_eq!(rank(&c3), 3);
    }

    #[test]
    fn field_algebras_have_no_rank_two_cubes() {
        let b = BaseField::finite(5).unwrap();
        let e = EtaleAlgebra::finite_cubic(b, CubicKind::Field).unwrap();
        for f in e.elements().unwrap() {
            let r = degenerate_rank(&Cube::reduced(&f, &b.zero())).unwrap().rank;
            assert_ne!(r, 2);
        }
    }
}
