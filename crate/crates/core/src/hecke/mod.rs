//! Affine Hecke algebras with unequal parameters for the quasi-split D4 cases,
//! their small modules, exponents and degenerate principal series.

pub mod affine;
pub mod catalog;
pub mod dps;
pub mod expr;
pub mod qz;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

pub use affine::{AffineWeyl, Exponent, Lattice, Vect};
pub use catalog::Catalog;
pub use dps::{dps_exponent_list, dps_reducibility, equivalence_classes, DpsReport, Family, SParam};
pub use qz::{Mat, Qz, Q};

use crate::error::HeckeError;
use affine::{dot, fmt_vec, weyl_group};
use qz::{int, poly_deflate, poly_eval, rank};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub omega: Vect,
    pub word: Vec<usize>,
}

/// The q-independent data of one case: Coxeter presentation and apartment.
#[derive(Debug)]
pub struct Presentation {
    pub case: String,
    pub generators: Vec<String>,
    pub ell: Vec<u32>,
    pub braid: Vec<Vec<u32>>,
    pub braid_inferred: bool,
    pub affine: AffineWeyl,
    pub lattice: Lattice,
    pub fundamental: Vec<Vect>,
    pub translations: Vec<Translation>,
    pub bullet_coroots: Vec<Vect>,
    /// Blocking values (re, tor) of μ(α_i^∨) per simple root.
    pub bullet_blocks: Vec<Vec<(Q, Q)>>,
    weyl: OnceLock<Vec<Vec<Vect>>>,
}

impl Presentation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        case: String,
        generators: Vec<String>,
        ell: Vec<u32>,
        braid: Vec<Vec<u32>>,
        braid_inferred: bool,
        affine: AffineWeyl,
        lattice: Lattice,
        fundamental: Vec<Vect>,
        translations: Vec<Translation>,
        bullet_coroots: Vec<Vect>,
        bullet_blocks: Vec<Vec<(Q, Q)>>,
    ) -> Self {
        Presentation {
            case,
            generators,
            ell,
            braid,
            braid_inferred,
            affine,
            lattice,
            fundamental,
            translations,
            bullet_coroots,
            bullet_blocks,
            weyl: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn simple_roots(&self) -> &[Vect] {
        &self.affine.roots[1..]
    }

    /// The finite Weyl group, as matrices.
    pub fn weyl(&self) -> &[Vec<Vect>] {
        self.weyl.get_or_init(|| weyl_group(self.simple_roots()))
    }

    /// ℓ(w) = Σ ℓ_i over the letters.
    pub fn word_length(&self, word: &[usize]) -> u32 {
        word.iter().map(|&i| self.ell[i]).sum()
    }

    pub fn word_for(&self, omega: &[Q]) -> Option<&[usize]> {
        self.translations
            .iter()
            .find(|t| t.omega == omega)
            .map(|t| t.word.as_slice())
    }

    /// Basis of X* dual to the lattice basis.
    pub fn dual_basis(&self) -> Vec<Vect> {
        let r = self.lattice.rank();
        (0..r)
            .map(|i| {
                let e: Vect = (0..r).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
                self.lattice.from_pairings(&e)
            })
            .collect()
    }
}

/// Generator matrices at a fixed specialization q = sq².
#[derive(Clone, Debug)]
pub struct HeckeModule {
    pub presentation: Arc<Presentation>,
    pub name: String,
    pub sq: Q,
    pub matrices: Vec<Mat>,
}

impl HeckeModule {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.n)
    }

    pub fn q(&self) -> Q {
        &self.sq * &self.sq
    }

    /// q^{ℓ_i}.
    pub fn parameter(&self, i: usize) -> Qz {
        Qz::from_q(num_traits::pow(self.q(), self.presentation.ell[i] as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationFailure {
    Quadratic { generator: usize },
    Braid { i: usize, j: usize, order: u32 },
}

impl fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationFailure::Quadratic { generator } => write!(f, "quadratic relation fails for T{generator}"),
            RelationFailure::Braid { i, j, order } => {
                write!(f, "braid relation of order {order} fails for (T{i}, T{j})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub quadratic_checked: usize,
    pub braid_checked: usize,
    pub failure: Option<RelationFailure>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn alternating(ms: &[Mat], i: usize, j: usize, len: u32) -> Mat {
    let mut out = Mat::identity(ms[i].n);
    for k in 0..len {
        out = out.mul(if k % 2 == 0 { &ms[i] } else { &ms[j] });
    }
    out
}

/// Checks (T_i − q^{ℓ_i})(T_i + 1) = 0 and the braid relations, stopping at the first failure.
pub fn verify_relations(m: &HeckeModule) -> RelationReport {
    let n = m.dim();
    let r = m.matrices.len();
    let mut rep = RelationReport { quadratic_checked: 0, braid_checked: 0, failure: None };
    for i in 0..r {
        let t = &m.matrices[i];
        let a = t.sub(&Mat::scalar(n, m.parameter(i)));
        let b = t.add(&Mat::identity(n));
        rep.quadratic_checked += 1;
        if !a.mul(&b).is_zero() {
            rep.failure = Some(RelationFailure::Quadratic { generator: i });
            return rep;
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            let order = m.presentation.braid[i][j];
            rep.braid_checked += 1;
            if alternating(&m.matrices, i, j, order) != alternating(&m.matrices, j, i, order) {
                rep.failure = Some(RelationFailure::Braid { i, j, order });
                return rep;
            }
        }
    }
    rep
}

/// q^{−ℓ(w)/2}·T_{w₁}⋯T_{w_k}.
pub fn hat_t_word(m: &HeckeModule, word: &[usize]) -> Mat {
    let prod = word.iter().fold(Mat::identity(m.dim()), |acc, &i| acc.mul(&m.matrices[i]));
    let l = m.presentation.word_length(word) as i64;
    let scale = Qz::from_q(m.sq.clone()).pow(-l).expect("sq is nonzero");
    prod.scale(&scale)
}

/// T̂_ω = q^{−ℓ/2}·T_w for the cataloged word of t_ω, extended to the dominant
/// span of the lattice basis by the semigroup law.
pub fn hat_t(m: &HeckeModule, omega: &[Q]) -> Result<Mat, HeckeError> {
    let p = &m.presentation;
    if let Some(w) = p.word_for(omega) {
        return Ok(hat_t_word(m, w));
    }
    let coords = p
        .lattice
        .dominant_coords(omega)
        .ok_or_else(|| HeckeError::WordMissing(fmt_vec(omega)))?;
    let mut out = Mat::identity(m.dim());
    for (c, b) in coords.iter().zip(&p.lattice.basis) {
        let w = p.word_for(b).ok_or_else(|| HeckeError::WordMissing(fmt_vec(b)))?;
        out = out.mul(&hat_t_word(m, w).pow(*c));
    }
    Ok(out)
}

/// A decoded eigenvalue ζ₆^k·sq^n.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Eigen {
    value: Qz,
    n: i64,
    k: u32,
}

fn fmt_poly(p: &[Qz]) -> String {
    p.iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("({c})x^{i}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Smallest n with q^n above the squared Cauchy bound of the roots of p.
fn exponent_bound(p: &[Qz], q: &Q) -> i64 {
    let lead = p.last().expect("nonempty");
    let inv = lead.inv().expect("nonzero leading coefficient");
    let nmax = p[..p.len() - 1]
        .iter()
        .map(|c| (c * &inv).norm())
        .fold(Q::zero(), |a, b| if b > a { b } else { a });
    // |root|² ≤ 2(1 + max|c|²)
    let cap = int(2) * (Q::one() + nmax);
    let mut n = 0;
    let mut qn = Q::one();
    while qn <= cap {
        qn *= q;
        n += 1;
    }
    n
}

/// Roots of the characteristic polynomial, all of the form ζ₆^k·sq^n.
fn decode_roots(mut p: Vec<Qz>, sq: &Q) -> Result<Vec<Eigen>, HeckeError> {
    let q = sq * sq;
    let mut out: Vec<Eigen> = vec![];
    while p.len() > 1 {
        if p[0].is_zero() {
            return Err(HeckeError::UndecodableEigenvalue("0".into()));
        }
        let up = exponent_bound(&p, &q);
        let rev: Vec<Qz> = p.iter().rev().cloned().collect();
        let down = exponent_bound(&rev, &q);
        let found = (-down..=up).find_map(|n| {
            let base = Qz::from_q(sq.clone()).pow(n).expect("sq is nonzero");
            (0..6).find_map(|k| {
                let v = &base * &Qz::zeta6(k);
                poly_eval(&p, &v).is_zero().then_some(Eigen { value: v, n, k })
            })
        });
        let Some(e) = found else {
            return Err(HeckeError::UndecodableEigenvalue(format!("root of {}", fmt_poly(&p))));
        };
        p = poly_deflate(&p, &e.value);
        if !out.contains(&e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Joint generalized eigenspaces of commuting matrices, as (eigenvalue tuple, dimension).
fn joint_spectrum(ms: &[Mat], eig: &[Vec<Eigen>]) -> Vec<(Vec<usize>, usize)> {
    let n = ms[0].n;
    let powers: Vec<Vec<Vec<Vec<Qz>>>> = ms
        .iter()
        .zip(eig)
        .map(|(m, es)| {
            es.iter()
                .map(|e| m.sub(&Mat::scalar(n, e.value.clone())).pow(n as u32).rows())
                .collect()
        })
        .collect();
    let mut out = vec![];
    let mut stack: Vec<(Vec<usize>, Vec<Vec<Qz>>)> = vec![(vec![], vec![])];
    while let Some((idx, rows)) = stack.pop() {
        let nullity = n - rank(rows.clone());
        if nullity == 0 {
            continue;
        }
        if idx.len() == ms.len() {
            out.push((idx, nullity));
            continue;
        }
        let i = idx.len();
        for (j, pw) in powers[i].iter().enumerate() {
            let mut idx2 = idx.clone();
            idx2.push(j);
            let mut rows2 = rows.clone();
            rows2.extend(pw.iter().cloned());
            stack.push((idx2, rows2));
        }
    }
    out
}

/// Simultaneous generalized eigenvalues of the T̂_ω over the lattice basis,
/// decoded into exponents and sorted.
pub fn exponents(m: &HeckeModule) -> Result<Vec<Exponent>, HeckeError> {
    let p = &m.presentation;
    let ms: Vec<Mat> = p
        .lattice
        .basis
        .iter()
        .map(|b| hat_t(m, b))
        .collect::<Result<_, _>>()?;
    let eig: Vec<Vec<Eigen>> = ms
        .iter()
        .map(|a| decode_roots(a.char_poly(), &m.sq))
        .collect::<Result<_, _>>()?;
    let mut out = vec![];
    for (idx, mult) in joint_spectrum(&ms, &eig) {
        let re: Vect = idx.iter().zip(&eig).map(|(&j, es)| Q::new(es[j].n.into(), 2.into())).collect();
        let tor: Vect = idx.iter().zip(&eig).map(|(&j, es)| Q::new(es[j].k.into(), 6.into())).collect();
        let e = Exponent::new(p.lattice.from_pairings(&re), p.lattice.from_pairings(&tor), &p.lattice);
        out.extend(std::iter::repeat(e).take(mult));
    }
    out.sort();
    Ok(out)
}

/// T_i ↦ −q^{ℓ_i}·T_i⁻¹.
pub fn im_involute(m: &HeckeModule) -> HeckeModule {
    let matrices = m
        .matrices
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let inv = t.inverse().expect("generators are invertible");
            inv.scale(&-&m.parameter(i))
        })
        .collect();
    HeckeModule {
        presentation: m.presentation.clone(),
        name: format!("im({})", m.name),
        sq: m.sq.clone(),
        matrices,
    }
}

/// Re μ(ϖ) < 0 for every exponent μ and every fundamental ϖ.
pub fn is_discrete_series_exps(p: &Presentation, exps: &[Exponent]) -> bool {
    exps.iter()
        .all(|e| p.fundamental.iter().all(|w| dot(&e.re, w).is_negative()))
}

pub fn is_discrete_series(m: &HeckeModule) -> Result<bool, HeckeError> {
    Ok(is_discrete_series_exps(&m.presentation, &exponents(m)?))
}

/// Exponents with signs reversed, re-sorted.
pub fn negate_all(p: &Presentation, exps: &[Exponent]) -> Vec<Exponent> {
    let mut out: Vec<Exponent> = exps.iter().map(|e| e.neg(&p.lattice)).collect();
    out.sort();
    out
}

/// Parses a perfect-square q (for example "4" or "9/4") into √q.
pub fn sqrt_q(q: &Q) -> Option<Q> {
    if q <= &Q::one() {
        return None;
    }
    let rt = |n: &num_bigint::BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Q::new(rt(q.numer())?, rt(q.denom())?))
}
