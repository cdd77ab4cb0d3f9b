//! Exact arithmetic in Q(ζ₃) and small dense matrices over it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// a + bζ with ζ² + ζ + 1 = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qz {
    pub a: Q,
    pub b: Q,
}

impl Qz {
    pub fn zero() -> Self {
        Qz { a: Q::zero(), b: Q::zero() }
    }

    pub fn one() -> Self {
        Qz::from_q(Q::one())
    }

    pub fn zeta() -> Self {
        Qz { a: Q::zero(), b: Q::one() }
    }

    pub fn from_q(a: Q) -> Self {
        Qz { a, b: Q::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Qz::from_q(int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// ζ ↦ ζ².
    pub fn conj(&self) -> Self {
        Qz { a: &self.a - &self.b, b: -&self.b }
    }

    /// |x|² = a² - ab + b².
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(Qz { a: c.a / &n, b: c.b / n })
    }

    pub fn scale(&self, c: &Q) -> Self {
        Qz { a: &self.a * c, b: &self.b * c }
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = Qz::one();
        for _ in 0..e.unsigned_abs() {
            r = &r * &base;
        }
        Some(r)
    }

    /// ζ₆^k = (-ζ₃²)^k.
    pub fn zeta6(k: u32) -> Self {
        let z6 = Qz { a: Q::one(), b: Q::one() }; // -ζ² = 1 + ζ
        let mut r = Qz::one();
        for _ in 0..k % 6 {
            r = &r * &z6;
        }
        r
    }
}

impl<'a> Add<&'a Qz> for &'a Qz {
    type Output = Qz;
    fn add(self, o: &Qz) -> Qz {
        Qz { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a Qz> for &'a Qz {
    type Output = Qz;
    fn sub(self, o: &Qz) -> Qz {
        Qz { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a Qz> for &'a Qz {
    type Output = Qz;
    fn mul(self, o: &Qz) -> Qz {
        let bd = &self.b * &o.b;
        Qz {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - bd,
        }
    }
}

impl Neg for &Qz {
    type Output = Qz;
    fn neg(self) -> Qz {
        Qz { a: -&self.a, b: -&self.b }
    }
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.a)),
            (true, false) => write!(f, "{}z", fmt_q(&self.b)),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}z", fmt_q(&self.a), sign, fmt_q(&self.b.abs()))
            }
        }
    }
}

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub n: usize,
    pub e: Vec<Qz>,
}

impl Mat {
    pub fn zero(n: usize) -> Self {
        Mat { n, e: vec![Qz::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Mat::scalar(n, Qz::one())
    }

    pub fn scalar(n: usize, c: Qz) -> Self {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.e[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Qz>>) -> Self {
        let n = rows.len();
        Mat { n, e: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Qz {
        &self.e[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Qz>> {
        self.e.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a * o.get(k, j);
                    out.e[i * n + j] = &out.e[i * n + j] + &t;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Qz) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, k: u32) -> Mat {
        let mut r = Mat::identity(self.n);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Qz::is_zero)
    }

    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = Mat::identity(n).rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = &a[col][j] * &p;
                inv[col][j] = &inv[col][j] * &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let t = &f * &a[col][j];
                        a[r][j] = &a[r][j] - &t;
                        let t = &f * &inv[col][j];
                        inv[r][j] = &inv[r][j] - &t;
                    }
                }
            }
        }
        Some(Mat::from_rows(inv))
    }

    /// Coefficients c₀..cₙ of det(xI - A), lowest degree first (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Vec<Qz> {
        let n = self.n;
        let mut c = vec![Qz::zero(); n + 1];
        c[n] = Qz::one();
        let mut m = Mat::zero(n);
        for k in 1..=n {
            m = self.mul(&m).add(&Mat::scalar(n, c[n + 1 - k].clone()));
            let am = self.mul(&m);
            let mut tr = Qz::zero();
            for i in 0..n {
                tr = &tr + am.get(i, i);
            }
            c[n - k] = tr.scale(&(-Q::one() / int(k as i64)));
        }
        c
    }
}

/// Rank of a stacked list of rows.
pub fn rank(mut rows: Vec<Vec<Qz>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let p = rows[r][col].inv().expect("nonzero pivot");
        for i in r + 1..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let f = &rows[i][col] * &p;
            for j in col..cols {
                let t = &f * &rows[r][j];
                rows[i][j] = &rows[i][j] - &t;
            }
        }
        r += 1;
    }
    r
}

pub fn poly_eval(p: &[Qz], x: &Qz) -> Qz {
    p.iter().rev().fold(Qz::zero(), |acc, c| &(&acc * x) + c)
}

/// p / (x - r), assuming r is a root.
pub fn poly_deflate(p: &[Qz], r: &Qz) -> Vec<Qz> {
    let n = p.len() - 1;
    let mut out = vec![Qz::zero(); n];
    let mut carry = Qz::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + &(&carry * r);
        out[i] = carry.clone();
    }
    out
}
