//! Dense univariate polynomials over a base field, coefficients low to high.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::{BaseField, Scalar};

pub type Poly = Vec<Scalar>;

pub fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Scalar]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn mul(f: &BaseField, a: &[Scalar], b: &[Scalar]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] = &r[i + j] + &(x * y);
        }
    }
    trim(&mut r);
    r
}

/// Remainder modulo a monic polynomial.
pub fn rem_monic(a: &[Scalar], m: &[Scalar]) -> Poly {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = r[r.len() - 1].clone();
        let shift = r.len() - 1 - dm;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&c * mi);
        }
        r.pop();
        trim(&mut r);
    }
    r
}

pub fn eval(p: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = x.zero_like();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Discriminant of a monic polynomial of degree 1, 2 or 3.
pub fn discriminant(f: &BaseField, p: &[Scalar]) -> Option<Scalar> {
    match p.len() {
        2 => Some(f.one()),
        3 => {
            let (c, b) = (&p[0], &p[1]);
            Some(&(b * b) - &(&f.int(4) * c))
        }
        4 => {
            let (c, b, a) = (&p[0], &p[1], &p[2]);
            let ab = a * b;
            let t1 = &ab * &ab;
            let t2 = &f.int(4) * &(&(b * b) * b);
            let t3 = &f.int(4) * &(&(&(a * a) * a) * c);
            let t4 = &f.int(27) * &(c * c);
            let t5 = &f.int(18) * &(&ab * c);
            Some(&(&(&(&t1 - &t2) - &t3) - &t4) + &t5)
        }
        _ => None,
    }
}

/// Roots in the base field (finite: exhaustive; Q: rational root theorem).
pub fn roots(f: &BaseField, p: &[Scalar]) -> Vec<Scalar> {
    match f {
        BaseField::Finite(_) => f
            .elements()
            .expect("finite")
            .into_iter()
            .filter(|x| eval(p, x).is_zero())
            .collect(),
        BaseField::Rationals => rational_roots(p),
    }
}

fn rational_roots(p: &[Scalar]) -> Vec<Scalar> {
    let coeffs: Vec<BigRational> = p
        .iter()
        .map(|c| c.as_rational().expect("rational").clone())
        .collect();
    let mut l = BigInt::one();
    for c in &coeffs {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let mut out = vec![];
    let zero = BigInt::zero();
    let mut low = 0;
    while low < ints.len() && ints[low] == zero {
        low += 1;
    }
    if low > 0 {
        out.push(Scalar::Q(BigRational::zero()));
    }
    if low >= ints.len() - 1 {
        return out;
    }
    let a0 = ints[low].abs();
    let an = ints[ints.len() - 1].abs();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let mut d = vec![];
        let mut i = BigInt::one();
        let lim = BigInt::from(100_000);
        while &i * &i <= *n && i <= lim {
            if (n % &i).is_zero() {
                d.push(i.clone());
                d.push(n / &i);
            }
            i += 1;
        }
        d
    };
    let mut seen = std::collections::HashSet::new();
    for num in divisors(&a0) {
        for den in divisors(&an) {
            for s in [1, -1] {
                let r = BigRational::new(&num * s, den.clone());
                if !seen.insert(r.clone()) {
                    continue;
                }
                let x = Scalar::Q(r);
                if eval(p, &x).is_zero() {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Irreducibility for degree at most 3 (no roots), degree 1 trivially.
pub fn is_irreducible_small(f: &BaseField, p: &[Scalar]) -> Option<bool> {
    match p.len() - 1 {
        0 => Some(false),
        1 => Some(true),
        2 | 3 => Some(roots(f, p).is_empty()),
        _ => None,
    }
}

/// Determinant by Gaussian elimination.
pub fn det(f: &BaseField, m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut d = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return f.zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let pinv = a[col][col].inv().expect("nonzero pivot");
        d = &d * &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &pinv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    d
}

/// Solves `m x = b`; `None` if singular.
pub fn solve(f: &BaseField, m: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let pinv = a[col][col].inv()?;
        for c in col..=n {
            a[col][c] = &a[col][c] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..=n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    let _ = f;
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_discriminant() {
        let q = BaseField::Rationals;
        let p = vec![q.int(-2), q.int(0), q.int(0), q.int(1)];
        assert_eq!(discriminant(&q, &p), Some(q.int(-108)));
    }

    #[test]
    fn rational_roots_found() {
        let q = BaseField::Rationals;
        // (x - 1/2)(x + 3)(x) = x^3 + 5/2 x^2 - 3/2 x
        let p = vec![q.int(0), q.ratio(-3, 2), q.ratio(5, 2), q.int(1)];
        let mut r: Vec<String> = roots(&q, &p).iter().map(|s| s.to_string()).collect();
        r.sort();
        assert_eq!(r, vec!["-3", "0", "1/2"]);
        assert_eq!(is_irreducible_small(&q, &[q.int(-2), q.int(0), q.int(0), q.int(1)]), Some(true));
    }

    #[test]
    fn det_and_solve() {
        let f = BaseField::finite(7).unwrap();
        let m = vec![
            vec![f.int(1), f.int(2)],
            vec![f.int(3), f.int(4)],
        ];
        assert_eq!(det(&f, &m), f.int(-2));
        let x = solve(&f, &m, &[f.int(1), f.int(0)]).unwrap();
        assert_eq!(&(&f.int(1) * &x[0]) + &(&f.int(2) * &x[1]), f.int(1));
    }
}
