//! Finite fields F_q, q = p^k, with elements encoded as integers in base p.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::error::FieldError;

/// Arithmetic tables for one finite field.
///
/// Element `v` stands for the polynomial `sum c_i t^i` where `c_i` are the
/// base-`p` digits of `v`. Contexts are interned and live for the whole
/// process, so scalars can carry a `&'static` reference to them.
pub struct FqCtx {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u16>>,
}

impl fmt::Debug for FqCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for FqCtx {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}
impl Eq for FqCtx {}

const MAX_ORDER: u64 = 1 << 20;

fn registry() -> &'static Mutex<HashMap<(u32, Vec<u32>), &'static FqCtx>> {
    static REG: OnceLock<Mutex<HashMap<(u32, Vec<u32>), &'static FqCtx>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// polynomial helpers over F_p, coefficient vectors low to high
fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmod(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], p);
    while r.len() > dm {
        let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
        let shift = r.len() - 1 - dm;
        for (i, &mi) in m.iter().enumerate() {
            let t = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn pmulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let r: Vec<u32> = r.into_iter().map(|x| x as u32).collect();
    pmod(&r, m, p)
}

fn pgcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = pmod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    a = r as u32;
    a
}

/// Rabin irreducibility test for a monic polynomial over F_p.
pub fn is_irreducible_mod_p(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // x^(p^i) mod f
    let frob = |g: &[u32]| -> Vec<u32> {
        let mut r = vec![1u32];
        let mut base = g.to_vec();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                r = pmulmod(&r, &base, f, p);
            }
            base = pmulmod(&base, &base, f, p);
            e >>= 1;
        }
        r
    };
    let mut powers = Vec::with_capacity(n + 1);
    let mut cur = pmod(&[0, 1], f, p);
    powers.push(cur.clone());
    for _ in 1..=n {
        cur = frob(&cur);
        powers.push(cur.clone());
    }
    // x^(p^n) == x
    let mut diff = powers[n].clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for d in 1..n {
        if n % d != 0 || !is_prime((n / d) as u64) {
            continue;
        }
        let mut g = powers[d].clone();
        g.resize(g.len().max(2), 0);
        g[1] = (g[1] + p - 1) % p;
        let h = pgcd(f, &g, p);
        if h.len() > 1 {
            return false;
        }
    }
    true
}

impl FqCtx {
    /// Field of order p^k with a default defining polynomial.
    pub fn get(p: u32, k: u32) -> Result<&'static FqCtx, FieldError> {
        if !is_prime(p as u64) || p <= 3 {
            return Err(FieldError::BadCharacteristic(p as u64));
        }
        if k == 0 || (p as u64).pow(k) > MAX_ORDER {
            return Err(FieldError::FieldTooLarge { p, k });
        }
        let modulus = Self::default_modulus(p, k);
        Self::with_modulus(p, modulus)
    }

    /// Field F_p[t]/(m) for a monic irreducible `m` (coefficients low to high).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<&'static FqCtx, FieldError> {
        if !is_prime(p as u64) || p <= 3 {
            return Err(FieldError::BadCharacteristic(p as u64));
        }
        let modulus: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
        let k = modulus.len() as u32 - 1;
        if k == 0 || modulus[k as usize] != 1 {
            return Err(FieldError::NotMonic);
        }
        if (p as u64).pow(k) > MAX_ORDER {
            return Err(FieldError::FieldTooLarge { p, k });
        }
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(FieldError::Reducible(format!("{:?} mod {}", modulus, p)));
        }
        let mut reg = registry().lock().expect("field registry poisoned");
        if let Some(ctx) = reg.get(&(p, modulus.clone())) {
            return Ok(ctx);
        }
        let ctx: &'static FqCtx = Box::leak(Box::new(Self::build(p, modulus.clone())));
        reg.insert((p, modulus), ctx);
        Ok(ctx)
    }

    fn default_modulus(p: u32, k: u32) -> Vec<u32> {
        if k == 1 {
            return vec![0, 1];
        }
        let total = (p as u64).pow(k);
        for idx in 0..total {
            let mut m = Vec::with_capacity(k as usize + 1);
            let mut t = idx;
            for _ in 0..k {
                m.push((t % p as u64) as u32);
                t /= p as u64;
            }
            m.push(1);
            if is_irreducible_mod_p(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn build(p: u32, modulus: Vec<u32>) -> FqCtx {
        let k = modulus.len() as u32 - 1;
        let q = p.pow(k);
        let mut ctx = FqCtx {
            p,
            k,
            q,
            modulus,
            exp: vec![],
            log: vec![],
            add: None,
        };
        // find a generator of the multiplicative group
        let order = q - 1;
        let mut prime_factors = vec![];
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                prime_factors.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            prime_factors.push(n);
        }
        let mut gen = 0;
        for g in 2..q.max(3) {
            if g >= q {
                break;
            }
            if prime_factors
                .iter()
                .all(|&r| ctx.slow_pow(g, order / r) != 1)
            {
                gen = g;
                break;
            }
        }
        if q == 2 || gen == 0 {
            gen = 1;
        }
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = ctx.slow_mul(x, gen);
        }
        ctx.exp = exp;
        ctx.log = log;
        if q <= 256 {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = ctx.digit_add(a, b) as u16;
                }
            }
            ctx.add = Some(t);
        }
        ctx
    }

    fn digits(&self, mut v: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            d.push(v % self.p);
            v /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        let mut v = 0u32;
        for &c in d.iter().rev() {
            v = v * self.p + c;
        }
        v
    }

    fn digit_add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut r = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            r += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        r
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let m = pmulmod(&self.digits(a), &self.digits(b), &self.modulus, self.p);
        let mut m = m;
        m.resize(self.k as usize, 0);
        self.undigits(&m)
    }

    fn slow_pow(&self, a: u32, mut e: u32) -> u32 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.slow_mul(r, b);
            }
            b = self.slow_mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize] as u32,
            None => self.digit_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let d: Vec<u32> = self
            .digits(a)
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.undigits(&d)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let o = self.q - 1;
        self.exp[(if s >= o { s - o } else { s }) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let o = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((o - l) % o) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let o = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % o)) % o) as usize]
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.log[a as usize] % 2 == 0
    }

    pub fn sqrt(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        let l = self.log[a as usize];
        if l % 2 == 1 {
            return None;
        }
        Some(self.exp[(l / 2) as usize])
    }

    /// The generator used for the log tables; a non-square.
    pub fn generator(&self) -> u32 {
        if self.q == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    pub fn format(&self, a: u32) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        let d = self.digits(a);
        let mut parts = vec![];
        for (i, &c) in d.iter().enumerate() {
            if c == 0 {
                continue;
            }
            parts.push(match i {
                0 => c.to_string(),
                1 if c == 1 => "t".to_string(),
                1 => format!("{}t", c),
                _ if c == 1 => format!("t^{}", i),
                _ => format!("{}t^{}", c, i),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Parses integers (reduced mod p) and polynomials in `t` such as `2+3t+t^2`.
    pub fn parse(&self, s: &str) -> Result<u32, FieldError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(FieldError::Parse(s));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(self.from_i64(n));
        }
        let mut coeffs = vec![0i64; self.k as usize];
        let normalized = s.replace('-', "+-");
        for term in normalized.split('+').filter(|t| !t.is_empty()) {
            let (c, deg) = if let Some(pos) = term.find('t') {
                let cs = &term[..pos];
                let c = match cs {
                    "" => 1,
                    "-" => -1,
                    _ => cs
                        .trim_end_matches('*')
                        .parse::<i64>()
                        .map_err(|_| FieldError::Parse(s.clone()))?,
                };
                let rest = &term[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    rest.trim_start_matches('^')
                        .parse::<usize>()
                        .map_err(|_| FieldError::Parse(s.clone()))?
                };
                (c, deg)
            } else {
                (
                    term.parse::<i64>().map_err(|_| FieldError::Parse(s.clone()))?,
                    0,
                )
            };
            if deg >= self.k as usize {
                // reduce t^deg using the modulus
                let mut poly = vec![0u32; deg + 1];
                poly[deg] = self.from_i64(c);
                let mut r = pmod(&poly, &self.modulus, self.p);
                r.resize(self.k as usize, 0);
                for (i, v) in r.into_iter().enumerate() {
                    coeffs[i] += v as i64;
                }
            } else {
                coeffs[deg] += c;
            }
        }
        let d: Vec<u32> = coeffs.into_iter().map(|c| self.from_i64(c)).collect();
        Ok(self.undigits(&d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse_table() {
        let f = FqCtx::get(7, 1).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn f25_field_axioms_exhaustive() {
        let f = FqCtx::get(5, 2).unwrap();
        assert_eq!(f.q(), 25);
        for a in 0..25 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            for b in 0..25 {
                for c in [0, 1, 7, 24] {
                    let lhs = f.mul(a, f.add(b, c));
                    let rhs = f.add(f.mul(a, b), f.mul(a, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let squares = (1..25).filter(|&a| f.is_square(a)).count();
        assert_eq!(squares, 12);
    }

    #[test]
    fn rabin_detects_reducible() {
        assert!(!is_irreducible_mod_p(&[1, 0, 1], 5)); // x^2+1 = (x-2)(x+2)
        assert!(is_irreducible_mod_p(&[2, 0, 1], 5));
        assert!(!is_irreducible_mod_p(&[0, 0, 0, 1], 7));
    }

    #[test]
    fn parse_roundtrip() {
        let f = FqCtx::get(7, 2).unwrap();
        for a in 0..49 {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
        }
        assert!(FqCtx::get(3, 1).is_err());
    }
}
