//! Matrix-entry expressions over Q(ζ₃) in the symbols `q`, `sq` (= √q) and `z` (= ζ₃).
//!
//! Grammar: sums and differences of products and quotients; `^` takes an integer
//! exponent; integers are the only literals.

use num_traits::Zero;

use super::qz::{int, Q, Qz};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Sym(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = vec![];
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| format!("number {t} too large"))?));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Sym(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    q: &'a Q,
    sq: &'a Q,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Qz, String> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v = &v + &self.term()?;
            } else if self.eat('-') {
                v = &v - &self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Qz, String> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v = &v * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                v = &v * &d.inv().ok_or("division by zero")?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Qz, String> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e = if neg { -n } else { n };
                    base.pow(e).ok_or_else(|| "zero to a negative power".to_string())
                }
                other => Err(format!("expected integer exponent, found {other:?}")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Qz, String> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Qz::from_q(int(n)))
            }
            Some(Tok::Sym(s)) => {
                self.pos += 1;
                match s.as_str() {
                    "q" => Ok(Qz::from_q(self.q.clone())),
                    "sq" => Ok(Qz::from_q(self.sq.clone())),
                    "z" => Ok(Qz::zeta()),
                    _ => Err(format!("unknown symbol {s:?}")),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err("missing ')'".into());
                }
                Ok(v)
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

/// Evaluates an entry at q = sq².
pub fn eval(s: &str, sq: &Q) -> Result<Qz, String> {
    if sq.is_zero() {
        return Err("q must be nonzero".into());
    }
    let q = sq * sq;
    let mut p = Parser { toks: lex(s)?, pos: 0, q: &q, sq };
    if p.toks.is_empty() {
        return Err("empty expression".into());
    }
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input after token {}", p.pos));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::qz::rat;

    #[test]
    fn evaluates_entries() {
        let sq = int(2);
        assert_eq!(eval("q^3", &sq).unwrap(), Qz::from_int(64));
        assert_eq!(eval("sq*(q^2-q+1)", &sq).unwrap(), Qz::from_int(26));
        assert_eq!(eval("-1", &sq).unwrap(), Qz::from_int(-1));
        assert_eq!(eval("3*sq", &sq).unwrap(), Qz::from_int(6));
        assert_eq!(eval("q^-1/2", &sq).unwrap(), Qz::from_q(rat(1, 8)));
        assert_eq!(eval("1+z", &sq).unwrap(), Qz::zeta6(1));
        assert!(eval("x", &sq).is_err());
        assert!(eval("1/(q-4)", &sq).is_err());
        assert!(eval("(1", &sq).is_err());
    }
}
