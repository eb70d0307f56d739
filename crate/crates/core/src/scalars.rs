//! Arithmetic in small finite fields F_q, q = p^n ≤ 256.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible over F_{0}")]
    Reducible(u32),
    #[error("modulus must be monic of degree {0}")]
    BadModulus(u32),
    #[error("field order {0} exceeds 256")]
    TooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse field spec `{0}`")]
    Parse(String),
}

/// A field element, stored as the integer Σ c_i p^i of its power-basis coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, serde::Serialize)]
pub struct Scalar(pub u8);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub struct Field {
    p: u32,
    n: u32,
    modulus: Vec<u32>,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)?;
        if self.n > 1 {
            write!(f, "{:?}", self.modulus)?;
        }
        Ok(())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.n)
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn digits(mut x: usize, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = (x % p as usize) as u32;
            x /= p as usize;
            d
        })
        .collect()
}

fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    // b monic
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap() % p;
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let v = &mut a[shift + i];
                *v = (*v + p * p - (lead * c) % p) % p;
            }
        }
        a.pop();
    }
    a
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut g = digits(code, p, d as u32);
            g.push(1);
            if poly_rem(modulus.to_vec(), &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree n in the order of its coefficient code.
fn default_modulus(p: u32, n: u32) -> Vec<u32> {
    let count = (p as usize).pow(n);
    for code in 0..count {
        let mut m = digits(code, p, n);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Splits q = p^n; a non-prime-power is returned unchanged so that construction reports it.
fn prime_power(q: u32) -> (u32, u32) {
    let Some(p) = (2..=q).find(|d| q % d == 0) else { return (q, 1) };
    let (mut m, mut n) = (q, 0);
    while m % p == 0 {
        m /= p;
        n += 1;
    }
    if m == 1 { (p, n) } else { (q, 1) }
}

impl Field {
    /// Builds F_{p^n}. `modulus` lists coefficients low-to-high and must be monic of degree n;
    /// `None` picks the first irreducible one.
    pub fn new(p: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let q = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if n == 0 || q > 256 {
            return Err(FieldError::TooLarge(q));
        }
        let modulus = match modulus {
            Some(m) if n == 1 && m.len() <= 1 => vec![0, 1],
            Some(m) => {
                if m.len() != n as usize + 1 || m[n as usize] % p != 1 {
                    return Err(FieldError::BadModulus(n));
                }
                let m: Vec<u32> = m.iter().map(|c| c % p).collect();
                if n > 1 && !is_irreducible(&m, p) {
                    return Err(FieldError::Reducible(p));
                }
                m
            }
            None if n == 1 => vec![0, 1],
            None => default_modulus(p, n),
        };
        let q = q as usize;
        let enc = |c: &[u32]| c.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize);
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, n);
            for b in 0..q {
                let db = digits(b, p, n);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = enc(&s) as u8;
                let mut prod = vec![0u32; 2 * n as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = if n == 1 { prod } else { poly_rem(prod, &modulus, p) };
                r.resize(n as usize, 0);
                mul[a * q + b] = enc(&r) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
            }
        }
        Ok(Arc::new(Field { p, n, modulus, q, add, mul, neg, inv }))
    }

    pub fn prime(p: u32) -> Result<Arc<Field>, FieldError> {
        Field::new(p, 1, None)
    }

    /// Parses `q`, `p^n` or `p^n/c0,c1,...,1`; a bare prime power q = p^n names F_q.
    pub fn parse(spec: &str) -> Result<Arc<Field>, FieldError> {
        let bad = || FieldError::Parse(spec.to_string());
        let (head, modulus) = match spec.split_once('/') {
            Some((h, m)) => {
                let coeffs = m
                    .split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                (h, Some(coeffs))
            }
            None => (spec, None),
        };
        let (p, n) = match head.split_once('^') {
            Some((p, n)) => (p.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?),
            None => prime_power(head.trim().parse().map_err(|_| bad())?),
        };
        Field::new(p, n, modulus)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.q).map(|a| Scalar(a as u8))
    }

    /// The power-basis generator α (equal to the class of X).
    pub fn generator(&self) -> Scalar {
        if self.n == 1 {
            Scalar(1)
        } else {
            Scalar(self.p as u8)
        }
    }

    pub fn coordinates(&self, a: Scalar) -> Vec<u32> {
        digits(a.0 as usize, self.p, self.n)
    }

    pub fn from_coordinates(&self, c: &[u32]) -> Scalar {
        let mut acc = 0usize;
        for &d in c.iter().take(self.n as usize).rev() {
            acc = acc * self.p as usize + (d % self.p) as usize;
        }
        Scalar(acc as u8)
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        Scalar(v.rem_euclid(self.p as i64) as u8)
    }

    /// (−1)^e.
    pub fn sign(&self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            Scalar::ONE
        } else {
            self.neg(Scalar::ONE)
        }
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.add[a.0 as usize * self.q + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.mul[a.0 as usize * self.q + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.neg[a.0 as usize])
    }

    pub fn invert(&self, a: Scalar) -> Result<Scalar, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(Scalar(self.inv[a.0 as usize]))
        }
    }

    #[inline]
    pub(crate) fn inv_unchecked(&self, a: Scalar) -> Scalar {
        Scalar(self.inv[a.0 as usize])
    }

    pub fn pow(&self, a: Scalar, e: u32) -> Scalar {
        (0..e).fold(Scalar::ONE, |acc, _| self.mul(acc, a))
    }

    /// Integers for prime fields, polynomials in `a` otherwise.
    pub fn render(&self, x: Scalar) -> String {
        if self.n == 1 {
            return x.0.to_string();
        }
        let c = self.coordinates(x);
        let mut parts = Vec::new();
        for (i, &d) in c.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (d, mono.is_empty()) {
                (_, true) => d.to_string(),
                (1, false) => mono,
                (_, false) => format!("{d}{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Inverse of [`Field::render`].
    pub fn parse_scalar(&self, s: &str) -> Option<Scalar> {
        let s = s.trim();
        if self.n == 1 {
            return s.parse::<i64>().ok().map(|v| self.from_int(v));
        }
        let mut coords = vec![0u32; self.n as usize];
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return None;
            }
            let (coef, power) = match term.find('a') {
                None => (term.parse::<u32>().ok()?, 0usize),
                Some(pos) => {
                    let coef = if pos == 0 { 1 } else { term[..pos].parse::<u32>().ok()? };
                    let rest = &term[pos + 1..];
                    let power = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
                    (coef, power)
                }
            };
            // reduce α^power via the field's own multiplication
            let mut v = Scalar::ONE;
            for _ in 0..power {
                v = self.mul(v, self.generator());
            }
            let c = self.coordinates(self.mul(v, self.from_int(coef as i64)));
            for (slot, d) in coords.iter_mut().zip(c) {
                *slot = (*slot + d) % self.p;
            }
        }
        Some(self.from_coordinates(&coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_generator_relation() {
        let f = Field::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let a = f.generator();
        assert_eq!(f.mul(a, a), f.add(a, Scalar::ONE));
        assert_eq!(f.invert(a).unwrap(), f.add(a, Scalar::ONE));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(Field::new(2, 2, Some(vec![1, 0, 1])).unwrap_err(), FieldError::Reducible(2));
        assert_eq!(Field::new(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
    }

    #[test]
    fn inverse_in_f5() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.invert(Scalar(2)).unwrap(), Scalar(3));
        assert_eq!(f.invert(Scalar(0)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(Field::parse("2^2/1,1,1").unwrap().order(), 4);
        assert_eq!(Field::parse("3").unwrap().order(), 3);
        assert_eq!(Field::parse("2^2").unwrap().modulus(), &[1, 1, 1]);
        assert!(Field::parse("x").is_err());
    }

    #[test]
    fn render_roundtrip() {
        for spec in ["2", "3", "5", "2^2", "3^2", "2^3"] {
            let f = Field::parse(spec).unwrap();
            for x in f.elements() {
                assert_eq!(f.parse_scalar(&f.render(x)), Some(x), "{spec}");
            }
        }
    }
}
