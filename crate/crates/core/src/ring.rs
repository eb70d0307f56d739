//! The Tate ring in named form: a canonical k-basis per degree, its cycle representatives, the
//! change of basis from raw classes, multiplication, parsing and rendering.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::generators::{
    abelian_generators, cyclic_generators, q8_generators, shift, AbelianCatalog, CyclicCatalog, GeneratorError,
    Q8Catalog,
};
use crate::graded::{GradedMap, MapError, TateClass};
use crate::linalg::DenseMatrix;
use crate::resolution::{compositions, Family, Resolution};
use crate::scalars::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("summands of different degrees in {0:?}")]
    MixedDegrees(String),
    #[error("named classes in degree {0} are not a basis")]
    NotABasis(i64),
    #[error(transparent)]
    Generators(#[from] GeneratorError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Names of the Q8 core monomials x^a y^b, indexed as in ℬ.
pub const Q8_CORE: [(u8, u8); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (2, 1)];

/// A named basis monomial of the Tate ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NamedMonomial {
    /// x^x y^y for a cyclic group, x ∈ {0, 1}.
    Cyclic { x: u8, y: i64 },
    /// ℬ[core]·s^s for Q8.
    Q8 { core: usize, s: i64 },
    /// u^ε v^β, ε_i ∈ {0, 1}.
    Positive { u: Vec<u8>, v: Vec<i64> },
    /// φ_α.
    Phi { alpha: Vec<i64> },
}

impl NamedMonomial {
    pub fn degree(&self) -> i64 {
        match self {
            NamedMonomial::Cyclic { x, y } => *x as i64 + 2 * y,
            NamedMonomial::Q8 { core, s } => {
                let (a, b) = Q8_CORE[*core];
                (a + b) as i64 + 4 * s
            }
            NamedMonomial::Positive { u, v } => {
                u.iter().map(|&e| e as i64).sum::<i64>() + 2 * v.iter().sum::<i64>()
            }
            NamedMonomial::Phi { alpha } => -alpha.iter().sum::<i64>() - 1,
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            NamedMonomial::Cyclic { x, y } => *x == 0 && *y == 0,
            NamedMonomial::Q8 { core, s } => *core == 0 && *s == 0,
            NamedMonomial::Positive { u, v } => u.iter().all(|&e| e == 0) && v.iter().all(|&e| e == 0),
            NamedMonomial::Phi { .. } => false,
        }
    }
}

fn power(name: &str, e: i64) -> Option<String> {
    match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    }
}

impl fmt::Display for NamedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            NamedMonomial::Cyclic { x, y } => [power("x", *x as i64), power("y", *y)].into_iter().flatten().collect(),
            NamedMonomial::Q8 { core, s } => {
                let (a, b) = Q8_CORE[*core];
                [power("x", a as i64), power("y", b as i64), power("s", *s)].into_iter().flatten().collect()
            }
            NamedMonomial::Positive { u, v } => (0..u.len())
                .flat_map(|i| [power(&format!("u{}", i + 1), u[i] as i64), power(&format!("v{}", i + 1), v[i])])
                .flatten()
                .collect(),
            NamedMonomial::Phi { alpha } => {
                let idx: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
                vec![format!("phi({})", idx.join(","))]
            }
        };
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A homogeneous ring element as coordinates over the named basis of its degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NamedElement {
    pub degree: i64,
    pub coords: Vec<Scalar>,
}

impl NamedElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

pub enum Catalog {
    Cyclic(CyclicCatalog),
    Q8(Q8Catalog),
    Abelian(AbelianCatalog),
}

struct DegreeBasis {
    monomials: Vec<NamedMonomial>,
    /// Raw class coordinates → named coordinates.
    to_named: DenseMatrix,
}

/// The Tate ring of a supported group with a fixed cycle selection on the named basis.
pub struct TateRing {
    res: Arc<Resolution>,
    catalog: Catalog,
    bases: Mutex<HashMap<i64, Arc<DegreeBasis>>>,
    cycles: Mutex<HashMap<NamedMonomial, GradedMap>>,
    products: Mutex<HashMap<(NamedMonomial, NamedMonomial), NamedElement>>,
}

impl TateRing {
    pub fn new(res: &Arc<Resolution>) -> Result<TateRing, RingError> {
        let catalog = match res.family() {
            Family::Cyclic { .. } => Catalog::Cyclic(cyclic_generators(res)?),
            Family::Q8 => Catalog::Q8(q8_generators(res)?),
            Family::AbelianProduct { .. } => Catalog::Abelian(abelian_generators(res)?),
        };
        Ok(TateRing {
            res: res.clone(),
            catalog,
            bases: Mutex::default(),
            cycles: Mutex::default(),
            products: Mutex::default(),
        })
    }

    pub fn resolution(&self) -> &Arc<Resolution> {
        &self.res
    }

    pub fn field(&self) -> &Arc<Field> {
        self.res.field()
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn abelian(&self) -> Option<&AbelianCatalog> {
        match &self.catalog {
            Catalog::Abelian(c) => Some(c),
            _ => None,
        }
    }

    pub fn q8(&self) -> Option<&Q8Catalog> {
        match &self.catalog {
            Catalog::Q8(c) => Some(c),
            _ => None,
        }
    }

    pub fn cyclic(&self) -> Option<&CyclicCatalog> {
        match &self.catalog {
            Catalog::Cyclic(c) => Some(c),
            _ => None,
        }
    }

    fn named_monomials(&self, d: i64) -> Vec<NamedMonomial> {
        match &self.catalog {
            Catalog::Cyclic(_) => vec![NamedMonomial::Cyclic { x: d.rem_euclid(2) as u8, y: d.div_euclid(2) }],
            Catalog::Q8(_) => {
                let (s, e) = (d.div_euclid(4), d.rem_euclid(4));
                let cores: &[usize] = match e {
                    0 => &[0],
                    1 => &[1, 2],
                    2 => &[3, 4],
                    _ => &[5],
                };
                cores.iter().map(|&core| NamedMonomial::Q8 { core, s }).collect()
            }
            Catalog::Abelian(c) => {
                let r = c.rank();
                if d < 0 {
                    return compositions(-d - 1, r).into_iter().map(|alpha| NamedMonomial::Phi { alpha }).collect();
                }
                let mut out = Vec::new();
                for mask in (0..1u32 << r).rev() {
                    let u: Vec<u8> = (0..r).map(|i| (mask >> (r - 1 - i) & 1) as u8).collect();
                    let rest = d - u.iter().map(|&e| e as i64).sum::<i64>();
                    if rest < 0 || rest % 2 != 0 {
                        continue;
                    }
                    for v in compositions(rest / 2, r) {
                        out.push(NamedMonomial::Positive { u: u.clone(), v });
                    }
                }
                out
            }
        }
    }

    fn degree_basis(&self, d: i64) -> Result<Arc<DegreeBasis>, RingError> {
        if let Some(b) = self.bases.lock().unwrap().get(&d) {
            return Ok(b.clone());
        }
        let monomials = self.named_monomials(d);
        let n = self.res.rank(d);
        if monomials.len() != n {
            return Err(RingError::NotABasis(d));
        }
        let mut m = DenseMatrix::zeros(n, n);
        for (j, b) in monomials.iter().enumerate() {
            let class = self.cycle(b).class_of()?;
            for (i, &c) in class.coeffs.iter().enumerate() {
                m.set(i, j, c);
            }
        }
        let to_named = m.inverse(self.field()).ok_or(RingError::NotABasis(d))?;
        let b = Arc::new(DegreeBasis { monomials, to_named });
        self.bases.lock().unwrap().insert(d, b.clone());
        Ok(b)
    }

    /// The named basis of degree d.
    pub fn basis(&self, d: i64) -> Result<Vec<NamedMonomial>, RingError> {
        Ok(self.degree_basis(d)?.monomials.clone())
    }

    pub fn monomial(&self, m: &NamedMonomial) -> Result<NamedElement, RingError> {
        let basis = self.degree_basis(m.degree())?;
        let mut coords = vec![Scalar::ZERO; basis.monomials.len()];
        let pos = basis.monomials.iter().position(|b| b == m).ok_or_else(|| RingError::Parse(m.to_string()))?;
        coords[pos] = Scalar::ONE;
        Ok(NamedElement { degree: m.degree(), coords })
    }

    pub fn zero(&self, d: i64) -> Result<NamedElement, RingError> {
        Ok(NamedElement { degree: d, coords: vec![Scalar::ZERO; self.degree_basis(d)?.monomials.len()] })
    }

    pub fn one(&self) -> NamedElement {
        NamedElement { degree: 0, coords: vec![Scalar::ONE] }
    }

    pub fn terms(&self, e: &NamedElement) -> Result<Vec<(NamedMonomial, Scalar)>, RingError> {
        let basis = self.degree_basis(e.degree)?;
        Ok(basis.monomials.iter().zip(&e.coords).filter(|(_, c)| !c.is_zero()).map(|(m, &c)| (m.clone(), c)).collect())
    }

    /// The chosen cocycle f1(b) for a named monomial: the generator product in fixed order.
    pub fn cycle(&self, b: &NamedMonomial) -> GradedMap {
        if let Some(f) = self.cycles.lock().unwrap().get(b) {
            return f.clone();
        }
        let res = &self.res;
        let f = match (&self.catalog, b) {
            (Catalog::Cyclic(c), NamedMonomial::Cyclic { x, y }) => {
                let ys = shift(res, 2 * y);
                if *x == 1 { c.x.compose(&ys) } else { ys }
            }
            (Catalog::Q8(c), NamedMonomial::Q8 { core, s }) => {
                let (a, bb) = Q8_CORE[*core];
                let mut maps: Vec<GradedMap> = Vec::new();
                maps.extend(std::iter::repeat(c.x.clone()).take(a as usize));
                maps.extend(std::iter::repeat(c.y.clone()).take(bb as usize));
                maps.push(shift(res, 4 * s));
                GradedMap::product(res, &maps)
            }
            (Catalog::Abelian(c), NamedMonomial::Positive { u, v }) => {
                let mut maps: Vec<GradedMap> = Vec::new();
                for i in 0..c.rank() {
                    maps.extend(std::iter::repeat(c.u[i].clone()).take(u[i] as usize));
                    maps.extend(std::iter::repeat(c.v[i].clone()).take(v[i] as usize));
                }
                GradedMap::product(res, &maps)
            }
            (Catalog::Abelian(c), NamedMonomial::Phi { alpha }) => c.phi_alpha(alpha),
            _ => panic!("named monomial {b} does not belong to this ring"),
        };
        self.cycles.lock().unwrap().insert(b.clone(), f.clone());
        f
    }

    /// f1 extended linearly.
    pub fn cycle_of(&self, e: &NamedElement) -> Result<GradedMap, RingError> {
        let terms: Vec<(Scalar, GradedMap)> = self.terms(e)?.into_iter().map(|(m, c)| (c, self.cycle(&m))).collect();
        Ok(GradedMap::linear_combination(&self.res, e.degree, &terms))
    }

    /// Named coordinates of a raw class.
    pub fn named(&self, class: &TateClass) -> Result<NamedElement, RingError> {
        let basis = self.degree_basis(class.degree)?;
        Ok(NamedElement { degree: class.degree, coords: basis.to_named.mul_vec(self.field(), &class.coeffs) })
    }

    /// The class 𝒞(f) in named form.
    pub fn class_of(&self, f: &GradedMap) -> Result<NamedElement, RingError> {
        self.named(&f.class_of()?)
    }

    pub fn multiply_monomials(&self, a: &NamedMonomial, b: &NamedMonomial) -> Result<NamedElement, RingError> {
        let key = (a.clone(), b.clone());
        if let Some(p) = self.products.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let p = self.class_of(&self.cycle(a).compose(&self.cycle(b)))?;
        self.products.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }

    pub fn multiply(&self, a: &NamedElement, b: &NamedElement) -> Result<NamedElement, RingError> {
        let f = self.field();
        let mut out = self.zero(a.degree + b.degree)?;
        for (ma, ca) in self.terms(a)? {
            for (mb, cb) in self.terms(b)? {
                let p = self.multiply_monomials(&ma, &mb)?;
                let c = f.mul(ca, cb);
                for (o, x) in out.coords.iter_mut().zip(&p.coords) {
                    *o = f.add(*o, f.mul(c, *x));
                }
            }
        }
        Ok(out)
    }

    pub fn axpy(&self, a: &NamedElement, c: Scalar, b: &NamedElement) -> NamedElement {
        assert_eq!(a.degree, b.degree, "degree mismatch");
        let f = self.field();
        NamedElement { degree: a.degree, coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect() }
    }

    pub fn scale(&self, c: Scalar, a: &NamedElement) -> NamedElement {
        let f = self.field();
        NamedElement { degree: a.degree, coords: a.coords.iter().map(|&x| f.mul(c, x)).collect() }
    }

    pub fn render(&self, e: &NamedElement) -> String {
        let terms = self.terms(e).unwrap_or_default();
        if terms.is_empty() {
            return "0".into();
        }
        let f = self.field();
        terms
            .iter()
            .map(|(m, c)| {
                let coef = f.render(*c);
                let coef = if coef.contains('+') { format!("({coef})") } else { coef };
                match (*c == Scalar::ONE, m.is_unit()) {
                    (true, _) => m.to_string(),
                    (false, true) => coef,
                    (false, false) => format!("{coef}*{m}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses sums of products such as `x^2*y*s^-1 + y^2`, `u1*v2^3`, `2*phi(0,1)` or
    /// `(a+1)*x`. Products are evaluated in the ring.
    pub fn parse(&self, s: &str) -> Result<NamedElement, RingError> {
        let err = || RingError::Parse(s.to_string());
        let mut total: Option<NamedElement> = None;
        let normalized = s.replace(" - ", " + -");
        for term in split_top(&normalized, '+') {
            let term = term.trim();
            let (neg, term) = match term.strip_prefix('-') {
                Some(t) => (true, t.trim()),
                None => (false, term),
            };
            if term.is_empty() {
                return Err(err());
            }
            let mut value = self.one();
            for factor in split_top(term, '*') {
                let v = self.parse_factor(factor.trim()).ok_or_else(err)?;
                value = self.multiply(&value, &v)?;
            }
            if neg {
                value = self.scale(self.field().neg(Scalar::ONE), &value);
            }
            total = Some(match total {
                None => value,
                Some(t) if t.degree == value.degree => self.axpy(&t, Scalar::ONE, &value),
                Some(_) => return Err(RingError::MixedDegrees(s.to_string())),
            });
        }
        total.ok_or_else(err)
    }

    fn parse_factor(&self, tok: &str) -> Option<NamedElement> {
        let field = self.field();
        if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            return field.parse_scalar(inner).map(|c| self.scale(c, &self.one()));
        }
        if let Some(c) = field.parse_scalar(tok) {
            return Some(self.scale(c, &self.one()));
        }
        if let Some(inner) = tok.strip_prefix("phi(").and_then(|t| t.strip_suffix(')')) {
            let alpha: Vec<i64> = inner.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
            let r = self.abelian()?.rank();
            if alpha.len() != r || alpha.iter().any(|&a| a < 0) {
                return None;
            }
            return self.monomial(&NamedMonomial::Phi { alpha }).ok();
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => (n.trim(), e.trim().parse::<i64>().ok()?),
            None => (tok, 1),
        };
        let gen = |m: NamedMonomial| self.monomial(&m).ok();
        let base = match (&self.catalog, name) {
            (Catalog::Cyclic(_), "x") => gen(NamedMonomial::Cyclic { x: 1, y: 0 })?,
            (Catalog::Cyclic(_), "y") => return gen(NamedMonomial::Cyclic { x: 0, y: exp }),
            (Catalog::Q8(_), "x") => gen(NamedMonomial::Q8 { core: 1, s: 0 })?,
            (Catalog::Q8(_), "y") => gen(NamedMonomial::Q8 { core: 2, s: 0 })?,
            (Catalog::Q8(_), "s") => return gen(NamedMonomial::Q8 { core: 0, s: exp }),
            (Catalog::Abelian(c), _) => {
                let (kind, idx) = name.split_at(1);
                let i: usize = idx.parse().ok()?;
                if i == 0 || i > c.rank() {
                    return None;
                }
                let r = c.rank();
                let mut u = vec![0u8; r];
                let mut v = vec![0i64; r];
                match kind {
                    "u" => u[i - 1] = 1,
                    "v" => v[i - 1] = 1,
                    _ => return None,
                }
                gen(NamedMonomial::Positive { u, v })?
            }
            _ => return None,
        };
        if exp < 0 {
            return None;
        }
        let mut value = self.one();
        for _ in 0..exp {
            value = self.multiply(&value, &base).ok()?;
        }
        Some(value)
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn ring(p: u32, ms: &[u32]) -> TateRing {
        let alg = Algebra::truncated_polynomial(Field::prime(p).unwrap(), ms).unwrap();
        TateRing::new(&Resolution::for_algebra(alg)).unwrap()
    }

    fn q8(field: &str) -> TateRing {
        let alg = Algebra::quaternion(Field::parse(field).unwrap()).unwrap();
        TateRing::new(&Resolution::q8(alg).unwrap()).unwrap()
    }

    #[test]
    fn q8_relations() {
        let r = q8("2");
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(p("x^2 + y^2"), p("x*y"));
        assert_eq!(p("y*x"), p("x*y"));
        assert!(p("x^3").is_zero() && p("y^3").is_zero());
        assert_eq!(p("x^2*y"), p("x*y^2"));
        assert_eq!(p("s*s^-1"), r.one());
        assert_eq!(r.render(&p("x^2*y*s^-1 + 0*x^2*y*s^-1")), "x^2*y*s^-1");
        for d in -8..8 {
            assert_eq!(r.basis(d).unwrap().len(), r.resolution().rank(d));
        }
    }

    #[test]
    fn cyclic_relations() {
        let r = ring(3, &[3]);
        assert!(r.parse("x^2").unwrap().is_zero());
        assert_eq!(r.parse("y*y^-1").unwrap(), r.one());
        let r = ring(2, &[2]);
        assert_eq!(r.parse("x^2").unwrap(), r.parse("y").unwrap());
        assert_eq!(r.render(&r.parse("x*y^-2").unwrap()), "x*y^-2");
    }

    fn phi(r: &TateRing, alpha: &[i64]) -> NamedElement {
        r.monomial(&NamedMonomial::Phi { alpha: alpha.to_vec() }).unwrap()
    }

    /// The relation set of the abelian Tate ring on all φ_α with |α| ≤ bound.
    fn check_abelian_relations(r: &TateRing, bound: i64) {
        let c = r.abelian().unwrap();
        let n = c.rank();
        let ms = r.resolution().algebra().truncation().to_vec();
        let f = r.field().clone();
        let gen = |k: &str, i: usize| r.parse(&format!("{k}{}", i + 1)).unwrap();
        for i in 0..n {
            let u2 = r.multiply(&gen("u", i), &gen("u", i)).unwrap();
            if ms[i] == 2 {
                assert_eq!(u2, gen("v", i));
            } else {
                assert!(u2.is_zero());
            }
            for j in 0..n {
                let uv = r.multiply(&gen("u", i), &gen("v", j)).unwrap();
                assert_eq!(uv, r.multiply(&gen("v", j), &gen("u", i)).unwrap());
                if i != j {
                    let a = r.multiply(&gen("u", i), &gen("u", j)).unwrap();
                    let b = r.multiply(&gen("u", j), &gen("u", i)).unwrap();
                    assert_eq!(a, r.scale(f.neg(Scalar::ONE), &b));
                }
            }
        }
        for tot in 0..=bound {
            for alpha in compositions(tot, n) {
                let pa = phi(r, &alpha);
                for i in 0..n {
                    let mut lower = alpha.clone();
                    lower[i] -= 1;
                    let hits = alpha[i] % 2 == 1 || (alpha[i] > 0 && ms[i] == 2);
                    let right = r.multiply(&pa, &gen("u", i)).unwrap();
                    let left = r.multiply(&gen("u", i), &pa).unwrap();
                    if hits {
                        let tail: i64 = alpha[i..].iter().sum::<i64>() + i as i64 + 1;
                        let head: i64 = alpha[..i].iter().sum::<i64>() + i as i64;
                        assert_eq!(right, r.scale(f.sign(tail), &phi(r, &lower)), "phi{alpha:?} u{}", i + 1);
                        assert_eq!(left, r.scale(f.sign(head), &phi(r, &lower)), "u{} phi{alpha:?}", i + 1);
                    } else {
                        assert!(right.is_zero() && left.is_zero(), "phi{alpha:?} u{}", i + 1);
                    }
                    let right = r.multiply(&pa, &gen("v", i)).unwrap();
                    let left = r.multiply(&gen("v", i), &pa).unwrap();
                    if alpha[i] >= 2 {
                        let mut l2 = alpha.clone();
                        l2[i] -= 2;
                        assert_eq!(right, phi(r, &l2));
                        assert_eq!(left, phi(r, &l2));
                    } else {
                        assert!(right.is_zero() && left.is_zero());
                    }
                }
                for beta in compositions((bound - tot).min(1), n) {
                    assert!(r.multiply(&pa, &phi(r, &beta)).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn abelian_relations() {
        for (p, ms) in [(2, vec![2, 2, 2]), (2, vec![4, 2, 8]), (3, vec![3, 9]), (5, vec![5, 5, 5])] {
            check_abelian_relations(&ring(p, &ms), 3);
        }
    }

    #[test]
    fn parse_render_round_trip() {
        let r = ring(5, &[5, 5, 5]);
        for s in ["u1*v2^3", "phi(0,1,0)", "2*u1*u3", "u2*v1 + 3*u1*v2", "1"] {
            let e = r.parse(s).unwrap();
            assert_eq!(r.parse(&r.render(&e)).unwrap(), e, "{s}");
        }
        assert!(r.parse("u4").is_err());
        assert!(r.parse("u1 + v1").is_err());
        let q = q8("4");
        let e = q.parse("(a+1)*x + y").unwrap();
        assert_eq!(q.parse(&q.render(&e)).unwrap(), e);
    }
}
