//! Group algebras L = kG: truncated polynomial algebras k[z_1..z_r]/(z_i^{m_i}) and kQ8.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::linalg::Echelon;
use crate::scalars::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("exponent {0} is not a power of the characteristic {1}")]
    NotPPower(u32, u32),
    #[error("the quaternion group ring needs characteristic 2")]
    WrongCharacteristic,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("ideal not available for this algebra")]
    InvalidSpec,
    #[error("empty exponent list")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    TruncatedPolynomial { exponents: Vec<u32> },
    QuaternionQ8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdealSpec {
    /// I^m, I the augmentation ideal.
    AugmentationPower(u32),
    /// J_m = J_1^m, J_1 generated by the z_i^{m_i−1}.
    JPower(u32),
}

/// An element of L as a sparse coefficient list over the basis, sorted by basis index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    terms: Vec<(u32, Scalar)>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(index: usize) -> Self {
        Self { terms: vec![(index as u32, Scalar::ONE)] }
    }

    pub fn term(index: usize, c: Scalar) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(index as u32, c)] }
        }
    }

    pub(crate) fn from_sorted(terms: Vec<(u32, Scalar)>) -> Self {
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u32, Scalar)] {
        &self.terms
    }

    pub fn coefficient(&self, index: usize) -> Scalar {
        self.terms
            .binary_search_by_key(&(index as u32), |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or(Scalar::ZERO)
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub struct Algebra {
    id: u64,
    field: Arc<Field>,
    kind: AlgebraKind,
    labels: Vec<String>,
    exponents: Vec<Vec<u32>>,
    table: Vec<u32>,
    ideal_cache: Vec<OnceLock<Echelon>>,
}

const ZERO_PRODUCT: u32 = u32::MAX;

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Algebra({:?} over {:?})", self.kind, self.field)
    }
}

impl Algebra {
    /// k[z_1..z_r]/(z_i^{m_i}) with the degree-lexicographic monomial basis.
    pub fn truncated_polynomial(field: Arc<Field>, exponents: &[u32]) -> Result<Arc<Algebra>, AlgebraError> {
        if exponents.is_empty() {
            return Err(AlgebraError::Empty);
        }
        let p = field.characteristic();
        for &m in exponents {
            let mut t = m;
            while t > 1 && t % p == 0 {
                t /= p;
            }
            if m < 2 || t != 1 {
                return Err(AlgebraError::NotPPower(m, p));
            }
        }
        let r = exponents.len();
        let mut monos: Vec<Vec<u32>> = vec![vec![]];
        for &m in exponents {
            monos = monos
                .into_iter()
                .flat_map(|v| {
                    (0..m).map(move |a| {
                        let mut w = v.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
        }
        monos.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let dim = monos.len();
        let index_of = |e: &[u32]| -> usize { monos.binary_search_by(|probe| cmp_deglex(probe, e)).unwrap() };
        let mut table = vec![ZERO_PRODUCT; dim * dim];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let c: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if c.iter().zip(exponents).all(|(x, &m)| *x < m) {
                    table[i * dim + j] = index_of(&c) as u32;
                }
            }
        }
        let labels = monos.iter().map(|e| monomial_label(e, r)).collect();
        Ok(Arc::new(Algebra {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            field,
            kind: AlgebraKind::TruncatedPolynomial { exponents: exponents.to_vec() },
            labels,
            exponents: monos,
            table,
            ideal_cache: (0..8).map(|_| OnceLock::new()).collect(),
        }))
    }

    /// kQ8 on the basis (E, I, J, K, E′, I′, J′, K′), E′ = −1 and X′ = E′X.
    pub fn quaternion(field: Arc<Field>) -> Result<Arc<Algebra>, AlgebraError> {
        if field.characteristic() != 2 {
            return Err(AlgebraError::WrongCharacteristic);
        }
        // unit quaternions ±1, ±i, ±j, ±k as (sign, unit) with unit 0..4 = 1, i, j, k
        let unit_product = |a: usize, b: usize| -> (bool, usize) {
            const T: [[(bool, usize); 4]; 4] = [
                [(false, 0), (false, 1), (false, 2), (false, 3)],
                [(false, 1), (true, 0), (false, 3), (true, 2)],
                [(false, 2), (true, 3), (true, 0), (false, 1)],
                [(false, 3), (false, 2), (true, 1), (true, 0)],
            ];
            T[a][b]
        };
        let dim = 8;
        let mut table = vec![0u32; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let (s, u) = unit_product(a % 4, b % 4);
                let neg = (a >= 4) ^ (b >= 4) ^ s;
                table[a * dim + b] = (u + if neg { 4 } else { 0 }) as u32;
            }
        }
        let labels = ["E", "I", "J", "K", "E'", "I'", "J'", "K'"].iter().map(|s| s.to_string()).collect();
        Ok(Arc::new(Algebra {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            field,
            kind: AlgebraKind::QuaternionQ8,
            labels,
            exponents: Vec::new(),
            table,
            ideal_cache: (0..8).map(|_| OnceLock::new()).collect(),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Truncation exponents m_i (empty for Q8).
    pub fn truncation(&self) -> &[u32] {
        match &self.kind {
            AlgebraKind::TruncatedPolynomial { exponents } => exponents,
            AlgebraKind::QuaternionQ8 => &[],
        }
    }

    /// Exponent vector of a basis monomial (truncated algebras only).
    pub fn exponent(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    /// Index of the monomial z^e, or `None` if some e_i ≥ m_i.
    pub fn monomial_index(&self, e: &[u32]) -> Option<usize> {
        let m = self.truncation();
        if e.len() != m.len() || e.iter().zip(m).any(|(a, b)| a >= b) {
            return None;
        }
        self.exponents.binary_search_by(|probe| cmp_deglex(probe, e)).ok()
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::basis(0)
    }

    /// The monomial z^e (zero if it overflows the truncation).
    pub fn monomial(&self, e: &[u32]) -> AlgebraElement {
        self.monomial_index(e).map(AlgebraElement::basis).unwrap_or_default()
    }

    /// z_i^e (i zero-based).
    pub fn z_pow(&self, i: usize, e: u32) -> AlgebraElement {
        let mut v = vec![0; self.truncation().len()];
        v[i] = e;
        self.monomial(&v)
    }

    /// Sum of all group elements.
    pub fn norm(&self) -> AlgebraElement {
        match &self.kind {
            AlgebraKind::QuaternionQ8 => self.from_dense(&[Scalar::ONE; 8]),
            AlgebraKind::TruncatedPolynomial { exponents } => {
                let e: Vec<u32> = exponents.iter().map(|m| m - 1).collect();
                self.monomial(&e)
            }
        }
    }

    /// 𝐍_i = ∏_{j≠i} z_j^{m_j−1}.
    pub fn partial_norm(&self, i: usize) -> AlgebraElement {
        let e: Vec<u32> =
            self.truncation().iter().enumerate().map(|(j, m)| if j == i { 0 } else { m - 1 }).collect();
        self.monomial(&e)
    }

    pub fn from_dense(&self, coeffs: &[Scalar]) -> AlgebraElement {
        AlgebraElement::from_sorted(
            coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, &c)| (i as u32, c)).collect(),
        )
    }

    pub fn to_dense(&self, a: &AlgebraElement) -> Vec<Scalar> {
        let mut v = vec![Scalar::ZERO; self.dim()];
        for &(i, c) in a.terms() {
            v[i as usize] = c;
        }
        v
    }

    /// Product of basis elements, `None` when it vanishes.
    #[inline]
    pub fn basis_product(&self, i: usize, j: usize) -> Option<usize> {
        let t = self.table[i * self.dim() + j];
        (t != ZERO_PRODUCT).then_some(t as usize)
    }

    pub fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let f = &self.field;
        let (x, y) = (a.terms(), b.terms());
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
                out.push(x[i]);
                i += 1;
            } else if i == x.len() || y[j].0 < x[i].0 {
                out.push(y[j]);
                j += 1;
            } else {
                let s = f.add(x[i].1, y[j].1);
                if !s.is_zero() {
                    out.push((x[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        AlgebraElement::from_sorted(out)
    }

    pub fn scale(&self, c: Scalar, a: &AlgebraElement) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement::from_sorted(a.terms().iter().map(|&(i, x)| (i, self.field.mul(c, x))).collect())
    }

    pub fn neg(&self, a: &AlgebraElement) -> AlgebraElement {
        self.scale(self.field.neg(Scalar::ONE), a)
    }

    pub fn sub(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        self.add(a, &self.neg(b))
    }

    /// Bilinear extension of the basis table.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        if a.is_zero() || b.is_zero() {
            return AlgebraElement::zero();
        }
        let f = &self.field;
        if a.terms().len() == 1 && b.terms().len() == 1 {
            let (i, x) = a.terms()[0];
            let (j, y) = b.terms()[0];
            return match self.basis_product(i as usize, j as usize) {
                Some(k) => AlgebraElement::term(k, f.mul(x, y)),
                None => AlgebraElement::zero(),
            };
        }
        let mut acc = vec![Scalar::ZERO; self.dim()];
        for &(i, x) in a.terms() {
            for &(j, y) in b.terms() {
                if let Some(k) = self.basis_product(i as usize, j as usize) {
                    acc[k] = f.add(acc[k], f.mul(x, y));
                }
            }
        }
        self.from_dense(&acc)
    }

    /// Accumulates c·a·b into a dense buffer.
    #[inline]
    pub(crate) fn mul_acc(&self, acc: &mut [Scalar], c: Scalar, a: &AlgebraElement, b: &AlgebraElement) {
        let f = &self.field;
        for &(i, x) in a.terms() {
            let cx = f.mul(c, x);
            for &(j, y) in b.terms() {
                if let Some(k) = self.basis_product(i as usize, j as usize) {
                    acc[k] = f.add(acc[k], f.mul(cx, y));
                }
            }
        }
    }

    /// Checked product: indices must belong to this algebra.
    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        let d = self.dim() as u32;
        if a.terms().iter().chain(b.terms()).any(|t| t.0 >= d) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(self.mul(a, b))
    }

    /// ε: sum of coefficients.
    pub fn augmentation(&self, a: &AlgebraElement) -> Scalar {
        match &self.kind {
            AlgebraKind::QuaternionQ8 => a.terms().iter().fold(Scalar::ZERO, |s, t| self.field.add(s, t.1)),
            // monomial basis: only the constant monomial survives z_i ↦ 0
            AlgebraKind::TruncatedPolynomial { .. } => a.coefficient(0),
        }
    }

    pub fn ideal_member(&self, a: &AlgebraElement, spec: IdealSpec) -> Result<bool, AlgebraError> {
        match (&self.kind, spec) {
            (AlgebraKind::TruncatedPolynomial { .. }, _) => {
                Ok(a.terms().iter().all(|&(i, _)| self.monomial_in_ideal(i as usize, spec)))
            }
            (AlgebraKind::QuaternionQ8, IdealSpec::AugmentationPower(m)) => {
                if m == 0 {
                    return Ok(true);
                }
                let slot = self.ideal_cache.get(m as usize).ok_or(AlgebraError::InvalidSpec)?;
                let ech = slot.get_or_init(|| self.augmentation_power_basis(m));
                let v: Vec<(u32, Scalar)> = a.terms().to_vec();
                Ok(ech.reduces_to_zero(&v))
            }
            (AlgebraKind::QuaternionQ8, IdealSpec::JPower(_)) => Err(AlgebraError::InvalidSpec),
        }
    }

    /// Membership of a basis monomial in a monomial ideal (truncated algebras).
    pub fn monomial_in_ideal(&self, i: usize, spec: IdealSpec) -> bool {
        let e = &self.exponents[i];
        match spec {
            IdealSpec::AugmentationPower(m) => e.iter().sum::<u32>() >= m,
            IdealSpec::JPower(m) => {
                let full = e.iter().zip(self.truncation()).filter(|(a, &mm)| **a == mm - 1).count();
                full as u32 >= m
            }
        }
    }

    fn augmentation_power_basis(&self, m: u32) -> Echelon {
        let f = self.field.clone();
        let gens: Vec<AlgebraElement> =
            (1..self.dim()).map(|g| self.sub(&AlgebraElement::basis(g), &self.one())).collect();
        let mut layer = gens.clone();
        for _ in 1..m {
            let mut next = Vec::new();
            for a in &layer {
                for g in &gens {
                    next.push(self.mul(a, g));
                }
            }
            layer = next;
        }
        let mut ech = Echelon::new(f, self.dim());
        for v in layer {
            ech.insert(v.terms().to_vec());
        }
        ech
    }

    pub fn is_unit_free(&self, a: &AlgebraElement) -> bool {
        self.augmentation(a).is_zero()
    }

    /// Renders e.g. `z1^2*z2 + 2*z3` or `E + I'`.
    pub fn render(&self, a: &AlgebraElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        a.terms()
            .iter()
            .map(|&(i, c)| {
                let l = &self.labels[i as usize];
                if c == Scalar::ONE {
                    l.clone()
                } else if l == "1" {
                    wrap_coefficient(&f.render(c))
                } else {
                    format!("{}*{l}", wrap_coefficient(&f.render(c)))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the output of [`Algebra::render`].
    pub fn parse_element(&self, s: &str) -> Option<AlgebraElement> {
        let mut acc = AlgebraElement::zero();
        let s = s.trim();
        if s == "0" {
            return Some(acc);
        }
        for term in split_top_level(s, '+') {
            let term = term.trim();
            let parse_coef = |c: &str| {
                let c = c.trim();
                let c = c.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(c);
                self.field.parse_scalar(c)
            };
            let label = |m: &str| self.labels.iter().position(|l| l == m.trim());
            let (coef, idx) = if let Some(i) = label(term) {
                (Scalar::ONE, i)
            } else if let Some((c, m)) = term.split_once('*').filter(|(c, m)| parse_coef(c).is_some() && label(m).is_some()) {
                (parse_coef(c)?, label(m)?)
            } else {
                (parse_coef(term)?, 0)
            };
            acc = self.add(&acc, &AlgebraElement::term(idx, coef));
        }
        Some(acc)
    }
}

fn wrap_coefficient(s: &str) -> String {
    if s.contains('+') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn cmp_deglex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

fn monomial_label(e: &[u32], r: usize) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(i, &a)| {
            let v = if r == 1 { "z".to_string() } else { format!("z{}", i + 1) };
            if a == 1 {
                v
            } else {
                format!("{v}^{a}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Field> {
        Field::prime(2).unwrap()
    }

    #[test]
    fn truncated_basis_and_norm() {
        let a = Algebra::truncated_polynomial(f2(), &[2, 2, 2]).unwrap();
        assert_eq!(a.dim(), 8);
        let z = |i| a.z_pow(i, 1);
        let n = a.mul(&a.mul(&z(0), &z(1)), &z(2));
        assert_eq!(n, a.norm());
        assert!(a.mul(&z(0), &z(0)).is_zero());
        assert_eq!(a.label(0), "1");
        assert_eq!(a.label(1), "z1");
    }

    #[test]
    fn not_p_power() {
        assert_eq!(Algebra::truncated_polynomial(f2(), &[3, 2]).unwrap_err(), AlgebraError::NotPPower(3, 2));
    }

    #[test]
    fn cubic_truncation() {
        let a = Algebra::truncated_polynomial(Field::prime(3).unwrap(), &[3]).unwrap();
        assert!(a.mul(&a.z_pow(0, 1), &a.z_pow(0, 2)).is_zero());
    }

    #[test]
    fn quaternion_relations() {
        let q = Algebra::quaternion(f2()).unwrap();
        let [e, i, j, k, e2, _, _, k2] = [0, 1, 2, 3, 4, 5, 6, 7];
        assert_eq!(q.basis_product(i, j), Some(k));
        assert_eq!(q.basis_product(j, i), Some(k2));
        assert_eq!(q.basis_product(i, i), Some(e2));
        assert_eq!(q.basis_product(e2, e2), Some(e));
        let x = q.add(&AlgebraElement::basis(i), &q.one());
        let y = q.add(&AlgebraElement::basis(j), &q.one());
        assert_eq!(q.render(&q.mul(&x, &y)), "E + I + J + K");
        assert!(q.mul(&q.norm(), &x).is_zero());
    }

    #[test]
    fn quaternion_needs_char_two() {
        assert_eq!(Algebra::quaternion(Field::prime(3).unwrap()).unwrap_err(), AlgebraError::WrongCharacteristic);
    }

    #[test]
    fn ideals() {
        let a = Algebra::truncated_polynomial(f2(), &[2, 2, 2]).unwrap();
        let z12 = a.monomial(&[1, 1, 0]);
        assert!(a.ideal_member(&z12, IdealSpec::AugmentationPower(2)).unwrap());
        assert!(a.ideal_member(&z12, IdealSpec::JPower(2)).unwrap());
        assert!(!a.ideal_member(&a.one(), IdealSpec::AugmentationPower(1)).unwrap());
        let b = Algebra::truncated_polynomial(f2(), &[4, 2]).unwrap();
        assert!(b.ideal_member(&b.monomial(&[3, 1]), IdealSpec::JPower(2)).unwrap());
        assert!(!b.ideal_member(&b.monomial(&[2, 1]), IdealSpec::JPower(2)).unwrap());
        let q = Algebra::quaternion(f2()).unwrap();
        assert!(q.ideal_member(&q.norm(), IdealSpec::AugmentationPower(1)).unwrap());
        assert!(!q.ideal_member(&q.one(), IdealSpec::AugmentationPower(1)).unwrap());
        assert_eq!(q.ideal_member(&q.one(), IdealSpec::JPower(1)), Err(AlgebraError::InvalidSpec));
    }

    #[test]
    fn render_parse_roundtrip() {
        let a = Algebra::truncated_polynomial(Field::prime(3).unwrap(), &[3, 3]).unwrap();
        let x = a.add(&a.scale(Scalar(2), &a.monomial(&[1, 2])), &a.one());
        let s = a.render(&x);
        assert_eq!(s, "1 + 2*z1*z2^2");
        assert_eq!(a.parse_element(&s), Some(x));
    }
}
