//! The secondary multiplication: homotopy selections f2 for each family, the Hochschild
//! cocycle m built from f1 and f2, m-tables, and the coboundary test.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::IdealSpec;
use crate::generators::phi_commutator_homotopy;
use crate::graded::{windowed_homotopy, GradedMap, MapError};
use crate::lifting::{extend_imap_homotopy, imap_homotopy, LiftError};
use crate::linalg::{solve_rows, LinearOutcome, SparseVec};
use crate::resolution::Family;
use crate::ring::{Catalog, NamedElement, NamedMonomial, RingError, TateRing, Q8_CORE};
use crate::scalars::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SecondaryError {
    #[error("transcribed homotopy f2({0}, {1}) fails its check")]
    TranscriptionFailure(String, String),
    #[error("no I-map homotopy selection is promised for this group")]
    RegimeViolation,
    #[error("the defining combination for ({0}, {1}, {2}) is not a cocycle")]
    NotACocycle(String, String, String),
    #[error("homotopy construction failed for ({0}, {1}): {2}")]
    Construction(String, String, String),
    #[error("extension rule disagrees with direct evaluation at {0}")]
    CrossCheckMismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

type Pair = (NamedMonomial, NamedMonomial);

/// The Q8 homotopies f2(b, c) for b, c in ℬ, as words in p, q, r, x, y (composition left to
/// right); rows b and columns c follow the order 1, x, y, x², y², x²y.
const Q8_F2: [[&str; 6]; 6] = [
    ["0", "0", "0", "0", "0", "0"],
    ["0", "0", "q", "r", "xq+r", "ry"],
    ["0", "p+q", "0", "px+xp+xx", "xq+qy+r", "pxy+xpy+xxq+ry+rx+xxy"],
    ["0", "r", "0", "rx", "rx+ry+xxq", "rxy"],
    ["0", "r+qx+xp+xx", "xq+qy+r", "qxx+rx+pxx+yr", "xqy+qyy+ry", "qxxy+rxy+pxxy+yry"],
    ["0", "xxp+ry", "rx+ry+xxq", "xxpx+ryx", "xxqy+rxy+ryy", "xxpxy+ryxy"],
];

/// Homotopy selection plus the cocycle m it determines, for one group.
pub struct Secondary {
    ring: Arc<TateRing>,
    window: (i64, i64),
    /// Lifted homotopies are built this far beyond the window, so that composites with
    /// generator words stay defined on it.
    margin: i64,
    f2: Mutex<HashMap<Pair, GradedMap>>,
    letter_homotopies: Mutex<HashMap<Pair, GradedMap>>,
}

/// A generator letter of the positive abelian words: ū_i or v̄_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Letter {
    U(usize),
    V(usize),
}

impl Letter {
    fn factor(self) -> usize {
        match self {
            Letter::U(i) | Letter::V(i) => i,
        }
    }

    fn degree(self) -> i64 {
        match self {
            Letter::U(_) => 1,
            Letter::V(_) => 2,
        }
    }

    fn key(self) -> (usize, u8) {
        match self {
            Letter::U(i) => (i, 0),
            Letter::V(i) => (i, 1),
        }
    }

    fn monomial(self, r: usize) -> NamedMonomial {
        let (mut u, mut v) = (vec![0u8; r], vec![0i64; r]);
        match self {
            Letter::U(i) => u[i] = 1,
            Letter::V(i) => v[i] = 1,
        }
        NamedMonomial::Positive { u, v }
    }
}

fn letters(m: &NamedMonomial) -> Vec<Letter> {
    let NamedMonomial::Positive { u, v } = m else { return Vec::new() };
    let mut out = Vec::new();
    for i in 0..u.len() {
        out.extend(std::iter::repeat(Letter::U(i)).take(u[i] as usize));
        out.extend(std::iter::repeat(Letter::V(i)).take(v[i] as usize));
    }
    out
}

fn from_letters(word: &[Letter], r: usize) -> NamedMonomial {
    let (mut u, mut v) = (vec![0u8; r], vec![0i64; r]);
    for l in word {
        match *l {
            Letter::U(i) => u[i] += 1,
            Letter::V(i) => v[i] += 1,
        }
    }
    NamedMonomial::Positive { u, v }
}

impl Secondary {
    pub fn new(ring: Arc<TateRing>, window: (i64, i64)) -> Result<Secondary, SecondaryError> {
        if let Family::AbelianProduct { exponents } = ring.resolution().family() {
            if exponents.len() < 3 || exponents.contains(&3) {
                return Err(SecondaryError::RegimeViolation);
            }
        }
        let s = Secondary { ring, window, margin: 8, f2: Mutex::default(), letter_homotopies: Mutex::default() };
        if s.ring.q8().is_some() {
            s.verify_q8_table()?;
        }
        Ok(s)
    }

    pub fn ring(&self) -> &Arc<TateRing> {
        &self.ring
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn with_margin(mut self, margin: i64) -> Secondary {
        self.margin = margin;
        self
    }

    fn build_window(&self) -> (i64, i64) {
        (self.window.0 - self.margin, self.window.1 + self.margin)
    }

    /// f1 on a named monomial.
    pub fn f1(&self, b: &NamedMonomial) -> GradedMap {
        self.ring.cycle(b)
    }

    /// f1(bc) − f1(b)f1(c), the cocycle that df2(b, c) must equal.
    pub fn defect(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let bc = self.ring.multiply_monomials(b, c)?;
        Ok(self.ring.cycle_of(&bc)?.sub(&self.f1(b).compose(&self.f1(c))))
    }

    fn q8_word(&self, word: &str) -> GradedMap {
        let cat = self.ring.q8().unwrap();
        let res = self.ring.resolution();
        let terms: Vec<(Scalar, GradedMap)> = word
            .split('+')
            .filter(|t| *t != "0")
            .map(|t| {
                let maps: Vec<GradedMap> = t
                    .chars()
                    .map(|ch| match ch {
                        'p' => cat.p.clone(),
                        'q' => cat.q.clone(),
                        'r' => cat.r.clone(),
                        'x' => cat.x.clone(),
                        'y' => cat.y.clone(),
                        _ => panic!("bad letter in Q8 word {word}"),
                    })
                    .collect();
                (Scalar::ONE, GradedMap::product(res, &maps))
            })
            .collect();
        let degree = terms.first().map_or(0, |(_, f)| f.degree());
        GradedMap::linear_combination(res, degree, &terms)
    }

    /// The literal table entry for b, c in ℬ.
    pub fn q8_table_entry(&self, b: usize, c: usize) -> GradedMap {
        let word = Q8_F2[b][c];
        if word == "0" {
            let deg = (Q8_CORE[b].0 + Q8_CORE[b].1 + Q8_CORE[c].0 + Q8_CORE[c].1) as i64 - 1;
            return GradedMap::zero(self.ring.resolution(), deg);
        }
        self.q8_word(word)
    }

    fn verify_q8_table(&self) -> Result<(), SecondaryError> {
        let w = (-8, 8);
        for b in 0..6 {
            for c in 0..6 {
                let (mb, mc) = (NamedMonomial::Q8 { core: b, s: 0 }, NamedMonomial::Q8 { core: c, s: 0 });
                let f = self.q8_table_entry(b, c);
                let ok = f.d().equal_on(&self.defect(&mb, &mc)?, w)? && self.ring.class_of(&f)?.is_zero();
                if !ok {
                    return Err(SecondaryError::TranscriptionFailure(mb.to_string(), mc.to_string()));
                }
            }
        }
        Ok(())
    }

    /// The normalization f − f1(𝒞(f)).
    pub fn normalize(&self, f: &GradedMap) -> Result<GradedMap, SecondaryError> {
        let c = self.ring.class_of(f)?;
        if c.is_zero() {
            return Ok(f.clone());
        }
        Ok(f.sub(&self.ring.cycle_of(&c)?))
    }

    /// The stored homotopy f2(b, c), normalized so that 𝒞(f2(b, c)) = 0.
    pub fn f2(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let key = (b.clone(), c.clone());
        if let Some(f) = self.f2.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let raw = self.f2_raw(b, c)?;
        let f = self.normalize(&raw)?;
        self.f2.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    /// Builds f2 for many pairs in parallel.
    pub fn prepare(&self, pairs: &[Pair]) -> Result<(), SecondaryError> {
        pairs.par_iter().try_for_each(|(b, c)| self.f2(b, c).map(|_| ()))
    }

    /// All pairs stored so far.
    pub fn stored_pairs(&self) -> Vec<Pair> {
        let mut v: Vec<Pair> = self.f2.lock().unwrap().keys().cloned().collect();
        v.sort();
        v
    }

    /// f2 extended bilinearly.
    pub fn f2_elements(&self, x: &NamedElement, y: &NamedElement) -> Result<GradedMap, SecondaryError> {
        let f = self.ring.field();
        let mut terms = Vec::new();
        for (b, cb) in self.ring.terms(x)? {
            for (c, cc) in self.ring.terms(y)? {
                terms.push((f.mul(cb, cc), self.f2(&b, &c)?));
            }
        }
        Ok(GradedMap::linear_combination(self.ring.resolution(), x.degree + y.degree - 1, &terms))
    }

    fn f2_raw(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let res = self.ring.resolution().clone();
        let deg = b.degree() + c.degree() - 1;
        if b.is_unit() || c.is_unit() {
            return Ok(GradedMap::zero(&res, deg));
        }
        match (self.ring.catalog(), b, c) {
            (Catalog::Cyclic(cat), NamedMonomial::Cyclic { x: 1, y: i }, NamedMonomial::Cyclic { x: 1, y: j }) => {
                // x̄ȳ^i x̄ȳ^j = x̄²ȳ^{i+j} = d(q̄ȳ^{i+j}); for n = 2 the product is exact
                Ok(match &cat.q {
                    Some(q) => q.compose(&crate::generators::shift(&res, 2 * (i + j))).neg(),
                    None => GradedMap::zero(&res, deg),
                })
            }
            (Catalog::Cyclic(_), _, _) => Ok(GradedMap::zero(&res, deg)),
            (Catalog::Q8(cat), NamedMonomial::Q8 { core: bc, s: i }, NamedMonomial::Q8 { core: cc, s: j }) => {
                let base = self.q8_table_entry(*bc, *cc);
                let sh = match i + j {
                    0 => return Ok(base),
                    k if k > 0 => GradedMap::product(&res, &vec![cat.s.clone(); k as usize]),
                    k => GradedMap::product(&res, &vec![cat.s_inv.clone(); (-k) as usize]),
                };
                Ok(sh.compose(&base))
            }
            (Catalog::Abelian(_), NamedMonomial::Positive { .. }, NamedMonomial::Positive { .. }) => {
                self.sorting_homotopy(b, c)
            }
            (Catalog::Abelian(_), NamedMonomial::Phi { .. }, NamedMonomial::Phi { .. }) => {
                self.imap(&self.defect(b, c)?, b, c)
            }
            (Catalog::Abelian(_), NamedMonomial::Phi { .. }, NamedMonomial::Positive { .. }) => {
                self.phi_times_word(b, &letters(c))
            }
            (Catalog::Abelian(_), NamedMonomial::Positive { .. }, NamedMonomial::Phi { .. }) => {
                self.word_times_phi(&letters(b), c)
            }
            _ => panic!("monomials {b}, {c} do not belong to this ring"),
        }
    }

    fn imap(&self, g: &GradedMap, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let fail = |e: String| SecondaryError::Construction(b.to_string(), c.to_string(), e);
        if g.degree() <= 0 {
            return imap_homotopy(g, self.build_window()).map(|h| h.h).map_err(|e| fail(e.to_string()));
        }
        // positive degree: no closed form; solve the I-restricted system on a small core
        // window, then continue outward by one-sided lifts, widening the core on failure
        let (lo, hi) = self.build_window();
        let mut core = 2;
        loop {
            let w = (lo.max(-core), hi.min(core));
            let h = windowed_homotopy(g, w, true)?.ok_or_else(|| fail("no I-map homotopy on the window".into()))?;
            if w == (lo, hi) {
                return Ok(h);
            }
            let seed = (w.0..=w.1).map(|j| h.component(j).map(|c| (*c).clone())).collect::<Result<Vec<_>, _>>()?;
            match extend_imap_homotopy(g, w.0, seed, (lo, hi)) {
                Ok(ext) => return Ok(ext.h),
                Err(LiftError::NoLift(_)) => core *= 2,
                Err(e) => return Err(fail(e.to_string())),
            }
        }
    }

    /// Homotopy H with dH = f1(βℓ) − f1(β)f1(ℓ) for a named monomial and one letter, cached.
    fn letter_homotopy(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let key = (b.clone(), c.clone());
        if let Some(h) = self.letter_homotopies.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let h = self.imap(&self.defect(b, c)?, b, c)?;
        self.letter_homotopies.lock().unwrap().insert(key, h.clone());
        Ok(h)
    }

    /// f2(φ_β, x) peeling the last letter: H(φ, x'ℓ) = H(φ, x')f1(ℓ) + Σ c_γ H(φ_γ, ℓ), where
    /// φ·x' = Σ c_γ φ_γ.
    fn phi_times_word(&self, phi: &NamedMonomial, word: &[Letter]) -> Result<GradedMap, SecondaryError> {
        let res = self.ring.resolution();
        let r = res.factor_count();
        let (last, rest) = word.split_last().expect("non-empty word");
        let lm = last.monomial(r);
        let deg = phi.degree() + word.iter().map(|l| l.degree()).sum::<i64>() - 1;
        let mut terms: Vec<(Scalar, GradedMap)> = Vec::new();
        let prefix = if rest.is_empty() {
            self.ring.monomial(phi)?
        } else {
            terms.push((Scalar::ONE, self.phi_times_word(phi, rest)?.compose(&self.f1(&lm))));
            self.ring.multiply(&self.ring.monomial(phi)?, &self.ring.monomial(&from_letters(rest, r))?)?
        };
        for (g, cg) in self.ring.terms(&prefix)? {
            terms.push((cg, self.letter_homotopy(&g, &lm)?));
        }
        Ok(GradedMap::linear_combination(res, deg, &terms))
    }

    /// f2(x, φ_β) peeling the first letter: H(ℓx'', φ) = Σ c_γ H(ℓ, φ_γ) + (−1)^{|ℓ|} f1(ℓ)H(x'', φ),
    /// where x''·φ = Σ c_γ φ_γ.
    fn word_times_phi(&self, word: &[Letter], phi: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let res = self.ring.resolution();
        let f = self.ring.field();
        let r = res.factor_count();
        let (first, rest) = word.split_first().expect("non-empty word");
        let lm = first.monomial(r);
        let deg = phi.degree() + word.iter().map(|l| l.degree()).sum::<i64>() - 1;
        let mut terms: Vec<(Scalar, GradedMap)> = Vec::new();
        let suffix = if rest.is_empty() {
            self.ring.monomial(phi)?
        } else {
            terms.push((f.sign(first.degree()), self.f1(&lm).compose(&self.word_times_phi(rest, phi)?)));
            self.ring.multiply(&self.ring.monomial(&from_letters(rest, r))?, &self.ring.monomial(phi)?)?
        };
        for (g, cg) in self.ring.terms(&suffix)? {
            terms.push((cg, self.letter_homotopy(&lm, &g)?));
        }
        Ok(GradedMap::linear_combination(res, deg, &terms))
    }

    /// f2 for two positive monomials: sort the concatenated generator word by factor using the
    /// commutator homotopies, then reduce squares (ū_i² = v̄_i exactly for m_i = 2, ū_i² = dΦ(q̄_i)
    /// otherwise). With f1(b)f1(c) = σ·f1(word) + dK, f2 = −K.
    fn sorting_homotopy(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let res = self.ring.resolution().clone();
        let cat = self.ring.abelian().unwrap();
        let field = self.ring.field().clone();
        let r = cat.rank();
        let gen = |l: Letter| match l {
            Letter::U(i) => cat.u[i].clone(),
            Letter::V(i) => cat.v[i].clone(),
        };
        let factor_map = |l: Letter| match l {
            Letter::U(i) => cat.factors[i].x.clone(),
            Letter::V(i) => cat.factors[i].y.clone(),
        };
        let word_deg = |w: &[Letter]| w.iter().map(|l| l.degree()).sum::<i64>();
        let product = |w: &[Letter]| GradedMap::product(&res, &w.iter().map(|&l| gen(l)).collect::<Vec<_>>());
        let mut word: Vec<Letter> = letters(b);
        word.extend(letters(c));
        let deg = word_deg(&word) - 1;
        let mut sigma = Scalar::ONE;
        let mut k_terms: Vec<(Scalar, GradedMap)> = Vec::new();
        loop {
            let Some(p) = (0..word.len().saturating_sub(1)).find(|&p| word[p].key() > word[p + 1].key()) else { break };
            let (a, bb) = (word[p], word[p + 1]);
            if a.factor() != bb.factor() {
                let h = phi_commutator_homotopy(&res, &factor_map(a), a.factor(), &factor_map(bb), bb.factor())
                    .expect("distinct factors");
                let (left, right) = (&word[..p], &word[p + 2..]);
                let term = product(left).compose(&h).compose(&product(right));
                k_terms.push((field.mul(sigma, field.sign(word_deg(left))), term));
                sigma = field.mul(sigma, field.sign(a.degree() * bb.degree()));
            }
            word.swap(p, p + 1);
        }
        let mut zero = false;
        'reduce: loop {
            for p in 0..word.len().saturating_sub(1) {
                if let (Letter::U(i), Letter::U(j)) = (word[p], word[p + 1]) {
                    if i != j {
                        continue;
                    }
                    match cat.u_square_homotopy(i) {
                        None => {
                            word.splice(p..p + 2, [Letter::V(i)]);
                            word.sort_by_key(|l| l.key());
                            continue 'reduce;
                        }
                        Some(q) => {
                            let (left, right) = (&word[..p], &word[p + 2..]);
                            let term = product(left).compose(&q).compose(&product(right));
                            k_terms.push((field.mul(sigma, field.sign(word_deg(left))), term));
                            zero = true;
                            break 'reduce;
                        }
                    }
                }
            }
            break;
        }
        let expected = if zero {
            self.ring.zero(deg + 1)?
        } else {
            self.ring.scale(sigma, &self.ring.monomial(&from_letters(&word, r))?)
        };
        if self.ring.multiply_monomials(b, c)? != expected {
            return Err(SecondaryError::Construction(b.to_string(), c.to_string(), "sorted word disagrees with the ring".into()));
        }
        Ok(GradedMap::linear_combination(&res, deg, &k_terms).neg())
    }

    /// Checks df2(b, c) = f1(bc) − f1(b)f1(c) on the window interior.
    pub fn satisfies_d_condition(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<bool, SecondaryError> {
        let (lo, hi) = self.window;
        Ok(self.f2(b, c)?.d().equal_on(&self.defect(b, c)?, (lo, hi - 1))?)
    }

    pub fn is_imap(&self, b: &NamedMonomial, c: &NamedMonomial) -> Result<bool, SecondaryError> {
        Ok(self.f2(b, c)?.is_ideal_map(IdealSpec::AugmentationPower(1), self.window)?)
    }

    /// The map f2(a,b)f1(c) − f2(a,bc) + f2(ab,c) − (−1)^{|a|}f1(a)f2(b,c).
    pub fn m_cocycle(&self, a: &NamedMonomial, b: &NamedMonomial, c: &NamedMonomial) -> Result<GradedMap, SecondaryError> {
        let ring = &self.ring;
        let f = ring.field();
        let (ea, eb, ec) = (ring.monomial(a)?, ring.monomial(b)?, ring.monomial(c)?);
        let ab = ring.multiply(&ea, &eb)?;
        let bc = ring.multiply(&eb, &ec)?;
        let deg = a.degree() + b.degree() + c.degree() - 1;
        let terms = vec![
            (Scalar::ONE, self.f2(a, b)?.compose(&self.f1(c))),
            (f.neg(Scalar::ONE), self.f2_elements(&ea, &bc)?),
            (Scalar::ONE, self.f2_elements(&ab, &ec)?),
            (f.neg(f.sign(a.degree())), self.f1(a).compose(&self.f2(b, c)?)),
        ];
        Ok(GradedMap::linear_combination(ring.resolution(), deg, &terms))
    }

    /// m(a, b, c) = 𝒞 of `m_cocycle`, in named form.
    pub fn m(&self, a: &NamedMonomial, b: &NamedMonomial, c: &NamedMonomial) -> Result<NamedElement, SecondaryError> {
        Ok(self.ring.class_of(&self.m_cocycle(a, b, c)?)?)
    }

    /// m(a, b, c) with `m_cocycle` checked to be a cocycle on the window interior.
    pub fn m_checked(&self, a: &NamedMonomial, b: &NamedMonomial, c: &NamedMonomial) -> Result<NamedElement, SecondaryError> {
        let g = self.m_cocycle(a, b, c)?;
        let (lo, hi) = self.window;
        if !g.is_cocycle((lo + 1, hi - 2))? {
            return Err(SecondaryError::NotACocycle(a.to_string(), b.to_string(), c.to_string()));
        }
        Ok(self.ring.class_of(&g)?)
    }
}

/// m on a set of triples, zero elsewhere, with an optional extension rule.
#[derive(Clone, Debug, Serialize)]
pub struct MTable {
    pub entries: BTreeMap<(NamedMonomial, NamedMonomial, NamedMonomial), NamedElement>,
    /// Q8: m(as^{2h}, bs^i, cs^j) = m(a, b, c)s^{2h+i+j} with a ∈ ℬ ∪ ℬs, b, c ∈ ℬ.
    pub s_periodic: bool,
}

impl MTable {
    pub fn zero() -> MTable {
        MTable { entries: BTreeMap::new(), s_periodic: false }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(NamedMonomial, NamedMonomial, NamedMonomial), &NamedElement)> {
        self.entries.iter().filter(|(_, v)| !v.is_zero())
    }

    /// m on any triple of named monomials, using the extension rule when present.
    pub fn lookup(
        &self,
        ring: &TateRing,
        a: &NamedMonomial,
        b: &NamedMonomial,
        c: &NamedMonomial,
    ) -> Result<NamedElement, RingError> {
        let deg = a.degree() + b.degree() + c.degree() - 1;
        if !self.s_periodic {
            return match self.entries.get(&(a.clone(), b.clone(), c.clone())) {
                Some(v) => Ok(v.clone()),
                None => ring.zero(deg),
            };
        }
        let (NamedMonomial::Q8 { core: ac, s: i }, NamedMonomial::Q8 { core: bc, s: j }, NamedMonomial::Q8 { core: cc, s: k }) =
            (a, b, c)
        else {
            return ring.zero(deg);
        };
        let key = (
            NamedMonomial::Q8 { core: *ac, s: i.rem_euclid(2) },
            NamedMonomial::Q8 { core: *bc, s: 0 },
            NamedMonomial::Q8 { core: *cc, s: 0 },
        );
        let shift = i - i.rem_euclid(2) + j + k;
        match self.entries.get(&key) {
            Some(v) if !v.is_zero() => {
                ring.multiply(v, &ring.monomial(&NamedMonomial::Q8 { core: 0, s: shift })?)
            }
            _ => ring.zero(deg),
        }
    }

    /// m extended trilinearly to named elements.
    pub fn apply(
        &self,
        ring: &TateRing,
        a: &NamedElement,
        b: &NamedElement,
        c: &NamedElement,
    ) -> Result<NamedElement, RingError> {
        let f = ring.field();
        let mut out = ring.zero(a.degree + b.degree + c.degree - 1)?;
        for (ma, ca) in ring.terms(a)? {
            for (mb, cb) in ring.terms(b)? {
                for (mc, cc) in ring.terms(c)? {
                    let v = self.lookup(ring, &ma, &mb, &mc)?;
                    out = ring.axpy(&out, f.mul(f.mul(ca, cb), cc), &v);
                }
            }
        }
        Ok(out)
    }
}

/// The nonzero values of m on the Q8 fundamental domain, as (a, b, c, m(a, b, c)).
pub const Q8_NONZERO_ENTRIES: [(&str, &str, &str, &str); 28] = [
    ("x", "y", "x", "x^2"),
    ("y", "x", "y", "y^2"),
    ("s", "x", "y", "x*s + y*s"),
    ("s", "y", "x", "x*s + y*s"),
    ("s", "x", "x^2", "x^2*s"),
    ("s", "x^2", "x", "x^2*s"),
    ("s", "x", "y^2", "x^2*s + y^2*s"),
    ("s", "y^2", "x", "x^2*s + y^2*s"),
    ("s", "y", "y^2", "y^2*s"),
    ("s", "y^2", "y", "y^2*s"),
    ("s", "x", "x^2*y", "x^2*y*s"),
    ("s", "x^2*y", "x", "x^2*y*s"),
    ("x*s", "y", "x", "x^2*s + y^2*s"),
    ("y*s", "x", "y", "x^2*s + y^2*s"),
    ("x*s", "x", "y", "y^2*s"),
    ("y*s", "y", "x", "x^2*s"),
    ("x^2*s", "x", "y", "x^2*y*s"),
    ("y^2*s", "x", "y", "x^2*y*s"),
    ("x^2*s", "y", "x", "x^2*y*s"),
    ("y^2*s", "y", "x", "x^2*y*s"),
    ("y*s", "x", "x^2", "x^2*y*s"),
    ("y*s", "x^2", "x", "x^2*y*s"),
    ("x*s", "x", "y^2", "x^2*y*s"),
    ("y*s", "x", "y^2", "x^2*y*s"),
    ("x*s", "y^2", "x", "x^2*y*s"),
    ("y*s", "y^2", "x", "x^2*y*s"),
    ("x*s", "y", "y^2", "x^2*y*s"),
    ("x*s", "y^2", "y", "x^2*y*s"),
];

/// The Q8 fundamental domain (ℬ ∪ ℬs) × ℬ × ℬ in canonical order.
pub fn q8_fundamental_domain() -> Vec<(NamedMonomial, NamedMonomial, NamedMonomial)> {
    let mut out = Vec::new();
    for s in 0..2 {
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    out.push((
                        NamedMonomial::Q8 { core: a, s },
                        NamedMonomial::Q8 { core: b, s: 0 },
                        NamedMonomial::Q8 { core: c, s: 0 },
                    ));
                }
            }
        }
    }
    out
}

/// The basis ℬ = {1, x, y, x², y², x²y} of the Q8 fundamental domain.
pub fn q8_core() -> Vec<NamedMonomial> {
    (0..6).map(|core| NamedMonomial::Q8 { core, s: 0 }).collect()
}

/// Named monomials whose degrees have absolute values summing to at most `bound`, as triples.
pub fn triples_by_total_degree(ring: &TateRing, bound: i64) -> Result<Vec<(NamedMonomial, NamedMonomial, NamedMonomial)>, RingError> {
    let mut by_abs: Vec<Vec<NamedMonomial>> = Vec::new();
    for a in 0..=bound {
        let mut v = ring.basis(a)?;
        if a > 0 {
            v.extend(ring.basis(-a)?);
        }
        by_abs.push(v);
    }
    let mut out = Vec::new();
    for i in 0..=bound {
        for j in 0..=bound - i {
            for k in 0..=bound - i - j {
                for a in &by_abs[i as usize] {
                    for b in &by_abs[j as usize] {
                        for c in &by_abs[k as usize] {
                            out.push((a.clone(), b.clone(), c.clone()));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All triples of named monomials with degrees in the window.
pub fn triples_in_window(ring: &TateRing, window: (i64, i64)) -> Result<Vec<(NamedMonomial, NamedMonomial, NamedMonomial)>, RingError> {
    let mut monos = Vec::new();
    for d in window.0..=window.1 {
        monos.extend(ring.basis(d)?);
    }
    let mut out = Vec::with_capacity(monos.len().pow(3));
    for a in &monos {
        for b in &monos {
            for c in &monos {
                out.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    Ok(out)
}

/// The pairs of f2 touched by evaluating m on the given triples.
pub fn pairs_for_triples(
    ring: &TateRing,
    triples: &[(NamedMonomial, NamedMonomial, NamedMonomial)],
) -> Result<Vec<Pair>, RingError> {
    let mut set: std::collections::BTreeSet<Pair> = std::collections::BTreeSet::new();
    for (a, b, c) in triples {
        set.insert((a.clone(), b.clone()));
        set.insert((b.clone(), c.clone()));
        for (x, _) in ring.terms(&ring.multiply_monomials(a, b)?)? {
            set.insert((x, c.clone()));
        }
        for (x, _) in ring.terms(&ring.multiply_monomials(b, c)?)? {
            set.insert((a.clone(), x));
        }
    }
    Ok(set.into_iter().collect())
}

impl Secondary {
    /// m on an explicit list of triples, evaluated in parallel.
    pub fn table(&self, triples: &[(NamedMonomial, NamedMonomial, NamedMonomial)], checked: bool) -> Result<MTable, SecondaryError> {
        let pairs = pairs_for_triples(&self.ring, triples)?;
        self.prepare(&pairs)?;
        let values: Vec<_> = triples
            .par_iter()
            .map(|(a, b, c)| {
                let v = if checked { self.m_checked(a, b, c) } else { self.m(a, b, c) }?;
                Ok(((a.clone(), b.clone(), c.clone()), v))
            })
            .collect::<Result<_, SecondaryError>>()?;
        Ok(MTable { entries: values.into_iter().collect(), s_periodic: false })
    }

    /// The full Q8 table on its fundamental domain, with the rows a ∈ ℬs cross-checked against
    /// Extended by m(as, b, c) = a·m(s, b, c) + m(a, b, c)·s.
    pub fn q8_table(&self) -> Result<MTable, SecondaryError> {
        let mut t = self.table(&q8_fundamental_domain(), true)?;
        t.s_periodic = true;
        let ring = &self.ring;
        let s = ring.monomial(&NamedMonomial::Q8 { core: 0, s: 1 })?;
        let s_mono = NamedMonomial::Q8 { core: 0, s: 1 };
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let (ma, mb, mc) =
                        (NamedMonomial::Q8 { core: a, s: 0 }, NamedMonomial::Q8 { core: b, s: 0 }, NamedMonomial::Q8 { core: c, s: 0 });
                    let lhs = &t.entries[&(NamedMonomial::Q8 { core: a, s: 1 }, mb.clone(), mc.clone())];
                    let first = ring.multiply(&ring.monomial(&ma)?, &t.entries[&(s_mono.clone(), mb.clone(), mc.clone())])?;
                    let second = ring.multiply(&t.entries[&(ma.clone(), mb.clone(), mc.clone())], &s)?;
                    if *lhs != ring.axpy(&first, Scalar::ONE, &second) {
                        return Err(SecondaryError::CrossCheckMismatch(format!("({}s, {mb}, {mc})", ma)));
                    }
                }
            }
        }
        self.q8_conjugation_cross_check(&t)?;
        Ok(t)
    }

    /// m(s, b, c) = 𝒞(h(b, c))·s with h(b, c) = s̄f2(b, c)s̄⁻¹ − f2(b, c).
    fn q8_conjugation_cross_check(&self, table: &MTable) -> Result<(), SecondaryError> {
        let ring = &self.ring;
        let cat = ring.q8().unwrap();
        let s = ring.monomial(&NamedMonomial::Q8 { core: 0, s: 1 })?;
        for b in 0..6 {
            for c in 0..6 {
                let f = self.q8_table_entry(b, c);
                let h = cat.s.compose(&f).compose(&cat.s_inv).sub(&f);
                let via_h = ring.multiply(&ring.class_of(&h)?, &s)?;
                let (mb, mc) = (NamedMonomial::Q8 { core: b, s: 0 }, NamedMonomial::Q8 { core: c, s: 0 });
                if via_h != table.entries[&(NamedMonomial::Q8 { core: 0, s: 1 }, mb.clone(), mc.clone())] {
                    return Err(SecondaryError::CrossCheckMismatch(format!("(s, {mb}, {mc})")));
                }
            }
        }
        Ok(())
    }

    /// Compares the extension rule against direct evaluation on triples with shifted s-powers.
    pub fn q8_extension_cross_check(&self, table: &MTable, shifts: &[(i64, i64, i64)]) -> Result<(), SecondaryError> {
        let ring = &self.ring;
        for &(h, i, j) in shifts {
            for (a, b, c) in q8_fundamental_domain() {
                let lift = |m: &NamedMonomial, k: i64| match m {
                    NamedMonomial::Q8 { core, s } => NamedMonomial::Q8 { core: *core, s: s + k },
                    _ => unreachable!(),
                };
                let (a2, b2, c2) = (lift(&a, 2 * h), lift(&b, i), lift(&c, j));
                let direct = self.m(&a2, &b2, &c2)?;
                if direct != table.lookup(ring, &a2, &b2, &c2)? {
                    return Err(SecondaryError::CrossCheckMismatch(format!("({a2}, {b2}, {c2})")));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a Hochschild check.
#[derive(Clone, Debug, Serialize)]
pub struct HochschildReport {
    pub tuples: usize,
    pub failures: Vec<String>,
}

impl HochschildReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// (−1)^{|a|} a·m(b,c,d) − m(ab,c,d) + m(a,bc,d) − m(a,b,cd) + m(a,b,c)·d = 0 on all 4-tuples of
/// the given monomials.
pub fn hochschild_cocycle_check(ring: &TateRing, table: &MTable, monomials: &[NamedMonomial]) -> Result<HochschildReport, RingError> {
    let f = ring.field();
    let mut failures = Vec::new();
    let mut tuples = 0;
    let el: Vec<NamedElement> = monomials.iter().map(|m| ring.monomial(m)).collect::<Result<_, _>>()?;
    for (ia, a) in monomials.iter().enumerate() {
        for (ib, b) in monomials.iter().enumerate() {
            let ab = ring.multiply(&el[ia], &el[ib])?;
            for (ic, c) in monomials.iter().enumerate() {
                let bc = ring.multiply(&el[ib], &el[ic])?;
                let mabc = table.lookup(ring, a, b, c)?;
                for (id, d) in monomials.iter().enumerate() {
                    tuples += 1;
                    let cd = ring.multiply(&el[ic], &el[id])?;
                    let t1 = ring.multiply(&el[ia], &table.lookup(ring, b, c, d)?)?;
                    let t2 = table.apply(ring, &ab, &el[ic], &el[id])?;
                    let t3 = table.apply(ring, &el[ia], &bc, &el[id])?;
                    let t4 = table.apply(ring, &el[ia], &el[ib], &cd)?;
                    let t5 = ring.multiply(&mabc, &el[id])?;
                    let neg = f.neg(Scalar::ONE);
                    let mut s = ring.scale(f.sign(a.degree()), &t1);
                    s = ring.axpy(&s, neg, &t2);
                    s = ring.axpy(&s, Scalar::ONE, &t3);
                    s = ring.axpy(&s, neg, &t4);
                    s = ring.axpy(&s, Scalar::ONE, &t5);
                    if !s.is_zero() {
                        failures.push(format!("({a}, {b}, {c}, {d}) gives {}", ring.render(&s)));
                    }
                }
            }
        }
    }
    Ok(HochschildReport { tuples, failures })
}

/// One generated equation m(a,b,c) = (dg)(a,b,c), restricted to one coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionRow {
    pub triple: (String, String, String),
    pub coordinate: String,
}

#[derive(Clone, Debug, Serialize)]
pub enum Obstruction {
    /// A cochain g on the sector with dg = m there, listed per pair.
    Consistent { g: Vec<((String, String), String)> },
    /// Rows whose combination reads 0 = nonzero.
    Inconsistent { certificate: Vec<(ObstructionRow, String)>, rows: Vec<ObstructionRow> },
}

/// Decides whether m = dg can hold for a Hochschild (2, −1)-cochain g on the sector's pairs,
/// using every triple whose expansion stays within the sector.
pub fn coboundary_obstruction(ring: &TateRing, table: &MTable, sector: &[NamedMonomial]) -> Result<Obstruction, RingError> {
    let f = ring.field();
    let mut offsets: HashMap<Pair, (usize, i64)> = HashMap::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut unknowns = 0;
    for b in sector {
        for c in sector {
            let d = b.degree() + c.degree() - 1;
            offsets.insert((b.clone(), c.clone()), (unknowns, d));
            pairs.push((b.clone(), c.clone()));
            unknowns += ring.basis(d)?.len();
        }
    }
    let in_sector = |e: &NamedElement| -> Result<bool, RingError> {
        Ok(ring.terms(e)?.iter().all(|(m, _)| sector.contains(m)))
    };
    let mut rows: Vec<(SparseVec, Scalar)> = Vec::new();
    let mut labels: Vec<ObstructionRow> = Vec::new();
    for a in sector {
        for b in sector {
            for c in sector {
                let (ea, eb, ec) = (ring.monomial(a)?, ring.monomial(b)?, ring.monomial(c)?);
                let ab = ring.multiply(&ea, &eb)?;
                let bc = ring.multiply(&eb, &ec)?;
                if !in_sector(&ab)? || !in_sector(&bc)? {
                    continue;
                }
                let deg = a.degree() + b.degree() + c.degree() - 1;
                let basis = ring.basis(deg)?;
                let mut eqs: Vec<BTreeMap<u32, Scalar>> = vec![BTreeMap::new(); basis.len()];
                let add = |eqs: &mut Vec<BTreeMap<u32, Scalar>>, coef: Scalar, left: Option<&NamedElement>, pair: &Pair, right: Option<&NamedElement>| -> Result<(), RingError> {
                    let (off, d) = offsets[pair];
                    for (k, gm) in ring.basis(d)?.iter().enumerate() {
                        let mut v = ring.monomial(gm)?;
                        if let Some(l) = left {
                            v = ring.multiply(l, &v)?;
                        }
                        if let Some(r) = right {
                            v = ring.multiply(&v, r)?;
                        }
                        for (row, x) in v.coords.iter().enumerate() {
                            if !x.is_zero() {
                                let e = eqs[row].entry((off + k) as u32).or_insert(Scalar::ZERO);
                                *e = f.add(*e, f.mul(coef, *x));
                            }
                        }
                    }
                    Ok(())
                };
                let neg = f.neg(Scalar::ONE);
                add(&mut eqs, f.sign(a.degree()), Some(&ea), &(b.clone(), c.clone()), None)?;
                for (x, cx) in ring.terms(&ab)? {
                    add(&mut eqs, f.mul(neg, cx), None, &(x, c.clone()), None)?;
                }
                for (x, cx) in ring.terms(&bc)? {
                    add(&mut eqs, cx, None, &(a.clone(), x), None)?;
                }
                add(&mut eqs, neg, None, &(a.clone(), b.clone()), Some(&ec))?;
                let m = table.lookup(ring, a, b, c)?;
                for (row, eq) in eqs.into_iter().enumerate() {
                    let lhs: SparseVec = eq.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    if lhs.is_empty() && m.coords[row].is_zero() {
                        continue;
                    }
                    rows.push((lhs, m.coords[row]));
                    labels.push(ObstructionRow {
                        triple: (a.to_string(), b.to_string(), c.to_string()),
                        coordinate: basis[row].to_string(),
                    });
                }
            }
        }
    }
    Ok(match solve_rows(f, unknowns, &rows) {
        LinearOutcome::Solution(x) => {
            let mut g = Vec::new();
            for p in &pairs {
                let (off, d) = offsets[p];
                let n = ring.basis(d)?.len();
                let e = NamedElement { degree: d, coords: x[off..off + n].to_vec() };
                if !e.is_zero() {
                    g.push(((p.0.to_string(), p.1.to_string()), ring.render(&e)));
                }
            }
            Obstruction::Consistent { g }
        }
        LinearOutcome::Inconsistent(combo) => {
            let certificate = minimize_certificate(f, unknowns, &rows, combo)
                .into_iter()
                .map(|(i, c)| (labels[i].clone(), f.render(c)))
                .collect();
            Obstruction::Inconsistent { certificate, rows: labels }
        }
    })
}

/// Drops rows from an inconsistent combination while the remainder stays inconsistent.
fn minimize_certificate(
    f: &Arc<crate::scalars::Field>,
    unknowns: usize,
    rows: &[(SparseVec, Scalar)],
    combo: SparseVec,
) -> Vec<(usize, Scalar)> {
    let mut cert: Vec<(usize, Scalar)> = combo.iter().map(|&(i, c)| (i as usize, c)).collect();
    let mut k = 0;
    while k < cert.len() {
        let keep: Vec<usize> = cert.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &(i, _))| i).collect();
        let sub: Vec<(SparseVec, Scalar)> = keep.iter().map(|&i| rows[i].clone()).collect();
        match solve_rows(f, unknowns, &sub) {
            LinearOutcome::Inconsistent(c) => {
                cert = c.iter().map(|&(j, x)| (keep[j as usize], x)).collect();
                k = 0;
            }
            LinearOutcome::Solution(_) => k += 1,
        }
    }
    cert.sort_by_key(|&(i, _)| i);
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::resolution::Resolution;
    use crate::scalars::Field;

    fn q8() -> Arc<TateRing> {
        let alg = Algebra::quaternion(Field::prime(2).unwrap()).unwrap();
        Arc::new(TateRing::new(&Resolution::q8(alg).unwrap()).unwrap())
    }

    fn single(ring: &TateRing, s: &str) -> NamedMonomial {
        let t = ring.terms(&ring.parse(s).unwrap()).unwrap();
        assert_eq!(t.len(), 1, "{s}");
        t[0].0.clone()
    }


    #[test]
    fn q8_f2_table_is_verified_and_normalized() {
        let ring = q8();
        let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
        let cat = ring.q8().unwrap();
        assert!(sec.q8_table_entry(1, 2).equal_on(&cat.q, (-8, 8)).unwrap());
        assert!(sec.q8_table_entry(2, 1).equal_on(&cat.p.add(&cat.q), (-8, 8)).unwrap());
        for b in 0..6 {
            let f = sec.q8_table_entry(b, 0);
            assert!(f.is_zero_on((-8, 8)).unwrap());
            let raw = sec.q8_table_entry(b, 3);
            assert!(sec.normalize(&raw).unwrap().equal_on(&raw, (-8, 8)).unwrap());
        }
    }

    #[test]
    fn q8_table_matches_known_entries() {
        let ring = q8();
        let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
        let table = sec.q8_table().unwrap();
        let mut expected = BTreeMap::new();
        for (a, b, c, v) in Q8_NONZERO_ENTRIES {
            let key = (single(&ring, a), single(&ring, b), single(&ring, c));
            expected.insert(key, ring.parse(v).unwrap());
        }
        for (k, v) in &table.entries {
            match expected.get(k) {
                Some(e) => assert_eq!(v, e, "{:?}", k),
                None => assert!(v.is_zero(), "unexpected m{:?} = {}", k, ring.render(v)),
            }
        }
        assert_eq!(table.nonzero().count(), 28);
    }

    fn q8_setup() -> (Arc<TateRing>, Secondary, MTable) {
        let ring = q8();
        let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
        let table = sec.q8_table().unwrap();
        (ring, sec, table)
    }

    #[test]
    fn q8_extension_rule_matches_direct_evaluation() {
        let (_, sec, table) = q8_setup();
        sec.q8_extension_cross_check(&table, &[(1, 0, 0), (0, 1, 0), (0, 0, -1), (-1, 1, 1)]).unwrap();
    }

    #[test]
    fn q8_table_is_a_hochschild_cocycle() {
        let (ring, _, table) = q8_setup();
        let mut monos = q8_core();
        monos.extend((0..6).map(|core| NamedMonomial::Q8 { core, s: 1 }));
        let report = hochschild_cocycle_check(&ring, &table, &monos).unwrap();
        assert!(report.passed(), "{:?}", &report.failures[..report.failures.len().min(5)]);
        assert!(hochschild_cocycle_check(&ring, &MTable::zero(), &monos).unwrap().passed());

        let mut broken = table.clone();
        let key = (single(&ring, "x"), single(&ring, "y"), single(&ring, "x"));
        broken.entries.insert(key, ring.zero(2).unwrap());
        assert!(!hochschild_cocycle_check(&ring, &broken, &monos).unwrap().passed());
    }

    #[test]
    fn q8_table_is_not_a_coboundary() {
        let (ring, _, table) = q8_setup();
        let Obstruction::Inconsistent { certificate, rows } = coboundary_obstruction(&ring, &table, &q8_core()).unwrap() else {
            panic!("expected an inconsistent system");
        };
        for t in [("y", "x", "y"), ("x", "y", "y"), ("x", "x", "x"), ("x", "y", "x"), ("y", "y", "x")] {
            let t = (t.0.to_string(), t.1.to_string(), t.2.to_string());
            assert!(rows.iter().any(|r| r.triple == t), "{t:?}");
        }
        assert!(!certificate.is_empty());
        let Obstruction::Consistent { g } = coboundary_obstruction(&ring, &MTable::zero(), &q8_core()).unwrap() else {
            panic!("zero table must be a coboundary");
        };
        assert!(g.is_empty());
    }

    #[test]
    fn q8_intermediate_tables() {
        let (ring, sec, _) = q8_setup();
        let cat = ring.q8().unwrap();
        for (gen, at, value) in [(&cat.x, (2, 1), "x^2"), (&cat.y, (1, 2), "y^2")] {
            for b in 0..6 {
                for c in 0..6 {
                    let v = ring.class_of(&gen.compose(&sec.q8_table_entry(b, c))).unwrap();
                    if (b, c) == at {
                        assert_eq!(v, ring.parse(value).unwrap());
                    } else {
                        assert!(v.is_zero(), "({b}, {c}) gives {}", ring.render(&v));
                    }
                }
            }
        }
    }

    #[test]
    fn q8_left_multiplication_identities() {
        let ring = q8();
        let cat = ring.q8().unwrap();
        let res = ring.resolution();
        let mut words: Vec<Vec<GradedMap>> = vec![Vec::new()];
        let mut frontier = words.clone();
        for _ in 0..4 {
            frontier = frontier
                .iter()
                .flat_map(|w| [&cat.x, &cat.y].map(|g| [w.clone(), vec![g.clone()]].concat()))
                .collect();
            words.extend(frontier.iter().cloned());
        }
        let words: Vec<GradedMap> = words.iter().map(|w| GradedMap::product(res, w)).collect();
        let c = |f: &GradedMap| ring.class_of(f).unwrap();
        let times = |m: &str, a: &GradedMap| ring.multiply(&ring.parse(m).unwrap(), &c(a)).unwrap();
        for a in &words {
            assert!(c(&cat.p.compose(a)).is_zero() && c(&cat.q.compose(a)).is_zero());
            assert_eq!(c(&cat.x.compose(&cat.p).compose(a)), times("x^2", a));
            assert_eq!(c(&cat.y.compose(&cat.p).compose(a)), times("y^2", a));
            assert_eq!(c(&cat.y.compose(&cat.q).compose(a)), times("y^2", a));
            assert!(c(&cat.x.compose(&cat.q).compose(a)).is_zero());
            for b in &words {
                assert!(c(&b.compose(&cat.r).compose(a)).is_zero());
                if b.degree() >= 2 {
                    assert!(c(&b.compose(&cat.p).compose(a)).is_zero());
                    assert!(c(&b.compose(&cat.q).compose(a)).is_zero());
                }
            }
        }
    }

    fn cyclic(p: u32, n: u32) -> Arc<TateRing> {
        let alg = Algebra::truncated_polynomial(Field::prime(p).unwrap(), &[n]).unwrap();
        Arc::new(TateRing::new(&Resolution::for_algebra(alg)).unwrap())
    }

    #[test]
    fn cyclic_three_has_nontrivial_cocycle() {
        let ring = cyclic(3, 3);
        let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
        let xy = |i: i64| NamedMonomial::Cyclic { x: 1, y: i };
        let table = sec.table(&triples_in_window(&ring, (-4, 4)).unwrap(), true).unwrap();
        for ((a, b, c), v) in &table.entries {
            match (a, b, c) {
                (NamedMonomial::Cyclic { x: 1, y: i }, NamedMonomial::Cyclic { x: 1, y: j }, NamedMonomial::Cyclic { x: 1, y: l }) => {
                    let y = ring.monomial(&NamedMonomial::Cyclic { x: 0, y: i + j + l + 1 }).unwrap();
                    assert_eq!(*v, ring.scale(ring.field().neg(Scalar::ONE), &y));
                }
                _ => assert!(v.is_zero()),
            }
        }
        assert_eq!(sec.m(&xy(0), &xy(-1), &xy(2)).unwrap(), ring.parse("-y^2").unwrap());
        let monos: Vec<NamedMonomial> = (-2..=2).flat_map(|d| ring.basis(d).unwrap()).collect();
        assert!(hochschild_cocycle_check(&ring, &table, &monos).unwrap().passed());
    }

    #[test]
    fn other_cyclic_groups_have_zero_tables() {
        for (p, n) in [(2, 2), (2, 4), (2, 8), (3, 9), (3, 27), (5, 5)] {
            let ring = cyclic(p, n);
            let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
            let table = sec.table(&triples_in_window(&ring, (-8, 8)).unwrap(), true).unwrap();
            assert_eq!(table.nonzero().count(), 0, "C_{n}");
            if n == 2 {
                assert!(sec.stored_pairs().iter().all(|(b, c)| sec.f2(b, c).unwrap().is_zero_on((-8, 8)).unwrap()));
            }
            for (b, c) in sec.stored_pairs().iter().take(200) {
                assert!(sec.satisfies_d_condition(b, c).unwrap());
            }
        }
    }

    fn abelian(p: u32, ms: &[u32]) -> Arc<TateRing> {
        let alg = Algebra::truncated_polynomial(Field::prime(p).unwrap(), ms).unwrap();
        Arc::new(TateRing::new(&Resolution::for_algebra(alg)).unwrap())
    }

    #[test]
    fn abelian_regime_is_enforced() {
        for ms in [&[2, 2][..], &[3, 3, 3][..], &[9, 3, 3][..]] {
            let p = if ms.contains(&2) && !ms.contains(&3) { 2 } else { 3 };
            let ring = abelian(p, ms);
            assert!(matches!(Secondary::new(ring, (-8, 8)), Err(SecondaryError::RegimeViolation)));
        }
    }

    #[test]
    fn elementary_abelian_table_vanishes() {
        let ring = abelian(2, &[2, 2, 2]);
        let sec = Secondary::new(ring.clone(), (-8, 8)).unwrap();
        let triples = triples_by_total_degree(&ring, 3).unwrap();
        let table = sec.table(&triples, true).unwrap();
        assert_eq!(table.nonzero().count(), 0);
        for (b, c) in sec.stored_pairs() {
            assert!(sec.is_imap(&b, &c).unwrap(), "({b}, {c})");
            assert!(sec.satisfies_d_condition(&b, &c).unwrap(), "({b}, {c})");
        }
    }
}
