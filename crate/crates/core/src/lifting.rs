//! I-map null homotopies for abelian resolutions: the monomial sets ℐ_{α,β} and 𝒥_{α,β},
//! the induced splittings of Hom-spaces and the projective lifting steps built on them.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraElement, IdealSpec};
use crate::graded::{GradedMap, MapError};
use crate::module_map::ModuleMap;
use crate::resolution::{bracket, Family, Resolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("I-map null homotopies do not exist in general for positive degree {0}")]
    PositiveDegree(i64),
    #[error("input is not a J_2-map in component {0}")]
    NotJ2Map(i64),
    #[error("no lift exists in degree {0}")]
    NoLift(i64),
    #[error("resolution is not a tensor product of cyclic resolutions")]
    NotAbelian,
    #[error("constructed homotopy failed its certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// ℐ_{α,β} and 𝒥_{α,β} for target label α and source label β, as monomial basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSplit {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    pub i_set: BTreeSet<usize>,
    pub j_set: BTreeSet<usize>,
}

impl MonomialSplit {
    pub fn in_i(&self, monomial: usize) -> bool {
        self.i_set.contains(&monomial)
    }

    pub fn in_j(&self, monomial: usize) -> bool {
        self.j_set.contains(&monomial)
    }
}

pub fn monomial_split(alg: &Algebra, alpha: &[i64], beta: &[i64]) -> MonomialSplit {
    let ms = alg.truncation();
    let r = ms.len();
    assert!(alpha.len() == r && beta.len() == r, "label length mismatch");
    let eligible: Vec<(usize, u32)> = (0..r)
        .filter_map(|s| {
            let (a, b) = (bracket(alpha[s] + 1, ms[s]), bracket(beta[s] + 1, ms[s]));
            (a >= b).then(|| (s, a - b))
        })
        .collect();
    let mut i_exps: BTreeSet<Vec<u32>> = BTreeSet::new();
    for mask in 0u32..(1 << eligible.len()) {
        let mut e = vec![0u32; r];
        for (bit, &(s, x)) in eligible.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                e[s] = x;
            }
        }
        i_exps.insert(e);
    }
    let mut j_exps: BTreeSet<Vec<u32>> = BTreeSet::new();
    for e in &i_exps {
        for j in (0..r).filter(|&j| e[j] == 0) {
            for nu in [bracket(alpha[j] + 1, ms[j]), bracket(beta[j], ms[j])] {
                let mut f = e.clone();
                f[j] = nu;
                j_exps.insert(f);
            }
        }
    }
    let index = |e: &Vec<u32>| alg.monomial_index(e).expect("exponents within truncation");
    MonomialSplit {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        i_set: i_exps.iter().map(index).collect(),
        j_set: j_exps.iter().map(index).collect(),
    }
}

/// Which monomial set splits the entries: 𝒥 gives A ⊕ B, ℐ gives C ⊕ D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    AB,
    CD,
}

/// A map split entrywise into its part off the monomial set (A or C) and on it (B or D).
#[derive(Clone, Debug)]
pub struct SplitClassification {
    pub kind: SplitKind,
    pub complement: ModuleMap,
    pub spanned: ModuleMap,
}

impl SplitClassification {
    pub fn in_complement(&self) -> bool {
        self.spanned.is_zero()
    }

    pub fn in_span(&self) -> bool {
        self.complement.is_zero()
    }
}

fn require_abelian(res: &Resolution) -> Result<(), LiftError> {
    match res.family() {
        Family::AbelianProduct { .. } | Family::Cyclic { .. } => Ok(()),
        _ => Err(LiftError::NotAbelian),
    }
}

/// Splits `map : P̂_source → P̂_target` entrywise according to `kind`.
pub fn classify(res: &Resolution, map: &ModuleMap, source: i64, target: i64, kind: SplitKind) -> SplitClassification {
    let alg = res.algebra();
    let mut complement = ModuleMap::zero(map.rows(), map.cols());
    let mut spanned = ModuleMap::zero(map.rows(), map.cols());
    for (i, j, e) in map.entries() {
        let split = monomial_split(alg, &res.multi_index(target, i), &res.multi_index(source, j));
        let (mut on, mut off) = (Vec::new(), Vec::new());
        for &(b, c) in e.terms() {
            let hit = match kind {
                SplitKind::AB => split.in_j(b as usize),
                SplitKind::CD => split.in_i(b as usize),
            };
            if hit {
                on.push((b, c));
            } else {
                off.push((b, c));
            }
        }
        spanned.set(i, j, AlgebraElement::from_sorted(on));
        complement.set(i, j, AlgebraElement::from_sorted(off));
    }
    SplitClassification { kind, complement, spanned }
}

/// Removes the ℐ-monomials from every entry; the result lies in C and is an I-map.
pub fn project_to_c(res: &Resolution, map: &ModuleMap, source: i64, target: i64) -> ModuleMap {
    classify(res, map, source, target, SplitKind::CD).complement
}

/// A lifting step's result and whether the generic I-restricted solve had to be used.
#[derive(Clone, Debug)]
pub struct LiftStep {
    pub map: ModuleMap,
    pub fallback: bool,
}

/// h : P̂_source → P̂_n in C with ∂_n ∘ h = g, for g : P̂_source → P̂_{n−1}.
pub fn lift_step_positive(res: &Arc<Resolution>, g: &ModuleMap, source: i64, n: i64) -> Result<LiftStep, LiftError> {
    require_abelian(res)?;
    let alg = res.algebra();
    let free = res.left_divide(n, g, false).ok_or(LiftError::NoLift(n))?;
    let h = project_to_c(res, &free, source, n);
    if res.differential(n).compose(alg, &h) == *g {
        return Ok(LiftStep { map: h, fallback: false });
    }
    let h = res.left_divide(n, g, true).ok_or(LiftError::NoLift(n))?;
    Ok(LiftStep { map: h, fallback: true })
}

/// h : P̂_{n−1} → P̂_target in C with h ∘ ∂_n = g, for g : P̂_n → P̂_target.
pub fn lift_step_negative(res: &Arc<Resolution>, g: &ModuleMap, target: i64, n: i64) -> Result<LiftStep, LiftError> {
    require_abelian(res)?;
    let alg = res.algebra();
    let free = res.right_divide(n, g, false).ok_or(LiftError::NoLift(n))?;
    let h = project_to_c(res, &free, n - 1, target);
    if h.compose(alg, &res.differential(n)) == *g {
        return Ok(LiftStep { map: h, fallback: false });
    }
    let h = res.right_divide(n, g, true).ok_or(LiftError::NoLift(n))?;
    Ok(LiftStep { map: h, fallback: true })
}

/// A certified I-map null homotopy on a window, with the components where the projected
/// lift failed and the I-restricted solve was used instead.
#[derive(Clone, Debug)]
pub struct ImapHomotopy {
    pub h: GradedMap,
    pub window: (i64, i64),
    pub fallbacks: Vec<i64>,
}

/// I-map null homotopy of a J_2-map cocycle of non-positive degree.
pub fn null_homotopy_imap(f: &GradedMap, window: (i64, i64)) -> Result<ImapHomotopy, LiftError> {
    if f.degree() > 0 {
        return Err(LiftError::PositiveDegree(f.degree()));
    }
    let alg = f.resolution().algebra().clone();
    for j in window.0..=window.1 {
        if !f.component(j)?.in_ideal(&alg, IdealSpec::JPower(2)) {
            return Err(LiftError::NotJ2Map(j));
        }
    }
    imap_homotopy(f, window)
}

/// The two-sided induction from h_0 = 0 without the J_2 precondition; every step is checked,
/// so the output is certified whenever this returns Ok.
pub fn imap_homotopy(f: &GradedMap, window: (i64, i64)) -> Result<ImapHomotopy, LiftError> {
    if f.degree() > 0 {
        return Err(LiftError::PositiveDegree(f.degree()));
    }
    let res = f.resolution();
    extend_imap_homotopy(f, 0, vec![ModuleMap::zero(res.rank(0), res.rank(f.degree() - 1))], window)
}

/// Continues given components h_{start}, …, h_{start+len−1} of a null homotopy of `f` outward to
/// the window by the same one-sided lifting steps, then certifies the result.
pub fn extend_imap_homotopy(
    f: &GradedMap,
    start: i64,
    seed: Vec<ModuleMap>,
    window: (i64, i64),
) -> Result<ImapHomotopy, LiftError> {
    let res = f.resolution().clone();
    require_abelian(&res)?;
    let alg = res.algebra().clone();
    let field = alg.field().clone();
    let n = f.degree();
    let (lo, hi) = window;
    let (s_lo, s_hi) = (start, start + seed.len() as i64 - 1);
    assert!(lo <= s_lo && s_hi <= hi && s_lo <= s_hi, "seed must lie inside the window");
    let width = (hi - lo + 1) as usize;
    let mut comps: Vec<Option<ModuleMap>> = vec![None; width];
    let at = |k: i64| (k - lo) as usize;
    for (i, m) in seed.into_iter().enumerate() {
        comps[at(s_lo + i as i64)] = Some(m);
    }
    let mut fallbacks = Vec::new();
    let hsign = field.sign(n - 1);
    for k in s_hi..hi {
        let prev = comps[at(k)].as_ref().unwrap();
        let rhs = f.component(k)?.axpy(&alg, hsign, &prev.compose(&alg, &res.differential(k + n)));
        let step = lift_step_positive(&res, &rhs, k + n, k + 1)?;
        if step.fallback {
            fallbacks.push(k + 1);
        }
        comps[at(k + 1)] = Some(step.map);
    }
    let fsign = field.sign(n);
    for k in (lo..s_lo).rev() {
        let next = comps[at(k + 1)].as_ref().unwrap();
        let rhs = f.component(k)?.sub(&alg, &res.differential(k + 1).compose(&alg, next)).scale(&alg, fsign);
        let step = lift_step_negative(&res, &rhs, k, k + n)?;
        if step.fallback {
            fallbacks.push(k);
        }
        comps[at(k)] = Some(step.map);
    }
    let list = comps.into_iter().map(Option::unwrap).collect();
    let h = GradedMap::table(&res, n - 1, lo, list, false);
    if !h.is_ideal_map(IdealSpec::AugmentationPower(1), window)? {
        return Err(LiftError::Certificate("not an I-map".into()));
    }
    if !h.d().equal_on(f, (lo, hi - 1))? {
        return Err(LiftError::Certificate("dh differs from f".into()));
    }
    fallbacks.sort_unstable();
    Ok(ImapHomotopy { h, window, fallbacks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::windowed_homotopy;
    use crate::generators::abelian_generators;
    use crate::resolution::compositions;
    use crate::scalars::{Field, Scalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abelian(p: u32, ms: &[u32]) -> Arc<Resolution> {
        Resolution::abelian(Algebra::truncated_polynomial(Field::prime(p).unwrap(), ms).unwrap()).unwrap()
    }

    fn random_map(res: &Resolution, source: i64, target: i64, rng: &mut ChaCha8Rng) -> ModuleMap {
        let alg = res.algebra();
        let p = alg.field().order() as u8;
        let mut m = ModuleMap::zero(res.rank(target), res.rank(source));
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let dense: Vec<Scalar> = (0..alg.dim()).map(|_| Scalar(rng.gen_range(0..p))).collect();
                m.set(i, j, alg.from_dense(&dense));
            }
        }
        m
    }

    fn times(alg: &Algebra, i: usize, e: u32, mono: usize) -> Option<usize> {
        let mut x = alg.exponent(mono).to_vec();
        x[i] += e;
        alg.monomial_index(&x)
    }

    #[test]
    fn split_sets_by_hand() {
        let alg = Algebra::truncated_polynomial(Field::prime(2).unwrap(), &[4]).unwrap();
        let s = monomial_split(&alg, &[0], &[0]);
        assert_eq!(s.i_set, BTreeSet::from([0]));
        let z = |e: u32| alg.monomial_index(&[e]).unwrap();
        assert_eq!(s.j_set, BTreeSet::from([z(1), z(3)]));
    }

    #[test]
    fn unit_always_in_i_and_pivot_identity() {
        let res = abelian(2, &[4, 2, 8]);
        let alg = res.algebra();
        for k in -4..4 {
            for a in 0..res.rank(k) {
                for s in [k - 2, k - 1, k, k + 1] {
                    for b in 0..res.rank(s) {
                        let (alpha, beta) = (res.multi_index(k, a), res.multi_index(s, b));
                        assert!(monomial_split(alg, &alpha, &beta).in_i(0));
                        for (i, &m) in alg.truncation().iter().enumerate() {
                            let lhs = bracket(beta[i], m) as i64 - bracket(alpha[i] + 1, m) as i64;
                            let rhs = bracket(alpha[i] + 2, m) as i64 - bracket(beta[i] + 1, m) as i64;
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    /// Claims about multiplying ℐ and its complement by the differential's monomials, checked
    /// for every label pair with target degree k and source degree k + n, n ≤ 0.
    #[test]
    fn multiplication_claims() {
        for ms in [vec![2, 2, 2], vec![4, 4, 2], vec![5, 5], vec![8, 2]] {
            let res = abelian(if ms.contains(&5) { 5 } else { 2 }, &ms);
            let alg = res.algebra();
            let r = ms.len();
            let valid = |x: &[i64]| res.multi_index_position(x).is_some();
            for n in -3..=0 {
                for k in -5..5 {
                    for a in 0..res.rank(k) {
                        for b in 0..res.rank(k + n) {
                            let (alpha, beta) = (res.multi_index(k, a), res.multi_index(k + n, b));
                            let split = monomial_split(alg, &alpha, &beta);
                            for i in 0..r {
                                let mut lower = beta.clone();
                                lower[i] -= 1;
                                if valid(&lower) && (beta[i] > 0) == (lower[i] >= 0) {
                                    let inner = monomial_split(alg, &alpha, &lower);
                                    for mono in 0..alg.dim() {
                                        let img = times(alg, i, bracket(beta[i], ms[i]), mono);
                                        if inner.in_i(mono) {
                                            assert!(img.map_or(true, |x| split.in_j(x)), "(i) {alpha:?} {beta:?} {i}");
                                        } else {
                                            assert!(img.map_or(true, |x| !split.in_j(x)), "(ii) {alpha:?} {beta:?} {i}");
                                        }
                                    }
                                }
                                let mut upper = alpha.clone();
                                upper[i] += 1;
                                if valid(&upper) && (alpha[i] >= 0) == (upper[i] > 0) {
                                    let inner = monomial_split(alg, &upper, &beta);
                                    for mono in 0..alg.dim() {
                                        let img = times(alg, i, bracket(alpha[i] + 1, ms[i]), mono);
                                        if inner.in_i(mono) {
                                            assert!(img.map_or(true, |x| split.in_j(x)), "(I) {alpha:?} {beta:?} {i}");
                                        } else {
                                            assert!(img.map_or(true, |x| !split.in_j(x)), "(II) {alpha:?} {beta:?} {i}");
                                        }
                                    }
                                }
                            }
                            let full: Vec<u32> = ms.iter().map(|m| m - 1).collect();
                            for mono in (0..alg.dim()).filter(|&x| !split.in_i(x)) {
                                let e: Vec<u32> = alg.exponent(mono).iter().zip(&full).map(|(a, b)| a + b).collect();
                                assert!(alg.monomial_index(&e).is_none(), "(iii)");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn differentials_respect_the_splittings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, ms) in [(2, vec![2, 2, 2]), (2, vec![4, 2]), (3, vec![3, 9]), (5, vec![5, 5])] {
            let res = abelian(p, &ms);
            let alg = res.algebra();
            for n in -3..=0 {
                for k in -4..4 {
                    let h = random_map(&res, n + k - 1, k, &mut rng);
                    let parts = classify(&res, &h, n + k - 1, k, SplitKind::CD);
                    let d = res.differential(n + k);
                    let c_img = parts.complement.compose(alg, &d);
                    let d_img = parts.spanned.compose(alg, &d);
                    if k == -n {
                        assert!(c_img.is_zero(), "C_{{-n}} ∘ ∂ vanishes");
                    } else {
                        assert!(classify(&res, &c_img, n + k, k, SplitKind::AB).in_complement(), "{ms:?} n={n} k={k}");
                        assert!(classify(&res, &d_img, n + k, k, SplitKind::AB).in_span(), "{ms:?} n={n} k={k}");
                    }
                    let h = random_map(&res, n + k, k + 1, &mut rng);
                    let parts = classify(&res, &h, n + k, k + 1, SplitKind::CD);
                    let d = res.differential(k + 1);
                    let c_img = d.compose(alg, &parts.complement);
                    let d_img = d.compose(alg, &parts.spanned);
                    if k == -1 {
                        assert!(c_img.is_zero(), "∂ ∘ C_0 vanishes");
                    } else {
                        assert!(classify(&res, &c_img, n + k, k, SplitKind::AB).in_complement(), "{ms:?} n={n} k={k}");
                        assert!(classify(&res, &d_img, n + k, k, SplitKind::AB).in_span(), "{ms:?} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_strips_constants_when_square_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let res = abelian(2, &[2, 2, 2]);
        for k in -3..3 {
            let h = random_map(&res, k + 1, k, &mut rng);
            let c = project_to_c(&res, &h, k + 1, k);
            assert_eq!(project_to_c(&res, &c, k + 1, k), c);
            let stripped = h.map_entries(|_, _, e| {
                AlgebraElement::from_sorted(e.terms().iter().copied().filter(|t| t.0 != 0).collect())
            });
            assert_eq!(c, stripped);
        }
    }

    #[test]
    fn phi_products_have_imap_homotopies() {
        for (p, ms) in [(2, vec![2, 2, 2]), (2, vec![4, 4, 4]), (5, vec![5, 5, 5])] {
            let res = abelian(p, &ms);
            let cat = abelian_generators(&res).unwrap();
            let w = if p == 5 { (-5, 5) } else { (-8, 8) };
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                for alpha in compositions(a, 3) {
                    for beta in compositions(b, 3) {
                        let f = cat.phi_alpha(&alpha).compose(&cat.phi_alpha(&beta));
                        let out = null_homotopy_imap(&f, w).unwrap();
                        assert!(out.h.is_ideal_map(IdealSpec::AugmentationPower(1), w).unwrap());
                        assert!(out.h.d().equal_on(&f, (w.0, w.1 - 1)).unwrap());
                        assert!(out.fallbacks.is_empty(), "{ms:?} {alpha:?} {beta:?} fell back at {:?}", out.fallbacks);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_lifts_to_zero() {
        let res = abelian(2, &[2, 2, 2]);
        let out = null_homotopy_imap(&GradedMap::zero(&res, -2), (-4, 4)).unwrap();
        assert!(out.h.is_zero_on((-4, 4)).unwrap());
    }

    /// The degree-1 cocycle that is the norm P̂_0 → P̂_{−1} and zero elsewhere.
    fn norm_cocycle(res: &Arc<Resolution>) -> GradedMap {
        let alg = res.algebra();
        let mut comps = vec![ModuleMap::zero(res.rank(-4), res.rank(-3)); 0];
        for j in -4..=4 {
            let mut m = ModuleMap::zero(res.rank(j), res.rank(j + 1));
            if j == -1 {
                m.set(0, 0, alg.norm());
            }
            comps.push(m);
        }
        GradedMap::table(res, 1, -4, comps, true)
    }

    #[test]
    fn positive_degree_is_refused_and_infeasible() {
        for (p, ms) in [(2, vec![2, 2]), (2, vec![4, 2]), (3, vec![3, 3])] {
            let res = abelian(p, &ms);
            let f = norm_cocycle(&res);
            assert!(f.is_cocycle((-6, 6)).unwrap());
            assert_eq!(null_homotopy_imap(&f, (-3, 3)).unwrap_err(), LiftError::PositiveDegree(1));
            assert!(windowed_homotopy(&f, (-3, 3), false).unwrap().is_some());
            assert!(windowed_homotopy(&f, (-3, 3), true).unwrap().is_none());
        }
    }
}
