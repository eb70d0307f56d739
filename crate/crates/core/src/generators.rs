//! Named cocycles and homotopies: the cyclic and Q8 catalogs, the tensor constructions Φ and Ψ
//! for products of cyclic groups, and the abelian generators ū_i, v̄_i, φ̄_α.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraElement};
use crate::graded::{GradedMap, MapError};
use crate::module_map::ModuleMap;
use crate::resolution::{BasisLabel, Family, Resolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("resolution family does not fit this catalog")]
    WrongFamily,
    #[error("Φ needs a map of non-negative degree, got {0}")]
    NegativeDegree(i64),
    #[error("Ψ needs degrees ≤ 0 with at most one zero, got {0:?}")]
    DegreeViolation(Vec<i64>),
    #[error("the commutator homotopy needs two different factors")]
    SameFactor,
    #[error("factor index {0} out of range")]
    NoSuchFactor(usize),
}

/// Identity matrices as a map of the given degree (a chain map whenever the degree is a period).
pub fn shift(res: &Arc<Resolution>, degree: i64) -> GradedMap {
    if degree == 0 {
        return GradedMap::identity(res);
    }
    let r = res.clone();
    GradedMap::rule(res, degree, move |j| {
        let n = r.rank(j);
        assert_eq!(n, r.rank(j + degree), "shift by a non-period");
        Ok(ModuleMap::identity(n))
    })
}

/// Cyclic group k[z]/z^n: x̄ of degree 1, the shift ȳ and its inverse, and q̄ with dq̄ = x̄².
pub struct CyclicCatalog {
    pub res: Arc<Resolution>,
    pub x: GradedMap,
    pub y: GradedMap,
    pub y_inv: GradedMap,
    /// Absent for n = 2, where x̄² = ȳ.
    pub q: Option<GradedMap>,
}

pub fn cyclic_generators(res: &Arc<Resolution>) -> Result<CyclicCatalog, GeneratorError> {
    let Family::Cyclic { n } = *res.family() else { return Err(GeneratorError::WrongFamily) };
    let alg = res.algebra().clone();
    let single = |e: AlgebraElement| ModuleMap::from_rows(vec![vec![e]]);
    let x = GradedMap::periodic(res, 1, vec![single(alg.one()), single(alg.z_pow(0, n - 2))]);
    let q = (n >= 3).then(|| GradedMap::periodic(res, 1, vec![single(AlgebraElement::zero()), single(alg.z_pow(0, n - 3))]));
    Ok(CyclicCatalog { res: res.clone(), x, y: shift(res, 2), y_inv: shift(res, -2), q })
}

impl CyclicCatalog {
    /// ȳ^β x̄^ε for the given total degree 2β + ε (β may be negative).
    pub fn power(&self, degree: i64) -> GradedMap {
        let beta = degree.div_euclid(2);
        let eps = degree.rem_euclid(2);
        let y = shift(&self.res, 2 * beta);
        if eps == 1 {
            y.compose(&self.x)
        } else {
            y
        }
    }
}

/// The Q8 cocycles x̄, ȳ, the shift s̄ and the homotopies p̄, q̄, r̄.
pub struct Q8Catalog {
    pub res: Arc<Resolution>,
    pub x: GradedMap,
    pub y: GradedMap,
    pub s: GradedMap,
    pub s_inv: GradedMap,
    /// dp̄ = x̄ȳ + ȳx̄.
    pub p: GradedMap,
    /// dq̄ = x̄² + ȳ² + x̄ȳ, 8-periodic.
    pub q: GradedMap,
    /// dr̄ = x̄³, 8-periodic.
    pub r: GradedMap,
}

fn q8_matrix(alg: &Algebra, rows: &[&[&str]]) -> ModuleMap {
    ModuleMap::from_rows(
        rows.iter()
            .map(|row| row.iter().map(|s| alg.parse_element(s).expect("Q8 constant")).collect())
            .collect(),
    )
}

pub fn q8_generators(res: &Arc<Resolution>) -> Result<Q8Catalog, GeneratorError> {
    if *res.family() != Family::Q8 {
        return Err(GeneratorError::WrongFamily);
    }
    let alg = res.algebra().clone();
    let m = |rows: &[&[&str]]| q8_matrix(&alg, rows);
    let x = GradedMap::periodic(
        res,
        1,
        vec![m(&[&["E", "0"]]), m(&[&["0", "E"], &["E", "I"]]), m(&[&["E"], &["0"]]), m(&[&["E+E'+J+J'"]])],
    );
    let y = GradedMap::periodic(
        res,
        1,
        vec![m(&[&["0", "E"]]), m(&[&["J", "E"], &["E", "0"]]), m(&[&["0"], &["E"]]), m(&[&["E+E'+I+I'"]])],
    );
    let p = GradedMap::periodic(
        res,
        1,
        vec![m(&[&["0", "0"]]), m(&[&["0", "E"], &["E", "0"]]), m(&[&["0"], &["0"]]), m(&[&["E+E'"]])],
    );
    let q = GradedMap::periodic(
        res,
        1,
        vec![
            m(&[&["0", "0"]]),
            m(&[&["0", "0"], &["E", "0"]]),
            m(&[&["0"], &["0"]]),
            m(&[&["E+I'+J+K"]]),
            m(&[&["E", "E"]]),
            m(&[&["J", "0"], &["E", "I"]]),
            m(&[&["E"], &["E"]]),
            m(&[&["E+I+J'+K"]]),
        ],
    );
    let r = GradedMap::periodic(
        res,
        2,
        vec![
            m(&[&["0", "0"]]),
            m(&[&["0"], &["0"]]),
            m(&[&["E+J'"], &["I+J"]]),
            m(&[&["I+J", "J+K"]]),
            m(&[&["0", "E"]]),
            m(&[&["0"], &["E"]]),
            m(&[&["E'+J"], &["I+J"]]),
            m(&[&["E+E'+J'+I", "J+K"]]),
        ],
    );
    Ok(Q8Catalog { res: res.clone(), x, y, s: shift(res, 4), s_inv: shift(res, -4), p, q, r })
}

/// Embeds an element of the i-th factor algebra k[z]/z^m into L as a polynomial in z_i.
fn embed(alg: &Algebra, factor: &Algebra, i: usize, e: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for &(b, c) in e.terms() {
        let z = alg.z_pow(i, factor.exponent(b as usize)[0]);
        out = alg.add(&out, &alg.scale(c, &z));
    }
    out
}

/// The single entry of the factor component f_j.
fn factor_entry(f: &GradedMap, j: i64) -> Result<AlgebraElement, MapError> {
    Ok(f.component(j)?.get(0, 0))
}

fn abelian_setup(res: &Arc<Resolution>) -> Result<(), GeneratorError> {
    match res.family() {
        Family::AbelianProduct { .. } => Ok(()),
        _ => Err(GeneratorError::WrongFamily),
    }
}

/// ∂_0 on factor i applied to the generator: −z_i^{m_i−1}.
fn factor_d0(res: &Resolution, i: usize) -> AlgebraElement {
    let alg = res.algebra();
    let m = alg.truncation()[i];
    alg.neg(&alg.z_pow(i, m - 1))
}

fn target_index(res: &Resolution, k: i64, beta: Vec<i64>) -> Option<usize> {
    res.label_index(k, &BasisLabel::MultiIndex(beta))
}

/// Φ(f) for f of degree n ≥ 0 on factor j (0-based). On the positive side f acts on the j-th
/// tensor factor with sign (−1)^{n(α_1+⋯+α_{j−1})}; in degrees −1..−n the single summand with
/// all other factors in degree 0 maps through ∂_0 on those factors; below −n the sign picks up
/// the extra (j−1).
pub fn phi(res: &Arc<Resolution>, f: &GradedMap, j: usize) -> Result<GradedMap, GeneratorError> {
    abelian_setup(res)?;
    let r = res.factor_count();
    if j >= r {
        return Err(GeneratorError::NoSuchFactor(j));
    }
    let n = f.degree();
    if n < 0 {
        return Err(GeneratorError::NegativeDegree(n));
    }
    let f = f.clone();
    let rr = res.clone();
    Ok(GradedMap::rule(res, n, move |k| {
        let res = &*rr;
        let alg = res.algebra();
        let fld = alg.field();
        let factor = res.factors()[j].algebra().clone();
        let mut out = ModuleMap::zero(res.rank(k), res.rank(k + n));
        if (-n..0).contains(&k) {
            let mut alpha = vec![0i64; r];
            alpha[j] = k + n;
            let src = target_index(res, k + n, alpha).unwrap();
            let mut beta = vec![-1i64; r];
            beta[j] = k;
            let tgt = target_index(res, k, beta).unwrap();
            let mut e = embed(alg, &factor, j, &factor_entry(&f, k)?);
            for i in (0..r).filter(|&i| i != j) {
                e = alg.mul(&e, &factor_d0(res, i));
            }
            out.set(tgt, src, e);
            return Ok(out);
        }
        for src in 0..res.rank(k + n) {
            let alpha = res.multi_index(k + n, src);
            if k >= 0 && alpha[j] < n {
                continue;
            }
            let prefix: i64 = alpha[..j].iter().sum();
            let exp = if k >= 0 { n * prefix } else { n * (prefix + j as i64) };
            let mut beta = alpha.clone();
            beta[j] -= n;
            let tgt = target_index(res, k, beta).unwrap();
            let e = embed(alg, &factor, j, &factor_entry(&f, alpha[j] - n)?);
            out.set(tgt, src, alg.scale(fld.sign(exp), &e));
        }
        Ok(out)
    }))
}

/// Ψ(f_1, …, f_r) for factor maps of degrees n_i ≤ 0, at most one of them zero; the degree n
/// satisfies n + 1 = Σ(n_i + 1). The three ranges k ≥ −n, 0 ≤ k ≤ −n−1 and k < 0 partition the
/// integers because n < 0 whenever some n_i < 0.
pub fn psi(res: &Arc<Resolution>, fs: &[GradedMap]) -> Result<GradedMap, GeneratorError> {
    abelian_setup(res)?;
    let r = res.factor_count();
    let degs: Vec<i64> = fs.iter().map(|f| f.degree()).collect();
    if fs.len() != r || degs.iter().any(|&d| d > 0) || degs.iter().filter(|&&d| d == 0).count() > 1 {
        return Err(GeneratorError::DegreeViolation(degs));
    }
    let n = degs.iter().map(|d| d + 1).sum::<i64>() - 1;
    // c_i = n + n_1 + ⋯ + n_i + i − 1 with 1-based i
    let c: Vec<i64> = (0..r).map(|i| n + degs[..=i].iter().sum::<i64>() + i as i64).collect();
    let t: i64 = c[1..].iter().sum();
    let s: i64 = (1..r).map(|i| c[i] * degs[i]).sum();
    let fs = fs.to_vec();
    let rr = res.clone();
    Ok(GradedMap::rule(res, n, move |k| {
        let res = &*rr;
        let alg = res.algebra();
        let fld = alg.field();
        let factor = |i: usize| res.factors()[i].algebra().clone();
        let mut out = ModuleMap::zero(res.rank(k), res.rank(k + n));
        if k >= -n {
            let mut alpha = vec![0i64; r];
            alpha[0] = k + n;
            let Some(src) = target_index(res, k + n, alpha) else { return Ok(out) };
            let mut beta = vec![k + n - degs[0]];
            beta.extend(degs[1..].iter().map(|d| -1 - d));
            let Some(tgt) = target_index(res, k, beta) else { return Ok(out) };
            let mut e = embed(alg, &factor(0), 0, &factor_entry(&fs[0], k + n - degs[0])?);
            for i in 1..r {
                let fi = embed(alg, &factor(i), i, &factor_entry(&fs[i], -1 - degs[i])?);
                e = alg.mul(&alg.mul(&e, &factor_d0(res, i)), &fi);
            }
            out.set(tgt, src, alg.scale(fld.sign(t + (n + degs[0]) * (k + n)), &e));
        } else if k >= 0 {
            for src in 0..res.rank(k + n) {
                let alpha = res.multi_index(k + n, src);
                if (0..r).any(|i| alpha[i] < degs[i]) {
                    continue;
                }
                let beta: Vec<i64> = (0..r).map(|i| alpha[i] - degs[i]).collect();
                let tgt = target_index(res, k, beta).unwrap();
                let mut e = alg.one();
                for i in 0..r {
                    e = alg.mul(&e, &embed(alg, &factor(i), i, &factor_entry(&fs[i], alpha[i] - degs[i])?));
                }
                let exp: i64 = (0..r).map(|i| c[i] * alpha[i]).sum();
                out.set(tgt, src, alg.scale(fld.sign(exp), &e));
            }
        } else {
            let mut alpha = vec![k + degs[0]];
            alpha.extend_from_slice(&degs[1..]);
            let Some(src) = target_index(res, k + n, alpha) else { return Ok(out) };
            let mut beta = vec![-1i64; r];
            beta[0] = k;
            let tgt = target_index(res, k, beta).unwrap();
            let mut e = embed(alg, &factor(0), 0, &factor_entry(&fs[0], k)?);
            for i in 1..r {
                let fi = embed(alg, &factor(i), i, &factor_entry(&fs[i], 0)?);
                e = alg.mul(&alg.mul(&e, &fi), &factor_d0(res, i));
            }
            out.set(tgt, src, alg.scale(fld.sign(s + (n + degs[0]) * (k + degs[0])), &e));
        }
        Ok(out)
    }))
}

/// The homotopy h with dh = Φ(f)Φ(g) − (−1)^{nm}Φ(g)Φ(f) for f of degree n > 0 on factor j and
/// g of degree m > 0 on factor l ≠ j. It lives in degrees −1..−n−m+1 on the summands whose
/// other factors sit in degree 0.
pub fn phi_commutator_homotopy(
    res: &Arc<Resolution>,
    f: &GradedMap,
    j: usize,
    g: &GradedMap,
    l: usize,
) -> Result<GradedMap, GeneratorError> {
    abelian_setup(res)?;
    let r = res.factor_count();
    if j == l {
        return Err(GeneratorError::SameFactor);
    }
    if j >= r || l >= r {
        return Err(GeneratorError::NoSuchFactor(j.max(l)));
    }
    let (n, m) = (f.degree(), g.degree());
    if n <= 0 || m <= 0 {
        return Err(GeneratorError::NegativeDegree(n.min(m)));
    }
    if j > l {
        // dh' = Φ(g)Φ(f) − (−1)^{nm}Φ(f)Φ(g) for the swapped pair, so h = −(−1)^{nm}h'
        let h = phi_commutator_homotopy(res, g, l, f, j)?;
        return Ok(h.scale(res.field().neg(res.field().sign(n * m))));
    }
    let deg = n + m - 1;
    let (f, g) = (f.clone(), g.clone());
    let rr = res.clone();
    Ok(GradedMap::rule(res, deg, move |k| {
        let res = &*rr;
        let alg = res.algebra();
        let fld = alg.field();
        let mut out = ModuleMap::zero(res.rank(k), res.rank(k + deg));
        if k > -1 || k < -n - m + 1 {
            return Ok(out);
        }
        let (fa, ga) = (res.factors()[j].algebra().clone(), res.factors()[l].algebra().clone());
        for aj in 0..n {
            let al = k + deg - aj;
            if al < 0 || al >= m {
                continue;
            }
            let mut alpha = vec![0i64; r];
            alpha[j] = aj;
            alpha[l] = al;
            let src = target_index(res, k + deg, alpha).unwrap();
            let mut beta = vec![-1i64; r];
            beta[j] = aj - n;
            beta[l] = al - m;
            let tgt = target_index(res, k, beta).unwrap();
            let mut e = alg.mul(
                &embed(alg, &fa, j, &factor_entry(&f, aj - n)?),
                &embed(alg, &ga, l, &factor_entry(&g, al - m)?),
            );
            for i in (0..r).filter(|&i| i != j && i != l) {
                e = alg.mul(&e, &factor_d0(res, i));
            }
            out.set(tgt, src, alg.scale(fld.sign(n + (m - 1) * aj), &e));
        }
        Ok(out)
    }))
}

/// ū_i = Φ(x̄_i), v̄_i = Φ(ȳ_i) and the negative-degree family φ̄_α = Ψ(ȳ_1^{β_1}x̄_1^{ε_1}, …)
/// with −α_i − 1 = 2β_i + ε_i.
pub struct AbelianCatalog {
    pub res: Arc<Resolution>,
    pub factors: Vec<CyclicCatalog>,
    pub u: Vec<GradedMap>,
    pub v: Vec<GradedMap>,
    phis: Mutex<HashMap<Vec<i64>, GradedMap>>,
}

pub fn abelian_generators(res: &Arc<Resolution>) -> Result<AbelianCatalog, GeneratorError> {
    abelian_setup(res)?;
    let factors: Vec<CyclicCatalog> =
        res.factors().iter().map(cyclic_generators).collect::<Result<_, _>>()?;
    let u = factors.iter().enumerate().map(|(i, c)| phi(res, &c.x, i)).collect::<Result<_, _>>()?;
    let v = factors.iter().enumerate().map(|(i, c)| phi(res, &c.y, i)).collect::<Result<_, _>>()?;
    Ok(AbelianCatalog { res: res.clone(), factors, u, v, phis: Mutex::default() })
}

impl AbelianCatalog {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// φ̄_α for a multi-index α ≥ 0; degree −|α| − 1.
    pub fn phi_alpha(&self, alpha: &[i64]) -> GradedMap {
        if let Some(f) = self.phis.lock().unwrap().get(alpha) {
            return f.clone();
        }
        assert!(alpha.len() == self.rank() && alpha.iter().all(|&a| a >= 0), "invalid multi-index");
        let fs: Vec<GradedMap> = alpha.iter().zip(&self.factors).map(|(&a, c)| c.power(-a - 1)).collect();
        let f = psi(&self.res, &fs).expect("factor degrees are negative");
        self.phis.lock().unwrap().insert(alpha.to_vec(), f.clone());
        f
    }

    /// The factor homotopy q̄_i lifted by Φ: dΦ(q̄_i) = ū_i² when m_i ≥ 3.
    pub fn u_square_homotopy(&self, i: usize) -> Option<GradedMap> {
        self.factors[i].q.as_ref().map(|q| phi(&self.res, q, i).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IdealSpec;
    use crate::scalars::{Field, Scalar};

    const W: (i64, i64) = (-8, 8);

    fn q8() -> Q8Catalog {
        let alg = Algebra::quaternion(Field::prime(2).unwrap()).unwrap();
        q8_generators(&Resolution::q8(alg).unwrap()).unwrap()
    }

    fn abelian(p: u32, ms: &[u32]) -> AbelianCatalog {
        let alg = Algebra::truncated_polynomial(Field::prime(p).unwrap(), ms).unwrap();
        abelian_generators(&Resolution::abelian(alg).unwrap()).unwrap()
    }

    #[test]
    fn q8_generators_are_cocycles_with_published_classes() {
        let c = q8();
        for g in [&c.x, &c.y, &c.s, &c.s_inv] {
            assert!(g.is_cocycle(W).unwrap());
        }
        let one = Scalar::ONE;
        let z = Scalar::ZERO;
        assert_eq!(c.x.compose(&c.x).class_of().unwrap().coeffs, vec![z, one]);
        assert_eq!(c.y.compose(&c.y).class_of().unwrap().coeffs, vec![one, z]);
        assert_eq!(c.x.compose(&c.y).class_of().unwrap().coeffs, vec![one, one]);
        assert_eq!(c.y.compose(&c.x).class_of().unwrap().coeffs, vec![one, one]);
    }

    #[test]
    fn q8_homotopy_identities() {
        let c = q8();
        let (x, y, s) = (&c.x, &c.y, &c.s);
        let xy = x.compose(y);
        let yx = y.compose(x);
        let xx = x.compose(x);
        assert!(c.p.d().equal_on(&xy.add(&yx), W).unwrap());
        let target = xx.add(&y.compose(y)).add(&xy);
        assert!(c.q.d().equal_on(&target, W).unwrap());
        assert!(c.r.d().equal_on(&xx.compose(x), W).unwrap());
        let lhs = s.compose(&c.q);
        let rhs = c.q.add(x).add(y).compose(s);
        assert!(lhs.equal_on(&rhs, W).unwrap());
        assert!(s.compose(&c.r).equal_on(&c.r.add(&xx).compose(s), W).unwrap());
        assert!(s.compose(&c.s_inv).equal_on(&GradedMap::identity(&c.res), W).unwrap());
    }

    #[test]
    fn cyclic_catalog() {
        let alg = Algebra::truncated_polynomial(Field::prime(2).unwrap(), &[2]).unwrap();
        let c = cyclic_generators(&Resolution::cyclic(alg).unwrap()).unwrap();
        assert!(c.q.is_none());
        assert!(c.x.compose(&c.x).equal_on(&c.y, W).unwrap());
        let alg = Algebra::truncated_polynomial(Field::prime(3).unwrap(), &[3]).unwrap();
        let c = cyclic_generators(&Resolution::cyclic(alg).unwrap()).unwrap();
        assert!(c.q.as_ref().unwrap().d().equal_on(&c.x.compose(&c.x), W).unwrap());
        assert!(c.y.compose(&c.y_inv).equal_on(&GradedMap::identity(&c.res), W).unwrap());
    }

    #[test]
    fn phi_commutes_with_d() {
        for (p, ms) in [(2, vec![2, 2, 2]), (3, vec![3, 9]), (5, vec![5, 5, 5]), (2, vec![4, 2])] {
            let c = abelian(p, &ms);
            for i in 0..c.rank() {
                assert!(c.u[i].is_cocycle(W).unwrap(), "u_{i} over {ms:?}");
                assert!(c.v[i].is_cocycle(W).unwrap(), "v_{i} over {ms:?}");
                if let Some(h) = c.u_square_homotopy(i) {
                    assert!(h.d().equal_on(&c.u[i].compose(&c.u[i]), W).unwrap());
                }
            }
        }
    }

    #[test]
    fn phi_alpha_are_cocycles_with_dual_classes() {
        for (p, ms) in [(2, vec![2, 2, 2]), (3, vec![3, 3]), (5, vec![5, 5, 5]), (2, vec![2, 4, 4])] {
            let c = abelian(p, &ms);
            let res = &c.res;
            for tot in 0..4 {
                for alpha in crate::resolution::compositions(tot, c.rank()) {
                    let f = c.phi_alpha(&alpha);
                    assert_eq!(f.degree(), -tot - 1);
                    assert!(f.is_cocycle(W).unwrap(), "phi{alpha:?} over {ms:?}");
                    let class = f.class_of().unwrap();
                    let dual: Vec<i64> = alpha.iter().map(|a| -1 - a).collect();
                    let (_, pos) = res.multi_index_position(&dual).unwrap();
                    for (i, v) in class.coeffs.iter().enumerate() {
                        assert_eq!(v.is_zero(), i != pos, "phi{alpha:?} class {class:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_homotopy() {
        for (p, ms) in [(2, vec![2, 2, 2]), (3, vec![3, 9, 3]), (2, vec![4, 2, 4])] {
            let c = abelian(p, &ms);
            let fld = c.res.field().clone();
            for (a, b) in [(0, 1), (1, 0), (0, 2), (2, 1)] {
                for (f, g) in [(&c.factors[a].x, &c.factors[b].x), (&c.factors[a].y, &c.factors[b].x), (&c.factors[a].x, &c.factors[b].y), (&c.factors[a].y, &c.factors[b].y)] {
                    let h = phi_commutator_homotopy(&c.res, f, a, g, b).unwrap();
                    let pf = phi(&c.res, f, a).unwrap();
                    let pg = phi(&c.res, g, b).unwrap();
                    let sign = fld.sign(f.degree() * g.degree());
                    let comm = pf.compose(&pg).axpy(fld.neg(sign), &pg.compose(&pf));
                    assert!(h.d().equal_on(&comm, W).unwrap(), "{ms:?} {a} {b}");
                    assert!(h.is_ideal_map(IdealSpec::JPower(c.rank() as u32 - 2), W).unwrap());
                }
            }
        }
    }
}
