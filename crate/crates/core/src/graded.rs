//! The endomorphism dga A = Hom*_L(P̂, P̂): graded maps, the differential, composition,
//! the class map 𝒞 and homotopy solvers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraElement, IdealSpec};
use crate::linalg::{ColumnSolver, SparseVec};
use crate::module_map::ModuleMap;
use crate::resolution::Resolution;
use crate::scalars::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("component {0} lies outside the stored window")]
    WindowTooSmall(i64),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("maps live on different resolutions")]
    ResolutionMismatch,
    #[error("no homotopy with any tried period")]
    Infeasible,
    #[error("no lift exists in degree {0}")]
    NoLift(i64),
    #[error("resolution is not periodic with a divisor of {0}")]
    NotPeriodic(i64),
}

type RuleFn = dyn Fn(i64) -> Result<ModuleMap, MapError> + Send + Sync;

enum Kind {
    Zero,
    Periodic { period: i64, comps: Vec<ModuleMap> },
    Table { lo: i64, comps: Vec<ModuleMap>, zero_outside: bool },
    Rule(Box<RuleFn>),
}

struct Node {
    degree: i64,
    res: Arc<Resolution>,
    kind: Kind,
    cache: Mutex<HashMap<i64, Arc<ModuleMap>>>,
}

/// A degree-n element of A: a family f_j : P̂_{j+n} → P̂_j.
#[derive(Clone)]
pub struct GradedMap(Arc<Node>);

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.0.kind {
            Kind::Zero => "zero".to_string(),
            Kind::Periodic { period, .. } => format!("periodic({period})"),
            Kind::Table { lo, comps, .. } => format!("table[{lo},{}]", lo + comps.len() as i64 - 1),
            Kind::Rule(_) => "rule".to_string(),
        };
        write!(f, "GradedMap(degree {}, {kind})", self.0.degree)
    }
}

/// A class in Êxt^n as coordinates on the dual basis of the labels of P̂_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TateClass {
    pub degree: i64,
    pub coeffs: Vec<Scalar>,
}

impl TateClass {
    pub fn zero(degree: i64, rank: usize) -> Self {
        Self { degree, coeffs: vec![Scalar::ZERO; rank] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn axpy(&self, f: &Field, c: Scalar, other: &TateClass) -> TateClass {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
        TateClass { degree: self.degree, coeffs }
    }
}

impl GradedMap {
    fn new(res: &Arc<Resolution>, degree: i64, kind: Kind) -> Self {
        GradedMap(Arc::new(Node { degree, res: res.clone(), kind, cache: Mutex::default() }))
    }

    pub fn zero(res: &Arc<Resolution>, degree: i64) -> Self {
        Self::new(res, degree, Kind::Zero)
    }

    pub fn identity(res: &Arc<Resolution>) -> Self {
        let r = res.clone();
        Self::rule(res, 0, move |j| Ok(ModuleMap::identity(r.rank(j))))
    }

    /// f_j = comps[j mod period].
    pub fn periodic(res: &Arc<Resolution>, degree: i64, comps: Vec<ModuleMap>) -> Self {
        let period = comps.len() as i64;
        for (j, m) in comps.iter().enumerate() {
            let j = j as i64;
            assert_eq!((m.rows(), m.cols()), (res.rank(j), res.rank(j + degree)), "component {j} has wrong shape");
        }
        Self::new(res, degree, Kind::Periodic { period, comps })
    }

    /// f_j = comps[j − lo] for j in the window; outside it the map is zero or unavailable.
    pub fn table(res: &Arc<Resolution>, degree: i64, lo: i64, comps: Vec<ModuleMap>, zero_outside: bool) -> Self {
        Self::new(res, degree, Kind::Table { lo, comps, zero_outside })
    }

    pub fn rule(
        res: &Arc<Resolution>,
        degree: i64,
        f: impl Fn(i64) -> Result<ModuleMap, MapError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(res, degree, Kind::Rule(Box::new(f)))
    }

    pub fn degree(&self) -> i64 {
        self.0.degree
    }

    pub fn resolution(&self) -> &Arc<Resolution> {
        &self.0.res
    }

    pub fn is_structurally_zero(&self) -> bool {
        matches!(self.0.kind, Kind::Zero)
    }

    /// f_j : P̂_{j+n} → P̂_j.
    pub fn component(&self, j: i64) -> Result<Arc<ModuleMap>, MapError> {
        if let Some(m) = self.0.cache.lock().unwrap().get(&j) {
            return Ok(m.clone());
        }
        let res = &self.0.res;
        let n = self.0.degree;
        let m = match &self.0.kind {
            Kind::Zero => ModuleMap::zero(res.rank(j), res.rank(j + n)),
            Kind::Periodic { period, comps } => comps[j.rem_euclid(*period) as usize].clone(),
            Kind::Table { lo, comps, zero_outside } => {
                let k = j - lo;
                if k >= 0 && (k as usize) < comps.len() {
                    comps[k as usize].clone()
                } else if *zero_outside {
                    ModuleMap::zero(res.rank(j), res.rank(j + n))
                } else {
                    return Err(MapError::WindowTooSmall(j));
                }
            }
            Kind::Rule(f) => f(j)?,
        };
        let m = Arc::new(m);
        self.0.cache.lock().unwrap().insert(j, m.clone());
        Ok(m)
    }

    fn check_same(&self, other: &GradedMap) -> Result<(), MapError> {
        if !Arc::ptr_eq(&self.0.res, &other.0.res) {
            return Err(MapError::ResolutionMismatch);
        }
        Ok(())
    }

    /// (fg)_j = f_j ∘ g_{j+|f|}.
    pub fn compose(&self, g: &GradedMap) -> GradedMap {
        self.check_same(g).expect("composition across resolutions");
        let degree = self.degree() + g.degree();
        let res = self.resolution().clone();
        if self.is_structurally_zero() || g.is_structurally_zero() {
            return GradedMap::zero(&res, degree);
        }
        let (f, g) = (self.clone(), g.clone());
        let nf = f.degree();
        let alg = res.algebra().clone();
        GradedMap::rule(&res, degree, move |j| Ok(f.component(j)?.compose(&alg, &*g.component(j + nf)?)))
    }

    /// Product of a list of maps, left to right.
    pub fn product(res: &Arc<Resolution>, maps: &[GradedMap]) -> GradedMap {
        match maps {
            [] => GradedMap::identity(res),
            [f] => f.clone(),
            [f, rest @ ..] => f.compose(&GradedMap::product(res, rest)),
        }
    }

    /// self + c·g.
    pub fn axpy(&self, c: Scalar, g: &GradedMap) -> GradedMap {
        self.check_same(g).expect("sum across resolutions");
        assert_eq!(self.degree(), g.degree(), "sum of maps of different degrees");
        if c.is_zero() || g.is_structurally_zero() {
            return self.clone();
        }
        let res = self.resolution().clone();
        if self.is_structurally_zero() {
            return g.scale(c);
        }
        let (f, g) = (self.clone(), g.clone());
        let alg = res.algebra().clone();
        GradedMap::rule(&res, self.degree(), move |j| Ok(f.component(j)?.axpy(&alg, c, &*g.component(j)?)))
    }

    pub fn add(&self, g: &GradedMap) -> GradedMap {
        self.axpy(Scalar::ONE, g)
    }

    pub fn sub(&self, g: &GradedMap) -> GradedMap {
        self.axpy(self.resolution().field().neg(Scalar::ONE), g)
    }

    pub fn scale(&self, c: Scalar) -> GradedMap {
        let res = self.resolution().clone();
        if c.is_zero() || self.is_structurally_zero() {
            return GradedMap::zero(&res, self.degree());
        }
        if c == Scalar::ONE {
            return self.clone();
        }
        let f = self.clone();
        let alg = res.algebra().clone();
        GradedMap::rule(&res, self.degree(), move |j| Ok(f.component(j)?.scale(&alg, c)))
    }

    pub fn neg(&self) -> GradedMap {
        self.scale(self.resolution().field().neg(Scalar::ONE))
    }

    /// Sum of c_i·f_i over a list of equal-degree maps.
    pub fn linear_combination(res: &Arc<Resolution>, degree: i64, terms: &[(Scalar, GradedMap)]) -> GradedMap {
        let live: Vec<(Scalar, GradedMap)> =
            terms.iter().filter(|(c, f)| !c.is_zero() && !f.is_structurally_zero()).cloned().collect();
        if live.is_empty() {
            return GradedMap::zero(res, degree);
        }
        if live.len() == 1 {
            return live[0].1.scale(live[0].0);
        }
        for (_, f) in &live {
            assert_eq!(f.degree(), degree, "linear combination of maps of different degrees");
        }
        let alg = res.algebra().clone();
        GradedMap::rule(res, degree, move |j| {
            let mut acc: Option<ModuleMap> = None;
            for (c, f) in &live {
                let m = f.component(j)?;
                acc = Some(match acc {
                    None => m.scale(&alg, *c),
                    Some(a) => a.axpy(&alg, *c, &m),
                });
            }
            Ok(acc.unwrap())
        })
    }

    /// (df)_j = ∂ ∘ f_{j+1} − (−1)^n f_j ∘ ∂.
    pub fn d(&self) -> GradedMap {
        let res = self.resolution().clone();
        let n = self.degree();
        if self.is_structurally_zero() {
            return GradedMap::zero(&res, n + 1);
        }
        let f = self.clone();
        let r = res.clone();
        GradedMap::rule(&res, n + 1, move |j| {
            let alg = r.algebra();
            let left = r.differential(j + 1).compose(alg, &*f.component(j + 1)?);
            let right = f.component(j)?.compose(alg, &r.differential(j + n + 1));
            Ok(left.axpy(alg, alg.field().neg(alg.field().sign(n)), &right))
        })
    }

    /// 𝒞(f): the class of ε ∘ f_0 : P̂_n → k. Defined for every graded map.
    pub fn class_of(&self) -> Result<TateClass, MapError> {
        let n = self.degree();
        let res = self.resolution();
        let f0 = self.component(0)?;
        let mut class = TateClass::zero(n, res.rank(n));
        for (_, b, e) in f0.entries() {
            class.coeffs[b] = res.augmentation(e);
        }
        Ok(class)
    }

    pub fn is_cocycle(&self, window: (i64, i64)) -> Result<bool, MapError> {
        let d = self.d();
        for j in window.0..=window.1 {
            if !d.component(j)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_ideal_map(&self, spec: IdealSpec, window: (i64, i64)) -> Result<bool, MapError> {
        let alg = self.resolution().algebra();
        for j in window.0..=window.1 {
            if !self.component(j)?.in_ideal(alg, spec) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equal_on(&self, g: &GradedMap, window: (i64, i64)) -> Result<bool, MapError> {
        if self.degree() != g.degree() {
            return Ok(false);
        }
        for j in window.0..=window.1 {
            if self.component(j)? != g.component(j)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_on(&self, window: (i64, i64)) -> Result<bool, MapError> {
        for j in window.0..=window.1 {
            if !self.component(j)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Materializes the window into a table, dropping the construction history.
    pub fn freeze(&self, window: (i64, i64), zero_outside: bool) -> Result<GradedMap, MapError> {
        let comps = (window.0..=window.1).map(|j| self.component(j).map(|m| (*m).clone())).collect::<Result<_, _>>()?;
        Ok(GradedMap::table(self.resolution(), self.degree(), window.0, comps, zero_outside))
    }

    /// Applies `f` to every component.
    pub fn map_components(
        &self,
        f: impl Fn(i64, &ModuleMap) -> ModuleMap + Send + Sync + 'static,
    ) -> GradedMap {
        let g = self.clone();
        GradedMap::rule(self.resolution(), self.degree(), move |j| Ok(f(j, &*g.component(j)?)))
    }
}

/// Null-homotopy of a cocycle with vanishing class, on the window [lo, hi], by two-sided induction
/// from h_0 = 0. With `restricted` every lift is taken inside I.
pub fn null_homotopy(f: &GradedMap, window: (i64, i64), restricted: bool) -> Result<GradedMap, MapError> {
    let res = f.resolution().clone();
    let alg = res.algebra().clone();
    let field = alg.field().clone();
    let n = f.degree();
    let (lo, hi) = window;
    assert!(lo <= 0 && hi >= 0, "window must contain 0");
    let mut comps: HashMap<i64, ModuleMap> = HashMap::new();
    comps.insert(0, ModuleMap::zero(res.rank(0), res.rank(n - 1)));
    let hsign = field.sign(n - 1);
    for k in 0..hi {
        // ∂ h_{k+1} = f_k + (−1)^{|h|} h_k ∂
        let rhs = f.component(k)?.axpy(&alg, hsign, &comps[&k].compose(&alg, &res.differential(k + n)));
        let h = res.left_divide(k + 1, &rhs, restricted).ok_or(MapError::NoLift(k + 1))?;
        comps.insert(k + 1, h);
    }
    let fsign = field.sign(n);
    for k in (lo..0).rev() {
        // h_k ∂ = (−1)^n (f_k − ∂ h_{k+1})
        let rhs = f.component(k)?.sub(&alg, &res.differential(k + 1).compose(&alg, &comps[&(k + 1)])).scale(&alg, fsign);
        let h = res.right_divide(k + n, &rhs, restricted).ok_or(MapError::NoLift(k))?;
        comps.insert(k, h);
    }
    let list = (lo..=hi).map(|k| comps.remove(&k).unwrap()).collect();
    Ok(GradedMap::table(&res, n - 1, lo, list, false))
}

/// Sparse linear system for dh = g where h has unknown components in `slots`; `slot_of(j)`
/// maps a component index to its slot.
struct HomotopySystem<'a> {
    res: &'a Arc<Resolution>,
    hdeg: i64,
    slots: Vec<i64>,
    restricted: bool,
    unknown_offsets: Vec<usize>,
}

impl<'a> HomotopySystem<'a> {
    fn new(res: &'a Arc<Resolution>, hdeg: i64, slots: Vec<i64>, restricted: bool) -> Self {
        let d = res.algebra().dim();
        let mut offsets = Vec::with_capacity(slots.len() + 1);
        let mut acc = 0;
        for &j in &slots {
            offsets.push(acc);
            acc += res.rank(j) * res.rank(j + hdeg) * d;
        }
        offsets.push(acc);
        Self { res, hdeg, slots, restricted, unknown_offsets: offsets }
    }

    fn allowed(&self, b: usize) -> bool {
        !self.restricted || self.res.algebra().monomial_in_ideal(b, IdealSpec::AugmentationPower(1))
    }

    /// Solves for h with (dh)_j = g_j for every j in `equations`.
    fn solve(
        &self,
        g: &GradedMap,
        equations: &[i64],
        slot_of: impl Fn(i64) -> usize,
    ) -> Result<Option<Vec<ModuleMap>>, MapError> {
        let res = self.res;
        let alg = res.algebra();
        let f = alg.field();
        let d = alg.dim();
        let hd = self.hdeg;
        let cross = f.neg(f.sign(hd));
        let total = *self.unknown_offsets.last().unwrap();
        let mut columns: Vec<Vec<(u32, Scalar)>> = vec![Vec::new(); total];
        let mut rhs: SparseVec = Vec::new();
        let mut eq_offset = 0usize;
        for &j in equations {
            let (er, ec) = (res.rank(j), res.rank(j + hd + 1));
            let eq_index = |r: usize, c: usize, b: usize| (eq_offset + (r * ec + c) * d + b) as u32;
            // term ∂_{j+1} h_{j+1}
            let s = slot_of(j + 1);
            let (hr, hc) = (res.rank(j + 1), res.rank(j + 1 + hd));
            let dl = res.differential(j + 1);
            for r in 0..hr {
                for c in 0..hc {
                    for b in 0..d {
                        if !self.allowed(b) {
                            continue;
                        }
                        let u = self.unknown_offsets[s] + (r * hc + c) * d + b;
                        let be = AlgebraElement::basis(b);
                        for (i, e) in dl.column(r) {
                            for &(t, v) in alg.mul(e, &be).terms() {
                                columns[u].push((eq_index(*i as usize, c, t as usize), v));
                            }
                        }
                    }
                }
            }
            // term −(−1)^{|h|} h_j ∂_{j+|h|+1}
            let s = slot_of(j);
            let (hr, hc) = (res.rank(j), res.rank(j + hd));
            let dr = res.differential(j + hd + 1);
            let mut drows: Vec<Vec<(usize, &AlgebraElement)>> = vec![Vec::new(); dr.rows()];
            for (i, l, e) in dr.entries() {
                drows[i].push((l, e));
            }
            for r in 0..hr {
                for c in 0..hc {
                    for b in 0..d {
                        if !self.allowed(b) {
                            continue;
                        }
                        let u = self.unknown_offsets[s] + (r * hc + c) * d + b;
                        let be = AlgebraElement::basis(b);
                        for &(l, e) in &drows[c] {
                            for &(t, v) in alg.mul(&be, e).terms() {
                                columns[u].push((eq_index(r, l, t as usize), f.mul(cross, v)));
                            }
                        }
                    }
                }
            }
            let gj = g.component(j)?;
            for (r, c, e) in gj.entries() {
                for &(t, v) in e.terms() {
                    rhs.push((eq_index(r, c, t as usize), v));
                }
            }
            eq_offset += er * ec * d;
        }
        let mut kept = Vec::new();
        let mut cols = Vec::new();
        for (u, mut col) in columns.into_iter().enumerate() {
            if !self.allowed(u % d) {
                continue;
            }
            col.sort_unstable_by_key(|t| t.0);
            let mut merged: SparseVec = Vec::with_capacity(col.len());
            for (i, v) in col {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 = f.add(last.1, v),
                    _ => merged.push((i, v)),
                }
            }
            merged.retain(|t| !t.1.is_zero());
            kept.push(u);
            cols.push(merged);
        }
        rhs.sort_unstable_by_key(|t| t.0);
        let solver = ColumnSolver::new(f.clone(), eq_offset, cols);
        let Some(x) = solver.solve(&rhs) else { return Ok(None) };
        let mut out: Vec<ModuleMap> =
            self.slots.iter().map(|&j| ModuleMap::zero(res.rank(j), res.rank(j + hd))).collect();
        let mut dense: Vec<Vec<Scalar>> = vec![Vec::new(); *self.unknown_offsets.last().unwrap() / d.max(1)];
        for (k, c) in x {
            let u = kept[k as usize];
            let cell = u / d;
            if dense[cell].is_empty() {
                dense[cell] = vec![Scalar::ZERO; d];
            }
            dense[cell][u % d] = c;
        }
        for (s, &j) in self.slots.iter().enumerate() {
            let hc = res.rank(j + hd);
            let base = self.unknown_offsets[s] / d;
            for r in 0..res.rank(j) {
                for c in 0..hc {
                    let cell = &dense[base + r * hc + c];
                    if !cell.is_empty() {
                        out[s].set(r, c, alg.from_dense(cell));
                    }
                }
            }
        }
        Ok(Some(out))
    }
}

/// A periodic h with dh = g, trying each period in turn. The resolution must be periodic with a
/// period dividing every tried period, and g must be periodic with a tried period.
pub fn find_homotopy(g: &GradedMap, periods: &[i64]) -> Result<GradedMap, MapError> {
    let res = g.resolution();
    let base = res.period().ok_or(MapError::NotPeriodic(0))?;
    for &t in periods {
        if t % base != 0 {
            return Err(MapError::NotPeriodic(t));
        }
        let sys = HomotopySystem::new(res, g.degree() - 1, (0..t).collect(), false);
        let eqs: Vec<i64> = (0..t).collect();
        if let Some(comps) = sys.solve(g, &eqs, |j| j.rem_euclid(t) as usize)? {
            return Ok(GradedMap::periodic(res, g.degree() - 1, comps));
        }
    }
    Err(MapError::Infeasible)
}

/// Solves dh = g on the equations j ∈ [lo, hi−1] with unknown components h_lo..h_hi, all at once.
/// Returns None when no such h exists (with `restricted`, none with entries in I).
pub fn windowed_homotopy(g: &GradedMap, window: (i64, i64), restricted: bool) -> Result<Option<GradedMap>, MapError> {
    let res = g.resolution();
    let (lo, hi) = window;
    let sys = HomotopySystem::new(res, g.degree() - 1, (lo..=hi).collect(), restricted);
    let eqs: Vec<i64> = (lo..hi).collect();
    Ok(sys.solve(g, &eqs, |j| (j - lo) as usize)?.map(|comps| GradedMap::table(res, g.degree() - 1, lo, comps, false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn cyclic(p: u32, n: u32) -> Arc<Resolution> {
        Resolution::cyclic(Algebra::truncated_polynomial(Field::prime(p).unwrap(), &[n]).unwrap()).unwrap()
    }

    fn cyclic_x(res: &Arc<Resolution>) -> GradedMap {
        let alg = res.algebra().clone();
        let n = alg.truncation()[0];
        GradedMap::periodic(
            res,
            1,
            vec![ModuleMap::from_rows(vec![vec![alg.one()]]), ModuleMap::from_rows(vec![vec![alg.z_pow(0, n - 2)]])],
        )
    }

    #[test]
    fn differential_of_identity_and_cocycle() {
        let res = cyclic(3, 9);
        assert!(GradedMap::identity(&res).is_cocycle((-4, 4)).unwrap());
        let x = cyclic_x(&res);
        assert!(x.is_cocycle((-5, 5)).unwrap());
        assert_eq!(x.class_of().unwrap().coeffs, vec![Scalar::ONE]);
        let x2 = x.compose(&x);
        assert!(x2.d().is_zero_on((-4, 4)).unwrap());
        assert!(x2.class_of().unwrap().is_zero());
    }

    #[test]
    fn null_homotopy_of_square() {
        let res = cyclic(3, 9);
        let x = cyclic_x(&res);
        let x2 = x.compose(&x);
        let h = null_homotopy(&x2, (-5, 5), false).unwrap();
        assert!(h.d().equal_on(&x2, (-5, 4)).unwrap());
        let h = null_homotopy(&x2, (-5, 5), true).unwrap();
        assert!(h.is_ideal_map(IdealSpec::AugmentationPower(1), (-5, 5)).unwrap());
        let p = find_homotopy(&x2, &[2]).unwrap();
        assert!(p.d().equal_on(&x2, (-4, 4)).unwrap());
        let w = windowed_homotopy(&x2, (-3, 3), false).unwrap().unwrap();
        assert!(w.d().equal_on(&x2, (-3, 2)).unwrap());
    }

    #[test]
    fn leibniz_rule() {
        let res = cyclic(5, 5);
        let x = cyclic_x(&res);
        let x2 = x.compose(&x);
        let q = null_homotopy(&x2, (-6, 6), false).unwrap();
        let lhs = q.compose(&x).d();
        let rhs = q.d().compose(&x).add(&q.compose(&x.d()).scale(res.field().sign(q.degree())));
        assert!(lhs.equal_on(&rhs, (-4, 4)).unwrap());
    }
}
