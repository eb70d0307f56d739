//! Complete projective resolutions P̂_* of the trivial module for cyclic groups, Q8 and
//! products of cyclic p-groups.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraElement, AlgebraKind, IdealSpec};
use crate::linalg::{ColumnSolver, SparseVec};
use crate::module_map::ModuleMap;
use crate::scalars::{Field, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("algebra kind does not fit this resolution family")]
    WrongKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Cyclic { n: u32 },
    Q8,
    AbelianProduct { exponents: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BasisLabel {
    Slot(usize),
    MultiIndex(Vec<i64>),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Slot(i) => write!(f, "e{i}"),
            BasisLabel::MultiIndex(a) => {
                let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

struct Labels {
    list: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
}

type Memo<T> = RwLock<HashMap<i64, Arc<T>>>;

pub struct Resolution {
    algebra: Arc<Algebra>,
    family: Family,
    factors: Vec<Arc<Resolution>>,
    overrides: HashMap<i64, ModuleMap>,
    labels: Memo<Labels>,
    differentials: Memo<ModuleMap>,
    left_solvers: Memo<FlatSolver>,
    right_solvers: Memo<FlatSolver>,
    left_solvers_i: Memo<FlatSolver>,
    right_solvers_i: Memo<FlatSolver>,
}

/// A k-linear solver whose unknowns are a subset of flattened module coordinates.
pub struct FlatSolver {
    solver: ColumnSolver,
    unknowns: Vec<u32>,
}

impl FlatSolver {
    pub fn rank(&self) -> usize {
        self.solver.rank()
    }

    /// Flattened coordinates x with M·x = b, if any.
    pub fn solve(&self, b: &[(u32, Scalar)]) -> Option<SparseVec> {
        let combo = self.solver.solve(b)?;
        let mut x: SparseVec = combo.into_iter().map(|(k, c)| (self.unknowns[k as usize], c)).collect();
        x.sort_unstable_by_key(|t| t.0);
        Some(x)
    }

    pub fn in_image(&self, b: &[(u32, Scalar)]) -> bool {
        self.solver.in_image(b)
    }
}

impl fmt::Debug for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Resolution({:?})", self.family)
    }
}

fn memo<T>(m: &Memo<T>, n: i64, make: impl FnOnce() -> T) -> Arc<T> {
    if let Some(v) = m.read().unwrap().get(&n) {
        return v.clone();
    }
    let v = Arc::new(make());
    m.write().unwrap().entry(n).or_insert(v).clone()
}

/// [n] = 1 for n odd, m − 1 for n even.
pub fn bracket(n: i64, m: u32) -> u32 {
    if n.rem_euclid(2) == 1 {
        1
    } else {
        m - 1
    }
}

/// Multi-indices α ≥ 0 with |α| = total, in descending lexicographic order.
pub fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < 0 {
        return vec![];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Resolution {
    fn build(algebra: Arc<Algebra>, family: Family, factors: Vec<Arc<Resolution>>) -> Arc<Resolution> {
        Arc::new(Resolution {
            algebra,
            family,
            factors,
            overrides: HashMap::new(),
            labels: RwLock::default(),
            differentials: RwLock::default(),
            left_solvers: RwLock::default(),
            right_solvers: RwLock::default(),
            left_solvers_i: RwLock::default(),
            right_solvers_i: RwLock::default(),
        })
    }

    /// L = k[z]/z^n: ∂_{j+1} is z for j even and −z^{n−1} for j odd.
    pub fn cyclic(algebra: Arc<Algebra>) -> Result<Arc<Resolution>, ResolutionError> {
        match algebra.kind() {
            AlgebraKind::TruncatedPolynomial { exponents } if exponents.len() == 1 => {
                let n = exponents[0];
                Ok(Self::build(algebra, Family::Cyclic { n }, Vec::new()))
            }
            _ => Err(ResolutionError::WrongKind),
        }
    }

    /// The 4-periodic resolution of k over kQ8.
    pub fn q8(algebra: Arc<Algebra>) -> Result<Arc<Resolution>, ResolutionError> {
        match algebra.kind() {
            AlgebraKind::QuaternionQ8 => Ok(Self::build(algebra, Family::Q8, Vec::new())),
            _ => Err(ResolutionError::WrongKind),
        }
    }

    /// Tensor product of the cyclic factor resolutions, on the multi-index bases M_n / N_n.
    pub fn abelian(algebra: Arc<Algebra>) -> Result<Arc<Resolution>, ResolutionError> {
        let exponents = match algebra.kind() {
            AlgebraKind::TruncatedPolynomial { exponents } if exponents.len() >= 2 => exponents.clone(),
            _ => return Err(ResolutionError::WrongKind),
        };
        let field = algebra.field().clone();
        let factors = exponents
            .iter()
            .map(|&m| {
                let a = Algebra::truncated_polynomial(field.clone(), &[m]).expect("factor algebra");
                Resolution::cyclic(a).expect("factor resolution")
            })
            .collect();
        Ok(Self::build(algebra, Family::AbelianProduct { exponents }, factors))
    }

    /// Chooses the family from the algebra kind.
    pub fn for_algebra(algebra: Arc<Algebra>) -> Arc<Resolution> {
        match algebra.kind() {
            AlgebraKind::QuaternionQ8 => Self::q8(algebra).unwrap(),
            AlgebraKind::TruncatedPolynomial { exponents } if exponents.len() == 1 => Self::cyclic(algebra).unwrap(),
            _ => Self::abelian(algebra).unwrap(),
        }
    }

    /// A copy whose differential in the given degree is replaced (negative controls).
    pub fn with_override(&self, degree: i64, map: ModuleMap) -> Arc<Resolution> {
        let mut overrides = self.overrides.clone();
        overrides.insert(degree, map);
        Arc::new(Resolution {
            algebra: self.algebra.clone(),
            family: self.family.clone(),
            factors: self.factors.clone(),
            overrides,
            labels: RwLock::default(),
            differentials: RwLock::default(),
            left_solvers: RwLock::default(),
            right_solvers: RwLock::default(),
            left_solvers_i: RwLock::default(),
            right_solvers_i: RwLock::default(),
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn field(&self) -> &Arc<Field> {
        self.algebra.field()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Cyclic factor resolutions of an abelian product.
    pub fn factors(&self) -> &[Arc<Resolution>] {
        &self.factors
    }

    /// Number of tensor factors (1 for cyclic, 0 for Q8).
    pub fn factor_count(&self) -> usize {
        match &self.family {
            Family::Cyclic { .. } => 1,
            Family::Q8 => 0,
            Family::AbelianProduct { exponents } => exponents.len(),
        }
    }

    /// Period of labels and differentials, if any.
    pub fn period(&self) -> Option<i64> {
        match self.family {
            Family::Cyclic { .. } => Some(2),
            Family::Q8 => Some(4),
            Family::AbelianProduct { .. } => None,
        }
    }

    fn label_set(&self, n: i64) -> Arc<Labels> {
        memo(&self.labels, n, || {
            let list: Vec<BasisLabel> = match &self.family {
                Family::Cyclic { .. } => vec![BasisLabel::Slot(0)],
                Family::Q8 => {
                    let r = [1usize, 2, 2, 1][n.rem_euclid(4) as usize];
                    (0..r).map(BasisLabel::Slot).collect()
                }
                Family::AbelianProduct { exponents } => {
                    let r = exponents.len();
                    if n >= 0 {
                        compositions(n, r).into_iter().map(BasisLabel::MultiIndex).collect()
                    } else {
                        // α ∈ N_n ordered by its dual label (−𝟏 − α) ∈ M_{−n−1}
                        compositions(-n - 1, r)
                            .into_iter()
                            .map(|d| BasisLabel::MultiIndex(d.iter().map(|x| -1 - x).collect()))
                            .collect()
                    }
                }
            };
            let index = list.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
            Labels { list, index }
        })
    }

    pub fn rank(&self, n: i64) -> usize {
        self.label_set(n).list.len()
    }

    pub fn labels(&self, n: i64) -> Vec<BasisLabel> {
        self.label_set(n).list.clone()
    }

    pub fn label(&self, n: i64, i: usize) -> BasisLabel {
        self.label_set(n).list[i].clone()
    }

    pub fn label_index(&self, n: i64, label: &BasisLabel) -> Option<usize> {
        self.label_set(n).index.get(label).copied()
    }

    /// Multi-index of basis element i of P̂_n (abelian family).
    pub fn multi_index(&self, n: i64, i: usize) -> Vec<i64> {
        match &self.label_set(n).list[i] {
            BasisLabel::MultiIndex(a) => a.clone(),
            BasisLabel::Slot(_) => vec![n],
        }
    }

    pub fn multi_index_position(&self, alpha: &[i64]) -> Option<(i64, usize)> {
        let r = self.factor_count();
        if alpha.len() != r {
            return None;
        }
        let n = if alpha.iter().all(|&a| a >= 0) {
            alpha.iter().sum::<i64>()
        } else if alpha.iter().all(|&a| a < 0) {
            alpha.iter().sum::<i64>() + r as i64 - 1
        } else {
            return None;
        };
        self.label_index(n, &BasisLabel::MultiIndex(alpha.to_vec())).map(|i| (n, i))
    }

    /// Factor differential (−1)^{a+1} z_i^{[a]} : P̂^i_a → P̂^i_{a−1}, embedded in L.
    fn factor_differential(&self, i: usize, a: i64) -> AlgebraElement {
        let m = self.algebra.truncation()[i];
        let z = self.algebra.z_pow(i, bracket(a, m));
        self.algebra.scale(self.field().sign(a + 1), &z)
    }

    /// ∂_n : P̂_n → P̂_{n−1}.
    pub fn differential(&self, n: i64) -> Arc<ModuleMap> {
        if let Some(m) = self.overrides.get(&n) {
            return Arc::new(m.clone());
        }
        memo(&self.differentials, n, || self.compute_differential(n))
    }

    fn compute_differential(&self, n: i64) -> ModuleMap {
        let alg = &*self.algebra;
        let f = alg.field();
        match &self.family {
            Family::Cyclic { .. } => ModuleMap::from_rows(vec![vec![self.factor_differential(0, n)]]),
            Family::Q8 => {
                let e = |i: usize| AlgebraElement::basis(i);
                let plus_e = |i: usize| alg.add(&e(i), &e(0));
                let (ie, je, ke, k2e) = (plus_e(1), plus_e(2), plus_e(3), plus_e(7));
                match n.rem_euclid(4) {
                    1 => ModuleMap::from_rows(vec![vec![ie, je]]),
                    2 => ModuleMap::from_rows(vec![vec![je, k2e], vec![ke, ie]]),
                    3 => ModuleMap::from_rows(vec![vec![ie], vec![je]]),
                    _ => ModuleMap::from_rows(vec![vec![alg.norm()]]),
                }
            }
            Family::AbelianProduct { .. } => {
                let r = self.factor_count();
                let (src, tgt) = (self.label_set(n), self.label_set(n - 1));
                let mut m = ModuleMap::zero(tgt.list.len(), src.list.len());
                for (col, label) in src.list.iter().enumerate() {
                    let BasisLabel::MultiIndex(alpha) = label else { unreachable!() };
                    if n == 0 {
                        let mut entry = alg.one();
                        for i in 0..r {
                            entry = alg.mul(&entry, &self.factor_differential(i, 0));
                        }
                        let target = BasisLabel::MultiIndex(vec![-1; r]);
                        m.set(tgt.index[&target], col, entry);
                        continue;
                    }
                    let mut prefix = 0i64;
                    for i in 0..r {
                        let a = alpha[i];
                        let live = n < 0 || a > 0;
                        if live {
                            let exp = if n > 0 { prefix } else { prefix + i as i64 };
                            let mut beta = alpha.clone();
                            beta[i] -= 1;
                            let entry = alg.scale(f.sign(exp), &self.factor_differential(i, a));
                            m.set(tgt.index[&BasisLabel::MultiIndex(beta)], col, entry);
                        }
                        prefix += a;
                    }
                }
                m
            }
        }
    }

    /// ε : P̂_0 = L → k as a row (P̂_0 always has rank 1).
    pub fn augmentation(&self, a: &AlgebraElement) -> Scalar {
        self.algebra.augmentation(a)
    }

    /// Flattened k-coordinates of the basis element (label i)·b of P̂_n.
    #[inline]
    pub fn flat_index(&self, label: usize, basis: usize) -> u32 {
        (label * self.algebra.dim() + basis) as u32
    }

    /// Flattens a column vector over L (as (row, entry) pairs) to k-coordinates.
    pub fn flatten(&self, column: &[(u32, AlgebraElement)]) -> SparseVec {
        let mut v = Vec::new();
        for (i, e) in column {
            for &(b, c) in e.terms() {
                v.push((self.flat_index(*i as usize, b as usize), c));
            }
        }
        v.sort_unstable_by_key(|t| t.0);
        v
    }

    pub fn unflatten(&self, v: &[(u32, Scalar)], rows: usize) -> Vec<(u32, AlgebraElement)> {
        let d = self.algebra.dim();
        let f = self.field();
        let mut sorted = v.to_vec();
        sorted.sort_unstable_by_key(|t| t.0);
        let mut out = Vec::new();
        let mut k = 0;
        while k < sorted.len() {
            let i = sorted[k].0 as usize / d;
            debug_assert!(i < rows);
            let mut terms: Vec<(u32, Scalar)> = Vec::new();
            while k < sorted.len() && sorted[k].0 as usize / d == i {
                let (b, c) = ((sorted[k].0 as usize % d) as u32, sorted[k].1);
                match terms.last_mut() {
                    Some(t) if t.0 == b => t.1 = f.add(t.1, c),
                    _ => terms.push((b, c)),
                }
                k += 1;
            }
            terms.retain(|t| !t.1.is_zero());
            if !terms.is_empty() {
                out.push((i as u32, AlgebraElement::from_sorted(terms)));
            }
        }
        out
    }

    /// k-linear columns of ∂_n: the image of (j)·b for every source label j and basis b.
    pub fn differential_columns(&self, n: i64) -> Vec<SparseVec> {
        let dm = self.differential(n);
        let alg = &*self.algebra;
        let mut cols = Vec::with_capacity(dm.cols() * alg.dim());
        for j in 0..dm.cols() {
            for b in 0..alg.dim() {
                let be = AlgebraElement::basis(b);
                let img: Vec<(u32, AlgebraElement)> =
                    dm.column(j).iter().map(|(i, a)| (*i, alg.mul(a, &be))).filter(|(_, e)| !e.is_zero()).collect();
                cols.push(self.flatten(&img));
            }
        }
        cols
    }

    fn unknown_allowed(&self, b: usize, restricted: bool) -> bool {
        !restricted || self.algebra.monomial_in_ideal(b, IdealSpec::AugmentationPower(1))
    }

    /// Solver for ∂_n ∘ X = Y column by column; unknowns are the flattened coordinates of P̂_n,
    /// optionally restricted to I·P̂_n.
    pub fn left_solver(&self, n: i64, restricted: bool) -> Arc<FlatSolver> {
        let memo_ref = if restricted { &self.left_solvers_i } else { &self.left_solvers };
        memo(memo_ref, n, || {
            let d = self.algebra.dim();
            let cols = self.differential_columns(n);
            let unknowns: Vec<u32> = (0..cols.len() as u32).filter(|&k| self.unknown_allowed(k as usize % d, restricted)).collect();
            let solver = ColumnSolver::new(
                self.field().clone(),
                self.rank(n - 1) * d,
                unknowns.iter().map(|&k| cols[k as usize].clone()),
            );
            FlatSolver { solver, unknowns }
        })
    }

    /// Solver for X ∘ ∂_n = Y row by row: unknown (label j of P̂_{n−1}, basis b) contributes the
    /// row b·∂_n[j][·] of length rank(n).
    pub fn right_solver(&self, n: i64, restricted: bool) -> Arc<FlatSolver> {
        let memo_ref = if restricted { &self.right_solvers_i } else { &self.right_solvers };
        memo(memo_ref, n, || {
            let dm = self.differential(n);
            let alg = &*self.algebra;
            let d = alg.dim();
            let mut rows_of: Vec<Vec<(u32, AlgebraElement)>> = vec![Vec::new(); dm.rows()];
            for (i, j, e) in dm.entries() {
                rows_of[i].push((j as u32, e.clone()));
            }
            let mut cols = Vec::new();
            let mut unknowns = Vec::new();
            for (j, row) in rows_of.iter().enumerate() {
                for b in 0..d {
                    if !self.unknown_allowed(b, restricted) {
                        continue;
                    }
                    let be = AlgebraElement::basis(b);
                    let img: Vec<(u32, AlgebraElement)> =
                        row.iter().map(|(k, a)| (*k, alg.mul(&be, a))).filter(|(_, e)| !e.is_zero()).collect();
                    cols.push(self.flatten(&img));
                    unknowns.push((j * d + b) as u32);
                }
            }
            FlatSolver { solver: ColumnSolver::new(self.field().clone(), dm.cols() * d, cols), unknowns }
        })
    }

    /// Solves ∂_n ∘ X = y for a map y : P̂_m → P̂_{n−1}. None if some column is not in the image.
    pub fn left_divide(&self, n: i64, y: &ModuleMap, restricted: bool) -> Option<ModuleMap> {
        let solver = self.left_solver(n, restricted);
        let mut out = ModuleMap::zero(self.rank(n), y.cols());
        for c in 0..y.cols() {
            let v = self.flatten(y.column(c));
            let x = solver.solve(&v)?;
            for (i, e) in self.unflatten(&x, self.rank(n)) {
                out.set(i as usize, c, e);
            }
        }
        Some(out)
    }

    /// Solves X ∘ ∂_n = y for a map y : P̂_n → P̂_m. None if some row is not in the image.
    pub fn right_divide(&self, n: i64, y: &ModuleMap, restricted: bool) -> Option<ModuleMap> {
        let solver = self.right_solver(n, restricted);
        let mut rows_of: Vec<Vec<(u32, AlgebraElement)>> = vec![Vec::new(); y.rows()];
        for (i, j, e) in y.entries() {
            rows_of[i].push((j as u32, e.clone()));
        }
        let mut out = ModuleMap::zero(y.rows(), self.rank(n - 1));
        for (r, row) in rows_of.iter().enumerate() {
            let v = self.flatten(row);
            let x = solver.solve(&v)?;
            for (j, e) in self.unflatten(&x, self.rank(n - 1)) {
                out.set(r, j as usize, e);
            }
        }
        Some(out)
    }

    /// Rank over k of ∂_n as a k-linear map.
    pub fn k_rank(&self, n: i64) -> usize {
        self.left_solver(n, false).rank()
    }

    /// Exactness and ∂∘∂ = 0 for n strictly inside the window, plus im ∂_1 = ker ε.
    pub fn verify_exact(&self, window: (i64, i64)) -> CheckReport {
        let d = self.algebra.dim();
        let mut failures = Vec::new();
        for n in window.0 + 1..window.1 {
            let dd = self.differential(n).compose(&self.algebra, &self.differential(n + 1));
            if !dd.is_zero() {
                failures.push(format!("d{n}∘d{} ≠ 0", n + 1));
            }
            let kernel = self.rank(n) * d - self.k_rank(n);
            let image = self.k_rank(n + 1);
            if kernel != image {
                failures.push(format!("degree {n}: dim ker = {kernel}, dim im = {image}"));
            }
        }
        if window.0 < 1 && 1 < window.1 {
            let d1 = self.differential(1);
            if d1.entries().any(|(_, _, e)| !self.algebra.augmentation(e).is_zero()) {
                failures.push("ε∘∂_1 ≠ 0".into());
            }
            if self.k_rank(1) != d - 1 {
                failures.push("im ∂_1 ≠ ker ε".into());
            }
        }
        CheckReport::new("exactness", failures)
    }

    /// Every differential entry in the window lies in the augmentation ideal.
    pub fn verify_minimal(&self, window: (i64, i64)) -> CheckReport {
        let mut failures = Vec::new();
        for n in window.0..=window.1 {
            if !self.differential(n).in_ideal(&self.algebra, IdealSpec::AugmentationPower(1)) {
                failures.push(format!("∂_{n} has an entry outside I"));
            }
        }
        CheckReport::new("minimality", failures)
    }
}

/// Pass/fail report with failure descriptions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str, failures: Vec<String>) -> Self {
        Self { name: name.into(), passed: failures.is_empty(), failures }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian(p: u32, ms: &[u32]) -> Arc<Resolution> {
        let f = Field::prime(p).unwrap();
        Resolution::abelian(Algebra::truncated_polynomial(f, ms).unwrap()).unwrap()
    }

    #[test]
    fn cyclic_differentials() {
        let f = Field::prime(3).unwrap();
        let r = Resolution::cyclic(Algebra::truncated_polynomial(f, &[3]).unwrap()).unwrap();
        let a = r.algebra().clone();
        assert_eq!(a.render(&r.differential(1).get(0, 0)), "z");
        assert_eq!(a.render(&r.differential(2).get(0, 0)), "2*z^2");
        assert!(r.verify_exact((-6, 6)).passed);
        assert!(r.verify_minimal((-6, 6)).passed);
    }

    #[test]
    fn q8_shape_and_exactness() {
        let r = Resolution::q8(Algebra::quaternion(Field::prime(2).unwrap()).unwrap()).unwrap();
        assert_eq!((r.rank(2), r.rank(4), r.rank(-1)), (2, 1, 1));
        let rep = r.verify_exact((-9, 9));
        assert!(rep.passed, "{rep:?}");
        assert!(r.verify_minimal((-5, 5)).passed);
    }

    #[test]
    fn abelian_ranks_and_norm() {
        let r = abelian(2, &[2, 2, 2]);
        assert_eq!(r.rank(2), 6);
        assert_eq!(r.rank(-3), 6);
        assert_eq!(r.differential(0).get(0, 0), r.algebra().norm());
        let rep = r.verify_exact((-5, 5));
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn abelian_odd_exactness() {
        for ms in [&[3u32, 3][..], &[3, 9], &[9, 3]] {
            let r = abelian(3, ms);
            let rep = r.verify_exact((-5, 5));
            assert!(rep.passed, "{ms:?} {rep:?}");
            assert!(r.verify_minimal((-5, 5)).passed);
        }
        let r = abelian(2, &[4, 2]);
        assert!(r.verify_exact((-6, 6)).passed);
    }

    #[test]
    fn corrupted_differential_detected() {
        let r = abelian(2, &[2, 2]);
        let mut bad = (*r.differential(2)).clone();
        bad.set(0, 0, r.algebra().one());
        let broken = r.with_override(2, bad);
        let rep = broken.verify_exact((-3, 4));
        assert!(!rep.passed);
        assert!(!broken.verify_minimal((-3, 4)).passed);
    }
}
