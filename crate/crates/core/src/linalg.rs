//! Exact linear algebra over F_q: an incremental sparse row echelon form and a small dense oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::scalars::{Field, Scalar};

/// Sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec = Vec<(u32, Scalar)>;

/// Incremental echelon basis of a subspace of k^dim. Every stored row has leading coefficient 1
/// and records which inserted vectors it combines.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Arc<Field>,
    dim: usize,
    pivot_row: Vec<u32>,
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    inserted: u32,
}

const NONE: u32 = u32::MAX;

/// Outcome of reducing a vector against an echelon basis.
pub struct Reduction {
    /// Remaining vector (zero iff the input lies in the span).
    pub residual: SparseVec,
    /// Coefficients λ on inserted vectors with input = residual + Σ λ_i v_i.
    pub combination: SparseVec,
}

struct Scratch {
    dense: Vec<Scalar>,
    touched: BinaryHeap<Reverse<u32>>,
    mark: Vec<bool>,
    combo: Vec<Scalar>,
    combo_mark: Vec<bool>,
    combo_touched: Vec<u32>,
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Scratch> = std::cell::RefCell::new(Scratch {
        dense: Vec::new(),
        touched: BinaryHeap::new(),
        mark: Vec::new(),
        combo: Vec::new(),
        combo_mark: Vec::new(),
        combo_touched: Vec::new(),
    });
}

impl Scratch {
    /// Grows the buffers; they are all-zero between uses.
    fn prepare(&mut self, dim: usize, combos: usize) {
        if self.dense.len() < dim {
            self.dense.resize(dim, Scalar::ZERO);
            self.mark.resize(dim, false);
        }
        if self.combo.len() < combos {
            self.combo.resize(combos, Scalar::ZERO);
            self.combo_mark.resize(combos, false);
        }
    }

    #[inline]
    fn touch(&mut self, i: u32) {
        if !self.mark[i as usize] {
            self.mark[i as usize] = true;
            self.touched.push(Reverse(i));
        }
    }
}

fn axpy(field: &Field, acc: &mut Vec<(u32, Scalar)>, c: Scalar, v: &[(u32, Scalar)]) {
    // acc += c·v, both sorted
    let mut out = Vec::with_capacity(acc.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < v.len() {
        if j == v.len() || (i < acc.len() && acc[i].0 < v[j].0) {
            out.push(acc[i]);
            i += 1;
        } else if i == acc.len() || v[j].0 < acc[i].0 {
            out.push((v[j].0, field.mul(c, v[j].1)));
            j += 1;
        } else {
            let s = field.add(acc[i].1, field.mul(c, v[j].1));
            if !s.is_zero() {
                out.push((acc[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    *acc = out;
}

impl Echelon {
    pub fn new(field: Arc<Field>, dim: usize) -> Self {
        Self { field, dim, pivot_row: vec![NONE; dim], rows: Vec::new(), combos: Vec::new(), inserted: 0 }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far.
    pub fn inserted(&self) -> usize {
        self.inserted as usize
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r[0].0 as usize)
    }

    fn reduce_with(&self, v: &[(u32, Scalar)], full: bool, track: bool) -> Reduction {
        if v.is_empty() {
            return Reduction { residual: Vec::new(), combination: Vec::new() };
        }
        SCRATCH.with(|cell| {
            let mut guard = cell.borrow_mut();
            let s = &mut *guard;
            s.prepare(self.dim, if track { self.inserted as usize } else { 0 });
            self.reduce_in(s, v, full, track)
        })
    }

    fn reduce_in(&self, s: &mut Scratch, v: &[(u32, Scalar)], full: bool, track: bool) -> Reduction {
        let f = &*self.field;
        for &(i, c) in v {
            s.dense[i as usize] = f.add(s.dense[i as usize], c);
            s.touch(i);
        }
        let mut residual: SparseVec = Vec::new();
        while let Some(Reverse(i)) = s.touched.pop() {
            let c = s.dense[i as usize];
            s.dense[i as usize] = Scalar::ZERO;
            s.mark[i as usize] = false;
            if c.is_zero() {
                continue;
            }
            let r = self.pivot_row[i as usize];
            if r == NONE {
                residual.push((i, c));
                if !full {
                    break;
                }
                continue;
            }
            let neg = f.neg(c);
            for &(j, x) in &self.rows[r as usize][1..] {
                let slot = &mut s.dense[j as usize];
                *slot = f.add(*slot, f.mul(neg, x));
                s.touch(j);
            }
            if track {
                for &(k, x) in &self.combos[r as usize] {
                    let slot = &mut s.combo[k as usize];
                    if !s.combo_mark[k as usize] {
                        s.combo_mark[k as usize] = true;
                        s.combo_touched.push(k);
                    }
                    *slot = f.add(*slot, f.mul(c, x));
                }
            }
        }
        // drain whatever is left, keeping it in the residual
        while let Some(Reverse(i)) = s.touched.pop() {
            let c = s.dense[i as usize];
            s.dense[i as usize] = Scalar::ZERO;
            s.mark[i as usize] = false;
            if !c.is_zero() {
                residual.push((i, c));
            }
        }
        let mut combination: SparseVec = Vec::with_capacity(s.combo_touched.len());
        s.combo_touched.sort_unstable();
        for &k in &s.combo_touched {
            let c = s.combo[k as usize];
            s.combo[k as usize] = Scalar::ZERO;
            s.combo_mark[k as usize] = false;
            if !c.is_zero() {
                combination.push((k, c));
            }
        }
        s.combo_touched.clear();
        Reduction { residual, combination }
    }

    /// Fully reduces `v` against the basis.
    pub fn reduce(&self, v: &[(u32, Scalar)]) -> Reduction {
        self.reduce_with(v, true, true)
    }

    pub fn reduces_to_zero(&self, v: &[(u32, Scalar)]) -> bool {
        self.reduce_with(v, false, false).residual.is_empty()
    }

    /// Coefficients λ with v = Σ λ_i (inserted vector i), if v is in the span.
    pub fn solve(&self, v: &[(u32, Scalar)]) -> Option<SparseVec> {
        let red = self.reduce_with(v, false, true);
        red.residual.is_empty().then_some(red.combination)
    }

    /// Inserts a vector. Returns `Some(dependency)` (coefficients on inserted vectors, including
    /// this one, summing to zero) when it is already in the span.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let id = self.inserted;
        self.inserted += 1;
        let red = self.reduce_with(&v, false, true);
        let mut combo = red.combination;
        let f = self.field.clone();
        // combo now expresses v − residual; the new row's combination is e_id − combo
        let mut own: SparseVec = vec![(id, Scalar::ONE)];
        axpy(&f, &mut own, f.neg(Scalar::ONE), &combo);
        if red.residual.is_empty() {
            return Some(own);
        }
        let mut row = red.residual;
        row.sort_unstable_by_key(|t| t.0);
        let lead_inv = f.inv_unchecked(row[0].1);
        for t in row.iter_mut() {
            t.1 = f.mul(t.1, lead_inv);
        }
        for t in own.iter_mut() {
            t.1 = f.mul(t.1, lead_inv);
        }
        combo.clear();
        self.pivot_row[row[0].0 as usize] = self.rows.len() as u32;
        self.rows.push(row);
        self.combos.push(own);
        None
    }
}

/// Solver for M·x = b where the columns of M are given once and many right-hand sides follow.
#[derive(Clone, Debug)]
pub struct ColumnSolver {
    echelon: Echelon,
    columns: usize,
}

impl ColumnSolver {
    pub fn new(field: Arc<Field>, rows: usize, columns: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut echelon = Echelon::new(field, rows);
        let mut n = 0;
        for c in columns {
            echelon.insert(c);
            n += 1;
        }
        Self { echelon, columns: n }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn solve(&self, b: &[(u32, Scalar)]) -> Option<SparseVec> {
        self.echelon.solve(b)
    }

    pub fn in_image(&self, b: &[(u32, Scalar)]) -> bool {
        self.echelon.reduces_to_zero(b)
    }
}

/// Where a linear system first fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearOutcome {
    /// A solution vector over the unknowns.
    Solution(Vec<Scalar>),
    /// Coefficients on the equations whose combination reads 0 = nonzero.
    Inconsistent(SparseVec),
}

/// Solves the equations Σ_j a_ij x_j = b_i given as sparse rows.
pub fn solve_rows(field: &Arc<Field>, unknowns: usize, rows: &[(SparseVec, Scalar)]) -> LinearOutcome {
    // augmented column at index `unknowns`, processed last
    let mut ech = Echelon::new(field.clone(), unknowns + 1);
    for (a, b) in rows {
        let mut v = a.clone();
        if !b.is_zero() {
            v.push((unknowns as u32, *b));
        }
        if let Some(_dep) = ech.insert(v) {
            continue;
        }
        let last = ech.rows.last().unwrap();
        if last[0].0 as usize == unknowns {
            return LinearOutcome::Inconsistent(ech.combos.last().unwrap().clone());
        }
    }
    // back substitution with free variables set to zero
    let f = &**field;
    let mut x = vec![Scalar::ZERO; unknowns];
    let mut order: Vec<usize> = (0..ech.rows.len()).collect();
    order.sort_by_key(|&r| Reverse(ech.rows[r][0].0));
    for r in order {
        let row = &ech.rows[r];
        let lead = row[0].0 as usize;
        let mut acc = Scalar::ZERO;
        for &(j, c) in &row[1..] {
            let val = if j as usize == unknowns { f.neg(Scalar::ONE) } else { x[j as usize] };
            acc = f.add(acc, f.mul(c, val));
        }
        x[lead] = f.neg(acc);
    }
    LinearOutcome::Solution(x)
}

/// Dense matrix over F_q, used for small systems and as an independent oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Scalar::ZERO; rows * cols] }
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for &(i, x) in c {
                m.set(i as usize, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    /// Rank by plain Gaussian elimination.
    pub fn rank(&self, field: &Field) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(piv) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else { continue };
            for j in 0..m.cols {
                m.data.swap(rank * m.cols + j, piv * m.cols + j);
            }
            let inv = field.inv_unchecked(m.get(rank, col));
            for r in 0..m.rows {
                if r == rank {
                    continue;
                }
                let c = field.mul(m.get(r, col), inv);
                if c.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = field.sub(m.get(r, j), field.mul(c, m.get(rank, j)));
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self, field: &Field) -> Option<DenseMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = DenseMatrix::zeros(n, n);
        for i in 0..n {
            inv.set(i, i, Scalar::ONE);
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
                inv.data.swap(col * n + j, piv * n + j);
            }
            let c = field.inv_unchecked(a.get(col, col));
            for j in 0..n {
                a.set(col, j, field.mul(a.get(col, j), c));
                inv.set(col, j, field.mul(inv.get(col, j), c));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let c = a.get(r, col);
                if c.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, field.sub(a.get(r, j), field.mul(c, a.get(col, j))));
                    inv.set(r, j, field.sub(inv.get(r, j), field.mul(c, inv.get(col, j))));
                }
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, field: &Field, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Scalar::ZERO, |acc, j| field.add(acc, field.mul(self.get(i, j), v[j]))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[u8]) -> SparseVec {
        v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i as u32, Scalar(c))).collect()
    }

    #[test]
    fn dependency_and_solve() {
        let f = Field::prime(3).unwrap();
        let mut e = Echelon::new(f.clone(), 3);
        assert!(e.insert(sv(&[1, 2, 0])).is_none());
        assert!(e.insert(sv(&[0, 1, 1])).is_none());
        let dep = e.insert(sv(&[1, 0, 1])).unwrap();
        // (1,0,1) = (1,2,0) + (0,1,1) ⇒ v0 + v1 − v2 = 0
        assert_eq!(dep, vec![(0, Scalar(2)), (1, Scalar(2)), (2, Scalar(1))]);
        let x = e.solve(&sv(&[2, 1, 0])).unwrap();
        assert_eq!(x, vec![(0, Scalar(2))]);
        assert!(e.solve(&sv(&[0, 0, 1])).is_none());
    }

    #[test]
    fn inconsistent_rows() {
        let f = Field::prime(2).unwrap();
        let rows = vec![(sv(&[1, 1]), Scalar(1)), (sv(&[1, 0]), Scalar(0)), (sv(&[0, 1]), Scalar(0))];
        match solve_rows(&f, 2, &rows) {
            LinearOutcome::Inconsistent(c) => assert_eq!(c.len(), 3),
            other => panic!("{other:?}"),
        }
        let rows = vec![(sv(&[1, 1]), Scalar(1)), (sv(&[1, 0]), Scalar(1))];
        assert_eq!(solve_rows(&f, 2, &rows), LinearOutcome::Solution(vec![Scalar(1), Scalar(0)]));
    }

    #[test]
    fn dense_rank_matches_sparse() {
        let f = Field::prime(5).unwrap();
        let cols = vec![sv(&[1, 2, 3]), sv(&[2, 4, 1]), sv(&[3, 1, 4])];
        let d = DenseMatrix::from_columns(3, &cols);
        let s = ColumnSolver::new(f.clone(), 3, cols);
        assert_eq!(d.rank(&f), s.rank());
    }
}
