//! Maps of free right L-modules as matrices over L acting by left multiplication.

use crate::algebra::{Algebra, AlgebraElement, IdealSpec};
use crate::scalars::Scalar;

/// A `rows × cols` matrix over L, stored column-sparse. Column β lists the image of the source
/// basis element (β) as coefficients multiplying target basis elements from the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleMap {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(u32, AlgebraElement)>>,
}

impl ModuleMap {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, columns: (0..n).map(|i| vec![(i as u32, AlgebraElement::basis(0))]).collect() }
    }

    /// Builds from (row, col, entry) triples; repeated positions are added.
    pub fn from_entries(
        alg: &Algebra,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, AlgebraElement)>,
    ) -> Self {
        let mut m = Self::zero(rows, cols);
        for (i, j, e) in entries {
            m.add_to(alg, i, j, &e);
        }
        m
    }

    /// Dense row-major construction.
    pub fn from_rows(rows: Vec<Vec<AlgebraElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, e) in row.into_iter().enumerate() {
                if !e.is_zero() {
                    m.columns[j].push((i as u32, e));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(u32, AlgebraElement)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> AlgebraElement {
        self.columns[j]
            .binary_search_by_key(&(i as u32), |t| t.0)
            .map(|k| self.columns[j][k].1.clone())
            .unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, e: AlgebraElement) {
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&(i as u32), |t| t.0) {
            Ok(k) if e.is_zero() => {
                col.remove(k);
            }
            Ok(k) => col[k].1 = e,
            Err(_) if e.is_zero() => {}
            Err(k) => col.insert(k, (i as u32, e)),
        }
    }

    pub fn add_to(&mut self, alg: &Algebra, i: usize, j: usize, e: &AlgebraElement) {
        if e.is_zero() {
            return;
        }
        let cur = self.get(i, j);
        self.set(i, j, alg.add(&cur, e));
    }

    /// Nonzero entries as (row, col, entry).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &AlgebraElement)> {
        self.columns.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(i, e)| (*i as usize, j, e)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// self ∘ other, i.e. the matrix product.
    pub fn compose(&self, alg: &Algebra, other: &ModuleMap) -> ModuleMap {
        assert_eq!(self.cols, other.rows, "composition dimension mismatch");
        let d = alg.dim();
        let mut out = ModuleMap::zero(self.rows, other.cols);
        let mut acc: Vec<Vec<Scalar>> = Vec::new();
        let mut used: Vec<bool> = vec![false; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        for (k, col) in other.columns.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            for (j, b) in col {
                for (i, a) in &self.columns[*j as usize] {
                    let i = *i as usize;
                    if !used[i] {
                        used[i] = true;
                        touched.push(i as u32);
                        if acc.len() <= i {
                            acc.resize(self.rows.max(i + 1), Vec::new());
                        }
                        acc[i].clear();
                        acc[i].resize(d, Scalar::ZERO);
                    }
                    alg.mul_acc(&mut acc[i], Scalar::ONE, a, b);
                }
            }
            touched.sort_unstable();
            let mut newcol = Vec::with_capacity(touched.len());
            for &i in &touched {
                used[i as usize] = false;
                let e = alg.from_dense(&acc[i as usize]);
                if !e.is_zero() {
                    newcol.push((i, e));
                }
            }
            touched.clear();
            out.columns[k] = newcol;
        }
        out
    }

    pub fn add(&self, alg: &Algebra, other: &ModuleMap) -> ModuleMap {
        self.axpy(alg, Scalar::ONE, other)
    }

    pub fn sub(&self, alg: &Algebra, other: &ModuleMap) -> ModuleMap {
        self.axpy(alg, alg.field().neg(Scalar::ONE), other)
    }

    /// self + c·other.
    pub fn axpy(&self, alg: &Algebra, c: Scalar, other: &ModuleMap) -> ModuleMap {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum dimension mismatch");
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = ModuleMap::zero(self.rows, self.cols);
        for j in 0..self.cols {
            let (x, y) = (&self.columns[j], &other.columns[j]);
            let mut merged = Vec::with_capacity(x.len() + y.len());
            let (mut a, mut b) = (0, 0);
            while a < x.len() || b < y.len() {
                if b == y.len() || (a < x.len() && x[a].0 < y[b].0) {
                    merged.push(x[a].clone());
                    a += 1;
                } else if a == x.len() || y[b].0 < x[a].0 {
                    merged.push((y[b].0, alg.scale(c, &y[b].1)));
                    b += 1;
                } else {
                    let e = alg.add(&x[a].1, &alg.scale(c, &y[b].1));
                    if !e.is_zero() {
                        merged.push((x[a].0, e));
                    }
                    a += 1;
                    b += 1;
                }
            }
            out.columns[j] = merged;
        }
        out
    }

    pub fn scale(&self, alg: &Algebra, c: Scalar) -> ModuleMap {
        if c.is_zero() {
            return ModuleMap::zero(self.rows, self.cols);
        }
        let mut out = self.clone();
        for col in out.columns.iter_mut() {
            for (_, e) in col.iter_mut() {
                *e = alg.scale(c, e);
            }
        }
        out
    }

    /// Entrywise left multiplication by an algebra element: entry ↦ a·entry.
    pub fn left_scale(&self, alg: &Algebra, a: &AlgebraElement) -> ModuleMap {
        let mut out = ModuleMap::zero(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            out.columns[j] = col
                .iter()
                .filter_map(|(i, e)| {
                    let v = alg.mul(a, e);
                    (!v.is_zero()).then_some((*i, v))
                })
                .collect();
        }
        out
    }

    pub fn in_ideal(&self, alg: &Algebra, spec: IdealSpec) -> bool {
        self.entries().all(|(_, _, e)| alg.ideal_member(e, spec).unwrap_or(false))
    }

    /// ε applied entrywise, as a dense row-major scalar matrix.
    pub fn augmentation(&self, alg: &Algebra) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::ZERO; self.cols]; self.rows];
        for (i, j, e) in self.entries() {
            out[i][j] = alg.augmentation(e);
        }
        out
    }

    pub fn render(&self, alg: &Algebra) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| alg.render(&self.get(i, j))).collect()).collect()
    }

    /// Applies `f` to every entry.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, &AlgebraElement) -> AlgebraElement) -> ModuleMap {
        let mut out = ModuleMap::zero(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            out.columns[j] = col
                .iter()
                .filter_map(|(i, e)| {
                    let v = f(*i as usize, j, e);
                    (!v.is_zero()).then_some((*i, v))
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;

    #[test]
    fn composition_is_matrix_product_in_order() {
        let q = Algebra::quaternion(Field::prime(2).unwrap()).unwrap();
        let i = AlgebraElement::basis(1);
        let j = AlgebraElement::basis(2);
        let a = ModuleMap::from_rows(vec![vec![i.clone()]]);
        let b = ModuleMap::from_rows(vec![vec![j.clone()]]);
        assert_eq!(a.compose(&q, &b).get(0, 0), AlgebraElement::basis(3));
        assert_eq!(b.compose(&q, &a).get(0, 0), AlgebraElement::basis(7));
    }

    #[test]
    fn sums_cancel() {
        let f = Field::prime(3).unwrap();
        let alg = Algebra::truncated_polynomial(f.clone(), &[3]).unwrap();
        let z = alg.z_pow(0, 1);
        let m = ModuleMap::from_rows(vec![vec![z.clone(), AlgebraElement::zero()]]);
        assert!(m.sub(&alg, &m).is_zero());
        assert_eq!(m.axpy(&alg, Scalar(2), &m), m.scale(&alg, Scalar(0)));
    }
}
