//! Ordinary and matric Massey triple products in the Tate ring, with exact indeterminacy.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graded::{null_homotopy, GradedMap, MapError};
use crate::linalg::Echelon;
use crate::ring::{NamedElement, RingError, TateRing};
use crate::scalars::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MasseyError {
    #[error("Massey product not defined: {0} is nonzero")]
    NotDefined(String),
    #[error("matrix shapes or degrees do not fit: {0}")]
    Shape(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A matrix over the named ring whose entry (ν, μ) has degree `source[μ] − target[ν]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedMatrix {
    pub target: Vec<i64>,
    pub source: Vec<i64>,
    pub entries: Vec<Vec<NamedElement>>,
}

impl GradedMatrix {
    pub fn new(
        ring: &TateRing,
        target: Vec<i64>,
        source: Vec<i64>,
        entries: Vec<Vec<NamedElement>>,
    ) -> Result<GradedMatrix, MasseyError> {
        if entries.len() != target.len() || entries.iter().any(|r| r.len() != source.len()) {
            return Err(MasseyError::Shape(format!("{}×{} entries", target.len(), source.len())));
        }
        let mut entries = entries;
        for (nu, row) in entries.iter_mut().enumerate() {
            for (mu, e) in row.iter_mut().enumerate() {
                let d = source[mu] - target[nu];
                if e.is_zero() {
                    *e = ring.zero(d)?;
                } else if e.degree != d {
                    return Err(MasseyError::Shape(format!("entry ({nu}, {mu}) has degree {} instead of {d}", e.degree)));
                }
            }
        }
        Ok(GradedMatrix { target, source, entries })
    }

    /// Parses entry strings; shifts are inferred so that row 0 sits in degree 0.
    pub fn parse(ring: &TateRing, rows: &[Vec<&str>]) -> Result<GradedMatrix, MasseyError> {
        let parsed: Vec<Vec<NamedElement>> =
            rows.iter().map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
        let (n, m) = (parsed.len(), parsed.first().map_or(0, |r| r.len()));
        let mut source: Vec<Option<i64>> = vec![None; m];
        let mut target: Vec<Option<i64>> = vec![None; n];
        if n > 0 {
            target[0] = Some(0);
        }
        // propagate shifts along nonzero entries until stable
        for _ in 0..n + m {
            for nu in 0..n {
                for mu in 0..m {
                    let e = &parsed[nu][mu];
                    if e.is_zero() {
                        continue;
                    }
                    match (target[nu], source[mu]) {
                        (Some(t), None) => source[mu] = Some(t + e.degree),
                        (None, Some(s)) => target[nu] = Some(s - e.degree),
                        _ => {}
                    }
                }
            }
        }
        let source = source.into_iter().map(|s| s.unwrap_or(0)).collect();
        let target = target.into_iter().map(|t| t.unwrap_or(0)).collect();
        GradedMatrix::new(ring, target, source, parsed)
    }

    pub fn scalar(e: NamedElement) -> GradedMatrix {
        GradedMatrix { target: vec![0], source: vec![e.degree], entries: vec![vec![e]] }
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.source.len()
    }

    /// Shifts every source and target degree by `k`.
    pub fn shifted(&self, k: i64) -> GradedMatrix {
        GradedMatrix {
            target: self.target.iter().map(|t| t + k).collect(),
            source: self.source.iter().map(|s| s + k).collect(),
            entries: self.entries.clone(),
        }
    }

    pub fn multiply(&self, ring: &TateRing, other: &GradedMatrix) -> Result<GradedMatrix, MasseyError> {
        if self.cols() != other.rows() {
            return Err(MasseyError::Shape(format!("{}×{} times {}×{}", self.rows(), self.cols(), other.rows(), other.cols())));
        }
        // re-base the right factor so its targets meet our sources
        let k = if self.cols() > 0 { self.source[0] - other.target[0] } else { 0 };
        let other = other.shifted(k);
        if other.target != self.source {
            return Err(MasseyError::Shape("inner shifts differ".into()));
        }
        let mut entries = Vec::with_capacity(self.rows());
        for nu in 0..self.rows() {
            let mut row = Vec::with_capacity(other.cols());
            for mu in 0..other.cols() {
                let mut acc = ring.zero(other.source[mu] - self.target[nu])?;
                for j in 0..self.cols() {
                    let p = ring.multiply(&self.entries[nu][j], &other.entries[j][mu])?;
                    acc = ring.axpy(&acc, Scalar::ONE, &p);
                }
                row.push(acc);
            }
            entries.push(row);
        }
        Ok(GradedMatrix { target: self.target.clone(), source: other.source, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn render(&self, ring: &TateRing) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(|e| ring.render(e)).collect()).collect()
    }

    fn flatten(&self) -> Vec<Scalar> {
        self.entries.iter().flatten().flat_map(|e| e.coords.iter().copied()).collect()
    }
}

/// A matrix of graded maps, entry (ν, μ) of degree `source[μ] − target[ν]`.
#[derive(Clone)]
pub struct MapMatrix {
    pub target: Vec<i64>,
    pub source: Vec<i64>,
    pub entries: Vec<Vec<GradedMap>>,
}

impl MapMatrix {
    /// Entrywise cycle representatives f1.
    pub fn lift(ring: &TateRing, m: &GradedMatrix) -> Result<MapMatrix, MasseyError> {
        let entries = m.entries.iter().map(|r| r.iter().map(|e| ring.cycle_of(e)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
        Ok(MapMatrix { target: m.target.clone(), source: m.source.clone(), entries })
    }

    fn compose(&self, ring: &TateRing, other: &MapMatrix) -> MapMatrix {
        let res = ring.resolution();
        let k = self.source[0] - other.target[0];
        let mut entries = Vec::new();
        for nu in 0..self.target.len() {
            let mut row = Vec::new();
            for mu in 0..other.source.len() {
                let deg = other.source[mu] + k - self.target[nu];
                let terms: Vec<(Scalar, GradedMap)> =
                    (0..self.source.len()).map(|j| (Scalar::ONE, self.entries[nu][j].compose(&other.entries[j][mu]))).collect();
                row.push(GradedMap::linear_combination(res, deg, &terms));
            }
            entries.push(row);
        }
        MapMatrix { target: self.target.clone(), source: other.source.iter().map(|s| s + k).collect(), entries }
    }

    /// Entrywise null homotopies on a window, with source shifts lowered by one.
    fn null_homotopy(&self, window: (i64, i64)) -> Result<MapMatrix, MasseyError> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|f| null_homotopy(f, window, false)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        Ok(MapMatrix { target: self.target.clone(), source: self.source.iter().map(|s| s - 1).collect(), entries })
    }

    fn is_null_homotopy_of(&self, f: &MapMatrix, window: (i64, i64)) -> Result<bool, MasseyError> {
        for (hr, fr) in self.entries.iter().zip(&f.entries) {
            for (h, g) in hr.iter().zip(fr) {
                if !h.d().equal_on(g, window)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Chain-level choices for a Massey product: T with dT = W̄X̄ and U with dU = X̄Ȳ.
#[derive(Clone)]
pub struct Homotopies {
    pub t: MapMatrix,
    pub u: MapMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct MasseyResult {
    pub representative: GradedMatrix,
    /// A basis of W·Mat(R, P[1]) + Mat(Q, ·[1])·Y, each flattened entrywise.
    pub indeterminacy: Vec<GradedMatrix>,
    pub indeterminacy_dim: usize,
    pub contains_zero: bool,
}

impl MasseyResult {
    /// Whether `m` lies in the coset representative + indeterminacy.
    pub fn contains(&self, ring: &TateRing, m: &GradedMatrix) -> bool {
        let f = ring.field();
        let diff: Vec<Scalar> =
            m.flatten().iter().zip(self.representative.flatten()).map(|(a, b)| f.add(*a, f.neg(b))).collect();
        in_span(ring, &self.indeterminacy, &diff)
    }
}

fn in_span(ring: &TateRing, basis: &[GradedMatrix], v: &[Scalar]) -> bool {
    let mut ech = Echelon::new(ring.field().clone(), v.len());
    for b in basis {
        ech.insert(sparse(&b.flatten()));
    }
    ech.reduces_to_zero(&sparse(v))
}

fn sparse(v: &[Scalar]) -> Vec<(u32, Scalar)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as u32, *c)).collect()
}

/// Massey products over one Tate ring; homotopies are solved on `window`.
pub struct Massey {
    ring: Arc<TateRing>,
    window: (i64, i64),
}

impl Massey {
    pub fn new(ring: Arc<TateRing>, window: (i64, i64)) -> Massey {
        Massey { ring, window }
    }

    pub fn ring(&self) -> &Arc<TateRing> {
        &self.ring
    }

    fn check_defined(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix) -> Result<(), MasseyError> {
        if !w.multiply(&self.ring, x)?.is_zero() {
            return Err(MasseyError::NotDefined("WX".into()));
        }
        if !x.multiply(&self.ring, y)?.is_zero() {
            return Err(MasseyError::NotDefined("XY".into()));
        }
        Ok(())
    }

    /// The homotopies solved from scratch on the window.
    pub fn homotopies(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix) -> Result<Homotopies, MasseyError> {
        self.check_defined(w, x, y)?;
        let (wl, xl, yl) = (MapMatrix::lift(&self.ring, w)?, MapMatrix::lift(&self.ring, x)?, MapMatrix::lift(&self.ring, y)?);
        Ok(Homotopies { t: wl.compose(&self.ring, &xl).null_homotopy(self.window)?, u: xl.compose(&self.ring, &yl).null_homotopy(self.window)? })
    }

    pub fn matric(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix) -> Result<MasseyResult, MasseyError> {
        let h = self.homotopies(w, x, y)?;
        self.matric_with(w, x, y, &h)
    }

    /// The class of T̄Ȳ − W̄[1]Ū for given homotopies, with the sign (−1)^{|W_{νj}|} on each
    /// W̄Ū term; the homotopies are checked first.
    pub fn matric_with(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix, h: &Homotopies) -> Result<MasseyResult, MasseyError> {
        self.check_defined(w, x, y)?;
        let ring = &*self.ring;
        let res = ring.resolution();
        let field = ring.field();
        let (wl, xl, yl) = (MapMatrix::lift(ring, w)?, MapMatrix::lift(ring, x)?, MapMatrix::lift(ring, y)?);
        let (lo, hi) = self.window;
        let check = (lo, hi - 1);
        if !h.t.is_null_homotopy_of(&wl.compose(ring, &xl), check)? || !h.u.is_null_homotopy_of(&xl.compose(ring, &yl), check)? {
            return Err(MasseyError::NotDefined("supplied homotopies".into()));
        }
        let y_base = y.shifted(x.source[0] - y.target[0]);
        let (p, q, s) = (w.rows(), x.rows(), y.cols());
        let mut entries = Vec::with_capacity(p);
        for nu in 0..p {
            let mut row = Vec::with_capacity(s);
            for mu in 0..s {
                let mut terms: Vec<(Scalar, GradedMap)> = Vec::new();
                for k in 0..x.cols() {
                    terms.push((Scalar::ONE, h.t.entries[nu][k].compose(&yl.entries[k][mu])));
                }
                for j in 0..q {
                    let sign = field.neg(field.sign(w.entries[nu][j].degree));
                    terms.push((sign, wl.entries[nu][j].compose(&h.u.entries[j][mu])));
                }
                let deg = y_base.source[mu] + (w.source[0] - x.target[0]) - w.target[nu] - 1;
                row.push(ring.class_of(&GradedMap::linear_combination(res, deg, &terms))?);
            }
            entries.push(row);
        }
        let x_off = w.source[0] - x.target[0];
        let source: Vec<i64> = y_base.source.iter().map(|t| t + x_off - 1).collect();
        let representative = GradedMatrix { target: w.target.clone(), source, entries };
        let indeterminacy = self.indeterminacy(w, x, y, &representative)?;
        let contains_zero = in_span(ring, &indeterminacy, &representative.flatten());
        Ok(MasseyResult { indeterminacy_dim: indeterminacy.len(), representative, indeterminacy, contains_zero })
    }

    /// W·N + M·Y over all degree-compatible N (shape of U) and M (shape of T), reduced to a basis.
    fn indeterminacy(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix, rep: &GradedMatrix) -> Result<Vec<GradedMatrix>, MasseyError> {
        let ring = &*self.ring;
        let mut gens = Vec::new();
        // N : R → P[1] and M : Q → ·[1], one basis monomial in one entry at a time
        let x_off = w.source[0] - x.target[0];
        for j in 0..w.cols() {
            for mu in 0..rep.cols() {
                for b in ring.basis(rep.source[mu] - w.source[j])? {
                    let mut n = self.zero_matrix(&w.source, &rep.source)?;
                    n.entries[j][mu] = ring.monomial(&b)?;
                    gens.push(w.multiply(ring, &n)?);
                }
            }
        }
        let q_shifts: Vec<i64> = x.source.iter().map(|s| s + x_off - 1).collect();
        for nu in 0..w.rows() {
            for k in 0..x.cols() {
                for b in ring.basis(q_shifts[k] - w.target[nu])? {
                    let mut m = self.zero_matrix(&w.target, &q_shifts)?;
                    m.entries[nu][k] = ring.monomial(&b)?;
                    gens.push(m.multiply(ring, y)?);
                }
            }
        }
        // keep an independent subset
        let len = rep.flatten().len();
        let mut ech = Echelon::new(ring.field().clone(), len);
        let mut basis = Vec::new();
        for g in gens {
            if ech.insert(sparse(&g.flatten())).is_none() {
                basis.push(g);
            }
        }
        Ok(basis)
    }

    pub fn triple(&self, a: &NamedElement, b: &NamedElement, c: &NamedElement) -> Result<MasseyResult, MasseyError> {
        let (w, x, y) = self.scalars(a, b, c);
        self.matric(&w, &x, &y)
    }

    pub fn triple_with(&self, a: &NamedElement, b: &NamedElement, c: &NamedElement, t: GradedMap, u: GradedMap) -> Result<MasseyResult, MasseyError> {
        let (w, x, y) = self.scalars(a, b, c);
        let h = Homotopies {
            t: MapMatrix { target: vec![0], source: vec![a.degree + b.degree - 1], entries: vec![vec![t]] },
            u: MapMatrix { target: vec![0], source: vec![b.degree + c.degree - 1], entries: vec![vec![u]] },
        };
        self.matric_with(&w, &x, &y, &h)
    }

    fn scalars(&self, a: &NamedElement, b: &NamedElement, c: &NamedElement) -> (GradedMatrix, GradedMatrix, GradedMatrix) {
        (GradedMatrix::scalar(a.clone()), GradedMatrix::scalar(b.clone()), GradedMatrix::scalar(c.clone()))
    }

    /// Juggling: ⟨W, X, Y⟩Z and −W^±⟨X, Y, Z⟩ agree modulo W·Mat(R, P[1])·Z, where W^± carries
    /// the sign (−1)^{|W_{νj}|} on each entry (over F_2 this is W⟨X, Y, Z⟩ = ⟨W, X, Y⟩Z).
    pub fn juggling_check(&self, w: &GradedMatrix, x: &GradedMatrix, y: &GradedMatrix, z: &GradedMatrix) -> Result<bool, MasseyError> {
        let ring = &*self.ring;
        let f = ring.field();
        if !y.multiply(ring, z)?.is_zero() {
            return Err(MasseyError::NotDefined("YZ".into()));
        }
        let mut w_signed = w.clone();
        for row in w_signed.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = ring.scale(f.neg(f.sign(e.degree)), e);
            }
        }
        let left = w_signed.multiply(ring, &self.matric(x, y, z)?.representative)?;
        let wxy = self.matric(w, x, y)?.representative;
        let right = wxy.multiply(ring, z)?;
        let mut gens = Vec::new();
        for j in 0..w.cols() {
            for mu in 0..wxy.cols() {
                for b in ring.basis(wxy.source[mu] - w.source[j])? {
                    let mut n = self.zero_matrix(&w.source, &wxy.source)?;
                    n.entries[j][mu] = ring.monomial(&b)?;
                    gens.push(w.multiply(ring, &n)?.multiply(ring, z)?);
                }
            }
        }
        let diff: Vec<Scalar> = left.flatten().iter().zip(right.flatten()).map(|(a, b)| f.sub(*a, b)).collect();
        Ok(in_span(ring, &gens, &diff))
    }

    fn zero_matrix(&self, target: &[i64], source: &[i64]) -> Result<GradedMatrix, MasseyError> {
        let entries = target
            .iter()
            .map(|t| source.iter().map(|s| self.ring.zero(s - t)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        Ok(GradedMatrix { target: target.to_vec(), source: source.to_vec(), entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::resolution::Resolution;
    use crate::scalars::Field;

    fn q8(field: &str) -> Arc<TateRing> {
        let alg = Algebra::quaternion(Field::parse(field).unwrap()).unwrap();
        Arc::new(TateRing::new(&Resolution::q8(alg).unwrap()).unwrap())
    }

    fn abelian(p: u32, ms: &[u32]) -> Arc<TateRing> {
        let alg = Algebra::truncated_polynomial(Field::prime(p).unwrap(), ms).unwrap();
        Arc::new(TateRing::new(&Resolution::for_algebra(alg)).unwrap())
    }

    fn triple(ring: &Arc<TateRing>, a: &str, b: &str, c: &str) -> Result<MasseyResult, MasseyError> {
        let (a, b, c) = (ring.parse(a).unwrap(), ring.parse(b).unwrap(), ring.parse(c).unwrap());
        Massey::new(ring.clone(), (-8, 8)).triple(&a, &b, &c)
    }

    #[test]
    fn cyclic_three_triple_product() {
        let ring = abelian(3, &[3]);
        let r = triple(&ring, "x", "x", "x").unwrap();
        assert_eq!(r.indeterminacy_dim, 0);
        assert!(!r.contains_zero);
        let rep = &r.representative.entries[0][0];
        assert_eq!(rep, &ring.parse("y").unwrap());
    }

    #[test]
    fn zero_representative_contains_zero() {
        let ring = q8("2");
        let r = triple(&ring, "x^2*y", "x^2*y", "x^2*y").unwrap();
        assert!(r.representative.is_zero());
        assert!(r.contains_zero);
    }

    #[test]
    fn undefined_products_are_rejected() {
        let ring = q8("2");
        assert!(matches!(triple(&ring, "x", "x", "y"), Err(MasseyError::NotDefined(_))));
    }

    #[test]
    fn one_by_one_matric_matches_triple() {
        let ring = abelian(3, &[3]);
        let m = Massey::new(ring.clone(), (-8, 8));
        let x = GradedMatrix::parse(&ring, &[vec!["x"]]).unwrap();
        let r = m.matric(&x, &x, &x).unwrap();
        let t = triple(&ring, "x", "x", "x").unwrap();
        assert_eq!(r.representative.entries, t.representative.entries);
        assert_eq!(r.indeterminacy_dim, t.indeterminacy_dim);
    }

    #[test]
    fn q8_matric_product_is_essential() {
        let ring = q8("2");
        let m = Massey::new(ring.clone(), (-8, 8));
        let x = GradedMatrix::parse(&ring, &[vec!["y", "x + y"], vec!["x", "y"]]).unwrap();
        let cat = ring.q8().unwrap();
        let pq = cat.p.add(&cat.q);
        let lift = MapMatrix { target: vec![0, 0], source: vec![1, 1], entries: vec![vec![pq, cat.p.clone()], vec![cat.p.clone(), cat.q.clone()]] };
        let h = Homotopies { t: lift.clone(), u: lift };
        let r = m.matric_with(&x, &x, &x, &h).unwrap();
        let b = GradedMatrix::parse(&ring, &[vec!["x^2 + y^2", "0"], vec!["x^2 + y^2", "x^2 + y^2"]]).unwrap();
        assert_eq!(r.representative.entries, b.entries);
        assert!(!r.contains_zero);
        assert!(m.matric(&x, &x, &x).unwrap().contains(&ring, &b));
        let d = GradedMatrix::parse(&ring, &[vec!["x", "y"], vec!["x + y", "x"]]).unwrap();
        let bd = b.multiply(&ring, &d).unwrap();
        let tr = ring.axpy(&bd.entries[0][0], Scalar::ONE, &bd.entries[1][1]);
        assert_eq!(tr, ring.parse("x^2*y").unwrap());
    }

    #[test]
    fn q8_ordinary_products_contain_zero() {
        let ring = q8("2");
        let m = Massey::new(ring.clone(), (-8, 8));
        let set = ["1", "x", "y", "x + y", "x^2", "y^2", "x^2 + y^2", "x^2*y"];
        let els: Vec<NamedElement> = set.iter().map(|s| ring.parse(s).unwrap()).collect();
        let s = ring.parse("s").unwrap();
        let mut defined = 0;
        for a in &els {
            for a in [a.clone(), ring.multiply(a, &s).unwrap()] {
                for b in &els {
                    for c in &els {
                        match m.triple(&a, b, c) {
                            Ok(r) => {
                                defined += 1;
                                assert!(r.contains_zero, "{} {} {}", ring.render(&a), ring.render(b), ring.render(c));
                            }
                            Err(MasseyError::NotDefined(_)) => {}
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
        assert!(defined > 0);
    }

    #[test]
    fn q8_over_f4_has_essential_product() {
        let ring = q8("4");
        let r = triple(&ring, "a*x + y", "a^2*x + y", "a*x + y").unwrap();
        assert!(!r.contains_zero);
    }

    #[test]
    fn two_generator_products_have_no_indeterminacy() {
        for (p, ms) in [(2, &[2, 2][..]), (2, &[4, 2][..]), (3, &[3, 3][..])] {
            let ring = abelian(p, ms);
            let r = triple(&ring, "v2", "phi(0,1)", "v1").unwrap();
            assert_eq!(r.indeterminacy_dim, 0, "{ms:?}");
            let rep = &r.representative.entries[0][0];
            assert!(!rep.is_zero());
            assert_eq!(rep, &ring.parse("u1").unwrap(), "{ms:?}: {}", ring.render(rep));
        }
    }

    #[test]
    fn order_three_factor_gives_essential_product() {
        for ms in [&[3][..], &[3, 9][..], &[3, 3, 3][..]] {
            let ring = abelian(3, ms);
            let (u, v) = if ms.len() == 1 { ("x", "y") } else { ("u1", "v1") };
            let r = triple(&ring, u, u, u).unwrap();
            assert!(!r.contains_zero);
            assert_eq!(r.representative.entries[0][0], ring.parse(v).unwrap(), "{ms:?}");
            assert!(r.contains(&ring, &GradedMatrix::scalar(ring.parse(v).unwrap())));
        }
    }

    #[test]
    fn juggling_holds() {
        let ring = q8("2");
        let m = Massey::new(ring.clone(), (-8, 8));
        let x = GradedMatrix::parse(&ring, &[vec!["y", "x + y"], vec!["x", "y"]]).unwrap();
        assert!(m.juggling_check(&x, &x, &x, &x).unwrap());
        let zero = GradedMatrix::new(&ring, vec![1, 1], vec![2, 2], vec![vec![ring.zero(1).unwrap(); 2]; 2]).unwrap();
        assert!(m.juggling_check(&x, &x, &x, &zero).unwrap());
        let c3 = abelian(3, &[3]);
        let u = GradedMatrix::parse(&c3, &[vec!["x"]]).unwrap();
        assert!(Massey::new(c3.clone(), (-8, 8)).juggling_check(&u, &u, &u, &u).unwrap());
    }
}
