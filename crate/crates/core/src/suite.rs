//! The reproduction suite: nine criteria, each a batch of exact checks with a time budget.

use std::collections::BTreeMap;
use std::error::Error;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Algebra, IdealSpec};
use crate::generators::{abelian_generators, phi, phi_commutator_homotopy, psi, AbelianCatalog};
use crate::graded::{find_homotopy, windowed_homotopy, GradedMap, MapError};
use crate::group::GroupSpec;
use crate::lifting::{classify, null_homotopy_imap, LiftError, SplitKind};
use crate::massey::{GradedMatrix, Homotopies, MapMatrix, Massey, MasseyError};
use crate::module_map::ModuleMap;
use crate::resolution::{compositions, Family, Resolution};
use crate::ring::{NamedElement, NamedMonomial, TateRing};
use crate::scalars::{Field, Scalar};
use crate::secondary::{
    coboundary_obstruction, q8_core, q8_fundamental_domain, Obstruction, Secondary, Q8_NONZERO_ENTRIES,
};
use crate::verdict::{gamma_verdict, VerdictOptions, Witness};

type Failable<T> = Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "[{status}] criterion {}: {} ({} checks, {:.2}s / {:.0}s)",
            self.id, self.name, self.checks, self.elapsed_s, self.budget_s
        );
        if let Some(f) = self.failures.first() {
            s.push_str(&format!(" first failure: {f}"));
        }
        s
    }
}

/// Collects check outcomes for one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn absorb(&mut self, name: &str, r: Failable<()>) {
        if let Err(e) = r {
            self.checks += 1;
            self.failures.push(format!("{name}: {e}"));
        }
    }
}

pub const CRITERIA: [(u32, &str, f64); 9] = [
    (1, "Q8 m-table on the fundamental domain", 10.0),
    (2, "Q8 m-table is not a Hochschild coboundary", 5.0),
    (3, "Q8 matric Massey product over F2", 10.0),
    (4, "Q8 ordinary Massey products over F2 and F4", 30.0),
    (5, "cyclic groups", 30.0),
    (6, "abelian groups of rank at least 3 without Z/3 factors", 180.0),
    (7, "abelian groups of rank 2", 30.0),
    (8, "abelian groups with a Z/3 factor", 30.0),
    (9, "structural suites", 300.0),
];

pub fn run_criterion(id: u32, seed: u64) -> Option<CriterionReport> {
    let &(_, name, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let mut t = Tally::default();
    let r = match id {
        1 => q8_table_criterion(&mut t),
        2 => q8_obstruction_criterion(&mut t),
        3 => q8_matric_criterion(&mut t),
        4 => q8_ordinary_criterion(&mut t),
        5 => cyclic_criterion(&mut t),
        6 => trivial_abelian_criterion(&mut t),
        7 => rank_two_criterion(&mut t),
        8 => order_three_criterion(&mut t),
        _ => structural_criterion(&mut t, seed),
    };
    t.absorb("error", r);
    let elapsed_s = start.elapsed().as_secs_f64();
    if elapsed_s > budget {
        t.failures.push(format!("took {elapsed_s:.1}s, budget {budget:.0}s"));
    }
    Some(CriterionReport {
        id,
        name: name.into(),
        passed: t.failures.is_empty(),
        checks: t.checks,
        failures: t.failures,
        elapsed_s,
        budget_s: budget,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, seed)).collect()
}

fn ring_of(group: &str, field: &str) -> Failable<Arc<TateRing>> {
    Ok(GroupSpec::parse(group)?.ring(&Field::parse(field)?)?)
}

fn single(ring: &TateRing, s: &str) -> Failable<NamedMonomial> {
    let t = ring.terms(&ring.parse(s)?)?;
    match t.as_slice() {
        [(m, c)] if *c == Scalar::ONE => Ok(m.clone()),
        _ => Err(format!("`{s}` is not a single monomial").into()),
    }
}

fn q8_table_criterion(t: &mut Tally) -> Failable<()> {
    let ring = ring_of("Q8", "2")?;
    let sec = Secondary::new(ring.clone(), (-8, 8))?;
    let table = sec.q8_table()?;
    let mut expected = BTreeMap::new();
    for (a, b, c, v) in Q8_NONZERO_ENTRIES {
        expected.insert((single(&ring, a)?, single(&ring, b)?, single(&ring, c)?), ring.parse(v)?);
    }
    let domain = q8_fundamental_domain();
    t.check(table.entries.len() == domain.len(), || format!("{} of {} triples evaluated", table.entries.len(), domain.len()));
    for key in &domain {
        let got = table.entries.get(key).cloned().unwrap_or(ring.zero(key.0.degree() + key.1.degree() + key.2.degree() - 1)?);
        match expected.get(key) {
            Some(v) => t.check(&got == v, || format!("m{key:?} = {}, expected {}", ring.render(&got), ring.render(v))),
            None => t.check(got.is_zero(), || format!("m{key:?} = {}, expected 0", ring.render(&got))),
        }
    }
    Ok(())
}

fn q8_obstruction_criterion(t: &mut Tally) -> Failable<()> {
    let ring = ring_of("Q8", "2")?;
    let table = Secondary::new(ring.clone(), (-8, 8))?.q8_table()?;
    match coboundary_obstruction(&ring, &table, &q8_core())? {
        Obstruction::Inconsistent { certificate, rows } => {
            t.check(!certificate.is_empty(), || "empty certificate".into());
            for (a, b, c) in [("y", "x", "y"), ("x", "y", "y"), ("x", "x", "x"), ("x", "y", "x"), ("y", "y", "x")] {
                let key = (a.to_string(), b.to_string(), c.to_string());
                t.check(rows.iter().any(|r| r.triple == key), || format!("no equation for m({a}, {b}, {c})"));
            }
        }
        Obstruction::Consistent { .. } => t.check(false, || "system is consistent".into()),
    }
    Ok(())
}

/// X = [[y, x+y], [x, y]] with the hand-built lift [[p̄+q̄, p̄], [p̄, q̄]] of X̄X̄ = d(·).
pub fn q8_matric_instance(ring: &TateRing) -> Result<(GradedMatrix, Homotopies), MasseyError> {
    let x = GradedMatrix::parse(ring, &[vec!["y", "x + y"], vec!["x", "y"]])?;
    let cat = ring.q8().ok_or_else(|| MasseyError::Shape("not a Q8 ring".into()))?;
    let lift = MapMatrix {
        target: vec![0, 0],
        source: vec![1, 1],
        entries: vec![vec![cat.p.add(&cat.q), cat.p.clone()], vec![cat.p.clone(), cat.q.clone()]],
    };
    Ok((x, Homotopies { t: lift.clone(), u: lift }))
}

fn q8_matric_criterion(t: &mut Tally) -> Failable<()> {
    let ring = ring_of("Q8", "2")?;
    let m = Massey::new(ring.clone(), (-8, 8));
    let (x, h) = q8_matric_instance(&ring)?;
    let b = GradedMatrix::parse(&ring, &[vec!["x^2 + y^2", "0"], vec!["x^2 + y^2", "x^2 + y^2"]])?;
    let r = m.matric_with(&x, &x, &x, &h)?;
    t.check(r.representative.entries == b.entries, || format!("representative {:?}", r.representative.render(&ring)));
    t.check(!r.contains_zero, || "contains zero with the hand-built lift".into());
    let solved = m.matric(&x, &x, &x)?;
    t.check(solved.contains(&ring, &b), || "B is not in the product with solved homotopies".into());
    t.check(!solved.contains_zero, || "contains zero with solved homotopies".into());
    let d = GradedMatrix::parse(&ring, &[vec!["x", "y"], vec!["x + y", "x"]])?;
    let bd = b.multiply(&ring, &d)?;
    let tr = ring.axpy(&bd.entries[0][0], Scalar::ONE, &bd.entries[1][1]);
    t.check(tr == ring.parse("x^2*y")?, || format!("tr(BD) = {}", ring.render(&tr)));
    Ok(())
}

fn q8_ordinary_criterion(t: &mut Tally) -> Failable<()> {
    let ring = ring_of("Q8", "2")?;
    let m = Massey::new(ring.clone(), (-8, 8));
    let set = ["1", "x", "y", "x + y", "x^2", "y^2", "x^2 + y^2", "x^2*y"];
    let els: Vec<NamedElement> = set.iter().map(|s| ring.parse(s)).collect::<Result<_, _>>()?;
    let s = ring.parse("s")?;
    let mut defined = 0;
    for a0 in &els {
        for a in [a0.clone(), ring.multiply(a0, &s)?] {
            for b in &els {
                for c in &els {
                    match m.triple(&a, b, c) {
                        Ok(r) => {
                            defined += 1;
                            t.check(r.contains_zero, || format!("0 ∉ <{}, {}, {}>", ring.render(&a), ring.render(b), ring.render(c)));
                        }
                        Err(MasseyError::NotDefined(_)) => {}
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
    }
    t.check(defined > 0, || "no defined triple".into());
    let f4 = ring_of("Q8", "4")?;
    let p = |s: &str| f4.parse(s);
    match Massey::new(f4.clone(), (-8, 8)).triple(&p("a*x + y")?, &p("a^2*x + y")?, &p("a*x + y")?) {
        Ok(r) => t.check(!r.contains_zero, || "F4 product contains zero".into()),
        Err(e) => t.check(false, || format!("F4 product: {e}")),
    }
    Ok(())
}

fn cyclic_criterion(t: &mut Tally) -> Failable<()> {
    let opts = VerdictOptions { window: (-8, 8), bound: 6 };
    for (g, p) in [("C2", 2), ("C4", 2), ("C8", 2), ("C9", 3), ("C27", 3), ("C5", 5), ("C3", 3)] {
        let group = GroupSpec::parse(g)?;
        let v = gamma_verdict(&group, Some(Field::prime(p)?), &opts)?;
        t.check(v.certified(), || format!("{g}: uncertified witness {:?}", v.witness));
        t.check(v.trivial == (g != "C3"), || format!("{g}: verdict {}", if v.trivial { "trivial" } else { "nontrivial" }));
        if let Witness::Massey { representative, indeterminacy_dim, .. } = &v.witness {
            t.check(representative == "y" && *indeterminacy_dim == 0, || format!("{g}: <x, x, x> = {representative} + {indeterminacy_dim} dims"));
        }
    }
    // f2 vanishes identically for C2
    let ring = ring_of("C2", "2")?;
    let sec = Secondary::new(ring.clone(), (-8, 8))?;
    let monos: Vec<NamedMonomial> = (-8..=8).flat_map(|d| ring.basis(d).unwrap_or_default()).collect();
    for b in &monos {
        for c in &monos {
            t.check(sec.f2(b, c)?.is_zero_on((-8, 8))?, || format!("C2: f2({b}, {c}) ≠ 0"));
        }
    }
    Ok(())
}

fn trivial_abelian_criterion(t: &mut Tally) -> Failable<()> {
    let opts = VerdictOptions { window: (-8, 8), bound: 6 };
    for (g, p) in [("C2xC2xC2", 2), ("C2xC2xC2xC2", 2), ("C4xC4xC4", 2), ("C2xC4xC4", 2), ("C5xC5xC5", 5)] {
        let v = gamma_verdict(&GroupSpec::parse(g)?, Some(Field::prime(p)?), &opts)?;
        t.check(v.trivial && v.certified(), || format!("{g}: {:?}", v.witness));
        t.check(matches!(v.witness, Witness::Trivial { ideal_maps: Some(true), .. }), || format!("{g}: f2 not certified I-map"));
    }
    Ok(())
}

fn rank_two_criterion(t: &mut Tally) -> Failable<()> {
    for (g, p) in [("C2xC2", "2"), ("C4xC2", "2"), ("C3xC3", "3")] {
        let ring = ring_of(g, p)?;
        let q = |s: &str| ring.parse(s);
        let r = Massey::new(ring.clone(), (-8, 8)).triple(&q("v2")?, &q("phi(0,1)")?, &q("v1")?)?;
        let rep = &r.representative.entries[0][0];
        t.check(rep == &q("u1")?, || format!("{g}: representative {}", ring.render(rep)));
        t.check(r.indeterminacy_dim == 0, || format!("{g}: indeterminacy of dimension {}", r.indeterminacy_dim));
    }
    Ok(())
}

fn order_three_criterion(t: &mut Tally) -> Failable<()> {
    for (g, u, v) in [("C3", "x", "y"), ("C3xC9", "u1", "v1"), ("C3xC3xC3", "u1", "v1")] {
        let ring = ring_of(g, "3")?;
        let u = ring.parse(u)?;
        let r = Massey::new(ring.clone(), (-8, 8)).triple(&u, &u, &u)?;
        t.check(r.contains(&ring, &GradedMatrix::scalar(ring.parse(v)?)), || format!("{g}: {v} not in <u, u, u>"));
        t.check(!r.contains_zero, || format!("{g}: 0 ∈ <u, u, u>"));
    }
    Ok(())
}

fn structural_criterion(t: &mut Tally, seed: u64) -> Failable<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = resolution_suite(t);
    t.absorb("resolutions", r);
    let r = ring_relation_suite(t);
    t.absorb("ring relations", r);
    let r = class_map_suite(t, &mut rng);
    t.absorb("class map", r);
    let r = phi_psi_suite(t, &mut rng);
    t.absorb("Phi/Psi", r);
    let r = lifting_suite(t, &mut rng);
    t.absorb("lifting", r);
    Ok(())
}

const SAMPLE_GROUPS: [(&str, &str); 18] = [
    ("Q8", "2"),
    ("C2", "2"),
    ("C3", "3"),
    ("C4", "2"),
    ("C5", "5"),
    ("C8", "2"),
    ("C9", "3"),
    ("C27", "3"),
    ("C2xC2", "2"),
    ("C4xC2", "2"),
    ("C3xC3", "3"),
    ("C3xC9", "3"),
    ("C2xC2xC2", "2"),
    ("C2xC2xC2xC2", "2"),
    ("C4xC4xC4", "2"),
    ("C2xC4xC4", "2"),
    ("C5xC5xC5", "5"),
    ("C3xC3xC3", "3"),
];

fn binomial(n: i64, k: i64) -> usize {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i + 1) as usize)
}

fn resolution_suite(t: &mut Tally) -> Failable<()> {
    let w = (-6, 6);
    for (g, f) in SAMPLE_GROUPS {
        let res = GroupSpec::parse(g)?.resolution(&Field::parse(f)?)?;
        for report in [res.verify_exact(w), res.verify_minimal(w)] {
            t.check(report.passed, || format!("{g} {}: {:?}", report.name, report.failures));
        }
        for n in w.0..=w.1 {
            let expected = match res.family() {
                Family::Q8 => [1, 2, 2, 1][n.rem_euclid(4) as usize],
                Family::Cyclic { .. } => 1,
                Family::AbelianProduct { exponents } => {
                    let r = exponents.len() as i64;
                    if n >= 0 {
                        binomial(n + r - 1, r - 1)
                    } else {
                        binomial(-n - 1 + r - 1, r - 1)
                    }
                }
            };
            t.check(res.rank(n) == expected, || format!("{g}: rank {n} = {}, expected {expected}", res.rank(n)));
        }
    }
    Ok(())
}

fn ring_relation_suite(t: &mut Tally) -> Failable<()> {
    let r = ring_of("Q8", "2")?;
    let p = |s: &str| r.parse(s);
    t.check(p("x^2 + y^2")? == p("x*y")?, || "x² + y² ≠ xy".into());
    t.check(p("y*x")? == p("x*y")?, || "yx ≠ xy".into());
    t.check(p("x^3")?.is_zero() && p("y^3")?.is_zero(), || "x³ or y³ ≠ 0".into());
    t.check(p("x^2*y")? == p("x*y^2")?, || "x²y ≠ xy²".into());
    t.check(p("s*s^-1")? == r.one(), || "s s⁻¹ ≠ 1".into());
    // associativity and centrality of s on the computed table
    let monos: Vec<NamedMonomial> = (-6..=6).flat_map(|d| r.basis(d).unwrap_or_default()).collect();
    let s = single(&r, "s")?;
    for a in &monos {
        let sa = r.multiply_monomials(&s, a)?;
        let as_ = r.multiply_monomials(a, &s)?;
        t.check(sa == as_, || format!("s·{a} ≠ {a}·s"));
        for b in monos.iter().filter(|b| (a.degree() + b.degree()).abs() <= 6) {
            let ab = r.multiply_monomials(a, b)?;
            let ba = r.multiply_monomials(b, a)?;
            t.check(ab == ba, || format!("{a}·{b} ≠ {b}·{a}"));
        }
    }
    for a in monos.iter().filter(|m| m.degree().abs() <= 3) {
        for b in monos.iter().filter(|m| m.degree().abs() <= 3) {
            for c in monos.iter().filter(|m| m.degree().abs() <= 3) {
                let ab = r.multiply_monomials(a, b)?;
                let bc = r.multiply_monomials(b, c)?;
                let l = r.multiply(&ab, &r.monomial(c)?)?;
                let rr = r.multiply(&r.monomial(a)?, &bc)?;
                t.check(l == rr, || format!("({a}{b}){c} ≠ {a}({b}{c})"));
            }
        }
    }
    for (g, f) in [("C2xC2xC2", "2"), ("C4xC2xC8", "2"), ("C3xC9", "3"), ("C5xC5xC5", "5")] {
        abelian_relations(t, g, &*ring_of(g, f)?, 5)?;
    }
    Ok(())
}

/// The u_i, v_i, φ_α relation set on all φ_α with |α| ≤ bound.
fn abelian_relations(t: &mut Tally, g: &str, r: &TateRing, bound: i64) -> Failable<()> {
    let ms = r.resolution().algebra().truncation().to_vec();
    let n = ms.len();
    let f = r.field().clone();
    let gen = |k: &str, i: usize| r.parse(&format!("{k}{}", i + 1));
    let phi_el = |alpha: &[i64]| r.monomial(&NamedMonomial::Phi { alpha: alpha.to_vec() });
    for i in 0..n {
        let u2 = r.multiply(&gen("u", i)?, &gen("u", i)?)?;
        let expect = if ms[i] == 2 { gen("v", i)? } else { r.zero(2)? };
        t.check(u2 == expect, || format!("{g}: u{}² = {}", i + 1, r.render(&u2)));
        for j in 0..n {
            let uv = r.multiply(&gen("u", i)?, &gen("v", j)?)?;
            t.check(uv == r.multiply(&gen("v", j)?, &gen("u", i)?)?, || format!("{g}: u{} v{} not central", i + 1, j + 1));
            if i != j {
                let a = r.multiply(&gen("u", i)?, &gen("u", j)?)?;
                let b = r.multiply(&gen("u", j)?, &gen("u", i)?)?;
                t.check(a == r.scale(f.neg(Scalar::ONE), &b), || format!("{g}: u{} u{} not anticommuting", i + 1, j + 1));
            }
        }
    }
    for tot in 0..=bound {
        for alpha in compositions(tot, n) {
            let pa = phi_el(&alpha)?;
            for i in 0..n {
                let mut lower = alpha.clone();
                lower[i] -= 1;
                let hits = alpha[i] % 2 == 1 || (alpha[i] > 0 && ms[i] == 2);
                let right = r.multiply(&pa, &gen("u", i)?)?;
                let left = r.multiply(&gen("u", i)?, &pa)?;
                if hits {
                    let tail: i64 = alpha[i..].iter().sum::<i64>() + i as i64 + 1;
                    let head: i64 = alpha[..i].iter().sum::<i64>() + i as i64;
                    let low = phi_el(&lower)?;
                    t.check(right == r.scale(f.sign(tail), &low), || format!("{g}: φ{alpha:?}·u{}", i + 1));
                    t.check(left == r.scale(f.sign(head), &low), || format!("{g}: u{}·φ{alpha:?}", i + 1));
                } else {
                    t.check(right.is_zero() && left.is_zero(), || format!("{g}: φ{alpha:?}·u{} ≠ 0", i + 1));
                }
                let right = r.multiply(&pa, &gen("v", i)?)?;
                let left = r.multiply(&gen("v", i)?, &pa)?;
                if alpha[i] >= 2 {
                    let mut l2 = alpha.clone();
                    l2[i] -= 2;
                    let low = phi_el(&l2)?;
                    t.check(right == low && left == low, || format!("{g}: φ{alpha:?}·v{}", i + 1));
                } else {
                    t.check(right.is_zero() && left.is_zero(), || format!("{g}: φ{alpha:?}·v{} ≠ 0", i + 1));
                }
            }
            if tot + 1 <= bound {
                for beta in compositions(1.min(bound - tot), n) {
                    t.check(r.multiply(&pa, &phi_el(&beta)?)?.is_zero(), || format!("{g}: φ{alpha:?}φ{beta:?} ≠ 0"));
                }
            }
        }
    }
    Ok(())
}

fn random_element(alg: &Algebra, rng: &mut ChaCha8Rng) -> crate::algebra::AlgebraElement {
    let q = alg.field().order() as u8;
    let dense: Vec<Scalar> = (0..alg.dim()).map(|_| Scalar(rng.gen_range(0..q))).collect();
    alg.from_dense(&dense)
}

fn random_module_map(res: &Resolution, source: i64, target: i64, rng: &mut ChaCha8Rng) -> ModuleMap {
    let mut m = ModuleMap::zero(res.rank(target), res.rank(source));
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            m.set(i, j, random_element(res.algebra(), rng));
        }
    }
    m
}

/// A random graded map with components on the window and zero outside.
fn random_map(res: &Arc<Resolution>, degree: i64, window: (i64, i64), rng: &mut ChaCha8Rng) -> GradedMap {
    let comps = (window.0..=window.1).map(|j| random_module_map(res, j + degree, j, rng)).collect();
    GradedMap::table(res, degree, window.0, comps, true)
}

/// A random 2-periodic map on a cyclic resolution.
fn random_periodic(res: &Arc<Resolution>, degree: i64, rng: &mut ChaCha8Rng) -> GradedMap {
    let comps = (0..2).map(|j| random_module_map(res, j + degree, j, rng)).collect();
    GradedMap::periodic(res, degree, comps)
}

fn class_map_suite(t: &mut Tally, rng: &mut ChaCha8Rng) -> Failable<()> {
    for (g, f) in [("Q8", "2"), ("C2xC2xC2", "2"), ("C3xC9", "3")] {
        let ring = ring_of(g, f)?;
        let res = ring.resolution().clone();
        let fld = ring.field().clone();
        let wide = (-12, 12);
        for b in (-4..=4).flat_map(|d| ring.basis(d).unwrap_or_default()) {
            let c = ring.class_of(&ring.cycle(&b))?;
            t.check(c == ring.monomial(&b)?, || format!("{g}: class of f1({b})"));
        }
        for _ in 0..6 {
            let n = rng.gen_range(-3..=3);
            let m = rng.gen_range(-3..=3);
            let (f1, f2) = (random_map(&res, n, wide, rng), random_map(&res, n, wide, rng));
            let a = Scalar(rng.gen_range(0..fld.order() as u8));
            let comb = f1.axpy(a, &f2);
            let lhs = ring.class_of(&comb)?;
            let rhs = ring.axpy(&ring.class_of(&f1)?, a, &ring.class_of(&f2)?);
            t.check(lhs == rhs, || format!("{g}: class map not linear"));
            // changing f_0 by a map into I·P̂_0 keeps the class, and the class of every f'g
            let g_map = random_map(&res, m, wide, rng);
            let alg = res.algebra().clone();
            let shift = random_module_map(&res, n, 0, rng).map_entries(|_, _, e| {
                let mut e = e.clone();
                let eps = alg.augmentation(&e);
                e = alg.sub(&e, &alg.scale(eps, &alg.one()));
                e
            });
            let mut comps = Vec::new();
            for j in wide.0..=wide.1 {
                let base = f1.component(j)?.as_ref().clone();
                comps.push(if j == 0 { base.add(&alg, &shift) } else { base });
            }
            let f1b = GradedMap::table(&res, n, wide.0, comps, true);
            t.check(ring.class_of(&f1b)? == ring.class_of(&f1)?, || format!("{g}: class changed"));
            let l = ring.class_of(&f1.compose(&g_map))?;
            let r = ring.class_of(&f1b.compose(&g_map))?;
            t.check(l == r, || format!("{g}: class of composites differs"));
            // multiplicativity against a cocycle on the right
            let basis = ring.basis(m)?;
            if !basis.is_empty() {
                let b = &basis[rng.gen_range(0..basis.len())];
                let l = ring.class_of(&f1.compose(&ring.cycle(b)))?;
                let r = ring.multiply(&ring.class_of(&f1)?, &ring.monomial(b)?)?;
                t.check(l == r, || format!("{g}: class of f·f1({b}) is not a product"));
            }
        }
    }
    q8_left_identities(t)
}

fn q8_left_identities(t: &mut Tally) -> Failable<()> {
    let ring = ring_of("Q8", "2")?;
    let cat = ring.q8().ok_or("no Q8 catalog")?;
    let res = ring.resolution();
    let mut words: Vec<Vec<GradedMap>> = vec![Vec::new()];
    let mut frontier = words.clone();
    for _ in 0..4 {
        frontier = frontier.iter().flat_map(|w| [&cat.x, &cat.y].map(|g| [w.clone(), vec![g.clone()]].concat())).collect();
        words.extend(frontier.iter().cloned());
    }
    let words: Vec<GradedMap> = words.iter().map(|w| GradedMap::product(res, w)).collect();
    let c = |f: &GradedMap| ring.class_of(f);
    for a in &words {
        let ca = c(a)?;
        let times = |m: &str| ring.multiply(&ring.parse(m)?, &ca);
        t.check(c(&cat.p.compose(a))?.is_zero() && c(&cat.q.compose(a))?.is_zero(), || "C(p̄α) or C(q̄α) ≠ 0".into());
        t.check(c(&cat.x.compose(&cat.p).compose(a))? == times("x^2")?, || "C(x̄p̄α) ≠ x²C(α)".into());
        t.check(c(&cat.y.compose(&cat.p).compose(a))? == times("y^2")?, || "C(ȳp̄α) ≠ y²C(α)".into());
        t.check(c(&cat.y.compose(&cat.q).compose(a))? == times("y^2")?, || "C(ȳq̄α) ≠ y²C(α)".into());
        t.check(c(&cat.x.compose(&cat.q).compose(a))?.is_zero(), || "C(x̄q̄α) ≠ 0".into());
        for b in &words {
            t.check(c(&b.compose(&cat.r).compose(a))?.is_zero(), || "C(βr̄α) ≠ 0".into());
            if b.degree() >= 2 {
                t.check(c(&b.compose(&cat.p).compose(a))?.is_zero() && c(&b.compose(&cat.q).compose(a))?.is_zero(), || "C(βp̄α) or C(βq̄α) ≠ 0".into());
            }
        }
    }
    Ok(())
}

/// A random cocycle of positive degree on factor j: a scaled generator word plus a coboundary.
fn random_factor_cocycle(cat: &AbelianCatalog, j: usize, degree: i64, rng: &mut ChaCha8Rng) -> GradedMap {
    let c = &cat.factors[j];
    let res = &c.res;
    let fld = res.field();
    let mut word = GradedMap::identity(res);
    if degree % 2 == 1 {
        word = c.x.clone();
    }
    for _ in 0..degree / 2 {
        word = word.compose(&c.y);
    }
    let a = Scalar(rng.gen_range(1..fld.order() as u8));
    word.scale(a).add(&random_periodic(res, degree - 1, rng).d())
}

fn phi_psi_suite(t: &mut Tally, rng: &mut ChaCha8Rng) -> Failable<()> {
    let w = (-5, 5);
    for (g, f) in [("C2xC2xC2", "2"), ("C4xC2xC4", "2"), ("C3xC9", "3"), ("C5xC5xC5", "5")] {
        let res = GroupSpec::parse(g)?.resolution(&Field::parse(f)?)?;
        let cat = abelian_generators(&res)?;
        let fld = res.field().clone();
        let r = res.factor_count();
        let fac = |j: usize| res.factors()[j].clone();
        let jr1 = IdealSpec::JPower(r as u32 - 1);
        for _ in 0..3 {
            let j = rng.gen_range(0..r);
            let (n, m) = (rng.gen_range(0..=3), rng.gen_range(1..=3));
            let fm = random_periodic(&fac(j), n, rng);
            t.check(phi(&res, &fm.d(), j)?.equal_on(&phi(&res, &fm, j)?.d(), w)?, || format!("{g}: Φ(df) ≠ dΦ(f)"));
            let (a, b) = (random_periodic(&fac(j), n.max(1), rng), random_periodic(&fac(j), m, rng));
            let lhs = phi(&res, &a.compose(&b), j)?;
            let rhs = phi(&res, &a, j)?.compose(&phi(&res, &b, j)?);
            t.check(lhs.equal_on(&rhs, w)?, || format!("{g}: Φ(fg) ≠ Φ(f)Φ(g)"));
            let l = (j + 1 + rng.gen_range(0..r - 1)) % r;
            let (cf, cg) = (random_factor_cocycle(&cat, j, n.max(1), rng), random_factor_cocycle(&cat, l, m, rng));
            let h = phi_commutator_homotopy(&res, &cf, j, &cg, l)?;
            let (pf, pg) = (phi(&res, &cf, j)?, phi(&res, &cg, l)?);
            let sign = fld.sign(cf.degree() * cg.degree());
            let comm = pf.compose(&pg).axpy(fld.neg(sign), &pg.compose(&pf));
            t.check(h.d().equal_on(&comm, w)?, || format!("{g}: commutator homotopy for factors {j}, {l}"));
            // Ψ on negative-degree factor maps
            let fs: Vec<GradedMap> = (0..r).map(|i| random_periodic(&fac(i), -rng.gen_range(1..=2), rng)).collect();
            let gs: Vec<GradedMap> = (0..r).map(|i| random_periodic(&fac(i), -rng.gen_range(1..=2), rng)).collect();
            let p = psi(&res, &fs)?;
            let mut rhs = GradedMap::zero(&res, p.degree() + 1);
            let mut prefix = 0;
            for i in 0..r {
                let mut v = fs.clone();
                v[i] = fs[i].d();
                rhs = rhs.axpy(fld.sign(prefix), &psi(&res, &v)?);
                prefix += fs[i].degree();
            }
            t.check(p.d().equal_on(&rhs, w)?, || format!("{g}: dΨ ≠ ΣΨ(…df_i…)"));
            t.check(p.compose(&psi(&res, &gs)?).is_ideal_map(jr1, w)?, || format!("{g}: ΨΨ not a J_(r-1)-map"));
            let gm = random_periodic(&fac(j), m, rng);
            let n_pre: i64 = fs[..j].iter().map(|f| f.degree()).sum();
            let pg = phi(&res, &gm, j)?;
            let left = pg.compose(&p);
            let gf = gm.compose(&fs[j]);
            let left_ok = if gf.degree() < 0 {
                let mut v = fs.clone();
                v[j] = gf;
                left.axpy(fld.neg(fld.sign(m * n_pre)), &psi(&res, &v)?).is_ideal_map(jr1, w)?
            } else {
                left.is_ideal_map(jr1, w)?
            };
            t.check(left_ok, || format!("{g}: Φ(g)Ψ rule"));
            let right = p.compose(&pg);
            let fg = fs[j].compose(&gm);
            let right_ok = if fg.degree() < 0 {
                let mut v = fs.clone();
                v[j] = fg;
                right.axpy(fld.neg(fld.sign(m * (p.degree() + n_pre))), &psi(&res, &v)?).is_ideal_map(jr1, w)?
            } else {
                right.is_ideal_map(jr1, w)?
            };
            t.check(right_ok, || format!("{g}: ΨΦ(g) rule"));
        }
    }
    Ok(())
}

fn lifting_suite(t: &mut Tally, rng: &mut ChaCha8Rng) -> Failable<()> {
    // differentials respect the C ⊕ D and A ⊕ B splittings
    for (g, f) in [("C2xC2xC2", "2"), ("C4xC2", "2"), ("C3xC9", "3"), ("C5xC5", "5")] {
        let res = GroupSpec::parse(g)?.resolution(&Field::parse(f)?)?;
        let alg = res.algebra().clone();
        for n in -3..=0 {
            for k in -4..4 {
                let h = random_module_map(&res, n + k - 1, k, rng);
                let parts = classify(&res, &h, n + k - 1, k, SplitKind::CD);
                let d = res.differential(n + k);
                let (c_img, d_img) = (parts.complement.compose(&alg, &d), parts.spanned.compose(&alg, &d));
                if k == -n {
                    t.check(c_img.is_zero(), || format!("{g}: C∘∂ ≠ 0 at n={n}"));
                } else {
                    t.check(classify(&res, &c_img, n + k, k, SplitKind::AB).in_complement(), || format!("{g}: C∘∂ leaves B, n={n} k={k}"));
                    t.check(classify(&res, &d_img, n + k, k, SplitKind::AB).in_span(), || format!("{g}: D∘∂ leaves A, n={n} k={k}"));
                }
                let h = random_module_map(&res, n + k, k + 1, rng);
                let parts = classify(&res, &h, n + k, k + 1, SplitKind::CD);
                let d = res.differential(k + 1);
                let (c_img, d_img) = (d.compose(&alg, &parts.complement), d.compose(&alg, &parts.spanned));
                if k == -1 {
                    t.check(c_img.is_zero(), || format!("{g}: ∂∘C ≠ 0"));
                } else {
                    t.check(classify(&res, &c_img, n + k, k, SplitKind::AB).in_complement(), || format!("{g}: ∂∘C leaves B, n={n} k={k}"));
                    t.check(classify(&res, &d_img, n + k, k, SplitKind::AB).in_span(), || format!("{g}: ∂∘D leaves A, n={n} k={k}"));
                }
            }
        }
    }
    // I-map null homotopies of random combinations of φ products
    for (g, f) in [("C2xC2xC2", "2"), ("C4xC4xC4", "2"), ("C5xC5xC5", "5")] {
        let res = GroupSpec::parse(g)?.resolution(&Field::parse(f)?)?;
        let cat = abelian_generators(&res)?;
        let fld = res.field().clone();
        let w = if f == "5" { (-5, 5) } else { (-8, 8) };
        for (a, b) in [(0, 0), (0, 1), (1, 1)] {
            let mut sum = GradedMap::zero(&res, -a - b - 2);
            for alpha in compositions(a, 3) {
                for beta in compositions(b, 3) {
                    let c = Scalar(rng.gen_range(0..fld.order() as u8));
                    sum = sum.axpy(c, &cat.phi_alpha(&alpha).compose(&cat.phi_alpha(&beta)));
                }
            }
            let out = null_homotopy_imap(&sum, w)?;
            t.check(out.h.is_ideal_map(IdealSpec::AugmentationPower(1), w)?, || format!("{g}: homotopy not an I-map"));
            t.check(out.h.d().equal_on(&sum, (w.0, w.1 - 1))?, || format!("{g}: dh ≠ f"));
        }
    }
    // positive degree: refused, and no I-map homotopy exists for the norm cocycle
    for (g, f) in [("C2xC2", "2"), ("C4xC2", "2"), ("C3xC3", "3")] {
        let res = GroupSpec::parse(g)?.resolution(&Field::parse(f)?)?;
        let alg = res.algebra().clone();
        let comps = (-4..=4)
            .map(|j| {
                let mut m = ModuleMap::zero(res.rank(j), res.rank(j + 1));
                if j == -1 {
                    m.set(0, 0, alg.norm());
                }
                m
            })
            .collect();
        let norm = GradedMap::table(&res, 1, -4, comps, true);
        t.check(norm.is_cocycle((-4, 4))?, || format!("{g}: norm map is not a cocycle"));
        t.check(matches!(null_homotopy_imap(&norm, (-3, 3)), Err(LiftError::PositiveDegree(1))), || format!("{g}: positive degree accepted"));
        t.check(windowed_homotopy(&norm, (-3, 3), false)?.is_some(), || format!("{g}: norm map has no homotopy"));
        t.check(windowed_homotopy(&norm, (-3, 3), true)?.is_none(), || format!("{g}: norm map has an I-map homotopy"));
    }
    // Q8: x̄² + x̄ȳ + ȳ² and x̄³ have 8-periodic but no 4-periodic null homotopies
    let ring = ring_of("Q8", "2")?;
    let cat = ring.q8().ok_or("no Q8 catalog")?;
    let (x, y) = (&cat.x, &cat.y);
    for (name, target) in [("x² + xy + y²", x.compose(x).add(&x.compose(y)).add(&y.compose(y))), ("x³", x.compose(x).compose(x))] {
        t.check(matches!(find_homotopy(&target, &[4]), Err(MapError::Infeasible)), || format!("{name}: 4-periodic homotopy found"));
        match find_homotopy(&target, &[8]) {
            Ok(h) => t.check(h.d().equal_on(&target, (-8, 8))?, || format!("{name}: 8-periodic homotopy wrong")),
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    Ok(())
}
