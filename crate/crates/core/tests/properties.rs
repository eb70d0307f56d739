use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use proptest::prelude::*;
use proptest::sample::Index;

use tate::group::GroupSpec;
use tate::massey::{GradedMatrix, Massey};
use tate::ring::{NamedElement, NamedMonomial, TateRing};
use tate::scalars::Scalar;
use tate::secondary::Secondary;

const WINDOW: (i64, i64) = (-8, 8);
const GROUPS: [&str; 6] = ["C3", "C4", "C9", "C2xC2", "C2xC2xC2", "Q8"];

struct Fixture {
    ring: Arc<TateRing>,
    /// None where m is not defined by the construction (rank 2, or a factor of order 3).
    sec: Option<Secondary>,
    massey: Massey,
    monomials: Vec<NamedMonomial>,
    /// Triples (a, b, c) with ab = bc = 0.
    defined: Vec<(NamedMonomial, NamedMonomial, NamedMonomial)>,
}

fn fixture(group: &str) -> &'static Fixture {
    static CACHE: OnceLock<Mutex<HashMap<String, &'static Fixture>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache.entry(group.to_string()).or_insert_with(|| {
        let spec = GroupSpec::parse(group).unwrap();
        let ring = spec.ring(&spec.default_field().unwrap()).unwrap();
        let mut monomials = Vec::new();
        for d in -3..=3 {
            monomials.extend(ring.basis(d).unwrap());
        }
        let zero = |a: &NamedMonomial, b: &NamedMonomial| ring.multiply_monomials(a, b).unwrap().is_zero();
        let mut defined = Vec::new();
        for a in &monomials {
            for b in &monomials {
                if !zero(a, b) {
                    continue;
                }
                for c in &monomials {
                    if zero(b, c) {
                        defined.push((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        Box::leak(Box::new(Fixture {
            sec: Secondary::new(ring.clone(), WINDOW).ok(),
            massey: Massey::new(ring.clone(), WINDOW),
            ring,
            monomials,
            defined,
        }))
    })
}

fn element(ring: &TateRing, m: &NamedMonomial) -> NamedElement {
    ring.monomial(m).unwrap()
}

fn group() -> impl Strategy<Value = &'static str> {
    prop::sample::select(GROUPS.to_vec())
}

fn defined_triple() -> impl Strategy<Value = (&'static str, (NamedMonomial, NamedMonomial, NamedMonomial))> {
    (group(), any::<Index>()).prop_filter_map("no defined triples", |(g, i)| {
        let fx = fixture(g);
        (!fx.defined.is_empty()).then(|| (g, i.get(&fx.defined).clone()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn f2_satisfies_d_condition_and_is_normalized(g in group(), i in any::<Index>(), j in any::<Index>()) {
        let fx = fixture(g);
        let (b, c) = (i.get(&fx.monomials), j.get(&fx.monomials));
        prop_assume!(fx.sec.is_some());
        let sec = fx.sec.as_ref().unwrap();
        prop_assert!(sec.satisfies_d_condition(b, c).unwrap(), "{g}: d-condition fails for ({b}, {c})");
        let f = sec.f2(b, c).unwrap();
        prop_assert!(fx.ring.class_of(&f).unwrap().is_zero(), "{g}: f2({b}, {c}) is not normalized");
    }

    #[test]
    fn minus_m_lies_in_the_massey_product((g, (a, b, c)) in defined_triple()) {
        let fx = fixture(g);
        let ring = &fx.ring;
        prop_assume!(fx.sec.is_some());
        let m = fx.sec.as_ref().unwrap().m(&a, &b, &c).unwrap();
        let minus_m = ring.scale(ring.field().neg(Scalar::ONE), &m);
        let r = fx.massey.triple(&element(ring, &a), &element(ring, &b), &element(ring, &c)).unwrap();
        prop_assert!(r.contains(ring, &GradedMatrix::scalar(minus_m)), "-m({a}, {b}, {c}) not in the product");
    }

    #[test]
    fn representative_has_the_expected_degree((g, (a, b, c)) in defined_triple()) {
        let fx = fixture(g);
        let ring = &fx.ring;
        let r = fx.massey.triple(&element(ring, &a), &element(ring, &b), &element(ring, &c)).unwrap();
        prop_assert_eq!(r.representative.entries[0][0].degree, a.degree() + b.degree() + c.degree() - 1);
    }

    #[test]
    fn changing_homotopies_stays_in_the_indeterminacy(
        (g, (a, b, c)) in defined_triple(),
        i in any::<Index>(),
        j in any::<Index>(),
        s in 0u32..3,
        t in 0u32..3,
    ) {
        let fx = fixture(g);
        let ring = &fx.ring;
        let (ea, eb, ec) = (element(ring, &a), element(ring, &b), element(ring, &c));
        let h = fx.massey.homotopies(&GradedMatrix::scalar(ea.clone()), &GradedMatrix::scalar(eb.clone()), &GradedMatrix::scalar(ec.clone())).unwrap();
        let (t0, u0) = (h.t.entries[0][0].clone(), h.u.entries[0][0].clone());
        let field = ring.field();
        let shift = |g: &tate::graded::GradedMap, k: &Index, c: u32| {
            let basis = ring.basis(g.degree()).unwrap();
            if basis.is_empty() {
                return g.clone();
            }
            g.axpy(field.from_int(c as i64), &ring.cycle(k.get(&basis)))
        };
        let base = fx.massey.triple_with(&ea, &eb, &ec, t0.clone(), u0.clone()).unwrap();
        let moved = fx.massey.triple_with(&ea, &eb, &ec, shift(&t0, &i, s), shift(&u0, &j, t)).unwrap();
        prop_assert!(base.contains(ring, &moved.representative), "<{a}, {b}, {c}> moved outside its indeterminacy");
    }
}

#[test]
fn bridge_on_known_products() {
    for (g, [a, b, c], expected) in [("C3", ["x", "x", "x"], "y"), ("C3", ["x*y", "x", "x*y^-1"], "y"), ("C2xC2xC2", ["v3", "phi(0,0,1)", "v1"], "0")] {
        let fx = fixture(g);
        let ring = &fx.ring;
        let mono = |s: &str| ring.terms(&ring.parse(s).unwrap()).unwrap()[0].0.clone();
        let m = fx.sec.as_ref().unwrap().m(&mono(a), &mono(b), &mono(c)).unwrap();
        let minus = ring.scale(ring.field().neg(Scalar::ONE), &m);
        assert_eq!(ring.render(&minus), expected, "{g}: -m({a}, {b}, {c})");
    }
}

#[test]
fn fixtures_have_defined_triples() {
    for g in GROUPS {
        assert!(!fixture(g).defined.is_empty(), "{g}");
    }
}
