//! Strategies and checks shared by the property and acceptance targets.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use toricpo::lte::{self, LteValue};
use toricpo::polytope::{blowup1, blowup2, hirzebruch, simplex, CatalogEntry, Facet};
use toricpo::rational::{int, rat, Extended};
use toricpo::tropical::{critical_system, find_critical_points, initial_system, SolveOptions};
use toricpo::{BulkCoefficients, CriticalReport, LaurentPoly, MomentPolytope, NovikovScalar, Potential, Rational};

pub fn exponent() -> impl Strategy<Value = Rational> {
    (-12i64..=24, prop::sample::select(vec![1i64, 2, 3, 4, 6])).prop_map(|(n, d)| rat(n, d))
}

pub fn coefficient() -> impl Strategy<Value = Complex64> {
    (0.1f64..5.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

/// Nonzero scalars; half of them exact, the rest truncated above their top
/// exponent.
pub fn scalar() -> impl Strategy<Value = NovikovScalar> {
    (prop::collection::vec((exponent(), coefficient()), 1..5), prop::option::of(1i64..6)).prop_map(|(terms, gap)| {
        let trunc = match gap {
            None => Extended::Infinity,
            Some(g) => {
                let top = terms.iter().map(|(e, _)| e.clone()).max().unwrap();
                Extended::Finite(top + rat(g, 2))
            }
        };
        let x = NovikovScalar::from_terms(terms.clone(), trunc.clone());
        if x.is_zero() {
            NovikovScalar::from_terms([(terms[0].0.clone(), Complex64::new(1.0, 0.0))], trunc)
        } else {
            x
        }
    })
}

fn val(x: &NovikovScalar) -> Rational {
    x.valuation().finite().cloned().expect("nonzero")
}

pub fn check_valuation_axioms(a: &NovikovScalar, b: &NovikovScalar) -> Result<(), TestCaseError> {
    let (va, vb) = (val(a), val(b));
    prop_assert_eq!(a.mul(b).valuation(), Extended::Finite(&va + &vb));
    let s = a.add(b);
    let lo = va.clone().min(vb.clone());
    if let Extended::Finite(vs) = s.valuation() {
        prop_assert!(vs >= lo);
    }
    if va != vb {
        prop_assert_eq!(s.valuation(), Extended::Finite(lo));
    }
    Ok(())
}

pub fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i64..=2, 2), exponent(), coefficient()), 1..5).prop_map(|terms| {
        LaurentPoly::from_terms(2, terms.into_iter().map(|(a, e, c)| (a, NovikovScalar::monomial(e, c))))
    })
}

pub fn check_leibniz(f: &LaurentPoly, g: &LaurentPoly, i: usize) -> Result<(), TestCaseError> {
    let lhs = f.mul(g).log_derivative(i).unwrap();
    let rhs = f.log_derivative(i).unwrap().mul(g).add(&f.mul(&g.log_derivative(i).unwrap()));
    for (x, c) in lhs.sub(&rhs).terms() {
        prop_assert!(c.max_abs_coefficient() < 1e-9, "term {x:?}: {c}");
    }
    Ok(())
}

/// Catalog potentials with their corrections, parameters drawn from a small
/// rational set.
pub fn catalog_entry() -> impl Strategy<Value = CatalogEntry> {
    let alpha = (1i64..=11, Just(12i64)).prop_map(|(n, d)| rat(n, d));
    prop_oneof![
        (1usize..=3).prop_map(|n| simplex(n).unwrap()),
        alpha.clone().prop_map(|a| blowup1(&a).unwrap()),
        alpha.clone().prop_map(|a| hirzebruch(2, &a).unwrap()),
        (1i64..=5, 1i64..=5)
            .prop_filter("a + b < 1", |(a, b)| a + b < 12)
            .prop_map(|(a, b)| blowup2(&rat(a, 12), &rat(b, 12)).unwrap()),
    ]
}

pub fn pipeline(entry: &CatalogEntry, e: i64) -> (Potential, CriticalReport) {
    let w = Potential::standard(&entry.polytope, &entry.corrections, &int(e)).unwrap();
    let r = find_critical_points(&w, &SolveOptions::default()).unwrap();
    (w, r)
}

pub fn check_lift_residual(entry: &CatalogEntry) -> Result<(), TestCaseError> {
    let (w, r) = pipeline(entry, 3);
    for p in r.points.iter().filter(|p| p.nondegenerate) {
        let rv = p.residual_valuation.clone().expect("lifted points carry a residual");
        prop_assert!(!rv.exceeds(&int(3)), "residual {} below E at {:?}", rv, p.u);
        prop_assert!(w.polytope().is_interior(&p.u));
        for (y, ui) in p.y.iter().zip(&p.u) {
            prop_assert_eq!(y.valuation(), Extended::Finite(ui.clone()));
        }
    }
    Ok(())
}

pub fn check_truncation_stability(entry: &CatalogEntry) -> Result<(), TestCaseError> {
    let (_, r3) = pipeline(entry, 3);
    let (_, r6) = pipeline(entry, 6);
    let key = |r: &CriticalReport| {
        let mut k: Vec<_> = r.points.iter().map(|p| (p.u.clone(), p.multiplicity)).collect();
        k.sort();
        k
    };
    prop_assert_eq!(key(&r3), key(&r6));
    for (a, b) in r3.points.iter().zip(&r6.points) {
        for (ya, yb) in a.y.iter().zip(&b.y) {
            for ((ea, ca), (eb, cb)) in ya.terms().iter().zip(yb.terms()) {
                prop_assert_eq!(ea, eb);
                prop_assert!((ca - cb).norm() < 1e-8 * (1.0 + ca.norm()));
            }
        }
    }
    Ok(())
}

/// A Delzant polygon: a triangle or rectangle with corners cut. Cutting the
/// corner between normals `a`, `b` by the normal `a + b` keeps every vertex
/// unimodular.
pub fn delzant_polygon() -> impl Strategy<Value = MomentPolytope> {
    let start = prop_oneof![
        Just(vec![Facet::new(vec![1, 0], int(0)), Facet::new(vec![0, 1], int(0)), Facet::new(vec![-1, -1], int(1))]),
        (1i64..=3).prop_map(|h| vec![
            Facet::new(vec![1, 0], int(0)),
            Facet::new(vec![0, 1], int(0)),
            Facet::new(vec![-1, 0], int(1)),
            Facet::new(vec![0, -1], rat(h, 2)),
        ]),
    ];
    (start, prop::collection::vec((0usize..16, 1i64..=4), 0..5)).prop_map(|(facets, cuts)| {
        let mut p = MomentPolytope::new(2, facets).unwrap();
        for (pick, depth) in cuts {
            let verts = p.vertices().unwrap();
            let v = &verts[pick % verts.len()];
            let (a, b) = (&p.facets[v.facets[0]], &p.facets[v.facets[1]]);
            let normal = vec![a.normal[0] + b.normal[0], a.normal[1] + b.normal[1]];
            if normal == [0, 0] {
                continue;
            }
            // halve the depth until the cut keeps the polygon valid
            let mut d = rat(depth, 10);
            for _ in 0..6 {
                let cut = Facet::new(normal.clone(), &a.constant + &b.constant - &d);
                let mut facets = p.facets.clone();
                facets.push(cut);
                let q = MomentPolytope::new(2, facets).unwrap();
                if q.validate().valid {
                    p = q;
                    break;
                }
                d /= int(2);
            }
        }
        p
    })
}

/// Interior points with small denominators, so that facet values tie often.
pub fn sample_points(p: &MomentPolytope, k: usize) -> Vec<Vec<Rational>> {
    let mut pts = lte::grid_points(p, k, &[]).unwrap();
    pts.push(p.vertex_centroid().unwrap());
    pts
}

pub fn check_lte_integrality(p: &MomentPolytope, k: usize) -> Result<(), TestCaseError> {
    prop_assert!(p.validate().valid);
    for u in sample_points(p, k) {
        let sys = lte::leading_term_system(p, &u, &BulkCoefficients::ones(p.facet_count())).unwrap();
        let b = &sys.basis;
        // `basis` and `inverse` are mutually inverse integer matrices
        for i in 0..2 {
            for j in 0..2 {
                let e: i64 = (0..2).map(|k| b.basis[i][k] * b.inverse[k][j]).sum();
                prop_assert_eq!(e, i64::from(i == j));
            }
        }
        for (j, f) in p.facets.iter().enumerate() {
            let back: Vec<i64> = (0..2).map(|i| (0..2).map(|k| b.change[j][k] * b.basis[k][i]).sum()).collect();
            prop_assert_eq!(&back, &f.normal);
        }
        prop_assert!(sys.is_triangular(), "not triangular at {:?}", u);
        prop_assert_eq!(sys.filtration.dims.iter().sum::<usize>(), 2);
    }
    Ok(())
}

pub fn fano_catalog() -> Vec<(String, CatalogEntry)> {
    let mut out: Vec<(String, CatalogEntry)> = (1..=4).map(|n| (format!("simplex:{n}"), simplex(n).unwrap())).collect();
    for a in [rat(1, 5), rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 4)] {
        out.push((format!("blowup1:{a}"), blowup1(&a).unwrap()));
        out.push((format!("hirzebruch:1,{a}"), hirzebruch(1, &a).unwrap()));
    }
    for (a, b) in [(rat(1, 2), rat(1, 4)), (rat(1, 3), rat(1, 3)), (rat(1, 4), rat(1, 2)), (rat(1, 5), rat(2, 5))] {
        out.push((format!("blowup2:{a},{b}"), blowup2(&a, &b).unwrap()));
    }
    out
}

/// At every isolated point cell of a Fano catalog potential, the leading
/// term equation and the tropical initial system have the same solutions.
pub fn check_lte_tropical_bijection() -> Result<usize, String> {
    let mut cells = 0;
    for (name, entry) in fano_catalog() {
        let p = &entry.polytope;
        if p.fano_check().map_err(|e| e.to_string())? != toricpo::FanoType::Fano {
            return Err(format!("{name} is not Fano"));
        }
        let w = Potential::standard(p, &entry.corrections, &int(2)).map_err(|e| e.to_string())?;
        let report = find_critical_points(&w, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let system = critical_system(&w);
        for cell in &report.cells {
            let Some(sol) = &cell.solution else { continue };
            let u = &cell.cell.sample;
            if cell.system != initial_system(&system, u) {
                return Err(format!("{name} at {u:?}: initial system differs"));
            }
            let sys = lte::leading_term_system(p, u, &BulkCoefficients::ones(p.facet_count())).map_err(|e| e.to_string())?;
            let outcome = lte::solve_lte(&sys).map_err(|e| e.to_string())?;
            let mut lte_roots = Vec::new();
            for s in outcome.solutions() {
                let mut pt = Vec::new();
                for v in &s.ybar {
                    match v {
                        LteValue::Fixed(z) => pt.push(*z),
                        LteValue::Free => return Err(format!("{name} at {u:?}: free variable at an isolated cell")),
                    }
                }
                lte_roots.push(pt);
            }
            if lte_roots.len() != sol.roots.len() {
                return Err(format!("{name} at {u:?}: {} vs {} solutions", lte_roots.len(), sol.roots.len()));
            }
            let close = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-7);
            for root in &sol.roots {
                let hits = lte_roots.iter().filter(|r| close(r, &root.point)).count();
                if hits != 1 {
                    return Err(format!("{name} at {u:?}: root {:?} matched {hits} times", root.point));
                }
            }
            cells += 1;
        }
    }
    Ok(cells)
}

/// Runs `check` on `cases` generated values; the error carries the minimal
/// failing input.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}
