//! Shared fixtures for the criterion benches.

use toricpo::polytope::catalog_from_spec;
use toricpo::rational::{int, rat};
use toricpo::{NovikovScalar, Potential};

/// Catalog entries exercised by the pipeline benches.
pub const SPECS: [&str; 5] = ["simplex:2", "simplex:3", "blowup1:1/3", "hirzebruch:2,1/2", "blowup2:1/2,1/4"];

pub fn potential(spec: &str, truncation: i64) -> Potential {
    let entry = catalog_from_spec(spec).expect("catalog spec");
    Potential::standard(&entry.polytope, &entry.corrections, &int(truncation)).expect("potential")
}

/// A dense unit `1 + Σ_{k=1}^{terms} c_k T^{k/q}` truncated at `T^{terms/q + 1}`.
pub fn dense_unit(terms: i64, q: i64) -> NovikovScalar {
    NovikovScalar::from_terms(
        (0..=terms).map(|k| (rat(k, q), num_complex::Complex64::new(1.0 / (k + 1) as f64, 0.1 * k as f64))),
        toricpo::Extended::Finite(rat(terms, q) + int(1)),
    )
}
