//! Lagrangian Floer potential functions of compact toric manifolds.
//!
//! Starting from a Delzant moment polytope the crate builds the potential
//! function over the universal Novikov field, locates its critical points
//! (tropical candidates, initial systems over `ℂ*`, T-adic Newton lifting),
//! solves the leveled leading-term equations that decide bulk-balancedness of
//! torus fibers, and computes Hessians, residue pairings and the associated
//! consistency identities.

pub mod error;
pub mod jacres;
pub mod laurent;
pub mod linalg;
pub mod lte;
pub mod novikov;
pub mod polysys;
pub mod polytope;
pub mod rational;
pub mod tropical;

pub use error::{Error, Result};
pub use jacres::{ExactnessRegime, MorseVerdict, ResidueReport};
pub use laurent::{LaurentPoly, Potential};
pub use lte::{BalanceVerdict, LteOutcome, LteSolution, LteSystem, LteValue};
pub use novikov::NovikovScalar;
pub use polysys::{CPoly, TorusSolution};
pub use polytope::{BulkCoefficients, CatalogEntry, Correction, FanoType, MomentPolytope};
pub use rational::{Extended, Rational};
pub use tropical::{CriticalPoint, CriticalReport, SolveOptions, TropicalCell};
