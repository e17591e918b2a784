//! Blown-up random graphs with short-odd-cycle cleanup.
//!
//! The crate builds two-colored superimposed blow-ups of random base graphs,
//! removes all short odd cycles via vertex and edge deletion, verifies the
//! pseudo-randomness event the analysis conditions on, bounds closed-walk
//! counts through a dominating block operator, and searches for independent
//! sets — together with a CLI harness for seeded experiments.

pub mod bitset;
pub mod cleanup;
pub mod cycles;
pub mod harness;
pub mod indep;
pub mod io;
pub mod linalg;
pub mod model;
pub mod params;
pub mod pseudo;
pub mod spectral;
