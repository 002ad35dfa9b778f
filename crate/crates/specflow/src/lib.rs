//! specflow: a numerical laboratory for special flows over irrational
//! circle rotations under bounded-variation roof functions.
//!
//! The library builds the class of bounded-variation roofs with no
//! singular-continuous part (sawtooth jumps plus an absolutely
//! continuous part plus a constant) and runs the quantitative machinery
//! attached to them: exact continued fractions and three-gap geometry,
//! Birkhoff cocycles and Denjoy-Koksma checks, the Ratner-drift search,
//! oscillatory weak-mixing diagnostics, and partial-rigidity statistics.
//! Everything is exposed both as a library (see `examples/`) and through
//! the `specflow` experiment CLI.
//!
//! Entry points:
//! - [`cf::QuadraticIrrational`] and [`cf::ContinuedFraction`]: exact
//!   arithmetic for the rotation number.
//! - [`roof::RoofFunction`]: construction, decomposition, variation and
//!   the jump-combinatorics machinery.
//! - [`birkhoff`]: cocycle sums, the special flow, the drift identity.
//! - [`ratner`]: drift-interval search and population experiments.
//! - [`mixing`]: oscillatory integrals, rigidity statistics.
//! - [`scenario`]: JSON scenario ingestion and report emission.

pub mod birkhoff;
pub mod cf;
pub mod circle;
pub mod error;
pub mod mixing;
pub mod quad;
pub mod ratner;
pub mod rng;
pub mod roof;
pub mod scenario;

pub use circle::{nearest_int_distance, CirclePoint};
pub use error::{Error, Result};

/// Library version echoed into run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
