//! Means compatible with binary operations.
//!
//! * [`means`]: arithmetic, geometric, harmonic and arithmetic-geometric
//!   means, their compatible operations, and axiom/defect checkers.
//! * [`theta`]: the Jacobi theta series and nome inversion.
//! * [`oploop`]: the theta-function loop operation compatible with AGM and
//!   its law suite.
//! * [`finite_models`]: exhaustive search over small commutative loops with
//!   bijective squaring, and the derived means.
//! * [`proofcheck`]: parser and checker for equational proof traces.
//! * [`cli`]: the `agmloop` command-line front end.

pub mod cli;
mod dd;
pub mod finite_models;
pub mod means;
pub mod oploop;
pub mod proofcheck;
pub mod report;
pub mod theta;
