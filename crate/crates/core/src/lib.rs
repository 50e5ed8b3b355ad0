//! Hasse–Weil L-functions of elliptic curves over the rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`curve`]: exact Weierstrass models, invariants, minimal models, the group
//!   law, torsion and bounded point search.
//! * [`local`]: point counts over finite fields, `a_p`, reduction types and
//!   Tate's algorithm (Kodaira symbol, conductor exponent, Tamagawa number).
//! * [`lseries`]: Euler factors, Dirichlet coefficients, evaluation in the
//!   half-plane of absolute convergence, and local zeta-function identities.
//! * [`analytic`]: multiprecision evaluation of the completed L-function,
//!   root number, central derivatives and analytic rank.
//! * [`bsd`]: real period, canonical heights, regulator and the assembled
//!   Birch–Swinnerton-Dyer report.
//! * [`realization`]: Hodge data, archimedean gamma factors, Tate twists,
//!   Weil–Deligne representations and monodromy filtrations.
//! * [`lattice`]: Smith normal form, torsion orders and lattice indices.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod analytic;
pub mod arith;
pub mod bsd;
pub mod curve;
pub mod error;
pub mod lattice;
pub mod local;
pub mod lseries;
pub mod par;
pub mod realization;

pub use error::{Error, Result};
