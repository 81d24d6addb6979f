//! Entanglement of fermionic N-particle states through their M-body reduced
//! density matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] encodes orbitals, Slater determinants and states as bitsets and
//!   provides combinadic ranking and fermionic reordering signs.
//! * [`dm`] builds the bipartite coefficient matrix, the M-body density matrix
//!   and its spectrum and entropies, plus reference states.
//! * [`hypergraph`] treats a set of determinants as an N-uniform hypergraph:
//!   incidence matrices, t-designs, complements and canonical forms.
//! * [`search`] decides whether a maximally M-body entangled state exists for
//!   given `(D, N, M)` using isomorphism-class enumeration and an exact
//!   rational simplex.
//! * [`random`] samples random states and trace-fixed Wishart matrices and
//!   compares their spectra with the analytic laws.
//! * [`report`] and [`statefile`] are the serialised surfaces used by the CLI
//!   and the C bindings.

pub mod dm;
pub mod error;
pub mod fock;
pub mod hypergraph;
pub mod linalg;
pub mod random;
pub mod report;
pub mod search;
pub mod statefile;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tool version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
