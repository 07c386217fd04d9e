//! Probing ground-state degeneracies of free-fermion lattice models through
//! the decoherence of an attached qubit.
//!
//! A dephasing qubit coupled to a filled Fermi sea picks up a decoherence
//! factor `L(t) = <g| exp(-i H' t) |g>`, the overlap between the unperturbed
//! ground state and the same state evolved under the perturbed Hamiltonian
//! `H' = H + delta * V`. Wherever the spectrum becomes degenerate at the Fermi
//! level, `|L(t)|^2` collapses sharply; scanning a model parameter therefore
//! localizes gap closings without computing any topological invariant.
//!
//! The crate is organized in four layers:
//!
//! * [`numkit`]   - dense complex Hermitian eigensolver, unitary evolution,
//!   determinants; no external linear-algebra backend.
//! * [`models`]   - two-band and four-band Bloch Hamiltonians (dimerized
//!   chain, half-BHZ square lattice, honeycomb spin-orbit ribbon, cubic
//!   four-band semimetal) plus open-boundary and strip variants.
//! * [`decoherence`] - the decoherence factor itself: closed two-band form,
//!   exact determinant evaluation, momentum products, real-space series.
//! * [`analysis`] - parameter sweeps with cusp detection, node location,
//!   momentum-path scans, quantized Berry phases, lattice Chern numbers and
//!   edge-localization measures.

pub mod analysis;
pub mod decoherence;
pub mod models;
pub mod numkit;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
