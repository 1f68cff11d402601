//! Pairwise correlations between distant spins of the infinite spin-1/2 XX
//! chain in a transverse field.
//!
//! The pipeline runs bottom-up:
//!
//! - [`free_fermion`]: dispersion, Fermi-Dirac occupation and the Fermi
//!   integrals `f_m`, the sufficient statistic for every pairwise quantity.
//! - [`wick`]: the five X-state entries `X±`, `Y±`, `Z` as polynomials in
//!   `f_m`, plus a pairing-enumeration oracle for the string correlator.
//! - [`rdm`]: the assembled two-site density matrix, its spectrum and marginals.
//! - [`measures`]: concurrence, mutual information, classical correlations,
//!   quantum discord and Jensen-Shannon coherence, each with a brute-force
//!   cross-check.
//! - [`ed_oracle`]: finite-ring exact diagonalization used as ground truth.
//! - [`cli`]: grid scans, derivative-based critical-point location, onset
//!   search, validation suites and table output.

pub mod cli;
pub mod ed_oracle;
pub mod error;
pub mod format;
pub mod free_fermion;
pub mod measures;
pub mod quadrature;
pub mod rdm;
pub mod wick;

pub use error::{Error, Result};
pub use free_fermion::{FermiCoefficients, ModelParams};
pub use measures::{all_measures, CorrelationReport};
pub use rdm::TwoSiteRDM;
pub use wick::TwoSiteElements;
