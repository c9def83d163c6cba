//! Schmidt decomposition of transverse two-photon amplitudes from
//! parametric down-conversion.
//!
//! The pipeline works in σ⊥-scaled units, where the only physical parameter is
//! the product bσ⊥:
//!
//! 1. [`amplitude`]: the double-Gaussian and Gaussian×sinc amplitude families
//!    and their normalization.
//! 2. [`angular`]: expansion in the relative angle into orbital angular
//!    momentum sectors `m` with probabilities `P_m`.
//! 3. [`radial`]: symmetric Nyström eigenproblem per sector, giving radial
//!    coefficients `γ_{n,m}` and modes `φ_{n,m}`.
//! 4. [`measures`]: the global table `λ_{nm} = P_m γ_{nm}`, Schmidt number and
//!    entanglement entropy.
//!
//! [`pipeline::decompose`] runs all four. [`gaussian`] holds the closed-form
//! double-Gaussian results used as a reference, [`filtering`] the
//! low-wavevector filter and [`slice`] the equal-magnitude probability slice.
//!
//! ```no_run
//! use biphoton_schmidt::{decompose, AmplitudeModel, Family, SolverConfig};
//!
//! let model = AmplitudeModel::scaled(Family::GaussianSinc, 0.3)?;
//! let result = decompose(&model, &SolverConfig::default())?;
//! println!("K = {:.3}, E = {:.3} bits", result.k(), result.spectrum.entropy_bits);
//! # Ok::<(), biphoton_schmidt::SchmidtError>(())
//! ```

pub mod amplitude;
pub mod angular;
pub mod cli;
pub mod error;
pub mod filtering;
pub mod gaussian;
pub mod measures;
pub mod pipeline;
pub mod quadrature;
pub mod radial;
pub mod slice;

pub use amplitude::{crystal_b, AmplitudeModel, Family, TransverseVector};
pub use angular::{adaptive_sectors, angular_fourier, SectorKernel, SectorSet};
pub use error::{Result, SchmidtError};
pub use filtering::{apply_filter, FilterOutcome, FilterReport};
pub use gaussian::{analytic_k, analytic_mode, analytic_spectrum, GaussianSpectrumParams};
pub use measures::{entanglement_entropy, schmidt_number, variance_k_estimate, SchmidtSpectrum};
pub use pipeline::{decompose, Decomposition, SolverConfig};
pub use quadrature::RadialGrid;
pub use radial::{assemble_spectrum, decompose_sector, SchmidtMode, SectorSpectrum};
