//! Spectral decimation for the Neumann Laplacian on the Vicsek fractals `VS_n`.
//!
//! The crate builds the graph approximations `Γ_m`, inverts the decimation
//! polynomial to enumerate the whole spectrum with multiplicities, constructs
//! eigenfunctions by local extension, and evaluates spectral operators on top
//! of that: heat and wave kernels, projections onto the symmetric series,
//! counting functions, ratio-gap and clustering certificates, and the explicit
//! Green's function of the Dirichlet problem.
//!
//! ```
//! use vicsek::{DecimationSystem, VicsekParams};
//!
//! let sys = DecimationSystem::new(VicsekParams::new(2).unwrap());
//! let table = sys.enumerate_spectrum(2).unwrap();
//! assert_eq!(table.records()[0].value, 0.0);
//! assert_eq!(table.records()[1].multiplicity, 3);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod decimation;
pub mod eigenfunc;
pub mod error;
pub mod gaps;
pub mod green;
pub mod kernels;
pub mod limits;
pub mod vsgraph;

pub use decimation::{DecimationSystem, EigenvalueRecord, Series, SpectrumTable};
pub use error::{Result, VsError};
pub use vsgraph::{FunctionOnGraph, GraphApprox, VicsekParams};
