//! Numerics for rotationally symmetric critical points of curvature
//! functionals of the form ∫(α + βH² − γK) dA.
//!
//! The crate provides, on uniform 1-D grids:
//!
//! * discrete C^k and Hölder norms ([`grid`]),
//! * a Sturm–Liouville two-point boundary value solver with
//!   maximum-principle diagnostics ([`bvp`]),
//! * the fully explicit a-priori constant ledger for global C^{2+α}
//!   estimates, together with empirical verification of every single
//!   estimate in the chain ([`schauder`]),
//! * closed-form catenary/catenoid machinery between coaxial rings
//!   ([`catenary`]),
//! * the stability-function fixed-point scheme that perturbs minimal
//!   surfaces ([`stability`]),
//! * meridian curvature geometry, the coupled Willmore-type ODE system,
//!   and a direct Newton/continuation solver for it ([`willmore`]),
//! * table generators and verification sweeps backing the CLI
//!   ([`experiments`]).
//!
//! All core math is generic over the scalar type through [`scalar::Scalar`]
//! (any `num_traits` real type); concrete `f64` aliases live at the crate
//! root and are what the CLI and most tests use.
//!
//! ```
//! use revsurf::catenary::RingBoundary;
//! use revsurf::willmore::{self, ModelParams, WillmoreBvpConfig};
//!
//! // unit rings at distance 2: past the critical separation no catenoid
//! // exists, but a bent Willmore-critical surface still spans them
//! let rings = RingBoundary::new(1.0_f64, 2.0).unwrap();
//! let surface = willmore::solve_willmore_bvp(
//!     &rings,
//!     &ModelParams::willmore(),
//!     &WillmoreBvpConfig::default(),
//! )
//! .unwrap();
//! let energy = willmore::willmore_energy(&surface.f, &surface.h).unwrap();
//! assert!(energy > 0.9 && energy < 1.1);
//! ```

pub mod bvp;
pub mod catenary;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod scalar;
pub mod schauder;
pub mod stability;
pub mod willmore;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Uniform grid over `f64`.
pub type Grid64 = grid::Grid<f64>;
/// Grid sample with cached derivatives over `f64`.
pub type Sampled64 = grid::SampledFunction<f64>;
/// Discrete norm report over `f64`.
pub type NormReport64 = grid::NormReport<f64>;
/// Sturm–Liouville problem over `f64`.
pub type SturmLiouville64 = bvp::SturmLiouvilleProblem<f64>;
/// Coefficient bounds over `f64`.
pub type CoefficientBounds64 = bvp::CoefficientBounds<f64>;
/// A-priori constant ledger over `f64`.
pub type ConstantLedger64 = schauder::ConstantLedger<f64>;
/// Estimate verification report over `f64`.
pub type EstimateReport64 = schauder::EstimateReport<f64>;
/// Catenary over `f64`.
pub type Catenary64 = catenary::Catenary<f64>;
/// Ring boundary pair over `f64`.
pub type RingBoundary64 = catenary::RingBoundary<f64>;
/// Stability certificate over `f64`.
pub type StabilityCertificate64 = stability::StabilityCertificate<f64>;
/// Fixed-point perturbation result over `f64`.
pub type PerturbationResult64 = stability::PerturbationResult<f64>;
/// Model parameters (α, β, γ) over `f64`.
pub type ModelParams64 = willmore::ModelParams<f64>;
/// Meridian surface over `f64`.
pub type MeridianSurface64 = willmore::MeridianSurface<f64>;
