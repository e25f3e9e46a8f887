//! Spectral toolkit for the strongly damped wave equation with a logarithmic
//! mass term,
//!
//! ```text
//! u_tt − Δu + m² L_θ u − Δu_t = 0,   L_θ = log(I + (−Δ)^θ).
//! ```
//!
//! Each Fourier mode solves a scalar damped oscillator, so solutions, the
//! large-time profile and their `L²` norms reduce to radial integrals over
//! frequency space.

pub mod data;
pub mod error;
pub mod evolution;
pub mod invariants;
pub mod oracle;
pub mod quadrature;
pub mod rates;
pub mod special;
pub mod symbol;

pub use data::{DataSpec, FourierData, RadialProfile};
pub use error::{Error, Result};
pub use evolution::{mode_energy, mode_solution, profile_phi, ModeEnergy, ModeValue};
pub use oracle::{compare_modes, rk4_mode, OdeRunConfig};
pub use quadrature::{NormBreakdown, QuadMode, QuadratureConfig};
pub use rates::{predict_regime, GridSpec, NormSeries, RateFit, RegimeKind, RegimePrediction};
pub use symbol::{ModelParams, RootZone, ZoneThresholds};
