//! Wigner-function negativity of single-photon states under continuous-variable
//! teleportation: Gaussian channel algebra, gain optimization, post-selected
//! teleportation with pure and noisy resources, and independent numerical oracles.
//!
//! Conventions: `[x, p] = i`, so the vacuum quadrature variance is 1/2; two-mode
//! covariance matrices are scaled so the vacuum is the identity.

pub mod channel;
pub mod conditional;
pub mod error;
pub mod gain;
pub mod noisy;
pub mod numeric;
pub mod oracle;
pub mod phase_space;
pub mod verify;

pub use channel::{
    build_map, is_completely_positive, origin_symmetric, threshold_unconditional, GaussianMap, InputState,
    TeleportParams,
};
pub use conditional::{ConditionalOutcome, DiskRegion};
pub use error::{Error, Result};
pub use gain::{optimal_gain, optimal_gain_for, OptimalGain};
pub use noisy::{AppendixAux, PointThreshold, SquareRegion};
pub use num_complex;
pub use phase_space::{NoisyEprSpec, PhasePoint, PolyGaussWigner, SqueezeSpec, TwoModeCM, WignerMixture};
