//! Independent brute-force checks of the closed forms: phase-space quadrature,
//! truncated Fock-basis simulation, and Monte Carlo over acceptance regions.

pub mod fock;
pub mod mc;
pub mod quadrature;

pub use fock::{conditional_state_fock, origin_via_parity, FockInput, FockVector};
pub use mc::{disk_average_mc, square_average_mc, McEstimate};
pub use quadrature::{
    noisy_point_via_quadrature, noisy_square_via_quadrature, origin_via_quadrature, output_via_quadrature,
    QuadratureGrid,
};
