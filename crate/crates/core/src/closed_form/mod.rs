//! Closed-form layer: cubic-root data of the enstrophy oscillation, its
//! half period, the burst bounds and the reduced Hamiltonian of the coupled system.

mod burst;
mod cubic;
mod hamiltonian;
pub mod measure;
pub mod quadrature;
mod xi_ode;

pub use burst::{
    burst_bounds_enstrophy, burst_bounds_h3, burst_report, enstrophy_split, h3_split, BurstBounds, BurstNorm,
    BurstReport, RegimeFlags,
};
pub use cubic::{cubic_data, half_period, k_constant, period_asymptotic, period_integral, CubicData};
pub use hamiltonian::{
    conserving_branch, hamiltonian_at, hamiltonian_segments, inverse_sqrt_antiderivative, reduced_hamiltonian,
    HamiltonianReport, HamiltonianSegment,
};
pub use xi_ode::{xi_ode_residual, XiOdeResidual};
