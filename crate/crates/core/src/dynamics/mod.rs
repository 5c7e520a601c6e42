//! The three resonant systems and an adaptive integrator.

mod equilibria;
mod integrator;
mod systems;

pub use equilibria::{classify_equilibria, classify_spectrum, linearization_eigenvalues, Equilibrium, EquilibriumKind};
pub use integrator::{integrate, integrate_with, DriftLog, IntegratorOptions, StepStats, Trajectory, SADDLE_RADIUS};
pub use systems::{
    pack_complex, rhs_complex, rhs_coupled, unpack_complex, rhs_real, ComplexTriad, ComplexTriadState, CoupledState, CoupledTriads,
    RealTriad, RealTriadState, System, VectorField,
};
