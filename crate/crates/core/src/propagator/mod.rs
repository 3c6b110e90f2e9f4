//! Time integration of `i d/dt psi = H(t) psi`.

pub mod expm;
pub mod oracle;
pub mod plan;
pub mod trajectory;

pub use oracle::{coherent_amplitude, coherent_state};
pub use plan::{ExpBackend, Method, PropagationPlan, WindowMode};
pub use trajectory::{propagate, propagate_with, Sample, Trajectory};
