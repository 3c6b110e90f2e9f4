//! Instantaneous eigenbasis: continuity-gauged frames, non-adiabatic couplings,
//! period-averaged energies and propagation in the adiabatic frame.

pub mod averages;
pub mod coupling;
pub mod frame;
pub mod generator;

pub use averages::{time_averaged_energies, EnergySource};
pub use coupling::{numeric_theta, CouplingMatrix};
pub use frame::{adiabatic_populations, frame_series, instantaneous_frame, instantaneous_frame_ranks, AdiabaticFrame, Gauge};
pub use generator::{adiabatic_generator, propagate_in_frame, CouplingMode, FrameTrajectory, Generator};
