//! Periodic spectral Galerkin discretization of the Ericksen–Leslie system with
//! energy-law diagnostics and a scenario runner.

pub mod basis;
pub mod config;
pub mod diagnostics;
pub mod grid;
pub mod interpolation;
pub mod io;
pub mod scenario;
pub mod simulator;
pub mod spectral;
pub mod variational;
