//! Pointwise kernels for the quasistatic Ericksen–Leslie system: tensor algebra,
//! free-energy potentials and their structural checks, and the Leslie stress.
//!
//! Everything here works on single points of `(d, ∇d, ∇v)`; field-level code lives
//! in the `ericksen` crate.

#![no_std]

extern crate alloc;

pub mod ad;
pub mod energy;
pub mod leslie;
pub mod tensor;

pub use energy::{
    variational_derivative_pointwise, Coercivity, FreeEnergy, GinzburgLandau, Growth,
    ScaledOseenFrank, SimplifiedOseenFrank, WithField, WithFreedom,
};
pub use leslie::{check_dissipativity, check_parodi, DissipationMargins, LeslieCoefficients};
pub use tensor::{contract32, contract42, contract43, outer, sym_skw, Mat3, Tensor3, Tensor4, Vec3};
