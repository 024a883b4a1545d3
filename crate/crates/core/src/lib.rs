//! Bell-type jump process for a Dirac particle created and annihilated at a
//! point source governed by an interior-boundary condition.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod fit;
pub mod jump;
pub mod ode;
pub mod params;
pub mod rng;
pub mod spinor;
pub mod stats;
pub mod track;
pub mod trajectory;
pub mod wavefunction;
