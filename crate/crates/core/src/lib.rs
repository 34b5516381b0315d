//! Finite-volume solvers for the two-layer thin-film system
//! `f_t + (f^2 b/2)_x = 0`, `b_t + (f b^2/2)_x = 0`,
//! `g_t + (g^2 q/2 + f b g)_x = 0`, `q_t + (g q^2/2 + f b q)_x = 0`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod grp;
pub mod riemann;
pub mod scheme;
pub mod state;

pub use error::{Error, Result};
pub use state::{ConservedState, Vec4};
