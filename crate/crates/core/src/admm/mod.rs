//! Gridless sparse recovery with joint interference removal.
//!
//! Minimizes `‖r − Gx − cq‖² + ρ‖x‖_A` through the Toeplitz SDP lift of the
//! atomic norm, split into closed-form ADMM blocks.

mod config;
mod solve;
mod state;
pub mod updates;

pub use config::{default_rho, default_rho_with_floor, AdmmConfig, DiagonalRule, DualStep, RHO_FLOOR};
pub use solve::{solve, solve_with_inputs, step, Solution, StepResiduals};
pub use state::{init_state, AdmmState, ResidualTrace, SolverInputs};
pub use updates::{assemble_q, update_duals, update_q, update_t, update_u, update_x, update_y, update_z};
