use num_complex::Complex;

use super::config::AdmmConfig;
use super::state::{init_state, AdmmState, ResidualTrace, SolverInputs};
use super::updates::{assemble_q, model_output, update_duals, update_q, update_t, update_u, update_x, update_y, update_z};
use crate::error::{Error, Result};
use crate::numerics::{norm, norm_sqr, sub, CVector, Matrix};
use crate::scalar::{czero, Real};

/// Output of [`solve`].
#[derive(Debug, Clone)]
pub struct Solution<T: Real> {
    pub x: CVector<T>,
    pub q: Complex<T>,
    pub trace: ResidualTrace<T>,
    pub state: AdmmState<T>,
}

impl<T: Real> Solution<T> {
    pub fn iterations(&self) -> usize {
        self.state.iter
    }
}

/// Residuals after one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResiduals<T> {
    pub primal_z: T,
    pub primal_y: T,
    pub objective: T,
}

/// One full sweep: q, x, u, t (assemble Q), z, Y, then both multipliers.
pub fn step<T: Real>(state: &mut AdmmState<T>, inputs: &SolverInputs<T>, config: &AdmmConfig<T>) -> Result<StepResiduals<T>> {
    let (rho, tau) = (config.rho, inputs.tau);
    state.q = if config.estimate_interference { update_q(state, inputs)? } else { czero() };
    state.x = update_x(state, inputs)?;
    state.u = update_u(state, tau, rho, config.diagonal_rule)?;
    state.t = update_t(state, tau, rho);
    let q_mat = assemble_q(&state.u, &state.x, state.t)?;
    state.z = update_z(state, inputs)?;
    state.y = update_y(&q_mat, &state.p, tau)?;
    let (p, w) = update_duals(state, &q_mat, inputs, config.dual_step_value())?;
    state.p = p;
    state.w_dual = w;
    state.iter += 1;

    if !state.is_finite() {
        return Err(Error::Numerical(format!("iterates became non-finite at iteration {}", state.iter)));
    }
    residuals(state, inputs, &q_mat, rho)
}

fn residuals<T: Real>(state: &AdmmState<T>, inputs: &SolverInputs<T>, q_mat: &Matrix<T>, rho: T) -> Result<StepResiduals<T>> {
    let fit = model_output(state, inputs)?;
    let primal_z = norm(&sub(&fit, &state.z));
    let primal_y = state.y.sub(q_mat)?.frobenius_norm();
    let objective = norm_sqr(&sub(&inputs.r, &state.z)) + T::lit(0.5) * rho * (state.u[0].re + state.t);
    Ok(StepResiduals { primal_z, primal_y, objective })
}

/// Run the solver on precomputed inputs. `inputs.tau` takes precedence over
/// `config.tau`; they must agree.
pub fn solve_with_inputs<T: Real>(inputs: &SolverInputs<T>, config: &AdmmConfig<T>) -> Result<Solution<T>> {
    config.validate()?;
    if inputs.tau != config.tau {
        return Err(Error::Config(format!(
            "inputs were prepared for tau={} but config has tau={}",
            inputs.tau, config.tau
        )));
    }
    let mut state = init_state(inputs.elements(), inputs.measurements())?;
    let mut trace = ResidualTrace::default();
    for _ in 0..config.max_iters {
        let res = step(&mut state, inputs, config)?;
        if config.record_residuals {
            trace.push(res.primal_z, res.primal_y, res.objective);
        }
        if let Some(tol) = config.stop_tolerance {
            if res.primal_z < tol && res.primal_y < tol {
                break;
            }
        }
    }
    Ok(Solution { x: state.x.clone(), q: state.q, trace, state })
}

/// Recover the sparse aperture signal `x` and interference amplitude `q` from `r ≈ Gx + cq`.
pub fn solve<T: Real>(r: &[Complex<T>], g: &Matrix<T>, c: &[Complex<T>], config: &AdmmConfig<T>) -> Result<Solution<T>> {
    config.validate()?;
    let inputs = SolverInputs::new(r.to_vec(), g.clone(), c.to_vec(), config.tau)?;
    solve_with_inputs(&inputs, config)
}
