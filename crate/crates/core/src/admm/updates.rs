//! Closed-form block updates, one function per block.
//!
//! Each function reads the current state and returns the new block without
//! mutating anything; `solve` applies them in Gauss–Seidel order.

use num_complex::Complex;

use super::config::DiagonalRule;
use super::state::{AdmmState, SolverInputs};
use crate::error::{Error, Result};
use crate::numerics::{dot, offset_trace, project_psd, toeplitz_hermitian, CVector, Matrix};
use crate::scalar::{creal, Real};

/// `Gx + cq` for the state's current `x` and `q`.
pub fn model_output<T: Real>(state: &AdmmState<T>, inputs: &SolverInputs<T>) -> Result<CVector<T>> {
    let mut out = inputs.g.mul_vec(&state.x)?;
    for (o, c) in out.iter_mut().zip(&inputs.c) {
        *o += *c * state.q;
    }
    Ok(out)
}

/// `q = c′ᴴ(τz − ½w − τGx)`.
pub fn update_q<T: Real>(state: &AdmmState<T>, inputs: &SolverInputs<T>) -> Result<Complex<T>> {
    let tau = inputs.tau;
    let gx = inputs.g.mul_vec(&state.x)?;
    let half = T::lit(0.5);
    let v: CVector<T> = state
        .z
        .iter()
        .zip(&state.w_dual)
        .zip(&gx)
        .map(|((z, w), g)| *z * tau - *w * half - *g * tau)
        .collect();
    Ok(dot(&inputs.c_prime, &v))
}

/// `x = G′[2τy₂ + p₂ + Gᴴ(τz − ½w − τqc)]`.
pub fn update_x<T: Real>(state: &AdmmState<T>, inputs: &SolverInputs<T>) -> Result<CVector<T>> {
    let tau = inputs.tau;
    let half = T::lit(0.5);
    let inner: CVector<T> = state
        .z
        .iter()
        .zip(&state.w_dual)
        .zip(&inputs.c)
        .map(|((z, w), c)| *z * tau - *w * half - *c * state.q * tau)
        .collect();
    let mut rhs = inputs.g.adjoint_mul_vec(&inner)?;
    let m = state.elements();
    let two_tau = T::lit(2.0) * tau;
    for (i, v) in rhs.iter_mut().enumerate() {
        *v += state.y[(i, m)] * two_tau + state.p[(i, m)];
    }
    inputs.g_prime.mul_vec(&rhs)
}

/// Toeplitz generator update from the `(0..M)` offset traces of `P₁` and `Y₁`.
///
/// For `m ≥ 1`: `u_m = (Tr(P₁,m) + 2τTr(Y₁,m)) / (2τ(M−m))`. The diagonal
/// entry follows `rule` and is always real.
pub fn update_u<T: Real>(state: &AdmmState<T>, tau: T, rho: T, rule: DiagonalRule) -> Result<CVector<T>> {
    let m = state.elements();
    let (p1, y1) = (state.p1(), state.y1());
    let two_tau = T::lit(2.0) * tau;
    let mut u = Vec::with_capacity(m);
    for k in 0..m {
        let (tp, ty) = (offset_trace(&p1, k)?, offset_trace(&y1, k)?);
        let denom = two_tau * T::from_count(m - k);
        if k == 0 {
            let num = match rule {
                DiagonalRule::Stationary => tp.re + two_tau * ty.re - T::lit(0.5) * rho,
                DiagonalRule::Published => tp.re - rho,
            };
            u.push(creal(num / denom));
        } else {
            u.push((tp + ty * two_tau) / denom);
        }
    }
    Ok(u)
}

/// `t = y₃ + p₃/(2τ) − ρ/(4τ)`.
pub fn update_t<T: Real>(state: &AdmmState<T>, tau: T, rho: T) -> T {
    state.y3() + state.p3() / (T::lit(2.0) * tau) - rho / (T::lit(4.0) * tau)
}

/// `Q = [[Toep(u), x], [xᴴ, t]]`.
pub fn assemble_q<T: Real>(u: &[Complex<T>], x: &[Complex<T>], t: T) -> Result<Matrix<T>> {
    let m = u.len();
    if x.len() != m {
        return Err(Error::Dimension(format!("u has {m} entries but x has {}", x.len())));
    }
    let toep = toeplitz_hermitian(u)?;
    let mut q = Matrix::zeros(m + 1, m + 1);
    for i in 0..m {
        q.row_mut(i)[..m].copy_from_slice(toep.row(i));
        q[(i, m)] = x[i];
        q[(m, i)] = x[i].conj();
    }
    q[(m, m)] = creal(t);
    Ok(q)
}

/// `Q` from the state's current `u`, `x`, `t`.
pub fn current_q<T: Real>(state: &AdmmState<T>) -> Result<Matrix<T>> {
    assemble_q(&state.u, &state.x, state.t)
}

/// `z = (r + ½w + τ(Gx + cq)) / (1 + τ)`.
pub fn update_z<T: Real>(state: &AdmmState<T>, inputs: &SolverInputs<T>) -> Result<CVector<T>> {
    let tau = inputs.tau;
    let fit = model_output(state, inputs)?;
    let scale = T::one() / (T::one() + tau);
    let half = T::lit(0.5);
    Ok(inputs
        .r
        .iter()
        .zip(&state.w_dual)
        .zip(&fit)
        .map(|((r, w), f)| (*r + *w * half + *f * tau) * scale)
        .collect())
}

/// `Y = Π_PSD(Q − P/(2τ))`.
pub fn update_y<T: Real>(q: &Matrix<T>, p: &Matrix<T>, tau: T) -> Result<Matrix<T>> {
    let shifted = q.sub(&p.scaled(T::one() / (T::lit(2.0) * tau)))?;
    project_psd(&shifted)
}

/// `P + s(Y − Q)` (re-Hermitized) and `w + ½s(Gx + cq − z)`.
pub fn update_duals<T: Real>(
    state: &AdmmState<T>,
    q: &Matrix<T>,
    inputs: &SolverInputs<T>,
    step: T,
) -> Result<(Matrix<T>, CVector<T>)> {
    let p = state.p.add(&state.y.sub(q)?.scaled(step))?.hermitized();
    let fit = model_output(state, inputs)?;
    let half_step = T::lit(0.5) * step;
    let w = state
        .w_dual
        .iter()
        .zip(&fit)
        .zip(&state.z)
        .map(|((w, f), z)| *w + (*f - *z) * half_step)
        .collect();
    Ok((p, w))
}
