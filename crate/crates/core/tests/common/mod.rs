//! Shared helpers for the integration tests: random problem instances, the
//! augmented Lagrangian and its block gradients written out independently of
//! the solver, and conversions to nalgebra for oracle checks.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ris_admm::admm::{AdmmState, SolverInputs};
use ris_admm::numerics::{CVector, Matrix};

pub type C = Complex64;
pub type M64 = Matrix<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss<R: Rng>(rng: &mut R) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(re, im)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> CVector<f64> {
    (0..n).map(|_| cgauss(rng)).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> M64 {
    Matrix::from_fn(rows, cols, |_, _| cgauss(rng))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> M64 {
    let a = random_matrix(rng, n, n);
    Matrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize) -> M64 {
    let b = random_matrix(rng, n, rank);
    b.matmul(&b.adjoint()).unwrap().hermitized()
}

pub fn random_phases<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> M64 {
    Matrix::from_fn(rows, cols, |_, _| C::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
}

/// Random inputs and a random (non-zero) state of the right shapes.
pub fn random_instance(seed: u64, m: usize, n: usize, tau: f64) -> (SolverInputs<f64>, AdmmState<f64>) {
    let mut r = rng(seed);
    let g = random_phases(&mut r, n, m);
    let c = random_phases(&mut r, n, 1).column(0);
    let data = random_vector(&mut r, n);
    let inputs = SolverInputs::new(data, g, c, tau).unwrap();
    let mut s = AdmmState::zeros(m, n).unwrap();
    s.x = random_vector(&mut r, m);
    s.q = cgauss(&mut r);
    s.u = random_vector(&mut r, m);
    s.u[0] = C::new(s.u[0].re.abs() + 1.0, 0.0);
    s.t = r.random::<f64>() + 0.5;
    s.z = random_vector(&mut r, n);
    s.y = random_psd(&mut r, m + 1, 3);
    s.p = random_hermitian(&mut r, m + 1);
    s.w_dual = random_vector(&mut r, n);
    (inputs, s)
}

fn rdot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `Q = [[Toep(u), x], [xᴴ, t]]` filled entry by entry from the definition.
pub fn brute_q(u: &[C], x: &[C], t: f64) -> M64 {
    let m = u.len();
    Matrix::from_fn(m + 1, m + 1, |i, j| {
        if i < m && j < m {
            if i >= j {
                if i == j {
                    C::new(u[0].re, 0.0)
                } else {
                    u[i - j]
                }
            } else {
                u[j - i].conj()
            }
        } else if i < m {
            x[i]
        } else if j < m {
            x[j].conj()
        } else {
            C::new(t, 0.0)
        }
    })
}

/// `Gx + cq`.
pub fn fit(inp: &SolverInputs<f64>, s: &AdmmState<f64>) -> CVector<f64> {
    let gx = inp.g.mul_vec(&s.x).unwrap();
    gx.iter().zip(&inp.c).map(|(a, c)| a + c * s.q).collect()
}

/// Augmented Lagrangian
/// `‖r−z‖² + ρ/2(u₀+t) + Re⟨P, Y−Q⟩ + Re⟨Gx+cq−z, w⟩ + τ‖Y−Q‖² + τ‖Gx+cq−z‖²`.
pub fn lagrangian(inp: &SolverInputs<f64>, s: &AdmmState<f64>, rho: f64) -> f64 {
    let tau = inp.tau;
    let q = brute_q(&s.u, &s.x, s.t);
    let f = fit(inp, s);
    let gap: CVector<f64> = f.iter().zip(&s.z).map(|(a, b)| a - b).collect();
    let data: f64 = inp.r.iter().zip(&s.z).map(|(r, z)| (r - z).norm_sqr()).sum();
    let d = s.y.sub(&q).unwrap();
    let inner_p: f64 = s.p.as_slice().iter().zip(d.as_slice()).map(|(p, d)| (p.conj() * d).re).sum();
    let inner_w = rdot(&s.w_dual, &gap).re;
    data + 0.5 * rho * (s.u[0].re + s.t)
        + inner_p
        + inner_w
        + tau * d.frobenius_norm().powi(2)
        + tau * gap.iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// `∂L/∂q̄ = ½cᴴw + τcᴴ(Gx + cq − z)`.
pub fn grad_q(inp: &SolverInputs<f64>, s: &AdmmState<f64>) -> C {
    let gap: CVector<f64> = fit(inp, s).iter().zip(&s.z).map(|(a, b)| a - b).collect();
    rdot(&inp.c, &s.w_dual) * 0.5 + rdot(&inp.c, &gap) * inp.tau
}

/// `∂L/∂x̄ = ½Gᴴw + τGᴴ(Gx + cq − z) + 2τ(x − y₂) − p₂`.
pub fn grad_x(inp: &SolverInputs<f64>, s: &AdmmState<f64>) -> CVector<f64> {
    let tau = inp.tau;
    let m = s.x.len();
    let gap: CVector<f64> = fit(inp, s).iter().zip(&s.z).map(|(a, b)| a - b).collect();
    let a = inp.g.adjoint_mul_vec(&s.w_dual).unwrap();
    let b = inp.g.adjoint_mul_vec(&gap).unwrap();
    (0..m).map(|i| a[i] * 0.5 + b[i] * tau + (s.x[i] - s.y[(i, m)]) * (2.0 * tau) - s.p[(i, m)]).collect()
}

fn brute_offset_trace(a: &M64, m: usize) -> C {
    (0..a.rows() - m).map(|i| a[(i + m, i)]).sum()
}

/// Gradient in `u`: entry 0 is the real derivative in `u₀`,
/// `ρ/2 − Tr P₁ + 2τ(M·u₀ − Tr Y₁)`; entries `m ≥ 1` are `∂L/∂ū_m`,
/// `−Tr(P₁,m) + 2τ((M−m)u_m − Tr(Y₁,m))`.
pub fn grad_u(s: &AdmmState<f64>, tau: f64, rho: f64) -> CVector<f64> {
    let m = s.u.len();
    let (p1, y1) = (s.p.block(0, 0, m, m), s.y.block(0, 0, m, m));
    (0..m)
        .map(|k| {
            let (tp, ty) = (brute_offset_trace(&p1, k), brute_offset_trace(&y1, k));
            if k == 0 {
                C::new(0.5 * rho - tp.re + 2.0 * tau * (m as f64 * s.u[0].re - ty.re), 0.0)
            } else {
                -tp + (s.u[k] * (m - k) as f64 - ty) * (2.0 * tau)
            }
        })
        .collect()
}

/// `∂L/∂t = ρ/2 − p₃ + 2τ(t − y₃)`.
pub fn grad_t(s: &AdmmState<f64>, tau: f64, rho: f64) -> f64 {
    let m = s.x.len();
    0.5 * rho - s.p[(m, m)].re + 2.0 * tau * (s.t - s.y[(m, m)].re)
}

/// `∂L/∂z̄ = z − r − ½w − τ(Gx + cq) + τz`.
pub fn grad_z(inp: &SolverInputs<f64>, s: &AdmmState<f64>) -> CVector<f64> {
    let tau = inp.tau;
    let f = fit(inp, s);
    (0..s.z.len()).map(|i| s.z[i] - inp.r[i] - s.w_dual[i] * 0.5 - f[i] * tau + s.z[i] * tau).collect()
}

/// Gradient of `L` in `Y` (unconstrained): `P + 2τ(Y − Q)`.
pub fn grad_y(s: &AdmmState<f64>, q: &M64, tau: f64) -> M64 {
    s.p.add(&s.y.sub(q).unwrap().scaled(2.0 * tau)).unwrap()
}

pub fn vnorm(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_na(a: &M64) -> DMatrix<C> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn from_na(a: &DMatrix<C>) -> M64 {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Nearest PSD matrix by nalgebra's Hermitian eigensolver and clamping.
pub fn na_project_psd(a: &M64) -> M64 {
    let eig = nalgebra::SymmetricEigen::new(to_na(&a.hermitized()));
    let lam = eig.eigenvalues.map(|v| v.max(0.0));
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&lam.map(|x| C::new(x, 0.0)));
    from_na(&(v * d * v.adjoint()))
}

pub fn na_min_eigenvalue(a: &M64) -> f64 {
    nalgebra::SymmetricEigen::new(to_na(&a.hermitized())).eigenvalues.min()
}
