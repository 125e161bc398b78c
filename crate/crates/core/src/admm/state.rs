use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{norm_sqr, regularized_gram_inverse, scale, CVector, Matrix};
use crate::scalar::{czero, Real};

/// Primal and dual iterates.
///
/// `y` and `p` are `(M+1)×(M+1)` and partition as `[[Y₁, y₂], [y₂ᴴ, y₃]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T: Real> {
    pub x: CVector<T>,
    pub q: Complex<T>,
    pub u: CVector<T>,
    pub t: T,
    pub z: CVector<T>,
    pub y: Matrix<T>,
    pub p: Matrix<T>,
    pub w_dual: CVector<T>,
    pub iter: usize,
}

impl<T: Real> AdmmState<T> {
    /// All-zero state for `M` elements and `N` measurements.
    pub fn zeros(elements: usize, measurements: usize) -> Result<Self> {
        if elements == 0 || measurements == 0 {
            return Err(Error::Dimension(format!(
                "state needs M, N >= 1, got M={elements}, N={measurements}"
            )));
        }
        Ok(Self {
            x: vec![czero(); elements],
            q: czero(),
            u: vec![czero(); elements],
            t: T::zero(),
            z: vec![czero(); measurements],
            y: Matrix::zeros(elements + 1, elements + 1),
            p: Matrix::zeros(elements + 1, elements + 1),
            w_dual: vec![czero(); measurements],
            iter: 0,
        })
    }

    pub fn elements(&self) -> usize {
        self.x.len()
    }

    pub fn measurements(&self) -> usize {
        self.z.len()
    }

    pub fn y1(&self) -> Matrix<T> {
        let m = self.elements();
        self.y.block(0, 0, m, m)
    }

    pub fn y2(&self) -> CVector<T> {
        let m = self.elements();
        (0..m).map(|i| self.y[(i, m)]).collect()
    }

    pub fn y3(&self) -> T {
        let m = self.elements();
        self.y[(m, m)].re
    }

    pub fn p1(&self) -> Matrix<T> {
        let m = self.elements();
        self.p.block(0, 0, m, m)
    }

    pub fn p2(&self) -> CVector<T> {
        let m = self.elements();
        (0..m).map(|i| self.p[(i, m)]).collect()
    }

    pub fn p3(&self) -> T {
        let m = self.elements();
        self.p[(m, m)].re
    }

    pub fn is_finite(&self) -> bool {
        let vecs = [&self.x, &self.u, &self.z, &self.w_dual];
        vecs.iter().all(|v| crate::numerics::all_finite(v))
            && self.q.re.is_finite()
            && self.q.im.is_finite()
            && self.t.is_finite()
            && self.y.is_finite()
            && self.p.is_finite()
    }
}

/// `init_state(M, N)`: the all-zero starting point.
pub fn init_state<T: Real>(elements: usize, measurements: usize) -> Result<AdmmState<T>> {
    AdmmState::zeros(elements, measurements)
}

/// Problem data plus the two quantities precomputed once per solve.
#[derive(Debug, Clone)]
pub struct SolverInputs<T: Real> {
    pub r: CVector<T>,
    pub g: Matrix<T>,
    pub c: CVector<T>,
    pub tau: T,
    /// `c / (τ‖c‖²)`.
    pub c_prime: CVector<T>,
    /// `(τGᴴG + 2τI)⁻¹`.
    pub g_prime: Matrix<T>,
}

impl<T: Real> SolverInputs<T> {
    pub fn new(r: CVector<T>, g: Matrix<T>, c: CVector<T>, tau: T) -> Result<Self> {
        let n = g.rows();
        if g.cols() == 0 || n == 0 {
            return Err(Error::Dimension("G must be non-empty".into()));
        }
        if r.len() != n || c.len() != n {
            return Err(Error::Dimension(format!(
                "G is {}x{} but r has {} and c has {} entries",
                n,
                g.cols(),
                r.len(),
                c.len()
            )));
        }
        if !(tau > T::zero() && tau.is_finite()) {
            return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
        }
        if !crate::numerics::all_finite(&r) || !crate::numerics::all_finite(&c) || !g.is_finite() {
            return Err(Error::Numerical("non-finite solver input".into()));
        }
        let cc = norm_sqr(&c);
        if cc <= T::zero() {
            return Err(Error::Domain("interference signature c is zero".into()));
        }
        let c_prime = scale(&c, Complex::new(T::one() / (tau * cc), T::zero()));
        let g_prime = regularized_gram_inverse(&g, tau)?;
        Ok(Self { r, g, c, tau, c_prime, g_prime })
    }

    pub fn elements(&self) -> usize {
        self.g.cols()
    }

    pub fn measurements(&self) -> usize {
        self.g.rows()
    }
}

/// Per-iteration residuals and objective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResidualTrace<T: Real> {
    /// `‖Gx + cq − z‖₂`.
    pub primal_z: Vec<T>,
    /// `‖Y − Q‖_F`.
    pub primal_y: Vec<T>,
    /// `‖r − z‖² + (ρ/2)(u₀ + t)`.
    pub objective: Vec<T>,
}

impl<T: Real> ResidualTrace<T> {
    pub fn len(&self) -> usize {
        self.primal_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primal_z.is_empty()
    }

    pub fn push(&mut self, primal_z: T, primal_y: T, objective: T) {
        self.primal_z.push(primal_z);
        self.primal_y.push(primal_y);
        self.objective.push(objective);
    }

    pub fn is_finite(&self) -> bool {
        self.primal_z
            .iter()
            .chain(&self.primal_y)
            .chain(&self.objective)
            .all(|v| v.is_finite())
    }
}
