//! Continuous-limit master equation on the three-level system.
//!
//! Density matrices are vectorized by column stacking,
//! `vec(A X B) = (B^T ⊗ A) vec(X)`, which coincides with the column-major
//! storage of `CMatrix`.

use crate::linalg::{
    c, dagger, eigh, from_real_diagonal, hermitian_part, hermiticity_deviation, identity, inf_norm,
    ket_bra, kron, max_abs, null_vector, trace, CMatrix,
};
use crate::model::{rates_unchecked, system_hamiltonian, Bath, MachineParams, SYSTEM_DIM};
use crate::{Error, Result};

/// Eigenvalues of a steady state down to this value are treated as roundoff.
pub const NESS_CLIP: f64 = 1e-12;

const STATE_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&m);
        if deviation > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian ({deviation:.3e})"
            )));
        }
        let tr = trace(&m);
        if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let (values, _) = eigh(&m)?;
        if values[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        DensityMatrix(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(identity(dim) * c(1.0 / dim as f64, 0.0))
    }

    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        Self::new(from_real_diagonal(populations))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Zero-based entry `<j|rho|k>`.
    pub fn entry(&self, j: usize, k: usize) -> num_complex::Complex64 {
        self.0[(j, k)]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CMatrix {
    CMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

pub fn unvectorize(v: &CMatrix, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Linear map on vectorized `n x n` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator(pub CMatrix);

impl Superoperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// Dimension `n` of the matrices it acts on.
    pub fn dim(&self) -> usize {
        (self.0.nrows() as f64).sqrt().round() as usize
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        unvectorize(&(&self.0 * vectorize(rho)), self.dim())
    }

    /// `X -> A X B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        Superoperator(kron(&b.transpose(), a))
    }

    /// `X -> -i [H, X]`.
    pub fn commutator(h: &CMatrix) -> Self {
        let id = identity(h.nrows());
        let m = (kron(&id, h) - kron(&h.transpose(), &id)) * c(0.0, -1.0);
        Superoperator(m)
    }

    /// `X -> A X A† - {A†A, X} / 2`.
    pub fn dissipator(a: &CMatrix) -> Self {
        let id = identity(a.nrows());
        let ada = dagger(a) * a;
        let m = kron(&a.conjugate(), a)
            - kron(&id, &ada) * c(0.5, 0.0)
            - kron(&ada.transpose(), &id) * c(0.5, 0.0);
        Superoperator(m)
    }
}

/// Coherent correction `G_S` induced by the coherent units of one bath.
pub fn coherent_drive(p: &MachineParams, bath: Bath) -> CMatrix {
    let rates = rates_unchecked(p);
    let i = bath.index();
    let (lo, hi) = bath.transition();
    let amplitude = p.lambda[i] * rates.coupling[i];
    let phase = c(0.0, p.phi[i]).exp();
    (ket_bra(SYSTEM_DIM, lo, hi) * phase + ket_bra(SYSTEM_DIM, hi, lo) * phase.conj())
        * c(amplitude, 0.0)
}

/// `H_S + Σ G_S`, the Hamiltonian part of the generator.
pub fn effective_hamiltonian(p: &MachineParams) -> CMatrix {
    Bath::ALL
        .iter()
        .fold(system_hamiltonian(p), |h, &b| h + coherent_drive(p, b))
}

/// Jump operators of one bath: `(downward, upward)`, rates included.
pub fn jump_operators(p: &MachineParams, bath: Bath) -> (CMatrix, CMatrix) {
    let rates = rates_unchecked(p);
    let i = bath.index();
    let (lo, hi) = bath.transition();
    (
        ket_bra(SYSTEM_DIM, lo, hi) * c(rates.down[i].sqrt(), 0.0),
        ket_bra(SYSTEM_DIM, hi, lo) * c(rates.up[i].sqrt(), 0.0),
    )
}

/// Dissipator of a single bath as a superoperator.
pub fn bath_dissipator(p: &MachineParams, bath: Bath) -> Superoperator {
    let (down, up) = jump_operators(p, bath);
    Superoperator(Superoperator::dissipator(&down).0 + Superoperator::dissipator(&up).0)
}

pub fn build_liouvillian(p: &MachineParams) -> Result<Superoperator> {
    p.validate()?;
    Ok(liouvillian_unchecked(p))
}

fn liouvillian_unchecked(p: &MachineParams) -> Superoperator {
    let mut l = Superoperator::commutator(&effective_hamiltonian(p)).0;
    for bath in Bath::ALL {
        l += bath_dissipator(p, bath).0;
    }
    Superoperator(l)
}

/// Row vector `vec(I)^T`, the trace functional.
pub fn trace_row(dim: usize) -> CMatrix {
    vectorize(&identity(dim)).transpose()
}

/// Steady state of an arbitrary generator on `n x n` matrices.
pub fn stationary_state(l: &Superoperator) -> Result<DensityMatrix> {
    let dim = l.dim();
    let x = null_vector(l.matrix(), &trace_row(dim))?;
    let rho = hermitian_part(&unvectorize(&x, dim));
    let (values, vectors) = eigh(&rho)?;
    if values[0] < -NESS_CLIP {
        return Err(Error::NegativeSteadyState {
            eigenvalue: values[0],
        });
    }
    if values[0] >= 0.0 {
        return Ok(DensityMatrix::new_unchecked(rho));
    }
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let norm: f64 = clipped.iter().sum();
    let rho = &vectors * from_real_diagonal(&clipped) * vectors.adjoint() * c(1.0 / norm, 0.0);
    Ok(DensityMatrix::new_unchecked(hermitian_part(&rho)))
}

/// Nonequilibrium steady state of the machine.
pub fn solve_ness(p: &MachineParams) -> Result<DensityMatrix> {
    p.validate()?;
    stationary_state(&liouvillian_unchecked(p))
}

/// `‖L ρ‖∞` for a candidate steady state.
pub fn generator_residual(p: &MachineParams, rho: &DensityMatrix) -> f64 {
    max_abs(&liouvillian_unchecked(p).apply(rho.matrix()))
}

/// Generator residual tolerance appropriate for `p`.
pub fn residual_tolerance(p: &MachineParams) -> f64 {
    1e-10 * inf_norm(liouvillian_unchecked(p).matrix()).max(1.0)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &CMatrix {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Fixed-step fourth-order Runge-Kutta integration of the master equation.
///
/// The generator is linear, so one RK4 step is the matrix polynomial
/// `1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24`, assembled once.
pub fn evolve(
    rho0: &DensityMatrix,
    p: &MachineParams,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    p.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", "must be positive"));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::invalid("t_final", "must be non-negative"));
    }
    if rho0.dim() != SYSTEM_DIM {
        return Err(Error::DimensionMismatch(format!(
            "initial state must be {SYSTEM_DIM}x{SYSTEM_DIM}"
        )));
    }
    let l = liouvillian_unchecked(p);
    let step = rk4_propagator(l.matrix(), dt);
    let steps = (t_final / dt).round() as usize;

    let mut x = vectorize(rho0.matrix());
    let trace0 = trace(rho0.matrix());
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(rho0.matrix().clone());
    for k in 1..=steps {
        x = &step * x;
        let rho = unvectorize(&x, SYSTEM_DIM);
        check_drift(&rho, trace0)?;
        times.push(k as f64 * dt);
        states.push(rho);
    }
    Ok(Trajectory { times, states })
}

fn rk4_propagator(l: &CMatrix, dt: f64) -> CMatrix {
    let hl = l * c(dt, 0.0);
    let n = l.nrows();
    let mut term = identity(n);
    let mut total = identity(n);
    for k in 1..=4 {
        term = (&term * &hl) * c(1.0 / k as f64, 0.0);
        total += &term;
    }
    total
}

fn check_drift(rho: &CMatrix, trace0: num_complex::Complex64) -> Result<()> {
    let trace_drift = (trace(rho) - trace0).norm();
    if trace_drift > 1e-10 {
        return Err(Error::IntegrationDrift {
            what: "trace",
            drift: trace_drift,
        });
    }
    let herm = hermiticity_deviation(rho);
    if herm > 1e-10 {
        return Err(Error::IntegrationDrift {
            what: "hermiticity",
            drift: herm,
        });
    }
    // entries of a density matrix are bounded by one
    let excess = max_abs(rho) - 1.0;
    if excess > 1e-8 {
        return Err(Error::IntegrationDrift {
            what: "magnitude",
            drift: excess,
        });
    }
    Ok(())
}
