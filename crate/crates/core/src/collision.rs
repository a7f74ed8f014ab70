//! Exact repeated-interaction dynamics on the joint space
//! `system ⊗ unit1 ⊗ unit2 ⊗ unit3` (dimension 24).
//!
//! Every collision couples the system to one fresh unit from each reservoir
//! for a time `tau` through `U = exp(-i H tau)`. Heat is identified with the
//! entropy exchanged with the units, `Q_i = T_i Tr[Δρ_R ln ρ_R]`, and the
//! remainder of the unit energy change is coherent work,
//! `W_i = -ΔE_R - Q_i`, exactly at finite `tau`.

use serde::Serialize;

use crate::linalg::{
    c, dagger, eigh, hermitian_part, identity, ket_bra, kron, kron_all, matrix_exp, matrix_log_psd,
    max_abs, trace, CMatrix, EIGEN_FLOOR, EXP_TOL,
};
use crate::lindblad::{build_liouvillian, stationary_state, DensityMatrix, Superoperator};
use crate::model::{
    hamiltonians, reservoir_unit_state, Bath, Hamiltonians, MachineParams, ReservoirUnitState,
    JOINT_DIMS, SYSTEM_DIM,
};
use crate::{Error, Result};

/// `‖ρ(t + tau) - ρ(t)‖∞` below which a trajectory counts as stationary.
pub const STEADY_TOL: f64 = 1e-12;

/// Accepted interval for the ratio of generator discrepancies at `tau` and
/// `tau / 2`.
pub const HALVING_RATIO: (f64, f64) = (1.8, 2.2);

/// Von Neumann entropy `-Tr ρ ln ρ` (natural log).
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let (values, _) = eigh(&hermitian_part(rho))?;
    Ok(values
        .into_iter()
        .filter(|&p| p > EIGEN_FLOOR)
        .map(|p| -p * p.ln())
        .sum())
}

/// `S(ρ‖σ) = Tr ρ (ln ρ - ln σ)`.
pub fn relative_entropy(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let log_sigma = matrix_log_psd(&hermitian_part(sigma), EIGEN_FLOOR)?;
    Ok(-von_neumann_entropy(rho)? - trace(&(rho * log_sigma)).re)
}

/// Relative entropy of coherence `S(diag ρ) - S(ρ)` in the computational
/// (energy) basis.
pub fn coherence(rho: &CMatrix) -> Result<f64> {
    let diag: f64 = (0..rho.nrows())
        .map(|k| rho[(k, k)].re)
        .filter(|&p| p > EIGEN_FLOOR)
        .map(|p| -p * p.ln())
        .sum();
    Ok(diag - von_neumann_entropy(rho)?)
}

/// Reduced operator on factor `keep` of a tensor product with factor
/// dimensions `dims`.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: usize) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(
        m.nrows(),
        total,
        "operator does not match the factor dimensions"
    );
    let d = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer = total / (d * inner);
    let mut out = CMatrix::zeros(d, d);
    for a in 0..outer {
        for b in 0..inner {
            for j in 0..d {
                let row = (a * d + j) * inner + b;
                for k in 0..d {
                    let col = (a * d + k) * inner + b;
                    out[(j, k)] += m[(row, col)];
                }
            }
        }
    }
    out
}

/// Energetic and entropic bookkeeping of one collision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionRecord {
    #[serde(skip)]
    pub rho_before: DensityMatrix,
    #[serde(skip)]
    pub rho_after: DensityMatrix,
    /// Reduced states of the three units after the collision.
    #[serde(skip)]
    pub units_after: [DensityMatrix; 3],
    pub delta_e_sys: f64,
    pub delta_e_units: [f64; 3],
    pub heat: [f64; 3],
    pub work: [f64; 3],
    /// Energy change of the free Hamiltonian, i.e. the switching cost.
    pub w_mec: f64,
    pub delta_s_sys: f64,
    pub delta_s_units: [f64; 3],
    pub relent: [f64; 3],
    pub s_tot: f64,
    pub delta_coherence: [f64; 3],
    /// `ΔC_i + β_i W_i`, which cannot be negative.
    pub coherence_bound: [f64; 3],
    /// Smallest eigenvalue of the joint state after the collision.
    pub joint_min_eigenvalue: f64,
}

impl CollisionRecord {
    /// `ΔE_S - Σ (Q_i + W_i)`.
    pub fn first_law_residual(&self) -> f64 {
        self.delta_e_sys - (0..3).map(|i| self.heat[i] + self.work[i]).sum::<f64>()
    }

    /// `‖ρ(t + tau) - ρ(t)‖∞`.
    pub fn step_change(&self) -> f64 {
        max_abs(&(self.rho_after.matrix() - self.rho_before.matrix()))
    }
}

/// Collision map for fixed parameters, with the unitary and the unit states
/// precomputed.
#[derive(Debug, Clone)]
pub struct Collider {
    params: MachineParams,
    hamiltonians: Hamiltonians,
    unitary: CMatrix,
    unitary_dag: CMatrix,
    /// `U - I`, used to form state changes without cancellation.
    kick: CMatrix,
    units: [ReservoirUnitState; 3],
    environment: CMatrix,
    log_units: [CMatrix; 3],
    unit_entropy: [f64; 3],
    unit_coherence: [f64; 3],
}

impl Collider {
    pub fn new(p: &MachineParams) -> Result<Self> {
        let hamiltonians = hamiltonians(p)?;
        let units = [
            reservoir_unit_state(p, Bath::Cold)?,
            reservoir_unit_state(p, Bath::Intermediate)?,
            reservoir_unit_state(p, Bath::Hot)?,
        ];
        let generator = &hamiltonians.total * c(0.0, -p.tau);
        let unitary = matrix_exp(&generator, EXP_TOL)?;
        let environment = kron_all(&[&units[0].rho, &units[1].rho, &units[2].rho]);
        let mut log_units = Vec::with_capacity(3);
        let mut unit_entropy = [0.0; 3];
        let mut unit_coherence = [0.0; 3];
        for (i, u) in units.iter().enumerate() {
            log_units.push(matrix_log_psd(&u.rho, EIGEN_FLOOR)?);
            unit_entropy[i] = von_neumann_entropy(&u.rho)?;
            unit_coherence[i] = coherence(&u.rho)?;
        }
        Ok(Collider {
            params: *p,
            unitary_dag: dagger(&unitary),
            kick: &unitary - identity(unitary.nrows()),
            unitary,
            hamiltonians,
            units,
            environment,
            log_units: log_units.try_into().expect("three units"),
            unit_entropy,
            unit_coherence,
        })
    }

    pub fn params(&self) -> &MachineParams {
        &self.params
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn unit_states(&self) -> &[ReservoirUnitState; 3] {
        &self.units
    }

    fn joint_after(&self, rho_s: &CMatrix) -> CMatrix {
        &self.unitary * kron(rho_s, &self.environment) * &self.unitary_dag
    }

    /// `U ρ U† - ρ = K ρ K† + K ρ + ρ K†` with `K = U - I`.
    fn joint_change(&self, joint: &CMatrix) -> CMatrix {
        let k_rho = &self.kick * joint;
        let k_dag = dagger(&self.kick);
        hermitian_part(&(&k_rho * &k_dag + &k_rho + joint * k_dag))
    }

    /// System part of the map; linear, so it accepts any `3 x 3` operator.
    pub fn map_system(&self, x: &CMatrix) -> CMatrix {
        partial_trace(&self.joint_after(x), &JOINT_DIMS, 0)
    }

    pub fn collide(&self, rho_s: &DensityMatrix) -> Result<CollisionRecord> {
        let before = rho_s.matrix();
        if before.nrows() != SYSTEM_DIM {
            return Err(Error::DimensionMismatch(format!(
                "system state must be {SYSTEM_DIM}x{SYSTEM_DIM}, got {}x{}",
                before.nrows(),
                before.ncols()
            )));
        }
        let initial = kron(before, &self.environment);
        let change = self.joint_change(&initial);
        let (joint_values, _) = eigh(&(&initial + &change))?;
        let delta_sys = partial_trace(&change, &JOINT_DIMS, 0);
        let after = before + &delta_sys;
        let delta_units: Vec<CMatrix> = (1..=3)
            .map(|k| partial_trace(&change, &JOINT_DIMS, k))
            .collect();
        let units_after: Vec<CMatrix> = (0..3)
            .map(|i| &self.units[i].rho + &delta_units[i])
            .collect();

        let h = &self.hamiltonians;
        let beta = self.params.beta();
        let delta_e_sys = trace(&(&h.system * &delta_sys)).re;
        let s_before = von_neumann_entropy(before)?;
        let delta_s_sys = von_neumann_entropy(&after)? - s_before;

        let mut delta_e_units = [0.0; 3];
        let mut heat = [0.0; 3];
        let mut work = [0.0; 3];
        let mut delta_s_units = [0.0; 3];
        let mut relent = [0.0; 3];
        let mut delta_coherence = [0.0; 3];
        let mut coherence_bound = [0.0; 3];
        for i in 0..3 {
            let delta = &delta_units[i];
            delta_e_units[i] = trace(&(&h.units[i] * delta)).re;
            heat[i] = self.params.temperature[i] * trace(&(delta * &self.log_units[i])).re;
            work[i] = -delta_e_units[i] - heat[i];
            delta_s_units[i] = von_neumann_entropy(&units_after[i])? - self.unit_entropy[i];
            relent[i] = relative_entropy(&units_after[i], &self.units[i].rho)?;
            delta_coherence[i] = coherence(&units_after[i])? - self.unit_coherence[i];
            coherence_bound[i] = delta_coherence[i] + beta[i] * work[i];
        }
        let w_mec = delta_e_sys + delta_e_units.iter().sum::<f64>();
        let s_tot = delta_s_sys + (0..3).map(|i| delta_s_units[i] + relent[i]).sum::<f64>();

        let units_after: Vec<DensityMatrix> = units_after
            .into_iter()
            .map(DensityMatrix::new_unchecked)
            .collect();
        Ok(CollisionRecord {
            rho_before: rho_s.clone(),
            rho_after: DensityMatrix::new_unchecked(after),
            units_after: units_after.try_into().expect("three units"),
            delta_e_sys,
            delta_e_units,
            heat,
            work,
            w_mec,
            delta_s_sys,
            delta_s_units,
            relent,
            s_tot,
            delta_coherence,
            coherence_bound,
            joint_min_eigenvalue: joint_values[0],
        })
    }

    /// Superoperator of one collision on the system, assembled column by
    /// column from the matrix units `|j><k|`.
    pub fn channel(&self) -> Superoperator {
        let n = SYSTEM_DIM;
        let mut m = CMatrix::zeros(n * n, n * n);
        for k in 0..n {
            for j in 0..n {
                let image = self.map_system(&ket_bra(n, j, k));
                let col = j + n * k;
                for (r, v) in image.iter().enumerate() {
                    m[(r, col)] = *v;
                }
            }
        }
        Superoperator(m)
    }

    /// Finite-difference generator `(Φ - I) / tau`.
    pub fn effective_generator(&self) -> Superoperator {
        let n2 = SYSTEM_DIM * SYSTEM_DIM;
        let m = (self.channel().0 - identity(n2)) * c(1.0 / self.params.tau, 0.0);
        Superoperator(m)
    }

    /// Fixed point of the collision map.
    pub fn steady_state(&self) -> Result<DensityMatrix> {
        stationary_state(&self.effective_generator())
    }
}

pub fn collide(rho_s: &DensityMatrix, p: &MachineParams) -> Result<CollisionRecord> {
    Collider::new(p)?.collide(rho_s)
}

/// Result of `n` successive collisions.
#[derive(Debug, Clone)]
pub struct CollisionRun {
    pub records: Vec<CollisionRecord>,
    pub cumulative_heat: [f64; 3],
    pub cumulative_work: [f64; 3],
    /// Index of the first collision whose state change fell below
    /// [`STEADY_TOL`].
    pub steady_after: Option<usize>,
}

impl CollisionRun {
    pub fn final_state(&self) -> &DensityMatrix {
        &self
            .records
            .last()
            .expect("at least one collision")
            .rho_after
    }
}

pub fn run_collisions(rho0: &DensityMatrix, p: &MachineParams, n: usize) -> Result<CollisionRun> {
    if n == 0 {
        return Err(Error::invalid("n", "at least one collision is required"));
    }
    let collider = Collider::new(p)?;
    let mut records = Vec::with_capacity(n);
    let mut cumulative_heat = [0.0; 3];
    let mut cumulative_work = [0.0; 3];
    let mut steady_after = None;
    let mut rho = rho0.clone();
    for k in 0..n {
        let record = collider.collide(&rho)?;
        for i in 0..3 {
            cumulative_heat[i] += record.heat[i];
            cumulative_work[i] += record.work[i];
        }
        if steady_after.is_none() && record.step_change() <= STEADY_TOL {
            steady_after = Some(k);
        }
        rho = record.rho_after.clone();
        records.push(record);
    }
    Ok(CollisionRun {
        records,
        cumulative_heat,
        cumulative_work,
        steady_after,
    })
}

pub fn effective_generator(p: &MachineParams) -> Result<Superoperator> {
    Ok(Collider::new(p)?.effective_generator())
}

/// Per-collision record evaluated at the fixed point of the map.
pub fn steady_collision(p: &MachineParams) -> Result<CollisionRecord> {
    let collider = Collider::new(p)?;
    let rho = collider.steady_state()?;
    collider.collide(&rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorConvergence {
    pub tau: f64,
    /// `max |L_collision(tau) - L|` entrywise.
    pub discrepancy: f64,
    pub discrepancy_half: f64,
    pub ratio: f64,
}

/// Compares the collisional generator at `tau` and `tau / 2` with the
/// master-equation generator; fails when halving the step does not halve
/// the discrepancy.
pub fn generator_convergence(p: &MachineParams) -> Result<GeneratorConvergence> {
    let lindblad = build_liouvillian(p)?;
    let discrepancy = |q: &MachineParams| -> Result<f64> {
        Ok(max_abs(&(effective_generator(q)?.0 - lindblad.matrix())))
    };
    let d1 = discrepancy(p)?;
    let d2 = discrepancy(&p.with_tau(p.tau / 2.0))?;
    let ratio = d1 / d2;
    if !(HALVING_RATIO.0..=HALVING_RATIO.1).contains(&ratio) {
        return Err(Error::NonlinearStep { tau: p.tau, ratio });
    }
    Ok(GeneratorConvergence {
        tau: p.tau,
        discrepancy: d1,
        discrepancy_half: d2,
        ratio,
    })
}
