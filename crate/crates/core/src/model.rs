//! Physical model: machine parameters, Hamiltonians, reservoir unit states
//! and jump rates.
//!
//! Levels are `|0>, |1>, |2>` with energies `0, B1, B2`. Reservoir 1 (cold)
//! drives `|0> <-> |1>`, reservoir 2 (intermediate) `|0> <-> |2>` and
//! reservoir 3 (hot) `|1> <-> |2>`, each resonantly, so `B3 = B2 - B1`.
//!
//! Qubit units use the basis `(|e>, |g>)`, i.e. `sigma_z = diag(1, -1)` and
//! the lowering operator `sigma = (sigma_x - i sigma_y) / 2 = |g><e|`.
//!
//! Rates follow the convention in which a reservoir with rate parameter
//! `gamma` and occupation `n` induces upward jumps at `2 gamma n` and
//! downward jumps at `2 gamma (n + 1)`; the microscopic coupling is
//! `|g|^2 = 2 gamma (2 n + 1)`. With this choice the collisional map, the
//! master equation and the closed-form currents all coincide.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, from_real_diagonal, identity, ket_bra, kron_all, CMatrix};
use crate::{Error, Result};

/// One of the three reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bath {
    Cold,
    Intermediate,
    Hot,
}

impl Bath {
    pub const ALL: [Bath; 3] = [Bath::Cold, Bath::Intermediate, Bath::Hot];

    /// Zero-based index (cold = 0).
    pub fn index(self) -> usize {
        match self {
            Bath::Cold => 0,
            Bath::Intermediate => 1,
            Bath::Hot => 2,
        }
    }

    /// One-based label used in parameter names (`lambda1`, ...).
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Bath> {
        match n {
            1 => Some(Bath::Cold),
            2 => Some(Bath::Intermediate),
            3 => Some(Bath::Hot),
            _ => None,
        }
    }

    /// System levels `(lower, upper)` of the transition this bath drives.
    pub fn transition(self) -> (usize, usize) {
        match self {
            Bath::Cold => (0, 1),
            Bath::Intermediate => (0, 2),
            Bath::Hot => (1, 2),
        }
    }
}

impl fmt::Display for Bath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Full parameterization of the machine and its reservoirs.
///
/// Index `i` of each array refers to reservoir `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    pub b1: f64,
    pub b2: f64,
    pub temperature: [f64; 3],
    pub gamma: [f64; 3],
    pub lambda: [f64; 3],
    pub phi: [f64; 3],
    /// Collision duration; only used by the collisional picture.
    pub tau: f64,
}

pub const DEFAULT_TAU: f64 = 1e-3;

/// Coupling rates shared by every figure-scale parameter set.
pub const FIGURE_GAMMAS: [f64; 3] = [8.7e-3, 5.7e-3, 7.5e-3];

impl MachineParams {
    /// Thermal machine (no coherence) with the default collision time.
    pub fn thermal(b1: f64, b2: f64, temperature: [f64; 3], gamma: [f64; 3]) -> Self {
        MachineParams {
            b1,
            b2,
            temperature,
            gamma,
            lambda: [0.0; 3],
            phi: [0.0; 3],
            tau: DEFAULT_TAU,
        }
    }

    pub fn with_coherence(mut self, bath: Bath, lambda: f64, phi: f64) -> Self {
        self.lambda[bath.index()] = lambda;
        self.phi[bath.index()] = phi;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn b3(&self) -> f64 {
        self.b2 - self.b1
    }

    /// Unit energy spacings `[B1, B2, B3]`.
    pub fn spacings(&self) -> [f64; 3] {
        [self.b1, self.b2, self.b3()]
    }

    pub fn beta(&self) -> [f64; 3] {
        self.temperature.map(|t| 1.0 / t)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite"))
            }
        };
        finite("B1", self.b1)?;
        finite("B2", self.b2)?;
        if !(self.b1 > 0.0) {
            return Err(Error::invalid(
                "B1",
                format!("must be positive, got {}", self.b1),
            ));
        }
        if !(self.b2 > self.b1) {
            return Err(Error::invalid(
                "B2",
                format!("must exceed B1 = {} (got {})", self.b1, self.b2),
            ));
        }
        const T_NAMES: [&str; 3] = ["T1", "T2", "T3"];
        const G_NAMES: [&str; 3] = ["gamma1", "gamma2", "gamma3"];
        const L_NAMES: [&str; 3] = ["lambda1", "lambda2", "lambda3"];
        const P_NAMES: [&str; 3] = ["phi1", "phi2", "phi3"];
        for i in 0..3 {
            finite(T_NAMES[i], self.temperature[i])?;
            if !(self.temperature[i] > 0.0) {
                return Err(Error::invalid(T_NAMES[i], "must be positive"));
            }
            finite(G_NAMES[i], self.gamma[i])?;
            if !(self.gamma[i] > 0.0) {
                return Err(Error::invalid(G_NAMES[i], "must be positive"));
            }
            finite(L_NAMES[i], self.lambda[i])?;
            if self.lambda[i] < 0.0 {
                return Err(Error::invalid(L_NAMES[i], "must be non-negative"));
            }
            if !(0.0..TAU).contains(&self.phi[i]) {
                return Err(Error::invalid(P_NAMES[i], "must lie in [0, 2π)"));
            }
        }
        let [t1, t2, t3] = self.temperature;
        if !(t1 < t2 && t2 < t3) {
            return Err(Error::invalid(
                "T2",
                format!("temperatures must satisfy T1 < T2 < T3, got {t1}, {t2}, {t3}"),
            ));
        }
        finite("tau", self.tau)?;
        if !(self.tau > 0.0) {
            return Err(Error::invalid("tau", "must be positive"));
        }
        Ok(())
    }
}

/// Bose occupation `1 / (exp(beta B) - 1)`.
pub fn bose_occupation(spacing: f64, temperature: f64) -> f64 {
    1.0 / (spacing / temperature).exp_m1()
}

/// Occupations, jump rates and couplings for the three reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub occupation: [f64; 3],
    /// Upward (absorption) jump rate, `2 gamma n`.
    pub up: [f64; 3],
    /// Downward (emission) jump rate, `2 gamma (n + 1)`.
    pub down: [f64; 3],
    /// Microscopic coupling `|g| = sqrt(2 gamma (2 n + 1))`.
    pub coupling: [f64; 3],
}

pub fn occupations_and_rates(p: &MachineParams) -> Result<Rates> {
    p.validate()?;
    Ok(rates_unchecked(p))
}

pub(crate) fn rates_unchecked(p: &MachineParams) -> Rates {
    let spacing = p.spacings();
    let occupation: [f64; 3] =
        std::array::from_fn(|i| bose_occupation(spacing[i], p.temperature[i]));
    Rates {
        occupation,
        up: std::array::from_fn(|i| 2.0 * p.gamma[i] * occupation[i]),
        down: std::array::from_fn(|i| 2.0 * p.gamma[i] * (occupation[i] + 1.0)),
        coupling: std::array::from_fn(|i| (2.0 * p.gamma[i] * (2.0 * occupation[i] + 1.0)).sqrt()),
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    from_real_diagonal(&[1.0, -1.0])
}

/// Qubit lowering operator `(sigma_x - i sigma_y) / 2`.
pub fn lowering() -> CMatrix {
    (pauli_x() - pauli_y() * c(0.0, 1.0)) * c(0.5, 0.0)
}

pub const SYSTEM_DIM: usize = 3;
pub const UNIT_DIM: usize = 2;
/// Joint space `system ⊗ unit1 ⊗ unit2 ⊗ unit3`.
pub const JOINT_DIMS: [usize; 4] = [SYSTEM_DIM, UNIT_DIM, UNIT_DIM, UNIT_DIM];
pub const JOINT_DIM: usize = 24;

pub fn system_hamiltonian(p: &MachineParams) -> CMatrix {
    from_real_diagonal(&[0.0, p.b1, p.b2])
}

pub fn unit_hamiltonian(p: &MachineParams, bath: Bath) -> CMatrix {
    pauli_z() * c(0.5 * p.spacings()[bath.index()], 0.0)
}

/// Embeds a system operator and per-unit operators into the joint space.
pub fn embed(system: &CMatrix, units: [Option<&CMatrix>; 3]) -> CMatrix {
    let id2 = identity(UNIT_DIM);
    let u: Vec<&CMatrix> = units.iter().map(|o| o.unwrap_or(&id2)).collect();
    kron_all(&[system, u[0], u[1], u[2]])
}

/// All operators entering one collision window.
#[derive(Debug, Clone)]
pub struct Hamiltonians {
    pub system: CMatrix,
    pub units: [CMatrix; 3],
    /// Interaction terms on the joint space, including the `1/sqrt(tau)` scale.
    pub interactions: [CMatrix; 3],
    /// `H_S + Σ H_R + Σ H_SR` on the joint space.
    pub total: CMatrix,
}

impl Hamiltonians {
    /// Free part `H_S + Σ H_R` on the joint space.
    pub fn free_joint(&self) -> CMatrix {
        free_joint(&self.system, &self.units)
    }
}

fn free_joint(system: &CMatrix, units: &[CMatrix; 3]) -> CMatrix {
    let mut free = embed(system, [None, None, None]);
    for bath in Bath::ALL {
        let mut slots = [None, None, None];
        slots[bath.index()] = Some(&units[bath.index()]);
        free += embed(&identity(SYSTEM_DIM), slots);
    }
    free
}

pub fn hamiltonians(p: &MachineParams) -> Result<Hamiltonians> {
    p.validate()?;
    let rates = rates_unchecked(p);
    let system = system_hamiltonian(p);
    let units = Bath::ALL.map(|b| unit_hamiltonian(p, b));
    let raise = lowering().adjoint();
    let scale = 1.0 / p.tau.sqrt();
    let interactions = Bath::ALL.map(|bath| {
        let (lo, hi) = bath.transition();
        let mut slots = [None, None, None];
        slots[bath.index()] = Some(&raise);
        // system de-excites while the unit is excited
        let exchange = embed(&ket_bra(SYSTEM_DIM, lo, hi), slots);
        (&exchange + exchange.adjoint()) * c(rates.coupling[bath.index()] * scale, 0.0)
    });
    let mut total = free_joint(&system, &units);
    for h in &interactions {
        total += h;
    }
    Ok(Hamiltonians {
        system,
        units,
        interactions,
        total,
    })
}

/// Initial state of every unit drawn from one reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirUnitState {
    pub bath: Bath,
    pub rho: CMatrix,
    /// Excited-state population of the Gibbs part.
    pub excited_population: f64,
    /// `lambda sqrt(tau)`, the modulus of the off-diagonal element.
    pub coherence_amplitude: f64,
}

/// Largest `lambda sqrt(tau)` keeping the unit state positive.
pub fn max_coherence_amplitude(excited_population: f64) -> f64 {
    (excited_population * (1.0 - excited_population)).sqrt()
}

pub fn reservoir_unit_state(p: &MachineParams, bath: Bath) -> Result<ReservoirUnitState> {
    p.validate()?;
    let i = bath.index();
    let x = p.spacings()[i] / p.temperature[i];
    // e^{-x/2} / (e^{x/2} + e^{-x/2}) = 1 / (e^x + 1)
    let excited = 1.0 / (x.exp() + 1.0);
    let ground = 1.0 - excited;
    let amplitude = p.lambda[i] * p.tau.sqrt();
    let max_amplitude = max_coherence_amplitude(excited);
    if amplitude > max_amplitude {
        return Err(Error::UnitStateNotPositive {
            bath,
            amplitude,
            max_amplitude,
        });
    }
    let (s, co) = p.phi[i].sin_cos();
    let chi = pauli_x() * c(co, 0.0) + pauli_y() * c(s, 0.0);
    let rho = from_real_diagonal(&[excited, ground]) + chi * c(amplitude, 0.0);
    Ok(ReservoirUnitState {
        bath,
        rho,
        excited_population: excited,
        coherence_amplitude: amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, eigh, hermiticity_deviation, max_abs, trace};

    pub(crate) fn fig2a() -> MachineParams {
        MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS)
    }

    #[test]
    fn bose_function_at_unit_ratio() {
        let n = bose_occupation(1.0, 1.0);
        assert!((n - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((n - 0.581977).abs() < 1e-6);
    }

    #[test]
    fn zero_temperature_limit() {
        let p = MachineParams::thermal(200.0, 500.0, [1.0, 2.0, 3.0], [0.1, 0.2, 0.3]);
        let r = occupations_and_rates(&p).unwrap();
        for i in 0..3 {
            assert!(r.occupation[i] < 1e-28);
            assert!(r.up[i] < 1e-28);
            assert!((r.down[i] - 2.0 * p.gamma[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn detailed_balance() {
        let p = fig2a();
        let r = occupations_and_rates(&p).unwrap();
        for i in 0..3 {
            let ratio = r.up[i] / r.down[i];
            let expected = (-p.spacings()[i] / p.temperature[i]).exp();
            assert!((ratio - expected).abs() < 1e-14 * expected.max(1e-300));
        }
    }

    #[test]
    fn validation_rejects_bad_orderings() {
        let p = fig2a();
        let mut q = p;
        q.b2 = 0.4;
        assert!(matches!(
            q.validate(),
            Err(Error::InvalidParameter { name: "B2", .. })
        ));
        let mut q = p;
        q.temperature = [1.0, 10.0, 6.0];
        assert!(q.validate().is_err());
        let mut q = p;
        q.gamma[1] = 0.0;
        assert!(q.validate().is_err());
        let mut q = p;
        q.lambda[2] = -0.1;
        assert!(q.validate().is_err());
        let mut q = p;
        q.phi[0] = 7.0;
        assert!(q.validate().is_err());
        let mut q = p;
        q.tau = 0.0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn system_spectrum() {
        let p = fig2a();
        let (values, _) = eigh(&system_hamiltonian(&p)).unwrap();
        assert_eq!(values, vec![0.0, 0.5, 12.0]);
    }

    #[test]
    fn hamiltonians_are_hermitian_and_conserve_free_energy() {
        let p = fig2a().with_coherence(Bath::Hot, 0.3, 1.0).with_tau(1e-2);
        let h = hamiltonians(&p).unwrap();
        let free = h.free_joint();
        for m in h.interactions.iter().chain([&h.total, &free]) {
            assert!(hermiticity_deviation(m) < 1e-13);
        }
        let interaction_sum = h
            .interactions
            .iter()
            .fold(CMatrix::zeros(24, 24), |a, b| a + b);
        let scale = max_abs(&h.total);
        assert!(max_abs(&commutator(&(&h.total - interaction_sum), &free)) <= 1e-12 * scale);
        assert!(max_abs(&commutator(&h.total, &free)) <= 1e-12 * scale);
    }

    #[test]
    fn cold_interaction_exchanges_a_single_excitation() {
        let p = fig2a().with_tau(0.04);
        let h = hamiltonians(&p).unwrap();
        let g1 = occupations_and_rates(&p).unwrap().coupling[0];
        // joint index = s * 8 + u1 * 4 + u2 * 2 + u3, unit basis (e, g)
        let input = 8 + 4 + 2 + 1; // |1> ⊗ |g>|g>|g>
        let out = h.interactions[0].column(input).into_owned();
        let target = 2 + 1; // |0> ⊗ |e>|g>|g>
                            // explicit matrix-vector oracle: only one nonzero amplitude
        for (k, z) in out.iter().enumerate() {
            if k == target {
                assert!((z.re - g1 / p.tau.sqrt()).abs() < 1e-12 && z.im.abs() < 1e-15);
            } else {
                assert_eq!(z.norm(), 0.0);
            }
        }
    }

    #[test]
    fn thermal_unit_state_is_gibbs() {
        let p = fig2a();
        let rates = occupations_and_rates(&p).unwrap();
        for bath in Bath::ALL {
            let s = reservoir_unit_state(&p, bath).unwrap();
            assert_eq!(s.rho[(0, 1)].norm(), 0.0);
            assert_eq!(s.rho[(1, 0)].norm(), 0.0);
            let n = rates.occupation[bath.index()];
            assert!((s.excited_population - n / (2.0 * n + 1.0)).abs() < 1e-15);
            assert!((trace(&s.rho).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_state_positivity_boundary() {
        let base = fig2a().with_tau(1e-2);
        let excited = reservoir_unit_state(&base, Bath::Cold)
            .unwrap()
            .excited_population;
        let max_lambda = max_coherence_amplitude(excited) / base.tau.sqrt();

        let at = base.with_coherence(Bath::Cold, max_lambda * (1.0 - 1e-12), 0.3);
        let s = reservoir_unit_state(&at, Bath::Cold).unwrap();
        let (values, _) = eigh(&s.rho).unwrap();
        assert!(values[0].abs() < 1e-11);

        let beyond = base.with_coherence(Bath::Cold, max_lambda * 1.001, 0.3);
        match reservoir_unit_state(&beyond, Bath::Cold) {
            Err(Error::UnitStateNotPositive { max_amplitude, .. }) => {
                assert!((max_amplitude - max_lambda * base.tau.sqrt()).abs() < 1e-14)
            }
            other => panic!("expected positivity error, got {other:?}"),
        }
    }
}
