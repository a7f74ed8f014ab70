//! Steady-state heat currents, coherent powers and entropy production.
//!
//! Sign convention: heat `Qdot_i` and work `Wdot_i` are positive when they
//! flow from reservoir `i` into the machine.

use serde::Serialize;

use crate::linalg::c;
use crate::lindblad::{generator_residual, residual_tolerance, solve_ness, DensityMatrix};
use crate::model::{rates_unchecked, Bath, MachineParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentsReport {
    pub qdot: [f64; 3],
    pub wdot: [f64; 3],
    pub wdot_total: f64,
    /// `-Σ β_i Qdot_i`; the system entropy is stationary.
    pub sdot_tot: f64,
    /// `Σ (Qdot_i + Wdot_i)`, zero at stationarity.
    pub first_law_residual: f64,
}

/// Scale factor from natural power units to the reference unit `T1 γ1 / 2`.
///
/// Ratios such as efficiencies are unaffected.
pub fn reference_power_scale(p: &MachineParams) -> f64 {
    2.0 / (p.temperature[0] * p.gamma[0])
}

impl CurrentsReport {
    fn from_parts(qdot: [f64; 3], wdot: [f64; 3], beta: [f64; 3]) -> Self {
        let wdot_total = wdot.iter().sum();
        CurrentsReport {
            qdot,
            wdot,
            wdot_total,
            sdot_tot: -(0..3).map(|i| beta[i] * qdot[i]).sum::<f64>(),
            first_law_residual: (0..3).map(|i| qdot[i] + wdot[i]).sum(),
        }
    }

    /// Every power multiplied by `factor`; entropy production scales with it.
    pub fn scaled(&self, factor: f64) -> Self {
        CurrentsReport {
            qdot: self.qdot.map(|q| q * factor),
            wdot: self.wdot.map(|w| w * factor),
            wdot_total: self.wdot_total * factor,
            sdot_tot: self.sdot_tot * factor,
            first_law_residual: self.first_law_residual * factor,
        }
    }

    /// Copy expressed in the reference unit `T1 γ1 / 2`.
    pub fn in_reference_units(&self, p: &MachineParams) -> Self {
        self.scaled(reference_power_scale(p))
    }

    /// Largest modulus among the six currents.
    pub fn power_scale(&self) -> f64 {
        self.qdot
            .iter()
            .chain(self.wdot.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Closed-form currents evaluated on the steady-state entries.
///
/// `Qdot_i = 2 B_i γ_i (n_i ρ_lo,lo - (1 + n_i) ρ_hi,hi)` and
/// `Wdot_i = i B_i |g_i| λ_i (e^{iφ_i} ρ_hi,lo - e^{-iφ_i} ρ_lo,hi)`,
/// where `(lo, hi)` is the transition driven by bath `i`.
pub fn currents_report(rho: &DensityMatrix, p: &MachineParams) -> Result<CurrentsReport> {
    p.validate()?;
    let residual = generator_residual(p, rho);
    if residual > residual_tolerance(p) {
        return Err(Error::NotSteady { residual });
    }
    Ok(currents_unchecked(rho, p))
}

pub(crate) fn currents_unchecked(rho: &DensityMatrix, p: &MachineParams) -> CurrentsReport {
    let rates = rates_unchecked(p);
    let spacing = p.spacings();
    let mut qdot = [0.0; 3];
    let mut wdot = [0.0; 3];
    for bath in Bath::ALL {
        let i = bath.index();
        let (lo, hi) = bath.transition();
        let n = rates.occupation[i];
        qdot[i] = 2.0
            * spacing[i]
            * p.gamma[i]
            * (n * rho.entry(lo, lo).re - (1.0 + n) * rho.entry(hi, hi).re);
        let phase = c(0.0, p.phi[i]).exp();
        let w = c(0.0, spacing[i] * rates.coupling[i] * p.lambda[i])
            * (phase * rho.entry(hi, lo) - phase.conj() * rho.entry(lo, hi));
        wdot[i] = w.re;
    }
    CurrentsReport::from_parts(qdot, wdot, p.beta())
}

/// Steady state together with its currents.
pub fn steady_currents(p: &MachineParams) -> Result<(DensityMatrix, CurrentsReport)> {
    let rho = solve_ness(p)?;
    let report = currents_report(&rho, p)?;
    Ok((rho, report))
}

/// Imaginary part discarded when forming the coherent power of one bath.
pub fn coherent_power_imaginary_part(rho: &DensityMatrix, p: &MachineParams, bath: Bath) -> f64 {
    let rates = rates_unchecked(p);
    let i = bath.index();
    let (lo, hi) = bath.transition();
    let phase = c(0.0, p.phi[i]).exp();
    let w = c(0.0, p.spacings()[i] * rates.coupling[i] * p.lambda[i])
        * (phase * rho.entry(hi, lo) - phase.conj() * rho.entry(lo, hi));
    w.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FIGURE_GAMMAS;
    use crate::regimes::thermal_baseline;

    fn fig2a(b1: f64) -> MachineParams {
        MachineParams::thermal(b1, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS)
    }

    #[test]
    fn thermal_currents_follow_common_factor() {
        for b1 in [0.3, 0.889, 2.0, 7.5] {
            let p = fig2a(b1);
            let (_, r) = steady_currents(&p).unwrap();
            let v = thermal_baseline(&p).unwrap().v_ss;
            let expected = [-p.b1 * v, p.b2 * v, -p.b3() * v];
            for i in 0..3 {
                assert!((r.qdot[i] - expected[i]).abs() <= 1e-10 * expected[i].abs().max(1e-14));
                assert_eq!(r.wdot[i], 0.0);
            }
        }
    }

    #[test]
    fn currents_vanish_on_thermal_transition() {
        // β1 B1 - β2 B2 + β3 B3 = 0  =>  B1 (β1 - β3) = B2 (β2 - β3)
        let [b1t, b2t, b3t] = [1.0, 1.0 / 6.0, 0.1];
        let b1 = 12.0 * (b2t - b3t) / (b1t - b3t);
        let (_, r) = steady_currents(&fig2a(b1)).unwrap();
        assert!(r.power_scale() < 1e-12);
    }

    #[test]
    fn laws_hold_with_coherence() {
        for bath in Bath::ALL {
            let p = fig2a(2.0).with_coherence(bath, 1.7, 0.4);
            let (rho, r) = steady_currents(&p).unwrap();
            assert!(r.first_law_residual.abs() <= 1e-10 * r.power_scale().max(1e-300));
            assert!(r.sdot_tot >= -1e-10);
            assert!(coherent_power_imaginary_part(&rho, &p, bath).abs() < 1e-12);
        }
    }

    #[test]
    fn non_steady_input_rejected() {
        let p = fig2a(2.0);
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            currents_report(&rho, &p),
            Err(Error::NotSteady { .. })
        ));
    }

    #[test]
    fn reference_units_double_the_t1_gamma1_normalization() {
        let p = fig2a(2.0);
        let (_, r) = steady_currents(&p).unwrap();
        let s = r.in_reference_units(&p);
        let unit = p.temperature[0] * p.gamma[0];
        assert!((s.qdot[0] - 2.0 * r.qdot[0] / unit).abs() < 1e-12 * s.qdot[0].abs());
    }
}
