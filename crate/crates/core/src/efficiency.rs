//! Free-energy based efficiency shared by every operating regime, and the
//! regime-specific closed forms built from it.
//!
//! Each heat current contributes `x_i = Qdot_i (T_r / T_i - 1)` at a
//! reference temperature `T_r`; positive contributions and extracted work
//! count as useful output, the rest as input.

use serde::Serialize;

use crate::regimes::Regime;
use crate::thermo::CurrentsReport;
use crate::{Error, Result};

/// Relative size below which a current counts as zero when checking that a
/// report matches the sign pattern of a regime.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarnotFactors {
    /// `1 - T1/T2`.
    pub eta_c: f64,
    /// `T1 / (T2 - T1)`.
    pub eps_r_max: f64,
    /// `T1 (T3 - T2) / (T3 (T2 - T1))`.
    pub eps_ar_max: f64,
    /// Pump bound from the hot reservoir into the reservoir at `T_r`:
    /// `T3 / (T3 - T1)` for regime IV and `T3 / (T3 - T2)` for regime V.
    pub eta_p_max: f64,
    /// `T3 (T2 - T1) / (T2 (T3 - T1))`.
    pub eta_ap_max: f64,
}

impl CarnotFactors {
    pub fn new(temps: [f64; 3], regime: Regime) -> Self {
        let [t1, t2, t3] = temps;
        let eta_p_max = match regime {
            Regime::V => t3 / (t3 - t2),
            _ => t3 / (t3 - t1),
        };
        CarnotFactors {
            eta_c: 1.0 - t1 / t2,
            eps_r_max: t1 / (t2 - t1),
            eps_ar_max: t1 * (t3 - t2) / (t3 * (t2 - t1)),
            eta_p_max,
            eta_ap_max: t3 * (t2 - t1) / (t2 * (t3 - t1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub regime: Regime,
    /// `None` where the efficiency is not defined (regimes VII, VIII and
    /// points without any input).
    pub eta: Option<f64>,
    pub reference_temperature: Option<f64>,
    pub components: Vec<Component>,
    pub carnot: CarnotFactors,
    /// `Ydot_V` or `Ydot_VI` for the hybrid regimes.
    pub output_power: Option<f64>,
}

impl EfficiencyReport {
    pub fn component(&self, name: &str) -> Option<f64> {
        self.components
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }
}

/// Reference temperature the regime's efficiency is quoted at.
pub fn reference_temperature(regime: Regime, temps: [f64; 3]) -> Option<f64> {
    match regime {
        Regime::I | Regime::III | Regime::V => Some(temps[1]),
        Regime::II | Regime::IV | Regime::VI => Some(temps[0]),
        _ => None,
    }
}

/// Useful output and input of the universal efficiency at `t_r`.
pub fn efficiency_terms(c: &CurrentsReport, temps: [f64; 3], t_r: f64) -> (f64, f64) {
    let mut useful = 0.0;
    let mut input = 0.0;
    for w in c.wdot {
        useful += (-w).max(0.0);
        input += w.max(0.0);
    }
    for i in 0..3 {
        let x = c.qdot[i] * (t_r / temps[i] - 1.0);
        useful += x.max(0.0);
        input -= x.min(0.0);
    }
    (useful, input)
}

/// Universal efficiency at reference temperature `t_r`; `None` when nothing
/// is consumed (idle machine).
pub fn generic_efficiency(c: &CurrentsReport, temps: [f64; 3], t_r: f64) -> Option<f64> {
    let (useful, input) = efficiency_terms(c, temps, t_r);
    (input > 0.0).then(|| useful / input)
}

fn check_signs(c: &CurrentsReport, regime: Regime) -> Result<()> {
    let Some(pattern) = regime.sign_pattern() else {
        return Err(Error::RegimeMismatch(format!(
            "{regime} has no sign pattern"
        )));
    };
    let values = [c.wdot_total, c.qdot[0], c.qdot[1], c.qdot[2]];
    let zero = SIGN_TOL * c.power_scale();
    let names = ["Wdot", "Qdot1", "Qdot2", "Qdot3"];
    for k in 0..4 {
        let ok = match pattern[k] {
            0 => values[k].abs() <= zero,
            s => values[k] * f64::from(s) > 0.0,
        };
        if !ok {
            return Err(Error::RegimeMismatch(format!(
                "{} = {:e} inconsistent with regime {regime}",
                names[k], values[k]
            )));
        }
    }
    Ok(())
}

/// Closed-form efficiency of `regime`, checked against the sign pattern of
/// the currents. Powers may be in any common unit.
pub fn regime_efficiency(
    c: &CurrentsReport,
    regime: Regime,
    temps: [f64; 3],
) -> Result<EfficiencyReport> {
    check_signs(c, regime)?;
    let [t1, t2, t3] = temps;
    let [q1, q2, q3] = c.qdot;
    let w = c.wdot_total;
    let carnot = CarnotFactors::new(temps, regime);
    let mut components = Vec::new();
    let mut output_power = None;

    let eta = match regime {
        Regime::I => Some(q1 / (carnot.eps_ar_max * q3)),
        Regime::II => Some(-q3 / (carnot.eta_ap_max * q2)),
        Regime::III => {
            let input = w + q3 * (t3 - t2) / t3;
            Some(q1 / (carnot.eps_r_max * input))
        }
        Regime::IV => {
            let input = w + carnot.eta_c * q2;
            Some(-q3 / (carnot.eta_p_max * input))
        }
        Regime::V => {
            let eta_r = q1 / (carnot.eps_r_max * w);
            let eta_p = -q3 / (carnot.eta_p_max * w);
            components.push(Component {
                name: "eta_R",
                value: eta_r,
            });
            components.push(Component {
                name: "eta_P",
                value: eta_p,
            });
            output_power = Some(q1 * (t2 / t1 - 1.0) + q3 * (t2 / t3 - 1.0));
            Some(eta_r + eta_p)
        }
        Regime::VI => {
            let input = carnot.eta_c * q2;
            let eta_e = -w / input;
            let eta_ap = -q3 / (carnot.eta_ap_max * q2);
            components.push(Component {
                name: "eta_E",
                value: eta_e,
            });
            components.push(Component {
                name: "eta_AP",
                value: eta_ap,
            });
            output_power = Some(-w + q3 * (t1 / t3 - 1.0));
            Some(eta_e + eta_ap)
        }
        _ => None,
    };
    Ok(EfficiencyReport {
        regime,
        eta,
        reference_temperature: reference_temperature(regime, temps),
        components,
        carnot,
        output_power,
    })
}
