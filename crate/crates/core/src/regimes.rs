//! Operating regimes: thermal closed forms, sign-table classification and
//! the coherence amplitudes at which steady currents change sign.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::model::{bose_occupation, Bath, MachineParams};
use crate::thermo::CurrentsReport;
use crate::Result;

/// Default zero threshold for classification, in reference power units.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Absorption refrigerator.
    I,
    /// Absorption heat pump.
    II,
    /// Power and heat driven refrigerator.
    III,
    /// Power and heat driven heat pump.
    IV,
    /// Hybrid power driven refrigerator and heat pump.
    V,
    /// Hybrid heat engine and heat pump.
    VI,
    /// Dual sink accelerator.
    VII,
    /// Triple power driven heat pump.
    VIII,
    Equilibrium,
    Unclassified,
}

/// Signs of `(Wdot, Qdot1, Qdot2, Qdot3)`.
pub type SignPattern = [i8; 4];

const TABLE: [(Regime, SignPattern); 8] = [
    (Regime::I, [0, 1, -1, 1]),
    (Regime::II, [0, -1, 1, -1]),
    (Regime::III, [1, 1, -1, 1]),
    (Regime::IV, [1, -1, 1, -1]),
    (Regime::V, [1, 1, -1, -1]),
    (Regime::VI, [-1, -1, 1, -1]),
    (Regime::VII, [1, -1, -1, 1]),
    (Regime::VIII, [1, -1, -1, -1]),
];

impl Regime {
    pub const OPERATING: [Regime; 8] = [
        Regime::I,
        Regime::II,
        Regime::III,
        Regime::IV,
        Regime::V,
        Regime::VI,
        Regime::VII,
        Regime::VIII,
    ];

    pub fn sign_pattern(self) -> Option<SignPattern> {
        TABLE.iter().find(|(r, _)| *r == self).map(|(_, s)| *s)
    }

    pub fn from_pattern(pattern: SignPattern) -> Regime {
        if pattern == [0; 4] {
            return Regime::Equilibrium;
        }
        TABLE
            .iter()
            .find(|(_, s)| *s == pattern)
            .map(|(r, _)| *r)
            .unwrap_or(Regime::Unclassified)
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::I => "I",
            Regime::II => "II",
            Regime::III => "III",
            Regime::IV => "IV",
            Regime::V => "V",
            Regime::VI => "VI",
            Regime::VII => "VII",
            Regime::VIII => "VIII",
            Regime::Equilibrium => "EQUILIBRIUM",
            Regime::Unclassified => "UNCLASSIFIED",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Regime::I => "quantum absorption refrigerator",
            Regime::II => "heat pump",
            Regime::III => "power and heat driven refrigerator",
            Regime::IV => "power and heat driven pump",
            Regime::V => "hybrid power driven refrigerator and heat pump",
            Regime::VI => "hybrid heat engine and heat pump",
            Regime::VII => "dual sink accelerator",
            Regime::VIII => "triple power driven pump",
            Regime::Equilibrium => "no currents",
            Regime::Unclassified => "sign pattern outside the regime table",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        let upper = s.trim().to_ascii_uppercase();
        Regime::OPERATING
            .into_iter()
            .chain([Regime::Equilibrium, Regime::Unclassified])
            .find(|r| r.label() == upper)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

fn sign(x: f64, eps: f64) -> i8 {
    if x.abs() < eps {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn sign_pattern(c: &CurrentsReport, eps: f64) -> SignPattern {
    [
        sign(c.wdot_total, eps),
        sign(c.qdot[0], eps),
        sign(c.qdot[1], eps),
        sign(c.qdot[2], eps),
    ]
}

/// Table lookup of the sign pattern; currents with modulus below `eps`
/// count as zero. `eps` is in the same unit as the report.
pub fn classify(c: &CurrentsReport, eps: f64) -> Regime {
    Regime::from_pattern(sign_pattern(c, eps))
}

/// Closed-form steady state of the thermal machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalBaseline {
    pub populations: [f64; 3],
    pub normalization: f64,
    /// Common factor of the thermal currents: `Qdot = (-B1, B2, -B3) V_ss`.
    pub v_ss: f64,
}

pub fn thermal_baseline(p: &MachineParams) -> Result<ThermalBaseline> {
    p.validate()?;
    Ok(thermal_baseline_from(p.spacings(), p.temperature, p.gamma))
}

/// Same closed form on raw spacings, temperatures and rates, without the
/// temperature ordering imposed by [`MachineParams`].
pub fn thermal_baseline_from(
    spacing: [f64; 3],
    temperature: [f64; 3],
    gamma: [f64; 3],
) -> ThermalBaseline {
    let [n1, n2, n3] = std::array::from_fn(|i| bose_occupation(spacing[i], temperature[i]));
    let [g1, g2, g3] = gamma;
    let normalization = g1 * g3 * (1.0 + 2.0 * n1 + n3 + 3.0 * n1 * n3)
        + g2 * g3 * (n2 + n3 + 3.0 * n2 * n3)
        + g1 * g2 * (1.0 + 2.0 * (n1 + n2) + 3.0 * n1 * n2);
    let p0 = n3 * g2 * g3 * (1.0 + n2) + g1 * (1.0 + n1) * ((1.0 + n2) * g2 + (1.0 + n3) * g3);
    let p1 = n1 * g1 * g2 * (1.0 + n2) + g3 * (1.0 + n3) * (n1 * g1 + n2 * g2);
    let p2 = n2 * g1 * g2 * (1.0 + n1) + n3 * g3 * (n1 * g1 + n2 * g2);
    let v_ss = 2.0 * (-n1 * n3 + n2 * (1.0 + n1 + n3)) * g1 * g2 * g3 / normalization;
    ThermalBaseline {
        populations: [p0 / normalization, p1 / normalization, p2 / normalization],
        normalization,
        v_ss,
    }
}

/// Whether the thermal machine refrigerates (regime I side of the
/// transition): `B1 (β1 - β3) <= B2 (β2 - β3)`.
pub fn thermal_is_refrigerator(p: &MachineParams) -> bool {
    let [b1, b2, b3] = p.beta();
    p.b1 * (b1 - b3) <= p.b2 * (b2 - b3)
}

/// `β1 B1 - β2 B2 + β3 B3`, zero on the thermal transition.
pub fn thermal_affinity(p: &MachineParams) -> f64 {
    let beta = p.beta();
    let b = p.spacings();
    beta[0] * b[0] - beta[1] * b[1] + beta[2] * b[2]
}

/// Coherence amplitudes at which steady currents change sign when only one
/// reservoir is coherent. `None` marks a transition that does not exist at
/// the given spacings (negative or undefined radicand).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionLambdas {
    /// Amplitude where the currents of the two other reservoirs vanish.
    pub star: Option<f64>,
    /// Amplitude where the coherent reservoir's own heat current vanishes.
    pub nonequilibrium: Option<f64>,
}

fn checked_sqrt(radicand: f64) -> Option<f64> {
    if radicand.is_finite() && radicand >= 0.0 {
        Some(radicand.sqrt())
    } else {
        None
    }
}

/// Closed-form transition amplitudes for coherence in `bath` at the
/// spacings of `p` (its own coherence settings are ignored).
pub fn transition_lambdas(p: &MachineParams, bath: Bath) -> Result<TransitionLambdas> {
    p.validate()?;
    let spacing = p.spacings();
    let [n1, n2, n3] = std::array::from_fn(|i| bose_occupation(spacing[i], p.temperature[i]));
    let [g1, g2, g3] = p.gamma;
    let [b1, b2, b3] = spacing;
    let affinity = -n1 * n3 + n2 * (1.0 + n1 + n3);

    let (star, ne) = match bath {
        Bath::Cold => {
            let k = (1.0 + 2.0 * n1) * g1 + n2 * g2 + n3 * g3;
            let num = affinity * (b1 * b1 + k * k);
            (
                num / (2.0 * (1.0 + 2.0 * n1) * (n3 - n2) * k),
                g2 * g3 * num
                    / (-2.0 * (1.0 + 2.0 * n1) * g1 * k * ((1.0 + n2) * g2 + (1.0 + n3) * g3)),
            )
        }
        Bath::Intermediate => {
            let k = n1 * g1 + (1.0 + 2.0 * n2) * g2 + (1.0 + n3) * g3;
            let num = affinity * (b2 * b2 + k * k);
            (
                num / (-2.0 * (1.0 + 2.0 * n2) * (1.0 + n1 + n3) * k),
                g1 * g3 * num / (2.0 * (1.0 + 2.0 * n2) * g2 * ((1.0 + n1) * g1 + n3 * g3) * k),
            )
        }
        Bath::Hot => {
            let k = (1.0 + n1) * g1 + (1.0 + n2) * g2 + (1.0 + 2.0 * n3) * g3;
            let num = affinity * (b3 * b3 + k * k);
            (
                num / (2.0 * (n1 - n2) * (1.0 + 2.0 * n3) * k),
                g1 * g2 * num / (-2.0 * (1.0 + 2.0 * n3) * (n1 * g1 + n2 * g2) * g3 * k),
            )
        }
    };
    Ok(TransitionLambdas {
        star: checked_sqrt(star),
        nonequilibrium: checked_sqrt(ne),
    })
}

/// Predicts `Wdot3 < 0` (work output) for coherence in the hot reservoir:
/// `β2 B3 < -β2 B1 + ln[(e^{β1 B1} γ2 (γ1 - γ3) + γ3 (γ1 + γ2)) / (γ1 (γ2 + γ3))]`.
pub fn regime_vi_work_condition(p: &MachineParams) -> Result<bool> {
    p.validate()?;
    let [beta1, beta2, _] = p.beta();
    let [g1, g2, g3] = p.gamma;
    let boltzmann_term = if g1 == g3 {
        0.0
    } else {
        (beta1 * p.b1).exp() * g2 * (g1 - g3)
    };
    let argument = (boltzmann_term + g3 * (g1 + g2)) / (g1 * (g2 + g3));
    if !(argument > 0.0) {
        return Ok(false);
    }
    Ok(beta2 * p.b3() < -beta2 * p.b1 + argument.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FIGURE_GAMMAS;
    use crate::thermo::steady_currents;

    fn report(w: f64, q: [f64; 3]) -> CurrentsReport {
        CurrentsReport {
            qdot: q,
            wdot: [w, 0.0, 0.0],
            wdot_total: w,
            sdot_tot: 0.0,
            first_law_residual: 0.0,
        }
    }

    #[test]
    fn classification_follows_table() {
        assert_eq!(classify(&report(0.0, [1.0, -2.0, 1.0]), 1e-9), Regime::I);
        assert_eq!(
            classify(&report(1.0, [-1.0, -2.0, -1.0]), 1e-9),
            Regime::VIII
        );
        assert_eq!(classify(&report(-1.0, [-1.0, 2.0, -1.0]), 1e-9), Regime::VI);
        assert_eq!(
            classify(&report(1e-12, [1e-11, 0.0, -1e-10]), 1e-9),
            Regime::Equilibrium
        );
        assert_eq!(
            classify(&report(1.0, [1.0, 1.0, 1.0]), 1e-9),
            Regime::Unclassified
        );
        for r in Regime::OPERATING {
            let s = r.sign_pattern().unwrap();
            let c = report(s[0] as f64, [s[1] as f64, s[2] as f64, s[3] as f64]);
            assert_eq!(classify(&c, 1e-9), r);
            assert_eq!(Regime::parse(r.label()), Some(r));
        }
    }

    #[test]
    fn equal_temperatures_give_no_flux() {
        let b = thermal_baseline_from([1.3, 4.0, 2.7], [2.0; 3], FIGURE_GAMMAS);
        assert!(b.v_ss.abs() < 1e-18);
        let sum: f64 = b.populations.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn baseline_orderings_at_reference_point() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let b = thermal_baseline(&p).unwrap();
        let [r0, r1, r2] = b.populations;
        assert!(r0 > r1 && r1 > r2 && r2 > 0.0);
        assert!((r0 + r1 + r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_transition_splits_refrigerator_and_pump() {
        // B1 (β1 - β3) = B2 (β2 - β3) at B1 = 8/9 for B2 = 12, T = 1, 6, 10
        for (b1, fridge) in [(0.5, true), (0.88, true), (0.9, false), (3.0, false)] {
            let p = MachineParams::thermal(b1, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
            assert_eq!(thermal_is_refrigerator(&p), fridge);
            let (_, c) = steady_currents(&p).unwrap();
            let r = classify(&c.in_reference_units(&p), DEFAULT_EPS);
            assert_eq!(r, if fridge { Regime::I } else { Regime::II });
        }
    }

    #[test]
    fn transition_amplitudes_vanish_at_equilibrium() {
        let b1 = 12.0 * (1.0 / 6.0 - 0.1) / (1.0 - 0.1);
        let p = MachineParams::thermal(b1, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        assert!(thermal_affinity(&p).abs() < 1e-15);
        for bath in Bath::ALL {
            let t = transition_lambdas(&p, bath).unwrap();
            // the shared affinity factor sends whichever branch exists to zero
            for lam in [t.star, t.nonequilibrium].into_iter().flatten() {
                assert!(lam < 1e-6, "{bath}: {lam}");
            }
        }
    }

    #[test]
    fn transition_amplitudes_zero_the_stated_currents() {
        let p = MachineParams::thermal(0.3, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let ne = transition_lambdas(&p, Bath::Cold)
            .unwrap()
            .nonequilibrium
            .unwrap();
        let (_, c) = steady_currents(&p.with_coherence(Bath::Cold, ne, 0.0)).unwrap();
        let c = c.in_reference_units(&p);
        assert!(c.qdot[0].abs() < 1e-8);

        let p = MachineParams::thermal(6.0, 76.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let star = transition_lambdas(&p, Bath::Hot).unwrap().star.unwrap();
        let (_, c) = steady_currents(&p.with_coherence(Bath::Hot, star, 0.0)).unwrap();
        let c = c.in_reference_units(&p);
        assert!(c.qdot[0].abs() < 1e-8 && c.qdot[1].abs() < 1e-8);
    }

    #[test]
    fn vi_condition_degenerate_rates() {
        let mut p = MachineParams::thermal(4.34, 10.0, [1.0, 30.0, 60.0], [0.01, 0.02, 0.01]);
        assert!(!regime_vi_work_condition(&p).unwrap());
        p.b1 = 800.0;
        p.b2 = 801.0;
        // overflowing Boltzmann factor multiplied by γ1 - γ3 = 0
        assert!(!regime_vi_work_condition(&p).unwrap());
    }

    #[test]
    fn vi_condition_matches_work_sign() {
        let t = [1.0, 6.0, 10.0];
        let small =
            MachineParams::thermal(6.0, 7.0, t, FIGURE_GAMMAS).with_coherence(Bath::Hot, 0.5, 0.0);
        let large =
            MachineParams::thermal(6.0, 66.0, t, FIGURE_GAMMAS).with_coherence(Bath::Hot, 0.5, 0.0);
        for (p, negative) in [(small, true), (large, false)] {
            assert_eq!(regime_vi_work_condition(&p).unwrap(), negative);
            let (_, c) = steady_currents(&p).unwrap();
            assert_eq!(c.wdot[2] < 0.0, negative);
        }
    }
}
