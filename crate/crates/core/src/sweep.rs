//! Parameter grids: regime diagrams over a level spacing and one coherence
//! amplitude, power/efficiency curves over a level spacing, and grid argmax.
//!
//! Grid points are evaluated in parallel; results are always returned in
//! grid order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::efficiency::{regime_efficiency, EfficiencyReport};
use crate::model::{Bath, MachineParams};
use crate::regimes::{
    classify, sign_pattern, transition_lambdas, Regime, SignPattern, DEFAULT_EPS,
};
use crate::thermo::{steady_currents, CurrentsReport};
use crate::{Error, Result};

pub const DEFAULT_COUNT: usize = 400;

/// Parameter that a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKey {
    /// Lowest spacing, `B2` held fixed.
    B1,
    /// Upper level, `B1` held fixed.
    B2,
    /// Hot transition; moves `B2` with `B1` held fixed.
    B3,
    Lambda(Bath),
}

impl ParamKey {
    pub fn is_spacing(self) -> bool {
        !matches!(self, ParamKey::Lambda(_))
    }

    pub fn get(self, p: &MachineParams) -> f64 {
        match self {
            ParamKey::B1 => p.b1,
            ParamKey::B2 => p.b2,
            ParamKey::B3 => p.b3(),
            ParamKey::Lambda(b) => p.lambda[b.index()],
        }
    }

    pub fn apply(self, p: &MachineParams, value: f64) -> MachineParams {
        let mut q = *p;
        match self {
            ParamKey::B1 => q.b1 = value,
            ParamKey::B2 => q.b2 = value,
            ParamKey::B3 => q.b2 = q.b1 + value,
            ParamKey::Lambda(b) => q.lambda[b.index()] = value,
        }
        q
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKey::B1 => f.write_str("B1"),
            ParamKey::B2 => f.write_str("B2"),
            ParamKey::B3 => f.write_str("B3"),
            ParamKey::Lambda(b) => write!(f, "lambda{}", b.number()),
        }
    }
}

impl FromStr for ParamKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "B1" | "b1" => Ok(ParamKey::B1),
            "B2" | "b2" => Ok(ParamKey::B2),
            "B3" | "b3" => Ok(ParamKey::B3),
            other => other
                .strip_prefix("lambda")
                .and_then(|n| n.parse().ok())
                .and_then(Bath::from_number)
                .map(ParamKey::Lambda)
                .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep key `{other}`"))),
        }
    }
}

impl Serialize for ParamKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Linearly spaced axis including both end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepAxis {
    pub key: ParamKey,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn new(key: ParamKey, min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidSweep(format!(
                "{key}: count must be at least 2"
            )));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidSweep(format!(
                "{key}: need finite min < max, got [{min}, {max}]"
            )));
        }
        Ok(SweepAxis {
            key,
            min,
            max,
            count,
        })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.max
        } else {
            self.min + k as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }

    /// Same range with `2 count - 1` points, nesting the current grid.
    pub fn doubled(&self) -> Self {
        SweepAxis {
            count: 2 * self.count - 1,
            ..*self
        }
    }

    /// Rejects ranges that take the base parameters out of their domain.
    fn check_endpoints(&self, base: &MachineParams) -> Result<()> {
        for v in [self.min, self.max] {
            self.key
                .apply(base, v)
                .validate()
                .map_err(|e| Error::InvalidSweep(format!("{} = {v}: {e}", self.key)))?;
        }
        Ok(())
    }
}

/// Base parameters plus one or two axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: MachineParams,
    pub axes: Vec<SweepAxis>,
    /// Zero threshold for classification, in reference power units.
    pub eps: f64,
}

impl SweepSpec {
    pub fn curve(base: MachineParams, axis: SweepAxis) -> Self {
        SweepSpec {
            base,
            axes: vec![axis],
            eps: DEFAULT_EPS,
        }
    }

    pub fn diagram(base: MachineParams, spacing: SweepAxis, lambda: SweepAxis) -> Self {
        SweepSpec {
            base,
            axes: vec![spacing, lambda],
            eps: DEFAULT_EPS,
        }
    }

    fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidSweep("eps must be non-negative".into()));
        }
        for a in &self.axes {
            a.check_endpoints(&self.base)?;
        }
        Ok(())
    }
}

/// Classification of a single parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub params: MachineParams,
    pub currents: Option<CurrentsReport>,
    pub regime: Regime,
    pub error: Option<Error>,
}

pub fn evaluate_point(p: &MachineParams, eps: f64) -> PointResult {
    match steady_currents(p) {
        Ok((_, c)) => PointResult {
            params: *p,
            regime: classify(&c.in_reference_units(p), eps),
            currents: Some(c),
            error: None,
        },
        Err(e) => PointResult {
            params: *p,
            currents: None,
            regime: Regime::Unclassified,
            error: Some(e),
        },
    }
}

/// Value of the swept spacing at which the thermal currents vanish, if it is
/// a positive finite number.
pub fn thermal_transition_on_axis(base: &MachineParams, key: ParamKey) -> Option<f64> {
    let [b1, b2, b3] = base.beta();
    let value = match key {
        ParamKey::B1 => base.b2 * (b2 - b3) / (b1 - b3),
        ParamKey::B2 => base.b1 * (b1 - b3) / (b2 - b3),
        ParamKey::B3 => base.b1 * (b1 - b2) / (b2 - b3),
        ParamKey::Lambda(_) => return None,
    };
    (value.is_finite() && value > 0.0).then_some(value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramCell {
    pub spacing: f64,
    pub lambda: f64,
    pub regime: Regime,
    /// Natural units.
    pub currents: Option<CurrentsReport>,
    #[serde(skip)]
    pub error: Option<Error>,
}

/// Transition amplitudes at one spacing value of the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlayPoint {
    pub spacing: f64,
    pub star: Option<f64>,
    pub nonequilibrium: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipViolation {
    pub spacing: (f64, f64),
    pub lambda: (f64, f64),
    pub from: Regime,
    pub to: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCheck {
    /// Label changes where some current reverses sign.
    pub flips: usize,
    /// Label changes caused only by currents entering or leaving the zero
    /// band of the classifier.
    pub threshold_flips: usize,
    pub violations: Vec<FlipViolation>,
}

impl BoundaryCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeDiagram {
    pub base: MachineParams,
    pub bath: Bath,
    pub spacing_axis: SweepAxis,
    pub lambda_axis: SweepAxis,
    /// Index `i * lambda_count + j` for spacing `i` and amplitude `j`.
    pub cells: Vec<DiagramCell>,
    pub overlays: Vec<OverlayPoint>,
    pub thermal_transition: Option<f64>,
    /// Classification threshold used for the cells.
    pub eps: f64,
}

impl RegimeDiagram {
    pub fn cell(&self, i: usize, j: usize) -> &DiagramCell {
        &self.cells[i * self.lambda_axis.count + j]
    }

    fn pattern(&self, cell: &DiagramCell) -> Option<SignPattern> {
        let c = cell.currents.as_ref()?;
        Some(sign_pattern(&c.in_reference_units(&self.base), self.eps))
    }

    /// Whether any current has strictly opposite signs in the two cells.
    /// Cells without currents count as reversing.
    fn reverses_sign(&self, a: &DiagramCell, b: &DiagramCell) -> bool {
        match (self.pattern(a), self.pattern(b)) {
            (Some(x), Some(y)) => (0..4).any(|k| x[k] * y[k] < 0),
            _ => true,
        }
    }

    /// Operating regimes present anywhere on the grid.
    pub fn inventory(&self) -> BTreeSet<Regime> {
        self.cells
            .iter()
            .map(|c| c.regime)
            .filter(|r| r.sign_pattern().is_some())
            .collect()
    }

    /// Checks that every label change along a column happens within one
    /// grid step of a transition curve, and every change along the
    /// `lambda = 0` row within one step of the thermal transition.
    ///
    /// Only changes where some current strictly reverses sign are held to
    /// the curves. A current moving into or out of the zero band (the work
    /// when coherence is switched on, or every current on the thermal
    /// transition column) crosses no curve.
    pub fn check_boundaries(&self) -> BoundaryCheck {
        let nb = self.spacing_axis.count;
        let nl = self.lambda_axis.count;
        let dl = self.lambda_axis.step();
        let db = self.spacing_axis.step();
        let mut flips = 0;
        let mut threshold_flips = 0;
        let mut violations = Vec::new();

        for i in 0..nb {
            let curves = [self.overlays[i].star, self.overlays[i].nonequilibrium];
            for j in 0..nl.saturating_sub(1) {
                let (a, b) = (self.cell(i, j), self.cell(i, j + 1));
                if a.regime == b.regime {
                    continue;
                }
                if !self.reverses_sign(a, b) {
                    threshold_flips += 1;
                    continue;
                }
                flips += 1;
                let near = curves
                    .iter()
                    .flatten()
                    .any(|&l| l >= a.lambda - dl && l <= b.lambda + dl);
                if !near {
                    violations.push(FlipViolation {
                        spacing: (a.spacing, a.spacing),
                        lambda: (a.lambda, b.lambda),
                        from: a.regime,
                        to: b.regime,
                    });
                }
            }
        }

        if let Some(j0) = self.lambda_axis.values().iter().position(|&l| l == 0.0) {
            for i in 0..nb.saturating_sub(1) {
                let (a, b) = (self.cell(i, j0), self.cell(i + 1, j0));
                if a.regime == b.regime {
                    continue;
                }
                flips += 1;
                let near = self
                    .thermal_transition
                    .is_some_and(|t| t >= a.spacing - db && t <= b.spacing + db);
                if !near {
                    violations.push(FlipViolation {
                        spacing: (a.spacing, b.spacing),
                        lambda: (0.0, 0.0),
                        from: a.regime,
                        to: b.regime,
                    });
                }
            }
        }
        BoundaryCheck {
            flips,
            threshold_flips,
            violations,
        }
    }
}

/// Classifies every cell of a (spacing, amplitude) grid and samples the
/// transition curves on the same spacing axis.
pub fn regime_diagram(spec: &SweepSpec) -> Result<RegimeDiagram> {
    let [spacing_axis, lambda_axis] = match spec.axes.as_slice() {
        [a, b] => [*a, *b],
        _ => {
            return Err(Error::InvalidSweep(
                "a diagram needs exactly two axes".into(),
            ))
        }
    };
    if !spacing_axis.key.is_spacing() {
        return Err(Error::InvalidSweep(format!(
            "first diagram axis must be a level spacing, got {}",
            spacing_axis.key
        )));
    }
    let ParamKey::Lambda(bath) = lambda_axis.key else {
        return Err(Error::InvalidSweep(format!(
            "second diagram axis must be a coherence amplitude, got {}",
            lambda_axis.key
        )));
    };
    spec.validate()?;

    let spacings = spacing_axis.values();
    let lambdas = lambda_axis.values();
    let nl = lambdas.len();
    let cells = (0..spacings.len() * nl)
        .into_par_iter()
        .map(|k| {
            let (b, l) = (spacings[k / nl], lambdas[k % nl]);
            let p = lambda_axis
                .key
                .apply(&spacing_axis.key.apply(&spec.base, b), l);
            let r = evaluate_point(&p, spec.eps);
            DiagramCell {
                spacing: b,
                lambda: l,
                regime: r.regime,
                currents: r.currents,
                error: r.error,
            }
        })
        .collect();

    let overlays = spacings
        .iter()
        .map(|&b| {
            let p = spacing_axis.key.apply(&spec.base, b);
            let t = transition_lambdas(&p, bath).ok();
            OverlayPoint {
                spacing: b,
                star: t.and_then(|t| t.star),
                nonequilibrium: t.and_then(|t| t.nonequilibrium),
            }
        })
        .collect();

    Ok(RegimeDiagram {
        base: spec.base,
        bath,
        spacing_axis,
        lambda_axis,
        cells,
        overlays,
        thermal_transition: thermal_transition_on_axis(&spec.base, spacing_axis.key),
        eps: spec.eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub value: f64,
    pub params: MachineParams,
    /// Natural units.
    pub currents: Option<CurrentsReport>,
    pub regime: Regime,
    /// Efficiency of the point's own regime, when it has one.
    pub efficiency: Option<EfficiencyReport>,
    pub in_regime: bool,
    #[serde(skip)]
    pub error: Option<Error>,
}

impl CurvePoint {
    pub fn eta(&self) -> Option<f64> {
        self.efficiency.as_ref().and_then(|e| e.eta)
    }
}

/// Evaluates a one-axis sweep. Points outside `regime_filter` are kept and
/// flagged; solver failures become unclassified points.
pub fn power_efficiency_curve(spec: &SweepSpec, regime_filter: Regime) -> Result<Vec<CurvePoint>> {
    let [axis] = match spec.axes.as_slice() {
        [a] => [*a],
        _ => return Err(Error::InvalidSweep("a curve needs exactly one axis".into())),
    };
    spec.validate()?;
    let points = axis
        .values()
        .into_par_iter()
        .map(|v| {
            let p = axis.key.apply(&spec.base, v);
            let r = evaluate_point(&p, spec.eps);
            let efficiency = r
                .currents
                .as_ref()
                .filter(|_| r.regime.sign_pattern().is_some())
                .and_then(|c| regime_efficiency(c, r.regime, p.temperature).ok());
            CurvePoint {
                value: v,
                params: p,
                currents: r.currents,
                regime: r.regime,
                efficiency,
                in_regime: r.regime == regime_filter,
                error: r.error,
            }
        })
        .collect();
    Ok(points)
}

/// Quantity maximised along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Qdot1,
    Qdot3,
    Wdot3,
    /// `Ydot_V` or `Ydot_VI`.
    Output,
    Efficiency,
}

impl Objective {
    /// `|Qdot1|`, `|Qdot3|`, `|Wdot3|` (natural units), the hybrid output
    /// power, or the efficiency.
    pub fn value(self, point: &CurvePoint) -> Option<f64> {
        let c = point.currents.as_ref()?;
        match self {
            Objective::Qdot1 => Some(c.qdot[0].abs()),
            Objective::Qdot3 => Some(c.qdot[2].abs()),
            Objective::Wdot3 => Some(c.wdot[2].abs()),
            Objective::Output => point.efficiency.as_ref()?.output_power,
            Objective::Efficiency => point.eta(),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qdot1" => Ok(Objective::Qdot1),
            "qdot3" => Ok(Objective::Qdot3),
            "wdot3" => Ok(Objective::Wdot3),
            "output" => Ok(Objective::Output),
            "eta" | "efficiency" => Ok(Objective::Efficiency),
            other => Err(Error::InvalidSweep(format!("unknown objective `{other}`"))),
        }
    }
}

/// In-regime point with the largest objective; ties go to the smaller swept
/// value.
pub fn find_max_power(curve: &[CurvePoint], objective: Objective) -> Result<&CurvePoint> {
    let mut best: Option<(&CurvePoint, f64)> = None;
    for p in curve.iter().filter(|p| p.in_regime) {
        let Some(v) = objective.value(p) else {
            continue;
        };
        best = match best {
            Some((b, bv)) if bv > v || (bv == v && b.value <= p.value) => Some((b, bv)),
            _ => Some((p, v)),
        };
    }
    best.map(|(p, _)| p).ok_or(Error::EmptyCurve)
}

/// Smallest interval bracketing every in-regime point of a coarse scan,
/// widened by one scan step on each side and clipped to the scan range.
pub fn regime_window(
    base: &MachineParams,
    axis: SweepAxis,
    regime_filter: Regime,
    eps: f64,
) -> Result<Option<(f64, f64)>> {
    let spec = SweepSpec {
        base: *base,
        axes: vec![axis],
        eps,
    };
    let curve = power_efficiency_curve(&spec, regime_filter)?;
    let inside: Vec<f64> = curve
        .iter()
        .filter(|p| p.in_regime)
        .map(|p| p.value)
        .collect();
    let (Some(lo), Some(hi)) = (inside.first(), inside.last()) else {
        return Ok(None);
    };
    let step = axis.step();
    Ok(Some(((lo - step).max(axis.min), (hi + step).min(axis.max))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedMax {
    pub point: CurvePoint,
    pub objective: f64,
    /// Grid size of the final sweep.
    pub count: usize,
    /// Relative change of the maximum in the last doubling.
    pub relative_change: f64,
    pub converged: bool,
}

/// Doubles the grid density until the maximum of `objective` moves by less
/// than `rel_tol`, up to `max_doublings` times.
pub fn refined_max(
    spec: &SweepSpec,
    regime_filter: Regime,
    objective: Objective,
    rel_tol: f64,
    max_doublings: usize,
) -> Result<RefinedMax> {
    let mut spec = spec.clone();
    let best = |s: &SweepSpec| -> Result<(CurvePoint, f64)> {
        let curve = power_efficiency_curve(s, regime_filter)?;
        let p = find_max_power(&curve, objective)?.clone();
        let v = objective.value(&p).expect("maximiser has a value");
        Ok((p, v))
    };
    let (mut point, mut value) = best(&spec)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        spec.axes[0] = spec.axes[0].doubled();
        let (p, v) = best(&spec)?;
        change = ((v - value) / v).abs();
        point = p;
        value = v;
        if change < rel_tol {
            break;
        }
    }
    Ok(RefinedMax {
        point,
        objective: value,
        count: spec.axes[0].count,
        relative_change: change,
        converged: change < rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FIGURE_GAMMAS;

    #[test]
    fn keys_round_trip() {
        for k in [
            ParamKey::B1,
            ParamKey::B2,
            ParamKey::B3,
            ParamKey::Lambda(Bath::Hot),
        ] {
            assert_eq!(k.to_string().parse::<ParamKey>().unwrap(), k);
        }
        assert!("lambda4".parse::<ParamKey>().is_err());
        assert!("T1".parse::<ParamKey>().is_err());
    }

    #[test]
    fn spacing_keys_rederive_b3() {
        let p = MachineParams::thermal(6.0, 20.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        assert_eq!(ParamKey::B1.apply(&p, 4.0).b3(), 16.0);
        let q = ParamKey::B3.apply(&p, 30.0);
        assert_eq!((q.b1, q.b2), (6.0, 36.0));
    }

    #[test]
    fn axis_validation() {
        assert!(SweepAxis::new(ParamKey::B1, 0.0, 1.0, 1).is_err());
        assert!(SweepAxis::new(ParamKey::B1, 1.0, 1.0, 5).is_err());
        let a = SweepAxis::new(ParamKey::B1, 0.5, 1.5, 3).unwrap();
        assert_eq!(a.values(), vec![0.5, 1.0, 1.5]);
        assert_eq!(a.doubled().values(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
    }

    #[test]
    fn out_of_domain_range_rejected() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let spec = SweepSpec::curve(p, SweepAxis::new(ParamKey::B1, 0.0, 4.0, 10).unwrap());
        assert!(matches!(
            power_efficiency_curve(&spec, Regime::I),
            Err(Error::InvalidSweep(_))
        ));
    }

    #[test]
    fn thermal_curve_does_no_work() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let spec = SweepSpec::curve(p, SweepAxis::new(ParamKey::B1, 0.1, 11.0, 60).unwrap());
        let curve = power_efficiency_curve(&spec, Regime::I).unwrap();
        assert!(curve.iter().all(|c| c.currents.unwrap().wdot == [0.0; 3]));
        assert!(curve.iter().any(|c| c.in_regime) && curve.iter().any(|c| !c.in_regime));
    }

    #[test]
    fn argmax_ties_and_monotone_curves() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let spec = SweepSpec::curve(p, SweepAxis::new(ParamKey::B1, 0.1, 0.8, 8).unwrap());
        let mut curve = power_efficiency_curve(&spec, Regime::I).unwrap();
        // the absorption efficiency grows with B1 up to the transition
        let best = find_max_power(&curve, Objective::Efficiency).unwrap();
        assert_eq!(best.value, 0.8);
        let c = curve[2].currents;
        curve[5].currents = c;
        curve[6].currents = c;
        curve[7].currents = c;
        for p in curve.iter_mut().take(5) {
            p.in_regime = false;
        }
        assert_eq!(
            find_max_power(&curve, Objective::Qdot1).unwrap().value,
            curve[5].value
        );
        for p in &mut curve {
            p.in_regime = false;
        }
        assert_eq!(
            find_max_power(&curve, Objective::Qdot1),
            Err(Error::EmptyCurve)
        );
    }

    #[test]
    fn small_diagram_is_consistent() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let spec = SweepSpec::diagram(
            p,
            SweepAxis::new(ParamKey::B1, 0.1, 4.0, 24).unwrap(),
            SweepAxis::new(ParamKey::Lambda(Bath::Cold), 0.0, 1.0, 21).unwrap(),
        );
        let d = regime_diagram(&spec).unwrap();
        assert_eq!(d.cells.len(), 24 * 21);
        assert!(d.check_boundaries().passed(), "{:?}", d.check_boundaries());
        let inv = d.inventory();
        assert!(inv.contains(&Regime::I) && inv.contains(&Regime::II));
        // deterministic regardless of scheduling
        assert_eq!(regime_diagram(&spec).unwrap(), d);
    }

    #[test]
    fn window_brackets_in_regime_points() {
        let p = MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS);
        let axis = SweepAxis::new(ParamKey::B1, 0.1, 11.0, 50).unwrap();
        let (lo, hi) = regime_window(&p, axis, Regime::I, DEFAULT_EPS)
            .unwrap()
            .unwrap();
        let t = thermal_transition_on_axis(&p, ParamKey::B1).unwrap();
        assert_eq!(lo, 0.1);
        assert!(hi > t && hi - t <= 2.0 * axis.step());
        assert_eq!(
            regime_window(&p, axis, Regime::VIII, DEFAULT_EPS).unwrap(),
            None
        );
    }
}
