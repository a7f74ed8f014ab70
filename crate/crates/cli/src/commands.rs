use std::fmt::Write as _;

use coherent_machine::collision::run_collisions;
use coherent_machine::efficiency::EfficiencyReport;
use coherent_machine::lindblad::{generator_residual, solve_ness};
use coherent_machine::regimes::{classify, thermal_baseline, transition_lambdas};
use coherent_machine::sweep::{
    find_max_power, power_efficiency_curve, regime_diagram, regime_window, CurvePoint, ParamKey,
    SweepAxis, SweepSpec, DEFAULT_COUNT,
};
use coherent_machine::thermo::currents_report;
use coherent_machine::{Bath, CurrentsReport, DensityMatrix, Error, MachineParams};
use serde_json::json;

use crate::config::{ConfigError, RunConfig, Units};

/// Failure of a subcommand, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
    Validation(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

/// Fixed 12 significant digit formatting used in every table.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn current_fields(c: Option<&CurrentsReport>, factor: f64) -> String {
    match c {
        Some(c) => {
            let c = c.scaled(factor);
            let v = [
                c.qdot[0],
                c.qdot[1],
                c.qdot[2],
                c.wdot[0],
                c.wdot[1],
                c.wdot[2],
                c.sdot_tot,
                c.first_law_residual,
            ];
            v.map(num).join(",")
        }
        None => ",,,,,,,".to_string(),
    }
}

const CURRENT_HEADER: &str = "Qdot1,Qdot2,Qdot3,Wdot1,Wdot2,Wdot3,Sdot_tot,first_law_residual";

fn unit_name(cfg: &RunConfig) -> &'static str {
    match cfg.units {
        Units::Reference => "T1*gamma1/2",
        Units::Natural => "natural",
    }
}

fn complex_rows(rho: &DensityMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = rho.dim();
    let re = (0..d)
        .map(|j| (0..d).map(|k| rho.entry(j, k).re).collect())
        .collect();
    let im = (0..d)
        .map(|j| (0..d).map(|k| rho.entry(j, k).im).collect())
        .collect();
    (re, im)
}

pub fn ness(cfg: &RunConfig) -> Result<String, Failure> {
    let p = cfg.params;
    let rho = solve_ness(&p)?;
    let c = currents_report(&rho, &p)?;
    let regime = classify(&c.in_reference_units(&p), cfg.eps);
    let scaled = c.scaled(cfg.power_factor());
    let (re, im) = complex_rows(&rho);
    let mut out = json!({
        "params": p,
        "units": unit_name(cfg),
        "populations": rho.populations(),
        "rho": { "re": re, "im": im },
        "generator_residual": generator_residual(&p, &rho),
        "currents": scaled,
        "regime": regime,
        "description": regime.description(),
    });
    if p.lambda.iter().all(|&l| l == 0.0) {
        let t = thermal_baseline(&p)?;
        out["thermal_baseline"] = json!({
            "populations": t.populations,
            "v_ss": t.v_ss * cfg.power_factor(),
        });
    }
    let mut s = serde_json::to_string_pretty(&out).expect("serializable");
    s.push('\n');
    Ok(s)
}

pub fn classify_point(cfg: &RunConfig) -> Result<String, Failure> {
    let (_, c) = coherent_machine::steady_currents(&cfg.params)?;
    let regime = classify(&c.in_reference_units(&cfg.params), cfg.eps);
    Ok(format!("{regime}\n"))
}

pub fn transitions(cfg: &RunConfig) -> Result<String, Failure> {
    let mut out = String::from("bath,lambda_star,lambda_ne\n");
    for bath in Bath::ALL {
        let t = transition_lambdas(&cfg.params, bath)?;
        writeln!(
            out,
            "{},{},{}",
            bath.number(),
            opt(t.star),
            opt(t.nonequilibrium)
        )
        .unwrap();
    }
    Ok(out)
}

fn default_range(key: ParamKey, p: &MachineParams, count: usize) -> (f64, f64) {
    let n = count as f64;
    match key {
        ParamKey::B1 => (p.b2 / n, p.b2 * (1.0 - 1.0 / n)),
        ParamKey::B2 => (p.b1 * (1.0 + 1.0 / n), p.b1 + 200.0),
        _ => (200.0 / n, 200.0),
    }
}

fn spacing_axis(cfg: &RunConfig) -> Result<SweepAxis, Failure> {
    let key = cfg.spacing_axis()?;
    let count = cfg.usize_or("axis_count", DEFAULT_COUNT)?;
    let (lo, hi) = default_range(key, &cfg.params, count.max(2));
    let min = cfg.f64_or("axis_min", lo)?;
    let max = cfg.f64_or("axis_max", hi)?;
    Ok(SweepAxis::new(key, min, max, count)?)
}

pub struct DiagramOutput {
    pub grid: String,
    pub overlay: String,
}

pub fn diagram(cfg: &RunConfig) -> Result<DiagramOutput, Failure> {
    let bath = cfg.bath()?;
    let spacing = spacing_axis(cfg)?;
    let lambda = SweepAxis::new(
        ParamKey::Lambda(bath),
        cfg.f64_or("lambda_min", 0.0)?,
        cfg.f64_or("lambda_max", 1.0)?,
        cfg.usize_or("lambda_count", DEFAULT_COUNT)?,
    )?;
    let mut spec = SweepSpec::diagram(cfg.params, spacing, lambda);
    spec.eps = cfg.eps;
    let d = regime_diagram(&spec)?;
    let factor = cfg.power_factor();

    let mut grid = format!("B,lambda,regime,{CURRENT_HEADER}\n");
    for cell in &d.cells {
        writeln!(
            grid,
            "{},{},{},{}",
            num(cell.spacing),
            num(cell.lambda),
            cell.regime,
            current_fields(cell.currents.as_ref(), factor)
        )
        .unwrap();
    }
    let mut overlay = String::from("B,lambda_star,lambda_ne,thermal_transition\n");
    for o in &d.overlays {
        writeln!(
            overlay,
            "{},{},{},{}",
            num(o.spacing),
            opt(o.star),
            opt(o.nonequilibrium),
            opt(d.thermal_transition)
        )
        .unwrap();
    }
    Ok(DiagramOutput { grid, overlay })
}

const COMPONENTS: [&str; 4] = ["eta_R", "eta_P", "eta_E", "eta_AP"];

fn efficiency_fields(e: Option<&EfficiencyReport>, factor: f64) -> String {
    let eta = opt(e.and_then(|e| e.eta));
    let comps = COMPONENTS.map(|name| opt(e.and_then(|e| e.component(name))));
    let output = opt(e.and_then(|e| e.output_power).map(|y| y * factor));
    format!("{eta},{},{output}", comps.join(","))
}

pub struct CurveOutput {
    pub table: String,
    /// Summary of the requested maximum, if any.
    pub maximum: Option<String>,
}

pub fn curve(cfg: &RunConfig) -> Result<CurveOutput, Failure> {
    let regime = cfg.regime()?;
    let mut axis = spacing_axis(cfg)?;
    if cfg.bool_or("window", false)? {
        match regime_window(&cfg.params, axis, regime, cfg.eps)? {
            Some((lo, hi)) => axis = SweepAxis::new(axis.key, lo, hi, axis.count)?,
            None => {
                return Err(Failure::Solver(format!(
                    "no regime {regime} points in the range"
                )))
            }
        }
    }
    let mut spec = SweepSpec::curve(cfg.params, axis);
    spec.eps = cfg.eps;
    let points = power_efficiency_curve(&spec, regime)?;
    let factor = cfg.power_factor();

    let mut table = format!(
        "swept_value,{CURRENT_HEADER},eta,{},Y_output,regime,in_regime\n",
        COMPONENTS.join(",")
    );
    for pt in &points {
        writeln!(
            table,
            "{},{},{},{},{}",
            num(pt.value),
            current_fields(pt.currents.as_ref(), factor),
            efficiency_fields(pt.efficiency.as_ref(), factor),
            pt.regime,
            pt.in_regime
        )
        .unwrap();
    }
    let maximum = match cfg.objective()? {
        None => None,
        Some(obj) => Some(describe_max(&points, obj, cfg, axis.key)?),
    };
    Ok(CurveOutput { table, maximum })
}

fn describe_max(
    points: &[CurvePoint],
    obj: coherent_machine::sweep::Objective,
    cfg: &RunConfig,
    key: ParamKey,
) -> Result<String, Failure> {
    let best = find_max_power(points, obj)?;
    let value = obj.value(best).expect("maximiser has a value");
    let value = match obj {
        coherent_machine::sweep::Objective::Efficiency => value,
        _ => value * cfg.power_factor(),
    };
    Ok(format!(
        "max {obj:?} = {} at {key} = {} (eta {})",
        num(value),
        num(best.value),
        opt(best.eta())
    ))
}

pub fn collide(cfg: &RunConfig) -> Result<String, Failure> {
    let p = cfg.params;
    let n = cfg.usize_or("collisions", 1000)?;
    let stride = cfg.usize_or("stride", 1)?.max(1);
    let rho0 = match cfg.str("initial").unwrap_or("mixed") {
        "mixed" => DensityMatrix::maximally_mixed(3),
        "steady" => solve_ness(&p)?,
        other => {
            return Err(Failure::Config(format!(
                "bad value for `initial`: expected mixed or steady, got `{other}`"
            )))
        }
    };
    let run = run_collisions(&rho0, &p, n)?;

    let mut out = String::from(
        "step,time,rho00,rho11,rho22,re_rho01,im_rho01,re_rho02,im_rho02,re_rho12,im_rho12,\
         Q1,Q2,Q3,W1,W2,W3,cumQ1,cumQ2,cumQ3,cumW1,cumW2,cumW3,dE_S,W_mec,S_tot,\
         relent1,relent2,relent3,coherence_bound1,coherence_bound2,coherence_bound3,first_law_residual\n",
    );
    let mut cum_q = [0.0; 3];
    let mut cum_w = [0.0; 3];
    for (k, r) in run.records.iter().enumerate() {
        for i in 0..3 {
            cum_q[i] += r.heat[i];
            cum_w[i] += r.work[i];
        }
        let step = k + 1;
        if step % stride != 0 && step != n {
            continue;
        }
        let rho = &r.rho_after;
        let mut f = vec![step as f64 * p.tau];
        f.extend((0..3).map(|j| rho.entry(j, j).re));
        for (j, l) in [(0, 1), (0, 2), (1, 2)] {
            f.push(rho.entry(j, l).re);
            f.push(rho.entry(j, l).im);
        }
        f.extend(r.heat);
        f.extend(r.work);
        f.extend(cum_q);
        f.extend(cum_w);
        f.extend([r.delta_e_sys, r.w_mec, r.s_tot]);
        f.extend(r.relent);
        f.extend(r.coherence_bound);
        f.push(r.first_law_residual());
        let fields: Vec<String> = f.into_iter().map(num).collect();
        writeln!(out, "{step},{}", fields.join(",")).unwrap();
    }
    Ok(out)
}
