//! Invariant checks at the configured point. Each check yields one line.

use std::f64::consts::PI;

use coherent_machine::collision::{generator_convergence, run_collisions};
use coherent_machine::efficiency::{generic_efficiency, regime_efficiency};
use coherent_machine::linalg::eigh;
use coherent_machine::lindblad::{generator_residual, residual_tolerance, solve_ness};
use coherent_machine::regimes::{
    classify, regime_vi_work_condition, thermal_baseline, transition_lambdas,
};
use coherent_machine::thermo::{reference_power_scale, steady_currents};
use coherent_machine::{Bath, DensityMatrix, MachineParams};

type Check = Result<String, String>;

fn check(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn ness_is_state(p: &MachineParams) -> Check {
    let rho = solve_ness(p).map_err(err)?;
    let residual = generator_residual(p, &rho);
    let trace: f64 = rho.populations().iter().sum();
    let min_eig = eigh(rho.matrix())
        .map_err(err)?
        .0
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    check(
        residual <= residual_tolerance(p) && (trace - 1.0).abs() <= 1e-12 && min_eig >= -1e-12,
        format!(
            "residual {residual:.2e}, trace error {:.2e}, min eigenvalue {min_eig:.2e}",
            trace - 1.0
        ),
    )
}

fn thermal_closed_form(p: &MachineParams) -> Check {
    let q = MachineParams {
        lambda: [0.0; 3],
        ..*p
    };
    let rho = solve_ness(&q).map_err(err)?;
    let t = thermal_baseline(&q).map_err(err)?;
    let (_, c) = steady_currents(&q).map_err(err)?;
    let pop_err = (0..3)
        .map(|i| (rho.populations()[i] - t.populations[i]).abs())
        .fold(0.0, f64::max);
    let [b1, b2, b3] = q.spacings();
    let expected = [-b1 * t.v_ss, b2 * t.v_ss, -b3 * t.v_ss];
    let cur_err = (0..3)
        .map(|i| (c.qdot[i] - expected[i]).abs())
        .fold(0.0, f64::max)
        / expected
            .iter()
            .fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
    let work = c.wdot.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    check(
        pop_err <= 1e-10 && cur_err <= 1e-10 && work == 0.0,
        format!("population error {pop_err:.2e}, relative current error {cur_err:.2e}"),
    )
}

fn laws(p: &MachineParams) -> Check {
    let (_, c) = steady_currents(p).map_err(err)?;
    let c = c.in_reference_units(p);
    let tol = 1e-10 * c.power_scale().max(1.0);
    check(
        c.first_law_residual.abs() <= tol && c.sdot_tot >= -tol,
        format!(
            "first law residual {:.2e}, entropy production {:.3e}",
            c.first_law_residual, c.sdot_tot
        ),
    )
}

/// Currents are phase independent when a single reservoir is coherent.
fn gauge(p: &MachineParams) -> Check {
    let mut worst: f64 = 0.0;
    for bath in Bath::ALL {
        let i = bath.index();
        let lambda = if p.lambda[i] > 0.0 { p.lambda[i] } else { 0.1 };
        let q = MachineParams {
            lambda: [0.0; 3],
            phi: [0.0; 3],
            ..*p
        }
        .with_coherence(bath, lambda, 0.0);
        let (_, c0) = steady_currents(&q).map_err(err)?;
        let c0 = c0.in_reference_units(&q);
        for phi in [PI / 3.0, 4.0 * PI / 5.0, 1.9 * PI] {
            let (_, c) = steady_currents(&q.with_coherence(bath, lambda, phi)).map_err(err)?;
            let c = c.in_reference_units(&q);
            for k in 0..3 {
                worst = worst
                    .max((c.qdot[k] - c0.qdot[k]).abs())
                    .max((c.wdot[k] - c0.wdot[k]).abs());
            }
        }
    }
    check(worst <= 1e-9, format!("max current change {worst:.2e}"))
}

/// Currents vanish at the closed-form transition amplitudes.
fn transitions(p: &MachineParams) -> Check {
    let mut worst: f64 = 0.0;
    let mut found = 0;
    let scale = reference_power_scale(p);
    for bath in Bath::ALL {
        let i = bath.index();
        let q = MachineParams {
            lambda: [0.0; 3],
            ..*p
        };
        let t = transition_lambdas(&q, bath).map_err(err)?;
        let with = |l: f64| q.with_coherence(bath, l, p.phi[i]);
        if let Some(l) = t.star {
            let (_, c) = steady_currents(&with(l)).map_err(err)?;
            for k in (0..3).filter(|&k| k != i) {
                worst = worst.max(c.qdot[k].abs() * scale);
            }
            found += 1;
        }
        if let Some(l) = t.nonequilibrium {
            let (_, c) = steady_currents(&with(l)).map_err(err)?;
            worst = worst.max(c.qdot[i].abs() * scale);
            found += 1;
        }
    }
    check(
        worst <= 1e-8,
        format!("{found} transition amplitudes, max residual current {worst:.2e}"),
    )
}

fn collisions(p: &MachineParams) -> Check {
    let run = run_collisions(&DensityMatrix::maximally_mixed(3), p, 200).map_err(err)?;
    let mut w_mec: f64 = 0.0;
    let mut first: f64 = 0.0;
    let mut s_tot = f64::INFINITY;
    let mut relent = f64::INFINITY;
    let mut bound = f64::INFINITY;
    let mut joint = f64::INFINITY;
    for r in &run.records {
        w_mec = w_mec.max(r.w_mec.abs());
        first = first.max(r.first_law_residual().abs());
        s_tot = s_tot.min(r.s_tot);
        joint = joint.min(r.joint_min_eigenvalue);
        for i in 0..3 {
            relent = relent.min(r.relent[i]);
            bound = bound.min(r.coherence_bound[i]);
        }
    }
    check(
        w_mec <= 1e-12 && first <= 1e-12 && s_tot >= -1e-11 && relent >= -1e-12 && bound >= -1e-10 && joint >= -1e-11,
        format!(
            "200 collisions: |W_mec| {w_mec:.1e}, first law {first:.1e}, min S_tot {s_tot:.2e}, \
             min relative entropy {relent:.2e}, min coherence bound {bound:.2e}, min joint eigenvalue {joint:.1e}"
        ),
    )
}

fn convergence(p: &MachineParams) -> Check {
    let c = generator_convergence(p).map_err(err)?;
    Ok(format!(
        "generator discrepancy {:.2e}, halving ratio {:.3}",
        c.discrepancy, c.ratio
    ))
}

fn efficiency(p: &MachineParams, eps: f64) -> Check {
    let (_, c) = steady_currents(p).map_err(err)?;
    let regime = classify(&c.in_reference_units(p), eps);
    if regime.sign_pattern().is_none() {
        return Ok(format!("regime {regime}: no efficiency"));
    }
    let e = regime_efficiency(&c, regime, p.temperature).map_err(err)?;
    let (Some(eta), Some(t_r)) = (e.eta, e.reference_temperature) else {
        return Ok(format!("regime {regime}: efficiency not defined"));
    };
    let generic = generic_efficiency(&c, p.temperature, t_r).ok_or("no input power")?;
    let gap = (eta - generic).abs();
    check(
        gap <= 1e-12 * eta.abs().max(1.0) && (0.0..=1.0 + 1e-10).contains(&eta),
        format!("regime {regime}: eta {eta:.6}, closed form gap {gap:.1e}"),
    )
}

fn hot_work_condition(p: &MachineParams) -> Check {
    let q = MachineParams {
        lambda: [0.0; 3],
        ..*p
    }
    .with_coherence(Bath::Hot, p.lambda[2].max(0.1), p.phi[2]);
    let predicted = regime_vi_work_condition(&q).map_err(err)?;
    let (_, c) = steady_currents(&q).map_err(err)?;
    let w3 = c.wdot[2] * reference_power_scale(&q);
    let tiny = w3.abs() < 1e-9;
    check(
        tiny || predicted == (w3 < 0.0),
        format!("predicted work output {predicted}, Wdot3 {w3:.3e}"),
    )
}

/// Runs every check and returns `(name, outcome)` in a fixed order.
pub fn run_checks(p: &MachineParams, eps: f64) -> Vec<(&'static str, Check)> {
    vec![
        ("steady state is a valid fixed point", ness_is_state(p)),
        ("thermal closed form", thermal_closed_form(p)),
        ("first and second law", laws(p)),
        ("phase independence", gauge(p)),
        ("transition amplitudes", transitions(p)),
        ("collision bookkeeping", collisions(p)),
        ("collisional generator convergence", convergence(p)),
        ("efficiency closed form", efficiency(p, eps)),
        ("hot coherence work sign", hot_work_condition(p)),
    ]
}
