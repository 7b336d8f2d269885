use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{DeviceSetup, Mode, RunConfig, SweepGrid};
use super::output::{Cell, Report};
use crate::corrections::{
    cooling_floor, corrected_steady_state, CorrectionOptions, QubitEnvironment,
};
use crate::device::{derive_protocol, duty_cycle_schedule, ScheduleInputs};
use crate::diagnostics::Warning;
use crate::dynamics::{
    build_generator, evolve, evolve_stroboscopic, kick_fluctuation, kick_for,
    steady_state_analytic, uniform_samples, SteadyStateResult,
};
use crate::error::{Error, Result};
use crate::model::{default_n_max, thermal_distribution, ProtocolParams};
use crate::units::{ATTOFARAD, MHZ, MICRO_EV, NANOSECOND};

/// Process exit status for an error: 2 for configuration, 3 for numerics.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Inconsistent(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

struct Resolved {
    params: ProtocolParams,
    env: Option<QubitEnvironment>,
}

fn resolve(config: &RunConfig) -> Result<Resolved> {
    let derived = config.device.as_ref().map(derive_device).transpose()?;
    match (config.protocol, derived) {
        (Some(params), d) => Ok(Resolved {
            params,
            env: d.map(|(_, env)| env),
        }),
        (None, Some((params, env))) => Ok(Resolved {
            params,
            env: Some(env),
        }),
        (None, None) => Err(Error::Config(
            "need a [protocol] or [device] section".into(),
        )),
    }
}

fn derive_device(setup: &DeviceSetup) -> Result<(ProtocolParams, QubitEnvironment)> {
    derive_protocol(
        &setup.device,
        setup.tau.unwrap_or(0.0),
        setup.r_a,
        setup.pulse_area,
    )
}

fn warning_list(warnings: &[Warning]) -> Value {
    json!(warnings.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn base_metadata(config: &RunConfig, params: &ProtocolParams, n_max: usize) -> Value {
    json!({
        "config": config,
        "protocol": params,
        "pulse_area": params.pulse_area(),
        "ra_over_kappa": params.ra_over_kappa(),
        "n_max": n_max,
        "validity_warnings": warning_list(&params.validity_warnings()),
    })
}

fn steady(
    params: &ProtocolParams,
    env: Option<&QubitEnvironment>,
    n_max: usize,
    with_fidelity: bool,
) -> Result<(SteadyStateResult, Vec<Warning>)> {
    if with_fidelity {
        let env =
            env.ok_or_else(|| Error::Config("--with-fidelity needs a [device] section".into()))?;
        let opts = CorrectionOptions {
            p_override: Some(params.p_e),
            include_fidelity: true,
        };
        let r = corrected_steady_state(params, env, n_max, &opts)?;
        Ok((r.value, r.warnings))
    } else {
        let kick = kick_for(params, n_max)?;
        Ok((steady_state_analytic(params, &kick, n_max)?, Vec::new()))
    }
}

/// Executes one run and returns its report without writing anything.
pub fn run(config: &RunConfig) -> Result<Report> {
    info!("running {:?}", config.mode);
    match config.mode {
        Mode::Evolve => run_evolve(config),
        Mode::Strobe => run_strobe(config),
        Mode::Steady => run_steady(config),
        Mode::Sweep => run_sweep(config),
        Mode::Device => run_device(config),
    }
}

fn run_evolve(config: &RunConfig) -> Result<Report> {
    let Resolved { params, .. } = resolve(config)?;
    if !(params.r_a > 0.0) {
        return Err(Error::Config(
            "evolve reports time in units of 1/r_a and needs r_a > 0".into(),
        ));
    }
    let n_max = config.n_max.unwrap_or_else(|| default_n_max(params.n_th));
    let kick = kick_for(&params, n_max)?;
    let gen = build_generator(&params, &kick, n_max)?;
    let init = thermal_distribution(params.n_th, n_max)?;
    let t_end = config.t_end_ra / params.r_a;
    let trace = evolve(
        &init.value,
        &gen,
        t_end,
        &uniform_samples(t_end, config.samples),
    )?;
    let mut meta = base_metadata(config, &params, n_max);
    if params.kappa > 0.0 {
        let s = steady_state_analytic(&params, &kick, n_max)?;
        meta["steady_mean_n"] = json!(s.mean_n_s);
        meta["steady_p0"] = json!(s.p0_s);
        meta["settling_time_ra"] = json!(trace
            .settling_time(s.mean_n_s, 0.01)
            .map(|t| t * params.r_a));
    }
    meta["initial_warnings"] = warning_list(&init.warnings);
    let rows = (0..trace.len())
        .map(|i| {
            vec![
                Cell::Num(trace.times[i] * params.r_a),
                Cell::Num(trace.mean_n[i]),
                Cell::Num(trace.p0[i]),
            ]
        })
        .collect();
    Ok(Report {
        mode: Mode::Evolve,
        metadata: meta,
        columns: vec!["t_ra", "mean_n", "p0"],
        rows,
    })
}

fn run_strobe(config: &RunConfig) -> Result<Report> {
    let Resolved { params, .. } = resolve(config)?;
    let n_max = config.n_max.unwrap_or_else(|| default_n_max(params.n_th));
    let kick = kick_for(&params, n_max)?;
    let init = thermal_distribution(params.n_th, n_max)?;
    let trace = evolve_stroboscopic(&init.value, &params, &kick, config.kicks)?;
    let mut meta = base_metadata(config, &params, n_max);
    if params.kappa > 0.0 {
        let s = steady_state_analytic(&params, &kick, n_max)?;
        meta["steady_mean_n"] = json!(s.mean_n_s);
        meta["steady_kick_fluctuation"] = json!(kick_fluctuation(&s.populations, &kick)?);
    }
    meta["last_drop"] = json!(trace.last().map(|r| r.drop()));
    meta["warnings"] = warning_list(&trace.warnings);
    let rows = trace
        .kicks
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![
                Cell::Int(k as u64 + 1),
                Cell::Num(r.time * params.r_a),
                Cell::Num(r.mean_before),
                Cell::Num(r.mean_after),
                Cell::Num(r.p0_before),
                Cell::Num(r.p0_after),
            ]
        })
        .collect();
    Ok(Report {
        mode: Mode::Strobe,
        metadata: meta,
        columns: vec![
            "kick",
            "t_ra",
            "mean_before",
            "mean_after",
            "p0_before",
            "p0_after",
        ],
        rows,
    })
}

fn run_steady(config: &RunConfig) -> Result<Report> {
    let Resolved { params, env } = resolve(config)?;
    let n_max = config.n_max.unwrap_or_else(|| default_n_max(params.n_th));
    let (s, warnings) = steady(&params, env.as_ref(), n_max, config.with_fidelity)?;
    let mut meta = base_metadata(config, &params, n_max);
    meta["n_max"] = json!(s.populations.n_max());
    meta["mean_n_s"] = json!(s.mean_n_s);
    meta["delta_n"] = json!(s.delta_n);
    meta["p0_s"] = json!(s.p0_s);
    meta["method"] = json!(s.method);
    meta["warnings"] = warning_list(&warnings);
    if let Some(env) = env.as_ref() {
        meta["cooling_floor"] = json!(cooling_floor(&params, env));
    }
    let rows = s
        .populations
        .populations()
        .iter()
        .enumerate()
        .map(|(n, &p)| vec![Cell::Int(n as u64), Cell::Num(p)])
        .collect();
    Ok(Report {
        mode: Mode::Steady,
        metadata: meta,
        columns: vec!["n", "p_n"],
        rows,
    })
}

fn sweep_points(grid: &SweepGrid) -> Vec<(f64, f64, f64)> {
    let mut points = Vec::with_capacity(grid.len());
    for &r in &grid.ra_over_kappa {
        for &p in &grid.p {
            for &n in &grid.n_th {
                points.push((n, r, p));
            }
        }
    }
    points
}

fn run_sweep(config: &RunConfig) -> Result<Report> {
    let Resolved { params, env } = resolve(config)?;
    let grid = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep mode needs a [sweep] section".into()))?;
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if !(params.kappa > 0.0) {
        return Err(Error::Config(
            "sweeps of the steady state need kappa > 0".into(),
        ));
    }
    let with_fidelity = config.with_fidelity || grid.with_fidelity;
    let points = sweep_points(grid);
    let solve = |&(n_th, leverage, p): &(f64, f64, f64)| -> Result<(Vec<Cell>, Vec<Warning>)> {
        let point = ProtocolParams::new(
            params.g,
            params.tau,
            leverage * params.kappa,
            params.kappa,
            n_th,
            p,
        )?;
        let n_max = config.n_max.unwrap_or_else(|| default_n_max(n_th));
        let (s, warnings) = steady(&point, env.as_ref(), n_max, with_fidelity)?;
        let row = vec![
            Cell::Num(n_th),
            Cell::Num(leverage),
            Cell::Num(p),
            Cell::Num(s.mean_n_s),
            Cell::Num(s.delta_n),
            Cell::Num(s.p0_s),
        ];
        Ok((row, warnings))
    };
    let compute = || points.par_iter().map(solve).collect::<Result<Vec<_>>>();
    let results = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(compute)?,
        None => compute()?,
    };
    let mut warnings: Vec<String> = Vec::new();
    let mut rows = Vec::with_capacity(results.len());
    for (row, ws) in results {
        for w in ws {
            let s = w.to_string();
            if !warnings.contains(&s) {
                warnings.push(s);
            }
        }
        rows.push(row);
    }
    let mut meta = base_metadata(config, &params, config.n_max.unwrap_or(0));
    meta["grid"] = json!(grid);
    meta["with_fidelity"] = json!(with_fidelity);
    meta["warnings"] = json!(warnings);
    Ok(Report {
        mode: Mode::Sweep,
        metadata: meta,
        columns: vec!["N_th", "ra_over_kappa", "p", "mean_n_s", "delta_n", "p0_s"],
        rows,
    })
}

fn run_device(config: &RunConfig) -> Result<Report> {
    let setup = config
        .device
        .as_ref()
        .ok_or_else(|| Error::Config("device mode needs a [device] section".into()))?;
    let dev = &setup.device;
    let (params, env) = derive_device(setup)?;
    let gamma_reset = env.gamma_reset();
    let gamma_resonant = env.gamma_resonant();
    let schedule = duty_cycle_schedule(&ScheduleInputs {
        g: params.g,
        tau: params.tau,
        r_a: params.r_a,
        gamma_reset,
        gamma_resonant: Some(gamma_resonant),
        kappa: Some(params.kappa),
        reset_multiplier: setup.reset_multiplier,
    });
    let num = |name: &str, value: f64, unit: &str| {
        vec![
            Cell::Text(name.into()),
            Cell::Num(value),
            Cell::Text(unit.into()),
        ]
    };
    let mut rows = vec![
        num("g", params.g / MHZ, "MHz"),
        num("tau", params.tau / NANOSECOND, "ns"),
        num("pulse_area", params.pulse_area(), "rad"),
        num("kappa", params.kappa / MHZ, "MHz"),
        num("r_a", params.r_a / MHZ, "MHz"),
        num("ra_over_kappa", params.ra_over_kappa(), "1"),
        num("n_th", params.n_th, "1"),
        num("p_excited", params.p_e, "1"),
        num("n_x", dev.n_x(), "1"),
        num("c_sigma", dev.c_sigma() / ATTOFARAD, "aF"),
        num("e_c", dev.charging_energy() / MICRO_EV, "ueV"),
        num("e_j", dev.e_j / MICRO_EV, "ueV"),
        num("alpha_g", dev.alpha_g(), "1"),
        num("gamma_reset", gamma_reset / MHZ, "MHz"),
        num("gamma_resonant", gamma_resonant / MHZ, "MHz"),
        num("heating_scale", gamma_resonant * params.tau / 2.0, "1"),
        num("cooling_floor", cooling_floor(&params, &env), "1"),
        num("cycle_time", schedule.cycle_time / NANOSECOND, "ns"),
        num("period", schedule.period / NANOSECOND, "ns"),
        num("max_r_a", schedule.max_rate / MHZ, "MHz"),
        num("reset_fidelity", schedule.reset_fidelity, "1"),
        vec![
            Cell::Text("budget_closes".into()),
            Cell::Int(u64::from(schedule.closes)),
            Cell::Text("bool".into()),
        ],
    ];
    if let Some(geo) = dev.geometric_coupling() {
        rows.push(num("g_geometric", geo / MHZ, "MHz"));
    }
    let mut meta = base_metadata(config, &params, 0);
    meta["environment"] = json!(env);
    meta["schedule"] = json!(schedule);
    Ok(Report {
        mode: Mode::Device,
        metadata: meta,
        columns: vec!["quantity", "value", "unit"],
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Overrides, Preset};

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::DegenerateKernel(2)), 3);
    }

    #[test]
    fn device_report_closes_budget() {
        let c =
            RunConfig::preset(Mode::Device, Preset::DevicePaper, &Overrides::default()).unwrap();
        let r = run(&c).unwrap();
        let closes = r
            .rows
            .iter()
            .find(|row| row[0] == Cell::Text("budget_closes".into()))
            .unwrap();
        assert_eq!(closes[1], Cell::Int(1));
    }

    #[test]
    fn steady_preset_rows_are_normalized() {
        let c = RunConfig::preset(Mode::Steady, Preset::Fig2, &Overrides::default()).unwrap();
        let r = run(&c).unwrap();
        let total: f64 = r.numbers("p_n").unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_without_environment_is_a_config_error() {
        let o = Overrides {
            with_fidelity: true,
            ..Overrides::default()
        };
        let c = RunConfig::preset(Mode::Steady, Preset::Fig2, &o).unwrap();
        assert_eq!(exit_code(&run(&c).unwrap_err()), 2);
    }
}
