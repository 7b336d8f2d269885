//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use namr_cool::cli::{Preset, RunConfig};
use namr_cool::corrections::{corrected_steady_state, CorrectionOptions};
use namr_cool::device::{duty_cycle_schedule, DeviceParams, ScheduleInputs};
use namr_cool::dynamics::{
    build_generator, evolve, evolve_stroboscopic, kick_fluctuation, kick_for,
    steady_state_analytic, steady_state_for, steady_state_long_time, steady_state_numeric,
    uniform_samples,
};
use namr_cool::oracle::kick_oracle;
use namr_cool::units::MHZ;
use namr_cool::{
    apply_kick, build_kick_map, thermal_distribution, PhononDistribution, ProtocolParams,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const G: f64 = 2.0 * PI * 10.0 * MHZ;
const KAPPA: f64 = PI * 1e3;

fn params(theta: f64, leverage: f64, n_th: f64, p_e: f64) -> ProtocolParams {
    ProtocolParams::from_dimensionless(G, theta, leverage, KAPPA, n_th, p_e).unwrap()
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match (out, limit) {
        (Ok(d), Some(l)) if elapsed > l => Err(format!("{d}; took {elapsed:.2?} > {l:?}")),
        (Ok(d), _) => Ok(format!("{d}; {elapsed:.2?}")),
        (Err(d), _) => Err(format!("{d}; {elapsed:.2?}")),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n_max = 40;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p_e in [0.0, 0.3, 1.0] {
        for _ in 0..40 {
            let weights: Vec<f64> = (0..=n_max).map(|_| rng.random::<f64>()).collect();
            let dist = PhononDistribution::from_weights(weights).unwrap();
            let theta = rng.random_range(0.0..2.0 * PI);
            let fast = apply_kick(&dist, &build_kick_map(1.0, theta, p_e, n_max).unwrap())
                .unwrap()
                .value;
            let slow = kick_oracle(&dist, 1.0, theta, p_e)
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max(fast.max_abs_diff(&slow));
            cases += 1;
        }
    }
    check(
        worst <= 1e-12,
        format!("{cases} cases, max deviation {worst:.2e}"),
    )
}

fn solver_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for theta in [PI / 8.0, PI / 2.0] {
        for n_th in [0.1, 1.0, 1.7, 10.0, 100.0] {
            for leverage in [1.0, 10.0, 133.0, 100.0, 1000.0] {
                let p = params(theta, leverage, n_th, 0.0);
                let a = steady_state_for(&p).map_err(|e| e.to_string())?;
                let n_max = a.populations.n_max();
                let gen = build_generator(&p, &kick_for(&p, n_max).unwrap(), n_max).unwrap();
                let n = steady_state_numeric(&gen).map_err(|e| e.to_string())?;
                let l = steady_state_long_time(&gen).map_err(|e| e.to_string())?;
                let dev = a
                    .populations
                    .max_abs_diff(&n.populations)
                    .max(a.populations.max_abs_diff(&l.populations))
                    .max(n.populations.max_abs_diff(&l.populations));
                if dev > worst {
                    worst = dev;
                    where_ = format!("theta={theta:.4}, N_th={n_th}, r_a/kappa={leverage}");
                }
            }
        }
    }
    check(
        worst <= 1e-8,
        format!("50 points, max deviation {worst:.2e} at {where_}"),
    )
}

fn weak_damping_limit() -> Outcome {
    let mut worst = 0.0f64;
    for (leverage, n_values) in [
        (100.0, vec![0.01, 0.1, 0.3, 1.0]),
        (1000.0, vec![0.01, 0.1, 1.0, 3.0, 10.0]),
    ] {
        for n_th in n_values {
            let s = steady_state_for(&params(PI / 2.0, leverage, n_th, 0.0))
                .map_err(|e| e.to_string())?;
            let expect = n_th / leverage;
            worst = worst.max((s.mean_n_s - expect).abs() / expect);
        }
    }
    check(
        worst <= 0.10,
        format!(
            "max relative deviation from N_th kappa / r_a {:.2}%",
            100.0 * worst
        ),
    )
}

fn sweep_scalings() -> Outcome {
    let config = RunConfig::preset(
        namr_cool::cli::Mode::Sweep,
        Preset::Fig3,
        &Default::default(),
    )
    .unwrap();
    let report = namr_cool::cli::run(&config).map_err(|e| e.to_string())?;
    let n = report.numbers("N_th").unwrap();
    let r = report.numbers("ra_over_kappa").unwrap();
    let p = report.numbers("p").unwrap();
    let m = report.numbers("mean_n_s").unwrap();
    let rows: Vec<_> = (0..n.len()).map(|i| (n[i], r[i], p[i], m[i])).collect();
    let curve = |lev: f64, pe: f64| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|x| x.1 == lev && x.2 == pe)
            .map(|x| (x.0, x.3))
            .collect()
    };
    let mut worst = 1.0f64;
    for (lev, n_limit) in [(100.0, 1.0), (1000.0, 10.0)] {
        for (n_th, mean) in curve(lev, 0.0)
            .into_iter()
            .filter(|x| x.0 <= n_limit * (1.0 + 1e-12))
        {
            let ratio = mean / (n_th / lev);
            worst = worst.max(ratio.max(1.0 / ratio));
        }
    }
    if worst > 1.5 {
        return Err(format!("scaling off by a factor {worst:.3}"));
    }

    // with p = 1e-4 the curve flattens at small N_th
    let hot = curve(1000.0, 1e-4);
    let cold = curve(1000.0, 0.0);
    let slope = |c: &[(f64, f64)]| (c[1].1 / c[0].1).ln() / (c[1].0 / c[0].0).ln();
    let (s_hot, s_cold) = (slope(&hot), slope(&cold));
    if !(s_hot < 0.5 * s_cold && hot[0].1 > 5.0 * cold[0].1) {
        return Err(format!("no floor: slopes {s_hot:.3} vs {s_cold:.3}"));
    }

    // first-level ratio at N_th = 0 against the closed form p R / (1 + (1 - p) R)
    let (pe, lev) = (1e-4, 1000.0);
    let want = pe * lev / (1.0 + (1.0 - pe) * lev);
    let env = DeviceParams::reference().environment().unwrap();
    let s = corrected_steady_state(
        &params(PI / 2.0, lev, 0.0, 0.0),
        &env,
        60,
        &CorrectionOptions::excitation_only(pe),
    )
    .map_err(|e| e.to_string())?
    .value;
    let got = s.populations.p(1) / s.populations.p(0);
    let rel = (got - want).abs() / want;
    check(
        rel <= 0.05,
        format!("scaling factor {worst:.3}; floor slope {s_hot:.3} vs {s_cold:.3}; p1/p0 = {got:.4e} vs {want:.4e}"),
    )
}

fn transient_convergence() -> Outcome {
    let p = params(PI / 8.0, 133.0, 1.7, 0.0);
    let n_max = 60;
    let kick = kick_for(&p, n_max).unwrap();
    let s = steady_state_analytic(&p, &kick, n_max).map_err(|e| e.to_string())?;
    let gen = build_generator(&p, &kick, n_max).unwrap();
    let t_end = 200.0 / p.r_a;
    let init = thermal_distribution(p.n_th, n_max).unwrap().value;
    let trace =
        evolve(&init, &gen, t_end, &uniform_samples(t_end, 801)).map_err(|e| e.to_string())?;
    let settle = trace
        .settling_time(s.mean_n_s, 0.01)
        .ok_or("never settles")?
        * p.r_a;
    if !(40.0..=90.0).contains(&settle) {
        return Err(format!("settles at r_a t = {settle:.2}"));
    }

    let strobe = evolve_stroboscopic(&init, &p, &kick, 600).map_err(|e| e.to_string())?;
    let amplitude = strobe.last().unwrap().drop();
    let predicted = kick_fluctuation(&s.populations, &kick).unwrap();
    let rel = (amplitude - predicted).abs() / predicted;
    check(
        rel <= 0.05,
        format!(
            "settles at r_a t = {settle:.2}; sawtooth {amplitude:.4e} vs {predicted:.4e} ({:.2}%)",
            100.0 * rel
        ),
    )
}

fn cooling_guarantee() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (0.05f64..2.0 * PI, -1.0f64..4.0, -3.0f64..2.0);
    let margin = std::cell::Cell::new(f64::INFINITY);
    let result = runner.run(&strategy, |(theta, log_lev, log_n)| {
        let p = params(theta, 10f64.powf(log_lev), 10f64.powf(log_n), 0.0);
        let s = steady_state_for(&p).unwrap();
        margin.set(margin.get().min((p.n_th - s.mean_n_s) / p.n_th));
        prop_assert!(
            s.mean_n_s < p.n_th,
            "mean {} >= N_th {}",
            s.mean_n_s,
            p.n_th
        );
        Ok(())
    });
    match result {
        Ok(()) => Ok(format!(
            "200 cases, smallest relative margin {:.2e}",
            margin.get()
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn hot_limit() -> Outcome {
    let n_th: f64 = 100.0;
    let geometric = n_th / (n_th + 1.0);
    let mut details = Vec::new();
    let mut ok = true;
    for theta in [PI / 8.0, PI / 2.0] {
        let s = steady_state_for(&params(theta, 1.0, n_th, 0.0)).map_err(|e| e.to_string())?;
        let pops = s.populations.populations();
        let worst = (1..=20)
            .map(|n| ((pops[n] / pops[n - 1]) / geometric - 1.0).abs())
            .fold(0.0, f64::max);
        ok &= worst <= 0.01;
        details.push(format!("theta={theta:.4}: {:.3}%", 100.0 * worst));
    }
    check(
        ok,
        format!("successive ratios vs N/(N+1), {}", details.join(", ")),
    )
}

fn device_numbers() -> Outcome {
    let dev = DeviceParams::reference();
    let env = dev.environment().unwrap();
    let tau = 25e-9;
    let items = [
        ("n_x", dev.n_x(), 15.0, 0.10),
        ("alpha_g", dev.alpha_g(), 1e-4, 0.20),
        ("Gamma(E_J) MHz", env.gamma_reset() / MHZ, 40.0, 0.15),
        ("Gamma(omega0) MHz", env.gamma_resonant() / MHZ, 0.56, 0.30),
        ("heating", env.gamma_resonant() * tau / 2.0, 7e-3, 0.10),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, got, want, tol) in items {
        let rel = (got - want).abs() / want;
        ok &= rel <= tol;
        parts.push(format!(
            "{name}={got:.4} ({:+.1}%)",
            100.0 * (got - want) / want
        ));
    }
    let kappa_exact = (dev.kappa() - PI * 1e-3 * MHZ).abs() <= 1e-12 * dev.kappa();
    ok &= kappa_exact;
    let sched = duty_cycle_schedule(&ScheduleInputs::new(G, 40.0 * MHZ, 3.0 * MHZ, tau));
    ok &= sched.closes;
    parts.push(format!(
        "kappa exact: {kappa_exact}, cycle {:.0} ns <= {:.0} ns",
        sched.cycle_time * 1e9,
        sched.period * 1e9
    ));
    check(ok, parts.join(", "))
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_namr-cool");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = [
        ("evolve", "fig2", "csv"),
        ("strobe", "fig2", "csv"),
        ("steady", "fig2", "json"),
        ("sweep", "fig3", "csv"),
        ("sweep", "fig3", "json"),
        ("device", "device-paper", "csv"),
        ("device", "device-paper", "json"),
    ];
    for (mode, preset, format) in runs {
        let mut outputs = Vec::new();
        for (i, jobs) in ["1", "4"].into_iter().enumerate() {
            let path = dir.path().join(format!("{mode}-{preset}-{i}.{format}"));
            let status = Command::new(exe)
                .args([
                    mode, "--preset", preset, "--format", format, "--jobs", jobs, "--output",
                ])
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{mode} --preset {preset} exited with {status}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!(
                "{mode} --preset {preset} ({format}) differs between runs"
            ));
        }
    }
    check(true, format!("{} preset runs byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        (
            "1 oracle equivalence",
            Some(Duration::from_secs(10)),
            oracle_equivalence,
        ),
        (
            "2 solver cross-agreement",
            Some(Duration::from_secs(60)),
            solver_agreement,
        ),
        ("3 weak-damping limit", None, weak_damping_limit),
        ("4 sweep scalings and floor", None, sweep_scalings),
        ("5 transient convergence", None, transient_convergence),
        ("6 cooling guarantee", None, cooling_guarantee),
        ("7 hot limit", None, hot_limit),
        ("8 device numbers", None, device_numbers),
        ("9 determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        match timed(limit, f) {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
