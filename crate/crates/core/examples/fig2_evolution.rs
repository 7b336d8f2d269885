//! Transient cooling from a thermal state with weak kicks (g tau = pi/8),
//! N_th = 1.7 and r_a / kappa = 133. Time is printed in units of 1/r_a.

use std::f64::consts::PI;

use namr_cool::dynamics::{
    build_generator, evolve, kick_for, steady_state_analytic, uniform_samples,
};
use namr_cool::{thermal_distribution, ProtocolParams};

fn main() -> namr_cool::Result<()> {
    let params =
        ProtocolParams::from_dimensionless(2.0 * PI * 1e7, PI / 8.0, 133.0, PI * 1e3, 1.7, 0.0)?;
    let n_max = 60;
    let kick = kick_for(&params, n_max)?;
    let gen = build_generator(&params, &kick, n_max)?;
    let steady = steady_state_analytic(&params, &kick, n_max)?;

    let t_end = 150.0 / params.r_a;
    let init = thermal_distribution(params.n_th, n_max)?.value;
    let trace = evolve(&init, &gen, t_end, &uniform_samples(t_end, 151))?;
    println!("r_a t     <n>        p0");
    for i in (0..trace.len()).step_by(10) {
        println!(
            "{:>5.0}   {:.6}   {:.6}",
            trace.times[i] * params.r_a,
            trace.mean_n[i],
            trace.p0[i]
        );
    }
    let settle = trace
        .settling_time(steady.mean_n_s, 0.01)
        .map(|t| t * params.r_a);
    println!(
        "steady <n> = {:.6}, p0 = {:.6}",
        steady.mean_n_s, steady.p0_s
    );
    println!("within 1% of the steady <n> from r_a t = {settle:?}");
    Ok(())
}
