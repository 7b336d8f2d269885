//! Free damping interleaved with instantaneous kicks; the late-time drop per
//! kick matches the kick fluctuation of the coarse-grained steady state.

use std::f64::consts::PI;

use namr_cool::dynamics::{evolve_stroboscopic, kick_fluctuation, kick_for, steady_state_analytic};
use namr_cool::{thermal_distribution, ProtocolParams};

fn main() -> namr_cool::Result<()> {
    let params =
        ProtocolParams::from_dimensionless(2.0 * PI * 1e7, PI / 8.0, 133.0, PI * 1e3, 1.7, 0.0)?;
    let n_max = 60;
    let kick = kick_for(&params, n_max)?;
    let init = thermal_distribution(params.n_th, n_max)?.value;
    let trace = evolve_stroboscopic(&init, &params, &kick, 400)?;

    println!("kick   <n> before   <n> after    drop");
    for k in [0, 1, 2, 9, 49, 99, 399] {
        let r = trace.kicks[k];
        println!(
            "{:>4}   {:.6}     {:.6}     {:.3e}",
            k + 1,
            r.mean_before,
            r.mean_after,
            r.drop()
        );
    }
    let steady = steady_state_analytic(&params, &kick, n_max)?;
    println!(
        "predicted drop {:.4e}",
        kick_fluctuation(&steady.populations, &kick)?
    );
    println!(
        "average over the last 50 periods {:.6}",
        trace.cycle_average(50).unwrap()
    );
    println!("coarse-grained steady <n>        {:.6}", steady.mean_n_s);
    Ok(())
}
