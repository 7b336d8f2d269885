//! The three steady-state routes on the same generator.

use std::f64::consts::PI;
use std::time::Instant;

use namr_cool::dynamics::{
    build_generator, kick_for, steady_state_for, steady_state_long_time, steady_state_numeric,
};
use namr_cool::ProtocolParams;

fn main() -> namr_cool::Result<()> {
    println!("theta    N_th   r_a/k   levels   <n>_s          null-space   long-time");
    for (theta, n_th, lev) in [
        (PI / 8.0, 1.7, 133.0),
        (PI / 2.0, 1.0, 100.0),
        (PI / 2.0, 100.0, 1000.0),
        (PI / 8.0, 100.0, 1.0),
    ] {
        let params =
            ProtocolParams::from_dimensionless(2.0 * PI * 1e7, theta, lev, PI * 1e3, n_th, 0.0)?;
        let t = Instant::now();
        let a = steady_state_for(&params)?;
        let n_max = a.populations.n_max();
        let gen = build_generator(&params, &kick_for(&params, n_max)?, n_max)?;
        let n = steady_state_numeric(&gen)?;
        let l = steady_state_long_time(&gen)?;
        println!(
            "{:.4}  {:>5}  {:>6}  {:>7}   {:.6e}   {:.1e}      {:.1e}    ({:.0?})",
            theta,
            n_th,
            lev,
            n_max,
            a.mean_n_s,
            a.populations.max_abs_diff(&n.populations),
            a.populations.max_abs_diff(&l.populations),
            t.elapsed()
        );
    }
    Ok(())
}
