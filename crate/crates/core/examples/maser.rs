//! Kicks with an excited qubit pump the resonator instead of cooling it.
//! With full swaps the pumping stalls where sin(g tau sqrt(n)) vanishes.

use std::f64::consts::PI;

use namr_cool::dynamics::{steady_state_for, steady_state_numeric_for};
use namr_cool::ProtocolParams;

fn main() -> namr_cool::Result<()> {
    for theta in [PI / 2.0, 0.3] {
        let params =
            ProtocolParams::from_dimensionless(2.0 * PI * 1e7, theta, 1000.0, PI * 1e3, 0.1, 1.0)?;
        let a = steady_state_for(&params)?;
        let n = steady_state_numeric_for(&params, a.populations.n_max())?;
        println!(
            "g tau = {theta:.4}: <n>_s = {:.4} over {} levels, solvers differ by {:.1e}",
            a.mean_n_s,
            a.populations.n_max(),
            a.populations.max_abs_diff(&n.populations)
        );
        let head: Vec<String> = a
            .populations
            .populations()
            .iter()
            .take(8)
            .map(|p| format!("{p:.2e}"))
            .collect();
        println!("  p_0..p_7 = [{}]", head.join(", "));
    }
    Ok(())
}
