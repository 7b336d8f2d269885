//! Steady phonon number against the bath occupation for full swaps, with
//! and without a small qubit excitation probability.

use std::f64::consts::PI;

use namr_cool::cli::log_grid;
use namr_cool::corrections::{corrected_steady_state, CorrectionOptions};
use namr_cool::device::DeviceParams;
use namr_cool::ProtocolParams;

fn main() -> namr_cool::Result<()> {
    let env = DeviceParams::reference().environment()?;
    let families = [(100.0, 0.0), (1000.0, 0.0), (1000.0, 1e-5), (1000.0, 1e-4)];
    print!("{:>9}", "N_th");
    for (lev, p) in families {
        print!("   R={lev:<5} p={p:<6}");
    }
    println!();
    for n_th in log_grid(1e-2, 1e3, 11) {
        print!("{n_th:>9.3}");
        for (lev, p) in families {
            let params = ProtocolParams::from_dimensionless(
                2.0 * PI * 1e7,
                PI / 2.0,
                lev,
                PI * 1e3,
                n_th,
                0.0,
            )?;
            let s =
                corrected_steady_state(&params, &env, 60, &CorrectionOptions::excitation_only(p))?
                    .value;
            print!("   {:>18.4e}", s.mean_n_s);
        }
        println!();
    }
    Ok(())
}
