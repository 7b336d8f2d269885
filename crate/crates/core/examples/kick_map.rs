//! One kick acting on a thermal phonon distribution.

use std::f64::consts::PI;

use namr_cool::{apply_kick, build_kick_map, thermal_distribution};

fn main() -> namr_cool::Result<()> {
    let n_max = 60;
    let before = thermal_distribution(1.7, n_max)?.value;
    println!("pulse area   <n> after   p0 after   swap prob n=1");
    for frac in [0.125, 0.25, 0.5, 1.0] {
        let kick = build_kick_map(1.0, frac * PI, 0.0, n_max)?;
        let after = apply_kick(&before, &kick)?.value;
        println!(
            "{:>6.3} pi   {:>9.5}   {:>8.5}   {:>13.5}",
            frac,
            after.mean(),
            after.vacuum_probability(),
            kick.down_probability(1)
        );
    }
    println!(
        "before: <n> = {:.5}, p0 = {:.5}",
        before.mean(),
        before.vacuum_probability()
    );
    Ok(())
}
