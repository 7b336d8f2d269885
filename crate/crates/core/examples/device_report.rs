//! Protocol parameters, qubit relaxation and the kick/reset schedule of the
//! reference device.

use namr_cool::corrections::cooling_floor;
use namr_cool::device::{derive_protocol, duty_cycle_schedule, DeviceParams, ScheduleInputs};
use namr_cool::units::{MHZ, MICRO_EV};

fn main() -> namr_cool::Result<()> {
    let dev = DeviceParams::reference();
    let (params, env) = derive_protocol(&dev, 25e-9, 3.0 * MHZ, None)?;
    println!("n_x            {:.3}", dev.n_x());
    println!("E_c            {:.1} ueV", dev.charging_energy() / MICRO_EV);
    println!("alpha_g        {:.3e}", dev.alpha_g());
    println!("kappa          {:.4e} MHz", params.kappa / MHZ);
    println!("N_th           {:.4}", params.n_th);
    println!("g tau          {:.4} rad", params.pulse_area());
    println!("r_a / kappa    {:.1}", params.ra_over_kappa());
    println!("Gamma(E_J)     {:.2} MHz", env.gamma_reset() / MHZ);
    println!("Gamma(omega0)  {:.3} MHz", env.gamma_resonant() / MHZ);
    println!("p excited      {:.2e}", params.p_e);
    println!("cooling floor  {:.3e}", cooling_floor(&params, &env));

    for r_a in [3.0 * MHZ, 100.0 * MHZ] {
        let report = duty_cycle_schedule(&ScheduleInputs {
            gamma_resonant: Some(env.gamma_resonant()),
            kappa: Some(params.kappa),
            ..ScheduleInputs::new(params.g, env.gamma_reset(), r_a, params.tau)
        });
        println!(
            "r_a = {:>5.1} MHz: cycle {:.0} ns of {:.0} ns, closes = {}, violations = {:?}",
            r_a / MHZ,
            report.cycle_time * 1e9,
            report.period * 1e9,
            report.closes,
            report.violations
        );
    }
    Ok(())
}
