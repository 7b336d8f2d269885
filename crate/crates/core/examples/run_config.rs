//! Building a run from configuration text and rendering its table.

use namr_cool::cli::{run, Format, Mode, Overrides, RunConfig};

const CONFIG: &str = r#"
[protocol]
g_mhz = 62.83185307179586
pulse_area_pi = 0.5
kappa_mhz = 0.0031415926535897933
ra_over_kappa = 100.0
n_th = 1.0

[sweep]
n_th = [0.01, 0.1, 1.0, 10.0]
ra_over_kappa = [100.0, 1000.0]
"#;

fn main() -> namr_cool::Result<()> {
    let config = RunConfig::parse(Mode::Sweep, CONFIG, &Overrides::default())?;
    let report = run(&config)?;
    print!("{}", report.render(Format::Csv));
    Ok(())
}
