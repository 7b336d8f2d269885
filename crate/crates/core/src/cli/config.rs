//! Run configuration: a TOML file with unit-suffixed keys.
//!
//! Keys ending in `_mhz` are rates or angular frequencies in units of
//! 10^6 s^-1. Energies may be given in micro-eV (`_uev`) or as an angular
//! frequency (`_mhz`).

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::model::ProtocolParams;
use crate::units::{ATTOFARAD, HBAR, MHZ, MICRO_EV, MILLIKELVIN, NANOSECOND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Strobe,
    Steady,
    Sweep,
    Device,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    DevicePaper,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig2, Preset::Fig3, Preset::DevicePaper];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::DevicePaper => "device-paper",
        }
    }

    /// The preset as configuration text.
    pub fn source(self) -> &'static str {
        match self {
            Preset::Fig2 => FIG2,
            Preset::Fig3 => FIG3,
            Preset::DevicePaper => DEVICE_PAPER,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

const FIG2: &str = r#"# Transient cooling from a thermal start: weak kicks (g tau = pi/8),
# N_th = 1.7 and r_a / kappa = 133. Time is reported in units of 1/r_a.
[protocol]
g_mhz = 62.83185307179586          # 2 pi x 10 MHz
pulse_area_pi = 0.125              # g tau = pi/8
kappa_mhz = 0.0031415926535897933  # pi x 10^-3 MHz
ra_over_kappa = 133.0
n_th = 1.7
p_e = 0.0

[evolve]
t_end_ra = 150.0
samples = 301

[strobe]
kicks = 200
"#;

const FIG3: &str = r#"# Steady phonon number against the initial thermal occupation for full
# swaps (g tau = pi/2), leverage r_a / kappa of 10^2 and 10^3, and qubit
# excitation probabilities 0, 10^-5 and 10^-4.
[protocol]
g_mhz = 62.83185307179586          # 2 pi x 10 MHz
pulse_area_pi = 0.5                # g tau = pi/2
kappa_mhz = 0.0031415926535897933  # pi x 10^-3 MHz
ra_over_kappa = 100.0
n_th = 1.0
p_e = 0.0

[sweep]
n_th_min = 0.01
n_th_max = 1000.0
n_th_count = 51
ra_over_kappa = [100.0, 1000.0]
p = [0.0, 1e-5, 1e-4]

# qubit environment used when fidelity corrections are requested
[device]
ej_mhz = 125663.70614359173
cx_af = 20.0
cg_af = 20.0
cj_af = 210.0
vx_v = 0.25
r_ohm = 50.0
temperature_mk = 10.0
omega0_mhz = 628.3185307179587
q = 200000.0
g_mhz = 62.83185307179586
tau_ns = 25.0
ra_mhz = 3.0
"#;

const DEVICE_PAPER: &str = r#"# Reference charge-qubit device: 100 MHz resonator with Q = 2 x 10^5 at
# 10 mK, 20 aF coupling and gate capacitances in a 250 aF island, 50 ohm
# lines, 0.25 V bias, coupling 2 pi x 10 MHz, 25 ns kicks at 3 MHz.
# The Josephson splitting is the angular frequency 4 pi x 10^4 MHz.
[device]
ej_mhz = 125663.70614359173
cx_af = 20.0
cg_af = 20.0
cj_af = 210.0
vx_v = 0.25
r_ohm = 50.0
temperature_mk = 10.0
omega0_mhz = 628.3185307179587     # 2 pi x 100 MHz
q = 200000.0
g_mhz = 62.83185307179586
tau_ns = 25.0
ra_mhz = 3.0
"#;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub protocol: Option<ProtocolSection>,
    pub device: Option<DeviceSection>,
    pub sweep: Option<SweepSection>,
    pub evolve: Option<EvolveSection>,
    pub strobe: Option<StrobeSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub g_mhz: Option<f64>,
    pub tau_ns: Option<f64>,
    pub pulse_area: Option<f64>,
    /// Pulse area in units of pi.
    pub pulse_area_pi: Option<f64>,
    pub kappa_mhz: Option<f64>,
    pub ra_mhz: Option<f64>,
    pub ra_over_kappa: Option<f64>,
    pub n_th: Option<f64>,
    pub p_e: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub ej_uev: Option<f64>,
    pub ej_mhz: Option<f64>,
    pub ec_uev: Option<f64>,
    pub cx_af: Option<f64>,
    pub cg_af: Option<f64>,
    pub cj_af: Option<f64>,
    pub vx_v: Option<f64>,
    pub vg_v: Option<f64>,
    pub r_ohm: Option<f64>,
    pub temperature_mk: Option<f64>,
    pub omega0_mhz: Option<f64>,
    pub q: Option<f64>,
    pub mass_kg: Option<f64>,
    pub gap_nm: Option<f64>,
    pub g_mhz: Option<f64>,
    pub tau_ns: Option<f64>,
    pub pulse_area: Option<f64>,
    pub ra_mhz: Option<f64>,
    pub reset_multiplier: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n_th: Option<Vec<f64>>,
    pub n_th_min: Option<f64>,
    pub n_th_max: Option<f64>,
    pub n_th_count: Option<usize>,
    pub ra_over_kappa: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub with_fidelity: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub t_end_ra: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrobeSection {
    pub kicks: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    pub n_max: Option<usize>,
}

/// Device description plus the kick schedule it is operated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviceSetup {
    pub device: DeviceParams,
    pub tau: Option<f64>,
    pub pulse_area: Option<f64>,
    pub r_a: f64,
    pub reset_multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub n_th: Vec<f64>,
    pub ra_over_kappa: Vec<f64>,
    pub p: Vec<f64>,
    pub with_fidelity: bool,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.n_th.len() * self.ra_over_kappa.len() * self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fully resolved run description in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub protocol: Option<ProtocolParams>,
    pub device: Option<DeviceSetup>,
    pub sweep: Option<SweepGrid>,
    pub t_end_ra: f64,
    pub samples: usize,
    pub kicks: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub n_max: Option<usize>,
    #[serde(skip)]
    pub jobs: Option<usize>,
    pub with_fidelity: bool,
}

fn cfg<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing key {what}")))
}

fn one_of<T>(a: Option<T>, b: Option<T>, names: &str) -> Result<Option<T>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::Config(format!("give only one of {names}"))),
        (a, b) => Ok(a.or(b)),
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ProtocolSection {
    pub fn resolve(&self) -> Result<ProtocolParams> {
        let g = cfg(self.g_mhz, "protocol.g_mhz")? * MHZ;
        let area = one_of(
            self.pulse_area,
            self.pulse_area_pi.map(|a| a * std::f64::consts::PI),
            "pulse_area, pulse_area_pi",
        )?;
        let tau = match one_of(
            self.tau_ns.map(|t| t * NANOSECOND),
            area.map(|a| a / g),
            "tau_ns, pulse_area",
        )? {
            Some(t) => t,
            None => {
                return Err(Error::Config(
                    "missing key protocol.tau_ns or protocol.pulse_area".into(),
                ))
            }
        };
        let kappa = cfg(self.kappa_mhz, "protocol.kappa_mhz")? * MHZ;
        let r_a = match one_of(
            self.ra_mhz.map(|r| r * MHZ),
            self.ra_over_kappa.map(|r| r * kappa),
            "ra_mhz, ra_over_kappa",
        )? {
            Some(r) => r,
            None => {
                return Err(Error::Config(
                    "missing key protocol.ra_mhz or protocol.ra_over_kappa".into(),
                ))
            }
        };
        let n_th = cfg(self.n_th, "protocol.n_th")?;
        ProtocolParams::new(g, tau, r_a, kappa, n_th, self.p_e.unwrap_or(0.0)).map_err(config_err)
    }
}

impl DeviceSection {
    pub fn resolve(&self) -> Result<DeviceSetup> {
        let e_j = one_of(
            self.ej_uev.map(|e| e * MICRO_EV),
            self.ej_mhz.map(|w| w * MHZ * HBAR),
            "ej_uev, ej_mhz",
        )?;
        let device = DeviceParams {
            e_j: cfg(e_j, "device.ej_uev or device.ej_mhz")?,
            e_c: self.ec_uev.map(|e| e * MICRO_EV),
            c_x: cfg(self.cx_af, "device.cx_af")? * ATTOFARAD,
            c_g: cfg(self.cg_af, "device.cg_af")? * ATTOFARAD,
            c_j: cfg(self.cj_af, "device.cj_af")? * ATTOFARAD,
            v_x: cfg(self.vx_v, "device.vx_v")?,
            v_g: self.vg_v,
            resistance: cfg(self.r_ohm, "device.r_ohm")?,
            temperature: cfg(self.temperature_mk, "device.temperature_mk")? * MILLIKELVIN,
            omega0: cfg(self.omega0_mhz, "device.omega0_mhz")? * MHZ,
            quality: cfg(self.q, "device.q")?,
            mass: self.mass_kg,
            gap: self.gap_nm.map(|d| d * 1e-9),
            g_override: self.g_mhz.map(|g| g * MHZ),
        };
        device.validate().map_err(config_err)?;
        let tau = self.tau_ns.map(|t| t * NANOSECOND);
        if tau.is_some() == self.pulse_area.is_some() {
            return Err(Error::Config(
                "give exactly one of device.tau_ns, device.pulse_area".into(),
            ));
        }
        Ok(DeviceSetup {
            device,
            tau,
            pulse_area: self.pulse_area,
            r_a: cfg(self.ra_mhz, "device.ra_mhz")? * MHZ,
            reset_multiplier: self.reset_multiplier.unwrap_or(10.0),
        })
    }
}

/// `count` points spaced evenly in log between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i + 1 == count {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

impl SweepSection {
    pub fn resolve(&self, base: Option<&ProtocolParams>) -> Result<SweepGrid> {
        let n_th = match (&self.n_th, self.n_th_min, self.n_th_max, self.n_th_count) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(lo), Some(hi), Some(count)) => {
                if !(lo > 0.0) || !(hi >= lo) {
                    return Err(Error::Config(format!(
                        "need 0 < n_th_min <= n_th_max, got {lo}, {hi}"
                    )));
                }
                log_grid(lo, hi, count)
            }
            _ => {
                return Err(Error::Config(
                    "sweep needs either n_th or all of n_th_min, n_th_max, n_th_count".into(),
                ))
            }
        };
        let ra_over_kappa = match (&self.ra_over_kappa, base) {
            (Some(list), _) => list.clone(),
            (None, Some(p)) => vec![p.ra_over_kappa()],
            (None, None) => return Err(Error::Config("missing key sweep.ra_over_kappa".into())),
        };
        let p = match (&self.p, base) {
            (Some(list), _) => list.clone(),
            (None, Some(b)) => vec![b.p_e],
            (None, None) => vec![0.0],
        };
        let grid = SweepGrid {
            n_th,
            ra_over_kappa,
            p,
            with_fidelity: self.with_fidelity.unwrap_or(false),
        };
        if grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if grid.n_th.iter().any(|&n| !(n >= 0.0) || !n.is_finite()) {
            return Err(Error::Config(
                "sweep n_th values must be finite and >= 0".into(),
            ));
        }
        if grid
            .ra_over_kappa
            .iter()
            .any(|&r| !(r > 0.0) || !r.is_finite())
        {
            return Err(Error::Config(
                "sweep ra_over_kappa values must be positive".into(),
            ));
        }
        if grid.p.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Config("sweep p values must lie in [0, 1]".into()));
        }
        Ok(grid)
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub n_max: Option<usize>,
    pub jobs: Option<usize>,
    pub with_fidelity: bool,
}

impl RunConfig {
    pub fn parse(mode: Mode, text: &str, overrides: &Overrides) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::from_file(mode, &file, overrides)
    }

    pub fn preset(mode: Mode, preset: Preset, overrides: &Overrides) -> Result<Self> {
        Self::parse(mode, preset.source(), overrides)
    }

    pub fn from_file(mode: Mode, file: &ConfigFile, overrides: &Overrides) -> Result<Self> {
        let protocol = file
            .protocol
            .as_ref()
            .map(ProtocolSection::resolve)
            .transpose()?;
        let device = file
            .device
            .as_ref()
            .map(DeviceSection::resolve)
            .transpose()?;
        let sweep = match (&file.sweep, mode) {
            (Some(s), _) => Some(s.resolve(protocol.as_ref())?),
            (None, Mode::Sweep) => {
                return Err(Error::Config("sweep mode needs a [sweep] section".into()))
            }
            (None, _) => None,
        };
        match mode {
            Mode::Device if device.is_none() => {
                return Err(Error::Config("device mode needs a [device] section".into()))
            }
            Mode::Evolve | Mode::Strobe | Mode::Steady | Mode::Sweep
                if protocol.is_none() && device.is_none() =>
            {
                return Err(Error::Config(
                    "need a [protocol] or [device] section".into(),
                ))
            }
            _ => {}
        }
        let evolve = file.evolve.clone().unwrap_or_default();
        let output = file.output.clone().unwrap_or_default();
        let t_end_ra = evolve.t_end_ra.unwrap_or(150.0);
        if !(t_end_ra > 0.0) {
            return Err(Error::Config(format!(
                "evolve.t_end_ra must be positive, got {t_end_ra}"
            )));
        }
        let samples = evolve.samples.unwrap_or(301);
        if samples < 2 {
            return Err(Error::Config("evolve.samples must be at least 2".into()));
        }
        let n_max = overrides.n_max.or(output.n_max);
        if n_max == Some(0) {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if overrides.jobs == Some(0) {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        Ok(Self {
            mode,
            protocol,
            device,
            sweep,
            t_end_ra,
            samples,
            kicks: file.strobe.as_ref().and_then(|s| s.kicks).unwrap_or(200),
            output: overrides.output.clone().or(output.path),
            format: overrides.format.or(output.format).unwrap_or_default(),
            n_max,
            jobs: overrides.jobs,
            with_fidelity: overrides.with_fidelity
                || file
                    .sweep
                    .as_ref()
                    .and_then(|s| s.with_fidelity)
                    .unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn presets_parse() {
        for preset in Preset::ALL {
            for mode in [Mode::Evolve, Mode::Steady, Mode::Device, Mode::Sweep] {
                let r = RunConfig::preset(mode, preset, &Overrides::default());
                let expect_ok = match mode {
                    Mode::Device => preset != Preset::Fig2,
                    Mode::Sweep => preset == Preset::Fig3,
                    _ => true,
                };
                assert_eq!(
                    r.is_ok(),
                    expect_ok,
                    "{} {:?}: {:?}",
                    preset.name(),
                    mode,
                    r
                );
            }
        }
    }

    #[test]
    fn fig2_values() {
        let c = RunConfig::preset(Mode::Evolve, Preset::Fig2, &Overrides::default()).unwrap();
        let p = c.protocol.unwrap();
        assert!((p.pulse_area() - PI / 8.0).abs() < 1e-15);
        assert!((p.ra_over_kappa() - 133.0).abs() < 1e-12);
        assert!((p.kappa - PI * 1e3).abs() < 1e-9);
        assert_eq!(p.n_th, 1.7);
    }

    #[test]
    fn device_preset_matches_reference() {
        let c =
            RunConfig::preset(Mode::Device, Preset::DevicePaper, &Overrides::default()).unwrap();
        let d = c.device.unwrap().device;
        let r = DeviceParams::reference();
        for (a, b) in [
            (d.e_j, r.e_j),
            (d.c_x, r.c_x),
            (d.omega0, r.omega0),
            (d.g_override.unwrap(), r.g_override.unwrap()),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let o = Overrides::default();
        assert!(RunConfig::parse(Mode::Steady, "[protocol]\ng = 1.0\n", &o).is_err());
        let base = "[protocol]\ng_mhz = 1\ntau_ns = 10\npulse_area = 1\nkappa_mhz = 1\nra_mhz = 1\nn_th = 1\n";
        assert!(matches!(
            RunConfig::parse(Mode::Steady, base, &o),
            Err(Error::Config(_))
        ));
        let empty = "[protocol]\ng_mhz = 1\ntau_ns = 10\nkappa_mhz = 1\nra_mhz = 1\nn_th = 1\n[sweep]\nn_th = []\n";
        assert!(matches!(
            RunConfig::parse(Mode::Sweep, empty, &o),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-2, 1e3, 51);
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[50], 1e3);
        assert!((g[10] - 1e-1).abs() < 1e-15);
    }
}
