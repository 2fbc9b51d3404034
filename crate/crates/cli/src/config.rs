//! JSON experiment configuration.
//!
//! Rates, detunings and Rabi frequencies are in units of `gamma`. Angles
//! (`atom.phi`, `grid.phi`) are read in the unit named by `angle_unit`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use twophoton_core::AtomParams;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Coeffs,
    Evolve,
    Steady,
    ScanReit,
    ScanDrr,
    OracleCompare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Coeffs => "coeffs",
            Self::Evolve => "evolve",
            Self::Steady => "steady",
            Self::ScanReit => "scan-reit",
            Self::ScanDrr => "scan-drr",
            Self::OracleCompare => "oracle-compare",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    pub fn to_radians(self, x: f64) -> f64 {
        match self {
            Self::Radians => x,
            Self::Degrees => x.to_radians(),
        }
    }
}

/// A grid axis: an explicit list or an inclusive evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range(RangeAxis),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeAxis {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Range(r) if r.steps == 1 => vec![r.start],
            Self::Range(r) => {
                let h = (r.stop - r.start) / (r.steps - 1) as f64;
                (0..r.steps)
                    .map(|k| if k + 1 == r.steps { r.stop } else { r.start + h * k as f64 })
                    .collect()
            }
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        if let Self::Range(r) = self {
            if r.steps == 0 {
                return Err(CliError::config(format!("axis `{name}` has zero steps")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::config(format!("axis `{name}` is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!("axis `{name}` has a non-finite value")));
        }
        Ok(())
    }
}

/// Atomic and cavity parameters; omitted fields take the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomConfig {
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub gamma: f64,
    pub gamma_bc: f64,
    pub g_s: f64,
    pub g_a: f64,
    pub kappa_s: f64,
    pub kappa_a: f64,
    pub phi: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        let p = AtomParams::default();
        Self {
            omega_p: p.omega_p,
            omega_c: p.omega_c,
            delta_p: p.delta_p,
            delta_c: p.delta_c,
            gamma: p.gamma,
            gamma_bc: p.gamma_bc,
            g_s: p.g_s,
            g_a: p.g_a,
            kappa_s: p.kappa_s,
            kappa_a: p.kappa_a,
            phi: p.phi,
        }
    }
}

impl AtomConfig {
    pub fn params(&self, unit: AngleUnit) -> AtomParams {
        AtomParams {
            omega_p: self.omega_p,
            omega_c: self.omega_c,
            delta_p: self.delta_p,
            delta_c: self.delta_c,
            gamma: self.gamma,
            gamma_bc: self.gamma_bc,
            g_s: self.g_s,
            g_a: self.g_a,
            kappa_s: self.kappa_s,
            kappa_a: self.kappa_a,
            phi: unit.to_radians(self.phi),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Laser phase (the DRR analyzers read it as `theta_t`).
    pub phi: Option<Axis>,
    pub omega_c: Option<Axis>,
    pub gamma_bc: Option<Axis>,
    /// Common Rabi frequency of the symmetric DRR scan.
    pub omega: Option<Axis>,
    /// Common cavity damping of the symmetric DRR scan.
    pub kappa: Option<Axis>,
}

impl GridConfig {
    fn axes(&self) -> [(&'static str, Option<&Axis>); 5] {
        [
            ("phi", self.phi.as_ref()),
            ("omega_c", self.omega_c.as_ref()),
            ("gamma_bc", self.gamma_bc.as_ref()),
            ("omega", self.omega.as_ref()),
            ("kappa", self.kappa.as_ref()),
        ]
    }
}

/// Which pair-emission rate the equal cavity dampings are tuned against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneRate {
    /// `|C2|` from the full coefficient chain.
    #[default]
    C2,
    /// The Raman-EIT estimate `xi`.
    Xi,
}

/// Equal dampings `kappa = sqrt(safety) * rate`, tuned once at
/// `reference_omega_c` or separately at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaConfig {
    pub safety: f64,
    #[serde(default)]
    pub rate: TuneRate,
    #[serde(default)]
    pub reference_omega_c: Option<f64>,
}

/// How the steady state of a scan point is obtained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed form on the full coefficient chain.
    #[default]
    Pipeline,
    /// Raman-EIT closed form at the tuned dampings.
    Reit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_samples() -> usize {
    201
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCase {
    /// Coefficients from the atom section.
    #[default]
    Pipeline,
    /// Only the cavity dampings of the atom section.
    PureLoss,
}

/// Deliberate corruption of the oracle's coefficients, for testing the
/// comparison itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    FlipC2Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub n_max: usize,
    pub leak_budget: f64,
    /// Allowed divergence between the oracle and the moment equations.
    pub tolerance: f64,
    /// Horizon; defaults to `10 / min(kappa)`.
    pub t_end: Option<f64>,
    pub samples: usize,
    pub tol: f64,
    pub case: OracleCase,
    pub mutation: Option<Mutation>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_max: twophoton_core::fock::DEFAULT_N_MAX,
            leak_budget: twophoton_core::fock::DEFAULT_LEAK_BUDGET,
            tolerance: 1e-4,
            t_end: None,
            samples: 11,
            tol: 1e-10,
            case: OracleCase::Pipeline,
            mutation: None,
        }
    }
}

/// Random parameter draws for the coefficient identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrawsConfig {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Base name of the data files; defaults to the mode name.
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub angle_unit: AngleUnit,
    #[serde(default)]
    pub atom: AtomConfig,
    #[serde(default)]
    pub kappa: Option<KappaConfig>,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub times: Option<TimesConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub draws: Option<DrawsConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode: Some(mode),
            angle_unit: AngleUnit::Radians,
            atom: AtomConfig::default(),
            kappa: None,
            method: Method::Pipeline,
            grid: GridConfig::default(),
            times: None,
            oracle: None,
            draws: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigSyntax {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn params(&self) -> AtomParams {
        self.atom.params(self.angle_unit)
    }

    /// Values of a grid axis converted to internal units, or `None` when the
    /// axis is absent.
    pub fn axis(&self, name: &str) -> Option<Vec<f64>> {
        let (_, axis) = self.grid.axes().into_iter().find(|(n, _)| *n == name)?;
        let v = axis?.values();
        Some(if name == "phi" {
            v.into_iter().map(|x| self.angle_unit.to_radians(x)).collect()
        } else {
            v
        })
    }

    pub fn stem(&self, mode: Mode) -> String {
        self.output.stem.clone().unwrap_or_else(|| mode.name().to_string())
    }

    /// Checks the configuration against the requirements of `mode`.
    pub fn validate(&self, mode: Mode) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if let Some(m) = self.mode {
            if m != mode {
                return Err(CliError::config(format!("config is for `{m}`, not `{mode}`")));
            }
        }
        self.params()
            .validate()
            .map_err(|e| CliError::config(format!("atom: {e}")))?;
        for (name, axis) in self.grid.axes() {
            if let Some(a) = axis {
                a.check(name)?;
            }
        }
        let require = |name: &str| {
            self.axis(name)
                .map(|_| ())
                .ok_or_else(|| CliError::config(format!("`{mode}` needs grid axis `{name}`")))
        };
        match mode {
            Mode::ScanReit => {
                require("phi")?;
                require("omega_c")?;
            }
            Mode::ScanDrr => {
                require("omega")?;
                require("kappa")?;
                require("phi")?;
            }
            Mode::Evolve => {
                let t = self
                    .times
                    .ok_or_else(|| CliError::config("`evolve` needs a `times` section"))?;
                if !(t.t_end > 0.0) || !t.t_end.is_finite() {
                    return Err(CliError::config("times.t_end must be positive and finite"));
                }
                if t.samples < 2 {
                    return Err(CliError::config("times.samples must be at least 2"));
                }
                check_tol("times.tol", t.tol)?;
            }
            Mode::OracleCompare => {
                let o = self
                    .oracle
                    .ok_or_else(|| CliError::config("`oracle-compare` needs an `oracle` section"))?;
                if o.n_max == 0 {
                    return Err(CliError::config("oracle.n_max must be positive"));
                }
                if !(o.leak_budget > 0.0 && o.leak_budget < 1.0) {
                    return Err(CliError::config("oracle.leak_budget must lie in (0, 1)"));
                }
                if !(o.tolerance > 0.0) || !o.tolerance.is_finite() {
                    return Err(CliError::config("oracle.tolerance must be positive"));
                }
                if let Some(t) = o.t_end {
                    if !(t > 0.0) || !t.is_finite() {
                        return Err(CliError::config("oracle.t_end must be positive and finite"));
                    }
                }
                if o.samples < 2 {
                    return Err(CliError::config("oracle.samples must be at least 2"));
                }
                check_tol("oracle.tol", o.tol)?;
            }
            Mode::Coeffs | Mode::Steady => {}
        }
        if let Some(k) = self.kappa {
            if !(k.safety > 1.0) || !k.safety.is_finite() {
                return Err(CliError::config("kappa.safety must be finite and exceed 1"));
            }
            if let Some(r) = k.reference_omega_c {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(CliError::config("kappa.reference_omega_c must be positive"));
                }
            }
        }
        if self.method == Method::Reit && mode != Mode::ScanReit {
            return Err(CliError::config("method `reit` applies to `scan-reit` only"));
        }
        if let Some(d) = self.draws {
            if d.count == 0 {
                return Err(CliError::config("draws.count must be positive"));
            }
        }
        if let Some(s) = &self.output.stem {
            if s.is_empty() || s.contains(['/', '\\']) || s.starts_with('.') {
                return Err(CliError::config("output.stem must be a plain file name"));
            }
        }
        Ok(())
    }
}

fn check_tol(name: &str, tol: f64) -> Result<()> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(CliError::config(format!("{name} must lie in [1e-12, 1e-4]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_axis_is_inclusive() {
        let a = Axis::Range(RangeAxis {
            start: 0.0,
            stop: 360.0,
            steps: 5,
        });
        assert_eq!(a.values(), vec![0.0, 90.0, 180.0, 270.0, 360.0]);
        let one = Axis::Range(RangeAxis {
            start: 2.0,
            stop: 9.0,
            steps: 1,
        });
        assert_eq!(one.values(), vec![2.0]);
    }

    #[test]
    fn degrees_are_converted() {
        let c = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "angle_unit": "degrees", "atom": {"phi": 90},
                "grid": {"phi": [0, 180]}}"#,
        )
        .unwrap();
        assert!((c.params().phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.axis("phi").unwrap()[1], std::f64::consts::PI);
        assert!(c.axis("omega_c").is_none());
    }

    #[test]
    fn scan_modes_need_nonempty_axes() {
        let mut c = ExperimentConfig::new(Mode::ScanReit);
        assert!(matches!(c.validate(Mode::ScanReit), Err(CliError::Config(_))));
        c.grid.phi = Some(Axis::List(vec![]));
        c.grid.omega_c = Some(Axis::List(vec![25.0]));
        let err = c.validate(Mode::ScanReit).unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
        c.grid.phi = Some(Axis::List(vec![1.0]));
        c.validate(Mode::ScanReit).unwrap();
    }

    #[test]
    fn schema_violations_are_config_errors() {
        for text in [
            r#"{"schema_version": 2}"#,
            r#"{"schema_version": 1, "atom": {"omega": 3}}"#,
            r#"{"schema_version": 1, "angle_unit": "gradians"}"#,
            r#"{"schema_version": 1, "atom": {"gamma": -1}}"#,
            r#"{"schema_version": 1, "mode": "steady"}"#,
        ] {
            let r = ExperimentConfig::from_json(text).and_then(|c| c.validate(Mode::Coeffs));
            assert_eq!(r.unwrap_err().exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn evolve_and_oracle_sections_are_checked() {
        let mut c = ExperimentConfig::new(Mode::Evolve);
        assert!(c.validate(Mode::Evolve).is_err());
        c.times = Some(TimesConfig {
            t_end: 10.0,
            samples: 1,
            tol: 1e-9,
        });
        assert!(c.validate(Mode::Evolve).is_err());
        c.times = Some(TimesConfig {
            t_end: 10.0,
            samples: 11,
            tol: 1e-9,
        });
        c.validate(Mode::Evolve).unwrap();

        let mut c = ExperimentConfig::new(Mode::OracleCompare);
        assert!(c.validate(Mode::OracleCompare).is_err());
        c.oracle = Some(OracleConfig::default());
        c.validate(Mode::OracleCompare).unwrap();
        c.oracle = Some(OracleConfig {
            leak_budget: 0.0,
            ..OracleConfig::default()
        });
        assert!(c.validate(Mode::OracleCompare).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let mut c = ExperimentConfig::new(Mode::ScanReit);
        c.grid.omega_c = Some(Axis::Range(RangeAxis {
            start: 40.0,
            stop: 200.0,
            steps: 9,
        }));
        c.kappa = Some(KappaConfig {
            safety: 1.01,
            rate: TuneRate::C2,
            reference_omega_c: Some(40.0),
        });
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
