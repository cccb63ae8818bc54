//! Run configuration: JSON file schema, defaults, validation, and the
//! derived physical parameter sets.
//!
//! The default set reproduces the reference scenario: qubit frequencies
//! `2e12` and `1e12` 1/s, bath temperatures 100 K and 300 K, unit cutoff
//! ratio, and the coupling calibrated so qubit A's population relaxation
//! rate is `1e7` 1/s under those defaults (coherence lifetime near `1e-7` s).
//! Every field can be overridden by the config file, and a subset again by
//! command-line flags.

use serde::{Deserialize, Serialize};

use entherm_core::dynamics::{mean_occupation, BathSpec, Setup, SetupParams};
use entherm_core::thermo::SetupTriple;

/// Reference frequency of qubit A used by the coupling calibration.
pub const CALIBRATION_OMEGA_A: f64 = 2.0e12;
/// Reference temperature of bath A used by the coupling calibration.
pub const CALIBRATION_TEMP_A: f64 = 100.0;
/// Population relaxation rate of qubit A the default coupling produces
/// under the reference parameters.
pub const CALIBRATION_RELAXATION_A: f64 = 1.0e7;

/// Default dimensionless coupling `gamma0` (unit cutoff ratio, unit dipole):
/// chosen so `Gamma_A (2 nbar_A + 1) = CALIBRATION_RELAXATION_A` at the
/// reference frequency and temperature.
pub fn default_coupling() -> f64 {
    let nbar = mean_occupation(CALIBRATION_OMEGA_A, CALIBRATION_TEMP_A)
        .expect("calibration parameters are valid");
    let gamma = CALIBRATION_RELAXATION_A / (2.0 * nbar + 1.0);
    (2.0 * gamma / CALIBRATION_OMEGA_A).sqrt()
}

/// Which setups a simulate run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetupSelection {
    A,
    B,
    C,
    All,
}

impl SetupSelection {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            "all" => Ok(Self::All),
            other => Err(format!("unknown setup {other:?}, expected a, b, c or all")),
        }
    }

    pub fn single(&self) -> Option<Setup> {
        match self {
            Self::A => Some(Setup::BothBaths),
            Self::B => Some(Setup::BathOnA),
            Self::C => Some(Setup::BathOnB),
            Self::All => None,
        }
    }
}

/// Temperature-sweep block of the configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// `common`: both baths share one temperature swept over a range.
    /// `delta`: fixed mean temperature, several temperature differences.
    pub mode: String,
    /// Evaluation time for the `common` mode, seconds.
    pub t_eval: f64,
    pub temp_min: f64,
    pub temp_max: f64,
    pub temp_points: usize,
    /// Mean `(T_A + T_B)/2` for the `delta` mode, kelvin.
    pub mean_temp: f64,
    /// Temperature differences `T_B - T_A` for the `delta` mode, kelvin.
    pub delta_temps: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: "common".to_owned(),
            t_eval: 1.0e-7,
            temp_min: 100.0,
            temp_max: 900.0,
            temp_points: 9,
            mean_temp: 450.0,
            delta_temps: vec![100.0, 300.0, 500.0],
        }
    }
}

/// Work-extraction protocol block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub temperature_kelvin: f64,
    pub steps: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self { temperature_kelvin: 300.0, steps: 10_000 }
    }
}

/// Full experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setup: SetupSelection,
    /// Qubit frequencies in 1/s.
    pub omega_a: f64,
    pub omega_b: f64,
    /// Bath temperatures in kelvin.
    pub temp_a_kelvin: f64,
    pub temp_b_kelvin: f64,
    /// Cutoff-to-frequency ratio shared by both baths.
    pub cutoff_ratio: f64,
    /// Dimensionless system-bath coupling; `None` selects the calibrated
    /// default.
    pub coupling_gamma0: Option<f64>,
    /// Squared dipole matrix element (dimensionless).
    pub dipole_sq: f64,
    /// Direct decoherence-factor overrides in 1/s; bypass the coupling
    /// parameterization for the corresponding bath.
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    /// Time grid for simulate runs, seconds.
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub log_spacing: bool,
    pub sweep: SweepConfig,
    pub protocol: ProtocolConfig,
    /// Output CSV path; a gnuplot script is written next to it.
    pub output: String,
    /// Seed for the randomized validation suites.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setup: SetupSelection::All,
            omega_a: 2.0e12,
            omega_b: 1.0e12,
            temp_a_kelvin: 100.0,
            temp_b_kelvin: 300.0,
            cutoff_ratio: 1.0,
            coupling_gamma0: None,
            dipole_sq: 1.0,
            gamma_a: None,
            gamma_b: None,
            t_min: 1.0e-10,
            t_max: 1.0e-5,
            points: 200,
            log_spacing: true,
            sweep: SweepConfig::default(),
            protocol: ProtocolConfig::default(),
            output: "entherm_out.csv".to_owned(),
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    /// Load from a JSON file, falling back to defaults for absent fields.
    pub fn from_file(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    /// Collect every violation instead of stopping at the first.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if !(self.omega_a > 0.0) {
            problems.push(format!("omega_a must be > 0, got {}", self.omega_a));
        }
        if !(self.omega_b > 0.0) {
            problems.push(format!("omega_b must be > 0, got {}", self.omega_b));
        }
        if !(self.temp_a_kelvin >= 0.0) {
            problems.push(format!("temp_a_kelvin must be >= 0, got {}", self.temp_a_kelvin));
        }
        if !(self.temp_b_kelvin >= 0.0) {
            problems.push(format!("temp_b_kelvin must be >= 0, got {}", self.temp_b_kelvin));
        }
        if !(self.cutoff_ratio > 0.0) {
            problems.push(format!("cutoff_ratio must be > 0, got {}", self.cutoff_ratio));
        }
        if let Some(g) = self.coupling_gamma0 {
            if !(g >= 0.0) {
                problems.push(format!("coupling_gamma0 must be >= 0, got {g}"));
            }
        }
        if !(self.dipole_sq >= 0.0) {
            problems.push(format!("dipole_sq must be >= 0, got {}", self.dipole_sq));
        }
        for (name, v) in [("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    problems.push(format!("{name} must be >= 0, got {v}"));
                }
            }
        }
        if !(self.t_min >= 0.0) {
            problems.push(format!("t_min must be >= 0, got {}", self.t_min));
        }
        if !(self.t_max > self.t_min) {
            problems.push(format!(
                "t_max must exceed t_min, got t_min={} t_max={}",
                self.t_min, self.t_max
            ));
        }
        if self.points < 2 {
            problems.push(format!("points must be >= 2, got {}", self.points));
        }
        if self.log_spacing && !(self.t_min > 0.0) {
            problems.push("log spacing requires t_min > 0".to_owned());
        }
        match self.sweep.mode.as_str() {
            "common" | "delta" => {}
            other => problems.push(format!("sweep.mode must be common or delta, got {other:?}")),
        }
        if !(self.sweep.t_eval > 0.0) {
            problems.push(format!("sweep.t_eval must be > 0, got {}", self.sweep.t_eval));
        }
        if !(self.sweep.temp_max >= self.sweep.temp_min) || !(self.sweep.temp_min > 0.0) {
            problems.push(format!(
                "sweep temperature range invalid: [{}, {}]",
                self.sweep.temp_min, self.sweep.temp_max
            ));
        }
        if self.sweep.temp_points < 2 {
            problems.push(format!("sweep.temp_points must be >= 2, got {}", self.sweep.temp_points));
        }
        if !(self.sweep.mean_temp > 0.0) {
            problems.push(format!("sweep.mean_temp must be > 0, got {}", self.sweep.mean_temp));
        }
        for &dt in &self.sweep.delta_temps {
            if dt < 0.0 || dt / 2.0 >= self.sweep.mean_temp {
                problems.push(format!(
                    "delta temperature {dt} incompatible with mean {}",
                    self.sweep.mean_temp
                ));
            }
        }
        if !(self.protocol.temperature_kelvin > 0.0) {
            problems.push(format!(
                "protocol.temperature_kelvin must be > 0, got {}",
                self.protocol.temperature_kelvin
            ));
        }
        if self.protocol.steps < 1 {
            problems.push("protocol.steps must be >= 1".to_owned());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    pub fn coupling(&self) -> f64 {
        self.coupling_gamma0.unwrap_or_else(default_coupling)
    }

    /// Bath attached to qubit A under this configuration.
    pub fn bath_a(&self) -> Result<BathSpec, String> {
        self.bath_for(self.temp_a_kelvin, self.omega_a, self.gamma_a)
    }

    /// Bath attached to qubit B under this configuration.
    pub fn bath_b(&self) -> Result<BathSpec, String> {
        self.bath_for(self.temp_b_kelvin, self.omega_b, self.gamma_b)
    }

    fn bath_for(&self, temperature: f64, omega: f64, gamma: Option<f64>) -> Result<BathSpec, String> {
        let bath = match gamma {
            Some(g) => BathSpec::with_decoherence_rate(temperature, omega, g),
            None => BathSpec::new(temperature, self.cutoff_ratio, self.coupling(), self.dipole_sq),
        };
        bath.map_err(|e| e.to_string())
    }

    /// The consistent three-setup parameterization.
    pub fn triple(&self) -> Result<SetupTriple, String> {
        SetupTriple::from_shared(self.omega_a, self.omega_b, self.bath_a()?, self.bath_b()?)
            .map_err(|e| e.to_string())
    }

    /// Variant of [`Self::triple`] with both bath temperatures replaced.
    pub fn triple_with_temps(&self, temp_a: f64, temp_b: f64) -> Result<SetupTriple, String> {
        let bath_a = self.bath_for(temp_a, self.omega_a, self.gamma_a)?;
        let bath_b = self.bath_for(temp_b, self.omega_b, self.gamma_b)?;
        SetupTriple::from_shared(self.omega_a, self.omega_b, bath_a, bath_b)
            .map_err(|e| e.to_string())
    }

    /// Parameters of a single setup drawn from the triple.
    pub fn params_for(&self, setup: Setup) -> Result<SetupParams, String> {
        let triple = self.triple()?;
        Ok(match setup {
            Setup::BothBaths => triple.both().clone(),
            Setup::BathOnA => triple.bath_on_a().clone(),
            Setup::BathOnB => triple.bath_on_b().clone(),
        })
    }

    /// Simulation time grid. A `t = 0` row is prepended whenever the grid
    /// starts above zero so every run carries its baseline.
    pub fn time_grid(&self) -> Vec<f64> {
        let mut grid = Vec::with_capacity(self.points + 1);
        if self.t_min > 0.0 {
            grid.push(0.0);
        }
        let n = self.points;
        for k in 0..n {
            let frac = k as f64 / (n - 1) as f64;
            let t = if self.log_spacing {
                let (lo, hi) = (self.t_min.log10(), self.t_max.log10());
                10f64.powf(lo + (hi - lo) * frac)
            } else {
                self.t_min + (self.t_max - self.t_min) * frac
            };
            grid.push(t);
        }
        grid
    }

    /// Temperatures of the `common` sweep mode.
    pub fn sweep_temperatures(&self) -> Vec<f64> {
        let n = self.sweep.temp_points;
        (0..n)
            .map(|k| {
                self.sweep.temp_min
                    + (self.sweep.temp_max - self.sweep.temp_min) * k as f64 / (n - 1) as f64
            })
            .collect()
    }

    /// Canonical JSON form embedded in output files for reproducibility.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_calibrated() {
        let config = ExperimentConfig::default();
        config.validate().expect("default config valid");
        let triple = config.triple().unwrap();
        let rates = triple.both().rates().unwrap();
        let rel = (rates.relaxation_a() - CALIBRATION_RELAXATION_A).abs()
            / CALIBRATION_RELAXATION_A;
        assert!(rel < 1e-12, "calibrated relaxation off by {rel:e}");
    }

    #[test]
    fn validation_collects_every_violation() {
        let mut config = ExperimentConfig::default();
        config.omega_a = -1.0;
        config.points = 1;
        config.t_max = 0.0;
        config.sweep.mode = "sideways".to_owned();
        let problems = config.validate().unwrap_err();
        assert!(problems.len() >= 4, "got {problems:?}");
    }

    #[test]
    fn time_grid_includes_baseline_and_is_sorted() {
        let config = ExperimentConfig::default();
        let grid = config.time_grid();
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid.len(), config.points + 1);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert!((grid[1] - config.t_min).abs() < 1e-24);
        assert!((grid.last().unwrap() - config.t_max).abs() < 1e-18);
    }

    #[test]
    fn gamma_overrides_bypass_the_coupling() {
        let mut config = ExperimentConfig::default();
        config.gamma_a = Some(5.0e5);
        let triple = config.triple().unwrap();
        let rates = triple.both().rates().unwrap();
        assert!((rates.gamma_a() - 5.0e5).abs() / 5.0e5 < 1e-12);
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = ExperimentConfig::default();
        let json = config.canonical_json();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.canonical_json(), json);
    }
}
