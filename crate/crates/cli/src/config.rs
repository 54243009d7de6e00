//! Configuration file schema.
//!
//! The file is TOML with one table per subcommand. Every table is strict:
//! unknown keys are rejected so that a misspelled physical parameter fails
//! loudly instead of silently falling back to its default.
//!
//! ```toml
//! seed = 42
//!
//! [network]
//! lambda = 1e-3
//! d = 10.0
//! p_dbw = "0:87:3"
//! rho_baselines = [0.5, 0.9]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use wipt_core::netgeom::NetworkConfig;
use wipt_core::receiver::SimoChannel;
use wipt_core::rectenna::RectennaModel;
use wipt_core::robust::{Divergence, SolverOptions};
use wipt_core::waveform::TrendConfig;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5EED_2024;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub models: ModelsSection,
    pub robust: RobustSection,
    pub capacity: CapacitySection,
    pub receivers: ReceiversSection,
    pub network: NetworkSection,
    pub waveform: TrendConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text)
            .map_err(|e| CliError::Config(format!("in config file {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelsSection {
    /// Input power grid, `start:stop:step` in W.
    pub p_rf: String,
    pub models: Vec<RectennaModel>,
}

impl Default for ModelsSection {
    fn default() -> Self {
        ModelsSection {
            p_rf: "0:2:0.02".into(),
            models: vec![
                RectennaModel::Linear { eta: 0.5 },
                RectennaModel::PiecewiseLinear {
                    eta: 0.6,
                    p_sens: 0.1,
                    p_sat: 0.5,
                },
                RectennaModel::Sigmoid {
                    p_sat: 0.5,
                    a: 5.0,
                    b: 0.6,
                },
                RectennaModel::default_diode(),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobustSection {
    pub nominal_rate: f64,
    pub radii: Vec<f64>,
    pub directions: Vec<Divergence>,
    pub x_max: f64,
    pub points: usize,
    pub solver: SolverOptions,
}

impl Default for RobustSection {
    fn default() -> Self {
        RobustSection {
            nominal_rate: 1.0,
            radii: vec![0.0, 0.05, 0.2, 0.5],
            directions: vec![Divergence::Forward, Divergence::Reverse],
            x_max: 5.0,
            points: 500,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacitySection {
    pub energies: Vec<f64>,
    /// Energy-rate grid, `start:stop:step` in epcu.
    pub grid: String,
}

impl Default for CapacitySection {
    fn default() -> Self {
        CapacitySection {
            energies: vec![0.0, 1.0],
            grid: "0:1:0.01".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiversSection {
    pub channel: SimoChannel,
    /// Number of intervals in the TS and PS parameter grids.
    pub intervals: usize,
}

impl Default for ReceiversSection {
    fn default() -> Self {
        ReceiversSection {
            channel: SimoChannel::default(),
            intervals: 100,
        }
    }
}

/// Physical network parameters plus the sweep layout. Seed and realization
/// count can be overridden from the command line; the transmit power comes
/// from the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub lambda: f64,
    pub d: f64,
    pub alpha: f64,
    pub theta: f64,
    pub sigma_n2: f64,
    pub sigma_c2: f64,
    pub eta: f64,
    pub sim_radius: f64,
    pub exclusion_radius: f64,
    pub n_realizations: usize,
    /// Transmit-power sweep, `start:stop:step` in dBW.
    pub p_dbw: String,
    pub rho_baselines: Vec<f64>,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let c = NetworkConfig::default();
        NetworkSection {
            lambda: c.lambda,
            d: c.d,
            alpha: c.alpha,
            theta: c.theta,
            sigma_n2: c.sigma_n2,
            sigma_c2: c.sigma_c2,
            eta: c.eta,
            sim_radius: c.sim_radius,
            exclusion_radius: c.exclusion_radius,
            n_realizations: c.n_realizations,
            p_dbw: "0:87:3".into(),
            rho_baselines: vec![0.5, 0.9],
        }
    }
}

impl NetworkSection {
    pub fn to_config(&self, seed: u64) -> NetworkConfig {
        NetworkConfig {
            lambda: self.lambda,
            d: self.d,
            alpha: self.alpha,
            theta: self.theta,
            sigma_n2: self.sigma_n2,
            sigma_c2: self.sigma_c2,
            eta: self.eta,
            sim_radius: self.sim_radius,
            exclusion_radius: self.exclusion_radius,
            n_realizations: self.n_realizations,
            master_seed: seed,
            ..NetworkConfig::default()
        }
    }
}

/// Parses `start:stop:step` into `round((stop - start) / step) + 1` values.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("bad range '{text}': expected start:stop:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let n = ((stop - start) / step).round() as usize;
    if n > 10_000_000 {
        return Err(CliError::Config(format!(
            "range '{text}' has too many points"
        )));
    }
    Ok((0..=n)
        .map(|i| {
            if i == n {
                stop
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}
