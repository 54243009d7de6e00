//! RF-to-DC harvesting models.
//!
//! Four families are supported:
//!
//! - `Linear`: `P_dc = eta * P_rf`.
//! - `PiecewiseLinear`: zero below the sensitivity threshold, linear above
//!   it, clipped at the saturation power.
//! - `Sigmoid`: a logistic curve shifted so that zero input gives exactly
//!   zero output.
//! - `DiodePolynomial`: a truncated diode expansion driven by the signal
//!   waveform itself, `P_dc = k2 * E[y^2] + k4 * E[y^4]`.
//!
//! All powers are in Watts. Waveform samples are in sqrt(W), so `y^2` is an
//! instantaneous power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A harvesting transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RectennaModel {
    Linear { eta: f64 },
    PiecewiseLinear { eta: f64, p_sens: f64, p_sat: f64 },
    Sigmoid { p_sat: f64, a: f64, b: f64 },
    DiodePolynomial { k2: f64, k4: f64 },
}

impl Default for RectennaModel {
    fn default() -> Self {
        RectennaModel::Linear { eta: 1.0 }
    }
}

impl RectennaModel {
    /// Diode expansion with the normalized default coefficients `k2 = k4 = 1`.
    pub fn default_diode() -> Self {
        RectennaModel::DiodePolynomial { k2: 1.0, k4: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RectennaModel::Linear { .. } => "linear",
            RectennaModel::PiecewiseLinear { .. } => "piecewise_linear",
            RectennaModel::Sigmoid { .. } => "sigmoid",
            RectennaModel::DiodePolynomial { .. } => "diode_polynomial",
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, RectennaModel::Linear { .. })
    }

    /// Checks the parameter invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        let positive = |what, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(what, v))
            }
        };
        match *self {
            RectennaModel::Linear { eta } => {
                positive("eta must be in (0, 1]", eta)?;
                if eta > 1.0 {
                    return Err(Error::domain("eta must be in (0, 1]", eta));
                }
            }
            RectennaModel::PiecewiseLinear { eta, p_sens, p_sat } => {
                positive("eta must be in (0, 1]", eta)?;
                if eta > 1.0 {
                    return Err(Error::domain("eta must be in (0, 1]", eta));
                }
                positive("p_sens must be positive", p_sens)?;
                positive("p_sat must be positive", p_sat)?;
                if p_sens >= p_sat / eta {
                    return Err(Error::domain("p_sens must be below p_sat / eta", p_sens));
                }
            }
            RectennaModel::Sigmoid { p_sat, a, b } => {
                positive("sigmoid p_sat must be positive", p_sat)?;
                positive("sigmoid steepness a must be positive", a)?;
                positive("sigmoid inflection b must be positive", b)?;
            }
            RectennaModel::DiodePolynomial { k2, k4 } => {
                if !(k2.is_finite() && k2 >= 0.0) {
                    return Err(Error::domain("k2 must be non-negative", k2));
                }
                if !(k4.is_finite() && k4 >= 0.0) {
                    return Err(Error::domain("k4 must be non-negative", k4));
                }
            }
        }
        Ok(())
    }
}

/// DC power harvested from an RF input power `p_rf` (W).
///
/// The diode family depends on the waveform and not only on its power, so it
/// is rejected here; use [`harvest_dc_waveform`].
pub fn harvest_dc(model: &RectennaModel, p_rf: f64) -> Result<f64> {
    if !(p_rf >= 0.0) || !p_rf.is_finite() {
        return Err(Error::domain("input power must be non-negative", p_rf));
    }
    model.validate()?;
    Ok(match *model {
        RectennaModel::Linear { eta } => eta * p_rf,
        RectennaModel::PiecewiseLinear { eta, p_sens, p_sat } => {
            (eta * (p_rf - p_sens).max(0.0)).min(p_sat)
        }
        RectennaModel::Sigmoid { p_sat, a, b } => {
            let logistic = 1.0 / (1.0 + (-a * (p_rf - b)).exp());
            let omega = 1.0 / (1.0 + (a * b).exp());
            // Clamp guards the last ulp; the exact expression is within [0, p_sat].
            (p_sat * (logistic - omega) / (1.0 - omega)).clamp(0.0, p_sat)
        }
        RectennaModel::DiodePolynomial { .. } => {
            return Err(Error::Unsupported(
                "diode polynomial model needs a waveform; use harvest_dc_waveform".into(),
            ))
        }
    })
}

/// Time averages of the second and fourth powers of a sample sequence.
pub fn even_moments(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(m2, m4), &y| {
        let y2 = y * y;
        (m2 + y2, m4 + y2 * y2)
    });
    (m2 / n, m4 / n)
}

/// Diode-model DC output for a sampled waveform spanning whole periods.
pub fn harvest_dc_waveform(model: &RectennaModel, samples: &[f64]) -> Result<f64> {
    let RectennaModel::DiodePolynomial { k2, k4 } = *model else {
        return Err(Error::Unsupported(format!(
            "waveform harvesting requires the diode polynomial model, got {}",
            model.name()
        )));
    };
    model.validate()?;
    if samples.len() < 2 {
        return Err(Error::domain(
            "waveform needs at least 2 samples",
            samples.len() as f64,
        ));
    }
    let (m2, m4) = even_moments(samples);
    Ok(k2 * m2 + k4 * m4)
}
