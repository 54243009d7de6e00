//! Information-energy capacity of discrete noiseless channels.
//!
//! Each input symbol carries a fixed energy. The capacity under a minimum
//! energy rate `b` is the largest input entropy over distributions whose
//! expected energy is at least `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, entropy_bits};
use crate::region::{RateEnergyCurve, RateEnergyPoint};

/// Per-symbol energies (epcu) of a noiseless channel input alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAlphabet {
    symbol_energies: Vec<f64>,
}

impl EnergyAlphabet {
    pub fn new(symbol_energies: Vec<f64>) -> Result<Self> {
        if symbol_energies.len() < 2 {
            return Err(Error::Invalid(format!(
                "alphabet needs at least 2 symbols, got {}",
                symbol_energies.len()
            )));
        }
        if let Some(&e) = symbol_energies
            .iter()
            .find(|e| !(**e >= 0.0) || !e.is_finite())
        {
            return Err(Error::domain("symbol energies must be non-negative", e));
        }
        let first = symbol_energies[0];
        if symbol_energies.iter().all(|&e| e == first) {
            return Err(Error::Invalid(
                "alphabet needs at least two distinct symbol energies".into(),
            ));
        }
        Ok(EnergyAlphabet { symbol_energies })
    }

    /// On-off keying: symbol 0 carries nothing, symbol 1 one unit.
    pub fn binary() -> Self {
        EnergyAlphabet {
            symbol_energies: vec![0.0, 1.0],
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.symbol_energies
    }

    pub fn len(&self) -> usize {
        self.symbol_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_energy(&self) -> f64 {
        self.symbol_energies
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_energy(&self) -> f64 {
        self.symbol_energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_energy(&self, p: &[f64]) -> f64 {
        self.symbol_energies.iter().zip(p).map(|(e, q)| e * q).sum()
    }
}

/// Capacity under a minimum energy rate, with the achieving distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    /// Minimum energy rate (epcu).
    pub b: f64,
    /// Capacity (bpcu).
    pub capacity: f64,
    pub distribution: Vec<f64>,
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

/// Capacity of the on-off binary channel. `distribution[1]` is the
/// probability of the energy-carrying symbol.
pub fn binary_capacity(b: f64) -> Result<CapacityPoint> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InfeasibleEnergy { b, max: 1.0 });
    }
    let p1 = if b <= 0.5 { 0.5 } else { b };
    let capacity = if b <= 0.5 { 1.0 } else { binary_entropy(b) };
    Ok(CapacityPoint {
        b,
        capacity,
        distribution: vec![1.0 - p1, p1],
    })
}

/// Gibbs distribution `p_i ∝ exp(β e_i)`, evaluated stably.
fn gibbs(energies: &[f64], beta: f64, e_max: f64) -> Vec<f64> {
    let w: Vec<f64> = energies
        .iter()
        .map(|&e| (beta * (e - e_max)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Maximum-entropy input distribution subject to expected energy `>= b`.
///
/// Uniform when it already meets the constraint (including any `b` below
/// the smallest symbol energy); otherwise the Gibbs tilt that meets it with
/// equality; a point mass on the top-energy symbols at `b = max`.
pub fn max_entropy_capacity(alphabet: &EnergyAlphabet, b: f64) -> Result<CapacityPoint> {
    let energies = alphabet.energies();
    let k = energies.len();
    let e_max = alphabet.max_energy();
    if b.is_nan() || b > e_max {
        return Err(Error::InfeasibleEnergy { b, max: e_max });
    }
    let uniform = vec![1.0 / k as f64; k];
    let distribution = if alphabet.mean_energy(&uniform) >= b {
        uniform
    } else if b == e_max {
        let top = energies.iter().filter(|&&e| e == e_max).count() as f64;
        energies
            .iter()
            .map(|&e| if e == e_max { 1.0 / top } else { 0.0 })
            .collect()
    } else {
        let excess = |beta: f64| alphabet.mean_energy(&gibbs(energies, beta, e_max)) - b;
        let mut hi = 1.0;
        while excess(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Convergence {
                    solver: "Gibbs bracketing",
                    iterations: 1000,
                    residuals: vec![excess(hi)],
                });
            }
        }
        let scale = e_max.max(1.0);
        let beta = bisect(excess, 0.0, hi, 0.0, 1e-13 * scale, 400)?;
        gibbs(energies, beta, e_max)
    };
    Ok(CapacityPoint {
        b,
        capacity: entropy_bits(&distribution),
        distribution,
    })
}

/// Capacity boundary over an ascending grid of energy rates.
pub fn region_boundary(alphabet: &EnergyAlphabet, b_grid: &[f64]) -> Result<Vec<CapacityPoint>> {
    if b_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid(
            "energy grid must be sorted ascending".into(),
        ));
    }
    let binary = alphabet.energies() == [0.0, 1.0];
    b_grid
        .iter()
        .map(|&b| {
            if binary && b >= 0.0 {
                binary_capacity(b)
            } else {
                max_entropy_capacity(alphabet, b)
            }
        })
        .collect()
}

impl From<&[CapacityPoint]> for RateEnergyCurve {
    fn from(points: &[CapacityPoint]) -> Self {
        RateEnergyCurve::new(
            "capacity",
            points
                .iter()
                .map(|p| (p.b, RateEnergyPoint::new(p.capacity, p.b)))
                .collect(),
        )
    }
}
