//! Rate-energy tuples and curves shared by the capacity and receiver modules.

use serde::{Deserialize, Serialize};

/// An achievable (information rate, energy rate) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEnergyPoint {
    /// bits per channel use
    pub rate: f64,
    /// harvested energy (W, or epcu for discrete channels)
    pub energy: f64,
}

impl RateEnergyPoint {
    pub fn new(rate: f64, energy: f64) -> Self {
        RateEnergyPoint { rate, energy }
    }
}

/// A labelled sequence of points, each tagged with the sweep parameter
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEnergyCurve {
    pub scheme: String,
    pub points: Vec<(f64, RateEnergyPoint)>,
}

impl RateEnergyCurve {
    pub fn new(scheme: impl Into<String>, points: Vec<(f64, RateEnergyPoint)>) -> Self {
        RateEnergyCurve {
            scheme: scheme.into(),
            points,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &RateEnergyPoint> {
        self.points.iter().map(|(_, p)| p)
    }

    /// Largest rate reachable at energy `e` or more, linearly interpolated
    /// between neighbouring points. `None` above the curve's energy range.
    ///
    /// Interpolating a concave boundary under-estimates it, so comparisons
    /// made with this are conservative.
    pub fn rate_at_energy(&self, e: f64) -> Option<f64> {
        let mut pts: Vec<RateEnergyPoint> = self.iter().copied().collect();
        pts.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let last = pts.last()?;
        if e > last.energy {
            return None;
        }
        let mut best = f64::NEG_INFINITY;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if e <= a.energy {
                best = best.max(a.rate);
            } else if e <= b.energy {
                let t = (e - a.energy) / (b.energy - a.energy);
                best = best.max(a.rate + t * (b.rate - a.rate));
            }
        }
        best = best.max(last.rate);
        Some(best)
    }
}
