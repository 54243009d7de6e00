//! Rate-energy regions of time-switching, power-splitting and
//! antenna-switching receivers on a deterministic SIMO channel.
//!
//! Conventions used throughout:
//! - `rho` is the fraction of received power routed to the information
//!   branch; `1 - rho` goes to the harvester.
//! - `tau` is the fraction of time spent harvesting.
//! - Antenna noise (`sigma_n2`) passes through the splitter; conversion
//!   noise (`sigma_c2`) is added after it. Noise is never harvested.
//! - Information branches combine antennas with maximum-ratio combining.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rectenna::{harvest_dc, RectennaModel};
use crate::region::{RateEnergyCurve, RateEnergyPoint};

/// Deterministic 1×M SIMO channel seen by a WIPT receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimoChannel {
    /// Per-antenna power gains `|h_i|^2`.
    pub channel_gains: Vec<f64>,
    /// Transmit power (W).
    pub transmit_power: f64,
    /// Antenna noise variance (W).
    pub sigma_n2: f64,
    /// RF-to-baseband conversion noise variance (W).
    pub sigma_c2: f64,
    #[serde(default)]
    pub harvester: RectennaModel,
}

impl Default for SimoChannel {
    /// Two antennas with gains 1/2, unit power, both noise variances 1/2,
    /// ideal linear harvester.
    fn default() -> Self {
        SimoChannel {
            channel_gains: vec![0.5, 0.5],
            transmit_power: 1.0,
            sigma_n2: 0.5,
            sigma_c2: 0.5,
            harvester: RectennaModel::Linear { eta: 1.0 },
        }
    }
}

impl SimoChannel {
    pub fn validate(&self) -> Result<()> {
        if self.channel_gains.is_empty() {
            return Err(Error::Invalid("channel needs at least one antenna".into()));
        }
        if let Some(&g) = self
            .channel_gains
            .iter()
            .find(|g| !(**g >= 0.0) || !g.is_finite())
        {
            return Err(Error::domain("channel gains must be non-negative", g));
        }
        if !self.channel_gains.iter().any(|&g| g > 0.0) {
            return Err(Error::Invalid(
                "at least one channel gain must be positive".into(),
            ));
        }
        if !(self.transmit_power >= 0.0) {
            return Err(Error::domain(
                "transmit power must be non-negative",
                self.transmit_power,
            ));
        }
        if !(self.sigma_n2 > 0.0) {
            return Err(Error::domain("sigma_n2 must be positive", self.sigma_n2));
        }
        if !(self.sigma_c2 > 0.0) {
            return Err(Error::domain("sigma_c2 must be positive", self.sigma_c2));
        }
        self.harvester.validate()
    }

    fn total_gain(&self) -> f64 {
        self.channel_gains.iter().sum()
    }

    fn full_rate(&self, gains: f64) -> f64 {
        (1.0 + self.transmit_power * gains / (self.sigma_n2 + self.sigma_c2)).log2()
    }

    /// Information rate with power-splitting fraction `rho`.
    pub fn ps_rate(&self, rho: f64) -> f64 {
        let snr: f64 = self
            .channel_gains
            .iter()
            .map(|&g| rho * self.transmit_power * g / (rho * self.sigma_n2 + self.sigma_c2))
            .sum();
        (1.0 + snr).log2()
    }
}

fn check_fraction(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::domain(what, v))
    }
}

/// Time switching: a fraction `tau` of each block harvests, the rest decodes.
pub fn ts_region(channel: &SimoChannel, tau_grid: &[f64]) -> Result<RateEnergyCurve> {
    channel.validate()?;
    let g = channel.total_gain();
    let rate = channel.full_rate(g);
    let energy = harvest_dc(&channel.harvester, channel.transmit_power * g)?;
    let points = tau_grid
        .iter()
        .map(|&tau| {
            check_fraction("tau must lie in [0, 1]", tau)?;
            Ok((tau, RateEnergyPoint::new((1.0 - tau) * rate, tau * energy)))
        })
        .collect::<Result<_>>()?;
    Ok(RateEnergyCurve::new("ts", points))
}

/// Power splitting with the same `rho` on every antenna.
pub fn ps_region(channel: &SimoChannel, rho_grid: &[f64]) -> Result<RateEnergyCurve> {
    channel.validate()?;
    let g = channel.total_gain();
    let points = rho_grid
        .iter()
        .map(|&rho| {
            check_fraction("rho must lie in [0, 1]", rho)?;
            let energy = harvest_dc(&channel.harvester, (1.0 - rho) * channel.transmit_power * g)?;
            Ok((rho, RateEnergyPoint::new(channel.ps_rate(rho), energy)))
        })
        .collect::<Result<_>>()?;
    Ok(RateEnergyCurve::new("ps", points))
}

/// Antenna switching: one point per nonempty proper split of the antennas
/// into a decoding set and a harvesting set. The parameter of each point is
/// the bitmask of the decoding set. Identical points are reported once.
pub fn as_points(channel: &SimoChannel) -> Result<RateEnergyCurve> {
    channel.validate()?;
    let m = channel.channel_gains.len();
    if m < 2 {
        return Err(Error::Unsupported(
            "antenna switching needs at least two antennas".into(),
        ));
    }
    if m > 20 {
        return Err(Error::Unsupported(format!(
            "antenna switching enumerates 2^M splits; M = {m} is too large"
        )));
    }
    let mut points: Vec<(f64, RateEnergyPoint)> = Vec::new();
    for mask in 1u32..(1 << m) - 1 {
        let (mut info, mut energy) = (0.0, 0.0);
        for (i, &g) in channel.channel_gains.iter().enumerate() {
            if mask & (1 << i) != 0 {
                info += g;
            } else {
                energy += g;
            }
        }
        let p = RateEnergyPoint::new(
            channel.full_rate(info),
            harvest_dc(&channel.harvester, channel.transmit_power * energy)?,
        );
        if !points.iter().any(|(_, q)| *q == p) {
            points.push((mask as f64, p));
        }
    }
    Ok(RateEnergyCurve::new("as", points))
}

/// Corner of the no-trade-off outer bound, valid for a linear harvester.
pub fn outer_bound(channel: &SimoChannel) -> Result<RateEnergyPoint> {
    channel.validate()?;
    if !channel.harvester.is_linear() {
        return Err(Error::Unsupported(format!(
            "outer bound rectangle requires a linear harvester, got {}",
            channel.harvester.name()
        )));
    }
    let g = channel.total_gain();
    Ok(RateEnergyPoint::new(
        channel.full_rate(g),
        harvest_dc(&channel.harvester, channel.transmit_power * g)?,
    ))
}

/// `n + 1` evenly spaced fractions covering `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_like() -> SimoChannel {
        SimoChannel::default()
    }

    #[test]
    fn ts_points() {
        let c = ts_region(&paper_like(), &[0.0, 0.5, 1.0]).unwrap();
        let p: Vec<_> = c.iter().copied().collect();
        assert_eq!(p[0], RateEnergyPoint::new(1.0, 0.0));
        assert_eq!(p[1], RateEnergyPoint::new(0.5, 0.5));
        assert_eq!(p[2], RateEnergyPoint::new(0.0, 1.0));
    }

    #[test]
    fn ps_points() {
        let c = ps_region(&paper_like(), &[1.0, 0.0, 0.5]).unwrap();
        let p: Vec<_> = c.iter().copied().collect();
        assert_eq!(p[0], RateEnergyPoint::new(1.0, 0.0));
        assert_eq!(p[1], RateEnergyPoint::new(0.0, 1.0));
        assert!((p[2].rate - (5.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((p[2].rate - 0.737).abs() < 1e-3);
        assert_eq!(p[2].energy, 0.5);
    }

    #[test]
    fn as_split_and_dedup() {
        let pts = as_points(&paper_like()).unwrap();
        assert_eq!(pts.points.len(), 1);
        let p = pts.points[0].1;
        assert!((p.rate - 1.5f64.log2()).abs() < 1e-15);
        assert_eq!(p.energy, 0.5);

        let asym = SimoChannel {
            channel_gains: vec![1.0, 0.0],
            ..paper_like()
        };
        let pts = as_points(&asym).unwrap();
        let info_on_first = pts.points.iter().find(|(m, _)| *m == 1.0).unwrap().1;
        assert_eq!(info_on_first, RateEnergyPoint::new(1.0, 0.0));
        assert_eq!(pts.points.len(), 2);

        let single = SimoChannel {
            channel_gains: vec![1.0],
            ..paper_like()
        };
        assert!(matches!(as_points(&single), Err(Error::Unsupported(_))));
    }

    #[test]
    fn outer_bound_cases() {
        assert_eq!(
            outer_bound(&paper_like()).unwrap(),
            RateEnergyPoint::new(1.0, 1.0)
        );
        let off = SimoChannel {
            transmit_power: 0.0,
            ..paper_like()
        };
        assert_eq!(outer_bound(&off).unwrap(), RateEnergyPoint::new(0.0, 0.0));
        let doubled = SimoChannel {
            channel_gains: vec![1.0, 1.0],
            ..paper_like()
        };
        let p = outer_bound(&doubled).unwrap();
        assert!((p.rate - 3f64.log2()).abs() < 1e-15);
        assert_eq!(p.energy, 2.0);
        let nonlinear = SimoChannel {
            harvester: RectennaModel::Sigmoid {
                p_sat: 1.0,
                a: 5.0,
                b: 0.3,
            },
            ..paper_like()
        };
        assert!(matches!(
            outer_bound(&nonlinear),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_fractions() {
        assert!(ts_region(&paper_like(), &[1.2]).is_err());
        assert!(ps_region(&paper_like(), &[-0.1]).is_err());
    }

    #[test]
    fn endpoints_coincide() {
        let ch = SimoChannel {
            channel_gains: vec![0.3, 1.1, 0.2],
            transmit_power: 2.0,
            sigma_n2: 0.2,
            sigma_c2: 0.7,
            harvester: RectennaModel::Linear { eta: 0.6 },
        };
        let ts = ts_region(&ch, &[0.0, 1.0]).unwrap();
        let ps = ps_region(&ch, &[1.0, 0.0]).unwrap();
        for (a, b) in ts.iter().zip(ps.iter()) {
            assert!((a.rate - b.rate).abs() < 1e-12 && (a.energy - b.energy).abs() < 1e-12);
        }
    }
}
