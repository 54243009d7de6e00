//! Monte Carlo engine for a bipolar Poisson network of power-splitting
//! receivers with optional successive interference cancellation (SIC).
//!
//! The typical receiver sits at the origin with its transmitter at distance
//! `d`. Interferers form a Poisson process on the annulus
//! `[exclusion_radius, sim_radius]`. All links see unit-mean Rayleigh power
//! fading and path loss `r^{-alpha}`.
//!
//! For a power-splitting fraction `rho` (information share), signal `S`,
//! aggregate interference `I` and strongest interferer `I_max`:
//!
//! ```text
//! SINR      = rho S / (rho (I_info + sigma_n2) + sigma_c2)
//! I_info    = I - I_max  with SIC,  I  without
//! harvested = (1 - rho) eta (S + I)
//! ```
//!
//! SIC acts after the splitter, so it never changes harvested power.
//!
//! Realization `i` draws from ChaCha stream `i` of `master_seed`. Received
//! powers scale linearly in the transmit power, so an ensemble is sampled
//! once at unit power and then re-evaluated for any power, `rho`, or SIC
//! setting with common random numbers. Reductions run in index order, which
//! makes results independent of the rayon worker count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// z-score of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest tolerated relative error from truncating the plane at `sim_radius`.
pub const MAX_TRUNCATION_ERROR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    /// Transmitter density (1/m^2).
    pub lambda: f64,
    /// Transmitter-receiver pair distance (m).
    pub d: f64,
    /// Transmit power (W).
    pub transmit_power: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Power-splitting fraction routed to the information branch.
    pub rho: f64,
    /// SINR decoding threshold (linear).
    pub theta: f64,
    pub sigma_n2: f64,
    pub sigma_c2: f64,
    /// Harvester efficiency.
    pub eta: f64,
    pub sic_enabled: bool,
    /// Radius of the simulated disc (m).
    pub sim_radius: f64,
    /// Interferer-free radius around the receiver (m).
    pub exclusion_radius: f64,
    pub n_realizations: usize,
    pub master_seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            lambda: 1e-3,
            d: 10.0,
            transmit_power: 1.0,
            alpha: 4.0,
            rho: 0.5,
            theta: 1.0,
            sigma_n2: 0.1,
            sigma_c2: 0.1,
            eta: 1.0,
            sic_enabled: false,
            sim_radius: 100.0,
            exclusion_radius: 1.0,
            n_realizations: 100_000,
            master_seed: 0x5EED_2024,
        }
    }
}

impl NetworkConfig {
    /// Expected interferer count in the simulated annulus.
    pub fn mean_interferers(&self) -> f64 {
        self.lambda * PI * (self.sim_radius.powi(2) - self.exclusion_radius.powi(2))
    }

    /// Relative error caused by ignoring interferers beyond `sim_radius`.
    ///
    /// With an exclusion zone this is the missing fraction of mean
    /// interference, `(r0 / R)^(alpha - 2)`. Without one the mean is
    /// infinite, so the bound is instead the missing part of the Laplace
    /// exponent of the interference-limited coverage probability,
    /// `2 pi lambda theta d^alpha R^(2 - alpha) / (alpha - 2)`.
    pub fn truncation_error(&self) -> f64 {
        let k = self.alpha - 2.0;
        if self.exclusion_radius > 0.0 {
            (self.exclusion_radius / self.sim_radius).powf(k)
        } else {
            2.0 * PI * self.lambda * self.theta * self.d.powf(self.alpha) * self.sim_radius.powf(-k)
                / k
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &'static str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::domain(what, v))
            }
        };
        check(
            self.lambda >= 0.0 && self.lambda.is_finite(),
            "lambda must be non-negative",
            self.lambda,
        )?;
        check(
            self.d > 0.0 && self.d.is_finite(),
            "pair distance d must be positive",
            self.d,
        )?;
        check(
            self.transmit_power >= 0.0 && self.transmit_power.is_finite(),
            "transmit power must be non-negative",
            self.transmit_power,
        )?;
        check(
            self.alpha > 2.0 && self.alpha.is_finite(),
            "alpha must exceed 2",
            self.alpha,
        )?;
        check(
            (0.0..=1.0).contains(&self.rho),
            "rho must lie in [0, 1]",
            self.rho,
        )?;
        check(
            self.theta >= 0.0 && self.theta.is_finite(),
            "theta must be non-negative",
            self.theta,
        )?;
        check(
            self.sigma_n2 >= 0.0,
            "sigma_n2 must be non-negative",
            self.sigma_n2,
        )?;
        check(
            self.sigma_c2 >= 0.0,
            "sigma_c2 must be non-negative",
            self.sigma_c2,
        )?;
        check(
            self.eta > 0.0 && self.eta <= 1.0,
            "eta must lie in (0, 1]",
            self.eta,
        )?;
        check(
            self.exclusion_radius >= 0.0,
            "exclusion radius must be non-negative",
            self.exclusion_radius,
        )?;
        check(
            self.sim_radius > self.exclusion_radius && self.sim_radius.is_finite(),
            "sim_radius must exceed the exclusion radius",
            self.sim_radius,
        )?;
        check(
            self.n_realizations > 0,
            "n_realizations must be positive",
            0.0,
        )?;
        let trunc = self.truncation_error();
        check(
            trunc <= MAX_TRUNCATION_ERROR,
            "sim_radius too small: truncation error exceeds 1e-3",
            trunc,
        )
    }
}

/// One sampled snapshot of the network around the typical receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub substream: u64,
    pub serving_fade: f64,
    pub interferer_distances: Vec<f64>,
    pub interferer_fades: Vec<f64>,
}

/// Samples realization number `substream` of the configured network.
pub fn sample_realization(config: &NetworkConfig, substream: u64) -> NetworkRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(substream);
    let serving_fade: f64 = Exp1.sample(&mut rng);
    let mean = config.mean_interferers();
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .expect("finite positive mean")
            .sample(&mut rng) as usize
    } else {
        0
    };
    let r0_sq = config.exclusion_radius * config.exclusion_radius;
    let span = config.sim_radius * config.sim_radius - r0_sq;
    let mut interferer_distances = Vec::with_capacity(count);
    let mut interferer_fades = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.random();
        interferer_distances.push((r0_sq + u * span).sqrt());
        interferer_fades.push(Exp1.sample(&mut rng));
    }
    NetworkRealization {
        substream,
        serving_fade,
        interferer_distances,
        interferer_fades,
    }
}

/// Received powers of one realization at unit transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPowers {
    pub signal: f64,
    pub interference: f64,
    pub strongest: f64,
}

impl NetworkRealization {
    pub fn link_powers(&self, alpha: f64, d: f64) -> LinkPowers {
        let mut interference = 0.0;
        let mut strongest = 0.0f64;
        for (&r, &g) in self.interferer_distances.iter().zip(&self.interferer_fades) {
            let p = g * r.powf(-alpha);
            interference += p;
            strongest = strongest.max(p);
        }
        LinkPowers {
            signal: self.serving_fade * d.powf(-alpha),
            interference,
            strongest,
        }
    }
}

impl LinkPowers {
    /// SINR after power splitting at transmit power `p`.
    pub fn sinr(&self, p: f64, rho: f64, sic: bool, sigma_n2: f64, sigma_c2: f64) -> f64 {
        let info_interference = if sic {
            // Clamp: I - I_max can go a few ulps negative.
            (self.interference - self.strongest).max(0.0)
        } else {
            self.interference
        };
        let num = rho * p * self.signal;
        if num == 0.0 {
            return 0.0;
        }
        num / (rho * (p * info_interference + sigma_n2) + sigma_c2)
    }

    /// Harvested power at transmit power `p`.
    pub fn harvested(&self, p: f64, rho: f64, eta: f64) -> f64 {
        (1.0 - rho) * eta * p * (self.signal + self.interference)
    }
}

/// Monte Carlo estimates with 95% confidence half-widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub coverage_probability: f64,
    pub coverage_ci: f64,
    pub avg_harvested_energy: f64,
    pub harvested_ci: f64,
    pub n_samples: usize,
}

/// A fixed set of realizations evaluated with common random numbers.
#[derive(Debug, Clone)]
pub struct NetworkEnsemble {
    config: NetworkConfig,
    links: Vec<LinkPowers>,
    /// Mean and sample standard deviation of `S + I` at unit power.
    received_mean: f64,
    received_sd: f64,
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    let sd = if n > 1 { (ss / (nf - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

impl NetworkEnsemble {
    /// Samples `config.n_realizations` realizations in parallel.
    pub fn generate(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        let links: Vec<LinkPowers> = (0..config.n_realizations as u64)
            .into_par_iter()
            .map(|i| sample_realization(config, i).link_powers(config.alpha, config.d))
            .collect();
        let (received_mean, received_sd) =
            mean_sd(links.iter().map(|l| l.signal + l.interference), links.len());
        Ok(NetworkEnsemble {
            config: config.clone(),
            links,
            received_mean,
            received_sd,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn links(&self) -> &[LinkPowers] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Number of realizations whose SINR meets the threshold.
    pub fn covered_count(&self, p: f64, rho: f64, sic: bool) -> usize {
        let c = &self.config;
        self.links
            .iter()
            .filter(|l| l.sinr(p, rho, sic, c.sigma_n2, c.sigma_c2) >= c.theta)
            .count()
    }

    pub fn metrics(&self, p: f64, rho: f64, sic: bool) -> NetworkMetrics {
        let n = self.links.len();
        let nf = n as f64;
        let cov = self.covered_count(p, rho, sic) as f64 / nf;
        let scale = (1.0 - rho) * self.config.eta * p;
        NetworkMetrics {
            coverage_probability: cov,
            coverage_ci: Z95 * (cov * (1.0 - cov) / nf).sqrt(),
            avg_harvested_energy: scale * self.received_mean,
            harvested_ci: Z95 * scale * self.received_sd / nf.sqrt(),
            n_samples: n,
        }
    }

    /// Mean aggregate interference at power `p` and its standard error.
    pub fn mean_interference(&self, p: f64) -> (f64, f64) {
        let (m, sd) = mean_sd(self.links.iter().map(|l| l.interference), self.links.len());
        (p * m, p * sd / (self.links.len() as f64).sqrt())
    }

    /// Lowest information fraction at which SIC still matches the coverage
    /// that `rho_baseline` achieves without SIC.
    ///
    /// When SIC adds no coverage at `rho_baseline` the baseline is returned
    /// unchanged: every realization's decoding outcome is the same with and
    /// without cancellation, so there is no margin to trade for energy.
    pub fn adapt_rho(&self, p: f64, rho_baseline: f64) -> Result<AdaptedRho> {
        const MAX_ITER: usize = 200;
        const RHO_TOL: f64 = 1e-10;
        if !(rho_baseline > 0.0 && rho_baseline <= 1.0) {
            return Err(Error::domain(
                "rho_baseline must lie in (0, 1]",
                rho_baseline,
            ));
        }
        let target = self.covered_count(p, rho_baseline, false);
        let with_sic = self.covered_count(p, rho_baseline, true);
        assert!(
            with_sic >= target,
            "SIC lowered coverage ({with_sic} < {target}); SINR model violated"
        );
        let n = self.links.len() as f64;
        let target_coverage = target as f64 / n;
        if with_sic == target {
            return Ok(AdaptedRho {
                rho: rho_baseline,
                target_coverage,
                iterations: 0,
                metrics: self.metrics(p, rho_baseline, true),
            });
        }
        // Coverage is nondecreasing in rho per realization, so the feasible
        // set is an interval (rho*, rho_baseline].
        let (mut lo, mut hi) = (0.0, rho_baseline);
        let mut iterations = 0;
        while hi - lo > RHO_TOL {
            if iterations == MAX_ITER {
                return Err(Error::Convergence {
                    solver: "rho bisection",
                    iterations,
                    residuals: vec![hi - lo],
                });
            }
            let mid = 0.5 * (lo + hi);
            if self.covered_count(p, mid, true) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            iterations += 1;
        }
        Ok(AdaptedRho {
            rho: hi,
            target_coverage,
            iterations,
            metrics: self.metrics(p, hi, true),
        })
    }
}

/// Result of lowering `rho` under SIC at constant coverage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptedRho {
    pub rho: f64,
    /// Coverage without SIC at the baseline fraction.
    pub target_coverage: f64,
    pub iterations: usize,
    pub metrics: NetworkMetrics,
}

/// Coverage and average harvested energy at the configured operating point.
pub fn evaluate(config: &NetworkConfig) -> Result<NetworkMetrics> {
    let ens = NetworkEnsemble::generate(config)?;
    Ok(ens.metrics(config.transmit_power, config.rho, config.sic_enabled))
}

/// Adapts `rho` at the configured transmit power.
pub fn adapt_rho_with_sic(config: &NetworkConfig, rho_baseline: f64) -> Result<AdaptedRho> {
    NetworkEnsemble::generate(config)?.adapt_rho(config.transmit_power, rho_baseline)
}

/// Closed-form coverage of the interference-limited PPP without SIC:
/// `exp(-pi lambda d^2 theta^delta Γ(1+delta) Γ(1-delta))`, `delta = 2/alpha`.
pub fn analytic_coverage(config: &NetworkConfig) -> Result<f64> {
    if config.sic_enabled
        || config.exclusion_radius != 0.0
        || config.sigma_n2 != 0.0
        || config.sigma_c2 != 0.0
    {
        return Err(Error::Unsupported(
            "closed-form coverage needs no SIC, no exclusion zone and zero noise".into(),
        ));
    }
    if !(config.alpha > 2.0) {
        return Err(Error::domain("alpha must exceed 2", config.alpha));
    }
    let delta = 2.0 / config.alpha;
    // Γ(1+δ)Γ(1-δ) = πδ / sin(πδ)
    let gamma_product = PI * delta / (PI * delta).sin();
    Ok(
        (-PI * config.lambda * config.d * config.d * config.theta.powf(delta) * gamma_product)
            .exp(),
    )
}

/// Coverage of an interference-free link: `P(g0 >= theta (sigma_n2 + sigma_c2/rho) d^alpha / P)`.
pub fn noise_only_coverage(config: &NetworkConfig) -> f64 {
    let noise = config.sigma_n2 + config.sigma_c2 / config.rho;
    (-config.theta * noise * config.d.powf(config.alpha) / config.transmit_power).exp()
}

/// How a sweep row's `rho` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    /// Baseline fraction, no SIC.
    Fixed,
    /// Lowered under SIC to preserve the baseline coverage.
    Adapted,
    /// `rho -> 0`: everything harvested.
    Bound,
}

impl RhoMode {
    pub fn label(&self) -> &'static str {
        match self {
            RhoMode::Fixed => "fixed",
            RhoMode::Adapted => "adapted",
            RhoMode::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_dbw: f64,
    pub rho_baseline: f64,
    pub mode: RhoMode,
    pub rho: f64,
    pub sic: bool,
    pub metrics: NetworkMetrics,
}

/// Harvested energy versus transmit power for each baseline `rho`: the fixed
/// baseline without SIC, the SIC-adapted fraction, and the `rho -> 0` bound.
pub fn power_sweep(
    config: &NetworkConfig,
    p_dbw: &[f64],
    rho_baselines: &[f64],
) -> Result<Vec<SweepRow>> {
    let ens = NetworkEnsemble::generate(config)?;
    let mut rows = Vec::with_capacity(p_dbw.len() * rho_baselines.len() * 3);
    for &rho_b in rho_baselines {
        for &db in p_dbw {
            let p = 10f64.powf(db / 10.0);
            let adapted = ens.adapt_rho(p, rho_b)?;
            rows.push(SweepRow {
                p_dbw: db,
                rho_baseline: rho_b,
                mode: RhoMode::Fixed,
                rho: rho_b,
                sic: false,
                metrics: ens.metrics(p, rho_b, false),
            });
            rows.push(SweepRow {
                p_dbw: db,
                rho_baseline: rho_b,
                mode: RhoMode::Adapted,
                rho: adapted.rho,
                sic: true,
                metrics: adapted.metrics,
            });
            rows.push(SweepRow {
                p_dbw: db,
                rho_baseline: rho_b,
                mode: RhoMode::Bound,
                rho: 0.0,
                sic: true,
                metrics: ens.metrics(p, 0.0, true),
            });
        }
    }
    Ok(rows)
}
