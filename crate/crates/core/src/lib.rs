//! Numerical building blocks for wireless information and power transfer.
//!
//! - [`rectenna`]: RF-to-DC harvesting models.
//! - [`robust`]: worst-case harvested energy inside a KL-divergence ball.
//! - [`capacity`]: information-energy capacity of noiseless channels.
//! - [`receiver`]: rate-energy regions of TS, PS and AS receivers.
//! - [`netgeom`]: Monte Carlo coverage and harvesting in Poisson networks.
//! - [`waveform`]: multitone energy signals and information coexistence.
//! - [`oracle`]: brute-force references used for validation.
//!
//! All powers are in Watts.

// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod netgeom;
pub mod numeric;
pub mod oracle;
pub mod receiver;
pub mod rectenna;
pub mod region;
pub mod robust;
pub mod waveform;

pub use capacity::{
    binary_capacity, max_entropy_capacity, region_boundary, CapacityPoint, EnergyAlphabet,
};
pub use error::{Error, Result};
pub use netgeom::{
    adapt_rho_with_sic, analytic_coverage, evaluate, sample_realization, AdaptedRho, NetworkConfig,
    NetworkEnsemble, NetworkMetrics, NetworkRealization,
};
pub use receiver::{as_points, outer_bound, ps_region, ts_region, SimoChannel};
pub use rectenna::{harvest_dc, harvest_dc_waveform, RectennaModel};
pub use region::{RateEnergyCurve, RateEnergyPoint};
pub use robust::{
    worst_case_cdf, worst_case_distribution, Divergence, NominalDistribution, TiltedDistribution,
};
pub use waveform::{
    harvest_multitone, info_integrity_check, papr, CompositeSignal, MultitoneWaveform,
};
