//! Multitone energy waveforms and their coexistence with information
//! subcarriers.
//!
//! Tones sit on a uniform subcarrier grid: tone `k` completes `k` cycles per
//! fundamental period. A waveform rendered over whole periods at more than
//! `4 k_max` samples per period has exact discrete second and fourth
//! moments, and distinct subcarriers are exactly orthogonal under the DFT.
//! Rendering therefore insists on whole periods and at least `8 k_max`
//! samples per period.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_max;
use crate::rectenna::{harvest_dc_waveform, RectennaModel};

/// Minimum samples per period, as a multiple of the highest tone index.
pub const OVERSAMPLING: usize = 8;

/// Samples per period used when the caller does not choose one.
pub fn default_samples_per_period(max_index: usize) -> usize {
    (2 * OVERSAMPLING * max_index).max(64)
}

fn check_sampling(n_samples: usize, samples_per_period: usize, max_index: usize) -> Result<()> {
    if samples_per_period < OVERSAMPLING * max_index {
        return Err(Error::domain(
            "samples per period must be at least 8x the highest tone index",
            samples_per_period as f64,
        ));
    }
    if n_samples == 0 || !n_samples.is_multiple_of(samples_per_period) {
        return Err(Error::domain(
            "sample count must cover a whole number of periods",
            n_samples as f64,
        ));
    }
    Ok(())
}

/// An N-tone real multisine `sum_k a_k cos(2 pi f_k t + phi_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultitoneWaveform {
    pub tone_indices: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl MultitoneWaveform {
    /// `n` equal-amplitude, zero-phase tones on indices `1..=n`.
    pub fn equal(n: usize, total_power: f64) -> Result<Self> {
        Self::on_indices((1..=n).collect(), total_power)
    }

    /// Equal-amplitude, zero-phase tones on the given indices.
    pub fn on_indices(tone_indices: Vec<usize>, total_power: f64) -> Result<Self> {
        if !(total_power >= 0.0) || !total_power.is_finite() {
            return Err(Error::domain(
                "total power must be non-negative",
                total_power,
            ));
        }
        let n = tone_indices.len();
        if n == 0 {
            return Err(Error::Invalid("waveform needs at least one tone".into()));
        }
        let amp = (2.0 * total_power / n as f64).sqrt();
        let wf = MultitoneWaveform {
            amplitudes: vec![amp; n],
            phases: vec![0.0; n],
            tone_indices,
        };
        wf.validate()?;
        Ok(wf)
    }

    pub fn with_phases(mut self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.tone_indices.len() {
            return Err(Error::Invalid(format!(
                "{} phases for {} tones",
                phases.len(),
                self.tone_indices.len()
            )));
        }
        self.phases = phases;
        Ok(self)
    }

    /// Uniformly random phases drawn from a seeded generator.
    pub fn with_random_phases(self, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phases = (0..self.len())
            .map(|_| rng.random::<f64>() * 2.0 * PI)
            .collect();
        self.with_phases(phases)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tone_indices.len();
        if n == 0 || self.amplitudes.len() != n || self.phases.len() != n {
            return Err(Error::Invalid(
                "tone indices, amplitudes and phases must have equal nonzero length".into(),
            ));
        }
        if self.tone_indices.contains(&0) {
            return Err(Error::Invalid("tone index 0 (DC) is not a tone".into()));
        }
        let distinct: HashSet<_> = self.tone_indices.iter().collect();
        if distinct.len() != n {
            return Err(Error::Invalid("tone indices must be distinct".into()));
        }
        if let Some(&a) = self
            .amplitudes
            .iter()
            .find(|a| !(**a >= 0.0) || !a.is_finite())
        {
            return Err(Error::domain("amplitudes must be non-negative", a));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tone_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tone_indices.is_empty()
    }

    /// Average power, the sum of per-tone powers `a_k^2 / 2`.
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| 0.5 * a * a).sum()
    }

    pub fn max_index(&self) -> usize {
        self.tone_indices.iter().copied().max().unwrap_or(0)
    }

    /// Value at time `t`, in fundamental periods.
    pub fn value_at(&self, t: f64) -> f64 {
        self.tone_indices
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.phases)
            .map(|((&k, &a), &phi)| a * (2.0 * PI * k as f64 * t + phi).cos())
            .sum()
    }

    /// Renders `n_samples` samples at `samples_per_period` per period.
    pub fn synthesize(&self, n_samples: usize, samples_per_period: usize) -> Result<Vec<f64>> {
        self.validate()?;
        check_sampling(n_samples, samples_per_period, self.max_index())?;
        let step = 1.0 / samples_per_period as f64;
        Ok((0..n_samples)
            .map(|j| self.value_at((j % samples_per_period) as f64 * step))
            .collect())
    }

    /// One period at the default sampling density.
    pub fn synthesize_default(&self) -> Result<Vec<f64>> {
        let spp = default_samples_per_period(self.max_index());
        self.synthesize(spp, spp)
    }

    fn coherent(&self) -> bool {
        let a0 = self.amplitudes[0];
        self.phases.iter().all(|&p| p == 0.0) && self.amplitudes.iter().all(|&a| a == a0)
    }
}

/// Peak-to-average power ratio of a multisine.
///
/// Equal-amplitude zero-phase tones peak coherently at `t = 0`, giving
/// exactly `2N`. Otherwise the peak is located on a dense grid and refined
/// by golden-section search.
pub fn papr(waveform: &MultitoneWaveform) -> Result<f64> {
    waveform.validate()?;
    let avg = waveform.power();
    if avg == 0.0 {
        return Err(Error::Invalid(
            "PAPR of a zero-power waveform is undefined".into(),
        ));
    }
    if waveform.coherent() {
        return Ok(2.0 * waveform.len() as f64);
    }
    let spp = 64 * waveform.max_index();
    let step = 1.0 / spp as f64;
    let inst = |t: f64| waveform.value_at(t).powi(2);
    let (best_j, _) = (0..spp)
        .map(|j| (j, inst(j as f64 * step)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let t0 = best_j as f64 * step;
    let (_, peak) = golden_max(inst, t0 - step, t0 + step, 1e-13);
    Ok(peak.max(inst(t0)) / avg)
}

/// DC output of the diode model driven by the multisine.
pub fn harvest_multitone(waveform: &MultitoneWaveform, diode: &RectennaModel) -> Result<f64> {
    harvest_dc_waveform(diode, &waveform.synthesize_default()?)
}

/// Unit-energy quaternary phase symbol for a 2-bit value.
pub fn qpsk(bits: u8) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = if bits & 1 == 0 { s } else { -s };
    let im = if bits & 2 == 0 { s } else { -s };
    Complex64::new(re, im)
}

/// Information subcarriers carrying a symbol stream, optionally overlaid
/// with energy tones on a disjoint set of subcarriers. Each symbol lasts one
/// fundamental period.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSignal {
    pub info_indices: Vec<usize>,
    /// `symbols[m][i]` is sent on `info_indices[i]` during symbol `m`.
    pub symbols: Vec<Vec<Complex64>>,
    /// Average power of the information part (W).
    pub info_power: f64,
    pub energy: Option<MultitoneWaveform>,
    pub samples_per_symbol: usize,
}

impl CompositeSignal {
    /// Random QPSK payload on `info_indices`, `n_symbols` long.
    pub fn qpsk(
        info_indices: Vec<usize>,
        info_power: f64,
        energy: Option<MultitoneWaveform>,
        n_symbols: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let symbols = (0..n_symbols)
            .map(|_| {
                info_indices
                    .iter()
                    .map(|_| qpsk(rng.random_range(0..4u8)))
                    .collect()
            })
            .collect();
        let max_index = info_indices
            .iter()
            .copied()
            .chain(energy.iter().map(|e| e.max_index()))
            .max()
            .unwrap_or(1);
        let sig = CompositeSignal {
            info_indices,
            symbols,
            info_power,
            energy,
            samples_per_symbol: default_samples_per_period(max_index),
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        if self.info_indices.is_empty() {
            return Err(Error::Invalid(
                "composite needs information subcarriers".into(),
            ));
        }
        if self.info_indices.contains(&0) {
            return Err(Error::Invalid(
                "subcarrier index 0 (DC) cannot carry symbols".into(),
            ));
        }
        let info: HashSet<_> = self.info_indices.iter().collect();
        if info.len() != self.info_indices.len() {
            return Err(Error::Invalid(
                "information subcarriers must be distinct".into(),
            ));
        }
        if !(self.info_power >= 0.0) {
            return Err(Error::domain(
                "information power must be non-negative",
                self.info_power,
            ));
        }
        if self.symbols.is_empty() || self.symbols.iter().any(|s| s.len() != info.len()) {
            return Err(Error::Invalid(
                "every symbol needs one value per information subcarrier".into(),
            ));
        }
        let mut max_index = self.info_indices.iter().copied().max().unwrap_or(0);
        if let Some(e) = &self.energy {
            e.validate()?;
            if let Some(k) = e.tone_indices.iter().find(|k| info.contains(k)) {
                return Err(Error::Invalid(format!(
                    "energy tone {k} overlaps an information subcarrier"
                )));
            }
            max_index = max_index.max(e.max_index());
        }
        check_sampling(self.samples_per_symbol, self.samples_per_symbol, max_index)
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols.len()
    }

    fn info_amplitude(&self) -> f64 {
        (2.0 * self.info_power / self.info_indices.len() as f64).sqrt()
    }

    /// Information-only rendering.
    pub fn synthesize_info(&self) -> Result<Vec<f64>> {
        self.render(false)
    }

    /// Information plus energy tones.
    pub fn synthesize(&self) -> Result<Vec<f64>> {
        self.render(true)
    }

    fn render(&self, with_energy: bool) -> Result<Vec<f64>> {
        self.validate()?;
        let s = self.samples_per_symbol;
        let amp = self.info_amplitude();
        let energy = match (&self.energy, with_energy) {
            (Some(e), true) => Some(e.synthesize(s, s)?),
            _ => None,
        };
        let mut out = Vec::with_capacity(s * self.n_symbols());
        for block in &self.symbols {
            for j in 0..s {
                let t = j as f64 / s as f64;
                let mut y: f64 = self
                    .info_indices
                    .iter()
                    .zip(block)
                    .map(|(&k, sym)| {
                        let w = 2.0 * PI * k as f64 * t;
                        amp * (sym.re * w.cos() - sym.im * w.sin())
                    })
                    .sum();
                if let Some(e) = &energy {
                    y += e[j];
                }
                out.push(y);
            }
        }
        Ok(out)
    }

    /// Recovers the information symbols from rendered samples by a DFT on
    /// each symbol block.
    pub fn demodulate(&self, samples: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let s = self.samples_per_symbol;
        if samples.len() != s * self.n_symbols() {
            return Err(Error::Invalid(format!(
                "expected {} samples, got {}",
                s * self.n_symbols(),
                samples.len()
            )));
        }
        let amp = self.info_amplitude();
        if amp == 0.0 {
            return Err(Error::Invalid(
                "cannot demodulate zero-power information".into(),
            ));
        }
        let norm = 2.0 / (s as f64 * amp);
        Ok(samples
            .chunks_exact(s)
            .map(|block| {
                self.info_indices
                    .iter()
                    .map(|&k| {
                        let acc: Complex64 = block
                            .iter()
                            .enumerate()
                            .map(|(j, &y)| {
                                let w = -2.0 * PI * ((k * j) % s) as f64 / s as f64;
                                Complex64::from_polar(y, w)
                            })
                            .sum();
                        acc * norm
                    })
                    .collect()
            })
            .collect())
    }
}

/// Outcome of checking that energy tones leave the information intact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrityReport {
    /// Largest symbol difference between composite and information-only
    /// demodulation.
    pub max_symbol_error: f64,
    /// Largest difference between demodulated and transmitted symbols.
    pub max_detection_error: f64,
    /// Diode output for the composite signal (W).
    pub harvested: f64,
    /// Diode output for the information part alone (W).
    pub harvested_info_only: f64,
}

/// Demodulates the composite and the information-only signal and compares.
pub fn info_integrity_check(
    composite: &CompositeSignal,
    diode: &RectennaModel,
) -> Result<IntegrityReport> {
    composite.validate()?;
    let mixed = composite.synthesize()?;
    let clean = composite.synthesize_info()?;
    let a = composite.demodulate(&mixed)?;
    let b = composite.demodulate(&clean)?;
    let max_diff = |x: &[Vec<Complex64>], y: &[Vec<Complex64>]| {
        x.iter()
            .flatten()
            .zip(y.iter().flatten())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    };
    Ok(IntegrityReport {
        max_symbol_error: max_diff(&a, &b),
        max_detection_error: max_diff(&a, &composite.symbols),
        harvested: harvest_dc_waveform(diode, &mixed)?,
        harvested_info_only: harvest_dc_waveform(diode, &clean)?,
    })
}

/// One row of the tone-count trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub n_tones: usize,
    pub papr: f64,
    pub harvested: f64,
    pub max_symbol_error: f64,
}

/// Layout of the tone-count experiment: information on subcarriers
/// `1..=info_subcarriers`, energy tones on the next `N` indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrendConfig {
    pub tone_counts: Vec<usize>,
    /// Received energy-waveform power (W).
    pub energy_power: f64,
    /// Received information power (W).
    pub info_power: f64,
    pub info_subcarriers: usize,
    pub n_symbols: usize,
    pub seed: u64,
    pub diode: RectennaModel,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            tone_counts: vec![1, 2, 4, 8],
            energy_power: 1.0,
            info_power: 0.1,
            info_subcarriers: 8,
            n_symbols: 16,
            seed: 7,
            diode: RectennaModel::default_diode(),
        }
    }
}

/// PAPR of the energy tones, harvested power of the composite, and
/// information integrity per energy-tone count.
pub fn multitone_trend(cfg: &TrendConfig) -> Result<Vec<TrendRow>> {
    cfg.tone_counts
        .iter()
        .map(|&n| {
            let first = cfg.info_subcarriers + 1;
            let energy =
                MultitoneWaveform::on_indices((first..first + n).collect(), cfg.energy_power)?;
            let composite = CompositeSignal::qpsk(
                (1..=cfg.info_subcarriers).collect(),
                cfg.info_power,
                Some(energy.clone()),
                cfg.n_symbols,
                cfg.seed,
            )?;
            let report = info_integrity_check(&composite, &cfg.diode)?;
            Ok(TrendRow {
                n_tones: n,
                papr: papr(&energy)?,
                harvested: report.harvested,
                max_symbol_error: report.max_symbol_error,
            })
        })
        .collect()
}
