//! Worst-case harvested energy under KL-divergence uncertainty.
//!
//! The harvested energy `X` has an unknown density `f` that is only known to
//! lie within KL radius `d` of a nominal `f0`. The worst case minimizes
//! `E_f[X]` over that ball. Two ball shapes are supported because the
//! divergence is asymmetric:
//!
//! - [`Divergence::Forward`], `D(f || f0) <= d`. The minimizer is an
//!   exponential tilt `f ∝ f0 · exp(-s x)`; for an exponential nominal it
//!   stays exponential with a larger rate `λ` solving
//!   `ln(λ/r) + r/λ - 1 = d`.
//! - [`Divergence::Reverse`], `D(f0 || f) <= d`. Stationarity of the
//!   Lagrangian gives `f*(x) = λ f0(x) / (x + μ)`. Normalization fixes `λ`
//!   once `μ` is known, so the pair is found by a monotone search on `μ`
//!   with every integral evaluated by adaptive quadrature on `[0, X_max]`.
//!
//! Both solutions are computed for the unit-rate nominal and rescaled, since
//! the KL divergence is invariant under `x -> x / r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, integrate_panels};

/// Nominal harvested-energy distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NominalDistribution {
    Exponential { rate: f64 },
}

impl NominalDistribution {
    /// The unit-mean exponential.
    pub fn unit_exponential() -> Self {
        NominalDistribution::Exponential { rate: 1.0 }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            NominalDistribution::Exponential { rate } => rate,
        }
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        -(-self.rate() * x).exp_m1()
    }

    fn validate(&self) -> Result<()> {
        let r = self.rate();
        if r.is_finite() && r > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("nominal rate must be positive", r))
        }
    }
}

/// Which argument order of the KL divergence bounds the uncertainty ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    /// `D(f || f0) <= d`
    Forward,
    /// `D(f0 || f) <= d`
    Reverse,
}

impl Divergence {
    pub fn label(&self) -> &'static str {
        match self {
            Divergence::Forward => "forward",
            Divergence::Reverse => "reverse",
        }
    }
}

impl std::str::FromStr for Divergence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Divergence::Forward),
            "reverse" => Ok(Divergence::Reverse),
            other => Err(Error::Invalid(format!(
                "unknown divergence direction '{other}' (expected forward or reverse)"
            ))),
        }
    }
}

/// Solver tolerances for [`worst_case_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Allowed deviation of the solved density's total mass from 1.
    pub normalization_tol: f64,
    /// Allowed deviation of the achieved divergence from the radius.
    pub divergence_tol: f64,
    /// Nominal tail mass discarded beyond the quadrature cutoff.
    pub tail_mass: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            normalization_tol: 1e-8,
            divergence_tol: 1e-6,
            tail_mass: 1e-10,
            max_iterations: 200,
        }
    }
}

impl SolverOptions {
    /// Quadrature cutoff, in unit-rate coordinates.
    pub fn unit_cutoff(&self) -> f64 {
        -self.tail_mass.ln()
    }
}

/// Parameters of the solved worst-case density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WorstCaseForm {
    /// Zero radius: the nominal itself.
    Nominal,
    /// `λ e^{-λ x}`.
    Exponential { rate: f64 },
    /// `scale · f0(x) / (x + shift)` on `[0, cutoff]`.
    Reciprocal { scale: f64, shift: f64, cutoff: f64 },
}

/// Worst-case distribution inside a KL ball around the nominal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedDistribution {
    pub nominal: NominalDistribution,
    pub direction: Divergence,
    pub radius: f64,
    pub form: WorstCaseForm,
    pub worst_case_mean: f64,
    /// Divergence of the solution, evaluated independently of the solve.
    pub achieved_divergence: f64,
    /// Total probability mass of the solution.
    pub normalization: f64,
}

/// Solves for the distribution minimizing mean harvested energy in the ball.
pub fn worst_case_distribution(
    nominal: NominalDistribution,
    d: f64,
    direction: Divergence,
) -> Result<TiltedDistribution> {
    worst_case_distribution_with(nominal, d, direction, &SolverOptions::default())
}

pub fn worst_case_distribution_with(
    nominal: NominalDistribution,
    d: f64,
    direction: Divergence,
    opts: &SolverOptions,
) -> Result<TiltedDistribution> {
    nominal.validate()?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain("KL radius must be non-negative", d));
    }
    let r = nominal.rate();
    if d == 0.0 {
        return Ok(TiltedDistribution {
            nominal,
            direction,
            radius: 0.0,
            form: WorstCaseForm::Nominal,
            worst_case_mean: nominal.mean(),
            achieved_divergence: 0.0,
            normalization: 1.0,
        });
    }
    let dist = match direction {
        Divergence::Forward => {
            let t = solve_forward_ratio(d, opts)?;
            TiltedDistribution {
                nominal,
                direction,
                radius: d,
                form: WorstCaseForm::Exponential { rate: t * r },
                worst_case_mean: 1.0 / (t * r),
                achieved_divergence: forward_exponential_kl(t),
                normalization: 1.0,
            }
        }
        Divergence::Reverse => {
            let sol = solve_reverse_unit(d, opts)?;
            TiltedDistribution {
                nominal,
                direction,
                radius: d,
                form: WorstCaseForm::Reciprocal {
                    scale: sol.scale / r,
                    shift: sol.shift / r,
                    cutoff: sol.cutoff / r,
                },
                worst_case_mean: sol.mean / r,
                achieved_divergence: sol.divergence,
                normalization: sol.normalization,
            }
        }
    };
    let norm_err = (dist.normalization - 1.0).abs();
    let div_err = (dist.achieved_divergence - d).abs();
    if norm_err > opts.normalization_tol || div_err > opts.divergence_tol {
        return Err(Error::Convergence {
            solver: "worst-case distribution",
            iterations: opts.max_iterations,
            residuals: vec![norm_err, div_err],
        });
    }
    Ok(dist)
}

/// `D(Exp(t) || Exp(1)) = ln t + 1/t - 1`.
pub fn forward_exponential_kl(t: f64) -> f64 {
    t.ln() + 1.0 / t - 1.0
}

fn solve_forward_ratio(d: f64, opts: &SolverOptions) -> Result<f64> {
    let mut hi = 2.0;
    while forward_exponential_kl(hi) < d {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::domain("KL radius too large", d));
        }
    }
    bisect(
        |t| forward_exponential_kl(t) - d,
        1.0,
        hi,
        1e-15,
        1e-13,
        opts.max_iterations,
    )
}

struct ReverseSolution {
    scale: f64,
    shift: f64,
    cutoff: f64,
    mean: f64,
    divergence: f64,
    normalization: f64,
}

const QUAD_ABS: f64 = 1e-15;
const QUAD_REL: f64 = 1e-13;

/// Panels refined geometrically near the origin, where `1/(x + μ)` varies on
/// the scale of `μ`.
fn panels(shift: f64, cutoff: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut v = shift;
    while v < cutoff {
        pts.push(v);
        v *= 10.0;
    }
    if !pts.contains(&1.0) && cutoff > 1.0 && shift < 1.0 {
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
    }
    pts.push(cutoff);
    pts
}

/// Integrals that define the unit-rate reverse solution for a given shift.
struct ReverseIntegrals {
    /// `∫ e^{-x} μ/(x+μ) dx`; the scale is `μ / h`.
    h: f64,
    /// `∫ e^{-x} ln(1 + x/μ) dx`
    log_term: f64,
    /// `∫ e^{-x} dx` over the truncated support.
    nominal_mass: f64,
}

impl ReverseIntegrals {
    fn new(shift: f64, cutoff: f64) -> Result<Self> {
        let pts = panels(shift, cutoff);
        let h = integrate_panels(
            |x| (-x).exp() * shift / (x + shift),
            &pts,
            QUAD_ABS,
            QUAD_REL,
        )?;
        let log_term = integrate_panels(
            |x| (-x).exp() * (x / shift).ln_1p(),
            &pts,
            QUAD_ABS,
            QUAD_REL,
        )?;
        Ok(ReverseIntegrals {
            h,
            log_term,
            nominal_mass: -(-cutoff).exp_m1(),
        })
    }

    /// `D(f0 || f*) = ∫ f0 ln((x+μ)/λ) = ∫ f0 ln(1+x/μ) + m0 ln(μ/λ)` with `μ/λ = h`.
    fn divergence(&self) -> f64 {
        self.log_term + self.nominal_mass * self.h.ln()
    }
}

fn solve_reverse_unit(d: f64, opts: &SolverOptions) -> Result<ReverseSolution> {
    let cutoff = opts.unit_cutoff();
    let residual = |log_shift: f64| -> f64 {
        match ReverseIntegrals::new(log_shift.exp(), cutoff) {
            Ok(ints) => ints.divergence() - d,
            Err(_) => f64::NAN,
        }
    };
    // Divergence decreases in the shift: infinite as μ -> 0, zero as μ -> ∞.
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let r0 = residual(0.0);
    if r0.is_nan() {
        return Err(Error::Convergence {
            solver: "reverse-KL bracketing",
            iterations: 0,
            residuals: vec![r0],
        });
    }
    if r0 > 0.0 {
        while residual(hi) > 0.0 {
            lo = hi;
            hi += 2.0;
            if hi > 60.0 {
                return Err(Error::domain("KL radius too small to resolve", d));
            }
        }
    } else {
        while residual(lo) < 0.0 {
            hi = lo;
            lo -= 2.0;
            if lo < -460.0 {
                return Err(Error::Convergence {
                    solver: "reverse-KL bracketing",
                    iterations: opts.max_iterations,
                    residuals: vec![residual(lo)],
                });
            }
        }
    }
    let log_shift = bisect(
        residual,
        lo,
        hi,
        1e-14,
        1e-3 * opts.divergence_tol,
        opts.max_iterations,
    )?;
    let shift = log_shift.exp();
    let ints = ReverseIntegrals::new(shift, cutoff)?;
    let scale = shift / ints.h;
    let pts = panels(shift, cutoff);
    let density = |x: f64| scale * (-x).exp() / (x + shift);
    let normalization = integrate_panels(density, &pts, QUAD_ABS, QUAD_REL)?;
    let mean = integrate_panels(|x| x * density(x), &pts, QUAD_ABS, QUAD_REL)?;
    let divergence = integrate_panels(
        |x| {
            let f0 = (-x).exp();
            f0 * (f0 / density(x)).ln()
        },
        &pts,
        QUAD_ABS,
        QUAD_REL,
    )?;
    Ok(ReverseSolution {
        scale,
        shift,
        cutoff,
        mean,
        divergence,
        normalization,
    })
}

impl TiltedDistribution {
    /// Density of the worst-case distribution at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let r = self.nominal.rate();
        match self.form {
            WorstCaseForm::Nominal => r * (-r * x).exp(),
            WorstCaseForm::Exponential { rate } => rate * (-rate * x).exp(),
            WorstCaseForm::Reciprocal {
                scale,
                shift,
                cutoff,
            } => {
                if x > cutoff {
                    0.0
                } else {
                    scale * r * (-r * x).exp() / (x + shift)
                }
            }
        }
    }

    /// Rate of the worst-case exponential, when the solution is exponential.
    pub fn tilted_rate(&self) -> Option<f64> {
        match self.form {
            WorstCaseForm::Nominal => Some(self.nominal.rate()),
            WorstCaseForm::Exponential { rate } => Some(rate),
            WorstCaseForm::Reciprocal { .. } => None,
        }
    }
}

/// CDF of the worst-case distribution on an ascending, non-negative grid.
pub fn worst_case_cdf(dist: &TiltedDistribution, x_grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(&x) = x_grid.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::domain("CDF grid must be non-negative", x));
    }
    if x_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid("CDF grid must be sorted ascending".into()));
    }
    let exp_cdf = |rate: f64, x: f64| -(-rate * x).exp_m1();
    match dist.form {
        WorstCaseForm::Nominal => Ok(x_grid.iter().map(|&x| dist.nominal.cdf(x)).collect()),
        WorstCaseForm::Exponential { rate } => {
            Ok(x_grid.iter().map(|&x| exp_cdf(rate, x)).collect())
        }
        WorstCaseForm::Reciprocal {
            scale,
            shift,
            cutoff,
        } => {
            // Unit-rate coordinates: u = r x.
            let r = dist.nominal.rate();
            let (su, cu) = (shift * r, cutoff * r);
            let su_scale = scale * r;
            let density = |u: f64| su_scale * (-u).exp() / (u + su);
            let all_panels = panels(su, cu);
            let mut out = Vec::with_capacity(x_grid.len());
            let mut acc = 0.0;
            let mut prev = 0.0;
            for &x in x_grid {
                let u = (x * r).min(cu);
                if u > prev {
                    let mut pts = vec![prev];
                    pts.extend(all_panels.iter().copied().filter(|&p| p > prev && p < u));
                    pts.push(u);
                    acc += integrate_panels(density, &pts, QUAD_ABS, QUAD_REL)?;
                    prev = u;
                }
                let cdf = if x * r >= cu {
                    1.0
                } else {
                    acc.clamp(0.0, 1.0)
                };
                out.push(cdf);
            }
            // Enforce monotonicity against rounding at the last ulp.
            for i in 1..out.len() {
                if out[i] < out[i - 1] {
                    out[i] = out[i - 1];
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn unit() -> NominalDistribution {
        NominalDistribution::unit_exponential()
    }

    #[test]
    fn zero_radius_is_nominal() {
        for dir in [Divergence::Forward, Divergence::Reverse] {
            let w = worst_case_distribution(unit(), 0.0, dir).unwrap();
            assert_eq!(w.worst_case_mean, 1.0);
            let cdf = worst_case_cdf(&w, &[0.0, LN_2]).unwrap();
            assert_eq!(cdf[0], 0.0);
            assert!((cdf[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_rate_matches_fine_grid_search() {
        // Independent check: scan t on a 1e-6 grid for the crossing.
        let d = 0.05;
        let mut t: f64 = 1.0;
        while t.ln() + 1.0 / t - 1.0 < d {
            t += 1e-6;
        }
        let w = worst_case_distribution(unit(), d, Divergence::Forward).unwrap();
        let rate = w.tilted_rate().unwrap();
        assert!((rate - t).abs() < 2e-6, "{rate} vs {t}");
        assert!((rate - 1.40).abs() < 0.01);
        assert!((w.worst_case_mean - 0.72).abs() < 0.01);
    }

    #[test]
    fn reverse_solution_is_consistent() {
        for d in [1e-4, 0.01, 0.05, 0.1, 0.5, 1.0, 2.0] {
            let w = worst_case_distribution(unit(), d, Divergence::Reverse).unwrap();
            assert!(
                (w.normalization - 1.0).abs() < 1e-8,
                "d={d}: {}",
                w.normalization
            );
            assert!((w.achieved_divergence - d).abs() < 1e-6);
            let WorstCaseForm::Reciprocal { scale, shift, .. } = w.form else {
                panic!("expected reciprocal form")
            };
            // Mean identity: ∫ x λ f0/(x+μ) = λ ∫ f0 - μ ∫ λ f0/(x+μ) = λ - μ.
            assert!((w.worst_case_mean - (scale - shift)).abs() < 1e-8, "d={d}");
            assert!(w.worst_case_mean < 1.0);
        }
    }

    #[test]
    fn rate_scaling() {
        let nominal = NominalDistribution::Exponential { rate: 4.0 };
        for dir in [Divergence::Forward, Divergence::Reverse] {
            let unit_w = worst_case_distribution(unit(), 0.2, dir).unwrap();
            let w = worst_case_distribution(nominal, 0.2, dir).unwrap();
            assert!((w.worst_case_mean - unit_w.worst_case_mean / 4.0).abs() < 1e-10);
            let a = worst_case_cdf(&unit_w, &[0.4, 1.2]).unwrap();
            let b = worst_case_cdf(&w, &[0.1, 0.3]).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn reverse_cdf_matches_density_integral() {
        let w = worst_case_distribution(unit(), 0.3, Divergence::Reverse).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let cdf = worst_case_cdf(&w, &grid).unwrap();
        assert_eq!(cdf[0], 0.0);
        for (x, c) in grid.iter().zip(&cdf).step_by(37) {
            let direct = crate::numeric::integrate(|t| w.pdf(t), 0.0, *x, 1e-14, 1e-12)
                .unwrap()
                .0;
            assert!((direct - c).abs() < 1e-9, "x={x}: {direct} vs {c}");
        }
        assert!((cdf.last().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            worst_case_distribution(unit(), -0.1, Divergence::Forward),
            Err(Error::Domain { .. })
        ));
        let w = worst_case_distribution(unit(), 0.1, Divergence::Forward).unwrap();
        assert!(worst_case_cdf(&w, &[1.0, 0.5]).is_err());
        assert!(worst_case_cdf(&w, &[-1.0]).is_err());
    }

    #[test]
    fn means_decrease_with_radius() {
        for dir in [Divergence::Forward, Divergence::Reverse] {
            let means: Vec<f64> = [0.0, 0.01, 0.05, 0.2, 0.5, 1.0]
                .iter()
                .map(|&d| {
                    worst_case_distribution(unit(), d, dir)
                        .unwrap()
                        .worst_case_mean
                })
                .collect();
            assert!(means.windows(2).all(|w| w[1] < w[0]), "{dir:?}: {means:?}");
        }
    }

    #[test]
    fn asymmetric_directions() {
        let f = worst_case_distribution(unit(), 0.1, Divergence::Forward).unwrap();
        let r = worst_case_distribution(unit(), 0.1, Divergence::Reverse).unwrap();
        assert!((f.worst_case_mean - r.worst_case_mean).abs() > 1e-3);
    }
}
