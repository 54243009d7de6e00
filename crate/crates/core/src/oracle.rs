//! Brute-force reference computations.
//!
//! Nothing here calls into the solvers it is used to check. The routines are
//! deliberately naive: exhaustive grids, discretized convex programs solved
//! through their scalar duals, and textbook closed forms.

use crate::numeric::golden_max;
use crate::robust::Divergence;

fn entropy2(p: f64) -> f64 {
    let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// Capacity of the on-off binary channel by scanning Bernoulli parameters
/// `p = 0, step, 2 step, ...` that meet `p >= b`.
pub fn binary_capacity_grid(b: f64, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    (0..=n)
        .map(|i| i as f64 / n as f64)
        .filter(|&p| p >= b - 1e-15)
        .map(entropy2)
        .fold(0.0, f64::max)
}

/// Maximum entropy (bits) over the probability simplex on a lattice of
/// spacing `1/steps`, subject to expected energy `>= b`. Supports up to
/// four symbols.
pub fn simplex_capacity_grid(energies: &[f64], b: f64, steps: usize) -> f64 {
    let k = energies.len();
    assert!((2..=4).contains(&k), "grid search supports 2 to 4 symbols");
    let table: Vec<f64> = (0..=steps)
        .map(|i| {
            let q = i as f64 / steps as f64;
            if q > 0.0 {
                -q * q.log2()
            } else {
                0.0
            }
        })
        .collect();
    let tol = 1e-12 * (1.0 + b.abs());
    let mut best = f64::NEG_INFINITY;
    let scale = 1.0 / steps as f64;
    let mut visit = |counts: &[usize]| {
        let energy: f64 = counts
            .iter()
            .zip(energies)
            .map(|(&c, e)| c as f64 * scale * e)
            .sum();
        if energy >= b - tol {
            let h: f64 = counts.iter().map(|&c| table[c]).sum();
            if h > best {
                best = h;
            }
        }
    };
    match k {
        2 => (0..=steps).for_each(|a| visit(&[a, steps - a])),
        3 => {
            for a in 0..=steps {
                for c in 0..=steps - a {
                    visit(&[a, c, steps - a - c]);
                }
            }
        }
        _ => {
            for a in 0..=steps {
                for c in 0..=steps - a {
                    for e in 0..=steps - a - c {
                        visit(&[a, c, e, steps - a - c - e]);
                    }
                }
            }
        }
    }
    best
}

/// Exponential(rate) discretized into `cells` equal cells on `[0, cutoff]`:
/// cell probabilities and within-cell conditional means.
pub fn discretized_exponential(rate: f64, cutoff: f64, cells: usize) -> (Vec<f64>, Vec<f64>) {
    let w = cutoff / cells as f64;
    let mut probs = Vec::with_capacity(cells);
    let mut values = Vec::with_capacity(cells);
    for i in 0..cells {
        let a = i as f64 * w;
        let b = a + w;
        probs.push((-rate * a).exp() - (-rate * b).exp());
        // E[X | a <= X < b] for X ~ Exp(rate)
        let u = rate * w;
        values.push(a + 1.0 / rate - w / u.exp_m1());
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    (probs, values)
}

/// Optimal value of `min_q c·q` over the simplex subject to a KL constraint
/// around `p`, evaluated through its scalar dual.
///
/// Forward, `KL(q || p) <= d`:
/// `max_{ν>0} -ν ln Σ p_i e^{-c_i/ν} - ν d`.
///
/// Reverse, `KL(p || q) <= d`: maximizing the Lagrange dual over the
/// multiplier of the KL constraint in closed form leaves
/// `max_{κ > -min c} exp(Σ p_i ln(c_i + κ) - d) - κ`.
pub fn kl_ball_min_mean(probs: &[f64], values: &[f64], d: f64, direction: Divergence) -> f64 {
    if d == 0.0 {
        return probs.iter().zip(values).map(|(p, c)| p * c).sum();
    }
    let c_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    match direction {
        Divergence::Forward => {
            let dual = |log_nu: f64| {
                let nu = log_nu.exp();
                let s: f64 = probs
                    .iter()
                    .zip(values)
                    .map(|(p, c)| p * (-(c - c_min) / nu).exp())
                    .sum();
                c_min - nu * s.ln() - nu * d
            };
            golden_max(dual, -25.0, 25.0, 1e-12).1
        }
        Divergence::Reverse => {
            let dual = |log_shift: f64| {
                let kappa = -c_min + log_shift.exp();
                let e: f64 = probs
                    .iter()
                    .zip(values)
                    .map(|(p, c)| p * (c + kappa).ln())
                    .sum();
                (e - d).exp() - kappa
            };
            golden_max(dual, -40.0, 10.0, 1e-12).1
        }
    }
}

/// Worst-case mean for a unit-rate exponential nominal by the discretized
/// program on `cells` cells over `[0, 30]`.
pub fn discretized_worst_case_mean(d: f64, direction: Divergence, cells: usize) -> f64 {
    let (p, c) = discretized_exponential(1.0, 30.0, cells);
    kl_ball_min_mean(&p, &c, d, direction)
}

/// Campbell's theorem: mean interference from a PPP of density `lambda` on
/// the annulus `[r0, r1]` with unit-mean fading, power `p`, path loss
/// `r^-alpha`.
pub fn campbell_mean_interference(lambda: f64, p: f64, alpha: f64, r0: f64, r1: f64) -> f64 {
    let k = 2.0 - alpha;
    2.0 * std::f64::consts::PI * lambda * p * (r1.powf(k) - r0.powf(k)) / k
}
