//! Built-in oracle suite behind `wipt validate`.
//!
//! Every check compares a solver against an independent reference from
//! [`wipt_core::oracle`] or a closed form, and reports the observed error
//! next to its tolerance.

use wipt_core::capacity::{binary_capacity, max_entropy_capacity, EnergyAlphabet};
use wipt_core::netgeom::{analytic_coverage, NetworkConfig, NetworkEnsemble, Z95};
use wipt_core::oracle;
use wipt_core::receiver::{ps_region, ts_region, unit_grid, SimoChannel};
use wipt_core::rectenna::RectennaModel;
use wipt_core::robust::{worst_case_distribution, Divergence, NominalDistribution};
use wipt_core::waveform::{info_integrity_check, papr, CompositeSignal, MultitoneWaveform};

use crate::{CliError, Command, Context, Table};

struct Check {
    name: &'static str,
    error: f64,
    tolerance: f64,
}

pub fn run(ctx: &Context) -> Result<Table, CliError> {
    let checks = vec![
        binary_vs_grid()?,
        ternary_vs_simplex()?,
        robust_vs_discretized(Divergence::Forward)?,
        robust_vs_discretized(Divergence::Reverse)?,
        ps_dominates_ts()?,
        coverage_vs_closed_form(ctx.seed)?,
        coherent_papr()?,
        integrity()?,
    ];
    let mut t = Table::new(&["check", "status", "error", "tolerance"]);
    t.comments = vec![
        format!("wipt {} validate", env!("CARGO_PKG_VERSION")),
        format!("seed = {}", ctx.seed),
    ];
    for c in checks {
        let status = if c.error <= c.tolerance {
            "PASS"
        } else {
            "FAIL"
        };
        t.push(vec![
            c.name.into(),
            status.into(),
            crate::commands::num(c.error),
            crate::commands::num(c.tolerance),
        ]);
    }
    Ok(t)
}

/// For `validate`, names the failed checks.
pub fn failure_message(command: &Command, table: &Table) -> Option<String> {
    if !matches!(command, Command::Validate) {
        return None;
    }
    let failed: Vec<&str> = table
        .rows
        .iter()
        .filter(|r| r[1] != "PASS")
        .map(|r| r[0].as_str())
        .collect();
    (!failed.is_empty()).then(|| format!("validation failed: {}", failed.join(", ")))
}

fn binary_vs_grid() -> Result<Check, CliError> {
    let mut error: f64 = 0.0;
    for i in 0..=100 {
        let b = i as f64 / 100.0;
        let c = binary_capacity(b)?.capacity;
        error = error.max((c - oracle::binary_capacity_grid(b, 1e-4)).abs());
    }
    Ok(Check {
        name: "binary_capacity_vs_bernoulli_grid",
        error,
        tolerance: 1e-3,
    })
}

fn ternary_vs_simplex() -> Result<Check, CliError> {
    let energies = [0.0, 1.0, 2.0];
    let alphabet = EnergyAlphabet::new(energies.to_vec())?;
    let mut error: f64 = 0.0;
    for i in 0..=20 {
        let b = 2.0 * i as f64 / 20.0;
        let c = max_entropy_capacity(&alphabet, b)?.capacity;
        error = error.max((c - oracle::simplex_capacity_grid(&energies, b, 400)).abs());
    }
    Ok(Check {
        name: "ternary_capacity_vs_simplex_grid",
        error,
        tolerance: 1e-3,
    })
}

fn robust_vs_discretized(dir: Divergence) -> Result<Check, CliError> {
    let mut error: f64 = 0.0;
    for d in [0.01, 0.1, 0.5] {
        let m = worst_case_distribution(NominalDistribution::unit_exponential(), d, dir)?
            .worst_case_mean;
        let reference = oracle::discretized_worst_case_mean(d, dir, 20_000);
        error = error.max((m / reference - 1.0).abs());
    }
    Ok(Check {
        name: match dir {
            Divergence::Forward => "forward_kl_mean_vs_discretized",
            Divergence::Reverse => "reverse_kl_mean_vs_discretized",
        },
        error,
        tolerance: 1e-2,
    })
}

fn ps_dominates_ts() -> Result<Check, CliError> {
    let ch = SimoChannel::default();
    let grid = unit_grid(100);
    let ts = ts_region(&ch, &grid)?;
    let ps = ps_region(&ch, &grid)?;
    let mut shortfall: f64 = 0.0;
    for p in ts.iter() {
        if let Some(r) = ps.rate_at_energy(p.energy) {
            shortfall = shortfall.max(p.rate - r);
        }
    }
    Ok(Check {
        name: "ps_rate_dominates_ts",
        error: shortfall.max(0.0),
        tolerance: 1e-12,
    })
}

fn coverage_vs_closed_form(seed: u64) -> Result<Check, CliError> {
    let cfg = NetworkConfig {
        exclusion_radius: 0.0,
        sigma_n2: 0.0,
        sigma_c2: 0.0,
        sim_radius: 300.0,
        n_realizations: 100_000,
        master_seed: seed,
        ..NetworkConfig::default()
    };
    let exact = analytic_coverage(&cfg)?;
    let m = NetworkEnsemble::generate(&cfg)?.metrics(cfg.transmit_power, cfg.rho, false);
    // Three standard errors plus the truncation bias.
    let se = m.coverage_ci / Z95;
    let tolerance = 3.0 * se + cfg.truncation_error() * exact;
    Ok(Check {
        name: "coverage_vs_closed_form",
        error: (m.coverage_probability - exact).abs(),
        tolerance,
    })
}

fn coherent_papr() -> Result<Check, CliError> {
    let mut error: f64 = 0.0;
    for n in [1usize, 2, 4, 8] {
        let wf = MultitoneWaveform::equal(n, 1.0)?;
        let samples = wf.synthesize_default()?;
        let (m2, _) = wipt_core::rectenna::even_moments(&samples);
        let peak = samples.iter().map(|v| v * v).fold(0.0, f64::max);
        error = error.max((papr(&wf)? - 2.0 * n as f64).abs());
        error = error.max((peak / m2 - 2.0 * n as f64).abs());
    }
    Ok(Check {
        name: "zero_phase_papr_is_2n",
        error,
        tolerance: 1e-9,
    })
}

fn integrity() -> Result<Check, CliError> {
    let energy = MultitoneWaveform::on_indices((9..17).collect(), 1.0)?;
    let composite = CompositeSignal::qpsk((1..=8).collect(), 0.1, Some(energy), 16, 7)?;
    let report = info_integrity_check(&composite, &RectennaModel::default_diode())?;
    Ok(Check {
        name: "information_integrity",
        error: report.max_symbol_error,
        tolerance: 1e-9,
    })
}
