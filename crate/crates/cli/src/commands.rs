//! Subcommand implementations. Each returns a [`Table`].

use std::path::Path;

use serde::Serialize;
use wipt_core::capacity::{region_boundary, EnergyAlphabet};
use wipt_core::netgeom::power_sweep;
use wipt_core::receiver::{as_points, outer_bound, ps_region, ts_region, unit_grid};
use wipt_core::rectenna::{harvest_dc, RectennaModel};
use wipt_core::robust::{worst_case_cdf, worst_case_distribution_with, NominalDistribution};
use wipt_core::waveform::{harvest_multitone, multitone_trend, MultitoneWaveform};

use crate::config::parse_range;
use crate::{validate, CliError, Command, Context, Table};

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::Models => "models",
        Command::Robust => "robust",
        Command::Capacity { .. } => "capacity",
        Command::Receivers => "receivers",
        Command::Network { .. } => "network",
        Command::Waveform => "waveform",
        Command::Validate => "validate",
    }
}

pub fn dispatch(command: &Command, ctx: &Context) -> Result<Table, CliError> {
    match command {
        Command::Models => models(ctx),
        Command::Robust => robust(ctx),
        Command::Capacity { grid, energies } => capacity(ctx, grid.as_deref(), energies.as_deref()),
        Command::Receivers => receivers(ctx),
        Command::Network { p_dbw, rho } => network(ctx, p_dbw.as_deref(), rho.as_deref()),
        Command::Waveform => waveform(ctx),
        Command::Validate => validate::run(ctx),
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `# wipt <version> <command>` followed by the resolved section as TOML.
fn provenance<T: Serialize>(
    command: &str,
    seed: Option<u64>,
    section: &str,
    value: &T,
) -> Vec<String> {
    let mut lines = vec![format!("wipt {} {command}", env!("CARGO_PKG_VERSION"))];
    if let Some(seed) = seed {
        lines.push(format!("seed = {seed}"));
    }
    let mut root = toml::Table::new();
    if let Ok(v) = toml::Value::try_from(value) {
        root.insert(section.to_string(), v);
    }
    lines.push(
        toml::to_string(&root)
            .unwrap_or_default()
            .trim_end()
            .to_string(),
    );
    lines
}

fn models(ctx: &Context) -> Result<Table, CliError> {
    let section = &ctx.file.models;
    let grid = parse_range(&section.p_rf)?;
    let mut t = Table::new(&["model", "p_rf_W", "p_dc_W"]);
    t.comments = provenance("models", None, "models", section);
    for model in &section.models {
        model.validate()?;
        for &p in &grid {
            let dc = match model {
                // The diode model needs a waveform: drive it with one
                // continuous-wave tone of power `p`.
                RectennaModel::DiodePolynomial { .. } => {
                    harvest_multitone(&MultitoneWaveform::equal(1, p)?, model)?
                }
                _ => harvest_dc(model, p)?,
            };
            t.push(vec![model.name().into(), num(p), num(dc)]);
        }
    }
    Ok(t)
}

fn robust(ctx: &Context) -> Result<Table, CliError> {
    let s = &ctx.file.robust;
    if s.points < 2 || !(s.x_max > 0.0) {
        return Err(CliError::Config(
            "robust needs points >= 2 and x_max > 0".into(),
        ));
    }
    let nominal = NominalDistribution::Exponential {
        rate: s.nominal_rate,
    };
    let grid: Vec<f64> = (0..s.points)
        .map(|i| s.x_max * i as f64 / (s.points - 1) as f64)
        .collect();
    let mut t = Table::new(&["direction", "d", "x", "cdf"]);
    t.comments = provenance("robust", None, "robust", s);
    for &dir in &s.directions {
        for &d in &s.radii {
            let dist = worst_case_distribution_with(nominal, d, dir, &s.solver)?;
            t.comments.push(format!(
                "mean direction={} d={d} worst_case_mean={} achieved_divergence={}",
                dir.label(),
                dist.worst_case_mean,
                dist.achieved_divergence
            ));
            let cdf = worst_case_cdf(&dist, &grid)?;
            for (x, f) in grid.iter().zip(cdf) {
                t.push(vec![dir.label().into(), num(d), num(*x), num(f)]);
            }
        }
    }
    Ok(t)
}

fn capacity(
    ctx: &Context,
    grid: Option<&str>,
    energies: Option<&[f64]>,
) -> Result<Table, CliError> {
    let mut s = ctx.file.capacity.clone();
    if let Some(g) = grid {
        s.grid = g.to_string();
    }
    if let Some(e) = energies {
        s.energies = e.to_vec();
    }
    let alphabet = EnergyAlphabet::new(s.energies.clone())?;
    let b_grid = parse_range(&s.grid)?;
    let boundary = region_boundary(&alphabet, &b_grid)?;
    let mut columns = vec!["b".to_string(), "capacity_bpcu".to_string()];
    columns.extend((0..alphabet.len()).map(|i| format!("p_symbol_{i}")));
    let mut t = Table {
        comments: provenance("capacity", None, "capacity", &s),
        columns,
        rows: Vec::with_capacity(boundary.len()),
    };
    for pt in boundary {
        let mut row = vec![num(pt.b), num(pt.capacity)];
        row.extend(pt.distribution.iter().map(|&p| num(p)));
        t.push(row);
    }
    Ok(t)
}

fn receivers(ctx: &Context) -> Result<Table, CliError> {
    let s = &ctx.file.receivers;
    if s.intervals == 0 {
        return Err(CliError::Config(
            "receivers.intervals must be positive".into(),
        ));
    }
    let grid = unit_grid(s.intervals);
    let mut t = Table::new(&["scheme", "parameter", "rate_bpcu", "energy_W"]);
    t.comments = provenance("receivers", None, "receivers", s);
    let mut curves = vec![ts_region(&s.channel, &grid)?, ps_region(&s.channel, &grid)?];
    if s.channel.channel_gains.len() >= 2 {
        curves.push(as_points(&s.channel)?);
    }
    for c in &curves {
        for (param, p) in &c.points {
            t.push(vec![
                c.scheme.clone(),
                num(*param),
                num(p.rate),
                num(p.energy),
            ]);
        }
    }
    if s.channel.harvester.is_linear() {
        let corner = outer_bound(&s.channel)?;
        t.push(vec![
            "outer".into(),
            num(f64::NAN),
            num(corner.rate),
            num(corner.energy),
        ]);
    } else {
        t.comments
            .push("outer bound omitted: harvester is not linear".into());
    }
    Ok(t)
}

fn network(ctx: &Context, p_dbw: Option<&str>, rho: Option<&[f64]>) -> Result<Table, CliError> {
    let mut s = ctx.file.network.clone();
    if let Some(p) = p_dbw {
        s.p_dbw = p.to_string();
    }
    if let Some(r) = rho {
        s.rho_baselines = r.to_vec();
    }
    if let Some(n) = ctx.realizations {
        s.n_realizations = n;
    }
    let powers = parse_range(&s.p_dbw)?;
    let config = s.to_config(ctx.seed);
    let rows = power_sweep(&config, &powers, &s.rho_baselines)?;
    let mut t = Table::new(&[
        "P_dBW",
        "rho_baseline",
        "rho_mode",
        "rho",
        "sic",
        "coverage",
        "coverage_ci",
        "harvested_W",
        "harvested_ci",
    ]);
    t.comments = provenance("network", Some(ctx.seed), "network", &s);
    for r in rows {
        t.push(vec![
            num(r.p_dbw),
            num(r.rho_baseline),
            r.mode.label().into(),
            num(r.rho),
            r.sic.to_string(),
            num(r.metrics.coverage_probability),
            num(r.metrics.coverage_ci),
            num(r.metrics.avg_harvested_energy),
            num(r.metrics.harvested_ci),
        ]);
    }
    Ok(t)
}

fn waveform(ctx: &Context) -> Result<Table, CliError> {
    let mut cfg = ctx.file.waveform.clone();
    if let Some(seed) = ctx.explicit_seed {
        cfg.seed = seed;
    }
    let rows = multitone_trend(&cfg)?;
    let mut t = Table::new(&["N", "papr", "harvested_W", "max_symbol_error"]);
    t.comments = provenance("waveform", None, "waveform", &cfg);
    for r in rows {
        t.push(vec![
            r.n_tones.to_string(),
            num(r.papr),
            num(r.harvested),
            num(r.max_symbol_error),
        ]);
    }
    Ok(t)
}

/// A gnuplot script plotting the table stored at `data`.
pub fn plot_script(command: &Command, data: &Path) -> String {
    let file = data.display().to_string().replace('\'', "");
    let head = format!(
        "# gnuplot script for wipt {}\nset datafile separator ','\nset datafile commentschars '#'\nset datafile columnheaders\nset key outside\nset grid\n",
        name(command)
    );
    let body = match command {
        Command::Models => format!(
            "set xlabel 'P_rf (W)'\nset ylabel 'P_dc (W)'\nplot for [m in 'linear piecewise_linear sigmoid diode_polynomial'] '{file}' using 2:(strcol(1) eq m ? $3 : NaN) with lines title m\n"
        ),
        Command::Robust => format!(
            "set xlabel 'x'\nset ylabel 'CDF'\nplot '{file}' using 3:(strcol(1) eq 'forward' ? $4 : NaN) with lines title 'forward', '{file}' using 3:(strcol(1) eq 'reverse' ? $4 : NaN) with lines title 'reverse'\n"
        ),
        Command::Capacity { .. } => format!(
            "set xlabel 'b (epcu)'\nset ylabel 'C(b) (bpcu)'\nplot '{file}' using 1:2 with lines title 'capacity'\n"
        ),
        Command::Receivers => format!(
            "set xlabel 'energy (W)'\nset ylabel 'rate (bpcu)'\nplot for [s in 'ts ps as outer'] '{file}' using 4:(strcol(1) eq s ? $3 : NaN) with linespoints title s\n"
        ),
        Command::Network { .. } => format!(
            "set xlabel 'P (dBW)'\nset ylabel 'harvested (W)'\nset logscale y\nplot for [m in 'fixed adapted bound'] '{file}' using 1:(strcol(3) eq m ? $8 : NaN) with linespoints title m\n"
        ),
        Command::Waveform => format!(
            "set xlabel 'N'\nset ylabel 'harvested (W)'\nplot '{file}' using 1:3 with linespoints title 'harvested'\n"
        ),
        Command::Validate => String::new(),
    };
    head + &body
}
