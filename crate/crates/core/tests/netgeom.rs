use statrs::function::gamma::gamma;
use wipt_core::netgeom::{
    analytic_coverage, noise_only_coverage, power_sweep, sample_realization, NetworkConfig,
    NetworkEnsemble, RhoMode, Z95,
};
use wipt_core::oracle::campbell_mean_interference;

fn config(n: usize) -> NetworkConfig {
    NetworkConfig {
        n_realizations: n,
        ..NetworkConfig::default()
    }
}

#[test]
fn interferer_count_is_poisson() {
    let cfg = config(10_000);
    let counts: Vec<f64> = (0..cfg.n_realizations as u64)
        .map(|i| sample_realization(&cfg, i).interferer_distances.len() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let expected = cfg.mean_interferers();
    let se = (expected / n).sqrt();
    assert!((mean - expected).abs() <= 3.0 * se, "{mean} vs {expected}");
    // Poisson dispersion: variance equals the mean.
    assert!((var / expected - 1.0).abs() < 0.05);
}

#[test]
fn mean_interference_follows_campbell() {
    let cfg = config(10_000);
    let ens = NetworkEnsemble::generate(&cfg).unwrap();
    let (mean, se) = ens.mean_interference(cfg.transmit_power);
    let expected = campbell_mean_interference(
        cfg.lambda,
        cfg.transmit_power,
        cfg.alpha,
        cfg.exclusion_radius,
        cfg.sim_radius,
    );
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "{mean} vs {expected} (se {se})"
    );
}

#[test]
fn noise_limited_coverage_matches_closed_form() {
    let cfg = NetworkConfig {
        lambda: 0.0,
        transmit_power: 1e4,
        ..config(20_000)
    };
    let m = NetworkEnsemble::generate(&cfg)
        .unwrap()
        .metrics(cfg.transmit_power, cfg.rho, false);
    let exact = noise_only_coverage(&cfg);
    let se = (exact * (1.0 - exact) / cfg.n_realizations as f64).sqrt();
    assert!((m.coverage_probability - exact).abs() <= 3.0 * se);
}

#[test]
fn closed_form_uses_the_gamma_product() {
    let cfg = NetworkConfig {
        exclusion_radius: 0.0,
        sigma_n2: 0.0,
        sigma_c2: 0.0,
        alpha: 3.5,
        ..config(1)
    };
    let delta = 2.0 / cfg.alpha;
    let expected = (-std::f64::consts::PI
        * cfg.lambda
        * cfg.d
        * cfg.d
        * cfg.theta.powf(delta)
        * gamma(1.0 + delta)
        * gamma(1.0 - delta))
    .exp();
    assert!((analytic_coverage(&cfg).unwrap() - expected).abs() < 1e-12);
    let with_noise = NetworkConfig {
        sigma_n2: 0.1,
        ..cfg
    };
    assert!(analytic_coverage(&with_noise).is_err());
}

#[test]
fn interference_limited_coverage_matches_closed_form() {
    let cfg = NetworkConfig {
        exclusion_radius: 0.0,
        sigma_n2: 0.0,
        sigma_c2: 0.0,
        sim_radius: 300.0,
        ..config(100_000)
    };
    assert!(cfg.truncation_error() < 1e-3);
    let exact = analytic_coverage(&cfg).unwrap();
    let m = NetworkEnsemble::generate(&cfg)
        .unwrap()
        .metrics(1.0, cfg.rho, false);
    let se = m.coverage_ci / Z95;
    assert!((m.coverage_probability - exact).abs() <= 3.5 * se + 1e-3 * exact);
}

#[test]
fn sic_never_hurts_any_realization() {
    let cfg = config(10_000);
    let ens = NetworkEnsemble::generate(&cfg).unwrap();
    for p in [1.0, 1e3, 1e5] {
        for rho in [0.1, 0.5, 0.9] {
            for l in ens.links() {
                let with = l.sinr(p, rho, true, cfg.sigma_n2, cfg.sigma_c2);
                let without = l.sinr(p, rho, false, cfg.sigma_n2, cfg.sigma_c2);
                assert!(with >= without);
            }
        }
    }
}

#[test]
fn harvesting_grows_with_power_and_energy_share() {
    let ens = NetworkEnsemble::generate(&config(2_000)).unwrap();
    let mut prev = 0.0;
    for p in [0.1, 1.0, 10.0, 100.0] {
        let h = ens.metrics(p, 0.5, false).avg_harvested_energy;
        assert!(h > prev);
        prev = h;
    }
    let mut prev = f64::INFINITY;
    for rho in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let h = ens.metrics(10.0, rho, false).avg_harvested_energy;
        assert!(h < prev || (rho == 1.0 && h == 0.0));
        prev = h;
    }
    // Cancellation acts after the splitter.
    assert_eq!(
        ens.metrics(10.0, 0.3, true).avg_harvested_energy,
        ens.metrics(10.0, 0.3, false).avg_harvested_energy
    );
}

#[test]
fn adapted_rho_keeps_coverage_and_gains_energy() {
    let ens = NetworkEnsemble::generate(&config(5_000)).unwrap();
    for db in [30.0, 40.0, 50.0] {
        let p = 10f64.powf(db / 10.0);
        for rho_b in [0.5, 0.9] {
            let a = ens.adapt_rho(p, rho_b).unwrap();
            let base = ens.metrics(p, rho_b, false);
            assert!(a.rho <= rho_b);
            assert!(a.metrics.coverage_probability >= base.coverage_probability);
            assert!(a.metrics.avg_harvested_energy >= base.avg_harvested_energy);
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = config(3_000);
    let powers: Vec<f64> = (0..10).map(|i| 9.0 * i as f64).collect();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| power_sweep(&cfg, &powers, &[0.5, 0.9]).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.len(), 60);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(
            x.metrics.coverage_probability.to_bits(),
            y.metrics.coverage_probability.to_bits()
        );
        assert_eq!(
            x.metrics.avg_harvested_energy.to_bits(),
            y.metrics.avg_harvested_energy.to_bits()
        );
        assert_eq!(x.rho.to_bits(), y.rho.to_bits());
    }
    assert!(a.iter().any(|r| r.mode == RhoMode::Bound && r.rho == 0.0));
}

#[test]
fn invalid_parameters_are_rejected() {
    for bad in [
        NetworkConfig {
            alpha: 2.0,
            ..config(1)
        },
        NetworkConfig {
            rho: 1.5,
            ..config(1)
        },
        NetworkConfig {
            lambda: -1.0,
            ..config(1)
        },
        NetworkConfig {
            d: 0.0,
            ..config(1)
        },
    ] {
        assert!(NetworkEnsemble::generate(&bad).is_err());
    }
    let ens = NetworkEnsemble::generate(&config(10)).unwrap();
    assert!(ens.adapt_rho(1.0, 0.0).is_err());
}
