use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Exp};
use wipt_core::oracle::discretized_worst_case_mean;
use wipt_core::robust::{
    forward_exponential_kl, worst_case_cdf, worst_case_distribution, Divergence,
    NominalDistribution,
};
use wipt_core::Error;

fn nominal() -> NominalDistribution {
    NominalDistribution::unit_exponential()
}

fn grid(n: usize, x_max: f64) -> Vec<f64> {
    (0..n).map(|i| x_max * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn parametric_matches_discretized_program() {
    for dir in [Divergence::Forward, Divergence::Reverse] {
        for d in [0.01, 0.1, 0.5] {
            let m = worst_case_distribution(nominal(), d, dir)
                .unwrap()
                .worst_case_mean;
            let o = discretized_worst_case_mean(d, dir, 20_000);
            assert!((m / o - 1.0).abs() < 1e-2, "{dir:?} d = {d}: {m} vs {o}");
        }
    }
}

#[test]
fn forward_solution_is_a_tilted_exponential() {
    for d in [0.05, 0.2, 0.5] {
        let dist = worst_case_distribution(nominal(), d, Divergence::Forward).unwrap();
        let t = dist
            .tilted_rate()
            .expect("forward worst case is exponential");
        assert!((forward_exponential_kl(t) - d).abs() < 1e-9);
        assert!((dist.worst_case_mean - 1.0 / t).abs() < 1e-12);
        let reference = Exp::new(t).unwrap();
        let xs = grid(200, 8.0);
        let cdf = worst_case_cdf(&dist, &xs).unwrap();
        for (x, f) in xs.iter().zip(cdf) {
            assert!((f - reference.cdf(*x)).abs() < 1e-12);
        }
    }
}

#[test]
fn cdfs_dominate_as_radius_grows() {
    let xs = grid(500, 5.0);
    for dir in [Divergence::Forward, Divergence::Reverse] {
        let mut prev_cdf: Option<Vec<f64>> = None;
        let mut prev_mean = f64::INFINITY;
        for d in [0.0, 0.05, 0.2, 0.5] {
            let dist = worst_case_distribution(nominal(), d, dir).unwrap();
            let cdf = worst_case_cdf(&dist, &xs).unwrap();
            if let Some(p) = &prev_cdf {
                for (a, b) in p.iter().zip(&cdf) {
                    assert!(b >= a, "{dir:?} d = {d}");
                }
            }
            assert!(dist.worst_case_mean < prev_mean);
            prev_mean = dist.worst_case_mean;
            prev_cdf = Some(cdf);
        }
    }
}

#[test]
fn reverse_solution_meets_the_divergence_budget() {
    for d in [0.05, 0.2, 0.5] {
        let dist = worst_case_distribution(nominal(), d, Divergence::Reverse).unwrap();
        // KL(nominal || worst) by midpoint rule on a fine grid.
        let (n, x_max) = (400_000, 23.0);
        let h = x_max / n as f64;
        let (mut kl, mut mass, mut mean) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let p0 = (-x).exp();
            let q = dist.pdf(x);
            kl += p0 * (p0 / q).ln() * h;
            mass += q * h;
            mean += x * q * h;
        }
        assert!((kl - d).abs() < 1e-4, "d = {d}: KL {kl}");
        assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
        assert!((mean - dist.worst_case_mean).abs() < 1e-3);
    }
}

#[test]
fn reverse_is_less_pessimistic_than_forward() {
    for d in [0.05, 0.1, 0.2, 0.5] {
        let f = worst_case_distribution(nominal(), d, Divergence::Forward).unwrap();
        let r = worst_case_distribution(nominal(), d, Divergence::Reverse).unwrap();
        assert!(f.worst_case_mean < r.worst_case_mean && r.worst_case_mean < 1.0);
    }
}

#[test]
fn zero_radius_returns_nominal() {
    for dir in [Divergence::Forward, Divergence::Reverse] {
        let dist = worst_case_distribution(nominal(), 0.0, dir).unwrap();
        assert_eq!(dist.worst_case_mean, 1.0);
        let xs = grid(50, 5.0);
        let cdf = worst_case_cdf(&dist, &xs).unwrap();
        for (x, f) in xs.iter().zip(cdf) {
            assert!((f - (1.0 - (-x).exp())).abs() < 1e-15);
        }
    }
}

#[test]
fn scaled_nominal_scales_the_mean() {
    let n = NominalDistribution::Exponential { rate: 4.0 };
    for dir in [Divergence::Forward, Divergence::Reverse] {
        let a = worst_case_distribution(n, 0.2, dir)
            .unwrap()
            .worst_case_mean;
        let b = worst_case_distribution(nominal(), 0.2, dir)
            .unwrap()
            .worst_case_mean;
        assert!((a - b / 4.0).abs() < 1e-6);
    }
}

#[test]
fn bad_radius_is_a_domain_error() {
    for d in [-0.1, f64::NAN, f64::INFINITY] {
        assert!(matches!(
            worst_case_distribution(nominal(), d, Divergence::Forward),
            Err(Error::Domain { .. })
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mean_decreases_with_radius(d1 in 0.001f64..1.0, d2 in 0.001f64..1.0, fwd in any::<bool>()) {
        let dir = if fwd { Divergence::Forward } else { Divergence::Reverse };
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = worst_case_distribution(nominal(), lo, dir).unwrap().worst_case_mean;
        let b = worst_case_distribution(nominal(), hi, dir).unwrap().worst_case_mean;
        prop_assert!(b <= a + 1e-9);
        prop_assert!(a < 1.0 && b > 0.0);
    }

    #[test]
    fn cdf_is_a_distribution_function(d in 0.0f64..1.5, fwd in any::<bool>()) {
        let dir = if fwd { Divergence::Forward } else { Divergence::Reverse };
        let dist = worst_case_distribution(nominal(), d, dir).unwrap();
        let cdf = worst_case_cdf(&dist, &grid(100, 30.0)).unwrap();
        prop_assert!(cdf[0].abs() < 1e-12);
        prop_assert!(cdf.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!(*cdf.last().unwrap() <= 1.0 + 1e-9);
        prop_assert!(*cdf.last().unwrap() > 1.0 - 1e-6);
    }
}
