//! Benchmark fixtures shared by the criterion targets.

use wipt_core::netgeom::NetworkConfig;

/// Network configuration used by the Monte Carlo benchmarks.
pub fn bench_network(n_realizations: usize) -> NetworkConfig {
    NetworkConfig {
        n_realizations,
        ..NetworkConfig::default()
    }
}
