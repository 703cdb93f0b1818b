//! Monte-Carlo harness: truth generation, simulated sensors, estimator runs,
//! accuracy metrics and CSV output.

pub mod config;
pub mod metrics;
pub mod montecarlo;
pub mod output;
pub mod sensors;
pub mod truth;

pub use config::{vector_scenario, FilterKind, NoiseCase, Scenario};
pub use metrics::{compute_metrics, RunMetrics};
pub use montecarlo::{run_monte_carlo, simulate_run, MonteCarloReport, Prepared};
pub use sensors::{gaussian_dir_kappa, simulate_direct_attitude, simulate_gyro, simulate_vectors, stream_rng, Stream};
pub use truth::{generate_truth, Truth};
