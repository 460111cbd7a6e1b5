//! Preferential-attachment simulation and bootstrap percolation.

mod analytic;
mod ba;
mod percolation;
mod schedule;

pub use analytic::{analytic_predictions, predicted_degree, AnalyticPrediction};
pub use ba::{
    generate_ba, simulated_growth, total_kqi_growth_check, AttachmentKernel, BaConfig, GrowthCheck,
};
pub use percolation::{bootstrap_percolation, ActivationConfig, PercolationOutcome};
pub use schedule::ArrivalSchedule;
