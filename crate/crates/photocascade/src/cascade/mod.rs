//! Monte Carlo orchestration of the source -> amplifier -> detector chain.

mod estimators;
mod run;
mod scenario;

pub use estimators::{
    estimate_moments, estimate_spectrum, CorrelationEstimate, CorrelationMode, CountHistogram,
    EstimatorOptions, EstimatorReport, MomentAccumulator, TwoTimeEstimate,
};
pub use run::{
    run_chain, run_pipeline, simulate_record, PipelineOptions, PipelineOutput, TrajectoryEnsemble,
};
pub use scenario::{BandwidthCheck, ExecutionPlan, PhysicsReport, Scenario};
