//! Trajectory generation and the streaming simulation pipeline.
//!
//! Trajectories are independent work items keyed by index: every
//! (trajectory, role) pair draws from its own counter-derived substream, and
//! ensemble statistics are accumulated in fixed-size blocks merged in block
//! order, so results are bit-identical for any thread count.

use rayon::prelude::*;

use crate::devices::{amplify, detect, sample_source, PhotocurrentRecord};
use crate::error::{Error, Result};
use crate::rng::{SeedSplitter, StreamRole};
use crate::signal::{ComplexEnvelope, SpectrumSeries};

use super::estimators::{
    analysis_window, EstimatorOptions, EstimatorReport, MomentAccumulator, ACCUMULATION_BLOCK,
};
use super::scenario::{ExecutionPlan, Scenario};
use crate::periodogram::PeriodogramAccumulator;

/// Trajectories per accumulation block. Fixed so the merge tree depends on
/// neither the thread count nor the execution path.
const BLOCK: usize = ACCUMULATION_BLOCK;

/// Simulated ensemble of photocurrent records.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub records: Vec<PhotocurrentRecord>,
    /// Per-trajectory (source, detected) envelopes when diagnostics are on.
    pub envelopes: Option<Vec<(ComplexEnvelope, ComplexEnvelope)>>,
    pub seed: u64,
    pub plan: ExecutionPlan,
}

fn roles(plan: ExecutionPlan) -> (StreamRole, StreamRole, StreamRole) {
    match plan {
        ExecutionPlan::Chain => {
            (StreamRole::SourceField, StreamRole::AmplifierNoise, StreamRole::Detector)
        }
        ExecutionPlan::CompositeSource => (
            StreamRole::CompositeSourceField,
            StreamRole::CompositeSourceNoise,
            StreamRole::CompositeSourceDetector,
        ),
        ExecutionPlan::CompositeDetector => (
            StreamRole::CompositeDetectorField,
            StreamRole::CompositeDetectorNoise,
            StreamRole::CompositeDetectorDetector,
        ),
    }
}

fn simulate_with_envelopes(
    scenario: &Scenario,
    splitter: &SeedSplitter,
    trajectory: u64,
) -> Result<(PhotocurrentRecord, ComplexEnvelope, ComplexEnvelope)> {
    let (src_role, amp_role, det_role) = roles(scenario.plan);
    let grid = scenario.grid;
    match scenario.plan {
        ExecutionPlan::Chain => {
            let source = sample_source(&scenario.source, grid, &mut splitter.stream(trajectory, src_role))?;
            let detected = match &scenario.amplifier {
                Some(a) => amplify(&source, a, &mut splitter.stream(trajectory, amp_role))?,
                None => source.clone(),
            };
            let record = detect(&detected, &scenario.detector, &mut splitter.stream(trajectory, det_role))?;
            Ok((record, source, detected))
        }
        ExecutionPlan::CompositeSource => {
            // source + amplifier fused: only the radiated field is exposed
            let detected = {
                let e0 = sample_source(&scenario.source, grid, &mut splitter.stream(trajectory, src_role))?;
                match &scenario.amplifier {
                    Some(a) => amplify(&e0, a, &mut splitter.stream(trajectory, amp_role))?,
                    None => e0,
                }
            };
            let record = detect(&detected, &scenario.detector, &mut splitter.stream(trajectory, det_role))?;
            Ok((record, detected.clone(), detected))
        }
        ExecutionPlan::CompositeDetector => {
            // amplifier + detector fused: the record is drawn straight from
            // the source field
            let source = sample_source(&scenario.source, grid, &mut splitter.stream(trajectory, src_role))?;
            let record = {
                let e1 = match &scenario.amplifier {
                    Some(a) => amplify(&source, a, &mut splitter.stream(trajectory, amp_role))?,
                    None => source.clone(),
                };
                detect(&e1, &scenario.detector, &mut splitter.stream(trajectory, det_role))?
            };
            Ok((record, source.clone(), source))
        }
    }
}

/// One photocurrent trajectory of a scenario.
pub fn simulate_record(
    scenario: &Scenario,
    splitter: &SeedSplitter,
    trajectory: u64,
) -> Result<PhotocurrentRecord> {
    simulate_with_envelopes(scenario, splitter, trajectory).map(|(r, _, _)| r)
}

fn gate(scenario: &Scenario) -> Result<()> {
    scenario.validate()?;
    if !scenario.source.is_sampleable() {
        return Err(Error::NotSampleable);
    }
    let report = scenario.physics_report();
    if !report.is_physical() && !scenario.allow_unphysical {
        return Err(Error::PhysicsRejected(report.violations().join("; ")));
    }
    Ok(())
}

/// Runs every trajectory of the scenario, materializing the records.
pub fn run_chain(scenario: &Scenario) -> Result<TrajectoryEnsemble> {
    gate(scenario)?;
    let splitter = SeedSplitter::new(scenario.seed);
    let retain = scenario.retain_envelopes;
    let indices: Vec<u64> = (0..scenario.trajectories as u64).collect();
    let per_block: Vec<Result<Vec<_>>> = indices
        .par_chunks(BLOCK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&i| simulate_with_envelopes(scenario, &splitter, i))
                .collect()
        })
        .collect();
    let mut records = Vec::with_capacity(scenario.trajectories);
    let mut envelopes = retain.then(Vec::new);
    for block in per_block {
        for (record, source, detected) in block? {
            records.push(record);
            if let Some(envs) = envelopes.as_mut() {
                envs.push((source, detected));
            }
        }
    }
    Ok(TrajectoryEnsemble { records, envelopes, seed: scenario.seed, plan: scenario.plan })
}

/// Options of the streaming pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    /// Periodogram segment length; `None` skips the spectrum.
    pub segment_bins: Option<usize>,
    pub correlation: super::estimators::CorrelationMode,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// Moments plus optional spectrum, streamed without materializing records.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: EstimatorReport,
    pub spectrum: Option<SpectrumSeries>,
}

struct BlockAccum {
    moments: MomentAccumulator,
    spectrum: Option<PeriodogramAccumulator>,
}

/// Streams all trajectories through moment/spectrum accumulators.
pub fn run_pipeline(scenario: &Scenario, opts: &PipelineOptions) -> Result<PipelineOutput> {
    gate(scenario)?;
    let start_bin = scenario.analysis_start_bin();
    if let Some(seg) = opts.segment_bins {
        let window = scenario.grid.len() - start_bin;
        if window < 4 * seg {
            return Err(Error::RecordTooShort(format!(
                "analysis window of {window} bins holds fewer than 4 segments of {seg}"
            )));
        }
    }
    let est_opts = EstimatorOptions { analysis_start_bin: start_bin, correlation: opts.correlation };
    let splitter = SeedSplitter::new(scenario.seed);

    let work = |(): ()| -> Result<PipelineOutput> {
        let indices: Vec<u64> = (0..scenario.trajectories as u64).collect();
        let blocks: Vec<Result<BlockAccum>> = indices
            .par_chunks(BLOCK)
            .map(|chunk| -> Result<BlockAccum> {
                let mut moments = MomentAccumulator::new(scenario.grid, est_opts)?;
                let mut spectrum = opts
                    .segment_bins
                    .map(|seg| PeriodogramAccumulator::new(seg, scenario.grid.dt()))
                    .transpose()?;
                for &i in chunk {
                    let record = simulate_record(scenario, &splitter, i)?;
                    moments.add_record(&record)?;
                    if let Some(acc) = spectrum.as_mut() {
                        acc.add_record(&analysis_window(&record, start_bin))?;
                    }
                }
                Ok(BlockAccum { moments, spectrum })
            })
            .collect();

        let mut moments: Option<MomentAccumulator> = None;
        let mut spectrum: Option<PeriodogramAccumulator> = None;
        for block in blocks {
            let block = block?;
            match moments.as_mut() {
                None => moments = Some(block.moments),
                Some(m) => m.merge(&block.moments),
            }
            match (spectrum.as_mut(), block.spectrum) {
                (None, Some(s)) => spectrum = Some(s),
                (Some(acc), Some(s)) => acc.merge(&s),
                _ => {}
            }
        }
        let moments = moments.ok_or_else(|| Error::EmptyEnsemble("no trajectories".into()))?;
        Ok(PipelineOutput {
            report: moments.finish()?,
            spectrum: spectrum.map(|s| s.finish()).transpose()?,
        })
    };

    match opts.threads {
        None => work(()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| work(()))
        }
    }
}
