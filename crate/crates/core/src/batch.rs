//! Decompose many independent instances at once.

use serde::Serialize;

use crate::decompose::{decompose, verify, WeightedDecomposition};
use crate::error::Result;
use crate::ground::IntVector;
use crate::par;
use crate::submodular::SubmodularFn;

#[derive(Clone, Debug)]
pub struct Job {
    pub f: SubmodularFn,
    pub w: IntVector,
    pub k: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct JobOutcome {
    pub decomposition: WeightedDecomposition,
    pub dim: usize,
    pub verified: bool,
    pub lp_vertices: usize,
    pub failures: Vec<String>,
}

fn run(job: &Job) -> Result<JobOutcome> {
    let (decomposition, trace) = decompose(&job.f, &job.w, job.k)?;
    let report = verify(&job.f, &decomposition);
    Ok(JobOutcome {
        decomposition,
        dim: report.dim,
        verified: report.ok,
        lp_vertices: trace.lp_vertices,
        failures: report.failures,
    })
}

/// Decomposes and verifies every job; parallel when the `parallel` feature is on.
pub fn decompose_batch(jobs: &[Job]) -> Vec<Result<JobOutcome>> {
    par::map(jobs, run)
}

pub fn decompose_batch_sequential(jobs: &[Job]) -> Vec<Result<JobOutcome>> {
    par::map_sequential(jobs, run)
}
