//! Time sweep: state, reduced matrices and measures at each grid point.

use rayon::prelude::*;

use crate::density::{partial_trace_atom2, partial_trace_field, product_amplitudes};
use crate::dynamics::{AnalyticEvolution, StateVector, TruncationPlan};
use crate::error::Result;
use crate::measures::{concurrence_from_amplitudes, entropy_cardano, tangle, Measure, MeasureSample};
use crate::model::ModelParams;

/// Uniform grid of `steps` physical times covering `g t` in `[0, gt_max]`.
pub fn time_grid(g: f64, gt_max: f64, steps: usize) -> Vec<f64> {
    let denom = (steps.max(2) - 1) as f64;
    (0..steps).map(|i| gt_max * i as f64 / denom / g).collect()
}

/// Measures of a closed-form state. The two-atom matrix is renormalized to
/// unit trace first; the missing mass is reported as `trace_tail`. Concurrence
/// is taken from the amplitudes directly, which avoids the square-root
/// amplification of roundoff in `sqrt(rho)` near rank deficiency.
pub fn sample_state(t: f64, state: &StateVector, measures: &[Measure]) -> Result<MeasureSample> {
    let raw = partial_trace_field(state);
    let trace_tail = 1.0 - raw.trace().re;
    let rho = raw.renormalized();
    let mut sample = MeasureSample {
        t,
        entropy: None,
        tangle: None,
        concurrence: None,
        trace_tail,
    };
    for measure in measures {
        match measure {
            Measure::Entropy => sample.entropy = Some(entropy_cardano(&rho)?),
            Measure::Tangle => sample.tangle = Some(tangle(&partial_trace_atom2(&rho)?)?),
            Measure::Concurrence => {
                let columns: Vec<_> = (0..=state.n_max).map(|m| product_amplitudes(state, m)).collect();
                sample.concurrence = Some(concurrence_from_amplitudes(&columns)?);
            }
        }
    }
    Ok(sample)
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub samples: Vec<MeasureSample>,
    /// Manifolds dropped from the state, one message each.
    pub reports: Vec<String>,
}

/// Failure at a single grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePointError {
    pub index: usize,
    pub t: f64,
    pub error: crate::Error,
}

impl std::fmt::Display for TimePointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "time point {} (t = {}): {}", self.index, self.t, self.error)
    }
}

/// Evaluates every grid time in parallel; results are returned in grid order
/// and do not depend on the number of worker threads.
pub fn sweep_evolution(
    evolution: &AnalyticEvolution,
    times: &[f64],
    measures: &[Measure],
) -> std::result::Result<Vec<MeasureSample>, TimePointError> {
    let results: Vec<_> = times
        .par_iter()
        .enumerate()
        .map(|(index, &t)| {
            sample_state(t, &evolution.state_at(t), measures).map_err(|error| TimePointError { index, t, error })
        })
        .collect();
    results.into_iter().collect()
}

/// Builds the evolution and sweeps it.
pub fn run(
    params: &ModelParams,
    plan: &TruncationPlan,
    times: &[f64],
    measures: &[Measure],
) -> std::result::Result<SweepOutcome, TimePointError> {
    let evolution = AnalyticEvolution::new(params, plan).map_err(|error| TimePointError {
        index: 0,
        t: times.first().copied().unwrap_or(0.0),
        error,
    })?;
    let samples = sweep_evolution(&evolution, times, measures)?;
    Ok(SweepOutcome {
        samples,
        reports: evolution.skipped.iter().map(ToString::to_string).collect(),
    })
}

/// Mean of one measure over the samples that carry it.
pub fn time_average(samples: &[MeasureSample], measure: Measure) -> Option<f64> {
    let values: Vec<f64> = samples
        .iter()
        .filter_map(|s| match measure {
            Measure::Entropy => s.entropy,
            Measure::Tangle => s.tangle,
            Measure::Concurrence => s.concurrence,
        })
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
