//! Deterministic fixtures for the pipeline benchmarks. Everything here is
//! seed-free, so repeated benchmark runs measure the same workload.

use opcfit_core::{
    lookup_model, settled_saccade, synthetic_batch, ModelSpec, RecordingSample, SaccadeTrajectory,
    MODEL_18,
};
use std::sync::Arc;

pub fn spec() -> Arc<ModelSpec> {
    lookup_model(MODEL_18).expect("built-in model")
}

/// One settled 10 degree, 46 ms saccade from the model defaults.
pub fn one_saccade() -> SaccadeTrajectory {
    let spec = spec();
    let values = spec.default_opc().values().to_vec();
    settled_saccade(&spec, &values, 10.0, 46.0, 1.0, 1).expect("fixture saccade")
}

/// A batch of `n` perturbed synthetic saccades.
pub fn batch(n: usize) -> Vec<SaccadeTrajectory> {
    synthetic_batch(&spec(), n, 10.0, 46.0, 1.0).expect("fixture batch")
}

/// A 1000 Hz recording alternating fixation stretches with `n` ramp
/// saccades of 8 degrees, for exercising detection end to end.
pub fn recording(n: usize) -> Vec<RecordingSample> {
    let mut samples = Vec::with_capacity(n * 190 + 150);
    let mut pos = 0.0_f64;
    let emit = |p: f64, samples: &mut Vec<RecordingSample>| {
        let t = samples.len() as f64;
        samples.push(RecordingSample { t_ms: t, position_deg: p, valid: true });
    };
    for i in 0..n {
        for _ in 0..150 {
            emit(pos, &mut samples);
        }
        let step = if i % 2 == 0 { 0.2 } else { -0.2 };
        for _ in 0..40 {
            pos += step;
            emit(pos, &mut samples);
        }
    }
    for _ in 0..150 {
        emit(pos, &mut samples);
    }
    samples
}
