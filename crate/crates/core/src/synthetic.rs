//! Deterministic synthetic saccades for fixtures and benchmarks. No
//! randomness anywhere: workloads are reproducible byte for byte.

use crate::error::{Error, Result};
use crate::model::{resolve_pulse_width, simulate, ModelSpec, PW_FROM_DURATION};
use crate::trajectory::SaccadeTrajectory;

/// Perturbation factors cycled across the workload: +/-5%, +/-10%, +/-20%.
pub const PERTURBATION_FACTORS: [f64; 6] = [1.05, 0.95, 1.10, 0.90, 1.20, 0.80];

/// Simulate a saccade whose recorded displacement equals the simulation
/// target, so the generating parameters reproduce the output exactly when
/// re-simulated from the recording alone.
///
/// A single simulation pass cannot do this: the pulse, not the requested
/// target, determines how far the eye gets, and the fixation levels active
/// after the pulse are solved for the target angle. Iterating
/// target := displacement converges in a few rounds because the final
/// displacement depends only weakly on the fixation step. `target_deg`
/// merely seeds the iteration (its sign is kept).
pub fn settled_saccade(
    spec: &ModelSpec,
    values: &[f64],
    target_deg: f64,
    duration_ms: f64,
    dt_ms: f64,
    saccade_id: usize,
) -> Result<SaccadeTrajectory> {
    let mut target = target_deg;
    for _ in 0..64 {
        let traj = simulate(spec, values, target, duration_ms, dt_ms, 0.0)?;
        let displacement = traj.position_deg.last().unwrap() - traj.position_deg[0];
        if (displacement - target).abs() < 1e-12 {
            return SaccadeTrajectory::new(saccade_id, dt_ms, 0.0, traj.position_deg);
        }
        target = displacement;
    }
    Err(Error::InvalidInput(format!(
        "saccade amplitude did not settle for target {target_deg}"
    )))
}

/// Build `n` synthetic saccades from a model's defaults, perturbing one
/// estimated parameter per saccade: saccade `i` scales parameter
/// `i % n_est` by `PERTURBATION_FACTORS[(i / n_est) % 6]`. A pulse-width
/// default left on derive-from-duration is resolved first so the
/// perturbation has something to scale.
pub fn synthetic_batch(
    spec: &ModelSpec,
    n: usize,
    target_deg: f64,
    duration_ms: f64,
    dt_ms: f64,
) -> Result<Vec<SaccadeTrajectory>> {
    let mut base = spec.default_opc().values().to_vec();
    if let Some(i) = spec.index_of("PW") {
        if base[i] == PW_FROM_DURATION {
            base[i] = resolve_pulse_width(PW_FROM_DURATION, duration_ms, dt_ms);
        }
    }
    let estimated: Vec<usize> = (0..spec.len()).filter(|&i| spec.is_estimated(i)).collect();
    if estimated.is_empty() {
        return Err(Error::InvalidInput(format!(
            "model `{}` has no estimated parameters to perturb",
            spec.model_id()
        )));
    }

    (0..n)
        .map(|i| {
            let mut values = base.clone();
            let which = estimated[i % estimated.len()];
            let factor = PERTURBATION_FACTORS[(i / estimated.len()) % PERTURBATION_FACTORS.len()];
            values[which] *= factor;
            settled_saccade(spec, &values, target_deg, duration_ms, dt_ms, i + 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::objective;
    use crate::model::{default_opc, lookup_model, MODEL_18, MODEL_9};

    #[test]
    fn settled_saccade_is_an_exact_fixed_point() {
        let spec = lookup_model(MODEL_18).unwrap();
        let opc = default_opc(MODEL_18).unwrap();
        let s = settled_saccade(&spec, opc.values(), 10.0, 46.0, 1.0, 1).unwrap();
        // Re-simulating from the recording's own displacement reproduces
        // the recording, so the generator scores (almost) zero.
        let v = objective(opc.values(), &s, &spec);
        assert!(v < 1e-9, "objective at generator was {v}");
        assert!((s.displacement_deg() - 7.72).abs() < 0.2, "{}", s.displacement_deg());
    }

    #[test]
    fn negative_seed_settles_to_a_leftward_saccade() {
        let spec = lookup_model(MODEL_18).unwrap();
        let opc = default_opc(MODEL_18).unwrap();
        let s = settled_saccade(&spec, opc.values(), -10.0, 46.0, 1.0, 1).unwrap();
        assert!(s.displacement_deg() < -4.0);
    }

    #[test]
    fn batch_cycles_parameters_and_factors_deterministically() {
        let spec = lookup_model(MODEL_9).unwrap();
        let a = synthetic_batch(&spec, 20, 10.0, 46.0, 1.0).unwrap();
        let b = synthetic_batch(&spec, 20, 10.0, 46.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        assert_eq!(a[0].saccade_id, 1);
        assert_eq!(a[19].saccade_id, 20);
        // Saccade 0 perturbs the first parameter, saccade 9 wraps to the
        // first parameter with the next factor; different plants, different
        // trajectories.
        assert_ne!(a[0].positions_deg, a[9].positions_deg);
        // All saccades clear the default quality filters.
        for s in &a {
            assert!(s.amplitude_deg() >= 4.0, "amplitude {}", s.amplitude_deg());
            assert!(s.duration_ms() >= 6.0);
        }
    }
}
