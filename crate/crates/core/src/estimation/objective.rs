//! Trajectory-matching objective: total absolute position difference
//! between the recorded saccade and a simulation of the candidate
//! parameters on the same sample grid.

use crate::error::Result;
use crate::model::{self, simulate, ModelSpec, PlantLayout};
use crate::trajectory::SaccadeTrajectory;

/// Objective for one saccade, with the recording-derived constants
/// (relative positions, displacement, duration) hoisted out of the search
/// loop.
#[derive(Debug)]
pub struct SaccadeObjective<'a> {
    spec: &'a ModelSpec,
    rec_rel: Vec<f64>,
    target_deg: f64,
    duration_ms: f64,
    dt_ms: f64,
    penalty_base: f64,
}

impl<'a> SaccadeObjective<'a> {
    /// Fails if the model has no plant mapping; saccade validity is
    /// guaranteed by its type.
    pub fn new(
        spec: &'a ModelSpec,
        saccade: &SaccadeTrajectory,
        penalty_base: f64,
    ) -> Result<Self> {
        PlantLayout::resolve(spec)?;
        let first = saccade.positions_deg[0];
        Ok(Self {
            spec,
            rec_rel: saccade.positions_deg.iter().map(|p| p - first).collect(),
            target_deg: saccade.displacement_deg(),
            duration_ms: saccade.duration_ms(),
            dt_ms: saccade.dt_ms,
            penalty_base,
        })
    }

    /// Sum over samples of |simulated - recorded| in degrees. Candidates
    /// below a parameter floor are priced out without simulating; a
    /// diverging simulation costs the bare penalty.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        let violation = model::violation_sum(self.spec, values);
        if violation > 0.0 {
            return self.penalty_base * (1.0 + violation);
        }
        match simulate(
            self.spec,
            values,
            self.target_deg,
            self.duration_ms,
            self.dt_ms,
            0.0,
        ) {
            Ok(sim) => {
                debug_assert_eq!(sim.position_deg.len(), self.rec_rel.len());
                sim.position_deg
                    .iter()
                    .zip(&self.rec_rel)
                    .map(|(s, r)| (s - r).abs())
                    .sum()
            }
            Err(_) => self.penalty_base,
        }
    }

    /// Mean per-sample residual of the recording against `values`, deg.
    pub fn mean_residual(&self, values: &[f64]) -> f64 {
        self.evaluate(values) / self.rec_rel.len() as f64
    }

    pub fn sample_count(&self) -> usize {
        self.rec_rel.len()
    }
}

/// One-off objective evaluation with the default penalty.
pub fn objective(values: &[f64], saccade: &SaccadeTrajectory, spec: &ModelSpec) -> f64 {
    match SaccadeObjective::new(spec, saccade, super::DEFAULT_PENALTY_BASE) {
        Ok(obj) => obj.evaluate(values),
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_opc, lookup_model, MODEL_18};
    use crate::synthetic::settled_saccade;

    fn synthetic_saccade() -> SaccadeTrajectory {
        let spec = lookup_model(MODEL_18).unwrap();
        let opc = default_opc(MODEL_18).unwrap();
        settled_saccade(&spec, opc.values(), 10.0, 46.0, 1.0, 1).unwrap()
    }

    #[test]
    fn reproducing_parameters_score_zero() {
        let spec = lookup_model(MODEL_18).unwrap();
        let saccade = synthetic_saccade();
        let defaults = default_opc(MODEL_18).unwrap();
        let v = objective(defaults.values(), &saccade, &spec);
        assert!(v < 1e-9, "objective at the generator was {v}");
    }

    #[test]
    fn interior_offsets_sum_per_sample() {
        let spec = lookup_model(MODEL_18).unwrap();
        let saccade = synthetic_saccade();
        // Offset every interior sample by 1 degree. First and last stay
        // put, so the re-simulated trajectory is unchanged and the
        // objective counts exactly one degree per offset sample.
        let n = saccade.len();
        let offset: Vec<f64> = saccade
            .positions_deg
            .iter()
            .enumerate()
            .map(|(k, p)| if k == 0 || k == n - 1 { *p } else { p + 1.0 })
            .collect();
        let offset_saccade = SaccadeTrajectory::new(1, 1.0, 0.0, offset).unwrap();
        let v = objective(default_opc(MODEL_18).unwrap().values(), &offset_saccade, &spec);
        let expected = (n - 2) as f64;
        assert!((v - expected).abs() < 1e-7, "expected ~{expected}, got {v}");
    }

    #[test]
    fn below_floor_candidates_pay_without_simulating() {
        let spec = lookup_model(MODEL_18).unwrap();
        let saccade = synthetic_saccade();
        let mut values = default_opc(MODEL_18).unwrap().values().to_vec();
        values[0] = -1.0;
        let v = objective(&values, &saccade, &spec);
        assert!(v >= 1e10);
        assert_eq!(v, 1e10 * 2.0);
    }

    #[test]
    fn divergence_costs_the_bare_penalty() {
        let spec = lookup_model(MODEL_18).unwrap();
        let saccade = synthetic_saccade();
        let mut values = default_opc(MODEL_18).unwrap().values().to_vec();
        values[9] = 1e-12;
        let v = objective(&values, &saccade, &spec);
        assert_eq!(v, 1e10);
    }
}
