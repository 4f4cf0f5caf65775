//! Fixed-step saccade simulation.
//!
//! The plant is integrated with classical fourth-order Runge-Kutta at the
//! recording's sample interval, holding the control signal constant across
//! each step. The integration always runs the positive-direction saccade
//! in onset-relative coordinates; direction and fixation eccentricity are
//! applied to the output frame (mirror for negative amplitudes, offset by
//! the initial angle), which keeps simulated and recorded trajectories
//! comparable sample by sample.

use super::plant::{equilibrium_state, fixation_levels, plant_derivatives, PlantLayout, PlantState};
use super::signal::build_control_signal;
use super::ModelSpec;
use crate::error::{Error, Result};

/// Simulated eye trajectory sampled at a fixed interval, positions in
/// degrees and velocities in degrees per second. Sample `k` is at time
/// `k * dt_ms` after saccade onset.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedTrajectory {
    pub dt_ms: f64,
    pub position_deg: Vec<f64>,
    pub velocity_deg_s: Vec<f64>,
}

impl SimulatedTrajectory {
    pub fn len(&self) -> usize {
        self.position_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_deg.is_empty()
    }

    /// Time of sample `k` in milliseconds after onset.
    pub fn t_ms(&self, k: usize) -> f64 {
        k as f64 * self.dt_ms
    }

    pub fn peak_velocity_deg_s(&self) -> f64 {
        self.velocity_deg_s
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v.abs()))
    }
}

fn scaled_sum(s: &PlantState, d: &super::plant::PlantDeriv, h: f64) -> PlantState {
    PlantState {
        theta: s.theta + h * d.d_theta,
        omega: s.omega + h * d.d_omega,
        x_ag: s.x_ag + h * d.d_x_ag,
        x_ant: s.x_ant + h * d.d_x_ant,
        f_ag: s.f_ag + h * d.d_f_ag,
        f_ant: s.f_ant + h * d.d_f_ant,
    }
}

/// One classical Runge-Kutta step of size `dt` with the innervation
/// targets held constant across the step.
fn rk4_step(
    p: &super::plant::PlantParams,
    s: &PlantState,
    n_ag: f64,
    n_ant: f64,
    in_pulse: bool,
    dt: f64,
) -> PlantState {
    let k1 = plant_derivatives(p, s, n_ag, n_ant, in_pulse);
    let k2 = plant_derivatives(p, &scaled_sum(s, &k1, dt / 2.0), n_ag, n_ant, in_pulse);
    let k3 = plant_derivatives(p, &scaled_sum(s, &k2, dt / 2.0), n_ag, n_ant, in_pulse);
    let k4 = plant_derivatives(p, &scaled_sum(s, &k3, dt), n_ag, n_ant, in_pulse);
    PlantState {
        theta: s.theta + dt / 6.0 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta),
        omega: s.omega + dt / 6.0 * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega),
        x_ag: s.x_ag + dt / 6.0 * (k1.d_x_ag + 2.0 * k2.d_x_ag + 2.0 * k3.d_x_ag + k4.d_x_ag),
        x_ant: s.x_ant + dt / 6.0 * (k1.d_x_ant + 2.0 * k2.d_x_ant + 2.0 * k3.d_x_ant + k4.d_x_ant),
        f_ag: s.f_ag + dt / 6.0 * (k1.d_f_ag + 2.0 * k2.d_f_ag + 2.0 * k3.d_f_ag + k4.d_f_ag),
        f_ant: s.f_ant + dt / 6.0 * (k1.d_f_ant + 2.0 * k2.d_f_ant + 2.0 * k3.d_f_ant + k4.d_f_ant),
    }
}

/// Simulate a saccade of `target_deg` amplitude (signed) over
/// `duration_ms`, sampled every `dt_ms`, starting from steady fixation at
/// `initial_theta_deg`. Returns `n_steps + 1` samples where `n_steps`
/// covers the duration; the first sample is the resting state.
pub fn simulate(
    spec: &ModelSpec,
    values: &[f64],
    target_deg: f64,
    duration_ms: f64,
    dt_ms: f64,
    initial_theta_deg: f64,
) -> Result<SimulatedTrajectory> {
    if !(dt_ms > 0.0) || !dt_ms.is_finite() {
        return Err(Error::InvalidInput(format!("sample interval must be positive, got {dt_ms}")));
    }
    if !(duration_ms > 0.0) || !duration_ms.is_finite() {
        return Err(Error::InvalidInput(format!("duration must be positive, got {duration_ms}")));
    }
    if !target_deg.is_finite() || !initial_theta_deg.is_finite() {
        return Err(Error::InvalidInput("amplitude and initial angle must be finite".into()));
    }

    let layout = PlantLayout::resolve(spec)?;
    let p = layout.params(spec, values)?;

    let mirror = if target_deg < 0.0 { -1.0 } else { 1.0 };
    let amplitude = target_deg.abs();

    let n_steps = ((duration_ms / dt_ms) - 1e-9).ceil().max(1.0) as usize;
    let signal = build_control_signal(&p, amplitude, duration_ms, dt_ms, n_steps)?;

    let (n0_ag, n0_ant) = fixation_levels(&p, 0.0);
    let mut state = equilibrium_state(&p, 0.0, n0_ag, n0_ant);

    let mut position_deg = Vec::with_capacity(n_steps + 1);
    let mut velocity_deg_s = Vec::with_capacity(n_steps + 1);
    position_deg.push(initial_theta_deg + mirror * state.theta);
    velocity_deg_s.push(mirror * state.omega * 1000.0);

    for k in 0..n_steps {
        let (n_ag, n_ant, in_pulse) = signal.step(k);
        state = rk4_step(&p, &state, n_ag, n_ant, in_pulse, dt_ms);
        if !state.is_finite() {
            return Err(Error::Divergence {
                step: k + 1,
                t_ms: (k + 1) as f64 * dt_ms,
            });
        }
        position_deg.push(initial_theta_deg + mirror * state.theta);
        velocity_deg_s.push(mirror * state.omega * 1000.0);
    }

    Ok(SimulatedTrajectory {
        dt_ms,
        position_deg,
        velocity_deg_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_opc, lookup_model, MODEL_18, MODEL_9};

    fn spec18() -> std::sync::Arc<ModelSpec> {
        lookup_model(MODEL_18).unwrap()
    }

    fn defaults18() -> Vec<f64> {
        default_opc(MODEL_18).unwrap().values().to_vec()
    }

    #[test]
    fn sample_count_covers_the_duration() {
        let spec = spec18();
        let v = defaults18();
        let traj = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        assert_eq!(traj.len(), 47);
        assert_eq!(traj.t_ms(46), 46.0);
        let traj = simulate(&spec, &v, 10.0, 45.5, 1.0, 0.0).unwrap();
        assert_eq!(traj.len(), 47);
    }

    #[test]
    fn default_ten_degree_saccade_endpoint() {
        let spec = spec18();
        let traj = simulate(&spec, &defaults18(), 10.0, 46.0, 1.0, 0.0).unwrap();
        let end = *traj.position_deg.last().unwrap();
        assert!(
            (end - 7.718837).abs() < 1e-4,
            "endpoint {end} drifted from the pinned value"
        );
        assert!(traj.peak_velocity_deg_s() > 100.0);
    }

    #[test]
    fn first_sample_is_the_resting_state() {
        let spec = spec18();
        let traj = simulate(&spec, &defaults18(), 10.0, 46.0, 1.0, 3.25).unwrap();
        assert_eq!(traj.position_deg[0], 3.25);
        assert_eq!(traj.velocity_deg_s[0], 0.0);
    }

    #[test]
    fn initial_angle_offsets_every_sample() {
        let spec = spec18();
        let v = defaults18();
        let base = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        let shifted = simulate(&spec, &v, 10.0, 46.0, 1.0, -5.5).unwrap();
        for (b, s) in base.position_deg.iter().zip(&shifted.position_deg) {
            assert_eq!(b - 5.5, *s);
        }
        assert_eq!(base.velocity_deg_s, shifted.velocity_deg_s);
    }

    #[test]
    fn onward_pulse_never_moves_backward() {
        // Pulse above the fixation intercept and antagonist below it
        // drive the eye strictly onward from rest.
        let spec = spec18();
        let traj = simulate(&spec, &defaults18(), 10.0, 46.0, 1.0, 0.0).unwrap();
        for w in traj.position_deg.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "position fell from {} to {}", w[0], w[1]);
        }
        assert!(traj.position_deg.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn wider_pulse_never_yields_a_smaller_amplitude() {
        let spec = spec18();
        let mut v = defaults18();
        let mut last = 0.0;
        for pw in [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 44.0] {
            v[17] = pw;
            let traj = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
            let end = *traj.position_deg.last().unwrap();
            assert!(
                end >= last - 1e-12,
                "amplitude shrank from {last} to {end} at pulse width {pw}"
            );
            last = end;
        }
    }

    #[test]
    fn long_horizon_settles_at_the_target() {
        let spec = spec18();
        let mut v = defaults18();
        // Pin the pulse width a 46 ms saccade would derive, then let the
        // step hold the eye for the rest of the horizon.
        v[17] = 40.0;
        let traj = simulate(&spec, &v, 10.0, 300.0, 1.0, 0.0).unwrap();
        let end = *traj.position_deg.last().unwrap();
        assert!((end - 10.0).abs() < 0.005, "settled at {end}, wanted 10");
        let tail_speed = traj.velocity_deg_s.last().unwrap().abs();
        assert!(tail_speed < 0.5, "still moving at {tail_speed} deg/s");
    }

    #[test]
    fn halving_the_step_converges_at_fourth_order() {
        let spec = spec18();
        let v = defaults18();
        // Probe away from the pulse edge so the control discontinuity
        // does not pollute the order estimate.
        let probe_ms = 20.0;
        let reference = {
            let traj = simulate(&spec, &v, 10.0, probe_ms, 0.01, 0.0).unwrap();
            *traj.position_deg.last().unwrap()
        };
        let endpoint = |dt: f64| {
            let traj = simulate(&spec, &v, 10.0, probe_ms, dt, 0.0).unwrap();
            *traj.position_deg.last().unwrap()
        };
        let e1 = (endpoint(1.0) - reference).abs();
        let e2 = (endpoint(0.5) - reference).abs();
        let ratio = e1 / e2;
        assert!(ratio > 12.0, "error ratio {ratio} below fourth-order expectation");
    }

    #[test]
    fn negative_target_mirrors_the_positive_run() {
        let spec = spec18();
        let v = defaults18();
        let pos = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        let neg = simulate(&spec, &v, -10.0, 46.0, 1.0, 0.0).unwrap();
        for (a, b) in pos.position_deg.iter().zip(&neg.position_deg) {
            assert_eq!(*a, -*b);
        }
        for (a, b) in pos.velocity_deg_s.iter().zip(&neg.velocity_deg_s) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn mirrored_run_respects_the_initial_angle() {
        let spec = spec18();
        let v = defaults18();
        let pos = simulate(&spec, &v, 10.0, 46.0, 1.0, 2.0).unwrap();
        let neg = simulate(&spec, &v, -10.0, 46.0, 1.0, 2.0).unwrap();
        for (a, b) in pos.position_deg.iter().zip(&neg.position_deg) {
            assert!((a - 2.0) + (b - 2.0) < 1e-15);
        }
    }

    #[test]
    fn reduced_model_matches_the_full_model_at_defaults() {
        let spec9 = lookup_model(MODEL_9).unwrap();
        let v9 = default_opc(MODEL_9).unwrap().values().to_vec();
        let spec = spec18();
        let v = defaults18();
        let full = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        let reduced = simulate(&spec9, &v9, 10.0, 46.0, 1.0, 0.0).unwrap();
        assert_eq!(full.position_deg, reduced.position_deg);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let spec = spec18();
        let v = defaults18();
        let a = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        let b = simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vanishing_inertia_reports_divergence() {
        let spec = spec18();
        let mut v = defaults18();
        v[9] = 1e-12;
        match simulate(&spec, &v, 10.0, 46.0, 1.0, 0.0) {
            Err(Error::Divergence { step, .. }) => assert!(step >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn perturbed(factors: &[f64]) -> Vec<f64> {
            defaults18()
                .iter()
                .zip(factors)
                .map(|(d, f)| d * f)
                .collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

            // A zero-amplitude run is steady fixation (the pulse never
            // fires); the state must stay put to well below reporting
            // precision for any physical plant at any starting angle.
            #[test]
            fn steady_fixation_is_a_fixed_point(
                factors in prop::collection::vec(0.8f64..1.25, 18),
                initial in -25.0f64..25.0,
            ) {
                let spec = spec18();
                let v = perturbed(&factors);
                let traj = simulate(&spec, &v, 0.0, 500.0, 1.0, initial).unwrap();
                prop_assert_eq!(traj.len(), 501);
                for (k, pos) in traj.position_deg.iter().enumerate() {
                    prop_assert!(
                        (pos - initial).abs() < 1e-9,
                        "drifted to {} at step {} from {}", pos, k, initial
                    );
                }
            }

            // A pulse above the fixation intercept on the agonist and
            // below it on the antagonist never pulls the eye behind its
            // starting angle.
            #[test]
            fn onward_drive_never_crosses_the_onset_angle(
                factors in prop::collection::vec(0.8f64..1.25, 18),
                initial in -10.0f64..10.0,
            ) {
                let spec = spec18();
                let v = perturbed(&factors);
                let traj = simulate(&spec, &v, 10.0, 46.0, 1.0, initial).unwrap();
                for pos in &traj.position_deg {
                    prop_assert!(*pos >= initial - 1e-9);
                }
            }
        }
    }
}
