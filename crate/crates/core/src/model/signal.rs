//! Pulse-step neural control: a fixed-height pulse drives the saccade, a
//! step holds the new fixation.

use super::plant::{fixation_levels, PlantParams};
use crate::error::{Error, Result};

/// Shortest saccade the pulse-width rule is calibrated for; the derived
/// pulse is the saccade duration minus this margin, ms.
pub const PULSE_MARGIN_MS: f64 = 6.0;

/// Piecewise-constant innervation for one saccade, one level per
/// integration step (step `k` covers `[k*dt, (k+1)*dt)`). Steps inside
/// `pulse_window` carry the pulse levels, steps outside carry the fixation
/// step levels for the landing angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    pub dt_ms: f64,
    pub n_ag: Vec<f64>,
    pub n_ant: Vec<f64>,
    /// Half-open `[onset, offset)` range of pulse step indices.
    pub pulse_window: (usize, usize),
}

impl ControlSignal {
    pub fn len(&self) -> usize {
        self.n_ag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_ag.is_empty()
    }

    /// Innervation targets and pulse membership for step `k`.
    pub fn step(&self, k: usize) -> (f64, f64, bool) {
        let in_pulse = k >= self.pulse_window.0 && k < self.pulse_window.1;
        (self.n_ag[k], self.n_ant[k], in_pulse)
    }
}

/// Resolve the pulse width: explicit when the parameter is positive,
/// otherwise derived from the saccade duration, never shorter than one
/// integration step.
pub fn resolve_pulse_width(pw_param: f64, duration_ms: f64, dt_ms: f64) -> f64 {
    if pw_param > 0.0 {
        pw_param
    } else {
        (duration_ms - PULSE_MARGIN_MS).max(dt_ms)
    }
}

/// Build the per-step control signal for a saccade of `amplitude_deg`
/// (nonnegative; direction is handled by mirroring in the simulator) over
/// `n_steps` integration steps. The pulse starts at step 0 and covers
/// every step beginning before the resolved pulse width. Zero amplitude
/// means no movement at all: the pulse window is empty and every step
/// holds the current fixation, so the eye stays at equilibrium.
pub fn build_control_signal(
    p: &PlantParams,
    amplitude_deg: f64,
    duration_ms: f64,
    dt_ms: f64,
    n_steps: usize,
) -> Result<ControlSignal> {
    if !amplitude_deg.is_finite() || amplitude_deg < 0.0 {
        return Err(Error::InvalidInput(format!(
            "control signal needs a nonnegative amplitude, got {amplitude_deg}"
        )));
    }
    if n_steps == 0 {
        return Err(Error::InvalidInput("control signal needs at least one step".into()));
    }
    let pulse_active = amplitude_deg > 0.0;
    let pw_ms = resolve_pulse_width(p.pw_ms, duration_ms, dt_ms);
    let (step_ag, step_ant) = fixation_levels(p, amplitude_deg);

    let mut n_ag = Vec::with_capacity(n_steps);
    let mut n_ant = Vec::with_capacity(n_steps);
    let mut pulse_steps = 0;
    for k in 0..n_steps {
        if pulse_active && (k as f64) * dt_ms < pw_ms {
            n_ag.push(p.n_sac_ag);
            n_ant.push(p.n_sac_ant);
            pulse_steps = k + 1;
        } else {
            n_ag.push(step_ag);
            n_ant.push(step_ant);
        }
    }
    Ok(ControlSignal {
        dt_ms,
        n_ag,
        n_ant,
        pulse_window: (0, pulse_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::plant::PlantLayout;
    use crate::model::{default_opc, lookup_model, MODEL_18};

    fn params() -> PlantParams {
        let spec = lookup_model(MODEL_18).unwrap();
        PlantLayout::resolve(&spec)
            .unwrap()
            .params(&spec, default_opc(MODEL_18).unwrap().values())
            .unwrap()
    }

    #[test]
    fn derived_pulse_width_is_duration_minus_margin() {
        assert_eq!(resolve_pulse_width(0.0, 46.0, 1.0), 40.0);
        assert_eq!(resolve_pulse_width(25.0, 46.0, 1.0), 25.0);
        // Very short saccades still get one step of pulse.
        assert_eq!(resolve_pulse_width(0.0, 6.5, 1.0), 1.0);
    }

    #[test]
    fn pulse_steps_then_fixation_steps() {
        let sig = build_control_signal(&params(), 10.0, 46.0, 1.0, 46).unwrap();
        assert_eq!(sig.len(), 46);
        assert_eq!(sig.pulse_window, (0, 40));
        assert_eq!(sig.step(0), (55.0, 0.5, true));
        assert_eq!(sig.step(39), (55.0, 0.5, true));
        let (ag, ant, in_pulse) = sig.step(40);
        assert!(!in_pulse);
        // At 10 deg the antagonist is clamped and the agonist re-solved:
        // n_ag = (0.01 + 1.7 * 10) + 2.0 * 10 with the default stiffnesses.
        assert!((ag - 37.01).abs() < 1e-9);
        assert_eq!(ant, crate::model::plant::MIN_ANTAGONIST_TENSION);
        assert_eq!(sig.step(45).0, ag);
    }

    #[test]
    fn pulse_longer_than_the_run_fills_every_step() {
        let mut p = params();
        p.pw_ms = 100.0;
        let sig = build_control_signal(&p, 10.0, 46.0, 1.0, 46).unwrap();
        assert_eq!(sig.pulse_window, (0, 46));
        assert!(sig.n_ag.iter().all(|&v| v == 55.0));
    }

    #[test]
    fn fractional_pulse_width_rounds_up_to_whole_steps() {
        let mut p = params();
        p.pw_ms = 0.3;
        let sig = build_control_signal(&p, 10.0, 46.0, 1.0, 46).unwrap();
        assert_eq!(sig.pulse_window, (0, 1));
    }

    #[test]
    fn zero_amplitude_means_no_pulse_at_all() {
        let sig = build_control_signal(&params(), 0.0, 46.0, 1.0, 46).unwrap();
        assert_eq!(sig.pulse_window, (0, 0));
        for k in 0..46 {
            let (ag, ant, in_pulse) = sig.step(k);
            assert!(!in_pulse);
            assert!((ag - 14.0).abs() < 1e-12);
            assert!((ant - 14.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_amplitude_is_rejected() {
        assert!(build_control_signal(&params(), -1.0, 46.0, 1.0, 46).is_err());
    }
}
