//! Plant mechanics: parameter resolution, unit conversion, the coupled
//! muscle/globe derivative, and static equilibrium solutions.
//!
//! Internally the plant integrates in a millisecond unit family: stiffness
//! and tension slopes in g/deg, damping in g*ms/deg, inertia in g*ms^2/deg,
//! forces in g, angles in deg, angular velocity in deg/ms. Table values
//! quoted in seconds convert on construction (damping x1000, inertia x1e6).

use super::{ModelSpec, NAMES_18, NAMES_9};
use crate::error::{Error, Result};

/// Minimum antagonist innervation, g. Keeps the fixation balance away from
/// a slack antagonist when the target angle is large.
pub const MIN_ANTAGONIST_TENSION: f64 = 0.01;

/// Canonical agonist pulse height, g, used when a model carries no
/// neural-signal parameters.
pub const CANONICAL_PULSE_AG: f64 = 55.0;
/// Canonical antagonist pulse level, g.
pub const CANONICAL_PULSE_ANT: f64 = 0.5;
/// Activation/deactivation time constants, ms, for models that do not
/// estimate them: agonist activation, antagonist activation, agonist
/// deactivation, antagonist deactivation.
pub const CANONICAL_TAU: [f64; 4] = [11.7, 2.4, 2.0, 1.9];

/// How a model's parameter names map onto the plant mechanics.
#[derive(Debug, Clone)]
pub enum PlantLayout {
    /// All 18 canonical parameter names present (index per name).
    Full { idx: [usize; 18] },
    /// The 9-name reduction: shared series elasticity and length-tension,
    /// canonical neural signal.
    Reduced { idx: [usize; 9] },
}

impl PlantLayout {
    /// Resolve a spec's parameter names onto a supported layout. A spec
    /// carrying every 18-parameter name resolves to the full layout even if
    /// the 9-parameter names are also present.
    pub fn resolve(spec: &ModelSpec) -> Result<Self> {
        let find = |names: &[&str]| -> Option<Vec<usize>> {
            names.iter().map(|n| spec.index_of(n)).collect()
        };
        if let Some(v) = find(&NAMES_18) {
            let mut idx = [0usize; 18];
            idx.copy_from_slice(&v);
            return Ok(PlantLayout::Full { idx });
        }
        if let Some(v) = find(&NAMES_9) {
            let mut idx = [0usize; 9];
            idx.copy_from_slice(&v);
            return Ok(PlantLayout::Reduced { idx });
        }
        Err(Error::UnsupportedPlant(spec.model_id().to_string()))
    }

    /// Convert a raw parameter slice into plant mechanics, rejecting
    /// below-floor values.
    pub fn params(&self, spec: &ModelSpec, values: &[f64]) -> Result<PlantParams> {
        if values.len() != spec.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for model `{}` with {} parameters",
                values.len(),
                spec.model_id(),
                spec.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v >= spec.floor(i)) {
                return Err(Error::NonPhysical {
                    name: spec.parameter_names()[i].clone(),
                    value: v,
                    floor: spec.floor(i),
                });
            }
        }
        Ok(match *self {
            PlantLayout::Full { idx } => {
                let g = |k: usize| values[idx[k]];
                PlantParams {
                    k_se_ag: g(0),
                    k_se_ant: g(1),
                    k_lt_ag: g(2),
                    k_lt_ant: g(3),
                    b_ag: g(4) * 1000.0,
                    b_ant: g(5) * 1000.0,
                    b_p: g(6) * 1000.0,
                    n_c_ag: g(7),
                    n_c_ant: g(8),
                    j: g(9) * 1e6,
                    tau_ac_ag: g(10),
                    tau_ac_ant: g(11),
                    tau_de_ag: g(12),
                    tau_de_ant: g(13),
                    n_c_fix: g(14),
                    n_sac_ag: g(15),
                    n_sac_ant: g(16),
                    pw_ms: g(17),
                }
            }
            PlantLayout::Reduced { idx } => {
                let g = |k: usize| values[idx[k]];
                PlantParams {
                    k_se_ag: g(0),
                    k_se_ant: g(0),
                    k_lt_ag: g(1),
                    k_lt_ant: g(1),
                    b_ag: g(2) * 1000.0,
                    b_ant: g(3) * 1000.0,
                    b_p: g(4) * 1000.0,
                    n_c_ag: g(5),
                    n_c_ant: g(6),
                    j: g(7) * 1e6,
                    tau_ac_ag: CANONICAL_TAU[0],
                    tau_ac_ant: CANONICAL_TAU[1],
                    tau_de_ag: CANONICAL_TAU[2],
                    tau_de_ant: CANONICAL_TAU[3],
                    n_c_fix: g(8),
                    n_sac_ag: CANONICAL_PULSE_AG,
                    n_sac_ant: CANONICAL_PULSE_ANT,
                    pw_ms: super::PW_FROM_DURATION,
                }
            }
        })
    }
}

/// Unit-converted plant mechanics in the millisecond family.
#[derive(Debug, Clone, Copy)]
pub struct PlantParams {
    /// Series elasticity, g/deg.
    pub k_se_ag: f64,
    pub k_se_ant: f64,
    /// Length-tension slope, g/deg.
    pub k_lt_ag: f64,
    pub k_lt_ant: f64,
    /// Muscle damping, g*ms/deg.
    pub b_ag: f64,
    pub b_ant: f64,
    /// Passive globe damping, g*ms/deg.
    pub b_p: f64,
    /// Active tension slope, g/deg.
    pub n_c_ag: f64,
    pub n_c_ant: f64,
    /// Globe inertia, g*ms^2/deg.
    pub j: f64,
    /// Neural time constants, ms.
    pub tau_ac_ag: f64,
    pub tau_ac_ant: f64,
    pub tau_de_ag: f64,
    pub tau_de_ant: f64,
    /// Fixation tension intercept, g.
    pub n_c_fix: f64,
    /// Pulse levels, g.
    pub n_sac_ag: f64,
    pub n_sac_ant: f64,
    /// Pulse width, ms; `0.0` derives it from saccade duration.
    pub pw_ms: f64,
}

/// Integration state. `omega` is deg/ms; muscle node positions `x_*` are
/// deg and tension states `f_*` are g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub theta: f64,
    pub omega: f64,
    pub x_ag: f64,
    pub x_ant: f64,
    pub f_ag: f64,
    pub f_ant: f64,
}

impl PlantState {
    pub fn is_finite(&self) -> bool {
        self.theta.is_finite()
            && self.omega.is_finite()
            && self.x_ag.is_finite()
            && self.x_ant.is_finite()
            && self.f_ag.is_finite()
            && self.f_ant.is_finite()
    }
}

/// Time derivative of [`PlantState`], same field order.
#[derive(Debug, Clone, Copy)]
pub struct PlantDeriv {
    pub d_theta: f64,
    pub d_omega: f64,
    pub d_x_ag: f64,
    pub d_x_ant: f64,
    pub d_f_ag: f64,
    pub d_f_ant: f64,
}

/// Coupled muscle and globe derivative under innervation (`n_ag`, `n_ant`).
/// `in_pulse` selects activation time constants; outside the pulse both
/// muscles relax with their deactivation constants.
///
/// Sign convention: positive `theta` is rotation toward the agonist, so the
/// antagonist sees `-theta`. Tendon tension `T_m = K_SE_m (x_m - theta_m)`
/// and the muscle node obeys
/// `B_m dx_m = f_m - N_C_m theta_m - K_LT_m x_m - T_m`.
pub fn plant_derivatives(
    p: &PlantParams,
    s: &PlantState,
    n_ag: f64,
    n_ant: f64,
    in_pulse: bool,
) -> PlantDeriv {
    let t_ag = p.k_se_ag * (s.x_ag - s.theta);
    let t_ant = p.k_se_ant * (s.x_ant + s.theta);

    let d_x_ag = (s.f_ag - p.n_c_ag * s.theta - p.k_lt_ag * s.x_ag - t_ag) / p.b_ag;
    let d_x_ant = (s.f_ant + p.n_c_ant * s.theta - p.k_lt_ant * s.x_ant - t_ant) / p.b_ant;

    let (tau_ag, tau_ant) = if in_pulse {
        (p.tau_ac_ag, p.tau_ac_ant)
    } else {
        (p.tau_de_ag, p.tau_de_ant)
    };
    let d_f_ag = (n_ag - s.f_ag) / tau_ag;
    let d_f_ant = (n_ant - s.f_ant) / tau_ant;

    let d_omega = (t_ag - t_ant - p.b_p * s.omega) / p.j;

    PlantDeriv {
        d_theta: s.omega,
        d_omega,
        d_x_ag,
        d_x_ant,
        d_f_ag,
        d_f_ant,
    }
}

fn lambda(k_se: f64, k_lt: f64) -> f64 {
    k_se / (k_se + k_lt)
}

/// Steady innervation levels holding the globe at `theta_f`.
///
/// Solves the static torque balance with both levels split symmetrically
/// about the fixation intercept; if the antagonist side would fall below
/// [`MIN_ANTAGONIST_TENSION`] it is clamped there and the agonist re-solved
/// so the balance stays exact.
pub fn fixation_levels(p: &PlantParams, theta_f: f64) -> (f64, f64) {
    let lam_ag = lambda(p.k_se_ag, p.k_lt_ag);
    let lam_ant = lambda(p.k_se_ant, p.k_lt_ant);
    let slope_ag = p.n_c_ag + p.k_lt_ag;
    let slope_ant = p.n_c_ant + p.k_lt_ant;

    let delta = ((lam_ant - lam_ag) * p.n_c_fix
        + (lam_ant * slope_ant + lam_ag * slope_ag) * theta_f)
        / (lam_ag + lam_ant);
    let mut n_ag = p.n_c_fix + delta;
    let mut n_ant = p.n_c_fix - delta;
    if n_ant < MIN_ANTAGONIST_TENSION {
        n_ant = MIN_ANTAGONIST_TENSION;
        n_ag = lam_ant * (n_ant + slope_ant * theta_f) / lam_ag + slope_ag * theta_f;
    }
    (n_ag, n_ant)
}

/// Exact rest state at angle `theta` under steady innervation. All six
/// derivatives vanish when (`n_ag`, `n_ant`) come from [`fixation_levels`]
/// for the same angle.
pub fn equilibrium_state(p: &PlantParams, theta: f64, n_ag: f64, n_ant: f64) -> PlantState {
    let x_ag = (n_ag + (p.k_se_ag - p.n_c_ag) * theta) / (p.k_se_ag + p.k_lt_ag);
    let x_ant = (n_ant - (p.k_se_ant - p.n_c_ant) * theta) / (p.k_se_ant + p.k_lt_ant);
    PlantState {
        theta,
        omega: 0.0,
        x_ag,
        x_ant,
        f_ag: n_ag,
        f_ant: n_ant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_opc, lookup_model, MODEL_18, MODEL_9};

    fn default_params() -> PlantParams {
        let spec = lookup_model(MODEL_18).unwrap();
        let layout = PlantLayout::resolve(&spec).unwrap();
        layout.params(&spec, default_opc(MODEL_18).unwrap().values()).unwrap()
    }

    #[test]
    fn unit_conversion_scales_damping_and_inertia() {
        let p = default_params();
        assert_eq!(p.b_ag, 46.0);
        assert_eq!(p.b_ant, 22.0);
        assert_eq!(p.b_p, 60.0);
        assert_eq!(p.j, 43.0);
        assert_eq!(p.k_se_ag, 2.5);
        assert_eq!(p.tau_ac_ag, 11.7);
    }

    #[test]
    fn reduced_layout_shares_elasticity_and_uses_canonical_signal() {
        let spec = lookup_model(MODEL_9).unwrap();
        let layout = PlantLayout::resolve(&spec).unwrap();
        assert!(matches!(layout, PlantLayout::Reduced { .. }));
        let p = layout.params(&spec, default_opc(MODEL_9).unwrap().values()).unwrap();
        assert_eq!(p.k_se_ag, p.k_se_ant);
        assert_eq!(p.k_lt_ag, p.k_lt_ant);
        assert_eq!(p.n_sac_ag, CANONICAL_PULSE_AG);
        assert_eq!(p.tau_ac_ag, 11.7);
    }

    #[test]
    fn below_floor_values_are_rejected_with_the_offender_named() {
        let spec = lookup_model(MODEL_18).unwrap();
        let layout = PlantLayout::resolve(&spec).unwrap();
        let mut values = default_opc(MODEL_18).unwrap().values().to_vec();
        values[9] = -1e-6;
        match layout.params(&spec, &values) {
            Err(Error::NonPhysical { name, value, floor }) => {
                assert_eq!(name, "J");
                assert_eq!(value, -1e-6);
                assert_eq!(floor, 0.0);
            }
            other => panic!("expected NonPhysical, got {other:?}"),
        }
    }

    #[test]
    fn fixation_at_primary_position_is_symmetric() {
        let p = default_params();
        let (n_ag, n_ant) = fixation_levels(&p, 0.0);
        assert!((n_ag - 14.0).abs() < 1e-12);
        assert!((n_ant - 14.0).abs() < 1e-12);
        let s = equilibrium_state(&p, 0.0, n_ag, n_ant);
        assert!((s.x_ag - 14.0 / 3.7).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_is_a_fixed_point_of_the_derivative() {
        let p = default_params();
        for theta_f in [0.0, 5.0, 10.0, -8.0, 25.0] {
            let (n_ag, n_ant) = fixation_levels(&p, theta_f);
            let s = equilibrium_state(&p, theta_f, n_ag, n_ant);
            let d = plant_derivatives(&p, &s, n_ag, n_ant, false);
            for v in [d.d_theta, d.d_omega, d.d_x_ag, d.d_x_ant, d.d_f_ag, d.d_f_ant] {
                assert!(v.abs() < 1e-9, "derivative {v} not zero at theta_f={theta_f}");
            }
            assert!(n_ant >= MIN_ANTAGONIST_TENSION);
        }
    }

    #[test]
    fn antagonist_floor_engages_for_large_angles() {
        let p = default_params();
        // Symmetric defaults unclamped: n_ant = 14 - 1.85 * theta_f drops
        // below the floor past ~7.56 deg.
        let (_, n_ant_small) = fixation_levels(&p, 5.0);
        assert!(n_ant_small > MIN_ANTAGONIST_TENSION);
        let (n_ag, n_ant) = fixation_levels(&p, 20.0);
        assert_eq!(n_ant, MIN_ANTAGONIST_TENSION);
        // Balance stays exact after clamping.
        let s = equilibrium_state(&p, 20.0, n_ag, n_ant);
        let d = plant_derivatives(&p, &s, n_ag, n_ant, false);
        assert!(d.d_omega.abs() < 1e-9);
    }

    #[test]
    fn activation_rate_at_pulse_onset() {
        // From fixation tension 14 g toward a 55 g pulse with an 11.7 ms
        // activation constant: (55 - 14) / 11.7 g/ms.
        let p = default_params();
        let (n_ag, n_ant) = fixation_levels(&p, 0.0);
        let s = equilibrium_state(&p, 0.0, n_ag, n_ant);
        let d = plant_derivatives(&p, &s, 55.0, 0.5, true);
        assert!((d.d_f_ag - 41.0 / 11.7).abs() < 1e-12);
        assert!((d.d_f_ag - 3.504273504273504).abs() < 1e-12);
    }

    #[test]
    fn unsupported_name_set_is_rejected() {
        let spec = ModelSpec::new(
            "robinson-style",
            vec!["K1".into(), "K2".into()],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            vec![true, true],
        )
        .unwrap();
        assert!(matches!(
            PlantLayout::resolve(&spec),
            Err(Error::UnsupportedPlant(_))
        ));
    }
}
