//! Oculomotor plant models: parameter specs, the model registry, the
//! pulse-step control signal, and saccade simulation.
//!
//! Two plant parameterizations ship built in: an 18-parameter model with
//! independent agonist/antagonist mechanics and an explicit neural pulse,
//! and a 9-parameter reduction that shares series elasticity and
//! length-tension across both muscles and drives them with a canonical
//! pulse. Further models can be registered at startup; simulation requires
//! their parameter names to map onto one of the built-in layouts.

mod plant;
mod signal;
mod simulate;

pub use plant::{
    equilibrium_state, fixation_levels, plant_derivatives, PlantDeriv, PlantLayout, PlantParams,
    PlantState, CANONICAL_PULSE_AG, CANONICAL_PULSE_ANT, CANONICAL_TAU, MIN_ANTAGONIST_TENSION,
};
pub use signal::{build_control_signal, resolve_pulse_width, ControlSignal, PULSE_MARGIN_MS};
pub use simulate::{simulate, SimulatedTrajectory};

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Registry id of the built-in 18-parameter model.
pub const MODEL_18: &str = "komogortsev18";
/// Registry id of the built-in 9-parameter model.
pub const MODEL_9: &str = "komogortsev9";

/// Sentinel default for the neural pulse width: a value of `0.0` means
/// "derive from the saccade being simulated" (duration minus 6 ms, floored
/// at one integration step).
pub const PW_FROM_DURATION: f64 = 0.0;

/// Parameter names of the 18-parameter model, in registry order.
pub const NAMES_18: [&str; 18] = [
    "K_SE_AG", "K_SE_ANT", "K_LT_AG", "K_LT_ANT", "B_AG", "B_ANT", "B_P", "N_C_AG", "N_C_ANT",
    "J", "TAU_AC_AG", "TAU_AC_ANT", "TAU_DE_AG", "TAU_DE_ANT", "N_C_FIX", "N_SAC_AG", "N_SAC_ANT",
    "PW",
];

/// Parameter names of the 9-parameter model, in registry order.
pub const NAMES_9: [&str; 9] = [
    "K_SE", "K_LT", "B_AG", "B_ANT", "B_P", "N_C_AG", "N_C_ANT", "J", "N_C_FIX",
];

const DEFAULTS_18: [f64; 18] = [
    2.5, 2.5, 1.2, 1.2, 0.046, 0.022, 0.06, 0.8, 0.5, 0.000043, 11.7, 2.4, 2.0, 1.9, 14.0, 55.0,
    0.5, PW_FROM_DURATION,
];

const DEFAULTS_9: [f64; 9] = [2.5, 1.2, 0.046, 0.022, 0.06, 0.8, 0.5, 0.000043, 14.0];

/// A named plant parameterization: parameter order, literature defaults,
/// physical floors, and which parameters the estimator is allowed to move.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    model_id: String,
    parameter_names: Vec<String>,
    defaults: Vec<f64>,
    floors: Vec<f64>,
    estimation_mask: Vec<bool>,
}

impl ModelSpec {
    pub fn new(
        model_id: impl Into<String>,
        parameter_names: Vec<String>,
        defaults: Vec<f64>,
        floors: Vec<f64>,
        estimation_mask: Vec<bool>,
    ) -> Result<Self> {
        let model_id = model_id.into();
        if model_id.is_empty() {
            return Err(Error::InvalidModelSpec("empty model id".into()));
        }
        if parameter_names.is_empty() {
            return Err(Error::InvalidModelSpec("no parameters".into()));
        }
        let n = parameter_names.len();
        for (label, len) in [
            ("defaults", defaults.len()),
            ("floors", floors.len()),
            ("estimation_mask", estimation_mask.len()),
        ] {
            if len != n {
                return Err(Error::InvalidModelSpec(format!(
                    "{label} has {len} entries for {n} parameters"
                )));
            }
        }
        for (i, name) in parameter_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidModelSpec(format!("parameter {i} has an empty name")));
            }
            if parameter_names[..i].contains(name) {
                return Err(Error::InvalidModelSpec(format!("duplicate parameter `{name}`")));
            }
        }
        for (i, (&d, &f)) in defaults.iter().zip(&floors).enumerate() {
            if !d.is_finite() || !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidModelSpec(format!(
                    "parameter `{}` has non-finite default or invalid floor",
                    parameter_names[i]
                )));
            }
            if d < f {
                return Err(Error::InvalidModelSpec(format!(
                    "default for `{}` ({d}) is below its floor ({f})",
                    parameter_names[i]
                )));
            }
        }
        Ok(Self {
            model_id,
            parameter_names,
            defaults,
            floors,
            estimation_mask,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    /// Number of parameters in the vector.
    pub fn len(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.parameter_names.iter().position(|n| n == name)
    }

    pub fn floor(&self, index: usize) -> f64 {
        self.floors[index]
    }

    pub fn is_estimated(&self, index: usize) -> bool {
        self.estimation_mask[index]
    }

    /// The literature default vector for this model.
    pub fn default_opc(&self) -> OpcVector {
        OpcVector {
            model_id: self.model_id.clone(),
            values: self.defaults.clone(),
        }
    }
}

/// The built-in 18-parameter model spec.
///
/// Independent agonist (AG) and antagonist (ANT) series elasticity,
/// length-tension, force-velocity and tension slope; shared passive
/// viscosity, globe inertia and fixation tension intercept; first-order
/// neural activation/deactivation and an explicit pulse (height per muscle,
/// width derived from saccade duration unless estimated).
pub fn komogortsev18() -> ModelSpec {
    ModelSpec::new(
        MODEL_18,
        NAMES_18.iter().map(|s| s.to_string()).collect(),
        DEFAULTS_18.to_vec(),
        vec![0.0; 18],
        vec![true; 18],
    )
    .expect("built-in spec is valid")
}

/// The built-in 9-parameter model spec: shared `K_SE`/`K_LT` for both
/// muscles, no neural-signal parameters (simulation uses the canonical
/// pulse and the 18-parameter activation time constants).
pub fn komogortsev9() -> ModelSpec {
    ModelSpec::new(
        MODEL_9,
        NAMES_9.iter().map(|s| s.to_string()).collect(),
        DEFAULTS_9.to_vec(),
        vec![0.0; 9],
        vec![true; 9],
    )
    .expect("built-in spec is valid")
}

/// One parameter vector for a registered model.
#[derive(Debug, Clone, PartialEq)]
pub struct OpcVector {
    model_id: String,
    values: Vec<f64>,
}

impl OpcVector {
    pub fn new(spec: &ModelSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for model `{}` with {} parameters",
                values.len(),
                spec.model_id(),
                spec.len()
            )));
        }
        Ok(Self {
            model_id: spec.model_id().to_string(),
            values,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, spec: &ModelSpec, name: &str) -> Option<f64> {
        spec.index_of(name).map(|i| self.values[i])
    }

    pub fn set(&mut self, spec: &ModelSpec, name: &str, value: f64) -> Result<()> {
        let i = spec
            .index_of(name)
            .ok_or_else(|| Error::InvalidInput(format!("no parameter `{name}` in `{}`", self.model_id)))?;
        self.values[i] = value;
        Ok(())
    }

    /// A vector is physical when every value sits on or above its floor.
    pub fn is_physical(&self, spec: &ModelSpec) -> bool {
        self.values
            .iter()
            .zip(0..spec.len())
            .all(|(&v, i)| v >= spec.floor(i))
    }

    /// First below-floor parameter, if any.
    pub fn first_violation(&self, spec: &ModelSpec) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .find(|&(i, &v)| v < spec.floor(i))
            .map(|(i, &v)| (i, v))
    }
}

/// Total below-floor mass of a raw value array, for penalty construction.
pub(crate) fn violation_sum(spec: &ModelSpec, values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| (spec.floor(i) - v).max(0.0))
        .sum()
}

type Registry = RwLock<HashMap<String, Arc<ModelSpec>>>;

static REGISTRY: OnceLock<Registry> = OnceLock::new();

fn registry() -> &'static Registry {
    REGISTRY.get_or_init(|| {
        let mut map = HashMap::new();
        for spec in [komogortsev18(), komogortsev9()] {
            map.insert(spec.model_id().to_string(), Arc::new(spec));
        }
        RwLock::new(map)
    })
}

/// Register a model for later lookup by id. The built-ins are registered on
/// first use of the registry; ids must be unique.
pub fn register_model(spec: ModelSpec) -> Result<Arc<ModelSpec>> {
    let mut map = registry().write().expect("registry poisoned");
    if map.contains_key(spec.model_id()) {
        return Err(Error::DuplicateModel(spec.model_id().to_string()));
    }
    let handle = Arc::new(spec);
    map.insert(handle.model_id().to_string(), Arc::clone(&handle));
    Ok(handle)
}

pub fn lookup_model(model_id: &str) -> Result<Arc<ModelSpec>> {
    registry()
        .read()
        .expect("registry poisoned")
        .get(model_id)
        .cloned()
        .ok_or_else(|| Error::UnknownModel(model_id.to_string()))
}

/// Default parameter vector of a registered model.
pub fn default_opc(model_id: &str) -> Result<OpcVector> {
    Ok(lookup_model(model_id)?.default_opc())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_registered() {
        let m18 = lookup_model(MODEL_18).unwrap();
        assert_eq!(m18.len(), 18);
        assert_eq!(m18.parameter_names()[0], "K_SE_AG");
        let m9 = lookup_model(MODEL_9).unwrap();
        assert_eq!(m9.len(), 9);
    }

    #[test]
    fn default_values_match_literature() {
        let opc = default_opc(MODEL_18).unwrap();
        let spec = lookup_model(MODEL_18).unwrap();
        assert_eq!(opc.value(&spec, "J"), Some(0.000043));
        assert_eq!(opc.value(&spec, "TAU_AC_AG"), Some(11.7));
        assert_eq!(opc.value(&spec, "N_SAC_AG"), Some(55.0));
        assert_eq!(opc.value(&spec, "PW"), Some(PW_FROM_DURATION));

        let opc9 = default_opc(MODEL_9).unwrap();
        let spec9 = lookup_model(MODEL_9).unwrap();
        assert_eq!(opc9.value(&spec9, "K_SE"), Some(2.5));
        assert_eq!(opc9.value(&spec9, "N_C_FIX"), Some(14.0));
    }

    #[test]
    fn unknown_model_is_a_lookup_error() {
        assert!(matches!(default_opc("nosuch"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn duplicate_registration_is_rejected() {
        let spec = ModelSpec::new(
            "dup-test-model",
            vec!["A".into(), "B".into()],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            vec![true, true],
        )
        .unwrap();
        register_model(spec.clone()).unwrap();
        assert!(matches!(
            register_model(spec),
            Err(Error::DuplicateModel(_))
        ));
    }

    #[test]
    fn spec_validation_catches_duplicates_and_lengths() {
        let err = ModelSpec::new(
            "bad",
            vec!["A".into(), "A".into()],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            vec![true, true],
        );
        assert!(matches!(err, Err(Error::InvalidModelSpec(_))));

        let err = ModelSpec::new(
            "bad2",
            vec!["A".into()],
            vec![1.0, 2.0],
            vec![0.0],
            vec![true],
        );
        assert!(matches!(err, Err(Error::InvalidModelSpec(_))));
    }

    #[test]
    fn defaults_are_physical() {
        for id in [MODEL_18, MODEL_9] {
            let spec = lookup_model(id).unwrap();
            assert!(spec.default_opc().is_physical(&spec));
        }
    }

    #[test]
    fn violation_sum_measures_below_floor_mass() {
        let spec = lookup_model(MODEL_18).unwrap();
        let mut values = spec.default_opc().values().to_vec();
        values[0] = -1.0;
        values[4] = -0.5;
        assert_eq!(violation_sum(&spec, &values), 1.5);
        assert_eq!(violation_sum(&spec, spec.default_opc().values()), 0.0);
    }
}
