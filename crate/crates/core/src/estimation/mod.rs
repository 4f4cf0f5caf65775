//! Parameter estimation: fit plant parameters to recorded saccades by
//! simplex search over the trajectory-matching objective, serially or over
//! a pool of workers with serial-identical results.

mod objective;
mod simplex;

pub use objective::{objective, SaccadeObjective};
pub use simplex::{initial_simplex, nelder_mead, ExitReason, SearchOutcome, SimplexState};

use crate::error::{Error, Result};
use crate::model::{resolve_pulse_width, ModelSpec, OpcVector, PW_FROM_DURATION};
use crate::trajectory::SaccadeTrajectory;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

/// Objective value assigned to infeasible candidates.
pub const DEFAULT_PENALTY_BASE: f64 = 1e10;

/// Search settings. `max_iterations` of `None` scales with the search
/// dimension as `200 * n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    pub tol_x: f64,
    pub tol_f: f64,
    pub max_iterations: Option<usize>,
    /// Wall-clock limit per saccade.
    pub time_budget: Duration,
    /// Relative perturbation for the start simplex.
    pub simplex_init_scale: f64,
    pub penalty_base: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            tol_x: 1e-4,
            tol_f: 1e-4,
            max_iterations: None,
            time_budget: Duration::from_secs(10),
            simplex_init_scale: 0.05,
            penalty_base: DEFAULT_PENALTY_BASE,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_x > 0.0) || !(self.tol_f > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive (tol_x {}, tol_f {})",
                self.tol_x, self.tol_f
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        if self.time_budget.is_zero() {
            return Err(Error::InvalidInput("time budget must be positive".into()));
        }
        if !(self.simplex_init_scale > 0.0) {
            return Err(Error::InvalidInput(format!(
                "simplex init scale must be positive, got {}",
                self.simplex_init_scale
            )));
        }
        if !(self.penalty_base > 0.0) {
            return Err(Error::InvalidInput(format!(
                "penalty base must be positive, got {}",
                self.penalty_base
            )));
        }
        Ok(())
    }
}

/// One fitted saccade. `opt_err` is the objective at the returned vector as
/// seen by the search; `cpu_check` is the same objective recomputed
/// independently afterwards, so the two agree to rounding unless something
/// corrupted the result.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub saccade_id: usize,
    pub opt_err: f64,
    pub cpu_check: f64,
    pub opc: OpcVector,
    /// Effective pulse width used by the fitted simulation, ms.
    pub pulse_width_ms: f64,
    pub iterations: usize,
    pub exit_reason: ExitReason,
}

impl EstimationResult {
    pub fn failed(saccade: &SaccadeTrajectory, spec: &ModelSpec, err: &Error) -> Self {
        Self {
            saccade_id: saccade.saccade_id,
            opt_err: f64::NAN,
            cpu_check: f64::NAN,
            opc: spec.default_opc(),
            pulse_width_ms: f64::NAN,
            iterations: 0,
            exit_reason: ExitReason::Failed(err.to_string()),
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.exit_reason, ExitReason::Failed(_))
    }
}

/// Fit one saccade starting from the model defaults. Masked-out parameters
/// keep their default values and are excluded from the search dimensions;
/// a pulse-width parameter left at its derive-from-duration default is
/// resolved against this saccade before the search starts.
pub fn estimate_saccade(
    saccade: &SaccadeTrajectory,
    spec: &ModelSpec,
    config: &EstimationConfig,
) -> Result<EstimationResult> {
    config.validate()?;
    let obj = SaccadeObjective::new(spec, saccade, config.penalty_base)?;

    let mut x0 = spec.default_opc().values().to_vec();
    let pw_index = spec.index_of("PW");
    if let Some(i) = pw_index {
        if x0[i] == PW_FROM_DURATION {
            x0[i] = resolve_pulse_width(PW_FROM_DURATION, saccade.duration_ms(), saccade.dt_ms);
        }
    }

    let search_dims: Vec<usize> = (0..spec.len()).filter(|&i| spec.is_estimated(i)).collect();
    let sub0: Vec<f64> = search_dims.iter().map(|&i| x0[i]).collect();

    let mut scratch = x0.clone();
    let outcome = nelder_mead(
        |sub| {
            for (&i, &v) in search_dims.iter().zip(sub) {
                scratch[i] = v;
            }
            obj.evaluate(&scratch)
        },
        &sub0,
        config,
    );

    let mut best = x0;
    for (&i, &v) in search_dims.iter().zip(&outcome.x_best) {
        best[i] = v;
    }
    let cpu_check = obj.evaluate(&best);
    let pulse_width_ms = resolve_pulse_width(
        pw_index.map_or(PW_FROM_DURATION, |i| best[i]),
        saccade.duration_ms(),
        saccade.dt_ms,
    );

    Ok(EstimationResult {
        saccade_id: saccade.saccade_id,
        opt_err: outcome.f_best,
        cpu_check,
        opc: OpcVector::new(spec, best)?,
        pulse_width_ms,
        iterations: outcome.iterations,
        exit_reason: outcome.exit_reason,
    })
}

/// Fit a batch of saccades over `workers` threads pulling from a shared
/// queue. Results land in input order and match a serial map of
/// [`estimate_saccade`] exactly: each task is pure and single-threaded, so
/// scheduling cannot change any value. A saccade whose fit fails occupies
/// its result slot with the failure; the batch always completes.
pub fn estimate_batch(
    saccades: &[SaccadeTrajectory],
    spec: &ModelSpec,
    config: &EstimationConfig,
    workers: usize,
) -> Result<Vec<EstimationResult>> {
    if workers == 0 {
        return Err(Error::InvalidInput("need at least one worker".into()));
    }
    config.validate()?;
    let n = saccades.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    let run_one = |s: &SaccadeTrajectory| {
        estimate_saccade(s, spec, config).unwrap_or_else(|e| EstimationResult::failed(s, spec, &e))
    };

    let threads = workers.min(n);
    if threads == 1 {
        return Ok(saccades.iter().map(run_one).collect());
    }

    let queue = AtomicUsize::new(0);
    let mut slots: Vec<Option<EstimationResult>> = vec![None; n];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = queue.fetch_add(1, Ordering::Relaxed);
                        if i >= n {
                            break;
                        }
                        done.push((i, run_one(&saccades[i])));
                    }
                    done
                })
            })
            .collect();
        for handle in handles {
            for (i, result) in handle.join().expect("estimation worker panicked") {
                slots[i] = Some(result);
            }
        }
    });
    Ok(slots.into_iter().map(|r| r.expect("all slots filled")).collect())
}

/// Re-validate a result by recomputing its objective in the calling
/// thread. A disagreement beyond 1e-9 relative means the result does not
/// belong to its saccade (or was altered); failed slots carry no claim and
/// pass through unchanged.
pub fn cpu_check(
    result: &EstimationResult,
    saccade: &SaccadeTrajectory,
    spec: &ModelSpec,
) -> Result<EstimationResult> {
    if result.is_failed() {
        return Ok(result.clone());
    }
    let recomputed = objective(result.opc.values(), saccade, spec);
    let rel = (recomputed - result.opt_err).abs() / result.opt_err.max(1.0);
    if !(rel <= 1e-9) {
        return Err(Error::Validation {
            saccade_id: result.saccade_id,
            opt_err: result.opt_err,
            cpu_check: recomputed,
        });
    }
    let mut validated = result.clone();
    validated.cpu_check = recomputed;
    Ok(validated)
}
