//! Performance metrics, the fixed-format results CSV, and the benchmark
//! harness comparing worker counts.

use crate::error::{Error, Result};
use crate::estimation::{estimate_batch, EstimationConfig, EstimationResult};
use crate::model::{PlantLayout, CANONICAL_PULSE_AG, CANONICAL_PULSE_ANT, CANONICAL_TAU};
use crate::trajectory::SaccadeTrajectory;
use std::io::Write;
use std::time::Instant;

/// Results CSV header. Fixed verbatim: downstream tooling matches it
/// byte for byte.
pub const RESULTS_CSV_HEADER: &str = "SacNo,OptErr,CPU_check,SE_ag,SE_ant,LT_ag,LT_ant,PE_ag,PE_ant,Vis,FV_ag,FV_ant,Inert,Act_ag,Act_ant,Deact_ag,Deact_ant,Step,H_ag,H_ant,W";

/// Benchmark report CSV header.
pub const BENCH_CSV_HEADER: &str = "workers,n,wall_time_s,throughput_per_s,speedup,mean_residual_deg";

/// Relative performance of a reference run against a candidate run.
pub fn speedup(t_reference_s: f64, t_candidate_s: f64) -> Result<f64> {
    if !(t_reference_s > 0.0) || !(t_candidate_s > 0.0) {
        return Err(Error::InvalidInput(format!(
            "speedup needs positive times, got {t_reference_s} and {t_candidate_s}"
        )));
    }
    Ok(t_reference_s / t_candidate_s)
}

/// Completed fits per second.
pub fn throughput(n: usize, wall_time_s: f64) -> Result<f64> {
    if !(wall_time_s > 0.0) {
        return Err(Error::InvalidInput(format!(
            "throughput needs positive wall time, got {wall_time_s}"
        )));
    }
    Ok(n as f64 / wall_time_s)
}

/// Mean per-sample absolute residual in degrees: each saccade's total
/// error is normalized by its own sample count, then averaged.
pub fn accuracy(per_saccade_errors: &[f64], per_saccade_samples: &[usize]) -> Result<f64> {
    if per_saccade_errors.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty run".into()));
    }
    if per_saccade_errors.len() != per_saccade_samples.len() {
        return Err(Error::InvalidInput(format!(
            "{} errors vs {} sample counts",
            per_saccade_errors.len(),
            per_saccade_samples.len()
        )));
    }
    if per_saccade_samples.iter().any(|&c| c == 0) {
        return Err(Error::InvalidInput("zero-sample saccade in accuracy".into()));
    }
    let total: f64 = per_saccade_errors
        .iter()
        .zip(per_saccade_samples)
        .map(|(e, &c)| e / c as f64)
        .sum();
    Ok(total / per_saccade_errors.len() as f64)
}

/// The 18 reported parameter columns, in CSV order, for one result. Models
/// sharing parameters across muscles report the shared value in both
/// columns; fixed canonical signal constants fill the columns the model
/// does not carry.
fn report_columns(result: &EstimationResult) -> Result<[f64; 18]> {
    let spec = crate::model::lookup_model(result.opc.model_id())?;
    let v = result.opc.values();
    Ok(match PlantLayout::resolve(&spec)? {
        PlantLayout::Full { idx } => [
            v[idx[0]],  // SE_ag
            v[idx[1]],  // SE_ant
            v[idx[2]],  // LT_ag
            v[idx[3]],  // LT_ant
            v[idx[7]],  // PE_ag (tension slope)
            v[idx[8]],  // PE_ant
            v[idx[6]],  // Vis (passive damping)
            v[idx[4]],  // FV_ag (force-velocity damping)
            v[idx[5]],  // FV_ant
            v[idx[9]],  // Inert
            v[idx[10]], // Act_ag
            v[idx[11]], // Act_ant
            v[idx[12]], // Deact_ag
            v[idx[13]], // Deact_ant
            v[idx[14]], // Step
            v[idx[15]], // H_ag
            v[idx[16]], // H_ant
            result.pulse_width_ms,
        ],
        PlantLayout::Reduced { idx } => [
            v[idx[0]],
            v[idx[0]],
            v[idx[1]],
            v[idx[1]],
            v[idx[5]],
            v[idx[6]],
            v[idx[4]],
            v[idx[2]],
            v[idx[3]],
            v[idx[7]],
            CANONICAL_TAU[0],
            CANONICAL_TAU[1],
            CANONICAL_TAU[2],
            CANONICAL_TAU[3],
            v[idx[8]],
            CANONICAL_PULSE_AG,
            CANONICAL_PULSE_ANT,
            result.pulse_width_ms,
        ],
    })
}

/// Write the results CSV: fixed header, one row per result ordered by
/// saccade id, every real with exactly 6 decimals. Returns bytes written.
pub fn write_results_csv<W: Write>(results: &[EstimationResult], sink: &mut W) -> Result<usize> {
    if let Some(first) = results.first() {
        if let Some(other) = results
            .iter()
            .find(|r| r.opc.model_id() != first.opc.model_id())
        {
            return Err(Error::Schema(format!(
                "mixed models in one results file: `{}` and `{}`",
                first.opc.model_id(),
                other.opc.model_id()
            )));
        }
    }
    let mut order: Vec<&EstimationResult> = results.iter().collect();
    order.sort_by_key(|r| r.saccade_id);

    let mut out = String::with_capacity(64 + 256 * results.len());
    out.push_str(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in order {
        out.push_str(&format!("{},{:.6},{:.6}", r.saccade_id, r.opt_err, r.cpu_check));
        for value in report_columns(r)? {
            out.push_str(&format!(",{value:.6}"));
        }
        out.push('\n');
    }
    sink.write_all(out.as_bytes()).map_err(Error::Io)?;
    Ok(out.len())
}

/// Measurements from one benchmark run at a fixed worker count.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub workers: usize,
    pub n_saccades: usize,
    pub wall_time_s: f64,
    pub per_saccade_errors: Vec<f64>,
    pub per_saccade_samples: Vec<usize>,
}

impl RunStats {
    pub fn throughput_per_s(&self) -> f64 {
        throughput(self.n_saccades, self.wall_time_s).unwrap_or(f64::NAN)
    }

    pub fn mean_residual_deg(&self) -> f64 {
        accuracy(&self.per_saccade_errors, &self.per_saccade_samples).unwrap_or(f64::NAN)
    }

    /// Raw objective total across the run, for transparency alongside the
    /// normalized residual.
    pub fn total_error(&self) -> f64 {
        self.per_saccade_errors.iter().sum()
    }
}

/// Run the estimation batch once per worker count on identical input,
/// timing each pass. Runs execute one at a time so timings stay clean.
/// Speedups are reported relative to the first listed worker count, which
/// is conventionally 1.
pub fn benchmark(
    saccades: &[SaccadeTrajectory],
    spec: &crate::model::ModelSpec,
    config: &EstimationConfig,
    worker_counts: &[usize],
) -> Result<Vec<RunStats>> {
    if worker_counts.is_empty() {
        return Err(Error::InvalidInput("no worker counts to benchmark".into()));
    }
    let samples: Vec<usize> = saccades.iter().map(|s| s.len()).collect();
    let mut stats = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        let started = Instant::now();
        let results = estimate_batch(saccades, spec, config, workers)?;
        let wall_time_s = started.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        stats.push(RunStats {
            workers,
            n_saccades: saccades.len(),
            wall_time_s,
            per_saccade_errors: results.iter().map(|r| r.opt_err).collect(),
            per_saccade_samples: samples.clone(),
        });
    }
    Ok(stats)
}

/// Benchmark report as CSV.
pub fn write_benchmark_csv<W: Write>(stats: &[RunStats], sink: &mut W) -> Result<()> {
    let reference = stats.first().map(|s| s.wall_time_s);
    let mut out = String::new();
    out.push_str(BENCH_CSV_HEADER);
    out.push('\n');
    for s in stats {
        let sp = speedup(reference.unwrap(), s.wall_time_s)?;
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}\n",
            s.workers,
            s.n_saccades,
            s.wall_time_s,
            s.throughput_per_s(),
            sp,
            s.mean_residual_deg()
        ));
    }
    sink.write_all(out.as_bytes()).map_err(Error::Io)
}

/// Benchmark report as a readable table.
pub fn format_benchmark_text(stats: &[RunStats]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>8} {:>8} {:>12} {:>14} {:>9} {:>18} {:>14}\n",
        "workers", "n", "wall_time_s", "throughput/s", "speedup", "mean_residual_deg", "total_error"
    ));
    let reference = stats.first().map(|s| s.wall_time_s).unwrap_or(f64::NAN);
    for s in stats {
        out.push_str(&format!(
            "{:>8} {:>8} {:>12.3} {:>14.2} {:>9.2} {:>18.6} {:>14.4}\n",
            s.workers,
            s.n_saccades,
            s.wall_time_s,
            s.throughput_per_s(),
            reference / s.wall_time_s,
            s.mean_residual_deg(),
            s.total_error()
        ));
    }
    out
}
