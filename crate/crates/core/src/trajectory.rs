//! Recorded eye-position ingest: CSV parsing, artifact cleaning, velocity
//! computation, velocity-threshold sample classification, and saccade
//! extraction/filtering.

use crate::error::{Error, Result};
use std::io::BufRead;

/// Default classification threshold, deg/s.
pub const DEFAULT_IVT_THRESHOLD: f64 = 30.0;
/// Saccades smaller than this amplitude are discarded, deg.
pub const DEFAULT_MIN_AMPLITUDE_DEG: f64 = 4.0;
/// Saccades shorter than this are discarded, ms.
pub const DEFAULT_MIN_DURATION_MS: f64 = 6.0;

/// Invalid runs up to this many samples are bridged by interpolation;
/// longer runs split the recording.
const MAX_INTERPOLATED_GAP: usize = 2;

/// Sample intervals may wobble by at most this much, ms.
const DT_UNIFORMITY_EPS: f64 = 1e-9;

const RECORDING_HEADER: &str = "timestamp_ms,position_deg,valid";

/// One recorded gaze sample. `valid` is false for tracker dropouts and
/// blinks; such samples carry no usable position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordingSample {
    pub t_ms: f64,
    pub position_deg: f64,
    pub valid: bool,
}

/// One extracted saccade on a uniform sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SaccadeTrajectory {
    pub saccade_id: usize,
    pub dt_ms: f64,
    pub onset_ms: f64,
    pub positions_deg: Vec<f64>,
}

impl SaccadeTrajectory {
    pub fn new(
        saccade_id: usize,
        dt_ms: f64,
        onset_ms: f64,
        positions_deg: Vec<f64>,
    ) -> Result<Self> {
        if positions_deg.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "saccade {saccade_id} has {} samples, need at least 2",
                positions_deg.len()
            )));
        }
        if !dt_ms.is_finite() || dt_ms <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "saccade {saccade_id} has invalid sample interval {dt_ms}"
            )));
        }
        if positions_deg.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "saccade {saccade_id} has non-finite positions"
            )));
        }
        Ok(Self {
            saccade_id,
            dt_ms,
            onset_ms,
            positions_deg,
        })
    }

    pub fn len(&self) -> usize {
        self.positions_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_deg.is_empty()
    }

    /// Signed displacement, first sample to last, deg.
    pub fn displacement_deg(&self) -> f64 {
        self.positions_deg.last().unwrap() - self.positions_deg.first().unwrap()
    }

    /// Magnitude of the displacement, deg.
    pub fn amplitude_deg(&self) -> f64 {
        self.displacement_deg().abs()
    }

    /// Time spanned by the samples, ms.
    pub fn duration_ms(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt_ms
    }
}

/// Parse a recording CSV: header `timestamp_ms,position_deg,valid`, then
/// one sample per row. Invalid-flagged samples are kept and marked; the
/// cleaning pass decides what to do with them. Timestamps must increase
/// strictly.
pub fn parse_recording<R: BufRead>(reader: R) -> Result<Vec<RecordingSample>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty recording, expected a header line".into()))?
        .map_err(Error::Io)?;
    if header.trim_end_matches('\r').trim() != RECORDING_HEADER {
        return Err(Error::Format(format!(
            "bad header `{}`, expected `{RECORDING_HEADER}`",
            header.trim_end()
        )));
    }

    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(Error::Io)?;
        let line = line.trim_end_matches('\r');
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        let parse_num = |field: &str, what: &str| -> Result<f64> {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse {what} `{}`", field.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("{what} `{}` is not finite", field.trim()),
                });
            }
            Ok(v)
        };
        let t_ms = parse_num(fields[0], "timestamp")?;
        let position_deg = parse_num(fields[1], "position")?;
        let valid = match fields[2].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("validity flag must be 0 or 1, got `{other}`"),
                })
            }
        };
        if let Some(prev) = samples.last() {
            let prev: &RecordingSample = prev;
            if t_ms <= prev.t_ms {
                return Err(Error::Format(format!(
                    "timestamps must increase strictly: {} after {} at line {line_no}",
                    t_ms, prev.t_ms
                )));
            }
        }
        samples.push(RecordingSample {
            t_ms,
            position_deg,
            valid,
        });
    }
    Ok(samples)
}

/// Remove tracking artifacts. Invalid runs short enough to bridge
/// (at most [`MAX_INTERPOLATED_GAP`] samples with valid neighbors on both
/// sides) are filled by linear interpolation; longer or edge runs split the
/// recording into separate segments.
pub fn clean(samples: &[RecordingSample]) -> Vec<Vec<RecordingSample>> {
    let mut segments: Vec<Vec<RecordingSample>> = Vec::new();
    let mut current: Vec<RecordingSample> = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        if samples[i].valid {
            current.push(samples[i]);
            i += 1;
            continue;
        }
        let run_start = i;
        while i < samples.len() && !samples[i].valid {
            i += 1;
        }
        let run_len = i - run_start;
        let has_left = !current.is_empty();
        let has_right = i < samples.len();
        if run_len <= MAX_INTERPOLATED_GAP && has_left && has_right {
            let left = *current.last().unwrap();
            let right = samples[i];
            for s in &samples[run_start..i] {
                let frac = (s.t_ms - left.t_ms) / (right.t_ms - left.t_ms);
                current.push(RecordingSample {
                    t_ms: s.t_ms,
                    position_deg: left.position_deg
                        + frac * (right.position_deg - left.position_deg),
                    valid: true,
                });
            }
        } else if has_left {
            segments.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        segments.push(current);
    }
    segments
}

/// Sample velocities in deg/s: central differences in the interior,
/// one-sided at the ends.
pub fn compute_velocity(positions_deg: &[f64], dt_ms: f64) -> Result<Vec<f64>> {
    let n = positions_deg.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "velocity needs at least 2 samples, got {n}"
        )));
    }
    if !dt_ms.is_finite() || dt_ms <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sample interval must be positive, got {dt_ms}"
        )));
    }
    // deg per ms -> deg per s.
    let scale = 1000.0;
    let mut v = Vec::with_capacity(n);
    v.push((positions_deg[1] - positions_deg[0]) / dt_ms * scale);
    for k in 1..n - 1 {
        v.push((positions_deg[k + 1] - positions_deg[k - 1]) / (2.0 * dt_ms) * scale);
    }
    v.push((positions_deg[n - 1] - positions_deg[n - 2]) / dt_ms * scale);
    Ok(v)
}

/// Velocity-threshold sample class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleClass {
    Fixation,
    Saccade,
}

/// Classify each sample: saccade iff |velocity| exceeds the threshold
/// strictly; a sample exactly at the threshold is fixation.
pub fn classify_ivt(velocities_deg_s: &[f64], threshold_deg_s: f64) -> Vec<SampleClass> {
    velocities_deg_s
        .iter()
        .map(|v| {
            if v.abs() > threshold_deg_s {
                SampleClass::Saccade
            } else {
                SampleClass::Fixation
            }
        })
        .collect()
}

/// Cut each maximal saccade-labeled run into a [`SaccadeTrajectory`], ids
/// 1-based in temporal order. Runs of a single sample cannot satisfy the
/// two-sample minimum and are dropped. The sample grid must be uniform.
pub fn extract_saccades(
    samples: &[RecordingSample],
    labels: &[SampleClass],
) -> Result<Vec<SaccadeTrajectory>> {
    if samples.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} samples",
            labels.len(),
            samples.len()
        )));
    }
    if samples.len() < 2 {
        return Ok(Vec::new());
    }
    let dt = samples[1].t_ms - samples[0].t_ms;
    for w in samples.windows(2) {
        if ((w[1].t_ms - w[0].t_ms) - dt).abs() > DT_UNIFORMITY_EPS {
            return Err(Error::Format(format!(
                "non-uniform sample interval: {} vs {}",
                w[1].t_ms - w[0].t_ms,
                dt
            )));
        }
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] != SampleClass::Saccade {
            i += 1;
            continue;
        }
        let start = i;
        while i < labels.len() && labels[i] == SampleClass::Saccade {
            i += 1;
        }
        if i - start >= 2 {
            out.push(SaccadeTrajectory::new(
                out.len() + 1,
                dt,
                samples[start].t_ms,
                samples[start..i].iter().map(|s| s.position_deg).collect(),
            )?);
        }
    }
    Ok(out)
}

/// Keep saccades at or above both quality thresholds.
pub fn filter_saccades(
    saccades: Vec<SaccadeTrajectory>,
    min_amplitude_deg: f64,
    min_duration_ms: f64,
) -> Vec<SaccadeTrajectory> {
    saccades
        .into_iter()
        .filter(|s| s.amplitude_deg() >= min_amplitude_deg && s.duration_ms() >= min_duration_ms)
        .collect()
}

/// Full detection pipeline: clean, then per segment compute velocity,
/// classify, extract; finally filter and renumber ids 1..N so downstream
/// reports stay contiguous.
pub fn detect_saccades(
    samples: &[RecordingSample],
    ivt_threshold_deg_s: f64,
    min_amplitude_deg: f64,
    min_duration_ms: f64,
) -> Result<Vec<SaccadeTrajectory>> {
    let mut all = Vec::new();
    for segment in clean(samples) {
        if segment.len() < 2 {
            continue;
        }
        let positions: Vec<f64> = segment.iter().map(|s| s.position_deg).collect();
        let dt = segment[1].t_ms - segment[0].t_ms;
        let velocities = compute_velocity(&positions, dt)?;
        let labels = classify_ivt(&velocities, ivt_threshold_deg_s);
        all.extend(extract_saccades(&segment, &labels)?);
    }
    let mut kept = filter_saccades(all, min_amplitude_deg, min_duration_ms);
    for (i, s) in kept.iter_mut().enumerate() {
        s.saccade_id = i + 1;
    }
    Ok(kept)
}
