//! Subcommand implementations. Everything except the estimation batch
//! itself runs single threaded; outputs are deterministic for fixed
//! inputs and flags, with wall-clock figures confined to summaries.

use crate::{BenchArgs, CliError, DetectArgs, EstimateArgs, SimulateArgs};
use opcfit_core::{
    accuracy, benchmark, detect_saccades, estimate_batch, format_benchmark_text, lookup_model,
    parse_recording, simulate, synthetic_batch, write_benchmark_csv, write_results_csv,
    EstimationConfig, SaccadeTrajectory,
};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

fn positive(flag: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::InvalidArgument(format!(
            "--{flag} must be positive, got {v}"
        )))
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Write `text` to the given path, or standard output when none is given.
fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn parse_override(pair: &str) -> Result<(&str, f64), CliError> {
    let (name, raw) = pair.split_once('=').ok_or_else(|| {
        CliError::InvalidArgument(format!("override `{pair}` is not NAME=VALUE"))
    })?;
    let value: f64 = raw.trim().parse().map_err(|_| {
        CliError::InvalidArgument(format!("override `{pair}` has a non-numeric value"))
    })?;
    Ok((name.trim(), value))
}

fn estimation_config(
    tol_x: f64,
    tol_f: f64,
    max_iters: Option<usize>,
    time_budget_s: f64,
) -> Result<EstimationConfig, CliError> {
    positive("tol-x", tol_x)?;
    positive("tol-f", tol_f)?;
    positive("time-budget", time_budget_s)?;
    if max_iters == Some(0) {
        return Err(CliError::InvalidArgument(
            "--max-iters must be positive".into(),
        ));
    }
    Ok(EstimationConfig {
        tol_x,
        tol_f,
        max_iterations: max_iters,
        time_budget: Duration::from_secs_f64(time_budget_s),
        ..EstimationConfig::default()
    })
}

/// Parse and segment every input file; saccades keep file order and are
/// renumbered 1..N across the whole set.
fn load_saccades(
    inputs: &[PathBuf],
    ivt_threshold: f64,
    min_amplitude: f64,
    min_duration: f64,
) -> Result<Vec<SaccadeTrajectory>, CliError> {
    positive("ivt-threshold", ivt_threshold)?;
    positive("min-amplitude", min_amplitude)?;
    positive("min-duration", min_duration)?;
    let mut saccades = Vec::new();
    for path in inputs {
        let samples = parse_recording(open_input(path)?)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for mut s in detect_saccades(&samples, ivt_threshold, min_amplitude, min_duration)? {
            s.saccade_id = saccades.len() + 1;
            saccades.push(s);
        }
    }
    Ok(saccades)
}

pub(crate) fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    positive("duration", args.duration)?;
    positive("dt", args.dt)?;
    if !args.amplitude.is_finite() || !args.initial_theta.is_finite() {
        return Err(CliError::InvalidArgument(
            "--amplitude and --initial-theta must be finite".into(),
        ));
    }
    let spec = lookup_model(&args.model)?;
    let mut opc = spec.default_opc();
    for pair in &args.set {
        let (name, value) = parse_override(pair)?;
        opc.set(&spec, name, value)?;
    }
    if let Some((i, v)) = opc.first_violation(&spec) {
        return Err(CliError::InvalidArgument(format!(
            "non-physical parameter: `{}` = {v} is below its floor {}",
            spec.parameter_names()[i],
            spec.floor(i)
        )));
    }

    let traj = simulate(
        &spec,
        opc.values(),
        args.amplitude,
        args.duration,
        args.dt,
        args.initial_theta,
    )?;
    let mut csv = String::from("t_ms,position_deg,velocity_dps\n");
    for k in 0..traj.len() {
        csv.push_str(&format!(
            "{:.6},{:.6},{:.6}\n",
            traj.t_ms(k),
            traj.position_deg[k],
            traj.velocity_deg_s[k]
        ));
    }
    write_output(args.out.as_deref(), &csv)
}

pub(crate) fn cmd_detect(args: &DetectArgs) -> Result<(), CliError> {
    let saccades = load_saccades(
        std::slice::from_ref(&args.input),
        args.ivt_threshold,
        args.min_amplitude,
        args.min_duration,
    )?;
    let mut csv = String::from("saccade_id,onset_ms,duration_ms,amplitude_deg,n_samples\n");
    for s in &saccades {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{}\n",
            s.saccade_id,
            s.onset_ms,
            s.duration_ms(),
            s.amplitude_deg(),
            s.len()
        ));
    }
    write_output(args.out.as_deref(), &csv)
}

pub(crate) fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    if args.workers == 0 {
        return Err(CliError::InvalidArgument(
            "--workers must be at least 1".into(),
        ));
    }
    let spec = lookup_model(&args.model)?;
    let config = estimation_config(args.tol_x, args.tol_f, args.max_iters, args.time_budget)?;
    let saccades = load_saccades(
        &args.inputs,
        args.ivt_threshold,
        args.min_amplitude,
        args.min_duration,
    )?;
    if saccades.is_empty() {
        return Err(CliError::EmptyPipeline(
            "no saccades survived detection and filtering".into(),
        ));
    }

    let started = Instant::now();
    let results = estimate_batch(&saccades, &spec, &config, args.workers)?;
    let wall_s = started.elapsed().as_secs_f64();

    let mut estimated = Vec::new();
    let mut errors = Vec::new();
    let mut sample_counts = Vec::new();
    for (result, saccade) in results.iter().zip(&saccades) {
        if result.is_failed() {
            eprintln!("saccade {} failed: {}", result.saccade_id, result.exit_reason);
        } else {
            errors.push(result.opt_err);
            sample_counts.push(saccade.len());
            estimated.push(result.clone());
        }
    }
    if estimated.is_empty() {
        return Err(CliError::EmptyPipeline("no saccades were estimated".into()));
    }

    let file = File::create(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let mut sink = BufWriter::new(file);
    write_results_csv(&estimated, &mut sink)?;
    sink.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    println!("n_saccades: {}", estimated.len());
    println!("wall_time_s: {wall_s:.3}");
    println!("throughput_per_s: {:.3}", estimated.len() as f64 / wall_s);
    println!(
        "mean_residual_deg: {:.6}",
        accuracy(&errors, &sample_counts)?
    );
    Ok(())
}

pub(crate) fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.workers.is_empty() {
        return Err(CliError::InvalidArgument(
            "--workers needs at least one count".into(),
        ));
    }
    if args.workers.contains(&0) {
        return Err(CliError::InvalidArgument(
            "--workers counts must be at least 1".into(),
        ));
    }
    let spec = lookup_model(&args.model)?;
    let config = estimation_config(args.tol_x, args.tol_f, args.max_iters, args.time_budget)?;

    let saccades = match args.synthetic {
        Some(0) => {
            return Err(CliError::InvalidArgument(
                "--synthetic must be positive".into(),
            ))
        }
        Some(n) => {
            positive("amplitude", args.amplitude.abs())?;
            positive("duration", args.duration)?;
            positive("dt", args.dt)?;
            synthetic_batch(&spec, n, args.amplitude, args.duration, args.dt)?
        }
        None if args.inputs.is_empty() => {
            return Err(CliError::InvalidArgument(
                "provide recording files or --synthetic N".into(),
            ))
        }
        None => load_saccades(
            &args.inputs,
            args.ivt_threshold,
            args.min_amplitude,
            args.min_duration,
        )?,
    };
    if saccades.is_empty() {
        return Err(CliError::EmptyPipeline(
            "no saccades survived detection and filtering".into(),
        ));
    }

    let stats = benchmark(&saccades, &spec, &config, &args.workers)?;
    print!("{}", format_benchmark_text(&stats));
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        write_benchmark_csv(&stats, &mut buf)?;
        std::fs::write(path, buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
