//! Subcommand implementations. Data goes to files in the output directory;
//! diagnostics go to stderr.

use std::fs;
use std::path::Path;

use serde::Serialize;
use vdc_core::arena::{run_approach, run_navigation, ArenaConfig, Controller, Trajectory, WallPattern};
use vdc_core::avdm::{fit_params, write_residual_csv, AvdmParams, FitSample};
use vdc_core::collision::report_from_trajectory;
use vdc_core::metric::{calibration_samples, check_monotonicity, sweep_frequencies};
use vdc_core::profiler::{build_histogram, build_map, region_means, render_figures, ThresholdHistogram};
use vdc_core::stimulus::{
    check_nyquist, drift_texture, generate_grating, load_image, natural_texture, save_video, Direction,
};
use vdc_core::Error;

use crate::config::*;
use crate::{ApproachArgs, ArenaArgs, CollisionArgs, FitArgs, GenStimulusArgs, NavigateArgs, SweepArgs};

/// Validation failures of a resolved config are usage errors; anything
/// else raised by the library while running is a runtime error.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidArgument(_)
        | Error::Nyquist { .. }
        | Error::LuminanceRange { .. }
        | Error::Parse { .. } => usage(e),
        other => runtime(other),
    }
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, data).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(runtime)?;
    write(path, text + "\n")
}

pub fn gen_stimulus(a: &GenStimulusArgs) -> Result<(), CliError> {
    let mut cfg: GenStimulusConfig = load(a.common.config.as_deref())?;
    if let Some(t) = &a.texture {
        cfg.texture = t.clone();
    }
    let g = &mut cfg.grating;
    if let Some(v) = a.sf {
        g.sf_upc = v;
    }
    if let Some(v) = a.tf {
        g.tf_hz = v;
    }
    if let Some(v) = a.contrast {
        g.contrast = v;
    }
    if let Some(v) = a.mean {
        g.mean_luminance = v;
    }
    if let Some(v) = a.phase {
        g.phase0 = v;
    }
    if let Some(v) = a.fov {
        g.fov_deg = v;
    }
    if a.reverse {
        g.direction = Direction::Reverse;
    }
    if let Some(v) = a.duration {
        cfg.duration_s = v;
    }
    if let Some(v) = a.rate {
        cfg.sample_rate = v;
    }
    if let Some(v) = a.width {
        cfg.width = v;
    }
    if let Some(v) = a.height {
        cfg.height = v;
    }
    if let Some(v) = a.cycle_px {
        cfg.cycle_px = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }

    check_nyquist(cfg.grating.tf_hz, cfg.sample_rate).map_err(classify)?;
    let video = match cfg.texture.as_str() {
        "grating" => generate_grating(&cfg.grating, cfg.duration_s, cfg.sample_rate, cfg.width, cfg.height),
        other => {
            let texture = if other == "natural" {
                natural_texture(cfg.width, cfg.height, cfg.seed, cfg.grating.contrast)
            } else {
                load_image(other)
            }
            .map_err(classify)?;
            let tf = cfg.grating.tf_hz * cfg.grating.direction.sign();
            let cycle = if tf < 0.0 { -cfg.cycle_px } else { cfg.cycle_px };
            drift_texture(&texture, tf.abs(), cycle.abs(), cfg.duration_s, cfg.sample_rate).map(|v| {
                if cycle < 0.0 {
                    reverse_drift(v)
                } else {
                    v
                }
            })
        }
    }
    .map_err(classify)?;

    write_resolved(&cfg, &a.common.out)?;
    save_video(&video, a.common.out.join("stimulus.vdcraw")).map_err(runtime)?;
    eprintln!("wrote {} frames to {}", video.len(), a.common.out.display());
    Ok(())
}

/// Mirrors a forward drift into the opposite direction.
fn reverse_drift(v: vdc_core::VideoSequence) -> vdc_core::VideoSequence {
    let rate = v.sample_rate();
    let frames = v
        .frames()
        .iter()
        .map(|f| {
            let w = f.width();
            vdc_core::Frame::from_fn(w, f.height(), |x, y| f.get(w - 1 - x, y) as f64)
                .expect("mirrored frame stays in range")
        })
        .collect();
    vdc_core::VideoSequence::new(frames, rate).expect("uniform frames")
}

pub fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    let mut cfg: SweepRunConfig = load(a.common.config.as_deref())?;
    if let Some(v) = &a.sf {
        cfg.sf_values = v.clone();
    }
    if let Some(v) = &a.tf {
        cfg.tf_values = v.clone();
    }
    if let Some(v) = a.rate {
        cfg.stimulus.sample_rate = v;
    }
    if let Some(v) = a.duration {
        cfg.stimulus.duration_s = v;
    }
    if let Some(v) = a.width {
        cfg.stimulus.width = v;
    }
    if let Some(v) = a.height {
        cfg.stimulus.height = v;
    }
    if let Some(p) = &a.params {
        cfg.params = load_params(p)?;
    }
    cfg.params.validate().map_err(classify)?;

    let grid = sweep_frequencies(&cfg.sf_values, &cfg.tf_values, &cfg.stimulus, &cfg.params).map_err(classify)?;
    let report = check_monotonicity(&grid);
    let out = &a.common.out;
    write_resolved(&cfg, out)?;
    write(&out.join("sweep.csv"), grid.to_csv())?;
    write(&out.join("monotonicity.txt"), report.to_text())?;
    write_json(&out.join("monotonicity.json"), &report)?;
    eprintln!("{}", report.to_text().trim_end());
    Ok(())
}

fn read_samples(path: &Path) -> Result<Vec<FitSample>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| usage(format!("{}: empty file", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| usage(format!("{}: missing column {name}", path.display())))
    };
    let idx = [col("omega_true")?, col("lambda")?, col("c_hat")?, col("r")?];
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |i: usize| {
                fields
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| usage(format!("{}: bad value on data line {}", path.display(), k + 1)))
            };
            Ok(FitSample {
                omega_true: get(idx[0])?,
                lambda: get(idx[1])?,
                c_hat: get(idx[2])?,
                r: get(idx[3])?,
            })
        })
        .collect()
}

pub fn fit(a: &FitArgs) -> Result<(), CliError> {
    let mut cfg: FitRunConfig = load(a.common.config.as_deref())?;
    if let Some(p) = &a.samples {
        cfg.samples = Some(p.clone());
        cfg.calibrate = false;
    }
    if a.calibrate {
        cfg.calibrate = true;
        cfg.samples = None;
    }
    if let Some(v) = &a.sf {
        cfg.sf_values = v.clone();
    }
    if let Some(v) = &a.tf {
        cfg.tf_values = v.clone();
    }
    if let Some(v) = a.rate {
        cfg.stimulus.sample_rate = v;
    }
    if let Some(v) = a.duration {
        cfg.stimulus.duration_s = v;
    }
    if let Some(p) = &a.params {
        cfg.params = load_params(p)?;
    }
    cfg.params.validate().map_err(classify)?;

    let samples = match (&cfg.samples, cfg.calibrate) {
        (Some(p), _) => read_samples(p)?,
        (None, true) => {
            calibration_samples(&cfg.sf_values, &cfg.tf_values, &cfg.stimulus, &cfg.params).map_err(classify)?
        }
        (None, false) => return Err(usage("fit needs --samples FILE or --calibrate")),
    };
    let result = fit_params(&samples).map_err(classify)?;
    let fitted = AvdmParams {
        a_hat: result.a_hat,
        b_hat: result.b_hat,
        ..cfg.params.clone()
    };
    let out = &a.common.out;
    write_resolved(&cfg, out)?;
    fitted.save(out.join("params.toml")).map_err(runtime)?;
    write_residual_csv(&samples, &result, out.join("residuals.csv")).map_err(runtime)?;
    write_json(&out.join("fit.json"), &result)?;
    eprintln!("a = {}, b = {}, objective = {}", result.a_hat, result.b_hat, result.objective);
    Ok(())
}

fn apply_arena(arena: &mut ArenaConfig, params: &mut AvdmParams, a: &ArenaArgs) -> Result<(), CliError> {
    match a.wall.as_deref() {
        None => {}
        Some("grating") => {
            if !matches!(arena.wall, WallPattern::Grating { .. }) {
                arena.wall = WallPattern::grating();
            }
        }
        Some("natural") => {
            if !matches!(arena.wall, WallPattern::Natural { .. }) {
                arena.wall = WallPattern::natural();
            }
        }
        Some(other) => return Err(usage(format!("unknown wall kind {other:?}; use grating or natural"))),
    }
    if let Some(img) = &a.image {
        match &mut arena.wall {
            WallPattern::Natural { image, .. } => *image = Some(img.clone()),
            WallPattern::Grating { .. } => return Err(usage("--image needs --wall natural")),
        }
    }
    if let Some(tf) = a.tf {
        arena.wall_tf_hz = tf;
    }
    if let Some(p) = &a.params {
        *params = load_params(p)?;
    }
    arena.validate().map_err(classify)?;
    params.validate().map_err(classify)
}

fn write_trajectory(out: &Path, stem: &str, traj: &Trajectory) -> Result<(), CliError> {
    write(&out.join(format!("{stem}.csv")), traj.to_csv())?;
    write_json(&out.join(format!("{stem}.json")), traj)
}

#[derive(Serialize)]
struct ApproachSummary {
    repeat: usize,
    samples: usize,
    final_mean_score: Option<f64>,
}

/// Mean post-warm-up score over the last `span_m` metres of an approach.
fn final_mean(traj: &Trajectory, span_m: f64) -> Option<f64> {
    let last = traj.samples.last()?;
    let scores: Vec<f64> = traj
        .samples
        .iter()
        .filter(|s| !s.response.warmup && (s.x - last.x).hypot(s.y - last.y) <= span_m)
        .map(|s| s.response.score)
        .collect();
    (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
}

pub fn approach(a: &ApproachArgs) -> Result<(), CliError> {
    let mut cfg: ApproachRunConfig = load(a.common.config.as_deref())?;
    apply_arena(&mut cfg.arena, &mut cfg.params, &a.arena)?;
    if let Some(s) = a.arena.seed {
        cfg.seed = s;
    }
    if let Some(r) = a.repeats {
        cfg.repeats = r;
    }
    let runs = run_approach(&cfg.arena, cfg.arena.wall_tf_hz, cfg.repeats, cfg.seed, &cfg.params).map_err(classify)?;
    let out = &a.common.out;
    write_resolved(&cfg, out)?;
    let mut summary = String::from("repeat,samples,final_mean_score\n");
    let mut rows = Vec::new();
    for (k, traj) in runs.iter().enumerate() {
        write_trajectory(out, &format!("approach_{k:02}"), traj)?;
        let m = final_mean(traj, 0.2);
        summary.push_str(&format!(
            "{k},{},{}\n",
            traj.samples.len(),
            m.map(|v| v.to_string()).unwrap_or_default()
        ));
        rows.push(ApproachSummary {
            repeat: k,
            samples: traj.samples.len(),
            final_mean_score: m,
        });
    }
    write(&out.join("summary.csv"), summary)?;
    write_json(&out.join("summary.json"), &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct NavigateSummary {
    samples: usize,
    turns: usize,
    above_threshold: u64,
    wall_mean: Option<f64>,
    central_mean: Option<f64>,
    wall_to_central: Option<f64>,
    histogram: ThresholdHistogram,
}

pub fn navigate(a: &NavigateArgs) -> Result<(), CliError> {
    let mut cfg: NavigateRunConfig = load(a.common.config.as_deref())?;
    apply_arena(&mut cfg.arena, &mut cfg.params, &a.arena)?;
    if let Some(s) = a.arena.seed {
        cfg.seed = s;
    }
    if let Some(m) = a.minutes {
        cfg.duration_s = m * 60.0;
    }
    if let Some(c) = a.cells {
        cfg.cells = c;
    }
    if let Some(t) = a.threshold {
        cfg.threshold = t;
    }
    if !(cfg.duration_s > 0.0) {
        return Err(usage("duration must be positive"));
    }
    let traj = run_navigation(&cfg.arena, cfg.duration_s, &Controller::LightRing, cfg.seed, &cfg.params)
        .map_err(classify)?;
    let map = build_map(&traj, cfg.cells).map_err(classify)?;
    let hist = build_histogram(&traj, cfg.threshold, cfg.bin_width, cfg.bins).map_err(classify)?;
    let regions = region_means(&traj, 0.15, 0.2);
    let out = &a.common.out;
    write_resolved(&cfg, out)?;
    write_trajectory(out, "trajectory", &traj)?;
    render_figures(&map, &hist, out).map_err(runtime)?;
    write_json(
        &out.join("summary.json"),
        &NavigateSummary {
            samples: traj.samples.len(),
            turns: traj.events().count(),
            above_threshold: hist.total(),
            wall_mean: regions.wall,
            central_mean: regions.central,
            wall_to_central: regions.ratio(),
            histogram: hist,
        },
    )?;
    Ok(())
}

pub fn collision(a: &CollisionArgs) -> Result<(), CliError> {
    let mut cfg: CollisionRunConfig = load(a.common.config.as_deref())?;
    apply_arena(&mut cfg.arena, &mut cfg.params, &a.arena)?;
    if let Some(s) = a.arena.seed {
        cfg.seed = s;
    }
    if let Some(m) = a.minutes {
        cfg.duration_s = m * 60.0;
    }
    if let Some(c) = a.cells {
        cfg.cells = c;
    }
    if let Some(t) = &a.threshold {
        cfg.collision.spike_threshold = adjust(cfg.collision.spike_threshold, t)?;
    }
    cfg.collision.validate().map_err(classify)?;
    if !(cfg.duration_s > 0.0) {
        return Err(usage("duration must be positive"));
    }
    let traj = run_navigation(
        &cfg.arena,
        cfg.duration_s,
        &Controller::Collision(cfg.collision.clone()),
        cfg.seed,
        &cfg.params,
    )
    .map_err(classify)?;
    let report = report_from_trajectory(&traj, &cfg.arena, cfg.arena.wall_tf_hz, cfg.cells).map_err(classify)?;
    let out = &a.common.out;
    write_resolved(&cfg, out)?;
    write_trajectory(out, "trajectory", &traj)?;
    write(&out.join("events.csv"), report.events_csv())?;
    write_json(&out.join("report.json"), &report)?;
    let empty = ThresholdHistogram::new(0.0, 0.05, 10).map_err(runtime)?;
    let mut dtc_hist = empty;
    for d in report.dtc.iter().flat_map(|d| d.values.iter()) {
        dtc_hist.add(*d);
    }
    render_figures(&report.event_map, &dtc_hist, out).map_err(runtime)?;
    eprintln!(
        "avoidances {}, crashes {}, SR {}",
        report.avoidances,
        report.crashes,
        report.sr.map(|s| format!("{s:.3}")).unwrap_or_else(|| "undefined".into())
    );
    Ok(())
}
