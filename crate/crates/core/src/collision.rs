//! Looming-sensitive collision detector and the detection-and-avoidance
//! case study built on it.

use serde::{Deserialize, Serialize};

use crate::arena::{cast_ray, run_navigation, ArenaConfig, Controller, Event, EventKind, Trajectory};
use crate::avdm::AvdmParams;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::profiler::DensityMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollisionParams {
    /// Potential level a frame must exceed to count as a spike.
    pub spike_threshold: f64,
    /// Consecutive spikes needed to trigger avoidance.
    pub n_spikes: usize,
    /// Weight of the delayed, blurred excitation subtracted as inhibition.
    pub inhibition_gain: f64,
    /// Gain applied to the summed activity before the sigmoid.
    pub sensitivity: f64,
    /// Per-frame persistence of the summed activity, in [0, 1).
    pub decay: f64,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams {
            spike_threshold: 0.9,
            n_spikes: 3,
            inhibition_gain: 0.7,
            sensitivity: 160.0,
            decay: 0.0,
        }
    }
}

impl CollisionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.spike_threshold > 0.0 && self.spike_threshold < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "spike_threshold must lie in (0, 1), got {}",
                self.spike_threshold
            )));
        }
        if self.n_spikes == 0 {
            return Err(Error::InvalidArgument("n_spikes must be at least 1".into()));
        }
        if !(self.inhibition_gain >= 0.0) || !(self.sensitivity > 0.0) {
            return Err(Error::InvalidArgument(
                "inhibition_gain must be >= 0 and sensitivity > 0".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(Error::InvalidArgument(format!("decay must lie in [0, 1), got {}", self.decay)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionOutput {
    /// Membrane potential in [0, 1].
    pub potential: f64,
    pub spike: bool,
    /// Set on the frame completing `n_spikes` consecutive spikes.
    pub trigger: bool,
}

/// Frame-by-frame looming detector state.
#[derive(Debug, Clone)]
pub struct CollisionModel {
    width: usize,
    height: usize,
    params: CollisionParams,
    prev_frame: Option<Vec<f64>>,
    prev_excitation: Option<Vec<f64>>,
    activity: f64,
    run: usize,
}

impl CollisionModel {
    pub fn new(width: usize, height: usize, params: CollisionParams) -> Result<Self> {
        params.validate()?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("frame dimensions must be positive".into()));
        }
        Ok(CollisionModel {
            width,
            height,
            params,
            prev_frame: None,
            prev_excitation: None,
            activity: 0.0,
            run: 0,
        })
    }

    pub fn params(&self) -> &CollisionParams {
        &self.params
    }

    pub fn reset(&mut self) {
        self.prev_frame = None;
        self.prev_excitation = None;
        self.activity = 0.0;
        self.run = 0;
    }

    pub fn step(&mut self, frame: &Frame) -> Result<CollisionOutput> {
        if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                got_w: frame.width(),
                got_h: frame.height(),
            });
        }
        let current: Vec<f64> = frame.pixels().iter().map(|&p| p as f64).collect();
        let Some(prev) = self.prev_frame.replace(current) else {
            return Ok(CollisionOutput {
                potential: 0.0,
                spike: false,
                trigger: false,
            });
        };
        let current = self.prev_frame.as_ref().unwrap();
        let excitation: Vec<f64> = current.iter().zip(&prev).map(|(a, b)| (a - b).abs()).collect();
        let sum = match &self.prev_excitation {
            Some(old) => {
                let inhibition = blur3(old, self.width, self.height);
                excitation
                    .iter()
                    .zip(&inhibition)
                    .map(|(e, i)| (e - self.params.inhibition_gain * i).max(0.0))
                    .sum::<f64>()
            }
            None => excitation.iter().sum(),
        };
        self.prev_excitation = Some(excitation);
        let normalised = sum / (self.width * self.height) as f64;
        self.activity = self.params.decay * self.activity + (1.0 - self.params.decay) * normalised;
        let potential = sigmoid(self.params.sensitivity * self.activity);
        let spike = potential > self.params.spike_threshold;
        self.run = if spike { self.run + 1 } else { 0 };
        let trigger = spike && self.run % self.params.n_spikes == 0;
        Ok(CollisionOutput {
            potential,
            spike,
            trigger,
        })
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// 3x3 box blur with edge clamping.
fn blur3(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            let mut n = 0.0;
            for yy in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for xx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    acc += src[yy * w + xx];
                    n += 1.0;
                }
            }
            out[y * w + x] = acc / n;
        }
    }
    out
}

/// Runs the detector over a fixed frame sequence without any reset.
pub fn collision_model_step(frames: &[Frame], params: &CollisionParams) -> Result<Vec<CollisionOutput>> {
    let Some(first) = frames.first() else {
        return Ok(Vec::new());
    };
    let mut model = CollisionModel::new(first.width(), first.height(), params.clone())?;
    frames.iter().map(|f| model.step(f)).collect()
}

/// Avoidance or crash event from a case-study run.
pub type AvoidanceEvent = Event;

/// Avoidances over all decisive events; `None` when there are none.
pub fn compute_sr(events: &[AvoidanceEvent]) -> Option<f64> {
    let avoid = events.iter().filter(|e| e.kind == EventKind::Avoidance).count();
    let crash = events.iter().filter(|e| e.kind == EventKind::Crash).count();
    (avoid + crash > 0).then(|| avoid as f64 / (avoid + crash) as f64)
}

/// Distance from the event position to the wall along its heading.
pub fn compute_dtc(event: &AvoidanceEvent, config: &ArenaConfig) -> f64 {
    cast_ray(config.side_m, event.x, event.y, event.heading).0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtcStats {
    pub mean: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub values: Vec<f64>,
}

impl DtcStats {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        values.shrink_to_fit();
        Some(DtcStats {
            mean,
            min: sorted[0],
            median,
            max: sorted[n - 1],
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub wall_tf_hz: f64,
    pub duration_s: f64,
    pub avoidances: usize,
    pub crashes: usize,
    pub sr: Option<f64>,
    pub dtc: Option<DtcStats>,
    pub events: Vec<AvoidanceEvent>,
    /// Event counts by position; cell means hold DTC for avoidances and 0 for crashes.
    pub event_map: DensityMap,
}

impl CaseStudyReport {
    pub fn events_csv(&self) -> String {
        let mut out = String::from("t,x,y,heading,kind,dtc_m\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.t,
                e.x,
                e.y,
                e.heading,
                e.kind.as_str(),
                e.dtc_m.map(|d| d.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

/// Folds a collision-controlled trajectory into a report.
pub fn report_from_trajectory(
    traj: &Trajectory,
    config: &ArenaConfig,
    wall_tf_hz: f64,
    cells: usize,
) -> Result<CaseStudyReport> {
    let events: Vec<AvoidanceEvent> = traj
        .events()
        .filter(|e| matches!(e.kind, EventKind::Avoidance | EventKind::Crash))
        .copied()
        .collect();
    let mut event_map = DensityMap::new(cells, config.side_m)?;
    let mut dtcs = Vec::new();
    for e in &events {
        let d = match e.kind {
            EventKind::Avoidance => {
                let d = e.dtc_m.unwrap_or_else(|| compute_dtc(e, config));
                dtcs.push(d);
                d
            }
            _ => 0.0,
        };
        event_map.add(e.x, e.y, d);
    }
    let avoidances = dtcs.len();
    Ok(CaseStudyReport {
        wall_tf_hz,
        duration_s: traj.samples.len() as f64 / traj.sample_rate_hz,
        avoidances,
        crashes: events.len() - avoidances,
        sr: compute_sr(&events),
        dtc: DtcStats::from_values(dtcs),
        events,
        event_map,
    })
}

/// Closed-loop run with the collision detector steering the robot.
pub fn run_case_study(
    config: &ArenaConfig,
    wall_tf: f64,
    duration_s: f64,
    params: &CollisionParams,
    avdm_params: &AvdmParams,
    seed: u64,
) -> Result<CaseStudyReport> {
    if !(duration_s > 0.0) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration_s}")));
    }
    let cfg = ArenaConfig {
        wall_tf_hz: wall_tf,
        ..config.clone()
    };
    let traj = run_navigation(&cfg, duration_s, &Controller::Collision(params.clone()), seed, avdm_params)?;
    report_from_trajectory(&traj, &cfg, wall_tf, crate::profiler::DEFAULT_CELLS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn event(kind: EventKind, x: f64, y: f64, heading: f64) -> AvoidanceEvent {
        Event {
            kind,
            t: 0.0,
            x,
            y,
            heading,
            dtc_m: None,
        }
    }

    fn noise_frames(seed: u64, n: usize, amp: f64) -> Vec<Frame> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let a = amp * rng.gen::<f64>();
                Frame::from_fn(12, 10, |_, _| 0.5 + a * (rng.gen::<f64>() - 0.5)).unwrap()
            })
            .collect()
    }

    #[test]
    fn sr_definition() {
        let mut events = vec![event(EventKind::Avoidance, 0.5, 0.5, 0.0); 9];
        events.push(event(EventKind::Crash, 0.03, 0.5, 0.0));
        assert!((compute_sr(&events).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(compute_sr(&[]), None);
        assert_eq!(compute_sr(&[event(EventKind::Turn, 0.5, 0.5, 0.0)]), None);
    }

    #[test]
    fn dtc_from_center_is_half_side() {
        let cfg = ArenaConfig::default();
        for h in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let e = event(EventKind::Avoidance, 0.5, 0.5, h * std::f64::consts::PI);
            assert!((compute_dtc(&e, &cfg) - 0.5).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn dtc_matches_marching(x in 0.0..1.0f64, y in 0.0..1.0f64, h in 0.0..std::f64::consts::TAU) {
            let cfg = ArenaConfig::default();
            let e = event(EventKind::Avoidance, x, y, h);
            let (dx, dy) = (h.cos(), h.sin());
            let mut d = 0.0f64;
            loop {
                let (px, py) = (x + (d + 1e-3) * dx, y + (d + 1e-3) * dy);
                if !(0.0..=1.0).contains(&px) || !(0.0..=1.0).contains(&py) {
                    break;
                }
                d += 1e-3;
            }
            prop_assert!((compute_dtc(&e, &cfg) - d).abs() <= 2e-3);
        }

        #[test]
        fn raising_threshold_removes_spikes(seed in any::<u64>(), lo in 0.55..0.95f64, gap in 0.0..0.04f64, n in 1usize..4) {
            let frames = noise_frames(seed, 40, 0.3);
            let p1 = CollisionParams { spike_threshold: lo, n_spikes: n, sensitivity: 20.0, ..Default::default() };
            let p2 = CollisionParams { spike_threshold: lo + gap, ..p1.clone() };
            let a = collision_model_step(&frames, &p1).unwrap();
            let b = collision_model_step(&frames, &p2).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(x.potential, y.potential);
                prop_assert!(!y.spike || x.spike);
            }
            // Each supra-threshold run at the higher threshold lies inside one
            // at the lower threshold, so it can only trigger later.
            let first = |o: &[CollisionOutput]| o.iter().position(|s| s.trigger);
            match (first(&a), first(&b)) {
                (None, Some(_)) => prop_assert!(false, "trigger appeared at higher threshold"),
                (Some(ta), Some(tb)) => prop_assert!(tb >= ta),
                _ => {}
            }
        }
    }

    #[test]
    fn static_sequence_sits_at_baseline() {
        let frames = vec![Frame::filled(10, 10, 0.4).unwrap(); 20];
        let out = collision_model_step(&frames, &CollisionParams::default()).unwrap();
        assert_eq!(out[0].potential, 0.0);
        for o in &out[1..] {
            assert_eq!(o.potential, 0.5);
            assert!(!o.spike && !o.trigger);
        }
    }

    #[test]
    fn trigger_needs_consecutive_spikes() {
        let params = CollisionParams {
            n_spikes: 3,
            inhibition_gain: 0.0,
            ..Default::default()
        };
        let frames: Vec<Frame> = (0..8).map(|k| Frame::filled(4, 4, if k % 2 == 0 { 0.1 } else { 0.9 }).unwrap()).collect();
        let out = collision_model_step(&frames, &params).unwrap();
        let triggers: Vec<usize> = out.iter().enumerate().filter(|(_, o)| o.trigger).map(|(i, _)| i).collect();
        assert!(out[1..].iter().all(|o| o.spike));
        assert_eq!(triggers, vec![3, 6]);
    }

    #[test]
    fn params_validated() {
        for p in [
            CollisionParams { spike_threshold: 1.0, ..Default::default() },
            CollisionParams { spike_threshold: 0.0, ..Default::default() },
            CollisionParams { n_spikes: 0, ..Default::default() },
            CollisionParams { decay: 1.0, ..Default::default() },
            CollisionParams { sensitivity: 0.0, ..Default::default() },
        ] {
            assert!(CollisionModel::new(4, 4, p).is_err());
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut m = CollisionModel::new(4, 4, CollisionParams::default()).unwrap();
        assert!(m.step(&Frame::filled(5, 4, 0.5).unwrap()).is_err());
    }

    #[test]
    fn report_counts_fold_events() {
        let cfg = ArenaConfig::default();
        let mut traj = Trajectory {
            arena_side_m: 1.0,
            sample_rate_hz: 33.0,
            speed_mps: 0.08,
            samples: Vec::new(),
        };
        let resp = crate::avdm::AvdmResponse {
            r: 0.0,
            lambda: 1.0,
            c_hat: 1.0,
            omega: 0.0,
            score: 0.0,
            warmup: false,
            degenerate: false,
        };
        for (k, kind) in [EventKind::Avoidance, EventKind::Avoidance, EventKind::Crash, EventKind::Avoidance]
            .into_iter()
            .enumerate()
        {
            traj.samples.push(crate::arena::TrajectorySample {
                t: k as f64,
                x: 0.5,
                y: 0.5,
                heading: 0.0,
                response: resp,
                potential: Some(0.5),
                events: vec![event(kind, 0.5, 0.5, 0.0)],
            });
        }
        let r = report_from_trajectory(&traj, &cfg, 0.0, 10).unwrap();
        assert_eq!((r.avoidances, r.crashes), (3, 1));
        assert_eq!(r.sr, Some(0.75));
        assert_eq!(r.event_map.total_count(), 4);
        assert!((r.dtc.unwrap().mean - 0.5).abs() < 1e-12);
    }
}
