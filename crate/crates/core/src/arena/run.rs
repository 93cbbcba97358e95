//! Open-loop approach and closed-loop navigation protocols.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arena::{boundary_turn, render_view, step_robot, ArenaConfig, RobotState, World};
use crate::avdm::{AvdmParams, AvdmResponse, AvdmState};
use crate::collision::{CollisionModel, CollisionParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// Light-ring turn.
    Turn,
    /// Collision model triggered an avoidance turn.
    Avoidance,
    /// Reached the wall clearance without a trigger.
    Crash,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Turn => "turn",
            EventKind::Avoidance => "avoidance",
            EventKind::Crash => "crash",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    /// Distance to the wall ahead when an avoidance triggers.
    pub dtc_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub response: AvdmResponse,
    /// Collision-model membrane potential, when that model is running.
    pub potential: Option<f64>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub arena_side_m: f64,
    pub sample_rate_hz: f64,
    pub speed_mps: f64,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.samples.iter().flat_map(|s| s.events.iter())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,heading,r,lambda,c_hat,omega,score,warmup,potential,event\n");
        for s in &self.samples {
            let r = &s.response;
            let events: Vec<&str> = s.events.iter().map(|e| e.kind.as_str()).collect();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.x,
                s.y,
                s.heading,
                r.r,
                r.lambda,
                r.c_hat,
                r.omega,
                r.score,
                u8::from(r.warmup),
                s.potential.map(|p| p.to_string()).unwrap_or_default(),
                events.join("|")
            )
            .unwrap();
        }
        out
    }

    /// Continuity: no consecutive samples further apart than one step of travel.
    pub fn max_step_excess(&self) -> f64 {
        let dt = 1.0 / self.sample_rate_hz;
        self.samples
            .windows(2)
            .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y) - self.speed_mps * dt)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Which closed-loop behaviour steers the robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Controller {
    /// Turn when crossing the light ring heading outward.
    LightRing,
    /// Turn when the looming detector fires; crash at the wall otherwise.
    Collision(CollisionParams),
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn model_for(world: &World, params: &AvdmParams) -> Result<AvdmState> {
    let cam = &world.config.camera;
    AvdmState::new(cam.width, cam.height, world.config.sample_rate_hz, cam.fov_deg, params)
}

/// Drives straight from the arena centre at the +x wall until the wall
/// clearance, once per repeat. Each repeat draws its own wall texture phase.
pub fn run_approach(
    config: &ArenaConfig,
    wall_tf: f64,
    repeats: usize,
    seed: u64,
    params: &AvdmParams,
) -> Result<Vec<Trajectory>> {
    (0..repeats)
        .map(|k| {
            let mut rng = seeded(seed, k as u64);
            let cfg = ArenaConfig {
                wall_tf_hz: wall_tf,
                wall_phase: rng.gen_range(0.0..std::f64::consts::TAU),
                ..config.clone()
            };
            let world = World::new(cfg)?;
            approach_once(&world, params)
        })
        .collect()
}

fn approach_once(world: &World, params: &AvdmParams) -> Result<Trajectory> {
    let cfg = &world.config;
    let dt = 1.0 / cfg.sample_rate_hz;
    let mut model = model_for(world, params)?;
    let mut robot = RobotState::at_center(cfg, 0.0);
    let mut samples = Vec::new();
    for n in 0.. {
        let t = n as f64 * dt;
        let frame = render_view(world, &robot, t)?;
        let response = model.step(&frame, params)?;
        samples.push(TrajectorySample {
            t,
            x: robot.x,
            y: robot.y,
            heading: robot.heading,
            response,
            potential: None,
            events: Vec::new(),
        });
        if robot.distance_ahead(cfg) <= cfg.wall_clearance_m + 1e-12 {
            break;
        }
        robot = step_robot(&robot, dt, cfg)?.0;
    }
    Ok(Trajectory {
        arena_side_m: cfg.side_m,
        sample_rate_hz: cfg.sample_rate_hz,
        speed_mps: cfg.speed_mps,
        samples,
    })
}

/// Closed-loop run: render, model step, controller decision, kinematic step.
///
/// Turns are instantaneous; the visual models are reset after each one, so
/// the following samples are flagged as warm-up.
pub fn run_navigation(
    config: &ArenaConfig,
    duration_s: f64,
    controller: &Controller,
    seed: u64,
    params: &AvdmParams,
) -> Result<Trajectory> {
    let world = World::new(config.clone())?;
    let cfg = &world.config;
    let dt = 1.0 / cfg.sample_rate_hz;
    let n_samples = (duration_s * cfg.sample_rate_hz).round().max(0.0) as usize;
    let mut rng = seeded(seed, u64::MAX);
    let mut robot = RobotState::at_center(cfg, rng.gen_range(0.0..std::f64::consts::TAU));
    let mut model = model_for(&world, params)?;
    let mut looming = match controller {
        Controller::Collision(p) => Some(CollisionModel::new(cfg.camera.width, cfg.camera.height, p.clone())?),
        Controller::LightRing => None,
    };
    let mut samples = Vec::with_capacity(n_samples);

    for n in 0..n_samples {
        let t = n as f64 * dt;
        let frame = render_view(&world, &robot, t)?;
        let response = model.step(&frame, params)?;
        let mut events = Vec::new();
        let mut turned = false;
        let potential = match looming.as_mut() {
            Some(lgmd) => {
                let out = lgmd.step(&frame)?;
                if out.trigger {
                    events.push(Event {
                        kind: EventKind::Avoidance,
                        t,
                        x: robot.x,
                        y: robot.y,
                        heading: robot.heading,
                        dtc_m: Some(robot.distance_ahead(cfg)),
                    });
                    robot = boundary_turn(&robot, &mut rng);
                    turned = true;
                }
                Some(out.potential)
            }
            None => {
                let (cx, cy) = cfg.center();
                let outward = (robot.x - cx) * robot.heading.cos() + (robot.y - cy) * robot.heading.sin() > 0.0;
                if robot.center_distance(cfg) >= cfg.ring_radius_m && outward {
                    events.push(Event {
                        kind: EventKind::Turn,
                        t,
                        x: robot.x,
                        y: robot.y,
                        heading: robot.heading,
                        dtc_m: None,
                    });
                    robot = boundary_turn(&robot, &mut rng);
                    turned = true;
                }
                None
            }
        };
        samples.push(TrajectorySample {
            t,
            x: robot.x,
            y: robot.y,
            heading: robot.heading,
            response,
            potential,
            events,
        });

        let (next, crashed) = step_robot(&robot, dt, cfg)?;
        robot = next;
        if crashed {
            samples.last_mut().unwrap().events.push(Event {
                kind: EventKind::Crash,
                t,
                x: robot.x,
                y: robot.y,
                heading: robot.heading,
                dtc_m: None,
            });
            robot = turn_away(&robot, cfg, &mut rng);
            turned = true;
        }
        if turned {
            model.reset();
            if let Some(lgmd) = looming.as_mut() {
                lgmd.reset();
            }
        }
    }
    Ok(Trajectory {
        arena_side_m: cfg.side_m,
        sample_rate_hz: cfg.sample_rate_hz,
        speed_mps: cfg.speed_mps,
        samples,
    })
}

/// Repeated random turns until the heading leaves every wall within reach.
fn turn_away<R: Rng>(robot: &RobotState, cfg: &ArenaConfig, rng: &mut R) -> RobotState {
    let near = cfg.wall_clearance_m + 1e-9;
    let s = cfg.side_m;
    let heads_away = |r: &RobotState| {
        let (dx, dy) = (r.heading.cos(), r.heading.sin());
        !((r.x <= near && dx < 0.0)
            || (s - r.x <= near && dx > 0.0)
            || (r.y <= near && dy < 0.0)
            || (s - r.y <= near && dy > 0.0))
    };
    let mut out = boundary_turn(robot, rng);
    for _ in 0..8 {
        if heads_away(&out) {
            return out;
        }
        out = boundary_turn(&out, rng);
    }
    out
}
