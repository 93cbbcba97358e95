//! Simulated square arena with texture-displaying walls and a camera-bearing
//! robot driving at constant speed.
//!
//! World coordinates are metres with the origin at one corner; headings are
//! radians counter-clockwise from +x. Wall textures are parameterised by the
//! perimeter coordinate `s`, running counter-clockwise from the origin, and
//! drift along `+s` at the configured temporal frequency.

mod render;
mod run;

use std::f64::consts::TAU;
use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::stimulus::{load_image, natural_texture};

pub use render::render_view;
pub use run::{
    run_approach, run_navigation, Controller, Event, EventKind, Trajectory, TrajectorySample,
};

/// What the walls display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WallPattern {
    Grating {
        cycles_per_m: f64,
        contrast: f64,
        mean_luminance: f64,
    },
    /// A horizontally tiled texture; its middle row is displayed.
    Natural {
        /// Procedural cluttered texture seed, used when `image` is absent.
        seed: u64,
        width_px: usize,
        height_px: usize,
        contrast: f64,
        image: Option<PathBuf>,
        /// Physical width of one texture tile.
        tile_width_m: f64,
        /// Texture displacement per temporal cycle.
        cycle_px: f64,
    },
}

impl WallPattern {
    pub fn grating() -> Self {
        WallPattern::Grating {
            cycles_per_m: 60.0,
            contrast: 1.0,
            mean_luminance: 0.5,
        }
    }

    pub fn natural() -> Self {
        WallPattern::Natural {
            seed: 17,
            width_px: 1024,
            height_px: 64,
            contrast: 1.0,
            image: None,
            tile_width_m: 0.5,
            cycle_px: 128.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraConfig {
    pub fov_deg: f64,
    pub width: usize,
    pub height: usize,
    pub mount_height_m: f64,
    /// Horizontal sub-rays per pixel column (area sampling).
    pub supersample: usize,
}

impl Default for CameraConfig {
    fn default() -> Self {
        CameraConfig {
            fov_deg: 70.0,
            width: 100,
            height: 100,
            mount_height_m: 0.03,
            supersample: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArenaConfig {
    pub side_m: f64,
    pub wall_height_m: f64,
    pub wall: WallPattern,
    pub wall_tf_hz: f64,
    /// Texture phase offset, radians of one grating cycle.
    pub wall_phase: f64,
    pub ring_radius_m: f64,
    pub wall_clearance_m: f64,
    pub background: f64,
    pub speed_mps: f64,
    pub sample_rate_hz: f64,
    pub camera: CameraConfig,
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig {
            side_m: 1.0,
            wall_height_m: 0.15,
            wall: WallPattern::grating(),
            wall_tf_hz: 0.0,
            wall_phase: 0.0,
            ring_radius_m: 0.45,
            wall_clearance_m: 0.03,
            background: 0.5,
            speed_mps: 0.08,
            sample_rate_hz: 33.0,
            camera: CameraConfig::default(),
        }
    }
}

impl ArenaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.side_m > 0.0) {
            return bad(format!("side_m must be positive, got {}", self.side_m));
        }
        if !(self.ring_radius_m > 0.0 && self.ring_radius_m < self.side_m / 2.0) {
            return bad(format!(
                "ring radius {} must lie in (0, {})",
                self.ring_radius_m,
                self.side_m / 2.0
            ));
        }
        if !(self.wall_clearance_m >= 0.0 && self.wall_clearance_m < self.side_m / 2.0) {
            return bad(format!("invalid wall clearance {}", self.wall_clearance_m));
        }
        if !(self.wall_height_m > 0.0) || !(0.0..=1.0).contains(&self.background) {
            return bad("wall height must be positive and background in [0, 1]".into());
        }
        if !(self.speed_mps >= 0.0) || !(self.sample_rate_hz > 0.0) || !(self.wall_tf_hz >= 0.0) {
            return bad("speed, sample rate and wall TF must be non-negative".into());
        }
        let cam = &self.camera;
        if cam.width == 0 || cam.height == 0 || cam.supersample == 0 {
            return bad("camera resolution and supersampling must be positive".into());
        }
        if !(cam.fov_deg > 0.0 && cam.fov_deg < 180.0) {
            return bad(format!("camera fov {} must lie in (0, 180)", cam.fov_deg));
        }
        match &self.wall {
            WallPattern::Grating {
                cycles_per_m,
                contrast,
                mean_luminance,
            } => {
                if !(*cycles_per_m > 0.0) {
                    return bad("grating cycles_per_m must be positive".into());
                }
                let amp = contrast * mean_luminance;
                if !(0.0..=1.0).contains(contrast) || mean_luminance - amp < 0.0 || mean_luminance + amp > 1.0 {
                    return bad("grating luminance leaves [0, 1]".into());
                }
            }
            WallPattern::Natural {
                tile_width_m,
                cycle_px,
                width_px,
                ..
            } => {
                if !(*tile_width_m > 0.0 && *cycle_px > 0.0) || *width_px < 2 {
                    return bad("natural wall needs positive tile width, cycle and texture size".into());
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> (f64, f64) {
        (self.side_m / 2.0, self.side_m / 2.0)
    }

    pub fn perimeter(&self) -> f64 {
        4.0 * self.side_m
    }

    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let cfg: ArenaConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Config plus the realised wall texture.
#[derive(Debug, Clone)]
pub struct World {
    pub config: ArenaConfig,
    /// Luminance along one texture tile (natural walls only).
    texture_row: Vec<f64>,
}

impl World {
    pub fn new(config: ArenaConfig) -> Result<Self> {
        config.validate()?;
        let texture_row = match &config.wall {
            WallPattern::Grating { .. } => Vec::new(),
            WallPattern::Natural {
                seed,
                width_px,
                height_px,
                contrast,
                image,
                ..
            } => {
                let tex: Frame = match image {
                    Some(path) => load_image(path)?,
                    None => natural_texture(*width_px, (*height_px).max(1), *seed, *contrast)?,
                };
                tex.row(tex.height() / 2).iter().map(|&p| p as f64).collect()
            }
        };
        Ok(World {
            config,
            texture_row,
        })
    }

    /// Wall luminance at perimeter coordinate `s` and time `t`.
    pub fn wall_luminance(&self, s: f64, t: f64) -> f64 {
        let tf = self.config.wall_tf_hz;
        match &self.config.wall {
            WallPattern::Grating {
                cycles_per_m,
                contrast,
                mean_luminance,
            } => {
                let phase = TAU * (cycles_per_m * s - tf * t) + self.config.wall_phase;
                mean_luminance * (1.0 + contrast * phase.sin())
            }
            WallPattern::Natural {
                tile_width_m,
                cycle_px,
                ..
            } => {
                let n = self.texture_row.len();
                let shift = self.config.wall_phase / TAU * cycle_px;
                let u = (s / tile_width_m * n as f64 - tf * t * cycle_px - shift).rem_euclid(n as f64);
                let i = u.floor() as usize % n;
                let frac = u - u.floor();
                self.texture_row[i] * (1.0 - frac) + self.texture_row[(i + 1) % n] * frac
            }
        }
    }

    /// Distance along a ray to the nearest wall, and the perimeter coordinate of the hit.
    pub fn cast(&self, x: f64, y: f64, angle: f64) -> (f64, f64) {
        cast_ray(self.config.side_m, x, y, angle)
    }
}

/// Ray cast from `(x, y)` inside a square arena of side `side`: distance to
/// the first wall and the perimeter coordinate of the hit.
pub fn cast_ray(side: f64, x: f64, y: f64, angle: f64) -> (f64, f64) {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut best = (f64::INFINITY, 0.0);
    if dx > 1e-12 {
        let t = (side - x) / dx;
        if t < best.0 {
            best = (t, side + (y + t * dy).clamp(0.0, side));
        }
    } else if dx < -1e-12 {
        let t = -x / dx;
        if t < best.0 {
            best = (t, 3.0 * side + (side - (y + t * dy).clamp(0.0, side)));
        }
    }
    if dy > 1e-12 {
        let t = (side - y) / dy;
        if t < best.0 {
            best = (t, 2.0 * side + (side - (x + t * dx).clamp(0.0, side)));
        }
    } else if dy < -1e-12 {
        let t = -y / dy;
        if t < best.0 {
            best = (t, (x + t * dx).clamp(0.0, side));
        }
    }
    (best.0.max(0.0), best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed_mps: f64,
}

impl RobotState {
    pub fn at_center(config: &ArenaConfig, heading: f64) -> Self {
        let (x, y) = config.center();
        RobotState {
            x,
            y,
            heading,
            speed_mps: config.speed_mps,
        }
    }

    pub fn inside(&self, config: &ArenaConfig) -> bool {
        (0.0..=config.side_m).contains(&self.x) && (0.0..=config.side_m).contains(&self.y)
    }

    pub fn wall_distance(&self, config: &ArenaConfig) -> f64 {
        let s = config.side_m;
        self.x.min(s - self.x).min(self.y).min(s - self.y)
    }

    pub fn center_distance(&self, config: &ArenaConfig) -> f64 {
        let (cx, cy) = config.center();
        (self.x - cx).hypot(self.y - cy)
    }

    /// Distance to the wall straight ahead.
    pub fn distance_ahead(&self, config: &ArenaConfig) -> f64 {
        cast_ray(config.side_m, self.x, self.y, self.heading).0
    }
}

/// Advances the robot along its heading. A step that would bring it closer
/// than the wall clearance stops at the clearance and reports a crash.
pub fn step_robot(state: &RobotState, dt: f64, config: &ArenaConfig) -> Result<(RobotState, bool)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !state.inside(config) {
        return Err(Error::OutsideArena {
            x: state.x,
            y: state.y,
        });
    }
    let (dx, dy) = (state.heading.cos(), state.heading.sin());
    let lo = config.wall_clearance_m;
    let hi = config.side_m - config.wall_clearance_m;
    let mut travel = state.speed_mps * dt;
    let mut crashed = false;
    // Largest travel keeping both coordinates within [lo, hi] (never moving backwards).
    for (p, d) in [(state.x, dx), (state.y, dy)] {
        let limit = if d > 1e-12 {
            (hi - p) / d
        } else if d < -1e-12 {
            (lo - p) / d
        } else {
            f64::INFINITY
        };
        if limit < travel {
            travel = limit.max(0.0);
            crashed = true;
        }
    }
    Ok((
        RobotState {
            x: state.x + travel * dx,
            y: state.y + travel * dy,
            ..*state
        },
        crashed,
    ))
}

/// Random 80–100° turn to a random side.
pub fn boundary_turn<R: Rng>(state: &RobotState, rng: &mut R) -> RobotState {
    let magnitude = rng.gen_range(80.0..=100.0f64).to_radians();
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    RobotState {
        heading: (state.heading + sign * magnitude).rem_euclid(TAU),
        ..*state
    }
}

#[cfg(test)]
mod tests;
