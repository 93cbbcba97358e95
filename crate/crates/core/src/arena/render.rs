use crate::arena::{RobotState, World};
use crate::error::{Error, Result};
use crate::frame::Frame;

/// Pinhole view from the robot's camera at time `t`.
///
/// Each column is area-sampled with `supersample` horizontal sub-rays. A
/// sub-ray hitting a wall at horizontal range `d` sees the wall between
/// heights 0 and `wall_height_m`; each pixel blends the wall luminance with
/// the background by the fraction of its vertical footprint the wall covers.
pub fn render_view(world: &World, state: &RobotState, t: f64) -> Result<Frame> {
    let cfg = &world.config;
    if !state.inside(cfg) {
        return Err(Error::OutsideArena {
            x: state.x,
            y: state.y,
        });
    }
    let cam = &cfg.camera;
    let (w, h) = (cam.width, cam.height);
    let focal = (w as f64 / 2.0) / (cam.fov_deg.to_radians() / 2.0).tan();
    let ss = cam.supersample;
    let bg = cfg.background;

    let mut pixels = vec![0.0f64; w * h];
    for col in 0..w {
        for k in 0..ss {
            let u = col as f64 + (k as f64 + 0.5) / ss as f64 - w as f64 / 2.0;
            // Image x grows to the right, i.e. clockwise from the heading.
            let angle = state.heading - (u / focal).atan();
            let (range, s) = world.cast(state.x, state.y, angle);
            let lum = world.wall_luminance(s, t);
            // Height gained per unit of image-plane v at this range.
            let slope = range / focal.hypot(u);
            for row in 0..h {
                let v_top = h as f64 / 2.0 - row as f64;
                let z_top = cam.mount_height_m + v_top * slope;
                let z_bot = z_top - slope;
                let covered = (z_top.min(cfg.wall_height_m) - z_bot.max(0.0)).max(0.0);
                let frac = if slope > 0.0 { (covered / slope).min(1.0) } else { 1.0 };
                pixels[row * w + col] += frac * lum + (1.0 - frac) * bg;
            }
        }
    }
    let inv = 1.0 / ss as f64;
    Frame::from_fn(w, h, |x, y| pixels[y * w + x] * inv)
}
