//! Angular velocity decoding model.
//!
//! Two pathways feed a decoding layer. The texture pathway estimates the
//! dominant spatial period `lambda` (degrees per cycle) and the Michelson
//! contrast `c_hat` of the current frame. The motion pathway produces a
//! non-negative motion energy `r` from a temporally high-passed retina. The
//! decoding layer combines them into an angular velocity
//!
//! ```text
//! omega = a_hat * lambda^b_hat * (1 + c_hat) / (2 c_hat) * sqrt(r)
//! ```
//!
//! and the complexity score reported for a frame is `score_gain * r`.
//!
//! `lambda` is a spatial *period*, so a positive `b_hat` compensates for the
//! period shrinking as spatial frequency grows.

mod decode;
mod fit;
mod params;
mod pathways;

pub use decode::decode_angular_velocity;
pub use fit::{fit_params, write_residual_csv, FitResult, FitSample};
pub use params::AvdmParams;
pub use pathways::{texture_pathway, TextureEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Per-frame model output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct AvdmResponse {
    pub r: f64,
    /// Spatial period estimate, degrees per cycle.
    pub lambda: f64,
    pub c_hat: f64,
    /// Decoded angular velocity, degrees per second.
    pub omega: f64,
    pub score: f64,
    /// Filter transients still dominate; excluded from aggregates.
    pub warmup: bool,
    /// The texture pathway saw a near-uniform frame.
    pub degenerate: bool,
}

/// Streaming model state for one camera.
#[derive(Debug, Clone)]
pub struct AvdmState {
    width: usize,
    height: usize,
    sample_rate: f64,
    fov_deg: f64,
    hp_alpha: f64,
    lp_beta: f64,
    offset: usize,
    warmup_frames: usize,
    prev_input: Vec<f64>,
    retina: Vec<f64>,
    prev_retina: Vec<f64>,
    r_lp: f64,
    frames_seen: usize,
}

impl AvdmState {
    pub fn new(
        width: usize,
        height: usize,
        sample_rate: f64,
        fov_deg: f64,
        params: &AvdmParams,
    ) -> Result<Self> {
        params.validate()?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "model dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(sample_rate > 0.0) || !(fov_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample rate and fov must be positive, got {sample_rate} Hz, {fov_deg}°"
            )));
        }
        let dt_ms = 1000.0 / sample_rate;
        let n = width * height;
        Ok(AvdmState {
            width,
            height,
            sample_rate,
            fov_deg,
            hp_alpha: (-dt_ms / params.tau_hp_ms).exp(),
            lp_beta: 1.0 - (-dt_ms / params.tau_lp_ms).exp(),
            offset: params.emd_offset_px,
            warmup_frames: params.warmup_frames(sample_rate),
            prev_input: vec![0.0; n],
            retina: vec![0.0; n],
            prev_retina: vec![0.0; n],
            r_lp: 0.0,
            frames_seen: 0,
        })
    }

    pub fn reset(&mut self) {
        self.prev_input.fill(0.0);
        self.retina.fill(0.0);
        self.prev_retina.fill(0.0);
        self.r_lp = 0.0;
        self.frames_seen = 0;
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }

    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn warmup_frames(&self) -> usize {
        self.warmup_frames
    }

    pub fn in_warmup(&self) -> bool {
        self.frames_seen <= self.warmup_frames
    }

    /// Photoreceptor stage: per-pixel first-order temporal high-pass.
    ///
    /// `y[n] = a y[n-1] + (1 + a)/2 (x[n] - x[n-1])` with `a = exp(-dt/tau_hp)`:
    /// successive samples of a step response decay by exactly `exp(-dt/tau_hp)`
    /// and the half-sample input gain keeps the sinusoidal gain on the
    /// continuous-time curve.
    /// The filter starts from the first frame's own luminance, so a reset
    /// state produces an all-zero retina on that frame.
    pub fn preprocess(&mut self, frame: &Frame) -> Result<&[f64]> {
        if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                got_w: frame.width(),
                got_h: frame.height(),
            });
        }
        std::mem::swap(&mut self.retina, &mut self.prev_retina);
        let a = self.hp_alpha;
        let g = 0.5 * (1.0 + a);
        let first = self.frames_seen == 0;
        for (((out, prev_out), prev_in), &px) in self
            .retina
            .iter_mut()
            .zip(&self.prev_retina)
            .zip(self.prev_input.iter_mut())
            .zip(frame.pixels())
        {
            let x = px as f64;
            *out = if first { 0.0 } else { a * prev_out + g * (x - *prev_in) };
            *prev_in = x;
        }
        self.frames_seen += 1;
        Ok(&self.retina)
    }

    /// Current high-passed retina image.
    pub fn retina(&self) -> &[f64] {
        &self.retina
    }

    /// Motion energy of the latest preprocessed frame.
    ///
    /// Each detector pairs the temporal change of one retina pixel with the
    /// spatial contrast to its neighbours `emd_offset_px` away on either side:
    /// `|p_t(i) - p_{t-1}(i)| * (|p(i+d) - p(i)| + |p(i) - p(i-d)|) / 2`.
    /// The spatial mean is smoothed by a first-order low-pass of time
    /// constant `tau_lp_ms`. Returns `(r, warmup)`.
    pub fn motion_pathway(&mut self) -> (f64, bool) {
        if self.frames_seen < 2 {
            self.r_lp = 0.0;
            return (0.0, true);
        }
        let instant = motion_energy(
            &self.retina,
            &self.prev_retina,
            self.width,
            self.height,
            self.offset,
        );
        self.r_lp += self.lp_beta * (instant - self.r_lp);
        (self.r_lp.max(0.0), self.in_warmup())
    }

    /// Runs the whole pipeline on one frame.
    pub fn step(&mut self, frame: &Frame, params: &AvdmParams) -> Result<AvdmResponse> {
        self.preprocess(frame)?;
        let (r, warmup) = self.motion_pathway();
        let tex = texture_pathway(frame, self.fov_deg, params.c_floor);
        let omega = decode_angular_velocity(r, tex.lambda, tex.c_hat, params)?;
        Ok(AvdmResponse {
            r,
            lambda: tex.lambda,
            c_hat: tex.c_hat,
            omega,
            score: params.score_gain * r,
            warmup,
            degenerate: tex.degenerate,
        })
    }
}

fn motion_energy(cur: &[f64], prev: &[f64], width: usize, height: usize, d: usize) -> f64 {
    let mut total = 0.0;
    for y in 0..height {
        let row = &cur[y * width..(y + 1) * width];
        let prow = &prev[y * width..(y + 1) * width];
        for x in 0..width {
            let dt = (row[x] - prow[x]).abs();
            if dt == 0.0 {
                continue;
            }
            let spatial = match (x >= d, x + d < width) {
                (true, true) => 0.5 * ((row[x + d] - row[x]).abs() + (row[x] - row[x - d]).abs()),
                (false, true) => (row[x + d] - row[x]).abs(),
                (true, false) => (row[x] - row[x - d]).abs(),
                (false, false) => 0.0,
            };
            total += dt * spatial;
        }
    }
    total / (width * height) as f64
}
