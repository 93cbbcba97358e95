//! Synthetic stimuli with exactly controlled spatial and temporal frequency.
//!
//! Gratings are vertical bars drifting horizontally. Spatial frequency is
//! given in cycles per full 360° circle of visual angle ("units per circle")
//! and converted to cycles per image width through the field of view that
//! the frame width spans.

mod io;
mod texture;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, VideoSequence};

pub use io::{load_image, load_video, save_pgm, save_video, RAW_MAGIC};
pub use texture::natural_texture;

/// Drift sense of a grating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GratingSpec {
    /// Cycles per 360° of visual angle.
    pub sf_upc: f64,
    pub tf_hz: f64,
    /// Michelson contrast.
    pub contrast: f64,
    pub mean_luminance: f64,
    pub phase0: f64,
    pub direction: Direction,
    /// Horizontal field of view mapped onto the frame width.
    pub fov_deg: f64,
}

impl Default for GratingSpec {
    fn default() -> Self {
        GratingSpec {
            sf_upc: 10.0,
            tf_hz: 1.0,
            contrast: 1.0,
            mean_luminance: 0.5,
            phase0: 0.0,
            direction: Direction::Forward,
            fov_deg: 360.0,
        }
    }
}

impl GratingSpec {
    pub fn new(sf_upc: f64, tf_hz: f64) -> Self {
        GratingSpec {
            sf_upc,
            tf_hz,
            ..Default::default()
        }
    }

    /// Cycles across one image width.
    pub fn cycles_per_image(&self) -> f64 {
        self.sf_upc * self.fov_deg / 360.0
    }

    /// Spatial period in degrees of visual angle.
    pub fn period_deg(&self) -> f64 {
        360.0 / self.sf_upc
    }

    /// Image angular velocity in degrees per second.
    pub fn angular_velocity_dps(&self) -> f64 {
        self.tf_hz * self.period_deg()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sf_upc > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sf_upc must be positive, got {}",
                self.sf_upc
            )));
        }
        if !(self.tf_hz >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tf_hz must be non-negative, got {}",
                self.tf_hz
            )));
        }
        if !(0.0..=1.0).contains(&self.contrast) {
            return Err(Error::InvalidArgument(format!(
                "contrast must lie in [0, 1], got {}",
                self.contrast
            )));
        }
        if !(self.fov_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fov_deg must be positive, got {}",
                self.fov_deg
            )));
        }
        let amp = self.contrast * self.mean_luminance;
        let (lo, hi) = (self.mean_luminance - amp, self.mean_luminance + amp);
        if !(self.mean_luminance > 0.0 && self.mean_luminance < 1.0)
            || lo < -1e-12
            || hi > 1.0 + 1e-12
        {
            return Err(Error::LuminanceRange {
                mean: self.mean_luminance,
                contrast: self.contrast,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// Luminance at image column `x` of frame index `n`.
    #[inline]
    pub fn sample(&self, x: f64, width: usize, n: usize, sample_rate: f64) -> f64 {
        let phase = TAU
            * (self.cycles_per_image() * x / width as f64
                - self.tf_hz * n as f64 / sample_rate * self.direction.sign())
            + self.phase0;
        self.mean_luminance * (1.0 + self.contrast * phase.sin())
    }

    /// One frame of the drifting grating.
    pub fn frame(&self, n: usize, sample_rate: f64, width: usize, height: usize) -> Result<Frame> {
        let row: Vec<f64> = (0..width)
            .map(|x| self.sample(x as f64, width, n, sample_rate))
            .collect();
        Frame::from_fn(width, height, |x, _| row[x])
    }
}

pub fn check_nyquist(tf_hz: f64, sample_rate: f64) -> Result<()> {
    if sample_rate < 2.0 * tf_hz {
        return Err(Error::Nyquist {
            tf_hz,
            sample_rate,
            required: 2.0 * tf_hz,
        });
    }
    Ok(())
}

fn frame_count(duration: f64, sample_rate: f64) -> Result<usize> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    // Round first so that e.g. 2 s at 300 Hz gives 600 frames despite float error.
    Ok((duration * sample_rate).round().max(1.0) as usize)
}

/// Renders a drifting sine-wave grating video.
pub fn generate_grating(
    spec: &GratingSpec,
    duration: f64,
    sample_rate: f64,
    width: usize,
    height: usize,
) -> Result<VideoSequence> {
    spec.validate()?;
    check_nyquist(spec.tf_hz, sample_rate)?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "frame dimensions must be positive, got {width}x{height}"
        )));
    }
    let n = frame_count(duration, sample_rate)?;
    let frames = (0..n)
        .map(|i| spec.frame(i, sample_rate, width, height))
        .collect::<Result<Vec<_>>>()?;
    VideoSequence::new(frames, sample_rate)
}

/// Translates a horizontally tileable texture at `tf_hz`, one temporal cycle
/// corresponding to `cycle_px` pixels of displacement.
///
/// Shifts are rounded to whole pixels, so every frame is an exact
/// permutation of the texture.
pub fn drift_texture(
    texture: &Frame,
    tf_hz: f64,
    cycle_px: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<VideoSequence> {
    if texture.pixels().is_empty() {
        return Err(Error::InvalidArgument("empty texture".into()));
    }
    if !(cycle_px > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cycle_px must be positive, got {cycle_px}"
        )));
    }
    if !(tf_hz >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tf_hz must be non-negative, got {tf_hz}"
        )));
    }
    check_nyquist(tf_hz, sample_rate)?;
    let n = frame_count(duration, sample_rate)?;
    let (w, h) = (texture.width(), texture.height());
    let frames = (0..n)
        .map(|i| {
            let shift = (tf_hz * i as f64 / sample_rate * cycle_px).round() as i64;
            let shift = shift.rem_euclid(w as i64) as usize;
            let mut px = Vec::with_capacity(w * h);
            for y in 0..h {
                let row = texture.row(y);
                px.extend((0..w).map(|x| row[(x + w - shift) % w]));
            }
            Frame::new(w, h, px)
        })
        .collect::<Result<Vec<_>>>()?;
    VideoSequence::new(frames, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_contrast_is_uniform() {
        let spec = GratingSpec {
            contrast: 0.0,
            ..GratingSpec::new(10.0, 5.0)
        };
        let v = generate_grating(&spec, 0.1, 300.0, 20, 10).unwrap();
        assert!(v
            .frames()
            .iter()
            .all(|f| f.pixels().iter().all(|&p| p == 0.5)));
    }

    #[test]
    fn quarter_cycle_points() {
        let spec = GratingSpec::new(1.0, 1.0);
        let v = generate_grating(&spec, 0.01, 300.0, 100, 4).unwrap();
        let f = &v.frames()[0];
        for y in 0..4 {
            assert!((f.get(25, y) - 1.0).abs() < 1e-6);
            assert!(f.get(75, y).abs() < 1e-6);
        }
    }

    #[test]
    fn nine_reference_classes_generate() {
        for sf in [1.0, 10.0, 50.0] {
            for tf in [1.0, 5.0, 50.0] {
                let v = generate_grating(&GratingSpec::new(sf, tf), 0.05, 300.0, 100, 100).unwrap();
                assert_eq!(v.len(), 15);
                assert_eq!(v.dims(), Some((100, 100)));
            }
        }
    }

    #[test]
    fn nyquist_and_range_guards() {
        let err = generate_grating(&GratingSpec::new(10.0, 200.0), 1.0, 300.0, 10, 10).unwrap_err();
        assert!(matches!(err, Error::Nyquist { .. }));
        let bright = GratingSpec {
            mean_luminance: 0.8,
            contrast: 0.5,
            ..Default::default()
        };
        assert!(matches!(bright.validate(), Err(Error::LuminanceRange { .. })));
        // Exactly at the Nyquist limit is allowed.
        assert!(generate_grating(&GratingSpec::new(10.0, 150.0), 0.1, 300.0, 10, 10).is_ok());
    }

    #[test]
    fn static_texture_is_unchanged() {
        let tex = natural_texture(64, 16, 3, 1.0).unwrap();
        let v = drift_texture(&tex, 0.0, 64.0, 0.1, 300.0).unwrap();
        assert!(v.frames().iter().all(|f| f == &tex));
        assert!(drift_texture(&tex, 1.0, 0.0, 0.1, 300.0).is_err());
    }

    #[test]
    fn full_cycle_shift_wraps_to_identity() {
        let tex = natural_texture(100, 8, 11, 1.0).unwrap();
        let v = drift_texture(&tex, 3.0, 100.0, 101.0 / 300.0, 300.0).unwrap();
        assert_eq!(&v.frames()[100], &tex);
        assert_ne!(&v.frames()[50], &tex);
        // shift of one pixel per frame at these settings
        let f1 = &v.frames()[1];
        assert_eq!(f1.get(1, 0), tex.get(0, 0));
        assert_eq!(f1.get(0, 0), tex.get(99, 0));
    }
}
