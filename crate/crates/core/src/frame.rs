//! Grayscale luminance rasters and fixed-rate sequences of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grayscale image with luminance in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "frame {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "pixel value {bad} outside [0, 1]"
            )));
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self> {
        Frame::new(width, height, vec![value; width * height])
    }

    /// Builds a frame, clamping each value into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).clamp(0.0, 1.0) as f32);
            }
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f32] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn same_shape(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Frames sharing one shape, sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSequence {
    frames: Vec<Frame>,
    sample_rate: f64,
}

impl VideoSequence {
    pub fn new(frames: Vec<Frame>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if let Some(first) = frames.first() {
            if let Some(bad) = frames.iter().find(|f| !f.same_shape(first)) {
                return Err(Error::DimensionMismatch {
                    expected_w: first.width(),
                    expected_h: first.height(),
                    got_w: bad.width(),
                    got_h: bad.height(),
                });
            }
        }
        Ok(VideoSequence {
            frames,
            sample_rate,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.sample_rate
    }

    /// `(width, height)` of the frames, if any.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.frames.first().map(|f| (f.width(), f.height()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_pixels() {
        assert!(Frame::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(Frame::new(2, 1, vec![0.0, -0.1]).is_err());
        assert!(Frame::new(0, 1, vec![]).is_err());
        assert!(Frame::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn sequence_requires_uniform_shape() {
        let a = Frame::filled(2, 2, 0.5).unwrap();
        let b = Frame::filled(3, 2, 0.5).unwrap();
        assert!(matches!(
            VideoSequence::new(vec![a.clone(), b], 30.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(VideoSequence::new(vec![a], 0.0).is_err());
    }
}
