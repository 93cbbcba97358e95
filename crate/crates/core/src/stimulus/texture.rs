use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Seeded cluttered texture from the dead-leaves model: opaque discs with
/// uniform random grey levels and a scale-invariant radius density (∝ r⁻³),
/// stacked until the canvas is covered. This gives the sharp occlusion edges
/// and roughly 1/f spectrum of natural scenes.
///
/// Disc coordinates wrap, so the texture tiles in both directions. The result
/// is mapped linearly onto `[0.5 - contrast/2, 0.5 + contrast/2]`.
pub fn natural_texture(width: usize, height: usize, seed: u64, contrast: f64) -> Result<Frame> {
    if width < 2 || height < 1 {
        return Err(Error::InvalidArgument(format!(
            "texture must be at least 2x1, got {width}x{height}"
        )));
    }
    if !(0.0..=1.0).contains(&contrast) {
        return Err(Error::InvalidArgument(format!(
            "contrast must lie in [0, 1], got {contrast}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_min = 1.0f64;
    let r_max = (width.max(height) as f64 / 8.0).max(2.0);
    let (a, b) = (r_min.powi(-2), r_max.powi(-2));

    // Front-to-back: each disc only paints pixels no nearer disc has covered.
    let mut values: Vec<Option<f64>> = vec![None; width * height];
    let mut uncovered = width * height;
    let max_discs = 50 * width * height;
    for _ in 0..max_discs {
        if uncovered == 0 {
            break;
        }
        let r = (a - rng.gen::<f64>() * (a - b)).powf(-0.5);
        let cx = rng.gen::<f64>() * width as f64;
        let cy = rng.gen::<f64>() * height as f64;
        let grey: f64 = rng.gen();
        let y0 = (cy - r).floor() as i64;
        let y1 = (cy + r).ceil() as i64;
        let x0 = (cx - r).floor() as i64;
        let x1 = (cx + r).ceil() as i64;
        for y in y0..=y1 {
            let dy = y as f64 + 0.5 - cy;
            if dy.abs() > r {
                continue;
            }
            let yy = y.rem_euclid(height as i64) as usize;
            for x in x0..=x1 {
                let dx = x as f64 + 0.5 - cx;
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let slot = &mut values[yy * width + x.rem_euclid(width as i64) as usize];
                if slot.is_none() {
                    *slot = Some(grey);
                    uncovered -= 1;
                }
            }
        }
    }

    let values: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(0.5)).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let base = 0.5 - contrast / 2.0;
    Frame::from_fn(width, height, |x, y| {
        base + contrast * (values[y * width + x] - lo) / span
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let a = natural_texture(64, 32, 9, 0.8).unwrap();
        let b = natural_texture(64, 32, 9, 0.8).unwrap();
        let c = natural_texture(64, 32, 10, 0.8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let (lo, hi) = a
            .pixels()
            .iter()
            .fold((1.0f32, 0.0f32), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        assert!((lo - 0.1).abs() < 1e-5 && (hi - 0.9).abs() < 1e-5);
    }

    #[test]
    fn cluttered_at_many_scales() {
        let t = natural_texture(512, 64, 4, 1.0).unwrap();
        let row: Vec<f64> = t.row(32).iter().map(|&p| p as f64).collect();
        // Piecewise-constant patches with sharp steps: many exact repeats and
        // some large jumps between neighbours.
        let steps: Vec<f64> = row.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let flat = steps.iter().filter(|&&d| d == 0.0).count();
        let big = steps.iter().filter(|&&d| d > 0.2).count();
        assert!(flat > steps.len() / 2, "{flat}");
        assert!(big > 10, "{big}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(natural_texture(1, 4, 0, 1.0).is_err());
        assert!(natural_texture(4, 4, 0, 1.5).is_err());
    }
}
