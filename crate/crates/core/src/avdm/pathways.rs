use crate::frame::Frame;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureEstimate {
    /// Dominant spatial period, degrees per cycle.
    pub lambda: f64,
    pub c_hat: f64,
    pub degenerate: bool,
}

// [1, 4, 1] / 6 keeps a third of the amplitude even at the pixel Nyquist limit.
const SMOOTH: [f64; 3] = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];

fn smooth_1d(src: &[f64], dst: &mut [f64]) {
    let n = src.len();
    for i in 0..n {
        let l = src[i.saturating_sub(1)];
        let r = src[(i + 1).min(n - 1)];
        dst[i] = SMOOTH[0] * l + SMOOTH[1] * src[i] + SMOOTH[2] * r;
    }
}

/// Texture pathway: spatial period from zero crossings and Michelson contrast.
///
/// The period is measured on the mean of the middle fifth of the rows,
/// lightly smoothed and mean-subtracted; crossing positions are linearly
/// interpolated. A frame without structure yields `c_floor` and the
/// whole-field period `fov_deg`, flagged degenerate.
pub fn texture_pathway(frame: &Frame, fov_deg: f64, c_floor: f64) -> TextureEstimate {
    let (w, h) = (frame.width(), frame.height());

    // Separable smoothing of the whole frame for the contrast estimate.
    let mut horiz = vec![0.0; w * h];
    let mut buf = vec![0.0; w];
    let mut row = vec![0.0; w];
    for y in 0..h {
        for (dst, &p) in row.iter_mut().zip(frame.row(y)) {
            *dst = p as f64;
        }
        smooth_1d(&row, &mut buf);
        horiz[y * w..(y + 1) * w].copy_from_slice(&buf);
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let v = SMOOTH[0] * horiz[up * w + x]
                + SMOOTH[1] * horiz[y * w + x]
                + SMOOTH[2] * horiz[down * w + x];
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let c_raw = if hi + lo > 0.0 { (hi - lo) / (hi + lo) } else { 0.0 };
    let c_hat = c_raw.clamp(c_floor, 1.0);

    let band = (h / 10).max(0);
    let (r0, r1) = (h / 2 - band.min(h / 2), (h / 2 + band).min(h - 1));
    let mut profile = vec![0.0; w];
    for y in r0..=r1 {
        for (acc, &p) in profile.iter_mut().zip(frame.row(y)) {
            *acc += p as f64;
        }
    }
    let rows = (r1 - r0 + 1) as f64;
    profile.iter_mut().for_each(|p| *p /= rows);
    smooth_1d(&profile, &mut buf);
    let mean = buf.iter().sum::<f64>() / w as f64;
    buf.iter_mut().for_each(|p| *p -= mean);
    let peak = buf.iter().fold(0.0f64, |m, &p| m.max(p.abs()));

    let degenerate_estimate = TextureEstimate {
        lambda: fov_deg,
        c_hat,
        degenerate: true,
    };
    if peak < 1e-9 || c_raw < 1e-9 {
        return TextureEstimate {
            c_hat: c_floor,
            ..degenerate_estimate
        };
    }

    // Samples within a small band of zero count as zero; crossings are taken
    // between strictly signed neighbours.
    let eps = peak * 1e-6;
    let mut crossings = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (i, &v) in buf.iter().enumerate() {
        if v.abs() <= eps {
            continue;
        }
        if let Some((j, u)) = last {
            if (u > 0.0) != (v > 0.0) {
                crossings.push(j as f64 + (i - j) as f64 * u / (u - v));
            }
        }
        last = Some((i, v));
    }
    let px_per_deg = w as f64 / fov_deg;
    let period_px = match crossings.len() {
        0 => return degenerate_estimate,
        // Half a cycle visible at most: the whole image is at least half a period.
        1 => 2.0 * w as f64,
        n => 2.0 * (crossings[n - 1] - crossings[0]) / (n - 1) as f64,
    };
    TextureEstimate {
        lambda: period_px / px_per_deg,
        c_hat,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::GratingSpec;

    fn grating(sf: f64, contrast: f64) -> Frame {
        let spec = GratingSpec {
            contrast,
            ..GratingSpec::new(sf, 0.0)
        };
        spec.frame(0, 300.0, 100, 100).unwrap()
    }

    #[test]
    fn period_of_ten_upc_grating() {
        let t = texture_pathway(&grating(10.0, 1.0), 360.0, 0.05);
        assert!(!t.degenerate);
        assert!((t.lambda - 36.0).abs() / 36.0 < 0.1, "lambda = {}", t.lambda);
    }

    #[test]
    fn period_tracks_spatial_frequency() {
        for sf in [2.0, 5.0, 20.0, 25.0] {
            let t = texture_pathway(&grating(sf, 1.0), 360.0, 0.05);
            let truth = 360.0 / sf;
            assert!((t.lambda - truth).abs() / truth < 0.1, "sf {sf}: {}", t.lambda);
        }
    }

    #[test]
    fn contrast_estimates() {
        let full = texture_pathway(&grating(1.0, 1.0), 360.0, 0.05);
        assert!((full.c_hat - 1.0).abs() < 1e-3, "{}", full.c_hat);
        let part = texture_pathway(&grating(1.0, 0.4), 360.0, 0.05);
        assert!((part.c_hat - 0.4).abs() < 1e-2, "{}", part.c_hat);
    }

    #[test]
    fn uniform_frame_is_degenerate() {
        let t = texture_pathway(&Frame::filled(50, 50, 0.3).unwrap(), 70.0, 0.05);
        assert!(t.degenerate);
        assert_eq!(t.c_hat, 0.05);
        assert_eq!(t.lambda, 70.0);
    }
}
