//! Complexity metric: per-frame score series, SF×TF sweeps and ordering checks.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::avdm::{AvdmParams, AvdmState, FitSample};
use crate::error::{Error, Result};
use crate::frame::VideoSequence;
use crate::stimulus::{GratingSpec, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityScore {
    pub frame: usize,
    pub t: f64,
    pub score: f64,
    pub warmup: bool,
}

/// Scores every frame of `video` from a freshly reset model.
pub fn profile_sequence(
    video: &VideoSequence,
    fov_deg: f64,
    params: &AvdmParams,
) -> Result<Vec<ComplexityScore>> {
    let (w, h) = video
        .dims()
        .ok_or_else(|| Error::InvalidArgument("empty video".into()))?;
    let mut state = AvdmState::new(w, h, video.sample_rate(), fov_deg, params)?;
    video
        .frames()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let r = state.step(f, params)?;
            Ok(ComplexityScore {
                frame: i,
                t: i as f64 / video.sample_rate(),
                score: r.score,
                warmup: r.warmup,
            })
        })
        .collect()
}

/// Stimulus settings shared by every sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub sample_rate: f64,
    pub width: usize,
    pub height: usize,
    /// Averaging window after the warm-up, seconds.
    pub duration_s: f64,
    pub contrast: f64,
    pub mean_luminance: f64,
    pub phase0: f64,
    pub fov_deg: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sample_rate: 300.0,
            width: 100,
            height: 100,
            duration_s: 2.0,
            contrast: 1.0,
            mean_luminance: 0.5,
            // A cosine grating: a sine at the pixel Nyquist limit samples to zero.
            phase0: std::f64::consts::FRAC_PI_2,
            fov_deg: 360.0,
        }
    }
}

impl SweepConfig {
    pub fn grating(&self, sf_upc: f64, tf_hz: f64) -> GratingSpec {
        GratingSpec {
            sf_upc,
            tf_hz,
            contrast: self.contrast,
            mean_luminance: self.mean_luminance,
            phase0: self.phase0,
            direction: Direction::Forward,
            fov_deg: self.fov_deg,
        }
    }

    /// Warm-up excluded from a cell: the model's filter transient or one
    /// full temporal cycle, whichever is longer.
    pub fn warmup_frames(&self, tf_hz: f64, params: &AvdmParams) -> usize {
        let cycle = if tf_hz > 0.0 {
            (self.sample_rate / tf_hz).ceil() as usize
        } else {
            0
        };
        params.warmup_frames(self.sample_rate).max(cycle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub sf_upc: f64,
    pub tf_hz: f64,
    /// Mean post-warm-up score; `None` when the cell is invalid.
    pub score: Option<f64>,
    pub warmup_s: f64,
    pub invalid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub sf_values: Vec<f64>,
    pub tf_values: Vec<f64>,
    /// Row-major, `cells[i][j]` for `sf_values[i]`, `tf_values[j]`.
    pub cells: Vec<Vec<SweepCell>>,
    pub config: SweepConfig,
}

impl SweepGrid {
    /// Builds a grid straight from a response matrix.
    pub fn from_matrix(sf_values: Vec<f64>, tf_values: Vec<f64>, responses: Vec<Vec<f64>>) -> Result<Self> {
        if responses.len() != sf_values.len() || responses.iter().any(|r| r.len() != tf_values.len()) {
            return Err(Error::InvalidArgument(format!(
                "response matrix must be {}x{}",
                sf_values.len(),
                tf_values.len()
            )));
        }
        let cells = sf_values
            .iter()
            .zip(&responses)
            .map(|(&sf, row)| {
                tf_values
                    .iter()
                    .zip(row)
                    .map(|(&tf, &score)| SweepCell {
                        sf_upc: sf,
                        tf_hz: tf,
                        score: Some(score),
                        warmup_s: 0.0,
                        invalid: None,
                    })
                    .collect()
            })
            .collect();
        Ok(SweepGrid {
            sf_values,
            tf_values,
            cells,
            config: SweepConfig::default(),
        })
    }

    pub fn score(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i][j].score
    }

    /// Header row holds TF values, first column SF values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sf_upc\\tf_hz");
        for tf in &self.tf_values {
            write!(out, ",{tf}").unwrap();
        }
        out.push('\n');
        for (sf, row) in self.sf_values.iter().zip(&self.cells) {
            write!(out, "{sf}").unwrap();
            for c in row {
                match c.score {
                    Some(s) => write!(out, ",{s}").unwrap(),
                    None => out.push_str(",invalid"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidArgument(format!("sweep csv: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty".into()))?;
        let tf_values = header
            .split(',')
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mut sf_values = Vec::new();
        let mut cells = Vec::new();
        for line in lines {
            let mut parts = line.split(',');
            let sf: f64 = parts
                .next()
                .unwrap_or_default()
                .trim()
                .parse()
                .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
            let row = parts
                .zip(&tf_values)
                .map(|(s, &tf)| {
                    let s = s.trim();
                    let score = if s == "invalid" {
                        None
                    } else {
                        Some(s.parse::<f64>().map_err(|e| bad(e.to_string()))?)
                    };
                    Ok(SweepCell {
                        sf_upc: sf,
                        tf_hz: tf,
                        score,
                        warmup_s: 0.0,
                        invalid: score.is_none().then(|| "invalid".to_string()),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != tf_values.len() {
                return Err(bad(format!("row for sf {sf} has {} cells", row.len())));
            }
            sf_values.push(sf);
            cells.push(row);
        }
        Ok(SweepGrid {
            sf_values,
            tf_values,
            cells,
            config: SweepConfig::default(),
        })
    }
}

fn sweep_cell(sf: f64, tf: f64, cfg: &SweepConfig, params: &AvdmParams) -> SweepCell {
    let invalid = |warmup_s: f64, why: String| SweepCell {
        sf_upc: sf,
        tf_hz: tf,
        score: None,
        warmup_s,
        invalid: Some(why),
    };
    if cfg.sample_rate < 2.0 * tf {
        return invalid(
            0.0,
            format!("Nyquist: TF {tf} Hz exceeds half the {} Hz sample rate", cfg.sample_rate),
        );
    }
    let spec = cfg.grating(sf, tf);
    if let Err(e) = spec.validate() {
        return invalid(0.0, e.to_string());
    }
    let warm = cfg.warmup_frames(tf, params);
    let measure = (cfg.duration_s * cfg.sample_rate).round().max(1.0) as usize;
    let warmup_s = warm as f64 / cfg.sample_rate;
    let mut state = match AvdmState::new(cfg.width, cfg.height, cfg.sample_rate, cfg.fov_deg, params) {
        Ok(s) => s,
        Err(e) => return invalid(warmup_s, e.to_string()),
    };
    let mut total = 0.0;
    for n in 0..warm + measure {
        let frame = match spec.frame(n, cfg.sample_rate, cfg.width, cfg.height) {
            Ok(f) => f,
            Err(e) => return invalid(warmup_s, e.to_string()),
        };
        state.preprocess(&frame).expect("frame shape matches state");
        let (r, _) = state.motion_pathway();
        if n >= warm {
            total += params.score_gain * r;
        }
    }
    SweepCell {
        sf_upc: sf,
        tf_hz: tf,
        score: Some(total / measure as f64),
        warmup_s,
        invalid: None,
    }
}

/// Mean steady-state score of every (SF, TF) grating. Cells are evaluated in
/// parallel with private model state; the result does not depend on the
/// evaluation order.
pub fn sweep_frequencies(
    sf_values: &[f64],
    tf_values: &[f64],
    cfg: &SweepConfig,
    params: &AvdmParams,
) -> Result<SweepGrid> {
    params.validate()?;
    if sf_values.is_empty() || tf_values.is_empty() {
        return Err(Error::InvalidArgument("sweep axes must be non-empty".into()));
    }
    let coords: Vec<(usize, usize)> = (0..sf_values.len())
        .flat_map(|i| (0..tf_values.len()).map(move |j| (i, j)))
        .collect();
    let flat: Vec<SweepCell> = coords
        .par_iter()
        .map(|&(i, j)| sweep_cell(sf_values[i], tf_values[j], cfg, params))
        .collect();
    let cells = flat
        .chunks(tf_values.len())
        .map(|c| c.to_vec())
        .collect();
    Ok(SweepGrid {
        sf_values: sf_values.to_vec(),
        tf_values: tf_values.to_vec(),
        cells,
        config: cfg.clone(),
    })
}

/// Fit data from drifting gratings with known angular velocity: per cell,
/// the mean post-warm-up motion response and the texture estimate.
/// Cells with zero TF or violating the Nyquist limit are skipped.
pub fn calibration_samples(
    sf_values: &[f64],
    tf_values: &[f64],
    cfg: &SweepConfig,
    params: &AvdmParams,
) -> Result<Vec<FitSample>> {
    params.validate()?;
    let coords: Vec<(f64, f64)> = sf_values
        .iter()
        .flat_map(|&sf| tf_values.iter().map(move |&tf| (sf, tf)))
        .filter(|&(_, tf)| tf > 0.0 && cfg.sample_rate >= 2.0 * tf)
        .collect();
    coords
        .par_iter()
        .map(|&(sf, tf)| {
            let spec = cfg.grating(sf, tf);
            spec.validate()?;
            let warm = cfg.warmup_frames(tf, params);
            let measure = (cfg.duration_s * cfg.sample_rate).round().max(1.0) as usize;
            let mut state = AvdmState::new(cfg.width, cfg.height, cfg.sample_rate, cfg.fov_deg, params)?;
            let (mut r, mut lambda, mut c_hat) = (0.0, 0.0, 0.0);
            for n in 0..warm + measure {
                let out = state.step(&spec.frame(n, cfg.sample_rate, cfg.width, cfg.height)?, params)?;
                if n >= warm {
                    r += out.r;
                    lambda += out.lambda;
                    c_hat += out.c_hat;
                }
            }
            let m = measure as f64;
            Ok(FitSample {
                omega_true: spec.angular_velocity_dps(),
                lambda: lambda / m,
                c_hat: c_hat / m,
                r: r / m,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Sf,
    Tf,
}

/// Adjacent pair along `axis` whose score does not increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axis: Axis,
    /// Value held fixed on the other axis.
    pub fixed: f64,
    pub lower: f64,
    pub upper: f64,
    pub score_lower: f64,
    pub score_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Per TF value: does the score strictly increase along SF?
    pub sf_increasing: Vec<(f64, Option<bool>)>,
    /// Per SF value: Spearman rank correlation between TF and score.
    pub tf_spearman: Vec<(f64, Option<f64>)>,
    pub violations: Vec<Violation>,
    pub notices: Vec<String>,
}

impl MonotonicityReport {
    pub fn all_sf_increasing(&self) -> bool {
        self.sf_increasing.iter().all(|(_, f)| *f == Some(true))
    }

    pub fn min_tf_spearman(&self) -> Option<f64> {
        self.tf_spearman
            .iter()
            .filter_map(|(_, r)| *r)
            .reduce(f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("SF ordering (strict increase along SF at fixed TF)\n");
        for (tf, flag) in &self.sf_increasing {
            let s = match flag {
                Some(true) => "increasing",
                Some(false) => "NOT increasing",
                None => "skipped",
            };
            writeln!(out, "  TF {tf:>8} Hz: {s}").unwrap();
        }
        out.push_str("TF ordering (Spearman rho along TF at fixed SF)\n");
        for (sf, rho) in &self.tf_spearman {
            match rho {
                Some(r) => writeln!(out, "  SF {sf:>8} upc: rho = {r:.4}").unwrap(),
                None => writeln!(out, "  SF {sf:>8} upc: skipped").unwrap(),
            }
        }
        writeln!(out, "violations: {}", self.violations.len()).unwrap();
        for v in &self.violations {
            let (axis, fixed_unit, unit) = match v.axis {
                Axis::Sf => ("SF", "Hz", "upc"),
                Axis::Tf => ("TF", "upc", "Hz"),
            };
            writeln!(
                out,
                "  {axis} {} -> {} {unit} at {} {fixed_unit}: {} -> {}",
                v.lower, v.upper, v.fixed, v.score_lower, v.score_upper
            )
            .unwrap();
        }
        for n in &self.notices {
            writeln!(out, "notice: {n}").unwrap();
        }
        out
    }
}

/// Ordering checks. A pure function of the grid.
pub fn check_monotonicity(grid: &SweepGrid) -> MonotonicityReport {
    let mut violations = Vec::new();
    let mut notices = Vec::new();
    let n_sf = grid.sf_values.len();
    let n_tf = grid.tf_values.len();

    let mut sf_increasing = Vec::with_capacity(n_tf);
    if n_sf < 2 {
        notices.push("fewer than 2 SF values: SF ordering skipped".into());
    }
    for j in 0..n_tf {
        let tf = grid.tf_values[j];
        if n_sf < 2 {
            sf_increasing.push((tf, None));
            continue;
        }
        let col: Vec<Option<f64>> = (0..n_sf).map(|i| grid.score(i, j)).collect();
        if col.iter().any(Option::is_none) {
            notices.push(format!("TF {tf} Hz has invalid cells: SF ordering skipped"));
            sf_increasing.push((tf, None));
            continue;
        }
        let mut ok = true;
        for i in 0..n_sf - 1 {
            let (a, b) = (col[i].unwrap(), col[i + 1].unwrap());
            if b <= a {
                ok = false;
                violations.push(Violation {
                    axis: Axis::Sf,
                    fixed: tf,
                    lower: grid.sf_values[i],
                    upper: grid.sf_values[i + 1],
                    score_lower: a,
                    score_upper: b,
                });
            }
        }
        sf_increasing.push((tf, Some(ok)));
    }

    let mut tf_spearman = Vec::with_capacity(n_sf);
    if n_tf < 2 {
        notices.push("fewer than 2 TF values: TF ordering skipped".into());
    }
    for i in 0..n_sf {
        let sf = grid.sf_values[i];
        if n_tf < 2 {
            tf_spearman.push((sf, None));
            continue;
        }
        let pairs: Vec<(f64, f64)> = (0..n_tf)
            .filter_map(|j| grid.score(i, j).map(|s| (grid.tf_values[j], s)))
            .collect();
        for w in pairs.windows(2) {
            if w[1].1 <= w[0].1 {
                violations.push(Violation {
                    axis: Axis::Tf,
                    fixed: sf,
                    lower: w[0].0,
                    upper: w[1].0,
                    score_lower: w[0].1,
                    score_upper: w[1].1,
                });
            }
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let rho = spearman(&x, &y);
        if rho.is_none() {
            notices.push(format!("SF {sf} upc: Spearman undefined"));
        }
        tf_spearman.push((sf, rho));
    }

    MonotonicityReport {
        sf_increasing,
        tf_spearman,
        violations,
        notices,
    }
}

/// Ranks starting at 1; ties share their average rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &k in &idx[start..end] {
            out[k] = avg;
        }
        start = end;
    }
    out
}

/// Spearman rank correlation; `None` for fewer than two points or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::generate_grating;
    use proptest::prelude::*;

    fn grid(m: Vec<Vec<f64>>) -> SweepGrid {
        let sf = (0..m.len()).map(|i| (i + 1) as f64).collect();
        let tf = (0..m[0].len()).map(|j| (j + 1) as f64).collect();
        SweepGrid::from_matrix(sf, tf, m).unwrap()
    }

    #[test]
    fn ordered_matrix_is_clean() {
        let g = grid((0..4).map(|i| (0..5).map(|j| (10 * i + j) as f64).collect()).collect());
        let rep = check_monotonicity(&g);
        assert!(rep.all_sf_increasing());
        assert!(rep.tf_spearman.iter().all(|(_, r)| *r == Some(1.0)));
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn single_swap_is_the_only_violation() {
        let mut m: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| (100 * i + j) as f64).collect()).collect();
        m[1].swap(0, 1);
        let rep = check_monotonicity(&grid(m));
        assert_eq!(rep.violations.len(), 1);
        let v = &rep.violations[0];
        assert_eq!((v.axis, v.fixed, v.lower, v.upper), (Axis::Tf, 2.0, 1.0, 2.0));
        assert!(rep.all_sf_increasing());
    }

    #[test]
    fn short_axes_are_skipped_with_notice() {
        let rep = check_monotonicity(&grid(vec![vec![1.0, 2.0]]));
        assert_eq!(rep.sf_increasing, vec![(1.0, None), (2.0, None)]);
        assert!(!rep.notices.is_empty());
        assert_eq!(rep.tf_spearman[0].1, Some(1.0));
    }

    #[test]
    fn csv_round_trip_and_recomputable_flags() {
        let g = grid(vec![vec![1.0, 3.0, 2.0], vec![4.0, 5.0, 6.0]]);
        let back = SweepGrid::from_csv(&g.to_csv()).unwrap();
        assert_eq!(check_monotonicity(&back), check_monotonicity(&g));
    }

    /// Brute-force ranking: count smaller and equal entries.
    fn oracle_spearman(x: &[f64], y: &[f64]) -> f64 {
        let rank = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .map(|a| {
                    let less = v.iter().filter(|b| *b < a).count() as f64;
                    let eq = v.iter().filter(|b| *b == a).count() as f64;
                    less + (eq + 1.0) / 2.0
                })
                .collect()
        };
        let (rx, ry) = (rank(x), rank(y));
        let n = x.len() as f64;
        let cov = rx.iter().zip(&ry).map(|(a, b)| a * b).sum::<f64>() / n
            - (rx.iter().sum::<f64>() / n) * (ry.iter().sum::<f64>() / n);
        let var = |r: &[f64]| r.iter().map(|a| a * a).sum::<f64>() / n - (r.iter().sum::<f64>() / n).powi(2);
        cov / (var(&rx) * var(&ry)).sqrt()
    }

    proptest! {
        #[test]
        fn spearman_matches_brute_force(
            pairs in prop::collection::vec((0u8..20, -50.0f64..50.0), 3..30)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let Some(rho) = spearman(&x, &y) {
                prop_assert!((rho - oracle_spearman(&x, &y)).abs() < 1e-12);
            }
        }

        #[test]
        fn monotonicity_is_idempotent(m in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 4), 3)) {
            let g = grid(m);
            prop_assert_eq!(check_monotonicity(&g), check_monotonicity(&g));
        }
    }

    #[test]
    fn profile_shape_and_static_floor() {
        let p = AvdmParams::default();
        let v = generate_grating(&GratingSpec::new(10.0, 1.0), 1.0, 300.0, 100, 20).unwrap();
        let moving = profile_sequence(&v, 360.0, &p).unwrap();
        assert_eq!(moving.len(), v.len());
        let baseline = moving.iter().filter(|s| !s.warmup).map(|s| s.score).sum::<f64>()
            / moving.iter().filter(|s| !s.warmup).count() as f64;
        let still = generate_grating(&GratingSpec::new(10.0, 0.0), 1.0, 300.0, 100, 20).unwrap();
        let flat = profile_sequence(&still, 360.0, &p).unwrap();
        assert!(flat.iter().filter(|s| !s.warmup).all(|s| s.score < 0.01 * baseline));
        assert!(profile_sequence(&VideoSequence::new(vec![], 30.0).unwrap(), 360.0, &p).is_err());
    }

    #[test]
    fn grating_response_is_stationary() {
        let p = AvdmParams::default();
        let v = generate_grating(&GratingSpec::new(10.0, 5.0), 2.0, 300.0, 100, 10).unwrap();
        let s: Vec<f64> = profile_sequence(&v, 360.0, &p)
            .unwrap()
            .into_iter()
            .filter(|s| !s.warmup)
            .map(|s| s.score)
            .collect();
        // One-cycle windows (60 frames at 5 Hz).
        let means: Vec<f64> = s.chunks_exact(60).map(|c| c.iter().sum::<f64>() / 60.0).collect();
        let (lo, hi) = means.iter().fold((f64::MAX, 0.0f64), |(l, h), &m| (l.min(m), h.max(m)));
        assert!((hi - lo) / lo < 0.1, "{means:?}");
    }

    #[test]
    fn sweep_static_column_and_row_permutation() {
        let p = AvdmParams::default();
        let cfg = SweepConfig {
            height: 4,
            duration_s: 0.5,
            ..Default::default()
        };
        let g = sweep_frequencies(&[1.0, 10.0], &[0.0, 5.0], &cfg, &p).unwrap();
        assert!(g.score(0, 0).unwrap() < 1e-9 && g.score(1, 0).unwrap() < 1e-9);
        let swapped = sweep_frequencies(&[10.0, 1.0], &[0.0, 5.0], &cfg, &p).unwrap();
        assert_eq!(g.cells[0], swapped.cells[1]);
        assert_eq!(g.cells[1], swapped.cells[0]);
    }

    #[test]
    fn nyquist_cells_are_marked_invalid() {
        let p = AvdmParams::default();
        let cfg = SweepConfig {
            height: 2,
            duration_s: 0.1,
            ..Default::default()
        };
        let g = sweep_frequencies(&[5.0], &[150.0, 151.0], &cfg, &p).unwrap();
        assert!(g.score(0, 0).is_some());
        assert!(g.score(0, 1).is_none());
        assert!(g.cells[0][1].invalid.as_deref().unwrap().contains("Nyquist"));
    }
}
