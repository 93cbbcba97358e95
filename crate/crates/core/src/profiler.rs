//! Spatial response maps and above-threshold histograms built from
//! navigation trajectories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::arena::Trajectory;
use crate::error::{Error, Result};

pub const DEFAULT_CELLS: usize = 20;
pub const DEFAULT_THRESHOLD: f64 = 100.0;
pub const DEFAULT_BIN_WIDTH: f64 = 20.0;
pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub count: u64,
    pub sum: f64,
    pub max: f64,
}

impl CellStats {
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    fn add(&mut self, v: f64) {
        self.max = if self.count == 0 { v } else { self.max.max(v) };
        self.count += 1;
        self.sum += v;
    }

    fn merge(&mut self, other: &CellStats) {
        if other.count == 0 {
            return;
        }
        self.max = if self.count == 0 { other.max } else { self.max.max(other.max) };
        self.count += other.count;
        self.sum += other.sum;
    }
}

/// Square grid over the arena with per-cell score aggregates.
/// Cell `(ix, iy)` is stored at `iy * cells + ix`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMap {
    pub cells: usize,
    pub side_m: f64,
    pub stats: Vec<CellStats>,
}

impl DensityMap {
    pub fn new(cells: usize, side_m: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidArgument("map needs at least one cell".into()));
        }
        if !(side_m > 0.0) {
            return Err(Error::InvalidArgument(format!("arena side must be positive, got {side_m}")));
        }
        Ok(DensityMap {
            cells,
            side_m,
            stats: vec![CellStats::default(); cells * cells],
        })
    }

    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let idx = |p: f64| ((p / self.side_m * self.cells as f64).floor().max(0.0) as usize).min(self.cells - 1);
        (idx(x), idx(y))
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let w = self.side_m / self.cells as f64;
        ((ix as f64 + 0.5) * w, (iy as f64 + 0.5) * w)
    }

    pub fn add(&mut self, x: f64, y: f64, value: f64) {
        let (ix, iy) = self.cell_of(x, y);
        self.stats[iy * self.cells + ix].add(value);
    }

    pub fn get(&self, ix: usize, iy: usize) -> &CellStats {
        &self.stats[iy * self.cells + ix]
    }

    /// Cell-wise merge of a map over the same grid.
    pub fn merge(&mut self, other: &DensityMap) -> Result<()> {
        if other.cells != self.cells || other.side_m != self.side_m {
            return Err(Error::InvalidArgument("cannot merge maps over different grids".into()));
        }
        for (a, b) in self.stats.iter_mut().zip(&other.stats) {
            a.merge(b);
        }
        Ok(())
    }

    pub fn total_count(&self) -> u64 {
        self.stats.iter().map(|c| c.count).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ix,iy,x,y,count,mean,max\n");
        for iy in 0..self.cells {
            for ix in 0..self.cells {
                let c = self.get(ix, iy);
                let (x, y) = self.cell_center(ix, iy);
                let (mean, max) = match c.mean() {
                    Some(m) => (m.to_string(), c.max.to_string()),
                    None => (String::new(), String::new()),
                };
                writeln!(out, "{ix},{iy},{x},{y},{},{mean},{max}", c.count).unwrap();
            }
        }
        out
    }
}

/// Bins every post-warm-up sample by position.
pub fn build_map(traj: &Trajectory, cells: usize) -> Result<DensityMap> {
    let mut map = DensityMap::new(cells, traj.arena_side_m)?;
    for s in traj.samples.iter().filter(|s| !s.response.warmup) {
        map.add(s.x, s.y, s.response.score);
    }
    Ok(map)
}

/// Counts of scores above `threshold`, in bins of `bin_width` starting at
/// the threshold. The last bin is open-ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdHistogram {
    pub threshold: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl ThresholdHistogram {
    pub fn new(threshold: f64, bin_width: f64, bins: usize) -> Result<Self> {
        if !(threshold >= 0.0) {
            return Err(Error::InvalidArgument(format!("threshold must be >= 0, got {threshold}")));
        }
        if !(bin_width > 0.0) || bins == 0 {
            return Err(Error::InvalidArgument("histogram needs positive bin width and at least one bin".into()));
        }
        Ok(ThresholdHistogram {
            threshold,
            bin_width,
            counts: vec![0; bins],
        })
    }

    pub fn add(&mut self, score: f64) {
        if score > self.threshold {
            let k = ((score - self.threshold) / self.bin_width).floor() as usize;
            let last = self.counts.len() - 1;
            self.counts[k.min(last)] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(lower, upper)` edges of bin `k`; the last upper edge is infinite.
    pub fn edges(&self, k: usize) -> (f64, f64) {
        let lo = self.threshold + k as f64 * self.bin_width;
        let hi = if k + 1 == self.counts.len() {
            f64::INFINITY
        } else {
            lo + self.bin_width
        };
        (lo, hi)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lower,upper,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.edges(k);
            let hi = if hi.is_finite() { hi.to_string() } else { "inf".into() };
            writeln!(out, "{lo},{hi},{c}").unwrap();
        }
        out
    }
}

pub fn build_histogram(traj: &Trajectory, threshold: f64, bin_width: f64, bins: usize) -> Result<ThresholdHistogram> {
    let mut hist = ThresholdHistogram::new(threshold, bin_width, bins)?;
    for s in traj.samples.iter().filter(|s| !s.response.warmup) {
        hist.add(s.response.score);
    }
    Ok(hist)
}

/// Mean post-warm-up score near the walls and in the central region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMeans {
    pub wall: Option<f64>,
    pub wall_count: usize,
    pub central: Option<f64>,
    pub central_count: usize,
}

impl RegionMeans {
    pub fn ratio(&self) -> Option<f64> {
        Some(self.wall? / self.central?)
    }
}

/// Wall band: within `wall_band_m` of any wall. Central region: within
/// `central_radius_m` of the arena centre.
pub fn region_means(traj: &Trajectory, wall_band_m: f64, central_radius_m: f64) -> RegionMeans {
    let side = traj.arena_side_m;
    let c = side / 2.0;
    let (mut ws, mut wn, mut cs, mut cn) = (0.0, 0usize, 0.0, 0usize);
    for s in traj.samples.iter().filter(|s| !s.response.warmup) {
        let wall = s.x.min(side - s.x).min(s.y).min(side - s.y);
        if wall <= wall_band_m {
            ws += s.response.score;
            wn += 1;
        }
        if (s.x - c).hypot(s.y - c) <= central_radius_m {
            cs += s.response.score;
            cn += 1;
        }
    }
    RegionMeans {
        wall: (wn > 0).then(|| ws / wn as f64),
        wall_count: wn,
        central: (cn > 0).then(|| cs / cn as f64),
        central_count: cn,
    }
}

const MAP_PX: u32 = 400;
const HIST_W: u32 = 480;
const HIST_H: u32 = 300;
const MARGIN: u32 = 30;

/// Circle radius in pixels for a cell mean, given the largest cell mean.
pub fn circle_radius(mean: f64, max_mean: f64, cell_px: f64) -> f64 {
    if !(max_mean > 0.0) || !(mean > 0.0) {
        return 0.0;
    }
    0.5 * cell_px * (mean / max_mean).min(1.0).sqrt()
}

fn fill_rect(img: &mut RgbImage, x0: i64, y0: i64, x1: i64, y1: i64, color: Rgb<u8>) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    for y in y0.max(0)..y1.min(h) {
        for x in x0.max(0)..x1.min(w) {
            img.put_pixel(x as u32, y as u32, color);
        }
    }
}

fn map_image(map: &DensityMap) -> RgbImage {
    let mut img = RgbImage::from_pixel(MAP_PX, MAP_PX, Rgb([255, 255, 255]));
    let cell_px = MAP_PX as f64 / map.cells as f64;
    let max_mean = map.stats.iter().filter_map(|c| c.mean()).fold(0.0, f64::max);
    let border = Rgb([0, 0, 0]);
    fill_rect(&mut img, 0, 0, MAP_PX as i64, 1, border);
    fill_rect(&mut img, 0, MAP_PX as i64 - 1, MAP_PX as i64, MAP_PX as i64, border);
    fill_rect(&mut img, 0, 0, 1, MAP_PX as i64, border);
    fill_rect(&mut img, MAP_PX as i64 - 1, 0, MAP_PX as i64, MAP_PX as i64, border);
    for iy in 0..map.cells {
        for ix in 0..map.cells {
            let Some(mean) = map.get(ix, iy).mean() else { continue };
            let r = circle_radius(mean, max_mean, cell_px);
            let cx = (ix as f64 + 0.5) * cell_px;
            // Arena y grows upwards; image rows grow downwards.
            let cy = MAP_PX as f64 - (iy as f64 + 0.5) * cell_px;
            let (x0, x1) = ((cx - r).floor() as i64, (cx + r).ceil() as i64);
            let (y0, y1) = ((cy - r).floor() as i64, (cy + r).ceil() as i64);
            for py in y0.max(0)..y1.min(MAP_PX as i64) {
                for px in x0.max(0)..x1.min(MAP_PX as i64) {
                    let (dx, dy) = (px as f64 + 0.5 - cx, py as f64 + 0.5 - cy);
                    if dx * dx + dy * dy <= r * r {
                        img.put_pixel(px as u32, py as u32, Rgb([200, 40, 40]));
                    }
                }
            }
        }
    }
    img
}

fn histogram_image(hist: &ThresholdHistogram) -> RgbImage {
    let mut img = RgbImage::from_pixel(HIST_W, HIST_H, Rgb([255, 255, 255]));
    let (left, bottom) = (MARGIN as i64, (HIST_H - MARGIN) as i64);
    let (right, top) = ((HIST_W - MARGIN / 2) as i64, (MARGIN / 2) as i64);
    let axis = Rgb([0, 0, 0]);
    fill_rect(&mut img, left, top, left + 1, bottom + 1, axis);
    fill_rect(&mut img, left, bottom, right, bottom + 1, axis);
    let peak = hist.counts.iter().copied().max().unwrap_or(0);
    if peak == 0 {
        return img;
    }
    let slot = (right - left - 2) as f64 / hist.counts.len() as f64;
    for (k, &c) in hist.counts.iter().enumerate() {
        let height = ((bottom - top) as f64 * c as f64 / peak as f64).round() as i64;
        let x0 = left + 2 + (k as f64 * slot + 0.1 * slot).round() as i64;
        let x1 = left + 2 + ((k + 1) as f64 * slot - 0.1 * slot).round() as i64;
        fill_rect(&mut img, x0, bottom - height, x1, bottom, Rgb([40, 80, 200]));
    }
    img
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes `map.png`, `map.csv`, `histogram.png` and `histogram.csv` into
/// `out_dir`, creating it if needed. Returns the written paths.
pub fn render_figures(map: &DensityMap, hist: &ThresholdHistogram, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let paths: Vec<PathBuf> = ["map.csv", "histogram.csv", "map.png", "histogram.png"]
        .iter()
        .map(|n| out_dir.join(n))
        .collect();
    write_file(&paths[0], map.to_csv().as_bytes())?;
    write_file(&paths[1], hist.to_csv().as_bytes())?;
    map_image(map).save(&paths[2]).map_err(|e| save_error(&paths[2], e))?;
    histogram_image(hist).save(&paths[3]).map_err(|e| save_error(&paths[3], e))?;
    Ok(paths)
}

fn save_error(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Image(other),
    }
}
