//! Histogram and averaged-shifted-histogram density grids.
//!
//! Bin widths default to Scott's normal reference rule,
//! `h = 3.49 * s * n^(-1/3)`. The bivariate estimator averages `m_x * m_y`
//! shifted histograms, which is the same as triangular weighting of counts
//! on a grid `m` times finer than the bins.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::stats::sample_std;

pub const DEFAULT_SHIFTS: usize = 5;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Scott's rule bin width.
pub fn scott_bin_width(samples: &[f64]) -> Result<f64, DensityError> {
    if samples.len() < 2 {
        return Err(DensityError::DegenerateSamples("need at least two samples".into()));
    }
    let s = sample_std(samples).expect("n >= 2");
    if !s.is_finite() || s <= 0.0 {
        return Err(DensityError::DegenerateSamples("zero spread".into()));
    }
    Ok(3.49 * s / (samples.len() as f64).cbrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram1D {
    pub origin: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub n: u64,
}

impl Histogram1D {
    pub fn bin_left(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.bin_width
    }
}

/// Bins are `[origin + i h, origin + (i+1) h)` with `origin = floor(min/h) h`;
/// a value on the right edge of the last bin is counted in that bin.
pub fn histogram(samples: &[f64], width_override: Option<f64>) -> Result<Histogram1D, DensityError> {
    if samples.is_empty() {
        return Err(DensityError::DegenerateSamples("no samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(DensityError::DegenerateSamples("non-finite sample".into()));
    }
    let h = match width_override {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(DensityError::DegenerateSamples(format!("bin width {h}"))),
        None => scott_bin_width(samples)?,
    };
    let (min, max) = min_max(samples);
    let origin = (min / h).floor() * h;
    let nbins = (((max - origin) / h).ceil() as usize).max(1);
    let mut counts = vec![0u64; nbins];
    for &x in samples {
        let idx = (((x - origin) / h).floor() as usize).min(nbins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram1D {
        origin,
        bin_width: h,
        counts,
        n: samples.len() as u64,
    })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Bivariate ASH on a fine grid of `(x_bins * m_x + 2(m_x - 1))` by
/// `(y_bins * m_y + 2(m_y - 1))` cells. `density` is row-major in x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AshGrid2D {
    pub x_bins: usize,
    pub y_bins: usize,
    pub h_x: f64,
    pub h_y: f64,
    pub m_x: usize,
    pub m_y: usize,
    /// Left edge of the first fine cell on each axis.
    pub x_origin: f64,
    pub y_origin: f64,
    pub nx: usize,
    pub ny: usize,
    pub density: Vec<f64>,
}

impl AshGrid2D {
    pub fn delta_x(&self) -> f64 {
        self.h_x / self.m_x as f64
    }

    pub fn delta_y(&self) -> f64 {
        self.h_y / self.m_y as f64
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.density[ix * self.ny + iy]
    }

    pub fn x_center(&self, ix: usize) -> f64 {
        self.x_origin + (ix as f64 + 0.5) * self.delta_x()
    }

    pub fn y_center(&self, iy: usize) -> f64 {
        self.y_origin + (iy as f64 + 0.5) * self.delta_y()
    }

    pub fn max_density(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }
}

/// Axis range split into `bins`; a zero-width range is widened to one unit.
fn axis(values: &[f64], bins: usize) -> (f64, f64) {
    let (lo, hi) = min_max(values);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    (lo, (hi - lo) / bins as f64)
}

/// Averaged shifted histogram with `bins` coarse bins spanning the data
/// range on each axis and `m` shifts per axis.
pub fn ash2d(xs: &[f64], ys: &[f64], bins: (usize, usize), m: (usize, usize)) -> Result<AshGrid2D, DensityError> {
    if xs.len() != ys.len() {
        return Err(DensityError::DegenerateSamples(format!(
            "x has {} values but y has {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(DensityError::DegenerateSamples("need at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(DensityError::DegenerateSamples("non-finite sample".into()));
    }
    if bins.0 == 0 || bins.1 == 0 || m.0 == 0 || m.1 == 0 {
        return Err(DensityError::DegenerateSamples("bins and shifts must be >= 1".into()));
    }
    let (x_lo, h_x) = axis(xs, bins.0);
    let (y_lo, h_y) = axis(ys, bins.1);
    let (mx, my) = m;
    let dx = h_x / mx as f64;
    let dy = h_y / my as f64;
    let nx = bins.0 * mx + 2 * (mx - 1);
    let ny = bins.1 * my + 2 * (my - 1);

    let fine = |v: f64, lo: f64, d: f64, cells: usize| (((v - lo) / d).floor() as usize).min(cells - 1);
    let mut counts = vec![0u64; nx * ny];
    for (&x, &y) in xs.iter().zip(ys) {
        let ix = fine(x, x_lo, dx, bins.0 * mx) + (mx - 1);
        let iy = fine(y, y_lo, dy, bins.1 * my) + (my - 1);
        counts[ix * ny + iy] += 1;
    }

    let wx: Vec<f64> = (0..2 * mx - 1).map(|k| 1.0 - (k as f64 - (mx - 1) as f64).abs() / mx as f64).collect();
    let wy: Vec<f64> = (0..2 * my - 1).map(|k| 1.0 - (k as f64 - (my - 1) as f64).abs() / my as f64).collect();
    let norm = xs.len() as f64 * h_x * h_y;
    let mut density = vec![0.0; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            let c = counts[ix * ny + iy];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            for (a, w1) in wx.iter().enumerate() {
                let tx = ix + a;
                if tx < mx - 1 || tx - (mx - 1) >= nx {
                    continue;
                }
                let tx = tx - (mx - 1);
                for (b, w2) in wy.iter().enumerate() {
                    let ty = iy + b;
                    if ty < my - 1 || ty - (my - 1) >= ny {
                        continue;
                    }
                    density[tx * ny + ty - (my - 1)] += w1 * w2 * c;
                }
            }
        }
    }
    for d in &mut density {
        *d /= norm;
    }
    Ok(AshGrid2D {
        x_bins: bins.0,
        y_bins: bins.1,
        h_x,
        h_y,
        m_x: mx,
        m_y: my,
        x_origin: x_lo - (mx - 1) as f64 * dx,
        y_origin: y_lo - (my - 1) as f64 * dy,
        nx,
        ny,
        density,
    })
}

/// Coarse bin counts from per-axis Scott widths over the data range.
pub fn scott_bins(xs: &[f64], ys: &[f64]) -> Result<(usize, usize), DensityError> {
    let count = |v: &[f64]| -> Result<usize, DensityError> {
        let h = scott_bin_width(v)?;
        let (lo, hi) = min_max(v);
        Ok((((hi - lo) / h).ceil() as usize).max(1))
    };
    Ok((count(xs)?, count(ys)?))
}

pub fn write_histogram_csv<W: Write>(hist: &Histogram1D, writer: W) -> Result<(), DensityError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_left", "bin_right", "count"])?;
    for (i, c) in hist.counts.iter().enumerate() {
        w.write_record([
            hist.bin_left(i).to_string(),
            hist.bin_left(i + 1).to_string(),
            c.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_ash_csv<W: Write>(grid: &AshGrid2D, writer: W) -> Result<(), DensityError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x_center", "y_center", "density"])?;
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            w.write_record([
                grid.x_center(ix).to_string(),
                grid.y_center(iy).to_string(),
                grid.at(ix, iy).to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;

/// Bar chart of a histogram.
pub fn histogram_svg(hist: &Histogram1D, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let max = hist.counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let bw = SVG_W / hist.counts.len() as f64;
    for (i, &c) in hist.counts.iter().enumerate() {
        let h = (c as f64 / max) * (SVG_H - 20.0);
        let _ = writeln!(
            s,
            r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#4a78a8" stroke="#ffffff"/>"##,
            i as f64 * bw,
            SVG_H - h,
            bw,
            h
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Cells shaded by decile of the maximum density; empty cells are omitted.
pub fn ash_svg(grid: &AshGrid2D, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let max = grid.max_density();
    let cw = SVG_W / grid.nx as f64;
    let ch = SVG_H / grid.ny as f64;
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            let d = grid.at(ix, iy);
            if d <= 0.0 || max <= 0.0 {
                continue;
            }
            let decile = ((d / max) * 10.0).ceil().clamp(1.0, 10.0);
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#b03a2e" fill-opacity="{:.1}"/>"##,
                ix as f64 * cw,
                SVG_H - (iy + 1) as f64 * ch,
                cw,
                ch,
                decile / 10.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
