//! Sweep-series container shared by the concurrence, gap, and GGM scans:
//! finite-difference derivatives and a scale-free kink detector.
//!
//! Invalid points are carried as NaN so a sweep can survive per-point solver
//! failures; the stencils skip them.

use alloc::vec::Vec;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Window (in grid points) over which the local median of second differences
/// is taken: 10 on each side.
const MEDIAN_HALF_WINDOW: usize = 10;

/// Flags closer than this many grid steps are merged into one.
const MERGE_STEPS: usize = 3;

/// An (alpha, observable) series over a sorted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    /// Strictly increasing parameter grid.
    pub grid: Vec<f64>,
    /// Observable values; NaN marks an invalid point.
    pub values: Vec<f64>,
    /// Finite-difference derivative: central in the interior, one-sided at
    /// the ends, NaN where the stencil touches an invalid point.
    pub derivative: Option<Vec<f64>>,
    /// Detected derivative-discontinuity locations (alpha values).
    pub discontinuities: Vec<f64>,
}

impl SweepSeries {
    /// Wrap a (grid, values) pair, computing the derivative; detection is a
    /// separate step because the threshold is a caller choice.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::InsufficientPoints {
                needed: grid.len(),
                got: values.len(),
            });
        }
        let derivative = Some(derivative_series(&grid, &values));
        Ok(Self {
            grid,
            values,
            derivative,
            discontinuities: Vec::new(),
        })
    }

    /// Run the kink detector and store the merged flag locations.
    pub fn detect(&mut self, threshold_factor: f64) -> Result<&[f64]> {
        let flags = detect_discontinuity_flags(&self.grid, &self.values, threshold_factor)?;
        self.discontinuities = flags.iter().map(|f| f.alpha).collect();
        Ok(&self.discontinuities)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid
        .windows(2)
        .any(|w| w[0].is_nan() || w[1].is_nan() || w[1] <= w[0])
    {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Central-difference derivative on the interior, one-sided at the ends.
pub fn derivative_series(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let v = if n < 2 {
            f64::NAN
        } else if i == 0 {
            (values[1] - values[0]) / (grid[1] - grid[0])
        } else if i == n - 1 {
            (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2])
        } else {
            (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1])
        };
        d.push(v);
    }
    d
}

/// A flagged kink: grid index, location, and the second-difference magnitude
/// that triggered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscontinuityFlag {
    pub index: usize,
    pub alpha: f64,
    pub jump: f64,
}

/// Flag grid points whose absolute second difference exceeds
/// `threshold_factor` times the local median of second differences (window of
/// 21 points), then merge flags within three grid steps keeping the largest
/// jump. Median thresholding makes the detector invariant under affine
/// rescaling of the observable. Needs at least five points.
pub fn detect_discontinuity_flags(
    grid: &[f64],
    values: &[f64],
    threshold_factor: f64,
) -> Result<Vec<DiscontinuityFlag>> {
    let n = grid.len();
    if n < 5 {
        return Err(Error::InsufficientPoints { needed: 5, got: n });
    }
    check_grid(grid)?;

    // Second differences; NaN-poisoned stencils stay NaN and never flag.
    let mut d2 = Vec::with_capacity(n);
    d2.push(f64::NAN);
    for i in 1..n - 1 {
        d2.push(values[i - 1] - 2.0 * values[i] + values[i + 1]);
    }
    d2.push(f64::NAN);

    // Noise floor: second differences of flat or exactly linear data carry
    // rounding and solver noise with a near-zero local median, which would
    // otherwise flag pure noise. The floor scales with the data, keeping
    // affine invariance; structure below 1e-11 of the observable's scale is
    // treated as noise.
    let scale = values
        .iter()
        .filter(|v| !v.is_nan())
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    let noise_floor = 1e-11 * scale;

    let mut window = Vec::with_capacity(2 * MEDIAN_HALF_WINDOW + 1);
    let mut raw: Vec<DiscontinuityFlag> = Vec::new();
    for i in 1..n - 1 {
        let x = d2[i];
        if x.is_nan() {
            continue;
        }
        window.clear();
        let lo = i.saturating_sub(MEDIAN_HALF_WINDOW);
        let hi = (i + MEDIAN_HALF_WINDOW).min(n - 1);
        for item in d2.iter().take(hi + 1).skip(lo) {
            if !item.is_nan() {
                window.push(item.abs());
            }
        }
        window.sort_by(f64::total_cmp);
        let median = window[window.len() / 2];
        if x.abs() > (threshold_factor * median).max(noise_floor) {
            raw.push(DiscontinuityFlag {
                index: i,
                alpha: grid[i],
                jump: x.abs(),
            });
        }
    }

    // Merge runs of nearby flags to the maximal-jump representative.
    let mut merged: Vec<DiscontinuityFlag> = Vec::new();
    for f in raw {
        match merged.last_mut() {
            Some(last) if f.index - last.index <= MERGE_STEPS => {
                if f.jump > last.jump {
                    *last = f;
                }
            }
            _ => merged.push(f),
        }
    }
    Ok(merged)
}

/// Location-only view of the detector, sorted by alpha.
pub fn detect_discontinuities(
    grid: &[f64],
    values: &[f64],
    threshold_factor: f64,
) -> Result<Vec<f64>> {
    Ok(detect_discontinuity_flags(grid, values, threshold_factor)?
        .into_iter()
        .map(|f| f.alpha)
        .collect())
}

/// Build a uniform grid from `min` to `max` inclusive (last point clipped to
/// `max` when the step does not divide the span exactly).
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || max.is_nan() || min.is_nan() || max < min {
        return Err(Error::UnsortedGrid);
    }
    let count = ((max - min) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| min + i as f64 * step).collect();
    if let Some(last) = grid.last_mut() {
        if *last > max + 0.5 * step {
            grid.pop();
        } else {
            *last = last.min(max);
        }
    }
    Ok(grid)
}
