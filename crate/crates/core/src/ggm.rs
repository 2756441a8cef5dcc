//! Genuine multipartite entanglement of finite-chain ground states: maximal
//! Schmidt weights over bipartitions, sweep drivers over the coupling, kink
//! detection, and the finite-size power-law fits.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::ed::{self, FiniteSweeper};
use crate::linalg::{self, HermitianOp, LanczosOptions, C64};
use crate::series::{self, DiscontinuityFlag, SweepSeries};
use crate::{Error, Result};

/// All-bipartitions enumeration is capped here: 2^(N-1) - 1 splits.
pub const MAX_ALL_BIPARTITION_SITES: usize = 14;

/// Default detector threshold, shared with the concurrence sweep.
pub use crate::twosite::DEFAULT_THRESHOLD_FACTOR;

/// One side of a bipartition of `sites` spins, as a bitmask of part A.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    mask: u32,
    sites: usize,
}

impl Bipartition {
    /// Any proper nonempty subset is a valid part A; enumeration emits only
    /// canonical representatives, but complements are accepted here so the
    /// complement symmetry is testable.
    pub fn new(mask: u32, sites: usize) -> Result<Self> {
        let full: u32 = if sites >= 32 {
            u32::MAX
        } else {
            (1 << sites) - 1
        };
        if sites < 2 || mask == 0 || mask & !full != 0 || mask == full {
            return Err(Error::InvalidBipartition);
        }
        Ok(Self { mask, sites })
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn part_size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn complement(&self) -> Self {
        let full: u32 = (1 << self.sites) - 1;
        Self {
            mask: self.mask ^ full,
            sites: self.sites,
        }
    }
}

/// Which family of splits a finite-chain measure ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartitionMode {
    /// One representative per complementary pair of proper subsets.
    All,
    /// Contiguous blocks of length 1..=N/2 at every starting site (periodic).
    ContiguousBlocks,
}

/// Enumerate bipartitions for a chain of `sites` spins.
pub fn enumerate_bipartitions(sites: usize, mode: BipartitionMode) -> Result<Vec<Bipartition>> {
    if !(2..=ed::MAX_SITES).contains(&sites) {
        return Err(Error::UnsupportedChainLength { sites });
    }
    let mut out = Vec::new();
    match mode {
        BipartitionMode::All => {
            if sites > MAX_ALL_BIPARTITION_SITES {
                return Err(Error::TooManyBipartitions { sites });
            }
            let full: u32 = (1 << sites) - 1;
            let half = sites / 2;
            for mask in 1..full {
                let size = mask.count_ones() as usize;
                if size > half {
                    continue;
                }
                // Even halves pair with complements of the same size; keep
                // the representative containing site 0.
                if 2 * size == sites && mask & 1 == 0 {
                    continue;
                }
                out.push(Bipartition { mask, sites });
            }
        }
        BipartitionMode::ContiguousBlocks => {
            let full: u32 = (1 << sites) - 1;
            for len in 1..=sites / 2 {
                let base: u32 = (1 << len) - 1;
                for start in 0..sites {
                    let rotated = ((base << start) | (base >> (sites - start) as u32)) & full;
                    out.push(Bipartition {
                        mask: rotated,
                        sites,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Reduced density operator of part A applied implicitly: rho_A v = M (M+ v)
/// where M is the state reshaped to (A-configurations) x (B-configurations).
struct ReducedDensityOp<'a> {
    psi: &'a [C64],
    a_scatter: Vec<usize>,
    b_scatter: Vec<usize>,
    work: RefCell<Vec<C64>>,
}

impl<'a> ReducedDensityOp<'a> {
    fn new(psi: &'a [C64], mask: u32, sites: usize) -> Self {
        let a_scatter = scatter_table(mask, sites);
        let b_scatter = scatter_table(!mask & ((1 << sites) - 1), sites);
        let db = b_scatter.len();
        Self {
            psi,
            a_scatter,
            b_scatter,
            work: RefCell::new(vec![C64::new(0.0, 0.0); db]),
        }
    }
}

/// For each index over a part's configurations, its bit pattern scattered
/// into the full-chain mask positions.
fn scatter_table(mask: u32, sites: usize) -> Vec<usize> {
    let positions: Vec<usize> = (0..sites).filter(|i| mask >> i & 1 == 1).collect();
    let size = 1usize << positions.len();
    let mut table = Vec::with_capacity(size);
    for idx in 0..size {
        let mut full = 0usize;
        for (j, &p) in positions.iter().enumerate() {
            full |= ((idx >> j) & 1) << p;
        }
        table.push(full);
    }
    table
}

impl HermitianOp for ReducedDensityOp<'_> {
    fn dim(&self) -> usize {
        self.a_scatter.len()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let mut t = self.work.borrow_mut();
        // t = M+ x over B-configurations.
        for (j, tj) in t.iter_mut().enumerate() {
            let base = self.b_scatter[j];
            let mut acc = C64::new(0.0, 0.0);
            for (i, xi) in x.iter().enumerate() {
                acc += self.psi[base | self.a_scatter[i]].conj() * xi;
            }
            *tj = acc;
        }
        // y = M t.
        for (i, yi) in y.iter_mut().enumerate() {
            let base = self.a_scatter[i];
            let mut acc = C64::new(0.0, 0.0);
            for (j, tj) in t.iter().enumerate() {
                acc += self.psi[base | self.b_scatter[j]] * tj;
            }
            *yi = acc;
        }
    }
}

/// Largest eigenvalue of the reduced state of part A (the square of the
/// maximal Schmidt coefficient across the split). Computed on the smaller
/// side of the split; the spectrum is shared with the complement.
pub fn max_schmidt_sq(vector: &[C64], part: &Bipartition) -> Result<f64> {
    if vector.len() != 1usize << part.sites() {
        return Err(Error::InvalidBipartition);
    }
    let norm = linalg::norm2(vector);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedVector { norm });
    }
    let work = if 2 * part.part_size() > part.sites() {
        part.complement()
    } else {
        *part
    };
    let op = ReducedDensityOp::new(vector, work.mask(), work.sites());
    let opts = LanczosOptions {
        residual_tol: 1e-12,
        ..LanczosOptions::default()
    };
    let (val, _, _) = linalg::largest_eigenpair(&op, &opts)?;
    Ok(val.clamp(0.0, 1.0))
}

/// Genuine multipartite entanglement of a pure state: one minus the largest
/// Schmidt weight over the enumerated bipartitions.
pub fn ggm_finite(vector: &[C64], sites: usize, mode: BipartitionMode) -> Result<f64> {
    let mut best = 0.0f64;
    for part in enumerate_bipartitions(sites, mode)? {
        let w = max_schmidt_sq(vector, &part)?;
        if w > best {
            best = w;
        }
    }
    Ok(1.0 - best)
}

/// One grid point of a finite-chain sweep.
#[derive(Debug, Clone)]
pub struct FinitePoint {
    pub alpha: f64,
    pub energy: f64,
    pub gap: f64,
    pub magnetization: f64,
    /// NaN when the ground state is (near-)degenerate and the measure is
    /// ill-defined.
    pub ggm: f64,
    pub degenerate: bool,
}

/// Evaluate one grid point: ground-state data plus the GGM.
pub fn finite_point(
    sweeper: &FiniteSweeper,
    alpha: f64,
    mode: BipartitionMode,
) -> Result<FinitePoint> {
    let gs = sweeper.ground(alpha)?;
    let ggm = if gs.degenerate {
        f64::NAN
    } else {
        ggm_finite(&gs.vector, sweeper.sites(), mode)?
    };
    Ok(FinitePoint {
        alpha,
        energy: gs.energy,
        gap: gs.gap,
        magnetization: gs.magnetization,
        ggm,
        degenerate: gs.degenerate,
    })
}

/// Like [`finite_point`], but degrades per-point solver failures to a
/// NaN-marked point so a sweep can keep going; anything that is not a
/// solver-convergence problem still propagates.
pub fn finite_point_lenient(
    sweeper: &FiniteSweeper,
    alpha: f64,
    mode: BipartitionMode,
) -> Result<FinitePoint> {
    match finite_point(sweeper, alpha, mode) {
        Err(Error::SolverStagnation { .. }) | Err(Error::EigenNoConverge { .. }) => {
            Ok(FinitePoint {
                alpha,
                energy: f64::NAN,
                gap: f64::NAN,
                magnetization: f64::NAN,
                ggm: f64::NAN,
                degenerate: false,
            })
        }
        other => other,
    }
}

/// A full finite-chain sweep: energies, gaps, magnetization, the GGM series
/// with its detected kinks, and refined gap near-closings.
#[derive(Debug, Clone)]
pub struct FiniteSweep {
    pub sites: usize,
    pub energy: Vec<f64>,
    pub gap: Vec<f64>,
    pub magnetization: Vec<f64>,
    pub ggm: SweepSeries,
    pub near_closings: Vec<f64>,
}

/// Sweep a finite chain over `alpha_grid`; grid points whose sector solve
/// fails to converge are carried as NaN markers rather than aborting the
/// sweep (see [`finite_sweep_with`]).
pub fn finite_sweep(
    sites: usize,
    alpha_grid: &[f64],
    mode: BipartitionMode,
    field: Option<f64>,
    threshold_factor: f64,
) -> Result<FiniteSweep> {
    let sweeper = FiniteSweeper::new(sites, field)?;
    let points: Result<Vec<FinitePoint>> = alpha_grid
        .iter()
        .map(|&a| finite_point_lenient(&sweeper, a, mode))
        .collect();
    finite_sweep_with(&sweeper, alpha_grid, &points?, threshold_factor)
}

/// Assemble a sweep from already-computed points (grid order). Split out so
/// callers can parallelize the per-point work.
pub fn finite_sweep_with(
    sweeper: &FiniteSweeper,
    alpha_grid: &[f64],
    points: &[FinitePoint],
    threshold_factor: f64,
) -> Result<FiniteSweep> {
    series::check_grid(alpha_grid)?;
    if points.len() != alpha_grid.len() {
        return Err(Error::InsufficientPoints {
            needed: alpha_grid.len(),
            got: points.len(),
        });
    }
    let energy: Vec<f64> = points.iter().map(|p| p.energy).collect();
    let gap: Vec<f64> = points.iter().map(|p| p.gap).collect();
    let magnetization: Vec<f64> = points.iter().map(|p| p.magnetization).collect();
    let ggm_vals: Vec<f64> = points.iter().map(|p| p.ggm).collect();
    let mut ggm = SweepSeries::new(alpha_grid.to_vec(), ggm_vals)?;
    if alpha_grid.len() >= 5 {
        ggm.detect(threshold_factor)?;
    }
    let near_closings = ed::refine_near_closings(sweeper, alpha_grid, &gap);
    Ok(FiniteSweep {
        sites: sweeper.sites(),
        energy,
        gap,
        magnetization,
        ggm,
        near_closings,
    })
}

/// GGM-only sweep, per-point failures carried as NaN gap markers.
pub fn ggm_sweep(
    sites: usize,
    alpha_grid: &[f64],
    mode: BipartitionMode,
    field: Option<f64>,
    threshold_factor: f64,
) -> Result<SweepSeries> {
    Ok(finite_sweep(sites, alpha_grid, mode, field, threshold_factor)?.ggm)
}

/// Detector locations for an assembled series (see [`series`] for the flag
/// variant carrying jump magnitudes).
pub fn detect_discontinuities(series: &SweepSeries, threshold_factor: f64) -> Result<Vec<f64>> {
    series::detect_discontinuities(&series.grid, &series.values, threshold_factor)
}

/// The two transition markers read off a finite-chain GGM sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoints {
    pub first: Option<DiscontinuityFlag>,
    pub second: Option<DiscontinuityFlag>,
}

/// Jump-magnitude reading: the largest-jump flag in (1, 1.5) and the
/// largest-jump flag above it. Reliable only while the second transition
/// stays outside the (1, 1.5) window; see
/// [`extract_transition_points_anchored`] for the closing-anchored reading.
pub fn extract_transition_points(flags: &[DiscontinuityFlag]) -> TransitionPoints {
    let first = flags
        .iter()
        .filter(|f| f.alpha > 1.0 && f.alpha < 1.5)
        .max_by(|a, b| a.jump.total_cmp(&b.jump))
        .copied();
    let second = first.and_then(|f0| {
        flags
            .iter()
            .filter(|f| f.alpha > f0.alpha)
            .max_by(|a, b| a.jump.total_cmp(&b.jump))
            .copied()
    });
    TransitionPoints { first, second }
}

/// Closing-anchored reading: derivative kinks of the measure occur at level
/// crossings, so only flags within `window` of a refined gap near-closing
/// count; the two lowest such locations above 1 are the markers. For larger
/// chains both transitions move inside (1, 1.5), where the jump-magnitude
/// rule picks the wrong one; the anchored reading stays valid there. Falls
/// back to the jump rule when no anchors are available.
pub fn extract_transition_points_anchored(
    flags: &[DiscontinuityFlag],
    anchors: &[f64],
    window: f64,
) -> TransitionPoints {
    if anchors.is_empty() {
        return extract_transition_points(flags);
    }
    let mut anchored: Vec<DiscontinuityFlag> = flags
        .iter()
        .filter(|f| f.alpha > 1.0 && anchors.iter().any(|&a| (a - f.alpha).abs() <= window))
        .copied()
        .collect();
    anchored.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    TransitionPoints {
        first: anchored.first().copied(),
        second: anchored.get(1).copied(),
    }
}

/// Power-law fit of pseudo-critical points: alpha_N ~ alpha_c + c N^(-p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub alpha_c: f64,
    /// Exponent p (minus the log-log slope).
    pub exponent: f64,
    /// Prefactor c.
    pub prefactor: f64,
    /// Coefficient of determination of the log-log line.
    pub r_squared: f64,
}

/// Least squares through (ln N, ln(alpha_N - alpha_c)). Needs at least three
/// points, each with alpha_N above alpha_c.
pub fn fit_power_law(points: &[(f64, f64)], alpha_c: f64) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, alpha_n) in points {
        let shift = alpha_n - alpha_c;
        if shift.is_nan() || shift <= 0.0 || n.is_nan() || n <= 0.0 {
            return Err(Error::NonPositiveShift { alpha_n });
        }
        xs.push(n.ln());
        ys.push(shift.ln());
    }
    let m = points.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { needed: 3, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let fit = ScalingFit {
        alpha_c,
        exponent: -slope,
        prefactor: intercept.exp(),
        r_squared,
    };
    if !fit.exponent.is_finite() || !fit.prefactor.is_finite() {
        return Err(Error::NonPositiveShift { alpha_n: f64::NAN });
    }
    Ok(fit)
}
