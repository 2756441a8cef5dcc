//! Exact diagonalization of the finite periodic chain in the computational
//! bitmask basis (bit i set = spin i up), blocked by conserved total Sz.
//!
//! The two-spin exchange flips antiparallel neighbor pairs; the three-spin
//! term flips the outer pair of a triple with a sign from the middle spin and
//! is purely imaginary in this basis, so sector matrices are complex
//! Hermitian. Sector structure is independent of `alpha`: couplings are
//! stored as a unit-coefficient pair (exchange, chiral) and combined at apply
//! time, so one build serves a whole sweep. The transverse field is constant
//! within a sector and is added analytically.
//!
//! A parity-resolved free-fermion solution of the same finite chain lives at
//! the bottom of the module and serves as the cross-validation oracle.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, HermitianOp, LanczosOptions, C64};
use crate::model::dispersion;
use crate::series::{self, SweepSeries};
use crate::{Error, Result};

pub const MIN_SITES: usize = 3;
pub const MAX_SITES: usize = 16;

/// Ground states closer than this (in units of J) count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Default symmetry-breaking field for odd chains, whose ground pair is
/// otherwise exactly degenerate.
pub const DEFAULT_ODD_FIELD: f64 = 1e-6;

/// Gaps below this (in units of J) count as a near-closing in scans.
pub const NEAR_CLOSING_GAP: f64 = 1e-3;

/// Finite-chain parameters: periodic boundary, `field` is the strength h of
/// the -(h/2) sum sigma^z term used to break odd-chain degeneracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub sites: usize,
    pub alpha: f64,
    pub field: f64,
}

impl ChainSpec {
    pub fn new(sites: usize, alpha: f64) -> Result<Self> {
        Self::with_field(sites, alpha, 0.0)
    }

    /// Default field for the parity of `sites`: zero for even chains, a small
    /// degeneracy-breaking field for odd ones.
    pub fn with_default_field(sites: usize, alpha: f64) -> Result<Self> {
        let field = if sites % 2 == 1 {
            DEFAULT_ODD_FIELD
        } else {
            0.0
        };
        Self::with_field(sites, alpha, field)
    }

    pub fn with_field(sites: usize, alpha: f64, field: f64) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&sites) {
            return Err(Error::UnsupportedChainLength { sites });
        }
        if !alpha.is_finite() || alpha < 0.0 || !field.is_finite() || field < 0.0 {
            return Err(Error::InvalidCouplings { j: 1.0, alpha });
        }
        Ok(Self {
            sites,
            alpha,
            field,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }
}

/// Ground-state data of a finite chain, energies in units of J.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Lowest energy.
    pub energy: f64,
    /// Gap to the second-lowest state (over all sectors).
    pub gap: f64,
    /// Normalized amplitudes over all 2^N basis states.
    pub vector: Vec<C64>,
    /// Gap below [`DEGENERACY_THRESHOLD`].
    pub degenerate: bool,
    /// <sum sigma^z>/N of the ground state; exact by sector membership.
    pub magnetization: f64,
}

// ---------------------------------------------------------------------------
// Hamiltonian terms
// ---------------------------------------------------------------------------

/// Off-diagonal contributions of one basis state: (target mask, exchange
/// coefficient, chiral unit coefficient). The chiral part enters as
/// i * alpha * coefficient.
fn state_couplings(mask: usize, sites: usize, out: &mut Vec<(usize, f64, f64)>) {
    out.clear();
    let bit = |m: usize, i: usize| (m >> i) & 1;
    for n in 0..sites {
        // Exchange on the bond (n, n+1): flips antiparallel pairs.
        let b = (n + 1) % sites;
        if bit(mask, n) != bit(mask, b) {
            let target = mask ^ ((1 << n) | (1 << b));
            push_coupling(out, target, -0.5, 0.0);
        }
        // Chiral triple centered on n: flips the outer pair (n-1, n+1).
        let a = (n + sites - 1) % sites;
        let c = (n + 1) % sites;
        let (ba, bc) = (bit(mask, a), bit(mask, c));
        if ba != bc {
            let target = mask ^ ((1 << a) | (1 << c));
            let s = if ba == 1 { 1.0 } else { -1.0 };
            let zn = if bit(mask, n) == 1 { 1.0 } else { -1.0 };
            push_coupling(out, target, 0.0, -0.25 * zn * s);
        }
    }
    out.sort_unstable_by_key(|e| e.0);
}

fn push_coupling(out: &mut Vec<(usize, f64, f64)>, target: usize, xx: f64, ts: f64) {
    // Short chains route several terms to the same pair of states.
    if let Some(e) = out.iter_mut().find(|e| e.0 == target) {
        e.1 += xx;
        e.2 += ts;
    } else {
        out.push((target, xx, ts));
    }
}

/// Diagonal field energy of a sector with `n_up` up spins.
fn field_offset(sites: usize, n_up: usize, field: f64) -> f64 {
    -(field / 2.0) * (2.0 * n_up as f64 - sites as f64)
}

// ---------------------------------------------------------------------------
// Full-space operator (probe surface)
// ---------------------------------------------------------------------------

/// Stored-sparse Hamiltonian over the full 2^N space.
pub struct Hamiltonian {
    spec: ChainSpec,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    xx: Vec<f64>,
    ts: Vec<f64>,
}

/// Build the full-space sparse Hamiltonian for probe-style checks
/// (Hermiticity, commutators, small dense validation).
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<Hamiltonian> {
    ChainSpec::with_field(spec.sites, spec.alpha, spec.field)?;
    let dim = spec.dim();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut xx = Vec::new();
    let mut ts = Vec::new();
    let mut scratch = Vec::new();
    row_ptr.push(0u32);
    for mask in 0..dim {
        state_couplings(mask, spec.sites, &mut scratch);
        for &(target, x, t) in scratch.iter() {
            cols.push(target as u32);
            xx.push(x);
            ts.push(t);
        }
        row_ptr.push(cols.len() as u32);
    }
    Ok(Hamiltonian {
        spec: *spec,
        row_ptr,
        cols,
        xx,
        ts,
    })
}

impl Hamiltonian {
    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    /// y = H x over the full computational basis.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        let alpha = self.spec.alpha;
        let field = self.spec.field;
        let sites = self.spec.sites;
        for (row, yr) in y.iter_mut().enumerate() {
            let mut acc = x[row] * field_offset(sites, row.count_ones() as usize, field);
            let lo = self.row_ptr[row] as usize;
            let hi = self.row_ptr[row + 1] as usize;
            for idx in lo..hi {
                let c = self.cols[idx] as usize;
                acc += Complex::new(self.xx[idx], alpha * self.ts[idx]) * x[c];
            }
            *yr = acc;
        }
    }

    /// Dense matrix for brute-force validation (small chains only).
    pub fn to_dense(&self) -> Vec<C64> {
        let dim = self.spec.dim();
        let mut h = vec![C64::new(0.0, 0.0); dim * dim];
        for row in 0..dim {
            h[row * dim + row] = C64::new(
                field_offset(self.spec.sites, row.count_ones() as usize, self.spec.field),
                0.0,
            );
            let lo = self.row_ptr[row] as usize;
            let hi = self.row_ptr[row + 1] as usize;
            for idx in lo..hi {
                let c = self.cols[idx] as usize;
                h[row * dim + c] += Complex::new(self.xx[idx], self.spec.alpha * self.ts[idx]);
            }
        }
        h
    }
}

impl HermitianOp for Hamiltonian {
    fn dim(&self) -> usize {
        self.spec.dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        Hamiltonian::apply(self, x, y)
    }
}

/// Full spectrum by dense diagonalization of the whole 2^N space; the
/// brute-force reference for the sector-blocked search.
pub fn dense_spectrum(spec: &ChainSpec) -> Result<Vec<f64>> {
    let h = build_hamiltonian(spec)?.to_dense();
    linalg::hermitian_eigenvalues(&h, spec.dim())
}

// ---------------------------------------------------------------------------
// Sz sectors
// ---------------------------------------------------------------------------

/// Basis masks with a fixed number of up spins, ascending.
fn sector_states(sites: usize, n_up: usize) -> Vec<u32> {
    let mut out = Vec::new();
    if n_up == 0 {
        out.push(0);
        return out;
    }
    if n_up > sites {
        return out;
    }
    // Gosper's hack: next mask with the same popcount.
    let limit = 1u32 << sites;
    let mut v: u32 = (1 << n_up) - 1;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Alpha-independent sparse sector block of the Hamiltonian at zero field.
pub struct SectorHamiltonian {
    n_up: usize,
    states: Vec<u32>,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    xx: Vec<f64>,
    ts: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn build(sites: usize, n_up: usize) -> Self {
        let states = sector_states(sites, n_up);
        let dim = states.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut xx = Vec::new();
        let mut ts = Vec::new();
        let mut scratch = Vec::new();
        row_ptr.push(0u32);
        for &mask in &states {
            state_couplings(mask as usize, sites, &mut scratch);
            for &(target, x, t) in scratch.iter() {
                let col = states
                    .binary_search(&(target as u32))
                    .expect("coupling leaves the Sz sector");
                cols.push(col as u32);
                xx.push(x);
                ts.push(t);
            }
            row_ptr.push(cols.len() as u32);
        }
        Self {
            n_up,
            states,
            row_ptr,
            cols,
            xx,
            ts,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    fn apply_with_alpha(&self, alpha: f64, x: &[C64], y: &mut [C64]) {
        for (row, yr) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[row] as usize;
            let hi = self.row_ptr[row + 1] as usize;
            let mut acc = C64::new(0.0, 0.0);
            for idx in lo..hi {
                let c = self.cols[idx] as usize;
                acc += Complex::new(self.xx[idx], alpha * self.ts[idx]) * x[c];
            }
            *yr = acc;
        }
    }
}

struct SectorOp<'a> {
    sector: &'a SectorHamiltonian,
    alpha: f64,
}

impl HermitianOp for SectorOp<'_> {
    fn dim(&self) -> usize {
        self.sector.dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.sector.apply_with_alpha(self.alpha, x, y)
    }
}

// ---------------------------------------------------------------------------
// Sector-blocked ground-state search
// ---------------------------------------------------------------------------

/// Prebuilt sector structure for one chain length, reused across a sweep.
/// Only sectors with n_up <= N/2 are stored: the chain maps to itself under
/// a global spin flip, so mirrored sectors share spectra and vectors.
pub struct FiniteSweeper {
    sites: usize,
    field: f64,
    sectors: Vec<SectorHamiltonian>,
    lanczos: LanczosOptions,
}

impl FiniteSweeper {
    pub fn new(sites: usize, field: Option<f64>) -> Result<Self> {
        let field = field.unwrap_or(if sites % 2 == 1 {
            DEFAULT_ODD_FIELD
        } else {
            0.0
        });
        ChainSpec::with_field(sites, 0.0, field)?;
        let sectors = (0..=sites / 2)
            .map(|u| SectorHamiltonian::build(sites, u))
            .collect();
        Ok(Self {
            sites,
            field,
            sectors,
            lanczos: LanczosOptions {
                residual_tol: 1e-11,
                ..LanczosOptions::default()
            },
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    /// Ground-state data at one alpha.
    pub fn ground(&self, alpha: f64) -> Result<GroundStateResult> {
        // (energy, n_up_effective, solved sector index, eigenpair index)
        let mut candidates: Vec<(f64, usize, usize, usize)> = Vec::new();
        let mut vectors: Vec<Vec<Vec<C64>>> = Vec::with_capacity(self.sectors.len());

        for (si, sector) in self.sectors.iter().enumerate() {
            let op = SectorOp { sector, alpha };
            let eig = linalg::lowest_eigenpairs(&op, 2, &self.lanczos)?;
            let u = sector.n_up();
            for (i, &val) in eig.values.iter().enumerate() {
                candidates.push((val + field_offset(self.sites, u, self.field), u, si, i));
                let mirror = self.sites - u;
                if mirror != u {
                    candidates.push((
                        val + field_offset(self.sites, mirror, self.field),
                        mirror,
                        si,
                        i,
                    ));
                }
            }
            vectors.push(eig.vectors);
        }

        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.3.cmp(&b.3)));
        let (energy, u_eff, si, ei) = candidates[0];
        let gap = candidates[1].0 - energy;

        let full_dim = 1usize << self.sites;
        let mut vector = vec![C64::new(0.0, 0.0); full_dim];
        let sector = &self.sectors[si];
        let flip_mask = full_dim - 1;
        let mirrored = u_eff != sector.n_up();
        for (j, &mask) in sector.states().iter().enumerate() {
            let target = if mirrored {
                mask as usize ^ flip_mask
            } else {
                mask as usize
            };
            vector[target] = vectors[si][ei][j];
        }

        Ok(GroundStateResult {
            energy,
            gap,
            vector,
            degenerate: gap < DEGENERACY_THRESHOLD,
            magnetization: (2.0 * u_eff as f64 - self.sites as f64) / self.sites as f64,
        })
    }
}

/// Ground state of a finite chain by sector-blocked search.
pub fn ground_state(spec: &ChainSpec) -> Result<GroundStateResult> {
    let sweeper = FiniteSweeper::new(spec.sites, Some(spec.field))?;
    sweeper.ground(spec.alpha)
}

/// Energy-gap scan over an alpha grid, with near-closings located by local
/// refinement.
pub struct GapScan {
    /// Gap series over the grid.
    pub series: SweepSeries,
    /// Refined alpha locations where the gap dips below
    /// [`NEAR_CLOSING_GAP`].
    pub near_closings: Vec<f64>,
}

/// Scan the gap over `alpha_grid`. Local minima of the grid series are
/// refined by golden-section search so that true crossings are recognized
/// even when no grid point lands close to them.
pub fn gap_scan(sites: usize, alpha_grid: &[f64], field: Option<f64>) -> Result<GapScan> {
    let sweeper = FiniteSweeper::new(sites, field)?;
    gap_scan_with(&sweeper, alpha_grid)
}

pub fn gap_scan_with(sweeper: &FiniteSweeper, alpha_grid: &[f64]) -> Result<GapScan> {
    series::check_grid(alpha_grid)?;
    let mut gaps = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        gaps.push(sweeper.ground(alpha)?.gap);
    }
    gap_scan_with_values(sweeper, alpha_grid, gaps)
}

/// Assemble a gap scan from already-computed gap values (grid order); the
/// sweeper is still consulted for near-closing refinement.
pub fn gap_scan_with_values(
    sweeper: &FiniteSweeper,
    alpha_grid: &[f64],
    gaps: Vec<f64>,
) -> Result<GapScan> {
    series::check_grid(alpha_grid)?;
    let near_closings = refine_near_closings(sweeper, alpha_grid, &gaps);
    let series = SweepSeries::new(alpha_grid.to_vec(), gaps)?;
    Ok(GapScan {
        series,
        near_closings,
    })
}

/// Refine each coarse local minimum of the gap and keep those that dip below
/// the near-closing threshold.
pub(crate) fn refine_near_closings(
    sweeper: &FiniteSweeper,
    grid: &[f64],
    gaps: &[f64],
) -> Vec<f64> {
    const COARSE: f64 = 0.05;
    let mut out = Vec::new();
    let n = grid.len();
    for i in 0..n {
        let g = gaps[i];
        if g.is_nan() || g >= COARSE {
            continue;
        }
        let left_ok = i == 0 || gaps[i - 1].is_nan() || gaps[i - 1] >= g;
        let right_ok = i + 1 == n || gaps[i + 1].is_nan() || gaps[i + 1] >= g;
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = if i == 0 { grid[0] } else { grid[i - 1] };
        let hi = if i + 1 == n { grid[n - 1] } else { grid[i + 1] };
        if let Some((alpha, gap)) = golden_min(|a| sweeper.ground(a).map(|r| r.gap), lo, hi) {
            if gap < NEAR_CLOSING_GAP && !out.iter().any(|&a: &f64| (a - alpha).abs() < 1e-5) {
                out.push(alpha);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Golden-section minimization; tolerant of solver failures (returns None).
fn golden_min<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Option<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1).ok()?;
    let mut f2 = f(x2).ok()?;
    while hi - lo > 1e-7 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1).ok()?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2).ok()?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid).ok()?;
    Some((mid, fm.min(f1).min(f2)))
}

// ---------------------------------------------------------------------------
// Finite free-fermion oracle
// ---------------------------------------------------------------------------

/// Fermion-number parity sector of the finite chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermionParity {
    Even,
    Odd,
}

/// Closed-form finite-chain solution in one parity sector: the momenta are
/// antiperiodic for even fermion number and periodic for odd, and the filled
/// set is the negative-energy modes adjusted minimally to match the parity.
#[derive(Debug, Clone)]
pub struct FiniteFermionSolution {
    pub sites: usize,
    pub parity: FermionParity,
    /// Total energy in units of J.
    pub energy: f64,
    /// Occupied momenta.
    pub occupied: Vec<f64>,
}

/// Solve the free-fermion chain of even length `sites` in the given parity
/// sector at coupling `alpha`.
pub fn free_fermion_finite_oracle(
    sites: usize,
    alpha: f64,
    parity: FermionParity,
) -> Result<FiniteFermionSolution> {
    if sites < 2 || !sites.is_multiple_of(2) {
        return Err(Error::UnsupportedChainLength { sites });
    }
    let n = sites as f64;
    let momenta: Vec<f64> = match parity {
        // Odd fermion number: periodic momenta 2 pi m / N.
        FermionParity::Odd => (0..sites)
            .map(|m| 2.0 * PI * (m as f64 - (sites / 2) as f64 + 1.0) / n)
            .collect(),
        // Even fermion number: antiperiodic momenta 2 pi (m + 1/2) / N.
        FermionParity::Even => (0..sites)
            .map(|m| 2.0 * PI * (m as f64 - (sites / 2) as f64 + 0.5) / n)
            .collect(),
    };

    const ZERO_TOL: f64 = 1e-12;
    let mut occupied: Vec<f64> = Vec::new();
    let mut zeros: Vec<f64> = Vec::new();
    let mut empties: Vec<(f64, f64)> = Vec::new(); // (energy, k)
    let mut energy = 0.0;
    for &k in &momenta {
        let e = dispersion(k, alpha);
        if e < -ZERO_TOL {
            occupied.push(k);
            energy += e;
        } else if e <= ZERO_TOL {
            zeros.push(k);
        } else {
            empties.push((e, k));
        }
    }

    let want_odd = matches!(parity, FermionParity::Odd);
    if (occupied.len() % 2 == 1) != want_odd {
        // Cheapest single-mode correction that flips the count parity.
        zeros.sort_by(f64::total_cmp);
        empties.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        if let Some(&k) = zeros.first() {
            occupied.push(k);
        } else {
            let drop_cost = occupied
                .iter()
                .enumerate()
                .map(|(i, &k)| (-dispersion(k, alpha), i))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let add_cost = empties.first().map(|&(e, _)| e);
            match (drop_cost, add_cost) {
                (Some((dc, di)), Some(ac)) if dc <= ac => {
                    energy += dc;
                    occupied.remove(di);
                }
                (_, Some(ac)) => {
                    energy += ac;
                    occupied.push(empties[0].1);
                }
                (Some((dc, di)), None) => {
                    energy += dc;
                    occupied.remove(di);
                }
                (None, None) => return Err(Error::UnsupportedChainLength { sites }),
            }
        }
    }
    occupied.sort_by(f64::total_cmp);
    Ok(FiniteFermionSolution {
        sites,
        parity,
        energy,
        occupied,
    })
}

/// The lower-energy parity sector of the finite free-fermion chain.
pub fn free_fermion_finite_ground(sites: usize, alpha: f64) -> Result<FiniteFermionSolution> {
    let even = free_fermion_finite_oracle(sites, alpha, FermionParity::Even)?;
    let odd = free_fermion_finite_oracle(sites, alpha, FermionParity::Odd)?;
    Ok(if even.energy <= odd.energy { even } else { odd })
}

impl FiniteFermionSolution {
    pub fn fermion_count(&self) -> usize {
        self.occupied.len()
    }

    /// Two-point function f(r) = (1/N) sum over occupied k of e^{-i k r}.
    /// Complex in general: the filled sea is asymmetric above the transition.
    pub fn correlation_element(&self, r: i64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &k in &self.occupied {
            let phase = -k * r as f64;
            acc += C64::new(phase.cos(), phase.sin());
        }
        acc / self.sites as f64
    }

    /// Hermitian Toeplitz correlation matrix of a contiguous block.
    pub fn block_correlation_matrix(&self, len: usize) -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); len * len];
        let elements: Vec<C64> = (0..len as i64)
            .map(|r| self.correlation_element(r))
            .collect();
        for i in 0..len {
            for j in 0..len {
                let e = elements[i.abs_diff(j)];
                m[i * len + j] = if j >= i { e } else { e.conj() };
            }
        }
        m
    }

    /// Mode eigenvalues of a contiguous block, non-increasing, in [0, 1].
    pub fn block_mode_eigenvalues(&self, len: usize) -> Result<Vec<f64>> {
        let m = self.block_correlation_matrix(len);
        let mut vals = linalg::hermitian_eigh_small(&m, len, false)?.values;
        for v in vals.iter_mut() {
            if *v < -1e-10 || *v > 1.0 + 1e-10 {
                return Err(Error::SpectrumOutOfRange { value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        vals.reverse();
        Ok(vals)
    }

    /// Largest eigenvalue of the block reduced state: the product of each
    /// mode's dominant weight.
    pub fn block_max_weight(&self, len: usize) -> Result<f64> {
        Ok(self
            .block_mode_eigenvalues(len)?
            .iter()
            .map(|&l| l.max(1.0 - l))
            .product())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm2, seeded_unit_vector};
    use approx::assert_abs_diff_eq;
    use std::vec::Vec;

    #[test]
    fn chain_spec_validation() {
        assert!(ChainSpec::new(3, 0.0).is_ok());
        assert!(ChainSpec::new(16, 5.0).is_ok());
        assert!(ChainSpec::new(2, 1.0).is_err());
        assert!(ChainSpec::new(17, 1.0).is_err());
        assert!(ChainSpec::with_field(8, -1.0, 0.0).is_err());
        assert!(ChainSpec::with_field(8, 1.0, -0.5).is_err());
        assert_eq!(
            ChainSpec::with_default_field(9, 1.0).unwrap().field,
            DEFAULT_ODD_FIELD
        );
        assert_eq!(ChainSpec::with_default_field(8, 1.0).unwrap().field, 0.0);
    }

    #[test]
    fn sector_states_counts() {
        assert_eq!(sector_states(6, 0), vec![0]);
        assert_eq!(sector_states(6, 3).len(), 20);
        assert_eq!(sector_states(16, 8).len(), 12870);
        for w in sector_states(8, 4).windows(2) {
            assert!(w[0] < w[1]);
            assert_eq!(w[0].count_ones(), 4);
        }
    }

    #[test]
    fn hermiticity_probe() {
        let spec = ChainSpec::with_field(6, 1.3, 0.2).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let dim = spec.dim();
        let x = seeded_unit_vector(dim, 11);
        let y = seeded_unit_vector(dim, 22);
        let mut hx = vec![C64::new(0.0, 0.0); dim];
        let mut hy = vec![C64::new(0.0, 0.0); dim];
        h.apply(&x, &mut hx);
        h.apply(&y, &mut hy);
        let lhs = dot(&y, &hx);
        let rhs = dot(&hy, &x);
        assert!((lhs - rhs).norm() < 1e-13, "not Hermitian: {lhs} vs {rhs}");
    }

    #[test]
    fn commutes_with_total_sz() {
        let spec = ChainSpec::with_field(6, 2.1, 0.7).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let dim = spec.dim();
        let x = seeded_unit_vector(dim, 33);
        let sz = |v: &[C64]| -> Vec<C64> {
            v.iter()
                .enumerate()
                .map(|(m, &a)| a * (2.0 * m.count_ones() as f64 - spec.sites as f64))
                .collect()
        };
        let mut hx = vec![C64::new(0.0, 0.0); dim];
        h.apply(&x, &mut hx);
        let sz_hx = sz(&hx);
        let x_sz = sz(&x);
        let mut h_szx = vec![C64::new(0.0, 0.0); dim];
        h.apply(&x_sz, &mut h_szx);
        let diff: f64 = sz_hx
            .iter()
            .zip(&h_szx)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-13);
    }

    #[test]
    fn commutes_with_translation() {
        // Rotating every bit by one site must commute with H; this pins the
        // boundary-term bookkeeping.
        let spec = ChainSpec::new(6, 1.7).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let dim = spec.dim();
        let rot = |m: usize| ((m << 1) | (m >> (spec.sites - 1))) & (dim - 1);
        let x = seeded_unit_vector(dim, 44);
        let translate = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for (m, &a) in v.iter().enumerate() {
                out[rot(m)] = a;
            }
            out
        };
        let mut hx = vec![C64::new(0.0, 0.0); dim];
        h.apply(&x, &mut hx);
        let t_hx = translate(&hx);
        let tx = translate(&x);
        let mut h_tx = vec![C64::new(0.0, 0.0); dim];
        h.apply(&tx, &mut h_tx);
        let diff: f64 = t_hx
            .iter()
            .zip(&h_tx)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-13);
    }

    #[test]
    fn xx_ring_ground_energy() {
        // Pure exchange ring of four sites: filled sea gives -sqrt(2).
        let spec = ChainSpec::new(4, 0.0).unwrap();
        let dense = dense_spectrum(&spec).unwrap();
        assert_abs_diff_eq!(dense[0], -2.0f64.sqrt(), epsilon = 1e-12);
        let gs = ground_state(&spec).unwrap();
        assert_abs_diff_eq!(gs.energy, -2.0f64.sqrt(), epsilon = 1e-11);
        assert_abs_diff_eq!(norm2(&gs.vector), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sector_search_matches_dense() {
        for (sites, alpha, field) in [(6usize, 0.8, 0.0), (6, 2.3, 0.3), (8, 1.4, 0.0)] {
            let spec = ChainSpec::with_field(sites, alpha, field).unwrap();
            let dense = dense_spectrum(&spec).unwrap();
            let gs = ground_state(&spec).unwrap();
            assert_abs_diff_eq!(gs.energy, dense[0], epsilon = 1e-11);
            assert_abs_diff_eq!(gs.gap, dense[1] - dense[0], epsilon = 1e-10);
        }
    }

    #[test]
    fn sector_search_matches_dense_n10() {
        let spec = ChainSpec::new(10, 1.9).unwrap();
        let dense = dense_spectrum(&spec).unwrap();
        let gs = ground_state(&spec).unwrap();
        assert_abs_diff_eq!(gs.energy, dense[0], epsilon = 1e-11);
        assert_abs_diff_eq!(gs.gap, dense[1] - dense[0], epsilon = 1e-10);
    }

    #[test]
    fn matches_free_fermion_oracle() {
        for &sites in &[4usize, 6, 8] {
            for &alpha in &[0.0, 0.5, 2.0] {
                let oracle = free_fermion_finite_ground(sites, alpha).unwrap();
                let gs = ground_state(&ChainSpec::new(sites, alpha).unwrap()).unwrap();
                assert!(
                    (gs.energy - oracle.energy).abs() < 1e-10,
                    "N={sites} alpha={alpha}: ED {} vs oracle {}",
                    gs.energy,
                    oracle.energy
                );
            }
        }
    }

    #[test]
    fn oracle_frozen_energies() {
        // Filled antiperiodic sea of the eight-site ring below the
        // transition: pairs +-k contribute -2 cos k each.
        let s = free_fermion_finite_oracle(8, 0.5, FermionParity::Even).unwrap();
        let expected = -2.0 * ((PI / 8.0).cos() + (3.0 * PI / 8.0).cos());
        assert_abs_diff_eq!(s.energy, expected, epsilon = 1e-13);
        assert_eq!(s.fermion_count(), 4);
        let s = free_fermion_finite_oracle(8, 0.5, FermionParity::Odd).unwrap();
        assert_abs_diff_eq!(s.energy, -1.0 - 2.0f64.sqrt(), epsilon = 1e-13);
        // Half filling pins the diagonal correlation exactly.
        let s = free_fermion_finite_ground(8, 0.0).unwrap();
        assert_eq!(s.fermion_count(), 4);
        assert_abs_diff_eq!(s.correlation_element(0).re, 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(s.correlation_element(0).im, 0.0, epsilon = 0.0);
    }

    #[test]
    fn oracle_converges_to_infinite_chain() {
        let coarse = free_fermion_finite_ground(512, 0.5).unwrap();
        let fine = free_fermion_finite_ground(8192, 0.5).unwrap();
        let exact = 1.0 / PI;
        let err_coarse = (coarse.correlation_element(1).re - exact).abs();
        let err_fine = (fine.correlation_element(1).re - exact).abs();
        assert!(err_fine < 1e-3, "f(1) error {err_fine}");
        assert!(err_fine < err_coarse);
        // Energy per site approaches the closed form as well.
        assert!((fine.energy / 8192.0 + exact).abs() < 1e-4);
    }

    #[test]
    fn degeneracy_odd_even() {
        let even = ground_state(&ChainSpec::new(8, 1.2).unwrap()).unwrap();
        assert!(!even.degenerate, "gap {}", even.gap);
        let odd = ground_state(&ChainSpec::new(9, 1.2).unwrap()).unwrap();
        assert!(odd.degenerate, "gap {}", odd.gap);
        // A small field lifts the odd degeneracy.
        let lifted = ground_state(&ChainSpec::with_default_field(9, 1.2).unwrap()).unwrap();
        assert!(!lifted.degenerate);
        assert!(lifted.gap > 1e-7);
    }

    #[test]
    fn magnetization_vanishes_even_chains() {
        for &alpha in &[0.0, 1.0, 2.0, 3.0] {
            let gs = ground_state(&ChainSpec::new(10, alpha).unwrap()).unwrap();
            assert_eq!(gs.magnetization, 0.0);
        }
    }

    #[test]
    fn energy_per_site_approaches_infinite_chain() {
        let gs = ground_state(&ChainSpec::new(12, 0.5).unwrap()).unwrap();
        assert!((gs.energy / 12.0 + 1.0 / PI).abs() < 0.01);
    }

    #[test]
    fn gap_scan_finds_closings() {
        let grid: Vec<f64> = (0..=60).map(|i| 2.3 + i as f64 * 0.01).collect();
        let scan = gap_scan(8, &grid, None).unwrap();
        assert!(scan.series.values.iter().all(|&g| g >= 0.0));
        // The eight-site crossing sits at 1/sin(7 pi / 8).
        let expected = 1.0 / (7.0 * PI / 8.0).sin();
        assert!(
            scan.near_closings
                .iter()
                .any(|&a| (a - expected).abs() < 0.01),
            "closings {:?}, expected near {expected}",
            scan.near_closings
        );
    }

    #[test]
    fn block_weights_match_ed_small() {
        // Two-site block of the four-site ring, cross-checked against the
        // dense reduced state of the ED ground vector.
        let alpha = 0.5;
        let gs = ground_state(&ChainSpec::new(4, alpha).unwrap()).unwrap();
        let oracle = free_fermion_finite_ground(4, alpha).unwrap();
        // rho_A for sites {0, 1}: indices a = (m & 3), b = m >> 2.
        let mut rho = [C64::new(0.0, 0.0); 16];
        for a in 0..4usize {
            for ap in 0..4usize {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..4usize {
                    acc += gs.vector[(b << 2) | a] * gs.vector[(b << 2) | ap].conj();
                }
                rho[a * 4 + ap] = acc;
            }
        }
        let eig = linalg::hermitian_eigh_small(&rho, 4, false).unwrap();
        let lmax = eig.values[3];
        assert_abs_diff_eq!(lmax, oracle.block_max_weight(2).unwrap(), epsilon = 1e-10);
    }
}
