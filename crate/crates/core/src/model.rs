//! Infinite-chain model: couplings, free-fermion dispersion, Fermi-point
//! structure, and ground-state energy per site. All energies are in units of
//! the two-body coupling J, so everything downstream depends only on the
//! dimensionless three-spin strength `alpha`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::quad;
use crate::{Error, Result};

/// The critical three-spin strength: the number of Fermi points changes here.
pub const ALPHA_CRITICAL: f64 = 1.0;

/// Default absolute tolerance for quadrature-based oracles.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Model parameters. `J` sets the overall energy scale and is retained only
/// for labeling; all computed quantities are reported in units of J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    j: f64,
    alpha: f64,
}

impl Couplings {
    pub fn new(j: f64, alpha: f64) -> Result<Self> {
        if !(j.is_finite() && alpha.is_finite()) || j <= 0.0 || alpha < 0.0 {
            return Err(Error::InvalidCouplings { j, alpha });
        }
        Ok(Self { j, alpha })
    }

    /// Couplings with the energy scale fixed to J = 1.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(1.0, alpha)
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Number of Fermi points of the dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// alpha <= 1: Fermi points at -pi/2 and pi/2 only.
    TwoPoint,
    /// alpha > 1: two additional points carve a second filled interval.
    FourPoint,
}

/// Fermi momenta and the filled sea they bound.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiStructure {
    pub regime: Regime,
    /// Sorted Fermi momenta in (-pi, pi].
    pub points: Vec<f64>,
    /// Disjoint intervals whose union is the filled sea.
    pub occupied_intervals: Vec<(f64, f64)>,
}

impl FermiStructure {
    /// Total measure of the filled sea (equals pi at every alpha: half filling).
    pub fn occupied_measure(&self) -> f64 {
        self.occupied_intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }
}

/// Single-particle energy at momentum `k`, in units of J.
pub fn dispersion(k: f64, alpha: f64) -> f64 {
    debug_assert!(alpha >= 0.0);
    -(k.cos() - 0.5 * alpha * (2.0 * k).sin())
}

/// Fermi-point structure at the given `alpha`. The boundary alpha = 1 is
/// classified as [`Regime::TwoPoint`]: arcsin(1) merges the extra points
/// into +-pi/2.
pub fn fermi_structure(alpha: f64) -> FermiStructure {
    debug_assert!(alpha >= 0.0);
    if alpha <= ALPHA_CRITICAL {
        FermiStructure {
            regime: Regime::TwoPoint,
            points: vec![-FRAC_PI_2, FRAC_PI_2],
            occupied_intervals: vec![(-FRAC_PI_2, FRAC_PI_2)],
        }
    } else {
        let k1 = (1.0 / alpha).asin();
        FermiStructure {
            regime: Regime::FourPoint,
            points: vec![-FRAC_PI_2, k1, FRAC_PI_2, PI - k1],
            occupied_intervals: vec![(-FRAC_PI_2, k1), (FRAC_PI_2, PI - k1)],
        }
    }
}

/// Whether the mode at momentum `k` belongs to the filled sea. The sign of
/// the dispersion is the authoritative predicate; the interval description
/// in [`FermiStructure`] is validated against it.
pub fn is_occupied(k: f64, alpha: f64) -> bool {
    dispersion(k, alpha) <= 0.0
}

/// Closed-form ground-state energy per site, in units of J.
pub fn ground_energy_per_site(alpha: f64) -> f64 {
    debug_assert!(alpha >= 0.0);
    if alpha < ALPHA_CRITICAL {
        -1.0 / PI
    } else {
        -(1.0 / alpha + alpha) / (2.0 * PI)
    }
}

/// Ground-state energy per site by adaptive quadrature of the dispersion over
/// the filled sea. Serves as the independent oracle for the closed form.
pub fn ground_energy_per_site_numeric(alpha: f64, tol: f64) -> Result<f64> {
    let fermi = fermi_structure(alpha);
    let r = quad::integrate_intervals(
        |k| dispersion(k, alpha) / (2.0 * PI),
        &fermi.occupied_intervals,
        tol,
    )?;
    Ok(r.value)
}
