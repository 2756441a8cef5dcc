//! Nearest-neighbor two-site reduced state of the infinite-chain ground
//! state and its concurrence. The state is an X-form two-qubit matrix fixed
//! by a single correlation function, so the concurrence has a closed
//! shortcut; the general spin-flip construction is kept alongside as the
//! oracle the shortcut is tested against.

use alloc::vec::Vec;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::corr::correlation_element;
use crate::linalg;
use crate::series::{self, SweepSeries};
use crate::{Error, Result};

/// Numerical slop allowed on the two-site invariants.
const STATE_TOL: f64 = 1e-10;

/// Default detector threshold shared with the finite-chain sweeps.
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 50.0;

/// Two-qubit reduced state of neighboring sites, in the X form
/// diag(u, z, z, u) with coherence y on the inner anti-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteState {
    /// Corner population (both spins aligned).
    pub u: f64,
    /// Center population (spins anti-aligned).
    pub z: f64,
    /// Off-diagonal coherence.
    pub y: f64,
}

impl TwoSiteState {
    pub fn new(u: f64, z: f64, y: f64) -> Result<Self> {
        let state = Self { u, z, y };
        state.validate()?;
        Ok(state)
    }

    /// Unit trace, non-negative corner population, center block positivity.
    pub fn validate(&self) -> Result<()> {
        if !(self.u.is_finite() && self.z.is_finite() && self.y.is_finite()) {
            return Err(Error::InvalidTwoSiteState {
                detail: "non-finite entry",
            });
        }
        if (2.0 * self.u + 2.0 * self.z - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTwoSiteState {
                detail: "trace differs from one",
            });
        }
        if self.u < -STATE_TOL {
            return Err(Error::InvalidTwoSiteState {
                detail: "negative corner population",
            });
        }
        if self.z - self.y.abs() < -STATE_TOL {
            return Err(Error::InvalidTwoSiteState {
                detail: "negative center eigenvalue",
            });
        }
        Ok(())
    }

    /// Dense 4x4 matrix in the computational basis |00>, |01>, |10>, |11>.
    pub fn to_matrix(&self) -> [f64; 16] {
        let mut m = [0.0; 16];
        m[0] = self.u;
        m[5] = self.z;
        m[10] = self.z;
        m[15] = self.u;
        m[6] = self.y;
        m[9] = self.y;
        m
    }

    /// Eigenvalues of the density matrix: {u, u, z + y, z - y}.
    pub fn eigenvalues(&self) -> [f64; 4] {
        [self.u, self.u, self.z + self.y, self.z - self.y]
    }
}

/// Nearest-neighbor reduced state of the ground state at the given `alpha`.
pub fn two_site_rdm(alpha: f64) -> TwoSiteState {
    let f = correlation_element(1, alpha);
    TwoSiteState {
        u: 0.25 - f * f,
        z: 0.25 + f * f,
        y: f,
    }
}

/// Concurrence of a two-site state. For the X form this reduces to
/// 2 max(0, |y| - u); the general path below is the oracle it must agree with.
pub fn concurrence(state: &TwoSiteState) -> Result<f64> {
    state.validate()?;
    Ok(2.0 * (state.y.abs() - state.u).max(0.0))
}

/// Concurrence by the general spin-flip construction: eigenvalues of
/// R = sqrt(sqrt(rho) rho~ sqrt(rho)) with rho~ the spin-flipped conjugate.
pub fn concurrence_general(state: &TwoSiteState) -> Result<f64> {
    state.validate()?;
    let rho = state.to_matrix();

    // sqrt(rho) through the eigensystem, clamping rounding negatives.
    let eig = linalg::sym_eigh(&rho, 4, true)?;
    let mut sqrt_rho = [0.0f64; 16];
    for j in 0..4 {
        let lam = eig.values[j].max(0.0).sqrt();
        let v = &eig.vectors[4 * j..4 * j + 4];
        for r in 0..4 {
            for c in 0..4 {
                sqrt_rho[r * 4 + c] += lam * v[r] * v[c];
            }
        }
    }

    // rho~ = (sy x sy) rho* (sy x sy); real matrix S = antidiag(-1, 1, 1, -1).
    let s = [-1.0, 1.0, 1.0, -1.0];
    let mut rho_tilde = [0.0f64; 16];
    for r in 0..4 {
        for c in 0..4 {
            rho_tilde[r * 4 + c] = s[r] * s[c] * rho[(3 - r) * 4 + (3 - c)];
        }
    }

    let m1 = mat4_mul(&sqrt_rho, &rho_tilde);
    let m = mat4_mul(&m1, &sqrt_rho);
    // m is symmetric PSD up to rounding; symmetrize before the eigensolve.
    let mut msym = [0.0f64; 16];
    for r in 0..4 {
        for c in 0..4 {
            msym[r * 4 + c] = 0.5 * (m[r * 4 + c] + m[c * 4 + r]);
        }
    }
    let eig = linalg::sym_eigh(&msym, 4, false)?;
    let mut lam: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    lam.reverse();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

fn mat4_mul(a: &[f64; 16], b: &[f64; 16]) -> [f64; 16] {
    let mut out = [0.0f64; 16];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = 0.0;
            for k in 0..4 {
                acc += a[r * 4 + k] * b[k * 4 + c];
            }
            out[r * 4 + c] = acc;
        }
    }
    out
}

/// Concurrence over a sorted alpha grid, with derivative and kink locations.
pub fn concurrence_sweep(alpha_grid: &[f64]) -> Result<SweepSeries> {
    series::check_grid(alpha_grid)?;
    let mut values = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        values.push(concurrence(&two_site_rdm(alpha))?);
    }
    let mut sweep = SweepSeries::new(alpha_grid.to_vec(), values)?;
    if alpha_grid.len() >= 5 {
        sweep.detect(DEFAULT_THRESHOLD_FACTOR)?;
    }
    Ok(sweep)
}

/// The alpha beyond which the concurrence is identically zero, by bisection
/// of |y(alpha)| - u(alpha) on [1, 3] to 1e-12. The root solves
/// x^2 + x = 1/4 with x = 1/(pi alpha), i.e. alpha* = 2(sqrt(2)+1)/pi.
pub fn concurrence_vanishing_point() -> f64 {
    let f = |alpha: f64| {
        let s = two_site_rdm(alpha);
        s.y.abs() - s.u
    };
    let (mut lo, mut hi) = (1.0f64, 3.0f64);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;
    use proptest::prelude::*;
    use std::vec::Vec;

    #[test]
    fn rdm_from_correlations() {
        let s = two_site_rdm(0.5);
        assert_abs_diff_eq!(s.u, 0.25 - 1.0 / (PI * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(s.z, 0.25 + 1.0 / (PI * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(s.y, 1.0 / PI, epsilon = 1e-15);

        let s = two_site_rdm(2.0);
        assert_abs_diff_eq!(s.y, 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(s.u, 0.25 - 1.0 / (4.0 * PI * PI), epsilon = 1e-15);

        for &alpha in &[0.0, 0.7, 1.0, 1.6, 3.0, 25.0] {
            let s = two_site_rdm(alpha);
            assert_abs_diff_eq!(2.0 * s.u + 2.0 * s.z, 1.0, epsilon = 1e-15);
            s.validate().unwrap();
            let ev = s.eigenvalues();
            assert!(ev.iter().all(|&e| e >= -1e-15));
            assert_abs_diff_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn eigenvalues_match_dense_path() {
        let s = two_site_rdm(1.3);
        let eig = linalg::sym_eigh(&s.to_matrix(), 4, false).unwrap();
        let mut expected = s.eigenvalues();
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn concurrence_known_points() {
        // Plateau value below the transition.
        let c = concurrence(&two_site_rdm(0.5)).unwrap();
        assert_abs_diff_eq!(
            c,
            2.0 * (1.0 / PI + 1.0 / (PI * PI) - 0.25),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(c, 0.3392621396522427, epsilon = 1e-13);
        // Dead regime at large alpha.
        assert_eq!(concurrence(&two_site_rdm(3.0)).unwrap(), 0.0);
        // Maximally mixed is separable.
        let mixed = TwoSiteState::new(0.25, 0.25, 0.0).unwrap();
        assert_eq!(concurrence(&mixed).unwrap(), 0.0);
        // Bell-diagonal limit is maximally entangled.
        let bell = TwoSiteState::new(0.0, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(concurrence(&bell).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence_general(&bell).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(TwoSiteState::new(-0.05, 0.55, 0.1).is_err());
        assert!(TwoSiteState::new(0.2, 0.3, 0.45).is_err());
        assert!(TwoSiteState::new(0.3, 0.3, 0.0).is_err());
        assert!(TwoSiteState::new(0.25, 0.25, f64::NAN).is_err());
        let bad = TwoSiteState {
            u: 0.1,
            z: 0.4,
            y: 0.41,
        };
        assert!(matches!(
            concurrence(&bad),
            Err(Error::InvalidTwoSiteState { .. })
        ));
        assert!(matches!(
            concurrence_general(&bad),
            Err(Error::InvalidTwoSiteState { .. })
        ));
    }

    #[test]
    fn shortcut_agrees_with_general_path() {
        for i in 0..=100 {
            let alpha = 0.05 * i as f64;
            let s = two_site_rdm(alpha);
            let a = concurrence(&s).unwrap();
            let b = concurrence_general(&s).unwrap();
            assert!((a - b).abs() < 1e-12, "alpha={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn sweep_shape_and_kinks() {
        let grid: Vec<f64> = (0..=600).map(|i| i as f64 * 0.005).collect();
        let sweep = concurrence_sweep(&grid).unwrap();
        // Constant plateau below the transition.
        let c0 = sweep.values[0];
        for (&a, &c) in grid.iter().zip(&sweep.values) {
            if a < 1.0 {
                assert_abs_diff_eq!(c, c0, epsilon = 1e-14);
            }
        }
        // Strictly decreasing between the transition and the vanishing point,
        // identically zero beyond it.
        let star = concurrence_vanishing_point();
        for w in grid.windows(2).zip(sweep.values.windows(2)) {
            let ((a, vals), _) = (w, ());
            if a[0] >= 1.0 && a[1] <= star {
                assert!(vals[1] < vals[0]);
            }
            if a[0] >= star {
                assert_eq!(vals[0], 0.0);
            }
        }
        // Exactly two kinks: the transition and the vanishing point.
        assert_eq!(
            sweep.discontinuities.len(),
            2,
            "flags: {:?}",
            sweep.discontinuities
        );
        assert!((sweep.discontinuities[0] - 1.0).abs() <= 0.01);
        assert!((sweep.discontinuities[1] - star).abs() <= 0.01);
    }

    #[test]
    fn vanishing_point_closed_form() {
        let star = concurrence_vanishing_point();
        // x = (sqrt(2)-1)/2 solves x^2 + x = 1/4 exactly, so the root is
        // alpha* = 1/(pi x) = 2(sqrt(2)+1)/pi.
        let closed = 2.0 * (2.0f64.sqrt() + 1.0) / PI;
        assert_abs_diff_eq!(star, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(star, 1.5369360885246874, epsilon = 1e-10);
        // Sweep check on both sides.
        assert!(concurrence(&two_site_rdm(star - 0.01)).unwrap() > 0.0);
        assert_eq!(concurrence(&two_site_rdm(star + 0.01)).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn paths_agree_on_valid_x_states(z in 0.0f64..0.5, t in -1.0f64..1.0) {
            let y = t * z;
            let u = 0.5 - z;
            prop_assume!(u >= 0.0);
            let s = TwoSiteState::new(u, z, y).unwrap();
            let a = concurrence(&s).unwrap();
            let b = concurrence_general(&s).unwrap();
            prop_assert!((a - b).abs() < 1e-12, "u={} z={} y={}: {} vs {}", u, z, y, a, b);
        }
    }
}
