//! Infinite-chain fermionic two-point functions, block correlation matrices,
//! and the n-th order geometric measures built from their spectra.
//!
//! A contiguous block of n sites of the ground state is fully characterized
//! by the n x n matrix of two-point functions f(|i-j|, alpha). Its eigenvalues
//! lie in [0, 1] and generate the block reduced-state spectrum as independent
//! mode weights.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg;
use crate::model::ALPHA_CRITICAL;
use crate::{Error, Result};

/// Eigenvalues this far outside [0, 1] are treated as rounding and clamped;
/// anything worse is reported as an error.
const CLAMP_SLOP: f64 = 1e-12;

/// Which reading of the geometric measure to apply to a block spectrum.
///
/// The closed forms G_2..G_4 and the saturation constants A_n correspond to
/// `PaperEigenvalue`, one minus the largest correlation-matrix eigenvalue.
/// `StrictProduct` instead takes one minus the largest eigenvalue of the
/// block density operator itself, which for free fermions is the product of
/// the dominant weight of every mode. The two disagree in value but share
/// their kink location and monotonicity, and both are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmConvention {
    PaperEigenvalue,
    StrictProduct,
}

/// Two-point function f(m) = <c+_i c_{i+m}> of the infinite-chain ground
/// state at site separation `m`.
///
/// Emitted from the closed forms so the special values (1/2 on the diagonal,
/// zeros at even separations) are exact.
pub fn correlation_element(m: usize, alpha: f64) -> f64 {
    debug_assert!(alpha >= 0.0);
    if m == 0 {
        return 0.5;
    }
    if m.is_multiple_of(2) {
        return 0.0;
    }
    let mf = m as f64;
    if alpha < ALPHA_CRITICAL {
        // sin(m pi / 2) = +-1 for odd m, exactly.
        let sign = if m % 4 == 1 { 1.0 } else { -1.0 };
        sign / (mf * PI)
    } else {
        (mf * (1.0 / alpha).asin()).sin() / (mf * PI)
    }
}

/// Block correlation matrix of `n` contiguous sites: symmetric Toeplitz with
/// entries f(|i-j|, alpha).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major dense storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i)).sum()
    }
}

/// Build the n x n correlation matrix at the given `alpha`.
pub fn build_correlation_matrix(n: usize, alpha: f64) -> Result<CorrelationMatrix> {
    if n == 0 {
        return Err(Error::UnsupportedBlockSize { n });
    }
    let elements: Vec<f64> = (0..n).map(|m| correlation_element(m, alpha)).collect();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(elements[i.abs_diff(j)]);
        }
    }
    Ok(CorrelationMatrix { n, data })
}

/// Spectrum of a correlation matrix, sorted non-increasing. Every value lies
/// in [0, 1] and the sum equals n/2.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    values: Vec<f64>,
}

impl ModeSpectrum {
    /// Non-increasing eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// Largest eigenvalue of the block density operator: every fermionic mode
    /// contributes its dominant weight max(lambda, 1 - lambda).
    pub fn max_weight_product(&self) -> f64 {
        self.values.iter().map(|&l| l.max(1.0 - l)).product()
    }
}

/// Full eigenvalue decomposition of a correlation matrix. Eigenvalues within
/// rounding slop of [0, 1] are clamped; anything further out is an error, as
/// is solver non-convergence.
pub fn mode_spectrum(f: &CorrelationMatrix) -> Result<ModeSpectrum> {
    let eig = linalg::sym_eigh(f.as_slice(), f.n(), false)?;
    let mut values = eig.values;
    for v in values.iter_mut() {
        if *v < -CLAMP_SLOP || *v > 1.0 + CLAMP_SLOP {
            return Err(Error::SpectrumOutOfRange { value: *v });
        }
        *v = v.clamp(0.0, 1.0);
    }
    values.reverse();
    Ok(ModeSpectrum { values })
}

/// n-th order geometric measure of the infinite chain: the entanglement of a
/// contiguous n-site block against the rest, under the chosen convention.
pub fn nth_order_gm(n: usize, alpha: f64, convention: GmConvention) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedBlockSize { n });
    }
    let spectrum = mode_spectrum(&build_correlation_matrix(n, alpha)?)?;
    Ok(match convention {
        GmConvention::PaperEigenvalue => 1.0 - spectrum.largest(),
        GmConvention::StrictProduct => 1.0 - spectrum.max_weight_product(),
    })
}

/// Closed forms of G_2, G_3, G_4. Used as the test oracle for
/// [`nth_order_gm`] under [`GmConvention::PaperEigenvalue`].
pub fn closed_form_gm(n: usize, alpha: f64) -> Result<f64> {
    let below = alpha < ALPHA_CRITICAL;
    match n {
        2 => Ok(if below {
            0.5 - 1.0 / PI
        } else {
            0.5 - 1.0 / (PI * alpha)
        }),
        3 => {
            let s2 = 2.0f64.sqrt();
            Ok(if below {
                0.5 - s2 / PI
            } else {
                0.5 - s2 / (PI * alpha)
            })
        }
        4 => {
            if below {
                Ok(0.5 - (1.0 + 13.0f64.sqrt()) / (3.0 * PI))
            } else {
                let a3 = alpha * alpha * alpha;
                Ok(0.5 - 1.0 / (PI * alpha)
                    + (2.0 - (4.0 + 9.0 * a3 * alpha).sqrt()) / (3.0 * PI * a3))
            }
        }
        _ => Err(Error::UnsupportedBlockSize { n }),
    }
}

/// Saturation constant A_n = lambda_max(F_n) - 1/2 of the constant regime
/// below the transition; approaches 1/2 from below as n grows.
pub fn asymptotic_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedBlockSize { n });
    }
    // Any alpha below the transition gives the same matrix.
    let spectrum = mode_spectrum(&build_correlation_matrix(n, 0.5)?)?;
    Ok(spectrum.largest() - 0.5)
}

/// Genuine-multipartite measure of the infinite chain: the minimum of the
/// n-th order measures over contiguous blocks n = 2..=n_max.
pub fn ggm_infinite(alpha: f64, n_max: usize, convention: GmConvention) -> Result<f64> {
    if n_max < 2 {
        return Err(Error::UnsupportedBlockSize { n: n_max });
    }
    let mut min = f64::INFINITY;
    for n in 2..=n_max {
        let g = nth_order_gm(n, alpha, convention)?;
        if g < min {
            min = g;
        }
    }
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fermi_structure, DEFAULT_QUAD_TOL};
    use crate::quad;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::vec;

    /// Quadrature oracle for the two-point function: the closed forms must
    /// match the direct momentum integral over the filled sea.
    fn correlation_oracle(m: usize, alpha: f64) -> f64 {
        let fermi = fermi_structure(alpha);
        quad::integrate_intervals(
            |k| (k * m as f64).cos() / (2.0 * PI),
            &fermi.occupied_intervals,
            DEFAULT_QUAD_TOL,
        )
        .unwrap()
        .value
    }

    #[test]
    fn element_special_values() {
        assert_eq!(correlation_element(0, 3.0), 0.5);
        assert_eq!(correlation_element(2, 0.7), 0.0);
        assert_eq!(correlation_element(6, 4.2), 0.0);
        assert_abs_diff_eq!(
            correlation_element(1, 2.0),
            1.0 / (2.0 * PI),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            correlation_element(3, 0.4),
            -1.0 / (3.0 * PI),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(correlation_element(1, 0.4), 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn element_matches_quadrature_oracle() {
        for &alpha in &[0.0, 0.3, 0.7, 1.0, 1.5, 2.0, 5.0] {
            for m in 0..=15 {
                let oracle = correlation_oracle(m, alpha);
                assert_abs_diff_eq!(correlation_element(m, alpha), oracle, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn element_continuous_at_transition() {
        for m in [1usize, 3, 5, 7, 9] {
            assert_abs_diff_eq!(
                correlation_element(m, 1.0),
                correlation_element(m, 1.0 - 1e-9),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn matrix_structure() {
        let f = build_correlation_matrix(5, 0.5).unwrap();
        assert_eq!(f.n(), 5);
        for i in 0..5 {
            assert_eq!(f.entry(i, i), 0.5);
            for j in 0..5 {
                assert_eq!(f.entry(i, j), f.entry(j, i));
                assert_eq!(f.entry(i, j), correlation_element(i.abs_diff(j), 0.5));
            }
        }
        assert_abs_diff_eq!(f.trace(), 2.5, epsilon = 0.0);

        let f1 = build_correlation_matrix(1, 7.0).unwrap();
        assert_eq!(f1.as_slice(), &[0.5]);
        assert!(build_correlation_matrix(0, 1.0).is_err());
    }

    #[test]
    fn two_and_three_mode_spectra() {
        let s = mode_spectrum(&build_correlation_matrix(2, 0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(s.values()[0], 0.5 + 1.0 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[1], 0.5 - 1.0 / PI, epsilon = 1e-14);

        let s = mode_spectrum(&build_correlation_matrix(3, 0.5).unwrap()).unwrap();
        let s2 = 2.0f64.sqrt();
        assert_abs_diff_eq!(s.values()[0], 0.5 + s2 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values()[2], 0.5 - s2 / PI, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_invariants_over_grid() {
        for &alpha in &[0.0, 0.5, 1.0, 1.3, 2.0, 10.0] {
            for n in 1..=12 {
                let s = mode_spectrum(&build_correlation_matrix(n, alpha).unwrap()).unwrap();
                let sum: f64 = s.values().iter().sum();
                assert_abs_diff_eq!(sum, n as f64 / 2.0, epsilon = 1e-12);
                for w in s.values().windows(2) {
                    assert!(w[0] >= w[1]);
                }
                for &l in s.values() {
                    assert!((0.0..=1.0).contains(&l));
                }
            }
        }
    }

    #[test]
    fn gm_matches_closed_forms() {
        for i in 0..=500 {
            let alpha = i as f64 * 0.01;
            for n in 2..=4 {
                let numeric = nth_order_gm(n, alpha, GmConvention::PaperEigenvalue).unwrap();
                let closed = closed_form_gm(n, alpha).unwrap();
                assert!(
                    (numeric - closed).abs() < 1e-10,
                    "n={n} alpha={alpha}: {numeric} vs {closed}"
                );
            }
        }
        assert!(closed_form_gm(5, 1.0).is_err());
        assert!(closed_form_gm(1, 1.0).is_err());
    }

    #[test]
    fn gm_frozen_values() {
        assert_abs_diff_eq!(
            nth_order_gm(2, 0.5, GmConvention::PaperEigenvalue).unwrap(),
            0.5 - 1.0 / PI,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            nth_order_gm(4, 0.5, GmConvention::PaperEigenvalue).unwrap(),
            0.5 - (1.0 + 13.0f64.sqrt()) / (3.0 * PI),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            nth_order_gm(4, 0.5, GmConvention::PaperEigenvalue).unwrap(),
            0.011335832564482,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            nth_order_gm(3, 2.0, GmConvention::PaperEigenvalue).unwrap(),
            0.5 - 2.0f64.sqrt() / (2.0 * PI),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            closed_form_gm(2, 2.0).unwrap(),
            0.5 - 0.5 / PI,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            closed_form_gm(3, 0.2).unwrap(),
            0.04984184192144695,
            epsilon = 1e-14
        );
        // Both branches of G_4 coincide at the transition.
        assert_abs_diff_eq!(
            closed_form_gm(4, 1.0).unwrap(),
            0.5 - (1.0 + 13.0f64.sqrt()) / (3.0 * PI),
            epsilon = 1e-14
        );
        // Strict-product reading of the same block.
        let g = nth_order_gm(2, 0.5, GmConvention::StrictProduct).unwrap();
        let lmax = 0.5 + 1.0 / PI;
        assert_abs_diff_eq!(g, 1.0 - lmax * lmax, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 0.3303689300933744, epsilon = 1e-10);
    }

    #[test]
    #[allow(clippy::approx_constant)] // published six-digit reference values
    fn saturation_constants() {
        let table = [
            (2, 0.318309),
            (3, 0.450158),
            (4, 0.488664),
            (5, 0.497669),
            (6, 0.499544),
            (7, 0.499913),
        ];
        for (n, expected) in table {
            let a = asymptotic_constant(n).unwrap();
            assert!(
                (a - expected).abs() < 1e-5,
                "A_{n} = {a}, expected {expected}"
            );
        }
        assert_abs_diff_eq!(asymptotic_constant(2).unwrap(), 1.0 / PI, epsilon = 1e-13);
        // Strictly increasing toward 1/2.
        let mut prev = 0.0;
        for n in 2..=16 {
            let a = asymptotic_constant(n).unwrap();
            assert!(a > prev && a < 0.5);
            prev = a;
        }
        assert!(asymptotic_constant(7).unwrap() > 0.4999);
    }

    #[test]
    fn ggm_is_min_over_orders() {
        let g = ggm_infinite(0.5, 4, GmConvention::PaperEigenvalue).unwrap();
        assert_abs_diff_eq!(g, closed_form_gm(4, 0.5).unwrap(), epsilon = 1e-12);
        let g2 = ggm_infinite(0.5, 2, GmConvention::PaperEigenvalue).unwrap();
        assert_abs_diff_eq!(g2, 0.1816901138162093, epsilon = 1e-12);
        // Large alpha pushes every order toward 1/2. At alpha = 50 the closed
        // form for G_4 sits 0.0127 below 1/2; by alpha = 100 it is within 0.01.
        let g = ggm_infinite(50.0, 4, GmConvention::PaperEigenvalue).unwrap();
        assert!((g - 0.5).abs() < 0.02);
        let g = ggm_infinite(100.0, 4, GmConvention::PaperEigenvalue).unwrap();
        assert!((g - 0.5).abs() < 0.01);
    }

    #[test]
    fn ordering_and_monotonicity() {
        let alphas = [0.0, 0.25, 0.5, 0.9, 1.0, 1.2, 1.7, 2.5, 5.0, 1000.0];
        for &alpha in &alphas {
            let gs: vec::Vec<f64> = (2..=8)
                .map(|n| nth_order_gm(n, alpha, GmConvention::PaperEigenvalue).unwrap())
                .collect();
            for w in gs.windows(2) {
                assert!(w[0] > w[1], "ordering violated at alpha={alpha}: {w:?}");
            }
        }
        // Constant below the transition.
        for n in 2..=8 {
            let g0 = nth_order_gm(n, 0.0, GmConvention::PaperEigenvalue).unwrap();
            for &alpha in &[0.1, 0.33, 0.7, 0.999] {
                let g = nth_order_gm(n, alpha, GmConvention::PaperEigenvalue).unwrap();
                assert!((g - g0).abs() < 1e-12);
            }
            // Non-decreasing above, approaching 1/2.
            let mut prev = nth_order_gm(n, 1.0, GmConvention::PaperEigenvalue).unwrap();
            for i in 1..=80 {
                let g =
                    nth_order_gm(n, 1.0 + 0.05 * i as f64, GmConvention::PaperEigenvalue).unwrap();
                assert!(g >= prev - 1e-13);
                prev = g;
            }
            if n <= 4 {
                assert!(nth_order_gm(n, 1000.0, GmConvention::PaperEigenvalue).unwrap() > 0.49);
            }
        }
    }

    #[test]
    fn conventions_share_kink_and_trend() {
        // Both conventions are constant below the transition and move above it.
        for conv in [GmConvention::PaperEigenvalue, GmConvention::StrictProduct] {
            let g_low = nth_order_gm(3, 0.3, conv).unwrap();
            let g_low2 = nth_order_gm(3, 0.8, conv).unwrap();
            assert!((g_low - g_low2).abs() < 1e-12);
            let g_above = nth_order_gm(3, 1.4, conv).unwrap();
            assert!((g_above - g_low).abs() > 1e-3);
        }
    }

    proptest! {
        #[test]
        fn toeplitz_and_bounds_hold(alpha in 0.0f64..6.0, n in 1usize..14) {
            let f = build_correlation_matrix(n, alpha).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(f.entry(i, j), correlation_element(i.abs_diff(j), alpha));
                }
            }
            let s = mode_spectrum(&f).unwrap();
            let sum: f64 = s.values().iter().sum();
            prop_assert!((sum - n as f64 / 2.0).abs() < 1e-12);
            prop_assert!(s.values().iter().all(|&l| (0.0..=1.0).contains(&l)));
        }
    }
}
