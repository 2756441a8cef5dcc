//! Adaptive quadrature on finite intervals using the 15-point Gauss-Kronrod
//! rule. Integrands in this crate are smooth once intervals are split at the
//! Fermi points, so a panel-bisection strategy with an absolute-error budget
//! is enough.

use alloc::vec::Vec;

// Float math for no_std builds; when a dependency links std (e.g. under
// `cargo test`) the inherent methods shadow these and the import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Kronrod abscissae for the 7-15 pair (positive half; node 7 is the center).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Weights of the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Weights of the 15-point Kronrod rule.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error actually achieved.
    pub abs_error: f64,
    /// Number of Gauss-Kronrod panels evaluated.
    pub panels: usize,
}

/// One Gauss-Kronrod panel; returns (kronrod value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut result_gauss = 0.0;
    let mut result_kronrod = f_center * WGK[7];
    let mut result_abs = result_kronrod.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = f_center;

    // Odd Kronrod indices coincide with the Gauss nodes.
    for (j, wg) in WG.iter().enumerate().take(3) {
        let idx = 2 * j + 1;
        let x = half * XGK[idx];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[7 - idx] = f1;
        fv[7 + idx] = f2;
        result_gauss += wg * (f1 + f2);
        result_kronrod += WGK[idx] * (f1 + f2);
        result_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    result_gauss += WG[3] * f_center;

    for j in 0..4 {
        let idx = 2 * j;
        let x = half * XGK[idx];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[7 - idx] = f1;
        fv[7 + idx] = f2;
        result_kronrod += WGK[idx] * (f1 + f2);
        result_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = result_kronrod * 0.5;
    let mut result_asc = 0.0;
    for (j, &v) in fv.iter().enumerate() {
        let w = WGK[j.abs_diff(7)];
        result_asc += w * (v - mean).abs();
    }

    let value = result_kronrod * half;
    let err = ((result_kronrod - result_gauss) * half).abs();
    let result_abs = result_abs * half.abs();
    let result_asc = result_asc * half.abs();

    // QUADPACK-style error rescaling.
    let mut abserr = err;
    if result_asc != 0.0 && err != 0.0 {
        let scaled = (200.0 * err / result_asc).powf(1.5);
        abserr = if scaled < 1.0 {
            result_asc * scaled
        } else {
            result_asc
        };
    }
    let round_off = 50.0 * f64::EPSILON * result_abs;
    if round_off > f64::MIN_POSITIVE && abserr < round_off {
        abserr = round_off;
    }
    (value, abserr)
}

/// Adaptively integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Fails with [`Error::QuadratureNoConverge`] (carrying the achieved error
/// estimate) if the panel budget is exhausted first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    debug_assert!(tol > 0.0);
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }

    const MAX_PANELS: usize = 4096;

    // Global refinement: keep splitting the worst panel until the summed
    // error estimate meets the tolerance.
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new(); // (lo, hi, value, err)
    let (v, e) = gk15(&f, a, b);
    panels.push((a, b, v, e));
    let mut evaluations = 1usize;

    loop {
        let err_total: f64 = panels.iter().map(|p| p.3).sum();
        if err_total <= tol {
            let value = panels.iter().map(|p| p.2).sum();
            return Ok(QuadResult {
                value,
                abs_error: err_total,
                panels: evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("panel list nonempty");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let width_limited = (hi - lo).abs() <= 1e-14 * (b - a).abs();
        if evaluations + 2 > MAX_PANELS || width_limited {
            return Err(Error::QuadratureNoConverge {
                estimate: err_total,
                requested: tol,
            });
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        evaluations += 2;
    }
}

/// Integrate over a union of disjoint intervals, splitting the tolerance
/// evenly across them.
pub fn integrate_intervals<F: Fn(f64) -> f64>(
    f: F,
    intervals: &[(f64, f64)],
    tol: f64,
) -> Result<QuadResult> {
    if intervals.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    let per = tol / intervals.len() as f64;
    let mut total = QuadResult {
        value: 0.0,
        abs_error: 0.0,
        panels: 0,
    };
    for &(lo, hi) in intervals {
        let r = integrate(&f, lo, hi, per)?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.panels += r.panels;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x evaluated at the ends
        assert_abs_diff_eq!(r.value, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn cosine_over_half_period() {
        let r = integrate(|x| x.cos(), 0.0, PI / 2.0, 1e-13).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-13);
        assert!(r.abs_error <= 1e-13);
    }

    #[test]
    fn needs_subdivision() {
        // Sharp peak forces the adaptive path.
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-8);
        assert!(r.panels > 1);
    }

    #[test]
    fn interval_union() {
        let r =
            integrate_intervals(|x| x.sin(), &[(0.0, PI / 2.0), (PI / 2.0, PI)], 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn impossible_tolerance_reports_estimate() {
        let err = integrate(|x| (1e6 * x).sin() / (1e-9 + x.abs()), -1.0, 1.0, 1e-300).unwrap_err();
        match err {
            Error::QuadratureNoConverge { estimate, .. } => assert!(estimate > 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
