//! Sine and cosine integrals Si(x), Ci(x).
//!
//! For small arguments the defining power series converge quickly; for large
//! arguments we evaluate the exponential integral E1(i x) by a modified
//! Lentz continued fraction and read off
//!
//! ```text
//! Ci(x) = -Re E1(i x),        Si(x) = pi/2 + Im E1(i x)      (x > 0).
//! ```
//!
//! Si is extended to negative arguments as an odd function; Ci is only
//! defined for positive arguments (callers in this crate always pass |u|).
//! Accuracy is ~1e-15 absolute across the switch point, which the unit tests
//! pin against an adaptive-quadrature oracle.

use std::f64::consts::FRAC_PI_2;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Crossover between the power series and the continued fraction.
const SWITCH: f64 = 4.0;

/// Power series for (Si(x), Ci(x)), good for 0 < x <= SWITCH.
fn si_ci_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    // Si: sum_{m>=0} (-1)^m x^{2m+1} / ((2m+1)(2m+1)!)
    let mut si = x;
    let mut term = x;
    let mut m = 1usize;
    loop {
        let mf = m as f64;
        term *= -x2 * (2.0 * mf - 1.0) / ((2.0 * mf + 1.0) * (2.0 * mf + 1.0) * (2.0 * mf));
        si += term;
        if term.abs() < 1e-17 * si.abs().max(1.0) || m > 60 {
            break;
        }
        m += 1;
    }
    // Ci: gamma + ln x + sum_{m>=1} (-1)^m x^{2m} / (2m (2m)!)
    let mut ci_sum = -x2 / 4.0; // m = 1 term
    let mut u = -x2 / 4.0;
    let mut mm = 2usize;
    loop {
        let mf = mm as f64;
        u *= -x2 * (2.0 * mf - 2.0) / ((2.0 * mf) * (2.0 * mf) * (2.0 * mf - 1.0));
        ci_sum += u;
        if u.abs() < 1e-17 * ci_sum.abs().max(1.0) || mm > 60 {
            break;
        }
        mm += 1;
    }
    (si, EULER_GAMMA + x.ln() + ci_sum)
}

/// Modified Lentz continued fraction for E1(i x), x > SWITCH.
///
/// E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))) with partial
/// numerators -k^2; complex arithmetic done on (re, im) pairs directly.
fn si_ci_continued_fraction(x: f64) -> (f64, f64) {
    const FPMIN: f64 = 1e-290;
    const EPS: f64 = 1e-16;

    // Complex helpers over (re, im) tuples.
    #[inline]
    fn inv(re: f64, im: f64) -> (f64, f64) {
        let d = re * re + im * im;
        (re / d, -im / d)
    }
    #[inline]
    fn mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    // b_1 = 1 + i x; recurrence b += 2 each level, a_k = -k^2.
    let mut b = (1.0, x);
    let mut c = (1.0 / FPMIN, 0.0);
    let mut d = inv(b.0, b.1);
    let mut h = d;
    let mut k = 1.0f64;
    loop {
        let a = -k * k;
        b.0 += 2.0;
        // d = 1 / (a*d + b)
        let t = (a * d.0 + b.0, a * d.1 + b.1);
        d = inv(t.0, t.1);
        // c = b + a/c
        let ic = inv(c.0, c.1);
        c = (b.0 + a * ic.0, b.1 + a * ic.1);
        let del = mul(c, d);
        h = mul(h, del);
        if ((del.0 - 1.0).abs() + del.1.abs()) < EPS {
            break;
        }
        k += 1.0;
        if k > 200.0 {
            break; // CF converges in < 40 terms for x > 4; safety net only.
        }
    }
    // E1(ix) = e^{-ix} * h
    let e = ( x.cos(), -x.sin());
    let e1 = mul(e, h);
    (FRAC_PI_2 + e1.1, -e1.0)
}

/// Sine integral Si(x) = int_0^x sin t / t dt (odd in x).
pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ax = x.abs();
    let v = if ax <= SWITCH {
        si_ci_series(ax).0
    } else {
        si_ci_continued_fraction(ax).0
    };
    if x > 0.0 {
        v
    } else {
        -v
    }
}

/// Cosine integral Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt, x > 0.
///
/// # Panics
/// Panics if `x <= 0`; callers must take the absolute value themselves
/// (which is what every band-term formula in this crate does).
pub fn ci(x: f64) -> f64 {
    assert!(x > 0.0, "Ci is only defined for positive arguments, got {x}");
    if x <= SWITCH {
        si_ci_series(x).1
    } else {
        si_ci_continued_fraction(x).1
    }
}

/// Supremum of a continuous function on `[lo, hi]` by dense scan plus
/// golden-section refinement around the grid argmax.  Accuracy is limited by
/// the scan resolution: a secondary peak can only be missed if it tops the
/// found one by less than `O(sup * (width/steps)^2 * |f''|/|f|)`, so callers
/// pick `steps` so the grid resolves every oscillation of `f`.
pub(crate) fn grid_supremum(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    assert!(hi > lo && steps >= 2);
    let h = (hi - lo) / steps as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_x = lo;
    for i in 0..=steps {
        let x = lo + i as f64 * h;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // Golden-section around the bracketing interval.
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = ((best_x - h).max(lo), (best_x + h).min(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    best.max(fc).max(fd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn si_reference_values() {
        // Abramowitz & Stegun table values.
        assert_abs_diff_eq!(si(1.0), 0.946083070367183, epsilon = 1e-14);
        assert_abs_diff_eq!(si(2.0), 1.605412976802695, epsilon = 1e-14);
        assert_abs_diff_eq!(si(10.0), 1.658347594218874, epsilon = 1e-13);
        assert_abs_diff_eq!(si(-1.0), -0.946083070367183, epsilon = 1e-14);
        assert_eq!(si(0.0), 0.0);
    }

    #[test]
    fn ci_reference_values() {
        assert_abs_diff_eq!(ci(1.0), 0.337403922900968, epsilon = 1e-14);
        assert_abs_diff_eq!(ci(2.0), 0.422980828774865, epsilon = 1e-14);
        assert_abs_diff_eq!(ci(10.0), -0.045456433004455, epsilon = 1e-13);
        // Small argument: Ci(x) ~ gamma + ln x.
        assert_abs_diff_eq!(
            ci(1e-8),
            EULER_GAMMA + (1e-8f64).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn continuity_across_switch_point() {
        let below = si_ci_series(SWITCH);
        let above = si_ci_continued_fraction(SWITCH + 1e-12);
        assert_abs_diff_eq!(below.0, above.0, epsilon = 1e-11);
        assert_abs_diff_eq!(below.1, above.1, epsilon = 1e-11);
    }

    #[test]
    fn ci_difference_matches_quadrature_oracle() {
        // Ci(b) - Ci(a) = int_a^b cos t / t dt, checked on both sides of the
        // series/continued-fraction switch.
        for (a, b) in [(0.5, 2.0), (2.0, 7.0), (3.5, 30.0), (10.0, 55.0)] {
            let oracle = integrate(
                |t: f64| Complex64::new(t.cos() / t, 0.0),
                a,
                b,
                1e-13,
            )
            .unwrap();
            assert_abs_diff_eq!(ci(b) - ci(a), oracle.value.re, epsilon = 5e-12);
        }
    }

    #[test]
    fn si_matches_quadrature_oracle() {
        for x in [0.3, 1.7, 4.0, 9.3, 41.0] {
            let oracle = integrate(
                |t: f64| {
                    Complex64::new(if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0)
                },
                0.0,
                x,
                1e-13,
            )
            .unwrap();
            assert_abs_diff_eq!(si(x), oracle.value.re, epsilon = 5e-12);
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // Si(x) -> pi/2 - cos x / x + O(1/x^2); Ci(x) -> sin x / x + O(1/x^2).
        let x = 1000.0;
        assert_abs_diff_eq!(
            si(x),
            std::f64::consts::FRAC_PI_2 - x.cos() / x,
            epsilon = 2e-6
        );
        assert_abs_diff_eq!(ci(x), x.sin() / x, epsilon = 2e-6);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn ci_rejects_nonpositive() {
        let _ = ci(0.0);
    }

    #[test]
    fn grid_supremum_refines_to_the_true_peak() {
        // max of sin on [0, 4] is 1 at pi/2; quadratic peak resolved to ~1e-15.
        let s = grid_supremum(|x: f64| x.sin(), 0.0, 4.0, 1000);
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        // Asymmetric rational bump: max of 1/(1+(x-2.3)^2) is 1.
        let s = grid_supremum(|x: f64| 1.0 / (1.0 + (x - 2.3) * (x - 2.3)), -5.0, 5.0, 500);
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-13);
        // Endpoint supremum is kept (no interior peak).
        let s = grid_supremum(|x: f64| x, 0.0, 1.0, 10);
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-15);
    }
}
