//! Closed-form integral kernels and their direct quadrature counterparts.
//!
//! Every truncated resolution of identity in this crate is an integral of an
//! eigenfunction product over a finite piece of the (deformed) wavenumber
//! axis.  Those integrals all evaluate in closed form to a handful of
//! structurally distinct pieces, collected in [`KernelValue`]:
//!
//! * a sinc term `~ sin(A(x-x'))/(pi (x-x'))` carrying the delta limit,
//! * boundary terms from the endpoints of the truncation,
//! * cosine terms with band-edge denominators (inner model), and
//! * a logarithmic band term `Ci(b|w|) - Ci(a|w|)` (inner model).
//!
//! For each closed form there is a `..._direct` twin that evaluates the same
//! quantity by adaptive quadrature of the raw eigenfunction product along an
//! explicit contour.  The two routes share no arithmetic beyond the
//! eigenfunctions themselves, so their agreement (pinned down to 1e-8
//! relative in the check suite) validates both.

use crate::contours::{
    circle, edge_contour, epsilon_arc, inner_contour, ArcSign, ContourError, DeformationSpec,
};
use crate::models::{EdgeModel, InnerModel, ModelError};
use crate::special::ci;
use crate::{Complex64, I};
use serde::{Deserialize, Serialize};

/// Failure modes of kernel evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum KernelError {
    #[error("truncation must exceed the singular point: A = {a} <= alpha = {alpha}")]
    BandwidthTooSmall { a: f64, alpha: f64 },
    #[error("shrinking radius must satisfy 0 < eps < alpha, got eps = {eps}, alpha = {alpha}")]
    EpsOutOfRange { eps: f64, alpha: f64 },
    #[error("cosine band needs 0 < a < b, got a = {a}, b = {b}")]
    BadBand { a: f64, b: f64 },
    #[error("wavenumber too close to a pole of the eigenfunction product (distance {dist:e})")]
    PoleProximity { dist: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// A kernel value split into its structural pieces; `total()` is the kernel.
/// Pieces that do not occur for a given kernel are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    #[serde(with = "crate::ser::c64")]
    pub sinc: Complex64,
    #[serde(with = "crate::ser::c64")]
    pub boundary: Complex64,
    #[serde(with = "crate::ser::c64")]
    pub cos_band: Complex64,
    #[serde(with = "crate::ser::c64")]
    pub log_band: Complex64,
}

impl KernelValue {
    pub fn total(&self) -> Complex64 {
        self.sinc + self.boundary + self.cos_band + self.log_band
    }
}

/// `sin(a w) / (pi w)`, evaluated by series for small `|a w|` so the
/// diagonal limit `a/pi` is reached smoothly.
pub fn sinc_kernel(a: f64, w: f64) -> f64 {
    let t = a * w;
    if t.abs() < 1e-4 {
        a / std::f64::consts::PI * (1.0 - t * t / 6.0 + t.powi(4) / 120.0)
    } else {
        t.sin() / (std::f64::consts::PI * w)
    }
}

/// Complex-argument variant `sin(r u) / (pi u)` (used with `u = k - k'`).
pub fn csinc(r: f64, u: Complex64) -> Complex64 {
    let t = r * u;
    if t.norm() < 1e-4 {
        (r / std::f64::consts::PI) * (Complex64::new(1.0, 0.0) - t * t / 6.0)
    } else {
        t.sin() / (std::f64::consts::PI * u)
    }
}

/// The band integral `int_a^b cos(u t)/t dt = Ci(b|u|) - Ci(a|u|)`, with the
/// diagonal limit `ln(b/a)` at `u = 0`.
pub fn cosine_band(a: f64, b: f64, u: f64) -> Result<f64, KernelError> {
    if !(0.0 < a && a < b) {
        return Err(KernelError::BadBand { a, b });
    }
    let au = u.abs();
    // Below this scale Ci differences lose accuracy to the log; the exact
    // small-u expansion Ci(x) = gamma + ln x + O(x^2) gives ln(b/a) + O(u^2).
    if au * b < 1e-8 {
        Ok((b / a).ln())
    } else {
        Ok(ci(b * au) - ci(a * au))
    }
}

/// The constant `C = 2 sup_{xi>0} (1+xi) |sin xi| / xi` of the band-integral
/// envelope bound (see [`band_envelope_bound`]).  The supremum sits in the
/// first lobe at `xi ~ 1.21505`; computed once by dense scan plus
/// golden-section refinement and cached.
pub fn band_envelope_constant() -> f64 {
    static C: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *C.get_or_init(|| {
        2.0 * crate::special::grid_supremum(
            |xi: f64| (1.0 + xi) * xi.sin().abs() / xi,
            1e-9,
            50.0,
            500_000,
        )
    })
}

/// Envelope bound for the band integral over `[A-alpha, A+alpha]`:
///
/// ```text
/// |cosine_band(A-alpha, A+alpha, u)| <= A C / ([1 + (A-alpha)|u|](A-alpha))
/// ```
///
/// for all real `u`, with `C` from [`band_envelope_constant`].  This is the
/// estimate that drives the pointwise decay of the band terms as the
/// truncation grows; the check suite scans it (and the bound it implies for
/// the band term of the inner kernel) over quasi-random samples.
pub fn band_envelope_bound(alpha: f64, a: f64, u: f64) -> Result<f64, KernelError> {
    if !(alpha > 0.0 && a > alpha) {
        return Err(KernelError::BandwidthTooSmall { a, alpha });
    }
    let gap = a - alpha;
    Ok(a * band_envelope_constant() / ((1.0 + gap * u.abs()) * gap))
}

/// Upper bound for the sinc-difference defect of the band integral:
///
/// ```text
/// |cosine_band(a, b, u) - {sin(bu)/(bu) - sin(au)/(au)}| <= 6 / (a^2 u^2).
/// ```
///
/// Derived by two integrations by parts of `cos(tu)/t`; the check suite scans
/// the inequality over quasi-random `(a, b, u)`.
pub fn band_sinc_defect_bound(a: f64, u: f64) -> f64 {
    6.0 / (a * a * u * u)
}

// --- edge model: kernel in x-space ---------------------------------------

/// Closed form of the truncated edge-model kernel
/// `K_A(x, x') = int_{-A}^{A} psi_n(x; k) psi_n(x'; -k) dk`
/// (detour at k = 0 irrelevant: the integrand's residue there vanishes).
///
/// With `rho = (x'-z)/(x-z)`:
/// * sinc slot: `rho^n sin(A(x-x'))/(pi (x-x'))`;
/// * boundary slot:
///   `sum_{l=0}^{n-1} rho^l [psi_{n-1-l}(x;k) psi_{n-l}(x';-k)]_{k=-A}^{A} / (i(x-z))`.
pub fn edge_kernel_closed(
    m: &EdgeModel,
    a: f64,
    x: f64,
    xp: f64,
) -> Result<KernelValue, KernelError> {
    assert!(a > 0.0, "truncation A must be positive");
    let n = m.order();
    let z = m.shift();
    let rho = (Complex64::new(xp, 0.0) - z) / (Complex64::new(x, 0.0) - z);
    let w = x - xp;
    let ka = Complex64::new(a, 0.0);

    let mut boundary = Complex64::new(0.0, 0.0);
    let mut rho_l = Complex64::new(1.0, 0.0);
    for l in 0..n {
        let at_plus = m.psi_level(n - 1 - l, x, ka)? * m.psi_level(n - l, xp, -ka)?;
        let at_minus = m.psi_level(n - 1 - l, x, -ka)? * m.psi_level(n - l, xp, ka)?;
        boundary += rho_l * (at_plus - at_minus);
        rho_l *= rho;
    }
    boundary /= I * (Complex64::new(x, 0.0) - z);

    // After the loop rho_l = rho^n.
    let sinc = rho_l * sinc_kernel(a, w);
    Ok(KernelValue {
        sinc,
        boundary,
        ..KernelValue::default()
    })
}

/// The same truncated kernel by direct contour quadrature of the
/// eigenfunction product along a deformed path from `-A` to `A`.
pub fn edge_kernel_direct(
    m: &EdgeModel,
    a: f64,
    spec: DeformationSpec,
    x: f64,
    xp: f64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    assert!(
        spec.radius > 1e-6,
        "detour radius too small for stable evaluation near k = 0"
    );
    let contour = edge_contour(a, spec)?;
    let w = x - xp;
    let f = |k: Complex64| {
        m.psi(x, k).expect("contour stays away from k = 0")
            * m.psi(xp, -k).expect("contour stays away from k = 0")
    };
    let (v, _) = contour.integrate_hinted(f, tol, Some(w.abs()))?;
    Ok(v)
}

// --- edge model: partial biorthogonality in k-space ----------------------

/// Closed form of the truncated x-pairing of two renormalized eigenfunctions,
/// `int_{-R}^{R} [k^n psi_n(x;k)] [k'^n psi_n(x;-k')] dx`:
///
/// * sinc slot: `k'^{2n} sin(R(k-k'))/(pi (k-k'))`;
/// * boundary slot:
///   `-i sum_{l=0}^{n-1} k'^{2l} [k^{n-1-l} psi_{n-1-l}(x;k)]
///    [k'^{n-l} psi_{n-l}(x;-k')] |_{x=-R}^{R}`.
///
/// Both wavenumbers may be complex; the sinc factor then continues
/// analytically.
pub fn biortho_partial_closed(
    m: &EdgeModel,
    r: f64,
    k: Complex64,
    kp: Complex64,
) -> Result<KernelValue, KernelError> {
    assert!(r > 0.0);
    let n = m.order() as i32;
    let sinc = kp.powi(2 * n) * csinc(r, k - kp);
    let boundary =
        -I * (biortho_boundary_summand(m, r, k, kp)? - biortho_boundary_summand(m, -r, k, kp)?);
    Ok(KernelValue {
        sinc,
        boundary,
        ..KernelValue::default()
    })
}

/// The position-local summand of the boundary slot of
/// [`biortho_partial_closed`]:
///
/// ```text
/// sum_{l=0}^{n-1} k'^{2l} [k^{n-1-l} psi_{n-1-l}(x;k)] [k'^{n-l} psi_{n-l}(x;-k')]
/// ```
///
/// Evaluated through the renormalized eigenfunctions, so it is regular at
/// `k = 0` and `k' = 0` and safe to integrate in either wavenumber.
pub fn biortho_boundary_summand(
    m: &EdgeModel,
    x: f64,
    k: Complex64,
    kp: Complex64,
) -> Result<Complex64, KernelError> {
    let n = m.order();
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..n {
        // k'^{n-l} psi_{n-l}(x;-k') = (-1)^{n-l} [(-k')^{n-l} psi_{n-l}(x;-k')].
        let sign = if (n - l) % 2 == 0 { 1.0 } else { -1.0 };
        acc += kp.powi(2 * l as i32)
            * m.psi_renormalized(n - 1 - l, x, k)?
            * (sign * m.psi_renormalized(n - l, x, -kp)?);
    }
    Ok(acc)
}

/// Direct x-quadrature twin of [`biortho_partial_closed`].
pub fn biortho_partial_direct(
    m: &EdgeModel,
    r: f64,
    k: Complex64,
    kp: Complex64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    let n = m.order();
    // k^n psi_n(x;k) * k'^n psi_n(x;-k'), via the renormalized forms.
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let f = |x: f64| {
        let a = m.psi_renormalized(n, x, k).expect("coefficients cached");
        let b = m.psi_renormalized(n, x, -kp).expect("coefficients cached");
        sign * a * b
    };
    // Plane-wave content oscillates like e^{i(k-k')x}.
    let freq = (k - kp).re.abs() + 0.5;
    let cfg = crate::quad::QuadConfig::with_tol(tol).with_oscillation(freq, 2.0 * r);
    let out = crate::quad::adaptive(f, -r, r, &cfg).map_err(|e| {
        KernelError::Contour(ContourError::Quadrature {
            segment: 0,
            source: e,
        })
    })?;
    Ok(out.value)
}

// --- inner model ----------------------------------------------------------

/// Product `P(x, x') = psi0(x) psi0(x')`.
pub fn inner_p(m: &InnerModel, x: f64, xp: f64) -> Complex64 {
    m.psi0(x) * m.psi0(xp)
}

/// Symmetrized product `S(x, x') = psi0(x) psi1(x') + psi1(x) psi0(x')`.
pub fn inner_sym(m: &InnerModel, x: f64, xp: f64) -> Complex64 {
    m.psi0(x) * m.psi1(xp) + m.psi1(x) * m.psi0(xp)
}

/// The eigenfunction product `psi(x;k) psi(x';-k)` of the inner model, in the
/// decomposed form used for contour integration:
///
/// ```text
/// e^{ikw}/(2 pi)
///   - P/(4 pi alpha) * [D(k-alpha) + D(k+alpha)]
///   + S/(2 pi)       * [E(k-alpha) - E(k+alpha)]
/// ```
///
/// with `w = x-x'`, `E(u) = e^{iuw}/u`, `D(u) = e^{iuw}(iwu-1)/u^2`.  The
/// `E` terms carry simple poles with residues `+-S/(2 pi)` at `k = +-alpha`;
/// the `D` terms carry pure double poles (residue-free).
pub fn inner_product_integrand(
    m: &InnerModel,
    x: f64,
    xp: f64,
    k: Complex64,
) -> Result<Complex64, KernelError> {
    let alpha = m.alpha();
    let w = x - xp;
    let um = k - alpha;
    let up = k + alpha;
    let dist = um.norm().min(up.norm());
    if dist < 1e-10 {
        return Err(KernelError::PoleProximity { dist });
    }
    let iw = Complex64::new(0.0, w);
    let e = |u: Complex64| (iw * u).exp() / u;
    let d = |u: Complex64| (iw * u).exp() * (iw * u - 1.0) / (u * u);
    let p = inner_p(m, x, xp);
    let s = inner_sym(m, x, xp);
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok((I * k * w).exp() / two_pi - p / (2.0 * two_pi * alpha) * (d(um) + d(up))
        + s / two_pi * (e(um) - e(up)))
}

/// Closed form of the truncated inner-model kernel
/// `K_A(x,x') = int_{-A}^{A} psi(x;k) psi(x';-k) dk` (detours at `+-alpha`;
/// the residues at the two poles cancel, so the side does not matter):
///
/// * sinc slot: `sin(A w)/(pi w)`;
/// * cosine slot:
///   `-(1/(2 pi alpha)) [cos((A+alpha)w)/(A+alpha) + cos((A-alpha)w)/(A-alpha)] P`;
/// * log-band slot: `-(1/pi) [Ci((A+alpha)|w|) - Ci((A-alpha)|w|)] S`.
pub fn inner_kernel_closed(
    m: &InnerModel,
    a: f64,
    x: f64,
    xp: f64,
) -> Result<KernelValue, KernelError> {
    let alpha = m.alpha();
    if a <= alpha {
        return Err(KernelError::BandwidthTooSmall { a, alpha });
    }
    let w = x - xp;
    let p = inner_p(m, x, xp);
    let s = inner_sym(m, x, xp);
    let pi = std::f64::consts::PI;

    let sinc = Complex64::new(sinc_kernel(a, w), 0.0);
    let cos_block = ((a + alpha) * w).cos() / (a + alpha) + ((a - alpha) * w).cos() / (a - alpha);
    let cos_band = -p * cos_block / (2.0 * pi * alpha);
    let log_band = -s * cosine_band(a - alpha, a + alpha, w)? / pi;
    Ok(KernelValue {
        sinc,
        boundary: Complex64::new(0.0, 0.0),
        cos_band,
        log_band,
    })
}

/// Direct contour-quadrature twin of [`inner_kernel_closed`].
pub fn inner_kernel_direct(
    m: &InnerModel,
    a: f64,
    spec: DeformationSpec,
    x: f64,
    xp: f64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    let contour = inner_contour(a, m.alpha(), spec)?;
    inner_direct_on(m, &contour, x, xp, tol)
}

/// Direct quadrature along an arbitrary prebuilt contour (used for the
/// mixed-detour residue checks).
pub fn inner_direct_on(
    m: &InnerModel,
    contour: &crate::contours::Contour,
    x: f64,
    xp: f64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    let w = x - xp;
    let f = |k: Complex64| {
        inner_product_integrand(m, x, xp, k).expect("contour stays away from the poles")
    };
    let (v, _) = contour.integrate_hinted(f, tol, Some(w.abs() + 1.0))?;
    Ok(v)
}

/// Closed form of the shrinking-detour kernel: the eigenfunction product
/// integrated over the two radius-`eps` semicircular arcs around
/// `k = -alpha` and `k = +alpha` (either side; the two residues cancel):
///
/// * sinc slot: `(2/pi) cos(alpha w) sin(eps w)/w`;
/// * boundary slot: `-(1/(pi alpha)) P { (1 - 2 sin^2(eps w/2))/eps
///   - eps cos(2 alpha w) cos(eps w)/(4 alpha^2 - eps^2)
///   - 2 alpha sin(2 alpha w) sin(eps w)/(4 alpha^2 - eps^2) }`;
/// * log-band slot: `-(1/pi) S [Ci((2 alpha+eps)|w|) - Ci((2 alpha-eps)|w|)]`.
pub fn inner_eps_kernel_closed(
    m: &InnerModel,
    eps: f64,
    x: f64,
    xp: f64,
) -> Result<KernelValue, KernelError> {
    let alpha = m.alpha();
    // The two arcs are centered at -alpha and +alpha; they stay disjoint
    // only for eps < alpha.
    if !(eps > 0.0 && eps < alpha) {
        return Err(KernelError::EpsOutOfRange { eps, alpha });
    }
    let w = x - xp;
    let p = inner_p(m, x, xp);
    let s = inner_sym(m, x, xp);
    let pi = std::f64::consts::PI;

    let sinc_val = if (eps * w).abs() < 1e-4 {
        let t = eps * w;
        (2.0 / pi) * (alpha * w).cos() * eps * (1.0 - t * t / 6.0)
    } else {
        (2.0 / pi) * (alpha * w).cos() * (eps * w).sin() / w
    };

    let half = eps * w / 2.0;
    let fejer = (1.0 - 2.0 * half.sin().powi(2)) / eps;
    let denom = 4.0 * alpha * alpha - eps * eps;
    let block = fejer - eps * (2.0 * alpha * w).cos() * (eps * w).cos() / denom
        - 2.0 * alpha * (2.0 * alpha * w).sin() * (eps * w).sin() / denom;
    let boundary = -p * block / (pi * alpha);

    let log_band = -s * cosine_band(2.0 * alpha - eps, 2.0 * alpha + eps, w)? / pi;
    Ok(KernelValue {
        sinc: Complex64::new(sinc_val, 0.0),
        boundary,
        cos_band: Complex64::new(0.0, 0.0),
        log_band,
    })
}

/// Direct twin of [`inner_eps_kernel_closed`]: quadrature of the
/// eigenfunction product over the two eps-arcs on the chosen side.
pub fn inner_eps_kernel_direct(
    m: &InnerModel,
    eps: f64,
    sign: ArcSign,
    x: f64,
    xp: f64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    let alpha = m.alpha();
    if !(eps > 0.0 && eps < alpha) {
        return Err(KernelError::EpsOutOfRange { eps, alpha });
    }
    let w = x - xp;
    let mut total = Complex64::new(0.0, 0.0);
    for k0 in [-alpha, alpha] {
        let arc = epsilon_arc(k0, eps, sign)?;
        let f = |k: Complex64| {
            inner_product_integrand(m, x, xp, k).expect("arc stays at distance eps from its pole")
        };
        let (v, _) = arc.integrate_hinted(f, 0.5 * tol, Some(w.abs() + 1.0))?;
        total += v;
    }
    Ok(total)
}

/// Residue of the eigenfunction product at `k0 = +-alpha`, extracted by a
/// full-circle contour integral `(1/2 pi i) oint`.  The analytic values are
/// `+S/(2 pi)` at `+alpha` and `-S/(2 pi)` at `-alpha`.
pub fn inner_residue(
    m: &InnerModel,
    x: f64,
    xp: f64,
    k0: f64,
    radius: f64,
    tol: f64,
) -> Result<Complex64, KernelError> {
    assert!(
        radius > 0.0 && radius < 2.0 * m.alpha(),
        "residue circle must enclose exactly one pole"
    );
    let c = circle(Complex64::new(k0, 0.0), radius)?;
    let f = |k: Complex64| {
        inner_product_integrand(m, x, xp, k).expect("circle stays away from the poles")
    };
    let v = c.integrate(f, tol)?;
    Ok(v / (2.0 * std::f64::consts::PI * I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_close(a: Complex64, b: Complex64, tol: f64, what: &str) {
        let diff = (a - b).norm() / (1.0 + b.norm());
        assert!(diff < tol, "{what}: {a} vs {b} (rel {diff:.3e})");
    }

    #[test]
    fn sinc_kernel_series_joins_smoothly() {
        let a = 7.0;
        // Just inside the series switch |aw| = 1e-4 the series and the exact
        // ratio must agree to machine precision.
        let w = 0.99e-4 / a;
        let series = sinc_kernel(a, w);
        let exact = (a * w).sin() / (PI * w);
        assert!((series - exact).abs() < 1e-14 * exact.abs());
        assert_abs_diff_eq!(sinc_kernel(a, 0.0), a / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(sinc_kernel(a, 0.5), (3.5f64).sin() / (PI * 0.5), epsilon = 1e-15);
    }

    #[test]
    fn cosine_band_matches_quadrature_oracle() {
        // band(a, b, u) = int_a^b cos(u t)/t dt.
        for (a, b, u) in [(1.0, 3.0, 0.7), (0.5, 9.5, 2.3), (2.0, 2.5, -4.0)] {
            let oracle = integrate(
                |t: f64| c64((u * t).cos() / t, 0.0),
                a,
                b,
                1e-13,
            )
            .unwrap()
            .value
            .re;
            assert_abs_diff_eq!(cosine_band(a, b, u).unwrap(), oracle, epsilon = 1e-11);
        }
        // Diagonal limit.
        assert_abs_diff_eq!(
            cosine_band(2.0, 5.0, 0.0).unwrap(),
            (5.0f64 / 2.0).ln(),
            epsilon = 1e-15
        );
        assert!(cosine_band(-1.0, 2.0, 0.3).is_err());
        assert!(cosine_band(2.0, 2.0, 0.3).is_err());
    }

    #[test]
    fn envelope_constant_is_the_first_lobe_peak() {
        // Oracle: scipy minimize_scalar on (1+xi)|sin xi|/xi puts the
        // supremum at xi = 1.215050 with twice the value below.
        let c = band_envelope_constant();
        assert_abs_diff_eq!(c, 3.417733685469458, epsilon = 1e-9);
        // C/2 dominates the generating function on a long sweep.
        let mut xi = 0.01f64;
        while xi < 300.0 {
            assert!((1.0 + xi) * xi.sin().abs() / xi <= c / 2.0 + 1e-12, "xi={xi}");
            xi += 0.0137;
        }
        assert!(band_envelope_bound(1.0, 0.8, 0.3).is_err());
    }

    #[test]
    fn band_bounds_hold_on_a_quasi_random_scan() {
        // Preview of the 1e5-sample check-suite scans: the band integral
        // stays inside both its envelope bound and its sinc-defect bound
        // (slack 1e-12 for roundoff).
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let alpha = 1.0;
        for _ in 0..4000 {
            let a_trunc = alpha + 20.0 * rng.gen::<f64>().max(1e-3);
            let u = 16.0 * (rng.gen::<f64>() - 0.5);
            let (lo, hi) = (a_trunc - alpha, a_trunc + alpha);
            let band = cosine_band(lo, hi, u).unwrap();
            let env = band_envelope_bound(alpha, a_trunc, u).unwrap();
            assert!(band.abs() <= env + 1e-12, "envelope at A={a_trunc}, u={u}");
            if u.abs() > 1e-6 {
                let sinc_diff = (hi * u).sin() / (hi * u) - (lo * u).sin() / (lo * u);
                assert!(
                    (band - sinc_diff).abs() <= band_sinc_defect_bound(lo, u) + 1e-12,
                    "sinc defect at A={a_trunc}, u={u}"
                );
            }
        }
    }

    #[test]
    fn edge_level_zero_kernel_is_pure_sinc() {
        let m = EdgeModel::new(0, c64(0.0, 1.0)).unwrap();
        let kv = edge_kernel_closed(&m, 6.0, 0.7, -0.2).unwrap();
        assert_eq!(kv.boundary, c64(0.0, 0.0));
        assert_abs_diff_eq!(kv.sinc.re, sinc_kernel(6.0, 0.9), epsilon = 1e-15);
        let direct = edge_kernel_direct(&m, 6.0, DeformationSpec::up(0.5), 0.7, -0.2, 1e-11)
            .unwrap();
        rel_close(kv.total(), direct, 1e-9, "n=0 kernel");
    }

    #[test]
    fn edge_closed_matches_direct_quadrature() {
        let m = EdgeModel::new(1, c64(0.0, 1.0)).unwrap();
        for &(x, xp) in &[(0.4, -0.7), (1.3, 1.3), (-2.0, 0.1)] {
            let kv = edge_kernel_closed(&m, 5.0, x, xp).unwrap();
            let direct =
                edge_kernel_direct(&m, 5.0, DeformationSpec::up(0.5), x, xp, 1e-11).unwrap();
            rel_close(kv.total(), direct, 1e-9, "n=1 closed vs direct");
        }
        let m2 = EdgeModel::new(2, c64(0.5, -0.8)).unwrap();
        let kv = edge_kernel_closed(&m2, 4.0, 0.9, 0.3).unwrap();
        let direct =
            edge_kernel_direct(&m2, 4.0, DeformationSpec::down(0.4), 0.9, 0.3, 1e-11).unwrap();
        rel_close(kv.total(), direct, 1e-9, "n=2 closed vs direct");
    }

    #[test]
    fn edge_direct_is_detour_side_independent() {
        // The k = 0 residue of the product vanishes, so up and down detours
        // agree; this is what makes the closed form well-defined.
        let m = EdgeModel::new(2, c64(0.0, 1.0)).unwrap();
        let up = edge_kernel_direct(&m, 3.0, DeformationSpec::up(0.3), 0.8, -0.5, 1e-11).unwrap();
        let down =
            edge_kernel_direct(&m, 3.0, DeformationSpec::down(0.3), 0.8, -0.5, 1e-11).unwrap();
        assert!((up - down).norm() < 1e-10, "up {up} vs down {down}");
    }

    #[test]
    fn edge_kernel_telescopes_at_every_level() {
        // K^(n) = rho K^(n-1) + leading boundary pair: the closed forms at
        // successive orders must be consistent with a single recursion step.
        let z = c64(0.0, 1.0);
        let (a, x, xp) = (4.0, 0.9, -0.3);
        let rho = (c64(xp, 0.0) - z) / (c64(x, 0.0) - z);
        let ka = c64(a, 0.0);
        for n in 1..=4usize {
            let mn = EdgeModel::new(n, z).unwrap();
            let prev = EdgeModel::new(n - 1, z).unwrap();
            let kn = edge_kernel_closed(&mn, a, x, xp).unwrap();
            let kprev = edge_kernel_closed(&prev, a, x, xp).unwrap();
            let lead = (mn.psi_level(n - 1, x, ka).unwrap()
                * mn.psi_level(n, xp, -ka).unwrap()
                - mn.psi_level(n - 1, x, -ka).unwrap() * mn.psi_level(n, xp, ka).unwrap())
                / (I * (c64(x, 0.0) - z));
            rel_close(
                kn.total(),
                rho * kprev.total() + lead,
                1e-12,
                &format!("kernel recursion at n={n}"),
            );
        }
    }

    #[test]
    fn biortho_recursion_telescopes_at_every_level() {
        // The same single recursion step in the wavenumber variables:
        // B^(n) = k'^2 B^(n-1) - i [lead(R) - lead(-R)], with lead the l = 0
        // boundary summand built from the renormalized eigenfunctions.
        let z = c64(0.0, 1.0);
        let (r, k, kp) = (3.0, c64(1.3, 0.0), c64(0.7, 0.0));
        for n in 1..=4usize {
            let mn = EdgeModel::new(n, z).unwrap();
            let prev = EdgeModel::new(n - 1, z).unwrap();
            let bn = biortho_partial_closed(&mn, r, k, kp).unwrap();
            let bprev = biortho_partial_closed(&prev, r, k, kp).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lead = |x: f64| {
                mn.psi_renormalized(n - 1, x, k).unwrap()
                    * (sign * mn.psi_renormalized(n, x, -kp).unwrap())
            };
            let reconstructed = kp * kp * bprev.total() - I * (lead(r) - lead(-r));
            rel_close(
                bn.total(),
                reconstructed,
                1e-12,
                &format!("biortho recursion at n={n}"),
            );
        }
    }

    #[test]
    fn kernels_are_symmetric_under_argument_exchange() {
        // K(x,x') = K(x',x) for every x-space kernel: the defining integrals
        // map onto themselves under k -> -k.  For the edge model the
        // individual slots differ (rho inverts); only the totals agree.
        let em = EdgeModel::new(2, c64(0.3, 0.8)).unwrap();
        let ke = edge_kernel_closed(&em, 6.0, 0.9, -0.4).unwrap();
        let ke_sw = edge_kernel_closed(&em, 6.0, -0.4, 0.9).unwrap();
        rel_close(ke.total(), ke_sw.total(), 1e-12, "edge exchange");
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        let ki = inner_kernel_closed(&m, 5.0, 0.7, -1.1).unwrap();
        let ki_sw = inner_kernel_closed(&m, 5.0, -1.1, 0.7).unwrap();
        rel_close(ki.total(), ki_sw.total(), 1e-12, "inner exchange");
        let keps = inner_eps_kernel_closed(&m, 0.35, 0.7, -1.1).unwrap();
        let keps_sw = inner_eps_kernel_closed(&m, 0.35, -1.1, 0.7).unwrap();
        rel_close(keps.total(), keps_sw.total(), 1e-12, "eps exchange");
    }

    #[test]
    fn edge_diagonal_sinc_is_positive() {
        // On the diagonal rho = 1 exactly, so the sinc slot is A/pi at every
        // order: the Fejer-positive piece that carries the delta limit.
        let z = c64(-0.2, 0.7);
        for n in 0..=4usize {
            let m = EdgeModel::new(n, z).unwrap();
            let kv = edge_kernel_closed(&m, 9.0, 1.3, 1.3).unwrap();
            assert_abs_diff_eq!(kv.sinc.re, 9.0 / PI, epsilon = 1e-13);
            assert_abs_diff_eq!(kv.sinc.im, 0.0, epsilon = 1e-13);
            assert!(kv.sinc.re > 0.0);
        }
    }

    #[test]
    fn biortho_partial_closed_matches_direct() {
        let m = EdgeModel::new(1, c64(0.0, 1.0)).unwrap();
        for &(k, kp) in &[(1.3, 0.7), (0.6, 2.2)] {
            let (k, kp) = (c64(k, 0.0), c64(kp, 0.0));
            let closed = biortho_partial_closed(&m, 3.0, k, kp).unwrap();
            let direct = biortho_partial_direct(&m, 3.0, k, kp, 1e-11).unwrap();
            rel_close(closed.total(), direct, 1e-9, "partial biorthogonality");
        }
        // Complex spectral parameter: the closed form continues analytically.
        let (k, kp) = (c64(1.1, 0.4), c64(0.8, -0.2));
        let closed = biortho_partial_closed(&m, 2.0, k, kp).unwrap();
        let direct = biortho_partial_direct(&m, 2.0, k, kp, 1e-11).unwrap();
        rel_close(closed.total(), direct, 1e-9, "complex k");
    }

    #[test]
    fn biortho_partial_n2() {
        let m = EdgeModel::new(2, c64(-0.2, 0.6)).unwrap();
        let (k, kp) = (c64(1.9, 0.0), c64(1.4, 0.0));
        let closed = biortho_partial_closed(&m, 4.0, k, kp).unwrap();
        let direct = biortho_partial_direct(&m, 4.0, k, kp, 1e-11).unwrap();
        rel_close(closed.total(), direct, 1e-9, "n=2 partial biorthogonality");
    }

    #[test]
    fn inner_product_integrand_guards_poles() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        assert!(matches!(
            inner_product_integrand(&m, 0.3, 0.1, c64(1.0, 0.0)),
            Err(KernelError::PoleProximity { .. })
        ));
        assert!(inner_product_integrand(&m, 0.3, 0.1, c64(1.0, 0.2)).is_ok());
    }

    #[test]
    fn inner_closed_matches_direct_quadrature() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        for &(x, xp) in &[(0.4, -0.7), (1.1, 1.1), (-2.3, 0.6)] {
            let kv = inner_kernel_closed(&m, 5.0, x, xp).unwrap();
            let direct =
                inner_kernel_direct(&m, 5.0, DeformationSpec::up(0.3), x, xp, 1e-11).unwrap();
            rel_close(kv.total(), direct, 1e-9, "inner closed vs direct");
            let down =
                inner_kernel_direct(&m, 5.0, DeformationSpec::down(0.3), x, xp, 1e-11).unwrap();
            rel_close(kv.total(), down, 1e-9, "inner closed vs down-direct");
        }
    }

    #[test]
    fn inner_kernel_rejects_small_bandwidth() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        assert!(matches!(
            inner_kernel_closed(&m, 0.8, 0.1, 0.2),
            Err(KernelError::BandwidthTooSmall { .. })
        ));
    }

    #[test]
    fn inner_diagonal_log_band() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        let (a, x) = (5.0, 0.7);
        let kv = inner_kernel_closed(&m, a, x, x).unwrap();
        let s = inner_sym(&m, x, x);
        let expected = -s * ((a + 1.0) / (a - 1.0)).ln() / PI;
        assert!((kv.log_band - expected).norm() < 1e-14);
        assert_abs_diff_eq!(kv.sinc.re, a / PI, epsilon = 1e-15);
    }

    #[test]
    fn eps_kernel_closed_matches_arc_quadrature_both_sides() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        for &(x, xp) in &[(0.4, -0.7), (0.9, 0.9)] {
            for eps in [0.2, 0.5] {
                let kv = inner_eps_kernel_closed(&m, eps, x, xp).unwrap();
                let plus = inner_eps_kernel_direct(&m, eps, ArcSign::Plus, x, xp, 1e-11).unwrap();
                let minus =
                    inner_eps_kernel_direct(&m, eps, ArcSign::Minus, x, xp, 1e-11).unwrap();
                rel_close(kv.total(), plus, 1e-9, "eps kernel vs upper arcs");
                // Residues at the two poles cancel => side independence.
                rel_close(plus, minus, 1e-9, "upper vs lower arcs");
            }
        }
    }

    #[test]
    fn eps_kernel_diagonal_formula() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        let (eps, x) = (0.3, 0.4);
        let kv = inner_eps_kernel_closed(&m, eps, x, x).unwrap();
        let p = inner_p(&m, x, x);
        let s = inner_sym(&m, x, x);
        let alpha = 1.0;
        let expect_sinc = 2.0 * eps / PI;
        let expect_boundary =
            -p * (1.0 / eps - eps / (4.0 * alpha * alpha - eps * eps)) / (PI * alpha);
        let expect_log = -s * ((2.0 * alpha + eps) / (2.0 * alpha - eps)).ln() / PI;
        assert_abs_diff_eq!(kv.sinc.re, expect_sinc, epsilon = 1e-14);
        assert!((kv.boundary - expect_boundary).norm() < 1e-13);
        assert!((kv.log_band - expect_log).norm() < 1e-13);
    }

    #[test]
    fn eps_kernel_validates_radius() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        assert!(matches!(
            inner_eps_kernel_closed(&m, 2.0, 0.1, 0.2),
            Err(KernelError::EpsOutOfRange { .. })
        ));
        assert!(matches!(
            inner_eps_kernel_closed(&m, 0.0, 0.1, 0.2),
            Err(KernelError::EpsOutOfRange { .. })
        ));
    }

    #[test]
    fn residues_match_analytic_values() {
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        for &(x, xp) in &[(0.4, -0.7), (1.2, 0.3)] {
            let s = inner_sym(&m, x, xp);
            let plus = inner_residue(&m, x, xp, 1.0, 0.3, 1e-12).unwrap();
            let minus = inner_residue(&m, x, xp, -1.0, 0.3, 1e-12).unwrap();
            let expect = s / (2.0 * PI);
            assert!((plus - expect).norm() < 1e-10, "residue at +alpha");
            assert!((minus + expect).norm() < 1e-10, "residue at -alpha");
            assert!((plus + minus).norm() < 1e-10, "residues must cancel");
        }
    }

    #[test]
    fn mixed_detours_differ_by_the_residue() {
        // Flipping only the +alpha detour from up to down adds
        // 2 pi i * Res_{+alpha} = i S to the integral.
        let m = InnerModel::new(1.0, c64(0.0, 1.0)).unwrap();
        let (x, xp) = (0.8, -0.5);
        let both_up = inner_kernel_direct(&m, 4.0, DeformationSpec::up(0.25), x, xp, 1e-11)
            .unwrap();
        let mixed = crate::contours::inner_contour_mixed(
            4.0,
            1.0,
            0.25,
            crate::contours::Direction::Up,
            crate::contours::Direction::Down,
        )
        .unwrap();
        let mixed_v = inner_direct_on(&m, &mixed, x, xp, 1e-11).unwrap();
        let expect = I * inner_sym(&m, x, xp);
        assert!(
            ((mixed_v - both_up) - expect).norm() < 1e-9,
            "difference {} vs iS {}",
            mixed_v - both_up,
            expect
        );
    }
}
