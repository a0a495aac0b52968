//! Convergence probes for the distributional limits realized by the
//! truncated kernels: resolution-of-identity checks, vanishing families,
//! weak boundary limits, pairings against slowly growing test functions,
//! and the residual functionals supported at infinity.
//!
//! Every probe follows the same pattern: evaluate a pairing for each value
//! of a truncation / shrinking parameter, then hand the sequence to
//! [`analyze_convergence`], which fits an algebraic rate, extrapolates
//! (Richardson against a known target, Aitken otherwise) and issues a
//! [`Verdict`].  Pairings over the real line are truncated to a finite
//! window; the remainder is either bounded by sampling the integrand
//! envelope ([`pair`] with [`PairDomain::Truncated`]) or summed explicitly
//! in half-period cells with series acceleration (the slow-growth and
//! infinity probes, where the tail *is* the signal).
//!
//! The reported `max_quad_error` aggregates quadrature error estimates and
//! certified tail bounds, and the verdict logic never trusts residuals
//! below that floor.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{self, KernelError};
use crate::models::{EdgeModel, InnerModel, ModelError};
use crate::quad::{self, QuadConfig, QuadError, QuadResult};
use crate::testspace::{self, Membership, SupportSide, TestFunction};
use crate::{I, INV_SQRT_2PI};

/// Default truncation grid for resolution-of-identity probes.
pub const DEFAULT_A_GRID: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];
/// Default shrinking-parameter grid for vanishing and infinity probes.
pub const DEFAULT_EPS_GRID: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];
/// Default parameter grid for weak boundary limits.
pub const DEFAULT_BOUNDARY_GRID: [f64; 3] = [10.0, 100.0, 1000.0];

/// Failure modes of the probe layer.
#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("quadrature failure: {0}")]
    Quad(#[from] QuadError),
    #[error("kernel evaluation failure: {0}")]
    Kernel(#[from] KernelError),
    #[error("model evaluation failure: {0}")]
    Model(#[from] ModelError),
    /// The certified tail bound exceeds the budget; enlarging the window to
    /// the suggested radius should bring it back under.
    #[error(
        "pairing tail {tail:.3e} exceeds budget {budget:.3e} at radius {radius:.1}; \
         a radius near {suggested:.1} should suffice"
    )]
    Truncation {
        tail: f64,
        budget: f64,
        radius: f64,
        suggested: f64,
    },
    /// The sampled envelope does not decay, so no tail bound can be certified.
    #[error("integrand envelope is not decaying at radius {radius:.1}; cannot certify a truncation")]
    TailEstimate { radius: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn precondition(msg: impl Into<String>) -> ProbeError {
    ProbeError::Precondition(msg.into())
}

// --- convergence reports --------------------------------------------------

/// Outcome of a convergence probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Residuals against a known target fell below tolerance and the
    /// extrapolated value agrees with the target.
    Converged,
    /// The sequence tends to zero within tolerance.
    Vanishing,
    /// Without a prescribed target, the sequence stabilized on a nonzero
    /// limit (reported as `extrapolated`).
    NontrivialLimit,
    /// Residuals grow with resolution.
    Diverging,
    /// None of the above could be certified.
    Inconclusive,
}

/// Thresholds used when turning a residual sequence into a [`Verdict`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTolerances {
    /// The extrapolated value must sit this close to the target.
    pub extrapolated_residual: f64,
    /// The last raw residual must fall below this.
    pub last_residual: f64,
    /// Growth factor per decade of resolution that counts as divergence.
    pub divergence_factor: f64,
    /// Residuals below this are treated as numerical noise (raised
    /// automatically when quadrature error estimates exceed it).
    pub noise_floor: f64,
}

impl Default for ProbeTolerances {
    fn default() -> Self {
        ProbeTolerances {
            extrapolated_residual: 1e-4,
            last_residual: 1e-2,
            divergence_factor: 2.0,
            noise_floor: 1e-11,
        }
    }
}

/// A parameter sweep of a pairing together with its convergence analysis.
///
/// `parameters` is the raw sweep grid (a truncation radius, or a shrinking
/// width), while `resolutions` is the equivalent increasing resolution used
/// for rate fitting (`A` itself, or `1/eps`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub parameter_name: String,
    pub parameters: Vec<f64>,
    pub resolutions: Vec<f64>,
    #[serde(with = "crate::ser::c64_vec")]
    pub values: Vec<Complex64>,
    /// `|value - target|`, or successive differences when no target is known.
    pub residuals: Vec<f64>,
    #[serde(with = "crate::ser::c64_opt")]
    pub target: Option<Complex64>,
    #[serde(with = "crate::ser::c64")]
    pub extrapolated: Complex64,
    /// Distance of the extrapolated value from the target (or from the last
    /// value when no target is known).
    pub extrapolated_residual: f64,
    /// Least-squares slope of `log residual` against `log resolution` over
    /// the residuals that sit above the noise floor.
    pub fitted_rate: Option<f64>,
    /// Largest per-point quadrature error estimate plus certified tail bound.
    pub max_quad_error: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    /// Pretty-printed JSON for report files.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// CSV table `parameter, re, im, residual`, one row per sweep point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,re,im,residual\n");
        for i in 0..self.parameters.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                self.parameters[i], self.values[i].re, self.values[i].im, self.residuals[i]
            ));
        }
        out
    }
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - xm) * (y - ym);
        den += (x - xm) * (x - xm);
    }
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Rate-fit, extrapolate and classify a sweep of pairing values.
///
/// With a `target` the residuals are distances to it and the extrapolation
/// is Richardson with the fitted rate; without one the residuals are
/// successive differences and the extrapolation is Aitken's delta-squared.
pub fn analyze_convergence(
    label: impl Into<String>,
    parameter_name: impl Into<String>,
    parameters: &[f64],
    resolutions: &[f64],
    values: &[Complex64],
    target: Option<Complex64>,
    max_quad_error: f64,
    tols: &ProbeTolerances,
) -> ConvergenceReport {
    assert_eq!(parameters.len(), values.len());
    assert_eq!(resolutions.len(), values.len());
    assert!(values.len() >= 2, "need at least two sweep points");
    let n = values.len();
    let mut notes = Vec::new();

    let residuals: Vec<f64> = match target {
        Some(t) => values.iter().map(|v| (v - t).norm()).collect(),
        None => {
            let mut r: Vec<f64> = std::iter::once(0.0)
                .chain(values.windows(2).map(|w| (w[1] - w[0]).norm()))
                .collect();
            // The first point has no predecessor; reuse the first difference
            // so the vector aligns with the sweep.
            r[0] = r[1];
            r
        }
    };

    let floor = tols.noise_floor.max(3.0 * max_quad_error);
    if floor > tols.noise_floor {
        notes.push(format!(
            "noise floor raised to {floor:.2e} by quadrature error estimates"
        ));
    }

    let fit_points: Vec<(f64, f64)> = resolutions
        .iter()
        .zip(&residuals)
        .filter(|(_, r)| **r > floor)
        .map(|(a, r)| (a.ln(), r.ln()))
        .collect();
    let fitted_rate = lsq_slope(
        &fit_points.iter().map(|p| p.0).collect::<Vec<_>>(),
        &fit_points.iter().map(|p| p.1).collect::<Vec<_>>(),
    );

    let last = values[n - 1];
    let extrapolated = match target {
        Some(_) => match fitted_rate {
            Some(p) if p < -0.05 && p.is_finite() => {
                let q = resolutions[n - 1] / resolutions[n - 2];
                let gain = q.powf(-p);
                if gain.is_finite() && gain > 1.0 + 1e-9 {
                    last + (last - values[n - 2]) / (gain - 1.0)
                } else {
                    last
                }
            }
            _ => last,
        },
        None => {
            if n >= 3 {
                let d1 = values[n - 1] - values[n - 2];
                let d0 = values[n - 2] - values[n - 3];
                if d0.norm() > 0.0 {
                    let rho = d1 / d0;
                    if rho.norm() < 0.9 {
                        last + d1 * rho / (Complex64::new(1.0, 0.0) - rho)
                    } else {
                        last
                    }
                } else {
                    last
                }
            } else {
                last
            }
        }
    };

    let extrapolated_residual = match target {
        Some(t) => (extrapolated - t).norm(),
        None => (extrapolated - last).norm(),
    };

    let r_last = residuals[n - 1];
    let r_first = residuals[0];
    let decades = (resolutions[n - 1] / resolutions[0]).log10().max(0.3);
    let diverging = r_last > r_first * tols.divergence_factor.powf(decades)
        && r_last > 10.0 * tols.last_residual;

    let verdict = if diverging {
        Verdict::Diverging
    } else {
        match target {
            Some(t) => {
                if extrapolated_residual < tols.extrapolated_residual && r_last < tols.last_residual
                {
                    if t.norm() == 0.0 {
                        Verdict::Vanishing
                    } else {
                        Verdict::Converged
                    }
                } else {
                    Verdict::Inconclusive
                }
            }
            None => {
                if last.norm() < tols.last_residual && extrapolated.norm() < tols.last_residual {
                    Verdict::Vanishing
                } else if r_last <= 0.01 * last.norm() && last.norm() > tols.last_residual {
                    Verdict::NontrivialLimit
                } else {
                    Verdict::Inconclusive
                }
            }
        }
    };

    ConvergenceReport {
        label: label.into(),
        parameter_name: parameter_name.into(),
        parameters: parameters.to_vec(),
        resolutions: resolutions.to_vec(),
        values: values.to_vec(),
        residuals,
        target,
        extrapolated,
        extrapolated_residual,
        fitted_rate,
        max_quad_error,
        verdict,
        notes,
    }
}

fn require_grid(name: &str, grid: &[f64], min_len: usize, increasing: bool) -> Result<(), ProbeError> {
    if grid.len() < min_len {
        return Err(precondition(format!(
            "{name} needs at least {min_len} points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(precondition(format!("{name} contains non-finite entries")));
    }
    let ordered = grid.windows(2).all(|w| {
        if increasing {
            w[1] > w[0]
        } else {
            w[1] < w[0]
        }
    });
    if !ordered {
        let dir = if increasing { "increasing" } else { "decreasing" };
        return Err(precondition(format!("{name} must be strictly {dir}")));
    }
    Ok(())
}

// --- truncated pairings ---------------------------------------------------

/// How a pairing over the whole line is reduced to a finite computation.
#[derive(Clone, Copy, Debug)]
pub enum PairDomain {
    /// Integrate `[x0 - R, x0 + R]`; bound the remainder by sampling the
    /// integrand envelope beyond the window.
    Truncated { radius: f64 },
    /// Integrate the window, then sum both tails in cells of the given width
    /// (ideally a half-period of the dominant oscillation) with series
    /// acceleration.
    OscillatoryTail { radius: f64, cell: f64 },
}

/// A truncated pairing value with its accuracy certificates.
#[derive(Clone, Copy, Debug)]
pub struct PairOutcome {
    pub value: Complex64,
    /// Accumulated quadrature error estimate.
    pub quad_error: f64,
    /// Certified bound on (or error estimate of) the neglected tails.
    pub tail_bound: f64,
    /// Window radius actually used.
    pub radius: f64,
}

/// Shared capture cell so fallible integrands can run under an infallible
/// quadrature driver; the first failure is kept and re-raised afterwards.
struct ErrCell(RefCell<Option<ProbeError>>);

impl ErrCell {
    fn new() -> Self {
        ErrCell(RefCell::new(None))
    }
    fn capture(&self, r: Result<Complex64, ProbeError>) -> Complex64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    }
    fn finish(self) -> Result<(), ProbeError> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Adaptive integration of an oscillatory integrand over a window, split
/// into chunks so the initial-panel seeding never saturates its clamp.
fn integrate_window<F>(f: &F, lo: f64, hi: f64, freq: f64, tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    if !(hi > lo) {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evals: 0,
        });
    }
    let half_periods = freq.abs() * (hi - lo) / PI;
    let chunks = (half_periods / 1500.0).ceil().max(1.0) as usize;
    let step = (hi - lo) / chunks as f64;
    let per_tol = tol / chunks as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_error = 0.0;
    let mut evals = 0;
    for j in 0..chunks {
        let a = lo + step * j as f64;
        let b = if j + 1 == chunks { hi } else { a + step };
        let cfg = QuadConfig::with_tol(per_tol).with_oscillation(freq, b - a);
        let out = quad::adaptive(f, a, b, &cfg)?;
        value += out.value;
        abs_error += out.abs_error;
        evals += out.evals;
    }
    Ok(QuadResult {
        value,
        abs_error,
        evals,
    })
}

/// Pair a (possibly fallible) kernel slice against a test function.
///
/// `osc_freq` seeds the quadrature with the dominant oscillation frequency
/// of `kernel`; `tail_budget` is the largest acceptable certified tail.
pub fn pair<F>(
    kernel: F,
    phi: &TestFunction,
    center: f64,
    domain: PairDomain,
    osc_freq: Option<f64>,
    quad_tol: f64,
    tail_budget: f64,
) -> Result<PairOutcome, ProbeError>
where
    F: Fn(f64) -> Result<Complex64, ProbeError>,
{
    let radius = match domain {
        PairDomain::Truncated { radius } => radius,
        PairDomain::OscillatoryTail { radius, .. } => radius,
    };
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(precondition(format!("window radius must be positive, got {radius}")));
    }
    let freq = osc_freq.unwrap_or(1.0).abs().max(1e-6);
    let (mut lo, mut hi) = (center - radius, center + radius);
    let mut clipped = false;
    if let Some((a, b)) = phi.support {
        lo = lo.max(a);
        hi = hi.min(b);
        clipped = true;
        if !(hi > lo) {
            return Ok(PairOutcome {
                value: Complex64::new(0.0, 0.0),
                quad_error: 0.0,
                tail_bound: 0.0,
                radius,
            });
        }
    }

    let cell = ErrCell::new();
    let window = {
        let g = |x: f64| cell.capture(kernel(x).map(|k| k * phi.eval(x)));
        integrate_window(&g, lo, hi, freq, quad_tol)?
    };

    match domain {
        PairDomain::OscillatoryTail { cell: width, .. } => {
            let mut value = window.value;
            let mut err = window.abs_error;
            if !clipped {
                for sig in [1.0f64, -1.0] {
                    let side = {
                        let g = |u: f64| {
                            let x = center + sig * u;
                            cell.capture(kernel(x).map(|k| k * phi.eval(x)))
                        };
                        quad::oscillatory_series_tail(g, radius, width, quad_tol, 4000)?
                    };
                    value += side.value;
                    err += side.abs_error;
                }
            }
            cell.finish()?;
            Ok(PairOutcome {
                value,
                quad_error: err,
                tail_bound: 0.0,
                radius,
            })
        }
        PairDomain::Truncated { .. } => {
            let mut tail = 0.0;
            if !clipped {
                // Sample the integrand envelope in small clusters at R and
                // 1.5625 R; a cluster spans enough of a period that the max
                // tracks the envelope rather than a zero crossing.
                let span = (2.0 * PI / freq).min(0.05 * radius).max(1e-3 * radius);
                let sample_max = |base: f64, sig: f64| -> Result<f64, ProbeError> {
                    let mut m = 0.0f64;
                    for j in 0..6 {
                        let x = center + sig * (base + span * j as f64 / 5.0);
                        let v = kernel(x)?.norm() * phi.eval(x).norm();
                        m = m.max(v);
                    }
                    Ok(m)
                };
                let mut worst_p = f64::INFINITY;
                for sig in [1.0f64, -1.0] {
                    let m0 = sample_max(radius, sig)?;
                    let m2 = sample_max(radius * 1.5625, sig)?;
                    if m0 < 1e-300 && m2 < 1e-300 {
                        continue;
                    }
                    if !(m2 < 0.99 * m0) {
                        cell.finish()?;
                        return Err(ProbeError::TailEstimate { radius });
                    }
                    let p = (m0 / m2).ln() / 1.5625f64.ln();
                    if p <= 1.05 {
                        cell.finish()?;
                        return Err(ProbeError::TailEstimate { radius });
                    }
                    tail += m0 * radius / (p - 1.0);
                    worst_p = worst_p.min(p);
                }
                if tail > tail_budget {
                    let p = worst_p;
                    let suggested =
                        radius * (2.0 * tail / (tail_budget.max(1e-300))).powf(1.0 / (p - 1.0));
                    cell.finish()?;
                    return Err(ProbeError::Truncation {
                        tail,
                        budget: tail_budget,
                        radius,
                        suggested: suggested.min(5e4),
                    });
                }
            }
            cell.finish()?;
            Ok(PairOutcome {
                value: window.value,
                quad_error: window.abs_error,
                tail_bound: tail,
                radius,
            })
        }
    }
}

/// [`pair`] with automatic window enlargement when the certified tail
/// exceeds its budget.
fn pair_with_retry<F>(
    kernel: &F,
    phi: &TestFunction,
    center: f64,
    radius: f64,
    osc_freq: Option<f64>,
    quad_tol: f64,
    tail_budget: f64,
) -> Result<PairOutcome, ProbeError>
where
    F: Fn(f64) -> Result<Complex64, ProbeError>,
{
    let mut r = radius;
    for attempt in 0..3 {
        match pair(
            |x| kernel(x),
            phi,
            center,
            PairDomain::Truncated { radius: r },
            osc_freq,
            quad_tol,
            tail_budget,
        ) {
            Err(ProbeError::Truncation { suggested, .. }) if attempt < 2 => {
                r = (suggested * 1.2).clamp(r * 1.5, 2e4);
            }
            other => return other,
        }
    }
    unreachable!("loop always returns by the third attempt");
}

// --- approximate-identity families ----------------------------------------

/// Kernel families that concentrate to a point evaluation as the
/// truncation parameter grows.
pub enum DeltaFamily<'a> {
    /// Band-limited kernel of the model with the spectral singularity at the
    /// edge of the continuum; concentrates to `phi(x')`.
    EdgeBandLimited(&'a EdgeModel),
    /// Band-limited kernel of the model with the singularity inside the
    /// continuum; concentrates to `phi(x')`.
    InnerBandLimited(&'a InnerModel),
    /// `((x'-z)/(x-z))^order sin(A(x-x')) / (pi (x-x'))`.
    PrefactoredSinc { order: i32, shift: Complex64 },
    /// Weighted wavenumber-space overlap kernel
    /// `(k k')^n sin(R(k-k')) / (pi (k-k') w(k) w(k'))` with
    /// `w(k) = (1+k^2)^{weight/2}`; concentrates to the weighted point value
    /// `k'^{2n} phi(k') / (1+k'^2)^weight`.
    WeightedWavenumberSinc { model: &'a EdgeModel, weight: i32 },
}

impl DeltaFamily<'_> {
    pub fn label(&self) -> String {
        match self {
            DeltaFamily::EdgeBandLimited(m) => format!("edge band-limited kernel (n = {})", m.order()),
            DeltaFamily::InnerBandLimited(m) => {
                format!("inner band-limited kernel (alpha = {})", m.alpha())
            }
            DeltaFamily::PrefactoredSinc { order, .. } => {
                format!("prefactored sinc kernel (order {order})")
            }
            DeltaFamily::WeightedWavenumberSinc { model, weight } => format!(
                "weighted wavenumber sinc kernel (n = {}, weight {weight})",
                model.order()
            ),
        }
    }

    fn value(&self, a: f64, v: f64, center: f64) -> Result<Complex64, ProbeError> {
        match self {
            DeltaFamily::EdgeBandLimited(m) => {
                Ok(kernels::edge_kernel_closed(m, a, v, center)?.total())
            }
            DeltaFamily::InnerBandLimited(m) => {
                Ok(kernels::inner_kernel_closed(m, a, v, center)?.total())
            }
            DeltaFamily::PrefactoredSinc { order, shift } => {
                let rho = (Complex64::new(center, 0.0) - shift) / (Complex64::new(v, 0.0) - shift);
                Ok(rho.powi(*order) * kernels::sinc_kernel(a, v - center))
            }
            DeltaFamily::WeightedWavenumberSinc { model, weight } => {
                let n = model.order() as i32;
                let wk = (1.0 + v * v).powf(*weight as f64 / 2.0);
                let wkp = (1.0 + center * center).powf(*weight as f64 / 2.0);
                let pow = (v * center).powi(n);
                Ok(Complex64::new(
                    pow * kernels::sinc_kernel(a, v - center) / (wk * wkp),
                    0.0,
                ))
            }
        }
    }

    fn target(&self, phi: &TestFunction, center: f64) -> Complex64 {
        match self {
            DeltaFamily::WeightedWavenumberSinc { model, weight } => {
                let n = model.order() as i32;
                phi.eval(center) * center.powi(2 * n)
                    / (1.0 + center * center).powf(*weight as f64)
            }
            _ => phi.eval(center),
        }
    }

    fn osc_freq(&self, a: f64) -> f64 {
        match self {
            DeltaFamily::InnerBandLimited(m) => a + 4.0 * m.alpha(),
            _ => a,
        }
    }
}

/// Sweep a [`DeltaFamily`] over a truncation grid and test concentration to
/// the (weighted) point value at `center`.
pub fn delta_probe(
    family: &DeltaFamily,
    phi: &TestFunction,
    center: f64,
    grid: &[f64],
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("truncation grid", grid, 4, true)?;
    if let DeltaFamily::InnerBandLimited(m) = family {
        if grid[0] <= m.alpha() {
            return Err(precondition(format!(
                "truncation grid must stay above the band edge alpha = {}",
                m.alpha()
            )));
        }
    }
    let radius = phi.pairing_radius(center);
    let mut values = Vec::with_capacity(grid.len());
    let mut max_err = 0.0f64;
    for &a in grid {
        let kernel = |x: f64| family.value(a, x, center);
        let out = pair_with_retry(
            &kernel,
            phi,
            center,
            radius,
            Some(family.osc_freq(a)),
            quad_tol,
            1e-5,
        )?;
        values.push(out.value);
        max_err = max_err.max(out.quad_error + out.tail_bound);
    }
    Ok(analyze_convergence(
        format!("{} against {}", family.label(), phi.label),
        "truncation",
        grid,
        grid,
        &values,
        Some(family.target(phi, center)),
        max_err,
        tols,
    ))
}

// --- vanishing families ---------------------------------------------------

/// Kernel families that must tend to zero distributionally as the
/// shrinking parameter `eps` goes to zero, provided the test function lies
/// in the weighted class with exponent above `gamma_required`.
pub enum VanishingFamily<'a> {
    /// `sin(eps (x-x')) / (x-x')`; needs exponent above -1.
    PlainSinc,
    /// `sin^2(eps (x-x')/2) / (eps (x-z)(x'-z))`; needs exponent above 1.
    WeightedFejer { shift: Complex64 },
    /// `(x-x') sin^2(eps w/4) sin(eps w/2) / (eps^2 (x-z)^2 (x'-z)^2)` with
    /// `w = x-x'`; needs exponent above 3.
    WeightedSincCube { shift: Complex64 },
    /// `(eps w - 2 sin(eps w/2))^2 / (eps^3 (x-z)^2 (x'-z)^2)`; needs
    /// exponent above 3.
    WeightedSincDefect { shift: Complex64 },
    /// `psi0(x) [eps cos(2 alpha w) cos(eps w) + 2 alpha sin(2 alpha w) sin(eps w)]`;
    /// needs exponent above -1.
    GroundCosineBand(&'a InnerModel),
    /// Symmetrized ground/excited product times the band integral
    /// `int_{2 alpha - eps}^{2 alpha + eps} cos(t w)/t dt`; needs exponent
    /// above -1.
    SymmetrizedBand(&'a InnerModel),
    /// `psi0(x) sin^2(eps w/2) / eps`; needs exponent above 1.
    GroundFejer(&'a InnerModel),
}

/// `eps w - 2 sin(eps w / 2)`, series-guarded against cancellation.
fn sinc_defect(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        let u2 = u * u;
        u * u2 / 24.0 * (1.0 - u2 / 80.0)
    } else {
        u - 2.0 * (0.5 * u).sin()
    }
}

impl VanishingFamily<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            VanishingFamily::PlainSinc => "plain sinc family",
            VanishingFamily::WeightedFejer { .. } => "weighted Fejer family",
            VanishingFamily::WeightedSincCube { .. } => "weighted sinc-cube family",
            VanishingFamily::WeightedSincDefect { .. } => "weighted sinc-defect family",
            VanishingFamily::GroundCosineBand(_) => "ground-state cosine band family",
            VanishingFamily::SymmetrizedBand(_) => "symmetrized band family",
            VanishingFamily::GroundFejer(_) => "ground-state Fejer family",
        }
    }

    /// Weighted-class exponent above which the family must vanish.
    pub fn gamma_required(&self) -> f64 {
        match self {
            VanishingFamily::PlainSinc
            | VanishingFamily::GroundCosineBand(_)
            | VanishingFamily::SymmetrizedBand(_) => -1.0,
            VanishingFamily::WeightedFejer { .. } | VanishingFamily::GroundFejer(_) => 1.0,
            VanishingFamily::WeightedSincCube { .. }
            | VanishingFamily::WeightedSincDefect { .. } => 3.0,
        }
    }

    fn value(&self, eps: f64, x: f64, xp: f64) -> Result<Complex64, ProbeError> {
        let w = x - xp;
        match self {
            VanishingFamily::PlainSinc => {
                Ok(Complex64::new(PI * kernels::sinc_kernel(eps, w), 0.0))
            }
            VanishingFamily::WeightedFejer { shift } => {
                let s = (0.5 * eps * w).sin();
                Ok(s * s
                    / (eps
                        * (Complex64::new(x, 0.0) - shift)
                        * (Complex64::new(xp, 0.0) - shift)))
            }
            VanishingFamily::WeightedSincCube { shift } => {
                let s4 = (0.25 * eps * w).sin();
                let s2 = (0.5 * eps * w).sin();
                let dx = Complex64::new(x, 0.0) - shift;
                let dxp = Complex64::new(xp, 0.0) - shift;
                Ok(w * s4 * s4 * s2 / (eps * eps * dx * dx * dxp * dxp))
            }
            VanishingFamily::WeightedSincDefect { shift } => {
                let d = sinc_defect(eps * w);
                let dx = Complex64::new(x, 0.0) - shift;
                let dxp = Complex64::new(xp, 0.0) - shift;
                Ok(d * d / (eps.powi(3) * dx * dx * dxp * dxp))
            }
            VanishingFamily::GroundCosineBand(m) => {
                let a2 = 2.0 * m.alpha();
                let band = eps * (a2 * w).cos() * (eps * w).cos()
                    + a2 * (a2 * w).sin() * (eps * w).sin();
                Ok(m.psi0(x) * band)
            }
            VanishingFamily::SymmetrizedBand(m) => {
                let a2 = 2.0 * m.alpha();
                let band = kernels::cosine_band(a2 - eps, a2 + eps, w)?;
                Ok(kernels::inner_sym(m, x, xp) * band)
            }
            VanishingFamily::GroundFejer(m) => {
                let s = (0.5 * eps * w).sin();
                Ok(m.psi0(x) * s * s / eps)
            }
        }
    }

    fn osc_freq(&self, eps: f64) -> f64 {
        match self {
            VanishingFamily::GroundCosineBand(m)
            | VanishingFamily::SymmetrizedBand(m)
            | VanishingFamily::GroundFejer(m) => eps + 4.0 * m.alpha(),
            _ => eps,
        }
    }

    fn needs_eps_below_alpha(&self) -> Option<f64> {
        match self {
            VanishingFamily::SymmetrizedBand(m) => Some(m.alpha()),
            _ => None,
        }
    }
}

/// Sweep a [`VanishingFamily`] over a shrinking grid and test decay to zero.
///
/// `gamma_claimed` is the weighted-class exponent claimed for `phi`; it must
/// exceed the family's `gamma_required`, and the claim is checked against
/// the truncated-norm ladder before any pairing is evaluated.
pub fn vanishing_probe(
    family: &VanishingFamily,
    phi: &TestFunction,
    gamma_claimed: f64,
    xp: f64,
    eps_grid: &[f64],
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("shrinking grid", eps_grid, 4, false)?;
    let gr = family.gamma_required();
    if !(gamma_claimed > gr) {
        return Err(precondition(format!(
            "claimed growth exponent gamma = {gamma_claimed} must exceed gamma_required = {gr} \
             for the {}",
            family.label()
        )));
    }
    if let Some(alpha) = family.needs_eps_below_alpha() {
        if eps_grid[0] >= alpha {
            return Err(precondition(format!(
                "shrinking grid must stay below alpha = {alpha}"
            )));
        }
    }
    if eps_grid.iter().any(|&e| e <= 0.0) {
        return Err(precondition("shrinking parameters must be positive".to_string()));
    }
    let membership = testspace::membership_check(phi, gamma_claimed).map_err(ProbeError::Quad)?;
    if membership.verdict == Membership::NonMember {
        return Err(precondition(format!(
            "{} fails the class membership check at gamma = {gamma_claimed} \
             (truncated norms grow: {:?})",
            phi.label, membership.norms
        )));
    }

    let radius = phi.pairing_radius(xp);
    let resolutions: Vec<f64> = eps_grid.iter().map(|e| 1.0 / e).collect();
    let mut values = Vec::with_capacity(eps_grid.len());
    let mut max_err = 0.0f64;
    for &eps in eps_grid {
        let kernel = |x: f64| family.value(eps, x, xp);
        let out = pair_with_retry(
            &kernel,
            phi,
            xp,
            radius,
            Some(family.osc_freq(eps)),
            quad_tol,
            1e-5,
        )?;
        values.push(out.value);
        max_err = max_err.max(out.quad_error + out.tail_bound);
    }
    Ok(analyze_convergence(
        format!("{} against {}", family.label(), phi.label),
        "eps",
        eps_grid,
        &resolutions,
        &values,
        Some(Complex64::new(0.0, 0.0)),
        max_err,
        tols,
    ))
}

/// Pair the inner model's narrow-band remainder against `phi` on a growing
/// bandwidth grid and test decay to zero.
///
/// The remainder multiplies the symmetrized ground/chain product by the
/// cosine band over `[a - alpha, a + alpha]`; paired with a fixed decaying
/// `phi` it must wash out as the band center `a` grows.  The grid must be
/// increasing and start above `alpha`.
pub fn band_term_weak_limit(
    model: &InnerModel,
    phi: &TestFunction,
    xp: f64,
    a_grid: &[f64],
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("bandwidth grid", a_grid, 4, true)?;
    let alpha = model.alpha();
    if a_grid[0] <= alpha {
        return Err(precondition(format!(
            "bandwidth centers must exceed alpha = {alpha}"
        )));
    }
    let radius = phi.pairing_radius(xp);
    let mut values = Vec::with_capacity(a_grid.len());
    let mut max_err = 0.0f64;
    for &a in a_grid {
        let kernel = |x: f64| {
            let band = kernels::cosine_band(a - alpha, a + alpha, x - xp)?;
            Ok(kernels::inner_sym(model, x, xp) * band)
        };
        let out = pair_with_retry(
            &kernel,
            phi,
            xp,
            radius,
            Some(a + 4.0 * alpha),
            quad_tol,
            1e-5,
        )?;
        values.push(out.value);
        max_err = max_err.max(out.quad_error + out.tail_bound);
    }
    Ok(analyze_convergence(
        format!("band remainder against {}", phi.label),
        "A",
        a_grid,
        a_grid,
        &values,
        Some(Complex64::new(0.0, 0.0)),
        max_err,
        tols,
    ))
}

// --- weak boundary limits -------------------------------------------------

/// Parameterized integrand terms that must vanish weakly as the parameter
/// (a position or a wavenumber) is pushed to +/- infinity.  The probe
/// evaluates the pairing at both signs of each grid point and records the
/// larger magnitude.
pub enum BoundaryFamily<'a> {
    /// Wavenumber integral of `k^power e^{i p (k - dual)} / (w(k) (p - z)^inverse_power)`
    /// as the position parameter `p` grows; needs exponent above
    /// `1 + 2 power - 2 weight`.
    WeightedPlaneWave {
        power: i32,
        weight: i32,
        inverse_power: i32,
        shift: Complex64,
        dual: f64,
    },
    /// Wavenumber integral of one term of the renormalized eigenfunction
    /// product evaluated at a large position `p`; needs exponent above
    /// `2n - 2 term - 2 weight - 1`.
    EdgeProductTail {
        model: &'a EdgeModel,
        term: usize,
        weight: i32,
        dual: f64,
    },
    /// Position integral of `e^{i p (x - dual)} / (p^power (x - z)^inverse_power)`
    /// as the wavenumber parameter `p` grows; needs exponent above
    /// `1 - 2 inverse_power`.
    ShiftedInversePlaneWave {
        power: i32,
        inverse_power: i32,
        shift: Complex64,
        dual: f64,
    },
    /// Position integral of one term of the edge kernel's boundary slot at a
    /// large wavenumber `p`; needs exponent above `-2 term - 1`.
    EdgeKernelTail {
        model: &'a EdgeModel,
        term: usize,
        dual: f64,
    },
    /// Position integral of `e^{i p (x - dual)} psi0(x) / p` at a large
    /// wavenumber `p`; needs exponent above -1.
    GroundPlaneWave { model: &'a InnerModel, dual: f64 },
}

impl BoundaryFamily<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryFamily::WeightedPlaneWave { .. } => "weighted plane-wave boundary term",
            BoundaryFamily::EdgeProductTail { .. } => "edge product boundary term",
            BoundaryFamily::ShiftedInversePlaneWave { .. } => {
                "shifted-inverse plane-wave boundary term"
            }
            BoundaryFamily::EdgeKernelTail { .. } => "edge kernel boundary term",
            BoundaryFamily::GroundPlaneWave { .. } => "ground-state plane-wave boundary term",
        }
    }

    /// Weighted-class exponent above which the pairing must vanish.
    pub fn gamma_required(&self) -> f64 {
        match self {
            BoundaryFamily::WeightedPlaneWave { power, weight, .. } => {
                1.0 + 2.0 * *power as f64 - 2.0 * *weight as f64
            }
            BoundaryFamily::EdgeProductTail {
                model,
                term,
                weight,
                ..
            } => 2.0 * model.order() as f64 - 2.0 * *term as f64 - 2.0 * *weight as f64 - 1.0,
            BoundaryFamily::ShiftedInversePlaneWave { inverse_power, .. } => {
                1.0 - 2.0 * *inverse_power as f64
            }
            BoundaryFamily::EdgeKernelTail { term, .. } => -2.0 * *term as f64 - 1.0,
            BoundaryFamily::GroundPlaneWave { .. } => -1.0,
        }
    }

    fn validate(&self) -> Result<(), ProbeError> {
        match self {
            BoundaryFamily::EdgeProductTail { model, term, .. }
            | BoundaryFamily::EdgeKernelTail { model, term, .. } => {
                let n = model.order();
                if n == 0 || *term > n - 1 {
                    return Err(precondition(format!(
                        "term index {term} outside 0..={} for order {n}",
                        n.saturating_sub(1)
                    )));
                }
            }
            BoundaryFamily::ShiftedInversePlaneWave { inverse_power, .. } => {
                if *inverse_power < 1 {
                    return Err(precondition(
                        "shifted-inverse term needs inverse_power >= 1".to_string(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The fixed second argument of the pairing (a wavenumber for the
    /// wavenumber-integrated families, a position otherwise).
    fn dual(&self) -> f64 {
        match self {
            BoundaryFamily::WeightedPlaneWave { dual, .. }
            | BoundaryFamily::EdgeProductTail { dual, .. }
            | BoundaryFamily::ShiftedInversePlaneWave { dual, .. }
            | BoundaryFamily::EdgeKernelTail { dual, .. }
            | BoundaryFamily::GroundPlaneWave { dual, .. } => *dual,
        }
    }

    fn osc_freq(&self, p: f64) -> f64 {
        match self {
            BoundaryFamily::GroundPlaneWave { model, .. } => p.abs() + model.alpha(),
            _ => p.abs(),
        }
    }

    /// Pairing magnitude at one signed parameter value.
    fn pairing(&self, phi: &TestFunction, p: f64, quad_tol: f64) -> Result<PairOutcome, ProbeError> {
        let dual = self.dual();
        match self {
            BoundaryFamily::WeightedPlaneWave {
                power,
                weight,
                inverse_power,
                shift,
                ..
            } => {
                let denom = (Complex64::new(p, 0.0) - shift).powi(*inverse_power);
                let kernel = move |k: f64| {
                    let wk = (1.0 + k * k).powf(*weight as f64 / 2.0);
                    Ok(k.powi(*power) * (I * p * (k - dual)).exp() / (wk * denom))
                };
                pair_with_retry(
                    &kernel,
                    phi,
                    dual,
                    phi.pairing_radius(dual),
                    Some(self.osc_freq(p)),
                    quad_tol,
                    1e-5,
                )
            }
            BoundaryFamily::EdgeProductTail {
                model,
                term,
                weight,
                ..
            } => {
                let n = model.order();
                let l = *term;
                let sign = if (n - l) % 2 == 0 { 1.0 } else { -1.0 };
                let dual_c = Complex64::new(dual, 0.0);
                let fixed = sign * model.psi_renormalized(n - l, p, -dual_c)?
                    / (1.0 + dual * dual).powf(*weight as f64 / 2.0);
                let pref = dual.powi(2 * l as i32) * fixed;
                let kernel = move |k: f64| {
                    let wk = (1.0 + k * k).powf(*weight as f64 / 2.0);
                    Ok(pref * model.psi_renormalized(n - 1 - l, p, Complex64::new(k, 0.0))? / wk)
                };
                pair_with_retry(
                    &kernel,
                    phi,
                    dual,
                    phi.pairing_radius(dual),
                    Some(self.osc_freq(p)),
                    quad_tol,
                    1e-5,
                )
            }
            BoundaryFamily::ShiftedInversePlaneWave {
                power,
                inverse_power,
                shift,
                ..
            } => {
                let pref = 1.0 / p.powi(*power);
                let kernel = move |x: f64| {
                    let dx = (Complex64::new(x, 0.0) - shift).powi(*inverse_power);
                    Ok(pref * (I * p * (x - dual)).exp() / dx)
                };
                pair_with_retry(
                    &kernel,
                    phi,
                    dual,
                    phi.pairing_radius(dual),
                    Some(self.osc_freq(p)),
                    quad_tol,
                    1e-5,
                )
            }
            BoundaryFamily::EdgeKernelTail { model, term, .. } => {
                let n = model.order();
                let l = *term;
                let kc = Complex64::new(p, 0.0);
                let z = model.shift();
                let fixed = model.psi_level(n - l, dual, -kc)?;
                let dual_c = Complex64::new(dual, 0.0);
                let kernel = move |x: f64| {
                    let xc = Complex64::new(x, 0.0);
                    let rho = ((dual_c - z) / (xc - z)).powi(l as i32);
                    Ok(rho * model.psi_level(n - 1 - l, x, kc)? * fixed / (I * (xc - z)))
                };
                pair_with_retry(
                    &kernel,
                    phi,
                    dual,
                    phi.pairing_radius(dual),
                    Some(self.osc_freq(p)),
                    quad_tol,
                    1e-5,
                )
            }
            BoundaryFamily::GroundPlaneWave { model, .. } => {
                let kernel = move |x: f64| Ok((I * p * (x - dual)).exp() * model.psi0(x) / p);
                pair_with_retry(
                    &kernel,
                    phi,
                    dual,
                    phi.pairing_radius(dual),
                    Some(self.osc_freq(p)),
                    quad_tol,
                    1e-5,
                )
            }
        }
    }
}

/// Push a [`BoundaryFamily`] parameter along `grid` (both signs) and test
/// that the pairing magnitudes vanish.
pub fn boundary_weak_limit_probe(
    family: &BoundaryFamily,
    phi: &TestFunction,
    gamma_claimed: f64,
    grid: &[f64],
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("boundary parameter grid", grid, 3, true)?;
    if grid[0] < 1.0 {
        return Err(precondition(
            "boundary parameters must start at 1 or above".to_string(),
        ));
    }
    family.validate()?;
    let gr = family.gamma_required();
    if !(gamma_claimed > gr) {
        return Err(precondition(format!(
            "claimed growth exponent gamma = {gamma_claimed} must exceed gamma_required = {gr} \
             for the {}",
            family.label()
        )));
    }
    let membership = testspace::membership_check(phi, gamma_claimed).map_err(ProbeError::Quad)?;
    if membership.verdict == Membership::NonMember {
        return Err(precondition(format!(
            "{} fails the class membership check at gamma = {gamma_claimed}",
            phi.label
        )));
    }

    let mut values = Vec::with_capacity(grid.len());
    let mut max_err = 0.0f64;
    for &p in grid {
        let mut worst = 0.0f64;
        for signed in [p, -p] {
            let out = family.pairing(phi, signed, quad_tol)?;
            worst = worst.max(out.value.norm());
            max_err = max_err.max(out.quad_error + out.tail_bound);
        }
        values.push(Complex64::new(worst, 0.0));
    }
    Ok(analyze_convergence(
        format!("{} against {}", family.label(), phi.label),
        "parameter",
        grid,
        grid,
        &values,
        Some(Complex64::new(0.0, 0.0)),
        max_err,
        tols,
    ))
}

// --- smeared eigenfunction overlaps ---------------------------------------

/// Sweep the window radius of the truncated eigenfunction overlap
/// `int_{-R}^{R} [k^n psi_n(x;k)] [k'^n psi_n(x;-k')] dx`, smeared in `k`
/// against `phi(k) / (w(k) w(k'))` with `w(k) = (1+k^2)^{weight/2}`.
///
/// As `R` grows the overlap concentrates at `k = k'` and the smeared value
/// tends to the weighted point evaluation
/// `k'^{2n} phi(k') / (1 + k'^2)^weight`.
pub fn smeared_biorthogonality(
    model: &EdgeModel,
    weight: i32,
    dual: f64,
    r_grid: &[f64],
    phi: &TestFunction,
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("window grid", r_grid, 3, true)?;
    let n = model.order() as i32;
    let kp = Complex64::new(dual, 0.0);
    let wkp = (1.0 + dual * dual).powf(weight as f64 / 2.0);
    let radius = phi.pairing_radius(dual);
    let mut values = Vec::with_capacity(r_grid.len());
    let mut max_err = 0.0f64;
    for &r in r_grid {
        let kernel = move |k: f64| {
            let wk = (1.0 + k * k).powf(weight as f64 / 2.0);
            let kv = kernels::biortho_partial_closed(model, r, Complex64::new(k, 0.0), kp)?;
            Ok(kv.total() / (wk * wkp))
        };
        let out = pair_with_retry(&kernel, phi, dual, radius, Some(r), quad_tol, 1e-5)?;
        values.push(out.value);
        max_err = max_err.max(out.quad_error + out.tail_bound);
    }
    let target =
        phi.eval(dual) * dual.powi(2 * n) / (1.0 + dual * dual).powf(weight as f64);
    Ok(analyze_convergence(
        format!(
            "smeared eigenfunction overlap (n = {}, weight {weight}) against {}",
            model.order(),
            phi.label
        ),
        "window",
        r_grid,
        r_grid,
        &values,
        Some(target),
        max_err,
        tols,
    ))
}

// --- slowly growing test functions ----------------------------------------

/// Which model's band-limited kernel a slow-growth probe pairs against.
pub enum GrowthModel<'a> {
    Edge(&'a EdgeModel),
    Inner(&'a InnerModel),
}

/// One exponential piece `e^{i omega t} env(t)` of a kernel tail, written
/// in the outward coordinate `t = |x|`.
struct TailPiece<'b> {
    omega: f64,
    env: Box<dyn Fn(f64) -> Complex64 + 'b>,
    env_d: Box<dyn Fn(f64) -> Complex64 + 'b>,
}

/// `int_c^infty e^{i omega t} env(t) dt` by one integration by parts:
/// the boundary term is exact, and the differentiated remainder (one power
/// of decay faster) is summed in half-period cells with acceleration.
fn oscillatory_halfline(
    omega: f64,
    env: &dyn Fn(f64) -> Complex64,
    env_d: &dyn Fn(f64) -> Complex64,
    c: f64,
    tol: f64,
) -> Result<(Complex64, f64), ProbeError> {
    if omega.abs() < 0.5 {
        return Err(precondition(format!(
            "tail piece frequency {omega:.3} too close to zero; raise the truncation"
        )));
    }
    let iw = I * omega;
    let boundary = -(iw * c).exp() * env(c) / iw;
    let h_raw = PI / omega.abs();
    let parts = (h_raw / 45.0).ceil().max(1.0);
    let h = h_raw / parts;
    let inner_tol = (tol * omega.abs() * 0.5).max(1e-14);
    let tail = quad::oscillatory_series_tail(
        |t| (iw * t).exp() * env_d(t),
        c,
        h,
        inner_tol,
        4000,
    )?;
    let value = boundary - tail.value / iw;
    Ok((value, tail.abs_error / omega.abs()))
}

/// Dressing sum `S_m(x; k) = sum_j c_j / (k (x-z))^j` of the edge
/// eigenfunction level `m`, together with its x-derivative.
fn dressing_sum(
    model: &EdgeModel,
    level: usize,
    x: f64,
    k: f64,
) -> Result<(Complex64, Complex64), ProbeError> {
    let coeffs = model.coefficients(level)?;
    let z = model.shift();
    let dx = Complex64::new(x, 0.0) - z;
    let u = 1.0 / (k * dx);
    let mut s = Complex64::new(0.0, 0.0);
    let mut sd = Complex64::new(0.0, 0.0);
    let mut uj = Complex64::new(1.0, 0.0);
    for (j, c) in coeffs.iter().enumerate() {
        s += c * uj;
        if j > 0 {
            sd += c * uj * (-(j as f64)) / dx;
        }
        uj *= u;
    }
    Ok((s, sd))
}

/// Tail pieces of the edge band-limited kernel times `t^kappa e^{i k0 s t}`
/// on the side `x = s t`, `t >= T`.
fn edge_tail_pieces<'b>(
    model: &'b EdgeModel,
    a: f64,
    xp: f64,
    kappa: f64,
    k0: f64,
    s: f64,
) -> Result<Vec<TailPiece<'b>>, ProbeError> {
    let n = model.order();
    let z = model.shift();
    let xp_c = Complex64::new(xp, 0.0);
    let mut pieces: Vec<TailPiece> = Vec::with_capacity(2 + 2 * n);

    // Sinc slot: rho^n sin(A w) / (pi w) split into its two exponentials.
    for sigma in [1.0f64, -1.0] {
        let pref = sigma * (xp_c - z).powi(n as i32) * (-(I * sigma * a * xp)).exp()
            / (2.0 * PI * I);
        let omega = s * (sigma * a + k0);
        let ni = n as i32;
        let env = move |t: f64| {
            let dz = Complex64::new(s * t, 0.0) - z;
            pref * t.powf(kappa) / (dz.powi(ni) * (s * t - xp))
        };
        let env_d = move |t: f64| {
            let dz = Complex64::new(s * t, 0.0) - z;
            let dw = s * t - xp;
            let base = dz.powi(ni) * dw;
            let ddt = s * (-(n as f64) / dz - 1.0 / dw);
            pref * (kappa * t.powf(kappa - 1.0) / base + t.powf(kappa) * ddt / base)
        };
        pieces.push(TailPiece {
            omega,
            env: Box::new(env),
            env_d: Box::new(env_d),
        });
    }

    // Boundary slot: for each term, the two wavenumber signs of
    // rho^l e^{i sigma A x} S_{n-1-l}(x; sigma A) psi_{n-l}(x'; -sigma A) / (i (x-z)).
    for l in 0..n {
        for sigma in [1.0f64, -1.0] {
            let psi_fixed = model.psi_level(n - l, xp, Complex64::new(-sigma * a, 0.0))?;
            let pref = sigma * (xp_c - z).powi(l as i32) * psi_fixed * INV_SQRT_2PI / I;
            let omega = s * (sigma * a + k0);
            let li = l as i32;
            let level = n - 1 - l;
            let env = move |t: f64| {
                let (sv, _) = dressing_sum(model, level, s * t, sigma * a)
                    .expect("coefficients cached at construction");
                let dz = Complex64::new(s * t, 0.0) - z;
                pref * t.powf(kappa) * sv / dz.powi(li + 1)
            };
            let env_d = move |t: f64| {
                let (sv, sd) = dressing_sum(model, level, s * t, sigma * a)
                    .expect("coefficients cached at construction");
                let dz = Complex64::new(s * t, 0.0) - z;
                let dpow = dz.powi(li + 1);
                pref * (kappa * t.powf(kappa - 1.0) * sv / dpow
                    + t.powf(kappa) * s * (sd - (l as f64 + 1.0) * sv / dz) / dpow)
            };
            pieces.push(TailPiece {
                omega,
                env: Box::new(env),
                env_d: Box::new(env_d),
            });
        }
    }
    Ok(pieces)
}

/// Tail pieces of the inner band-limited kernel times `t^kappa e^{i k0 s t}`
/// on the side `x = s t`, plus the non-exponential band-defect remainder
/// (small, `O(1/(A w)^2)`), returned as a direct integrand.
#[allow(clippy::type_complexity)]
fn inner_tail_pieces<'b>(
    model: &'b InnerModel,
    a: f64,
    xp: f64,
    kappa: f64,
    k0: f64,
    s: f64,
) -> Result<(Vec<TailPiece<'b>>, Box<dyn Fn(f64) -> Complex64 + 'b>), ProbeError> {
    let alpha = model.alpha();
    let z = model.shift();
    let sqrt2a = (2.0 * alpha).sqrt();
    let mut pieces: Vec<TailPiece> = Vec::new();

    // Sinc slot, as for the edge kernel but without the prefactor.
    for sigma in [1.0f64, -1.0] {
        let pref = sigma * (-(I * sigma * a * xp)).exp() / (2.0 * PI * I);
        let omega = s * (sigma * a + k0);
        let env = move |t: f64| pref * t.powf(kappa) / (s * t - xp);
        let env_d = move |t: f64| {
            let dw = s * t - xp;
            pref * (kappa * t.powf(kappa - 1.0) / dw - t.powf(kappa) * s / (dw * dw))
        };
        pieces.push(TailPiece {
            omega,
            env: Box::new(env),
            env_d: Box::new(env_d),
        });
    }

    // Cosine-band slot: -psi0(x) psi0(x') [cos(B w)/B]_{B = A +/- alpha} / (2 pi alpha)
    // with psi0(x) split into its two exponentials over the denominator d(x).
    let psi0_xp = model.psi0(xp);
    let ddenom = move |x: f64| 2.0 * alpha * (2.0 * alpha * x).cos() + 2.0 * alpha;
    for b in [a + alpha, a - alpha] {
        for sigma in [1.0f64, -1.0] {
            for tau in [1.0f64, -1.0] {
                let pref = -psi0_xp * sqrt2a * (-(I * sigma * b * xp)).exp() / (4.0 * PI * b);
                let omega = s * (sigma * b + tau * alpha + k0);
                let env = move |t: f64| pref * t.powf(kappa) / model.denominator(s * t);
                let env_d = move |t: f64| {
                    let d = model.denominator(s * t);
                    pref * (kappa * t.powf(kappa - 1.0) / d
                        - t.powf(kappa) * s * ddenom(s * t) / (d * d))
                };
                pieces.push(TailPiece {
                    omega,
                    env: Box::new(env),
                    env_d: Box::new(env_d),
                });
            }
        }
    }

    // Log-band slot: -S(x,x') band(A-alpha, A+alpha, w) / pi.  The band
    // integral is replaced by its large-argument form
    // sin(b0 w)/(b0 w) - sin(a0 w)/(a0 w); the defect goes to the direct
    // remainder below.  S(x, x') splits into six exponential modes in x.
    let a0 = a - alpha;
    let b0 = a + alpha;
    let psi1_xp = model.psi1(xp);
    // (mode frequency, numerator constant g0, numerator slope g1) with the
    // x-factor g(x) = (g0 + g1 (x - z)) / d(x).
    let modes: [(f64, Complex64, Complex64); 6] = [
        (alpha, psi1_xp * alpha * sqrt2a, Complex64::new(0.0, 0.0)),
        (-alpha, psi1_xp * alpha * sqrt2a, Complex64::new(0.0, 0.0)),
        (
            alpha,
            Complex64::new(0.0, 0.0),
            -I * alpha * psi0_xp / sqrt2a,
        ),
        (
            -alpha,
            Complex64::new(0.0, 0.0),
            I * alpha * psi0_xp / sqrt2a,
        ),
        (3.0 * alpha, -psi0_xp / (2.0 * sqrt2a), Complex64::new(0.0, 0.0)),
        (-3.0 * alpha, -psi0_xp / (2.0 * sqrt2a), Complex64::new(0.0, 0.0)),
    ];
    for (b, band_sign) in [(b0, 1.0f64), (a0, -1.0)] {
        for sigma in [1.0f64, -1.0] {
            for &(mu, g0, g1) in &modes {
                let pref = -band_sign * sigma * (-(I * sigma * b * xp)).exp()
                    / (2.0 * PI * I * b);
                let omega = s * (sigma * b + mu + k0);
                let env = move |t: f64| {
                    let x = s * t;
                    let num = g0 + g1 * (Complex64::new(x, 0.0) - z);
                    pref * t.powf(kappa) * num / (model.denominator(x) * (x - xp))
                };
                let env_d = move |t: f64| {
                    let x = s * t;
                    let xz = Complex64::new(x, 0.0) - z;
                    let num = g0 + g1 * xz;
                    let den = model.denominator(x) * (x - xp);
                    let den_d = s * (ddenom(x) * (x - xp) + model.denominator(x));
                    pref * (kappa * t.powf(kappa - 1.0) * num / den
                        + t.powf(kappa) * (s * g1 * den - num * den_d) / (den * den))
                };
                pieces.push(TailPiece {
                    omega,
                    env: Box::new(env),
                    env_d: Box::new(env_d),
                });
            }
        }
    }

    // Band defect: band(a0, b0, w) minus its large-argument form, times
    // -S(x, x') t^kappa e^{i k0 x} / pi.
    let defect = move |t: f64| {
        let x = s * t;
        let w = x - xp;
        let band = kernels::cosine_band(a0, b0, w).expect("0 < a0 < b0 checked by caller");
        let approx = (b0 * w).sin() / (b0 * w) - (a0 * w).sin() / (a0 * w);
        -kernels::inner_sym(model, x, xp) * (band - approx) * t.powf(kappa)
            * (I * k0 * x).exp()
            / PI
    };
    Ok((pieces, Box::new(defect)))
}

/// Pair a model's band-limited kernel with the slowly growing test function
/// `eta(|x|) |x|^kappa e^{i k0 x}` on one side, splitting the integral into
/// an adaptive core and per-exponential half-line tails.
fn slow_growth_pairing(
    model: &GrowthModel,
    a: f64,
    kappa: f64,
    k0: f64,
    side: SupportSide,
    xp: f64,
    quad_tol: f64,
    window_start: f64,
) -> Result<(Complex64, f64), ProbeError> {
    let s = match side {
        SupportSide::Plus => 1.0,
        SupportSide::Minus => -1.0,
    };
    let t_start = window_start.max(xp.abs() + 2.0).max(8.0);
    let phi = TestFunction::slow_growth(kappa, k0, side);

    // Core: the windowed part of the pairing, kernel times the exact test
    // function (including its switch-on window).
    let (core_lo, core_hi) = if s > 0.0 { (1.0, t_start) } else { (-t_start, -1.0) };
    let model_freq = match model {
        GrowthModel::Edge(_) => a + k0.abs() + 1.0,
        GrowthModel::Inner(m) => a + 4.0 * m.alpha() + k0.abs() + 1.0,
    };
    let cell = ErrCell::new();
    let core = {
        let g = |x: f64| {
            let kv = match model {
                GrowthModel::Edge(m) => {
                    kernels::edge_kernel_closed(m, a, x, xp).map_err(ProbeError::from)
                }
                GrowthModel::Inner(m) => {
                    kernels::inner_kernel_closed(m, a, x, xp).map_err(ProbeError::from)
                }
            };
            cell.capture(kv.map(|kv| kv.total() * phi.eval(x)))
        };
        integrate_window(&g, core_lo, core_hi, model_freq, quad_tol)?
    };
    cell.finish()?;

    let mut value = core.value;
    let mut err = core.abs_error;

    // Tails: beyond the window the test function is exactly t^kappa e^{i k0 x},
    // and the kernel splits into finitely many exponential pieces.
    match model {
        GrowthModel::Edge(m) => {
            let pieces = edge_tail_pieces(m, a, xp, kappa, k0, s)?;
            let tol_piece = quad_tol / (pieces.len() as f64 + 1.0);
            for piece in &pieces {
                let (v, e) =
                    oscillatory_halfline(piece.omega, &piece.env, &piece.env_d, t_start, tol_piece)?;
                value += v;
                err += e;
            }
        }
        GrowthModel::Inner(m) => {
            let (pieces, defect) = inner_tail_pieces(m, a, xp, kappa, k0, s)?;
            let tol_piece = quad_tol / (pieces.len() as f64 + 2.0);
            for piece in &pieces {
                let (v, e) =
                    oscillatory_halfline(piece.omega, &piece.env, &piece.env_d, t_start, tol_piece)?;
                value += v;
                err += e;
            }
            let h = PI / (a + 4.0 * m.alpha() + k0.abs());
            let defect_tail =
                quad::oscillatory_series_tail(|t| defect(t), t_start, h, tol_piece, 4000)?;
            value += defect_tail.value;
            err += defect_tail.abs_error;
        }
    }
    Ok((value, err))
}

/// Pair the band-limited kernels against the one-sided slowly growing test
/// function `eta(|x|) |x|^kappa e^{i k0 x}` and test concentration to its
/// point value at `xp`.
///
/// The truncations must clear the model's internal frequencies
/// (`|k0| + 1` for the edge model, `4 alpha + |k0| + 1` for the inner one)
/// so every tail piece keeps a nonzero frequency.
pub fn slow_growth_probe(
    model: &GrowthModel,
    a_grid: &[f64],
    kappa: f64,
    k0: f64,
    side: SupportSide,
    xp: f64,
    tols: &ProbeTolerances,
    quad_tol: f64,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("truncation grid", a_grid, 3, true)?;
    if !(0.0..1.0).contains(&kappa) {
        return Err(precondition(format!(
            "growth exponent kappa must lie in [0, 1), got {kappa}"
        )));
    }
    let min_a = match model {
        GrowthModel::Edge(_) => k0.abs() + 1.0,
        GrowthModel::Inner(m) => 4.0 * m.alpha() + k0.abs() + 1.0,
    };
    if a_grid[0] <= min_a {
        return Err(precondition(format!(
            "truncation grid must start above {min_a} to clear the kernel frequencies"
        )));
    }

    let phi = TestFunction::slow_growth(kappa, k0, side);
    let mut values = Vec::with_capacity(a_grid.len());
    let mut max_err = 0.0f64;
    for &a in a_grid {
        let (v, e) = slow_growth_pairing(model, a, kappa, k0, side, xp, quad_tol, 8.0)?;
        values.push(v);
        max_err = max_err.max(e);
    }
    let label = match model {
        GrowthModel::Edge(m) => format!(
            "edge band-limited kernel (n = {}) against {}",
            m.order(),
            phi.label
        ),
        GrowthModel::Inner(m) => format!(
            "inner band-limited kernel (alpha = {}) against {}",
            m.alpha(),
            phi.label
        ),
    };
    Ok(analyze_convergence(
        label,
        "truncation",
        a_grid,
        a_grid,
        &values,
        Some(phi.eval(xp)),
        max_err,
        tols,
    ))
}

// --- functionals supported at infinity ------------------------------------

/// Residual functionals that vanish on rapidly decaying test functions but
/// can have nonzero limits on slowly decaying ones.  All three reuse the
/// kernels of the corresponding [`VanishingFamily`] entries, now probed as
/// `eps -> 0` limits in their own right rather than against a zero target.
pub enum InfinityFunctional<'a> {
    /// Kernel of [`VanishingFamily::WeightedSincCube`].
    WeightedSincCube { shift: Complex64 },
    /// Kernel of [`VanishingFamily::WeightedSincDefect`].
    WeightedSincDefect { shift: Complex64 },
    /// `(2 / (pi eps alpha)) sin^2(eps (x-x')/2) psi0(x) psi0(x')`.
    GroundFejer(&'a InnerModel),
}

impl InfinityFunctional<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            InfinityFunctional::WeightedSincCube { .. } => "weighted sinc-cube functional",
            InfinityFunctional::WeightedSincDefect { .. } => "weighted sinc-defect functional",
            InfinityFunctional::GroundFejer(_) => "ground-state Fejer functional",
        }
    }
}

/// Evaluation controls for the infinity functionals.
#[derive(Clone, Debug)]
pub struct InfinityOptions {
    pub quad_tol: f64,
    /// Core window half-width: in outward-substituted units `t = eps (x - x')`
    /// for the weighted functionals, in position units for the ground-state
    /// one.
    pub core_halfwidth: f64,
    /// For the ground-state functional only: treat the test function as
    /// `cos(freq x)/x` beyond the core and evaluate the resonant tails by
    /// mode decomposition.  Without this the pairing is evaluated directly
    /// and slowly decaying test functions fail their truncation check.
    pub witness_freq: Option<f64>,
    pub max_tail_cells: usize,
}

impl Default for InfinityOptions {
    fn default() -> Self {
        InfinityOptions {
            quad_tol: 1e-10,
            core_halfwidth: 40.0,
            witness_freq: None,
            max_tail_cells: 4000,
        }
    }
}

/// Core window in the outward coordinate `t = eps (x - x')`: the image of a
/// compact support when there is one, otherwise `[-w, w]`.
fn outward_core(phi: &TestFunction, xp: f64, eps: f64, w: f64) -> (f64, f64) {
    match phi.support {
        Some((a, b)) => (eps * (a - xp), eps * (b - xp)),
        None => (-w, w),
    }
}

/// `int (x-x') sin^2(eps w/4) sin(eps w/2) / (eps^2 (x-z)^2 (x'-z)^2) phi dx`
/// in the outward coordinate, where the integrand becomes
/// `t sin^2(t/4) sin(t/2) phi(x' + t/eps) / (eps^2 (t + eps s)^2 (x'-z)^2)`
/// with `s = x' - z`.  The slowly decaying tails are summed per half-period
/// after splitting `sin^2(t/4) sin(t/2) = sin(t/2)/2 - sin(t)/4`.
fn weighted_sinc_cube_value(
    shift: Complex64,
    phi: &TestFunction,
    xp: f64,
    eps: f64,
    opts: &InfinityOptions,
) -> Result<(Complex64, f64), ProbeError> {
    let s = Complex64::new(xp, 0.0) - shift;
    let z2 = s * s;
    let h_env = move |t: f64, phi_v: Complex64| {
        let dt = t + eps * s;
        t * phi_v / (eps * eps * dt * dt * z2)
    };
    let (lo, hi) = outward_core(phi, xp, eps, opts.core_halfwidth);
    let core = {
        let g = |t: f64| {
            let s4 = (0.25 * t).sin();
            let s2 = (0.5 * t).sin();
            h_env(t, phi.eval(xp + t / eps)) * s4 * s4 * s2
        };
        integrate_window(&g, lo, hi, 1.5, opts.quad_tol)?
    };
    let mut value = core.value;
    let mut err = core.abs_error;
    if phi.support.is_none() {
        for sig in [1.0f64, -1.0] {
            for (amp, freq, cell) in [(0.5, 0.5f64, 2.0 * PI), (-0.25, 1.0, PI)] {
                let g = move |u: f64| {
                    let t = sig * u;
                    amp * (freq * t).sin() * h_env(t, phi.eval(xp + t / eps))
                };
                let out = quad::oscillatory_series_tail(
                    g,
                    opts.core_halfwidth,
                    cell,
                    opts.quad_tol,
                    opts.max_tail_cells,
                )?;
                value += out.value;
                err += out.abs_error;
            }
        }
    }
    Ok((value, err))
}

/// `int (eps w - 2 sin(eps w/2))^2 / (eps^3 (x-z)^2 (x'-z)^2) phi dx` in the
/// outward coordinate.  The square expands into `(t^2 + 2)`, `-4 t sin(t/2)`
/// and `-2 cos t`; the first tail component is monotone and handled by the
/// inversion `t -> 1/t`, the others per half-period.
fn weighted_sinc_defect_value(
    shift: Complex64,
    phi: &TestFunction,
    xp: f64,
    eps: f64,
    opts: &InfinityOptions,
) -> Result<(Complex64, f64), ProbeError> {
    let s = Complex64::new(xp, 0.0) - shift;
    let z2 = s * s;
    let h_env = move |t: f64, phi_v: Complex64| {
        let dt = t + eps * s;
        phi_v / (eps * eps * dt * dt * z2)
    };
    let (lo, hi) = outward_core(phi, xp, eps, opts.core_halfwidth);
    let core = {
        let g = |t: f64| {
            let d = sinc_defect(t);
            d * d * h_env(t, phi.eval(xp + t / eps))
        };
        integrate_window(&g, lo, hi, 1.5, opts.quad_tol)?
    };
    let mut value = core.value;
    let mut err = core.abs_error;
    if phi.support.is_none() {
        let w = opts.core_halfwidth;
        for sig in [1.0f64, -1.0] {
            // Monotone component (t^2 + 2) H(t), inverted onto [0, 1/w].
            let gv = move |v: f64| {
                let t = sig / v;
                (1.0 + 2.0 * v * v) / v.powi(4) * h_env(t, phi.eval(xp + t / eps))
            };
            let v_min = 1e-5;
            let cfg = QuadConfig::with_tol(opts.quad_tol);
            let out = quad::adaptive(gv, v_min, 1.0 / w, &cfg)?;
            value += out.value;
            err += out.abs_error + 2.0 * v_min * gv(v_min).norm();
            // Oscillatory components.
            for (amp, freq, cell) in [(-4.0, 0.5f64, 2.0 * PI), (-2.0, 1.0, PI)] {
                let g = move |u: f64| {
                    let t = sig * u;
                    let osc = if freq == 1.0 { t.cos() } else { t * (0.5 * t).sin() };
                    amp * osc * h_env(t, phi.eval(xp + t / eps))
                };
                let out =
                    quad::oscillatory_series_tail(g, w, cell, opts.quad_tol, opts.max_tail_cells)?;
                value += out.value;
                err += out.abs_error;
            }
        }
    }
    Ok((value, err))
}

/// One cosine mode of the resonant ground-state tail:
/// `amp cos(omega y + phase) / (y (y - zt)^env_pow)`.
#[derive(Clone, Copy, Debug)]
struct TailMode {
    amp: f64,
    omega: f64,
    phase: f64,
    env_pow: u8,
}

fn push_mode(modes: &mut Vec<TailMode>, amp: f64, omega: f64, phase: f64, env_pow: u8) {
    if omega < 0.0 {
        modes.push(TailMode {
            amp,
            omega: -omega,
            phase: -phase,
            env_pow,
        });
    } else {
        modes.push(TailMode {
            amp,
            omega,
            phase,
            env_pow,
        });
    }
}

/// Mode list of the one-sided resonant tail integrand
/// `smear(y) sqrt(2a) cos(a y) cos(f y) / (y (y - zt))` plus its first
/// denominator correction, where `smear = (1 - cos(eps y - phi0))/2`.
fn fejer_witness_modes(alpha: f64, freq: f64, eps: f64, phi0: f64) -> Vec<TailMode> {
    let sq = (2.0 * alpha).sqrt();
    let mut modes = Vec::with_capacity(18);
    // Main part over 1/(y (y - zt)).
    for w0 in [alpha - freq, alpha + freq] {
        push_mode(&mut modes, sq / 4.0, w0, 0.0, 1);
        push_mode(&mut modes, -sq / 8.0, w0 + eps, -phi0, 1);
        push_mode(&mut modes, -sq / 8.0, w0 - eps, phi0, 1);
    }
    // First denominator correction over 1/(y (y - zt)^2).
    for wi in [
        3.0 * alpha + freq,
        3.0 * alpha - freq,
        alpha + freq,
        alpha - freq,
    ] {
        push_mode(&mut modes, -sq / (16.0 * alpha), wi, -PI / 2.0, 2);
        push_mode(&mut modes, sq / (32.0 * alpha), wi + eps, -phi0 - PI / 2.0, 2);
        push_mode(&mut modes, sq / (32.0 * alpha), wi - eps, phi0 - PI / 2.0, 2);
    }
    modes
}

fn mode_env(env_pow: u8, y: f64, zt: Complex64) -> Complex64 {
    let yz = Complex64::new(y, 0.0) - zt;
    if env_pow == 1 {
        1.0 / (yz * y)
    } else {
        1.0 / (yz * yz * y)
    }
}

/// `int_x0^infty dy / (y (y - zt))`.
fn env1_tail(x0: f64, zt: Complex64) -> Complex64 {
    -(Complex64::new(1.0, 0.0) - zt / x0).ln() / zt
}

/// `int_x0^infty dy / (y (y - zt)^2)`.
fn env2_tail(x0: f64, zt: Complex64) -> Complex64 {
    let x0c = Complex64::new(x0, 0.0);
    -(x0c / (x0c - zt)).ln() / (zt * zt) + 1.0 / (zt * (x0c - zt))
}

/// Integrate one [`TailMode`] over `[x0, infinity)`.  Zero-frequency modes
/// integrate in closed form; the rest are summed in half-period cells.
fn tail_mode_value(
    mode: &TailMode,
    x0: f64,
    zt: Complex64,
    tol: f64,
    max_cells: usize,
) -> Result<(Complex64, f64), ProbeError> {
    if mode.omega < 1e-9 {
        let ir = if mode.env_pow == 1 {
            env1_tail(x0, zt)
        } else {
            env2_tail(x0, zt)
        };
        let v = mode.amp * mode.phase.cos() * ir;
        return Ok((v, 1e-14 * v.norm() + 1e-16));
    }
    let h_raw = PI / mode.omega;
    let parts = (h_raw / 45.0).ceil().max(1.0);
    let h = h_raw / parts;
    let m = *mode;
    let f = move |y: f64| m.amp * (m.omega * y + m.phase).cos() * mode_env(m.env_pow, y, zt);
    let out = quad::oscillatory_series_tail(f, x0, h, tol, max_cells)?;
    Ok((out.value, out.abs_error))
}

/// Exact remainder of the one-sided resonant tail after the mode
/// decomposition: the doubly corrected denominator term, decaying like
/// `y^{-4}`.
fn fejer_witness_remainder(
    alpha: f64,
    freq: f64,
    eps: f64,
    phi0: f64,
    zt: Complex64,
) -> impl Fn(f64) -> Complex64 {
    let sq = (2.0 * alpha).sqrt();
    move |y: f64| {
        let yc = Complex64::new(y, 0.0);
        let d = (2.0 * alpha * y).sin() + 2.0 * alpha * (yc - zt);
        let s2 = (2.0 * alpha * y).sin();
        let smear = 0.5 * (1.0 - (eps * y - phi0).cos());
        smear * sq * (alpha * y).cos() * s2 * s2 * (freq * y).cos()
            / (2.0 * alpha * y * (yc - zt) * (yc - zt) * d)
    }
}

/// One-sided resonant tail integrand of the ground-state functional (before
/// the overall `2 psi0(x') / (pi eps alpha)` factor), in the outward
/// coordinate `y = |x|`; equals the full integrand at `x = sigma y`.  Kept
/// as the reference the mode decomposition is tested against.
#[cfg(test)]
fn fejer_witness_tail_integrand<'a>(
    model: &'a InnerModel,
    phi: &'a TestFunction,
    xp: f64,
    eps: f64,
    sigma: f64,
) -> impl Fn(f64) -> Complex64 + 'a {
    move |y: f64| {
        let x = sigma * y;
        let sh = (0.5 * eps * (x - xp)).sin();
        sh * sh * model.psi0(x) * phi.eval(x)
    }
}

/// Ground-state functional value by resonant mode decomposition: adaptive
/// core on `[-x0, x0]`, then per-side cosine modes with analytic
/// zero-frequency parts and an exact `y^{-4}` remainder.
fn ground_fejer_witness_value(
    model: &InnerModel,
    phi: &TestFunction,
    xp: f64,
    eps: f64,
    freq: f64,
    opts: &InfinityOptions,
) -> Result<(Complex64, f64), ProbeError> {
    let alpha = model.alpha();
    let z = model.shift();
    let x0 = opts.core_halfwidth.max(xp.abs() + 10.0);
    for &xx in &[x0 + 1.3, -(x0 + 2.6), x0 + 13.7, -(x0 + 11.9)] {
        let expect = (freq * xx).cos() / xx;
        if (phi.eval(xx) - expect).norm() > 1e-10 {
            return Err(precondition(format!(
                "resonant tail evaluation requires phi(x) = cos({freq} x)/x beyond |x| = {x0:.1}; \
                 mismatch at x = {xx:.1} for {}",
                phi.label
            )));
        }
    }

    let scale = 2.0 / (PI * eps * alpha) * model.psi0(xp);
    let core = {
        let g = |x: f64| {
            let sh = (0.5 * eps * (x - xp)).sin();
            sh * sh * model.psi0(x) * phi.eval(x)
        };
        integrate_window(&g, -x0, x0, alpha + freq + 1.0, opts.quad_tol)?
    };
    let mut j = core.value;
    let mut err = core.abs_error;
    for sigma in [1.0f64, -1.0] {
        let zt = if sigma > 0.0 { z } else { -z };
        let phi0 = sigma * eps * xp;
        for mode in fejer_witness_modes(alpha, freq, eps, phi0) {
            let (v, e) = tail_mode_value(&mode, x0, zt, opts.quad_tol, opts.max_tail_cells)?;
            j += v;
            err += e;
        }
        let remainder = fejer_witness_remainder(alpha, freq, eps, phi0, zt);
        let h = PI / (4.0 * alpha + freq + eps);
        let out = quad::oscillatory_series_tail(remainder, x0, h, opts.quad_tol, opts.max_tail_cells)?;
        j += out.value;
        err += out.abs_error;
    }
    Ok((scale * j, scale.norm() * err))
}

/// Ground-state functional value by direct pairing (rapidly decaying or
/// compactly supported test functions).
fn ground_fejer_direct_value(
    model: &InnerModel,
    phi: &TestFunction,
    xp: f64,
    eps: f64,
    opts: &InfinityOptions,
) -> Result<(Complex64, f64), ProbeError> {
    let alpha = model.alpha();
    let pref = 2.0 / (PI * eps * alpha) * model.psi0(xp);
    let kernel = move |x: f64| {
        let sh = (0.5 * eps * (x - xp)).sin();
        Ok(pref * sh * sh * model.psi0(x))
    };
    let out = pair_with_retry(
        &kernel,
        phi,
        xp,
        phi.pairing_radius(xp).max(opts.core_halfwidth),
        Some(2.0 * alpha + eps),
        opts.quad_tol,
        1e-5,
    )?;
    Ok((out.value, out.quad_error + out.tail_bound))
}

fn infinity_value(
    which: &InfinityFunctional,
    phi: &TestFunction,
    xp: f64,
    eps: f64,
    opts: &InfinityOptions,
) -> Result<(Complex64, f64), ProbeError> {
    match which {
        InfinityFunctional::WeightedSincCube { shift } => {
            weighted_sinc_cube_value(*shift, phi, xp, eps, opts)
        }
        InfinityFunctional::WeightedSincDefect { shift } => {
            weighted_sinc_defect_value(*shift, phi, xp, eps, opts)
        }
        InfinityFunctional::GroundFejer(m) => match opts.witness_freq {
            Some(freq) => ground_fejer_witness_value(m, phi, xp, eps, freq, opts),
            None => ground_fejer_direct_value(m, phi, xp, eps, opts),
        },
    }
}

/// Sweep an [`InfinityFunctional`] over a decreasing shrinking grid.  There
/// is no prescribed target: the probe reports whether the values vanish,
/// stabilize on a nontrivial limit, or diverge.
pub fn infinity_functional_probe(
    which: &InfinityFunctional,
    phi: &TestFunction,
    xp: f64,
    eps_grid: &[f64],
    tols: &ProbeTolerances,
    opts: &InfinityOptions,
) -> Result<ConvergenceReport, ProbeError> {
    require_grid("shrinking grid", eps_grid, 5, false)?;
    if eps_grid.iter().any(|&e| e <= 0.0) {
        return Err(precondition("shrinking parameters must be positive".to_string()));
    }
    let resolutions: Vec<f64> = eps_grid.iter().map(|e| 1.0 / e).collect();
    let mut values = Vec::with_capacity(eps_grid.len());
    let mut max_err = 0.0f64;
    for &eps in eps_grid {
        let (v, e) = infinity_value(which, phi, xp, eps, opts)?;
        values.push(v);
        max_err = max_err.max(e);
    }
    Ok(analyze_convergence(
        format!("{} against {}", which.label(), phi.label),
        "eps",
        eps_grid,
        &resolutions,
        &values,
        None,
        max_err,
        tols,
    ))
}

/// Near/far decomposition of an infinity-functional probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalityReport {
    pub full: ConvergenceReport,
    /// Per cutoff radius: the probe on the far part of the test function.
    pub far: Vec<(f64, ConvergenceReport)>,
    /// Per cutoff radius: the probe on the near (compact) part.
    pub near: Vec<(f64, ConvergenceReport)>,
    /// Largest deviation of a far-part limit from the full limit, relative
    /// to that limit.
    pub max_far_relative_deviation: f64,
    /// Whether every near-part probe came back vanishing.
    pub near_all_vanishing: bool,
}

/// Split the test function at each cutoff radius and verify the functional
/// ignores the compact near part while the far part carries the full limit.
pub fn locality_at_infinity_check(
    which: &InfinityFunctional,
    phi: &TestFunction,
    xp: f64,
    r_list: &[f64],
    eps_grid: &[f64],
    tols: &ProbeTolerances,
    opts: &InfinityOptions,
) -> Result<LocalityReport, ProbeError> {
    if r_list.is_empty() {
        return Err(precondition("need at least one cutoff radius".to_string()));
    }
    let full = infinity_functional_probe(which, phi, xp, eps_grid, tols, opts)?;
    let denom = full.extrapolated.norm().max(tols.last_residual);
    let mut far = Vec::with_capacity(r_list.len());
    let mut near = Vec::with_capacity(r_list.len());
    let mut max_dev = 0.0f64;
    let mut near_all_vanishing = true;
    for &r in r_list {
        let (near_phi, far_phi) = testspace::cutoff_split(phi, r);
        let far_opts = if matches!(which, InfinityFunctional::GroundFejer(_)) {
            InfinityOptions {
                core_halfwidth: opts.core_halfwidth.max(r + 5.0),
                ..opts.clone()
            }
        } else {
            opts.clone()
        };
        let near_opts = InfinityOptions {
            witness_freq: None,
            ..opts.clone()
        };
        let far_rep = infinity_functional_probe(which, &far_phi, xp, eps_grid, tols, &far_opts)?;
        let near_rep = infinity_functional_probe(which, &near_phi, xp, eps_grid, tols, &near_opts)?;
        max_dev = max_dev.max((far_rep.extrapolated - full.extrapolated).norm() / denom);
        near_all_vanishing &= near_rep.verdict == Verdict::Vanishing;
        far.push((r, far_rep));
        near.push((r, near_rep));
    }
    Ok(LocalityReport {
        full,
        far,
        near,
        max_far_relative_deviation: max_dev,
        near_all_vanishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::{edge_default_radius, DeformationSpec};
    use approx::assert_abs_diff_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn edge(n: usize) -> EdgeModel {
        EdgeModel::new(n, c64(0.0, 1.0)).unwrap()
    }

    fn inner() -> InnerModel {
        InnerModel::new(1.0, c64(0.0, 1.0)).unwrap()
    }

    fn tols() -> ProbeTolerances {
        ProbeTolerances::default()
    }

    // --- convergence analysis on synthetic sweeps --------------------------

    #[test]
    fn richardson_recovers_an_algebraic_limit() {
        let params = [25.0, 50.0, 100.0, 200.0];
        let target = c64(2.0, -1.0);
        let c = c64(3.0, 0.5);
        let values: Vec<Complex64> = params.iter().map(|a| target + c / (a * a)).collect();
        let rep = analyze_convergence(
            "synthetic quadratic decay",
            "truncation",
            &params,
            &params,
            &values,
            Some(target),
            0.0,
            &tols(),
        );
        assert_eq!(rep.verdict, Verdict::Converged);
        // The residual is exactly algebraic, so the fitted rate is exact and
        // Richardson cancels the leading error term completely.
        assert_abs_diff_eq!(rep.fitted_rate.unwrap(), -2.0, epsilon = 1e-10);
        assert!((rep.extrapolated - target).norm() < 1e-12);
    }

    #[test]
    fn aitken_extrapolates_without_a_target() {
        let params = [10.0, 20.0, 40.0, 80.0];
        let limit = c64(2.0, 1.0);
        let c = c64(0.3, -0.2);
        let values: Vec<Complex64> = params.iter().map(|a| limit + c / a).collect();
        let rep = analyze_convergence(
            "synthetic geometric differences",
            "truncation",
            &params,
            &params,
            &values,
            None,
            0.0,
            &tols(),
        );
        // Successive differences shrink by exactly 1/2, so Aitken's
        // delta-squared resums the remaining geometric series exactly.
        assert_eq!(rep.verdict, Verdict::NontrivialLimit);
        assert!((rep.extrapolated - limit).norm() < 1e-12);
    }

    #[test]
    fn growing_residuals_are_flagged_as_divergent() {
        let params = [10.0, 100.0, 1000.0];
        let values: Vec<Complex64> = params.iter().map(|a| c64(a * a, 0.0)).collect();
        let rep = analyze_convergence(
            "synthetic growth",
            "parameter",
            &params,
            &params,
            &values,
            None,
            0.0,
            &tols(),
        );
        assert_eq!(rep.verdict, Verdict::Diverging);
    }

    #[test]
    fn a_decaying_sequence_with_zero_target_vanishes() {
        let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let res: Vec<f64> = eps.iter().map(|e| 1.0 / e).collect();
        let values: Vec<Complex64> = eps.iter().map(|e| c64(0.1 * e, 0.0)).collect();
        let rep = analyze_convergence(
            "synthetic linear decay",
            "eps",
            &eps,
            &res,
            &values,
            Some(c64(0.0, 0.0)),
            0.0,
            &tols(),
        );
        assert_eq!(rep.verdict, Verdict::Vanishing);
        assert!(rep.extrapolated.norm() < 1e-12);
    }

    #[test]
    fn reports_roundtrip_through_json_and_csv() {
        let params = [25.0, 50.0, 100.0, 200.0];
        let values: Vec<Complex64> = params.iter().map(|a| c64(1.0 + 1.0 / a, 0.3)).collect();
        let rep = analyze_convergence(
            "roundtrip",
            "truncation",
            &params,
            &params,
            &values,
            Some(c64(1.0, 0.3)),
            1e-12,
            &tols(),
        );
        let back: ConvergenceReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + params.len());
        assert_eq!(lines[0], "parameter,re,im,residual");
    }

    // --- truncated pairings ------------------------------------------------

    #[test]
    fn pairing_matches_the_gaussian_convolution_oracle() {
        // int e^{-(x-m)^2/(2 s^2)} / (s sqrt(2 pi)) e^{-((x-c)/w)^2} dx
        //   = w / sqrt(w^2 + 2 s^2) exp(-(m-c)^2 / (w^2 + 2 s^2)).
        let s = 0.7;
        let norm = 1.0 / (s * (2.0 * PI).sqrt());
        let phi = TestFunction::gaussian(-0.2, 1.3);
        let out = pair(
            move |x: f64| {
                let d = x - 0.4;
                Ok(c64(norm * (-d * d / (2.0 * s * s)).exp(), 0.0))
            },
            &phi,
            0.4,
            PairDomain::Truncated { radius: 60.0 },
            None,
            1e-11,
            1e-8,
        )
        .unwrap();
        assert_abs_diff_eq!(out.value.re, 0.6952342551680932, epsilon = 1e-9);
        assert_abs_diff_eq!(out.value.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pairing_is_linear_in_the_test_function() {
        let m = edge(1);
        let a = 30.0;
        let f1 = TestFunction::gaussian(0.0, 1.0);
        let f2 = TestFunction::gaussian(1.0, 0.5);
        let (c1, c2) = (c64(2.0, 1.0), c64(-0.5, 0.0));
        let combo = TestFunction::linear_combination(
            vec![(c1, f1.clone()), (c2, f2.clone())],
            "gaussian combination",
        );
        let run = |phi: &TestFunction| {
            pair(
                |x| Ok(kernels::edge_kernel_closed(&m, a, x, 0.2)?.total()),
                phi,
                0.2,
                PairDomain::Truncated { radius: 62.0 },
                Some(a),
                1e-11,
                1e-5,
            )
            .unwrap()
            .value
        };
        let lhs = run(&combo);
        let rhs = c1 * run(&f1) + c2 * run(&f2);
        assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn slow_kernel_decay_triggers_a_truncation_error() {
        let z = c64(0.0, 1.0);
        let phi = TestFunction::constant();
        let out = pair(
            |x| {
                let d = Complex64::new(x, 0.0) - z;
                Ok(1.0 / (d * d))
            },
            &phi,
            0.0,
            PairDomain::Truncated { radius: 20.0 },
            None,
            1e-9,
            1e-6,
        );
        match out {
            Err(ProbeError::Truncation {
                tail,
                budget,
                suggested,
                ..
            }) => {
                assert!(tail > budget);
                // An x^{-2} envelope with a 10^5 budget deficit needs a much
                // larger window (the suggestion saturates at its cap).
                assert!(suggested > 1.0e3, "suggested = {suggested}");
            }
            other => panic!("expected a truncation error, got {other:?}"),
        }
    }

    #[test]
    fn oscillatory_tail_summation_matches_the_residue_oracle() {
        // int e^{3ix} / (x - z)^2 dx over the real line closes upward onto
        // the double pole: -6 pi e^{3iz}.
        let z = c64(0.4, 0.9);
        let phi = TestFunction::constant();
        let out = pair(
            |x| {
                let d = Complex64::new(x, 0.0) - z;
                Ok((I * 3.0 * x).exp() / (d * d))
            },
            &phi,
            0.0,
            PairDomain::OscillatoryTail {
                radius: 25.0,
                cell: PI / 3.0,
            },
            Some(3.0),
            1e-10,
            1e-6,
        )
        .unwrap();
        let oracle = c64(-0.45903265481553187, -1.1807015876927209);
        assert!((out.value - oracle).norm() < 1e-8, "{} vs {oracle}", out.value);
    }

    // --- approximate-identity probes ---------------------------------------

    #[test]
    fn edge_identity_residuals_follow_the_band_limited_ladder() {
        // Against a gaussian of width w the band-limited residual is exactly
        // the tail mass of its transform, erfc(A w / 2); the first three
        // sweep points must reproduce frozen extended-precision values and
        // the fourth is below working precision.
        let m = edge(0);
        let phi = TestFunction::gaussian(0.3, 0.05);
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = delta_probe(
            &DeltaFamily::EdgeBandLimited(&m),
            &phi,
            0.3,
            &grid,
            &tols(),
            1e-10,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Converged, "{:?}", rep.residuals);
        let ladder = [0.37675911781158203, 0.07709987174354177, 4.0695201744495894e-4];
        for (res, want) in rep.residuals.iter().zip(ladder) {
            assert_abs_diff_eq!(*res, want, epsilon = 1e-7);
        }
        assert!(rep.residuals[3] < 5e-9, "residuals = {:?}", rep.residuals);
    }

    #[test]
    fn identity_rate_fit_tracks_the_kernel_width_scaling() {
        // A narrower gaussian keeps the whole sweep in the slow erfc regime,
        // whose ladder is not algebraic: Richardson cannot cancel it, so the
        // honest verdict is inconclusive while the fitted rate still pins
        // the observed scaling.
        let m = edge(0);
        let phi = TestFunction::gaussian(0.3, 0.01);
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = delta_probe(
            &DeltaFamily::EdgeBandLimited(&m),
            &phi,
            0.3,
            &grid,
            &tols(),
            1e-10,
        )
        .unwrap();
        let ladder = [
            0.8596837951986662,
            0.7236736098317631,
            0.4795001221869535,
            0.15729920705028513,
        ];
        for (res, want) in rep.residuals.iter().zip(ladder) {
            assert_abs_diff_eq!(*res, want, epsilon = 1e-6);
        }
        let rate = rep.fitted_rate.unwrap();
        assert!((-1.3..=-0.7).contains(&rate), "rate = {rate}");
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn inner_identity_concentrates_to_the_point_value() {
        let m = inner();
        let phi = TestFunction::gaussian(0.3, 0.05);
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = delta_probe(
            &DeltaFamily::InnerBandLimited(&m),
            &phi,
            0.3,
            &grid,
            &tols(),
            1e-10,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Converged, "{:?}", rep.residuals);
        assert!(rep.residuals[3] < 1e-6, "residuals = {:?}", rep.residuals);
    }

    #[test]
    fn prefactored_sinc_concentrates_on_a_bump() {
        let phi = TestFunction::bump(0.5, 2.0);
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = delta_probe(
            &DeltaFamily::PrefactoredSinc {
                order: 1,
                shift: c64(0.0, 1.0),
            },
            &phi,
            0.5,
            &grid,
            &tols(),
            1e-10,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Converged, "{:?}", rep.residuals);
        assert!(
            (rep.extrapolated - c64(1.0, 0.0)).norm() < 1e-5,
            "extrapolated = {}",
            rep.extrapolated
        );
    }

    #[test]
    fn weighted_wavenumber_identity_hits_the_weighted_point_value() {
        let m = edge(1);
        let phi = TestFunction::gaussian(0.7, 0.1);
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = delta_probe(
            &DeltaFamily::WeightedWavenumberSinc {
                model: &m,
                weight: 2,
            },
            &phi,
            0.7,
            &grid,
            &tols(),
            1e-10,
        )
        .unwrap();
        // k'^{2n} phi(k') / (1+k'^2)^weight at k' = 0.7.
        let expected = 0.49 / (1.49 * 1.49);
        assert_abs_diff_eq!(rep.target.unwrap().re, expected, epsilon = 1e-12);
        assert_eq!(rep.verdict, Verdict::Converged, "{:?}", rep.residuals);
        assert!(
            (rep.extrapolated.re - expected).abs() < 1e-6 && rep.extrapolated.im.abs() < 1e-6,
            "extrapolated = {}",
            rep.extrapolated
        );
    }

    #[test]
    fn identity_probe_rejects_malformed_grids() {
        let m = edge(1);
        let mi = inner();
        let phi = TestFunction::gaussian(0.0, 1.0);
        let family = DeltaFamily::EdgeBandLimited(&m);
        let short = delta_probe(&family, &phi, 0.0, &[10.0, 20.0, 40.0], &tols(), 1e-9);
        assert!(matches!(short, Err(ProbeError::Precondition(_))));
        let unordered = delta_probe(&family, &phi, 0.0, &[50.0, 25.0, 100.0, 200.0], &tols(), 1e-9);
        assert!(matches!(unordered, Err(ProbeError::Precondition(_))));
        let below_band = delta_probe(
            &DeltaFamily::InnerBandLimited(&mi),
            &phi,
            0.0,
            &[0.5, 1.5, 2.5, 3.5],
            &tols(),
            1e-9,
        );
        assert!(matches!(below_band, Err(ProbeError::Precondition(_))));
    }

    #[test]
    fn identity_pairing_is_independent_of_the_contour_route() {
        let m = edge(1);
        let phi = TestFunction::bump(0.4, 1.0);
        let a = 12.0;
        let domain = PairDomain::Truncated { radius: 30.0 };
        let closed = pair(
            |x| Ok(kernels::edge_kernel_closed(&m, a, x, 0.4)?.total()),
            &phi,
            0.4,
            domain,
            Some(a),
            1e-9,
            1e-5,
        )
        .unwrap();
        let spec = DeformationSpec::up(edge_default_radius(a));
        let direct = pair(
            |x| Ok(kernels::edge_kernel_direct(&m, a, spec, x, 0.4, 1e-10)?),
            &phi,
            0.4,
            domain,
            Some(a),
            1e-9,
            1e-5,
        )
        .unwrap();
        assert!(
            (closed.value - direct.value).norm() < 1e-7,
            "{} vs {}",
            closed.value,
            direct.value
        );
    }

    // --- vanishing families -------------------------------------------------

    #[test]
    fn vanishing_families_decay_on_a_rapidly_decaying_test_function() {
        let m = inner();
        let z = c64(0.0, 1.0);
        let phi = TestFunction::gaussian(0.3, 0.4);
        // Several of these families decay only linearly in eps, so the raw
        // last residual cannot be tiny on this grid; loosen that threshold
        // while keeping the extrapolated value pinned to zero at the default
        // tolerance.
        let tols = ProbeTolerances {
            last_residual: 5e-2,
            ..ProbeTolerances::default()
        };
        let cases: Vec<(VanishingFamily, f64)> = vec![
            (VanishingFamily::PlainSinc, 0.0),
            (VanishingFamily::WeightedFejer { shift: z }, 2.0),
            (VanishingFamily::WeightedSincCube { shift: z }, 4.0),
            (VanishingFamily::WeightedSincDefect { shift: z }, 4.0),
            (VanishingFamily::GroundCosineBand(&m), 0.0),
            (VanishingFamily::SymmetrizedBand(&m), 0.0),
            (VanishingFamily::GroundFejer(&m), 2.0),
        ];
        for (family, gamma) in &cases {
            let rep = vanishing_probe(family, &phi, *gamma, 0.3, &DEFAULT_EPS_GRID, &tols, 1e-10)
                .unwrap_or_else(|e| panic!("{}: {e}", family.label()));
            assert_eq!(
                rep.verdict,
                Verdict::Vanishing,
                "{}: residuals {:?}",
                family.label(),
                rep.residuals
            );
        }
    }

    #[test]
    fn vanishing_probe_rejects_an_insufficient_exponent() {
        let out = vanishing_probe(
            &VanishingFamily::WeightedFejer {
                shift: c64(0.0, 1.0),
            },
            &TestFunction::gaussian(0.0, 1.0),
            0.5,
            0.0,
            &DEFAULT_EPS_GRID,
            &tols(),
            1e-9,
        );
        match out {
            Err(ProbeError::Precondition(msg)) => {
                assert!(msg.contains("gamma_required"), "{msg}")
            }
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn vanishing_probe_rejects_a_nonmember_test_function() {
        let out = vanishing_probe(
            &VanishingFamily::WeightedSincCube {
                shift: c64(0.0, 1.0),
            },
            &TestFunction::inverse_square(c64(0.0, 1.0)),
            3.5,
            0.0,
            &DEFAULT_EPS_GRID,
            &tols(),
            1e-9,
        );
        match out {
            Err(ProbeError::Precondition(msg)) => {
                assert!(msg.contains("membership"), "{msg}")
            }
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn class_membership_thresholds_are_bracketed() {
        // |x-i|^{-2} decay lies in the weighted class exactly for gamma < 3.
        let inv = TestFunction::inverse_square(c64(0.0, 1.0));
        let member = testspace::membership_check(&inv, 2.5).unwrap();
        assert_eq!(member.verdict, Membership::Member, "{:?}", member.norms);
        let nonmember = testspace::membership_check(&inv, 3.5).unwrap();
        assert_eq!(nonmember.verdict, Membership::NonMember, "{:?}", nonmember.norms);
        // cos(x)/x decay lies in it exactly for gamma < 1.
        let osc = TestFunction::odd_cosine_decay(1.0);
        let member = testspace::membership_check(&osc, 0.5).unwrap();
        assert_eq!(member.verdict, Membership::Member, "{:?}", member.norms);
        let nonmember = testspace::membership_check(&osc, 1.5).unwrap();
        assert_eq!(nonmember.verdict, Membership::NonMember, "{:?}", nonmember.norms);
    }

    #[test]
    fn inner_band_remainder_washes_out_at_large_bandwidth() {
        let m = inner();
        let phi = TestFunction::gaussian(0.3, 0.5);
        let rep = band_term_weak_limit(
            &m,
            &phi,
            0.25,
            &[25.0, 50.0, 100.0, 200.0],
            &tols(),
            1e-9,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Vanishing, "residuals {:?}", rep.residuals);
        assert!(rep.values.last().unwrap().norm() < 1e-4);
        let bad = band_term_weak_limit(&m, &phi, 0.0, &[0.5, 2.0, 4.0, 8.0], &tols(), 1e-9);
        assert!(matches!(bad, Err(ProbeError::Precondition(_))));
    }

    #[test]
    fn band_remainder_pairing_obeys_the_bandwidth_envelope() {
        // |pairing(A)| <= sqrt(2) A D ||phi|| / (A - alpha)^{3/2} with
        // D = 2 C sup|psi0| sup|psi1|, C the band envelope constant.
        let m = inner();
        let phi = TestFunction::gaussian(0.3, 0.5);
        let grid = [2.0, 4.0, 8.0, 16.0];
        let rep = band_term_weak_limit(&m, &phi, 0.25, &grid, &tols(), 1e-9).unwrap();
        let d = 2.0 * kernels::band_envelope_constant() * m.psi0_sup() * m.psi1_sup();
        let norm = testspace::weighted_l2_norm(&phi, 0.0, 60.0).unwrap();
        for (a, v) in grid.iter().zip(&rep.values) {
            let gap = a - m.alpha();
            let ceiling = std::f64::consts::SQRT_2 * a * d * norm / gap.powf(1.5);
            assert!(
                v.norm() <= ceiling,
                "A = {a}: |pairing| = {} exceeds ceiling {ceiling}",
                v.norm()
            );
        }
    }

    // --- weak boundary limits ----------------------------------------------

    #[test]
    fn boundary_terms_vanish_as_the_parameter_grows() {
        let me = edge(1);
        let mi = inner();
        let z = c64(0.0, 1.0);
        let phik = TestFunction::inverse_square(z);
        let phig = TestFunction::gaussian(0.0, 1.0);
        let grid = [10.0, 60.0, 360.0];
        let cases: Vec<(BoundaryFamily, &TestFunction, f64)> = vec![
            (
                BoundaryFamily::WeightedPlaneWave {
                    power: 0,
                    weight: 1,
                    inverse_power: 1,
                    shift: z,
                    dual: 0.7,
                },
                &phik,
                0.0,
            ),
            (
                BoundaryFamily::EdgeProductTail {
                    model: &me,
                    term: 0,
                    weight: 1,
                    dual: 0.7,
                },
                &phig,
                0.0,
            ),
            (
                BoundaryFamily::ShiftedInversePlaneWave {
                    power: 1,
                    inverse_power: 1,
                    shift: z,
                    dual: 0.4,
                },
                &phik,
                0.0,
            ),
            (
                BoundaryFamily::EdgeKernelTail {
                    model: &me,
                    term: 0,
                    dual: 0.4,
                },
                &phig,
                0.0,
            ),
            (
                BoundaryFamily::GroundPlaneWave {
                    model: &mi,
                    dual: 0.4,
                },
                &phig,
                0.0,
            ),
        ];
        for (family, phi, gamma) in &cases {
            let rep = boundary_weak_limit_probe(family, phi, *gamma, &grid, &tols(), 1e-10)
                .unwrap_or_else(|e| panic!("{}: {e}", family.label()));
            assert_eq!(
                rep.verdict,
                Verdict::Vanishing,
                "{}: values {:?}",
                family.label(),
                rep.values
            );
        }
    }

    #[test]
    fn boundary_families_report_their_critical_exponents() {
        let me = edge(1);
        let m2 = edge(2);
        let mi = inner();
        let z = c64(0.0, 1.0);
        assert_eq!(
            BoundaryFamily::WeightedPlaneWave {
                power: 0,
                weight: 1,
                inverse_power: 1,
                shift: z,
                dual: 0.0
            }
            .gamma_required(),
            -1.0
        );
        assert_eq!(
            BoundaryFamily::WeightedPlaneWave {
                power: 2,
                weight: 1,
                inverse_power: 1,
                shift: z,
                dual: 0.0
            }
            .gamma_required(),
            3.0
        );
        assert_eq!(
            BoundaryFamily::EdgeProductTail {
                model: &me,
                term: 0,
                weight: 1,
                dual: 0.0
            }
            .gamma_required(),
            -1.0
        );
        assert_eq!(
            BoundaryFamily::EdgeProductTail {
                model: &m2,
                term: 0,
                weight: 0,
                dual: 0.0
            }
            .gamma_required(),
            3.0
        );
        assert_eq!(
            BoundaryFamily::ShiftedInversePlaneWave {
                power: 1,
                inverse_power: 2,
                shift: z,
                dual: 0.0
            }
            .gamma_required(),
            -3.0
        );
        assert_eq!(
            BoundaryFamily::EdgeKernelTail {
                model: &me,
                term: 0,
                dual: 0.0
            }
            .gamma_required(),
            -1.0
        );
        assert_eq!(
            BoundaryFamily::GroundPlaneWave {
                model: &mi,
                dual: 0.0
            }
            .gamma_required(),
            -1.0
        );
    }

    #[test]
    fn boundary_probe_rejects_bad_inputs() {
        let me = edge(1);
        let mi = inner();
        let phig = TestFunction::gaussian(0.0, 1.0);
        let low_grid = boundary_weak_limit_probe(
            &BoundaryFamily::GroundPlaneWave {
                model: &mi,
                dual: 0.0,
            },
            &phig,
            0.0,
            &[0.5, 10.0, 60.0],
            &tols(),
            1e-9,
        );
        assert!(matches!(low_grid, Err(ProbeError::Precondition(_))));
        let bad_term = boundary_weak_limit_probe(
            &BoundaryFamily::EdgeProductTail {
                model: &me,
                term: 1,
                weight: 1,
                dual: 0.0,
            },
            &phig,
            0.0,
            &[10.0, 60.0, 360.0],
            &tols(),
            1e-9,
        );
        assert!(matches!(bad_term, Err(ProbeError::Precondition(_))));
        let critical_gamma = boundary_weak_limit_probe(
            &BoundaryFamily::GroundPlaneWave {
                model: &mi,
                dual: 0.0,
            },
            &phig,
            -1.0,
            &[10.0, 60.0, 360.0],
            &tols(),
            1e-9,
        );
        match critical_gamma {
            Err(ProbeError::Precondition(msg)) => {
                assert!(msg.contains("gamma_required"), "{msg}")
            }
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    // --- smeared eigenfunction overlaps ------------------------------------

    #[test]
    fn smeared_overlap_concentrates_at_the_dual_wavenumber() {
        let m = edge(1);
        let phi = TestFunction::gaussian(0.7, 0.1);
        let rep = smeared_biorthogonality(&m, 2, 0.7, &[10.0, 50.0, 250.0], &phi, &tols(), 1e-10)
            .unwrap();
        let expected = 0.49 / (1.49 * 1.49);
        assert_abs_diff_eq!(rep.target.unwrap().re, expected, epsilon = 1e-12);
        assert_eq!(rep.verdict, Verdict::Converged, "{:?}", rep.residuals);
        assert!(
            (rep.extrapolated.re - expected).abs() < 1e-5 && rep.extrapolated.im.abs() < 1e-5,
            "extrapolated = {}",
            rep.extrapolated
        );
    }

    // --- slowly growing test functions -------------------------------------

    #[test]
    fn edge_tail_pieces_reconstruct_the_windowed_integrand() {
        let m = edge(1);
        let (a, xp, kappa, k0) = (37.0, 1.7, 0.5, 2.0);
        for s in [1.0f64, -1.0] {
            let pieces = edge_tail_pieces(&m, a, xp, kappa, k0, s).unwrap();
            assert_eq!(pieces.len(), 4);
            for t in [5.3, 12.7] {
                let x = s * t;
                let full = kernels::edge_kernel_closed(&m, a, x, xp).unwrap().total()
                    * t.powf(kappa)
                    * (I * k0 * x).exp();
                let sum: Complex64 = pieces
                    .iter()
                    .map(|p| (I * p.omega * t).exp() * (p.env)(t))
                    .sum();
                assert!(
                    (sum - full).norm() < 1e-11 * (1.0 + full.norm()),
                    "s = {s}, t = {t}: {sum} vs {full}"
                );
            }
        }
    }

    #[test]
    fn inner_tail_pieces_reconstruct_the_windowed_integrand() {
        let m = inner();
        let (a, xp, kappa, k0) = (37.0, 0.8, 0.4, 1.5);
        for s in [1.0f64, -1.0] {
            let (pieces, defect) = inner_tail_pieces(&m, a, xp, kappa, k0, s).unwrap();
            assert_eq!(pieces.len(), 34);
            for t in [5.3, 12.7] {
                let x = s * t;
                let full = kernels::inner_kernel_closed(&m, a, x, xp).unwrap().total()
                    * t.powf(kappa)
                    * (I * k0 * x).exp();
                let sum = pieces
                    .iter()
                    .map(|p| (I * p.omega * t).exp() * (p.env)(t))
                    .sum::<Complex64>()
                    + defect(t);
                assert!(
                    (sum - full).norm() < 1e-10 * (1.0 + full.norm()),
                    "s = {s}, t = {t}: {sum} vs {full}"
                );
            }
        }
    }

    #[test]
    fn tail_piece_envelope_derivatives_match_finite_differences() {
        let me = edge(1);
        let mi = inner();
        let edge_pieces = edge_tail_pieces(&me, 21.0, 1.1, 0.6, 1.0, 1.0).unwrap();
        let (inner_pieces, _) = inner_tail_pieces(&mi, 21.0, -0.4, 0.7, 0.5, -1.0).unwrap();
        let (t, h) = (7.3, 1e-5);
        for (i, piece) in edge_pieces.iter().chain(inner_pieces.iter()).enumerate() {
            let fd = ((piece.env)(t + h) - (piece.env)(t - h)) / (2.0 * h);
            let an = (piece.env_d)(t);
            assert!(
                (fd - an).norm() <= 1e-6 * (1.0 + an.norm()),
                "piece {i}: {fd} vs {an}"
            );
        }
    }

    #[test]
    fn slow_growth_pairing_is_independent_of_the_window_split() {
        let m = edge(1);
        let gm = GrowthModel::Edge(&m);
        let (v10, _) =
            slow_growth_pairing(&gm, 37.0, 0.5, 2.0, SupportSide::Plus, 1.7, 1e-10, 10.0).unwrap();
        let (v40, _) =
            slow_growth_pairing(&gm, 37.0, 0.5, 2.0, SupportSide::Plus, 1.7, 1e-10, 40.0).unwrap();
        assert!((v10 - v40).norm() < 1e-8, "{v10} vs {v40}");
    }

    #[test]
    fn edge_kernel_concentrates_on_a_growing_oscillatory_test_function() {
        let m = edge(1);
        let grid = [25.0, 50.0, 100.0, 200.0, 400.0, 800.0];
        let rep = slow_growth_probe(
            &GrowthModel::Edge(&m),
            &grid,
            0.5,
            2.0,
            SupportSide::Plus,
            3.0,
            &tols(),
            1e-10,
        )
        .unwrap();
        let target = c64(3f64.sqrt(), 0.0) * (I * 6.0).exp();
        assert!((rep.target.unwrap() - target).norm() < 1e-12);
        assert!(
            !matches!(rep.verdict, Verdict::Diverging),
            "verdict {:?}, residuals {:?}",
            rep.verdict,
            rep.residuals
        );
        assert!(
            *rep.residuals.last().unwrap() < 5e-2,
            "residuals = {:?}",
            rep.residuals
        );
        assert!(
            (rep.extrapolated - target).norm() < 5e-3,
            "extrapolated = {}, target = {target}, residuals = {:?}",
            rep.extrapolated,
            rep.residuals
        );
    }

    #[test]
    fn inner_kernel_ignores_a_test_function_supported_on_the_other_side() {
        let m = inner();
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = slow_growth_probe(
            &GrowthModel::Inner(&m),
            &grid,
            0.5,
            1.0,
            SupportSide::Minus,
            0.7,
            &tols(),
            1e-10,
        )
        .unwrap();
        // The evaluation point sits outside the one-sided support, so the
        // pairings must die out.
        assert_eq!(rep.target, Some(c64(0.0, 0.0)));
        assert!(
            !matches!(rep.verdict, Verdict::Diverging),
            "verdict {:?}, residuals {:?}",
            rep.verdict,
            rep.residuals
        );
        assert!(
            *rep.residuals.last().unwrap() < 1e-2,
            "residuals = {:?}",
            rep.residuals
        );
        assert!(
            rep.extrapolated.norm() < 1e-3,
            "extrapolated = {}",
            rep.extrapolated
        );
    }

    #[test]
    fn inner_kernel_concentrates_on_its_support_side() {
        let m = inner();
        let grid = [25.0, 50.0, 100.0, 200.0];
        let rep = slow_growth_probe(
            &GrowthModel::Inner(&m),
            &grid,
            0.3,
            0.0,
            SupportSide::Minus,
            -2.5,
            &tols(),
            1e-10,
        )
        .unwrap();
        // target = |x'|^kappa = 2.5^{0.3}.
        let target = c64(1.3163822043342374, 0.0);
        assert!((rep.target.unwrap() - target).norm() < 1e-12);
        assert!(
            !matches!(rep.verdict, Verdict::Diverging),
            "verdict {:?}, residuals {:?}",
            rep.verdict,
            rep.residuals
        );
        assert!(
            (rep.extrapolated - target).norm() < 2e-2,
            "extrapolated = {}, residuals = {:?}",
            rep.extrapolated,
            rep.residuals
        );
    }

    #[test]
    fn slow_growth_probe_rejects_bad_inputs() {
        let me = edge(1);
        let mi = inner();
        let bad_kappa = slow_growth_probe(
            &GrowthModel::Edge(&me),
            &[25.0, 50.0, 100.0],
            1.2,
            0.0,
            SupportSide::Plus,
            2.0,
            &tols(),
            1e-9,
        );
        assert!(matches!(bad_kappa, Err(ProbeError::Precondition(_))));
        // The inner kernel mixes in frequencies up to 4 alpha, which the
        // truncation grid must clear.
        let low_inner = slow_growth_probe(
            &GrowthModel::Inner(&mi),
            &[3.0, 6.0, 12.0],
            0.5,
            0.0,
            SupportSide::Minus,
            -2.0,
            &tols(),
            1e-9,
        );
        assert!(matches!(low_inner, Err(ProbeError::Precondition(_))));
        // Likewise the plane-wave frequency of the test function itself.
        let low_edge = slow_growth_probe(
            &GrowthModel::Edge(&me),
            &[1.5, 10.0, 100.0],
            0.5,
            2.0,
            SupportSide::Plus,
            2.0,
            &tols(),
            1e-9,
        );
        assert!(matches!(low_edge, Err(ProbeError::Precondition(_))));
    }

    // --- functionals supported at infinity ----------------------------------

    #[test]
    fn envelope_tail_primitives_match_quadrature() {
        // Substituting y = 1/v maps both half-line envelopes onto smooth
        // finite integrals starting at v = 0.
        let x0 = 40.0;
        let cfg = QuadConfig::with_tol(1e-13);
        for zt in [c64(0.0, 1.0), c64(0.0, -1.0), c64(0.7, -1.3)] {
            let n1 = quad::adaptive(
                |v: f64| 1.0 / (Complex64::new(1.0, 0.0) - zt * v),
                0.0,
                1.0 / x0,
                &cfg,
            )
            .unwrap()
            .value;
            assert!(
                (n1 - env1_tail(x0, zt)).norm() < 1e-11,
                "zt = {zt}: {n1} vs {}",
                env1_tail(x0, zt)
            );
            let n2 = quad::adaptive(
                |v: f64| {
                    let d = Complex64::new(1.0, 0.0) - zt * v;
                    v / (d * d)
                },
                0.0,
                1.0 / x0,
                &cfg,
            )
            .unwrap()
            .value;
            assert!(
                (n2 - env2_tail(x0, zt)).norm() < 1e-11,
                "zt = {zt}: {n2} vs {}",
                env2_tail(x0, zt)
            );
        }
    }

    #[test]
    fn resonant_tail_modes_reconstruct_the_integrand() {
        let m = inner();
        let phi = TestFunction::odd_cosine_decay(1.0);
        let (xp, eps, freq) = (0.3, 0.05, 1.0);
        let alpha = m.alpha();
        let z = m.shift();
        for sigma in [1.0f64, -1.0] {
            let zt = if sigma > 0.0 { z } else { -z };
            let phi0 = sigma * eps * xp;
            let modes = fejer_witness_modes(alpha, freq, eps, phi0);
            let remainder = fejer_witness_remainder(alpha, freq, eps, phi0, zt);
            let full = fejer_witness_tail_integrand(&m, &phi, xp, eps, sigma);
            for y in [47.3, 92.1] {
                let mode_sum: Complex64 = modes
                    .iter()
                    .map(|md| {
                        md.amp * (md.omega * y + md.phase).cos() * mode_env(md.env_pow, y, zt)
                    })
                    .sum();
                let rebuilt = mode_sum + remainder(y);
                let want = full(y);
                assert!(
                    (rebuilt - want).norm() < 1e-12,
                    "sigma = {sigma}, y = {y}: {rebuilt} vs {want}"
                );
            }
        }
    }

    #[test]
    fn sinc_cube_functional_finds_the_inverse_square_witness_limit() {
        // For |x-z|^{-2}-type decay the eps -> 0 limit has the closed form
        // (pi/16) / (x'-z)^2, which is -pi/16 at x' = 0, z = i.  The values
        // converge only first-order in eps, so the grid is pushed two
        // halvings beyond the default before the successive differences
        // drop under the nontrivial-limit threshold.
        let z = c64(0.0, 1.0);
        let phi = TestFunction::inverse_square(z);
        let grid = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125];
        let rep = infinity_functional_probe(
            &InfinityFunctional::WeightedSincCube { shift: z },
            &phi,
            0.0,
            &grid,
            &tols(),
            &InfinityOptions::default(),
        )
        .unwrap();
        let want = c64(-PI / 16.0, 0.0);
        assert!(
            (rep.extrapolated - want).norm() < 5e-4,
            "{} vs {want}, residuals {:?}",
            rep.extrapolated,
            rep.residuals
        );
        assert_eq!(rep.verdict, Verdict::NontrivialLimit, "{:?}", rep.residuals);
    }

    #[test]
    fn sinc_defect_functional_finds_the_inverse_square_witness_limit() {
        // Same witness, different kernel: the limit is (pi/6) / (x'-z)^2.
        let z = c64(0.0, 1.0);
        let phi = TestFunction::inverse_square(z);
        let rep = infinity_functional_probe(
            &InfinityFunctional::WeightedSincDefect { shift: z },
            &phi,
            0.0,
            &DEFAULT_EPS_GRID,
            &tols(),
            &InfinityOptions::default(),
        )
        .unwrap();
        let want = c64(-PI / 6.0, 0.0);
        assert!(
            (rep.extrapolated - want).norm() < 5e-4,
            "{} vs {want}, residuals {:?}",
            rep.extrapolated,
            rep.residuals
        );
        assert_eq!(rep.verdict, Verdict::NontrivialLimit, "{:?}", rep.residuals);
    }

    #[test]
    fn ground_state_functional_finds_the_resonant_witness_limit() {
        // cos(alpha x)/x decay resonates with the ground state; the limit is
        // psi0(x') / sqrt(2 alpha).
        let m = inner();
        let phi = TestFunction::odd_cosine_decay(1.0);
        let opts = InfinityOptions {
            witness_freq: Some(1.0),
            ..InfinityOptions::default()
        };
        let rep = infinity_functional_probe(
            &InfinityFunctional::GroundFejer(&m),
            &phi,
            0.3,
            &DEFAULT_EPS_GRID,
            &tols(),
            &opts,
        )
        .unwrap();
        let want = m.psi0(0.3) / 2f64.sqrt();
        assert!(
            (rep.extrapolated - want).norm() < 0.05 * want.norm(),
            "{} vs {want}, residuals {:?}",
            rep.extrapolated,
            rep.residuals
        );
        assert!(
            !matches!(rep.verdict, Verdict::Diverging | Verdict::Vanishing),
            "verdict {:?}",
            rep.verdict
        );
    }

    #[test]
    fn ground_state_functional_vanishes_on_rapid_decay() {
        let m = inner();
        let rep = infinity_functional_probe(
            &InfinityFunctional::GroundFejer(&m),
            &TestFunction::gaussian(0.3, 0.4),
            0.3,
            &DEFAULT_EPS_GRID,
            &tols(),
            &InfinityOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Vanishing, "{:?}", rep.values);
    }

    #[test]
    fn infinity_functionals_ignore_compactly_supported_test_functions() {
        let m = inner();
        let phi = TestFunction::bump(0.2, 3.0);
        let z = c64(0.0, 1.0);
        let functionals = [
            InfinityFunctional::WeightedSincCube { shift: z },
            InfinityFunctional::WeightedSincDefect { shift: z },
            InfinityFunctional::GroundFejer(&m),
        ];
        for which in &functionals {
            let rep = infinity_functional_probe(
                which,
                &phi,
                0.2,
                &DEFAULT_EPS_GRID,
                &tols(),
                &InfinityOptions::default(),
            )
            .unwrap();
            assert_eq!(rep.verdict, Verdict::Vanishing, "{}", which.label());
        }
    }

    #[test]
    fn infinity_probe_rejects_bad_inputs() {
        let m = inner();
        let phi = TestFunction::gaussian(0.0, 1.0);
        let cube = InfinityFunctional::WeightedSincCube {
            shift: c64(0.0, 1.0),
        };
        let short = infinity_functional_probe(
            &cube,
            &phi,
            0.0,
            &[0.2, 0.1, 0.05, 0.025],
            &tols(),
            &InfinityOptions::default(),
        );
        assert!(matches!(short, Err(ProbeError::Precondition(_))));
        let increasing = infinity_functional_probe(
            &cube,
            &phi,
            0.0,
            &[0.0125, 0.025, 0.05, 0.1, 0.2],
            &tols(),
            &InfinityOptions::default(),
        );
        assert!(matches!(increasing, Err(ProbeError::Precondition(_))));
        // The resonant-tail route checks that the test function really has
        // the claimed cos(freq x)/x tail.
        let opts = InfinityOptions {
            witness_freq: Some(1.0),
            ..InfinityOptions::default()
        };
        let mismatch = infinity_functional_probe(
            &InfinityFunctional::GroundFejer(&m),
            &phi,
            0.0,
            &DEFAULT_EPS_GRID,
            &tols(),
            &opts,
        );
        match mismatch {
            Err(ProbeError::Precondition(msg)) => {
                assert!(msg.contains("resonant tail"), "{msg}")
            }
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn sinc_cube_limit_is_carried_by_the_far_part() {
        let z = c64(0.0, 1.0);
        let phi = TestFunction::inverse_square(z);
        let report = locality_at_infinity_check(
            &InfinityFunctional::WeightedSincCube { shift: z },
            &phi,
            0.0,
            &[8.0, 16.0],
            &DEFAULT_EPS_GRID,
            &tols(),
            &InfinityOptions::default(),
        )
        .unwrap();
        assert!(
            report.max_far_relative_deviation < 0.02,
            "deviation = {}",
            report.max_far_relative_deviation
        );
        assert!(report.near_all_vanishing);
    }
}


