//! Named check catalog and suite runner.
//!
//! Every claim the engine certifies lives behind a stable catalog id
//! (`"L3.1"`, `"T4.1"`, ...).  A runnable check computes named scalar
//! metrics, all oriented so that smaller is better, and pairs each judged
//! metric with a ceiling; the verdict is exactly "every judged metric at or
//! below its ceiling", so a reported result can be re-judged offline from
//! its numbers alone.  Composed entries aggregate the verdicts of the
//! checks they cite, and annotation entries mirror a host check while
//! recording a parameter-freedom note.
//!
//! Randomized sweeps draw from a counter-based generator seeded per check
//! id, and the inequality scans walk low-discrepancy Halton points mixed
//! with adversarial samples near denominator minima, so a fixed
//! [`CheckConfig`] reproduces every metric bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contours::{ArcSign, DeformationSpec};
use crate::kernels;
use crate::limits::{
    band_term_weak_limit, boundary_weak_limit_probe, delta_probe, infinity_functional_probe,
    locality_at_infinity_check, slow_growth_probe, smeared_biorthogonality, vanishing_probe,
    BoundaryFamily, ConvergenceReport, DeltaFamily, GrowthModel, InfinityFunctional,
    InfinityOptions, ProbeTolerances, VanishingFamily, Verdict,
};
use crate::models::{EdgeModel, InnerModel};
use crate::testspace::{SupportSide, TestFunction};

// --- configuration ---------------------------------------------------------

/// Shared knobs for a verification run.
///
/// Grids are interpreted per check: `a_grid` drives the growing-truncation
/// probes, `eps_grid` the shrinking-width probes, `boundary_grid` the weak
/// boundary limits and `r_grid` the smeared-overlap windows.  Ceilings can
/// be overridden per check id and metric name; everything else is a plain
/// numeric parameter with a documented default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// Seed for the randomized argument sweeps (each check derives its own
    /// stream from this and its id).
    pub seed: u64,
    /// Sample count for each quasi-random inequality scan.
    pub scan_samples: usize,
    /// Random argument pairs per parameter combination in the kernel
    /// identity sweeps.
    pub sweep_pairs: usize,
    /// Absolute tolerance handed to the quadrature routines.
    pub quad_tol: f64,
    /// Complex shift of the edge-singularity model, `[re, im]`.
    pub edge_shift: [f64; 2],
    /// Band half-width of the interior-singularity model.
    pub inner_alpha: f64,
    /// Complex shift of the interior-singularity model, `[re, im]`.
    pub inner_shift: [f64; 2],
    /// Increasing truncation grid for the concentration probes.
    pub a_grid: Vec<f64>,
    /// Decreasing width grid for the vanishing probes.  The default runs
    /// twelve halvings from 0.2 so that first-order families still land
    /// under tight ceilings at the end of the grid.
    pub eps_grid: Vec<f64>,
    /// Decreasing width grid for the infinity-functional probes, shorter
    /// than `eps_grid` because each point costs a resonant tail summation.
    pub witness_eps_grid: Vec<f64>,
    /// Increasing parameter grid for the weak boundary limits.
    pub boundary_grid: Vec<f64>,
    /// Increasing window-radius grid for the smeared-overlap probes.
    pub r_grid: Vec<f64>,
    /// Ceiling overrides: check id -> metric name -> ceiling.
    pub ceiling_overrides: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 172_031,
            scan_samples: 100_000,
            sweep_pairs: 20,
            quad_tol: 1e-10,
            edge_shift: [0.0, 1.0],
            inner_alpha: 1.0,
            inner_shift: [0.0, 1.0],
            a_grid: vec![25.0, 50.0, 100.0, 200.0],
            eps_grid: (0..13).map(|j| 0.2 * 0.5f64.powi(j)).collect(),
            witness_eps_grid: (0..7).map(|j| 0.2 * 0.5f64.powi(j)).collect(),
            boundary_grid: vec![10.0, 100.0, 1000.0],
            r_grid: vec![25.0, 50.0, 100.0, 200.0],
            ceiling_overrides: BTreeMap::new(),
        }
    }
}

impl CheckConfig {
    /// `a_grid` extended by doublings until it reaches 400, used by the
    /// slow-growth probes whose targets are checked deep in the sweep.
    fn growth_grid(&self) -> Vec<f64> {
        let mut g = self.a_grid.clone();
        while g.last().copied().unwrap_or(0.0) < 400.0 {
            let last = g.last().copied().unwrap_or(25.0);
            g.push(2.0 * last);
        }
        g
    }

    fn edge_model(&self, order: usize) -> Result<EdgeModel, String> {
        EdgeModel::new(order, Complex64::new(self.edge_shift[0], self.edge_shift[1]))
            .map_err(|e| e.to_string())
    }

    fn inner_model(&self) -> Result<InnerModel, String> {
        InnerModel::new(
            self.inner_alpha,
            Complex64::new(self.inner_shift[0], self.inner_shift[1]),
        )
        .map_err(|e| e.to_string())
    }
}

// --- results ---------------------------------------------------------------

/// Outcome of one catalog check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckVerdict {
    Pass,
    Fail,
    /// The check could not certify either way; reserved for documented
    /// open-finding branches and for composed entries with missing
    /// components.  Never counted as a suite failure.
    Inconclusive,
}

/// What went into a check: enough to rerun it exactly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub grids: BTreeMap<String, Vec<f64>>,
    pub contours: Vec<String>,
    pub test_functions: Vec<String>,
}

/// One check's metrics, ceilings and verdict.
///
/// `metrics` holds every measurement (judged and informational);
/// `ceilings` holds the pass ceiling for each judged metric.  The verdict
/// equals [`CheckResult::rejudge`] except for explicitly inconclusive
/// results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    pub verdict: CheckVerdict,
    pub metrics: BTreeMap<String, f64>,
    pub ceilings: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl CheckResult {
    /// Recompute the pass/fail verdict from the stored numbers alone.
    pub fn rejudge(&self) -> CheckVerdict {
        judge(&self.metrics, &self.ceilings)
    }

    /// The judged metrics that exceed their ceilings.
    pub fn violations(&self) -> Vec<(&str, f64, f64)> {
        self.ceilings
            .iter()
            .filter_map(|(k, &c)| match self.metrics.get(k) {
                Some(&v) if v <= c => None,
                Some(&v) => Some((k.as_str(), v, c)),
                None => Some((k.as_str(), f64::NAN, c)),
            })
            .collect()
    }
}

fn judge(metrics: &BTreeMap<String, f64>, ceilings: &BTreeMap<String, f64>) -> CheckVerdict {
    for (key, ceiling) in ceilings {
        match metrics.get(key) {
            // NaN compares false and correctly fails.
            Some(v) if *v <= *ceiling => {}
            _ => return CheckVerdict::Fail,
        }
    }
    CheckVerdict::Pass
}

/// Suite-level errors; anything that happens inside a check is reported
/// through that check's result instead.
#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("unknown check id `{0}`")]
    UnknownId(String),
}

// --- catalog ---------------------------------------------------------------

/// How a catalog entry produces its result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Runs its own numerics.
    Runnable,
    /// Aggregates the verdicts of the listed checks.
    Composed(&'static [&'static str]),
    /// Mirrors the listed host check and records a parameter-freedom note.
    Annotation(&'static str),
}

/// One row of the check catalog.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub title: &'static str,
    pub kind: CheckKind,
}

/// The closed catalog, in canonical order.  Ids are stable external tokens;
/// titles say what each check does.
pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: "L3.1",
        title: "edge partial overlap: closed form against direct quadrature",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.2",
        title: "weighted plane-wave boundary terms vanish at large position",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "C3.1",
        title: "edge eigenfunction product tails vanish at large position",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.3",
        title: "weighted wavenumber kernel concentrates at the dual wavenumber",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "T3.1",
        title: "smeared edge overlaps reproduce the weighted point value",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R3.1",
        title: "weight exponent freedom in the smeared overlap identity",
        kind: CheckKind::Annotation("T3.1"),
    },
    CatalogEntry {
        id: "L3.4",
        title: "edge position kernel: closed form, contour routes and recursion agree",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.5",
        title: "shifted-inverse plane-wave boundary terms vanish at large wavenumber",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "C3.2",
        title: "edge kernel boundary-slot tails vanish at large wavenumber",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.6",
        title: "prefactored sinc kernels concentrate at the probe point",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "T3.2",
        title: "edge band-limited kernels converge to the point evaluation",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R3.3",
        title: "position-space resolution variants assembled from kernel checks",
        kind: CheckKind::Composed(&["T3.2", "L3.4"]),
    },
    CatalogEntry {
        id: "T3.3",
        title: "edge kernels concentrate on slowly growing test functions",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R3.2",
        title: "windowed growth combinations extend the admissible class",
        kind: CheckKind::Annotation("T3.3"),
    },
    CatalogEntry {
        id: "L3.7",
        title: "plain sinc pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.8",
        title: "weighted Fejer pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.9",
        title: "weighted sinc-cube pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L3.10",
        title: "weighted sinc-defect pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R3.4",
        title: "sinc-cube and sinc-defect functionals are supported at infinity",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.1",
        title: "inner band kernel: closed form against contour quadrature",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.2",
        title: "ground-state plane-wave boundary terms vanish at large wavenumber",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.3",
        title: "narrow-band remainder washes out under its envelope bound",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "T4.1",
        title: "inner band-limited kernels converge to the point evaluation",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.4",
        title: "band, ground-state and chain-state envelope inequalities hold",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "T4.2",
        title: "inner kernels concentrate on slowly growing test functions",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R4.1",
        title: "windowed growth combinations for the interior-singularity model",
        kind: CheckKind::Annotation("T4.2"),
    },
    CatalogEntry {
        id: "L4.5",
        title: "punctured-band kernel: closed form against arcs and residues",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.6",
        title: "ground-state cosine-band pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.7",
        title: "symmetrized narrow-band pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "L4.8",
        title: "ground-state Fejer pairings vanish as the width shrinks",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "R4.2",
        title: "ground-state Fejer functional is supported at infinity",
        kind: CheckKind::Runnable,
    },
    CatalogEntry {
        id: "C4.1",
        title: "narrow-band resolution assembled from kernel and vanishing checks",
        kind: CheckKind::Composed(&["L4.5", "L4.6", "L4.7", "L3.7"]),
    },
];

/// Catalog lookup by id.
pub fn catalog_entry(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

/// All catalog ids in canonical order.
pub fn default_suite_ids() -> Vec<String> {
    CATALOG.iter().map(|e| e.id.to_string()).collect()
}

// --- result builder --------------------------------------------------------

struct Builder {
    id: &'static str,
    title: &'static str,
    metrics: BTreeMap<String, f64>,
    ceilings: BTreeMap<String, f64>,
    notes: Vec<String>,
    provenance: Provenance,
    overrides: BTreeMap<String, f64>,
    errors: usize,
    inconclusive: bool,
}

impl Builder {
    fn new(entry: &CatalogEntry, cfg: &CheckConfig) -> Builder {
        Builder {
            id: entry.id,
            title: entry.title,
            metrics: BTreeMap::new(),
            ceilings: BTreeMap::new(),
            notes: Vec::new(),
            provenance: Provenance {
                seed: cfg.seed,
                ..Provenance::default()
            },
            overrides: cfg
                .ceiling_overrides
                .get(entry.id)
                .cloned()
                .unwrap_or_default(),
            errors: 0,
            inconclusive: false,
        }
    }

    /// Record a measurement together with its pass ceiling (config

    /// overrides win over `default_ceiling`).
    fn judged(&mut self, key: &str, value: f64, default_ceiling: f64) {
        let ceiling = self.overrides.get(key).copied().unwrap_or(default_ceiling);
        self.metrics.insert(key.to_string(), value);
        self.ceilings.insert(key.to_string(), ceiling);
    }

    /// Record a measurement that does not participate in the verdict.
    fn info(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Record a sub-check error; any error fails the check.
    fn error(&mut self, context: &str, e: impl std::fmt::Display) {
        self.errors += 1;
        self.notes.push(format!("error in {context}: {e}"));
    }

    fn grid(&mut self, name: &str, g: &[f64]) {
        self.provenance.grids.insert(name.to_string(), g.to_vec());
    }

    fn contour(&mut self, desc: impl Into<String>) {
        self.provenance.contours.push(desc.into());
    }

    fn phi(&mut self, f: &TestFunction) {
        if !self.provenance.test_functions.contains(&f.label) {
            self.provenance.test_functions.push(f.label.clone());
        }
    }

    fn finish(mut self) -> CheckResult {
        let errors = self.errors as f64;
        self.judged("subcheck_errors", errors, 0.0);
        let verdict = if self.inconclusive {
            CheckVerdict::Inconclusive
        } else {
            judge(&self.metrics, &self.ceilings)
        };
        CheckResult {
            id: self.id.to_string(),
            title: self.title.to_string(),
            verdict,
            metrics: self.metrics,
            ceilings: self.ceilings,
            notes: self.notes,
            provenance: self.provenance,
        }
    }
}

// --- shared numerics -------------------------------------------------------

/// Relative gap `|a - b| / (1 + |b|)`, the residual convention for all
/// identity sweeps.
fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Radical-inverse Halton point in base `base` (index starts at 1).
fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Log-uniform map of `t in [0,1]` onto `[10^lo, 10^hi]`.
fn log_lerp(t: f64, lo: f64, hi: f64) -> f64 {
    10f64.powf(lo + (hi - lo) * t)
}

/// Per-check RNG stream: the config seed folded with the check id.
fn stream_seed(seed: u64, id: &str) -> u64 {
    id.bytes().fold(seed ^ 0x9E37_79B9_7F4A_7C15, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01B3)
    })
}

/// Largest rise between consecutive residuals that both sit above the
/// numerical floor; zero for a cleanly decreasing sweep.
fn monotonicity_excess(rep: &ConvergenceReport) -> f64 {
    let floor = (3.0 * rep.max_quad_error).max(1e-10);
    let mut worst = 0.0f64;
    for w in rep.residuals.windows(2) {
        if w[0] <= floor || w[1] <= floor {
            continue;
        }
        worst = worst.max(w[1] - w[0]);
    }
    worst
}

/// Worst-tracking helper for metric aggregation across sub-sweeps.
#[derive(Default)]
struct Worst {
    value: f64,
    tag: String,
}

impl Worst {
    fn update(&mut self, value: f64, tag: impl Into<String>) {
        if value > self.value || self.tag.is_empty() {
            self.value = value;
            self.tag = tag.into();
        }
    }
}

fn probe_tols() -> ProbeTolerances {
    ProbeTolerances::default()
}

// --- identity sweeps -------------------------------------------------------

fn check_l3_1(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, entry.id));
    let windows = [1.0, 5.0];
    b.grid("window", &windows);
    let mut worst = Worst::default();
    for n in 1..=3usize {
        let m = match cfg.edge_model(n) {
            Ok(m) => m,
            Err(e) => {
                b.error("edge model", e);
                return b.finish();
            }
        };
        for &r in &windows {
            for _ in 0..cfg.sweep_pairs {
                let mut draw = || {
                    let mag = 0.2 + 4.8 * rng.gen::<f64>();
                    if rng.gen::<bool>() {
                        mag
                    } else {
                        -mag
                    }
                };
                let k = Complex64::new(draw(), 0.0);
                let kp = Complex64::new(draw(), 0.0);
                let closed = match kernels::biortho_partial_closed(&m, r, k, kp) {
                    Ok(v) => v.total(),
                    Err(e) => {
                        b.error("closed overlap", e);
                        continue;
                    }
                };
                let direct = match kernels::biortho_partial_direct(&m, r, k, kp, cfg.quad_tol) {
                    Ok(v) => v,
                    Err(e) => {
                        b.error("direct overlap", e);
                        continue;
                    }
                };
                worst.update(
                    rel_gap(closed, direct),
                    format!("n={n} R={r} k={:.3} k'={:.3}", k.re, kp.re),
                );
            }
        }
    }
    b.judged("max_rel_residual", worst.value, 1e-8);
    b.note(format!("worst pair: {}", worst.tag));
    b.finish()
}

fn check_l3_4(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, entry.id));
    let truncations = [2.0, 10.0];
    let radii = [0.2, 0.5];
    b.grid("truncation", &truncations);
    b.grid("detour_radius", &radii);
    // The two contour routes are judged against each other at 1e-10, so
    // each quadrature must resolve well below that gap.
    let qtol = cfg.quad_tol.min(1e-11);
    let mut worst_rel = Worst::default();
    let mut worst_gap = Worst::default();
    let mut worst_rec = Worst::default();
    let models: Vec<EdgeModel> = match (0..=4).map(|n| cfg.edge_model(n)).collect() {
        Ok(v) => v,
        Err(e) => {
            b.error("edge model", e);
            return b.finish();
        }
    };
    let z = models[1].shift();
    for n in 1..=3usize {
        let m = &models[n];
        for &a in &truncations {
            for &r in &radii {
                b.contour(format!("edge detour up/down, radius {r}, truncation {a}"));
                for _ in 0..cfg.sweep_pairs {
                    let x = -3.0 + 6.0 * rng.gen::<f64>();
                    let xp = -3.0 + 6.0 * rng.gen::<f64>();
                    let closed = match kernels::edge_kernel_closed(m, a, x, xp) {
                        Ok(v) => v.total(),
                        Err(e) => {
                            b.error("closed kernel", e);
                            continue;
                        }
                    };
                    let mut directions = Vec::with_capacity(2);
                    for spec in [DeformationSpec::up(r), DeformationSpec::down(r)] {
                        match kernels::edge_kernel_direct(m, a, spec, x, xp, qtol) {
                            Ok(v) => {
                                worst_rel.update(
                                    rel_gap(closed, v),
                                    format!("n={n} A={a} r={r} x={x:.3} x'={xp:.3}"),
                                );
                                directions.push(v);
                            }
                            Err(e) => b.error("direct kernel", e),
                        }
                    }
                    if let [up, down] = directions[..] {
                        worst_gap.update(
                            (up - down).norm(),
                            format!("n={n} A={a} r={r} x={x:.3} x'={xp:.3}"),
                        );
                    }
                }
            }
        }
    }
    // Single recursion step relating successive orders, at fresh random
    // arguments: K_n = rho K_{n-1} + leading boundary pair.
    for n in 1..=4usize {
        let m = &models[n];
        let prev = &models[n - 1];
        for &a in &truncations {
            let ka = Complex64::new(a, 0.0);
            for _ in 0..cfg.sweep_pairs {
                let x = -3.0 + 6.0 * rng.gen::<f64>();
                let xp = -3.0 + 6.0 * rng.gen::<f64>();
                let rho = (Complex64::new(xp, 0.0) - z) / (Complex64::new(x, 0.0) - z);
                let pieces = (|| -> Result<(Complex64, Complex64, Complex64), String> {
                    let kn = kernels::edge_kernel_closed(m, a, x, xp).map_err(|e| e.to_string())?;
                    let kp = kernels::edge_kernel_closed(prev, a, x, xp)
                        .map_err(|e| e.to_string())?;
                    let lead = (m.psi_level(n - 1, x, ka).map_err(|e| e.to_string())?
                        * m.psi_level(n, xp, -ka).map_err(|e| e.to_string())?
                        - m.psi_level(n - 1, x, -ka).map_err(|e| e.to_string())?
                            * m.psi_level(n, xp, ka).map_err(|e| e.to_string())?)
                        / (crate::I * (Complex64::new(x, 0.0) - z));
                    Ok((kn.total(), kp.total(), lead))
                })();
                match pieces {
                    Ok((kn, kprev, lead)) => worst_rec.update(
                        rel_gap(kn, rho * kprev + lead),
                        format!("n={n} A={a} x={x:.3} x'={xp:.3}"),
                    ),
                    Err(e) => b.error("recursion step", e),
                }
            }
        }
    }
    b.judged("max_rel_residual", worst_rel.value, 1e-8);
    b.judged("max_deformation_gap", worst_gap.value, 1e-10);
    b.judged("max_recursion_residual", worst_rec.value, 1e-9);
    b.note(format!("worst closed-vs-direct: {}", worst_rel.tag));
    b.note(format!("worst up-vs-down: {}", worst_gap.tag));
    b.note(format!("worst recursion step: {}", worst_rec.tag));
    b.finish()
}

fn check_l4_1(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, entry.id));
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let truncations = [2.0, 5.0];
    let radii = [0.2, 0.4];
    b.grid("truncation", &truncations);
    b.grid("detour_radius", &radii);
    let qtol = cfg.quad_tol.min(1e-11);
    let mut worst_rel = Worst::default();
    let mut worst_gap = Worst::default();
    for &a in &truncations {
        for &r in &radii {
            b.contour(format!("inner detour up/down, radius {r}, truncation {a}"));
            for _ in 0..cfg.sweep_pairs {
                let x = -3.0 + 6.0 * rng.gen::<f64>();
                let xp = -3.0 + 6.0 * rng.gen::<f64>();
                let closed = match kernels::inner_kernel_closed(&m, a, x, xp) {
                    Ok(v) => v.total(),
                    Err(e) => {
                        b.error("closed kernel", e);
                        continue;
                    }
                };
                let mut directions = Vec::with_capacity(2);
                for spec in [DeformationSpec::up(r), DeformationSpec::down(r)] {
                    match kernels::inner_kernel_direct(&m, a, spec, x, xp, qtol) {
                        Ok(v) => {
                            worst_rel.update(
                                rel_gap(closed, v),
                                format!("A={a} r={r} x={x:.3} x'={xp:.3}"),
                            );
                            directions.push(v);
                        }
                        Err(e) => b.error("direct kernel", e),
                    }
                }
                if let [up, down] = directions[..] {
                    worst_gap.update((up - down).norm(), format!("A={a} r={r} x={x:.3}"));
                }
            }
        }
    }
    b.judged("max_rel_residual", worst_rel.value, 1e-8);
    b.judged("max_deformation_gap", worst_gap.value, 1e-10);
    b.note(format!("worst closed-vs-direct: {}", worst_rel.tag));
    b.finish()
}

fn check_l4_5(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, entry.id));
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let alpha = m.alpha();
    let widths = [0.2, 0.5];
    b.grid("arc_width", &widths);
    let qtol = cfg.quad_tol.min(1e-11);
    let mut worst_rel = Worst::default();
    let mut worst_side = Worst::default();
    let mut worst_residue = Worst::default();
    for &eps in &widths {
        b.contour(format!("eps arcs (both sides), width {eps}"));
        for _ in 0..cfg.sweep_pairs {
            let x = -3.0 + 6.0 * rng.gen::<f64>();
            let xp = -3.0 + 6.0 * rng.gen::<f64>();
            let closed = match kernels::inner_eps_kernel_closed(&m, eps, x, xp) {
                Ok(v) => v.total(),
                Err(e) => {
                    b.error("closed arc kernel", e);
                    continue;
                }
            };
            let mut sides = Vec::with_capacity(2);
            for sign in [ArcSign::Plus, ArcSign::Minus] {
                match kernels::inner_eps_kernel_direct(&m, eps, sign, x, xp, qtol) {
                    Ok(v) => {
                        worst_rel.update(
                            rel_gap(closed, v),
                            format!("eps={eps} x={x:.3} x'={xp:.3}"),
                        );
                        sides.push(v);
                    }
                    Err(e) => b.error("direct arc kernel", e),
                }
            }
            if let [plus, minus] = sides[..] {
                worst_side.update((plus - minus).norm(), format!("eps={eps} x={x:.3}"));
            }
        }
    }
    // The residues at the two interior singular wavenumbers cancel pairwise.
    b.contour(format!("residue circles at +-{alpha}, radius {}", 0.5 * alpha));
    for _ in 0..cfg.sweep_pairs.min(8) {
        let x = -3.0 + 6.0 * rng.gen::<f64>();
        let xp = -3.0 + 6.0 * rng.gen::<f64>();
        let pair = (|| -> Result<Complex64, String> {
            let plus = kernels::inner_residue(&m, x, xp, alpha, 0.5 * alpha, qtol)
                .map_err(|e| e.to_string())?;
            let minus = kernels::inner_residue(&m, x, xp, -alpha, 0.5 * alpha, qtol)
                .map_err(|e| e.to_string())?;
            Ok(plus + minus)
        })();
        match pair {
            Ok(sum) => worst_residue.update(sum.norm(), format!("x={x:.3} x'={xp:.3}")),
            Err(e) => b.error("residue pair", e),
        }
    }
    b.judged("max_rel_residual", worst_rel.value, 1e-8);
    b.judged("max_arc_route_gap", worst_side.value, 1e-10);
    b.judged("max_residue_pair_sum", worst_residue.value, 1e-10);
    b.note(format!("worst closed-vs-arcs: {}", worst_rel.tag));
    b.finish()
}

// --- concentration probes --------------------------------------------------

/// Record target-style probe metrics under `prefix`, aggregating into the
/// provided worst-trackers.
fn record_target_probe(
    b: &mut Builder,
    rep: &ConvergenceReport,
    tag: &str,
    final_worst: &mut Worst,
    ext_worst: &mut Worst,
    mono_worst: Option<&mut Worst>,
) {
    let last = rep.residuals.last().copied().unwrap_or(f64::NAN);
    final_worst.update(last, tag.to_string());
    ext_worst.update(rep.extrapolated_residual, tag.to_string());
    if let Some(m) = mono_worst {
        m.update(monotonicity_excess(rep), tag.to_string());
    }
    if rep.verdict == Verdict::Diverging {
        b.error(tag, "sweep classified as diverging");
    }
}

fn check_t3_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("truncation", &cfg.a_grid);
    let phis = [
        TestFunction::gaussian(0.3, 0.35),
        TestFunction::bump(0.3, 2.0),
    ];
    let mut final_worst = Worst::default();
    let mut ext_worst = Worst::default();
    let mut mono_worst = Worst::default();
    for n in 0..=2usize {
        let m = match cfg.edge_model(n) {
            Ok(m) => m,
            Err(e) => {
                b.error("edge model", e);
                return b.finish();
            }
        };
        for phi in &phis {
            b.phi(phi);
            for xp in [0.0, 0.3] {
                let tag = format!("n={n} {} x'={xp}", phi.label);
                match delta_probe(
                    &DeltaFamily::EdgeBandLimited(&m),
                    phi,
                    xp,
                    &cfg.a_grid,
                    &probe_tols(),
                    cfg.quad_tol,
                ) {
                    Ok(rep) => record_target_probe(
                        &mut b,
                        &rep,
                        &tag,
                        &mut final_worst,
                        &mut ext_worst,
                        Some(&mut mono_worst),
                    ),
                    Err(e) => b.error(&tag, e),
                }
            }
        }
    }
    // Pre-asymptotic rate: against a near-delta test function the residual
    // decays like the first power of the truncation over this grid.
    let narrow = TestFunction::gaussian(0.3, 0.01);
    b.phi(&narrow);
    match cfg.edge_model(0).map_err(|e| e.to_string()).and_then(|m| {
        delta_probe(
            &DeltaFamily::EdgeBandLimited(&m),
            &narrow,
            0.3,
            &cfg.a_grid,
            &probe_tols(),
            cfg.quad_tol,
        )
        .map_err(|e| e.to_string())
    }) {
        Ok(rep) => {
            let rate = rep.fitted_rate.unwrap_or(f64::NAN);
            b.info("narrow_fitted_rate", rate);
            b.judged("rate_deviation", (rate + 1.0).abs(), 0.3);
        }
        Err(e) => b.error("narrow-width rate sweep", e),
    }
    b.judged("final_residual_max", final_worst.value, 5e-3);
    b.judged("monotonicity_excess", mono_worst.value, 0.0);
    b.info("extrapolated_residual_max", ext_worst.value);
    b.note(format!("worst final residual: {}", final_worst.tag));
    b.finish()
}

fn check_t4_1(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("truncation", &cfg.a_grid);
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let phis = [
        TestFunction::gaussian(0.3, 0.35),
        TestFunction::bump(0.3, 2.0),
    ];
    let mut final_worst = Worst::default();
    let mut ext_worst = Worst::default();
    let mut mono_worst = Worst::default();
    for phi in &phis {
        b.phi(phi);
        for xp in [0.0, 0.3] {
            let tag = format!("{} x'={xp}", phi.label);
            match delta_probe(
                &DeltaFamily::InnerBandLimited(&m),
                phi,
                xp,
                &cfg.a_grid,
                &probe_tols(),
                cfg.quad_tol,
            ) {
                Ok(rep) => record_target_probe(
                    &mut b,
                    &rep,
                    &tag,
                    &mut final_worst,
                    &mut ext_worst,
                    Some(&mut mono_worst),
                ),
                Err(e) => b.error(&tag, e),
            }
        }
    }
    let narrow = TestFunction::gaussian(0.3, 0.01);
    b.phi(&narrow);
    match delta_probe(
        &DeltaFamily::InnerBandLimited(&m),
        &narrow,
        0.3,
        &cfg.a_grid,
        &probe_tols(),
        cfg.quad_tol,
    ) {
        Ok(rep) => {
            let rate = rep.fitted_rate.unwrap_or(f64::NAN);
            b.info("narrow_fitted_rate", rate);
            b.judged("rate_deviation", (rate + 1.0).abs(), 0.3);
        }
        Err(e) => b.error("narrow-width rate sweep", e),
    }
    b.judged("final_residual_max", final_worst.value, 5e-3);
    b.judged("monotonicity_excess", mono_worst.value, 0.0);
    b.info("extrapolated_residual_max", ext_worst.value);
    b.note(format!("worst final residual: {}", final_worst.tag));
    b.finish()
}

fn check_l3_6(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("truncation", &cfg.a_grid);
    let shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    let phis = [
        TestFunction::gaussian(0.3, 0.35),
        TestFunction::bump(0.3, 2.0),
    ];
    let mut final_worst = Worst::default();
    let mut ext_worst = Worst::default();
    for order in [1i32, 2] {
        for phi in &phis {
            b.phi(phi);
            let tag = format!("order={order} {}", phi.label);
            match delta_probe(
                &DeltaFamily::PrefactoredSinc { order, shift },
                phi,
                0.3,
                &cfg.a_grid,
                &probe_tols(),
                cfg.quad_tol,
            ) {
                Ok(rep) => record_target_probe(
                    &mut b,
                    &rep,
                    &tag,
                    &mut final_worst,
                    &mut ext_worst,
                    None,
                ),
                Err(e) => b.error(&tag, e),
            }
        }
    }
    b.judged("final_residual_max", final_worst.value, 5e-3);
    b.judged("extrapolated_residual_max", ext_worst.value, 1e-4);
    b.note(format!("worst final residual: {}", final_worst.tag));
    b.finish()
}

fn check_l3_3(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("window", &cfg.r_grid);
    let phi = TestFunction::gaussian(0.3, 0.35);
    b.phi(&phi);
    let mut final_worst = Worst::default();
    let mut ext_worst = Worst::default();
    for (n, weight) in [(0usize, 1i32), (1, 1), (1, 2)] {
        let m = match cfg.edge_model(n) {
            Ok(m) => m,
            Err(e) => {
                b.error("edge model", e);
                return b.finish();
            }
        };
        for dual in [0.7, 2.0] {
            let tag = format!("n={n} weight={weight} k'={dual}");
            match delta_probe(
                &DeltaFamily::WeightedWavenumberSinc { model: &m, weight },
                &phi,
                dual,
                &cfg.r_grid,
                &probe_tols(),
                cfg.quad_tol,
            ) {
                Ok(rep) => record_target_probe(
                    &mut b,
                    &rep,
                    &tag,
                    &mut final_worst,
                    &mut ext_worst,
                    None,
                ),
                Err(e) => b.error(&tag, e),
            }
        }
    }
    b.judged("final_residual_max", final_worst.value, 5e-3);
    b.judged("extrapolated_residual_max", ext_worst.value, 1e-4);
    b.note(format!("worst final residual: {}", final_worst.tag));
    b.finish()
}

fn check_t3_1(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("window", &cfg.r_grid);
    let phi = TestFunction::gaussian(0.3, 0.35);
    b.phi(&phi);
    let m = match cfg.edge_model(1) {
        Ok(m) => m,
        Err(e) => {
            b.error("edge model", e);
            return b.finish();
        }
    };
    let mut final_worst = Worst::default();
    let mut ext_worst = Worst::default();
    for dual in [0.7, 2.0] {
        let tag = format!("k'={dual}");
        match smeared_biorthogonality(
            &m,
            1,
            dual,
            &cfg.r_grid,
            &phi,
            &probe_tols(),
            cfg.quad_tol,
        ) {
            Ok(rep) => {
                record_target_probe(&mut b, &rep, &tag, &mut final_worst, &mut ext_worst, None)
            }
            Err(e) => b.error(&tag, e),
        }
    }
    b.judged("final_residual_max", final_worst.value, 1e-3);
    b.info("extrapolated_residual_max", ext_worst.value);
    b.note(format!("worst final residual: {}", final_worst.tag));
    b.finish()
}

fn check_t3_3(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let grid = cfg.growth_grid();
    b.grid("truncation", &grid);
    let mut final_worst = Worst::default();
    for n in [0usize, 1] {
        let m = match cfg.edge_model(n) {
            Ok(m) => m,
            Err(e) => {
                b.error("edge model", e);
                return b.finish();
            }
        };
        let tag = format!("n={n} growth 0.5, wavenumber 2, x'=3");
        match slow_growth_probe(
            &GrowthModel::Edge(&m),
            &grid,
            0.5,
            2.0,
            SupportSide::Plus,
            3.0,
            &probe_tols(),
            cfg.quad_tol,
        ) {
            Ok(rep) => {
                let last = rep.residuals.last().copied().unwrap_or(f64::NAN);
                final_worst.update(last, tag.clone());
                b.info(&format!("fitted_rate_n{n}"), rep.fitted_rate.unwrap_or(f64::NAN));
                if rep.verdict == Verdict::Diverging {
                    b.error(&tag, "sweep classified as diverging");
                }
            }
            Err(e) => b.error(&tag, e),
        }
    }
    b.judged("final_residual_max", final_worst.value, 1e-2);
    b.note("target is the windowed growth value at the probe point".to_string());
    b.finish()
}

fn check_t4_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let grid = cfg.growth_grid();
    b.grid("truncation", &grid);
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let tag = "growth 0.3, zero wavenumber, x'=-2.5";
    match slow_growth_probe(
        &GrowthModel::Inner(&m),
        &grid,
        0.3,
        0.0,
        SupportSide::Minus,
        -2.5,
        &probe_tols(),
        cfg.quad_tol,
    ) {
        Ok(rep) => {
            let last = rep.residuals.last().copied().unwrap_or(f64::NAN);
            b.judged("final_residual", last, 5e-2);
            b.judged("extrapolated_residual", rep.extrapolated_residual, 2e-2);
            b.info("fitted_rate", rep.fitted_rate.unwrap_or(f64::NAN));
            if rep.verdict == Verdict::Diverging {
                b.error(tag, "sweep classified as diverging");
            }
        }
        Err(e) => b.error(tag, e),
    }
    b.finish()
}

// --- vanishing families ----------------------------------------------------

/// Shared body of the seven width-shrinking checks: one probe, judged on
/// the extrapolated magnitude and the final raw magnitude.
fn vanishing_check(
    entry: &CatalogEntry,
    cfg: &CheckConfig,
    family: &VanishingFamily,
    gamma_claimed: f64,
) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("width", &cfg.eps_grid);
    let phi = TestFunction::gaussian(0.3, 0.4);
    b.phi(&phi);
    let tols = ProbeTolerances {
        extrapolated_residual: 1e-6,
        last_residual: 1e-4,
        ..ProbeTolerances::default()
    };
    match vanishing_probe(family, &phi, gamma_claimed, 0.3, &cfg.eps_grid, &tols, cfg.quad_tol) {
        Ok(rep) => {
            b.judged("extrapolated_magnitude", rep.extrapolated_residual, 1e-6);
            b.judged(
                "last_magnitude",
                rep.residuals.last().copied().unwrap_or(f64::NAN),
                1e-4,
            );
            b.info("fitted_rate", rep.fitted_rate.unwrap_or(f64::NAN));
            b.note(format!(
                "claimed growth exponent {gamma_claimed} (one above the family threshold)"
            ));
            if rep.verdict == Verdict::Diverging {
                b.error("width sweep", "classified as diverging");
            }
        }
        Err(e) => b.error("width sweep", e),
    }
    b.finish()
}

// --- weak boundary limits --------------------------------------------------

/// Shared body of the boundary-term checks: each family case is swept over
/// the boundary grid (both parameter signs) and judged on the decay of the
/// final value relative to the first.
fn boundary_check(
    entry: &CatalogEntry,
    cfg: &CheckConfig,
    cases: Vec<(BoundaryFamily, &TestFunction, f64, String)>,
) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    b.grid("parameter", &cfg.boundary_grid);
    let mut ratio_worst = Worst::default();
    let mut last_worst = Worst::default();
    for (family, phi, gamma, tag) in cases {
        b.phi(phi);
        match boundary_weak_limit_probe(
            &family,
            phi,
            gamma,
            &cfg.boundary_grid,
            &probe_tols(),
            cfg.quad_tol,
        ) {
            Ok(rep) => {
                let first = rep.values.first().map(|v| v.norm()).unwrap_or(f64::NAN);
                let last = rep.values.last().map(|v| v.norm()).unwrap_or(f64::NAN);
                let ratio = last / first.max(1e-300);
                ratio_worst.update(ratio, tag.clone());
                last_worst.update(last, tag);
            }
            Err(e) => b.error(&tag, e),
        }
    }
    b.judged("final_over_initial_max", ratio_worst.value, 1e-3);
    b.info("last_magnitude_max", last_worst.value);
    b.note(format!("slowest-decaying case: {}", ratio_worst.tag));
    b.finish()
}

fn check_l3_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    let phik = TestFunction::inverse_square(shift);
    let cases = vec![
        (
            BoundaryFamily::WeightedPlaneWave {
                power: 0,
                weight: 1,
                inverse_power: 1,
                shift,
                dual: 0.7,
            },
            &phik,
            0.0,
            "power 0, weight 1".to_string(),
        ),
        (
            BoundaryFamily::WeightedPlaneWave {
                power: 1,
                weight: 2,
                inverse_power: 1,
                shift,
                dual: 0.7,
            },
            &phik,
            0.0,
            "power 1, weight 2".to_string(),
        ),
    ];
    boundary_check(entry, cfg, cases)
}

fn check_c3_1(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let m1 = match cfg.edge_model(1) {
        Ok(m) => m,
        Err(e) => {
            let mut b = Builder::new(entry, cfg);
            b.error("edge model", e);
            return b.finish();
        }
    };
    let m2 = match cfg.edge_model(2) {
        Ok(m) => m,
        Err(e) => {
            let mut b = Builder::new(entry, cfg);
            b.error("edge model", e);
            return b.finish();
        }
    };
    let phig = TestFunction::gaussian(0.0, 1.0);
    let cases = vec![
        (
            BoundaryFamily::EdgeProductTail {
                model: &m1,
                term: 0,
                weight: 1,
                dual: 0.7,
            },
            &phig,
            0.0,
            "order 1, term 0, weight 1".to_string(),
        ),
        (
            BoundaryFamily::EdgeProductTail {
                model: &m2,
                term: 1,
                weight: 1,
                dual: 0.7,
            },
            &phig,
            0.0,
            "order 2, term 1, weight 1".to_string(),
        ),
        (
            BoundaryFamily::EdgeProductTail {
                model: &m2,
                term: 0,
                weight: 2,
                dual: 0.7,
            },
            &phig,
            0.0,
            "order 2, term 0, weight 2".to_string(),
        ),
    ];
    boundary_check(entry, cfg, cases)
}

fn check_l3_5(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    let phik = TestFunction::inverse_square(shift);
    let cases = vec![
        (
            BoundaryFamily::ShiftedInversePlaneWave {
                power: 1,
                inverse_power: 1,
                shift,
                dual: 0.4,
            },
            &phik,
            0.0,
            "power 1, inverse 1".to_string(),
        ),
        (
            BoundaryFamily::ShiftedInversePlaneWave {
                power: 1,
                inverse_power: 2,
                shift,
                dual: 0.4,
            },
            &phik,
            -2.0,
            "power 1, inverse 2".to_string(),
        ),
        (
            BoundaryFamily::ShiftedInversePlaneWave {
                power: 2,
                inverse_power: 1,
                shift,
                dual: 0.4,
            },
            &phik,
            0.0,
            "power 2, inverse 1".to_string(),
        ),
    ];
    boundary_check(entry, cfg, cases)
}

fn check_c3_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let m1 = match cfg.edge_model(1) {
        Ok(m) => m,
        Err(e) => {
            let mut b = Builder::new(entry, cfg);
            b.error("edge model", e);
            return b.finish();
        }
    };
    let m2 = match cfg.edge_model(2) {
        Ok(m) => m,
        Err(e) => {
            let mut b = Builder::new(entry, cfg);
            b.error("edge model", e);
            return b.finish();
        }
    };
    let phig = TestFunction::gaussian(0.0, 1.0);
    let cases = vec![
        (
            BoundaryFamily::EdgeKernelTail {
                model: &m1,
                term: 0,
                dual: 0.4,
            },
            &phig,
            0.0,
            "order 1, term 0".to_string(),
        ),
        (
            BoundaryFamily::EdgeKernelTail {
                model: &m2,
                term: 1,
                dual: 0.4,
            },
            &phig,
            -2.0,
            "order 2, term 1".to_string(),
        ),
    ];
    boundary_check(entry, cfg, cases)
}

fn check_l4_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            let mut b = Builder::new(entry, cfg);
            b.error("inner model", e);
            return b.finish();
        }
    };
    let phig = TestFunction::gaussian(0.0, 1.0);
    let cases = vec![
        (
            BoundaryFamily::GroundPlaneWave {
                model: &m,
                dual: 0.4,
            },
            &phig,
            0.0,
            "dual 0.4".to_string(),
        ),
        (
            BoundaryFamily::GroundPlaneWave {
                model: &m,
                dual: 2.0,
            },
            &phig,
            0.0,
            "dual 2.0".to_string(),
        ),
    ];
    boundary_check(entry, cfg, cases)
}

// --- envelope inequalities -------------------------------------------------

fn check_l4_4(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let alpha = m.alpha();
    let zre = m.shift().re;
    let n = cfg.scan_samples as u64;
    let slack = 1e-12;

    // Band-vs-sinc-difference defect, over log-uniform interval endpoints
    // and argument.
    let band_violation = (1..=n)
        .into_par_iter()
        .map(|i| {
            let a = log_lerp(halton(i, 2), -3.0, 1.5);
            let bfac = 1.0 + log_lerp(halton(i, 3), -3.0, 3.0);
            let bb = a * bfac;
            let mag = log_lerp(halton(i, 5), -4.0, 1.0);
            let u = if halton(i, 7) < 0.5 { -mag } else { mag };
            let band = kernels::cosine_band(a, bb, u).expect("positive endpoints");
            let sinc_diff = (bb * u).sin() / (bb * u) - (a * u).sin() / (a * u);
            (band - sinc_diff).abs() - kernels::band_sinc_defect_bound(a, u)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    b.judged("band_defect_violation", band_violation, slack);

    // Position samples: mostly broad, with a dense adversarial band around
    // the denominator's minimum near the shift's real part.
    let sample_x = |i: u64, base: u64| -> f64 {
        let t = halton(i, base);
        if i % 10 < 7 {
            zre + 80.0 * (t - 0.5)
        } else {
            zre + 4.0 * (t - 0.5)
        }
    };

    let ground_envelope = (1..=n)
        .into_par_iter()
        .map(|i| {
            let x = sample_x(i, 2);
            m.psi0(x).norm() * m.denominator(x).norm() - (2.0 * alpha).powf(1.5)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    b.judged("ground_envelope_violation", ground_envelope, slack);

    let z = m.shift();
    let ground_deviation = (1..=n)
        .into_par_iter()
        .map(|i| {
            let x = sample_x(i, 3);
            let (lhs, _) = m.psi0_deviation(x);
            let bound = (2.0 * alpha).sqrt()
                / ((Complex64::new(x, 0.0) - z).norm() * m.denominator(x).norm());
            lhs.norm() - bound
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    b.judged("ground_deviation_violation", ground_deviation, slack);

    let chain_deviation = (1..=n)
        .into_par_iter()
        .map(|i| {
            let x = sample_x(i, 5);
            let (lhs, _) = m.psi1_deviation(x);
            lhs.norm() - 1.0 / ((2.0 * alpha).sqrt() * m.denominator(x).norm())
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    b.judged("chain_deviation_violation", chain_deviation, slack);

    b.info("scan_samples", n as f64);
    b.note("violations are signed; negative means margin to spare".to_string());
    b.finish()
}

fn check_l4_3(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let alpha = m.alpha();
    let phi = TestFunction::gaussian(0.3, 0.5);
    b.phi(&phi);
    b.grid("bandwidth", &cfg.a_grid);

    // Certified envelope constant D = 2 C sup|psi0| sup|psi1|.
    let d = 2.0 * kernels::band_envelope_constant() * m.psi0_sup() * m.psi1_sup();
    b.info("envelope_constant", d);

    // Weak limit over the configured grid, plus a small-bandwidth grid where
    // the pairing is far from zero and the ceiling is informative.
    let norm = match crate::testspace::weighted_l2_norm(&phi, 0.0, phi.pairing_radius(0.25)) {
        Ok(v) => v,
        Err(e) => {
            b.error("test-function norm", e);
            return b.finish();
        }
    };
    let mut envelope_excess = Worst::default();
    let small_grid = [
        1.0 + 1.2 * alpha.max(0.5),
        2.0 + 2.0 * alpha,
        4.0 + 4.0 * alpha,
        8.0 + 8.0 * alpha,
    ];
    for (grid, label) in [(&cfg.a_grid, "configured"), (&small_grid.to_vec(), "small")] {
        match band_term_weak_limit(&m, &phi, 0.25, grid, &probe_tols(), cfg.quad_tol) {
            Ok(rep) => {
                for (a, v) in grid.iter().zip(&rep.values) {
                    let gap = a - alpha;
                    let ceiling = SQRT_2 * a * d * norm / gap.powf(1.5);
                    envelope_excess.update(v.norm() / ceiling, format!("{label} A={a}"));
                }
                if label == "configured" {
                    b.judged("remainder_extrapolated_magnitude", rep.extrapolated_residual, 1e-6);
                    b.judged(
                        "remainder_last_magnitude",
                        rep.residuals.last().copied().unwrap_or(f64::NAN),
                        1e-4,
                    );
                    if rep.verdict == Verdict::Diverging {
                        b.error("bandwidth sweep", "classified as diverging");
                    }
                }
            }
            Err(e) => b.error(&format!("{label} bandwidth sweep"), e),
        }
    }
    b.judged("envelope_excess_max", envelope_excess.value, 1.0);
    b.note(format!("largest pairing-to-ceiling ratio at {}", envelope_excess.tag));

    // Pointwise product bound |band * S| <= A D / ([1 + (A-alpha)|u|](A-alpha)),
    // scanned with a dense adversarial band at small gaps and small |u|.
    let zre = m.shift().re;
    let n = cfg.scan_samples as u64;
    let product_violation = (1..=n)
        .into_par_iter()
        .map(|i| {
            let gap = log_lerp(halton(i, 2), -3.0, 1.5);
            let a = alpha + gap;
            let mag = log_lerp(halton(i, 3), -4.0, 1.0);
            let u = if halton(i, 7) < 0.5 { -mag } else { mag };
            let xp = zre + 50.0 * (halton(i, 5) - 0.5);
            let x = xp + u;
            let band = kernels::cosine_band(a - alpha, a + alpha, u).expect("positive endpoints");
            let s = kernels::inner_sym(&m, x, xp);
            (band * s).norm() - a * d / ((1.0 + gap * u.abs()) * gap)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    b.judged("product_bound_violation", product_violation, 1e-12);
    b.info("scan_samples", n as f64);
    b.finish()
}

// --- functionals supported at infinity -------------------------------------

fn check_r3_4(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    let witness = TestFunction::inverse_square(shift);
    b.phi(&witness);
    b.grid("width", &cfg.witness_eps_grid);
    let opts = InfinityOptions {
        quad_tol: cfg.quad_tol.max(1e-11),
        ..InfinityOptions::default()
    };

    // The witness sits in the weighted class strictly below the vanishing
    // threshold of these families and strictly outside it one step above.
    match crate::testspace::membership_check(&witness, 2.5) {
        Ok(r) => b.judged(
            "witness_in_class_below_threshold",
            if r.verdict == crate::testspace::Membership::Member {
                0.0
            } else {
                1.0
            },
            0.0,
        ),
        Err(e) => b.error("membership ladder", e),
    }
    match crate::testspace::membership_check(&witness, 3.5) {
        Ok(r) => b.judged(
            "witness_outside_class_above_threshold",
            if r.verdict == crate::testspace::Membership::NonMember {
                0.0
            } else {
                1.0
            },
            0.0,
        ),
        Err(e) => b.error("membership ladder", e),
    }

    // Cube-family functional: nonzero limit, stable final pairs, carried
    // entirely by the far part.
    let cube = InfinityFunctional::WeightedSincCube { shift };
    match locality_at_infinity_check(
        &cube,
        &witness,
        0.0,
        &[10.0, 50.0],
        &cfg.witness_eps_grid,
        &probe_tols(),
        &opts,
    ) {
        Ok(loc) => {
            let full = &loc.full;
            b.judged(
                "cube_nontrivial_defect",
                if full.verdict == Verdict::NontrivialLimit {
                    0.0
                } else {
                    1.0
                },
                0.0,
            );
            b.judged("cube_inverse_limit_magnitude", 1.0 / full.extrapolated.norm(), 1e3);
            let k = full.values.len();
            let gap = if k >= 2 {
                (full.values[k - 1] - full.values[k - 2]).norm() / full.values[k - 1].norm()
            } else {
                f64::NAN
            };
            b.judged("cube_final_pair_gap_rel", gap, 1e-2);
            b.judged("cube_far_deviation_rel", loc.max_far_relative_deviation, 2e-2);
            b.judged(
                "cube_near_vanishing_defect",
                if loc.near_all_vanishing { 0.0 } else { 1.0 },
                0.0,
            );
            b.info("cube_limit_re", full.extrapolated.re);
            b.info("cube_limit_im", full.extrapolated.im);
            b.note("cube limit carried by the far part at cutoffs 10 and 50".to_string());
        }
        Err(e) => b.error("cube-family functional", e),
    }

    // Defect-family functional: same witness class.
    let defect = InfinityFunctional::WeightedSincDefect { shift };
    match infinity_functional_probe(
        &defect,
        &witness,
        0.0,
        &cfg.witness_eps_grid,
        &probe_tols(),
        &opts,
    ) {
        Ok(rep) => {
            b.judged(
                "defect_nontrivial_defect",
                if rep.verdict == Verdict::NontrivialLimit {
                    0.0
                } else {
                    1.0
                },
                0.0,
            );
            b.judged("defect_inverse_limit_magnitude", 1.0 / rep.extrapolated.norm(), 1e3);
            let k = rep.values.len();
            let gap = if k >= 2 {
                (rep.values[k - 1] - rep.values[k - 2]).norm() / rep.values[k - 1].norm()
            } else {
                f64::NAN
            };
            b.judged("defect_final_pair_gap_rel", gap, 1e-2);
            b.info("defect_limit_re", rep.extrapolated.re);
            b.info("defect_limit_im", rep.extrapolated.im);
            b.note("defect functional accepts the same inverse-square witness class".to_string());
        }
        Err(e) => b.error("defect-family functional", e),
    }

    // Compact restriction annihilates both functionals.  The restricted
    // pairing only decays like the first power of the width, so it gets a
    // longer grid than the witness sweeps (cheap: no tail summation).
    let compact_grid: Vec<f64> = (0..9).map(|j| 0.2 * 0.5f64.powi(j)).collect();
    b.grid("compact_width", &compact_grid);
    let bump = TestFunction::bump(0.2, 3.0);
    b.phi(&bump);
    let mut compact_worst = Worst::default();
    for (which, tag) in [(&cube, "cube"), (&defect, "defect")] {
        match infinity_functional_probe(
            which,
            &bump,
            0.2,
            &compact_grid,
            &probe_tols(),
            &opts,
        ) {
            Ok(rep) => {
                let last = rep.residuals.last().copied().unwrap_or(f64::NAN);
                compact_worst.update(last, tag.to_string());
                if rep.verdict != Verdict::Vanishing {
                    b.error(
                        &format!("{tag} compact restriction"),
                        format!("expected a vanishing sweep, got {:?}", rep.verdict),
                    );
                }
            }
            Err(e) => b.error(&format!("{tag} compact restriction"), e),
        }
    }
    b.judged("compact_restriction_last_magnitude", compact_worst.value, 1e-4);
    b.finish()
}

fn check_r4_2(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let m = match cfg.inner_model() {
        Ok(m) => m,
        Err(e) => {
            b.error("inner model", e);
            return b.finish();
        }
    };
    let alpha = m.alpha();
    let witness = TestFunction::odd_cosine_decay(alpha);
    b.phi(&witness);
    b.grid("width", &cfg.witness_eps_grid);
    let opts = InfinityOptions {
        quad_tol: cfg.quad_tol.max(1e-11),
        witness_freq: Some(alpha),
        ..InfinityOptions::default()
    };
    let functional = InfinityFunctional::GroundFejer(&m);
    let xp = 0.3;
    let analytic = m.psi0(xp) / (2.0 * alpha).sqrt();

    // Cutoff radii stay moderate: a resonant witness piles mass inside a
    // very wide near window, which the short width grid cannot classify.
    match locality_at_infinity_check(
        &functional,
        &witness,
        xp,
        &[8.0, 16.0],
        &cfg.witness_eps_grid,
        &probe_tols(),
        &opts,
    ) {
        Ok(loc) => {
            let full = &loc.full;
            let nontrivial = !matches!(full.verdict, Verdict::Vanishing | Verdict::Diverging)
                && full.extrapolated.norm() > 1e-3;
            if nontrivial {
                b.judged("witness_inverse_limit_magnitude", 1.0 / full.extrapolated.norm(), 1e3);
                b.judged(
                    "witness_limit_vs_ground_rel",
                    (full.extrapolated - analytic).norm() / analytic.norm(),
                    5e-2,
                );
                b.judged("witness_far_deviation_rel", loc.max_far_relative_deviation, 5e-2);
                // The compact near windows must wash out: judged by decay
                // ratio and extrapolated size rather than the categorical
                // verdict, whose final-residual gate is grid-length bound.
                let mut near_ext = Worst::default();
                let mut near_ratio = Worst::default();
                for (r, rep) in &loc.near {
                    near_ext.update(rep.extrapolated.norm(), format!("cutoff {r}"));
                    let first = rep.residuals.first().copied().unwrap_or(f64::NAN);
                    let last = rep.residuals.last().copied().unwrap_or(f64::NAN);
                    near_ratio.update(last / first.max(1e-300), format!("cutoff {r}"));
                }
                b.judged("near_extrapolated_magnitude_max", near_ext.value, 1e-3);
                b.judged("near_final_over_initial_max", near_ratio.value, 0.1);
                b.info("witness_limit_re", full.extrapolated.re);
                b.info("witness_limit_im", full.extrapolated.im);
                b.note(
                    "resonant decaying witness produces the ground-state value at the probe point"
                        .to_string(),
                );
            } else {
                // Documented open-finding branch: the searched witness did
                // not certify a nonzero limit, which is recorded rather
                // than judged.
                b.inconclusive = true;
                b.note(format!(
                    "witness search did not certify a nontrivial limit (verdict {:?}, \
                     extrapolated magnitude {:.3e}); recorded as an open finding",
                    full.verdict,
                    full.extrapolated.norm()
                ));
            }
        }
        Err(e) => {
            b.inconclusive = true;
            b.note(format!(
                "witness search failed ({e}); recorded as an open finding"
            ));
        }
    }

    // Rapid decay must still be annihilated.
    let gauss = TestFunction::gaussian(0.3, 0.4);
    b.phi(&gauss);
    match infinity_functional_probe(
        &functional,
        &gauss,
        xp,
        &cfg.witness_eps_grid,
        &probe_tols(),
        &InfinityOptions {
            witness_freq: None,
            ..opts.clone()
        },
    ) {
        Ok(rep) => {
            b.judged(
                "rapid_decay_last_magnitude",
                rep.residuals.last().copied().unwrap_or(f64::NAN),
                1e-4,
            );
            if rep.verdict != Verdict::Vanishing {
                b.error(
                    "rapid-decay restriction",
                    format!("expected a vanishing sweep, got {:?}", rep.verdict),
                );
            }
        }
        Err(e) => b.error("rapid-decay restriction", e),
    }
    b.finish()
}

// --- dispatch and suite ----------------------------------------------------

fn dispatch(entry: &CatalogEntry, cfg: &CheckConfig) -> CheckResult {
    let edge_shift = Complex64::new(cfg.edge_shift[0], cfg.edge_shift[1]);
    match entry.id {
        "L3.1" => check_l3_1(entry, cfg),
        "L3.2" => check_l3_2(entry, cfg),
        "C3.1" => check_c3_1(entry, cfg),
        "L3.3" => check_l3_3(entry, cfg),
        "T3.1" => check_t3_1(entry, cfg),
        "L3.4" => check_l3_4(entry, cfg),
        "L3.5" => check_l3_5(entry, cfg),
        "C3.2" => check_c3_2(entry, cfg),
        "L3.6" => check_l3_6(entry, cfg),
        "T3.2" => check_t3_2(entry, cfg),
        "T3.3" => check_t3_3(entry, cfg),
        "L3.7" => vanishing_check(entry, cfg, &VanishingFamily::PlainSinc, 0.0),
        "L3.8" => vanishing_check(
            entry,
            cfg,
            &VanishingFamily::WeightedFejer { shift: edge_shift },
            2.0,
        ),
        "L3.9" => vanishing_check(
            entry,
            cfg,
            &VanishingFamily::WeightedSincCube { shift: edge_shift },
            4.0,
        ),
        "L3.10" => vanishing_check(
            entry,
            cfg,
            &VanishingFamily::WeightedSincDefect { shift: edge_shift },
            4.0,
        ),
        "R3.4" => check_r3_4(entry, cfg),
        "L4.1" => check_l4_1(entry, cfg),
        "L4.2" => check_l4_2(entry, cfg),
        "L4.3" => check_l4_3(entry, cfg),
        "T4.1" => check_t4_1(entry, cfg),
        "L4.4" => check_l4_4(entry, cfg),
        "T4.2" => check_t4_2(entry, cfg),
        "L4.5" => check_l4_5(entry, cfg),
        "L4.6" | "L4.7" | "L4.8" => match cfg.inner_model() {
            Ok(m) => {
                let (family, gamma) = match entry.id {
                    "L4.6" => (VanishingFamily::GroundCosineBand(&m), 0.0),
                    "L4.7" => (VanishingFamily::SymmetrizedBand(&m), 0.0),
                    _ => (VanishingFamily::GroundFejer(&m), 2.0),
                };
                vanishing_check(entry, cfg, &family, gamma)
            }
            Err(e) => {
                let mut b = Builder::new(entry, cfg);
                b.error("inner model", e);
                b.finish()
            }
        },
        "R4.2" => check_r4_2(entry, cfg),
        other => unreachable!("dispatch called for non-runnable id {other}"),
    }
}

fn compose_result(
    entry: &CatalogEntry,
    parts: &[&'static str],
    cfg: &CheckConfig,
    pool: &BTreeMap<String, CheckResult>,
) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let mut failed = 0usize;
    let mut missing = 0usize;
    for part in parts {
        match pool.get(*part) {
            Some(r) => {
                b.note(format!("component {}: {:?}", part, r.verdict));
                match r.verdict {
                    CheckVerdict::Fail => failed += 1,
                    CheckVerdict::Inconclusive => missing += 1,
                    CheckVerdict::Pass => {}
                }
            }
            None => {
                missing += 1;
                b.note(format!("component {part} not part of this run"));
            }
        }
    }
    b.judged("components_failed", failed as f64, 0.0);
    b.info("components_total", parts.len() as f64);
    if missing > 0 && failed == 0 {
        b.inconclusive = true;
    }
    b.finish()
}

fn annotation_result(
    entry: &CatalogEntry,
    host: &'static str,
    cfg: &CheckConfig,
    pool: &BTreeMap<String, CheckResult>,
) -> CheckResult {
    let mut b = Builder::new(entry, cfg);
    let text = match entry.id {
        "R3.1" => {
            "the smearing weight exponent is a free parameter: raising it admits test \
             functions with faster wavenumber growth while the same concentration statement \
             holds"
        }
        "R3.2" => {
            "admissible slowly growing test functions close under windowed one-sided \
             combinations of power growth and plane-wave factors; the host check exercises \
             one representative"
        }
        _ => {
            "the same combination freedom holds for the interior-singularity model below \
             the unit-power growth threshold"
        }
    };
    b.note(text.to_string());
    match pool.get(host) {
        Some(r) => {
            b.note(format!("evaluated through host check {host}"));
            b.judged(
                "host_failed",
                if r.verdict == CheckVerdict::Fail { 1.0 } else { 0.0 },
                0.0,
            );
            if r.verdict == CheckVerdict::Inconclusive {
                b.inconclusive = true;
            }
        }
        None => {
            b.note(format!("host check {host} not part of this run"));
            b.inconclusive = true;
        }
    }
    b.finish()
}

/// Run a single check by id.  Composed and annotation entries run their
/// referenced checks first.
pub fn run_check(id: &str, cfg: &CheckConfig) -> Result<CheckResult, CheckError> {
    let entry = catalog_entry(id).ok_or_else(|| CheckError::UnknownId(id.to_string()))?;
    match entry.kind {
        CheckKind::Runnable => Ok(dispatch(entry, cfg)),
        CheckKind::Composed(parts) => {
            let mut pool = BTreeMap::new();
            for part in parts {
                let sub = catalog_entry(part).expect("catalog components resolve");
                pool.insert(part.to_string(), dispatch(sub, cfg));
            }
            Ok(compose_result(entry, parts, cfg, &pool))
        }
        CheckKind::Annotation(host) => {
            let sub = catalog_entry(host).expect("catalog hosts resolve");
            let mut pool = BTreeMap::new();
            pool.insert(host.to_string(), dispatch(sub, cfg));
            Ok(annotation_result(entry, host, cfg, &pool))
        }
    }
}

/// Run a list of checks: runnable entries in parallel (results merged in
/// request order), then composed and annotation entries resolved against
/// the runnable results.  Unknown ids fail up front; everything that goes
/// wrong inside a check lands in that check's result.
pub fn run_suite(ids: &[String], cfg: &CheckConfig) -> Result<Vec<CheckResult>, CheckError> {
    let entries: Vec<&CatalogEntry> = ids
        .iter()
        .map(|id| catalog_entry(id).ok_or_else(|| CheckError::UnknownId(id.clone())))
        .collect::<Result<_, _>>()?;
    let runnable: Vec<&CatalogEntry> = entries
        .iter()
        .copied()
        .filter(|e| matches!(e.kind, CheckKind::Runnable))
        .collect();
    let pool: BTreeMap<String, CheckResult> = runnable
        .par_iter()
        .map(|e| (e.id.to_string(), dispatch(e, cfg)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::with_capacity(entries.len());
    for entry in entries {
        match entry.kind {
            CheckKind::Runnable => out.push(pool.get(entry.id).expect("ran above").clone()),
            CheckKind::Composed(parts) => out.push(compose_result(entry, parts, cfg, &pool)),
            CheckKind::Annotation(host) => out.push(annotation_result(entry, host, cfg, &pool)),
        }
    }
    Ok(out)
}

/// Whether any result in the list failed (inconclusive does not count).
pub fn suite_failed(results: &[CheckResult]) -> bool {
    results.iter().any(|r| r.verdict == CheckVerdict::Fail)
}

/// Fixed-width text table, one row per result.
pub fn summary_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<7} {:<13} {:<44} {}",
        "check", "verdict", "status", "title"
    );
    for r in results {
        let status = match r.verdict {
            CheckVerdict::Pass => format!("{} metrics within ceilings", r.ceilings.len()),
            CheckVerdict::Inconclusive => "see notes".to_string(),
            CheckVerdict::Fail => match r.violations().first() {
                Some((k, v, c)) => format!("{k} = {v:.3e} > {c:.3e}"),
                None => "failed".to_string(),
            },
        };
        let verdict = match r.verdict {
            CheckVerdict::Pass => "pass",
            CheckVerdict::Fail => "FAIL",
            CheckVerdict::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "{:<7} {:<13} {:<44} {}", r.id, verdict, status, r.title);
    }
    out
}

/// Pretty-printed JSON for a result list.
pub fn results_json(results: &[CheckResult]) -> String {
    serde_json::to_string_pretty(results).expect("result serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A configuration light enough for unit tests: small scans and short
    /// grids; production ceilings are exercised by the acceptance suite.
    fn cheap() -> CheckConfig {
        CheckConfig {
            scan_samples: 2_000,
            sweep_pairs: 3,
            eps_grid: (0..5).map(|j| 0.2 * 0.5f64.powi(j)).collect(),
            ..CheckConfig::default()
        }
    }

    #[test]
    fn catalog_ids_are_unique_and_references_resolve() {
        let mut seen = std::collections::BTreeSet::new();
        for entry in CATALOG {
            assert!(seen.insert(entry.id), "duplicate id {}", entry.id);
            match entry.kind {
                CheckKind::Composed(parts) => {
                    for p in parts {
                        let sub = catalog_entry(p).expect("component resolves");
                        assert!(
                            matches!(sub.kind, CheckKind::Runnable),
                            "{} cites non-runnable {p}",
                            entry.id
                        );
                    }
                }
                CheckKind::Annotation(host) => {
                    let sub = catalog_entry(host).expect("host resolves");
                    assert!(matches!(sub.kind, CheckKind::Runnable));
                }
                CheckKind::Runnable => {}
            }
        }
        assert_eq!(CATALOG.len(), 32);
        assert_eq!(seen.len(), 32);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let cfg = cheap();
        assert!(matches!(
            run_check("L9.9", &cfg),
            Err(CheckError::UnknownId(_))
        ));
        let ids = vec!["L3.7".to_string(), "bogus".to_string()];
        assert!(matches!(
            run_suite(&ids, &cfg),
            Err(CheckError::UnknownId(_))
        ));
    }

    #[test]
    fn envelope_scan_passes_and_is_deterministic() {
        let cfg = cheap();
        let a = run_check("L4.4", &cfg).unwrap();
        let b = run_check("L4.4", &cfg).unwrap();
        assert_eq!(a.verdict, CheckVerdict::Pass, "{:?}", a.violations());
        // Bit-identical metrics: the scan is a pure function of the config.
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.rejudge(), CheckVerdict::Pass);
        assert!(a.metrics["band_defect_violation"] < 0.0);
    }

    #[test]
    fn verdicts_move_monotonically_with_ceilings() {
        // Tightening a ceiling can only flip pass to fail, never back:
        // metrics do not depend on the ceilings.
        let mut cfg = cheap();
        let base = run_check("L4.4", &cfg).unwrap();
        assert_eq!(base.verdict, CheckVerdict::Pass);
        let observed = base.metrics["ground_envelope_violation"];
        cfg.ceiling_overrides
            .entry("L4.4".to_string())
            .or_default()
            .insert("ground_envelope_violation".to_string(), observed - 1.0);
        let tightened = run_check("L4.4", &cfg).unwrap();
        assert_eq!(tightened.verdict, CheckVerdict::Fail);
        assert_eq!(tightened.metrics["ground_envelope_violation"], observed);
        // And the relieved version passes again when re-judged offline.
        let mut relieved = tightened.clone();
        relieved
            .ceilings
            .insert("ground_envelope_violation".to_string(), observed + 1.0);
        assert_eq!(relieved.rejudge(), CheckVerdict::Pass);
    }

    #[test]
    fn probe_errors_become_failed_results() {
        let cfg = CheckConfig {
            eps_grid: vec![0.2, 0.1],
            ..cheap()
        };
        let r = run_check("L3.7", &cfg).unwrap();
        assert_eq!(r.verdict, CheckVerdict::Fail);
        assert!(r.metrics["subcheck_errors"] >= 1.0);
        assert!(r.notes.iter().any(|n| n.contains("error in")));
    }

    #[test]
    fn invalid_model_parameters_fail_cleanly() {
        let cfg = CheckConfig {
            inner_alpha: -1.0,
            ..cheap()
        };
        let r = run_check("L4.4", &cfg).unwrap();
        assert_eq!(r.verdict, CheckVerdict::Fail);
        assert!(r.notes.iter().any(|n| n.contains("inner model")));
    }

    #[test]
    fn suite_preserves_order_and_resolves_compositions() {
        let mut cfg = cheap();
        // The shortened width grid cannot reach the production ceilings, so
        // relax them for this structural test (also covers the override path).
        let over = cfg.ceiling_overrides.entry("L3.7".to_string()).or_default();
        over.insert("extrapolated_magnitude".to_string(), 1.0);
        over.insert("last_magnitude".to_string(), 1.0);
        let ids: Vec<String> = ["L3.7", "R3.3", "L4.4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let results = run_suite(&ids, &cfg).unwrap();
        assert_eq!(
            results.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(),
            vec!["L3.7", "R3.3", "L4.4"]
        );
        // R3.3's components were not requested, so it cannot conclude.
        assert_eq!(results[1].verdict, CheckVerdict::Inconclusive);
        assert!(results[1].notes.iter().any(|n| n.contains("not part of this run")));
        assert!(!suite_failed(&results));
        let table = summary_table(&results);
        for id in ["L3.7", "R3.3", "L4.4"] {
            assert!(table.contains(id), "{table}");
        }
    }

    #[test]
    fn results_round_trip_through_json() {
        let cfg = cheap();
        let results = run_suite(&["L4.4".to_string()], &cfg).unwrap();
        let text = results_json(&results);
        let back: Vec<CheckResult> = serde_json::from_str(&text).unwrap();
        assert_eq!(results, back);
        assert_eq!(back[0].rejudge(), back[0].verdict);
    }

    #[test]
    #[ignore = "full production sweep; run on demand"]
    fn full_catalog_passes_under_the_default_config() {
        let cfg = CheckConfig::default();
        let results = run_suite(&default_suite_ids(), &cfg).unwrap();
        println!("{}", summary_table(&results));
        for r in &results {
            assert_ne!(
                r.verdict,
                CheckVerdict::Fail,
                "{} failed: {:?}\nnotes: {:#?}",
                r.id,
                r.violations(),
                r.notes
            );
        }
    }

    #[test]
    fn halton_points_fill_the_unit_interval() {
        // Standard radical-inverse values in bases 2 and 3.
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert_eq!(halton(1, 3), 1.0 / 3.0);
        assert_eq!(halton(2, 3), 2.0 / 3.0);
        let mut mn = 1.0f64;
        let mut mx = 0.0f64;
        for i in 1..200 {
            let t = halton(i, 5);
            mn = mn.min(t);
            mx = mx.max(t);
        }
        assert!(mn < 0.05 && mx > 0.95);
    }

    #[test]
    fn monotonicity_excess_ignores_noise_floor_rattle() {
        let rep = ConvergenceReport {
            label: "synthetic".to_string(),
            parameter_name: "A".to_string(),
            parameters: vec![1.0, 2.0, 3.0, 4.0],
            resolutions: vec![1.0, 2.0, 3.0, 4.0],
            values: vec![Complex64::new(0.0, 0.0); 4],
            residuals: vec![1e-2, 1e-3, 3e-11, 8e-11],
            target: Some(Complex64::new(0.0, 0.0)),
            extrapolated: Complex64::new(0.0, 0.0),
            extrapolated_residual: 0.0,
            fitted_rate: None,
            max_quad_error: 1e-12,
            verdict: Verdict::Vanishing,
            notes: vec![],
        };
        // The rise from 3e-11 to 8e-11 sits below the floor and is ignored.
        assert_eq!(monotonicity_excess(&rep), 0.0);
        let mut bad = rep.clone();
        bad.residuals = vec![1e-2, 2e-2, 1e-3, 1e-4];
        assert!((monotonicity_excess(&bad) - 1e-2).abs() < 1e-15);
    }
}
