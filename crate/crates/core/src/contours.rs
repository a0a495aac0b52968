//! Integration paths in the complex wavenumber plane.
//!
//! The resolutions of identity studied here are limits of integrals along the
//! real axis with small detours around the singular points (k = 0 for the
//! edge model, k = +-alpha for the inner one).  A contour is a chain of line
//! segments and circular arcs with machine-checked endpoint continuity;
//! integration maps each piece to a real parameter interval and reuses the
//! adaptive engine from [`crate::quad`].

use crate::quad::{adaptive, QuadConfig, QuadError};
use crate::{Complex64, I};
use serde::{Deserialize, Serialize};

/// Which way a detour avoids a singular point on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Through the upper half-plane.
    Up,
    /// Through the lower half-plane.
    Down,
}

/// Radius and side of the detours of a deformed contour.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationSpec {
    pub radius: f64,
    pub direction: Direction,
}

impl DeformationSpec {
    pub fn up(radius: f64) -> Self {
        DeformationSpec {
            radius,
            direction: Direction::Up,
        }
    }
    pub fn down(radius: f64) -> Self {
        DeformationSpec {
            radius,
            direction: Direction::Down,
        }
    }
}

/// Half-circle orientation for a shrinking arc around a singular point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcSign {
    /// Upper half-plane arc, traversed from `k0 - eps` to `k0 + eps`.
    Plus,
    /// Lower half-plane arc, traversed from `k0 - eps` to `k0 + eps`.
    Minus,
}

/// One piece of a contour.
#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    Line {
        a: Complex64,
        b: Complex64,
    },
    /// `center + radius * e^{i theta}`, theta running from `theta_start` to
    /// `theta_end` (either orientation; a full circle spans 2 pi).
    Arc {
        center: Complex64,
        radius: f64,
        theta_start: f64,
        theta_end: f64,
    },
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        match *self {
            Segment::Line { a, .. } => a,
            Segment::Arc {
                center,
                radius,
                theta_start,
                ..
            } => center + radius * Complex64::from_polar(1.0, theta_start),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { b, .. } => b,
            Segment::Arc {
                center,
                radius,
                theta_end,
                ..
            } => center + radius * Complex64::from_polar(1.0, theta_end),
        }
    }

    /// Arc length (used to share the error budget between segments).
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc {
                radius,
                theta_start,
                theta_end,
                ..
            } => radius * (theta_end - theta_start).abs(),
        }
    }

    fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { a, b } => Segment::Line { a: b, b: a },
            Segment::Arc {
                center,
                radius,
                theta_start,
                theta_end,
            } => Segment::Arc {
                center,
                radius,
                theta_start: theta_end,
                theta_end: theta_start,
            },
        }
    }
}

/// Serializable description of how a contour was built (recorded in check
/// provenance so runs can be reproduced).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Descriptor {
    Edge {
        #[serde(rename = "A")]
        a: f64,
        r: f64,
        dir: Direction,
    },
    Inner {
        #[serde(rename = "A")]
        a: f64,
        alpha: f64,
        r: f64,
        dir: Direction,
    },
    EpsArc {
        k0: f64,
        eps: f64,
        sign: ArcSign,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Custom,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ContourError {
    #[error("consecutive segments {index} and {next} do not join (gap {gap:e})", next = index + 1)]
    Discontinuous { index: usize, gap: f64 },
    #[error("invalid deformation: need 0 < r and the detour inside the contour, got r = {r}, half-width = {halfwidth}")]
    InvalidDeformation { r: f64, halfwidth: f64 },
    #[error("quadrature failed on segment {segment}: {source}")]
    Quadrature {
        segment: usize,
        #[source]
        source: QuadError,
    },
    #[error("contour must contain at least one segment")]
    Empty,
}

/// A piecewise path with verified continuity.
#[derive(Clone, Debug)]
pub struct Contour {
    segments: Vec<Segment>,
    descriptor: Descriptor,
}

impl Contour {
    /// Build a contour from segments, enforcing endpoint continuity to
    /// `1e-14` (relative to the local scale).
    pub fn new(segments: Vec<Segment>, descriptor: Descriptor) -> Result<Self, ContourError> {
        if segments.is_empty() {
            return Err(ContourError::Empty);
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let end = pair[0].end();
            let start = pair[1].start();
            let gap = (end - start).norm();
            let scale = 1.0 + end.norm() + start.norm();
            if gap > 1e-14 * scale {
                return Err(ContourError::Discontinuous { index: i, gap });
            }
        }
        Ok(Contour {
            segments,
            descriptor,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn start(&self) -> Complex64 {
        self.segments.first().expect("nonempty").start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().expect("nonempty").end()
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Contour {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(Segment::reversed)
            .collect();
        Contour {
            segments,
            descriptor: self.descriptor.clone(),
        }
    }

    /// Integrate `f` along the contour with an absolute error budget shared
    /// across segments in proportion to their length.
    pub fn integrate<F>(&self, f: F, abs_tol: f64) -> Result<Complex64, ContourError>
    where
        F: Fn(Complex64) -> Complex64,
    {
        self.integrate_hinted(f, abs_tol, None).map(|(v, _)| v)
    }

    /// Like [`Contour::integrate`], but with an oscillation hint: the
    /// integrand is assumed to oscillate like `e^{i freq s}` in arc length
    /// `s`, which seeds the initial subdivision of each segment.  Also
    /// returns the summed quadrature error estimate.
    pub fn integrate_hinted<F>(
        &self,
        f: F,
        abs_tol: f64,
        osc_freq: Option<f64>,
    ) -> Result<(Complex64, f64), ContourError>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let total_len: f64 = self.segments.iter().map(Segment::length).sum();
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (idx, seg) in self.segments.iter().enumerate() {
            let seg_tol = (abs_tol * seg.length() / total_len).max(abs_tol * 1e-3);
            let mut cfg = QuadConfig::with_tol(seg_tol);
            // Segments hugging a pole integrate to large magnitudes that
            // cancel against their neighbours, so a relative stopping rule
            // would quit with exactly the absolute error the caller asked
            // to avoid.  Contour accuracy is therefore driven by the
            // absolute budget alone.
            cfg.rel_tol = 1e-14;
            if let Some(freq) = osc_freq {
                cfg = cfg.with_oscillation(freq, seg.length());
            }
            let out = match *seg {
                Segment::Line { a, b } => {
                    let d = b - a;
                    adaptive(
                        |t: f64| f(a + d * t) * d,
                        0.0,
                        1.0,
                        &cfg,
                    )
                }
                Segment::Arc {
                    center,
                    radius,
                    theta_start,
                    theta_end,
                } => {
                    // Arcs exist to skirt a singularity at their centre, so
                    // the integrand varies on the scale of the radius and a
                    // panel spanning the whole arc produces an untrustworthy
                    // error estimate (the classic failure mode of
                    // Gauss-Kronrod estimates near poles).  Start fine.
                    cfg.initial_panels = cfg.initial_panels.max(32);
                    cfg.max_panels = cfg.max_panels.max(4 * cfg.initial_panels);
                    adaptive(
                        |th: f64| {
                            let pos = center + radius * Complex64::from_polar(1.0, th);
                            f(pos) * I * radius * Complex64::from_polar(1.0, th)
                        },
                        theta_start,
                        theta_end,
                        &cfg,
                    )
                }
            }
            .map_err(|source| ContourError::Quadrature {
                segment: idx,
                source,
            })?;
            value += out.value;
            err += out.abs_error;
        }
        Ok((value, err))
    }
}

/// Default detour radius for the edge contour.
pub fn edge_default_radius(a: f64) -> f64 {
    (0.5f64).min(a / 4.0)
}

/// Default detour radius for the inner contour.
pub fn inner_default_radius(a: f64, alpha: f64) -> f64 {
    (0.3f64).min(alpha / 2.0).min((a - alpha) / 2.0)
}

/// Real-axis path from `-A` to `A` with a semicircular detour of the given
/// radius around `k = 0`.
pub fn edge_contour(a: f64, spec: DeformationSpec) -> Result<Contour, ContourError> {
    let r = spec.radius;
    if !(r > 0.0 && r < a) {
        return Err(ContourError::InvalidDeformation { r, halfwidth: a });
    }
    let (t0, t1) = match spec.direction {
        Direction::Up => (std::f64::consts::PI, 0.0),
        Direction::Down => (std::f64::consts::PI, 2.0 * std::f64::consts::PI),
    };
    let segments = vec![
        Segment::Line {
            a: Complex64::new(-a, 0.0),
            b: Complex64::new(-r, 0.0),
        },
        Segment::Arc {
            center: Complex64::new(0.0, 0.0),
            radius: r,
            theta_start: t0,
            theta_end: t1,
        },
        Segment::Line {
            a: Complex64::new(r, 0.0),
            b: Complex64::new(a, 0.0),
        },
    ];
    Contour::new(
        segments,
        Descriptor::Edge {
            a,
            r,
            dir: spec.direction,
        },
    )
}

/// Real-axis path from `-A` to `A` with semicircular detours of the given
/// radius around both `k = -alpha` and `k = +alpha`, on the same side.
pub fn inner_contour(a: f64, alpha: f64, spec: DeformationSpec) -> Result<Contour, ContourError> {
    inner_contour_mixed(a, alpha, spec.radius, spec.direction, spec.direction)
}

/// Inner-model contour with independently chosen detour sides at `-alpha`
/// and `+alpha`; the difference between side choices isolates residues.
pub fn inner_contour_mixed(
    a: f64,
    alpha: f64,
    r: f64,
    dir_minus: Direction,
    dir_plus: Direction,
) -> Result<Contour, ContourError> {
    if !(alpha > 0.0 && a > alpha) {
        return Err(ContourError::InvalidDeformation {
            r,
            halfwidth: a - alpha,
        });
    }
    if !(r > 0.0 && r < alpha && r < a - alpha) {
        return Err(ContourError::InvalidDeformation {
            r,
            halfwidth: alpha.min(a - alpha),
        });
    }
    let thetas = |dir: Direction| match dir {
        Direction::Up => (std::f64::consts::PI, 0.0),
        Direction::Down => (std::f64::consts::PI, 2.0 * std::f64::consts::PI),
    };
    let (m0, m1) = thetas(dir_minus);
    let (p0, p1) = thetas(dir_plus);
    let segments = vec![
        Segment::Line {
            a: Complex64::new(-a, 0.0),
            b: Complex64::new(-alpha - r, 0.0),
        },
        Segment::Arc {
            center: Complex64::new(-alpha, 0.0),
            radius: r,
            theta_start: m0,
            theta_end: m1,
        },
        Segment::Line {
            a: Complex64::new(-alpha + r, 0.0),
            b: Complex64::new(alpha - r, 0.0),
        },
        Segment::Arc {
            center: Complex64::new(alpha, 0.0),
            radius: r,
            theta_start: p0,
            theta_end: p1,
        },
        Segment::Line {
            a: Complex64::new(alpha + r, 0.0),
            b: Complex64::new(a, 0.0),
        },
    ];
    // For mixed side choices the descriptor records the minus-side detour;
    // checks that mix sides record both in their metrics.
    Contour::new(
        segments,
        Descriptor::Inner {
            a,
            alpha,
            r,
            dir: dir_minus,
        },
    )
}

/// Shrinking semicircle around `k0`: runs from `k0 - eps` to `k0 + eps`
/// through the chosen half-plane.  On the upper (`Plus`) arc,
/// `int dk/(k-k0) = -i pi` and `int dk = 2 eps`.
pub fn epsilon_arc(k0: f64, eps: f64, sign: ArcSign) -> Result<Contour, ContourError> {
    if !(eps > 0.0) {
        return Err(ContourError::InvalidDeformation {
            r: eps,
            halfwidth: f64::INFINITY,
        });
    }
    let (t0, t1) = match sign {
        ArcSign::Plus => (std::f64::consts::PI, 0.0),
        ArcSign::Minus => (-std::f64::consts::PI, 0.0),
    };
    let segments = vec![Segment::Arc {
        center: Complex64::new(k0, 0.0),
        radius: eps,
        theta_start: t0,
        theta_end: t1,
    }];
    Contour::new(segments, Descriptor::EpsArc { k0, eps, sign })
}

/// Full counterclockwise circle, used as a residue extractor:
/// `(1/2 pi i) * integral` picks out the residue at an enclosed simple pole.
pub fn circle(center: Complex64, radius: f64) -> Result<Contour, ContourError> {
    assert!(radius > 0.0);
    let segments = vec![Segment::Arc {
        center,
        radius,
        theta_start: 0.0,
        theta_end: 2.0 * std::f64::consts::PI,
    }];
    Contour::new(
        segments,
        Descriptor::Circle {
            center: [center.re, center.im],
            radius,
        },
    )
}
