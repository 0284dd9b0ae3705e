//! Pairs of pants with generalized boundary data.
//!
//! A boundary component is encoded by a single real number `lambda` in
//! `(-pi, inf)`: negative values are cone points of angle `-lambda`, zero
//! is a cusp, positive values are geodesic boundaries of length `lambda`.
//! The trace functions [`GeneralizedLength::trace`] and
//! [`GeneralizedLength::sine_trace`] interpolate the three regimes
//! continuously, which is what lets every length formula in this crate
//! treat all boundary types uniformly.

use crate::error::{Error, Result};
use crate::hyptrig::{self, ArcConfiguration};

/// Generalized boundary datum: cone angle (negated), cusp, or boundary length.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GeneralizedLength(f64);

/// Classification of a boundary component by the sign of its datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// `lambda < 0`: cone point of angle `-lambda` in `(0, pi)`.
    ConePoint,
    /// `lambda = 0`.
    Cusp,
    /// `lambda > 0`: geodesic boundary of length `lambda`.
    Geodesic,
}

impl GeneralizedLength {
    /// Admits any finite `lambda > -pi`. Cone angles of `pi` and beyond do
    /// not bound embedded pants, so they are rejected here once and for all.
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "boundary datum {lambda} is not finite"
            )));
        }
        if lambda <= -std::f64::consts::PI {
            return Err(Error::Domain(format!(
                "boundary datum {lambda} <= -pi encodes a cone angle >= pi"
            )));
        }
        Ok(Self(lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn kind(self) -> BoundaryKind {
        if self.0 < 0.0 {
            BoundaryKind::ConePoint
        } else if self.0 == 0.0 {
            BoundaryKind::Cusp
        } else {
            BoundaryKind::Geodesic
        }
    }

    /// Unified trace `m(lambda)`: `cos(|lambda|/2)` for cone points and
    /// cusps, `cosh(lambda/2)` for geodesics. Always positive, continuous
    /// across `lambda = 0`, and strictly increasing in `lambda`.
    pub fn trace(self) -> f64 {
        if self.0 <= 0.0 {
            (self.0.abs() / 2.0).cos()
        } else {
            (self.0 / 2.0).cosh()
        }
    }

    /// Unified sine trace `s(lambda)`: `sin(|lambda|/2)` for cone points
    /// and cusps, `sinh(lambda/2)` for geodesics. Nonnegative, zero exactly
    /// at the cusp, and satisfies `s^2 = |m^2 - 1|`.
    pub fn sine_trace(self) -> f64 {
        if self.0 <= 0.0 {
            (self.0.abs() / 2.0).sin()
        } else {
            (self.0 / 2.0).sinh()
        }
    }
}

/// Trace data of one boundary of a pants seen across a waist geodesic.
///
/// For a pants with boundaries `(target, companion, waist)` where the waist
/// has length `ell`, the pair `(u, v)` encodes the position of the target
/// boundary relative to the waist:
///
/// ```text
/// v = (m(target) cosh(ell/2) + m(companion)) / sinh(ell/2)
/// u = sqrt(v^2 - m(target)^2 + 1)
/// ```
///
/// `u > 1` and `v > m(target)` hold for every admissible input. `u` is
/// symmetric under swapping target and companion; `v` is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsCoefficients {
    /// Trace of the target boundary.
    pub m: f64,
    /// Sine trace of the target boundary.
    pub s: f64,
    pub u: f64,
    pub v: f64,
}

/// Coefficients of the target boundary of a pants across its waist.
pub fn coefficients(
    target: GeneralizedLength,
    companion: GeneralizedLength,
    waist: f64,
) -> Result<PantsCoefficients> {
    require_waist(waist)?;
    let m = target.trace();
    let s = target.sine_trace();
    let half = waist / 2.0;
    // cosh/sinh and 1/sinh written via tanh so no intermediate overflows:
    // for half beyond ~710, 1/sinh underflows to the correct limit 0.
    let v = m / half.tanh() + companion.trace() / half.sinh();
    let u = ((v - m) * (v + m) + 1.0).sqrt();
    Ok(PantsCoefficients { m, s, u, v })
}

/// Length of the common perpendicular between two geodesic boundaries of a
/// pants: `cosh(h) = (m1 m2 + m3) / (s1 s2)`.
///
/// `lambda1`, `lambda2` must be geodesic; the third boundary is arbitrary.
pub fn perp_between(
    lambda1: GeneralizedLength,
    lambda2: GeneralizedLength,
    lambda3: GeneralizedLength,
) -> Result<f64> {
    require_geodesic(lambda1, "lambda1")?;
    require_geodesic(lambda2, "lambda2")?;
    let rhs = (lambda1.trace() * lambda2.trace() + lambda3.trace())
        / (lambda1.sine_trace() * lambda2.sine_trace());
    // rhs - 1 >= (cosh((lambda1-lambda2)/2) - 1 + m3) / (s1 s2) > 0, so the
    // clamp below never fires on exact data.
    arccosh_or_degenerate(rhs, "perp_between")
}

/// Length of the perpendicular from a geodesic boundary back to itself,
/// separating the other two boundaries:
/// `cosh(h) = 1 + 2 (m2^2 + 2 m1 m2 m3 + m3^2) / s1^2`.
pub fn self_perp_one(
    lambda1: GeneralizedLength,
    lambda2: GeneralizedLength,
    lambda3: GeneralizedLength,
) -> Result<f64> {
    require_geodesic(lambda1, "lambda1")?;
    let (m1, m2, m3) = (lambda1.trace(), lambda2.trace(), lambda3.trace());
    let s1 = lambda1.sine_trace();
    let rhs = 1.0 + 2.0 * (m2 * m2 + 2.0 * m1 * m2 * m3 + m3 * m3) / (s1 * s1);
    arccosh_or_degenerate(rhs, "self_perp_one")
}

/// Length of the other self-perpendicular from a geodesic boundary, the one
/// whose foot pair straddles the seam between the remaining boundaries.
///
/// Determined through the auxiliary quantity `l` solving
///
/// ```text
/// sinh(lambda1/2) = l m2 sqrt(1 + l^2 m3^2) + l m3 sqrt(1 + l^2 m2^2)
/// ```
///
/// after which `h = 2 arcsinh(1/l)`. The right-hand side is strictly
/// increasing in `l`, and the root is bracketed by
/// `sinh(lambda1/4) / max(m2, m3)` and `sinh(lambda1/4) / min(m2, m3)`
/// (with equality throughout when `m2 = m3`), so bisection is exact enough
/// and never escapes the bracket.
pub fn self_perp_two(
    lambda1: GeneralizedLength,
    lambda2: GeneralizedLength,
    lambda3: GeneralizedLength,
) -> Result<f64> {
    require_geodesic(lambda1, "lambda1")?;
    let target = (lambda1.value() / 2.0).sinh();
    let (m2, m3) = (lambda2.trace(), lambda3.trace());
    let quarter = (lambda1.value() / 4.0).sinh();
    let g =
        |l: f64| l * m2 * (1.0 + l * l * m3 * m3).sqrt() + l * m3 * (1.0 + l * l * m2 * m2).sqrt();
    let mut lo = quarter / m2.max(m3);
    let mut hi = quarter / m2.min(m3);
    // Equal companions collapse the bracket to the closed-form root.
    let l = if hi - lo <= 1e-15 * hi {
        lo
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * lo {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(2.0 * l.recip().asinh())
}

/// Length of the geodesic arc between points displaced by `rho1`, `rho2`
/// along two perpendiculars to a common base geodesic whose feet are `base`
/// apart. Signs follow [`ArcConfiguration`].
pub fn arc_with_displacement(base: f64, rho1: f64, rho2: f64) -> Result<f64> {
    hyptrig::quad_diagonal(&ArcConfiguration { base, rho1, rho2 })
}

pub(crate) fn require_waist(waist: f64) -> Result<()> {
    if !(waist > 0.0) || !waist.is_finite() {
        return Err(Error::Domain(format!(
            "waist length must be positive, got {waist}"
        )));
    }
    Ok(())
}

fn require_geodesic(lambda: GeneralizedLength, name: &str) -> Result<()> {
    if lambda.kind() != BoundaryKind::Geodesic {
        return Err(Error::Domain(format!(
            "{name} must be a geodesic boundary, got datum {}",
            lambda.value()
        )));
    }
    Ok(())
}

fn arccosh_or_degenerate(rhs: f64, what: &str) -> Result<f64> {
    if !rhs.is_finite() || rhs < 1.0 - hyptrig::DOMAIN_SLACK {
        return Err(Error::DegenerateConfiguration(format!(
            "{what}: arccosh argument {rhs} <= 1"
        )));
    }
    hyptrig::stable_arccosh(rhs.max(1.0))
}
