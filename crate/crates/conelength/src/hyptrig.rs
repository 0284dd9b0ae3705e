//! Closed-form identities for right-angled hyperbolic polygons.
//!
//! Every formula here relates side lengths and angles of a small polygon
//! (tri-rectangle, right-angled pentagon or hexagon, quadrilateral with two
//! right angles, pentagon with four right angles, self-intersecting
//! pentagon). These are the elementary pieces from which all pants and
//! X-piece length formulas in the rest of the crate are assembled.
//!
//! Domain handling is uniform: an `arccosh` argument that falls below 1 by
//! at most [`DOMAIN_SLACK`] is treated as roundoff and clamped to 1; a
//! larger violation is a degenerate configuration and reported as an error.
//! `arccos` arguments get no such grace interval because both endpoints of
//! [-1, 1] correspond to genuinely degenerate polygons.

use crate::error::{Error, Result};

/// Width of the clamp interval below an `arccosh` domain boundary.
///
/// Arguments in `[1 - DOMAIN_SLACK, 1)` are pulled up to 1; anything lower
/// is rejected. Tolerates accumulated roundoff without masking genuine
/// degeneracy.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// A geodesic arc of length `base` between the feet of two perpendiculars,
/// with signed displacements `rho1`, `rho2` measured along the
/// perpendiculars (same sign = same side of the base).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcConfiguration {
    pub base: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// arccosh with explicit domain policy and full-range stability.
///
/// Uses `ln(1 + t + sqrt(t(t+2)))` with `t = x - 1`, which is accurate both
/// near 1 and at midrange, and switches to `ln 2 + ln x` once `x*x` would
/// overflow. Relative error stays below 1e-14 on the whole domain.
///
/// Errors with `Domain` if `x < 1 - DOMAIN_SLACK` or `x` is not finite.
pub fn stable_arccosh(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("arccosh argument {x} is not finite")));
    }
    if x < 1.0 - DOMAIN_SLACK {
        return Err(Error::Domain(format!(
            "arccosh argument {x} below domain [1, inf)"
        )));
    }
    if x >= 1e150 {
        // x*x would overflow; arccosh(x) = ln(2x) - 1/(4x^2) - ... and the
        // correction is below 1e-300 here.
        return Ok(std::f64::consts::LN_2 + x.ln());
    }
    let t = (x - 1.0).max(0.0);
    Ok((t + (t * (t + 2.0)).sqrt()).ln_1p())
}

/// arccosh(exp(w)) without forming exp(w); exact continuation of
/// [`stable_arccosh`] for arguments given in the log domain.
pub(crate) fn arccosh_of_exp(w: f64) -> f64 {
    if w > 700.0 {
        // arccosh(X) = ln(2X) - 1/(4X^2) - ...; for X = e^w >= e^700 the
        // correction underflows.
        return std::f64::consts::LN_2 + w;
    }
    let x = w.exp();
    stable_arccosh(x).expect("exp(w) >= 1 for w >= 0")
}

/// ln(cosh x), stable for all x.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}

/// ln(e^p + e^q) without overflow.
pub(crate) fn log_sum_exp(p: f64, q: f64) -> f64 {
    let (hi, lo) = if p >= q { (p, q) } else { (q, p) };
    hi + (lo - hi).exp().ln_1p()
}

fn require_positive(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!(
            "{name} must be positive, got {value}"
        )));
    }
    Ok(())
}

fn require_angle(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0 && value < std::f64::consts::PI) {
        return Err(Error::Domain(format!(
            "{name} must lie in (0, pi), got {value}"
        )));
    }
    Ok(())
}

/// Clamp an arccosh argument per the module domain policy, then evaluate.
fn arccosh_clamped(rhs: f64, what: &str) -> Result<f64> {
    if !rhs.is_finite() || rhs < 1.0 - DOMAIN_SLACK {
        return Err(Error::DegenerateConfiguration(format!(
            "{what}: arccosh argument {rhs} <= 1"
        )));
    }
    stable_arccosh(rhs.max(1.0))
}

/// Angle of a tri-rectangle: `cos(phi) = sinh(a) sinh(b)`.
///
/// `a`, `b` are the sides adjacent to the acute vertex. Errors with
/// `DegenerateConfiguration` when `sinh(a) sinh(b) >= 1`, i.e. when no
/// compact tri-rectangle with those sides exists.
pub fn trirectangle_angle(a: f64, b: f64) -> Result<f64> {
    require_positive(a, "side a")?;
    require_positive(b, "side b")?;
    let product = a.sinh() * b.sinh();
    if product >= 1.0 {
        return Err(Error::DegenerateConfiguration(format!(
            "sinh(a) sinh(b) = {product} >= 1 leaves no acute vertex"
        )));
    }
    Ok(product.acos())
}

/// Side opposite the non-right angle of a pentagon with four right angles:
/// `cosh(c) = -cosh(alpha) cosh(beta) cos(theta) + sinh(alpha) sinh(beta)`.
///
/// `alpha`, `beta` are the sides adjacent to the angle `theta` in (0, pi).
pub fn pentagon_opposite(alpha: f64, beta: f64, theta: f64) -> Result<f64> {
    require_positive(alpha, "side alpha")?;
    require_positive(beta, "side beta")?;
    require_angle(theta, "angle theta")?;
    let rhs = -alpha.cosh() * beta.cosh() * theta.cos() + alpha.sinh() * beta.sinh();
    arccosh_clamped(rhs, "pentagon_opposite")
}

/// The same pentagon solved for its angle:
/// `cos(theta) = sinh(a) sinh(b) cosh(c) - cosh(a) cosh(b)`.
///
/// Errors with `DegenerateConfiguration` if the right-hand side leaves
/// [-1, 1]; both endpoints are degenerate pentagons.
pub fn pentagon_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    require_positive(a, "side a")?;
    require_positive(b, "side b")?;
    require_positive(c, "side c")?;
    let rhs = a.sinh() * b.sinh() * c.cosh() - a.cosh() * b.cosh();
    if rhs.abs() >= 1.0 {
        return Err(Error::DegenerateConfiguration(format!(
            "pentagon_angle: cos(theta) = {rhs} outside (-1, 1)"
        )));
    }
    Ok(rhs.acos())
}

/// Side of a right-angled hexagon opposite the side `gamma`:
/// `cosh(c) = sinh(a) sinh(b) cosh(gamma) - cosh(a) cosh(b)`.
///
/// `a`, `b` are the sides adjacent to `c`, `gamma` the side opposite.
pub fn hexagon_side(a: f64, b: f64, gamma: f64) -> Result<f64> {
    require_positive(a, "side a")?;
    require_positive(b, "side b")?;
    require_positive(gamma, "side gamma")?;
    let rhs = a.sinh() * b.sinh() * gamma.cosh() - a.cosh() * b.cosh();
    arccosh_clamped(rhs, "hexagon_side")
}

/// Distance between the far endpoints of two perpendiculars erected on a
/// common base: `cosh(d) = cosh(rho1) cosh(rho2) cosh(base) - sinh(rho1) sinh(rho2)`.
///
/// Displacement signs follow [`ArcConfiguration`]: equal signs place both
/// endpoints on the same side of the base.
pub fn quad_diagonal(cfg: &ArcConfiguration) -> Result<f64> {
    require_positive(cfg.base, "base")?;
    if !cfg.rho1.is_finite() || !cfg.rho2.is_finite() {
        return Err(Error::Domain("displacements must be finite".into()));
    }
    let rhs =
        cfg.rho1.cosh() * cfg.rho2.cosh() * cfg.base.cosh() - cfg.rho1.sinh() * cfg.rho2.sinh();
    arccosh_clamped(rhs, "quad_diagonal")
}

/// Angle at the displaced endpoint of a quadrilateral with two right angles:
/// `cos(alpha) = -cos(beta) cosh(c) + sin(beta) sinh(c) sinh(|rho2|)`.
pub fn quad_angle(beta: f64, c: f64, rho2: f64) -> Result<f64> {
    require_angle(beta, "angle beta")?;
    require_positive(c, "side c")?;
    if !rho2.is_finite() {
        return Err(Error::Domain("displacement rho2 must be finite".into()));
    }
    let rhs = -beta.cos() * c.cosh() + beta.sin() * c.sinh() * rho2.abs().sinh();
    if rhs.abs() >= 1.0 {
        return Err(Error::DegenerateConfiguration(format!(
            "quad_angle: cos(alpha) = {rhs} outside (-1, 1)"
        )));
    }
    Ok(rhs.acos())
}

/// Base of a quadrilateral with two right angles from its two other angles
/// and the far side: `cosh(c) = -cos(alpha) cos(beta) + sin(alpha) sin(beta) cosh(d)`.
pub fn quad_base(alpha: f64, beta: f64, d: f64) -> Result<f64> {
    require_angle(alpha, "angle alpha")?;
    require_angle(beta, "angle beta")?;
    require_positive(d, "side d")?;
    let rhs = -alpha.cos() * beta.cos() + alpha.sin() * beta.sin() * d.cosh();
    arccosh_clamped(rhs, "quad_base")
}

/// Side of a pentagon with four right angles and one angle `alpha`:
/// `cosh(b) = sin(alpha) sinh(a) sinh(b') - cos(alpha) cosh(a)`.
pub fn pentagon4_side(alpha: f64, a: f64, bprime: f64) -> Result<f64> {
    require_angle(alpha, "angle alpha")?;
    require_positive(a, "side a")?;
    require_positive(bprime, "side b'")?;
    let rhs = alpha.sin() * a.sinh() * bprime.sinh() - alpha.cos() * a.cosh();
    arccosh_clamped(rhs, "pentagon4_side")
}

/// Side of a self-intersecting right-angled pentagon:
/// `sinh(c) = sin(alpha) cosh(b) cosh(c') + cosh(a) sinh(b)`.
///
/// The source identity is printed with `sinh alpha` in its first term even
/// though `alpha` is an angle there; this implementation adopts the
/// `sin(alpha)` reading, which is the one consistent with the limiting
/// cases of the surrounding quadrilateral identities.
pub fn selfpentagon_side(alpha: f64, a: f64, b: f64, cprime: f64) -> Result<f64> {
    require_angle(alpha, "angle alpha")?;
    require_positive(a, "side a")?;
    require_positive(b, "side b")?;
    require_positive(cprime, "side c'")?;
    let rhs = alpha.sin() * b.cosh() * cprime.cosh() + a.cosh() * b.sinh();
    Ok(rhs.asinh())
}
