//! Length formulas for curve families crossing a glued waist.
//!
//! An X-piece is two pairs of pants glued along a common waist geodesic of
//! length `ell` with a twist offset `t` (measured in multiples of the full
//! waist, so `t -> t + 1` is a full Dehn twist). For each integer `n` the
//! family member `delta_n` crosses the waist once and winds `n` extra times;
//! its length depends on the four non-waist boundary data only through the
//! pants coefficients of the two sides.
//!
//! A one-holed torus glued from a single pants along two of its own cuffs
//! gets the analogous family through its interior geodesic.
//!
//! All lengths here grow linearly in `n`, so the naive formulas overflow
//! for moderate indices; every evaluator switches to a log-domain path once
//! the twist parameter is large.

use crate::error::{Error, Result};
use crate::hyptrig::{arccosh_of_exp, ln_cosh, log_sum_exp, stable_arccosh};
use crate::pants::{coefficients, require_waist, GeneralizedLength, PantsCoefficients};

/// Beyond this twist parameter the direct `cosh` evaluation risks overflow
/// and the evaluators switch to the log-domain path. Both paths are valid
/// on a wide overlap around the switch.
const LOG_DOMAIN_SWITCH: f64 = 350.0;

/// One side of an X-piece: the two non-waist boundaries of that pants.
/// `target` is the boundary the family coefficients refer to; `companion`
/// is the remaining one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsSide {
    pub target: GeneralizedLength,
    pub companion: GeneralizedLength,
}

/// Two pants glued along a waist of length `waist` with twist `twist`
/// (in multiples of the full waist length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XPieceSpec {
    pub side_a: PantsSide,
    pub side_b: PantsSide,
    pub waist: f64,
    pub twist: f64,
}

/// One pants with its two identical cuffs glued to each other, leaving the
/// boundary `boundary`; waist and twist describe the gluing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    pub waist: f64,
    pub twist: f64,
    pub boundary: GeneralizedLength,
}

fn require_twist(twist: f64) -> Result<()> {
    if !twist.is_finite() {
        return Err(Error::Domain(format!("twist must be finite, got {twist}")));
    }
    Ok(())
}

/// Precomputed coefficient products of an X-piece, for evaluating many
/// family members without redoing the per-side work.
#[derive(Debug, Clone, Copy)]
pub struct FamilyEvaluator {
    uu: f64,
    /// `v_a v_b - m_a m_b`; strictly positive (vanishes only in the
    /// infinite-waist limit, where the log path absorbs it as `ln 0`).
    offset: f64,
    waist: f64,
    twist: f64,
}

impl FamilyEvaluator {
    pub fn new(spec: &XPieceSpec) -> Result<Self> {
        require_waist(spec.waist)?;
        require_twist(spec.twist)?;
        let ca = coefficients(spec.side_a.target, spec.side_a.companion, spec.waist)?;
        let cb = coefficients(spec.side_b.target, spec.side_b.companion, spec.waist)?;
        Ok(Self {
            uu: ca.u * cb.u,
            offset: ca.v * cb.v - ca.m * cb.m,
            waist: spec.waist,
            twist: spec.twist,
        })
    }

    pub fn side_coefficients(spec: &XPieceSpec) -> Result<(PantsCoefficients, PantsCoefficients)> {
        let ca = coefficients(spec.side_a.target, spec.side_a.companion, spec.waist)?;
        let cb = coefficients(spec.side_b.target, spec.side_b.companion, spec.waist)?;
        Ok((ca, cb))
    }

    /// Length of the `n`-th family member:
    /// `cosh(l/2) = u_a u_b cosh((t + n) ell) + v_a v_b - m_a m_b`.
    ///
    /// The argument never drops below 1, so this cannot fail.
    pub fn length(&self, n: i64) -> f64 {
        let x = (self.twist + n as f64) * self.waist;
        if x.abs() <= LOG_DOMAIN_SWITCH {
            let arg = self.uu * x.cosh() + self.offset;
            2.0 * stable_arccosh(arg).expect("arg >= uu > 1")
        } else {
            let w = log_sum_exp(self.uu.ln() + ln_cosh(x), self.offset.ln());
            2.0 * arccosh_of_exp(w)
        }
    }
}

/// Length of the `n`-th member of the family crossing the waist of an
/// X-piece. See [`FamilyEvaluator::length`] for the formula.
pub fn family_length(spec: &XPieceSpec, n: i64) -> Result<f64> {
    Ok(FamilyEvaluator::new(spec)?.length(n))
}

/// Limit of `exp(l(delta_n)/2 - n ell)` as `n` grows: `u_a u_b e^{t ell}`.
///
/// Convergence is geometric with rate `e^{-2(t+n) ell}` up to a relative
/// correction `2(v_a v_b - m_a m_b) e^{-(t+n) ell} / (u_a u_b)`.
pub fn asymptotic_constant(spec: &XPieceSpec) -> Result<f64> {
    require_waist(spec.waist)?;
    require_twist(spec.twist)?;
    let ca = coefficients(spec.side_a.target, spec.side_a.companion, spec.waist)?;
    let cb = coefficients(spec.side_b.target, spec.side_b.companion, spec.waist)?;
    Ok(ca.u * cb.u * (spec.twist * spec.waist).exp())
}

/// Distance from the waist to itself across the pants of a self-glued
/// torus: `cosh(h0) = (m(boundary) + cosh^2(ell/2)) / sinh^2(ell/2)`.
///
/// Written with `tanh` so large waists neither overflow nor lose the
/// `h0 -> 0` limit.
pub fn torus_height(waist: f64, boundary: GeneralizedLength) -> Result<f64> {
    require_waist(waist)?;
    let half = waist / 2.0;
    let t = half.tanh();
    let rhs = 1.0 / (t * t) + boundary.trace() / (half.sinh() * half.sinh());
    // rhs - 1 = (m + 1)/sinh^2 > 0 always.
    stable_arccosh(rhs.max(1.0))
}

/// Length of the `n`-th member of the interior family of a one-holed
/// torus: `cosh(l/2) = cosh((t + n) ell / 2) cosh(h0 / 2)`.
pub fn torus_family_length(spec: &TorusSpec, n: i64) -> Result<f64> {
    require_waist(spec.waist)?;
    require_twist(spec.twist)?;
    let h0 = torus_height(spec.waist, spec.boundary)?;
    let factor = (h0 / 2.0).cosh();
    let x = (spec.twist + n as f64) * spec.waist / 2.0;
    if x.abs() <= LOG_DOMAIN_SWITCH {
        let arg = x.cosh() * factor;
        Ok(2.0 * stable_arccosh(arg.max(1.0))?)
    } else {
        Ok(2.0 * arccosh_of_exp(ln_cosh(x) + factor.ln()))
    }
}
