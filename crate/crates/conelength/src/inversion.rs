//! Inversion of the closed-form length formulas: twist recovery, boundary
//! recovery, and the full coordinate orchestrator.
//!
//! Each solver here inverts exactly one forward formula from
//! [`crate::xpiece`] and reports how well the data fits it. The orchestrator
//! [`recover_surface`] walks the curve manifest of [`crate::manifest`],
//! strings the solvers together, and finishes by re-simulating every length
//! it was given.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{CurveId, Error, Result};
use crate::hyptrig::stable_arccosh;
use crate::manifest::{self, BoundaryPath, FamilyKind};
use crate::pants::GeneralizedLength;
use crate::teich::{spectrum_deviation, CuffSlot, PantsDecomposition, SurfaceFN};

/// Residual ceiling for the one-dimensional twist solves.
pub const RESIDUAL_1D: f64 = 1e-10;
/// Relative residual ceiling for the linear boundary system.
pub const RESIDUAL_LINEAR: f64 = 1e-8;
/// Componentwise ceiling for end-to-end recovery and re-simulation.
pub const RESIDUAL_END_TO_END: f64 = 1e-6;

/// Switch to bisection when |coth x| is this close to 1. The closed form
/// loses its final digits exactly where the family spacing stops resolving
/// x, so both branches degrade together; the window only picks the one that
/// cannot divide by a cancelled difference.
const ARCCOTH_WINDOW: f64 = 1e-8;
/// Condition-number ceiling for the 4x4 boundary system.
const CONDITION_LIMIT: f64 = 1e12;
/// Symmetric-function residual every candidate boundary pair must meet.
const VOTING_TOLERANCE: f64 = 1e-6;
/// Relative spacing under which two polynomial roots count as one.
const ROOT_CLUSTER: f64 = 1e-8;
/// Traces this close to 1 collapse to the cusp. The trace-to-angle map has
/// a square-root singularity at 1, so noise below this window cannot be
/// resolved into a sign in the first place.
const CUSP_SNAP: f64 = 1e-9;
/// Solver inputs must keep cosh(l/2) inside double range.
const MAX_LENGTH: f64 = 1400.0;

/// Finite map from curve identifiers to observed lengths.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LengthSpectrum {
    entries: BTreeMap<CurveId, f64>,
}

impl LengthSpectrum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one observation. Lengths must be positive and finite;
    /// inserting an id twice overwrites the previous value.
    pub fn insert(&mut self, id: CurveId, length: f64) -> Result<()> {
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::Domain(format!(
                "length of {id} must be positive and finite, got {length}"
            )));
        }
        self.entries.insert(id, length);
        Ok(())
    }

    pub fn get(&self, id: &CurveId) -> Option<f64> {
        self.entries.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CurveId, f64)> + '_ {
        self.entries.iter().map(|(id, l)| (id, *l))
    }

    /// Looks up every id, reporting all absentees at once.
    pub fn require(&self, ids: &[CurveId]) -> Result<Vec<f64>> {
        let missing: Vec<CurveId> = ids
            .iter()
            .filter(|id| !self.entries.contains_key(id))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingCurves(missing));
        }
        Ok(ids.iter().map(|id| self.entries[id]).collect())
    }

    /// All indices recorded for one family, ascending.
    pub(crate) fn family_indices(&self, family: &str) -> Vec<(i64, f64)> {
        self.entries
            .iter()
            .filter(|(id, _)| id.family == family)
            .map(|(id, l)| (id.index, *l))
            .collect()
    }
}

fn require_length(name: &str, l: f64) -> Result<()> {
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::Domain(format!(
            "{name} must be a positive finite length, got {l}"
        )));
    }
    if l > MAX_LENGTH {
        return Err(Error::Domain(format!(
            "{name} = {l} exceeds {MAX_LENGTH}; cosh(l/2) leaves double range"
        )));
    }
    Ok(())
}

/// cosh(la/2) - cosh(lb/2) without cancellation.
fn half_cosh_diff(la: f64, lb: f64) -> f64 {
    2.0 * ((la + lb) / 4.0).sinh() * ((la - lb) / 4.0).sinh()
}

fn rel_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(1.0)
}

/// Solves coth(x) = y on the degenerate shoulder |y| within the window of 1.
/// coth is strictly decreasing on each half-axis, so plain bisection on the
/// attainable branch converges; if y has slipped inside (-1, 1) from noise,
/// the bracket collapses onto the far end and the residual check decides.
fn arccoth_by_bisection(y: f64) -> f64 {
    let goal = y.abs();
    let (mut lo, mut hi) = (6.0_f64, 45.0_f64);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if 1.0 / mid.tanh() > goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * y.signum()
}

/// Shared core of the twist solves: given three consecutive family lengths
/// and the family step, returns the x with
/// `(cosh(l2/2) - cosh(l1/2)) / (cosh(l1/2) - cosh(l0/2)) = sinh(x + step) / sinh(x)`.
fn solve_spacing(l0: f64, l1: f64, l2: f64, step: f64) -> Result<f64> {
    require_length("l0", l0)?;
    require_length("l1", l1)?;
    require_length("l2", l2)?;
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Domain(format!(
            "family step must be positive and finite, got {step}"
        )));
    }
    let d10 = half_cosh_diff(l1, l0);
    if d10 == 0.0 {
        return Err(Error::DegenerateInput(
            "equal leading lengths: the family is mirror-symmetric about its first gap, \
             which pins the twist at -1/2 relative to these indices"
                .into(),
        ));
    }
    let r = half_cosh_diff(l2, l1) / d10;
    let y = (r - step.cosh()) / step.sinh();
    let x = if y.abs() >= 1.0 + ARCCOTH_WINDOW {
        // arccoth via ln1p keeps full precision for huge y (x near 0).
        y.signum() * 0.5 * (2.0 / (y.abs() - 1.0)).ln_1p()
    } else if y.abs() > 1.0 - ARCCOTH_WINDOW {
        arccoth_by_bisection(y)
    } else {
        return Err(Error::InconsistentSpectrum(format!(
            "spacing ratio {r} is outside the range attained by any real twist"
        )));
    };
    let r_at = step.cosh() + step.sinh() / x.tanh();
    if rel_gap(r, r_at) > RESIDUAL_1D {
        return Err(Error::InconsistentSpectrum(format!(
            "spacing ratio residual {:.3e} exceeds {RESIDUAL_1D:.0e}",
            rel_gap(r, r_at)
        )));
    }
    Ok(x)
}

/// Twist of an X-piece from three consecutive waist-family lengths
/// l0, l1, l2 (at family indices 0, 1, 2). `x = (t + 1/2) ell`.
pub fn solve_twist(l0: f64, l1: f64, l2: f64, waist: f64) -> Result<f64> {
    crate::pants::require_waist(waist)?;
    Ok(solve_spacing(l0, l1, l2, waist)? / waist - 0.5)
}

/// Twist of a self-glued torus from three consecutive interior-family
/// lengths; the family steps by ell/2 instead of ell.
pub fn solve_torus_twist(l0: f64, l1: f64, l2: f64, waist: f64) -> Result<f64> {
    crate::pants::require_waist(waist)?;
    let step = waist / 2.0;
    Ok(solve_spacing(l0, l1, l2, step)? / step - 0.5)
}

/// Maps a recovered boundary trace to its generalized length:
/// (0, 1) is a cone point, 1 the cusp, above 1 a geodesic.
pub fn trace_to_length(u: f64) -> Result<GeneralizedLength> {
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::InconsistentSpectrum(format!(
            "boundary trace must be positive, got {u}"
        )));
    }
    if (u - 1.0).abs() <= CUSP_SNAP {
        return GeneralizedLength::new(0.0);
    }
    if u > 1.0 {
        GeneralizedLength::new(2.0 * stable_arccosh(u)?)
    } else {
        GeneralizedLength::new(-2.0 * u.acos())
    }
}

/// Boundary datum of a self-glued torus from the waist length, the length
/// of the interior family member at index 0, and the recovered twist.
///
/// Strips the twist first (`cosh(h0/2) = cosh(lbeta0/2) / cosh(t ell / 2)`),
/// then inverts `trace = cosh(h0) sinh^2(ell/2) - cosh^2(ell/2)`, evaluated
/// as `(cosh(h0) - 1) sinh^2(ell/2) - 1` so large waists do not cancel.
pub fn recover_torus_angle(lgamma: f64, lbeta0: f64, t: f64) -> Result<GeneralizedLength> {
    crate::pants::require_waist(lgamma)?;
    require_length("lbeta0", lbeta0)?;
    if !t.is_finite() {
        return Err(Error::Domain(format!("twist must be finite, got {t}")));
    }
    let q = crate::hyptrig::ln_cosh(lbeta0 / 2.0) - crate::hyptrig::ln_cosh(t * lgamma / 2.0);
    if q < -1e-12 {
        return Err(Error::InconsistentSpectrum(
            "family length falls below the untwisted floor".into(),
        ));
    }
    // cosh(h0) - 1 = 2 (cosh(h0/2) - 1)(cosh(h0/2) + 1)
    let ch2m1 = q.max(0.0).exp_m1();
    let coshm1_h0 = 2.0 * ch2m1 * (ch2m1 + 2.0);
    let s = (lgamma / 2.0).sinh();
    let rhs = coshm1_h0 * s * s - 1.0;
    if !rhs.is_finite() {
        return Err(Error::Domain(
            "boundary trace overflows double range".into(),
        ));
    }
    if rhs <= 0.0 {
        // rhs in (-1, 0] would put the cone angle at or beyond a straight
        // angle, outside the admissible range; rhs <= -1 fits no boundary
        // at all. Neither yields a representable datum.
        return Err(Error::InconsistentSpectrum(format!(
            "recovered boundary trace {rhs} is not admissible"
        )));
    }
    trace_to_length(rhs)
}

/// One row of the boundary-recovery system: an X-piece with known waist and
/// twist whose family lengths at indices 0 and 1 were observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcObservation {
    pub waist: f64,
    pub twist: f64,
    pub l_delta: f64,
    pub l_delta1: f64,
}

/// Elementary symmetric data of the two hidden boundary factors:
/// with B = 2 u m3 and C = u^2 + m3^2 - 1 per side,
/// s = B + B', t = C + C' + B B', q = B C' + B' C, p = C C'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcUnknowns {
    pub s: f64,
    pub t: f64,
    pub q: f64,
    pub p: f64,
}

impl BcObservation {
    /// The waist-free side product `(u_a u_b)^2 sinh^4(ell/2)`, read off the
    /// two observed lengths:
    /// `(cosh(l1/2) - cosh(l0/2))^2 sinh^4(ell/2) / (cosh(t ell + ell) - cosh(t ell))^2`,
    /// with both differences in product form.
    fn lhs(&self) -> Result<f64> {
        crate::pants::require_waist(self.waist)?;
        if !self.twist.is_finite() {
            return Err(Error::Domain(format!(
                "row twist must be finite, got {}",
                self.twist
            )));
        }
        require_length("l_delta", self.l_delta)?;
        require_length("l_delta1", self.l_delta1)?;
        let denom = ((self.twist + 0.5) * self.waist).sinh();
        if denom == 0.0 {
            return Err(Error::DegenerateInput(
                "row twist -1/2 annihilates the family difference".into(),
            ));
        }
        let sum = ((self.l_delta1 + self.l_delta) / 4.0).sinh();
        let diff = ((self.l_delta1 - self.l_delta) / 4.0).sinh();
        let half = (self.waist / 2.0).sinh();
        let root = sum * diff * half / denom;
        Ok(root * root)
    }
}

/// 4x4 partial-pivot LU; pivots below 1e-300 mean a structurally singular
/// system (repeated nodes).
struct Lu4 {
    lu: [[f64; 4]; 4],
    perm: [usize; 4],
}

fn lu_factor(m: &[[f64; 4]; 4]) -> Option<Lu4> {
    let mut lu = *m;
    let mut perm = [0usize, 1, 2, 3];
    for col in 0..4 {
        let mut best = col;
        for row in col + 1..4 {
            if lu[row][col].abs() > lu[best][col].abs() {
                best = row;
            }
        }
        if lu[best][col].abs() < 1e-300 {
            return None;
        }
        lu.swap(col, best);
        perm.swap(col, best);
        for row in col + 1..4 {
            let factor = lu[row][col] / lu[col][col];
            lu[row][col] = factor;
            for k in col + 1..4 {
                lu[row][k] -= factor * lu[col][k];
            }
        }
    }
    Some(Lu4 { lu, perm })
}

impl Lu4 {
    fn solve(&self, b: &[f64; 4]) -> [f64; 4] {
        let mut y = [0.0; 4];
        for i in 0..4 {
            let mut acc = b[self.perm[i]];
            for k in 0..i {
                acc -= self.lu[i][k] * y[k];
            }
            y[i] = acc;
        }
        let mut x = [0.0; 4];
        for i in (0..4).rev() {
            let mut acc = y[i];
            for k in i + 1..4 {
                acc -= self.lu[i][k] * x[k];
            }
            x[i] = acc / self.lu[i][i];
        }
        x
    }
}

fn mat_vec(m: &[[f64; 4]; 4], x: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (0..4).map(|k| m[i][k] * x[k]).sum();
    }
    out
}

fn inf_norm_rows(m: &[[f64; 4]; 4]) -> f64 {
    (0..4)
        .map(|i| (0..4).map(|k| m[i][k].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Infinity-norm condition number via the explicit inverse.
fn condition_number(m: &[[f64; 4]; 4], lu: &Lu4) -> f64 {
    let mut inv = [[0.0; 4]; 4];
    for col in 0..4 {
        let mut e = [0.0; 4];
        e[col] = 1.0;
        let x = lu.solve(&e);
        for row in 0..4 {
            inv[row][col] = x[row];
        }
    }
    inf_norm_rows(m) * inf_norm_rows(&inv)
}

/// Solves `lhs_k = c_k^4 + s c_k^3 + t c_k^2 + q c_k + p` for the four
/// symmetric unknowns, `c_k = cosh(ell_k / 2)`.
pub(crate) fn solve_bc_from_nodes(c: [f64; 4], lhs: [f64; 4]) -> Result<BcUnknowns> {
    let mut m = [[0.0; 4]; 4];
    let mut b = [0.0; 4];
    for k in 0..4 {
        m[k] = [c[k] * c[k] * c[k], c[k] * c[k], c[k], 1.0];
        b[k] = lhs[k] - c[k] * c[k] * c[k] * c[k];
    }
    let lu = lu_factor(&m).ok_or_else(|| {
        Error::SingularSystem("repeated half-length node in the boundary system".into())
    })?;
    let cond = condition_number(&m, &lu);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::SingularSystem(format!(
            "boundary system condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )));
    }
    let mut x = lu.solve(&b);
    // One step of iterative refinement keeps the residual at rounding level
    // even when the nodes are unevenly spread.
    let r0 = mat_vec(&m, &x);
    let correction = lu.solve(&[b[0] - r0[0], b[1] - r0[1], b[2] - r0[2], b[3] - r0[3]]);
    for i in 0..4 {
        x[i] += correction[i];
    }
    let r = mat_vec(&m, &x);
    let bscale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let residual = (0..4).map(|i| (r[i] - b[i]).abs()).fold(0.0, f64::max) / bscale;
    if residual > RESIDUAL_LINEAR {
        return Err(Error::InconsistentSpectrum(format!(
            "boundary system residual {residual:.3e} exceeds {RESIDUAL_LINEAR:.0e}"
        )));
    }
    Ok(BcUnknowns {
        s: x[0],
        t: x[1],
        q: x[2],
        p: x[3],
    })
}

/// Extracts the symmetric unknowns of the two hidden boundary factors from
/// four observations at distinct waists.
pub fn solve_bc_system(rows: &[BcObservation; 4]) -> Result<BcUnknowns> {
    let mut c = [0.0; 4];
    let mut lhs = [0.0; 4];
    for (k, row) in rows.iter().enumerate() {
        c[k] = (row.waist / 2.0).cosh();
        lhs[k] = row.lhs()?;
    }
    solve_bc_from_nodes(c, lhs)
}

fn symmetric_functions(u: f64, up: f64, m3: f64, m3p: f64) -> (f64, f64, f64, f64) {
    let b = 2.0 * u * m3;
    let bp = 2.0 * up * m3p;
    let c = u * u + m3 * m3 - 1.0;
    let cp = up * up + m3p * m3p - 1.0;
    (b + bp, c + cp + b * bp, b * cp + bp * c, c * cp)
}

/// Real roots of a cubic `z^3 + p z^2 + q z + r`, Newton-polished.
fn cubic_real_roots(p: f64, q: f64, r: f64) -> Vec<f64> {
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let shift = p / 3.0;
    let mut roots = Vec::with_capacity(3);
    let disc = 0.25 * b * b + a * a * a / 27.0;
    if a == 0.0 && b == 0.0 {
        roots.push(0.0);
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        roots.push((-0.5 * b + sq).cbrt() + (-0.5 * b - sq).cbrt());
    } else {
        // three real roots: a < 0 here
        let m = 2.0 * (-a / 3.0).sqrt();
        let cos3 = (-b / (2.0 * (-a / 3.0).powi(3).sqrt())).clamp(-1.0, 1.0);
        let phi = cos3.acos();
        for k in 0..3 {
            roots.push(m * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos());
        }
    }
    let coeffs = [1.0, p, q, r];
    roots
        .into_iter()
        .map(|w| polish(&coeffs, w - shift))
        .collect()
}

/// Horner evaluation of a polynomial and its derivative, leading first.
fn horner_fd(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut f = 0.0;
    let mut df = 0.0;
    for &c in coeffs {
        df = df * x + f;
        f = f * x + c;
    }
    (f, df)
}

fn polish(coeffs: &[f64], x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let (f, df) = horner_fd(coeffs, x);
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Real roots of `a x^2 + b x + c` with the usual cancellation-free split;
/// slightly negative discriminants collapse to the double root.
fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(1e-300);
    if disc < -1e-12 * scale {
        return vec![];
    }
    if disc <= 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let qv = -0.5 * (b + b.signum() * sq);
    if qv == 0.0 {
        return vec![0.0, -b / a];
    }
    vec![qv / a, c / qv]
}

/// Real roots of a quartic, leading coefficient first. Ferrari resolvent
/// plus a biquadratic shortcut, then Newton polish against the original.
fn quartic_real_roots(coeffs: [f64; 5]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    if scale == 0.0 {
        return vec![];
    }
    if coeffs[0].abs() <= 1e-14 * scale {
        if coeffs[1].abs() <= 1e-14 * scale {
            return vec![];
        }
        return cubic_real_roots(
            coeffs[2] / coeffs[1],
            coeffs[3] / coeffs[1],
            coeffs[4] / coeffs[1],
        );
    }
    let a = coeffs[1] / coeffs[0];
    let b = coeffs[2] / coeffs[0];
    let c = coeffs[3] / coeffs[0];
    let d = coeffs[4] / coeffs[0];
    // depressed form y = x + a/4: y^4 + alpha y^2 + beta y + gamma
    let a2 = a * a;
    let alpha = b - 3.0 * a2 / 8.0;
    let beta = c - 0.5 * a * b + a2 * a / 8.0;
    let gamma = d - 0.25 * a * c + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let yscale = alpha.abs().max(beta.abs()).max(gamma.abs()).max(1.0);
    let mut ys = Vec::with_capacity(4);
    if beta.abs() <= 1e-12 * yscale {
        for z in quadratic_real_roots(1.0, alpha, gamma) {
            if z >= -1e-12 * yscale {
                let root = z.max(0.0).sqrt();
                ys.push(root);
                ys.push(-root);
            }
        }
    } else {
        let zs = cubic_real_roots(2.0 * alpha, alpha * alpha - 4.0 * gamma, -beta * beta);
        let zstar = zs.into_iter().fold(f64::NEG_INFINITY, f64::max);
        if !(zstar > 0.0) {
            return vec![];
        }
        let w = zstar.sqrt();
        let t1 = 0.5 * (alpha + zstar);
        let sterm = beta / (2.0 * w);
        ys.extend(quadratic_real_roots(1.0, -w, t1 + sterm));
        ys.extend(quadratic_real_roots(1.0, w, t1 - sterm));
    }
    let mut xs: Vec<f64> = ys
        .into_iter()
        .map(|y| polish(&coeffs, y - a / 4.0))
        .filter(|x| x.is_finite())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|x, keep| (*x - *keep).abs() <= ROOT_CLUSTER * keep.abs().max(1.0));
    xs
}

/// Candidate (side A, side B) trace pairs fitting all four symmetric
/// functions, best residual first. Exactly one unordered pair survives on
/// success; both of its orientations are returned when both fit, so callers
/// holding side information can pick.
pub(crate) fn recover_cone_candidates(
    unknowns: &BcUnknowns,
    m3: f64,
    m3p: f64,
) -> Result<Vec<(f64, f64)>> {
    for (name, m) in [("m3", m3), ("m3p", m3p)] {
        if !m.is_finite() || m < 1.0 {
            return Err(Error::Domain(format!(
                "{name} must be the trace of a geodesic or cusp companion (>= 1), got {m}"
            )));
        }
    }
    // u' = e + a u from the trace sum, then the product equation becomes a
    // quartic in u alone.
    let a = -m3 / m3p;
    let e = unknowns.s / (2.0 * m3p);
    let c3 = m3 * m3 - 1.0;
    let c3p = m3p * m3p - 1.0;
    let roots = quartic_real_roots([
        a * a,
        2.0 * a * e,
        e * e + c3p + c3 * a * a,
        2.0 * a * e * c3,
        c3 * (e * e + c3p) - unknowns.p,
    ]);
    let mut sided: Vec<(f64, f64, f64)> = Vec::new();
    for u in roots {
        if u <= 1e-12 {
            continue;
        }
        let up = e + a * u;
        if up <= 1e-12 {
            continue;
        }
        let (sh, th, qh, ph) = symmetric_functions(u, up, m3, m3p);
        let worst = rel_gap(unknowns.s, sh)
            .max(rel_gap(unknowns.t, th))
            .max(rel_gap(unknowns.q, qh))
            .max(rel_gap(unknowns.p, ph));
        if worst <= VOTING_TOLERANCE {
            sided.push((u, up, worst));
        }
    }
    sided.sort_by(|l, r| l.2.total_cmp(&r.2));
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    for cand in sided {
        let dup = kept.iter().any(|k| {
            (k.0 - cand.0).abs() <= ROOT_CLUSTER * k.0.max(1.0)
                && (k.1 - cand.1).abs() <= ROOT_CLUSTER * k.1.max(1.0)
        });
        if !dup {
            kept.push(cand);
        }
    }
    if kept.is_empty() {
        return Err(Error::InconsistentSpectrum(
            "no boundary pair reproduces the four symmetric functions".into(),
        ));
    }
    // Distinct unordered pairs mean the data genuinely underdetermines the
    // boundaries; swapped orientations of one pair do not.
    let mut unordered: Vec<(f64, f64)> = Vec::new();
    for k in &kept {
        let (lo, hi) = if k.0 <= k.1 { (k.0, k.1) } else { (k.1, k.0) };
        let dup = unordered.iter().any(|&(a0, b0)| {
            (a0 - lo).abs() <= ROOT_CLUSTER * a0.max(1.0)
                && (b0 - hi).abs() <= ROOT_CLUSTER * b0.max(1.0)
        });
        if !dup {
            unordered.push((lo, hi));
        }
    }
    if unordered.len() > 1 {
        let pairs = unordered
            .iter()
            .map(|&(u, up)| {
                let la = trace_to_length(u)?;
                let lb = trace_to_length(up)?;
                Ok((la.value(), lb.value()))
            })
            .collect::<Result<Vec<_>>>()?;
        return Err(Error::AmbiguousRecovery(pairs));
    }
    Ok(kept.into_iter().map(|k| (k.0, k.1)).collect())
}

/// Recovers the two hidden boundary data of an X-piece from the symmetric
/// unknowns and the traces of its two known geodesic boundaries. Returned
/// in ascending order; the observations cannot tell the sides apart.
pub fn recover_cone_pair(
    unknowns: &BcUnknowns,
    m3: f64,
    m3p: f64,
) -> Result<(GeneralizedLength, GeneralizedLength)> {
    let (u, up) = recover_cone_candidates(unknowns, m3, m3p)?[0];
    let la = trace_to_length(u)?;
    let lb = trace_to_length(up)?;
    Ok(if la.value() <= lb.value() {
        (la, lb)
    } else {
        (lb, la)
    })
}

/// Maximal non-peripheral curve count the recovery orchestrator may request.
pub fn curve_budget(g: usize, n: usize) -> Result<usize> {
    const EXCEPTIONAL: [(usize, usize); 7] =
        [(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 0)];
    if EXCEPTIONAL.contains(&(g, n)) {
        return Err(Error::ExceptionalSurface(g, n));
    }
    Ok(12 * g + 32 * n - 12)
}

/// Finds three consecutive indices in one family, preferring the earliest
/// complete window; reports the gaps of the best near-window otherwise.
pub(crate) fn family_window(spectrum: &LengthSpectrum, family: &str) -> Result<(i64, [f64; 3])> {
    let found = spectrum.family_indices(family);
    let by_index: BTreeMap<i64, f64> = found.iter().copied().collect();
    for (&i, &l0) in &by_index {
        if let (Some(&l1), Some(&l2)) = (by_index.get(&(i + 1)), by_index.get(&(i + 2))) {
            return Ok((i, [l0, l1, l2]));
        }
    }
    // No complete window: name the absentees of the densest candidate.
    let (mut best_start, mut best_hits) = (-1i64, 0usize);
    if let (Some(&lo), Some(&hi)) = (by_index.keys().next(), by_index.keys().next_back()) {
        for start in lo - 2..=hi {
            let hits = (0..3)
                .filter(|k| by_index.contains_key(&(start + k)))
                .count();
            if hits > best_hits {
                best_hits = hits;
                best_start = start;
            }
        }
    }
    let missing: Vec<CurveId> = (0..3)
        .filter(|k| !by_index.contains_key(&(best_start + k)))
        .map(|k| CurveId::new(family, best_start + k))
        .collect();
    Err(Error::MissingCurves(missing))
}

fn cuff_trace(lengths: &[f64], curve: usize) -> f64 {
    GeneralizedLength::new(lengths[curve])
        .expect("positive curve length is an admissible datum")
        .trace()
}

/// Recovers full coordinates (boundary data, lengths, twists) on a given
/// pants decomposition from a length spectrum over its curve manifest.
///
/// Lengths are read directly; twists come from the three-term families;
/// boundary data come from the four-row system (or the torus shortcut).
/// The result is re-simulated against everything the spectrum contains.
pub fn recover_surface(
    decomposition: &PantsDecomposition,
    spectrum: &LengthSpectrum,
) -> Result<SurfaceFN> {
    let families = manifest::family_structures(decomposition);
    let bounds = manifest::boundary_structures(decomposition)?;
    let budget = curve_budget(decomposition.genus, decomposition.boundary_count)?;
    let requested = 4 * families.len()
        + 8 * bounds
            .iter()
            .filter(|b| matches!(b.path, BoundaryPath::Cross { .. }))
            .count();
    if requested > budget {
        return Err(Error::UnsupportedTopology(format!(
            "recovery would request {requested} curves, over the budget of {budget}"
        )));
    }

    // Presence pre-pass: report every absentee at once.
    let mut missing: Vec<CurveId> = Vec::new();
    for fs in &families {
        let gid = manifest::gamma_id(fs.curve);
        if spectrum.get(&gid).is_none() {
            missing.push(gid);
        }
        if let Err(Error::MissingCurves(ids)) =
            family_window(spectrum, &manifest::family_name(fs.curve))
        {
            missing.extend(ids);
        }
    }
    for bs in &bounds {
        if let BoundaryPath::Cross { .. } = bs.path {
            for k in 0..4 {
                for i in 0..2 {
                    let id = manifest::bc_id(bs.boundary, k, i);
                    if spectrum.get(&id).is_none() {
                        missing.push(id);
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::MissingCurves(missing));
    }

    let lengths: Vec<f64> = (0..decomposition.curve_count())
        .map(|j| spectrum.get(&manifest::gamma_id(j)).expect("prechecked"))
        .collect();

    // Twists: independent one-dimensional solves, one per curve.
    let twists: Vec<f64> = families
        .par_iter()
        .map(|fs| {
            let (i0, [l0, l1, l2]) = family_window(spectrum, &manifest::family_name(fs.curve))?;
            let t_rel = match fs.kind {
                FamilyKind::SelfGlued { .. } => solve_torus_twist(l0, l1, l2, lengths[fs.curve])?,
                FamilyKind::Cross { .. } => solve_twist(l0, l1, l2, lengths[fs.curve])?,
            };
            Ok(t_rel - i0 as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    // Boundary data; assignments may be cross-checked by later units.
    fn assign(
        slot: &mut Option<GeneralizedLength>,
        boundary: usize,
        lam: GeneralizedLength,
    ) -> Result<()> {
        match slot {
            None => {
                *slot = Some(lam);
                Ok(())
            }
            Some(prev) => {
                if (prev.value() - lam.value()).abs()
                    <= RESIDUAL_END_TO_END * prev.value().abs().max(1.0)
                {
                    Ok(())
                } else {
                    Err(Error::InconsistentSpectrum(format!(
                        "boundary {boundary} recovered twice with values {} and {}",
                        prev.value(),
                        lam.value()
                    )))
                }
            }
        }
    }
    let mut recovered: Vec<Option<GeneralizedLength>> = vec![None; decomposition.boundary_count];
    for bs in &bounds {
        match bs.path {
            BoundaryPath::Torus { curve } => {
                let (i0, [l0, _, _]) = family_window(spectrum, &manifest::family_name(curve))?;
                let lam = recover_torus_angle(lengths[curve], l0, twists[curve] + i0 as f64)?;
                assign(&mut recovered[bs.boundary], bs.boundary, lam)?;
            }
            BoundaryPath::Cross {
                anchor,
                companion,
                partner_target,
            } => {
                let waists = manifest::bc_row_waists(lengths[anchor]);
                let mut rows = [BcObservation {
                    waist: 0.0,
                    twist: 0.0,
                    l_delta: 0.0,
                    l_delta1: 0.0,
                }; 4];
                for (k, row) in rows.iter_mut().enumerate() {
                    *row = BcObservation {
                        waist: waists[k],
                        twist: manifest::BC_ROW_TWISTS[k],
                        l_delta: spectrum
                            .get(&manifest::bc_id(bs.boundary, k, 0))
                            .expect("prechecked"),
                        l_delta1: spectrum
                            .get(&manifest::bc_id(bs.boundary, k, 1))
                            .expect("prechecked"),
                    };
                }
                let unknowns = solve_bc_system(&rows)?;
                let m3 = cuff_trace(&lengths, companion);
                let m3p = manifest::bc_far_companion(m3).trace();
                let candidates = recover_cone_candidates(&unknowns, m3, m3p)?;
                let (u, up) = match partner_target {
                    CuffSlot::Curve(i) => {
                        // The far target is a known cuff: orient by it, then
                        // insist it actually matches.
                        let want = cuff_trace(&lengths, i);
                        let best = candidates
                            .iter()
                            .copied()
                            .min_by(|l, r| rel_gap(want, l.1).total_cmp(&rel_gap(want, r.1)))
                            .expect("candidate list is nonempty");
                        if rel_gap(want, best.1) > RESIDUAL_END_TO_END {
                            return Err(Error::InconsistentSpectrum(format!(
                                "far cuff trace {want} is not reproduced by the boundary \
                                 system (best candidate {})",
                                best.1
                            )));
                        }
                        best
                    }
                    CuffSlot::Boundary(_) => candidates[0],
                };
                assign(
                    &mut recovered[bs.boundary],
                    bs.boundary,
                    trace_to_length(u)?,
                )?;
                if let CuffSlot::Boundary(bp) = partner_target {
                    assign(&mut recovered[bp], bp, trace_to_length(up)?)?;
                }
            }
        }
    }
    let boundaries: Vec<GeneralizedLength> = recovered
        .into_iter()
        .enumerate()
        .map(|(b, lam)| {
            lam.ok_or_else(|| {
                Error::UnsupportedTopology(format!("no recovery path reached boundary {b}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let surface = SurfaceFN::new(decomposition.clone(), boundaries, lengths, twists)?;
    let deviation = spectrum_deviation(&surface, spectrum)?;
    if deviation > RESIDUAL_END_TO_END {
        return Err(Error::InconsistentSpectrum(format!(
            "re-simulation deviates from the observations by {deviation:.3e} \
             (limit {RESIDUAL_END_TO_END:.0e})"
        )));
    }
    Ok(surface)
}
