//! Whole-surface Fenchel-Nielsen coordinates: pants decompositions, the
//! cusp-replacement map, length-comparison constants and their verification,
//! Thurston-distance estimation over finite curve sets, and twist-limit
//! diagnostics.

use crate::error::{CurveId, Error, Result};
use crate::hyptrig::ln_cosh;
use crate::inversion::LengthSpectrum;
use crate::manifest::{self, BoundaryPath, BoundaryStructure, FamilyKind, FamilyStructure};
use crate::pants::{BoundaryKind, GeneralizedLength};
use crate::xpiece::{
    family_length, torus_family_length, torus_height, FamilyEvaluator, PantsSide, TorusSpec,
    XPieceSpec,
};

/// One cuff slot of a pair of pants: either a surface boundary or an
/// interior decomposition curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CuffSlot {
    Boundary(usize),
    Curve(usize),
}

const EXCEPTIONAL: [(usize, usize); 7] = [(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 0)];

/// Combinatorics of a pants decomposition: 2g-2+n pants glued along
/// 3g-3+n interior curves, with n boundary cuffs left open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PantsDecomposition {
    pub genus: usize,
    pub boundary_count: usize,
    pub pants: Vec<[CuffSlot; 3]>,
}

impl PantsDecomposition {
    /// Validates the full set of structural invariants: non-exceptional
    /// type, correct pants and curve counts, every curve on exactly two
    /// cuffs, every boundary on exactly one, and a connected gluing graph.
    pub fn new(genus: usize, boundary_count: usize, pants: Vec<[CuffSlot; 3]>) -> Result<Self> {
        if EXCEPTIONAL.contains(&(genus, boundary_count)) {
            return Err(Error::ExceptionalSurface(genus, boundary_count));
        }
        let curves = 3 * genus + boundary_count - 3;
        let want_pants = 2 * genus + boundary_count - 2;
        if pants.len() != want_pants {
            return Err(Error::TopologyMismatch(format!(
                "(g, n) = ({genus}, {boundary_count}) needs {want_pants} pants, got {}",
                pants.len()
            )));
        }
        let mut curve_occurrences = vec![0usize; curves];
        let mut boundary_occurrences = vec![0usize; boundary_count];
        for (p, cuffs) in pants.iter().enumerate() {
            for slot in cuffs {
                match *slot {
                    CuffSlot::Curve(j) => {
                        if j >= curves {
                            return Err(Error::TopologyMismatch(format!(
                                "pants {p} references curve {j}, but only {curves} exist"
                            )));
                        }
                        curve_occurrences[j] += 1;
                    }
                    CuffSlot::Boundary(b) => {
                        if b >= boundary_count {
                            return Err(Error::TopologyMismatch(format!(
                                "pants {p} references boundary {b}, but only \
                                 {boundary_count} exist"
                            )));
                        }
                        boundary_occurrences[b] += 1;
                    }
                }
            }
        }
        for (j, occ) in curve_occurrences.iter().enumerate() {
            if *occ != 2 {
                return Err(Error::TopologyMismatch(format!(
                    "curve {j} occupies {occ} cuff slots instead of 2"
                )));
            }
        }
        for (b, occ) in boundary_occurrences.iter().enumerate() {
            if *occ != 1 {
                return Err(Error::TopologyMismatch(format!(
                    "boundary {b} occupies {occ} cuff slots instead of 1"
                )));
            }
        }
        // Connectivity: the counts alone cannot tell one surface from a
        // disjoint union with the same totals.
        let mut curve_to_pants: Vec<Vec<usize>> = vec![Vec::with_capacity(2); curves];
        for (p, cuffs) in pants.iter().enumerate() {
            for slot in cuffs {
                if let CuffSlot::Curve(j) = *slot {
                    curve_to_pants[j].push(p);
                }
            }
        }
        let mut seen = vec![false; pants.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for slot in &pants[p] {
                if let CuffSlot::Curve(j) = *slot {
                    for &q in &curve_to_pants[j] {
                        if !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::TopologyMismatch(
                "the pants graph is disconnected".into(),
            ));
        }
        Ok(Self {
            genus,
            boundary_count,
            pants,
        })
    }

    pub fn curve_count(&self) -> usize {
        3 * self.genus + self.boundary_count - 3
    }

    /// A fixed decomposition per surface type: a self-glued cap, a chain of
    /// handle blocks, one pants per boundary, and a self-glued end cap.
    /// Genus 0 has no self-glued block to seed the chain with, so it is out
    /// of this catalog's scope (arbitrary decompositions may still be built
    /// through [`PantsDecomposition::new`]).
    pub fn canonical(genus: usize, boundary_count: usize) -> Result<Self> {
        if EXCEPTIONAL.contains(&(genus, boundary_count)) {
            return Err(Error::ExceptionalSurface(genus, boundary_count));
        }
        if genus == 0 {
            return Err(Error::UnsupportedTopology(
                "the canonical catalog starts at genus 1".into(),
            ));
        }
        let c = CuffSlot::Curve;
        let b = CuffSlot::Boundary;
        let mut pants: Vec<[CuffSlot; 3]> = Vec::new();
        if genus == 1 {
            if boundary_count == 1 {
                pants.push([b(0), c(0), c(0)]);
            } else {
                for i in 0..boundary_count {
                    pants.push([b(i), c(i), c((i + 1) % boundary_count)]);
                }
            }
        } else {
            let curves = 3 * genus + boundary_count - 3;
            pants.push([c(0), c(0), c(1)]);
            for h in 0..genus - 2 {
                pants.push([c(3 * h + 1), c(3 * h + 2), c(3 * h + 3)]);
                pants.push([c(3 * h + 2), c(3 * h + 3), c(3 * h + 4)]);
            }
            let base = 3 * (genus - 2) + 1;
            for i in 0..boundary_count {
                pants.push([c(base + i), b(i), c(base + i + 1)]);
            }
            pants.push([c(base + boundary_count), c(curves - 1), c(curves - 1)]);
        }
        Self::new(genus, boundary_count, pants)
    }
}

/// Fenchel-Nielsen coordinates of one surface: a decomposition, one
/// generalized datum per boundary, and a length and twist per curve.
/// Immutable by convention; construct through [`SurfaceFN::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFN {
    pub decomposition: PantsDecomposition,
    pub boundaries: Vec<GeneralizedLength>,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl SurfaceFN {
    pub fn new(
        decomposition: PantsDecomposition,
        boundaries: Vec<GeneralizedLength>,
        lengths: Vec<f64>,
        twists: Vec<f64>,
    ) -> Result<Self> {
        if boundaries.len() != decomposition.boundary_count {
            return Err(Error::TopologyMismatch(format!(
                "{} boundary data for {} boundary cuffs",
                boundaries.len(),
                decomposition.boundary_count
            )));
        }
        let curves = decomposition.curve_count();
        if lengths.len() != curves || twists.len() != curves {
            return Err(Error::TopologyMismatch(format!(
                "{} lengths and {} twists for {curves} curves",
                lengths.len(),
                twists.len()
            )));
        }
        for (j, l) in lengths.iter().enumerate() {
            if !l.is_finite() || *l <= 0.0 {
                return Err(Error::Domain(format!(
                    "length of curve {j} must be positive and finite, got {l}"
                )));
            }
        }
        for (j, t) in twists.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::Domain(format!(
                    "twist of curve {j} must be finite, got {t}"
                )));
            }
        }
        Ok(Self {
            decomposition,
            boundaries,
            lengths,
            twists,
        })
    }

    /// The generalized length sitting on a cuff slot.
    pub fn cuff(&self, slot: CuffSlot) -> GeneralizedLength {
        match slot {
            CuffSlot::Boundary(b) => self.boundaries[b],
            CuffSlot::Curve(j) => GeneralizedLength::new(self.lengths[j])
                .expect("validated curve lengths are admissible data"),
        }
    }
}

/// The block of geometry behind one curve family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyGeometry {
    Cross(XPieceSpec),
    Torus(TorusSpec),
}

/// Resolves a family structure against concrete coordinates.
pub fn family_geometry(x: &SurfaceFN, fs: &FamilyStructure) -> FamilyGeometry {
    match fs.kind {
        FamilyKind::Cross { side_a, side_b } => FamilyGeometry::Cross(XPieceSpec {
            side_a: PantsSide {
                target: x.cuff(side_a.target),
                companion: x.cuff(side_a.companion),
            },
            side_b: PantsSide {
                target: x.cuff(side_b.target),
                companion: x.cuff(side_b.companion),
            },
            waist: x.lengths[fs.curve],
            twist: x.twists[fs.curve],
        }),
        FamilyKind::SelfGlued { third, .. } => FamilyGeometry::Torus(TorusSpec {
            waist: x.lengths[fs.curve],
            twist: x.twists[fs.curve],
            boundary: x.cuff(third),
        }),
    }
}

/// Length of the `n`-th member of a curve family.
pub fn family_member_length(x: &SurfaceFN, fs: &FamilyStructure, n: i64) -> Result<f64> {
    match family_geometry(x, fs) {
        FamilyGeometry::Cross(spec) => family_length(&spec, n),
        FamilyGeometry::Torus(spec) => torus_family_length(&spec, n),
    }
}

/// The fabricated row-`k` X-piece of a cross-path boundary: the genuine
/// near side next to a synthetic far side sharing the partner target.
pub fn bc_row_spec(x: &SurfaceFN, bs: &BoundaryStructure, k: usize) -> Result<XPieceSpec> {
    let BoundaryPath::Cross {
        anchor,
        companion,
        partner_target,
    } = bs.path
    else {
        return Err(Error::UnsupportedTopology(format!(
            "boundary {} is recovered through its torus block, it has no rows",
            bs.boundary
        )));
    };
    let near_companion = x.cuff(CuffSlot::Curve(companion));
    Ok(XPieceSpec {
        side_a: PantsSide {
            target: x.boundaries[bs.boundary],
            companion: near_companion,
        },
        side_b: PantsSide {
            target: x.cuff(partner_target),
            companion: manifest::bc_far_companion(near_companion.trace()),
        },
        waist: manifest::bc_row_waists(x.lengths[anchor])[k],
        twist: manifest::BC_ROW_TWISTS[k],
    })
}

/// Publishes the observable lengths of a surface: every curve itself, a
/// three-term window of every family, and two members of each fabricated
/// boundary row.
pub fn forward_spectrum(x: &SurfaceFN) -> Result<LengthSpectrum> {
    let fams = manifest::family_structures(&x.decomposition);
    let bounds = manifest::boundary_structures(&x.decomposition)?;
    let mut spectrum = LengthSpectrum::new();
    for (j, l) in x.lengths.iter().enumerate() {
        spectrum.insert(manifest::gamma_id(j), *l)?;
    }
    for fs in &fams {
        let i0 = manifest::family_window_start(x.twists[fs.curve]);
        for k in 0..3 {
            let n = i0 + k;
            spectrum.insert(
                manifest::family_id(fs.curve, n),
                family_member_length(x, fs, n)?,
            )?;
        }
    }
    for bs in &bounds {
        if let BoundaryPath::Cross { .. } = bs.path {
            for k in 0..4 {
                let spec = bc_row_spec(x, bs, k)?;
                for i in 0..2 {
                    spectrum
                        .insert(manifest::bc_id(bs.boundary, k, i), family_length(&spec, i)?)?;
                }
            }
        }
    }
    Ok(spectrum)
}

/// Largest relative gap between a spectrum and what the surface would
/// publish for the same identifiers. Entries whose identifier the manifest
/// cannot evaluate (unknown family, out-of-range curve) are skipped; every
/// index of a known family is evaluable, not just the published window.
pub fn spectrum_deviation(x: &SurfaceFN, spectrum: &LengthSpectrum) -> Result<f64> {
    let fams = manifest::family_structures(&x.decomposition);
    let bounds = manifest::boundary_structures(&x.decomposition)?;
    let curves = x.decomposition.curve_count();
    let mut worst = 0.0_f64;
    for (id, observed) in spectrum.iter() {
        let model = if id.family == "gamma" {
            match usize::try_from(id.index) {
                Ok(j) if j < curves => x.lengths[j],
                _ => continue,
            }
        } else if let Some(rest) = id.family.strip_prefix("fam:") {
            match rest.parse::<usize>() {
                Ok(j) if j < curves => family_member_length(x, &fams[j], id.index)?,
                _ => continue,
            }
        } else if let Some(rest) = id.family.strip_prefix("bc:") {
            let mut parts = rest.splitn(2, ':');
            let b = parts.next().and_then(|s| s.parse::<usize>().ok());
            let k = parts.next().and_then(|s| s.parse::<usize>().ok());
            match (b, k) {
                (Some(b), Some(k)) if b < bounds.len() && k < 4 => {
                    if !matches!(bounds[b].path, BoundaryPath::Cross { .. }) {
                        continue;
                    }
                    family_length(&bc_row_spec(x, &bounds[b], k)?, id.index)?
                }
                _ => continue,
            }
        } else {
            continue;
        };
        worst = worst.max((model - observed).abs() / observed.abs().max(1.0));
    }
    Ok(worst)
}

/// Replaces every boundary datum by a cusp, keeping lengths and twists
/// bit for bit. Idempotent.
pub fn forget_map(x: &SurfaceFN) -> SurfaceFN {
    SurfaceFN {
        decomposition: x.decomposition.clone(),
        boundaries: vec![
            GeneralizedLength::new(0.0).expect("the cusp is admissible");
            x.boundaries.len()
        ],
        lengths: x.lengths.clone(),
        twists: x.twists.clone(),
    }
}

/// Multiplicative and additive constants comparing a surface with its
/// cusped companion. `c = 1`, `d = 0` exactly when every datum is a cusp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonConstants {
    pub c: f64,
    pub d: f64,
}

/// Aggregates the per-case comparison bounds over a boundary tuple:
/// `2/(1+cos(|lambda|/2))` and `1/cos^2(|lambda|/2)` per cone point,
/// `(1+cosh(lambda/2))/2` and `cosh^2(lambda/2)` per geodesic, and the
/// squared trace spread over boundary pairs. Monotone in every |lambda|.
pub fn comparison_constants(lambdas: &[GeneralizedLength]) -> ComparisonConstants {
    let mut c = 1.0_f64;
    let mut min_trace = f64::INFINITY;
    let mut max_trace = f64::NEG_INFINITY;
    for gl in lambdas {
        let half = gl.value().abs() / 2.0;
        match gl.kind() {
            BoundaryKind::ConePoint => {
                c = c.max(2.0 / (1.0 + half.cos()));
                c = c.max(1.0 / (half.cos() * half.cos()));
            }
            BoundaryKind::Cusp => {}
            BoundaryKind::Geodesic => {
                c = c.max((1.0 + half.cosh()) / 2.0);
                c = c.max(half.cosh() * half.cosh());
            }
        }
        min_trace = min_trace.min(gl.trace());
        max_trace = max_trace.max(gl.trace());
    }
    if lambdas.len() >= 2 {
        let spread = max_trace / min_trace;
        c = c.max(spread * spread);
    }
    let d = crate::hyptrig::stable_arccosh(c.max(1.0)).expect("c >= 1");
    ComparisonConstants { c, d }
}

/// Outcome of checking the two comparison inequalities over a curve set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub constants: ComparisonConstants,
    pub checked: usize,
    /// max over curves of |l_X - l_FX| divided by the crossing count
    /// (2 for X-piece families, 1 for torus families); bounded by `d`.
    pub worst_additive_gap: f64,
    /// max over curves of max(ratio, 1/ratio); bounded by `c`.
    pub worst_ratio: f64,
    pub additive_ok: bool,
    pub ratio_ok: bool,
}

/// Rounding allowance on the comparison inequalities: the bounds are
/// strict mathematically, but both sides are computed in doubles.
const BOUNDS_SLACK: f64 = 1e-9;

/// Evaluates every family curve with |index| <= max_index on X and on
/// forget_map(X) and checks both comparison inequalities.
pub fn verify_length_bounds(x: &SurfaceFN, max_index: i64) -> Result<BoundsReport> {
    let constants = comparison_constants(&x.boundaries);
    let fx = forget_map(x);
    let fams = manifest::family_structures(&x.decomposition);
    let mut checked = 0usize;
    let mut worst_additive_gap = 0.0_f64;
    let mut worst_ratio = 1.0_f64;
    for fs in &fams {
        let sigma = match fs.kind {
            FamilyKind::Cross { .. } => 2.0,
            FamilyKind::SelfGlued { .. } => 1.0,
        };
        for n in -max_index..=max_index {
            let with = family_member_length(x, fs, n)?;
            let without = family_member_length(&fx, fs, n)?;
            worst_additive_gap = worst_additive_gap.max((with - without).abs() / sigma);
            let ratio = with / without;
            worst_ratio = worst_ratio.max(ratio.max(1.0 / ratio));
            checked += 1;
        }
    }
    Ok(BoundsReport {
        constants,
        checked,
        worst_additive_gap,
        worst_ratio,
        additive_ok: worst_additive_gap <= constants.d + BOUNDS_SLACK,
        ratio_ok: worst_ratio <= constants.c * (1.0 + BOUNDS_SLACK),
    })
}

fn require_same_marked_surface(x1: &SurfaceFN, x2: &SurfaceFN) -> Result<()> {
    if x1.decomposition != x2.decomposition {
        return Err(Error::TopologyMismatch(
            "the two surfaces carry different pants decompositions".into(),
        ));
    }
    let same = x1
        .boundaries
        .iter()
        .zip(&x2.boundaries)
        .all(|(a, b)| a.value() == b.value());
    if !same {
        return Err(Error::TopologyMismatch(
            "the two surfaces carry different boundary data".into(),
        ));
    }
    Ok(())
}

/// Lower bound for the one-sided Thurston distance from `x1` to `x2`:
/// the log of the largest length ratio l2/l1 over all internal curves and
/// all family curves with |index| <= max_index. Monotone nondecreasing in
/// max_index, exact zero at x1 = x2, and a true lower bound of the
/// distance (which takes the supremum over every curve, not just these).
pub fn thurston_distance_lb(x1: &SurfaceFN, x2: &SurfaceFN, max_index: i64) -> Result<f64> {
    require_same_marked_surface(x1, x2)?;
    let fams = manifest::family_structures(&x1.decomposition);
    let mut max_ratio = f64::NEG_INFINITY;
    for j in 0..x1.decomposition.curve_count() {
        max_ratio = max_ratio.max(x2.lengths[j] / x1.lengths[j]);
    }
    for fs in &fams {
        for n in -max_index..=max_index {
            let l1 = family_member_length(x1, fs, n)?;
            let l2 = family_member_length(x2, fs, n)?;
            max_ratio = max_ratio.max(l2 / l1);
        }
    }
    Ok(max_ratio.ln())
}

/// How far the cusp replacement moves the estimated distance:
/// |d(x1, x2) - d(F x1, F x2)| over the same curve set. Bounded by
/// 2 log c of the shared boundary tuple.
pub fn almost_isometry_gap(x1: &SurfaceFN, x2: &SurfaceFN, max_index: i64) -> Result<f64> {
    let d = thurston_distance_lb(x1, x2, max_index)?;
    let df = thurston_distance_lb(&forget_map(x1), &forget_map(x2), max_index)?;
    Ok((d - df).abs())
}

/// One step of the twist-limit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSample {
    pub t: f64,
    /// Curve-set lengths divided by the largest entry, in a deterministic
    /// order (every internal curve, then every family window).
    pub normalized: Vec<(CurveId, f64)>,
    /// max distance of the normalized vector from its limit profile
    /// (1 on the twisted family, 0 everywhere else).
    pub profile_gap: f64,
    /// Relative gap of `e^{l/2 - n s}` at the probe index against its
    /// limit constant, evaluated in the log domain so no sample overflows.
    pub constant_rel_gap: f64,
}

/// Twists `x` along one waist through `t_sequence` (the twist is set, not
/// added) and reports how the normalized length vector of the curve set
/// approaches the intersection-number profile of the twisting curve.
pub fn boundary_convergence(
    x: &SurfaceFN,
    curve: usize,
    t_sequence: &[f64],
    window: i64,
    probe_index: i64,
) -> Result<Vec<ConvergenceSample>> {
    let curves = x.decomposition.curve_count();
    if curve >= curves {
        return Err(Error::Domain(format!(
            "curve {curve} out of range, only {curves} exist"
        )));
    }
    if t_sequence.is_empty() || t_sequence.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "the twist sequence must be nonempty and strictly increasing".into(),
        ));
    }
    if window < 0 || probe_index < 1 {
        return Err(Error::Domain(
            "window must be nonnegative and the probe index positive".into(),
        ));
    }
    let fams = manifest::family_structures(&x.decomposition);
    let target_family = manifest::family_name(curve);
    let mut samples = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        if !t.is_finite() {
            return Err(Error::Domain(format!("twist {t} is not finite")));
        }
        let mut xt = x.clone();
        xt.twists[curve] = t;
        let mut entries: Vec<(CurveId, f64)> = Vec::new();
        for j in 0..curves {
            entries.push((manifest::gamma_id(j), xt.lengths[j]));
        }
        for fs in &fams {
            for n in -window..=window {
                entries.push((
                    manifest::family_id(fs.curve, n),
                    family_member_length(&xt, fs, n)?,
                ));
            }
        }
        let max_entry = entries.iter().fold(0.0_f64, |acc, (_, l)| acc.max(*l));
        let normalized: Vec<(CurveId, f64)> = entries
            .into_iter()
            .map(|(id, l)| (id, l / max_entry))
            .collect();
        let profile_gap = normalized
            .iter()
            .map(|(id, v)| {
                let limit = if id.family == target_family { 1.0 } else { 0.0 };
                (v - limit).abs()
            })
            .fold(0.0, f64::max);
        // The probe constant: l(beta_n)/2 - n s converges to t s plus the
        // log of the coefficient product; compare in the log domain.
        let (step, ln_coeff) = match family_geometry(&xt, &fams[curve]) {
            FamilyGeometry::Cross(spec) => {
                let (ca, cb) = FamilyEvaluator::side_coefficients(&spec)?;
                (spec.waist, ca.u.ln() + cb.u.ln())
            }
            FamilyGeometry::Torus(spec) => {
                let h0 = torus_height(spec.waist, spec.boundary)?;
                (spec.waist / 2.0, ln_cosh(h0 / 2.0))
            }
        };
        let l_probe = family_member_length(&xt, &fams[curve], probe_index)?;
        let exponent = l_probe / 2.0 - probe_index as f64 * step - ln_coeff - t * step;
        samples.push(ConvergenceSample {
            t,
            normalized,
            profile_gap,
            constant_rel_gap: exponent.exp_m1().abs(),
        });
    }
    Ok(samples)
}

/// Extrapolates a sequence with a 1/t expansion from samples at t, 2t, 4t:
/// the first two error terms cancel, leaving O(1/t^3).
pub fn richardson(v_t: f64, v_2t: f64, v_4t: f64) -> f64 {
    (8.0 * v_4t - 6.0 * v_2t + v_t) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl(lambda: f64) -> GeneralizedLength {
        GeneralizedLength::new(lambda).unwrap()
    }

    fn surface(g: usize, n: usize, lambdas: &[f64]) -> SurfaceFN {
        let d = PantsDecomposition::canonical(g, n).unwrap();
        let curves = d.curve_count();
        let lengths: Vec<f64> = (0..curves).map(|j| 1.0 + 0.3 * j as f64).collect();
        let twists: Vec<f64> = (0..curves).map(|j| 0.2 - 0.15 * j as f64).collect();
        let boundaries = lambdas.iter().map(|l| gl(*l)).collect();
        SurfaceFN::new(d, boundaries, lengths, twists).unwrap()
    }

    #[test]
    fn canonical_catalog_validates_across_the_grid() {
        for g in 0..=3usize {
            for n in 0..=4usize {
                let exceptional = EXCEPTIONAL.contains(&(g, n));
                let got = PantsDecomposition::canonical(g, n);
                if exceptional {
                    assert!(
                        matches!(got, Err(Error::ExceptionalSurface(_, _))),
                        "({g},{n})"
                    );
                } else if g == 0 {
                    assert!(
                        matches!(got, Err(Error::UnsupportedTopology(_))),
                        "({g},{n})"
                    );
                } else {
                    let d = got.unwrap();
                    assert_eq!(d.pants.len(), 2 * g + n - 2, "({g},{n})");
                    assert_eq!(d.curve_count(), 3 * g + n - 3, "({g},{n})");
                }
            }
        }
    }

    #[test]
    fn validation_rejects_a_disconnected_graph() {
        // Two copies of the closed genus-2 catalog, relabeled, pretending
        // to be genus 3: counts match, the graph does not.
        let c = CuffSlot::Curve;
        let pants = vec![
            [c(0), c(0), c(1)],
            [c(1), c(2), c(2)],
            [c(3), c(3), c(4)],
            [c(4), c(5), c(5)],
        ];
        let err = PantsDecomposition::new(3, 0, pants).unwrap_err();
        assert!(matches!(err, Error::TopologyMismatch(_)), "{err}");
    }

    #[test]
    fn validation_counts_slots() {
        let c = CuffSlot::Curve;
        let b = CuffSlot::Boundary;
        // curve 0 used three times, curve 1 once
        let err = PantsDecomposition::new(1, 1, vec![[b(0), c(0), c(0)], [c(0), c(1), c(1)]]);
        assert!(err.is_err());
        // sphere catalog entry is representable directly
        let d = PantsDecomposition::new(
            0,
            6,
            vec![
                [b(0), b(1), c(0)],
                [c(0), b(2), c(1)],
                [c(1), b(3), c(2)],
                [c(2), b(4), b(5)],
            ],
        )
        .unwrap();
        assert_eq!(d.curve_count(), 3);
    }

    #[test]
    fn forget_map_is_an_idempotent_bit_exact_projection() {
        let x = surface(2, 1, &[-1.3]);
        let fx = forget_map(&x);
        assert_eq!(fx.lengths, x.lengths);
        assert_eq!(fx.twists, x.twists);
        assert!(fx.boundaries.iter().all(|b| b.value() == 0.0));
        assert_eq!(forget_map(&fx), fx);
    }

    #[test]
    fn comparison_constants_on_cusps_and_single_cone() {
        let cc = comparison_constants(&[gl(0.0), gl(0.0)]);
        assert_eq!((cc.c, cc.d), (1.0, 0.0));
        let half = std::f64::consts::FRAC_PI_4;
        let cc = comparison_constants(&[gl(-std::f64::consts::FRAC_PI_2)]);
        let expected = (1.0 / (half.cos() * half.cos())).max(2.0 / (1.0 + half.cos()));
        assert_eq!(cc.c, expected);
    }

    #[test]
    fn comparison_constants_monotone_in_each_datum() {
        let base = comparison_constants(&[gl(-1.0), gl(2.0)]);
        let bigger_cone = comparison_constants(&[gl(-1.5), gl(2.0)]);
        let bigger_geo = comparison_constants(&[gl(-1.0), gl(2.5)]);
        assert!(bigger_cone.c >= base.c && bigger_cone.d >= base.d);
        assert!(bigger_geo.c >= base.c && bigger_geo.d >= base.d);
    }

    #[test]
    fn length_bounds_hold_on_a_cone_surface() {
        let x = surface(2, 2, &[-1.1, 0.8]);
        let report = verify_length_bounds(&x, 20).unwrap();
        assert!(
            report.additive_ok,
            "gap {} vs d {}",
            report.worst_additive_gap, report.constants.d
        );
        assert!(
            report.ratio_ok,
            "ratio {} vs c {}",
            report.worst_ratio, report.constants.c
        );
        assert!(report.checked > 0);
    }

    #[test]
    fn length_bounds_are_exactly_tight_on_cusps() {
        let x = surface(2, 1, &[0.0]);
        let report = verify_length_bounds(&x, 5).unwrap();
        assert_eq!(report.worst_additive_gap, 0.0);
        assert_eq!(report.worst_ratio, 1.0);
    }

    #[test]
    fn halving_the_data_never_raises_the_additive_gap() {
        let mut lambdas = [-1.8, 1.4];
        let mut last = f64::INFINITY;
        for _ in 0..=6 {
            let x = surface(1, 2, &lambdas);
            let report = verify_length_bounds(&x, 10).unwrap();
            assert!(report.worst_additive_gap <= last + 1e-12);
            last = report.worst_additive_gap;
            for l in &mut lambdas {
                *l /= 2.0;
            }
        }
        assert!(last < 1e-3, "gap after six halvings: {last}");
    }

    #[test]
    fn distance_estimate_is_zero_on_itself_and_detects_growth() {
        let x = surface(2, 1, &[-0.9]);
        assert_eq!(thurston_distance_lb(&x, &x, 10).unwrap(), 0.0);
        let mut y = x.clone();
        y.lengths[1] *= 2.0;
        assert!(thurston_distance_lb(&x, &y, 10).unwrap() >= std::f64::consts::LN_2);
        let mut z = x.clone();
        z.twists[0] += 0.4;
        let d12 = thurston_distance_lb(&x, &z, 10).unwrap();
        let d21 = thurston_distance_lb(&z, &x, 10).unwrap();
        assert!(d12 > 0.0 && d21 > 0.0);
        assert_ne!(d12, d21, "twisting is an asymmetry witness");
    }

    #[test]
    fn distance_estimate_respects_the_triangle_inequality() {
        let x = surface(2, 0, &[]);
        let mut y = x.clone();
        y.lengths[0] *= 1.3;
        y.twists[1] -= 0.2;
        let mut z = y.clone();
        z.lengths[2] *= 0.8;
        z.twists[0] += 0.15;
        let dxz = thurston_distance_lb(&x, &z, 8).unwrap();
        let dxy = thurston_distance_lb(&x, &y, 8).unwrap();
        let dyz = thurston_distance_lb(&y, &z, 8).unwrap();
        assert!(dxz <= dxy + dyz + 1e-12);
    }

    #[test]
    fn distance_estimate_rejects_mismatched_marked_surfaces() {
        let x = surface(2, 1, &[-0.9]);
        let y = surface(2, 1, &[-0.8]);
        assert!(matches!(
            thurston_distance_lb(&x, &y, 5),
            Err(Error::TopologyMismatch(_))
        ));
    }

    #[test]
    fn cusp_replacement_gap_is_bounded() {
        let x = surface(2, 1, &[-1.2]);
        let mut y = x.clone();
        y.lengths[0] *= 1.4;
        y.twists[2] += 0.3;
        let gap = almost_isometry_gap(&x, &y, 10).unwrap();
        let cc = comparison_constants(&x.boundaries);
        assert!(
            gap <= 2.0 * cc.c.ln() + 1e-12,
            "gap {gap}, 2 log c {}",
            2.0 * cc.c.ln()
        );
    }

    #[test]
    fn twist_limits_approach_the_intersection_profile() {
        let x = surface(2, 1, &[-1.0]);
        let ts = [5.0, 10.0, 20.0, 40.0];
        let samples = boundary_convergence(&x, 1, &ts, 3, 30).unwrap();
        // Waist entry decays.
        let waist_at = |s: &ConvergenceSample| {
            s.normalized
                .iter()
                .find(|(id, _)| *id == manifest::gamma_id(1))
                .unwrap()
                .1
        };
        assert!(waist_at(&samples[3]) < waist_at(&samples[0]));
        // Family entries agree with each other ever more closely.
        let fam_spread = |s: &ConvergenceSample| {
            let vals: Vec<f64> = s
                .normalized
                .iter()
                .filter(|(id, _)| id.family == manifest::family_name(1))
                .map(|(_, v)| *v)
                .collect();
            vals.iter().fold(0.0_f64, |a, v| a.max(*v))
                - vals.iter().fold(f64::INFINITY, |a, v| a.min(*v))
        };
        assert!(fam_spread(&samples[3]) < fam_spread(&samples[0]));
        assert!(samples[3].profile_gap < samples[0].profile_gap);
        // The probe constant is already settled at these twists.
        for s in &samples {
            assert!(
                s.constant_rel_gap <= 1e-6,
                "gap {} at t {}",
                s.constant_rel_gap,
                s.t
            );
        }
    }

    #[test]
    fn probe_constant_matches_the_direct_limit_formula() {
        let x = surface(2, 1, &[-1.0]);
        let fams = manifest::family_structures(&x.decomposition);
        let mut xt = x.clone();
        xt.twists[1] = 30.0;
        let FamilyGeometry::Cross(spec) = family_geometry(&xt, &fams[1]) else {
            panic!("curve 1 crosses two pants in this catalog");
        };
        let l30 = family_length(&spec, 30).unwrap();
        let direct = (l30 / 2.0 - 30.0 * spec.waist).exp();
        let limit = crate::xpiece::asymptotic_constant(&spec).unwrap();
        assert!(
            ((direct - limit) / limit).abs() <= 1e-6,
            "direct {direct} vs limit {limit}"
        );
    }

    #[test]
    fn richardson_cancels_the_leading_terms() {
        let v = |t: f64| 0.7 + 3.0 / t + 5.0 / (t * t);
        let got = richardson(v(50.0), v(100.0), v(200.0));
        assert!((got - 0.7).abs() <= 1e-9, "{got}");
    }

    #[test]
    fn forward_spectrum_re_simulates_to_zero_deviation() {
        for (g, n, lambdas) in [
            (1usize, 1usize, vec![-1.2]),
            (2, 0, vec![]),
            (2, 2, vec![0.7, -2.0]),
        ] {
            let x = surface(g, n, &lambdas);
            let spectrum = forward_spectrum(&x).unwrap();
            assert_eq!(spectrum_deviation(&x, &spectrum).unwrap(), 0.0, "({g},{n})");
        }
    }
}
