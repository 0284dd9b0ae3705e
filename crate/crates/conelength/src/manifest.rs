//! Curve manifest: which lengths the forward simulation publishes and the
//! recovery orchestrator requests, plus the structural map from a pants
//! decomposition to the X-piece or torus behind every curve family.
//!
//! Identifier scheme, one family per geometric source:
//!
//! * `gamma[j]` - the j-th interior pants curve itself.
//! * `fam:j[n]` - the n-th member of the twist family crossing curve j.
//! * `bc:b:k[i]` - boundary b, fabricated row k (of 4), family index i
//!   (0 and 1 are published).
//!
//! Twist families are published on a window of three consecutive indices
//! chosen so that the twist solve stays well conditioned; boundary rows use
//! fixed synthetic waists and twists so their recovery does not compound
//! errors from the twist solves.

use crate::error::{CurveId, Error, Result};
use crate::pants::GeneralizedLength;
use crate::teich::{CuffSlot, PantsDecomposition};

pub fn gamma_id(curve: usize) -> CurveId {
    CurveId::new("gamma", curve as i64)
}

pub fn family_name(curve: usize) -> String {
    format!("fam:{curve}")
}

pub fn family_id(curve: usize, n: i64) -> CurveId {
    CurveId::new(family_name(curve), n)
}

pub fn bc_family_name(boundary: usize, row: usize) -> String {
    format!("bc:{boundary}:{row}")
}

pub fn bc_id(boundary: usize, row: usize, n: i64) -> CurveId {
    CurveId::new(bc_family_name(boundary, row), n)
}

/// First index of the published three-term window of a twist family.
///
/// The window is centered so that the solver argument `x = (t_rel + 1/2) s`
/// satisfies `t_rel + 1/2` in [-3/2, -1/2]: bounded away from the
/// degenerate 0, and small enough that consecutive family lengths still
/// differ in their leading digits for every admissible twist. Recovering t
/// from the window at `i0` returns `t + i0`; callers add `-i0` back.
pub fn family_window_start(t: f64) -> i64 {
    -((t + 0.5).round() as i64) - 1
}

/// Twists of the four fabricated boundary rows. Fixed values keep the rows
/// clear of the degenerate -1/2 and independent of any recovered quantity.
pub const BC_ROW_TWISTS: [f64; 4] = [0.45, 0.3, -0.8, 1.1];

/// Candidate waists for the fabricated rows. Gaps of at least 0.8 ensure
/// at most one candidate ever falls inside the clearance of the genuine
/// waist, so three always survive.
const BC_WAIST_POOL: [f64; 4] = [1.6, 2.4, 3.4, 4.6];
/// A candidate this close to the genuine waist would crowd the nodes of
/// the linear system, so it is skipped.
const BC_WAIST_CLEARANCE: f64 = 0.25;

/// Waists of the four fabricated boundary rows: the genuine waist first,
/// then the first three pool candidates clear of it. Deterministic in ell,
/// and identical on both sides of a round trip because the genuine waist
/// is read straight off the spectrum.
pub fn bc_row_waists(ell: f64) -> [f64; 4] {
    let mut out = [ell, 0.0, 0.0, 0.0];
    let mut k = 1;
    for &w in BC_WAIST_POOL.iter() {
        if k < 4 && (w - ell).abs() >= BC_WAIST_CLEARANCE {
            out[k] = w;
            k += 1;
        }
    }
    debug_assert_eq!(k, 4, "pool must always yield three clear candidates");
    out
}

/// Candidate lengths for the synthetic far-side companion of the
/// fabricated boundary rows. Their traces differ by more than twice the
/// clearance, so at least one candidate always survives.
const FAR_COMPANION_POOL: [f64; 2] = [1.7, 2.9];
/// Minimal trace gap between the synthetic companion and the genuine one.
/// Equal companions on the two sides would make the whole row symmetric
/// under swapping the hidden pair, erasing the orientation.
const FAR_COMPANION_CLEARANCE: f64 = 0.05;

/// Synthetic companion cuff for the far side of every fabricated boundary
/// row, chosen clear of the genuine near-side companion trace `m3`.
/// Deterministic in `m3`, which both directions read off the spectrum.
pub fn bc_far_companion(m3: f64) -> GeneralizedLength {
    for &l in FAR_COMPANION_POOL.iter() {
        let gl = GeneralizedLength::new(l).expect("pool lengths are admissible");
        if (gl.trace() - m3).abs() >= FAR_COMPANION_CLEARANCE {
            return gl;
        }
    }
    unreachable!("pool traces are spread wider than twice the clearance")
}

/// One side of a curve that bounds two distinct pairs of pants. The target
/// is the cuff the interior family runs toward; the designation (lower slot
/// first) is a bookkeeping convention, the lengths do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideSlots {
    pub pants: usize,
    pub target: CuffSlot,
    pub companion: CuffSlot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// The curve bounds two distinct pairs of pants.
    Cross {
        side_a: SideSlots,
        side_b: SideSlots,
    },
    /// The curve appears twice on one pair of pants (a one-holed torus
    /// block); `third` is the remaining cuff.
    SelfGlued { pants: usize, third: CuffSlot },
}

/// A curve together with the block of the decomposition it runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyStructure {
    pub curve: usize,
    pub kind: FamilyKind,
}

/// How a boundary datum is reached from observable lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPath {
    /// The boundary sits on a self-glued pair of pants; its datum follows
    /// from the interior family of `curve` alone.
    Torus { curve: usize },
    /// The boundary is recovered through the four-row system across
    /// `anchor`. `companion` is the near side's other cuff; the far side
    /// carries `partner_target` next to a synthetic companion.
    Cross {
        anchor: usize,
        companion: usize,
        partner_target: CuffSlot,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryStructure {
    pub boundary: usize,
    pub path: BoundaryPath,
}

/// The block behind every interior curve. Relies on the decomposition
/// invariant that each curve occupies exactly two cuff slots.
pub fn family_structures(d: &PantsDecomposition) -> Vec<FamilyStructure> {
    (0..d.curve_count())
        .map(|j| {
            let mut occ = [(0usize, 0usize); 2];
            let mut found = 0;
            for (p, cuffs) in d.pants.iter().enumerate() {
                for (s, slot) in cuffs.iter().enumerate() {
                    if *slot == CuffSlot::Curve(j) {
                        occ[found.min(1)] = (p, s);
                        found += 1;
                    }
                }
            }
            debug_assert_eq!(found, 2, "curve {j} must occupy exactly two slots");
            let ((p0, s0), (p1, s1)) = (occ[0], occ[1]);
            let kind = if p0 == p1 {
                let third = (0..3)
                    .find(|s| *s != s0 && *s != s1)
                    .expect("a pair of pants has three cuffs");
                FamilyKind::SelfGlued {
                    pants: p0,
                    third: d.pants[p0][third],
                }
            } else {
                let side = |p: usize, s: usize| {
                    let mut others = (0..3).filter(|k| *k != s);
                    let lo = others.next().expect("two remaining cuffs");
                    let hi = others.next().expect("two remaining cuffs");
                    SideSlots {
                        pants: p,
                        target: d.pants[p][lo],
                        companion: d.pants[p][hi],
                    }
                };
                FamilyKind::Cross {
                    side_a: side(p0, s0),
                    side_b: side(p1, s1),
                }
            };
            FamilyStructure { curve: j, kind }
        })
        .collect()
}

/// A recovery path for every boundary, or why none exists. Each boundary
/// needs either a self-glued block behind it or an anchor curve whose near
/// and far companions are interior (their traces must be known before the
/// boundary system can be solved).
pub fn boundary_structures(d: &PantsDecomposition) -> Result<Vec<BoundaryStructure>> {
    let fams = family_structures(d);
    let mut out = Vec::with_capacity(d.boundary_count);
    for b in 0..d.boundary_count {
        let (p, s) = d
            .pants
            .iter()
            .enumerate()
            .find_map(|(p, cuffs)| {
                cuffs
                    .iter()
                    .position(|slot| *slot == CuffSlot::Boundary(b))
                    .map(|s| (p, s))
            })
            .expect("validation places every boundary on exactly one cuff");
        let mut others = (0..3).filter(|k| *k != s);
        let lo = others.next().expect("two remaining cuffs");
        let hi = others.next().expect("two remaining cuffs");
        let pair = [d.pants[p][lo], d.pants[p][hi]];
        if let (CuffSlot::Curve(j1), CuffSlot::Curve(j2)) = (pair[0], pair[1]) {
            if j1 == j2 {
                out.push(BoundaryStructure {
                    boundary: b,
                    path: BoundaryPath::Torus { curve: j1 },
                });
                continue;
            }
        }
        let mut path = None;
        for which in 0..2 {
            let CuffSlot::Curve(anchor) = pair[which] else {
                continue;
            };
            let CuffSlot::Curve(companion) = pair[1 - which] else {
                continue;
            };
            let FamilyKind::Cross { side_a, side_b } = fams[anchor].kind else {
                continue;
            };
            let far = if side_a.pants == p { side_b } else { side_a };
            // A far boundary plays the second unknown of the system and is
            // recovered jointly; otherwise the far target supplies a known
            // trace to orient against.
            let partner_target = match (far.target, far.companion) {
                (t @ CuffSlot::Boundary(_), _) => t,
                (_, t @ CuffSlot::Boundary(_)) => t,
                (t @ CuffSlot::Curve(_), CuffSlot::Curve(_)) => t,
            };
            path = Some(BoundaryPath::Cross {
                anchor,
                companion,
                partner_target,
            });
            break;
        }
        match path {
            Some(found) => out.push(BoundaryStructure {
                boundary: b,
                path: found,
            }),
            None => {
                return Err(Error::UnsupportedTopology(format!(
                    "boundary {b} has no recovery path: every anchor across its pants \
                     lacks an interior companion cuff"
                )))
            }
        }
    }
    Ok(out)
}
