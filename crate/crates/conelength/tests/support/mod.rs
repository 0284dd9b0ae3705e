//! Shared fixtures for the integration suites: deterministic samplers over
//! the admissible coordinate ranges and an extended-precision re-evaluation
//! path for the core formulas.

#![allow(dead_code)]

pub mod fuzz;
pub mod oracle;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conelength::{GeneralizedLength, PantsDecomposition, SurfaceFN};
use conelength::{PantsSide, TorusSpec, XPieceSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Admissible boundary datum kept away from the degenerate edges: cone data
/// in [-3.1, -0.02], an occasional exact cusp, geodesics in [0.02, 3.0].
pub fn sample_lambda(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..10u32) {
        0 => 0.0,
        1..=5 => -rng.random_range(0.02..=3.1),
        _ => rng.random_range(0.02..=3.0),
    }
}

/// Cone-or-geodesic datum (no cusp), for tests that need `s > 0`.
pub fn sample_noncusp_lambda(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        -rng.random_range(0.02..=3.1)
    } else {
        rng.random_range(0.02..=3.0)
    }
}

pub fn sample_length(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.1..=5.0)
}

pub fn sample_twist(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-3.0..=3.0)
}

pub fn gl(lambda: f64) -> GeneralizedLength {
    GeneralizedLength::new(lambda).unwrap()
}

pub fn sample_xpiece(rng: &mut ChaCha8Rng) -> XPieceSpec {
    XPieceSpec {
        side_a: PantsSide {
            target: gl(sample_lambda(rng)),
            companion: gl(sample_lambda(rng)),
        },
        side_b: PantsSide {
            target: gl(sample_lambda(rng)),
            companion: gl(sample_lambda(rng)),
        },
        waist: sample_length(rng),
        twist: sample_twist(rng),
    }
}

pub fn sample_torus(rng: &mut ChaCha8Rng) -> TorusSpec {
    TorusSpec {
        waist: sample_length(rng),
        twist: sample_twist(rng),
        boundary: gl(sample_lambda(rng)),
    }
}

/// All supported surface types with g in [1, max_g], n in [0, max_n]
/// (the one-holed-torus row starts at n = 1; (1,0) is exceptional).
pub fn surface_types(max_g: usize, max_n: usize) -> Vec<(usize, usize)> {
    let mut types = Vec::new();
    for g in 1..=max_g {
        for n in 0..=max_n {
            if (g, n) != (1, 0) {
                types.push((g, n));
            }
        }
    }
    types
}

pub fn sample_surface(rng: &mut ChaCha8Rng, g: usize, n: usize) -> SurfaceFN {
    let d = PantsDecomposition::canonical(g, n).unwrap();
    let boundaries = (0..n).map(|_| gl(sample_lambda(rng))).collect();
    let lengths = (0..d.curve_count()).map(|_| sample_length(rng)).collect();
    let twists = (0..d.curve_count()).map(|_| sample_twist(rng)).collect();
    SurfaceFN::new(d, boundaries, lengths, twists).unwrap()
}

pub fn rel_err(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs().max(1.0)
}

/// Largest componentwise deviation between two coordinate tuples, with
/// twists weighted separately by the caller.
pub fn surface_deviation(a: &SurfaceFN, b: &SurfaceFN) -> (f64, f64) {
    let mut coord = 0.0f64;
    let mut twist = 0.0f64;
    for (x, y) in a.boundaries.iter().zip(&b.boundaries) {
        coord = coord.max((x.value() - y.value()).abs());
    }
    for (x, y) in a.lengths.iter().zip(&b.lengths) {
        coord = coord.max((x - y).abs());
    }
    for (x, y) in a.twists.iter().zip(&b.twists) {
        twist = twist.max((x - y).abs());
    }
    (coord, twist)
}
