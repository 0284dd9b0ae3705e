//! Reusable fuzz bodies for the comparison inequalities. Each returns a
//! report instead of panicking so different suites can run the same body
//! at different sample counts and assert on the outcome themselves.
//!
//! Every hypothesis constant `C` is computed from the sampled data itself
//! (the tightest admissible constant), which makes the conclusions sharp;
//! `SLACK` covers only f64 rounding of the two evaluation routes.

use rand::Rng;

use conelength::hyptrig::{quad_diagonal, ArcConfiguration};
use conelength::pants::{
    arc_with_displacement, coefficients, perp_between, self_perp_one, self_perp_two,
};

use super::{gl, rng, sample_lambda, sample_length, sample_noncusp_lambda};

const SLACK: f64 = 1e-10;

#[derive(Debug)]
pub struct FuzzReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest amount by which any inequality was exceeded.
    pub worst_excess: f64,
}

impl FuzzReport {
    fn new(samples: usize) -> Self {
        Self {
            samples,
            violations: 0,
            worst_excess: 0.0,
        }
    }

    /// Record `value <= bound` (with rounding slack).
    fn check_le(&mut self, value: f64, bound: f64) {
        let excess = value - bound;
        if excess > SLACK {
            self.violations += 1;
        }
        self.worst_excess = self.worst_excess.max(excess);
    }

    /// Record `actual` within `tol` relative of `expected`.
    fn check_rel(&mut self, actual: f64, expected: f64, tol: f64) {
        let excess = (actual - expected).abs() / expected.abs().max(1.0) - tol;
        if excess > 0.0 {
            self.violations += 1;
        }
        self.worst_excess = self.worst_excess.max(excess);
    }

    pub fn assert_clean(&self, what: &str) {
        assert_eq!(
            self.violations, 0,
            "{what}: {}/{} violations, worst excess {:.3e}",
            self.violations, self.samples, self.worst_excess
        );
    }
}

fn diagonal(c: f64, rho1: f64, rho2: f64) -> f64 {
    quad_diagonal(&ArcConfiguration {
        base: c,
        rho1,
        rho2,
    })
    .unwrap()
}

/// cosh of the diagonal of a displaced arc, the `f` of the displaced-endpoint bound.
fn f_of(c: f64, rho1: f64, rho2: f64) -> f64 {
    rho1.cosh() * rho2.cosh() * c.cosh() - rho1.sinh() * rho2.sinh()
}

/// Displaced-endpoint comparison: if (cosh c - 1)/(cosh c' - 1) lies in
/// [1/C, C] then the two diagonals differ by at most arccosh C and their
/// ratio lies in [1/C, C].
pub fn fuzz_displaced_comparison(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let c: f64 = rng.random_range(0.05..=6.0);
        let cp: f64 = rng.random_range(0.05..=6.0);
        let rho1 = rng.random_range(-3.0..=3.0);
        let rho2 = rng.random_range(-3.0..=3.0);
        let ratio = (c.cosh() - 1.0) / (cp.cosh() - 1.0);
        let big_c = ratio.max(1.0 / ratio);
        let d = diagonal(c, rho1, rho2);
        let dp = diagonal(cp, rho1, rho2);
        report.check_le((d - dp).abs(), big_c.acosh());
        let dr = d / dp;
        report.check_le(dr, big_c);
        report.check_le(1.0 / big_c, dr);
    }
    report
}

/// cosh-ratio pinch gives |x - y| <= arccosh C; sinh-ratio pinch gives
/// x/y within [1/C, C].
pub fn fuzz_ratio_pinches(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let x: f64 = rng.random_range(0.01..=8.0);
        let y: f64 = rng.random_range(0.01..=8.0);
        let rc = x.cosh() / y.cosh();
        let cc = rc.max(1.0 / rc);
        report.check_le((x - y).abs(), cc.acosh());
        let rs = x.sinh() / y.sinh();
        let cs = rs.max(1.0 / rs);
        report.check_le(x / y, cs);
        report.check_le(1.0 / cs, x / y);
    }
    report
}

/// Monotone lower bounds of the diagonal function in c: for c <= c',
/// f(c)/f(c') >= (cosh c - 1)/(cosh c' - 1) and
/// (f(c)^2 - 1)/(f(c')^2 - 1) >= the square of that ratio.
pub fn fuzz_diagonal_lower_bounds(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let mut c: f64 = rng.random_range(0.05..=6.0);
        let mut cp: f64 = rng.random_range(0.05..=6.0);
        if c > cp {
            std::mem::swap(&mut c, &mut cp);
        }
        let rho1: f64 = rng.random_range(-3.0..=3.0);
        let rho2 = rng.random_range(-3.0..=3.0);
        let ratio = (c.cosh() - 1.0) / (cp.cosh() - 1.0);
        let f = f_of(c, rho1, rho2);
        let fp = f_of(cp, rho1, rho2);
        report.check_le(ratio, f / fp);
        report.check_le(ratio * ratio, (f * f - 1.0) / (fp * fp - 1.0));
    }
    report
}

/// The family coefficient U computed through V against the independent
/// expanded arrangement
/// `U^2 = (ch^2 + 2 m_c m ch + m_c^2 + m^2 - 1) / sh^2`
/// with ch, sh the half-waist cosh/sinh. Both sides must agree to 1e-12
/// relative for geodesic targets and arbitrary companions.
pub fn fuzz_coefficient_routes(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let target = gl(rng.random_range(0.02..=3.0));
        let companion = gl(sample_lambda(&mut rng));
        let waist = sample_length(&mut rng);
        let u = coefficients(target, companion, waist).unwrap().u;
        let (m, mc) = (target.trace(), companion.trace());
        let (ch, sh) = ((waist / 2.0).cosh(), (waist / 2.0).sinh());
        let expanded = ((ch * ch + 2.0 * mc * m * ch + mc * mc + m * m - 1.0) / (sh * sh)).sqrt();
        report.check_rel(u, expanded, 1e-12);
    }
    report
}

/// Perpendicular between two geodesic cuffs as the third datum varies:
/// (cosh h - 1)/(cosh h0 - 1) against the cusp baseline stays within
/// [(1 + m3)/2, 1] for cone data and [1, (1 + m3)/2] for geodesics.
pub fn fuzz_between_cuffs_ratio(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let l1 = gl(rng.random_range(0.02..=3.0));
        let l2 = gl(rng.random_range(0.02..=3.0));
        let l3 = gl(sample_noncusp_lambda(&mut rng));
        let h = perp_between(l1, l2, l3).unwrap();
        let h0 = perp_between(l1, l2, gl(0.0)).unwrap();
        let ratio = (h.cosh() - 1.0) / (h0.cosh() - 1.0);
        let half = (1.0 + l3.trace()) / 2.0;
        if l3.value() < 0.0 {
            report.check_le(half, ratio);
            report.check_le(ratio, 1.0);
        } else {
            report.check_le(1.0, ratio);
            report.check_le(ratio, half);
        }
    }
    report
}

/// Seam-avoiding self-perpendicular ratio bounds: within [m3^2, 1] for a
/// cone third datum, [1, m3^2] for a geodesic one.
pub fn fuzz_self_perp_ratio(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let l1 = gl(rng.random_range(0.02..=3.0));
        let l2 = gl(sample_noncusp_lambda(&mut rng));
        let l3 = gl(sample_noncusp_lambda(&mut rng));
        let h = self_perp_one(l1, l2, l3).unwrap();
        let h0 = self_perp_one(l1, l2, gl(0.0)).unwrap();
        let ratio = (h.cosh() - 1.0) / (h0.cosh() - 1.0);
        let m3 = l3.trace();
        if l3.value() < 0.0 {
            report.check_le(m3 * m3, ratio);
            report.check_le(ratio, 1.0);
        } else {
            report.check_le(1.0, ratio);
            report.check_le(ratio, m3 * m3);
        }
    }
    report
}

/// Seam-straddling self-perpendicular against the two-cusp baseline:
/// ratio within [k^2, K^2] for k, K the extreme companion traces.
pub fn fuzz_straddling_perp_ratio(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let l1 = gl(rng.random_range(0.02..=3.0));
        let l2 = gl(sample_noncusp_lambda(&mut rng));
        let l3 = gl(sample_noncusp_lambda(&mut rng));
        let h = self_perp_two(l1, l2, l3).unwrap();
        let h0 = self_perp_two(l1, gl(0.0), gl(0.0)).unwrap();
        let ratio = (h.cosh() - 1.0) / (h0.cosh() - 1.0);
        let k = l2.trace().min(l3.trace());
        let kk = l2.trace().max(l3.trace());
        report.check_le(k * k, ratio);
        report.check_le(ratio, kk * kk);
    }
    report
}

/// Arc-level consequences: arcs synthesized over each perpendicular kind
/// differ from their cusp-baseline counterparts by at most arccosh(C_case)
/// additively, and by a factor within [1/C_case, C_case].
pub fn fuzz_arc_comparisons(seed: u64, samples: usize) -> FuzzReport {
    let mut rng = rng(seed);
    let mut report = FuzzReport::new(samples);
    for _ in 0..samples {
        let l1 = gl(rng.random_range(0.02..=3.0));
        let l2 = gl(rng.random_range(0.02..=3.0));
        let l3 = gl(sample_noncusp_lambda(&mut rng));
        let rho1 = rng.random_range(-2.0..=2.0);
        let rho2 = rng.random_range(-2.0..=2.0);
        let m3 = l3.trace();

        // Between-cuffs case.
        let c_case = if l3.value() < 0.0 {
            2.0 / (1.0 + m3)
        } else {
            (1.0 + m3) / 2.0
        };
        let h = perp_between(l1, l2, l3).unwrap();
        let h0 = perp_between(l1, l2, gl(0.0)).unwrap();
        let a = arc_with_displacement(h, rho1, rho2).unwrap();
        let a0 = arc_with_displacement(h0, rho1, rho2).unwrap();
        report.check_le((a - a0).abs(), c_case.acosh());
        report.check_le(a / a0, c_case);
        report.check_le(1.0 / c_case, a / a0);

        // Self-perpendicular case.
        let c_case = if l3.value() < 0.0 {
            1.0 / (m3 * m3)
        } else {
            m3 * m3
        };
        let h = self_perp_one(l1, l2, l3).unwrap();
        let h0 = self_perp_one(l1, l2, gl(0.0)).unwrap();
        let a = arc_with_displacement(h, rho1, rho2).unwrap();
        let a0 = arc_with_displacement(h0, rho1, rho2).unwrap();
        report.check_le((a - a0).abs(), c_case.acosh());
        report.check_le(a / a0, c_case);
        report.check_le(1.0 / c_case, a / a0);

        // Straddling case.
        let k = l2.trace().min(m3);
        let kk = l2.trace().max(m3);
        let c_case = (kk * kk).max(1.0 / (k * k));
        let h = self_perp_two(l1, l2, l3).unwrap();
        let h0 = self_perp_two(l1, gl(0.0), gl(0.0)).unwrap();
        let a = arc_with_displacement(h, rho1, rho2).unwrap();
        let a0 = arc_with_displacement(h0, rho1, rho2).unwrap();
        report.check_le((a - a0).abs(), c_case.acosh());
        report.check_le(a / a0, c_case);
        report.check_le(1.0 / c_case, a / a0);
    }
    report
}
