//! Extended-precision re-evaluation of the crate's closed-form formulas.
//!
//! Everything here recomputes the same mathematical expressions as the
//! library but in 192-bit arithmetic (57+ decimal digits), so double
//! rounding, cancellation, and overflow handling in the f64 paths can be
//! checked against a near-exact reference. Inputs are f64 values and are
//! taken as exact binary rationals.

use astro_float::{BigFloat, Consts, RoundingMode};

use conelength::{TorusSpec, XPieceSpec};

pub const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Oracle {
    cc: Consts,
}

impl Oracle {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn big(x: f64) -> BigFloat {
        BigFloat::from_f64(x, PREC)
    }

    /// Round to nearest f64 through the decimal printer.
    pub fn narrow(x: &BigFloat) -> f64 {
        format!("{x}").parse().expect("decimal form")
    }

    fn half_of(x: f64) -> BigFloat {
        Self::big(x).div(&Self::big(2.0), PREC, RM)
    }

    pub fn cosh(&mut self, x: &BigFloat) -> BigFloat {
        x.cosh(PREC, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, x: &BigFloat) -> BigFloat {
        x.sinh(PREC, RM, &mut self.cc)
    }

    pub fn acosh(&mut self, x: &BigFloat) -> BigFloat {
        x.acosh(PREC, RM, &mut self.cc)
    }

    pub fn cos(&mut self, x: &BigFloat) -> BigFloat {
        x.cos(PREC, RM, &mut self.cc)
    }

    pub fn sin(&mut self, x: &BigFloat) -> BigFloat {
        x.sin(PREC, RM, &mut self.cc)
    }

    pub fn acos(&mut self, x: &BigFloat) -> BigFloat {
        x.acos(PREC, RM, &mut self.cc)
    }

    pub fn asinh(&mut self, x: &BigFloat) -> BigFloat {
        x.asinh(PREC, RM, &mut self.cc)
    }

    pub fn sqrt(&mut self, x: &BigFloat) -> BigFloat {
        x.sqrt(PREC, RM)
    }

    pub fn add(a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PREC, RM)
    }

    pub fn sub(a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PREC, RM)
    }

    pub fn mul(a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PREC, RM)
    }

    pub fn div(a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PREC, RM)
    }

    /// Unified trace: cos(|lambda|/2) for cone data, cosh(lambda/2) for
    /// geodesics (cosine is even, so the sign needs no special handling).
    pub fn trace(&mut self, lambda: f64) -> BigFloat {
        let half = Self::half_of(lambda);
        if lambda <= 0.0 {
            self.cos(&half)
        } else {
            self.cosh(&half)
        }
    }

    pub fn sine_trace(&mut self, lambda: f64) -> BigFloat {
        if lambda <= 0.0 {
            let half = Self::half_of(-lambda);
            self.sin(&half)
        } else {
            let half = Self::half_of(lambda);
            self.sinh(&half)
        }
    }

    /// (m, u, v) of a pants boundary across a waist.
    pub fn coefficients(
        &mut self,
        target: f64,
        companion: f64,
        waist: f64,
    ) -> (BigFloat, BigFloat, BigFloat) {
        let m = self.trace(target);
        let mc = self.trace(companion);
        let half = Self::half_of(waist);
        let ch = self.cosh(&half);
        let sh = self.sinh(&half);
        let v = Self::div(&Self::add(&Self::mul(&m, &ch), &mc), &sh);
        let one = Self::big(1.0);
        let u2 = Self::add(&Self::mul(&Self::sub(&v, &m), &Self::add(&v, &m)), &one);
        let u = self.sqrt(&u2);
        (m, u, v)
    }

    /// Family member length on an X-piece:
    /// cosh(l/2) = u_a u_b cosh((t+n) ell) + v_a v_b - m_a m_b.
    pub fn family_length(&mut self, spec: &XPieceSpec, n: i64) -> f64 {
        let (ma, ua, va) = self.coefficients(
            spec.side_a.target.value(),
            spec.side_a.companion.value(),
            spec.waist,
        );
        let (mb, ub, vb) = self.coefficients(
            spec.side_b.target.value(),
            spec.side_b.companion.value(),
            spec.waist,
        );
        let arg = Self::mul(
            &Self::add(&Self::big(spec.twist), &Self::big(n as f64)),
            &Self::big(spec.waist),
        );
        let ch = self.cosh(&arg);
        let rhs = Self::add(
            &Self::mul(&Self::mul(&ua, &ub), &ch),
            &Self::sub(&Self::mul(&va, &vb), &Self::mul(&ma, &mb)),
        );
        let half_l = self.acosh(&rhs);
        Self::narrow(&Self::mul(&half_l, &Self::big(2.0)))
    }

    /// Height of the one-holed torus over its waist:
    /// cosh(h0) = 1/tanh^2(ell/2) + m / sinh^2(ell/2).
    pub fn torus_height(&mut self, waist: f64, boundary: f64) -> BigFloat {
        let half = Self::half_of(waist);
        let ch = self.cosh(&half);
        let sh = self.sinh(&half);
        let sh2 = Self::mul(&sh, &sh);
        let m = self.trace(boundary);
        let rhs = Self::div(&Self::add(&Self::mul(&ch, &ch), &m), &sh2);
        self.acosh(&rhs)
    }

    /// Family member length on the one-holed torus:
    /// cosh(l/2) = cosh((t+n) ell / 2) cosh(h0/2).
    pub fn torus_family_length(&mut self, spec: &TorusSpec, n: i64) -> f64 {
        let h0 = self.torus_height(spec.waist, spec.boundary.value());
        let half_h0 = Self::div(&h0, &Self::big(2.0));
        let ch_h0 = self.cosh(&half_h0);
        let arg = Self::div(
            &Self::mul(
                &Self::add(&Self::big(spec.twist), &Self::big(n as f64)),
                &Self::big(spec.waist),
            ),
            &Self::big(2.0),
        );
        let ch = self.cosh(&arg);
        let rhs = Self::mul(&ch, &ch_h0);
        let half_l = self.acosh(&rhs);
        Self::narrow(&Self::mul(&half_l, &Self::big(2.0)))
    }
}
