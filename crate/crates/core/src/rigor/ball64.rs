//! Low-precision ball arithmetic on `f64` for the search hot loop.
//!
//! The group-element search multiplies tens of millions of matrices; doing
//! that in arbitrary precision would dominate the runtime.  `B64` keeps the
//! same containment contract as [`super::Enclosure`] but with hardware floats:
//! every operation inflates the radius by a blanket factor that dominates the
//! round-to-nearest error of IEEE-754 arithmetic.  Anything that overflows or
//! turns non-finite degrades to an "unknown" ball whose comparisons never
//! certify, so over-wide results can only cause over-inclusion, never a missed
//! group element.  Decisions that matter are re-verified at full precision.

use super::{Enclosure, RigorError};
use rug::float::Round;
use rug::Float;

/// Multiplicative slack dominating one round-to-nearest error (2^-52 relative)
/// plus the error of the radius bookkeeping itself.
const INFL: f64 = 1.0 + 4.0e-15;
/// Additive slack dominating underflow in radius bookkeeping.
const TINY: f64 = 1.0e-290;

/// Upper bound on the absolute rounding error of a nearest-rounded result `m`.
#[inline]
fn ulp_err(m: f64) -> f64 {
    m.abs() * 2.3e-16 + TINY
}

/// Real ball over f64.  Radius `f64::INFINITY` marks an unknown value.
#[derive(Debug, Clone, Copy)]
pub struct B64 {
    pub m: f64,
    pub r: f64,
}

impl B64 {
    #[inline]
    pub fn exact(v: f64) -> Self {
        B64 { m: v, r: 0.0 }
    }

    pub fn unknown() -> Self {
        B64 { m: 0.0, r: f64::INFINITY }
    }

    #[inline]
    fn guard(self) -> Self {
        if self.m.is_finite() && self.r.is_finite() {
            self
        } else {
            Self::unknown()
        }
    }

    /// Outward-rounded conversion from a full-precision enclosure.
    pub fn from_enclosure(e: &Enclosure) -> Self {
        let m = e.mid_f64();
        if !m.is_finite() {
            return Self::unknown();
        }
        // Conversion error of the midpoint plus the original radius.
        let conv = Float::with_val_round(super::RAD_PREC, e.mid() - Float::with_val(60, m), Round::Up)
            .0
            .to_f64_round(Round::Up)
            .abs();
        let r = (e.rad_f64() + conv) * INFL + TINY;
        B64 { m, r }.guard()
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        let m = self.m + o.m;
        B64 { m, r: (self.r + o.r + ulp_err(m)) * INFL + TINY }.guard()
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        let m = self.m - o.m;
        B64 { m, r: (self.r + o.r + ulp_err(m)) * INFL + TINY }.guard()
    }

    #[inline]
    pub fn neg(self) -> Self {
        B64 { m: -self.m, r: self.r }
    }

    #[inline]
    pub fn mul(self, o: Self) -> Self {
        let m = self.m * o.m;
        let r = (self.m.abs() * o.r + o.m.abs() * self.r + self.r * o.r + ulp_err(m)) * INFL + TINY;
        B64 { m, r }.guard()
    }

    #[inline]
    pub fn sqr(self) -> Self {
        // Certifiably nonnegative.
        let a = (self.m.abs() - self.r).max(0.0);
        let b = self.m.abs() + self.r;
        let lo = (a * a) * (1.0 - 4.0e-15) - TINY;
        let hi = (b * b) * INFL + TINY;
        let m = 0.5 * (lo + hi);
        B64 { m, r: ((hi - lo) * 0.5 + ulp_err(m)) * INFL + TINY }.guard()
    }

    /// Square root of a mathematically nonnegative quantity (clamps at 0).
    pub fn sqrt_clamped(self) -> Self {
        if !self.m.is_finite() || !self.r.is_finite() {
            return Self::unknown();
        }
        let lo = ((self.m - self.r).max(0.0)).sqrt() * (1.0 - 4.0e-15);
        let hi = ((self.m + self.r).max(0.0)).sqrt() * INFL + TINY;
        let m = 0.5 * (lo + hi);
        B64 { m, r: ((hi - lo) * 0.5 + ulp_err(m)) * INFL + TINY }.guard()
    }

    #[inline]
    pub fn sup(self) -> f64 {
        // The inflation factor must round away from zero on the correct side:
        // for a negative upper bound, multiplying by INFL would push it the
        // wrong way (down), so shrink toward zero instead.
        let s = self.m + self.r;
        s * if s >= 0.0 { INFL } else { 1.0 - 4.0e-15 } + TINY
    }

    #[inline]
    pub fn inf(self) -> f64 {
        (self.m - self.r) * if self.m >= self.r { 1.0 - 4.0e-15 } else { INFL } - TINY
    }

    /// True only when the whole ball certifiably exceeds `bound`.
    #[inline]
    pub fn certainly_above(self, bound: f64) -> bool {
        self.r.is_finite() && self.inf() > bound
    }

    /// True only when the whole ball is certifiably below `bound`.
    #[inline]
    pub fn certainly_below(self, bound: f64) -> bool {
        self.r.is_finite() && self.sup() < bound
    }

    #[inline]
    pub fn overlaps(self, o: Self) -> bool {
        !(self.r.is_finite() && o.r.is_finite()) || (self.m - o.m).abs() <= (self.r + o.r) * INFL + TINY
    }
}

/// Complex ball.
#[derive(Debug, Clone, Copy)]
pub struct C64 {
    pub re: B64,
    pub im: B64,
}

impl C64 {
    pub fn from_enclosure(z: &super::ComplexEnclosure) -> Self {
        C64 { re: B64::from_enclosure(&z.re), im: B64::from_enclosure(&z.im) }
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        C64 { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        C64 { re: self.re.sub(o.re), im: self.im.sub(o.im) }
    }

    #[inline]
    pub fn neg(self) -> Self {
        C64 { re: self.re.neg(), im: self.im.neg() }
    }

    #[inline]
    pub fn mul(self, o: Self) -> Self {
        C64 {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    pub fn norm_sqr(self) -> B64 {
        self.re.sqr().add(self.im.sqr())
    }

    #[inline]
    pub fn overlaps(self, o: Self) -> bool {
        self.re.overlaps(o.re) && self.im.overlaps(o.im)
    }
}

/// 2×2 complex matrix ball (row-major a b / c d), assumed unit determinant.
#[derive(Debug, Clone, Copy)]
pub struct M64 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl M64 {
    pub fn identity() -> M64 {
        let one = C64 { re: B64::exact(1.0), im: B64::exact(0.0) };
        let zero = C64 { re: B64::exact(0.0), im: B64::exact(0.0) };
        M64 { a: one, b: zero, c: zero, d: one }
    }

    /// Adjugate, which is the inverse for unit-determinant matrices.
    pub fn inverse_unit_det(&self) -> M64 {
        M64 { a: self.d, b: self.b.neg(), c: self.c.neg(), d: self.a }
    }

    pub fn mul(&self, o: &M64) -> M64 {
        M64 {
            a: self.a.mul(o.a).add(self.b.mul(o.c)),
            b: self.a.mul(o.b).add(self.b.mul(o.d)),
            c: self.c.mul(o.a).add(self.d.mul(o.c)),
            d: self.c.mul(o.b).add(self.d.mul(o.d)),
        }
    }

    /// cosh of the displacement of the basepoint (0,0,1): half the squared
    /// Frobenius norm, for unit-determinant matrices.
    pub fn cosh_displacement(&self) -> B64 {
        let s = self
            .a
            .norm_sqr()
            .add(self.b.norm_sqr())
            .add(self.c.norm_sqr())
            .add(self.d.norm_sqr());
        B64 { m: s.m * 0.5, r: s.r * 0.5 * INFL + TINY }.guard()
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        self.a.add(self.d)
    }

    pub fn overlaps(&self, o: &M64) -> bool {
        self.a.overlaps(o.a) && self.b.overlaps(o.b) && self.c.overlaps(o.c) && self.d.overlaps(o.d)
    }

    /// Componentwise midpoints and radii as flat arrays (re/im interleaved).
    pub fn components(&self) -> ([f64; 8], [f64; 8]) {
        let cs = [self.a, self.b, self.c, self.d];
        let mut m = [0.0; 8];
        let mut r = [0.0; 8];
        for (i, z) in cs.iter().enumerate() {
            m[2 * i] = z.re.m;
            m[2 * i + 1] = z.im.m;
            r[2 * i] = z.re.r;
            r[2 * i + 1] = z.im.r;
        }
        (m, r)
    }

    /// Flips the sign of every entry.
    pub fn negated(&self) -> M64 {
        M64 { a: self.a.neg(), b: self.b.neg(), c: self.c.neg(), d: self.d.neg() }
    }
}

/// Storage form of [`M64`] at roughly two-thirds the size: midpoints keep
/// full f64 precision, radii are rounded *up* to f32, so re-inflating always
/// yields a superset of the original enclosure.
#[derive(Debug, Clone, Copy)]
pub struct M64c {
    mids: [f64; 8],
    rads: [f32; 8],
}

fn rad_up32(r: f64) -> f32 {
    let s = r as f32;
    if (s as f64) >= r {
        s
    } else {
        f32::from_bits(s.to_bits() + 1)
    }
}

impl M64c {
    pub fn from_m64(m: &M64) -> Self {
        let (mids, rads) = m.components();
        let mut r32 = [0.0f32; 8];
        for i in 0..8 {
            r32[i] = rad_up32(rads[i]);
        }
        M64c { mids: mids, rads: r32 }
    }

    pub fn to_m64(&self) -> M64 {
        let z = |i: usize| C64 {
            re: B64 { m: self.mids[2 * i], r: self.rads[2 * i] as f64 },
            im: B64 { m: self.mids[2 * i + 1], r: self.rads[2 * i + 1] as f64 },
        };
        M64 { a: z(0), b: z(1), c: z(2), d: z(3) }
    }
}

impl B64 {
    pub fn to_err(self) -> Result<Self, RigorError> {
        if self.r.is_finite() {
            Ok(self)
        } else {
            Err(RigorError::DomainViolation("non-finite low-precision ball"))
        }
    }
}
