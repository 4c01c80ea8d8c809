//! Midpoint–radius ("ball") arithmetic over arbitrary-precision floats.
//!
//! An [`Enclosure`] represents the set of reals within `rad` of `mid`.  Every
//! operation preserves containment: if the exact inputs lie in the input
//! enclosures, the exact result lies in the output enclosure.  Midpoints are
//! computed with round-to-nearest and the half-ulp rounding error is folded
//! into the radius; radius arithmetic always rounds up.

pub mod ball64;

use rug::float::Round;
use rug::ops::{DivAssignRound, Pow, PowAssignRound};
use rug::{Float, Rational};
use std::cmp::Ordering;
use std::fmt;

/// Precision (in bits) used for radius bookkeeping.  Radii only need a couple
/// of correct leading digits; 53 bits is plenty and keeps them cheap.
pub const RAD_PREC: u32 = 53;

/// Default working precision in bits (about 64 decimal digits).
pub const DEFAULT_PREC: u32 = 212;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RigorError {
    #[error("division by an enclosure containing zero")]
    DivisorContainsZero,
    #[error("argument outside the domain of {0}")]
    DomainViolation(&'static str),
    #[error("enclosure straddles a branch cut")]
    BranchAmbiguous,
    #[error("precision ceiling of {0} bits reached")]
    PrecisionCeilingReached(u32),
}

/// Three-valued result of comparing an enclosure against an exact bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trichotomy {
    /// The entire enclosure lies strictly below the bound.
    Below,
    /// The entire enclosure lies strictly above the bound.
    Above,
    /// The enclosure contains the bound (or the comparison is undecidable).
    Overlap,
}

/// Working-precision context with an escalation cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prec {
    pub bits: u32,
    pub cap: u32,
}

impl Prec {
    pub fn new(bits: u32, cap: u32) -> Self {
        assert!(bits >= 8 && cap >= bits);
        Prec { bits, cap }
    }

    /// Returns a context with at least doubled working precision, or an error
    /// once the cap has been reached.
    pub fn escalate(self) -> Result<Self, RigorError> {
        if self.bits >= self.cap {
            return Err(RigorError::PrecisionCeilingReached(self.cap));
        }
        Ok(Prec { bits: (self.bits * 2).min(self.cap), cap: self.cap })
    }
}

impl Default for Prec {
    fn default() -> Self {
        Prec { bits: DEFAULT_PREC, cap: 8 * DEFAULT_PREC }
    }
}

// --- radius helpers (all round up) ---

fn rad_up(f: Float) -> Float {
    let (r, _) = Float::with_val_round(RAD_PREC, f, Round::Up);
    r
}

fn rad_add(a: &Float, b: &Float) -> Float {
    rad_up(Float::with_val_round(RAD_PREC, a + b, Round::Up).0)
}

fn rad_mul(a: &Float, b: &Float) -> Float {
    rad_up(Float::with_val_round(RAD_PREC, a * b, Round::Up).0)
}

/// Upper bound on the rounding error of a round-to-nearest result `x` at its
/// own precision: half an ulp, or a (vastly conservative) tiny constant when
/// the result is zero.
fn half_ulp(x: &Float) -> Float {
    if x.is_zero() {
        // A nonzero exact value rounding to 0 would have magnitude below the
        // smallest representable float; 2^-100000 safely dominates that.
        let mut t = Float::with_val(RAD_PREC, 1);
        t >>= 100_000;
        return t;
    }
    let e = x.get_exp().expect("finite nonzero float has an exponent");
    let prec = x.prec() as i64;
    let shift = e as i64 - prec - 1;
    let mut t = Float::with_val(RAD_PREC, 1);
    if shift >= 0 {
        t <<= shift.min(i64::from(i32::MAX)) as u32;
    } else {
        t >>= (-shift).min(i64::from(i32::MAX)) as u32;
    }
    t
}

/// A real number known only up to a certified error radius.
#[derive(Clone)]
pub struct Enclosure {
    mid: Float,
    rad: Float,
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9e} ± {:.2e}", self.mid.to_f64(), self.rad.to_f64())
    }
}

impl Enclosure {
    pub fn new(mid: Float, rad: Float) -> Self {
        debug_assert!(mid.is_finite() && rad.is_finite() && rad >= 0);
        Enclosure { mid, rad: rad_up(rad) }
    }

    pub fn exact_i64(v: i64, prec: u32) -> Self {
        Enclosure { mid: Float::with_val(prec, v), rad: Float::with_val(RAD_PREC, 0) }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact_i64(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::exact_i64(1, prec)
    }

    /// Encloses an exact rational at the given working precision.
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (mid, exact) = Float::with_val_round(prec, q, Round::Nearest);
        let rad = if exact == Ordering::Equal {
            Float::with_val(RAD_PREC, 0)
        } else {
            half_ulp(&mid)
        };
        Enclosure { mid, rad }
    }

    /// Exact double (f64 values are dyadic rationals, so radius 0).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite());
        Enclosure { mid: Float::with_val(prec, v), rad: Float::with_val(RAD_PREC, 0) }
    }

    /// Enclosure of π.
    pub fn pi(prec: u32) -> Self {
        use rug::float::Constant;
        let mid = Float::with_val(prec, Constant::Pi);
        let rad = half_ulp(&mid);
        Enclosure { mid, rad }
    }

    /// Builds an enclosure from directed endpoint evaluations: `lo` must be a
    /// lower bound for the exact infimum and `hi` an upper bound for the
    /// supremum.
    fn from_endpoints(lo: Float, hi: Float, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let up = rad_up(Float::with_val_round(RAD_PREC, &hi - &mid, Round::Up).0);
        let dn = rad_up(Float::with_val_round(RAD_PREC, &mid - &lo, Round::Up).0);
        let rad = if up >= dn { up } else { dn };
        Enclosure { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    /// Lower bound of the enclosure, rounded down.
    pub fn inf(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper bound of the enclosure, rounded up.
    pub fn sup(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        use rug::float::Round as R;
        self.rad.to_f64_round(R::Up)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.clone().abs() <= self.rad
    }

    pub fn contains(&self, v: &Float) -> bool {
        Float::with_val_round(RAD_PREC.max(v.prec()) + 8, &self.mid - v, Round::Nearest)
            .0
            .abs()
            <= self.rad
    }

    /// True when every point of `other` lies inside `self`.
    pub fn encloses(&self, other: &Enclosure) -> bool {
        self.inf() <= other.inf() && other.sup() <= self.sup()
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        let d = Float::with_val_round(RAD_PREC, &self.mid - &other.mid, Round::Down).0.abs();
        d <= rad_add(&self.rad, &other.rad)
    }

    /// Smallest ball containing both enclosures.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        let lo_a = self.inf();
        let lo_b = other.inf();
        let hi_a = self.sup();
        let hi_b = other.sup();
        let lo = if lo_a <= lo_b { lo_a } else { lo_b };
        let hi = if hi_a >= hi_b { hi_a } else { hi_b };
        Self::from_endpoints(lo, hi, self.prec().max(other.prec()))
    }

    // --- arithmetic ---

    pub fn neg(&self) -> Enclosure {
        Enclosure { mid: -self.mid.clone(), rad: self.rad.clone() }
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        let prec = self.prec().max(o.prec());
        let (mid, exact) = Float::with_val_round(prec, &self.mid + &o.mid, Round::Nearest);
        let mut rad = rad_add(&self.rad, &o.rad);
        if exact != Ordering::Equal {
            rad = rad_add(&rad, &half_ulp(&mid));
        }
        Enclosure { mid, rad }
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        let prec = self.prec().max(o.prec());
        let (mid, exact) = Float::with_val_round(prec, &self.mid - &o.mid, Round::Nearest);
        let mut rad = rad_add(&self.rad, &o.rad);
        if exact != Ordering::Equal {
            rad = rad_add(&rad, &half_ulp(&mid));
        }
        Enclosure { mid, rad }
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let prec = self.prec().max(o.prec());
        let (mid, exact) = Float::with_val_round(prec, &self.mid * &o.mid, Round::Nearest);
        // |xy - mx my| <= |mx| rb + |my| ra + ra rb
        let am = rad_up(Float::with_val_round(RAD_PREC, self.mid.abs_ref(), Round::Up).0);
        let bm = rad_up(Float::with_val_round(RAD_PREC, o.mid.abs_ref(), Round::Up).0);
        let mut rad = rad_mul(&am, &o.rad);
        rad = rad_add(&rad, &rad_mul(&bm, &self.rad));
        rad = rad_add(&rad, &rad_mul(&self.rad, &o.rad));
        if exact != Ordering::Equal {
            rad = rad_add(&rad, &half_ulp(&mid));
        }
        Enclosure { mid, rad }
    }

    pub fn sqr(&self) -> Enclosure {
        // Tighter than self*self: the result is certifiably >= 0.
        let prec = self.prec();
        let a = self.mid.clone().abs();
        let lo_abs = Float::with_val_round(prec, &a - &self.rad, Round::Down).0;
        let hi_abs = Float::with_val_round(prec, &a + &self.rad, Round::Up).0;
        let lo = if lo_abs < 0 {
            Float::with_val(prec, 0)
        } else {
            Float::with_val_round(prec, lo_abs.square_ref(), Round::Down).0
        };
        let hi = Float::with_val_round(prec, hi_abs.square_ref(), Round::Up).0;
        Self::from_endpoints(lo, hi, prec)
    }

    pub fn mul_i64(&self, k: i64) -> Enclosure {
        self.mul(&Enclosure::exact_i64(k, self.prec()))
    }

    pub fn div(&self, o: &Enclosure) -> Result<Enclosure, RigorError> {
        let bm = o.mid.clone().abs();
        if bm <= o.rad {
            return Err(RigorError::DivisorContainsZero);
        }
        let prec = self.prec().max(o.prec());
        let (mid, exact) = Float::with_val_round(prec, &self.mid / &o.mid, Round::Nearest);
        // |x/y - mx/my| <= (ra + |mx/my| rb) / (|my| - rb)
        let q_abs = rad_up(Float::with_val_round(RAD_PREC, mid.abs_ref(), Round::Up).0);
        let num = rad_add(&self.rad, &rad_mul(&q_abs, &o.rad));
        let den = Float::with_val_round(RAD_PREC, &bm - &o.rad, Round::Down).0;
        let mut rad = num;
        rad.div_assign_round(&den, Round::Up);
        if exact != Ordering::Equal {
            rad = rad_add(&rad, &half_ulp(&mid));
        }
        Enclosure { mid, rad }.validated()
    }

    fn validated(self) -> Result<Enclosure, RigorError> {
        if self.mid.is_finite() && self.rad.is_finite() {
            Ok(self)
        } else {
            Err(RigorError::DomainViolation("overflow"))
        }
    }

    pub fn recip(&self) -> Result<Enclosure, RigorError> {
        Enclosure::one(self.prec()).div(self)
    }

    /// Enclosure of |x|.
    pub fn abs(&self) -> Enclosure {
        if self.contains_zero() {
            let hi = rad_up(
                Float::with_val_round(RAD_PREC, self.mid.abs_ref(), Round::Up).0,
            );
            let hi = rad_add(&hi, &self.rad);
            let mut mid = Float::with_val(self.prec(), &hi);
            mid /= 2u32;
            let rad = rad_add(
                &rad_up(Float::with_val_round(RAD_PREC, &hi - &mid, Round::Up).0),
                &half_ulp(&mid),
            );
            Enclosure { mid, rad }
        } else {
            Enclosure { mid: self.mid.clone().abs(), rad: self.rad.clone() }
        }
    }

    // --- monotone elementary functions via directed endpoint evaluation ---

    fn monotone_incr(&self, f: impl Fn(Float, Round) -> Float) -> Enclosure {
        let prec = self.prec();
        let lo = f(self.inf(), Round::Down);
        let hi = f(self.sup(), Round::Up);
        Self::from_endpoints(lo, hi, prec)
    }

    pub fn sqrt(&self) -> Result<Enclosure, RigorError> {
        let hi = self.sup();
        if hi < 0 {
            return Err(RigorError::DomainViolation("sqrt"));
        }
        let prec = self.prec();
        let lo = {
            let mut l = self.inf();
            if l < 0 {
                l = Float::with_val(prec, 0);
            }
            let mut l = l;
            l.sqrt_round(Round::Down);
            l
        };
        let hi = {
            let mut h = hi;
            h.sqrt_round(Round::Up);
            h
        };
        Ok(Self::from_endpoints(lo, hi, prec))
    }

    pub fn exp(&self) -> Enclosure {
        self.monotone_incr(|mut x, r| {
            x.exp_round(r);
            x
        })
    }

    pub fn ln(&self) -> Result<Enclosure, RigorError> {
        if self.inf() <= 0 {
            return Err(RigorError::DomainViolation("log"));
        }
        Ok(self.monotone_incr(|mut x, r| {
            x.ln_round(r);
            x
        }))
    }

    pub fn sinh(&self) -> Enclosure {
        self.monotone_incr(|mut x, r| {
            x.sinh_round(r);
            x
        })
    }

    pub fn cosh(&self) -> Enclosure {
        // Decreasing on (-inf,0], increasing on [0,inf).
        let prec = self.prec();
        let a = self.abs();
        let mut lo = a.inf();
        if lo < 0 {
            lo = Float::with_val(prec, 0);
        }
        lo.cosh_round(Round::Down);
        let mut hi = a.sup();
        hi.cosh_round(Round::Up);
        Self::from_endpoints(lo, hi, prec)
    }

    /// Real arccosh; requires the enclosure to lie in [1, ∞).
    pub fn acosh(&self) -> Result<Enclosure, RigorError> {
        if self.inf() < 1 {
            return Err(RigorError::DomainViolation("arccosh"));
        }
        Ok(self.monotone_incr(|mut x, r| {
            x.acosh_round(r);
            x
        }))
    }

    /// Arccosh of a quantity known to be ≥ 1 on mathematical grounds (e.g. a
    /// cosh of a distance) whose enclosure may dip below 1 by rounding.  The
    /// enclosure is first intersected with [1, ∞).
    pub fn acosh_clamped(&self) -> Result<Enclosure, RigorError> {
        if self.sup() < 1 {
            return Err(RigorError::DomainViolation("arccosh"));
        }
        let prec = self.prec();
        let mut lo = self.inf();
        if lo < 1 {
            lo = Float::with_val(prec, 1);
        }
        lo.acosh_round(Round::Down);
        let mut hi = self.sup();
        hi.acosh_round(Round::Up);
        Ok(Self::from_endpoints(lo, hi, prec))
    }

    /// Real artanh; requires the enclosure to lie in (−1, 1).
    pub fn atanh(&self) -> Result<Enclosure, RigorError> {
        if !(self.inf() > -1 && self.sup() < 1) {
            return Err(RigorError::DomainViolation("artanh"));
        }
        Ok(self.monotone_incr(|mut x, r| {
            x.atanh_round(r);
            x
        }))
    }

    /// Like `atanh` but first intersects with [0, 1): for quantities that are
    /// certifiably < 1 and nonnegative on mathematical grounds.
    pub fn atanh_clamped(&self) -> Result<Enclosure, RigorError> {
        if self.sup() >= 1 {
            return Err(RigorError::DomainViolation("artanh"));
        }
        let prec = self.prec();
        let mut lo = self.inf();
        if lo < 0 {
            lo = Float::with_val(prec, 0);
        }
        lo.atanh_round(Round::Down);
        let mut hi = self.sup();
        hi.atanh_round(Round::Up);
        Ok(Self::from_endpoints(lo, hi, prec))
    }

    pub fn sin(&self) -> Enclosure {
        self.sin_or_cos(false)
    }

    pub fn cos(&self) -> Enclosure {
        self.sin_or_cos(true)
    }

    /// Certified sine/cosine.  Critical points inside the interval force the
    /// corresponding extremum into the result; endpoint values are evaluated
    /// with directed rounding.  Over-inclusion of extrema only widens.
    fn sin_or_cos(&self, is_cos: bool) -> Enclosure {
        let prec = self.prec();
        let two_pi = {
            use rug::float::Constant;
            Float::with_val(prec, Constant::Pi) * 2u32
        };
        if self.rad_f64() * 2.0 >= 6.2831 {
            return Self::from_endpoints(
                Float::with_val(prec, -1),
                Float::with_val(prec, 1),
                prec,
            );
        }
        let lo_x = self.inf();
        let hi_x = self.sup();
        let eval = |mut x: Float, r: Round| -> Float {
            if is_cos {
                x.cos_round(r);
            } else {
                x.sin_round(r);
            }
            x
        };
        let mut lo = eval(lo_x.clone(), Round::Down);
        let t = eval(hi_x.clone(), Round::Down);
        if t < lo {
            lo = t;
        }
        let mut hi = eval(lo_x.clone(), Round::Up);
        let t = eval(hi_x.clone(), Round::Up);
        if t > hi {
            hi = t;
        }
        // Maximum at x ≡ max_phase (mod 2π), minimum at max_phase + π, where
        // max_phase = 0 for cos and π/2 for sin.  The multiple-count tests are
        // made generously inclusive: a falsely included extremum only widens.
        let contains_phase = |phase: &Float| -> bool {
            // Is there an integer k with lo_x <= phase + 2πk <= hi_x?
            let a = Float::with_val(prec, &lo_x - phase) / &two_pi;
            let b = Float::with_val(prec, &hi_x - phase) / &two_pi;
            // Slack of 1e-9 periods covers the rounding of a and b; a falsely
            // included extremum only widens the result.
            let ka = (a.to_f64() - 1e-9).ceil();
            let kb = (b.to_f64() + 1e-9).floor();
            kb >= ka
        };
        let pi = {
            use rug::float::Constant;
            Float::with_val(prec, Constant::Pi)
        };
        let (max_phase, min_phase) = if is_cos {
            (Float::with_val(prec, 0), pi.clone())
        } else {
            let half = pi.clone() / 2u32;
            (half.clone(), half + &pi)
        };
        if contains_phase(&max_phase) {
            hi = Float::with_val(prec, 1);
        }
        if contains_phase(&min_phase) {
            lo = Float::with_val(prec, -1);
        }
        Self::from_endpoints(lo, hi, prec)
    }

    // --- comparisons ---

    /// Compares against an exact rational bound; exact float/rational
    /// comparison, never optimistic.
    pub fn cmp_rational(&self, bound: &Rational) -> Trichotomy {
        if self.sup() < *bound {
            Trichotomy::Below
        } else if self.inf() > *bound {
            Trichotomy::Above
        } else {
            Trichotomy::Overlap
        }
    }

    pub fn cmp_i64(&self, bound: i64) -> Trichotomy {
        self.cmp_rational(&Rational::from(bound))
    }

    /// Compares two enclosures.
    pub fn cmp_enc(&self, other: &Enclosure) -> Trichotomy {
        if self.sup() < other.inf() {
            Trichotomy::Below
        } else if self.inf() > other.sup() {
            Trichotomy::Above
        } else {
            Trichotomy::Overlap
        }
    }

    pub fn certainly_positive(&self) -> bool {
        self.inf() > 0
    }

    pub fn certainly_negative(&self) -> bool {
        self.sup() < 0
    }

    /// Rounds the midpoint to a new working precision, folding the rounding
    /// error into the radius.
    pub fn with_prec(&self, prec: u32) -> Enclosure {
        if prec == self.prec() {
            return self.clone();
        }
        let mid = Float::with_val(prec, &self.mid);
        let rad = rad_add(&self.rad, &half_ulp(&mid));
        Enclosure { mid, rad }
    }
}

/// Ordering of enclosures by midpoint (for canonical sorts; not a certified
/// comparison).
pub fn mid_cmp(a: &Enclosure, b: &Enclosure) -> Ordering {
    a.mid.partial_cmp(&b.mid).unwrap_or(Ordering::Equal)
}

/// A complex number known up to componentwise certified error radii.
#[derive(Clone)]
pub struct ComplexEnclosure {
    pub re: Enclosure,
    pub im: Enclosure,
}

impl fmt::Debug for ComplexEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})i", self.re, self.im)
    }
}

impl ComplexEnclosure {
    pub fn new(re: Enclosure, im: Enclosure) -> Self {
        ComplexEnclosure { re, im }
    }

    pub fn from_f64s(re: f64, im: f64, prec: u32) -> Self {
        ComplexEnclosure { re: Enclosure::from_f64(re, prec), im: Enclosure::from_f64(im, prec) }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(Enclosure::zero(prec), Enclosure::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::new(Enclosure::one(prec), Enclosure::zero(prec))
    }

    pub fn real(e: Enclosure) -> Self {
        let p = e.prec();
        Self::new(e, Enclosure::zero(p))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn sqr_c(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_real(&self, s: &Enclosure) -> Self {
        Self::new(self.re.mul(s), self.im.mul(s))
    }

    /// |z|², certifiably nonnegative.
    pub fn norm_sqr(&self) -> Enclosure {
        self.re.sqr().add(&self.im.sqr())
    }

    /// |z| ≥ 0.
    pub fn abs(&self) -> Enclosure {
        self.norm_sqr().sqrt().expect("norm_sqr is nonnegative")
    }

    pub fn div(&self, o: &Self) -> Result<Self, RigorError> {
        let n = o.norm_sqr();
        if !n.certainly_positive() {
            return Err(RigorError::DivisorContainsZero);
        }
        let num = self.mul(&o.conj());
        Ok(Self::new(num.re.div(&n)?, num.im.div(&n)?))
    }

    pub fn recip(&self) -> Result<Self, RigorError> {
        Self::one(self.prec()).div(self)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    /// Principal argument of the box; errors when the box contains 0
    /// (DomainViolation) or meets the branch cut along the closed negative
    /// real axis (BranchAmbiguous).
    pub fn arg(&self) -> Result<Enclosure, RigorError> {
        let prec = self.prec();
        let x_lo = self.re.inf();
        let x_hi = self.re.sup();
        let y_lo = self.im.inf();
        let y_hi = self.im.sup();
        let x_neg = x_lo <= 0;
        let y_straddles = y_lo <= 0 && y_hi >= 0;
        if x_neg && y_straddles {
            if x_hi >= 0 {
                return Err(RigorError::DomainViolation("arg of box containing 0"));
            }
            return Err(RigorError::BranchAmbiguous);
        }
        // Away from the cut the extremes of arg over a box occur at corners.
        let corners = [(&x_lo, &y_lo), (&x_lo, &y_hi), (&x_hi, &y_lo), (&x_hi, &y_hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in corners {
            for r in [Round::Down, Round::Up] {
                let mut v = Float::with_val(prec, y.clone());
                v.atan2_round(x, r);
                match r {
                    Round::Down => {
                        if lo.as_ref().map_or(true, |l| v < *l) {
                            lo = Some(v);
                        }
                    }
                    _ => {
                        if hi.as_ref().map_or(true, |h| v > *h) {
                            hi = Some(v);
                        }
                    }
                }
            }
        }
        Ok(Enclosure::from_endpoints(lo.unwrap(), hi.unwrap(), prec))
    }

    /// Principal logarithm: ln|z| + i·arg(z).
    pub fn ln(&self) -> Result<Self, RigorError> {
        let arg = self.arg()?;
        let n = self.norm_sqr();
        if !n.certainly_positive() {
            return Err(RigorError::DomainViolation("log of box containing 0"));
        }
        let half = Enclosure::from_f64(0.5, self.prec());
        Ok(Self::new(n.ln()?.mul(&half), arg))
    }

    /// Principal square root via polar decomposition.
    pub fn sqrt(&self) -> Result<Self, RigorError> {
        let prec = self.prec();
        let half_arg = self.arg()?.mul(&Enclosure::from_f64(0.5, prec));
        let r = self.norm_sqr().sqrt().expect("nonnegative");
        let sr = r.sqrt().expect("nonnegative");
        Ok(Self::new(sr.mul(&half_arg.cos()), sr.mul(&half_arg.sin())))
    }

    /// Complex exponential.
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self::new(m.mul(&self.im.cos()), m.mul(&self.im.sin()))
    }

    /// Principal arccosh: Re ≥ 0, Im ∈ (−π, π], computed as
    /// 2 log(√((z+1)/2) + √((z−1)/2)).
    ///
    /// When the box straddles the cut (−∞, −1] the imaginary part is returned
    /// as an enclosure around π; on the imaginary-part circle (mod 2π) this
    /// still contains the true value, since Im = ±(π − ε) are adjacent there.
    /// Callers that treat Im circularly (all of this crate) stay sound.
    pub fn acosh(&self) -> Result<Self, RigorError> {
        let prec = self.prec();
        let one = ComplexEnclosure::one(prec);
        let half = Enclosure::from_f64(0.5, prec);
        let two = Enclosure::from_f64(2.0, prec);
        let on_cut = self.im.contains_zero() && self.re.inf() < 1;
        if on_cut {
            if self.re.sup() > -1 {
                // Real part meets (−1, 1): elliptic/parabolic territory where
                // the principal branch cannot be decided from this box.
                return Err(RigorError::BranchAmbiguous);
            }
            // Reflect: −z has Re ≥ 1, so the direct formula is cut-free.
            let a = self.neg().acosh()?;
            let pi = Enclosure::pi(prec);
            return Ok(Self::new(a.re, pi.sub(&a.im)));
        }
        let sp = self.add(&one).mul_real(&half).sqrt()?;
        let sm = self.sub(&one).mul_real(&half).sqrt()?;
        let l = sp.add(&sm).ln()?;
        Ok(Self::new(l.re.mul(&two), l.im.mul(&two)))
    }
}

/// Parses a plain decimal literal (e.g. "-1.52908") into an exact rational.
pub fn rational_from_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = rug::Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
    let den = rug::Integer::from(rug::Integer::from(10u32).pow(frac_part.len() as u32));
    let mut q = Rational::from((num, den));
    if neg {
        q = -q;
    }
    Some(q)
}

/// Number of digits after the decimal point in a literal, if any.
pub fn decimal_places(s: &str) -> usize {
    s.trim().split_once('.').map_or(0, |(_, f)| f.len())
}

/// Ingests a printed decimal: the enclosure is the exact rational value
/// fattened by half an ulp of the last printed digit when a decimal point is
/// present, and exact otherwise.
pub fn enclosure_from_decimal(s: &str, prec: u32) -> Option<Enclosure> {
    let q = rational_from_decimal(s)?;
    let places = decimal_places(s);
    let mut e = Enclosure::from_rational(&q, prec);
    if places > 0 {
        // half-ulp of the printed digit: 0.5 * 10^-places
        let mut h = Float::with_val(RAD_PREC, 10);
        h.pow_assign_round(-(places as i32), Round::Up);
        h /= 2u32;
        let h = rad_up(h);
        e = Enclosure { mid: e.mid, rad: rad_add(&e.rad, &h) };
    }
    Some(e)
}
