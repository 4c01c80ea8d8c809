//! 2×2 complex matrices acting as orientation-preserving isometries of
//! hyperbolic 3-space: the quaternion action on upper half-space, complex
//! translation lengths, axes and their normalizers, and the parameter/trace
//! constructors for the two-generator groups this crate ships fixtures for.

use crate::rigor::{ComplexEnclosure, Enclosure, RigorError, Trichotomy};
use rug::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsomError {
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error("transformation is parabolic or elliptic within enclosures")]
    ParabolicOrElliptic,
    #[error("height of image point cannot be certified positive")]
    ZDecisionFailed,
    #[error("attracting fixed point cannot be decided within enclosures")]
    AmbiguousAttractor,
    #[error("comparison undecidable at current precision")]
    Undecidable,
    #[error("neither branch lands inside the requested parameter box")]
    NoBranchInBox,
    #[error("both branches land inside the requested parameter box")]
    AmbiguousBranch,
    #[error("word uses undeclared generator letter {0:?}")]
    UnknownLetter(char),
}

/// A point x + y·i + z·j of upper half-space (z > 0).
#[derive(Debug, Clone)]
pub struct UhpPoint {
    pub x: Enclosure,
    pub y: Enclosure,
    pub z: Enclosure,
}

impl UhpPoint {
    pub fn new(x: Enclosure, y: Enclosure, z: Enclosure) -> Self {
        UhpPoint { x, y, z }
    }

    /// The basepoint (0, 0, 1).
    pub fn basepoint(prec: u32) -> Self {
        UhpPoint {
            x: Enclosure::zero(prec),
            y: Enclosure::zero(prec),
            z: Enclosure::one(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.x.prec().max(self.y.prec()).max(self.z.prec())
    }
}

/// cosh of the hyperbolic distance: 1 + |x−y|² / (2 x₃ y₃).
pub fn cosh_uhp_distance(p: &UhpPoint, q: &UhpPoint) -> Result<Enclosure, RigorError> {
    let dx = p.x.sub(&q.x).sqr();
    let dy = p.y.sub(&q.y).sqr();
    let dz = p.z.sub(&q.z).sqr();
    let num = dx.add(&dy).add(&dz);
    let den = p.z.mul(&q.z).mul(&Enclosure::from_f64(2.0, p.prec().max(q.prec())));
    if !den.certainly_positive() {
        return Err(RigorError::DomainViolation("distance: height not positive"));
    }
    Ok(Enclosure::one(num.prec()).add(&num.div(&den)?))
}

pub fn uhp_distance(p: &UhpPoint, q: &UhpPoint) -> Result<Enclosure, RigorError> {
    cosh_uhp_distance(p, q)?.acosh_clamped()
}

/// Quaternion x₀ + x₁i + x₂j + x₃k over enclosures; only what the isometry
/// action needs.
#[derive(Clone)]
struct Quat {
    w: Enclosure,
    x: Enclosure,
    y: Enclosure,
    z: Enclosure,
}

impl Quat {
    fn from_complex(c: &ComplexEnclosure) -> Self {
        let p = c.prec();
        Quat { w: c.re.clone(), x: c.im.clone(), y: Enclosure::zero(p), z: Enclosure::zero(p) }
    }

    fn from_point(p: &UhpPoint) -> Self {
        let prec = p.prec();
        Quat { w: p.x.clone(), x: p.y.clone(), y: p.z.clone(), z: Enclosure::zero(prec) }
    }

    fn mul(&self, o: &Quat) -> Quat {
        let (a, b, c, d) = (&self.w, &self.x, &self.y, &self.z);
        let (e, f, g, h) = (&o.w, &o.x, &o.y, &o.z);
        Quat {
            w: a.mul(e).sub(&b.mul(f)).sub(&c.mul(g)).sub(&d.mul(h)),
            x: a.mul(f).add(&b.mul(e)).add(&c.mul(h)).sub(&d.mul(g)),
            y: a.mul(g).sub(&b.mul(h)).add(&c.mul(e)).add(&d.mul(f)),
            z: a.mul(h).add(&b.mul(g)).sub(&c.mul(f)).add(&d.mul(e)),
        }
    }

    fn add(&self, o: &Quat) -> Quat {
        Quat { w: self.w.add(&o.w), x: self.x.add(&o.x), y: self.y.add(&o.y), z: self.z.add(&o.z) }
    }

    fn norm_sqr(&self) -> Enclosure {
        self.w.sqr().add(&self.x.sqr()).add(&self.y.sqr()).add(&self.z.sqr())
    }

    fn recip(&self) -> Result<Quat, RigorError> {
        let n = self.norm_sqr();
        if !n.certainly_positive() {
            return Err(RigorError::DivisorContainsZero);
        }
        Ok(Quat {
            w: self.w.div(&n)?,
            x: self.x.neg().div(&n)?,
            y: self.y.neg().div(&n)?,
            z: self.z.neg().div(&n)?,
        })
    }
}

/// Complex translation length s + i·t of a loxodromic isometry, with s > 0
/// certified and t normalized to (−π, π] (circularly: enclosures may wrap).
#[derive(Debug, Clone)]
pub struct ComplexLength {
    pub value: ComplexEnclosure,
}

impl ComplexLength {
    pub fn re(&self) -> &Enclosure {
        &self.value.re
    }

    pub fn im(&self) -> &Enclosure {
        &self.value.im
    }
}

/// Reduces an angle enclosure into (−π, π] by subtracting the nearest
/// multiple of 2π (chosen by midpoint; the result may overhang the interval
/// ends, which callers treat circularly).
pub fn normalize_angle(e: &Enclosure) -> Enclosure {
    let prec = e.prec();
    let two_pi = Enclosure::pi(prec).mul(&Enclosure::from_f64(2.0, prec));
    let k = (e.mid_f64() / (2.0 * std::f64::consts::PI)).round();
    if k == 0.0 || !k.is_finite() {
        return e.clone();
    }
    e.sub(&two_pi.mul(&Enclosure::from_f64(k, prec)))
}

/// Distance between two angles on the circle (enclosure of the minimal
/// difference |a − b| mod 2π); used for conjugation-aware comparisons.
pub fn angle_diff(a: &Enclosure, b: &Enclosure) -> Enclosure {
    normalize_angle(&a.sub(b)).abs()
}

/// One of the two boundary fixed points of a loxodromic isometry.
#[derive(Debug, Clone)]
pub enum FixedPoint {
    Finite(ComplexEnclosure),
    Infinity,
}

/// A 2×2 unit-determinant complex matrix together with the word over
/// generator letters that produced it (lowercase = generator, uppercase =
/// its inverse).
#[derive(Clone)]
pub struct Isometry {
    pub a: ComplexEnclosure,
    pub b: ComplexEnclosure,
    pub c: ComplexEnclosure,
    pub d: ComplexEnclosure,
    pub word: String,
}

impl std::fmt::Debug for Isometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{:?} {:?}; {:?} {:?}] \"{}\"",
            self.a, self.b, self.c, self.d, self.word
        )
    }
}

impl Isometry {
    pub fn identity(prec: u32) -> Self {
        Isometry {
            a: ComplexEnclosure::one(prec),
            b: ComplexEnclosure::zero(prec),
            c: ComplexEnclosure::zero(prec),
            d: ComplexEnclosure::one(prec),
            word: String::new(),
        }
    }

    pub fn from_entries(
        a: ComplexEnclosure,
        b: ComplexEnclosure,
        c: ComplexEnclosure,
        d: ComplexEnclosure,
        word: impl Into<String>,
    ) -> Self {
        Isometry { a, b, c, d, word: word.into() }
    }

    /// Rescales the matrix by 1/√det so the determinant encloses 1.
    pub fn normalized(self) -> Result<Self, RigorError> {
        let det = self.det();
        let s = det.sqrt()?.recip()?;
        Ok(Isometry {
            a: self.a.mul(&s),
            b: self.b.mul(&s),
            c: self.c.mul(&s),
            d: self.d.mul(&s),
            word: self.word,
        })
    }

    pub fn det(&self) -> ComplexEnclosure {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn trace(&self) -> ComplexEnclosure {
        self.a.add(&self.d)
    }

    /// otr: a·d + b·c, the cosh of the complex distance between the vertical
    /// axis through 0, ∞ and its image.
    pub fn ortho_trace(&self) -> ComplexEnclosure {
        self.a.mul(&self.d).add(&self.b.mul(&self.c))
    }

    pub fn prec(&self) -> u32 {
        self.a.prec().max(self.b.prec()).max(self.c.prec()).max(self.d.prec())
    }

    pub fn mul(&self, o: &Isometry) -> Isometry {
        Isometry {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
            word: format!("{}{}", self.word, o.word),
        }
    }

    /// Exact inverse: adjugate divided by the determinant enclosure.
    pub fn inverse(&self) -> Result<Isometry, RigorError> {
        let det = self.det();
        let word: String = self
            .word
            .chars()
            .rev()
            .map(|ch| {
                if ch.is_ascii_lowercase() {
                    ch.to_ascii_uppercase()
                } else {
                    ch.to_ascii_lowercase()
                }
            })
            .collect();
        Ok(Isometry {
            a: self.d.div(&det)?,
            b: self.b.neg().div(&det)?,
            c: self.c.neg().div(&det)?,
            d: self.a.div(&det)?,
            word,
        })
    }

    pub fn neg(&self) -> Isometry {
        Isometry {
            a: self.a.neg(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.d.neg(),
            word: self.word.clone(),
        }
    }

    /// Action on upper half-space by quaternion multiplication:
    /// g(w) = (αw + β)(γw + δ)⁻¹.
    pub fn apply(&self, w: &UhpPoint) -> Result<UhpPoint, IsomError> {
        let wq = Quat::from_point(w);
        let num = Quat::from_complex(&self.a).mul(&wq).add(&Quat::from_complex(&self.b));
        let den = Quat::from_complex(&self.c).mul(&wq).add(&Quat::from_complex(&self.d));
        let res = num.mul(&den.recip().map_err(RigorError::from)?);
        // The k-component of the exact result is 0; the enclosure must agree.
        debug_assert!(res.z.contains_zero());
        if !res.y.certainly_positive() {
            return Err(IsomError::ZDecisionFailed);
        }
        Ok(UhpPoint { x: res.w, y: res.x, z: res.y })
    }

    /// cosh d((0,0,1), g(0,0,1)): half the squared Frobenius norm for a
    /// unit-determinant matrix.
    pub fn cosh_displacement(&self) -> Enclosure {
        let s = self
            .a
            .norm_sqr()
            .add(&self.b.norm_sqr())
            .add(&self.c.norm_sqr())
            .add(&self.d.norm_sqr());
        s.mul(&Enclosure::from_f64(0.5, s.prec()))
    }

    /// Boundary action on a finite complex point: (az + b)/(cz + d).
    pub fn apply_boundary(&self, z: &ComplexEnclosure) -> Result<ComplexEnclosure, RigorError> {
        let num = self.a.mul(z).add(&self.b);
        let den = self.c.mul(z).add(&self.d);
        num.div(&den)
    }

    pub fn apply_boundary_pt(&self, p: &FixedPoint) -> Result<FixedPoint, RigorError> {
        match p {
            FixedPoint::Finite(z) => {
                let den = self.c.mul(z).add(&self.d);
                if den.contains_zero() {
                    // Image contains ∞; only certifiable if it *is* ∞ exactly,
                    // which callers handle via matrix entries.  Treat as ∞.
                    return Ok(FixedPoint::Infinity);
                }
                Ok(FixedPoint::Finite(self.a.mul(z).add(&self.b).div(&den)?))
            }
            FixedPoint::Infinity => {
                if self.c.contains_zero() {
                    Ok(FixedPoint::Infinity)
                } else {
                    Ok(FixedPoint::Finite(self.a.div(&self.c)?))
                }
            }
        }
    }

    /// Complex translation length 2·arccosh(tr/2), with Re certified positive.
    pub fn complex_length(&self) -> Result<ComplexLength, IsomError> {
        let prec = self.prec();
        let half = Enclosure::from_f64(0.5, prec);
        let z = ComplexEnclosure::new(self.trace().re.mul(&half), self.trace().im.mul(&half));
        let a = match z.acosh() {
            Ok(v) => v,
            Err(RigorError::BranchAmbiguous) => return Err(IsomError::ParabolicOrElliptic),
            Err(e) => return Err(e.into()),
        };
        let two = Enclosure::from_f64(2.0, prec);
        let re = a.re.mul(&two);
        let im = normalize_angle(&a.im.mul(&two));
        if !re.certainly_positive() {
            return Err(IsomError::ParabolicOrElliptic);
        }
        Ok(ComplexLength { value: ComplexEnclosure::new(re, im) })
    }

    /// Is the entry c certifiably nonzero / exactly zero?
    fn c_is_exact_zero(&self) -> bool {
        self.c.re.is_exact()
            && self.c.im.is_exact()
            && self.c.re.mid().is_zero()
            && self.c.im.mid().is_zero()
    }

    /// Boundary fixed points (repelling, attracting).
    pub fn fixed_points(&self) -> Result<(FixedPoint, FixedPoint), IsomError> {
        let prec = self.prec();
        if self.c_is_exact_zero() {
            // g(z) = (az + b)/d with fixed points ∞ and b/(d − a).
            let da = self.d.sub(&self.a);
            if da.contains_zero() {
                return Err(IsomError::ParabolicOrElliptic);
            }
            let finite = self.b.div(&da).map_err(RigorError::from)?;
            // ∞ is attracting iff |a| > 1.
            return match self.a.norm_sqr().cmp_i64(1) {
                Trichotomy::Above => Ok((FixedPoint::Finite(finite), FixedPoint::Infinity)),
                Trichotomy::Below => Ok((FixedPoint::Infinity, FixedPoint::Finite(finite))),
                Trichotomy::Overlap => Err(IsomError::AmbiguousAttractor),
            };
        }
        if self.c.norm_sqr().cmp_i64(0) != Trichotomy::Above {
            return Err(IsomError::Undecidable);
        }
        let disc = self.trace().mul(&self.trace()).sub(&ComplexEnclosure::from_f64s(4.0, 0.0, prec));
        let sq = match disc.sqrt() {
            Ok(v) => v,
            Err(RigorError::BranchAmbiguous) => {
                // Discriminant near the negative real axis: the two roots are
                // ± of a nearly-imaginary number; recover them from −disc.
                let sqn = disc.neg().sqrt().map_err(RigorError::from)?;
                ComplexEnclosure::new(sqn.im.neg(), sqn.re)
            }
            Err(e) => return Err(e.into()),
        };
        let two_c = self.c.mul(&ComplexEnclosure::from_f64s(2.0, 0.0, prec));
        let ad = self.a.sub(&self.d);
        let z_plus = ad.add(&sq).div(&two_c).map_err(RigorError::from)?;
        let z_minus = ad.sub(&sq).div(&two_c).map_err(RigorError::from)?;
        // Attracting endpoint: |cz + d| > 1 (so that |g'(z)| < 1).
        let m_plus = self.c.mul(&z_plus).add(&self.d).norm_sqr().cmp_i64(1);
        let m_minus = self.c.mul(&z_minus).add(&self.d).norm_sqr().cmp_i64(1);
        match (m_plus, m_minus) {
            (Trichotomy::Above, Trichotomy::Below) => {
                Ok((FixedPoint::Finite(z_minus), FixedPoint::Finite(z_plus)))
            }
            (Trichotomy::Below, Trichotomy::Above) => {
                Ok((FixedPoint::Finite(z_plus), FixedPoint::Finite(z_minus)))
            }
            _ => Err(IsomError::AmbiguousAttractor),
        }
    }

    /// A unit-determinant matrix taking (0, ∞) to (repelling, attracting)
    /// fixed points of g, so that m⁻¹ g m is diagonal with the attracting
    /// direction at ∞.
    pub fn normalizer_to_axis(&self) -> Result<Isometry, IsomError> {
        let prec = self.prec();
        let (z0, z1) = self.fixed_points()?;
        normalizer_for_endpoints(&z0, &z1, prec)
    }

    /// Distance from the basepoint to the axis:
    /// arccosh √((cosh d − cos t)/(cosh s − cos t)).
    pub fn axis_basepoint_distance(&self, basepoint: &UhpPoint) -> Result<Enclosure, IsomError> {
        let len = self.complex_length()?;
        let image = self.apply(basepoint)?;
        let cosh_d = cosh_uhp_distance(basepoint, &image).map_err(RigorError::from)?;
        self.axis_distance_from_parts(&cosh_d, &len)
    }

    /// Same, with cosh d(x, gx) and the length already in hand.
    pub fn axis_distance_from_parts(
        &self,
        cosh_d: &Enclosure,
        len: &ComplexLength,
    ) -> Result<Enclosure, IsomError> {
        let cosh_s = len.re().cosh();
        let cos_t = len.im().cos();
        let den = cosh_s.sub(&cos_t);
        if !den.certainly_positive() {
            return Err(IsomError::Undecidable);
        }
        let ratio = cosh_d.sub(&cos_t).div(&den).map_err(RigorError::from)?;
        let root = ratio.sqrt().map_err(RigorError::from)?;
        Ok(root.acosh_clamped().map_err(RigorError::from)?)
    }

    /// Adjusts the working precision of every entry (the word is kept, so the
    /// matrix can also be rebuilt exactly from higher-precision generators).
    pub fn with_prec(&self, prec: u32) -> Isometry {
        Isometry {
            a: self.a.with_prec(prec),
            b: self.b.with_prec(prec),
            c: self.c.with_prec(prec),
            d: self.d.with_prec(prec),
            word: self.word.clone(),
        }
    }
}

/// Builds the unit-determinant map sending 0 to `z0` and ∞ to `z1`.
pub fn normalizer_for_endpoints(
    z0: &FixedPoint,
    z1: &FixedPoint,
    prec: u32,
) -> Result<Isometry, IsomError> {
    match (z0, z1) {
        (FixedPoint::Finite(z0), FixedPoint::Finite(z1)) => {
            let diff = z1.sub(z0);
            let inv = diff.recip().map_err(RigorError::from)?;
            Ok(Isometry {
                a: z1.clone(),
                b: z0.mul(&inv),
                c: ComplexEnclosure::one(prec),
                d: inv,
                word: String::new(),
            })
        }
        (FixedPoint::Finite(z0), FixedPoint::Infinity) => Ok(Isometry {
            a: ComplexEnclosure::one(prec),
            b: z0.clone(),
            c: ComplexEnclosure::zero(prec),
            d: ComplexEnclosure::one(prec),
            word: String::new(),
        }),
        (FixedPoint::Infinity, FixedPoint::Finite(z1)) => {
            let i = ComplexEnclosure::new(Enclosure::zero(prec), Enclosure::one(prec));
            Ok(Isometry {
                a: i.mul(z1),
                b: i.clone(),
                c: i,
                d: ComplexEnclosure::zero(prec),
                word: String::new(),
            })
        }
        (FixedPoint::Infinity, FixedPoint::Infinity) => Err(IsomError::ParabolicOrElliptic),
    }
}

/// τ = diag(i, −i): a half-turn about the vertical axis.
pub fn tau(prec: u32) -> Isometry {
    let i = ComplexEnclosure::new(Enclosure::zero(prec), Enclosure::one(prec));
    Isometry {
        a: i.clone(),
        b: ComplexEnclosure::zero(prec),
        c: ComplexEnclosure::zero(prec),
        d: i.neg(),
        word: String::new(),
    }
}

/// Named generator matrices for word evaluation.
#[derive(Clone)]
pub struct Generators {
    entries: Vec<(char, Isometry, Isometry)>, // letter, matrix, inverse
}

impl Generators {
    pub fn new(gens: Vec<(char, Isometry)>) -> Result<Self, IsomError> {
        let mut entries = Vec::with_capacity(gens.len());
        for (ch, g) in gens {
            let inv = g.inverse().map_err(RigorError::from)?;
            entries.push((ch, g, inv));
        }
        Ok(Generators { entries })
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.entries.iter().map(|(c, _, _)| *c)
    }

    pub fn get(&self, letter: char) -> Result<&Isometry, IsomError> {
        let lower = letter.to_ascii_lowercase();
        for (c, g, inv) in &self.entries {
            if *c == lower {
                return Ok(if letter.is_ascii_uppercase() { inv } else { g });
            }
        }
        Err(IsomError::UnknownLetter(letter))
    }

    pub fn prec(&self) -> u32 {
        self.entries.iter().map(|(_, g, _)| g.prec()).max().unwrap_or(53)
    }

    /// Evaluates a word left-to-right: c₁c₂…cₙ ↦ M(c₁)·M(c₂)·…·M(cₙ).
    pub fn eval_word(&self, word: &str) -> Result<Isometry, IsomError> {
        let mut acc = Isometry::identity(self.prec());
        for ch in word.chars() {
            acc = acc.mul(self.get(ch)?);
        }
        acc.word = word.to_string();
        Ok(acc)
    }
}

/// The three complex parameters (L′, D′, R′) that determine the two
/// generators.
#[derive(Debug, Clone)]
pub struct BoxParameters {
    pub lp: ComplexEnclosure,
    pub dp: ComplexEnclosure,
    pub rp: ComplexEnclosure,
}

/// Rational bounds of a parameter box: for each of the six real coordinates
/// (Re L′, Im L′, Re D′, Im D′, Re R′, Im R′) a closed [min, max] interval.
#[derive(Debug, Clone)]
pub struct ParameterBox {
    pub bounds: [(Rational, Rational); 6],
}

impl ParameterBox {
    /// True when the parameter enclosures overlap the box (the membership
    /// test callers use for branch selection).
    pub fn admits(&self, p: &BoxParameters) -> bool {
        let coords = [
            &p.lp.re, &p.lp.im, &p.dp.re, &p.dp.im, &p.rp.re, &p.rp.im,
        ];
        coords.iter().zip(&self.bounds).all(|(e, (lo, hi))| {
            e.cmp_rational(lo) != Trichotomy::Below && e.cmp_rational(hi) != Trichotomy::Above
        })
    }
}

/// Builds the generators f = diag(√L′, 1/√L′) and
/// w = [√R′(√D′+1/√D′)/2, √R′(√D′−1/√D′)/2; (√D′−1/√D′)/(2√R′), (√D′+1/√D′)/(2√R′)].
pub fn parameters_to_generators(p: &BoxParameters) -> Result<(Isometry, Isometry), IsomError> {
    let prec = p.lp.prec().max(p.dp.prec()).max(p.rp.prec());
    for z in [&p.lp, &p.dp, &p.rp] {
        if z.contains_zero() {
            return Err(RigorError::DomainViolation("zero box parameter").into());
        }
    }
    let sl = p.lp.sqrt().map_err(RigorError::from)?;
    let sd = p.dp.sqrt().map_err(RigorError::from)?;
    let sr = p.rp.sqrt().map_err(RigorError::from)?;
    let sd_inv = sd.recip().map_err(RigorError::from)?;
    let sr_inv = sr.recip().map_err(RigorError::from)?;
    let half = Enclosure::from_f64(0.5, prec);
    let plus = sd.add(&sd_inv).mul_real(&half);
    let minus = sd.sub(&sd_inv).mul_real(&half);
    let f = Isometry {
        a: sl.clone(),
        b: ComplexEnclosure::zero(prec),
        c: ComplexEnclosure::zero(prec),
        d: sl.recip().map_err(RigorError::from)?,
        word: "f".to_string(),
    };
    let w = Isometry {
        a: sr.mul(&plus),
        b: sr.mul(&minus),
        c: sr_inv.mul(&minus),
        d: sr_inv.mul(&plus),
        word: "w".to_string(),
    };
    Ok((f, w))
}

/// Recovers (L′, D′, R′) from the traces p = tr f, q = tr w, r = tr f⁻¹w,
/// resolving the ± branches by membership in the supplied box:
/// L′ = ((p ± √(p²−4))/2)², R′ = (qL′ − r√L′)/(r√L′ − q),
/// D′ = ((q√R′ ± √(q²R′ − (1+R′)²))/(1+R′))².
pub fn traces_to_parameters(
    p: &ComplexEnclosure,
    q: &ComplexEnclosure,
    r: &ComplexEnclosure,
    target: &ParameterBox,
) -> Result<BoxParameters, IsomError> {
    let prec = p.prec().max(q.prec()).max(r.prec());
    let four = ComplexEnclosure::from_f64s(4.0, 0.0, prec);
    let one = ComplexEnclosure::one(prec);
    let half = Enclosure::from_f64(0.5, prec);
    let disc = p.mul(p).sub(&four).sqrt().map_err(RigorError::from)?;
    let mut candidates = Vec::new();
    for l_sign in [1.0, -1.0] {
        let sd = disc.mul_real(&Enclosure::from_f64(l_sign, prec));
        let u = p.add(&sd).mul_real(&half); // √L′ candidate (eigenvalue)
        let lp = u.mul(&u);
        let sl = u.clone();
        // R′ from L′:
        let rsl = r.mul(&sl);
        let den = rsl.sub(q);
        if den.contains_zero() {
            continue;
        }
        let rp = match q.mul(&lp).sub(&rsl).div(&den) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if rp.contains_zero() {
            continue;
        }
        let sr = match rp.sqrt() {
            Ok(v) => v,
            Err(_) => continue,
        };
        // D′ from R′ (both signs):
        let q2r = q.mul(q).mul(&rp);
        let opr = one.add(&rp);
        let inner = match q2r.sub(&opr.mul(&opr)).sqrt() {
            Ok(v) => v,
            Err(_) => continue,
        };
        for d_sign in [1.0, -1.0] {
            let sgn = inner.mul_real(&Enclosure::from_f64(d_sign, prec));
            let num = q.mul(&sr).add(&sgn);
            let v = match num.div(&opr) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let dp = v.mul(&v);
            candidates.push(BoxParameters { lp: lp.clone(), dp, rp: rp.clone() });
        }
    }
    let mut hits: Vec<BoxParameters> =
        candidates.into_iter().filter(|c| target.admits(c)).collect();
    match hits.len() {
        0 => Err(IsomError::NoBranchInBox),
        1 => Ok(hits.pop().unwrap()),
        _ => Err(IsomError::AmbiguousBranch),
    }
}
