//! Certified ortholength spectra: the common perpendiculars between (lifts
//! of) two closed geodesics, with complex lengths and endpoint positions on
//! each geodesic, and tube radii derived from shortest self-ortholines.
//!
//! Everything happens in coordinates where the first geodesic's axis is the
//! vertical line through the origin: a normalizer q takes (0, ∞) to its
//! fixed points, a second normalizer h takes the vertical axis to the
//! conjugated second axis, and for every bounded conjugator p the product
//! ph = q⁻¹·p·q·h carries the vertical axis to one lift of the target
//! geodesic.  The ortho-trace of ph is the cosh of the complex distance
//! between the two axes; the perpendicular itself is the axis of
//! ph·τ·ph⁻¹·τ, whose boundary endpoints ±T are antipodal, and endpoint
//! positions are logarithms of T reduced to each geodesic's torus.

use crate::dirichlet::DirichletDomain;
use crate::isometry::{normalize_angle, tau, ComplexLength, Isometry, IsomError, UhpPoint};
use crate::rigor::ball64::{C64, M64};
use crate::rigor::{ComplexEnclosure, Enclosure, RigorError, Trichotomy};
use crate::spectrum::{big_list, BigList, GeodesicClass, SpectrumError};
use crate::ExecMode;
use rug::Rational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrthoError {
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Isom(#[from] IsomError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("ortholine endpoint orientation undecidable within enclosures")]
    OrientationUndecided,
    #[error("candidate ortholine parameters overlap only partially")]
    UndecidableDedup,
    #[error("axis comparison undecidable within enclosures")]
    Undecided,
    #[error("no self-ortholine found below the cutoff cap")]
    NoOrtholine,
    #[error("supplied element list was built with a bound below the conjugator bound")]
    InsufficientBound,
}

/// Endpoint position on an oriented geodesic, as a complex coordinate on the
/// torus (−λ/2, λ/2] × (−π, π] where λ is the geodesic's real length.
#[derive(Debug, Clone)]
pub struct Basing {
    pub position: ComplexEnclosure,
}

/// A common perpendicular between two (lifts of) closed geodesics, oriented
/// from source to target.
#[derive(Debug, Clone)]
pub struct Ortholine {
    /// Complex orthodistance, Re > 0.
    pub length: ComplexEnclosure,
    pub source: Basing,
    pub target: Basing,
    pub source_id: usize,
    pub target_id: usize,
    /// Number of enumerated lifts that reduced to this ortholine.
    pub lifts: usize,
    /// Set when a cutoff comparison stayed undecided and the ortholine was
    /// included as a safe over-approximation.
    pub warned: bool,
}

/// Conjugator displacement bound: every ortholine of real length ≤ δ between
/// the two geodesics is realized by a conjugator h with
/// d(x, hx) ≤ ½(λ_f + λ_g) + δ + r.
pub fn ortho_conjugator_bound(
    lambda_f: &Enclosure,
    lambda_g: &Enclosure,
    delta: &Rational,
    r: &Enclosure,
) -> Result<Enclosure, OrthoError> {
    let prec = lambda_f.prec().max(lambda_g.prec()).max(r.prec());
    let half = Enclosure::from_f64(0.5, prec);
    let d = Enclosure::from_rational(delta, prec);
    Ok(lambda_f.add(lambda_g).mul(&half).add(&d).add(r))
}

/// Reduces a position along a geodesic of complex length ℓ to the torus
/// (−Re ℓ/2, Re ℓ/2] × (−π, π]: full loops shift the position by ℓ itself,
/// so the real part is brought into range by subtracting a multiple of ℓ,
/// then the angle is reduced modulo 2π.
pub fn reduce_to_torus(v: &ComplexEnclosure, len: &ComplexLength) -> ComplexEnclosure {
    let lam = len.re().mid_f64();
    let k = (v.re.mid_f64() / lam).round();
    let reduced = if k == 0.0 {
        v.clone()
    } else {
        let prec = v.prec();
        let kf = Enclosure::from_f64(k, prec);
        v.sub(&ComplexEnclosure::new(len.re().mul(&kf), len.im().mul(&kf)))
    };
    ComplexEnclosure::new(reduced.re.clone(), normalize_angle(&reduced.im))
}

/// True when two positions on the same geodesic possibly coincide on the
/// torus (difference overlaps a lattice point of ⟨ℓ, 2πi⟩); a `false` is a
/// certified distinctness.
pub fn torus_overlap(a: &ComplexEnclosure, b: &ComplexEnclosure, len: &ComplexLength) -> bool {
    let d = a.sub(b);
    let k = (d.re.mid_f64() / len.re().mid_f64()).round();
    let prec = d.prec();
    let kf = Enclosure::from_f64(k, prec);
    let dd = d.sub(&ComplexEnclosure::new(len.re().mul(&kf), len.im().mul(&kf)));
    dd.re.contains_zero() && normalize_angle(&dd.im).contains_zero()
}

/// The two boundary fixed points of an isometry whose axis is a common
/// perpendicular to the vertical axis (so the points are antipodal ±T and the
/// lower-left entry is certifiably nonzero).  No attracting/repelling
/// decision is needed.
fn antipodal_fixed_points(
    k: &Isometry,
) -> Result<(ComplexEnclosure, ComplexEnclosure), OrthoError> {
    if k.c.contains_zero() {
        return Err(OrthoError::Undecided);
    }
    let prec = k.prec();
    let tr = k.trace();
    let disc = tr.mul(&tr).sub(&ComplexEnclosure::from_f64s(4.0, 0.0, prec));
    let sq = match disc.sqrt() {
        Ok(v) => v,
        Err(RigorError::BranchAmbiguous) => {
            let sqn = disc.neg().sqrt().map_err(RigorError::from)?;
            ComplexEnclosure::new(sqn.im.neg(), sqn.re)
        }
        Err(e) => return Err(e.into()),
    };
    let two_c = k.c.mul(&ComplexEnclosure::from_f64s(2.0, 0.0, prec));
    let ad = k.a.sub(&k.d);
    let z_plus = ad.add(&sq).div(&two_c)?;
    let z_minus = ad.sub(&sq).div(&two_c)?;
    Ok((z_plus, z_minus))
}

/// Chooses the endpoint T of the perpendicular's axis so that the ortholine
/// is oriented from the vertical axis toward the target lift ph(vertical).
///
/// The perpendicular meets the target axis at a foot whose ground projection
/// is a positive multiple of the correct T.  That foot is computed without
/// knowing T's sign: pulled back by ph⁻¹ the target axis is vertical and the
/// pulled-back source axis has endpoints W₀ = −b/a, W₁ = −d/c, so the
/// pulled-back perpendicular (being perpendicular to the vertical axis) has
/// antipodal endpoints ±√(W₀W₁) and meets it at height √|W₀W₁|; pushing that
/// apex forward by ph gives the foot.
fn oriented_endpoint(
    ph: &Isometry,
    z_plus: &ComplexEnclosure,
    z_minus: &ComplexEnclosure,
) -> Result<ComplexEnclosure, OrthoError> {
    let prec = ph.prec();
    let num = ph.b.mul(&ph.d).norm_sqr();
    let den = ph.a.mul(&ph.c).norm_sqr();
    if !den.certainly_positive() {
        // a ≈ 0 or c ≈ 0: the target lift passes through ∞, a vertical line
        // over the remaining finite endpoint Z; the foot projects onto Z
        // itself, so compare directions with Z directly.
        let z = if ph.d.contains_zero() {
            ph.a.div(&ph.c)?
        } else if ph.c.contains_zero() {
            ph.b.div(&ph.d)?
        } else {
            return Err(OrthoError::OrientationUndecided);
        };
        return pick_by_direction(&z.re, &z.im, z_plus, z_minus);
    }
    let height = num.div(&den)?.sqrt()?.sqrt()?;
    let apex = UhpPoint::new(Enclosure::zero(prec), Enclosure::zero(prec), height);
    let foot = ph.apply(&apex)?;
    pick_by_direction(&foot.x, &foot.y, z_plus, z_minus)
}

/// Returns whichever of ±T has a certifiably positive dot product with the
/// given ground direction.
fn pick_by_direction(
    x: &Enclosure,
    y: &Enclosure,
    z_plus: &ComplexEnclosure,
    z_minus: &ComplexEnclosure,
) -> Result<ComplexEnclosure, OrthoError> {
    let dot = x.mul(&z_plus.re).add(&y.mul(&z_plus.im));
    if dot.certainly_positive() {
        Ok(z_plus.clone())
    } else if dot.certainly_negative() {
        Ok(z_minus.clone())
    } else {
        Err(OrthoError::OrientationUndecided)
    }
}

/// Principal log, tolerant of the branch cut: a value straddling the
/// negative real axis is rotated by π first (the result is used modulo 2πi,
/// so adding iπ back keeps the same torus point with a tight enclosure).
fn ln_mod_2pi(z: &ComplexEnclosure) -> Result<ComplexEnclosure, RigorError> {
    match z.ln() {
        Err(RigorError::BranchAmbiguous) => {
            let l = z.neg().ln()?;
            let pi = Enclosure::pi(z.prec());
            Ok(ComplexEnclosure::new(l.re, l.im.add(&pi)))
        }
        other => other,
    }
}

fn m64_of(iso: &Isometry) -> M64 {
    M64 {
        a: C64::from_enclosure(&iso.a),
        b: C64::from_enclosure(&iso.b),
        c: C64::from_enclosure(&iso.c),
        d: C64::from_enclosure(&iso.d),
    }
}

fn otr64(m: &M64) -> C64 {
    m.a.mul(m.d).add(m.b.mul(m.c))
}

/// All ortholines of real length ≤ δ from `f_class`'s geodesic to
/// `g_class`'s geodesic, oriented source → target, with endpoint basings
/// reduced to each geodesic's torus.  Pass the same class twice for the
/// self-spectrum.
pub fn orthospectrum(
    f_class: &GeodesicClass,
    g_class: &GeodesicClass,
    domain: &DirichletDomain,
    delta: &Rational,
    mode: ExecMode,
) -> Result<Vec<Ortholine>, OrthoError> {
    let len_f = f_class.rep.complex_length()?;
    let len_g = g_class.rep.complex_length()?;
    let bound = ortho_conjugator_bound(len_f.re(), len_g.re(), delta, &domain.spine_radius)?;
    let big = big_list(domain, &bound, mode)?;
    orthospectrum_in(f_class, g_class, domain, delta, &big, mode)
}

/// Same spectrum as [`orthospectrum`], computed against a pre-enumerated
/// element list.  The list must have been built with a bound at least the
/// conjugator bound for this pair and cutoff (a larger list is sound: extra
/// conjugators are rejected by the certified prefilter).  Callers computing
/// many ortholength spectra over one domain amortize the enumeration this
/// way, which is the dominant cost.
pub fn orthospectrum_in(
    f_class: &GeodesicClass,
    g_class: &GeodesicClass,
    domain: &DirichletDomain,
    delta: &Rational,
    big: &BigList,
    mode: ExecMode,
) -> Result<Vec<Ortholine>, OrthoError> {
    let f = &f_class.rep;
    let g = &g_class.rep;
    let len_f = f.complex_length()?;
    let len_g = g.complex_length()?;
    let required =
        ortho_conjugator_bound(len_f.re(), len_g.re(), delta, &domain.spine_radius)?;
    if required.sub(&big.bound).certainly_positive() {
        return Err(OrthoError::InsufficientBound);
    }
    let q = f.normalizer_to_axis()?;
    let qi = q.inverse()?;
    let g0 = qi.mul(g).mul(&q);
    // In the self-spectrum g0 already stabilizes the vertical axis (it is f
    // in its own axis coordinates), so no second normalizer is needed; two
    // distinct closed geodesics never share an axis, so off-diagonal entries
    // enclosing zero cannot occur otherwise.
    let h = if g0.b.contains_zero() && g0.c.contains_zero() {
        Isometry::identity(g0.prec())
    } else {
        g0.normalizer_to_axis()?
    };
    let qih = (qi.clone(), q.clone(), h.clone());

    // Certified prefilter in f64 balls: otr(ph) = cosh(orthodistance) obeys
    // sinh²(Re d) ≥ |otr|² − 1, so |otr|² certifiably above cosh²δ means
    // Re d > δ.
    let delta_f64 = delta.to_f64();
    let cosh_delta_sq = (delta_f64.cosh() * (1.0 + 1e-12)).powi(2) * (1.0 + 1e-12);
    let (qi64, q64, h64) = (m64_of(&qih.0), m64_of(&qih.1), m64_of(&qih.2));
    let mut candidates: Vec<Option<usize>> = vec![None]; // identity conjugator
    for i in big.in_bound() {
        let p64 = big.nodes[i].mat();
        let ph64 = qi64.mul(&p64).mul(&q64).mul(&h64);
        let o = otr64(&ph64);
        if !o.norm_sqr().certainly_above(cosh_delta_sq) {
            candidates.push(Some(i));
        }
    }

    let evaluated: Vec<Result<Option<Ortholine>, OrthoError>> =
        crate::exec_map(mode, &candidates, |cand| {
            let ph = match cand {
                None => qih.2.clone(),
                Some(i) => {
                    let p = big.realize(*i, domain);
                    qih.0.mul(&p).mul(&qih.1).mul(&qih.2)
                }
            };
            let otr = ph.ortho_trace();
            // Same-axis conjugators (the stabilizer of the geodesic itself):
            // otr = ±1 with the vertical axis mapped to itself, possibly
            // reversed.  They carry no ortholine.
            let one = ComplexEnclosure::one(ph.prec());
            if otr.sub(&one).contains_zero() || otr.add(&one).contains_zero() {
                let fixes = ph.b.contains_zero() && ph.c.contains_zero();
                let swaps = ph.a.contains_zero() && ph.d.contains_zero();
                if fixes || swaps {
                    return Ok(None);
                }
                return Err(OrthoError::Undecided);
            }
            let d = match otr.acosh() {
                Ok(v) => v,
                // Intersecting axes (purely imaginary distance): no
                // perpendicular segment of positive length.
                Err(RigorError::BranchAmbiguous) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            if !d.re.certainly_positive() {
                return Ok(None);
            }
            let mut warned = false;
            match d.re.cmp_rational(delta) {
                Trichotomy::Above => return Ok(None),
                Trichotomy::Overlap => warned = true,
                Trichotomy::Below => {}
            }
            // The perpendicular is the axis of ph·τ·ph⁻¹·τ with antipodal
            // endpoints ±T.
            let t_mat = tau(ph.prec());
            let k = ph.mul(&t_mat).mul(&ph.inverse()?).mul(&t_mat);
            let (z_plus, z_minus) = antipodal_fixed_points(&k)?;
            let t = oriented_endpoint(&ph, &z_plus, &z_minus)?;
            let src = reduce_to_torus(&ln_mod_2pi(&t)?, &len_f);
            let phi = ph.inverse()?;
            let t_back = phi.apply_boundary(&t)?;
            let pi_i = ComplexEnclosure::new(
                Enclosure::zero(ph.prec()),
                Enclosure::pi(ph.prec()),
            );
            let tgt = reduce_to_torus(&ln_mod_2pi(&t_back)?.add(&pi_i), &len_g);
            Ok(Some(Ortholine {
                length: d,
                source: Basing { position: src },
                target: Basing { position: tgt },
                source_id: f_class.label,
                target_id: g_class.label,
                lifts: 1,
                warned,
            }))
        });

    let mut lines: Vec<Ortholine> = Vec::new();
    for r in evaluated {
        if let Some(o) = r? {
            lines.push(o);
        }
    }
    // Canonical order, then eliminate duplicates with identical parameters:
    // same orthodistance and the same endpoint positions on both tori.
    lines.sort_by(|a, b| {
        a.length
            .re
            .mid_f64()
            .total_cmp(&b.length.re.mid_f64())
            .then(a.length.im.mid_f64().total_cmp(&b.length.im.mid_f64()))
            .then(a.source.position.re.mid_f64().total_cmp(&b.source.position.re.mid_f64()))
            .then(a.source.position.im.mid_f64().total_cmp(&b.source.position.im.mid_f64()))
            .then(a.target.position.re.mid_f64().total_cmp(&b.target.position.re.mid_f64()))
            .then(a.target.position.im.mid_f64().total_cmp(&b.target.position.im.mid_f64()))
    });
    // In the self-spectrum the same perpendicular is enumerated in both
    // orientations, and reversing exactly swaps the two basings (the final
    // point is based on the inward tangent); keep one representative.
    let self_spectrum = f_class.label == g_class.label;
    let mut out: Vec<Ortholine> = Vec::new();
    for o in lines {
        if let Some(prev) = out.iter_mut().find(|p| {
            let same_len = p.length.re.overlaps(&o.length.re)
                && p.length.im.overlaps(&o.length.im);
            same_len
                && ((torus_overlap(&p.source.position, &o.source.position, &len_f)
                    && torus_overlap(&p.target.position, &o.target.position, &len_g))
                    || (self_spectrum
                        && torus_overlap(&p.source.position, &o.target.position, &len_f)
                        && torus_overlap(&p.target.position, &o.source.position, &len_g)))
        }) {
            prev.lifts += 1;
            prev.warned |= o.warned;
        } else {
            out.push(o);
        }
    }
    Ok(out)
}

/// Tube radius: half the real length of the shortest self-ortholine, found
/// with an adaptive cutoff starting at log 3 and doubling until nonempty.
pub fn tube_radius(
    g_class: &GeodesicClass,
    domain: &DirichletDomain,
    mode: ExecMode,
) -> Result<Enclosure, OrthoError> {
    let mut delta = Rational::from((10986i64, 10000i64)); // ⊇ log 3
    for _ in 0..6 {
        let lines = orthospectrum(g_class, g_class, domain, &delta, mode)?;
        if let Some(min) = shortest_re(&lines) {
            let prec = min.prec();
            return Ok(min.div(&Enclosure::exact_i64(2, prec))?);
        }
        delta *= 2;
    }
    Err(OrthoError::NoOrtholine)
}

/// Certified minimum of the real lengths, when the list is nonempty.
fn shortest_re(lines: &[Ortholine]) -> Option<Enclosure> {
    let mut best: Option<Enclosure> = None;
    for o in lines {
        let cand = &o.length.re;
        best = Some(match best {
            None => cand.clone(),
            Some(cur) => match cur.cmp_enc(cand) {
                Trichotomy::Below => cur,
                Trichotomy::Above => cand.clone(),
                Trichotomy::Overlap => {
                    // Keep an enclosure of the minimum of the two.
                    let lo = cur.inf().min(&cand.inf());
                    let hi = cur.sup().min(&cand.sup());
                    let prec = cur.prec();
                    let mid = rug::Float::with_val(prec, &lo + &hi) / 2u32;
                    let rad = rug::Float::with_val_round(
                        crate::rigor::RAD_PREC,
                        &hi - &lo,
                        rug::float::Round::Up,
                    )
                    .0 / 2u32;
                    Enclosure::new(mid, rad)
                }
            },
        });
    }
    best
}
