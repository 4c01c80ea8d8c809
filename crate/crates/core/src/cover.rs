//! Covering-obstruction arithmetic: volume-based degree bounds, thick-tube
//! length cutoffs from the tube-packing density bound, and per-geodesic
//! exclusion checks built on the length and ortholength spectra.
//!
//! The emitted report is advisory: it lists, for each geodesic class whose
//! tube radius reaches log 3/2 and each candidate covering degree, whether a
//! specific certified rule excludes that degree.  Surviving pairs are stated
//! as "not excluded by these criteria" — the report never claims a cover
//! exists.

use crate::isometry::normalize_angle;
use crate::ortho::{torus_overlap, Ortholine};
use crate::rigor::{ComplexEnclosure, Enclosure, RigorError, Trichotomy};
use crate::spectrum::{GeodesicClass, SpectrumTable};
use rug::Rational;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error("volume ratio enclosure straddles an integer")]
    DegreeUndecided,
    #[error("no self-ortholine table supplied for class {0}")]
    MissingSelfOrthos(usize),
    #[error("class label {0} not present in the spectrum")]
    UnknownClass(usize),
}

/// The single rule a verdict cites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    DegreeBound,
    LengthRatio,
    OrtholineCount,
    InterGeodesicDistance,
    InvolutionParity,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::DegreeBound => "degree-bound",
            Rule::LengthRatio => "length-ratio",
            Rule::OrtholineCount => "ortholine-count",
            Rule::InterGeodesicDistance => "inter-geodesic-distance",
            Rule::InvolutionParity => "involution-parity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Excluded(Rule),
    NotExcluded,
    Undecided(Rule),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Excluded(r) => write!(f, "EXCLUDED\t{r}"),
            Verdict::NotExcluded => write!(f, "NOT-EXCLUDED\t-"),
            Verdict::Undecided(r) => write!(f, "UNDECIDED\t{r}"),
        }
    }
}

/// Volume of a tube of radius r about a closed geodesic of length l:
/// π·l·sinh²(r).
pub fn tube_volume(l: &Enclosure, r: &Enclosure) -> Enclosure {
    let s = r.sinh();
    Enclosure::pi(l.prec()).mul(l).mul(&s).mul(&s)
}

/// Largest integer p with p·min_vol certifiably at most vol.
pub fn max_cover_degree(vol: &Enclosure, min_vol: &Enclosure) -> Result<u32, CoverError> {
    let ratio = vol.div(min_vol)?;
    let p = ratio.mid_f64().floor();
    if !(p >= 1.0 && p < 1e6) {
        return Err(CoverError::DegreeUndecided);
    }
    let p = p as u32;
    let prec = vol.prec();
    let below = min_vol.mul(&Enclosure::exact_i64(p as i64, prec));
    let above = min_vol.mul(&Enclosure::exact_i64(p as i64 + 1, prec));
    // p·m ≤ v and (p+1)·m > v, both certified.
    if below.cmp_enc(vol) == Trichotomy::Above || above.cmp_enc(vol) != Trichotomy::Above {
        return Err(CoverError::DegreeUndecided);
    }
    Ok(p)
}

/// Length bound for geodesics with embedded tubes of radius log 3/2: solves
/// π·l·sinh²(log 3/2) = density·vol for l.  Since sinh²(log 3/2) = 1/3
/// exactly, this is 3·density·vol/π.
pub fn thick_length_cutoff(vol: &Enclosure, density: &Rational) -> Result<Enclosure, CoverError> {
    let prec = vol.prec();
    let d = Enclosure::from_rational(density, prec);
    let three = Enclosure::exact_i64(3, prec);
    Ok(vol.mul(&d).mul(&three).div(&Enclosure::pi(prec))?)
}

/// Per-length-group covering degrees not excluded by the shortest-geodesic
/// constraint: a degree-x covered image of the group's geodesics would be a
/// shortest geodesic downstairs, so its length Re(ℓ)/x may not certifiably
/// exceed the shortest length upstairs (whose image is at most as long).
pub struct DegreeCandidates {
    pub group: usize,
    pub retained: Vec<u32>,
    /// Retained degrees whose comparison was an enclosure overlap rather
    /// than a certified strict inequality.
    pub tight: Vec<u32>,
}

pub fn degree_candidates_by_length(
    spectrum: &SpectrumTable,
    shortest: &Enclosure,
    degrees: std::ops::RangeInclusive<u32>,
) -> Result<Vec<DegreeCandidates>, CoverError> {
    let mut out = Vec::new();
    for (gi, g) in spectrum.groups.iter().enumerate() {
        let mut cand = DegreeCandidates { group: gi, retained: Vec::new(), tight: Vec::new() };
        for x in degrees.clone() {
            let covered = g.length.re.div(&Enclosure::exact_i64(x as i64, shortest.prec()))?;
            match covered.cmp_enc(shortest) {
                Trichotomy::Above => {}
                Trichotomy::Below => cand.retained.push(x),
                Trichotomy::Overlap => {
                    cand.retained.push(x);
                    cand.tight.push(x);
                }
            }
        }
        out.push(cand);
    }
    Ok(out)
}

/// Groups a self-ortholine table into real-length classes (certified overlap
/// chains), sorted by length.
fn real_length_classes(self_orthos: &[Ortholine]) -> Vec<Vec<&Ortholine>> {
    let mut sorted: Vec<&Ortholine> = self_orthos.iter().collect();
    sorted.sort_by(|a, b| a.length.re.mid_f64().total_cmp(&b.length.re.mid_f64()));
    let mut classes: Vec<Vec<&Ortholine>> = Vec::new();
    for o in sorted {
        match classes.last_mut() {
            Some(cls) if cls.iter().any(|p| p.length.re.overlaps(&o.length.re)) => cls.push(o),
            _ => classes.push(vec![o]),
        }
    }
    classes
}

/// Whether a degree-x self-cover is consistent with the self-ortholine table.
///
/// A degree-x covering restricted to the geodesic pushes every perpendicular
/// down isometrically and pulls every downstairs perpendicular back to
/// exactly x translates, so each length class upstairs must have a multiple
/// of x members, the shortest class must have at least x, and the shortest
/// class must be invariant under the deck translation — a shift of both
/// endpoint positions by (ℓ + 2πik)/x for some k < x, modulo the lattice
/// ⟨ℓ, 2πi⟩.
pub fn ortholine_count_check(
    self_orthos: &[Ortholine],
    degree: u32,
    geodesic: &GeodesicClass,
) -> Verdict {
    if self_orthos.is_empty() {
        return Verdict::Undecided(Rule::OrtholineCount);
    }
    let classes = real_length_classes(self_orthos);
    if (classes[0].len() as u32) < degree {
        return Verdict::Excluded(Rule::OrtholineCount);
    }
    for cls in &classes {
        if cls.len() as u32 % degree != 0 {
            return Verdict::Excluded(Rule::OrtholineCount);
        }
    }
    deck_translation_check(&classes[0], degree, geodesic)
}

/// Tests whether some deck translation by (ℓ + 2πik)/x maps the multiset of
/// unoriented endpoint pairs of the given ortholines to itself.
fn deck_translation_check(
    class: &[&Ortholine],
    degree: u32,
    geodesic: &GeodesicClass,
) -> Verdict {
    let len = &geodesic.length;
    let prec = len.re().prec();
    let x = Enclosure::exact_i64(degree as i64, prec);
    let two_pi = Enclosure::pi(prec).mul(&Enclosure::exact_i64(2, prec));
    for k in 0..degree {
        let re_shift = match len.re().div(&x) {
            Ok(v) => v,
            Err(_) => return Verdict::Undecided(Rule::OrtholineCount),
        };
        let im_raw = len
            .im()
            .add(&two_pi.mul(&Enclosure::exact_i64(k as i64, prec)));
        let im_shift = match im_raw.div(&x) {
            Ok(v) => v,
            Err(_) => return Verdict::Undecided(Rule::OrtholineCount),
        };
        let shift = ComplexEnclosure::new(re_shift, normalize_angle(&im_shift));
        let mut used = vec![false; class.len()];
        let mut all_matched = true;
        for o in class {
            let src = o.source.position.add(&shift);
            let tgt = o.target.position.add(&shift);
            let mut matched = false;
            for (i, c) in class.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let direct = torus_overlap(&c.source.position, &src, len)
                    && torus_overlap(&c.target.position, &tgt, len);
                let swapped = torus_overlap(&c.source.position, &tgt, len)
                    && torus_overlap(&c.target.position, &src, len);
                if direct || swapped {
                    used[i] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                all_matched = false;
                break;
            }
        }
        if all_matched {
            return Verdict::NotExcluded;
        }
    }
    // Every candidate shift certifiably misses some endpoint pair.
    Verdict::Excluded(Rule::OrtholineCount)
}

/// Degree-2 exclusion from an odd geodesic count.  A 2-fold cover carries a
/// free deck involution, which permutes the finitely many closed geodesics of
/// any fixed real length (the rotation angle may flip sign, so counts are
/// totalled across conjugate angle groups).  An odd count forces a setwise
/// invariant geodesic; freeness makes the restricted involution a rotation by
/// half the length, so that geodesic double-covers a downstairs geodesic of
/// half its length.  If some real length with an odd total count is
/// certifiably shorter than the candidate class, that image would be shorter
/// than the covered geodesic — contradicting its minimality downstairs.
///
/// Requires the spectrum to be complete up to the candidate's length, which
/// holds because the candidate class belongs to the table.
pub fn involution_parity_check(spectrum: &SpectrumTable, class: &GeodesicClass) -> Verdict {
    // Merge groups whose real parts overlap (groups are sorted by real part)
    // into families, totalling geodesic counts per real length.
    let mut families: Vec<(Vec<&Enclosure>, usize)> = Vec::new();
    for g in &spectrum.groups {
        match families.last_mut() {
            Some((res, n)) if res.iter().any(|r| r.overlaps(&g.length.re)) => {
                res.push(&g.length.re);
                *n += g.multiplicity();
            }
            _ => families.push((vec![&g.length.re], g.multiplicity())),
        }
    }
    for (res, n) in &families {
        if *n % 2 == 1
            && res.iter().all(|r| r.cmp_enc(class.length.re()) == Trichotomy::Below)
        {
            return Verdict::Excluded(Rule::InvolutionParity);
        }
    }
    Verdict::NotExcluded
}

/// Whether the cross-ortholine table forces a connected preimage: any cross
/// perpendicular certifiably shorter than the threshold rules out two
/// distinct geodesics both covering the same shortest geodesic.
pub fn inter_geodesic_distance_check(cross_orthos: &[Ortholine], threshold: &Rational) -> Verdict {
    let mut overlap = false;
    for o in cross_orthos {
        match o.length.re.cmp_rational(threshold) {
            Trichotomy::Below => return Verdict::Excluded(Rule::InterGeodesicDistance),
            Trichotomy::Overlap => overlap = true,
            Trichotomy::Above => {}
        }
    }
    if overlap {
        Verdict::Undecided(Rule::InterGeodesicDistance)
    } else {
        Verdict::NotExcluded
    }
}

/// Everything the report needs.  `self_orthos` maps class labels of
/// thick-tube geodesics (tube radius ≥ log 3/2) to their self-ortholine
/// tables; `cross_orthos` holds tables between pairs of such classes.
pub struct CoverInputs {
    pub volume: Enclosure,
    pub min_volume: Enclosure,
    pub density: Rational,
    pub spectrum: SpectrumTable,
    pub self_orthos: Vec<(usize, Vec<Ortholine>)>,
    pub cross_orthos: Vec<(usize, usize, Vec<Ortholine>)>,
    /// Free-text slot for arguments outside machine scope (orientability,
    /// homology).
    pub notes: String,
}

#[derive(Debug, Clone)]
pub struct ClassFinding {
    pub class_label: usize,
    pub degree: u32,
    pub verdict: Verdict,
}

pub struct ObstructionReport {
    pub max_degree: u32,
    pub thick_length_cutoff: Enclosure,
    pub findings: Vec<ClassFinding>,
    pub single_component: Vec<(usize, usize, Verdict)>,
    pub undecided: Vec<String>,
    pub notes: String,
}

impl ObstructionReport {
    /// Surviving (class, degree) pairs.
    pub fn survivors(&self) -> Vec<(usize, u32)> {
        self.findings
            .iter()
            .filter(|f| f.verdict == Verdict::NotExcluded)
            .map(|f| (f.class_label, f.degree))
            .collect()
    }
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "covering obstruction report")?;
        writeln!(f, "max degree\t{}", self.max_degree)?;
        writeln!(f, "thick length cutoff\t{:.6}", self.thick_length_cutoff.mid_f64())?;
        for fin in &self.findings {
            writeln!(f, "class {}\tdegree {}\t{}", fin.class_label, fin.degree, fin.verdict)?;
        }
        for (a, b, v) in &self.single_component {
            writeln!(f, "classes {a},{b}\tshared-image\t{v}")?;
        }
        if self.undecided.is_empty() {
            writeln!(f, "undecided\t(none)")?;
        } else {
            for u in &self.undecided {
                writeln!(f, "undecided\t{u}")?;
            }
        }
        if !self.notes.is_empty() {
            writeln!(f, "notes\t{}", self.notes)?;
        }
        let survivors = self.survivors();
        if survivors.is_empty() {
            writeln!(f, "conclusion\tall candidate degrees excluded")?;
        } else {
            for (c, d) in survivors {
                writeln!(f, "conclusion\tclass {c} degree {d} not excluded by these criteria")?;
            }
        }
        Ok(())
    }
}

/// Composes the degree bound, length-ratio, involution-parity,
/// ortholine-count, and inter-geodesic-distance rules over every thick-tube
/// class.
pub fn build_report(inputs: &CoverInputs) -> Result<ObstructionReport, CoverError> {
    let max_degree = max_cover_degree(&inputs.volume, &inputs.min_volume)?;
    let cutoff = thick_length_cutoff(&inputs.volume, &inputs.density)?;
    let mut undecided = Vec::new();

    // The shortest geodesic length upstairs: groups are sorted by real part.
    let shortest = inputs
        .spectrum
        .groups
        .first()
        .map(|g| g.length.re.clone())
        .ok_or(CoverError::UnknownClass(0))?;

    let mut findings = Vec::new();
    for (label, self_table) in &inputs.self_orthos {
        let class = inputs
            .spectrum
            .classes
            .iter()
            .find(|c| c.label == *label)
            .ok_or(CoverError::UnknownClass(*label))?;
        for degree in 2..=max_degree {
            let covered =
                class.length.re().div(&Enclosure::exact_i64(degree as i64, shortest.prec()))?;
            let verdict = match covered.cmp_enc(&shortest) {
                Trichotomy::Above => Verdict::Excluded(Rule::LengthRatio),
                Trichotomy::Overlap => Verdict::Undecided(Rule::LengthRatio),
                Trichotomy::Below => {
                    let parity = if degree == 2 {
                        involution_parity_check(&inputs.spectrum, class)
                    } else {
                        Verdict::NotExcluded
                    };
                    match parity {
                        Verdict::NotExcluded => {
                            ortholine_count_check(self_table, degree, class)
                        }
                        v => v,
                    }
                }
            };
            if let Verdict::Undecided(rule) = verdict {
                undecided.push(format!("class {label} degree {degree}: {rule}"));
            }
            findings.push(ClassFinding { class_label: *label, degree, verdict });
        }
    }

    let log3 = Rational::from((10986u64, 10000u64));
    let mut single_component = Vec::new();
    for (a, b, table) in &inputs.cross_orthos {
        let v = inter_geodesic_distance_check(table, &log3);
        if let Verdict::Undecided(rule) = v {
            undecided.push(format!("classes {a},{b}: {rule}"));
        }
        single_component.push((*a, *b, v));
    }

    Ok(ObstructionReport {
        max_degree,
        thick_length_cutoff: cutoff,
        findings,
        single_component,
        undecided,
        notes: inputs.notes.clone(),
    })
}
