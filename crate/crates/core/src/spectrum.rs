//! Certified length spectra: enumerate every group element moving the
//! basepoint at most a displacement bound (breadth-first over the domain's
//! face pairings, so the tiling argument guarantees completeness), keep the
//! loxodromic elements whose axes pass within the spine radius, and reduce to
//! one representative per conjugacy class up to inversion and proper powers.
//!
//! The hot loop runs in self-validated `f64` ball arithmetic
//! ([`crate::rigor::ball64`]); every decision that affects the output is
//! either certified at that precision or re-established with full-precision
//! enclosures.  Equality of group elements is certified through discreteness:
//! a group element whose displacement of the basepoint is certifiably smaller
//! than the minimal displacement of any non-identity element must be the
//! identity.

use crate::dirichlet::DirichletDomain;
use crate::isometry::{ComplexLength, FixedPoint, Isometry, IsomError};
use crate::rigor::ball64::{M64, M64c};
use crate::rigor::{Enclosure, RigorError, Trichotomy};
use crate::ExecMode;
use rug::Rational;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Isom(#[from] IsomError),
    #[error("search exceeded the element cap {0}")]
    CapExceeded(usize),
    #[error("comparison undecidable at working precision: {0}")]
    Undecided(&'static str),
    #[error("the domain carries no face pairings")]
    EmptyAlphabet,
}

/// d(x, gx) ≤ 2·arccosh(cosh r · cosh(λ/2)) for every g whose axis passes
/// within r of the basepoint and whose real translation length is ≤ λ.
pub fn tiling_bound(r: &Enclosure, lambda: &Rational) -> Result<Enclosure, SpectrumError> {
    let prec = r.prec();
    let half = Enclosure::from_rational(lambda, prec).div(&Enclosure::exact_i64(2, prec))?;
    let prod = r.cosh().mul(&half.cosh());
    Ok(prod.acosh_clamped()?.mul_i64(2))
}

/// Conjugator displacement bound: two conjugate elements of the filtered list
/// admit a conjugator h with d(x, hx) ≤ 2·arccosh(cosh r · cosh(λ/4)).
pub fn conjugator_bound(r: &Enclosure, lambda: &Rational) -> Result<Enclosure, SpectrumError> {
    let prec = r.prec();
    let quarter = Enclosure::from_rational(lambda, prec).div(&Enclosure::exact_i64(4, prec))?;
    let prod = r.cosh().mul(&quarter.cosh());
    Ok(prod.acosh_clamped()?.mul_i64(2))
}

/// Membership of a search node relative to the displacement bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// Displacement certifiably within the bound.
    Inside,
    /// Displacement enclosure straddles the bound; included as a safe
    /// over-approximation and counted as an undecidable-frontier warning.
    Frontier,
    /// Certifiably beyond the bound (kept only for tree expansion).
    Outside,
}

/// One enumerated group element: its matrix ball and the search-tree path
/// that produced it (parent node and face-pairing index).
#[derive(Debug, Clone)]
pub struct SearchNode {
    mat: M64c,
    parent: u32,
    pairing: u16,
    pub membership: Membership,
}

impl SearchNode {
    /// The element's matrix ball, re-inflated from compact storage.
    pub fn mat(&self) -> M64 {
        self.mat.to_m64()
    }
}

/// Every group element with d(basepoint, g·basepoint) ≤ bound, found by
/// breadth-first search over products of face pairings.  Node 0 is the
/// identity and is excluded from [`BigList::in_bound`].
pub struct BigList {
    pub bound: Enclosure,
    pub nodes: Vec<SearchNode>,
    /// Number of elements whose displacement straddled the bound.
    pub frontier_warnings: usize,
    /// Certified lower bound for cosh d(x, gx) over non-identity elements:
    /// any group element with cosh-displacement certifiably below this is the
    /// identity.  (The enumeration is complete out to well past the minimum,
    /// so the minimum over it is the group-wide minimum.)
    pub min_cosh_displacement: f64,
}

impl BigList {
    /// Indices of the non-identity elements within the bound (including
    /// frontier-straddling ones).
    pub fn in_bound(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, n)| n.membership != Membership::Outside)
            .map(|(i, _)| i)
    }

    /// The face-pairing index path from the identity to node `i`.
    fn path(&self, i: usize) -> Vec<u16> {
        let mut rev = Vec::new();
        let mut cur = i;
        while cur != 0 {
            rev.push(self.nodes[cur].pairing);
            cur = self.nodes[cur].parent as usize;
        }
        rev.reverse();
        rev
    }

    /// The node's word over the generator letters.
    pub fn word(&self, i: usize, domain: &DirichletDomain) -> String {
        let mut w = String::new();
        for pi in self.path(i) {
            w.push_str(&domain.faces[pi as usize].pairing.word);
        }
        w
    }

    /// Re-evaluates the node at full precision by multiplying the domain's
    /// face-pairing enclosures along the search path.
    pub fn realize(&self, i: usize, domain: &DirichletDomain) -> Isometry {
        let mut acc = Isometry::identity(
            domain.faces.first().map(|f| f.pairing.prec()).unwrap_or(53),
        );
        for pi in self.path(i) {
            acc = acc.mul(&domain.faces[pi as usize].pairing);
        }
        acc
    }
}

/// Quantized spatial hash over matrix balls modulo sign.  Two balls of the
/// same group element always land in probed buckets (bucket width is kept at
/// least eight times any stored radius, growing and rehashing as needed), and
/// a hit is only declared on certified enclosure overlap.
struct DedupSet {
    width: f64,
    /// First index stored per bucket; the overwhelming majority of buckets
    /// hold exactly one element, so this avoids a heap allocation per bucket.
    first: HashMap<[i64; 3], u32>,
    /// Further indices for the rare buckets with more than one element.
    more: HashMap<[i64; 3], Vec<u32>>,
}

impl DedupSet {
    fn new() -> Self {
        DedupSet { width: (2.0_f64).powi(-40), first: HashMap::new(), more: HashMap::new() }
    }

    fn base_key(width: f64, m: &M64) -> [i64; 3] {
        let (mids, _) = m.components();
        [
            (mids[0] / width).floor() as i64,
            (mids[1] / width).floor() as i64,
            (mids[2] / width).floor() as i64,
        ]
    }

    /// All buckets a duplicate of `m` could be stored in: the base bucket and
    /// neighbors when a coordinate is within a quarter bucket of a boundary.
    fn probe_keys(width: f64, m: &M64, out: &mut Vec<[i64; 3]>) {
        let (mids, _) = m.components();
        let mut cands: [(i64, bool, bool); 3] = [(0, false, false); 3];
        for i in 0..3 {
            let k = (mids[i] / width).floor();
            let frac = mids[i] - k * width;
            cands[i] = (k as i64, frac < 0.25 * width, frac > 0.75 * width);
        }
        for (k0, lo0, hi0) in key_options(cands[0]) {
            let _ = (lo0, hi0);
            for (k1, ..) in key_options(cands[1]) {
                for (k2, ..) in key_options(cands[2]) {
                    out.push([k0, k1, k2]);
                }
            }
        }
    }

    fn max_key_radius(m: &M64) -> f64 {
        let (_, rads) = m.components();
        rads[0].max(rads[1]).max(rads[2])
    }

    /// Returns true when an overlapping element (up to sign) is present;
    /// inserts otherwise.  `mats` is the backing store of all previously
    /// inserted matrices (for certified overlap confirmation and rehashing).
    fn store(&mut self, key: [i64; 3], j: u32) {
        match self.first.entry(key) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(j);
            }
            std::collections::hash_map::Entry::Occupied(_) => {
                self.more.entry(key).or_default().push(j);
            }
        }
    }

    fn seen_or_insert(&mut self, idx: u32, m: &M64, mats: &[SearchNode]) -> bool {
        while Self::max_key_radius(m) > self.width / 8.0 {
            self.width *= 16.0;
            let old: Vec<u32> = self
                .first
                .values()
                .copied()
                .chain(self.more.values().flatten().copied())
                .collect();
            self.first = HashMap::new();
            self.more = HashMap::new();
            for j in old {
                let mat = if j == idx { *m } else { mats[j as usize].mat.to_m64() };
                self.store(Self::base_key(self.width, &mat), j);
            }
        }
        let neg = m.negated();
        let mut keys = Vec::with_capacity(16);
        Self::probe_keys(self.width, m, &mut keys);
        Self::probe_keys(self.width, &neg, &mut keys);
        keys.sort_unstable();
        keys.dedup();
        let overlapping = |j: u32| {
            let stored = mats[j as usize].mat.to_m64();
            m.overlaps(&stored) || neg.overlaps(&stored)
        };
        for key in &keys {
            if let Some(&j) = self.first.get(key) {
                if overlapping(j) {
                    return true;
                }
            }
            if let Some(list) = self.more.get(key) {
                if list.iter().any(|&j| overlapping(j)) {
                    return true;
                }
            }
        }
        self.store(Self::base_key(self.width, m), idx);
        false
    }
}

fn key_options(c: (i64, bool, bool)) -> Vec<(i64, bool, bool)> {
    let mut v = vec![c];
    if c.1 {
        v.push((c.0 - 1, false, false));
    }
    if c.2 {
        v.push((c.0 + 1, false, false));
    }
    v
}

/// Breadth-first enumeration of all group elements with
/// d(basepoint, g·basepoint) ≤ bound.
///
/// Children of a node are node·pairing products over the domain's face
/// pairings.  The tree is pruned only beyond bound + R, where R is the
/// domain's circumradius (max vertex distance): every translate tile touching
/// the search ball is reachable through face-adjacent tiles that also touch
/// it, and each such tile's element moves the basepoint at most bound + R, so
/// no element within the bound is isolated behind the pruning frontier.
pub fn big_list(
    domain: &DirichletDomain,
    bound: &Enclosure,
    mode: ExecMode,
) -> Result<BigList, SpectrumError> {
    if domain.faces.is_empty() {
        return Err(SpectrumError::EmptyAlphabet);
    }
    let alphabet: Vec<M64> = domain
        .faces
        .iter()
        .map(|f| M64 {
            a: crate::rigor::ball64::C64::from_enclosure(&f.pairing.a),
            b: crate::rigor::ball64::C64::from_enclosure(&f.pairing.b),
            c: crate::rigor::ball64::C64::from_enclosure(&f.pairing.c),
            d: crate::rigor::ball64::C64::from_enclosure(&f.pairing.d),
        })
        .collect();

    // Circumradius pad from the certified vertex enclosures.
    let mut pad = 0.0_f64;
    for v in &domain.vertices {
        let d = v.origin_distance()?;
        pad = pad.max(d.sup().to_f64());
    }
    let prune_sup = {
        // Outward-rounded cosh(bound + pad) with generous slack.
        let b = bound.sup().to_f64();
        ((b + pad) * (1.0 + 1e-12)).cosh() * (1.0 + 1e-9)
    };
    let cosh_bound = bound.cosh();
    let cosh_bound_lo = cosh_bound.inf().to_f64();
    let cosh_bound_hi = cosh_bound.sup().to_f64();

    let mut nodes: Vec<SearchNode> = vec![SearchNode {
        mat: M64c::from_m64(&M64::identity()),
        parent: 0,
        pairing: 0,
        membership: Membership::Outside,
    }];
    let mut dedup = DedupSet::new();
    dedup.seen_or_insert(0, &M64::identity(), &nodes);
    let mut frontier: Vec<u32> = vec![0];
    let mut frontier_warnings = 0usize;
    let cap = 80_000_000usize;

    // The frontier is expanded in fixed-size chunks so the transient
    // pre-dedup child buffers stay bounded regardless of how wide a breadth
    // level grows; insertion order (frontier position, then pairing index) is
    // unchanged, so results are deterministic.
    let chunk_len = 8_192usize;
    while !frontier.is_empty() {
        let mut next: Vec<u32> = Vec::new();
        for chunk in frontier.chunks(chunk_len) {
            let mats: Vec<M64> = chunk.iter().map(|&i| nodes[i as usize].mat.to_m64()).collect();
            let children: Vec<Vec<(u16, M64)>> = crate::exec_map(mode, &mats, |m| {
                let mut v = Vec::new();
                for (pi, p) in alphabet.iter().enumerate() {
                    let child = m.mul(p);
                    if !child.cosh_displacement().certainly_above(prune_sup) {
                        v.push((pi as u16, child));
                    }
                }
                v
            });
            for (fpos, group) in children.into_iter().enumerate() {
                let parent = chunk[fpos];
                for (pi, mat) in group {
                    let idx = nodes.len() as u32;
                    if dedup.seen_or_insert(idx, &mat, &nodes) {
                        continue;
                    }
                    let cd = mat.cosh_displacement();
                    let membership = if cd.certainly_below(cosh_bound_lo) {
                        Membership::Inside
                    } else if cd.certainly_above(cosh_bound_hi) {
                        Membership::Outside
                    } else {
                        frontier_warnings += 1;
                        Membership::Frontier
                    };
                    if nodes.len() == nodes.capacity() {
                        // Grow by 25% instead of the default doubling: the
                        // node store dominates memory at large bounds, and a
                        // 2x realloc spike can exceed available RAM.
                        nodes.reserve_exact((nodes.len() / 4).max(1024));
                    }
                    nodes.push(SearchNode {
                        mat: M64c::from_m64(&mat),
                        parent,
                        pairing: pi,
                        membership,
                    });
                    next.push(idx);
                    if nodes.len() > cap {
                        return Err(SpectrumError::CapExceeded(cap));
                    }
                }
            }
        }
        frontier = next;
    }

    let mut min_cosh = f64::INFINITY;
    for n in nodes.iter().skip(1) {
        let lo = n.mat.to_m64().cosh_displacement().inf().max(1.0);
        min_cosh = min_cosh.min(lo);
    }
    Ok(BigList { bound: bound.clone(), nodes, frontier_warnings, min_cosh_displacement: min_cosh })
}

/// A loxodromic element that survived the length and axis filters, at full
/// precision.
#[derive(Debug, Clone)]
pub struct FilteredElement {
    pub iso: Isometry,
    pub length: ComplexLength,
    pub axis_distance: Enclosure,
    /// Set when a cutoff or spine comparison stayed undecided and the element
    /// was included as a safe over-approximation.
    pub warned: bool,
    /// Index of the originating node in the big list.
    pub node: usize,
}

/// Keeps exactly the elements certifiably loxodromic with Re(length) ≤ λ and
/// axis within the spine radius of the basepoint.  Undecided comparisons
/// resolve to inclusion with a warning.
pub fn filter_geodesics(
    big: &BigList,
    domain: &DirichletDomain,
    lambda: &Rational,
    mode: ExecMode,
) -> Result<Vec<FilteredElement>, SpectrumError> {
    // Cheap certified prefilter in f64 balls: with z = tr/2 the complex
    // length ℓ satisfies cosh ℓ = 2z² − 1 =: u, and sinh²(Re ℓ) ≥ |u|² − 1,
    // so |u|² certifiably above cosh²λ forces Re ℓ > λ.
    let lam_f64 = lambda.to_f64();
    let cosh_lam_sq = (lam_f64.cosh() * (1.0 + 1e-12)).powi(2) * (1.0 + 1e-12);
    let spine = &domain.spine_radius;
    let candidates: Vec<usize> = big
        .in_bound()
        .filter(|&i| {
            let m = big.nodes[i].mat();
            let tr = m.trace();
            let half = crate::rigor::ball64::B64::exact(0.5);
            let z = crate::rigor::ball64::C64 { re: tr.re.mul(half), im: tr.im.mul(half) };
            let z2 = z.mul(z);
            let u = crate::rigor::ball64::C64 {
                re: z2.re.add(z2.re).sub(crate::rigor::ball64::B64::exact(1.0)),
                im: z2.im.add(z2.im),
            };
            !u.norm_sqr().certainly_above(cosh_lam_sq)
        })
        .collect();

    let checked: Vec<Result<Option<FilteredElement>, SpectrumError>> =
        crate::exec_map(mode, &candidates, |&i| {
            let iso = big.realize(i, domain);
            let length = match iso.complex_length() {
                Ok(l) => l,
                // Certified non-loxodromic (or undecidable at this precision):
                // not a closed-geodesic representative.
                Err(IsomError::ParabolicOrElliptic) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let mut warned = false;
            match length.re().cmp_rational(lambda) {
                Trichotomy::Above => return Ok(None),
                Trichotomy::Overlap => warned = true,
                Trichotomy::Below => {}
            }
            let axis_distance = iso.axis_basepoint_distance(&crate::isometry::UhpPoint::basepoint(iso.prec()))?;
            match axis_distance.cmp_enc(spine) {
                Trichotomy::Above => return Ok(None),
                Trichotomy::Overlap => warned = true,
                Trichotomy::Below => {}
            }
            Ok(Some(FilteredElement { iso, length, axis_distance, warned, node: i }))
        });
    let mut out = Vec::new();
    for r in checked {
        if let Some(f) = r? {
            out.push(f);
        }
    }
    Ok(out)
}

/// One primitive conjugacy class (up to inversion) of closed geodesics.
#[derive(Debug, Clone)]
pub struct GeodesicClass {
    pub rep: Isometry,
    pub length: ComplexLength,
    pub axis_endpoints: Option<(FixedPoint, FixedPoint)>,
    pub axis_distance: Enclosure,
    pub label: usize,
    pub warned: bool,
}

/// Classes sharing a complex length, with the class count as multiplicity.
#[derive(Debug, Clone)]
pub struct LengthGroup {
    /// Hull of the members' length enclosures.
    pub length: crate::rigor::ComplexEnclosure,
    pub class_indices: Vec<usize>,
    pub warned: bool,
}

impl LengthGroup {
    pub fn multiplicity(&self) -> usize {
        self.class_indices.len()
    }
}

/// The certified length spectrum up to the cutoff.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub cutoff: Rational,
    pub classes: Vec<GeodesicClass>,
    pub groups: Vec<LengthGroup>,
    /// Elements whose displacement straddled the enumeration bound.
    pub frontier_warnings: usize,
}

/// True when `g` certifiably equals the identity in the group: its
/// cosh-displacement ball lies below the minimal displacement of any
/// non-identity element.
fn certified_identity(q: &M64, min_cosh: f64) -> bool {
    q.cosh_displacement().certainly_below(min_cosh)
}

/// Searches the bounded conjugator list for h with h·g·h⁻¹ = ±target or
/// h·g⁻¹·h⁻¹ = ±target.  A match is certified through the displacement gap;
/// absence after exhausting the list certifies distinctness (the conjugator
/// bound is sufficient for elements of the filtered list).
fn conjugate_in_list(
    g: &M64,
    target: &M64,
    conjugators: &[M64],
    min_cosh: f64,
) -> bool {
    let ginv = g.inverse_unit_det();
    let tinv = target.inverse_unit_det();
    for c in conjugators {
        let cinv = c.inverse_unit_det();
        for cand in [g, &ginv] {
            let q = c.mul(cand).mul(&cinv).mul(&tinv);
            if certified_identity(&q, min_cosh) {
                return true;
            }
        }
    }
    false
}

/// True iff g is (up to sign) an integer power k ≥ 2 of h along the same
/// axis: the complex length of g encloses k·ℓ(h) modulo 2πi and h^k equals g
/// in the group.
pub fn power_test(g: &Isometry, h: &Isometry) -> Result<bool, SpectrumError> {
    let lg = g.complex_length()?;
    let lh = h.complex_length()?;
    let ratio = lg.re().mid_f64() / lh.re().mid_f64();
    let k = ratio.round() as i64;
    if k < 2 {
        return Ok(false);
    }
    if !lg.re().overlaps(&lh.re().mul_i64(k)) {
        return Ok(false);
    }
    let im_k = crate::isometry::normalize_angle(&lh.im().mul_i64(k));
    if !crate::isometry::angle_diff(lg.im(), &im_k).contains_zero() {
        return Ok(false);
    }
    // Same axis: h^k must coincide with ±g as a matrix.
    let mut p = Isometry::identity(h.prec());
    for _ in 0..k {
        p = p.mul(h);
    }
    let same = (p.a.overlaps(&g.a) && p.b.overlaps(&g.b) && p.c.overlaps(&g.c) && p.d.overlaps(&g.d))
        || {
            let n = g.neg();
            p.a.overlaps(&n.a) && p.b.overlaps(&n.b) && p.c.overlaps(&n.c) && p.d.overlaps(&n.d)
        };
    Ok(same)
}

fn m64_of(iso: &Isometry) -> M64 {
    use crate::rigor::ball64::C64;
    M64 {
        a: C64::from_enclosure(&iso.a),
        b: C64::from_enclosure(&iso.b),
        c: C64::from_enclosure(&iso.c),
        d: C64::from_enclosure(&iso.d),
    }
}

/// Reduces the filtered list to one representative per conjugacy class (up to
/// inversion), removes proper powers, and groups classes by complex length.
pub fn small_list(
    filtered: &[FilteredElement],
    big: &BigList,
    domain: &DirichletDomain,
    lambda: &Rational,
) -> Result<SpectrumTable, SpectrumError> {
    let cb = conjugator_bound(&domain.spine_radius, lambda)?;
    let cb_hi = cb.cosh().sup().to_f64();
    let mut conjugators: Vec<M64> = vec![M64::identity()];
    for n in big.nodes.iter().skip(1) {
        let m = n.mat();
        if !m.cosh_displacement().certainly_above(cb_hi) {
            conjugators.push(m);
        }
    }
    let min_cosh = big.min_cosh_displacement;

    // Canonical processing order: by length, then shortest lexicographic word.
    let mut order: Vec<usize> = (0..filtered.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (&filtered[a], &filtered[b]);
        fa.length
            .re()
            .mid_f64()
            .total_cmp(&fb.length.re().mid_f64())
            .then(fa.length.im().mid_f64().total_cmp(&fb.length.im().mid_f64()))
            .then(fa.iso.word.len().cmp(&fb.iso.word.len()))
            .then(fa.iso.word.cmp(&fb.iso.word))
    });

    struct Rep {
        filtered_idx: usize,
        mat: M64,
    }
    let mut reps: Vec<Rep> = Vec::new();
    for &fi in &order {
        let f = &filtered[fi];
        let g64 = m64_of(&f.iso);
        // Conjugate (or inverse-conjugate) of an accepted representative?
        // Conjugation and inversion both preserve the trace, hence the
        // complex length with its sign, so only length-overlapping
        // representatives can match.
        let mut matched = false;
        for r in &reps {
            let rf = &filtered[r.filtered_idx];
            if !f.length.re().overlaps(rf.length.re()) || !f.length.im().overlaps(rf.length.im()) {
                continue;
            }
            if conjugate_in_list(&g64, &r.mat, &conjugators, min_cosh) {
                matched = true;
                break;
            }
        }
        if matched {
            continue;
        }
        // Proper power of a shorter representative (possibly conjugated)?
        let mut is_power = false;
        for r in &reps {
            let rf = &filtered[r.filtered_idx];
            let ratio = f.length.re().mid_f64() / rf.length.re().mid_f64();
            let k = ratio.round() as i64;
            if k < 2 || !f.length.re().overlaps(&rf.length.re().mul_i64(k)) {
                continue;
            }
            let mut p = M64::identity();
            for _ in 0..k {
                p = p.mul(&r.mat);
            }
            if conjugate_in_list(&g64, &p, &conjugators, min_cosh) {
                is_power = true;
                break;
            }
        }
        if is_power {
            continue;
        }
        reps.push(Rep { filtered_idx: fi, mat: g64 });
    }

    let mut classes: Vec<GeodesicClass> = Vec::new();
    for (label, r) in reps.iter().enumerate() {
        let f = &filtered[r.filtered_idx];
        classes.push(GeodesicClass {
            rep: f.iso.clone(),
            length: f.length.clone(),
            axis_endpoints: f.iso.fixed_points().ok(),
            axis_distance: f.axis_distance.clone(),
            label,
            warned: f.warned,
        });
    }

    // Group by complex length (signed imaginary part: mirror-image classes
    // stay distinct, matching multiplicity counts per length value).
    let mut groups: Vec<LengthGroup> = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        if let Some(g) = groups.iter_mut().find(|g| {
            g.length.re.overlaps(c.length.re()) && g.length.im.overlaps(c.length.im())
        }) {
            g.length = crate::rigor::ComplexEnclosure::new(
                g.length.re.hull(c.length.re()),
                g.length.im.hull(c.length.im()),
            );
            g.class_indices.push(ci);
            g.warned |= c.warned;
        } else {
            groups.push(LengthGroup {
                length: c.length.value.clone(),
                class_indices: vec![ci],
                warned: c.warned,
            });
        }
    }
    groups.sort_by(|a, b| {
        a.length
            .re
            .mid_f64()
            .total_cmp(&b.length.re.mid_f64())
            .then(a.length.im.mid_f64().total_cmp(&b.length.im.mid_f64()))
    });

    Ok(SpectrumTable {
        cutoff: lambda.clone(),
        classes,
        groups,
        frontier_warnings: big.frontier_warnings,
    })
}

/// End-to-end: enumeration bound from the spine radius, big list, filters,
/// and conjugacy reduction.
pub fn length_spectrum(
    domain: &DirichletDomain,
    lambda: &Rational,
    mode: ExecMode,
) -> Result<SpectrumTable, SpectrumError> {
    let bound = tiling_bound(&domain.spine_radius, lambda)?;
    let big = big_list(domain, &bound, mode)?;
    let filtered = filter_geodesics(&big, domain, lambda, mode)?;
    small_list(&filtered, &big, domain, lambda)
}
