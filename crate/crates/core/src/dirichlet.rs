//! Dirichlet domain construction in the projective ball model.
//!
//! The domain is the intersection of the half-spaces bounded by the bisecting
//! planes between the ball origin and its translates under a list of face
//! pairings.  In this model hyperbolic planes are Euclidean planes, so vertex
//! extraction is linear algebra over enclosures; all combinatorial decisions
//! (which triples of planes meet, which vertices survive) are made only when
//! the enclosures certify them.

use crate::isometry::{Isometry, IsomError, UhpPoint};
use crate::rigor::{Enclosure, RigorError, Trichotomy};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DirichletError {
    #[error(transparent)]
    Rigor(#[from] RigorError),
    #[error(transparent)]
    Isom(#[from] IsomError),
    /// The isometry moves the basepoint by an amount not certifiably nonzero.
    #[error("isometry does not certifiably move the basepoint")]
    BasepointFixed,
    /// A face's paired image matches no other face: the pairing list is
    /// incomplete.
    #[error("pairing list is not closed: face {0} has no partner")]
    NotClosed(String),
    /// Vertex enclosures could not be separated into distinct points meeting
    /// exactly three planes each.
    #[error("degenerate vertex configuration could not be resolved")]
    DegenerateVertex,
    /// The domain has no edges, so no spine radius exists.
    #[error("domain has no edges")]
    NoEdges,
    /// Automatic pairing search hit its word-length cap before the domain
    /// closed up.
    #[error("no closed domain within word length cap {0}")]
    CapExceeded(usize),
    /// A structural self-check failed (combinatorics inconsistent with a
    /// closed polyhedron).
    #[error("domain invariant violated: {0}")]
    Invariant(&'static str),
}

/// A point of the open unit ball, |p| < 1.
#[derive(Debug, Clone)]
pub struct BallPoint {
    pub x: Enclosure,
    pub y: Enclosure,
    pub z: Enclosure,
}

impl BallPoint {
    pub fn new(x: Enclosure, y: Enclosure, z: Enclosure) -> Self {
        BallPoint { x, y, z }
    }

    pub fn prec(&self) -> u32 {
        self.x.prec().max(self.y.prec()).max(self.z.prec())
    }

    pub fn norm_sqr(&self) -> Enclosure {
        self.x.sqr().add(&self.y.sqr()).add(&self.z.sqr())
    }

    pub fn dot(&self, o: &BallPoint) -> Enclosure {
        self.x.mul(&o.x).add(&self.y.mul(&o.y)).add(&self.z.mul(&o.z))
    }

    pub fn sub(&self, o: &BallPoint) -> BallPoint {
        BallPoint::new(self.x.sub(&o.x), self.y.sub(&o.y), self.z.sub(&o.z))
    }

    pub fn add(&self, o: &BallPoint) -> BallPoint {
        BallPoint::new(self.x.add(&o.x), self.y.add(&o.y), self.z.add(&o.z))
    }

    pub fn scale(&self, s: &Enclosure) -> BallPoint {
        BallPoint::new(self.x.mul(s), self.y.mul(s), self.z.mul(s))
    }

    /// Componentwise hull with another point enclosure.
    pub fn hull(&self, o: &BallPoint) -> BallPoint {
        BallPoint::new(self.x.hull(&o.x), self.y.hull(&o.y), self.z.hull(&o.z))
    }

    pub fn overlaps(&self, o: &BallPoint) -> bool {
        self.x.overlaps(&o.x) && self.y.overlaps(&o.y) && self.z.overlaps(&o.z)
    }

    /// Hyperbolic distance from the ball origin: artanh |p|.
    pub fn origin_distance(&self) -> Result<Enclosure, RigorError> {
        self.norm_sqr().sqrt()?.atanh_clamped()
    }
}

/// Isometric conversion from upper half-space to the projective ball,
/// sending (0,0,1) to the origin.
pub fn ball_from_uhp(w: &UhpPoint) -> Result<BallPoint, RigorError> {
    let n2 = w.x.sqr().add(&w.y.sqr()).add(&w.z.sqr());
    let den = Enclosure::one(n2.prec()).add(&n2);
    let two = Enclosure::exact_i64(2, n2.prec());
    Ok(BallPoint::new(
        w.x.mul(&two).div(&den)?,
        w.y.mul(&two).div(&den)?,
        n2.sub(&Enclosure::one(n2.prec())).div(&den)?,
    ))
}

/// Inverse of [`ball_from_uhp`]: projective ball back to upper half-space.
pub fn uhp_from_ball(p: &BallPoint) -> Result<UhpPoint, RigorError> {
    let prec = p.prec();
    let one = Enclosure::one(prec);
    let k2 = p.norm_sqr();
    if k2.cmp_i64(1) != Trichotomy::Below {
        return Err(RigorError::DomainViolation("point not certifiably inside the unit ball"));
    }
    // Projective ball -> conformal (Poincaré) ball -> upper half-space.
    let s = one.add(&one.sub(&k2).sqrt()?);
    let qx = p.x.div(&s)?;
    let qy = p.y.div(&s)?;
    let qz = p.z.div(&s)?;
    let q2 = qx.sqr().add(&qy.sqr()).add(&qz.sqr());
    let den = qx.sqr().add(&qy.sqr()).add(&one.sub(&qz).sqr());
    let two = Enclosure::exact_i64(2, prec);
    Ok(UhpPoint::new(
        qx.mul(&two).div(&den)?,
        qy.mul(&two).div(&den)?,
        one.sub(&q2).div(&den)?,
    ))
}

/// A half-space {r : n·r ≤ t} of the ball whose boundary plane bisects the
/// segment from the origin to `pairing`(origin).
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub n: BallPoint,
    pub t: Enclosure,
    pub pairing: Isometry,
}

impl HalfSpace {
    /// Signed margin n·v − t: negative inside, zero on the plane.
    pub fn margin(&self, v: &BallPoint) -> Enclosure {
        self.n.dot(v).sub(&self.t)
    }

    /// True when the boundary planes certifiably coincide.
    pub fn same_plane(&self, o: &HalfSpace) -> bool {
        self.n.overlaps(&o.n) && self.t.overlaps(&o.t)
    }
}

/// Bisecting half-space between the ball origin and g(origin).
pub fn bisector(g: &Isometry) -> Result<HalfSpace, DirichletError> {
    let basepoint = UhpPoint::basepoint(g.prec());
    let image = g.apply(&basepoint)?;
    let n = ball_from_uhp(&image)?;
    let n2 = n.norm_sqr();
    if !n2.certainly_positive() {
        return Err(DirichletError::BasepointFixed);
    }
    if n2.cmp_i64(1) != Trichotomy::Below {
        return Err(RigorError::DomainViolation("translate outside the unit ball").into());
    }
    let one = Enclosure::one(n2.prec());
    let t = one.sub(&one.sub(&n2).sqrt().map_err(RigorError::from)?);
    Ok(HalfSpace { n, t, pairing: g.clone() })
}

/// A convex polyhedron cut out by bisecting half-spaces, with its incidence
/// combinatorics and spine radius.
#[derive(Debug, Clone)]
pub struct DirichletDomain {
    pub faces: Vec<HalfSpace>,
    pub vertices: Vec<BallPoint>,
    /// Each edge joins two vertex indices and lies in exactly two face planes.
    pub edges: Vec<((usize, usize), (usize, usize))>,
    /// For each vertex, the sorted indices of the faces whose planes pass
    /// through it.
    pub vertex_faces: Vec<Vec<usize>>,
    pub spine_radius: Enclosure,
}

/// Solves the 3×3 system n_i · v = t_i by Cramer's rule over enclosures.
/// Returns None when the determinant is not certifiably nonzero.
fn solve_triple(planes: [&HalfSpace; 3]) -> Option<BallPoint> {
    let col = |f: fn(&BallPoint) -> &Enclosure| {
        [f(&planes[0].n), f(&planes[1].n), f(&planes[2].n)]
    };
    let (nx, ny, nz) = (col(|p| &p.x), col(|p| &p.y), col(|p| &p.z));
    let rhs = [&planes[0].t, &planes[1].t, &planes[2].t];
    let det3 = |a: [&Enclosure; 3], b: [&Enclosure; 3], c: [&Enclosure; 3]| {
        a[0].mul(&b[1].mul(c[2]).sub(&b[2].mul(c[1])))
            .sub(&a[1].mul(&b[0].mul(c[2]).sub(&b[2].mul(c[0]))))
            .add(&a[2].mul(&b[0].mul(c[1]).sub(&b[1].mul(c[0]))))
    };
    let det = det3(nx, ny, nz);
    if det.contains_zero() {
        return None;
    }
    let x = det3(rhs, ny, nz).div(&det).ok()?;
    let y = det3(nx, rhs, nz).div(&det).ok()?;
    let z = det3(nx, ny, rhs).div(&det).ok()?;
    Some(BallPoint::new(x, y, z))
}

/// Builds the domain from a closed list of face pairings and verifies its
/// structural invariants.
pub fn build_domain(pairings: &[Isometry]) -> Result<DirichletDomain, DirichletError> {
    let faces: Vec<HalfSpace> = pairings.iter().map(bisector).collect::<Result<_, _>>()?;
    let nf = faces.len();
    if nf < 4 {
        return Err(DirichletError::NotClosed("fewer than four half-spaces".into()));
    }

    // Candidate vertices from every triple of planes with a certified solve,
    // kept only when no face certifiably excludes them.
    let mut cands: Vec<(BallPoint, Vec<usize>)> = Vec::new();
    for i in 0..nf {
        for j in i + 1..nf {
            for k in j + 1..nf {
                let Some(v) = solve_triple([&faces[i], &faces[j], &faces[k]]) else {
                    continue;
                };
                if faces.iter().any(|f| f.margin(&v).certainly_positive()) {
                    continue;
                }
                cands.push((v, vec![i, j, k]));
            }
        }
    }

    // Merge overlapping vertex enclosures (concurrent planes produce the same
    // geometric vertex from several triples).
    let mut merged: Vec<(BallPoint, Vec<usize>)> = Vec::new();
    for (v, inc) in cands {
        if let Some((mv, minc)) = merged.iter_mut().find(|(mv, _)| mv.overlaps(&v)) {
            *mv = mv.hull(&v);
            for f in inc {
                if !minc.contains(&f) {
                    minc.push(f);
                }
            }
        } else {
            merged.push((v, inc));
        }
    }
    // A second pass in case hulls grew into each other.
    let mut vertices: Vec<(BallPoint, Vec<usize>)> = Vec::new();
    for (v, inc) in merged {
        if let Some((mv, minc)) = vertices.iter_mut().find(|(mv, _)| mv.overlaps(&v)) {
            *mv = mv.hull(&v);
            for f in inc {
                if !minc.contains(&f) {
                    minc.push(f);
                }
            }
        } else {
            vertices.push((v, inc));
        }
    }
    for (_, inc) in &mut vertices {
        inc.sort_unstable();
    }

    // Faces must carry at least three distinct vertices; otherwise the
    // supplied plane does not bound the intersection and the list cannot be
    // the face set of a closed domain.
    for (fi, f) in faces.iter().enumerate() {
        let count = vertices.iter().filter(|(_, inc)| inc.contains(&fi)).count();
        if count < 3 {
            return Err(DirichletError::NotClosed(f.pairing.word.clone()));
        }
    }

    // Edges: vertex pairs lying in exactly two common face planes.
    let mut edges: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            let common: Vec<usize> = vertices[a]
                .1
                .iter()
                .filter(|f| vertices[b].1.contains(f))
                .copied()
                .collect();
            match common.len() {
                0 | 1 => {}
                2 => edges.push(((a, b), (common[0], common[1]))),
                _ => return Err(DirichletError::DegenerateVertex),
            }
        }
    }
    if edges.is_empty() {
        return Err(DirichletError::NoEdges);
    }

    // Euler characteristic of a closed convex polyhedron.
    if vertices.len() + nf != edges.len() + 2 {
        return Err(DirichletError::Invariant("V - E + F != 2"));
    }

    // Closure: each face's partner plane (bisector of the inverse pairing)
    // must itself be a face.
    for f in &faces {
        let inv = f.pairing.inverse().map_err(RigorError::from)?;
        let partner = bisector(&inv)?;
        if !faces.iter().any(|o| o.same_plane(&partner)) {
            return Err(DirichletError::NotClosed(f.pairing.word.clone()));
        }
    }

    let verts: Vec<BallPoint> = vertices.iter().map(|(v, _)| v.clone()).collect();
    let vertex_faces: Vec<Vec<usize>> = vertices.into_iter().map(|(_, inc)| inc).collect();
    let spine = spine_radius_of(&verts, &edges)?;
    Ok(DirichletDomain { faces, vertices: verts, edges, vertex_faces, spine_radius: spine })
}

/// Distance from the origin to the segment [v1, v2] (chords are geodesics in
/// this model, and artanh of the Euclidean norm is monotone, so the Euclidean
/// foot of the perpendicular is also the hyperbolic one).
fn edge_distance(v1: &BallPoint, v2: &BallPoint) -> Result<Enclosure, DirichletError> {
    let d = v2.sub(v1);
    let len2 = d.norm_sqr();
    if !len2.certainly_positive() {
        return Err(DirichletError::DegenerateVertex);
    }
    let s = v1.dot(&d).neg().div(&len2).map_err(RigorError::from)?;
    // Clamp the foot parameter to [0,1]: the minimum over the segment is
    // attained at the clamped foot.
    let prec = s.prec();
    let zero = Enclosure::zero(prec);
    let one = Enclosure::one(prec);
    let clamped = match (s.cmp_i64(0), s.cmp_i64(1)) {
        (Trichotomy::Below, _) => zero,
        (_, Trichotomy::Above) => one,
        (Trichotomy::Above, Trichotomy::Below) => s,
        // Straddles an endpoint: take the hull of the admissible range.
        _ => {
            let lo = if s.cmp_i64(0) == Trichotomy::Overlap { zero } else { s.clone() };
            let hi = if s.cmp_i64(1) == Trichotomy::Overlap { one } else { s.clone() };
            lo.hull(&hi)
        }
    };
    let foot = v1.add(&d.scale(&clamped));
    Ok(foot.origin_distance().map_err(RigorError::from)?)
}

/// Spine radius: the maximum over edges of the distance from the basepoint to
/// the edge.
pub fn spine_radius_of(
    vertices: &[BallPoint],
    edges: &[((usize, usize), (usize, usize))],
) -> Result<Enclosure, DirichletError> {
    if edges.is_empty() {
        return Err(DirichletError::NoEdges);
    }
    let mut best: Option<Enclosure> = None;
    for ((a, b), _) in edges {
        let d = edge_distance(&vertices[*a], &vertices[*b])?;
        best = Some(match best {
            None => d,
            Some(cur) => match cur.cmp_enc(&d) {
                Trichotomy::Above => cur,
                Trichotomy::Below => d,
                // Undecided: keep an enclosure of the max of the two.
                Trichotomy::Overlap => {
                    let lo = cur.inf().max(&d.inf());
                    let hi = cur.sup().max(&d.sup());
                    endpoints_enclosure(lo, hi, cur.prec())
                }
            },
        });
    }
    Ok(best.unwrap())
}

fn endpoints_enclosure(lo: rug::Float, hi: rug::Float, prec: u32) -> Enclosure {
    use rug::float::Round;
    use rug::Float;
    let mid = Float::with_val(prec, &lo + &hi) / 2u32;
    let rad = Float::with_val_round(crate::rigor::RAD_PREC, &hi - &lo, Round::Up).0 / 2u32
        + Float::with_val(crate::rigor::RAD_PREC, 1e-70);
    Enclosure::new(mid, rad)
}

// ---------------------------------------------------------------------------
// Automatic face-pairing search (floating-point heuristic; the result is
// certified by `build_domain`).
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct M2 {
    // Row-major complex entries as (re, im).
    e: [(f64, f64); 4],
}

impl M2 {
    fn from_iso(g: &Isometry) -> M2 {
        let c = |z: &crate::rigor::ComplexEnclosure| (z.re.mid_f64(), z.im.mid_f64());
        M2 { e: [c(&g.a), c(&g.b), c(&g.c), c(&g.d)] }
    }

    fn identity() -> M2 {
        M2 { e: [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)] }
    }

    fn mul(&self, o: &M2) -> M2 {
        let cm = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let ca = |a: (f64, f64), b: (f64, f64)| (a.0 + b.0, a.1 + b.1);
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        M2 {
            e: [
                ca(cm(a, e), cm(b, g)),
                ca(cm(a, f), cm(b, h)),
                ca(cm(c, e), cm(d, g)),
                ca(cm(c, f), cm(d, h)),
            ],
        }
    }

    fn cosh_displacement(&self) -> f64 {
        self.e.iter().map(|(x, y)| x * x + y * y).sum::<f64>() / 2.0
    }

    fn flat(&self) -> [f64; 8] {
        let mut v = [0.0; 8];
        for (i, (re, im)) in self.e.iter().enumerate() {
            v[2 * i] = *re;
            v[2 * i + 1] = *im;
        }
        v
    }

    /// Sign-canonical flattening: of ±M, the lexicographically larger.
    fn canon(&self) -> [f64; 8] {
        let v = self.flat();
        let neg: [f64; 8] = std::array::from_fn(|i| -v[i]);
        if v.iter().zip(&neg).find(|(a, b)| a != b).map(|(a, b)| a > b).unwrap_or(true) {
            v
        } else {
            neg
        }
    }

    /// Image of the basepoint in the projective ball.
    fn translate(&self) -> [f64; 3] {
        // Upper half-space action via quaternions at w = j.
        let [a, b, c, d] = self.e;
        let qm = |p: [f64; 4], q: [f64; 4]| {
            [
                p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
                p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
                p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
                p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
            ]
        };
        let j = [0.0, 0.0, 1.0, 0.0];
        let num = {
            let t = qm([a.0, a.1, 0.0, 0.0], j);
            [t[0] + b.0, t[1] + b.1, t[2], t[3]]
        };
        let den = {
            let t = qm([c.0, c.1, 0.0, 0.0], j);
            [t[0] + d.0, t[1] + d.1, t[2], t[3]]
        };
        let n2: f64 = den.iter().map(|x| x * x).sum();
        let dinv = [den[0] / n2, -den[1] / n2, -den[2] / n2, -den[3] / n2];
        let w = qm(num, dinv);
        let (x, y, z) = (w[0], w[1], w[2]);
        let n = x * x + y * y + z * z;
        [2.0 * x / (1.0 + n), 2.0 * y / (1.0 + n), (n - 1.0) / (1.0 + n)]
    }
}

/// Tolerance-bucketed set of matrices modulo sign, for merging different
/// words that evaluate to the same group element within input error.
struct FuzzySet {
    tol: f64,
    buckets: std::collections::HashMap<[i64; 4], Vec<[f64; 8]>>,
}

impl FuzzySet {
    fn new(tol: f64) -> Self {
        FuzzySet { tol, buckets: std::collections::HashMap::new() }
    }

    fn key(&self, v: &[f64; 8]) -> [i64; 4] {
        std::array::from_fn(|i| (v[i] / (64.0 * self.tol)).round() as i64)
    }

    /// Returns true when the element was already present; inserts otherwise.
    fn seen_or_insert(&mut self, m: &M2) -> bool {
        let v = m.canon();
        let base = self.key(&v);
        let mut delta = [0i64; 4];
        for d0 in -1..=1 {
            for d1 in -1..=1 {
                for d2 in -1..=1 {
                    for d3 in -1..=1 {
                        delta = [base[0] + d0, base[1] + d1, base[2] + d2, base[3] + d3];
                        if let Some(list) = self.buckets.get(&delta) {
                            for u in list {
                                if u.iter().zip(&v).all(|(a, b)| (a - b).abs() < self.tol) {
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
        }
        let _ = delta;
        self.buckets.entry(base).or_default().push(v);
        false
    }
}

/// Breadth-first enumeration of group elements moving the basepoint at most
/// `max_disp`, merging coincident elements within `tol`.
fn enumerate_elements(
    gens: &[(char, M2)],
    max_disp: f64,
    tol: f64,
    word_cap: usize,
) -> Result<Vec<(String, M2)>, DirichletError> {
    let cosh_cap = max_disp.cosh();
    let mut seen = FuzzySet::new(tol);
    seen.seen_or_insert(&M2::identity());
    let mut out: Vec<(String, M2)> = Vec::new();
    let mut frontier: Vec<(String, M2)> = vec![(String::new(), M2::identity())];
    for _level in 0..word_cap {
        let mut next = Vec::new();
        for (word, m) in &frontier {
            for (letter, g) in gens {
                if let Some(last) = word.chars().last() {
                    if last != *letter
                        && last.eq_ignore_ascii_case(letter)
                    {
                        continue;
                    }
                }
                let m2 = m.mul(g);
                if m2.cosh_displacement() > cosh_cap {
                    continue;
                }
                if seen.seen_or_insert(&m2) {
                    continue;
                }
                let mut w2 = word.clone();
                w2.push(*letter);
                out.push((w2.clone(), m2));
                next.push((w2, m2));
            }
        }
        if next.is_empty() {
            return Ok(out);
        }
        frontier = next;
    }
    Err(DirichletError::CapExceeded(word_cap))
}

/// Floating-point incremental half-space intersection, seeded with a cube so
/// the running polytope stays bounded until enough group planes arrive.
/// Returns (contributing planes as (word index, normal, offset), vertices).
fn intersect_halfspaces(
    planes: &[(usize, [f64; 3], f64)],
) -> (Vec<(Option<usize>, [f64; 3], f64)>, Vec<[f64; 3]>) {
    const EPS: f64 = 1e-10;
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cube_n = 0.99999_f64;
    let cube_t = 1.0 - (1.0 - cube_n * cube_n).sqrt();
    let mut faces: Vec<(Option<usize>, [f64; 3], f64)> = Vec::new();
    for ax in 0..3 {
        for s in [1.0, -1.0] {
            let mut n = [0.0; 3];
            n[ax] = s * cube_n;
            faces.push((None, n, cube_t));
        }
    }
    let corner = cube_t / cube_n;
    let mut verts: Vec<[f64; 3]> = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                verts.push([sx * corner, sy * corner, sz * corner]);
            }
        }
    }

    let mut order: Vec<usize> = (0..planes.len()).collect();
    order.sort_by(|&a, &b| dot(&planes[a].1, &planes[a].1).total_cmp(&dot(&planes[b].1, &planes[b].1)));
    for idx in order {
        let (wi, n, t) = planes[idx];
        // Skip planes (near-)duplicating an existing face.
        if faces.iter().any(|(_, fn_, ft)| {
            (0..3).all(|i| (fn_[i] - n[i]).abs() < 1e-8) && (ft - t).abs() < 1e-8
        }) {
            continue;
        }
        if !verts.iter().any(|v| dot(&n, v) > t + EPS) {
            continue; // does not cut the current polytope
        }
        let mut survivors: Vec<[f64; 3]> = verts.iter().copied().filter(|v| dot(&n, v) <= t + EPS).collect();
        faces.push((Some(wi), n, t));
        let nf = faces.len();
        for i in 0..nf - 1 {
            for j in i + 1..nf - 1 {
                let (a1, t1) = (faces[i].1, faces[i].2);
                let (a2, t2) = (faces[j].1, faces[j].2);
                // Solve {a1, a2, n} · v = {t1, t2, t}.
                let det = a1[0] * (a2[1] * n[2] - a2[2] * n[1])
                    - a1[1] * (a2[0] * n[2] - a2[2] * n[0])
                    + a1[2] * (a2[0] * n[1] - a2[1] * n[0]);
                if det.abs() < 1e-9 {
                    continue;
                }
                let d3 = |c0: [f64; 3], c1: [f64; 3], c2: [f64; 3]| {
                    c0[0] * (c1[1] * c2[2] - c1[2] * c2[1])
                        - c0[1] * (c1[0] * c2[2] - c1[2] * c2[0])
                        + c0[2] * (c1[0] * c2[1] - c1[1] * c2[0])
                };
                let rhs = [t1, t2, t];
                let cols = |k: usize| -> [f64; 3] { [a1[k], a2[k], n[k]] };
                let (c0, c1, c2) = (cols(0), cols(1), cols(2));
                let v = [
                    d3(rhs, c1, c2) / det,
                    d3(c0, rhs, c2) / det,
                    d3(c0, c1, rhs) / det,
                ];
                if faces.iter().all(|(_, fnn, ftt)| dot(fnn, &v) <= ftt + EPS) {
                    survivors.push(v);
                }
            }
        }
        verts = survivors;
        if verts.is_empty() {
            return (Vec::new(), Vec::new());
        }
    }

    // Keep faces carrying at least three distinct vertices.
    let kept: Vec<(Option<usize>, [f64; 3], f64)> = faces
        .into_iter()
        .filter(|(_, n, t)| {
            let mut distinct: Vec<[f64; 3]> = Vec::new();
            for v in &verts {
                if (dot(n, v) - t).abs() < 1e-7
                    && !distinct.iter().any(|u| {
                        (0..3).map(|i| (u[i] - v[i]).powi(2)).sum::<f64>() < 1e-14
                    })
                {
                    distinct.push(*v);
                }
            }
            distinct.len() >= 3
        })
        .collect();
    (kept, verts)
}

/// Searches for a face-pairing list by breadth-first enumeration over the
/// generator alphabet, growing the displacement bound until the resulting
/// polyhedron is closed and provably sees every relevant group element
/// (every element whose bisector could cut the domain lies within the
/// enumerated displacement bound).  The returned isometries are evaluated at
/// full precision; pass them to [`build_domain`] for certification.
pub fn auto_pairings(
    generators: &crate::isometry::Generators,
    word_length_cap: usize,
) -> Result<Vec<Isometry>, DirichletError> {
    let mut alphabet: Vec<(char, M2)> = Vec::new();
    for letter in generators.letters().collect::<Vec<_>>() {
        alphabet.push((letter, M2::from_iso(generators.get(letter)?)));
        let upper = letter.to_ascii_uppercase();
        alphabet.push((upper, M2::from_iso(generators.get(upper)?)));
    }
    if alphabet.is_empty() {
        return Err(DirichletError::CapExceeded(0));
    }
    // Merge tolerance: dominated by the input decimals' uncertainty as it
    // propagates through products; scale with the generators' own width.
    let max_rad = {
        let mut r: f64 = 1e-12;
        for (letter, _) in &alphabet {
            let g = generators.get(*letter)?;
            for z in [&g.a, &g.b, &g.c, &g.d] {
                r = r.max(z.re.rad_f64()).max(z.im.rad_f64());
            }
        }
        r
    };
    // Floor covers f64 round-off drift across long words even when the
    // inputs themselves are far more accurate.
    let tol = (max_rad * 200.0).max(1e-7);

    let start = alphabet
        .iter()
        .map(|(_, m)| m.cosh_displacement().acosh())
        .fold(0.0_f64, f64::max);
    let mut max_disp = (3.0 * start).max(3.5);
    for _round in 0..12 {
        let elements = enumerate_elements(&alphabet, max_disp, tol, word_length_cap)?;
        let planes: Vec<(usize, [f64; 3], f64)> = elements
            .iter()
            .enumerate()
            .filter_map(|(i, (_, m))| {
                let n = m.translate();
                let n2: f64 = n.iter().map(|x| x * x).sum();
                if n2 < 1e-12 || n2 >= 1.0 {
                    return None;
                }
                Some((i, n, 1.0 - (1.0 - n2).sqrt()))
            })
            .collect();
        let (faces, verts) = intersect_halfspaces(&planes);
        if !verts.is_empty() && faces.iter().all(|(wi, _, _)| wi.is_some()) {
            let max_vert = verts
                .iter()
                .map(|v| {
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt().min(1.0 - 1e-15);
                    r.atanh()
                })
                .fold(0.0_f64, f64::max);
            // Completeness: any element whose bisector cuts the domain moves
            // the basepoint at most twice the farthest vertex distance.
            // The generator-displacement slack keeps the enumeration from
            // missing elements whose shortest word detours through a prefix
            // displaced slightly beyond the target bound.
            if 2.0 * max_vert + start <= max_disp {
                let mut out = Vec::new();
                for (wi, _, _) in &faces {
                    let word = &elements[wi.unwrap()].0;
                    out.push(generators.eval_word(word)?);
                }
                return Ok(out);
            }
        }
        max_disp += 0.8;
    }
    Err(DirichletError::CapExceeded(word_length_cap))
}

/// Plain-text mesh of the domain: vertex midpoints and faces as
/// counter-clockwise index loops viewed from outside.
pub fn export_mesh(domain: &DirichletDomain, decimals: usize) -> String {
    let mut out = String::new();
    for v in &domain.vertices {
        out.push_str(&format!(
            "v {:.*} {:.*} {:.*}\n",
            decimals,
            v.x.mid_f64(),
            decimals,
            v.y.mid_f64(),
            decimals,
            v.z.mid_f64()
        ));
    }
    for (fi, f) in domain.faces.iter().enumerate() {
        let mut idx: Vec<usize> = (0..domain.vertices.len())
            .filter(|vi| domain.vertex_faces[*vi].contains(&fi))
            .collect();
        if idx.len() < 3 {
            continue;
        }
        // Order around the face centroid; the plane normal points outward.
        let n = [f.n.x.mid_f64(), f.n.y.mid_f64(), f.n.z.mid_f64()];
        let pts: Vec<[f64; 3]> = idx
            .iter()
            .map(|&vi| {
                let v = &domain.vertices[vi];
                [v.x.mid_f64(), v.y.mid_f64(), v.z.mid_f64()]
            })
            .collect();
        let c = [
            pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64,
            pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64,
            pts.iter().map(|p| p[2]).sum::<f64>() / pts.len() as f64,
        ];
        let nn: f64 = n.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u0 = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let cross = |a: [f64; 3], b: [f64; 3]| {
            [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        };
        let nu = [n[0] / nn, n[1] / nn, n[2] / nn];
        let e1 = cross(nu, u0);
        let e1n: f64 = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e1 = [e1[0] / e1n, e1[1] / e1n, e1[2] / e1n];
        let e2 = cross(nu, e1);
        let mut order: Vec<(f64, usize)> = idx
            .iter()
            .zip(&pts)
            .map(|(&vi, p)| {
                let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
                let a = (d[0] * e2[0] + d[1] * e2[1] + d[2] * e2[2])
                    .atan2(d[0] * e1[0] + d[1] * e1[1] + d[2] * e1[2]);
                (a, vi)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        idx = order.into_iter().map(|(_, vi)| vi).collect();
        // Ensure CCW from outside: traversal cross product along the normal.
        let p0 = &domain.vertices[idx[0]];
        let p1 = &domain.vertices[idx[1]];
        let p2 = &domain.vertices[idx[2]];
        let a = [
            p1.x.mid_f64() - p0.x.mid_f64(),
            p1.y.mid_f64() - p0.y.mid_f64(),
            p1.z.mid_f64() - p0.z.mid_f64(),
        ];
        let b = [
            p2.x.mid_f64() - p0.x.mid_f64(),
            p2.y.mid_f64() - p0.y.mid_f64(),
            p2.z.mid_f64() - p0.z.mid_f64(),
        ];
        let cr = cross(a, b);
        if cr[0] * n[0] + cr[1] * n[1] + cr[2] * n[2] < 0.0 {
            idx.reverse();
        }
        out.push_str("f");
        for vi in idx {
            out.push_str(&format!(" {}", vi + 1));
        }
        out.push('\n');
    }
    out
}
