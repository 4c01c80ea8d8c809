//! Containment tests for the enclosure arithmetic: every operation must
//! return an interval that contains the exact mathematical result.  Exact
//! reference values are computed with rational arithmetic where possible and
//! with quadruple-working-precision floats otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use tessella::rigor::ball64::{B64, C64, M64, M64c};
use tessella::rigor::{enclosure_from_decimal, Enclosure, Trichotomy, DEFAULT_PREC};

const ORACLE_PREC: u32 = 1000;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

/// A random dyadic rational expressible exactly in f64.
fn rand_dyadic(rng: &mut ChaCha8Rng) -> f64 {
    let mantissa: i32 = rng.gen_range(-1_000_000..=1_000_000);
    let scale: i32 = rng.gen_range(-8..=8);
    mantissa as f64 * (2.0f64).powi(scale - 20)
}

fn oracle(v: &Rational) -> Float {
    Float::with_val(ORACLE_PREC, v)
}

#[test]
fn field_operations_contain_exact_rational_results() {
    let mut rng = rng();
    for _ in 0..200 {
        let a = rand_dyadic(&mut rng);
        let b = rand_dyadic(&mut rng);
        let (qa, qb) = (Rational::from_f64(a).unwrap(), Rational::from_f64(b).unwrap());
        let (ea, eb) = (
            Enclosure::from_f64(a, DEFAULT_PREC),
            Enclosure::from_f64(b, DEFAULT_PREC),
        );
        assert!(ea.add(&eb).contains(&oracle(&(qa.clone() + &qb))));
        assert!(ea.sub(&eb).contains(&oracle(&(qa.clone() - &qb))));
        assert!(ea.mul(&eb).contains(&oracle(&(qa.clone() * &qb))));
        assert!(ea.sqr().contains(&oracle(&(qa.clone() * &qa))));
        if b != 0.0 {
            assert!(ea.div(&eb).unwrap().contains(&oracle(&(qa.clone() / &qb))));
        }
        assert!(ea.neg().contains(&oracle(&(-qa.clone()))));
        assert!(ea.abs().contains(&oracle(&(qa.clone().abs()))));
    }
}

#[test]
fn transcendental_operations_contain_high_precision_oracle() {
    let mut rng = rng();
    for _ in 0..100 {
        let a = rand_dyadic(&mut rng);
        let e = Enclosure::from_f64(a, DEFAULT_PREC);
        let x = Float::with_val(ORACLE_PREC, a);
        assert!(e.exp().contains(&x.clone().exp()));
        assert!(e.sinh().contains(&x.clone().sinh()));
        assert!(e.cosh().contains(&x.clone().cosh()));
        assert!(e.sin().contains(&x.clone().sin()));
        assert!(e.cos().contains(&x.clone().cos()));
        if a > 0.0 {
            assert!(e.ln().unwrap().contains(&x.clone().ln()));
            assert!(e.sqrt().unwrap().contains(&x.clone().sqrt()));
        }
        if a > 1.0 {
            assert!(e.acosh().unwrap().contains(&x.clone().acosh()));
        }
        if a.abs() < 1.0 {
            assert!(e.atanh().unwrap().contains(&x.clone().atanh()));
        }
    }
}

#[test]
fn interval_results_contain_images_of_interior_points() {
    // With a nonzero radius, the image of any contained point must lie in the
    // image enclosure.
    let mut rng = rng();
    for _ in 0..100 {
        let a = rand_dyadic(&mut rng);
        let r = rng.gen_range(1e-12..1e-3);
        let e = Enclosure::new(
            Float::with_val(DEFAULT_PREC, a),
            Float::with_val(53, r),
        );
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            // t*r is exact in f64; the sum is carried out in the oracle
            // precision so the sample certifiably lies inside the enclosure.
            let pt = Float::with_val(ORACLE_PREC, a) + Float::with_val(ORACLE_PREC, t * r);
            let pt = Float::with_val(ORACLE_PREC, pt);
            assert!(e.contains(&pt));
            assert!(e.exp().contains(&pt.clone().exp()));
            assert!(e.cosh().contains(&pt.clone().cosh()));
            assert!(e.sqr().contains(&Float::with_val(ORACLE_PREC, &pt * &pt)));
        }
    }
}

#[test]
fn exactness_is_preserved_for_representable_results() {
    let p = DEFAULT_PREC;
    let one = Enclosure::one(p);
    let two = Enclosure::exact_i64(2, p);
    assert!(one.is_exact());
    assert!(one.add(&one).is_exact());
    assert!(one.div(&two).unwrap().is_exact());
    assert!(two.mul(&two).is_exact());
    assert!(two.sub(&one).is_exact());
    assert!(Enclosure::from_rational(&Rational::from((1, 4)), p).is_exact());
    // 1/3 is not representable in binary: the enclosure must be inexact but
    // still contain the true value.
    let third = Enclosure::from_rational(&Rational::from((1, 3)), p);
    assert!(!third.is_exact());
    assert!(third.contains(&oracle(&Rational::from((1, 3)))));
    // Exact zero must stay exact through products and sums.
    let z = Enclosure::zero(p);
    assert!(z.mul(&third).is_exact());
    assert!(z.add(&z).is_exact());
}

#[test]
fn decimal_parsing_is_exact_for_integers_and_enclosing_for_fractions() {
    let p = DEFAULT_PREC;
    assert!(enclosure_from_decimal("3", p).unwrap().is_exact());
    assert!(enclosure_from_decimal("-17", p).unwrap().is_exact());
    // A decimal point marks a printed (possibly truncated) value, so even a
    // binary-representable fraction carries the half-ulp radius.
    let half = enclosure_from_decimal("0.5", p).unwrap();
    assert!(!half.is_exact());
    assert!(half.contains(&oracle(&Rational::from((1, 2)))));
    let e = enclosure_from_decimal("0.12345", p).unwrap();
    // Published decimals carry half an ulp of the last digit.
    assert!(e.contains(&oracle(&Rational::from((12345, 100_000)))));
    assert!(e.rad_f64() <= 5.1e-6 && e.rad_f64() > 0.0);
    assert!(enclosure_from_decimal("twelve", p).is_none());
}

#[test]
fn trichotomy_is_conservative() {
    let p = DEFAULT_PREC;
    let wide = Enclosure::new(Float::with_val(p, 1), Float::with_val(53, 0.5));
    assert_eq!(wide.cmp_i64(2), Trichotomy::Below);
    assert_eq!(wide.cmp_i64(0), Trichotomy::Above);
    assert_eq!(wide.cmp_i64(1), Trichotomy::Overlap);
    assert_eq!(
        wide.cmp_rational(&Rational::from((5, 4))),
        Trichotomy::Overlap
    );
    let tight = Enclosure::one(p);
    assert_eq!(tight.cmp_enc(&Enclosure::exact_i64(2, p)), Trichotomy::Below);
}

#[test]
fn hull_and_overlap_are_consistent() {
    let p = DEFAULT_PREC;
    let a = Enclosure::from_f64(1.0, p);
    let b = Enclosure::from_f64(1.5, p);
    assert!(!a.overlaps(&b));
    let h = a.hull(&b);
    assert!(h.encloses(&a) && h.encloses(&b));
    assert!(h.overlaps(&a) && h.overlaps(&b));
}

fn b64_contains(b: B64, v: f64) -> bool {
    b.r.is_infinite() || (v - b.m).abs() <= b.r
}

#[test]
fn hardware_balls_contain_exact_results() {
    let mut rng = rng();
    for _ in 0..500 {
        // Small integers: f64 arithmetic on them is exact, giving an exact
        // reference for the ball result.
        let a = rng.gen_range(-1000..1000) as f64;
        let b = rng.gen_range(-1000..1000) as f64;
        let (ba, bb) = (B64::exact(a), B64::exact(b));
        assert!(b64_contains(ba.add(bb), a + b));
        assert!(b64_contains(ba.sub(bb), a - b));
        assert!(b64_contains(ba.mul(bb), a * b));
        assert!(b64_contains(ba.sqr(), a * a));
        assert!(b64_contains(B64::exact(a.abs()).sqrt_clamped(), a.abs().sqrt() * 1.0));
        assert!(ba.sup() >= a && ba.inf() <= a);
    }
}

#[test]
fn hardware_balls_from_enclosures_preserve_containment() {
    let mut rng = rng();
    for _ in 0..200 {
        let a = rand_dyadic(&mut rng);
        let r = rng.gen_range(0.0..1e-6);
        let e = Enclosure::new(Float::with_val(DEFAULT_PREC, a), Float::with_val(53, r));
        let b = B64::from_enclosure(&e);
        // The dyadic midpoint survives conversion exactly; the radius may
        // only grow.
        assert_eq!(b.m, a);
        assert!(b.r >= r);
    }
}

#[test]
fn matrix_ball_product_contains_exact_integer_product() {
    let mut rng = rng();
    let c = |re: f64, im: f64| C64 { re: B64::exact(re), im: B64::exact(im) };
    for _ in 0..100 {
        let mut e = [[0.0f64; 2]; 8];
        for entry in e.iter_mut() {
            entry[0] = rng.gen_range(-20..20) as f64;
            entry[1] = rng.gen_range(-20..20) as f64;
        }
        let m1 = M64 { a: c(e[0][0], e[0][1]), b: c(e[1][0], e[1][1]), c: c(e[2][0], e[2][1]), d: c(e[3][0], e[3][1]) };
        let m2 = M64 { a: c(e[4][0], e[4][1]), b: c(e[5][0], e[5][1]), c: c(e[6][0], e[6][1]), d: c(e[7][0], e[7][1]) };
        let p = m1.mul(&m2);
        // Exact complex 2x2 product on integer entries.
        let mul = |x: [f64; 2], y: [f64; 2]| [x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]];
        let add = |x: [f64; 2], y: [f64; 2]| [x[0] + y[0], x[1] + y[1]];
        let exact_a = add(mul(e[0], e[4]), mul(e[1], e[6]));
        let exact_b = add(mul(e[0], e[5]), mul(e[1], e[7]));
        let exact_c = add(mul(e[2], e[4]), mul(e[3], e[6]));
        let exact_d = add(mul(e[2], e[5]), mul(e[3], e[7]));
        assert!(b64_contains(p.a.re, exact_a[0]) && b64_contains(p.a.im, exact_a[1]));
        assert!(b64_contains(p.b.re, exact_b[0]) && b64_contains(p.b.im, exact_b[1]));
        assert!(b64_contains(p.c.re, exact_c[0]) && b64_contains(p.c.im, exact_c[1]));
        assert!(b64_contains(p.d.re, exact_d[0]) && b64_contains(p.d.im, exact_d[1]));
    }
}

#[test]
fn compact_matrix_storage_round_trips_to_a_superset() {
    let mut rng = rng();
    for _ in 0..200 {
        let mut b = |_: ()| B64 { m: rand_dyadic(&mut rng), r: rng.gen_range(0.0..1e-5) };
        let m = M64 {
            a: C64 { re: b(()), im: b(()) },
            b: C64 { re: b(()), im: b(()) },
            c: C64 { re: b(()), im: b(()) },
            d: C64 { re: b(()), im: b(()) },
        };
        let rt = M64c::from_m64(&m).to_m64();
        let pairs = [
            (m.a.re, rt.a.re), (m.a.im, rt.a.im),
            (m.b.re, rt.b.re), (m.b.im, rt.b.im),
            (m.c.re, rt.c.re), (m.c.im, rt.c.im),
            (m.d.re, rt.d.re), (m.d.im, rt.d.im),
        ];
        for (orig, back) in pairs {
            assert_eq!(orig.m, back.m, "midpoints must be preserved exactly");
            assert!(back.r >= orig.r, "radii must only grow through storage");
            assert!(back.r <= orig.r * (1.0 + 1e-6) + 1e-300, "growth stays negligible");
        }
    }
}

#[test]
fn certainly_comparisons_never_both_hold() {
    let mut rng = rng();
    for _ in 0..200 {
        let b = B64 { m: rand_dyadic(&mut rng), r: rng.gen_range(0.0..0.1) };
        let bound = rand_dyadic(&mut rng);
        assert!(!(b.certainly_above(bound) && b.certainly_below(bound)));
        let unknown = B64::unknown();
        assert!(!unknown.certainly_above(bound) && !unknown.certainly_below(bound));
        assert!(unknown.overlaps(b));
    }
}
