mod common;

use common::n2_generators;
use rug::ops::Pow;
use rug::Rational;
use std::sync::OnceLock;
use tessella::cover::{
    build_report, degree_candidates_by_length, inter_geodesic_distance_check,
    involution_parity_check, max_cover_degree, ortholine_count_check, thick_length_cutoff,
    tube_volume, CoverInputs, Rule, Verdict,
};
use tessella::dirichlet::{auto_pairings, build_domain, DirichletDomain};
use tessella::ortho::{orthospectrum, reduce_to_torus, Basing, Ortholine};
use tessella::rigor::{ComplexEnclosure, Enclosure, DEFAULT_PREC};
use tessella::spectrum::length_spectrum;
use tessella::ExecMode;

fn n2_domain() -> &'static DirichletDomain {
    static DOM: OnceLock<DirichletDomain> = OnceLock::new();
    DOM.get_or_init(|| {
        let gens = n2_generators();
        let pairings = auto_pairings(&gens, 40).unwrap();
        build_domain(&pairings).unwrap()
    })
}

fn rational(s: &str) -> Rational {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let denom = rug::Integer::from(10u32).pow(frac.len() as u32);
    let num: rug::Integer = format!("{int}{frac}").parse().unwrap();
    Rational::from((num, denom))
}

#[test]
fn tube_volume_basics_and_cutoff_inverse() {
    let prec = DEFAULT_PREC;
    let l = Enclosure::from_f64(3.18385, prec);
    let zero = Enclosure::zero(prec);
    assert!(tube_volume(&l, &zero).contains_zero());

    // Monotonicity in both arguments.
    let r = Enclosure::from_f64(0.5, prec);
    let v = tube_volume(&l, &r).mid_f64();
    assert!(tube_volume(&Enclosure::from_f64(3.2, prec), &r).mid_f64() > v);
    assert!(tube_volume(&l, &Enclosure::from_f64(0.6, prec)).mid_f64() > v);

    // Exact inverse of the cutoff: a log(3)/2-tube about a geodesic at the
    // cutoff length has volume exactly density·vol.
    let vol = Enclosure::from_f64(3.6638, prec);
    let density = Rational::from((91u32, 100u32));
    let cutoff = thick_length_cutoff(&vol, &density).unwrap();
    let half_log3 = Enclosure::exact_i64(3, prec)
        .ln()
        .unwrap()
        .div(&Enclosure::exact_i64(2, prec))
        .unwrap();
    let back = tube_volume(&cutoff, &half_log3);
    let target = vol.mul(&Enclosure::from_rational(&density, prec));
    assert!(back.overlaps(&target), "{} vs {}", back.mid_f64(), target.mid_f64());
}

#[test]
fn thick_length_cutoff_reproduces_reference_values() {
    let prec = DEFAULT_PREC;
    let density = Rational::from((91u32, 100u32));
    for (vol, want) in [(3.6638, 3.18385), (7.73809, 6.72429), (7.517689, 6.53277)] {
        let cut = thick_length_cutoff(&Enclosure::from_f64(vol, prec), &density).unwrap();
        // Reference values were chained through intermediate roundings, so
        // they agree only to about four decimals.
        assert!(
            (cut.mid_f64() - want).abs() < 1e-4,
            "vol {vol}: cutoff {} vs {want}",
            cut.mid_f64()
        );
    }
}

#[test]
fn max_cover_degree_values_and_certificates() {
    let prec = DEFAULT_PREC;
    let m = Enclosure::from_f64(0.9427, prec);
    for (vol, want) in [(3.6638, 3u32), (7.73809, 8), (7.517689, 7)] {
        let v = Enclosure::from_f64(vol, prec);
        let p = max_cover_degree(&v, &m).unwrap();
        assert_eq!(p, want, "vol {vol}");
        // Certified sandwich: p·m ≤ v < (p+1)·m.
        let below = m.mul(&Enclosure::exact_i64(p as i64, prec));
        let above = m.mul(&Enclosure::exact_i64(p as i64 + 1, prec));
        assert!(below.cmp_enc(&v) != tessella::rigor::Trichotomy::Above);
        assert!(above.cmp_enc(&v) == tessella::rigor::Trichotomy::Above);
    }
    // An exact integer ratio is attainable, hence decidable.
    let two_m = m.mul(&Enclosure::exact_i64(2, prec));
    assert_eq!(max_cover_degree(&two_m, &m).unwrap(), 2);
    // A volume enclosure straddling a multiple of the minimum is not.
    let wide = Enclosure::new(
        rug::Float::with_val(prec, 2.5),
        rug::Float::with_val(prec, 1.0),
    );
    assert!(max_cover_degree(&wide, &Enclosure::one(prec)).is_err());
}

#[test]
fn degree_candidates_exclude_by_shortest_geodesic() {
    let dom = n2_domain();
    let table = length_spectrum(dom, &rational("3.18385"), ExecMode::Parallel).unwrap();
    let shortest = table.groups[0].length.re.clone();
    let cands = degree_candidates_by_length(&table, &shortest, 2..=3).unwrap();
    // Re 1.06128 groups: covered lengths are certifiably shorter, retained.
    assert_eq!(cands[0].retained, vec![2, 3]);
    assert_eq!(cands[1].retained, vec![2, 3]);
    // Re 2.13862 group: 2.13862/2 = 1.06931 certifiably exceeds 1.06128.
    let g3 = cands
        .iter()
        .find(|c| (table.groups[c.group].length.re.mid_f64() - 2.13862).abs() < 1e-4)
        .unwrap();
    assert!(!g3.retained.contains(&2));
    // A length exactly twice the shortest is retained (tight overlap).
    let double = shortest.mul(&Enclosure::exact_i64(2, DEFAULT_PREC));
    let synthetic = tessella::spectrum::SpectrumTable {
        cutoff: rational("5"),
        classes: table.classes.clone(),
        groups: vec![tessella::spectrum::LengthGroup {
            length: ComplexEnclosure::new(double, Enclosure::zero(DEFAULT_PREC)),
            class_indices: vec![0],
            warned: false,
        }],
        frontier_warnings: 0,
    };
    let c = degree_candidates_by_length(&synthetic, &shortest, 2..=2).unwrap();
    assert_eq!(c[0].retained, vec![2]);
    assert_eq!(c[0].tight, vec![2]);
}

fn synthetic_ortholine(
    len: &ComplexEnclosure,
    src: ComplexEnclosure,
    tgt: ComplexEnclosure,
) -> Ortholine {
    Ortholine {
        length: len.clone(),
        source: Basing { position: src },
        target: Basing { position: tgt },
        source_id: 0,
        target_id: 0,
        lifts: 1,
        warned: false,
    }
}

#[test]
fn count_check_accepts_equally_spaced_and_rejects_deficits() {
    let gens = n2_generators();
    let rep = gens.eval_word("f").unwrap();
    let length = rep.complex_length().unwrap();
    let class = tessella::spectrum::GeodesicClass {
        axis_endpoints: rep.fixed_points().ok(),
        axis_distance: Enclosure::zero(DEFAULT_PREC),
        rep,
        length,
        label: 0,
        warned: false,
    };
    let prec = DEFAULT_PREC;
    let olen = ComplexEnclosure::from_f64s(1.5, 0.3, prec);
    let quarter = ComplexEnclosure::new(
        class.length.re().div(&Enclosure::exact_i64(4, prec)).unwrap(),
        class.length.im().div(&Enclosure::exact_i64(4, prec)).unwrap(),
    );
    let v0 = ComplexEnclosure::from_f64s(0.11, 0.7, prec);
    let w0 = ComplexEnclosure::from_f64s(-0.23, -1.9, prec);
    let mut lines = Vec::new();
    let mut s = v0.clone();
    let mut t = w0.clone();
    for _ in 0..4 {
        lines.push(synthetic_ortholine(
            &olen,
            reduce_to_torus(&s, &class.length),
            reduce_to_torus(&t, &class.length),
        ));
        s = s.add(&quarter);
        t = t.add(&quarter);
    }
    // Four deck-translates: a degree-4 self-cover is not excluded.
    assert_eq!(ortholine_count_check(&lines, 4, &class), Verdict::NotExcluded);
    assert_eq!(ortholine_count_check(&lines, 2, &class), Verdict::NotExcluded);
    // Count not divisible by the degree: excluded.
    assert_eq!(
        ortholine_count_check(&lines, 3, &class),
        Verdict::Excluded(Rule::OrtholineCount)
    );
    // Count below the degree: excluded.
    assert_eq!(
        ortholine_count_check(&lines[..2], 4, &class),
        Verdict::Excluded(Rule::OrtholineCount)
    );
    // Equal counts but misplaced endpoints: excluded by the deck test.
    let mut skewed = lines.clone();
    skewed[1].source.position =
        skewed[1].source.position.add(&ComplexEnclosure::from_f64s(0.09, 0.0, prec));
    assert_eq!(
        ortholine_count_check(&skewed, 4, &class),
        Verdict::Excluded(Rule::OrtholineCount)
    );
}

#[test]
fn involution_parity_odd_count_below_excludes_degree_two() {
    let dom = n2_domain();
    let table = length_spectrum(dom, &rational("3.18385"), ExecMode::Parallel).unwrap();
    // Candidate at 2.13862: the multiplicity-3 length class at 1.76275 sits
    // certifiably below it, so the free involution of a 2-fold cover would
    // fix one of those three geodesics setwise and halve its length
    // downstairs — shorter than the covered geodesic.
    let cand = &table.classes[table.groups[3].class_indices[0]];
    assert!((cand.length.re().mid_f64() - 2.13862).abs() < 1e-4);
    assert_eq!(
        involution_parity_check(&table, cand),
        Verdict::Excluded(Rule::InvolutionParity)
    );
    // Candidate within the shortest length class: no complete length class
    // lies certifiably below it, so parity says nothing.
    let short = &table.classes[table.groups[1].class_indices[0]];
    assert_eq!(involution_parity_check(&table, short), Verdict::NotExcluded);
}

#[test]
fn distance_check_flags_single_component() {
    let prec = DEFAULT_PREC;
    let log3 = rational("1.0986");
    let short = synthetic_ortholine(
        &ComplexEnclosure::from_f64s(0.88137, -1.5708, prec),
        ComplexEnclosure::from_f64s(0.0, 0.0, prec),
        ComplexEnclosure::from_f64s(0.0, 0.0, prec),
    );
    let long = synthetic_ortholine(
        &ComplexEnclosure::from_f64s(1.2, 0.0, prec),
        ComplexEnclosure::from_f64s(0.0, 0.0, prec),
        ComplexEnclosure::from_f64s(0.0, 0.0, prec),
    );
    assert_eq!(
        inter_geodesic_distance_check(&[short, long.clone()], &log3),
        Verdict::Excluded(Rule::InterGeodesicDistance)
    );
    assert_eq!(inter_geodesic_distance_check(&[long], &log3), Verdict::NotExcluded);
}

#[test]
fn n2_report_leaves_exactly_degree_two_surviving() {
    let dom = n2_domain();
    let table = length_spectrum(dom, &rational("3.18385"), ExecMode::Parallel).unwrap();
    // The thick-tube classes are the multiplicity-3 group at 1.06128+2.23704i.
    let thick: Vec<usize> = table.groups[1].class_indices.clone();
    assert_eq!(thick.len(), 3);
    let mut self_orthos = Vec::new();
    for &ci in &thick {
        let c = &table.classes[ci];
        let lines = orthospectrum(c, c, dom, &rational("2"), ExecMode::Parallel).unwrap();
        self_orthos.push((c.label, lines));
    }
    let cross = orthospectrum(
        &table.classes[thick[0]],
        &table.classes[thick[1]],
        dom,
        &rational("1.4"),
        ExecMode::Parallel,
    )
    .unwrap();
    let inputs = CoverInputs {
        volume: Enclosure::from_f64(3.6638, DEFAULT_PREC),
        min_volume: Enclosure::from_f64(0.9427, DEFAULT_PREC),
        density: Rational::from((91u32, 100u32)),
        spectrum: table.clone(),
        self_orthos,
        cross_orthos: vec![(
            table.classes[thick[0]].label,
            table.classes[thick[1]].label,
            cross,
        )],
        notes: String::new(),
    };
    let report = build_report(&inputs).unwrap();
    assert_eq!(report.max_degree, 3);
    assert!((report.thick_length_cutoff.mid_f64() - 3.18385).abs() < 1e-4);
    let survivors = report.survivors();
    assert_eq!(survivors.len(), 3, "{survivors:?}");
    assert!(survivors.iter().all(|(_, d)| *d == 2));
    // Degree 3 excluded for every thick class by the ortholine count.
    for f in &report.findings {
        if f.degree == 3 {
            assert_eq!(f.verdict, Verdict::Excluded(Rule::OrtholineCount));
        }
    }
    // Distinct thick geodesics are certifiably closer than log 3.
    assert_eq!(
        report.single_component[0].2,
        Verdict::Excluded(Rule::InterGeodesicDistance)
    );
    assert!(report.undecided.is_empty());
    let text = report.to_string();
    assert!(text.contains("NOT-EXCLUDED"));
    assert!(text.contains("conclusion"));
}
