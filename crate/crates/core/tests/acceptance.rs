//! One test per acceptance criterion. Each prints a single
//! `criterion N [PASS|FAIL]` line before asserting.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use smallvec::smallvec;

use dcx_core::cayley::{
    coset_density_series, enumerate_ball, growth_fit, BallOptions, FBallSpec, SubgroupPredicate,
};
use dcx_core::equations::EquationSystem;
use dcx_core::estimator::{
    dc_exact_on_ball, dc_exact_series, dc_finite, dc_series, ds_exact, ds_sampled, EstimatorSettings, MeasureFamily,
    Mode, DEFAULT_BUDGET,
};
use dcx_core::group::{
    center, presets, quotient, quotient_by_normal, Element, GroupModel, Homomorphism, RewritingModel,
    RewritingSystemSpec,
};
use dcx_core::measures::{padded_measure, random_walk_measure, uniform_on_ball, Measure, NORMALIZATION_TOLERANCE};
use dcx_core::theory::{
    centralizer_linear_bound_check, gallagher_check, gustafson_check, gustafson_corpus, index_bound_check,
    negligibility_report, quotient_bound_check, CheckStatus, DEFAULT_SAMPLED_TOLERANCE,
};
use dcx_core::Error;

struct Criterion {
    id: u32,
    limit: Duration,
    start: Instant,
    parts: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, limit_secs: u64) -> Self {
        Criterion { id, limit: Duration::from_secs(limit_secs), start: Instant::now(), parts: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.parts.push((label.into(), ok));
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        self.check(format!("runtime {:.2}s < {}s", elapsed.as_secs_f64(), self.limit.as_secs()), elapsed < self.limit);
        let ok = self.parts.iter().all(|p| p.1);
        let failed: Vec<&str> = self.parts.iter().filter(|p| !p.1).map(|p| p.0.as_str()).collect();
        let summary: Vec<&str> = self.parts.iter().map(|p| p.0.as_str()).collect();
        println!(
            "criterion {} [{}] {}",
            self.id,
            if ok { "PASS" } else { "FAIL" },
            if ok { summary.join("; ") } else { format!("failed: {}", failed.join("; ")) }
        );
        assert!(ok, "criterion {} failed: {failed:?}", self.id);
    }
}

fn ball(model: &GroupModel, n: usize) -> dcx_core::cayley::Ball {
    enumerate_ball(model, n, &BallOptions::default()).unwrap()
}

fn brute_force_dc(model: &GroupModel, elements: &[Element]) -> Ratio<u128> {
    let mut count = 0u128;
    for u in elements {
        for v in elements {
            count += u128::from(model.mul(u, v) == model.mul(v, u));
        }
    }
    Ratio::new(count, (elements.len() * elements.len()) as u128)
}

#[test]
fn criterion_01_gustafson() {
    let mut c = Criterion::new(1, 5);
    let q8 = dc_finite(&presets::quaternion()).unwrap();
    c.check(format!("dc(Q8) = {q8}"), q8 == Ratio::new(5, 8));
    let results = gustafson_check(&gustafson_corpus().unwrap()).unwrap();
    let violations = results.iter().filter(|r| r.status != CheckStatus::Pass).count();
    c.check(format!("{} groups, {violations} violations", results.len()), violations == 0 && results.len() == 17);
    // abelian members are exactly those above 5/8
    let above: Vec<&str> = results.iter().filter(|r| r.lhs.value() > 0.625).map(|r| r.name.as_str()).collect();
    c.check(
        format!("{} groups above 5/8, all abelian", above.len()),
        above.len() == 12 && above.iter().all(|n| n.starts_with("gustafson:Z")),
    );
    c.finish();
}

#[test]
fn criterion_02_free_group_coset_oscillation() {
    let mut c = Criterion::new(2, 10);
    let f2 = presets::free(2);
    let hom = Homomorphism::length_parity(f2.clone()).unwrap();
    let s = coset_density_series(&f2, &hom, &f2.identity(), 12, &BallOptions::default()).unwrap();
    let values = s.values();
    let even_err = (8..=12).step_by(2).map(|n| (values[n] - 0.75).abs()).fold(0.0, f64::max);
    let odd_err = (9..=12).step_by(2).map(|n| (values[n] - 0.25).abs()).fold(0.0, f64::max);
    // (2p-2)(2p-1)/((2p-1)^2-1) at p = 2
    let limsup = (2.0 * 2.0 - 2.0) * (2.0 * 2.0 - 1.0) / ((2.0f64 * 2.0 - 1.0).powi(2) - 1.0);
    c.check(format!("formula value {limsup}"), limsup == 0.75);
    c.check(format!("even n>=8 within {even_err:.4} of 3/4"), even_err < 0.01);
    c.check(format!("odd n>=8 within {odd_err:.4} of 1/4"), odd_err < 0.01);
    c.check("series does not settle", (values[11] - values[12]).abs() > 0.4);
    c.finish();
}

#[test]
fn criterion_03_coset_equidistribution() {
    let mut c = Criterion::new(3, 60);
    let z2 = presets::free_abelian(2);
    let c2 = presets::cyclic(2).unwrap();
    let hom = Homomorphism::from_target_words(z2.clone(), c2, &["e1", "1"]).unwrap();
    let s = coset_density_series(&z2, &hom, &z2.identity(), 100, &BallOptions::default()).unwrap();
    let worst = (50..=100).map(|n| (s.values()[n] - 0.5).abs()).fold(0.0, f64::max);
    c.check(format!("Z^2 index 2: max |value - 1/2| over [50,100] = {worst:.4}"), worst < 0.02);

    let h = presets::heisenberg();
    let (_, hom) = quotient(&h, 2).unwrap();
    let n = 15;
    let s = coset_density_series(&h, &hom, &h.identity(), n, &BallOptions::default()).unwrap();
    let row = &s.rows[n];
    c.check(format!("Heisenberg mod 2 at n={n}: {} cosets", s.index), s.index == 8);
    c.check(format!("max coset deviation from 1/8 = {:.4}", row.max_deviation), row.max_deviation < 0.05);
    c.finish();
}

#[test]
fn criterion_04_dihedral_positive() {
    let mut c = Criterion::new(4, 60);
    let d = presets::infinite_dihedral();
    let radii: Vec<usize> = (100..=200).collect();
    let series = dc_exact_series(&d, &radii).unwrap();
    let mut oracle_ok = true;
    let mut worst: f64 = 0.0;
    for e in &series.entries {
        let n = e.n as u128;
        let t = 2 * (n / 2) + 1;
        let r = 2 * n.div_ceil(2);
        let oracle = Ratio::new(t * t + 3 * r, (2 * n + 1) * (2 * n + 1));
        oracle_ok &= e.report.exact.unwrap() == oracle;
        worst = worst.max((e.report.value - 0.25).abs());
    }
    c.check("closed-form oracle matches every radius", oracle_ok);
    c.check(format!("max |dc - 1/4| over [100,200] = {worst:.4}"), worst < 0.02);

    let spec = FBallSpec::subgroup(SubgroupPredicate::translations());
    let hs = dc_series(&d, &radii, &MeasureFamily::FBall(spec), &EstimatorSettings::exact()).unwrap();
    c.check("translation subgroup series is 1", hs.values().iter().all(|&v| v == 1.0));
    let check = index_bound_check(&series, &hs, 2, (100, 200), DEFAULT_SAMPLED_TOLERANCE).unwrap();
    c.check(format!("index bound {} >= {}", check.lhs.value(), check.rhs.value()), check.passed());
    c.finish();
}

#[test]
fn criterion_05_heisenberg_trend() {
    let mut c = Criterion::new(5, 600);
    let h = presets::heisenberg();
    let exact = dc_exact_series(&h, &(2..=8).collect::<Vec<_>>()).unwrap();
    let values = exact.values();
    c.check("exact dc strictly decreasing on [2,8]", exact.entries.windows(2).all(|w| w[1].report.exact < w[0].report.exact));
    let v8 = values[values.len() - 1];

    let sampled = dc_series(&h, &(10..=14).collect::<Vec<_>>(), &MeasureFamily::UniformBall, &EstimatorSettings::sampled(200_000, 2024)).unwrap();
    let all_sampled = sampled.entries.iter().all(|e| e.report.mode == Mode::Sampled);
    let highest_upper = sampled.entries.iter().map(|e| e.report.upper()).fold(0.0, f64::max);
    c.check(format!("sampled CI upper ends on [10,14] <= {highest_upper:.4} < dc(8) = {v8:.4}"), all_sampled && highest_upper < v8);

    let (q, hom) = quotient(&h, 3).unwrap();
    let q_elems: Vec<Element> = q.elements().unwrap().iter().cloned().collect();
    let oracle = brute_force_dc(&q, &q_elems);
    let window = dc_series(&h, &(8..=12).collect::<Vec<_>>(), &MeasureFamily::UniformBall, &EstimatorSettings::exact()).unwrap();
    let check = quotient_bound_check(&hom, &window, (8, 12), DEFAULT_SAMPLED_TOLERANCE).unwrap();
    c.check(format!("dc(H/3) = {oracle} by brute force"), oracle == Ratio::new(11, 27) && check.rhs.value() == 11.0 / 27.0);
    c.check(format!("quotient bound {:.4} <= {:.4}", check.lhs.value(), check.rhs.value()), check.passed());
    c.finish();
}

#[test]
fn criterion_06_free_group_negligibility() {
    let mut c = Criterion::new(6, 300);
    let f2 = presets::free(2);
    let series = dc_exact_series(&f2, &[1, 2, 3, 4, 5]).unwrap();
    let mut oracle_ok = true;
    for e in &series.entries {
        let b: Vec<Element> = ball(&f2, e.n).iter().cloned().collect();
        oracle_ok &= e.report.exact.unwrap() == brute_force_dc(&f2, &b);
    }
    c.check("exact dc on [1,5] equals double-loop oracle", oracle_ok);
    c.check("dc(1) = 17/25", series.entries[0].report.exact == Some(Ratio::new(17, 25)));
    c.check("decreasing on [1,5]", series.values().windows(2).all(|w| w[1] < w[0]));

    let z222 = presets::free_product(&[2, 2, 2]).unwrap();
    let report = negligibility_report(&z222, 8, 50, 17, &BallOptions::default()).unwrap();
    let torsion = report.torsion_density.clone().unwrap();
    let torsion_window = &torsion[3..=8];
    let torsion_dec = torsion_window.windows(2).all(|w| w[1] < w[0]);
    let rendered: Vec<String> = torsion_window.iter().map(|v| format!("{v:.3}")).collect();
    c.check(format!("Z2*Z2*Z2 torsion density strictly decreasing on [3,8]: {}", rendered.join(",")), torsion_dec);
    let cent: Vec<f64> = report.max_centralizer_density[3..=8].iter().map(|v| v.unwrap()).collect();
    let cent_dec = cent.windows(2).all(|w| w[1] < w[0]);
    let rendered: Vec<String> = cent.iter().map(|v| format!("{v:.4}")).collect();
    c.check(format!("max centralizer density strictly decreasing on [3,8]: {}", rendered.join(",")), cent_dec);

    let check = centralizer_linear_bound_check(&f2, 100, 6, 1, 99).unwrap();
    c.check(format!("centralizer bound {} <= {}", check.lhs.value(), check.rhs.value()), check.passed());
    c.finish();
}

fn builtin_models() -> Vec<(String, GroupModel)> {
    let rws = RewritingSystemSpec::parse(include_str!("data/z2.rws")).unwrap();
    let h = presets::heisenberg();
    vec![
        ("Z".into(), presets::integers()),
        ("Z^2".into(), presets::free_abelian(2)),
        ("F2".into(), presets::free(2)),
        ("F3".into(), presets::free(3)),
        ("H3".into(), h.clone()),
        ("Dinf".into(), presets::infinite_dihedral()),
        ("Z2*Z2*Z2".into(), presets::free_product(&[2, 2, 2]).unwrap()),
        ("Z2*Z3".into(), presets::free_product(&[2, 3]).unwrap()),
        (
            "Z^2:Z4".into(),
            GroupModel::new(dcx_core::group::Semidirect::new(2, vec![vec![0, -1, 1, 0]]).unwrap()),
        ),
        ("Z6".into(), presets::cyclic(6).unwrap()),
        ("S3".into(), presets::symmetric(3).unwrap()),
        ("S4".into(), presets::symmetric(4).unwrap()),
        ("A4".into(), presets::alternating(4).unwrap()),
        ("D4".into(), presets::dihedral(4).unwrap()),
        ("Q8".into(), presets::quaternion()),
        ("H3/3".into(), quotient(&h, 3).unwrap().0),
        ("rws Z^2".into(), GroupModel::new(RewritingModel::new(rws).unwrap())),
    ]
}

#[test]
fn criterion_07_gallagher_and_ds() {
    let mut c = Criterion::new(7, 60);
    let s3 = presets::symmetric(3).unwrap();
    let sign = Homomorphism::from_target_words(s3.clone(), presets::cyclic(2).unwrap(), &["e1", "1"]).unwrap();
    let mut pairs = vec![("S3/A3", sign)];
    for (label, g) in [("D4/Z", presets::dihedral(4).unwrap()), ("Q8/Z", presets::quaternion())] {
        let z = center(&g).unwrap();
        pairs.push((label, quotient_by_normal(&g, &z).unwrap().1));
    }
    for (label, hom) in &pairs {
        let r = gallagher_check(hom).unwrap();
        c.check(format!("{label}: {} <= {}", r.lhs.value(), r.rhs.value()), r.passed() && r.tolerance == 0.0);
    }

    let e = EquationSystem::commutation();
    let mut mismatches = Vec::new();
    let models = builtin_models();
    for (label, g) in &models {
        for n in 0..=3 {
            let b = ball(g, n);
            let dc = dc_exact_on_ball(g, &b, DEFAULT_BUDGET).unwrap();
            let ds = ds_exact(g, &e, &uniform_on_ball(&b).unwrap(), DEFAULT_BUDGET).unwrap();
            if ds.exact != Some(dc) {
                mismatches.push(format!("{label} n={n}"));
            }
        }
    }
    c.check(format!("ds[x1,x2] = dc on {} models, n <= 3 (mismatches {mismatches:?})", models.len()), mismatches.is_empty());

    let meta = EquationSystem::parse(&["[[x1,x2],[x3,x4]]"]).unwrap();
    let all = uniform_on_ball(&s3.elements().unwrap()).unwrap();
    let r = ds_exact(&s3, &meta, &all, DEFAULT_BUDGET).unwrap();
    c.check("metabelian law on S3 has ds 1", r.exact == Some(Ratio::from_integer(1)));
    c.finish();
}

#[test]
fn criterion_08_growth() {
    let mut c = Criterion::new(8, 120);
    let sizes = |g: &GroupModel, lo: usize, hi: usize| -> Vec<(usize, u64)> {
        ball(g, hi).cumulative_sizes().into_iter().filter(|(r, _)| *r >= lo).collect()
    };
    let th = Default::default();
    let z = growth_fit(&sizes(&presets::integers(), 1, 200), &th).unwrap();
    c.check(format!("Z degree {:.3}", z.poly_degree_estimate), (z.poly_degree_estimate - 1.0).abs() < 0.1);
    let z2 = growth_fit(&sizes(&presets::free_abelian(2), 1, 100), &th).unwrap();
    c.check(format!("Z^2 degree {:.3}", z2.poly_degree_estimate), (z2.poly_degree_estimate - 2.0).abs() < 0.3);
    let h = growth_fit(&sizes(&presets::heisenberg(), 8, 15), &th).unwrap();
    c.check(format!("Heisenberg degree on [8,15] {:.3}", h.poly_degree_estimate), (h.poly_degree_estimate - 4.0).abs() < 0.5);
    let f = growth_fit(&sizes(&presets::free(2), 0, 12), &th).unwrap();
    c.check(format!("F2 rate {:.4}", f.exp_rate_estimate), (f.exp_rate_estimate - 3.0).abs() < 0.05);
    c.finish();
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn criterion_09_measures_and_sampling() {
    let mut c = Criterion::new(9, 120);
    let mut measures: Vec<Measure> = Vec::new();
    for (_, g) in builtin_models() {
        measures.push(uniform_on_ball(&ball(&g, 3)).unwrap());
        measures.push(random_walk_measure(&g, 6, 0.0).unwrap());
        measures.push(random_walk_measure(&g, 6, 0.5).unwrap());
    }
    let f2 = presets::free(2);
    let a = f2.parse_element("a").unwrap();
    for m in [0, 1, 5, 40] {
        measures.push(padded_measure(&f2, &ball(&f2, 3), &a, m).unwrap());
    }
    let worst = measures.iter().map(|m| (m.total() - 1.0).abs()).fold(0.0, f64::max);
    c.check(format!("{} measures, max |mass - 1| = {worst:.1e}", measures.len()), worst <= NORMALIZATION_TOLERANCE);

    let z = presets::integers();
    let mut walk_err: f64 = 0.0;
    let mut support_ok = true;
    for n in 0..=10u64 {
        let mu = random_walk_measure(&z, n as usize, 0.0).unwrap();
        support_ok &= mu.len() as u64 == n + 1;
        for j in 0..=n {
            let k = 2 * j as i64 - n as i64;
            let exact = binomial(n, j) / 2f64.powi(n as i32);
            walk_err = walk_err.max((mu.prob_of(&Element::Coords(smallvec![k])) - exact).abs());
        }
    }
    c.check(format!("Z walk vs binomial, n <= 10: max error {walk_err:.1e}"), walk_err < 1e-12 && support_ok);

    let q8 = presets::quaternion();
    let mu = uniform_on_ball(&q8.elements().unwrap()).unwrap();
    let e = EquationSystem::commutation();
    let covered = (0..100u64)
        .filter(|&seed| {
            let (lo, hi) = ds_sampled(&q8, &e, &mu, 2_000, seed).unwrap().ci95.unwrap();
            lo <= 0.625 && 0.625 <= hi
        })
        .count();
    c.check(format!("Q8 CI covers 5/8 in {covered}/100 runs"), covered >= 90);
    c.finish();
}

#[test]
fn criterion_10_rewriting_fidelity() {
    let mut c = Criterion::new(10, 10);
    let spec = RewritingSystemSpec::parse(include_str!("data/z2.rws")).unwrap();
    let model = RewritingModel::new(spec).unwrap();
    c.check("Z^2 system confluent", model.confluence().confluent && model.confluence().unjoinable().count() == 0);
    let rws = GroupModel::new(model);
    let z2 = presets::free_abelian(2);
    let mut iso = true;
    for n in 0..=6 {
        let br = ball(&rws, n);
        let bz = ball(&z2, n);
        iso &= br.len() == bz.len() && br.sphere_sizes() == bz.sphere_sizes();
        let mut image = std::collections::HashSet::new();
        for i in 0..br.len() {
            // a -> e1, b -> e2: same generator positions
            let w = br.word_of(&rws, i).unwrap();
            let z = z2.eval_gen_word(&w);
            iso &= bz.distance(&z) == Some(br.distance_of_index(i));
            image.insert(z);
        }
        iso &= image.len() == bz.len();
    }
    c.check("balls n <= 6 match free-abelian(2) element for element", iso);

    let bad = RewritingSystemSpec::parse(include_str!("data/nonconfluent.rws")).unwrap();
    let bad_model = RewritingModel::new(bad).unwrap();
    let unjoinable = bad_model.confluence().unjoinable().count();
    let rejected = matches!(enumerate_ball(&GroupModel::new(bad_model), 2, &BallOptions::default()), Err(Error::NonConfluent(_)));
    c.check(format!("{{ab->a, b->c}}: {unjoinable} unjoinable pair(s), enumeration rejected"), unjoinable > 0 && rejected);
    c.finish();
}
