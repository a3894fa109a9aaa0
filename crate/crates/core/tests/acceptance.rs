//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints its own PASS/FAIL line under `cargo test`.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::Rng;

use distset_core::classifier::{
    classify, classify_embeddability, classify_isometry, isometry_guards, ChainPosition, ComplexityKind, EmbedVerdict,
    IsomVerdict, UpperBound,
};
use distset_core::constructions::{glue, graph_space, max_product, tree_space, Graph};
use distset_core::distance_set::{Component, DistanceSetDesc, OrderType, SetFacts, Tristate};
use distset_core::metric::{distance_spectrum, is_ultrametric, validate_metric, FiniteMetricSpace};
use distset_core::mpf::{check_sufficient_condition, is_metric_preserving_finite, tabulate, transform_space};
use distset_core::oracles::{find_embedding, find_isometry, SearchLimits};
use distset_core::rational::{int, q, Rational};
use distset_core::urysohn::{four_values_check, urysohn_stage, verify_one_point_homogeneity, verify_universality};

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn isometric(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    find_isometry(x, y, &SearchLimits::default()).unwrap().is_some()
}

fn embeds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    find_embedding(x, y, &SearchLimits::default()).unwrap().is_some()
}

fn spectrum_law() -> Outcome {
    let mut rng = rng(1);
    let mut checked = 0;
    for _ in 0..200 {
        let nx = rng.gen_range(1..=6);
        let ny = rng.gen_range(1..=6);
        let x = random_rational_space(&mut rng, nx);
        let y = random_rational_space(&mut rng, ny);
        let union: BTreeSet<Rational> = distance_spectrum(&x).into_iter().chain(distance_spectrum(&y)).collect();
        let positive: Vec<&Rational> = union.iter().filter(|r| r.is_positive()).collect();
        let realized = |i: usize| positive.get(i).map(|&r| r.clone()).unwrap_or(int(1));
        let rs = [
            q(rng.gen_range(1..=30), rng.gen_range(1..=7)),
            realized(positive.len().saturating_sub(1)),
            realized(positive.len() / 2),
        ];
        for r in rs {
            let (xb, yb) = (rng.gen_range(0..nx), rng.gen_range(0..ny));
            let g = glue(&x, &y, &r, xb, yb).map_err(|e| e.to_string())?;
            let mut expected = union.clone();
            expected.insert(r.clone());
            let got: BTreeSet<Rational> = distance_spectrum(&g).into_iter().collect();
            ensure(got == expected, || format!("spectrum mismatch for r = {r}: {got:?} vs {expected:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} glued spaces"))
}

fn graph_reduction() -> Outcome {
    let lim = SearchLimits::default();
    let (r, rp) = (int(1), int(2));
    let small: Vec<Graph> = (1..=4).flat_map(Graph::all_on).collect();
    let mut pairs: Vec<(Graph, Graph)> = small
        .iter()
        .cartesian_product(small.iter())
        .map(|(g, h)| (g.clone(), h.clone()))
        .collect();
    let mut rng = rng(2);
    for _ in 0..100 {
        pairs.push((random_graph(&mut rng, 5), random_graph(&mut rng, 5)));
    }
    for (g, h) in &pairs {
        let (xg, xh) = (graph_space(g, &r, &rp).unwrap(), graph_space(h, &r, &rp).unwrap());
        let iso = brute_graph_iso(g, h);
        let emb = brute_graph_embed(g, h);
        ensure(iso == isometric(&xg, &xh), || format!("isometry mismatch on {g:?} vs {h:?}"))?;
        ensure(emb == embeds(&xg, &xh), || format!("embedding mismatch on {g:?} vs {h:?}"))?;
        let oracle_iso = distset_core::oracles::graph_iso(g, h, &lim).unwrap().is_some();
        ensure(iso == oracle_iso, || format!("graph oracle disagrees on {g:?} vs {h:?}"))?;
    }
    Ok(format!("{} graph pairs, zero mismatches", pairs.len()))
}

/// Every valid matrix on `n` points with off-diagonal entries from `values`.
fn all_spaces_over(n: usize, values: &[i64]) -> Vec<FiniteMetricSpace> {
    let slots: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    if slots.is_empty() {
        return vec![FiniteMetricSpace::singleton()];
    }
    slots
        .iter()
        .map(|_| values.iter())
        .multi_cartesian_product()
        .filter_map(|fill| {
            let mut d = vec![vec![Rational::zero(); n]; n];
            for (&(i, j), &&v) in slots.iter().zip(&fill) {
                d[i][j] = int(v);
                d[j][i] = int(v);
            }
            validate_metric(d).ok()
        })
        .collect()
}

fn ultrametric_dichotomy() -> Outcome {
    let mut count = 0;
    for n in 1..=4 {
        for x in all_spaces_over(n, &[1, 3, 9]) {
            ensure(is_ultrametric(&x), || format!("non-ultrametric {{0,1,3,9}}-space {x:?}"))?;
            count += 1;
        }
    }
    let tri = validate_metric(vec![
        vec![int(0), int(1), int(2)],
        vec![int(1), int(0), int(1)],
        vec![int(2), int(1), int(0)],
    ])
    .map_err(|e| e.to_string())?;
    ensure(!is_ultrametric(&tri), || "(1,1,2) triangle reported ultrametric".into())?;
    Ok(format!("{count} {{0,1,3,9}}-spaces ultrametric; (1,1,2) is not"))
}

fn padding_reduction() -> Outcome {
    let mut rng = rng(4);
    let r0 = int(5);
    let z = FiniteMetricSpace::equilateral(2, &int(4));
    let (mut iso_pos, mut emb_pos) = (0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let x = random_space_over(&mut rng, n, &[1, 2]);
        let y = partner_over(&mut rng, &x, &[1, 2], 5);
        let gx = glue(&x, &z, &r0, 0, 0).unwrap();
        let gy = glue(&y, &z, &r0, 0, 0).unwrap();
        let (iso, emb) = (brute_isometric(&x, &y), brute_embeds(&x, &y));
        ensure(iso == isometric(&gx, &gy), || format!("isometry not reduced: {x:?} vs {y:?}"))?;
        ensure(emb == embeds(&gx, &gy), || format!("embedding not reduced: {x:?} vs {y:?}"))?;
        iso_pos += usize::from(iso);
        emb_pos += usize::from(emb);
    }
    Ok(format!("100 pairs ({iso_pos} isometric, {emb_pos} embeddable), zero mismatches"))
}

fn product_reduction() -> Outcome {
    let mut rng = rng(5);
    let (r0, r1) = (int(5), int(7));
    let z = glue(&FiniteMetricSpace::equilateral(2, &r0), &FiniteMetricSpace::singleton(), &r1, 0, 0).unwrap();
    let mut positives = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let x = random_space_over(&mut rng, n, &[1, 2]);
        let y = partner_over(&mut rng, &x, &[1, 2], 4);
        let iso = brute_isometric(&x, &y);
        let px = max_product(&x, &z);
        let py = max_product(&y, &z);
        ensure(iso == isometric(&px, &py), || format!("product reduction fails on {x:?} vs {y:?}"))?;
        positives += usize::from(iso);
    }
    Ok(format!("50 pairs ({positives} isometric), zero mismatches"))
}

fn tree_spaces() -> Outcome {
    let mut rng = rng(6);
    for _ in 0..50 {
        let data = random_tree_data(&mut rng, 3);
        let s = tree_space(&data).map_err(|e| format!("{e} for {data:?}"))?;
        ensure(!distance_spectrum(&s).contains(&data.x), || format!("x realized by {data:?}"))?;
        ensure(s.len() == data.nodes.len() + 1, || "wrong point count".into())?;
    }
    Ok("50 random trees validate and omit x".into())
}

fn urysohn_stage_check() -> Outcome {
    let a: BTreeSet<Rational> = [0, 1, 2].into_iter().map(int).collect();
    let values: Vec<Rational> = a.iter().cloned().collect();
    ensure(four_values_check(&values).is_ok(), || "{0,1,2} fails 4-values".into())?;
    let stage = urysohn_stage(&a, 40, 3, 2).map_err(|e| e.to_string())?;
    let lim = SearchLimits::default();
    let universal = verify_universality(&stage.space, &a, 3, &lim).map_err(|e| e.to_string())?;
    ensure(universal.is_ok(), || format!("missing space {:?}", universal.clone().unwrap_err()))?;
    let homog = verify_one_point_homogeneity(&stage.space, 2);
    ensure(homog.is_ok(), || format!("stuck map {:?}", homog.clone().unwrap_err()))?;
    Ok(format!("stage of {} points, universal at 3, homogeneous at 2", stage.space.len()))
}

fn metric_preserving_bridge() -> Outcome {
    let domain: Vec<Rational> = (0..=3).map(int).collect();
    let f = tabulate(&domain, |r| r / (Rational::one() + r));
    ensure(is_metric_preserving_finite(&f).unwrap().is_ok(), || "r/(1+r) not preserving".into())?;
    ensure(check_sufficient_condition(&f), || "r/(1+r) fails the sufficient condition".into())?;
    let mut rng = rng(8);
    let mut positives = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let x = random_space_over(&mut rng, n, &[1, 2, 3]);
        let y = partner_over(&mut rng, &x, &[1, 2, 3], 6);
        let fx = transform_space(&f, &x).map_err(|e| e.to_string())?;
        let fy = transform_space(&f, &y).map_err(|e| e.to_string())?;
        let iso = isometric(&x, &y);
        ensure(iso == isometric(&fx, &fy), || format!("transform changes isometry on {x:?} vs {y:?}"))?;
        positives += usize::from(iso);
    }
    Ok(format!("100 transformed spaces validate ({positives} isometric pairs)"))
}

fn fin(values: &[i64]) -> Component {
    Component::finite(values.iter().map(|&v| int(v)))
}

fn golden_sets() -> Vec<(&'static str, DistanceSetDesc)> {
    let desc = |c: Vec<Component>| DistanceSetDesc::new(c).unwrap();
    vec![
        ("finite_0_1_3_9", desc(vec![fin(&[0, 1, 3, 9])])),
        ("closed_interval_1", desc(vec![Component::ClosedInterval { b: int(1) }])),
        ("finite_0", desc(vec![fin(&[0])])),
        ("dense_rationals_0_1", desc(vec![Component::DenseRationals { a: int(0), b: int(1) }])),
        ("finite_0_1_2", desc(vec![fin(&[0, 1, 2])])),
        (
            "geomdown_1_third_with_0",
            desc(vec![Component::GeomDown { r0: int(1), q: q(1, 3) }, fin(&[0])]),
        ),
        (
            "dense_rationals_0_1_with_0",
            desc(vec![Component::DenseRationals { a: int(0), b: int(1) }, fin(&[0])]),
        ),
    ]
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn classifier_golden() -> Outcome {
    let bless = std::env::var_os("DISTSET_BLESS").is_some();
    let mut reports = std::collections::BTreeMap::new();
    for (name, a) in golden_sets() {
        let report = classify(&a).map_err(|e| e.to_string())?;
        let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
        let again = serde_json::to_string_pretty(&classify(&a).unwrap()).unwrap() + "\n";
        ensure(text == again, || format!("{name}: report not byte-stable"))?;
        let path = golden_dir().join(format!("{name}.json"));
        if bless {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let frozen = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(frozen == text, || format!("{name}: report differs from {}", path.display()))?;
        reports.insert(name, report);
    }

    let r = &reports["finite_0_1_3_9"];
    ensure(r.topology.value().unwrap().all_ultrametric, || "{0,1,3,9} ultrametric".into())?;
    let chain4 = ChainPosition::Finite(4);
    ensure(
        r.isometry_star.value().unwrap().verdict == IsomVerdict::BorelChain { position: chain4 },
        || "{0,1,3,9} isometry".into(),
    )?;
    ensure(
        r.embeddability_star.value().unwrap().verdict == EmbedVerdict::BorelChain { position: chain4 },
        || "{0,1,3,9} embeddability".into(),
    )?;

    let r = &reports["closed_interval_1"];
    let t = r.topology.value().unwrap();
    ensure(!t.all_zero_dimensional && t.exists_connected, || "[0,1] topology".into())?;
    ensure(r.v_a.value().unwrap().verdict.class == ComplexityKind::Borel, || "[0,1] V_A".into())?;
    let star = r.v_a_star.value().unwrap().verdict;
    ensure(
        star.class == ComplexityKind::Sigma11Hard && star.upper_bound == Some(UpperBound::Pi12),
        || "[0,1] V*_A".into(),
    )?;
    ensure(r.isometry_star.value().unwrap().verdict == IsomVerdict::OrbitComplete, || "[0,1] isometry".into())?;

    let r = &reports["finite_0"];
    ensure(r.topology.value().unwrap().all_connected, || "{0} connected".into())?;

    let r = &reports["dense_rationals_0_1"];
    ensure(r.v_a.value().unwrap().verdict.class == ComplexityKind::Pi11Complete, || "Q∩[0,1] V_A".into())?;
    ensure(
        r.isometry_star.value().unwrap().verdict == IsomVerdict::StrictlyAboveGraphIsoBelowOrbitComplete,
        || "Q∩[0,1] isometry".into(),
    )?;

    let r = &reports["finite_0_1_2"];
    ensure(r.v_a.value().unwrap().verdict.class == ComplexityKind::Borel, || "{0,1,2} V_A".into())?;
    ensure(
        r.isometry_star.value().unwrap().verdict == IsomVerdict::GraphIsoBireducible,
        || "{0,1,2} isometry".into(),
    )?;
    ensure(
        matches!(
            r.embeddability_star.value().unwrap().verdict,
            EmbedVerdict::CompleteAnalyticQuasiOrder { invariantly_universal: true }
        ),
        || "{0,1,2} embeddability".into(),
    )?;
    ensure(r.urysohn_exists.value().unwrap().verdict == Tristate::True, || "{0,1,2} Urysohn".into())?;

    let r = &reports["geomdown_1_third_with_0"];
    ensure(r.v_a_star.value().unwrap().verdict.class == ComplexityKind::Borel, || "3^-n V*_A".into())?;
    ensure(
        r.isometry_star.value().unwrap().verdict == IsomVerdict::GraphIsoBireducible,
        || "3^-n isometry".into(),
    )?;
    ensure(
        matches!(
            r.embeddability_star.value().unwrap().verdict,
            EmbedVerdict::CompleteAnalyticQuasiOrder { .. }
        ),
        || "3^-n embeddability".into(),
    )?;
    ensure(r.urysohn_exists.value().unwrap().verdict == Tristate::Undecided, || "3^-n Urysohn".into())?;

    let r = &reports["dense_rationals_0_1_with_0"];
    ensure(
        r.v_a_star.value().unwrap().verdict.class == ComplexityKind::D2Sigma11Complete,
        || "Q∩[0,1]∪{0} V*_A".into(),
    )?;
    ensure(r.urysohn_exists.value().unwrap().verdict == Tristate::False, || "Q∩[0,1]∪{0} Urysohn".into())?;

    Ok("7 golden reports match and are byte-stable".into())
}

fn all_fact_assignments() -> Vec<SetFacts> {
    let order_types = [OrderType::Finite(1), OrderType::Finite(3), OrderType::Omega, OrderType::NotApplicable];
    let tristates = [Tristate::True, Tristate::False, Tristate::Undecided];
    let mut out = Vec::new();
    for bits in 0u32..1 << 12 {
        let b = |i: u32| bits >> i & 1 == 1;
        for &order_type_if_wf in &order_types {
            for &four_values in &tristates {
                out.push(SetFacts {
                    zero_in_a: b(0),
                    zero_isolated: b(1),
                    countable: b(2),
                    closed: b(3),
                    well_spaced: b(4),
                    well_founded: b(5),
                    order_type_if_wf,
                    has_max: b(6),
                    dense_near_zero: b(7),
                    contains_right_nbhd_of_zero: b(8),
                    has_limit_point_other_than_zero: b(9),
                    some_nonzero_limit_point_in_a: b(10),
                    initial_interval: b(11),
                    four_values,
                });
            }
        }
    }
    out
}

fn case_exhaustiveness() -> Outcome {
    let mut consistent = 0;
    for facts in all_fact_assignments() {
        if !facts.is_consistent() || !distset_core::classifier::is_realizable(&facts) {
            continue;
        }
        consistent += 1;
        let hits = isometry_guards(&facts).iter().filter(|&&g| g).count();
        ensure(hits == 1, || format!("{hits} guards hold for {facts:?}"))?;
        let iso = classify_isometry(&facts).unwrap();
        let emb = classify_embeddability(&facts).unwrap();
        let iso_chain = matches!(iso.isometry_star.verdict, IsomVerdict::BorelChain { .. });
        let emb_chain = matches!(emb.embeddability_star.verdict, EmbedVerdict::BorelChain { .. });
        ensure(iso_chain == emb_chain, || format!("chain verdicts disagree for {facts:?}"))?;
        ensure(iso.graph_iso_reduces.verdict == !iso_chain, || format!("graph reduction flag for {facts:?}"))?;
    }
    Ok(format!("{consistent} consistent assignments, one guard each"))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "spectrum law for gluing", budget: secs(5), run: spectrum_law },
        Criterion { name: "graph reduction", budget: secs(60), run: graph_reduction },
        Criterion { name: "ultrametric dichotomy", budget: secs(10), run: ultrametric_dichotomy },
        Criterion { name: "padding reduction", budget: secs(60), run: padding_reduction },
        Criterion { name: "product reduction", budget: secs(120), run: product_reduction },
        Criterion { name: "tree spaces", budget: secs(5), run: tree_spaces },
        Criterion { name: "Urysohn stage", budget: secs(120), run: urysohn_stage_check },
        Criterion { name: "metric-preserving bridge", budget: secs(30), run: metric_preserving_bridge },
        Criterion { name: "classifier golden suite", budget: secs(1), run: classifier_golden },
        Criterion { name: "case exhaustiveness", budget: secs(1), run: case_exhaustiveness },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let within = elapsed <= c.budget;
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), c.budget.as_secs());
        match (&outcome, within) {
            (Ok(detail), true) => println!("criterion {:>2} PASS  {} ({detail}; {timing})", i + 1, c.name),
            (Ok(detail), false) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {} (over time budget: {timing}; {detail})", i + 1, c.name)
            }
            (Err(why), _) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {} ({why}; {timing})", i + 1, c.name)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
