//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use common::*;
use kqi::analysis::{
    fit_quadratic, h_index, pagerank, pareto_from_scores, pareto_split, spearman, PageRankOptions,
};
use kqi::fragment::{fragment_oracle_all, DEFAULT_FRAGMENT_LIMIT};
use kqi::io::load_graph;
use kqi::sim::*;
use kqi::vein::{extract_vein, VeinConfig, VeinSelection};
use kqi::{compute_kqi, CitationGraph, DecaySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Ok(detail)` passes, `Err(detail)` fails.
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixture(name: &str) -> CitationGraph {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let nodes = dir.join(format!("{name}.nodes.tsv"));
    let nodes = nodes.exists().then_some(nodes);
    load_graph(&dir.join(format!("{name}.edges.tsv")), nodes.as_deref()).unwrap()
}

fn one_step(m: usize, n: u64, seed: u64) -> CitationGraph {
    generate_ba(&BaConfig {
        m,
        schedule: ArrivalSchedule::Custom { arrivals: vec![n] },
        seed,
        steps: 1,
        kernel: AttachmentKernel::Citations,
    })
    .unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=11);
        let p = rng.gen_range(0.1..0.7);
        let g = random_dag(&mut rng, n, p).augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        let oracle = fragment_oracle_all(&g, DEFAULT_FRAGMENT_LIMIT).unwrap();
        for v in g.paper_indices() {
            worst = worst.max((kt.kqi(v) - oracle[v]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-9 && secs < 60.0, format!("max diff {worst:.2e}, {secs:.1}s"))
}

fn golden_fixtures() -> Outcome {
    let chain = fixture("chain").augment_super_root().unwrap();
    let (_, kc) = compute_kqi(&chain).unwrap();
    let k = |g: &CitationGraph, t: &kqi::KqiTable, id: &str| t.kqi(g.index_of(id).unwrap());
    let diamond = fixture("diamond").augment_super_root().unwrap();
    let (_, kd) = compute_kqi(&diamond).unwrap();
    let errs = [
        k(&chain, &kc, "B") - 1.0 / 3.0,
        k(&chain, &kc, "A") - 2.0 / 3.0 * 1.5f64.log2(),
        k(&chain, &kc, "C"),
        k(&diamond, &kd, "B") - 0.4,
        k(&diamond, &kd, "C") - 0.4,
        k(&diamond, &kd, "D"),
    ];
    let worst = errs.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    // the quoted diamond root value has six decimals; the oracle is exact
    let oracle = fragment_oracle_all(&diamond, DEFAULT_FRAGMENT_LIMIT).unwrap();
    let a = diamond.index_of("A").unwrap();
    let root_err = (kd.kqi(a) - oracle[a]).abs();
    let quoted = (kd.kqi(a) - 0.257_542).abs();
    check(
        worst <= 1e-12 && root_err <= 1e-12 && quoted < 5e-7,
        format!("max diff {worst:.1e}, diamond A = {:.9}", kd.kqi(a)),
    )
}

fn tree_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=200);
        let parents: Vec<usize> = (1..n).map(|i| rng.gen_range(0..i)).collect();
        let g = tree_from_parents(&parents).augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        for (i, want) in tree_kqi_direct(&parents).iter().enumerate() {
            worst = worst.max((kt.kqi(g.index_of(&id(i)).unwrap()) - want).abs());
        }
    }
    check(worst <= 1e-12, format!("max diff {worst:.1e}"))
}

fn linear_growth() -> Outcome {
    let start = Instant::now();
    let check_ = total_kqi_growth_check(&BaConfig {
        m: 3,
        schedule: ArrivalSchedule::standard_with_total(3, 20, 1e5),
        seed: 0,
        steps: 20,
        kernel: AttachmentKernel::Citations,
    })
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let n = check_.series.points.last().unwrap().n;
    check(
        check_.simplified.r2 >= 0.95 && secs < 300.0,
        format!(
            "n = {n}, r2 simplified {:.4}, exact {:.4}, {secs:.1}s",
            check_.simplified.r2, check_.exact.r2
        ),
    )
}

fn curvature_signs() -> Outcome {
    let m = 3;
    let steps = 20;
    let c2 = |schedule: &ArrivalSchedule, seed: u64| {
        let series = simulated_growth(&BaConfig {
            m,
            schedule: schedule.clone(),
            seed,
            steps,
            kernel: AttachmentKernel::Citations,
        })
        .unwrap();
        let xs: Vec<f64> = series.years().iter().map(|&y| f64::from(y)).collect();
        let simplified = fit_quadratic(&xs, &series.simplified_kqi()).unwrap().c2;
        let exact = fit_quadratic(&xs, &series.total_kqi()).unwrap().c2;
        (simplified, exact)
    };
    // s(t) = t^(m+2), scaled to about 2 * 10^4 papers
    let power: f64 = (1..=steps).map(|t| f64::from(t).powi(m as i32 + 2)).sum();
    let accelerated = ArrivalSchedule::Accelerated {
        scale: 2e4 / power,
        exponent: (m + 2) as f64,
    };
    let constant = ArrivalSchedule::Decelerated {
        scale: 1e3,
        exponent: 0.0,
    };
    let acc: Vec<(f64, f64)> = (0..5).map(|s| c2(&accelerated, s)).collect();
    let con: Vec<(f64, f64)> = (0..5).map(|s| c2(&constant, s)).collect();
    let convex = acc.iter().filter(|c| c.0 > 0.0).count();
    let concave = con.iter().filter(|c| c.0 < 0.0).count();
    let exact_convex = acc.iter().filter(|c| c.1 > 0.0).count();
    let exact_concave = con.iter().filter(|c| c.1 < 0.0).count();
    check(
        convex == 5 && concave == 5,
        format!(
            "accelerated convex {convex}/5, constant concave {concave}/5 \
             (exact total: {exact_convex}/5, {exact_concave}/5)"
        ),
    )
}

fn boom_threshold() -> Outcome {
    let start = Instant::now();
    let median_fraction = |m: usize| {
        median(
            (0..10)
                .map(|seed| {
                    let g = one_step(m, 10_000, seed);
                    bootstrap_percolation(
                        &g,
                        &ActivationConfig {
                            a: 1,
                            seed_fraction: 0.01,
                            rng_seed: seed,
                        },
                    )
                    .unwrap()
                    .active_fraction
                })
                .collect(),
        )
    };
    let high = median_fraction(15);
    let low = median_fraction(3);
    let secs = start.elapsed().as_secs_f64();
    check(
        high >= 0.99 && low <= 0.6 && secs < 120.0,
        format!("median at m=15 {high:.3} (needs >= 0.99), at m=3 {low:.3} (needs <= 0.6), {secs:.1}s"),
    )
}

fn pareto_machinery() -> Outcome {
    let uniform = pareto_from_scores(&[1.0; 10]).unwrap().p_star;
    let skewed = pareto_from_scores(&[8.0, 1.0, 1.0]).unwrap().p_star;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scores: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..5.0f64).powi(3)).collect();
    let curve = pareto_from_scores(&scores).unwrap().curve;
    let cdf = curve.first() == Some(&(0.0, 0.0))
        && curve.last() == Some(&(1.0, 1.0))
        && curve.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    let g = one_step(3, 1_000, 0).augment_super_root().unwrap();
    let (_, kt) = compute_kqi(&g).unwrap();
    let ba = pareto_split(&kt).unwrap();
    check(
        uniform == 0.5 && (skewed - 1.0 / 3.0).abs() < 1e-15 && cdf && ba.p_star < 0.5,
        format!(
            "uniform {uniform}, skewed {skewed:.4}, cdf {cdf}, BA p* {:.3} holding {:.3}",
            ba.p_star, ba.share_at_p_star
        ),
    )
}

fn vein_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    let mut full_mismatch = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(0.03..0.3);
        let g = random_dag(&mut rng, n, p).augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        let max_depth = rng.gen_range(1..=10);
        let mut ids: Vec<String> =
            g.paper_indices().filter(|_| rng.gen_bool(0.4)).map(|v| g.id(v).to_string()).collect();
        if ids.is_empty() {
            ids.push(g.id(0).to_string());
        }
        let cfg = VeinConfig {
            max_depth,
            ..VeinConfig::new(VeinSelection::Ids(ids))
        };
        let vein = extract_vein(&g, &kt, &cfg).unwrap();
        let mut selected = vec![false; g.node_count()];
        for id in &vein.nodes {
            selected[g.index_of(id).unwrap()] = true;
        }
        for d in g.paper_indices().filter(|&v| selected[v]) {
            let dist = interior_free_distances(&g, &selected, d, max_depth);
            let nearest = dist.values().min().copied();
            let want: BTreeSet<&str> =
                dist.iter().filter(|&(_, &k)| Some(k) == nearest).map(|(&u, _)| g.id(u)).collect();
            let got: BTreeSet<&str> =
                vein.edges.iter().filter(|e| e.1 == g.id(d)).map(|e| e.0.as_str()).collect();
            if got != want {
                bad += 1;
            }
        }

        let full = extract_vein(&g, &kt, &VeinConfig::new(VeinSelection::TopFraction(1.0))).unwrap();
        let got: BTreeSet<(String, String)> = full.edges.into_iter().collect();
        let want: BTreeSet<(String, String)> = g
            .edges()
            .filter(|&(s, _, _)| !g.is_super_root(s as usize))
            .map(|(s, t, _)| (g.id(s as usize).to_string(), g.id(t as usize).to_string()))
            .collect();
        if got != want {
            full_mismatch += 1;
        }
    }
    check(
        bad == 0 && full_mismatch == 0,
        format!("{bad} uncertified parent sets, {full_mismatch} full-selection mismatches"),
    )
}

fn baseline_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sum_err: f64 = 0.0;
    let mut dense_err: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=19);
        let p = rng.gen_range(0.0..0.5);
        let g = random_dag(&mut rng, n, p).augment_super_root().unwrap();
        let pr = library_pagerank(&g);
        let dense = dense_pagerank(&g, 0.85);
        sum_err = sum_err.max((pr.iter().sum::<f64>() - 1.0).abs());
        for v in g.paper_indices() {
            dense_err = dense_err.max((pr[v] - dense[v]).abs());
        }
    }
    let h = h_index(&[3, 0, 6, 1, 5]);
    let positive = (0..10)
        .filter(|&seed| {
            let g = one_step(3, 1_000, seed).augment_super_root().unwrap();
            let (_, kt) = compute_kqi(&g).unwrap();
            let pr = pagerank(&g, &PageRankOptions::default()).unwrap();
            let k: Vec<f64> = g.paper_indices().map(|v| kt.kqi(v)).collect();
            let p: Vec<f64> = g.paper_indices().map(|v| pr[v]).collect();
            spearman(&k, &p).unwrap() > 0.0
        })
        .count();
    check(
        sum_err <= 1e-9 && dense_err <= 1e-8 && h == 3 && positive >= 9,
        format!(
            "sum err {sum_err:.1e}, dense err {dense_err:.1e}, h-index {h}, positive Spearman {positive}/10"
        ),
    )
}

fn performance() -> Outcome {
    let gen = Instant::now();
    let g = one_step(10, 1_000_000, 0);
    let gen_secs = gen.elapsed().as_secs_f64();
    let (n, e) = (g.paper_count(), g.edge_count());
    let start = Instant::now();
    let aug = g.augment_super_root().unwrap();
    let (_, kt) = compute_kqi(&aug).unwrap();
    let total: f64 = aug.paper_indices().map(|v| kt.kqi(v)).sum();
    let secs = start.elapsed().as_secs_f64();
    check(
        secs < 60.0 && total.is_finite() && e >= 9_900_000,
        format!("{n} nodes, {e} edges: KQI {secs:.1}s (generation {gen_secs:.1}s)"),
    )
}

fn decay_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["chain", "diamond", "mixed"] {
        let unit = fixture(name).augment_super_root().unwrap();
        let reference_time = unit.max_year().unwrap();
        let decayed = unit
            .apply_decay(&DecaySpec {
                lambda: 0.0,
                reference_time,
            })
            .unwrap();
        let (_, a) = compute_kqi(&unit).unwrap();
        let (_, b) = compute_kqi(&decayed).unwrap();
        for v in unit.paper_indices() {
            worst = worst.max((a.kqi(v) - b.kqi(v)).abs());
        }
    }
    check(worst <= 1e-9, format!("max diff {worst:.1e} over 3 fixtures"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("golden fixtures", golden_fixtures),
        ("single-inheritance reduction", tree_reduction),
        ("linear growth law", linear_growth),
        ("curvature signs", curvature_signs),
        ("boom threshold", boom_threshold),
        ("pareto machinery", pareto_machinery),
        ("vein soundness", vein_soundness),
        ("baseline sanity", baseline_sanity),
        ("performance", performance),
        ("decay reduction", decay_reduction),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
