mod common;

use common::*;
use kqi::analysis::{spearman, PageRankOptions};
use kqi::sim::*;
use kqi::{compute_kqi, CitationGraph, KqiError};

fn one_step(m: usize, n: u64, seed: u64, kernel: AttachmentKernel) -> CitationGraph {
    generate_ba(&BaConfig {
        m,
        schedule: ArrivalSchedule::Custom { arrivals: vec![n] },
        seed,
        steps: 1,
        kernel,
    })
    .unwrap()
}

fn in_degrees(g: &CitationGraph) -> Vec<f64> {
    g.paper_indices().map(|v| g.out_degree(v) as f64).collect()
}

/// Mean `in-degree + 1` of nodes `i0..i0+width` over `seeds` runs, against
/// the continuous prediction at `r = n / i`.
fn degree_ratio(m: usize, n: u64, i0: usize, width: usize, seeds: u64) -> f64 {
    let mut observed = 0.0;
    let mut predicted = 0.0;
    for seed in 0..seeds {
        let g = one_step(m, n, seed, AttachmentKernel::Citations);
        for i in i0..i0 + width {
            observed += g.out_degree(i) as f64 + 1.0;
            predicted += predicted_degree(m as u32, n as f64 / i as f64);
        }
    }
    observed / predicted
}

#[test]
fn tail_exponent_total_degree_kernel() {
    let m = 5;
    let alphas: Vec<f64> = (0..5)
        .map(|seed| {
            let g = one_step(m, 10_000, seed, AttachmentKernel::TotalDegree);
            let x: Vec<f64> = in_degrees(&g).iter().map(|d| d + m as f64 + 1.0).collect();
            tail_exponent(&x, 10.0)
        })
        .collect();
    let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    assert!((2.5..=3.5).contains(&mean), "{alphas:?}");
}

#[test]
fn tail_exponent_citation_kernel_is_heavier() {
    let m = 5;
    let alphas: Vec<f64> = (0..5)
        .map(|seed| {
            let g = one_step(m, 10_000, seed, AttachmentKernel::Citations);
            let x: Vec<f64> = in_degrees(&g).iter().map(|d| d + 1.0).collect();
            tail_exponent(&x, 10.0)
        })
        .collect();
    let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    assert!(mean > 1.5 && mean < 2.5, "{alphas:?}");
}

#[test]
fn degree_law_small_m() {
    for i0 in [100, 400] {
        let ratio = degree_ratio(2, 20_000, i0, 20, 20);
        assert!((0.8..=1.2).contains(&ratio), "i0 {i0}: ratio {ratio}");
    }
}

#[test]
fn degree_law_large_m_overshoots() {
    // distinct targets and the initial clique push early nodes above the
    // continuous prediction
    let ratio = degree_ratio(10, 10_240, 100, 20, 10);
    assert!(ratio > 1.0, "ratio {ratio}");
}

#[test]
fn percolation_monotone_in_threshold() {
    for seed in 0..5 {
        let g = one_step(2, 2_000, seed, AttachmentKernel::Citations);
        let fractions: Vec<f64> = (1..=5)
            .map(|a| {
                bootstrap_percolation(
                    &g,
                    &ActivationConfig {
                        a,
                        seed_fraction: 0.02,
                        rng_seed: seed,
                    },
                )
                .unwrap()
                .active_fraction
            })
            .collect();
        assert_eq!(fractions[0], 1.0);
        assert!(fractions.windows(2).all(|w| w[0] >= w[1]), "{fractions:?}");
    }
}

#[test]
fn percolation_monotone_in_seed_fraction() {
    let graphs: Vec<CitationGraph> =
        (0..10).map(|s| one_step(2, 2_000, s, AttachmentKernel::Citations)).collect();
    let means: Vec<f64> = [0.01, 0.05, 0.2, 0.5]
        .iter()
        .map(|&f| {
            graphs
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    bootstrap_percolation(
                        g,
                        &ActivationConfig {
                            a: 3,
                            seed_fraction: f,
                            rng_seed: i as u64,
                        },
                    )
                    .unwrap()
                    .active_fraction
                })
                .sum::<f64>()
                / graphs.len() as f64
        })
        .collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
}

#[test]
fn simulation_is_reproducible() {
    let cfg = BaConfig {
        m: 3,
        schedule: ArrivalSchedule::standard_with_total(3, 10, 3_000.0),
        seed: 11,
        steps: 10,
        kernel: AttachmentKernel::Citations,
    };
    let a: Vec<_> = generate_ba(&cfg).unwrap().edges().collect();
    let b: Vec<_> = generate_ba(&cfg).unwrap().edges().collect();
    assert_eq!(a, b);
    let c: Vec<_> = generate_ba(&BaConfig { seed: 12, ..cfg }).unwrap().edges().collect();
    assert_ne!(a, c);
}

#[test]
fn kqi_tracks_pagerank() {
    let positive = (0..10)
        .filter(|&seed| {
            let g = one_step(3, 1_000, seed, AttachmentKernel::Citations)
                .augment_super_root()
                .unwrap();
            let (_, kt) = compute_kqi(&g).unwrap();
            let pr = kqi::analysis::pagerank(&g, &PageRankOptions::default()).unwrap();
            let k: Vec<f64> = g.paper_indices().map(|v| kt.kqi(v)).collect();
            let p: Vec<f64> = g.paper_indices().map(|v| pr[v]).collect();
            spearman(&k, &p).unwrap() > 0.0
        })
        .count();
    assert!(positive >= 9, "{positive}/10");
}

#[test]
fn growth_check_reports_both_totals() {
    let cfg = BaConfig {
        m: 3,
        schedule: ArrivalSchedule::standard_with_total(3, 8, 2_000.0),
        seed: 1,
        steps: 8,
        kernel: AttachmentKernel::Citations,
    };
    let check = total_kqi_growth_check(&cfg).unwrap();
    assert_eq!(check.series.len(), 8);
    assert!(check.simplified.slope > 0.0);
    assert!(check.series.points.iter().all(|p| p.simplified_kqi >= 0.0));
    let bad = BaConfig {
        schedule: ArrivalSchedule::Decelerated {
            scale: 10.0,
            exponent: 0.0,
        },
        ..cfg
    };
    assert!(matches!(total_kqi_growth_check(&bad), Err(KqiError::InvalidConfig(_))));
}

#[test]
fn analytic_examples() {
    assert!((predicted_degree(10, 1024.0) - 545.301_037_793).abs() < 1e-6);
    let p = analytic_predictions(2, 16.0, 100.0).unwrap();
    assert!((p.volume - (16f64.powf(4.0 / 3.0) - 1.0)).abs() < 1e-12);
    assert!((p.contain_proportion - 0.02 * 16f64.powf(1.0 / 3.0)).abs() < 1e-15);
    assert!((p.kqi_approx - p.volume / 1600.0).abs() < 1e-15);
    assert!(matches!(
        analytic_predictions(10, 1e30, 20.0),
        Err(KqiError::ValidityGuard(_))
    ));
}
