//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line, then
//! asserts both the outcome and its runtime budget.
//!
//! Run with `cargo test -p dimgrid --test acceptance -- --nocapture` to see
//! the lines; add `--test-threads=1` to keep them in order.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use dimgrid::bounds::{alpha, cross_alpha, lmu_table, lower_cf, maximal_set_torus, minimal_set, upper_cf};
use dimgrid::datagen::{gen_circles, gen_hypersphere, gen_ifs, gen_manifold, rng, AffineIfs, CircleKind, CircleParams};
use dimgrid::datagen::{Manifold, ManifoldSpec, DEFAULT_BURN_IN};
use dimgrid::estimators::reference::{generate_reference_model, ReferenceCache, ReferenceRequest};
use dimgrid::estimators::{dcf_estimate, edcf_estimate, mle_estimate, twonn_estimate};
use dimgrid::estimators::{DcfOptions, EdcfOptions, MembershipAnchors};
use dimgrid::fractal::{box_dimension_default, boundary_report, extract_boundary, knn_label_grid};
use dimgrid::gridding::{information_percentage, snap_to_grid};
use dimgrid::neighborhood::{connectivity_factor, count_neighbors};
use dimgrid::{Engine, Execution, IpRange, PointCloud};
use rand::Rng;

/// Prints the verdict line and fails the test on a miss or on overtime.
fn verdict(id: u32, name: &str, passed: bool, detail: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let in_time = elapsed <= budget;
    let status = if passed && in_time { "PASS" } else { "FAIL" };
    println!(
        "[{status}] criterion {id:>2} {name}: {detail} ({:.2}s of {}s)",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
    assert!(in_time, "criterion {id} ({name}) took {elapsed:?}, budget {budget:?}");
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn cloud_from(points: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_rows(points).unwrap()
}

#[test]
fn criterion_01_lmu_exactness() {
    let t = Instant::now();
    let row = &lmu_table(2).rows[1];
    let expected = (ratio(1, 6), ratio(1, 4), ratio(2, 3));
    let ok = row.lower == expected.0
        && row.middle == expected.1
        && row.upper == expected.2
        && upper_cf(1, 2).unwrap() == ratio(2, 3);
    let detail = format!("m=1, n=2 gives ({}, {}, {})", row.lower, row.middle, row.upper);
    verdict(1, "LMU exactness", ok, &detail, t, Duration::from_secs(1));
}

#[test]
fn criterion_02_bounds_figure_values() {
    let t = Instant::now();
    let rows = lmu_table(3).rows;
    let v = |m: usize| rows[m].to_f64();
    // (label, value, printed value, printed decimals)
    let checks = [
        ("L1", v(1).0, 0.05, 2),
        ("M1", v(1).1, 0.0769, 4),
        ("U2", v(2).2, 0.857, 3),
        ("L2", v(2).0, 0.17, 2),
        ("M2", v(2).1, 0.3, 1),
        ("L3", v(3).0, 0.45, 2),
    ];
    let misses: Vec<String> = checks
        .iter()
        .filter(|(_, x, printed, dec)| round_to(*x, *dec) != *printed)
        .map(|(l, x, printed, _)| format!("{l}={x} vs {printed}"))
        .collect();
    let detail = if misses.is_empty() {
        "n=3 values match at displayed precision".to_string()
    } else {
        misses.join(", ")
    };
    verdict(2, "bounds figure values", misses.is_empty(), &detail, t, Duration::from_secs(1));
}

#[test]
fn criterion_03_torus_oracle() {
    let t = Instant::now();
    let mut misses = Vec::new();
    for n in 0..=4 {
        for m in 0..=n {
            let cf = maximal_set_torus(n, m).unwrap().connectivity_factor();
            if cf != upper_cf(m, n).unwrap() {
                misses.push(format!("(m={m}, n={n}): {cf}"));
            }
        }
    }
    let detail = if misses.is_empty() { "15 (m, n) pairs exact".to_string() } else { misses.join(", ") };
    verdict(3, "torus oracle", misses.is_empty(), &detail, t, Duration::from_secs(10));
}

#[test]
fn criterion_04_minimal_set_oracle() {
    let t = Instant::now();
    let mut misses = Vec::new();
    let mut pairs = 0;
    for n in 0..=5 {
        for m in 0..=n {
            pairs += 1;
            let grid = minimal_set(m, n, 1.0).unwrap();
            let cf = connectivity_factor(&count_neighbors(&grid, Engine::Auto)).cf_exact();
            if cf != lower_cf(m, n).unwrap() {
                misses.push(format!("(m={m}, n={n}): {cf}"));
            }
        }
    }
    let detail = if misses.is_empty() { format!("{pairs} (m, n) pairs exact") } else { misses.join(", ") };
    verdict(4, "minimal-set oracle", misses.is_empty(), &detail, t, Duration::from_secs(10));
}

#[test]
fn criterion_05_cross_alpha_consistency() {
    let t = Instant::now();
    let mut misses = Vec::new();
    for n in 0..=8 {
        let full = BigInt::from(3).pow(n as u32) - 1;
        for x in 0..=n {
            let sum: BigInt = (0..=n).map(|y| cross_alpha(x, y, n).unwrap()).sum();
            if sum != full {
                misses.push(format!("row sum x={x}, n={n}: {sum}"));
            }
        }
        for y in 0..=n {
            if cross_alpha(0, y, n).unwrap() != alpha(n, y).unwrap() {
                let (got, want) = (cross_alpha(0, y, n).unwrap(), alpha(n, y).unwrap());
                misses.push(format!("n={n} y={y}: cross_alpha {got} vs alpha {want}"));
            }
        }
    }
    let detail = if misses.is_empty() {
        "row sums and x=0 rows hold for n ≤ 8".to_string()
    } else {
        format!("{} mismatches: {}", misses.len(), misses.join("; "))
    };
    verdict(5, "cross_alpha consistency", misses.is_empty(), &detail, t, Duration::from_secs(1));
}

#[test]
fn criterion_06_dcf_sanity() {
    let t = Instant::now();
    let lattice: Vec<Vec<f64>> = (0..15)
        .flat_map(|i| (0..15).map(move |j| vec![i as f64, j as f64, 0.0]))
        .collect();
    let line: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 / 199.0, 0.3 + 0.5 * i as f64 / 199.0]).collect();
    let single = vec![vec![0.25, -1.5, 3.0]];
    let o = DcfOptions::default();
    let got = [
        dcf_estimate(&cloud_from(&lattice), &o).unwrap().m_hat,
        dcf_estimate(&cloud_from(&line), &o).unwrap().m_hat,
        dcf_estimate(&cloud_from(&single), &o).unwrap().m_hat,
    ];
    let ok = got == [2, 1, 0];
    let detail = format!("lattice {}, line {}, point {}", got[0], got[1], got[2]);
    verdict(6, "DCF sanity", ok, &detail, t, Duration::from_secs(5));
}

#[test]
fn criterion_07_edcf_desk_benchmark() {
    const N: usize = 1000;
    const NOISE: f64 = 0.01;
    const SEEDS: [u64; 5] = [11, 12, 13, 14, 15];
    const REQUIRED: usize = 4;
    let t = Instant::now();
    let cache = ReferenceCache::in_memory();
    let options = EdcfOptions::default();
    let cases: [(Manifold, &[usize]); 3] =
        [(Manifold::Helix1d, &[1]), (Manifold::Sphere, &[9, 10, 11]), (Manifold::Affine, &[3])];
    let mut ok = true;
    let mut parts = Vec::new();
    for (manifold, accepted) in cases {
        let mut hats = Vec::new();
        for seed in SEEDS {
            let cloud = gen_manifold(&ManifoldSpec::benchmark(manifold, N, NOISE, seed)).unwrap();
            hats.push(edcf_estimate(&cloud, &options, Some(&cache)).unwrap().m_hat);
        }
        let hits = hats.iter().filter(|h| accepted.contains(h)).count();
        ok &= hits >= REQUIRED;
        parts.push(format!("{} {hits}/5 {hats:?}", manifold.name()));
    }
    verdict(7, "eDCF desk benchmark", ok, &parts.join("; "), t, Duration::from_secs(180));
}

#[test]
fn criterion_08_baselines() {
    const K: usize = 20;
    let t = Instant::now();
    let mut r = rng(8);
    let cube: Vec<f64> = (0..5000 * 3).map(|_| r.random::<f64>()).collect();
    let cube = PointCloud::new(cube, 3).unwrap();
    let circle = gen_hypersphere(1, 2000, 0.0, 8).unwrap();
    let values = [
        twonn_estimate(&cube, 0.1).unwrap(),
        mle_estimate(&cube, K).unwrap(),
        twonn_estimate(&circle, 0.1).unwrap(),
        mle_estimate(&circle, K).unwrap(),
    ];
    let ok = values[..2].iter().all(|v| (2.5..=3.5).contains(v)) && values[2..].iter().all(|v| (0.8..=1.3).contains(v));
    let detail = format!(
        "cube twonn {:.3} mle {:.3}; circle twonn {:.3} mle {:.3}",
        values[0], values[1], values[2], values[3]
    );
    verdict(8, "baselines", ok, &detail, t, Duration::from_secs(30));
}

#[test]
fn criterion_09_fractal_bands() {
    const N: usize = 100_000;
    let t = Instant::now();
    let cases = [
        ("triangle", AffineIfs::sierpinski_triangle(), 1.53, 1.63),
        ("carpet", AffineIfs::sierpinski_carpet(), 1.84, 1.94),
        ("fern", AffineIfs::barnsley_fern(), 1.70, 1.90),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, ifs, lo, hi)) in cases.into_iter().enumerate() {
        let cloud = gen_ifs(&ifs, N, 90 + i as u64, DEFAULT_BURN_IN).unwrap();
        let slope = box_dimension_default(&cloud).unwrap().slope;
        ok &= (lo..=hi).contains(&slope);
        parts.push(format!("{name} {slope:.4} in [{lo}, {hi}]"));
    }
    verdict(9, "fractal bands", ok, &parts.join("; "), t, Duration::from_secs(60));
}

#[test]
fn criterion_10_boundary_pipeline() {
    const K: usize = 5;
    const RESOLUTION: usize = 512;
    let t = Instant::now();
    let train = gen_circles(&CircleParams::preset(CircleKind::Concentric), 10).unwrap();
    let raster = knn_label_grid(&train, K, RESOLUTION).unwrap();
    let boundary = extract_boundary(&raster).unwrap();
    let report = boundary_report(&boundary, None).unwrap();
    let ok = report.dcf_dimension == 1 && report.lmu.m_hat == 1;
    let detail = format!(
        "{} boundary cells, CF {:.4}, DCF {}, LMU {}",
        report.boundary_points, report.cf, report.dcf_dimension, report.lmu.m_hat
    );
    verdict(10, "boundary pipeline", ok, &detail, t, Duration::from_secs(60));
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn random_cloud(max_dim: usize, max_points: usize) -> impl Strategy<Value = PointCloud> {
    (1..=max_dim, 1..=max_points).prop_flat_map(|(d, n)| {
        prop::collection::vec(-2.0..2.0f64, n * d).prop_map(move |data| PointCloud::new(data, d).unwrap())
    })
}

fn outcome(name: &str, result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> (bool, String) {
    match result {
        Ok(()) => (true, format!("{name} ok")),
        Err(e) => (false, format!("{name} violated: {e}")),
    }
}

#[test]
fn criterion_11_property_suite() {
    let t = Instant::now();
    let mut results = Vec::new();

    // IP is non-increasing in s for any cloud and any spacing pair.
    let mono = runner(256).run(&(random_cloud(3, 200), 0.01..1.0f64, 0.01..1.0f64), |(cloud, a, b)| {
        let (s1, s2) = if a <= b { (a, b) } else { (b, a) };
        let (ip1, ip2) = (information_percentage(&cloud, s1).unwrap(), information_percentage(&cloud, s2).unwrap());
        prop_assert!(ip1 >= ip2, "IP({s1}) = {ip1} < IP({s2}) = {ip2}");
        Ok(())
    });
    results.push(outcome("IP monotonicity", mono));

    let engines = runner(200).run(&(random_cloud(6, 400), 0.05..0.6f64), |(cloud, s)| {
        let grid = snap_to_grid(&cloud, s).unwrap();
        prop_assert_eq!(count_neighbors(&grid, Engine::Hash), count_neighbors(&grid, Engine::Pairwise));
        Ok(())
    });
    results.push(outcome("engine equivalence (200 clouds)", engines));

    let partition = runner(256).run(&(1usize..8, 0.0..1.0f64, 0usize..8), |(d_max, frac, t0)| {
        let t0 = t0 % d_max;
        let anchors = MembershipAnchors::theoretical(d_max);
        let r = anchors.values();
        let x = r[t0] + frac * (r[t0 + 1] - r[t0]);
        if x <= r[t0] || x >= r[t0 + 1] {
            return Ok(());
        }
        let f = anchors.membership(x);
        prop_assert!((f[t0] + f[t0 + 1] - 1.0).abs() < 1e-12, "f = {f:?} at x = {x}");
        prop_assert!(f.iter().filter(|v| **v > 0.0).count() <= 2);
        Ok(())
    });
    results.push(outcome("membership partition", partition));

    let determinism = runner(4).run(&(2usize..4, 0usize..3), |(d, noise_idx)| {
        let request = ReferenceRequest {
            n_points: 300,
            d,
            d_max: d,
            ip_range: IpRange::new(49.5, 50.5).unwrap(),
            sigma: [0.0, 0.01, 0.1][noise_idx],
        };
        let a = generate_reference_model(&request, None, Execution::Parallel).map_err(fail)?;
        let b = generate_reference_model(&request, None, Execution::Sequential).map_err(fail)?;
        let cache = ReferenceCache::in_memory();
        let first = generate_reference_model(&request, Some(&cache), Execution::Parallel).map_err(fail)?;
        let hit = generate_reference_model(&request, Some(&cache), Execution::Parallel).map_err(fail)?;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.model.anchors), bits(&b.model.anchors));
        prop_assert_eq!(bits(&a.model.anchors), bits(&first.model.anchors));
        prop_assert!(hit.from_cache);
        prop_assert_eq!(bits(&first.model.anchors), bits(&hit.model.anchors));
        Ok(())
    });
    results.push(outcome("cache determinism", determinism));

    let ok = results.iter().all(|r| r.0);
    let detail = results.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; ");
    verdict(11, "property suite", ok, &detail, t, Duration::from_secs(60));
}

fn fail(e: dimgrid::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}
