//! File formats: HMAP, instance and dual JSON, q.bin export, Solomon text.

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use vrptw_cg::export::{export_training_set, sample_dir};
use vrptw_cg::hmap::{self, HmapError};
use vrptw_cg::solomon::{self, RawBenchmark, Row};
use vrptw_cg::{heat, json};
use vrptw_cg_core::cg::HeatProvider;
use vrptw_cg_core::generate::{generate_instance, sample_duals_with_theta, GenConfig};
use vrptw_cg_core::heatmap::surrogate_t;
use vrptw_cg_core::instance::{build_pricing, INFEASIBLE_WEIGHT};
use vrptw_cg_core::Matrix;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/r1_2_1_style.txt");

fn matrix(max_dim: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(any::<f64>(), n * n).prop_map(move |v| Matrix::from_vec(n, v).unwrap())
    })
}

fn row(id: usize) -> impl Strategy<Value = Row> {
    let num = prop_oneof![(0i32..1000).prop_map(f64::from), (0.0f64..1000.0)];
    (num.clone(), num.clone(), num.clone(), num.clone(), num.clone(), num).prop_map(
        move |(x, y, demand, ready, due, service)| Row {
            id,
            x,
            y,
            demand,
            ready,
            due,
            service,
        },
    )
}

fn benchmark() -> impl Strategy<Value = RawBenchmark> {
    (1usize..12).prop_flat_map(|n| {
        (
            "[A-Z][A-Z0-9_]{0,8}",
            1usize..100,
            1i32..500,
            (0..=n).map(row).collect::<Vec<_>>(),
        )
            .prop_map(|(name, vehicles, capacity, rows)| RawBenchmark {
                name,
                vehicles,
                capacity: f64::from(capacity),
                rows,
            })
    })
}

proptest! {
    #[test]
    fn hmap_round_trip_is_bitwise(m in matrix(12)) {
        let bytes = hmap::encode(&m);
        prop_assert_eq!(bytes.len(), 9 + 8 * m.dim() * m.dim());
        let back = hmap::decode(&bytes).unwrap();
        prop_assert_eq!(back.dim(), m.dim());
        for (a, b) in back.as_slice().iter().zip(m.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn solomon_serialize_parse_round_trip(raw in benchmark()) {
        let text = solomon::serialize(&raw);
        let parsed = solomon::parse_str(&text).unwrap();
        prop_assert_eq!(&parsed, &raw);
        prop_assert_eq!(solomon::parse_str(&solomon::serialize(&parsed)).unwrap(), parsed);
    }
}

#[test]
fn near_stochastic_rows_are_renormalized_and_bad_rows_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.hmap");
    let mut m = Matrix::filled(3, 1.0 / 3.0);
    for v in m.row_mut(1) {
        *v *= 0.9995;
    }
    hmap::save(&path, &m).unwrap();
    let t = hmap::load_t(&path, 3).unwrap();
    for r in t.matrix().rows() {
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    for v in m.row_mut(2) {
        *v = 0.8 / 3.0;
    }
    hmap::save(&path, &m).unwrap();
    assert!(matches!(hmap::load_t(&path, 3), Err(HmapError::Heat(_))));
    assert!(matches!(
        hmap::load_t(&path, 4),
        Err(HmapError::Dimension { expected: 4, found: 3 })
    ));
}

#[test]
fn truncated_and_foreign_files_fail() {
    let bytes = hmap::encode(&Matrix::filled(4, 0.25));
    assert!(matches!(
        hmap::decode(&bytes[..bytes.len() - 1]),
        Err(HmapError::Size {
            expected: 137,
            found: 136
        })
    ));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(hmap::decode(&bad), Err(HmapError::Magic(_))));
    let mut bad = bytes;
    bad[4] = 2;
    assert!(matches!(hmap::decode(&bad), Err(HmapError::Version(2))));
}

fn read_dir_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(root).unwrap() {
        let dir = entry.unwrap().path();
        for f in fs::read_dir(&dir).unwrap() {
            let p = f.unwrap().path();
            let key = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            out.push((key, fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn export_writes_reproducible_samples() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = GenConfig::for_size(10, 40);
    let dirs = export_training_set(3, &cfg, a.path()).unwrap();
    assert_eq!(dirs.len(), 3);
    export_training_set(3, &cfg, b.path()).unwrap();
    let files = read_dir_bytes(a.path());
    assert_eq!(files.len(), 9);
    assert_eq!(files, read_dir_bytes(b.path()));

    for k in 0..3 {
        let dir = sample_dir(a.path(), k);
        let inst = json::read_instance(&dir.join("instance.json")).unwrap();
        let seed = 40 + k as u64;
        assert_eq!(inst, generate_instance(&GenConfig { seed, ..cfg.clone() }));
        let (expected, theta) = sample_duals_with_theta(&inst, seed);
        let duals = json::read_duals(&dir.join("duals.json"), 10).unwrap();
        assert_eq!(duals, expected);
        let raw: json::DualsJson = serde_json::from_str(&fs::read_to_string(dir.join("duals.json")).unwrap()).unwrap();
        assert_eq!(raw.theta, Some(theta));
        assert_eq!(raw.duals[0], 0.0);

        let q = hmap::load(&dir.join("q.bin")).unwrap();
        let pricing = build_pricing(&inst, &duals).unwrap();
        assert_eq!(q, *pricing.weights());
        for i in 0..11 {
            for j in 0..11 {
                assert_eq!(q[(i, j)] == INFEASIBLE_WEIGHT, !pricing.is_feasible(i, j), "({i}, {j})");
            }
        }
    }
}

#[test]
fn dual_count_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    fs::write(&path, r#"{"duals": [0, 1, 2]}"#).unwrap();
    assert!(json::read_duals(&path, 2).is_ok());
    assert!(matches!(
        json::read_duals(&path, 3),
        Err(json::JsonError::DualCount { expected: 4, found: 3 })
    ));
    fs::write(&path, r#"{"duals": [1, 1, 2]}"#).unwrap();
    assert!(matches!(json::read_duals(&path, 2), Err(json::JsonError::Duals(_))));
}

#[test]
fn fixture_scales_for_the_model_only() {
    let raw = solomon::parse(Path::new(FIXTURE)).unwrap();
    assert_eq!(raw.customers(), 200);
    assert_eq!(raw.capacity, 200.0);
    let (inst, scaling) = solomon::normalize(&raw).unwrap();
    assert_eq!(inst.customers(), 200);
    assert_eq!(inst.capacity(), 200.0);
    assert_eq!(scaling.coord_divisor, 200.0);
    assert_eq!(scaling.dual_divisor, 500.0);
    for (x, y) in scaling.coords(&inst) {
        assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
    }
    // The LP keeps native travel times.
    for (i, r) in raw.rows.iter().enumerate().take(20) {
        let d0 = ((r.x - 70.0).powi(2) + (r.y - 70.0).powi(2)).sqrt();
        assert_eq!(inst.travel(0, i), d0);
    }
    assert_eq!(scaling.duals(&[250.0, 500.0]), vec![0.5, 1.0]);
}

#[test]
fn directory_heat_loads_files_and_falls_back() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_instance(&GenConfig::for_size(5, 1));
    let pricing = build_pricing(&inst, &vrptw_cg_core::generate::sample_duals(&inst, 1)).unwrap();
    let uniform = Matrix::filled(6, 1.0 / 6.0);
    hmap::save(&dir.path().join(heat::iteration_file(0)), &uniform).unwrap();
    hmap::save(&dir.path().join(heat::iteration_file(2)), &Matrix::filled(4, 0.25)).unwrap();
    let mut provider = heat::DirectoryHeat::new(dir.path(), 0.5).unwrap();
    assert_eq!(provider.probabilities(0, &pricing).unwrap().matrix(), &uniform);
    assert_eq!(
        provider.probabilities(1, &pricing).unwrap(),
        surrogate_t(&pricing, 0.5).unwrap()
    );
    assert!(provider.probabilities(2, &pricing).is_err());
    assert_eq!((provider.loaded, provider.fallbacks), (1, 1));
    assert!(heat::DirectoryHeat::new(&dir.path().join("missing"), 0.5).is_err());
    assert_eq!(heat::iteration_file(7), "iter_00007.hmap");
}
