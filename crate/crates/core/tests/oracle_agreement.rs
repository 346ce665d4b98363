//! Library results against the brute-force oracles on seeded random fixtures.

mod common;

use common::oracles::{self, Rows};
use dsi_core::csm::ClassSimilarityMatrix;
use dsi_core::matrix::DenseMatrix;
use dsi_core::metrics::{
    accuracy_from_confusion, dm_from_confusion, idm_errors_only_approx, ssim_matrix, DmOutcome,
};
use dsi_core::taxonomy::{parse_taxonomy_json_str, scsm_from_taxonomy};
use dsi_core::{
    ccsm_from_confusion, ncsm_from_weights, sai, sorted_csm, tncsm_from_templates, wsi, ClassSpec,
    Csm, CsmKind, Matrix, SaiMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_matrix(rows: &Rows) -> Matrix {
    DenseMatrix::from_rows(rows).unwrap()
}

fn to_rows(m: &Csm) -> Rows {
    (0..m.n()).map(|i| m.row(i).to_vec()).collect()
}

fn counts_matrix(counts: &[Vec<u32>]) -> Matrix {
    let rows: Rows = counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64).collect())
        .collect();
    to_matrix(&rows)
}

fn assert_matches(m: &Csm, want: &Rows) {
    for (i, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            assert!((m.get(i, j) - w).abs() < 1e-12, "({i}, {j})");
        }
    }
}

#[test]
fn ncsm_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows = oracles::random_rows(&mut rng, 5, 8);
    let m = ncsm_from_weights(&to_matrix(&rows)).unwrap();
    let want = oracles::cosine_matrix(&rows);
    assert_matches(&m, &want);
}

#[test]
fn tncsm_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rows = oracles::random_rows(&mut rng, 4, 6);
    let m = tncsm_from_templates(&to_matrix(&rows)).unwrap();
    let want = oracles::cosine_matrix(&rows);
    assert_matches(&m, &want);
}

#[test]
fn sai_matches_flattened_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.gen_range(3..=12);
        let w = oracles::random_rows(&mut rng, n, 10);
        let counts = oracles::random_counts(&mut rng, n, 20);
        let ncsm = ncsm_from_weights(&to_matrix(&w)).unwrap();
        let ccsm = ccsm_from_confusion(&counts_matrix(&counts)).unwrap();
        let u = oracles::normalized_offdiag_flat(&to_rows(&ncsm));
        let v = oracles::normalized_offdiag_flat(&to_rows(&ccsm));
        let got = |m| sai(&ncsm, &ccsm, m).unwrap();
        assert!((got(SaiMeasure::Cosine) - oracles::cosine(&u, &v)).abs() < 1e-12);
        assert!((got(SaiMeasure::Mse) - oracles::mse(&u, &v)).abs() < 1e-12);
        assert!((got(SaiMeasure::Mae) - oracles::mae(&u, &v)).abs() < 1e-12);
        let ssim = oracles::ssim_windows(
            &oracles::normalized_full(&to_rows(&ncsm)),
            &oracles::normalized_full(&to_rows(&ccsm)),
        );
        assert!((got(SaiMeasure::Ssim) - ssim).abs() < 1e-9);
    }
}

#[test]
fn ssim_random_12x12() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a: Rows = (0..12)
        .map(|_| (0..12).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let b: Rows = (0..12)
        .map(|_| (0..12).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let got = ssim_matrix(&to_matrix(&a), &to_matrix(&b)).unwrap();
    assert!((got - oracles::ssim_windows(&a, &b)).abs() < 1e-9);
}

#[test]
fn dm_matches_sample_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.gen_range(3..=10);
        let sim = oracles::cosine_matrix(&oracles::random_rows(&mut rng, n, 4));
        let counts = oracles::random_counts(&mut rng, n, 6);
        let csm =
            ClassSimilarityMatrix::from_parts(CsmKind::Network, true, to_matrix(&sim)).unwrap();
        let sorted = sorted_csm(&csm);
        let cm = counts_matrix(&counts);
        let (want_all, want_err) = oracles::dm_by_samples(&counts, &sim);
        let all = dm_from_confusion(&cm, &sorted, false)
            .unwrap()
            .value()
            .unwrap();
        assert!((all.dm - want_all).abs() < 1e-12);
        match (dm_from_confusion(&cm, &sorted, true).unwrap(), want_err) {
            (DmOutcome::Value(r), Some(w)) => assert!((r.dm - w).abs() < 1e-12),
            (DmOutcome::NoErrors, None) => {}
            other => panic!("mismatch {other:?}"),
        }
    }
}

#[test]
fn hand_built_three_class_dm() {
    let sim = vec![
        vec![1.0, 0.1, 0.6],
        vec![0.3, 1.0, 0.2],
        vec![0.9, 0.4, 1.0],
    ];
    let counts = vec![vec![2, 1, 0], vec![0, 3, 0], vec![1, 0, 2]];
    let csm =
        ClassSimilarityMatrix::from_parts(CsmKind::Confusion, false, to_matrix(&sim)).unwrap();
    let got = dm_from_confusion(&counts_matrix(&counts), &sorted_csm(&csm), false)
        .unwrap()
        .value()
        .unwrap();
    let (want, _) = oracles::dm_by_samples(&counts, &sim);
    // one 0->1 error at rank 2, one 2->0 error at rank 1, nine samples
    assert!((want - 3.0 / 9.0 / 2.0).abs() < 1e-15);
    assert!((got.dm - want).abs() < 1e-12);
}

#[test]
fn approximation_equals_exact_errors_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compared = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=9);
        let csm = ncsm_from_weights(&to_matrix(&oracles::random_rows(&mut rng, n, 5))).unwrap();
        let sorted = sorted_csm(&csm);
        let cm = counts_matrix(&oracles::random_counts(&mut rng, n, 5));
        let all = dm_from_confusion(&cm, &sorted, false)
            .unwrap()
            .value()
            .unwrap();
        let acc = accuracy_from_confusion(&cm).unwrap();
        if let DmOutcome::Value(exact) = dm_from_confusion(&cm, &sorted, true).unwrap() {
            let approx = idm_errors_only_approx(all.dm, acc).unwrap();
            assert!(!approx.clamped);
            assert!((approx.value - exact.idm).abs() < 1e-9);
            compared += 1;
        }
    }
    assert!(compared > 90);
}

#[test]
fn wsi_matches_sorting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let m = oracles::random_symmetric(&mut rng, 20);
        let csm = ClassSimilarityMatrix::from_parts(CsmKind::Network, true, to_matrix(&m)).unwrap();
        let got = wsi(&csm).unwrap();
        let (mean, max, min) = oracles::wsi_by_sorting(&m);
        assert!((got.mean - mean).abs() < 1e-12);
        assert!((got.max - max).abs() < 1e-12);
        assert!((got.min - min).abs() < 1e-12);
        assert!(got.min <= got.mean && got.mean <= got.max);
    }
}

#[test]
fn scsm_matches_all_pairs_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // 10-class synthetic tree: classes are the last 10 nodes of a 25-node tree
    let parents = oracles::random_dag(&mut rng, 25, 1, 0.0);
    let t = parse_taxonomy_json_str(&oracles::taxonomy_json(&parents)).unwrap();
    let dist = oracles::all_pairs_distances(&parents);
    let nodes: Vec<usize> = (15..25).collect();
    let classes: Vec<ClassSpec> = nodes
        .iter()
        .enumerate()
        .map(|(i, &k)| ClassSpec {
            index: i,
            name: format!("c{i}"),
            synset_id: Some(format!("s{k}")),
        })
        .collect();
    let scsm: Csm = scsm_from_taxonomy(&t, &classes).unwrap();
    for (i, &a) in nodes.iter().enumerate() {
        for (j, &b) in nodes.iter().enumerate() {
            assert_eq!(scsm.get(i, j), 1.0 / (1.0 + dist[a][b] as f64));
        }
    }
}

#[test]
fn distances_match_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for round in 0..20 {
        let n = rng.gen_range(2..=200);
        let max_parents = if round % 2 == 0 { 1 } else { 3 };
        let parents = oracles::random_dag(&mut rng, n, max_parents, 0.05);
        let t = parse_taxonomy_json_str(&oracles::taxonomy_json(&parents)).unwrap();
        let dist = oracles::all_pairs_distances(&parents);
        for _ in 0..100 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let got = t
                .shortest_path_distance(&format!("s{a}"), &format!("s{b}"))
                .unwrap();
            assert_eq!(got, dist[a][b]);
        }
    }
}

#[test]
fn thousand_node_tree_has_one_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let parents = oracles::random_dag(&mut rng, 1000, 1, 0.0);
    let t = parse_taxonomy_json_str(&oracles::taxonomy_json(&parents)).unwrap();
    assert_eq!(t.len(), 1000);
    assert_eq!(t.root_ids(), vec!["s0"]);
    assert_eq!(t.edge_count(), 999);
}
