mod common;

use common::*;
use planecode::geom::Vec3;
use planecode::mesh_io::TriangleMesh;
use planecode::primitives::{pocketed_block, unit_cube};
use planecode::segmentation::{
    is_negatively_oriented, is_positively_oriented, mutual_orientation, segment_mesh,
    MutualOrientation, PartKind, SegmentationError,
};
use proptest::prelude::*;

fn check_partition(mesh: &TriangleMesh, eps: f64) {
    let parts = segment_mesh(mesh, eps).unwrap();
    let mut seen = vec![0; mesh.triangle_count()];
    for part in &parts {
        assert!(!part.triangles.is_empty());
        for &t in &part.triangles {
            seen[t] += 1;
        }
        assert_eq!(part_violation(mesh, part, eps), None);
    }
    assert!(seen.iter().all(|&c| c == 1));
}

#[test]
fn corpus_parts_partition_and_satisfy_pair_conditions() {
    for (name, m) in corpus() {
        let parts = segment_mesh(&m, eps_for(&m)).unwrap();
        check_partition(&m, eps_for(&m));
        if is_convex(&m, eps_for(&m)) {
            assert_eq!(parts.len(), 1, "{name}");
        }
    }
    check_partition(&pocketed_block(), 1e-9);
}

#[test]
fn pocket_is_concave() {
    let parts = segment_mesh(&pocketed_block(), 1e-9).unwrap();
    let kinds: Vec<PartKind> = parts.iter().map(|p| p.kind).collect();
    assert_eq!(kinds, [PartKind::PseudoConvex, PartKind::PseudoConcave]);
}

#[test]
fn non_manifold_and_inconsistent_meshes_rejected() {
    let v = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, -1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    ];
    let fan =
        TriangleMesh::from_triangles(v.clone(), vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap();
    assert!(matches!(
        segment_mesh(&fan, 1e-9),
        Err(SegmentationError::NonManifold(_))
    ));
    let flipped = TriangleMesh::from_triangles(v, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
    assert!(matches!(
        segment_mesh(&flipped, 1e-9),
        Err(SegmentationError::InconsistentOrientation(_))
    ));
}

#[test]
fn degenerate_triangle_reported() {
    let v = vec![Vec3::ZERO, Vec3::X, Vec3::X * 2.0];
    let m = TriangleMesh::from_triangles(v, vec![[0, 1, 2]]).unwrap();
    assert!(matches!(
        segment_mesh(&m, 1e-9),
        Err(SegmentationError::DegenerateTriangle { triangle: 0, .. })
    ));
}

#[test]
fn cube_pairs_all_positive() {
    let cube = unit_cube();
    for a in 0..12 {
        for b in 0..12 {
            assert!(is_positively_oriented(&cube, a, b, 1e-9).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bumpy_meshes_partition(seed in 0u64..10_000, n in 8usize..24) {
        let m = bumpy_hull(seed, n);
        check_partition(&m, eps_for(&m));
    }

    #[test]
    fn segmentation_is_deterministic(seed in 0u64..10_000) {
        let m = bumpy_hull(seed, 16);
        prop_assert_eq!(segment_mesh(&m, 1e-9).unwrap(), segment_mesh(&m, 1e-9).unwrap());
    }

    #[test]
    fn pair_tests_match_oracle(seed in 0u64..10_000, a in 0usize..1000, b in 0usize..1000) {
        let m = bumpy_hull(seed, 16);
        let (a, b) = (a % m.triangle_count(), b % m.triangle_count());
        let pos = oriented(&m, a, b, 1.0, 1e-9);
        let neg = oriented(&m, a, b, -1.0, 1e-9);
        prop_assert_eq!(is_positively_oriented(&m, a, b, 1e-9).unwrap(), pos);
        prop_assert_eq!(is_negatively_oriented(&m, a, b, 1e-9).unwrap(), neg);
        let expect = if pos {
            MutualOrientation::Positive
        } else if neg {
            MutualOrientation::Negative
        } else {
            MutualOrientation::Mixed
        };
        prop_assert_eq!(mutual_orientation(&m, a, b, 1e-9).unwrap(), expect);
        prop_assert_eq!(mutual_orientation(&m, b, a, 1e-9).unwrap(), expect);
    }
}
