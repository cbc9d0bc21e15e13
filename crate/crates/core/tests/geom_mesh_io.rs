mod common;

use std::collections::HashMap;

use common::*;
use planecode::geom::{plane_from_triangle, Vec3};
use planecode::mesh_io::{
    emit_obj, emit_stl_ascii, emit_stl_binary, load_mesh, parse_obj, parse_stl_binary, MeshFormat,
    MeshIoError, TriangleMesh,
};
use planecode::primitives::{pocketed_block, unit_cube};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn random_triangle_planes_contain_their_vertices() {
    let mut r = rng(42);
    let mut done = 0;
    while done < 20 {
        let p: Vec<Vec3> = random_points(&mut r, 3)
            .into_iter()
            .map(|v| v * r.gen_range(0.5..10.0))
            .collect();
        let Ok(plane) = plane_from_triangle(p[0], p[1], p[2], 1e-12) else {
            continue;
        };
        for v in &p {
            assert!(plane.signed_distance(*v).abs() <= 1e-9 * v.norm().max(1.0));
        }
        done += 1;
    }
}

const CUBE_OBJ: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3
f 1 3 2
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

#[test]
fn cube_obj_adjacency_matches_edge_map() {
    let m = load_mesh(CUBE_OBJ.as_bytes(), MeshFormat::Obj).unwrap();
    assert_eq!((m.vertex_count(), m.triangle_count()), (8, 12));
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in m.triangles().iter().enumerate() {
        for k in 0..3 {
            owner.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }
    for (t, tri) in m.triangles().iter().enumerate() {
        for k in 0..3 {
            let across = owner[&(tri[(k + 1) % 3], tri[k])];
            assert_eq!(m.neighbors()[t][k], Some(across));
        }
    }
    assert!(m.topology().is_closed_manifold());
}

#[test]
fn minimal_obj() {
    let m = parse_obj(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
    assert_eq!((m.vertex_count(), m.triangle_count()), (3, 1));
}

#[test]
fn obj_curves_unsupported() {
    let e = parse_obj(b"v 0 0 0\ncurv 0 1 1 2\n").unwrap_err();
    assert!(matches!(e, MeshIoError::UnsupportedFeature { line: 2, .. }));
}

#[test]
fn truncated_binary_stl() {
    let mut bytes = emit_stl_binary(&unit_cube());
    bytes.truncate(84 + 50 * 5);
    assert!(matches!(
        parse_stl_binary(&bytes),
        Err(MeshIoError::ParseError { .. })
    ));
}

#[test]
fn format_detection() {
    let bin = emit_stl_binary(&unit_cube());
    let ascii = emit_stl_ascii(&unit_cube());
    assert_eq!(
        MeshFormat::detect("a.STL", &bin),
        Some(MeshFormat::StlBinary)
    );
    assert_eq!(
        MeshFormat::detect("a.stl", &ascii),
        Some(MeshFormat::StlAscii)
    );
    assert_eq!(MeshFormat::detect("a.obj", b""), Some(MeshFormat::Obj));
    assert_eq!(MeshFormat::detect("a.ply", b""), None);
}

#[test]
fn quads_survive_obj_round_trip() {
    let m = pocketed_block();
    let back = parse_obj(&emit_obj(&m)).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.polygons().len(), 14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn obj_round_trip_is_exact(seed in 0u64..10_000, n in 4usize..20) {
        let m = random_hull(seed, n);
        prop_assert_eq!(parse_obj(&emit_obj(&m)).unwrap(), m);
    }

    #[test]
    fn binary_stl_round_trip_keeps_f32_geometry(seed in 0u64..10_000) {
        let m = random_hull(seed, 10).map_vertices(|p| {
            Vec3::new(p.x as f32 as f64, p.y as f32 as f64, p.z as f32 as f64)
        });
        let back = parse_stl_binary(&emit_stl_binary(&m)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn obj_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_obj(&bytes);
        let _ = load_mesh(&bytes, MeshFormat::StlAscii);
        let _ = load_mesh(&bytes, MeshFormat::StlBinary);
    }
}

#[test]
fn area_and_volume_agree_with_mesh_measures() {
    for (_, m) in corpus() {
        assert!((m.surface_area() - area(&m)).abs() < 1e-12 * area(&m).max(1.0));
        assert!((m.signed_volume() - volume(&m)).abs() < 1e-12 * volume(&m).abs().max(1.0));
    }
    let _ = TriangleMesh::empty();
}
