//! Small reference solids.

use crate::convex::{decode_convex, PlaneSet};
use crate::geom::{OrientedPlane, Vec3};
use crate::mesh_io::TriangleMesh;

/// `[0,1]³` as 8 vertices and 12 outward triangles.
pub fn unit_cube() -> TriangleMesh {
    box_mesh(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0))
}

/// Axis-aligned box from `lo` to `hi`, two triangles per side.
pub fn box_mesh(lo: Vec3, hi: Vec3) -> TriangleMesh {
    let v = vec![
        Vec3::new(lo.x, lo.y, lo.z),
        Vec3::new(hi.x, lo.y, lo.z),
        Vec3::new(hi.x, hi.y, lo.z),
        Vec3::new(lo.x, hi.y, lo.z),
        Vec3::new(lo.x, lo.y, hi.z),
        Vec3::new(hi.x, lo.y, hi.z),
        Vec3::new(hi.x, hi.y, hi.z),
        Vec3::new(lo.x, hi.y, hi.z),
    ];
    let t = vec![
        [0, 3, 2],
        [0, 2, 1],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriangleMesh::from_triangles(v, t).expect("valid box")
}

/// Unit cube without its top side (the two `z = 1` triangles).
pub fn hemicube() -> TriangleMesh {
    let cube = unit_cube();
    let tris: Vec<[usize; 3]> = cube
        .triangles()
        .iter()
        .enumerate()
        .filter(|(t, _)| *t != 2 && *t != 3)
        .map(|(_, t)| *t)
        .collect();
    TriangleMesh::from_triangles(cube.vertices().to_vec(), tris).expect("valid hemicube")
}

pub fn regular_tetrahedron() -> TriangleMesh {
    let v = vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ];
    convex_from_faces(
        v,
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
}

/// Right prism over a regular `n`-gon of circumradius `radius`, from `z = 0`
/// to `z = height`. Caps are single polygons, sides are quads.
pub fn regular_prism(n: usize, radius: f64, height: f64) -> TriangleMesh {
    assert!(n >= 3);
    let mut v = Vec::with_capacity(2 * n);
    for z in [0.0, height] {
        for k in 0..n {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            v.push(Vec3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    for k in 0..n {
        let j = (k + 1) % n;
        faces.push(vec![k, j, j + n, k + n]);
    }
    TriangleMesh::from_polygons(v, &faces).expect("valid prism")
}

/// Extrudes a counterclockwise simple polygon in the xy-plane from `z = 0` to
/// `z = height`. Caps are ear-clipped into separate triangles; sides are quads.
pub fn extruded_polygon(outline: &[(f64, f64)], height: f64) -> TriangleMesh {
    let n = outline.len();
    let mut v: Vec<Vec3> = outline.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect();
    v.extend(outline.iter().map(|&(x, y)| Vec3::new(x, y, height)));
    let cap = ear_clip(outline);
    let mut faces: Vec<Vec<usize>> = Vec::new();
    faces.extend(cap.iter().map(|t| vec![t[0], t[2], t[1]]));
    faces.extend(cap.iter().map(|t| vec![t[0] + n, t[1] + n, t[2] + n]));
    for k in 0..n {
        let j = (k + 1) % n;
        faces.push(vec![k, j, j + n, k + n]);
    }
    TriangleMesh::from_polygons(v, &faces).expect("valid extrusion")
}

/// L-shaped prism: a 2×2 square with the 1×1 corner at `(1..2, 1..2)` removed.
pub fn l_prism() -> TriangleMesh {
    extruded_polygon(
        &[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ],
        1.0,
    )
}

/// A 5×3 block with two 1×2 slots cut down from its top edge, extruded by 1.
pub fn two_notch_solid() -> TriangleMesh {
    extruded_polygon(
        &[
            (0.0, 0.0),
            (5.0, 0.0),
            (5.0, 3.0),
            (4.0, 3.0),
            (4.0, 1.0),
            (3.0, 1.0),
            (3.0, 3.0),
            (2.0, 3.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 3.0),
            (0.0, 3.0),
        ],
        1.0,
    )
}

/// One-notch staircase block: a 4×4×2 box topped by a frustum-shaped frame
/// rising to a square rim at `z = 3`, with a square pocket sunk from the rim
/// down to `z = 1`.
///
/// 16 vertices, 14 quads. Polygon order: box bottom, 4 box sides, 4 frame
/// trapezoids, 4 pocket walls, pocket floor.
pub fn pocketed_block() -> TriangleMesh {
    let square = |lo: f64, hi: f64, z: f64| {
        [
            Vec3::new(lo, lo, z),
            Vec3::new(hi, lo, z),
            Vec3::new(hi, hi, z),
            Vec3::new(lo, hi, z),
        ]
    };
    let mut v = Vec::with_capacity(16);
    v.extend(square(0.0, 4.0, 0.0));
    v.extend(square(0.0, 4.0, 2.0));
    v.extend(square(1.0, 3.0, 3.0));
    v.extend(square(1.0, 3.0, 1.0));
    let (b, t, r, p) = (0, 4, 8, 12);
    let mut faces = vec![vec![b, b + 3, b + 2, b + 1]];
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push(vec![b + i, b + j, t + j, t + i]);
    }
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push(vec![t + i, t + j, r + j, r + i]);
    }
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push(vec![r + i, r + j, p + j, p + i]);
    }
    faces.push(vec![p, p + 1, p + 2, p + 3]);
    TriangleMesh::from_polygons(v, &faces).expect("valid pocketed block")
}

/// Plane code of the unit cube with the corner at `(1,1,1)` cut off by the
/// plane `x + y + z = 3 − cut`.
pub fn chamfered_cube_code(cut: f64) -> PlaneSet {
    let mut planes: Vec<OrientedPlane> = [
        (Vec3::X, 1.0),
        (Vec3::Y, 1.0),
        (Vec3::Z, 1.0),
        (-Vec3::X, 0.0),
        (-Vec3::Y, 0.0),
        (-Vec3::Z, 0.0),
    ]
    .into_iter()
    .map(|(n, h)| OrientedPlane::from_normal(n, h).unwrap())
    .collect();
    let n = Vec3::new(1.0, 1.0, 1.0);
    planes.push(OrientedPlane::through_point(n, Vec3::new(1.0 - cut, 1.0, 1.0)).unwrap());
    PlaneSet::new(planes)
}

pub fn chamfered_cube(cut: f64) -> TriangleMesh {
    decode_convex(&chamfered_cube_code(cut), 1e-12)
        .expect("chamfered cube decodes")
        .polyhedron
        .to_mesh()
}

// Orients each convex face of a convex solid outward.
fn convex_from_faces(v: Vec<Vec3>, mut faces: Vec<Vec<usize>>) -> TriangleMesh {
    let c = v.iter().fold(Vec3::ZERO, |s, p| s + *p) / v.len() as f64;
    for f in &mut faces {
        let area = crate::convex::polygon_area_vector(&v, f);
        let fc = f.iter().fold(Vec3::ZERO, |s, &i| s + v[i]) / f.len() as f64;
        if area.dot(fc - c) < 0.0 {
            f.reverse();
        }
    }
    TriangleMesh::from_polygons(v, &faces).expect("valid convex solid")
}

fn ear_clip(outline: &[(f64, f64)]) -> Vec<[usize; 3]> {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut idx: Vec<usize> = (0..outline.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&k| {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (pa, pb, pc) = (outline[a], outline[b], outline[c]);
            if cross(pa, pb, pc) <= 0.0 {
                return false;
            }
            idx.iter().all(|&q| {
                if q == a || q == b || q == c {
                    return true;
                }
                let p = outline[q];
                !(cross(pa, pb, p) >= 0.0 && cross(pb, pc, p) >= 0.0 && cross(pc, pa, p) >= 0.0)
            })
        });
        let k = ear.expect("outline must be a simple counterclockwise polygon");
        out.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
        idx.remove(k);
    }
    out.push([idx[0], idx[1], idx[2]]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solids_are_closed_with_positive_volume() {
        for m in [
            unit_cube(),
            regular_tetrahedron(),
            regular_prism(32, 1.0, 1.0),
            l_prism(),
            two_notch_solid(),
            pocketed_block(),
            chamfered_cube(0.1),
        ] {
            assert!(m.topology().is_closed_manifold());
            assert!(m.signed_volume() > 0.0);
        }
    }

    #[test]
    fn known_volumes() {
        assert!((l_prism().signed_volume() - 3.0).abs() < 1e-12);
        assert!((two_notch_solid().signed_volume() - 11.0).abs() < 1e-12);
        // box 32, minus pocket slab 4, plus frame 28/3 - 4
        let frame = (16.0 + 4.0 + 8.0) / 3.0 - 4.0;
        assert!((pocketed_block().signed_volume() - (32.0 - 4.0 + frame)).abs() < 1e-12);
    }

    #[test]
    fn pocketed_block_counts() {
        let m = pocketed_block();
        assert_eq!(m.vertex_count(), 16);
        assert_eq!(m.polygon_sizes(), &[4; 14]);
        assert_eq!(m.triangle_count(), 28);
    }

    #[test]
    fn hemicube_is_open() {
        assert_eq!(hemicube().topology().boundary_edges, 4);
    }
}
