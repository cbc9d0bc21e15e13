#![allow(dead_code)]

use planecode::geom::Vec3;
use planecode::mesh_io::TriangleMesh;
use planecode::segmentation::{MeshPart, PartKind};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut StdRng, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect()
}

pub fn random_unit(rng: &mut StdRng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Brute-force hull of points in general position: every triple whose plane
/// leaves all other points on one side is a facet, oriented outward.
/// Unused points are dropped.
pub fn hull_mesh(points: &[Vec3]) -> TriangleMesh {
    let p: Vec<[f64; 3]> = points.iter().map(|v| v.to_array()).collect();
    let mut tris = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            for k in j + 1..p.len() {
                let n = cross(sub(p[j], p[i]), sub(p[k], p[j]));
                let (mut pos, mut neg) = (false, false);
                for (m, q) in p.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    let d = dot(n, sub(*q, p[i]));
                    pos |= d > 0.0;
                    neg |= d < 0.0;
                    if pos && neg {
                        break;
                    }
                }
                if !pos {
                    tris.push([i, j, k]);
                } else if !neg {
                    tris.push([i, k, j]);
                }
            }
        }
    }
    let mut remap = vec![usize::MAX; p.len()];
    let mut verts = Vec::new();
    for t in &mut tris {
        for v in t.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = verts.len();
                verts.push(points[*v]);
            }
            *v = remap[*v];
        }
    }
    TriangleMesh::from_triangles(verts, tris).expect("hull mesh")
}

pub fn random_hull(seed: u64, n: usize) -> TriangleMesh {
    hull_mesh(&random_points(&mut rng(seed), n))
}

/// Outward facet planes `(unit normal, offset)` of a mesh, one per triangle.
pub fn facet_planes(mesh: &TriangleMesh) -> Vec<([f64; 3], f64)> {
    mesh.triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices()[i].to_array());
            let n = cross(sub(b, a), sub(c, b));
            let l = dot(n, n).sqrt();
            let n = [n[0] / l, n[1] / l, n[2] / l];
            (n, dot(n, a))
        })
        .collect()
}

pub fn area(mesh: &TriangleMesh) -> f64 {
    mesh.triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices()[i].to_array());
            let n = cross(sub(b, a), sub(c, a));
            0.5 * dot(n, n).sqrt()
        })
        .sum()
}

/// Enclosed volume by the divergence theorem.
pub fn volume(mesh: &TriangleMesh) -> f64 {
    mesh.triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices()[i].to_array());
            dot(a, cross(b, c)) / 6.0
        })
        .sum()
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let one = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| p.distance(*q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn signed(mesh: &TriangleMesh, plane_of: usize, point: [f64; 3]) -> f64 {
    let [a, b, c] = mesh.triangles()[plane_of].map(|i| mesh.vertices()[i].to_array());
    let n = cross(sub(b, a), sub(c, b));
    let l = dot(n, n).sqrt();
    dot(n, sub(point, a)) / l
}

/// Six-vertex test: every vertex of each triangle within `eps` behind
/// (`sign = 1`) or in front of (`sign = -1`) the other's plane.
pub fn oriented(mesh: &TriangleMesh, t: usize, u: usize, sign: f64, eps: f64) -> bool {
    let check = |x: usize, y: usize| {
        mesh.triangles()[x]
            .iter()
            .all(|&v| sign * signed(mesh, y, mesh.vertices()[v].to_array()) <= eps)
    };
    check(t, u) && check(u, t)
}

/// All-pairs check of the part definitions; returns the first violating pair.
pub fn part_violation(mesh: &TriangleMesh, part: &MeshPart, eps: f64) -> Option<(usize, usize)> {
    let sign = match part.kind {
        PartKind::PseudoConvex => 1.0,
        PartKind::PseudoConcave => -1.0,
    };
    for (a, &t) in part.triangles.iter().enumerate() {
        for &u in &part.triangles[a + 1..] {
            if !oriented(mesh, t, u, sign, eps) {
                return Some((t, u));
            }
        }
    }
    None
}

pub fn used_vertices(mesh: &TriangleMesh) -> Vec<Vec3> {
    let mut used = vec![false; mesh.vertex_count()];
    for t in mesh.triangles() {
        for &v in t {
            used[v] = true;
        }
    }
    mesh.vertices()
        .iter()
        .zip(used)
        .filter(|(_, u)| *u)
        .map(|(v, _)| *v)
        .collect()
}

pub fn eps_for(mesh: &TriangleMesh) -> f64 {
    1e-7 * mesh.bbox_diagonal()
}

/// Meshes used by the segmentation and segmented round-trip checks.
pub fn corpus() -> Vec<(String, TriangleMesh)> {
    use planecode::primitives::*;
    let mut out = vec![
        ("cube".to_string(), unit_cube()),
        ("tetrahedron".to_string(), regular_tetrahedron()),
        ("staircase".to_string(), pocketed_block()),
        ("l-prism".to_string(), l_prism()),
        ("two-notch".to_string(), two_notch_solid()),
        ("prism-32".to_string(), regular_prism(32, 1.0, 1.0)),
        ("chamfered-cube".to_string(), chamfered_cube(0.2)),
    ];
    for seed in 0..5 {
        out.push((
            format!("hull-{seed}"),
            random_hull(1000 + seed, 12 + 4 * seed as usize),
        ));
    }
    out
}

/// Whether `mesh` is convex (so a single pseudo-convex part is expected).
pub fn is_convex(mesh: &TriangleMesh, eps: f64) -> bool {
    (0..mesh.triangle_count()).all(|t| {
        mesh.vertices()
            .iter()
            .all(|v| signed(mesh, t, v.to_array()) <= eps)
    })
}

/// Hull with each vertex pushed radially by a random factor in `[0.6, 1.4)`;
/// closed and consistently oriented, usually not convex.
pub fn bumpy_hull(seed: u64, n: usize) -> TriangleMesh {
    let hull = random_hull(seed, n);
    let mut r = rng(seed ^ 0xbeef);
    let c = hull.vertices().iter().fold(Vec3::ZERO, |s, v| s + *v) / hull.vertex_count() as f64;
    let v = hull
        .vertices()
        .iter()
        .map(|p| c + (*p - c) * r.gen_range(0.6..1.4))
        .collect();
    TriangleMesh::from_triangles(v, hull.triangles().to_vec()).unwrap()
}
