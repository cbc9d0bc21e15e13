//! Polygon faces, cutting planes and the segmented plane code.
//!
//! Each part's coplanar neighbour triangles are merged into polygons whose
//! planes form the part's face planes. An open part also gets one cutting
//! plane per straight run of its rim, tilted away from the part so that the
//! intersection of all half-spaces is bounded and meets the face planes
//! exactly along the part's surface. Pseudo-concave parts use the same
//! construction on the negated planes.

use std::collections::HashMap;

use thiserror::Error;

use crate::convex::{
    coplanar_groups, decode_convex, fit_group_plane, polygon_area_vector, triangle_planes,
    ConvexError, PlaneSet,
};
use crate::geom::{GeomError, OrientedPlane, Vec3};
use crate::mesh_io::TriangleMesh;
use crate::segmentation::{segment_mesh, MeshPart, PartKind, SegmentationError};

/// Cutting planes whose tilt range is narrower than this are rejected.
const MIN_TILT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolygonizeError {
    #[error("face containing triangle {triangle} has a hole or a pinched boundary")]
    NonSimpleBoundary { triangle: usize },
    #[error("no cutting plane fits the rim edge {from}->{to}")]
    BoundaryNotCuttable { from: usize, to: usize },
    #[error(
        "decoded planes of the part starting at triangle {triangle} do not reproduce its faces"
    )]
    Unverified { triangle: usize },
    #[error("part {part} cannot be decoded: {source}")]
    PartUndecodable { part: usize, source: ConvexError },
    #[error("part rims do not coincide (vertices {distance:e} apart)")]
    WeldMismatch { distance: f64 },
    #[error("a segmented code needs at least one part")]
    EmptyCode,
    #[error("part has no triangles")]
    EmptyPart,
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Convex(#[from] ConvexError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A maximal planar polygon of a part.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonFace {
    pub plane: OrientedPlane,
    /// Vertex ring, counterclockwise seen from the positive side.
    pub boundary: Vec<usize>,
    pub triangles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartCode {
    pub kind: PartKind,
    pub face_planes: PlaneSet,
    pub boundary_planes: PlaneSet,
}

impl PartCode {
    pub fn plane_count(&self) -> usize {
        self.face_planes.len() + self.boundary_planes.len()
    }
}

/// Non-empty ordered list of part codes.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedCode {
    parts: Vec<PartCode>,
}

impl SegmentedCode {
    pub fn new(parts: Vec<PartCode>) -> Result<Self, PolygonizeError> {
        if parts.is_empty() {
            return Err(PolygonizeError::EmptyCode);
        }
        Ok(SegmentedCode { parts })
    }

    pub fn parts(&self) -> &[PartCode] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<PartCode> {
        self.parts
    }

    pub fn plane_count(&self) -> usize {
        self.parts.iter().map(PartCode::plane_count).sum()
    }
}

fn sign(kind: PartKind) -> f64 {
    match kind {
        PartKind::PseudoConvex => 1.0,
        PartKind::PseudoConcave => -1.0,
    }
}

struct Group {
    triangles: Vec<usize>,
    normal: Vec3,
    h: f64,
}

fn groups_of(
    mesh: &TriangleMesh,
    planes: &[(Vec3, f64)],
    part: &MeshPart,
    eps: f64,
) -> Result<Vec<Group>, PolygonizeError> {
    if part.triangles.is_empty() {
        return Err(PolygonizeError::EmptyPart);
    }
    coplanar_groups(mesh, planes, &part.triangles, eps)
        .into_iter()
        .map(|triangles| {
            let (normal, h) = fit_group_plane(mesh, &triangles)?;
            Ok(Group {
                triangles,
                normal,
                h,
            })
        })
        .collect()
}

// Directed edges of `tris` whose reverse is not an edge of `tris`, as
// `(from, to, triangle)`, in triangle order.
fn open_edges(mesh: &TriangleMesh, tris: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for &t in tris {
        let [a, b, c] = mesh.triangles()[t];
        for e in [(a, b), (b, c), (c, a)] {
            edges.insert(e, t);
        }
    }
    let mut out = Vec::new();
    for &t in tris {
        let [a, b, c] = mesh.triangles()[t];
        for (x, y) in [(a, b), (b, c), (c, a)] {
            if !edges.contains_key(&(y, x)) {
                out.push((x, y, t));
            }
        }
    }
    out
}

// Chains open edges into closed loops; `None` if some vertex starts two
// open edges or a chain does not close.
fn chain_loops(edges: &[(usize, usize, usize)]) -> Option<Vec<Vec<(usize, usize, usize)>>> {
    let mut next: HashMap<usize, usize> = HashMap::new();
    for (k, e) in edges.iter().enumerate() {
        if next.insert(e.0, k).is_some() {
            return None;
        }
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut k = start;
        while !used[k] {
            used[k] = true;
            lp.push(edges[k]);
            k = *next.get(&edges[k].1)?;
        }
        if k != start {
            return None;
        }
        loops.push(lp);
    }
    Some(loops)
}

fn ring_of(mesh: &TriangleMesh, group: &Group) -> Result<Vec<usize>, PolygonizeError> {
    let non_simple = PolygonizeError::NonSimpleBoundary {
        triangle: group.triangles[0],
    };
    let loops = chain_loops(&open_edges(mesh, &group.triangles)).ok_or(non_simple.clone())?;
    if loops.len() != 1 {
        return Err(non_simple);
    }
    Ok(loops[0].iter().map(|e| e.0).collect())
}

/// Merges the part's edge-connected coplanar triangles into polygons.
///
/// Faces are ordered by their lowest triangle index. Collinear boundary
/// vertices stay in the ring.
pub fn polygonize_part(
    mesh: &TriangleMesh,
    part: &MeshPart,
    eps: f64,
) -> Result<Vec<PolygonFace>, PolygonizeError> {
    let planes = triangle_planes(mesh)?;
    groups_of(mesh, &planes, part, eps)?
        .into_iter()
        .map(|g| {
            Ok(PolygonFace {
                plane: OrientedPlane::from_normal(g.normal, g.h)?,
                boundary: ring_of(mesh, &g)?,
                triangles: g.triangles,
            })
        })
        .collect()
}

/// Cutting planes closing the rim of an open part; empty for a closed part.
///
/// The rim is split into runs of consecutive collinear edges bordering the
/// same polygon. Each run gets a plane through it, rotated about the run
/// from the polygon's plane away from the polygon. The largest rotation that
/// keeps every part vertex behind the plane is reduced by half of itself, or
/// by 45° if that is less.
pub fn boundary_planes_for_part(
    mesh: &TriangleMesh,
    part: &MeshPart,
    eps: f64,
) -> Result<PlaneSet, PolygonizeError> {
    let planes = triangle_planes(mesh)?;
    let groups = groups_of(mesh, &planes, part, eps)?;
    cutting_planes(mesh, part, &groups, eps)
}

fn cutting_planes(
    mesh: &TriangleMesh,
    part: &MeshPart,
    groups: &[Group],
    eps: f64,
) -> Result<PlaneSet, PolygonizeError> {
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for (g, group) in groups.iter().enumerate() {
        for &t in &group.triangles {
            group_of.insert(t, g);
        }
    }
    let edges = open_edges(mesh, &part.triangles);
    let Some(loops) = chain_loops(&edges) else {
        return Err(PolygonizeError::NonSimpleBoundary {
            triangle: part.triangles[0],
        });
    };

    let mut verts: Vec<usize> = part
        .triangles
        .iter()
        .flat_map(|&t| mesh.triangles()[t])
        .collect();
    verts.sort_unstable();
    verts.dedup();

    let s = sign(part.kind);
    let v = mesh.vertices();
    let dir = |e: &(usize, usize, usize)| (v[e.1] - v[e.0]).normalized();
    let mut out = PlaneSet::default();
    for lp in loops {
        let same_run = |p: &(usize, usize, usize), q: &(usize, usize, usize)| {
            if group_of[&p.2] != group_of[&q.2] {
                return false;
            }
            match (dir(p), dir(q)) {
                (Some(a), Some(b)) => a.dot(b) > 0.0 && a.cross(b).norm() <= 1e-9,
                _ => false,
            }
        };
        let m = lp.len();
        let start = (0..m)
            .find(|&k| !same_run(&lp[(k + m - 1) % m], &lp[k]))
            .unwrap_or(0);
        let mut k = 0;
        while k < m {
            let first = lp[(start + k) % m];
            let mut last = first;
            k += 1;
            while k < m && same_run(&last, &lp[(start + k) % m]) {
                last = lp[(start + k) % m];
                k += 1;
            }
            let plane = cut_plane(
                v,
                &verts,
                &groups[group_of[&first.2]],
                first.0,
                last.1,
                s,
                eps,
            )?;
            if out.position_of(&plane, 1e-9, eps).is_none() {
                out.push(plane);
            }
        }
    }
    Ok(out.canonical())
}

fn cut_plane(
    v: &[Vec3],
    verts: &[usize],
    group: &Group,
    from: usize,
    to: usize,
    s: f64,
    eps: f64,
) -> Result<OrientedPlane, PolygonizeError> {
    let not_cuttable = PolygonizeError::BoundaryNotCuttable { from, to };
    let a = v[from];
    let d = (v[to] - a).normalized().ok_or(not_cuttable.clone())?;
    let n_eff = group.normal * s;
    let m = d.cross(group.normal);
    let mut theta_max = std::f64::consts::PI;
    for &i in verts {
        let q = v[i] - a;
        let (u, w) = (n_eff.dot(q), m.dot(q));
        if u.hypot(w) <= eps {
            continue;
        }
        if u > eps {
            return Err(not_cuttable);
        }
        let psi = w.atan2(u.min(0.0));
        let bound = if psi >= 0.0 {
            psi - std::f64::consts::FRAC_PI_2
        } else {
            psi + 1.5 * std::f64::consts::PI
        };
        theta_max = theta_max.min(bound);
    }
    if theta_max < MIN_TILT {
        return Err(not_cuttable);
    }
    let theta = theta_max - (theta_max / 2.0).min(std::f64::consts::FRAC_PI_4);
    let c = (n_eff * theta.cos() + m * theta.sin())
        .normalized()
        .ok_or(not_cuttable)?;
    Ok(OrientedPlane::from_normal(c * s, c.dot(a) * s)?)
}

fn face_planes_of(groups: &[Group], eps: f64) -> Result<PlaneSet, PolygonizeError> {
    let mut out = PlaneSet::default();
    for g in groups {
        let p = OrientedPlane::from_normal(g.normal, g.h)?;
        if out.position_of(&p, 1e-9, eps).is_none() {
            out.push(p);
        }
    }
    Ok(out.canonical())
}

// Encodes one part and checks that decoding it gives back each polygon.
fn encode_part(
    mesh: &TriangleMesh,
    planes: &[(Vec3, f64)],
    part: &MeshPart,
    eps: f64,
) -> Result<PartCode, PolygonizeError> {
    let groups = groups_of(mesh, planes, part, eps)?;
    for g in &groups {
        ring_of(mesh, g)?;
    }
    let code = PartCode {
        kind: part.kind,
        face_planes: face_planes_of(&groups, eps)?,
        boundary_planes: cutting_planes(mesh, part, &groups, eps)?,
    };
    let unverified = PolygonizeError::Unverified {
        triangle: part.triangles[0],
    };
    let (vertices, faces) = decode_part(&code, eps).map_err(|_| unverified.clone())?;
    let diag = mesh.bbox_diagonal();
    let v = mesh.vertices();
    for (i, plane) in code.face_planes.iter().enumerate() {
        let members: Vec<&Group> = groups
            .iter()
            .filter(|g| {
                g.normal.dot(plane.normal()) > 1.0 - 1e-12 && (g.h - plane.h()).abs() <= eps
            })
            .collect();
        let expected: f64 = members
            .iter()
            .flat_map(|g| g.triangles.iter())
            .map(|&t| mesh.triangle_area(t))
            .sum();
        let Some((_, ring)) = faces.iter().find(|(p, _)| *p == i) else {
            return Err(unverified);
        };
        let area = polygon_area_vector(&vertices, ring).norm() * 0.5;
        if (area - expected).abs() > 1e-6 * expected + eps * diag {
            return Err(unverified);
        }
        let tol = 10.0 * eps + 1e-9 * diag;
        let near_source = |p: Vec3| {
            members
                .iter()
                .flat_map(|g| g.triangles.iter())
                .flat_map(|&t| mesh.triangles()[t])
                .any(|k| v[k].distance(p) <= tol)
        };
        if !ring.iter().all(|&k| near_source(vertices[k])) {
            return Err(unverified);
        }
    }
    Ok(code)
}

/// Segments the mesh and codes every part.
///
/// A part whose planes do not decode back to its polygons (for instance a
/// part with a non-convex polygon) is replaced by one part per polygon, and
/// a polygon that still fails by one part per triangle.
pub fn encode_segmented(mesh: &TriangleMesh, eps: f64) -> Result<SegmentedCode, PolygonizeError> {
    let planes = triangle_planes(mesh)?;
    let mut out = Vec::new();
    for part in segment_mesh(mesh, eps)? {
        if let Ok(code) = encode_part(mesh, &planes, &part, eps) {
            out.push(code);
            continue;
        }
        for group in coplanar_groups(mesh, &planes, &part.triangles, eps) {
            let sub = MeshPart {
                kind: part.kind,
                triangles: group,
            };
            if let Ok(code) = encode_part(mesh, &planes, &sub, eps) {
                out.push(code);
                continue;
            }
            for &t in &sub.triangles {
                let single = MeshPart {
                    kind: part.kind,
                    triangles: vec![t],
                };
                out.push(encode_part(mesh, &planes, &single, eps)?);
            }
        }
    }
    SegmentedCode::new(out)
}

/// A decoded face: the index of its face plane and its vertex ring.
pub type PlaneFace = (usize, Vec<usize>);

/// Decodes one part: vertices plus `(face plane index, ring)` for every
/// face carried by a face plane, rings counterclockwise from outside the
/// solid.
pub fn decode_part(code: &PartCode, eps: f64) -> Result<(Vec<Vec3>, Vec<PlaneFace>), ConvexError> {
    let s = sign(code.kind);
    let all: PlaneSet = code
        .face_planes
        .iter()
        .chain(code.boundary_planes.iter())
        .map(|p| if s < 0.0 { p.flipped() } else { *p })
        .collect();
    let decoded = decode_convex(&all, eps)?.polyhedron;
    let nf = code.face_planes.len();
    let faces = decoded
        .faces
        .iter()
        .zip(&decoded.face_planes)
        .filter(|(_, &p)| p < nf)
        .map(|(ring, &p)| {
            let mut ring = ring.clone();
            if s < 0.0 {
                ring.reverse();
            }
            (p, ring)
        })
        .collect();
    Ok((decoded.vertices, faces))
}

/// Rebuilds the surface of a segmented code.
///
/// Every part is decoded on its own; vertices of different parts closer
/// than `1e-6 ×` the diagonal are welded. Vertices of different parts that
/// are close but not within that tolerance are reported as a mismatch.
pub fn decode_segmented(code: &SegmentedCode, eps: f64) -> Result<TriangleMesh, PolygonizeError> {
    let mut points = Vec::new();
    let mut owner = Vec::new();
    let mut rings: Vec<Vec<usize>> = Vec::new();
    for (k, part) in code.parts().iter().enumerate() {
        let (vertices, faces) = decode_part(part, eps)
            .map_err(|source| PolygonizeError::PartUndecodable { part: k, source })?;
        let mut local: HashMap<usize, usize> = HashMap::new();
        for (_, ring) in faces {
            rings.push(
                ring.iter()
                    .map(|&i| {
                        *local.entry(i).or_insert_with(|| {
                            points.push(vertices[i]);
                            owner.push(k);
                            points.len() - 1
                        })
                    })
                    .collect(),
            );
        }
    }
    let tol = 1e-6 * crate::geom::bbox_diagonal(&points);
    let (welded, map) = weld(&points, &owner, tol)?;
    let mut polygons = Vec::with_capacity(rings.len());
    for ring in rings {
        let mut r: Vec<usize> = ring.iter().map(|&i| map[i]).collect();
        r.dedup();
        while r.len() > 1 && r.first() == r.last() {
            r.pop();
        }
        let mut sorted = r.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if r.len() >= 3 && sorted.len() == r.len() {
            polygons.push(r);
        }
    }
    Ok(TriangleMesh::from_polygons(welded, &polygons).expect("welded rings index welded vertices"))
}

fn weld(
    points: &[Vec3],
    owner: &[usize],
    tol: f64,
) -> Result<(Vec<Vec3>, Vec<usize>), PolygonizeError> {
    let reach = 100.0 * tol;
    let cell = |p: Vec3| {
        let s = if reach > 0.0 { reach } else { 1.0 };
        (
            (p.x / s).floor() as i64,
            (p.y / s).floor() as i64,
            (p.z / s).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut reps: Vec<Vec3> = Vec::new();
    let mut rep_owner: Vec<usize> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        let c = cell(p);
        let mut hit = None;
        let mut near_miss = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    for &r in grid
                        .get(&(c.0 + dx, c.1 + dy, c.2 + dz))
                        .into_iter()
                        .flatten()
                    {
                        let d = reps[r].distance(p);
                        if d <= tol {
                            hit = hit.or(Some(r));
                        } else if d <= reach && rep_owner[r] != owner[i] {
                            near_miss = Some(d);
                        }
                    }
                }
            }
        }
        if let (None, Some(distance)) = (hit, near_miss) {
            return Err(PolygonizeError::WeldMismatch { distance });
        }
        match hit {
            Some(r) => map.push(r),
            None => {
                grid.entry(c).or_default().push(reps.len());
                map.push(reps.len());
                reps.push(p);
                rep_owner.push(owner[i]);
            }
        }
    }
    Ok((reps, map))
}
