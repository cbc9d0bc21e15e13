//! Lossy reduction of plane codes: dropping planes with small faces and
//! merging neighbouring planes that are nearly parallel.

use thiserror::Error;

use crate::convex::{
    decode_convex, planes_coincide, polygon_area_vector, ConvexError, DecodedPolyhedron, PlaneSet,
};
use crate::geom::{OrientedPlane, Vec3};
use crate::polygonize::{decode_part, PartCode, SegmentedCode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplifyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("simplified code no longer bounds a solid")]
    OverSimplified,
    #[error(transparent)]
    Decode(#[from] ConvexError),
}

/// Area threshold `delta` (squared units) and angle threshold `tau` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifyParams {
    pub delta: f64,
    pub tau: f64,
}

impl SimplifyParams {
    pub fn new(delta: f64, tau: f64) -> Result<Self, SimplifyError> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(SimplifyError::InvalidParams(format!(
                "delta {delta} must be >= 0"
            )));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&tau) {
            return Err(SimplifyError::InvalidParams(format!(
                "tau {tau} must be in [0, pi/2)"
            )));
        }
        Ok(SimplifyParams { delta, tau })
    }
}

/// Which planes carry faces sharing an edge, with each plane's face area and
/// face vertices. Planes without a face have area 0 and no vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlaneAdjacency {
    pairs: Vec<(usize, usize)>,
    areas: Vec<f64>,
    face_vertices: Vec<Vec<Vec3>>,
}

impl PlaneAdjacency {
    /// Builds the relation from `(plane, ring)` faces over shared `vertices`.
    /// Faces are adjacent when their rings share two vertices.
    pub fn from_faces(
        plane_count: usize,
        vertices: &[Vec3],
        faces: &[(usize, Vec<usize>)],
    ) -> Self {
        let mut areas = vec![0.0; plane_count];
        let mut face_vertices = vec![Vec::new(); plane_count];
        for (p, ring) in faces {
            areas[*p] = polygon_area_vector(vertices, ring).norm() * 0.5;
            face_vertices[*p] = ring.iter().map(|&i| vertices[i]).collect();
        }
        let mut pairs = Vec::new();
        for (a, (pa, ra)) in faces.iter().enumerate() {
            for (pb, rb) in &faces[a + 1..] {
                if ra.iter().filter(|v| rb.contains(v)).count() >= 2 {
                    pairs.push(((*pa).min(*pb), (*pa).max(*pb)));
                }
            }
        }
        pairs.sort_unstable();
        PlaneAdjacency {
            pairs,
            areas,
            face_vertices,
        }
    }

    /// Relation for a decoded convex code. A plane that repeats a
    /// face-carrying plane is made adjacent to it and shares its vertices.
    pub fn from_decoded(code: &PlaneSet, decoded: &DecodedPolyhedron, h_tol: f64) -> Self {
        let poly = &decoded.polyhedron;
        let faces: Vec<(usize, Vec<usize>)> = poly
            .face_planes
            .iter()
            .copied()
            .zip(poly.faces.iter().cloned())
            .collect();
        let mut adj = Self::from_faces(code.len(), &poly.vertices, &faces);
        for &r in &decoded.redundant_planes {
            let twin = poly
                .face_planes
                .iter()
                .copied()
                .find(|&p| planes_coincide(&code.planes()[p], &code.planes()[r], 1e-9, h_tol));
            if let Some(p) = twin {
                adj.pairs.push((p.min(r), p.max(r)));
                adj.face_vertices[r] = adj.face_vertices[p].clone();
            }
        }
        adj.pairs.sort_unstable();
        adj.pairs.dedup();
        adj
    }

    /// Decodes `code` and builds its relation.
    pub fn of_code(code: &PlaneSet, eps: f64) -> Result<Self, ConvexError> {
        let decoded = decode_convex(code, eps)?;
        Ok(Self::from_decoded(code, &decoded, eps.max(1e-9)))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn area(&self, plane: usize) -> f64 {
        self.areas.get(plane).copied().unwrap_or(0.0)
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// Keeps the planes whose decoded face has area at least `delta`.
///
/// Areas are measured once on the decode of the input; planes without a
/// face count as area 0.
pub fn drop_small_faces(
    code: &PlaneSet,
    params: SimplifyParams,
    eps: f64,
) -> Result<PlaneSet, SimplifyError> {
    let adj = PlaneAdjacency::of_code(code, eps)?;
    let kept: PlaneSet = code
        .iter()
        .enumerate()
        .filter(|(i, _)| adj.area(*i) >= params.delta)
        .map(|(_, p)| *p)
        .collect();
    if kept.len() < 4 {
        return Err(SimplifyError::OverSimplified);
    }
    match decode_convex(&kept, eps) {
        Ok(_) => Ok(kept),
        Err(ConvexError::UnboundedRegion) => Err(SimplifyError::OverSimplified),
        Err(e) => Err(e.into()),
    }
}

/// Merges clusters of adjacent planes whose normals are pairwise closer
/// than `tau`.
///
/// Clusters are formed in plane order: each unclustered plane opens a
/// cluster, which then takes any later unclustered plane adjacent to one of
/// its members and within `tau` of all of them. A cluster of several planes
/// becomes one plane with the area-weighted mean normal, placed through the
/// centroid of the members' distinct face vertices. It takes the position of
/// its first member.
pub fn merge_near_parallel(
    code: &PlaneSet,
    adjacency: &PlaneAdjacency,
    params: SimplifyParams,
) -> PlaneSet {
    let n = code.len();
    let normals: Vec<Vec3> = code.iter().map(|p| p.normal()).collect();
    let mut taken = vec![false; n];
    let mut out = PlaneSet::default();
    for i in 0..n {
        if taken[i] {
            continue;
        }
        taken[i] = true;
        let mut cluster = vec![i];
        let mut grew = true;
        while grew {
            grew = false;
            for j in i + 1..n {
                if taken[j] {
                    continue;
                }
                let joins = cluster.iter().any(|&c| adjacency.are_adjacent(c, j))
                    && cluster
                        .iter()
                        .all(|&c| crate::geom::angle_between(normals[c], normals[j]) < params.tau);
                if joins {
                    taken[j] = true;
                    cluster.push(j);
                    grew = true;
                }
            }
        }
        if cluster.len() == 1 {
            out.push(code.planes()[i]);
            continue;
        }
        out.push(merged_plane(&cluster, &normals, adjacency).unwrap_or(code.planes()[i]));
    }
    out
}

fn merged_plane(
    cluster: &[usize],
    normals: &[Vec3],
    adj: &PlaneAdjacency,
) -> Option<OrientedPlane> {
    let weighted = cluster
        .iter()
        .fold(Vec3::ZERO, |s, &c| s + normals[c] * adj.area(c));
    let n = weighted.normalized().or_else(|| {
        cluster
            .iter()
            .fold(Vec3::ZERO, |s, &c| s + normals[c])
            .normalized()
    })?;
    let mut verts: Vec<Vec3> = Vec::new();
    for &c in cluster {
        for v in adj.face_vertices.get(c).into_iter().flatten() {
            if !verts.contains(v) {
                verts.push(*v);
            }
        }
    }
    if verts.is_empty() {
        return None;
    }
    let centroid = verts.iter().fold(Vec3::ZERO, |s, v| s + *v) / verts.len() as f64;
    OrientedPlane::from_normal(n, n.dot(centroid)).ok()
}

/// Applies both heuristics to every part of a segmented code, touching face
/// planes only. Parts whose faces all fall below `delta` are removed.
pub fn simplify_segmented(
    code: &SegmentedCode,
    params: SimplifyParams,
    eps: f64,
) -> Result<SegmentedCode, SimplifyError> {
    let mut parts = Vec::new();
    for part in code.parts() {
        let adj = part_adjacency(part, eps)?;
        let faces: PlaneSet = part
            .face_planes
            .iter()
            .enumerate()
            .filter(|(i, _)| adj.area(*i) >= params.delta)
            .map(|(_, p)| *p)
            .collect();
        if faces.is_empty() {
            continue;
        }
        let mut next = PartCode {
            kind: part.kind,
            face_planes: faces,
            boundary_planes: part.boundary_planes.clone(),
        };
        let adj = part_adjacency(&next, eps).map_err(|_| SimplifyError::OverSimplified)?;
        next.face_planes = merge_near_parallel(&next.face_planes, &adj, params);
        decode_part(&next, eps).map_err(|_| SimplifyError::OverSimplified)?;
        parts.push(next);
    }
    SegmentedCode::new(parts).map_err(|_| SimplifyError::OverSimplified)
}

fn part_adjacency(part: &PartCode, eps: f64) -> Result<PlaneAdjacency, ConvexError> {
    let (vertices, faces) = decode_part(part, eps)?;
    Ok(PlaneAdjacency::from_faces(
        part.face_planes.len(),
        &vertices,
        &faces,
    ))
}
