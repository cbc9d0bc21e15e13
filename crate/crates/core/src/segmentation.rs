//! Greedy division of a triangle mesh into pseudo-convex and pseudo-concave
//! parts.
//!
//! Two triangles are positively oriented when each lies in the closed
//! negative half-space of the other's plane, and negatively oriented when
//! each lies in the closed positive half-space of the other's. A part is
//! pseudo-convex when all its pairs are positively oriented and
//! pseudo-concave when all are negatively oriented.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geom::{GeomError, Vec3, DEFAULT_EPS_AREA};
use crate::mesh_io::TriangleMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentationError {
    #[error("mesh has {0} non-manifold edges")]
    NonManifold(usize),
    #[error("mesh orientation is inconsistent across {0} edges")]
    InconsistentOrientation(usize),
    #[error("triangle {triangle}: {source}")]
    DegenerateTriangle { triangle: usize, source: GeomError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutualOrientation {
    Positive,
    Negative,
    /// Neither condition holds.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartKind {
    PseudoConvex,
    PseudoConcave,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshPart {
    pub kind: PartKind,
    /// Triangle indices in admission order.
    pub triangles: Vec<usize>,
}

// Cached triangle planes for the six-vertex tests.
struct Orienter<'a> {
    mesh: &'a TriangleMesh,
    planes: Vec<Plane>,
    eps: f64,
}

impl<'a> Orienter<'a> {
    fn new(mesh: &'a TriangleMesh, eps: f64) -> Result<Self, SegmentationError> {
        let planes = (0..mesh.triangle_count())
            .map(|t| {
                mesh.triangle_plane(t, DEFAULT_EPS_AREA).map_err(|source| {
                    SegmentationError::DegenerateTriangle {
                        triangle: t,
                        source,
                    }
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Orienter { mesh, planes, eps })
    }

    fn positive(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (self.planes[a], self.planes[b]);
        pair_positive(self.mesh, (a, pa), (b, pb), self.eps)
    }

    fn negative(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (self.planes[a], self.planes[b]);
        pair_negative(self.mesh, (a, pa), (b, pb), self.eps)
    }

    fn holds(&self, kind: PartKind, a: usize, b: usize) -> bool {
        match kind {
            PartKind::PseudoConvex => self.positive(a, b),
            PartKind::PseudoConcave => self.negative(a, b),
        }
    }

    // The pair satisfies the kind's condition and not the opposite one, so
    // coplanar pairs never seed a part.
    fn strict(&self, kind: PartKind, a: usize, b: usize) -> bool {
        match kind {
            PartKind::PseudoConvex => self.positive(a, b) && !self.negative(a, b),
            PartKind::PseudoConcave => self.negative(a, b) && !self.positive(a, b),
        }
    }
}

type Plane = (Vec3, f64);

// Largest and smallest signed distance of triangle `t`'s vertices to `plane`.
fn range(mesh: &TriangleMesh, t: usize, (n, h): Plane) -> (f64, f64) {
    mesh.triangle_points(t)
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), p| {
            let d = n.dot(*p) - h;
            (hi.max(d), lo.min(d))
        })
}

fn pair_positive(mesh: &TriangleMesh, a: (usize, Plane), b: (usize, Plane), eps: f64) -> bool {
    range(mesh, a.0, b.1).0 <= eps && range(mesh, b.0, a.1).0 <= eps
}

fn pair_negative(mesh: &TriangleMesh, a: (usize, Plane), b: (usize, Plane), eps: f64) -> bool {
    range(mesh, a.0, b.1).1 >= -eps && range(mesh, b.0, a.1).1 >= -eps
}

fn plane_of(mesh: &TriangleMesh, t: usize) -> Result<(usize, Plane), SegmentationError> {
    mesh.triangle_plane(t, DEFAULT_EPS_AREA)
        .map(|p| (t, p))
        .map_err(|source| SegmentationError::DegenerateTriangle {
            triangle: t,
            source,
        })
}

/// Whether every vertex of each triangle is in the closed negative
/// half-space (`ω·p − h ≤ eps`) of the other's plane.
pub fn is_positively_oriented(
    mesh: &TriangleMesh,
    t1: usize,
    t2: usize,
    eps: f64,
) -> Result<bool, SegmentationError> {
    Ok(pair_positive(
        mesh,
        plane_of(mesh, t1)?,
        plane_of(mesh, t2)?,
        eps,
    ))
}

/// Whether every vertex of each triangle is in the closed positive
/// half-space (`ω·p − h ≥ −eps`) of the other's plane.
pub fn is_negatively_oriented(
    mesh: &TriangleMesh,
    t1: usize,
    t2: usize,
    eps: f64,
) -> Result<bool, SegmentationError> {
    Ok(pair_negative(
        mesh,
        plane_of(mesh, t1)?,
        plane_of(mesh, t2)?,
        eps,
    ))
}

/// Classifies a triangle pair. Coplanar pairs satisfy both conditions and
/// are reported as `Positive`.
pub fn mutual_orientation(
    mesh: &TriangleMesh,
    t1: usize,
    t2: usize,
    eps: f64,
) -> Result<MutualOrientation, SegmentationError> {
    let (a, b) = (plane_of(mesh, t1)?, plane_of(mesh, t2)?);
    Ok(if pair_positive(mesh, a, b, eps) {
        MutualOrientation::Positive
    } else if pair_negative(mesh, a, b, eps) {
        MutualOrientation::Negative
    } else {
        MutualOrientation::Mixed
    })
}

/// Splits the mesh into parts.
///
/// Pseudo-convex parts are grown first, then pseudo-concave ones. A part is
/// seeded at the lowest-index free triangle that has a free edge neighbour
/// forming a strict pair of the wanted kind, and grows breadth-first over
/// edge neighbours; a candidate joins only if it satisfies the condition
/// with every current member. Triangles left over are grouped the same way
/// as pseudo-convex parts without the seed requirement, so isolated
/// triangles become singleton parts.
pub fn segment_mesh(mesh: &TriangleMesh, eps: f64) -> Result<Vec<MeshPart>, SegmentationError> {
    let topo = mesh.topology();
    if topo.non_manifold_edges > 0 {
        return Err(SegmentationError::NonManifold(topo.non_manifold_edges));
    }
    if topo.inconsistent_edges > 0 {
        return Err(SegmentationError::InconsistentOrientation(
            topo.inconsistent_edges,
        ));
    }
    let o = Orienter::new(mesh, eps)?;
    let n = mesh.triangle_count();
    let mut assigned = vec![false; n];
    let mut parts = Vec::new();

    for kind in [PartKind::PseudoConvex, PartKind::PseudoConcave] {
        while let Some(seed) = (0..n).find(|&t| {
            !assigned[t]
                && mesh.neighbors()[t]
                    .iter()
                    .flatten()
                    .any(|&u| !assigned[u] && o.strict(kind, t, u))
        }) {
            parts.push(grow(&o, kind, seed, &mut assigned));
        }
    }
    while let Some(seed) = (0..n).find(|&t| !assigned[t]) {
        parts.push(grow(&o, PartKind::PseudoConvex, seed, &mut assigned));
    }
    Ok(parts)
}

fn grow(o: &Orienter<'_>, kind: PartKind, seed: usize, assigned: &mut [bool]) -> MeshPart {
    let mesh = o.mesh;
    let mut members = vec![seed];
    assigned[seed] = true;
    let mut rejected = vec![false; assigned.len()];
    let mut queue = VecDeque::from([seed]);
    while let Some(t) = queue.pop_front() {
        let mut next: Vec<usize> = mesh.neighbors()[t].iter().flatten().copied().collect();
        next.sort_unstable();
        for c in next {
            if assigned[c] || rejected[c] {
                continue;
            }
            if members.iter().all(|&m| o.holds(kind, c, m)) {
                assigned[c] = true;
                members.push(c);
                queue.push_back(c);
            } else {
                rejected[c] = true;
            }
        }
    }
    MeshPart {
        kind,
        triangles: members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{pocketed_block, regular_tetrahedron, unit_cube};

    #[test]
    fn coplanar_pair_is_positive() {
        let cube = unit_cube();
        assert_eq!(
            mutual_orientation(&cube, 0, 1, 1e-9),
            Ok(MutualOrientation::Positive)
        );
        assert!(is_negatively_oriented(&cube, 0, 1, 1e-9).unwrap());
    }

    #[test]
    fn tetrahedron_faces_positive() {
        let t = regular_tetrahedron();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(
                    mutual_orientation(&t, a, b, 1e-9),
                    Ok(MutualOrientation::Positive)
                );
            }
        }
    }

    #[test]
    fn valley_is_negative() {
        // two roof triangles meeting along a reflex edge on the x axis
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 1.0, 1.0),
            Vec3::new(0.5, -1.0, 1.0),
        ];
        let m = TriangleMesh::from_triangles(v, vec![[0, 1, 2], [1, 0, 3]]).unwrap();
        let (n0, _) = m.triangle_plane(0, 0.0).unwrap();
        assert!(n0.z > 0.0);
        assert_eq!(
            mutual_orientation(&m, 0, 1, 1e-9),
            Ok(MutualOrientation::Negative)
        );
    }

    #[test]
    fn cube_is_one_convex_part() {
        let parts = segment_mesh(&unit_cube(), 1e-9).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].kind, PartKind::PseudoConvex);
        assert_eq!(parts[0].triangles.len(), 12);
    }

    #[test]
    fn pocketed_block_splits_into_shell_and_pocket() {
        let parts = segment_mesh(&pocketed_block(), 1e-9).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].kind, PartKind::PseudoConvex);
        assert_eq!(parts[1].kind, PartKind::PseudoConcave);
        let mut shell = parts[0].triangles.clone();
        shell.sort_unstable();
        assert_eq!(shell, (0..18).collect::<Vec<_>>());
        assert_eq!(parts[1].triangles.len(), 10);
    }
}
