//! Half-space intersection by plane-triple enumeration.

use std::collections::HashMap;

use super::{ConvexError, ConvexPolyhedron, PlaneSet};
use crate::geom::Vec3;

/// Plane triples whose normal matrix exceeds this condition estimate are skipped.
pub const CONDITION_LIMIT: f64 = 1e8;

const DEGENERATE: f64 = 1e13;
const SOLVE_ROUNDING: f64 = 1e-15;
const MERGE_REL: f64 = 1e-7;
const RECESSION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPolyhedron {
    pub polyhedron: ConvexPolyhedron,
    /// Planes that bound no face: redundant half-spaces and repeated planes.
    pub redundant_planes: Vec<usize>,
}

/// Rebuilds the polyhedron `∩ {x : ω_i·x ≤ h_i + eps}`.
///
/// Every plane triple is solved; solutions inside all half-spaces (within
/// `eps`, widened by the solve's own rounding error) are vertices, merged
/// when closer than `max(1e-7 × diagonal, eps)`. A vertex is incident to the
/// planes of the triples that produced it, and each plane with at least
/// three incident, non-collinear vertices yields a face.
///
/// Triples with condition estimate above [`CONDITION_LIMIT`] are not
/// trusted. If such a triple yields a feasible point that no trusted vertex
/// accounts for, the code is rejected with `IllConditioned` rather than
/// decoded without that vertex.
pub fn decode_convex(code: &PlaneSet, eps: f64) -> Result<DecodedPolyhedron, ConvexError> {
    let normals: Vec<Vec3> = code.iter().map(|p| p.normal()).collect();
    let offsets: Vec<f64> = code.iter().map(|p| p.h()).collect();
    if normals.len() < 4 || !is_bounded(&normals) {
        return Err(ConvexError::UnboundedRegion);
    }

    let n = normals.len();
    let scale = offsets.iter().fold(1.0f64, |s, h| s.max(h.abs()));
    let mut candidates = Vec::new();
    let mut doubtful: Vec<(Vec3, f64, [usize; 3])> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let cij = normals[i].cross(normals[j]);
            if cij.norm_squared() == 0.0 {
                continue;
            }
            for k in j + 1..n {
                let cjk = normals[j].cross(normals[k]);
                let cki = normals[k].cross(normals[i]);
                let det = normals[i].dot(cjk);
                if det == 0.0 {
                    continue;
                }
                let inv_frob =
                    (cjk.norm_squared() + cki.norm_squared() + cij.norm_squared()).sqrt();
                let cond = 3f64.sqrt() * inv_frob / det.abs();
                // beyond DEGENERATE the triple is singular up to rounding
                if cond > DEGENERATE {
                    continue;
                }
                let solve = |a: f64, b: f64, c: f64| (cjk * a + cki * b + cij * c) / det;
                let mut x = solve(offsets[i], offsets[j], offsets[k]);
                // Cramer's rule alone is not backward stable; one refinement
                // step brings the error down to about cond × rounding
                let r = |m: usize, x: Vec3| offsets[m] - normals[m].dot(x);
                x += solve(r(i, x), r(j, x), r(k, x));
                if !x.is_finite() {
                    continue;
                }
                // the solve itself is only accurate to about cond × rounding
                let error = cond * SOLVE_ROUNDING * scale;
                let feasible = (0..n).all(|m| normals[m].dot(x) - offsets[m] <= eps + error);
                if !feasible {
                    continue;
                }
                if cond > CONDITION_LIMIT {
                    doubtful.push((x, error, [i, j, k]));
                } else {
                    candidates.push((x, [i, j, k]));
                }
            }
        }
    }
    let degenerate = || {
        if doubtful.is_empty() {
            ConvexError::EmptyRegion
        } else {
            ConvexError::IllConditioned
        }
    };
    if candidates.is_empty() {
        return Err(degenerate());
    }

    let points: Vec<Vec3> = candidates.iter().map(|c| c.0).collect();
    let diag = crate::geom::bbox_diagonal(&points);
    let merge_tol = (MERGE_REL * diag).max(eps);
    let (merged, owner) = merge_points(&points, merge_tol);
    let mut order: Vec<usize> = (0..merged.len()).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (merged[a], merged[b]);
        a.x.total_cmp(&b.x)
            .then(a.y.total_cmp(&b.y))
            .then(a.z.total_cmp(&b.z))
    });
    let mut rank = vec![0; merged.len()];
    for (r, &m) in order.iter().enumerate() {
        rank[m] = r;
    }
    let vertices: Vec<Vec3> = order.iter().map(|&m| merged[m]).collect();
    if !has_interior(&vertices, merge_tol) {
        return Err(degenerate());
    }
    // A vertex lies on exactly the planes of the triples that produced it.
    let mut on_plane = vec![vec![false; vertices.len()]; n];
    for (c, (_, triple)) in candidates.iter().enumerate() {
        for &p in triple {
            on_plane[p][rank[owner[c]]] = true;
        }
    }
    for &(x, error, triple) in &doubtful {
        let nearest = (0..vertices.len())
            .min_by(|&a, &b| vertices[a].distance(x).total_cmp(&vertices[b].distance(x)));
        let Some(v) = nearest else { continue };
        let d = vertices[v].distance(x);
        if d <= merge_tol {
            for p in triple {
                on_plane[p][v] = true;
            }
        } else if d > error {
            // a vertex only an ill-conditioned triple can locate
            return Err(ConvexError::IllConditioned);
        }
    }

    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut face_planes = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut redundant = Vec::new();
    for p in 0..n {
        let incident: Vec<usize> = (0..vertices.len()).filter(|&v| on_plane[p][v]).collect();
        let ring = match order_ring(&vertices, &incident, normals[p], merge_tol * diag.max(1.0)) {
            Some(r) => r,
            None => {
                redundant.push(p);
                continue;
            }
        };
        let mut key = ring.clone();
        key.sort_unstable();
        if seen.contains(&key) {
            redundant.push(p);
            continue;
        }
        seen.push(key);
        faces.push(ring);
        face_planes.push(p);
    }

    Ok(DecodedPolyhedron {
        polyhedron: ConvexPolyhedron {
            vertices,
            faces,
            face_planes,
        },
        redundant_planes: redundant,
    })
}

/// True when no nonzero direction `d` satisfies `ω_i·d ≤ 0` for every normal.
fn is_bounded(normals: &[Vec3]) -> bool {
    // rank 3 is necessary; otherwise the region contains a line
    let n0 = normals[0];
    let (i1, c01) = normals
        .iter()
        .enumerate()
        .map(|(i, m)| (i, n0.cross(*m)))
        .max_by(|a, b| a.1.norm_squared().total_cmp(&b.1.norm_squared()))
        .unwrap();
    let _ = i1;
    if c01.norm() <= RECESSION_TOL {
        return false;
    }
    let best = normals
        .iter()
        .map(|m| c01.dot(*m).abs())
        .fold(0.0, f64::max);
    if best <= RECESSION_TOL * c01.norm() {
        return false;
    }
    // With full rank the recession cone is pointed; any nonzero cone has an
    // extreme ray along some ω_i × ω_j.
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let Some(d) = normals[i].cross(normals[j]).normalized() else {
                continue;
            };
            if d.norm_squared() < 0.5 {
                continue;
            }
            for d in [d, -d] {
                if normals.iter().all(|m| m.dot(d) <= RECESSION_TOL) {
                    return false;
                }
            }
        }
    }
    true
}

// Merged points, and for each input point the index of its merged point.
fn merge_points(points: &[Vec3], tol: f64) -> (Vec<Vec3>, Vec<usize>) {
    let cell = |p: Vec3| {
        if tol > 0.0 {
            (
                (p.x / tol).floor() as i64,
                (p.y / tol).floor() as i64,
                (p.z / tol).floor() as i64,
            )
        } else {
            (
                p.x.to_bits() as i64,
                p.y.to_bits() as i64,
                p.z.to_bits() as i64,
            )
        }
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut reps: Vec<Vec3> = Vec::new();
    let mut sums: Vec<(Vec3, usize)> = Vec::new();
    let mut owner = Vec::with_capacity(points.len());
    for &p in points {
        let c = cell(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&(c.0 + dx, c.1 + dy, c.2 + dz)) {
                        for &r in list {
                            if reps[r].distance(p) <= tol {
                                found = Some(r);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        match found {
            Some(r) => {
                sums[r].0 += p;
                sums[r].1 += 1;
                owner.push(r);
            }
            None => {
                grid.entry(c).or_default().push(reps.len());
                owner.push(reps.len());
                reps.push(p);
                sums.push((p, 1));
            }
        }
    }
    let merged = sums.into_iter().map(|(s, k)| s / k as f64).collect();
    (merged, owner)
}

fn has_interior(points: &[Vec3], tol: f64) -> bool {
    if points.len() < 4 {
        return false;
    }
    let p0 = points[0];
    let far = |f: &dyn Fn(Vec3) -> f64| {
        points
            .iter()
            .copied()
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap()
    };
    let p1 = far(&|p| p.distance(p0));
    let axis = match (p1 - p0).normalized() {
        Some(a) => a,
        None => return false,
    };
    let off_line = |p: Vec3| (p - p0).cross(axis).norm();
    let p2 = far(&off_line);
    if off_line(p2) <= tol {
        return false;
    }
    let Some(normal) = axis.cross(p2 - p0).normalized() else {
        return false;
    };
    points.iter().any(|p| normal.dot(*p - p0).abs() > tol)
}

/// Counterclockwise ring (seen from the tip of `normal`) of the given
/// coplanar points, or `None` when they do not span a polygon.
fn order_ring(vertices: &[Vec3], idx: &[usize], normal: Vec3, min_area: f64) -> Option<Vec<usize>> {
    if idx.len() < 3 {
        return None;
    }
    let c = idx.iter().fold(Vec3::ZERO, |s, &i| s + vertices[i]) / idx.len() as f64;
    let far = idx.iter().copied().max_by(|a, b| {
        vertices[*a]
            .distance(c)
            .total_cmp(&vertices[*b].distance(c))
    })?;
    let u = (vertices[far] - c - normal * normal.dot(vertices[far] - c)).normalized()?;
    let w = normal.cross(u);
    let mut keyed: Vec<(f64, usize)> = idx
        .iter()
        .map(|&i| {
            let d = vertices[i] - c;
            (w.dot(d).atan2(u.dot(d)), i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let ring: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
    let area = super::polygon_area_vector(vertices, &ring).dot(normal) * 0.5;
    (area > min_area).then_some(ring)
}
