//! Plane coding of convex polyhedra.
//!
//! A closed convex polyhedron equals the intersection of the closed negative
//! half-spaces of its outward face planes, so the list of face planes is a
//! complete code for it. [`encode_convex`] extracts that list from a
//! triangulated surface and [`decode_convex`] rebuilds vertices and faces by
//! half-space intersection. Rigid motions act on the code directly:
//! translating by `a` maps `(ω, h)` to `(ω, h + ω·a)`, and a rotation about
//! the origin maps it to `(Rω, h)`.

mod decode;

use std::cmp::Ordering;

use thiserror::Error;

use crate::geom::{spherical_from_unit_vector, GeomError, OrientedPlane, Vec3, DEFAULT_EPS_AREA};
use crate::mesh_io::TriangleMesh;

pub use decode::{decode_convex, DecodedPolyhedron, CONDITION_LIMIT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexError {
    #[error(
        "mesh is not convex: vertex {vertex} lies {distance:e} in front of triangle {triangle}"
    )]
    NotConvex {
        vertex: usize,
        triangle: usize,
        distance: f64,
    },
    #[error("mesh is not closed ({boundary_edges} boundary edges)")]
    NotClosed { boundary_edges: usize },
    #[error("mesh has {0} non-manifold edges")]
    NonManifold(usize),
    #[error("mesh orientation is inconsistent across {0} edges")]
    InconsistentOrientation(usize),
    #[error("triangle {triangle}: {source}")]
    DegenerateTriangle { triangle: usize, source: GeomError },
    #[error("half-space intersection is unbounded")]
    UnboundedRegion,
    #[error("half-space intersection is empty or has no interior")]
    EmptyRegion,
    #[error("half-space intersection needs ill-conditioned plane triples")]
    IllConditioned,
    #[error("matrix is not a proper rotation")]
    NotARotation,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Ordered list of oriented planes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlaneSet {
    planes: Vec<OrientedPlane>,
}

impl PlaneSet {
    pub fn new(planes: Vec<OrientedPlane>) -> Self {
        PlaneSet { planes }
    }

    pub fn planes(&self) -> &[OrientedPlane] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<OrientedPlane> {
        self.planes
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OrientedPlane> {
        self.planes.iter()
    }

    pub fn push(&mut self, p: OrientedPlane) {
        self.planes.push(p);
    }

    /// Index of the first plane equal to `p` within the given tolerances.
    pub fn position_of(&self, p: &OrientedPlane, angle_tol: f64, h_tol: f64) -> Option<usize> {
        self.planes
            .iter()
            .position(|q| planes_coincide(p, q, angle_tol, h_tol))
    }

    /// Indices `(i, j)`, `i < j`, of planes that coincide within tolerance.
    pub fn duplicates(&self, angle_tol: f64, h_tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.planes.len() {
            for j in i + 1..self.planes.len() {
                if planes_coincide(&self.planes[i], &self.planes[j], angle_tol, h_tol) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Sorted by `(ν, φ, h)`, compared at single precision first so that
    /// values that serialize identically sort identically.
    pub fn canonical(mut self) -> Self {
        self.planes.sort_by(canonical_cmp);
        self
    }
}

impl FromIterator<OrientedPlane> for PlaneSet {
    fn from_iter<I: IntoIterator<Item = OrientedPlane>>(iter: I) -> Self {
        PlaneSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PlaneSet {
    type Item = &'a OrientedPlane;
    type IntoIter = std::slice::Iter<'a, OrientedPlane>;
    fn into_iter(self) -> Self::IntoIter {
        self.planes.iter()
    }
}

pub fn planes_coincide(a: &OrientedPlane, b: &OrientedPlane, angle_tol: f64, h_tol: f64) -> bool {
    a.angle_to(b) <= angle_tol && (a.h() - b.h()).abs() <= h_tol
}

fn canonical_cmp(a: &OrientedPlane, b: &OrientedPlane) -> Ordering {
    let key = |p: &OrientedPlane| {
        [
            p.direction().nu() as f32,
            p.direction().phi() as f32,
            p.h() as f32,
        ]
    };
    let (ka, kb) = (key(a), key(b));
    for i in 0..3 {
        let o = ka[i].total_cmp(&kb[i]);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.direction()
        .nu()
        .total_cmp(&b.direction().nu())
        .then(a.direction().phi().total_cmp(&b.direction().phi()))
        .then(a.h().total_cmp(&b.h()))
}

/// A bounded convex polyhedron with planar faces.
///
/// Face rings run counterclockwise seen from outside; `face_planes[f]` is the
/// index of the code plane that carries face `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolyhedron {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
    pub face_planes: Vec<usize>,
}

impl ConvexPolyhedron {
    pub fn face_area(&self, f: usize) -> f64 {
        polygon_area_vector(&self.vertices, &self.faces[f]).norm() * 0.5
    }

    /// Area-weighted centroid of face `f`.
    pub fn face_centroid(&self, f: usize) -> Vec3 {
        polygon_centroid(&self.vertices, &self.faces[f])
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn volume(&self) -> f64 {
        let mut v = 0.0;
        for ring in &self.faces {
            let a = self.vertices[ring[0]];
            for k in 1..ring.len() - 1 {
                let (b, c) = (self.vertices[ring[k]], self.vertices[ring[k + 1]]);
                v += a.dot(b.cross(c));
            }
        }
        v / 6.0
    }

    /// Fan-triangulated surface; faces become source polygons.
    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh::from_polygons(self.vertices.clone(), &self.faces)
            .expect("decoded faces index valid vertices")
    }

    /// Face index carried by code plane `plane`, if that plane has a face.
    pub fn face_of_plane(&self, plane: usize) -> Option<usize> {
        self.face_planes.iter().position(|&p| p == plane)
    }
}

/// Twice the vector area of a polygon ring.
pub(crate) fn polygon_area_vector(vertices: &[Vec3], ring: &[usize]) -> Vec3 {
    let mut acc = Vec3::ZERO;
    let a = vertices[ring[0]];
    for k in 1..ring.len() - 1 {
        acc += (vertices[ring[k]] - a).cross(vertices[ring[k + 1]] - a);
    }
    acc
}

pub(crate) fn polygon_centroid(vertices: &[Vec3], ring: &[usize]) -> Vec3 {
    let a = vertices[ring[0]];
    let mut weighted = Vec3::ZERO;
    let mut total = 0.0;
    for k in 1..ring.len() - 1 {
        let (b, c) = (vertices[ring[k]], vertices[ring[k + 1]]);
        let w = (b - a).cross(c - a).norm();
        weighted += (a + b + c) * (w / 3.0);
        total += w;
    }
    if total > 0.0 {
        weighted / total
    } else {
        ring.iter().fold(Vec3::ZERO, |s, &i| s + vertices[i]) / ring.len() as f64
    }
}

/// Proper rotation about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Accepts `m` if `mᵀm = I` and `det m = 1`, both within 1e-9.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self, ConvexError> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ConvexError::NotARotation);
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-9 {
                    return Err(ConvexError::NotARotation);
                }
            }
        }
        let det = Vec3::from(m[0]).dot(Vec3::from(m[1]).cross(Vec3::from(m[2])));
        if (det - 1.0).abs() > 1e-9 {
            return Err(ConvexError::NotARotation);
        }
        Ok(Rotation { m })
    }

    /// Right-handed rotation by `angle` radians about `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, ConvexError> {
        let k = axis.normalized().ok_or(ConvexError::NotARotation)?;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let m = [
            [
                t * k.x * k.x + c,
                t * k.x * k.y - s * k.z,
                t * k.x * k.z + s * k.y,
            ],
            [
                t * k.x * k.y + s * k.z,
                t * k.y * k.y + c,
                t * k.y * k.z - s * k.x,
            ],
            [
                t * k.x * k.z - s * k.y,
                t * k.y * k.z + s * k.x,
                t * k.z * k.z + c,
            ],
        ];
        Rotation::new(m)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let r = |i: usize| self.m[i][0] * v.x + self.m[i][1] * v.y + self.m[i][2] * v.z;
        Vec3::new(r(0), r(1), r(2))
    }

    pub fn inverse(&self) -> Rotation {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        Rotation { m: t }
    }
}

/// `(ω, h) ↦ (ω, h + ω·a)` for every plane, order preserved.
pub fn translate_planes(code: &PlaneSet, a: Vec3) -> PlaneSet {
    code.iter()
        .map(|p| {
            OrientedPlane::new(p.direction(), p.h() + p.normal().dot(a))
                .expect("finite translation keeps h finite")
        })
        .collect()
}

/// `(ω, h) ↦ (Rω, h)` for every plane, order preserved.
pub fn rotate_planes(code: &PlaneSet, r: &Rotation) -> PlaneSet {
    code.iter()
        .map(|p| {
            let w = r.apply(p.normal());
            let w = w.normalized().unwrap_or(w);
            OrientedPlane::new(
                spherical_from_unit_vector(w).expect("rotated unit vector"),
                p.h(),
            )
            .expect("h unchanged")
        })
        .collect()
}

/// Checks that `mesh` is a closed, consistently oriented 2-manifold.
pub(crate) fn require_closed(mesh: &TriangleMesh) -> Result<(), ConvexError> {
    let topo = mesh.topology();
    if topo.non_manifold_edges > 0 {
        return Err(ConvexError::NonManifold(topo.non_manifold_edges));
    }
    if topo.boundary_edges > 0 || mesh.triangle_count() == 0 {
        return Err(ConvexError::NotClosed {
            boundary_edges: topo.boundary_edges,
        });
    }
    if topo.inconsistent_edges > 0 {
        return Err(ConvexError::InconsistentOrientation(
            topo.inconsistent_edges,
        ));
    }
    Ok(())
}

/// Per-triangle `(ω, h)` for every triangle of the mesh.
pub(crate) fn triangle_planes(mesh: &TriangleMesh) -> Result<Vec<(Vec3, f64)>, ConvexError> {
    (0..mesh.triangle_count())
        .map(|t| {
            mesh.triangle_plane(t, DEFAULT_EPS_AREA).map_err(|source| {
                ConvexError::DegenerateTriangle {
                    triangle: t,
                    source,
                }
            })
        })
        .collect()
}

/// Whether adjacent triangles `t` and `u` lie in the same oriented plane.
pub(crate) fn triangles_coplanar(
    mesh: &TriangleMesh,
    planes: &[(Vec3, f64)],
    t: usize,
    u: usize,
    eps: f64,
) -> bool {
    let (nt, ht) = planes[t];
    let (nu, hu) = planes[u];
    if nt.dot(nu) <= 0.0 {
        return false;
    }
    mesh.triangle_points(u)
        .iter()
        .all(|p| (nt.dot(*p) - ht).abs() <= eps)
        && mesh
            .triangle_points(t)
            .iter()
            .all(|p| (nu.dot(*p) - hu).abs() <= eps)
}

/// Groups triangles into edge-connected coplanar classes; groups are ordered
/// by their lowest triangle index and list triangles in ascending order.
pub(crate) fn coplanar_groups(
    mesh: &TriangleMesh,
    planes: &[(Vec3, f64)],
    members: &[usize],
    eps: f64,
) -> Vec<Vec<usize>> {
    let mut in_set = vec![false; mesh.triangle_count()];
    for &t in members {
        in_set[t] = true;
    }
    let mut group_of = vec![usize::MAX; mesh.triangle_count()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for &seed in &sorted {
        if group_of[seed] != usize::MAX {
            continue;
        }
        let g = groups.len();
        group_of[seed] = g;
        let mut stack = vec![seed];
        let mut group = Vec::new();
        while let Some(t) = stack.pop() {
            group.push(t);
            for u in mesh.neighbors()[t].iter().flatten() {
                if in_set[*u]
                    && group_of[*u] == usize::MAX
                    && triangles_coplanar(mesh, planes, t, *u, eps)
                {
                    group_of[*u] = g;
                    stack.push(*u);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

/// Plane of a group of coplanar triangles: area-weighted normal, offset
/// averaged over the group's distinct vertices.
pub(crate) fn fit_group_plane(
    mesh: &TriangleMesh,
    group: &[usize],
) -> Result<(Vec3, f64), ConvexError> {
    let mut area = Vec3::ZERO;
    let mut verts: Vec<usize> = Vec::new();
    for &t in group {
        let [a, b, c] = mesh.triangle_points(t);
        area += (b - a).cross(c - b);
        verts.extend_from_slice(&mesh.triangles()[t]);
    }
    verts.sort_unstable();
    verts.dedup();
    let n = area.normalized().ok_or(ConvexError::DegenerateTriangle {
        triangle: group[0],
        source: GeomError::DegenerateTriangle {
            cross_norm: area.norm(),
            eps_area: 0.0,
        },
    })?;
    let h = verts
        .iter()
        .map(|&v| n.dot(mesh.vertices()[v]))
        .sum::<f64>()
        / verts.len() as f64;
    Ok((n, h))
}

/// Plane code of a closed convex triangle mesh: one plane per maximal
/// coplanar face, in canonical order.
///
/// `eps` is the absolute tolerance for the convexity and coplanarity tests
/// (typically `1e-7 ×` the bounding-box diagonal).
pub fn encode_convex(mesh: &TriangleMesh, eps: f64) -> Result<PlaneSet, ConvexError> {
    require_closed(mesh)?;
    let planes = triangle_planes(mesh)?;

    let mut used = vec![false; mesh.vertex_count()];
    for tri in mesh.triangles() {
        for &v in tri {
            used[v] = true;
        }
    }
    for (t, (n, h)) in planes.iter().enumerate() {
        for (v, p) in mesh.vertices().iter().enumerate() {
            if !used[v] {
                continue;
            }
            let d = n.dot(*p) - h;
            if d > eps {
                return Err(ConvexError::NotConvex {
                    vertex: v,
                    triangle: t,
                    distance: d,
                });
            }
        }
    }

    let all: Vec<usize> = (0..mesh.triangle_count()).collect();
    let mut code = PlaneSet::default();
    for group in coplanar_groups(mesh, &planes, &all, eps) {
        let (n, h) = fit_group_plane(mesh, &group)?;
        let plane = OrientedPlane::from_normal(n, h)?;
        if code.position_of(&plane, 1e-9, eps).is_none() {
            code.push(plane);
        }
    }
    Ok(code.canonical())
}

/// Tolerance scale of a plane code: the largest `|h|`, at least 1.
pub fn code_scale(code: &PlaneSet) -> f64 {
    code.iter().map(|p| p.h().abs()).fold(1.0, f64::max)
}
