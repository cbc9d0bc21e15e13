//! Indexed triangle meshes, OBJ/STL parsing and emission, and byte accounting.

mod accounting;
mod obj;
mod stl;

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{bbox_diagonal, triangle_normal_and_offset, GeomError, Vec3};

pub use accounting::{
    storage_report, StorageReport, BYTES_PER_PLANE, BYTES_PER_QUAD, BYTES_PER_TRIANGLE,
    BYTES_PER_VERTEX,
};
pub use obj::{emit_obj, parse_obj};
pub use stl::{emit_stl_ascii, emit_stl_binary, parse_stl_ascii, parse_stl_binary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshIoError {
    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },
    #[error("unsupported feature at line {line}: {feature}")]
    UnsupportedFeature { line: usize, feature: String },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
}

impl MeshIoError {
    pub(crate) fn at_line(line: usize, message: impl Into<String>) -> Self {
        MeshIoError::ParseError {
            location: format!("line {line}"),
            message: message.into(),
        }
    }

    pub(crate) fn at_offset(offset: usize, message: impl Into<String>) -> Self {
        MeshIoError::ParseError {
            location: format!("byte offset {offset}"),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    StlAscii,
    StlBinary,
}

impl MeshFormat {
    /// Guesses the format from a file extension and, for STL, the content.
    pub fn detect(path: &str, bytes: &[u8]) -> Option<MeshFormat> {
        let lower = path.to_ascii_lowercase();
        if lower.ends_with(".obj") {
            return Some(MeshFormat::Obj);
        }
        if lower.ends_with(".stl") {
            if bytes.len() >= 84 {
                let n = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as u64;
                if 84 + 50 * n == bytes.len() as u64 {
                    return Some(MeshFormat::StlBinary);
                }
            }
            let head = &bytes[..bytes.len().min(512)];
            let text = String::from_utf8_lossy(head);
            if text.trim_start().starts_with("solid") {
                return Some(MeshFormat::StlAscii);
            }
            return Some(MeshFormat::StlBinary);
        }
        None
    }
}

pub fn load_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriangleMesh, MeshIoError> {
    match format {
        MeshFormat::Obj => parse_obj(bytes),
        MeshFormat::StlAscii => parse_stl_ascii(bytes),
        MeshFormat::StlBinary => parse_stl_binary(bytes),
    }
}

/// Edge-level topology summary of a triangle mesh.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Topology {
    /// Undirected edges used by exactly one triangle.
    pub boundary_edges: usize,
    /// Undirected edges used by more than two triangles.
    pub non_manifold_edges: usize,
    /// Edges shared by two triangles that traverse them in the same direction.
    pub inconsistent_edges: usize,
}

impl Topology {
    pub fn is_closed_manifold(&self) -> bool {
        *self == Topology::default()
    }
}

/// Indexed triangle mesh.
///
/// Triangles come from polygons fan-triangulated in order: polygon `k` of
/// size `s` owns the next `s − 2` triangles. `neighbors[t][k]` is the triangle
/// across edge `k` (from corner `k` to corner `k + 1`) of triangle `t`, when
/// that edge is shared by exactly two triangles.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    polygon_sizes: Vec<usize>,
    neighbors: Vec<[Option<usize>; 3]>,
    topology: Topology,
}

impl PartialEq for TriangleMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.polygon_sizes == other.polygon_sizes
    }
}

impl TriangleMesh {
    pub fn from_triangles(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, MeshIoError> {
        let sizes = vec![3; triangles.len()];
        Self::build(vertices, triangles, sizes)
    }

    /// Fan-triangulates each polygon `[a, b, c, d, ..]` into `(a, b, c), (a, c, d), ..`.
    pub fn from_polygons(
        vertices: Vec<Vec3>,
        polygons: &[Vec<usize>],
    ) -> Result<Self, MeshIoError> {
        let mut triangles = Vec::new();
        let mut sizes = Vec::with_capacity(polygons.len());
        for (k, poly) in polygons.iter().enumerate() {
            if poly.len() < 3 {
                return Err(MeshIoError::InvalidMesh(format!(
                    "polygon {k} has {} vertices",
                    poly.len()
                )));
            }
            for i in 1..poly.len() - 1 {
                triangles.push([poly[0], poly[i], poly[i + 1]]);
            }
            sizes.push(poly.len());
        }
        Self::build(vertices, triangles, sizes)
    }

    fn build(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        polygon_sizes: Vec<usize>,
    ) -> Result<Self, MeshIoError> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshIoError::InvalidMesh(format!(
                "vertex {i} is not finite"
            )));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(MeshIoError::InvalidMesh(format!(
                    "triangle {t} references a vertex out of range"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshIoError::InvalidMesh(format!(
                    "triangle {t} repeats a vertex index"
                )));
            }
        }
        let (neighbors, topology) = build_adjacency(&triangles);
        Ok(TriangleMesh {
            vertices,
            triangles,
            polygon_sizes,
            neighbors,
            topology,
        })
    }

    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            polygon_sizes: Vec::new(),
            neighbors: Vec::new(),
            topology: Topology::default(),
        }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Vertex counts of the source polygons, in order.
    pub fn polygon_sizes(&self) -> &[usize] {
        &self.polygon_sizes
    }

    /// Source polygons reconstructed from their fans.
    pub fn polygons(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.polygon_sizes.len());
        let mut t = 0;
        for &s in &self.polygon_sizes {
            let first = self.triangles[t];
            let mut poly = vec![first[0], first[1], first[2]];
            for k in 1..s - 2 {
                poly.push(self.triangles[t + k][2]);
            }
            t += s - 2;
            out.push(poly);
        }
        out
    }

    pub fn neighbors(&self) -> &[[Option<usize>; 3]] {
        &self.neighbors
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unit normal and offset of triangle `t`.
    pub fn triangle_plane(&self, t: usize, eps_area: f64) -> Result<(Vec3, f64), GeomError> {
        let [a, b, c] = self.triangle_points(t);
        triangle_normal_and_offset(a, b, c, eps_area)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(&self.vertices)
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Signed enclosed volume; positive for a closed outward-oriented surface.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                a.dot(b.cross(c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// A copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> TriangleMesh {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = f(*v);
        }
        out
    }
}

// Undirected edge -> list of (triangle, local edge, forward?)
type EdgeUses = HashMap<(usize, usize), Vec<(usize, usize, bool)>>;

fn build_adjacency(triangles: &[[usize; 3]]) -> (Vec<[Option<usize>; 3]>, Topology) {
    let mut edges: EdgeUses = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            edges.entry(key).or_default().push((t, k, a < b));
        }
    }
    let mut neighbors = vec![[None; 3]; triangles.len()];
    let mut topology = Topology::default();
    for uses in edges.values() {
        match uses.as_slice() {
            [_] => topology.boundary_edges += 1,
            [(t0, k0, f0), (t1, k1, f1)] => {
                if f0 == f1 {
                    topology.inconsistent_edges += 1;
                }
                neighbors[*t0][*k0] = Some(*t1);
                neighbors[*t1][*k1] = Some(*t0);
            }
            _ => topology.non_manifold_edges += 1,
        }
    }
    (neighbors, topology)
}
