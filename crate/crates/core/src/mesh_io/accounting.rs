//! Storage accounting with 4-byte numbers: 3 numbers per plane, per vertex
//! and per triangle index triple.

use std::fmt;

use super::TriangleMesh;
use crate::codec_io::Code;

pub const BYTES_PER_NUMBER: u64 = 4;
pub const BYTES_PER_PLANE: u64 = 3 * BYTES_PER_NUMBER;
pub const BYTES_PER_VERTEX: u64 = 3 * BYTES_PER_NUMBER;
pub const BYTES_PER_TRIANGLE: u64 = 3 * BYTES_PER_NUMBER;
/// Per-quadrangle cost in the quad-mesh comparison, `4·3·4` bytes.
pub const BYTES_PER_QUAD: u64 = 4 * 3 * BYTES_PER_NUMBER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StorageReport {
    /// Face planes, summed over parts.
    pub faces: u64,
    /// Boundary cutting planes, summed over parts (0 for convex codes).
    pub boundary_planes: u64,
    pub vertices: u64,
    pub triangles: u64,
    /// Number of quadrilateral source polygons, when every source polygon is a quad.
    pub quads: Option<u64>,
    pub plane_bytes: u64,
    pub indexed_bytes: u64,
    pub quad_bytes: Option<u64>,
}

impl StorageReport {
    pub fn total_planes(&self) -> u64 {
        self.faces + self.boundary_planes
    }

    /// `indexed_bytes / plane_bytes`, or `None` for an empty code.
    pub fn ratio(&self) -> Option<f64> {
        (self.plane_bytes > 0).then(|| self.indexed_bytes as f64 / self.plane_bytes as f64)
    }

    pub fn quad_ratio(&self) -> Option<f64> {
        match self.quad_bytes {
            Some(q) if self.plane_bytes > 0 => Some(q as f64 / self.plane_bytes as f64),
            _ => None,
        }
    }

    /// One `key=value` pair per line.
    pub fn to_key_values(&self) -> String {
        let mut s = format!(
            "faces={}\nboundary_planes={}\nplanes={}\nvertices={}\ntriangles={}\nplane_bytes={}\nindexed_bytes={}\n",
            self.faces,
            self.boundary_planes,
            self.total_planes(),
            self.vertices,
            self.triangles,
            self.plane_bytes,
            self.indexed_bytes
        );
        if let Some(r) = self.ratio() {
            s.push_str(&format!("ratio={r}\n"));
        }
        if let (Some(q), Some(b)) = (self.quads, self.quad_bytes) {
            s.push_str(&format!("quads={q}\nquad_bytes={b}\n"));
            if let Some(r) = self.quad_ratio() {
                s.push_str(&format!("quad_ratio={r}\n"));
            }
        }
        s
    }
}

impl fmt::Display for StorageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "plane coding:   {} planes ({} face + {} boundary) = {} bytes",
            self.total_planes(),
            self.faces,
            self.boundary_planes,
            self.plane_bytes
        )?;
        writeln!(
            f,
            "indexed mesh:   {} vertices, {} triangles = {} + {} = {} bytes",
            self.vertices,
            self.triangles,
            BYTES_PER_VERTEX * self.vertices,
            BYTES_PER_TRIANGLE * self.triangles,
            self.indexed_bytes
        )?;
        if let (Some(q), Some(b)) = (self.quads, self.quad_bytes) {
            writeln!(
                f,
                "quad mesh:      {} vertices, {} quads = {} + {} = {} bytes",
                self.vertices,
                q,
                BYTES_PER_VERTEX * self.vertices,
                BYTES_PER_QUAD * q,
                b
            )?;
        }
        match self.ratio() {
            Some(r) => write!(f, "ratio:          {r:.4}")?,
            None => write!(f, "ratio:          n/a")?,
        }
        if let Some(r) = self.quad_ratio() {
            write!(f, "\nquad ratio:     {r:.4}")?;
        }
        Ok(())
    }
}

/// Byte counts of `code` against the indexed-triangle (and, for all-quad
/// sources, indexed-quad) encoding of `mesh`.
pub fn storage_report(mesh: &TriangleMesh, code: &Code) -> StorageReport {
    let (faces, boundary) = match code {
        Code::Convex(set) => (set.len() as u64, 0),
        Code::Segmented(seg) => seg.parts().iter().fold((0, 0), |(f, b), p| {
            (
                f + p.face_planes.len() as u64,
                b + p.boundary_planes.len() as u64,
            )
        }),
    };
    let vertices = mesh.vertex_count() as u64;
    let triangles = mesh.triangle_count() as u64;
    let sizes = mesh.polygon_sizes();
    let quads = (!sizes.is_empty() && sizes.iter().all(|&s| s == 4)).then_some(sizes.len() as u64);
    StorageReport {
        faces,
        boundary_planes: boundary,
        vertices,
        triangles,
        quads,
        plane_bytes: BYTES_PER_PLANE * (faces + boundary),
        indexed_bytes: BYTES_PER_VERTEX * vertices + BYTES_PER_TRIANGLE * triangles,
        quad_bytes: quads.map(|q| BYTES_PER_VERTEX * vertices + BYTES_PER_QUAD * q),
    }
}
