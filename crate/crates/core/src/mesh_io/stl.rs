use std::collections::HashMap;
use std::fmt::Write as _;

use super::{MeshIoError, TriangleMesh};
use crate::geom::Vec3;

const HEADER_LEN: usize = 80;
const FACET_LEN: usize = 50;

// STL stores independent facets; vertices are shared by exact bit pattern.
#[derive(Default)]
struct VertexWelder {
    index: HashMap<[u64; 3], usize>,
    vertices: Vec<Vec3>,
}

impl VertexWelder {
    fn insert(&mut self, v: Vec3) -> usize {
        let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
        *self.index.entry(key).or_insert_with(|| {
            self.vertices.push(v);
            self.vertices.len() - 1
        })
    }
}

pub fn parse_stl_binary(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(MeshIoError::at_offset(
            bytes.len(),
            "file shorter than the 84-byte header",
        ));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let needed = (count as u64) * FACET_LEN as u64 + (HEADER_LEN + 4) as u64;
    if (bytes.len() as u64) < needed {
        return Err(MeshIoError::at_offset(
            bytes.len(),
            format!("header declares {count} facets but the file ends early"),
        ));
    }
    let mut welder = VertexWelder::default();
    let mut triangles = Vec::with_capacity(count);
    for f in 0..count {
        let base = HEADER_LEN + 4 + f * FACET_LEN;
        let mut tri = [0usize; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let off = base + 12 + 12 * k;
            let c = |i: usize| {
                f32::from_le_bytes(bytes[off + 4 * i..off + 4 * i + 4].try_into().unwrap()) as f64
            };
            let v = Vec3::new(c(0), c(1), c(2));
            if !v.is_finite() {
                return Err(MeshIoError::at_offset(off, "non-finite vertex coordinate"));
            }
            *slot = welder.insert(v);
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(MeshIoError::at_offset(base, "facet repeats a vertex"));
        }
        triangles.push(tri);
    }
    TriangleMesh::from_triangles(welder.vertices, triangles)
}

pub fn parse_stl_ascii(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| MeshIoError::at_offset(e.valid_up_to(), "file is not valid UTF-8"))?;
    let mut welder = VertexWelder::default();
    let mut triangles = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut seen_solid = false;
    let mut in_loop = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "solid" => seen_solid = true,
            "endsolid" | "facet" | "endfacet" => {}
            "outer" => {
                if in_loop {
                    return Err(MeshIoError::at_line(line_no, "nested loop"));
                }
                in_loop = true;
                current.clear();
            }
            "vertex" => {
                if !in_loop {
                    return Err(MeshIoError::at_line(line_no, "vertex outside a loop"));
                }
                let mut c = [0.0f64; 3];
                for slot in &mut c {
                    let tok = tokens.next().ok_or_else(|| {
                        MeshIoError::at_line(line_no, "vertex needs 3 coordinates")
                    })?;
                    *slot = tok.parse().map_err(|_| {
                        MeshIoError::at_line(line_no, format!("bad coordinate {tok:?}"))
                    })?;
                }
                let v = Vec3::from(c);
                if !v.is_finite() {
                    return Err(MeshIoError::at_line(line_no, "non-finite coordinate"));
                }
                current.push(welder.insert(v));
            }
            "endloop" => {
                if !in_loop || current.len() != 3 {
                    return Err(MeshIoError::at_line(
                        line_no,
                        "facet loop must have 3 vertices",
                    ));
                }
                let t = [current[0], current[1], current[2]];
                if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                    return Err(MeshIoError::at_line(line_no, "facet repeats a vertex"));
                }
                triangles.push(t);
                in_loop = false;
            }
            other => {
                return Err(MeshIoError::at_line(
                    line_no,
                    format!("unexpected token {other:?}"),
                ));
            }
        }
    }
    if !seen_solid {
        return Err(MeshIoError::at_line(1, "missing 'solid' header"));
    }
    if in_loop {
        return Err(MeshIoError::at_line(
            text.lines().count(),
            "unterminated facet loop",
        ));
    }
    TriangleMesh::from_triangles(welder.vertices, triangles)
}

fn facet_normal(mesh: &TriangleMesh, t: usize) -> Vec3 {
    mesh.triangle_plane(t, 0.0)
        .map(|(n, _)| n)
        .unwrap_or(Vec3::ZERO)
}

/// Little-endian binary STL: 80-byte header, u32 facet count, 50-byte facets.
pub fn emit_stl_binary(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + FACET_LEN * mesh.triangle_count());
    let mut header = [0u8; HEADER_LEN];
    let tag = b"planecode binary STL";
    header[..tag.len()].copy_from_slice(tag);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangle_count() as u32).to_le_bytes());
    for t in 0..mesh.triangle_count() {
        let n = facet_normal(mesh, t);
        for v in std::iter::once(n).chain(mesh.triangle_points(t)) {
            for c in v.to_array() {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

pub fn emit_stl_ascii(mesh: &TriangleMesh) -> Vec<u8> {
    let mut s = String::from("solid planecode\n");
    for t in 0..mesh.triangle_count() {
        let n = facet_normal(mesh, t);
        let _ = writeln!(s, "  facet normal {:?} {:?} {:?}", n.x, n.y, n.z);
        s.push_str("    outer loop\n");
        for p in mesh.triangle_points(t) {
            let _ = writeln!(s, "      vertex {:?} {:?} {:?}", p.x, p.y, p.z);
        }
        s.push_str("    endloop\n  endfacet\n");
    }
    s.push_str("endsolid planecode\n");
    s.into_bytes()
}
