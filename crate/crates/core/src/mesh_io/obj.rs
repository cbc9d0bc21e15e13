use std::fmt::Write as _;

use super::{MeshIoError, TriangleMesh};
use crate::geom::Vec3;

const IGNORED: &[&str] = &["vt", "vn", "o", "g", "s", "usemtl", "mtllib", "l", "p"];
const FREEFORM: &[&str] = &[
    "vp", "cstype", "deg", "bmat", "step", "curv", "curv2", "surf", "parm", "trim", "hole", "scrv",
    "sp", "end", "con",
];

/// Parses Wavefront OBJ position and face records.
///
/// Texture/normal references in `f` records are accepted and dropped;
/// negative (relative) indices are resolved against the vertices seen so far.
pub fn parse_obj(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| MeshIoError::at_offset(e.valid_up_to(), "file is not valid UTF-8"))?;
    let mut vertices = Vec::new();
    let mut polygons = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or("");
        match keyword {
            "v" => {
                let mut c = [0.0f64; 3];
                for slot in &mut c {
                    let tok = tokens.next().ok_or_else(|| {
                        MeshIoError::at_line(line_no, "vertex needs 3 coordinates")
                    })?;
                    *slot = tok.parse().map_err(|_| {
                        MeshIoError::at_line(line_no, format!("bad coordinate {tok:?}"))
                    })?;
                    if !slot.is_finite() {
                        return Err(MeshIoError::at_line(line_no, "non-finite coordinate"));
                    }
                }
                // an optional w component is allowed and ignored
                vertices.push(Vec3::from(c));
            }
            "f" => {
                let mut poly = Vec::new();
                for tok in tokens {
                    let pos = tok.split('/').next().unwrap_or("");
                    let i: i64 = pos.parse().map_err(|_| {
                        MeshIoError::at_line(line_no, format!("bad face index {tok:?}"))
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = match i {
                        0 => None,
                        i if i > 0 && i <= n => Some(i - 1),
                        i if i < 0 && -i <= n => Some(n + i),
                        _ => None,
                    };
                    let r = resolved.ok_or_else(|| {
                        MeshIoError::at_line(line_no, format!("face index {i} out of range"))
                    })?;
                    poly.push(r as usize);
                }
                if poly.len() < 3 {
                    return Err(MeshIoError::at_line(
                        line_no,
                        "face needs at least 3 vertices",
                    ));
                }
                polygons.push(poly);
            }
            k if IGNORED.contains(&k) => {}
            k if FREEFORM.contains(&k) => {
                return Err(MeshIoError::UnsupportedFeature {
                    line: line_no,
                    feature: k.to_string(),
                })
            }
            k => {
                return Err(MeshIoError::at_line(
                    line_no,
                    format!("unknown statement {k:?}"),
                ));
            }
        }
    }
    TriangleMesh::from_polygons(vertices, &polygons)
}

/// Writes positions and source polygons. Coordinates use the shortest
/// round-trip representation, so parsing the output restores the mesh exactly.
pub fn emit_obj(mesh: &TriangleMesh) -> Vec<u8> {
    let mut s = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(s, "v {:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for poly in mesh.polygons() {
        s.push('f');
        for i in poly {
            let _ = write!(s, " {}", i + 1);
        }
        s.push('\n');
    }
    s.into_bytes()
}
