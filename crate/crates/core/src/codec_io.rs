//! The `.plnc` binary format.
//!
//! ```text
//! "PLNC" | version: u8 = 1 | kind: u8 (0 convex, 1 segmented)
//! convex:    count: u32 | count × record
//! segmented: parts: u32 | parts × (kind: u8 | faces: u32 | cuts: u32 |
//!                                  faces × record | cuts × record)
//! record:    nu: f32 | phi: f32 | h: f32
//! ```
//!
//! All numbers are little-endian; angles are in radians.

use thiserror::Error;

use crate::convex::PlaneSet;
use crate::geom::{OrientedPlane, SphericalDirection};
use crate::polygonize::{PartCode, SegmentedCode};
use crate::segmentation::PartKind;

pub const MAGIC: &[u8; 4] = b"PLNC";
pub const VERSION: u8 = 1;
pub const RECORD_LEN: usize = 12;

const KIND_CONVEX: u8 = 0;
const KIND_SEGMENTED: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Code {
    Convex(PlaneSet),
    Segmented(SegmentedCode),
}

impl Code {
    pub fn plane_count(&self) -> usize {
        match self {
            Code::Convex(c) => c.len(),
            Code::Segmented(s) => s.plane_count(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("not a plane code file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("payload truncated at byte {offset}: need {needed} more bytes")]
    TruncatedPayload { offset: usize, needed: usize },
    #[error("angle out of range at byte {offset}: nu = {nu}, phi = {phi}")]
    AngleOutOfRange { offset: usize, nu: f32, phi: f32 },
    #[error("non-finite plane offset at byte {offset}")]
    NonFinite { offset: usize },
    #[error("unknown code kind {0}")]
    UnknownKind(u8),
    #[error("unknown part kind {kind} at byte {offset}")]
    UnknownPartKind { offset: usize, kind: u8 },
    #[error("segmented code has no parts")]
    NoParts,
    #[error("{0} bytes after the end of the code")]
    TrailingBytes(usize),
}

fn push_record(out: &mut Vec<u8>, p: &OrientedPlane) {
    let d = p.direction();
    let nu = d.nu() as f32;
    let mut phi = d.phi() as f32;
    if f64::from(phi) >= std::f64::consts::TAU {
        phi = 0.0;
    }
    out.extend_from_slice(&nu.to_le_bytes());
    out.extend_from_slice(&phi.to_le_bytes());
    out.extend_from_slice(&(p.h() as f32).to_le_bytes());
}

fn push_planes(out: &mut Vec<u8>, set: &PlaneSet) {
    for p in set.iter() {
        push_record(out, p);
    }
}

/// Serializes a code. Values are rounded to `f32`.
pub fn write_code(code: &Code) -> Vec<u8> {
    let mut out = Vec::with_capacity(10 + RECORD_LEN * code.plane_count());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    match code {
        Code::Convex(set) => {
            out.push(KIND_CONVEX);
            out.extend_from_slice(&(set.len() as u32).to_le_bytes());
            push_planes(&mut out, set);
        }
        Code::Segmented(seg) => {
            out.push(KIND_SEGMENTED);
            out.extend_from_slice(&(seg.parts().len() as u32).to_le_bytes());
            for part in seg.parts() {
                out.push(match part.kind {
                    PartKind::PseudoConvex => 0,
                    PartKind::PseudoConcave => 1,
                });
                out.extend_from_slice(&(part.face_planes.len() as u32).to_le_bytes());
                out.extend_from_slice(&(part.boundary_planes.len() as u32).to_le_bytes());
                push_planes(&mut out, &part.face_planes);
                push_planes(&mut out, &part.boundary_planes);
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let rest = self.bytes.len() - self.pos;
        if rest < n {
            return Err(FormatError::TruncatedPayload {
                offset: self.pos,
                needed: n - rest,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, FormatError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn ensure(&self, records: u64) -> Result<(), FormatError> {
        let rest = (self.bytes.len() - self.pos) as u64;
        let need = records * RECORD_LEN as u64;
        if rest < need {
            return Err(FormatError::TruncatedPayload {
                offset: self.pos,
                needed: (need - rest) as usize,
            });
        }
        Ok(())
    }

    fn record(&mut self) -> Result<OrientedPlane, FormatError> {
        let offset = self.pos;
        let (nu, phi, h) = (self.f32()?, self.f32()?, self.f32()?);
        let out_of_range = FormatError::AngleOutOfRange { offset, nu, phi };
        // π rounds up in f32; that value stands for π itself
        let nu64 = if nu == std::f32::consts::PI {
            std::f64::consts::PI
        } else {
            f64::from(nu)
        };
        let dir = SphericalDirection::new(nu64, f64::from(phi)).map_err(|_| out_of_range)?;
        if !h.is_finite() {
            return Err(FormatError::NonFinite { offset: offset + 8 });
        }
        Ok(OrientedPlane::new(dir, f64::from(h)).expect("finite offset"))
    }

    fn planes(&mut self, count: u32) -> Result<PlaneSet, FormatError> {
        self.ensure(u64::from(count))?;
        (0..count).map(|_| self.record()).collect()
    }
}

/// Parses a `.plnc` file. Any byte string yields either a code or an error.
pub fn read_code(bytes: &[u8]) -> Result<Code, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    r.pos = 4;
    let version = r.u8()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let code = match r.u8()? {
        KIND_CONVEX => {
            let n = r.u32()?;
            Code::Convex(r.planes(n)?)
        }
        KIND_SEGMENTED => {
            let n = r.u32()?;
            if n == 0 {
                return Err(FormatError::NoParts);
            }
            // every part needs at least its 9-byte header
            if ((bytes.len() - r.pos) as u64) < u64::from(n) * 9 {
                return Err(FormatError::TruncatedPayload {
                    offset: r.pos,
                    needed: (u64::from(n) * 9 - (bytes.len() - r.pos) as u64) as usize,
                });
            }
            let mut parts = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let offset = r.pos;
                let kind = match r.u8()? {
                    0 => PartKind::PseudoConvex,
                    1 => PartKind::PseudoConcave,
                    kind => return Err(FormatError::UnknownPartKind { offset, kind }),
                };
                let (faces, cuts) = (r.u32()?, r.u32()?);
                r.ensure(u64::from(faces) + u64::from(cuts))?;
                parts.push(PartCode {
                    kind,
                    face_planes: r.planes(faces)?,
                    boundary_planes: r.planes(cuts)?,
                });
            }
            Code::Segmented(SegmentedCode::new(parts).expect("part count checked"))
        }
        k => return Err(FormatError::UnknownKind(k)),
    };
    if r.pos != bytes.len() {
        return Err(FormatError::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::encode_convex;
    use crate::primitives::unit_cube;

    fn cube_file() -> Vec<u8> {
        write_code(&Code::Convex(encode_convex(&unit_cube(), 1e-9).unwrap()))
    }

    #[test]
    fn cube_layout() {
        let bytes = cube_file();
        assert_eq!(bytes.len(), 10 + 72);
        assert_eq!(&bytes[..6], b"PLNC\x01\x00");
        assert_eq!(u32::from_le_bytes(bytes[6..10].try_into().unwrap()), 6);
    }

    #[test]
    fn rewrite_is_bit_exact() {
        let bytes = cube_file();
        assert_eq!(write_code(&read_code(&bytes).unwrap()), bytes);
    }

    #[test]
    fn header_errors() {
        let mut bytes = cube_file();
        assert_eq!(read_code(b"XXXX\x01\x00"), Err(FormatError::BadMagic));
        assert_eq!(read_code(b"PL"), Err(FormatError::BadMagic));
        bytes[4] = 2;
        assert_eq!(read_code(&bytes), Err(FormatError::UnsupportedVersion(2)));
        bytes[4] = 1;
        bytes[5] = 7;
        assert_eq!(read_code(&bytes), Err(FormatError::UnknownKind(7)));
    }

    #[test]
    fn declared_count_beyond_payload() {
        let mut bytes = b"PLNC\x01\x00".to_vec();
        bytes.extend_from_slice(&10u32.to_le_bytes());
        bytes.extend_from_slice(&[0u8; 60]);
        assert!(matches!(
            read_code(&bytes),
            Err(FormatError::TruncatedPayload { .. })
        ));
    }

    #[test]
    fn bad_angles_and_trailing_bytes() {
        let mut bytes = cube_file();
        bytes[10..14].copy_from_slice(&4.0f32.to_le_bytes());
        assert!(matches!(
            read_code(&bytes),
            Err(FormatError::AngleOutOfRange { .. })
        ));
        let mut bytes = cube_file();
        bytes.push(0);
        assert_eq!(read_code(&bytes), Err(FormatError::TrailingBytes(1)));
    }

    #[test]
    fn south_pole_survives_rounding() {
        let bytes = cube_file();
        let code = read_code(&bytes).unwrap();
        let Code::Convex(set) = code else { panic!() };
        assert!(set
            .iter()
            .any(|p| p.direction().nu() == std::f64::consts::PI));
    }
}
