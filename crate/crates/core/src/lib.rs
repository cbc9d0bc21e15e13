//! Plane-based coding of polyhedral meshes.
//!
//! A convex polyhedron is stored as the list of its oriented face planes
//! `(ν, φ, h)` and rebuilt by half-space intersection. Non-convex meshes are
//! split into pseudo-convex and pseudo-concave parts, each coded by its face
//! planes plus cutting planes that close its open rim.

pub mod codec_io;
pub mod convex;
pub mod geom;
pub mod mesh_io;
pub mod polygonize;
pub mod primitives;
pub mod segmentation;
pub mod simplify;

pub use codec_io::{read_code, write_code, Code, FormatError};
pub use convex::{
    decode_convex, encode_convex, rotate_planes, translate_planes, ConvexError, ConvexPolyhedron,
    DecodedPolyhedron, PlaneSet, Rotation,
};
pub use geom::{
    classify_side, plane_from_triangle, spherical_from_unit_vector, unit_vector_from_spherical,
    GeomError, OrientedPlane, SideClassification, SphericalDirection, Vec3,
};
pub use mesh_io::{
    load_mesh, storage_report, MeshFormat, MeshIoError, StorageReport, TriangleMesh,
};
pub use polygonize::{
    boundary_planes_for_part, decode_segmented, encode_segmented, polygonize_part, PartCode,
    PolygonFace, PolygonizeError, SegmentedCode,
};
pub use segmentation::{mutual_orientation, segment_mesh, MeshPart, MutualOrientation, PartKind};
pub use simplify::{drop_small_faces, merge_near_parallel, PlaneAdjacency, SimplifyParams};

/// Default absolute tolerance for a mesh: `1e-7 ×` its bounding-box diagonal.
pub fn default_eps(mesh: &TriangleMesh) -> f64 {
    geom::DEFAULT_REL_EPS * mesh.bbox_diagonal().max(f64::MIN_POSITIVE)
}
