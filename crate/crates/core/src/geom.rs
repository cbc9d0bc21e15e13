//! Oriented planes, spherical direction encoding and half-space side tests.
//!
//! An oriented plane is the pair `(ω, h)`: a unit normal `ω` and a signed
//! distance `h`, describing the set `{p : ω·p = h}`. The plane splits space
//! into the closed negative half-space `ω·p ≤ h` (boundary included) and the
//! open positive half-space `ω·p > h`. Directions are stored as spherical
//! angles `(ν, φ)` with `ν ∈ [0, π]` measured from +z and `φ ∈ [0, 2π)`
//! measured from +x in the xy-plane.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Default threshold on `|(p2 − p1) × (p3 − p2)|` below which a triangle is degenerate.
pub const DEFAULT_EPS_AREA: f64 = 1e-12;

/// Relative tolerance for side tests; multiply by the bounding-box diagonal.
pub const DEFAULT_REL_SIDE_EPS: f64 = 1e-9;

/// Relative tolerance for convexity and orientation tests on mesh data.
pub const DEFAULT_REL_EPS: f64 = 1e-7;

// Normals whose xy-projection is shorter than this are snapped to a pole.
const POLE_SNAP: f64 = 1e-12;

const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate triangle: |cross| = {cross_norm:e} is not above {eps_area:e}")]
    DegenerateTriangle { cross_norm: f64, eps_area: f64 },
    #[error("vector is not unit length (|w| = {norm})")]
    NotUnitVector { norm: f64 },
    #[error("spherical angles out of range: nu = {nu}, phi = {phi}")]
    AngleOutOfRange { nu: f64, phi: f64 },
    #[error("non-finite value in geometric input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a zero or non-finite vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Diagonal length of the axis-aligned bounding box of `points` (0 when empty).
pub fn bbox_diagonal<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> f64 {
    let mut it = points.into_iter();
    let Some(first) = it.next() else {
        return 0.0;
    };
    let (lo, hi) = it.fold((*first, *first), |(lo, hi), p| (lo.min(*p), hi.max(*p)));
    (hi - lo).norm()
}

/// Polar/azimuthal angles of a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection {
    nu: f64,
    phi: f64,
}

impl SphericalDirection {
    pub fn new(nu: f64, phi: f64) -> Result<Self, GeomError> {
        if !(0.0..=PI).contains(&nu) || !(0.0..TAU).contains(&phi) {
            return Err(GeomError::AngleOutOfRange { nu, phi });
        }
        Ok(SphericalDirection { nu, phi })
    }

    /// Builds a direction from angles given in degrees.
    pub fn from_degrees(nu_deg: f64, phi_deg: f64) -> Result<Self, GeomError> {
        Self::new(nu_deg.to_radians(), phi_deg.to_radians().rem_euclid(TAU))
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_degrees(&self) -> (f64, f64) {
        (self.nu.to_degrees(), self.phi.to_degrees())
    }
}

/// Converts a unit vector to spherical angles.
///
/// `ν = arccos(w_z)`; `φ` comes from the full `(w_x, w_y)` pair through
/// `atan2` and is wrapped into `[0, 2π)`. At the poles `φ = 0`.
pub fn spherical_from_unit_vector(w: Vec3) -> Result<SphericalDirection, GeomError> {
    if !w.is_finite() {
        return Err(GeomError::NonFinite);
    }
    let norm = w.norm();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(GeomError::NotUnitVector { norm });
    }
    let w = w / norm;
    let rho = w.x.hypot(w.y);
    if rho <= POLE_SNAP {
        let nu = if w.z > 0.0 { 0.0 } else { PI };
        return Ok(SphericalDirection { nu, phi: 0.0 });
    }
    let nu = rho.atan2(w.z);
    let mut phi = w.y.atan2(w.x);
    if phi < 0.0 {
        phi += TAU;
    }
    if phi >= TAU {
        phi = 0.0;
    }
    Ok(SphericalDirection { nu, phi })
}

/// `(sin ν cos φ, sin ν sin φ, cos ν)`.
pub fn unit_vector_from_spherical(d: SphericalDirection) -> Vec3 {
    let (sn, cn) = d.nu.sin_cos();
    let (sp, cp) = d.phi.sin_cos();
    Vec3::new(sn * cp, sn * sp, cn)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideClassification {
    /// In the closed half-space behind the normal, boundary included.
    NegativeClosed,
    /// Strictly ahead of the normal.
    Positive,
}

/// A plane with a chosen unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedPlane {
    direction: SphericalDirection,
    h: f64,
}

impl OrientedPlane {
    pub fn new(direction: SphericalDirection, h: f64) -> Result<Self, GeomError> {
        if !h.is_finite() {
            return Err(GeomError::NonFinite);
        }
        Ok(OrientedPlane { direction, h })
    }

    /// Plane from a unit normal and signed distance.
    pub fn from_normal(normal: Vec3, h: f64) -> Result<Self, GeomError> {
        Self::new(spherical_from_unit_vector(normal)?, h)
    }

    /// Plane with normal along `n` (normalized here) passing through `point`.
    pub fn through_point(n: Vec3, point: Vec3) -> Result<Self, GeomError> {
        let w = n
            .normalized()
            .ok_or(GeomError::NotUnitVector { norm: n.norm() })?;
        Self::from_normal(w, w.dot(point))
    }

    pub fn direction(&self) -> SphericalDirection {
        self.direction
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn normal(&self) -> Vec3 {
        unit_vector_from_spherical(self.direction)
    }

    /// `ω·p − h`: negative behind the plane, positive ahead of it.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal().dot(p) - self.h
    }

    /// Same point set, opposite orientation: `(−ω, −h)`.
    pub fn flipped(&self) -> OrientedPlane {
        let d = spherical_from_unit_vector(-self.normal()).expect("unit normal");
        OrientedPlane {
            direction: d,
            h: -self.h,
        }
    }

    /// `(ν°, φ°, h)` as printed in tables.
    pub fn to_degree_triplet(&self) -> (f64, f64, f64) {
        let (nu, phi) = self.direction.to_degrees();
        (nu, phi, self.h)
    }

    /// Angle between the two normals in radians.
    pub fn angle_to(&self, other: &OrientedPlane) -> f64 {
        angle_between(self.normal(), other.normal())
    }
}

impl fmt::Display for OrientedPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.direction.nu, self.direction.phi, self.h
        )
    }
}

/// Angle between two unit vectors, robust near 0 and π.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Oriented plane of the triangle `p1 p2 p3`.
///
/// The normal is `(p2 − p1) × (p3 − p2)` normalized, so the vertices run
/// counterclockwise when seen from the positive side; `h = ω·p1`.
pub fn plane_from_triangle(
    p1: Vec3,
    p2: Vec3,
    p3: Vec3,
    eps_area: f64,
) -> Result<OrientedPlane, GeomError> {
    let (normal, h) = triangle_normal_and_offset(p1, p2, p3, eps_area)?;
    OrientedPlane::from_normal(normal, h)
}

/// Same as [`plane_from_triangle`] but returns the raw `(ω, h)` pair without
/// going through spherical angles.
pub fn triangle_normal_and_offset(
    p1: Vec3,
    p2: Vec3,
    p3: Vec3,
    eps_area: f64,
) -> Result<(Vec3, f64), GeomError> {
    if !(p1.is_finite() && p2.is_finite() && p3.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let c = (p2 - p1).cross(p3 - p2);
    let cross_norm = c.norm();
    if cross_norm <= eps_area {
        return Err(GeomError::DegenerateTriangle {
            cross_norm,
            eps_area,
        });
    }
    let w = c / cross_norm;
    Ok((w, w.dot(p1)))
}

pub fn classify_side(plane: &OrientedPlane, p: Vec3, eps: f64) -> SideClassification {
    classify_signed_distance(plane.signed_distance(p), eps)
}

pub(crate) fn classify_signed_distance(d: f64, eps: f64) -> SideClassification {
    if d <= eps {
        SideClassification::NegativeClosed
    } else {
        SideClassification::Positive
    }
}
