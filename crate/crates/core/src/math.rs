//! Small geometry and numeric helpers shared across the simulator.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Three-component Cartesian vector, serialized as a plain `[x, y, z]` array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0, 0.0, 0.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: Vec3) -> Vec3 {
        Vec3([
            self.0[1] * other.0[2] - self.0[2] * other.0[1],
            self.0[2] * other.0[0] - self.0[0] * other.0[2],
            self.0[0] * other.0[1] - self.0[1] * other.0[0],
        ])
    }

    pub fn norm(&self) -> f64 {
        self.dot(*self).sqrt()
    }

    /// Unit vector in the same direction, or `None` when shorter than `eps`.
    pub fn normalized(&self, eps: f64) -> Option<Vec3> {
        let n = self.norm();
        if n < eps {
            None
        } else {
            Some(*self * (1.0 / n))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Rotation about `axis` (unit vector) by `angle` radians, Rodrigues form.
    pub fn rotate_about(&self, axis: Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        *self * c + axis.cross(*self) * s + axis * (axis.dot(*self) * (1.0 - c))
    }

    /// Rotation about the world z axis by `angle` radians.
    pub fn rotate_z(&self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3([
            c * self.0[0] - s * self.0[1],
            s * self.0[0] + c * self.0[1],
            self.0[2],
        ])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3([self.0[0] * rhs, self.0[1] * rhs, self.0[2] * rhs])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

/// Unit direction for azimuth (x toward y) and elevation (from the xy plane).
pub fn direction_from_angles(azimuth: f64, elevation: f64) -> Vec3 {
    let (sa, ca) = azimuth.sin_cos();
    let (se, ce) = elevation.sin_cos();
    Vec3([ce * ca, ce * sa, se])
}

/// Azimuth/elevation pair of a direction vector; zero vector maps to (0, 0).
pub fn angles_of_direction(dir: Vec3) -> (f64, f64) {
    let horiz = dir.x().hypot(dir.y());
    if horiz == 0.0 && dir.z() == 0.0 {
        return (0.0, 0.0);
    }
    (dir.y().atan2(dir.x()), dir.z().atan2(horiz))
}

/// Angle between two vectors in radians; zero-length inputs yield 0.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    match (a.normalized(1e-12), b.normalized(1e-12)) {
        (Some(ua), Some(ub)) => ua.dot(ub).clamp(-1.0, 1.0).acos(),
        _ => 0.0,
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Power in dB to a linear amplitude factor.
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

/// FNV-1a over a byte slice, used for stable token/stream hashing.
pub fn fnv1a_bytes(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// FNV-1a over a sequence of u64 words (little-endian byte order).
pub fn fnv1a_words(words: &[u64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cross_product_follows_right_hand_rule() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn rotate_about_z_quarter_turn() {
        let v = Vec3::new(1.0, 0.0, 0.5);
        let r = v.rotate_about(Vec3::new(0.0, 0.0, 1.0), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(r.x(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(r.y(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.z(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rotate_z_matches_rodrigues() {
        let v = Vec3::new(0.3, -1.2, 2.0);
        let a = 1.234;
        let r1 = v.rotate_z(a);
        let r2 = v.rotate_about(Vec3::new(0.0, 0.0, 1.0), a);
        assert_relative_eq!(r1.x(), r2.x(), epsilon = 1e-12);
        assert_relative_eq!(r1.y(), r2.y(), epsilon = 1e-12);
        assert_relative_eq!(r1.z(), r2.z(), epsilon = 1e-12);
    }

    #[test]
    fn angles_round_trip_through_direction() {
        let az = 0.7;
        let el = -0.4;
        let (az2, el2) = angles_of_direction(direction_from_angles(az, el));
        assert_relative_eq!(az, az2, epsilon = 1e-12);
        assert_relative_eq!(el, el2, epsilon = 1e-12);
    }

    #[test]
    fn wrap_angle_stays_in_half_open_interval() {
        for k in -20..20 {
            let a = 0.37 + k as f64 * 1.9;
            let w = wrap_angle(a);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            assert_relative_eq!((a - w).rem_euclid(2.0 * std::f64::consts::PI), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn fnv_matches_reference_vector() {
        // Published FNV-1a test vector: "a" -> 0xaf63dc4c8601ec8c.
        assert_eq!(fnv1a_bytes(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn vec3_serde_round_trip_is_plain_array() {
        let v = Vec3::new(1.5, -2.0, 0.25);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.5,-2.0,0.25]");
        let back: Vec3 = serde_json::from_str(&s).unwrap();
        assert_eq!(v, back);
    }
}
