//! Minimal 3-vector and unit-quaternion math.
//!
//! Vectors are plain `[f64; 3]` so sensor types stay serde-friendly; the
//! handful of operations the pipelines need live here as free functions.

pub type Vec3 = [f64; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    if n == 0.0 {
        a
    } else {
        scale(a, 1.0 / n)
    }
}

/// Unit quaternion representing a rotation (scalar-first convention).
///
/// `rotate` maps body-frame vectors into the frame the quaternion is
/// expressed against (for an attitude quaternion: body → world).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let a = normalize(axis);
        let (s, c) = (angle * 0.5).sin_cos();
        Quat::new(c, a[0] * s, a[1] * s, a[2] * s)
    }

    /// Exponential map: rotation vector (axis * angle) to quaternion.
    pub fn from_rotvec(v: Vec3) -> Self {
        let angle = norm(v);
        if angle < 1e-12 {
            // Second-order series keeps tiny updates exact enough for
            // per-sample gyro integration.
            let h = 0.5;
            Quat::new(
                1.0 - angle * angle * 0.125,
                v[0] * h,
                v[1] * h,
                v[2] * h,
            )
            .normalized()
        } else {
            Quat::from_axis_angle(v, angle)
        }
    }

    /// Shortest-arc rotation taking `from` to `to` (both need not be unit).
    pub fn between(from: Vec3, to: Vec3) -> Self {
        let f = normalize(from);
        let t = normalize(to);
        let c = dot(f, t);
        if c < -1.0 + 1e-12 {
            // Antiparallel: rotate 180 degrees about any orthogonal axis.
            let axis = if f[0].abs() < 0.9 {
                normalize(cross(f, [1.0, 0.0, 0.0]))
            } else {
                normalize(cross(f, [0.0, 1.0, 0.0]))
            };
            return Quat::from_axis_angle(axis, std::f64::consts::PI);
        }
        let axis = cross(f, t);
        let q = Quat::new(1.0 + c, axis[0], axis[1], axis[2]);
        q.normalized()
    }

    pub fn mul(self, r: Quat) -> Quat {
        Quat::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }

    pub fn conj(self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        Quat::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Rotate a vector by this quaternion.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        // q v q* expanded; cheaper than two quaternion products.
        let u = [self.x, self.y, self.z];
        let uv = cross(u, v);
        let uuv = cross(u, uv);
        add(v, add(scale(uv, 2.0 * self.w), scale(uuv, 2.0)))
    }

    /// Rotate by the inverse of this quaternion (world → body for attitudes).
    pub fn rotate_inv(self, v: Vec3) -> Vec3 {
        self.conj().rotate(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rotate_identity_is_noop() {
        let v = [1.0, -2.0, 3.0];
        assert_eq!(Quat::IDENTITY.rotate(v), v);
    }

    #[test]
    fn axis_angle_round_trip() {
        let q = Quat::from_axis_angle([0.0, 1.0, 0.0], 0.3);
        let v = q.rotate([1.0, 0.0, 0.0]);
        // Pitch by +0.3 about y takes +x toward -z.
        assert_relative_eq!(v[0], 0.3f64.cos(), epsilon = 1e-12);
        assert_relative_eq!(v[2], -(0.3f64.sin()), epsilon = 1e-12);
        let back = q.rotate_inv(v);
        assert_relative_eq!(back[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(back[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(back[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn between_recovers_tilt() {
        let g = [0.3, -0.1, 9.7];
        let q = Quat::between(g, [0.0, 0.0, 1.0]);
        let up = q.rotate(g);
        assert_relative_eq!(up[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(up[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(up[2], norm(g), epsilon = 1e-12);
    }

    #[test]
    fn composition_matches_sequential_rotation() {
        let a = Quat::from_axis_angle([0.0, 0.0, 1.0], 0.7);
        let b = Quat::from_axis_angle([0.0, 1.0, 0.0], -0.4);
        let v = [0.2, 0.5, -0.9];
        let via_product = a.mul(b).rotate(v);
        let sequential = a.rotate(b.rotate(v));
        for i in 0..3 {
            assert_relative_eq!(via_product[i], sequential[i], epsilon = 1e-12);
        }
    }
}
