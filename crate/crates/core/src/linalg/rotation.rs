//! SO(3) conversions: axis-angle (the ball picture) and unit quaternions (the double cover).

use super::{dominant_index, norm, Frame, ROTATION_TOL};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Below this value of `sin(phi)` the axis is read from the symmetric part.
const SMALL_SINE: f64 = 1e-6;

/// Rotation by `phi` in `[0, pi]` about a unit `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub phi: f64,
    pub axis: [f64; 3],
}

impl AxisAngle {
    /// Rodrigues' formula.
    pub fn to_frame(&self) -> Frame {
        let [x, y, z] = self.axis;
        let (s, c) = self.phi.sin_cos();
        let t = 1.0 - c;
        Frame::from_raw(
            3,
            vec![
                c + t * x * x,
                t * x * y - s * z,
                t * x * z + s * y,
                t * x * y + s * z,
                c + t * y * y,
                t * y * z - s * x,
                t * x * z - s * y,
                t * y * z + s * x,
                c + t * z * z,
            ],
        )
    }

    /// The point `phi * axis` of the closed ball of radius pi.
    pub fn ball_vector(&self) -> [f64; 3] {
        self.axis.map(|a| a * self.phi)
    }
}

/// A unit quaternion `w + xi + yj + zk`, an element of Spin(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Accepts components whose norm is 1 within `1e-10`.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = norm(&[w, x, y, z]);
        if !n.is_finite() || (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("quaternion norm {n} is not 1")));
        }
        Ok(Self { w, x, y, z })
    }

    /// Normalizes arbitrary nonzero components.
    pub fn normalized(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n = norm(&[w, x, y, z]);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput("cannot normalize a zero quaternion".into()));
        }
        Ok(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    pub fn from_array(c: [f64; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn neg(self) -> Self {
        Self { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Hamilton product `self * rhs`.
    pub fn mul(self, rhs: Self) -> Self {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Self {
            w: a * e - b * f - c * g - d * h,
            x: a * f + b * e + c * h - d * g,
            y: a * g - b * h + c * e + d * f,
            z: a * h + b * g - c * f + d * e,
        }
    }

    /// Great-circle distance on the 3-sphere.
    pub fn angle_to(self, other: Self) -> f64 {
        let d = self.dot(other).clamp(-1.0, 1.0);
        let diff = norm(&[
            self.w - other.w,
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
        ]);
        // 2 asin(|p - q| / 2) is accurate for nearby points where acos is not.
        if d > 0.9 {
            2.0 * (diff / 2.0).asin()
        } else {
            d.acos()
        }
    }
}

fn check_rotation3(r: &Frame) -> Result<()> {
    if r.dim() != 3 {
        return Err(Error::InvalidInput(format!(
            "expected a 3x3 rotation, got dimension {}",
            r.dim()
        )));
    }
    let defect = r.orthogonality_defect();
    let det = r.det();
    if defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
        return Err(Error::NotARotation { defect, det });
    }
    Ok(())
}

/// Rotation angle and axis of an SO(3) element.
///
/// The angle comes from `atan2(sin, cos)` so it stays accurate next to 0 and pi.
/// For `phi = 0` the axis is `(1, 0, 0)`. When `sin(phi) < 1e-6` near pi the axis
/// is taken from the symmetric part; its sign follows the antisymmetric part
/// while that is still resolvable and otherwise the largest-component-positive
/// gauge.
pub fn axis_angle(r: &Frame) -> Result<AxisAngle> {
    check_rotation3(r)?;
    let g = |i, j| r.get(i, j);
    let anti = [g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)];
    let anti_norm = norm(&anti);
    let cos_phi = (g(0, 0) + g(1, 1) + g(2, 2) - 1.0) / 2.0;
    let phi = (anti_norm / 2.0).atan2(cos_phi).clamp(0.0, PI);
    let sin_phi = anti_norm / 2.0;

    let axis = if sin_phi >= SMALL_SINE {
        anti.map(|a| a / anti_norm)
    } else if cos_phi > 0.0 {
        if anti_norm > 0.0 {
            anti.map(|a| a / anti_norm)
        } else {
            [1.0, 0.0, 0.0]
        }
    } else {
        // (R + R^T)/2 - cos(phi) I = (1 - cos(phi)) v v^T
        let one_minus_cos = 1.0 - cos_phi;
        let b = |i: usize, j: usize| {
            let sym = 0.5 * (g(i, j) + g(j, i));
            (if i == j { sym - cos_phi } else { sym }) / one_minus_cos
        };
        let diag = [b(0, 0), b(1, 1), b(2, 2)];
        let k = (0..3).max_by(|&i, &j| diag[i].total_cmp(&diag[j])).unwrap_or(0);
        let col = [b(0, k), b(1, k), b(2, k)];
        let len = norm(&col);
        let mut v = col.map(|c| c / len);
        let align: f64 = v.iter().zip(&anti).map(|(a, b)| a * b).sum();
        if anti_norm > 1e-12 {
            if align < 0.0 {
                v = v.map(|c| -c);
            }
        } else if v[dominant_index(&v)] < 0.0 {
            v = v.map(|c| -c);
        }
        v
    };
    Ok(AxisAngle { phi, axis })
}

/// One of the two unit quaternions covering `r`.
///
/// Uses Shepperd's branch selection for accuracy, then returns the branch
/// whose largest-magnitude component is positive (ties go to `w`, then `x`, ...).
/// Path lifts pick signs by continuity instead.
pub fn so3_to_quat(r: &Frame) -> Result<UnitQuaternion> {
    check_rotation3(r)?;
    let g = |i, j| r.get(i, j);
    let tr = g(0, 0) + g(1, 1) + g(2, 2);
    let cand = [
        1.0 + tr,
        1.0 + 2.0 * g(0, 0) - tr,
        1.0 + 2.0 * g(1, 1) - tr,
        1.0 + 2.0 * g(2, 2) - tr,
    ];
    let k = (0..4).max_by(|&i, &j| cand[i].total_cmp(&cand[j])).unwrap_or(0);
    let s = cand[k].max(0.0).sqrt() * 2.0; // 4 * |component k|
    let q = match k {
        0 => [s / 4.0, (g(2, 1) - g(1, 2)) / s, (g(0, 2) - g(2, 0)) / s, (g(1, 0) - g(0, 1)) / s],
        1 => [(g(2, 1) - g(1, 2)) / s, s / 4.0, (g(0, 1) + g(1, 0)) / s, (g(0, 2) + g(2, 0)) / s],
        2 => [(g(0, 2) - g(2, 0)) / s, (g(0, 1) + g(1, 0)) / s, s / 4.0, (g(1, 2) + g(2, 1)) / s],
        _ => [(g(1, 0) - g(0, 1)) / s, (g(0, 2) + g(2, 0)) / s, (g(1, 2) + g(2, 1)) / s, s / 4.0],
    };
    let sign = if q[dominant_index(&q)] < 0.0 { -1.0 } else { 1.0 };
    UnitQuaternion::normalized(sign * q[0], sign * q[1], sign * q[2], sign * q[3])
}

/// The rotation covered by `q`; `q` and `-q` give the same frame.
pub fn quat_to_so3(q: &UnitQuaternion) -> Result<Frame> {
    let UnitQuaternion { w, x, y, z } = UnitQuaternion::new(q.w, q.x, q.y, q.z)?;
    Ok(Frame::from_raw(
        3,
        vec![
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ))
}
