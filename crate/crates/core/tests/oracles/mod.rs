//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the crate: Hamiltonians are written out by hand and
//! diagonalized with nalgebra, geometry is done with plain coordinates.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// Rotation angle along the unit circle in the X-Y plane of the T x tau2 model.
pub fn t_tau2_phi(theta: f64) -> f64 {
    (-1.0 + 0.5 * (1.0 - FRAC_1_SQRT_2) * (1.0 - theta.sin())).acos()
}

/// Unnormalized rotation axis along the same circle.
pub fn t_tau2_axis(theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [-c, s - 1.0, (1.0 - SQRT_2) * c]
}

pub fn e_epsilon(k: f64, g: f64, x: f64, y: f64) -> DMatrix<f64> {
    let a = k * x + 0.5 * g * (x * x - y * y);
    let b = k * y - g * x * y;
    DMatrix::from_row_slice(2, 2, &[a, b, b, -a])
}

pub fn t_tau2(x: f64, y: f64, z: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, -z, -y, -z, 0.0, -x, -y, -x, 0.0])
}

pub fn g_g(q: [f64; 4]) -> DMatrix<f64> {
    let [g1, g2, g3, g4] = q;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            g3, g4, g1 - g3, g2 + g4, //
            g4, -g3, -g2 + g4, g1 + g3, //
            g1 - g3, -g2 + g4, -g1, g2, //
            g2 + g4, g1 + g3, g2, g1,
        ],
    )
}

/// Smallest gap between adjacent eigenvalues.
pub fn min_gap(m: DMatrix<f64>) -> f64 {
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Number of times a closed polygon in the plane crosses the ray `x = 0, y > 0`.
pub fn ray_crossings(vertices: &[[f64; 2]]) -> usize {
    let n = vertices.len();
    (0..n)
        .filter(|&i| {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            if (p[0] < 0.0) == (q[0] < 0.0) {
                return false;
            }
            let y = p[1] + (0.0 - p[0]) * (q[1] - p[1]) / (q[0] - p[0]);
            y > 0.0
        })
        .count()
}

/// Even-odd rule point-in-polygon test.
pub fn inside_polygon(vertices: &[[f64; 2]], x: f64, y: f64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        if (p[1] > y) != (q[1] > y) {
            let xc = p[0] + (y - p[1]) * (q[0] - p[0]) / (q[1] - p[1]);
            if x < xc {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from the origin to the segment `pq`.
pub fn segment_origin_distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = (-(p[0] * d[0] + p[1] * d[1]) / len2).clamp(0.0, 1.0);
    ((p[0] + s * d[0]).powi(2) + (p[1] + s * d[1]).powi(2)).sqrt()
}

/// Result of a brute-force gap scan over a planar region.
#[derive(Debug, Clone, Copy)]
pub struct GapScan {
    pub min_gap: f64,
    pub at: [f64; 2],
}

/// Minimum of `gap(x, y)` over the points of a region inside `[lo, hi]` that
/// satisfy `inside`. A dense grid is followed by repeated zooms around the
/// best point until the gap drops below `target` or the cell size underflows.
pub fn gap_scan(
    lo: [f64; 2],
    hi: [f64; 2],
    inside: impl Fn(f64, f64) -> bool,
    gap: impl Fn(f64, f64) -> f64,
    target: f64,
) -> GapScan {
    let mut best = GapScan { min_gap: f64::INFINITY, at: [f64::NAN; 2] };
    let (mut lo, mut hi) = (lo, hi);
    let mut res = 200;
    for _ in 0..40 {
        let hx = (hi[0] - lo[0]) / res as f64;
        let hy = (hi[1] - lo[1]) / res as f64;
        for i in 0..=res {
            for j in 0..=res {
                let (x, y) = (lo[0] + i as f64 * hx, lo[1] + j as f64 * hy);
                if inside(x, y) {
                    let g = gap(x, y);
                    if g < best.min_gap {
                        best = GapScan { min_gap: g, at: [x, y] };
                    }
                }
            }
        }
        if best.min_gap < target || hx.max(hy) < 1e-13 || !best.min_gap.is_finite() {
            break;
        }
        lo = [best.at[0] - 3.0 * hx, best.at[1] - 3.0 * hy];
        hi = [best.at[0] + 3.0 * hx, best.at[1] + 3.0 * hy];
        res = 60;
    }
    best
}

/// A random closed loop in SO(3) given through quaternions `[w, x, y, z]`.
/// The quaternion path runs from `q` to `(-1)^turns q`, so the rotation loop is
/// nontrivial exactly when `turns` is odd.
pub struct RandomQuaternionLoop {
    coeffs: Vec<[[f64; 4]; 2]>,
    offset: [f64; 4],
    axis: [f64; 3],
    turns: u32,
}

impl RandomQuaternionLoop {
    /// Draws coefficients until the unnormalized Fourier path stays away from
    /// the origin, so the normalized path is smooth.
    pub fn new(rng: &mut impl Rng, turns: u32) -> Self {
        loop {
            let coeffs = (0..3)
                .map(|_| {
                    [
                        std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
                        std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
                    ]
                })
                .collect();
            let offset = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let mut axis: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let r = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
            axis.iter_mut().for_each(|a| *a /= r);
            let candidate = Self { coeffs, offset, axis, turns };
            let smallest = (0..512)
                .map(|k| candidate.raw(std::f64::consts::TAU * k as f64 / 512.0))
                .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            if smallest > 0.3 {
                return candidate;
            }
        }
    }

    fn raw(&self, t: f64) -> [f64; 4] {
        let mut r = self.offset;
        for (m, [a, b]) in self.coeffs.iter().enumerate() {
            let f = (m + 1) as f64 * t;
            for i in 0..4 {
                r[i] += a[i] * f.cos() + b[i] * f.sin();
            }
        }
        r
    }

    /// Class expected from the construction: the number of half turns is odd.
    pub fn nontrivial(&self) -> bool {
        self.turns % 2 == 1
    }

    /// `r(t) * exp(turns * t / 2 * axis)` with `r` a closed Fourier path.
    pub fn at(&self, t: f64) -> [f64; 4] {
        let r = self.raw(t);
        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = r.map(|x| x / n);
        let half = 0.5 * self.turns as f64 * t;
        let s = [half.cos(), half.sin() * self.axis[0], half.sin() * self.axis[1], half.sin() * self.axis[2]];
        hamilton(r, s)
    }

    pub fn samples(&self, count: usize) -> Vec<[f64; 4]> {
        (0..=count).map(|k| self.at(std::f64::consts::TAU * k as f64 / count as f64)).collect()
    }
}

pub fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Rotation matrix (row-major) of a unit quaternion `[w, x, y, z]`.
pub fn quaternion_matrix(q: [f64; 4]) -> Vec<f64> {
    let [w, x, y, z] = q;
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
    ]
}
