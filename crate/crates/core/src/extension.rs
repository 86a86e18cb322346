//! Gap-open extension of boundary eigendata over the disc.
//!
//! Given eigenframes `F(theta)` and eigenvalues `lambda_i(theta)` on a loop whose
//! frame loop is contractible, the disc Hamiltonian in polar coordinates is
//!
//! ```text
//! H~(rho, theta) = F~(rho, theta) diag(lambda~(rho, theta)) F~(rho, theta)^T     rho <= 1
//! H~(rho, theta) = H~(1, theta)                                                   rho >  1
//! ```
//!
//! with `lambda~_i = rho lambda_i(theta) + (1 - rho) A_i` for strictly increasing
//! anchors `A_i`, and `F~` a homotopy from the boundary loop (`rho = 1`) to a
//! constant frame (`rho = 0`). The homotopy is built by discrete curve
//! shortening on the 3-sphere followed by a geodesic contraction.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, quat_to_so3, Frame, SymMatrix, UnitQuaternion};
use crate::models::format_real;
use crate::topology::{block_transform, classify_frames, lift_so3, reduce_so4, HomotopyClass};
use crate::transport::TransportResult;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

/// Tolerance on the closing frame and on the `theta` range endpoints.
const CLOSED_TOL: f64 = 1e-8;

/// Largest allowed Frobenius mismatch between the `rho = 1` row and the boundary data.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Eigendata of a nondegenerate Hamiltonian along a closed loop, indexed by
/// `theta` in `[0, 2 pi]`. The last sample closes the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    thetas: Vec<f64>,
    frames: Vec<Frame>,
    eigenvalues: Vec<Vec<f64>>,
}

impl BoundaryData {
    /// Validates the samples and checks that the frame loop is contractible.
    pub fn new(thetas: Vec<f64>, frames: Vec<Frame>, eigenvalues: Vec<Vec<f64>>) -> Result<Self> {
        let len = thetas.len();
        if len < 3 {
            return Err(Error::InvalidInput("boundary data needs at least three samples".into()));
        }
        if frames.len() != len || eigenvalues.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{len} angles, {} frames, {} eigenvalue lists",
                frames.len(),
                eigenvalues.len()
            )));
        }
        if thetas[0].abs() > CLOSED_TOL || (thetas[len - 1] - TAU).abs() > CLOSED_TOL {
            return Err(Error::InvalidInput("angles must run from 0 to 2 pi".into()));
        }
        if thetas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("angles must be strictly increasing".into()));
        }
        let n = frames[0].dim();
        for (k, (f, l)) in frames.iter().zip(&eigenvalues).enumerate() {
            if f.dim() != n || l.len() != n {
                return Err(Error::DimensionMismatch(format!("sample {k} does not have dimension {n}")));
            }
            if l.iter().any(|x| !x.is_finite()) || l.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidInput(format!(
                    "eigenvalues at sample {k} are not strictly increasing"
                )));
            }
        }
        if frames[0].distance(&frames[len - 1]) > CLOSED_TOL {
            return Err(Error::NotTrivial);
        }
        match classify_frames(&frames)? {
            HomotopyClass::Unsupported => {
                return Err(Error::Unsupported(format!("extension for n = {n}")));
            }
            c if c.is_nontrivial() || c == HomotopyClass::SignChangeOnly => {
                return Err(Error::NotTrivial);
            }
            _ => {}
        }
        Ok(Self { thetas, frames, eigenvalues })
    }

    /// Boundary data from a transport; the loop parameter is rescaled to `[0, 2 pi]`.
    pub fn from_transport(r: &TransportResult) -> Result<Self> {
        if !r.sign.is_identity() {
            return Err(Error::NotTrivial);
        }
        let (t0, t1) = (r.ts[0], r.ts[r.ts.len() - 1]);
        let mut thetas: Vec<f64> = r.ts.iter().map(|t| TAU * (t - t0) / (t1 - t0)).collect();
        let last = thetas.len() - 1;
        thetas[last] = TAU;
        Self::new(thetas, r.frames.clone(), r.eigenvalues.clone())
    }

    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    /// Number of samples, including the closing one.
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn eigenvalues(&self) -> &[Vec<f64>] {
        &self.eigenvalues
    }

    /// `F Lambda F^T` at sample `k`.
    pub fn hamiltonian(&self, k: usize) -> SymMatrix {
        SymMatrix::from_spectrum(&self.frames[k], &self.eigenvalues[k]).expect("validated sample")
    }

    /// Smallest adjacent eigenvalue gap over the samples.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .iter()
            .flat_map(|l| l.windows(2).map(|w| w[1] - w[0]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues at an arbitrary angle, linear between samples.
    pub fn eigenvalues_at(&self, theta: f64) -> Vec<f64> {
        let theta = theta.rem_euclid(TAU);
        let k = self.thetas.partition_point(|&t| t <= theta).clamp(1, self.len() - 1);
        let (a, b) = (self.thetas[k - 1], self.thetas[k]);
        let w = ((theta - a) / (b - a)).clamp(0.0, 1.0);
        self.eigenvalues[k - 1]
            .iter()
            .zip(&self.eigenvalues[k])
            .map(|(x, y)| (1.0 - w) * x + w * y)
            .collect()
    }
}

/// Anchors `A_i = i - (n + 1) / 2`.
pub fn default_anchors(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 - (n as f64 + 1.0) / 2.0).collect()
}

fn check_anchors(anchors: &[f64], n: usize) -> Result<()> {
    if anchors.len() != n {
        return Err(Error::InvalidInput(format!("{} anchors for dimension {n}", anchors.len())));
    }
    if anchors.iter().any(|a| !a.is_finite()) || anchors.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("anchors must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::InvalidInput(format!("radius {rho} is not a nonnegative number")));
    }
    Ok(rho.min(1.0))
}

fn blend(lambda: &[f64], anchors: &[f64], rho: f64) -> Vec<f64> {
    lambda.iter().zip(anchors).map(|(l, a)| rho * l + (1.0 - rho) * a).collect()
}

/// `rho lambda_i(theta) + (1 - rho) A_i`; radii above one are clamped to one.
pub fn interpolate_eigenvalues(b: &BoundaryData, anchors: &[f64], rho: f64, theta: f64) -> Result<Vec<f64>> {
    check_anchors(anchors, b.dim())?;
    let rho = check_rho(rho)?;
    Ok(blend(&b.eigenvalues_at(theta), anchors, rho))
}

/// Controls for the sphere contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionConfig {
    /// Sweep budget for curve shortening before giving up.
    pub max_sweeps: usize,
    /// Largest pointwise displacement between stored intermediate loops (radians).
    pub keyframe_step: f64,
    /// Sweeps between diameter checks.
    pub check_every: usize,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        Self { max_sweeps: 200_000, keyframe_step: 0.02, check_every: 16 }
    }
}

/// Table of frames `F~(rho_j, theta_k)` with `rho_j = j / (n_rho - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameHomotopy {
    pub rhos: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `frames[j][k]` is the frame at `(rhos[j], thetas[k])`.
    pub frames: Vec<Vec<Frame>>,
}

impl FrameHomotopy {
    /// Largest rotation distance between neighbouring entries in either direction.
    pub fn max_step(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, row) in self.frames.iter().enumerate() {
            for (k, f) in row.iter().enumerate() {
                if k + 1 < row.len() {
                    worst = worst.max(f.rotation_distance(&row[k + 1]));
                }
                if j + 1 < self.frames.len() {
                    worst = worst.max(f.rotation_distance(&self.frames[j + 1][k]));
                }
            }
        }
        worst
    }
}

/// Contracts the boundary frame loop to a constant with the default configuration.
pub fn contract_frame_loop(b: &BoundaryData, n_rho: usize) -> Result<FrameHomotopy> {
    contract_frame_loop_with(b, n_rho, &ContractionConfig::default())
}

/// Builds a homotopy from the boundary frame loop (`rho = 1`) to the constant
/// first frame (`rho = 0`), sampled on `n_rho` radii and the boundary angles.
pub fn contract_frame_loop_with(b: &BoundaryData, n_rho: usize, cfg: &ContractionConfig) -> Result<FrameHomotopy> {
    if n_rho < 2 {
        return Err(Error::InvalidInput("need at least two radial slices".into()));
    }
    if !(cfg.keyframe_step > 0.0) || cfg.check_every == 0 {
        return Err(Error::InvalidInput("invalid contraction configuration".into()));
    }
    let rhos: Vec<f64> = (0..n_rho).map(|j| j as f64 / (n_rho - 1) as f64).collect();
    let len = b.len();
    let m = len - 1;
    let mut frames: Vec<Vec<Frame>> = Vec::with_capacity(n_rho);
    match b.dim() {
        2 => {
            let alpha = unwrap_angles(&b.frames);
            for &rho in &rhos[..n_rho - 1] {
                frames.push(
                    alpha
                        .iter()
                        .map(|a| rot2(rho * a + (1.0 - rho) * alpha[0]))
                        .collect(),
                );
            }
        }
        3 => {
            let (lift, _) = lift_so3(&b.frames)?;
            let points: Vec<P4> = lift[..m].iter().map(|q| q.to_array()).collect();
            let h = contract_sphere_loop(&points, cfg)?;
            for &rho in &rhos[..n_rho - 1] {
                let row = (0..len)
                    .map(|k| quat_frame(h.at(rho, k % m)))
                    .collect::<Result<Vec<_>>>()?;
                frames.push(row);
            }
        }
        4 => {
            let reduced = reduce_so4(&b.frames)?;
            let (lift, _) = lift_so3(&reduced)?;
            let a_points: Vec<P4> = lift[..m].iter().map(|q| q.to_array()).collect();
            let f_points: Vec<P4> = b.frames[..m]
                .iter()
                .map(|f| {
                    let c = f.column(0);
                    [c[0], c[1], c[2], c[3]]
                })
                .collect();
            let ha = contract_sphere_loop(&a_points, cfg)?;
            let hf = contract_sphere_loop(&f_points, cfg)?;
            for &rho in &rhos[..n_rho - 1] {
                let row = (0..len)
                    .map(|k| {
                        let a = quat_frame(ha.at(rho, k % m))?;
                        let t = block_transform(&hf.at(rho, k % m));
                        Frame::new(4, t.transpose().compose(&embed(&a)).as_slice().to_vec())
                    })
                    .collect::<Result<Vec<_>>>()?;
                frames.push(row);
            }
        }
        n => return Err(Error::Unsupported(format!("extension for n = {n}"))),
    }
    frames.push(b.frames.clone());
    let h = FrameHomotopy { rhos, thetas: b.thetas.clone(), frames };
    let step = h.max_step();
    if step > FRAC_PI_4 {
        return Err(Error::InvalidInput(format!(
            "radial grid too coarse: neighbouring frames differ by {step:.3} rad; use more slices"
        )));
    }
    Ok(h)
}

/// A continuous, gap-open Hamiltonian on the unit disc stored on a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscHamiltonian {
    n: usize,
    rhos: Vec<f64>,
    thetas: Vec<f64>,
    anchors: Vec<f64>,
    /// Row-major in `(rho, theta)`.
    nodes: Vec<SymMatrix>,
}

impl DiscHamiltonian {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn node(&self, j: usize, k: usize) -> &SymMatrix {
        &self.nodes[j * self.thetas.len() + k]
    }

    /// Mutable node access, for building corrupted grids in negative tests.
    pub fn node_mut(&mut self, j: usize, k: usize) -> &mut SymMatrix {
        let cols = self.thetas.len();
        &mut self.nodes[j * cols + k]
    }

    /// Bilinear evaluation at polar coordinates; radii above one take the
    /// boundary value.
    pub fn eval(&self, rho: f64, theta: f64) -> Result<SymMatrix> {
        let rho = check_rho(rho)?;
        if !theta.is_finite() {
            return Err(Error::InvalidInput("angle must be finite".into()));
        }
        let theta = theta.rem_euclid(TAU);
        let (j, u) = cell(&self.rhos, rho);
        let (k, v) = cell(&self.thetas, theta);
        let corner = |a: usize, b: usize| self.node(a, b).as_slice();
        let data: Vec<f64> = (0..self.n * self.n)
            .map(|i| {
                (1.0 - u) * ((1.0 - v) * corner(j, k)[i] + v * corner(j, k + 1)[i])
                    + u * ((1.0 - v) * corner(j + 1, k)[i] + v * corner(j + 1, k + 1)[i])
            })
            .collect();
        SymMatrix::new(self.n, data)
    }

    /// CSV with header `rho,theta,h_1_1,h_1_2,...` (upper triangle, row-major).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,theta");
        for i in 1..=self.n {
            for j in i..=self.n {
                out.push_str(&format!(",h_{i}_{j}"));
            }
        }
        out.push('\n');
        for (j, rho) in self.rhos.iter().enumerate() {
            for (k, theta) in self.thetas.iter().enumerate() {
                let mut fields = vec![format_real(*rho), format_real(*theta)];
                // adding zero turns -0 into 0
                fields.extend(self.node(j, k).upper_triangle().into_iter().map(|x| format_real(x + 0.0)));
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        out
    }
}

fn cell(grid: &[f64], x: f64) -> (usize, f64) {
    let i = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1) - 1;
    let w = ((x - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    (i, w)
}

/// Extension on `n_rho` radial slices with the default contraction settings.
pub fn build_extension(b: &BoundaryData, anchors: &[f64], n_rho: usize) -> Result<DiscHamiltonian> {
    build_extension_with(b, anchors, n_rho, &ContractionConfig::default())
}

pub fn build_extension_with(
    b: &BoundaryData,
    anchors: &[f64],
    n_rho: usize,
    cfg: &ContractionConfig,
) -> Result<DiscHamiltonian> {
    check_anchors(anchors, b.dim())?;
    let h = contract_frame_loop_with(b, n_rho, cfg)?;
    let mut nodes = Vec::with_capacity(n_rho * b.len());
    for (row, &rho) in h.frames.iter().zip(&h.rhos) {
        for (f, lambda) in row.iter().zip(&b.eigenvalues) {
            nodes.push(SymMatrix::from_spectrum(f, &blend(lambda, anchors, rho))?);
        }
    }
    Ok(DiscHamiltonian {
        n: b.dim(),
        rhos: h.rhos,
        thetas: h.thetas,
        anchors: anchors.to_vec(),
        nodes,
    })
}

/// Result of checking an extension against its boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    /// Smallest adjacent eigenvalue gap over all nodes.
    pub min_gap: f64,
    /// `(rho, theta)` of the node with the smallest gap.
    pub min_gap_at: (f64, f64),
    /// Largest Frobenius mismatch between the `rho = 1` row and the boundary Hamiltonian.
    pub boundary_mismatch: f64,
    /// Largest Frobenius jump between neighbouring nodes, including the seam at `2 pi`.
    pub continuity_modulus: f64,
    pub gap_ok: bool,
    pub boundary_ok: bool,
    /// Neighbour jumps stay below a quarter of the minimum gap, so no eigenvalue
    /// crossing can occur inside a grid cell under bilinear evaluation.
    pub continuity_ok: bool,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.gap_ok && self.boundary_ok && self.continuity_ok
    }
}

/// Checks gap, boundary fidelity and continuity of an extension.
pub fn verify_extension(h: &DiscHamiltonian, b: &BoundaryData) -> ExtensionReport {
    let (nr, nt) = (h.rhos.len(), h.thetas.len());
    let mut min_gap = f64::INFINITY;
    let mut min_gap_at = (f64::NAN, f64::NAN);
    for j in 0..nr {
        for k in 0..nt {
            let gap = match eig_sym(h.node(j, k)) {
                Ok((values, _)) => values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
                Err(_) => f64::NAN,
            };
            if !(gap >= min_gap) {
                min_gap = gap;
                min_gap_at = (h.rhos[j], h.thetas[k]);
            }
        }
    }

    let boundary_mismatch = if nt == b.len() && h.dim() == b.dim() {
        (0..nt)
            .map(|k| h.node(nr - 1, k).distance(&b.hamiltonian(k)))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    let mut jump: f64 = 0.0;
    for j in 0..nr {
        for k in 0..nt {
            let here = h.node(j, k);
            if k + 1 < nt {
                jump = jump.max(here.distance(h.node(j, k + 1)));
            }
            if j + 1 < nr {
                jump = jump.max(here.distance(h.node(j + 1, k)));
            }
        }
        jump = jump.max(h.node(j, 0).distance(h.node(j, nt - 1)));
    }

    ExtensionReport {
        min_gap,
        min_gap_at,
        boundary_mismatch,
        continuity_modulus: jump,
        gap_ok: min_gap > 0.0,
        boundary_ok: boundary_mismatch < BOUNDARY_TOL,
        continuity_ok: jump < min_gap / 4.0,
    }
}

fn rot2(a: f64) -> Frame {
    Frame::from_raw(2, vec![a.cos(), -a.sin(), a.sin(), a.cos()])
}

/// Continuous angle of the first column along a closed SO(2) loop.
fn unwrap_angles(frames: &[Frame]) -> Vec<f64> {
    let mut alpha = Vec::with_capacity(frames.len());
    alpha.push(frames[0].get(1, 0).atan2(frames[0].get(0, 0)));
    for w in frames.windows(2) {
        let (a, b) = (w[0].column(0), w[1].column(0));
        let step = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        alpha.push(alpha[alpha.len() - 1] + step);
    }
    alpha
}

fn embed(a: &Frame) -> Frame {
    let mut data = vec![0.0; 16];
    data[0] = 1.0;
    for i in 0..3 {
        for j in 0..3 {
            data[(i + 1) * 4 + j + 1] = a.get(i, j);
        }
    }
    Frame::from_raw(4, data)
}

fn quat_frame(p: P4) -> Result<Frame> {
    quat_to_so3(&UnitQuaternion::from_array(p)?)
}

type P4 = [f64; 4];

fn normalize(p: P4) -> P4 {
    let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    p.map(|x| x / r)
}

/// Great-circle distance between unit vectors, stable for near and far pairs.
fn sphere_angle(a: &P4, b: &P4) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for i in 0..4 {
        diff += (a[i] - b[i]).powi(2);
        sum += (a[i] + b[i]).powi(2);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

fn nlerp(a: &P4, b: &P4, w: f64) -> P4 {
    normalize(std::array::from_fn(|i| (1.0 - w) * a[i] + w * b[i]))
}

/// Point at fraction `s` of the geodesic from `a` to `b`.
fn slerp(a: &P4, b: &P4, s: f64) -> P4 {
    let omega = sphere_angle(a, b);
    if omega < 1e-12 {
        return nlerp(a, b, s);
    }
    let (wa, wb) = (((1.0 - s) * omega).sin() / omega.sin(), (s * omega).sin() / omega.sin());
    normalize(std::array::from_fn(|i| wa * a[i] + wb * b[i]))
}

/// Loops on the 3-sphere ordered from the input (`rho = 1`) to the constant
/// basepoint (`rho = 0`).
struct SphereHomotopy {
    rhos: Vec<f64>,
    loops: Vec<Vec<P4>>,
}

impl SphereHomotopy {
    fn at(&self, rho: f64, k: usize) -> P4 {
        // rhos is decreasing
        let i = self.rhos.partition_point(|&r| r > rho).clamp(1, self.rhos.len() - 1);
        let (hi, lo) = (self.rhos[i - 1], self.rhos[i]);
        let w = if hi > lo { ((hi - rho) / (hi - lo)).clamp(0.0, 1.0) } else { 1.0 };
        match w {
            0.0 => self.loops[i - 1][k],
            1.0 => self.loops[i][k],
            _ => nlerp(&self.loops[i - 1][k], &self.loops[i][k], w),
        }
    }
}

fn diameter(points: &[P4]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(sphere_angle(a, b));
        }
    }
    d
}

fn max_displacement(a: &[P4], b: &[P4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| sphere_angle(x, y)).fold(0.0, f64::max)
}

/// Shrinks a closed loop on the 3-sphere (cyclic samples, basepoint at index 0)
/// to its basepoint.
///
/// Each sweep replaces every non-basepoint sample, in order, by the normalized
/// midpoint of its current neighbours. Once the loop fits in a set of diameter
/// below pi/2 it is pulled to the basepoint along geodesics. Intermediate loops
/// are kept whenever some sample has moved `keyframe_step` since the last one,
/// and the radial parameter is proportional to the remaining displacement.
fn contract_sphere_loop(points: &[P4], cfg: &ContractionConfig) -> Result<SphereHomotopy> {
    let m = points.len();
    let base = points[0];
    let mut current = points.to_vec();
    let mut loops = vec![current.clone()];
    let mut travelled = vec![0.0];
    let mut sweeps = 0;
    loop {
        if sweeps % cfg.check_every == 0 {
            let radius = current.iter().map(|p| sphere_angle(p, &base)).fold(0.0, f64::max);
            if radius < FRAC_PI_2 {
                let diam = diameter(&current);
                if diam < FRAC_PI_2 {
                    break;
                }
            }
            if sweeps >= cfg.max_sweeps {
                return Err(Error::ShorteningStalled { iterations: sweeps, diameter: diameter(&current) });
            }
        }
        for k in 1..m {
            let (a, b) = (current[k - 1], current[(k + 1) % m]);
            current[k] = normalize(std::array::from_fn(|i| a[i] + b[i]));
        }
        sweeps += 1;
        let last = &loops[loops.len() - 1];
        let moved = max_displacement(last, &current);
        if moved >= cfg.keyframe_step {
            travelled.push(travelled[travelled.len() - 1] + moved);
            loops.push(current.clone());
        }
    }
    let moved = max_displacement(&loops[loops.len() - 1], &current);
    if moved > 0.0 {
        travelled.push(travelled[travelled.len() - 1] + moved);
        loops.push(current.clone());
    }

    let reach = current.iter().map(|p| sphere_angle(p, &base)).fold(0.0, f64::max);
    let steps = (reach / cfg.keyframe_step).ceil() as usize;
    for s in 1..=steps {
        let frac = 1.0 - s as f64 / steps as f64;
        let pulled: Vec<P4> = current.iter().map(|p| slerp(&base, p, frac)).collect();
        travelled.push(travelled[travelled.len() - 1] + reach / steps as f64);
        loops.push(pulled);
    }
    if loops.len() == 1 {
        loops.push(vec![base; m]);
        travelled.push(1.0);
    }

    let total = travelled[travelled.len() - 1];
    let rhos = travelled.iter().map(|t| 1.0 - t / total).collect();
    Ok(SphereHomotopy { rhos, loops })
}
