//! Continuous transport of the eigenframe around a closed loop in parameter space.
//!
//! Consecutive eigenframes are aligned by the sign of each column's overlap with
//! the previous frame. Steps whose smallest overlap falls below the configured
//! floor are bisected along the chord. After one circuit the transported frame
//! equals the initial one up to a diagonal sign matrix `D`; any `-1` in `D` is a
//! sign change of that eigenvector.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, Frame};
use crate::models::{poly::format_real, HamiltonianModel};
use std::f64::consts::TAU;
use std::fmt;

/// Largest allowed distance between the first and last point of a closed loop.
pub const CLOSURE_TOL: f64 = 1e-12;

/// A closed polygonal loop `Q(t_0), ..., Q(t_N)` with `Q(t_N) = Q(t_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    d: usize,
    ts: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl LoopSpec {
    pub fn new(ts: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if ts.len() != points.len() {
            return Err(Error::InvalidLoop(format!(
                "{} t-values for {} points",
                ts.len(),
                points.len()
            )));
        }
        if points.len() < 4 {
            return Err(Error::InvalidLoop(format!(
                "need at least 4 samples (N >= 3), got {}",
                points.len()
            )));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidLoop("parameter dimension must be positive".into()));
        }
        if let Some(k) = points.iter().position(|p| p.len() != d) {
            return Err(Error::InvalidLoop(format!("sample {k} has dimension {}, expected {d}", points[k].len())));
        }
        if ts.iter().chain(points.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidLoop("non-finite sample".into()));
        }
        if let Some(k) = ts.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidLoop(format!("t is not strictly increasing at sample {}", k + 1)));
        }
        let gap = distance(&points[0], &points[points.len() - 1]);
        if gap > CLOSURE_TOL {
            return Err(Error::InvalidLoop(format!("loop is not closed (end point is {gap:e} from start)")));
        }
        Ok(Self { d, ts, points })
    }

    /// Samples `f(theta)` at `theta_k = 2 pi k / samples`, closing the loop
    /// with an exact copy of the first point.
    pub fn from_fn(samples: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidLoop("need at least 3 samples".into()));
        }
        let mut ts: Vec<f64> = (0..samples).map(|k| TAU * k as f64 / samples as f64).collect();
        let mut points: Vec<Vec<f64>> = ts.iter().map(|&t| f(t)).collect();
        ts.push(TAU);
        points.push(points[0].clone());
        Self::new(ts, points)
    }

    /// Circle of `radius` about the origin in the first two coordinates of `R^d`.
    pub fn circle(d: usize, radius: f64, samples: usize) -> Result<Self> {
        Self::circle_about(&vec![0.0; d], radius, samples)
    }

    /// Circle of `radius` about `center`, in the plane of the first two coordinates.
    pub fn circle_about(center: &[f64], radius: f64, samples: usize) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::InvalidLoop("a circle needs at least two parameters".into()));
        }
        Self::from_fn(samples, |t| {
            let mut q = center.to_vec();
            q[0] += radius * t.cos();
            q[1] += radius * t.sin();
            q
        })
    }

    /// Closed polygon through `vertices` (not repeated at the end), each edge
    /// split into `per_edge` equal pieces; `t` counts pieces.
    pub fn polygon(vertices: &[Vec<f64>], per_edge: usize) -> Result<Self> {
        if vertices.len() < 2 || per_edge == 0 {
            return Err(Error::InvalidLoop("polygon needs 2+ vertices and per_edge >= 1".into()));
        }
        let mut points = Vec::new();
        for (i, a) in vertices.iter().enumerate() {
            let b = &vertices[(i + 1) % vertices.len()];
            if a.len() != b.len() {
                return Err(Error::InvalidLoop("polygon vertices differ in dimension".into()));
            }
            for s in 0..per_edge {
                let w = s as f64 / per_edge as f64;
                points.push(a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect());
            }
        }
        points.push(vertices[0].clone());
        let ts = (0..points.len()).map(|k| k as f64).collect();
        Self::new(ts, points)
    }

    /// Reads the loop-file format: `params <d>` then one `t q1 ... qd` line per sample.
    pub fn parse(text: &str) -> Result<Self> {
        let mut d: Option<usize> = None;
        let mut ts = Vec::new();
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let column_of = |field: &str| field.as_ptr() as usize - raw.as_ptr() as usize + 1;
            let fields: Vec<&str> = content.split_whitespace().collect();
            let Some(dim) = d else {
                if fields.len() != 2 || fields[0] != "params" {
                    return Err(Error::Syntax {
                        line,
                        column: column_of(fields[0]),
                        message: "expected 'params <d>' header".into(),
                    });
                }
                let parsed = fields[1].parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(|| Error::Syntax {
                    line,
                    column: column_of(fields[1]),
                    message: format!("invalid parameter count '{}'", fields[1]),
                })?;
                d = Some(parsed);
                continue;
            };
            if fields.len() != dim + 1 {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: format!("expected {} numbers (t and {dim} coordinates), found {}", dim + 1, fields.len()),
                });
            }
            let mut values = Vec::with_capacity(dim + 1);
            for f in &fields {
                values.push(f.parse::<f64>().map_err(|_| Error::Syntax {
                    line,
                    column: column_of(f),
                    message: format!("malformed number '{f}'"),
                })?);
            }
            ts.push(values[0]);
            points.push(values[1..].to_vec());
        }
        if d.is_none() {
            return Err(Error::Syntax { line: 1, column: 1, message: "missing 'params <d>' header".into() });
        }
        Self::new(ts, points)
    }

    /// Loop-file text that parses back to the same values.
    pub fn to_text(&self) -> String {
        let mut out = format!("params {}\n", self.d);
        for (t, q) in self.ts.iter().zip(&self.points) {
            out.push_str(&format_real(*t));
            for v in q {
                out.push(' ');
                out.push_str(&format_real(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of samples including the closing repeat of the first point.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// The same loop traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let (t0, tn) = (self.ts[0], self.ts[self.ts.len() - 1]);
        let ts = self.ts.iter().rev().map(|t| t0 + tn - t).collect();
        let points = self.points.iter().rev().cloned().collect();
        Self { d: self.d, ts, points }
    }

    /// The same loop traversed twice.
    pub fn doubled(&self) -> Self {
        let period = self.ts[self.ts.len() - 1] - self.ts[0];
        let mut ts = self.ts.clone();
        let mut points = self.points.clone();
        ts.extend(self.ts[1..].iter().map(|t| t + period));
        points.extend(self.points[1..].iter().cloned());
        Self { d: self.d, ts, points }
    }

    /// The same loop started at sample `offset`.
    pub fn rotated(&self, offset: usize) -> Self {
        let n = self.points.len() - 1;
        let offset = offset % n;
        let period = self.ts[n] - self.ts[0];
        let mut ts = Vec::with_capacity(n + 1);
        let mut points = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let src = (offset + k) % n;
            let wraps = if offset + k >= n && k > 0 { period } else { 0.0 };
            ts.push(self.ts[src] + wraps);
            points.push(self.points[src].clone());
        }
        Self { d: self.d, ts, points }
    }

    /// Splits every segment into `factor` equal chord pieces.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let mut ts = vec![self.ts[0]];
        let mut points = vec![self.points[0].clone()];
        for k in 0..self.points.len() - 1 {
            let (a, b) = (&self.points[k], &self.points[k + 1]);
            for s in 1..=factor {
                let w = s as f64 / factor as f64;
                ts.push(self.ts[k] + w * (self.ts[k + 1] - self.ts[k]));
                if s == factor {
                    points.push(b.clone());
                } else {
                    points.push(a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect());
                }
            }
        }
        Self { d: self.d, ts, points }
    }
}

/// Tuning for [`transport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    /// Smallest acceptable `|<psi_i(t_k)|psi_i(t_k+1)>|` for any column.
    pub overlap_floor: f64,
    /// How many times one input segment may be bisected.
    pub max_refinement_depth: usize,
    /// Adjacent eigenvalues closer than this count as degenerate.
    pub gap_floor: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self { overlap_floor: 0.9, max_refinement_depth: 20, gap_floor: 1e-9 }
    }
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.overlap_floor > 0.0 && self.overlap_floor < 1.0) {
            return Err(Error::InvalidInput(format!(
                "overlap_floor must lie in (0, 1), got {}",
                self.overlap_floor
            )));
        }
        if !(self.gap_floor > 0.0 && self.gap_floor.is_finite()) {
            return Err(Error::InvalidInput(format!("gap_floor must be positive, got {}", self.gap_floor)));
        }
        Ok(())
    }
}

/// Diagonal `+-1` matrix with `F_end = F_0 D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn identity(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("sign pattern entries must be +1 or -1".into()));
        }
        Ok(Self(signs))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&s| s == 1)
    }

    pub fn is_minus_identity(&self) -> bool {
        self.0.iter().all(|&s| s == -1)
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn det(&self) -> i8 {
        self.0.iter().product()
    }

    /// Number of eigenvectors that change sign.
    pub fn flips(&self) -> usize {
        self.0.iter().filter(|&&s| s == -1).count()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "diag({})", entries.join(", "))
    }
}

/// Frames and spectra along a transported loop.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// Parameter values, including samples inserted by refinement.
    pub ts: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Continuity-aligned eigenframes, one per sample; the last sits at the
    /// closing point and equals `frames[0] * D`.
    pub frames: Vec<Frame>,
    /// Ascending eigenvalues at each sample.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Smallest adjacent-eigenvalue gap over all samples.
    pub min_gap: f64,
    pub sign: SignPattern,
    /// Smallest `|overlap|` over the columns for each accepted step.
    pub step_overlaps: Vec<f64>,
    /// Number of samples inserted by bisection.
    pub refinements: usize,
    /// Deepest bisection level reached.
    pub max_depth_used: usize,
}

impl TransportResult {
    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    /// Eigenvalue `i` (ascending order) along the loop.
    pub fn track(&self, i: usize) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| v[i]).collect()
    }

    pub fn min_step_overlap(&self) -> f64 {
        self.step_overlaps.iter().copied().fold(1.0, f64::min)
    }
}

struct Transporter<'a> {
    model: &'a HamiltonianModel,
    cfg: TransportConfig,
    out: TransportResult,
}

impl Transporter<'_> {
    fn spectrum(&self, t: f64, q: &[f64]) -> Result<(Vec<f64>, Frame, f64)> {
        let (vals, frame) = eig_sym(&self.model.eval(q)?)?;
        let gap = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap <= self.cfg.gap_floor {
            return Err(Error::GapCollapse { t, gap });
        }
        Ok((vals, frame, gap))
    }

    fn push(&mut self, t: f64, q: Vec<f64>, vals: Vec<f64>, frame: Frame, gap: f64) {
        self.out.min_gap = self.out.min_gap.min(gap);
        self.out.ts.push(t);
        self.out.points.push(q);
        self.out.eigenvalues.push(vals);
        self.out.frames.push(frame);
    }

    fn advance(&mut self, t: f64, q: &[f64], depth: usize) -> Result<()> {
        let (vals, raw, gap) = self.spectrum(t, q)?;
        let prev = self.out.frames.last().expect("transport starts with a frame");
        let n = raw.dim();
        let overlaps: Vec<f64> = (0..n).map(|i| prev.column_overlap(&raw, i)).collect();
        let signs: Vec<f64> = overlaps.iter().map(|&o| if o < 0.0 { -1.0 } else { 1.0 }).collect();
        let min_abs = overlaps.iter().map(|o| o.abs()).fold(f64::INFINITY, f64::min);
        let aligned = raw.with_column_signs(&signs);

        if min_abs >= self.cfg.overlap_floor && aligned.det() > 0.0 {
            self.out.step_overlaps.push(min_abs);
            self.push(t, q.to_vec(), vals, aligned, gap);
            return Ok(());
        }
        let t_prev = *self.out.ts.last().expect("nonempty");
        if depth >= self.cfg.max_refinement_depth {
            return Err(Error::RefinementExhausted { t_start: t_prev, t_end: t });
        }
        let q_prev = self.out.points.last().expect("nonempty").clone();
        let mid: Vec<f64> = q_prev.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
        let t_mid = 0.5 * (t_prev + t);
        self.out.refinements += 1;
        self.out.max_depth_used = self.out.max_depth_used.max(depth + 1);
        self.advance(t_mid, &mid, depth + 1)?;
        self.advance(t, q, depth + 1)
    }
}

/// Transports the eigenframe of `model` around `lp`.
pub fn transport(model: &HamiltonianModel, lp: &LoopSpec, cfg: &TransportConfig) -> Result<TransportResult> {
    cfg.validate()?;
    if lp.dim() != model.dim_params() {
        return Err(Error::DimensionMismatch(format!(
            "loop has {} parameters but model '{}' takes {}",
            lp.dim(),
            model.name(),
            model.dim_params()
        )));
    }
    let n = model.dim_matrix();
    let mut tr = Transporter {
        model,
        cfg: *cfg,
        out: TransportResult {
            ts: Vec::with_capacity(lp.len()),
            points: Vec::with_capacity(lp.len()),
            frames: Vec::with_capacity(lp.len()),
            eigenvalues: Vec::with_capacity(lp.len()),
            min_gap: f64::INFINITY,
            sign: SignPattern::identity(n),
            step_overlaps: Vec::with_capacity(lp.len()),
            refinements: 0,
            max_depth_used: 0,
        },
    };
    let (t0, q0) = (lp.ts[0], &lp.points[0]);
    let (vals, frame, gap) = tr.spectrum(t0, q0)?;
    tr.push(t0, q0.clone(), vals, frame, gap);
    for k in 1..lp.len() {
        tr.advance(lp.ts[k], &lp.points[k], 0)?;
    }

    let mut out = tr.out;
    let first = &out.frames[0];
    let last = out.frames.last().expect("nonempty");
    let mut signs = Vec::with_capacity(n);
    for i in 0..n {
        let o = first.column_overlap(last, i);
        if o.abs() < 0.5 {
            // Same parameter point, same nondegenerate spectrum: columns agree up to sign.
            return Err(Error::InvalidLoop(format!(
                "closing frame does not match the initial frame (column {} overlap {o:.3})",
                i + 1
            )));
        }
        signs.push(if o < 0.0 { -1 } else { 1 });
    }
    out.sign = SignPattern(signs);
    debug_assert_eq!(out.sign.det(), 1);
    Ok(out)
}

/// The terminal sign matrix `D` of a transport.
pub fn sign_pattern(r: &TransportResult) -> SignPattern {
    r.sign.clone()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
