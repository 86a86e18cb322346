//! Homotopy class of a loop of eigenframes.
//!
//! SO(2) loops carry an integer winding number. For n >= 3 the fundamental
//! group is Z2: a loop is nontrivial exactly when its lift to the double cover
//! ends at minus its start. SO(3) loops are lifted to unit quaternions; SO(4)
//! loops are first reduced to SO(3) by left-multiplying with a contractible
//! loop that fixes the first basis vector.

use crate::error::{Error, Result};
use crate::linalg::{axis_angle, dot, so3_to_quat, AxisAngle, Frame, UnitQuaternion};
use crate::models::HamiltonianModel;
use crate::transport::{transport, LoopSpec, SignPattern, TransportConfig, TransportResult};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, TAU};

/// How close the last frame must be to the first for the path to count as closed.
const CLOSED_TOL: f64 = 1e-8;

/// Default half-width of the band below `phi = pi` where piercings are looked for.
pub const PIERCING_BAND: f64 = 1e-3;

/// Tolerance for the first row and column of the reduced SO(4) frame.
pub const BLOCK_TOL: f64 = 1e-9;

/// Element of the two-element group Z2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Z2 {
    Trivial,
    Nontrivial,
}

impl Z2 {
    pub fn is_trivial(self) -> bool {
        self == Z2::Trivial
    }

    fn from_parity(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Z2::Trivial
        } else {
            Z2::Nontrivial
        }
    }
}

/// Homotopy data of a transported frame path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomotopyClass {
    /// Winding number of an SO(2) loop.
    Winding(i64),
    /// Class of an SO(3) or SO(4) loop.
    Z2(Z2),
    /// Some eigenvector changed sign, so the frames do not close into a loop.
    SignChangeOnly,
    /// n >= 5 with no sign change; no classifier is available.
    Unsupported,
}

impl HomotopyClass {
    pub fn is_nontrivial(&self) -> bool {
        match self {
            HomotopyClass::Winding(w) => *w != 0,
            HomotopyClass::Z2(z) => !z.is_trivial(),
            HomotopyClass::SignChangeOnly | HomotopyClass::Unsupported => false,
        }
    }

    /// Stable lowercase name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            HomotopyClass::Winding(_) => "winding",
            HomotopyClass::Z2(_) => "z2",
            HomotopyClass::SignChangeOnly => "sign_change_only",
            HomotopyClass::Unsupported => "unsupported",
        }
    }
}

/// Why a degeneracy is implied, if it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    SignChange,
    NontrivialClass,
    None,
}

impl Evidence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Evidence::SignChange => "SignChange",
            Evidence::NontrivialClass => "NontrivialClass",
            Evidence::None => "None",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub min_gap: f64,
    pub samples: usize,
    pub refinements: usize,
    pub max_depth_used: usize,
}

/// Outcome of the degeneracy test on one loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    /// True exactly when `evidence` is not [`Evidence::None`].
    pub degeneracy_implied: bool,
    pub evidence: Evidence,
    pub class: HomotopyClass,
    pub sign: SignPattern,
    pub diagnostics: Diagnostics,
    /// Explanation attached to negative or partial outcomes.
    pub caveat: Option<String>,
}

fn check_closed(frames: &[Frame], n: usize) -> Result<()> {
    if frames.len() < 2 {
        return Err(Error::InvalidInput("a frame loop needs at least two frames".into()));
    }
    if let Some(k) = frames.iter().position(|f| f.dim() != n) {
        return Err(Error::InvalidInput(format!(
            "frame {k} has dimension {}, expected {n}",
            frames[k].dim()
        )));
    }
    let gap = frames[0].distance(&frames[frames.len() - 1]);
    if gap > CLOSED_TOL {
        return Err(Error::InvalidInput(format!(
            "frame path is not closed (last frame is {gap:.3e} from the first)"
        )));
    }
    Ok(())
}

/// Net number of counterclockwise turns of the first frame column in the
/// `(|1>, |2>)` plane.
pub fn winding_so2(frames: &[Frame]) -> Result<i64> {
    check_closed(frames, 2)?;
    let mut total = 0.0;
    for (k, w) in frames.windows(2).enumerate() {
        let (a, b) = (w[0].column(0), w[1].column(0));
        let step = (a[0] * b[1] - a[1] * b[0]).atan2(dot(&a, &b));
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::StepTooLarge { index: k });
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// Lifts an SO(3) loop to unit quaternions by sign continuity.
///
/// The lift starts at the canonical preimage of the first frame. The loop is
/// nontrivial when the lift of the closing frame lands on `-q_0`.
pub fn lift_so3(frames: &[Frame]) -> Result<(Vec<UnitQuaternion>, Z2)> {
    check_closed(frames, 3)?;
    let mut path = Vec::with_capacity(frames.len());
    path.push(so3_to_quat(&frames[0])?);
    for (k, f) in frames.iter().enumerate().skip(1) {
        let prev = path[k - 1];
        let mut q = so3_to_quat(f)?;
        let d = prev.dot(q);
        if d.abs() < FRAC_1_SQRT_2 {
            return Err(Error::StepTooLarge { index: k - 1 });
        }
        if d < 0.0 {
            q = q.neg();
        }
        path.push(q);
    }
    let class = if path[path.len() - 1].dot(path[0]) > 0.0 {
        Z2::Trivial
    } else {
        Z2::Nontrivial
    };
    Ok((path, class))
}

/// Boundary piercings of an SO(3) loop in the ball-of-radius-pi picture.
#[derive(Debug, Clone, PartialEq)]
pub struct PiercingReport {
    pub piercings: usize,
    pub class: Z2,
    /// Axis-angle data per frame, in loop order.
    pub axis_angles: Vec<AxisAngle>,
}

/// Counts boundary piercings with the default band [`PIERCING_BAND`].
pub fn piercing_parity(frames: &[Frame]) -> Result<PiercingReport> {
    piercing_parity_with(frames, PIERCING_BAND)
}

/// Counts boundary piercings: steps across which the rotation axis reverses
/// while `phi` is near pi. The loop is nontrivial when the count is odd.
///
/// A step with an endpoint within `band` of pi is a piercing when the axes are
/// clearly antiparallel and [`Error::AmbiguousPiercing`] when they are neither
/// clearly parallel nor antiparallel. Outside the band, an axis reversal is a
/// piercing when the two frames are close (rotation distance below pi/4) while
/// their ball vectors `phi * axis` are far apart, which only happens when the
/// sampled loop crossed the boundary between the two samples. Reversals with
/// close ball vectors (passages near the identity) are ignored; any other
/// reversal is ambiguous and calls for a finer sampling of the loop.
pub fn piercing_parity_with(frames: &[Frame], band: f64) -> Result<PiercingReport> {
    check_closed(frames, 3)?;
    // The closing frame is replaced by the first so both ends read the same axis.
    let body = &frames[..frames.len() - 1];
    let aa: Vec<AxisAngle> = body.iter().map(axis_angle).collect::<Result<_>>()?;
    let m = aa.len();
    let mut piercings = 0;
    for k in 0..m {
        let (a, b) = (&aa[k], &aa[(k + 1) % m]);
        let d = dot(&a.axis, &b.axis);
        let near_boundary = a.phi >= PI - band || b.phi >= PI - band;
        if near_boundary {
            if d < -0.5 {
                piercings += 1;
            } else if d < 0.5 {
                return Err(Error::AmbiguousPiercing { index: k });
            }
        } else if d < 0.0 {
            let (ra, rb) = (a.ball_vector(), b.ball_vector());
            let jump = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if jump >= FRAC_PI_2 {
                if body[k].rotation_distance(&body[(k + 1) % m]) < FRAC_PI_4 {
                    piercings += 1;
                } else {
                    return Err(Error::AmbiguousPiercing { index: k });
                }
            }
        }
    }
    let mut axis_angles = aa;
    axis_angles.push(axis_angles[0]);
    Ok(PiercingReport { piercings, class: Z2::from_parity(piercings), axis_angles })
}

/// The SO(4) element of the block transform built from a unit 4-vector `f`.
///
/// Its first row is `f`, so `T(f) F` maps the first column of `F` to `e1`.
pub fn block_transform(f: &[f64]) -> Frame {
    let (a, b, c, d) = (f[0], f[1], f[2], f[3]);
    Frame::from_raw(
        4,
        vec![
            a, b, c, d, //
            -b, a, -d, c, //
            -c, d, a, -b, //
            -d, -c, b, a,
        ],
    )
}

/// Reduces an SO(4) loop `F(t)` to the SO(3) loop `A(t)` with
/// `T(f(t)) F(t) = diag(1, A(t))`, where `f` is the first column of `F`.
pub fn reduce_so4(frames: &[Frame]) -> Result<Vec<Frame>> {
    check_closed(frames, 4)?;
    frames
        .iter()
        .enumerate()
        .map(|(k, f)| reduce_one(k, f))
        .collect()
}

pub(crate) fn reduce_one(index: usize, f: &Frame) -> Result<Frame> {
    let m = block_transform(&f.column(0)).compose(f);
    let mut deviation = (m.get(0, 0) - 1.0).abs();
    for j in 1..4 {
        deviation = deviation.max(m.get(0, j).abs()).max(m.get(j, 0).abs());
    }
    if deviation > BLOCK_TOL {
        return Err(Error::BlockLeakage { index, deviation });
    }
    let mut block = Vec::with_capacity(9);
    for i in 1..4 {
        for j in 1..4 {
            block.push(m.get(i, j));
        }
    }
    Frame::new(3, block)
}

/// Sign pattern between the first and last frame of a path.
pub fn path_sign(frames: &[Frame]) -> SignPattern {
    let first = &frames[0];
    let last = &frames[frames.len() - 1];
    let signs = (0..first.dim())
        .map(|i| if first.column_overlap(last, i) < 0.0 { -1 } else { 1 })
        .collect();
    SignPattern::from_signs(signs).expect("entries are +-1")
}

/// Homotopy class of a transported frame path.
pub fn classify_frames(frames: &[Frame]) -> Result<HomotopyClass> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("empty frame path".into()));
    }
    if !path_sign(frames).is_identity() {
        return Ok(HomotopyClass::SignChangeOnly);
    }
    match frames[0].dim() {
        2 => Ok(HomotopyClass::Winding(winding_so2(frames)?)),
        3 => Ok(HomotopyClass::Z2(lift_so3(frames)?.1)),
        4 => Ok(HomotopyClass::Z2(lift_so3(&reduce_so4(frames)?)?.1)),
        _ => Ok(HomotopyClass::Unsupported),
    }
}

/// Turns a transport into a verdict.
pub fn verdict_from_transport(r: &TransportResult) -> Result<Verdict> {
    let class = classify_frames(&r.frames)?;
    let (evidence, caveat) = match class {
        HomotopyClass::SignChangeOnly => (Evidence::SignChange, None),
        HomotopyClass::Unsupported => (
            Evidence::None,
            Some(format!(
                "no eigenvector changes sign; the homotopy class is not computed for n = {} >= 5",
                r.dim()
            )),
        ),
        c if c.is_nontrivial() => (Evidence::NontrivialClass, None),
        _ => (
            Evidence::None,
            Some(
                "inconclusive: the frame loop is contractible, so no test based on these \
                 eigenvectors alone can imply a degeneracy"
                    .into(),
            ),
        ),
    };
    Ok(Verdict {
        degeneracy_implied: evidence != Evidence::None,
        evidence,
        class,
        sign: r.sign.clone(),
        diagnostics: Diagnostics {
            min_gap: r.min_gap,
            samples: r.frames.len(),
            refinements: r.refinements,
            max_depth_used: r.max_depth_used,
        },
        caveat,
    })
}

/// How often [`classify`] doubles the loop sampling after a step that is too
/// coarse for the class computation.
const CLASSIFY_RETRIES: usize = 4;

/// Runs the full degeneracy test of `model` on the loop `lp`.
pub fn classify(model: &HamiltonianModel, lp: &LoopSpec, cfg: &TransportConfig) -> Result<Verdict> {
    Ok(classify_with_transport(model, lp, cfg)?.0)
}

/// [`classify`], also returning the transport the verdict was computed from.
pub fn classify_with_transport(
    model: &HamiltonianModel,
    lp: &LoopSpec,
    cfg: &TransportConfig,
) -> Result<(Verdict, TransportResult)> {
    let mut current = lp.clone();
    let mut attempt = 0;
    loop {
        let r = transport(model, &current, cfg)?;
        match verdict_from_transport(&r) {
            Ok(v) => return Ok((v, r)),
            Err(Error::StepTooLarge { .. }) if attempt < CLASSIFY_RETRIES => {
                attempt += 1;
                current = current.refined(2);
            }
            Err(e) => return Err(e),
        }
    }
}
