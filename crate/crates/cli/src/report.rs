//! JSON documents written by the command line tool.

use frameloop::extension::ExtensionReport;
use frameloop::topology::{HomotopyClass, Verdict, Z2};
use frameloop::transport::TransportConfig;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Model constants in declaration order.
#[derive(Debug, Clone)]
pub struct Constants(pub Vec<(&'static str, f64)>);

impl Serialize for Constants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoopDescription {
    Circle { radius: f64, samples: usize },
    File { path: String, samples: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub overlap_floor: f64,
    pub max_refinement_depth: usize,
    pub gap_floor: f64,
}

impl From<&TransportConfig> for ConfigEcho {
    fn from(c: &TransportConfig) -> Self {
        Self {
            overlap_floor: c.overlap_floor,
            max_refinement_depth: c.max_refinement_depth,
            gap_floor: c.gap_floor,
        }
    }
}

/// Result of one classification run. Field order is the serialized key order.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub model: String,
    pub constants: Constants,
    #[serde(rename = "loop")]
    pub loop_desc: LoopDescription,
    pub n: usize,
    pub d: usize,
    pub min_gap: f64,
    pub sign_pattern: Vec<i8>,
    pub class_kind: &'static str,
    pub winding: Option<i64>,
    pub z2: Option<&'static str>,
    pub degeneracy_implied: bool,
    pub evidence: &'static str,
    pub samples_used: usize,
    pub refinements: usize,
    pub runtime_ms: f64,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub caveat: Option<String>,
}

pub struct RunContext {
    pub model: String,
    pub constants: Constants,
    pub loop_desc: LoopDescription,
    pub n: usize,
    pub d: usize,
    pub config: ConfigEcho,
}

impl RunReport {
    pub fn new(ctx: RunContext, v: &Verdict, runtime_ms: f64) -> Self {
        let (winding, z2) = match v.class {
            HomotopyClass::Winding(w) => (Some(w), None),
            HomotopyClass::Z2(Z2::Trivial) => (None, Some("trivial")),
            HomotopyClass::Z2(Z2::Nontrivial) => (None, Some("nontrivial")),
            HomotopyClass::SignChangeOnly | HomotopyClass::Unsupported => (None, None),
        };
        Self {
            model: ctx.model,
            constants: ctx.constants,
            loop_desc: ctx.loop_desc,
            n: ctx.n,
            d: ctx.d,
            min_gap: v.diagnostics.min_gap,
            sign_pattern: v.sign.as_slice().to_vec(),
            class_kind: v.class.kind(),
            winding,
            z2,
            degeneracy_implied: v.degeneracy_implied,
            evidence: v.evidence.as_str(),
            samples_used: v.diagnostics.samples,
            refinements: v.diagnostics.refinements,
            runtime_ms,
            version: VERSION,
            config: ctx.config,
            caveat: v.caveat.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPoint {
    pub rho: f64,
    pub theta: f64,
}

/// Verification summary written by `extend`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtendReport {
    pub model: String,
    pub constants: Constants,
    #[serde(rename = "loop")]
    pub loop_desc: LoopDescription,
    pub n: usize,
    pub rho_slices: usize,
    pub theta_samples: usize,
    pub anchors: Vec<f64>,
    pub min_gap: f64,
    pub min_gap_at: GridPoint,
    pub boundary_mismatch: f64,
    pub continuity_modulus: f64,
    pub gap_ok: bool,
    pub boundary_ok: bool,
    pub continuity_ok: bool,
    pub passed: bool,
    pub output: String,
    pub version: &'static str,
}

impl ExtendReport {
    pub fn new(ctx: RunContext, rep: &ExtensionReport, grid: (usize, usize), anchors: Vec<f64>, output: String) -> Self {
        Self {
            model: ctx.model,
            constants: ctx.constants,
            loop_desc: ctx.loop_desc,
            n: ctx.n,
            rho_slices: grid.0,
            theta_samples: grid.1,
            anchors,
            min_gap: rep.min_gap,
            min_gap_at: GridPoint { rho: rep.min_gap_at.0, theta: rep.min_gap_at.1 },
            boundary_mismatch: rep.boundary_mismatch,
            continuity_modulus: rep.continuity_modulus,
            gap_ok: rep.gap_ok,
            boundary_ok: rep.boundary_ok,
            continuity_ok: rep.continuity_ok,
            passed: rep.passed(),
            output,
            version: VERSION,
        }
    }
}
