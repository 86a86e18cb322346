//! Parametrized real symmetric Hamiltonians: three Jahn-Teller coupling
//! matrices and user-defined polynomial matrices.

mod parse;
pub mod poly;

pub use parse::{format_model, parse_model};
pub use poly::{format_real, Polynomial};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use poly::Horner;

/// Upper-triangle polynomial entries of an `n x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Polynomial>,
    horner: Vec<Horner>,
}

impl PolyMatrix {
    pub fn new(n: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), n * (n + 1) / 2, "need n(n+1)/2 upper-triangle entries");
        let horner = entries.iter().map(Polynomial::horner).collect();
        Self { n, entries, horner }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    /// Polynomial at 0-based position `(i, j)`; either triangle may be addressed.
    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[self.index(i, j)]
    }

    fn eval(&self, q: &[f64]) -> Result<SymMatrix> {
        SymMatrix::from_upper(self.n, |i, j| self.horner[self.index(i, j)].eval(q))
    }
}

/// Which Hamiltonian a model evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    /// E x epsilon with linear coupling `k` and quadratic coupling `g`, in
    /// Cartesian coordinates `(rho cos theta, rho sin theta)`.
    EEpsilon { k: f64, g: f64 },
    /// Linear T x tau2 in `(X, Y, Z)`.
    TTau2,
    /// G x g; `coupling` stands for the whole prefactor `-q k sqrt(2)`.
    GG { coupling: f64 },
    Polynomial(PolyMatrix),
}

/// A continuous map from parameter points `Q` in `R^d` to real symmetric
/// `n x n` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    pub(crate) name: String,
    pub(crate) dim_matrix: usize,
    pub(crate) dim_params: usize,
    pub(crate) body: ModelBody,
}

/// Names accepted by [`builtin`], with `(n, d)`.
pub const BUILTINS: [(&str, usize, usize); 3] = [("e-epsilon", 2, 2), ("t-tau2", 3, 3), ("g-g", 4, 4)];

impl HamiltonianModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Matrix dimension `n`.
    pub fn dim_matrix(&self) -> usize {
        self.dim_matrix
    }

    /// Parameter-space dimension `d`.
    pub fn dim_params(&self) -> usize {
        self.dim_params
    }

    pub fn body(&self) -> &ModelBody {
        &self.body
    }

    /// Named coupling constants, for reporting.
    pub fn constants(&self) -> Vec<(&'static str, f64)> {
        match self.body {
            ModelBody::EEpsilon { k, g } => vec![("k", k), ("g", g)],
            ModelBody::GG { coupling } => vec![("coupling", coupling)],
            ModelBody::TTau2 | ModelBody::Polynomial(_) => Vec::new(),
        }
    }

    /// Evaluates `H(Q)`.
    pub fn eval(&self, q: &[f64]) -> Result<SymMatrix> {
        eval_model(self, q)
    }
}

/// E x epsilon coupling matrix with linear and quadratic strengths `k`, `g`.
pub fn builtin_e_epsilon(k: f64, g: f64) -> Result<HamiltonianModel> {
    if !(k.is_finite() && g.is_finite()) {
        return Err(Error::InvalidInput("coupling constants must be finite".into()));
    }
    Ok(HamiltonianModel {
        name: "e-epsilon".into(),
        dim_matrix: 2,
        dim_params: 2,
        body: ModelBody::EEpsilon { k, g },
    })
}

/// Linear T x tau2 coupling matrix in `(X, Y, Z)`.
pub fn builtin_t_tau2() -> HamiltonianModel {
    HamiltonianModel {
        name: "t-tau2".into(),
        dim_matrix: 3,
        dim_params: 3,
        body: ModelBody::TTau2,
    }
}

/// G x g coupling matrix in the normal modes `(g1, g2, g3, g4)`.
pub fn builtin_g_g(coupling: f64) -> Result<HamiltonianModel> {
    if !coupling.is_finite() {
        return Err(Error::InvalidInput("coupling must be finite".into()));
    }
    Ok(HamiltonianModel {
        name: "g-g".into(),
        dim_matrix: 4,
        dim_params: 4,
        body: ModelBody::GG { coupling },
    })
}

/// Evaluates a model at the parameter point `q`.
pub fn eval_model(m: &HamiltonianModel, q: &[f64]) -> Result<SymMatrix> {
    if q.len() != m.dim_params {
        return Err(Error::InvalidInput(format!(
            "model '{}' takes {} parameters, got {}",
            m.name,
            m.dim_params,
            q.len()
        )));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("parameter point must be finite".into()));
    }
    match &m.body {
        ModelBody::EEpsilon { k, g } => {
            let (x, y) = (q[0], q[1]);
            // rho cos(theta) = x, rho^2 cos(2 theta) = x^2 - y^2, rho^2 sin(2 theta) = 2xy
            let diag = k * x + 0.5 * g * (x * x - y * y);
            let off = k * y - g * x * y;
            SymMatrix::new(2, vec![diag, off, off, -diag])
        }
        ModelBody::TTau2 => {
            let (x, y, z) = (q[0], q[1], q[2]);
            SymMatrix::new(3, vec![0.0, -z, -y, -z, 0.0, -x, -y, -x, 0.0])
        }
        ModelBody::GG { coupling: c } => {
            let (g1, g2, g3, g4) = (q[0], q[1], q[2], q[3]);
            SymMatrix::from_upper(4, |i, j| {
                c * match (i, j) {
                    (0, 0) => g3,
                    (0, 1) => g4,
                    (0, 2) => g1 - g3,
                    (0, 3) => g2 + g4,
                    (1, 1) => -g3,
                    (1, 2) => -g2 + g4,
                    (1, 3) => g1 + g3,
                    (2, 2) => -g1,
                    (2, 3) => g2,
                    (3, 3) => g1,
                    _ => unreachable!("upper triangle only"),
                }
            })
        }
        ModelBody::Polynomial(pm) => pm.eval(q),
    }
}

/// Looks up a built-in by name with the given constants.
///
/// `e-epsilon` reads `k` and `g`, `g-g` reads `coupling`; unused constants are
/// ignored.
pub fn builtin(name: &str, k: f64, g: f64, coupling: f64) -> Result<HamiltonianModel> {
    match name {
        "e-epsilon" => builtin_e_epsilon(k, g),
        "t-tau2" => Ok(builtin_t_tau2()),
        "g-g" => builtin_g_g(coupling),
        other => Err(Error::InvalidInput(format!(
            "unknown built-in model '{other}' (known: e-epsilon, t-tau2, g-g)"
        ))),
    }
}
