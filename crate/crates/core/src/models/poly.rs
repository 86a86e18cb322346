//! Multivariate polynomials with real coefficients in `Q1..Qd`.

use std::collections::BTreeMap;
use std::fmt;

/// A polynomial stored as a map from exponent vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * prod Q_k^exponents[k]`. Trailing zero exponents are trimmed
    /// so the same monomial always has the same key.
    pub fn add_term(&mut self, coeff: f64, exponents: &[u32]) {
        let mut key = exponents.to_vec();
        while key.last() == Some(&0) {
            key.pop();
        }
        let sum = self.terms.get(&key).copied().unwrap_or(0.0) + coeff;
        if sum == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    /// Highest variable index (1-based) that appears, or 0 for constants.
    pub fn max_variable(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|k| k.iter().rposition(|&e| e > 0).map(|p| p + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    /// Sum of `|coeff| * degree * R^(degree-1)`: a Lipschitz bound on the box
    /// `|Q_k| <= R` in the max norm.
    pub fn lipschitz_bound(&self, radius: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let deg: u32 = k.iter().sum();
                if deg == 0 {
                    0.0
                } else {
                    c.abs() * deg as f64 * radius.powi(deg as i32 - 1)
                }
            })
            .sum()
    }

    /// Straightforward term-by-term evaluation.
    pub fn eval_naive(&self, q: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                c * k
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| q[i].powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub(crate) fn horner(&self) -> Horner {
        let terms: Vec<(&[u32], f64)> = self.terms().collect();
        Horner::build(&terms, 0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (exps, &coeff)) in self.terms.iter().enumerate() {
            let negative = coeff < 0.0;
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = coeff.abs();
            let factors: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("Q{}", i + 1)
                    } else {
                        format!("Q{}^{}", i + 1, e)
                    }
                })
                .collect();
            if factors.is_empty() {
                f.write_str(&format_real(mag))?;
            } else {
                if mag != 1.0 {
                    write!(f, "{} * ", format_real(mag))?;
                }
                f.write_str(&factors.join(" * "))?;
            }
        }
        Ok(())
    }
}

/// Shortest decimal text that parses back to exactly `x`.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Nested Horner form: `sum_k x_var^k * coeffs[k]`, with coefficients that are
/// themselves polynomials in the remaining variables.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Horner {
    Const(f64),
    Var { var: usize, coeffs: Vec<Horner> },
}

impl Horner {
    fn build(terms: &[(&[u32], f64)], var: usize) -> Horner {
        let exp_of = |k: &[u32]| k.get(var).copied().unwrap_or(0);
        let deeper = terms.iter().any(|(k, _)| k.iter().skip(var).any(|&e| e > 0));
        if !deeper {
            return Horner::Const(terms.iter().map(|(_, c)| c).sum());
        }
        let max_exp = terms.iter().map(|(k, _)| exp_of(k)).max().unwrap_or(0);
        let coeffs = (0..=max_exp)
            .map(|e| {
                let group: Vec<(&[u32], f64)> = terms
                    .iter()
                    .filter(|(k, _)| exp_of(k) == e)
                    .copied()
                    .collect();
                Horner::build(&group, var + 1)
            })
            .collect();
        Horner::Var { var, coeffs }
    }

    pub(crate) fn eval(&self, q: &[f64]) -> f64 {
        match self {
            Horner::Const(c) => *c,
            Horner::Var { var, coeffs } => {
                let x = q[*var];
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.eval(q))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(2.0, &[2, 1]);
        p.add_term(-0.5, &[0, 0, 3]);
        p.add_term(1.0, &[1]);
        p.add_term(4.0, &[]);
        p
    }

    #[test]
    fn horner_matches_naive() {
        let p = sample();
        let h = p.horner();
        for q in [[0.3, -1.2, 2.0], [1.0, 1.0, 1.0], [-2.5, 0.0, 0.7]] {
            assert!((h.eval(&q) - p.eval_naive(&q)).abs() < 1e-12);
        }
    }

    #[test]
    fn cancellation_removes_term() {
        let mut p = Polynomial::zero();
        p.add_term(1.5, &[1, 0]);
        p.add_term(-1.5, &[1]);
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(sample().to_string(), "4 - 0.5 * Q3^3 + Q1 + 2 * Q1^2 * Q2");
        assert_eq!(sample().max_variable(), 3);
    }

    #[test]
    fn format_real_round_trips() {
        for x in [0.1, -3.0, 1e-20, 6.02e23, 1.0 / 3.0, -0.0] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
