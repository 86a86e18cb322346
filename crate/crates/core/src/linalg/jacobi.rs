use super::{determinant, dominant_index, frobenius, Frame, SymMatrix};
use crate::error::Result;

const RELATIVE_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns the eigenvalues in ascending order together with a frame whose
/// columns are the matching eigenvectors. Each column is gauged so that its
/// entry of largest magnitude is positive (ties go to the lowest index); if the
/// result is then a reflection, the last column is negated so the frame has
/// determinant +1.
pub fn eig_sym(m: &SymMatrix) -> Result<(Vec<f64>, Frame)> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut v = Frame::identity(n).as_slice().to_vec();

    let scale = frobenius(&a);
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(n, &a) < RELATIVE_TOLERANCE * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    rotate(n, &mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();

    let mut data = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let column: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
        let sign = if column[dominant_index(&column)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            data[i * n + col] = sign * column[i];
        }
    }
    if determinant(n, &data) < 0.0 {
        for i in 0..n {
            data[i * n + n - 1] = -data[i * n + n - 1];
        }
    }
    Ok((values, Frame::from_raw(n, data)))
}

fn off_diagonal_norm(n: usize, a: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[p][q]` with the similarity `J^T a J` and accumulates `v J`.
fn rotate(n: usize, a: &mut [f64], v: &mut [f64], p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(m: &SymMatrix, values: &[f64], f: &Frame) -> f64 {
        let n = m.dim();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                let mv: f64 = (0..n).map(|k| m.get(i, k) * f.get(k, j)).sum();
                worst = worst.max((mv - values[j] * f.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn diagonal_input_gives_identity_frame() {
        let (vals, f) = eig_sym(&SymMatrix::diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(vals, vec![1.0, 2.0]);
        assert_eq!(f, Frame::identity(2));
    }

    #[test]
    fn t_tau2_at_unit_x() {
        // rows ((0,0,0),(0,0,-1),(0,-1,0)); the 2x2 block ((0,-1),(-1,0)) has
        // eigenvalues -1 and 1, the decoupled first axis contributes 0.
        let m = SymMatrix::new(3, vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, -1.0, 0.0]).unwrap();
        let (vals, f) = eig_sym(&m).unwrap();
        for (got, want) in vals.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [0.0, 1.0, 0.0, h, 0.0, h, h, 0.0, -h];
        for (got, want) in f.as_slice().iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{:?}", f);
        }
    }

    #[test]
    fn e_epsilon_linear_point() {
        let (vals, f) = eig_sym(&SymMatrix::diagonal(&[1.0, -1.0]).unwrap()).unwrap();
        assert_eq!(vals, vec![-1.0, 1.0]);
        assert_eq!(f.column(0), vec![0.0, 1.0]);
        assert!((f.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let (vals, f) = eig_sym(&SymMatrix::zeros(4).unwrap()).unwrap();
        assert_eq!(vals, vec![0.0; 4]);
        assert_eq!(f, Frame::identity(4));
    }

    fn sym_strategy() -> impl Strategy<Value = SymMatrix> {
        (2usize..=8).prop_flat_map(|n| {
            proptest::collection::vec(-10.0f64..10.0, n * (n + 1) / 2).prop_map(move |upper| {
                let mut it = upper.into_iter();
                let mut data = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = it.next().unwrap();
                        data[i * n + j] = v;
                        data[j * n + i] = v;
                    }
                }
                SymMatrix::new(n, data).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs(m in sym_strategy()) {
            let (vals, f) = eig_sym(&m).unwrap();
            let scale = m.frobenius_norm().max(1e-300);
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(f.orthogonality_defect() < 1e-12);
            prop_assert!((f.det() - 1.0).abs() < 1e-12);
            prop_assert!(residual(&m, &vals, &f) < 1e-10 * scale);
            let rebuilt = SymMatrix::from_spectrum(&f, &vals).unwrap();
            prop_assert!(rebuilt.distance(&m) < 1e-9 * scale);
        }
    }
}
