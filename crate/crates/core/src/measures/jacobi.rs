//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition with ascending eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub dim: usize,
    pub values: Vec<f64>,
    /// Row-major; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<Complex64>,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + j]).collect()
    }

    /// `V f(Lambda) V^dagger`, row-major.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
        let d = self.dim;
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d)
                    .map(|l| self.vectors[i * d + l] * fv[l] * self.vectors[j * d + l].conj())
                    .sum();
            }
        }
        out
    }
}

/// Diagonalizes the Hermitian matrix `a` (row-major, `dim x dim`).
///
/// Only the Hermitian part is read. Rotations are skipped for entries that are
/// negligible relative to their diagonal pair, and the iteration stops after a
/// sweep in which nothing rotates, so block-diagonal inputs stay block-diagonal
/// and each block converges at its own scale.
pub fn jacobi_eigen(dim: usize, a: &[Complex64]) -> Result<Eigen> {
    if a.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            got: a.len(),
        });
    }
    let d = dim;
    let mut m: Vec<Complex64> = a.to_vec();
    for i in 0..d {
        m[i * d + i] = Complex64::new(m[i * d + i].re, 0.0);
        for j in i + 1..d {
            let avg = 0.5 * (m[i * d + j] + m[j * d + i].conj());
            m[i * d + j] = avg;
            m[j * d + i] = avg.conj();
        }
    }
    let norm: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0, 0.0);
    }

    let mut converged = d <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = m[p * d + p].re;
                let aqq = m[q * d + q].re;
                if r <= 0.5 * f64::EPSILON * (app.abs() * aqq.abs()).sqrt() || r <= 1e-300 {
                    m[p * d + q] = Complex64::new(0.0, 0.0);
                    m[q * d + p] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();

                // columns: M <- M U
                for i in 0..d {
                    let mip = m[i * d + p];
                    let miq = m[i * d + q];
                    m[i * d + p] = mip * c - miq * (s * pc);
                    m[i * d + q] = mip * s + miq * (c * pc);
                    let vip = v[i * d + p];
                    let viq = v[i * d + q];
                    v[i * d + p] = vip * c - viq * (s * pc);
                    v[i * d + q] = vip * s + viq * (c * pc);
                }
                // rows: M <- U^dagger M
                for j in 0..d {
                    let mpj = m[p * d + j];
                    let mqj = m[q * d + j];
                    m[p * d + j] = mpj * c - mqj * (s * phase);
                    m[q * d + j] = mpj * s + mqj * (c * phase);
                }
                m[p * d + p] = Complex64::new(app - t * r, 0.0);
                m[q * d + q] = Complex64::new(aqq + t * r, 0.0);
                m[p * d + q] = Complex64::new(0.0, 0.0);
                m[q * d + p] = Complex64::new(0.0, 0.0);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * d + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-13 * norm {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[i * d + i].re.total_cmp(&m[j * d + j].re));
    let values = order.iter().map(|&i| m[i * d + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); d * d];
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..d {
            vectors[i * d + new_col] = v[i * d + old_col];
        }
    }
    Ok(Eigen {
        dim: d,
        values,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &[Complex64], e: &Eigen) -> f64 {
        let back = e.reconstruct_with(|x| x);
        a.iter().zip(&back).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_input() {
        let a = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0].map(|x| c(x, 0.0));
        let e = jacobi_eigen(3, &a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let a = [0.0, 1.0, 1.0, 0.0].map(|x| c(x, 0.0));
        let e = jacobi_eigen(2, &a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y() {
        let a = [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let e = jacobi_eigen(2, &a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!(residual(&a, &e) <= 1e-14);
    }

    #[test]
    fn rejects_bad_length() {
        assert!(jacobi_eigen(3, &[c(0.0, 0.0); 4]).is_err());
    }

    proptest! {
        #[test]
        fn reconstruction(entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36)) {
            let d = 6;
            let mut a = vec![c(0.0, 0.0); d * d];
            for i in 0..d {
                for j in i..d {
                    let (re, im) = entries[i * d + j];
                    if i == j {
                        a[i * d + i] = c(re, 0.0);
                    } else {
                        a[i * d + j] = c(re, im);
                        a[j * d + i] = c(re, -im);
                    }
                }
            }
            let e = jacobi_eigen(d, &a).unwrap();
            prop_assert!(residual(&a, &e) <= 1e-12);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            // orthonormal columns
            for x in 0..d {
                for y in 0..d {
                    let dot: Complex64 = (0..d).map(|i| e.vectors[i * d + x].conj() * e.vectors[i * d + y]).sum();
                    let want = if x == y { 1.0 } else { 0.0 };
                    prop_assert!((dot - c(want, 0.0)).norm() <= 1e-12);
                }
            }
        }
    }
}
