//! Entanglement measures: von Neumann entropy (two routes), tangle and
//! Wootters concurrence.

mod jacobi;

pub use jacobi::{jacobi_eigen, Eigen};

use num_complex::Complex64;

use crate::cubic::{refine_by_deflation, solve_cubic};
use crate::density::{exchange_symmetry_deviation, DensityMatrix};
use crate::error::{Error, Result};

/// Eigenvalues in `[-CLAMP_WINDOW, 0)` are treated as roundoff and set to zero.
pub const CLAMP_WINDOW: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Entropy,
    Tangle,
    Concurrence,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Entropy, Measure::Tangle, Measure::Concurrence];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "entropy",
            Measure::Tangle => "tangle",
            Measure::Concurrence => "concurrence",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s.trim())
    }
}

/// Measures at one time point. Entropy uses the natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSample {
    /// Time in units of `1/g`.
    pub t: f64,
    pub entropy: Option<f64>,
    pub tangle: Option<f64>,
    pub concurrence: Option<f64>,
    /// Probability missing from the reduced two-atom matrix before renormalization.
    pub trace_tail: f64,
}

pub fn hermitian_eigen(m: &DensityMatrix) -> Result<Eigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > 1e-10 * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    jacobi_eigen(m.dim(), m.data())
}

fn clamp_eigenvalue(value: f64) -> Result<f64> {
    if value < -CLAMP_WINDOW {
        return Err(Error::NotPositive { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        let v = clamp_eigenvalue(v)?;
        if v > 0.0 {
            s -= v * v.ln();
        }
    }
    Ok(s.max(0.0))
}

pub fn entropy_generic(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&hermitian_eigen(rho)?.values)
}

/// The three nonzero eigenvalues of an exchange-symmetric two-atom matrix
/// from the Cardano form, followed by the antisymmetric eigenvalue 0.
pub fn cardano_eigenvalues(rho4: &DensityMatrix) -> Result<[f64; 4]> {
    if rho4.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho4.dim(),
        });
    }
    let deviation = exchange_symmetry_deviation(rho4);
    if deviation > 1e-8 {
        return Err(Error::SymmetryBroken { deviation });
    }
    let r = |i: usize, j: usize| rho4.get(i - 1, j - 1);
    let xi1 = -(r(1, 1) + 2.0 * r(2, 2) + r(4, 4)).re;
    let xi2 = (-2.0 * r(1, 2) * r(2, 1) - r(1, 4) * r(4, 1) - 2.0 * r(2, 4) * r(4, 2)
        + 2.0 * r(2, 2) * r(4, 4)
        + r(1, 1) * (2.0 * r(2, 2) + r(4, 4)))
    .re;
    let xi3 = (2.0
        * (r(1, 4) * (r(2, 2) * r(4, 1) - r(2, 1) * r(4, 2))
            + r(1, 2) * (r(2, 1) * r(4, 4) - r(2, 4) * r(4, 1))
            + r(1, 1) * (r(2, 4) * r(4, 2) - r(2, 2) * r(4, 4))))
    .re;
    // exact for near-pure states, where two roots sit close to zero
    let roots = refine_by_deflation(xi1, xi2, xi3, solve_cubic(xi1, xi2, xi3)?);
    let [a, b, c] = roots.mu;
    Ok([a, b, c, 0.0])
}

pub fn entropy_cardano(rho4: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&cardano_eigenvalues(rho4)?)
}

/// Population of the antisymmetric state `(|eg> - |ge>)/sqrt 2`, an exact
/// eigenvalue of any exchange-symmetric two-atom matrix.
pub fn antisymmetric_population(rho4: &DensityMatrix) -> f64 {
    0.5 * (rho4.get(1, 1) + rho4.get(2, 2) - rho4.get(1, 2) - rho4.get(2, 1)).re
}

/// `2 (1 - Tr rho^2)` of a single-atom matrix, clamped to `[0, 1]`.
pub fn tangle(rho2: &DensityMatrix) -> Result<f64> {
    if rho2.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: rho2.dim(),
        });
    }
    Ok((2.0 * (1.0 - rho2.purity())).clamp(0.0, 1.0))
}

fn matmul4(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = (0..4).map(|l| a[i * 4 + l] * b[l * 4 + j]).sum();
        }
    }
    out
}

/// `(sigma_y x sigma_y) rho^* (sigma_y x sigma_y)`.
pub fn spin_flip(rho4: &DensityMatrix) -> DensityMatrix {
    // sigma_y x sigma_y is real: anti-diagonal (-1, 1, 1, -1).
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let mut out = DensityMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            let value = rho4.get(3 - i, 3 - j).conj() * (sign[i] * sign[j]);
            out.set(i, j, value);
        }
    }
    out
}

/// Wootters concurrence through the Hermitian matrix `sqrt(rho) rho~ sqrt(rho)`.
pub fn concurrence(rho4: &DensityMatrix) -> Result<f64> {
    if rho4.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho4.dim(),
        });
    }
    let eig = hermitian_eigen(rho4)?;
    let sqrt_rho = eig.reconstruct_with(|v| v.max(0.0).sqrt());
    let flipped = spin_flip(rho4);
    let r = matmul4(&matmul4(&sqrt_rho, flipped.data()), &sqrt_rho);
    let r = DensityMatrix::new(4, r)?;
    let inner = jacobi_eigen(4, r.data())?;
    let lambdas: Vec<f64> = inner.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let largest = lambdas.iter().cloned().fold(0.0, f64::max);
    let total: f64 = lambdas.iter().sum();
    Ok((2.0 * largest - total).max(0.0))
}

/// `rho = L L^+` from the rows of `W` in `rho = W W^+`, by Gram-Schmidt with
/// one reorthogonalization pass. `columns[m]` is column `m` of `W`.
fn lower_factor(columns: &[[Complex64; 4]]) -> [[Complex64; 4]; 4] {
    let zero = Complex64::new(0.0, 0.0);
    let n = columns.len();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(4);
    let mut l = [[zero; 4]; 4];
    for i in 0..4 {
        let mut row: Vec<Complex64> = columns.iter().map(|c| c[i]).collect();
        for _ in 0..2 {
            for (j, q) in basis.iter().enumerate() {
                let overlap: Complex64 = (0..n).map(|m| q[m].conj() * row[m]).sum();
                l[i][j] += overlap;
                for m in 0..n {
                    row[m] -= overlap * q[m];
                }
            }
        }
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        l[i][basis.len()] = Complex64::new(norm, 0.0);
        if norm > 0.0 {
            basis.push(row.iter().map(|z| z / norm).collect());
        } else {
            basis.push(vec![zero; n]);
        }
    }
    l
}

/// Wootters concurrence of `rho = W W^+ / Tr` from the amplitude columns of a
/// pure global state, without square roots of eigenvalues.
///
/// The spin-flip values are the singular values of `L^T (sigma_y x sigma_y) L`,
/// read off the Hermitian dilation, so they carry absolute rather than
/// square-root error near rank deficiency.
pub fn concurrence_from_amplitudes(columns: &[[Complex64; 4]]) -> Result<f64> {
    let total: f64 = columns.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NotPositive { value: total });
    }
    let l = lower_factor(columns);
    let sign = [-1.0, 1.0, 1.0, -1.0];
    // y = L^T S L with S[i][3 - i] = sign[i]
    let mut y = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            y[a][b] = (0..4).map(|i| l[i][a] * sign[i] * l[3 - i][b]).sum::<Complex64>() / total;
        }
    }
    let mut dilation = vec![Complex64::new(0.0, 0.0); 64];
    for a in 0..4 {
        for b in 0..4 {
            dilation[a * 8 + 4 + b] = y[a][b];
            dilation[(4 + b) * 8 + a] = y[a][b].conj();
        }
    }
    let eig = jacobi_eigen(8, &dilation)?;
    let sigma = &eig.values[4..];
    let largest = sigma.iter().cloned().fold(0.0, f64::max);
    let sum: f64 = sigma.iter().map(|v| v.max(0.0)).sum();
    Ok((2.0 * largest - sum).max(0.0))
}
