//! Reduced density matrices of the two atoms and of a single atom.

use num_complex::Complex64;

use crate::algebra;
use crate::dynamics::{AnalyticEvolution, StateVector, TruncationPlan};
use crate::error::{Error, Result};
use crate::model::ModelParams;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense square complex matrix, row-major.
///
/// Two-atom matrices use the product basis `{|ee>, |eg>, |ge>, |gg>}` with the
/// first atom as the leading factor; single-atom matrices use `{|e>, |g>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(DensityMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        DensityMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// `|psi><psi|`
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        DensityMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(rho^2)`, valid for Hermitian input.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.purity().sqrt()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Divides by the trace; the input is returned unchanged if the trace vanishes.
    pub fn renormalized(&self) -> DensityMatrix {
        let tr = self.trace().re;
        if tr > 0.0 {
            self.scaled(1.0 / tr)
        } else {
            self.clone()
        }
    }

    /// `U rho U^dagger` for a row-major unitary of matching size.
    pub fn conjugated_by(&self, unitary: &[Complex64]) -> DensityMatrix {
        let d = self.dim;
        let mut tmp = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                tmp[i * d + j] = (0..d).map(|l| unitary[i * d + l] * self.get(l, j)).sum();
            }
        }
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d).map(|l| tmp[i * d + l] * unitary[j * d + l].conj()).sum();
            }
        }
        DensityMatrix { dim: d, data: out }
    }
}

/// Product-basis amplitudes `(ee, eg, ge, gg)` of the state at photon number `m`.
pub fn product_amplitudes(state: &StateVector, m: usize) -> [Complex64; 4] {
    [state.ee[m], state.eg_sym[m], state.eg_sym[m], state.gg[m]]
}

/// `Tr_F |psi><psi|` summed at matched photon number. Not renormalized.
pub fn partial_trace_field(state: &StateVector) -> DensityMatrix {
    let mut rho = DensityMatrix::zeros(4);
    for m in 0..=state.n_max {
        let c = product_amplitudes(state, m);
        for i in 0..4 {
            for j in 0..4 {
                rho.data[i * 4 + j] += c[i] * c[j].conj();
            }
        }
    }
    rho
}

/// Two-atom matrix from the closed-form element sums with the residual phases
/// `exp(i R t)`. Built from complete manifolds only, so it coincides with
/// [`partial_trace_field`] when `theta = 0`.
pub fn atoms_density_closed_form(evolution: &AnalyticEvolution, t: f64) -> DensityMatrix {
    let params = &evolution.params;
    let k = params.k;
    let n_max = evolution.plan.n_max;
    let amp = |n: usize| evolution.manifold(n).map(|s| s.amplitudes_at(t));

    let (mut r11, mut r12, mut r14, mut r22, mut r24, mut r44) = (0.0, ZERO, ZERO, 0.0, ZERO, 0.0);
    let a_at: Vec<Option<Complex64>> = (0..=n_max).map(|m| amp(m).map(|x| x.0)).collect();
    let mut b_at = vec![None; n_max + 1];
    let mut c_at = vec![None; n_max + 1];
    for n in 0..=n_max.saturating_sub(4 * k) {
        if let Some((_, b, c)) = amp(n) {
            b_at[n + 2 * k] = Some(b);
            c_at[n + 4 * k] = Some(c);
        }
    }
    for m in 0..=n_max {
        let phase = |times: f64| -> Complex64 {
            let r = algebra::residual_phase(params, m).unwrap_or(0.0);
            Complex64::cis(times * r * t)
        };
        if let Some(a) = a_at[m] {
            r11 += a.norm_sqr();
            if let Some(b) = b_at[m] {
                r12 += a * b.conj() * phase(1.0);
            }
            if let Some(c) = c_at[m] {
                r14 += a * c.conj() * phase(2.0);
            }
        }
        if let Some(b) = b_at[m] {
            r22 += b.norm_sqr();
            if let Some(c) = c_at[m] {
                r24 += b * c.conj() * phase(1.0);
            }
        }
        if let Some(c) = c_at[m] {
            r44 += c.norm_sqr();
        }
    }

    let re = |x: f64| Complex64::new(x, 0.0);
    let entries = [
        [re(r11), r12, r12, r14],
        [r12.conj(), re(r22), re(r22), r24],
        [r12.conj(), re(r22), re(r22), r24],
        [r14.conj(), r24.conj(), r24.conj(), re(r44)],
    ];
    DensityMatrix {
        dim: 4,
        data: entries.iter().flatten().copied().collect(),
    }
}

/// Convenience wrapper building the evolution first.
pub fn atoms_density_closed_form_at(params: &ModelParams, plan: &TruncationPlan, t: f64) -> Result<DensityMatrix> {
    Ok(atoms_density_closed_form(&AnalyticEvolution::new(params, plan)?, t))
}

/// `Tr_{A2} rho` for a two-atom matrix.
pub fn partial_trace_atom2(rho4: &DensityMatrix) -> Result<DensityMatrix> {
    if rho4.dim != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho4.dim,
        });
    }
    let r = |i: usize, j: usize| rho4.get(i, j);
    let y11 = r(0, 0) + r(1, 1);
    let y12 = r(0, 2) + r(1, 3);
    let y22 = r(2, 2) + r(3, 3);
    DensityMatrix::new(2, vec![y11, y12, y12.conj(), y22])
}

/// Largest violation of the exchange symmetry `rho12 = rho13`, `rho22 = rho33 = rho23`, `rho24 = rho34`.
pub fn exchange_symmetry_deviation(rho4: &DensityMatrix) -> f64 {
    let r = |i: usize, j: usize| rho4.get(i, j);
    [
        (r(0, 1) - r(0, 2)).norm(),
        (r(1, 1) - r(2, 2)).norm(),
        (r(1, 1) - r(1, 2)).norm(),
        (r(1, 3) - r(2, 3)).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}
