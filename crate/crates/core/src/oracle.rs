//! Brute-force reference evolution in the truncated Fock x two-atom basis.
//!
//! The Hamiltonian is assembled from explicit operator matrices (deformed
//! ladder operators, Pauli matrices and Kronecker products) without using any
//! of the closed-form coefficients, then propagated through one dense
//! eigendecomposition.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::dynamics::{coherent_weights, StateVector, TruncationPlan};
use crate::error::{Error, Result};
use crate::measures::{jacobi_eigen, Eigen};
use crate::model::ModelParams;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
struct Real {
    n: usize,
    a: Vec<f64>,
}

impl Real {
    fn zeros(n: usize) -> Self {
        Real { n, a: vec![0.0; n * n] }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Real {
            n: N,
            a: rows.iter().flatten().copied().collect(),
        }
    }

    fn mul(&self, other: &Real) -> Real {
        let n = self.n;
        let mut out = Real::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let x = self.a[i * n + l];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * other.a[l * n + j];
                }
            }
        }
        out
    }

    fn transpose(&self) -> Real {
        let n = self.n;
        let mut out = Real::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j];
            }
        }
        out
    }

    fn pow(&self, p: usize) -> Real {
        (0..p).fold(Real::identity(self.n), |acc, _| acc.mul(self))
    }

    fn add(&self, other: &Real) -> Real {
        Real {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    fn scale(&self, s: f64) -> Real {
        Real {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    fn kron(&self, other: &Real) -> Real {
        let (p, q) = (self.n, other.n);
        let n = p * q;
        let mut out = Real::zeros(n);
        for i in 0..p {
            for j in 0..p {
                let x = self.a[i * p + j];
                if x == 0.0 {
                    continue;
                }
                for r in 0..q {
                    for s in 0..q {
                        out.a[(i * q + r) * n + j * q + s] = x * other.a[r * q + s];
                    }
                }
            }
        }
        out
    }
}

/// Effective Hamiltonian on `{ee, eg, ge, gg} x {0..=n_max}`; index `atomic * (n_max + 1) + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockHamiltonian {
    pub dim: usize,
    pub n_max: usize,
    pub k: usize,
    /// Row-major real symmetric matrix.
    pub matrix: Vec<f64>,
}

fn lowering(params: &ModelParams, nf: usize) -> Real {
    let mut a = Real::zeros(nf);
    for n in 1..nf {
        a.a[(n - 1) * nf + n] = (n as f64).sqrt() * params.deformation.value(n);
    }
    a
}

fn hamiltonian(params: &ModelParams, n_max: usize, free_frequency: Option<f64>) -> Result<FockHamiltonian> {
    let k = params.k;
    if n_max < 4 * k {
        return Err(Error::TruncationTooSmall { n_max, min: 4 * k });
    }
    params.deformation.ensure_covers(n_max)?;
    let nf = n_max + 1;
    let a = lowering(params, nf);
    let a_2k = a.pow(2 * k);
    let a_k = a.pow(k);
    let a_2 = a.pow(2);
    let stark = a_k.transpose().mul(&a_k);
    let kerr = a_2.transpose().mul(&a_2);

    let id2 = Real::identity(2);
    let id4 = Real::identity(4);
    let sz = Real::from_rows([[1.0, 0.0], [0.0, -1.0]]);
    let see = Real::from_rows([[1.0, 0.0], [0.0, 0.0]]);
    let sgg = Real::from_rows([[0.0, 0.0], [0.0, 1.0]]);
    let seg = Real::from_rows([[0.0, 1.0], [0.0, 0.0]]);
    let on_first = |op: &Real| op.kron(&id2);
    let on_second = |op: &Real| id2.kron(op);

    let sz_sum = on_first(&sz).add(&on_second(&sz));
    let raise = [on_first(&seg), on_second(&seg)];
    let stark_atoms = on_first(&see)
        .add(&on_second(&see))
        .scale(params.beta1)
        .add(&on_first(&sgg).add(&on_second(&sgg)).scale(params.beta2));

    let mut h = sz_sum.scale(params.delta / 2.0).kron(&Real::identity(nf));
    for up in &raise {
        h = h.add(&up.kron(&a_2k).scale(params.g));
        h = h.add(&up.transpose().kron(&a_2k.transpose()).scale(params.g));
    }
    h = h.add(&stark_atoms.kron(&stark));
    h = h.add(&id4.kron(&kerr.scale(params.chi)));
    if let Some(omega) = free_frequency {
        let number = a.transpose().mul(&a);
        h = h.add(&id4.kron(&number).scale(omega));
        h = h.add(&sz_sum.kron(&Real::identity(nf)).scale(omega * k as f64));
    }

    Ok(FockHamiltonian {
        dim: h.n,
        n_max,
        k,
        matrix: h.a,
    })
}

/// Builds the interaction-picture Hamiltonian (the free `Omega` term omitted).
pub fn build_hamiltonian(params: &ModelParams, n_max: usize) -> Result<FockHamiltonian> {
    hamiltonian(params, n_max, None)
}

/// Builds the Hamiltonian including `Omega (A^+ A + k sum sigma_z)`.
///
/// This term commutes with the rest only for `f = 1`; for other deformations
/// it changes the dynamics rather than adding a local phase.
pub fn build_hamiltonian_with_free_term(params: &ModelParams, n_max: usize, omega: f64) -> Result<FockHamiltonian> {
    hamiltonian(params, n_max, Some(omega))
}

impl FockHamiltonian {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i + 1..d {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Conserved excitation number `n + 2k (number of excited atoms)` of a basis index.
    pub fn excitation(&self, index: usize) -> usize {
        let nf = self.n_max + 1;
        let (atomic, n) = (index / nf, index % nf);
        let excited = [2, 1, 1, 0][atomic];
        n + 2 * self.k * excited
    }

    /// Frobenius norm of `[H, N]` with `N` the excitation operator.
    pub fn excitation_commutator_norm(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let diff = self.excitation(j) as f64 - self.excitation(i) as f64;
                acc += (self.get(i, j) * diff).powi(2);
            }
        }
        acc.sqrt()
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| psi[j] * self.get(i, j)).sum()).collect()
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let h_psi = self.apply(psi);
        psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Cached eigendecomposition of a [`FockHamiltonian`].
#[derive(Debug, Clone)]
pub struct Propagator {
    pub eigen: Eigen,
}

/// Initial state expanded in the eigenbasis, ready for evaluation at any time.
#[derive(Debug, Clone)]
pub struct PreparedState<'a> {
    propagator: &'a Propagator,
    coefficients: Vec<Complex64>,
}

impl Propagator {
    pub fn new(h: &FockHamiltonian) -> Result<Self> {
        let complex: Vec<Complex64> = h.matrix.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(Propagator {
            eigen: jacobi_eigen(h.dim, &complex)?,
        })
    }

    pub fn prepare(&self, psi0: &[Complex64]) -> PreparedState<'_> {
        let d = self.eigen.dim;
        let v = &self.eigen.vectors;
        let coefficients = (0..d)
            .map(|j| (0..d).map(|i| v[i * d + j].conj() * psi0[i]).sum())
            .collect();
        PreparedState {
            propagator: self,
            coefficients,
        }
    }

    /// `V exp(-i Lambda t) V^dagger psi0`
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
        self.prepare(psi0).at(t)
    }
}

impl PreparedState<'_> {
    pub fn at(&self, t: f64) -> Vec<Complex64> {
        let eig = &self.propagator.eigen;
        let d = eig.dim;
        let phased: Vec<Complex64> = self
            .coefficients
            .iter()
            .zip(&eig.values)
            .map(|(c, &e)| c * Complex64::cis(-e * t))
            .collect();
        (0..d)
            .map(|i| (0..d).map(|j| eig.vectors[i * d + j] * phased[j]).sum())
            .collect()
    }
}

/// One-shot evolution.
pub fn evolve(h: &FockHamiltonian, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    Ok(Propagator::new(h)?.evolve(psi0, t))
}

/// Initial product state `(cos(theta/2)|ee> + sin(theta/2)|gg>) x |alpha>` with the
/// same support as the closed-form state: `|ee,n>` up to `n_max - 4k`, `|gg,n>` up to `n_max`.
pub fn initial_state(params: &ModelParams, plan: &TruncationPlan) -> Vec<Complex64> {
    let nf = plan.n_max + 1;
    let q = coherent_weights(params.alpha, plan.n_max);
    let (c, s) = ((params.theta / 2.0).cos(), (params.theta / 2.0).sin());
    let mut psi = vec![ZERO; 4 * nf];
    for n in 0..nf {
        if n <= plan.field_cutoff() {
            psi[n] = q[n] * c;
        }
        psi[3 * nf + n] = q[n] * s;
    }
    psi
}

/// Maps a closed-form state into the oracle basis; `|eg>` and `|ge>` each carry `B`.
pub fn to_oracle_basis(state: &StateVector) -> Vec<Complex64> {
    let nf = state.n_max + 1;
    let mut psi = vec![ZERO; 4 * nf];
    for m in 0..nf {
        psi[m] = state.ee[m];
        psi[nf + m] = state.eg_sym[m];
        psi[2 * nf + m] = state.eg_sym[m];
        psi[3 * nf + m] = state.gg[m];
    }
    psi
}

pub fn reduce_atoms(psi: &[Complex64], n_max: usize) -> DensityMatrix {
    let nf = n_max + 1;
    let mut rho = DensityMatrix::zeros(4);
    for a in 0..4 {
        for b in 0..4 {
            let value = (0..nf).map(|n| psi[a * nf + n] * psi[b * nf + n].conj()).sum();
            rho.set(a, b, value);
        }
    }
    rho
}

pub fn reduce_field(psi: &[Complex64], n_max: usize) -> DensityMatrix {
    let nf = n_max + 1;
    let mut rho = DensityMatrix::zeros(nf);
    for n in 0..nf {
        for m in 0..nf {
            let value = (0..4).map(|a| psi[a * nf + n] * psi[a * nf + m].conj()).sum();
            rho.set(n, m, value);
        }
    }
    rho
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|<a|b>|` of the normalized inputs.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    Ok((overlap.norm() / (na * nb)).min(1.0))
}

/// Fidelity between a closed-form state and an oracle state.
pub fn state_fidelity(state: &StateVector, oracle: &[Complex64]) -> Result<f64> {
    fidelity(&to_oracle_basis(state), oracle)
}
