//! Scalar coefficient functions of the effective Hamiltonian.
//!
//! Every product is accumulated in floating point in ascending order of its
//! factor index; no factorial is ever formed explicitly.

use crate::error::{Error, Result};
use crate::model::{DeformationFunction, ModelParams};

/// Two-atom levels reachable from `|ee>` and `|gg>` under the exchange-symmetric dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairLevel {
    Ee,
    /// The symmetric combination `|eg> + |ge>` (unnormalized).
    EgSym,
    Gg,
}

impl PairLevel {
    pub const ALL: [PairLevel; 3] = [PairLevel::Ee, PairLevel::EgSym, PairLevel::Gg];

    /// Sum of `sigma_z` over both atoms.
    pub fn sigma_z_sum(self) -> f64 {
        match self {
            PairLevel::Ee => 2.0,
            PairLevel::EgSym => 0.0,
            PairLevel::Gg => -2.0,
        }
    }
}

/// `[f(n)]! / [f(m)]! = f(m+1) ... f(n)`.
pub fn f_factorial_ratio(f: &DeformationFunction, n: usize, m: usize) -> Result<f64> {
    if n < m {
        return Err(Error::InvalidRange { n, m });
    }
    Ok((m + 1..=n).fold(1.0, |acc, j| acc * f.value(j)))
}

/// `n! / m!`, or zero when `m < 0` (the lowering operator annihilates the state).
pub fn falling_ratio(n: usize, m: i64) -> f64 {
    if m < 0 {
        return 0.0;
    }
    let m = m as usize;
    if m > n {
        return 1.0 / (n + 1..=m).fold(1.0, |acc, j| acc * j as f64);
    }
    (m + 1..=n).fold(1.0, |acc, j| acc * j as f64)
}

/// Matrix element `<n-p| A^p |n>` of the deformed lowering operator,
/// i.e. `sqrt(n!/(n-p)!) [f(n)]!/[f(n-p)]!`. Zero when `p > n`.
pub fn lowering_element(f: &DeformationFunction, n: usize, p: usize) -> f64 {
    if p > n {
        return 0.0;
    }
    (n - p + 1..=n).fold(1.0, |acc, j| acc * (j as f64).sqrt() * f.value(j))
}

/// Stark diagonal factor `<m| A^{+k} A^k |m>`; zero for `m < k`.
pub fn stark_factor(f: &DeformationFunction, k: usize, m: usize) -> f64 {
    if m < k {
        return 0.0;
    }
    (m - k + 1..=m).fold(1.0, |acc, j| acc * j as f64 * f.value(j).powi(2))
}

/// Kerr diagonal factor `<m| A^{+2} A^2 |m> = m(m-1) f^2(m) f^2(m-1)`.
pub fn kerr_factor(f: &DeformationFunction, m: usize) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let mf = m as f64;
    mf * (mf - 1.0) * f.value(m).powi(2) * f.value(m - 1).powi(2)
}

/// Diagonal energy of `|level, m>` where `m` is the photon number of that state.
pub fn level_energy(params: &ModelParams, level: PairLevel, m: usize) -> f64 {
    let f = &params.deformation;
    let kerr = params.chi * kerr_factor(f, m);
    let stark = stark_factor(f, params.k, m);
    match level {
        PairLevel::Ee => params.delta + kerr + 2.0 * params.beta1 * stark,
        PairLevel::EgSym => kerr + (params.beta1 + params.beta2) * stark,
        PairLevel::Gg => -params.delta + kerr + 2.0 * params.beta2 * stark,
    }
}

/// Effective couplings `(V1, V2)` of manifold `n`.
pub fn couplings(params: &ModelParams, n: usize) -> (f64, f64) {
    let two_k = 2 * params.k;
    let f = &params.deformation;
    (
        params.g * lowering_element(f, n + two_k, two_k),
        params.g * lowering_element(f, n + 2 * two_k, two_k),
    )
}

/// Phase frequencies `(gamma1, gamma2, gamma3)` of manifold `n`: the diagonal
/// energies of `|ee,n>`, `|eg,n+2k>` and `|gg,n+4k>`.
pub fn gamma_phases(params: &ModelParams, n: usize) -> (f64, f64, f64) {
    let k = params.k;
    (
        level_energy(params, PairLevel::Ee, n),
        level_energy(params, PairLevel::EgSym, n + 2 * k),
        level_energy(params, PairLevel::Gg, n + 4 * k),
    )
}

/// All scalar data of one three-state manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldCoefficients {
    pub n: usize,
    pub v1: f64,
    pub v2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// `gamma2 - gamma1`
    pub eta: f64,
    /// `gamma3 - gamma2`
    pub sigma_s: f64,
}

pub fn manifold_coefficients(params: &ModelParams, n: usize) -> ManifoldCoefficients {
    let (v1, v2) = couplings(params, n);
    let (gamma1, gamma2, gamma3) = gamma_phases(params, n);
    ManifoldCoefficients {
        n,
        v1,
        v2,
        gamma1,
        gamma2,
        gamma3,
        eta: gamma2 - gamma1,
        sigma_s: gamma3 - gamma2,
    }
}

/// Residual phase frequency at matched photon number `m`:
/// `-Delta + (beta2 - beta1) <m|A^{+k}A^k|m>`.
pub fn residual_phase(params: &ModelParams, m: usize) -> Result<f64> {
    if m < params.k {
        return Err(Error::BelowStarkThreshold { m, k: params.k });
    }
    Ok(-params.delta + (params.beta2 - params.beta1) * stark_factor(&params.deformation, params.k, m))
}

/// `(R1, R2)` for manifold base `n`, evaluated at `m = n + 2k` and `m = n + 4k`.
pub fn residual_phases(params: &ModelParams, n: usize) -> (f64, f64) {
    let k = params.k;
    let at = |m: usize| -params.delta + (params.beta2 - params.beta1) * stark_factor(&params.deformation, k, m);
    (at(n + 2 * k), at(n + 4 * k))
}
