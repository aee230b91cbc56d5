//! Closed-form time evolution of the two-atom state.
//!
//! The effective Hamiltonian conserves `n + 2k * (number of excited atoms)`
//! and the exchange symmetry of the atoms, so the state starting from
//! `|ee>` / `|gg>` lives in three-state manifolds
//! `{|ee,n>, |eg+ge,n+2k>, |gg,n+4k>}` plus a handful of smaller blocks at low
//! photon number that hold only `|gg>` population.

use num_complex::Complex64;

use crate::algebra::{self, lowering_element, ManifoldCoefficients, PairLevel};
use crate::cubic::{solve_cubic, solve_quadratic, CubicRoots};
use crate::error::{Error, Result};
use crate::model::{validate, ModelParams, Picture};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `q_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`, evaluated in log space.
pub fn coherent_weight(alpha: Complex64, n: usize) -> Complex64 {
    let r = alpha.norm();
    if r == 0.0 {
        return if n == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
    }
    let log_fact: f64 = (1..=n).map(|j| (j as f64).ln()).sum();
    let log_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * log_fact;
    Complex64::from_polar(log_mag.exp(), n as f64 * alpha.arg())
}

/// `q_0 .. q_{n_max}` in one pass.
pub fn coherent_weights(alpha: Complex64, n_max: usize) -> Vec<Complex64> {
    let r = alpha.norm();
    let mut out = Vec::with_capacity(n_max + 1);
    if r == 0.0 {
        out.push(Complex64::new(1.0, 0.0));
        out.resize(n_max + 1, ZERO);
        return out;
    }
    let (ln_r, phase) = (r.ln(), alpha.arg());
    let mut log_mag = -0.5 * r * r;
    for n in 0..=n_max {
        if n > 0 {
            log_mag += ln_r - 0.5 * (n as f64).ln();
        }
        out.push(Complex64::from_polar(log_mag.exp(), n as f64 * phase));
    }
    out
}

/// Fock cutoff for a coherent initial field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPlan {
    /// Largest photon number kept in the state.
    pub n_max: usize,
    /// Coherent-state mass beyond the largest initial `|ee>` photon number `n_max - 4k`.
    pub tail_mass: f64,
    pub k: usize,
}

impl TruncationPlan {
    /// Largest manifold base (and largest `|ee>` photon number) that fits under `n_max`.
    pub fn field_cutoff(&self) -> usize {
        self.n_max - 4 * self.k
    }

    /// Plan with an explicit cutoff; the tail is computed exactly.
    pub fn with_n_max(alpha: Complex64, n_max: usize, k: usize) -> Result<Self> {
        if n_max < 4 * k {
            return Err(Error::TruncationTooSmall { n_max, min: 4 * k });
        }
        let cutoff = n_max - 4 * k;
        let tails = poisson_tails(alpha, cutoff + 1);
        Ok(TruncationPlan {
            n_max,
            tail_mass: tails[cutoff],
            k,
        })
    }
}

/// `tails[n] = sum_{j > n} |q_j|^2` for `n < len`, summed from the far end.
fn poisson_tails(alpha: Complex64, len: usize) -> Vec<f64> {
    let mean = alpha.norm_sqr();
    let hi = (mean + 50.0 * mean.sqrt() + 60.0).ceil() as usize;
    let hi = hi.max(len + 1);
    let weights: Vec<f64> = coherent_weights(alpha, hi).iter().map(|q| q.norm_sqr()).collect();
    let mut tails = vec![0.0; hi + 1];
    let mut acc = 0.0;
    for n in (0..hi).rev() {
        acc += weights[n + 1];
        tails[n] = acc;
    }
    tails.truncate(len);
    tails
}

/// Smallest cutoff whose neglected coherent mass is at most `tol`, widened by
/// `4k` so every retained `|ee,n>` has its complete manifold inside the basis.
pub fn plan_truncation(alpha: Complex64, tol: f64, k: usize) -> TruncationPlan {
    let mean = alpha.norm_sqr();
    let hi = (mean + 50.0 * mean.sqrt() + 60.0).ceil() as usize;
    let tails = poisson_tails(alpha, hi);
    let cutoff = tails.iter().position(|&t| t <= tol).unwrap_or(hi - 1);
    TruncationPlan {
        n_max: cutoff + 4 * k,
        tail_mass: tails[cutoff],
        k,
    }
}

/// Closed-form solution of one three-state manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSolution {
    pub n: usize,
    pub coeffs: ManifoldCoefficients,
    pub mu: CubicRoots,
    pub b: [Complex64; 3],
    /// `A(n, 0)`
    pub a0: Complex64,
    /// `C(n + 4k, 0)`
    pub c0: Complex64,
}

/// Relative gap between roots below which the expansion coefficients are ill-defined.
const ROOT_GAP_EPS: f64 = 1e-10;

pub fn solve_manifold(params: &ModelParams, n: usize) -> Result<ManifoldSolution> {
    let (half_c, half_s) = ((params.theta / 2.0).cos(), (params.theta / 2.0).sin());
    let a0 = coherent_weight(params.alpha, n) * half_c;
    let c0 = coherent_weight(params.alpha, n + 4 * params.k) * half_s;
    solve_manifold_from(params, n, a0, c0)
}

fn solve_manifold_from(params: &ModelParams, n: usize, a0: Complex64, c0: Complex64) -> Result<ManifoldSolution> {
    let coeffs = algebra::manifold_coefficients(params, n);
    let (eta, sigma) = (coeffs.eta, coeffs.sigma_s);
    let (v1, v2) = (coeffs.v1, coeffs.v2);
    let x1 = -eta - 2.0 * sigma;
    let x2 = sigma * (sigma + eta) - 2.0 * (v1 * v1 + v2 * v2);
    let x3 = 2.0 * v2 * v2 * (eta + sigma);
    let mu = solve_cubic(x1, x2, x3)?;
    let b = expansion_coefficients(n, &coeffs, &mu.mu, a0, c0)?;
    Ok(ManifoldSolution {
        n,
        coeffs,
        mu,
        b,
        a0,
        c0,
    })
}

fn expansion_coefficients(
    n: usize,
    coeffs: &ManifoldCoefficients,
    mu: &[f64; 3],
    a0: Complex64,
    c0: Complex64,
) -> Result<[Complex64; 3]> {
    let (v1, v2) = (coeffs.v1, coeffs.v2);
    let scale = mu.iter().fold(1.0f64, |acc, m| acc.max(m.abs()));
    let mut b = [ZERO; 3];
    for m in 0..3 {
        let (k, l) = ((m + 1) % 3, (m + 2) % 3);
        let (gap_k, gap_l) = (mu[m] - mu[k], mu[m] - mu[l]);
        let gap = gap_k.abs().min(gap_l.abs());
        if gap < ROOT_GAP_EPS * scale {
            return Err(Error::DegenerateManifold { n, gap });
        }
        let numerator = a0 * (2.0 * v1 * v2) + c0 * (2.0 * v2 * v2 + mu[k] * mu[l]);
        b[m] = numerator / (gap_k * gap_l);
    }
    Ok(b)
}

impl ManifoldSolution {
    /// Same manifold with its roots taken in a different order.
    pub fn with_root_order(&self, order: [usize; 3]) -> Result<ManifoldSolution> {
        let mu = CubicRoots {
            mu: order.map(|i| self.mu.mu[i]),
            ..self.mu
        };
        let b = expansion_coefficients(self.n, &self.coeffs, &mu.mu, self.a0, self.c0)?;
        Ok(ManifoldSolution { mu, b, ..self.clone() })
    }

    /// `(A(n,t), B(n+2k,t), C(n+4k,t))` in the rotating frame of the manifold.
    pub fn amplitudes_at(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let c = &self.coeffs;
        let (eta, sigma, v1, v2) = (c.eta, c.sigma_s, c.v1, c.v2);
        // The shared phases are factored out so all three components see the
        // same rounded e^{i mu t}; otherwise the cross terms of the norm stop
        // cancelling once mu t reaches ~1e8.
        let (mut a, mut b_sum, mut c_sum) = (ZERO, ZERO, ZERO);
        for (&mu, &b) in self.mu.mu.iter().zip(&self.b) {
            let a_weight = (mu * mu - sigma * mu - 2.0 * v2 * v2) / (2.0 * v1 * v2);
            let wave = b * Complex64::cis(mu * t);
            a += wave * a_weight;
            b_sum += wave * (-mu / (2.0 * v2));
            c_sum += wave;
        }
        (
            a * Complex64::cis(-(eta + sigma) * t),
            b_sum * Complex64::cis(-sigma * t),
            c_sum,
        )
    }

    /// `|A|^2 + 2|B|^2 + |C|^2` at `t = 0`.
    pub fn initial_probability(&self) -> f64 {
        self.a0.norm_sqr() + self.c0.norm_sqr()
    }
}

/// Free-function form of [`ManifoldSolution::amplitudes_at`].
pub fn amplitudes_at(sol: &ManifoldSolution, t: f64) -> (Complex64, Complex64, Complex64) {
    sol.amplitudes_at(t)
}

/// Low-photon states outside the three-state manifolds. Only `|gg>` is
/// populated initially, so these blocks matter only for `theta > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum IncompleteBlock {
    /// `|gg,m>` with `m < 2k`: no coupling at all.
    Frozen { m: usize, amp0: Complex64, energy: f64 },
    /// `{|eg+ge, m-2k>, |gg,m>}` with `2k <= m < 4k`, in the normalized basis.
    Pair {
        m: usize,
        amp0: Complex64,
        energies: [f64; 2],
        /// `vectors[j]` is the normalized eigenvector of `energies[j]` as (symmetric, gg) components.
        vectors: [[f64; 2]; 2],
    },
}

impl IncompleteBlock {
    fn build(params: &ModelParams, m: usize, amp0: Complex64) -> Result<Self> {
        let k = params.k;
        let e_gg = algebra::level_energy(params, PairLevel::Gg, m);
        if m < 2 * k {
            return Ok(IncompleteBlock::Frozen { m, amp0, energy: e_gg });
        }
        let e_s = algebra::level_energy(params, PairLevel::EgSym, m - 2 * k);
        let w = std::f64::consts::SQRT_2 * params.g * lowering_element(&params.deformation, m, 2 * k);
        let energies = solve_quadratic(1.0, -(e_s + e_gg), e_s * e_gg - w * w)?;
        let vectors = energies.map(|lambda| {
            // Two equivalent forms of the null vector; keep the better conditioned one.
            let u = [w, lambda - e_s];
            let v = [lambda - e_gg, w];
            let pick = if u[0].hypot(u[1]) >= v[0].hypot(v[1]) { u } else { v };
            let norm = pick[0].hypot(pick[1]);
            [pick[0] / norm, pick[1] / norm]
        });
        Ok(IncompleteBlock::Pair {
            m,
            amp0,
            energies,
            vectors,
        })
    }

    /// Amplitudes `(B at m - 2k, gg at m)` in the stored convention where the
    /// symmetric state carries `B (|eg> + |ge>)`.
    fn evaluate(&self, t: f64) -> (Option<Complex64>, Complex64) {
        match self {
            IncompleteBlock::Frozen { amp0, energy, .. } => (None, amp0 * Complex64::cis(-energy * t)),
            IncompleteBlock::Pair {
                amp0,
                energies,
                vectors,
                ..
            } => {
                let (mut s, mut gg) = (ZERO, ZERO);
                for (e, v) in energies.iter().zip(vectors) {
                    let overlap = amp0 * v[1] * Complex64::cis(-e * t);
                    s += overlap * v[0];
                    gg += overlap * v[1];
                }
                (Some(s / std::f64::consts::SQRT_2), gg)
            }
        }
    }

    pub fn gg_photon_number(&self) -> usize {
        match self {
            IncompleteBlock::Frozen { m, .. } | IncompleteBlock::Pair { m, .. } => *m,
        }
    }
}

/// Complete system state over `{ee, eg+ge, gg} x {0..=n_max}`.
///
/// The symmetric level stores `B` with the state written as `B (|eg> + |ge>)`,
/// so it enters norms with weight 2.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub k: usize,
    pub n_max: usize,
    pub ee: Vec<Complex64>,
    pub eg_sym: Vec<Complex64>,
    pub gg: Vec<Complex64>,
    pub tail_mass: f64,
}

impl StateVector {
    pub fn zeros(k: usize, n_max: usize, tail_mass: f64) -> Self {
        StateVector {
            k,
            n_max,
            ee: vec![ZERO; n_max + 1],
            eg_sym: vec![ZERO; n_max + 1],
            gg: vec![ZERO; n_max + 1],
            tail_mass,
        }
    }

    pub fn amplitude(&self, level: PairLevel, m: usize) -> Complex64 {
        match level {
            PairLevel::Ee => self.ee[m],
            PairLevel::EgSym => self.eg_sym[m],
            PairLevel::Gg => self.gg[m],
        }
    }

    pub fn amplitude_mut(&mut self, level: PairLevel, m: usize) -> &mut Complex64 {
        match level {
            PairLevel::Ee => &mut self.ee[m],
            PairLevel::EgSym => &mut self.eg_sym[m],
            PairLevel::Gg => &mut self.gg[m],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        (0..=self.n_max)
            .map(|m| self.ee[m].norm_sqr() + 2.0 * self.eg_sym[m].norm_sqr() + self.gg[m].norm_sqr())
            .sum()
    }

    /// Largest photon number with a nonzero amplitude on any level.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.n_max)
            .filter(|&m| PairLevel::ALL.iter().any(|&l| self.amplitude(l, m) != ZERO))
            .collect()
    }

    /// Multiplies each amplitude by `exp[-i omega t (m f^2(m) + k sum sigma_z)]`.
    pub fn apply_free_phase(&mut self, params: &ModelParams, omega: f64, t: f64) {
        let k = params.k as f64;
        for m in 0..=self.n_max {
            let field = if m == 0 {
                0.0
            } else {
                m as f64 * params.deformation.value(m).powi(2)
            };
            // field and atomic factors kept separate so the product form is exact
            let field_phase = Complex64::cis(-omega * t * field);
            for level in PairLevel::ALL {
                let phase = field_phase * Complex64::cis(-omega * t * k * level.sigma_z_sum());
                *self.amplitude_mut(level, m) *= phase;
            }
        }
    }
}

/// Precomputed closed-form solution for every manifold under a truncation plan.
#[derive(Debug, Clone)]
pub struct AnalyticEvolution {
    pub params: ModelParams,
    pub plan: TruncationPlan,
    /// Indexed by manifold base `n`; `None` for manifolds with no initial weight
    /// or a degenerate spectrum.
    pub manifolds: Vec<Option<ManifoldSolution>>,
    pub blocks: Vec<IncompleteBlock>,
    /// Manifolds dropped because their spectrum was degenerate.
    pub skipped: Vec<Error>,
}

impl AnalyticEvolution {
    pub fn new(params: &ModelParams, plan: &TruncationPlan) -> Result<Self> {
        let params = validate(params.clone())?;
        let k = params.k;
        if plan.k != k {
            return Err(Error::InvalidParams(format!(
                "plan built for k = {} but k = {k}",
                plan.k
            )));
        }
        if plan.n_max < 4 * k {
            return Err(Error::TruncationTooSmall {
                n_max: plan.n_max,
                min: 4 * k,
            });
        }
        params.deformation.ensure_covers(plan.n_max)?;

        let q = coherent_weights(params.alpha, plan.n_max);
        let (half_c, half_s) = ((params.theta / 2.0).cos(), (params.theta / 2.0).sin());

        let mut manifolds = Vec::with_capacity(plan.field_cutoff() + 1);
        let mut skipped = Vec::new();
        for n in 0..=plan.field_cutoff() {
            let a0 = q[n] * half_c;
            let c0 = q[n + 4 * k] * half_s;
            if a0 == ZERO && c0 == ZERO {
                manifolds.push(None);
                continue;
            }
            match solve_manifold_from(&params, n, a0, c0) {
                Ok(sol) => manifolds.push(Some(sol)),
                Err(err @ Error::DegenerateManifold { .. }) => {
                    skipped.push(err);
                    manifolds.push(None);
                }
                Err(err) => return Err(err),
            }
        }

        let mut blocks = Vec::new();
        if half_s != 0.0 {
            for (m, &qm) in q.iter().enumerate().take(4 * k) {
                let amp0 = qm * half_s;
                if amp0 != ZERO {
                    blocks.push(IncompleteBlock::build(&params, m, amp0)?);
                }
            }
        }

        Ok(AnalyticEvolution {
            params,
            plan: *plan,
            manifolds,
            blocks,
            skipped,
        })
    }

    pub fn manifold(&self, n: usize) -> Option<&ManifoldSolution> {
        self.manifolds.get(n).and_then(Option::as_ref)
    }

    /// Total initial probability actually carried by the state.
    pub fn initial_norm_sqr(&self) -> f64 {
        let manifolds: f64 = self.manifolds.iter().flatten().map(|s| s.initial_probability()).sum();
        let blocks: f64 = self
            .blocks
            .iter()
            .map(|b| match b {
                IncompleteBlock::Frozen { amp0, .. } | IncompleteBlock::Pair { amp0, .. } => amp0.norm_sqr(),
            })
            .sum();
        manifolds + blocks
    }

    pub fn state_at(&self, t: f64) -> StateVector {
        let k = self.params.k;
        let mut state = StateVector::zeros(k, self.plan.n_max, self.plan.tail_mass);
        for sol in self.manifolds.iter().flatten() {
            let n = sol.n;
            let (a, b, c) = sol.amplitudes_at(t);
            let co = &sol.coeffs;
            state.ee[n] = a * Complex64::cis(-co.gamma1 * t);
            state.eg_sym[n + 2 * k] = b * Complex64::cis(-co.gamma2 * t);
            state.gg[n + 4 * k] = c * Complex64::cis(-co.gamma3 * t);
        }
        for block in &self.blocks {
            let m = block.gg_photon_number();
            let (sym, gg) = block.evaluate(t);
            state.gg[m] = gg;
            if let Some(sym) = sym {
                state.eg_sym[m - 2 * k] = sym;
            }
        }
        if let Picture::IncludeFreePhase { omega } = self.params.picture {
            state.apply_free_phase(&self.params, omega, t);
        }
        state
    }
}

/// One-shot evolution to time `t`.
pub fn assemble_state(params: &ModelParams, plan: &TruncationPlan, t: f64) -> Result<StateVector> {
    Ok(AnalyticEvolution::new(params, plan)?.state_at(t))
}
