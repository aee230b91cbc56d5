//! Closed-form real roots of the characteristic cubics.
//!
//! The trigonometric (Vieta) form of Cardano's solution is used: for a
//! monic cubic `mu^3 + x1 mu^2 + x2 mu + x3` with three real roots,
//!
//! ```text
//! mu_m = -x1/3 + (2/3) sqrt(x1^2 - 3 x2) cos(phi + 2 pi (m - 1) / 3)
//! phi  = (1/3) arccos[(9 x1 x2 - 2 x1^3 - 27 x3) / (2 (x1^2 - 3 x2)^{3/2})]
//! ```
//!
//! followed by one Newton step per well-separated root.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Three real roots sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub mu: [f64; 3],
    /// `x1^2 - 3 x2`; zero for a triple root.
    pub discriminant_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MonicCubic {
    pub fn eval(&self, mu: f64) -> f64 {
        ((mu + self.x1) * mu + self.x2) * mu + self.x3
    }

    pub fn derivative(&self, mu: f64) -> f64 {
        (3.0 * mu + 2.0 * self.x1) * mu + self.x2
    }

    /// Magnitude of the largest term at `mu`, used to scale residuals.
    pub fn term_scale(&self, mu: f64) -> f64 {
        let a = mu.abs();
        (a * a * a)
            .max(self.x1.abs() * a * a)
            .max(self.x2.abs() * a)
            .max(self.x3.abs())
    }
}

/// Relative tolerance on `x1^2 - 3 x2` below which the roots are treated as a triple root.
const TRIPLE_ROOT_EPS: f64 = 1e-12;
/// Relative root gap below which the Newton step is skipped.
const CLUSTER_EPS: f64 = 1e-4;
/// Slack on the arccos argument before the input is declared to have complex roots.
const ARCCOS_SLACK: f64 = 1e-6;

pub fn solve_cubic(x1: f64, x2: f64, x3: f64) -> Result<CubicRoots> {
    let cubic = MonicCubic { x1, x2, x3 };
    let margin = x1 * x1 - 3.0 * x2;
    let scale = (x1 * x1).max(x2.abs()).max(1.0);

    if margin <= TRIPLE_ROOT_EPS * (x1 * x1).max(1.0) {
        if margin < -ARCCOS_SLACK * scale {
            return Err(Error::ComplexRoots { residual: margin });
        }
        let root = -x1 / 3.0;
        let residual = cubic.eval(root);
        if residual.abs() > 1e-8 * cubic.term_scale(root).max(1.0) {
            // x1^2 = 3 x2 but the cubic is not a perfect cube: one real root only.
            return Err(Error::ComplexRoots { residual });
        }
        return Ok(CubicRoots {
            mu: [root; 3],
            discriminant_margin: margin,
        });
    }

    let sqrt_margin = margin.sqrt();
    let arg = (9.0 * x1 * x2 - 2.0 * x1 * x1 * x1 - 27.0 * x3) / (2.0 * margin * sqrt_margin);
    if !arg.is_finite() || arg.abs() > 1.0 + ARCCOS_SLACK {
        return Err(Error::ComplexRoots {
            residual: arg.abs() - 1.0,
        });
    }
    let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;

    let trig: [f64; 3] =
        std::array::from_fn(|m| -x1 / 3.0 + (2.0 / 3.0) * sqrt_margin * (phi + 2.0 * PI * m as f64 / 3.0).cos());
    // Newton cannot improve a clustered root and breaks the symmetric
    // rounding that keeps the trigonometric roots consistent with Vieta.
    let spread = trig.iter().fold(1.0f64, |acc, r| acc.max(r.abs()));
    let mut mu = trig;
    for (m, slot) in mu.iter_mut().enumerate() {
        let gap = (0..3)
            .filter(|&j| j != m)
            .map(|j| (trig[m] - trig[j]).abs())
            .fold(f64::INFINITY, f64::min);
        if gap > CLUSTER_EPS * spread {
            *slot = newton_step(&cubic, trig[m]);
        }
    }
    mu.sort_by(f64::total_cmp);

    Ok(CubicRoots {
        mu,
        discriminant_margin: margin,
    })
}

fn newton_step(cubic: &MonicCubic, root: f64) -> f64 {
    let value = cubic.eval(root);
    let slope = cubic.derivative(root);
    if value == 0.0 || slope == 0.0 {
        return root;
    }
    let refined = root - value / slope;
    if refined.is_finite() && cubic.eval(refined).abs() <= value.abs() {
        refined
    } else {
        root
    }
}

/// Re-derives the two smaller-magnitude roots from the dominant one.
///
/// The trigonometric form loses about half the working precision on a
/// (near-)double root because arccos is flat at ±1. When the cubic is known to
/// have real roots, polishing the dominant root and deflating to a quadratic
/// restores full absolute accuracy. Falls back to the input on failure.
pub fn refine_by_deflation(x1: f64, x2: f64, x3: f64, roots: CubicRoots) -> CubicRoots {
    let poly = MonicCubic { x1, x2, x3 };
    let (lead, _) = roots
        .mu
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, m)| {
            if m.abs() > best.1 {
                (i, m.abs())
            } else {
                best
            }
        });
    let mut mu1 = roots.mu[lead];
    for _ in 0..4 {
        let d = poly.derivative(mu1);
        if d == 0.0 {
            break;
        }
        let next = mu1 - poly.eval(mu1) / d;
        if poly.eval(next).abs() >= poly.eval(mu1).abs() {
            break;
        }
        mu1 = next;
    }
    if mu1 == 0.0 {
        return roots;
    }
    let sum = -x1 - mu1;
    let product = -x3 / mu1;
    let disc = sum * sum - 4.0 * product;
    let disc = if disc < 0.0 && disc > -1e-14 * mu1 * mu1 {
        0.0
    } else {
        disc
    };
    let Ok(pair) = solve_quadratic(1.0, -sum, if disc == 0.0 { sum * sum / 4.0 } else { product }) else {
        return roots;
    };
    let mut mu = [mu1, pair[0], pair[1]];
    mu.sort_by(f64::total_cmp);
    CubicRoots { mu, ..roots }
}

/// Real roots of `a x^2 + b x + c`, sorted ascending.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Result<[f64; 2]> {
    if a == 0.0 {
        return Err(Error::NotQuadratic);
    }
    let mut disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc < 0.0 {
        if disc < -1e-9 * scale {
            return Err(Error::ComplexQuadratic { discriminant: disc });
        }
        disc = 0.0;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 {
        // b = 0 and c = 0
        [0.0, 0.0]
    } else {
        [q / a, c / q]
    };
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clustered_roots_keep_vieta_sums() {
        // two roots 2e-11 apart next to a third; with Newton the sum was off by 4e-7
        let r = [1.8875034400444748, 1.8875034400247612, 1.8965985226976219];
        let (x1, x2, x3) = (
            -(r[0] + r[1] + r[2]),
            r[0] * r[1] + r[1] * r[2] + r[0] * r[2],
            -r[0] * r[1] * r[2],
        );
        let mu = solve_cubic(x1, x2, x3).unwrap().mu;
        assert!((mu.iter().sum::<f64>() + x1).abs() < 1e-9);
        assert!((mu[0] * mu[1] + mu[1] * mu[2] + mu[0] * mu[2] - x2).abs() < 1e-9);
    }

    #[test]
    fn deflation_recovers_double_zero() {
        let roots = solve_cubic(-1.0, 0.0, 0.0).unwrap();
        let refined = refine_by_deflation(-1.0, 0.0, 0.0, roots);
        assert_eq!(refined.mu, [0.0, 0.0, 1.0]);
        // near-pure spectrum (1 - 2e-12, 1e-12, 1e-12)
        let (a, b) = (1.0 - 2e-12, 1e-12);
        let (x1, x2, x3) = (-(a + 2.0 * b), 2.0 * a * b + b * b, -a * b * b);
        let refined = refine_by_deflation(x1, x2, x3, solve_cubic(x1, x2, x3).unwrap());
        for (got, want) in refined.mu.iter().zip([b, b, a]) {
            assert!((got - want).abs() < 1e-15, "{:?}", refined.mu);
        }
    }

    fn assert_roots(r: &CubicRoots, expected: [f64; 3], tol: f64) {
        for (a, b) in r.mu.iter().zip(expected) {
            assert!((a - b).abs() <= tol, "{:?} vs {:?}", r.mu, expected);
        }
    }

    #[test]
    fn cubic_examples() {
        assert_roots(&solve_cubic(-6.0, 11.0, -6.0).unwrap(), [1.0, 2.0, 3.0], 1e-12);
        assert_roots(&solve_cubic(0.0, -1.0, 0.0).unwrap(), [-1.0, 0.0, 1.0], 1e-12);
        let triple = solve_cubic(0.0, 0.0, 0.0).unwrap();
        assert_eq!(triple.mu, [0.0; 3]);
        assert_eq!(triple.discriminant_margin, 0.0);
    }

    #[test]
    fn shifted_triple_root() {
        // (mu - 2)^3
        let r = solve_cubic(-6.0, 12.0, -8.0).unwrap();
        assert_roots(&r, [2.0; 3], 1e-12);
    }

    #[test]
    fn double_root() {
        // (mu - 1)^2 (mu + 2) = mu^3 - 3 mu + 2
        let r = solve_cubic(0.0, -3.0, 2.0).unwrap();
        assert_roots(&r, [-2.0, 1.0, 1.0], 1e-7);
    }

    #[test]
    fn complex_regime_rejected() {
        // mu^3 + mu has roots 0, +-i
        assert!(matches!(solve_cubic(0.0, 1.0, 0.0), Err(Error::ComplexRoots { .. })));
        // mu^3 - 1: one real root
        assert!(matches!(solve_cubic(0.0, 0.0, -1.0), Err(Error::ComplexRoots { .. })));
        // (mu - 1)(mu^2 + 1)
        assert!(matches!(solve_cubic(-1.0, 1.0, -1.0), Err(Error::ComplexRoots { .. })));
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(solve_quadratic(1.0, 0.0, -4.0).unwrap(), [-2.0, 2.0]);
        assert_eq!(solve_quadratic(1.0, -2.0, 1.0).unwrap(), [1.0, 1.0]);
        assert!(matches!(
            solve_quadratic(1.0, 0.0, 1.0),
            Err(Error::ComplexQuadratic { .. })
        ));
        assert_eq!(solve_quadratic(0.0, 1.0, 1.0), Err(Error::NotQuadratic));
        assert_eq!(solve_quadratic(2.0, 0.0, 0.0).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn quadratic_is_stable_for_disparate_roots() {
        // roots 1e8 and 1e-8
        let r = solve_quadratic(1.0, -(1e8 + 1e-8), 1.0).unwrap();
        assert!((r[0] - 1e-8).abs() <= 1e-22);
        assert!((r[1] - 1e8).abs() <= 1e-6);
    }

    proptest! {
        #[test]
        fn vieta_identities(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0) {
            let x1 = -(a + b + c);
            let x2 = a * b + b * c + a * c;
            let x3 = -a * b * c;
            let r = solve_cubic(x1, x2, x3).unwrap();
            let [m0, m1, m2] = r.mu;
            prop_assert!(m0 <= m1 && m1 <= m2);
            let rho = m0.abs().max(m2.abs()).max(1.0);
            prop_assert!((m0 + m1 + m2 + x1).abs() <= 1e-8 * rho);
            prop_assert!((m0 * m1 + m1 * m2 + m0 * m2 - x2).abs() <= 1e-8 * rho * rho);
            prop_assert!((m0 * m1 * m2 + x3).abs() <= 1e-8 * rho * rho * rho);
        }
    }
}
