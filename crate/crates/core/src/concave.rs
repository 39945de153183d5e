//! Strictly concave payoffs.
//!
//! With a general concave `U`, a type facing a fixed peer statistic `E`
//! solves `(1 - lambda) U'(belief - x) + lambda U'(E - x) = 0`. The solution
//! is `(1 - tau) belief + tau E` for a strictly increasing `tau(lambda)`
//! with `tau(0) = 0` and `tau(1) = 1`, and the efficient transformed weight
//! has the same closed form as in the quadratic case.

use crate::error::{Error, Result};
use crate::model::{PayoffSpec, Scenario};

/// `|E - belief|` at or below this leaves `tau` undefined.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Bisects a monotone `f` on `[lo, hi]` whose sign at `lo` is `sign_lo`,
/// down to adjacent floats.
fn bisect(mut lo: f64, mut hi: f64, sign_lo: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Subjective best response to a fixed peer statistic `e`.
pub fn solve_sbr_concave(alpha_hat: f64, e: f64, lambda: f64, u: &PayoffSpec) -> f64 {
    if lambda <= 0.0 || e == alpha_hat {
        return alpha_hat;
    }
    if lambda >= 1.0 {
        return e;
    }
    let foc = |x: f64| (1.0 - lambda) * u.derivative(alpha_hat - x) + lambda * u.derivative(e - x);
    let at_belief = foc(alpha_hat);
    if at_belief == 0.0 {
        return alpha_hat;
    }
    bisect(alpha_hat, e, at_belief.signum(), foc)
}

fn check_reference(alpha_hat: f64, e: f64) -> Result<()> {
    if (e - alpha_hat).abs() <= DEGENERATE_TOL {
        Err(Error::DegenerateReference)
    } else {
        Ok(())
    }
}

/// Share of the way from the belief to the peer statistic.
pub fn tau(lambda: f64, alpha_hat: f64, e: f64, u: &PayoffSpec) -> Result<f64> {
    check_reference(alpha_hat, e)?;
    Ok((solve_sbr_concave(alpha_hat, e, lambda, u) - alpha_hat) / (e - alpha_hat))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauCurve {
    pub lambda_grid: Vec<f64>,
    pub tau_values: Vec<f64>,
    pub endpoints: (f64, f64),
}

impl TauCurve {
    pub fn new(alpha_hat: f64, e: f64, u: &PayoffSpec, lambda_grid: &[f64]) -> Result<Self> {
        let tau_values = lambda_grid
            .iter()
            .map(|&l| tau(l, alpha_hat, e, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(TauCurve {
            lambda_grid: lambda_grid.to_vec(),
            tau_values,
            endpoints: (tau(0.0, alpha_hat, e, u)?, tau(1.0, alpha_hat, e, u)?),
        })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.tau_values.windows(2).all(|w| w[1] > w[0])
    }
}

/// Transformed efficient weight `(alpha_hat - alpha) / (alpha_hat - sum_j
/// p_kj alpha_j)`. Independent of the payoff and of group shares.
pub fn tilde_lambda_star(s: &Scenario, k: usize) -> Result<f64> {
    if k >= s.num_groups() {
        return Err(Error::InvalidArgument(format!("group {k} does not exist")));
    }
    let g = s.groups[k];
    if g.alpha_hat == g.alpha {
        return Ok(0.0);
    }
    let sigma = s.optimal_peer_mean(k);
    let (a, h) = (g.alpha, g.alpha_hat);
    if (h < a && a < sigma) || (sigma < a && a < h) {
        Ok((h - a) / (h - sigma))
    } else {
        Err(Error::NotInterior { group: k })
    }
}

/// The weight whose transformed value is `tilde`.
pub fn invert_tau(tilde: f64, alpha_hat: f64, e: f64, u: &PayoffSpec) -> Result<f64> {
    check_reference(alpha_hat, e)?;
    if !(0.0..=1.0).contains(&tilde) {
        return Err(Error::InvalidArgument(format!(
            "transformed weight {tilde} is outside [0, 1]"
        )));
    }
    if tilde == 0.0 || tilde == 1.0 || u.is_quadratic() {
        return Ok(tilde);
    }
    let gap = |l: f64| (solve_sbr_concave(alpha_hat, e, l, u) - alpha_hat) / (e - alpha_hat) - tilde;
    Ok(bisect(0.0, 1.0, -1.0, gap))
}

/// Interior efficient weights of every group under the scenario's payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveProfile {
    pub tilde_lambda_star: Vec<f64>,
    pub lambda_star: Vec<f64>,
    /// Effort of each group's misspecified type against the all-optimal
    /// peer statistic.
    pub effort: Vec<f64>,
}

pub fn concave_pressure_profile(s: &Scenario) -> Result<ConcaveProfile> {
    let k = s.num_groups();
    let mut out = ConcaveProfile {
        tilde_lambda_star: Vec::with_capacity(k),
        lambda_star: Vec::with_capacity(k),
        effort: Vec::with_capacity(k),
    };
    for g in 0..k {
        let tilde = tilde_lambda_star(s, g)?;
        let params = s.groups[g];
        let (lambda, effort) = if tilde == 0.0 {
            (0.0, params.alpha_hat)
        } else {
            let e = s.optimal_peer_mean(g);
            let l = invert_tau(tilde, params.alpha_hat, e, &s.payoff)?;
            (l, solve_sbr_concave(params.alpha_hat, e, l, &s.payoff))
        };
        out.tilde_lambda_star.push(tilde);
        out.lambda_star.push(lambda);
        out.effort.push(effort);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConcaveKind, GroupParams, PeerMatrix};

    const COSH: PayoffSpec = PayoffSpec::Concave(ConcaveKind::CoshBowl);
    const QUAD: PayoffSpec = PayoffSpec::Quadratic { c: 0.0 };

    #[test]
    fn symmetric_midpoint() {
        assert!((solve_sbr_concave(0.0, 2.0, 0.5, &COSH) - 1.0).abs() < 1e-12);
        assert!((tau(0.5, 0.0, 2.0, &COSH).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_degenerate_reference() {
        for u in [COSH, QUAD, PayoffSpec::Concave(ConcaveKind::QuarticBowl)] {
            assert_eq!(solve_sbr_concave(3.0, 7.0, 0.0, &u), 3.0);
            assert_eq!(solve_sbr_concave(3.0, 7.0, 1.0, &u), 7.0);
            assert_eq!(solve_sbr_concave(3.0, 3.0, 0.4, &u), 3.0);
            assert_eq!(tau(1.0, 3.0, 7.0, &u).unwrap(), 1.0);
        }
        assert_eq!(tau(0.3, 2.0, 2.0, &COSH), Err(Error::DegenerateReference));
        assert_eq!(invert_tau(0.3, 2.0, 2.0, &COSH), Err(Error::DegenerateReference));
    }

    #[test]
    fn quarter_weight_root() {
        // Oracle: 3 sinh(x) = sinh(2 - x) on (0, 1), by independent bisection.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if 3.0 * m.sinh() < (2.0 - m).sinh() {
                lo = m;
            } else {
                hi = m;
            }
        }
        let x = solve_sbr_concave(0.0, 2.0, 0.25, &COSH);
        assert!((x - lo).abs() < 1e-12);
        assert!(x > 0.0 && x < 1.0);
    }

    #[test]
    fn quadratic_tau_is_identity() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let c = TauCurve::new(1.5, -2.0, &QUAD, &grid).unwrap();
        for (l, t) in c.lambda_grid.iter().zip(&c.tau_values) {
            assert!((l - t).abs() < 1e-10);
        }
        assert_eq!(invert_tau(0.37, 1.5, -2.0, &QUAD).unwrap(), 0.37);
    }

    #[test]
    fn cosh_tau_curve_shape() {
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let c = TauCurve::new(0.0, 2.0, &COSH, &grid).unwrap();
        assert_eq!(c.endpoints, (0.0, 1.0));
        assert!(c.is_strictly_increasing());
    }

    #[test]
    fn inversion_hits_target_effort() {
        let l = invert_tau(5.0 / 6.0, 0.0, 2.0, &COSH).unwrap();
        let x = solve_sbr_concave(0.0, 2.0, l, &COSH);
        assert!((x - 5.0 / 3.0).abs() < 1e-9);
        assert_eq!(invert_tau(0.0, 0.0, 2.0, &COSH).unwrap(), 0.0);
        assert_eq!(invert_tau(1.0, 0.0, 2.0, &COSH).unwrap(), 1.0);
    }

    fn fig1(q: [f64; 2], payoff: PayoffSpec) -> Scenario {
        Scenario::canonical(
            "fig1",
            vec![GroupParams::new(10.0, 5.0, q[0]), GroupParams::new(12.0, 15.0, q[1])],
            PeerMatrix::two_group(0.5),
            payoff,
        )
        .unwrap()
    }

    #[test]
    fn transformed_weight_matches_quadratic_and_ignores_shares() {
        for q in [[0.5, 0.5], [0.1, 0.9], [0.8, 0.3]] {
            let s = fig1(q, COSH);
            assert!((tilde_lambda_star(&s, 0).unwrap() - 5.0 / 6.0).abs() < 1e-12);
            assert!((tilde_lambda_star(&s, 1).unwrap() - 0.75).abs() < 1e-12);
        }
        let acc = Scenario::canonical(
            "acc",
            vec![GroupParams::new(4.0, 4.0, 0.5), GroupParams::new(9.0, 9.0, 0.5)],
            PeerMatrix::two_group(0.5),
            COSH,
        )
        .unwrap();
        assert_eq!(tilde_lambda_star(&acc, 0).unwrap(), 0.0);
    }

    #[test]
    fn pipeline_reaches_true_returns() {
        let prof = concave_pressure_profile(&fig1([0.5, 0.5], COSH)).unwrap();
        assert!((prof.effort[0] - 10.0).abs() < 1e-9);
        assert!((prof.effort[1] - 12.0).abs() < 1e-9);
        let quad = concave_pressure_profile(&fig1([0.5, 0.5], QUAD)).unwrap();
        assert!((quad.lambda_star[0] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn corner_chain_is_refused() {
        let s = Scenario::canonical(
            "c",
            vec![GroupParams::new(1.0, 4.0, 0.4), GroupParams::new(9.0, 6.0, 0.6)],
            PeerMatrix::two_group(0.7),
            COSH,
        )
        .unwrap();
        assert!(matches!(tilde_lambda_star(&s, 0), Err(Error::NotInterior { group: 0 })));
    }
}
