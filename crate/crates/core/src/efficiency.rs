//! Efficient conformity weights.
//!
//! A group's misspecified type is efficient at the weight whose induced
//! effort maximizes the true material payoff. Because the induced effort is
//! continuous and monotone in the group's own weight, the optimum is either
//! the unique weight at which effort equals the true return, or an endpoint
//! of `[0, 1]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{material_payoff, Scenario};
use crate::sbr::{solve_sbr, SbrSolution};

/// Closed-form denominators smaller than this are treated as zero.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Interior solutions must reproduce the true return to this tolerance.
pub const INTERIOR_EFFORT_TOL: f64 = 1e-9;
/// Bisection stops once the bracket is this narrow (or cannot shrink).
pub const BISECTION_TOL: f64 = 1e-12;
/// Convergence threshold on the largest weight update per round.
pub const PROFILE_TOL: f64 = 1e-10;
pub const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Interior,
    CornerZero,
    CornerOne,
}

impl Regime {
    pub fn is_corner(&self) -> bool {
        !matches!(self, Regime::Interior)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Interior => "Interior",
            Regime::CornerZero => "CornerZero",
            Regime::CornerOne => "CornerOne",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumClass {
    /// Every misspecified group is interior, so induced efforts equal the
    /// true returns.
    NashAndSCE,
    Mixed,
    AllCorner,
}

impl fmt::Display for EquilibriumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumClass::NashAndSCE => "NashAndSCE",
            EquilibriumClass::Mixed => "Mixed",
            EquilibriumClass::AllCorner => "AllCorner",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureProfile {
    /// Efficient weight of each group's misspecified type (0 for groups
    /// without misspecification).
    pub lambda_star: Vec<f64>,
    pub regime: Vec<Regime>,
    pub equilibrium_class: EquilibriumClass,
    /// Best responses at `lambda_star`.
    pub induced: SbrSolution,
    /// Rounds of the cyclic search; zero when the closed form applied.
    pub rounds: usize,
}

impl PressureProfile {
    /// Induced effort of group `k`'s misspecified type.
    pub fn misspecified_effort(&self, s: &Scenario, k: usize) -> Option<f64> {
        s.misspecified_type(k).map(|t| self.induced.x[t])
    }
}

/// `(alpha_hat - alpha) / (alpha_hat - sum_j p_kj alpha_j)`, unclamped.
pub fn interior_lambda_candidate(s: &Scenario, k: usize) -> Result<f64> {
    let g = s.groups[k];
    let denom = g.alpha_hat - s.optimal_peer_mean(k);
    if denom.abs() <= SINGULAR_TOL {
        return Err(Error::SingularDenominator { group: k });
    }
    Ok((g.alpha_hat - g.alpha) / denom)
}

/// Regime implied by the closed form when every group plays its true
/// return.
pub fn interiority_check(s: &Scenario, k: usize) -> Regime {
    let g = s.groups[k];
    let sigma = s.optimal_peer_mean(k);
    let (a, ah) = (g.alpha, g.alpha_hat);
    if (ah < a && a < sigma) || (sigma < a && a < ah) {
        return Regime::Interior;
    }
    match interior_lambda_candidate(s, k) {
        Ok(c) if c <= 0.0 => Regime::CornerZero,
        Ok(_) => Regime::CornerOne,
        // Belief equals the optimal peer mean: no pull at all when the
        // numerator also vanishes, otherwise the weight needed is unbounded.
        Err(_) if (ah - a).abs() <= SINGULAR_TOL => Regime::CornerZero,
        Err(_) => Regime::CornerOne,
    }
}

fn require_quadratic(s: &Scenario) -> Result<()> {
    if s.payoff.is_quadratic() {
        Ok(())
    } else {
        Err(Error::RequiresQuadratic)
    }
}

fn misspecified_index(s: &Scenario, k: usize) -> Result<usize> {
    s.misspecified_type(k)
        .ok_or_else(|| Error::InvalidArgument(format!("group {k} has no misspecified type")))
}

/// Best weight for group `k` holding the other groups' weights fixed.
///
/// Finds the root of `x_k(lambda) = alpha_k` by bisection when the true
/// return is bracketed by the endpoint efforts, otherwise compares the
/// endpoint payoffs (ties go to zero).
pub fn best_lambda_given_others(
    s: &Scenario,
    k: usize,
    group_lambdas: &[f64],
) -> Result<(f64, Regime)> {
    require_quadratic(s)?;
    let t = misspecified_index(s, k)?;
    let alpha = s.groups[k].alpha;
    let mut per_group = group_lambdas.to_vec();
    let mut effort = |l: f64| -> Result<f64> {
        per_group[k] = l;
        Ok(solve_sbr(s, &s.profile_from_group_lambdas(&per_group))?.x[t])
    };

    let d0 = effort(0.0)? - alpha;
    if d0 == 0.0 {
        return Ok((0.0, Regime::CornerZero));
    }
    let d1 = effort(1.0)? - alpha;
    if d1 == 0.0 {
        return Ok((1.0, Regime::CornerOne));
    }
    if d0.signum() != d1.signum() {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let d = effort(mid)? - alpha;
            if d == 0.0 {
                return Ok((mid, Regime::Interior));
            }
            if d.signum() == d0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok((0.5 * (lo + hi), Regime::Interior));
    }
    let p0 = material_payoff(alpha + d0, alpha, &s.payoff);
    let p1 = material_payoff(alpha + d1, alpha, &s.payoff);
    if p1 > p0 {
        Ok((1.0, Regime::CornerOne))
    } else {
        Ok((0.0, Regime::CornerZero))
    }
}

fn classify(regimes: &[Regime], misspecified: &[usize]) -> EquilibriumClass {
    let interior = misspecified
        .iter()
        .filter(|&&k| regimes[k] == Regime::Interior)
        .count();
    if interior == misspecified.len() {
        EquilibriumClass::NashAndSCE
    } else if interior == 0 {
        EquilibriumClass::AllCorner
    } else {
        EquilibriumClass::Mixed
    }
}

/// Efficient weight profile for all groups.
///
/// Uses the closed form when it is interior for every misspecified group;
/// otherwise runs cyclic per-group best responses over weight profiles,
/// halving the step of any group whose update direction has flipped twice.
pub fn solve_pressure_profile(s: &Scenario) -> Result<PressureProfile> {
    require_quadratic(s)?;
    let k = s.num_groups();
    let misspecified: Vec<usize> = (0..k).filter(|&g| s.is_misspecified_group(g)).collect();
    let mut lambda = vec![0.0; k];
    let mut regime = vec![Regime::CornerZero; k];

    if misspecified
        .iter()
        .all(|&g| interiority_check(s, g) == Regime::Interior)
    {
        for &g in &misspecified {
            lambda[g] = interior_lambda_candidate(s, g)?;
            regime[g] = Regime::Interior;
        }
        let induced = solve_sbr(s, &s.profile_from_group_lambdas(&lambda))?;
        return Ok(PressureProfile {
            equilibrium_class: classify(&regime, &misspecified),
            lambda_star: lambda,
            regime,
            induced,
            rounds: 0,
        });
    }

    for &g in &misspecified {
        lambda[g] = interior_lambda_candidate(s, g)
            .map(|c| c.clamp(0.0, 1.0))
            .unwrap_or(0.0);
    }
    let mut last_sign = vec![0.0f64; k];
    let mut flips = vec![0usize; k];
    let mut converged_at = None;
    let mut change = f64::INFINITY;
    for round in 1..=MAX_ROUNDS {
        change = 0.0f64;
        for &g in &misspecified {
            let (target, _) = best_lambda_given_others(s, g, &lambda)?;
            let step = target - lambda[g];
            if step != 0.0 {
                if last_sign[g] != 0.0 && step.signum() != last_sign[g] {
                    flips[g] += 1;
                }
                last_sign[g] = step.signum();
            }
            let damping = if flips[g] >= 2 { 0.5 } else { 1.0 };
            let next = lambda[g] + damping * step;
            change = change.max((next - lambda[g]).abs());
            lambda[g] = next;
        }
        if change <= PROFILE_TOL {
            converged_at = Some(round);
            break;
        }
    }
    let Some(rounds) = converged_at else {
        return Err(Error::NonConvergence {
            rounds: MAX_ROUNDS,
            residual: change,
            last: lambda,
        });
    };

    // Snap to the exact best responses at the converged profile.
    for &g in &misspecified {
        let (target, reg) = best_lambda_given_others(s, g, &lambda)?;
        lambda[g] = target;
        regime[g] = reg;
    }
    let induced = solve_sbr(s, &s.profile_from_group_lambdas(&lambda))?;
    Ok(PressureProfile {
        equilibrium_class: classify(&regime, &misspecified),
        lambda_star: lambda,
        regime,
        induced,
        rounds,
    })
}

/// Grid-search oracle: the weight on `{0, res, 2 res, ..., 1}` maximizing
/// group `k`'s material payoff with the other groups held at `others`.
/// Ties go to the smaller weight.
pub fn brute_force_lambda(s: &Scenario, k: usize, others: &[f64], resolution: f64) -> Result<f64> {
    require_quadratic(s)?;
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is outside (0, 0.1]"
        )));
    }
    let t = misspecified_index(s, k)?;
    let alpha = s.groups[k].alpha;
    let steps = (1.0 / resolution).round() as usize;
    let mut per_group = others.to_vec();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=steps {
        let l = if i == steps { 1.0 } else { i as f64 * resolution };
        per_group[k] = l;
        let x = solve_sbr(s, &s.profile_from_group_lambdas(&per_group))?.x[t];
        let v = material_payoff(x, alpha, &s.payoff);
        if v > best.0 {
            best = (v, l);
        }
    }
    Ok(best.1)
}
