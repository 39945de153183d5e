//! Invasion tests for conformity weights.
//!
//! A mutant shares the incumbent's belief but carries a different weight.
//! It enters with a share `epsilon` of the incumbent's mass, the extended
//! system is re-solved, and both types are scored by material payoff at
//! their own best responses.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{material_payoff, Scenario, TypeRole, TypeSpec};
use crate::sbr::solve_sbr;

/// Fitness differences below this are ties.
pub const FITNESS_TOL: f64 = 1e-12;
pub const DEFAULT_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// 21 equispaced mutant weights on `[0, 1]`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    StableAgainst,
    UnstableAgainst,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StableAgainst => "StableAgainst",
            Verdict::UnstableAgainst => "UnstableAgainst",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvasionReport {
    pub group: usize,
    pub lambda_incumbent: f64,
    pub lambda_mutant: f64,
    pub epsilon_grid: Vec<f64>,
    pub incumbent_fitness: Vec<f64>,
    pub mutant_fitness: Vec<f64>,
    pub verdict: Verdict,
    /// Largest grid epsilon such that the incumbent is at least as fit at
    /// every grid epsilon up to it.
    pub epsilon_threshold: Option<f64>,
}

/// Fitness of the incumbent type `t` and of a same-belief mutant with
/// weight `lambda_mutant` entering at share `epsilon`.
pub fn invade_type(s: &Scenario, t: usize, lambda_mutant: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} is outside (0, 1)"
        )));
    }
    if !(0.0..=1.0).contains(&lambda_mutant) {
        return Err(Error::InvalidArgument(format!(
            "mutant lambda {lambda_mutant} is outside [0, 1]"
        )));
    }
    let incumbent = *s
        .types
        .get(t)
        .ok_or_else(|| Error::InvalidArgument(format!("type {t} does not exist")))?;

    let mut ext = s.clone();
    ext.types[t].mass = (1.0 - epsilon) * incumbent.mass;
    ext.types.push(TypeSpec {
        group: incumbent.group,
        belief: incumbent.belief,
        lambda: lambda_mutant,
        mass: epsilon * incumbent.mass,
        role: TypeRole::Mutant,
    });
    let m = ext.types.len() - 1;
    let sol = solve_sbr(&ext, &ext.lambdas())?;
    let alpha = s.groups[incumbent.group].alpha;
    Ok((
        material_payoff(sol.x[t], alpha, &s.payoff),
        material_payoff(sol.x[m], alpha, &s.payoff),
    ))
}

/// [`invade_type`] against group `k`'s misspecified type at its stored
/// weight.
pub fn invade(s: &Scenario, k: usize, lambda_mutant: f64, epsilon: f64) -> Result<(f64, f64)> {
    invade_type(s, incumbent_of(s, k)?, lambda_mutant, epsilon)
}

fn incumbent_of(s: &Scenario, k: usize) -> Result<usize> {
    if k >= s.num_groups() {
        return Err(Error::InvalidArgument(format!("group {k} does not exist")));
    }
    s.misspecified_type(k)
        .ok_or_else(|| Error::InvalidArgument(format!("group {k} has no misspecified type")))
}

/// Runs one mutant across the epsilon grid.
pub fn invasion_report(
    s: &Scenario,
    k: usize,
    lambda_mutant: f64,
    epsilon_grid: &[f64],
) -> Result<InvasionReport> {
    if epsilon_grid.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon grid".into()));
    }
    let t = incumbent_of(s, k)?;
    let mut eps = epsilon_grid.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut incumbent_fitness = Vec::with_capacity(eps.len());
    let mut mutant_fitness = Vec::with_capacity(eps.len());
    for &e in &eps {
        let (inc, mu) = invade_type(s, t, lambda_mutant, e)?;
        incumbent_fitness.push(inc);
        mutant_fitness.push(mu);
    }

    let holds: Vec<bool> = incumbent_fitness
        .iter()
        .zip(&mutant_fitness)
        .map(|(i, m)| *i >= m - FITNESS_TOL)
        .collect();
    // eps is descending, so scan from the smallest epsilon upward.
    let mut threshold = None;
    for (i, &e) in eps.iter().enumerate().rev() {
        if !holds[i] {
            break;
        }
        threshold = Some(e);
    }
    let lambda_incumbent = s.types[t].lambda;
    let negligible = incumbent_fitness
        .iter()
        .zip(&mutant_fitness)
        .all(|(i, m)| (i - m).abs() < FITNESS_TOL);
    let verdict = if negligible && lambda_mutant != lambda_incumbent {
        Verdict::Inconclusive
    } else if threshold.is_some() {
        Verdict::StableAgainst
    } else {
        Verdict::UnstableAgainst
    };
    Ok(InvasionReport {
        group: k,
        lambda_incumbent,
        lambda_mutant,
        epsilon_grid: eps,
        incumbent_fitness,
        mutant_fitness,
        verdict,
        epsilon_threshold: threshold,
    })
}

/// One report per mutant weight, computed in parallel. Output order follows
/// `lambda_grid`.
pub fn stability_scan(
    s: &Scenario,
    k: usize,
    lambda_grid: &[f64],
    epsilon_grid: &[f64],
) -> Result<Vec<InvasionReport>> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("empty mutant lambda grid".into()));
    }
    if let Some(e) = epsilon_grid.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::InvalidArgument(format!("epsilon {e} is outside (0, 1]")));
    }
    lambda_grid
        .par_iter()
        .map(|&l| invasion_report(s, k, l, epsilon_grid))
        .collect()
}

/// Stable iff every mutant with a weight different from the incumbent's is
/// repelled.
pub fn is_stable(reports: &[InvasionReport]) -> bool {
    reports
        .iter()
        .filter(|r| r.lambda_mutant != r.lambda_incumbent)
        .all(|r| r.verdict == Verdict::StableAgainst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::solve_pressure_profile;
    use crate::model::{GroupParams, PayoffSpec, PeerMatrix};

    fn fig1_at_optimum() -> Scenario {
        let s = Scenario::canonical(
            "fig1",
            vec![GroupParams::new(10.0, 5.0, 0.5), GroupParams::new(12.0, 15.0, 0.5)],
            PeerMatrix::two_group(0.5),
            PayoffSpec::default(),
        )
        .unwrap();
        let prof = solve_pressure_profile(&s).unwrap();
        s.with_group_lambdas(&prof.lambda_star)
    }

    #[test]
    fn optimal_incumbent_beats_mutant() {
        let s = fig1_at_optimum();
        let (inc, mu) = invade(&s, 0, 0.5, 0.01).unwrap();
        assert!(inc > mu, "{inc} vs {mu}");
    }

    #[test]
    fn identical_mutant_ties() {
        let s = fig1_at_optimum();
        let l = s.types[1].lambda;
        let (inc, mu) = invade(&s, 0, l, 0.01).unwrap();
        assert!((inc - mu).abs() <= 1e-12);
        let r = invasion_report(&s, 0, l, &DEFAULT_EPSILONS).unwrap();
        assert_eq!(r.verdict, Verdict::StableAgainst);
    }

    #[test]
    fn correct_belief_incumbent_keeps_full_payoff() {
        // Group 0 has alpha_hat = alpha; group 1 drags the peer statistic
        // away from alpha_0.
        let s = Scenario::canonical(
            "lemma",
            vec![GroupParams::new(4.0, 4.0, 0.5), GroupParams::new(9.0, 9.0, 0.5)],
            PeerMatrix::two_group(0.5),
            PayoffSpec::Quadratic { c: 2.0 },
        )
        .unwrap();
        let (inc, mu) = invade(&s, 0, 0.3, 0.01).unwrap();
        assert_eq!(inc, 2.0);
        assert!(mu < inc);
        let reports = stability_scan(&s, 0, &default_lambda_grid()[1..], &DEFAULT_EPSILONS).unwrap();
        assert!(is_stable(&reports));
    }

    #[test]
    fn interior_optimum_resists_all_mutants() {
        let s = fig1_at_optimum();
        let star = s.types[3].lambda;
        let grid: Vec<f64> = (0..=10)
            .map(|i| i as f64 / 10.0)
            .filter(|l| (l - star).abs() > 1e-12)
            .collect();
        let reports = stability_scan(&s, 1, &grid, &[1e-4, 1e-3, 1e-2]).unwrap();
        assert_eq!(reports.len(), grid.len());
        for r in &reports {
            assert_eq!(r.verdict, Verdict::StableAgainst, "mutant {}", r.lambda_mutant);
            assert_eq!(r.epsilon_threshold, Some(1e-2));
        }
        assert!(is_stable(&reports));
    }

    #[test]
    fn non_optimal_incumbent_is_invaded() {
        let opt = fig1_at_optimum();
        let star = opt.types[1].lambda;
        let s = opt.with_group_lambdas(&[star - 0.2, opt.types[3].lambda]);
        let r = invasion_report(&s, 0, star, &DEFAULT_EPSILONS).unwrap();
        assert_eq!(r.verdict, Verdict::UnstableAgainst);
        assert_eq!(r.epsilon_threshold, None);
    }

    #[test]
    fn degenerate_scenario_is_inconclusive() {
        // Everyone correct at the same return: all weights are equivalent.
        let s = Scenario::canonical(
            "flat",
            vec![GroupParams::new(3.0, 3.0, 0.5)],
            PeerMatrix::from_rows(vec![vec![1.0]]),
            PayoffSpec::default(),
        )
        .unwrap();
        let r = invasion_report(&s, 0, 0.4, &DEFAULT_EPSILONS).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn arguments_are_checked() {
        let s = fig1_at_optimum();
        assert!(invade(&s, 0, 0.5, 0.0).is_err());
        assert!(invade(&s, 0, 0.5, 1.0).is_err());
        assert!(invade(&s, 0, 1.5, 0.1).is_err());
        assert!(invade(&s, 5, 0.5, 0.1).is_err());
        assert!(stability_scan(&s, 0, &[], &DEFAULT_EPSILONS).is_err());
    }
}
