//! Sensitivity of efficient weights to beliefs, homophily and group
//! composition.
//!
//! Every report carries a closed-form (or implicit) derivative together with
//! a central difference taken through [`solve_pressure_profile`].

use std::fmt;

use crate::efficiency::{
    solve_pressure_profile, EquilibriumClass, PressureProfile, Regime, INTERIOR_EFFORT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{validate_scenario, Scenario, NORMALIZE_TOL};

/// Step used for the numeric side of every report.
pub const FD_STEP: f64 = 1e-6;
pub const AGREEMENT_TOL: f64 = 1e-5;
/// `|alpha - Sigma|` at or below this counts as zero for sign predictions.
pub const SIGN_TOL: f64 = 1e-12;

/// Moves `p_kk` while the out-group weights keep fixed proportions:
/// `p_kj = (1 - p_kk) r_j` for `j != k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalVariation {
    pub k: usize,
    /// One entry per group; `r[k]` is ignored and stored as 0.
    pub r: Vec<f64>,
}

impl ProportionalVariation {
    pub fn new(k: usize, mut r: Vec<f64>) -> Result<Self> {
        if k >= r.len() || r.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "out-group weights need at least two groups and k < {}",
                r.len()
            )));
        }
        r[k] = 0.0;
        if r.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("out-group weights must be >= 0".into()));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::InvalidArgument(format!(
                "out-group weights sum to {sum}, expected 1"
            )));
        }
        r.iter_mut().for_each(|v| *v /= sum);
        Ok(ProportionalVariation { k, r })
    }

    /// Out-group proportions read off the current row `k`.
    pub fn from_scenario(s: &Scenario, k: usize) -> Result<Self> {
        if k >= s.num_groups() {
            return Err(Error::InvalidArgument(format!("group {k} does not exist")));
        }
        let out = 1.0 - s.peer.get(k, k);
        if out <= 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "group {k} has no out-group weight to scale"
            )));
        }
        let r = (0..s.num_groups())
            .map(|j| if j == k { 0.0 } else { s.peer.get(k, j) / out })
            .collect();
        ProportionalVariation::new(k, r)
    }

    pub fn row(&self, pkk: f64) -> Vec<f64> {
        self.r
            .iter()
            .enumerate()
            .map(|(j, rj)| if j == self.k { pkk } else { (1.0 - pkk) * rj })
            .collect()
    }

    /// `A = sum_{j != k} r_j alpha_j`.
    pub fn outgroup_mean(&self, s: &Scenario) -> f64 {
        self.r.iter().zip(&s.groups).map(|(r, g)| r * g.alpha).sum()
    }

    pub fn apply(&self, s: &Scenario, pkk: f64) -> Result<Scenario> {
        if !(0.0..=1.0).contains(&pkk) {
            return Err(Error::InvalidArgument(format!("p_kk = {pkk} is outside [0, 1]")));
        }
        if self.r.len() != s.num_groups() {
            return Err(Error::InvalidArgument(format!(
                "out-group weights have {} entries for {} groups",
                self.r.len(),
                s.num_groups()
            )));
        }
        let mut out = s.clone();
        out.peer.set_row(self.k, self.row(pkk));
        Ok(out)
    }
}

/// Parameter a derivative is taken with respect to. `group` is the group
/// whose efficient weight is differentiated.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    AlphaHat { group: usize },
    Pkk(ProportionalVariation),
    Q { group: usize, j: usize },
}

impl Target {
    pub fn group(&self) -> usize {
        match self {
            Target::AlphaHat { group } | Target::Q { group, .. } => *group,
            Target::Pkk(v) => v.k,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::AlphaHat { .. } => f.write_str("alpha_hat"),
            Target::Pkk(_) => f.write_str("p_kk"),
            Target::Q { j, .. } => write!(f, "q_{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatReport {
    pub target: Target,
    pub analytic: f64,
    pub numeric: f64,
    pub sign_prediction: String,
    pub agrees: bool,
}

impl StatReport {
    fn new(target: Target, analytic: f64, numeric: f64, sign_prediction: String) -> Self {
        let agrees =
            (analytic - numeric).abs() <= AGREEMENT_TOL.max(AGREEMENT_TOL * analytic.abs());
        StatReport {
            target,
            analytic,
            numeric,
            sign_prediction,
            agrees,
        }
    }
}

fn interior_profile(s: &Scenario, k: usize) -> Result<PressureProfile> {
    if k >= s.num_groups() {
        return Err(Error::InvalidArgument(format!("group {k} does not exist")));
    }
    let prof = solve_pressure_profile(s)?;
    if prof.regime[k] != Regime::Interior {
        return Err(Error::NotInterior { group: k });
    }
    Ok(prof)
}

fn perturbed(s: &Scenario, target: &Target, delta: f64) -> Result<Scenario> {
    let out = match target {
        Target::AlphaHat { group } => {
            let mut out = s.clone();
            out.groups[*group].alpha_hat += delta;
            out.resync_canonical_types();
            out
        }
        Target::Q { j, .. } => {
            if !s.is_canonical() {
                return Err(Error::InvalidArgument(
                    "q perturbations need the two-type-per-group layout".into(),
                ));
            }
            let mut out = s.clone();
            out.groups[*j].q += delta;
            out.resync_canonical_types();
            out
        }
        Target::Pkk(v) => v.apply(s, s.peer.get(v.k, v.k) + delta)?,
    };
    validate_scenario(out).map_err(|e| {
        Error::InvalidArgument(format!("perturbation by {delta:e} is invalid: {e}"))
    })
}

fn check_target(s: &Scenario, target: &Target) -> Result<()> {
    let k = s.num_groups();
    let ok = match target {
        Target::AlphaHat { group } => *group < k,
        Target::Q { group, j } => *group < k && *j < k,
        Target::Pkk(v) => v.k < k && v.r.len() == k,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("target {target} refers to a missing group")))
    }
}

/// Central difference of the target group's efficient weight.
pub fn finite_difference(s: &Scenario, target: &Target, h: f64) -> Result<f64> {
    if !(1e-8..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!("step {h} is outside [1e-8, 1e-3]")));
    }
    check_target(s, target)?;
    let k = target.group();
    let plus = solve_pressure_profile(&perturbed(s, target, h)?)?;
    let minus = solve_pressure_profile(&perturbed(s, target, -h)?)?;
    if plus.regime != minus.regime {
        return Err(Error::RegimeChange {
            before: format!("{:?}", minus.regime),
            after: format!("{:?}", plus.regime),
        });
    }
    Ok((plus.lambda_star[k] - minus.lambda_star[k]) / (2.0 * h))
}

/// `(alpha_k - Sigma_k) / (alpha_hat_k - Sigma_k)^2` at the equilibrium
/// peer statistic.
pub fn dlambda_dalphahat(s: &Scenario, k: usize) -> Result<StatReport> {
    let prof = interior_profile(s, k)?;
    let g = s.groups[k];
    let sigma = prof.induced.sigma[k];
    let analytic = (g.alpha - sigma) / (g.alpha_hat - sigma).powi(2);
    let gap = g.alpha - sigma;
    let sign = if gap.abs() <= SIGN_TOL {
        format!("alpha_k = Sigma_k = {sigma}: flat in alpha_hat_k")
    } else if gap > 0.0 {
        format!("alpha_k = {} > Sigma_k = {sigma}: increasing in alpha_hat_k", g.alpha)
    } else {
        format!("alpha_k = {} < Sigma_k = {sigma}: decreasing in alpha_hat_k", g.alpha)
    };
    let target = Target::AlphaHat { group: k };
    let numeric = finite_difference(s, &target, FD_STEP)?;
    Ok(StatReport::new(target, analytic, numeric, sign))
}

/// Derivative with respect to within-group homophily under proportional
/// out-group variation.
pub fn dlambda_dpkk(s: &Scenario, v: &ProportionalVariation) -> Result<StatReport> {
    let k = v.k;
    let prof = interior_profile(s, k)?;
    let g = s.groups[k];
    let p = s.peer.get(k, k);
    let (analytic, sign) = if prof.equilibrium_class == EquilibriumClass::NashAndSCE {
        let a = v.outgroup_mean(s);
        let d = g.alpha_hat - p * g.alpha - (1.0 - p) * a;
        (
            (g.alpha_hat - g.alpha) * (g.alpha - a) / (d * d),
            "all groups interior: increasing in p_kk".to_string(),
        )
    } else {
        // g(p) = Sigma_k(p) - p alpha_k is the out-group part of the peer
        // statistic; its slope comes from re-solved equilibria.
        let out_part = |pkk: f64| -> Result<f64> {
            let sp = v.apply(s, pkk)?;
            let pr = solve_pressure_profile(&sp)?;
            Ok(pr.induced.sigma[k] - pkk * g.alpha)
        };
        let g_slope = (out_part(p + FD_STEP)? - out_part(p - FD_STEP)?) / (2.0 * FD_STEP);
        let gp = prof.induced.sigma[k] - p * g.alpha;
        let d = g.alpha_hat - p * g.alpha - gp;
        (
            (g.alpha_hat - g.alpha) * (g.alpha + g_slope) / (d * d),
            format!(
                "some group at a corner: sign of (alpha_hat_k - alpha_k)(alpha_k + g'(p_kk)) with g' = {g_slope}"
            ),
        )
    };
    let target = Target::Pkk(v.clone());
    let numeric = finite_difference(s, &target, FD_STEP)?;
    Ok(StatReport::new(target, analytic, numeric, sign))
}

/// `dSigma_k/dq_j` with interior groups pinned at their true returns and
/// corner groups responding through the linear system.
fn dsigma_dq(s: &Scenario, prof: &PressureProfile, k: usize, j: usize) -> Result<f64> {
    let n = s.num_groups();
    let effort: Vec<f64> = (0..n)
        .map(|m| match s.misspecified_type(m) {
            Some(_) if prof.regime[m] == Regime::Interior => s.groups[m].alpha,
            Some(t) => prof.induced.x[t],
            None => s.groups[m].alpha,
        })
        .collect();
    let free: Vec<usize> = (0..n)
        .filter(|&m| {
            s.is_misspecified_group(m)
                && prof.regime[m] != Regime::Interior
                && prof.lambda_star[m] > 0.0
        })
        .collect();
    let direct = s.groups[j].alpha - effort[j];

    let mut matrix = DenseMatrix::identity(free.len());
    let mut rhs = vec![0.0; free.len()];
    for (row, &l) in free.iter().enumerate() {
        let lam = prof.lambda_star[l];
        for (col, &m) in free.iter().enumerate() {
            matrix[(row, col)] -= lam * s.peer.get(l, m) * (1.0 - s.groups[m].q);
        }
        rhs[row] = lam * s.peer.get(l, j) * direct;
    }
    let dy = matrix
        .solve(&rhs)
        .ok_or(Error::DominanceViolation { row: 0, margin: 0.0 })?;
    let indirect: f64 = free
        .iter()
        .zip(&dy)
        .map(|(&m, d)| s.peer.get(k, m) * (1.0 - s.groups[m].q) * d)
        .sum();
    Ok(s.peer.get(k, j) * direct + indirect)
}

/// Derivative with respect to the correctly specified share of group `j`.
/// Exactly zero when group `j` already plays its true return.
pub fn dlambda_dq(s: &Scenario, k: usize, j: usize) -> Result<StatReport> {
    if j >= s.num_groups() {
        return Err(Error::InvalidArgument(format!("group {j} does not exist")));
    }
    if !s.is_canonical() {
        return Err(Error::InvalidArgument(
            "q derivatives need the two-type-per-group layout".into(),
        ));
    }
    let prof = interior_profile(s, k)?;
    let target = Target::Q { group: k, j };
    let xj = prof.misspecified_effort(s, j).unwrap_or(s.groups[j].alpha);
    let (analytic, sign) = if (xj - s.groups[j].alpha).abs() <= INTERIOR_EFFORT_TOL {
        (0.0, format!("x_{} = alpha_{}: no effect", j + 1, j + 1))
    } else {
        let g = s.groups[k];
        let sigma = prof.induced.sigma[k];
        let ds = dsigma_dq(s, &prof, k, j)?;
        (
            (g.alpha_hat - g.alpha) / (g.alpha_hat - sigma).powi(2) * ds,
            format!("ambiguous: (alpha_hat_k - alpha_k) dSigma_k/dq_j with dSigma_k/dq_j = {ds}"),
        )
    };
    let numeric = finite_difference(s, &target, FD_STEP)?;
    Ok(StatReport::new(target, analytic, numeric, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GroupParams, PayoffSpec, PeerMatrix};

    fn fig1(p: f64) -> Scenario {
        Scenario::canonical(
            "fig1",
            vec![GroupParams::new(10.0, 5.0, 0.5), GroupParams::new(12.0, 15.0, 0.5)],
            PeerMatrix::two_group(p),
            PayoffSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn belief_derivative_figure_one() {
        let s = fig1(0.5);
        let r = dlambda_dalphahat(&s, 0).unwrap();
        assert!((r.analytic + 1.0 / 36.0).abs() < 1e-12);
        assert!((r.numeric + 1.0 / 36.0).abs() < 1e-6);
        assert!(r.agrees);
        assert!(r.sign_prediction.contains("decreasing"));
        let r = dlambda_dalphahat(&s, 1).unwrap();
        assert!((r.analytic - 0.0625).abs() < 1e-12);
        assert!(r.agrees);
    }

    #[test]
    fn belief_derivative_zero_when_alpha_is_peer_mean() {
        // alpha_1 = Sigma_1 = 10 for a three-group row averaging 8 and 12.
        let s = Scenario::canonical(
            "flat",
            vec![
                GroupParams::new(10.0, 4.0, 0.5),
                GroupParams::new(8.0, 8.0, 0.5),
                GroupParams::new(12.0, 12.0, 0.5),
            ],
            PeerMatrix::from_rows(vec![
                vec![0.0, 0.5, 0.5],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ]),
            PayoffSpec::default(),
        )
        .unwrap();
        // The chain alpha_hat < alpha < Sigma fails at equality, so the
        // group is not interior and the derivative is refused.
        assert!(matches!(dlambda_dalphahat(&s, 0), Err(Error::NotInterior { group: 0 })));
    }

    #[test]
    fn homophily_derivative_figure_one() {
        let s = fig1(0.5);
        let v = ProportionalVariation::from_scenario(&s, 0).unwrap();
        assert_eq!(v.r, vec![0.0, 1.0]);
        let r = dlambda_dpkk(&s, &v).unwrap();
        assert!((r.analytic - 10.0 / 36.0).abs() < 1e-12);
        assert!((r.numeric - 10.0 / 36.0).abs() < 1e-5);
        assert!(r.agrees);
        let v2 = ProportionalVariation::new(1, vec![1.0, 0.0]).unwrap();
        let r2 = dlambda_dpkk(&s, &v2).unwrap();
        assert!((r2.analytic - 0.375).abs() < 1e-12);
        assert!(r2.agrees);
    }

    #[test]
    fn composition_derivative_vanishes_at_interior() {
        let s = fig1(0.5);
        let r = dlambda_dq(&s, 0, 1).unwrap();
        assert_eq!(r.analytic, 0.0);
        assert!(r.numeric.abs() < 1e-6);
    }

    fn mixed() -> Scenario {
        // Group 1's belief lies beyond both returns and alpha_1 < alpha_0,
        // so it sits at full conformity; group 0 stays interior.
        Scenario::canonical(
            "mixed",
            vec![GroupParams::new(10.0, 14.0, 0.5), GroupParams::new(8.0, 20.0, 0.4)],
            PeerMatrix::from_rows(vec![vec![0.6, 0.4], vec![0.3, 0.7]]),
            PayoffSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn composition_derivative_at_mixed_corner() {
        let s = mixed();
        let prof = solve_pressure_profile(&s).unwrap();
        assert_eq!(prof.regime, vec![Regime::Interior, Regime::CornerOne]);
        let r = dlambda_dq(&s, 0, 1).unwrap();
        assert!(r.analytic != 0.0);
        assert!(r.agrees, "{} vs {}", r.analytic, r.numeric);
    }

    #[test]
    fn homophily_derivative_at_mixed_corner() {
        let s = mixed();
        let v = ProportionalVariation::from_scenario(&s, 0).unwrap();
        let r = dlambda_dpkk(&s, &v).unwrap();
        assert!(r.agrees, "{} vs {}", r.analytic, r.numeric);
    }

    #[test]
    fn corner_groups_are_refused() {
        let s = mixed();
        assert!(matches!(dlambda_dalphahat(&s, 1), Err(Error::NotInterior { group: 1 })));
        assert!(matches!(dlambda_dq(&s, 1, 0), Err(Error::NotInterior { group: 1 })));
    }

    #[test]
    fn kink_is_detected() {
        // Group 0 interior iff alpha_hat < 10 here (Sigma = 11); step across
        // alpha_hat = 10.
        let s = Scenario::canonical(
            "kink",
            vec![GroupParams::new(10.0, 10.0 - 1e-7, 0.5), GroupParams::new(12.0, 12.0, 0.5)],
            PeerMatrix::two_group(0.5),
            PayoffSpec::default(),
        )
        .unwrap();
        let t = Target::AlphaHat { group: 0 };
        assert!(matches!(
            finite_difference(&s, &t, 1e-6),
            Err(Error::RegimeChange { .. })
        ));
    }

    #[test]
    fn step_and_perturbation_are_checked() {
        let s = fig1(0.5);
        let t = Target::AlphaHat { group: 0 };
        assert!(finite_difference(&s, &t, 1e-2).is_err());
        assert!(finite_difference(&s, &t, 1e-9).is_err());
        let edge = Scenario::canonical(
            "edge",
            vec![GroupParams::new(10.0, 5.0, 1.0), GroupParams::new(12.0, 15.0, 0.5)],
            PeerMatrix::two_group(0.5),
            PayoffSpec::default(),
        )
        .unwrap();
        assert!(matches!(
            finite_difference(&edge, &Target::Q { group: 1, j: 0 }, 1e-6),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn proportional_rows_stay_stochastic() {
        let v = ProportionalVariation::new(1, vec![0.25, 9.0, 0.75]).unwrap();
        for p in [0.0, 0.3, 1.0] {
            let row = v.row(p);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert_eq!(row[1], p);
        }
        assert!(ProportionalVariation::new(0, vec![0.0, 0.5]).is_err());
    }
}
