//! Two-group specialization with symmetric assortativity `p`:
//! peer matrix `[[p, 1 - p], [1 - p, p]]`.
//!
//! Closed forms for efforts and efficient weights, the ordering taxonomy of
//! corner regimes, corner efforts, and the assortativity sweep.

use std::fmt;

use crate::efficiency::{interiority_check, solve_pressure_profile, Regime};
use crate::error::{Error, Result};
use crate::model::{GroupParams, PayoffSpec, PeerMatrix, Scenario};

/// Threshold and ordering ties closer than this are refused.
pub const BOUNDARY_TOL: f64 = 1e-12;
const DENOM_TOL: f64 = 1e-12;
/// Tolerance for the distance checks along a p grid.
pub const DISTANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGroupParams {
    pub alpha: [f64; 2],
    pub alpha_hat: [f64; 2],
    pub q: [f64; 2],
    pub p: f64,
}

impl TwoGroupParams {
    pub fn new(alpha: [f64; 2], alpha_hat: [f64; 2], q: [f64; 2], p: f64) -> Self {
        TwoGroupParams {
            alpha,
            alpha_hat,
            q,
            p,
        }
    }

    /// Returns `(10, 12)`, beliefs `(5, 15)`, equal shares.
    pub fn figure_one(p: f64) -> Self {
        TwoGroupParams::new([10.0, 12.0], [5.0, 15.0], [0.5, 0.5], p)
    }

    pub fn with_p(&self, p: f64) -> Self {
        TwoGroupParams { p, ..*self }
    }

    /// Index-swapped copy: group 0 becomes group 1.
    pub fn swapped(&self) -> Self {
        TwoGroupParams {
            alpha: [self.alpha[1], self.alpha[0]],
            alpha_hat: [self.alpha_hat[1], self.alpha_hat[0]],
            q: [self.q[1], self.q[0]],
            p: self.p,
        }
    }

    pub fn scenario(&self, name: &str) -> Result<Scenario> {
        Scenario::canonical(
            name,
            (0..2)
                .map(|j| GroupParams::new(self.alpha[j], self.alpha_hat[j], self.q[j]))
                .collect(),
            PeerMatrix::two_group(self.p),
            PayoffSpec::default(),
        )
    }

    /// Recovers the parameters of a canonical two-group scenario with a
    /// symmetric peer matrix.
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        if s.num_groups() != 2 || !s.is_canonical() {
            return Err(Error::InvalidArgument(
                "expected a two-group scenario with one correct and one misspecified type per group"
                    .into(),
            ));
        }
        let p = s.peer.get(0, 0);
        if (s.peer.get(1, 1) - p).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "peer matrix is not symmetric: p_11 = {p}, p_22 = {}",
                s.peer.get(1, 1)
            )));
        }
        let g = &s.groups;
        Ok(TwoGroupParams::new(
            [g[0].alpha, g[1].alpha],
            [g[0].alpha_hat, g[1].alpha_hat],
            [g[0].q, g[1].q],
            p,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    Zero,
    One,
    Interior,
}

impl From<Regime> for RegimeTag {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Interior => RegimeTag::Interior,
            Regime::CornerZero => RegimeTag::Zero,
            Regime::CornerOne => RegimeTag::One,
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeTag::Zero => "Zero",
            RegimeTag::One => "One",
            RegimeTag::Interior => "Interior",
        })
    }
}

/// Ordering of a group's return `a`, its belief `h`, and the other group's
/// return `m`, with the threshold `T = (m - h) / (m - a)` where it matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CornerCase {
    /// `h = a`.
    AccurateBelief,
    /// `h < a < m`.
    InteriorBelow,
    /// `m < a < h`.
    InteriorAbove,
    /// `a < h <= m` and `p > T`.
    BetweenAboveOne,
    /// `a < h <= m` and `p < T`.
    BetweenAboveZero,
    /// `a < m < h`.
    BeyondAbove,
    /// `h <= m < a`.
    BeyondBelow,
    /// `m < h < a` and `p > T`.
    BetweenBelowOne,
    /// `m < h < a` and `p < T`.
    BetweenBelowZero,
}

impl CornerCase {
    pub const ALL: [CornerCase; 9] = [
        CornerCase::AccurateBelief,
        CornerCase::InteriorBelow,
        CornerCase::InteriorAbove,
        CornerCase::BetweenAboveOne,
        CornerCase::BetweenAboveZero,
        CornerCase::BeyondAbove,
        CornerCase::BeyondBelow,
        CornerCase::BetweenBelowOne,
        CornerCase::BetweenBelowZero,
    ];

    pub fn tag(&self) -> RegimeTag {
        use CornerCase::*;
        match self {
            InteriorBelow | InteriorAbove => RegimeTag::Interior,
            AccurateBelief | BetweenAboveZero | BetweenBelowZero => RegimeTag::Zero,
            BetweenAboveOne | BeyondAbove | BeyondBelow | BetweenBelowOne => RegimeTag::One,
        }
    }

    pub fn condition(&self) -> &'static str {
        use CornerCase::*;
        match self {
            AccurateBelief => "alpha_hat = alpha",
            InteriorBelow => "alpha_hat < alpha < alpha_other",
            InteriorAbove => "alpha_other < alpha < alpha_hat",
            BetweenAboveOne => "alpha < alpha_hat <= alpha_other, p > threshold",
            BetweenAboveZero => "alpha < alpha_hat <= alpha_other, p < threshold",
            BeyondAbove => "alpha < alpha_other < alpha_hat",
            BeyondBelow => "alpha_hat <= alpha_other < alpha",
            BetweenBelowOne => "alpha_other < alpha_hat < alpha, p > threshold",
            BetweenBelowZero => "alpha_other < alpha_hat < alpha, p < threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerRegime {
    pub tags: [RegimeTag; 2],
    pub cases: [CornerCase; 2],
}

impl CornerRegime {
    pub fn from_tags(tags: [RegimeTag; 2]) -> Self {
        let case = |t: RegimeTag| match t {
            RegimeTag::Zero => CornerCase::BetweenAboveZero,
            RegimeTag::One => CornerCase::BeyondAbove,
            RegimeTag::Interior => CornerCase::InteriorBelow,
        };
        CornerRegime {
            tags,
            cases: [case(tags[0]), case(tags[1])],
        }
    }

    pub fn triggering_condition(&self) -> String {
        format!(
            "group 1: {}; group 2: {}",
            self.cases[0].condition(),
            self.cases[1].condition()
        )
    }

    /// Both returns lie outside both beliefs; both groups must be at corners.
    pub fn outer_returns(t: &TwoGroupParams) -> bool {
        let (amin, amax) = (t.alpha[0].min(t.alpha[1]), t.alpha[0].max(t.alpha[1]));
        let (hmin, hmax) = (
            t.alpha_hat[0].min(t.alpha_hat[1]),
            t.alpha_hat[0].max(t.alpha_hat[1]),
        );
        amin < hmin && hmin < hmax && hmax < amax
    }
}

/// Effort of group 0's misspecified type at weights `l`.
fn first_effort(t: &TwoGroupParams, l: [f64; 2]) -> Result<f64> {
    let [a1, a2] = t.alpha;
    let [h1, h2] = t.alpha_hat;
    let [q1, q2] = t.q;
    let p = t.p;
    let [l1, l2] = l;
    let num = l1
        * (-h2 * (l2 - 1.0) * (p - 1.0) * (q2 - 1.0) + a1 * p * q1
            + a1 * l2 * (2.0 * p - 1.0) * q1 * (q2 - 1.0)
            - a2 * p * q2
            + a2 * q2)
        - h1 * (l1 - 1.0) * (l2 * p * (q2 - 1.0) + 1.0);
    let den = l1 * p * (q1 - 1.0) + l2 * (q2 - 1.0) * (l1 * (2.0 * p - 1.0) * (q1 - 1.0) + p) + 1.0;
    if den.abs() <= DENOM_TOL {
        return Err(Error::SingularDenominator { group: 0 });
    }
    Ok(num / den)
}

/// Misspecified-type efforts of both groups from the rational closed form.
/// The second is the first with group indices exchanged.
pub fn closed_form_sbr(t: &TwoGroupParams, lambdas: [f64; 2]) -> Result<[f64; 2]> {
    let x1 = first_effort(t, lambdas)?;
    let x2 = first_effort(&t.swapped(), [lambdas[1], lambdas[0]])
        .map_err(|_| Error::SingularDenominator { group: 1 })?;
    Ok([x1, x2])
}

/// Unclamped efficient weights with every group at its true return.
pub fn closed_form_lambda_star(t: &TwoGroupParams) -> Result<[f64; 2]> {
    let one = |j: usize| -> Result<f64> {
        let o = 1 - j;
        let den = t.alpha_hat[j] - (t.alpha[j] * t.p + t.alpha[o] * (1.0 - t.p));
        if den.abs() <= DENOM_TOL {
            return Err(Error::SingularDenominator { group: j });
        }
        Ok((t.alpha_hat[j] - t.alpha[j]) / den)
    };
    Ok([one(0)?, one(1)?])
}

/// Ordering case of group `j` alone.
pub fn classify_case(t: &TwoGroupParams, j: usize) -> Result<CornerCase> {
    let a = t.alpha[j];
    let h = t.alpha_hat[j];
    let m = t.alpha[1 - j];
    let p = t.p;
    let ambiguous = |detail: String| Error::AmbiguousBoundary { group: j, detail };
    if (h - a).abs() <= BOUNDARY_TOL {
        return Ok(CornerCase::AccurateBelief);
    }
    if (a - m).abs() <= BOUNDARY_TOL {
        return Err(ambiguous(format!("alpha = alpha_other = {a}")));
    }
    let by_threshold = |one: CornerCase, zero: CornerCase| {
        let threshold = (m - h) / (m - a);
        if (p - threshold).abs() <= BOUNDARY_TOL {
            Err(ambiguous(format!("p = {p} sits on threshold {threshold}")))
        } else if p > threshold {
            Ok(one)
        } else {
            Ok(zero)
        }
    };
    if a < m {
        if h < a {
            Ok(CornerCase::InteriorBelow)
        } else if h <= m {
            by_threshold(CornerCase::BetweenAboveOne, CornerCase::BetweenAboveZero)
        } else {
            Ok(CornerCase::BeyondAbove)
        }
    } else if h > a {
        Ok(CornerCase::InteriorAbove)
    } else if h <= m {
        Ok(CornerCase::BeyondBelow)
    } else {
        by_threshold(CornerCase::BetweenBelowOne, CornerCase::BetweenBelowZero)
    }
}

/// Regime of each group as read off the ordering conditions.
pub fn classify_corner(t: &TwoGroupParams) -> Result<CornerRegime> {
    let cases = [classify_case(t, 0)?, classify_case(t, 1)?];
    Ok(CornerRegime {
        tags: [cases[0].tag(), cases[1].tag()],
        cases,
    })
}

/// Misspecified-type efforts when both groups sit at corners.
pub fn corner_effort(t: &TwoGroupParams, regime: &CornerRegime) -> Result<[f64; 2]> {
    use RegimeTag::*;
    match regime.tags {
        [Zero, Zero] => Ok(t.alpha_hat),
        [Zero, One] => Ok([t.alpha_hat[0], zero_one(t, 0)?]),
        [One, Zero] => Ok([zero_one(t, 1)?, t.alpha_hat[1]]),
        [One, One] => Ok([one_one(t, 0)?, one_one(t, 1)?]),
        tags => Err(Error::RegimeMismatch(format!(
            "corner efforts need both groups at a corner, got ({}, {})",
            tags[0], tags[1]
        ))),
    }
}

/// Effort of the full-conformity group when group `j` plays its belief.
fn zero_one(t: &TwoGroupParams, j: usize) -> Result<f64> {
    let o = 1 - j;
    let p = t.p;
    let den = 1.0 - p * (1.0 - t.q[o]);
    if den.abs() <= DENOM_TOL {
        return Err(Error::SingularDenominator { group: o });
    }
    Ok(((1.0 - p) * (t.alpha[j] * t.q[j] + t.alpha_hat[j] * (1.0 - t.q[j]))
        + t.alpha[o] * p * t.q[o])
        / den)
}

/// Effort of group `j` when both groups fully conform.
fn one_one(t: &TwoGroupParams, j: usize) -> Result<f64> {
    let o = 1 - j;
    let (aj, ao, qj, qo, p) = (t.alpha[j], t.alpha[o], t.q[j], t.q[o], t.p);
    let num = aj * qj * (p * (2.0 * qo - 1.0) - qo + 1.0) - ao * (p - 1.0) * qo;
    let den = p * qj * (2.0 * qo - 1.0) - p * qo - qj * qo + qj + qo;
    if den.abs() <= DENOM_TOL {
        return Err(Error::SingularDenominator { group: j });
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    pub tags: [RegimeTag; 2],
    pub p_grid: Vec<f64>,
    /// `|x - alpha|` of each group's misspecified type along the grid.
    pub distance: [Vec<f64>; 2],
    pub constant: [bool; 2],
    pub nonincreasing: [bool; 2],
}

impl DistanceReport {
    /// Non-conforming groups keep a constant distance and fully conforming
    /// groups move weakly closer to their return as `p` rises.
    pub fn holds(&self) -> bool {
        (0..2).all(|j| match self.tags[j] {
            RegimeTag::Zero | RegimeTag::Interior => self.constant[j],
            RegimeTag::One => self.nonincreasing[j],
        })
    }
}

/// Distance of each group's effort from its return along `p_grid`, with the
/// solved regime required to equal `expected` at every grid point.
pub fn distance_monotonicity(
    t: &TwoGroupParams,
    expected: &CornerRegime,
    p_grid: &[f64],
) -> Result<DistanceReport> {
    let mut distance = [Vec::new(), Vec::new()];
    for &p in p_grid {
        let tp = t.with_p(p);
        let s = tp.scenario("distance")?;
        let prof = solve_pressure_profile(&s)?;
        let tags = [RegimeTag::from(prof.regime[0]), RegimeTag::from(prof.regime[1])];
        if tags != expected.tags {
            return Err(Error::RegimeMismatch(format!(
                "at p = {p} the regime is ({}, {}), expected ({}, {})",
                tags[0], tags[1], expected.tags[0], expected.tags[1]
            )));
        }
        for (j, d) in distance.iter_mut().enumerate() {
            let x = prof.misspecified_effort(&s, j).unwrap_or(tp.alpha[j]);
            d.push((x - tp.alpha[j]).abs());
        }
    }
    let constant = [0, 1].map(|j| {
        let d = &distance[j];
        d.iter()
            .all(|v| (v - d[0]).abs() <= DISTANCE_TOL * (1.0 + d[0].abs()))
    });
    let nonincreasing = [0, 1].map(|j| {
        distance[j]
            .windows(2)
            .all(|w| w[1] <= w[0] + DISTANCE_TOL * (1.0 + w[0].abs()))
    });
    Ok(DistanceReport {
        tags: expected.tags,
        p_grid: p_grid.to_vec(),
        distance,
        constant,
        nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub lambda_star: [f64; 2],
    pub regime: [Regime; 2],
}

/// Efficient weights along an assortativity grid. Uses the closed form
/// where both groups are interior and the general solver elsewhere.
pub fn figure_sweep(t: &TwoGroupParams, p_grid: &[f64]) -> Result<Vec<SweepRow>> {
    p_grid
        .iter()
        .map(|&p| {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("p = {p} is outside [0, 1)")));
            }
            let tp = t.with_p(p);
            let s = tp.scenario("sweep")?;
            let interior = (0..2).all(|j| interiority_check(&s, j) == Regime::Interior);
            if interior {
                Ok(SweepRow {
                    p,
                    lambda_star: closed_form_lambda_star(&tp)?,
                    regime: [Regime::Interior; 2],
                })
            } else {
                let prof = solve_pressure_profile(&s)?;
                Ok(SweepRow {
                    p,
                    lambda_star: [prof.lambda_star[0], prof.lambda_star[1]],
                    regime: [prof.regime[0], prof.regime[1]],
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbr::solve_sbr;

    fn solver_efforts(t: &TwoGroupParams, l: [f64; 2]) -> [f64; 2] {
        let s = t.scenario("x").unwrap();
        let sol = solve_sbr(&s, &s.profile_from_group_lambdas(&l)).unwrap();
        [sol.x[1], sol.x[3]]
    }

    #[test]
    fn zero_weights_play_beliefs() {
        let t = TwoGroupParams::new([3.0, 7.0], [4.5, 2.0], [0.3, 0.8], 0.35);
        assert_eq!(closed_form_sbr(&t, [0.0, 0.0]).unwrap(), [4.5, 2.0]);
    }

    #[test]
    fn figure_one_optimum_reaches_returns() {
        let t = TwoGroupParams::figure_one(0.5);
        let x = closed_form_sbr(&t, [5.0 / 6.0, 0.75]).unwrap();
        assert!((x[0] - 10.0).abs() < 1e-12);
        assert!((x[1] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_solver() {
        let cases = [
            (TwoGroupParams::new([2.0, 9.0], [5.0, 1.0], [0.2, 0.7], 0.4), [0.3, 0.9]),
            (TwoGroupParams::new([6.0, 4.0], [8.0, 3.0], [0.9, 0.1], 0.85), [1.0, 0.6]),
            (TwoGroupParams::new([1.5, 1.0], [0.5, 6.0], [0.5, 0.5], 0.05), [0.7, 0.2]),
        ];
        for (t, l) in cases {
            let a = closed_form_sbr(&t, l).unwrap();
            let b = solver_efforts(&t, l);
            assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10, "{a:?} {b:?}");
        }
    }

    #[test]
    fn lambda_star_closed_forms() {
        let z = closed_form_lambda_star(&TwoGroupParams::figure_one(0.0)).unwrap();
        assert!((z[0] - 5.0 / 7.0).abs() < 1e-15 && (z[1] - 0.6).abs() < 1e-15);
        let near = closed_form_lambda_star(&TwoGroupParams::figure_one(1.0 - 1e-9)).unwrap();
        assert!((near[0] - 1.0).abs() < 1e-8 && (near[1] - 1.0).abs() < 1e-8);
        let acc = TwoGroupParams::new([10.0, 12.0], [10.0, 15.0], [0.5, 0.5], 0.3);
        assert_eq!(closed_form_lambda_star(&acc).unwrap()[0], 0.0);
    }

    #[test]
    fn threshold_cases() {
        let t = TwoGroupParams::new([1.0, 3.0], [2.0, 3.0], [0.5, 0.5], 0.75);
        let r = classify_corner(&t).unwrap();
        assert_eq!(r.tags[0], RegimeTag::One);
        assert_eq!(r.cases[0], CornerCase::BetweenAboveOne);
        let r = classify_corner(&t.with_p(0.25)).unwrap();
        assert_eq!(r.tags[0], RegimeTag::Zero);
        assert!(matches!(
            classify_corner(&t.with_p(0.5)),
            Err(Error::AmbiguousBoundary { group: 0, .. })
        ));
    }

    #[test]
    fn outer_returns_give_two_corners() {
        let t = TwoGroupParams::new([1.0, 9.0], [4.0, 6.0], [0.4, 0.6], 0.7);
        assert!(CornerRegime::outer_returns(&t));
        let r = classify_corner(&t).unwrap();
        assert!(r.tags.iter().all(|t| *t != RegimeTag::Interior));
    }

    #[test]
    fn printed_threshold_ignores_own_group_feedback() {
        // With q = 0.5 the full-conformity effort of group 0 is 15/7, which
        // overshoots the belief 2 and is worse than playing the belief. The
        // ordering rule still reports One here; the solver finds Zero.
        let t = TwoGroupParams::new([1.0, 3.0], [2.0, 3.0], [0.5, 0.5], 0.6);
        assert_eq!(classify_corner(&t).unwrap().tags[0], RegimeTag::One);
        let x = solver_efforts(&t, [1.0, 0.0]);
        assert!((x[0] - 15.0 / 7.0).abs() < 1e-12);
        let prof = solve_pressure_profile(&t.scenario("cx").unwrap()).unwrap();
        assert_eq!(prof.regime[0], Regime::CornerZero);
    }

    #[test]
    fn corner_effort_values() {
        let t = TwoGroupParams::new([1.0, 3.0], [2.0, 0.5], [0.5, 0.5], 0.6);
        let r = CornerRegime::from_tags([RegimeTag::Zero, RegimeTag::One]);
        let x = corner_effort(&t, &r).unwrap();
        assert_eq!(x[0], 2.0);
        assert!((x[1] - 1.5 / 0.7).abs() < 1e-12);
        assert!((x[1] - solver_efforts(&t, [0.0, 1.0])[1]).abs() < 1e-10);

        let zz = corner_effort(&t, &CornerRegime::from_tags([RegimeTag::Zero; 2])).unwrap();
        assert_eq!(zz, [2.0, 0.5]);

        let u = TwoGroupParams::new([4.0, 7.5], [1.0, 2.0], [0.35, 0.8], 0.45);
        let oo = corner_effort(&u, &CornerRegime::from_tags([RegimeTag::One; 2])).unwrap();
        let b = solver_efforts(&u, [1.0, 1.0]);
        assert!((oo[0] - b[0]).abs() < 1e-10 && (oo[1] - b[1]).abs() < 1e-10);

        let mixed = CornerRegime::from_tags([RegimeTag::Interior, RegimeTag::One]);
        assert!(matches!(corner_effort(&u, &mixed), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn figure_sweep_matches_closed_form() {
        let grid: Vec<f64> = (0..100).map(|i| 0.99 * i as f64 / 99.0).collect();
        let rows = figure_sweep(&TwoGroupParams::figure_one(0.0), &grid).unwrap();
        for r in &rows {
            assert!((r.lambda_star[0] - 5.0 / (7.0 - 2.0 * r.p)).abs() < 1e-12);
            assert!((r.lambda_star[1] - 3.0 / (5.0 - 2.0 * r.p)).abs() < 1e-12);
            assert_eq!(r.regime, [Regime::Interior; 2]);
        }
        assert!(figure_sweep(&TwoGroupParams::figure_one(0.0), &[1.0]).is_err());
    }

    #[test]
    fn zero_one_family_distances() {
        let t = TwoGroupParams::new([1.0, 3.0], [2.0, 0.5], [0.5, 0.5], 0.0);
        let r = CornerRegime::from_tags([RegimeTag::Zero, RegimeTag::One]);
        let rep = distance_monotonicity(&t, &r, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(rep.constant[0]);
        assert!(rep.distance[1].windows(2).all(|w| w[1] < w[0]));
        assert!(rep.holds());
    }

    #[test]
    fn one_one_family_distances() {
        // Each belief lies beyond the other group's return.
        let t = TwoGroupParams::new([2.0, 8.0], [9.0, 1.0], [0.5, 0.5], 0.0);
        let grid: Vec<f64> = (0..20).map(|i| 0.05 + 0.9 * i as f64 / 19.0).collect();
        let r = CornerRegime::from_tags([RegimeTag::One; 2]);
        let rep = distance_monotonicity(&t, &r, &grid).unwrap();
        assert!(rep.nonincreasing[0] && rep.nonincreasing[1]);
        assert!(rep.holds());
    }

    #[test]
    fn distances_for_accurate_beliefs_are_zero() {
        let t = TwoGroupParams::new([2.0, 5.0], [2.0, 5.0], [0.5, 0.5], 0.0);
        let r = CornerRegime::from_tags([RegimeTag::Zero; 2]);
        let grid = [0.1, 0.2, 0.3, 0.4];
        let rep = distance_monotonicity(&t, &r, &grid).unwrap();
        assert!(rep.distance.iter().flatten().all(|d| *d == 0.0));
        assert!(rep.holds());
    }

    #[test]
    fn distance_regime_is_checked() {
        let t = TwoGroupParams::figure_one(0.0);
        let r = CornerRegime::from_tags([RegimeTag::Zero; 2]);
        assert!(matches!(
            distance_monotonicity(&t, &r, &[0.2]),
            Err(Error::RegimeMismatch(_))
        ));
    }
}
