//! Model primitives: groups, behavioral types, the peer matrix, payoffs and
//! scenario validation.
//!
//! All types are plain data and immutable once a [`Scenario`] has passed
//! [`validate_scenario`]; they are `Send + Sync` and can be shared freely
//! between sweep workers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums and type masses after normalization.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Sums within this distance of one are renormalized instead of rejected.
pub const NORMALIZE_TOL: f64 = 1e-9;
/// Two returns closer than this are treated as equal (no misspecification).
pub const BELIEF_TOL: f64 = 1e-12;

/// Primitives of one group: true return, shared misspecified belief and the
/// share of correctly specified agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupParams {
    pub alpha: f64,
    pub alpha_hat: f64,
    pub q: f64,
}

impl GroupParams {
    pub fn new(alpha: f64, alpha_hat: f64, q: f64) -> Self {
        GroupParams { alpha, alpha_hat, q }
    }

    pub fn is_misspecified(&self) -> bool {
        (self.alpha_hat - self.alpha).abs() > BELIEF_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeRole {
    /// Knows the true return of its group.
    Correct,
    /// Holds the group's misspecified belief.
    Misspecified,
    /// Entrant introduced by an invasion test.
    Mutant,
}

/// One behavioral type: a belief about the group's return, a conformity
/// weight and the share of the group's population it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeSpec {
    pub group: usize,
    pub belief: f64,
    pub lambda: f64,
    pub mass: f64,
    pub role: TypeRole,
}

/// Row-stochastic interaction intensities; row `k` is what group `k` sees.
/// Symmetry is not required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeerMatrix {
    rows: Vec<Vec<f64>>,
}

impl PeerMatrix {
    /// Wraps rows without checking them; see [`validate_scenario`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        PeerMatrix { rows }
    }

    /// `[[p, 1-p], [1-p, p]]`.
    pub fn two_group(p: f64) -> Self {
        PeerMatrix::from_rows(vec![vec![p, 1.0 - p], vec![1.0 - p, p]])
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.rows[k][j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub(crate) fn set_row(&mut self, k: usize, row: Vec<f64>) {
        self.rows[k] = row;
    }
}

/// Payoff functions with a catalog of strictly concave, single-peaked
/// alternatives to the quadratic loss. Each is evaluated as `U(alpha - x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConcaveKind {
    /// `U(z) = 1 - cosh(z)`.
    CoshBowl,
    /// `U(z) = -z^4`. Concave but with `U''(0) = 0`, so only weakly
    /// curved at the peak; kept as a stress case.
    QuarticBowl,
}

impl ConcaveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConcaveKind::CoshBowl => "cosh_bowl",
            ConcaveKind::QuarticBowl => "quartic_bowl",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "cosh_bowl" => Some(ConcaveKind::CoshBowl),
            "quartic_bowl" => Some(ConcaveKind::QuarticBowl),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PayoffSpec {
    /// `C - (alpha - x)^2`.
    Quadratic { c: f64 },
    Concave(ConcaveKind),
}

impl Default for PayoffSpec {
    fn default() -> Self {
        PayoffSpec::Quadratic { c: 0.0 }
    }
}

impl PayoffSpec {
    /// `U(z)` where `z = alpha - x`.
    pub fn value(&self, z: f64) -> f64 {
        match *self {
            PayoffSpec::Quadratic { c } => c - z * z,
            PayoffSpec::Concave(ConcaveKind::CoshBowl) => 1.0 - z.cosh(),
            PayoffSpec::Concave(ConcaveKind::QuarticBowl) => -(z * z) * (z * z),
        }
    }

    /// `U'(z)`.
    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            PayoffSpec::Quadratic { .. } => -2.0 * z,
            PayoffSpec::Concave(ConcaveKind::CoshBowl) => -z.sinh(),
            PayoffSpec::Concave(ConcaveKind::QuarticBowl) => -4.0 * z * z * z,
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, PayoffSpec::Quadratic { .. })
    }

    /// Checks the single-peak sign pattern of `U'` on a probe grid.
    pub fn validate(&self) -> Result<()> {
        if let PayoffSpec::Quadratic { c } = *self {
            if !c.is_finite() {
                return Err(Error::validation("payoff", "C must be finite"));
            }
        }
        if self.derivative(0.0) != 0.0 {
            return Err(Error::validation("payoff", "U'(0) must vanish"));
        }
        for i in 1..=200 {
            let z = i as f64 * 0.05;
            if self.derivative(-z) <= 0.0 || self.derivative(z) >= 0.0 {
                return Err(Error::validation(
                    "payoff",
                    format!("U' has the wrong sign at |z| = {z}"),
                ));
            }
        }
        Ok(())
    }
}

/// Material payoff of effort `x` for a group with true return `alpha`.
pub fn material_payoff(x: f64, alpha: f64, payoff: &PayoffSpec) -> f64 {
    payoff.value(alpha - x)
}

/// Full primitive bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub groups: Vec<GroupParams>,
    pub types: Vec<TypeSpec>,
    pub peer: PeerMatrix,
    pub payoff: PayoffSpec,
}

impl Scenario {
    /// Two types per group: a correctly specified one (mass `q`) and a
    /// misspecified one (mass `1 - q`), both with zero conformity weight.
    /// The result is validated.
    pub fn canonical(
        name: impl Into<String>,
        groups: Vec<GroupParams>,
        peer: PeerMatrix,
        payoff: PayoffSpec,
    ) -> Result<Self> {
        let types = groups
            .iter()
            .enumerate()
            .flat_map(|(k, g)| {
                [
                    TypeSpec {
                        group: k,
                        belief: g.alpha,
                        lambda: 0.0,
                        mass: g.q,
                        role: TypeRole::Correct,
                    },
                    TypeSpec {
                        group: k,
                        belief: g.alpha_hat,
                        lambda: 0.0,
                        mass: 1.0 - g.q,
                        role: TypeRole::Misspecified,
                    },
                ]
            })
            .collect();
        validate_scenario(Scenario {
            name: name.into(),
            groups,
            types,
            peer,
            payoff,
        })
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    /// Index of the misspecified type of group `k`, if there is one.
    pub fn misspecified_type(&self, k: usize) -> Option<usize> {
        self.types
            .iter()
            .position(|t| t.group == k && t.role == TypeRole::Misspecified)
    }

    pub fn correct_type(&self, k: usize) -> Option<usize> {
        self.types
            .iter()
            .position(|t| t.group == k && t.role == TypeRole::Correct)
    }

    /// True when group `k` holds a belief different from its true return.
    pub fn is_misspecified_group(&self, k: usize) -> bool {
        self.groups[k].is_misspecified() && self.misspecified_type(k).is_some()
    }

    /// Conformity weights currently stored on the types.
    pub fn lambdas(&self) -> Vec<f64> {
        self.types.iter().map(|t| t.lambda).collect()
    }

    /// Per-type weights where each group's misspecified type takes the
    /// given value and every other type keeps its stored weight.
    pub fn profile_from_group_lambdas(&self, per_group: &[f64]) -> Vec<f64> {
        self.types
            .iter()
            .map(|t| match t.role {
                TypeRole::Misspecified => per_group[t.group],
                _ => t.lambda,
            })
            .collect()
    }

    /// Copy of the scenario with misspecified types set to `per_group`.
    pub fn with_group_lambdas(&self, per_group: &[f64]) -> Scenario {
        let mut out = self.clone();
        for t in out.types.iter_mut() {
            if t.role == TypeRole::Misspecified {
                t.lambda = per_group[t.group];
            }
        }
        out
    }

    /// The peer statistic group `k` faces when everybody plays their true
    /// return: `sum_j p_kj alpha_j`.
    pub fn optimal_peer_mean(&self, k: usize) -> f64 {
        (0..self.num_groups())
            .map(|j| self.peer.get(k, j) * self.groups[j].alpha)
            .sum()
    }

    /// Keeps the type list in sync after editing a group's primitives.
    /// Only meaningful for canonical scenarios.
    pub(crate) fn resync_canonical_types(&mut self) {
        for t in self.types.iter_mut() {
            let g = self.groups[t.group];
            match t.role {
                TypeRole::Correct => {
                    t.belief = g.alpha;
                    t.mass = g.q;
                }
                TypeRole::Misspecified => {
                    t.belief = g.alpha_hat;
                    t.mass = 1.0 - g.q;
                }
                TypeRole::Mutant => {}
            }
        }
    }

    /// True when the types are exactly the two-per-group layout produced by
    /// [`Scenario::canonical`].
    pub fn is_canonical(&self) -> bool {
        let k = self.num_groups();
        self.types.len() == 2 * k
            && (0..k).all(|g| {
                let c = self.types[2 * g];
                let m = self.types[2 * g + 1];
                c.group == g
                    && m.group == g
                    && c.role == TypeRole::Correct
                    && m.role == TypeRole::Misspecified
                    && c.belief == self.groups[g].alpha
                    && m.belief == self.groups[g].alpha_hat
            })
    }
}

fn check_finite(location: &str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(location, format!("{name} must be finite, got {v}")))
    }
}

fn check_unit(location: &str, name: &str, v: f64) -> Result<()> {
    check_finite(location, name, v)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::validation(
            location,
            format!("{name} = {v} is outside [0, 1]"),
        ));
    }
    Ok(())
}

/// Checks every invariant of the model types and returns the scenario with
/// near-stochastic rows and near-unit type masses renormalized.
pub fn validate_scenario(raw: Scenario) -> Result<Scenario> {
    let mut s = raw;
    let k = s.groups.len();
    if k == 0 {
        return Err(Error::validation("groups", "at least one group is required"));
    }
    s.payoff.validate()?;

    for (i, g) in s.groups.iter().enumerate() {
        let loc = format!("group {i}");
        check_finite(&loc, "alpha", g.alpha)?;
        check_finite(&loc, "alpha_hat", g.alpha_hat)?;
        if g.alpha < 0.0 {
            return Err(Error::validation(loc, format!("alpha = {} is negative", g.alpha)));
        }
        if g.alpha_hat < 0.0 {
            return Err(Error::validation(
                loc,
                format!("alpha_hat = {} is negative", g.alpha_hat),
            ));
        }
        check_unit(&loc, "q", g.q)?;
    }

    if s.peer.dim() != k {
        return Err(Error::validation(
            "peer",
            format!("matrix has {} rows but there are {k} groups", s.peer.dim()),
        ));
    }
    for r in 0..k {
        let loc = format!("peer row {r}");
        let row = s.peer.row(r);
        if row.len() != k {
            return Err(Error::validation(
                loc,
                format!("row {r} has {} entries, expected {k}", row.len()),
            ));
        }
        for (j, &v) in row.iter().enumerate() {
            check_finite(&loc, &format!("p[{r}][{j}]"), v)?;
            if v < 0.0 {
                return Err(Error::validation(loc, format!("p[{r}][{j}] = {v} is negative")));
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::validation(loc, format!("row {r} sums to {sum}")));
        }
        if (sum - 1.0).abs() > 0.0 {
            let normalized = row.iter().map(|v| v / sum).collect();
            s.peer.set_row(r, normalized);
        }
    }

    let mut mass = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (i, t) in s.types.iter().enumerate() {
        let loc = format!("type {i}");
        if t.group >= k {
            return Err(Error::validation(
                loc,
                format!("group index {} out of range 0..{k}", t.group),
            ));
        }
        check_finite(&loc, "belief", t.belief)?;
        if t.belief < 0.0 {
            return Err(Error::validation(loc, format!("belief = {} is negative", t.belief)));
        }
        check_unit(&loc, "lambda", t.lambda)?;
        check_unit(&loc, "mass", t.mass)?;
        mass[t.group] += t.mass;
        count[t.group] += 1;
    }
    for g in 0..k {
        if count[g] == 0 {
            return Err(Error::validation(format!("group {g}"), "group has no types"));
        }
        if (mass[g] - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::validation(
                format!("group {g}"),
                format!("type masses sum to {}", mass[g]),
            ));
        }
    }
    for t in s.types.iter_mut() {
        let total = mass[t.group];
        if total != 1.0 {
            t.mass /= total;
        }
    }
    Ok(s)
}
