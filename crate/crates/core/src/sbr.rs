//! Subjective best responses of all types at once.
//!
//! Every type `t` with conformity weight `lambda_t` best-responds to the peer
//! statistic of its group,
//!
//! ```text
//! x_t = (1 - lambda_t) * belief_t + lambda_t * E_g(t)[x],
//! E_k[x] = sum_j p_kj * sum_{s in j} mass_s * x_s,
//! ```
//!
//! which is linear in the efforts. Types with `lambda = 0` play their belief
//! and are moved to the right-hand side; the remaining unknowns form a
//! Z-matrix system that is strictly diagonally dominant whenever
//! `lambda_t * sum_j p_kj (1 - mass-weighted share of fixed types) < 1`, and
//! is then solved directly.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{Scenario, TypeRole};

/// Below this margin the system is refused rather than solved.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Linear system over the types with positive conformity weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponseSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Type index of each unknown, in row order.
    pub free: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbrSolution {
    /// Effort of every type.
    pub x: Vec<f64>,
    /// `E_k[x]` per group.
    pub peer_expectation: Vec<f64>,
    /// Peer statistic with correctly specified types at their true return.
    pub sigma: Vec<f64>,
    pub dominance_margin: f64,
    /// `max_t |x_t - BR_t(x)|`.
    pub residual: f64,
}

fn check_lambdas(s: &Scenario, lambdas: &[f64]) -> Result<()> {
    if lambdas.len() != s.num_types() {
        return Err(Error::InvalidArgument(format!(
            "expected {} conformity weights, got {}",
            s.num_types(),
            lambdas.len()
        )));
    }
    if let Some((i, l)) = lambdas
        .iter()
        .enumerate()
        .find(|(_, l)| !(0.0..=1.0).contains(*l))
    {
        return Err(Error::InvalidArgument(format!(
            "lambda of type {i} is {l}, outside [0, 1]"
        )));
    }
    Ok(())
}

pub fn assemble_system(s: &Scenario, lambdas: &[f64]) -> Result<BestResponseSystem> {
    if !s.payoff.is_quadratic() {
        return Err(Error::RequiresQuadratic);
    }
    check_lambdas(s, lambdas)?;

    let free: Vec<usize> = (0..s.num_types()).filter(|&t| lambdas[t] > 0.0).collect();
    let mut slot = vec![usize::MAX; s.num_types()];
    for (row, &t) in free.iter().enumerate() {
        slot[t] = row;
    }

    // Contribution of the fixed types to each group's peer statistic.
    let k = s.num_groups();
    let mut fixed_mean = vec![0.0; k];
    for (t, ty) in s.types.iter().enumerate() {
        if slot[t] == usize::MAX {
            fixed_mean[ty.group] += ty.mass * ty.belief;
        }
    }

    let mut matrix = DenseMatrix::identity(free.len());
    let mut rhs = vec![0.0; free.len()];
    for (row, &t) in free.iter().enumerate() {
        let ty = &s.types[t];
        let lam = lambdas[t];
        for (col, &u) in free.iter().enumerate() {
            let other = &s.types[u];
            matrix[(row, col)] -= lam * s.peer.get(ty.group, other.group) * other.mass;
        }
        let fixed: f64 = (0..k).map(|j| s.peer.get(ty.group, j) * fixed_mean[j]).sum();
        rhs[row] = (1.0 - lam) * ty.belief + lam * fixed;
    }
    Ok(BestResponseSystem { matrix, rhs, free })
}

/// `E_k[x]` for every group.
pub fn peer_expectations(s: &Scenario, x: &[f64]) -> Vec<f64> {
    let k = s.num_groups();
    let mut group_mean = vec![0.0; k];
    for (t, ty) in s.types.iter().enumerate() {
        group_mean[ty.group] += ty.mass * x[t];
    }
    (0..k)
        .map(|g| (0..k).map(|j| s.peer.get(g, j) * group_mean[j]).sum())
        .collect()
}

/// `max_t |x_t - BR_t(x)|` for an arbitrary effort profile.
pub fn best_response_residual(s: &Scenario, lambdas: &[f64], x: &[f64]) -> f64 {
    let e = peer_expectations(s, x);
    s.types
        .iter()
        .enumerate()
        .map(|(t, ty)| {
            let br = (1.0 - lambdas[t]) * ty.belief + lambdas[t] * e[ty.group];
            (x[t] - br).abs()
        })
        .fold(0.0, f64::max)
}

pub fn solve_sbr(s: &Scenario, lambdas: &[f64]) -> Result<SbrSolution> {
    let sys = assemble_system(s, lambdas)?;
    let (margin, row) = sys.matrix.dominance_margin();
    if margin <= DOMINANCE_TOL {
        return Err(Error::DominanceViolation {
            row: sys.free[row],
            margin,
        });
    }
    let free_x = sys
        .matrix
        .solve(&sys.rhs)
        .ok_or_else(|| Error::DominanceViolation {
            row: sys.free[row],
            margin,
        })?;

    let mut x: Vec<f64> = s.types.iter().map(|t| t.belief).collect();
    for (row, &t) in sys.free.iter().enumerate() {
        x[t] = free_x[row];
    }
    let peer_expectation = peer_expectations(s, &x);
    let optimal: Vec<f64> = s
        .types
        .iter()
        .zip(&x)
        .map(|(ty, &xt)| match ty.role {
            TypeRole::Correct => s.groups[ty.group].alpha,
            _ => xt,
        })
        .collect();
    let sigma = peer_expectations(s, &optimal);
    let residual = best_response_residual(s, lambdas, &x);
    record(margin, residual);
    Ok(SbrSolution {
        x,
        peer_expectation,
        sigma,
        dominance_margin: margin,
        residual,
    })
}

static SOLVES: AtomicU64 = AtomicU64::new(0);
static MIN_MARGIN: AtomicU64 = AtomicU64::new(f64::INFINITY.to_bits());
static MAX_RESIDUAL: AtomicU64 = AtomicU64::new(0);

/// Running extremes over every successful [`solve_sbr`] call in the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveAudit {
    pub solves: u64,
    pub min_margin: f64,
    pub max_residual: f64,
}

fn record(margin: f64, residual: f64) {
    SOLVES.fetch_add(1, Ordering::Relaxed);
    let _ = MIN_MARGIN.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| {
        (margin < f64::from_bits(b)).then(|| margin.to_bits())
    });
    let _ = MAX_RESIDUAL.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |b| {
        (residual > f64::from_bits(b)).then(|| residual.to_bits())
    });
}

pub fn solve_audit() -> SolveAudit {
    SolveAudit {
        solves: SOLVES.load(Ordering::Relaxed),
        min_margin: f64::from_bits(MIN_MARGIN.load(Ordering::Relaxed)),
        max_residual: f64::from_bits(MAX_RESIDUAL.load(Ordering::Relaxed)),
    }
}

pub fn reset_solve_audit() {
    SOLVES.store(0, Ordering::Relaxed);
    MIN_MARGIN.store(f64::INFINITY.to_bits(), Ordering::Relaxed);
    MAX_RESIDUAL.store(0, Ordering::Relaxed);
}

/// Efforts of one group's misspecified type along a grid of its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub group: usize,
    pub lambdas: Vec<f64>,
    pub efforts: Vec<f64>,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.nondecreasing || self.nonincreasing
    }

    pub fn is_constant(&self) -> bool {
        self.nondecreasing && self.nonincreasing
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.efforts.windows(2).all(|w| w[1] > w[0])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.efforts.windows(2).all(|w| w[1] < w[0])
    }
}

/// Sweeps the weight of group `k`'s misspecified type over `grid`, holding
/// every other type at its stored weight.
pub fn check_monotonicity(s: &Scenario, k: usize, grid: &[f64]) -> Result<MonotonicityReport> {
    let t = s
        .misspecified_type(k)
        .ok_or_else(|| Error::InvalidArgument(format!("group {k} has no misspecified type")))?;
    let mut lambdas = s.lambdas();
    let mut efforts = Vec::with_capacity(grid.len());
    for &l in grid {
        lambdas[t] = l;
        efforts.push(solve_sbr(s, &lambdas)?.x[t]);
    }
    const TOL: f64 = 1e-12;
    let nondecreasing = efforts.windows(2).all(|w| w[1] >= w[0] - TOL);
    let nonincreasing = efforts.windows(2).all(|w| w[1] <= w[0] + TOL);
    Ok(MonotonicityReport {
        group: k,
        lambdas: grid.to_vec(),
        efforts,
        nondecreasing,
        nonincreasing,
    })
}
