//! Perceived value of observing peers.
//!
//! A misspecified agent who could not see peers would play its belief. The
//! utility it forgoes by doing so is `lambda^2 (E - belief)^2`.

use crate::efficiency::{solve_pressure_profile, EquilibriumClass, Regime, INTERIOR_EFFORT_TOL};
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::sbr::SbrSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringValue {
    /// Per group; zero for groups without a misspecified type.
    pub delta: Vec<f64>,
    /// Every misspecified type plays its group's true return.
    pub at_interior: bool,
}

pub fn monitoring_value(s: &Scenario, lambdas: &[f64], sol: &SbrSolution) -> MonitoringValue {
    let mut at_interior = true;
    let delta = (0..s.num_groups())
        .map(|k| match s.misspecified_type(k) {
            Some(t) => {
                if (sol.x[t] - s.groups[k].alpha).abs() > INTERIOR_EFFORT_TOL {
                    at_interior = false;
                }
                let gap = sol.peer_expectation[k] - s.types[t].belief;
                lambdas[t] * lambdas[t] * gap * gap
            }
            None => 0.0,
        })
        .collect();
    MonitoringValue { delta, at_interior }
}

/// `(alpha_hat - alpha)^2` per group, valid only when every misspecified
/// group sits at an interior efficient weight.
pub fn monitoring_value_interior(s: &Scenario) -> Result<MonitoringValue> {
    let prof = solve_pressure_profile(s)?;
    if prof.equilibrium_class != EquilibriumClass::NashAndSCE {
        let group = (0..s.num_groups())
            .find(|&k| s.is_misspecified_group(k) && prof.regime[k] != Regime::Interior)
            .unwrap_or(0);
        return Err(Error::NotInterior { group });
    }
    let delta = s
        .groups
        .iter()
        .map(|g| (g.alpha_hat - g.alpha).powi(2))
        .collect();
    Ok(MonitoringValue {
        delta,
        at_interior: true,
    })
}
