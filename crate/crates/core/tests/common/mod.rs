#![allow(dead_code)]

use peerpress::efficiency::{interiority_check, Regime};
use peerpress::model::{GroupParams, PayoffSpec, PeerMatrix, Scenario};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_peer(rng: &mut ChaCha8Rng, k: usize) -> PeerMatrix {
    let rows = (0..k)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|v| v / sum).collect()
        })
        .collect();
    PeerMatrix::from_rows(rows)
}

/// Independent returns and beliefs; any regime mix.
pub fn random_scenario(rng: &mut ChaCha8Rng, k: usize) -> Scenario {
    let groups = (0..k)
        .map(|_| {
            GroupParams::new(
                rng.gen_range(0.5..10.0),
                rng.gen_range(0.5..10.0),
                rng.gen_range(0.05..0.95),
            )
        })
        .collect();
    Scenario::canonical("random", groups, random_peer(rng, k), PayoffSpec::default()).unwrap()
}

/// Rejection-samples scenarios in which every misspecified group passes
/// the interiority chain. With `accurate_share > 0` some groups get
/// `alpha_hat = alpha`; at least one group stays misspecified.
pub fn random_interior(rng: &mut ChaCha8Rng, k: usize, accurate_share: f64) -> Scenario {
    loop {
        let accurate: Vec<bool> = (0..k).map(|_| rng.gen_bool(accurate_share)).collect();
        if accurate.iter().all(|a| *a) {
            continue;
        }
        let groups: Vec<GroupParams> = accurate
            .iter()
            .map(|&acc| {
                let alpha = rng.gen_range(1.0..10.0);
                let alpha_hat = if acc {
                    alpha
                } else {
                    let d: f64 = rng.gen_range(0.1..5.0);
                    if rng.gen_bool(0.5) { alpha + d } else { (alpha - d).max(0.05) }
                };
                GroupParams::new(alpha, alpha_hat, rng.gen_range(0.05..0.95))
            })
            .collect();
        let s = Scenario::canonical("interior", groups, random_peer(rng, k), PayoffSpec::default())
            .unwrap();
        // Keep peers' statistic away from each return so that accurate
        // groups face a real trade-off and derivatives stay well scaled.
        let ok = (0..k).all(|g| {
            (s.groups[g].alpha - s.optimal_peer_mean(g)).abs() > 0.05
                && (!s.is_misspecified_group(g) || interiority_check(&s, g) == Regime::Interior)
        });
        if ok {
            return s;
        }
    }
}
