//! Reference schemes the optimizer is judged against: directivity-based
//! beamforming (beams steered exactly at the desired directions) and a
//! brute-force grid search over perturbation angles and sub-array pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::{feasible_window, steering_vector, Link};
use crate::channel::SiChannelTensor;
use crate::error::{Error, Result};
use crate::geometry::{Panel, SubArrayKind, SubArraySpec};
use crate::metric::a_si;

/// How DBF picks its sub-array pair: a fixed pair (default (1, 1)) or the
/// pair with the highest suppression under unperturbed beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    Fixed(usize, usize),
    BestPair,
}

impl std::fmt::Display for PairPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairPolicy::Fixed(i, j) => write!(f, "fixed({i},{j})"),
            PairPolicy::BestPair => write!(f, "best_pair"),
        }
    }
}

/// Directivity-based beamforming result: exact steering, zero degradation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbfSolution {
    pub theta_d_deg: f64,
    pub theta_u_deg: f64,
    pub tx_index: usize,
    pub rx_index: usize,
    #[serde(serialize_with = "crate::ser_capped_db")]
    pub a_si_db: f64,
    pub mean_power: f64,
    pub policy: PairPolicy,
}

/// Suppression achieved by steering both beams exactly at the desired
/// directions, with the sub-array pair chosen per `policy`.
pub fn dbf(
    channel: &SiChannelTensor,
    theta_d_deg: f64,
    theta_u_deg: f64,
    kind: SubArrayKind,
    policy: PairPolicy,
    spacing_wl: f64,
    subarray_limit: Option<usize>,
) -> Result<DbfSolution> {
    let range = effective_range(kind, subarray_limit)?;
    let m = kind.elements_per_subarray();
    let f_d = steering_vector(Panel::Tx, m, theta_d_deg, spacing_wl);
    let f_u = steering_vector(Panel::Rx, m, theta_u_deg, spacing_wl);

    let evaluate = |i: usize, j: usize| -> Result<f64> {
        let sub = channel
            .extract_subchannel(&SubArraySpec::new(kind, i)?, &SubArraySpec::new(kind, j)?)?;
        Ok(a_si(&sub, &f_u, &f_d)?.mean_power)
    };

    let (tx_index, rx_index, mean_power) = match policy {
        PairPolicy::Fixed(i, j) => {
            if i < 1 || i > range || j < 1 || j > range {
                return Err(Error::Config(format!(
                    "fixed pair ({i}, {j}) outside 1..={range}"
                )));
            }
            (i, j, evaluate(i, j)?)
        }
        PairPolicy::BestPair => {
            // Ascending scan with strict improvement keeps the
            // lexicographically smallest pair on ties.
            let mut best = (1, 1, evaluate(1, 1)?);
            for i in 1..=range {
                for j in 1..=range {
                    let p = evaluate(i, j)?;
                    if p < best.2 {
                        best = (i, j, p);
                    }
                }
            }
            best
        }
    };

    Ok(DbfSolution {
        theta_d_deg,
        theta_u_deg,
        tx_index,
        rx_index,
        a_si_db: crate::metric::db_from_mean_power(mean_power),
        mean_power,
        policy,
    })
}

/// Exhaustive search result with its grid cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub theta_d_deg: f64,
    pub theta_u_deg: f64,
    pub tx_index: usize,
    pub rx_index: usize,
    #[serde(serialize_with = "crate::ser_capped_db")]
    pub a_si_db: f64,
    pub mean_power: f64,
    /// Number of grid points evaluated.
    pub evaluations: u64,
}

/// Brute-force search over the full grid: perturbation angles stepped at
/// `angle_step_deg` inside the epsilon-feasible windows, crossed with every
/// selectable sub-array pair. Refuses grids larger than `max_evaluations`.
/// Deterministic: ties break toward the lexicographically smallest
/// `(theta_d, theta_u, i, j)` regardless of evaluation order.
#[allow(clippy::too_many_arguments)]
pub fn exhaustive_oracle(
    channel: &SiChannelTensor,
    theta_d_deg: f64,
    theta_u_deg: f64,
    kind: SubArrayKind,
    eps_db: f64,
    angle_step_deg: f64,
    spacing_wl: f64,
    subarray_limit: Option<usize>,
    max_evaluations: u64,
) -> Result<OracleSolution> {
    if !angle_step_deg.is_finite() || angle_step_deg <= 0.0 {
        return Err(Error::Config(format!(
            "oracle angle step must be positive, got {angle_step_deg}"
        )));
    }
    let range = effective_range(kind, subarray_limit)?;
    let m = kind.elements_per_subarray();
    let wd = feasible_window(Link::Downlink, m, theta_d_deg, spacing_wl, eps_db)?;
    let wu = feasible_window(Link::Uplink, m, theta_u_deg, spacing_wl, eps_db)?;
    let grid_d = window_grid(wd.lo_deg, wd.hi_deg, angle_step_deg);
    let grid_u = window_grid(wu.lo_deg, wu.hi_deg, angle_step_deg);

    let estimated = grid_d.len() as u64 * grid_u.len() as u64 * range as u64 * range as u64;
    if estimated > max_evaluations {
        return Err(Error::GridCapExceeded {
            estimated,
            cap: max_evaluations,
        });
    }

    let cache = crate::pso::PairCache::build(channel, kind, range)?;

    // Candidate key: mean power first, then grid indices, then the pair.
    // Total order, so the parallel reduction is order-independent.
    type Key = (f64, usize, usize, usize, usize);
    let best = (0..grid_d.len() * grid_u.len())
        .into_par_iter()
        .map(|cell| {
            let kd = cell / grid_u.len();
            let ku = cell % grid_u.len();
            let f_d = steering_vector(Panel::Tx, m, grid_d[kd], spacing_wl);
            let f_u = steering_vector(Panel::Rx, m, grid_u[ku], spacing_wl);
            let mut cell_best: Option<Key> = None;
            for i in 1..=range {
                for j in 1..=range {
                    let p = a_si(cache.get(i, j), &f_u, &f_d)
                        .expect("cache dimensions match")
                        .mean_power;
                    let key = (p, kd, ku, i, j);
                    if cell_best.is_none() || key_less(&key, cell_best.as_ref().unwrap()) {
                        cell_best = Some(key);
                    }
                }
            }
            cell_best.expect("at least one pair")
        })
        .reduce_with(|a, b| if key_less(&a, &b) { a } else { b })
        .expect("at least one grid cell");

    let (mean_power, kd, ku, tx_index, rx_index) = best;
    Ok(OracleSolution {
        theta_d_deg: grid_d[kd],
        theta_u_deg: grid_u[ku],
        tx_index,
        rx_index,
        a_si_db: crate::metric::db_from_mean_power(mean_power),
        mean_power,
        evaluations: estimated,
    })
}

fn key_less(a: &(f64, usize, usize, usize, usize), b: &(f64, usize, usize, usize, usize)) -> bool {
    (a.0, a.1, a.2, a.3, a.4) < (b.0, b.1, b.2, b.3, b.4)
}

fn effective_range(kind: SubArrayKind, limit: Option<usize>) -> Result<usize> {
    let s = kind.count();
    match limit {
        None => Ok(s),
        Some(l) if (1..=s).contains(&l) => Ok(l),
        Some(l) => Err(Error::Config(format!(
            "sub-array limit {l} outside 1..={s}"
        ))),
    }
}

fn window_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let v = lo + k as f64 * step;
        if v > hi + 1e-12 {
            break;
        }
        grid.push(v);
        k += 1;
    }
    if grid.is_empty() {
        grid.push(lo);
    }
    grid
}
