//! Particle swarm optimization of the beam perturbation vector
//! `[theta_d, theta_u, i, j]`: two steering angles and two sub-array
//! coordinates, minimizing the mean beamformed SI power.
//!
//! The swarm minimizes the linear mean SI power; a_si in dB is derived from
//! it. Constraints are handled through the search bounds: the angle
//! coordinates live inside the epsilon-feasible windows around the desired
//! directions and the sub-array coordinates in `[1, S]`, so every clipped
//! position is feasible and no penalty term is needed. The sub-array
//! coordinates are relaxed to continuous values and rounded to the nearest
//! integer at every fitness evaluation and in the final report.
//!
//! Determinism contract: all random draws come from a seeded ChaCha8 stream
//! in a fixed serial order: initial positions particle-major and
//! coordinate-minor (particle 0 is placed at the DBF point and consumes no
//! draws), then per iteration and per particle four draws for the
//! social weights and four for the cognitive weights. Fitness evaluations
//! may run in parallel; they never touch the stream, so results are
//! identical for any worker count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{dbf, DbfSolution, PairPolicy};
use crate::beam::{degradation_db, feasible_window, phase_response, steering_vector, Link};
use crate::channel::{SiChannelTensor, SubChannel};
use crate::error::{Error, Result};
use crate::geometry::{Panel, SubArrayKind, SubArraySpec, PANEL_ELEMENTS};
use crate::metric::a_si;

/// One point of the search space: `[theta_d, theta_u, i, j]`.
pub type Coords = [f64; 4];

/// Inertia weight schedule for the velocity update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inertia {
    /// Fixed weight; the default is 1.1.
    Constant(f64),
    /// Linearly decaying weight `(T - t) / T` at iteration `t`, which starts
    /// at the defining value `(T - 1) / T` on the first update.
    Decaying,
}

impl Inertia {
    pub fn weight(&self, iteration: usize, total_iterations: usize) -> f64 {
        match self {
            Inertia::Constant(w) => *w,
            Inertia::Decaying => {
                (total_iterations.saturating_sub(iteration)) as f64 / total_iterations as f64
            }
        }
    }
}

/// Full configuration of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub num_particles: usize,
    pub num_iterations: usize,
    /// Upper bound of the uniform per-coordinate social weight draws.
    pub omega1_max: f64,
    /// Upper bound of the uniform per-coordinate cognitive weight draws.
    pub omega2_max: f64,
    pub inertia: Inertia,
    pub seed: u64,
    /// Directivity degradation budget for both beams, dB.
    pub eps_db: f64,
    pub kind: SubArrayKind,
    /// Desired downlink direction, degrees.
    pub theta_d_deg: f64,
    /// Desired uplink direction, degrees.
    pub theta_u_deg: f64,
    /// Element spacing of the beamformed sub-arrays, carrier wavelengths.
    pub spacing_wl: f64,
    /// Sub-array pair used for the DBF baseline and to seed particle 0.
    pub dbf_policy: PairPolicy,
    /// Restricts both sub-array coordinates to `[1, limit]`. Full range when
    /// absent; used to build reduced validation instances.
    pub subarray_limit: Option<usize>,
}

impl PsoConfig {
    /// Default parameters: 20 particles, 100 iterations, uniform [0, 2]
    /// weight draws, constant 1.1 inertia, 2 dB degradation budget.
    pub fn new(kind: SubArrayKind, theta_d_deg: f64, theta_u_deg: f64) -> Self {
        PsoConfig {
            num_particles: 20,
            num_iterations: 100,
            omega1_max: 2.0,
            omega2_max: 2.0,
            inertia: Inertia::Constant(1.1),
            seed: 0,
            eps_db: 2.0,
            kind,
            theta_d_deg,
            theta_u_deg,
            spacing_wl: 0.5,
            dbf_policy: PairPolicy::Fixed(1, 1),
            subarray_limit: None,
        }
    }

    /// Effective number of selectable sub-arrays per side.
    pub fn pair_range(&self) -> usize {
        self.subarray_limit.unwrap_or(self.kind.count())
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_particles < 1 {
            return Err(Error::Config("swarm needs at least one particle".into()));
        }
        if self.num_iterations < 1 {
            return Err(Error::Config("need at least one iteration".into()));
        }
        if !(self.omega1_max.is_finite() && self.omega1_max > 0.0)
            || !(self.omega2_max.is_finite() && self.omega2_max > 0.0)
        {
            return Err(Error::Config(format!(
                "weight draw bounds must be positive, got {} and {}",
                self.omega1_max, self.omega2_max
            )));
        }
        if let Inertia::Constant(w) = self.inertia {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "inertia weight must be finite and non-negative, got {w}"
                )));
            }
        }
        if !self.eps_db.is_finite() || self.eps_db <= 0.0 {
            return Err(Error::InfeasibleWindow(format!(
                "degradation budget must be positive, got {} dB",
                self.eps_db
            )));
        }
        if !self.spacing_wl.is_finite() || self.spacing_wl <= 0.0 {
            return Err(Error::Config(format!(
                "element spacing must be positive, got {} wavelengths",
                self.spacing_wl
            )));
        }
        for (label, theta) in [("downlink", self.theta_d_deg), ("uplink", self.theta_u_deg)] {
            if !theta.is_finite() || theta <= 0.0 || theta >= 180.0 {
                return Err(Error::Config(format!(
                    "{label} direction must lie in (0, 180) degrees, got {theta}"
                )));
            }
        }
        let s = self.kind.count();
        if let Some(limit) = self.subarray_limit {
            if limit < 1 || limit > s {
                return Err(Error::Config(format!(
                    "sub-array limit {limit} outside 1..={s}"
                )));
            }
        }
        match self.dbf_policy {
            PairPolicy::Fixed(i, j) => {
                let lim = self.pair_range();
                if i < 1 || i > lim || j < 1 || j > lim {
                    return Err(Error::Config(format!(
                        "fixed DBF pair ({i}, {j}) outside 1..={lim}"
                    )));
                }
            }
            PairPolicy::BestPair => {}
        }
        Ok(())
    }
}

/// A candidate solution with named coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub theta_d_deg: f64,
    pub theta_u_deg: f64,
    pub tx_coord: f64,
    pub rx_coord: f64,
}

impl Perturbation {
    pub fn from_coords(c: &Coords) -> Self {
        Perturbation {
            theta_d_deg: c[0],
            theta_u_deg: c[1],
            tx_coord: c[2],
            rx_coord: c[3],
        }
    }

    pub fn coords(&self) -> Coords {
        [
            self.theta_d_deg,
            self.theta_u_deg,
            self.tx_coord,
            self.rx_coord,
        ]
    }

    /// Tx sub-array index used at evaluation: nearest integer.
    pub fn tx_index(&self) -> usize {
        self.tx_coord.round() as usize
    }

    pub fn rx_index(&self) -> usize {
        self.rx_coord.round() as usize
    }
}

/// Per-coordinate search bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub low: Coords,
    pub upp: Coords,
}

impl Bounds {
    /// Per-coordinate velocity limit: the extent of the search box. With the
    /// default inertia above 1, unclamped velocities grow geometrically and
    /// park every particle on a box corner; the usual max-velocity rule keeps
    /// the swarm moving through the interior instead.
    pub fn velocity_limit(&self) -> Coords {
        std::array::from_fn(|k| self.upp[k] - self.low[k])
    }

    /// Angle bounds from the epsilon-feasible windows, sub-array bounds from
    /// the selectable index range.
    pub fn for_config(cfg: &PsoConfig) -> Result<Bounds> {
        let m = cfg.kind.elements_per_subarray();
        let wd = feasible_window(
            Link::Downlink,
            m,
            cfg.theta_d_deg,
            cfg.spacing_wl,
            cfg.eps_db,
        )?;
        let wu = feasible_window(Link::Uplink, m, cfg.theta_u_deg, cfg.spacing_wl, cfg.eps_db)?;
        if wd.hi_deg < wd.lo_deg || wu.hi_deg < wu.lo_deg {
            return Err(Error::InfeasibleWindow(
                "empty feasible angle window".into(),
            ));
        }
        let s = cfg.pair_range() as f64;
        Ok(Bounds {
            low: [wd.lo_deg, wu.lo_deg, 1.0, 1.0],
            upp: [wd.hi_deg, wu.hi_deg, s, s],
        })
    }

    pub fn contains(&self, c: &Coords) -> bool {
        (0..4).all(|k| c[k] >= self.low[k] && c[k] <= self.upp[k])
    }
}

/// `min(max(x, lo), hi)`.
pub fn clip(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Velocity update: social pull toward the global best, cognitive pull
/// toward the particle's personal best, inertia on the previous velocity.
/// The weight vectors are the fresh per-coordinate diagonal draws.
pub fn velocity_update(
    position: &Coords,
    velocity: &Coords,
    personal_best: &Coords,
    global_best: &Coords,
    omega1: &Coords,
    omega2: &Coords,
    omega3: f64,
) -> Coords {
    std::array::from_fn(|k| {
        omega1[k] * (global_best[k] - position[k])
            + omega2[k] * (personal_best[k] - position[k])
            + omega3 * velocity[k]
    })
}

/// Position update: move by the velocity, then clip into the bounds.
pub fn position_update(position: &Coords, velocity: &Coords, bounds: &Bounds) -> Coords {
    std::array::from_fn(|k| clip(position[k] + velocity[k], bounds.low[k], bounds.upp[k]))
}

/// Swarm state after an iteration. Fitness values are linear mean SI powers.
#[derive(Debug, Clone)]
pub struct SwarmState {
    pub positions: Vec<Coords>,
    pub velocities: Vec<Coords>,
    pub personal_best: Vec<(Coords, f64)>,
    pub global_best: (Coords, f64),
    pub iteration: usize,
}

/// Seeded uniform-draw stream with a documented mapping from raw 64-bit
/// output to floats, for cross-platform reproducibility.
pub struct SwarmRng(ChaCha8Rng);

impl SwarmRng {
    pub fn new(seed: u64) -> Self {
        SwarmRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform draw in `[lo, hi)`: the top 53 bits of one generator word.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Best solution found, with the sub-array coordinates rounded to integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub perturb_d_deg: f64,
    pub perturb_u_deg: f64,
    pub tx_index: usize,
    pub rx_index: usize,
    #[serde(serialize_with = "crate::ser_capped_db")]
    pub a_si_db: f64,
    pub mean_power: f64,
    pub degradation_d_db: f64,
    pub degradation_u_db: f64,
}

/// Result of one optimization run.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub solution: Solution,
    /// The baseline the swarm was seeded from.
    pub dbf: DbfSolution,
    /// Global-best a_si in dB after each iteration, including the initial
    /// swarm; non-decreasing.
    pub trace: Vec<f64>,
}

/// Mean SI power of a candidate: rounds the sub-array coordinates, extracts
/// the sub-channel pair, builds both beamformers at the perturbed angles, and
/// averages the residual power over the band. Pure and deterministic.
pub fn fitness(x: &Perturbation, channel: &SiChannelTensor, cfg: &PsoConfig) -> Result<f64> {
    let tx_sub = SubArraySpec::new(cfg.kind, x.tx_index())?;
    let rx_sub = SubArraySpec::new(cfg.kind, x.rx_index())?;
    let sub = channel.extract_subchannel(&tx_sub, &rx_sub)?;
    let m = cfg.kind.elements_per_subarray();
    let f_d = steering_vector(Panel::Tx, m, x.theta_d_deg, cfg.spacing_wl);
    let f_u = steering_vector(Panel::Rx, m, x.theta_u_deg, cfg.spacing_wl);
    Ok(a_si(&sub, &f_u, &f_d)?.mean_power)
}

/// All sub-channel pairs extracted once; fitness evaluations index into it.
pub(crate) struct PairCache {
    range: usize,
    subs: Vec<SubChannel>,
}

impl PairCache {
    pub(crate) fn build(
        channel: &SiChannelTensor,
        kind: SubArrayKind,
        range: usize,
    ) -> Result<Self> {
        let mut subs = Vec::with_capacity(range * range);
        for i in 1..=range {
            let tx_sub = SubArraySpec::new(kind, i)?;
            for j in 1..=range {
                let rx_sub = SubArraySpec::new(kind, j)?;
                subs.push(channel.extract_subchannel(&tx_sub, &rx_sub)?);
            }
        }
        Ok(PairCache { range, subs })
    }

    pub(crate) fn get(&self, tx_index: usize, rx_index: usize) -> &SubChannel {
        &self.subs[(tx_index - 1) * self.range + (rx_index - 1)]
    }
}

fn eval_coords(c: &Coords, cache: &PairCache, cfg: &PsoConfig) -> f64 {
    let sub = cache.get(c[2].round() as usize, c[3].round() as usize);
    let m = cfg.kind.elements_per_subarray();
    let f_d = steering_vector(Panel::Tx, m, c[0], cfg.spacing_wl);
    let f_u = steering_vector(Panel::Rx, m, c[1], cfg.spacing_wl);
    a_si(sub, &f_u, &f_d)
        .expect("cache dimensions match config")
        .mean_power
}

/// Runs the min-SI search over one bandwidth-sliced channel tensor.
///
/// The swarm starts with zero velocities and positions uniform inside the
/// bounds, except particle 0 which sits exactly at the DBF baseline point,
/// so the returned suppression never falls below the baseline's.
pub fn optimize(channel: &SiChannelTensor, cfg: &PsoConfig) -> Result<OptimizeOutcome> {
    cfg.validate()?;
    if channel.rx_count() != PANEL_ELEMENTS || channel.tx_count() != PANEL_ELEMENTS {
        return Err(Error::DimensionMismatch(format!(
            "optimization needs a {PANEL_ELEMENTS}x{PANEL_ELEMENTS} element tensor, got {}x{}",
            channel.rx_count(),
            channel.tx_count()
        )));
    }
    let bounds = Bounds::for_config(cfg)?;
    let dbf_solution = dbf(
        channel,
        cfg.theta_d_deg,
        cfg.theta_u_deg,
        cfg.kind,
        cfg.dbf_policy,
        cfg.spacing_wl,
        cfg.subarray_limit,
    )?;
    let cache = PairCache::build(channel, cfg.kind, cfg.pair_range())?;

    let np = cfg.num_particles;
    let total = cfg.num_iterations;
    let mut rng = SwarmRng::new(cfg.seed);

    // Initial swarm: particle 0 at the DBF point, the rest uniform in bounds.
    let mut positions: Vec<Coords> = Vec::with_capacity(np);
    positions.push([
        cfg.theta_d_deg,
        cfg.theta_u_deg,
        dbf_solution.tx_index as f64,
        dbf_solution.rx_index as f64,
    ]);
    for _ in 1..np {
        positions.push(std::array::from_fn(|k| {
            rng.uniform(bounds.low[k], bounds.upp[k])
        }));
    }
    let velocities: Vec<Coords> = vec![[0.0; 4]; np];

    let evaluate = |positions: &[Coords]| -> Vec<f64> {
        positions
            .par_iter()
            .map(|c| eval_coords(c, &cache, cfg))
            .collect()
    };

    let fits = evaluate(&positions);
    let personal_best: Vec<(Coords, f64)> =
        positions.iter().zip(&fits).map(|(c, &f)| (*c, f)).collect();
    let mut global_best = personal_best[0];
    for pb in &personal_best[1..] {
        if pb.1 < global_best.1 {
            global_best = *pb;
        }
    }
    let mut state = SwarmState {
        positions,
        velocities,
        personal_best,
        global_best,
        iteration: 0,
    };

    let mut trace = Vec::with_capacity(total + 1);
    trace.push(crate::metric::db_from_mean_power(state.global_best.1));

    let v_max = bounds.velocity_limit();
    for t in 1..=total {
        state.iteration = t;
        let omega3 = cfg.inertia.weight(t, total);
        // Serial draw phase: per particle, four social then four cognitive.
        for p in 0..np {
            let omega1: Coords = std::array::from_fn(|_| rng.uniform(0.0, cfg.omega1_max));
            let omega2: Coords = std::array::from_fn(|_| rng.uniform(0.0, cfg.omega2_max));
            let mut v = velocity_update(
                &state.positions[p],
                &state.velocities[p],
                &state.personal_best[p].0,
                &state.global_best.0,
                &omega1,
                &omega2,
                omega3,
            );
            for k in 0..4 {
                v[k] = clip(v[k], -v_max[k], v_max[k]);
            }
            state.positions[p] = position_update(&state.positions[p], &v, &bounds);
            state.velocities[p] = v;
        }
        let fits = evaluate(&state.positions);
        for (p, &fit) in fits.iter().enumerate() {
            if fit < state.personal_best[p].1 {
                state.personal_best[p] = (state.positions[p], fit);
            }
        }
        for pb in &state.personal_best {
            if pb.1 < state.global_best.1 {
                state.global_best = *pb;
            }
        }
        trace.push(crate::metric::db_from_mean_power(state.global_best.1));
    }

    let best = Perturbation::from_coords(&state.global_best.0);
    let solution = finalize_solution(&best, channel, cfg, state.global_best.1)?;
    Ok(OptimizeOutcome {
        solution,
        dbf: dbf_solution,
        trace,
    })
}

/// Re-evaluates the winning candidate from scratch and checks the constraint
/// contract before reporting it.
fn finalize_solution(
    best: &Perturbation,
    channel: &SiChannelTensor,
    cfg: &PsoConfig,
    swarm_power: f64,
) -> Result<Solution> {
    let fresh_power = fitness(best, channel, cfg)?;
    debug_assert!(
        (fresh_power - swarm_power).abs() <= 1e-12 * swarm_power.max(f64::MIN_POSITIVE),
        "fresh evaluation diverged from swarm fitness"
    );
    let m = cfg.kind.elements_per_subarray();
    let dd = degradation_db(
        &phase_response(Link::Downlink, m, cfg.theta_d_deg, cfg.spacing_wl),
        &steering_vector(Panel::Tx, m, best.theta_d_deg, cfg.spacing_wl),
    )?;
    let du = degradation_db(
        &phase_response(Link::Uplink, m, cfg.theta_u_deg, cfg.spacing_wl),
        &steering_vector(Panel::Rx, m, best.theta_u_deg, cfg.spacing_wl),
    )?;
    if dd > cfg.eps_db + 1e-6 || du > cfg.eps_db + 1e-6 {
        return Err(Error::InfeasibleWindow(format!(
            "reported solution violates the degradation budget: {dd:.9} / {du:.9} dB vs {} dB",
            cfg.eps_db
        )));
    }
    Ok(Solution {
        perturb_d_deg: best.theta_d_deg,
        perturb_u_deg: best.theta_u_deg,
        tx_index: best.tx_index(),
        rx_index: best.rx_index(),
        a_si_db: crate::metric::db_from_mean_power(fresh_power),
        mean_power: fresh_power,
        degradation_d_db: dd,
        degradation_u_db: du,
    })
}
