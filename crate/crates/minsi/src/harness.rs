//! Config-driven experiment runners shared by the CLI and the examples:
//! channel generation, single min-SI-vs-DBF runs, angle-grid sweeps, and
//! beampattern export.
//!
//! One JSON config describes an experiment; command-line flags only override
//! keys of it. Every runner writes the fully resolved config next to its
//! results, and re-running from that file reproduces all artifacts byte for
//! byte.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::baseline::{exhaustive_oracle, DbfSolution, OracleSolution, PairPolicy};
use crate::beam::{beampattern, first_null_beamwidth, steering_vector};
use crate::channel::{FrequencyGrid, SiChannelTensor, SyntheticParams};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Panel, SubArrayKind};
use crate::metric::capped_db;
use crate::pso::{optimize, Inertia, OptimizeOutcome, PsoConfig, Solution};

/// `start : step : stop` inclusive angle grid, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AngleGrid {
    pub start_deg: f64,
    pub step_deg: f64,
    pub stop_deg: f64,
}

impl Default for AngleGrid {
    fn default() -> Self {
        // Six directions: 15, 45, 75, 105, 135, 165.
        AngleGrid {
            start_deg: 15.0,
            step_deg: 30.0,
            stop_deg: 180.0,
        }
    }
}

impl AngleGrid {
    pub fn points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        let mut k = 0usize;
        loop {
            let v = self.start_deg + k as f64 * self.step_deg;
            if v > self.stop_deg + 1e-9 {
                break;
            }
            pts.push(v);
            k += 1;
        }
        pts
    }

    fn validate(&self) -> Result<()> {
        if !self.step_deg.is_finite() || self.step_deg <= 0.0 {
            return Err(Error::Config(format!(
                "angle grid step must be positive, got {}",
                self.step_deg
            )));
        }
        let pts = self.points();
        if pts.is_empty() {
            return Err(Error::Config("angle grid has no points".into()));
        }
        if pts.iter().any(|&t| t <= 0.0 || t >= 180.0) {
            return Err(Error::Config(
                "angle grid points must lie in (0, 180) degrees".into(),
            ));
        }
        Ok(())
    }
}

/// Where the channel tensor comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSource {
    Synthetic {
        geometry: ArrayGeometry,
        grid: FrequencyGrid,
        params: SyntheticParams,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl Default for ChannelSource {
    fn default() -> Self {
        ChannelSource::Synthetic {
            geometry: ArrayGeometry::default(),
            grid: FrequencyGrid {
                f_start_hz: 3.0e9,
                f_stop_hz: 4.0e9,
                num_points: 1601,
            },
            params: SyntheticParams::default(),
            seed: 7,
        }
    }
}

/// Swarm parameters as they appear in the config file. Directions and the
/// sub-array kind live at the top level of the experiment config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub num_particles: usize,
    pub num_iterations: usize,
    pub omega1_max: f64,
    pub omega2_max: f64,
    pub inertia: Inertia,
    pub seed: u64,
    pub eps_db: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            num_particles: 20,
            num_iterations: 100,
            omega1_max: 2.0,
            omega2_max: 2.0,
            inertia: Inertia::Constant(1.1),
            seed: 1,
            eps_db: 2.0,
        }
    }
}

/// Optional brute-force validation pass attached to an optimize run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleParams {
    pub angle_step_deg: f64,
    pub max_evaluations: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            angle_step_deg: 0.1,
            max_evaluations: 50_000_000,
        }
    }
}

/// One experiment: channel, band, directions, swarm settings, outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSource,
    pub kind: SubArrayKind,
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    /// Desired downlink direction for single optimize runs, degrees.
    pub theta_d_deg: f64,
    /// Desired uplink direction for single optimize runs, degrees.
    pub theta_u_deg: f64,
    /// Directions swept by `sweep` and steered by `beampattern`.
    pub angle_grid: AngleGrid,
    pub pso: PsoParams,
    pub dbf_policy: PairPolicy,
    /// Beamformer element spacing in carrier wavelengths. When absent, a
    /// synthetic channel uses its geometry's spacing and a file channel 0.5.
    pub beam_spacing_wl: Option<f64>,
    /// Restricts sub-array selection to indices `1..=limit`.
    pub subarray_limit: Option<usize>,
    /// Runs the exhaustive oracle alongside `optimize` when present.
    pub oracle: Option<OracleParams>,
    /// Sampling resolution of exported beampatterns, degrees.
    pub pattern_step_deg: f64,
    /// Worker threads; library/runtime default when absent.
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: ChannelSource::default(),
            kind: SubArrayKind::Lin4,
            center_hz: 3.5e9,
            bandwidth_hz: 20e6,
            theta_d_deg: 105.0,
            theta_u_deg: 45.0,
            angle_grid: AngleGrid::default(),
            pso: PsoParams::default(),
            dbf_policy: PairPolicy::Fixed(1, 1),
            beam_spacing_wl: None,
            subarray_limit: None,
            oracle: None,
            pattern_step_deg: 0.25,
            workers: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line overrides of config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Replaces the channel source with a tensor file.
    pub channel_path: Option<PathBuf>,
    pub bandwidth_hz: Option<f64>,
    pub kind: Option<SubArrayKind>,
    pub workers: Option<usize>,
    /// Route the seed override to the synthetic channel instead of the
    /// swarm; set by `gen-channel`.
    pub seed_targets_channel: bool,
}

impl ExperimentConfig {
    /// Reads a config file, or the built-in defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(ExperimentConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(seed) = ov.seed {
            if ov.seed_targets_channel {
                if let ChannelSource::Synthetic { seed: s, .. } = &mut self.channel {
                    *s = seed;
                }
            } else {
                self.pso.seed = seed;
            }
        }
        if let Some(out) = &ov.out_dir {
            self.out_dir = out.clone();
        }
        if let Some(path) = &ov.channel_path {
            self.channel = ChannelSource::File { path: path.clone() };
        }
        if let Some(b) = ov.bandwidth_hz {
            self.bandwidth_hz = b;
        }
        if let Some(kind) = ov.kind {
            self.kind = kind;
        }
        if let Some(w) = ov.workers {
            self.workers = Some(w);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ChannelSource::Synthetic {
            geometry,
            grid,
            params,
            ..
        } = &self.channel
        {
            geometry.validate()?;
            FrequencyGrid::new(grid.f_start_hz, grid.f_stop_hz, grid.num_points)?;
            let _ = SyntheticParams {
                l_iso_db: params.l_iso_db,
                diffuse_ratio: params.diffuse_ratio,
            };
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0)
            || !(self.center_hz.is_finite() && self.center_hz > 0.0)
        {
            return Err(Error::Config(format!(
                "center and bandwidth must be positive, got {} Hz / {} Hz",
                self.center_hz, self.bandwidth_hz
            )));
        }
        self.angle_grid.validate()?;
        if !self.pattern_step_deg.is_finite() || self.pattern_step_deg <= 0.0 {
            return Err(Error::Config(format!(
                "pattern step must be positive, got {}",
                self.pattern_step_deg
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        self.pso_config(self.theta_d_deg, self.theta_u_deg)?
            .validate()
    }

    /// Beamformer spacing: explicit override, else the synthetic geometry's
    /// spacing, else half a wavelength.
    pub fn spacing_wl(&self) -> f64 {
        self.beam_spacing_wl.unwrap_or(match &self.channel {
            ChannelSource::Synthetic { geometry, .. } => geometry.spacing_wl,
            ChannelSource::File { .. } => 0.5,
        })
    }

    /// Assembles the optimizer config for one (theta_d, theta_u) cell.
    pub fn pso_config(&self, theta_d_deg: f64, theta_u_deg: f64) -> Result<PsoConfig> {
        Ok(PsoConfig {
            num_particles: self.pso.num_particles,
            num_iterations: self.pso.num_iterations,
            omega1_max: self.pso.omega1_max,
            omega2_max: self.pso.omega2_max,
            inertia: self.pso.inertia,
            seed: self.pso.seed,
            eps_db: self.pso.eps_db,
            kind: self.kind,
            theta_d_deg,
            theta_u_deg,
            spacing_wl: self.spacing_wl(),
            dbf_policy: self.dbf_policy,
            subarray_limit: self.subarray_limit,
        })
    }

    /// Acquires the configured tensor: generates or loads the full tensor.
    pub fn acquire_channel(&self) -> Result<SiChannelTensor> {
        match &self.channel {
            ChannelSource::Synthetic {
                geometry,
                grid,
                params,
                seed,
            } => SiChannelTensor::generate_synthetic(geometry, *grid, params, *seed),
            ChannelSource::File { path } => SiChannelTensor::load(path),
        }
    }

    /// Acquires the tensor and slices it to the configured band.
    pub fn acquire_sliced_channel(&self) -> Result<SiChannelTensor> {
        self.acquire_channel()?
            .slice_bandwidth(self.center_hz, self.bandwidth_hz)
    }

    fn write_resolved(&self) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))?;
        let path = self.out_dir.join("config.json");
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or inline on the
/// default pool when unset.
pub fn with_worker_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Result of `gen-channel`.
#[derive(Debug, Clone, Serialize)]
pub struct GenChannelReport {
    pub path: PathBuf,
    pub sidecar_path: PathBuf,
    pub sha256: String,
    pub rx_count: usize,
    pub tx_count: usize,
    pub freq_count: usize,
    pub file_bytes: u64,
}

/// Generates the configured synthetic tensor and writes it (plus sidecar and
/// resolved config) into the output directory.
pub fn run_gen_channel(cfg: &ExperimentConfig) -> Result<GenChannelReport> {
    cfg.validate()?;
    if matches!(cfg.channel, ChannelSource::File { .. }) {
        return Err(Error::Config(
            "gen-channel needs a synthetic channel source".into(),
        ));
    }
    cfg.write_resolved()?;
    let tensor = with_worker_pool(cfg.workers, || cfg.acquire_channel())??;
    let path = cfg.out_dir.join("si_channel.sich");
    let sha256 = tensor.save(&path)?;
    Ok(GenChannelReport {
        sidecar_path: PathBuf::from(format!("{}.json", path.display())),
        sha256,
        rx_count: tensor.rx_count(),
        tx_count: tensor.tx_count(),
        freq_count: tensor.grid().num_points,
        file_bytes: crate::channel::io::file_size_bytes(
            tensor.rx_count(),
            tensor.tx_count(),
            tensor.grid().num_points,
        ),
        path,
    })
}

/// Result of a single `optimize` run.
#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub outcome: OptimizeOutcome,
    pub oracle: Option<OracleSolution>,
    pub num_samples: usize,
    pub solution_path: PathBuf,
    pub trace_path: PathBuf,
}

#[derive(Serialize)]
struct SolutionDocument<'a> {
    kind: SubArrayKind,
    center_hz: f64,
    bandwidth_hz: f64,
    num_samples: usize,
    theta_d_deg: f64,
    theta_u_deg: f64,
    eps_db: f64,
    seed: u64,
    dbf_policy: String,
    min_si: &'a Solution,
    dbf: &'a DbfSolution,
    #[serde(serialize_with = "crate::ser_capped_db")]
    gain_over_dbf_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'a OracleSolution>,
}

fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("iteration,best_a_si_db\n");
    for (t, &db) in trace.iter().enumerate() {
        let _ = writeln!(out, "{t},{:.6}", capped_db(db));
    }
    out
}

/// One min-SI optimization at the configured directions, with the DBF
/// baseline from the same run; writes `solution.json` and `trace.csv`.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<OptimizeReport> {
    cfg.validate()?;
    cfg.write_resolved()?;
    let channel = cfg.acquire_sliced_channel()?;
    let pso_cfg = cfg.pso_config(cfg.theta_d_deg, cfg.theta_u_deg)?;
    let (outcome, oracle) = with_worker_pool(cfg.workers, || -> Result<_> {
        let outcome = optimize(&channel, &pso_cfg)?;
        let oracle = match &cfg.oracle {
            None => None,
            Some(op) => Some(exhaustive_oracle(
                &channel,
                cfg.theta_d_deg,
                cfg.theta_u_deg,
                cfg.kind,
                cfg.pso.eps_db,
                op.angle_step_deg,
                cfg.spacing_wl(),
                cfg.subarray_limit,
                op.max_evaluations,
            )?),
        };
        Ok((outcome, oracle))
    })??;

    let doc = SolutionDocument {
        kind: cfg.kind,
        center_hz: cfg.center_hz,
        bandwidth_hz: cfg.bandwidth_hz,
        num_samples: channel.grid().num_points,
        theta_d_deg: cfg.theta_d_deg,
        theta_u_deg: cfg.theta_u_deg,
        eps_db: cfg.pso.eps_db,
        seed: cfg.pso.seed,
        dbf_policy: cfg.dbf_policy.to_string(),
        min_si: &outcome.solution,
        dbf: &outcome.dbf,
        gain_over_dbf_db: outcome.solution.a_si_db - outcome.dbf.a_si_db,
        oracle: oracle.as_ref(),
    };
    let solution_path = cfg.out_dir.join("solution.json");
    write_text(
        &solution_path,
        &(serde_json::to_string_pretty(&doc)? + "\n"),
    )?;
    let trace_path = cfg.out_dir.join("trace.csv");
    write_text(&trace_path, &trace_csv(&outcome.trace))?;

    Ok(OptimizeReport {
        outcome,
        oracle,
        num_samples: channel.grid().num_points,
        solution_path,
        trace_path,
    })
}

/// One sweep cell: both schemes at one (theta_d, theta_u) pair.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub theta_d_deg: f64,
    pub theta_u_deg: f64,
    pub seed: u64,
    pub dbf: DbfSolution,
    pub min_si: Solution,
    pub gain_db: f64,
}

/// Min/max/mean over a set of dB values (capped at the sentinel limit).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DbStats {
    pub min_db: f64,
    pub max_db: f64,
    pub mean_db: f64,
}

fn db_stats(values: impl Iterator<Item = f64>) -> DbStats {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        let v = capped_db(v);
        min = min.min(v);
        max = max.max(v);
        sum += v;
        count += 1;
    }
    DbStats {
        min_db: min,
        max_db: max,
        mean_db: sum / count as f64,
    }
}

/// Result of a `sweep` run.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    pub dbf_stats: DbStats,
    pub min_si_stats: DbStats,
    pub gain_stats: DbStats,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

#[derive(Serialize)]
struct SweepSummary {
    kind: SubArrayKind,
    center_hz: f64,
    bandwidth_hz: f64,
    eps_db: f64,
    base_seed: u64,
    dbf_policy: String,
    cells: usize,
    dbf: DbStats,
    min_si: DbStats,
    gain: DbStats,
}

/// Full angle-grid comparison of DBF and min-SI: every (theta_d, theta_u)
/// pair of the configured grid, run independently and in parallel.
///
/// Cell `(kd, ku)` uses swarm seed `base_seed + kd * n + ku`, so a sweep is
/// reproducible cell by cell with single `optimize` runs.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    cfg.write_resolved()?;
    let channel = cfg.acquire_sliced_channel()?;
    let angles = cfg.angle_grid.points();
    let n = angles.len();

    let cells: Vec<SweepCell> = with_worker_pool(cfg.workers, || -> Result<Vec<SweepCell>> {
        (0..n * n)
            .into_par_iter()
            .map(|cell| {
                let kd = cell / n;
                let ku = cell % n;
                let theta_d = angles[kd];
                let theta_u = angles[ku];
                let mut pso_cfg = cfg.pso_config(theta_d, theta_u)?;
                pso_cfg.seed = cfg.pso.seed.wrapping_add(cell as u64);
                let outcome = optimize(&channel, &pso_cfg)?;
                Ok(SweepCell {
                    theta_d_deg: theta_d,
                    theta_u_deg: theta_u,
                    seed: pso_cfg.seed,
                    gain_db: outcome.solution.a_si_db - outcome.dbf.a_si_db,
                    dbf: outcome.dbf,
                    min_si: outcome.solution,
                })
            })
            .collect()
    })??;

    let mut csv = String::from(
        "theta_d_deg,theta_u_deg,dbf_a_si_db,dbf_tx,dbf_rx,minsi_a_si_db,minsi_tx,minsi_rx,perturb_d_deg,perturb_u_deg,gain_db,seed\n",
    );
    for c in &cells {
        let _ = writeln!(
            csv,
            "{:.6},{:.6},{:.6},{},{},{:.6},{},{},{:.6},{:.6},{:.6},{}",
            c.theta_d_deg,
            c.theta_u_deg,
            capped_db(c.dbf.a_si_db),
            c.dbf.tx_index,
            c.dbf.rx_index,
            capped_db(c.min_si.a_si_db),
            c.min_si.tx_index,
            c.min_si.rx_index,
            c.min_si.perturb_d_deg,
            c.min_si.perturb_u_deg,
            capped_db(c.gain_db),
            c.seed,
        );
    }
    let csv_path = cfg.out_dir.join("sweep.csv");
    write_text(&csv_path, &csv)?;

    let dbf_stats = db_stats(cells.iter().map(|c| c.dbf.a_si_db));
    let min_si_stats = db_stats(cells.iter().map(|c| c.min_si.a_si_db));
    let gain_stats = db_stats(cells.iter().map(|c| c.gain_db));
    let summary = SweepSummary {
        kind: cfg.kind,
        center_hz: cfg.center_hz,
        bandwidth_hz: cfg.bandwidth_hz,
        eps_db: cfg.pso.eps_db,
        base_seed: cfg.pso.seed,
        dbf_policy: cfg.dbf_policy.to_string(),
        cells: cells.len(),
        dbf: dbf_stats,
        min_si: min_si_stats,
        gain: gain_stats,
    };
    let summary_path = cfg.out_dir.join("summary.json");
    write_text(
        &summary_path,
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;

    Ok(SweepReport {
        cells,
        dbf_stats,
        min_si_stats,
        gain_stats,
        csv_path,
        summary_path,
    })
}

/// Summary of one exported beampattern curve.
#[derive(Debug, Clone, Serialize)]
pub struct PatternCurve {
    pub kind: SubArrayKind,
    pub steer_deg: f64,
    pub peak_gain_db: f64,
    pub first_null_beamwidth_deg: f64,
}

/// Result of a `beampattern` run.
#[derive(Debug, Clone)]
pub struct BeampatternReport {
    pub curves: Vec<PatternCurve>,
    pub csv_path: PathBuf,
}

/// Exports DBF beampatterns for every grid direction, for both sub-array
/// kinds, as plot-ready CSV rows `(kind, steer_deg, angle_deg, gain_db)`.
pub fn run_beampattern(cfg: &ExperimentConfig) -> Result<BeampatternReport> {
    cfg.validate()?;
    cfg.write_resolved()?;
    let spacing = cfg.spacing_wl();
    let steps = (180.0 / cfg.pattern_step_deg).ceil() as usize;
    let grid: Vec<f64> = (1..steps)
        .map(|k| k as f64 * cfg.pattern_step_deg)
        .filter(|&a| a < 180.0)
        .collect();

    let mut csv = String::from("kind,steer_deg,angle_deg,gain_db\n");
    let mut curves = Vec::new();
    for kind in [SubArrayKind::Lin4, SubArrayKind::Lin8] {
        let m = kind.elements_per_subarray();
        for &steer in &cfg.angle_grid.points() {
            let f = steering_vector(Panel::Tx, m, steer, spacing);
            // Sample on the configured grid plus the exact peak.
            let mut sample_angles = grid.clone();
            if !sample_angles.iter().any(|&a| (a - steer).abs() < 1e-9) {
                sample_angles.push(steer);
                sample_angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
            let pattern = beampattern(&f, &sample_angles);
            for &(angle, gain) in &pattern {
                let _ = writeln!(csv, "{kind},{steer:.6},{angle:.6},{gain:.6}");
            }
            let peak_gain_db = 10.0 * (m as f64).log10();
            curves.push(PatternCurve {
                kind,
                steer_deg: steer,
                peak_gain_db,
                first_null_beamwidth_deg: first_null_beamwidth(&pattern, steer),
            });
        }
    }
    let csv_path = cfg.out_dir.join("beampatterns.csv");
    write_text(&csv_path, &csv)?;
    Ok(BeampatternReport { curves, csv_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            channel: ChannelSource::Synthetic {
                geometry: ArrayGeometry::default(),
                grid: FrequencyGrid::new(3.49e9, 3.51e9, 33).unwrap(),
                params: SyntheticParams::default(),
                seed: 7,
            },
            bandwidth_hz: 20e6,
            pso: PsoParams {
                num_iterations: 10,
                ..PsoParams::default()
            },
            out_dir: dir.to_path_buf(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn minimal_config_file_parses_with_defaults() {
        let parsed: ExperimentConfig =
            serde_json::from_str(r#"{"kind": "lin8", "bandwidth_hz": 1e8}"#).unwrap();
        assert_eq!(parsed.kind, SubArrayKind::Lin8);
        assert_eq!(parsed.bandwidth_hz, 1e8);
        assert_eq!(parsed.pso.num_particles, 20);
    }

    #[test]
    fn overrides_replace_config_keys() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_overrides(&Overrides {
            seed: Some(99),
            out_dir: Some(PathBuf::from("elsewhere")),
            channel_path: Some(PathBuf::from("chan.sich")),
            bandwidth_hz: Some(5e6),
            kind: Some(SubArrayKind::Lin8),
            workers: Some(2),
            seed_targets_channel: false,
        });
        assert_eq!(cfg.pso.seed, 99);
        assert_eq!(cfg.out_dir, PathBuf::from("elsewhere"));
        assert!(matches!(cfg.channel, ChannelSource::File { .. }));
        assert_eq!(cfg.bandwidth_hz, 5e6);
        assert_eq!(cfg.kind, SubArrayKind::Lin8);
        assert_eq!(cfg.workers, Some(2));
    }

    #[test]
    fn gen_channel_seed_override_targets_the_channel() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_overrides(&Overrides {
            seed: Some(123),
            seed_targets_channel: true,
            ..Overrides::default()
        });
        match cfg.channel {
            ChannelSource::Synthetic { seed, .. } => assert_eq!(seed, 123),
            _ => panic!("expected synthetic source"),
        }
        assert_eq!(cfg.pso.seed, PsoParams::default().seed);
    }

    #[test]
    fn optimize_run_writes_artifacts_and_dominates_dbf() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fast_config(dir.path());
        let report = run_optimize(&cfg).unwrap();
        assert!(report.solution_path.exists());
        assert!(report.trace_path.exists());
        assert!(dir.path().join("config.json").exists());
        assert!(report.outcome.solution.a_si_db >= report.outcome.dbf.a_si_db);

        let text = std::fs::read_to_string(&report.solution_path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(doc["min_si"]["tx_index"].is_u64());
        assert!(doc["gain_over_dbf_db"].as_f64().unwrap() >= 0.0);
    }

    #[test]
    fn rerun_from_resolved_config_reproduces_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fast_config(dir.path());
        run_optimize(&cfg).unwrap();
        let solution = std::fs::read(dir.path().join("solution.json")).unwrap();
        let trace = std::fs::read(dir.path().join("trace.csv")).unwrap();
        let config_bytes = std::fs::read(dir.path().join("config.json")).unwrap();

        let reloaded = ExperimentConfig::load(Some(&dir.path().join("config.json"))).unwrap();
        run_optimize(&reloaded).unwrap();
        assert_eq!(
            solution,
            std::fs::read(dir.path().join("solution.json")).unwrap()
        );
        assert_eq!(trace, std::fs::read(dir.path().join("trace.csv")).unwrap());
        assert_eq!(
            config_bytes,
            std::fs::read(dir.path().join("config.json")).unwrap()
        );
    }

    #[test]
    fn beampattern_rows_are_monotone_per_curve() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fast_config(dir.path());
        cfg.pattern_step_deg = 1.0;
        let report = run_beampattern(&cfg).unwrap();
        assert_eq!(report.curves.len(), 2 * 6);
        let text = std::fs::read_to_string(&report.csv_path).unwrap();
        let mut last_key: Option<(String, f64, f64)> = None;
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let key = (
                f[0].to_string(),
                f[1].parse::<f64>().unwrap(),
                f[2].parse::<f64>().unwrap(),
            );
            if let Some(prev) = &last_key {
                if prev.0 == key.0 && prev.1 == key.1 {
                    assert!(key.2 > prev.2, "angles must increase within a curve");
                }
            }
            last_key = Some(key);
        }
    }
}
