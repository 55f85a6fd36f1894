//! RF beamforming over a linear sub-array: phase response vectors, unit-norm
//! beamsteering vectors, directivity, directivity degradation, and the
//! epsilon-feasible steering windows used to bound the perturbation search.
//!
//! Beamformers are frequency-flat: the phase progression is evaluated at the
//! element spacing in carrier wavelengths, one phase per element across the
//! whole band. Angles are azimuth degrees in the open interval (0, 180) with
//! the elevation fixed at 90 degrees, so only `cos(theta)` enters the kernel.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Panel;

/// Downlink / uplink direction of a phase response vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Downlink,
    Uplink,
}

impl Panel {
    /// Phase-response direction this panel's beamformer is matched against:
    /// the Tx beam serves the downlink, the Rx beam serves the uplink.
    pub fn paired_link(self) -> Link {
        match self {
            Panel::Tx => Link::Downlink,
            Panel::Rx => Link::Uplink,
        }
    }
}

/// Array phase response at a physical direction. Entries have unit magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResponse {
    pub entries: Vec<Complex64>,
    pub angle_deg: f64,
    pub link: Link,
    pub spacing_wl: f64,
}

/// Unit-norm beamsteering weights for a linear sub-array.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub weights: Vec<Complex64>,
    pub angle_deg: f64,
    pub panel: Panel,
    pub spacing_wl: f64,
}

/// Phase response vector of an M-element linear sub-array toward `angle_deg`.
///
/// Element `m` is `exp(-j 2 pi d m cos(theta))` for the downlink and the
/// conjugate progression for the uplink.
pub fn phase_response(link: Link, m: usize, angle_deg: f64, spacing_wl: f64) -> PhaseResponse {
    let sign = match link {
        Link::Downlink => -1.0,
        Link::Uplink => 1.0,
    };
    let step = sign * 2.0 * PI * spacing_wl * angle_deg.to_radians().cos();
    PhaseResponse {
        entries: (0..m)
            .map(|k| Complex64::from_polar(1.0, step * k as f64))
            .collect(),
        angle_deg,
        link,
        spacing_wl,
    }
}

/// Beamsteering vector of an M-element sub-array toward `angle_deg`, scaled to
/// unit Euclidean norm. The Tx progression is the conjugate of the downlink
/// phase response and the Rx progression the conjugate of the uplink one.
pub fn steering_vector(panel: Panel, m: usize, angle_deg: f64, spacing_wl: f64) -> SteeringVector {
    let sign = match panel {
        Panel::Tx => 1.0,
        Panel::Rx => -1.0,
    };
    let step = sign * 2.0 * PI * spacing_wl * angle_deg.to_radians().cos();
    let scale = 1.0 / (m as f64).sqrt();
    SteeringVector {
        weights: (0..m)
            .map(|k| Complex64::from_polar(scale, step * k as f64))
            .collect(),
        angle_deg,
        panel,
        spacing_wl,
    }
}

/// Directivity `|phi^T f|^2` of a steering vector against a phase response.
/// Equals `M` when the steering angle matches the physical direction.
pub fn directivity(phi: &PhaseResponse, f: &SteeringVector) -> Result<f64> {
    if phi.entries.len() != f.weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "phase response has {} entries but steering vector has {}",
            phi.entries.len(),
            f.weights.len()
        )));
    }
    let dot: Complex64 = phi.entries.iter().zip(&f.weights).map(|(a, b)| a * b).sum();
    Ok(dot.norm_sqr())
}

/// Directivity loss in dB relative to the maximum `M`.
///
/// Zero when steered on target; `+inf` at a pattern null (always infeasible).
/// Directivities at the round-off floor of an exact null (below `M * 1e-30`)
/// also report as infinite.
pub fn degradation_db(phi: &PhaseResponse, f: &SteeringVector) -> Result<f64> {
    let m = phi.entries.len() as f64;
    let d = directivity(phi, f)?;
    if d <= m * 1e-30 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (m / d).log10())
}

fn degradation_at(link: Link, m: usize, theta_deg: f64, steer_deg: f64, spacing_wl: f64) -> f64 {
    let phi = phase_response(link, m, theta_deg, spacing_wl);
    let panel = match link {
        Link::Downlink => Panel::Tx,
        Link::Uplink => Panel::Rx,
    };
    let f = steering_vector(panel, m, steer_deg, spacing_wl);
    degradation_db(&phi, &f).expect("matched lengths")
}

/// Contiguous steering-angle interval around `angle_deg` within which the
/// directivity degradation stays at or below `eps_db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleWindow {
    pub lo_deg: f64,
    pub hi_deg: f64,
    /// True when the interval ran into an end of the (0, 180) angle domain.
    pub clamped: bool,
}

impl FeasibleWindow {
    pub fn width_deg(&self) -> f64 {
        self.hi_deg - self.lo_deg
    }

    pub fn contains(&self, angle_deg: f64) -> bool {
        angle_deg >= self.lo_deg && angle_deg <= self.hi_deg
    }
}

/// Bisection tolerance for the window endpoints, in degrees.
const WINDOW_TOL_DEG: f64 = 1e-6;

/// Maximal contiguous interval containing `angle_deg` on which the
/// degradation constraint `degradation_db <= eps_db` holds.
///
/// The kernel depends on the steering angle only through
/// `cos(steer) - cos(theta)`, so the window is link-independent and symmetric
/// in cosine space. Endpoints are located by bisection between the desired
/// direction and the first pattern null, to `1e-6` degrees; the returned
/// endpoints are on the feasible side of the crossing.
pub fn feasible_window(
    link: Link,
    m: usize,
    angle_deg: f64,
    spacing_wl: f64,
    eps_db: f64,
) -> Result<FeasibleWindow> {
    if !eps_db.is_finite() || eps_db <= 0.0 {
        return Err(Error::InfeasibleWindow(format!(
            "degradation budget must be positive, got {eps_db} dB"
        )));
    }
    if !(angle_deg > 0.0 && angle_deg < 180.0) {
        return Err(Error::InfeasibleWindow(format!(
            "desired direction must lie in (0, 180) degrees, got {angle_deg}"
        )));
    }
    if m < 1 {
        return Err(Error::DimensionMismatch(
            "sub-array must have at least one element".into(),
        ));
    }
    // A single element has no phase progression: degradation is 0 everywhere.
    if m == 1 {
        return Ok(FeasibleWindow {
            lo_deg: 0.0,
            hi_deg: 180.0,
            clamped: true,
        });
    }

    let deg = |steer: f64| degradation_at(link, m, angle_deg, steer, spacing_wl);
    // First pattern null offset in cosine space. Degradation grows
    // monotonically from the steering target out to this null, so a single
    // eps-crossing exists on each side of the main lobe.
    let null_dcos = 1.0 / (m as f64 * spacing_wl);
    let cos_theta = angle_deg.to_radians().cos();

    let mut clamped = false;
    // Bisect toward increasing angle (decreasing cosine) for the upper edge,
    // decreasing angle for the lower edge.
    let mut solve_side = |toward_hi: bool| -> f64 {
        let cos_null = if toward_hi {
            cos_theta - null_dcos
        } else {
            cos_theta + null_dcos
        };
        let domain_end = if toward_hi { 180.0 } else { 0.0 };
        let bracket = if (-1.0..=1.0).contains(&cos_null) {
            cos_null.acos().to_degrees()
        } else {
            if deg(domain_end) <= eps_db {
                clamped = true;
                return domain_end;
            }
            domain_end
        };
        let mut feasible = angle_deg;
        let mut infeasible = bracket;
        while (infeasible - feasible).abs() > WINDOW_TOL_DEG {
            let mid = 0.5 * (feasible + infeasible);
            if deg(mid) <= eps_db {
                feasible = mid;
            } else {
                infeasible = mid;
            }
        }
        feasible
    };

    let hi_deg = solve_side(true);
    let lo_deg = solve_side(false);
    Ok(FeasibleWindow {
        lo_deg,
        hi_deg,
        clamped,
    })
}

/// First-null beamwidth of a sampled pattern around `peak_deg`: the angular
/// distance between the nearest local minima on each side of the peak. The
/// peak angle must be one of the sampled grid points.
pub fn first_null_beamwidth(pattern: &[(f64, f64)], peak_deg: f64) -> f64 {
    let peak_idx = pattern
        .iter()
        .position(|p| (p.0 - peak_deg).abs() < 1e-9)
        .expect("peak angle on the grid");
    let mut hi = peak_idx;
    while hi + 1 < pattern.len() && pattern[hi + 1].1 < pattern[hi].1 {
        hi += 1;
    }
    let mut lo = peak_idx;
    while lo > 0 && pattern[lo - 1].1 < pattern[lo].1 {
        lo -= 1;
    }
    pattern[hi].0 - pattern[lo].0
}

/// Sampled beampattern of a steering vector: `(angle_deg, gain_db)` per grid
/// point, where the gain is the directivity against the matching-link phase
/// response. Peaks at the steering angle with value `10 log10(M)`.
pub fn beampattern(f: &SteeringVector, angle_grid_deg: &[f64]) -> Vec<(f64, f64)> {
    let m = f.weights.len();
    let link = f.panel.paired_link();
    angle_grid_deg
        .iter()
        .map(|&theta| {
            let phi = phase_response(link, m, theta, f.spacing_wl);
            let d = directivity(&phi, f).expect("matched lengths");
            (theta, 10.0 * d.log10())
        })
        .collect()
}
