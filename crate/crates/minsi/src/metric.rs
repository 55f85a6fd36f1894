//! Achieved self-interference suppression: the beamformed residual SI power
//! averaged over the frequency samples of a sub-channel, reported in dB.

use num_complex::Complex64;
use serde::Serialize;

use crate::beam::SteeringVector;
use crate::channel::SubChannel;
use crate::error::{Error, Result};

/// Cap applied to the `+inf` suppression sentinel when serializing, dB.
pub const DB_SERIALIZATION_CAP: f64 = 300.0;

/// Clamps a dB value to the serialization cap. Finite values below the cap
/// pass through unchanged.
pub fn capped_db(v: f64) -> f64 {
    v.min(DB_SERIALIZATION_CAP)
}

/// Suppression in dB from a linear mean power, `+inf` for a dark channel.
pub fn db_from_mean_power(mean_power: f64) -> f64 {
    if mean_power == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mean_power.log10()
    }
}

/// Result of one suppression evaluation.
///
/// `a_si_db = -10 log10(mean_power)`; larger is more suppression. A perfectly
/// dark channel yields `mean_power = 0` and the `+inf` sentinel with
/// `degenerate` set.
#[derive(Debug, Clone, PartialEq)]
pub struct SuppressionReport {
    pub a_si_db: f64,
    pub mean_power: f64,
    pub per_sample_power: Vec<f64>,
    pub degenerate: bool,
}

/// JSON-facing view of a report with the dB sentinel capped.
#[derive(Debug, Clone, Serialize)]
pub struct SuppressionSummary {
    pub a_si_db: f64,
    pub num_samples: usize,
    pub degenerate: bool,
}

impl SuppressionReport {
    pub fn summary(&self) -> SuppressionSummary {
        SuppressionSummary {
            a_si_db: capped_db(self.a_si_db),
            num_samples: self.per_sample_power.len(),
            degenerate: self.degenerate,
        }
    }
}

/// Achieved SI suppression of an (f_U, f_D) beam pair over a sub-channel.
///
/// Sample `n` contributes `|f_U^T H(:,:,n) f_D|^2`; the mean is accumulated
/// in ascending sample order with compensated summation, so the result is
/// stable across runs and worker counts.
pub fn a_si(
    sub: &SubChannel,
    f_u: &SteeringVector,
    f_d: &SteeringVector,
) -> Result<SuppressionReport> {
    if f_u.weights.len() != sub.rx_size {
        return Err(Error::DimensionMismatch(format!(
            "uplink beamformer has {} weights but the sub-channel has {} rx elements",
            f_u.weights.len(),
            sub.rx_size
        )));
    }
    if f_d.weights.len() != sub.tx_size {
        return Err(Error::DimensionMismatch(format!(
            "downlink beamformer has {} weights but the sub-channel has {} tx elements",
            f_d.weights.len(),
            sub.tx_size
        )));
    }

    let n_samples = sub.num_samples;
    let mut per_sample_power = Vec::with_capacity(n_samples);
    for n in 0..n_samples {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, w_d) in f_d.weights.iter().enumerate() {
            let mut col = Complex64::new(0.0, 0.0);
            for (u, w_u) in f_u.weights.iter().enumerate() {
                col += w_u * sub.at(u, m, n);
            }
            acc += col * w_d;
        }
        per_sample_power.push(acc.norm_sqr());
    }

    // Kahan mean in ascending sample order.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &p in &per_sample_power {
        let y = p - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean_power = sum / n_samples as f64;
    Ok(SuppressionReport {
        a_si_db: db_from_mean_power(mean_power),
        mean_power,
        per_sample_power,
        degenerate: mean_power == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::steering_vector;
    use crate::geometry::{Panel, SubArrayKind, SubArraySpec};
    use proptest::prelude::*;

    fn nominal_subs() -> (SubArraySpec, SubArraySpec) {
        (
            SubArraySpec::new(SubArrayKind::Lin4, 1).unwrap(),
            SubArraySpec::new(SubArrayKind::Lin4, 1).unwrap(),
        )
    }

    fn sub_from(data: Vec<Complex64>, m_u: usize, m_d: usize, n: usize) -> SubChannel {
        let (tx, rx) = nominal_subs();
        SubChannel::from_data(m_u, m_d, n, data, tx, rx).unwrap()
    }

    fn identity4() -> SubChannel {
        let mut data = vec![Complex64::default(); 16];
        for k in 0..4 {
            data[k * 4 + k] = Complex64::new(1.0, 0.0);
        }
        sub_from(data, 4, 4, 1)
    }

    /// Independent straight-line oracle: triple loop, plain accumulation,
    /// opposite inner-loop nesting from the implementation.
    pub(crate) fn naive_a_si(sub: &SubChannel, f_u: &SteeringVector, f_d: &SteeringVector) -> f64 {
        let mut total = 0.0;
        for n in 0..sub.num_samples {
            let mut acc = Complex64::new(0.0, 0.0);
            for u in 0..sub.rx_size {
                for m in 0..sub.tx_size {
                    acc += f_u.weights[u] * sub.at(u, m, n) * f_d.weights[m];
                }
            }
            total += acc.norm_sqr();
        }
        total / sub.num_samples as f64
    }

    #[test]
    fn matched_beams_on_identity_channel_give_zero_db() {
        let sub = identity4();
        for &theta in &[30.0, 90.0, 144.0] {
            let f_u = steering_vector(Panel::Rx, 4, theta, 0.5);
            let f_d = steering_vector(Panel::Tx, 4, theta, 0.5);
            let rep = a_si(&sub, &f_u, &f_d).unwrap();
            assert!((rep.a_si_db).abs() < 1e-9, "got {}", rep.a_si_db);
            assert!(!rep.degenerate);
        }
    }

    #[test]
    fn scaling_the_channel_shifts_suppression_by_20_log_alpha() {
        let data: Vec<Complex64> = (0..16 * 3)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.77).cos()))
            .collect();
        let sub = sub_from(data.clone(), 4, 4, 3);
        let scaled = sub_from(data.iter().map(|v| v * 10.0).collect(), 4, 4, 3);
        let f_u = steering_vector(Panel::Rx, 4, 80.0, 0.5);
        let f_d = steering_vector(Panel::Tx, 4, 100.0, 0.5);
        let base = a_si(&sub, &f_u, &f_d).unwrap();
        let shifted = a_si(&scaled, &f_u, &f_d).unwrap();
        assert!((base.a_si_db - shifted.a_si_db - 20.0).abs() < 1e-9);
    }

    #[test]
    fn zero_channel_is_degenerate_with_capped_summary() {
        let sub = sub_from(vec![Complex64::default(); 16], 4, 4, 1);
        let f_u = steering_vector(Panel::Rx, 4, 90.0, 0.5);
        let f_d = steering_vector(Panel::Tx, 4, 90.0, 0.5);
        let rep = a_si(&sub, &f_u, &f_d).unwrap();
        assert!(rep.degenerate);
        assert!(rep.a_si_db.is_infinite());
        let summary = rep.summary();
        assert_eq!(summary.a_si_db, DB_SERIALIZATION_CAP);
        let js = serde_json::to_string(&summary).unwrap();
        assert!(js.contains("300"));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sub = identity4();
        let f_u = steering_vector(Panel::Rx, 8, 90.0, 0.5);
        let f_d = steering_vector(Panel::Tx, 4, 90.0, 0.5);
        assert!(matches!(
            a_si(&sub, &f_u, &f_d),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rank_one_channel_separates() {
        let a: Vec<Complex64> = (0..4)
            .map(|k| Complex64::from_polar(1.0 + 0.2 * k as f64, 0.9 * k as f64))
            .collect();
        let b: Vec<Complex64> = (0..4)
            .map(|k| Complex64::from_polar(0.7, -0.4 * k as f64))
            .collect();
        let mut data = vec![Complex64::default(); 16];
        for m in 0..4 {
            for u in 0..4 {
                data[m * 4 + u] = a[u] * b[m];
            }
        }
        let sub = sub_from(data, 4, 4, 1);
        let f_u = steering_vector(Panel::Rx, 4, 70.0, 0.5);
        let f_d = steering_vector(Panel::Tx, 4, 110.0, 0.5);
        let rep = a_si(&sub, &f_u, &f_d).unwrap();
        let left: Complex64 = f_u.weights.iter().zip(&a).map(|(w, v)| w * v).sum();
        let right: Complex64 = f_d.weights.iter().zip(&b).map(|(w, v)| w * v).sum();
        let expect = left.norm_sqr() * right.norm_sqr();
        assert!((rep.per_sample_power[0] - expect).abs() <= 1e-12 * expect);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn matches_the_naive_oracle(
            reals in prop::collection::vec(-1.0f64..1.0, 32),
            ims in prop::collection::vec(-1.0f64..1.0, 32),
            theta_u in 20.0f64..160.0,
            theta_d in 20.0f64..160.0,
        ) {
            let data: Vec<Complex64> = reals
                .iter()
                .zip(&ims)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
            let sub = sub_from(data, 4, 4, 2);
            let f_u = steering_vector(Panel::Rx, 4, theta_u, 0.5);
            let f_d = steering_vector(Panel::Tx, 4, theta_d, 0.5);
            let rep = a_si(&sub, &f_u, &f_d).unwrap();
            let naive_mean = naive_a_si(&sub, &f_u, &f_d);
            prop_assert!((rep.mean_power - naive_mean).abs() <= 1e-12 * naive_mean.max(1e-300));
        }

        #[test]
        fn band_mean_is_count_weighted_average_of_parts(
            reals in prop::collection::vec(-1.0f64..1.0, 16 * 6),
            split in 1usize..5,
        ) {
            let data: Vec<Complex64> = reals
                .iter()
                .enumerate()
                .map(|(k, &re)| Complex64::new(re, (k as f64 * 0.3).sin()))
                .collect();
            let sub = sub_from(data.clone(), 4, 4, 6);
            let f_u = steering_vector(Panel::Rx, 4, 60.0, 0.5);
            let f_d = steering_vector(Panel::Tx, 4, 120.0, 0.5);
            let whole = a_si(&sub, &f_u, &f_d).unwrap();

            let head = sub_from(data[..16 * split].to_vec(), 4, 4, split);
            let tail = sub_from(data[16 * split..].to_vec(), 4, 4, 6 - split);
            let m1 = a_si(&head, &f_u, &f_d).unwrap().mean_power;
            let m2 = a_si(&tail, &f_u, &f_d).unwrap().mean_power;
            let combined = (split as f64 * m1 + (6 - split) as f64 * m2) / 6.0;
            prop_assert!((whole.mean_power - combined).abs() <= 1e-12 * whole.mean_power.max(1e-300));
        }

        #[test]
        fn sample_order_does_not_matter(
            reals in prop::collection::vec(-1.0f64..1.0, 16 * 4),
            rot in 1usize..4,
        ) {
            let data: Vec<Complex64> = reals
                .iter()
                .enumerate()
                .map(|(k, &re)| Complex64::new(re, (k as f64 * 0.51).cos()))
                .collect();
            let sub = sub_from(data.clone(), 4, 4, 4);
            let mut rotated = data[16 * rot..].to_vec();
            rotated.extend_from_slice(&data[..16 * rot]);
            let sub_rot = sub_from(rotated, 4, 4, 4);
            let f_u = steering_vector(Panel::Rx, 4, 75.0, 0.5);
            let f_d = steering_vector(Panel::Tx, 4, 95.0, 0.5);
            let a = a_si(&sub, &f_u, &f_d).unwrap().mean_power;
            let b = a_si(&sub_rot, &f_u, &f_d).unwrap().mean_power;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }
}
