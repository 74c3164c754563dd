//! One-stop evaluation of every correlation measure on a state.

use crate::entanglement::{concurrence, negativity};
use crate::hierarchy::{classify_values, Cutoffs, RegimeLabel};
use crate::linalg::DensityMatrix;
use crate::nonlocality::bell_violation;
use crate::scalar::Scalar;
use crate::steering::{steerable_weight_s2_pair, steerable_weight_s3, SettingPair};
use crate::Result;

/// Every measure the crate computes, evaluated on one state, plus the
/// regime the values fall in.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CorrelationReport<T> {
    pub negativity: T,
    pub concurrence: T,
    pub bell: T,
    pub s2_xy: T,
    pub s2_xz: T,
    pub s2_yz: T,
    /// Best of the three two-setting weights.
    pub s2: T,
    pub s3: T,
    pub regime: RegimeLabel,
}

/// Evaluate all measures on `rho` and classify the result with the default
/// cutoffs.
pub fn correlation_report<T: Scalar>(rho: &DensityMatrix<T>) -> Result<CorrelationReport<T>> {
    correlation_report_with(rho, &Cutoffs::default())
}

pub fn correlation_report_with<T: Scalar>(
    rho: &DensityMatrix<T>,
    cutoffs: &Cutoffs<T>,
) -> Result<CorrelationReport<T>> {
    let s2_xy = steerable_weight_s2_pair(rho, SettingPair::XY)?;
    let s2_xz = steerable_weight_s2_pair(rho, SettingPair::XZ)?;
    let s2_yz = steerable_weight_s2_pair(rho, SettingPair::YZ)?;
    let s2 = s2_xy.max(s2_xz).max(s2_yz);
    let s3 = steerable_weight_s3(rho)?;
    let negativity = negativity(rho)?;
    let bell = bell_violation(rho)?;
    let regime = classify_values(negativity, s3, s2, bell, cutoffs)?;
    Ok(CorrelationReport {
        negativity,
        concurrence: concurrence(rho)?,
        bell,
        s2_xy,
        s2_xz,
        s2_yz,
        s2,
        s3,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::gws_negativity;
    use crate::nonlocality::gws_bell_violation;
    use crate::states::{gws, werner, GwsParams};

    #[test]
    fn report_fields_are_mutually_consistent() {
        let params = GwsParams::new(0.9f64, 0.5).unwrap();
        let report = correlation_report(&gws(params)).unwrap();
        assert_eq!(report.s2, report.s2_xy.max(report.s2_xz).max(report.s2_yz));
        assert!((report.negativity - gws_negativity(&params)).abs() <= 1e-8);
        assert!((report.bell - gws_bell_violation(&params)).abs() <= 1e-8);
        assert!((report.concurrence - report.negativity).abs() <= 1e-8);
        assert!(report.s3 >= report.s2 - 1e-6);
        assert_eq!(report.regime.id, 5);
        assert!(report.regime.bell_nonlocal && report.regime.entangled);
    }

    #[test]
    fn white_noise_reports_every_measure_zero() {
        let report = correlation_report(&werner(0.0f64).unwrap()).unwrap();
        assert!(report.negativity <= 1e-10);
        assert!(report.bell <= 1e-10);
        assert!(report.s2 <= 2e-6);
        assert!(report.s3 <= 2e-6);
        assert_eq!(report.regime.id, 1);
    }

    #[test]
    fn report_serializes_with_flat_measure_fields() {
        let report = correlation_report(&werner(0.85f64).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        for key in [
            "negativity",
            "concurrence",
            "bell",
            "s2_xy",
            "s2_xz",
            "s2_yz",
            "s2",
            "s3",
        ] {
            assert!(v[key].is_number(), "missing field {key}");
        }
        assert!(v["regime"]["id"].is_number());
        assert_eq!(v["regime"]["id"], 5);
    }

    #[test]
    fn custom_cutoffs_move_the_regime_boundary() {
        // right above the three-setting onset at q = 1/2
        let rho = werner(0.6f64).unwrap();
        let default_label = correlation_report(&rho).unwrap().regime;
        assert_eq!(default_label.id, 3);
        // an absurdly large weight cutoff silences the steering flags
        let cutoffs = Cutoffs::<f64> {
            weight: 0.5,
            ..Default::default()
        };
        let coarse = correlation_report_with(&rho, &cutoffs).unwrap().regime;
        assert_eq!(coarse.id, 2);
    }
}
