//! Observers equipped with finitely many POVMs over one environment space,
//! and the record-level exchange symmetry those observers cannot break.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{born_distribution, identity, DensityOperator, OutcomeDistribution, Povm};
use crate::quantum::{QuantumError, Tensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservationError {
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("observer needs at least one POVM")]
    EmptyObserver,
    #[error("POVM name `{0}` is used twice")]
    DuplicateName(String),
    #[error("`{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("statistics differ in structure: {0}")]
    Structure(String),
}

pub type Result<T, E = ObservationError> = std::result::Result<T, E>;

/// An observer: named POVMs, all defined on the same environment dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverModel {
    env_dim: usize,
    povms: Vec<(String, Povm)>,
}

impl ObserverModel {
    pub fn new(env_dim: usize, povms: Vec<(String, Povm)>) -> Result<Self> {
        if povms.is_empty() {
            return Err(ObservationError::EmptyObserver);
        }
        for (i, (name, povm)) in povms.iter().enumerate() {
            if povm.dim() != env_dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: env_dim,
                    found: povm.dim(),
                }
                .into());
            }
            if povms[..i].iter().any(|(n, _)| n == name) {
                return Err(ObservationError::DuplicateName(name.clone()));
            }
        }
        Ok(ObserverModel { env_dim, povms })
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn povms(&self) -> &[(String, Povm)] {
        &self.povms
    }

    /// The same observer acting on `env ⊗ extra`, blind to the extra factor.
    pub fn lift(&self, extra_dim: usize) -> Result<ObserverModel> {
        let povms = self
            .povms
            .iter()
            .map(|(n, p)| Ok((n.clone(), lift_povm(p, extra_dim)?)))
            .collect::<Result<_>>()?;
        Ok(ObserverModel {
            env_dim: self.env_dim * extra_dim,
            povms,
        })
    }
}

/// `E_i ↦ E_i ⊗ I`: a measurement that never reads the appended factor.
pub fn lift_povm(povm: &Povm, extra_dim: usize) -> Result<Povm> {
    if extra_dim == 0 {
        return Err(ObservationError::InvalidConfig {
            field: "extra_dim",
            reason: "must be positive".into(),
        });
    }
    let pad = identity(extra_dim);
    let effects = povm.effects().iter().map(|e| e.matrix().tensor(&pad)).collect();
    Ok(Povm::new(effects, povm.labels().to_vec())?)
}

pub type ObserverStatistics = BTreeMap<String, OutcomeDistribution>;

pub fn outcome_statistics(
    rho: &DensityOperator,
    observer: &ObserverModel,
) -> Result<ObserverStatistics> {
    if rho.dim() != observer.env_dim {
        return Err(QuantumError::DimensionMismatch {
            expected: observer.env_dim,
            found: rho.dim(),
        }
        .into());
    }
    observer
        .povms
        .iter()
        .map(|(name, povm)| Ok((name.clone(), born_distribution(rho, povm)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub povm: String,
    pub outcome: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub indistinguishable: bool,
    pub max_deviation: f64,
    /// Where the largest deviation occurs; `None` when every entry matches exactly.
    pub location: Option<Deviation>,
}

/// Compares two observers' statistics entry by entry.
pub fn indistinguishable(
    a: &ObserverStatistics,
    b: &ObserverStatistics,
    tolerance: f64,
) -> Result<Comparison> {
    if a.len() != b.len() {
        return Err(ObservationError::Structure(format!(
            "{} POVMs vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut max_deviation = 0.0;
    let mut location = None;
    for (name, da) in a {
        let db = b
            .get(name)
            .ok_or_else(|| ObservationError::Structure(format!("POVM `{name}` missing")))?;
        if da.labels != db.labels {
            return Err(ObservationError::Structure(format!(
                "POVM `{name}` has different outcome labels"
            )));
        }
        for ((label, pa), pb) in da.labels.iter().zip(&da.probabilities).zip(&db.probabilities) {
            let d = (pa - pb).abs();
            if d > max_deviation {
                max_deviation = d;
                location = Some(Deviation {
                    povm: name.clone(),
                    outcome: label.clone(),
                    value: d,
                });
            }
        }
    }
    Ok(Comparison {
        indistinguishable: max_deviation <= tolerance,
        max_deviation,
        location,
    })
}

/// Isotropic point source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// Decays per second.
    pub activity: f64,
    /// Centimeters from the detector.
    pub distance: f64,
    /// Photons per decay.
    #[serde(rename = "yield", default = "default_yield")]
    pub photon_yield: f64,
}

fn default_yield() -> f64 {
    1.0
}

/// Decays per second in one microcurie.
pub const DECAYS_PER_MICROCURIE: f64 = 3.7e4;

impl SourceConfig {
    pub fn new(activity: f64, distance: f64) -> Result<Self> {
        let s = SourceConfig {
            activity,
            distance,
            photon_yield: 1.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        positive("activity", self.activity)?;
        positive("distance", self.distance)?;
        positive("yield", self.photon_yield)
    }

    /// Photons per second per square centimeter at the detector.
    pub fn flux(&self) -> f64 {
        self.activity * self.photon_yield / (4.0 * PI * self.distance * self.distance)
    }
}

/// Counting detector reporting nonnegative integer counts per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Centimeters.
    pub aperture_diameter: f64,
    pub efficiency: f64,
    /// Counts per second at which the readout saturates.
    pub saturation: u64,
}

impl DetectorConfig {
    /// 2 cm aperture, 0.8% efficiency, saturating at 100 counts per second.
    pub const HANDHELD: DetectorConfig = DetectorConfig {
        aperture_diameter: 2.0,
        efficiency: 0.008,
        saturation: 100,
    };

    pub fn validate(&self) -> Result<()> {
        positive("aperture_diameter", self.aperture_diameter)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(ObservationError::InvalidConfig {
                field: "efficiency",
                reason: format!("{} is outside (0, 1]", self.efficiency),
            });
        }
        if self.saturation == 0 {
            return Err(ObservationError::InvalidConfig {
                field: "saturation",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn aperture_area(&self) -> f64 {
        let r = self.aperture_diameter / 2.0;
        PI * r * r
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ObservationError::InvalidConfig {
            field,
            reason: format!("{v} is not a positive finite number"),
        })
    }
}

/// Expected count rate before quantization and saturation.
pub fn expected_rate(source: &SourceConfig, detector: &DetectorConfig) -> f64 {
    source.flux() * detector.aperture_area() * detector.efficiency
}

/// The recorded outcome: expected rate rounded half-up, capped at saturation.
pub fn geiger_outcome(source: &SourceConfig, detector: &DetectorConfig) -> u64 {
    let rounded = (expected_rate(source, detector) + 0.5).floor();
    if rounded >= detector.saturation as f64 {
        detector.saturation
    } else {
        rounded as u64
    }
}

/// Poisson-sampled one-second counts around the expected rate, each capped
/// at saturation. For illustration only; record identity is decided by
/// [`geiger_outcome`].
pub fn geiger_samples<R: Rng + ?Sized>(
    source: &SourceConfig,
    detector: &DetectorConfig,
    seconds: usize,
    rng: &mut R,
) -> Vec<u64> {
    let rate = expected_rate(source, detector);
    let Ok(poisson) = Poisson::new(rate) else {
        return vec![0; seconds];
    };
    (0..seconds)
        .map(|_| (poisson.sample(rng) as u64).min(detector.saturation))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeReport {
    pub source_a: SourceConfig,
    pub source_b: SourceConfig,
    pub rate_a: f64,
    pub rate_b: f64,
    pub outcome_a: u64,
    pub outcome_b: u64,
    pub records_equal: bool,
    pub configurations_distinct: bool,
}

impl ExchangeReport {
    /// Distinct physical configurations that leave identical records.
    pub fn exchangeable(&self) -> bool {
        self.records_equal && self.configurations_distinct
    }
}

pub fn exchange_witness(
    source_a: &SourceConfig,
    source_b: &SourceConfig,
    detector: &DetectorConfig,
) -> ExchangeReport {
    let outcome_a = geiger_outcome(source_a, detector);
    let outcome_b = geiger_outcome(source_b, detector);
    ExchangeReport {
        source_a: *source_a,
        source_b: *source_b,
        rate_a: expected_rate(source_a, detector),
        rate_b: expected_rate(source_b, detector),
        outcome_a,
        outcome_b,
        records_equal: outcome_a == outcome_b,
        configurations_distinct: source_a != source_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{ginibre_density, random_povm};
    use crate::quantum::{StateVector, TOL_NUM};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z_observer() -> ObserverModel {
        ObserverModel::new(2, vec![("Z".into(), Povm::computational(2))]).unwrap()
    }

    #[test]
    fn lift_preserves_completeness_and_labels() {
        let lifted = lift_povm(&Povm::computational(2), 2).unwrap();
        assert_eq!(lifted.dim(), 4);
        assert_eq!(lifted.labels(), &["0".to_string(), "1".to_string()]);
        let sum = &lifted.effects()[0].matrix().clone() + lifted.effects()[1].matrix();
        assert_eq!(sum, identity(4));
        assert!(lift_povm(&Povm::computational(2), 0).is_err());
    }

    #[test]
    fn lifted_statistics_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let rho = ginibre_density(2, &mut rng);
            let sigma = ginibre_density(3, &mut rng);
            let p = random_povm(2, 3, &mut rng);
            let lhs = born_distribution(&rho.tensor(&sigma), &lift_povm(&p, 3).unwrap()).unwrap();
            let rhs = born_distribution(&rho, &p).unwrap();
            for (a, b) in lhs.probabilities.iter().zip(&rhs.probabilities) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn observer_construction_errors() {
        assert_eq!(ObserverModel::new(2, vec![]), Err(ObservationError::EmptyObserver));
        let r = ObserverModel::new(3, vec![("Z".into(), Povm::computational(2))]);
        assert!(matches!(r, Err(ObservationError::Quantum(_))));
        let r = ObserverModel::new(
            2,
            vec![("Z".into(), Povm::computational(2)), ("Z".into(), Povm::qubit_x())],
        );
        assert_eq!(r, Err(ObservationError::DuplicateName("Z".into())));
    }

    #[test]
    fn statistics_examples() {
        let s = outcome_statistics(&DensityOperator::maximally_mixed(2), &z_observer()).unwrap();
        assert_eq!(s["Z"].probabilities, vec![0.5, 0.5]);

        let zx = ObserverModel::new(
            2,
            vec![("Z".into(), Povm::computational(2)), ("X".into(), Povm::qubit_x())],
        )
        .unwrap();
        let s = outcome_statistics(&StateVector::basis(2, 0).projector(), &zx).unwrap();
        assert_eq!(s["Z"].probabilities, vec![1.0, 0.0]);
        for p in &s["X"].probabilities {
            assert!((p - 0.5).abs() < 1e-15);
        }
        let err = outcome_statistics(&DensityOperator::maximally_mixed(3), &zx);
        assert!(err.is_err());
    }

    #[test]
    fn indistinguishability_examples() {
        let obs = z_observer();
        let zero = outcome_statistics(&StateVector::basis(2, 0).projector(), &obs).unwrap();
        let one = outcome_statistics(&StateVector::basis(2, 1).projector(), &obs).unwrap();
        let same = indistinguishable(&zero, &zero, TOL_NUM).unwrap();
        assert!(same.indistinguishable);
        assert_eq!(same.max_deviation, 0.0);
        assert_eq!(same.location, None);
        let diff = indistinguishable(&zero, &one, TOL_NUM).unwrap();
        assert!(!diff.indistinguishable);
        assert_eq!(diff.max_deviation, 1.0);
        assert_eq!(diff.location.unwrap().povm, "Z");
    }

    #[test]
    fn lifted_observer_cannot_tell_s_from_s_tensor_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = ginibre_density(2, &mut rng);
        let sigma = ginibre_density(2, &mut rng);
        let obs = ObserverModel::new(2, vec![("P".into(), random_povm(2, 2, &mut rng))]).unwrap();
        let a = outcome_statistics(&rho, &obs).unwrap();
        let b = outcome_statistics(&rho.tensor(&sigma), &obs.lift(2).unwrap()).unwrap();
        let cmp = indistinguishable(&a, &b, 1e-12).unwrap();
        assert!(cmp.indistinguishable, "{cmp:?}");
    }

    #[test]
    fn structural_mismatch() {
        let a = outcome_statistics(&DensityOperator::maximally_mixed(2), &z_observer()).unwrap();
        let x = ObserverModel::new(2, vec![("X".into(), Povm::qubit_x())]).unwrap();
        let b = outcome_statistics(&DensityOperator::maximally_mixed(2), &x).unwrap();
        assert!(matches!(indistinguishable(&a, &b, 1e-9), Err(ObservationError::Structure(_))));
    }

    #[test]
    fn default_sources_give_equal_records() {
        let near = SourceConfig::new(100.0 * DECAYS_PER_MICROCURIE, 100.0).unwrap();
        let far = SourceConfig::new(400.0 * DECAYS_PER_MICROCURIE, 200.0).unwrap();
        assert_eq!(near.activity, 3.7e6);
        assert_eq!(far.activity, 1.48e7);
        let d = DetectorConfig::HANDHELD;
        assert_eq!(expected_rate(&near, &d), expected_rate(&far, &d));
        assert_eq!(geiger_outcome(&near, &d), geiger_outcome(&far, &d));
        let report = exchange_witness(&near, &far, &d);
        assert!(report.exchangeable());
    }

    #[test]
    fn saturation_and_vanishing_activity() {
        let d = DetectorConfig::HANDHELD;
        let hot = SourceConfig::new(1e12, 1.0).unwrap();
        assert_eq!(geiger_outcome(&hot, &d), 100);
        let faint = SourceConfig::new(1e-9, 100.0).unwrap();
        assert_eq!(geiger_outcome(&faint, &d), 0);
    }

    #[test]
    fn identical_and_inverse_square_configs() {
        let d = DetectorConfig::HANDHELD;
        let s = SourceConfig::new(1e8, 100.0).unwrap();
        let r = exchange_witness(&s, &s, &d);
        assert!(r.records_equal && !r.configurations_distinct);

        let far = SourceConfig::new(1e8, 300.0).unwrap();
        let r = exchange_witness(&s, &far, &d);
        // 1e8 / (4 pi 1e4) * pi * 0.008 = 20 at 1 m, 20 / 9 = 2.22 at 3 m.
        assert_eq!((r.outcome_a, r.outcome_b), (20, 2));
        assert!(!r.records_equal);
    }

    #[test]
    fn rounding_is_half_up() {
        let d = DetectorConfig { aperture_diameter: 2.0, efficiency: 1.0, saturation: 100 };
        // flux * pi = activity / (4 * 1) when distance is 1 cm.
        let s = SourceConfig::new(10.0, 1.0).unwrap();
        assert_eq!(expected_rate(&s, &d), 2.5);
        assert_eq!(geiger_outcome(&s, &d), 3);
    }

    #[test]
    fn config_validation() {
        assert!(SourceConfig::new(0.0, 1.0).is_err());
        assert!(SourceConfig::new(1.0, -1.0).is_err());
        let mut d = DetectorConfig::HANDHELD;
        d.efficiency = 1.5;
        assert!(d.validate().is_err());
        d.efficiency = 0.5;
        d.saturation = 0;
        assert!(d.validate().is_err());
        assert!(DetectorConfig::HANDHELD.validate().is_ok());
        let s: SourceConfig = serde_json::from_str(r#"{"activity": 1.0, "distance": 2.0}"#).unwrap();
        assert_eq!(s.photon_yield, 1.0);
    }

    #[test]
    fn samples_are_seeded_and_capped() {
        let d = DetectorConfig::HANDHELD;
        let s = SourceConfig::new(1e9, 50.0).unwrap();
        let a = geiger_samples(&s, &d, 10, &mut ChaCha8Rng::seed_from_u64(1));
        let b = geiger_samples(&s, &d, 10, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert!(a.iter().all(|&k| k <= 100));
    }

    proptest! {
        #[test]
        fn power_of_two_rescaling_is_exact(
            activity in 1.0f64..1e10,
            distance in 1.0f64..1e4,
            k in -4i32..5,
        ) {
            let d = DetectorConfig::HANDHELD;
            let c = 2f64.powi(k);
            let a = SourceConfig::new(activity, distance).unwrap();
            let b = SourceConfig::new(activity * c * c, distance * c).unwrap();
            prop_assert_eq!(expected_rate(&a, &d), expected_rate(&b, &d));
            prop_assert_eq!(geiger_outcome(&a, &d), geiger_outcome(&b, &d));
        }

        #[test]
        fn general_rescaling_preserves_rate(
            activity in 1.0f64..1e10,
            distance in 1.0f64..1e4,
            c in 0.1f64..10.0,
        ) {
            let d = DetectorConfig::HANDHELD;
            let a = SourceConfig::new(activity, distance).unwrap();
            let b = SourceConfig::new(activity * c * c, distance * c).unwrap();
            let (ra, rb) = (expected_rate(&a, &d), expected_rate(&b, &d));
            prop_assert!((ra - rb).abs() <= 1e-12 * ra.max(1.0));
            // Quantized records agree unless the rate sits on a rounding edge.
            if ((ra + 0.5).fract() - 0.0).abs() > 1e-9 && ((ra + 0.5).fract() - 1.0).abs() > 1e-9 {
                prop_assert_eq!(geiger_outcome(&a, &d), geiger_outcome(&b, &d));
            }
        }

        #[test]
        fn outcome_monotonicity(
            activity in 1.0f64..1e9,
            distance in 1.0f64..1e3,
            eff in 0.001f64..1.0,
            aperture in 0.1f64..10.0,
            scale in 1.0f64..4.0,
        ) {
            let d = DetectorConfig { aperture_diameter: aperture, efficiency: eff, saturation: 100 };
            let s = SourceConfig::new(activity, distance).unwrap();
            let base = geiger_outcome(&s, &d);
            prop_assert!(base <= 100);
            let more = SourceConfig::new(activity * scale, distance).unwrap();
            prop_assert!(geiger_outcome(&more, &d) >= base);
            let farther = SourceConfig::new(activity, distance * scale).unwrap();
            prop_assert!(geiger_outcome(&farther, &d) <= base);
            let wider = DetectorConfig { aperture_diameter: aperture * scale, ..d };
            prop_assert!(geiger_outcome(&s, &wider) >= base);
            let better = DetectorConfig { efficiency: (eff * scale).min(1.0), ..d };
            prop_assert!(geiger_outcome(&s, &better) >= base);
        }
    }
}
