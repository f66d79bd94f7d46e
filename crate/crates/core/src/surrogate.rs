//! Kinematic stand-in for the pull-test rig.
//!
//! A rubber band twisted around the input axle drives the train; the output
//! axle winds a rope on a spool and pulls a car along a 35 inch track. The
//! model trades speed for torque: a higher speed ratio winds more rope per
//! input turn but delivers less torque, and below the tension the car needs
//! the train stalls. Each linear mesh loses a fixed fraction of torque.
//!
//! Scores are annotations only. Nothing in [`crate::evolution`] reads them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{speed_ratio, GearCatalog, Mechanism};
use crate::novelty::{Archive, DistanceAnnotation, DistanceScore, ScoreSource};
use crate::{Error, Result};

const MM_PER_INCH: f64 = 25.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RigModel {
    pub track_length_in: f64,
    pub input_turns: f64,
    /// Torque at the input axle, model units.
    pub band_torque: f64,
    pub spool_radius_mm: f64,
    /// Rope tension needed to move the car, model units per mm of spool radius.
    pub required_tension: f64,
    pub friction_loss_per_mesh: f64,
}

/// Calibrated so that one- to five-mesh trains peak between ratios 3.6 and
/// 5.1 and stall above that.
impl Default for RigModel {
    fn default() -> Self {
        Self {
            track_length_in: 35.0,
            input_turns: 1.0,
            band_torque: 1.0,
            spool_radius_mm: 20.0,
            required_tension: 0.009,
            friction_loss_per_mesh: 0.08,
        }
    }
}

impl RigModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("track_length_in", self.track_length_in),
            ("input_turns", self.input_turns),
            ("band_torque", self.band_torque),
            ("spool_radius_mm", self.spool_radius_mm),
            ("required_tension", self.required_tension),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(alloc::format!("rig.{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.friction_loss_per_mesh) {
            return Err(Error::Config("rig.friction_loss_per_mesh must be in [0, 1)".into()));
        }
        Ok(())
    }

    /// Output torque after `meshes` linear meshes at speed ratio `ratio`.
    pub fn output_torque(&self, ratio: f64, meshes: usize) -> f64 {
        self.band_torque * libm::pow(1.0 - self.friction_loss_per_mesh, meshes as f64) / ratio
    }

    pub fn stall_torque(&self) -> f64 {
        self.required_tension * self.spool_radius_mm
    }

    /// Largest speed ratio that still moves the car.
    pub fn stall_ratio(&self, meshes: usize) -> f64 {
        self.output_torque(1.0, meshes) / self.stall_torque()
    }

    /// Distance in inches for a train with the given ratio and mesh count.
    pub fn distance_for(&self, ratio: f64, meshes: usize) -> f64 {
        if self.output_torque(ratio, meshes) < self.stall_torque() {
            return 0.0;
        }
        let rope_in = self.input_turns * ratio * 2.0 * PI * self.spool_radius_mm / MM_PER_INCH;
        rope_in.min(self.track_length_in)
    }

    /// Moves the stall point so that `meshes`-mesh trains stall just above
    /// `peak_ratio`, keeping every other constant.
    pub fn calibrated(mut self, peak_ratio: f64, meshes: usize) -> Self {
        self.required_tension = self.output_torque(peak_ratio, meshes) / self.spool_radius_mm;
        self
    }
}

/// Predicted distance (inches) for a buildable mechanism.
pub fn distance_score(mech: &Mechanism, rig: &RigModel) -> Result<f64> {
    if !mech.is_feasible() {
        return Err(Error::Infeasible { violation_mm: mech.feasibility.violation_mm });
    }
    Ok(rig.distance_for(speed_ratio(mech), mech.linear_meshes()))
}

/// A copy of `archive` with every feasible entry scored and every infeasible
/// entry marked unscored.
pub fn attach_scores(archive: &Archive, rig: &RigModel) -> Archive {
    let mut out = archive.clone();
    for e in archive.entries() {
        let annotation = match distance_score(&e.mechanism, rig) {
            Ok(d) => DistanceAnnotation::Scored(DistanceScore::single(d, ScoreSource::Surrogate)),
            Err(_) => DistanceAnnotation::Unscored,
        };
        out.annotate(e.generation, annotation).expect("generation comes from the archive");
    }
    out
}

/// One measured row: repeated trial distances for an archived generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub generation: u32,
    pub trials_in: Vec<f64>,
}

/// A copy of `archive` with measured scores overriding whatever annotation
/// the listed entries had. Fails without changes if any row names a
/// generation the archive does not contain.
pub fn import_measurements(archive: &Archive, rows: &[Measurement]) -> Result<Archive> {
    let mut unknown: Vec<u32> = rows.iter().map(|r| r.generation).filter(|&g| archive.get(g).is_none()).collect();
    if !unknown.is_empty() {
        unknown.sort_unstable();
        unknown.dedup();
        return Err(Error::UnknownGenerations(unknown));
    }
    let mut out = archive.clone();
    for row in rows {
        let score = DistanceScore::from_trials(row.trials_in.clone(), ScoreSource::Measured)?;
        out.annotate(row.generation, DistanceAnnotation::Scored(score))?;
    }
    Ok(out)
}

/// Every ratio in [1/9, 9] reachable with exactly `meshes` linear meshes of
/// catalog gears, ascending, with its predicted distance.
pub fn calibration_sweep(rig: &RigModel, catalog: &GearCatalog, meshes: usize) -> Vec<(f64, f64)> {
    let quotients: Vec<f64> =
        catalog.radii().iter().flat_map(|a| catalog.radii().iter().map(move |b| a / b)).collect();
    let mut ratios = alloc::vec![1.0];
    for _ in 0..meshes {
        ratios = ratios.iter().flat_map(|r| quotients.iter().map(move |q| r * q)).collect();
        ratios.sort_by(f64::total_cmp);
        ratios.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    }
    ratios
        .into_iter()
        .filter(|r| (1.0 / 9.0 - 1e-12..=9.0 + 1e-12).contains(r))
        .map(|r| (r, rig.distance_for(r, meshes)))
        .collect()
}

/// Index of the peak if `curve` rises (weakly) to a single interior maximum
/// and then falls (weakly), ending lower than the peak.
pub fn interior_peak(curve: &[(f64, f64)]) -> Option<usize> {
    let d: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let peak = d.iter().enumerate().fold(0, |best, (i, &v)| if v > d[best] { i } else { best });
    let rising = d[..=peak].windows(2).all(|w| w[0] <= w[1]);
    let falling = d[peak..].windows(2).all(|w| w[0] >= w[1]);
    let interior = peak > 0 && peak + 1 < d.len() && d[0] < d[peak] && d[d.len() - 1] < d[peak];
    (rising && falling && interior).then_some(peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{place_sequence, GeometryConfig, PlacementFlag, Step};
    use PlacementFlag::{Coaxial as C, Linear as L};

    fn mech(list: &[(u8, PlacementFlag)]) -> Mechanism {
        let steps: Vec<Step> = list.iter().map(|&(g, f)| Step::new(g, f)).collect();
        place_sequence(&steps, &GeometryConfig::default()).unwrap()
    }

    #[test]
    fn unit_ratio_travels() {
        let rig = RigModel::default();
        let d = distance_score(&mech(&[(3, L), (3, L)]), &rig).unwrap();
        // one turn of a 20 mm spool: 2*pi*20/25.4 in
        assert!((d - 2.0 * PI * 20.0 / 25.4).abs() < 1e-12);
    }

    #[test]
    fn infeasible_is_refused() {
        let m = mech(&[(1, L), (1, L), (6, C)]);
        assert!(matches!(distance_score(&m, &RigModel::default()), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn scores_stay_on_track() {
        let rig = RigModel { input_turns: 10.0, ..RigModel::default() };
        for (r, d) in calibration_sweep(&rig, &GearCatalog::default(), 1) {
            assert!((0.0..=35.0).contains(&d), "ratio {r} -> {d}");
        }
    }

    #[test]
    fn default_curve_is_unimodal_for_short_trains() {
        let rig = RigModel::default();
        for meshes in 1..=5 {
            let curve = calibration_sweep(&rig, &GearCatalog::default(), meshes);
            assert!(curve.len() > 3);
            assert!(interior_peak(&curve).is_some(), "meshes {meshes}");
            assert_eq!(curve.last().unwrap().1, 0.0);
        }
    }

    #[test]
    fn stall_is_monotone() {
        let rig = RigModel::default();
        let mut stalled = false;
        for i in 1..=900 {
            let r = i as f64 / 100.0;
            let d = rig.distance_for(r, 2);
            if stalled {
                assert_eq!(d, 0.0);
            }
            stalled |= d == 0.0;
        }
        assert!(stalled);
    }

    #[test]
    fn calibration_places_the_stall() {
        let rig = RigModel { required_tension: 1.0, ..RigModel::default() }.calibrated(4.0, 2);
        assert!((rig.stall_ratio(2) - 4.0).abs() < 1e-12);
        assert!(rig.distance_for(4.0, 2) > 0.0);
        assert_eq!(rig.distance_for(4.01, 2), 0.0);
    }

    #[test]
    fn peak_detection() {
        let p = |v: &[f64]| v.iter().enumerate().map(|(i, &d)| (i as f64, d)).collect::<Vec<_>>();
        assert_eq!(interior_peak(&p(&[1.0, 2.0, 3.0, 0.0])), Some(2));
        assert_eq!(interior_peak(&p(&[1.0, 2.0, 3.0])), None);
        assert_eq!(interior_peak(&p(&[3.0, 2.0, 0.0])), None);
        assert_eq!(interior_peak(&p(&[1.0, 3.0, 1.0, 2.0, 0.0])), None);
    }

    #[test]
    fn validation() {
        assert!(RigModel::default().validate().is_ok());
        assert!(RigModel { friction_loss_per_mesh: 1.0, ..RigModel::default() }.validate().is_err());
        assert!(RigModel { spool_radius_mm: 0.0, ..RigModel::default() }.validate().is_err());
    }
}
