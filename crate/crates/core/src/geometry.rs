//! Gear catalog, chain placement, and feasibility checking.
//!
//! Chains grow in the +x direction. All gear centres lie on one line, so the
//! planar distance between any two centres is the difference of their x
//! coordinates. Planes are discrete axial layers; a coaxial hop moves to the
//! next plane and a linear mesh stays in the current one.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CATALOG_SIZE: usize = 6;
pub const MIN_GEARS: usize = 2;
pub const MAX_GEARS: usize = 6;

/// One catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearType {
    pub id: u8,
    pub pitch_radius_mm: f64,
}

/// The six gear sizes, indexed by id 1..=6 with strictly increasing radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; CATALOG_SIZE]", into = "[f64; CATALOG_SIZE]")]
pub struct GearCatalog {
    radii_mm: [f64; CATALOG_SIZE],
}

impl GearCatalog {
    pub fn new(radii_mm: [f64; CATALOG_SIZE]) -> Result<Self> {
        if radii_mm.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::InvalidCatalog("radii must be finite and positive".into()));
        }
        if radii_mm.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCatalog("radii must be strictly increasing".into()));
        }
        Ok(Self { radii_mm })
    }

    pub fn get(&self, id: u8) -> Result<GearType> {
        if !(1..=CATALOG_SIZE as u8).contains(&id) {
            return Err(Error::UnknownGear(id));
        }
        Ok(GearType { id, pitch_radius_mm: self.radii_mm[id as usize - 1] })
    }

    pub fn radius(&self, id: u8) -> Result<f64> {
        self.get(id).map(|g| g.pitch_radius_mm)
    }

    pub fn radii(&self) -> &[f64; CATALOG_SIZE] {
        &self.radii_mm
    }

    pub fn iter(&self) -> impl Iterator<Item = GearType> + '_ {
        self.radii_mm
            .iter()
            .enumerate()
            .map(|(i, &r)| GearType { id: i as u8 + 1, pitch_radius_mm: r })
    }
}

/// Radii 5, 10, ..., 30 mm.
impl Default for GearCatalog {
    fn default() -> Self {
        Self { radii_mm: [5.0, 10.0, 15.0, 20.0, 25.0, 30.0] }
    }
}

impl TryFrom<[f64; CATALOG_SIZE]> for GearCatalog {
    type Error = Error;

    fn try_from(radii: [f64; CATALOG_SIZE]) -> Result<Self> {
        Self::new(radii)
    }
}

impl From<GearCatalog> for [f64; CATALOG_SIZE] {
    fn from(c: GearCatalog) -> Self {
        c.radii_mm
    }
}

/// Placement of a gear relative to its predecessor, as emitted by a genome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementFlag {
    Linear,
    Coaxial,
}

impl PlacementFlag {
    pub fn flipped(self) -> Self {
        match self {
            Self::Linear => Self::Coaxial,
            Self::Coaxial => Self::Linear,
        }
    }
}

/// Realised placement of a gear inside a mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    First,
    Linear,
    Coaxial,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::First => "first",
            Self::Linear => "linear",
            Self::Coaxial => "coaxial",
        })
    }
}

/// One decoded gene: which gear, and how it attaches to the previous one.
/// The flag of the first step is ignored by placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub gear_id: u8,
    pub flag: PlacementFlag,
}

impl Step {
    pub const fn new(gear_id: u8, flag: PlacementFlag) -> Self {
        Self { gear_id, flag }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacedGear {
    pub gear: GearType,
    pub center_x_mm: f64,
    pub plane: u32,
    pub axle_id: u32,
    pub placement: Placement,
}

impl PlacedGear {
    pub fn radius(&self) -> f64 {
        self.gear.pitch_radius_mm
    }
}

/// Geometric limits of the gear box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    pub catalog: GearCatalog,
    pub box_length_mm: f64,
    pub axle_radius_mm: f64,
    /// Wrap coaxial hops back to plane 0 after this many planes. `None` keeps
    /// advancing, which makes same-plane overlaps impossible.
    pub plane_limit: Option<u32>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            catalog: GearCatalog::default(),
            box_length_mm: 150.0,
            axle_radius_mm: 2.5,
            plane_limit: None,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        GearCatalog::new(self.catalog.radii_mm)?;
        if !(self.box_length_mm.is_finite() && self.box_length_mm > 0.0) {
            return Err(Error::Config("box_length_mm must be positive".into()));
        }
        if !(self.axle_radius_mm.is_finite() && self.axle_radius_mm >= 0.0) {
            return Err(Error::Config("axle_radius_mm must be non-negative".into()));
        }
        if self.plane_limit == Some(0) {
            return Err(Error::Config("plane_limit must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreachKind {
    DiscOverlap,
    AxleClash,
    OutOfBounds,
}

/// A single constraint breach.
///
/// `gear` is the offending gear index. For `DiscOverlap`, `other` is the
/// second gear index; for `AxleClash` it is the id of the foreign axle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breach {
    pub kind: BreachKind,
    pub depth_mm: f64,
    pub gear: usize,
    pub other: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violation_mm: f64,
    pub breaches: Vec<Breach>,
}

impl FeasibilityReport {
    fn from_breaches(breaches: Vec<Breach>) -> Self {
        let violation_mm = breaches.iter().map(|b| b.depth_mm).sum();
        Self { feasible: breaches.is_empty(), violation_mm, breaches }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mechanism {
    pub gears: Vec<PlacedGear>,
    pub feasibility: FeasibilityReport,
}

impl Mechanism {
    pub fn len(&self) -> usize {
        self.gears.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gears.is_empty()
    }

    pub fn is_feasible(&self) -> bool {
        self.feasibility.feasible
    }

    pub fn has_coaxial(&self) -> bool {
        self.gears.iter().any(|g| g.placement == Placement::Coaxial)
    }

    pub fn coaxial_count(&self) -> usize {
        self.gears.iter().filter(|g| g.placement == Placement::Coaxial).count()
    }

    pub fn linear_meshes(&self) -> usize {
        self.gears.iter().filter(|g| g.placement == Placement::Linear).count()
    }

    pub fn gear_ids(&self) -> Vec<u8> {
        self.gears.iter().map(|g| g.gear.id).collect()
    }

    /// The step list that rebuilds this mechanism. The first flag is
    /// reported as `Linear`.
    pub fn steps(&self) -> Vec<Step> {
        self.gears
            .iter()
            .map(|g| {
                let flag = match g.placement {
                    Placement::Coaxial => PlacementFlag::Coaxial,
                    _ => PlacementFlag::Linear,
                };
                Step::new(g.gear.id, flag)
            })
            .collect()
    }
}

/// Lays out a step list as a forward chain and checks it against `geometry`.
pub fn place_sequence(steps: &[Step], geometry: &GeometryConfig) -> Result<Mechanism> {
    if !(MIN_GEARS..=MAX_GEARS).contains(&steps.len()) {
        return Err(Error::InvalidGenome(alloc::format!(
            "mechanism needs {MIN_GEARS}..={MAX_GEARS} gears, got {}",
            steps.len()
        )));
    }
    let mut gears: Vec<PlacedGear> = Vec::with_capacity(steps.len());
    let mut next_axle = 0u32;
    for step in steps {
        let gear = geometry.catalog.get(step.gear_id)?;
        let placed = match gears.last() {
            None => {
                next_axle = 1;
                PlacedGear {
                    gear,
                    center_x_mm: gear.pitch_radius_mm,
                    plane: 0,
                    axle_id: 0,
                    placement: Placement::First,
                }
            }
            Some(prev) => match step.flag {
                PlacementFlag::Linear => {
                    let axle_id = next_axle;
                    next_axle += 1;
                    PlacedGear {
                        gear,
                        center_x_mm: prev.center_x_mm + prev.radius() + gear.pitch_radius_mm,
                        plane: prev.plane,
                        axle_id,
                        placement: Placement::Linear,
                    }
                }
                PlacementFlag::Coaxial => {
                    let mut plane = prev.plane + 1;
                    if let Some(limit) = geometry.plane_limit {
                        plane %= limit;
                    }
                    PlacedGear {
                        gear,
                        center_x_mm: prev.center_x_mm,
                        plane,
                        axle_id: prev.axle_id,
                        placement: Placement::Coaxial,
                    }
                }
            },
        };
        gears.push(placed);
    }
    let feasibility = check_feasibility(&gears, geometry.box_length_mm, geometry.axle_radius_mm);
    Ok(Mechanism { gears, feasibility })
}

/// True when gear `b` is the linear successor of gear `a` (or vice versa).
fn meshes(gears: &[PlacedGear], a: usize, b: usize) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    hi == lo + 1 && gears[hi].placement == Placement::Linear
}

/// Incremental feasibility check: each gear is tested against everything
/// placed before it, and each new axle against every earlier gear.
pub fn check_feasibility(
    gears: &[PlacedGear],
    box_length_mm: f64,
    axle_radius_mm: f64,
) -> FeasibilityReport {
    let mut breaches = Vec::new();
    // (axle_id, x, index of the gear that created it)
    let mut axles: Vec<(u32, f64, usize)> = Vec::new();

    for (k, g) in gears.iter().enumerate() {
        let r = g.radius();
        let left = g.center_x_mm - r;
        let right = g.center_x_mm + r;
        let exceed = if left < 0.0 { -left } else { 0.0 }
            + if right > box_length_mm { right - box_length_mm } else { 0.0 };
        if exceed > 0.0 {
            breaches.push(Breach { kind: BreachKind::OutOfBounds, depth_mm: exceed, gear: k, other: None });
        }

        for (j, h) in gears[..k].iter().enumerate() {
            if h.plane != g.plane || meshes(gears, j, k) {
                continue;
            }
            let short = h.radius() + r - (g.center_x_mm - h.center_x_mm).abs();
            if short > 0.0 {
                breaches.push(Breach { kind: BreachKind::DiscOverlap, depth_mm: short, gear: j, other: Some(k) });
            }
        }

        // gear k against axles that already exist
        let partner_axle = (g.placement == Placement::Linear).then(|| gears[k - 1].axle_id);
        for &(axle_id, x, _) in &axles {
            if axle_id == g.axle_id || Some(axle_id) == partner_axle {
                continue;
            }
            let short = r + axle_radius_mm - (g.center_x_mm - x).abs();
            if short > 0.0 {
                breaches.push(Breach { kind: BreachKind::AxleClash, depth_mm: short, gear: k, other: Some(axle_id as usize) });
            }
        }

        if g.placement != Placement::Coaxial {
            // earlier gears against the axle gear k introduces
            for (j, h) in gears[..k].iter().enumerate() {
                if h.axle_id == g.axle_id || meshes(gears, j, k) {
                    continue;
                }
                let short = h.radius() + axle_radius_mm - (g.center_x_mm - h.center_x_mm).abs();
                if short > 0.0 {
                    breaches.push(Breach {
                        kind: BreachKind::AxleClash,
                        depth_mm: short,
                        gear: j,
                        other: Some(g.axle_id as usize),
                    });
                }
            }
            axles.push((g.axle_id, g.center_x_mm, k));
        }
    }
    FeasibilityReport::from_breaches(breaches)
}

/// Output-axle angular speed per unit input-axle speed.
pub fn speed_ratio(mech: &Mechanism) -> f64 {
    mech.gears
        .windows(2)
        .filter(|w| w[1].placement == Placement::Linear)
        .map(|w| w[0].radius() / w[1].radius())
        .product()
}
