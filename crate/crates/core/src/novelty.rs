//! Novelty vectors, novelty scores, constraint-aware fitness and the elite
//! archive.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{FeasibilityReport, Mechanism, Step};
use crate::rnn::ActivationTrace;
use crate::{Error, Result};

pub use crate::genome::{Encoding, GenomePayload};

pub const FEATURES: usize = 6;

/// Structural descriptor of a mechanism:
/// `[var(x), mean(ratio), var(ratio), mean(radius), var(radius), gear count]`.
///
/// Variances are population variances. Ratios are `r[t] / r[t-1]` over every
/// consecutive pair, coaxial pairs included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NoveltyVector(pub [f64; FEATURES]);

impl NoveltyVector {
    pub fn distance(&self, other: &Self) -> f64 {
        let sq: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum();
        libm::sqrt(sq)
    }
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var)
}

pub fn novelty_vector(mech: &Mechanism) -> NoveltyVector {
    let gears = &mech.gears;
    let (_, var_x) = mean_var(gears.iter().map(|g| g.center_x_mm));
    let (mean_ratio, var_ratio) = mean_var(gears.windows(2).map(|w| w[1].radius() / w[0].radius()));
    let (mean_r, var_r) = mean_var(gears.iter().map(|g| g.radius()));
    NoveltyVector([var_x, mean_ratio, var_ratio, mean_r, var_r, gears.len() as f64])
}

/// Per-feature z-scaling fitted on a reference set. Features with zero spread
/// are left unscaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScaler {
    mean: [f64; FEATURES],
    scale: [f64; FEATURES],
}

impl FeatureScaler {
    pub fn fit<'a>(vectors: impl Iterator<Item = &'a NoveltyVector> + Clone) -> Self {
        let mut mean = [0.0; FEATURES];
        let mut scale = [1.0; FEATURES];
        for f in 0..FEATURES {
            let (m, v) = mean_var(vectors.clone().map(|nv| nv.0[f]));
            mean[f] = m;
            let sd = libm::sqrt(v);
            if sd > 0.0 {
                scale[f] = sd;
            }
        }
        Self { mean, scale }
    }

    pub fn apply(&self, v: &NoveltyVector) -> NoveltyVector {
        NoveltyVector(core::array::from_fn(|f| (v.0[f] - self.mean[f]) / self.scale[f]))
    }
}

/// Minimum distance to the archive, or to the other population members when
/// the archive is still empty.
pub fn novelty_score(
    v: &NoveltyVector,
    archive: &[NoveltyVector],
    population: &[NoveltyVector],
    own_index: usize,
) -> f64 {
    let nearest = |it: &mut dyn Iterator<Item = &NoveltyVector>| {
        it.map(|o| v.distance(o)).fold(f64::INFINITY, f64::min)
    };
    let d = if archive.is_empty() {
        nearest(&mut population.iter().enumerate().filter(|(i, _)| *i != own_index).map(|(_, o)| o))
    } else {
        nearest(&mut archive.iter())
    };
    if d.is_finite() { d } else { 0.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub novelty: f64,
    pub fitness: f64,
}

/// Novelty for everyone; fitness is the novelty for feasible individuals and
/// the negated violation for infeasible ones, so every infeasible individual
/// ranks below every feasible one.
pub fn assign_fitness(
    population: &[(NoveltyVector, &FeasibilityReport)],
    archive: &[NoveltyVector],
    normalize: bool,
) -> Vec<Scored> {
    let mut pop: Vec<NoveltyVector> = population.iter().map(|(v, _)| *v).collect();
    let mut arch: Vec<NoveltyVector> = archive.to_vec();
    if normalize {
        let scaler = FeatureScaler::fit(arch.iter().chain(pop.iter()));
        pop.iter_mut().for_each(|v| *v = scaler.apply(v));
        arch.iter_mut().for_each(|v| *v = scaler.apply(v));
    }
    population
        .iter()
        .enumerate()
        .map(|(i, (_, report))| {
            let novelty = novelty_score(&pop[i], &arch, &pop, i);
            let fitness = if report.feasible { novelty } else { -report.violation_mm };
            Scored { novelty, fitness }
        })
        .collect()
}

/// Index of the highest fitness; ties go to the lowest index.
pub fn best_index(fitness: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &f) in fitness.iter().enumerate() {
        match best {
            Some(b) if fitness[b] >= f => {}
            _ => best = Some(i),
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreSource {
    Surrogate,
    Measured,
}

/// A distance score in inches. `distance_in` is the mean of the trials; min
/// and max give the error bars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceScore {
    pub distance_in: f64,
    pub min_in: f64,
    pub max_in: f64,
    pub trials_in: Vec<f64>,
    pub source: ScoreSource,
}

impl DistanceScore {
    pub fn single(distance_in: f64, source: ScoreSource) -> Self {
        Self { distance_in, min_in: distance_in, max_in: distance_in, trials_in: alloc::vec![distance_in], source }
    }

    /// Mean, min and max over repeated trials.
    pub fn from_trials(trials_in: Vec<f64>, source: ScoreSource) -> Result<Self> {
        if trials_in.is_empty() || trials_in.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Analysis("trials must be non-empty, finite and non-negative".into()));
        }
        let n = trials_in.len() as f64;
        let distance_in = trials_in.iter().sum::<f64>() / n;
        let min_in = trials_in.iter().copied().fold(f64::INFINITY, f64::min);
        let max_in = trials_in.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { distance_in, min_in, max_in, trials_in, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum DistanceAnnotation {
    /// The mechanism could not be built, so it has no score.
    Unscored,
    Scored(DistanceScore),
}

impl DistanceAnnotation {
    pub fn score(&self) -> Option<&DistanceScore> {
        match self {
            Self::Scored(s) => Some(s),
            Self::Unscored => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub generation: u32,
    pub genome: GenomePayload,
    pub steps: Vec<Step>,
    pub mechanism: Mechanism,
    pub novelty_vector: NoveltyVector,
    pub novelty_score: f64,
    pub fitness: f64,
    pub trace: Option<ActivationTrace>,
    pub distance: Option<DistanceAnnotation>,
}

/// Append-only elite store, one entry per completed generation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds an archive from stored entries, checking generation order.
    pub fn from_entries(entries: Vec<ArchiveEntry>) -> Result<Self> {
        let mut archive = Self::new();
        for e in entries {
            archive.append(e)?;
        }
        Ok(archive)
    }

    /// Appends the elite of the next generation. The entry's generation must
    /// equal the number of entries already present.
    pub fn append(&mut self, entry: ArchiveEntry) -> Result<()> {
        let expected = self.entries.len() as u32;
        if entry.generation != expected {
            return Err(Error::ArchiveOrder { generation: entry.generation, expected });
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, generation: u32) -> Option<&ArchiveEntry> {
        self.entries.get(generation as usize)
    }

    pub fn vectors(&self) -> Vec<NoveltyVector> {
        self.entries.iter().map(|e| e.novelty_vector).collect()
    }

    pub fn encoding(&self) -> Option<Encoding> {
        self.entries.first().map(|e| e.genome.encoding())
    }

    /// Sets or replaces the distance annotation of one entry. Nothing else
    /// about an entry can change after it is appended.
    pub fn annotate(&mut self, generation: u32, annotation: DistanceAnnotation) -> Result<()> {
        let entry = self
            .entries
            .get_mut(generation as usize)
            .ok_or_else(|| Error::Analysis(alloc::format!("archive has no generation {generation}")))?;
        entry.distance = Some(annotation);
        Ok(())
    }
}
