//! On-disk archive format: JSON Lines, one self-describing record per
//! generation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mechsynth_core::geometry::{Breach, FeasibilityReport, GearType, Mechanism, PlacedGear, Placement, Step};
use mechsynth_core::novelty::{Archive, ArchiveEntry, DistanceAnnotation, Encoding, GenomePayload, NoveltyVector};
use mechsynth_core::rnn::ActivationTrace;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}:{line}: schema version {found} does not match supported version {expected}")]
    VersionMismatch { path: PathBuf, line: usize, found: u32, expected: u32 },
    #[error("{path}:{line}: {message}")]
    Inconsistent { path: PathBuf, line: usize, message: String },
    #[error("{path}: archive is empty")]
    Empty { path: PathBuf },
    #[error(transparent)]
    Core(#[from] mechsynth_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GearRecord {
    pub gear_id: u8,
    pub radius_mm: f64,
    pub center_x_mm: f64,
    pub plane: u32,
    pub axle_id: u32,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismRecord {
    pub gears: Vec<GearRecord>,
    pub box_length_mm: f64,
    pub axle_radius_mm: f64,
    pub feasible: bool,
    pub violation_mm: f64,
    pub breaches: Vec<Breach>,
}

impl MechanismRecord {
    pub fn new(mech: &Mechanism, box_length_mm: f64, axle_radius_mm: f64) -> Self {
        Self {
            gears: mech
                .gears
                .iter()
                .map(|g| GearRecord {
                    gear_id: g.gear.id,
                    radius_mm: g.gear.pitch_radius_mm,
                    center_x_mm: g.center_x_mm,
                    plane: g.plane,
                    axle_id: g.axle_id,
                    placement: g.placement,
                })
                .collect(),
            box_length_mm,
            axle_radius_mm,
            feasible: mech.feasibility.feasible,
            violation_mm: mech.feasibility.violation_mm,
            breaches: mech.feasibility.breaches.clone(),
        }
    }

    pub fn to_mechanism(&self) -> Mechanism {
        Mechanism {
            gears: self
                .gears
                .iter()
                .map(|g| PlacedGear {
                    gear: GearType { id: g.gear_id, pitch_radius_mm: g.radius_mm },
                    center_x_mm: g.center_x_mm,
                    plane: g.plane,
                    axle_id: g.axle_id,
                    placement: g.placement,
                })
                .collect(),
            feasibility: FeasibilityReport {
                feasible: self.feasible,
                violation_mm: self.violation_mm,
                breaches: self.breaches.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    pub schema_version: u32,
    pub encoding: Encoding,
    pub seed: u64,
    pub generation: u32,
    pub genome: GenomePayload,
    pub steps: Vec<Step>,
    pub mechanism: MechanismRecord,
    pub novelty_vector: NoveltyVector,
    pub novelty_score: f64,
    pub fitness: f64,
    #[serde(default)]
    pub distance: Option<DistanceAnnotation>,
    #[serde(default)]
    pub trace: Option<ActivationTrace>,
}

impl ArchiveRecord {
    pub fn from_entry(entry: &ArchiveEntry, seed: u64, box_length_mm: f64, axle_radius_mm: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            encoding: entry.genome.encoding(),
            seed,
            generation: entry.generation,
            genome: entry.genome.clone(),
            steps: entry.steps.clone(),
            mechanism: MechanismRecord::new(&entry.mechanism, box_length_mm, axle_radius_mm),
            novelty_vector: entry.novelty_vector,
            novelty_score: entry.novelty_score,
            fitness: entry.fitness,
            distance: entry.distance.clone(),
            trace: entry.trace.clone(),
        }
    }

    pub fn to_entry(&self) -> ArchiveEntry {
        ArchiveEntry {
            generation: self.generation,
            genome: self.genome.clone(),
            steps: self.steps.clone(),
            mechanism: self.mechanism.to_mechanism(),
            novelty_vector: self.novelty_vector,
            novelty_score: self.novelty_score,
            fitness: self.fitness,
            trace: self.trace.clone(),
            distance: self.distance.clone(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("archive records always serialize")
    }
}

/// A whole archive file: records in generation order from a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveFile {
    pub records: Vec<ArchiveRecord>,
}

impl ArchiveFile {
    pub fn from_archive(archive: &Archive, seed: u64, box_length_mm: f64, axle_radius_mm: f64) -> Self {
        Self {
            records: archive
                .entries()
                .iter()
                .map(|e| ArchiveRecord::from_entry(e, seed, box_length_mm, axle_radius_mm))
                .collect(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.records[0].seed
    }

    pub fn encoding(&self) -> Encoding {
        self.records[0].encoding
    }

    pub fn to_archive(&self) -> Result<Archive, mechsynth_core::Error> {
        Archive::from_entries(self.records.iter().map(ArchiveRecord::to_entry).collect())
    }

    /// Copies annotations from `archive` back onto the records.
    pub fn with_annotations(&self, archive: &Archive) -> Self {
        let mut out = self.clone();
        for (r, e) in out.records.iter_mut().zip(archive.entries()) {
            r.distance = e.distance.clone();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_line());
            s.push('\n');
        }
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, RecordError> {
        let mut records: Vec<ArchiveRecord> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(line)
                .map_err(|source| RecordError::Parse { path: path.into(), line: line_no, source })?;
            let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
            if found != SCHEMA_VERSION {
                return Err(RecordError::VersionMismatch {
                    path: path.into(),
                    line: line_no,
                    found,
                    expected: SCHEMA_VERSION,
                });
            }
            let record: ArchiveRecord = serde_json::from_value(value)
                .map_err(|source| RecordError::Parse { path: path.into(), line: line_no, source })?;
            let inconsistent = |message: String| RecordError::Inconsistent { path: path.into(), line: line_no, message };
            if record.genome.encoding() != record.encoding {
                return Err(inconsistent(format!(
                    "record says encoding {} but carries a {} genome",
                    record.encoding,
                    record.genome.encoding()
                )));
            }
            if let Some(first) = records.first() {
                if record.seed != first.seed || record.encoding != first.encoding {
                    return Err(inconsistent("records from different runs are mixed in one archive".into()));
                }
            }
            if record.generation as usize != records.len() {
                return Err(inconsistent(format!(
                    "expected generation {}, found {}",
                    records.len(),
                    record.generation
                )));
            }
            records.push(record);
        }
        if records.is_empty() {
            return Err(RecordError::Empty { path: path.into() });
        }
        Ok(Self { records })
    }

    pub fn load(path: &Path) -> Result<Self, RecordError> {
        let text = fs::read_to_string(path).map_err(|source| RecordError::Io { path: path.into(), source })?;
        Self::parse(path, &text)
    }

    /// Writes the whole file to a sibling temp file and renames it into place,
    /// so readers never observe a partially written record.
    pub fn save(&self, path: &Path) -> Result<(), RecordError> {
        write_atomic(path, self.to_text().as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RecordError> {
    let io = |source| RecordError::Io { path: path.into(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mechsynth_core::evolution::{evolve, EvolutionConfig};

    fn sample(encoding: Encoding) -> ArchiveFile {
        let cfg = EvolutionConfig { encoding, pop_size: 10, generations: 4, seed: 3, ..EvolutionConfig::default() };
        let (archive, _) = evolve(&cfg).unwrap();
        ArchiveFile::from_archive(&archive, 3, 150.0, 2.5)
    }

    #[test]
    fn text_round_trip() {
        for enc in [Encoding::Rnn, Encoding::Direct] {
            let file = sample(enc);
            let parsed = ArchiveFile::parse(Path::new("x"), &file.to_text()).unwrap();
            assert_eq!(parsed, file);
            assert_eq!(parsed.to_archive().unwrap().len(), 4);
        }
    }

    #[test]
    fn version_mismatch_is_reported() {
        let text = sample(Encoding::Direct).to_text().replacen("\"schema_version\":1", "\"schema_version\":9", 1);
        assert!(matches!(
            ArchiveFile::parse(Path::new("x"), &text),
            Err(RecordError::VersionMismatch { found: 9, line: 1, .. })
        ));
    }

    #[test]
    fn mixed_runs_are_rejected() {
        let a = sample(Encoding::Direct).to_text();
        let b = sample(Encoding::Rnn).to_text();
        let mut lines: Vec<&str> = a.lines().take(2).collect();
        lines.extend(b.lines().skip(2));
        assert!(matches!(
            ArchiveFile::parse(Path::new("x"), &lines.join("\n")),
            Err(RecordError::Inconsistent { line: 3, .. })
        ));
    }

    #[test]
    fn gaps_are_rejected() {
        let text = sample(Encoding::Direct).to_text();
        let lines: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 1).map(|(_, l)| l).collect();
        assert!(ArchiveFile::parse(Path::new("x"), &lines.join("\n")).is_err());
        assert!(matches!(ArchiveFile::parse(Path::new("x"), ""), Err(RecordError::Empty { .. })));
    }
}
