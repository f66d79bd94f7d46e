//! Post-hoc statistics over archives: structural diversity, coaxial usage,
//! distance-score dispersion and hidden-state patterns of RNN elites.
//!
//! Everything here is a pure function of stored archives.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::Placement;
use crate::novelty::{Archive, Encoding};
use crate::{Error, Result};

pub fn coaxial_count(archive: &Archive) -> Result<usize> {
    if archive.is_empty() {
        return Err(Error::Analysis("coaxial count needs a non-empty archive".into()));
    }
    Ok(archive.entries().iter().filter(|e| e.mechanism.has_coaxial()).count())
}

/// Mean pairwise Euclidean distance between archived novelty vectors.
pub fn diversity(archive: &Archive) -> Result<f64> {
    let v = archive.vectors();
    if v.len() < 2 {
        return Err(Error::Analysis("diversity needs at least two archive entries".into()));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            total += v[i].distance(&v[j]);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Mean and population standard deviation of scored entries.
pub fn score_dispersion(archive: &Archive) -> Result<(f64, f64)> {
    let scores: Vec<f64> = archive
        .entries()
        .iter()
        .filter_map(|e| e.distance.as_ref()?.score().map(|s| s.distance_in))
        .collect();
    if scores.len() < 2 {
        return Err(Error::Analysis(alloc::format!(
            "score dispersion needs at least two scored entries, found {}",
            scores.len()
        )));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    Ok((mean, libm::sqrt(var)))
}

/// One row of the per-mechanism score table (average with min/max bars).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    /// 1-based mechanism number.
    pub index: usize,
    pub generation: u32,
    pub avg_in: f64,
    pub min_in: f64,
    pub max_in: f64,
}

pub fn score_table(archive: &Archive) -> Vec<ScoreRow> {
    archive
        .entries()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let s = e.distance.as_ref()?.score()?;
            Some(ScoreRow { index: i + 1, generation: e.generation, avg_in: s.distance_in, min_in: s.min_in, max_in: s.max_in })
        })
        .collect()
}

/// True when consecutive radius changes are all non-zero and alternate in
/// sign over at least three gears.
pub fn is_alternating(radii: &[f64]) -> bool {
    if radii.len() < 3 {
        return false;
    }
    let diffs: Vec<f64> = radii.windows(2).map(|w| w[1] - w[0]).collect();
    diffs.iter().all(|d| *d != 0.0) && diffs.windows(2).all(|w| (w[0] > 0.0) != (w[1] > 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePattern {
    pub generation: u32,
    pub gears: Vec<(u8, Placement)>,
    /// Per step, one `+` or `-` per hidden unit.
    pub hidden_signs: Vec<String>,
    pub alternating: bool,
}

pub fn trace_summary(archive: &Archive) -> Result<Vec<TracePattern>> {
    if archive.encoding() != Some(Encoding::Rnn) {
        return Err(Error::Analysis("activation traces are only available for rnn archives".into()));
    }
    archive
        .entries()
        .iter()
        .map(|e| {
            let trace = e
                .trace
                .as_ref()
                .ok_or_else(|| Error::Analysis(alloc::format!("generation {} has no stored trace", e.generation)))?;
            let hidden_signs = trace
                .steps
                .iter()
                .map(|s| s.hidden.iter().map(|h| if *h >= 0.0 { '+' } else { '-' }).collect())
                .collect();
            let radii: Vec<f64> = e.mechanism.gears.iter().map(|g| g.radius()).collect();
            Ok(TracePattern {
                generation: e.generation,
                gears: e.mechanism.gears.iter().map(|g| (g.gear.id, g.placement)).collect(),
                hidden_signs,
                alternating: is_alternating(&radii),
            })
        })
        .collect()
}

/// A labelled archive handed to [`compare`].
#[derive(Debug, Clone, Copy)]
pub struct RunInput<'a> {
    pub label: &'a str,
    pub seed: u64,
    pub archive: &'a Archive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub encoding: Encoding,
    pub seed: u64,
    pub archive_size: usize,
    pub coaxial_mechanisms: usize,
    pub diversity: f64,
    pub score_mean_in: Option<f64>,
    pub score_std_in: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingSummary {
    pub encoding: Encoding,
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub mean_archive_size: f64,
    pub mean_coaxial_mechanisms: f64,
    pub mean_diversity: f64,
    pub mean_score_std_in: Option<f64>,
}

/// Head-to-head result for one seed that has both an rnn and a direct run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedVerdict {
    pub seed: u64,
    pub rnn_diversity: f64,
    pub direct_diversity: f64,
    pub rnn_coaxial: usize,
    pub direct_coaxial: usize,
    pub rnn_more_diverse: bool,
    pub rnn_at_least_as_coaxial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub runs: Vec<RunSummary>,
    pub encodings: Vec<EncodingSummary>,
    pub verdicts: Vec<SeedVerdict>,
    /// Seed pairs where the rnn archive was strictly more diverse.
    pub rnn_more_diverse_pairs: usize,
    /// Seed pairs where the rnn archive had at least as many coaxial mechanisms.
    pub rnn_coaxial_pairs: usize,
    pub majority_more_diverse: bool,
    pub majority_coaxial: bool,
}

fn summarize(run: &RunInput<'_>) -> Result<RunSummary> {
    let encoding = run
        .archive
        .encoding()
        .ok_or_else(|| Error::Analysis(alloc::format!("run `{}` has an empty archive", run.label)))?;
    let (score_mean_in, score_std_in) = match score_dispersion(run.archive) {
        Ok((m, s)) => (Some(m), Some(s)),
        Err(_) => (None, None),
    };
    Ok(RunSummary {
        label: run.label.into(),
        encoding,
        seed: run.seed,
        archive_size: run.archive.len(),
        coaxial_mechanisms: coaxial_count(run.archive)?,
        diversity: diversity(run.archive)?,
        score_mean_in,
        score_std_in,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = values.fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| s / n as f64)
}

/// Summarises every run, groups by encoding, and pairs rnn/direct runs by
/// seed. When a seed has several runs of one encoding, the first is used.
pub fn compare(runs: &[RunInput<'_>]) -> Result<ComparisonReport> {
    if runs.len() < 2 {
        return Err(Error::Analysis("comparison needs at least two archives".into()));
    }
    let summaries = runs.iter().map(summarize).collect::<Result<Vec<_>>>()?;

    let mut encodings = Vec::new();
    for enc in [Encoding::Rnn, Encoding::Direct] {
        let group: Vec<&RunSummary> = summaries.iter().filter(|s| s.encoding == enc).collect();
        if group.is_empty() {
            continue;
        }
        encodings.push(EncodingSummary {
            encoding: enc,
            runs: group.len(),
            seeds: group.iter().map(|s| s.seed).collect(),
            mean_archive_size: mean(group.iter().map(|s| s.archive_size as f64)).unwrap_or(0.0),
            mean_coaxial_mechanisms: mean(group.iter().map(|s| s.coaxial_mechanisms as f64)).unwrap_or(0.0),
            mean_diversity: mean(group.iter().map(|s| s.diversity)).unwrap_or(0.0),
            mean_score_std_in: mean(group.iter().filter_map(|s| s.score_std_in)),
        });
    }

    let mut by_seed: BTreeMap<u64, (Option<&RunSummary>, Option<&RunSummary>)> = BTreeMap::new();
    for s in &summaries {
        let slot = by_seed.entry(s.seed).or_default();
        match s.encoding {
            Encoding::Rnn => slot.0 = slot.0.or(Some(s)),
            Encoding::Direct => slot.1 = slot.1.or(Some(s)),
        }
    }
    let verdicts: Vec<SeedVerdict> = by_seed
        .into_iter()
        .filter_map(|(seed, pair)| match pair {
            (Some(r), Some(d)) => Some(SeedVerdict {
                seed,
                rnn_diversity: r.diversity,
                direct_diversity: d.diversity,
                rnn_coaxial: r.coaxial_mechanisms,
                direct_coaxial: d.coaxial_mechanisms,
                rnn_more_diverse: r.diversity > d.diversity,
                rnn_at_least_as_coaxial: r.coaxial_mechanisms >= d.coaxial_mechanisms,
            }),
            _ => None,
        })
        .collect();

    let rnn_more_diverse_pairs = verdicts.iter().filter(|v| v.rnn_more_diverse).count();
    let rnn_coaxial_pairs = verdicts.iter().filter(|v| v.rnn_at_least_as_coaxial).count();
    let majority = |k: usize| !verdicts.is_empty() && 2 * k > verdicts.len();
    Ok(ComparisonReport {
        majority_more_diverse: majority(rnn_more_diverse_pairs),
        majority_coaxial: majority(rnn_coaxial_pairs),
        runs: summaries,
        encodings,
        verdicts,
        rnn_more_diverse_pairs,
        rnn_coaxial_pairs,
    })
}
