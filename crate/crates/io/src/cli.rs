//! Command-line verbs: `evolve`, `render`, `score` and `compare`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mechsynth_core::analysis::{compare, score_table, trace_summary, RunInput};
use mechsynth_core::evolution::{evolve, EvolutionConfig};
use mechsynth_core::genome::Encoding;
use mechsynth_core::surrogate::{attach_scores, import_measurements, RigModel};
use mechsynth_core::Archive;

use crate::config::{echo_evolution, load_evolution, load_rig};
use crate::import::load_measurements;
use crate::record::{write_atomic, ArchiveFile};
use crate::report::{comparison_text, scores_csv, CompareOutput, RunScores, RunTraces};
use crate::svg::render_mechanism;

pub const ARCHIVE_FILE: &str = "archive.jsonl";
pub const SCORED_ARCHIVE_FILE: &str = "archive.scored.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Parser)]
#[command(name = "mechsynth", version, about = "Evolve, render, score and compare gear mechanisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run novelty search and write archive.jsonl, report.json and config.toml into DIR.
    Evolve(EvolveArgs),
    /// Draw one archived mechanism as SVG.
    Render(RenderArgs),
    /// Annotate a copy of an archive with surrogate or measured distance scores.
    Score(ScoreArgs),
    /// Compare two or more runs.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_parser = parse_encoding)]
    pub encoding: Encoding,
    /// TOML file; missing fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub archive: PathBuf,
    /// Generation number of the entry to draw.
    #[arg(long)]
    pub entry: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub archive: PathBuf,
    /// TOML rig model for the surrogate; defaults apply when omitted.
    #[arg(long, conflicts_with = "import")]
    pub rig: Option<PathBuf>,
    /// CSV of measured trials (`generation,trial1_in,trial2_in,trial3_in`).
    #[arg(long)]
    pub import: Option<PathBuf>,
    /// Output archive; defaults to `<stem>.scored.jsonl` beside the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Run directories or archive files. A directory contributes its scored
    /// archive when one exists, otherwise its plain archive.
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    /// Output prefix; writes PREFIX.txt, PREFIX.json and PREFIX.scores.csv.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_encoding(s: &str) -> Result<Encoding, String> {
    s.parse().map_err(|e: mechsynth_core::Error| e.to_string())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(a) => cmd_evolve(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Score(a) => cmd_score(&a),
        Command::Compare(a) => cmd_compare(&a),
    }
}

pub fn effective_config(args: &EvolveArgs) -> Result<EvolutionConfig> {
    let mut cfg = match &args.config {
        Some(p) => load_evolution(p)?,
        None => EvolutionConfig::default(),
    };
    cfg.encoding = args.encoding;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_evolve(args: &EvolveArgs) -> Result<()> {
    let cfg = effective_config(args)?;
    let (archive, report) = evolve(&cfg)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let file = ArchiveFile::from_archive(&archive, cfg.seed, cfg.geometry.box_length_mm, cfg.geometry.axle_radius_mm);
    write_atomic(&args.out.join(CONFIG_FILE), echo_evolution(&cfg).as_bytes())?;
    let mut report_json = serde_json::to_string_pretty(&report)?;
    report_json.push('\n');
    write_atomic(&args.out.join(REPORT_FILE), report_json.as_bytes())?;
    file.save(&args.out.join(ARCHIVE_FILE))?;
    let coaxial = archive.entries().iter().filter(|e| e.mechanism.has_coaxial()).count();
    println!(
        "{} run, seed {}: {} archive entries ({} with coaxial gears) in {}",
        cfg.encoding,
        cfg.seed,
        archive.len(),
        coaxial,
        args.out.display()
    );
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<()> {
    let file = ArchiveFile::load(&args.archive)?;
    let Some(record) = file.records.iter().find(|r| r.generation == args.entry) else {
        bail!(
            "{} has no entry {} (generations 0..{})",
            args.archive.display(),
            args.entry,
            file.records.len()
        );
    };
    let title = format!("{} seed {} generation {}", record.encoding, record.seed, record.generation);
    write_atomic(&args.out, render_mechanism(&record.mechanism, &title).as_bytes())?;
    Ok(())
}

pub fn default_scored_path(archive: &Path) -> PathBuf {
    let stem = archive.file_stem().map_or_else(|| OsString::from("archive"), OsString::from);
    let mut name = stem;
    name.push(".scored.jsonl");
    archive.with_file_name(name)
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let out = args.out.clone().unwrap_or_else(|| default_scored_path(&args.archive));
    if fs::canonicalize(&out).ok() == fs::canonicalize(&args.archive).ok() && out.exists() {
        bail!("refusing to overwrite the input archive {}", args.archive.display());
    }
    let file = ArchiveFile::load(&args.archive)?;
    let archive = file.to_archive()?;
    let (scored, what) = match &args.import {
        Some(csv) => {
            let rows = load_measurements(csv)?;
            let scored = import_measurements(&archive, &rows).map_err(|e| match e {
                mechsynth_core::Error::UnknownGenerations(g) => anyhow::anyhow!(
                    "{} references generations not in {}: {}",
                    csv.display(),
                    args.archive.display(),
                    g.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
                ),
                other => other.into(),
            })?;
            (scored, format!("{} measured rows", rows.len()))
        }
        None => {
            let rig = match &args.rig {
                Some(p) => load_rig(p)?,
                None => RigModel::default(),
            };
            (attach_scores(&archive, &rig), format!("surrogate scores for {} entries", archive.len()))
        }
    };
    file.with_annotations(&scored).save(&out)?;
    println!("wrote {what} to {}", out.display());
    Ok(())
}

pub fn resolve_archive(path: &Path) -> PathBuf {
    if path.is_dir() {
        let scored = path.join(SCORED_ARCHIVE_FILE);
        if scored.is_file() {
            scored
        } else {
            path.join(ARCHIVE_FILE)
        }
    } else {
        path.to_path_buf()
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn build_comparison(paths: &[PathBuf]) -> Result<CompareOutput> {
    if paths.len() < 2 {
        bail!("compare needs at least two runs, got {}", paths.len());
    }
    let mut loaded: Vec<(String, u64, Archive)> = Vec::new();
    for p in paths {
        let file = ArchiveFile::load(&resolve_archive(p))?;
        loaded.push((p.display().to_string(), file.seed(), file.to_archive()?));
    }
    let inputs: Vec<RunInput<'_>> =
        loaded.iter().map(|(label, seed, archive)| RunInput { label, seed: *seed, archive }).collect();
    let comparison = compare(&inputs)?;
    let mut traces = Vec::new();
    for (label, _, archive) in &loaded {
        if archive.encoding() == Some(Encoding::Rnn) {
            traces.push(RunTraces { label: label.clone(), patterns: trace_summary(archive)? });
        }
    }
    let scores = loaded
        .iter()
        .map(|(label, _, archive)| RunScores { label: label.clone(), rows: score_table(archive) })
        .collect();
    Ok(CompareOutput { comparison, traces, scores })
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let out = build_comparison(&args.runs)?;
    let text = comparison_text(&out);
    let mut json = serde_json::to_string_pretty(&out)?;
    json.push('\n');
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(&with_suffix(&args.out, ".txt"), text.as_bytes())?;
    write_atomic(&with_suffix(&args.out, ".json"), json.as_bytes())?;
    write_atomic(&with_suffix(&args.out, ".scores.csv"), scores_csv(&out.scores).as_bytes())?;
    print!("{text}");
    Ok(())
}
