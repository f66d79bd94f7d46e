//! TOML configuration files for evolution runs and the surrogate rig.
//!
//! Every field is optional on input. The echoed copy written next to a run's
//! archive lists every effective value, so the run can be reproduced from
//! its output directory alone.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mechsynth_core::evolution::EvolutionConfig;
use mechsynth_core::surrogate::RigModel;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_evolution(path: &Path) -> Result<EvolutionConfig> {
    let cfg: EvolutionConfig = load(path)?;
    cfg.validate().with_context(|| format!("invalid config {}", path.display()))?;
    Ok(cfg)
}

pub fn load_rig(path: &Path) -> Result<RigModel> {
    let rig: RigModel = load(path)?;
    rig.validate().with_context(|| format!("invalid rig {}", path.display()))?;
    Ok(rig)
}

fn echo<T: Serialize>(value: &T, header: &str) -> String {
    let body = toml::to_string(value).expect("configs always serialize to TOML");
    format!("{header}\n{body}")
}

/// The effective configuration as TOML. An unset `plane_limit` cannot be
/// written in TOML, so the header notes it.
pub fn echo_evolution(cfg: &EvolutionConfig) -> String {
    let mut header = String::from("# effective configuration, all defaults resolved");
    if cfg.geometry.plane_limit.is_none() {
        header.push_str("\n# geometry.plane_limit is unset: coaxial planes are unbounded");
    }
    echo(cfg, &header)
}

pub fn echo_rig(rig: &RigModel) -> String {
    echo(rig, "# effective rig model")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mechsynth_core::genome::Encoding;

    #[test]
    fn echo_round_trips() {
        let mut cfg = EvolutionConfig { encoding: Encoding::Direct, seed: 99, ..EvolutionConfig::default() };
        let back: EvolutionConfig = toml::from_str(&echo_evolution(&cfg)).unwrap();
        assert_eq!(back, cfg);
        cfg.geometry.plane_limit = Some(2);
        let text = echo_evolution(&cfg);
        assert!(!text.contains("unbounded"));
        assert_eq!(toml::from_str::<EvolutionConfig>(&text).unwrap(), cfg);
        let rig = RigModel::default();
        assert_eq!(toml::from_str::<RigModel>(&echo_rig(&rig)).unwrap(), rig);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "pop_size = 20\n[variation]\nrnn_mutation_sigma = 0.3\n").unwrap();
        let cfg = load_evolution(&path).unwrap();
        assert_eq!(cfg.pop_size, 20);
        assert_eq!(cfg.variation.rnn_mutation_sigma, 0.3);
        assert_eq!(cfg.variation.rnn_mutation_rate, 0.1);
        assert_eq!(cfg.generations, 40);
    }

    #[test]
    fn bad_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "pop_sise = 20\n").unwrap();
        assert!(load_evolution(&path).is_err());
        fs::write(&path, "pop_size = 1\n").unwrap();
        assert!(load_evolution(&path).is_err());
        fs::write(&path, "spool_radius_mm = -1.0\n").unwrap();
        assert!(load_rig(&path).is_err());
    }
}
