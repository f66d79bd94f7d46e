use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid genome: {0}")]
    InvalidGenome(String),
    #[error("unknown gear id {0} (catalog ids are 1..=6)")]
    UnknownGear(u8),
    #[error("invalid gear catalog: {0}")]
    InvalidCatalog(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("archive already holds an entry for generation {generation} (expected generation {expected})")]
    ArchiveOrder { generation: u32, expected: u32 },
    #[error("mechanism is infeasible (violation {violation_mm} mm); it cannot be evaluated on the rig")]
    Infeasible { violation_mm: f64 },
    #[error("score import references generations not in the archive: {0:?}")]
    UnknownGenerations(Vec<u32>),
    #[error("{0}")]
    Analysis(String),
}
