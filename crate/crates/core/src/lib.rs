//! Generative design of gear mechanisms.
//!
//! A mechanism is a forward chain of two to six gears drawn from a six-size
//! catalog, each placed either side-by-side with its predecessor (linear) or
//! on the predecessor's axle one plane further back (coaxial). Two genome
//! representations produce such chains:
//!
//! * [`rnn::RnnGenome`], a fixed-topology recurrent network that is run step by
//!   step and emits one gear per step (the indirect encoding), and
//! * [`direct::DirectGenome`], an explicit gene list (the baseline).
//!
//! Both are evolved by [`evolution::evolve`] under a novelty objective with
//! constraint-penalised fitness ([`novelty`]). Archived elites can be scored
//! by a kinematic stand-in for a physical pull test ([`surrogate`]) and
//! summarised across runs ([`analysis`]).
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod direct;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod geometry;
pub mod novelty;
pub mod rng;
pub mod rnn;
pub mod surrogate;

pub use error::Error;
pub use geometry::{
    GearCatalog, GeometryConfig, Mechanism, PlacedGear, Placement, PlacementFlag, Step,
};
pub use novelty::{Archive, ArchiveEntry, GenomePayload, NoveltyVector};

pub type Result<T, E = Error> = core::result::Result<T, E>;
