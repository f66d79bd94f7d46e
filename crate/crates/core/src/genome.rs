//! Common interface over the two genome representations.
//!
//! The evolution driver is generic over [`Genome`]; everything downstream of
//! [`Genome::express`] (placement, feasibility, novelty, selection,
//! archiving) is shared.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::direct::{self, DirectGenome, DirectRates};
use crate::geometry::Step;
use crate::rnn::{self, ActivationTrace, RnnGenome};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Rnn,
    Direct,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rnn => "rnn",
            Self::Direct => "direct",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "rnn" => Ok(Self::Rnn),
            "direct" => Ok(Self::Direct),
            other => Err(Error::Config(alloc::format!("unknown encoding `{other}` (expected rnn or direct)"))),
        }
    }
}

/// Result of expressing a genome: the placement steps, plus the network
/// activations when the genome is an RNN.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    pub steps: Vec<Step>,
    pub trace: Option<ActivationTrace>,
}

/// Variation parameters handed to genome operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationParams {
    pub rnn_mutation_rate: f64,
    pub rnn_mutation_sigma: f64,
    pub direct: DirectRates,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self { rnn_mutation_rate: 0.1, rnn_mutation_sigma: 0.1, direct: DirectRates::default() }
    }
}

pub trait Genome: Clone {
    const ENCODING: Encoding;

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn express(&self) -> Expression;
    fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> (Self, Self);
    fn mutate<R: Rng + ?Sized>(&self, rng: &mut R, params: &VariationParams) -> Self;
    fn payload(&self) -> GenomePayload;
}

impl Genome for RnnGenome {
    const ENCODING: Encoding = Encoding::Rnn;

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        RnnGenome::random(rng)
    }

    fn express(&self) -> Expression {
        let (steps, trace) = rnn::decode(self);
        Expression { steps, trace: Some(trace) }
    }

    fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> (Self, Self) {
        crate::evolution::crossover_rnn(self, other, rng)
    }

    fn mutate<R: Rng + ?Sized>(&self, rng: &mut R, params: &VariationParams) -> Self {
        crate::evolution::mutate_rnn(self, rng, params.rnn_mutation_rate, params.rnn_mutation_sigma)
    }

    fn payload(&self) -> GenomePayload {
        GenomePayload::Rnn(self.clone())
    }
}

impl Genome for DirectGenome {
    const ENCODING: Encoding = Encoding::Direct;

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        direct::random_direct(rng)
    }

    fn express(&self) -> Expression {
        Expression { steps: direct::decode_direct(self), trace: None }
    }

    fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> (Self, Self) {
        direct::crossover_direct(self, other, rng)
    }

    fn mutate<R: Rng + ?Sized>(&self, rng: &mut R, params: &VariationParams) -> Self {
        direct::mutate_direct(self, rng, &params.direct)
    }

    fn payload(&self) -> GenomePayload {
        GenomePayload::Direct(self.clone())
    }
}

/// A genome snapshot of either kind, as stored in the archive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genes", rename_all = "lowercase")]
pub enum GenomePayload {
    Rnn(RnnGenome),
    Direct(DirectGenome),
}

impl GenomePayload {
    pub fn encoding(&self) -> Encoding {
        match self {
            Self::Rnn(_) => Encoding::Rnn,
            Self::Direct(_) => Encoding::Direct,
        }
    }

    pub fn express(&self) -> Expression {
        match self {
            Self::Rnn(g) => g.express(),
            Self::Direct(g) => g.express(),
        }
    }
}
