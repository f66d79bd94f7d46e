//! The generational novelty-search loop.
//!
//! Per generation: express every genome, lay it out, build novelty vectors,
//! assign constraint-aware fitness, archive the best individual, then refill
//! the population by tournament selection, crossover and mutation. The top
//! `elitism` individuals pass through unchanged.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::direct::DirectGenome;
use crate::genome::{Encoding, Genome, VariationParams};
use crate::geometry::{place_sequence, GeometryConfig, Mechanism};
use crate::novelty::{assign_fitness, best_index, novelty_vector, Archive, ArchiveEntry, NoveltyVector};
use crate::rng::{stream, Purpose};
use crate::rnn::{ActivationTrace, RnnGenome};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub encoding: Encoding,
    pub pop_size: usize,
    pub generations: u32,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub elitism: usize,
    pub seed: u64,
    pub normalize_novelty: bool,
    pub variation: VariationParams,
    pub geometry: GeometryConfig,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            encoding: Encoding::Rnn,
            pop_size: 150,
            generations: 40,
            tournament_size: 3,
            crossover_rate: 0.75,
            elitism: 1,
            seed: 0,
            normalize_novelty: false,
            variation: VariationParams::default(),
            geometry: GeometryConfig::default(),
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(alloc::format!("{name} must be in [0, 1], got {p}")))
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::Config("pop_size must be at least 2".into()));
        }
        if self.generations < 1 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if !(1..=self.pop_size).contains(&self.tournament_size) {
            return Err(Error::Config(alloc::format!(
                "tournament_size must be in [1, {}], got {}",
                self.pop_size, self.tournament_size
            )));
        }
        if self.elitism >= self.pop_size {
            return Err(Error::Config("elitism must be smaller than pop_size".into()));
        }
        check_probability("crossover_rate", self.crossover_rate)?;
        check_probability("variation.rnn_mutation_rate", self.variation.rnn_mutation_rate)?;
        check_probability("variation.direct.point", self.variation.direct.point)?;
        check_probability("variation.direct.insert", self.variation.direct.insert)?;
        check_probability("variation.direct.delete", self.variation.direct.delete)?;
        let sigma = self.variation.rnn_mutation_sigma;
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Config("variation.rnn_mutation_sigma must be finite and non-negative".into()));
        }
        self.geometry.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub best_index: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub feasible_fraction: f64,
    pub elite_coaxial_gears: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub config: EvolutionConfig,
    pub generations: Vec<GenerationStats>,
}

/// Everything derived from one genome during evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub steps: Vec<crate::geometry::Step>,
    pub trace: Option<ActivationTrace>,
    pub mechanism: Mechanism,
    pub vector: NoveltyVector,
}

pub fn evaluate<G: Genome>(genome: &G, geometry: &GeometryConfig) -> Result<Evaluated> {
    let expr = genome.express();
    let mechanism = place_sequence(&expr.steps, geometry)?;
    let vector = novelty_vector(&mechanism);
    Ok(Evaluated { steps: expr.steps, trace: expr.trace, mechanism, vector })
}

/// For each of `count` slots, draws `k` distinct indices and keeps the fittest
/// (lowest index on ties).
pub fn select_tournament<R: Rng + ?Sized>(fitness: &[f64], k: usize, count: usize, rng: &mut R) -> Vec<usize> {
    assert!(!fitness.is_empty() && (1..=fitness.len()).contains(&k), "tournament size out of range");
    (0..count)
        .map(|_| {
            let mut winner = usize::MAX;
            for i in index::sample(rng, fitness.len(), k) {
                if winner == usize::MAX || fitness[i] > fitness[winner] || (fitness[i] == fitness[winner] && i < winner) {
                    winner = i;
                }
            }
            winner
        })
        .collect()
}

/// Adds N(0, sigma) to each gene with probability `rate`. No clamping.
pub fn mutate_rnn<R: Rng + ?Sized>(genome: &RnnGenome, rng: &mut R, rate: f64, sigma: f64) -> RnnGenome {
    let mut child = genome.clone();
    let noise = Normal::new(0.0, sigma).expect("sigma is validated as finite and non-negative");
    for g in child.genes_mut() {
        if rng.random_bool(rate) {
            *g += noise.sample(rng);
        }
    }
    child
}

/// Uniform crossover: every position is swapped between the children with
/// probability one half.
pub fn crossover_rnn<R: Rng + ?Sized>(a: &RnnGenome, b: &RnnGenome, rng: &mut R) -> (RnnGenome, RnnGenome) {
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    for (x, y) in c1.genes_mut().iter_mut().zip(c2.genes_mut()) {
        if rng.random_bool(0.5) {
            core::mem::swap(x, y);
        }
    }
    (c1, c2)
}

/// Runs the configured encoding to completion.
pub fn evolve(config: &EvolutionConfig) -> Result<(Archive, RunReport)> {
    match config.encoding {
        Encoding::Rnn => run::<RnnGenome>(config),
        Encoding::Direct => run::<DirectGenome>(config),
    }
}

/// Population indices sorted by descending fitness, ties by index.
fn ranking(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order
}

/// The loop itself, generic over the genome representation. `config.encoding`
/// is ignored in favour of `G`.
pub fn run<G: Genome>(config: &EvolutionConfig) -> Result<(Archive, RunReport)> {
    config.validate()?;
    let seed = config.seed;
    let mut population: Vec<G> =
        (0..config.pop_size).map(|i| G::random(&mut stream(seed, Purpose::Init, i as u64, 0))).collect();
    let mut archive = Archive::new();
    let mut stats = Vec::with_capacity(config.generations as usize);

    for generation in 0..config.generations {
        let evaluated =
            population.iter().map(|g| evaluate(g, &config.geometry)).collect::<Result<Vec<_>>>()?;
        let reports: Vec<_> = evaluated.iter().map(|e| (e.vector, &e.mechanism.feasibility)).collect();
        let scored = assign_fitness(&reports, &archive.vectors(), config.normalize_novelty);
        let fitness: Vec<f64> = scored.iter().map(|s| s.fitness).collect();

        let best = best_index(&fitness).expect("population is non-empty");
        let elite = &evaluated[best];
        archive.append(ArchiveEntry {
            generation,
            genome: population[best].payload(),
            steps: elite.steps.clone(),
            mechanism: elite.mechanism.clone(),
            novelty_vector: elite.vector,
            novelty_score: scored[best].novelty,
            fitness: fitness[best],
            trace: elite.trace.clone(),
            distance: None,
        })?;

        let feasible = evaluated.iter().filter(|e| e.mechanism.is_feasible()).count();
        stats.push(GenerationStats {
            generation,
            best_index: best,
            best_fitness: fitness[best],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            feasible_fraction: feasible as f64 / population.len() as f64,
            elite_coaxial_gears: elite.mechanism.coaxial_count(),
        });

        if generation + 1 < config.generations {
            population = next_generation(&population, &fitness, config, generation);
        }
    }

    let report = RunReport { seed, config: EvolutionConfig { encoding: G::ENCODING, ..config.clone() }, generations: stats };
    Ok((archive, report))
}

fn next_generation<G: Genome>(population: &[G], fitness: &[f64], config: &EvolutionConfig, generation: u32) -> Vec<G> {
    let seed = config.seed;
    let g = generation as u64;
    let mut next: Vec<G> = ranking(fitness).into_iter().take(config.elitism).map(|i| population[i].clone()).collect();

    let needed = config.pop_size - config.elitism;
    let pairs = needed.div_ceil(2);
    let parents = select_tournament(fitness, config.tournament_size, pairs * 2, &mut stream(seed, Purpose::Selection, g, 0));

    for pair in 0..pairs {
        let mut rng = stream(seed, Purpose::Variation, g, pair as u64);
        let a = &population[parents[2 * pair]];
        let b = &population[parents[2 * pair + 1]];
        let (c1, c2) = if rng.random_bool(config.crossover_rate) { a.crossover(b, &mut rng) } else { (a.clone(), b.clone()) };
        next.push(c1.mutate(&mut rng, &config.variation));
        if next.len() < config.pop_size {
            next.push(c2.mutate(&mut rng, &config.variation));
        }
    }
    next
}
