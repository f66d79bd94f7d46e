//! Direct encoding: an explicit list of (gear, placement) genes.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{PlacementFlag, Step, CATALOG_SIZE, MAX_GEARS, MIN_GEARS};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Step>", into = "Vec<Step>")]
pub struct DirectGenome {
    genes: Vec<Step>,
}

/// Per-operator probabilities for [`mutate_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirectRates {
    pub point: f64,
    pub insert: f64,
    pub delete: f64,
}

impl Default for DirectRates {
    fn default() -> Self {
        Self { point: 0.15, insert: 0.1, delete: 0.1 }
    }
}

impl DirectRates {
    pub const ZERO: Self = Self { point: 0.0, insert: 0.0, delete: 0.0 };
}

fn random_step<R: Rng + ?Sized>(rng: &mut R) -> Step {
    let gear_id = rng.random_range(1..=CATALOG_SIZE as u8);
    let flag = if rng.random_bool(0.5) { PlacementFlag::Coaxial } else { PlacementFlag::Linear };
    Step::new(gear_id, flag)
}

impl DirectGenome {
    pub fn new(genes: Vec<Step>) -> Result<Self> {
        if !(MIN_GEARS..=MAX_GEARS).contains(&genes.len()) {
            return Err(Error::InvalidGenome(alloc::format!(
                "direct genome needs {MIN_GEARS}..={MAX_GEARS} genes, got {}",
                genes.len()
            )));
        }
        if let Some(s) = genes.iter().find(|s| !(1..=CATALOG_SIZE as u8).contains(&s.gear_id)) {
            return Err(Error::UnknownGear(s.gear_id));
        }
        Ok(Self { genes })
    }

    pub fn genes(&self) -> &[Step] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

impl TryFrom<Vec<Step>> for DirectGenome {
    type Error = Error;

    fn try_from(genes: Vec<Step>) -> Result<Self> {
        Self::new(genes)
    }
}

impl From<DirectGenome> for Vec<Step> {
    fn from(g: DirectGenome) -> Self {
        g.genes
    }
}

/// Length uniform on 2..=6, each gene uniform over sizes and flags.
pub fn random_direct<R: Rng + ?Sized>(rng: &mut R) -> DirectGenome {
    let len = rng.random_range(MIN_GEARS..=MAX_GEARS);
    DirectGenome { genes: (0..len).map(|_| random_step(rng)).collect() }
}

pub fn decode_direct(genome: &DirectGenome) -> Vec<Step> {
    genome.genes.clone()
}

/// Point mutation per gene (resample size or flip flag), then at most one
/// insertion and one deletion, each respecting the length bounds.
pub fn mutate_direct<R: Rng + ?Sized>(genome: &DirectGenome, rng: &mut R, rates: &DirectRates) -> DirectGenome {
    let mut genes = genome.genes.clone();
    for gene in genes.iter_mut() {
        if rng.random_bool(rates.point) {
            if rng.random_bool(0.5) {
                gene.gear_id = rng.random_range(1..=CATALOG_SIZE as u8);
            } else {
                gene.flag = gene.flag.flipped();
            }
        }
    }
    if genes.len() < MAX_GEARS && rng.random_bool(rates.insert) {
        let at = rng.random_range(0..=genes.len());
        genes.insert(at, random_step(rng));
    }
    if genes.len() > MIN_GEARS && rng.random_bool(rates.delete) {
        let at = rng.random_range(0..genes.len());
        genes.remove(at);
    }
    DirectGenome { genes }
}

const CROSSOVER_ATTEMPTS: usize = 8;

/// One-point crossover with an independent cut in each parent. Children are
/// `a[..i] ++ b[j..]` and `b[..j] ++ a[i..]`; cuts are redrawn until both
/// lengths are legal, falling back to copies of the parents. Identical
/// parents are returned unchanged.
pub fn crossover_direct<R: Rng + ?Sized>(
    a: &DirectGenome,
    b: &DirectGenome,
    rng: &mut R,
) -> (DirectGenome, DirectGenome) {
    if a == b {
        return (a.clone(), b.clone());
    }
    let (la, lb) = (a.len(), b.len());
    for _ in 0..CROSSOVER_ATTEMPTS {
        let i = rng.random_range(1..la);
        let j = rng.random_range(1..lb);
        let l1 = i + (lb - j);
        let l2 = j + (la - i);
        if (MIN_GEARS..=MAX_GEARS).contains(&l1) && (MIN_GEARS..=MAX_GEARS).contains(&l2) {
            let c1 = a.genes[..i].iter().chain(&b.genes[j..]).copied().collect();
            let c2 = b.genes[..j].iter().chain(&a.genes[i..]).copied().collect();
            return (DirectGenome { genes: c1 }, DirectGenome { genes: c2 });
        }
    }
    (a.clone(), b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{place_sequence, GeometryConfig};
    use crate::rng::{stream, Purpose};
    use PlacementFlag::{Coaxial as C, Linear as L};

    fn genome(list: &[(u8, PlacementFlag)]) -> DirectGenome {
        DirectGenome::new(list.iter().map(|&(g, f)| Step::new(g, f)).collect()).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert!(DirectGenome::new(alloc::vec![Step::new(1, L)]).is_err());
        assert!(DirectGenome::new(alloc::vec![Step::new(1, L); 7]).is_err());
        assert_eq!(DirectGenome::new(alloc::vec![Step::new(1, L), Step::new(0, L)]), Err(Error::UnknownGear(0)));
    }

    #[test]
    fn random_is_reproducible() {
        let a = random_direct(&mut stream(1, Purpose::Init, 0, 0));
        let b = random_direct(&mut stream(1, Purpose::Init, 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn random_length_is_uniform() {
        let mut rng = stream(2, Purpose::Fuzz, 0, 0);
        let mut counts = [0usize; 7];
        let n = 10_000;
        for _ in 0..n {
            let g = random_direct(&mut rng);
            assert!(g.genes().iter().all(|s| (1..=6).contains(&s.gear_id)));
            counts[g.len()] += 1;
        }
        for c in &counts[2..=6] {
            let f = *c as f64 / n as f64;
            assert!((f - 0.2).abs() <= 0.02, "frequency {f}");
        }
        assert_eq!(counts[0] + counts[1], 0);
    }

    #[test]
    fn decode_is_identity() {
        let g = genome(&[(3, L), (5, C)]);
        assert_eq!(decode_direct(&g), g.genes());
        assert_eq!(decode_direct(&g), decode_direct(&g));
        let m = place_sequence(&decode_direct(&g), &GeometryConfig::default()).unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn zero_rates_leave_genome_alone() {
        let g = genome(&[(3, L), (5, C), (1, L)]);
        let mut rng = stream(3, Purpose::Fuzz, 0, 0);
        for _ in 0..100 {
            assert_eq!(mutate_direct(&g, &mut rng, &DirectRates::ZERO), g);
        }
    }

    #[test]
    fn full_genome_never_grows() {
        let g = genome(&[(1, L); 6]);
        let rates = DirectRates { point: 0.0, insert: 1.0, delete: 0.0 };
        let mut rng = stream(4, Purpose::Fuzz, 0, 0);
        for _ in 0..100 {
            assert_eq!(mutate_direct(&g, &mut rng, &rates).len(), 6);
        }
    }

    #[test]
    fn short_genome_never_shrinks() {
        let g = genome(&[(2, L), (4, C)]);
        let rates = DirectRates { point: 0.5, insert: 0.3, delete: 1.0 };
        let mut rng = stream(5, Purpose::Fuzz, 0, 0);
        for _ in 0..10_000 {
            let m = mutate_direct(&g, &mut rng, &rates);
            assert!(m.len() >= 2 && m.len() <= 6);
        }
    }

    #[test]
    fn identical_parents_give_identical_children() {
        let g = genome(&[(2, L), (4, C), (6, L)]);
        let mut rng = stream(6, Purpose::Fuzz, 0, 0);
        for _ in 0..100 {
            let (c1, c2) = crossover_direct(&g, &g, &mut rng);
            assert_eq!(c1, g);
            assert_eq!(c2, g);
        }
    }

    #[test]
    fn crossover_children_are_legal_and_inherited() {
        let mut rng = stream(7, Purpose::Fuzz, 0, 0);
        for _ in 0..10_000 {
            let a = random_direct(&mut rng);
            let b = random_direct(&mut rng);
            let (c1, c2) = crossover_direct(&a, &b, &mut rng);
            for c in [&c1, &c2] {
                assert!((2..=6).contains(&c.len()));
            }
            // c1 = prefix of a followed by suffix of b
            let i = (1..a.len()).find(|&i| c1.genes()[..i] == a.genes()[..i] && b.genes().ends_with(&c1.genes()[i..]));
            let copied = c1 == a && c2 == b;
            assert!(i.is_some() || copied);
            assert_eq!(c1.len() + c2.len(), a.len() + b.len());
        }
    }
}
