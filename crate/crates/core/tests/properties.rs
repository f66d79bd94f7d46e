#[path = "support/oracle.rs"]
mod oracle;

use mechsynth_core::direct::{crossover_direct, mutate_direct, DirectGenome, DirectRates};
use mechsynth_core::evolution::{evolve, EvolutionConfig};
use mechsynth_core::genome::{Encoding, Genome};
use mechsynth_core::geometry::{place_sequence, GeometryConfig, PlacementFlag, Step};
use mechsynth_core::novelty::{assign_fitness, novelty_vector};
use mechsynth_core::rnn::{decode, rnn_step, RnnGenome, RnnState, GENOME_LEN};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genome() -> impl Strategy<Value = RnnGenome> {
    prop::collection::vec(-5.0f64..5.0, GENOME_LEN).prop_map(|g| RnnGenome::from_flat(g).unwrap())
}

fn steps() -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec((1u8..=6, any::<bool>()), 2..=6).prop_map(|v| {
        v.into_iter()
            .map(|(id, c)| Step::new(id, if c { PlacementFlag::Coaxial } else { PlacementFlag::Linear }))
            .collect()
    })
}

proptest! {
    #[test]
    fn decode_is_always_valid(g in genome()) {
        let (s, trace) = decode(&g);
        prop_assert!((2..=6).contains(&s.len()));
        prop_assert!(s.iter().all(|st| (1..=6).contains(&st.gear_id)));
        prop_assert_eq!(trace.len(), s.len());
        prop_assert!(place_sequence(&s, &GeometryConfig::default()).is_ok());
    }

    #[test]
    fn step_output_contract(g in genome(), h in prop::array::uniform8(-1.0f64..1.0), o in prop::array::uniform8(-1.0f64..1.0)) {
        let (next, out) = rnn_step(&g, &RnnState { hidden: h, output: o });
        let sum: f64 = out[..6].iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(out[..6].iter().all(|p| *p > 0.0 && *p < 1.0));
        prop_assert!(out[6..].iter().all(|c| (-1.0..=1.0).contains(c)));
        prop_assert!(next.hidden.iter().all(|v| (-1.0..=1.0).contains(v)));
        prop_assert_eq!(next.output, out);
    }

    #[test]
    fn rnn_and_direct_pipelines_agree(g in genome()) {
        let rnn = g.express();
        let direct = DirectGenome::new(rnn.steps.clone()).unwrap().express();
        prop_assert_eq!(&direct.steps, &rnn.steps);
        let geom = GeometryConfig::default();
        let a = place_sequence(&rnn.steps, &geom).unwrap();
        let b = place_sequence(&direct.steps, &geom).unwrap();
        prop_assert_eq!(novelty_vector(&a), novelty_vector(&b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn novelty_vector_matches_scalar_oracle(s in steps()) {
        let mech = place_sequence(&s, &GeometryConfig::default()).unwrap();
        let xs: Vec<f64> = mech.gears.iter().map(|g| g.center_x_mm).collect();
        let rs: Vec<f64> = mech.gears.iter().map(|g| g.radius()).collect();
        let want = oracle::scalar_novelty(&xs, &rs);
        for (a, b) in novelty_vector(&mech).0.iter().zip(want) {
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn feasible_always_outranks_infeasible(
        pop in prop::collection::vec(steps(), 2..30),
        archive in prop::collection::vec(steps(), 0..5),
        normalize in any::<bool>(),
    ) {
        let geom = GeometryConfig { plane_limit: Some(2), ..GeometryConfig::default() };
        let mechs: Vec<_> = pop.iter().map(|s| place_sequence(s, &geom).unwrap()).collect();
        let arch: Vec<_> = archive.iter().map(|s| novelty_vector(&place_sequence(s, &geom).unwrap())).collect();
        let input: Vec<_> = mechs.iter().map(|m| (novelty_vector(m), &m.feasibility)).collect();
        let scored = assign_fitness(&input, &arch, normalize);
        let feasible = mechs.iter().zip(&scored).filter(|(m, _)| m.is_feasible()).map(|(_, s)| s.fitness);
        let infeasible = mechs.iter().zip(&scored).filter(|(m, _)| !m.is_feasible()).map(|(_, s)| s.fitness);
        let lo = feasible.fold(f64::INFINITY, f64::min);
        let hi = infeasible.fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo > hi);
    }

    #[test]
    fn direct_operators_keep_genomes_valid(a in steps(), b in steps(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DirectGenome::new(a).unwrap();
        let b = DirectGenome::new(b).unwrap();
        let (c, d) = crossover_direct(&a, &b, &mut rng);
        let all = DirectRates { point: 1.0, insert: 1.0, delete: 1.0 };
        for g in [c, d, mutate_direct(&a, &mut rng, &all), mutate_direct(&b, &mut rng, &DirectRates::default())] {
            prop_assert!((2..=6).contains(&g.len()));
            prop_assert!(place_sequence(g.genes(), &GeometryConfig::default()).is_ok());
        }
    }
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    for encoding in [Encoding::Rnn, Encoding::Direct] {
        let cfg = EvolutionConfig { encoding, pop_size: 30, generations: 6, seed: 11, ..EvolutionConfig::default() };
        let (a, ra) = evolve(&cfg).unwrap();
        let (b, rb) = evolve(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let (c, _) = evolve(&EvolutionConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.len(), 6);
        assert_eq!(a.encoding(), Some(encoding));
    }
}
