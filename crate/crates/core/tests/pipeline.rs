mod common;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dyadic_core::coloring::{main_lemma_exact, ratio, to_f64};
use dyadic_core::goodness::{enumerate_forests, estimate_bad_probability, GoodnessParams, LatticeSampler};
use dyadic_core::grid::{finest_level, GridSampler, HierarchyOptions, SamplingMode};
use dyadic_core::lattice::CubeAtlas;
use dyadic_core::metric::{make_space, SpaceKind};

#[test]
fn sampled_forests_follow_the_enumerated_distribution() {
    let space = make_space(&SpaceKind::RandomCloud { n: 6, dim: 2, extent: 1.0 }, 4).unwrap();
    let opts = HierarchyOptions::new(0.4);
    let mut exact: BTreeMap<String, BigRational> = BTreeMap::new();
    enumerate_forests(&space, &opts, 20, 100_000, |forest, w| {
        let key = format!("{:?}", (0..forest.hierarchy.levels.len()).map(|i| {
            let level = forest.hierarchy.levels[i].level;
            (forest.hierarchy.levels[i].grid.members.clone(), forest.edges(level).unwrap())
        }).collect::<Vec<_>>());
        *exact.entry(key).or_insert_with(BigRational::zero) += w;
        Ok(())
    })
    .unwrap();
    let sampler = LatticeSampler::new(opts, GridSampler::new(SamplingMode::ExhaustiveUniform, 20));
    let trials = 40_000;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..trials {
        let forest = sampler.sample(&space, &mut rng).unwrap();
        let key = format!("{:?}", (0..forest.hierarchy.levels.len()).map(|i| {
            let level = forest.hierarchy.levels[i].level;
            (forest.hierarchy.levels[i].grid.members.clone(), forest.edges(level).unwrap())
        }).collect::<Vec<_>>());
        *counts.entry(key).or_insert(0) += 1;
    }
    assert!(counts.keys().all(|k| exact.contains_key(k)));
    for (key, p) in &exact {
        let p = to_f64(p);
        let f = *counts.get(key).unwrap_or(&0) as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() <= 4.5 * sigma + 1e-9, "{key}: exact {p}, sampled {f}");
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let space = make_space(&SpaceKind::RandomCloud { n: 40, dim: 2, extent: 1.0 }, 8).unwrap();
    let params = GoodnessParams::new(0.1, 0.1, 1).unwrap();
    let sampler = LatticeSampler::new(HierarchyOptions::new(0.1), GridSampler::new(SamplingMode::GreedyPermutation, 20));
    let k = finest_level(&space, 0.1);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_bad_probability(&space, k, 3, &params, &sampler, 500, 5).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn main_lemma_holds_on_every_grid_of_small_spaces() {
    for (_, space) in common::small_spaces().into_iter().take(20) {
        let base: Vec<usize> = (0..space.len()).collect();
        for p in 0..space.len() {
            let rep = main_lemma_exact(&space, &base, 1.0, p, 20).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
    }
}

#[test]
fn cube_levels_partition_points_for_small_delta() {
    for seed in 0..10 {
        let space = common::medium_space(seed);
        let sampler = LatticeSampler::new(HierarchyOptions::new(0.01), GridSampler::new(SamplingMode::GreedyPermutation, 20));
        let forest = sampler.sample(&space, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let atlas = CubeAtlas::build(&space, &forest).unwrap();
        for level in atlas.levels() {
            for (x, cs) in level.containing.iter().enumerate() {
                assert_eq!(cs.len(), 1);
                assert_eq!(cs[0], level.owner[x]);
            }
        }
    }
    assert_eq!(ratio(2, 4), ratio(1, 2));
}
