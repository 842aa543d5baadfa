#![allow(dead_code)]

use dyadic_core::metric::{make_space, FiniteMetricSpace, SpaceKind};

/// Spaces of at most 12 points at unit grid scale: clouds, trees and
/// snowflaked clouds. Deterministic.
pub fn small_spaces() -> Vec<(String, FiniteMetricSpace)> {
    let mut out = Vec::new();
    for seed in 0..24u64 {
        let n = 3 + (seed as usize % 10);
        let extent = 1.5 + (seed % 4) as f64 * 0.5;
        let kind = SpaceKind::RandomCloud { n, dim: 2, extent };
        out.push((format!("cloud-{seed}"), make_space(&kind, seed).unwrap()));
    }
    for seed in 0..6u64 {
        let kind = SpaceKind::RandomCloud { n: 6 + seed as usize, dim: 1, extent: 3.0 };
        out.push((format!("line-{seed}"), make_space(&kind, 100 + seed).unwrap()));
    }
    for (branching, height) in [(1, 4), (1, 7), (2, 1), (2, 2), (3, 1), (4, 1), (5, 1), (1, 11)] {
        let tree = make_space(&SpaceKind::Tree { branching, height }, 0).unwrap();
        for scale in [0.5, 0.7] {
            out.push((format!("tree-{branching}-{height}-x{scale}"), tree.scaled(scale).unwrap()));
        }
    }
    for seed in 0..12u64 {
        let alpha = [0.5, 0.7, 0.9][seed as usize % 3];
        let base = SpaceKind::RandomCloud { n: 4 + (seed as usize % 9), dim: 2, extent: 2.0 };
        let kind = SpaceKind::Snowflake { base: Box::new(base), alpha };
        out.push((format!("snowflake-{seed}-a{alpha}"), make_space(&kind, 200 + seed).unwrap()));
    }
    out
}

/// Points on a line where a close pair sits midway between flanking pairs
/// at every scale `delta^j`, `j < depth`, so that parent choices are
/// ambiguous at each level and the pair can end up in different cubes.
pub fn ladder(depth: i32, delta: f64) -> FiniteMetricSpace {
    let mut xs = vec![-delta.powi(depth), delta.powi(depth)];
    for j in 0..depth {
        let s = delta.powi(j);
        xs.push(-0.6 * s);
        xs.push(0.601 * s);
    }
    let names = (0..xs.len()).map(|i| format!("l{i}")).collect();
    let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    FiniteMetricSpace::from_coordinates(names, &coords).unwrap()
}

/// Seeded clouds of up to 200 points for the covering and structure runs.
pub fn medium_space(seed: u64) -> FiniteMetricSpace {
    if seed % 5 == 4 {
        let kind = SpaceKind::ClusterCloud { depth: 3, branching: 4 + (seed % 2) as usize, ratio: 0.05, dim: 2 };
        return make_space(&kind, seed).unwrap();
    }
    let n = 20 + (seed as usize * 37) % 181;
    make_space(&SpaceKind::RandomCloud { n, dim: 2, extent: 1.0 }, seed).unwrap()
}
