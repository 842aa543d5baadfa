//! The random parent relation between consecutive grid levels, the cubes it
//! generates, and checks of the covering and separation properties.
//!
//! A point `y` of the level-`k` grid owns the cube
//! `Q_y = ⋃ B(z, delta^l / 100)` over all descendants `z` of `y` at levels
//! `l >= k` (open balls, intersected with the finite space).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridHierarchy};
use crate::metric::{BallMode, FiniteMetricSpace};

/// Radius of the ball around a level-`l` descendant, as a fraction of `delta^l`.
pub const CUBE_BALL_FRACTION: f64 = 1.0 / 100.0;
/// A parent within this fraction of `delta^k` is forced.
pub const FORCED_PARENT_FRACTION: f64 = 1.0 / 4.0;
/// Random parents are drawn from points within this multiple of `delta^k`.
pub const CANDIDATE_RADIUS_FACTOR: f64 = 3.0;
/// Bound on `dist(descendant, ancestor) / delta^k`.
pub const ANCESTOR_PROXIMITY_FACTOR: f64 = 10.0;
/// Bound on `diam(Q) / delta^k`.
pub const CUBE_DIAMETER_FACTOR: f64 = 21.0;
/// Chain separation bound `|z_i z_j| >= delta^j / 100`.
pub const CHAIN_SEPARATION_FRACTION: f64 = 1.0 / 100.0;
/// Largest delta for which chain separation is guaranteed.
pub const CHAIN_SEPARATION_MAX_DELTA: f64 = 1.0 / 1000.0;

/// Parent choice for every point of `children` (level `level + 1`) among the
/// points of `parents` (level `level`). Returns `(child, parent)` pairs sorted
/// by child.
pub fn assign_parents<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    children: &Grid,
    parents: &Grid,
    delta: f64,
    level: i32,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if !parents.members.iter().all(|&p| children.contains(p)) {
        return Err(Error::InvalidParams(format!(
            "level {level} grid is not contained in the finer grid"
        )));
    }
    let scale = delta.powi(level);
    let mut out = Vec::with_capacity(children.len());
    for &child in &children.members {
        let parent = match parent_candidates(space, child, parents, scale, level)? {
            ParentChoice::Forced(p) => p,
            ParentChoice::Random(c) => c[rng.gen_range(0..c.len())],
        };
        out.push((child, parent));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ParentChoice {
    Forced(usize),
    Random(Vec<usize>),
}

pub(crate) fn parent_candidates(
    space: &FiniteMetricSpace,
    child: usize,
    parents: &Grid,
    scale: f64,
    level: i32,
) -> Result<ParentChoice> {
    let row = space.row(child);
    let mut near = parents
        .members
        .iter()
        .copied()
        .filter(|&p| row[p] <= scale * FORCED_PARENT_FRACTION);
    if let Some(p) = near.next() {
        if near.next().is_some() {
            return Err(Error::AmbiguousParent { child, level });
        }
        return Ok(ParentChoice::Forced(p));
    }
    let candidates: Vec<usize> = parents
        .members
        .iter()
        .copied()
        .filter(|&p| row[p] <= scale * CANDIDATE_RADIUS_FACTOR)
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoCandidateParent { child, level });
    }
    Ok(ParentChoice::Random(candidates))
}

/// Grid hierarchy plus the parent relation between consecutive levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeForest {
    pub hierarchy: GridHierarchy,
    /// `parents[i][p]`: parent of point `p` of level `coarsest + i` at the
    /// level above. Empty for `i = 0`.
    parents: Vec<Vec<Option<usize>>>,
    pub seed: Option<u64>,
}

/// Applies [`assign_parents`] to every consecutive pair of levels, coarsest
/// pair first.
pub fn build_forest<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    hierarchy: GridHierarchy,
    rng: &mut R,
) -> Result<LatticeForest> {
    let edges = hierarchy
        .levels
        .windows(2)
        .map(|pair| assign_parents(space, &pair[1].grid, &pair[0].grid, hierarchy.delta, pair[0].level, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeForest::from_edges(space.len(), hierarchy, &edges))
}

impl LatticeForest {
    /// Assembles a forest from per-level `(child, parent)` edges, ordered
    /// like `hierarchy.levels[1..]`.
    pub(crate) fn from_edges(space_len: usize, hierarchy: GridHierarchy, edges: &[Vec<(usize, usize)>]) -> Self {
        let mut parents = vec![Vec::new()];
        for level_edges in edges {
            let mut map = vec![None; space_len];
            for &(c, p) in level_edges {
                map[c] = Some(p);
            }
            parents.push(map);
        }
        Self { hierarchy, parents, seed: None }
    }

    pub fn delta(&self) -> f64 {
        self.hierarchy.delta
    }

    pub fn coarsest(&self) -> i32 {
        self.hierarchy.coarsest()
    }

    pub fn finest(&self) -> i32 {
        self.hierarchy.finest()
    }

    pub fn scale(&self, level: i32) -> f64 {
        self.hierarchy.scale(level)
    }

    pub fn grid(&self, level: i32) -> Result<&Grid> {
        self.hierarchy.grid(level)
    }

    /// Parent at level `level - 1` of point `p` in the level-`level` grid.
    pub fn parent(&self, level: i32, p: usize) -> Option<usize> {
        let pos = self.hierarchy.position(level).ok()?;
        self.parents[pos].get(p).copied().flatten()
    }

    /// `(child, parent)` edges from `level` to `level - 1`.
    pub fn edges(&self, level: i32) -> Result<Vec<(usize, usize)>> {
        let pos = self.hierarchy.position(level)?;
        Ok(self.parents[pos]
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect())
    }

    /// Ancestor at level `to` of point `p` in the level-`from` grid (`to <= from`).
    pub fn ancestor(&self, from: i32, p: usize, to: i32) -> Option<usize> {
        if !self.grid(from).ok()?.contains(p) || to > from || to < self.coarsest() {
            return None;
        }
        let mut cur = p;
        for level in ((to + 1)..=from).rev() {
            cur = self.parent(level, cur)?;
        }
        Some(cur)
    }

    /// Chain `[z_k, ..., z_{from}]` of ancestors of `p`, coarse to fine.
    pub fn chain(&self, from: i32, p: usize, to: i32) -> Option<Vec<usize>> {
        let mut chain = vec![p];
        let mut cur = p;
        for level in ((to + 1)..=from).rev() {
            cur = self.parent(level, cur)?;
            chain.push(cur);
        }
        chain.reverse();
        Some(chain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: usize,
    pub level: i32,
    pub scale: f64,
    /// Sorted point indices.
    pub members: Vec<usize>,
}

impl Cube {
    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

/// All cubes of one level with point-to-cube lookups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeLevel {
    pub level: i32,
    /// One cube per grid point, in ascending center order.
    pub cubes: Vec<Cube>,
    /// `containing[x]`: indices of cubes whose member set holds `x`.
    pub containing: Vec<Vec<usize>>,
    /// `owner[x]`: cube of the level-`level` ancestor of `x` itself at the
    /// finest level. Every point lies in its own finest-level ball, so this
    /// assignment is unique and needs no tie-break.
    pub owner: Vec<usize>,
}

impl CubeLevel {
    pub fn build(space: &FiniteMetricSpace, forest: &LatticeForest, level: i32) -> Result<Self> {
        let n = space.len();
        let centers = &forest.grid(level)?.members;
        let mut index_of = vec![usize::MAX; n];
        for (i, &c) in centers.iter().enumerate() {
            index_of[c] = i;
        }
        let mut in_cube: Vec<Vec<bool>> = vec![vec![false; n]; centers.len()];
        // top[z]: cube index of the level-`level` ancestor of grid point z at the current level
        let mut top = index_of.clone();
        let mut owner = vec![usize::MAX; n];
        for l in level..=forest.finest() {
            if l > level {
                let mut next = vec![usize::MAX; n];
                for (c, p) in forest.edges(l)? {
                    next[c] = top[p];
                }
                top = next;
            }
            let radius = forest.scale(l) * CUBE_BALL_FRACTION;
            for &z in &forest.grid(l)?.members {
                let cube = top[z];
                for x in space.ball_unchecked(z, radius, BallMode::Open) {
                    in_cube[cube][x] = true;
                }
            }
        }
        for (x, &t) in top.iter().enumerate() {
            owner[x] = t;
        }
        let mut containing = vec![Vec::new(); n];
        let cubes = centers
            .iter()
            .enumerate()
            .map(|(i, &center)| {
                let members: Vec<usize> = (0..n).filter(|&x| in_cube[i][x]).collect();
                for &x in &members {
                    containing[x].push(i);
                }
                Cube { center, level, scale: forest.scale(level), members }
            })
            .collect();
        Ok(Self { level, cubes, containing, owner })
    }

    pub fn cube_of_center(&self, center: usize) -> Result<&Cube> {
        self.index_of_center(center).map(|i| &self.cubes[i])
    }

    pub fn index_of_center(&self, center: usize) -> Result<usize> {
        self.cubes
            .binary_search_by_key(&center, |c| c.center)
            .map_err(|_| Error::UnknownCenter(center))
    }

    /// `dist(x, X \ Q~)` for the cube at index `cube`: distance to the union
    /// of all other cubes at this level.
    pub fn dist_to_tilde_complement(&self, space: &FiniteMetricSpace, x: usize, cube: usize) -> f64 {
        let row = space.row(x);
        self.containing
            .iter()
            .enumerate()
            .filter(|(_, cs)| cs.iter().any(|&c| c != cube))
            .map(|(y, _)| row[y])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Cubes of the level-`level` grid.
pub fn build_cubes(space: &FiniteMetricSpace, forest: &LatticeForest, level: i32) -> Result<Vec<Cube>> {
    Ok(CubeLevel::build(space, forest, level)?.cubes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TildeCube {
    pub center: usize,
    pub level: i32,
    pub members: Vec<usize>,
}

/// `X` minus every other cube of the level. On a finite space closures are
/// the sets themselves.
pub fn tilde_cube(space_len: usize, cubes: &[Cube], center: usize) -> Result<TildeCube> {
    let this = cubes
        .iter()
        .find(|c| c.center == center)
        .ok_or(Error::UnknownCenter(center))?;
    let mut covered = vec![false; space_len];
    for c in cubes.iter().filter(|c| c.center != center) {
        for &x in &c.members {
            covered[x] = true;
        }
    }
    Ok(TildeCube {
        center,
        level: this.level,
        members: (0..space_len).filter(|&x| !covered[x]).collect(),
    })
}

/// Cubes at every level of a forest.
#[derive(Debug, Clone)]
pub struct CubeAtlas {
    levels: Vec<CubeLevel>,
    coarsest: i32,
}

impl CubeAtlas {
    pub fn build(space: &FiniteMetricSpace, forest: &LatticeForest) -> Result<Self> {
        Self::build_range(space, forest, forest.coarsest(), forest.finest())
    }

    pub fn build_range(space: &FiniteMetricSpace, forest: &LatticeForest, from: i32, to: i32) -> Result<Self> {
        let levels = (from..=to)
            .map(|l| CubeLevel::build(space, forest, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { levels, coarsest: from })
    }

    pub fn level(&self, level: i32) -> Result<&CubeLevel> {
        if level < self.coarsest {
            return Err(Error::UnknownLevel(level));
        }
        self.levels
            .get((level - self.coarsest) as usize)
            .ok_or(Error::UnknownLevel(level))
    }

    pub fn levels(&self) -> &[CubeLevel] {
        &self.levels
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCoverReport {
    pub level: i32,
    /// `max_x dist(x, G_k)`.
    pub max_distance: f64,
    pub witness: usize,
    /// `3 delta^k`.
    pub bound: f64,
    /// `delta^k / (1 - delta)`.
    pub sharper_bound: f64,
    pub sharper_holds: bool,
}

/// Every point lies within `3 delta^k` (closed) of the level-`k` grid.
pub fn check_grid_cover(space: &FiniteMetricSpace, hierarchy: &GridHierarchy, level: i32) -> Result<GridCoverReport> {
    let grid = hierarchy.grid(level)?;
    let scale = hierarchy.scale(level);
    let (witness, max_distance) = (0..space.len())
        .map(|x| (x, space.dist_to_set(x, grid.members.iter().copied())))
        .fold((0, 0.0f64), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let bound = CANDIDATE_RADIUS_FACTOR * scale;
    if max_distance > bound {
        return Err(Error::CoverViolation { level, point: witness, distance: max_distance });
    }
    let sharper_bound = scale / (1.0 - hierarchy.delta);
    Ok(GridCoverReport {
        level,
        max_distance,
        witness,
        bound,
        sharper_bound,
        sharper_holds: max_distance <= sharper_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeCoverReport {
    pub level: i32,
    /// `(point, center of a cube containing it)`.
    pub witnesses: Vec<(usize, usize)>,
    /// Points lying in more than one cube of the level.
    pub multiply_covered: usize,
}

/// Every point lies in some level-`k` cube.
pub fn check_cube_cover(space: &FiniteMetricSpace, forest: &LatticeForest, level: i32) -> Result<CubeCoverReport> {
    let cubes = CubeLevel::build(space, forest, level)?;
    cube_cover_report(&cubes)
}

pub fn cube_cover_report(cubes: &CubeLevel) -> Result<CubeCoverReport> {
    let mut witnesses = Vec::with_capacity(cubes.containing.len());
    let mut multiply_covered = 0;
    for (x, cs) in cubes.containing.iter().enumerate() {
        match cs.first() {
            None => {
                return Err(Error::CoverViolation { level: cubes.level, point: x, distance: f64::INFINITY })
            }
            Some(&c) => witnesses.push((x, cubes.cubes[c].center)),
        }
        if cs.len() > 1 {
            multiply_covered += 1;
        }
    }
    Ok(CubeCoverReport { level: cubes.level, witnesses, multiply_covered })
}

/// Counts of structural invariant checks over one forest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub children_checked: usize,
    /// Children with two grid points within `delta^k / 4`.
    pub parent_uniqueness_violations: usize,
    /// Parents violating the forced or candidate-radius rule.
    pub parent_rule_violations: usize,
    pub descendants_checked: usize,
    /// Largest `dist(descendant, ancestor) / delta^k`.
    pub max_ancestor_ratio: f64,
    pub ancestor_proximity_violations: usize,
    /// Descendants farther than `3 delta^k / (1 - delta)`.
    pub geometric_series_violations: usize,
    pub nesting_violations: usize,
    pub cubes_checked: usize,
    /// Largest `diam(Q) / delta^k`.
    pub max_diameter_ratio: f64,
    pub diameter_violations: usize,
    /// Points of a level-`k` cube not in its own tilde cube, i.e. covered twice.
    pub tilde_overlaps: usize,
}

impl StructureReport {
    pub fn violations(&self) -> usize {
        self.parent_uniqueness_violations
            + self.parent_rule_violations
            + self.ancestor_proximity_violations
            + self.geometric_series_violations
            + self.nesting_violations
            + self.diameter_violations
    }
}

/// Parent uniqueness and rules, ancestor proximity, cube nesting and cube
/// diameters, checked exhaustively.
pub fn check_structure(space: &FiniteMetricSpace, forest: &LatticeForest, atlas: &CubeAtlas) -> Result<StructureReport> {
    let delta = forest.delta();
    let mut rep = StructureReport::default();
    for level in (forest.coarsest() + 1)..=forest.finest() {
        let parent_level = level - 1;
        let scale = forest.scale(parent_level);
        let parents = forest.grid(parent_level)?;
        for (child, parent) in forest.edges(level)? {
            rep.children_checked += 1;
            let row = space.row(child);
            let forced: Vec<usize> = parents
                .members
                .iter()
                .copied()
                .filter(|&p| row[p] <= scale * FORCED_PARENT_FRACTION)
                .collect();
            if forced.len() > 1 {
                rep.parent_uniqueness_violations += 1;
            }
            let ok = match forced.first() {
                Some(&p) => p == parent,
                None => row[parent] <= scale * CANDIDATE_RADIUS_FACTOR,
            };
            if !ok {
                rep.parent_rule_violations += 1;
            }
        }
    }
    for k in forest.coarsest()..=forest.finest() {
        let scale = forest.scale(k);
        let geometric = CANDIDATE_RADIUS_FACTOR * scale / (1.0 - delta);
        for l in k..=forest.finest() {
            for &z in &forest.grid(l)?.members {
                let y = forest.ancestor(l, z, k).ok_or(Error::UnknownLevel(k))?;
                let d = space.d(y, z);
                rep.descendants_checked += 1;
                rep.max_ancestor_ratio = rep.max_ancestor_ratio.max(d / scale);
                if d > ANCESTOR_PROXIMITY_FACTOR * scale {
                    rep.ancestor_proximity_violations += 1;
                }
                if d > geometric {
                    rep.geometric_series_violations += 1;
                }
            }
        }
        let cubes = atlas.level(k)?;
        for (i, cube) in cubes.cubes.iter().enumerate() {
            rep.cubes_checked += 1;
            let ratio = space.set_diameter(&cube.members) / scale;
            rep.max_diameter_ratio = rep.max_diameter_ratio.max(ratio);
            if ratio > CUBE_DIAMETER_FACTOR {
                rep.diameter_violations += 1;
            }
            rep.tilde_overlaps += cube
                .members
                .iter()
                .filter(|&&x| cubes.containing[x].iter().any(|&c| c != i))
                .count();
        }
        if k > forest.coarsest() {
            let coarse = atlas.level(k - 1)?;
            for (child, parent) in forest.edges(k)? {
                let small = cubes.cube_of_center(child)?;
                let big = coarse.cube_of_center(parent)?;
                if !small.members.iter().all(|&x| big.contains(x)) {
                    rep.nesting_violations += 1;
                }
            }
        }
    }
    Ok(rep)
}

/// Checks `|z_i z_j| >= delta^j / 100` for all `k <= j < i <= k + m` along
/// `chain = [z_k, ..., z_{k+m}]`, after confirming the separation lemma's
/// hypotheses: `delta <= 1/1000`, `delta^m >= 100 eps`, `chain` is a parent
/// chain, `x` lies in `Q_{z_{k+m}}`, and `x` lies in some level-`k` cube
/// `Q_y` with `dist(x, X \ Q~_y) < eps delta^k`.
///
/// A chain of length one has no pairs and is accepted as is.
pub fn verify_chain_separation(
    space: &FiniteMetricSpace,
    forest: &LatticeForest,
    atlas: &CubeAtlas,
    x: usize,
    k: i32,
    chain: &[usize],
    eps: f64,
) -> Result<bool> {
    if chain.is_empty() {
        return Err(Error::InvalidChain("empty chain".into()));
    }
    let m = (chain.len() - 1) as i32;
    if m == 0 {
        return Ok(true);
    }
    space.check_point(x)?;
    let delta = forest.delta();
    if delta > CHAIN_SEPARATION_MAX_DELTA {
        return Err(Error::HypothesesNotMet(format!("delta = {delta} exceeds 1/1000")));
    }
    if !(eps > 0.0) || 100.0 * eps > delta.powi(m) * (1.0 + 1e-12) {
        return Err(Error::HypothesesNotMet(format!("eps = {eps} violates delta^m >= 100 eps")));
    }
    for (j, pair) in chain.windows(2).enumerate() {
        let level = k + j as i32 + 1;
        if forest.parent(level, pair[1]) != Some(pair[0]) {
            return Err(Error::InvalidChain(format!(
                "point {} at level {level} is not a child of {}",
                pair[1], pair[0]
            )));
        }
    }
    let fine = atlas.level(k + m)?;
    if !fine.cube_of_center(chain[m as usize])?.contains(x) {
        return Err(Error::HypothesesNotMet(format!("x = {x} is not in the finest chain cube")));
    }
    let coarse = atlas.level(k)?;
    let threshold = eps * forest.scale(k);
    let near_boundary = coarse.containing[x]
        .iter()
        .any(|&c| coarse.dist_to_tilde_complement(space, x, c) < threshold);
    if !near_boundary {
        return Err(Error::HypothesesNotMet(format!(
            "x = {x} is not within eps delta^k of a level-{k} tilde cube boundary"
        )));
    }
    Ok(separated_pairs(space, forest, k, chain).is_none())
}

/// First pair `(j, i)` of chain levels violating the separation bound.
fn separated_pairs(space: &FiniteMetricSpace, forest: &LatticeForest, k: i32, chain: &[usize]) -> Option<(i32, i32)> {
    for (jj, &zj) in chain.iter().enumerate() {
        let bound = forest.scale(k + jj as i32) * CHAIN_SEPARATION_FRACTION;
        for (ii, &zi) in chain.iter().enumerate().skip(jj + 1) {
            if space.d(zi, zj) < bound {
                return Some((k + jj as i32, k + ii as i32));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainViolation {
    pub x: usize,
    pub level: i32,
    pub chain: Vec<usize>,
    pub pair: (i32, i32),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainScanReport {
    /// `(x, k, m)` triples meeting the boundary hypothesis with `eps = delta^m / 100`.
    pub hypothesis_instances: usize,
    pub chains_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<ChainViolation>,
}

/// Exhaustive scan: for every level `k`, point `x` and depth `m >= 1` whose
/// boundary hypothesis holds at the largest admissible `eps = delta^m / 100`,
/// checks every chain ending in a level-`(k+m)` cube containing `x`.
pub fn scan_chain_separation(
    space: &FiniteMetricSpace,
    forest: &LatticeForest,
    atlas: &CubeAtlas,
) -> Result<ChainScanReport> {
    let delta = forest.delta();
    if delta > CHAIN_SEPARATION_MAX_DELTA {
        return Err(Error::HypothesesNotMet(format!("delta = {delta} exceeds 1/1000")));
    }
    let mut rep = ChainScanReport::default();
    for k in forest.coarsest()..forest.finest() {
        let coarse = atlas.level(k)?;
        for x in 0..space.len() {
            let boundary = coarse.containing[x]
                .iter()
                .map(|&c| coarse.dist_to_tilde_complement(space, x, c))
                .fold(f64::INFINITY, f64::min);
            for m in 1..=(forest.finest() - k) {
                let eps = delta.powi(m) / 100.0;
                if !(boundary < eps * forest.scale(k)) {
                    continue;
                }
                rep.hypothesis_instances += 1;
                let fine = atlas.level(k + m)?;
                for &ci in &fine.containing[x] {
                    let end = fine.cubes[ci].center;
                    let chain = forest
                        .chain(k + m, end, k)
                        .ok_or(Error::InvalidChain(format!("no ancestors for {end}")))?;
                    if !verify_chain_separation(space, forest, atlas, x, k, &chain, eps)? {
                        let pair = separated_pairs(space, forest, k, &chain).unwrap_or((k, k));
                        rep.violations.push(ChainViolation { x, level: k, chain: chain.clone(), pair });
                    }
                    rep.chains_checked += 1;
                    rep.pairs_checked += chain.len() * (chain.len() - 1) / 2;
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_nested_grids, GridSampler, HierarchyOptions, SamplingMode};
    use crate::metric::{make_space, SpaceKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_coordinates(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0.0], vec![0.5], vec![1.0]],
        )
        .unwrap()
    }

    fn forest_for(space: &FiniteMetricSpace, opts: HierarchyOptions, seed: u64) -> LatticeForest {
        let sampler = GridSampler::new(SamplingMode::GreedyPermutation, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = build_nested_grids(space, &opts, &sampler, &mut rng).unwrap();
        build_forest(space, h, &mut rng).unwrap()
    }

    #[test]
    fn forced_parent_is_deterministic() {
        let l3 = line3();
        let fine = Grid::new(1.0, vec![0, 1, 2]);
        let coarse = Grid::new(1.0, vec![0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let edges = assign_parents(&l3, &fine, &coarse, 0.5, 1, &mut rng).unwrap();
        // scale 0.5: b is 0.5 from a and c, forced radius 0.125, candidates within 1.5
        assert_eq!(edges[0], (0, 0));
        assert_eq!(edges[2], (2, 2));
        assert!(edges[1].1 == 0 || edges[1].1 == 2);
    }

    #[test]
    fn identity_when_grid_equals_refinement() {
        let l3 = line3();
        let g = Grid::new(0.1, vec![0, 1, 2]);
        let edges = assign_parents(&l3, &g, &g, 0.1, 1, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(edges, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn random_parent_is_uniform() {
        // child at 0.3 from both parents with scale 1: none within 1/4
        let space = FiniteMetricSpace::from_coordinates(
            vec!["p".into(), "c".into(), "q".into()],
            &[vec![0.0], vec![0.3], vec![0.6]],
        )
        .unwrap();
        let fine = Grid::new(0.1, vec![0, 1, 2]);
        let coarse = Grid::new(1.0, vec![0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let trials = 100_000;
        let mut to_p = 0usize;
        for _ in 0..trials {
            let edges = assign_parents(&space, &fine, &coarse, 0.5, 0, &mut rng).unwrap();
            if edges[1].1 == 0 {
                to_p += 1;
            }
        }
        let n = trials as f64;
        assert!((to_p as f64 - n / 2.0).abs() <= 4.0 * (n * 0.25).sqrt(), "to_p = {to_p}");
    }

    #[test]
    fn missing_candidate_and_nesting_errors() {
        let space = FiniteMetricSpace::from_coordinates(
            vec!["p".into(), "q".into()],
            &[vec![0.0], vec![10.0]],
        )
        .unwrap();
        let fine = Grid::new(0.1, vec![0, 1]);
        let coarse = Grid::new(1.0, vec![0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            assign_parents(&space, &fine, &coarse, 0.5, 0, &mut rng),
            Err(Error::NoCandidateParent { child: 1, level: 0 })
        ));
        let not_nested = Grid::new(0.1, vec![1]);
        assert!(assign_parents(&space, &not_nested, &coarse, 0.5, 0, &mut rng).is_err());
    }

    #[test]
    fn singleton_forest_is_self_chain() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        let f = forest_for(&one, HierarchyOptions { delta: 0.5, coarsest: Some(-2), freeze_from: None }, 0);
        for level in -1..=0 {
            assert_eq!(f.parent(level, 0), Some(0));
        }
        let cubes = build_cubes(&one, &f, -2).unwrap();
        assert_eq!(cubes.len(), 1);
        assert_eq!(cubes[0].members, vec![0]);
    }

    #[test]
    fn forest_matches_direct_parent_assignment() {
        let l3 = line3();
        let opts = HierarchyOptions { delta: 0.4, coarsest: Some(0), freeze_from: None };
        let sampler = GridSampler::new(SamplingMode::ExhaustiveUniform, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = build_nested_grids(&l3, &opts, &sampler, &mut rng).unwrap();
        assert_eq!(h.levels.len(), 2);
        let mut rng_a = rng.clone();
        let forest = build_forest(&l3, h.clone(), &mut rng).unwrap();
        let direct = assign_parents(&l3, &h.levels[1].grid, &h.levels[0].grid, 0.4, 0, &mut rng_a).unwrap();
        assert_eq!(forest.edges(1).unwrap(), direct);
    }

    #[test]
    fn forest_is_reproducible() {
        let space = make_space(&SpaceKind::RandomCloud { n: 40, dim: 2, extent: 1.0 }, 4).unwrap();
        let opts = HierarchyOptions::new(0.3);
        assert_eq!(forest_for(&space, opts, 8), forest_for(&space, opts, 8));
    }

    #[test]
    fn two_far_points_give_disjoint_cubes() {
        let space = FiniteMetricSpace::from_coordinates(
            vec!["p".into(), "q".into()],
            &[vec![0.0], vec![7.0]],
        )
        .unwrap();
        let f = forest_for(&space, HierarchyOptions::new(0.5), 0);
        assert_eq!((f.coarsest(), f.finest()), (-3, -2));
        let cubes = build_cubes(&space, &f, -2).unwrap();
        assert_eq!(cubes.len(), 2);
        assert_eq!(cubes[0].members, vec![0]);
        assert_eq!(cubes[1].members, vec![1]);
        let t = tilde_cube(2, &cubes, 0).unwrap();
        assert_eq!(t.members, vec![0]);
    }

    #[test]
    fn l3_cubes_cover_space() {
        let l3 = line3();
        let f = forest_for(&l3, HierarchyOptions::new(0.4), 0);
        for level in f.coarsest()..=f.finest() {
            let rep = check_cube_cover(&l3, &f, level).unwrap();
            assert_eq!(rep.witnesses.len(), 3);
        }
    }

    #[test]
    fn tilde_cube_examples() {
        let one = vec![Cube { center: 0, level: 0, scale: 1.0, members: vec![0, 1, 2] }];
        assert_eq!(tilde_cube(3, &one, 0).unwrap().members, vec![0, 1, 2]);
        assert!(matches!(tilde_cube(3, &one, 1), Err(Error::UnknownCenter(1))));
        let overlapping = vec![
            Cube { center: 0, level: 0, scale: 1.0, members: vec![0, 1] },
            Cube { center: 2, level: 0, scale: 1.0, members: vec![1, 2] },
        ];
        let t = tilde_cube(3, &overlapping, 0).unwrap();
        assert_eq!(t.members, vec![0]);
        assert!(t.members.iter().all(|x| overlapping[0].members.contains(x)));
    }

    #[test]
    fn tilde_subset_of_cube_on_seeded_l3() {
        let l3 = line3();
        for seed in 0..20 {
            let f = forest_for(&l3, HierarchyOptions::new(0.6), seed);
            for level in f.coarsest()..=f.finest() {
                let cubes = build_cubes(&l3, &f, level).unwrap();
                for c in &cubes {
                    let t = tilde_cube(3, &cubes, c.center).unwrap();
                    assert!(t.members.iter().all(|&x| c.contains(x)));
                }
            }
        }
    }

    #[test]
    fn grid_cover_examples() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        let f = forest_for(&one, HierarchyOptions { delta: 0.5, coarsest: Some(-1), freeze_from: None }, 0);
        assert_eq!(check_grid_cover(&one, &f.hierarchy, -1).unwrap().max_distance, 0.0);
        let space = make_space(&SpaceKind::RandomCloud { n: 50, dim: 2, extent: 1.0 }, 3).unwrap();
        let f = forest_for(&space, HierarchyOptions::new(0.1), 3);
        let finest = check_grid_cover(&space, &f.hierarchy, f.finest()).unwrap();
        assert_eq!(finest.max_distance, 0.0);
        for level in f.coarsest()..=f.finest() {
            let rep = check_grid_cover(&space, &f.hierarchy, level).unwrap();
            assert!(rep.max_distance <= rep.bound);
            assert!(rep.sharper_holds);
        }
    }

    #[test]
    fn structure_holds_on_cloud() {
        let space = make_space(&SpaceKind::RandomCloud { n: 60, dim: 2, extent: 1.0 }, 5).unwrap();
        for delta in [0.1, 0.001] {
            let f = forest_for(&space, HierarchyOptions::new(delta), 5);
            let atlas = CubeAtlas::build(&space, &f).unwrap();
            let rep = check_structure(&space, &f, &atlas).unwrap();
            assert_eq!(rep.violations(), 0, "{rep:?}");
        }
    }

    #[test]
    fn chain_separation_trivial_and_out_of_hypotheses() {
        let space = make_space(&SpaceKind::RandomCloud { n: 20, dim: 1, extent: 1.0 }, 2).unwrap();
        let f = forest_for(&space, HierarchyOptions::new(0.001), 2);
        let atlas = CubeAtlas::build(&space, &f).unwrap();
        let k = f.coarsest();
        let z = f.grid(k).unwrap().members[0];
        assert!(verify_chain_separation(&space, &f, &atlas, 0, k, &[z], 0.5).unwrap());
        // a self-chain z ≺ z violates the bound; far from any boundary, so hypotheses fail
        let f01 = forest_for(&space, HierarchyOptions::new(0.1), 2);
        let atlas01 = CubeAtlas::build(&space, &f01).unwrap();
        let k = f01.finest() - 1;
        let z = f01.grid(k).unwrap().members[0];
        let res = verify_chain_separation(&space, &f01, &atlas01, z, k, &[z, z], 1e-6);
        assert!(matches!(res, Err(Error::HypothesesNotMet(_))));
    }
}
