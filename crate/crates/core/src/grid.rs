//! Maximal separated subsets ("grids") and nested random grid hierarchies.
//!
//! A `k`-grid of a base set is a subset whose points are pairwise at
//! distance `>= k` and to which no further base point can be added. These
//! are exactly the maximal independent sets of the graph joining base points
//! at distance `< k`, which is how they are enumerated.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Default bound on the base size for exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;
/// Hard bound imposed by the 64-bit set representation.
pub const MAX_EXHAUSTIVE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub scale: f64,
    /// Sorted point indices.
    pub members: Vec<usize>,
}

impl Grid {
    pub fn new(scale: f64, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { scale, members }
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Uniform over the complete list of maximal separated subsets.
    ExhaustiveUniform,
    /// Greedy scan of a uniformly random permutation; not uniform over grids.
    GreedyPermutation,
}

/// Scans `order`, admitting a point iff it is at distance `>= scale` from
/// every point admitted so far.
pub fn greedy_grid(
    space: &FiniteMetricSpace,
    base: &[usize],
    scale: f64,
    order: &[usize],
) -> Result<Grid> {
    let mut a: Vec<usize> = base.to_vec();
    let mut b: Vec<usize> = order.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b || a.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidOrder);
    }
    Ok(greedy_unchecked(space, order, scale))
}

fn greedy_unchecked(space: &FiniteMetricSpace, order: &[usize], scale: f64) -> Grid {
    let mut admitted: Vec<usize> = Vec::new();
    for &p in order {
        if admitted.iter().all(|&q| space.d(p, q) >= scale) {
            admitted.push(p);
        }
    }
    Grid::new(scale, admitted)
}

/// Both grid invariants: pairwise separation `>= scale`, and every base
/// point outside `subset` lies at distance `< scale` from some member.
pub fn is_maximal_separated(
    space: &FiniteMetricSpace,
    base: &[usize],
    subset: &[usize],
    scale: f64,
) -> bool {
    for (i, &p) in subset.iter().enumerate() {
        if !base.contains(&p) {
            return false;
        }
        if subset[i + 1..].iter().any(|&q| q == p || space.d(p, q) < scale) {
            return false;
        }
    }
    base.iter()
        .filter(|p| !subset.contains(p))
        .all(|&p| subset.iter().any(|&q| space.d(p, q) < scale))
}

/// All maximal `scale`-separated subsets of `base`, each sorted, the list in
/// lexicographic order.
pub fn enumerate_maximal_separated(
    space: &FiniteMetricSpace,
    base: &[usize],
    scale: f64,
    limit: usize,
) -> Result<Vec<Grid>> {
    let limit = limit.min(MAX_EXHAUSTIVE_LIMIT);
    if base.len() > limit {
        return Err(Error::TooLargeForExhaustive { size: base.len(), limit });
    }
    let mut base: Vec<usize> = base.to_vec();
    base.sort_unstable();
    base.dedup();
    let masks = maximal_independent_masks(space, &base, scale);
    let mut grids: Vec<Grid> = masks
        .into_iter()
        .map(|m| Grid::new(scale, mask_members(&base, m)))
        .collect();
    grids.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(grids)
}

fn mask_members(base: &[usize], mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let bit = mask.trailing_zeros() as usize;
        out.push(base[bit]);
        mask &= mask - 1;
    }
    out
}

/// Maximal independent sets of the conflict graph `d < scale` over `base`
/// (at most 64 points), via Bron-Kerbosch with pivoting on the complement.
pub(crate) fn maximal_independent_masks(
    space: &FiniteMetricSpace,
    base: &[usize],
    scale: f64,
) -> Vec<u64> {
    let n = base.len();
    debug_assert!(n <= 64);
    if n == 0 {
        return vec![0];
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // compatible[i]: base points that may share a grid with i
    let compatible: Vec<u64> = (0..n)
        .map(|i| {
            let mut m = 0u64;
            for j in 0..n {
                if j != i && space.d(base[i], base[j]) >= scale {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect();
    let mut out = Vec::new();
    bron_kerbosch(0, all, 0, &compatible, &mut out);
    out
}

fn bron_kerbosch(r: u64, mut p: u64, mut x: u64, nbr: &[u64], out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let mut pivot_pool = p | x;
    let mut pivot = 0;
    let mut best = -1i32;
    while pivot_pool != 0 {
        let u = pivot_pool.trailing_zeros() as usize;
        let c = (p & nbr[u]).count_ones() as i32;
        if c > best {
            best = c;
            pivot = u;
        }
        pivot_pool &= pivot_pool - 1;
    }
    let mut candidates = p & !nbr[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        bron_kerbosch(r | bit, p & nbr[v], x & nbr[v], nbr, out);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

type GridCache = Arc<Mutex<HashMap<(Vec<usize>, u64), Arc<Vec<Grid>>>>>;

/// Draws maximal separated subsets; caches exhaustive enumerations by base set
/// so repeated trials over the same grids enumerate once.
#[derive(Debug, Clone)]
pub struct GridSampler {
    pub mode: SamplingMode,
    pub limit: usize,
    cache: GridCache,
}

impl GridSampler {
    pub fn new(mode: SamplingMode, limit: usize) -> Self {
        Self { mode, limit, cache: Arc::default() }
    }

    pub fn enumerate(
        &self,
        space: &FiniteMetricSpace,
        base: &[usize],
        scale: f64,
    ) -> Result<Arc<Vec<Grid>>> {
        let key = (base.to_vec(), scale.to_bits());
        if let Some(hit) = self.cache.lock().expect("grid cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let grids = Arc::new(enumerate_maximal_separated(space, base, scale, self.limit)?);
        self.cache
            .lock()
            .expect("grid cache poisoned")
            .insert(key, Arc::clone(&grids));
        Ok(grids)
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        space: &FiniteMetricSpace,
        base: &[usize],
        scale: f64,
        rng: &mut R,
    ) -> Result<Grid> {
        match self.mode {
            SamplingMode::ExhaustiveUniform => {
                let grids = self.enumerate(space, base, scale)?;
                Ok(grids[rng.gen_range(0..grids.len())].clone())
            }
            SamplingMode::GreedyPermutation => {
                let mut order = base.to_vec();
                order.shuffle(rng);
                Ok(greedy_unchecked(space, &order, scale))
            }
        }
    }
}

/// One-shot sampling without a shared cache.
pub fn sample_maximal_separated<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    base: &[usize],
    scale: f64,
    rng: &mut R,
    mode: SamplingMode,
    limit: usize,
) -> Result<Grid> {
    GridSampler::new(mode, limit).sample(space, base, scale, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyOptions {
    /// Ratio between consecutive scales, in `(0, 1)`.
    pub delta: f64,
    /// Coarsest level to build. `None` stops at the first single-point grid.
    pub coarsest: Option<i32>,
    /// Levels `>= freeze_from` are built deterministically (greedy scan in
    /// index order) instead of sampled.
    pub freeze_from: Option<i32>,
}

impl HierarchyOptions {
    pub fn new(delta: f64) -> Self {
        Self { delta, coarsest: None, freeze_from: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta {} not in (0, 1)", self.delta)));
        }
        Ok(())
    }
}

/// Smallest level `M` with `delta^M < min_distance`; `0` when the space has
/// fewer than two points.
pub fn finest_level(space: &FiniteMetricSpace, delta: f64) -> i32 {
    let min = space.min_distance();
    if !min.is_finite() {
        return 0;
    }
    let mut m = (min.ln() / delta.ln()).floor() as i32;
    while delta.powi(m) >= min {
        m += 1;
    }
    while delta.powi(m - 1) < min {
        m -= 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub level: i32,
    pub grid: Grid,
}

/// Nested grids `G_coarsest ⊆ ... ⊆ G_finest = X`; level `k` has scale `delta^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHierarchy {
    pub delta: f64,
    /// Ordered from coarsest to finest.
    pub levels: Vec<GridLevel>,
}

impl GridHierarchy {
    pub fn coarsest(&self) -> i32 {
        self.levels[0].level
    }

    pub fn finest(&self) -> i32 {
        self.levels[self.levels.len() - 1].level
    }

    pub fn scale(&self, level: i32) -> f64 {
        self.delta.powi(level)
    }

    pub fn position(&self, level: i32) -> Result<usize> {
        let coarsest = self.coarsest();
        if level < coarsest || level > self.finest() {
            return Err(Error::UnknownLevel(level));
        }
        Ok((level - coarsest) as usize)
    }

    pub fn grid(&self, level: i32) -> Result<&Grid> {
        Ok(&self.levels[self.position(level)?].grid)
    }

    /// Checks nesting, scales, separation and maximality of every level.
    pub fn validate(&self, space: &FiniteMetricSpace) -> Result<()> {
        let all: Vec<usize> = (0..space.len()).collect();
        let finest = &self.levels[self.levels.len() - 1].grid;
        if finest.members != all {
            return Err(Error::InvalidParams("finest grid is not the whole space".into()));
        }
        for pair in self.levels.windows(2) {
            let (coarse, fine) = (&pair[0], &pair[1]);
            if coarse.level + 1 != fine.level {
                return Err(Error::InvalidParams("levels are not consecutive".into()));
            }
            if !coarse.grid.members.iter().all(|&p| fine.grid.contains(p)) {
                return Err(Error::InvalidParams(format!("level {} not nested", coarse.level)));
            }
            if !is_maximal_separated(space, &fine.grid.members, &coarse.grid.members, self.scale(coarse.level)) {
                return Err(Error::InvalidParams(format!("level {} is not a maximal grid", coarse.level)));
            }
        }
        Ok(())
    }
}

/// Stopping rule shared by sampling and exact enumeration of hierarchies.
pub(crate) fn is_coarsest(opts: &HierarchyOptions, level: i32, grid: &Grid) -> bool {
    match opts.coarsest {
        Some(c) => level <= c,
        None => grid.len() == 1,
    }
}

/// Deterministic grid used for frozen levels.
pub(crate) fn frozen_grid(space: &FiniteMetricSpace, base: &[usize], scale: f64) -> Grid {
    greedy_unchecked(space, base, scale)
}

/// Builds `G_M = X` at the finest level, then samples each coarser grid
/// inside the previous one, independently per level.
pub fn build_nested_grids<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    opts: &HierarchyOptions,
    sampler: &GridSampler,
    rng: &mut R,
) -> Result<GridHierarchy> {
    opts.validate()?;
    if space.is_empty() {
        return Err(Error::InvalidParams("empty space".into()));
    }
    let finest = finest_level(space, opts.delta);
    if let Some(c) = opts.coarsest {
        if c > finest {
            return Err(Error::InvalidParams(format!(
                "coarsest level {c} is finer than the finest level {finest}"
            )));
        }
    }
    let mut levels = vec![GridLevel {
        level: finest,
        grid: Grid::new(opts.delta.powi(finest), (0..space.len()).collect()),
    }];
    let mut level = finest;
    loop {
        let current = &levels[levels.len() - 1].grid;
        if is_coarsest(opts, level, current) {
            break;
        }
        level -= 1;
        let scale = opts.delta.powi(level);
        let frozen = opts.freeze_from.is_some_and(|f| level >= f);
        let grid = if frozen {
            frozen_grid(space, &current.members, scale)
        } else {
            sampler.sample(space, &current.members, scale, rng)?
        };
        levels.push(GridLevel { level, grid });
    }
    levels.reverse();
    Ok(GridHierarchy { delta: opts.delta, levels })
}
