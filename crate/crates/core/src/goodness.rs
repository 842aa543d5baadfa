//! Good and bad cubes, boundary layers, and the Monte Carlo experiments
//! built on them.
//!
//! A cube `Q` at level `k` is good when every cube `Q1` at every level
//! `n <= k - r` is either far from `Q` or holds `Q` deep inside, both at the
//! threshold `delta^(k gamma) delta^(n (1 - gamma))`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{to_f64, Fraction};
use crate::error::{Error, Result};
use crate::grid::{
    build_nested_grids, finest_level, frozen_grid, is_coarsest, Grid, GridHierarchy, GridLevel, GridSampler,
    HierarchyOptions,
};
use crate::lattice::{build_forest, parent_candidates, Cube, CubeAtlas, CubeLevel, LatticeForest, ParentChoice};
use crate::metric::FiniteMetricSpace;
use crate::stats::{trial_rng, wilson, Interval, Z95};

/// Boundary-layer depth constant: `m` is the largest integer with
/// `BOUNDARY_DEPTH_FACTOR * eps <= delta^m`.
pub const BOUNDARY_DEPTH_FACTOR: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodnessParams {
    pub delta: f64,
    pub gamma: f64,
    pub r: u32,
}

impl GoodnessParams {
    pub fn new(delta: f64, gamma: f64, r: u32) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta {delta} not in (0, 1)")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParams(format!("gamma {gamma} not in (0, 1)")));
        }
        if r == 0 {
            return Err(Error::InvalidParams("r must be positive".into()));
        }
        let gap = delta.powf(r as f64 * (1.0 - gamma));
        if gap >= 0.5 {
            return Err(Error::InvalidParams(format!(
                "delta^(r (1 - gamma)) = {gap} is not below 1/2"
            )));
        }
        Ok(Self { delta, gamma, r })
    }

    /// Smallest `r` with `delta^(r (1 - gamma)) < 1/2`.
    pub fn smallest_r(delta: f64, gamma: f64) -> Result<u32> {
        (1..=10_000)
            .find(|&r| delta.powf(r as f64 * (1.0 - gamma)) < 0.5)
            .ok_or_else(|| Error::InvalidParams(format!("no admissible r for delta {delta}, gamma {gamma}")))
    }

    /// `delta^(k gamma) delta^(n (1 - gamma))`.
    pub fn threshold(&self, k: i32, n: i32) -> f64 {
        self.delta
            .powf(k as f64 * self.gamma + n as f64 * (1.0 - self.gamma))
    }
}

/// Why a cube is bad: the first offending coarse cube found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessFailure {
    pub level: i32,
    pub center: usize,
    pub dist_to_cube: f64,
    pub dist_to_complement: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub good: bool,
    /// Levels `n <= k - r` present in the atlas.
    pub levels_tested: usize,
    /// Tested levels with more than one cube.
    pub nontrivial_levels: usize,
    pub failure: Option<GoodnessFailure>,
}

/// `dq[x] = dist(x, Q)`.
fn distances_to(space: &FiniteMetricSpace, members: &[usize]) -> Vec<f64> {
    (0..space.len())
        .map(|x| space.dist_to_set(x, members.iter().copied()))
        .collect()
}

/// `(dist(Q, Q1), dist(Q, X \ Q1))` from the distance profile of `Q`.
fn cube_gaps(dq: &[f64], q1: &Cube) -> (f64, f64) {
    let mut inside = f64::INFINITY;
    let mut outside = f64::INFINITY;
    for (y, &d) in dq.iter().enumerate() {
        if q1.contains(y) {
            inside = inside.min(d);
        } else {
            outside = outside.min(d);
        }
    }
    (inside, outside)
}

fn first_failure(dq: &[f64], level: &CubeLevel, threshold: f64) -> Option<GoodnessFailure> {
    level.cubes.iter().find_map(|q1| {
        let (inside, outside) = cube_gaps(dq, q1);
        (inside < threshold && outside < threshold).then_some(GoodnessFailure {
            level: level.level,
            center: q1.center,
            dist_to_cube: inside,
            dist_to_complement: outside,
            threshold,
        })
    })
}

/// Classifies `cube` against every level `n <= k - r` held by `atlas`.
pub fn classify(space: &FiniteMetricSpace, cube: &Cube, atlas: &CubeAtlas, params: &GoodnessParams) -> Classification {
    let dq = distances_to(space, &cube.members);
    let top = cube.level - params.r as i32;
    let mut out = Classification { good: true, levels_tested: 0, nontrivial_levels: 0, failure: None };
    for level in atlas.levels().iter().filter(|l| l.level <= top) {
        out.levels_tested += 1;
        if level.cubes.len() > 1 {
            out.nontrivial_levels += 1;
        }
        if out.failure.is_none() {
            out.failure = first_failure(&dq, level, params.threshold(cube.level, level.level));
        }
    }
    out.good = out.failure.is_none();
    out
}

pub fn is_good(space: &FiniteMetricSpace, cube: &Cube, atlas: &CubeAtlas, params: &GoodnessParams) -> bool {
    classify(space, cube, atlas, params).good
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLayer {
    pub center: usize,
    pub level: i32,
    pub eps: f64,
    pub members: Vec<usize>,
}

/// Points within `eps delta^k` (closed) of both `Q` and `X \ Q`.
pub fn boundary_layer(space: &FiniteMetricSpace, cube: &Cube, eps: f64) -> BoundaryLayer {
    let bound = eps * cube.scale;
    let complement: Vec<usize> = (0..space.len()).filter(|&x| !cube.contains(x)).collect();
    let members = (0..space.len())
        .filter(|&x| {
            space.dist_to_set(x, cube.members.iter().copied()) <= bound
                && space.dist_to_set(x, complement.iter().copied()) <= bound
        })
        .collect();
    BoundaryLayer { center: cube.center, level: cube.level, eps, members }
}

/// Smallest `w` such that `x` lies in the boundary layer of some cube of
/// `level` at every `eps` with `eps delta^k >= w`.
pub fn boundary_depth(space: &FiniteMetricSpace, level: &CubeLevel, x: usize) -> f64 {
    let row = space.row(x);
    level
        .cubes
        .iter()
        .map(|q| {
            let mut inside = f64::INFINITY;
            let mut outside = f64::INFINITY;
            for (y, &d) in row.iter().enumerate() {
                if q.contains(y) {
                    inside = inside.min(d);
                } else {
                    outside = outside.min(d);
                }
            }
            inside.max(outside)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Forest construction shared by all randomized experiments.
#[derive(Debug, Clone)]
pub struct LatticeSampler {
    pub opts: HierarchyOptions,
    pub grids: GridSampler,
}

impl LatticeSampler {
    pub fn new(opts: HierarchyOptions, grids: GridSampler) -> Self {
        Self { opts, grids }
    }

    pub fn sample<R: Rng + ?Sized>(&self, space: &FiniteMetricSpace, rng: &mut R) -> Result<LatticeForest> {
        let hierarchy = build_nested_grids(space, &self.opts, &self.grids, rng)?;
        build_forest(space, hierarchy, rng)
    }
}

fn run_trials<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if trials == 0 {
        return Err(Error::InvalidTrials);
    }
    (0..trials).into_par_iter().map(f).collect()
}

/// The level-`k` cube of `center` in `forest`, with its atlas of levels
/// `coarsest..=k`. Levels coarser than the forest hold the single cube `X`
/// and never make a cube bad, so they are left out.
fn cube_in_forest(
    space: &FiniteMetricSpace,
    forest: &LatticeForest,
    k: i32,
    center: usize,
    trial: u64,
) -> Result<(Cube, CubeAtlas)> {
    if k > forest.finest() {
        return Err(Error::UnknownLevel(k));
    }
    if k < forest.coarsest() {
        // the whole space is the only cube at this level
        if forest.grid(forest.coarsest())?.members != [center] {
            return Err(Error::CenterNotInGrid { level: k, center, trial });
        }
        let cube = Cube { center, level: k, scale: forest.scale(k), members: (0..space.len()).collect() };
        return Ok((cube, CubeAtlas::build_range(space, forest, forest.coarsest(), forest.coarsest() - 1)?));
    }
    if !forest.grid(k)?.contains(center) {
        return Err(Error::CenterNotInGrid { level: k, center, trial });
    }
    let atlas = CubeAtlas::build_range(space, forest, forest.coarsest(), k)?;
    let cube = atlas.level(k)?.cube_of_center(center)?.clone();
    Ok((cube, atlas))
}

/// Tally of the deep-inside step of the probability bound: whenever
/// `dist(x_k, X \ A) > 2t` and `diam(Q) <= t` for the level-`n` ancestor cube
/// `A`, then `dist(Q, X \ A) >= t`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProofStepTally {
    pub checks: u64,
    pub failures: u64,
}

fn proof_steps(
    space: &FiniteMetricSpace,
    forest: &LatticeForest,
    atlas: &CubeAtlas,
    cube: &Cube,
    params: &GoodnessParams,
) -> Result<ProofStepTally> {
    let mut tally = ProofStepTally::default();
    let diam = space.set_diameter(&cube.members);
    let k = cube.level;
    for level in atlas.levels().iter().filter(|l| l.level <= k - params.r as i32) {
        let Some(anc) = forest.ancestor(k, cube.center, level.level) else {
            return Err(Error::InvalidChain(format!("no ancestor of {} at level {}", cube.center, level.level)));
        };
        let a = level.cube_of_center(anc)?;
        let t = params.threshold(k, level.level);
        let outside: Vec<usize> = (0..space.len()).filter(|&y| !a.contains(y)).collect();
        if space.dist_to_set(cube.center, outside.iter().copied()) > 2.0 * t && diam <= t {
            tally.checks += 1;
            if space.set_distance(&cube.members, &outside) < t {
                tally.failures += 1;
            }
        }
    }
    Ok(tally)
}

#[derive(Debug, Clone)]
struct BadTrial {
    bad: bool,
    fail_level: Option<i32>,
    levels_tested: usize,
    nontrivial: bool,
    proof: ProofStepTally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadProbabilityEstimate {
    pub level: i32,
    pub center: usize,
    pub params: GoodnessParams,
    pub trials: u64,
    pub bad: u64,
    pub estimate: f64,
    pub interval: Interval,
    /// Trials in which some tested level had two or more cubes.
    pub nontrivial_trials: u64,
    pub min_levels_tested: usize,
    pub max_levels_tested: usize,
    /// Bad trials keyed by the first failing level.
    pub bad_by_level: BTreeMap<i32, u64>,
    pub proof_steps: ProofStepTally,
}

/// Fraction of `trials` seeded forests in which the level-`k` cube of
/// `center` is bad, with a 95% Wilson interval.
pub fn estimate_bad_probability(
    space: &FiniteMetricSpace,
    k: i32,
    center: usize,
    params: &GoodnessParams,
    sampler: &LatticeSampler,
    trials: u64,
    seed: u64,
) -> Result<BadProbabilityEstimate> {
    space.check_point(center)?;
    check_delta(params, sampler)?;
    let outcomes = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let forest = sampler.sample(space, &mut rng)?;
        let (cube, atlas) = cube_in_forest(space, &forest, k, center, t)?;
        let c = classify(space, &cube, &atlas, params);
        Ok(BadTrial {
            bad: !c.good,
            fail_level: c.failure.map(|f| f.level),
            levels_tested: c.levels_tested,
            nontrivial: c.nontrivial_levels > 0,
            proof: proof_steps(space, &forest, &atlas, &cube, params)?,
        })
    })?;
    let bad = outcomes.iter().filter(|o| o.bad).count() as u64;
    let mut bad_by_level = BTreeMap::new();
    for level in outcomes.iter().filter_map(|o| o.fail_level) {
        *bad_by_level.entry(level).or_insert(0) += 1;
    }
    let proof_steps = outcomes.iter().fold(ProofStepTally::default(), |acc, o| ProofStepTally {
        checks: acc.checks + o.proof.checks,
        failures: acc.failures + o.proof.failures,
    });
    Ok(BadProbabilityEstimate {
        level: k,
        center,
        params: *params,
        trials,
        bad,
        estimate: bad as f64 / trials as f64,
        interval: wilson(bad, trials, Z95),
        nontrivial_trials: outcomes.iter().filter(|o| o.nontrivial).count() as u64,
        min_levels_tested: outcomes.iter().map(|o| o.levels_tested).min().unwrap_or(0),
        max_levels_tested: outcomes.iter().map(|o| o.levels_tested).max().unwrap_or(0),
        bad_by_level,
        proof_steps,
    })
}

fn check_delta(params: &GoodnessParams, sampler: &LatticeSampler) -> Result<()> {
    if params.delta != sampler.opts.delta {
        return Err(Error::InvalidParams(format!(
            "goodness delta {} differs from lattice delta {}",
            params.delta, sampler.opts.delta
        )));
    }
    Ok(())
}

/// `eps_j = delta^(j gamma)` for `j = 1..=count`.
pub fn geometric_schedule(delta: f64, gamma: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| delta.powf(j as f64 * gamma)).collect()
}

/// Schedules must be nonempty, inside `(0, 1]`, strictly decreasing and
/// geometric.
pub fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::ScheduleInvalid("empty schedule".into()));
    }
    if let Some(e) = schedule.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::ScheduleInvalid(format!("{e} is not in (0, 1]")));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ScheduleInvalid("values are not strictly decreasing".into()));
    }
    if schedule.len() >= 3 {
        let q = schedule[1] / schedule[0];
        if schedule.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
            return Err(Error::ScheduleInvalid("ratios between consecutive values differ".into()));
        }
    }
    Ok(())
}

/// Largest `m >= 0` with `500 eps <= delta^m`; `0` when even `m = 0` fails.
pub fn boundary_depth_index(eps: f64, delta: f64) -> u32 {
    let target = BOUNDARY_DEPTH_FACTOR * eps;
    let mut m = 0;
    while m < 4096 && delta.powi(m as i32 + 1) >= target {
        m += 1;
    }
    m
}

/// `log(1 - a) / log(delta)`.
pub fn reference_eta(a: f64, delta: f64) -> f64 {
    (1.0 - a).ln() / delta.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub eps: f64,
    pub depth: u32,
    pub hits: u64,
    pub estimate: f64,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub point: usize,
    pub level: i32,
    pub trials: u64,
    pub points: Vec<DecayPoint>,
    /// Slope of `ln p` against `ln eps` over points with nonzero estimate.
    pub eta_hat: Option<f64>,
    pub fit_points: usize,
    pub a: Option<f64>,
    pub eta_ref: Option<f64>,
    pub monotone: bool,
}

/// Monte Carlo estimate of `P(x in boundary layer of its level-k cubes)`
/// along `schedule`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_boundary_decay(
    space: &FiniteMetricSpace,
    x: usize,
    k: i32,
    schedule: &[f64],
    sampler: &LatticeSampler,
    trials: u64,
    seed: u64,
    a: Option<f64>,
) -> Result<DecayFit> {
    space.check_point(x)?;
    validate_schedule(schedule)?;
    let depths = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let forest = sampler.sample(space, &mut rng)?;
        if k > forest.finest() {
            return Err(Error::UnknownLevel(k));
        }
        if k < forest.coarsest() {
            return Ok(f64::INFINITY);
        }
        let level = CubeLevel::build(space, &forest, k)?;
        Ok(boundary_depth(space, &level, x))
    })?;
    let scale = sampler.opts.delta.powi(k);
    let points: Vec<DecayPoint> = schedule
        .iter()
        .map(|&eps| {
            let hits = depths.iter().filter(|&&w| w <= eps * scale).count() as u64;
            DecayPoint {
                eps,
                depth: boundary_depth_index(eps, sampler.opts.delta),
                hits,
                estimate: hits as f64 / trials as f64,
                interval: wilson(hits, trials, Z95),
            }
        })
        .collect();
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.hits > 0)
        .map(|p| (p.eps.ln(), p.estimate.ln()))
        .collect();
    Ok(DecayFit {
        point: x,
        level: k,
        trials,
        monotone: points.windows(2).all(|w| w[1].estimate <= w[0].estimate),
        eta_hat: least_squares_slope(&fit),
        fit_points: fit.len(),
        a,
        eta_ref: a.map(|a| reference_eta(a, sampler.opts.delta)),
        points,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Really-good indicator: `xi <= a / p`.
pub fn equalize(p: f64, a: f64, xi: f64) -> Result<bool> {
    let valid = p > 0.0 && p <= 1.0 && a > 0.0 && a <= p && (0.0..=1.0).contains(&xi);
    if !valid {
        return Err(Error::InvalidProbabilities { p, a, xi });
    }
    Ok(xi * p <= a)
}

/// `P(really good) = p * (a / p)` computed in exact arithmetic.
pub fn really_good_probability(p: &BigRational, a: &BigRational) -> Result<BigRational> {
    let zero = BigRational::zero();
    if p <= &zero || p > &BigRational::one() || a <= &zero || a > p {
        return Err(Error::InvalidProbabilities { p: to_f64(p), a: to_f64(a), xi: 0.0 });
    }
    Ok(p * (a / p))
}

/// Default cap on the number of forests an exact enumeration may visit.
pub const DEFAULT_MAX_OUTCOMES: u64 = 1_000_000;

/// Visits every forest reachable by exhaustive-uniform grid sampling and
/// uniform parent choice, with its exact probability. Returns the number
/// of forests visited.
pub fn enumerate_forests(
    space: &FiniteMetricSpace,
    opts: &HierarchyOptions,
    limit: usize,
    max_outcomes: u64,
    mut visit: impl FnMut(&LatticeForest, &BigRational) -> Result<()>,
) -> Result<u64> {
    opts.validate()?;
    if space.is_empty() {
        return Err(Error::InvalidParams("empty space".into()));
    }
    let finest = finest_level(space, opts.delta);
    if opts.coarsest.is_some_and(|c| c > finest) {
        return Err(Error::InvalidParams(format!("coarsest level is finer than the finest level {finest}")));
    }
    let grids = GridSampler::new(crate::grid::SamplingMode::ExhaustiveUniform, limit);
    let start = vec![GridLevel { level: finest, grid: Grid::new(opts.delta.powi(finest), (0..space.len()).collect()) }];
    let mut state = Enumeration { space, opts, grids: &grids, max_outcomes, visited: 0, visit: &mut visit };
    state.grids_from(start, BigRational::one())?;
    Ok(state.visited)
}

struct Enumeration<'a, F> {
    space: &'a FiniteMetricSpace,
    opts: &'a HierarchyOptions,
    grids: &'a GridSampler,
    max_outcomes: u64,
    visited: u64,
    visit: &'a mut F,
}

impl<F: FnMut(&LatticeForest, &BigRational) -> Result<()>> Enumeration<'_, F> {
    /// `levels` runs fine to coarse.
    fn grids_from(&mut self, levels: Vec<GridLevel>, weight: BigRational) -> Result<()> {
        let last = &levels[levels.len() - 1];
        if is_coarsest(self.opts, last.level, &last.grid) {
            let mut levels = levels;
            levels.reverse();
            return self.parents(GridHierarchy { delta: self.opts.delta, levels }, weight);
        }
        let level = last.level - 1;
        let scale = self.opts.delta.powi(level);
        if self.opts.freeze_from.is_some_and(|f| level >= f) {
            let grid = frozen_grid(self.space, &last.grid.members, scale);
            let mut next = levels;
            next.push(GridLevel { level, grid });
            return self.grids_from(next, weight);
        }
        let options = self.grids.enumerate(self.space, &last.grid.members, scale)?;
        let share = &weight / BigRational::from_integer(BigInt::from(options.len()));
        for grid in options.iter() {
            let mut next = levels.clone();
            next.push(GridLevel { level, grid: grid.clone() });
            self.grids_from(next, share.clone())?;
        }
        Ok(())
    }

    fn parents(&mut self, hierarchy: GridHierarchy, weight: BigRational) -> Result<()> {
        // choices[i]: per child of levels[i + 1], its parent options
        let mut choices: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
        for pair in hierarchy.levels.windows(2) {
            let scale = hierarchy.delta.powi(pair[0].level);
            let mut level = Vec::new();
            for &child in &pair[1].grid.members {
                let options = match parent_candidates(self.space, child, &pair[0].grid, scale, pair[0].level)? {
                    ParentChoice::Forced(p) => vec![p],
                    ParentChoice::Random(c) => c,
                };
                level.push((child, options));
            }
            choices.push(level);
        }
        let slots: Vec<&(usize, Vec<usize>)> = choices.iter().flatten().collect();
        let mut count: u64 = 1;
        for s in &slots {
            count = count.saturating_mul(s.1.len() as u64);
        }
        if self.visited.saturating_add(count) > self.max_outcomes {
            return Err(Error::TooLargeForExhaustive {
                size: self.visited.saturating_add(count) as usize,
                limit: self.max_outcomes as usize,
            });
        }
        let share = &weight / BigRational::from_integer(BigInt::from(count));
        let mut digits = vec![0usize; slots.len()];
        loop {
            let mut flat = digits.iter();
            let edges: Vec<Vec<(usize, usize)>> = choices
                .iter()
                .map(|level| {
                    level
                        .iter()
                        .map(|(child, options)| (*child, options[*flat.next().expect("one digit per slot")]))
                        .collect()
                })
                .collect();
            let forest = LatticeForest::from_edges(self.space.len(), hierarchy.clone(), &edges);
            self.visited += 1;
            (self.visit)(&forest, &share)?;
            // mixed-radix increment
            let mut i = 0;
            while i < slots.len() {
                digits[i] += 1;
                if digits[i] < slots[i].1.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == slots.len() {
                return Ok(());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactGoodness {
    pub center: usize,
    pub level: i32,
    pub probability: Fraction,
    #[serde(skip)]
    pub exact: BigRational,
}

/// Exact `P(Q_center is good)` for each center of the level-`k` grid, over
/// the full distribution of forests.
pub fn exact_good_probabilities(
    space: &FiniteMetricSpace,
    k: i32,
    centers: &[usize],
    params: &GoodnessParams,
    opts: &HierarchyOptions,
    limit: usize,
    max_outcomes: u64,
) -> Result<(Vec<ExactGoodness>, u64)> {
    if params.delta != opts.delta {
        return Err(Error::InvalidParams("goodness and lattice delta differ".into()));
    }
    for &c in centers {
        space.check_point(c)?;
    }
    let mut good = vec![BigRational::zero(); centers.len()];
    let mut index = 0u64;
    let visited = enumerate_forests(space, opts, limit, max_outcomes, |forest, weight| {
        for (i, &c) in centers.iter().enumerate() {
            let (cube, atlas) = cube_in_forest(space, forest, k, c, index)?;
            if is_good(space, &cube, &atlas, params) {
                good[i] += weight;
            }
        }
        index += 1;
        Ok(())
    })?;
    let out = centers
        .iter()
        .zip(good)
        .map(|(&center, p)| ExactGoodness { center, level: k, probability: Fraction::from(&p), exact: p })
        .collect();
    Ok((out, visited))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualizationEstimate {
    pub trials: u64,
    pub good: u64,
    pub really_good: u64,
    pub frequency: f64,
    pub target: f64,
    pub sigma: f64,
    /// `(frequency - target) / sigma`.
    pub z: f64,
}

impl EqualizationEstimate {
    pub fn within_sigmas(&self, k: f64) -> bool {
        self.z.abs() <= k
    }
}

/// Frequency of "good and `xi <= a / p`" over seeded forests, `xi` uniform
/// and drawn after the forest from the same trial stream.
#[allow(clippy::too_many_arguments)]
pub fn simulate_equalization(
    space: &FiniteMetricSpace,
    k: i32,
    center: usize,
    params: &GoodnessParams,
    sampler: &LatticeSampler,
    p: f64,
    a: f64,
    trials: u64,
    seed: u64,
) -> Result<EqualizationEstimate> {
    space.check_point(center)?;
    check_delta(params, sampler)?;
    equalize(p, a, 0.0)?;
    let outcomes = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let forest = sampler.sample(space, &mut rng)?;
        let (cube, atlas) = cube_in_forest(space, &forest, k, center, t)?;
        let good = is_good(space, &cube, &atlas, params);
        let xi: f64 = rng.gen();
        Ok((good, good && equalize(p, a, xi)?))
    })?;
    let good = outcomes.iter().filter(|o| o.0).count() as u64;
    let really_good = outcomes.iter().filter(|o| o.1).count() as u64;
    let frequency = really_good as f64 / trials as f64;
    let sigma = (a * (1.0 - a) / trials as f64).sqrt();
    Ok(EqualizationEstimate {
        trials,
        good,
        really_good,
        frequency,
        target: a,
        sigma,
        z: if sigma > 0.0 { (frequency - a) / sigma } else { 0.0 },
    })
}
