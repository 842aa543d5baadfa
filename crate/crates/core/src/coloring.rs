//! Exhaustive analysis of red/green colorings ("1-lattices") of small spaces.
//!
//! A coloring is proper when no two red points are at distance `< 1` and
//! every green point has a red point at distance `< 1`; the red set is then
//! a maximal 1-separated set. Everything here is exact: probabilities are
//! ratios of lattice counts under the uniform distribution on lattices.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::enumerate_maximal_separated;
use crate::metric::{make_space, BallMode, FiniteMetricSpace, SpaceKind};

/// Exact fraction in report form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: String,
    pub denominator: String,
}

impl From<&BigRational> for Fraction {
    fn from(r: &BigRational) -> Self {
        Self { numerator: r.numer().to_string(), denominator: r.denom().to_string() }
    }
}

pub fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-e` as an exact rational.
pub fn inverse_power_of_two(e: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << e)
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProperColoring {
    /// Sorted red points; every other point is green.
    pub red: Vec<usize>,
}

impl ProperColoring {
    pub fn is_red(&self, p: usize) -> bool {
        self.red.binary_search(&p).is_ok()
    }

    fn from_flags(flags: &[bool]) -> Self {
        Self { red: flags.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i).collect() }
    }

    fn flags(&self, n: usize) -> Vec<bool> {
        let mut f = vec![false; n];
        for &r in &self.red {
            f[r] = true;
        }
        f
    }
}

/// Whether `red` defines a proper coloring of the unit-scale space.
pub fn is_proper(space: &FiniteMetricSpace, red: &[bool]) -> bool {
    (0..space.len()).all(|x| {
        let red_near = (0..space.len()).filter(|&y| y != x && red[y] && space.d(x, y) < 1.0).count();
        if red[x] {
            red_near == 0
        } else {
            red_near > 0
        }
    })
}

/// A space at unit grid scale together with every proper coloring of it.
#[derive(Debug, Clone)]
pub struct ColoringUniverse {
    pub space: FiniteMetricSpace,
    pub colorings: Vec<ProperColoring>,
    /// Largest number of points in an open unit ball.
    pub d: usize,
}

/// Enumerates all proper colorings (equivalently all maximal 1-separated sets).
pub fn enumerate_proper_colorings(space: &FiniteMetricSpace, limit: usize) -> Result<ColoringUniverse> {
    let all: Vec<usize> = (0..space.len()).collect();
    let grids = enumerate_maximal_separated(space, &all, 1.0, limit)?;
    let colorings: Vec<ProperColoring> = grids.into_iter().map(|g| ProperColoring { red: g.members }).collect();
    for c in &colorings {
        if !is_proper(space, &c.flags(space.len())) {
            return Err(Error::RecoloringFailure(format!("enumerated coloring {:?} is not proper", c.red)));
        }
    }
    let d = if space.is_empty() { 0 } else { space.max_ball_occupancy(1.0)? };
    Ok(ColoringUniverse { space: space.clone(), colorings, d })
}

/// Rescales by `1 / grid_scale` so that choosing a `grid_scale`-grid becomes
/// choosing a 1-lattice.
pub fn universe_at_scale(space: &FiniteMetricSpace, grid_scale: f64, limit: usize) -> Result<ColoringUniverse> {
    enumerate_proper_colorings(&space.scaled(1.0 / grid_scale)?, limit)
}

impl ColoringUniverse {
    pub fn len(&self) -> usize {
        self.colorings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colorings.is_empty()
    }

    /// Points of the open unit ball around `v`, excluding `v`.
    pub fn punctured_ball(&self, v: usize) -> Vec<usize> {
        self.space.ball_unchecked(v, 1.0, BallMode::Open).filter(|&y| y != v).collect()
    }
}

/// Fraction of 1-lattices that contain `v`.
pub fn membership_probability(universe: &ColoringUniverse, v: usize) -> Result<BigRational> {
    universe.space.check_point(v)?;
    let hits = universe.colorings.iter().filter(|c| c.is_red(v)).count();
    Ok(ratio(hits, universe.colorings.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub vertex: usize,
    pub name: String,
    pub probability: Fraction,
    pub probability_f64: f64,
    /// `P >= 2^-d`.
    pub floor_holds: bool,
    /// `P >= 1 / (1 + 2^(d-1))`, the bound the counting argument yields.
    pub counting_bound_holds: bool,
    /// `P >= 2^-(d-1)`, recorded but not asserted.
    pub stated_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceColoringReport {
    pub points: usize,
    pub d: usize,
    pub lattices: usize,
    pub vertices: Vec<VertexReport>,
    pub min_probability: Fraction,
    pub floor_holds: bool,
    pub counting_bound_holds: bool,
    pub stated_bound_holds: bool,
    /// Spaces whose minimum falls between `1 / (1 + 2^(d-1))` and `2^-(d-1)`.
    pub between_bounds: bool,
}

/// Exact membership probabilities for every vertex with the three bounds.
pub fn analyze_membership(universe: &ColoringUniverse) -> Result<SpaceColoringReport> {
    let d = universe.d;
    let floor = inverse_power_of_two(d);
    let stated = inverse_power_of_two(d.saturating_sub(1));
    let counting = BigRational::one() / (BigRational::one() + BigRational::from_integer(BigInt::one() << d.saturating_sub(1)));
    let mut vertices = Vec::with_capacity(universe.space.len());
    let mut min = BigRational::one();
    for v in 0..universe.space.len() {
        let p = membership_probability(universe, v)?;
        if p < min {
            min = p.clone();
        }
        vertices.push(VertexReport {
            vertex: v,
            name: universe.space.name(v).to_string(),
            probability: Fraction::from(&p),
            probability_f64: to_f64(&p),
            floor_holds: p >= floor,
            counting_bound_holds: p >= counting,
            stated_bound_holds: p >= stated,
        });
    }
    Ok(SpaceColoringReport {
        points: universe.space.len(),
        d,
        lattices: universe.len(),
        floor_holds: vertices.iter().all(|v| v.floor_holds),
        counting_bound_holds: vertices.iter().all(|v| v.counting_bound_holds),
        stated_bound_holds: vertices.iter().all(|v| v.stated_bound_holds),
        between_bounds: min >= counting && min < stated,
        min_probability: Fraction::from(&min),
        vertices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecolorOutcome {
    pub coloring: ProperColoring,
    /// Points outside `B(v,1)` within distance `< 1` of some point of `S`.
    pub s_tilde: Vec<usize>,
    /// Points of `s_tilde` whose open unit ball was entirely green.
    pub yellow: Vec<usize>,
    /// Yellow points turned red.
    pub promoted: Vec<usize>,
}

/// Maps a coloring with `v` green and exactly `s` red inside `B(v,1) \ {v}`
/// to a proper coloring with `v` red:
///
/// 1. `v` becomes red; 2. `S` becomes green;
/// 3. points of `S~` with an all-green open unit ball are marked yellow;
/// 4. yellow points are taken in ascending index order;
/// 5. each yellow point turns red unless it is within `< 1` of one already turned;
/// 6. the remaining yellow points stay green.
pub fn recolor(universe: &ColoringUniverse, coloring: &ProperColoring, v: usize, s: &[usize]) -> Result<RecolorOutcome> {
    let space = &universe.space;
    space.check_point(v)?;
    let n = space.len();
    if coloring.is_red(v) {
        return Err(Error::PreconditionNotWS(format!("v = {v} is red")));
    }
    let ball = universe.punctured_ball(v);
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    if let Some(bad) = s_sorted.iter().find(|p| !ball.contains(p)) {
        return Err(Error::PreconditionNotWS(format!("{bad} is not in the punctured unit ball of {v}")));
    }
    let red_in_ball: Vec<usize> = ball.iter().copied().filter(|&p| coloring.is_red(p)).collect();
    if red_in_ball != s_sorted {
        return Err(Error::PreconditionNotWS(format!(
            "red points near {v} are {red_in_ball:?}, not {s_sorted:?}"
        )));
    }
    let mut red = coloring.flags(n);
    red[v] = true;
    for &p in &s_sorted {
        red[p] = false;
    }
    let s_tilde: Vec<usize> = (0..n)
        .filter(|&y| space.d(v, y) >= 1.0 && s_sorted.iter().any(|&p| space.d(y, p) < 1.0))
        .collect();
    let yellow: Vec<usize> = s_tilde
        .iter()
        .copied()
        .filter(|&y| space.ball_unchecked(y, 1.0, BallMode::Open).all(|z| !red[z]))
        .collect();
    let mut promoted: Vec<usize> = Vec::new();
    for &y in &yellow {
        if promoted.iter().all(|&p| space.d(y, p) >= 1.0) {
            red[y] = true;
            promoted.push(y);
        }
    }
    Ok(RecolorOutcome { coloring: ProperColoring::from_flags(&red), s_tilde, yellow, promoted })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub s: Vec<usize>,
    pub w_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub vertex: usize,
    /// Colorings with `v` red.
    pub b_count: usize,
    /// Nonempty classes `W_S`; every other subset of the punctured ball has an empty class.
    pub classes: Vec<ClassReport>,
    /// Number of subsets `S` of the punctured ball.
    pub subsets: u64,
    pub mapped: usize,
}

/// Applies [`recolor`] to every coloring with `v` green and checks, per class
/// `W_S`: outputs are proper, have `v` red, differ from the input only inside
/// `B(v,1) ∪ S~`, are pairwise distinct, and `|W_S| <= |B|`.
pub fn verify_recoloring_injective(universe: &ColoringUniverse, v: usize) -> Result<InjectivityReport> {
    universe.space.check_point(v)?;
    let n = universe.space.len();
    let ball = universe.punctured_ball(v);
    let b_set: HashSet<&ProperColoring> = universe.colorings.iter().filter(|c| c.is_red(v)).collect();
    let b_count = b_set.len();
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, c) in universe.colorings.iter().enumerate() {
        if !c.is_red(v) {
            let s: Vec<usize> = ball.iter().copied().filter(|&p| c.is_red(p)).collect();
            classes.entry(s).or_default().push(i);
        }
    }
    let mut mapped = 0;
    for (s, members) in &classes {
        if members.len() > b_count {
            return Err(Error::RecoloringFailure(format!(
                "|W_S| = {} exceeds |B| = {b_count} for S = {s:?}",
                members.len()
            )));
        }
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for &i in members {
            let input = &universe.colorings[i];
            let out = recolor(universe, input, v, s)?;
            let flags = out.coloring.flags(n);
            if !is_proper(&universe.space, &flags) {
                return Err(Error::RecoloringFailure(format!("coloring {i} maps to an improper coloring")));
            }
            if !out.coloring.is_red(v) || !b_set.contains(&out.coloring) {
                return Err(Error::RecoloringFailure(format!("coloring {i} does not map into B")));
            }
            let allowed = |x: usize| x == v || ball.contains(&x) || out.s_tilde.contains(&x);
            if let Some(x) = (0..n).find(|&x| !allowed(x) && input.is_red(x) != out.coloring.is_red(x)) {
                return Err(Error::RecoloringFailure(format!("coloring {i} changed point {x} outside B(v,1) ∪ S~")));
            }
            if let Some(&first) = seen.get(&out.coloring.red) {
                return Err(Error::InjectivityViolation { s: s.clone(), first, second: i });
            }
            seen.insert(out.coloring.red, i);
            mapped += 1;
        }
    }
    Ok(InjectivityReport {
        vertex: v,
        b_count,
        classes: classes.into_iter().map(|(s, m)| ClassReport { s, w_count: m.len() }).collect(),
        subsets: 1u64 << ball.len().min(63),
        mapped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeExperiment {
    pub branching: usize,
    pub height: usize,
    pub vertex: usize,
    pub vertices: usize,
    pub lattices: usize,
    pub red_count: usize,
    pub probability: Fraction,
    pub probability_f64: f64,
    /// `P > 1/16`.
    pub exceeds_one_sixteenth: bool,
}

/// Exact probability that vertex `z` of the unit-edge tree is red in a
/// uniformly chosen maximal 2-separated set.
pub fn tree_experiment(branching: usize, height: usize, z: usize, limit: usize) -> Result<TreeExperiment> {
    let tree = make_space(&SpaceKind::Tree { branching, height }, 0)?;
    tree.check_point(z)?;
    let universe = universe_at_scale(&tree, 2.0, limit)?;
    let red_count = universe.colorings.iter().filter(|c| c.is_red(z)).count();
    let p = ratio(red_count, universe.len());
    Ok(TreeExperiment {
        branching,
        height,
        vertex: z,
        vertices: tree.len(),
        lattices: universe.len(),
        red_count,
        probability_f64: to_f64(&p),
        exceeds_one_sixteenth: p > ratio(1, 16),
        probability: Fraction::from(&p),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainLemmaReport {
    pub point: usize,
    /// `P(point is in the coarse grid)`.
    pub p_member: Fraction,
    /// `P(some coarse grid point lies within scale / 1000 of point)`.
    pub p_near: Fraction,
    pub floor: Fraction,
    pub holds: bool,
}

/// For a uniformly chosen maximal `coarse_scale`-separated subset of `base`,
/// the exact probability that one of its points lies within
/// `coarse_scale / 1000` of `point`, compared against `2^-d`.
pub fn main_lemma_exact(
    space: &FiniteMetricSpace,
    base: &[usize],
    coarse_scale: f64,
    point: usize,
    limit: usize,
) -> Result<MainLemmaReport> {
    if !base.contains(&point) {
        return Err(Error::UnknownPoint(point.to_string()));
    }
    let grids = enumerate_maximal_separated(space, base, coarse_scale, limit)?;
    let member = grids.iter().filter(|g| g.contains(point)).count();
    let near = grids
        .iter()
        .filter(|g| g.members.iter().any(|&q| space.d(point, q) < coarse_scale / 1000.0))
        .count();
    let d = space.max_ball_occupancy_in(base, coarse_scale);
    let floor = inverse_power_of_two(d);
    let p_near = ratio(near, grids.len());
    let p_member = ratio(member, grids.len());
    Ok(MainLemmaReport {
        point,
        holds: p_near >= p_member && p_member >= floor,
        p_member: Fraction::from(&p_member),
        p_near: Fraction::from(&p_near),
        floor: Fraction::from(&floor),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_coordinates(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0.0], vec![0.5], vec![1.0]],
        )
        .unwrap()
    }

    /// All subsets that are proper colorings, by brute force.
    fn brute_force_lattices(space: &FiniteMetricSpace) -> Vec<Vec<usize>> {
        let n = space.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let red: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            if is_proper(space, &red) {
                out.push((0..n).filter(|&i| red[i]).collect());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn l3_universe() {
        let u = enumerate_proper_colorings(&line3(), 20).unwrap();
        let reds: Vec<Vec<usize>> = u.colorings.iter().map(|c| c.red.clone()).collect();
        assert_eq!(reds, vec![vec![0, 2], vec![1]]);
        assert_eq!(reds, brute_force_lattices(&line3()));
        assert_eq!(u.d, 3);
    }

    #[test]
    fn trivial_universes() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        let u = enumerate_proper_colorings(&one, 20).unwrap();
        assert_eq!(u.colorings, vec![ProperColoring { red: vec![0] }]);
        assert_eq!(membership_probability(&u, 0).unwrap(), ratio(1, 1));
        let far = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let u = enumerate_proper_colorings(&far, 20).unwrap();
        assert_eq!(u.colorings, vec![ProperColoring { red: vec![0, 1] }]);
    }

    #[test]
    fn l3_membership() {
        let u = enumerate_proper_colorings(&line3(), 20).unwrap();
        assert_eq!(membership_probability(&u, 1).unwrap(), ratio(1, 2));
        assert_eq!(membership_probability(&u, 0).unwrap(), ratio(1, 2));
        assert!(membership_probability(&u, 5).is_err());
        let rep = analyze_membership(&u).unwrap();
        assert!(rep.floor_holds && rep.counting_bound_holds);
        // d = 3: stated bound 1/4, counting bound 1/5, floor 1/8
        assert!(rep.stated_bound_holds);
    }

    #[test]
    fn l3_recolor() {
        let u = enumerate_proper_colorings(&line3(), 20).unwrap();
        let l = ProperColoring { red: vec![0, 2] };
        let out = recolor(&u, &l, 1, &[0, 2]).unwrap();
        assert_eq!(out.coloring.red, vec![1]);
        assert!(out.s_tilde.is_empty() && out.yellow.is_empty());
        let rep = verify_recoloring_injective(&u, 1).unwrap();
        assert_eq!(rep.b_count, 1);
        assert_eq!(rep.mapped, 1);
    }

    #[test]
    fn recolor_rejects_red_v() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        let u = enumerate_proper_colorings(&one, 20).unwrap();
        let l = ProperColoring { red: vec![0] };
        assert!(matches!(recolor(&u, &l, 0, &[]), Err(Error::PreconditionNotWS(_))));
        let far = FiniteMetricSpace::from_matrix(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let u = enumerate_proper_colorings(&far, 20).unwrap();
        let l = ProperColoring { red: vec![0, 1] };
        assert!(matches!(recolor(&u, &l, 0, &[]), Err(Error::PreconditionNotWS(_))));
        assert!(verify_recoloring_injective(&u, 0).unwrap().classes.is_empty());
    }

    #[test]
    fn recolor_rejects_wrong_class() {
        let u = enumerate_proper_colorings(&line3(), 20).unwrap();
        let l = ProperColoring { red: vec![0, 2] };
        assert!(matches!(recolor(&u, &l, 1, &[0]), Err(Error::PreconditionNotWS(_))));
    }

    #[test]
    fn recolor_with_yellow_points() {
        // path q0 - q1 - q2 - q3 - q4 with spacing 0.6: only neighbours conflict
        let space = FiniteMetricSpace::from_coordinates(
            (0..5).map(|i| format!("q{i}")).collect(),
            &[vec![0.0], vec![0.6], vec![1.2], vec![1.8], vec![2.4]],
        )
        .unwrap();
        let u = enumerate_proper_colorings(&space, 20).unwrap();
        assert_eq!(brute_force_lattices(&space), u.colorings.iter().map(|c| c.red.clone()).collect::<Vec<_>>());
        // v = q1, S = {q0, q2}: S~ = {q3}, which still sees red q4
        let l = ProperColoring { red: vec![0, 2, 4] };
        let out = recolor(&u, &l, 1, &[0, 2]).unwrap();
        assert_eq!(out.s_tilde, vec![3]);
        assert!(out.yellow.is_empty());
        assert_eq!(out.coloring.red, vec![1, 4]);
        // v = q1, S = {q0}: S~ is empty
        let l = ProperColoring { red: vec![0, 3] };
        let out = recolor(&u, &l, 1, &[0]).unwrap();
        assert_eq!(out.coloring.red, vec![1, 3]);
        // v = q3, S = {q2, q4}: S~ = {q1}, which still sees red q0
        let out = recolor(&u, &l_for(&[0, 2, 4]), 3, &[2, 4]).unwrap();
        assert_eq!(out.s_tilde, vec![1]);
        assert!(out.yellow.is_empty());
        assert_eq!(out.coloring.red, vec![0, 3]);
        // v = q2, S = {q1}: S~ = {q0} has an all-green ball and turns red
        let out = recolor(&u, &l_for(&[1, 4]), 2, &[1]).unwrap();
        assert_eq!(out.s_tilde, vec![0]);
        assert_eq!(out.yellow, vec![0]);
        assert_eq!(out.coloring.red, vec![0, 2, 4]);
        for v in 0..5 {
            verify_recoloring_injective(&u, v).unwrap();
        }
    }

    fn l_for(red: &[usize]) -> ProperColoring {
        ProperColoring { red: red.to_vec() }
    }

    #[test]
    fn tree_experiment_examples() {
        let path = tree_experiment(1, 1, 0, 20).unwrap();
        assert_eq!(path.lattices, 2);
        assert_eq!(path.probability, Fraction { numerator: "1".into(), denominator: "2".into() });
        let single = tree_experiment(3, 0, 0, 20).unwrap();
        assert_eq!(single.probability.numerator, "1");
        assert_eq!(single.probability.denominator, "1");
        let ternary = tree_experiment(3, 2, 0, 20).unwrap();
        assert!(ternary.exceeds_one_sixteenth);
    }

    #[test]
    fn main_lemma_on_l3() {
        let l3 = line3();
        let rep = main_lemma_exact(&l3, &[0, 1, 2], 1.0, 1, 20).unwrap();
        assert_eq!(rep.p_member, Fraction { numerator: "1".into(), denominator: "2".into() });
        assert!(rep.holds);
    }
}
