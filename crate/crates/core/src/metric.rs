//! Finite metric spaces: validation, ball queries, doubling-type constants
//! and generators for the test families used throughout the crate.

use std::io::Read;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack in the triangle check; absorbs rounding in derived metrics
/// such as Euclidean or snowflaked distances of collinear points.
const TRIANGLE_SLACK: f64 = 1e-12;

/// Largest space for which [`FiniteMetricSpace::doubling_exact`] runs.
pub const EXACT_DOUBLING_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallMode {
    Open,
    Closed,
}

impl BallMode {
    #[inline]
    pub fn contains(self, distance: f64, radius: f64) -> bool {
        match self {
            BallMode::Open => distance < radius,
            BallMode::Closed => distance <= radius,
        }
    }
}

/// A validated finite metric space. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    names: Vec<String>,
    dist: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpaceJson {
    points: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates a square distance matrix, naming points `p0, p1, ...`.
    pub fn from_matrix(matrix: &[Vec<f64>]) -> Result<Self> {
        let names = (0..matrix.len()).map(|i| format!("p{i}")).collect();
        Self::with_names(names, matrix)
    }

    pub fn with_names(names: Vec<String>, matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        if names.len() != n {
            return Err(Error::NameCount { names: names.len(), points: n });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidEntry { i, j, value: v });
                }
            }
        }
        for (i, row) in matrix.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::NonzeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if matrix[i][j] == 0.0 {
                    return Err(Error::DuplicatePoint { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = matrix[i][j];
                for k in 0..n {
                    if matrix[i][k] > (dij + matrix[j][k]) * (1.0 + TRIANGLE_SLACK) {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        let dist = matrix.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Self { names, dist })
    }

    /// Euclidean distances between coordinate rows.
    pub fn from_coordinates(names: Vec<String>, coords: &[Vec<f64>]) -> Result<Self> {
        let matrix: Vec<Vec<f64>> = coords
            .iter()
            .map(|a| coords.iter().map(|b| euclidean(a, b)).collect())
            .collect();
        Self::with_names(names, &matrix)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn check_point(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(i.to_string()))
        }
    }

    /// Distance between points `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Smallest distance between distinct points, `+inf` for fewer than two points.
    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(self.d(i, j));
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted, deduplicated positive pairwise distances.
    pub fn pairwise_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.d(i, j));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn ball(&self, center: usize, radius: f64, mode: BallMode) -> Result<Vec<usize>> {
        self.check_point(center)?;
        if !(radius >= 0.0) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(self.ball_unchecked(center, radius, mode).collect())
    }

    pub(crate) fn ball_unchecked(
        &self,
        center: usize,
        radius: f64,
        mode: BallMode,
    ) -> impl Iterator<Item = usize> + '_ {
        self.row(center)
            .iter()
            .enumerate()
            .filter(move |(_, &d)| mode.contains(d, radius))
            .map(|(i, _)| i)
    }

    /// Distance from `x` to a point set; `+inf` for the empty set.
    pub fn dist_to_set(&self, x: usize, set: impl IntoIterator<Item = usize>) -> f64 {
        let row = self.row(x);
        set.into_iter().map(|y| row[y]).fold(f64::INFINITY, f64::min)
    }

    /// Minimum pairwise distance between two point sets; `+inf` if either is empty.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter()
            .map(|&x| self.dist_to_set(x, b.iter().copied()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn set_diameter(&self, set: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (idx, &a) in set.iter().enumerate() {
            for &b in &set[idx + 1..] {
                best = best.max(self.d(a, b));
            }
        }
        best
    }

    /// Largest number of points in an open ball of the given radius centered at a point.
    pub fn max_ball_occupancy(&self, radius: f64) -> Result<usize> {
        if !(radius > 0.0) || radius.is_nan() {
            return Err(Error::InvalidRadius(radius));
        }
        Ok((0..self.len())
            .map(|c| self.ball_unchecked(c, radius, BallMode::Open).count())
            .max()
            .unwrap_or(0))
    }

    /// Same as [`max_ball_occupancy`](Self::max_ball_occupancy) restricted to a subset.
    pub fn max_ball_occupancy_in(&self, subset: &[usize], radius: f64) -> usize {
        subset
            .iter()
            .map(|&c| subset.iter().filter(|&&y| self.d(c, y) < radius).count())
            .max()
            .unwrap_or(0)
    }

    /// Radii at which some ball changes: every pairwise distance and its half.
    fn critical_radii(&self) -> Vec<f64> {
        let mut radii: Vec<f64> = self
            .pairwise_distances()
            .into_iter()
            .flat_map(|d| [d, d / 2.0])
            .collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        radii
    }

    /// Upper bound on the doubling constant: for every closed ball `B(x, 2r)`
    /// a greedy cover by closed `r`-balls centered at its points.
    pub fn doubling_estimate(&self) -> usize {
        let mut best = 1;
        for r in self.critical_radii() {
            for x in 0..self.len() {
                let big: Vec<usize> = self.ball_unchecked(x, 2.0 * r, BallMode::Closed).collect();
                let mut covered = vec![false; self.len()];
                let mut count = 0;
                for &p in &big {
                    if covered[p] {
                        continue;
                    }
                    count += 1;
                    for &q in &big {
                        if self.d(p, q) <= r {
                            covered[q] = true;
                        }
                    }
                }
                best = best.max(count);
            }
        }
        best
    }

    /// Exact doubling constant with centers in the space, by brute force.
    pub fn doubling_exact(&self) -> Result<usize> {
        let n = self.len();
        if n > EXACT_DOUBLING_LIMIT {
            return Err(Error::TooLargeForExhaustive { size: n, limit: EXACT_DOUBLING_LIMIT });
        }
        let mut best = 1;
        for r in self.critical_radii() {
            let small: Vec<u32> = (0..n)
                .map(|c| {
                    self.ball_unchecked(c, r, BallMode::Closed)
                        .fold(0u32, |m, i| m | (1 << i))
                })
                .collect();
            for x in 0..n {
                let target = self
                    .ball_unchecked(x, 2.0 * r, BallMode::Closed)
                    .fold(0u32, |m, i| m | (1 << i));
                let need = (0u32..(1 << n))
                    .filter(|centers| {
                        let cover = (0..n)
                            .filter(|c| centers & (1 << c) != 0)
                            .fold(0u32, |m, c| m | small[c]);
                        cover & target == target
                    })
                    .map(|centers| centers.count_ones() as usize)
                    .min()
                    .unwrap_or(0);
                best = best.max(need);
            }
        }
        Ok(best)
    }

    /// Multiplies every distance by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParams(format!("scale factor {factor}")));
        }
        Ok(Self {
            names: self.names.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
        })
    }

    /// The snowflake transform `d -> d^alpha`, `alpha` in `(0, 1]`.
    pub fn snowflake(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("snowflake exponent {alpha} not in (0, 1]")));
        }
        Self::with_names(
            self.names.clone(),
            &self
                .matrix()
                .into_iter()
                .map(|r| r.into_iter().map(|d| d.powf(alpha)).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn sub_space(&self, points: &[usize]) -> Result<Self> {
        let names = points.iter().map(|&i| self.names[i].clone()).collect();
        let matrix: Vec<Vec<f64>> = points
            .iter()
            .map(|&i| points.iter().map(|&j| self.d(i, j)).collect())
            .collect();
        Self::with_names(names, &matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SpaceJson { points: self.names.clone(), dist: self.matrix() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceJson = serde_json::from_str(text)?;
        Self::with_names(doc.points, &doc.dist)
    }

    /// Reads coordinate rows, optionally prefixed by a point name. A leading
    /// row with no numeric field is treated as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut names = Vec::new();
        let mut coords = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
            if fields.is_empty() {
                continue;
            }
            let numeric: Vec<Option<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
            if line == 0 && numeric.iter().all(Option::is_none) {
                continue;
            }
            let (name, values) = match numeric[0] {
                Some(_) => (format!("p{}", names.len()), &numeric[..]),
                None => (fields[0].to_string(), &numeric[1..]),
            };
            let row = values
                .iter()
                .map(|v| v.ok_or_else(|| Error::Parse(format!("non-numeric coordinate on row {line}"))))
                .collect::<Result<Vec<f64>>>()?;
            names.push(name);
            coords.push(row);
        }
        if let Some(first) = coords.first() {
            if coords.iter().any(|c| c.len() != first.len()) {
                return Err(Error::Parse("coordinate rows differ in dimension".into()));
            }
        }
        Self::from_coordinates(names, &coords)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Families of generated test spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    /// Rooted tree with unit edges and shortest-path metric; vertex 0 is the root,
    /// vertices are numbered breadth first.
    Tree { branching: usize, height: usize },
    /// Regular lattice `{0, .., side-1}^dim * spacing` with Euclidean distances.
    GridPoints { side: usize, dim: usize, spacing: f64 },
    /// Uniform points in `[0, extent)^dim`.
    RandomCloud { n: usize, dim: usize, extent: f64 },
    /// Multi-scale cloud: each node at depth `i` spawns `branching` children
    /// displaced uniformly within `ratio^(i+1)` per coordinate; the leaves are
    /// the points.
    ClusterCloud { depth: usize, branching: usize, ratio: f64, dim: usize },
    /// `d -> d^alpha` applied to a generated base space.
    Snowflake { base: Box<SpaceKind>, alpha: f64 },
}

/// Builds a space of the given kind; deterministic for a fixed seed.
pub fn make_space(kind: &SpaceKind, seed: u64) -> Result<FiniteMetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SpaceKind::Tree { branching, height } => tree_space(*branching, *height),
        SpaceKind::GridPoints { side, dim, spacing } => {
            if *side == 0 || *dim == 0 || !(*spacing > 0.0) {
                return Err(Error::InvalidParams("grid needs side, dim, spacing > 0".into()));
            }
            let count = side.pow(*dim as u32);
            let coords: Vec<Vec<f64>> = (0..count)
                .map(|mut idx| {
                    (0..*dim)
                        .map(|_| {
                            let c = idx % side;
                            idx /= side;
                            c as f64 * spacing
                        })
                        .collect()
                })
                .collect();
            let names = (0..count).map(|i| format!("g{i}")).collect();
            FiniteMetricSpace::from_coordinates(names, &coords)
        }
        SpaceKind::RandomCloud { n, dim, extent } => {
            if *n == 0 || *dim == 0 || !(*extent > 0.0) {
                return Err(Error::InvalidParams("cloud needs n, dim, extent > 0".into()));
            }
            let coords: Vec<Vec<f64>> = (0..*n)
                .map(|_| (0..*dim).map(|_| rng.gen::<f64>() * extent).collect())
                .collect();
            let names = (0..*n).map(|i| format!("p{i}")).collect();
            FiniteMetricSpace::from_coordinates(names, &coords)
        }
        SpaceKind::ClusterCloud { depth, branching, ratio, dim } => {
            if *branching == 0 || *dim == 0 || !(*ratio > 0.0 && *ratio < 1.0) {
                return Err(Error::InvalidParams("cluster cloud needs branching, dim > 0 and ratio in (0,1)".into()));
            }
            let mut nodes = vec![vec![0.0; *dim]];
            for level in 0..*depth {
                let spread = ratio.powi(level as i32 + 1);
                nodes = nodes
                    .iter()
                    .flat_map(|p| {
                        (0..*branching)
                            .map(|_| p.iter().map(|c| c + rng.gen_range(-spread..spread)).collect::<Vec<f64>>())
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            let names = (0..nodes.len()).map(|i| format!("c{i}")).collect();
            FiniteMetricSpace::from_coordinates(names, &nodes)
        }
        SpaceKind::Snowflake { base, alpha } => {
            make_space(base, seed)?.snowflake(*alpha)
        }
    }
}

fn tree_space(branching: usize, height: usize) -> Result<FiniteMetricSpace> {
    if branching == 0 && height > 0 {
        return Err(Error::InvalidParams("tree branching must be positive".into()));
    }
    // parent[v] and depth[v] in breadth-first numbering
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut depth = vec![0usize];
    let mut frontier = vec![0usize];
    for h in 1..=height {
        let mut next = Vec::new();
        for &p in &frontier {
            for _ in 0..branching {
                parent.push(Some(p));
                depth.push(h);
                next.push(parent.len() - 1);
            }
        }
        frontier = next;
    }
    let n = parent.len();
    let ancestors = |mut v: usize| {
        let mut chain = vec![v];
        while let Some(p) = parent[v] {
            chain.push(p);
            v = p;
        }
        chain
    };
    let chains: Vec<Vec<usize>> = (0..n).map(ancestors).collect();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    let lca_depth = chains[u]
                        .iter()
                        .find(|a| chains[v].contains(a))
                        .map(|&a| depth[a])
                        .unwrap_or(0);
                    (depth[u] + depth[v] - 2 * lca_depth) as f64
                })
                .collect()
        })
        .collect();
    let names = (0..n).map(|i| format!("v{i}")).collect();
    FiniteMetricSpace::with_names(names, &matrix)
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

    #[test]
    fn validate_examples() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        assert_eq!(one.len(), 1);
        let two = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(two.d(0, 1), 1.0);
        let bad = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ]);
        assert!(matches!(bad, Err(Error::TriangleViolation { i: 0, j: 1, k: 2 })));
    }

    #[test]
    fn validate_error_kinds() {
        let asym = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(asym, Err(Error::AsymmetricMatrix { i: 0, j: 1 })));
        let diag = FiniteMetricSpace::from_matrix(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(diag, Err(Error::NonzeroDiagonal { i: 0 })));
        let dup = FiniteMetricSpace::from_matrix(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(dup, Err(Error::DuplicatePoint { i: 0, j: 1 })));
        let neg = FiniteMetricSpace::from_matrix(&[vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert!(matches!(neg, Err(Error::InvalidEntry { .. })));
        let ragged = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![1.0]]);
        assert!(matches!(ragged, Err(Error::NotSquare { row: 1, .. })));
    }

    #[test]
    fn ball_examples() {
        let l3 = line3();
        assert_eq!(l3.ball(0, 1.0, BallMode::Open).unwrap(), vec![0, 1]);
        assert_eq!(l3.ball(1, 0.6, BallMode::Open).unwrap(), vec![0, 1, 2]);
        assert!(l3.ball(0, 0.0, BallMode::Open).unwrap().is_empty());
        assert_eq!(l3.ball(0, 1.0, BallMode::Closed).unwrap(), vec![0, 1, 2]);
        assert!(matches!(l3.ball(7, 1.0, BallMode::Open), Err(Error::UnknownPoint(_))));
        assert!(matches!(l3.ball(0, -1.0, BallMode::Open), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn occupancy_examples() {
        assert_eq!(line3().max_ball_occupancy(1.0).unwrap(), 3);
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        assert_eq!(one.max_ball_occupancy(1.0).unwrap(), 1);
        let far = FiniteMetricSpace::from_matrix(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(far.max_ball_occupancy(1.0).unwrap(), 1);
        assert!(line3().max_ball_occupancy(0.0).is_err());
    }

    #[test]
    fn doubling_examples() {
        let one = FiniteMetricSpace::from_matrix(&[vec![0.0]]).unwrap();
        assert_eq!(one.doubling_estimate(), 1);
        let two = FiniteMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(two.doubling_estimate() <= 2);
        let l3 = line3();
        // brute force: r = 0.25 forces three singleton balls inside B(b, 0.5)
        assert_eq!(l3.doubling_exact().unwrap(), 3);
        assert!(l3.doubling_estimate() <= 3);
        assert!(l3.doubling_estimate() >= l3.doubling_exact().unwrap());
    }

    #[test]
    fn generator_examples() {
        let star = make_space(&SpaceKind::Tree { branching: 3, height: 1 }, 0).unwrap();
        assert_eq!(star.len(), 4);
        for leaf in 1..4 {
            assert_eq!(star.d(0, leaf), 1.0);
            for other in 1..4 {
                if other != leaf {
                    assert_eq!(star.d(leaf, other), 2.0);
                }
            }
        }
        let pair = FiniteMetricSpace::from_matrix(&[vec![0.0, 4.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(pair.snowflake(0.5).unwrap().d(0, 1), 2.0);
        let kind = SpaceKind::RandomCloud { n: 8, dim: 2, extent: 1.0 };
        assert_eq!(make_space(&kind, 7).unwrap(), make_space(&kind, 7).unwrap());
        assert_ne!(make_space(&kind, 7).unwrap(), make_space(&kind, 8).unwrap());
        assert!(pair.snowflake(1.5).is_err());
    }

    #[test]
    fn tree_depth_two_distances() {
        let t = make_space(&SpaceKind::Tree { branching: 2, height: 2 }, 0).unwrap();
        assert_eq!(t.len(), 7);
        // v3, v4 are children of v1; v5 is a child of v2
        assert_eq!(t.d(3, 4), 2.0);
        assert_eq!(t.d(3, 5), 4.0);
        assert_eq!(t.d(0, 6), 2.0);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let l3 = line3();
        let back = FiniteMetricSpace::from_json(&l3.to_json().unwrap()).unwrap();
        assert_eq!(back, l3);
        let csv = "name,x\na,0\nb,0.5\nc,1.0\n";
        let from_csv = FiniteMetricSpace::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(from_csv, l3);
        let unnamed = FiniteMetricSpace::from_csv_reader("0,0\n3,4\n".as_bytes()).unwrap();
        assert_eq!(unnamed.d(0, 1), 5.0);
    }

    #[test]
    fn set_distances() {
        let l3 = line3();
        assert_eq!(l3.set_distance(&[0], &[2]), 1.0);
        assert_eq!(l3.set_distance(&[0], &[]), f64::INFINITY);
        assert_eq!(l3.dist_to_set(1, [0, 2]), 0.5);
        assert_eq!(l3.set_diameter(&[0, 1, 2]), 1.0);
    }
}
