use thiserror::Error;

/// Errors raised anywhere in the lattice laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance ({i}, {j}) = {value} is negative or not finite")]
    InvalidEntry { i: usize, j: usize, value: f64 },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("diagonal entry ({i}, {i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("points {i} and {j} are at distance zero")]
    DuplicatePoint { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("{names} point names given for {points} points")]
    NameCount { names: usize, points: usize },
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{size} points exceed the exhaustive enumeration limit of {limit}")]
    TooLargeForExhaustive { size: usize, limit: usize },
    #[error("order is not a permutation of the base set")]
    InvalidOrder,
    #[error("point {child} has no parent candidate at level {level}")]
    NoCandidateParent { child: usize, level: i32 },
    #[error("point {child} has two parents within a quarter scale at level {level}")]
    AmbiguousParent { child: usize, level: i32 },
    #[error("level {0} is not present")]
    UnknownLevel(i32),
    #[error("point {0} is not a cube center at this level")]
    UnknownCenter(usize),
    #[error("cover violated at level {level}: point {point} (distance {distance})")]
    CoverViolation { level: i32, point: usize, distance: f64 },
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("coloring is not in the class W_S: {0}")]
    PreconditionNotWS(String),
    #[error("recoloring is not injective for S = {s:?}: colorings {first} and {second} collide")]
    InjectivityViolation { s: Vec<usize>, first: usize, second: usize },
    #[error("recoloring check failed: {0}")]
    RecoloringFailure(String),
    #[error("center {center} missing from level {level} grid in trial {trial}")]
    CenterNotInGrid { level: i32, center: usize, trial: u64 },
    #[error("number of trials must be positive")]
    InvalidTrials,
    #[error("invalid epsilon schedule: {0}")]
    ScheduleInvalid(String),
    #[error("invalid probabilities p = {p}, a = {a}, xi = {xi}")]
    InvalidProbabilities { p: f64, a: f64, xi: f64 },
    #[error("measure has zero total mass")]
    DegenerateMeasure,
    #[error("weight at point {0} must be positive and finite")]
    InvalidWeight(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
