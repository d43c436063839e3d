use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    Parse(String),

    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingVertex { edge: String, vertex: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid length function: {0}")]
    InvalidLength(String),

    #[error("collapse set contains a cycle through edge {0}")]
    CollapseCycle(usize),

    #[error("expected {expected} vectors, got {got}")]
    VectorCount { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row}, largest {largest:e})")]
    NotPositiveDefinite { row: usize, pivot: f64, largest: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("cocycle is singular (rank {rank} < {dim})")]
    SingularCocycle { rank: usize, dim: usize },

    #[error("spanning tree omits edge {0} of less than maximal length")]
    TreeMissesShortEdge(usize),

    #[error("cut leaves a cycle through edge {0}")]
    CutNotForest(usize),

    #[error("not a tree: {0}")]
    NotATree(String),

    #[error("tree is not taut: {0}")]
    NotTaut(String),

    #[error("negative argument {0} to psi")]
    NegativeArgument(f64),

    #[error("subdivision point must lie strictly inside the edge (got {0})")]
    SubdivisionEndpoint(f64),

    #[error("contour extraction requires rank 2, got rank {0}")]
    RankNotTwo(usize),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("barycentric parameter is outside the simplex: {0}")]
    OutsideSimplex(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
