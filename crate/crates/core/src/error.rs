use thiserror::Error;

/// Errors raised while building or analysing polytopes, orbifolds and their
/// deformation data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 3, got {0}")]
    BadDimension(usize),

    #[error("facet id {id} is out of range (there are {count} facets)")]
    DanglingFacet { id: usize, count: usize },

    #[error("ridge ({0}, {0}) joins a facet to itself")]
    SelfRidge(usize),

    #[error("ridge ({0}, {1}) is listed twice")]
    DuplicateRidge(usize, usize),

    #[error("vertex {index} has {found} facets, a simple {dim}-polytope needs {dim}")]
    VertexSize { index: usize, found: usize, dim: usize },

    #[error("facets {0} and {1} share a vertex but are not listed as a ridge")]
    MissingRidge(usize, usize),

    #[error("polytope is not simple: {0}")]
    NotSimple(String),

    #[error("skeleton is not planar: {0}")]
    NotPlanar(String),

    #[error("skeleton is not 3-connected")]
    NotThreeConnected,

    #[error("vertex id {0} does not exist")]
    UnknownVertex(usize),

    #[error("operation needs a 3-dimensional polytope")]
    NeedsDimensionThree,

    #[error("operation needs vertex incidences, which were not supplied")]
    MissingVertices,

    #[error("circuit length must be 3 or 4, got {0}")]
    CircuitLength(usize),

    #[error("ridge ({0}, {1}) has order {2}; orders must be at least 2")]
    OrderTooSmall(usize, usize, u32),

    #[error("ridge ({0}, {1}) has no order")]
    MissingOrder(usize, usize),

    #[error("order given for ({0}, {1}), which is not a ridge")]
    ExtraOrder(usize, usize),

    #[error("vertex {vertex:?} has a non-elliptic group (orders {orders:?})")]
    NonElliptic { vertex: Vec<usize>, orders: Vec<u32> },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("off-diagonal sign pattern fails at ({0}, {1})")]
    SignPattern(usize, usize),

    #[error("matrix is decomposable")]
    Decomposable,

    #[error("Cartan matrix has rank {found}, expected {expected}")]
    CartanRank { found: usize, expected: usize },

    #[error("Cartan matrix has a zero-type component {0:?}")]
    ZeroTypeComponent(Vec<usize>),

    #[error("Gram matrix has the wrong signature ({negative} negative, {zero} zero, {positive} positive eigenvalues)")]
    WrongSignature { negative: usize, zero: usize, positive: usize },

    #[error("Gram matrix is of zero type (Euclidean)")]
    ZeroTypeGram,

    #[error("base polytope is not a simplex")]
    NotSimplex,

    #[error("Newton iteration diverged: {0}")]
    Divergence(String),

    #[error("realization fails validation: {0}")]
    InvalidRealization(String),

    #[error("gauge matrix is singular")]
    SingularGauge,

    #[error("gauge matrix has |det| = {0}, expected 1")]
    NotUnimodular(f64),

    #[error("diagonal gauge entries must be positive")]
    NonPositiveScaling,

    #[error("point is not a zero of the Vinberg equations (max residual {0:e})")]
    NotAZero(f64),

    #[error("gauge orbit is not free: gauge directions have rank {found}, expected {expected}")]
    GaugeNotFree { found: usize, expected: usize },

    #[error("family has {0} free parameters, expected 2")]
    ParameterCount(usize),

    #[error("graph precondition violated: {0}")]
    GraphPrecondition(String),

    #[error("graph has {0} edges; removable edges need more than 6")]
    GraphTooSmall(usize),

    #[error("no perfect matching contains edge {0:?}")]
    NoFactor((usize, usize)),

    #[error("orbifold precondition violated: {0}")]
    CircuitPrecondition(String),

    #[error("exact enumeration refused: {edges} edges exceeds the budget of {budget}")]
    ExactBudget { edges: usize, budget: usize },

    #[error("count overflowed 128 bits")]
    CountOverflow,

    #[error("rejection sampling gave up after {0} draws")]
    SamplingStalled(usize),

    #[error("order bound d must be at least 2, got {0}")]
    OrderBound(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
