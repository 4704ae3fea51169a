use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid group: {0}")]
    Group(String),

    #[error("not a subgroup: {0}")]
    Subgroup(String),

    #[error("invalid representation: {0}")]
    Representation(String),

    #[error("invalid action: {0}")]
    Action(String),

    #[error("action is not transitive: orbit of point 0 has {orbit} of {space} points")]
    NotTransitive { orbit: usize, space: usize },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid effect: {0}")]
    Effect(String),

    #[error("invalid POVM: {0}")]
    Povm(String),

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("POVM is not localizable at point {point}: 1 - ||E_x|| = {defect:e}")]
    NotLocalizable { point: usize, defect: f64 },

    #[error("operator is not stabilizer-invariant: max ||h.A - A|| = {defect:e}")]
    NotInvariant { defect: f64 },

    #[error("product POVM effect at ({x}, {y}) is not an effect: {reason}")]
    NonEffectProduct { x: usize, y: usize, reason: String },

    #[error("relativization depends on coset representatives: discrepancy {discrepancy:e}")]
    IllDefined { discrepancy: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown report format `{0}` (expected text, json or csv)")]
    UnknownFormat(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
