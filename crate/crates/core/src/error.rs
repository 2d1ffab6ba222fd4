use thiserror::Error;

use crate::saddles::Regime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WrightError {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("series did not converge within {max_terms} terms")]
    NoConvergence { max_terms: usize },

    /// Cancellation in the alternating series left fewer than 16 significant
    /// digits. `value` is the best available estimate.
    #[error("only {digits:.1} significant digits survived cancellation (value {value:e})")]
    PrecisionLoss { digits: f64, value: f64 },

    #[error("no real saddle: (lambda={lambda}, a={a}) lies below the double-saddle curve")]
    NoRealSaddle { lambda: f64, a: f64 },

    #[error("saddle iteration failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("descent path step underflow at u = {re} + {im}i")]
    StepFailure { re: f64, im: f64 },

    #[error("parameters lie on a Stokes boundary: descent path from saddle {from} connects to saddle {to}")]
    OnStokesBoundary { from: usize, to: usize },

    #[error("no Stokes boundary for pair {pair} at lambda={lambda} in the swept interval")]
    NoBoundary { lambda: f64, pair: usize },

    #[error("degenerate saddle: |h''| = {0:e} is too small for the simple-saddle expansion")]
    DegenerateSaddle(f64),

    #[error("expansion not valid in regime {regime:?}; use {suggestion}")]
    WrongRegime { regime: Regime, suggestion: &'static str },
}

pub type Result<T> = std::result::Result<T, WrightError>;
