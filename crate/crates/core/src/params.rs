//! Parameter bundles and the result record shared by the oracle and the CLI.

use std::fmt;

use crate::error::{Result, WrightError};
use crate::scalar::BigReal;

/// Which scaled Wright function: `Minus` is the alternating W⁻ (negative
/// argument), `Plus` is W⁺ (positive argument).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// +1 for `Plus`, -1 for `Minus`.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        })
    }
}

/// Parameters of the unscaled function W_{λ,μ}(z) = Σ zⁿ / (n! Γ(λn+μ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightParams {
    pub lambda: f64,
    pub mu: f64,
}

impl WrightParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        validate(WrightParams { lambda, mu })
    }
}

/// The defining series converges for every finite argument only when λ > -1.
pub fn validate(params: WrightParams) -> Result<WrightParams> {
    if !params.mu.is_finite() {
        return Err(WrightError::Domain(format!("mu must be finite, got {}", params.mu)));
    }
    if params.lambda.is_nan() || params.lambda <= -1.0 || !params.lambda.is_finite() {
        return Err(WrightError::Domain(format!(
            "lambda must satisfy lambda > -1, got {}",
            params.lambda
        )));
    }
    Ok(params)
}

/// Arguments of the scaled functions W^±_{λ,ν}(x) with ν = a·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledArgs {
    lambda: f64,
    a: f64,
    x: f64,
    sign: Sign,
}

impl ScaledArgs {
    pub fn new(lambda: f64, a: f64, x: f64, sign: Sign) -> Result<Self> {
        validate(WrightParams { lambda, mu: 1.0 })?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(WrightError::Domain(format!("a must be positive, got {a}")));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(WrightError::Domain(format!("x must be positive, got {x}")));
        }
        Ok(ScaledArgs { lambda, a, x, sign })
    }

    pub fn minus(lambda: f64, a: f64, x: f64) -> Result<Self> {
        Self::new(lambda, a, x, Sign::Minus)
    }

    pub fn plus(lambda: f64, a: f64, x: f64) -> Result<Self> {
        Self::new(lambda, a, x, Sign::Plus)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// ν = a·x rounded to double.
    pub fn nu(&self) -> f64 {
        self.a * self.x
    }

    /// ν = a·x formed without rounding (the product of two doubles needs at
    /// most 106 bits, so any `bits >= 106` is exact).
    pub fn nu_exact(&self, bits: usize) -> BigReal {
        BigReal::from_f64(self.a, bits.max(128)) * BigReal::from_f64(self.x, bits.max(128))
    }

    /// The Wright parameters (λ, μ = ν+1) of the underlying unscaled function.
    pub fn wright_params(&self) -> WrightParams {
        WrightParams { lambda: self.lambda, mu: self.nu() + 1.0 }
    }
}

/// Outcome of a summation: the value and its convergence history.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: f64,
    /// Running sums rounded to double; `partial_sums.len() == truncation_index + 1`.
    pub partial_sums: Vec<f64>,
    pub truncation_index: usize,
    pub last_term_magnitude: f64,
    /// Decimal digits left after cancellation between the largest term and the sum.
    pub surviving_digits: f64,
    /// The sum at working precision, kept for differences that cancel below
    /// double resolution.
    pub exact: BigReal,
}
