//! Reference values by direct summation of the defining series in
//! arbitrary precision.
//!
//! The alternating W⁻ series at x = 40 has peak terms up to twenty orders of
//! magnitude above the sum, so the working precision carries the
//! cancellation; terms are summed in ascending order with a compensated
//! accumulator.

use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::error::{Result, WrightError};
use crate::params::{validate, EvalResult, ScaledArgs, Sign, WrightParams};
use crate::scalar::{bits_for_digits, BigReal, CompensatedSum};

/// Precision budget for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    decimal_digits: u32,
    max_terms: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { decimal_digits: 60, max_terms: 100_000 }
    }
}

impl PrecisionConfig {
    /// Fewer than 30 digits cannot absorb the W⁻ cancellation at x = 40.
    pub fn new(decimal_digits: u32, max_terms: usize) -> Result<Self> {
        if decimal_digits < 30 {
            return Err(WrightError::Domain(format!(
                "decimal_digits must be at least 30, got {decimal_digits}"
            )));
        }
        if decimal_digits > 1000 {
            return Err(WrightError::Domain(format!(
                "decimal_digits above 1000 is not supported, got {decimal_digits}"
            )));
        }
        if max_terms == 0 {
            return Err(WrightError::Domain("max_terms must be positive".into()));
        }
        Ok(PrecisionConfig { decimal_digits, max_terms })
    }

    pub fn with_digits(decimal_digits: u32) -> Result<Self> {
        Self::new(decimal_digits, PrecisionConfig::default().max_terms)
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Mantissa length used for the summation.
    pub fn bits(&self) -> usize {
        bits_for_digits(self.decimal_digits)
    }
}

// Bernoulli numbers B_2, B_4, ... as exact fractions, from the tangent
// numbers T_k (B_2k = (-1)^(k-1) 2k T_k / (4^k (4^k - 1))).
const BERNOULLI_PAIRS: usize = 400;

fn bernoulli_table() -> &'static [(BigInt, BigInt)] {
    static TABLE: OnceLock<Vec<(BigInt, BigInt)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = BERNOULLI_PAIRS;
        let mut t: Vec<BigInt> = Vec::with_capacity(n + 1);
        t.push(BigInt::from(0));
        let mut fact = BigInt::from(1);
        for k in 1..=n {
            if k > 1 {
                fact *= k - 1;
            }
            t.push(fact.clone());
        }
        for k in 2..=n {
            for j in k..=n {
                let prev = t[j - 1].clone();
                t[j] = prev * (j - k) + &t[j] * (j - k + 2);
            }
        }
        (1..=n)
            .map(|k| {
                let four_k = BigInt::from(1) << (2 * k);
                let den = &four_k * (&four_k - 1);
                let mut num = &t[k] * (2 * k);
                if k % 2 == 0 {
                    num = -num;
                }
                (num, den)
            })
            .collect()
    })
}

/// Stirling coefficients B_2k / (2k(2k-1)) at the given precision.
fn stirling_coefficients(bits: usize) -> Vec<BigReal> {
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<usize, Vec<BigReal>>> =
            Default::default();
    }
    CACHE.with(|c| {
        c.borrow_mut()
            .entry(bits)
            .or_insert_with(|| {
                bernoulli_table()
                    .iter()
                    .enumerate()
                    .map(|(i, (num, den))| {
                        let k = (i + 1) as u64;
                        let b = BigReal::parse(&num.to_string(), bits)
                            / BigReal::parse(&den.to_string(), bits);
                        b / BigReal::from_u64(2 * k * (2 * k - 1), bits)
                    })
                    .collect()
            })
            .clone()
    })
}

/// ln|Γ(y)| and whether Γ(y) < 0. `None` at the poles y = 0, -1, -2, ...
pub fn ln_gamma(y: &BigReal, digits: u32) -> Option<(BigReal, bool)> {
    let bits = y.bits();
    if !y.is_negative() && y.is_zero() || (y.is_negative() && y.is_integer()) {
        return None;
    }
    // Shift the argument up until the Stirling tail falls below the digit
    // budget within the tabulated Bernoulli numbers.
    let threshold = (0.75 * digits as f64).ceil().max(10.0) + 10.0;
    let y_f = y.to_f64();
    let shift = if y_f < threshold { (threshold - y_f).ceil() as u64 } else { 0 };

    let mut z = y.clone();
    let mut prod = BigReal::one(bits);
    for _ in 0..shift {
        prod = prod * &z;
        z = z + BigReal::one(bits);
    }
    let negative = prod.is_negative();

    let half = BigReal::from_f64(0.5, bits);
    let two_pi = BigReal::pi(bits) * BigReal::from_u64(2, bits);
    let ln_z = z.ln();
    let mut acc = (&z - &half) * &ln_z - &z + half * two_pi.ln();

    let tol_log2 = -(digits as f64 + 8.0) * std::f64::consts::LOG2_10;
    let coeffs = stirling_coefficients(bits);
    let inv_z = z.recip();
    let inv_z2 = &inv_z * &inv_z;
    let mut zpow = inv_z;
    let scale = acc.log2_abs().max(0.0);
    let mut converged = false;
    for c in coeffs.iter() {
        let term = c * &zpow;
        acc = acc + &term;
        if term.log2_abs() < tol_log2 + scale {
            converged = true;
            break;
        }
        zpow = zpow * &inv_z2;
    }
    debug_assert!(converged, "Stirling series exhausted the Bernoulli table");

    let ln_abs = if shift > 0 { acc - prod.abs().ln() } else { acc };
    Some((ln_abs, negative))
}

/// 1/Γ(y) at the oracle precision; exactly zero at the poles of Γ.
pub fn recip_gamma(y: f64, prec: PrecisionConfig) -> BigReal {
    recip_gamma_big(&BigReal::from_f64(y, prec.bits()), prec.decimal_digits)
}

/// [`recip_gamma`] for an argument already held at working precision.
pub fn recip_gamma_big(y: &BigReal, digits: u32) -> BigReal {
    match ln_gamma(y, digits) {
        None => BigReal::zero(y.bits()),
        Some((ln_abs, negative)) => {
            let v = (-ln_abs).exp();
            if negative {
                -v
            } else {
                v
            }
        }
    }
}

/// Sums prefactor · Σ qⁿ / (n! Γ(λn + μ)).
fn sum_series(
    prefactor: &BigReal,
    q: &BigReal,
    lambda: &BigReal,
    mu: &BigReal,
    prec: PrecisionConfig,
) -> Result<EvalResult> {
    let bits = prec.bits();
    let digits = prec.decimal_digits;
    let stop_log2 = -(digits as f64 + 10.0) * std::f64::consts::LOG2_10;

    let mut acc = CompensatedSum::new(BigReal::zero(bits));
    let mut partial_sums = Vec::new();
    let mut qpow = prefactor.clone();
    let mut fact = BigReal::one(bits);
    let mut max_log2 = f64::NEG_INFINITY;
    let mut peak_log2 = f64::NEG_INFINITY;
    let mut peak_index = 0usize;
    let mut last_term = BigReal::zero(bits);

    for n in 0..prec.max_terms {
        if n > 0 {
            qpow = qpow * q;
            fact = fact * BigReal::from_u64(n as u64, bits);
        }
        let arg = lambda * &BigReal::from_u64(n as u64, bits) + mu;
        let term = &qpow * &recip_gamma_big(&arg, digits) / &fact;
        let term_log2 = term.log2_abs();
        acc.add(term.clone());
        let sum = acc.value();
        partial_sums.push(sum.to_f64());
        max_log2 = max_log2.max(sum.log2_abs()).max(term_log2);
        if term_log2 > peak_log2 {
            peak_log2 = term_log2;
            peak_index = n;
        }
        last_term = term;

        if q.is_zero() {
            break;
        }
        let settled = n > peak_index && term_log2 < max_log2 + stop_log2;
        if settled {
            return Ok(finish(acc.value(), partial_sums, last_term, max_log2, digits));
        }
    }
    if q.is_zero() {
        return Ok(finish(acc.value(), partial_sums, last_term, max_log2, digits));
    }
    Err(WrightError::NoConvergence { max_terms: prec.max_terms })
}

fn finish(
    sum: BigReal,
    partial_sums: Vec<f64>,
    last_term: BigReal,
    max_log2: f64,
    digits: u32,
) -> EvalResult {
    let surviving_digits = if sum.is_zero() {
        if max_log2.is_finite() {
            0.0
        } else {
            digits as f64
        }
    } else {
        let lost = (max_log2 - sum.log2_abs()).max(0.0) * std::f64::consts::LOG10_2;
        digits as f64 - lost
    };
    EvalResult {
        value: sum.to_f64(),
        truncation_index: partial_sums.len() - 1,
        partial_sums,
        last_term_magnitude: last_term.abs().to_f64(),
        surviving_digits,
        exact: sum,
    }
}

fn check_digits(r: EvalResult) -> Result<EvalResult> {
    if r.surviving_digits < 16.0 {
        Err(WrightError::PrecisionLoss { digits: r.surviving_digits, value: r.value })
    } else {
        Ok(r)
    }
}

/// W_{λ,μ}(z) = Σ zⁿ / (n! Γ(λn + μ)) for real z.
pub fn wright_series(params: WrightParams, z: f64, prec: PrecisionConfig) -> Result<EvalResult> {
    let params = validate(params)?;
    if !z.is_finite() {
        return Err(WrightError::Domain(format!("z must be finite, got {z}")));
    }
    let bits = prec.bits();
    let r = sum_series(
        &BigReal::one(bits),
        &BigReal::from_f64(z, bits),
        &BigReal::from_f64(params.lambda, bits),
        &BigReal::from_f64(params.mu, bits),
        prec,
    )?;
    check_digits(r)
}

/// W^±_{λ,ν}(x) = (x/2)^ν Σ (±1)ⁿ (x/2)^{(λ+1)n} / (n! Γ(λn+ν+1)), ν = a·x.
pub fn w_scaled(args: ScaledArgs, prec: PrecisionConfig) -> Result<EvalResult> {
    let bits = prec.bits();
    let lambda = BigReal::from_f64(args.lambda(), bits);
    let nu = args.nu_exact(bits).with_bits(bits);
    let ln_half_x = (BigReal::from_f64(args.x(), bits) / BigReal::from_u64(2, bits)).ln();
    let one = BigReal::one(bits);
    let prefactor = (&nu * &ln_half_x).exp();
    let mut q = ((&lambda + &one) * &ln_half_x).exp();
    if args.sign() == Sign::Minus {
        q = -q;
    }
    let r = sum_series(&prefactor, &q, &lambda, &(nu + one), prec)?;
    check_digits(r)
}

/// The alternating scaled function W⁻_{λ,ν}(x).
pub fn w_minus(args: ScaledArgs, prec: PrecisionConfig) -> Result<EvalResult> {
    if args.sign() != Sign::Minus {
        return Err(WrightError::Domain("w_minus requires sign = minus".into()));
    }
    w_scaled(args, prec)
}

/// The positive-argument scaled function W⁺_{λ,ν}(x).
pub fn w_plus(args: ScaledArgs, prec: PrecisionConfig) -> Result<EvalResult> {
    if args.sign() != Sign::Plus {
        return Err(WrightError::Domain("w_plus requires sign = plus".into()));
    }
    w_scaled(args, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(PrecisionConfig::new(29, 10).is_err());
        assert!(PrecisionConfig::new(30, 10).is_ok());
    }

    #[test]
    fn bernoulli_numbers_leading_values() {
        let t = bernoulli_table();
        let as_f = |i: usize| {
            let (n, d) = &t[i];
            n.to_string().parse::<f64>().unwrap() / d.to_string().parse::<f64>().unwrap()
        };
        assert_eq!(as_f(0), 1.0 / 6.0);
        assert_eq!(as_f(1), -1.0 / 30.0);
        assert_eq!(as_f(2), 1.0 / 42.0);
        assert_eq!(as_f(3), -1.0 / 30.0);
        assert!((as_f(5) - 691.0 / 2730.0 * -1.0).abs() < 1e-15);
    }

    #[test]
    fn recip_gamma_special_values() {
        assert_eq!(recip_gamma(1.0, prec()).to_f64(), 1.0);
        assert_eq!(recip_gamma(2.0, prec()).to_f64(), 1.0);
        assert_eq!(recip_gamma(5.0, prec()).to_f64(), 1.0 / 24.0);
        assert!(recip_gamma(0.0, prec()).is_zero());
        assert!(recip_gamma(-3.0, prec()).is_zero());
        let r = recip_gamma(0.5, prec()).to_f64();
        assert!((r - 0.5641895835477563).abs() < 1e-16);
        // Γ(-1/2) = -2√π
        let r = recip_gamma(-0.5, prec()).to_f64();
        assert!((r + 0.28209479177387814).abs() < 1e-16);
    }

    #[test]
    fn recip_gamma_recurrence_at_working_precision() {
        let p = prec();
        for y in [0.3, 2.7, 13.25, -4.6, 41.0, 75.5] {
            // y + 1 formed at working precision; f64 addition would round.
            let yb = BigReal::from_f64(y, p.bits());
            let lhs = recip_gamma_big(&(&yb + &BigReal::one(p.bits())), p.decimal_digits());
            let rhs = recip_gamma(y, p) / yb;
            let rel = ((lhs.clone() - rhs) / lhs).abs();
            assert!(rel.log10_abs() < -(p.decimal_digits() as f64 - 5.0), "y={y} {}", rel.log10_abs());
        }
    }

    #[test]
    fn trivial_series_values() {
        let r = wright_series(WrightParams { lambda: 1.0, mu: 1.0 }, 0.0, prec()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.truncation_index, 0);
        assert_eq!(r.partial_sums.len(), 1);
        // λ = 0: Σ zⁿ/n! / Γ(μ) = e^z / Γ(μ)
        let r = wright_series(WrightParams { lambda: 0.0, mu: 3.0 }, 1.5, prec()).unwrap();
        assert!((r.value - 1.5f64.exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn pole_parameter_with_zero_argument_is_zero() {
        let r = wright_series(WrightParams { lambda: 1.0, mu: 0.0 }, 0.0, prec()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            wright_series(WrightParams { lambda: -1.0, mu: 1.0 }, 1.0, prec()),
            Err(WrightError::Domain(_))
        ));
        let args = ScaledArgs::plus(1.0, 1.0, 2.0).unwrap();
        assert!(w_minus(args, prec()).is_err());
    }

    #[test]
    fn max_terms_exhaustion_reports_no_convergence() {
        let p = PrecisionConfig::new(30, 5).unwrap();
        let r = wright_series(WrightParams { lambda: 1.0, mu: 1.0 }, 50.0, p);
        assert!(matches!(r, Err(WrightError::NoConvergence { max_terms: 5 })));
    }

    #[test]
    fn insufficient_precision_is_reported() {
        // ~20 digits of cancellation at x = 40 leave fewer than 16 of 30.
        let args = ScaledArgs::minus(-0.25, 1.0, 40.0).unwrap();
        let r = w_minus(args, PrecisionConfig::with_digits(30).unwrap());
        assert!(matches!(r, Err(WrightError::PrecisionLoss { .. })), "{r:?}");
        let ok = w_minus(args, prec()).unwrap();
        assert!(ok.surviving_digits > 35.0);
    }

    #[test]
    fn partial_sums_invariant() {
        let args = ScaledArgs::minus(1.0, 1.0, 2.0).unwrap();
        let r = w_minus(args, prec()).unwrap();
        assert_eq!(r.partial_sums.len(), r.truncation_index + 1);
        assert_eq!(*r.partial_sums.last().unwrap(), r.value);
    }
}
