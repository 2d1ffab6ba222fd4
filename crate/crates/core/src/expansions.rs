//! Large-x saddle-point expansions of W⁻ and W⁺.
//!
//! Real-saddle series (W⁻ above the double-saddle curve or with λ ≤ 0, and
//! the I₀ series of W⁺) are carried in [`BigReal`] so that differences with
//! the oracle stay meaningful far below double resolution. Complex-saddle
//! and double-saddle series are summed in double precision.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coeffs::{derivative_table, double_saddle_coeffs, reverse_series_simple, saddle_derivatives, simple_saddle_coefficients};
use crate::error::{Result, WrightError};
use crate::oracle::ln_gamma;
use crate::params::{EvalResult, ScaledArgs, Sign};
use crate::saddles::{
    classify_minus, count_contributory_pairs, double_saddle_curve, double_saddle_point, Phase, Regime, Saddle,
    SaddleKind,
};
use crate::scalar::BigReal;

type C64 = Complex64;

/// Number of series terms generated when truncating optimally.
pub const OPTIMAL_TERMS: usize = 50;

/// Simple-saddle expansions are refused when |a − a_c(λ)| is below this.
pub const NEAR_CURVE: f64 = 1e-6;

const WORK_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruncationPolicy {
    /// Keep terms 0..=k.
    Fixed(usize),
    /// Stop near the smallest term (see [`optimal_truncation`]).
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MinusReal,
    MinusComplex,
    MinusDouble,
    Plus,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::MinusReal => "minus-real",
            Method::MinusComplex => "minus-complex",
            Method::MinusDouble => "minus-double",
            Method::Plus => "plus",
        };
        f.write_str(s)
    }
}

/// One saddle (or conjugate pair) contribution I_j.
#[derive(Debug, Clone)]
pub struct Component {
    pub index: usize,
    pub saddle: Saddle,
    pub value: f64,
    pub exact: BigReal,
    /// x·Re h at the saddle.
    pub exponent: f64,
    /// Prefactor-weighted terms; the contribution is Re Σ terms[0..=truncation_index].
    pub terms: Vec<C64>,
    pub truncation_index: usize,
    /// A_k (or B_k^{(j)}) used for the terms.
    pub coefficients: Vec<C64>,
    /// False for an exponentially small final pair left out of the sum.
    pub included: bool,
}

#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub method: Method,
    pub value: f64,
    pub exact: BigReal,
    /// Terms of the dominant series (I₀ for W⁺).
    pub terms: Vec<C64>,
    pub truncation_index: usize,
    pub truncation_mode: TruncationPolicy,
    /// x·Re h(u₀).
    pub exponent: f64,
    pub components: Vec<Component>,
    /// Contributory pairs (W⁺ only; zero otherwise).
    pub n_pairs: usize,
}

impl ExpansionResult {
    /// |first omitted term| / |value|, or `None` when no term was omitted.
    pub fn error_proxy(&self) -> Option<f64> {
        let t = self.terms.get(self.truncation_index + 1)?;
        Some(t.norm() / self.value.abs())
    }
}

/// Truncation index for a list of term magnitudes.
///
/// The envelope e_k = max(|t_{k−1}|, |t_k|, |t_{k+1}|) smooths out isolated
/// small terms of oscillating series; the index of least magnitude is then
/// taken within one step of the envelope minimum. Ties go to the smaller
/// index. Any monotone transform of the magnitudes gives the same answer.
pub fn optimal_truncation(magnitudes: &[f64]) -> usize {
    let n = magnitudes.len();
    if n < 2 {
        return 0;
    }
    let env: Vec<f64> = (0..n)
        .map(|k| magnitudes[k.saturating_sub(1)..(k + 2).min(n)].iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut ks = 0;
    for k in 1..n {
        if env[k] < env[ks] {
            ks = k;
        }
    }
    let mut best = ks.saturating_sub(1);
    for j in best + 1..(ks + 2).min(n) {
        if magnitudes[j] < magnitudes[best] {
            best = j;
        }
    }
    best
}

/// |W − approx| / |approx| from the oracle and expansion values at working precision.
pub fn relative_error(oracle: &EvalResult, approx: &ExpansionResult) -> f64 {
    relative_difference(&oracle.exact, &approx.exact)
}

/// |w − approx| / |approx|.
pub fn relative_difference(w: &BigReal, approx: &BigReal) -> f64 {
    let bits = w.bits().max(approx.bits());
    let w = w.with_bits(bits);
    let approx = approx.with_bits(bits);
    let diff = &w - &approx;
    if diff.is_zero() {
        return 0.0;
    }
    2f64.powf(diff.log2_abs() - approx.log2_abs())
}

fn series_length(policy: TruncationPolicy) -> usize {
    match policy {
        TruncationPolicy::Fixed(k) => k + 1,
        TruncationPolicy::Optimal => OPTIMAL_TERMS,
    }
}

fn pick_index(policy: TruncationPolicy, log_mags: &[f64]) -> usize {
    match policy {
        TruncationPolicy::Fixed(k) => k,
        TruncationPolicy::Optimal => optimal_truncation(log_mags),
    }
}

/// Real-saddle series e^{xh₀}/√(2πxh₀'') Σ (−1)^k (½)_k A_k (2/x)^k in BigReal.
struct RealSeries {
    u0: BigReal,
    exponent: BigReal,
    coefficients: Vec<BigReal>,
    terms: Vec<BigReal>,
}

fn real_series(lambda: f64, a: f64, x: f64, sign: Sign, seed: f64, len: usize) -> Result<RealSeries> {
    let bits = WORK_BITS;
    let big = |v: f64| BigReal::from_f64(v, bits);
    let (l, aa, xx, half) = (big(lambda), big(a), big(x), big(0.5));
    let s = big(sign.factor());
    // Newton on h'(u) = ½(e^u − sλe^{−λu}) − a, from a double-accurate seed.
    let mut u = big(seed);
    let tol = -(bits as f64) + 16.0;
    let mut converged = false;
    for _ in 0..40 {
        let e = u.exp();
        let em = (-(&l * &u)).exp();
        let f = &(&half * &(&e - &(&(&s * &l) * &em))) - &aa;
        let d = &half * &(&e + &(&(&(&s * &l) * &l) * &em));
        let step = &f / &d;
        u = &u - &step;
        if step.is_zero() || step.log2_abs() < tol + u.log2_abs().max(0.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(WrightError::ConvergenceFailure(format!("real saddle refinement at lambda={lambda}, a={a}")));
    }
    let e = u.exp();
    let em = (-(&l * &u)).exp();
    let order = len - 1;
    let d = saddle_derivatives(lambda, sign, &e, &em, 2 * order + 2);
    let coefficients = simple_saddle_coefficients(&d, order);
    let h0 = &(&half * &(&e + &(&s * &em))) - &(&aa * &u);
    let exponent = &xx * &h0;
    let two_pi = BigReal::pi(bits).mul_f64(2.0);
    let pre = &exponent.exp() / &(&(&two_pi * &xx) * &d[2]).sqrt();
    let ratio = &big(2.0) / &xx;
    let mut poch = big(1.0);
    let mut terms = Vec::with_capacity(len);
    for (k, ak) in coefficients.iter().enumerate() {
        terms.push(&(&pre * &poch) * ak);
        // (−1)^{k+1} (½)_{k+1} (2/x)^{k+1}
        poch = -(&(&poch * &ratio).mul_f64(k as f64 + 0.5));
    }
    Ok(RealSeries { u0: u, exponent, coefficients, terms })
}

fn big_sum(terms: &[BigReal], upto: usize) -> BigReal {
    terms[..=upto].iter().fold(BigReal::zero(WORK_BITS), |acc, t| &acc + t)
}

fn real_component(
    lambda: f64,
    a: f64,
    x: f64,
    sign: Sign,
    saddle: Saddle,
    policy: TruncationPolicy,
) -> Result<Component> {
    let rs = real_series(lambda, a, x, sign, saddle.location.re, series_length(policy))?;
    let logs: Vec<f64> = rs.terms.iter().map(|t| t.log2_abs()).collect();
    let idx = pick_index(policy, &logs);
    let exact = big_sum(&rs.terms, idx);
    let phase = Phase::new(lambda, a, sign)?;
    let u0 = rs.u0.to_f64();
    let mut saddle = saddle;
    saddle.location = C64::new(u0, 0.0);
    saddle.phase_value = phase.h(saddle.location);
    saddle.second_derivative = phase.d2h(saddle.location);
    Ok(Component {
        index: 0,
        saddle,
        value: exact.to_f64(),
        exact,
        exponent: rs.exponent.to_f64(),
        terms: rs.terms.iter().map(|t| C64::new(t.to_f64(), 0.0)).collect(),
        truncation_index: idx,
        coefficients: rs.coefficients.iter().map(|c| C64::new(c.to_f64(), 0.0)).collect(),
        included: true,
    })
}

/// Complex-saddle series with terms pre·(−1)^k (½)_k A_k (2/x)^k; the
/// contribution is Re Σ.
fn complex_component(phase: &Phase, saddle: Saddle, x: f64, pre: C64, policy: TruncationPolicy) -> Result<Component> {
    let len = series_length(policy);
    let table = derivative_table(&saddle, phase, 2 * len)?;
    let series = reverse_series_simple(&table, len - 1)?;
    let mut terms = Vec::with_capacity(len);
    let mut poch = 1.0;
    for (k, ak) in series.coefficients.iter().enumerate() {
        terms.push(pre * poch * ak);
        poch *= -(k as f64 + 0.5) * 2.0 / x;
    }
    let logs: Vec<f64> = terms.iter().map(|t| t.norm().log2()).collect();
    let idx = pick_index(policy, &logs);
    let value = terms[..=idx].iter().sum::<C64>().re;
    Ok(Component {
        index: saddle.index,
        saddle,
        value,
        exact: BigReal::from_f64(value, WORK_BITS),
        exponent: x * saddle.phase_value.re,
        terms,
        truncation_index: idx,
        coefficients: series.coefficients,
        included: true,
    })
}

fn near_curve(lambda: f64, a: f64) -> bool {
    lambda > 0.0 && (a - double_saddle_curve(lambda)).abs() < NEAR_CURVE
}

fn require_sign(args: &ScaledArgs, sign: Sign) -> Result<()> {
    if args.sign() != sign {
        return Err(WrightError::Domain(format!("expansion needs sign {sign}, got {}", args.sign())));
    }
    Ok(())
}

fn wrong(regime: Regime) -> WrightError {
    let suggestion = match regime {
        Regime::SingleReal | Regime::TwoReal => "expand_minus_real",
        Regime::ConjugatePair => "expand_minus_complex",
        Regime::Double => "expand_minus_double",
    };
    WrightError::WrongRegime { regime, suggestion }
}

fn single(method: Method, policy: TruncationPolicy, c: Component) -> ExpansionResult {
    ExpansionResult {
        method,
        value: c.value,
        exact: c.exact.clone(),
        terms: c.terms.clone(),
        truncation_index: c.truncation_index,
        truncation_mode: policy,
        exponent: c.exponent,
        components: vec![c],
        n_pairs: 0,
    }
}

/// W⁻ from the contributory real saddle (λ ≤ 0, or above the double-saddle curve).
pub fn expand_minus_real(args: ScaledArgs, trunc: TruncationPolicy) -> Result<ExpansionResult> {
    require_sign(&args, Sign::Minus)?;
    let (l, a, x) = (args.lambda(), args.a(), args.x());
    if near_curve(l, a) {
        return Err(wrong(Regime::Double));
    }
    let class = classify_minus(l, a)?;
    if !matches!(class.regime, Regime::SingleReal | Regime::TwoReal) {
        return Err(wrong(class.regime));
    }
    let c = real_component(l, a, x, Sign::Minus, class.contributory[0], trunc)?;
    Ok(single(Method::MinusReal, trunc, c))
}

/// W⁻ below the double-saddle curve from the conjugate pair:
/// √(2/(πx)) Re{e^{xh₀}/√h₀'' Σ (−1)^k (½)_k A_k (2/x)^k}.
pub fn expand_minus_complex(args: ScaledArgs, trunc: TruncationPolicy) -> Result<ExpansionResult> {
    require_sign(&args, Sign::Minus)?;
    let (l, a, x) = (args.lambda(), args.a(), args.x());
    if near_curve(l, a) {
        return Err(wrong(Regime::Double));
    }
    let class = classify_minus(l, a)?;
    if class.regime != Regime::ConjugatePair {
        return Err(wrong(class.regime));
    }
    let s = class.contributory[0];
    let phase = Phase::minus(l, a)?;
    let pre = (2.0 / (PI * x)).sqrt() * (x * s.phase_value).exp() / s.second_derivative.sqrt();
    let c = complex_component(&phase, s, x, pre, trunc)?;
    Ok(single(Method::MinusComplex, trunc, c))
}

/// W⁻ on the double-saddle curve a = a_c(λ):
/// 2^{2/3}e^{xh₀}/(3π(Hx/3)^{1/3}) Σ B_k Γ((k+1)/3) sin(π(k+1)/3) / (Hx/3)^{k/3}.
pub fn expand_minus_double(lambda: f64, x: f64, trunc: TruncationPolicy) -> Result<ExpansionResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(WrightError::Domain(format!("x must be positive, got {x}")));
    }
    let saddle = double_saddle_point(lambda)?;
    let len = series_length(trunc);
    let series = double_saddle_coeffs(lambda, len - 1)?;
    let big_h = series.scale.re;
    let z = big_h * x / 3.0;
    let pre = 2f64.powf(2.0 / 3.0) * (x * saddle.phase_value.re).exp() / (3.0 * PI * z.cbrt());
    let terms: Vec<C64> = series
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, b)| {
            if (k + 1) % 3 == 0 {
                return C64::new(0.0, 0.0);
            }
            let g = gamma_third(k + 1);
            let s = (PI * (k + 1) as f64 / 3.0).sin();
            C64::new(pre * b.re * g * s / z.powf(k as f64 / 3.0), 0.0)
        })
        .collect();
    let idx = match trunc {
        TruncationPolicy::Fixed(k) => k,
        TruncationPolicy::Optimal => {
            // Choose among the non-vanishing terms only.
            let live: Vec<usize> = (0..terms.len()).filter(|k| (k + 1) % 3 != 0).collect();
            let logs: Vec<f64> = live.iter().map(|&k| terms[k].norm().log2()).collect();
            live[optimal_truncation(&logs)]
        }
    };
    let value: f64 = terms[..=idx].iter().map(|t| t.re).sum();
    let c = Component {
        index: 0,
        saddle,
        value,
        exact: BigReal::from_f64(value, WORK_BITS),
        exponent: x * saddle.phase_value.re,
        terms,
        truncation_index: idx,
        coefficients: series.coefficients,
        included: true,
    };
    Ok(single(Method::MinusDouble, trunc, c))
}

/// Γ(n/3) to double accuracy.
fn gamma_third(n: usize) -> f64 {
    let y = BigReal::from_u64(n as u64, 128) / BigReal::from_u64(3, 128);
    let (lg, negative) = ln_gamma(&y, 30).expect("n/3 is not a pole for n > 0");
    let g = lg.exp().to_f64();
    if negative {
        -g
    } else {
        g
    }
}

/// W⁺ as Σ_{j=0}^{N} I_j over the real saddle and the N contributory pairs.
///
/// When the last pair is exponentially small it is computed but left out of
/// the sum unless `include_subdominant` is set.
pub fn expand_plus(args: ScaledArgs, trunc: TruncationPolicy, include_subdominant: bool) -> Result<ExpansionResult> {
    require_sign(&args, Sign::Plus)?;
    let (l, a, x) = (args.lambda(), args.a(), args.x());
    let region = count_contributory_pairs(l, a)?;
    let phase = Phase::plus(l, a)?;
    let mut components = Vec::with_capacity(region.saddles.len());
    components.push(real_component(l, a, x, Sign::Plus, region.saddles[0], trunc)?);
    for (j, (s, dir)) in region.saddles.iter().zip(&region.directions).enumerate().skip(1) {
        // Orientation of √(−h'') fixed by the direction the contour leaves u_j.
        let mut root = 1.0 / (-s.second_derivative).sqrt();
        if (root * dir.conj()).re < 0.0 {
            root = -root;
        }
        let pre = 2.0 / (2.0 * PI * C64::i()) * (x * s.phase_value).exp() * (2.0 * PI / x).sqrt() * root;
        let mut c = complex_component(&phase, *s, x, pre, trunc)?;
        c.index = j;
        c.included = !(j == region.n_pairs && region.last_pair_subdominant && !include_subdominant);
        components.push(c);
    }
    let total = components
        .iter()
        .filter(|c| c.included)
        .fold(BigReal::zero(WORK_BITS), |acc, c| &acc + &c.exact);
    let head = &components[0];
    Ok(ExpansionResult {
        method: Method::Plus,
        value: total.to_f64(),
        exact: total,
        terms: head.terms.clone(),
        truncation_index: head.truncation_index,
        truncation_mode: trunc,
        exponent: head.exponent,
        n_pairs: region.n_pairs,
        components,
    })
}

/// Picks the expansion that applies at (λ, a) and evaluates it.
pub fn expand(args: ScaledArgs, trunc: TruncationPolicy, include_subdominant: bool) -> Result<ExpansionResult> {
    match args.sign() {
        Sign::Plus => expand_plus(args, trunc, include_subdominant),
        Sign::Minus if near_curve(args.lambda(), args.a()) => expand_minus_double(args.lambda(), args.x(), trunc),
        Sign::Minus => match classify_minus(args.lambda(), args.a())?.regime {
            Regime::SingleReal | Regime::TwoReal => expand_minus_real(args, trunc),
            Regime::ConjugatePair => expand_minus_complex(args, trunc),
            Regime::Double => expand_minus_double(args.lambda(), args.x(), trunc),
        },
    }
}

impl Component {
    pub fn is_real_saddle(&self) -> bool {
        self.saddle.kind != SaddleKind::ComplexPair
    }
}
