//! Saddle points of the phase functions, their classification, and
//! steepest-descent path topology for the W⁺ case.
//!
//! With τ = e^u the two phases are
//!
//! * W⁻: h(u) = ½(e^u − e^{−λu}) − a·u
//! * W⁺: h̃(u) = ½(e^u + e^{−λu}) − a·u
//!
//! Both are written here as ½(e^u + s·e^{−λu}) − a·u with s = ∓1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, WrightError};
use crate::params::{validate, Sign, WrightParams};

type C64 = Complex64;

/// Relative tolerance for "on the double-saddle curve".
pub const CURVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub lambda: f64,
    pub a: f64,
    pub sign: Sign,
}

impl Phase {
    pub fn new(lambda: f64, a: f64, sign: Sign) -> Result<Self> {
        validate(WrightParams { lambda, mu: 1.0 })?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(WrightError::Domain(format!("a must be positive, got {a}")));
        }
        Ok(Phase { lambda, a, sign })
    }

    pub fn minus(lambda: f64, a: f64) -> Result<Self> {
        Self::new(lambda, a, Sign::Minus)
    }

    pub fn plus(lambda: f64, a: f64) -> Result<Self> {
        Self::new(lambda, a, Sign::Plus)
    }

    fn s(&self) -> f64 {
        self.sign.factor()
    }

    pub fn h(&self, u: C64) -> C64 {
        0.5 * (u.exp() + self.s() * (-self.lambda * u).exp()) - self.a * u
    }

    pub fn dh(&self, u: C64) -> C64 {
        0.5 * (u.exp() - self.s() * self.lambda * (-self.lambda * u).exp()) - self.a
    }

    pub fn d2h(&self, u: C64) -> C64 {
        self.dnh(2, u)
    }

    /// n-th derivative for n ≥ 2.
    pub fn dnh(&self, n: u32, u: C64) -> C64 {
        let l = self.lambda;
        0.5 * (u.exp() + self.s() * (-l).powi(n as i32) * (-l * u).exp())
    }

    fn dh_real(&self, u: f64) -> f64 {
        0.5 * (u.exp() - self.s() * self.lambda * (-self.lambda * u).exp()) - self.a
    }

    fn d2h_real(&self, u: f64) -> f64 {
        0.5 * (u.exp() + self.s() * self.lambda * self.lambda * (-self.lambda * u).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SaddleKind {
    RealSimple,
    ComplexPair,
    RealDouble,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saddle {
    /// For a conjugate pair, the upper-half representative.
    pub location: C64,
    pub phase_value: C64,
    pub second_derivative: C64,
    /// 0 for the real (or principal) saddle, k for the k-th pair of the W⁺ chain.
    pub index: usize,
    pub kind: SaddleKind,
}

impl Saddle {
    fn at(phase: &Phase, u: C64, index: usize, kind: SaddleKind) -> Self {
        Saddle {
            location: u,
            phase_value: phase.h(u),
            second_derivative: phase.d2h(u),
            index,
            kind,
        }
    }

    /// |h'(u)| / max(1, |h''(u)|).
    pub fn residual(&self, phase: &Phase) -> f64 {
        phase.dh(self.location).norm() / self.second_derivative.norm().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// −1 < λ ≤ 0: one real saddle.
    SingleReal,
    /// Above the double-saddle curve: two real saddles, the larger contributes.
    TwoReal,
    /// Below the curve: a complex conjugate pair.
    ConjugatePair,
    /// On the curve.
    Double,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleClassification {
    pub regime: Regime,
    pub contributory: Vec<Saddle>,
}

/// a on the double-saddle curve: ((1+λ)/2)·λ^γ, γ = (1−λ)/(1+λ).
pub fn double_saddle_curve(lambda: f64) -> f64 {
    let gamma = (1.0 - lambda) / (1.0 + lambda);
    0.5 * (1.0 + lambda) * lambda.powf(gamma)
}

/// Location u* = 2 ln λ / (1+λ) of the double saddle.
pub fn double_saddle_location(lambda: f64) -> f64 {
    2.0 * lambda.ln() / (1.0 + lambda)
}

/// The double saddle for a = double_saddle_curve(λ).
pub fn double_saddle_point(lambda: f64) -> Result<Saddle> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(WrightError::Domain(format!("double saddle needs lambda > 0, got {lambda}")));
    }
    let a = double_saddle_curve(lambda);
    let phase = Phase::minus(lambda, a)?;
    let u0 = double_saddle_location(lambda);
    let gamma = (1.0 - lambda) / (1.0 + lambda);
    let h0 = (lambda * lambda - 1.0) / (2.0 * lambda * lambda) * u0.exp()
        - lambda.powf(gamma) * lambda.ln();
    Ok(Saddle {
        location: C64::new(u0, 0.0),
        phase_value: C64::new(h0, 0.0),
        second_derivative: phase.d2h(C64::new(u0, 0.0)),
        index: 0,
        kind: SaddleKind::RealDouble,
    })
}

/// Maximum (λ, a) of the double-saddle curve.
pub fn double_saddle_curve_max() -> (f64, f64) {
    // d/dλ ln a = 1/(1+λ) − 2 ln λ/(1+λ)² + γ/λ
    let slope = |l: f64| {
        let g = (1.0 - l) / (1.0 + l);
        1.0 / (1.0 + l) - 2.0 * l.ln() / ((1.0 + l) * (1.0 + l)) + g / l
    };
    let (mut lo, mut hi) = (1.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    (l, double_saddle_curve(l))
}

/// Newton with a bisection safeguard on a bracket where f changes sign.
fn bracketed_root(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..400 {
        let fu = f(u);
        if fu == 0.0 {
            return u;
        }
        if (fu < 0.0) == (flo < 0.0) {
            lo = u;
            flo = fu;
        } else {
            hi = u;
        }
        let d = df(u);
        let newton = u - fu / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - u).abs() <= 1e-16 * u.abs().max(1.0) || hi - lo <= 1e-16 * u.abs().max(1.0) {
            return next;
        }
        u = next;
    }
    u
}

fn grow_bracket(f: &impl Fn(f64) -> f64, lo: f64, target_positive: bool) -> f64 {
    let mut step = 1.0;
    let mut hi = lo + step;
    while (f(hi) > 0.0) != target_positive {
        step *= 2.0;
        hi = lo + step;
        if step > 1e3 {
            break;
        }
    }
    hi
}

fn check_real(phase: &Phase, u: f64, index: usize, kind: SaddleKind) -> Result<Saddle> {
    let s = Saddle::at(phase, C64::new(u, 0.0), index, kind);
    let scale = u.exp().max(1.0);
    if phase.dh_real(u).abs() > 1e-13 * scale {
        return Err(WrightError::ConvergenceFailure(format!(
            "real saddle residual {:e} at u = {u}",
            phase.dh_real(u)
        )));
    }
    Ok(s)
}

/// Real saddle(s). For W⁻ with λ > 0 above the curve both roots are
/// returned in ascending order; on the curve the single double root.
pub fn solve_real_saddle(phase: &Phase) -> Result<Vec<Saddle>> {
    let l = phase.lambda;
    let f = |u: f64| phase.dh_real(u);
    let df = |u: f64| phase.d2h_real(u);
    match phase.sign {
        Sign::Plus => {
            // e^u − λe^{−λu} is increasing in u.
            let mut lo = -1.0;
            while f(lo) > 0.0 {
                lo = 2.0 * lo - 1.0;
            }
            let hi = grow_bracket(&f, lo, true);
            let u = bracketed_root(f, df, lo, hi);
            Ok(vec![check_real(phase, u, 0, SaddleKind::RealSimple)?])
        }
        Sign::Minus if l <= 0.0 => {
            // Left of ln|λ|/(1+λ) the equation has no root.
            let lo = if l < 0.0 { (-l).ln() / (1.0 + l) } else { (2.0 * phase.a).ln() - 1.0 };
            let hi = grow_bracket(&f, lo, true);
            let u = bracketed_root(f, df, lo, hi);
            Ok(vec![check_real(phase, u, 0, SaddleKind::RealSimple)?])
        }
        Sign::Minus => {
            let ac = double_saddle_curve(l);
            let ustar = double_saddle_location(l);
            if (phase.a - ac).abs() <= CURVE_TOLERANCE * ac {
                return Ok(vec![Saddle::at(phase, C64::new(ustar, 0.0), 0, SaddleKind::RealDouble)]);
            }
            if phase.a < ac {
                return Err(WrightError::NoRealSaddle { lambda: l, a: phase.a });
            }
            let two_a = 2.0 * phase.a;
            let upper = ustar.max(two_a.ln()) + 1.0;
            let lower = ustar.min(-(two_a / l).ln() / l) - 1.0;
            let small = bracketed_root(f, df, lower, ustar);
            let large = bracketed_root(f, df, ustar, upper);
            Ok(vec![
                check_real(phase, small, 0, SaddleKind::RealSimple)?,
                check_real(phase, large, 0, SaddleKind::RealSimple)?,
            ])
        }
    }
}

/// Damped complex Newton on h'(u) = 0.
fn newton_complex(phase: &Phase, seed: C64) -> Option<C64> {
    let mut u = seed;
    for _ in 0..200 {
        let f = phase.dh(u);
        let d = phase.d2h(u);
        if !(d.norm() > 0.0) || !f.is_finite() {
            return None;
        }
        let mut step = f / d;
        if step.norm() > 0.5 {
            step *= 0.5 / step.norm();
        }
        u -= step;
        if step.norm() <= 1e-16 * u.norm().max(1.0) {
            break;
        }
    }
    let ok = phase.dh(u).norm() < 1e-12 * phase.d2h(u).norm().max(1.0);
    ok.then_some(u)
}

/// Upper member of the W⁻ conjugate pair below the double-saddle curve.
pub fn solve_complex_pair(phase: &Phase) -> Result<Saddle> {
    if phase.sign != Sign::Minus || phase.lambda <= 0.0 {
        return Err(WrightError::Domain("complex pair requires sign = minus and lambda > 0".into()));
    }
    let l = phase.lambda;
    let ac = double_saddle_curve(l);
    if phase.a >= ac * (1.0 - CURVE_TOLERANCE) {
        return Err(WrightError::Domain(format!(
            "a = {} is not below the double-saddle curve a = {ac}",
            phase.a
        )));
    }
    let ustar = double_saddle_location(l);
    let in_strip = |u: &C64| u.im > 0.0 && u.im < PI;
    // Near the curve h'(u) ≈ (a_c − a) + ½h'''(u*)(u − u*)².
    let h3 = phase.dnh(3, C64::new(ustar, 0.0)).re;
    let offset = (2.0 * (ac - phase.a) / h3).sqrt();
    for seed in [C64::new(ustar, offset), C64::new(ustar, 0.5)] {
        if let Some(u) = newton_complex(phase, seed).filter(in_strip) {
            return Ok(Saddle::at(phase, u, 0, SaddleKind::ComplexPair));
        }
    }
    // Continuation in a downward from the curve.
    let steps = 200;
    let mut u = C64::new(ustar, 0.0);
    for i in 1..=steps {
        let a = ac + (phase.a - ac) * i as f64 / steps as f64;
        let p = Phase { a, ..*phase };
        let seed = if i == 1 {
            C64::new(ustar, (2.0 * (ac - a) / h3).sqrt())
        } else {
            u
        };
        u = newton_complex(&p, seed).filter(in_strip).ok_or_else(|| {
            WrightError::ConvergenceFailure(format!("complex saddle continuation failed at a = {a}"))
        })?;
    }
    Ok(Saddle::at(phase, u, 0, SaddleKind::ComplexPair))
}

/// Saddle structure of the W⁻ phase.
pub fn classify_minus(lambda: f64, a: f64) -> Result<SaddleClassification> {
    let phase = Phase::minus(lambda, a)?;
    if lambda <= 0.0 {
        let s = solve_real_saddle(&phase)?;
        return Ok(SaddleClassification { regime: Regime::SingleReal, contributory: s });
    }
    let ac = double_saddle_curve(lambda);
    if (a - ac).abs() <= CURVE_TOLERANCE * ac {
        let s = double_saddle_point(lambda)?;
        Ok(SaddleClassification { regime: Regime::Double, contributory: vec![s] })
    } else if a > ac {
        let roots = solve_real_saddle(&phase)?;
        let larger = *roots.last().expect("two real roots");
        Ok(SaddleClassification { regime: Regime::TwoReal, contributory: vec![larger] })
    } else {
        let s = solve_complex_pair(&phase)?;
        Ok(SaddleClassification { regime: Regime::ConjugatePair, contributory: vec![s] })
    }
}

/// Complex saddles u_k = X_k + iY_k, k = 1..=count, of the W⁺ phase, each
/// the root with X_k > 0 and (2k−2)π/λ < Y_k ≤ 2kπ/λ nearest the seed
/// Y = (2k−1)π/λ. The chain stops at the first k with no such root.
pub fn complex_saddle_chain(phase: &Phase, count: usize) -> Result<Vec<Saddle>> {
    if phase.sign != Sign::Plus || phase.lambda <= 0.0 {
        return Err(WrightError::Domain("saddle chain requires sign = plus and lambda > 0".into()));
    }
    if count == 0 {
        return Err(WrightError::Domain("count must be at least 1".into()));
    }
    let l = phase.lambda;
    let mut chain = Vec::with_capacity(count);
    for k in 1..=count {
        let y_seed = (2 * k - 1) as f64 * PI / l;
        let (y_lo, y_hi) = ((2 * k - 2) as f64 * PI / l, (2 * k) as f64 * PI / l);
        let mut best: Option<C64> = None;
        for x in [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0, 3.0] {
            for dy in [0.0, -0.25, 0.25] {
                let seed = C64::new(x, y_seed + dy * PI / l);
                let Some(u) = newton_complex(phase, seed) else { continue };
                let edge = 1e-9 * y_hi;
                if u.re > 0.0 && u.im > y_lo + edge && u.im <= y_hi + edge {
                    let dist = |v: C64| (v.im - y_seed).abs();
                    if best.map_or(true, |b| dist(u) < dist(b) - 1e-12) {
                        best = Some(u);
                    }
                }
            }
        }
        match best {
            Some(u) => chain.push(Saddle::at(phase, u, k, SaddleKind::ComplexPair)),
            None if k == 1 => {
                return Err(WrightError::ConvergenceFailure(format!(
                    "no complex saddle u_1 found for lambda = {l}, a = {}",
                    phase.a
                )))
            }
            None => break,
        }
    }
    Ok(chain)
}

/// Which of the two steepest-descent directions to follow out of a saddle:
/// `Upper` starts along the tangent with positive imaginary part (or, for a
/// horizontal tangent, positive real part).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terminus {
    /// Re u → +∞ with Im u → π.
    InfinityPlusPi,
    /// Re u → +∞ with Im u → −π.
    InfinityMinusPi,
    /// Re u → +∞ with Im u → jπ for some other odd j.
    RightValley(i64),
    /// Re u → −∞ along the m-th left valley: Im u → (2m−1)π/λ for W⁺,
    /// Im u → 2mπ/λ for W⁻.
    MinusInfinityStrip(i64),
    /// The path runs into another saddle (index into the target list).
    HitsSaddle(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub terminus: Terminus,
    /// Unit tangent at the starting saddle.
    pub direction: C64,
    pub samples: Vec<C64>,
}

/// The two unit descent tangents at a simple saddle, `Upper` first.
pub fn descent_directions(second_derivative: C64) -> [C64; 2] {
    let d = (-second_derivative).sqrt().inv();
    let d = d / d.norm();
    if d.im > 1e-14 || (d.im.abs() <= 1e-14 && d.re > 0.0) {
        [d, -d]
    } else {
        [-d, d]
    }
}

const MAX_STEPS: usize = 400_000;
const HIT_RADIUS: f64 = 0.1;

/// Follows Im h = Im h(from) downhill from `from` along `branch` until the
/// path leaves through a valley at ±∞ or runs into one of `targets`.
pub fn trace_descent_path(
    phase: &Phase,
    from: &Saddle,
    branch: Branch,
    targets: &[Saddle],
) -> Result<PathOutcome> {
    let h2 = from.second_derivative;
    if h2.norm() <= 1e-10 {
        return Err(WrightError::DegenerateSaddle(h2.norm()));
    }
    let [up, down] = descent_directions(h2);
    let direction = match branch {
        Branch::Upper => up,
        Branch::Lower => down,
    };
    let level = from.phase_value.im;
    let field = |u: C64| {
        let g = phase.dh(u);
        -g.conj() / g.norm()
    };
    let project = |mut u: C64| {
        for _ in 0..2 {
            let g = phase.dh(u);
            let n = g.norm();
            if n > 0.0 {
                u -= (phase.h(u).im - level) / n * C64::i() * g.conj() / n;
            }
        }
        u
    };
    let level_scale = from.phase_value.norm().max(1.0);
    let live_targets: Vec<(usize, C64)> = targets
        .iter()
        .enumerate()
        .filter(|(_, t)| (t.location - from.location).norm() > 1e-9)
        .filter(|(_, t)| (t.phase_value.im - level).abs() < 1e-6 * level_scale)
        .filter(|(_, t)| t.phase_value.re < from.phase_value.re)
        .map(|(i, t)| (i, t.location))
        .collect();

    let mut u = project(from.location + 1e-3 * direction);
    let mut samples = vec![from.location, u];
    for _ in 0..MAX_STEPS {
        let ds = if (u - from.location).norm() < 3.0 { 0.01 } else { 0.04 };
        let k1 = field(u);
        let k2 = field(u + 0.5 * ds * k1);
        let k3 = field(u + 0.5 * ds * k2);
        let k4 = field(u + ds * k3);
        let next = project(u + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if !next.is_finite() || (next - u).norm() < 1e-12 {
            return Err(WrightError::StepFailure { re: u.re, im: u.im });
        }
        u = next;
        samples.push(u);

        if let Some(&(i, _)) = live_targets.iter().find(|(_, t)| (u - t).norm() < HIT_RADIUS) {
            return Ok(PathOutcome { terminus: Terminus::HitsSaddle(i), direction, samples });
        }
        if u.re > 20.0 {
            let j = (u.im / PI).round() as i64;
            let terminus = match j {
                1 => Terminus::InfinityPlusPi,
                -1 => Terminus::InfinityMinusPi,
                _ => Terminus::RightValley(j),
            };
            return Ok(PathOutcome { terminus, direction, samples });
        }
        if phase.lambda > 0.0 && phase.lambda * u.re < -20.0 {
            let t = phase.lambda * u.im / PI;
            let m = match phase.sign {
                Sign::Plus => ((t + 1.0) / 2.0).round() as i64,
                Sign::Minus => (t / 2.0).round() as i64,
            };
            return Ok(PathOutcome { terminus: Terminus::MinusInfinityStrip(m), direction, samples });
        }
    }
    Err(WrightError::StepFailure { re: u.re, im: u.im })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCount {
    pub n_pairs: usize,
    /// u_0 followed by the upper representatives u_1..u_N crossed by the contour.
    pub saddles: Vec<Saddle>,
    /// Unit tangent of the deformed contour leaving each saddle in `saddles`.
    pub directions: Vec<C64>,
    /// Re h̃(u_N) < 0 (always false when N = 0).
    pub last_pair_subdominant: bool,
}

/// Number N of complex pairs the deformed W⁺ contour passes over.
///
/// The upper half of the contour leaves u_0 upward. Each time a path drops
/// into a left valley, the contour returns from it over the chain saddle
/// draining that valley; N counts those saddles.
pub fn count_contributory_pairs(lambda: f64, a: f64) -> Result<RegionCount> {
    let phase = Phase::plus(lambda, a)?;
    let u0 = solve_real_saddle(&phase)?[0];
    if lambda <= 0.0 {
        return Ok(RegionCount {
            n_pairs: 0,
            saddles: vec![u0],
            directions: vec![C64::i()],
            last_pair_subdominant: false,
        });
    }
    let count = ((lambda + 1.0) / 2.0).ceil() as usize + 2;
    // The chain is only consulted once a path drops into a left valley.
    let chain = complex_saddle_chain(&phase, count.min(64)).unwrap_or_default();
    let mut all = vec![u0];
    all.extend(chain.iter().copied());

    let mut saddles = vec![u0];
    let mut directions = vec![C64::i()];
    let mut current = trace_descent_path(&phase, &u0, Branch::Upper, &all)?;
    let mut from = 0usize;
    let mut used = vec![false; all.len()];
    used[0] = true;
    loop {
        match current.terminus {
            Terminus::InfinityPlusPi => break,
            Terminus::HitsSaddle(j) => {
                return Err(WrightError::OnStokesBoundary { from, to: all[j].index })
            }
            Terminus::MinusInfinityStrip(m) => {
                let mut order: Vec<usize> = (1..all.len()).filter(|&j| !used[j]).collect();
                order.sort_by_key(|&j| (j as i64 - m).abs());
                let mut next = None;
                for j in order {
                    let paths = [
                        trace_descent_path(&phase, &all[j], Branch::Upper, &all)?,
                        trace_descent_path(&phase, &all[j], Branch::Lower, &all)?,
                    ];
                    for (p, q) in [(0, 1), (1, 0)] {
                        if let Terminus::HitsSaddle(t) = paths[q].terminus {
                            if paths[p].terminus == Terminus::MinusInfinityStrip(m) {
                                return Err(WrightError::OnStokesBoundary {
                                    from: all[j].index,
                                    to: all[t].index,
                                });
                            }
                        }
                        if paths[p].terminus == Terminus::MinusInfinityStrip(m)
                            && paths[q].terminus != Terminus::MinusInfinityStrip(m)
                        {
                            next = Some((j, paths[q].clone()));
                        }
                    }
                    if next.is_some() {
                        break;
                    }
                }
                let (j, path) = next.ok_or_else(|| {
                    WrightError::ConvergenceFailure(format!(
                        "no chain saddle drains left valley {m} (lambda = {lambda}, a = {a})"
                    ))
                })?;
                used[j] = true;
                saddles.push(all[j]);
                directions.push(path.direction);
                from = all[j].index;
                current = path;
            }
            other => {
                return Err(WrightError::ConvergenceFailure(format!(
                    "descent path ended at {other:?} (lambda = {lambda}, a = {a})"
                )))
            }
        }
    }
    let n_pairs = saddles.len() - 1;
    let last_pair_subdominant = n_pairs > 0 && saddles[n_pairs].phase_value.re < 0.0;
    Ok(RegionCount { n_pairs, saddles, directions, last_pair_subdominant })
}

/// Im h̃(u_k) − Im h̃(u_{k−1}), the quantity that vanishes when u_{k−1}
/// connects to u_k.
fn connection_gap(lambda: f64, a: f64, pair: usize) -> Option<f64> {
    let phase = Phase::plus(lambda, a).ok()?;
    let chain = complex_saddle_chain(&phase, pair).ok()?;
    if chain.len() < pair {
        return None;
    }
    let lower = if pair == 1 { 0.0 } else { chain[pair - 2].phase_value.im };
    Some(chain[pair - 1].phase_value.im - lower)
}

/// Value of a at which the contour acquires the pair u_k (k = `pair`),
/// i.e. the descent path out of u_{k−1} connects to u_k.
///
/// Sign changes of the connection gap on a grid over a ∈ (0, 2] are kept
/// only where the pair count actually changes across them.
pub fn stokes_boundary(lambda: f64, pair: usize) -> Result<f64> {
    if !(lambda > 0.0) || pair == 0 {
        return Err(WrightError::Domain(format!(
            "stokes_boundary needs lambda > 0 and pair >= 1, got {lambda}, {pair}"
        )));
    }
    let step = 0.005;
    let grid: Vec<f64> = (1..=400).map(|i| i as f64 * step).collect();
    let mut prev: Option<(f64, f64)> = None;
    for &a in &grid {
        let Some(g) = connection_gap(lambda, a, pair) else {
            prev = None;
            continue;
        };
        if let Some((a0, g0)) = prev {
            if (g0 > 0.0) != (g > 0.0) {
                if let Some(root) = refine_boundary(lambda, pair, a0, g0, a) {
                    if count_changes_across(lambda, pair, root) {
                        return Ok(root);
                    }
                }
            }
        }
        prev = Some((a, g));
    }
    Err(WrightError::NoBoundary { lambda, pair })
}

fn refine_boundary(lambda: f64, pair: usize, mut lo: f64, g_lo: f64, mut hi: f64) -> Option<f64> {
    let lo_positive = g_lo > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let g = connection_gap(lambda, mid, pair)?;
        if (g > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

fn count_changes_across(lambda: f64, pair: usize, a: f64) -> bool {
    let n = |a: f64| count_contributory_pairs(lambda, a).map(|r| r.n_pairs).ok();
    for delta in [1e-3, 3e-3] {
        if let (Some(lo), Some(hi)) = (n(a - delta), n(a + delta)) {
            let (more, fewer) = (lo.max(hi), lo.min(hi));
            return more >= pair && fewer + 1 == more;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn real_saddles_of_table_one() {
        for (l, a, want) in [(-0.25, 1.0, 0.83644438), (1.0, 1.2, 0.62236250), (0.5, 0.8, 0.12181472)] {
            let p = Phase::minus(l, a).unwrap();
            let s = *solve_real_saddle(&p).unwrap().last().unwrap();
            assert!(close(s.location.re, want, 5e-9), "{l} {a}: {}", s.location.re);
            assert!(s.residual(&p) < 1e-13);
        }
    }

    #[test]
    fn two_real_roots_are_ascending_and_bracket_the_minimum() {
        let p = Phase::minus(1.0, 1.2).unwrap();
        let r = solve_real_saddle(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].location.re < 0.0 && r[1].location.re > 0.0);
        assert!(close(r[0].location.re, -r[1].location.re, 1e-13));
    }

    #[test]
    fn exact_curve_point_gives_the_double_root() {
        let p = Phase::minus(1.0, 1.0).unwrap();
        let r = solve_real_saddle(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, SaddleKind::RealDouble);
        assert_eq!(r[0].location.re, 0.0);
    }

    #[test]
    fn below_curve_has_no_real_saddle() {
        let p = Phase::minus(1.5, 0.5).unwrap();
        assert!(matches!(solve_real_saddle(&p), Err(WrightError::NoRealSaddle { .. })));
    }

    #[test]
    fn complex_pair_location() {
        let p = Phase::minus(1.5, 0.5).unwrap();
        let s = solve_complex_pair(&p).unwrap();
        assert!(close(s.location.re, 0.24834557, 5e-9));
        assert!(close(s.location.im, 0.90919096, 5e-9));
        assert!(s.residual(&p) < 1e-12);
    }

    #[test]
    fn complex_pair_collapses_onto_the_double_saddle() {
        let p = Phase::minus(1.0, 1.0 - 1e-8).unwrap();
        let s = solve_complex_pair(&p).unwrap();
        assert!(s.location.norm() < 1e-3);
    }

    #[test]
    fn curve_values() {
        assert_eq!(double_saddle_curve(1.0), 1.0);
        assert!(close(double_saddle_curve(0.5), 0.75 * 0.5f64.powf(1.0 / 3.0), 1e-15));
        let (l, a) = double_saddle_curve_max();
        assert!(close(l, 2.0934952366, 1e-8));
        assert!(close(a, 1.1912336451, 1e-8));
    }

    #[test]
    fn double_saddle_point_is_degenerate() {
        for l in [0.5, 1.0, 2.0, 3.7] {
            let s = double_saddle_point(l).unwrap();
            let p = Phase::minus(l, double_saddle_curve(l)).unwrap();
            assert!(p.dh(s.location).norm() < 1e-13);
            assert!(s.second_derivative.norm() < 1e-13);
            assert!(close(s.phase_value.re, p.h(s.location).re, 1e-13));
        }
        assert!(close(double_saddle_point(2.0).unwrap().location.re, 2.0 / 3.0 * 2f64.ln(), 1e-15));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_minus(-0.25, 1.0).unwrap().regime, Regime::SingleReal);
        assert_eq!(classify_minus(1.0, 1.2).unwrap().regime, Regime::TwoReal);
        assert_eq!(classify_minus(1.5, 0.5).unwrap().regime, Regime::ConjugatePair);
        assert_eq!(classify_minus(1.0, 1.0).unwrap().regime, Regime::Double);
    }

    #[test]
    fn chain_saddles() {
        let p = Phase::plus(3.0, 0.2).unwrap();
        let c = complex_saddle_chain(&p, 2).unwrap();
        assert!(close(c[0].location.re, 0.26888, 1e-4) && close(c[0].location.im, 1.4952, 1e-4));
        assert!(close(c[1].location.im, PI, 1e-9));
        let p = Phase::plus(6.0, 0.2).unwrap();
        let c = complex_saddle_chain(&p, 3).unwrap();
        assert!(close(c[1].location.im, 1.7546, 1e-4));
        for s in &c {
            assert!(s.residual(&p) < 1e-12);
        }
    }

    #[test]
    fn descent_directions_are_descent() {
        let h2 = C64::new(0.3, -1.2);
        for d in descent_directions(h2) {
            let q = h2 * d * d;
            assert!(q.im.abs() < 1e-14 && q.re < 0.0);
        }
        let [up, _] = descent_directions(C64::new(2.0, 0.0));
        assert!(close(up.im, 1.0, 1e-15));
    }

    #[test]
    fn n_zero_path_goes_to_infinity_plus_pi() {
        let p = Phase::plus(1.0, 0.5).unwrap();
        let u0 = solve_real_saddle(&p).unwrap()[0];
        let out = trace_descent_path(&p, &u0, Branch::Upper, &[]).unwrap();
        assert_eq!(out.terminus, Terminus::InfinityPlusPi);
        let out = trace_descent_path(&p, &u0, Branch::Lower, &[]).unwrap();
        assert_eq!(out.terminus, Terminus::InfinityMinusPi);
    }

    #[test]
    fn minus_real_saddle_paths_go_right() {
        let p = Phase::minus(-0.25, 1.0).unwrap();
        let u0 = solve_real_saddle(&p).unwrap()[0];
        let up = trace_descent_path(&p, &u0, Branch::Upper, &[]).unwrap();
        let down = trace_descent_path(&p, &u0, Branch::Lower, &[]).unwrap();
        assert_eq!(up.terminus, Terminus::InfinityPlusPi);
        assert_eq!(down.terminus, Terminus::InfinityMinusPi);
    }
}
