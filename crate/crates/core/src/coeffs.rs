//! Expansion coefficients by numerical series reversion.
//!
//! At a simple saddle, −w²/2 = h(u) − h(u₀) is inverted for u(w); the even
//! part of du/dw gives the A_k. At the W⁻ double saddle the cubic
//! −w³/3 = h(u) − h(u₀) gives the B_k.

use num_complex::Complex64;

use crate::error::{Result, WrightError};
use crate::params::Sign;
use crate::saddles::{double_saddle_curve, double_saddle_location, Phase, Saddle};
use crate::scalar::Scalar;

type C64 = Complex64;

/// Below this |h''| a saddle is treated as degenerate.
pub const DEGENERATE_THRESHOLD: f64 = 1e-10;

/// Phase derivatives h₀⁽ⁿ⁾ at a saddle, n = 2..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTable {
    pub saddle: Saddle,
    pub sign: Sign,
    values: Vec<C64>,
}

impl DerivativeTable {
    /// h₀⁽ⁿ⁾ for 2 ≤ n ≤ n_max.
    pub fn get(&self, n: usize) -> C64 {
        assert!(n >= 2 && n <= self.n_max(), "derivative order {n} outside 2..={}", self.n_max());
        self.values[n - 2]
    }

    pub fn n_max(&self) -> usize {
        self.values.len() + 1
    }

    /// h₀⁽²⁾, h₀⁽³⁾, ... in order.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// 𝐡_n = h₀⁽ⁿ⁾ / h₀''.
    pub fn ratio(&self, n: usize) -> C64 {
        self.get(n) / self.get(2)
    }

    /// Table built from explicit values (h₀⁽²⁾ first), for synthetic phases.
    pub fn from_values(saddle: Saddle, sign: Sign, values: Vec<C64>) -> Self {
        DerivativeTable { saddle, sign, values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    SimpleSaddleA,
    DoubleSaddleB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    pub kind: SeriesKind,
    /// A_0.. or B_0..; the first entry is exactly 1.
    pub coefficients: Vec<C64>,
    /// h₀'' for A-type, H = 2h₀''' for B-type.
    pub scale: C64,
    pub order: usize,
}

/// h^{(n)}(u) = ½(e^u + s(−λ)ⁿe^{−λu}) for n = 0..=n_max, given e^u and
/// e^{−λu}; entries 0 and 1 are left at zero.
pub fn saddle_derivatives<T: Scalar>(lambda: f64, sign: Sign, exp_u: &T, exp_mlu: &T, n_max: usize) -> Vec<T> {
    let half = exp_u.lift(0.5);
    let mut out = vec![exp_u.zero_like(); n_max + 1];
    let mut lam_pow = exp_u.lift(sign.factor() * lambda * lambda);
    let step = exp_u.lift(-lambda);
    for n in 2..=n_max {
        out[n] = half.clone() * (exp_u.clone() + lam_pow.clone() * exp_mlu.clone());
        lam_pow = lam_pow * step.clone();
    }
    out
}

pub fn derivative_table(saddle: &Saddle, phase: &Phase, n_max: usize) -> Result<DerivativeTable> {
    if n_max < 2 {
        return Err(WrightError::Domain(format!("n_max must be at least 2, got {n_max}")));
    }
    let u = saddle.location;
    let d = saddle_derivatives(phase.lambda, phase.sign, &u.exp(), &(-phase.lambda * u).exp(), n_max);
    Ok(DerivativeTable { saddle: *saddle, sign: phase.sign, values: d[2..].to_vec() })
}

/// Central difference of the analytic (n−1)-th derivative with one
/// Richardson step (step 10⁻⁴).
pub fn finite_difference_derivative(phase: &Phase, u: C64, n: u32) -> C64 {
    let lower = |v: C64| if n == 2 { phase.dh(v) } else { phase.dnh(n - 1, v) };
    let central = |d: f64| (lower(u + d) - lower(u - d)) / (2.0 * d);
    let d = 1e-4;
    (4.0 * central(d / 2.0) - central(d)) / 3.0
}

/// First `len` coefficients of (1 + g)^{num/den} where g[0] = 0.
fn series_pow<T: Scalar>(g: &[T], num: i64, den: i64, len: usize) -> Vec<T> {
    let one = g[0].one_like();
    let mut p = Vec::with_capacity(len);
    p.push(one.clone());
    let den_t = one.lift(den as f64);
    for k in 1..len {
        let mut acc = one.zero_like();
        for j in 1..=k.min(g.len() - 1) {
            let c = (num + den) * j as i64 - den * k as i64;
            if c != 0 {
                acc = acc + one.lift(c as f64) * g[j].clone() * p[k - j].clone();
            }
        }
        p.push(acc / (den_t.clone() * one.lift(k as f64)));
    }
    p
}

/// Coefficients e_n of δ = Σ e_n tⁿ inverting t = δ(1 + g(δ))^{1/m}, for
/// the n in `wanted` (Lagrange: e_n = [δ^{n−1}](1+g)^{−n/m} / n).
fn lagrange_inverse<T: Scalar>(g: &[T], m: i64, wanted: impl Iterator<Item = usize>) -> Vec<(usize, T)> {
    wanted
        .map(|n| {
            let p = series_pow(g, -(n as i64), m, n);
            (n, p[n - 1].clone() / g[0].lift(n as f64))
        })
        .collect()
}

/// A_0..=A_order at a simple saddle from d[n] = h₀⁽ⁿ⁾ (d.len() ≥ 2·order + 3).
///
/// With δ = u − u₀ and h − h₀ = c₂δ²(1 + g(δ)), c_n = h₀⁽ⁿ⁾/n!, the
/// inverse δ(t) of t = δ√(1+g) gives A_k = (2k+1) e_{2k+1} / (h₀'')^k,
/// independent of the branch of √(−h₀'').
pub fn simple_saddle_coefficients<T: Scalar>(d: &[T], order: usize) -> Vec<T> {
    let len = 2 * order + 1;
    assert!(d.len() > 2 * order + 2, "need derivatives through n = {}", 2 * order + 2);
    let one = d[2].one_like();
    // c_n = h^(n)/n!
    let mut c = vec![one.zero_like(); 2 * order + 3];
    let mut fact = one.clone();
    for n in 2..c.len() {
        fact = fact * one.lift(n as f64);
        c[n] = d[n].clone() / fact.clone();
    }
    let mut g = vec![one.zero_like(); len];
    for m in 1..len {
        g[m] = c[m + 2].clone() / c[2].clone();
    }
    let e = lagrange_inverse(&g, 2, (0..=order).map(|k| 2 * k + 1));
    let mut out = Vec::with_capacity(order + 1);
    let mut h2_pow = one.clone();
    for (k, (_, ek)) in e.into_iter().enumerate() {
        out.push(one.lift((2 * k + 1) as f64) * ek / h2_pow.clone());
        h2_pow = h2_pow * d[2].clone();
    }
    out[0] = one;
    out
}

pub fn reverse_series_simple(table: &DerivativeTable, order: usize) -> Result<CoefficientSeries> {
    let h2 = table.get(2);
    if h2.norm() <= DEGENERATE_THRESHOLD {
        return Err(WrightError::DegenerateSaddle(h2.norm()));
    }
    if table.n_max() < 2 * order + 2 {
        return Err(WrightError::Domain(format!(
            "order {order} needs derivatives through n = {}, table has {}",
            2 * order + 2,
            table.n_max()
        )));
    }
    let mut d = vec![C64::new(0.0, 0.0); 2];
    d.extend_from_slice(&table.values()[..2 * order + 1]);
    Ok(CoefficientSeries {
        kind: SeriesKind::SimpleSaddleA,
        coefficients: simple_saddle_coefficients(&d, order),
        scale: h2,
        order,
    })
}

/// Coefficient of 𝐡₃²𝐡₄ in the numerator of A_2. Reversion gives −630;
/// the value −620 circulates in print.
pub const A2_H3SQ_H4: f64 = -630.0;

/// A_0..A_3 from the explicit rational expressions in 𝐡_n = h₀⁽ⁿ⁾/h₀''.
pub fn closed_form_a(table: &DerivativeTable) -> Result<Vec<C64>> {
    if table.n_max() < 8 {
        return Err(WrightError::Domain("closed-form A_3 needs derivatives through n = 8".into()));
    }
    let h2 = table.get(2);
    let r = |n| table.ratio(n);
    let (h3, h4, h5, h6, h7, h8) = (r(3), r(4), r(5), r(6), r(7), r(8));
    let a1 = (5.0 * h3 * h3 - 3.0 * h4) / (24.0 * h2);
    let a2 = (385.0 * h3.powi(4) + A2_H3SQ_H4 * h3 * h3 * h4 + 105.0 * h4 * h4 + 168.0 * h3 * h5 - 24.0 * h6)
        / (3456.0 * h2 * h2);
    let a3 = (425425.0 * h3.powi(6) - 1126125.0 * h3.powi(4) * h4 + 675675.0 * h3 * h3 * h4 * h4
        - 51975.0 * h4.powi(3)
        + 360360.0 * h3.powi(3) * h5
        - 249480.0 * h3 * h4 * h5
        + 13608.0 * h5 * h5
        - 83160.0 * h3 * h3 * h6
        + 22680.0 * h4 * h6
        + 12960.0 * h3 * h7
        - 1080.0 * h8)
        / (6220800.0 * h2.powi(3));
    Ok(vec![C64::new(1.0, 0.0), a1, a2, a3])
}

/// H = 2h₀''' = λ^{2/(1+λ)}(1+λ) at the double saddle.
pub fn double_saddle_scale(lambda: f64) -> f64 {
    lambda.powf(2.0 / (1.0 + lambda)) * (1.0 + lambda)
}

/// B_0..B_6 as polynomials in λ. The λ and λ³ coefficients of B_4 are 836
/// (reversion confirms; 826 circulates in print).
pub fn double_saddle_closed_form(lambda: f64) -> [f64; 7] {
    let l = lambda;
    let c1 = 2f64.powf(1.0 / 3.0);
    let c2 = 2f64.powf(2.0 / 3.0);
    let poly = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &x| acc * l + x);
    [
        1.0,
        (l - 1.0) / (c1 * 3.0),
        poly(&[1.0, -6.0, 1.0]) / (c2 * 20.0),
        poly(&[5.0, 93.0, -93.0, -5.0]) / 1620.0,
        -poly(&[277.0, 836.0, -6114.0, 836.0, 277.0]) / (c1 * 136080.0),
        poly(&[1.0, -61.0, -254.0, 254.0, 61.0, -1.0]) / (c2 * 16800.0),
        poly(&[959.0, 7098.0, -2031.0, -58708.0, -2031.0, 7098.0, 959.0]) / 10497600.0,
    ]
}

/// B_0..=B_order by cubic reversion: h − h₀ = c₃δ³(1 + g(δ)), t = δ(1+g)^{1/3},
/// B_k = (k+1) e_{k+1} 2^{2k/3}.
pub fn double_saddle_numeric(lambda: f64, order: usize) -> Vec<f64> {
    let a = double_saddle_curve(lambda);
    let u0 = double_saddle_location(lambda);
    let d = saddle_derivatives(lambda, Sign::Minus, &u0.exp(), &(-lambda * u0).exp(), order + 3);
    let mut c = vec![0.0; order + 4];
    let mut fact = 1.0;
    for n in 1..c.len() {
        fact *= n as f64;
        if n >= 3 {
            c[n] = d[n] / fact;
        }
    }
    let _ = a;
    let mut g = vec![0.0; order + 1];
    for m in 1..=order {
        g[m] = c[m + 3] / c[3];
    }
    lagrange_inverse(&g, 3, 1..=order + 1)
        .into_iter()
        .map(|(n, e)| {
            let k = n - 1;
            n as f64 * e * 2f64.powf(2.0 * k as f64 / 3.0)
        })
        .collect()
}

/// B_0..=B_order: printed polynomials for k ≤ 6, numerical reversion beyond.
pub fn double_saddle_coeffs(lambda: f64, order: usize) -> Result<CoefficientSeries> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(WrightError::Domain(format!("double saddle needs lambda > 0, got {lambda}")));
    }
    let closed = double_saddle_closed_form(lambda);
    let mut b: Vec<f64> = closed.iter().take(order + 1).copied().collect();
    if order > 6 {
        b.extend_from_slice(&double_saddle_numeric(lambda, order)[7..]);
    }
    Ok(CoefficientSeries {
        kind: SeriesKind::DoubleSaddleB,
        coefficients: b.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        scale: C64::new(double_saddle_scale(lambda), 0.0),
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddles::{classify_minus, solve_complex_pair, solve_real_saddle, SaddleKind};

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn minus_table(l: f64, a: f64, n: usize) -> DerivativeTable {
        let p = Phase::minus(l, a).unwrap();
        let s = classify_minus(l, a).unwrap().contributory[0];
        derivative_table(&s, &p, n).unwrap()
    }

    #[test]
    fn series_pow_matches_binomial() {
        // (1 + x)^{1/2} = 1 + x/2 − x²/8 + x³/16
        let g = [0.0, 1.0, 0.0, 0.0];
        let p = series_pow(&g, 1, 2, 4);
        assert_eq!(p, vec![1.0, 0.5, -0.125, 0.0625]);
    }

    #[test]
    fn table_matches_saddle_closed_form() {
        // h₀⁽ⁿ⁾ = ½(1 − (−λ)^{n−1})e^{u₀} + a(−λ)^{n−1} at a saddle, either sign.
        for (p, s) in [
            (Phase::minus(-0.25, 1.0).unwrap(), None),
            (Phase::plus(3.0, 0.2).unwrap(), None),
            (Phase::minus(1.5, 0.5).unwrap(), Some(())),
        ] {
            let saddle = match s {
                None => *solve_real_saddle(&p).unwrap().last().unwrap(),
                Some(()) => solve_complex_pair(&p).unwrap(),
            };
            let t = derivative_table(&saddle, &p, 8).unwrap();
            let e = saddle.location.exp();
            for n in 2..=8 {
                let m = (-p.lambda).powi(n as i32 - 1);
                let want = 0.5 * (1.0 - m) * e + p.a * m;
                assert!(rel(t.get(n), want) < 1e-13, "n={n}");
            }
        }
    }

    #[test]
    fn minus_double_root_third_derivative() {
        let p = Phase::minus(1.0, 1.0).unwrap();
        let s = solve_real_saddle(&p).unwrap()[0];
        let t = derivative_table(&s, &p, 3).unwrap();
        assert!((t.get(3) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn table_agrees_with_finite_differences() {
        let p = Phase::plus(3.0, 0.2).unwrap();
        let s = solve_real_saddle(&p).unwrap()[0];
        let t = derivative_table(&s, &p, 6).unwrap();
        for n in 2..=6u32 {
            let fd = finite_difference_derivative(&p, s.location, n);
            assert!(rel(fd, t.get(n as usize)) < 1e-7, "n={n}");
        }
    }

    #[test]
    fn table_one_coefficients() {
        let t = minus_table(-0.25, 1.0, 12);
        let a = reverse_series_simple(&t, 5).unwrap().coefficients;
        let want = [1.0, 8.087175e-2, 1.681574e-3, -1.284463e-4, -5.177287e-6, 4.453244e-7];
        for k in 0..6 {
            assert!((a[k].re - want[k]).abs() <= 5e-7 * want[k].abs(), "k={k} {}", a[k]);
            assert!(a[k].im.abs() < 1e-14);
        }
        let t = minus_table(1.0, 1.2, 12);
        let a = reverse_series_simple(&t, 5).unwrap().coefficients;
        assert!((a[1].re - 0.839435).abs() < 5e-7 && (a[5].re - 30.237515).abs() < 5e-6);
    }

    #[test]
    fn table_two_coefficients() {
        let t = minus_table(1.5, 0.5, 12);
        assert_eq!(t.saddle.kind, SaddleKind::ComplexPair);
        let a = reverse_series_simple(&t, 5).unwrap().coefficients;
        // Eight printed decimals in each component.
        let near = |z: C64, re: f64, im: f64| (z.re - re).abs() <= 5e-9 && (z.im - im).abs() <= 5e-9;
        assert!(near(a[1], 0.00929936, 0.19815193));
        assert!(near(a[2], -0.08194718, 0.01105633));
    }

    #[test]
    fn closed_forms_agree_with_reversion() {
        for (l, a) in [(-0.25, 1.0), (0.5, 0.8), (1.5, 0.5)] {
            let t = minus_table(l, a, 12);
            let num = reverse_series_simple(&t, 3).unwrap().coefficients;
            let closed = closed_form_a(&t).unwrap();
            for k in 0..4 {
                assert!(rel(num[k], closed[k]) < 1e-10, "({l},{a}) k={k}");
            }
        }
        let t = minus_table(0.5, 0.8, 8);
        assert!((closed_form_a(&t).unwrap()[3].re - 0.768780).abs() < 5e-7);
    }

    #[test]
    fn misprinted_a2_coefficient_is_off_by_exactly_ten() {
        let t = minus_table(-0.25, 1.0, 8);
        let num = reverse_series_simple(&t, 2).unwrap().coefficients[2];
        let (h2, h3, h4) = (t.get(2), t.ratio(3), t.ratio(4));
        let printed = closed_form_a(&t).unwrap()[2] + 10.0 * h3 * h3 * h4 / (3456.0 * h2 * h2);
        assert!(rel(printed, num) > 1e-2);
        assert!(rel(closed_form_a(&t).unwrap()[2], num) < 1e-12);
    }

    #[test]
    fn gaussian_phase_has_trivial_coefficients() {
        let s = minus_table(1.0, 1.2, 8).saddle;
        let mut values = vec![C64::new(0.0, 0.0); 11];
        values[0] = C64::new(0.7, 0.0);
        let t = DerivativeTable::from_values(s, Sign::Minus, values);
        let a = reverse_series_simple(&t, 5).unwrap().coefficients;
        assert_eq!(a[0], C64::new(1.0, 0.0));
        assert!(a[1..].iter().all(|v| v.norm() == 0.0));
        let c = closed_form_a(&t).unwrap();
        assert!(c[1..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn degenerate_saddle_is_rejected() {
        let p = Phase::minus(1.0, 1.0).unwrap();
        let s = solve_real_saddle(&p).unwrap()[0];
        let t = derivative_table(&s, &p, 12).unwrap();
        assert!(matches!(reverse_series_simple(&t, 3), Err(WrightError::DegenerateSaddle(_))));
    }

    #[test]
    fn double_saddle_polynomials_and_reversion() {
        let b = double_saddle_closed_form(1.0);
        // The printed 826 would give a numerator sum of -3908 at λ = 1.
        assert!((b[4] * 2f64.powf(1.0 / 3.0) * 136080.0 - 3888.0).abs() < 1e-9);
        assert_eq!(b[1], 0.0);
        assert_eq!(b[3], 0.0);
        assert_eq!(b[2], -4.0 / (2f64.powf(2.0 / 3.0) * 20.0));
        for l in [0.3, 0.5, 1.0, 2.0, 5.0] {
            let closed = double_saddle_closed_form(l);
            let num = double_saddle_numeric(l, 6);
            for k in 0..=6 {
                let tol = 1e-10 * closed[k].abs().max(1e-3);
                assert!((num[k] - closed[k]).abs() <= tol, "l={l} k={k} {} vs {}", num[k], closed[k]);
            }
        }
    }

    #[test]
    fn double_saddle_scale_is_twice_third_derivative() {
        for l in [0.3, 1.0, 2.0, 7.5] {
            let p = Phase::minus(l, double_saddle_curve(l)).unwrap();
            let h3 = p.dnh(3, C64::new(double_saddle_location(l), 0.0)).re;
            assert!(((2.0 * h3 - double_saddle_scale(l)) / double_saddle_scale(l)).abs() < 1e-12);
        }
        let s = double_saddle_coeffs(2.0, 10).unwrap();
        assert_eq!(s.coefficients.len(), 11);
        assert_eq!(s.coefficients[0], C64::new(1.0, 0.0));
    }
}
