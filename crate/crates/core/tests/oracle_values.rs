use wright_core::oracle::{w_minus, w_plus, wright_series, PrecisionConfig};
use wright_core::{ScaledArgs, WrightParams};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Reference values from an independent 80-digit summation with the same
// binary a and x.
#[test]
fn w_minus_reference_points() {
    let p = PrecisionConfig::default();
    let cases = [
        (-0.25, 1.0, 40.0, 3.8632810916772724e-7),
        (1.0, 1.2, 40.0, 0.0026930192196836973339),
        (0.5, 0.8, 40.0, 0.08210639183935377753),
        (1.5, 0.5, 40.0, -202.37496344525137466),
    ];
    for (lambda, a, x, want) in cases {
        let r = w_minus(ScaledArgs::minus(lambda, a, x).unwrap(), p).unwrap();
        assert!(rel(r.value, want) < 1e-15, "({lambda},{a},{x}) {} vs {want}", r.value);
    }
}

#[test]
fn w_plus_table_values() {
    let p = PrecisionConfig::default();
    for (lambda, x, want) in [(3.0, 20.0, 7.070661e5), (4.0, 30.0, 3.823713e8), (6.0, 40.0, 4.352648e10)] {
        let r = w_plus(ScaledArgs::plus(lambda, 0.2, x).unwrap(), p).unwrap();
        assert!(rel(r.value, want) < 5e-7, "{lambda} {x}: {}", r.value);
    }
}

/// Modified Bessel series z^{(1-μ)/2} I_{μ-1}(2√z) = Σ zⁿ / (n! (n+μ-1)!)
/// for integer μ, summed in f64 (all terms positive).
fn bessel_reduction(mu: u32, z: f64) -> f64 {
    let mut term = 1.0;
    for k in 1..mu {
        term /= k as f64;
    }
    let mut sum = term;
    for n in 1..200 {
        term *= z / (n as f64 * (n as f64 + mu as f64 - 1.0));
        sum += term;
        if term < 1e-20 * sum {
            break;
        }
    }
    sum
}

#[test]
fn lambda_one_reduces_to_bessel() {
    let p = PrecisionConfig::default();
    for mu in [1u32, 2, 5] {
        for z in [0.5, 1.0, 4.0] {
            let r = wright_series(WrightParams::new(1.0, mu as f64).unwrap(), z, p).unwrap();
            let want = bessel_reduction(mu, z);
            assert!(rel(r.value, want) < 1e-12, "mu={mu} z={z}");
        }
    }
    let r = wright_series(WrightParams::new(1.0, 2.0).unwrap(), 1.0, p).unwrap();
    assert!(rel(r.value, 1.5906368546373291) < 1e-15);
}

#[test]
fn precision_increase_is_stable() {
    let lo = PrecisionConfig::default();
    let hi = PrecisionConfig::with_digits(80).unwrap();
    let args = ScaledArgs::minus(-0.25, 1.0, 40.0).unwrap();
    let a = w_minus(args, lo).unwrap();
    let b = w_minus(args, hi).unwrap();
    let diff = ((a.exact.clone() - b.exact.clone()) / b.exact.clone()).abs();
    assert!(diff.log10_abs() < -35.0);
}

#[test]
fn w_plus_is_positive_on_a_grid() {
    let p = PrecisionConfig::with_digits(30).unwrap();
    for lambda in [-0.5, 0.0, 0.5, 2.0, 5.0] {
        for a in [0.1, 1.0] {
            for x in [0.5, 5.0, 25.0] {
                let r = w_plus(ScaledArgs::plus(lambda, a, x).unwrap(), p).unwrap();
                assert!(r.value > 0.0, "({lambda},{a},{x})");
            }
        }
    }
}
