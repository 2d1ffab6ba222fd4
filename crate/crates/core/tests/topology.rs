use num_complex::Complex64;
use wright_core::saddles::{
    complex_saddle_chain, count_contributory_pairs, stokes_boundary, trace_descent_path, Branch, Phase, Terminus,
};
use wright_core::WrightError;

#[test]
fn pair_counts() {
    // (λ, a, N, last pair subdominant)
    let cases = [
        (1.0, 0.5, 0, false),
        (2.0, 0.6, 0, false),
        (3.0, 0.7, 0, false),
        (2.0, 0.3, 1, true),
        (3.0, 0.2, 1, true),
        (4.0, 0.2, 1, false),
        (6.0, 0.2, 1, false),
        (6.0, 0.1, 2, true),
    ];
    for (l, a, n, sub) in cases {
        let r = count_contributory_pairs(l, a).unwrap();
        assert_eq!(r.n_pairs, n, "lambda={l} a={a}");
        assert_eq!(r.last_pair_subdominant, sub, "lambda={l} a={a}");
        assert_eq!(r.saddles.len(), n + 1);
        assert_eq!(r.directions.len(), n + 1);
        for (j, s) in r.saddles.iter().enumerate().skip(1) {
            assert_eq!(s.index, j);
            assert!(s.location.im > 0.0);
        }
    }
}

#[test]
fn negative_lambda_has_no_pairs() {
    let r = count_contributory_pairs(-0.5, 0.7).unwrap();
    assert_eq!(r.n_pairs, 0);
    assert_eq!(r.directions, vec![Complex64::i()]);
}

#[test]
fn subdominance_follows_real_part_of_phase() {
    for (l, a) in [(3.0, 0.2), (4.0, 0.2), (6.0, 0.2), (6.0, 0.1)] {
        let r = count_contributory_pairs(l, a).unwrap();
        let last = r.saddles.last().unwrap();
        assert_eq!(r.last_pair_subdominant, last.phase_value.re < 0.0);
    }
}

#[test]
fn first_pair_boundaries() {
    let b2 = stokes_boundary(2.0, 1).unwrap();
    assert!((b2 - 0.4075).abs() < 1e-3, "{b2}");
    for (l, want) in [(3.0, 0.60126), (4.0, 0.68209), (6.0, 0.72433)] {
        let b = stokes_boundary(l, 1).unwrap();
        assert!((b - want).abs() < 1e-3, "lambda={l}: {b}");
    }
}

#[test]
fn second_pair_boundary_for_lambda_six() {
    let b = stokes_boundary(6.0, 2).unwrap();
    assert!((b - 0.16243).abs() < 1e-3, "{b}");
    assert_eq!(count_contributory_pairs(6.0, b - 5e-3).unwrap().n_pairs, 2);
    assert_eq!(count_contributory_pairs(6.0, b + 5e-3).unwrap().n_pairs, 1);
}

#[test]
fn boundary_absent_for_lambda_four_second_pair() {
    assert!(matches!(stokes_boundary(4.0, 2), Err(WrightError::NoBoundary { pair: 2, .. })));
}

#[test]
fn chain_saddles_sit_in_their_strips() {
    let p = Phase::plus(6.0, 0.1).unwrap();
    let chain = complex_saddle_chain(&p, 2).unwrap();
    assert_eq!(chain.len(), 2);
    for (k, s) in chain.iter().enumerate() {
        let k = (k + 1) as f64;
        let y = s.location.im;
        assert!(y > (2.0 * k - 2.0) * std::f64::consts::PI / 6.0 && y <= 2.0 * k * std::f64::consts::PI / 6.0);
        assert!(s.location.re > 0.0);
        assert!(s.residual(&p) < 1e-12);
    }
}

#[test]
fn real_saddle_path_at_lambda_one_reaches_the_right() {
    let p = Phase::plus(1.0, 0.5).unwrap();
    let r = count_contributory_pairs(1.0, 0.5).unwrap();
    let out = trace_descent_path(&p, &r.saddles[0], Branch::Upper, &[]).unwrap();
    assert_eq!(out.terminus, Terminus::InfinityPlusPi);
    assert!(out.samples.len() > 10);
    let c = p.h(r.saddles[0].location).im;
    for u in out.samples.iter().step_by(25) {
        assert!((p.h(*u).im - c).abs() < 1e-6);
    }
}
