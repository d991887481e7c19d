mod common;

use legendre_core::ce::{
    default_corpus, k_of_x, k_sup, legendre_poly, legendre_square_corpus, random_polynomials,
    verify_bound, CEProblem, Prepared, PRESETS,
};
use legendre_core::quadrature::{legendre_derivatives, Abscissa, Side};

#[test]
fn hardy_pair_respects_its_bound() {
    let p = CEProblem::preset("hardy-unit").unwrap();
    let r = verify_bound(&p, &random_polynomials(11, 20, 6)).unwrap();
    assert!(r.violations.is_empty());
    assert!(r
        .ratios
        .iter()
        .all(|x| x.ratio_a <= 1.0 && x.ratio_b <= 1.0));
    assert!((r.bound - 1.0).abs() < 1e-10);
}

#[test]
fn presets_hold_on_both_corpora() {
    for name in PRESETS {
        let p = CEProblem::preset(name).unwrap();
        for corpus in [default_corpus(3), legendre_square_corpus(6)] {
            let r = verify_bound(&p, &corpus).unwrap();
            assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
            assert!(
                r.sharpness.ratio_over_k >= 1.0 - 1e-6
                    && r.sharpness.max_ratio <= r.bound * (1.0 + 1e-6)
            );
        }
    }
}

#[test]
fn operator_reproduces_derivative_of_legendre_expression() {
    // A(ℓ²[g]) = ℓ′[g] for g = Pₙ, since [Pₙ,1]₂(1) = 0
    let p = Prepared::new(&CEProblem::preset("ce-p1").unwrap()).unwrap();
    for n in 1..=6 {
        let lambda = (n * (n + 1)) as f64;
        let f = move |a: &Abscissa| lambda * lambda * legendre_poly(n).eval_f64(a.x());
        let af = p.apply_a(&f);
        for i in 0..=99 {
            let x = 0.99 * i as f64 / 99.0;
            let want = lambda * legendre_derivatives(n, x, 1)[1];
            let got = af.eval(&Abscissa::new(x));
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                "n={n} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn p1_k_matches_closed_form() {
    let p = CEProblem::preset("ce-p1").unwrap();
    for x in [0.1, 0.5, 0.9] {
        let k = k_of_x(&p, x).unwrap();
        assert!((k * k - common::p1_k_squared(1.0 - x)).abs() < 1e-12);
    }
    let prepared = Prepared::new(&p).unwrap();
    let k = prepared.k_function();
    for j in 1..=15 {
        let d = 10f64.powi(-j);
        let got = k.squared(&Abscissa::near(Side::Right, d));
        assert!((got - common::p1_k_squared(d)).abs() < 1e-10, "d={d}");
    }
    // the supremum is interior and exceeds the endpoint value 1/2
    let s = k_sup(&p).unwrap();
    let grid = (1..1000)
        .map(|i| common::p1_k_squared(i as f64 / 1000.0).sqrt())
        .fold(0.0, f64::max);
    assert!(s.value >= grid - 1e-12 && s.value - grid < 1e-5 && s.value > 0.5);
}

#[test]
fn k_is_lipschitz_on_compact_subintervals() {
    let p = Prepared::new(&CEProblem::preset("ce-p2").unwrap()).unwrap();
    let k = p.k_function();
    let xs: Vec<f64> = (0..=200).map(|i| 0.05 + 0.9 * i as f64 / 200.0).collect();
    let v: Vec<f64> = xs.iter().map(|x| k.at(&Abscissa::new(*x))).collect();
    let slopes: Vec<f64> = v
        .windows(2)
        .zip(xs.windows(2))
        .map(|(a, b)| ((a[1] - a[0]) / (b[1] - b[0])).abs())
        .collect();
    let l = slopes.iter().cloned().fold(0.0, f64::max);
    assert!(l.is_finite() && l < 100.0);
    // doubling the grid never produces a steeper difference quotient than 2L
    for w in xs.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let d = (k.at(&Abscissa::new(m)) - k.at(&Abscissa::new(w[0]))).abs();
        assert!(d <= 2.0 * l * (m - w[0]) + 1e-12);
    }
}

#[test]
fn custom_problem_round_trips_through_json() {
    let p = CEProblem::preset("ce-p2").unwrap();
    let text = serde_json::to_string(&p).unwrap();
    let back: CEProblem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}
