mod common;

use legendre_core::dsl::DslFunction;
use legendre_core::forms::{
    boundary_limit, bracket_with_one, bracket_with_x, form1, form2, functional_b1, green_residual,
    LegendreP, LimitConfig, RealFunction, GREEN_TOL,
};
use legendre_core::operator::legendre_expanded;
use legendre_core::quadrature::{Abscissa, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs(seed: u64, n: usize) -> Vec<(DslFunction, DslFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let f = DslFunction::parse(&common::random_dsl(&mut rng)).unwrap();
            let g = DslFunction::parse(&common::random_dsl(&mut rng)).unwrap();
            (f, g)
        })
        .collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn forms_are_antisymmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (f, g) in pairs(4, 20) {
        for _ in 0..5 {
            let a = Abscissa::new(rng.gen_range(-0.95..0.95));
            assert!(close(
                form1(&f, &g, &a).unwrap(),
                -form1(&g, &f, &a).unwrap(),
                1e-12
            ));
            assert!(close(
                form2(&f, &g, &a).unwrap(),
                -form2(&g, &f, &a).unwrap(),
                1e-12
            ));
        }
    }
}

#[test]
fn bracket_identities() {
    let one = DslFunction::parse("1").unwrap();
    let id = DslFunction::parse("x").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (f, _) in pairs(7, 20) {
        for _ in 0..5 {
            let a = Abscissa::new(rng.gen_range(-0.95..0.95));
            let b1 = bracket_with_one(&f, &a).unwrap();
            let bx = bracket_with_x(&f, &a).unwrap();
            assert!(close(form2(&f, &one, &a).unwrap(), b1, 1e-12));
            assert!(close(form2(&f, &id, &a).unwrap(), bx, 1e-12));
            let d = f.derivs(&a, 2).unwrap();
            let w = a.one_minus_x2();
            let rhs = a.x() * b1 - w * w * d[2] + 2.0 * w * d[0];
            assert!(close(bx, rhs, 1e-12), "{}: {bx} vs {rhs}", f.label());
        }
    }
}

#[test]
fn green_residuals_on_random_pairs() {
    let ops = [legendre_expanded(1).unwrap(), legendre_expanded(2).unwrap()];
    for (f, g) in pairs(8, 20) {
        for op in &ops {
            let r = green_residual(op, &f, &g, -0.9, 0.9, GREEN_TOL).unwrap();
            assert!(
                r.residual <= 10.0 * GREEN_TOL * r.integral.abs().max(1.0),
                "{} / {}: {r:?}",
                f.label(),
                g.label()
            );
        }
    }
}

#[test]
fn limit_examples() {
    let cfg = LimitConfig::default();
    let ln = DslFunction::parse("ln(1-x)").unwrap();
    let b1 = boundary_limit(
        "B1",
        |a: &Abscissa| functional_b1(&ln, a),
        Side::Right,
        &cfg,
    );
    assert!(b1.converged && (b1.estimate + 2.0).abs() < 1e-9);
    let x = DslFunction::parse("x").unwrap();
    let with_one = boundary_limit(
        "[x,1]_2",
        |a: &Abscissa| bracket_with_one(&x, a),
        Side::Right,
        &cfg,
    );
    assert!(with_one.converged && with_one.is_zero(cfg.zero_tol));
    let p = LegendreP(7);
    for side in Side::both() {
        let l = boundary_limit("[P7,x]_2", |a: &Abscissa| bracket_with_x(&p, a), side, &cfg);
        assert!(l.converged && l.estimate.abs() < 1e-8);
    }
}
