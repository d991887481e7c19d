use legendre_core::ce::legendre_poly;
use legendre_core::dsl::Expr;
use legendre_core::operator::{apply_symbolic, legendre_expanded};
use legendre_core::poly::{ratio, Poly};
use legendre_core::quadrature::gauss_legendre;
use legendre_core::spectral::{
    assembly_rule, generalized_symmetric_eigenvalues, gram_matrix, spectrum, stiffness_matrix,
    Basis, Matrix, OpTag, WeakForm,
};
use proptest::prelude::*;

#[test]
fn golden_spectra() {
    let a2 = spectrum(OpTag::A2, Basis::Legendre, 8).unwrap();
    let want = [0.0, 4.0, 36.0, 144.0, 400.0, 900.0, 1764.0, 3136.0];
    for (e, w) in a2.entries.iter().zip(want) {
        assert!((e.eigenvalue - w).abs() < 1e-8, "{} vs {w}", e.eigenvalue);
    }
    let m = spectrum(OpTag::A, Basis::Monomial, 8).unwrap();
    for (e, w) in m.entries[..5].iter().zip([0.0, 2.0, 6.0, 12.0, 20.0]) {
        assert!((e.eigenvalue - w).abs() < 1e-8);
    }
    assert!(a2.entries.iter().all(|e| e.eigenvalue >= -1e-10));
}

#[test]
fn bases_agree() {
    for op in [OpTag::A, OpTag::A2] {
        for n in 4..=12 {
            let l = spectrum(op, Basis::Legendre, n).unwrap().eigenvalues();
            let m = spectrum(op, Basis::Monomial, n).unwrap().eigenvalues();
            for i in 0..n / 2 {
                assert!(
                    (l[i] - m[i]).abs() <= 1e-4,
                    "{op:?} N={n} i={i}: {} vs {}",
                    l[i],
                    m[i]
                );
            }
        }
    }
}

#[test]
fn weak_and_strong_forms_agree() {
    let l2 = legendre_expanded(2).unwrap();
    let rule = gauss_legendre(20).unwrap();
    let n = 8;
    let k = stiffness_matrix(
        WeakForm::Second,
        Basis::Monomial,
        n,
        &assembly_rule(n).unwrap(),
    );
    for i in 0..n {
        let u = Poly::monomial(ratio(1, 1), i);
        let lu =
            legendre_core::dsl::as_polynomial(&apply_symbolic(&l2, &Expr::from_poly(&u))).unwrap();
        for j in 0..n {
            let strong = rule.integrate(|x| lu.eval_f64(x) * x.powi(j as i32), -1.0, 1.0);
            assert!(
                (strong - k[(i, j)]).abs() <= 1e-9 * strong.abs().max(1.0),
                "({i},{j})"
            );
        }
    }
}

#[test]
fn legendre_gram_is_diagonal() {
    let g = gram_matrix(Basis::Legendre, 12, &assembly_rule(12).unwrap());
    for i in 0..12 {
        assert!((g[(i, i)] - 2.0 / (2 * i + 1) as f64).abs() < 1e-14);
    }
    let p = legendre_poly(3);
    assert!((p.eval_f64(1.0) - 1.0).abs() < 1e-15);
}

#[test]
fn generalized_problem_with_dense_mass() {
    let m = Matrix::from_rows(&[
        vec![4.0, 1.0, 0.5],
        vec![1.0, 3.0, 0.2],
        vec![0.5, 0.2, 2.0],
    ]);
    let v = generalized_symmetric_eigenvalues(&m, &m).unwrap();
    assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-13));
    // each eigenvalue makes K − λM singular
    let k = Matrix::from_rows(&[
        vec![2.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 3.0],
    ]);
    for lambda in generalized_symmetric_eigenvalues(&k, &m).unwrap() {
        let a: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| k[(i, j)] - lambda * m[(i, j)]).collect())
            .collect();
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        assert!(det.abs() < 1e-12, "lambda {lambda}: det {det}");
    }
}

fn random_poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]
    #[test]
    fn rayleigh_quotients_are_nonnegative(c in random_poly()) {
        let n = c.len();
        let rule = assembly_rule(n).unwrap();
        for form in [WeakForm::First, WeakForm::Second] {
            let k = stiffness_matrix(form, Basis::Legendre, n, &rule);
            let q: f64 = (0..n).map(|i| (0..n).map(|j| c[i] * k[(i, j)] * c[j]).sum::<f64>()).sum();
            prop_assert!(q >= -1e-10 * q.abs().max(1.0));
        }
    }
}
