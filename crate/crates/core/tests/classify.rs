use legendre_core::classify::{
    classify, classify_powers, elm_consistency, parse_corpus, ClassifyConfig, Status,
    STANDARD_CORPUS,
};
use legendre_core::dsl::parse;
use legendre_core::quadrature::Side;

fn report(s: &str) -> legendre_core::classify::ClassificationReport {
    classify(&parse(s).unwrap(), &ClassifyConfig::default())
}

#[test]
fn seventh_legendre_polynomial() {
    let r = report("(429*x^7 - 693*x^5 + 315*x^3 - 35*x)/16");
    let e = elm_consistency(&r);
    assert!(e.applicable && e.consistent);
    assert!(e.conditions.iter().all(|c| c.1 == Status::Member));
    for name in ["[f,1]_2", "[f,x]_2"] {
        for side in Side::both() {
            assert!(r.limit(name, side).unwrap().estimate.abs() < 1e-8);
        }
    }
}

#[test]
fn negative_power_is_not_square_integrable_with_its_image() {
    let r = report("(1-x)^(-3/4)");
    assert_eq!(r.delta1_max.status, Status::NonMember);
    assert!(
        r.delta1_max.reason.contains("f in L2"),
        "{}",
        r.delta1_max.reason
    );
    let f = r.integrability("f").unwrap();
    let right = f.sides.iter().find(|s| s.endpoint == Side::Right).unwrap();
    assert!((right.slope.unwrap() + 0.75).abs() < 0.05);
}

#[test]
fn log_evidence() {
    let r = report("ln(1-x)");
    let b1 = r.limit("B1", Side::Right).unwrap();
    assert!(b1.converged && (b1.estimate + 2.0).abs() < 1e-8);
    assert!(r.domain_a.reason.contains("B1"));
    assert_eq!(
        r.integrability("l[f]").unwrap().verdict.status,
        Status::Member
    );
    assert_eq!(r.elm.iv_bounded.status, Status::NonMember);
    assert_eq!(
        r.elm.v_absolutely_continuous.status,
        r.elm.ii_derivative_l2.status
    );
    let x = r.limit("[f,x]_2", Side::Right).unwrap();
    assert!((x.estimate - 4.0).abs() < 1e-6);
}

#[test]
fn members_carry_converged_evidence() {
    let r = report("(1-x)^2*ln(1-x)");
    assert_eq!(r.main4.iii_s.status, Status::Member);
    for name in ["[f,1]_2", "[f,x]_2"] {
        assert!(r
            .limits
            .iter()
            .filter(|l| l.functional == name)
            .all(|l| l.converged));
    }
    for q in ["f", "l^2[f]"] {
        let e = r.integrability(q).unwrap();
        assert!(e
            .sides
            .iter()
            .all(|s| !s.divergent && s.status == Status::Member));
    }
}

#[test]
fn power_domains_agree_on_the_corpus() {
    let cfg = ClassifyConfig::default();
    for s in STANDARD_CORPUS.iter().step_by(3) {
        for p in classify_powers(&parse(s).unwrap(), 3, &cfg) {
            assert!(p.agree, "{s} n={}: {:?} vs {:?}", p.n, p.b_n, p.d_n);
        }
    }
}

#[test]
fn reports_serialize() {
    let r = report("x^3");
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["main4"]["iii_s"]["status"], "member");
    assert_eq!(v["limits"][0]["endpoint"], -1);
}

#[test]
fn corpus_file_format() {
    let text = "# domain corpus\nx^3\n  \nln(1-x) # log\n";
    let c = parse_corpus(text);
    assert_eq!(c.iter().map(|(l, _)| *l).collect::<Vec<_>>(), [2, 4]);
}
