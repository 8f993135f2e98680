use qbn::geometry::enumerate_vertices;
use qbn::infer::{
    bn_posterior, expectation_bounds, generate_constraints, joint_eval, natural_bounds, natural_program,
    reduce_theorem2, type1_bounds, InferenceOptions, Method, PointSelection, Type1Options,
};
use qbn::oracle::{check_lemma2, check_theorem1, joint_enumeration_posterior, vertex_ratio_extrema};
use qbn::scalar::{ratio, Rational};
use qbn::{parse_network, BoundStatus, IrrelevancePolicy, NetworkModel, Query};

fn fig1() -> NetworkModel {
    parse_network(include_str!("../fixtures/fig1.qbn")).unwrap()
}

fn f(r: &Rational) -> f64 {
    qbn::scalar::rational_to_f64(r)
}

fn selection(model: &NetworkModel, pf: Rational, pb: Rational) -> PointSelection<Rational> {
    let precise = model.with_policy(IrrelevancePolicy::None).unwrap();
    PointSelection::from_fn(&precise, |v, k| match model.variable(v).name.as_str() {
        "F" => vec![pf.clone(), Rational::from_integer(1.into()) - &pf],
        "B" => vec![pb.clone(), Rational::from_integer(1.into()) - &pb],
        _ => model.local_vertices(v, k).unwrap().points.remove(0),
    })
}

#[test]
fn joint_product() {
    let m = fig1();
    let sel = selection(&m, ratio(1, 2), ratio(1, 2));
    assert_eq!(joint_eval(&m, &sel, &[0, 0, 0, 0, 0]), ratio(72, 1000));
}

#[test]
fn posteriors_at_vertices() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let hi = bn_posterior(&m, &selection(&m, ratio(1, 2), ratio(1, 2)), &q).unwrap();
    assert_eq!(hi, ratio(145, 325));
    let lo = bn_posterior(&m, &selection(&m, ratio(1, 2), ratio(2, 5)), &q).unwrap();
    assert!((f(&lo) - 0.38615).abs() < 1e-5);
    let pl = Query::parse::<&str>(&m, "L=l", &[]).unwrap();
    let marginal = bn_posterior(&m, &selection(&m, ratio(2, 5), ratio(1, 2)), &pl).unwrap();
    assert_eq!(marginal, ratio(27, 100));
}

#[test]
fn type1_interval() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let b = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
    assert!((f(&b.lower) - 0.38615).abs() < 1e-5, "{}", b.lower);
    assert!((f(&b.upper) - 0.44615).abs() < 1e-5, "{}", b.upper);
    let full = type1_bounds::<Rational>(&m, &q, &Type1Options { prune: false, ..Default::default() }).unwrap();
    assert_eq!((b.lower, b.upper), (full.lower, full.upper));
}

#[test]
fn constraint_counts_without_irrelevance() {
    let m = fig1();
    let sys = generate_constraints(&m, &IrrelevancePolicy::None, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!((sys.equalities(), sys.inequalities()), (9, 4));
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let b = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::None, false).unwrap();
    assert_eq!((b.lower, b.upper), (ratio(0, 1), ratio(1, 1)));
}

#[test]
fn reduced_coefficients() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let r = reduce_theorem2(&m, &q).unwrap();
    assert_eq!(
        r.numerator,
        vec![ratio(48, 100), ratio(6, 100), ratio(5, 1000), ratio(35, 1000)]
    );
    assert_eq!(r.denominator, vec![ratio(6, 10), ratio(6, 10), ratio(5, 100), ratio(5, 100)]);
    assert_eq!(r.system.rows.len(), 8);
}

#[test]
fn natural_interval_both_paths() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let nd = IrrelevancePolicy::Nondescendants;
    let reduced = natural_bounds::<Rational>(&m, &q, &nd, true).unwrap();
    let full = natural_bounds::<Rational>(&m, &q, &nd, false).unwrap();
    assert!((f(&reduced.lower) - 0.3818).abs() < 1e-4);
    assert!((f(&reduced.upper) - 0.4509).abs() < 1e-4);
    assert_eq!(reduced.lower, full.lower);
    assert_eq!(reduced.upper, full.upper);
    assert_eq!(reduced.lower_status, BoundStatus::Exact);
    let (fp, _) = natural_program(&m, &q, &nd, true).unwrap();
    assert_eq!(fp.dimension(), 4);
}

#[test]
fn reduction_for_a_root_target() {
    let m = fig1();
    let q = Query::parse(&m, "F=f", &["L=l"]).unwrap();
    let r = reduce_theorem2(&m, &q).unwrap();
    assert_eq!(r.free, vec![0, 1]);
    assert_eq!(r.fixed, vec![2, 3, 4]);
    assert_eq!(r.numerator, vec![ratio(6, 10), ratio(6, 10), ratio(0, 1), ratio(0, 1)]);
    assert_eq!(r.denominator, vec![ratio(6, 10), ratio(6, 10), ratio(5, 100), ratio(5, 100)]);
}

#[test]
fn reduction_needs_the_nondescendant_policy() {
    let m = fig1().with_policy(IrrelevancePolicy::None).unwrap();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    assert_eq!(reduce_theorem2(&m, &q).unwrap_err().kind(), "ReductionNotApplicable");
}

#[test]
fn expectations() {
    let m = fig1();
    let d = m.node("D").unwrap();
    let l = m.node("L").unwrap();
    let opts = InferenceOptions::default();
    let signed = expectation_bounds::<Rational>(&m, d, &[ratio(1, 1), ratio(-1, 1)], &[(l, 0)], &opts).unwrap();
    assert!((f(&signed.lower) + 0.2364).abs() < 2e-4);
    assert!((f(&signed.upper) + 0.0982).abs() < 2e-4);
    assert_eq!(signed.lower, ratio(2, 1) * ratio(21, 55) - ratio(1, 1));

    let constant = expectation_bounds::<Rational>(&m, d, &[ratio(7, 1), ratio(7, 1)], &[(l, 0)], &opts).unwrap();
    assert_eq!((constant.lower, constant.upper), (ratio(7, 1), ratio(7, 1)));

    let indicator = expectation_bounds::<Rational>(&m, d, &[ratio(1, 1), ratio(0, 1)], &[(l, 0)], &opts).unwrap();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let direct = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
    assert_eq!((indicator.lower, indicator.upper), (direct.lower, direct.upper));

    let t1 = InferenceOptions {
        method: Method::Type1,
        ..InferenceOptions::default()
    };
    let signed1 = expectation_bounds::<Rational>(&m, d, &[ratio(1, 1), ratio(-1, 1)], &[(l, 0)], &t1).unwrap();
    assert!((f(&signed1.lower) - (2.0 * 0.38615 - 1.0)).abs() < 2e-5);
    assert!(expectation_bounds::<Rational>(&m, d, &[ratio(1, 1)], &[], &opts).is_err());
}

#[test]
fn float_mode_agrees() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let nd = IrrelevancePolicy::Nondescendants;
    for reduce in [true, false] {
        let b = natural_bounds::<f64>(&m, &q, &nd, reduce).unwrap();
        assert!((b.lower - 21.0 / 55.0).abs() < 1e-6);
        assert!((b.upper - 239.0 / 530.0).abs() < 1e-6);
    }
    let t = type1_bounds::<f64>(&m, &q, &Type1Options::default()).unwrap();
    assert!((t.upper - 0.145 / 0.325).abs() < 1e-9);
}

#[test]
fn root_marginal_without_evidence() {
    let m = fig1();
    let q = Query::parse::<&str>(&m, "F=f", &[]).unwrap();
    let t = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
    assert_eq!((t.lower, t.upper), (ratio(2, 5), ratio(1, 2)));
    let n = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
    assert_eq!((n.lower, n.upper), (ratio(2, 5), ratio(1, 2)));
}

#[test]
fn enumeration_matches_elimination_at_every_combination() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let marginal = Query::parse::<&str>(&m, "H=h", &[]).unwrap();
    for pf in [ratio(2, 5), ratio(1, 2)] {
        for pb in [ratio(2, 5), ratio(1, 2)] {
            let sel = selection(&m, pf.clone(), pb);
            for query in [&q, &marginal] {
                assert_eq!(
                    bn_posterior(&m, &sel, query).unwrap(),
                    joint_enumeration_posterior(&m, &sel, query).unwrap()
                );
            }
        }
    }
}

#[test]
fn reduced_program_against_vertices() {
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let (fp, _) = natural_program(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
    let v = vertex_ratio_extrema(&fp).unwrap();
    assert_eq!((v.lower, v.upper), (ratio(21, 55), ratio(239, 530)));
    assert_eq!(fp.ratio_at(&[ratio(2, 11), ratio(3, 11), ratio(3, 11), ratio(3, 11)]), Some(ratio(21, 55)));
    assert_eq!(fp.ratio_at(&[ratio(2, 9), ratio(2, 9), ratio(2, 9), ratio(3, 9)]), Some(ratio(239, 530)));
}

#[test]
fn type1_product_vertices() {
    // the four product distributions alone give the type-1 interval
    let m = fig1();
    let q = Query::parse(&m, "D=d", &["L=l"]).unwrap();
    let (mut fp, _) = natural_program(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
    let products = [(2, 2), (2, 1), (1, 2), (1, 1)].map(|(a, b)| {
        let pf = if a == 2 { ratio(2, 5) } else { ratio(1, 2) };
        let pb = if b == 2 { ratio(2, 5) } else { ratio(1, 2) };
        let one = ratio(1, 1);
        vec![
            &pf * &pb,
            &pf * (&one - &pb),
            (&one - &pf) * &pb,
            (&one - &pf) * (&one - &pb),
        ]
    });
    let ratios: Vec<Rational> = products.iter().map(|w| fp.ratio_at(w).unwrap()).collect();
    let lo = ratios.iter().min().unwrap();
    let hi = ratios.iter().max().unwrap();
    assert!((f(lo) - 0.38615).abs() < 1e-5 && (f(hi) - 0.44615).abs() < 1e-5);
    fp.le_rows.clear();
    assert!(vertex_ratio_extrema(&fp).unwrap().upper >= *hi);
}

#[test]
fn d_separated_conditioning_on_fig1() {
    let m = fig1();
    let report = check_theorem1(&m, 1, usize::MAX).unwrap();
    assert!(report.passed(), "{:?}", report.failures.first());
    assert!(report.checks > 0);
    let f_given_b = |b: &str| {
        let q = Query::parse(&m, "F=f", &[b]).unwrap();
        type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap()
    };
    for b in ["B=b", "B=bc"] {
        let k = f_given_b(b);
        assert_eq!((k.lower, k.upper), (ratio(2, 5), ratio(1, 2)));
    }
}

#[test]
fn conditional_constraints_on_fig1() {
    let m = fig1();
    let nd = IrrelevancePolicy::Nondescendants;
    let sys = generate_constraints(&m, &nd, &[0, 1]).unwrap();
    let v = enumerate_vertices(&sys.constraint_set()).unwrap();
    let unconditioned = check_lemma2(&m, &nd, &sys, &v, 0).unwrap();
    assert!(unconditioned.passed());
    // 6 vertices, 2 nodes, 4 interval rows each
    assert_eq!(unconditioned.checks, 6 * 2 * 4);
    let conditioned = check_lemma2(&m, &nd, &sys, &v, 1).unwrap();
    assert!(conditioned.passed());
    assert_eq!(conditioned.checks, 6 * 2 * 4 * 3);
    for w in v.iter() {
        let pf = &w[0] + &w[1];
        assert!(pf >= ratio(2, 5) && pf <= ratio(1, 2));
    }
}
