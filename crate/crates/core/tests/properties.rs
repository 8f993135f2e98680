use proptest::prelude::*;

use qbn::infer::{bn_posterior, natural_bounds, type1_bounds, PointSelection, Type1Options};
use qbn::model::RawPolicy;
use qbn::oracle::{dsep_bruteforce, vertex_ratio_extrema};
use qbn::random::{random_dag, random_fractional, random_network, rng, NetworkShape};
use qbn::solve::{solve_fractional, Sense};
use qbn::{IrrelevancePolicy, NetworkModel, Query, Rational, Scalar};

fn small_network(seed: u64, credal: f64) -> NetworkModel {
    let shape = NetworkShape {
        nodes: 3,
        credal,
        ..NetworkShape::default()
    };
    random_network(&mut rng(seed), &shape, RawPolicy::Nondescendants)
}

/// Target value 0 of `t`, evidence value 1 of `e` when they differ.
fn query(m: &NetworkModel, t: usize, e: usize) -> Query {
    let evidence = if t == e { vec![] } else { vec![(e, 1)] };
    Query::new(m, (t, 0), evidence).unwrap()
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn extensions_are_nested(seed in any::<u64>(), t in 0usize..3, e in 0usize..3) {
        let m = small_network(seed, 0.7);
        let q = query(&m, t, e);
        let t1 = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
        let nd = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
        let none = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::None, false).unwrap();
        prop_assert!(t1.lower >= nd.lower && t1.upper <= nd.upper);
        prop_assert!(nd.lower >= none.lower && nd.upper <= none.upper);
    }

    #[test]
    fn reduction_matches_full_program(seed in any::<u64>(), t in 0usize..3, e in 0usize..3) {
        let m = small_network(seed, 0.7);
        let q = query(&m, t, e);
        let nd = IrrelevancePolicy::Nondescendants;
        let reduced = natural_bounds::<Rational>(&m, &q, &nd, true).unwrap();
        let full = natural_bounds::<Rational>(&m, &q, &nd, false).unwrap();
        prop_assert_eq!((reduced.lower, reduced.upper), (full.lower, full.upper));
    }

    #[test]
    fn float_tracks_rational(seed in any::<u64>(), t in 0usize..3, e in 0usize..3) {
        let m = small_network(seed, 0.7);
        let q = query(&m, t, e);
        let nd = IrrelevancePolicy::Nondescendants;
        let exact = natural_bounds::<Rational>(&m, &q, &nd, true).unwrap();
        let float = natural_bounds::<f64>(&m, &q, &nd, true).unwrap();
        prop_assert!((exact.lower.to_f64() - float.lower).abs() < 1e-6);
        prop_assert!((exact.upper.to_f64() - float.upper).abs() < 1e-6);
        let t1 = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
        let t1f = type1_bounds::<f64>(&m, &q, &Type1Options::default()).unwrap();
        prop_assert!((t1.lower.to_f64() - t1f.lower).abs() < 1e-9);
    }

    #[test]
    fn pruning_keeps_the_interval(seed in any::<u64>(), t in 0usize..4, e in 0usize..4) {
        let shape = NetworkShape::default();
        let m = random_network(&mut rng(seed), &shape, RawPolicy::Nondescendants);
        let q = query(&m, t, e);
        let pruned = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
        let all = Type1Options { prune: false, ..Type1Options::default() };
        let unpruned = type1_bounds::<Rational>(&m, &q, &all).unwrap();
        prop_assert_eq!((pruned.lower, pruned.upper), (unpruned.lower, unpruned.upper));
        prop_assert!(pruned.stats.combinations <= unpruned.stats.combinations);
    }

    #[test]
    fn precise_networks_collapse(seed in any::<u64>(), t in 0usize..3, e in 0usize..3) {
        let m = small_network(seed, 0.0);
        let q = query(&m, t, e);
        let p = bn_posterior(&m, &PointSelection::precise(&m).unwrap(), &q).unwrap();
        let t1 = type1_bounds::<Rational>(&m, &q, &Type1Options::default()).unwrap();
        let nd = natural_bounds::<Rational>(&m, &q, &IrrelevancePolicy::Nondescendants, true).unwrap();
        prop_assert_eq!((&t1.lower, &t1.upper), (&p, &p));
        prop_assert_eq!((&nd.lower, &nd.upper), (&p, &p));
    }

    #[test]
    fn fractional_solver_matches_vertices(seed in any::<u64>(), dim in 2usize..6, rows in 1usize..5) {
        let fp = random_fractional(&mut rng(seed), dim, rows);
        let lo = solve_fractional(&fp, Sense::Min).unwrap();
        let hi = solve_fractional(&fp, Sense::Max).unwrap();
        let v = vertex_ratio_extrema(&fp).unwrap();
        prop_assert_eq!((lo.value, hi.value), (v.lower, v.upper));
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn dsep_is_symmetric_and_matches_paths(seed in any::<u64>(), n in 2usize..7, mask in any::<u32>()) {
        let dag = random_dag(&mut rng(seed), n, 0.4);
        let given: Vec<usize> = (2..n).filter(|i| mask >> i & 1 == 1).collect();
        let ab = dag.d_separated(&[0], &[1], &given).unwrap();
        prop_assert_eq!(ab, dag.d_separated(&[1], &[0], &given).unwrap());
        prop_assert_eq!(ab, dsep_bruteforce(&dag, &[0], &[1], &given).unwrap());
    }
}
