//! Property tests: invariants checked against the naive oracles in `support`.

mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aml::budget::Budget;
use aml::gowers::{
    cond_expect, dual_function, gowers_box_pow, gowers_norm_pow, gowers_norm_pow_subst, AbelianGroup, FiniteAlgebra,
    GridFunction,
};
use aml::limits::{banach_density, furstenberg_check};
use aml::parser::{parse_formula, print_formula};
use aml::random::{random_structure, FormulaGen, FormulaShape};
use aml::rational::Rational;
use aml::regularity::{
    density, energy, is_epsilon_regular, remove_copies, Graph, Hypergraph, Partition, RegularityMode, Verdict,
};
use aml::semantics::{extension, Valuation};
use aml::structures::MeasureSpace;

use support::{naive_banach, naive_box, naive_cyclic_density, naive_gowers, naive_irregular, naive_measure, random_graph, Env};

fn rational_value() -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(|d| (-d..=d).prop_map(move |p| Rational::new(p, d)))
}

fn group() -> impl Strategy<Value = AbelianGroup> {
    prop_oneof![
        (1usize..=5).prop_map(AbelianGroup::cyclic),
        Just(AbelianGroup::product(&[2, 2])),
    ]
}

fn set_in(n: usize) -> impl Strategy<Value = BTreeSet<usize>> {
    proptest::collection::btree_set(1..=n, 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_formulae_parse_back(seed in any::<u64>(), size in 1usize..=4, depth in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, size).unwrap();
        let shape = FormulaShape { depth, ..FormulaShape::default() };
        let mut gen = FormulaGen::new(m.signature(), shape);
        gen.reuse_names = seed % 2 == 0;
        let f = gen.formula(&mut rng, &["x".to_string()]);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, m.signature()).unwrap(), f);
    }

    #[test]
    fn extension_measure_matches_naive_sum(seed in any::<u64>(), size in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_structure(&mut rng, size).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        let mut gen = FormulaGen::new(m.signature(), FormulaShape::default());
        let f = gen.formula(&mut rng, &vars);
        let set = extension(&m, &f, &vars, &Valuation::new()).unwrap();
        prop_assert_eq!(set.measure(), naive_measure(&m, &f, &vars, &Env::new()));
    }

    #[test]
    fn norm_forms_agree(g in group(), raw in proptest::collection::vec(rational_value(), 5), k in 1usize..=3) {
        let n = g.order();
        let values = raw[..n].to_vec();
        let f = GridFunction::new(n, 1, values.clone()).unwrap();
        let b = Budget::default();
        let a = gowers_norm_pow(&g, &f, k, &b).unwrap();
        prop_assert_eq!(&a, &gowers_norm_pow_subst(&g, &f, k, &b).unwrap());
        prop_assert_eq!(&a, &naive_gowers(n, &|x, y| g.add(x, y), &values, k));
        prop_assert!(f.integral().pow(1 << k) <= a);
    }

    #[test]
    fn norm_power_is_monotone_in_k(g in group(), raw in proptest::collection::vec(rational_value(), 5)) {
        let n = g.order();
        let f = GridFunction::new(n, 1, raw[..n].to_vec()).unwrap();
        let b = Budget::default();
        // ‖g‖_{U^k} ≤ ‖g‖_{U^{k+1}}, compared as powers: p_k² ≤ p_{k+1}
        let p1 = gowers_norm_pow(&g, &f, 1, &b).unwrap();
        let p2 = gowers_norm_pow(&g, &f, 2, &b).unwrap();
        let p3 = gowers_norm_pow(&g, &f, 3, &b).unwrap();
        prop_assert!(p1.pow(2) <= p2);
        prop_assert!(p2.pow(2) <= p3);
    }

    #[test]
    fn box_power_matches_peeling_and_dual(
        n in 2usize..=3,
        k in 1usize..=2,
        raw in proptest::collection::vec(rational_value(), 9),
        wraw in proptest::collection::vec(0i64..=3, 3),
    ) {
        let values = raw[..n.pow(k as u32)].to_vec();
        let weights: Vec<Rational> = wraw[..n].iter().map(|&w| Rational::new(w, 3)).collect();
        let f = GridFunction::with_weights(k, values.clone(), weights.clone()).unwrap();
        let b = Budget::default();
        let p = gowers_box_pow(&f, &b).unwrap();
        prop_assert_eq!(&p, &naive_box(n, k, &values, &weights));
        prop_assert!(!p.is_negative());
        let d = dual_function(&f, &b).unwrap();
        prop_assert_eq!(f.inner(&d).unwrap(), p);
    }

    #[test]
    fn cond_expect_is_a_projection(
        n in 2usize..=3,
        raw in proptest::collection::vec(rational_value(), 9),
        mask in proptest::collection::vec(any::<bool>(), 9),
    ) {
        let space = MeasureSpace::counting(n).unwrap();
        let bits = mask[..n * n].to_vec();
        let set = aml::structures::DefinableSet::from_fn(&space, 2, |t| bits[t[0] * n + t[1]]);
        let alg = FiniteAlgebra::generated(&space, 2, &[(set, None)]).unwrap();
        let f = GridFunction::new(n, 2, raw[..n * n].to_vec()).unwrap();
        let e = cond_expect(&f, &alg).unwrap();
        let twice = cond_expect(&e, &alg).unwrap();
        prop_assert_eq!(twice.values(), e.values());
        prop_assert_eq!(e.integral(), f.integral());
    }

    #[test]
    fn density_is_symmetric(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.5);
        let u: Vec<usize> = (0..n / 2).collect();
        let u2: Vec<usize> = (n / 2..n).collect();
        prop_assert_eq!(density(&g, &u, &u2).unwrap(), density(&g, &u2, &u).unwrap());
    }

    #[test]
    fn exact_check_matches_brute_force(seed in any::<u64>(), a in 1usize..=5, b in 1usize..=5, e in 2i64..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, a + b, 0.5);
        let u: Vec<usize> = (0..a).collect();
        let u2: Vec<usize> = (a..a + b).collect();
        let eps = Rational::new(1, e);
        let v = is_epsilon_regular(&g, &u, &u2, &eps, RegularityMode::Exact, &Budget::default()).unwrap();
        prop_assert_eq!(matches!(v, Verdict::Irregular(_)), naive_irregular(&g, &u, &u2, &eps));
        if let Verdict::Irregular(w) = &v {
            prop_assert!(w.validate(&g, &u, &u2, &eps));
        }
    }

    #[test]
    fn refinement_does_not_lower_energy(seed in any::<u64>(), n in 4usize..=12, k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.5);
        let p = Partition::blocks(n, k.min(n));
        let cut: Vec<usize> = (0..n).filter(|v| (seed >> v) & 1 == 1).collect();
        let finer = p.refine(&[cut]);
        prop_assert!(energy(&g, &finer) >= energy(&g, &p.parts));
    }

    #[test]
    fn removal_leaves_no_triangles(seed in any::<u64>(), n in 3usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.6);
        let host = Hypergraph::from_graph(&g).unwrap();
        let (after, report) = remove_copies(&Hypergraph::triangle(), &host, &Rational::new(1, 4), &Budget::default()).unwrap();
        prop_assert_eq!(report.copies_after, 0);
        let kept: BTreeSet<(usize, usize)> = after.edges().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
        prop_assert!(!support::has_triangle(n, &kept));
    }

    #[test]
    fn banach_density_matches_scan(n in 1usize..=30, l in 1usize..=8, seed in any::<u64>()) {
        let set: BTreeSet<usize> = (1..=n).filter(|x| (seed >> (x % 64)) & 1 == 1).collect();
        let d = banach_density(&set, n, l).unwrap();
        prop_assert_eq!(&d, &naive_banach(&set, n, l));
        // longer minimum windows can only lower the maximum
        prop_assert!(banach_density(&set, n, l + 1).unwrap() <= d);
    }

    #[test]
    fn furstenberg_within_bound(n in 1usize..=60, set in set_in(60), shifts in proptest::collection::btree_set(0usize..=10, 1..=4)) {
        let set: BTreeSet<usize> = set.into_iter().filter(|&x| x <= n).collect();
        let shifts: BTreeSet<usize> = shifts.into_iter().filter(|&s| s < n).collect();
        prop_assume!(!shifts.is_empty());
        let r = furstenberg_check(&set, n, &shifts, &Budget::default()).unwrap();
        prop_assert_eq!(&r.cyclic, &naive_cyclic_density(&set, n, &shifts));
        prop_assert!(r.holds());
    }
}

#[test]
fn complete_graph_is_regular_everywhere() {
    let g = Graph::complete(8);
    let u: Vec<usize> = (0..4).collect();
    let u2: Vec<usize> = (4..8).collect();
    let v = is_epsilon_regular(&g, &u, &u2, &Rational::new(1, 4), RegularityMode::Exact, &Budget::default()).unwrap();
    assert_eq!(v, Verdict::Regular);
}
