//! Property tests over randomly generated shapes and elements.

use proptest::prelude::*;

use garlands::calculus::SignRuleId;
use garlands::shape::shapes_equal;
use garlands::textio::{has_freshness, parse_element, print_element};
use garlands::{Algebra, AlgebraParams, BaseGenerator, GarlandShape, Mark, PointRef, Ring};

fn arb_shape() -> impl Strategy<Value = GarlandShape> {
    (0usize..=3).prop_flat_map(|copies| {
        let mark = (
            1u32..=3,
            proptest::collection::vec((0usize..copies.max(1), 0u32..3), 0..=3),
        )
            .prop_map(move |(g, pts)| {
                let points = if copies == 0 {
                    Vec::new()
                } else {
                    pts.into_iter().map(|(c, l)| PointRef::new(c, l)).collect()
                };
                Mark::new(g, points).unwrap()
            });
        proptest::collection::vec(mark, 0..=3)
            .prop_map(move |marks| GarlandShape::new(copies, marks).unwrap())
    })
}

fn arb_generator(name: &'static str) -> impl Strategy<Value = BaseGenerator> {
    (arb_shape(), -2i64..=6)
        .prop_map(move |(shape, degree)| BaseGenerator::new(name, degree, shape))
}

fn z_params() -> AlgebraParams {
    AlgebraParams::new(2, 1, false, Ring::Z, SignRuleId::Zero).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn canonicalize_idempotent_and_invariant(shape in arb_shape(), seed in 0u64..1000) {
        use rand::SeedableRng;
        let canon = shape.canonicalize();
        prop_assert_eq!(canon.clone(), canon.canonicalize());
        prop_assert_eq!(canon.signature(), shape.signature());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let scrambled = shape.scrambled(&mut rng);
        prop_assert_eq!(scrambled.canonicalize(), canon);
    }

    #[test]
    fn disjoint_union_commutative_associative(a in arb_shape(), b in arb_shape(), c in arb_shape()) {
        let (ab, _, _) = a.disjoint_union(&b);
        let (ba, _, _) = b.disjoint_union(&a);
        prop_assert!(shapes_equal(&ab, &ba));
        let (ab_c, _, _) = ab.disjoint_union(&c);
        let (bc, _, _) = b.disjoint_union(&c);
        let (a_bc, _, _) = a.disjoint_union(&bc);
        prop_assert!(shapes_equal(&ab_c, &a_bc));
        // Signature additivity.
        let sig = ab.signature();
        prop_assert_eq!(sig.copies, a.copies() + b.copies());
        prop_assert_eq!(sig.gradings.len(), a.marks().len() + b.marks().len());
    }

    #[test]
    fn degree_and_signature_bookkeeping(ga in arb_generator("a"), gb in arb_generator("b")) {
        let params = z_params();
        let alg = Algebra::new(params);
        let a = alg.generator(&ga);
        let b = alg.generator(&gb);
        for t in alg.product(&a, &b).unwrap().terms() {
            prop_assert_eq!(t.degree, ga.degree + gb.degree);
            let sig = t.shape.signature();
            prop_assert_eq!(sig.copies, ga.shape().copies() + gb.shape().copies());
            prop_assert_eq!(
                sig.gradings.len(),
                ga.shape().marks().len() + gb.shape().marks().len() - 1
            );
        }
        for t in alg.bracket(&a, &b).unwrap().terms() {
            prop_assert_eq!(t.degree, ga.degree + gb.degree + 2 * params.n);
            let sig = t.shape.signature();
            prop_assert_eq!(
                sig.gradings.len(),
                ga.shape().marks().len() + gb.shape().marks().len() + 1
            );
        }
        for t in alg.lift(&a).terms() {
            prop_assert_eq!(t.degree, ga.degree + params.n);
        }
        for t in alg.proj(&a).terms() {
            prop_assert_eq!(t.degree, ga.degree);
        }
    }

    #[test]
    fn mod2_commutativity_and_bilinearity(ga in arb_generator("a"), gb in arb_generator("b"), gc in arb_generator("c")) {
        let params = AlgebraParams::new(2, 1, false, Ring::Z2, SignRuleId::Zero).unwrap();
        let alg = Algebra::new(params);
        let a = alg.generator(&ga);
        let b = alg.generator(&gb);
        let c = alg.generator(&gc);
        prop_assert_eq!(alg.product(&a, &b).unwrap(), alg.product(&b, &a).unwrap());
        prop_assert_eq!(alg.bracket(&a, &b).unwrap(), alg.bracket(&b, &a).unwrap());
        let bc = alg.add(&b, &c).unwrap();
        prop_assert_eq!(
            alg.product(&a, &bc).unwrap(),
            alg.add(&alg.product(&a, &b).unwrap(), &alg.product(&a, &c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            alg.bracket(&a, &bc).unwrap(),
            alg.add(&alg.bracket(&a, &b).unwrap(), &alg.bracket(&a, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn prop42_exact_on_positive_copy_shapes(ga in arb_generator("a"), gb in arb_generator("b")) {
        prop_assume!(ga.shape().copies() >= 1 && gb.shape().copies() >= 1);
        for ring in [Ring::Z, Ring::Z2] {
            let alg = Algebra::new(AlgebraParams::new(3, 2, false, ring, SignRuleId::Zero).unwrap());
            let a = alg.generator(&ga);
            let b = alg.generator(&gb);
            let lhs = alg.proj(&alg.product(&alg.lift(&a), &alg.lift(&b)).unwrap());
            let rhs = alg.bracket(&a, &b).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn grammar_round_trip(ga in arb_generator("a"), gb in arb_generator("b"), coeff in -5i64..=5) {
        prop_assume!(coeff != 0);
        let params = z_params();
        let alg = Algebra::new(params);
        let e = alg.add(
            &alg.term(coeff, ga.degree, ga.shape(), vec!["a".into()]),
            &alg.generator(&gb),
        ).unwrap();
        prop_assume!(!has_freshness(&e));
        let text = print_element(&e);
        let back = parse_element(&text, &params).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(print_element(&back), text);
    }
}
