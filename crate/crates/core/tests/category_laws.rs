//! Category-level laws: associativity and identities for stochastic
//! matrices and FinStat morphisms, functoriality of the deterministic
//! embedding, closure of the optimal subcategory under composition, and
//! uniqueness of the Bayesian inverse.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use finstat::{
    compose_morphisms, convex_combine_dists, convex_combine_morphisms, gen_morphism,
    optimal_hypothesis, pushforward, pushforward_fn, FinStatMorphism, FinStatObject,
    FiniteFunction, FiniteSet, GenConfig, ProbDist, StochasticMatrix, ZeroFiberPolicy,
};

fn random_matrix(rng: &mut ChaCha8Rng, domain: FiniteSet, codomain: FiniteSet) -> StochasticMatrix {
    let rows = codomain.len();
    let cols = domain.len();
    let mut entries = vec![vec![0.0; cols]; rows];
    for col in 0..cols {
        let raw: Vec<f64> = (0..rows).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        for (row, entry) in entries.iter_mut().enumerate() {
            entry[col] = raw[row] / sum;
        }
    }
    StochasticMatrix::new(domain, codomain, entries).unwrap()
}

fn random_dist(rng: &mut ChaCha8Rng, space: FiniteSet) -> ProbDist {
    let raw: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    ProbDist::new(space, raw.iter().map(|w| w / sum).collect()).unwrap()
}

#[test]
fn matrix_composition_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut max = 0.0f64;
    for _ in 0..1000 {
        let sizes: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=6)).collect();
        let sets: Vec<FiniteSet> = sizes
            .iter()
            .map(|&n| FiniteSet::indexed(n).unwrap())
            .collect();
        let f = random_matrix(&mut rng, sets[0].clone(), sets[1].clone());
        let g = random_matrix(&mut rng, sets[1].clone(), sets[2].clone());
        let h = random_matrix(&mut rng, sets[2].clone(), sets[3].clone());
        let left = StochasticMatrix::compose(&h, &StochasticMatrix::compose(&g, &f).unwrap())
            .unwrap();
        let right = StochasticMatrix::compose(&StochasticMatrix::compose(&h, &g).unwrap(), &f)
            .unwrap();
        max = max.max(left.max_abs_diff(&right).unwrap());
    }
    assert!(max <= 1e-9, "associativity defect {max:e}");
}

#[test]
fn matrix_identity_laws_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = FiniteSet::indexed(4).unwrap();
    let b = FiniteSet::indexed(3).unwrap();
    let k = random_matrix(&mut rng, a.clone(), b.clone());
    let left = StochasticMatrix::compose(&StochasticMatrix::identity(b), &k).unwrap();
    let right = StochasticMatrix::compose(&k, &StochasticMatrix::identity(a)).unwrap();
    assert_eq!(left.entries(), k.entries());
    assert_eq!(right.entries(), k.entries());
}

#[test]
fn deterministic_embedding_is_functorial() {
    // δ(g ∘ f) = δ(g) ∘ δ(f), exhaustively over functions on sets of size <= 4
    for n in 1..=4usize {
        for m in 1..=3usize {
            for k in 1..=3usize {
                let x = FiniteSet::indexed(n).unwrap();
                let y = FiniteSet::indexed(m).unwrap();
                let z = FiniteSet::indexed(k).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64((n * 100 + m * 10 + k) as u64);
                for _ in 0..10 {
                    let f = FiniteFunction::from_indices(
                        x.clone(),
                        y.clone(),
                        (0..n).map(|_| rng.gen_range(0..m)).collect(),
                    )
                    .unwrap();
                    let g = FiniteFunction::from_indices(
                        y.clone(),
                        z.clone(),
                        (0..m).map(|_| rng.gen_range(0..k)).collect(),
                    )
                    .unwrap();
                    let gf = FiniteFunction::compose(&g, &f).unwrap();
                    let composed = StochasticMatrix::compose(
                        &StochasticMatrix::from_function(&g),
                        &StochasticMatrix::from_function(&f),
                    )
                    .unwrap();
                    assert_eq!(
                        StochasticMatrix::from_function(&gf).entries(),
                        composed.entries()
                    );
                }
            }
        }
    }
}

#[test]
fn dist_as_column_matches_pushforward() {
    // treating q as a matrix out of the singleton and composing agrees
    // with the direct pushforward
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=6);
        let x = FiniteSet::indexed(n).unwrap();
        let y = FiniteSet::indexed(m).unwrap();
        let q = random_dist(&mut rng, x.clone());
        let k = random_matrix(&mut rng, x, y);
        let via_compose =
            StochasticMatrix::compose(&k, &StochasticMatrix::from_dist(&q)).unwrap();
        let direct = pushforward(&k, &q).unwrap();
        for (i, &w) in direct.weights().iter().enumerate() {
            assert!((via_compose.entry(i, 0) - w).abs() <= 1e-12);
        }
    }
}

#[test]
fn finstat_composition_is_associative_and_unital() {
    let mut max = 0.0f64;
    for seed in 0..500u64 {
        let cfg = GenConfig {
            seed,
            ..GenConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(2..=5);
        let b = rng.gen_range(1..=a);
        let c = rng.gen_range(1..=b);
        let m1 = gen_morphism(&cfg, a, b);
        // extend the chain with optimal stages so all objects line up
        let f2 = FiniteFunction::from_indices(
            m1.codomain().space().clone(),
            FiniteSet::indexed(c).unwrap(),
            (0..b).map(|i| if i < c { i } else { rng.gen_range(0..c) }).collect(),
        )
        .unwrap();
        let m2 =
            optimal_hypothesis(&f2, m1.codomain().dist(), &ZeroFiberPolicy::Uniform).unwrap();
        let f3 = FiniteFunction::bang(m2.codomain().space().clone());
        let m3 =
            optimal_hypothesis(&f3, m2.codomain().dist(), &ZeroFiberPolicy::Uniform).unwrap();

        let left =
            compose_morphisms(&m3, &compose_morphisms(&m2, &m1).unwrap()).unwrap();
        let right =
            compose_morphisms(&compose_morphisms(&m3, &m2).unwrap(), &m1).unwrap();
        max = max.max(left.max_abs_diff(&right).unwrap());

        let id_dom = FinStatMorphism::identity(m1.domain().clone());
        let id_cod = FinStatMorphism::identity(m1.codomain().clone());
        let left_unit = compose_morphisms(&id_cod, &m1).unwrap();
        let right_unit = compose_morphisms(&m1, &id_dom).unwrap();
        assert_eq!(left_unit, m1);
        assert_eq!(right_unit, m1);
    }
    assert!(max <= 1e-9, "associativity defect {max:e}");
}

#[test]
fn optimality_is_preserved_by_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=m);
        let x = FiniteSet::indexed(n).unwrap();
        let q = random_dist(&mut rng, x.clone());
        let f = FiniteFunction::from_indices(
            x,
            FiniteSet::indexed(m).unwrap(),
            (0..n).map(|i| if i < m { i } else { rng.gen_range(0..m) }).collect(),
        )
        .unwrap();
        let m1 = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform).unwrap();
        let g = FiniteFunction::from_indices(
            m1.codomain().space().clone(),
            FiniteSet::indexed(k).unwrap(),
            (0..m).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect(),
        )
        .unwrap();
        let m2 =
            optimal_hypothesis(&g, m1.codomain().dist(), &ZeroFiberPolicy::Uniform).unwrap();
        let composite = compose_morphisms(&m2, &m1).unwrap();
        assert!(composite.is_optimal(1e-8));
    }
}

#[test]
fn bayesian_inverse_is_unique_on_supported_fibers() {
    // any valid optimal section agrees with optimal_hypothesis wherever
    // the codomain weight is positive: s_xy = q_x / r_y is forced
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=n);
        let x = FiniteSet::indexed(n).unwrap();
        let q = random_dist(&mut rng, x.clone());
        let f = FiniteFunction::from_indices(
            x,
            FiniteSet::indexed(m).unwrap(),
            (0..n).map(|i| if i < m { i } else { rng.gen_range(0..m) }).collect(),
        )
        .unwrap();
        let morphism = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform).unwrap();
        let r = morphism.codomain().dist();
        for y in 0..m {
            if r.weight(y) <= 0.0 {
                continue;
            }
            for &xi in &f.fiber(y) {
                let forced = q.weight(xi) / r.weight(y);
                assert!((morphism.section().entry(xi, y) - forced).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn prior_equals_section_pushforward() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for seed in 0..100u64 {
        let cfg = GenConfig {
            seed,
            ..GenConfig::default()
        };
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=n);
        let morphism = gen_morphism(&cfg, n, m);
        let via_matrix =
            pushforward(morphism.section(), morphism.codomain().dist()).unwrap();
        let prior = morphism.prior();
        assert!(prior.max_abs_diff(&via_matrix).unwrap() <= 1e-12);
    }
}

#[test]
fn convex_combination_commutes_with_composition() {
    // (m2 ⊕ n2) ∘ (m1 ⊕ n1) = (m2 ∘ m1) ⊕ (n2 ∘ n1)
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..100u64 {
        let lambda = rng.gen_range(0.0..=1.0);
        let chain = |seed: u64, rng: &mut ChaCha8Rng| {
            let cfg = GenConfig {
                seed,
                ..GenConfig::default()
            };
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(1..=n);
            let m1 = gen_morphism(&cfg, n, m);
            let f = FiniteFunction::bang(m1.codomain().space().clone());
            let m2 = optimal_hypothesis(&f, m1.codomain().dist(), &ZeroFiberPolicy::Uniform)
                .unwrap();
            (m1, m2)
        };
        let (m1, m2) = chain(2 * seed, &mut rng);
        let (n1, n2) = chain(2 * seed + 1, &mut rng);

        let stagewise = compose_morphisms(
            &convex_combine_morphisms(lambda, &m2, &n2).unwrap(),
            &convex_combine_morphisms(lambda, &m1, &n1).unwrap(),
        )
        .unwrap();
        let composed = convex_combine_morphisms(
            lambda,
            &compose_morphisms(&m2, &m1).unwrap(),
            &compose_morphisms(&n2, &n1).unwrap(),
        )
        .unwrap();
        assert!(stagewise.max_abs_diff(&composed).unwrap() <= 1e-9);
    }
}

proptest! {
    #[test]
    fn pushforward_conserves_mass(raw in prop::collection::vec(0.01f64..1.0, 1..6), rows in 1usize..5) {
        let n = raw.len();
        let sum: f64 = raw.iter().sum();
        let x = FiniteSet::indexed(n).unwrap();
        let y = FiniteSet::indexed(rows).unwrap();
        let q = ProbDist::new(x.clone(), raw.iter().map(|w| w / sum).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 31 + rows as u64);
        let k = random_matrix(&mut rng, x, y);
        let pushed = pushforward(&k, &q).unwrap();
        let total: f64 = pushed.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn convex_combination_weights(lambda in 0.0f64..=1.0, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let p = ProbDist::two_point(a.min(1.0)).unwrap();
        let q = ProbDist::two_point(b.min(1.0)).unwrap();
        let combined = convex_combine_dists(lambda, &p, &q).unwrap();
        // left block carries λ of the mass, right block 1-λ
        let left: f64 = combined.weights()[..2].iter().sum();
        prop_assert!((left - lambda).abs() <= 1e-12);
        let total: f64 = combined.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn two_point_round_trip(alpha in 0.0f64..=1.0) {
        let p = ProbDist::two_point(alpha).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: ProbDist = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn pushforward_fn_matches_matrix_pushforward() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=n);
        let x = FiniteSet::indexed(n).unwrap();
        let y = FiniteSet::indexed(m).unwrap();
        let q = random_dist(&mut rng, x.clone());
        let f = FiniteFunction::from_indices(
            x,
            y,
            (0..n).map(|_| rng.gen_range(0..m)).collect(),
        )
        .unwrap();
        let by_fibers = pushforward_fn(&f, &q).unwrap();
        let by_matrix = pushforward(&StochasticMatrix::from_function(&f), &q).unwrap();
        assert!(by_fibers.max_abs_diff(&by_matrix).unwrap() <= 1e-12);
    }
}

#[test]
fn morphism_json_round_trip() {
    let cfg = GenConfig {
        seed: 99,
        ..GenConfig::default()
    };
    let m = gen_morphism(&cfg, 5, 3);
    let text = serde_json::to_string_pretty(&m).unwrap();
    let back: FinStatMorphism = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);

    // deserialization re-validates: corrupt the section and expect failure
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["s"]["entries"][0][0] = serde_json::json!(0.9);
    assert!(serde_json::from_value::<FinStatMorphism>(value).is_err());
}

#[test]
fn zero_fiber_policies_fill_unsupported_fibers() {
    let x = FiniteSet::new(["a", "b", "c"]).unwrap();
    let y = FiniteSet::new(["u", "v"]).unwrap();
    // all mass maps to u, so the fiber over v has zero mass
    let q = ProbDist::new(x.clone(), vec![0.6, 0.4, 0.0]).unwrap();
    let f =
        FiniteFunction::new(x, y, [("a", "u"), ("b", "u"), ("c", "v")]).unwrap();

    let uniform = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform).unwrap();
    assert!((uniform.section().entry(2, 1) - 1.0).abs() <= 1e-15);

    let point =
        optimal_hypothesis(&f, &q, &ZeroFiberPolicy::PointMass("c".to_string())).unwrap();
    assert_eq!(point.section().entry(2, 1), 1.0);

    let err = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::PointMass("a".to_string()));
    assert!(err.is_err(), "point mass outside the fiber must be rejected");
}

#[test]
fn reduce_preserves_object_shapes() {
    let object = FinStatObject::new(ProbDist::two_point(0.3).unwrap());
    let id = FinStatMorphism::identity(object);
    let reduced = finstat::reduce_to_bang(&id).unwrap();
    assert_eq!(reduced.codomain().space().len(), 1);
    assert_eq!(reduced.domain(), id.domain());
}
