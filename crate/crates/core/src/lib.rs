//! Finite categorical probability: stochastic matrices, the category of
//! finite probability spaces equipped with hypotheses (FinStat), relative
//! entropy as a functor into [0, ∞], the convex operad, and a seeded
//! property harness for the laws that characterize relative entropy.

pub mod entropy;
pub mod error;
pub mod extended;
pub mod harness;
pub mod morphism;
pub mod operad;
pub mod pipeline;
pub mod stochastic;

pub use entropy::{
    functor_g, functor_g_prime, re_functor, relative_entropy, EntropyFunctor, GIBBS_TOL,
};
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use harness::{
    builtin_families, check_cauchy_equation, check_convex_linearity, check_duplication_square,
    check_fp_vanishing, check_functoriality, check_lower_semicontinuity, default_t_sequence,
    find_distinguisher, gen_morphism, gen_object, run_standard_suite, two_point_identity_deviation,
    two_point_value, unit_bang_value, GenConfig, LawReport, MorphismFamily, SquareReport,
    Violation, SEMI_TOL,
};
pub use morphism::{
    bang_morphism, compose_morphisms, convex_combine_morphisms, optimal_hypothesis,
    reduce_to_bang, FinStatMorphism, FinStatObject, ZeroFiberPolicy, MORPH_TOL,
};
pub use operad::{
    check_algebra_axioms, operad_compose, star, theta_pushforward, AlgebraAxiomReport,
    ConvexAlgebra, EuclideanAlgebra, ExtendedRealAlgebra, OperadOperation,
};
pub use pipeline::{EntropyReport, Pipeline, PipelineOptions};
pub use stochastic::{
    convex_combine_dists, pushforward, pushforward_fn, FiniteFunction, FiniteSet, ProbDist,
    StochasticMatrix, NORM_TOL, SUPPORT_EPS,
};
