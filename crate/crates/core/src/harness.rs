//! Seeded random generators for FinStat objects and morphisms, and
//! executable checks of the laws that characterize relative entropy:
//! functoriality (the chain rule), convex linearity, vanishing on FP,
//! lower semicontinuity along parametrized families, and the commutative
//! squares that pin the value of any lawful functor down to `-c ln α`.
//!
//! All checks run against any [`EntropyFunctor`] and report deviations in
//! an ∞-aware way: two infinite sides are at distance 0, a finite and an
//! infinite side at distance ∞.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy::EntropyFunctor;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::morphism::{
    bang_morphism, compose_morphisms, convex_combine_morphisms, optimal_hypothesis,
    FinStatMorphism, FinStatObject, ZeroFiberPolicy,
};
use crate::stochastic::{
    convex_combine_dists, FiniteFunction, FiniteSet, ProbDist, StochasticMatrix, SUPPORT_EPS,
};

/// Tolerance for semicontinuity checks along sampled families.
pub const SEMI_TOL: f64 = 1e-7;

/// Configuration for the random generators. Identical configurations
/// produce byte-identical reports: each trial derives its own sub-seed
/// from `(seed, trial index)`, so parallel and serial runs agree.
#[derive(Debug, Clone, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_space_size: usize,
    pub trials: usize,
    /// Probability of planting an exact-zero weight while sampling.
    pub zero_mass_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            max_space_size: 6,
            trials: 1000,
            zero_mass_rate: 0.1,
        }
    }
}

impl GenConfig {
    fn rng_for_trial(&self, trial: u64) -> ChaCha8Rng {
        // splitmix-style mixing keeps per-trial streams independent
        let mut z = self
            .seed
            .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
    }
}

/// Uniform sample from the simplex (normalized exponentials), with exact
/// zeros planted at `zero_mass_rate` and the rest renormalized.
fn sample_weights<R: Rng>(rng: &mut R, size: usize, zero_mass_rate: f64) -> Vec<f64> {
    let mut weights: Vec<f64> = (0..size)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            -u.ln()
        })
        .collect();
    for w in weights.iter_mut() {
        if rng.gen_bool(zero_mass_rate) {
            *w = 0.0;
        }
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        let idx = rng.gen_range(0..size);
        weights[idx] = 1.0;
    } else {
        for w in weights.iter_mut() {
            *w /= sum;
        }
    }
    weights
}

fn sample_dist<R: Rng>(rng: &mut R, space: FiniteSet, zero_mass_rate: f64) -> ProbDist {
    let weights = sample_weights(rng, space.len(), zero_mass_rate);
    ProbDist::with_tolerance(space, weights, 1e-12)
        .expect("renormalized weights form a distribution")
}

/// Uniform surjection via rejection from random functions, capped at
/// 10 000 draws, then a constructive fill (each codomain point seeded with
/// one domain point).
fn sample_surjection<R: Rng>(
    rng: &mut R,
    domain: FiniteSet,
    codomain: FiniteSet,
) -> FiniteFunction {
    let n = domain.len();
    let m = codomain.len();
    assert!(m <= n, "no surjection from {n} onto {m} points");
    for _ in 0..10_000 {
        let images: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let mut hit = vec![false; m];
        for &i in &images {
            hit[i] = true;
        }
        if hit.into_iter().all(|h| h) {
            return FiniteFunction::from_indices(domain, codomain, images)
                .expect("sampled indices are in range");
        }
    }
    let mut images: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let mut positions: Vec<usize> = (0..n).collect();
    for j in 0..m {
        let k = rng.gen_range(0..positions.len());
        images[positions.swap_remove(k)] = j;
    }
    FiniteFunction::from_indices(domain, codomain, images).expect("constructive fill is total")
}

fn sample_section<R: Rng>(
    rng: &mut R,
    f: &FiniteFunction,
    zero_mass_rate: f64,
) -> StochasticMatrix {
    let n = f.domain().len();
    let m = f.codomain().len();
    let mut entries = vec![vec![0.0; m]; n];
    #[allow(clippy::needless_range_loop)] // rows are indexed by fiber element
    for y in 0..m {
        let fiber = f.fiber(y);
        let column = sample_weights(rng, fiber.len(), zero_mass_rate);
        for (&x, w) in fiber.iter().zip(column) {
            entries[x][y] = w;
        }
    }
    StochasticMatrix::with_tolerance(f.codomain().clone(), f.domain().clone(), entries, 1e-12)
        .expect("fiberwise distributions form a section matrix")
}

fn space_with(prefix: &str, size: usize) -> FiniteSet {
    FiniteSet::new((0..size).map(|i| format!("{prefix}{i}"))).expect("size >= 1")
}

/// Generates a reproducible random object of the given size.
pub fn gen_object(cfg: &GenConfig, size: usize) -> FinStatObject {
    let mut rng = cfg.rng_for_trial(0);
    gen_object_rng(&mut rng, cfg, size)
}

fn gen_object_rng<R: Rng>(rng: &mut R, cfg: &GenConfig, size: usize) -> FinStatObject {
    FinStatObject::new(sample_dist(rng, space_with("x", size), cfg.zero_mass_rate))
}

/// Generates a reproducible random morphism: a random surjection, a random
/// fiber-supported section, a random domain distribution, and the exact
/// pushforward as codomain.
pub fn gen_morphism(cfg: &GenConfig, dom_size: usize, cod_size: usize) -> FinStatMorphism {
    let mut rng = cfg.rng_for_trial(0);
    gen_morphism_rng(&mut rng, cfg, dom_size, cod_size, "x", "y")
}

fn gen_morphism_rng<R: Rng>(
    rng: &mut R,
    cfg: &GenConfig,
    dom_size: usize,
    cod_size: usize,
    dom_prefix: &str,
    cod_prefix: &str,
) -> FinStatMorphism {
    let domain = gen_object_rng(rng, cfg, dom_size);
    let dom = FinStatObject::new(ProbDist::with_tolerance(
        space_with(dom_prefix, dom_size),
        domain.dist().weights().to_vec(),
        1e-12,
    )
    .unwrap());
    gen_morphism_from_rng(rng, cfg, &dom, cod_size, cod_prefix)
}

/// Extends a fixed source object by a random morphism out of it.
fn gen_morphism_from_rng<R: Rng>(
    rng: &mut R,
    cfg: &GenConfig,
    domain: &FinStatObject,
    cod_size: usize,
    cod_prefix: &str,
) -> FinStatMorphism {
    let codomain_space = space_with(cod_prefix, cod_size);
    let f = sample_surjection(rng, domain.space().clone(), codomain_space);
    let s = sample_section(rng, &f, cfg.zero_mass_rate);
    let r = crate::stochastic::pushforward_fn(&f, domain.dist())
        .expect("distribution lives on the function's domain");
    FinStatMorphism::new(domain.clone(), FinStatObject::new(r), f, s)
        .expect("generated data satisfies the morphism laws")
}

/// One recorded law violation.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub deviation: ExtendedReal,
    pub witness: serde_json::Value,
}

/// Outcome of running one law over many trials.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_deviation: ExtendedReal,
    /// Total number of violating trials; at most 16 carry witnesses.
    pub violations_total: usize,
    pub violations: Vec<Violation>,
}

impl LawReport {
    fn new(law: &str, tolerance: f64) -> Self {
        LawReport {
            law: law.to_string(),
            trials: 0,
            tolerance,
            max_deviation: ExtendedReal::ZERO,
            violations_total: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, trial: usize, deviation: ExtendedReal, witness: impl Serialize) {
        self.trials += 1;
        self.max_deviation = self.max_deviation.max(deviation);
        if !deviation.within(self.tolerance) {
            self.violations_total += 1;
            if self.violations.len() < 16 {
                self.violations.push(Violation {
                    trial,
                    deviation,
                    witness: serde_json::to_value(witness).expect("witness serializes"),
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations_total == 0 && self.max_deviation.within(self.tolerance)
    }
}

fn scale(lambda: f64, v: ExtendedReal) -> ExtendedReal {
    ExtendedReal::finite(lambda) * v
}

/// Chain rule: `F(m2 ∘ m1) = F(m1) + F(m2)`, both-∞ agreement included.
pub fn check_functoriality(functor: &EntropyFunctor, cfg: &GenConfig) -> LawReport {
    let mut report = LawReport::new("functoriality", 1e-8);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng_for_trial(trial as u64);
        let dom = rng.gen_range(2..=cfg.max_space_size.max(2));
        let mid = rng.gen_range(1..=dom);
        let cod = rng.gen_range(1..=mid);
        let m1 = gen_morphism_rng(&mut rng, cfg, dom, mid, "x", "y");
        let m2 = gen_morphism_from_rng(&mut rng, cfg, m1.codomain(), cod, "z");
        let composite = compose_morphisms(&m2, &m1).expect("objects match by construction");
        let lhs = functor.evaluate(&composite);
        let rhs = functor.evaluate(&m1) + functor.evaluate(&m2);
        report.record(trial, lhs.deviation(rhs), (&m1, &m2));
    }
    report
}

/// Convex linearity: `F(λ·m ⊕ (1-λ)·n) = λ·F(m) + (1-λ)·F(n)` with the
/// `0 · ∞ = 0` scalar rule.
pub fn check_convex_linearity(functor: &EntropyFunctor, cfg: &GenConfig) -> LawReport {
    let mut report = LawReport::new("convex-linearity", 1e-8);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng_for_trial(trial as u64);
        let lambda = if rng.gen_bool(0.1) {
            // exercise the endpoints, where one side drops out entirely
            if rng.gen_bool(0.5) {
                0.0
            } else {
                1.0
            }
        } else {
            rng.gen_range(0.0..=1.0)
        };
        let d1 = rng.gen_range(1..=cfg.max_space_size);
        let c1 = rng.gen_range(1..=d1);
        let d2 = rng.gen_range(1..=cfg.max_space_size);
        let c2 = rng.gen_range(1..=d2);
        let m = gen_morphism_rng(&mut rng, cfg, d1, c1, "x", "y");
        let n = gen_morphism_rng(&mut rng, cfg, d2, c2, "u", "v");
        let combined =
            convex_combine_morphisms(lambda, &m, &n).expect("lambda sampled in [0, 1]");
        let lhs = functor.evaluate(&combined);
        let rhs = scale(lambda, functor.evaluate(&m)) + scale(1.0 - lambda, functor.evaluate(&n));
        report.record(trial, lhs.deviation(rhs), (lambda, &m, &n));
    }
    report
}

/// Vanishing on FP: `F` is zero on morphisms built with the optimal
/// hypothesis.
pub fn check_fp_vanishing(functor: &EntropyFunctor, cfg: &GenConfig) -> LawReport {
    let mut report = LawReport::new("fp-vanishing", 1e-10);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng_for_trial(trial as u64);
        let dom = rng.gen_range(1..=cfg.max_space_size);
        let cod = rng.gen_range(1..=dom);
        let q = sample_dist(&mut rng, space_with("x", dom), cfg.zero_mass_rate);
        let f = sample_surjection(&mut rng, q.space().clone(), space_with("y", cod));
        let m = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform)
            .expect("sampled surjection admits an optimal hypothesis");
        let value = functor.evaluate(&m);
        report.record(trial, value.deviation(ExtendedReal::ZERO), &m);
    }
    report
}

/// A path `t ↦ m(t)` of morphisms with fixed spaces and fixed function;
/// `t = 0` is the limit point.
pub struct MorphismFamily {
    pub name: String,
    builder: Box<dyn Fn(f64) -> Result<FinStatMorphism> + Send + Sync>,
}

impl MorphismFamily {
    pub fn new(
        name: impl Into<String>,
        builder: impl Fn(f64) -> Result<FinStatMorphism> + Send + Sync + 'static,
    ) -> Self {
        MorphismFamily {
            name: name.into(),
            builder: Box::new(builder),
        }
    }

    pub fn at(&self, t: f64) -> Result<FinStatMorphism> {
        (self.builder)(t)
    }
}

/// The three families covering the case analysis of semicontinuity:
/// a diverging tail with infinite limit, the finite-limit jump-down case,
/// and a constant family.
pub fn builtin_families() -> Vec<MorphismFamily> {
    vec![
        MorphismFamily::new("diverging-hypothesis", |t| {
            let domain = FinStatObject::new(ProbDist::two_point(0.5)?);
            bang_morphism(&domain, &ProbDist::two_point(t)?)
        }),
        // the value is ∞ all along the path but drops to 0 at the limit
        MorphismFamily::new("jump-down", |t| {
            let domain = FinStatObject::new(ProbDist::two_point(t)?);
            bang_morphism(&domain, &ProbDist::two_point(0.0)?)
        }),
        MorphismFamily::new("constant", |_| {
            let domain = FinStatObject::new(ProbDist::two_point(0.3)?);
            bang_morphism(&domain, &ProbDist::two_point(0.3)?)
        }),
    ]
}

/// A decreasing parameter sequence approaching 0.
pub fn default_t_sequence() -> Vec<f64> {
    (1..=20).map(|k| 0.5f64.powi(k)).collect()
}

/// Lower semicontinuity along a family: `F(m(0)) ≤ liminf F(m(t_i))`.
///
/// With finitely many samples the liminf is estimated from the tail
/// (second half) of the sequence. A finite limit value is compared against
/// the tail minimum; an infinite limit value requires the tail to be
/// consistent with divergence, i.e. all ∞ or finite and nondecreasing.
pub fn check_lower_semicontinuity(
    functor: &EntropyFunctor,
    family: &MorphismFamily,
    t_sequence: &[f64],
) -> Result<LawReport> {
    let mut report = LawReport::new(&format!("semicontinuity/{}", family.name), SEMI_TOL);
    let limit = family.at(0.0)?;
    let mut values = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        let m = family.at(t)?;
        if m.domain().space() != limit.domain().space()
            || m.codomain().space() != limit.codomain().space()
            || m.forward() != limit.forward()
        {
            return Err(Error::FamilyShapeChanged(t));
        }
        values.push(functor.evaluate(&m));
    }

    let tail = &values[values.len() / 2..];
    let limit_value = functor.evaluate(&limit);
    let deviation = match limit_value {
        ExtendedReal::Finite(v) => {
            let tail_min = tail
                .iter()
                .copied()
                .fold(ExtendedReal::Infinity, |acc, x| if x < acc { x } else { acc });
            match tail_min {
                ExtendedReal::Infinity => ExtendedReal::ZERO,
                ExtendedReal::Finite(m) => ExtendedReal::finite((v - m).max(0.0)),
            }
        }
        ExtendedReal::Infinity => {
            // liminf must be ∞: accept an all-∞ tail or a finite tail that
            // keeps growing towards the limit
            let diverging = tail.windows(2).all(|w| match (w[0], w[1]) {
                (ExtendedReal::Infinity, ExtendedReal::Infinity) => true,
                (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b >= a - SEMI_TOL,
                (ExtendedReal::Finite(_), ExtendedReal::Infinity) => true,
                (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => false,
            });
            if diverging {
                ExtendedReal::ZERO
            } else {
                ExtendedReal::Infinity
            }
        }
    };
    report.record(0, deviation, (&family.name, t_sequence, &values));
    Ok(report)
}

/// The value `g(α) = F` of the bang morphism out of `(𝟐, (1, 0))` with
/// hypothesis `(α, 1-α)`.
pub fn unit_bang_value(functor: &EntropyFunctor, alpha: f64) -> Result<ExtendedReal> {
    let domain = FinStatObject::new(ProbDist::two_point(1.0)?);
    let m = bang_morphism(&domain, &ProbDist::two_point(alpha)?)?;
    Ok(functor.evaluate(&m))
}

fn two_point_set() -> FiniteSet {
    FiniteSet::indexed(2).unwrap()
}

/// Builds the commutative square on `(𝟑, (1, 0, 0))` that turns
/// functoriality and convex linearity into the multiplicative Cauchy
/// equation `g(αβ) = g(α) + g(β)`, and measures:
/// the entrywise commutation defect, the equation defect for `functor`,
/// and (for the relative-entropy functor) the defect of `g(α) = -ln α`.
pub fn check_cauchy_equation(
    functor: &EntropyFunctor,
    alphas: &[f64],
    betas: &[f64],
    tolerance: f64,
) -> LawReport {
    let mut report = LawReport::new("cauchy-equation", tolerance);
    let three = FiniteSet::indexed(3).unwrap();
    let two = two_point_set();
    let point = FinStatObject::new(
        ProbDist::with_tolerance(three.clone(), vec![1.0, 0.0, 0.0], 0.0).unwrap(),
    );
    let two_point_mass = FinStatObject::new(
        ProbDist::with_tolerance(two.clone(), vec![1.0, 0.0], 0.0).unwrap(),
    );

    let mut trial = 0;
    for &alpha in alphas {
        for &beta in betas {
            let gamma = if alpha * beta < 1.0 {
                alpha * (1.0 - beta) / (1.0 - alpha * beta)
            } else {
                0.0 // degenerate corner; any value closes the square
            };

            let top_f =
                FiniteFunction::from_indices(three.clone(), two.clone(), vec![0, 0, 1]).unwrap();
            let top_s = StochasticMatrix::new(
                two.clone(),
                three.clone(),
                vec![vec![beta, 0.0], vec![1.0 - beta, 0.0], vec![0.0, 1.0]],
            )
            .unwrap();
            let top = FinStatMorphism::new(
                point.clone(),
                two_point_mass.clone(),
                top_f,
                top_s,
            )
            .expect("top edge is a valid morphism");

            let left_f =
                FiniteFunction::from_indices(three.clone(), two.clone(), vec![0, 1, 1]).unwrap();
            let left_s = StochasticMatrix::new(
                two.clone(),
                three.clone(),
                vec![vec![1.0, 0.0], vec![0.0, gamma], vec![0.0, 1.0 - gamma]],
            )
            .unwrap();
            let left = FinStatMorphism::new(
                point.clone(),
                two_point_mass.clone(),
                left_f,
                left_s,
            )
            .expect("left edge is a valid morphism");

            let bottom = bang_morphism(
                &two_point_mass,
                &ProbDist::two_point(alpha * beta).unwrap(),
            )
            .unwrap();
            let right = bang_morphism(&two_point_mass, &ProbDist::two_point(alpha).unwrap())
                .unwrap();

            let via_left = compose_morphisms(&bottom, &left).unwrap();
            let via_top = compose_morphisms(&right, &top).unwrap();
            let commute = via_left.max_abs_diff(&via_top).unwrap();

            let g_ab = unit_bang_value(functor, alpha * beta).unwrap();
            let g_a = unit_bang_value(functor, alpha).unwrap();
            let g_b = unit_bang_value(functor, beta).unwrap();
            let equation = g_ab.deviation(g_a + g_b);

            let mut deviation = ExtendedReal::finite(commute).max(equation);
            if *functor == EntropyFunctor::Re {
                let log_defect = g_a.deviation(ExtendedReal::finite(-alpha.ln()));
                deviation = deviation.max(log_defect);
            }
            report.record(trial, deviation, (alpha, beta));
            trial += 1;
        }
    }
    report
}

/// Deviations measured on the duplication square `(X + X, p ⊕ 0)` that
/// expresses the relative entropy of a bang morphism through `g(α)`.
#[derive(Debug, Clone, Serialize)]
pub struct SquareReport {
    pub alpha: f64,
    /// Entrywise defect of the two composites around the square.
    pub commute_deviation: f64,
    /// `|RE(diagonal) - (-ln α)|`.
    pub diagonal_deviation: ExtendedReal,
    /// `|derived - Σ p_x ln(p_x / r_x)|` where the derived value is
    /// `-ln α - RE(top edge)`.
    pub value_deviation: ExtendedReal,
}

/// Builds the square with section entries `α p_x / r_x` on the diagonal
/// blocks and checks that the relative entropy of the bang morphism with
/// hypothesis `r` is recovered from it. Requires `r` of full support and
/// `0 < α < min_x r_x`.
pub fn check_duplication_square(p: &ProbDist, r: &ProbDist, alpha: f64) -> Result<SquareReport> {
    use crate::entropy::{re_functor, relative_entropy};

    if p.space() != r.space() {
        return Err(Error::SpaceMismatch);
    }
    let min_r = r.weights().iter().copied().fold(f64::INFINITY, f64::min);
    if min_r <= SUPPORT_EPS || !(alpha > 0.0 && alpha < min_r && alpha < 1.0) {
        return Err(Error::AlphaTooLarge { alpha, min: min_r });
    }

    let x = p.space().clone();
    let n = x.len();
    let double = x.disjoint_union(&x);
    let two = two_point_set();

    let doubled_dist = convex_combine_dists(1.0, p, p)?; // p ⊕ 0
    let doubled = FinStatObject::new(doubled_dist);

    // top: the fold map with section (α p_x/r_x, 1 - α p_x/r_x) per column
    let fold =
        FiniteFunction::from_indices(double.clone(), x.clone(), (0..n).chain(0..n).collect())?;
    let mut top_entries = vec![vec![0.0; n]; 2 * n];
    for i in 0..n {
        let ratio = alpha * p.weight(i) / r.weight(i);
        top_entries[i][i] = ratio;
        top_entries[n + i][i] = 1.0 - ratio;
    }
    let top_section = StochasticMatrix::new(x.clone(), double.clone(), top_entries)?;
    let top = FinStatMorphism::new(
        doubled.clone(),
        FinStatObject::new(p.clone()),
        fold,
        top_section,
    )?;

    // left: collapse each copy to one of two points; second column of the
    // section only matters for commutation
    let left_f = FiniteFunction::from_indices(
        double.clone(),
        two.clone(),
        std::iter::repeat_n(0, n).chain(std::iter::repeat_n(1, n)).collect(),
    )?;
    let mut left_entries = vec![vec![0.0; 2]; 2 * n];
    for i in 0..n {
        left_entries[i][0] = p.weight(i);
        left_entries[n + i][1] = (r.weight(i) - alpha * p.weight(i)) / (1.0 - alpha);
    }
    let left_section = StochasticMatrix::with_tolerance(two.clone(), double, left_entries, 1e-12)?;
    let two_point_mass =
        FinStatObject::new(ProbDist::with_tolerance(two, vec![1.0, 0.0], 0.0).unwrap());
    let left = FinStatMorphism::new(doubled, two_point_mass.clone(), left_f, left_section)?;

    let bottom = bang_morphism(&two_point_mass, &ProbDist::two_point(alpha)?)?;
    let right = bang_morphism(&FinStatObject::new(p.clone()), r)?;

    let via_left = compose_morphisms(&bottom, &left)?;
    let via_top = compose_morphisms(&right, &top)?;
    let commute_deviation = via_left.max_abs_diff(&via_top)?;

    let expected_diag = ExtendedReal::finite(-alpha.ln());
    let diagonal_deviation = re_functor(&via_left).deviation(expected_diag);

    // -ln α = RE(top) + RE(right edge), so the bang value is recoverable
    let top_value = re_functor(&top);
    let derived = match top_value {
        ExtendedReal::Finite(v) => ExtendedReal::finite((-alpha.ln() - v).max(0.0)),
        ExtendedReal::Infinity => ExtendedReal::Infinity,
    };
    let direct = relative_entropy(p, r)?;
    let value_deviation = derived.deviation(direct);

    Ok(SquareReport {
        alpha,
        commute_deviation,
        diagonal_deviation,
        value_deviation,
    })
}

/// `h(α, β)`: the value of `functor` on the bang morphism out of
/// `(𝟐, (α, 1-α))` with hypothesis `(β, 1-β)`.
pub fn two_point_value(
    functor: &EntropyFunctor,
    alpha: f64,
    beta: f64,
) -> Result<ExtendedReal> {
    let domain = FinStatObject::new(ProbDist::two_point(alpha)?);
    let m = bang_morphism(&domain, &ProbDist::two_point(beta)?)?;
    Ok(functor.evaluate(&m))
}

/// Defect of the recursion that ties `h(α, β)` to values at `β = 1/2`:
///
/// `h(α,β) = (α+β)·h(α/(α+β), 1/2) + (2-α-β)·h((1-α)/(2-α-β), 1/2)
///           + 2·h((α+β)/2, β)`
///
/// Requires `α ≠ β` (otherwise the coefficients degenerate).
pub fn two_point_identity_deviation(
    functor: &EntropyFunctor,
    alpha: f64,
    beta: f64,
) -> Result<ExtendedReal> {
    if alpha == beta {
        return Err(Error::DegenerateParameters);
    }
    let lhs = two_point_value(functor, alpha, beta)?;
    let h1 = two_point_value(functor, alpha / (alpha + beta), 0.5)?;
    let h2 = two_point_value(functor, (1.0 - alpha) / (2.0 - alpha - beta), 0.5)?;
    let h3 = two_point_value(functor, (alpha + beta) / 2.0, beta)?;
    let rhs = scale(alpha + beta, h1) + scale(2.0 - alpha - beta, h2) + scale(2.0, h3);
    Ok(lhs.deviation(rhs))
}

/// How a single pair of observed values `(F1(m), F2(m))` constrains a
/// scalar `c` with `F1 = c · F2` under extended-real multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ScaleFit {
    Any,
    Only(ExtendedReal),
    /// Any `c` in `(0, ∞]`.
    PositiveOrInfinite,
    Empty,
}

fn scale_fit(a: ExtendedReal, b: ExtendedReal) -> ScaleFit {
    // c · 0 = 0 for every c, including c = ∞
    if b == ExtendedReal::ZERO {
        return if a == ExtendedReal::ZERO {
            ScaleFit::Any
        } else {
            ScaleFit::Empty
        };
    }
    match b {
        ExtendedReal::Finite(bv) => match a {
            ExtendedReal::Finite(av) => ScaleFit::Only(ExtendedReal::finite(av / bv)),
            ExtendedReal::Infinity => ScaleFit::Only(ExtendedReal::Infinity),
        },
        ExtendedReal::Infinity => {
            if a == ExtendedReal::ZERO {
                ScaleFit::Only(ExtendedReal::ZERO)
            } else if a.is_infinite() {
                ScaleFit::PositiveOrInfinite
            } else {
                ScaleFit::Empty
            }
        }
    }
}

fn fits_compatible(x: ScaleFit, y: ScaleFit) -> bool {
    use ScaleFit::*;
    match (x, y) {
        (Empty, _) | (_, Empty) => false,
        (Any, _) | (_, Any) => true,
        (PositiveOrInfinite, PositiveOrInfinite) => true,
        (Only(u), PositiveOrInfinite) | (PositiveOrInfinite, Only(u)) => {
            u > ExtendedReal::ZERO
        }
        (Only(u), Only(v)) => match (u, v) {
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => true,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        },
    }
}

/// Searches generated morphisms for a pair witnessing that no single
/// `c ∈ [0, ∞]` satisfies `F1 = c · F2` on both. Returns `None` when every
/// generated pair is consistent with some common scalar.
pub fn find_distinguisher(
    f1: &EntropyFunctor,
    f2: &EntropyFunctor,
    cfg: &GenConfig,
) -> Option<(FinStatMorphism, FinStatMorphism)> {
    let mut seen: Vec<(ScaleFit, FinStatMorphism)> = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng_for_trial(trial as u64);
        let size = rng.gen_range(1..=cfg.max_space_size);
        let m = match trial % 3 {
            0 => {
                let cod = rng.gen_range(1..=size);
                gen_morphism_rng(&mut rng, cfg, size, cod, "x", "y")
            }
            1 => {
                // an optimal morphism: both functors should agree on zero
                let q = sample_dist(&mut rng, space_with("x", size), cfg.zero_mass_rate);
                let cod = rng.gen_range(1..=size);
                let f = sample_surjection(&mut rng, q.space().clone(), space_with("y", cod));
                optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform)
                    .expect("optimal hypothesis exists for sampled surjections")
            }
            _ => {
                // bang morphism with an independent hypothesis: produces
                // support-equal and support-breaking instances
                let q = sample_dist(&mut rng, space_with("x", size), cfg.zero_mass_rate);
                let hyp = sample_dist(&mut rng, q.space().clone(), cfg.zero_mass_rate);
                bang_morphism(&FinStatObject::new(q), &hyp)
                    .expect("bang morphisms are always valid")
            }
        };
        let fit = scale_fit(f1.evaluate(&m), f2.evaluate(&m));
        if fit == ScaleFit::Empty {
            // a single impossible witness distinguishes against anything
            let partner = seen
                .first()
                .map(|(_, w)| w.clone())
                .unwrap_or_else(|| m.clone());
            return Some((m, partner));
        }
        for (other_fit, other) in &seen {
            if !fits_compatible(fit, *other_fit) {
                return Some((m, other.clone()));
            }
        }
        if seen.len() < 256 {
            seen.push((fit, m));
        }
    }
    None
}

/// The suite of trial-based laws plus the built-in semicontinuity
/// families, for one functor.
pub fn run_standard_suite(functor: &EntropyFunctor, cfg: &GenConfig) -> Vec<LawReport> {
    let mut reports = vec![
        check_functoriality(functor, cfg),
        check_convex_linearity(functor, cfg),
        check_fp_vanishing(functor, cfg),
    ];
    let t_seq = default_t_sequence();
    for family in builtin_families() {
        reports.push(
            check_lower_semicontinuity(functor, &family, &t_seq)
                .expect("built-in families have fixed shapes"),
        );
    }
    reports
}
