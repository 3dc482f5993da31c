//! The operad of convex combinations: the arity-`n` operations are the
//! probability distributions on `{1, ..., n}`, composition multiplies
//! weights blockwise, and functions between index sets act by pushforward.
//! Algebras of this operad are convex spaces; both the Euclidean simplex
//! action and [0, ∞] with `0 · ∞ = 0` are instances.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::stochastic::{FiniteSet, ProbDist, NORM_TOL};

/// An arity-`n` operation: a probability distribution on `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperadOperation {
    dist: ProbDist,
}

impl OperadOperation {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let space = FiniteSet::new((1..=weights.len()).map(|i| i.to_string()))?;
        Ok(OperadOperation {
            dist: ProbDist::new(space, weights)?,
        })
    }

    fn with_tolerance(weights: Vec<f64>, tol: f64) -> Result<Self> {
        let space = FiniteSet::new((1..=weights.len()).map(|i| i.to_string()))?;
        Ok(OperadOperation {
            dist: ProbDist::with_tolerance(space, weights, tol)?,
        })
    }

    /// The operad unit: the unique arity-1 operation.
    pub fn unit() -> Self {
        OperadOperation::new(vec![1.0]).unwrap()
    }

    /// The binary operation `(λ, 1-λ)`.
    pub fn binary(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::CoefficientOutOfRange(lambda));
        }
        OperadOperation::new(vec![lambda, 1.0 - lambda])
    }

    pub fn arity(&self) -> usize {
        self.dist.space().len()
    }

    pub fn weights(&self) -> &[f64] {
        self.dist.weights()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.dist.weight(i)
    }
}

/// Operadic composition: `p ∘ (r_1, ..., r_n)` concatenates the blocks
/// `p_i · r_{ij}` into an operation of arity `Σ k_i`.
pub fn operad_compose(p: &OperadOperation, rs: &[OperadOperation]) -> Result<OperadOperation> {
    if rs.len() != p.arity() {
        return Err(Error::ArityMismatch {
            expected: p.arity(),
            got: rs.len(),
        });
    }
    let mut weights = Vec::with_capacity(rs.iter().map(|r| r.arity()).sum());
    for (i, r) in rs.iter().enumerate() {
        let pi = p.weight(i);
        weights.extend(r.weights().iter().map(|&w| pi * w));
    }
    OperadOperation::with_tolerance(weights, 2.0 * NORM_TOL)
}

/// Pushforward along `theta : {1..m} → {1..n}` given as 0-based target
/// indices: the weight at `j` is the mass of the fiber over `j`.
pub fn theta_pushforward(
    theta: &[usize],
    codomain_arity: usize,
    p: &OperadOperation,
) -> Result<OperadOperation> {
    if theta.len() != p.arity() {
        return Err(Error::LengthMismatch {
            expected: p.arity(),
            got: theta.len(),
        });
    }
    if let Some(&bad) = theta.iter().find(|&&j| j >= codomain_arity) {
        return Err(Error::UnknownLabel(format!("index {bad}")));
    }
    let mut weights = vec![0.0; codomain_arity];
    for (i, &j) in theta.iter().enumerate() {
        weights[j] += p.weight(i);
    }
    OperadOperation::with_tolerance(weights, 2.0 * NORM_TOL)
}

/// A carrier together with the action of every operad operation.
pub trait ConvexAlgebra {
    type Carrier: Clone;

    fn apply(&self, op: &OperadOperation, args: &[Self::Carrier]) -> Self::Carrier;

    /// Distance used by the axiom checker; must return 0 for equal values
    /// and may return `f64::INFINITY` for incomparable ones.
    fn distance(&self, a: &Self::Carrier, b: &Self::Carrier) -> f64;
}

/// The binary operation `x *_λ y = λ·x + (1-λ)·y`. The coefficient sits
/// on the first argument; this is the convention forced by the algebra
/// axioms (setting `z = y` in the associativity equation makes the first
/// coefficient multiplicative in λ).
pub fn star<A: ConvexAlgebra>(
    lambda: f64,
    x: &A::Carrier,
    y: &A::Carrier,
    alg: &A,
) -> Result<A::Carrier> {
    let op = OperadOperation::binary(lambda)?;
    Ok(alg.apply(&op, &[x.clone(), y.clone()]))
}

/// Points of `ℝ^dim` under convex combination.
pub struct EuclideanAlgebra {
    pub dim: usize,
}

impl ConvexAlgebra for EuclideanAlgebra {
    type Carrier = Vec<f64>;

    fn apply(&self, op: &OperadOperation, args: &[Vec<f64>]) -> Vec<f64> {
        assert_eq!(op.arity(), args.len());
        let mut out = vec![0.0; self.dim];
        for (w, arg) in op.weights().iter().zip(args) {
            for (o, v) in out.iter_mut().zip(arg) {
                *o += w * v;
            }
        }
        out
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// [0, ∞] under convex combination with the `0 · ∞ = 0` rule. This is the
/// same scalar arithmetic used when summing scaled entropy functors.
pub struct ExtendedRealAlgebra;

impl ConvexAlgebra for ExtendedRealAlgebra {
    type Carrier = ExtendedReal;

    fn apply(&self, op: &OperadOperation, args: &[ExtendedReal]) -> ExtendedReal {
        assert_eq!(op.arity(), args.len());
        op.weights()
            .iter()
            .zip(args)
            .map(|(&w, &a)| ExtendedReal::finite(w) * a)
            .sum()
    }

    fn distance(&self, a: &ExtendedReal, b: &ExtendedReal) -> f64 {
        a.deviation(*b).to_f64()
    }
}

/// Per-axiom maximum deviations measured by [`check_algebra_axioms`].
#[derive(Debug, Clone)]
pub struct AlgebraAxiomReport {
    pub samples: usize,
    /// `x *_1 y = x` (equivalently `y *_0 x = x` via symmetry)
    pub left_unit: f64,
    /// `x *_λ x = x`
    pub idempotence: f64,
    /// `x *_λ y = y *_{1-λ} x`
    pub symmetry: f64,
    /// `(x *_μ y) *_λ z = x *_{λμ} (y *_{λ(1-μ)/(1-λμ)} z)`
    pub associativity: f64,
}

impl AlgebraAxiomReport {
    pub fn max_deviation(&self) -> f64 {
        self.left_unit
            .max(self.idempotence)
            .max(self.symmetry)
            .max(self.associativity)
    }
}

/// Checks the four defining equations of a convex algebra over every triple
/// of consecutive pool values and a coefficient grid that includes the
/// endpoints 0 and 1 (hence the degenerate `λ = μ = 1` case, where the
/// inner fraction is arbitrary; the checker substitutes 0 and spot-checks
/// two other values to confirm indifference).
pub fn check_algebra_axioms<A: ConvexAlgebra>(
    alg: &A,
    pool: &[A::Carrier],
    samples: usize,
) -> AlgebraAxiomReport {
    assert!(pool.len() >= 3, "need at least three sample values");
    let grid = [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0];
    let mut report = AlgebraAxiomReport {
        samples: 0,
        left_unit: 0.0,
        idempotence: 0.0,
        symmetry: 0.0,
        associativity: 0.0,
    };

    let mut trial = 0;
    'outer: loop {
        for i in 0..pool.len() {
            let x = &pool[i];
            let y = &pool[(i + 1) % pool.len()];
            let z = &pool[(i + 2) % pool.len()];
            for &lambda in &grid {
                for &mu in &grid {
                    if trial >= samples {
                        break 'outer;
                    }
                    trial += 1;
                    report.samples += 1;

                    let s = |l: f64, a: &A::Carrier, b: &A::Carrier| {
                        star(l, a, b, alg).expect("grid coefficients are in [0, 1]")
                    };

                    report.left_unit = report.left_unit.max(alg.distance(&s(1.0, x, y), x));
                    report.idempotence =
                        report.idempotence.max(alg.distance(&s(lambda, x, x), x));
                    report.symmetry = report
                        .symmetry
                        .max(alg.distance(&s(lambda, x, y), &s(1.0 - lambda, y, x)));

                    let lhs = s(lambda, &s(mu, x, y), z);
                    let fractions: &[f64] = if lambda * mu == 1.0 {
                        // any value is valid here
                        &[0.0, 0.3, 0.7]
                    } else {
                        &[lambda * (1.0 - mu) / (1.0 - lambda * mu)]
                    };
                    for &nu in fractions {
                        let rhs = s(lambda * mu, x, &s(nu, y, z));
                        report.associativity =
                            report.associativity.max(alg.distance(&lhs, &rhs));
                    }
                }
            }
        }
    }
    report
}
