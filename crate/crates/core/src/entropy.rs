//! Relative entropy `S(q, p) = Σ q_x ln(q_x / p_x)` with values in [0, ∞],
//! the functor it induces on FinStat, and the support-based functors that
//! share its algebraic laws without being scalar multiples of it.
//!
//! Term conventions: a term with `q_x = 0` contributes exactly `0.0`
//! (even when `p_x = 0`), and a term with `p_x = 0 < q_x` makes the whole
//! sum ∞. Natural logarithm throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::morphism::FinStatMorphism;
use crate::stochastic::ProbDist;

/// Tolerance for "relative entropy vanishes" assertions.
pub const GIBBS_TOL: f64 = 1e-10;

/// Relative entropy of `q` with respect to `p`, both on the same space.
pub fn relative_entropy(q: &ProbDist, p: &ProbDist) -> Result<ExtendedReal> {
    if q.space() != p.space() {
        return Err(Error::SpaceMismatch);
    }
    // Terms are summed in descending order of q_x for a reproducible total.
    let mut terms: Vec<(f64, f64)> = q
        .weights()
        .iter()
        .copied()
        .zip(p.weights().iter().copied())
        .collect();
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut acc = 0.0;
    for (qx, px) in terms {
        if qx == 0.0 {
            continue;
        }
        if px == 0.0 {
            return Ok(ExtendedReal::Infinity);
        }
        acc += qx * (qx / px).ln();
    }
    // Gibbs' inequality makes the exact sum nonnegative; clamp the float dust.
    Ok(ExtendedReal::finite(acc.max(0.0)))
}

/// The relative-entropy functor: `S(q, prior)` where the prior is the
/// distribution inferred by the hypothesis, `p_x = s_{x f(x)} r_{f(x)}`.
pub fn re_functor(m: &FinStatMorphism) -> ExtendedReal {
    relative_entropy(m.domain().dist(), &m.prior())
        .expect("prior lives on the domain space")
}

/// The support-comparison functor: 0 when the supports of `q` and the
/// prior agree as label sets, ∞ otherwise. Functorial and convex linear,
/// but not a scalar multiple of relative entropy.
pub fn functor_g(m: &FinStatMorphism) -> ExtendedReal {
    if supports_equal(m) {
        ExtendedReal::ZERO
    } else {
        ExtendedReal::Infinity
    }
}

/// The support-guarded variant: relative entropy when supports agree,
/// ∞ otherwise.
pub fn functor_g_prime(m: &FinStatMorphism) -> ExtendedReal {
    if supports_equal(m) {
        re_functor(m)
    } else {
        ExtendedReal::Infinity
    }
}

fn supports_equal(m: &FinStatMorphism) -> bool {
    m.domain().dist().support() == m.prior().support()
}

/// A named rule assigning an extended-real value to every FinStat morphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EntropyFunctor {
    /// Relative entropy of the true distribution from the inferred prior.
    Re,
    /// The support-comparison functor.
    G,
    /// The support-guarded relative entropy.
    GPrime,
    /// `Σ c_i · F_i` with extended-real scalar rules (`0 · ∞ = 0`).
    ScaledSum(Vec<(ExtendedReal, EntropyFunctor)>),
    /// Deliberately non-functorial fixture (squared Shannon-entropy gap
    /// between domain and codomain); negative control for the law suites.
    NegativeControl,
}

impl EntropyFunctor {
    pub fn evaluate(&self, m: &FinStatMorphism) -> ExtendedReal {
        match self {
            EntropyFunctor::Re => re_functor(m),
            EntropyFunctor::G => functor_g(m),
            EntropyFunctor::GPrime => functor_g_prime(m),
            EntropyFunctor::ScaledSum(terms) => terms
                .iter()
                .map(|(c, f)| *c * f.evaluate(m))
                .sum(),
            EntropyFunctor::NegativeControl => {
                let gap = shannon(m.domain().dist()) - shannon(m.codomain().dist());
                ExtendedReal::finite(gap * gap)
            }
        }
    }

    /// Parses the CLI spelling of a functor name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "RE" | "re" => Ok(EntropyFunctor::Re),
            "G" | "g" => Ok(EntropyFunctor::G),
            "Gprime" | "gprime" | "G'" => Ok(EntropyFunctor::GPrime),
            "broken" | "broken-fixture" => Ok(EntropyFunctor::NegativeControl),
            other => Err(Error::Parse(format!("unknown functor `{other}`"))),
        }
    }
}

fn shannon(p: &ProbDist) -> f64 {
    p.weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum()
}
