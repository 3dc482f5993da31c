//! The category FinStat: objects are finite probability spaces, morphisms
//! pair a measure-preserving surjection `f` (the measurement) with a
//! stochastic section `s` (the hypothesis) satisfying `f ∘ s = 1`.
//!
//! The subcategory FP consists of morphisms whose hypothesis is optimal,
//! `s ∘ r = q`; see [`FinStatMorphism::is_optimal`] and
//! [`optimal_hypothesis`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::{
    convex_combine_dists, pushforward, pushforward_fn, FiniteFunction, FiniteSet, ProbDist,
    StochasticMatrix, SUPPORT_EPS,
};

/// Tolerance for morphism-validation equalities. Looser than the
/// construction tolerance because validation composes several float
/// operations.
pub const MORPH_TOL: f64 = 1e-8;

/// A finite probability space `(X, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinStatObject {
    dist: ProbDist,
}

impl FinStatObject {
    pub fn new(dist: ProbDist) -> Self {
        FinStatObject { dist }
    }

    /// The terminal object `(𝟏, 1)`.
    pub fn unit() -> Self {
        FinStatObject {
            dist: ProbDist::unit(),
        }
    }

    pub fn space(&self) -> &FiniteSet {
        self.dist.space()
    }

    pub fn dist(&self) -> &ProbDist {
        &self.dist
    }
}

/// How [`optimal_hypothesis`] fills a section column over a codomain point
/// of probability zero, where the solution `s_{xy} = q_x / r_y` is
/// undetermined.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ZeroFiberPolicy {
    /// Uniform distribution on the fiber (the default).
    #[default]
    Uniform,
    /// Point mass at the named fiber element.
    PointMass(String),
    /// A caller-supplied distribution over the whole domain; it must be
    /// supported on the fiber and sum to one there.
    Given(Vec<f64>),
}

/// A validated FinStat morphism `(f, s) : (X, q) → (Y, r)`.
///
/// Serializes as `{"domain": {dist}, "codomain": {dist},
/// "f": {"mapping": {label: label}}, "s": {matrix}}`; deserialization
/// re-runs full validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MorphismRaw", into = "MorphismRaw")]
pub struct FinStatMorphism {
    domain: FinStatObject,
    codomain: FinStatObject,
    forward: FiniteFunction,
    section: StochasticMatrix,
}

impl FinStatMorphism {
    /// Validates all four defining conditions and returns the morphism:
    ///
    /// 1. `f` pushes `q` forward to `r` (measure preservation);
    /// 2. `f ∘ s` is the identity on `Y` (section law);
    /// 3. `s_{xy} = 0` unless `f(x) = y` (fiber support);
    /// 4. `f` is surjective.
    pub fn new(
        domain: FinStatObject,
        codomain: FinStatObject,
        forward: FiniteFunction,
        section: StochasticMatrix,
    ) -> Result<Self> {
        if forward.domain() != domain.space() || forward.codomain() != codomain.space() {
            return Err(Error::DomainMismatch(
                "function shape does not match the objects".into(),
            ));
        }
        if section.domain() != codomain.space() || section.codomain() != domain.space() {
            return Err(Error::DomainMismatch(
                "section shape does not match the objects".into(),
            ));
        }

        if let Some(label) = forward.missed_label() {
            return Err(Error::NotSurjective(label.to_string()));
        }

        // f ∘ q = r
        let pushed = pushforward_fn(&forward, domain.dist())?;
        for (j, label) in codomain.space().labels().iter().enumerate() {
            let deviation = (pushed.weight(j) - codomain.dist().weight(j)).abs();
            if deviation > MORPH_TOL {
                return Err(Error::NotMeasurePreserving {
                    label: label.clone(),
                    deviation,
                });
            }
        }

        // s_{xy} = 0 unless f(x) = y
        for y in 0..codomain.space().len() {
            for x in 0..domain.space().len() {
                let value = section.entry(x, y);
                if forward.image_index(x) != y && value > MORPH_TOL {
                    return Err(Error::FiberSupportViolation {
                        x: domain.space().labels()[x].clone(),
                        y: codomain.space().labels()[y].clone(),
                        value,
                    });
                }
            }
        }

        // f ∘ s = 1_Y; with fiber support established this reduces to each
        // column placing mass 1 on its own fiber, but we check the full
        // product to report the first violated pair.
        for y in 0..codomain.space().len() {
            for y_prime in 0..codomain.space().len() {
                let mut acc = 0.0;
                for x in 0..domain.space().len() {
                    if forward.image_index(x) == y_prime {
                        acc += section.entry(x, y);
                    }
                }
                let target = if y == y_prime { 1.0 } else { 0.0 };
                if (acc - target).abs() > MORPH_TOL {
                    return Err(Error::NotASection {
                        y: codomain.space().labels()[y].clone(),
                        y_prime: codomain.space().labels()[y_prime].clone(),
                        value: acc,
                    });
                }
            }
        }

        Ok(FinStatMorphism {
            domain,
            codomain,
            forward,
            section,
        })
    }

    pub fn identity(object: FinStatObject) -> Self {
        let space = object.space().clone();
        FinStatMorphism {
            domain: object.clone(),
            codomain: object,
            forward: FiniteFunction::identity(space.clone()),
            section: StochasticMatrix::identity(space),
        }
    }

    pub fn domain(&self) -> &FinStatObject {
        &self.domain
    }

    pub fn codomain(&self) -> &FinStatObject {
        &self.codomain
    }

    pub fn forward(&self) -> &FiniteFunction {
        &self.forward
    }

    pub fn section(&self) -> &StochasticMatrix {
        &self.section
    }

    /// The prior predicted by the hypothesis: `p_x = s_{x f(x)} · r_{f(x)}`.
    ///
    /// By fiber support this equals `s ∘ r` computed as a matrix product;
    /// the single-term form avoids summing known zeros.
    pub fn prior(&self) -> ProbDist {
        let r = self.codomain.dist();
        let weights: Vec<f64> = (0..self.domain.space().len())
            .map(|x| {
                let y = self.forward.image_index(x);
                self.section.entry(x, y) * r.weight(y)
            })
            .collect();
        ProbDist::with_tolerance(self.domain.space().clone(), weights, 1e-6)
            .expect("prior of a validated morphism is a distribution")
    }

    /// `true` iff `s ∘ r = q` within `tol`, i.e. the morphism lies in FP.
    pub fn is_optimal(&self, tol: f64) -> bool {
        let inferred = pushforward(&self.section, self.codomain.dist())
            .expect("section composes with the codomain distribution");
        inferred
            .max_abs_diff(self.domain.dist())
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    /// Entrywise maximum difference of two parallel morphisms.
    pub fn max_abs_diff(&self, other: &FinStatMorphism) -> Result<f64> {
        let mut max = self.section.max_abs_diff(&other.section)?;
        let f1 = StochasticMatrix::from_function(&self.forward);
        let f2 = StochasticMatrix::from_function(&other.forward);
        max = max.max(f1.max_abs_diff(&f2)?);
        max = max.max(self.domain.dist().max_abs_diff(other.domain.dist())?);
        max = max.max(self.codomain.dist().max_abs_diff(other.codomain.dist())?);
        Ok(max)
    }
}

#[derive(Serialize, Deserialize)]
struct MorphismRaw {
    domain: ProbDist,
    codomain: ProbDist,
    f: FunctionRaw,
    s: StochasticMatrix,
}

#[derive(Serialize, Deserialize)]
struct FunctionRaw {
    mapping: BTreeMap<String, String>,
}

impl TryFrom<MorphismRaw> for FinStatMorphism {
    type Error = Error;

    fn try_from(raw: MorphismRaw) -> Result<Self> {
        let forward = FiniteFunction::new(
            raw.domain.space().clone(),
            raw.codomain.space().clone(),
            raw.f
                .mapping
                .iter()
                .map(|(k, v)| (k.as_str(), v.as_str())),
        )?;
        FinStatMorphism::new(
            FinStatObject::new(raw.domain),
            FinStatObject::new(raw.codomain),
            forward,
            raw.s,
        )
    }
}

impl From<FinStatMorphism> for MorphismRaw {
    fn from(m: FinStatMorphism) -> MorphismRaw {
        let mapping = m
            .forward
            .domain()
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                (
                    l.clone(),
                    m.forward.codomain().labels()[m.forward.image_index(i)].clone(),
                )
            })
            .collect();
        MorphismRaw {
            domain: m.domain.dist,
            codomain: m.codomain.dist,
            f: FunctionRaw { mapping },
            s: m.section,
        }
    }
}

/// Composes `(g, t) ∘ (f, s) = (g ∘ f, s ∘ t)`.
pub fn compose_morphisms(
    second: &FinStatMorphism,
    first: &FinStatMorphism,
) -> Result<FinStatMorphism> {
    if first.codomain().space() != second.domain().space() {
        return Err(Error::ObjectMismatch(format!(
            "middle spaces {} and {} differ",
            first.codomain().space(),
            second.domain().space()
        )));
    }
    let gap = first
        .codomain()
        .dist()
        .max_abs_diff(second.domain().dist())?;
    if gap > MORPH_TOL {
        return Err(Error::ObjectMismatch(format!(
            "middle distributions differ by {gap}"
        )));
    }
    let forward = FiniteFunction::compose(second.forward(), first.forward())?;
    let section = StochasticMatrix::compose(first.section(), second.section())?;
    FinStatMorphism::new(
        first.domain().clone(),
        second.codomain().clone(),
        forward,
        section,
    )
}

/// Solves `s_{xy} r_y = q_x` for the optimal hypothesis along a surjection.
///
/// The codomain carries the exact pushforward of `q`; columns over
/// zero-probability outcomes follow `policy`.
pub fn optimal_hypothesis(
    f: &FiniteFunction,
    q: &ProbDist,
    policy: &ZeroFiberPolicy,
) -> Result<FinStatMorphism> {
    if f.domain() != q.space() {
        return Err(Error::DomainMismatch(format!(
            "distribution on {} does not live on the function's domain {}",
            q.space(),
            f.domain()
        )));
    }
    if let Some(label) = f.missed_label() {
        return Err(Error::NotSurjective(label.to_string()));
    }

    let r = pushforward_fn(f, q)?;
    let n = f.domain().len();
    let m = f.codomain().len();
    let mut entries = vec![vec![0.0; m]; n];
    for y in 0..m {
        let fiber = f.fiber(y);
        let mass = r.weight(y);
        if mass > SUPPORT_EPS {
            for &x in &fiber {
                entries[x][y] = q.weight(x) / mass;
            }
        } else {
            fill_zero_fiber(&mut entries, y, &fiber, f, policy)?;
        }
    }
    let section = StochasticMatrix::new(f.codomain().clone(), f.domain().clone(), entries)?;
    FinStatMorphism::new(
        FinStatObject::new(q.clone()),
        FinStatObject::new(r),
        f.clone(),
        section,
    )
}

fn fill_zero_fiber(
    entries: &mut [Vec<f64>],
    y: usize,
    fiber: &[usize],
    f: &FiniteFunction,
    policy: &ZeroFiberPolicy,
) -> Result<()> {
    let fiber_label = &f.codomain().labels()[y];
    match policy {
        ZeroFiberPolicy::Uniform => {
            let share = 1.0 / fiber.len() as f64;
            for &x in fiber {
                entries[x][y] = share;
            }
        }
        ZeroFiberPolicy::PointMass(label) => {
            let x = f
                .domain()
                .index_of(label)
                .filter(|x| fiber.contains(x))
                .ok_or_else(|| Error::PolicyLabelOutsideFiber {
                    label: label.clone(),
                    fiber: fiber_label.clone(),
                })?;
            entries[x][y] = 1.0;
        }
        ZeroFiberPolicy::Given(column) => {
            if column.len() != f.domain().len() {
                return Err(Error::InvalidPolicyColumn {
                    fiber: fiber_label.clone(),
                    reason: format!(
                        "column has {} entries, domain has {}",
                        column.len(),
                        f.domain().len()
                    ),
                });
            }
            let mut mass = 0.0;
            for (x, &v) in column.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::InvalidPolicyColumn {
                        fiber: fiber_label.clone(),
                        reason: format!("negative entry {v}"),
                    });
                }
                if fiber.contains(&x) {
                    mass += v;
                } else if v > 0.0 {
                    return Err(Error::InvalidPolicyColumn {
                        fiber: fiber_label.clone(),
                        reason: format!(
                            "mass outside the fiber at `{}`",
                            f.domain().labels()[x]
                        ),
                    });
                }
            }
            if (mass - 1.0).abs() > MORPH_TOL {
                return Err(Error::InvalidPolicyColumn {
                    fiber: fiber_label.clone(),
                    reason: format!("fiber mass is {mass}, expected 1"),
                });
            }
            for &x in fiber {
                entries[x][y] = column[x];
            }
        }
    }
    Ok(())
}

/// The morphism to the terminal object `(𝟏, 1)` carrying `hypothesis` as
/// its single section column. Valid for any hypothesis on the domain.
pub fn bang_morphism(domain: &FinStatObject, hypothesis: &ProbDist) -> Result<FinStatMorphism> {
    if hypothesis.space() != domain.space() {
        return Err(Error::SpaceMismatch);
    }
    FinStatMorphism::new(
        domain.clone(),
        FinStatObject::unit(),
        FiniteFunction::bang(domain.space().clone()),
        StochasticMatrix::from_dist(hypothesis),
    )
}

/// Collapses a morphism to the terminal-codomain morphism with the same
/// value under any functor of interest: the hypothesis becomes `s ∘ r`.
pub fn reduce_to_bang(m: &FinStatMorphism) -> Result<FinStatMorphism> {
    let hypothesis = pushforward(m.section(), m.codomain().dist())?;
    bang_morphism(m.domain(), &hypothesis)
}

/// The convex combination `λ·m ⊕ (1-λ)·n` on tagged disjoint unions:
/// the function restricts to each summand and the section is
/// block-diagonal.
pub fn convex_combine_morphisms(
    lambda: f64,
    m: &FinStatMorphism,
    n: &FinStatMorphism,
) -> Result<FinStatMorphism> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::CoefficientOutOfRange(lambda));
    }
    let domain = FinStatObject::new(convex_combine_dists(
        lambda,
        m.domain().dist(),
        n.domain().dist(),
    )?);
    let codomain = FinStatObject::new(convex_combine_dists(
        lambda,
        m.codomain().dist(),
        n.codomain().dist(),
    )?);
    let forward = m.forward().disjoint_union(n.forward());
    let section = m.section().block_diagonal(n.section());
    FinStatMorphism::new(domain, codomain, forward, section)
}
