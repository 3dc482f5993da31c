//! Finite sets, probability distributions and column-stochastic matrices:
//! the category FinStoch of finite sets and stochastic maps, together with
//! the deterministic (Kronecker delta) embedding of plain functions.
//!
//! Matrix entries are indexed `(codomain, domain)`, so a column is the
//! conditional distribution of outputs given one input and composition is
//! ordinary matrix multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for construction-time normalization checks.
pub const NORM_TOL: f64 = 1e-9;
/// Threshold below which a weight does not count towards the support.
pub const SUPPORT_EPS: f64 = 1e-12;

/// An ordered finite set of distinct string labels. Order is fixed at
/// construction and defines vector and matrix indexing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FiniteSet {
    labels: Arc<Vec<String>>,
}

impl FiniteSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteSet {
            labels: Arc::new(labels),
        })
    }

    /// The one-element set, labeled `*`.
    pub fn singleton() -> Self {
        FiniteSet::new(["*"]).unwrap()
    }

    /// `{0, 1, ..., n-1}` with decimal labels.
    pub fn indexed(n: usize) -> Result<Self> {
        FiniteSet::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The tagged disjoint union `X + Y`, with labels prefixed `L:` / `R:`.
    pub fn disjoint_union(&self, other: &FiniteSet) -> FiniteSet {
        let labels = self
            .labels
            .iter()
            .map(|l| format!("L:{l}"))
            .chain(other.labels.iter().map(|l| format!("R:{l}")))
            .collect::<Vec<_>>();
        FiniteSet {
            labels: Arc::new(labels),
        }
    }
}

impl TryFrom<Vec<String>> for FiniteSet {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        FiniteSet::new(labels)
    }
}

impl From<FiniteSet> for Vec<String> {
    fn from(set: FiniteSet) -> Vec<String> {
        set.labels.as_ref().clone()
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

/// A validated probability distribution on a [`FiniteSet`].
///
/// Weights are stored exactly as given; constructors reject rather than
/// renormalize. Use [`ProbDist::normalized`] for explicit repair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbDistRaw", into = "ProbDistRaw")]
pub struct ProbDist {
    space: FiniteSet,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProbDistRaw {
    space: Vec<String>,
    weights: Vec<f64>,
}

impl TryFrom<ProbDistRaw> for ProbDist {
    type Error = Error;

    fn try_from(raw: ProbDistRaw) -> Result<Self> {
        ProbDist::new(FiniteSet::new(raw.space)?, raw.weights)
    }
}

impl From<ProbDist> for ProbDistRaw {
    fn from(d: ProbDist) -> ProbDistRaw {
        ProbDistRaw {
            space: d.space.into(),
            weights: d.weights,
        }
    }
}

impl ProbDist {
    pub fn new(space: FiniteSet, weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(space, weights, NORM_TOL)
    }

    /// Constructor with a caller-chosen normalization tolerance, for results
    /// of float-accumulating operations like pushforward.
    pub(crate) fn with_tolerance(space: FiniteSet, weights: Vec<f64>, tol: f64) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        for (index, &w) in weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight { index, weight: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum, tol });
        }
        Ok(ProbDist { space, weights })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(space: FiniteSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        for (index, &w) in weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight { index, weight: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum, tol: NORM_TOL });
        }
        let weights = weights.into_iter().map(|w| w / sum).collect();
        Ok(ProbDist { space, weights })
    }

    /// The unique distribution on the one-element set.
    pub fn unit() -> Self {
        ProbDist {
            space: FiniteSet::singleton(),
            weights: vec![1.0],
        }
    }

    /// The two-point distribution `(alpha, 1 - alpha)` on `{0, 1}`.
    pub fn two_point(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::CoefficientOutOfRange(alpha));
        }
        Ok(ProbDist {
            space: FiniteSet::indexed(2)?,
            weights: vec![alpha, 1.0 - alpha],
        })
    }

    pub fn space(&self) -> &FiniteSet {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Labels with weight above [`SUPPORT_EPS`].
    pub fn support(&self) -> Vec<&str> {
        self.space
            .labels()
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > SUPPORT_EPS)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &ProbDist) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// A total function between finite sets, stored as an index map.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFunction {
    domain: FiniteSet,
    codomain: FiniteSet,
    images: Vec<usize>,
}

impl FiniteFunction {
    /// Builds from per-label assignments, e.g. `[("a", "x"), ("b", "x")]`.
    /// Every domain label must be assigned exactly once.
    pub fn new<'a, I>(domain: FiniteSet, codomain: FiniteSet, mapping: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let map: BTreeMap<&str, &str> = mapping.into_iter().collect();
        let mut images = Vec::with_capacity(domain.len());
        for label in domain.labels() {
            let target = map
                .get(label.as_str())
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            let idx = codomain
                .index_of(target)
                .ok_or_else(|| Error::UnknownLabel((*target).to_string()))?;
            images.push(idx);
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            images,
        })
    }

    /// Builds from image indices, one per domain element in order.
    pub fn from_indices(domain: FiniteSet, codomain: FiniteSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= codomain.len()) {
            return Err(Error::UnknownLabel(format!("index {bad}")));
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            images,
        })
    }

    pub fn identity(set: FiniteSet) -> Self {
        let images = (0..set.len()).collect();
        FiniteFunction {
            domain: set.clone(),
            codomain: set,
            images,
        }
    }

    /// The unique map to the one-element set.
    pub fn bang(domain: FiniteSet) -> Self {
        let images = vec![0; domain.len()];
        FiniteFunction {
            domain,
            codomain: FiniteSet::singleton(),
            images,
        }
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    /// Image index of the `i`-th domain element.
    pub fn image_index(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn image_indices(&self) -> &[usize] {
        &self.images
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.len()];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// First codomain label with empty preimage, if any.
    pub fn missed_label(&self) -> Option<&str> {
        let mut hit = vec![false; self.codomain.len()];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.iter()
            .position(|&h| !h)
            .map(|j| self.codomain.labels()[j].as_str())
    }

    /// Indices of the fiber `f^{-1}(y)` over codomain index `y`.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, &img)| img == y)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn compose(second: &FiniteFunction, first: &FiniteFunction) -> Result<FiniteFunction> {
        if first.codomain != second.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose: intermediate sets {} and {} differ",
                first.codomain, second.domain
            )));
        }
        let images = first.images.iter().map(|&i| second.images[i]).collect();
        Ok(FiniteFunction {
            domain: first.domain.clone(),
            codomain: second.codomain.clone(),
            images,
        })
    }

    /// The disjoint union `f + g` on `L:`/`R:`-tagged sets.
    pub fn disjoint_union(&self, other: &FiniteFunction) -> FiniteFunction {
        let domain = self.domain.disjoint_union(&other.domain);
        let codomain = self.codomain.disjoint_union(&other.codomain);
        let offset = self.codomain.len();
        let images = self
            .images
            .iter()
            .copied()
            .chain(other.images.iter().map(|&i| i + offset))
            .collect();
        FiniteFunction {
            domain,
            codomain,
            images,
        }
    }
}

/// A column-stochastic kernel `X ⤳ Y`: entry `(y, x)` is the probability of
/// `y` given `x`, so every column is a probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StochasticMatrixRaw", into = "StochasticMatrixRaw")]
pub struct StochasticMatrix {
    domain: FiniteSet,
    codomain: FiniteSet,
    /// Row-major, `codomain.len()` rows by `domain.len()` columns.
    entries: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct StochasticMatrixRaw {
    domain: Vec<String>,
    codomain: Vec<String>,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<StochasticMatrixRaw> for StochasticMatrix {
    type Error = Error;

    fn try_from(raw: StochasticMatrixRaw) -> Result<Self> {
        StochasticMatrix::new(
            FiniteSet::new(raw.domain)?,
            FiniteSet::new(raw.codomain)?,
            raw.entries,
        )
    }
}

impl From<StochasticMatrix> for StochasticMatrixRaw {
    fn from(m: StochasticMatrix) -> StochasticMatrixRaw {
        StochasticMatrixRaw {
            domain: m.domain.into(),
            codomain: m.codomain.into(),
            entries: m.entries,
        }
    }
}

impl StochasticMatrix {
    pub fn new(domain: FiniteSet, codomain: FiniteSet, entries: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(domain, codomain, entries, NORM_TOL)
    }

    pub(crate) fn with_tolerance(
        domain: FiniteSet,
        codomain: FiniteSet,
        entries: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        if entries.len() != codomain.len() {
            return Err(Error::LengthMismatch {
                expected: codomain.len(),
                got: entries.len(),
            });
        }
        for row in &entries {
            if row.len() != domain.len() {
                return Err(Error::LengthMismatch {
                    expected: domain.len(),
                    got: row.len(),
                });
            }
        }
        for (r, row) in entries.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v.is_nan() || v < 0.0 {
                    return Err(Error::NegativeWeight {
                        index: r * domain.len() + c,
                        weight: v,
                    });
                }
            }
        }
        for c in 0..domain.len() {
            let sum: f64 = entries.iter().map(|row| row[c]).sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotNormalized { sum, tol });
            }
        }
        Ok(StochasticMatrix {
            domain,
            codomain,
            entries,
        })
    }

    pub fn identity(set: FiniteSet) -> Self {
        let n = set.len();
        let entries = (0..n)
            .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
            .collect();
        StochasticMatrix {
            domain: set.clone(),
            codomain: set,
            entries,
        }
    }

    /// Embeds a function as the kernel with `f_{yx} = δ_{y f(x)}`: each
    /// column is a point mass at `f(x)`.
    pub fn from_function(f: &FiniteFunction) -> Self {
        let m = f.codomain().len();
        let n = f.domain().len();
        let mut entries = vec![vec![0.0; n]; m];
        for x in 0..n {
            entries[f.image_index(x)][x] = 1.0;
        }
        StochasticMatrix {
            domain: f.domain().clone(),
            codomain: f.codomain().clone(),
            entries,
        }
    }

    /// A distribution viewed as a kernel from the one-element set.
    pub fn from_dist(d: &ProbDist) -> Self {
        StochasticMatrix {
            domain: FiniteSet::singleton(),
            codomain: d.space().clone(),
            entries: d.weights().iter().map(|&w| vec![w]).collect(),
        }
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.entries.iter().map(|row| row[col]).collect()
    }

    /// Composition by matrix multiplication: `(g ∘ f)_{zx} = Σ_y g_{zy} f_{yx}`.
    pub fn compose(second: &StochasticMatrix, first: &StochasticMatrix) -> Result<StochasticMatrix> {
        if first.codomain != second.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot compose: intermediate sets {} and {} differ",
                first.codomain, second.domain
            )));
        }
        let rows = second.codomain.len();
        let cols = first.domain.len();
        let inner = first.codomain.len();
        let mut entries = vec![vec![0.0; cols]; rows];
        for (z, out_row) in entries.iter_mut().enumerate() {
            for (x, cell) in out_row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for y in 0..inner {
                    acc += second.entries[z][y] * first.entries[y][x];
                }
                *cell = acc;
            }
        }
        // columns stay stochastic up to accumulated rounding
        StochasticMatrix::with_tolerance(
            first.domain.clone(),
            second.codomain.clone(),
            entries,
            10.0 * NORM_TOL,
        )
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> Result<f64> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::SpaceMismatch);
        }
        let mut max = 0.0f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            for (x, y) in a.iter().zip(b) {
                max = max.max((x - y).abs());
            }
        }
        Ok(max)
    }

    /// Block-diagonal sum on `L:`/`R:`-tagged sets.
    pub fn block_diagonal(&self, other: &StochasticMatrix) -> StochasticMatrix {
        let domain = self.domain.disjoint_union(&other.domain);
        let codomain = self.codomain.disjoint_union(&other.codomain);
        let (n1, m1) = (self.domain.len(), self.codomain.len());
        let (n2, m2) = (other.domain.len(), other.codomain.len());
        let mut entries = vec![vec![0.0; n1 + n2]; m1 + m2];
        for (r, row) in self.entries.iter().enumerate() {
            entries[r][..n1].copy_from_slice(row);
        }
        for (r, row) in other.entries.iter().enumerate() {
            entries[m1 + r][n1..].copy_from_slice(row);
        }
        StochasticMatrix {
            domain,
            codomain,
            entries,
        }
    }
}

/// Pushes a distribution forward along a kernel: `r_y = Σ_x k_{yx} q_x`.
pub fn pushforward(k: &StochasticMatrix, q: &ProbDist) -> Result<ProbDist> {
    if k.domain() != q.space() {
        return Err(Error::DomainMismatch(format!(
            "distribution on {} cannot be pushed along a kernel from {}",
            q.space(),
            k.domain()
        )));
    }
    let weights = k
        .entries()
        .iter()
        .map(|row| row.iter().zip(q.weights()).map(|(e, w)| e * w).sum())
        .collect();
    ProbDist::with_tolerance(k.codomain().clone(), weights, 16.0 * NORM_TOL)
}

/// Pushforward along a plain function by fiber sums: `r_y = Σ_{f(x)=y} q_x`.
pub fn pushforward_fn(f: &FiniteFunction, q: &ProbDist) -> Result<ProbDist> {
    if f.domain() != q.space() {
        return Err(Error::DomainMismatch(format!(
            "distribution on {} cannot be pushed along a function from {}",
            q.space(),
            f.domain()
        )));
    }
    let mut weights = vec![0.0; f.codomain().len()];
    for (x, &w) in q.weights().iter().enumerate() {
        weights[f.image_index(x)] += w;
    }
    ProbDist::with_tolerance(f.codomain().clone(), weights, 16.0 * NORM_TOL)
}

/// The convex combination `λ·p ⊕ (1-λ)·q` on the tagged disjoint union.
pub fn convex_combine_dists(lambda: f64, p: &ProbDist, q: &ProbDist) -> Result<ProbDist> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::CoefficientOutOfRange(lambda));
    }
    let space = p.space().disjoint_union(q.space());
    let weights = p
        .weights()
        .iter()
        .map(|&w| lambda * w)
        .chain(q.weights().iter().map(|&w| (1.0 - lambda) * w))
        .collect();
    ProbDist::with_tolerance(space, weights, 2.0 * NORM_TOL)
}
