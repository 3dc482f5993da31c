//! Pipelines: ordered chains of FinStat morphisms loaded from JSON,
//! with composability validation, two-path entropy evaluation, and
//! Bayesian re-fitting of every stage to its optimal hypothesis.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyFunctor;
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::morphism::{
    compose_morphisms, optimal_hypothesis, FinStatMorphism, ZeroFiberPolicy, MORPH_TOL,
};

/// Options carried in the pipeline file; both fields may be omitted.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct PipelineOptions {
    /// Tolerance for the intermediate-distribution composability check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Functor name for entropy evaluation ("RE", "G", "Gprime", ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functor: Option<String>,
}

/// A chain of stages; stage `i`'s codomain must be stage `i+1`'s domain.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Pipeline {
    pub stages: Vec<FinStatMorphism>,
    #[serde(default)]
    pub options: PipelineOptions,
}

/// Per-stage and total values of a functor over a pipeline, computed both
/// by summing stages and by evaluating the full composite.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub functor: String,
    pub per_stage: Vec<ExtendedReal>,
    pub total: ExtendedReal,
    pub composed: ExtendedReal,
    /// ∞-aware distance between the two computation paths.
    pub path_deviation: ExtendedReal,
}

impl Pipeline {
    /// Parses and validates a pipeline from its JSON text. Stage-level
    /// defects are wrapped with their 1-based stage index.
    pub fn from_json(text: &str) -> Result<Pipeline> {
        let pipeline: Pipeline =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        pipeline.validate()?;
        Ok(pipeline)
    }

    /// Checks that the chain is nonempty and composable: each consecutive
    /// pair shares its intermediate space and distribution.
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Parse("pipeline has no stages".to_string()));
        }
        let tol = self.options.tolerance.unwrap_or(MORPH_TOL);
        for (i, pair) in self.stages.windows(2).enumerate() {
            let out = pair[0].codomain();
            let inn = pair[1].domain();
            if out.space() != inn.space() {
                return Err(Error::ObjectMismatch(format!(
                    "codomain space of stage {} differs from domain space of stage {}",
                    i + 1,
                    i + 2
                ))
                .at_stage(i + 2));
            }
            let diff = out.dist().max_abs_diff(inn.dist())?;
            if diff > tol {
                return Err(Error::ObjectMismatch(format!(
                    "intermediate distribution mismatch {diff:.3e} between stages {} and {}",
                    i + 1,
                    i + 2
                ))
                .at_stage(i + 2));
            }
        }
        Ok(())
    }

    /// Composes all stages into a single morphism.
    pub fn compose_all(&self) -> Result<FinStatMorphism> {
        let mut iter = self.stages.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Parse("pipeline has no stages".to_string()))?;
        let mut acc = first.clone();
        for (i, stage) in iter.enumerate() {
            acc = compose_morphisms(stage, &acc).map_err(|e| e.at_stage(i + 2))?;
        }
        Ok(acc)
    }

    /// The functor selected by the options, defaulting to relative entropy.
    pub fn functor(&self) -> Result<EntropyFunctor> {
        match &self.options.functor {
            Some(name) => EntropyFunctor::from_name(name),
            None => Ok(EntropyFunctor::Re),
        }
    }

    /// Evaluates `functor` stage by stage and on the composite.
    pub fn entropy_report(&self, functor: &EntropyFunctor) -> Result<EntropyReport> {
        let per_stage: Vec<ExtendedReal> =
            self.stages.iter().map(|m| functor.evaluate(m)).collect();
        let total: ExtendedReal = per_stage.iter().copied().sum();
        let composed = functor.evaluate(&self.compose_all()?);
        Ok(EntropyReport {
            functor: format!("{functor:?}"),
            per_stage,
            total,
            composed,
            path_deviation: total.deviation(composed),
        })
    }

    /// Replaces every stage's hypothesis by the optimal one, propagating
    /// the exact pushforward distribution down the chain. The result is a
    /// valid pipeline of FP morphisms with total relative entropy 0.
    pub fn bayes(&self, policy: &ZeroFiberPolicy) -> Result<Pipeline> {
        if self.stages.is_empty() {
            return Err(Error::Parse("pipeline has no stages".to_string()));
        }
        let mut current = self.stages[0].domain().dist().clone();
        let mut stages = Vec::with_capacity(self.stages.len());
        for (i, stage) in self.stages.iter().enumerate() {
            let refit = optimal_hypothesis(stage.forward(), &current, policy)
                .map_err(|e| e.at_stage(i + 1))?;
            current = refit.codomain().dist().clone();
            stages.push(refit);
        }
        Ok(Pipeline {
            stages,
            options: self.options.clone(),
        })
    }

    /// Canonical JSON rendering; identical pipelines always produce
    /// byte-identical text.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("pipelines always serialize");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::re_functor;
    use crate::morphism::{bang_morphism, FinStatObject};
    use crate::stochastic::{FiniteFunction, FiniteSet, ProbDist};

    fn two_stage_pipeline() -> Pipeline {
        // 3-point space collapsed to 2 points, then to the singleton,
        // each stage fit optimally
        let x = FiniteSet::new(["0", "1", "2"]).unwrap();
        let y = FiniteSet::new(["a", "b"]).unwrap();
        let q = ProbDist::new(x.clone(), vec![0.15, 0.45, 0.4]).unwrap();
        let f = FiniteFunction::new(x, y.clone(), [("0", "a"), ("1", "a"), ("2", "b")]).unwrap();
        let m1 = optimal_hypothesis(&f, &q, &ZeroFiberPolicy::Uniform).unwrap();
        let g = FiniteFunction::bang(y);
        let m2 =
            optimal_hypothesis(&g, m1.codomain().dist(), &ZeroFiberPolicy::Uniform).unwrap();
        Pipeline {
            stages: vec![m1, m2],
            options: PipelineOptions::default(),
        }
    }

    #[test]
    fn round_trip_and_validate() {
        let pipeline = two_stage_pipeline();
        let text = pipeline.to_json();
        let parsed = Pipeline::from_json(&text).unwrap();
        assert_eq!(parsed, pipeline);
        assert_eq!(parsed.to_json(), text);
    }

    #[test]
    fn mismatched_intermediate_is_reported_at_stage_two() {
        let mut pipeline = two_stage_pipeline();
        // rebuild stage 2 over a perturbed intermediate distribution
        let y = FiniteSet::new(["a", "b"]).unwrap();
        let wrong = ProbDist::new(y.clone(), vec![0.5, 0.5]).unwrap();
        pipeline.stages[1] =
            optimal_hypothesis(&FiniteFunction::bang(y), &wrong, &ZeroFiberPolicy::Uniform)
                .unwrap();
        let err = pipeline.validate().unwrap_err();
        assert!(matches!(err, Error::Stage { stage: 2, .. }), "{err}");
        assert!(err.to_string().contains("stage 2"));
    }

    #[test]
    fn empty_pipeline_rejected() {
        assert!(Pipeline::from_json(r#"{"stages": []}"#).is_err());
    }

    #[test]
    fn entropy_two_paths_agree() {
        let pipeline = two_stage_pipeline();
        let report = pipeline.entropy_report(&EntropyFunctor::Re).unwrap();
        assert_eq!(report.per_stage.len(), 2);
        assert!(report.total.within(1e-10)); // FP stages
        assert!(report.path_deviation.within(1e-8));
    }

    #[test]
    fn single_bang_stage_entropy() {
        let q = ProbDist::two_point(1.0).unwrap();
        let hyp = ProbDist::two_point(0.5).unwrap();
        let m = bang_morphism(&FinStatObject::new(q), &hyp).unwrap();
        let pipeline = Pipeline {
            stages: vec![m],
            options: PipelineOptions::default(),
        };
        let report = pipeline.entropy_report(&EntropyFunctor::Re).unwrap();
        let total = report.total.as_finite().unwrap();
        assert!((total - 2.0_f64.ln()).abs() <= 1e-12);
        assert!(report.path_deviation.within(1e-12));
    }

    #[test]
    fn bayes_zeroes_total_entropy_and_is_idempotent() {
        // start from a deliberately suboptimal chain
        let x = FiniteSet::new(["0", "1", "2"]).unwrap();
        let q = ProbDist::new(x.clone(), vec![0.15, 0.45, 0.4]).unwrap();
        let m = bang_morphism(
            &FinStatObject::new(q),
            &ProbDist::new(x, vec![0.2, 0.2, 0.6]).unwrap(),
        )
        .unwrap();
        let pipeline = Pipeline {
            stages: vec![m],
            options: PipelineOptions::default(),
        };
        assert!(!pipeline
            .entropy_report(&EntropyFunctor::Re)
            .unwrap()
            .total
            .within(1e-10));

        let fitted = pipeline.bayes(&ZeroFiberPolicy::Uniform).unwrap();
        fitted.validate().unwrap();
        for stage in &fitted.stages {
            assert!(stage.is_optimal(1e-9));
            assert!(re_functor(stage).within(1e-10));
        }
        let again = fitted.bayes(&ZeroFiberPolicy::Uniform).unwrap();
        assert_eq!(again.to_json(), fitted.to_json());
    }
}
