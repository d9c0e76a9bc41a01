//! Built-in systems with known kernels, solution families, sample
//! distributions and sections, and executable expected-fact tables.
//!
//! The fact tables double as the regression suite: `msym demo <model>` runs
//! them, and the acceptance tests replay the same closures.

pub mod em;
pub mod mechanics;
pub mod metric_affine;
pub mod simple;
pub mod variational;

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::exterior::VectorField;
use crate::report::Verdict;
use crate::sections::Section;
use crate::solutions::Distribution;
use crate::system::{PremultisymplecticSystem, RunConfig};

type FactFn = Arc<dyn Fn(&ModelSpec, &RunConfig) -> Verdict + Send + Sync>;

/// One executable expected fact; `run` produces a pass/fail verdict from the
/// model and a sampling configuration.
#[derive(Clone)]
pub struct Fact {
    pub name: String,
    pub detail: String,
    run: FactFn,
}

impl Fact {
    pub fn new(
        name: impl Into<String>,
        detail: impl Into<String>,
        run: impl Fn(&ModelSpec, &RunConfig) -> Verdict + Send + Sync + 'static,
    ) -> Self {
        Fact {
            name: name.into(),
            detail: detail.into(),
            run: Arc::new(run),
        }
    }

    pub fn run(&self, model: &ModelSpec, cfg: &RunConfig) -> Verdict {
        let start = Instant::now();
        let mut v = (self.run)(model, cfg);
        v.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        v
    }
}

type SamplerFn = Arc<dyn Fn(&RunConfig) -> Vec<Vec<f64>> + Send + Sync>;

/// A built-in system with its companions.
#[derive(Clone)]
pub struct ModelSpec {
    pub name: String,
    pub system: PremultisymplecticSystem,
    pub known_kernel: Vec<(String, VectorField)>,
    pub distributions: Vec<(String, Distribution)>,
    pub sections: Vec<(String, Section)>,
    pub facts: Vec<Fact>,
    sampler: Option<SamplerFn>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, system: PremultisymplecticSystem) -> Self {
        ModelSpec {
            name: name.into(),
            system,
            known_kernel: Vec::new(),
            distributions: Vec::new(),
            sections: Vec::new(),
            facts: Vec::new(),
            sampler: None,
        }
    }

    /// Replace the default box sampler (metric-affine samples its constraint
    /// locus instead).
    pub fn with_sampler(
        mut self,
        sampler: impl Fn(&RunConfig) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    /// Sample points for this model: the custom sampler when present,
    /// otherwise the configured box.
    pub fn sample(&self, cfg: &RunConfig) -> Vec<Vec<f64>> {
        match &self.sampler {
            Some(s) => s(cfg),
            None => cfg.sample_box(self.system.dim()),
        }
    }

    pub fn distribution(&self, name: &str) -> Option<Distribution> {
        self.distributions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d.clone())
    }

    pub fn section(&self, name: &str) -> Option<Section> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.clone())
    }

    /// Run all facts, or only those whose name contains `filter`.
    pub fn run_facts(&self, cfg: &RunConfig, filter: Option<&str>) -> Vec<Verdict> {
        let selected: Vec<&Fact> = self
            .facts
            .iter()
            .filter(|f| filter.is_none_or(|pat| f.name.contains(pat)))
            .collect();
        let jobs = cfg.jobs.max(1).min(selected.len().max(1));
        let mut verdicts: Vec<Verdict> = if jobs <= 1 {
            selected.iter().map(|f| f.run(self, cfg)).collect()
        } else {
            // fan the facts out over a scoped worker pool; order restored below
            let chunks: Vec<Vec<&Fact>> = (0..jobs)
                .map(|w| selected.iter().skip(w).step_by(jobs).copied().collect())
                .collect();
            std::thread::scope(|scope| {
                let handles: Vec<_> = chunks
                    .into_iter()
                    .map(|chunk| {
                        scope.spawn(move || {
                            chunk
                                .into_iter()
                                .map(|f| f.run(self, cfg))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("fact worker"))
                    .collect()
            })
        };
        verdicts.sort_by(|a, b| a.check.cmp(&b.check).then(a.args.cmp(&b.args)));
        verdicts
    }
}

/// Model registry for the CLI.
pub fn by_name(name: &str) -> Result<ModelSpec> {
    match name {
        "r8" => Ok(simple::r8()),
        "r5" => Ok(simple::r5()),
        "r6" => Ok(simple::r6()),
        "mechanics" => {
            Ok(mechanics::model(&mechanics::Params::default()).expect("default instance"))
        }
        "em" => Ok(em::model()),
        "metric-affine" | "ma" => Ok(metric_affine::model()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

pub fn model_names() -> &'static [&'static str] {
    &["r8", "r5", "r6", "mechanics", "em", "metric-affine"]
}

/// Shared fact: `dΩ ≈ 0` by central differences at no fewer than ten
/// sampled points.
pub(crate) fn closedness_fact() -> Fact {
    Fact::new(
        "closed",
        "dΩ vanishes within the FD tolerance",
        |model, cfg| {
            let cfg = RunConfig {
                points: cfg.points.max(10),
                ..cfg.clone()
            };
            let mut worst: f64 = 0.0;
            for p in model.sample(&cfg) {
                let d = crate::exterior::exterior_derivative_fd(
                    model.system.omega(),
                    &p,
                    cfg.tol.fd_step,
                );
                worst = worst.max(d.max_norm());
            }
            Verdict::new("closed", "", worst <= cfg.tol.fd, worst)
        },
    )
}
