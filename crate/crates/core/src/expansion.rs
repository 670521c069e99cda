//! Growing a region around a query node.
//!
//! [`greedy_expand`] adds, at every step, the outside neighbor whose inclusion
//! gives the smallest certified bound, and stops once the bound no longer
//! improves by more than `delta` or the region holds `k` nodes. Two baselines
//! pick the next node uniformly at random or by the largest squared coupling
//! mass into the region.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dobrushin::{self, DobrushinCertificate, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::exact::{self, ExactConfig};
use crate::meanfield::{self, MeanFieldConfig};
use crate::model::{localize, make_region, BoundaryMethod, IsingModel, LocalizedModel, Region};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConfig {
    /// Maximum region size.
    pub k: usize,
    /// Minimum bound improvement required to accept a node.
    pub delta: f64,
    pub method: BoundaryMethod,
    pub mean_field: MeanFieldConfig,
    pub enumeration_cap: usize,
    /// Update `D` from the previous region instead of re-inverting.
    pub incremental: bool,
    /// Evaluate a step's candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            k: 16,
            delta: 0.005,
            method: BoundaryMethod::DropOut,
            mean_field: MeanFieldConfig::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            incremental: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Greedy,
    Random,
    #[serde(rename = "maxnorm")]
    MaxNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ReachedK,
    NoImprovement,
    BoundaryEmpty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub node: usize,
    /// Certified bound of the region with this node added (greedy only; `+∞` when invalid).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Squared coupling mass into the region (max-norm baseline only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// The outside boundary ∂β the step chose from.
    pub candidates: Vec<Candidate>,
    pub chosen: Option<usize>,
    /// Greedy's running best bound after this step.
    pub best_bound: f64,
    /// Certified bound of the region after this step.
    pub bound: f64,
    pub valid: bool,
    /// No candidate had a valid certificate and the max-norm rule picked the node.
    pub fallback: bool,
    pub alpha_size: usize,
}

#[derive(Debug, Clone)]
pub struct ExpansionTrace {
    pub query: usize,
    pub strategy: Strategy,
    pub method: BoundaryMethod,
    pub steps: Vec<StepRecord>,
    /// Region in insertion order; its first `s` entries are the region at size `s`.
    pub final_alpha: Vec<usize>,
    pub final_localized: LocalizedModel,
    pub final_certificate: DobrushinCertificate,
    pub stop_reason: StopReason,
}

#[derive(Serialize)]
struct TraceSummary<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    query: usize,
    strategy: Strategy,
    method: BoundaryMethod,
    final_alpha: &'a [usize],
    bound: f64,
    valid: bool,
    stop_reason: StopReason,
}

#[derive(Serialize)]
struct StepLine<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(flatten)]
    step: &'a StepRecord,
}

impl ExpansionTrace {
    /// Region nodes after `size` nodes have been placed.
    pub fn alpha_at(&self, size: usize) -> &[usize] {
        &self.final_alpha[..size.min(self.final_alpha.len())]
    }

    pub fn accepted_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| s.chosen.is_some())
    }

    /// One JSON object per step, then a summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&serde_json::to_string(&StepLine { kind: "step", step }).expect("step serializes"));
            out.push('\n');
        }
        let summary = TraceSummary {
            kind: "summary",
            query: self.query,
            strategy: self.strategy,
            method: self.method,
            final_alpha: &self.final_alpha,
            bound: self.final_certificate.bound,
            valid: self.final_certificate.valid,
            stop_reason: self.stop_reason,
        };
        out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Localizes `region`, falling back to dropping out when the boundary mean
/// field does not converge.
pub fn localize_with_fallback(model: &IsingModel, region: &Region, config: &ExpansionConfig) -> Result<LocalizedModel> {
    match localize(model, region, config.method, &config.mean_field) {
        Err(Error::MeanFieldNotConverged { .. }) => localize(model, region, BoundaryMethod::DropOut, &config.mean_field),
        other => other,
    }
}

struct Evaluated {
    region: Region,
    localized: LocalizedModel,
    certificate: DobrushinCertificate,
}

fn evaluate(
    model: &IsingModel,
    region: Region,
    config: &ExpansionConfig,
    prev: Option<&DobrushinCertificate>,
) -> Result<Evaluated> {
    let localized = localize_with_fallback(model, &region, config)?;
    let certificate = match prev {
        Some(p) if config.incremental => {
            dobrushin::corollary2_bound_incremental(model, &region, &localized, config.enumeration_cap, p)?
        }
        _ => dobrushin::corollary2_bound(model, &region, &localized, config.enumeration_cap)?,
    };
    Ok(Evaluated { region, localized, certificate })
}

fn check_config(model: &IsingModel, query: usize, config: &ExpansionConfig) -> Result<()> {
    model.check_node(query)?;
    if config.k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(config.delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {}", config.delta)));
    }
    Ok(())
}

fn max_norm_score(model: &IsingModel, region: &Region, node: usize) -> f64 {
    model.neighbors(node).iter().filter(|(j, _)| region.contains(*j)).map(|&(_, w)| w * w).sum()
}

/// Lowest-id candidate with the largest max-norm score.
fn max_norm_choice(model: &IsingModel, region: &Region) -> Option<(usize, Vec<Candidate>)> {
    let candidates: Vec<Candidate> = region
        .boundary_beta()
        .iter()
        .map(|&k| Candidate { node: k, bound: None, score: Some(max_norm_score(model, region, k)) })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for c in &candidates {
        let s = c.score.unwrap_or(0.0);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c.node, s));
        }
    }
    best.map(|(k, _)| (k, candidates))
}

/// Greedy region growth driven by the certified bound.
pub fn greedy_expand(model: &IsingModel, query: usize, config: &ExpansionConfig) -> Result<ExpansionTrace> {
    check_config(model, query, config)?;
    let mut current = evaluate(model, make_region(model, &[query], query)?, config, None)?;
    let mut best = 1.0;
    let mut steps = Vec::new();
    let stop_reason = loop {
        if current.region.len() >= config.k {
            break StopReason::ReachedK;
        }
        let candidates = current.region.boundary_beta().to_vec();
        if candidates.is_empty() {
            break StopReason::BoundaryEmpty;
        }
        let eval_one = |&k: &usize| -> Result<Evaluated> {
            evaluate(model, current.region.extended(model, k)?, config, Some(&current.certificate))
        };
        let evaluated: Vec<Evaluated> = if config.parallel {
            candidates.par_iter().map(eval_one).collect::<Result<_>>()?
        } else {
            candidates.iter().map(eval_one).collect::<Result<_>>()?
        };
        let records: Vec<Candidate> = candidates
            .iter()
            .zip(&evaluated)
            .map(|(&node, e)| Candidate { node, bound: Some(e.certificate.usable_bound()), score: None })
            .collect();
        // Candidates are ascending, so a strict comparison keeps the lowest id on ties.
        let mut argmin: Option<usize> = None;
        for (p, e) in evaluated.iter().enumerate() {
            let b = e.certificate.usable_bound();
            if b.is_finite() && argmin.is_none_or(|q| b < evaluated[q].certificate.usable_bound()) {
                argmin = Some(p);
            }
        }
        let step = steps.len();
        match argmin {
            Some(p) => {
                let b = evaluated[p].certificate.bound;
                if b < best - config.delta {
                    best = b;
                    let chosen = candidates[p];
                    current = evaluated.into_iter().nth(p).expect("index in range");
                    steps.push(StepRecord {
                        step,
                        candidates: records,
                        chosen: Some(chosen),
                        best_bound: best,
                        bound: b,
                        valid: true,
                        fallback: false,
                        alpha_size: current.region.len(),
                    });
                } else {
                    steps.push(StepRecord {
                        step,
                        candidates: records,
                        chosen: None,
                        best_bound: best,
                        bound: current.certificate.bound,
                        valid: current.certificate.valid,
                        fallback: false,
                        alpha_size: current.region.len(),
                    });
                    break StopReason::NoImprovement;
                }
            }
            None => {
                let (chosen, _) = max_norm_choice(model, &current.region).expect("boundary is non-empty");
                let p = candidates.binary_search(&chosen).expect("choice is a candidate");
                current = evaluated.into_iter().nth(p).expect("index in range");
                steps.push(StepRecord {
                    step,
                    candidates: records,
                    chosen: Some(chosen),
                    best_bound: best,
                    bound: current.certificate.bound,
                    valid: current.certificate.valid,
                    fallback: true,
                    alpha_size: current.region.len(),
                });
            }
        }
    };
    Ok(finish(query, Strategy::Greedy, config.method, steps, current, stop_reason))
}

fn finish(
    query: usize,
    strategy: Strategy,
    method: BoundaryMethod,
    steps: Vec<StepRecord>,
    current: Evaluated,
    stop_reason: StopReason,
) -> ExpansionTrace {
    ExpansionTrace {
        query,
        strategy,
        method,
        steps,
        final_alpha: current.region.alpha().to_vec(),
        final_localized: current.localized,
        final_certificate: current.certificate,
        stop_reason,
    }
}

fn baseline_expand(
    model: &IsingModel,
    query: usize,
    config: &ExpansionConfig,
    strategy: Strategy,
    mut choose: impl FnMut(&Region) -> (usize, Vec<Candidate>),
) -> Result<ExpansionTrace> {
    check_config(model, query, config)?;
    let mut current = evaluate(model, make_region(model, &[query], query)?, config, None)?;
    let mut steps = Vec::new();
    let stop_reason = loop {
        if current.region.len() >= config.k {
            break StopReason::ReachedK;
        }
        if current.region.boundary_beta().is_empty() {
            break StopReason::BoundaryEmpty;
        }
        let (chosen, candidates) = choose(&current.region);
        let next = current.region.extended(model, chosen)?;
        current = evaluate(model, next, config, Some(&current.certificate))?;
        steps.push(StepRecord {
            step: steps.len(),
            candidates,
            chosen: Some(chosen),
            best_bound: current.certificate.bound,
            bound: current.certificate.bound,
            valid: current.certificate.valid,
            fallback: false,
            alpha_size: current.region.len(),
        });
    };
    Ok(finish(query, strategy, config.method, steps, current, stop_reason))
}

/// Baseline: add a uniformly random node of ∂β at every step.
pub fn random_expand(model: &IsingModel, query: usize, config: &ExpansionConfig, seed: u64) -> Result<ExpansionTrace> {
    let mut stream = rng::substream(seed, Purpose::Expansion, query as u64);
    baseline_expand(model, query, config, Strategy::Random, |region| {
        let pool = region.boundary_beta();
        let chosen = pool[stream.random_range(0..pool.len())];
        let candidates = pool.iter().map(|&node| Candidate { node, bound: None, score: None }).collect();
        (chosen, candidates)
    })
}

/// Baseline: add the node of ∂β with the largest `Σ_{j∈α} J_kj²`.
pub fn maxnorm_expand(model: &IsingModel, query: usize, config: &ExpansionConfig) -> Result<ExpansionTrace> {
    baseline_expand(model, query, config, Strategy::MaxNorm, |region| {
        max_norm_choice(model, region).expect("boundary is non-empty")
    })
}

/// How the marginal is computed on the final region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inference {
    Exact,
    MeanField,
}

impl std::str::FromStr for Inference {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Inference::Exact),
            "mf" | "meanfield" | "mean-field" => Ok(Inference::MeanField),
            other => Err(format!("unknown inference '{other}' (expected exact or mf)")),
        }
    }
}

/// `p(x_q = +1)` under a localized model.
pub fn localized_marginal(
    localized: &LocalizedModel,
    inference: Inference,
    exact: &ExactConfig,
    mean_field: &MeanFieldConfig,
) -> Result<f64> {
    let q = localized.query_index();
    match inference {
        Inference::Exact => exact::eliminate_marginal_with(localized.local(), q, exact),
        Inference::MeanField => Ok(meanfield::mean_field(localized.local(), None, mean_field)?.marginal(q)),
    }
}

#[derive(Debug, Clone)]
pub struct QueryAnswer {
    /// `p(x_q = +1)` on the final region.
    pub marginal: f64,
    pub bound: f64,
    pub valid: bool,
    pub trace: ExpansionTrace,
}

#[derive(Serialize)]
pub struct QuerySummary<'a> {
    pub query: usize,
    pub marginal: f64,
    pub bound: f64,
    pub valid: bool,
    pub alpha: &'a [usize],
    pub stop_reason: StopReason,
}

impl QueryAnswer {
    pub fn summary(&self) -> QuerySummary<'_> {
        QuerySummary {
            query: self.trace.query,
            marginal: self.marginal,
            bound: self.bound,
            valid: self.valid,
            alpha: &self.trace.final_alpha,
            stop_reason: self.trace.stop_reason,
        }
    }
}

/// Greedy expansion followed by inference on the final region only.
pub fn query_marginal(
    model: &IsingModel,
    query: usize,
    config: &ExpansionConfig,
    inference: Inference,
) -> Result<QueryAnswer> {
    let trace = greedy_expand(model, query, config)?;
    let marginal = localized_marginal(&trace.final_localized, inference, &ExactConfig::default(), &config.mean_field)?;
    Ok(QueryAnswer {
        marginal,
        bound: trace.final_certificate.bound,
        valid: trace.final_certificate.valid,
        trace,
    })
}
