//! Naive mean-field inference.
//!
//! Coordinate ascent on the variational objective
//! `F(m) = Σ h_i m_i + Σ J_ij m_i m_j + Σ H((1 + m_i) / 2)`, where `H` is the
//! binary entropy. Each update `m_j ← tanh(h_j + Σ_k J_jk m_k)` maximizes `F`
//! in `m_j` exactly, so sweeps never decrease it.

use crate::error::{Error, Result};
use crate::model::{IsingModel, Region};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Total number of runs; the first starts from `tanh(h)` (or the caller's
    /// init), the rest from uniform draws in `[-1, 1]`.
    pub restarts: usize,
    pub seed: u64,
    /// Keep the boundary nodes' own fields in the boundary subproblem.
    pub include_boundary_fields: bool,
}

impl Default for MeanFieldConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 1000, restarts: 3, seed: 0, include_boundary_fields: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    /// Per-node means `E[x_j]`, each in `[-1, 1]`.
    pub m: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Variational objective `F(m)`, a lower bound on `log Z`.
    pub objective: f64,
}

impl MeanFieldState {
    /// `p(x_j = +1) = (1 + m_j) / 2`.
    pub fn marginal(&self, j: usize) -> f64 {
        0.5 * (1.0 + self.m[j])
    }
}

fn entropy(m: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(0.5 * (1.0 + m)) + term(0.5 * (1.0 - m))
}

pub fn objective(model: &IsingModel, m: &[f64]) -> f64 {
    let mut f = 0.0;
    for (i, &mi) in m.iter().enumerate() {
        f += model.field(i) * mi + entropy(mi);
    }
    for (i, j, w) in model.edges() {
        f += w * m[i] * m[j];
    }
    f
}

/// One ascending-id sweep; returns the largest coordinate change.
pub fn sweep(model: &IsingModel, m: &mut [f64]) -> f64 {
    let mut residual: f64 = 0.0;
    for j in 0..model.n() {
        let local: f64 = model.field(j) + model.neighbors(j).iter().map(|&(k, w)| w * m[k]).sum::<f64>();
        let next = local.tanh();
        residual = residual.max((next - m[j]).abs());
        m[j] = next;
    }
    residual
}

fn run(model: &IsingModel, mut m: Vec<f64>, config: &MeanFieldConfig) -> MeanFieldState {
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < config.max_iter {
        residual = sweep(model, &mut m);
        iterations += 1;
        if residual <= config.tol {
            break;
        }
    }
    let objective = objective(model, &m);
    MeanFieldState { m, iterations, residual, converged: residual <= config.tol, objective }
}

/// Mean field on the whole model, keeping the run with the highest objective.
pub fn mean_field(model: &IsingModel, init: Option<&[f64]>, config: &MeanFieldConfig) -> Result<MeanFieldState> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("mean-field tolerance must be positive, got {}", config.tol)));
    }
    let start = match init {
        Some(m) if m.len() != model.n() => {
            return Err(Error::InvalidParameter(format!("init has {} means for {} nodes", m.len(), model.n())))
        }
        Some(m) => m.iter().map(|v| v.clamp(-1.0, 1.0)).collect(),
        None => model.fields().iter().map(|h| h.tanh()).collect(),
    };
    let mut best = run(model, start, config);
    for r in 1..config.restarts.max(1) {
        let mut stream = rng::substream(config.seed, Purpose::MeanField, r as u64);
        let m = (0..model.n()).map(|_| rng::uniform(&mut stream, -1.0, 1.0)).collect();
        let state = run(model, m, config);
        if state.objective > best.objective {
            best = state;
        }
    }
    Ok(best)
}

/// The boundary subproblem: variables ∂α ∪ ∂β, the cross edges plus original
/// edges inside ∂α and inside ∂β, and (optionally) the original fields.
/// Returns the model and its node list (ascending global ids).
pub fn boundary_subproblem(model: &IsingModel, region: &Region, include_fields: bool) -> Result<(IsingModel, Vec<usize>)> {
    let mut nodes: Vec<usize> = region.boundary_alpha().iter().chain(region.boundary_beta()).copied().collect();
    nodes.sort_unstable();
    let mut sub = model.induced(&nodes)?;
    if !include_fields {
        for p in 0..sub.n() {
            sub.set_field(p, 0.0);
        }
    }
    Ok((sub, nodes))
}

/// Mean-field means of the ∂β nodes, as `(node, m)` ascending by node.
pub fn boundary_mean_field(model: &IsingModel, region: &Region, config: &MeanFieldConfig) -> Result<Vec<(usize, f64)>> {
    if region.cross_edges().is_empty() {
        return Ok(Vec::new());
    }
    let (sub, nodes) = boundary_subproblem(model, region, config.include_boundary_fields)?;
    let state = mean_field(&sub, None, config)?;
    if !state.converged {
        return Err(Error::MeanFieldNotConverged { iterations: state.iterations, residual: state.residual });
    }
    Ok(nodes
        .iter()
        .zip(&state.m)
        .filter(|(u, _)| !region.contains(**u))
        .map(|(&u, &m)| (u, m))
        .collect())
}
