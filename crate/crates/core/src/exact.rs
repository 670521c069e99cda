//! Exact inference oracles.
//!
//! Brute-force enumeration handles tiny components; bucket elimination with a
//! min-fill order handles anything of bounded treewidth (a 10×10 lattice has
//! width 10). Both work in log space.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{connected_component, IsingModel};

/// Size limits for the exact routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest component brute force will enumerate.
    pub brute_force_cap: usize,
    /// Largest clique (variables in one intermediate table) elimination may create.
    pub width_cap: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { brute_force_cap: 22, width_cap: 22 }
    }
}

/// A log-space table over `{-1, +1}^scope`.
///
/// Entries are in lexicographic order with `-1` before `+1` and `scope[0]` the
/// most significant position.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if table.len() != 1usize << scope.len() {
            return Err(Error::InvalidParameter(format!(
                "factor over {} variables needs {} entries, got {}",
                scope.len(),
                1usize << scope.len(),
                table.len()
            )));
        }
        let distinct: BTreeSet<_> = scope.iter().collect();
        if distinct.len() != scope.len() {
            return Err(Error::InvalidParameter("factor scope has duplicates".into()));
        }
        Ok(Self { scope, table })
    }

    pub fn unary(node: usize, h: f64) -> Self {
        Self { scope: vec![node], table: vec![-h, h] }
    }

    pub fn pairwise(i: usize, j: usize, coupling: f64) -> Self {
        Self { scope: vec![i, j], table: vec![coupling, -coupling, -coupling, coupling] }
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

/// `p(+1)` from unnormalized log weights of the two states.
fn normalize(log_minus: f64, log_plus: f64) -> f64 {
    1.0 / (1.0 + (log_minus - log_plus).exp())
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        Self { max: f64::NEG_INFINITY, scaled: 0.0 }
    }

    fn add(&mut self, x: f64) {
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled.ln()
    }
}

/// Exact `p(x_node = +1)` by enumerating the configurations of `node`'s component.
pub fn brute_force_marginal(model: &IsingModel, node: usize) -> Result<f64> {
    brute_force_marginal_with(model, node, &ExactConfig::default())
}

pub fn brute_force_marginal_with(model: &IsingModel, node: usize, config: &ExactConfig) -> Result<f64> {
    model.check_node(node)?;
    let component = connected_component(model, node)?;
    if component.len() > config.brute_force_cap {
        return Err(Error::ComponentTooLarge { node, size: component.len(), cap: config.brute_force_cap });
    }
    let local = model.induced(&component)?;
    let q = component.binary_search(&node).expect("node lies in its own component");
    let edges: Vec<_> = local.edges().collect();
    let n = local.n();
    let spin = |x: u64, i: usize| if x >> i & 1 == 1 { 1.0 } else { -1.0 };
    let (mut minus, mut plus) = (LogSum::new(), LogSum::new());
    for x in 0..(1u64 << n) {
        let mut e = 0.0;
        for (i, h) in local.fields().iter().enumerate() {
            e += h * spin(x, i);
        }
        for &(i, j, w) in &edges {
            e += w * spin(x, i) * spin(x, j);
        }
        if x >> q & 1 == 1 {
            plus.add(e);
        } else {
            minus.add(e);
        }
    }
    Ok(normalize(minus.value(), plus.value()))
}

/// Interaction graph over a set of variables, as sorted neighbor sets.
fn interaction_graph(model: &IsingModel, nodes: &[usize]) -> HashMap<usize, BTreeSet<usize>> {
    let mut graph: HashMap<usize, BTreeSet<usize>> = nodes.iter().map(|&u| (u, BTreeSet::new())).collect();
    for &u in nodes {
        for &(v, _) in model.neighbors(u) {
            if graph.contains_key(&v) {
                graph.get_mut(&u).unwrap().insert(v);
            }
        }
    }
    graph
}

/// Min-fill elimination order over `nodes` minus `keep`; ties go to the lowest id.
pub fn min_fill_order(model: &IsingModel, nodes: &[usize], keep: Option<usize>) -> Vec<usize> {
    let mut graph = interaction_graph(model, nodes);
    let mut remaining: BTreeSet<usize> = nodes.iter().copied().filter(|&u| Some(u) != keep).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for &v in &remaining {
            let nb: Vec<usize> = graph[&v].iter().copied().collect();
            let mut fill = 0;
            for (a, &x) in nb.iter().enumerate() {
                for &y in &nb[a + 1..] {
                    if !graph[&x].contains(&y) {
                        fill += 1;
                    }
                }
            }
            if best.is_none_or(|(f, _)| fill < f) {
                best = Some((fill, v));
                if fill == 0 {
                    break;
                }
            }
        }
        let (_, v) = best.expect("remaining is non-empty");
        let nb: Vec<usize> = graph[&v].iter().copied().collect();
        for (a, &x) in nb.iter().enumerate() {
            for &y in &nb[a + 1..] {
                graph.get_mut(&x).unwrap().insert(y);
                graph.get_mut(&y).unwrap().insert(x);
            }
        }
        for &x in &nb {
            graph.get_mut(&x).unwrap().remove(&v);
        }
        graph.remove(&v);
        remaining.remove(&v);
        order.push(v);
    }
    order
}

fn initial_factors(model: &IsingModel, nodes: &[usize]) -> Vec<Factor> {
    let inside: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut factors: Vec<Factor> = nodes.iter().map(|&u| Factor::unary(u, model.field(u))).collect();
    for &u in nodes {
        for &(v, w) in model.neighbors(u) {
            if u < v && inside.contains(&v) {
                factors.push(Factor::pairwise(u, v, w));
            }
        }
    }
    factors
}

/// Multiplies `factors` and sums `var` out of the product.
fn sum_out(factors: &[Factor], var: usize, cap: usize) -> Result<Factor> {
    let union: BTreeSet<usize> = factors.iter().flat_map(|f| f.scope.iter().copied()).collect();
    if union.len() > cap {
        return Err(Error::WidthTooLarge { clique: union.len(), cap });
    }
    let scope: Vec<usize> = union.iter().copied().filter(|&u| u != var).collect();
    let k = scope.len();
    // Union position of each variable; `var` sits at the lowest bit.
    let mut pos: HashMap<usize, usize> = scope.iter().enumerate().map(|(p, &u)| (u, k - p)).collect();
    pos.insert(var, 0);
    let strides: Vec<Vec<usize>> = factors.iter().map(|f| f.scope.iter().map(|u| pos[u]).collect()).collect();
    let mut table = Vec::with_capacity(1 << k);
    for a in 0..(1usize << k) {
        let mut acc = LogSum::new();
        for xv in 0..2usize {
            let full = (a << 1) | xv;
            let mut total = 0.0;
            for (f, st) in factors.iter().zip(&strides) {
                let mut idx = 0;
                for &p in st {
                    idx = (idx << 1) | (full >> p & 1);
                }
                total += f.table[idx];
            }
            acc.add(total);
        }
        table.push(acc.value());
    }
    Ok(Factor { scope, table })
}

fn run_elimination(mut factors: Vec<Factor>, order: &[usize], cap: usize) -> Result<Vec<Factor>> {
    for &v in order {
        let (bucket, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        if !bucket.is_empty() {
            factors.push(sum_out(&bucket, v, cap)?);
        }
    }
    Ok(factors)
}

/// Exact `p(x_node = +1)` by bucket elimination over `node`'s component.
pub fn eliminate_marginal(model: &IsingModel, node: usize) -> Result<f64> {
    eliminate_marginal_with(model, node, &ExactConfig::default())
}

pub fn eliminate_marginal_with(model: &IsingModel, node: usize, config: &ExactConfig) -> Result<f64> {
    model.check_node(node)?;
    let component = connected_component(model, node)?;
    let order = min_fill_order(model, &component, Some(node));
    eliminate_in_order(model, node, &component, &order, config)
}

/// Elimination with a caller-supplied order; `order` must be a permutation of
/// `node`'s component without `node`.
pub fn eliminate_marginal_ordered(model: &IsingModel, node: usize, order: &[usize], config: &ExactConfig) -> Result<f64> {
    model.check_node(node)?;
    let component = connected_component(model, node)?;
    let mut expected: Vec<usize> = component.iter().copied().filter(|&u| u != node).collect();
    let mut given = order.to_vec();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(Error::InvalidParameter("order must cover the query's component minus the query".into()));
    }
    eliminate_in_order(model, node, &component, order, config)
}

fn eliminate_in_order(
    model: &IsingModel,
    node: usize,
    component: &[usize],
    order: &[usize],
    config: &ExactConfig,
) -> Result<f64> {
    let factors = run_elimination(initial_factors(model, component), order, config.width_cap)?;
    let (mut minus, mut plus) = (0.0, 0.0);
    for f in &factors {
        match f.scope.as_slice() {
            [] => {}
            [u] if *u == node => {
                minus += f.table[0];
                plus += f.table[1];
            }
            _ => unreachable!("only the query survives elimination"),
        }
    }
    Ok(normalize(minus, plus))
}

/// `log Z` of the whole model.
pub fn log_partition(model: &IsingModel) -> Result<f64> {
    log_partition_with(model, &ExactConfig::default())
}

pub fn log_partition_with(model: &IsingModel, config: &ExactConfig) -> Result<f64> {
    let nodes: Vec<usize> = (0..model.n()).collect();
    let order = min_fill_order(model, &nodes, None);
    let factors = run_elimination(initial_factors(model, &nodes), &order, config.width_cap)?;
    Ok(factors.iter().map(|f| {
        debug_assert!(f.scope.is_empty());
        f.table[0]
    }).sum())
}

/// Exact `log Z` by enumeration; used to cross-check [`log_partition`].
pub fn brute_force_log_partition(model: &IsingModel) -> Result<f64> {
    let n = model.n();
    if n > ExactConfig::default().brute_force_cap {
        return Err(Error::ComponentTooLarge { node: 0, size: n, cap: ExactConfig::default().brute_force_cap });
    }
    let edges: Vec<_> = model.edges().collect();
    let spin = |x: u64, i: usize| if x >> i & 1 == 1 { 1.0 } else { -1.0 };
    let mut acc = LogSum::new();
    for x in 0..(1u64 << n) {
        let mut e: f64 = model.fields().iter().enumerate().map(|(i, h)| h * spin(x, i)).sum();
        for &(i, j, w) in &edges {
            e += w * spin(x, i) * spin(x, j);
        }
        acc.add(e);
    }
    Ok(if n == 0 { 0.0 } else { acc.value() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;

    fn sigma(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    fn grid(rows: usize, cols: usize, j: f64) -> IsingModel {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let u = r * cols + c;
                if c + 1 < cols {
                    edges.push((u, u + 1, j * (1.0 + 0.1 * (u % 7) as f64)));
                }
                if r + 1 < rows {
                    edges.push((u, u + cols, -j * (1.0 + 0.05 * (u % 5) as f64)));
                }
            }
        }
        let fields = (0..rows * cols).map(|u| 0.1 * ((u * 37 % 11) as f64 - 5.0)).collect();
        build_model(&edges, fields).unwrap()
    }

    #[test]
    fn isolated_nodes() {
        let m = build_model(&[], vec![0.0, 0.5]).unwrap();
        assert_eq!(brute_force_marginal(&m, 0).unwrap(), 0.5);
        let expect = 0.5f64.exp() / (0.5f64.exp() + (-0.5f64).exp());
        assert!((brute_force_marginal(&m, 1).unwrap() - expect).abs() < 1e-15);
        assert!((expect - sigma(1.0)).abs() < 1e-15);
        assert!((eliminate_marginal(&m, 1).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn three_chain_hand_enumeration() {
        let m = build_model(&[(0, 1, 0.3), (1, 2, 0.3)], vec![0.1, 0.0, -0.1]).unwrap();
        // Enumerate the 8 states by hand.
        let mut plus = 0.0;
        let mut total = 0.0;
        for x0 in [-1.0, 1.0] {
            for x1 in [-1.0, 1.0] {
                for x2 in [-1.0, 1.0] {
                    let w = f64::exp(0.3 * x0 * x1 + 0.3 * x1 * x2 + 0.1 * x0 - 0.1 * x2);
                    total += w;
                    if x1 > 0.0 {
                        plus += w;
                    }
                }
            }
        }
        let oracle = plus / total;
        let bf = brute_force_marginal(&m, 1).unwrap();
        let ve = eliminate_marginal(&m, 1).unwrap();
        assert!((bf - oracle).abs() < 1e-14);
        assert!((bf - ve).abs() < 1e-12);
    }

    #[test]
    fn brute_force_refuses_large_components() {
        let m = grid(5, 5, 0.1);
        let err = brute_force_marginal(&m, 0).unwrap_err();
        assert!(matches!(err, Error::ComponentTooLarge { size: 25, cap: 22, .. }));
    }

    #[test]
    fn width_cap_is_enforced() {
        let m = grid(10, 10, 0.1);
        let cfg = ExactConfig { brute_force_cap: 22, width_cap: 5 };
        assert!(matches!(eliminate_marginal_with(&m, 55, &cfg), Err(Error::WidthTooLarge { cap: 5, .. })));
    }

    #[test]
    fn ten_by_ten_grid_runs() {
        let m = grid(10, 10, 0.2);
        let p = eliminate_marginal(&m, 55).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn disconnected_node_does_not_matter() {
        let mut m = build_model(&[(0, 1, 0.4)], vec![0.2, -0.3, 0.0]).unwrap();
        let a = eliminate_marginal(&m, 0).unwrap();
        m.set_field(2, 5.0);
        assert_eq!(a, eliminate_marginal(&m, 0).unwrap());
    }

    #[test]
    fn log_partition_cases() {
        let m = build_model(&[], vec![0.0]).unwrap();
        assert!((log_partition(&m).unwrap() - 2f64.ln()).abs() < 1e-15);
        let h = 0.7;
        let m = build_model(&[], vec![h]).unwrap();
        assert!((log_partition(&m).unwrap() - (h.exp() + (-h).exp()).ln()).abs() < 1e-14);
        let j = 0.45;
        let m = build_model(&[(0, 1, j)], vec![0.0, 0.0]).unwrap();
        let four_states = (2.0 * j.exp() + 2.0 * (-j).exp()).ln();
        assert!((log_partition(&m).unwrap() - four_states).abs() < 1e-14);
        let hs = vec![0.3, -1.2, 2.0];
        let m = build_model(&[], hs.clone()).unwrap();
        let sum: f64 = hs.iter().map(|h: &f64| (h.exp() + (-h).exp()).ln()).sum();
        assert!((log_partition(&m).unwrap() - sum).abs() < 1e-13);
        let g = grid(3, 4, 0.3);
        assert!((log_partition(&g).unwrap() - brute_force_log_partition(&g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn large_parameters_do_not_overflow() {
        let m = build_model(&[(0, 1, 400.0), (1, 2, -350.0)], vec![500.0, 0.0, -20.0]).unwrap();
        let p = eliminate_marginal(&m, 2).unwrap();
        let q = brute_force_marginal(&m, 2).unwrap();
        assert!(p.is_finite() && (p - q).abs() < 1e-12);
        assert!(log_partition(&m).unwrap().is_finite());
    }

    #[test]
    fn factor_validation() {
        assert!(Factor::new(vec![0, 1], vec![0.0; 3]).is_err());
        assert!(Factor::new(vec![0, 0], vec![0.0; 4]).is_err());
        assert!(Factor::new(vec![3], vec![0.0, 1.0]).is_ok());
    }
}
