//! Sparse pairwise binary models, node-set partitions, and localized models.
//!
//! The joint distribution is `p(x) ∝ exp(Σ_{(i,j)} J_ij x_i x_j + Σ_i h_i x_i)`
//! over `x ∈ {-1, +1}^n`. Node ids are dense `0..n` and neighbor lists are kept
//! sorted so every traversal is deterministic.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{self, MeanFieldConfig};

/// Hop distance reported for nodes that cannot be reached.
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    adjacency: Vec<Vec<(usize, f64)>>,
    fields: Vec<f64>,
    num_edges: usize,
    max_degree: usize,
}

/// On-disk JSON layout: `{"n": int, "edges": [[u, v, J], ...], "h": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub h: Vec<f64>,
}

impl IsingModel {
    /// Builds a model with `fields.len()` nodes from an undirected edge list.
    pub fn new(fields: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = fields.len();
        for (i, h) in fields.iter().enumerate() {
            if !h.is_finite() {
                return Err(Error::NonFinite { what: format!("field of node {i}") });
            }
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for (index, &(u, v, j)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { index, u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop { index, u, v });
            }
            if !j.is_finite() {
                return Err(Error::NonFinite { what: format!("coupling of edge #{index} ({u}, {v})") });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge { index, u, v });
            }
            adjacency[u].push((v, j));
            adjacency[v].push((u, j));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(k, _)| k);
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { adjacency, fields, num_edges: edges.len(), max_degree })
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Neighbors of `i` with their couplings, ascending by neighbor id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        let list = self.adjacency.get(i)?;
        list.binary_search_by_key(&j, |&(k, _)| k).ok().map(|p| list[p].1)
    }

    /// Edges as `(i, j, J)` with `i < j`, ordered by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&(j, _)| j > i).map(move |&(j, w)| (i, j, w)))
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.n() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, n: self.n() })
        }
    }

    pub fn set_field(&mut self, i: usize, h: f64) {
        self.fields[i] = h;
    }

    /// Overwrites the coupling of an existing edge.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let mut hit = 0;
        for (a, b) in [(i, j), (j, i)] {
            self.check_node(a)?;
            if let Ok(p) = self.adjacency[a].binary_search_by_key(&b, |&(k, _)| k) {
                self.adjacency[a][p].1 = value;
                hit += 1;
            }
        }
        if hit == 2 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("({i}, {j}) is not an edge")))
        }
    }

    /// The model induced on `nodes`; node `nodes[p]` becomes local id `p`.
    pub fn induced(&self, nodes: &[usize]) -> Result<IsingModel> {
        let index = position_map(nodes)?;
        let mut edges = Vec::new();
        for (p, &u) in nodes.iter().enumerate() {
            self.check_node(u)?;
            for &(v, j) in self.neighbors(u) {
                if let Some(&q) = index.get(&v) {
                    if p < q {
                        edges.push((p, q, j));
                    }
                }
            }
        }
        let fields = nodes.iter().map(|&u| self.fields[u]).collect();
        IsingModel::new(fields, &edges)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile { n: self.n(), edges: self.edges().collect(), h: self.fields.clone() }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        if file.h.len() != file.n {
            return Err(Error::InvalidParameter(format!(
                "model declares n = {} but has {} fields",
                file.n,
                file.h.len()
            )));
        }
        IsingModel::new(file.h, &file.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Convenience wrapper around [`IsingModel::new`].
pub fn build_model(edges: &[(usize, usize, f64)], fields: Vec<f64>) -> Result<IsingModel> {
    IsingModel::new(fields, edges)
}

fn position_map(nodes: &[usize]) -> Result<HashMap<usize, usize>> {
    let mut index = HashMap::with_capacity(nodes.len());
    for (p, &u) in nodes.iter().enumerate() {
        if index.insert(u, p).is_some() {
            return Err(Error::DuplicateRegionNode { node: u });
        }
    }
    Ok(index)
}

/// Breadth-first hop distances from `source` to each target ([`UNREACHABLE`] if none).
///
/// The search stops as soon as every target has been reached, so the cost is
/// bounded by the ball that contains the farthest reachable target.
pub fn graph_distance(model: &IsingModel, source: usize, targets: &[usize]) -> Result<Vec<usize>> {
    model.check_node(source)?;
    for &t in targets {
        model.check_node(t)?;
    }
    let wanted: HashSet<usize> = targets.iter().copied().collect();
    let mut found: HashMap<usize, usize> = HashMap::new();
    let mut dist: HashMap<usize, usize> = HashMap::from([(source, 0)]);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if wanted.contains(&u) {
            found.insert(u, d);
            if found.len() == wanted.len() {
                break;
            }
        }
        for &(v, _) in model.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(targets.iter().map(|t| found.get(t).copied().unwrap_or(UNREACHABLE)).collect())
}

/// Minimum hop distance from `source` to any node of `set`.
pub fn distance_to_set(model: &IsingModel, source: usize, set: &[usize]) -> Result<usize> {
    Ok(graph_distance(model, source, set)?.into_iter().min().unwrap_or(UNREACHABLE))
}

/// Nodes within `radius` hops of `source`, ascending by id.
pub fn ball(model: &IsingModel, source: usize, radius: usize) -> Result<Vec<usize>> {
    model.check_node(source)?;
    let mut dist: HashMap<usize, usize> = HashMap::from([(source, 0)]);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == radius {
            continue;
        }
        for &(v, _) in model.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    let mut nodes: Vec<usize> = dist.into_keys().collect();
    nodes.sort_unstable();
    Ok(nodes)
}

/// The connected component containing `node`, ascending by id.
pub fn connected_component(model: &IsingModel, node: usize) -> Result<Vec<usize>> {
    ball(model, node, UNREACHABLE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossEdge {
    /// Endpoint inside the region (a member of ∂α).
    pub inner: usize,
    /// Endpoint outside the region (a member of ∂β).
    pub outer: usize,
    pub coupling: f64,
}

/// A query node together with a local node set `alpha` and its boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    query: usize,
    alpha: Vec<usize>,
    index: HashMap<usize, usize>,
    boundary_alpha: Vec<usize>,
    boundary_beta: Vec<usize>,
    cross_edges: Vec<CrossEdge>,
}

impl Region {
    pub fn query(&self) -> usize {
        self.query
    }

    /// Region nodes in insertion order.
    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.index.contains_key(&node)
    }

    /// Position of `node` within [`Region::alpha`].
    pub fn position(&self, node: usize) -> Option<usize> {
        self.index.get(&node).copied()
    }

    pub fn query_position(&self) -> usize {
        self.index[&self.query]
    }

    /// ∂α: region nodes with at least one neighbor outside, ascending.
    pub fn boundary_alpha(&self) -> &[usize] {
        &self.boundary_alpha
    }

    /// ∂β: outside nodes with at least one neighbor inside, ascending.
    pub fn boundary_beta(&self) -> &[usize] {
        &self.boundary_beta
    }

    /// Edges with one endpoint in the region, ordered by `(inner, outer)`.
    pub fn cross_edges(&self) -> &[CrossEdge] {
        &self.cross_edges
    }

    /// The region grown by one outside node, appended last.
    pub fn extended(&self, model: &IsingModel, node: usize) -> Result<Region> {
        let mut alpha = self.alpha.clone();
        alpha.push(node);
        make_region(model, &alpha, self.query)
    }
}

pub fn make_region(model: &IsingModel, alpha: &[usize], query: usize) -> Result<Region> {
    for &u in alpha {
        model.check_node(u)?;
    }
    let index = position_map(alpha)?;
    if !index.contains_key(&query) {
        return Err(Error::QueryNotInRegion { query });
    }
    let mut boundary_alpha = Vec::new();
    let mut outer = HashSet::new();
    let mut cross_edges = Vec::new();
    for &u in alpha {
        let mut on_boundary = false;
        for &(v, j) in model.neighbors(u) {
            if !index.contains_key(&v) {
                on_boundary = true;
                outer.insert(v);
                cross_edges.push(CrossEdge { inner: u, outer: v, coupling: j });
            }
        }
        if on_boundary {
            boundary_alpha.push(u);
        }
    }
    boundary_alpha.sort_unstable();
    let mut boundary_beta: Vec<usize> = outer.into_iter().collect();
    boundary_beta.sort_unstable();
    cross_edges.sort_by_key(|e| (e.inner, e.outer));
    Ok(Region { query, alpha: alpha.to_vec(), index, boundary_alpha, boundary_beta, cross_edges })
}

/// How the potentials on cross edges are replaced when decoupling the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryMethod {
    /// Delete cross edges outright; fields are unchanged.
    #[serde(rename = "drop")]
    DropOut,
    /// Delete cross edges and shift ∂α fields by the mean-field means across the cut.
    #[serde(rename = "mf")]
    MeanField,
}

impl fmt::Display for BoundaryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMethod::DropOut => "drop",
            BoundaryMethod::MeanField => "mf",
        })
    }
}

impl FromStr for BoundaryMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "drop" | "dropout" | "drop-out" => Ok(BoundaryMethod::DropOut),
            "mf" | "meanfield" | "mean-field" => Ok(BoundaryMethod::MeanField),
            other => Err(format!("unknown boundary method '{other}' (expected drop or mf)")),
        }
    }
}

/// The decoupled approximation restricted to a region.
///
/// `local` is an ordinary [`IsingModel`] over positions `0..alpha.len()`
/// holding the original couplings inside the region and the (possibly
/// adjusted) fields `h̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedModel {
    alpha: Vec<usize>,
    query_index: usize,
    local: IsingModel,
    method: BoundaryMethod,
}

impl LocalizedModel {
    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn query_index(&self) -> usize {
        self.query_index
    }

    pub fn local(&self) -> &IsingModel {
        &self.local
    }

    pub fn method(&self) -> BoundaryMethod {
        self.method
    }

    /// Adjusted fields `h̃`, aligned with [`LocalizedModel::alpha`].
    pub fn h_tilde(&self) -> &[f64] {
        self.local.fields()
    }
}

pub fn localize(
    model: &IsingModel,
    region: &Region,
    method: BoundaryMethod,
    mf: &MeanFieldConfig,
) -> Result<LocalizedModel> {
    let mut local = model.induced(region.alpha())?;
    if method == BoundaryMethod::MeanField && !region.cross_edges().is_empty() {
        let means: HashMap<usize, f64> = meanfield::boundary_mean_field(model, region, mf)?.into_iter().collect();
        for e in region.cross_edges() {
            let p = region.position(e.inner).expect("cross edge inner endpoint lies in the region");
            let h = local.field(p) + e.coupling * means[&e.outer];
            local.set_field(p, h);
        }
    }
    Ok(LocalizedModel { alpha: region.alpha().to_vec(), query_index: region.query_position(), local, method })
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One row of an edge-list file: `u<TAB>v[<TAB>J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub coupling: Option<f64>,
}

pub fn read_edge_tsv(path: &Path) -> Result<Vec<EdgeRecord>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (line, l) in data_lines(&text) {
        let parts = split_fields(l);
        let err = |msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        match parts.as_slice() {
            [u, v] => out.push(EdgeRecord { u: u.to_string(), v: v.to_string(), coupling: None }),
            [u, v, j] => {
                let j: f64 = j.parse().map_err(|_| err(format!("bad coupling '{j}'")))?;
                out.push(EdgeRecord { u: u.to_string(), v: v.to_string(), coupling: Some(j) });
            }
            _ => return Err(err(format!("expected 2 or 3 columns, found {}", parts.len()))),
        }
    }
    Ok(out)
}

pub fn read_label_tsv(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (line, l) in data_lines(&text) {
        match split_fields(l).as_slice() {
            [node, label] => out.push((node.to_string(), label.to_string())),
            parts => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("expected 2 columns, found {}", parts.len()),
                })
            }
        }
    }
    Ok(out)
}

/// Reads an integer-id edge list into a model. Rows without a coupling get
/// one from `default_coupling`, called in file order.
pub fn model_from_edge_tsv(
    path: &Path,
    fields: Vec<f64>,
    mut default_coupling: impl FnMut() -> f64,
) -> Result<IsingModel> {
    let records = read_edge_tsv(path)?;
    let mut edges = Vec::with_capacity(records.len());
    for (k, r) in records.iter().enumerate() {
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Data(format!("edge #{k}: node id '{s}' is not an integer")))
        };
        let j = r.coupling.unwrap_or_else(&mut default_coupling);
        edges.push((parse(&r.u)?, parse(&r.v)?, j));
    }
    IsingModel::new(fields, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn grid(rows: usize, cols: usize, j: f64, h: f64) -> IsingModel {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let u = r * cols + c;
                if c + 1 < cols {
                    edges.push((u, u + 1, j));
                }
                if r + 1 < rows {
                    edges.push((u, u + cols, j));
                }
            }
        }
        IsingModel::new(vec![h; rows * cols], &edges).unwrap()
    }

    fn chain3() -> IsingModel {
        IsingModel::new(vec![0.0, 0.0, 1.0], &[(0, 1, 0.3), (1, 2, 0.5)]).unwrap()
    }

    #[test]
    fn single_isolated_node() {
        let m = build_model(&[], vec![0.3]).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.max_degree(), 0);
        assert_eq!(m.num_edges(), 0);
    }

    #[test]
    fn two_chain_is_symmetric() {
        let m = build_model(&[(0, 1, 0.25)], vec![0.0, 0.0]).unwrap();
        assert_eq!(m.neighbors(0), &[(1, 0.25)]);
        assert_eq!(m.neighbors(1), &[(0, 0.25)]);
        assert_eq!(m.coupling(1, 0), Some(0.25));
        assert_eq!(m.max_degree(), 1);
    }

    #[test]
    fn ten_by_ten_grid_edge_count() {
        let m = grid(10, 10, 0.1, 0.0);
        assert_eq!(m.n(), 100);
        assert_eq!(m.num_edges(), 180);
        assert_eq!(m.max_degree(), 4);
    }

    #[test]
    fn construction_errors_name_the_entry() {
        let e = build_model(&[(0, 0, 1.0)], vec![0.0]).unwrap_err();
        assert!(matches!(e, Error::SelfLoop { index: 0, .. }));
        let e = build_model(&[(0, 1, 1.0), (1, 0, 2.0)], vec![0.0; 2]).unwrap_err();
        assert!(matches!(e, Error::DuplicateEdge { index: 1, .. }));
        let e = build_model(&[(0, 5, 1.0)], vec![0.0; 2]).unwrap_err();
        assert!(matches!(e, Error::EdgeOutOfRange { index: 0, v: 5, .. }));
        assert!(e.to_string().contains("(0, 5)"));
    }

    #[test]
    fn distances() {
        let m = chain3();
        assert_eq!(graph_distance(&m, 1, &[1]).unwrap(), vec![0]);
        assert_eq!(graph_distance(&m, 0, &[2]).unwrap(), vec![2]);
        let iso = build_model(&[(0, 1, 1.0)], vec![0.0; 3]).unwrap();
        assert_eq!(graph_distance(&iso, 0, &[1, 2]).unwrap(), vec![1, UNREACHABLE]);

        // Centre node 44 of a 10×10 lattice: row 0 is 4 hops away, row 9 is 5.
        let g = grid(10, 10, 0.1, 0.0);
        let ring: Vec<usize> = (0..100).filter(|&u| u / 10 == 0 || u / 10 == 9 || u % 10 == 0 || u % 10 == 9).collect();
        let brute = ring.iter().map(|&u| (u / 10).abs_diff(4) + (u % 10).abs_diff(4)).min().unwrap();
        assert_eq!(distance_to_set(&g, 44, &ring).unwrap(), brute);
        assert_eq!(brute, 4);
        let far: Vec<usize> = (90..100).collect();
        assert_eq!(distance_to_set(&g, 44, &far).unwrap(), 5);
    }

    #[test]
    fn region_whole_graph_has_no_boundary() {
        let m = chain3();
        let r = make_region(&m, &[0, 1, 2], 1).unwrap();
        assert!(r.boundary_alpha().is_empty());
        assert!(r.boundary_beta().is_empty());
        assert!(r.cross_edges().is_empty());
    }

    #[test]
    fn region_on_chain() {
        let m = chain3();
        let r = make_region(&m, &[0], 0).unwrap();
        assert_eq!(r.boundary_alpha(), &[0]);
        assert_eq!(r.boundary_beta(), &[1]);
        assert_eq!(r.cross_edges(), &[CrossEdge { inner: 0, outer: 1, coupling: 0.3 }]);
        assert!(matches!(make_region(&m, &[0], 2), Err(Error::QueryNotInRegion { query: 2 })));
    }

    #[test]
    fn region_corner_block_of_3x3() {
        let m = grid(3, 3, 0.2, 0.0);
        let alpha = [0, 1, 3, 4];
        let r = make_region(&m, &alpha, 0).unwrap();
        // Enumerate lattice edges with exactly one endpoint in the block.
        let inside: HashSet<usize> = alpha.iter().copied().collect();
        let cross: Vec<_> = m.edges().filter(|&(a, b, _)| inside.contains(&a) != inside.contains(&b)).collect();
        assert_eq!(cross.len(), 4);
        assert_eq!(r.cross_edges().len(), 4);
        assert_eq!(r.boundary_alpha(), &[1, 3, 4]);
        assert_eq!(r.boundary_beta(), &[2, 5, 6, 7]);
    }

    #[test]
    fn dropout_keeps_fields() {
        let m = chain3();
        let r = make_region(&m, &[0, 1], 0).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::DropOut, &MeanFieldConfig::default()).unwrap();
        assert_eq!(loc.h_tilde(), &[0.0, 0.0]);
        assert_eq!(loc.local().num_edges(), 1);
        assert_eq!(loc.local().coupling(0, 1), Some(0.3));
    }

    #[test]
    fn mean_field_with_zero_cross_couplings_keeps_fields() {
        let m = IsingModel::new(vec![0.1, -0.2, 1.0], &[(0, 1, 0.3), (1, 2, 0.0)]).unwrap();
        let r = make_region(&m, &[0, 1], 0).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::MeanField, &MeanFieldConfig::default()).unwrap();
        assert_eq!(loc.h_tilde(), &[0.1, -0.2]);
    }

    #[test]
    fn mean_field_shift_on_chain() {
        // Boundary subproblem: m1 = tanh(h1 + J m2), m2 = tanh(h2 + J m1) with h1 = 0,
        // h2 = 1, J = 0.5. Solve the scalar equation g(m2) = m2 - tanh(1 + 0.5 tanh(0.5 m2))
        // by bisection as an independent oracle.
        let g = |m2: f64| m2 - (1.0 + 0.5 * (0.5 * m2).tanh()).tanh();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let m2 = 0.5 * (lo + hi);
        let m = chain3();
        let r = make_region(&m, &[0, 1], 0).unwrap();
        let loc = localize(&m, &r, BoundaryMethod::MeanField, &MeanFieldConfig::default()).unwrap();
        assert!((loc.h_tilde()[1] - 0.5 * m2).abs() < 1e-7, "{} vs {}", loc.h_tilde()[1], 0.5 * m2);
        assert_eq!(loc.h_tilde()[0], 0.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = IsingModel::new(
            vec![0.1 + 0.2, -1.0 / 3.0, std::f64::consts::PI],
            &[(0, 1, 1e-300), (2, 1, -0.123_456_789_012_345_67)],
        )
        .unwrap();
        let back = IsingModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        for (a, b) in m.fields().iter().zip(back.fields()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn tsv_parsing_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.tsv");
        fs::write(&p, "# comment\n0\t1\t0.5\n1\t2\n2\t3\tx\n").unwrap();
        let err = read_edge_tsv(&p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        fs::write(&p, "0\t1\t0.5\n1\t2\n").unwrap();
        let m = model_from_edge_tsv(&p, vec![0.0; 3], || 0.25).unwrap();
        assert_eq!(m.coupling(1, 2), Some(0.25));
        assert_eq!(m.coupling(0, 1), Some(0.5));
    }
}
