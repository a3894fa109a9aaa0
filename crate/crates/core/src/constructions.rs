//! Space-building devices: gluing, max-products, tree spaces and graph spaces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{validate_metric, FiniteMetricSpace, MetricError};
use crate::rational::{cmp_len_lex, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("gluing distance must be positive, got {0}")]
    NonpositiveGlueDistance(Rational),
    #[error("gluing point {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid tree data: {0}")]
    InvalidTreeData(TreeViolation),
    #[error("graph distances need 0 < r < rp <= 2r, got r = {r}, rp = {rp}")]
    BadDistancePair { r: Rational, rp: Rational },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// `X ⊕_r Y`: the disjoint union with `d(x, y) = max(d(x, xbar), d(y, ybar), r)`.
///
/// Points of `X` come first, then points of `Y`.
pub fn glue(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    r: &Rational,
    xbar: usize,
    ybar: usize,
) -> Result<FiniteMetricSpace, ConstructionError> {
    if !r.is_positive() {
        return Err(ConstructionError::NonpositiveGlueDistance(r.clone()));
    }
    for (index, len) in [(xbar, x.len()), (ybar, y.len())] {
        if index >= len {
            return Err(ConstructionError::IndexOutOfRange { index, len });
        }
    }
    let (n, m) = (x.len(), y.len());
    let cross = |i: usize, j: usize| -> Rational {
        Rational::max_of(Rational::max_of(x.d(i, xbar), y.d(j, ybar)), r).clone()
    };
    let mut dist = vec![vec![Rational::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = x.d(i, j).clone();
        }
        for j in 0..m {
            dist[i][n + j] = cross(i, j);
            dist[n + j][i] = cross(i, j);
        }
    }
    for i in 0..m {
        for j in 0..m {
            dist[n + i][n + j] = y.d(i, j).clone();
        }
    }
    Ok(validate_metric(dist)?)
}

/// Max metric on `X × Z`; the pair `(i, j)` is point `i·|Z| + j`.
pub fn max_product(x: &FiniteMetricSpace, z: &FiniteMetricSpace) -> FiniteMetricSpace {
    let (n, m) = (x.len(), z.len());
    let dist = (0..n * m)
        .map(|a| {
            (0..n * m)
                .map(|b| Rational::max_of(x.d(a / m, b / m), z.d(a % m, b % m)).clone())
                .collect()
        })
        .collect();
    validate_metric(dist).expect("max of two metrics is a metric")
}

/// The first violated clause of the finite tree-suitability conditions.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "clause")]
pub enum TreeViolation {
    #[error("r_seq and rp_seq differ in length ({r} vs {rp})")]
    LengthMismatch { r: usize, rp: usize },
    #[error("sequence length {len} must exceed the tree depth {depth}")]
    TooShort { len: usize, depth: usize },
    #[error("x must be positive")]
    XNotPositive,
    #[error("r_{n} must be positive")]
    RNotPositive { n: usize },
    #[error("r_seq not strictly decreasing at {n}")]
    RNotDecreasing { n: usize },
    #[error("rp_seq not strictly monotone at {n}")]
    RpNotMonotone { n: usize },
    #[error("r_0 must be below min(x, r'_0)")]
    R0NotBelowMin,
    #[error("|r'_{n} - x| must be below r_{n}")]
    GapTooWide { n: usize },
    #[error("r'_{n} equals x")]
    RpEqualsX { n: usize },
    #[error("tree is empty")]
    EmptyTree,
    #[error("node {node:?} has no parent in the tree")]
    NotPrefixClosed { node: Vec<u32> },
    #[error("node {node:?} listed twice")]
    DuplicateNode { node: Vec<u32> },
}

/// Outcome of [`check_tree_suitable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuitabilityReport {
    pub suitable: bool,
    pub violation: Option<TreeViolation>,
}

impl SuitabilityReport {
    fn from(res: Result<(), TreeViolation>) -> Self {
        match res {
            Ok(()) => SuitabilityReport {
                suitable: true,
                violation: None,
            },
            Err(v) => SuitabilityReport {
                suitable: false,
                violation: Some(v),
            },
        }
    }
}

fn suitability(r: &[Rational], rp: &[Rational], x: &Rational, depth: usize) -> Result<(), TreeViolation> {
    if r.len() != rp.len() {
        return Err(TreeViolation::LengthMismatch {
            r: r.len(),
            rp: rp.len(),
        });
    }
    if r.len() <= depth {
        return Err(TreeViolation::TooShort { len: r.len(), depth });
    }
    if !x.is_positive() {
        return Err(TreeViolation::XNotPositive);
    }
    if let Some(n) = r.iter().position(|v| !v.is_positive()) {
        return Err(TreeViolation::RNotPositive { n });
    }
    if let Some(n) = r.windows(2).position(|w| w[1] >= w[0]) {
        return Err(TreeViolation::RNotDecreasing { n: n + 1 });
    }
    let increasing = rp.len() < 2 || rp[1] > rp[0];
    let monotone_break = rp
        .windows(2)
        .position(|w| if increasing { w[1] <= w[0] } else { w[1] >= w[0] });
    if let Some(n) = monotone_break {
        return Err(TreeViolation::RpNotMonotone { n: n + 1 });
    }
    if r[0] >= *x || r[0] >= rp[0] {
        return Err(TreeViolation::R0NotBelowMin);
    }
    for n in 0..r.len() {
        if (&rp[n] - x).abs() >= r[n] {
            return Err(TreeViolation::GapTooWide { n });
        }
        if rp[n] == *x {
            return Err(TreeViolation::RpEqualsX { n });
        }
    }
    Ok(())
}

/// Finite tree-suitability: equal lengths above `depth`, `r` positive and
/// strictly decreasing, `rp` strictly monotone, `r_0 < min(x, r'_0)`, and
/// `0 < |r'_n - x| < r_n`.
pub fn check_tree_suitable(r_seq: &[Rational], rp_seq: &[Rational], x: &Rational, depth: usize) -> SuitabilityReport {
    SuitabilityReport::from(suitability(r_seq, rp_seq, x, depth))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeData {
    pub nodes: Vec<Vec<u32>>,
    pub r_seq: Vec<Rational>,
    pub rp_seq: Vec<Rational>,
    pub x: Rational,
}

impl TreeData {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Nodes in (length, lexicographic) order: the point order of the tree space.
    pub fn sorted_nodes(&self) -> Vec<Vec<u32>> {
        let mut nodes = self.nodes.clone();
        nodes.sort_by(|a, b| cmp_len_lex(a, b));
        nodes
    }

    pub fn validate(&self) -> Result<(), TreeViolation> {
        if self.nodes.is_empty() {
            return Err(TreeViolation::EmptyTree);
        }
        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if !seen.insert(node.as_slice()) {
                return Err(TreeViolation::DuplicateNode { node: node.clone() });
            }
        }
        for node in self.sorted_nodes() {
            if let Some((_, parent)) = node.split_last() {
                if !seen.contains(parent) {
                    return Err(TreeViolation::NotPrefixClosed { node });
                }
            }
        }
        suitability(&self.r_seq, &self.rp_seq, &self.x, self.depth())
    }
}

fn common_prefix(s: &[u32], t: &[u32]) -> usize {
    s.iter().zip(t).take_while(|(a, b)| a == b).count()
}

/// Tree nodes in (length, lex) order followed by the extra point `*`.
///
/// `d(s, t) = r_n` with `n` the length of the longest common prefix, and
/// `d(s, *) = r'_{|s|}`.
pub fn tree_space(data: &TreeData) -> Result<FiniteMetricSpace, ConstructionError> {
    data.validate().map_err(ConstructionError::InvalidTreeData)?;
    let nodes = data.sorted_nodes();
    let n = nodes.len();
    let mut dist = vec![vec![Rational::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i][j] = data.r_seq[common_prefix(&nodes[i], &nodes[j])].clone();
            }
        }
        dist[i][n] = data.rp_seq[nodes[i].len()].clone();
        dist[n][i] = dist[i][n].clone();
    }
    Ok(validate_metric(dist)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge ({0},{1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0},{1}) mentions a vertex out of range")]
    VertexOutOfRange(usize, usize),
}

/// Finite simple graph. Edges are stored as `(i, j)` with `i < j`, sorted and
/// deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        Graph::new(raw.n, raw.edges)
    }
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, vec![]).expect("n >= 1")
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n]; self.n];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    /// Every labeled graph on `n` vertices, ordered by edge bitmask.
    pub fn all_on(n: usize) -> Vec<Graph> {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (0u64..1 << slots.len())
            .map(|mask| {
                let edges = slots
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                Graph::new(n, edges).expect("slots are valid edges")
            })
            .collect()
    }
}

/// Edges at distance `r`, non-edges at `rp`.
pub fn graph_space(g: &Graph, r: &Rational, rp: &Rational) -> Result<FiniteMetricSpace, ConstructionError> {
    let twice = r + r;
    if !(r.is_positive() && r < rp && *rp <= twice) {
        return Err(ConstructionError::BadDistancePair {
            r: r.clone(),
            rp: rp.clone(),
        });
    }
    let adj = g.adjacency();
    let dist = (0..g.n)
        .map(|i| {
            (0..g.n)
                .map(|j| match (i == j, adj[i][j]) {
                    (true, _) => Rational::zero(),
                    (false, true) => r.clone(),
                    (false, false) => rp.clone(),
                })
                .collect()
        })
        .collect();
    Ok(validate_metric(dist)?)
}

/// Edge `(i, j)` exactly when `d(i, j) = r`.
pub fn space_to_graph(x: &FiniteMetricSpace, r: &Rational) -> Graph {
    let edges = (0..x.len())
        .flat_map(|i| (i + 1..x.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| x.d(i, j) == r)
        .collect();
    Graph::new(x.len(), edges).expect("indices in range")
}
