#![allow(dead_code)]

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use distset_core::constructions::{Graph, TreeData};
use distset_core::metric::{validate_metric, FiniteMetricSpace};
use distset_core::rational::{int, q, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random metric with rational entries: random positive weights closed under
/// shortest paths.
pub fn random_rational_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = q(rng.gen_range(1..=24), rng.gen_range(1..=6));
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    validate_metric(d).expect("shortest-path closure is a metric")
}

/// Random space whose nonzero distances come from `values`, by rejection.
pub fn random_space_over(rng: &mut ChaCha8Rng, n: usize, values: &[i64]) -> FiniteMetricSpace {
    loop {
        let mut d = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = int(*values.choose(rng).unwrap());
                d[i][j] = v.clone();
                d[j][i] = v;
            }
        }
        if let Ok(x) = validate_metric(d) {
            return x;
        }
    }
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Either an unrelated random space or a relabeled copy of `x`, so both
/// verdicts occur often.
pub fn partner_over(rng: &mut ChaCha8Rng, x: &FiniteMetricSpace, values: &[i64], max_n: usize) -> FiniteMetricSpace {
    match rng.gen_range(0..3) {
        0 => x.permuted(&random_permutation(rng, x.len())).unwrap(),
        1 => {
            let n = x.len();
            random_space_over(rng, n, values)
        }
        _ => {
            let n = rng.gen_range(1..=max_n);
            random_space_over(rng, n, values)
        }
    }
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let edges = (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    Graph::new(n, edges).unwrap()
}

fn preserves(x: &FiniteMetricSpace, y: &FiniteMetricSpace, map: &[usize]) -> bool {
    (0..x.len()).all(|i| (0..x.len()).all(|j| x.d(i, j) == y.d(map[i], map[j])))
}

/// Every isometry, by enumerating all permutations.
pub fn brute_isometries(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<Vec<usize>> {
    if x.len() != y.len() {
        return vec![];
    }
    (0..y.len())
        .permutations(x.len())
        .filter(|p| preserves(x, y, p))
        .collect()
}

/// Every isometric embedding, by enumerating all injections.
pub fn brute_embeddings(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<Vec<usize>> {
    (0..y.len())
        .permutations(x.len())
        .filter(|p| preserves(x, y, p))
        .collect()
}

pub fn brute_isometric(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    !brute_isometries(x, y).is_empty()
}

pub fn brute_embeds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
    x.len() <= y.len() && !brute_embeddings(x, y).is_empty()
}

fn graph_preserves(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    let (a, b) = (g.adjacency(), h.adjacency());
    (0..g.n).all(|i| (0..g.n).all(|j| a[i][j] == b[map[i]][map[j]]))
}

pub fn brute_graph_iso(g: &Graph, h: &Graph) -> bool {
    g.n == h.n && (0..h.n).permutations(g.n).any(|p| graph_preserves(g, h, &p))
}

/// Induced-subgraph embedding by brute force.
pub fn brute_graph_embed(g: &Graph, h: &Graph) -> bool {
    g.n <= h.n && (0..h.n).permutations(g.n).any(|p| graph_preserves(g, h, &p))
}

/// Random prefix-closed tree of depth at most `max_depth`.
pub fn random_tree(rng: &mut ChaCha8Rng, max_depth: usize) -> Vec<Vec<u32>> {
    let mut nodes = vec![vec![]];
    let mut frontier = vec![vec![]];
    while let Some(node) = frontier.pop() {
        if node.len() >= max_depth {
            continue;
        }
        for c in 0..rng.gen_range(0..=3u32) {
            let mut child: Vec<u32> = node.clone();
            child.push(c);
            nodes.push(child.clone());
            frontier.push(child);
        }
    }
    nodes.shuffle(rng);
    nodes
}

/// Random suitable data for a tree, with `r'` approaching `x` from above or
/// below.
pub fn random_tree_data(rng: &mut ChaCha8Rng, max_depth: usize) -> TreeData {
    let nodes = random_tree(rng, max_depth);
    let depth = nodes.iter().map(Vec::len).max().unwrap();
    let len = depth + 1 + rng.gen_range(0..2);
    let x = q(rng.gen_range(2..=12), rng.gen_range(1..=4));
    // r_0 < x / 2, then strictly decreasing.
    let mut r = vec![&x * q(rng.gen_range(1..=9), 20)];
    for _ in 1..len {
        let prev = r.last().unwrap().clone();
        r.push(prev * q(rng.gen_range(1..=9), 10));
    }
    let c = q(rng.gen_range(1..=9), 10);
    let from_above = rng.gen_bool(0.5);
    let rp = r
        .iter()
        .map(|rn| if from_above { &x + rn * &c } else { &x - rn * &c })
        .collect();
    TreeData { nodes, r_seq: r, rp_seq: rp, x }
}
