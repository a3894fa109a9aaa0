//! Brute-force isometry, embedding and graph oracles.
//!
//! All searches assign domain points in index order and try codomain points
//! in index order, so the first witness found is the lexicographically least
//! one. Distance-multiset signatures only prune candidates.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constructions::Graph;
use crate::metric::FiniteMetricSpace;
use crate::rational::Rational;

pub const DEFAULT_MAX_POINTS: usize = 12;
pub const MAX_POINTS_ENV: &str = "DISTSET_MAX_POINTS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {size} points, above the search limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// Size guardrail for the factorial searches. Applies to the domain side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_points: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

impl SearchLimits {
    /// Default limit, overridden by `DISTSET_MAX_POINTS` when it parses.
    pub fn from_env() -> Self {
        std::env::var(MAX_POINTS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map_or_else(SearchLimits::default, |max_points| SearchLimits { max_points })
    }

    fn check(&self, size: usize) -> Result<(), OracleError> {
        if size > self.max_points {
            Err(OracleError::TooLarge {
                size,
                limit: self.max_points,
            })
        } else {
            Ok(())
        }
    }
}

/// Partial injection `0..n -> 0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMap {
    n: usize,
    m: usize,
    assignment: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl PartialMap {
    pub fn empty(n: usize, m: usize) -> Self {
        PartialMap {
            n,
            m,
            assignment: vec![None; n],
            used: vec![false; m],
        }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn codomain_size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.assignment[i]
    }

    pub fn is_used(&self, j: usize) -> bool {
        self.used[j]
    }

    /// Returns false (and changes nothing) if `i` is assigned or `j` taken.
    pub fn assign(&mut self, i: usize, j: usize) -> bool {
        if self.assignment[i].is_some() || self.used[j] {
            return false;
        }
        self.assignment[i] = Some(j);
        self.used[j] = true;
        true
    }

    pub fn unassign(&mut self, i: usize) {
        if let Some(j) = self.assignment[i].take() {
            self.used[j] = false;
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, j)| j.map(|j| (i, j)))
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Whether the assigned pairs preserve every distance among them.
    pub fn preserves(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> bool {
        let pairs: Vec<_> = self.pairs().collect();
        pairs
            .iter()
            .all(|&(a, fa)| pairs.iter().all(|&(b, fb)| x.d(a, b) == y.d(fa, fb)))
    }

    pub fn into_total(self) -> Option<Vec<usize>> {
        self.assignment.into_iter().collect()
    }
}

/// Matrices over small integer labels; label 0 is reserved for the diagonal.
struct Labeled {
    a: Vec<Vec<u32>>,
    b: Vec<Vec<u32>>,
}

fn intern(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Labeled {
    let mut ids: BTreeMap<&Rational, u32> = BTreeMap::new();
    for r in x.matrix().iter().chain(y.matrix()).flatten() {
        let next = ids.len() as u32;
        ids.entry(r).or_insert(next);
    }
    // 0 is the smallest distance, so it received id 0.
    let label = |s: &FiniteMetricSpace| -> Vec<Vec<u32>> {
        s.matrix().iter().map(|row| row.iter().map(|r| ids[r]).collect()).collect()
    };
    Labeled {
        a: label(x),
        b: label(y),
    }
}

fn graph_labels(g: &Graph) -> Vec<Vec<u32>> {
    let adj = g.adjacency();
    (0..g.n)
        .map(|i| {
            (0..g.n)
                .map(|j| match (i == j, adj[i][j]) {
                    (true, _) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                })
                .collect()
        })
        .collect()
}

fn signatures(m: &[Vec<u32>]) -> Vec<Vec<u32>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut s: Vec<u32> = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Sorted-multiset inclusion.
fn sub_multiset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    small.iter().all(|v| it.by_ref().any(|w| w == v))
}

fn search(inst: &Labeled, bijective: bool) -> Option<Vec<usize>> {
    let n = inst.a.len();
    let m = inst.b.len();
    if n > m || (bijective && n != m) {
        return None;
    }
    let sa = signatures(&inst.a);
    let sb = signatures(&inst.b);
    if bijective {
        let mut all_a: Vec<&Vec<u32>> = sa.iter().collect();
        let mut all_b: Vec<&Vec<u32>> = sb.iter().collect();
        all_a.sort();
        all_b.sort();
        if all_a != all_b {
            return None;
        }
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..m)
                .filter(|&j| if bijective { sa[i] == sb[j] } else { sub_multiset(&sa[i], &sb[j]) })
                .collect()
        })
        .collect();
    let mut map = PartialMap::empty(n, m);
    let mut image = Vec::with_capacity(n);
    if extend(inst, &candidates, &mut map, &mut image) {
        map.into_total()
    } else {
        None
    }
}

fn extend(inst: &Labeled, candidates: &[Vec<usize>], map: &mut PartialMap, image: &mut Vec<usize>) -> bool {
    let i = image.len();
    if i == candidates.len() {
        return true;
    }
    for &j in &candidates[i] {
        if map.is_used(j) {
            continue;
        }
        let consistent = image
            .iter()
            .enumerate()
            .all(|(k, &fk)| inst.a[i][k] == inst.b[j][fk]);
        if !consistent {
            continue;
        }
        map.assign(i, j);
        image.push(j);
        if extend(inst, candidates, map, image) {
            return true;
        }
        image.pop();
        map.unassign(i);
    }
    false
}

/// Lex-least isometry `X -> Y` as the image of each point, if any.
pub fn find_isometry(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    limits: &SearchLimits,
) -> Result<Option<Vec<usize>>, OracleError> {
    limits.check(x.len())?;
    Ok(search(&intern(x, y), true))
}

/// Lex-least isometric embedding `X -> Y`, if any.
pub fn find_embedding(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    limits: &SearchLimits,
) -> Result<Option<Vec<usize>>, OracleError> {
    limits.check(x.len())?;
    Ok(search(&intern(x, y), false))
}

pub fn graph_iso(g: &Graph, h: &Graph, limits: &SearchLimits) -> Result<Option<Vec<usize>>, OracleError> {
    limits.check(g.n)?;
    Ok(search(
        &Labeled {
            a: graph_labels(g),
            b: graph_labels(h),
        },
        true,
    ))
}

/// Induced-subgraph embedding: edges and non-edges are both preserved.
pub fn graph_embed(g: &Graph, h: &Graph, limits: &SearchLimits) -> Result<Option<Vec<usize>>, OracleError> {
    limits.check(g.n)?;
    Ok(search(
        &Labeled {
            a: graph_labels(g),
            b: graph_labels(h),
        },
        false,
    ))
}

/// A binary relation decided by one of the oracles.
pub trait Relation<T: ?Sized>: Sync {
    fn holds(&self, a: &T, b: &T) -> Result<bool, OracleError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Isometric(pub SearchLimits);

#[derive(Debug, Clone, Copy, Default)]
pub struct Embeds(pub SearchLimits);

#[derive(Debug, Clone, Copy, Default)]
pub struct GraphIsomorphic(pub SearchLimits);

#[derive(Debug, Clone, Copy, Default)]
pub struct GraphEmbeds(pub SearchLimits);

impl Relation<FiniteMetricSpace> for Isometric {
    fn holds(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<bool, OracleError> {
        Ok(find_isometry(a, b, &self.0)?.is_some())
    }
}

impl Relation<FiniteMetricSpace> for Embeds {
    fn holds(&self, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<bool, OracleError> {
        Ok(find_embedding(a, b, &self.0)?.is_some())
    }
}

impl Relation<Graph> for GraphIsomorphic {
    fn holds(&self, a: &Graph, b: &Graph) -> Result<bool, OracleError> {
        Ok(graph_iso(a, b, &self.0)?.is_some())
    }
}

impl Relation<Graph> for GraphEmbeds {
    fn holds(&self, a: &Graph, b: &Graph) -> Result<bool, OracleError> {
        Ok(graph_embed(a, b, &self.0)?.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub pair: usize,
    #[serde(rename = "R")]
    pub r: bool,
    #[serde(rename = "S")]
    pub s: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub pairs: Vec<CertificateEntry>,
    pub verdict: Verdict,
    /// Index of the first pair where `R` and `S` disagree.
    pub counterexample: Option<usize>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Checks `x R x' <=> f(x) S f(x')` on every listed pair.
///
/// Pairs are checked in parallel; entries stay in input order.
pub fn verify_reduction<I, O, R, S>(pairs: &[((I, I), (O, O))], rel_in: &R, rel_out: &S) -> Result<Certificate, OracleError>
where
    I: Sync,
    O: Sync,
    R: Relation<I>,
    S: Relation<O>,
{
    let entries = pairs
        .par_iter()
        .enumerate()
        .map(|(idx, ((a, b), (fa, fb)))| {
            let r = rel_in.holds(a, b)?;
            let s = rel_out.holds(fa, fb)?;
            Ok(CertificateEntry {
                pair: idx,
                r,
                s,
                ok: r == s,
            })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    let counterexample = entries.iter().find(|e| !e.ok).map(|e| e.pair);
    Ok(Certificate {
        verdict: if counterexample.is_some() { Verdict::Fail } else { Verdict::Pass },
        pairs: entries,
        counterexample,
    })
}
