//! The 4-values condition, Katětov extensions and finite Urysohn stages.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{distance_spectrum, validate_metric, FiniteMetricSpace, MatrixFile, MetricError};
use crate::oracles::{find_embedding, find_isometry, OracleError, SearchLimits};
use crate::rational::{is_metric_triple, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrysohnError {
    #[error("D(X) contains {0}, which is not in A")]
    SpectrumNotInA(Rational),
    #[error("extension values break the metric at points ({0},{1})")]
    InvariantViolation(usize, usize),
    #[error("extension has {got} values for a space with {expected} points")]
    WrongLength { expected: usize, got: usize },
    #[error("A fails the 4-values condition: {0}")]
    FourValuesFails(FourValuesWitness),
    #[error("A must contain 0")]
    ZeroNotInA,
    #[error("budgets and bounds must be at least 1")]
    ZeroBudget,
    #[error("no distances in A complete the extension")]
    CompletionFailed,
    #[error("saturation not reached within {} points", .0.space.len())]
    BudgetTooSmall(Box<UrysohnStage>),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Metric triples `(a, b, x)`, `(c, d, x)` with no `y` making both `(b, c, y)`
/// and `(a, d, y)` metric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourValuesWitness {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub x: Rational,
}

impl std::fmt::Display for FourValuesWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(a,b,c,d,x) = ({}, {}, {}, {}, {})", self.a, self.b, self.c, self.d, self.x)
    }
}

/// Exhaustive 4-values check; loops run over `x, a, b, c, d` in ascending
/// order, so the reported witness is the first in that order.
pub fn four_values_check(values: &[Rational]) -> Result<(), FourValuesWitness> {
    let a_set: Vec<&Rational> = values.iter().collect::<BTreeSet<_>>().into_iter().collect();
    for &x in &a_set {
        for &a in &a_set {
            for &b in &a_set {
                if !is_metric_triple(a, b, x) {
                    continue;
                }
                for &c in &a_set {
                    for &d in &a_set {
                        if !is_metric_triple(c, d, x) {
                            continue;
                        }
                        let amalgam = a_set
                            .iter()
                            .any(|&y| is_metric_triple(b, c, y) && is_metric_triple(a, d, y));
                        if !amalgam {
                            return Err(FourValuesWitness {
                                a: a.clone(),
                                b: b.clone(),
                                c: c.clone(),
                                d: d.clone(),
                                x: x.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Distances from a prospective new point to each point of a base space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KatetovFunction {
    pub values: Vec<Rational>,
}

impl KatetovFunction {
    /// `|g(x) - g(y)| <= d(x, y) <= g(x) + g(y)` with positive values.
    pub fn check(&self, x: &FiniteMetricSpace) -> Result<(), UrysohnError> {
        if self.values.len() != x.len() {
            return Err(UrysohnError::WrongLength {
                expected: x.len(),
                got: self.values.len(),
            });
        }
        let g = &self.values;
        for i in 0..g.len() {
            if !g[i].is_positive() {
                return Err(UrysohnError::InvariantViolation(i, x.len()));
            }
            for j in 0..i {
                if !katetov_pair(&g[i], &g[j], x.d(i, j)) {
                    return Err(UrysohnError::InvariantViolation(j, i));
                }
            }
        }
        Ok(())
    }
}

fn katetov_pair(gi: &Rational, gj: &Rational, dij: &Rational) -> bool {
    (gi - gj).abs() <= *dij && *dij <= gi + gj
}

fn check_spectrum(x: &FiniteMetricSpace, a: &BTreeSet<Rational>) -> Result<(), UrysohnError> {
    match distance_spectrum(x).into_iter().find(|r| !a.contains(r)) {
        Some(r) => Err(UrysohnError::SpectrumNotInA(r)),
        None => Ok(()),
    }
}

/// All Katětov functions on `X` with values in `A \ {0}`, in lexicographic
/// order of value tuples.
pub fn katetov_extensions(x: &FiniteMetricSpace, a: &BTreeSet<Rational>) -> Result<Vec<KatetovFunction>, UrysohnError> {
    check_spectrum(x, a)?;
    let choices: Vec<&Rational> = a.iter().filter(|v| v.is_positive()).collect();
    let mut out = Vec::new();
    let mut current: Vec<&Rational> = Vec::with_capacity(x.len());
    fill(x, &choices, &mut current, &mut out);
    Ok(out)
}

fn fill<'a>(x: &FiniteMetricSpace, choices: &[&'a Rational], current: &mut Vec<&'a Rational>, out: &mut Vec<KatetovFunction>) {
    let i = current.len();
    if i == x.len() {
        out.push(KatetovFunction {
            values: current.iter().map(|&v| v.clone()).collect(),
        });
        return;
    }
    for &v in choices {
        if current.iter().enumerate().all(|(j, &gj)| katetov_pair(v, gj, x.d(i, j))) {
            current.push(v);
            fill(x, choices, current, out);
            current.pop();
        }
    }
}

/// `X` plus one new point at distances `g`.
pub fn extend_one_point(x: &FiniteMetricSpace, g: &KatetovFunction) -> Result<FiniteMetricSpace, UrysohnError> {
    g.check(x)?;
    let n = x.len();
    let mut dist: Vec<Vec<Rational>> = x.matrix().to_vec();
    for (row, v) in dist.iter_mut().zip(&g.values) {
        row.push(v.clone());
    }
    let mut last = g.values.clone();
    last.push(Rational::zero());
    dist.push(last);
    debug_assert_eq!(dist.len(), n + 1);
    Ok(validate_metric(dist)?)
}

/// One adjoined point: which subspace and target prompted it, and its full
/// distance vector to all earlier points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjunction {
    pub subspace: Vec<usize>,
    pub target: Vec<Rational>,
    pub distances: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrysohnStage {
    pub space: FiniteMetricSpace,
    pub saturated: bool,
    pub log: Vec<Adjunction>,
}

/// Stage dump: the matrix file fields plus the saturation flag and log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDump {
    pub n: usize,
    pub dist: Vec<Vec<Rational>>,
    pub saturated: bool,
    pub log: Vec<Adjunction>,
}

impl From<&UrysohnStage> for StageDump {
    fn from(stage: &UrysohnStage) -> Self {
        let MatrixFile { n, dist } = MatrixFile::from(&stage.space);
        StageDump {
            n,
            dist,
            saturated: stage.saturated,
            log: stage.log.clone(),
        }
    }
}

/// Rebuilds a stage's space from its log, starting from one point.
pub fn replay(log: &[Adjunction]) -> Result<FiniteMetricSpace, UrysohnError> {
    log.iter().try_fold(FiniteMetricSpace::singleton(), |x, step| {
        extend_one_point(
            &x,
            &KatetovFunction {
                values: step.distances.clone(),
            },
        )
    })
}

/// Searches distances from a new point to every point of `U` that extend
/// `target` on `subspace` to a Katětov function over `A`.
fn complete_extension(
    u: &FiniteMetricSpace,
    subspace: &[usize],
    target: &[Rational],
    choices: &[Rational],
) -> Option<Vec<Rational>> {
    let n = u.len();
    let mut fixed: Vec<Option<Rational>> = vec![None; n];
    for (&i, v) in subspace.iter().zip(target) {
        fixed[i] = Some(v.clone());
    }
    let order: Vec<usize> = subspace
        .iter()
        .copied()
        .chain((0..n).filter(|i| !subspace.contains(i)))
        .collect();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    if complete_from(u, &order, 0, &fixed, choices, &mut values) {
        values.into_iter().collect()
    } else {
        None
    }
}

fn complete_from(
    u: &FiniteMetricSpace,
    order: &[usize],
    pos: usize,
    fixed: &[Option<Rational>],
    choices: &[Rational],
    values: &mut Vec<Option<Rational>>,
) -> bool {
    let Some(&i) = order.get(pos) else {
        return true;
    };
    let candidates: Vec<&Rational> = match &fixed[i] {
        Some(v) => vec![v],
        // A scrambled but fixed preference per (new point, old point) makes
        // the filler distances look random, which saturates small stages
        // far sooner than any fixed value order.
        None => {
            let k = choices.len();
            let shift = (mix(u.len() as u64, i as u64) % k as u64) as usize;
            (0..k).map(|t| &choices[(t + shift) % k]).collect()
        }
    };
    for v in candidates {
        let ok = order[..pos]
            .iter()
            .all(|&j| katetov_pair(v, values[j].as_ref().expect("assigned"), u.d(i, j)));
        if ok {
            values[i] = Some(v.clone());
            if complete_from(u, order, pos + 1, fixed, choices, values) {
                return true;
            }
            values[i] = None;
        }
    }
    false
}

/// SplitMix64 finalizer over a pair of indices.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pattern(u: &FiniteMetricSpace, p: usize, subspace: &[usize]) -> Vec<Rational> {
    subspace.iter().map(|&i| u.d(p, i).clone()).collect()
}

/// First missing `(subspace, Katětov target)` at subspace sizes `1..=level`.
fn first_gap(u: &FiniteMetricSpace, a: &BTreeSet<Rational>, level: usize) -> Result<Option<(Vec<usize>, Vec<Rational>)>, UrysohnError> {
    for size in 1..=level.min(u.len()) {
        for subspace in (0..u.len()).combinations(size) {
            let sub = crate::metric::subspace(u, &subspace)?;
            let realized: HashSet<Vec<Rational>> = (0..u.len())
                .filter(|p| !subspace.contains(p))
                .map(|p| pattern(u, p, &subspace))
                .collect();
            for g in katetov_extensions(&sub, a)? {
                if !realized.contains(&g.values) {
                    return Ok(Some((subspace, g.values)));
                }
            }
        }
    }
    Ok(None)
}

/// Grows a finite approximation of the `A`-Urysohn space.
///
/// Starting from one point, repeatedly finds the first subspace of size at
/// most `max(s - 1, k)` with an unrealized Katětov extension and adjoins a
/// point realizing it. Stops when nothing is missing or the space has
/// `budget` points; the latter returns [`UrysohnError::BudgetTooSmall`]
/// carrying the unsaturated stage.
pub fn urysohn_stage(a: &BTreeSet<Rational>, budget: usize, s: usize, k: usize) -> Result<UrysohnStage, UrysohnError> {
    if budget == 0 || s == 0 || k == 0 {
        return Err(UrysohnError::ZeroBudget);
    }
    if !a.contains(&Rational::zero()) {
        return Err(UrysohnError::ZeroNotInA);
    }
    let values: Vec<Rational> = a.iter().cloned().collect();
    four_values_check(&values).map_err(UrysohnError::FourValuesFails)?;
    let choices: Vec<Rational> = a.iter().filter(|v| v.is_positive()).cloned().collect();
    let level = (s.saturating_sub(1)).max(k);

    let mut u = FiniteMetricSpace::singleton();
    let mut log = Vec::new();
    loop {
        let gap = if choices.is_empty() { None } else { first_gap(&u, a, level)? };
        let Some((subspace, target)) = gap else {
            return Ok(UrysohnStage {
                space: u,
                saturated: true,
                log,
            });
        };
        if u.len() >= budget {
            return Err(UrysohnError::BudgetTooSmall(Box::new(UrysohnStage {
                space: u,
                saturated: false,
                log,
            })));
        }
        let distances = complete_extension(&u, &subspace, &target, &choices).ok_or(UrysohnError::CompletionFailed)?;
        u = extend_one_point(
            &u,
            &KatetovFunction {
                values: distances.clone(),
            },
        )?;
        log.push(Adjunction {
            subspace,
            target,
            distances,
        });
    }
}

/// All `A`-spaces on `1..=s` points, one per isometry type, in order of size
/// and then lexicographic matrix fill.
pub fn enumerate_a_spaces(a: &BTreeSet<Rational>, s: usize, limits: &SearchLimits) -> Result<Vec<FiniteMetricSpace>, UrysohnError> {
    let choices: Vec<&Rational> = a.iter().filter(|v| v.is_positive()).collect();
    let mut out: Vec<FiniteMetricSpace> = Vec::new();
    for n in 1..=s {
        let slots: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        let fills = slots.iter().map(|_| choices.iter()).multi_cartesian_product();
        let fills: Box<dyn Iterator<Item = Vec<&&Rational>>> = if slots.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(fills)
        };
        for fill in fills {
            let mut dist = vec![vec![Rational::zero(); n]; n];
            for (&(i, j), v) in slots.iter().zip(&fill) {
                dist[i][j] = (**v).clone();
                dist[j][i] = (**v).clone();
            }
            let Ok(x) = validate_metric(dist) else { continue };
            let mut duplicate = false;
            for y in out.iter().filter(|y| y.len() == n) {
                if find_isometry(&x, y, limits)?.is_some() {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Every `A`-space on at most `s` points embeds in `U`; otherwise the first
/// one that does not.
pub fn verify_universality(
    u: &FiniteMetricSpace,
    a: &BTreeSet<Rational>,
    s: usize,
    limits: &SearchLimits,
) -> Result<Result<(), FiniteMetricSpace>, UrysohnError> {
    for x in enumerate_a_spaces(a, s, limits)? {
        if find_embedding(&x, u, limits)?.is_none() {
            return Ok(Err(x));
        }
    }
    Ok(Ok(()))
}

/// A partial isometry `domain[i] -> image[i]` that cannot send `point`
/// anywhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StuckMap {
    pub domain: Vec<usize>,
    pub image: Vec<usize>,
    pub point: usize,
}

/// Every partial isometry of `U` between sets of at most `k` points extends to
/// any one further point.
///
/// Tuples with equal internal distances are grouped; the check holds exactly
/// when each group's tuples see the same set of outside distance patterns.
pub fn verify_one_point_homogeneity(u: &FiniteMetricSpace, k: usize) -> Result<(), StuckMap> {
    let n = u.len();
    for j in 1..=k.min(n) {
        let mut groups: BTreeMap<Vec<Rational>, Vec<(Vec<usize>, HashMap<Vec<Rational>, usize>)>> = BTreeMap::new();
        for tuple in (0..n).permutations(j) {
            let internal: Vec<Rational> = tuple
                .iter()
                .tuple_combinations()
                .map(|(&p, &q)| u.d(p, q).clone())
                .collect();
            let mut outside: HashMap<Vec<Rational>, usize> = HashMap::new();
            for z in (0..n).filter(|z| !tuple.contains(z)) {
                outside.entry(pattern(u, z, &tuple)).or_insert(z);
            }
            groups.entry(internal).or_default().push((tuple, outside));
        }
        for members in groups.values() {
            for (src, src_out) in members {
                for (tgt, tgt_out) in members {
                    let stuck = src_out
                        .iter()
                        .filter(|(pat, _)| !tgt_out.contains_key(*pat))
                        .map(|(_, &z)| z)
                        .min();
                    if let Some(point) = stuck {
                        return Err(StuckMap {
                            domain: src.clone(),
                            image: tgt.clone(),
                            point,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
