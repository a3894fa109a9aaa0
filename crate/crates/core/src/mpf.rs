//! Metric-preserving functions on finite domains.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{validate_metric, FiniteMetricSpace, MetricError};
use crate::rational::{is_metric_triple, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpfError {
    #[error("0 is not in the domain")]
    ZeroNotInDomain,
    #[error("{0} listed twice in the table")]
    DuplicateDomainPoint(Rational),
    #[error("{0} is not in the domain")]
    NotInDomain(Rational),
    #[error("slope construction needs 0 <= a < b, an empty pool is exhausted immediately")]
    BadParameters,
    #[error("tail value {0} must exceed a and appear once")]
    BadTail(Rational),
    #[error("no pool value fits the slope constraints at tail value {0}")]
    PoolExhausted(Rational),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A function tabulated on finitely many points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Rational, Rational)>", into = "Vec<(Rational, Rational)>")]
pub struct TabulatedFunction {
    table: BTreeMap<Rational, Rational>,
}

impl TryFrom<Vec<(Rational, Rational)>> for TabulatedFunction {
    type Error = MpfError;
    fn try_from(pairs: Vec<(Rational, Rational)>) -> Result<Self, MpfError> {
        let mut table = BTreeMap::new();
        for (k, v) in pairs {
            if table.contains_key(&k) {
                return Err(MpfError::DuplicateDomainPoint(k));
            }
            table.insert(k, v);
        }
        Ok(TabulatedFunction { table })
    }
}

impl From<TabulatedFunction> for Vec<(Rational, Rational)> {
    fn from(f: TabulatedFunction) -> Self {
        f.table.into_iter().collect()
    }
}

impl TabulatedFunction {
    pub fn from_pairs<I: IntoIterator<Item = (Rational, Rational)>>(pairs: I) -> Result<Self, MpfError> {
        Self::try_from(pairs.into_iter().collect::<Vec<_>>())
    }

    pub fn identity<'a, I: IntoIterator<Item = &'a Rational>>(domain: I) -> Self {
        tabulate(domain, Rational::clone)
    }

    pub fn get(&self, x: &Rational) -> Option<&Rational> {
        self.table.get(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Rational> {
        self.table.keys()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        let mut values: Vec<&Rational> = self.table.values().collect();
        values.sort();
        values.windows(2).all(|w| w[0] != w[1])
    }
}

pub fn tabulate<'a, I, F>(domain: I, f: F) -> TabulatedFunction
where
    I: IntoIterator<Item = &'a Rational>,
    F: Fn(&Rational) -> Rational,
{
    TabulatedFunction {
        table: domain.into_iter().map(|x| (x.clone(), f(x))).collect(),
    }
}

/// Why a function fails to be metric preserving.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MpfWitness {
    ZeroNotFixed { value: Rational },
    NonPositive { point: Rational },
    /// `(a, b, c)` with `a >= b >= c` is a metric triple whose image is not.
    Triple { a: Rational, b: Rational, c: Rational },
}

/// Checks `f(0) = 0`, positivity, and that metric triples map to metric triples.
pub fn is_metric_preserving_finite(f: &TabulatedFunction) -> Result<Result<(), MpfWitness>, MpfError> {
    let zero = Rational::zero();
    let f0 = f.get(&zero).ok_or(MpfError::ZeroNotInDomain)?;
    if !f0.is_zero() {
        return Ok(Err(MpfWitness::ZeroNotFixed { value: f0.clone() }));
    }
    if let Some((p, _)) = f.pairs().find(|(p, v)| p.is_positive() && !v.is_positive()) {
        return Ok(Err(MpfWitness::NonPositive { point: p.clone() }));
    }
    let pts: Vec<(&Rational, &Rational)> = f.pairs().collect();
    for (ia, &(a, fa)) in pts.iter().enumerate() {
        for (ib, &(b, fb)) in pts[..=ia].iter().enumerate() {
            for &(c, fc) in &pts[..=ib] {
                if *a <= b + c && !is_metric_triple(fa, fb, fc) {
                    return Ok(Err(MpfWitness::Triple {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// Nondecreasing, `f(0) = 0`, positive off zero, and
/// `s <= t < r <= s + t` implies `f(r) <= f(s) + f(t)`.
pub fn check_sufficient_condition(f: &TabulatedFunction) -> bool {
    let zero = Rational::zero();
    if f.get(&zero).is_none_or(|v| !v.is_zero()) {
        return false;
    }
    let pts: Vec<(&Rational, &Rational)> = f.pairs().collect();
    if pts.iter().any(|(p, v)| p.is_positive() && !v.is_positive()) {
        return false;
    }
    if pts.windows(2).any(|w| w[1].1 < w[0].1) {
        return false;
    }
    pts.iter().enumerate().all(|(is, &(s, fs))| {
        pts[is..].iter().enumerate().all(|(off, &(t, ft))| {
            pts[is + off + 1..]
                .iter()
                .take_while(|(r, _)| **r <= s + t)
                .all(|(_, fr)| **fr <= fs + ft)
        })
    })
}

fn slope(p: &(Rational, Rational), q: &(Rational, Rational)) -> Rational {
    (&q.1 - &p.1) / (&q.0 - &p.0)
}

/// Builds an injective, increasing, concave-on-its-points `f` that is the
/// identity up to `a`, maps each tail value `t` to a pool value below `t`,
/// and never takes the value `b`.
///
/// The domain is `{0, a} ∪ tail`. Tail values are fixed in the given order;
/// each takes the largest pool value keeping the chord slopes positive and
/// strictly decreasing.
pub fn slope_construction(
    a: &Rational,
    b: &Rational,
    tail: &[Rational],
    pool: &[Rational],
) -> Result<TabulatedFunction, MpfError> {
    if a.is_negative() || a >= b {
        return Err(MpfError::BadParameters);
    }
    let mut pool: Vec<&Rational> = pool.iter().filter(|v| *v > a && *v < b).collect();
    pool.sort();
    pool.dedup();
    pool.reverse();

    let mut chain: Vec<(Rational, Rational)> = vec![(Rational::zero(), Rational::zero())];
    if a.is_positive() {
        chain.push((a.clone(), a.clone()));
    }
    for t in tail {
        if t <= a || chain.iter().any(|(x, _)| x == t) {
            return Err(MpfError::BadTail(t.clone()));
        }
        let pos = chain.partition_point(|(x, _)| x < t);
        let chosen = pool.iter().find(|&&v| {
            if v >= t {
                return false;
            }
            let point = (t.clone(), v.clone());
            let left = &chain[pos - 1];
            let s_left = slope(left, &point);
            if !s_left.is_positive() {
                return false;
            }
            if pos >= 2 && s_left >= slope(&chain[pos - 2], left) {
                return false;
            }
            if let Some(right) = chain.get(pos) {
                let s_right = slope(&point, right);
                if !s_right.is_positive() || s_right >= s_left {
                    return false;
                }
                if let Some(next) = chain.get(pos + 1) {
                    if slope(right, next) >= s_right {
                        return false;
                    }
                }
            }
            true
        });
        match chosen {
            Some(&v) => chain.insert(pos, (t.clone(), v.clone())),
            None => return Err(MpfError::PoolExhausted(t.clone())),
        }
    }
    TabulatedFunction::from_pairs(chain)
}

/// `f ∘ d`, validated as a metric.
pub fn transform_space(f: &TabulatedFunction, x: &FiniteMetricSpace) -> Result<FiniteMetricSpace, MpfError> {
    let dist = x
        .matrix()
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| f.get(r).cloned().ok_or_else(|| MpfError::NotInDomain(r.clone())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(validate_metric(dist)?)
}

/// `g ∘ f` on the domain of `f`.
pub fn compose(g: &TabulatedFunction, f: &TabulatedFunction) -> Result<TabulatedFunction, MpfError> {
    let pairs = f
        .pairs()
        .map(|(x, fx)| {
            g.get(fx)
                .map(|v| (x.clone(), v.clone()))
                .ok_or_else(|| MpfError::NotInDomain(fx.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    TabulatedFunction::from_pairs(pairs)
}
