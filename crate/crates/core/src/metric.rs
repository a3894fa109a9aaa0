//! Finite metric spaces with exact rational distances.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("matrix must be non-empty and square")]
    NotSquare,
    #[error("asymmetric matrix at ({0},{1})")]
    AsymmetricMatrix(usize, usize),
    #[error("nonzero diagonal entry at ({0},{0})")]
    NonzeroDiagonal(usize),
    #[error("non-positive off-diagonal entry at ({0},{1})")]
    NonpositiveOffDiagonal(usize, usize),
    #[error("triangle inequality fails: d({0},{1}) > d({0},{2}) + d({2},{1})")]
    TriangleViolation(usize, usize, usize),
    #[error("empty point selection")]
    EmptySelection,
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("header says n = {declared} but the matrix has {actual} rows")]
    SizeMismatch { declared: usize, actual: usize },
}

/// A finite metric space on points `0..n`.
///
/// Construction goes through [`validate_metric`], so every value of this type
/// satisfies the metric axioms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<Rational>>,
}

/// Checks the metric axioms and wraps the matrix.
///
/// Errors name the first witness in row-major order; the checks run in the
/// order shape, diagonal, symmetry, positivity, triangle inequality.
pub fn validate_metric(matrix: Vec<Vec<Rational>>) -> Result<FiniteMetricSpace, MetricError> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(MetricError::NotSquare);
    }
    for (i, row) in matrix.iter().enumerate() {
        if !row[i].is_zero() {
            return Err(MetricError::NonzeroDiagonal(i));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(MetricError::AsymmetricMatrix(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !matrix[i][j].is_positive() {
                return Err(MetricError::NonpositiveOffDiagonal(i, j));
            }
        }
    }
    // d(i,j) <= d(i,k) + d(k,j), reported as (i, j, k).
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if matrix[i][j] > &matrix[i][k] + &matrix[k][j] {
                    return Err(MetricError::TriangleViolation(i, j, k));
                }
            }
        }
    }
    Ok(FiniteMetricSpace { dist: matrix })
}

impl FiniteMetricSpace {
    pub fn singleton() -> Self {
        FiniteMetricSpace {
            dist: vec![vec![Rational::zero()]],
        }
    }

    /// `n` points, all pairwise at distance `side` (`side > 0`, `n >= 1`).
    pub fn equilateral(n: usize, side: &Rational) -> Self {
        assert!(n >= 1 && side.is_positive());
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::zero() } else { side.clone() })
                    .collect()
            })
            .collect();
        FiniteMetricSpace { dist }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn into_matrix(self) -> Vec<Vec<Rational>> {
        self.dist
    }

    /// Relabels points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MetricError> {
        let n = self.len();
        if perm.len() != n {
            return Err(MetricError::SizeMismatch {
                declared: n,
                actual: perm.len(),
            });
        }
        if let Some(&bad) = perm.iter().find(|&&p| p >= n) {
            return Err(MetricError::IndexOutOfRange(bad));
        }
        validate_metric(
            perm.iter()
                .map(|&a| perm.iter().map(|&b| self.dist[a][b].clone()).collect())
                .collect(),
        )
    }

    /// Sorted multiset of the distances from point `i` to every other point.
    pub fn row_signature(&self, i: usize) -> Vec<Rational> {
        let mut row: Vec<Rational> = self.dist[i]
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        row.sort();
        row
    }
}

/// `D(X)`: all realized distances including 0, sorted ascending.
pub fn distance_spectrum(x: &FiniteMetricSpace) -> Vec<Rational> {
    let set: BTreeSet<&Rational> = x.dist.iter().flatten().collect();
    set.into_iter().cloned().collect()
}

pub fn is_ultrametric(x: &FiniteMetricSpace) -> bool {
    let n = x.len();
    (0..n).all(|i| {
        (0..n).all(|j| (0..n).all(|k| x.dist[i][k] <= *Rational::max_of(&x.dist[i][j], &x.dist[j][k])))
    })
}

/// Induced metric on `indices`, in the order given.
pub fn subspace(x: &FiniteMetricSpace, indices: &[usize]) -> Result<FiniteMetricSpace, MetricError> {
    if indices.is_empty() {
        return Err(MetricError::EmptySelection);
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= x.len()) {
        return Err(MetricError::IndexOutOfRange(bad));
    }
    let dist: Vec<Vec<Rational>> = indices
        .iter()
        .map(|&a| indices.iter().map(|&b| x.dist[a][b].clone()).collect())
        .collect();
    // Repeated indices would put zeros off the diagonal.
    validate_metric(dist)
}

/// On-disk form: `{ "n": 3, "dist": [["0","1","1/2"], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub dist: Vec<Vec<Rational>>,
}

impl From<&FiniteMetricSpace> for MatrixFile {
    fn from(x: &FiniteMetricSpace) -> Self {
        MatrixFile {
            n: x.len(),
            dist: x.dist.clone(),
        }
    }
}

impl TryFrom<MatrixFile> for FiniteMetricSpace {
    type Error = MetricError;

    fn try_from(file: MatrixFile) -> Result<Self, MetricError> {
        if file.n != file.dist.len() {
            return Err(MetricError::SizeMismatch {
                declared: file.n,
                actual: file.dist.len(),
            });
        }
        validate_metric(file.dist)
    }
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = MatrixFile::deserialize(deserializer)?;
        FiniteMetricSpace::try_from(file).map_err(serde::de::Error::custom)
    }
}
