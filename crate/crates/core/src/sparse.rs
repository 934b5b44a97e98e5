//! Sparse document vectors and cluster composite vectors.
//!
//! A cluster's composite vector `D_i` is the element-wise sum of its member
//! documents. With unit-length documents and cosine similarity, every pairwise
//! similarity sum used by the criterion functions collapses onto composites:
//!
//! ```text
//! sum_{u,v in S_i} cos(u, v) = ||D_i||^2          (ordered pairs, u = v included)
//! sum_{u in A, v in B} cos(u, v) = <D_A, D_B>
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Composites over vocabularies up to this size are stored densely.
const DENSE_DIM_LIMIT: usize = 1 << 18;

/// A sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a vector from parallel index/value arrays. Indices must be
    /// strictly increasing; explicit zeros are dropped.
    pub fn new(indices: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: indices.len(),
                found: values.len(),
            });
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "sparse indices not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite weight {v}")));
        }
        let mut out = SparseVector { indices, values };
        out.drop_zeros();
        Ok(out)
    }

    /// Builds a vector from unordered `(index, value)` pairs. Duplicate
    /// indices are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut indices: Vec<u32> = Vec::with_capacity(pairs.len());
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match indices.last() {
                Some(&last) if last == i => *values.last_mut().unwrap() += v,
                _ => {
                    indices.push(i);
                    values.push(v);
                }
            }
        }
        let mut out = SparseVector { indices, values };
        out.drop_zeros();
        out
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .unzip();
        SparseVector { indices, values }
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|v| *v != 0.0) {
            return;
        }
        let (indices, values) = self
            .indices
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (*i, *v))
            .unzip();
        self.indices = indices;
        self.values = values;
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// One past the largest stored index, or 0 for the empty vector.
    pub fn dim_hint(&self) -> usize {
        self.indices.last().map_or(0, |&i| i as usize + 1)
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        dot(self, other)
    }

    /// Multiplies every weight by `factor`. Scaling by zero empties the vector.
    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self.drop_zeros();
    }

    /// Returns a unit-length copy, or `None` when the vector is all-zero.
    pub fn normalized(&self) -> Option<SparseVector> {
        let norm = self.norm();
        if norm == 0.0 {
            return None;
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v /= norm);
        Some(out)
    }
}

/// Inner product of two sparse vectors. On unit vectors this is the cosine
/// similarity.
pub fn dot(u: &SparseVector, v: &SparseVector) -> f64 {
    // Merge in ascending index order, so dot(u, v) == dot(v, u) exactly.
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    while i < u.indices.len() && j < v.indices.len() {
        match u.indices[i].cmp(&v.indices[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += u.values[i] * v.values[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Euclidean distance `sqrt(sum_k (u_k - v_k)^2)`.
pub fn euclidean_distance(u: &SparseVector, v: &SparseVector) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    while i < u.indices.len() || j < v.indices.len() {
        let ui = u.indices.get(i).copied().unwrap_or(u32::MAX);
        let vj = v.indices.get(j).copied().unwrap_or(u32::MAX);
        let diff = if ui == vj {
            let d = u.values[i] - v.values[j];
            i += 1;
            j += 1;
            d
        } else if ui < vj {
            i += 1;
            u.values[i - 1]
        } else {
            j += 1;
            -v.values[j - 1]
        };
        acc += diff * diff;
    }
    acc.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Sparse(BTreeMap<u32, f64>),
}

/// Element-wise sum of a set of documents with a cached squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeVector {
    storage: Storage,
    sq_norm: f64,
    updates: usize,
}

impl CompositeVector {
    /// The zero composite over a `dim`-term vocabulary.
    pub fn zeros(dim: usize) -> Self {
        if dim <= DENSE_DIM_LIMIT {
            Self::dense(dim)
        } else {
            Self::sparse()
        }
    }

    pub fn dense(dim: usize) -> Self {
        CompositeVector {
            storage: Storage::Dense(vec![0.0; dim]),
            sq_norm: 0.0,
            updates: 0,
        }
    }

    pub fn sparse() -> Self {
        CompositeVector {
            storage: Storage::Sparse(BTreeMap::new()),
            sq_norm: 0.0,
            updates: 0,
        }
    }

    /// Sums `docs` from scratch; the squared norm is computed directly.
    pub fn from_docs<'a>(dim: usize, docs: impl IntoIterator<Item = &'a SparseVector>) -> Self {
        let mut c = Self::zeros(dim);
        c.rebuild(docs);
        c
    }

    /// Replaces the contents with the sum of `docs` and recomputes the norm.
    pub fn rebuild<'a>(&mut self, docs: impl IntoIterator<Item = &'a SparseVector>) {
        match &mut self.storage {
            Storage::Dense(d) => d.iter_mut().for_each(|x| *x = 0.0),
            Storage::Sparse(m) => m.clear(),
        }
        for doc in docs {
            self.accumulate(doc, 1.0);
        }
        self.sq_norm = self.recomputed_squared_norm();
        self.updates = 0;
    }

    fn accumulate(&mut self, doc: &SparseVector, sign: f64) {
        match &mut self.storage {
            Storage::Dense(d) => {
                for (i, v) in doc.iter() {
                    let i = i as usize;
                    if i >= d.len() {
                        d.resize(i + 1, 0.0);
                    }
                    d[i] += sign * v;
                }
            }
            Storage::Sparse(m) => {
                for (i, v) in doc.iter() {
                    *m.entry(i).or_insert(0.0) += sign * v;
                }
            }
        }
    }

    /// Adds a document, updating the cached norm via
    /// `||D + d||^2 = ||D||^2 + 2<D, d> + ||d||^2`.
    pub fn add(&mut self, doc: &SparseVector) {
        let cross = self.dot_sparse(doc);
        self.accumulate(doc, 1.0);
        self.sq_norm += 2.0 * cross + doc.squared_norm();
        self.updates += 1;
    }

    /// Removes a previously added document, updating the cached norm via
    /// `||D - d||^2 = ||D||^2 - 2<D, d> + ||d||^2`.
    pub fn remove(&mut self, doc: &SparseVector) {
        let cross = self.dot_sparse(doc);
        self.accumulate(doc, -1.0);
        self.sq_norm += doc.squared_norm() - 2.0 * cross;
        if self.sq_norm < 0.0 {
            self.sq_norm = 0.0;
        }
        self.updates += 1;
    }

    /// Incremental add/remove calls since the last rebuild.
    pub fn updates_since_rebuild(&self) -> usize {
        self.updates
    }

    pub fn squared_norm(&self) -> f64 {
        self.sq_norm
    }

    pub fn norm(&self) -> f64 {
        self.sq_norm.sqrt()
    }

    pub fn recomputed_squared_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.iter().map(|x| x * x).sum(),
            Storage::Sparse(m) => m.values().map(|x| x * x).sum(),
        }
    }

    pub fn get(&self, index: u32) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.get(index as usize).copied().unwrap_or(0.0),
            Storage::Sparse(m) => m.get(&index).copied().unwrap_or(0.0),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn dot_sparse(&self, doc: &SparseVector) -> f64 {
        match &self.storage {
            Storage::Dense(d) => doc
                .iter()
                .map(|(i, v)| d.get(i as usize).map_or(0.0, |x| x * v))
                .sum(),
            Storage::Sparse(m) => doc
                .iter()
                .map(|(i, v)| m.get(&i).map_or(0.0, |x| x * v))
                .sum(),
        }
    }

    pub fn dot(&self, other: &CompositeVector) -> f64 {
        match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                small
                    .iter()
                    .map(|(i, x)| large.get(i).map_or(0.0, |y| x * y))
                    .sum()
            }
            (Storage::Dense(d), Storage::Sparse(m)) | (Storage::Sparse(m), Storage::Dense(d)) => m
                .iter()
                .map(|(i, x)| d.get(*i as usize).map_or(0.0, |y| x * y))
                .sum(),
        }
    }

    pub fn to_sparse_vector(&self) -> SparseVector {
        match &self.storage {
            Storage::Dense(d) => SparseVector::from_dense(d),
            Storage::Sparse(m) => SparseVector::from_pairs(m.iter().map(|(i, v)| (*i, *v))),
        }
    }
}

/// Sum of a document set. The empty set yields the zero composite.
pub fn composite<'a>(dim: usize, docs: impl IntoIterator<Item = &'a SparseVector>) -> CompositeVector {
    CompositeVector::from_docs(dim, docs)
}
