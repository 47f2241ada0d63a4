//! Data-parallel scans with a sequential fallback.
//!
//! Every scan in the crate (pair checks, triangle checks, enumeration,
//! fuzz batches) goes through these helpers so that results are identical
//! whichever [`Execution`] mode is selected: maps preserve input order and
//! argmax reductions break ties on the smallest key.

use serde::{Deserialize, Serialize};

/// How a scan is executed.
///
/// `Parallel` silently degrades to sequential when the crate is built
/// without the `parallel` feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when this mode actually fans out work on the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f` on `0..len` and collects the results in index order.
pub fn map_indices<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// A scored candidate produced by a scan; larger `score` wins, ties go to
/// the smaller `key`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scored<K> {
    pub key: K,
    pub score: f64,
}

fn better<K: Ord>(a: Scored<K>, b: Scored<K>) -> Scored<K> {
    if b.score > a.score || (b.score == a.score && b.key < a.key) {
        b
    } else {
        a
    }
}

fn merge<K: Ord>(a: Option<Scored<K>>, b: Option<Scored<K>>) -> Option<Scored<K>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(better(a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Maximum of `f` over `0..len`, where each call may itself return the best
/// candidate of a whole row. `None` results are skipped.
pub fn argmax<K, F>(exec: Execution, len: usize, f: F) -> Option<Scored<K>>
where
    K: Ord + Send,
    F: Fn(usize) -> Option<Scored<K>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .map(f)
            .reduce(|| None, merge);
    }
    let _ = exec;
    (0..len).map(f).fold(None, merge)
}

/// Sequential argmax helper for use inside a row closure.
pub fn fold_best<K: Ord>(
    items: impl IntoIterator<Item = Scored<K>>,
) -> Option<Scored<K>> {
    items.into_iter().fold(None, |acc, s| merge(acc, Some(s)))
}
