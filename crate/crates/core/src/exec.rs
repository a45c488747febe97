//! Execution helpers: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) the indexed maps run on the rayon
//! global pool; without it they degrade to plain loops. Results are always
//! collected in index order, so callers that reduce sequentially afterwards
//! get identical output at any worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Always-sequential variant of [`map_indexed`], kept available so benches can
/// compare both execution paths in one build.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Sum `f(i)` over `0..n` with fixed chunk boundaries: chunks are mapped (in
/// parallel when enabled) to partial sums, which are then folded in chunk
/// order. The result is bit-identical at any worker count.
pub fn sum_indexed(n: usize, chunk: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    assert!(chunk > 0);
    let chunks = n.div_ceil(chunk);
    let partials = map_indexed(chunks, |c| {
        let lo = c * chunk;
        let hi = (lo + chunk).min(n);
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Effective worker count requested through the `UARNC_THREADS` environment
/// variable; `None` means automatic.
pub fn threads_from_env() -> Option<usize> {
    match std::env::var("UARNC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => None,
            Ok(n) => Some(n),
        },
        Err(_) => None,
    }
}

/// Configure the global worker pool from `UARNC_THREADS`. Call once at
/// process start; later calls are ignored (the pool can only be built once).
#[cfg(feature = "parallel")]
pub fn configure_threads_from_env() {
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads_from_env() {}
