//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on the rayon pool unless
//! [`set_sequential`] has been called. Reductions always use the same
//! pairwise tree, so results do not depend on the thread count.

use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential code path at runtime (used by benchmarks).
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

const LEAF: usize = 64;
const PAR_GRAIN: usize = 1 << 14;

/// `(0..n).map(f).collect()` evaluated in parallel when enabled.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Apply `f(index, chunk)` to consecutive chunks of `data` of length `chunk`.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

fn join<A, B, RA, RB>(a: A, b: B, big: bool) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if big && is_parallel() {
        return rayon::join(a, b);
    }
    let _ = big;
    (a(), b())
}

/// Pairwise sum of `f(i)` for `i` in `0..n`, with a fixed summation tree.
pub fn sum_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fn rec<F: Fn(usize) -> f64 + Sync + Send>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= LEAF {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = join(|| rec(lo, mid, f), || rec(mid, hi, f), hi - lo >= PAR_GRAIN);
        a + b
    }
    if n == 0 {
        return 0.0;
    }
    rec(0, n, &f)
}

/// Complex version of [`sum_by`].
pub fn csum_by<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    fn rec<F: Fn(usize) -> Complex64 + Sync + Send>(lo: usize, hi: usize, f: &F) -> Complex64 {
        if hi - lo <= LEAF {
            let mut s = Complex64::new(0.0, 0.0);
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = join(|| rec(lo, mid, f), || rec(mid, hi, f), hi - lo >= PAR_GRAIN);
        a + b
    }
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    rec(0, n, &f)
}

/// Pairwise maximum of `f(i)`; returns 0 for an empty range.
pub fn max_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_collect(n.div_ceil(LEAF), |b| {
        let hi = ((b + 1) * LEAF).min(n);
        (b * LEAF..hi).map(&f).fold(0.0_f64, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}
