//! Execution policy for the data-parallel inner loops.
//!
//! Every kernel that sweeps over velocity nodes (or ω-slices in the radial
//! solver) goes through [`Exec`]. With the `parallel` feature the
//! [`Exec::Parallel`] variant dispatches to rayon; without it both variants
//! run sequentially. Only element-disjoint writes are parallelised, and no
//! floating-point reduction is ever split across threads, so results are
//! bit-identical between the two policies.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Apply `f(index, chunk)` to consecutive chunks of `data`.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => data
                .par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(k, c)| f(k, c)),
            _ => data.chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k, c)),
        }
    }

    /// Same as [`Exec::for_each_chunk`] over two equally shaped buffers.
    pub fn for_each_chunk_pair<T, F>(self, a: &mut [T], b: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
    {
        debug_assert_eq!(a.len(), b.len());
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => a
                .par_chunks_mut(chunk)
                .zip(b.par_chunks_mut(chunk))
                .enumerate()
                .for_each(|(k, (ca, cb))| f(k, ca, cb)),
            _ => a
                .chunks_mut(chunk)
                .zip(b.chunks_mut(chunk))
                .enumerate()
                .for_each(|(k, (ca, cb))| f(k, ca, cb)),
        }
    }

    /// Map over independent work items (sweep members, refinement levels).
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}
