//! Certified numerics for discrete groups of 2×2 complex matrices acting on
//! hyperbolic 3-space: enclosure (ball) arithmetic, Dirichlet domains, length
//! and ortholength spectra, tube radii, and covering-obstruction reports.
//!
//! Every quantity the library computes is an [`rigor::Enclosure`] — a midpoint
//! together with an outward error radius — so that all reported digits are
//! backed by containment guarantees rather than floating-point optimism.

pub mod cover;
pub mod dirichlet;
pub mod isometry;
pub mod ortho;
pub mod rigor;
pub mod spectrum;

/// Whether bulk work (search-tree expansion, per-element certification) runs
/// on the current thread or fans out across a thread pool.  Results are
/// identical either way: merges and deduplication are always a deterministic
/// single-threaded reduction over an order-preserving map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses the process-wide thread pool when the `parallel` feature is
    /// compiled in; otherwise behaves like [`ExecMode::Sequential`].
    Parallel,
}

/// Order-preserving map over a slice, parallel or sequential per `mode`.
pub(crate) fn exec_map<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    let _ = mode;
    items.iter().map(f).collect()
}
