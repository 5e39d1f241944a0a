//! Work distribution for embarrassingly parallel inner loops (quadrature
//! cells, ladder rungs, property-suite tuples).
//!
//! Results are always collected in input order and reduced sequentially, so
//! output bytes do not depend on thread scheduling. With the `parallel`
//! feature disabled, both modes run sequentially.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Parallel,
    Sequential,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<R: Send>(
    mode: ExecMode,
    n: usize,
    f: impl Fn(usize) -> R + Sync + Send,
) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}
