//! Data-parallel map over sample grids.
//!
//! Grid evaluations (residual tables, torus sampling, verdict grids) are
//! independent per sample. With the `parallel` feature they run on rayon;
//! without it, sequentially. Results are collected in input order either
//! way, so outputs are deterministic regardless of schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map_samples<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential variant, kept callable so benchmarks can compare.
pub fn map_samples_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let xs: Vec<u64> = (0..257).collect();
        let a = map_samples(&xs, |x| x * x);
        let b = map_samples_seq(&xs, |x| x * x);
        assert_eq!(a, b);
    }
}
