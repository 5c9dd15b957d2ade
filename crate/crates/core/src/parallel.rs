//! Data-parallel helpers with a sequential fallback.

/// How independent work items are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled,
    /// otherwise runs sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let v: Vec<usize> = (0..100).collect();
        let a = par_map(&v, Execution::Parallel, |x| x * x);
        let b = par_map(&v, Execution::Sequential, |x| x * x);
        assert_eq!(a, b);
    }
}
