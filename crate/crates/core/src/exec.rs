//! Execution strategy for data-parallel loops.
//!
//! With the `parallel` feature (default) [`Strategy::Parallel`] runs on the
//! rayon thread pool; without it every strategy degrades to the sequential
//! loop. Results are always returned in input order, so outputs do not depend
//! on scheduling.

/// How independent work items are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Parallel when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Parallel,
}

impl Strategy {
    /// True when this strategy will actually use worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Ordered map over a slice.
pub fn map<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Ordered map over an index range.
pub fn map_range<R, F>(strategy: Strategy, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..len).map(f).collect()
}

/// In-place fallible update of every element; the first error (in index
/// order) is returned.
pub fn try_for_each_mut<T, E, F>(strategy: Strategy, items: &mut [T], f: F) -> Result<(), E>
where
    T: Send,
    E: Send,
    F: Fn(&mut T) -> Result<(), E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() && items.len() > 1 {
        use rayon::prelude::*;
        let results: Vec<Result<(), E>> = items.par_iter_mut().map(f).collect();
        return results.into_iter().collect();
    }
    let _ = strategy;
    items.iter_mut().try_for_each(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..1000).collect();
        let a = map(Strategy::Parallel, &v, |x| x * x);
        let b = map(Strategy::Sequential, &v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(map_range(Strategy::Parallel, 10, |i| i), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn first_error_wins() {
        let mut v = vec![1, 2, 3, 4];
        let r: Result<(), usize> =
            try_for_each_mut(Strategy::Parallel, &mut v, |x| if *x >= 3 { Err(*x) } else { Ok(()) });
        assert_eq!(r, Err(3));
    }
}
