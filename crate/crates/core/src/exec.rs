//! Choice between data-parallel and sequential evaluation.
//!
//! With the `parallel` feature disabled, [`Exec::Parallel`] silently runs
//! sequentially, so callers never need their own `cfg` switches.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
    /// Maps `f` over `items`, preserving order.
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

    /// Does `pred` hold for every item? Stops early on a failure.
    pub fn all<T, F>(self, items: &[T], pred: F) -> bool
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().all(pred),
            _ => items.iter().all(pred),
        }
    }

    /// Does fallible `pred` hold for every item? Stops at the first item that
    /// fails or errors.
    pub fn try_all<T, E, F>(self, items: &[T], pred: F) -> Result<bool, E>
    where
        T: Sync,
        E: Send,
        F: Fn(&T) -> Result<bool, E> + Sync + Send,
    {
        let stop = match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items
                .par_iter()
                .map(pred)
                .find_any(|r| !matches!(r, Ok(true))),
            _ => items.iter().map(pred).find(|r| !matches!(r, Ok(true))),
        };
        match stop {
            None => Ok(true),
            Some(r) => r,
        }
    }

    /// Maps fallible `f` over `items`; the first error in item order wins.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}
