//! Order-fixed parallel reductions.
//!
//! Work is cut into fixed-size chunks, chunks run on the rayon pool, and
//! the partial results are folded left to right. Floating-point sums are
//! therefore identical for any number of worker threads.

use std::ops::Add;

use rayon::prelude::*;

use crate::error::Result;

const CHUNK: u64 = 2048;

pub(crate) fn chunked_sum<T, F>(count: u64, f: F) -> Result<T>
where
    T: Send + Copy + Default + Add<Output = T>,
    F: Fn(u64) -> Result<T> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = T::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                acc = acc + f(i)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(partials.into_iter().fold(T::default(), |a, b| a + b))
}

/// Whether `pred` holds for every index; stops early on a failure.
pub(crate) fn all<F>(count: u64, pred: F) -> Result<bool>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let failed = (0..chunks)
        .into_par_iter()
        .try_for_each(|c| -> std::result::Result<(), Option<crate::Error>> {
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                if !pred(i).map_err(Some)? {
                    return Err(None);
                }
            }
            Ok(())
        });
    match failed {
        Ok(()) => Ok(true),
        Err(None) => Ok(false),
        Err(Some(e)) => Err(e),
    }
}
