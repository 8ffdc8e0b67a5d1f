use std::ops::Range;

use crate::{Error, Result};

/// Splits `[0, n)` into `p` contiguous ranges; range `i` is
/// `[floor(i n / p), floor((i + 1) n / p))`.
pub fn partition_indices(n: u64, p: usize) -> Result<Vec<Range<u64>>> {
    if p == 0 {
        return Err(Error::config("partition needs at least one worker"));
    }
    let p = p as u128;
    let bound = |i: u128| (i * u128::from(n) / p) as u64;
    Ok((0..p).map(|i| bound(i)..bound(i + 1)).collect())
}

/// Groups of at most `u` consecutive path ids that advance together.
pub fn interleave_groups(range: Range<u64>, u: usize) -> impl Iterator<Item = Range<u64>> {
    let u = u.max(1) as u64;
    let end = range.end;
    (range.start..end)
        .step_by(u as usize)
        .map(move |start| start..(start + u).min(end))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorkItem {
    pub path_id: u64,
    pub step: u32,
}

/// Execution order of `(path, step)` items when `u` paths are kept in flight:
/// each group of `u` paths advances round-robin, one step at a time.
pub fn interleave_schedule(range: Range<u64>, u: usize, steps: u32) -> Vec<WorkItem> {
    let mut items = Vec::with_capacity(((range.end - range.start) * u64::from(steps)) as usize);
    for group in interleave_groups(range, u) {
        for step in 0..steps {
            items.extend(group.clone().map(|path_id| WorkItem { path_id, step }));
        }
    }
    items
}
