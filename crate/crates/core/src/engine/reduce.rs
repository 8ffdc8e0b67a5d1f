use std::ops::Range;

use super::ExactSum;
use crate::{Error, Result};

/// What a worker sends back for its range: moment sums, never per-path data.
#[derive(Debug, Clone, PartialEq)]
pub struct Partial {
    pub range: Range<u64>,
    pub count: u64,
    pub sum: ExactSum,
    pub sum_sq: ExactSum,
}

impl Partial {
    pub fn empty(range: Range<u64>) -> Self {
        Self {
            range,
            count: 0,
            sum: ExactSum::new(),
            sum_sq: ExactSum::new(),
        }
    }

    /// Adds the next path's value; callers feed paths in ascending id order.
    #[inline]
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        self.sum.add(value);
        self.sum_sq.add(value * value);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub count: u64,
    pub sum: ExactSum,
    pub sum_sq: ExactSum,
}

/// Combines one partial per expected range, in ascending range order,
/// regardless of the order the partials arrived in.
pub fn reduce_deterministic(expected: &[Range<u64>], partials: Vec<Partial>) -> Result<Reduced> {
    let mut slots: Vec<Option<Partial>> = vec![None; expected.len()];
    for partial in partials {
        let idx = expected
            .iter()
            .position(|r| *r == partial.range)
            .ok_or_else(|| Error::IncompleteReduction(format!("unexpected partial for {:?}", partial.range)))?;
        if slots[idx].is_some() {
            return Err(Error::IncompleteReduction(format!(
                "duplicate partial for {:?}",
                partial.range
            )));
        }
        let len = partial.range.end - partial.range.start;
        if partial.count != len {
            return Err(Error::IncompleteReduction(format!(
                "partial for {:?} covers {} of {len} paths",
                partial.range, partial.count
            )));
        }
        slots[idx] = Some(partial);
    }
    let mut out = Reduced {
        count: 0,
        sum: ExactSum::new(),
        sum_sq: ExactSum::new(),
    };
    for (range, slot) in expected.iter().zip(slots) {
        let p = slot.ok_or_else(|| Error::IncompleteReduction(format!("missing partial for {range:?}")))?;
        out.count += p.count;
        out.sum.merge(&p.sum);
        out.sum_sq.merge(&p.sum_sq);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partial(range: Range<u64>, values: &[f64]) -> Partial {
        let mut p = Partial::empty(range);
        for &v in values {
            p.push(v);
        }
        p
    }

    #[test]
    fn three_singletons() {
        let ranges = vec![0..1, 1..2, 2..3];
        let parts = vec![partial(0..1, &[1.0]), partial(1..2, &[2.0]), partial(2..3, &[3.0])];
        let r = reduce_deterministic(&ranges, parts).unwrap();
        assert_eq!(r.sum.to_f64(), 6.0);
        assert_eq!(r.sum_sq.to_f64(), 14.0);
        assert_eq!(r.count, 3);
    }

    #[test]
    fn arrival_order_is_irrelevant() {
        let ranges = vec![0..2, 2..4, 4..5];
        let a = partial(0..2, &[0.1, 0.7]);
        let b = partial(2..4, &[1e-9, 3.3]);
        let c = partial(4..5, &[12.5]);
        let fwd = reduce_deterministic(&ranges, vec![a.clone(), b.clone(), c.clone()]).unwrap();
        let rev = reduce_deterministic(&ranges, vec![c, b, a]).unwrap();
        assert_eq!(fwd.sum.to_f64().to_bits(), rev.sum.to_f64().to_bits());
        assert_eq!(fwd.sum_sq.to_f64().to_bits(), rev.sum_sq.to_f64().to_bits());
    }

    #[test]
    fn single_range_matches_sequential_sum() {
        let values = [1.5, 2.25, 4.0];
        let r = reduce_deterministic(std::slice::from_ref(&(0..3)), vec![partial(0..3, &values)]).unwrap();
        assert_eq!(r.sum.to_f64(), 7.75);
    }

    #[test]
    fn missing_or_duplicate_partials_fail() {
        let ranges = vec![0..1, 1..2];
        let err = reduce_deterministic(&ranges, vec![partial(0..1, &[1.0])]).unwrap_err();
        assert!(matches!(err, Error::IncompleteReduction(_)));
        let err = reduce_deterministic(&ranges, vec![partial(0..1, &[1.0]), partial(0..1, &[1.0])]).unwrap_err();
        assert!(matches!(err, Error::IncompleteReduction(_)));
        let err = reduce_deterministic(&ranges, vec![partial(0..1, &[1.0]), partial(1..2, &[])]).unwrap_err();
        assert!(matches!(err, Error::IncompleteReduction(_)));
    }
}
