//! Random sample-split plans.

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// L pairs of disjoint row-index sets partitioning {0..n-1}.
///
/// The first half of every split has exactly floor(n/2) rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    n: usize,
    splits: Vec<(Vec<usize>, Vec<usize>)>,
}

impl SplitPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    /// The l-th split as (D1, D2) row sets, each sorted ascending.
    pub fn split(&self, l: usize) -> (&[usize], &[usize]) {
        let (d1, d2) = &self.splits[l];
        (d1, d2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], &[usize])> {
        self.splits.iter().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }
}

/// Draw `l` independent uniform half-splits of {0..n-1}.
///
/// Splits are generated sequentially from the stream, so a plan of length 1
/// is a prefix of the plan of length L for the same stream state.
pub fn make_split_plan(n: usize, l: usize, stream: &mut RngStream) -> Result<SplitPlan> {
    if n < 4 {
        return Err(Error::TooFewObservations { need: 4, got: n });
    }
    if l == 0 {
        return Err(Error::Domain("split plan needs at least one split".into()));
    }
    let half = n / 2;
    let mut splits = Vec::with_capacity(l);
    for _ in 0..l {
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates.
        for i in (1..n).rev() {
            let j = stream.below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        let mut d1: Vec<usize> = perm[..half].to_vec();
        let mut d2: Vec<usize> = perm[half..].to_vec();
        d1.sort_unstable();
        d2.sort_unstable();
        splits.push((d1, d2));
    }
    Ok(SplitPlan { n, splits })
}
