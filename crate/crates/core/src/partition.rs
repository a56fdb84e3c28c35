//! Decomposition of the decision vector into contiguous blocks, one per
//! processor. Immutable after construction.

use std::ops::Range;

use crate::error::Error;
use crate::Result;

/// How to build a partition of a given total dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionSpec {
    /// Distribute the dimension over `n` blocks as evenly as possible; the
    /// first `m mod n` blocks get one extra element.
    Equal(usize),
    /// Use the given block sizes verbatim.
    Explicit(Vec<usize>),
}

/// Contiguous block decomposition with cached prefix offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>, // length n+1, offsets[0] = 0, offsets[n] = m
}

impl BlockPartition {
    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, block: usize) -> Result<usize> {
        self.check_block(block)?;
        Ok(self.sizes[block])
    }

    /// Index range [offset, offset + size) of the given block.
    pub fn range(&self, block: usize) -> Result<Range<usize>> {
        self.check_block(block)?;
        Ok(self.offsets[block]..self.offsets[block + 1])
    }

    /// Borrow the slice of `x` belonging to the given block.
    pub fn view<'a>(&self, x: &'a [f64], block: usize) -> Result<&'a [f64]> {
        if x.len() != self.total_dim() {
            return Err(Error::DimensionMismatch { expected: self.total_dim(), got: x.len() });
        }
        Ok(&x[self.range(block)?])
    }

    fn check_block(&self, block: usize) -> Result<()> {
        if block >= self.sizes.len() {
            return Err(Error::BlockIndexOutOfRange { index: block, count: self.sizes.len() });
        }
        Ok(())
    }
}

/// Build a partition of ℝ^m.
pub fn make_partition(total_dim: usize, spec: PartitionSpec) -> Result<BlockPartition> {
    if total_dim == 0 {
        return Err(Error::InvalidPartition("total dimension must be positive".into()));
    }
    let sizes = match spec {
        PartitionSpec::Equal(n) => {
            if n == 0 {
                return Err(Error::InvalidPartition("block count must be positive".into()));
            }
            if n > total_dim {
                return Err(Error::InvalidPartition(format!(
                    "cannot split dimension {total_dim} into {n} nonempty blocks"
                )));
            }
            let base = total_dim / n;
            let extra = total_dim % n;
            (0..n).map(|i| base + usize::from(i < extra)).collect()
        }
        PartitionSpec::Explicit(sizes) => {
            if sizes.is_empty() {
                return Err(Error::InvalidPartition("explicit partition needs at least one block".into()));
            }
            if sizes.contains(&0) {
                return Err(Error::InvalidPartition("every block size must be at least 1".into()));
            }
            let sum: usize = sizes.iter().sum();
            if sum != total_dim {
                return Err(Error::InvalidPartition(format!(
                    "block sizes sum to {sum}, expected {total_dim}"
                )));
            }
            sizes
        }
    };
    let mut offsets = Vec::with_capacity(sizes.len() + 1);
    offsets.push(0);
    for &s in &sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    Ok(BlockPartition { sizes, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_split_examples() {
        let p = make_partition(5, PartitionSpec::Equal(2)).unwrap();
        assert_eq!(p.sizes(), &[3, 2]);
        let p4 = make_partition(4, PartitionSpec::Explicit(vec![1, 1, 1, 1])).unwrap();
        assert_eq!(p4.block_count(), 4);
        let big = make_partition(2000, PartitionSpec::Equal(20)).unwrap();
        assert!(big.sizes().iter().all(|&s| s == 100));
    }

    #[test]
    fn views_slice_contiguously() {
        let p = make_partition(4, PartitionSpec::Explicit(vec![2, 2])).unwrap();
        assert_eq!(p.view(&[1.0, 2.0, 3.0, 4.0], 1).unwrap(), &[3.0, 4.0]);
        let p31 = make_partition(4, PartitionSpec::Explicit(vec![3, 1])).unwrap();
        assert_eq!(p31.view(&[10.0, 11.0, 12.0, 13.0], 0).unwrap(), &[10.0, 11.0, 12.0]);
        let p11 = make_partition(2, PartitionSpec::Explicit(vec![1, 1])).unwrap();
        assert_eq!(p11.view(&[7.0, 9.0], 0).unwrap(), &[7.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(make_partition(2, PartitionSpec::Equal(3)).is_err());
        assert!(make_partition(4, PartitionSpec::Explicit(vec![2, 1])).is_err());
        assert!(make_partition(4, PartitionSpec::Explicit(vec![2, 0, 2])).is_err());
        let p = make_partition(4, PartitionSpec::Equal(2)).unwrap();
        assert!(p.range(2).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_scatter_gather(m in 1usize..40, n in 1usize..40) {
            prop_assume!(n <= m);
            let p = make_partition(m, PartitionSpec::Equal(n)).unwrap();
            let x: Vec<f64> = (0..m).map(|k| k as f64 * 0.5 - 3.0).collect();
            let mut rebuilt = vec![0.0; m];
            for b in 0..p.block_count() {
                let r = p.range(b).unwrap();
                rebuilt[r.clone()].copy_from_slice(p.view(&x, b).unwrap());
            }
            prop_assert_eq!(rebuilt, x);
        }

        #[test]
        fn equal_split_sizes_differ_by_at_most_one(m in 1usize..500, n in 1usize..50) {
            prop_assume!(n <= m);
            let p = make_partition(m, PartitionSpec::Equal(n)).unwrap();
            let min = p.sizes().iter().min().unwrap();
            let max = p.sizes().iter().max().unwrap();
            prop_assert!(max - min <= 1);
            prop_assert_eq!(p.sizes().iter().sum::<usize>(), m);
        }
    }
}
