use std::fmt;

use crate::error::{Error, Result};
use crate::pipeline::dataset::{domain_dir_name, DomainDataset};

/// One leave-one-domain-out fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub test: T,
}

/// Split `k` holds out the `k`-th item and trains on the remaining ones, in order.
pub fn leave_one_out<T: Clone>(items: &[T]) -> Result<Vec<Split<T>>> {
    if items.len() < 2 {
        return Err(Error::InsufficientDomains(items.len()));
    }
    Ok((0..items.len())
        .map(|k| Split {
            train: items
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, d)| d.clone())
                .collect(),
            test: items[k].clone(),
        })
        .collect())
}

pub fn leave_one_out_splits(datasets: &[DomainDataset]) -> Result<Vec<Split<DomainDataset>>> {
    leave_one_out(datasets)
}

/// Domain-id view of a split, for printing plans.
impl fmt::Display for Split<usize> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let train: Vec<String> = self.train.iter().map(|&d| domain_dir_name(d)).collect();
        write!(f, "test={} train={}", domain_dir_name(self.test), train.join(","))
    }
}
