//! Metric instances and their validation.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Raw instance data. Turned into a [`MetricInstance`] by validation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceData {
    /// Row-major `n x n` distance matrix.
    pub dist: Vec<Rational>,
    pub capacity: Vec<u64>,
    pub k: usize,
    pub cost: Option<Vec<Rational>>,
    pub budget: Option<Rational>,
    pub facility: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance has no vertices")]
    Empty,
    #[error("{what}: expected {expected} entries, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("c({u},{v}) is negative")]
    NegativeDistance { u: usize, v: usize },
    #[error("c({u},{u}) must be zero")]
    NonZeroDiagonal { u: usize },
    #[error("c({u},{v}) differs from c({v},{u})")]
    Asymmetric { u: usize, v: usize },
    #[error("triangle inequality fails: c({u},{w}) > c({u},{v}) + c({v},{w})")]
    Triangle { u: usize, v: usize, w: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("total capacity overflows a 64-bit integer")]
    CapacityOverflow,
    #[error("total capacity {available} cannot serve {needed} vertices")]
    InsufficientCapacity { available: u64, needed: usize },
    #[error("opening cost of vertex {v} is negative")]
    NegativeCost { v: usize },
    #[error("budget is negative")]
    NegativeBudget,
    #[error("COST and BUDGET must be given together")]
    CostWithoutBudget,
    #[error("client {v} carries nonzero capacity")]
    ClientCapacity { v: usize },
    #[error("graph metric is disconnected: vertex {v} is unreachable from vertex 0")]
    Disconnected { v: usize },
}

/// A validated capacitated k-center instance over an exact metric.
///
/// `c` is symmetric, zero on the diagonal and satisfies the triangle
/// inequality. When facility flags are present, only facilities may carry
/// capacity and only clients need to be served.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricInstance {
    n: usize,
    data: InstanceData,
}

impl MetricInstance {
    pub fn new(data: InstanceData) -> Result<Self, InstanceError> {
        let n = data.capacity.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if data.dist.len() != n * n {
            return Err(InstanceError::Dimension {
                what: "distance matrix",
                expected: n * n,
                found: data.dist.len(),
            });
        }
        let c = |u: usize, v: usize| &data.dist[u * n + v];
        for u in 0..n {
            if !c(u, u).is_zero() {
                return Err(InstanceError::NonZeroDiagonal { u });
            }
            for v in 0..n {
                if c(u, v).is_negative() {
                    return Err(InstanceError::NegativeDistance { u, v });
                }
                if c(u, v) != c(v, u) {
                    return Err(InstanceError::Asymmetric {
                        u: u.min(v),
                        v: u.max(v),
                    });
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if c(u, w) > &(c(u, v) + c(v, w)) {
                        return Err(InstanceError::Triangle { u, v, w });
                    }
                }
            }
        }
        if data.k == 0 {
            return Err(InstanceError::ZeroK);
        }
        match (&data.cost, &data.budget) {
            (Some(cost), Some(budget)) => {
                if cost.len() != n {
                    return Err(InstanceError::Dimension {
                        what: "COST",
                        expected: n,
                        found: cost.len(),
                    });
                }
                if let Some(v) = cost.iter().position(|w| w.is_negative()) {
                    return Err(InstanceError::NegativeCost { v });
                }
                if budget.is_negative() {
                    return Err(InstanceError::NegativeBudget);
                }
            }
            (None, None) => {}
            _ => return Err(InstanceError::CostWithoutBudget),
        }
        let mut available: u64 = 0;
        let mut needed = n;
        if let Some(flags) = &data.facility {
            if flags.len() != n {
                return Err(InstanceError::Dimension {
                    what: "FACILITY",
                    expected: n,
                    found: flags.len(),
                });
            }
            needed = flags.iter().filter(|f| !**f).count();
            for v in 0..n {
                if !flags[v] && data.capacity[v] != 0 {
                    return Err(InstanceError::ClientCapacity { v });
                }
            }
        }
        for &l in &data.capacity {
            available = available
                .checked_add(l)
                .ok_or(InstanceError::CapacityOverflow)?;
        }
        if (available as u128) < needed as u128 {
            return Err(InstanceError::InsufficientCapacity { available, needed });
        }
        Ok(MetricInstance { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.data.k
    }

    #[inline]
    pub fn dist(&self, u: usize, v: usize) -> &Rational {
        &self.data.dist[u * self.n + v]
    }

    pub fn capacities(&self) -> &[u64] {
        &self.data.capacity
    }

    pub fn costs(&self) -> Option<&[Rational]> {
        self.data.cost.as_deref()
    }

    pub fn budget(&self) -> Option<&Rational> {
        self.data.budget.as_ref()
    }

    pub fn facility_flags(&self) -> Option<&[bool]> {
        self.data.facility.as_deref()
    }

    /// Every vertex is a facility unless flags say otherwise.
    pub fn is_facility(&self, v: usize) -> bool {
        self.data.facility.as_ref().is_none_or(|f| f[v])
    }

    /// Every vertex is a client unless flags say otherwise.
    pub fn is_client(&self, v: usize) -> bool {
        self.data.facility.as_ref().is_none_or(|f| !f[v])
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn into_data(self) -> InstanceData {
        self.data
    }

    /// `Some(L)` when every capacity is `0` or the same `L > 0`.
    pub fn zero_l_capacity(&self) -> Option<u64> {
        zero_l_value(&self.data.capacity)
    }

    /// `Some(L)` when every capacity equals `L > 0`.
    pub fn uniform_capacity(&self) -> Option<u64> {
        let first = *self.data.capacity.first()?;
        (first > 0 && self.data.capacity.iter().all(|&l| l == first)).then_some(first)
    }

    /// Sorted, deduplicated pairwise distances including `0`. The optimum
    /// radius is always one of these values.
    pub fn candidate_thresholds(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::with_capacity(self.n * (self.n - 1) / 2 + 1);
        out.push(Rational::zero());
        for u in 0..self.n {
            for v in u + 1..self.n {
                out.push(self.dist(u, v).clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

pub(crate) fn zero_l_value(capacity: &[u64]) -> Option<u64> {
    let mut level = None;
    for &l in capacity {
        if l == 0 {
            continue;
        }
        match level {
            None => level = Some(l),
            Some(x) if x == l => {}
            Some(_) => return None,
        }
    }
    level
}
