//! The k-supplier and budgeted uniform-capacity variants, both built on the
//! cluster-tree reduction.
//!
//! Supplier: clusters are seeded at clients, adjacent midpoints are at hop
//! exactly 4, and only facilities open, so a distance-2 tree transfer becomes
//! a distance-10 transfer and clients are served within hop 11.
//!
//! Budget: the reduction runs with capacities `C_max + 1 - C(v)`. Rounding
//! only compares capacities, so under a uniform true capacity the output is
//! also a valid transfer, and preserving total fake capacity means the
//! opening cost does not grow.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{common_denominator, int, sum, Rational};
use crate::reduce::{
    best_in_neighborhood, check_clusters, cluster, reduce_with_clusters, ClusterTree, Reduction,
};
use crate::transfer::{verify_transfer, Verdict};

/// Midpoint tree over clients; members are clients within hop 2 and
/// facilities within hop 3 of their midpoint.
pub fn supplier_cluster(g: &Graph, caps: &[u64], is_facility: &[bool]) -> Result<ClusterTree> {
    let n = g.n();
    if g.edges().any(|(u, v)| is_facility[u] == is_facility[v]) {
        return Err(Error::NotBipartite);
    }
    if n == 0 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let clients: Vec<usize> = (0..n).filter(|&v| !is_facility[v]).collect();
    let Some(&seed) = clients.first() else {
        return Err(Error::InvalidParams("component has no client".into()));
    };
    let mut midpoints = alloc::vec![seed];
    let mut parent = alloc::vec![None];
    loop {
        let next = clients.iter().copied().find(|&u| {
            midpoints.iter().all(|&m| !g.within(u, m, 2))
                && midpoints.iter().any(|&m| g.hop(u, m) == Some(4))
        });
        let Some(u) = next else { break };
        let p = (0..midpoints.len())
            .filter(|&i| g.hop(u, midpoints[i]) == Some(4))
            .min_by_key(|&i| midpoints[i])
            .expect("some midpoint is at hop 4");
        midpoints.push(u);
        parent.push(Some(p));
    }
    let membership: Vec<usize> = (0..n)
        .map(|u| {
            (0..midpoints.len())
                .min_by_key(|&i| (g.hop(u, midpoints[i]).unwrap_or(u32::MAX), midpoints[i]))
                .expect("at least one midpoint")
        })
        .collect();
    let mut delegate = Vec::with_capacity(midpoints.len());
    for &v in &midpoints {
        let m = best_in_neighborhood(g, caps, is_facility, v).ok_or_else(|| {
            Error::verification("supplier clustering", format!("client {v} has no facility"))
        })?;
        delegate.push(m);
    }
    let ct = ClusterTree {
        midpoints,
        parent,
        membership,
        delegate,
        edge_hop: 4,
    };
    check_clusters(g, &ct, |u| if is_facility[u] { 3 } else { 2 })?;
    Ok(ct)
}

/// Rounds a supplier LP opening on a connected bipartite component; the
/// result is verified as an integral distance-10 transfer.
pub fn round_supplier_component(
    g: &Graph,
    caps: &[u64],
    is_facility: &[bool],
    y: &[Rational],
) -> Result<Reduction> {
    let ct = supplier_cluster(g, caps, is_facility)?;
    let red = reduce_with_clusters(g, caps, y, &ct, 3)?;
    if red.open.iter().any(|&v| !is_facility[v]) {
        return Err(Error::verification("supplier rounding", "a client was opened"));
    }
    Ok(red)
}

/// `L^(v) = C_max + 1 - C(v)` with `C_max` the largest cost, and the same
/// values scaled to integers by the common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FakeCapacities {
    pub c_bar_max: Rational,
    pub values: Vec<Rational>,
    pub scaled: Vec<u64>,
}

impl FakeCapacities {
    pub fn new(cost: &[Rational]) -> Result<Self> {
        let max = cost.iter().max().cloned().unwrap_or_else(|| int(0));
        let c_bar_max = max + Rational::one();
        let values: Vec<Rational> = cost.iter().map(|c| &c_bar_max - c).collect();
        let scale: BigInt = common_denominator(values.iter());
        let scaled = values
            .iter()
            .map(|v| {
                (v * Rational::from_integer(scale.clone()))
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| Error::TooLarge("scaled fake capacity exceeds u64".into()))
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(FakeCapacities {
            c_bar_max,
            values,
            scaled,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BudgetRounding {
    pub fake: FakeCapacities,
    pub reduction: Reduction,
    /// Opening cost of the LP solution and of the rounded set.
    pub lp_cost: Rational,
    pub cost: Rational,
}

/// Rounds a cost-minimal LP opening under uniform capacities. The output is
/// verified as a distance-8 transfer under both fake and true capacities and
/// costs no more than the LP.
pub fn round_budget_component(
    g: &Graph,
    caps: &[u64],
    cost: &[Rational],
    y: &[Rational],
) -> Result<BudgetRounding> {
    if caps.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::VariantPrecondition {
            variant: "budget",
            reason: "capacities are not uniform".into(),
        });
    }
    let fake = FakeCapacities::new(cost)?;
    let ct = cluster(g, &fake.scaled)?;
    let reduction = reduce_with_clusters(g, &fake.scaled, y, &ct, 2)?;
    let n = g.n();
    let mut y2 = alloc::vec![Rational::from_integer(0.into()); n];
    for &v in &reduction.open {
        y2[v] = Rational::one();
    }
    match verify_transfer(g, caps, y, &y2, reduction.radius)? {
        Verdict::Yes => {}
        Verdict::No(v) => {
            return Err(Error::verification(
                "budget rounding",
                format!("not a transfer under the true capacities: {v:?}"),
            ))
        }
    }
    let weighted = |x: &[Rational]| -> Rational {
        sum(&(0..n).map(|v| &cost[v] * &x[v]).collect::<Vec<_>>())
    };
    let fake_total = |x: &[Rational]| -> Rational {
        sum(&(0..n).map(|v| &fake.values[v] * &x[v]).collect::<Vec<_>>())
    };
    let lp_cost = weighted(y);
    let cost_out = weighted(&y2);
    let k = sum(y);
    // sum L^ y = C_bar k - sum C y, so the fake-capacity gain is the saving.
    if fake_total(&y2) - fake_total(y) != &lp_cost - &cost_out
        || fake_total(y) != &fake.c_bar_max * &k - &lp_cost
    {
        return Err(Error::verification("budget rounding", "fake-capacity identity fails"));
    }
    if cost_out > lp_cost {
        return Err(Error::verification(
            "budget rounding",
            format!("rounded cost {cost_out} exceeds LP cost {lp_cost}"),
        ));
    }
    Ok(BudgetRounding {
        fake,
        reduction,
        lp_cost,
        cost: cost_out,
    })
}
