//! Distance-`r` transfers: verification by a transportation max-flow,
//! composition checks, and capacity-respecting assignment extraction.
//!
//! `y'` is a distance-`r` transfer of `(G, L, y)` when `sum y' = sum y` and
//! for every `U`, `sum_{v : hop(v,U) <= r} L(v) y'_v >= sum_{u in U} L(u) y_u`.
//! The subset condition holds iff the transportation problem with supplies
//! `L(u) y_u`, demands `L(v) y'_v` and arcs between vertices at hop `<= r`
//! saturates every supply.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::Graph;
use crate::rational::{common_denominator, from_u64, scale_to_integers, sum, Rational};

/// An opening vector `y'` over the vertices of some graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferVector {
    pub values: Vec<Rational>,
}

impl TransferVector {
    pub fn new(values: Vec<Rational>) -> Self {
        TransferVector { values }
    }

    /// Indicator vector of `open` over `n` vertices.
    pub fn from_open_set(n: usize, open: &[usize]) -> Self {
        let mut values = vec![Rational::zero(); n];
        for &v in open {
            values[v] = Rational::one();
        }
        TransferVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> Rational {
        sum(&self.values)
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.is_one())
    }

    /// Vertices with value one, ascending.
    pub fn open_set(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&v| self.values[v].is_one()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Condition (a): the totals differ.
    Total { before: Rational, after: Rational },
    /// Condition (b) fails on this vertex set.
    Subset(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Violation),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    /// The violated subset, if the failure is a subset condition.
    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            Verdict::No(Violation::Subset(u)) => Some(u),
            _ => None,
        }
    }
}

pub(crate) fn check_dimensions(g: &Graph, caps: &[u64], vectors: &[&[Rational]]) -> Result<()> {
    let n = g.n();
    if caps.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} capacities for {n} vertices",
            caps.len()
        )));
    }
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {n} vertices",
                v.len()
            )));
        }
        if v.iter().any(|x| x < &Rational::zero()) {
            return Err(Error::InvalidParams("opening vector has a negative entry".into()));
        }
    }
    Ok(())
}

/// Checks whether `y2` is a distance-`r` transfer of `(g, caps, y)`.
pub fn verify_transfer(
    g: &Graph,
    caps: &[u64],
    y: &[Rational],
    y2: &[Rational],
    r: u32,
) -> Result<Verdict> {
    check_dimensions(g, caps, &[y, y2])?;
    let (before, after) = (sum(y), sum(y2));
    if before != after {
        return Ok(Verdict::No(Violation::Total { before, after }));
    }
    let n = g.n();
    let weighted = |v: &[Rational]| -> Vec<Rational> {
        (0..n).map(|u| from_u64(caps[u]) * &v[u]).collect()
    };
    let supply = weighted(y);
    let demand = weighted(y2);
    let scale = common_denominator(supply.iter().chain(demand.iter()));
    let supply = scale_to_integers(&supply, &scale);
    let demand = scale_to_integers(&demand, &scale);
    let total: BigInt = supply.iter().sum();
    if total.is_zero() {
        return Ok(Verdict::Yes);
    }

    let (source, sink) = (0, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2, source, sink);
    for u in (0..n).filter(|&u| supply[u] > BigInt::zero()) {
        net.add_arc(source, 1 + u, supply[u].clone());
        for v in (0..n).filter(|&v| demand[v] > BigInt::zero() && g.within(u, v, r)) {
            net.add_arc(1 + u, 1 + n + v, total.clone());
        }
    }
    for v in (0..n).filter(|&v| demand[v] > BigInt::zero()) {
        net.add_arc(1 + n + v, sink, demand[v].clone());
    }
    let flow = net.max_flow();
    if flow.value == total {
        return Ok(Verdict::Yes);
    }
    let witness: Vec<usize> = (0..n)
        .filter(|&u| supply[u] > BigInt::zero() && flow.source_side[1 + u])
        .collect();
    debug_assert!(!witness.is_empty());
    Ok(Verdict::No(Violation::Subset(witness)))
}

/// Given `y -> y1` at distance `r1` and `y1 -> y2` at distance `r2`, asserts
/// that `y -> y2` is a distance-`(r1 + r2)` transfer.
#[allow(clippy::too_many_arguments)]
pub fn compose_check(
    g: &Graph,
    caps: &[u64],
    y: &[Rational],
    y1: &[Rational],
    r1: u32,
    y2: &[Rational],
    r2: u32,
) -> Result<()> {
    if !verify_transfer(g, caps, y, y1, r1)?.is_yes() {
        return Err(Error::InvalidParams(format!("first step is not a distance-{r1} transfer")));
    }
    if !verify_transfer(g, caps, y1, y2, r2)?.is_yes() {
        return Err(Error::InvalidParams(format!("second step is not a distance-{r2} transfer")));
    }
    match verify_transfer(g, caps, y, y2, r1 + r2)? {
        Verdict::Yes => Ok(()),
        Verdict::No(v) => Err(Error::verification(
            "transfer composition",
            format!("composed transfer fails at distance {}: {v:?}", r1 + r2),
        )),
    }
}

/// An integral assignment of served vertices to open centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// Center of each served vertex; `None` for vertices that are not served.
    pub sigma: Vec<Option<usize>>,
    /// Number of vertices assigned to each vertex.
    pub load: Vec<u64>,
}

impl Assignment {
    /// Largest hop distance between a vertex and its center.
    pub fn hop_radius(&self, g: &Graph) -> u32 {
        self.sigma
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.map(|s| g.hop(v, s).unwrap_or(u32::MAX)))
            .max()
            .unwrap_or(0)
    }
}

/// Assigns every served vertex to an open center within hop `r + 1`,
/// respecting capacities, by a bipartite max-flow.
pub fn extract_assignment(
    g: &Graph,
    caps: &[u64],
    open: &[usize],
    served: &[bool],
    r: u32,
) -> Result<Assignment> {
    let n = g.n();
    if caps.len() != n || served.len() != n || open.iter().any(|&s| s >= n) {
        return Err(Error::DimensionMismatch(format!("assignment input for {n} vertices")));
    }
    let clients: Vec<usize> = (0..n).filter(|&v| served[v]).collect();
    let (source, sink) = (0, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2, source, sink);
    let mut pairs = Vec::new();
    for &v in &clients {
        net.add_arc(source, 1 + v, 1u64);
        for &s in open {
            if g.within(v, s, r + 1) {
                let id = net.add_arc(1 + v, 1 + n + s, 1);
                pairs.push((id, v, s));
            }
        }
    }
    for &s in open {
        net.add_arc(1 + n + s, sink, caps[s]);
    }
    let flow = net.max_flow();
    if flow.value < clients.len() as u64 {
        let witness = clients
            .iter()
            .copied()
            .filter(|&v| flow.source_side[1 + v])
            .collect();
        return Err(Error::NoAssignment { witness });
    }
    let mut sigma = vec![None; n];
    let mut load = vec![0; n];
    for (id, v, s) in pairs {
        if flow.arc_flow[id] == 1 {
            sigma[v] = Some(s);
            load[s] += 1;
        }
    }
    let assignment = Assignment { sigma, load };
    validate_assignment(g, caps, open, served, &assignment, r + 1)?;
    Ok(assignment)
}

/// Independent check: totality on served vertices, open images, loads within
/// capacity, and every vertex within `max_hop` of its center.
pub fn validate_assignment(
    g: &Graph,
    caps: &[u64],
    open: &[usize],
    served: &[bool],
    a: &Assignment,
    max_hop: u32,
) -> Result<()> {
    let n = g.n();
    let fail = |d: alloc::string::String| Err(Error::verification("assignment", d));
    if a.sigma.len() != n || a.load.len() != n {
        return fail(format!("assignment sized for {} vertices, expected {n}", a.sigma.len()));
    }
    let mut is_open = vec![false; n];
    for &s in open {
        is_open[s] = true;
    }
    let mut load = vec![0u64; n];
    for v in 0..n {
        match (served[v], a.sigma[v]) {
            (true, None) => return fail(format!("vertex {v} is unassigned")),
            (false, Some(_)) => return fail(format!("vertex {v} is not served but assigned")),
            (true, Some(s)) => {
                if !is_open[s] {
                    return fail(format!("vertex {v} assigned to closed {s}"));
                }
                if !g.within(v, s, max_hop) {
                    return fail(format!("vertex {v} assigned beyond hop {max_hop}"));
                }
                load[s] += 1;
            }
            (false, None) => {}
        }
    }
    for s in 0..n {
        if load[s] != a.load[s] || load[s] > caps[s] {
            return fail(format!("center {s} has load {} with capacity {}", load[s], caps[s]));
        }
    }
    Ok(())
}
