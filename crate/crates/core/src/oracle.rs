//! Ground truth for small instances: exact optimal radii by enumeration,
//! the literal subset check of the transfer condition, and seeded instance
//! generators.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{hop_metric, Graph};
use crate::instance::{InstanceData, MetricInstance};
use crate::pipeline::{resolve_variant, Variant};
use crate::rational::{common_denominator, from_u64, int, ratio, scale_to_integers, sum, Rational};
use crate::transfer::{check_dimensions, Verdict, Violation};

/// Upper limit on the number of opening sets either exact solver enumerates.
pub const SUBSET_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub radius: Rational,
    pub opens: Vec<usize>,
    pub assignment: Vec<Option<usize>>,
}

struct Problem<'a> {
    inst: &'a MetricInstance,
    served: Vec<usize>,
    openable: Vec<usize>,
    /// Largest opening set size (`k`, or all openable vertices with a budget).
    max_size: usize,
    budget: Option<(&'a [Rational], &'a Rational)>,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl<'a> Problem<'a> {
    fn new(inst: &'a MetricInstance, variant: Variant) -> Result<Self> {
        let variant = resolve_variant(inst, variant)?;
        let n = inst.n();
        let supplier = variant == Variant::Supplier;
        let served = (0..n).filter(|&v| !supplier || inst.is_client(v)).collect();
        let openable: Vec<usize> = (0..n)
            .filter(|&v| (!supplier || inst.is_facility(v)) && inst.capacities()[v] > 0)
            .collect();
        let budget = match variant {
            Variant::Budget => Some((
                inst.costs().expect("resolved"),
                inst.budget().expect("resolved"),
            )),
            _ => None,
        };
        let max_size = if budget.is_some() {
            openable.len()
        } else {
            inst.k().min(openable.len())
        };
        let count: u128 = (0..=max_size).map(|s| binomial(openable.len(), s)).sum();
        if count > SUBSET_LIMIT {
            return Err(Error::TooLarge(format!("{count} opening sets")));
        }
        Ok(Problem {
            inst,
            served,
            openable,
            max_size,
            budget,
        })
    }

    fn affordable(&self, set: &[usize]) -> bool {
        match self.budget {
            None => true,
            Some((cost, b)) => &sum(&set.iter().map(|&v| cost[v].clone()).collect::<Vec<_>>()) <= b,
        }
    }

    /// Every opening set of size `1..=max_size` in lexicographic order of
    /// (size, members), filtered by the budget.
    fn for_each_set<F: FnMut(&[usize]) -> bool>(&self, mut f: F) {
        let m = self.openable.len();
        for size in 1..=self.max_size {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let set: Vec<usize> = idx.iter().map(|&i| self.openable[i]).collect();
                if self.affordable(&set) && !f(&set) {
                    return;
                }
                // Next combination.
                let mut i = size;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if idx[i] != i + m - size {
                        break;
                    }
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX || idx[i] == i + m - size {
                    break;
                }
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }

    /// Capacity-respecting assignment of all served vertices to `open`
    /// within distance `rho`, by bipartite max-flow.
    fn assign(&self, open: &[usize], rho: &Rational) -> Option<Vec<Option<usize>>> {
        let inst = self.inst;
        let caps = inst.capacities();
        let cap_total: u64 = open.iter().map(|&s| caps[s]).sum();
        if cap_total < self.served.len() as u64 {
            return None;
        }
        if self
            .served
            .iter()
            .any(|&v| open.iter().all(|&s| inst.dist(v, s) > rho))
        {
            return None;
        }
        let (c, o) = (self.served.len(), open.len());
        let (source, sink) = (0, c + o + 1);
        let mut net = FlowNetwork::new(c + o + 2, source, sink);
        let mut arcs = Vec::new();
        for (i, &v) in self.served.iter().enumerate() {
            net.add_arc(source, 1 + i, 1u64);
            for (j, &s) in open.iter().enumerate() {
                if inst.dist(v, s) <= rho {
                    arcs.push((net.add_arc(1 + i, 1 + c + j, 1), v, s));
                }
            }
        }
        for (j, &s) in open.iter().enumerate() {
            net.add_arc(1 + c + j, sink, caps[s]);
        }
        let flow = net.max_flow();
        if flow.value != c as u64 {
            return None;
        }
        let mut sigma = vec![None; inst.n()];
        for (id, v, s) in arcs {
            if flow.arc_flow[id] == 1 {
                sigma[v] = Some(s);
            }
        }
        Some(sigma)
    }
}

/// Exact optimum: radii ascending, and for each radius every opening set.
pub fn exact_opt(inst: &MetricInstance, variant: Variant) -> Result<OptResult> {
    let p = Problem::new(inst, variant)?;
    for rho in inst.candidate_thresholds() {
        let mut found = None;
        p.for_each_set(|set| match p.assign(set, &rho) {
            Some(sigma) => {
                found = Some((set.to_vec(), sigma));
                false
            }
            None => true,
        });
        if let Some((opens, assignment)) = found {
            return Ok(OptResult {
                radius: rho,
                opens,
                assignment,
            });
        }
    }
    Err(Error::Infeasible)
}

/// Exact optimum computed in the other order: for each opening set, its
/// smallest feasible radius; the minimum over all sets.
pub fn exact_opt_by_subsets(inst: &MetricInstance, variant: Variant) -> Result<OptResult> {
    let p = Problem::new(inst, variant)?;
    let radii = inst.candidate_thresholds();
    let mut best: Option<OptResult> = None;
    p.for_each_set(|set| {
        for rho in &radii {
            if best.as_ref().is_some_and(|b| rho >= &b.radius) {
                break;
            }
            if let Some(sigma) = p.assign(set, rho) {
                best = Some(OptResult {
                    radius: rho.clone(),
                    opens: set.to_vec(),
                    assignment: sigma,
                });
                break;
            }
        }
        true
    });
    best.ok_or(Error::Infeasible)
}

/// Largest vertex count accepted by [`exhaustive_transfer_check`].
pub const EXHAUSTIVE_LIMIT: usize = 15;

/// The transfer condition checked literally over all `2^n` subsets; the
/// witness is the violated subset with the smallest bitmask.
pub fn exhaustive_transfer_check(
    g: &Graph,
    caps: &[u64],
    y: &[Rational],
    y2: &[Rational],
    r: u32,
) -> Result<Verdict> {
    check_dimensions(g, caps, &[y, y2])?;
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge(format!("{n} vertices")));
    }
    let (before, after) = (sum(y), sum(y2));
    if before != after {
        return Ok(Verdict::No(Violation::Total { before, after }));
    }
    let w1: Vec<Rational> = (0..n).map(|u| from_u64(caps[u]) * &y[u]).collect();
    let w2: Vec<Rational> = (0..n).map(|u| from_u64(caps[u]) * &y2[u]).collect();
    let scale = common_denominator(w1.iter().chain(w2.iter()));
    let w1 = scale_to_integers(&w1, &scale);
    let w2 = scale_to_integers(&w2, &scale);
    let ball: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&v| g.within(u, v, r)).fold(0, |m, v| m | 1 << v))
        .collect();
    let size = 1usize << n;
    let mut covered = vec![0u32; size];
    let mut demand = vec![BigInt::zero(); size];
    let mut supply = vec![BigInt::zero(); size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        covered[mask] = covered[rest] | ball[low];
        demand[mask] = &demand[rest] + &w1[low];
        supply[mask] = &supply[rest] + &w2[low];
    }
    for mask in 1..size {
        if demand[mask] > supply[covered[mask] as usize] {
            let witness = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            return Ok(Verdict::No(Violation::Subset(witness)));
        }
    }
    Ok(Verdict::Yes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    GridL1,
    RandomGraphHop,
    ZeroLRandom,
    SupplierRandom,
    BudgetRandom,
    Star6,
    Gap2x3,
}

impl GenKind {
    pub const ALL: [GenKind; 7] = [
        GenKind::GridL1,
        GenKind::RandomGraphHop,
        GenKind::ZeroLRandom,
        GenKind::SupplierRandom,
        GenKind::BudgetRandom,
        GenKind::Star6,
        GenKind::Gap2x3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::GridL1 => "grid_l1",
            GenKind::RandomGraphHop => "random_graph_hop",
            GenKind::ZeroLRandom => "zerol_random",
            GenKind::SupplierRandom => "supplier_random",
            GenKind::BudgetRandom => "budget_random",
            GenKind::Star6 => "star6",
            GenKind::Gap2x3 => "gap2x3",
        }
    }
}

impl core::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown generator {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    /// Center count; drawn at random when absent.
    pub k: Option<usize>,
    pub seed: u64,
    /// Inter-group distance of `gap2x3` (default 100).
    pub c: Option<Rational>,
}

impl GenParams {
    pub fn new(n: usize, seed: u64) -> Self {
        GenParams {
            n,
            k: None,
            seed,
            c: None,
        }
    }
}

/// Capacities in `0..=4` summing to at least `need`.
fn random_capacities(rng: &mut ChaCha8Rng, n: usize, need: usize) -> Vec<u64> {
    let mut caps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    while (caps.iter().sum::<u64>() as usize) < need {
        let v = rng.gen_range(0..n);
        if caps[v] < 4 {
            caps[v] += 1;
        }
    }
    caps
}

/// Least `k` whose `k` largest capacities reach `need`.
fn min_k_by_capacity(caps: &[u64], need: usize) -> usize {
    let mut sorted = caps.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut total = 0u64;
    for (i, c) in sorted.iter().enumerate() {
        total += c;
        if total as usize >= need {
            return i + 1;
        }
    }
    sorted.len()
}

fn pick_k(rng: &mut ChaCha8Rng, params: &GenParams, lo: usize, hi: usize) -> usize {
    params.k.unwrap_or_else(|| rng.gen_range(lo.max(1)..=hi.max(lo).max(1)))
}

fn grid_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(i64, i64)> {
    let side = n.max(3) as i64;
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

fn l1_matrix(pts: &[(i64, i64)]) -> Vec<Rational> {
    let mut dist = Vec::with_capacity(pts.len() * pts.len());
    for a in pts {
        for b in pts {
            dist.push(int((a.0 - b.0).abs() + (a.1 - b.1).abs()));
        }
    }
    dist
}

fn random_connected_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.25) && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn build(data: InstanceData) -> Result<MetricInstance> {
    Ok(MetricInstance::new(data)?)
}

/// Deterministic instance of the given kind.
pub fn generate(kind: GenKind, params: &GenParams) -> Result<MetricInstance> {
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let needs_n = !matches!(kind, GenKind::Star6 | GenKind::Gap2x3);
    if needs_n && n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    match kind {
        GenKind::GridL1 | GenKind::RandomGraphHop => {
            let dist = if kind == GenKind::GridL1 {
                l1_matrix(&grid_points(&mut rng, n))
            } else {
                hop_metric(n, &random_connected_edges(&mut rng, n))?
            };
            let capacity = random_capacities(&mut rng, n, n);
            let lo = min_k_by_capacity(&capacity, n);
            let k = pick_k(&mut rng, params, lo, n);
            build(InstanceData {
                dist,
                capacity,
                k,
                ..Default::default()
            })
        }
        GenKind::ZeroLRandom => {
            let dist = hop_metric(n, &random_connected_edges(&mut rng, n))?;
            let level: u64 = rng.gen_range(2..=4);
            let mut capacity: Vec<u64> =
                (0..n).map(|_| if rng.gen_bool(0.5) { level } else { 0 }).collect();
            while (capacity.iter().sum::<u64>() as usize) < n {
                let v = rng.gen_range(0..n);
                capacity[v] = level;
            }
            let lo = min_k_by_capacity(&capacity, n);
            let k = pick_k(&mut rng, params, lo, capacity.iter().filter(|&&c| c > 0).count());
            build(InstanceData {
                dist,
                capacity,
                k,
                ..Default::default()
            })
        }
        GenKind::SupplierRandom => {
            if n < 2 {
                return Err(Error::InvalidParams("supplier instances need n >= 2".into()));
            }
            let lo = n.div_ceil(5);
            let facilities = rng.gen_range(lo..=(n / 2).clamp(lo, 6.max(lo)));
            let clients = n - facilities;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut facility = vec![false; n];
            for &v in &order[..facilities] {
                facility[v] = true;
            }
            let dist = l1_matrix(&grid_points(&mut rng, n));
            let mut fac_caps: Vec<u64> = (0..facilities).map(|_| rng.gen_range(1..=4)).collect();
            while (fac_caps.iter().sum::<u64>() as usize) < clients {
                let i = rng.gen_range(0..facilities);
                if fac_caps[i] < 4 {
                    fac_caps[i] += 1;
                }
            }
            let mut capacity = vec![0; n];
            for (i, &v) in order[..facilities].iter().enumerate() {
                capacity[v] = fac_caps[i];
            }
            let lo = min_k_by_capacity(&fac_caps, clients);
            let k = pick_k(&mut rng, params, lo, facilities);
            build(InstanceData {
                dist,
                capacity,
                k,
                facility: Some(facility),
                ..Default::default()
            })
        }
        GenKind::BudgetRandom => {
            let dist = l1_matrix(&grid_points(&mut rng, n));
            let level: u64 = rng.gen_range(1..=3);
            let cost: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(1..=20), 2)).collect();
            let lo = n.div_ceil(level as usize);
            let count = pick_k(&mut rng, params, lo, n);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let budget = sum(&order[..count.min(n)].iter().map(|&v| cost[v].clone()).collect::<Vec<_>>());
            build(InstanceData {
                dist,
                capacity: vec![level; n],
                k: count,
                cost: Some(cost),
                budget: Some(budget),
                ..Default::default()
            })
        }
        GenKind::Star6 => {
            let edges: Vec<(usize, usize)> = (1..7).map(|v| (0, v)).collect();
            build(InstanceData {
                dist: hop_metric(7, &edges)?,
                capacity: vec![2; 7],
                k: params.k.unwrap_or(5),
                ..Default::default()
            })
        }
        GenKind::Gap2x3 => {
            let c = params.c.clone().unwrap_or_else(|| int(100));
            if c < int(1) {
                return Err(Error::InvalidParams("gap distance must be at least 1".into()));
            }
            let mut dist = Vec::with_capacity(36);
            for u in 0..6 {
                for v in 0..6 {
                    dist.push(if u == v {
                        int(0)
                    } else if u / 3 == v / 3 {
                        int(1)
                    } else {
                        c.clone()
                    });
                }
            }
            build(InstanceData {
                dist,
                capacity: vec![2; 6],
                k: params.k.unwrap_or(3),
                ..Default::default()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::verify_transfer;

    #[test]
    fn singleton_opt() {
        let inst = MetricInstance::new(InstanceData {
            dist: vec![int(0)],
            capacity: vec![1],
            k: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(exact_opt(&inst, Variant::Auto).unwrap().radius, int(0));
    }

    #[test]
    fn gap_opt_is_c() {
        let inst = generate(GenKind::Gap2x3, &GenParams::new(6, 0)).unwrap();
        assert_eq!(exact_opt(&inst, Variant::Center).unwrap().radius, int(100));
        assert_eq!(exact_opt_by_subsets(&inst, Variant::Center).unwrap().radius, int(100));
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        for kind in GenKind::ALL {
            let p = GenParams::new(8, 1);
            let a = generate(kind, &p).unwrap();
            let b = generate(kind, &p).unwrap();
            assert_eq!(a, b, "{}", kind.name());
        }
        let star = generate(GenKind::Star6, &GenParams::new(0, 0)).unwrap();
        assert_eq!((star.n(), star.k()), (7, 5));
        assert!(star.uniform_capacity().is_some());
    }

    #[test]
    fn orders_agree_on_small_grids() {
        for seed in 0..5 {
            let inst = generate(GenKind::GridL1, &GenParams::new(7, seed)).unwrap();
            let a = exact_opt(&inst, Variant::Center).unwrap();
            let b = exact_opt_by_subsets(&inst, Variant::Center).unwrap();
            assert_eq!(a.radius, b.radius);
        }
    }

    #[test]
    fn exhaustive_matches_flow_on_star() {
        let g = Graph::from_edges(7, (1..7).map(|v| (0, v)));
        let mut y = vec![ratio(2, 3); 7];
        y[0] = int(1);
        let mut y2 = vec![int(1); 7];
        y2[5] = int(0);
        y2[6] = int(0);
        for r in 0..3 {
            let a = exhaustive_transfer_check(&g, &[1; 7], &y, &y2, r).unwrap();
            let b = verify_transfer(&g, &[1; 7], &y, &y2, r).unwrap();
            assert_eq!(a.is_yes(), b.is_yes());
        }
    }

    #[test]
    fn far_move_fails_on_singleton() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let v = exhaustive_transfer_check(
            &g,
            &[1; 3],
            &[int(1), int(0), int(0)],
            &[int(0), int(0), int(1)],
            1,
        )
        .unwrap();
        assert_eq!(v.witness(), Some(&[0][..]));
    }
}
