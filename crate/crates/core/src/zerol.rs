//! The `{0, L}` special case: all capacities are `0` or a single `L`.
//!
//! After removing edges between 0-nodes, clusters are seeded at midpoints
//! at distance 2 from everything allotted so far, and openings are rounded
//! bottom-up over the cluster tree. Every movement of opening is tracked as
//! parcels keyed by the vertex the opening started at, which bounds the
//! distance each unit travels by 5.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::zero_l_value;
use crate::rational::{sum, Rational};
use crate::transfer::{verify_transfer, Verdict};

/// Drops every edge between two 0-nodes.
pub fn zerol_preprocess(g: &Graph, caps: &[u64]) -> Result<Graph> {
    if zero_l_value(caps).is_none() {
        return Err(Error::NotZeroL);
    }
    Ok(g.filter_edges(|u, v| caps[u] > 0 || caps[v] > 0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroLClustering {
    /// Midpoint of each cluster, in creation order.
    pub midpoints: Vec<usize>,
    /// Aggregation target `p(v)` of each cluster.
    pub p: Vec<usize>,
    /// Parent cluster; `None` for the root (cluster 0).
    pub parent: Vec<Option<usize>>,
    /// `pi1(v)` of each non-root cluster.
    pub pi1: Vec<Option<usize>>,
    /// `pi2(u)` of each vertex allotted after the main loop.
    pub pi2: Vec<Option<usize>>,
    /// Cluster of each allotted vertex.
    pub alpha: Vec<Option<usize>>,
    /// Vertices allotted when the main loop ended.
    pub allotted_star: Vec<bool>,
}

impl ZeroLClustering {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&u| self.alpha[u] == Some(cluster))
            .collect()
    }

    pub fn children(&self, cluster: usize) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&w| self.parent[w] == Some(cluster))
            .collect()
    }
}

fn l_neighborhood(g: &Graph, is_l: &[bool], v: usize) -> Vec<usize> {
    g.closed_neighborhood(v).into_iter().filter(|&u| is_l[u]).collect()
}

fn cluster_error(detail: String) -> Error {
    Error::verification("zero-L clustering", detail)
}

/// Clusters a connected, preprocessed `{0, L}` component.
pub fn zerol_cluster(g: &Graph, caps: &[u64]) -> Result<ZeroLClustering> {
    let n = g.n();
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let is_l: Vec<bool> = caps.iter().map(|&c| c > 0).collect();
    let Some(first) = (0..n).find(|&v| is_l[v]) else {
        return Err(cluster_error("component has no L-node".into()));
    };
    let mut alpha: Vec<Option<usize>> = vec![None; n];
    let mut allotted: Vec<usize> = Vec::new();
    let mut midpoints = vec![first];
    let mut p = vec![first];
    let mut parent = vec![None];
    let mut pi1 = vec![None];
    for u in l_neighborhood(g, &is_l, first) {
        alpha[u] = Some(0);
        allotted.push(u);
    }

    let dist = |allotted: &[usize], v: usize| g.hop_to_set(v, allotted).unwrap_or(u32::MAX);
    while (0..n).any(|w| is_l[w] && dist(&allotted, w) >= 2) {
        let v = (0..n)
            .find(|&v| dist(&allotted, v) == 2)
            .ok_or_else(|| cluster_error("no vertex at distance 2 from the allotted set".into()))?;
        let u_star = *allotted
            .iter()
            .filter(|&&u| g.hop(u, v) == Some(2))
            .min()
            .expect("dist(v) = 2");
        let id = midpoints.len();
        let mut new_members = vec![v];
        new_members.extend(l_neighborhood(g, &is_l, v).into_iter().filter(|&u| u != v));
        for &u in &new_members {
            if alpha[u].is_some() {
                return Err(cluster_error(format!("vertex {u} allotted twice")));
            }
            alpha[u] = Some(id);
            allotted.push(u);
        }
        let pv = if is_l[v] {
            v
        } else {
            let nu = g.closed_neighborhood(u_star);
            g.closed_neighborhood(v)
                .into_iter()
                .find(|w| nu.binary_search(w).is_ok())
                .expect("hop(v, u*) = 2")
        };
        parent.push(Some(alpha[u_star].expect("u* is allotted")));
        midpoints.push(v);
        p.push(pv);
        pi1.push(Some(u_star));
    }

    let allotted_star: Vec<bool> = (0..n).map(|u| alpha[u].is_some()).collect();
    let mut pi2 = vec![None; n];
    for v in (0..n).filter(|&v| is_l[v] && !allotted_star[v]) {
        let u = g
            .closed_neighborhood(v)
            .into_iter()
            .find(|&u| allotted_star[u])
            .ok_or_else(|| cluster_error(format!("L-node {v} has no allotted neighbor")))?;
        alpha[v] = alpha[u];
        pi2[v] = Some(u);
    }
    let cl = ZeroLClustering {
        midpoints,
        p,
        parent,
        pi1,
        pi2,
        alpha,
        allotted_star,
    };
    check_zerol_clustering(g, caps, &cl)?;
    Ok(cl)
}

/// Asserts the five clustering properties and the `pi1`-to-`p` distances:
///
/// - (i) `N^L+(v)` of each midpoint lies in its own cluster;
/// - (ii) every L-node is allotted, and a 0-node only as a midpoint;
/// - (iii) `p(v)` lies in `N^L+(v)`;
/// - (iv) every `pi1` and `pi2` target lies in some `N^L+`;
/// - (v) a cluster is `N^L+(v)`, plus `v` when it is a 0-node, plus the
///   vertices whose `pi2` points into `N^L+(v)`.
pub fn check_zerol_clustering(g: &Graph, caps: &[u64], cl: &ZeroLClustering) -> Result<()> {
    let n = g.n();
    let is_l: Vec<bool> = caps.iter().map(|&c| c > 0).collect();
    let nl: Vec<Vec<usize>> = cl.midpoints.iter().map(|&v| l_neighborhood(g, &is_l, v)).collect();
    let in_some_nl = |u: usize| nl.iter().any(|s| s.contains(&u));
    for (i, &v) in cl.midpoints.iter().enumerate() {
        // (i) N^{L+}(v) inside C_v; disjointness holds since alpha is a function.
        if nl[i].iter().any(|&u| cl.alpha[u] != Some(i)) {
            return Err(cluster_error(format!("(i): N^L+({v}) leaves cluster {i}")));
        }
        // (iii)
        if !nl[i].contains(&cl.p[i]) {
            return Err(cluster_error(format!("(iii): p({v}) not in N^L+({v})")));
        }
        // (v)
        let mut expected: BTreeSet<usize> = nl[i].iter().copied().collect();
        if !is_l[v] {
            expected.insert(v);
        }
        expected.extend((0..n).filter(|&u| cl.pi2[u].is_some_and(|w| nl[i].contains(&w))));
        let actual: BTreeSet<usize> = cl.members(i).into_iter().collect();
        if expected != actual {
            return Err(cluster_error(format!("(v): membership of cluster {i} differs")));
        }
        if let Some(u) = cl.pi1[i] {
            // (iv) and the pi1-to-p distance.
            if !in_some_nl(u) {
                return Err(cluster_error(format!("(iv): pi1({v}) = {u} outside every N^L+")));
            }
            let want = if is_l[v] { 2 } else { 1 };
            if g.hop(u, cl.p[i]) != Some(want) {
                return Err(cluster_error(format!("pi1({v}) is not at hop {want} from p({v})")));
            }
        } else if i != 0 {
            return Err(cluster_error(format!("non-root cluster {i} lacks pi1")));
        }
    }
    for u in 0..n {
        // (ii)
        if is_l[u] && cl.alpha[u].is_none() {
            return Err(cluster_error(format!("(ii): L-node {u} unallotted")));
        }
        if !is_l[u] && cl.alpha[u].is_some() && !cl.midpoints.contains(&u) {
            return Err(cluster_error(format!("(ii): 0-node {u} allotted but not a midpoint")));
        }
        // (iv)
        if let Some(w) = cl.pi2[u] {
            if !in_some_nl(w) {
                return Err(cluster_error(format!("(iv): pi2({u}) = {w} outside every N^L+")));
            }
        }
    }
    Ok(())
}

/// Opening that started at `origin` and ended at `location`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningParcel {
    pub origin: usize,
    pub location: usize,
    pub amount: Rational,
}

/// Openings with their origins; each vertex holds amounts keyed by origin.
struct Ledger {
    y: Vec<Rational>,
    held: Vec<BTreeMap<usize, Rational>>,
}

impl Ledger {
    fn new(y: &[Rational]) -> Self {
        let held = (0..y.len())
            .map(|v| {
                let mut m = BTreeMap::new();
                if !y[v].is_zero() {
                    m.insert(v, y[v].clone());
                }
                m
            })
            .collect();
        Ledger {
            y: y.to_vec(),
            held,
        }
    }

    /// Moves `amount` from `from` to `to`, oldest origins first.
    fn transfer(&mut self, from: usize, to: usize, amount: &Rational) {
        let mut left = amount.clone();
        while !left.is_zero() {
            let (&origin, have) = self.held[from].iter_mut().next().expect("parcels cover y");
            let take = if *have <= left { have.clone() } else { left.clone() };
            *have -= &take;
            if have.is_zero() {
                self.held[from].remove(&origin);
            }
            *self.held[to].entry(origin).or_insert_with(Rational::zero) += &take;
            left -= &take;
        }
        self.y[from] -= amount;
        self.y[to] += amount;
    }

    /// `LocalRound`: raise every vertex of `to_open` to one, drawing from
    /// `from1` and then `from2`, lowest index first.
    fn local_round(
        &mut self,
        to_open: &[usize],
        from1: &[usize],
        from2: &[usize],
        step: &'static str,
        cluster: usize,
    ) -> Result<()> {
        let open: BTreeSet<usize> = to_open.iter().copied().collect();
        for &u in &open {
            while self.y[u] < Rational::one() {
                let pick = |set: &[usize], y: &[Rational]| {
                    set.iter()
                        .copied()
                        .filter(|w| !open.contains(w) && !y[*w].is_zero())
                        .min()
                };
                let w = pick(from1, &self.y).or_else(|| pick(from2, &self.y)).ok_or_else(|| {
                    round_error(cluster, step, format!("no opening left to raise {u}"))
                })?;
                let need = Rational::one() - &self.y[u];
                let delta = if need < self.y[w] { need } else { self.y[w].clone() };
                self.transfer(w, u, &delta);
            }
        }
        Ok(())
    }

    fn parcels(&self) -> Vec<OpeningParcel> {
        let mut out = Vec::new();
        for (location, m) in self.held.iter().enumerate() {
            for (&origin, amount) in m {
                out.push(OpeningParcel {
                    origin,
                    location,
                    amount: amount.clone(),
                });
            }
        }
        out
    }
}

fn round_error(cluster: usize, step: &str, detail: String) -> Error {
    Error::verification(
        "zero-L rounding",
        format!("cluster {cluster}, step {step}: {detail}"),
    )
}

#[derive(Debug, Clone)]
pub struct ZeroLRounding {
    pub clustering: ZeroLClustering,
    /// Opening after the initial aggregation.
    pub aggregated: Vec<Rational>,
    /// Final integral opening.
    pub y: Vec<Rational>,
    pub open: Vec<usize>,
    pub parcels: Vec<OpeningParcel>,
}

struct Rounder<'a> {
    g: &'a Graph,
    is_l: Vec<bool>,
    cl: &'a ZeroLClustering,
    ledger: Ledger,
}

impl Rounder<'_> {
    fn round(&mut self, v: usize) -> Result<()> {
        for w in self.cl.children(v) {
            self.round(w)?;
        }
        let cl = self.cl;
        let n = self.g.n();
        let pv = cl.p[v];
        let nl = l_neighborhood(self.g, &self.is_l, cl.midpoints[v]);
        if !self.ledger.y[pv].is_one() {
            return Err(round_error(v, "entry", format!("y at p = {pv} is not 1")));
        }
        let children = cl.children(v);
        let x_set = |u: usize| -> Vec<usize> {
            let mut s: BTreeSet<usize> = BTreeSet::new();
            if u != pv {
                s.insert(u);
            }
            s.extend(children.iter().filter(|&&w| cl.pi1[w] == Some(u)).map(|&w| cl.p[w]));
            s.extend((0..n).filter(|&w| cl.pi2[w] == Some(u)));
            s.into_iter().collect()
        };
        let xs: Vec<(usize, Vec<usize>)> = nl.iter().map(|&u| (u, x_set(u))).collect();

        // The X_u partition I_v.
        let members = cl.members(v);
        let mut i_v: BTreeSet<usize> = members
            .iter()
            .copied()
            .filter(|&u| u != pv && self.is_l[u])
            .collect();
        i_v.extend(
            children
                .iter()
                .filter(|&&w| cl.pi1[w].is_some_and(|u| members.contains(&u)))
                .map(|&w| cl.p[w]),
        );
        let mut union = BTreeSet::new();
        for (_, x) in &xs {
            for &w in x {
                if !union.insert(w) {
                    return Err(round_error(v, "partition", format!("{w} lies in two X sets")));
                }
            }
        }
        if union != i_v {
            return Err(round_error(v, "partition", "X sets do not partition I_v".into()));
        }

        for (u, x) in &xs {
            let total = sum(x.iter().map(|&w| &self.ledger.y[w]));
            let f = floor_usize(&total);
            let w_u: Vec<usize> = if Rational::from_integer((x.len() as i64).into()) == total {
                x.clone()
            } else {
                x.iter().copied().filter(|w| w != u).take(f).collect()
            };
            if w_u.len() != f {
                return Err(round_error(v, "choose W_u", format!("cannot choose {f} vertices of X_{u}")));
            }
            self.ledger.local_round(&w_u, x, &[], "round X_u", v)?;
            let rest = &total - Rational::from_integer((f as i64).into());
            if *u != pv && !rest.is_zero() && self.ledger.y[*u].is_one() {
                return Err(round_error(v, "round X_u", format!("X_{u} keeps a remainder with {u} open")));
            }
        }

        let frac = |y: &[Rational]| -> Vec<usize> {
            union.iter().copied().filter(|&w| !y[w].is_integer()).collect()
        };
        let i8 = frac(&self.ledger.y);
        let f_set: Vec<usize> = nl
            .iter()
            .copied()
            .filter(|&u| u != pv && self.ledger.y[u] < Rational::one())
            .collect();
        let need = floor_usize(&sum(i8.iter().map(|&w| &self.ledger.y[w])));
        if need > f_set.len() {
            return Err(round_error(v, "choose W_F", format!("F has {} < {need} vertices", f_set.len())));
        }
        let w_f: Vec<usize> = f_set[..need].to_vec();
        let x_pv: &Vec<usize> = &xs.iter().find(|(u, _)| *u == pv).expect("p(v) in N^L+(v)").1;
        let (outside, inside): (Vec<usize>, Vec<usize>) = i8.iter().partition(|w| !x_pv.contains(w));
        self.ledger.local_round(&w_f, &outside, &inside, "round into W_F", v)?;

        let i12 = frac(&self.ledger.y);
        if !i12.is_empty() {
            let w_star = f_set
                .iter()
                .copied()
                .find(|w| !w_f.contains(w))
                .unwrap_or(i12[0]);
            self.ledger.local_round(&[w_star], &i12, &[pv], "last fraction", v)?;
        }
        if union.iter().any(|&w| !self.ledger.y[w].is_integer()) {
            return Err(round_error(v, "last fraction", "I_v is not integral".into()));
        }
        Ok(())
    }
}

fn floor_usize(v: &Rational) -> usize {
    use num_traits::ToPrimitive;
    v.floor().to_integer().to_usize().expect("small nonnegative")
}

/// Rounds an LP opening `y` (zero on 0-nodes) on a connected preprocessed
/// component to an integral distance-5 transfer.
pub fn zerol_round(g: &Graph, caps: &[u64], y: &[Rational]) -> Result<ZeroLRounding> {
    let n = g.n();
    let cl = zerol_cluster(g, caps)?;
    let is_l: Vec<bool> = caps.iter().map(|&c| c > 0).collect();
    if (0..n).any(|v| !is_l[v] && !y[v].is_zero()) {
        return Err(Error::InvalidParams("opening on a 0-node".into()));
    }
    let mut ledger = Ledger::new(y);

    // Initial aggregation onto p(v), lowest-index donors first.
    for (i, &v) in cl.midpoints.iter().enumerate() {
        let pv = cl.p[i];
        let donors: Vec<usize> = l_neighborhood(g, &is_l, v).into_iter().filter(|&u| u != pv).collect();
        ledger.local_round(&[pv], &donors, &[], "aggregation", i)?;
        let bound = if pv == v { 1 } else { 2 };
        if ledger.held[pv].keys().any(|&o| !g.within(o, pv, bound)) {
            return Err(round_error(i, "aggregation", format!("parcel beyond hop {bound}")));
        }
    }
    let aggregated = ledger.y.clone();

    let mut rounder = Rounder {
        g,
        is_l,
        cl: &cl,
        ledger,
    };
    rounder.round(0)?;
    let ledger = rounder.ledger;
    if ledger.y.iter().any(|v| !(v.is_zero() || v.is_one())) {
        return Err(round_error(0, "end", "opening is not integral".into()));
    }
    let parcels = ledger.parcels();
    if let Some(bad) = parcels.iter().find(|p| !g.within(p.origin, p.location, 5)) {
        return Err(round_error(0, "end", format!("parcel {bad:?} moved beyond hop 5")));
    }
    match verify_transfer(g, caps, y, &ledger.y, 5)? {
        Verdict::Yes => {}
        Verdict::No(v) => {
            return Err(round_error(0, "end", format!("not a distance-5 transfer: {v:?}")))
        }
    }
    let open = (0..n).filter(|&v| ledger.y[v].is_one()).collect();
    Ok(ZeroLRounding {
        clustering: cl,
        aggregated,
        y: ledger.y,
        open,
        parcels,
    })
}
