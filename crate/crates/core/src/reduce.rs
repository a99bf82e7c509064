//! Reduction from an LP solution on a connected graph to a tree instance.
//!
//! Clusters are grown around midpoints whose closed neighborhoods are
//! disjoint; each cluster gets an auxiliary vertex `a_v`, adjacent to `N+(v)`
//! and carrying the largest capacity `L(m_v)` there. Phase 1 moves one unit
//! of opening from `N+(v)` onto `a_v`, starting with `m_v`. Phase 2 rounds the
//! tree of auxiliaries (wired like the cluster tree) with the remaining
//! fractional vertices as leaves. Phase 3 replaces each opened `a_v` by
//! `m_v`. Every phase is re-verified as a transfer.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::Rational;
use crate::transfer::{verify_transfer, TransferVector, Verdict};
use crate::tree::{round_tree_traced, RoundStep, TreeInstance};

/// Clusters with midpoints forming a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTree {
    /// Midpoints in discovery order; cluster `i` has midpoint `midpoints[i]`.
    pub midpoints: Vec<usize>,
    /// Parent cluster of each cluster; `None` for the root (cluster 0).
    pub parent: Vec<Option<usize>>,
    /// Cluster of every vertex.
    pub membership: Vec<usize>,
    /// `m_v` of each cluster: the largest-capacity openable vertex of `N+(v)`.
    pub delegate: Vec<usize>,
    /// Hop distance between midpoints of adjacent clusters.
    pub edge_hop: u32,
}

impl ClusterTree {
    pub fn len(&self) -> usize {
        self.midpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.midpoints.is_empty()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.membership.len())
            .filter(|&u| self.membership[u] == cluster)
            .collect()
    }
}

/// Largest capacity among openable vertices of `N+(v)`, lowest index on ties.
pub(crate) fn best_in_neighborhood(
    g: &Graph,
    caps: &[u64],
    openable: &[bool],
    v: usize,
) -> Option<usize> {
    g.closed_neighborhood(v)
        .into_iter()
        .filter(|&u| openable[u])
        .fold(None, |best: Option<usize>, u| match best {
            Some(b) if caps[b] >= caps[u] => Some(b),
            _ => Some(u),
        })
}

/// Nearest midpoint by hop, lowest midpoint vertex index on ties.
fn nearest_cluster(g: &Graph, midpoints: &[usize], u: usize) -> usize {
    (0..midpoints.len())
        .min_by_key(|&i| (g.hop(u, midpoints[i]).unwrap_or(u32::MAX), midpoints[i]))
        .expect("at least one midpoint")
}

/// Greedy hop-3 clustering of a connected graph.
pub fn cluster(g: &Graph, caps: &[u64]) -> Result<ClusterTree> {
    let n = g.n();
    if n == 0 || !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let mut midpoints = vec![0];
    let mut parent = vec![None];
    loop {
        let next = (0..n).find(|&u| g.hop_to_set(u, &midpoints) == Some(3));
        let Some(u) = next else { break };
        let p = (0..midpoints.len())
            .filter(|&i| g.hop(u, midpoints[i]) == Some(3))
            .min_by_key(|&i| midpoints[i])
            .expect("some midpoint is at hop 3");
        midpoints.push(u);
        parent.push(Some(p));
    }
    let membership = (0..n).map(|u| nearest_cluster(g, &midpoints, u)).collect();
    let all = vec![true; n];
    let delegate = midpoints
        .iter()
        .map(|&v| best_in_neighborhood(g, caps, &all, v).expect("N+(v) contains v"))
        .collect();
    let ct = ClusterTree {
        midpoints,
        parent,
        membership,
        delegate,
        edge_hop: 3,
    };
    check_clusters(g, &ct, |_| 2)?;
    Ok(ct)
}

/// Asserts the clustering properties: tree edges at exactly `edge_hop`,
/// `N+(v)` inside its own cluster, and members within `member_bound(u)`.
pub(crate) fn check_clusters<F: Fn(usize) -> u32>(
    g: &Graph,
    ct: &ClusterTree,
    member_bound: F,
) -> Result<()> {
    let fail = |d: alloc::string::String| Err(Error::verification("clustering", d));
    for (i, p) in ct.parent.iter().enumerate() {
        match (i, p) {
            (0, None) => {}
            (0, Some(_)) | (_, None) => return fail(format!("cluster {i} has a bad parent")),
            (_, Some(p)) => {
                if *p >= i {
                    return fail(format!("cluster {i} has a later parent {p}"));
                }
                if g.hop(ct.midpoints[i], ct.midpoints[*p]) != Some(ct.edge_hop) {
                    return fail(format!("tree edge {i}-{p} is not at hop {}", ct.edge_hop));
                }
            }
        }
    }
    for (i, &v) in ct.midpoints.iter().enumerate() {
        if g.closed_neighborhood(v).iter().any(|&u| ct.membership[u] != i) {
            return fail(format!("N+({v}) leaves cluster {i}"));
        }
    }
    for (u, &c) in ct.membership.iter().enumerate() {
        let bound = member_bound(u);
        if !g.within(u, ct.midpoints[c], bound) {
            return fail(format!("vertex {u} is beyond hop {bound} of its midpoint"));
        }
    }
    Ok(())
}

/// All intermediate vectors of one reduction, on the augmented graph
/// (original vertices first, then one auxiliary per cluster).
#[derive(Debug, Clone)]
pub struct Reduction {
    pub augmented: Graph,
    pub augmented_caps: Vec<u64>,
    pub first: Vec<Rational>,
    pub tree: TreeInstance,
    /// Augmented vertex of each tree node.
    pub tree_vertex: Vec<usize>,
    pub tree_steps: Vec<RoundStep>,
    pub second: Vec<Rational>,
    pub third: Vec<Rational>,
    /// Opened vertices of the original graph, ascending.
    pub open: Vec<usize>,
    /// The distance at which `open` was verified as a transfer of `y`.
    pub radius: u32,
}

/// Graph with auxiliary vertex `n + i` adjacent to `N+(midpoint_i)`.
pub fn augment(g: &Graph, ct: &ClusterTree) -> Graph {
    let n = g.n();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for (i, &v) in ct.midpoints.iter().enumerate() {
        edges.extend(g.closed_neighborhood(v).into_iter().map(|u| (n + i, u)));
    }
    Graph::from_edges(n + ct.len(), edges)
}

fn expect_transfer(
    stage: &'static str,
    g: &Graph,
    caps: &[u64],
    from: &[Rational],
    to: &[Rational],
    r: u32,
) -> Result<()> {
    match verify_transfer(g, caps, from, to, r)? {
        Verdict::Yes => Ok(()),
        Verdict::No(v) => Err(Error::verification(
            stage,
            format!("not a distance-{r} transfer: {v:?}"),
        )),
    }
}

/// Runs the three phases for `y` on connected `g` with clusters `ct`.
///
/// `leaf_hop` bounds the hop between a midpoint and a member leaf.
pub fn reduce_with_clusters(
    g: &Graph,
    caps: &[u64],
    y: &[Rational],
    ct: &ClusterTree,
    leaf_hop: u32,
) -> Result<Reduction> {
    let n = g.n();
    let c = ct.len();
    let aug = augment(g, ct);
    let mut aug_caps = caps.to_vec();
    aug_caps.extend(ct.delegate.iter().map(|&m| caps[m]));
    let mut aug_y = y.to_vec();
    aug_y.resize(n + c, Rational::zero());

    // Phase 1: one unit of opening onto each auxiliary.
    let mut first = aug_y.clone();
    for (i, &v) in ct.midpoints.iter().enumerate() {
        let m = ct.delegate[i];
        let mut order: Vec<usize> = g
            .closed_neighborhood(v)
            .into_iter()
            .filter(|&u| u != m)
            .collect();
        order.sort_by(|&a, &b| caps[b].cmp(&caps[a]).then(a.cmp(&b)));
        order.insert(0, m);
        let mut need = Rational::one();
        for u in order {
            if need.is_zero() {
                break;
            }
            let take = if first[u] < need { first[u].clone() } else { need.clone() };
            first[u] -= &take;
            need -= &take;
        }
        if !need.is_zero() {
            return Err(Error::verification(
                "reduction phase 1",
                format!("N+({v}) holds less than one unit of opening"),
            ));
        }
        if !first[m].is_zero() {
            return Err(Error::verification(
                "reduction phase 1",
                format!("delegate {m} keeps opening"),
            ));
        }
        first[n + i] = Rational::one();
    }
    expect_transfer("reduction phase 1", &aug, &aug_caps, &aug_y, &first, 1)?;

    // Phase 2: tree over auxiliaries with fractional vertices as leaves.
    let mut tree_vertex: Vec<usize> = (0..c).map(|i| n + i).collect();
    let mut tree_parent: Vec<Option<usize>> = ct.parent.clone();
    for u in (0..n).filter(|&u| !first[u].is_zero()) {
        tree_vertex.push(u);
        tree_parent.push(Some(ct.membership[u]));
    }
    for (node, p) in tree_parent.iter().enumerate() {
        let Some(p) = *p else { continue };
        let (a, b) = (tree_vertex[node], tree_vertex[p]);
        let bound = if node < c { ct.edge_hop } else { leaf_hop };
        let hop = aug.hop(a, b);
        let ok = if node < c { hop == Some(bound) } else { hop.is_some_and(|h| h <= bound) };
        if !ok {
            return Err(Error::verification(
                "reduction phase 2",
                format!("tree edge {a}-{b} has augmented hop {hop:?}"),
            ));
        }
    }
    let tree = TreeInstance::new(
        tree_parent,
        tree_vertex.iter().map(|&v| aug_caps[v]).collect(),
        tree_vertex.iter().map(|&v| first[v].clone()).collect(),
    )?;
    let (opened, tree_steps) = round_tree_traced(&tree)?;
    let second =
        TransferVector::from_open_set(n + c, &opened.iter().map(|&t| tree_vertex[t]).collect::<Vec<_>>())
            .values;
    let phase2_radius = 2 * ct.edge_hop.max(leaf_hop);
    expect_transfer("reduction phase 2", &aug, &aug_caps, &first, &second, phase2_radius)?;

    // Phase 3: auxiliaries hand their opening to their delegates.
    let mut third = second.clone();
    for i in 0..c {
        if third[n + i].is_one() {
            let m = ct.delegate[i];
            if !third[m].is_zero() {
                return Err(Error::verification(
                    "reduction phase 3",
                    format!("delegate {m} already open"),
                ));
            }
            third[n + i] = Rational::zero();
            third[m] = Rational::one();
        }
    }
    expect_transfer("reduction phase 3", &aug, &aug_caps, &second, &third, 1)?;

    let radius = phase2_radius + 2;
    expect_transfer("reduction", &aug, &aug_caps, &aug_y, &third, radius)?;
    let projected: Vec<Rational> = third[..n].to_vec();
    expect_transfer("reduction", g, caps, y, &projected, radius)?;
    let open = TransferVector::new(projected).open_set();

    Ok(Reduction {
        augmented: aug,
        augmented_caps: aug_caps,
        first,
        tree,
        tree_vertex,
        tree_steps,
        second,
        third,
        open,
        radius,
    })
}

/// Clusters `g` and reduces `y`; the result is verified as an integral
/// distance-8 transfer of `(g, caps, y)`.
pub fn reduce_and_round(g: &Graph, caps: &[u64], y: &[Rational]) -> Result<Reduction> {
    let ct = cluster(g, caps)?;
    reduce_with_clusters(g, caps, y, &ct, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{min_feasible_k, Roles};
    use crate::rational::{int, ratio};

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    #[test]
    fn complete_graph_is_one_cluster() {
        let ct = cluster(&complete(5), &[1, 4, 2, 4, 3]).unwrap();
        assert_eq!(ct.midpoints, vec![0]);
        assert_eq!(ct.delegate, vec![1]);
    }

    #[test]
    fn path_of_seven() {
        let ct = cluster(&path(7), &[1; 7]).unwrap();
        assert_eq!(ct.midpoints, vec![0, 3, 6]);
        assert_eq!(ct.parent, vec![None, Some(0), Some(1)]);
        assert_eq!(ct.membership, vec![0, 0, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn disconnected_is_rejected() {
        assert_eq!(cluster(&Graph::from_edges(2, []), &[1, 1]), Err(Error::NotConnected));
    }

    #[test]
    fn augmented_hops() {
        let g = path(7);
        let ct = cluster(&g, &[1; 7]).unwrap();
        let aug = augment(&g, &ct);
        for (i, &v) in ct.midpoints.iter().enumerate() {
            assert_eq!(aug.hop(v, 7 + i), Some(1));
            for u in (0..7).filter(|&u| u != v) {
                assert_eq!(aug.hop(u, 7 + i), g.hop(u, v));
            }
            for (j, &w) in ct.midpoints.iter().enumerate() {
                if i != j {
                    assert_eq!(aug.hop(7 + i, 7 + j), g.hop(v, w));
                }
            }
        }
    }

    #[test]
    fn complete_graph_k1_opens_delegate() {
        let g = complete(4);
        let caps = [2, 5, 5, 1];
        let y = vec![ratio(1, 4); 4];
        let red = reduce_and_round(&g, &caps, &y).unwrap();
        assert_eq!(red.open, vec![1]);
    }

    #[test]
    fn singleton() {
        let g = Graph::from_edges(1, []);
        let red = reduce_and_round(&g, &[1], &[int(1)]).unwrap();
        assert_eq!(red.open, vec![0]);
    }

    #[test]
    fn lp_solution_on_path() {
        let g = path(6);
        let caps = [2, 1, 3, 1, 2, 2];
        let (k, sol) = min_feasible_k(&g, &caps, &Roles::all(6)).unwrap().unwrap();
        let red = reduce_and_round(&g, &caps, &sol.y).unwrap();
        assert_eq!(red.open.len(), k);
        assert_eq!(red.radius, 8);
    }
}
