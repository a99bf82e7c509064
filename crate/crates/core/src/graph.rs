//! Unweighted graphs with all-pairs hop distances, threshold graphs, and
//! connected components.
//!
//! Self-loops are never stored. Closed neighborhoods `N+(u)` include `u`
//! through [`Graph::closed_neighborhood`].

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::instance::{InstanceError, MetricInstance};
use crate::rational::{from_u64, Rational};

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    hop: Vec<u32>,
}

impl Graph {
    /// Builds the graph and its hop matrix (one BFS per vertex). Self-loops and
    /// duplicate edges are dropped.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for {n} vertices");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut g = Graph {
            n,
            adj,
            hop: vec![UNREACHABLE; n * n],
        };
        g.compute_hops();
        g
    }

    fn compute_hops(&mut self) {
        let n = self.n;
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut self.hop[s * n..(s + 1) * n];
            row[s] = 0;
            queue.clear();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let d = row[u];
                for &w in &self.adj[u] {
                    if row[w] == UNREACHABLE {
                        row[w] = d + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// `N+(u)`: neighbors of `u` together with `u`, sorted.
    pub fn closed_neighborhood(&self, u: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.adj[u].len() + 1);
        out.extend_from_slice(&self.adj[u]);
        let pos = out.partition_point(|&w| w < u);
        out.insert(pos, u);
        out
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Hop distance, `None` when unreachable.
    #[inline]
    pub fn hop(&self, u: usize, v: usize) -> Option<u32> {
        let d = self.hop[u * self.n + v];
        (d != UNREACHABLE).then_some(d)
    }

    #[inline]
    pub fn within(&self, u: usize, v: usize, r: u32) -> bool {
        self.hop[u * self.n + v] <= r
    }

    /// `min_{u in set} hop(v, u)`, `None` when the set is empty or unreachable.
    pub fn hop_to_set(&self, v: usize, set: &[usize]) -> Option<u32> {
        set.iter().filter_map(|&u| self.hop(v, u)).min()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || (0..self.n).all(|v| self.hop(0, v).is_some())
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn component_sets(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let members: Vec<usize> = (0..self.n).filter(|&v| self.hop(s, v).is_some()).collect();
            for &v in &members {
                seen[v] = true;
            }
            out.push(members);
        }
        out
    }

    /// Subgraph induced by `vertices`, re-indexed in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(vertices.len(), edges)
    }

    /// Copy of the graph without the edges rejected by `keep`.
    pub fn filter_edges<F: Fn(usize, usize) -> bool>(&self, keep: F) -> Graph {
        Graph::from_edges(self.n, self.edges().filter(|&(u, v)| keep(u, v)))
    }
}

/// `G_{<=tau}`: vertices adjacent iff `c(u,v) <= tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdGraph {
    tau: Rational,
    graph: Graph,
}

impl ThresholdGraph {
    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

impl Deref for ThresholdGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.graph
    }
}

pub fn build_threshold_graph(inst: &MetricInstance, tau: &Rational) -> ThresholdGraph {
    let n = inst.n();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if inst.dist(u, v) <= tau {
                edges.push((u, v));
            }
        }
    }
    ThresholdGraph {
        tau: tau.clone(),
        graph: Graph::from_edges(n, edges),
    }
}

/// Threshold graph restricted to client-facility pairs (k-supplier variant).
pub fn build_bipartite_threshold_graph(inst: &MetricInstance, tau: &Rational) -> ThresholdGraph {
    let n = inst.n();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let cross = inst.is_facility(u) != inst.is_facility(v);
            if cross && inst.dist(u, v) <= tau {
                edges.push((u, v));
            }
        }
    }
    ThresholdGraph {
        tau: tau.clone(),
        graph: Graph::from_edges(n, edges),
    }
}

/// A connected component, re-indexed, with a back-mapping to the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub graph: Graph,
    pub capacities: Vec<u64>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Components of `g`, ordered by smallest original vertex.
pub fn components(g: &Graph, capacities: &[u64]) -> Vec<Component> {
    g.component_sets()
        .into_iter()
        .map(|vertices| Component {
            graph: g.induced(&vertices),
            capacities: vertices.iter().map(|&v| capacities[v]).collect(),
            vertices,
        })
        .collect()
}

/// Shortest-path metric of an unweighted connected graph, row-major.
pub fn hop_metric(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Rational>, InstanceError> {
    let g = Graph::from_edges(n, edges.iter().copied());
    let mut out = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            match g.hop(u, v) {
                Some(d) => out.push(from_u64(d as u64)),
                None => return Err(InstanceError::Disconnected { v: if u == 0 { v } else { u } }),
            }
        }
    }
    Ok(out)
}
