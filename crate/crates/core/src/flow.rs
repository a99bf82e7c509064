//! Integer maximum flow (Dinic) with minimum-cut extraction.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_traits::Zero;

/// Capacity type: any exact, totally ordered additive group element.
pub trait Capacity: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Capacity for T {}

#[derive(Debug, Clone)]
struct Arc<C> {
    to: usize,
    cap: C,
    residual: C,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<C> {
    n: usize,
    source: usize,
    sink: usize,
    /// Arc `2i` is the i-th user arc, `2i+1` its reverse.
    arcs: Vec<Arc<C>>,
    out: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow<C> {
    pub value: C,
    /// Flow on each arc, in insertion order.
    pub arc_flow: Vec<C>,
    /// Nodes reachable from the source in the final residual network.
    pub source_side: Vec<bool>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(n: usize, source: usize, sink: usize) -> Self {
        assert!(source < n && sink < n && source != sink);
        FlowNetwork {
            n,
            source,
            sink,
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    /// Adds `from -> to` and returns its arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: C) -> usize {
        assert!(cap >= C::zero(), "negative capacity");
        let id = self.arcs.len() / 2;
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc {
            to,
            residual: cap.clone(),
            cap,
        });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: C::zero(),
            residual: C::zero(),
        });
        id
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len() / 2
    }

    /// Endpoints and capacity of user arc `id`.
    pub fn arc(&self, id: usize) -> (usize, usize, &C) {
        let fwd = &self.arcs[2 * id];
        (self.arcs[2 * id + 1].to, fwd.to, &fwd.cap)
    }

    fn residual(&self, e: usize) -> C {
        self.arcs[e].residual.clone()
    }

    fn levels(&self) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        level[self.source] = 0;
        queue.push_back(self.source);
        while let Some(u) = queue.pop_front() {
            for &e in &self.out[u] {
                let v = self.arcs[e].to;
                if level[v] == usize::MAX && self.residual(e) > C::zero() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, e: usize, amount: &C) {
        self.arcs[e].residual = self.arcs[e].residual.clone() - amount.clone();
        self.arcs[e ^ 1].residual = self.arcs[e ^ 1].residual.clone() + amount.clone();
    }

    /// One blocking-flow augmentation along an explicit stack; returns the
    /// amount pushed, zero when no augmenting path remains in the level graph.
    fn augment(&mut self, level: &[usize], next: &mut [usize]) -> C {
        let mut path: Vec<usize> = Vec::new();
        let mut u = self.source;
        loop {
            if u == self.sink {
                let mut amount = self.residual(path[0]);
                for &e in &path[1..] {
                    let r = self.residual(e);
                    if r < amount {
                        amount = r;
                    }
                }
                for &e in &path {
                    self.push(e, &amount);
                }
                return amount;
            }
            let mut advanced = false;
            while next[u] < self.out[u].len() {
                let e = self.out[u][next[u]];
                let v = self.arcs[e].to;
                if level[v] == level[u].wrapping_add(1) && self.residual(e) > C::zero() {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if !advanced {
                if u == self.source {
                    return C::zero();
                }
                // Dead end: retreat and skip the arc that led here.
                let e = path.pop().expect("non-source node has an incoming path arc");
                u = self.arcs[e ^ 1].to;
                next[u] += 1;
            }
        }
    }

    /// Computes a maximum flow. Capacities must be nonnegative.
    pub fn max_flow(mut self) -> MaxFlow<C> {
        let mut value = C::zero();
        loop {
            let level = self.levels();
            if level[self.sink] == usize::MAX {
                break;
            }
            let mut next = vec![0; self.n];
            loop {
                let pushed = self.augment(&level, &mut next);
                if pushed.is_zero() {
                    break;
                }
                value = value + pushed;
            }
        }
        let level = self.levels();
        let source_side = level.iter().map(|&l| l != usize::MAX).collect();
        let arc_flow = self
            .arcs
            .iter()
            .step_by(2)
            .map(|a| a.cap.clone() - a.residual.clone())
            .collect();
        let result = MaxFlow {
            value,
            arc_flow,
            source_side,
        };
        debug_assert!(self.conserves(&result));
        result
    }

    fn conserves(&self, result: &MaxFlow<C>) -> bool {
        let mut inflow = vec![C::zero(); self.n];
        let mut outflow = inflow.clone();
        for (i, f) in result.arc_flow.iter().enumerate() {
            let (from, to, cap) = self.arc(i);
            if f > cap {
                return false;
            }
            outflow[from] = outflow[from].clone() + f.clone();
            inflow[to] = inflow[to].clone() + f.clone();
        }
        (0..self.n).all(|v| v == self.source || v == self.sink || inflow[v] == outflow[v])
            && inflow[self.sink] == result.value
    }
}
