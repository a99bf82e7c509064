//! Optimal rounding of tree instances: an integral distance-2 transfer.
//!
//! A tree instance is a rooted tree with capacities and openings in `(0, 1]`
//! whose total is an integer and whose internal nodes are fully open.
//! Rounding repeatedly takes a node `r` whose children are all leaves. When
//! the children's total `Y` is an integer, the `Y + 1` largest capacities in
//! `T_r` are opened and `T_r` is removed. Otherwise the `floor(Y) + 1` largest
//! are committed and `T_r` is replaced by a deferred leaf `p`; if `p` is later
//! opened it stands for whichever of `r` and `v_{floor(Y)+1}` was not
//! committed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{from_u64, sum, Rational};
use crate::transfer::{verify_transfer, TransferVector, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInstance {
    parent: Vec<Option<usize>>,
    capacity: Vec<u64>,
    y: Vec<Rational>,
    children: Vec<Vec<usize>>,
    root: Option<usize>,
}

impl TreeInstance {
    pub fn new(parent: Vec<Option<usize>>, capacity: Vec<u64>, y: Vec<Rational>) -> Result<Self> {
        let n = parent.len();
        let invalid = |m: String| Err(Error::InvalidTreeInstance(m));
        if capacity.len() != n || y.len() != n {
            return invalid(format!(
                "{n} parents, {} capacities, {} openings",
                capacity.len(),
                y.len()
            ));
        }
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_some() => return invalid(format!("second root {v}")),
                None => root = Some(v),
                Some(p) if p >= n || p == v => return invalid(format!("bad parent of {v}")),
                Some(p) => children[p].push(v),
            }
        }
        if n > 0 && root.is_none() {
            return invalid("no root".into());
        }
        // Every node must reach the root within n steps.
        for start in 0..n {
            let (mut v, mut steps) = (start, 0);
            while let Some(p) = parent[v] {
                v = p;
                steps += 1;
                if steps > n {
                    return invalid(format!("cycle through {start}"));
                }
            }
        }
        for v in 0..n {
            if y[v] <= Rational::zero() || y[v] > Rational::one() {
                return invalid(format!("opening of {v} outside (0, 1]"));
            }
            if !children[v].is_empty() && !y[v].is_one() {
                return invalid(format!("internal node {v} is not fully open"));
            }
        }
        if !sum(&y).is_integer() {
            return invalid("total opening is not an integer".into());
        }
        Ok(TreeInstance {
            parent,
            capacity,
            y,
            children,
            root,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacity
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Total opening, an integer by construction.
    pub fn total(&self) -> usize {
        sum(&self.y).to_integer().to_usize().expect("total fits in usize")
    }

    /// The tree as an unweighted graph (for hop distances).
    pub fn graph(&self) -> Graph {
        let edges = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)));
        Graph::from_edges(self.n(), edges)
    }
}

/// The lowest-index node that has at least one child and only leaf children.
pub fn pick_bottom_internal(t: &TreeInstance) -> Option<usize> {
    (0..t.n()).find(|&v| {
        !t.children[v].is_empty() && t.children[v].iter().all(|&c| t.children[c].is_empty())
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    /// `Y` integral: these nodes of `T_r` were opened.
    Integer { opened: Vec<usize> },
    /// `Y` fractional: `commit` opened, `T_r` replaced by deferred node `p`
    /// with opening `y_bar` and capacity `l_bar`; `p` stands for `alt`.
    Fractional {
        commit: Vec<usize>,
        p: usize,
        alt: usize,
        y_bar: Rational,
        l_bar: u64,
    },
}

/// One rounding step. Node ids below `n` are original nodes; larger ids are
/// deferred nodes created by earlier steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundStep {
    pub r: usize,
    /// Children of `r`, in non-increasing capacity order.
    pub children: Vec<usize>,
    pub y_sum: Rational,
    pub kind: StepKind,
    /// `sum_{T_r} y L`, less `y_bar * l_bar` in the fractional case.
    pub demand: Rational,
    /// Total capacity of the nodes opened or committed in `T_r`.
    pub supply: Rational,
}

#[derive(Debug, Clone)]
struct Node {
    parent: Option<usize>,
    children: BTreeSet<usize>,
    cap: u64,
    y: Rational,
    tie: usize,
    alive: bool,
}

struct Work {
    nodes: Vec<Node>,
}

impl Work {
    fn rank(&self, a: usize, b: usize) -> Ordering {
        let (x, z) = (&self.nodes[a], &self.nodes[b]);
        z.cap.cmp(&x.cap).then(x.tie.cmp(&z.tie)).then(a.cmp(&b))
    }

    fn sorted(&self, mut ids: Vec<usize>) -> Vec<usize> {
        ids.sort_by(|&a, &b| self.rank(a, b));
        ids
    }

    fn bottom_internal(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&v| {
            let node = &self.nodes[v];
            node.alive
                && !node.children.is_empty()
                && node.children.iter().all(|&c| self.nodes[c].children.is_empty())
        })
    }

    fn remove_subtree_of_bottom(&mut self, r: usize) {
        let kids: Vec<usize> = self.nodes[r].children.iter().copied().collect();
        for c in kids {
            self.nodes[c].alive = false;
        }
        self.nodes[r].alive = false;
        self.nodes[r].children.clear();
        if let Some(p) = self.nodes[r].parent {
            self.nodes[p].children.remove(&r);
        }
    }

    fn weight(&self, v: usize) -> Rational {
        from_u64(self.nodes[v].cap) * &self.nodes[v].y
    }
}

/// Rounds `t` to an integral distance-2 transfer; returns the open nodes in
/// ascending order.
pub fn round_tree(t: &TreeInstance) -> Result<Vec<usize>> {
    round_tree_traced(t).map(|(s, _)| s)
}

pub fn round_tree_traced(t: &TreeInstance) -> Result<(Vec<usize>, Vec<RoundStep>)> {
    let n = t.n();
    let mut work = Work {
        nodes: (0..n)
            .map(|v| Node {
                parent: t.parent[v],
                children: t.children[v].iter().copied().collect(),
                cap: t.capacity[v],
                y: t.y[v].clone(),
                tie: v,
                alive: true,
            })
            .collect(),
    };
    let mut open: BTreeSet<usize> = BTreeSet::new();
    let mut steps = Vec::new();

    while let Some(r) = work.bottom_internal() {
        let children = work.sorted(work.nodes[r].children.iter().copied().collect());
        let y_sum = sum(children.iter().map(|&c| &work.nodes[c].y));
        let tree_weight: Rational =
            children.iter().map(|&c| work.weight(c)).sum::<Rational>() + work.weight(r);
        if y_sum.is_integer() {
            let count = y_sum.to_integer().to_usize().expect("small") + 1;
            let mut members = children.clone();
            members.push(r);
            let opened: Vec<usize> = work.sorted(members).into_iter().take(count).collect();
            let supply = sum_caps(&work, &opened);
            open.extend(opened.iter().copied());
            work.remove_subtree_of_bottom(r);
            steps.push(RoundStep {
                r,
                children,
                y_sum,
                kind: StepKind::Integer { opened },
                demand: tree_weight,
                supply,
            });
            continue;
        }

        let f = y_sum.floor().to_integer().to_usize().expect("small");
        if children.len() < f + 1 {
            return Err(Error::verification(
                "tree rounding",
                format!("node {r} has {} children for Y = {y_sum:?}", children.len()),
            ));
        }
        let next = children[f];
        let (winner, alt) = if work.rank(r, next) == Ordering::Less {
            (r, next)
        } else {
            (next, r)
        };
        let mut commit: Vec<usize> = children[..f].to_vec();
        commit.push(winner);
        let mut members = children.clone();
        members.push(r);
        let top: BTreeSet<usize> = work.sorted(members).into_iter().take(f + 1).collect();
        if top != commit.iter().copied().collect::<BTreeSet<_>>() {
            return Err(Error::verification(
                "tree rounding",
                format!("commit set at {r} differs from the top {} capacities", f + 1),
            ));
        }
        let Some(grand) = work.nodes[r].parent else {
            return Err(Error::verification(
                "tree rounding",
                "fractional subtree total at the root",
            ));
        };
        let y_bar = &y_sum - Rational::from_integer(y_sum.floor().to_integer());
        let l_bar = work.nodes[r].cap.min(work.nodes[next].cap);
        let tie = work.nodes[r].tie;
        let supply = sum_caps(&work, &commit);
        let demand = tree_weight - from_u64(l_bar) * &y_bar;
        open.extend(commit.iter().copied());
        work.remove_subtree_of_bottom(r);
        let p = work.nodes.len();
        work.nodes.push(Node {
            parent: Some(grand),
            children: BTreeSet::new(),
            cap: l_bar,
            y: y_bar.clone(),
            tie,
            alive: true,
        });
        work.nodes[grand].children.insert(p);
        steps.push(RoundStep {
            r,
            children,
            y_sum,
            kind: StepKind::Fractional {
                commit,
                p,
                alt,
                y_bar,
                l_bar,
            },
            demand,
            supply,
        });
    }

    // Base case: at most one node remains.
    let rest: Vec<usize> = (0..work.nodes.len()).filter(|&v| work.nodes[v].alive).collect();
    match rest.as_slice() {
        [] => {}
        [v] => {
            if !work.nodes[*v].y.is_one() {
                return Err(Error::verification(
                    "tree rounding",
                    format!("last node {v} has a fractional opening"),
                ));
            }
            open.insert(*v);
        }
        _ => unreachable!("a tree with two nodes has a bottom internal node"),
    }

    for step in steps.iter().rev() {
        if let StepKind::Fractional { p, alt, .. } = step.kind {
            if open.remove(&p) {
                open.insert(alt);
            }
        }
    }
    let s: Vec<usize> = open.into_iter().collect();
    if s.iter().any(|&v| v >= n) || s.len() != t.total() {
        return Err(Error::verification(
            "tree rounding",
            format!("opened {} nodes for total opening {}", s.len(), t.total()),
        ));
    }
    for step in &steps {
        verify_step_balance(step)?;
    }
    let y2 = TransferVector::from_open_set(n, &s);
    match verify_transfer(&t.graph(), &t.capacity, &t.y, &y2.values, 2)? {
        Verdict::Yes => Ok((s, steps)),
        Verdict::No(v) => Err(Error::verification(
            "tree rounding",
            format!("result is not a distance-2 transfer: {v:?}"),
        )),
    }
}

fn sum_caps(work: &Work, ids: &[usize]) -> Rational {
    from_u64(ids.iter().map(|&v| work.nodes[v].cap).sum())
}

/// Checks the `T_r` side of one step: inside `T_r` every pair is within
/// distance 2, so the subset condition reduces to comparing totals.
pub fn verify_step_balance(step: &RoundStep) -> Result<()> {
    if step.demand > step.supply {
        return Err(Error::verification(
            "tree rounding step",
            format!(
                "at node {}: weight {:?} exceeds committed capacity {:?}",
                step.r, step.demand, step.supply
            ),
        ));
    }
    Ok(())
}
