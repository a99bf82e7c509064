//! The standard relaxation `LP_k(G)` of capacitated k-center and the
//! per-component searches built on it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{LinearProgram, LpError, LpOutcome, Sense};
use crate::graph::Graph;
use crate::rational::{from_u64, int, sum, Rational};

/// Which vertices must be served and which may be opened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roles {
    pub served: Vec<bool>,
    pub openable: Vec<bool>,
}

impl Roles {
    pub fn all(n: usize) -> Self {
        Roles {
            served: vec![true; n],
            openable: vec![true; n],
        }
    }

    /// Opening restricted to the vertices selected by `openable`; every vertex
    /// is served.
    pub fn open_only(openable: Vec<bool>) -> Self {
        Roles {
            served: vec![true; openable.len()],
            openable,
        }
    }

    /// Facilities open, clients are served.
    pub fn supplier(facility: &[bool]) -> Self {
        Roles {
            served: facility.iter().map(|f| !f).collect(),
            openable: facility.to_vec(),
        }
    }

    pub fn restrict(&self, vertices: &[usize]) -> Roles {
        Roles {
            served: vertices.iter().map(|&v| self.served[v]).collect(),
            openable: vertices.iter().map(|&v| self.openable[v]).collect(),
        }
    }

    pub fn served_count(&self) -> usize {
        self.served.iter().filter(|s| **s).count()
    }

    pub fn openable_count(&self) -> usize {
        self.openable.iter().filter(|s| **s).count()
    }
}

#[derive(Debug, Clone, Copy)]
pub enum LpMode<'a> {
    Feasibility,
    /// Minimize `sum cost(v) y_v`.
    MinCost(&'a [Rational]),
}

/// `LP_k(G)` together with the variable layout.
#[derive(Debug, Clone)]
pub struct CenterLp {
    pub lp: LinearProgram,
    /// Variable of `y_u`, for openable `u`.
    pub y_var: Vec<Option<usize>>,
    /// `(u, v, var)`: `u` serves `v`; exists only for `hop(u,v) <= 1`.
    pub x_var: Vec<(usize, usize, usize)>,
}

/// Opening vector `y` (zero on non-openable vertices) and assignment `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub y: Vec<Rational>,
    /// `((u, v), x_uv)` for every assignment variable, in layout order.
    pub x: Vec<((usize, usize), Rational)>,
    pub objective: Option<Rational>,
}

impl LpSolution {
    pub fn total_opening(&self) -> Rational {
        sum(&self.y)
    }
}

/// Builds `LP_k(G)`:
///
/// ```text
/// sum_u y_u = k
/// x_uv <= y_u                       for every pair with hop(u,v) <= 1
/// sum_v x_uv <= L(u) y_u            for openable u
/// sum_u x_uv = 1                    for served v
/// 0 <= y <= 1, x >= 0
/// ```
///
/// `x <= 1` is implied by `x_uv <= y_u <= 1` and not added as a row.
pub fn build_lp(g: &Graph, caps: &[u64], k: usize, mode: LpMode<'_>, roles: &Roles) -> CenterLp {
    let n = g.n();
    let mut lp = LinearProgram::new();
    let mut y_var = vec![None; n];
    for u in 0..n {
        if roles.openable[u] {
            y_var[u] = Some(lp.add_var(Rational::zero(), Some(Rational::one())));
        }
    }
    let mut x_var = Vec::new();
    for u in 0..n {
        if !roles.openable[u] {
            continue;
        }
        for v in g.closed_neighborhood(u) {
            if roles.served[v] {
                x_var.push((u, v, lp.add_var(Rational::zero(), None)));
            }
        }
    }
    let one = Rational::one;
    lp.add_constraint(
        y_var.iter().flatten().map(|&j| (j, one())).collect(),
        Sense::Eq,
        from_u64(k as u64),
    );
    for &(u, _, x) in &x_var {
        let y = y_var[u].expect("x exists only for openable centers");
        lp.add_constraint(vec![(x, one()), (y, -one())], Sense::Le, Rational::zero());
    }
    let mut by_center: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut by_client: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v, x) in &x_var {
        by_center[u].push(x);
        by_client[v].push(x);
    }
    for u in 0..n {
        if let Some(y) = y_var[u] {
            let mut row: Vec<(usize, Rational)> = by_center[u].iter().map(|&x| (x, one())).collect();
            row.push((y, -from_u64(caps[u])));
            lp.add_constraint(row, Sense::Le, Rational::zero());
        }
    }
    for v in 0..n {
        if roles.served[v] {
            lp.add_constraint(
                by_client[v].iter().map(|&x| (x, one())).collect(),
                Sense::Eq,
                one(),
            );
        }
    }
    if let LpMode::MinCost(cost) = mode {
        lp.set_objective(
            (0..n)
                .filter_map(|u| y_var[u].map(|y| (y, cost[u].clone())))
                .collect(),
        );
    }
    CenterLp { lp, y_var, x_var }
}

/// Solves `LP_k` and re-checks the result against every constraint.
pub fn solve_center_lp(
    g: &Graph,
    caps: &[u64],
    k: usize,
    mode: LpMode<'_>,
    roles: &Roles,
) -> Result<Option<LpSolution>, LpError> {
    let model = build_lp(g, caps, k, mode, roles);
    match model.lp.solve()? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal { values, objective } => {
            let y = (0..g.n())
                .map(|u| model.y_var[u].map_or_else(Rational::zero, |j| values[j].clone()))
                .collect();
            let x = model
                .x_var
                .iter()
                .map(|&(u, v, j)| ((u, v), values[j].clone()))
                .collect();
            let sol = LpSolution {
                y,
                x,
                objective: matches!(mode, LpMode::MinCost(_)).then_some(objective),
            };
            check_solution(g, caps, k, roles, &sol)?;
            Ok(Some(sol))
        }
    }
}

/// Independent exact check of an [`LpSolution`] against `LP_k(G)`.
pub fn check_solution(
    g: &Graph,
    caps: &[u64],
    k: usize,
    roles: &Roles,
    sol: &LpSolution,
) -> Result<(), LpError> {
    let n = g.n();
    let bad = |what: alloc::string::String| Err(LpError::ConstraintViolated(what));
    if sol.y.len() != n {
        return bad(format!("y has {} entries for {n} vertices", sol.y.len()));
    }
    if sol.total_opening() != from_u64(k as u64) {
        return bad(format!("sum of y differs from k = {k}"));
    }
    for u in 0..n {
        if sol.y[u] < Rational::zero() || sol.y[u] > Rational::one() {
            return bad(format!("y_{u} outside [0,1]"));
        }
        if !roles.openable[u] && !sol.y[u].is_zero() {
            return bad(format!("y_{u} > 0 on a vertex that cannot open"));
        }
    }
    let mut load = vec![Rational::zero(); n];
    let mut served = vec![Rational::zero(); n];
    for ((u, v), x) in &sol.x {
        let (u, v) = (*u, *v);
        if !(u == v || g.is_adjacent(u, v)) || !roles.openable[u] || !roles.served[v] {
            return bad(format!("x_({u},{v}) is not an admissible pair"));
        }
        if x < &Rational::zero() || x > &sol.y[u] || x > &Rational::one() {
            return bad(format!("x_({u},{v}) outside [0, y_{u}]"));
        }
        load[u] += x;
        served[v] += x;
    }
    for u in 0..n {
        if load[u] > from_u64(caps[u]) * &sol.y[u] {
            return bad(format!("capacity of {u} exceeded"));
        }
        if roles.served[u] && !served[u].is_one() {
            return bad(format!("vertex {u} is not fully served"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KSearch {
    /// Binary search, valid because feasibility is monotone in `k`.
    #[default]
    Binary,
    /// Tries every `k` in increasing order.
    Linear,
}

/// Smallest `k` for which `LP_k(g)` is feasible, with its solution.
///
/// A component without served vertices needs no center and returns `k = 0`.
pub fn min_feasible_k(
    g: &Graph,
    caps: &[u64],
    roles: &Roles,
) -> Result<Option<(usize, LpSolution)>, LpError> {
    min_feasible_k_with(g, caps, roles, KSearch::Binary)
}

pub fn min_feasible_k_with(
    g: &Graph,
    caps: &[u64],
    roles: &Roles,
    search: KSearch,
) -> Result<Option<(usize, LpSolution)>, LpError> {
    if roles.served_count() == 0 {
        let sol = LpSolution {
            y: vec![Rational::zero(); g.n()],
            x: Vec::new(),
            objective: None,
        };
        return Ok(Some((0, sol)));
    }
    let hi = roles.openable_count();
    if hi == 0 {
        return Ok(None);
    }
    let solve = |k: usize| solve_center_lp(g, caps, k, LpMode::Feasibility, roles);
    match search {
        KSearch::Linear => {
            for k in 1..=hi {
                if let Some(sol) = solve(k)? {
                    return Ok(Some((k, sol)));
                }
            }
            Ok(None)
        }
        KSearch::Binary => {
            let Some(top) = solve(hi)? else {
                return Ok(None);
            };
            // Invariant: LP_hi feasible (best holds its solution), LP_{lo-1} infeasible.
            let (mut lo, mut hi) = (1, hi);
            let mut best = top;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                match solve(mid)? {
                    Some(sol) => {
                        hi = mid;
                        best = sol;
                    }
                    None => lo = mid + 1,
                }
            }
            Ok(Some((hi, best)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCost {
    /// Minimum fractional opening cost over all `k`.
    pub bound: Rational,
    pub k: usize,
    pub solution: LpSolution,
}

/// Cheapest fractional opening over `k = 1..=|openable|`, smallest `k` on ties.
pub fn min_cost_for_component(
    g: &Graph,
    caps: &[u64],
    cost: &[Rational],
    roles: &Roles,
) -> Result<Option<MinCost>, LpError> {
    if roles.served_count() == 0 {
        return Ok(Some(MinCost {
            bound: int(0),
            k: 0,
            solution: LpSolution {
                y: vec![Rational::zero(); g.n()],
                x: Vec::new(),
                objective: Some(int(0)),
            },
        }));
    }
    let mut best: Option<MinCost> = None;
    for k in 1..=roles.openable_count() {
        if let Some(sol) = solve_center_lp(g, caps, k, LpMode::MinCost(cost), roles)? {
            let bound = sol.objective.clone().expect("min-cost mode sets the objective");
            if best.as_ref().is_none_or(|b| bound < b.bound) {
                best = Some(MinCost {
                    bound,
                    k,
                    solution: sol,
                });
            }
        }
    }
    Ok(best)
}
