//! End-to-end solving: threshold search with per-component LP
//! certification, rounding per variant, assignment, and final validation.
//!
//! A threshold `tau` is certified when, on every connected component of the
//! threshold graph, the LP with the least feasible `k_i` exists and
//! `sum k_i <= k` (for the budget variant: the least fractional opening cost
//! `B_i` and `sum B_i <= B`). The smallest certified candidate `tau*` is a
//! lower bound on the optimum, and every variant opens centers serving all
//! vertices within `ratio_bound * tau*`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::extensions::{round_budget_component, round_supplier_component};
use crate::graph::{build_bipartite_threshold_graph, build_threshold_graph, components, Graph};
use crate::instance::MetricInstance;
use crate::lp::{min_cost_for_component, min_feasible_k_with, KSearch, LpSolution, Roles};
use crate::rational::{from_u64, sum, Rational};
use crate::reduce::{reduce_and_round, Reduction};
use crate::transfer::extract_assignment;
use crate::zerol::{zerol_preprocess, zerol_round, OpeningParcel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Pick from the instance: budget, then supplier, then `{0, L}`, else center.
    #[default]
    Auto,
    Center,
    ZeroL,
    Supplier,
    Budget,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Auto => "auto",
            Variant::Center => "center",
            Variant::ZeroL => "zerol",
            Variant::Supplier => "supplier",
            Variant::Budget => "budget",
        }
    }

    /// Proven approximation factor of a resolved variant.
    pub fn ratio_bound(self) -> u32 {
        match self {
            Variant::Center | Variant::Budget | Variant::Auto => 9,
            Variant::ZeroL => 6,
            Variant::Supplier => 11,
        }
    }

    /// Distance of the integral transfer the rounding produces; served
    /// vertices are assigned within one more hop.
    pub fn transfer_radius(self) -> u32 {
        self.ratio_bound() - 1
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Variant::Auto,
            "center" => Variant::Center,
            "zerol" => Variant::ZeroL,
            "supplier" => Variant::Supplier,
            "budget" => Variant::Budget,
            _ => return Err(Error::InvalidParams(format!("unknown variant {s:?}"))),
        })
    }
}

/// The variant `auto` resolves to.
pub fn detect_variant(inst: &MetricInstance) -> Variant {
    if inst.costs().is_some() {
        Variant::Budget
    } else if inst.facility_flags().is_some() {
        Variant::Supplier
    } else if inst.zero_l_capacity().is_some() {
        Variant::ZeroL
    } else {
        Variant::Center
    }
}

/// Resolves `auto` and checks the variant's preconditions.
pub fn resolve_variant(inst: &MetricInstance, requested: Variant) -> Result<Variant> {
    let variant = match requested {
        Variant::Auto => detect_variant(inst),
        v => v,
    };
    let fail = |reason: &str| {
        Err(Error::VariantPrecondition {
            variant: variant.name(),
            reason: reason.into(),
        })
    };
    match variant {
        Variant::Center if inst.facility_flags().is_some() => {
            fail("facility flags need the supplier variant")
        }
        Variant::ZeroL if inst.facility_flags().is_some() => {
            fail("facility flags need the supplier variant")
        }
        Variant::ZeroL if inst.zero_l_capacity().is_none() => {
            fail("capacities are not all 0 or a single L")
        }
        Variant::Supplier if inst.facility_flags().is_none() => fail("no facility flags"),
        Variant::Budget if inst.costs().is_none() => fail("no opening costs and budget"),
        Variant::Budget if inst.facility_flags().is_some() => {
            fail("facility flags are not supported with a budget")
        }
        Variant::Budget if inst.uniform_capacity().is_none() => {
            fail("capacities are not uniform and positive")
        }
        v => Ok(v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Binary search over the candidate thresholds.
    #[default]
    Binary,
    /// Tries every candidate in increasing order.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub variant: Variant,
    /// Threshold search for the count-based variants. The budget variant
    /// always scans unless `budget_binary` is set.
    pub search: SearchMode,
    /// Experimental: binary threshold search for the budget variant.
    pub budget_binary: bool,
    pub k_search: KSearch,
    pub trace: bool,
}

/// One component of a certified threshold graph with its LP solution.
#[derive(Debug, Clone)]
pub struct ComponentCert {
    pub vertices: Vec<usize>,
    pub graph: Graph,
    pub capacities: Vec<u64>,
    pub roles: Roles,
    pub k: usize,
    pub solution: LpSolution,
    /// Least fractional opening cost (budget variant).
    pub cost_bound: Option<Rational>,
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub tau: Rational,
    pub components: Vec<ComponentCert>,
}

impl Certification {
    pub fn total_k(&self) -> usize {
        self.components.iter().map(|c| c.k).sum()
    }
}

/// The graph the variant works on at threshold `tau`.
pub fn variant_graph(inst: &MetricInstance, variant: Variant, tau: &Rational) -> Result<Graph> {
    Ok(match variant {
        Variant::Supplier => build_bipartite_threshold_graph(inst, tau).into_graph(),
        Variant::ZeroL => zerol_preprocess(&build_threshold_graph(inst, tau), inst.capacities())?,
        _ => build_threshold_graph(inst, tau).into_graph(),
    })
}

fn variant_roles(inst: &MetricInstance, variant: Variant) -> Roles {
    match variant {
        Variant::Supplier => Roles::supplier(inst.facility_flags().expect("checked")),
        Variant::ZeroL => Roles::open_only(inst.capacities().iter().map(|&c| c > 0).collect()),
        _ => Roles::all(inst.n()),
    }
}

/// Per-component LP certification of `tau`; `None` when `tau` is refuted.
pub fn certify(
    inst: &MetricInstance,
    variant: Variant,
    tau: &Rational,
    k_search: KSearch,
) -> Result<Option<Certification>> {
    let g = variant_graph(inst, variant, tau)?;
    let roles = variant_roles(inst, variant);
    let mut out = Vec::new();
    let mut total_k = 0usize;
    let mut total_cost = Rational::zero();
    for comp in components(&g, inst.capacities()) {
        let local_roles = roles.restrict(&comp.vertices);
        let (k, solution, cost_bound) = if variant == Variant::Budget {
            let cost: Vec<Rational> = comp
                .vertices
                .iter()
                .map(|&v| inst.costs().expect("checked")[v].clone())
                .collect();
            match min_cost_for_component(&comp.graph, &comp.capacities, &cost, &local_roles)? {
                Some(mc) => (mc.k, mc.solution, Some(mc.bound)),
                None => return Ok(None),
            }
        } else {
            match min_feasible_k_with(&comp.graph, &comp.capacities, &local_roles, k_search)? {
                Some((k, sol)) => (k, sol, None),
                None => return Ok(None),
            }
        };
        total_k += k;
        if let Some(b) = &cost_bound {
            total_cost += b;
        }
        out.push(ComponentCert {
            vertices: comp.vertices,
            graph: comp.graph,
            capacities: comp.capacities,
            roles: local_roles,
            k,
            solution,
            cost_bound,
        });
    }
    let passes = match variant {
        Variant::Budget => &total_cost <= inst.budget().expect("checked"),
        _ => total_k <= inst.k(),
    };
    Ok(passes.then(|| Certification {
        tau: tau.clone(),
        components: out,
    }))
}

/// Smallest candidate threshold that certifies.
pub fn find_tau_star(
    inst: &MetricInstance,
    variant: Variant,
    opts: &SolveOptions,
) -> Result<Certification> {
    let candidates = inst.candidate_thresholds();
    let infeasible = if variant == Variant::Budget {
        Error::BudgetInfeasible
    } else {
        Error::GloballyInfeasible
    };
    let binary = match variant {
        Variant::Budget => opts.budget_binary,
        _ => opts.search == SearchMode::Binary,
    };
    let check = |tau: &Rational| certify(inst, variant, tau, opts.k_search);
    if !binary {
        for tau in &candidates {
            if let Some(c) = check(tau)? {
                return Ok(c);
            }
        }
        return Err(infeasible);
    }
    let last = candidates.last().expect("at least the zero threshold");
    let Some(mut best) = check(last)? else {
        return Err(infeasible);
    };
    // Invariant: candidates[hi] certifies, everything below lo does not.
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match check(&candidates[mid])? {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => lo = mid + 1,
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub vertices: Vec<usize>,
    pub k_i: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStage {
    pub name: &'static str,
    pub values: Vec<Rational>,
}

/// Intermediate vectors of one component, for debugging. Vectors are indexed
/// by component-local vertex; reduction stages append one auxiliary vertex
/// per cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentTrace {
    pub vertices: Vec<usize>,
    pub k_i: usize,
    pub stages: Vec<TraceStage>,
    /// Opening movements (`{0, L}` variant), in component-local indices.
    pub parcels: Vec<OpeningParcel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub variant: Variant,
    pub tau_star: Rational,
    pub metric_radius: Rational,
    pub hop_radius: u32,
    pub ratio_bound: u32,
    pub opens: Vec<usize>,
    /// Center of each vertex; `None` for vertices that need no service.
    pub assignment: Vec<Option<usize>>,
    pub components: Vec<ComponentReport>,
    pub certified: bool,
    pub cost: Option<Rational>,
    pub budget: Option<Rational>,
    pub clients: Option<Vec<usize>>,
    pub facilities: Option<Vec<usize>>,
    pub trace: Option<Vec<ComponentTrace>>,
}

fn reduction_stages(lp_y: &[Rational], red: &Reduction) -> Vec<TraceStage> {
    vec![
        TraceStage {
            name: "lp",
            values: lp_y.to_vec(),
        },
        TraceStage {
            name: "first",
            values: red.first.clone(),
        },
        TraceStage {
            name: "second",
            values: red.second.clone(),
        },
        TraceStage {
            name: "third",
            values: red.third.clone(),
        },
    ]
}

/// Solves `inst` with the requested variant.
pub fn solve(inst: &MetricInstance, opts: &SolveOptions) -> Result<Solution> {
    let variant = resolve_variant(inst, opts.variant)?;
    let cert = find_tau_star(inst, variant, opts)?;
    let n = inst.n();
    let mut opens = Vec::new();
    let mut assignment = vec![None; n];
    let mut hop_radius = 0;
    let mut reports = Vec::new();
    let mut traces = Vec::new();
    for comp in &cert.components {
        reports.push(ComponentReport {
            vertices: comp.vertices.clone(),
            k_i: comp.k,
        });
        if comp.k == 0 {
            continue;
        }
        let y = &comp.solution.y;
        let (g, caps) = (&comp.graph, &comp.capacities);
        let (open, stages, parcels) = match variant {
            Variant::ZeroL => {
                let out = zerol_round(g, caps, y)?;
                let stages = vec![
                    TraceStage {
                        name: "lp",
                        values: y.clone(),
                    },
                    TraceStage {
                        name: "aggregated",
                        values: out.aggregated.clone(),
                    },
                    TraceStage {
                        name: "final",
                        values: out.y.clone(),
                    },
                ];
                (out.open, stages, out.parcels)
            }
            Variant::Supplier => {
                let fac: Vec<bool> = comp.roles.openable.clone();
                let red = round_supplier_component(g, caps, &fac, y)?;
                let stages = reduction_stages(y, &red);
                (red.open, stages, Vec::new())
            }
            Variant::Budget => {
                let cost: Vec<Rational> = comp
                    .vertices
                    .iter()
                    .map(|&v| inst.costs().expect("checked")[v].clone())
                    .collect();
                let out = round_budget_component(g, caps, &cost, y)?;
                let bound = comp.cost_bound.as_ref().expect("budget certificate");
                if &out.cost > bound {
                    return Err(Error::verification("budget", "component cost exceeds its bound"));
                }
                let stages = reduction_stages(y, &out.reduction);
                (out.reduction.open, stages, Vec::new())
            }
            Variant::Center | Variant::Auto => {
                let red = reduce_and_round(g, caps, y)?;
                let stages = reduction_stages(y, &red);
                (red.open, stages, Vec::new())
            }
        };
        if open.len() != comp.k {
            return Err(Error::verification(
                "component rounding",
                format!("opened {} centers for k_i = {}", open.len(), comp.k),
            ));
        }
        let a = extract_assignment(g, caps, &open, &comp.roles.served, variant.transfer_radius())?;
        hop_radius = hop_radius.max(a.hop_radius(g));
        for (local, s) in a.sigma.iter().enumerate() {
            assignment[comp.vertices[local]] = s.map(|s| comp.vertices[s]);
        }
        opens.extend(open.iter().map(|&v| comp.vertices[v]));
        if opts.trace {
            traces.push(ComponentTrace {
                vertices: comp.vertices.clone(),
                k_i: comp.k,
                stages,
                parcels,
            });
        }
    }
    opens.sort_unstable();
    if hop_radius > variant.ratio_bound() {
        return Err(Error::verification(
            "assignment",
            format!("hop radius {hop_radius} exceeds {}", variant.ratio_bound()),
        ));
    }

    let metric_radius = metric_radius(inst, &assignment);
    let (cost, budget) = match variant {
        Variant::Budget => {
            let c = inst.costs().expect("checked");
            (
                Some(sum(&opens.iter().map(|&v| c[v].clone()).collect::<Vec<_>>())),
                inst.budget().cloned(),
            )
        }
        _ => (None, None),
    };
    let (clients, facilities) = match variant {
        Variant::Supplier => (
            Some((0..n).filter(|&v| inst.is_client(v)).collect()),
            Some((0..n).filter(|&v| inst.is_facility(v)).collect()),
        ),
        _ => (None, None),
    };
    let mut solution = Solution {
        variant,
        tau_star: cert.tau,
        metric_radius,
        hop_radius,
        ratio_bound: variant.ratio_bound(),
        opens,
        assignment,
        components: reports,
        certified: false,
        cost,
        budget,
        clients,
        facilities,
        trace: opts.trace.then_some(traces),
    };
    validate(inst, &solution)?;
    solution.certified = true;
    Ok(solution)
}

/// `max_v c(v, sigma(v))` over assigned vertices.
pub fn metric_radius(inst: &MetricInstance, assignment: &[Option<usize>]) -> Rational {
    assignment
        .iter()
        .enumerate()
        .filter_map(|(v, s)| s.map(|s| inst.dist(v, s).clone()))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Independent re-validation of a solution against its instance: opened
/// set, assignment totality and capacities, reported radius, the ratio bound
/// against `tau_star`, and the budget.
pub fn validate(inst: &MetricInstance, sol: &Solution) -> Result<()> {
    let n = inst.n();
    let fail = |d: String| Err(Error::verification("solution", d));
    if sol.assignment.len() != n {
        return fail(format!("assignment has {} entries for {n} vertices", sol.assignment.len()));
    }
    let mut is_open = vec![false; n];
    for &s in &sol.opens {
        if s >= n || is_open[s] {
            return fail(format!("open vertex {s} is out of range or repeated"));
        }
        is_open[s] = true;
        if sol.variant == Variant::Supplier && !inst.is_facility(s) {
            return fail(format!("client {s} is open"));
        }
    }
    if sol.variant != Variant::Budget && sol.opens.len() > inst.k() {
        return fail(format!("{} centers open with k = {}", sol.opens.len(), inst.k()));
    }
    let served: Vec<bool> = (0..n)
        .map(|v| sol.variant != Variant::Supplier || inst.is_client(v))
        .collect();
    let mut load = vec![0u64; n];
    for v in 0..n {
        match (served[v], sol.assignment[v]) {
            (true, None) => return fail(format!("vertex {v} is unassigned")),
            (false, Some(_)) => return fail(format!("facility {v} is assigned")),
            (true, Some(s)) if s >= n || !is_open[s] => {
                return fail(format!("vertex {v} assigned to a closed center"))
            }
            (true, Some(s)) => load[s] += 1,
            (false, None) => {}
        }
    }
    if let Some(s) = (0..n).find(|&s| load[s] > inst.capacities()[s]) {
        return fail(format!("center {s} serves {} > {}", load[s], inst.capacities()[s]));
    }
    if metric_radius(inst, &sol.assignment) != sol.metric_radius {
        return fail("reported metric radius differs from the assignment".into());
    }
    if sol.ratio_bound != sol.variant.ratio_bound() {
        return fail("ratio bound does not match the variant".into());
    }
    if sol.metric_radius > from_u64(sol.ratio_bound as u64) * &sol.tau_star {
        return fail(format!(
            "radius exceeds {} * tau_star",
            sol.ratio_bound
        ));
    }
    if sol.variant == Variant::Budget {
        let c = inst.costs().ok_or_else(|| Error::InvalidParams("no costs".into()))?;
        let total = sum(&sol.opens.iter().map(|&v| c[v].clone()).collect::<Vec<_>>());
        if Some(&total) != sol.cost.as_ref() || Some(&total) > inst.budget() {
            return fail("opening cost is misreported or over budget".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceData;
    use crate::rational::int;

    fn gap(c: i64) -> MetricInstance {
        let mut dist = Vec::new();
        for u in 0..6 {
            for v in 0..6 {
                dist.push(int(if u == v {
                    0
                } else if u / 3 == v / 3 {
                    1
                } else {
                    c
                }));
            }
        }
        MetricInstance::new(InstanceData {
            dist,
            capacity: vec![2; 6],
            k: 3,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn gap_instance_is_rejected_at_one() {
        let inst = gap(100);
        let at_one = certify(&inst, Variant::Center, &int(1), KSearch::Binary).unwrap();
        assert!(at_one.is_none());
        let cert = find_tau_star(&inst, Variant::Center, &SolveOptions::default()).unwrap();
        assert_eq!(cert.tau, int(100));
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.variant, Variant::ZeroL);
        assert_eq!(sol.tau_star, int(100));
        assert!(sol.certified);
    }

    #[test]
    fn gap_components_at_one() {
        let inst = gap(100);
        let g = variant_graph(&inst, Variant::Center, &int(1)).unwrap();
        let comps = components(&g, inst.capacities());
        let ks: Vec<usize> = comps
            .iter()
            .map(|c| {
                min_feasible_k_with(&c.graph, &c.capacities, &Roles::all(3), KSearch::Binary)
                    .unwrap()
                    .unwrap()
                    .0
            })
            .collect();
        assert_eq!(ks, vec![2, 2]);
    }

    #[test]
    fn singleton() {
        let inst = MetricInstance::new(InstanceData {
            dist: vec![int(0)],
            capacity: vec![1],
            k: 1,
            ..Default::default()
        })
        .unwrap();
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.tau_star, int(0));
        assert_eq!(sol.opens, vec![0]);
        assert_eq!(sol.metric_radius, int(0));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [
            Variant::Auto,
            Variant::Center,
            Variant::ZeroL,
            Variant::Supplier,
            Variant::Budget,
        ] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("other".parse::<Variant>().is_err());
    }

    #[test]
    fn scan_and_binary_agree_on_gap() {
        let inst = gap(7);
        let scan = SolveOptions {
            search: SearchMode::Scan,
            variant: Variant::Center,
            ..Default::default()
        };
        let binary = SolveOptions {
            variant: Variant::Center,
            ..Default::default()
        };
        assert_eq!(solve(&inst, &scan).unwrap(), solve(&inst, &binary).unwrap());
    }
}
