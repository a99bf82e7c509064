//! Acceptance suite: ten criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines are always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use capkc::bench;
use capkc::format::serialize_instance;
use capkc::json::solution_to_json;
use capkc_core::extensions::round_budget_component;
use capkc_core::graph::{build_threshold_graph, components};
use capkc_core::lp::{check_solution, min_feasible_k, KSearch, Roles};
use capkc_core::oracle::{exact_opt, exhaustive_transfer_check, generate, GenKind, GenParams};
use capkc_core::pipeline::{certify, validate, Certification};
use capkc_core::rational::{format as fmt_q, from_u64, int, ratio, sum};
use capkc_core::transfer::verify_transfer;
use capkc_core::tree::round_tree;
use capkc_core::zerol::{check_zerol_clustering, zerol_cluster, zerol_round};
use capkc_core::{solve, Graph, MetricInstance, Rational, Solution, SolveOptions, TransferVector, TreeInstance, Variant};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Name, check, and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn options(variant: Variant) -> SolveOptions {
    SolveOptions {
        variant,
        ..Default::default()
    }
}

fn certification(inst: &MetricInstance, sol: &Solution) -> Result<Certification, String> {
    certify(inst, sol.variant, &sol.tau_star, KSearch::Binary)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "tau_star does not re-certify".to_string())
}

/// Opened vertices of `sol` inside a component, in local indices.
fn local_open(vertices: &[usize], opens: &[usize]) -> Vec<usize> {
    (0..vertices.len()).filter(|&i| opens.contains(&vertices[i])).collect()
}

/// Tracks the worst `radius / opt` seen.
#[derive(Default)]
struct Ratio(Option<Rational>);

impl Ratio {
    fn record(&mut self, radius: &Rational, opt: &Rational, bound: u32) -> Result<(), String> {
        ensure!(
            radius <= &(from_u64(bound.into()) * opt),
            "radius {} exceeds {bound} x OPT {}",
            fmt_q(radius),
            fmt_q(opt)
        );
        if !opt.is_zero() {
            let r = radius / opt;
            if self.0.as_ref().is_none_or(|m| &r > m) {
                self.0 = Some(r);
            }
        }
        Ok(())
    }

    fn show(&self) -> String {
        self.0.as_ref().map_or_else(|| "1".into(), fmt_q)
    }
}

fn solve_checked(inst: &MetricInstance, variant: Variant) -> Result<Solution, String> {
    let sol = solve(inst, &options(variant)).map_err(|e| e.to_string())?;
    validate(inst, &sol).map_err(|e| e.to_string())?;
    ensure!(sol.certified, "solution not certified");
    Ok(sol)
}

fn criterion_1() -> Outcome {
    let mut parent = vec![Some(0); 7];
    parent[0] = None;
    let mut y = vec![ratio(2, 3); 7];
    y[0] = int(1);
    let tree = TreeInstance::new(parent, vec![1; 7], y.clone()).map_err(|e| e.to_string())?;
    let g = tree.graph();
    let open = round_tree(&tree).map_err(|e| e.to_string())?;
    ensure!(open.len() == 5, "opened {} centers", open.len());
    let y2 = TransferVector::from_open_set(7, &open).values;
    ensure!(verify_transfer(&g, &[1; 7], &y, &y2, 2).unwrap().is_yes(), "not a distance-2 transfer");
    let mut subsets = 0;
    for mask in 0u32..1 << 7 {
        if mask.count_ones() != 5 {
            continue;
        }
        subsets += 1;
        let set: Vec<usize> = (0..7).filter(|&v| mask >> v & 1 == 1).collect();
        let cand = TransferVector::from_open_set(7, &set).values;
        ensure!(
            !exhaustive_transfer_check(&g, &[1; 7], &y, &cand, 1).unwrap().is_yes(),
            "{set:?} is a distance-1 transfer"
        );
    }
    ensure!(subsets == 21, "{subsets} subsets");
    Ok(format!("opened {open:?}; none of 21 five-subsets is a distance-1 transfer"))
}

fn criterion_2() -> Outcome {
    let mut seen = Vec::new();
    for c in [int(2), int(10), int(100), ratio(7, 2)] {
        let params = GenParams {
            c: Some(c.clone()),
            ..GenParams::new(6, 0)
        };
        let inst = generate(GenKind::Gap2x3, &params).map_err(|e| e.to_string())?;
        let g = build_threshold_graph(&inst, &int(1)).into_graph();
        let mut total = 0;
        for comp in components(&g, inst.capacities()) {
            let (k, _) = min_feasible_k(&comp.graph, &comp.capacities, &Roles::all(comp.len()))
                .map_err(|e| e.to_string())?
                .ok_or("component infeasible")?;
            total += k;
        }
        ensure!(total == 4, "sum of k_i at tau = 1 is {total}");
        ensure!(certify(&inst, Variant::Center, &int(1), KSearch::Binary).unwrap().is_none(), "tau = 1 certified");
        let sol = solve_checked(&inst, Variant::Auto)?;
        ensure!(sol.tau_star == c, "tau_star {}", fmt_q(&sol.tau_star));
        let opt = exact_opt(&inst, Variant::Center).map_err(|e| e.to_string())?;
        ensure!(opt.radius == c, "OPT {}", fmt_q(&opt.radius));
        seen.push(fmt_q(&c));
    }
    Ok(format!("sum k_i = 4 > 3 at tau = 1; tau_star = OPT = C for C in {seen:?}"))
}

fn criterion_3() -> Outcome {
    let mut worst = Ratio::default();
    let mut count = 0;
    for kind in [GenKind::GridL1, GenKind::RandomGraphHop] {
        for seed in 0..100u64 {
            let n = 5 + (seed as usize % 6);
            let inst = generate(kind, &GenParams::new(n, seed)).map_err(|e| e.to_string())?;
            let sol = solve_checked(&inst, Variant::Center)?;
            let opt = exact_opt(&inst, Variant::Center).map_err(|e| e.to_string())?;
            worst.record(&sol.metric_radius, &opt.radius, 9).map_err(|e| format!("{} seed {seed}: {e}", kind.name()))?;
            for comp in certification(&inst, &sol)?.components {
                let open = local_open(&comp.vertices, &sol.opens);
                let y2 = TransferVector::from_open_set(comp.vertices.len(), &open).values;
                let v = verify_transfer(&comp.graph, &comp.capacities, &comp.solution.y, &y2, 8).map_err(|e| e.to_string())?;
                ensure!(v.is_yes(), "{} seed {seed}: composed transfer fails at r = 8", kind.name());
            }
            count += 1;
        }
    }
    Ok(format!("{count} instances, max radius/OPT {}", worst.show()))
}

fn random_tree(rng: &mut ChaCha8Rng) -> TreeInstance {
    let n = rng.gen_range(1..=14);
    let parent: Vec<Option<usize>> = (0..n).map(|v| (v > 0).then(|| rng.gen_range(0..v))).collect();
    let internal: Vec<bool> = (0..n).map(|v| parent.contains(&Some(v))).collect();
    let caps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
    let den = rng.gen_range(1..=6i64);
    let mut y: Vec<Rational> = (0..n)
        .map(|v| if internal[v] { Rational::one() } else { ratio(rng.gen_range(1..=den), den) })
        .collect();
    let total = sum(&y);
    let mut deficit = total.ceil() - total;
    for v in (0..n).filter(|&v| !internal[v]) {
        let add = (Rational::one() - &y[v]).min(deficit.clone());
        y[v] += &add;
        deficit -= add;
    }
    TreeInstance::new(parent, caps, y).expect("valid by construction")
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_n = 0;
    for i in 0..1000 {
        let t = random_tree(&mut rng);
        max_n = max_n.max(t.n());
        let open = round_tree(&t).map_err(|e| format!("tree {i}: {e}"))?;
        ensure!(open.len() == t.total(), "tree {i}: |S| = {} but sum y = {}", open.len(), t.total());
        let y2 = TransferVector::from_open_set(t.n(), &open).values;
        let g = t.graph();
        ensure!(verify_transfer(&g, t.capacities(), t.y(), &y2, 2).unwrap().is_yes(), "tree {i}: flow check fails");
        ensure!(
            exhaustive_transfer_check(&g, t.capacities(), t.y(), &y2, 2).unwrap().is_yes(),
            "tree {i}: exhaustive check fails"
        );
    }
    Ok(format!("1000 trees (n <= {max_n}) verified by flow and by all subsets"))
}

fn criterion_5() -> Outcome {
    let mut worst = Ratio::default();
    let mut parcels = 0;
    for seed in 0..100u64 {
        let n = 5 + (seed as usize % 6);
        let inst = generate(GenKind::ZeroLRandom, &GenParams::new(n, seed)).map_err(|e| e.to_string())?;
        let sol = solve_checked(&inst, Variant::ZeroL)?;
        let opt = exact_opt(&inst, Variant::ZeroL).map_err(|e| e.to_string())?;
        worst.record(&sol.metric_radius, &opt.radius, 6).map_err(|e| format!("seed {seed}: {e}"))?;
        for comp in certification(&inst, &sol)?.components {
            if comp.k == 0 {
                continue;
            }
            let cl = zerol_cluster(&comp.graph, &comp.capacities).map_err(|e| e.to_string())?;
            check_zerol_clustering(&comp.graph, &comp.capacities, &cl).map_err(|e| format!("seed {seed}: {e}"))?;
            let out = zerol_round(&comp.graph, &comp.capacities, &comp.solution.y).map_err(|e| e.to_string())?;
            for p in &out.parcels {
                ensure!(comp.graph.within(p.origin, p.location, 5), "seed {seed}: parcel moved beyond 5 hops");
            }
            parcels += out.parcels.len();
            ensure!(
                verify_transfer(&comp.graph, &comp.capacities, &comp.solution.y, &out.y, 5).unwrap().is_yes(),
                "seed {seed}: not a distance-5 transfer"
            );
            ensure!(out.open == local_open(&comp.vertices, &sol.opens), "seed {seed}: opens differ from the pipeline");
        }
    }
    Ok(format!("100 instances, {parcels} parcels, max radius/OPT {}", worst.show()))
}

fn criterion_6() -> Outcome {
    let mut worst = Ratio::default();
    for seed in 0..100u64 {
        let n = 4 + (seed as usize % 7);
        let inst = generate(GenKind::SupplierRandom, &GenParams::new(n, seed)).map_err(|e| e.to_string())?;
        let facilities = (0..n).filter(|&v| inst.is_facility(v)).count();
        ensure!(facilities <= 6 && n - facilities <= 8, "seed {seed}: {facilities} facilities");
        let sol = solve_checked(&inst, Variant::Supplier)?;
        for v in 0..n {
            ensure!(sol.assignment[v].is_some() == inst.is_client(v), "seed {seed}: vertex {v} coverage");
        }
        ensure!(sol.opens.iter().all(|&v| inst.is_facility(v)), "seed {seed}: a client is open");
        let opt = exact_opt(&inst, Variant::Supplier).map_err(|e| e.to_string())?;
        worst.record(&sol.metric_radius, &opt.radius, 11).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("100 instances, clients-only coverage, max radius/OPT {}", worst.show()))
}

fn criterion_7() -> Outcome {
    let mut worst = Ratio::default();
    for seed in 0..100u64 {
        let n = 4 + (seed as usize % 6);
        let inst = generate(GenKind::BudgetRandom, &GenParams::new(n, seed)).map_err(|e| e.to_string())?;
        let sol = solve_checked(&inst, Variant::Budget)?;
        let (cost, budget) = (sol.cost.clone().ok_or("no cost")?, sol.budget.clone().ok_or("no budget")?);
        ensure!(cost <= budget, "seed {seed}: cost {} over budget {}", fmt_q(&cost), fmt_q(&budget));
        let opt = exact_opt(&inst, Variant::Budget).map_err(|e| e.to_string())?;
        worst.record(&sol.metric_radius, &opt.radius, 9).map_err(|e| format!("seed {seed}: {e}"))?;
        let all_cost = inst.costs().ok_or("no costs")?;
        for comp in certification(&inst, &sol)?.components {
            if comp.k == 0 {
                continue;
            }
            let c: Vec<Rational> = comp.vertices.iter().map(|&v| all_cost[v].clone()).collect();
            let out = round_budget_component(&comp.graph, &comp.capacities, &c, &comp.solution.y).map_err(|e| e.to_string())?;
            let y2 = TransferVector::from_open_set(comp.vertices.len(), &out.reduction.open).values;
            ensure!(
                verify_transfer(&comp.graph, &comp.capacities, &comp.solution.y, &y2, 8).unwrap().is_yes(),
                "seed {seed}: not a true-capacity distance-8 transfer"
            );
            ensure!(Some(&out.cost) <= comp.cost_bound.as_ref(), "seed {seed}: rounded cost above the LP");
        }
    }
    Ok(format!("100 instances within budget, max radius/OPT {}", worst.show()))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut yes, mut no) = (0, 0);
    for i in 0..1000 {
        let n = rng.gen_range(1..=12);
        let p: f64 = rng.gen_range(0.1..0.6);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges);
        let caps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let den = rng.gen_range(1..=4i64);
        let y: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(0..=den), den)).collect();
        // y2: y with random moves of 1/den between vertices.
        let mut y2 = y.clone();
        for _ in 0..rng.gen_range(0..=n) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let step = ratio(1, den);
            if y2[a] >= step && y2[b] <= Rational::one() - &step {
                y2[a] -= &step;
                y2[b] += step;
            }
        }
        let r = rng.gen_range(0..=3);
        let fast = verify_transfer(&g, &caps, &y, &y2, r).map_err(|e| e.to_string())?;
        let slow = exhaustive_transfer_check(&g, &caps, &y, &y2, r).map_err(|e| e.to_string())?;
        ensure!(fast.is_yes() == slow.is_yes(), "case {i}: flow and exhaustive checks disagree");
        if fast.is_yes() {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("1000 cases ({yes} yes, {no} no), zero disagreements"))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut count = 0;
    for kind in GenKind::ALL {
        for seed in 0..5u64 {
            let inst = generate(kind, &GenParams::new(6 + seed as usize, seed)).map_err(|e| e.to_string())?;
            let a = solution_to_json(&solve(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?);
            let b = solution_to_json(&solve(&inst, &SolveOptions::default()).map_err(|e| e.to_string())?);
            ensure!(a == b, "{} seed {seed}: repeated solves differ", kind.name());
            let path = dir.path().join(format!("{}_{seed}.capkc", kind.name()));
            std::fs::write(path, serialize_instance(&inst)).map_err(|e| e.to_string())?;
            count += 1;
        }
    }
    let run = |jobs| bench::run(dir.path(), 10, jobs).map(|r| r.to_json()).map_err(|e| e.to_string());
    let serial = run(1)?;
    ensure!(run(4)? == serial, "bench --jobs 4 differs from --jobs 1");
    ensure!(run(4)? == serial, "repeated bench --jobs 4 differs");
    Ok(format!("{count} instances solved twice; bench --jobs 1 and --jobs 4 byte-identical"))
}

fn criterion_10() -> Outcome {
    let mut checked = 0;
    for kind in GenKind::ALL {
        for seed in 0..15u64 {
            let inst = generate(kind, &GenParams::new(5 + seed as usize % 5, seed)).map_err(|e| e.to_string())?;
            let sol = solve_checked(&inst, Variant::Auto)?;
            for comp in certification(&inst, &sol)?.components {
                check_solution(&comp.graph, &comp.capacities, comp.k, &comp.roles, &comp.solution)
                    .map_err(|e| format!("{} seed {seed}: {e}", kind.name()))?;
                ensure!(sum(&comp.solution.y) == from_u64(comp.k as u64), "sum y differs from k_i");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} component LP solutions re-checked exactly"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("tree rounding optimality pair", criterion_1, 1),
        ("gap-instance preprocessing", criterion_2, 1),
        ("nine-approximation certification", criterion_3, 600),
        ("tree-rounder soundness sweep", criterion_4, 300),
        ("{0,L} six-approximation", criterion_5, 600),
        ("supplier eleven-approximation", criterion_6, 600),
        ("budget nine-approximation", criterion_7, 600),
        ("checker cross-validation", criterion_8, 300),
        ("determinism", criterion_9, 120),
        ("LP exactness", criterion_10, 600),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let label = format!("criterion {}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(*limit) => Err(format!("took {elapsed:.2?}, limit {limit}s")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {label} ({elapsed:.2?}): {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {label} ({elapsed:.2?}): {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
