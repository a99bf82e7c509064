//! Rounding stages swept over random trees and graphs; every output is
//! re-checked with the transfer and assignment verifiers.

use capkc_core::extensions::{round_budget_component, round_supplier_component};
use capkc_core::graph::components;
use capkc_core::lp::{min_cost_for_component, min_feasible_k, Roles};
use capkc_core::rational::{from_u64, ratio, sum};
use capkc_core::reduce::reduce_and_round;
use capkc_core::transfer::{extract_assignment, verify_transfer};
use capkc_core::tree::{round_tree_traced, verify_step_balance};
use capkc_core::zerol::{check_zerol_clustering, zerol_cluster, zerol_preprocess, zerol_round};
use capkc_core::{Graph, Rational, TransferVector, TreeInstance};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Tree on `0..n` rooted at 0, internal openings 1, leaf openings in
/// quarters raised until the total is an integer.
fn tree_case() -> impl Strategy<Value = TreeInstance> {
    (1usize..=10).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<prop::sample::Index>(), n),
            proptest::collection::vec(0u64..=4, n),
            proptest::collection::vec(1i64..=4, n),
        )
            .prop_map(move |(pick, caps, quarters)| {
                let parent: Vec<Option<usize>> =
                    (0..n).map(|v| (v > 0).then(|| pick[v].index(v))).collect();
                let internal: Vec<bool> = (0..n).map(|v| parent.contains(&Some(v))).collect();
                let mut y: Vec<Rational> = (0..n)
                    .map(|v| if internal[v] { Rational::one() } else { ratio(quarters[v], 4) })
                    .collect();
                let total = sum(&y);
                let mut deficit = total.ceil() - total;
                for v in (0..n).filter(|&v| !internal[v]) {
                    let add = (Rational::one() - &y[v]).min(deficit.clone());
                    y[v] += &add;
                    deficit -= add;
                }
                TreeInstance::new(parent, caps, y).unwrap()
            })
    })
}

/// Connected graph: random spanning tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1usize..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<prop::sample::Index>(), n),
            proptest::collection::vec(proptest::bool::weighted(0.3), n * n),
        )
            .prop_map(move |(pick, extra)| {
                let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (pick[v].index(v), v)).collect();
                for u in 0..n {
                    for v in u + 1..n {
                        if extra[u * n + v] {
                            edges.push((u, v));
                        }
                    }
                }
                Graph::from_edges(n, edges)
            })
    })
}

fn capacities_covering(n: usize, raw: &[u64]) -> Vec<u64> {
    let mut caps = raw[..n].to_vec();
    let mut i = 0;
    while (caps.iter().sum::<u64>() as usize) < n {
        caps[i % n] += 1;
        i += 1;
    }
    caps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_rounding_is_a_two_hop_transfer(t in tree_case()) {
        let (open, steps) = round_tree_traced(&t).unwrap();
        prop_assert_eq!(open.len(), t.total());
        prop_assert!(open.iter().all(|&v| v < t.n()));
        for step in &steps {
            prop_assert!(verify_step_balance(step).is_ok());
        }
        let y2 = TransferVector::from_open_set(t.n(), &open);
        prop_assert!(verify_transfer(&t.graph(), t.capacities(), t.y(), &y2.values, 2).unwrap().is_yes());
    }

    #[test]
    fn reduction_opens_k_centers_within_eight_hops(
        g in connected_graph(8),
        raw in proptest::collection::vec(0u64..=3, 8),
    ) {
        let n = g.n();
        let caps = capacities_covering(n, &raw);
        let lp = min_feasible_k(&g, &caps, &Roles::all(n)).unwrap();
        prop_assume!(lp.is_some());
        let (k, lp) = lp.unwrap();
        let red = reduce_and_round(&g, &caps, &lp.y).unwrap();
        prop_assert_eq!(red.open.len(), k);
        prop_assert_eq!(red.radius, 8);
        let y2 = TransferVector::from_open_set(n, &red.open);
        prop_assert!(verify_transfer(&g, &caps, &lp.y, &y2.values, 8).unwrap().is_yes());
        let a = extract_assignment(&g, &caps, &red.open, &vec![true; n], 8).unwrap();
        prop_assert!(a.hop_radius(&g) <= 9);
    }

    #[test]
    fn zerol_rounding_is_a_five_hop_transfer(
        g in connected_graph(9),
        level in 2u64..=4,
        flags in proptest::collection::vec(any::<bool>(), 9),
    ) {
        let n = g.n();
        let mut caps: Vec<u64> = (0..n).map(|v| if flags[v] { level } else { 0 }).collect();
        let mut i = 0;
        while (caps.iter().sum::<u64>() as usize) < n {
            caps[i % n] = level;
            i += 1;
        }
        let pre = zerol_preprocess(&g, &caps).unwrap();
        for comp in components(&pre, &caps) {
            let m = comp.len();
            let openable: Vec<bool> = comp.capacities.iter().map(|&c| c > 0).collect();
            let Some((k, lp)) = min_feasible_k(&comp.graph, &comp.capacities, &Roles::open_only(openable)).unwrap() else {
                continue;
            };
            let cl = zerol_cluster(&comp.graph, &comp.capacities).unwrap();
            prop_assert!(check_zerol_clustering(&comp.graph, &comp.capacities, &cl).is_ok());
            let out = zerol_round(&comp.graph, &comp.capacities, &lp.y).unwrap();
            prop_assert_eq!(out.open.len(), k);
            prop_assert!(out.open.iter().all(|&v| comp.capacities[v] > 0));
            for p in &out.parcels {
                prop_assert!(comp.graph.within(p.origin, p.location, 5));
            }
            prop_assert!(verify_transfer(&comp.graph, &comp.capacities, &lp.y, &out.y, 5).unwrap().is_yes());
            extract_assignment(&comp.graph, &comp.capacities, &out.open, &vec![true; m], 5).unwrap();
        }
    }

    #[test]
    fn supplier_rounding_opens_facilities_within_ten_hops(
        nf in 1usize..=4,
        nc in 1usize..=6,
        adj in proptest::collection::vec(proptest::bool::weighted(0.5), 24),
        raw in proptest::collection::vec(1u64..=4, 4),
    ) {
        let n = nf + nc;
        let is_facility: Vec<bool> = (0..n).map(|v| v < nf).collect();
        let mut edges: Vec<(usize, usize)> = (0..nc).map(|c| (c % nf, nf + c)).collect();
        for f in 0..nf {
            for c in 0..nc {
                if adj[f * 6 + c] {
                    edges.push((f, nf + c));
                }
            }
        }
        let g = Graph::from_edges(n, edges);
        let mut caps = vec![0u64; n];
        caps[..nf].copy_from_slice(&raw[..nf]);
        for comp in components(&g, &caps) {
            let facility: Vec<bool> = comp.vertices.iter().map(|&v| is_facility[v]).collect();
            let Some((k, lp)) = min_feasible_k(&comp.graph, &comp.capacities, &Roles::supplier(&facility)).unwrap() else {
                continue;
            };
            if k == 0 {
                continue;
            }
            let red = round_supplier_component(&comp.graph, &comp.capacities, &facility, &lp.y).unwrap();
            prop_assert_eq!(red.open.len(), k);
            prop_assert_eq!(red.radius, 10);
            let y2 = TransferVector::from_open_set(comp.len(), &red.open);
            prop_assert!(verify_transfer(&comp.graph, &comp.capacities, &lp.y, &y2.values, 10).unwrap().is_yes());
            let clients: Vec<bool> = facility.iter().map(|f| !f).collect();
            extract_assignment(&comp.graph, &comp.capacities, &red.open, &clients, 10).unwrap();
        }
    }

    #[test]
    fn budget_rounding_costs_at_most_the_lp(
        g in connected_graph(7),
        level in 1u64..=3,
        raw in proptest::collection::vec(1i64..=12, 7),
    ) {
        let n = g.n();
        let caps = vec![level; n];
        let cost: Vec<Rational> = raw[..n].iter().map(|&c| ratio(c, 2)).collect();
        let mc = min_cost_for_component(&g, &caps, &cost, &Roles::all(n)).unwrap().unwrap();
        let out = round_budget_component(&g, &caps, &cost, &mc.solution.y).unwrap();
        prop_assert_eq!(&out.lp_cost, &mc.bound);
        prop_assert!(out.cost <= mc.bound);
        let open_cost: Rational = out.reduction.open.iter().map(|&v| cost[v].clone()).sum();
        prop_assert_eq!(&open_cost, &out.cost);
        // Fake capacities: L^ + C is the same constant everywhere.
        for v in 0..n {
            prop_assert_eq!(&out.fake.values[v] + &cost[v], &out.fake.values[0] + &cost[0]);
        }
        let y2 = TransferVector::from_open_set(n, &out.reduction.open);
        prop_assert!(verify_transfer(&g, &caps, &mc.solution.y, &y2.values, 8).unwrap().is_yes());
        prop_assert!(from_u64(level) * from_u64(out.reduction.open.len() as u64) >= from_u64(n as u64));
        prop_assert!(!mc.solution.y.iter().all(Rational::is_zero));
    }
}
