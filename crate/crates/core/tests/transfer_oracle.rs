//! Max-flow and the transfer check against brute force over all subsets.

use capkc_core::flow::FlowNetwork;
use capkc_core::oracle::exhaustive_transfer_check;
use capkc_core::rational::{from_u64, int, ratio, sum};
use capkc_core::transfer::{compose_check, verify_transfer, Violation};
use capkc_core::{Graph, Rational, Verdict};
use num_traits::Zero;
use proptest::prelude::*;

fn graph_from_mask(n: usize, mask: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut i = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask[i] {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    Graph::from_edges(n, edges)
}

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2)
            .prop_map(move |m| graph_from_mask(n, &m))
    })
}

/// Openings in multiples of 1/4 with equal totals, capacities in 0..=3.
fn transfer_case() -> impl Strategy<Value = (Graph, Vec<u64>, Vec<Rational>, Vec<Rational>)> {
    graph().prop_flat_map(|g| {
        let n = g.n();
        (
            Just(g),
            proptest::collection::vec(0u64..=3, n),
            proptest::collection::vec(0i64..=4, n),
            proptest::collection::vec(0i64..=4, n),
        )
            .prop_map(|(g, caps, a, mut b)| {
                // Move units of b until both totals agree.
                let (sa, mut sb): (i64, i64) = (a.iter().sum(), b.iter().sum());
                let mut i = 0;
                while sb != sa {
                    let j = i % b.len();
                    if sb < sa && b[j] < 4 {
                        b[j] += 1;
                        sb += 1;
                    } else if sb > sa && b[j] > 0 {
                        b[j] -= 1;
                        sb -= 1;
                    }
                    i += 1;
                }
                let q = |v: &[i64]| v.iter().map(|&x| ratio(x, 4)).collect::<Vec<_>>();
                (g, caps, q(&a), q(&b))
            })
    })
}

fn violated(g: &Graph, caps: &[u64], y: &[Rational], y2: &[Rational], r: u32, set: &[usize]) -> bool {
    let lhs: Rational = set.iter().map(|&u| from_u64(caps[u]) * &y[u]).sum();
    let rhs: Rational = (0..g.n())
        .filter(|&v| g.hop_to_set(v, set).is_some_and(|h| h <= r))
        .map(|v| from_u64(caps[v]) * &y2[v])
        .sum();
    lhs > rhs
}

/// Minimum `s`-`t` cut by enumerating which inner nodes sit with the source.
fn brute_min_cut(n: usize, arcs: &[(usize, usize, u64)]) -> u64 {
    let inner: Vec<usize> = (1..n - 1).collect();
    (0u32..1 << inner.len())
        .map(|mask| {
            let side = |v: usize| v == 0 || (v != n - 1 && mask >> (v - 1) & 1 == 1);
            arcs.iter().filter(|&&(a, b, _)| side(a) && !side(b)).map(|a| a.2).sum()
        })
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flow_value_equals_min_cut(
        n in 2usize..=7,
        raw in proptest::collection::vec((0usize..7, 0usize..7, 0u64..=6), 0..20),
    ) {
        let arcs: Vec<(usize, usize, u64)> = raw
            .into_iter()
            .map(|(a, b, c)| (a % n, b % n, c))
            .filter(|&(a, b, _)| a != b)
            .collect();
        let mut net = FlowNetwork::new(n, 0, n - 1);
        for &(a, b, c) in &arcs {
            net.add_arc(a, b, c);
        }
        let flow = net.max_flow();
        prop_assert_eq!(flow.value, brute_min_cut(n, &arcs));
        // The returned cut is a minimum cut.
        let cut: u64 = arcs
            .iter()
            .filter(|&&(a, b, _)| flow.source_side[a] && !flow.source_side[b])
            .map(|a| a.2)
            .sum();
        prop_assert_eq!(cut, flow.value);
    }

    #[test]
    fn flow_verdict_matches_exhaustive((g, caps, y, y2) in transfer_case(), r in 0u32..=3) {
        let fast = verify_transfer(&g, &caps, &y, &y2, r).unwrap();
        let slow = exhaustive_transfer_check(&g, &caps, &y, &y2, r).unwrap();
        prop_assert_eq!(fast.is_yes(), slow.is_yes());
        if let Verdict::No(Violation::Subset(w)) = &fast {
            prop_assert!(violated(&g, &caps, &y, &y2, r, w));
        }
        if let Verdict::No(Violation::Subset(w)) = &slow {
            prop_assert!(violated(&g, &caps, &y, &y2, r, w));
        }
    }

    #[test]
    fn transfers_compose(
        (g, caps, y, y1) in transfer_case(),
        seed in proptest::collection::vec(0usize..8, 4),
        r1 in 0u32..=2,
        r2 in 0u32..=2,
    ) {
        // y2: y1 with a few quarter-units moved along edges.
        let n = g.n();
        let mut y2 = y1.clone();
        for &s in &seed {
            let u = s % n;
            if let Some(&v) = g.neighbors(u).first() {
                if y2[u] >= ratio(1, 4) {
                    y2[u] -= ratio(1, 4);
                    y2[v] += ratio(1, 4);
                }
            }
        }
        let first = verify_transfer(&g, &caps, &y, &y1, r1).unwrap();
        let second = verify_transfer(&g, &caps, &y1, &y2, r2).unwrap();
        if first.is_yes() && second.is_yes() {
            prop_assert!(verify_transfer(&g, &caps, &y, &y2, r1 + r2).unwrap().is_yes());
            prop_assert!(compose_check(&g, &caps, &y, &y1, r1, &y2, r2).is_ok());
        }
    }

    #[test]
    fn identity_and_monotone_radius((g, caps, y, y2) in transfer_case(), r in 0u32..=2) {
        prop_assert!(verify_transfer(&g, &caps, &y, &y, 0).unwrap().is_yes());
        if verify_transfer(&g, &caps, &y, &y2, r).unwrap().is_yes() {
            prop_assert!(verify_transfer(&g, &caps, &y, &y2, r + 1).unwrap().is_yes());
        }
    }
}

#[test]
fn unequal_totals_are_rejected() {
    let g = Graph::from_edges(2, [(0, 1)]);
    let v = verify_transfer(&g, &[1, 1], &[int(1), int(0)], &[int(1), int(1)], 3).unwrap();
    assert!(matches!(v, Verdict::No(Violation::Total { .. })));
}

#[test]
fn star_leaf_moves_need_two_hops() {
    // Hand check on the 7-vertex star, all capacities 1: replacing hub plus
    // leaves 1..=4 by leaves 2..=6 strands leaf 1's unit, whose one-hop
    // ball {0, 1} holds nothing afterwards; at two hops every leaf reaches
    // every other.
    let g = Graph::from_edges(7, (1..7).map(|v| (0, v)));
    let mut y = vec![Rational::zero(); 7];
    for v in 0..5 {
        y[v] = int(1);
    }
    let mut y2 = vec![Rational::zero(); 7];
    for v in 2..7 {
        y2[v] = int(1);
    }
    assert_eq!(sum(&y), sum(&y2));
    let one = verify_transfer(&g, &[1; 7], &y, &y2, 1).unwrap();
    assert!(violated(&g, &[1; 7], &y, &y2, 1, one.witness().unwrap()));
    assert!(!exhaustive_transfer_check(&g, &[1; 7], &y, &y2, 1).unwrap().is_yes());
    assert!(verify_transfer(&g, &[1; 7], &y, &y2, 2).unwrap().is_yes());
}
