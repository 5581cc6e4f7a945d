//! Property tests over randomized inputs: graph construction invariants,
//! flow balance on doubly-stochastic graphs, mass conservation of the limit
//! drift, and the gambler's-ruin dominance relations.

use proptest::prelude::*;

use sbs::analysis::gambler_ruin_success;
use sbs::dynamics::ModelParams;
use sbs::graph::GraphTopology;
use sbs::meanfield::{drift, OdeState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_regular_graphs_satisfy_structural_invariants(
        half_n in 3usize..16,
        d in 2usize..6,
        seed in any::<u64>(),
    ) {
        let n = half_n * 2; // even n keeps n*d feasible for odd d
        prop_assume!(d < n);
        let g = GraphTopology::build_random_regular(n, d, seed, false).unwrap();
        // Symmetry, no self-loops, sorted adjacency.
        for i in 0..n {
            prop_assert_eq!(g.degree(i), d);
            let nbrs = g.neighbors(i);
            prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
            for &j in nbrs {
                prop_assert!(j as usize != i);
                prop_assert!(g.neighbors(j as usize).contains(&(i as u32)));
            }
        }
        prop_assert_eq!(g.min_degree(), d);
        prop_assert_eq!(g.is_regular(), Some(d));
        // Regular implies doubly-stochastic, checked both ways.
        prop_assert!(g.is_doubly_stochastic(1e-12));
        prop_assert!(g.is_doubly_stochastic(0.0));
    }

    #[test]
    fn flow_balance_holds_on_doubly_stochastic_graphs(
        half_n in 3usize..12,
        d in 2usize..5,
        seed in any::<u64>(),
        mask in any::<u64>(),
    ) {
        let n = half_n * 2;
        prop_assume!(d < n);
        let g = GraphTopology::build_random_regular(n, d, seed, false).unwrap();
        let subset: Vec<u32> = (0..n as u32).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        let (outflow, inflow) = g.flow_balance(&subset).unwrap();
        prop_assert!((outflow - inflow).abs() <= 1e-9, "out {outflow} vs in {inflow}");
    }

    #[test]
    fn edge_list_text_round_trips(
        half_n in 3usize..12,
        d in 2usize..5,
        seed in any::<u64>(),
    ) {
        let n = half_n * 2;
        prop_assume!(d < n);
        let g = GraphTopology::build_random_regular(n, d, seed, false).unwrap();
        let text = g.to_edge_list_string();
        let parsed = GraphTopology::from_edge_list_str(&text).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(parsed.to_edge_list_string(), text);
    }

    #[test]
    fn drift_conserves_mass_and_respects_fixed_points(
        raw in prop::collection::vec(1e-6f64..1.0, 3..6),
        mu in 0.0f64..=1.0,
        lam in 0.1f64..3.0,
    ) {
        let k = raw.len() - 1;
        let mut rewards: Vec<f64> = (0..k).map(|i| 0.9 - 0.8 * i as f64 / k as f64).collect();
        rewards[0] = 0.9;
        let params = ModelParams::new(rewards, mu, lam).unwrap();
        let total: f64 = raw.iter().sum();
        let y = OdeState::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let d = drift(&y, &params).unwrap();
        let mass: f64 = d.iter().sum();
        prop_assert!(mass.abs() <= 1e-14, "mass {mass}");
        // Undecided share never grows.
        prop_assert!(d[0] <= 1e-15);
    }

    #[test]
    fn ruin_exact_dominates_bound_and_is_monotone(
        p in 0.501f64..0.99,
        n in 1u64..60,
        z0_frac in 0.0f64..=1.0,
    ) {
        let z0 = (z0_frac * n as f64).round() as u64;
        let r = gambler_ruin_success(p, z0, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.exact));
        prop_assert!(r.exact >= r.lower_bound - 1e-15);
        if z0 < n {
            let up = gambler_ruin_success(p, z0 + 1, n).unwrap();
            prop_assert!(up.exact >= r.exact - 1e-15, "monotone in z0");
        }
    }
}
