use nudgem::asymptotics::{atir_nudge_m, decay_rate, heavy_traffic_atir, m_opt};
use nudgem::fluid::{build_nudge_m_fluid, solve_riccati};
use nudgem::policy::{NamedPolicy, PolicyFn};
use nudgem::sim::{simulate, SimConfig, SimPolicy};
use nudgem::swap::{swap_pmf, SwapChain};
use nudgem::{JobMix, SizeShape};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = SizeShape> {
    prop_oneof![
        Just(SizeShape::Exp),
        (2usize..4).prop_map(|stages| SizeShape::Erlang { stages }),
        (1.5f64..6.0, 0.2f64..0.8).prop_map(|(scv, f)| SizeShape::Hyperexp { scv, f }),
    ]
}

fn mix() -> impl Strategy<Value = JobMix> {
    (0.1f64..0.95, 1.2f64..20.0, 0.2f64..0.95, shape(), shape())
        .prop_map(|(p, ratio, lambda, s1, s2)| JobMix::from_ratio(p, ratio, lambda, s1, s2).unwrap())
}

fn named() -> impl Strategy<Value = NamedPolicy> {
    prop_oneof![
        Just(NamedPolicy::Fcfs),
        (1usize..7).prop_map(|m| NamedPolicy::NudgeM { m }),
        (1usize..7).prop_map(|k| NamedPolicy::NudgeK { k }),
        (1usize..7).prop_map(|l| NamedPolicy::NudgeL { l }),
        (1usize..7).prop_flat_map(|m| (1..=m).prop_map(move |k| NamedPolicy::NudgeKM { k, m })),
        (1usize..7).prop_flat_map(|m| (1..=m).prop_map(move |l| NamedPolicy::NudgeML { m, l })),
        (1usize..4, 1usize..4).prop_map(|(k, l)| NamedPolicy::NudgeKL { k, l }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn named_policies_are_valid_and_round_trip(policy in named()) {
        let table = policy.table().unwrap();
        let back = PolicyFn::parse(&table.to_text()).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn atir_changes_direction_once(mix in mix()) {
        let info = decay_rate(&mix).unwrap();
        let best = m_opt(&info);
        let values: Vec<f64> = (0..=best + 8).map(|m| atir_nudge_m(&info, m)).collect();
        for m in 0..best {
            prop_assert!(values[m + 1] >= values[m] - 1e-12, "rising part at {}", m);
        }
        for m in best..values.len() - 1 {
            prop_assert!(values[m + 1] <= values[m] + 1e-12, "falling part at {}", m);
        }
        prop_assert!(values[best] >= 0.0);
    }

    #[test]
    fn heavy_traffic_limit_grows_with_the_mean_ratio(p in 0.05f64..0.95, r in 1.0f64..50.0, step in 1.01f64..3.0) {
        let limit = |ratio: f64| {
            let e1 = 1.0 / (p + (1.0 - p) * ratio);
            heavy_traffic_atir(p, e1, ratio * e1).unwrap()
        };
        let (a, b) = (limit(r), limit(r * step));
        prop_assert!(b >= a - 1e-12);
        prop_assert!((0.0..=p + 1e-12).contains(&b));
    }

    #[test]
    fn swap_pmf_is_a_distribution(mix in mix(), m in 1usize..5, s in 0.0f64..30.0) {
        let pmf = swap_pmf(&SwapChain::new(&mix, m).unwrap(), s).unwrap();
        prop_assert_eq!(pmf.probs.len(), m + 1);
        prop_assert!(pmf.probs.iter().all(|&x| x >= -1e-12));
        prop_assert!((pmf.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn simulation_is_deterministic(mix in mix(), policy in named(), seed in any::<u64>()) {
        let cfg = SimConfig::new(mix, SimPolicy::Named(policy), 3_000, seed).with_times(vec![1.0, 4.0]);
        prop_assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn riccati_solution_is_substochastic(mix in mix(), m in 1usize..4) {
        let psi = solve_riccati(&build_nudge_m_fluid(&mix, m).unwrap()).unwrap();
        for r in 0..psi.nrows() {
            let row = psi.row(r);
            prop_assert!(row.iter().all(|&x| x >= -1e-12));
            prop_assert!(row.sum() <= 1.0 + 1e-9);
        }
    }
}
