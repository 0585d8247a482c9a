use proptest::prelude::*;

use reset_hour_core::calibration::{infer_lambda, PriceProfile};
use reset_hour_core::hours::rotate;
use reset_hour_core::model::{
    block_prices, day_weighted_share, flat_lower_bound, solve_constrained_path, solve_within_cycle,
    solve_within_cycle_price_space, unrestricted_path, unrestricted_price, weighted_average_price, LambdaProfile,
    ModelParams, WeightProfile,
};
use reset_hour_core::oracle::{
    brute_force_constrained, compare_dual_space, compare_with_brute_force, profit, profit_gradient, ProfitSpec,
};
use reset_hour_core::sweep::sweep_all;
use reset_hour_core::HOURS;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.5f64..2.0, 0.05f64..0.6).prop_map(|(c, tau)| ModelParams::new(c, tau).unwrap())
}

fn cycle(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..=1.0, n),
            prop::collection::vec(0.01f64..1.0, n),
        )
    })
}

fn day() -> impl Strategy<Value = (LambdaProfile, WeightProfile)> {
    (
        prop::array::uniform24(0.2f64..=1.0),
        prop::array::uniform24(0.01f64..1.0),
    )
        .prop_map(|(l, w)| (LambdaProfile::new(l).unwrap(), WeightProfile::from_raw(w).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pooling_matches_exhaustive_search(p in params_strategy(), (l, w) in cycle(1..=8)) {
        prop_assert_eq!(compare_with_brute_force(&p, &l, &w, 1e-10).unwrap(), None);
    }

    #[test]
    fn share_and_price_space_agree(p in params_strategy(), (l, w) in cycle(1..=24)) {
        prop_assert_eq!(compare_dual_space(&p, &l, &w, 1e-10).unwrap(), None);
    }

    #[test]
    fn paths_are_monotone(p in params_strategy(), (l, w) in day(), r in 0usize..HOURS) {
        let path = solve_constrained_path(&p, &l, &w, r).unwrap();
        let within = path.prices_within_cycle();
        prop_assert!(within.windows(2).all(|x| x[0] >= x[1]));
        prop_assert!(path.partition.blocks.windows(2).all(|b| b[0].price > b[1].price));
    }

    #[test]
    fn pooling_preserves_mean_share(p in params_strategy(), (l, w) in day(), r in 0usize..HOURS) {
        let path = solve_constrained_path(&p, &l, &w, r).unwrap();
        let pooled: f64 = path.partition.blocks.iter().map(|b| b.weight_sum * b.lambda_bar).sum();
        prop_assert!((pooled - day_weighted_share(&l, &w)).abs() <= 1e-12);
    }

    #[test]
    fn flat_bound_and_sandwich(p in params_strategy(), (l, w) in day(), r in 0usize..HOURS) {
        let path = solve_constrained_path(&p, &l, &w, r).unwrap();
        let avg = weighted_average_price(&path.prices_clock, &w);
        let bound = flat_lower_bound(&p, &l, &w);
        let unrestricted = weighted_average_price(&unrestricted_path(&p, &l), &w);
        prop_assert!(bound <= avg + 1e-12);
        prop_assert!(avg <= unrestricted + 1e-12);
        if path.block_count() == 1 {
            prop_assert!((avg - bound).abs() <= 1e-12);
        } else {
            prop_assert!(avg > bound);
        }
    }

    #[test]
    fn weights_scale_invariant(p in params_strategy(), (l, w) in cycle(2..=24), s in 0.001f64..1000.0) {
        let scaled: Vec<f64> = w.iter().map(|x| x * s).collect();
        let a = solve_within_cycle(&p, &l, &w).unwrap();
        let b = solve_within_cycle(&p, &l, &scaled).unwrap();
        let bounds = |v: &[reset_hour_core::model::Block]| v.iter().map(|b| (b.start_k, b.end_k)).collect::<Vec<_>>();
        prop_assert_eq!(bounds(&a), bounds(&b));
        for (x, y) in block_prices(&a).iter().zip(block_prices(&b)) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn day_scale_invariant(p in params_strategy(), l in prop::array::uniform24(0.2f64..=1.0),
                           w in prop::array::uniform24(0.01f64..1.0), s in 0.01f64..100.0) {
        let l = LambdaProfile::new(l).unwrap();
        let a = sweep_all(&p, &l, &WeightProfile::from_raw(w).unwrap()).unwrap();
        let b = sweep_all(&p, &l, &WeightProfile::from_raw(w.map(|x| x * s)).unwrap()).unwrap();
        for (x, y) in a.evaluations.iter().zip(&b.evaluations) {
            prop_assert_eq!(x.path.partition.bounds(), y.path.partition.bounds());
            prop_assert!((x.weighted_avg - y.weighted_avg).abs() <= 1e-12);
        }
    }

    #[test]
    fn flat_reset_is_globally_optimal(p in params_strategy(), (l, w) in day()) {
        let s = sweep_all(&p, &l, &w).unwrap();
        let best = s.evaluations[s.optimal_hour].weighted_avg;
        for e in s.evaluations.iter().filter(|e| e.block_count == 1) {
            prop_assert!((e.weighted_avg - best).abs() <= 1e-12);
        }
        prop_assert!(s.evaluations.iter().all(|e| e.saving >= -1e-12));
    }

    #[test]
    fn calibration_round_trip(prices in prop::array::uniform24(1.6f64..2.1), c in 0.5f64..1.59) {
        let profile = PriceProfile::new(prices).unwrap();
        let r = infer_lambda(&profile, c).unwrap();
        let max = r.lambdas.values().iter().copied().fold(0.0, f64::max);
        prop_assert_eq!(max, 1.0);
        for h in 0..HOURS {
            let back = unrestricted_price(&r.params, r.lambdas.get(h)).unwrap();
            prop_assert!((back - prices[h]).abs() <= 1e-12);
        }
        for s in 0..HOURS {
            for t in 0..HOURS {
                prop_assert_eq!(r.lambdas.get(s) >= r.lambdas.get(t), prices[s] <= prices[t]);
            }
        }
    }

    #[test]
    fn extreme_share_hours_independent_of_cost(prices in prop::array::uniform24(1.6f64..2.1),
                                              c1 in 0.5f64..1.59, c2 in 0.5f64..1.59) {
        let profile = PriceProfile::new(prices).unwrap();
        let pos = |c: f64, max: bool| {
            let v = *infer_lambda(&profile, c).unwrap().lambdas.values();
            (0..HOURS).fold(0, |b, i| if (max && v[i] > v[b]) || (!max && v[i] < v[b]) { i } else { b })
        };
        prop_assert_eq!(pos(c1, true), pos(c2, true));
        prop_assert_eq!(pos(c1, false), pos(c2, false));
    }

    #[test]
    fn profit_is_strictly_concave(p in params_strategy(), (l, w) in cycle(1..=6),
                                  own_shift in -0.05f64..0.05, rival_shift in -0.05f64..0.05) {
        let n = l.len();
        let base: Vec<f64> = l.iter().map(|x| p.c + p.tau / x).collect();
        let own: Vec<f64> = base.iter().map(|x| x + own_shift).collect();
        let rival: Vec<f64> = base.iter().map(|x| x + rival_shift).collect();
        let spec = ProfitSpec::new(p, l.clone(), w.clone(), rival).unwrap();
        let grad = profit_gradient(&own, &spec).unwrap();
        let h = 1e-4;
        for k in 0..n {
            let mut up = own.clone();
            up[k] += h;
            let mut dn = own.clone();
            dn[k] -= h;
            let f0 = profit(&own, &spec).unwrap();
            let fu = profit(&up, &spec).unwrap();
            let fd = profit(&dn, &spec).unwrap();
            let second = (fu - 2.0 * f0 + fd) / (h * h);
            let expected = -w[k] * l[k] / p.tau;
            prop_assert!((second - expected).abs() <= 1e-6 * expected.abs().max(1e-3) + 1e-5,
                "k={} second={} expected={}", k, second, expected);
            let fd_grad = (fu - fd) / (2.0 * h);
            prop_assert!((fd_grad - grad[k]).abs() <= 1e-6 * grad[k].abs().max(1e-3));
        }
    }

    #[test]
    fn concave_program_selects_exhaustive_path(p in params_strategy(), (l, w) in cycle(1..=7)) {
        // maximize sum_k w_k (p_k - c) - w_k lambda_k / (2 tau) (p_k - c)^2 over the same candidates
        let n = l.len();
        let objective = |path: &[f64]| -> f64 {
            (0..n).map(|k| w[k] * (path[k] - p.c) - w[k] * l[k] / (2.0 * p.tau) * (path[k] - p.c).powi(2)).sum()
        };
        let brute = brute_force_constrained(&l, &w, &p).unwrap();
        let flex: Vec<f64> = l.iter().map(|x| p.c + p.tau / x).collect();
        let a: Vec<f64> = (0..n).map(|k| w[k] * l[k]).collect();
        let mut best = f64::NEG_INFINITY;
        let mut best_path = Vec::new();
        for mask in 0u32..(1 << (n - 1)) {
            let mut path = vec![0.0; n];
            let mut start = 0;
            for j in 0..n {
                if j == n - 1 || mask & (1 << j) != 0 {
                    let num: f64 = (start..=j).map(|k| a[k] * flex[k]).sum();
                    let den: f64 = a[start..=j].iter().sum();
                    for x in &mut path[start..=j] { *x = num / den; }
                    start = j + 1;
                }
            }
            if path.windows(2).any(|x| x[1] > x[0]) { continue; }
            let v = objective(&path);
            if v > best { best = v; best_path = path; }
        }
        for (x, y) in best_path.iter().zip(&brute.prices) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn rotation_round_trip(values in prop::array::uniform24(-10.0f64..10.0), r in 0usize..HOURS) {
        let back = rotate(&rotate(&values, r), (HOURS - r) % HOURS);
        prop_assert_eq!(back, values);
    }

    #[test]
    fn price_space_blocks_match_formula(p in params_strategy(), (l, w) in cycle(1..=24)) {
        for b in solve_within_cycle_price_space(&p, &l, &w).unwrap() {
            let formula = p.c + p.tau / b.lambda_bar;
            prop_assert!((b.price - formula).abs() <= 1e-12 * formula);
        }
    }
}
