use proptest::prelude::*;

use spatial_align::generate::{gen_random, GenParams};
use spatial_align::multialign::{align_multi, gamma_identity_check};
use spatial_align::oracle::{brute_force_align, generate_gadget, OracleLimits, OracleMode};
use spatial_align::pairalign::{align_pair, build_shared_units_graph, max_weight_matching};
use spatial_align::solver1d::solve_1d;
use spatial_align::{
    disagreement_set, validate, validate_alignment, weighted_distance, Instance, LabelMap,
};

fn grid(seed: u64, w: usize, h: usize, k: usize, m: usize) -> Instance {
    gen_random(
        seed,
        &GenParams {
            width: w,
            height: h,
            k,
            m: m.min(w * h),
            population: 1..=20,
        },
    )
    .unwrap()
}

fn best_map(inst: &Instance) -> LabelMap {
    let (a, b) = (&inst.collections()[0], &inst.collections()[1]);
    let g = build_shared_units_graph(a, b);
    let m = max_weight_matching(&g);
    LabelMap::from_pairs(
        &a.name,
        g.left.iter().enumerate().map(|(s, l)| {
            (
                l.clone(),
                m.pairs
                    .iter()
                    .find(|p| p.0 == s)
                    .map(|p| g.right[p.1].clone()),
            )
        }),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_validate(seed: u64, w in 1usize..6, h in 1usize..6, k in 1usize..4, m in 1usize..6) {
        prop_assert!(validate(&grid(seed, w, h, k, m)).is_empty());
    }

    #[test]
    fn unit_distance_is_symmetric(seed: u64, m in 1usize..5) {
        let inst = grid(seed, 4, 4, 2, m);
        let (a, b) = (&inst.collections()[0], &inst.collections()[1]);
        let map = best_map(&inst);
        let fwd = disagreement_set(&a.partition, &b.partition, &map).unwrap();
        let back = disagreement_set(&b.partition, &a.partition, &map.inverse(&b.partition)).unwrap();
        prop_assert_eq!(&fwd, &back);
        let dw = weighted_distance(a, &b.partition, &map).unwrap();
        prop_assert_eq!(dw == 0, fwd.is_empty());
    }

    #[test]
    fn objective_is_largest_recomputed_distance(seed: u64) {
        let inst = grid(seed, 4, 3, 3, 3);
        let r = align_multi(&inst).unwrap();
        let recomputed = inst
            .collections()
            .iter()
            .map(|c| weighted_distance(c, &r.alignment.result, r.alignment.correspondence.get(&c.name).unwrap()).unwrap())
            .max()
            .unwrap();
        prop_assert_eq!(r.alignment.objective(), recomputed);
        prop_assert!(validate_alignment(&inst, &r.alignment).is_empty());
        let mut items = r.allocation.bundles.concat();
        items.sort_unstable();
        prop_assert_eq!(items, (0..r.items.len()).collect::<Vec<_>>());
    }

    #[test]
    fn pair_costs_follow_the_split(seed: u64, m in 1usize..5) {
        // Equal support counts: no attached supports, so the split alone
        // decides every cost.
        let inst = grid(seed, 4, 4, 2, m);
        let r = align_pair(&inst).unwrap();
        let (s, t) = (&inst.collections()[0], &inst.collections()[1]);
        let paid_s: u64 = r.partition.part_t.iter().map(|&u| s.pop(u)).sum();
        let paid_t: u64 = r.partition.part_s.iter().map(|&u| t.pop(u)).sum();
        prop_assert_eq!((r.report.cost_s, r.report.cost_t), (paid_s, paid_t));
        prop_assert!(validate_alignment(&inst, &r.alignment).is_empty());
    }

    #[test]
    fn heuristics_never_beat_the_oracle(seed: u64, k in 2usize..4) {
        let inst = grid(seed, 3, 3, k, 3);
        let opt = brute_force_align(&inst, OracleMode::Full, OracleLimits::default()).unwrap().optimum;
        prop_assert!(align_multi(&inst).unwrap().alignment.objective() >= opt);
        if k == 2 {
            prop_assert!(align_pair(&inst).unwrap().alignment.objective() >= opt);
        }
    }

    #[test]
    fn path_separators_are_monotone(seed: u64, w in 2usize..12, k in 2usize..4, m in 1usize..5) {
        let inst = grid(seed, w, 1, k, m);
        let sol = solve_1d(&inst).unwrap();
        prop_assert!(sol.choices.windows(2).all(|p| p[0].position <= p[1].position));
        let supports = inst.collections()[0].partition.support_count();
        prop_assert!(sol.steps <= k * (w + 1) * (supports - 1));
        prop_assert!(validate_alignment(&inst, &sol.alignment).is_empty());
    }

    #[test]
    fn gadget_optimum_and_separation(values in proptest::collection::vec(1u64..10, 1..7)) {
        let total: u64 = values.iter().sum();
        let delta = (0u32..1 << values.len())
            .map(|mask| {
                let part: u64 = values.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v).sum();
                total.abs_diff(2 * part)
            })
            .min()
            .unwrap();
        let gadget = generate_gadget(&values).unwrap();
        let r = brute_force_align(&gadget, OracleMode::Full, OracleLimits::default()).unwrap();
        prop_assert_eq!(r.optimum, (total + delta) / 2);
        let a = gadget.unit("a").unwrap();
        let b = gadget.unit("b").unwrap();
        if r.optimum <= total {
            prop_assert_ne!(r.alignment.result.owner(a), r.alignment.result.owner(b));
        }
    }

    #[test]
    fn gamma_identity_small(values in proptest::collection::vec(1u64..40, 0..8), n in 1usize..4) {
        prop_assert!(gamma_identity_check(&values, n).unwrap().holds);
    }
}
